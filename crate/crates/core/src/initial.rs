//! Region decomposition Ω⁻ / Ω⁰ / Ω⁺ around the bundle band and the
//! composite initial condition: U before Γ₁, the profile u₁(x) inside the
//! band, u₀⁰ past Γ₂.

use crate::defaults;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::math;
use crate::profile::{BundleLocation, ProfileBundle};

/// The three regions of the decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Ω⁻: before Γ₁ (reached by trajectories at τ < 0); carries U.
    Before,
    /// Ω⁰: the bundle band between Γ₁ and Γ₂; carries u₁(x).
    Band,
    /// Ω⁺: past Γ₂ (τ > τ₀(s)); carries u₀⁰.
    After,
}

impl Region {
    pub fn tag(&self) -> &'static str {
        match self {
            Region::Before => "before",
            Region::Band => "band",
            Region::After => "after",
        }
    }
}

/// Classify a point by Newton inversion, falling back on the implicit
/// signs of g₁, g₂ when no start converges. Points within the seam
/// tolerance of either surface belong to the band, keeping the composite
/// field continuous and deterministic at the seams.
pub fn classify_region(bundle: &ProfileBundle, x: &[f64]) -> Result<Region> {
    let g1 = bundle.gamma1().implicit(x);
    let g2 = bundle.gamma2().implicit(x);
    if math::abs(g1) <= defaults::SEAM_TOL || math::abs(g2) <= defaults::SEAM_TOL {
        return Ok(Region::Band);
    }
    match bundle.invert(x).location {
        BundleLocation::Interior(_) => Ok(Region::Band),
        BundleLocation::BeforeGamma1(_) => Ok(Region::Before),
        BundleLocation::AfterGamma2(_) => Ok(Region::After),
        BundleLocation::Outside => {
            let before = g1 < 0.0;
            let after = g2 > 0.0;
            match (before, after) {
                (true, false) => Ok(Region::Before),
                (false, true) => Ok(Region::After),
                (true, true) => Err(Error::AmbiguousRegion),
                (false, false) => Err(Error::UnresolvedRegion),
            }
        }
    }
}

/// The composite initial condition of the formation problem.
#[derive(Debug, Clone, Copy)]
pub struct PiecewiseField<'a> {
    bundle: &'a ProfileBundle,
}

impl<'a> PiecewiseField<'a> {
    pub fn new(bundle: &'a ProfileBundle) -> Self {
        Self { bundle }
    }

    pub fn bundle(&self) -> &ProfileBundle {
        self.bundle
    }

    /// Region and value together (one inversion).
    pub fn classify_eval(&self, x: &[f64]) -> Result<(Region, f64)> {
        let b = self.bundle;
        let g1 = b.gamma1().implicit(x);
        let g2 = b.gamma2().implicit(x);
        let seam = math::abs(g1) <= defaults::SEAM_TOL || math::abs(g2) <= defaults::SEAM_TOL;
        match b.invert(x).location {
            // clamp strips the τ-tolerance roundoff at the band edges
            BundleLocation::Interior(c) => Ok((
                Region::Band,
                (b.u_start() - c.k * c.tau).clamp(b.u_end(), b.u_start()),
            )),
            BundleLocation::BeforeGamma1(c) if seam => {
                Ok((Region::Band, (b.u_start() - c.k * c.tau).clamp(b.u_end(), b.u_start())))
            }
            BundleLocation::AfterGamma2(c) if seam => {
                Ok((Region::Band, (b.u_start() - c.k * c.tau).clamp(b.u_end(), b.u_start())))
            }
            BundleLocation::BeforeGamma1(_) => Ok((Region::Before, b.u_gamma1())),
            BundleLocation::AfterGamma2(_) => Ok((Region::After, b.u_gamma2())),
            BundleLocation::Outside => {
                if seam {
                    return Err(Error::UnresolvedRegion);
                }
                match (g1 < 0.0, g2 > 0.0) {
                    (true, false) => Ok((Region::Before, b.u_gamma1())),
                    (false, true) => Ok((Region::After, b.u_gamma2())),
                    (true, true) => Err(Error::AmbiguousRegion),
                    (false, false) => Err(Error::UnresolvedRegion),
                }
            }
        }
    }
}

impl Field for PiecewiseField<'_> {
    fn eval(&self, x: &[f64]) -> Result<f64> {
        self.classify_eval(x).map(|(_, u)| u)
    }

    fn region_id(&self, x: &[f64]) -> Option<u8> {
        classify_region(self.bundle, x).ok().map(|r| r as u8)
    }
}

/// Initial condition value at x (U, u₁(x), or u₀⁰ by region).
pub fn eval_initial(bundle: &ProfileBundle, x: &[f64]) -> Result<f64> {
    PiecewiseField::new(bundle).eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::test_fixtures::bundle_a;

    #[test]
    fn scenario_a_regions() {
        let b = bundle_a();
        assert_eq!(classify_region(&b, &[-1.0, -1.0]).unwrap(), Region::Before);
        assert_eq!(classify_region(&b, &[1.0, 0.0]).unwrap(), Region::Band);
        assert_eq!(classify_region(&b, &[2.0, 2.0]).unwrap(), Region::After);
    }

    #[test]
    fn scenario_a_values() {
        let b = bundle_a();
        let f = PiecewiseField::new(&b);
        assert_eq!(f.eval(&[-1.0, -1.0]).unwrap(), 2.0);
        assert!((f.eval(&[0.5, 0.5]).unwrap() - 1.5).abs() < 1e-9);
        assert_eq!(f.eval(&[2.0, 2.0]).unwrap(), 1.0);
    }

    #[test]
    fn seam_points_belong_to_the_band() {
        let b = bundle_a();
        // exactly on Γ₁ and on Γ₂
        assert_eq!(classify_region(&b, &[0.0, 0.0]).unwrap(), Region::Band);
        assert_eq!(classify_region(&b, &[1.0, 1.0]).unwrap(), Region::Band);
        let f = PiecewiseField::new(&b);
        assert!((f.eval(&[0.0, 0.0]).unwrap() - 2.0).abs() < 1e-9);
        assert!((f.eval(&[1.0, 1.0]).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn partition_has_no_gaps_on_a_grid() {
        let b = bundle_a();
        let mut counts = [0usize; 3];
        for i in 0..21 {
            for j in 0..21 {
                let x = [-3.0 + 8.0 * i as f64 / 20.0, -3.0 + 8.0 * j as f64 / 20.0];
                let r = classify_region(&b, &x).unwrap();
                counts[r as usize] += 1;
            }
        }
        assert!(counts.iter().all(|&c| c > 0), "{counts:?}");
        assert_eq!(counts.iter().sum::<usize>(), 21 * 21);
    }

    #[test]
    fn values_stay_in_state_range() {
        let b = bundle_a();
        let f = PiecewiseField::new(&b);
        for i in 0..40 {
            for j in 0..40 {
                let x = [-3.0 + 8.0 * i as f64 / 39.0, -3.0 + 8.0 * j as f64 / 39.0];
                let u = f.eval(&x).unwrap();
                assert!((1.0..=2.0).contains(&u), "u = {u} at {x:?}");
            }
        }
    }

    #[test]
    fn continuity_across_the_seams() {
        let b = bundle_a();
        let f = PiecewiseField::new(&b);
        let eps = 1e-7;
        for k in 0..9 {
            let s = -1.8 + 3.6 * k as f64 / 8.0;
            for (p, boundary_value) in [([s, -s], 2.0), ([1.0 + s, 1.0 - s], 1.0)] {
                let inside = f.eval(&[p[0] + eps, p[1] + eps]).unwrap();
                let outside = f.eval(&[p[0] - eps, p[1] - eps]).unwrap();
                assert!((inside - boundary_value).abs() < 1e-6);
                assert!((outside - boundary_value).abs() < 1e-6);
            }
        }
    }

    /// Extrapolated two-sided limits coincide at the seams to 1e−8
    /// (linear extrapolation in ε removes the field's own slope).
    #[test]
    fn two_sided_limits_match_at_seams() {
        let b = bundle_a();
        let f = PiecewiseField::new(&b);
        let d = [1.0, 1.0];
        let limit = |p: &[f64], sign: f64| {
            let (e1, e2) = (1e-5, 1e-6);
            let u1 = f
                .eval(&[p[0] + sign * e1 * d[0], p[1] + sign * e1 * d[1]])
                .unwrap();
            let u2 = f
                .eval(&[p[0] + sign * e2 * d[0], p[1] + sign * e2 * d[1]])
                .unwrap();
            (10.0 * u2 - u1) / 9.0
        };
        for s in [-1.5, 0.0, 1.5] {
            for p in [[s, -s], [1.0 + s, 1.0 - s]] {
                let gap = limit(&p, 1.0) - limit(&p, -1.0);
                assert!(gap.abs() <= 1e-8, "seam gap {gap} at {p:?}");
            }
        }
    }

    /// Along a fixed-s trajectory the initial field decreases with slope −K.
    #[test]
    fn monotone_along_trajectories() {
        let b = bundle_a();
        let f = PiecewiseField::new(&b);
        let traj = b.trajectory(&[0.5]).unwrap();
        let mut prev = f64::INFINITY;
        for j in 0..16 {
            let tau = traj.tau0 * j as f64 / 15.0;
            let (x, u_true) = b.point_on_trajectory(&traj, tau);
            let u = f.eval(&x).unwrap();
            assert!((u - u_true).abs() < 1e-8);
            assert!(u <= prev + 1e-12);
            // slope −K against the previous sample
            if j > 0 {
                let dtau = traj.tau0 / 15.0;
                assert!(((prev - u) / dtau - traj.k).abs() < 1e-8);
            }
            prev = u;
        }
    }
}
