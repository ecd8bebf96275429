//! Hypersurfaces Γ with parametric and implicit views, ray–surface
//! intersection by bracketing + bisection, finite-difference normals,
//! and the Γ₁ ∩ Γ₂ = ∅ separation check.
//!
//! Every surface exposes both views: χ: D ⊂ R^(n−1) → Rⁿ and g: Rⁿ → R
//! with Γ = {g = 0} and g < 0 on the declared "before" side. The bundle
//! solve needs the implicit view for intersections, region classification
//! needs the signs, and the s-enumeration needs the parametric view.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::defaults;
use crate::error::{Error, Result};
use crate::linalg;
use crate::math;

/// Built-in surface families.
#[derive(Debug, Clone)]
enum Shape {
    /// χ(s) = point + Σ sⱼ·spanⱼ, g(x) = ⟨x − point, normal⟩ (unit normal).
    Hyperplane {
        point: Vec<f64>,
        spanning: Vec<Vec<f64>>,
        normal: Vec<f64>,
    },
    /// n = 2 circle (or n = 3 sphere with two angles is out of scope);
    /// χ(θ) = center + r(cos θ, sin θ), g(x) = ±(‖x − center‖ − r),
    /// negative inside when `negative_inside`.
    Circle {
        center: Vec<f64>,
        radius: f64,
        negative_inside: bool,
    },
    /// n = 2 sample table, linearly interpolated; g is the signed distance
    /// to the polyline, negative on the left of the direction of travel.
    Polyline { params: Vec<f64>, points: Vec<Vec<f64>> },
}

/// An (n−1)-parameter hypersurface in Rⁿ.
#[derive(Debug, Clone)]
pub struct Surface {
    shape: Shape,
    dim: usize,
    param_box: Vec<(f64, f64)>,
}

fn check_point(x: &[f64], n: usize, what: &str) -> Result<()> {
    if x.len() != n {
        return Err(Error::InvalidInput(format!(
            "{what} has {} components, ambient dimension is {n}",
            x.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("{what} has non-finite components")));
    }
    Ok(())
}

impl Surface {
    /// Hyperplane through `point` spanned by `spanning` (n−1 directions).
    /// The unit normal is the complement of the spanning set; when
    /// `normal_hint` is given the normal is flipped to point its way,
    /// otherwise the sign makes its largest-magnitude component positive.
    pub fn hyperplane(
        point: Vec<f64>,
        spanning: Vec<Vec<f64>>,
        normal_hint: Option<Vec<f64>>,
        param_box: Vec<(f64, f64)>,
    ) -> Result<Self> {
        let n = point.len();
        if n == 0 {
            return Err(Error::InvalidInput("ambient dimension 0".into()));
        }
        if spanning.len() != n - 1 {
            return Err(Error::InvalidInput(format!(
                "hyperplane in R^{n} needs {} spanning directions, got {}",
                n - 1,
                spanning.len()
            )));
        }
        for v in &spanning {
            check_point(v, n, "spanning direction")?;
            if linalg::norm(v) == 0.0 {
                return Err(Error::InvalidInput("zero spanning direction".into()));
            }
        }
        if param_box.len() != n - 1 || param_box.iter().any(|(lo, hi)| !(lo <= hi)) {
            return Err(Error::InvalidInput("bad parameter box".into()));
        }
        let mut normal = plane_complement(&spanning, n)?;
        match &normal_hint {
            Some(hint) => {
                check_point(hint, n, "normal hint")?;
                let d = linalg::dot(&normal, hint);
                if math::abs(d) < 1e-12 * linalg::norm(hint) {
                    return Err(Error::InvalidInput(
                        "normal hint is tangent to the hyperplane".into(),
                    ));
                }
                if d < 0.0 {
                    for v in normal.iter_mut() {
                        *v = -*v;
                    }
                }
            }
            None => {
                let lead = normal
                    .iter()
                    .cloned()
                    .fold(0.0f64, |a, b| if math::abs(b) > math::abs(a) { b } else { a });
                if lead < 0.0 {
                    for v in normal.iter_mut() {
                        *v = -*v;
                    }
                }
            }
        }
        Ok(Self {
            shape: Shape::Hyperplane { point, spanning, normal },
            dim: n,
            param_box,
        })
    }

    /// Circle in R² with the standard angle parameterization.
    pub fn circle(
        center: Vec<f64>,
        radius: f64,
        negative_inside: bool,
        param_box: Vec<(f64, f64)>,
    ) -> Result<Self> {
        if center.len() != 2 {
            return Err(Error::InvalidInput(
                "circle surfaces are supported in dimension 2 only".into(),
            ));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidInput("circle radius must be positive".into()));
        }
        if param_box.len() != 1 {
            return Err(Error::InvalidInput("circle needs a 1-D parameter box".into()));
        }
        Ok(Self {
            shape: Shape::Circle { center, radius, negative_inside },
            dim: 2,
            param_box,
        })
    }

    /// Polyline through the sample table (sᵢ, xᵢ), params strictly increasing.
    pub fn polyline(params: Vec<f64>, points: Vec<Vec<f64>>) -> Result<Self> {
        if params.len() < 2 || params.len() != points.len() {
            return Err(Error::InvalidInput(
                "polyline needs at least two rows, one param per point".into(),
            ));
        }
        if points.iter().any(|p| p.len() != 2) {
            return Err(Error::InvalidInput(
                "tabulated surfaces are supported in dimension 2 only".into(),
            ));
        }
        if params.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("polyline params must strictly increase".into()));
        }
        let param_box = vec![(params[0], *params.last().unwrap())];
        Ok(Self {
            shape: Shape::Polyline { params, points },
            dim: 2,
            param_box,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn param_dim(&self) -> usize {
        self.dim - 1
    }

    pub fn param_box(&self) -> &[(f64, f64)] {
        &self.param_box
    }

    /// χ(s), requiring s in the declared box D (small tolerance).
    pub fn point(&self, s: &[f64]) -> Result<Vec<f64>> {
        if s.len() != self.param_dim() {
            return Err(Error::ParamOutsideDomain);
        }
        for (v, (lo, hi)) in s.iter().zip(&self.param_box) {
            let tol = 1e-9 * (1.0 + hi - lo);
            if *v < lo - tol || *v > hi + tol {
                return Err(Error::ParamOutsideDomain);
            }
        }
        self.point_extended(s)
    }

    /// χ(s) on the family's natural domain: global for hyperplanes and
    /// circles, the sample hull for polylines. Newton inversion uses this
    /// so that analytic scenarios stay evaluable on windows wider than D.
    pub fn point_extended(&self, s: &[f64]) -> Result<Vec<f64>> {
        if s.len() != self.param_dim() || s.iter().any(|v| !v.is_finite()) {
            return Err(Error::ParamOutsideDomain);
        }
        match &self.shape {
            Shape::Hyperplane { point, spanning, .. } => {
                let mut x = point.clone();
                for (sj, v) in s.iter().zip(spanning) {
                    for i in 0..self.dim {
                        x[i] += sj * v[i];
                    }
                }
                Ok(x)
            }
            Shape::Circle { center, radius, .. } => {
                let theta = s[0];
                Ok(vec![
                    center[0] + radius * math::cos(theta),
                    center[1] + radius * math::sin(theta),
                ])
            }
            Shape::Polyline { params, points } => {
                let t = s[0];
                let lo = params[0];
                let hi = *params.last().unwrap();
                let tol = 1e-9 * (1.0 + hi - lo);
                if t < lo - tol || t > hi + tol {
                    return Err(Error::ParamOutsideDomain);
                }
                let t = t.clamp(lo, hi);
                let seg = match params.windows(2).position(|w| t <= w[1]) {
                    Some(i) => i,
                    None => params.len() - 2,
                };
                let w = (t - params[seg]) / (params[seg + 1] - params[seg]);
                Ok(vec![
                    points[seg][0] + w * (points[seg + 1][0] - points[seg][0]),
                    points[seg][1] + w * (points[seg + 1][1] - points[seg][1]),
                ])
            }
        }
    }

    /// Implicit view g(x); Γ = {g = 0}, g < 0 on the "before" side.
    pub fn implicit(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Hyperplane { point, normal, .. } => {
                let mut acc = 0.0;
                for i in 0..self.dim {
                    acc += (x[i] - point[i]) * normal[i];
                }
                acc
            }
            Shape::Circle { center, radius, negative_inside } => {
                let d = linalg::dist(x, center) - radius;
                if *negative_inside {
                    d
                } else {
                    -d
                }
            }
            Shape::Polyline { points, .. } => {
                // Signed distance to the nearest segment; the sign is the
                // side of that segment's direction (left of travel < 0).
                let mut best = f64::INFINITY;
                let mut signed = f64::INFINITY;
                for seg in points.windows(2) {
                    let (a, b) = (&seg[0], &seg[1]);
                    let ex = b[0] - a[0];
                    let ey = b[1] - a[1];
                    let len2 = ex * ex + ey * ey;
                    let px = x[0] - a[0];
                    let py = x[1] - a[1];
                    let t = if len2 > 0.0 { (px * ex + py * ey) / len2 } else { 0.0 };
                    let t = t.clamp(0.0, 1.0);
                    let dx = px - t * ex;
                    let dy = py - t * ey;
                    let d = math::sqrt(dx * dx + dy * dy);
                    if d < best {
                        best = d;
                        let cross = ex * py - ey * px;
                        signed = if cross > 0.0 { -d } else { d };
                    }
                }
                signed
            }
        }
    }

    /// Centered-difference gradient of g (unnormalized).
    pub fn implicit_gradient(&self, x: &[f64]) -> Vec<f64> {
        let h = defaults::IMPLICIT_GRADIENT_STEP;
        let mut grad = vec![0.0; self.dim];
        let mut xp = x.to_vec();
        for i in 0..self.dim {
            xp[i] = x[i] + h;
            let gp = self.implicit(&xp);
            xp[i] = x[i] - h;
            let gm = self.implicit(&xp);
            xp[i] = x[i];
            grad[i] = (gp - gm) / (2.0 * h);
        }
        grad
    }

    /// Unit normal at a point of Γ, oriented from the g < 0 side to the
    /// g > 0 side. Errors off-surface points and degenerate gradients.
    pub fn normal(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_point(x, self.dim, "surface point")?;
        let g = self.implicit(x);
        if math::abs(g) > defaults::ON_SURFACE_TOL {
            return Err(Error::InvalidInput(format!(
                "point not on the surface (|g| = {})",
                math::abs(g)
            )));
        }
        let mut grad = self.implicit_gradient(x);
        let n = linalg::normalize(&mut grad);
        if n < defaults::IMPLICIT_GRADIENT_FLOOR {
            return Err(Error::DegenerateGradient { norm: n });
        }
        Ok(grad)
    }

    /// Uniform parameter grid over D, `per_axis` points per parameter axis
    /// (a single empty parameter vector in ambient dimension 1).
    pub fn sample_params(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let pd = self.param_dim();
        if pd == 0 {
            return vec![vec![]];
        }
        let axis_vals: Vec<Vec<f64>> = self
            .param_box
            .iter()
            .map(|(lo, hi)| {
                (0..per_axis)
                    .map(|k| {
                        if per_axis == 1 {
                            0.5 * (lo + hi)
                        } else {
                            lo + (hi - lo) * k as f64 / (per_axis - 1) as f64
                        }
                    })
                    .collect()
            })
            .collect();
        let mut grid: Vec<Vec<f64>> = vec![Vec::new()];
        for vals in &axis_vals {
            let mut next = Vec::with_capacity(grid.len() * vals.len());
            for prefix in &grid {
                for v in vals {
                    let mut row = prefix.clone();
                    row.push(*v);
                    next.push(row);
                }
            }
            grid = next;
        }
        grid
    }

    /// Parametric/implicit consistency and gradient nondegeneracy on a
    /// sampled grid: |g(χ(s))| ≤ 1e−9 and ‖∇g‖ ≥ 1e−9.
    pub fn consistency_check(&self, per_axis: usize) -> Result<()> {
        for s in self.sample_params(per_axis) {
            let x = self.point(&s)?;
            let g = self.implicit(&x);
            if math::abs(g) > defaults::SURFACE_CONSISTENCY_TOL {
                return Err(Error::InvalidInput(format!(
                    "parametric/implicit views disagree: |g(χ(s))| = {} at s = {s:?}",
                    math::abs(g)
                )));
            }
            let grad = self.implicit_gradient(&x);
            let n = linalg::norm(&grad);
            if n < defaults::IMPLICIT_GRADIENT_FLOOR {
                return Err(Error::DegenerateGradient { norm: n });
            }
        }
        Ok(())
    }

    /// (point, unit normal) when the surface is a hyperplane.
    pub fn as_hyperplane(&self) -> Option<(&[f64], &[f64])> {
        match &self.shape {
            Shape::Hyperplane { point, normal, .. } => Some((point, normal)),
            _ => None,
        }
    }

    /// Diagonal of the bounding box of sampled surface points and `extra`.
    pub fn sample_diagonal(&self, extra: &[f64]) -> f64 {
        let mut lo = extra.to_vec();
        let mut hi = extra.to_vec();
        for s in self.sample_params(defaults::S_SAMPLES_DEFAULT.min(17)) {
            if let Ok(x) = self.point(&s) {
                for i in 0..self.dim {
                    lo[i] = lo[i].min(x[i]);
                    hi[i] = hi[i].max(x[i]);
                }
            }
        }
        linalg::dist(&hi, &lo)
    }
}

/// Unit vector orthogonal to all spanning directions (Gram–Schmidt on the
/// standard basis, keeping the last surviving vector).
fn plane_complement(spanning: &[Vec<f64>], n: usize) -> Result<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for v in spanning {
        let mut w = v.clone();
        for b in &basis {
            let c = linalg::dot(&w, b);
            for i in 0..n {
                w[i] -= c * b[i];
            }
        }
        if linalg::normalize(&mut w) < 1e-12 {
            return Err(Error::InvalidInput(
                "spanning directions are linearly dependent".into(),
            ));
        }
        basis.push(w);
    }
    for axis in 0..n {
        let mut w = vec![0.0; n];
        w[axis] = 1.0;
        for b in &basis {
            let c = linalg::dot(&w, b);
            for i in 0..n {
                w[i] -= c * b[i];
            }
        }
        if linalg::normalize(&mut w) > 1e-8 {
            return Ok(w);
        }
    }
    Err(Error::InvalidInput("could not build a hyperplane normal".into()))
}

/// Straight ray with a nonzero direction.
#[derive(Debug, Clone)]
pub struct Ray {
    pub origin: Vec<f64>,
    pub direction: Vec<f64>,
}

impl Ray {
    pub fn new(origin: Vec<f64>, direction: Vec<f64>) -> Result<Self> {
        if linalg::norm(&direction) == 0.0 {
            return Err(Error::InvalidInput("ray direction is zero".into()));
        }
        if origin.len() != direction.len() {
            return Err(Error::InvalidInput("ray origin/direction dimension mismatch".into()));
        }
        Ok(Self { origin, direction })
    }

    fn at(&self, lambda: f64, out: &mut [f64]) {
        for i in 0..self.origin.len() {
            out[i] = self.origin[i] + lambda * self.direction[i];
        }
    }
}

/// Smallest λ > 0 with g(origin + λ·direction) = 0, or None.
///
/// Sign-change bracketing on [0, λ_max] followed by bisection, then a
/// couple of secant steps to push |g| to the value tolerance. Origins on
/// the surface (λ ≤ 1e−12) do not count: the construction needs strictly
/// forward motion.
pub fn ray_intersect(surface: &Surface, ray: &Ray, lambda_max: f64) -> Result<Option<f64>> {
    if !(lambda_max > 0.0) {
        return Err(Error::InvalidInput("lambda_max must be positive".into()));
    }
    let n = surface.ambient_dim();
    check_point(&ray.origin, n, "ray origin")?;
    let mut x = vec![0.0; n];
    let g_at = |lam: f64, buf: &mut Vec<f64>| -> f64 {
        ray.at(lam, buf);
        surface.implicit(buf)
    };

    let samples = defaults::RAY_BRACKET_SAMPLES;
    let mut lam_lo = 0.0;
    let mut g_lo = g_at(0.0, &mut x);
    let mut bracket = None;
    for k in 1..=samples {
        let lam = lambda_max * k as f64 / samples as f64;
        let g = g_at(lam, &mut x);
        if g == 0.0 {
            bracket = Some((lam, lam));
            break;
        }
        if g_lo == 0.0 {
            // Origin (or a grazing sample) exactly on the surface: only
            // accept motion that actually crosses.
            lam_lo = lam;
            g_lo = g;
            continue;
        }
        if g_lo.signum() != g.signum() {
            bracket = Some((lam_lo, lam));
            break;
        }
        lam_lo = lam;
        g_lo = g;
    }
    let (mut a, mut b) = match bracket {
        Some(br) => br,
        None => return Ok(None),
    };

    if a != b {
        let mut ga = g_at(a, &mut x);
        for _ in 0..200 {
            if b - a <= defaults::RAY_POSITION_TOL * 1e-3 {
                break;
            }
            let mid = 0.5 * (a + b);
            let gm = g_at(mid, &mut x);
            if gm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if ga.signum() != gm.signum() {
                b = mid;
            } else {
                a = mid;
                ga = gm;
            }
        }
    }
    let mut lam = 0.5 * (a + b);
    // Secant polish toward RAY_VALUE_TOL.
    for _ in 0..4 {
        let g0 = g_at(lam, &mut x);
        if math::abs(g0) <= defaults::RAY_VALUE_TOL {
            break;
        }
        let dl = (b - a).max(defaults::RAY_POSITION_TOL);
        let g1 = g_at(lam + dl, &mut x);
        if g1 == g0 {
            break;
        }
        let step = -g0 * dl / (g1 - g0);
        if !step.is_finite() {
            break;
        }
        lam += step;
    }
    if !(lam.is_finite()) || lam < 0.0 {
        return Ok(None);
    }
    if lam <= defaults::RAY_MIN_LAMBDA {
        return Ok(None);
    }
    Ok(Some(lam))
}

/// Default λ_max: factor × diagonal of (surface samples ∪ ray origin).
pub fn default_lambda_max(surface: &Surface, origin: &[f64]) -> f64 {
    let diag = surface.sample_diagonal(origin);
    defaults::RAY_LAMBDA_MAX_FACTOR * diag.max(1.0)
}

/// Sampled check that two surfaces never come within the separation floor.
pub fn surfaces_disjoint(a: &Surface, b: &Surface, per_axis: usize) -> Result<()> {
    let mut min_d = f64::INFINITY;
    let pa: Vec<Vec<f64>> = a
        .sample_params(per_axis)
        .into_iter()
        .filter_map(|s| a.point(&s).ok())
        .collect();
    let pb: Vec<Vec<f64>> = b
        .sample_params(per_axis)
        .into_iter()
        .filter_map(|s| b.point(&s).ok())
        .collect();
    for x in &pa {
        for y in &pb {
            min_d = min_d.min(linalg::dist(x, y));
        }
    }
    if min_d <= defaults::SURFACE_SEPARATION_FLOOR {
        return Err(Error::SurfacesIntersect { min_distance: min_d });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn gamma1_a() -> Surface {
        Surface::hyperplane(
            vec![0.0, 0.0],
            vec![vec![1.0, -1.0]],
            Some(vec![1.0, 1.0]),
            vec![(-2.0, 2.0)],
        )
        .unwrap()
    }

    pub(crate) fn gamma2_a() -> Surface {
        Surface::hyperplane(
            vec![1.0, 1.0],
            vec![vec![1.0, -1.0]],
            Some(vec![1.0, 1.0]),
            vec![(-2.0, 2.0)],
        )
        .unwrap()
    }

    #[test]
    fn scenario_a_parametrization() {
        let g1 = gamma1_a();
        assert_eq!(g1.point(&[0.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(g1.point(&[1.0]).unwrap(), vec![1.0, -1.0]);
        assert!(matches!(g1.point(&[5.0]), Err(Error::ParamOutsideDomain)));
        // the natural domain extends beyond D
        assert_eq!(g1.point_extended(&[5.0]).unwrap(), vec![5.0, -5.0]);
    }

    #[test]
    fn circle_parametrization_and_normal() {
        let c = Surface::circle(vec![0.0, 0.0], 1.0, true, vec![(0.0, core::f64::consts::TAU)])
            .unwrap();
        let p = c.point(&[0.0]).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1].abs() < 1e-15);
        let n = c.normal(&[1.0, 0.0]).unwrap();
        assert!((n[0] - 1.0).abs() < 1e-9 && n[1].abs() < 1e-9);
    }

    #[test]
    fn hyperplane_normals() {
        let g1 = gamma1_a();
        let inv_sqrt2 = 1.0 / core::f64::consts::SQRT_2;
        let n = g1.normal(&[0.0, 0.0]).unwrap();
        assert!((n[0] - inv_sqrt2).abs() < 1e-9);
        assert!((n[1] - inv_sqrt2).abs() < 1e-9);
        let n2 = gamma2_a().normal(&[1.0, 1.0]).unwrap();
        assert!((n2[0] - inv_sqrt2).abs() < 1e-9);
        // unit to 1e−12
        assert!((linalg::norm(&n) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ray_hits_gamma2() {
        let g2 = gamma2_a();
        let ray = Ray::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let lam_max = default_lambda_max(&g2, &ray.origin);
        let lam = ray_intersect(&g2, &ray, lam_max).unwrap().unwrap();
        assert!((lam - 1.0).abs() < 1e-10, "lambda = {lam}");
        // |g| at the accepted intersection
        let x = [0.0 + lam, 0.0 + lam];
        assert!(g2.implicit(&x).abs() <= 1e-12);
    }

    #[test]
    fn ray_pointing_away_misses() {
        let g2 = gamma2_a();
        let ray = Ray::new(vec![0.0, 0.0], vec![-1.0, -1.0]).unwrap();
        assert_eq!(ray_intersect(&g2, &ray, 100.0).unwrap(), None);
    }

    #[test]
    fn origin_on_surface_is_rejected() {
        let g2 = gamma2_a();
        let ray = Ray::new(vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(ray_intersect(&g2, &ray, 100.0).unwrap(), None);
    }

    #[test]
    fn ray_matches_closed_form_plane_solution() {
        // independent closed form: λ = ⟨p − o, n⟩ / ⟨d, n⟩
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let g2 = gamma2_a();
        for _ in 0..50 {
            let o = vec![rng.gen_range(-2.0..0.5), rng.gen_range(-2.0..0.5)];
            let d = vec![rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0)];
            let n = [1.0 / core::f64::consts::SQRT_2; 2];
            let closed = ((1.0 - o[0]) * n[0] + (1.0 - o[1]) * n[1]) / (d[0] * n[0] + d[1] * n[1]);
            let ray = Ray::new(o, d).unwrap();
            let lam = ray_intersect(&g2, &ray, 200.0).unwrap().unwrap();
            assert!((lam - closed).abs() < 1e-12, "{lam} vs {closed}");
        }
    }

    #[test]
    fn polyline_interpolation_and_sign() {
        // vertical-ish polyline x = 1 from y = -1 to 1, traveling +y:
        // left of travel is x < 1 ⇒ g < 0 there.
        let s = Surface::polyline(vec![-1.0, 1.0], vec![vec![1.0, -1.0], vec![1.0, 1.0]]).unwrap();
        let p = s.point(&[0.0]).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1].abs() < 1e-15);
        assert!(s.implicit(&[0.0, 0.0]) < 0.0);
        assert!(s.implicit(&[2.0, 0.0]) > 0.0);
        assert!(s.implicit(&[1.0, 0.5]).abs() < 1e-12);
    }

    #[test]
    fn disjointness_check() {
        assert!(surfaces_disjoint(&gamma1_a(), &gamma2_a(), 17).is_ok());
        assert!(matches!(
            surfaces_disjoint(&gamma1_a(), &gamma1_a(), 17),
            Err(Error::SurfacesIntersect { .. })
        ));
    }

    #[test]
    fn consistency_check_passes_for_families() {
        gamma1_a().consistency_check(17).unwrap();
        Surface::circle(vec![0.5, -0.5], 2.0, true, vec![(0.0, 6.0)])
            .unwrap()
            .consistency_check(17)
            .unwrap();
    }

    #[test]
    fn one_dimensional_point_surface() {
        let g = Surface::hyperplane(vec![-2.0], vec![], Some(vec![1.0]), vec![]).unwrap();
        assert_eq!(g.point(&[]).unwrap(), vec![-2.0]);
        assert!(g.implicit(&[-3.0]) < 0.0 && g.implicit(&[0.0]) > 0.0);
        let ray = Ray::new(vec![-2.0], vec![1.0]).unwrap();
        let g2 = Surface::hyperplane(vec![-1.0], vec![], Some(vec![1.0]), vec![]).unwrap();
        let lam = ray_intersect(&g2, &ray, 50.0).unwrap().unwrap();
        assert!((lam - 1.0).abs() < 1e-10);
    }
}
