//! The vector flux f(u) = (f₁(u), …, fₙ(u)) with exact first and second
//! derivatives per component, plus the nondegeneracy check ‖f″(u)‖ ≠ 0
//! (the convexity analog that makes the bundle construction solvable).
//!
//! Only closed-form kinds are admitted; all derivatives are analytic.
//! Numerical differencing exists in the tests as an independent check,
//! never in an evaluation path.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::defaults;
use crate::error::{Error, Result};
use crate::math;

/// Built-in closed-form flux families.
#[derive(Debug, Clone, PartialEq)]
pub enum FluxKind {
    /// fᵢ(u) = aᵢ u²/2
    Quadratic(Vec<f64>),
    /// fᵢ(u) = Σₖ cᵢₖ uᵏ, coefficients ascending in k
    Polynomial(Vec<Vec<f64>>),
    /// fᵢ(u) = aᵢ eᵘ
    Exponential(Vec<f64>),
}

/// Vector flux with a declared working interval for the state u.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxModel {
    kind: FluxKind,
    lo: f64,
    hi: f64,
}

impl FluxModel {
    pub fn new(kind: FluxKind, working_interval: (f64, f64)) -> Result<Self> {
        let (lo, hi) = working_interval;
        if !(lo < hi) {
            return Err(Error::InvalidInput(format!(
                "working interval [{lo}, {hi}] is empty"
            )));
        }
        let n = match &kind {
            FluxKind::Quadratic(a) | FluxKind::Exponential(a) => a.len(),
            FluxKind::Polynomial(c) => c.len(),
        };
        if n == 0 {
            return Err(Error::InvalidInput("flux has zero components".into()));
        }
        Ok(Self { kind, lo, hi })
    }

    pub fn quadratic(a: Vec<f64>, working_interval: (f64, f64)) -> Result<Self> {
        Self::new(FluxKind::Quadratic(a), working_interval)
    }

    pub fn polynomial(coeffs: Vec<Vec<f64>>, working_interval: (f64, f64)) -> Result<Self> {
        Self::new(FluxKind::Polynomial(coeffs), working_interval)
    }

    pub fn exponential(a: Vec<f64>, working_interval: (f64, f64)) -> Result<Self> {
        Self::new(FluxKind::Exponential(a), working_interval)
    }

    /// Burgers-type flux u²/2 in every component.
    pub fn burgers(n: usize, working_interval: (f64, f64)) -> Result<Self> {
        Self::quadratic(vec![1.0; n], working_interval)
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            FluxKind::Quadratic(a) | FluxKind::Exponential(a) => a.len(),
            FluxKind::Polynomial(c) => c.len(),
        }
    }

    pub fn kind(&self) -> &FluxKind {
        &self.kind
    }

    pub fn working_interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn check_u(&self, u: f64) -> Result<()> {
        if u < self.lo || u > self.hi || !u.is_finite() {
            Err(Error::OutsideWorkingInterval {
                u,
                lo: self.lo,
                hi: self.hi,
            })
        } else {
            Ok(())
        }
    }

    /// Component i of the order-th derivative, no interval check.
    #[inline]
    pub(crate) fn component(&self, i: usize, u: f64, order: u8) -> f64 {
        match &self.kind {
            FluxKind::Quadratic(a) => match order {
                0 => a[i] * u * u * 0.5,
                1 => a[i] * u,
                _ => a[i],
            },
            FluxKind::Polynomial(coeffs) => {
                let c = &coeffs[i];
                // Horner on the derivative of requested order.
                let mut acc = 0.0;
                for k in (order as usize..c.len()).rev() {
                    let mut w = 1.0;
                    for j in 0..order as usize {
                        w *= (k - j) as f64;
                    }
                    acc = acc * u + w * c[k];
                }
                acc
            }
            FluxKind::Exponential(a) => a[i] * math::exp(u),
        }
    }

    /// Fill `out` with the order-th derivative vector, no interval check.
    #[inline]
    pub(crate) fn fill(&self, u: f64, order: u8, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim());
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.component(i, u, order);
        }
    }

    /// (f₁⁽ᵒʳᵈᵉʳ⁾(u), …, fₙ⁽ᵒʳᵈᵉʳ⁾(u)) for order 0, 1, or 2.
    pub fn eval(&self, u: f64, order: u8) -> Result<Vec<f64>> {
        if order > 2 {
            return Err(Error::InvalidOrder(order));
        }
        self.check_u(u)?;
        let mut out = vec![0.0; self.dim()];
        self.fill(u, order, &mut out);
        Ok(out)
    }

    /// True iff ‖f″(u)‖ stays above the floor on `samples` uniform points
    /// of [lo, hi]; also returns the minimum observed norm.
    pub fn check_nondegenerate(&self, lo: f64, hi: f64, samples: usize) -> Result<(bool, f64)> {
        if !(lo < hi) || samples < 2 {
            return Err(Error::InvalidInput(
                "nondegeneracy check needs lo < hi and at least 2 samples".into(),
            ));
        }
        let n = self.dim();
        let mut buf = vec![0.0; n];
        let mut min_norm = f64::INFINITY;
        for k in 0..samples {
            let u = lo + (hi - lo) * k as f64 / (samples - 1) as f64;
            self.fill(u, 2, &mut buf);
            min_norm = min_norm.min(crate::linalg::norm(&buf));
        }
        Ok((min_norm > defaults::FLUX_NONDEGENERACY_FLOOR, min_norm))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario_a_flux() -> FluxModel {
        FluxModel::burgers(2, (0.0, 3.0)).unwrap()
    }

    #[test]
    fn quadratic_derivatives() {
        let f = scenario_a_flux();
        assert_eq!(f.eval(2.0, 0).unwrap(), vec![2.0, 2.0]);
        assert_eq!(f.eval(2.0, 1).unwrap(), vec![2.0, 2.0]);
        assert_eq!(f.eval(2.0, 2).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn exponential_at_zero() {
        let f = FluxModel::exponential(vec![1.0, 1.0], (-1.0, 3.0)).unwrap();
        assert_eq!(f.eval(0.0, 1).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn polynomial_matches_hand_expansion() {
        // f(u) = 1 + 2u + 3u² ⇒ f' = 2 + 6u, f'' = 6
        let f = FluxModel::polynomial(vec![vec![1.0, 2.0, 3.0]], (-2.0, 2.0)).unwrap();
        assert_eq!(f.eval(0.5, 0).unwrap(), vec![1.0 + 1.0 + 0.75]);
        assert_eq!(f.eval(0.5, 1).unwrap(), vec![2.0 + 3.0]);
        assert_eq!(f.eval(0.5, 2).unwrap(), vec![6.0]);
    }

    #[test]
    fn outside_interval_is_reported() {
        let f = scenario_a_flux();
        assert!(matches!(
            f.eval(5.0, 0),
            Err(Error::OutsideWorkingInterval { .. })
        ));
        assert!(matches!(f.eval(1.0, 3), Err(Error::InvalidOrder(3))));
    }

    #[test]
    fn nondegeneracy_scenario_a() {
        let f = scenario_a_flux();
        let (ok, min_norm) = f.check_nondegenerate(1.0, 2.0, 64).unwrap();
        assert!(ok);
        assert!((min_norm - core::f64::consts::SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn nondegeneracy_zero_flux() {
        let f = FluxModel::quadratic(vec![0.0, 0.0], (0.0, 3.0)).unwrap();
        let (ok, min_norm) = f.check_nondegenerate(1.0, 2.0, 64).unwrap();
        assert!(!ok);
        assert_eq!(min_norm, 0.0);
    }

    #[test]
    fn nondegeneracy_exponential_min_at_left_end() {
        let f = FluxModel::exponential(vec![1.0, 1.0], (-1.0, 3.0)).unwrap();
        let (ok, min_norm) = f.check_nondegenerate(0.0, 2.0, 64).unwrap();
        assert!(ok);
        assert!((min_norm - core::f64::consts::SQRT_2).abs() < 1e-12);
    }

    /// Analytic derivatives vs centered differences, every kind.
    #[test]
    fn derivative_consistency() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let h = defaults::FLUX_DERIVATIVE_STEP;
        let models = [
            FluxModel::quadratic(vec![1.0, -0.5], (0.5, 2.5)).unwrap(),
            FluxModel::polynomial(vec![vec![0.0, 1.0, 0.5, -0.25], vec![1.0, 0.0, 2.0]], (0.5, 2.5))
                .unwrap(),
            FluxModel::exponential(vec![0.7, 1.3], (0.5, 2.5)).unwrap(),
        ];
        for f in &models {
            for _ in 0..100 {
                let u = rng.gen_range(0.6..2.4);
                for order in 0..2u8 {
                    let lo = f.eval(u - h, order).unwrap();
                    let hi = f.eval(u + h, order).unwrap();
                    let analytic = f.eval(u, order + 1).unwrap();
                    for i in 0..f.dim() {
                        let fd = (hi[i] - lo[i]) / (2.0 * h);
                        let scale = analytic[i].abs().max(1.0);
                        assert!(
                            (fd - analytic[i]).abs() / scale < defaults::FLUX_DERIVATIVE_RTOL,
                            "kind {:?} order {} comp {}: fd {} vs analytic {}",
                            f.kind(),
                            order + 1,
                            i,
                            fd,
                            analytic[i]
                        );
                    }
                }
            }
        }
    }

    /// Quadratic second derivative is u-independent, exactly.
    #[test]
    fn quadratic_f2_constant() {
        let f = FluxModel::quadratic(vec![1.5, -2.0], (0.0, 3.0)).unwrap();
        assert_eq!(f.eval(0.25, 2).unwrap(), f.eval(2.75, 2).unwrap());
    }
}
