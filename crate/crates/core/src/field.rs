//! Scalar fields over Rⁿ: the common currency between the analytic
//! constructions and the finite-volume oracle.

use crate::error::Result;
use crate::geometry::Surface;

/// Anything that can be evaluated pointwise.
pub trait Field {
    fn eval(&self, x: &[f64]) -> Result<f64>;

    /// Smoothness-region identifier, when the field knows one. Stencil
    /// operations use it to refuse straddling a seam.
    fn region_id(&self, _x: &[f64]) -> Option<u8> {
        None
    }
}

/// Constant state.
pub struct ConstantField(pub f64);

impl Field for ConstantField {
    fn eval(&self, _x: &[f64]) -> Result<f64> {
        Ok(self.0)
    }
}

/// Step across a surface: `behind` where g ≤ 0, `ahead` where g > 0.
pub struct StepField<'a> {
    pub surface: &'a Surface,
    pub behind: f64,
    pub ahead: f64,
}

impl Field for StepField<'_> {
    fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(if self.surface.implicit(x) <= 0.0 {
            self.behind
        } else {
            self.ahead
        })
    }
}

/// Closure adapter.
pub struct FnField<F: Fn(&[f64]) -> Result<f64>>(pub F);

impl<F: Fn(&[f64]) -> Result<f64>> Field for FnField<F> {
    fn eval(&self, x: &[f64]) -> Result<f64> {
        (self.0)(x)
    }
}

impl<T: Field + ?Sized> Field for &T {
    fn eval(&self, x: &[f64]) -> Result<f64> {
        (**self).eval(x)
    }

    fn region_id(&self, x: &[f64]) -> Option<u8> {
        (**self).region_id(x)
    }
}
