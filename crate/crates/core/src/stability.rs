//! Jump classification by directional limits. At a front point x̄ the
//! limit u₊ is taken along the vector f″(u₀⁰) (sampling the side the
//! vector points to) and u₋ along f″(U) (sampling the opposite side);
//! the jump is stable when u₊ − u₋ < 0 and absolutely nonstable when the
//! same difference is positive. Absolutely nonstable steps are the ones
//! that decay into a rarefaction fan, provided the four field vectors
//! f′(U), f′(u₀⁰), f″(U), f″(u₀⁰) are transversal to the front.

use alloc::vec;
use alloc::vec::Vec;

use crate::defaults;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::flux::FluxModel;
use crate::geometry::Surface;
use crate::linalg;
use crate::math;

/// Which side of x̄ the limit samples, relative to the vector v.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Sample at x̄ + ε·v̂ (the side v points to).
    Toward,
    /// Sample at x̄ − ε·v̂.
    Away,
}

/// A directional limit value with its settling flag.
#[derive(Debug, Clone, Copy)]
pub struct DirectionalLimit {
    pub value: f64,
    /// Successive ε-values settled within the convergence tolerance.
    pub converged: bool,
}

/// Limit of the field at x̄ along ±v̂ over a shrinking ε-sequence. For
/// piecewise-constant fields any ε below the distance to the front is
/// already exact; the sequence exists to catch a misconfigured x̄.
pub fn directional_limit(
    field: &dyn Field,
    xbar: &[f64],
    v: &[f64],
    orientation: Orientation,
    eps_sequence: &[f64],
) -> Result<DirectionalLimit> {
    let mut vhat = v.to_vec();
    if linalg::normalize(&mut vhat) == 0.0 {
        return Err(Error::InvalidInput("limit direction is zero".into()));
    }
    let sign = match orientation {
        Orientation::Toward => 1.0,
        Orientation::Away => -1.0,
    };
    let mut last: Option<f64> = None;
    let mut converged = false;
    let mut any = false;
    for &eps in eps_sequence {
        let x = linalg::add_scaled(xbar, sign * eps, &vhat);
        match field.eval(&x) {
            Ok(u) => {
                if let Some(prev) = last {
                    converged = math::abs(u - prev) < defaults::LIMIT_CONVERGENCE_TOL;
                }
                last = Some(u);
                any = true;
            }
            Err(_) => continue,
        }
    }
    if !any {
        return Err(Error::NonConvergence {
            what: "directional limit (no evaluable sample)",
            residual: f64::NAN,
        });
    }
    Ok(DirectionalLimit {
        value: last.unwrap(),
        converged,
    })
}

/// Default ε-sequence scaled to the configuration size.
pub fn eps_sequence(domain_scale: f64) -> Vec<f64> {
    defaults::LIMIT_EPS_SEQUENCE
        .iter()
        .map(|e| e * domain_scale.max(1e-6))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpClass {
    Stable,
    AbsolutelyNonstable,
    Indeterminate,
}

impl JumpClass {
    pub fn tag(&self) -> &'static str {
        match self {
            JumpClass::Stable => "stable",
            JumpClass::AbsolutelyNonstable => "absolutely-nonstable",
            JumpClass::Indeterminate => "indeterminate",
        }
    }
}

/// Classification of one front point.
#[derive(Debug, Clone, Copy)]
pub struct JumpVerdict {
    pub class: JumpClass,
    /// u₊ − u₋, the classifying difference.
    pub difference: f64,
    pub u_plus: f64,
    pub u_minus: f64,
}

/// Classify the jump of `field` at x̄: u₊ along f″(u₀⁰) toward, u₋ along
/// f″(U) away. Requires an actual jump (spread above the floor) at x̄.
pub fn classify_jump(
    field: &dyn Field,
    flux: &FluxModel,
    xbar: &[f64],
    u_behind: f64,
    u_ahead: f64,
    domain_scale: f64,
) -> Result<JumpVerdict> {
    let n = flux.dim();
    let mut v_plus = vec![0.0; n];
    let mut v_minus = vec![0.0; n];
    flux.fill(u_ahead, 2, &mut v_plus);
    flux.fill(u_behind, 2, &mut v_minus);
    let eps = eps_sequence(domain_scale);
    let plus = directional_limit(field, xbar, &v_plus, Orientation::Toward, &eps)?;
    let minus = directional_limit(field, xbar, &v_minus, Orientation::Away, &eps)?;
    let difference = plus.value - minus.value;
    if math::abs(difference) <= defaults::JUMP_MIN_SPREAD {
        return Err(Error::NotAJump {
            spread: math::abs(difference),
        });
    }
    let class = if difference < -defaults::JUMP_CLASSIFY_TOL {
        JumpClass::Stable
    } else if difference > defaults::JUMP_CLASSIFY_TOL {
        JumpClass::AbsolutelyNonstable
    } else {
        JumpClass::Indeterminate
    };
    Ok(JumpVerdict {
        class,
        difference,
        u_plus: plus.value,
        u_minus: minus.value,
    })
}

/// Per-point transversality of the four field vectors against the front
/// normals: |⟨w, n⟩| ≥ rtol·‖w‖ for every w ∈ {f′(U), f′(u₀⁰), f″(U), f″(u₀⁰)}.
pub fn check_transversality(
    flux: &FluxModel,
    gamma0: &Surface,
    u_behind: f64,
    u_ahead: f64,
    per_axis: usize,
) -> Result<Vec<(Vec<f64>, bool)>> {
    let n = flux.dim();
    let mut vectors = Vec::with_capacity(4);
    for (state, order) in [(u_behind, 1), (u_ahead, 1), (u_behind, 2), (u_ahead, 2)] {
        let mut w = vec![0.0; n];
        flux.fill(state, order, &mut w);
        vectors.push(w);
    }
    let mut out = Vec::new();
    for s in gamma0.sample_params(per_axis) {
        let x = gamma0.point(&s)?;
        let normal = gamma0.normal(&x)?;
        let ok = vectors.iter().all(|w| {
            let wn = linalg::norm(w);
            wn > 0.0 && math::abs(linalg::dot(w, &normal)) >= defaults::TRANSVERSALITY_RTOL * wn
        });
        out.push((x, ok));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ConstantField, StepField};

    fn front_line(offset: f64) -> Surface {
        // {x₁ + x₂ = offset}, ahead side g > 0 along +(1,1)
        Surface::hyperplane(
            vec![offset / 2.0, offset / 2.0],
            vec![vec![1.0, -1.0]],
            Some(vec![1.0, 1.0]),
            vec![(-3.0, 3.0)],
        )
        .unwrap()
    }

    #[test]
    fn limits_on_the_formed_shock() {
        // u = 2 + H(x₁+x₂−4)·(−1): the formed shock at t = 1
        let s = front_line(4.0);
        let field = StepField {
            surface: &s,
            behind: 2.0,
            ahead: 1.0,
        };
        let eps = eps_sequence(1.0);
        let xbar = [2.0, 2.0];
        let toward = directional_limit(&field, &xbar, &[1.0, 1.0], Orientation::Toward, &eps)
            .unwrap();
        assert_eq!(toward.value, 1.0);
        assert!(toward.converged);
        let away =
            directional_limit(&field, &xbar, &[1.0, 1.0], Orientation::Away, &eps).unwrap();
        assert_eq!(away.value, 2.0);
    }

    #[test]
    fn limit_of_constant_field() {
        let c = ConstantField(7.0);
        let eps = eps_sequence(1.0);
        let l = directional_limit(&c, &[0.3, -0.9], &[2.0, 0.5], Orientation::Toward, &eps)
            .unwrap();
        assert_eq!(l.value, 7.0);
    }

    /// For a continuous field the limit equals the field value at x̄ in
    /// every direction.
    #[test]
    fn limit_of_continuous_field_equals_value() {
        use crate::initial::PiecewiseField;
        use crate::profile::test_fixtures::bundle_a;
        let b = bundle_a();
        let f = PiecewiseField::new(&b);
        let eps = eps_sequence(1.0);
        let xbar = [0.9, 0.4];
        let at = f.eval(&xbar).unwrap();
        for v in [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [-0.3, 0.8]] {
            for orientation in [Orientation::Toward, Orientation::Away] {
                let l = directional_limit(&f, &xbar, &v, orientation, &eps).unwrap();
                assert!((l.value - at).abs() < 1e-6, "{} vs {at}", l.value);
            }
        }
    }

    /// Limits depend on direction only, not on the scale of v.
    #[test]
    fn limit_invariant_under_rescaling() {
        let s = front_line(4.0);
        let field = StepField {
            surface: &s,
            behind: 2.0,
            ahead: 1.0,
        };
        let eps = eps_sequence(1.0);
        for scale in [1e-3, 1.0, 250.0] {
            let l = directional_limit(
                &field,
                &[2.0, 2.0],
                &[scale, scale],
                Orientation::Toward,
                &eps,
            )
            .unwrap();
            assert_eq!(l.value, 1.0);
        }
    }

    #[test]
    fn formed_shock_is_stable() {
        let flux = FluxModel::burgers(2, (0.0, 3.0)).unwrap();
        let s = front_line(4.0);
        let field = StepField {
            surface: &s,
            behind: 2.0,
            ahead: 1.0,
        };
        let v = classify_jump(&field, &flux, &[2.0, 2.0], 2.0, 1.0, 1.0).unwrap();
        assert_eq!(v.class, JumpClass::Stable);
        assert!((v.difference + 1.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_step_is_absolutely_nonstable() {
        let flux = FluxModel::burgers(2, (0.0, 3.0)).unwrap();
        let s = front_line(4.0);
        let field = StepField {
            surface: &s,
            behind: 1.0,
            ahead: 2.0,
        };
        let v = classify_jump(&field, &flux, &[2.0, 2.0], 1.0, 2.0, 1.0).unwrap();
        assert_eq!(v.class, JumpClass::AbsolutelyNonstable);
        assert!((v.difference - 1.0).abs() < 1e-12);
    }

    /// Swapping the states swaps the classification at the same point.
    #[test]
    fn classification_swaps_with_states() {
        let flux = FluxModel::burgers(2, (0.0, 3.0)).unwrap();
        let s = front_line(1.0);
        let xbar = [0.5, 0.5];
        for (behind, ahead) in [(2.0, 1.0), (1.4, 1.9)] {
            let f1 = StepField {
                surface: &s,
                behind,
                ahead,
            };
            let v1 = classify_jump(&f1, &flux, &xbar, behind, ahead, 1.0).unwrap();
            let f2 = StepField {
                surface: &s,
                behind: ahead,
                ahead: behind,
            };
            let v2 = classify_jump(&f2, &flux, &xbar, ahead, behind, 1.0).unwrap();
            assert!((v1.difference + v2.difference).abs() < 1e-12);
            match v1.class {
                JumpClass::Stable => assert_eq!(v2.class, JumpClass::AbsolutelyNonstable),
                JumpClass::AbsolutelyNonstable => assert_eq!(v2.class, JumpClass::Stable),
                JumpClass::Indeterminate => panic!("unexpected indeterminate verdict"),
            }
        }
    }

    #[test]
    fn zero_jump_is_an_error() {
        let flux = FluxModel::burgers(2, (0.0, 3.0)).unwrap();
        let s = front_line(1.0);
        let field = StepField {
            surface: &s,
            behind: 1.0,
            ahead: 1.0,
        };
        assert!(matches!(
            classify_jump(&field, &flux, &[0.5, 0.5], 1.0, 1.0, 1.0),
            Err(Error::NotAJump { .. })
        ));
    }

    #[test]
    fn transversality_scenario_a_front() {
        let flux = FluxModel::burgers(2, (0.0, 3.0)).unwrap();
        let g0 = front_line(0.0);
        let verdicts = check_transversality(&flux, &g0, 2.0, 1.0, 9).unwrap();
        assert!(verdicts.iter().all(|(_, ok)| *ok));
    }

    #[test]
    fn tangent_field_fails_transversality() {
        // Γ₀ = {x₁ − x₂ = 0}: f′(U) = (2,2) is tangent.
        let flux = FluxModel::burgers(2, (0.0, 3.0)).unwrap();
        let g0 = Surface::hyperplane(
            vec![0.0, 0.0],
            vec![vec![1.0, 1.0]],
            Some(vec![1.0, -1.0]),
            vec![(-3.0, 3.0)],
        )
        .unwrap();
        let verdicts = check_transversality(&flux, &g0, 2.0, 1.0, 9).unwrap();
        assert!(verdicts.iter().all(|(_, ok)| !*ok));
    }

    #[test]
    fn one_dimensional_transversality() {
        let flux = FluxModel::burgers(1, (0.5, 3.0)).unwrap();
        let g0 = Surface::hyperplane(vec![0.0], vec![], Some(vec![1.0]), vec![]).unwrap();
        let verdicts = check_transversality(&flux, &g0, 2.0, 1.0, 1).unwrap();
        assert_eq!(verdicts.len(), 1);
        assert!(verdicts[0].1);
    }
}
