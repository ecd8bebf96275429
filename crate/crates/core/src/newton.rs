//! Damped Newton iteration with centered-difference Jacobians, shared by
//! the parametric-map inversions (bundle, level surfaces, fan).
//!
//! Callers supply deterministic seed lists; the first seed to converge
//! wins and later converged seeds that land elsewhere flag the map as
//! ambiguous (non-injective on the sampled window).

use alloc::vec;
use alloc::vec::Vec;

use crate::defaults;
use crate::linalg;

pub(crate) struct NewtonOptions {
    pub residual_tol: f64,
    pub max_iters: usize,
    pub fd_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            residual_tol: defaults::NEWTON_RESIDUAL_TOL,
            max_iters: defaults::NEWTON_MAX_ITERS,
            fd_step: defaults::NEWTON_FD_STEP,
        }
    }
}

/// Root of r(z) = 0 from one seed. `residual` writes r(z) into its slice
/// argument and returns false where the map is not evaluable.
pub(crate) fn solve<R>(
    mut residual: R,
    seed: &[f64],
    opts: &NewtonOptions,
) -> Option<(Vec<f64>, f64)>
where
    R: FnMut(&[f64], &mut [f64]) -> bool,
{
    let n = seed.len();
    let mut z = seed.to_vec();
    let mut r = vec![0.0; n];
    let mut rp = vec![0.0; n];
    let mut rm = vec![0.0; n];
    let mut jac = vec![0.0; n * n];
    if !residual(&z, &mut r) {
        return None;
    }
    let mut res_norm = linalg::norm(&r);
    let mut polished = false;
    for _ in 0..opts.max_iters + 1 {
        if res_norm <= opts.residual_tol {
            if polished || res_norm <= defaults::NEWTON_POLISH_THRESHOLD {
                return Some((z, res_norm));
            }
            // Take one extra step to tighten the root toward machine
            // precision for finite-difference consumers; the acceptance
            // rule is unchanged and failure below cannot lose the root.
            polished = true;
        }
        // centered-difference Jacobian
        let mut fail = false;
        let mut zp = z.clone();
        'jac: for col in 0..n {
            let h = opts.fd_step * (1.0 + crate::math::abs(z[col]));
            zp[col] = z[col] + h;
            let ok_p = residual(&zp, &mut rp);
            zp[col] = z[col] - h;
            let ok_m = residual(&zp, &mut rm);
            zp[col] = z[col];
            if !ok_p || !ok_m {
                fail = true;
                break 'jac;
            }
            for row in 0..n {
                jac[row * n + col] = (rp[row] - rm[row]) / (2.0 * h);
            }
        }
        let delta = if fail {
            None
        } else {
            let neg_r: Vec<f64> = r.iter().map(|v| -v).collect();
            linalg::solve(&jac, &neg_r, n)
        };
        let Some(delta) = delta else {
            return if polished { Some((z, res_norm)) } else { None };
        };
        // Backtracking line search keeps the iteration from jumping out of
        // the evaluable region or growing the residual.
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..8 {
            let trial: Vec<f64> = z.iter().zip(&delta).map(|(a, d)| a + step * d).collect();
            if residual(&trial, &mut rp) {
                let trial_norm = linalg::norm(&rp);
                if trial_norm < res_norm {
                    z = trial;
                    r.copy_from_slice(&rp);
                    res_norm = trial_norm;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            return if polished { Some((z, res_norm)) } else { None };
        }
    }
    if res_norm <= opts.residual_tol {
        Some((z, res_norm))
    } else {
        None
    }
}

/// Multi-start wrapper: first converged seed wins, disagreement among the
/// converged roots beyond the ambiguity tolerance is reported.
pub(crate) fn multi_start<R>(
    mut residual: R,
    seeds: &[Vec<f64>],
    opts: &NewtonOptions,
) -> (Option<Vec<f64>>, bool)
where
    R: FnMut(&[f64], &mut [f64]) -> bool,
{
    let mut winner: Option<Vec<f64>> = None;
    let mut ambiguous = false;
    for seed in seeds {
        if let Some((root, _)) = solve(&mut residual, seed, opts) {
            match &winner {
                None => winner = Some(root),
                Some(w) => {
                    if linalg::dist(w, &root) > defaults::NEWTON_AMBIGUITY_TOL {
                        ambiguous = true;
                    }
                }
            }
        }
    }
    (winner, ambiguous)
}

/// Scalar Newton with bisection fallback on a bracketing interval.
/// Used by the one-dimensional implicit profile solve.
pub(crate) fn scalar_newton_bisect<F, D>(
    f: F,
    df: D,
    target: f64,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iters: usize,
) -> Option<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a) - target, f(b) - target);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let mut u = 0.5 * (a + b);
    for _ in 0..max_iters {
        let fu = f(u) - target;
        if crate::math::abs(fu) <= tol {
            return Some(u);
        }
        if fu.signum() == fa.signum() {
            a = u;
        } else {
            b = u;
        }
        let d = df(u);
        let newton = if d != 0.0 { u - fu / d } else { f64::NAN };
        u = if newton.is_finite() && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if b - a < f64::EPSILON * (1.0 + crate::math::abs(a) + crate::math::abs(b)) {
            return Some(u);
        }
    }
    let fu = f(u) - target;
    if crate::math::abs(fu) <= tol {
        Some(u)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_linear_system() {
        // r(z) = A z − b with A = [[2,1],[0,3]], b = (3, 6) ⇒ z = (0.5, 2)
        let res = |z: &[f64], out: &mut [f64]| {
            out[0] = 2.0 * z[0] + z[1] - 3.0;
            out[1] = 3.0 * z[1] - 6.0;
            true
        };
        let (z, _) = solve(res, &[10.0, -7.0], &NewtonOptions::default()).unwrap();
        assert!((z[0] - 0.5).abs() < 1e-9);
        assert!((z[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn multi_start_flags_distinct_roots() {
        // r(z) = z² − 1 has roots ±1
        let res = |z: &[f64], out: &mut [f64]| {
            out[0] = z[0] * z[0] - 1.0;
            true
        };
        let seeds = [vec![0.9], vec![-0.9]];
        let (root, ambiguous) = multi_start(res, &seeds, &NewtonOptions::default());
        assert!((root.unwrap()[0] - 1.0).abs() < 1e-9);
        assert!(ambiguous);
    }

    #[test]
    fn scalar_newton_inverts_exponential() {
        let u = scalar_newton_bisect(
            crate::math::exp,
            crate::math::exp,
            1.0,
            -3.0,
            3.0,
            1e-12,
            100,
        )
        .unwrap();
        assert!(u.abs() < 1e-12);
    }
}
