//! A bundle with genuinely non-constant K(s): trajectories launch from a
//! circular arc and land on a line, so each chord has its own length.
//! The independent oracle is the closed-form ray–plane solution
//!
//!   λ(θ) = (4 − cos θ − sin θ) / 2,   K(θ) = 1/λ(θ),
//!
//! for Γ₁ = unit circle arc (θ ∈ [−π/4, π/4]), Γ₂ = {x₁ + x₂ = 4},
//! Burgers flux in both components, U = 2, u₀⁰ = 1.

use shockform_core::characteristics::{advect, focus_point, jacobian};
use shockform_core::flux::FluxModel;
use shockform_core::geometry::Surface;
use shockform_core::initial::PiecewiseField;
use shockform_core::level::{eval_psi, Anchor};
use shockform_core::linalg;
use shockform_core::profile::{BundleLocation, ProfileBundle};

fn k_expected(theta: f64) -> f64 {
    2.0 / (4.0 - theta.cos() - theta.sin())
}

fn arc_bundle() -> ProfileBundle {
    let flux = FluxModel::burgers(2, (0.0, 3.0)).unwrap();
    let gamma1 = Surface::circle(
        vec![0.0, 0.0],
        1.0,
        true,
        vec![(-std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4)],
    )
    .unwrap();
    let gamma2 = Surface::hyperplane(
        vec![2.0, 2.0],
        vec![vec![1.0, -1.0]],
        Some(vec![1.0, 1.0]),
        vec![(-3.0, 3.0)],
    )
    .unwrap();
    ProfileBundle::build(flux, gamma1, gamma2, 2.0, 1.0, 17).unwrap()
}

#[test]
fn k_table_matches_the_closed_form() {
    let b = arc_bundle();
    for (s, k) in b.s_samples().iter().zip(b.k_table()) {
        let want = k_expected(s[0]);
        assert!((k - want).abs() < 1e-10, "K({}) = {k}, want {want}", s[0]);
    }
    // K genuinely varies across the arc
    let kmin = b.k_table().iter().cloned().fold(f64::INFINITY, f64::min);
    let kmax = b.k_table().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(kmax - kmin > 0.04, "K range [{kmin}, {kmax}]");
}

#[test]
fn profile_inversion_on_curved_launch() {
    let b = arc_bundle();
    let theta = 0.3;
    let k = k_expected(theta);
    let tau = 0.5;
    // X(τ, θ) = (cos θ + τ, sin θ + τ) for the Burgers flux
    let x = [theta.cos() + tau, theta.sin() + tau];
    match b.invert(&x).location {
        BundleLocation::Interior(c) => {
            assert!((c.s[0] - theta).abs() < 1e-9);
            assert!((c.tau - tau).abs() < 1e-9);
            assert!((c.k - k).abs() < 1e-9);
        }
        other => panic!("{other:?}"),
    }
    let u1 = b.eval_u1(&x).unwrap();
    assert!((u1 - (2.0 - k * tau)).abs() < 1e-9);
}

#[test]
fn profile_equation_residual_on_curved_bundle() {
    let b = arc_bundle();
    // non-quadratic profile in space: the residual is O(h²), not zero
    let x = [1.6, 0.55];
    let r1 = b.residual_profile_eq(&x, 2e-2).unwrap().abs();
    let r2 = b.residual_profile_eq(&x, 1e-2).unwrap().abs();
    if r1 > 1e-11 {
        let ratio = r1 / r2;
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn focusing_with_varying_k() {
    let b = arc_bundle();
    for theta in [-0.6, 0.0, 0.42] {
        let s = [theta];
        let traj = b.trajectory(&s).unwrap();
        assert!((traj.k - k_expected(theta)).abs() < 1e-10);
        let focus = focus_point(&b, &s).unwrap();
        // x*(θ) = χ(θ) + f′(U)/K
        let want = [
            theta.cos() + 2.0 / traj.k,
            theta.sin() + 2.0 / traj.k,
        ];
        assert!(linalg::dist(&focus, &want) < 1e-10);
        for j in 0..8 {
            let tau = traj.tau0 * j as f64 / 7.0;
            let (x, u) = b.point_on_trajectory(&traj, tau);
            let landed = advect(b.flux(), &x, u, 1.0 / traj.k);
            assert!(linalg::dist(&landed, &focus) < 1e-8);
        }
    }
}

#[test]
fn jacobian_lemma_holds_with_varying_k() {
    let b = arc_bundle();
    let field = PiecewiseField::new(&b);
    let theta = 0.2;
    let traj = b.trajectory(&[theta]).unwrap();
    let (x0, _) = b.point_on_trajectory(&traj, 0.4 * traj.tau0);
    let (j1, fd1) = jacobian(b.flux(), &field, &x0, 0.3, 1e-5).unwrap();
    assert!((j1 - fd1).abs() < 1e-6);
    // affine in t and zero at this trajectory's own breaking time
    let (j2, _) = jacobian(b.flux(), &field, &x0, 0.6, 1e-5).unwrap();
    let (j3, _) = jacobian(b.flux(), &field, &x0, 0.9, 1e-5).unwrap();
    assert!((j2 - 0.5 * (j1 + j3)).abs() < 1e-12);
    let (at_breaking, _) = jacobian(b.flux(), &field, &x0, 1.0 / traj.k, 1e-5).unwrap();
    assert!(at_breaking.abs() < 1e-8, "J(1/K) = {at_breaking}");
}

#[test]
fn psi_is_time_on_advected_curved_surface() {
    let b = arc_bundle();
    for (theta, t) in [(0.1, 0.35), (-0.5, 1.2)] {
        let chi = b.gamma1().point(&[theta]).unwrap();
        let x = advect(b.flux(), &chi, 2.0, t);
        let psi1 = eval_psi(&b, &x, Anchor::Gamma1).unwrap();
        assert!((psi1 - t).abs() < 1e-8, "psi1 = {psi1}, want {t}");
    }
}
