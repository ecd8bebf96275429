//! Central table of numeric defaults. Every tolerance, floor, and sample
//! count used by the crate lives here so a scenario run is reproducible
//! from this one module plus the scenario file.

/// Floor below which ‖f″(u)‖ counts as degenerate.
pub const FLUX_NONDEGENERACY_FLOOR: f64 = 1e-12;
/// Relative tolerance for the analytic-vs-differenced derivative check.
pub const FLUX_DERIVATIVE_RTOL: f64 = 1e-6;
/// Step for the derivative consistency check (test-side differencing).
pub const FLUX_DERIVATIVE_STEP: f64 = 1e-5;

/// |g(χ(s))| bound for parametric/implicit consistency of a surface.
pub const SURFACE_CONSISTENCY_TOL: f64 = 1e-9;
/// Minimum implicit gradient norm on surface points.
pub const IMPLICIT_GRADIENT_FLOOR: f64 = 1e-9;
/// Centered-difference step for implicit gradients.
pub const IMPLICIT_GRADIENT_STEP: f64 = 1e-6;
/// |g(x)| bound for "x lies on the surface" preconditions.
pub const ON_SURFACE_TOL: f64 = 1e-8;
/// Minimum sampled distance between the two boundary surfaces.
pub const SURFACE_SEPARATION_FLOOR: f64 = 1e-6;

/// |g| tolerance at an accepted ray–surface intersection.
pub const RAY_VALUE_TOL: f64 = 1e-12;
/// Position (λ) tolerance of the bisection.
pub const RAY_POSITION_TOL: f64 = 1e-10;
/// Intersections with λ below this count as "origin on the surface".
pub const RAY_MIN_LAMBDA: f64 = 1e-12;
/// λ_max = this factor × reference diagonal.
pub const RAY_LAMBDA_MAX_FACTOR: f64 = 10.0;
/// Subdivisions scanned for a sign change before bisecting.
pub const RAY_BRACKET_SAMPLES: usize = 64;

/// Residual norm at which a Newton inversion counts as converged.
pub const NEWTON_RESIDUAL_TOL: f64 = 1e-10;
/// Iteration cap per Newton start.
pub const NEWTON_MAX_ITERS: usize = 50;
/// Centered-difference step for Newton Jacobians.
pub const NEWTON_FD_STEP: f64 = 1e-7;
/// Deterministic multi-start seeds per inversion.
pub const NEWTON_SEEDS: usize = 5;
/// Two converged seeds further apart than this flag a non-injective map.
pub const NEWTON_AMBIGUITY_TOL: f64 = 1e-6;

/// Tolerance of the scalar Newton solve for the one-dimensional profile.
pub const SOLVE1D_TOL: f64 = 1e-12;
/// Iteration cap of the scalar solve (bisection fallback after Newton).
pub const SOLVE1D_MAX_ITERS: usize = 100;

/// Runge–Kutta steps across [0, τ₀] for the trajectory integration route.
pub const RK4_STEPS: usize = 1024;

/// Default s-grid resolution per parameter axis.
pub const S_SAMPLES_DEFAULT: usize = 65;
/// Default τ samples per trajectory in the inversion seed cloud.
pub const SEED_TAU_SAMPLES: usize = 9;

/// Points within this distance of Γ₁ or Γ₂ are assigned to the band Ω⁰.
pub const SEAM_TOL: f64 = 1e-9;

/// K(s)·τ₀(s) = U − u₀⁰ bundle identity tolerance.
pub const BUNDLE_IDENTITY_TOL: f64 = 1e-10;
/// |g₂(X(τ₀(s), s))| endpoint-on-surface tolerance.
pub const BUNDLE_ENDPOINT_TOL: f64 = 1e-9;

/// ε-sequence (scaled by the domain scale) for directional limits.
pub const LIMIT_EPS_SEQUENCE: [f64; 4] = [1e-3, 1e-4, 1e-5, 1e-6];
/// Successive directional-limit values must settle within this.
pub const LIMIT_CONVERGENCE_TOL: f64 = 1e-8;
/// Verdict dead zone: |u₊ − u₋| below this is Indeterminate.
pub const JUMP_CLASSIFY_TOL: f64 = 1e-9;
/// Minimum jump magnitude for a point to count as lying on a discontinuity.
pub const JUMP_MIN_SPREAD: f64 = 1e-6;
/// |⟨w, n⟩| ≥ this × ‖w‖ counts as transversal.
pub const TRANSVERSALITY_RTOL: f64 = 1e-8;

/// Default CFL number of the finite-volume oracle.
pub const FVM_CFL: f64 = 0.4;
/// Subsamples per axis when averaging initial data into cells.
pub const FVM_INIT_SUBSAMPLES: usize = 3;
/// Mass-accounting tolerance per step, times the cell count.
pub const FVM_MASS_TOL_PER_CELL: f64 = 1e-12;
/// Relative slack on the discrete max principle (roundoff floor).
pub const FVM_RANGE_SLACK: f64 = 1e-13;
/// Fronts closer than this many cells to an outflow boundary draw a warning.
pub const FVM_FRONT_BOUNDARY_CELLS: f64 = 10.0;

/// Pairwise image distance below which sampled fan trajectories from
/// distinct launch parameters count as crossed.
pub const FAN_INJECTIVITY_EPS: f64 = 1e-9;
/// Bisection tolerance on the fan existence horizon t̄.
pub const FAN_TBAR_TOL: f64 = 1e-6;
/// Default fan state samples between u₀⁰ and U.
pub const FAN_V_SAMPLES: usize = 33;

/// Explicit front stepping: dt ≤ this × (min segment length)/|σ|.
pub const FRONT_DT_SAFETY: f64 = 0.25;

/// Extra Newton step is taken when the met residual still exceeds this,
/// tightening roots that feed finite-difference consumers.
pub const NEWTON_POLISH_THRESHOLD: f64 = 1e-13;
