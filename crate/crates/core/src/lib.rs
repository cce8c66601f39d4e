//! Minimum-error discrimination of weighted qubit ensembles.
//!
//! Given states `rho_i` with priors `q_i`, the guessing probability is the
//! best achievable chance of naming the prepared state, optimized over all
//! measurements. In the Bloch picture the instance reduces to the polytope
//! of weighted points `q_i v_i`, and its extreme-point structure selects the
//! solution route:
//!
//! - a **point**: guess the likeliest state, `P_guess = q_1`;
//! - a **segment**: the best two-state (Helstrom) measurement over all pairs;
//! - a **triangle**: a closed form built from the intersection of two
//!   hyperbola branches, when the feasibility conditions hold;
//! - anything **higher**: a numeric dual solve plus reduction onto subsets.
//!
//! Every solution carries a dual certificate and complementary states, so
//! optimality is checkable after the fact: [`kkt::geometric_kkt_verify`] for
//! the four Bloch-space conditions and [`oracle`] for matrix-level residuals
//! and an independent dual value.

pub mod bloch;
pub mod closed_form;
pub mod error;
pub mod hyperbola;
pub mod kkt;
pub mod oracle;
pub mod polytope;

pub use bloch::{
    bloch_to_density, density_to_bloch, trace_norm_weighted_diff, BlochVector, EnsembleEntry,
    QubitDensity, WeightedEnsemble, VALIDATION_EPS,
};
pub use closed_form::{
    make_symmetric_ensemble, solve_pair, solve_pair_reduction, solve_point, solve_three,
    solve_triangle, symmetric_guess_formula, triangle_feasible, triangle_geometry, Branch,
    DiscriminationSolution, PairOutcome, Povm, PovmElement,
};
pub use error::{Error, Result};
pub use hyperbola::{
    compute_chi, curves_intersect, hyperbola_radius, origin_inside_triangle, TriangleGeometry,
};
pub use kkt::{
    extract_complementary, geometric_kkt_verify, recover_povm, solve_n, ComplementarySolution,
    DualCertificate, GeometricKktReport, MAX_STATES,
};
pub use oracle::{
    dual_objective, dual_solve, kkt_residuals, primal_check, random_ensemble, KktResidualReport,
    PrimalReport, DUAL_SOLVE_DEFAULT_TOL,
};
pub use polytope::{
    affine_dimension, build_polytope, distance_to_hull, IntrinsicPolytope, PolytopeShape,
    GEOMETRY_EPS,
};
