//! Geometric optimality certificates and the general-N dispatcher.
//!
//! A dual certificate `K = k0*I + k.sigma` decomposes against each state as
//! `K = q_i rho_i + r_i rho~_i`; the `{r_i, w_i}` so extracted must satisfy
//! four geometric conditions exactly when every optimal POVM element can be
//! nonzero. When they cannot, the optimum is attained on a proper subset of
//! the states, which `solve_n` searches.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::collections::HashMap;

use crate::bloch::{BlochVector, WeightedEnsemble};
use crate::closed_form::{
    solve_pair_reduction, solve_point, solve_three, Branch, DiscriminationSolution, Povm,
    PovmElement,
};
use crate::error::{Error, Result};
use crate::oracle;
use crate::polytope::{build_polytope, PolytopeShape, GEOMETRY_EPS};

/// Combinatorial guard for the subset recursion.
pub const MAX_STATES: usize = 8;

/// Radii at or below this are treated as zero: the corresponding
/// complementary direction is unconstrained.
const RADIUS_TOL: f64 = 1e-10;

/// Complementary directions within this of unit norm are active POVM support.
///
/// Below machine-level certainty the complementary slackness condition cannot
/// distinguish active from inactive; the balance residual check catches
/// misclassification.
const ACTIVE_NORM_TOL: f64 = 1e-7;

/// Balance-system residual above which no valid POVM is reported.
const POVM_RESIDUAL_TOL: f64 = 1e-9;

/// The dual operator `K = k0*I + k.sigma` whose trace bounds the guessing
/// probability: feasibility means `K - q_i rho_i >= 0` for every state.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DualCertificate {
    pub k0: f64,
    pub k: BlochVector,
}

impl DualCertificate {
    /// The certified value `tr K = 2 k0`.
    pub fn value(&self) -> f64 {
        2.0 * self.k0
    }

    /// Worst signed violation of `K - q_i rho_i >= 0` over the ensemble
    /// (positive means infeasible by that much).
    pub fn feasibility_residual(&self, ens: &WeightedEnsemble) -> f64 {
        (0..ens.len())
            .map(|i| {
                (self.k - ens.weighted_point(i) * 0.5).norm() - (self.k0 - 0.5 * ens.prior(i))
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// The dual-side decomposition `{r_i, w_i}` aligned with ensemble order.
///
/// `free[i]` marks radii at zero, where the direction is unconstrained and
/// holds a deterministic filler.
#[derive(Clone, Debug, Serialize)]
pub struct ComplementarySolution {
    pub r: Vec<f64>,
    pub w: Vec<BlochVector>,
    pub free: Vec<bool>,
}

/// Residuals of the four geometric optimality conditions.
#[derive(Clone, Debug, Serialize)]
pub struct GeometricKktReport {
    /// (i) worst pairwise defect of `r_i w_i - r_j w_j = q_j v_j - q_i v_i`.
    pub vector_match_residual: f64,
    /// (ii) best achievable minimum weight balancing the directions;
    /// `None` when no weights reproduce the equality system.
    pub min_weight: Option<f64>,
    /// (iii) worst deviation of a constrained direction from unit norm.
    pub unit_norm_residual: f64,
    /// (iv) worst pairwise defect of `r_i - r_j = q_j - q_i`.
    pub radius_gap_residual: f64,
    pub tol: f64,
    /// Pass/fail per condition, in order.
    pub conditions: [bool; 4],
    pub pass: bool,
}

/// Maximize the minimum weight `t` subject to `sum p = 1`, `sum p_i w_i = 0`,
/// `p_i >= t`. Returns `None` when the equality system has no solution
/// within `feas_tol`.
///
/// Substituting `p_i = t + s_i` with `s >= 0` turns this into minimizing
/// `sum s` under a 3-row equality system; an optimal basic solution has at
/// most 3 positive entries, so candidate supports are enumerated directly.
fn max_min_weight(w: &[BlochVector], feas_tol: f64) -> Option<f64> {
    let n = w.len();
    let inv = 1.0 / n as f64;
    let mean = w.iter().fold(BlochVector::ZERO, |acc, &v| acc + v) * inv;
    let target = DVector::from_column_slice(&[-mean.x, -mean.y, -mean.z]);
    let centered: Vec<BlochVector> = w.iter().map(|&v| v - mean).collect();

    let mut best: Option<f64> = None;
    let mut consider = |sum: f64| {
        if best.is_none_or(|b| sum < b) {
            best = Some(sum);
        }
    };
    if target.norm() <= feas_tol {
        consider(0.0);
    }
    for mask in 1u32..(1 << n) {
        let k = mask.count_ones() as usize;
        if k > 3 {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let mut b = DMatrix::<f64>::zeros(3, k);
        for (c, &i) in idx.iter().enumerate() {
            b[(0, c)] = centered[i].x;
            b[(1, c)] = centered[i].y;
            b[(2, c)] = centered[i].z;
        }
        let svd = b.clone().svd(true, true);
        let Ok(s) = svd.solve(&target, 1e-13) else { continue };
        if s.iter().any(|&v| v < -1e-12) {
            continue;
        }
        let residual = (&b * &s - &target).norm();
        if residual > feas_tol {
            continue;
        }
        consider(s.iter().map(|&v| v.max(0.0)).sum());
    }
    best.map(|slack| (1.0 - slack) * inv)
}

/// Checks the four geometric optimality conditions of a complementary
/// solution against the ensemble. Report-only: never fails.
pub fn geometric_kkt_verify(
    ens: &WeightedEnsemble,
    cs: &ComplementarySolution,
    tol: f64,
) -> GeometricKktReport {
    let n = ens.len();
    assert_eq!(cs.r.len(), n, "complementary data must align with the ensemble");
    assert_eq!(cs.w.len(), n);

    let mut vector_match = 0.0_f64;
    let mut radius_gap = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let lhs = cs.w[i] * cs.r[i] - cs.w[j] * cs.r[j];
            let rhs = ens.weighted_point(j) - ens.weighted_point(i);
            vector_match = vector_match.max((lhs - rhs).norm());
            let gap = (cs.r[i] - cs.r[j]) - (ens.prior(j) - ens.prior(i));
            radius_gap = radius_gap.max(gap.abs());
        }
    }

    let unit_norm = (0..n)
        .filter(|&i| cs.r[i] > RADIUS_TOL)
        .map(|i| (cs.w[i].norm() - 1.0).abs())
        .fold(0.0, f64::max);

    let min_weight = max_min_weight(&cs.w, tol.max(1e-12));

    let conditions = [
        vector_match < tol,
        min_weight.is_some_and(|t| t > tol),
        unit_norm < tol,
        radius_gap < tol,
    ];
    GeometricKktReport {
        vector_match_residual: vector_match,
        min_weight,
        unit_norm_residual: unit_norm,
        radius_gap_residual: radius_gap,
        tol,
        conditions,
        pass: conditions.iter().all(|&c| c),
    }
}

fn filler_direction(state: BlochVector) -> BlochVector {
    match state.normalized() {
        Some(unit) => -unit,
        None => BlochVector::new(0.0, 0.0, 1.0),
    }
}

/// Splits a dual certificate into the complementary solution it encodes:
/// `r_i = 2 k0 - q_i` and `w_i = (2k - q_i v_i) / r_i`.
///
/// Radii at zero leave the direction unconstrained (`free`); a radius too
/// small to divide by but with a non-vanishing numerator is reported as
/// [`Error::DegenerateRadius`].
pub fn extract_complementary(
    ens: &WeightedEnsemble,
    cert: &DualCertificate,
) -> Result<ComplementarySolution> {
    let n = ens.len();
    let anchor = cert.k * 2.0;
    let value = cert.value();
    let mut r = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    let mut free = Vec::with_capacity(n);
    for i in 0..n {
        let radius = (value - ens.prior(i)).max(0.0);
        let numerator = anchor - ens.weighted_point(i);
        if radius <= RADIUS_TOL {
            if numerator.norm() > 10.0 * RADIUS_TOL {
                return Err(Error::DegenerateRadius { index: i, r: radius });
            }
            r.push(radius);
            w.push(filler_direction(ens.state(i)));
            free.push(true);
        } else {
            r.push(radius);
            w.push(numerator * (1.0 / radius));
            free.push(false);
        }
    }
    Ok(ComplementarySolution { r, w, free })
}

/// Least-squares balance of the active directions: weights `p >= 0` with
/// `sum p_i w_i = 0` and `sum p_i = 1`. Returns the weights (aligned with
/// `active`) and the system residual.
fn balance_weights(dirs: &[BlochVector]) -> (Vec<f64>, f64) {
    let k = dirs.len();
    let mut target = DVector::<f64>::zeros(4);
    target[3] = 1.0;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for mask in 1u32..(1 << k) {
        let m = mask.count_ones() as usize;
        if m > 4 {
            continue;
        }
        let idx: Vec<usize> = (0..k).filter(|&i| mask & (1 << i) != 0).collect();
        let mut a = DMatrix::<f64>::zeros(4, m);
        for (c, &i) in idx.iter().enumerate() {
            a[(0, c)] = dirs[i].x;
            a[(1, c)] = dirs[i].y;
            a[(2, c)] = dirs[i].z;
            a[(3, c)] = 1.0;
        }
        let svd = a.clone().svd(true, true);
        let Ok(p) = svd.solve(&target, 1e-13) else { continue };
        if p.iter().any(|&v| v < -1e-12) {
            continue;
        }
        let residual = (&a * &p - &target).norm();
        if best.as_ref().is_none_or(|(_, r)| residual < r - 1e-15) {
            let mut full = vec![0.0; k];
            for (c, &i) in idx.iter().enumerate() {
                full[i] = p[c].max(0.0);
            }
            best = Some((full, residual));
        }
    }
    best.unwrap_or_else(|| (vec![0.0; k], f64::INFINITY))
}

/// Rebuilds the optimal POVM from a complementary solution: nonnegative
/// weights supported on the active set (unit-norm directions) solving the
/// completeness system, zero elements elsewhere.
pub fn recover_povm(ens: &WeightedEnsemble, cs: &ComplementarySolution) -> Result<Povm> {
    let n = ens.len();
    if cs.free.iter().any(|&f| f) {
        // a zero radius means the optimum keeps a full-rank element,
        // which the rank-one form cannot represent
        return Err(Error::NoValidPovm { residual: f64::INFINITY });
    }
    let active: Vec<usize> =
        (0..n).filter(|&i| cs.w[i].norm() > 1.0 - ACTIVE_NORM_TOL).collect();
    if active.is_empty() {
        return Err(Error::NoValidPovm { residual: f64::INFINITY });
    }
    let dirs: Vec<BlochVector> = active.iter().map(|&i| cs.w[i]).collect();
    let (weights, residual) = balance_weights(&dirs);
    if residual >= POVM_RESIDUAL_TOL {
        return Err(Error::NoValidPovm { residual });
    }
    let total: f64 = weights.iter().sum();
    let mut povm = Povm::zeros(n);
    for (pos, &i) in active.iter().enumerate() {
        let weight = weights[pos] / total;
        if weight > 1e-15 {
            povm.elements[i] = PovmElement::Projector { weight, axis: cs.w[i] };
        }
    }
    Ok(povm)
}

/// Embeds a solved sub-instance back into the full ensemble: POVM elements
/// land on the subset positions, the certificate rescales by the subset mass.
fn embed_subset(
    ens: &WeightedEnsemble,
    indices: &[usize],
    sub: &DiscriminationSolution,
    mass: f64,
) -> DiscriminationSolution {
    let p_guess = mass * sub.p_guess;
    let mut povm = Povm::zeros(ens.len());
    for (pos, &i) in indices.iter().enumerate() {
        povm.elements[i] = sub.povm.elements[pos].clone();
    }
    let certificate = DualCertificate { k0: 0.5 * p_guess, k: sub.certificate.k * mass };
    let complementary = extract_complementary(ens, &certificate).ok();
    DiscriminationSolution {
        p_guess,
        povm,
        complementary,
        certificate,
        branch: Branch::Subset { indices: indices.to_vec() },
    }
}

/// Coplanar instances with more states than extreme points: the optimum is
/// attained on a proper subset, so take the best pair and the best feasible
/// triangle over all triples.
fn solve_coplanar(ens: &WeightedEnsemble) -> Result<DiscriminationSolution> {
    let n = ens.len();
    let mut best = solve_pair_reduction(ens);
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let indices = [i, j, k];
                let (sub, mass) = ens.subset(&indices)?;
                let sol = solve_three(&sub)?;
                // pair-branch triples duplicate pairs already covered
                if sol.branch == Branch::Triangle && mass * sol.p_guess > best.p_guess {
                    best = embed_subset(ens, &indices, &sol, mass);
                }
            }
        }
    }
    Ok(best)
}

/// Scaled guessing probability of the sub-ensemble on `mask`, memoized.
/// Masks index the sorted positions of `ens`; sub-recursions keep their own
/// maps since their masks live in a different index space.
fn subset_value(
    ens: &WeightedEnsemble,
    mask: u32,
    memo: &mut HashMap<u32, f64>,
) -> Result<f64> {
    if let Some(&v) = memo.get(&mask) {
        return Ok(v);
    }
    let indices: Vec<usize> = (0..ens.len()).filter(|&i| mask & (1 << i) != 0).collect();
    let value = if indices.len() == 1 {
        ens.prior(indices[0])
    } else {
        let (sub, mass) = ens.subset(&indices)?;
        mass * solve_value(&sub)?
    };
    memo.insert(mask, value);
    Ok(value)
}

/// The guessing probability of a (normalized) ensemble, value only.
fn solve_value(ens: &WeightedEnsemble) -> Result<f64> {
    let n = ens.len();
    if n == 1 {
        return Ok(1.0);
    }
    let poly = build_polytope(ens, GEOMETRY_EPS);
    match poly.shape {
        PolytopeShape::Point => Ok(ens.prior(0)),
        PolytopeShape::Segment { .. } => Ok(solve_pair_reduction(ens).p_guess),
        PolytopeShape::Triangle { .. } if n == 3 => Ok(solve_three(ens)?.p_guess),
        PolytopeShape::Triangle { .. } => Ok(solve_coplanar(ens)?.p_guess),
        PolytopeShape::Higher { .. } => {
            let (dual, _) = oracle::dual_solve(ens, oracle::DUAL_SOLVE_DEFAULT_TOL)?;
            let mut best = dual;
            let full: u32 = (1 << n) - 1;
            let mut local = HashMap::new();
            let mut sub = full - 1;
            while sub > 0 {
                best = best.max(subset_value(ens, sub, &mut local)?);
                sub = (sub - 1) & full;
            }
            Ok(best)
        }
    }
}

/// Solves an arbitrary instance of up to [`MAX_STATES`] states.
///
/// Shapes with at most three extreme points use the closed forms; anything
/// beyond goes to the dual oracle, with the optimum-on-a-subset reduction
/// `P_guess = max_S (sum_{j in S} q_j) P_guess(S)` taken over proper subsets.
pub fn solve_n(ens: &WeightedEnsemble) -> Result<DiscriminationSolution> {
    let n = ens.len();
    if n > MAX_STATES {
        return Err(Error::TooManyStates { n, max: MAX_STATES });
    }
    if n == 1 {
        let mut povm = Povm::zeros(1);
        povm.elements[0] = PovmElement::Identity;
        let certificate =
            DualCertificate { k0: 0.5 * ens.prior(0), k: ens.weighted_point(0) * 0.5 };
        let complementary = extract_complementary(ens, &certificate).ok();
        return Ok(DiscriminationSolution {
            p_guess: ens.prior(0),
            povm,
            complementary,
            certificate,
            branch: Branch::Point,
        });
    }
    let poly = build_polytope(ens, GEOMETRY_EPS);
    match poly.shape {
        PolytopeShape::Point => solve_point(ens),
        PolytopeShape::Segment { .. } => Ok(solve_pair_reduction(ens)),
        PolytopeShape::Triangle { .. } if n == 3 => solve_three(ens),
        PolytopeShape::Triangle { .. } => solve_coplanar(ens),
        PolytopeShape::Higher { .. } => solve_numeric(ens),
    }
}

/// Four or more extreme points: beyond the analytic reach. The dual oracle
/// gives the value; the POVM comes from the extracted complementary solution
/// when every optimal element can be nonzero, else from the best subset.
fn solve_numeric(ens: &WeightedEnsemble) -> Result<DiscriminationSolution> {
    let n = ens.len();
    let (dual_value, certificate) = oracle::dual_solve(ens, oracle::DUAL_SOLVE_DEFAULT_TOL)?;
    let full_support = extract_complementary(ens, &certificate)
        .ok()
        .and_then(|cs| recover_povm(ens, &cs).ok().map(|povm| (cs, povm)));

    let full: u32 = (1 << n) - 1;
    let mut memo = HashMap::new();
    let mut best_value = f64::NEG_INFINITY;
    let mut best_mask = 0u32;
    let mut sub = (full - 1) & full;
    while sub > 0 {
        let v = subset_value(ens, sub, &mut memo)?;
        if v > best_value {
            best_value = v;
            best_mask = sub;
        }
        sub = (sub - 1) & full;
    }

    if let Some((cs, povm)) = full_support {
        if dual_value >= best_value - 1e-12 {
            let p_guess = dual_value.max(best_value);
            return Ok(DiscriminationSolution {
                p_guess,
                povm,
                complementary: Some(cs),
                certificate: DualCertificate { k0: 0.5 * p_guess, k: certificate.k },
                branch: Branch::Numeric,
            });
        }
    }

    let indices: Vec<usize> = (0..n).filter(|&i| best_mask & (1 << i) != 0).collect();
    let (sub_ens, mass) = ens.subset(&indices)?;
    let sub_sol = solve_n(&sub_ens)?;
    Ok(embed_subset(ens, &indices, &sub_sol, mass))
}
