//! Independent verification: a numeric solver for the dual problem, primal
//! value checks, and full KKT residuals computed on explicit 2x2 matrices.
//!
//! The dual `min tr K` over `K >= q_i rho_i` reduces for qubits to an
//! unconstrained convex minimax over a 3-vector `m`:
//! `f(m) = max_i (q_i + ||m - q_i v_i||)`, with `K = (f(m*)/2) I + (m*/2).sigma`.
//! The search is restricted to the affine hull of the weighted points
//! (projecting onto the hull never increases any distance, so the optimum
//! lies there), seeded with the stationary candidates of every small active
//! set, and polished by a subgradient phase plus pattern search with
//! steepest-descent line searches. The value returned is always an honest
//! evaluation of `f`, so the certificate it encodes is feasible by
//! construction.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bloch::{bloch_to_density, BlochVector, QubitDensity, WeightedEnsemble};
use crate::closed_form::{Povm, PovmElement};
use crate::error::{Error, Result};
use crate::kkt::{ComplementarySolution, DualCertificate};

/// Default convergence tolerance for [`dual_solve`].
pub const DUAL_SOLVE_DEFAULT_TOL: f64 = 1e-12;

/// Evaluation budget before the solver reports no convergence.
const EVAL_BUDGET: usize = 1_000_000;

/// The dual objective `max_i (q_i + ||m - q_i v_i||_2)` at a trial point.
pub fn dual_objective(ens: &WeightedEnsemble, m: BlochVector) -> f64 {
    (0..ens.len())
        .map(|i| ens.prior(i) + m.distance(ens.weighted_point(i)))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Index attaining the objective, lowest index on ties.
fn attaining_index(ens: &WeightedEnsemble, m: BlochVector) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for i in 0..ens.len() {
        let v = ens.prior(i) + m.distance(ens.weighted_point(i));
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    best
}

/// Orthonormal basis of the span of `vectors` (Gram-Schmidt with a relative
/// threshold). At most three columns.
fn orthonormal_span(vectors: &[BlochVector], threshold: f64) -> Vec<BlochVector> {
    let mut basis: Vec<BlochVector> = Vec::new();
    for &v in vectors {
        let mut rest = v;
        for &b in &basis {
            rest = rest - b * rest.dot(b);
        }
        // re-orthogonalize once to keep the basis tight
        for &b in &basis {
            rest = rest - b * rest.dot(b);
        }
        if rest.norm() > threshold {
            basis.push(rest * (1.0 / rest.norm()));
        }
        if basis.len() == 3 {
            break;
        }
    }
    basis
}

/// Sign patterns over `k` coordinates: every nonzero vector in {-1,0,1}^k,
/// normalized. 2, 8, or 26 directions.
fn pattern_directions(k: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    let mut stack = vec![0i32; k];
    fn rec(pos: usize, k: usize, stack: &mut Vec<i32>, out: &mut Vec<Vec<f64>>) {
        if pos == k {
            if stack.iter().any(|&s| s != 0) {
                let norm = (stack.iter().map(|&s| (s * s) as f64).sum::<f64>()).sqrt();
                out.push(stack.iter().map(|&s| s as f64 / norm).collect());
            }
            return;
        }
        for s in [-1, 0, 1] {
            stack[pos] = s;
            rec(pos + 1, k, stack, out);
        }
        stack[pos] = 0;
    }
    rec(0, k, &mut stack, &mut dirs);
    dirs
}

/// Rotates a direction set within the first two coordinates by `angle`.
/// Identity when there is only one coordinate.
fn rotate_directions(dirs: &[Vec<f64>], angle: f64) -> Vec<Vec<f64>> {
    let (s, c) = angle.sin_cos();
    dirs.iter()
        .map(|d| {
            let mut r = d.clone();
            if r.len() >= 2 {
                let (x, y) = (r[0], r[1]);
                r[0] = c * x - s * y;
                r[1] = s * x + c * y;
            }
            r
        })
        .collect()
}

/// Stationary-point candidates for the minimax over the hull coordinates.
///
/// At the optimum at most `k + 1` constraints are active (Caratheodory on
/// the subgradients), and for each candidate active set the tie conditions
/// `||y - x_a|| = c - q_a` reduce to a linear system in the tie-manifold
/// coordinates plus one quadratic in `c`. Every root is returned; the caller
/// keeps whichever evaluates best. Spurious roots are harmless because the
/// objective is evaluated honestly at each candidate.
fn stationary_candidates(points: &[Vec<f64>], priors: &[f64], k: usize) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut out: Vec<Vec<f64>> = points.to_vec();
    for mask in 1u32..(1 << n) {
        let s = mask.count_ones() as usize;
        if !(2..=k + 1).contains(&s) {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let x1 = &points[idx[0]];
        let q1 = priors[idx[0]];
        let cols = s - 1;
        let mut e = DMatrix::<f64>::zeros(k, cols);
        let mut g0 = DVector::<f64>::zeros(cols);
        let mut g1 = DVector::<f64>::zeros(cols);
        for (c, &a) in idx[1..].iter().enumerate() {
            let qa = priors[a];
            let mut norm_sq = 0.0;
            for r in 0..k {
                let d = points[a][r] - x1[r];
                e[(r, c)] = d;
                norm_sq += d * d;
            }
            g0[c] = 0.5 * (norm_sq + q1 * q1 - qa * qa);
            g1[c] = -(q1 - qa);
        }
        let gram = e.transpose() * &e;
        let lu = gram.lu();
        let Some(t0) = lu.solve(&g0) else { continue };
        let Some(t1) = lu.solve(&g1) else { continue };
        let w0 = &e * &t0;
        let w1 = &e * &t1;
        // ||w0 + w1 c||^2 = (c - q1)^2
        let a: f64 = w1.norm_squared() - 1.0;
        let b: f64 = 2.0 * (w0.dot(&w1) + q1);
        let c0: f64 = w0.norm_squared() - q1 * q1;
        let mut roots: Vec<f64> = Vec::new();
        if a.abs() < 1e-14 {
            if b.abs() > 1e-14 {
                roots.push(-c0 / b);
            }
        } else {
            let disc = b * b - 4.0 * a * c0;
            if disc >= 0.0 {
                let sq = disc.sqrt();
                // numerically stable pairing of the two roots
                let q = -0.5 * (b + b.signum() * sq);
                roots.push(q / a);
                if q.abs() > 1e-300 {
                    roots.push(c0 / q);
                }
            }
        }
        for c in roots {
            if !c.is_finite() {
                continue;
            }
            let y: Vec<f64> = (0..k).map(|r| x1[r] + w0[r] + w1[r] * c).collect();
            if y.iter().all(|v| v.is_finite()) {
                out.push(y);
            }
        }
    }
    out
}

struct HullProblem<'a> {
    ens: &'a WeightedEnsemble,
    centroid: BlochVector,
    basis: Vec<BlochVector>,
    evals: usize,
}

impl<'a> HullProblem<'a> {
    fn embed(&self, y: &[f64]) -> BlochVector {
        let mut m = self.centroid;
        for (j, &b) in self.basis.iter().enumerate() {
            m = m + b * y[j];
        }
        m
    }

    fn eval(&mut self, y: &[f64]) -> f64 {
        self.evals += 1;
        dual_objective(self.ens, self.embed(y))
    }

    /// Minimizes the (convex) objective along `d` from `y`: backtracks to an
    /// improving step, expands it while it improves, then ternary-refines.
    /// Updates `y`/`f` in place and returns the improvement.
    fn line_minimize(&mut self, y: &mut Vec<f64>, f: &mut f64, d: &[f64], step0: f64) -> f64 {
        let at = |y: &[f64], t: f64| -> Vec<f64> {
            y.iter().zip(d).map(|(&v, &dv)| v + t * dv).collect()
        };
        let start = *f;
        let mut t = step0;
        let mut fc = self.eval(&at(y, t));
        let mut backtracks = 0;
        while fc >= *f && backtracks < 30 && self.evals < EVAL_BUDGET {
            t *= 0.25;
            fc = self.eval(&at(y, t));
            backtracks += 1;
        }
        if fc >= *f {
            return 0.0;
        }
        let mut t_best = t;
        let mut f_best = fc;
        while self.evals < EVAL_BUDGET {
            let t2 = t_best * 2.0;
            let f2 = self.eval(&at(y, t2));
            if f2 < f_best {
                t_best = t2;
                f_best = f2;
            } else {
                break;
            }
        }
        let (mut lo, mut hi) = (t_best * 0.5, t_best * 2.0);
        for _ in 0..24 {
            if self.evals + 2 > EVAL_BUDGET {
                break;
            }
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            let f1 = self.eval(&at(y, m1));
            let f2 = self.eval(&at(y, m2));
            if f1 < f_best {
                t_best = m1;
                f_best = f1;
            }
            if f2 < f_best {
                t_best = m2;
                f_best = f2;
            }
            if f1 < f2 {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        *y = at(y, t_best);
        *f = f_best;
        start - f_best
    }

    /// Steepest-descent direction for the max objective at `y`: the negated
    /// minimum-norm point of the convex hull of the near-active gradients,
    /// expressed in hull coordinates (zero-padded to three components).
    /// `None` when the minimum-norm point vanishes (optimality).
    fn descent_direction(&self, y: &[f64], band: f64) -> Option<Vec<f64>> {
        let m = self.embed(y);
        let f = dual_objective(self.ens, m);
        let mut grads: Vec<BlochVector> = Vec::new();
        for i in 0..self.ens.len() {
            let u = self.ens.weighted_point(i);
            let dist = m.distance(u);
            if self.ens.prior(i) + dist >= f - band && dist > 1e-14 {
                let g = (m - u) * (1.0 / dist);
                let mut coords = [0.0; 3];
                for (j, &b) in self.basis.iter().enumerate() {
                    coords[j] = b.dot(g);
                }
                grads.push(BlochVector::new(coords[0], coords[1], coords[2]));
            }
        }
        if grads.is_empty() {
            return None;
        }
        let (point, norm) = crate::polytope::hull_projection(BlochVector::ZERO, &grads);
        if norm < 1e-14 {
            return None;
        }
        let d = point * (-1.0 / norm);
        Some([d.x, d.y, d.z][..self.basis.len()].to_vec())
    }
}

/// Solves the dual problem to `tol` on the objective.
///
/// Deterministic: fixed start `m0 = sum(q_i^2 v_i) / sum(q_i^2)` projected
/// onto the affine hull, exact stationary candidates as seeds, a fixed
/// subgradient schedule, then pattern search with halving steps (plus two
/// rotated polish passes) down to a fixed floor.
pub fn dual_solve(ens: &WeightedEnsemble, tol: f64) -> Result<(f64, DualCertificate)> {
    let tol = tol.max(1e-12);
    let n = ens.len();
    let points = ens.weighted_points();
    let inv = 1.0 / n as f64;
    let centroid = points.iter().fold(BlochVector::ZERO, |acc, &p| acc + p) * inv;
    let rel: Vec<BlochVector> = points.iter().map(|&p| p - centroid).collect();
    let scale = rel.iter().map(|r| r.norm()).fold(0.0, f64::max) + 1.0;
    let basis = orthonormal_span(&rel, 1e-12 * scale);
    let k = basis.len();

    let q_max = ens.prior(0);
    if k == 0 {
        let value = dual_objective(ens, centroid).clamp(q_max, 1.0);
        return Ok((value, DualCertificate { k0: 0.5 * value, k: centroid * 0.5 }));
    }

    let mut problem = HullProblem { ens, centroid, basis, evals: 0 };

    // fixed start: priors-squared weighted mean, projected onto the hull
    let qq: f64 = (0..n).map(|i| ens.prior(i) * ens.prior(i)).sum();
    let m0 = (0..n).fold(BlochVector::ZERO, |acc, i| {
        acc + ens.weighted_point(i) * (ens.prior(i) / qq)
    });
    let mut y: Vec<f64> = problem.basis.iter().map(|b| b.dot(m0 - centroid)).collect();
    let mut best_y = y.clone();
    let mut best_f = problem.eval(&y);

    // seed with the stationary candidates of every small active set; the
    // search below can only improve on the best of them
    let coords: Vec<Vec<f64>> = (0..n)
        .map(|i| problem.basis.iter().map(|b| b.dot(rel[i])).collect())
        .collect();
    let priors: Vec<f64> = (0..n).map(|i| ens.prior(i)).collect();
    for cand in stationary_candidates(&coords, &priors, k) {
        let f = problem.eval(&cand);
        if f < best_f {
            best_f = f;
            best_y = cand;
        }
    }

    // subgradient warm start
    let radius = rel.iter().map(|r| r.norm()).fold(0.0, f64::max).max(1e-3);
    for t in 0..512 {
        let m = problem.embed(&y);
        let i = attaining_index(ens, m);
        let g = m - ens.weighted_point(i);
        let g_norm = g.norm();
        if g_norm < 1e-15 {
            break;
        }
        let step = radius / ((t + 1) as f64).sqrt();
        let basis = problem.basis.clone();
        for (j, b) in basis.iter().enumerate() {
            y[j] -= step * b.dot(g) / g_norm;
        }
        let f = problem.eval(&y);
        if f < best_f {
            best_f = f;
            best_y = y.clone();
        }
    }

    // pattern search with halving steps
    let dirs = pattern_directions(k);
    let floor = 1e-13 * scale;
    let frames = [
        dirs.clone(),
        rotate_directions(&dirs, std::f64::consts::PI / 8.0),
        rotate_directions(&dirs, std::f64::consts::PI / 5.0),
    ];
    for (pass, frame) in frames.iter().enumerate() {
        let mut step = if pass == 0 { scale } else { 1e-5 * scale };
        while step > floor && problem.evals < EVAL_BUDGET {
            // steepest descent of the max: line-minimize along the negated
            // minimum-norm point of the near-active gradient hull. The first
            // band keeps only the attaining constraint (plain gradient
            // descent on a smooth piece); wider bands catch kink valleys.
            let bands = [
                1e-14 * scale,
                2.0 * step + 1e-12 * scale,
                64.0 * step + 1e-10 * scale,
                1e-4 * scale,
            ];
            let mut gain = 0.0;
            for band in bands {
                if let Some(d) = problem.descent_direction(&best_y, band) {
                    gain += problem.line_minimize(&mut best_y, &mut best_f, &d, 8.0 * step);
                }
            }
            // poll the fixed frame at the current step; the step halves when
            // neither the polls nor the line searches make step-sized progress
            let mut polled = false;
            for d in frame {
                let mut t = step;
                while problem.evals < EVAL_BUDGET {
                    let cand: Vec<f64> =
                        best_y.iter().zip(d).map(|(&v, &dv)| v + t * dv).collect();
                    let f = problem.eval(&cand);
                    if f < best_f {
                        best_f = f;
                        best_y = cand;
                        polled = true;
                        t *= 2.0;
                    } else {
                        break;
                    }
                }
            }
            if !polled && gain <= (1e-9 * step).max(1e-16 * scale) {
                step *= 0.5;
            }
        }
        if k == 1 {
            break; // rotations are identities in one dimension
        }
    }
    if problem.evals >= EVAL_BUDGET {
        let gap = 4.0 * floor;
        if gap > tol {
            return Err(Error::NoConvergence { gap });
        }
    }

    let value = best_f.clamp(q_max, 1.0);
    let m = problem.embed(&best_y);
    Ok((value, DualCertificate { k0: 0.5 * value, k: m * 0.5 }))
}

// ---------------------------------------------------------------------------
// explicit 2x2 matrices: the residual checks run on the matrix level rather
// than through the Bloch shortcuts they are meant to validate
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub(crate) struct Mat2 {
    pub m: [[Complex64; 2]; 2],
}

impl Mat2 {
    pub fn zero() -> Self {
        Mat2 { m: [[Complex64::ZERO; 2]; 2] }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Mat2 { m: [[one, Complex64::ZERO], [Complex64::ZERO, one]] }
    }

    pub fn from_density(rho: &QubitDensity) -> Self {
        Mat2 {
            m: [
                [
                    Complex64::new(rho.rho00, 0.0),
                    Complex64::new(rho.rho01_re, rho.rho01_im),
                ],
                [
                    Complex64::new(rho.rho01_re, -rho.rho01_im),
                    Complex64::new(rho.rho11, 0.0),
                ],
            ],
        }
    }

    /// `(I + w.sigma)/2` without any norm constraint on `w`.
    pub fn density_from_direction(w: BlochVector) -> Self {
        Mat2 {
            m: [
                [
                    Complex64::new(0.5 * (1.0 + w.z), 0.0),
                    Complex64::new(0.5 * w.x, -0.5 * w.y),
                ],
                [
                    Complex64::new(0.5 * w.x, 0.5 * w.y),
                    Complex64::new(0.5 * (1.0 - w.z), 0.0),
                ],
            ],
        }
    }

    pub fn from_povm_element(el: &PovmElement) -> Self {
        match el {
            PovmElement::Zero => Mat2::zero(),
            PovmElement::Identity => Mat2::identity(),
            PovmElement::Projector { weight, axis } => {
                let p = *weight;
                let w = *axis;
                Mat2 {
                    m: [
                        [
                            Complex64::new(p * (1.0 - w.z), 0.0),
                            Complex64::new(-p * w.x, p * w.y),
                        ],
                        [
                            Complex64::new(-p * w.x, -p * w.y),
                            Complex64::new(p * (1.0 + w.z), 0.0),
                        ],
                    ],
                }
            }
        }
    }

    pub fn add(&self, other: &Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] = self.m[r][c] + other.m[r][c];
            }
        }
        out
    }

    pub fn sub(&self, other: &Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] = self.m[r][c] - other.m[r][c];
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let mut out = *self;
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] *= s;
            }
        }
        out
    }

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] =
                    self.m[r][0] * other.m[0][c] + self.m[r][1] * other.m[1][c];
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Eigenvalues of a Hermitian 2x2 matrix, `(lo, hi)`.
    pub fn herm_eigenvalues(&self) -> (f64, f64) {
        let tr = self.trace().re;
        let det = (self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]).re;
        let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
        (0.5 * tr - disc, 0.5 * tr + disc)
    }

    /// Operator norm of a Hermitian matrix: the largest |eigenvalue|.
    pub fn herm_op_norm(&self) -> f64 {
        let (lo, hi) = self.herm_eigenvalues();
        lo.abs().max(hi.abs())
    }
}

fn state_matrix(ens: &WeightedEnsemble, i: usize) -> Mat2 {
    let rho = bloch_to_density(ens.state(i)).expect("ensemble states are physical");
    Mat2::from_density(&rho)
}

/// Primal value and validity of a POVM against the ensemble.
#[derive(Clone, Debug)]
pub struct PrimalReport {
    /// `sum_i q_i tr(rho_i M_i)`.
    pub p_corr: f64,
    /// Operator-norm defect of `sum_i M_i = I`.
    pub completeness_residual: f64,
    /// Worst negative eigenvalue over the elements (0 when all PSD).
    pub positivity_residual: f64,
}

/// Evaluates `P_corr` on explicit matrices and reports validity residuals.
///
/// Fails with [`Error::InvalidPovm`] on an element-count mismatch or a
/// completeness defect beyond 1e-8.
pub fn primal_check(ens: &WeightedEnsemble, povm: &Povm) -> Result<PrimalReport> {
    if povm.len() != ens.len() {
        return Err(Error::InvalidPovm(format!(
            "{} elements for {} states",
            povm.len(),
            ens.len()
        )));
    }
    let mut sum = Mat2::zero();
    let mut p_corr = 0.0;
    let mut worst_negative = 0.0_f64;
    for (i, el) in povm.elements.iter().enumerate() {
        let m = Mat2::from_povm_element(el);
        sum = sum.add(&m);
        let (lo, _) = m.herm_eigenvalues();
        worst_negative = worst_negative.max(-lo);
        p_corr += ens.prior(i) * state_matrix(ens, i).mul(&m).trace().re;
    }
    let completeness = sum.sub(&Mat2::identity()).herm_op_norm();
    if completeness > 1e-8 {
        return Err(Error::InvalidPovm(format!("completeness residual {completeness}")));
    }
    Ok(PrimalReport {
        p_corr,
        completeness_residual: completeness,
        positivity_residual: worst_negative.max(0.0),
    })
}

/// Residuals of the full KKT conditions on the matrix level.
#[derive(Clone, Debug)]
pub struct KktResidualReport {
    /// Operator-norm defect of `sum_i M_i = I`.
    pub povm_completeness: f64,
    /// Worst negative eigenvalue over POVM elements.
    pub povm_positivity: f64,
    /// Worst pairwise operator-norm defect of
    /// `r_i rho~_i - r_j rho~_j = q_j rho_j - q_i rho_i`.
    pub pair_operator: f64,
    /// Worst complementary-slackness defect `|r_i tr(rho~_i M_i)|`.
    pub slackness: f64,
}

impl KktResidualReport {
    pub fn max(&self) -> f64 {
        self.povm_completeness
            .max(self.povm_positivity)
            .max(self.pair_operator)
            .max(self.slackness)
    }
}

/// Computes all KKT residuals for a candidate solution. Report-only.
pub fn kkt_residuals(
    ens: &WeightedEnsemble,
    povm: &Povm,
    cs: &ComplementarySolution,
) -> KktResidualReport {
    let n = ens.len();
    assert_eq!(povm.len(), n);
    assert_eq!(cs.r.len(), n);

    let mut sum = Mat2::zero();
    let mut worst_negative = 0.0_f64;
    let elements: Vec<Mat2> = povm.elements.iter().map(Mat2::from_povm_element).collect();
    for m in &elements {
        sum = sum.add(m);
        let (lo, _) = m.herm_eigenvalues();
        worst_negative = worst_negative.max(-lo);
    }
    let completeness = sum.sub(&Mat2::identity()).herm_op_norm();

    let weighted: Vec<Mat2> =
        (0..n).map(|i| state_matrix(ens, i).scale(ens.prior(i))).collect();
    let complementary: Vec<Mat2> = (0..n)
        .map(|i| Mat2::density_from_direction(cs.w[i]).scale(cs.r[i]))
        .collect();

    let mut pair_operator = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let lhs = complementary[i].sub(&complementary[j]);
            let rhs = weighted[j].sub(&weighted[i]);
            pair_operator = pair_operator.max(lhs.sub(&rhs).herm_op_norm());
        }
    }

    let mut slackness = 0.0_f64;
    for i in 0..n {
        slackness = slackness.max(complementary[i].mul(&elements[i]).trace().re.abs());
    }

    KktResidualReport {
        povm_completeness: completeness,
        povm_positivity: worst_negative.max(0.0),
        pair_operator,
        slackness,
    }
}

/// Reproducible random instance. PRNG is ChaCha8 seeded directly; priors are
/// normalized exponentials, Bloch directions uniform on the sphere with radii
/// uniform in `[purity_min, purity_max]`. Draw order: all priors first, then
/// per state radius, polar z, azimuth.
pub fn random_ensemble(
    seed: u64,
    n: usize,
    purity_min: f64,
    purity_max: f64,
) -> WeightedEnsemble {
    assert!(n >= 1, "need at least one state");
    assert!(
        (0.0..=1.0).contains(&purity_min)
            && purity_min <= purity_max
            && purity_max <= 1.0,
        "purity bounds must satisfy 0 <= min <= max <= 1"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut priors: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = 1.0 - rng.gen::<f64>();
            (-u.ln()).max(1e-12)
        })
        .collect();
    let total: f64 = priors.iter().sum();
    for q in &mut priors {
        *q /= total;
    }
    let raw: Vec<(f64, BlochVector)> = priors
        .iter()
        .map(|&q| {
            let radius = purity_min + (purity_max - purity_min) * rng.gen::<f64>();
            let z = 2.0 * rng.gen::<f64>() - 1.0;
            let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
            let s = (1.0 - z * z).max(0.0).sqrt();
            (q, BlochVector::new(s * phi.cos(), s * phi.sin(), z) * radius)
        })
        .collect();
    WeightedEnsemble::new(&raw).expect("generated ensemble is valid")
}
