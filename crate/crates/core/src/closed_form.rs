//! Closed-form discrimination solvers, dispatched by intrinsic-polytope shape.
//!
//! Three regimes have analytic answers: a point polytope (guess the largest
//! prior), a segment (best two-state measurement over all pairs), and a
//! feasible triangle (the hyperbola-intersection construction). Everything
//! here returns a [`DiscriminationSolution`] whose POVM, complementary data,
//! and dual certificate can be verified independently.

use serde::Serialize;
use std::fmt;

use crate::bloch::{BlochVector, WeightedEnsemble};
use crate::error::{Error, Result};
use crate::hyperbola::{origin_inside_triangle, TriangleGeometry};
use crate::kkt::{extract_complementary, ComplementarySolution, DualCertificate};
use crate::polytope::{build_polytope, PolytopeShape, GEOMETRY_EPS};

/// One measurement operator in Bloch form.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PovmElement {
    /// The zero operator.
    Zero,
    /// The identity, used when the best strategy ignores the outcome.
    Identity,
    /// `M = weight * (I - axis.sigma)` with a unit axis.
    Projector { weight: f64, axis: BlochVector },
}

impl PovmElement {
    pub fn weight(&self) -> f64 {
        match self {
            PovmElement::Zero => 0.0,
            PovmElement::Identity => 1.0,
            PovmElement::Projector { weight, .. } => *weight,
        }
    }

    /// Bloch axis scaled into the completeness sum: zero for `Zero` and
    /// `Identity`, the stored axis otherwise.
    pub fn bloch_axis(&self) -> BlochVector {
        match self {
            PovmElement::Projector { axis, .. } => *axis,
            _ => BlochVector::ZERO,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PovmElement::Zero)
    }

    /// The 2x2 matrix as `[[re, im]; 2]; 2]` rows.
    pub fn matrix(&self) -> [[[f64; 2]; 2]; 2] {
        let (p, w) = (self.weight(), self.bloch_axis());
        [
            [[p * (1.0 - w.z), 0.0], [-p * w.x, p * w.y]],
            [[-p * w.x, -p * w.y], [p * (1.0 + w.z), 0.0]],
        ]
    }
}

/// A positive-operator-valued measure, one element per ensemble member.
#[derive(Clone, Debug, Serialize)]
pub struct Povm {
    pub elements: Vec<PovmElement>,
}

impl Povm {
    pub fn zeros(n: usize) -> Self {
        Povm { elements: vec![PovmElement::Zero; n] }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Completeness defect: max of |sum of weights - 1| and the norm of the
    /// weighted axis sum (both vanish exactly when the elements sum to I).
    pub fn completeness_residual(&self) -> f64 {
        let wsum: f64 = self.elements.iter().map(|e| e.weight()).sum();
        let axis = self
            .elements
            .iter()
            .fold(BlochVector::ZERO, |acc, e| acc + e.bloch_axis() * e.weight());
        (wsum - 1.0).abs().max(axis.norm())
    }
}

/// Which solution route produced the answer. Indices refer to sorted
/// (descending-prior) ensemble positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Branch {
    Point,
    Pair { a: usize, b: usize },
    Triangle,
    Subset { indices: Vec<usize> },
    Numeric,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Point => write!(f, "point"),
            Branch::Pair { a, b } => write!(f, "pair({a},{b})"),
            Branch::Triangle => write!(f, "triangle"),
            Branch::Subset { indices } => write!(f, "subset{indices:?}"),
            Branch::Numeric => write!(f, "numeric"),
        }
    }
}

/// A solved discrimination instance: the guessing probability with the
/// measurement attaining it and the dual-side data certifying it.
#[derive(Clone, Debug, Serialize)]
pub struct DiscriminationSolution {
    pub p_guess: f64,
    pub povm: Povm,
    pub complementary: Option<ComplementarySolution>,
    pub certificate: DualCertificate,
    pub branch: Branch,
}

/// Point polytope: guess the most likely state, `P_guess = q_1`.
pub fn solve_point(ens: &WeightedEnsemble) -> Result<DiscriminationSolution> {
    let poly = build_polytope(ens, GEOMETRY_EPS);
    if poly.shape != PolytopeShape::Point {
        return Err(Error::WrongShape { expected: "point", found: poly.shape.to_string() });
    }
    let p_guess = ens.prior(0);
    let mut povm = Povm::zeros(ens.len());
    povm.elements[0] = PovmElement::Identity;
    let certificate = DualCertificate { k0: 0.5 * p_guess, k: ens.weighted_point(0) * 0.5 };
    let complementary = extract_complementary(ens, &certificate).ok();
    Ok(DiscriminationSolution { p_guess, povm, complementary, certificate, branch: Branch::Point })
}

/// Two-state (Helstrom) solution data for a single pair.
#[derive(Clone, Copy, Debug)]
pub struct PairOutcome {
    pub p_guess: f64,
    pub r_a: f64,
    pub r_b: f64,
    pub w_a: BlochVector,
    pub w_b: BlochVector,
    /// False when the weighted points are closer than the prior gap; the
    /// best strategy then always guesses the likelier state.
    pub feasible: bool,
}

/// Minimum-error discrimination of two weighted states, `qa >= qb`.
pub fn solve_pair(qa: f64, va: BlochVector, qb: f64, vb: BlochVector) -> PairOutcome {
    let diff = va * qa - vb * qb;
    let d = diff.norm();
    let gap = qa - qb;
    if d >= gap && d > 0.0 {
        let n = diff * (1.0 / d);
        PairOutcome {
            p_guess: 0.5 * (qa + qb + d),
            r_a: 0.5 * (d - gap),
            r_b: 0.5 * (d + gap),
            w_a: -n,
            w_b: n,
            feasible: true,
        }
    } else {
        // complementary direction of the discarded state carries the slack
        let w_b = if gap > 0.0 { diff * (1.0 / gap) } else { BlochVector::ZERO };
        PairOutcome { p_guess: qa, r_a: 0.0, r_b: gap, w_a: BlochVector::ZERO, w_b, feasible: false }
    }
}

/// Best two-outcome strategy over all index pairs,
/// `P_guess = max_{i != j} (q_i + q_j + ||q_i rho_i - q_j rho_j||_1) / 2`.
///
/// Ties keep the lexicographically smallest pair.
pub fn solve_pair_reduction(ens: &WeightedEnsemble) -> DiscriminationSolution {
    let n = ens.len();
    debug_assert!(n >= 2);
    let mut best: Option<(usize, usize, PairOutcome)> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let out = solve_pair(ens.prior(i), ens.state(i), ens.prior(j), ens.state(j));
            if best.is_none_or(|(_, _, b)| out.p_guess > b.p_guess) {
                best = Some((i, j, out));
            }
        }
    }
    let (a, b, out) = best.expect("ensemble has at least one pair");

    let mut povm = Povm::zeros(n);
    let anchor;
    if out.feasible {
        povm.elements[a] = PovmElement::Projector { weight: 0.5, axis: out.w_a };
        povm.elements[b] = PovmElement::Projector { weight: 0.5, axis: out.w_b };
        anchor = ens.weighted_point(a) + out.w_a * out.r_a;
    } else {
        povm.elements[a] = PovmElement::Identity;
        anchor = ens.weighted_point(a);
    }
    let certificate = DualCertificate { k0: 0.5 * out.p_guess, k: anchor * 0.5 };
    let complementary = extract_complementary(ens, &certificate).ok();
    DiscriminationSolution {
        p_guess: out.p_guess,
        povm,
        complementary,
        certificate,
        branch: Branch::Pair { a, b },
    }
}

/// Side lengths, gaps, and angles of a three-state triangle instance.
///
/// Requires the intrinsic polytope of `ens` to be a triangle; priors are
/// already sorted, so the gaps satisfy `e2 >= e1 >= 0`.
pub fn triangle_geometry(ens: &WeightedEnsemble) -> Result<TriangleGeometry> {
    debug_assert_eq!(ens.len(), 3);
    let u1 = ens.weighted_point(0);
    let u2 = ens.weighted_point(1);
    let u3 = ens.weighted_point(2);
    TriangleGeometry::from_sides(
        (u2 - u1).norm(),
        (u3 - u1).norm(),
        (u3 - u2).norm(),
        ens.prior(0) - ens.prior(1),
        ens.prior(0) - ens.prior(2),
    )
}

/// The three feasibility conditions for the triangle solution: gaps below
/// side lengths, intersecting branches, and the intersection point inside
/// the triangle. All strict.
pub fn triangle_feasible(g: &TriangleGeometry) -> bool {
    g.l1 > g.e1
        && g.l2 > g.e2
        && g.curves_intersect()
        && match g.intersection_radius() {
            Ok(r1) => origin_inside_triangle(g, r1),
            Err(_) => false,
        }
}

/// Triangle solution: `P_guess = q_1 + r_1` with the POVM and complementary
/// states built from the branch intersection point.
pub fn solve_triangle(
    ens: &WeightedEnsemble,
    g: &TriangleGeometry,
) -> Result<DiscriminationSolution> {
    if !triangle_feasible(g) {
        return Err(Error::Infeasible("feasibility conditions do not hold"));
    }
    let (_, _, chi) = g.chi_angles()?;
    let r1 = g.intersection_radius()?;
    let r2 = r1 + g.e1;
    let r3 = r1 + g.e2;
    let p_guess = ens.prior(0) + r1;

    let u1 = ens.weighted_point(0);
    let edge_a = ens.weighted_point(1) - u1;
    let edge_b = ens.weighted_point(2) - u1;
    let sin_t1 = g.theta1.sin();
    let sin_chi = chi.sin();
    let sin_rest = (g.theta1 - chi).sin();

    let w1 = edge_a * (sin_rest / (g.l1 * sin_t1)) + edge_b * (sin_chi / (g.l2 * sin_t1));
    let w1 = renormalize_unit(w1, "w1");
    let w2 = renormalize_unit((w1 * r1 - edge_a) * (1.0 / r2), "w2");
    let w3 = renormalize_unit((w1 * r1 - edge_b) * (1.0 / r3), "w3");

    let denom = g.l1 * g.l2 * sin_t1 + g.e2 * g.l1 * sin_chi + g.e1 * g.l2 * sin_rest;
    assert!(denom > 0.0, "triangle weight denominator must be positive, got {denom}");
    let mut p = [
        (g.l1 * g.l2 * sin_t1 - r1 * g.l1 * sin_chi - r1 * g.l2 * sin_rest) / denom,
        r2 * g.l2 * sin_rest / denom,
        r3 * g.l1 * sin_chi / denom,
    ];
    let total: f64 = p.iter().sum();
    for w in &mut p {
        *w /= total;
    }

    let povm = Povm {
        elements: vec![
            PovmElement::Projector { weight: p[0], axis: w1 },
            PovmElement::Projector { weight: p[1], axis: w2 },
            PovmElement::Projector { weight: p[2], axis: w3 },
        ],
    };
    let certificate = DualCertificate { k0: 0.5 * p_guess, k: (u1 + w1 * r1) * 0.5 };
    let complementary = Some(ComplementarySolution {
        r: vec![r1, r2, r3],
        w: vec![w1, w2, w3],
        free: vec![false; 3],
    });
    Ok(DiscriminationSolution { p_guess, povm, complementary, certificate, branch: Branch::Triangle })
}

/// A quotient that should already be a unit vector; deviation beyond the
/// tolerance signals an implementation bug, not input noise.
fn renormalize_unit(w: BlochVector, label: &str) -> BlochVector {
    let norm = w.norm();
    assert!(
        (norm - 1.0).abs() < 1e-10,
        "complementary direction {label} has norm {norm}, expected 1"
    );
    w * (1.0 / norm)
}

/// Three-state dispatch: point, pair-reduction, or feasible triangle.
pub fn solve_three(ens: &WeightedEnsemble) -> Result<DiscriminationSolution> {
    assert_eq!(ens.len(), 3, "solve_three requires exactly three states");
    let poly = build_polytope(ens, GEOMETRY_EPS);
    match poly.shape {
        PolytopeShape::Point => solve_point(ens),
        PolytopeShape::Segment { .. } => Ok(solve_pair_reduction(ens)),
        PolytopeShape::Triangle { .. } => match triangle_geometry(ens) {
            Ok(g) if triangle_feasible(&g) => solve_triangle(ens, &g),
            Ok(_) => Ok(solve_pair_reduction(ens)),
            // a sliver that slipped past classification falls back too
            Err(Error::WrongShape { .. }) => Ok(solve_pair_reduction(ens)),
            Err(e) => Err(e),
        },
        PolytopeShape::Higher { .. } => {
            unreachable!("three points cannot have more than three extreme points")
        }
    }
}

/// Three symmetric states on a cone: equal priors, pairwise overlaps
/// `v_i.v_i = r` and `v_i.v_j = gamma`.
pub fn make_symmetric_ensemble(r: f64, gamma: f64) -> Result<WeightedEnsemble> {
    let eps = crate::bloch::VALIDATION_EPS;
    if !(0.0..=1.0 + eps).contains(&r) || gamma > r + eps || gamma < -0.5 * r - eps {
        return Err(Error::Unrealizable { r, gamma });
    }
    let a = (2.0 * (r - gamma) / 3.0).max(0.0).sqrt();
    let h = ((r + 2.0 * gamma) / 3.0).max(0.0).sqrt();
    let third = 2.0 * std::f64::consts::PI / 3.0;
    let raw: Vec<(f64, BlochVector)> = (0..3)
        .map(|i| {
            let phi = i as f64 * third;
            (1.0 / 3.0, BlochVector::new(a * phi.cos(), a * phi.sin(), h))
        })
        .collect();
    let ens = WeightedEnsemble::new(&raw)?;
    debug_assert!((ens.state(0).dot(ens.state(1)) - gamma).abs() < 1e-12);
    Ok(ens)
}

/// Closed form for the symmetric family: `(1 + sqrt(2(r - gamma)/3)) / 3`.
pub fn symmetric_guess_formula(r: f64, gamma: f64) -> Result<f64> {
    let eps = crate::bloch::VALIDATION_EPS;
    if !(0.0..=1.0 + eps).contains(&r) || gamma > r + eps || gamma < -0.5 * r - eps {
        return Err(Error::Unrealizable { r, gamma });
    }
    Ok((1.0 + (2.0 * (r - gamma) / 3.0).max(0.0).sqrt()) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn zhat() -> BlochVector {
        BlochVector::new(0.0, 0.0, 1.0)
    }

    fn xhat() -> BlochVector {
        BlochVector::new(1.0, 0.0, 0.0)
    }

    fn trine_states() -> Vec<BlochVector> {
        (0..3)
            .map(|i| {
                let phi = 2.0 * PI * i as f64 / 3.0;
                BlochVector::new(phi.cos(), phi.sin(), 0.0)
            })
            .collect()
    }

    fn trine_ensemble() -> WeightedEnsemble {
        let vs = trine_states();
        WeightedEnsemble::new(&[(1.0 / 3.0, vs[0]), (1.0 / 3.0, vs[1]), (1.0 / 3.0, vs[2])])
            .unwrap()
    }

    #[test]
    fn point_three_identical() {
        let v = BlochVector::new(0.2, 0.1, 0.3);
        let ens =
            WeightedEnsemble::new(&[(1.0 / 3.0, v), (1.0 / 3.0, v), (1.0 / 3.0, v)]).unwrap();
        let sol = solve_point(&ens).unwrap();
        assert!((sol.p_guess - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(sol.povm.elements[0], PovmElement::Identity));
        assert!(sol.povm.elements[1].is_zero() && sol.povm.elements[2].is_zero());
        assert_eq!(sol.branch, Branch::Point);
    }

    #[test]
    fn point_two_copies_skewed() {
        // maximally mixed copies keep the weighted points coincident
        let ens = WeightedEnsemble::new(&[(0.9, BlochVector::ZERO), (0.1, BlochVector::ZERO)])
            .unwrap();
        let sol = solve_point(&ens).unwrap();
        assert!((sol.p_guess - 0.9).abs() < 1e-15);
    }

    #[test]
    fn point_five_identical() {
        let raw: Vec<(f64, BlochVector)> = [0.4, 0.3, 0.1, 0.1, 0.1]
            .iter()
            .map(|&q| (q, BlochVector::ZERO))
            .collect();
        let ens = WeightedEnsemble::new(&raw).unwrap();
        let sol = solve_point(&ens).unwrap();
        assert!((sol.p_guess - 0.4).abs() < 1e-15);
    }

    #[test]
    fn point_rejects_triangle() {
        assert!(matches!(
            solve_point(&trine_ensemble()),
            Err(Error::WrongShape { expected: "point", .. })
        ));
    }

    #[test]
    fn pair_orthogonal_equal_priors() {
        let out = solve_pair(0.5, zhat(), 0.5, -zhat());
        assert!(out.feasible);
        assert!((out.p_guess - 1.0).abs() < 1e-15);
        // complementary direction opposes the measured projector
        assert!(out.w_a.distance(-zhat()) < 1e-15);
        assert!(out.w_b.distance(zhat()) < 1e-15);
        assert!((out.r_a - 0.5).abs() < 1e-15 && (out.r_b - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pair_same_state_boundary() {
        let out = solve_pair(0.7, zhat(), 0.3, zhat());
        assert!(out.feasible); // d = 0.4 = gap, boundary counts as feasible
        assert!((out.p_guess - 0.7).abs() < 1e-15);
        assert!((out.r_a - 0.0).abs() < 1e-15);
    }

    #[test]
    fn pair_z_versus_x() {
        let out = solve_pair(0.5, zhat(), 0.5, xhat());
        let expected = 0.5 * (1.0 + std::f64::consts::SQRT_2 / 2.0);
        assert!((out.p_guess - expected).abs() < 1e-15);
    }

    #[test]
    fn pair_infeasible_below_gap() {
        let out = solve_pair(0.7, BlochVector::ZERO, 0.3, BlochVector::ZERO);
        assert!(!out.feasible);
        assert!((out.p_guess - 0.7).abs() < 1e-15);
    }

    #[test]
    fn pair_reduction_segment_three_states() {
        // u1 = 0.4 z, u2 = -0.3 z, u3 = 0: winning pair is (0, 1) with value 0.7
        let ens =
            WeightedEnsemble::new(&[(0.4, zhat()), (0.3, -zhat()), (0.3, BlochVector::ZERO)])
                .unwrap();
        let sol = solve_pair_reduction(&ens);
        assert_eq!(sol.branch, Branch::Pair { a: 0, b: 1 });
        assert!((sol.p_guess - 0.7).abs() < 1e-15);
        // explicit enumeration of all three pairs
        let values = [
            solve_pair(0.4, zhat(), 0.3, -zhat()).p_guess,
            solve_pair(0.4, zhat(), 0.3, BlochVector::ZERO).p_guess,
            solve_pair(0.3, -zhat(), 0.3, BlochVector::ZERO).p_guess,
        ];
        let max = values.iter().fold(f64::MIN, |a, &b| a.max(b));
        assert!((sol.p_guess - max).abs() < 1e-15);
    }

    #[test]
    fn pair_reduction_all_identical() {
        let v = BlochVector::new(0.0, 0.5, 0.0);
        let ens = WeightedEnsemble::new(&[(0.5, v), (0.3, v), (0.2, v)]).unwrap();
        let sol = solve_pair_reduction(&ens);
        assert!((sol.p_guess - 0.5).abs() < 1e-15);
        assert_eq!(sol.branch, Branch::Pair { a: 0, b: 1 });
    }

    #[test]
    fn triangle_geometry_trine() {
        let g = triangle_geometry(&trine_ensemble()).unwrap();
        let side = 3.0_f64.sqrt() / 3.0;
        assert!((g.l1 - side).abs() < 1e-12);
        assert!((g.l2 - side).abs() < 1e-12);
        assert!((g.l3 - side).abs() < 1e-12);
        assert!((g.e1).abs() < 1e-15 && (g.e2).abs() < 1e-15);
        assert!((g.theta1 - PI / 3.0).abs() < 1e-12);
        assert!((g.chi.unwrap() - PI / 6.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_geometry_skewed_coordinates() {
        // frozen from direct coordinate arithmetic on the weighted points;
        // the prior gaps are too large for the branches to meet, so the
        // instance routes to the pair reduction
        let vs = trine_states();
        let ens = WeightedEnsemble::new(&[(0.5, vs[0]), (0.3, vs[1]), (0.2, vs[2])]).unwrap();
        let g = triangle_geometry(&ens).unwrap();
        assert!((g.l1 - 0.49_f64.sqrt()).abs() < 1e-12);
        assert!((g.l2 - 0.39_f64.sqrt()).abs() < 1e-12);
        assert!((g.l3 - 0.19_f64.sqrt()).abs() < 1e-12);
        assert!((g.e1 - 0.2).abs() < 1e-15);
        assert!((g.e2 - 0.3).abs() < 1e-15);
        assert!(g.chi.is_none());
        assert!(!triangle_feasible(&g));
        assert!(matches!(solve_three(&ens).unwrap().branch, Branch::Pair { .. }));
    }

    #[test]
    fn triangle_geometry_isosceles_bisects() {
        let vs = trine_states();
        let ens = WeightedEnsemble::new(&[(0.4, vs[0]), (0.3, vs[1]), (0.3, vs[2])]).unwrap();
        let g = triangle_geometry(&ens).unwrap();
        assert!((g.e1 - g.e2).abs() < 1e-15);
        assert!((g.chi.unwrap() - g.theta1 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_feasible_trine() {
        let g = triangle_geometry(&trine_ensemble()).unwrap();
        assert!(triangle_feasible(&g));
    }

    #[test]
    fn triangle_infeasible_dominant_prior() {
        // nearly coincident states with a dominant prior: l1 < e1
        let v = BlochVector::new(0.6, 0.0, 0.0);
        let d1 = BlochVector::new(0.59, 0.1, 0.0);
        let d2 = BlochVector::new(0.59, -0.1, 0.0);
        let ens = WeightedEnsemble::new(&[(0.98, v), (0.01, d1), (0.01, d2)]).unwrap();
        let g = triangle_geometry(&ens).unwrap();
        assert!(g.l1 < g.e1);
        assert!(matches!(g.chi_angles(), Err(Error::DegenerateHyperbola { .. })));
        assert!(!triangle_feasible(&g));
        let sol = solve_three(&ens).unwrap();
        assert!(matches!(sol.branch, Branch::Pair { .. }));
        assert!((sol.p_guess - 0.98).abs() < 1e-12);
    }

    #[test]
    fn solve_triangle_trine() {
        let ens = trine_ensemble();
        let g = triangle_geometry(&ens).unwrap();
        let sol = solve_triangle(&ens, &g).unwrap();
        assert!((sol.p_guess - 2.0 / 3.0).abs() < 1e-12);
        let cs = sol.complementary.as_ref().unwrap();
        for i in 0..3 {
            assert!((cs.r[i] - 1.0 / 3.0).abs() < 1e-12);
            assert!(cs.w[i].distance(-ens.state(i)) < 1e-12);
            assert!((sol.povm.elements[i].weight() - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!(sol.povm.completeness_residual() < 1e-12);
    }

    #[test]
    fn solve_three_dispatch() {
        // identical states -> point
        let v = BlochVector::new(0.1, 0.2, 0.0);
        let ens =
            WeightedEnsemble::new(&[(1.0 / 3.0, v), (1.0 / 3.0, v), (1.0 / 3.0, v)]).unwrap();
        assert_eq!(solve_three(&ens).unwrap().branch, Branch::Point);

        // collinear weighted points -> pair
        let ens =
            WeightedEnsemble::new(&[(0.5, zhat()), (0.3, -zhat()), (0.2, zhat())]).unwrap();
        assert!(matches!(solve_three(&ens).unwrap().branch, Branch::Pair { .. }));

        // trine -> triangle
        let sol = solve_three(&trine_ensemble()).unwrap();
        assert_eq!(sol.branch, Branch::Triangle);
        assert!((sol.p_guess - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_ensemble_construction() {
        // planar trine: r = 1, gamma = -1/2
        let ens = make_symmetric_ensemble(1.0, -0.5).unwrap();
        assert!(ens.state(0).z.abs() < 1e-15);
        assert!((ens.state(0).dot(ens.state(1)) + 0.5).abs() < 1e-12);

        // r = gamma collapses to identical vectors
        let ens = make_symmetric_ensemble(0.5, 0.5).unwrap();
        assert!(ens.state(0).distance(ens.state(1)) < 1e-12);

        // overlaps as requested
        let ens = make_symmetric_ensemble(0.8, 0.2).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 0.8 } else { 0.2 };
                assert!((ens.state(i).dot(ens.state(j)) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn symmetric_ensemble_rejects_unrealizable() {
        assert!(matches!(
            make_symmetric_ensemble(0.5, 0.6),
            Err(Error::Unrealizable { .. })
        ));
        assert!(matches!(
            make_symmetric_ensemble(0.5, -0.3),
            Err(Error::Unrealizable { .. })
        ));
        assert!(matches!(
            make_symmetric_ensemble(1.2, 0.0),
            Err(Error::Unrealizable { .. })
        ));
    }

    #[test]
    fn symmetric_formula_values() {
        assert!((symmetric_guess_formula(1.0, -0.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((symmetric_guess_formula(0.4, 0.4).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let expected = (1.0 + 0.4_f64.sqrt()) / 3.0;
        assert!((symmetric_guess_formula(0.8, 0.2).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn symmetric_mixed_purity_matches_formula() {
        // tr rho^2 = 0.8 means |v|^2 = 0.6
        let (r, gamma) = (0.6, 0.15);
        let ens = make_symmetric_ensemble(r, gamma).unwrap();
        let sol = solve_three(&ens).unwrap();
        assert_eq!(sol.branch, Branch::Triangle);
        let formula = symmetric_guess_formula(r, gamma).unwrap();
        assert!((sol.p_guess - formula).abs() < 1e-12);
    }
}
