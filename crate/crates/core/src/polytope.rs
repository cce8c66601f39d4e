//! The intrinsic polytope of weighted Bloch points and its extreme-point structure.
//!
//! The convex hull of the points `u_i = q_i * v_i` drives the solver dispatch:
//! a point, a segment, and a triangle each have a closed form, anything with
//! four or more extreme points goes to the numeric path.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::fmt;

use crate::bloch::{BlochVector, WeightedEnsemble};

/// Relative geometric tolerance for hull classification.
///
/// Below this, segment-versus-triangle classification is numerically
/// meaningless and the solver falls to the lower-dimensional branch, whose
/// answer is a valid lower bound checked against the oracle.
pub const GEOMETRY_EPS: f64 = 1e-9;

/// Extreme-point structure of the intrinsic polytope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolytopeShape {
    Point,
    Segment { a: usize, b: usize },
    Triangle { a: usize, b: usize, c: usize },
    Higher { extreme_count: usize },
}

impl fmt::Display for PolytopeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolytopeShape::Point => write!(f, "point"),
            PolytopeShape::Segment { a, b } => write!(f, "segment({a},{b})"),
            PolytopeShape::Triangle { a, b, c } => write!(f, "triangle({a},{b},{c})"),
            PolytopeShape::Higher { extreme_count } => write!(f, "higher({extreme_count})"),
        }
    }
}

/// Convex hull data of the weighted Bloch points.
#[derive(Clone, Debug, Serialize)]
pub struct IntrinsicPolytope {
    /// The points `u_i = q_i * v_i` in ensemble (sorted) order.
    pub points: Vec<BlochVector>,
    /// Indices of the extreme points, ascending. Duplicate points collapse
    /// to the lowest participating index.
    pub extreme_indices: Vec<usize>,
    pub shape: PolytopeShape,
}

/// Exact Euclidean projection of `p` onto the convex hull of `hull`:
/// the nearest hull point and its distance.
///
/// Enumerates candidate supports of size at most 4 (Caratheodory in 3-D),
/// projects onto each affine hull, and keeps the nearest projection with
/// nonnegative barycentric coordinates. Intended for small point sets.
pub fn hull_projection(p: BlochVector, hull: &[BlochVector]) -> (BlochVector, f64) {
    assert!(!hull.is_empty(), "hull must contain at least one point");
    let n = hull.len();
    let mut best_point = hull[0];
    let mut best = p.distance(hull[0]);
    for &x in &hull[1..] {
        let d = p.distance(x);
        if d < best {
            best = d;
            best_point = x;
        }
    }
    // supports of size 2..=4
    let masks = 1u32 << n;
    for mask in 1..masks {
        let k = mask.count_ones() as usize;
        if !(2..=4).contains(&k) {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let base = hull[idx[0]];
        let cols = k - 1;
        let mut b = DMatrix::<f64>::zeros(3, cols);
        for (c, &i) in idx[1..].iter().enumerate() {
            let e = hull[i] - base;
            b[(0, c)] = e.x;
            b[(1, c)] = e.y;
            b[(2, c)] = e.z;
        }
        let rhs_v = p - base;
        let rhs = DVector::from_column_slice(&[rhs_v.x, rhs_v.y, rhs_v.z]);
        let gram = b.transpose() * &b;
        let bt_rhs = b.transpose() * &rhs;
        let Some(t) = gram.lu().solve(&bt_rhs) else { continue };
        let lam0 = 1.0 - t.iter().sum::<f64>();
        if lam0 < -1e-12 || t.iter().any(|&l| l < -1e-12) {
            continue;
        }
        let proj = &b * &t;
        let y = base + BlochVector::new(proj[0], proj[1], proj[2]);
        let d = p.distance(y);
        if d < best {
            best = d;
            best_point = y;
        }
    }
    (best_point, best)
}

/// Exact Euclidean distance from `p` to the convex hull of `hull`.
pub fn distance_to_hull(p: BlochVector, hull: &[BlochVector]) -> f64 {
    hull_projection(p, hull).1
}

/// Affine dimension of a point set: rank of the centered point matrix with
/// singular values thresholded at `eps * (max point norm + 1)`.
pub fn affine_dimension(points: &[BlochVector], eps: f64) -> usize {
    assert!(!points.is_empty(), "point list must be nonempty");
    if points.len() == 1 {
        return 0;
    }
    let n = points.len();
    let inv = 1.0 / n as f64;
    let mean = points.iter().fold(BlochVector::ZERO, |acc, &p| acc + p) * inv;
    let mut m = DMatrix::<f64>::zeros(3, n);
    for (c, &p) in points.iter().enumerate() {
        let d = p - mean;
        m[(0, c)] = d.x;
        m[(1, c)] = d.y;
        m[(2, c)] = d.z;
    }
    let scale = points.iter().map(|p| p.norm()).fold(0.0, f64::max) + 1.0;
    let sv = m.svd(false, false).singular_values;
    sv.iter().filter(|&&s| s > eps * scale).count().min(3)
}

/// Builds the intrinsic polytope of `ens` and classifies its shape.
pub fn build_polytope(ens: &WeightedEnsemble, eps: f64) -> IntrinsicPolytope {
    let points = ens.weighted_points();
    let n = points.len();
    let scale = points.iter().map(|p| p.norm()).fold(0.0, f64::max) + 1.0;
    let tol = eps * scale;

    // collapse duplicates onto the lowest participating index
    let mut reps: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        if !reps.iter().any(|&r| points[i].distance(points[r]) < tol) {
            reps.push(i);
        }
    }

    let mut extreme: Vec<usize> = if reps.len() == 1 {
        reps.clone()
    } else {
        reps.iter()
            .copied()
            .filter(|&i| {
                let others: Vec<BlochVector> =
                    reps.iter().filter(|&&r| r != i).map(|&r| points[r]).collect();
                distance_to_hull(points[i], &others) > tol
            })
            .collect()
    };
    if extreme.is_empty() {
        extreme = vec![reps[0]];
    }

    let shape = match extreme.len() {
        1 => PolytopeShape::Point,
        2 => PolytopeShape::Segment { a: extreme[0], b: extreme[1] },
        3 => {
            let (a, b, c) = (extreme[0], extreme[1], extreme[2]);
            let ea = points[b] - points[a];
            let eb = points[c] - points[a];
            let max_edge = ea.norm().max(eb.norm()).max((points[c] - points[b]).norm());
            if ea.cross(eb).norm() > tol * max_edge {
                PolytopeShape::Triangle { a, b, c }
            } else {
                // near-collinear sliver: keep the extreme pair of maximal separation
                let pairs = [(a, b), (a, c), (b, c)];
                let &(pa, pb) = pairs
                    .iter()
                    .max_by(|&&(i, j), &&(k, l)| {
                        points[i]
                            .distance(points[j])
                            .partial_cmp(&points[k].distance(points[l]))
                            .unwrap()
                    })
                    .unwrap();
                extreme = vec![pa, pb];
                PolytopeShape::Segment { a: pa, b: pb }
            }
        }
        k => PolytopeShape::Higher { extreme_count: k },
    };

    IntrinsicPolytope { points, extreme_indices: extreme, shape }
}
