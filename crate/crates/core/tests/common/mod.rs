//! Shared test oracles, implemented independently of the library paths they
//! check: eigenvalue routes for trace norms, a bisection root-finder for the
//! intersection angle, coordinate-geometry and case-analysis oracles for the
//! feasibility conditions, and seeded instance generators.

#![allow(dead_code)]

use discrim_core::{BlochVector, Povm, PovmElement, WeightedEnsemble};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Eigenvalues of a Hermitian 2x2 matrix given as diagonal and off-diagonal
/// parts, `(lo, hi)`.
pub fn herm2_eigenvalues(m00: f64, m11: f64, re01: f64, im01: f64) -> (f64, f64) {
    let mean = 0.5 * (m00 + m11);
    let radius = (0.25 * (m00 - m11) * (m00 - m11) + re01 * re01 + im01 * im01).sqrt();
    (mean - radius, mean + radius)
}

/// Trace norm of `qa*rho_a - qb*rho_b` via explicit matrix entries and the
/// eigenvalue decomposition, bypassing the Bloch closed form.
pub fn trace_norm_eigen_oracle(qa: f64, va: BlochVector, qb: f64, vb: BlochVector) -> f64 {
    let m00 = qa * 0.5 * (1.0 + va.z) - qb * 0.5 * (1.0 + vb.z);
    let m11 = qa * 0.5 * (1.0 - va.z) - qb * 0.5 * (1.0 - vb.z);
    let re01 = 0.5 * (qa * va.x - qb * vb.x);
    let im01 = -0.5 * (qa * va.y - qb * vb.y);
    let (lo, hi) = herm2_eigenvalues(m00, m11, re01, im01);
    lo.abs() + hi.abs()
}

/// The branch-equality equation cross-multiplied into a pole-free form:
/// `F(chi) = A (l2 cos(theta1 - chi) + e2) - B (l1 cos(chi) + e1)` with
/// `A = l1^2 - e1^2`, `B = l2^2 - e2^2`. Strictly increasing on
/// `(0, theta1)`, so a sign change brackets the unique root.
pub fn chi_equation(l1: f64, l2: f64, e1: f64, e2: f64, theta1: f64, chi: f64) -> f64 {
    let a = l1 * l1 - e1 * e1;
    let b = l2 * l2 - e2 * e2;
    a * (l2 * (theta1 - chi).cos() + e2) - b * (l1 * chi.cos() + e1)
}

/// Bisection root-finder for the intersection angle; `None` when the
/// equation has no sign change over `(0, theta1)`.
pub fn bisect_chi(l1: f64, l2: f64, e1: f64, e2: f64, theta1: f64) -> Option<f64> {
    let f = |chi: f64| chi_equation(l1, l2, e1, e2, theta1, chi);
    let (mut lo, mut hi) = (0.0, theta1);
    if !(f(lo) < 0.0 && f(hi) > 0.0) {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// The four-case intersection analysis, classified by the signs of
/// `cos(theta1) + e1/l1` and `cos(theta1) + e2/l2`.
pub fn four_case_intersect(l1: f64, l2: f64, e1: f64, e2: f64, theta1: f64) -> bool {
    let c = theta1.cos();
    let x1 = c + e1 / l1;
    let x2 = c + e2 / l2;
    let lower = (l2 * c + e2) / (l2 + e2) < (l2 - e2) / (l1 - e1);
    let upper = (l2 - e2) / (l1 - e1) < (l1 + e1) / (l1 * c + e1);
    match (x1 > 0.0, x2 > 0.0) {
        (true, true) => lower && upper,
        (true, false) => upper,
        (false, true) => lower,
        (false, false) => true,
    }
}

/// Coordinate-geometry oracle for the point-in-triangle condition: places
/// the triangle explicitly, locates the intersection point from the
/// bisection angle, and tests strict barycentric positivity.
/// `None` when the branches do not meet.
pub fn origin_inside_oracle(l1: f64, l2: f64, e1: f64, e2: f64, theta1: f64) -> Option<bool> {
    let chi = bisect_chi(l1, l2, e1, e2, theta1)?;
    let r1 = (l1 * l1 - e1 * e1) / (2.0 * (l1 * chi.cos() + e1));
    if r1 <= 0.0 {
        return Some(false);
    }
    let (t2x, t2y) = (l1, 0.0);
    let (t3x, t3y) = (l2 * theta1.cos(), l2 * theta1.sin());
    let (ox, oy) = (r1 * chi.cos(), r1 * chi.sin());
    // barycentric coordinates with respect to T1=(0,0), T2, T3
    let det = t2x * t3y - t3x * t2y;
    let beta = (ox * t3y - t3x * oy) / det;
    let gamma = (t2x * oy - ox * t2y) / det;
    let alpha = 1.0 - beta - gamma;
    Some(alpha > 0.0 && beta > 0.0 && gamma > 0.0)
}

/// Random triangle side/gap data satisfying the ordering preconditions
/// (`e2 >= e1 >= 0`, gaps below their sides). The triangle itself comes
/// from two sides and the included angle, so it is always strict.
pub fn sample_triangle_geometry(rng: &mut ChaCha8Rng) -> (f64, f64, f64, f64, f64) {
    loop {
        let l1 = 0.05 + 1.95 * rng.gen::<f64>();
        let l2 = 0.05 + 1.95 * rng.gen::<f64>();
        let theta1 = 0.05 + (std::f64::consts::PI - 0.1) * rng.gen::<f64>();
        let e1 = rng.gen::<f64>() * 0.95 * l1;
        let e2 = e1 + rng.gen::<f64>() * (0.95 * l2 - e1);
        if e2 >= e1 && e2 < 0.95 * l2 {
            return (l1, l2, e1, e2, theta1);
        }
    }
}

/// Rotation matrix from a seeded axis-angle draw.
pub fn random_rotation(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    let z = 2.0 * rng.gen::<f64>() - 1.0;
    let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    let s = (1.0 - z * z).max(0.0).sqrt();
    let axis = [s * phi.cos(), s * phi.sin(), z];
    let angle = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    let (sin, cos) = angle.sin_cos();
    let omc = 1.0 - cos;
    let (x, y, z) = (axis[0], axis[1], axis[2]);
    [
        [cos + x * x * omc, x * y * omc - z * sin, x * z * omc + y * sin],
        [y * x * omc + z * sin, cos + y * y * omc, y * z * omc - x * sin],
        [z * x * omc - y * sin, z * y * omc + x * sin, cos + z * z * omc],
    ]
}

pub fn rotate(m: &[[f64; 3]; 3], v: BlochVector) -> BlochVector {
    BlochVector::new(
        m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
        m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
        m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
    )
}

pub fn rotate_ensemble(ens: &WeightedEnsemble, m: &[[f64; 3]; 3]) -> WeightedEnsemble {
    let raw: Vec<(f64, BlochVector)> =
        (0..ens.len()).map(|i| (ens.prior(i), rotate(m, ens.state(i)))).collect();
    WeightedEnsemble::new(&raw).unwrap()
}

/// A random valid POVM in Bloch form: Dirichlet weights, axes drawn in the
/// ball, then centered and shrunk so the elements stay positive and sum to
/// the identity.
pub fn random_valid_povm(rng: &mut ChaCha8Rng, n: usize) -> Povm {
    let mut weights: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = 1.0 - rng.gen::<f64>();
            (-u.ln()).max(1e-12)
        })
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut axes: Vec<BlochVector> = (0..n)
        .map(|_| {
            let z = 2.0 * rng.gen::<f64>() - 1.0;
            let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
            let radius = rng.gen::<f64>();
            let s = (1.0 - z * z).max(0.0).sqrt();
            BlochVector::new(s * phi.cos(), s * phi.sin(), z) * radius
        })
        .collect();
    let center = axes
        .iter()
        .zip(&weights)
        .fold(BlochVector::ZERO, |acc, (&a, &w)| acc + a * w);
    for a in &mut axes {
        *a = *a - center;
    }
    let max_norm = axes.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if max_norm > 1.0 {
        for a in &mut axes {
            *a = *a * (1.0 / max_norm);
        }
    }
    Povm {
        elements: weights
            .into_iter()
            .zip(axes)
            .map(|(weight, axis)| PovmElement::Projector { weight, axis })
            .collect(),
    }
}

/// Seeded three-state instances with guaranteed branch coverage: most seeds
/// draw fully random ensembles; dedicated modes build near-symmetric
/// (triangle-prone), point-shaped, and prior-dominated (pair-prone)
/// instances.
pub fn random_three_state(seed: u64) -> WeightedEnsemble {
    match seed % 10 {
        6 | 7 => {
            // near-equal priors and well-spread directions favor the
            // full-support triangle solution
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x2545f4914f6cdd1d);
            let mut qs = [0.0; 3];
            for q in &mut qs {
                *q = 1.0 + 0.2 * rng.gen::<f64>();
            }
            let total: f64 = qs.iter().sum();
            let base = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
            let raw: Vec<(f64, BlochVector)> = (0..3)
                .map(|i| {
                    let jitter = 0.5 * (rng.gen::<f64>() - 0.5);
                    let phi = base + 2.0 * std::f64::consts::PI * i as f64 / 3.0 + jitter;
                    let radius = 0.5 + 0.5 * rng.gen::<f64>();
                    let tilt = 0.3 * (rng.gen::<f64>() - 0.5);
                    let s = (1.0 - tilt * tilt).sqrt();
                    (
                        qs[i] / total,
                        BlochVector::new(s * phi.cos(), s * phi.sin(), tilt) * radius,
                    )
                })
                .collect();
            WeightedEnsemble::new(&raw).unwrap()
        }
        8 => {
            // identical states with equal priors: point polytope
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
            let z = 2.0 * rng.gen::<f64>() - 1.0;
            let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
            let radius = rng.gen::<f64>();
            let s = (1.0 - z * z).max(0.0).sqrt();
            let v = BlochVector::new(s * phi.cos(), s * phi.sin(), z) * radius;
            WeightedEnsemble::new(&[(1.0 / 3.0, v), (1.0 / 3.0, v), (1.0 / 3.0, v)]).unwrap()
        }
        9 => {
            // dominant prior forces the pair reduction
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x517cc1b727220a95);
            let q1 = 0.85 + 0.1 * rng.gen::<f64>();
            let q2 = (1.0 - q1) * (0.4 + 0.4 * rng.gen::<f64>());
            let q3 = 1.0 - q1 - q2;
            let mut state = || {
                let z = 2.0 * rng.gen::<f64>() - 1.0;
                let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
                let radius = rng.gen::<f64>();
                let s = (1.0 - z * z).max(0.0).sqrt();
                BlochVector::new(s * phi.cos(), s * phi.sin(), z) * radius
            };
            WeightedEnsemble::new(&[(q1, state()), (q2, state()), (q3, state())]).unwrap()
        }
        _ => discrim_core::random_ensemble(seed, 3, 0.0, 1.0),
    }
}
