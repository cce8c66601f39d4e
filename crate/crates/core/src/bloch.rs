//! Qubit states in the Bloch representation and the weighted-ensemble data model.
//!
//! A qubit density matrix rho = (I + v.sigma)/2 is carried either as the real
//! 3-vector `v` ([`BlochVector`]) or as the four real numbers of the Hermitian
//! matrix ([`QubitDensity`]). A discrimination instance is a [`WeightedEnsemble`]:
//! priors sorted descending with the permutation back to input order retained.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Slack for all physicality checks (unit trace, positivity, norms).
///
/// Double precision with headroom for accumulated arithmetic.
pub const VALIDATION_EPS: f64 = 1e-12;

/// A real 3-vector in the Pauli basis.
///
/// For a physical state the Euclidean norm is at most 1 (pure states sit on
/// the sphere); complementary-state directions are unit vectors. Neither
/// constraint is enforced by the type itself — validation happens where a
/// vector enters as a state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const ZERO: BlochVector = BlochVector { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector { x, y, z }
    }

    pub fn norm_squared(self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn dot(self, other: BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: BlochVector) -> BlochVector {
        BlochVector {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn distance(self, other: BlochVector) -> f64 {
        (self - other).norm()
    }

    /// Unit vector along `self`, or `None` when the norm is negligible.
    pub fn normalized(self) -> Option<BlochVector> {
        let n = self.norm();
        if n > 1e-12 {
            Some(self * (1.0 / n))
        } else {
            None
        }
    }

    pub fn as_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for BlochVector {
    fn from(a: [f64; 3]) -> Self {
        BlochVector::new(a[0], a[1], a[2])
    }
}

impl From<BlochVector> for [f64; 3] {
    fn from(v: BlochVector) -> Self {
        v.as_array()
    }
}

impl Add for BlochVector {
    type Output = BlochVector;
    fn add(self, rhs: BlochVector) -> BlochVector {
        BlochVector::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for BlochVector {
    type Output = BlochVector;
    fn sub(self, rhs: BlochVector) -> BlochVector {
        BlochVector::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for BlochVector {
    type Output = BlochVector;
    fn neg(self) -> BlochVector {
        BlochVector::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for BlochVector {
    type Output = BlochVector;
    fn mul(self, s: f64) -> BlochVector {
        BlochVector::new(self.x * s, self.y * s, self.z * s)
    }
}

/// A 2x2 Hermitian density matrix stored as four reals:
/// the two diagonal entries and the (0,1) entry split into real and
/// imaginary parts. The (1,0) entry is the conjugate by construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitDensity {
    pub rho00: f64,
    pub rho11: f64,
    pub rho01_re: f64,
    pub rho01_im: f64,
}

impl QubitDensity {
    /// Validates unit trace and positivity (both eigenvalues >= -eps).
    pub fn new(rho00: f64, rho11: f64, rho01_re: f64, rho01_im: f64) -> Result<Self> {
        let rho = QubitDensity { rho00, rho11, rho01_re, rho01_im };
        if !(rho.trace() - 1.0).abs().is_finite() || (rho.trace() - 1.0).abs() > VALIDATION_EPS {
            return Err(Error::NonPhysicalDensity(format!("trace is {}", rho.trace())));
        }
        let (lo, _) = rho.eigenvalues();
        if !lo.is_finite() || lo < -VALIDATION_EPS {
            return Err(Error::NonPhysicalDensity(format!("eigenvalue {} is negative", lo)));
        }
        Ok(rho)
    }

    pub(crate) fn new_unchecked(rho00: f64, rho11: f64, rho01_re: f64, rho01_im: f64) -> Self {
        QubitDensity { rho00, rho11, rho01_re, rho01_im }
    }

    pub fn trace(&self) -> f64 {
        self.rho00 + self.rho11
    }

    /// Eigenvalues `(lo, hi)` of the Hermitian matrix.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.rho00 + self.rho11);
        let half_gap = 0.5 * (self.rho00 - self.rho11);
        let off = self.rho01_re * self.rho01_re + self.rho01_im * self.rho01_im;
        let radius = (half_gap * half_gap + off).sqrt();
        (mean - radius, mean + radius)
    }
}

/// Bloch vector of a density matrix: rho = (I + v.sigma)/2.
pub fn density_to_bloch(rho: &QubitDensity) -> BlochVector {
    BlochVector::new(2.0 * rho.rho01_re, -2.0 * rho.rho01_im, rho.rho00 - rho.rho11)
}

/// Density matrix of a Bloch vector; fails when `v` leaves the unit ball.
pub fn bloch_to_density(v: BlochVector) -> Result<QubitDensity> {
    let norm = v.norm();
    if !norm.is_finite() || norm > 1.0 + VALIDATION_EPS {
        return Err(Error::NonPhysicalBloch { norm });
    }
    Ok(QubitDensity::new_unchecked(
        0.5 * (1.0 + v.z),
        0.5 * (1.0 - v.z),
        0.5 * v.x,
        -0.5 * v.y,
    ))
}

/// Trace norm of the weighted difference `qa*rho_a - qb*rho_b`.
///
/// For a 2x2 Hermitian A = a0*I + a.sigma the trace norm is
/// |a0 + |a|| + |a0 - |a||, with a0 = (qa - qb)/2 and a = (qa*va - qb*vb)/2.
pub fn trace_norm_weighted_diff(qa: f64, va: BlochVector, qb: f64, vb: BlochVector) -> f64 {
    let a0 = 0.5 * (qa - qb);
    let a = (va * qa - vb * qb) * 0.5;
    let r = a.norm();
    (a0 + r).abs() + (a0 - r).abs()
}

/// One member of a discrimination instance.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EnsembleEntry {
    pub prior: f64,
    pub state: BlochVector,
}

/// A discrimination instance `{q_i, rho_i}` with priors sorted descending.
///
/// `original_index()[k]` is the input position of the state now at sorted
/// position `k`. Prior ties keep input order (stable sort).
#[derive(Clone, Debug, Serialize)]
pub struct WeightedEnsemble {
    entries: Vec<EnsembleEntry>,
    original_index: Vec<usize>,
}

impl WeightedEnsemble {
    /// Validates and normalises raw `(prior, state)` pairs.
    ///
    /// Priors must be strictly positive and sum to 1 within [`VALIDATION_EPS`].
    /// States with norm in `(1, 1 + eps]` are renormalised onto the sphere to
    /// absorb input rounding; anything beyond is rejected.
    pub fn new(raw: &[(f64, BlochVector)]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::BadPriors("ensemble is empty".into()));
        }
        let mut sum = 0.0;
        for &(q, _) in raw {
            if !q.is_finite() || q <= 0.0 {
                return Err(Error::BadPriors(format!("prior {} is not strictly positive", q)));
            }
            sum += q;
        }
        if (sum - 1.0).abs() > VALIDATION_EPS {
            return Err(Error::BadPriors(format!("priors sum to {}", sum)));
        }

        let mut entries = Vec::with_capacity(raw.len());
        for &(prior, state) in raw {
            let norm = state.norm();
            if !norm.is_finite() || norm > 1.0 + VALIDATION_EPS {
                return Err(Error::NonPhysicalBloch { norm });
            }
            let state = if norm > 1.0 { state * (1.0 / norm) } else { state };
            entries.push(EnsembleEntry { prior, state });
        }

        let mut order: Vec<usize> = (0..entries.len()).collect();
        order.sort_by(|&a, &b| entries[b].prior.partial_cmp(&entries[a].prior).unwrap());
        let entries = order.iter().map(|&i| entries[i]).collect();
        Ok(WeightedEnsemble { entries, original_index: order })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[EnsembleEntry] {
        &self.entries
    }

    pub fn prior(&self, i: usize) -> f64 {
        self.entries[i].prior
    }

    pub fn state(&self, i: usize) -> BlochVector {
        self.entries[i].state
    }

    /// The weighted Bloch point `u_i = q_i * v_i`.
    pub fn weighted_point(&self, i: usize) -> BlochVector {
        self.entries[i].state * self.entries[i].prior
    }

    pub fn weighted_points(&self) -> Vec<BlochVector> {
        (0..self.len()).map(|i| self.weighted_point(i)).collect()
    }

    /// Input position of the state at sorted position `k`.
    pub fn original_index(&self) -> &[usize] {
        &self.original_index
    }

    /// Sub-ensemble on `indices` (positions in sorted order) with priors
    /// renormalised by the retained mass; returns the mass alongside.
    pub fn subset(&self, indices: &[usize]) -> Result<(WeightedEnsemble, f64)> {
        let mass: f64 = indices.iter().map(|&i| self.prior(i)).sum();
        let raw: Vec<(f64, BlochVector)> = indices
            .iter()
            .map(|&i| (self.prior(i) / mass, self.state(i)))
            .collect();
        Ok((WeightedEnsemble::new(&raw)?, mass))
    }
}
