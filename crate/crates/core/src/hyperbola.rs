//! Hyperbola-branch geometry behind the triangle feasibility analysis.
//!
//! For two foci at distance `l`, the locus where the focal-distance
//! difference equals `e` is one hyperbola branch; its radius at angle
//! `theta` from the focal axis is `(l^2 - e^2) / (2 (l cos(theta) + e))`.
//! Two such branches drawn from a shared triangle vertex meet in at most one
//! point inside the vertex wedge, located by the angle `chi`; the
//! feasibility conditions decide whether that point exists and lies inside
//! the triangle.

use serde::Serialize;

use crate::error::{Error, Result};

/// Arccos arguments within this distance of +-1 are clamped; beyond it the
/// branches are declared non-intersecting.
const ARCCOS_CLAMP: f64 = 1e-12;

fn clamped_acos(x: f64) -> Option<f64> {
    if !x.is_finite() || x.abs() > 1.0 + ARCCOS_CLAMP {
        None
    } else {
        Some(x.clamp(-1.0, 1.0).acos())
    }
}

/// Radius of the hyperbola branch at angle `theta` from the focal axis.
///
/// The branch is the locus where (distance to the far focus) minus
/// (distance to the near focus) equals `e`, with foci `l` apart.
pub fn hyperbola_radius(l: f64, e: f64, theta: f64) -> Result<f64> {
    if l <= e {
        return Err(Error::DegenerateHyperbola { l, e });
    }
    let denom = l * theta.cos() + e;
    if denom <= 0.0 {
        return Err(Error::UnboundedHyperbola { theta });
    }
    Ok((l * l - e * e) / (2.0 * denom))
}

/// Whether the two branches meet inside the vertex wedge, by the two
/// restrictive inequalities equivalent to the four-case analysis.
///
/// Requires `l1 > e1` and `l2 > e2`.
pub fn curves_intersect(l1: f64, l2: f64, e1: f64, e2: f64, theta1: f64) -> bool {
    let c = theta1.cos();
    (l1 * c + e1) / (l1 + e1) < (l1 - e1) / (l2 - e2)
        && (l2 * c + e2) / (l2 + e2) < (l2 - e2) / (l1 - e1)
}

/// The angle `chi` of the branch intersection point, measured at the shared
/// vertex from the first side, together with the two auxiliary angles it is
/// the difference of: `chi = chi2 - chi1`.
///
/// Fails with [`Error::NoIntersection`] when the arccos arguments leave
/// `[-1, 1]` beyond the clamping slack or the resulting angle falls outside
/// `(0, theta1)` — both signal an empty intersection.
pub fn compute_chi(l1: f64, l2: f64, e1: f64, e2: f64, theta1: f64) -> Result<(f64, f64, f64)> {
    if l1 <= e1 {
        return Err(Error::DegenerateHyperbola { l: l1, e: e1 });
    }
    if l2 <= e2 {
        return Err(Error::DegenerateHyperbola { l: l2, e: e2 });
    }
    let a = l1 * l1 - e1 * e1;
    let b = l2 * l2 - e2 * e2;
    let (s1, c1) = theta1.sin_cos();
    // |P - Q| for P = l1*b along the first side, Q = l2*a along the second,
    // computed componentwise to avoid cancellation in the radicand.
    let d = f64::hypot(l1 * b - l2 * a * c1, l2 * a * s1);
    if d <= 0.0 || !d.is_finite() {
        return Err(Error::NoIntersection);
    }
    let chi1 = clamped_acos((l1 * b - l2 * a * c1) / d).ok_or(Error::NoIntersection)?;
    let chi2 = clamped_acos((e2 * a - e1 * b) / d).ok_or(Error::NoIntersection)?;
    let chi = chi2 - chi1;
    if chi <= 0.0 || chi >= theta1 {
        return Err(Error::NoIntersection);
    }
    Ok((chi1, chi2, chi))
}

/// Side lengths, prior gaps, and angles of the intrinsic triangle.
///
/// Vertices follow the sorted-prior order: `l1` and `l2` are the sides from
/// the first vertex, `l3` the opposite side, `e1 = q1 - q2`, `e2 = q1 - q3`.
/// The intersection angles are cached when they exist; an infeasible
/// geometry keeps its lengths and angles with `chi = None`.
#[derive(Clone, Debug, Serialize)]
pub struct TriangleGeometry {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub e1: f64,
    pub e2: f64,
    /// Interior angle at the first vertex (radians).
    pub theta1: f64,
    /// Interior angle at the second vertex (radians).
    pub theta2: f64,
    pub chi1: Option<f64>,
    pub chi2: Option<f64>,
    /// Angle from the first side to the branch intersection point.
    pub chi: Option<f64>,
}

impl TriangleGeometry {
    /// Builds the geometry from side lengths and prior gaps; fails only when
    /// the sides do not form a strict triangle.
    pub fn from_sides(l1: f64, l2: f64, l3: f64, e1: f64, e2: f64) -> Result<Self> {
        if !(l1 < l2 + l3 && l2 < l1 + l3 && l3 < l1 + l2) || l1 <= 0.0 || l2 <= 0.0 || l3 <= 0.0
        {
            return Err(Error::WrongShape {
                expected: "strict triangle",
                found: format!("sides ({l1}, {l2}, {l3})"),
            });
        }
        let theta1 = clamped_acos((l1 * l1 + l2 * l2 - l3 * l3) / (2.0 * l1 * l2))
            .expect("law of cosines argument in range for a strict triangle");
        let theta2 = clamped_acos((l1 * l1 + l3 * l3 - l2 * l2) / (2.0 * l1 * l3))
            .expect("law of cosines argument in range for a strict triangle");
        let chi = compute_chi(l1, l2, e1, e2, theta1).ok();
        Ok(TriangleGeometry {
            l1,
            l2,
            l3,
            e1,
            e2,
            theta1,
            theta2,
            chi1: chi.map(|c| c.0),
            chi2: chi.map(|c| c.1),
            chi: chi.map(|c| c.2),
        })
    }

    /// The `(chi1, chi2, chi)` triple, failing as [`compute_chi`] does.
    pub fn chi_angles(&self) -> Result<(f64, f64, f64)> {
        compute_chi(self.l1, self.l2, self.e1, self.e2, self.theta1)
    }

    /// Condition (ii) of the feasibility test on this triangle's data.
    pub fn curves_intersect(&self) -> bool {
        curves_intersect(self.l1, self.l2, self.e1, self.e2, self.theta1)
    }

    /// Distance from the first vertex to the branch intersection point.
    pub fn intersection_radius(&self) -> Result<f64> {
        let (_, _, chi) = self.chi_angles()?;
        hyperbola_radius(self.l1, self.e1, chi)
    }
}

/// Whether the intersection point at distance `r1` down the `chi` ray lies
/// strictly inside the triangle: the segment to it must be shorter than the
/// chord from the first vertex through it to the opposite side.
pub fn origin_inside_triangle(g: &TriangleGeometry, r1: f64) -> bool {
    let Some(chi) = g.chi else { return false };
    let s = (chi + g.theta2).sin();
    if s <= 0.0 {
        // chord endpoint recedes to infinity along the ray
        return true;
    }
    r1 < g.l1 * g.theta2.sin() / s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const DEG: f64 = PI / 180.0;

    #[test]
    fn radius_zero_gap() {
        // e = 0 reduces to l / (2 cos(theta))
        let r = hyperbola_radius(1.0, 0.0, 60.0 * DEG).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn radius_on_axis() {
        let r = hyperbola_radius(1.0, 0.5, 0.0).unwrap();
        assert!((r - 0.25).abs() < 1e-15);
    }

    #[test]
    fn radius_right_angle() {
        // (4 - 0.16) / (2 * 0.4) = 4.8; the constructed point has r' - r = e
        let r = hyperbola_radius(2.0, 0.4, 90.0 * DEG).unwrap();
        assert!((r - 4.8).abs() < 1e-12);
        let (px, py) = (r * (90.0 * DEG).cos(), r * (90.0 * DEG).sin());
        let r_far = f64::hypot(px - 2.0, py);
        assert!((r_far - r - 0.4).abs() < 1e-12);
    }

    #[test]
    fn radius_degenerate() {
        assert!(matches!(
            hyperbola_radius(0.5, 0.5, 0.3),
            Err(Error::DegenerateHyperbola { .. })
        ));
        assert!(matches!(
            hyperbola_radius(0.4, 0.5, 0.3),
            Err(Error::DegenerateHyperbola { .. })
        ));
    }

    #[test]
    fn radius_unbounded() {
        assert!(matches!(
            hyperbola_radius(1.0, 0.1, 170.0 * DEG),
            Err(Error::UnboundedHyperbola { .. })
        ));
    }

    #[test]
    fn chi_equilateral() {
        let (chi1, chi2, chi) = compute_chi(1.0, 1.0, 0.0, 0.0, 60.0 * DEG).unwrap();
        assert!((chi1 - 60.0 * DEG).abs() < 1e-12);
        assert!((chi2 - 90.0 * DEG).abs() < 1e-12);
        assert!((chi - 30.0 * DEG).abs() < 1e-12);
    }

    #[test]
    fn chi_isosceles_equal_gaps_bisects() {
        for theta1 in [40.0 * DEG, 75.0 * DEG, 110.0 * DEG] {
            let (_, _, chi) = compute_chi(0.8, 0.8, 0.2, 0.2, theta1).unwrap();
            assert!((chi - theta1 / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn chi_satisfies_branch_equation() {
        let (l1, l2, e1, e2, theta1) = (0.5, 0.4, 0.1, 0.15, 70.0 * DEG);
        assert!(curves_intersect(l1, l2, e1, e2, theta1));
        let (_, _, chi) = compute_chi(l1, l2, e1, e2, theta1).unwrap();
        let lhs = hyperbola_radius(l1, e1, chi).unwrap();
        let rhs = hyperbola_radius(l2, e2, theta1 - chi).unwrap();
        assert!((lhs - rhs).abs() < 1e-10 * lhs.max(rhs));
    }

    #[test]
    fn chi_and_intersection_test_agree_on_failure() {
        // first restrictive inequality fails: thin wedge with large gaps
        let cases = [
            (0.5, 2.0, 0.45, 0.45, 30.0 * DEG),
            // second restrictive inequality fails: skewed gaps
            (0.5, 0.4, 0.1, 0.2, 70.0 * DEG),
        ];
        for (l1, l2, e1, e2, theta1) in cases {
            assert!(!curves_intersect(l1, l2, e1, e2, theta1));
            assert!(matches!(
                compute_chi(l1, l2, e1, e2, theta1),
                Err(Error::NoIntersection)
            ));
        }
    }

    #[test]
    fn intersection_zero_gaps() {
        // equal sides with zero gaps always meet (cos(theta1) < 1)
        assert!(curves_intersect(1.0, 1.0, 0.0, 0.0, 60.0 * DEG));
        for theta1 in [10.0 * DEG, 90.0 * DEG, 170.0 * DEG] {
            assert!(curves_intersect(0.9, 0.9, 0.0, 0.0, theta1));
        }
        // with unequal sides the circumcenter can leave the vertex wedge:
        // a thin triangle has no intersection even at zero gaps
        assert!(!curves_intersect(0.7, 1.3, 0.0, 0.0, 10.0 * DEG));
        assert!(matches!(
            compute_chi(0.7, 1.3, 0.0, 0.0, 10.0 * DEG),
            Err(Error::NoIntersection)
        ));
    }

    #[test]
    fn origin_test_equilateral() {
        // r1 = l/sqrt(3) against the chord l*sin(60)/sin(90) = l*sqrt(3)/2
        let g = TriangleGeometry::from_sides(1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        let r1 = g.intersection_radius().unwrap();
        assert!((r1 - 1.0 / 3.0_f64.sqrt()).abs() < 1e-12);
        assert!(origin_inside_triangle(&g, r1));
    }

    #[test]
    fn origin_test_obtuse_circumcenter_outside() {
        // zero gaps make the intersection the circumcenter, which lies
        // outside an obtuse triangle
        let theta1 = 150.0 * DEG;
        let l3 = (1.0 + 1.0 - 2.0 * theta1.cos()).sqrt();
        let g = TriangleGeometry::from_sides(1.0, 1.0, l3, 0.0, 0.0).unwrap();
        let r1 = g.intersection_radius().unwrap();
        assert!(!origin_inside_triangle(&g, r1));
    }

    #[test]
    fn from_sides_rejects_degenerate_triangle() {
        assert!(matches!(
            TriangleGeometry::from_sides(1.0, 1.0, 2.0, 0.0, 0.0),
            Err(Error::WrongShape { .. })
        ));
    }

    #[test]
    fn from_sides_keeps_lengths_when_gap_reaches_side() {
        let g = TriangleGeometry::from_sides(0.5, 0.8, 0.9, 0.5, 0.5).unwrap();
        assert!(g.chi.is_none());
        assert!(matches!(g.chi_angles(), Err(Error::DegenerateHyperbola { .. })));
    }
}
