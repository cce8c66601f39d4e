//! Report structures. All per-state data is presented in the order of the
//! input file; indices inside branch and shape tags are input positions.

use serde::{Deserialize, Serialize};

use discrim_core::{
    kkt_residuals, BlochVector, Branch, ComplementarySolution, DiscriminationSolution,
    IntrinsicPolytope, PolytopeShape, Povm, PovmElement, TriangleGeometry, WeightedEnsemble,
};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

pub fn tool_info() -> ToolInfo {
    ToolInfo { name: "discrim".into(), version: env!("CARGO_PKG_VERSION").into() }
}

#[derive(Serialize, Deserialize)]
pub struct InputInfo {
    pub digest: String,
    pub states: usize,
}

#[derive(Serialize, Deserialize)]
pub struct BranchInfo {
    pub kind: String,
    /// Input-order indices of the states the branch singles out, if any.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub indices: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
pub struct PolytopeInfo {
    pub shape: String,
    pub extreme_indices: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
pub struct TriangleInfo {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub e1: f64,
    pub e2: f64,
    pub theta1_rad: f64,
    pub theta1_deg: f64,
    pub theta2_rad: f64,
    pub theta2_deg: f64,
    pub chi_rad: Option<f64>,
    pub chi_deg: Option<f64>,
    pub chi1_rad: Option<f64>,
    pub chi2_rad: Option<f64>,
    pub feasible: bool,
    pub failed_condition: Option<String>,
}

#[derive(Serialize, Deserialize)]
pub struct PovmInfo {
    pub kind: String,
    pub weight: f64,
    pub axis: [f64; 3],
    pub matrix: [[[f64; 2]; 2]; 2],
}

#[derive(Serialize, Deserialize)]
pub struct ComplementaryInfo {
    pub r: f64,
    pub w: [f64; 3],
    pub free: bool,
}

#[derive(Serialize, Deserialize)]
pub struct StateReport {
    pub index: usize,
    pub prior: f64,
    pub bloch: [f64; 3],
    pub povm: PovmInfo,
    pub complementary: Option<ComplementaryInfo>,
}

#[derive(Serialize, Deserialize)]
pub struct CertificateInfo {
    pub k0: f64,
    pub k: [f64; 3],
}

#[derive(Serialize, Deserialize)]
pub struct ResidualBlock {
    pub povm_completeness: f64,
    pub povm_positivity: f64,
    pub kkt_pair_operator: Option<f64>,
    pub kkt_slackness: Option<f64>,
    pub primal_value: f64,
    pub oracle_value: Option<f64>,
    pub duality_gap: Option<f64>,
}

#[derive(Serialize, Deserialize)]
pub struct SolutionReport {
    pub schema: u32,
    pub tool: ToolInfo,
    pub input: InputInfo,
    pub seed: Option<u64>,
    pub p_guess: f64,
    pub branch: BranchInfo,
    pub polytope: PolytopeInfo,
    pub triangle: Option<TriangleInfo>,
    pub states: Vec<StateReport>,
    pub certificate: CertificateInfo,
    pub residuals: ResidualBlock,
}

pub fn branch_info(branch: &Branch, to_input: &[usize]) -> BranchInfo {
    match branch {
        Branch::Point => BranchInfo { kind: "point".into(), indices: vec![to_input[0]] },
        Branch::Pair { a, b } => {
            BranchInfo { kind: "pair".into(), indices: vec![to_input[*a], to_input[*b]] }
        }
        Branch::Triangle => BranchInfo { kind: "triangle".into(), indices: vec![] },
        Branch::Subset { indices } => {
            let mut mapped: Vec<usize> = indices.iter().map(|&i| to_input[i]).collect();
            mapped.sort_unstable();
            BranchInfo { kind: "subset".into(), indices: mapped }
        }
        Branch::Numeric => BranchInfo { kind: "numeric".into(), indices: vec![] },
    }
}

pub fn polytope_info(poly: &IntrinsicPolytope, to_input: &[usize]) -> PolytopeInfo {
    let shape = match poly.shape {
        PolytopeShape::Point => "point".to_string(),
        PolytopeShape::Segment { a, b } => {
            let mut pair = [to_input[a], to_input[b]];
            pair.sort_unstable();
            format!("segment({},{})", pair[0], pair[1])
        }
        PolytopeShape::Triangle { a, b, c } => {
            let mut tri = [to_input[a], to_input[b], to_input[c]];
            tri.sort_unstable();
            format!("triangle({},{},{})", tri[0], tri[1], tri[2])
        }
        PolytopeShape::Higher { extreme_count } => format!("higher({extreme_count})"),
    };
    let mut extreme: Vec<usize> = poly.extreme_indices.iter().map(|&i| to_input[i]).collect();
    extreme.sort_unstable();
    PolytopeInfo { shape, extreme_indices: extreme }
}

/// Which feasibility condition rules the triangle solution out, if any.
pub fn failed_condition(g: &TriangleGeometry) -> Option<String> {
    if g.l1 <= g.e1 {
        return Some("infeasible: l1 <= e1".into());
    }
    if g.l2 <= g.e2 {
        return Some("infeasible: l2 <= e2".into());
    }
    if !g.curves_intersect() {
        return Some("infeasible: hyperbola branches do not intersect".into());
    }
    match g.intersection_radius() {
        Ok(r1) if discrim_core::origin_inside_triangle(g, r1) => None,
        _ => Some("infeasible: intersection point lies outside the triangle".into()),
    }
}

pub fn triangle_info(g: &TriangleGeometry) -> TriangleInfo {
    let deg = 180.0 / std::f64::consts::PI;
    let failed = failed_condition(g);
    TriangleInfo {
        l1: g.l1,
        l2: g.l2,
        l3: g.l3,
        e1: g.e1,
        e2: g.e2,
        theta1_rad: g.theta1,
        theta1_deg: g.theta1 * deg,
        theta2_rad: g.theta2,
        theta2_deg: g.theta2 * deg,
        chi_rad: g.chi,
        chi_deg: g.chi.map(|c| c * deg),
        chi1_rad: g.chi1,
        chi2_rad: g.chi2,
        feasible: failed.is_none(),
        failed_condition: failed,
    }
}

fn povm_info(el: &PovmElement) -> PovmInfo {
    let kind = match el {
        PovmElement::Zero => "zero",
        PovmElement::Identity => "identity",
        PovmElement::Projector { .. } => "projector",
    };
    PovmInfo {
        kind: kind.into(),
        weight: el.weight(),
        axis: el.bloch_axis().as_array(),
        matrix: el.matrix(),
    }
}

/// Per-state blocks in input order.
pub fn state_reports(
    ens: &WeightedEnsemble,
    solution: &DiscriminationSolution,
) -> Vec<StateReport> {
    let n = ens.len();
    let mut out: Vec<Option<StateReport>> = (0..n).map(|_| None).collect();
    for sorted in 0..n {
        let input = ens.original_index()[sorted];
        let complementary = solution.complementary.as_ref().map(|cs| ComplementaryInfo {
            r: cs.r[sorted],
            w: cs.w[sorted].as_array(),
            free: cs.free[sorted],
        });
        out[input] = Some(StateReport {
            index: input,
            prior: ens.prior(sorted),
            bloch: ens.state(sorted).as_array(),
            povm: povm_info(&solution.povm.elements[sorted]),
            complementary,
        });
    }
    out.into_iter().map(|s| s.expect("permutation covers all slots")).collect()
}

pub fn residual_block(
    ens: &WeightedEnsemble,
    solution: &DiscriminationSolution,
    primal_value: f64,
    oracle_value: Option<f64>,
) -> ResidualBlock {
    let kkt = solution
        .complementary
        .as_ref()
        .map(|cs| kkt_residuals(ens, &solution.povm, cs));
    ResidualBlock {
        povm_completeness: solution.povm.completeness_residual(),
        povm_positivity: solution
            .povm
            .elements
            .iter()
            .map(|e| (e.bloch_axis().norm() - 1.0).max(0.0).max(-e.weight()))
            .fold(0.0, f64::max),
        kkt_pair_operator: kkt.as_ref().map(|r| r.pair_operator),
        kkt_slackness: kkt.as_ref().map(|r| r.slackness),
        primal_value,
        oracle_value,
        duality_gap: oracle_value.map(|v| (solution.p_guess - v).abs()),
    }
}

/// Rebuilds the sorted-order POVM and complementary data from a report,
/// for re-verification.
pub fn reconstruct(
    ens: &WeightedEnsemble,
    states: &[StateReport],
) -> anyhow::Result<(Povm, Option<ComplementarySolution>)> {
    use anyhow::bail;
    let n = ens.len();
    if states.len() != n {
        bail!("report lists {} states, problem has {n}", states.len());
    }
    let mut povm = Povm::zeros(n);
    let mut r = vec![0.0; n];
    let mut w = vec![BlochVector::ZERO; n];
    let mut free = vec![false; n];
    let mut have_complementary = true;
    for sorted in 0..n {
        let input = ens.original_index()[sorted];
        let state = &states[input];
        povm.elements[sorted] = match state.povm.kind.as_str() {
            "zero" => PovmElement::Zero,
            "identity" => PovmElement::Identity,
            "projector" => PovmElement::Projector {
                weight: state.povm.weight,
                axis: BlochVector::from(state.povm.axis),
            },
            other => bail!("unknown POVM element kind {other:?}"),
        };
        match &state.complementary {
            Some(c) => {
                r[sorted] = c.r;
                w[sorted] = BlochVector::from(c.w);
                free[sorted] = c.free;
            }
            None => have_complementary = false,
        }
    }
    let cs = have_complementary.then_some(ComplementarySolution { r, w, free });
    Ok((povm, cs))
}
