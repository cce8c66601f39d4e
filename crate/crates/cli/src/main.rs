//! Command-line front end: solve problem files, classify their intrinsic
//! polytopes, sweep the symmetric family, fuzz the solver against the dual
//! oracle, and re-verify emitted reports.
//!
//! Exit codes: 0 success, 1 input error, 2 verification failure.

mod problem;
mod report;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use discrim_core::{
    affine_dimension, build_polytope, dual_solve, make_symmetric_ensemble, primal_check,
    random_ensemble, solve_n, solve_three, symmetric_guess_formula, triangle_geometry, Branch,
    Error as CoreError, WeightedEnsemble, GEOMETRY_EPS,
};

use report::{
    branch_info, polytope_info, residual_block, state_reports, tool_info, triangle_info,
    InputInfo, PolytopeInfo, SolutionReport, ToolInfo, TriangleInfo, REPORT_SCHEMA,
};

#[derive(Parser)]
#[command(
    name = "discrim",
    version,
    about = "Minimum-error qubit-state discrimination: closed-form solvers with independent verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file and emit a solution report
    Solve {
        path: PathBuf,
        /// Write the report to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run the dual-oracle verification (the default)
        #[arg(long)]
        verify: bool,
        /// Skip the dual-oracle verification
        #[arg(long, conflicts_with = "verify")]
        no_verify: bool,
        /// Verification gap tolerance
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Classify the intrinsic polytope of a problem file
    Classify {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the symmetric three-state family at one overlap point or
    /// over a sweep grid
    Symmetric {
        /// Self-overlap of each state
        #[arg(allow_hyphen_values = true)]
        r: Option<f64>,
        /// Cross-overlap between distinct states
        #[arg(allow_hyphen_values = true)]
        gamma: Option<f64>,
        /// Sweep an NxM grid (e.g. 20x20) over the realizable region
        #[arg(long)]
        sweep: Option<String>,
        #[arg(long, default_value_t = 0.05)]
        r_min: f64,
        #[arg(long, default_value_t = 1.0)]
        r_max: f64,
        #[arg(long, value_parser = ["json", "csv"], default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve random instances and compare against the dual oracle
    Fuzz {
        /// Number of seeds to run
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        /// States per instance
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        purity_min: f64,
        #[arg(long, default_value_t = 1.0)]
        purity_max: f64,
        /// First seed of the batch
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Gap above which a seed counts as a failure
        #[arg(long, default_value_t = 1e-6)]
        gap_limit: f64,
        #[arg(long, value_parser = ["json", "csv"], default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a solution report against its problem file
    Verify {
        problem: PathBuf,
        report: PathBuf,
        /// Oracle gap tolerance
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run() -> Result<u8> {
    match Cli::parse().command {
        Command::Solve { path, out, verify, no_verify, tol } => {
            cmd_solve(&path, out.as_deref(), verify, no_verify, tol)
        }
        Command::Classify { path, out } => cmd_classify(&path, out.as_deref()),
        Command::Symmetric { r, gamma, sweep, r_min, r_max, format, out } => {
            cmd_symmetric(r, gamma, sweep.as_deref(), r_min, r_max, &format, out.as_deref())
        }
        Command::Fuzz { seeds, n, purity_min, purity_max, seed, gap_limit, format, out } => {
            cmd_fuzz(seeds, n, purity_min, purity_max, seed, gap_limit, &format, out.as_deref())
        }
        Command::Verify { problem, report, tol } => cmd_verify(&problem, &report, tol),
    }
}

fn emit(out: Option<&std::path::Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("cannot write {}", path.display())),
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json(value: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn check_finite(report: &SolutionReport) -> Result<()> {
    let mut values = vec![report.p_guess, report.certificate.k0];
    values.extend(report.certificate.k);
    values.push(report.residuals.povm_completeness);
    values.push(report.residuals.primal_value);
    for state in &report.states {
        values.push(state.prior);
        values.push(state.povm.weight);
        values.extend(state.povm.axis);
        if let Some(c) = &state.complementary {
            values.push(c.r);
            values.extend(c.w);
        }
    }
    if values.iter().any(|v| !v.is_finite()) {
        bail!("report contains non-finite values");
    }
    Ok(())
}

fn cmd_solve(
    path: &std::path::Path,
    out: Option<&std::path::Path>,
    verify_flag: bool,
    no_verify: bool,
    tol_flag: Option<f64>,
) -> Result<u8> {
    let problem = problem::load_problem(path)?;
    let ens = &problem.ensemble;
    let verify = if no_verify {
        false
    } else {
        verify_flag || problem.options.verify.unwrap_or(true)
    };
    let tol = tol_flag.or(problem.options.tol).unwrap_or(1e-7);

    let solution = solve_n(ens)?;
    let poly = build_polytope(ens, GEOMETRY_EPS);
    let to_input = ens.original_index();
    let triangle = triangle_block(ens);
    let primal = primal_check(ens, &solution.povm)?;
    let oracle_value = if verify { Some(dual_solve(ens, 1e-12)?.0) } else { None };

    let report = SolutionReport {
        schema: REPORT_SCHEMA,
        tool: tool_info(),
        input: InputInfo { digest: problem.digest, states: ens.len() },
        seed: None,
        p_guess: solution.p_guess,
        branch: branch_info(&solution.branch, to_input),
        polytope: polytope_info(&poly, to_input),
        triangle,
        states: state_reports(ens, &solution),
        certificate: report::CertificateInfo {
            k0: solution.certificate.k0,
            k: solution.certificate.k.as_array(),
        },
        residuals: residual_block(ens, &solution, primal.p_corr, oracle_value),
    };
    check_finite(&report)?;
    emit(out, &to_json(&report)?)?;

    let primal_ok = (primal.p_corr - solution.p_guess).abs() <= 1e-9;
    let oracle_ok = oracle_value.is_none_or(|v| (solution.p_guess - v).abs() <= tol);
    Ok(if primal_ok && oracle_ok { 0 } else { 2 })
}

fn triangle_block(ens: &WeightedEnsemble) -> Option<TriangleInfo> {
    if ens.len() != 3 {
        return None;
    }
    triangle_geometry(ens).ok().map(|g| triangle_info(&g))
}

#[derive(Serialize)]
struct ClassifyReport {
    schema: u32,
    tool: ToolInfo,
    input: InputInfo,
    polytope: PolytopeInfo,
    affine_dimension: usize,
    triangle: Option<TriangleInfo>,
}

fn cmd_classify(path: &std::path::Path, out: Option<&std::path::Path>) -> Result<u8> {
    let problem = problem::load_problem(path)?;
    let ens = &problem.ensemble;
    let poly = build_polytope(ens, GEOMETRY_EPS);
    let report = ClassifyReport {
        schema: REPORT_SCHEMA,
        tool: tool_info(),
        input: InputInfo { digest: problem.digest, states: ens.len() },
        polytope: polytope_info(&poly, ens.original_index()),
        affine_dimension: affine_dimension(&ens.weighted_points(), GEOMETRY_EPS),
        triangle: triangle_block(ens),
    };
    emit(out, &to_json(&report)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct SymmetricRow {
    r: f64,
    gamma: f64,
    realizable: bool,
    formula: Option<f64>,
    solver: Option<f64>,
    oracle: Option<f64>,
    max_discrepancy: Option<f64>,
}

#[derive(Serialize)]
struct SymmetricReport {
    schema: u32,
    tool: ToolInfo,
    rows: Vec<SymmetricRow>,
    max_discrepancy: Option<f64>,
}

fn symmetric_row(r: f64, gamma: f64) -> Result<SymmetricRow> {
    let Ok(formula) = symmetric_guess_formula(r, gamma) else {
        return Ok(SymmetricRow {
            r,
            gamma,
            realizable: false,
            formula: None,
            solver: None,
            oracle: None,
            max_discrepancy: None,
        });
    };
    let ens = make_symmetric_ensemble(r, gamma)?;
    let solver = solve_three(&ens)?.p_guess;
    let (oracle, _) = dual_solve(&ens, 1e-12)?;
    let discrepancy = (formula - solver)
        .abs()
        .max((formula - oracle).abs())
        .max((solver - oracle).abs());
    Ok(SymmetricRow {
        r,
        gamma,
        realizable: true,
        formula: Some(formula),
        solver: Some(solver),
        oracle: Some(oracle),
        max_discrepancy: Some(discrepancy),
    })
}

fn parse_grid(spec: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = spec.split('x').collect();
    if parts.len() != 2 {
        bail!("sweep must look like 20x20, got {spec:?}");
    }
    let rows: usize = parts[0].parse().context("sweep rows")?;
    let cols: usize = parts[1].parse().context("sweep columns")?;
    if rows == 0 || cols == 0 {
        bail!("sweep grid must be nonempty");
    }
    Ok((rows, cols))
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

fn cmd_symmetric(
    r: Option<f64>,
    gamma: Option<f64>,
    sweep: Option<&str>,
    r_min: f64,
    r_max: f64,
    format: &str,
    out: Option<&std::path::Path>,
) -> Result<u8> {
    let mut rows = Vec::new();
    match (sweep, r, gamma) {
        (Some(spec), _, _) => {
            let (nr, ng) = parse_grid(spec)?;
            for i in 0..nr {
                let r = if nr == 1 {
                    r_min
                } else {
                    r_min + (r_max - r_min) * i as f64 / (nr - 1) as f64
                };
                for j in 0..ng {
                    let gamma = -0.5 * r + (j as f64 + 0.5) / ng as f64 * 1.5 * r;
                    rows.push(symmetric_row(r, gamma)?);
                }
            }
        }
        (None, Some(r), Some(gamma)) => rows.push(symmetric_row(r, gamma)?),
        _ => bail!("give both overlaps, or --sweep NxM"),
    }
    let max_discrepancy = rows.iter().filter_map(|row| row.max_discrepancy).fold(None, |acc, d| {
        Some(f64::max(acc.unwrap_or(f64::NEG_INFINITY), d))
    });
    let text = match format {
        "csv" => {
            let mut text = String::from("r,gamma,realizable,formula,solver,oracle,max_discrepancy\n");
            for row in &rows {
                text.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    row.r,
                    row.gamma,
                    row.realizable,
                    opt(row.formula),
                    opt(row.solver),
                    opt(row.oracle),
                    opt(row.max_discrepancy),
                ));
            }
            text
        }
        _ => to_json(&SymmetricReport {
            schema: REPORT_SCHEMA,
            tool: tool_info(),
            rows,
            max_discrepancy,
        })?,
    };
    emit(out, &text)?;
    Ok(0)
}

#[derive(Serialize)]
struct FuzzFailure {
    seed: u64,
    gap: f64,
}

#[derive(Serialize)]
struct FuzzBranches {
    point: usize,
    pair: usize,
    triangle: usize,
    subset: usize,
    numeric: usize,
}

#[derive(Serialize)]
struct FuzzReport {
    schema: u32,
    tool: ToolInfo,
    seeds: u64,
    base_seed: u64,
    states: usize,
    purity: [f64; 2],
    gap_limit: f64,
    max_gap: f64,
    branches: FuzzBranches,
    failures: Vec<FuzzFailure>,
    pass: bool,
}

#[allow(clippy::too_many_arguments)]
fn cmd_fuzz(
    seeds: u64,
    n: usize,
    purity_min: f64,
    purity_max: f64,
    base_seed: u64,
    gap_limit: f64,
    format: &str,
    out: Option<&std::path::Path>,
) -> Result<u8> {
    if seeds == 0 {
        bail!("--seeds must be positive");
    }
    if n == 0 {
        bail!("--n must be positive");
    }
    if !(0.0..=1.0).contains(&purity_min)
        || !(purity_min..=1.0).contains(&purity_max)
    {
        bail!("purity bounds must satisfy 0 <= min <= max <= 1");
    }
    let mut branches = FuzzBranches { point: 0, pair: 0, triangle: 0, subset: 0, numeric: 0 };
    let mut failures = Vec::new();
    let mut max_gap: f64 = 0.0;
    let mut csv = String::from("seed,branch,p_guess,oracle,gap\n");
    for i in 0..seeds {
        let seed = base_seed + i;
        let ens = random_ensemble(seed, n, purity_min, purity_max);
        let sol = solve_n(&ens)?;
        let (oracle, _) = dual_solve(&ens, 1e-12)?;
        let gap = (sol.p_guess - oracle).abs();
        max_gap = max_gap.max(gap);
        if gap > gap_limit {
            failures.push(FuzzFailure { seed, gap });
        }
        match sol.branch {
            Branch::Point => branches.point += 1,
            Branch::Pair { .. } => branches.pair += 1,
            Branch::Triangle => branches.triangle += 1,
            Branch::Subset { .. } => branches.subset += 1,
            Branch::Numeric => branches.numeric += 1,
        }
        if format == "csv" {
            csv.push_str(&format!(
                "{seed},{},{},{oracle},{gap}\n",
                sol.branch, sol.p_guess
            ));
        }
    }
    let pass = failures.is_empty();
    let text = match format {
        "csv" => csv,
        _ => to_json(&FuzzReport {
            schema: REPORT_SCHEMA,
            tool: tool_info(),
            seeds,
            base_seed,
            states: n,
            purity: [purity_min, purity_max],
            gap_limit,
            max_gap,
            branches,
            failures,
            pass,
        })?,
    };
    emit(out, &text)?;
    Ok(if pass { 0 } else { 2 })
}

#[derive(Serialize)]
struct VerifyReport {
    schema: u32,
    tool: ToolInfo,
    digest: String,
    p_guess: f64,
    primal_value: f64,
    primal_gap: f64,
    oracle_value: f64,
    oracle_gap: f64,
    pass: bool,
}

fn cmd_verify(
    problem_path: &std::path::Path,
    report_path: &std::path::Path,
    tol: f64,
) -> Result<u8> {
    let problem = problem::load_problem(problem_path)?;
    let bytes = std::fs::read(report_path)
        .with_context(|| format!("cannot read report {}", report_path.display()))?;
    let report: SolutionReport =
        serde_json::from_slice(&bytes).context("cannot parse solution report")?;
    if report.input.digest != problem.digest {
        bail!(
            "report digest {} does not match problem file digest {}",
            report.input.digest,
            problem.digest
        );
    }
    let ens = &problem.ensemble;
    let (povm, _) = report::reconstruct(ens, &report.states)?;
    let primal = match primal_check(ens, &povm) {
        Ok(p) => p,
        Err(CoreError::InvalidPovm(msg)) => {
            eprintln!("verification failed: {msg}");
            return Ok(2);
        }
        Err(e) => return Err(e.into()),
    };
    let (oracle, _) = dual_solve(ens, 1e-12)?;
    let primal_gap = (primal.p_corr - report.p_guess).abs();
    let oracle_gap = (report.p_guess - oracle).abs();
    let pass = primal_gap <= 1e-9 && oracle_gap <= tol;
    let text = to_json(&VerifyReport {
        schema: REPORT_SCHEMA,
        tool: tool_info(),
        digest: problem.digest,
        p_guess: report.p_guess,
        primal_value: primal.p_corr,
        primal_gap,
        oracle_value: oracle,
        oracle_gap,
        pass,
    })?;
    emit(None, &text)?;
    Ok(if pass { 0 } else { 2 })
}
