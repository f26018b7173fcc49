//! Subcommand implementations. Each run function prints a human-readable
//! block (or a JSON report with `--json`) and returns the process exit code:
//! 0 for success or all checks passing, 1 for a verification failure.

use crate::error::{CliError, Result};
use crate::io::{ColumnSelector, read_sample};
use crate::report::Report;
use crate::tables::{load_table, save_table};
use clap::{Args, ValueEnum};
use madtest::{
    Alternative, CalibrationMode, ContaminationModel, DataModel, RECOMMENDED_TABLE_REPS, RngSpec,
    SimulationConfig, StatisticKind, TestResult, build_quantile_table, classical_one_sample_test,
    estimate_rejection_rate, ks_distance_to_std_normal, robust_one_sample_test, simulate_statistic,
    std_normal_quantile, student_t_quantile,
};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlternativeArg {
    TwoSided,
    Greater,
    Less,
}

impl From<AlternativeArg> for Alternative {
    fn from(a: AlternativeArg) -> Alternative {
        match a {
            AlternativeArg::TwoSided => Alternative::TwoSided,
            AlternativeArg::Greater => Alternative::Greater,
            AlternativeArg::Less => Alternative::Less,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CalibrationArg {
    Asymptotic,
    Mc,
}

/// Comma-separated list of probabilities.
#[derive(Debug, Clone)]
pub struct ProbList(pub Vec<f64>);

pub fn parse_probs(raw: &str) -> std::result::Result<ProbList, String> {
    let mut probs = raw
        .split(',')
        .map(|cell| {
            cell.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad probability '{cell}'"))
        })
        .collect::<std::result::Result<Vec<f64>, String>>()?;
    probs.sort_by(f64::total_cmp);
    probs.dedup();
    Ok(ProbList(probs))
}

/// Comma-separated list of sample sizes.
#[derive(Debug, Clone)]
pub struct SizeGrid(pub Vec<usize>);

pub fn parse_grid(raw: &str) -> std::result::Result<SizeGrid, String> {
    let sizes = raw
        .split(',')
        .map(|cell| {
            cell.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad sample size '{cell}'"))
        })
        .collect::<std::result::Result<Vec<usize>, String>>()?;
    if sizes.is_empty() {
        return Err("grid must not be empty".to_string());
    }
    Ok(SizeGrid(sizes))
}

/// One MU,SIGMA pair.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ParamPair {
    pub mu: f64,
    pub sigma: f64,
}

pub fn parse_param_pair(raw: &str) -> std::result::Result<ParamPair, String> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected MU,SIGMA, got '{raw}'"));
    }
    let mu = parts[0]
        .parse::<f64>()
        .map_err(|_| format!("bad location '{}'", parts[0]))?;
    let sigma = parts[1]
        .parse::<f64>()
        .map_err(|_| format!("bad scale '{}'", parts[1]))?;
    Ok(ParamPair { mu, sigma })
}

// ---------------------------------------------------------------------------
// test
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct TestArgs {
    /// Data file: delimiter-separated values with an auto-detected header
    #[arg(long)]
    pub data: PathBuf,
    /// Column to analyze, by name or zero-based index
    #[arg(long)]
    pub column: Option<String>,
    /// Hypothesized location
    #[arg(long, allow_hyphen_values = true)]
    pub mu0: f64,
    #[arg(long, value_enum, default_value_t = AlternativeArg::TwoSided)]
    pub alternative: AlternativeArg,
    /// Calibration for the robust test
    #[arg(long, value_enum, default_value_t = CalibrationArg::Asymptotic)]
    pub calibration: CalibrationArg,
    /// Quantile table file; required with --calibration mc
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Significance level for an explicit reject/retain decision
    #[arg(long)]
    pub level: Option<f64>,
    /// Run the classical Student t test instead of the robust one
    #[arg(long)]
    pub classical: bool,
    /// Emit a machine-readable JSON report
    /// Emit a machine-readable JSON report
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Serialize)]
struct TestParams {
    data: String,
    column: Option<String>,
    mu0: f64,
    alternative: &'static str,
    calibration: &'static str,
    table: Option<String>,
    level: Option<f64>,
    classical: bool,
}

fn alternative_name(a: Alternative) -> &'static str {
    match a {
        Alternative::TwoSided => "two-sided",
        Alternative::Greater => "greater",
        Alternative::Less => "less",
    }
}

pub fn run_test(args: &TestArgs) -> Result<i32> {
    let selector = args.column.as_deref().map(ColumnSelector::parse);
    let sample = read_sample(&args.data, selector.as_ref())?;
    let alternative: Alternative = args.alternative.into();

    let (result, table_note) = if args.classical {
        (
            classical_one_sample_test(&sample, args.mu0, alternative, args.level)?,
            None,
        )
    } else {
        match args.calibration {
            CalibrationArg::Asymptotic => (
                robust_one_sample_test(
                    &sample,
                    args.mu0,
                    alternative,
                    CalibrationMode::Asymptotic,
                    None,
                    args.level,
                )?,
                None,
            ),
            CalibrationArg::Mc => {
                let path = args
                    .table
                    .as_ref()
                    .ok_or(CliError::Core(madtest::Error::MissingTable))?;
                let table = load_table(path)?;
                let note = (table.reps < RECOMMENDED_TABLE_REPS).then(|| {
                    format!(
                        "table has {} replications; {RECOMMENDED_TABLE_REPS} or more are recommended for reported inference",
                        table.reps
                    )
                });
                let result = robust_one_sample_test(
                    &sample,
                    args.mu0,
                    alternative,
                    CalibrationMode::MonteCarlo,
                    Some(&table),
                    args.level,
                )?;
                (result, note)
            }
        }
    };

    let params = TestParams {
        data: args.data.display().to_string(),
        column: args.column.clone(),
        mu0: args.mu0,
        alternative: alternative_name(alternative),
        calibration: if args.classical {
            "student-t"
        } else if args.calibration == CalibrationArg::Mc {
            "mc"
        } else {
            "asymptotic"
        },
        table: args.table.as_ref().map(|p| p.display().to_string()),
        level: args.level,
        classical: args.classical,
    };

    if args.json {
        Report::new("test", params, &result).print_json();
    } else {
        render_test_result(&params, &result, table_note.as_deref());
    }
    Ok(0)
}

fn render_test_result(params: &TestParams, result: &TestResult, note: Option<&str>) {
    println!("one-sample location test");
    println!("  data:         {} (n = {})", params.data, result.n);
    println!("  mu0:          {}", result.mu0);
    println!(
        "  test:         {}",
        if params.classical {
            "classical Student t"
        } else {
            "robust (median/MAD)"
        }
    );
    println!("  calibration:  {}", params.calibration);
    println!("  alternative:  {}", params.alternative);
    match result.statistic_scaled {
        Some(scaled) => {
            println!(
                "  statistic:    {:.10}  (scaled: {:.10})",
                result.statistic_raw, scaled
            )
        }
        None => println!("  statistic:    {:.10}", result.statistic_raw),
    }
    println!("  p-value:      {:.10}", result.p_value);
    if let Some(decision) = result.reject_at {
        let verdict = if decision.reject {
            "reject H0"
        } else {
            "fail to reject H0"
        };
        println!("  decision:     {verdict} at level {}", decision.level);
    }
    if let Some(note) = note {
        println!("  note:         {note}");
    }
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Sample size the table is calibrated for
    #[arg(long)]
    pub n: usize,
    /// Number of pivot replications
    #[arg(long)]
    pub reps: usize,
    /// RNG seed; the base of every substream the command uses
    #[arg(long)]
    pub seed: u64,
    /// Base logical stream index
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Comma-separated probabilities (default: the standard two-sided grid)
    #[arg(long, value_parser = parse_probs)]
    pub probs: Option<ProbList>,
    /// Output file for the table
    #[arg(long)]
    pub out: PathBuf,
    /// Emit a machine-readable JSON report
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Serialize)]
struct CalibrateParams {
    n: usize,
    reps: usize,
    seed: u64,
    stream: u64,
    out: String,
}

#[derive(Debug, Serialize)]
struct CalibrateResults {
    probs: Vec<f64>,
    quantiles: Vec<f64>,
    degenerate_note: Option<String>,
}

pub fn run_calibrate(args: &CalibrateArgs) -> Result<i32> {
    let probs = match &args.probs {
        Some(list) => list.0.clone(),
        None => madtest::DEFAULT_TABLE_PROBS.to_vec(),
    };
    let rng = RngSpec::new(args.seed, args.stream);
    let table = build_quantile_table(args.n, &probs, args.reps, rng)?;
    save_table(&table, &args.out)?;

    let params = CalibrateParams {
        n: args.n,
        reps: args.reps,
        seed: args.seed,
        stream: args.stream,
        out: args.out.display().to_string(),
    };
    if args.json {
        let results = CalibrateResults {
            probs: table.probs.clone(),
            quantiles: table.quantiles.clone(),
            degenerate_note: None,
        };
        Report::new("calibrate", params, results).print_json();
    } else {
        println!("calibrated pivot quantile table");
        println!("  n:      {}", table.n);
        println!("  reps:   {}", table.reps);
        println!("  seed:   {}  stream: {}", table.rng.seed, table.rng.stream);
        println!("  saved:  {}", params.out);
        println!("  {:>8}  {:>24}", "prob", "quantile");
        for (p, q) in table.probs.iter().zip(&table.quantiles) {
            println!("  {p:>8}  {q:>24}");
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify-pivot
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct VerifyPivotArgs {
    /// Sample size per replication
    #[arg(long)]
    pub n: usize,
    /// Number of replications
    #[arg(long)]
    pub reps: usize,
    /// RNG seed; the base of every substream the command uses
    #[arg(long)]
    pub seed: u64,
    /// Base logical stream index
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Location-scale pair MU,SIGMA (repeatable; default: 0,1 7,3 -2,0.5)
    #[arg(long = "params", value_parser = parse_param_pair, allow_hyphen_values = true)]
    pub params: Vec<ParamPair>,
    /// Elementwise tolerance on the sorted pivot distributions
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    /// Emit a machine-readable JSON report
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Serialize)]
struct VerifyPivotParams {
    n: usize,
    reps: usize,
    seed: u64,
    stream: u64,
    tolerance: f64,
}

#[derive(Debug, Serialize)]
struct PivotCase {
    mu: f64,
    sigma: f64,
    max_abs_diff: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct VerifyPivotResults {
    cases: Vec<PivotCase>,
    all_pass: bool,
}

pub fn default_pivot_params() -> Vec<ParamPair> {
    vec![
        ParamPair {
            mu: 0.0,
            sigma: 1.0,
        },
        ParamPair {
            mu: 7.0,
            sigma: 3.0,
        },
        ParamPair {
            mu: -2.0,
            sigma: 0.5,
        },
    ]
}

pub fn run_verify_pivot(args: &VerifyPivotArgs) -> Result<i32> {
    let pairs = if args.params.is_empty() {
        default_pivot_params()
    } else {
        args.params.clone()
    };
    let base = SimulationConfig {
        n: args.n,
        reps: args.reps,
        rng: RngSpec::new(args.seed, args.stream),
        statistic: StatisticKind::Pivot,
        data_model: DataModel::StdNormal,
        mu0: 0.0,
    };
    let reference = simulate_statistic(&base)?;

    let mut cases = Vec::with_capacity(pairs.len());
    for pair in &pairs {
        let config = SimulationConfig {
            data_model: DataModel::LocationScale {
                mu: pair.mu,
                sigma: pair.sigma,
            },
            mu0: pair.mu,
            ..base
        };
        let dist = simulate_statistic(&config)?;
        let max_abs_diff = reference
            .sorted_values()
            .iter()
            .zip(dist.sorted_values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        cases.push(PivotCase {
            mu: pair.mu,
            sigma: pair.sigma,
            max_abs_diff,
            pass: max_abs_diff <= args.tolerance,
        });
    }
    let all_pass = cases.iter().all(|c| c.pass);

    let params = VerifyPivotParams {
        n: args.n,
        reps: args.reps,
        seed: args.seed,
        stream: args.stream,
        tolerance: args.tolerance,
    };
    if args.json {
        Report::new(
            "verify-pivot",
            params,
            VerifyPivotResults { cases, all_pass },
        )
        .print_json();
    } else {
        println!(
            "pivot invariance check (n = {}, reps = {}, seed = {}, stream = {}, tolerance = {:e})",
            args.n, args.reps, args.seed, args.stream, args.tolerance
        );
        println!(
            "  {:>12} {:>8} {:>14} {:>8}",
            "mu", "sigma", "max |diff|", "status"
        );
        for case in &cases {
            println!(
                "  {:>12} {:>8} {:>14.6e} {:>8}",
                case.mu,
                case.sigma,
                case.max_abs_diff,
                if case.pass { "pass" } else { "FAIL" }
            );
        }
        println!("result: {}", if all_pass { "PASS" } else { "FAIL" });
    }
    Ok(if all_pass { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// verify-normality
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct VerifyNormalityArgs {
    /// Comma-separated sample sizes, e.g. 20,50,200,1000
    #[arg(long, value_parser = parse_grid)]
    pub grid: SizeGrid,
    /// Replications per sample size
    #[arg(long)]
    pub reps: usize,
    /// RNG seed; the base of every substream the command uses
    #[arg(long)]
    pub seed: u64,
    /// Base logical stream index
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Fail (exit 1) if the KS distance at the largest n exceeds this bound
    #[arg(long)]
    pub max_ks: Option<f64>,
    /// Emit CSV rows instead of the aligned table
    #[arg(long)]
    pub csv: bool,
    /// Emit a machine-readable JSON report
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Serialize)]
struct VerifyNormalityParams {
    grid: Vec<usize>,
    reps: usize,
    seed: u64,
    stream: u64,
    max_ks: Option<f64>,
}

#[derive(Debug, Serialize)]
struct NormalityRow {
    n: usize,
    ks_distance: f64,
    empirical_mean: f64,
    empirical_var: f64,
}

#[derive(Debug, Serialize)]
struct VerifyNormalityResults {
    rows: Vec<NormalityRow>,
    pass: Option<bool>,
}

fn mean_and_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

pub fn run_verify_normality(args: &VerifyNormalityArgs) -> Result<i32> {
    let mut rows = Vec::with_capacity(args.grid.0.len());
    for &n in &args.grid.0 {
        let config = SimulationConfig {
            n,
            reps: args.reps,
            rng: RngSpec::new(args.seed, args.stream),
            statistic: StatisticKind::ScaledRobustT,
            data_model: DataModel::StdNormal,
            mu0: 0.0,
        };
        let dist = simulate_statistic(&config)?;
        let (mean, var) = mean_and_var(dist.sorted_values());
        rows.push(NormalityRow {
            n,
            ks_distance: ks_distance_to_std_normal(&dist),
            empirical_mean: mean,
            empirical_var: var,
        });
    }
    let pass = args.max_ks.map(|bound| {
        rows.iter()
            .max_by_key(|r| r.n)
            .map(|r| r.ks_distance <= bound)
            .unwrap_or(true)
    });

    let params = VerifyNormalityParams {
        grid: args.grid.0.clone(),
        reps: args.reps,
        seed: args.seed,
        stream: args.stream,
        max_ks: args.max_ks,
    };
    if args.json {
        Report::new(
            "verify-normality",
            params,
            VerifyNormalityResults { rows, pass },
        )
        .print_json();
    } else if args.csv {
        println!("n,ks_distance,empirical_mean,empirical_var");
        for r in &rows {
            println!(
                "{},{},{},{}",
                r.n, r.ks_distance, r.empirical_mean, r.empirical_var
            );
        }
        if let Some(pass) = pass {
            println!("# result: {}", if pass { "PASS" } else { "FAIL" });
        }
    } else {
        println!(
            "normality of the scaled statistic (reps = {}, seed = {}, stream = {})",
            args.reps, args.seed, args.stream
        );
        println!(
            "  {:>8} {:>14} {:>14} {:>14}",
            "n", "ks_distance", "mean", "variance"
        );
        for r in &rows {
            println!(
                "  {:>8} {:>14.6} {:>14.6} {:>14.6}",
                r.n, r.ks_distance, r.empirical_mean, r.empirical_var
            );
        }
        if let Some(pass) = pass {
            println!("result: {}", if pass { "PASS" } else { "FAIL" });
        }
    }
    Ok(match pass {
        Some(false) => 1,
        _ => 0,
    })
}

// ---------------------------------------------------------------------------
// robustness-study
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct RobustnessArgs {
    /// Sample size per replication
    #[arg(long)]
    pub n: usize,
    /// Contamination probability per observation
    #[arg(long)]
    pub eps: f64,
    /// Contamination shift in clean-sigma units
    #[arg(long, allow_hyphen_values = true)]
    pub shift: f64,
    /// Replications per test
    #[arg(long)]
    pub reps: usize,
    /// RNG seed; the base of every substream the command uses
    #[arg(long)]
    pub seed: u64,
    /// Base logical stream index
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Nominal two-sided significance level
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    /// Emit a machine-readable JSON report
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Serialize)]
struct RobustnessParams {
    n: usize,
    eps: f64,
    shift: f64,
    reps: usize,
    seed: u64,
    stream: u64,
    level: f64,
}

#[derive(Debug, Serialize)]
struct RobustnessResults {
    robust_size: f64,
    classical_size: f64,
    robust_to_nominal: f64,
    classical_to_nominal: f64,
}

pub fn run_robustness_study(args: &RobustnessArgs) -> Result<i32> {
    if !(args.level > 0.0 && args.level < 1.0) {
        return Err(CliError::Invalid(format!(
            "level must lie in (0, 1), got {}",
            args.level
        )));
    }
    let model = ContaminationModel::new(args.eps, 0.0, 1.0, args.shift, 1.0)?;
    let base = SimulationConfig {
        n: args.n,
        reps: args.reps,
        rng: RngSpec::new(args.seed, args.stream),
        statistic: StatisticKind::ScaledRobustT,
        data_model: DataModel::Contaminated(model),
        mu0: 0.0,
    };

    let normal_critical = std_normal_quantile(1.0 - args.level / 2.0)?;
    let robust_size = estimate_rejection_rate(&base, normal_critical, true)?;

    let t_critical = student_t_quantile(1.0 - args.level / 2.0, (args.n - 1) as f64)?;
    let classical_config = SimulationConfig {
        statistic: StatisticKind::ClassicalT,
        ..base
    };
    let classical_size = estimate_rejection_rate(&classical_config, t_critical, true)?;

    let params = RobustnessParams {
        n: args.n,
        eps: args.eps,
        shift: args.shift,
        reps: args.reps,
        seed: args.seed,
        stream: args.stream,
        level: args.level,
    };
    let results = RobustnessResults {
        robust_size,
        classical_size,
        robust_to_nominal: robust_size / args.level,
        classical_to_nominal: classical_size / args.level,
    };
    if args.json {
        Report::new("robustness-study", params, results).print_json();
    } else {
        println!("contamination robustness study");
        println!(
            "  n = {}, eps = {}, shift = {} clean-sigma, reps = {}, seed = {}, stream = {}",
            args.n, args.eps, args.shift, args.reps, args.seed, args.stream
        );
        println!("  nominal level:        {:.4}", args.level);
        println!(
            "  robust test size:     {:.4}  ({:.2}x nominal)",
            results.robust_size, results.robust_to_nominal
        );
        println!(
            "  classical test size:  {:.4}  ({:.2}x nominal)",
            results.classical_size, results.classical_to_nominal
        );
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prob_list_parses_sorts_and_dedups() {
        let probs = parse_probs("0.9, 0.1, 0.5, 0.1").unwrap();
        assert_eq!(probs.0, vec![0.1, 0.5, 0.9]);
        assert!(parse_probs("0.1,abc").is_err());
    }

    #[test]
    fn grid_parses() {
        assert_eq!(parse_grid("20, 50,200").unwrap().0, vec![20, 50, 200]);
        assert!(parse_grid("20,-3").is_err());
    }

    #[test]
    fn param_pairs_parse_including_negatives() {
        let p = parse_param_pair("-2,0.5").unwrap();
        assert_eq!((p.mu, p.sigma), (-2.0, 0.5));
        assert!(parse_param_pair("1").is_err());
        assert!(parse_param_pair("1,2,3").is_err());
    }
}
