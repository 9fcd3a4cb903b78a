use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::Deserialize;
use serde_json::json;

use sympath::error::{Result, SympathError};
use sympath::forms::{HyperbolicTail, IndexSeed, NormalFormCounts, SymplecticMatrix};
use sympath::index::{iterate_index, iterate_nullity, iteration_table, mean_index};
use sympath::oracle::{build_path, CrossingOracle, CrossingParams, NullityOracle};
use sympath::r8::{
    claim1_scan, default_claim1_families, enumerate_configs, lemma31_scan, ScanGrid,
};
use sympath::report::{ReportEnvelope, Table, Tolerances};
use sympath::Angle;

/// Normal-form index iteration toolkit: decomposition, iteration tables,
/// independent oracle cross-checks, and exhaustive R⁸ scans.
#[derive(Parser)]
#[command(name = "sympath", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format (JSON is the canonical machine format)
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report here instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Tolerance override, repeatable: --tol name=value
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    tolerances: Vec<(String, f64)>,

    /// RNG seed for all sampled grids (reports are byte-identical per seed)
    #[arg(long, global = true, default_value_t = 12345)]
    rng_seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Recover normal-form invariants from a symplectic matrix JSON file
    Decompose {
        /// matrix file: {"n": int, "rows": [[...], ...]}
        #[arg(long)]
        input: PathBuf,
    },
    /// Index/nullity iteration table for a seed
    Iterate {
        /// seed file (or a characteristic record with label/tau/seed)
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        m_max: u64,
    },
    /// Mean index of a seed
    Mean {
        #[arg(long)]
        input: PathBuf,
    },
    /// Cross-check the iteration formulas against the numerical oracles
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 20)]
        m_max: u64,
        /// also run the crossing-form index oracle (slower)
        #[arg(long)]
        crossing: bool,
    },
    /// Exhaustive no-good-iterate-of-index-(-5) scan over the R⁸ grid
    ScanLemma31 {
        #[arg(long, default_value_t = 1000)]
        m_max: u64,
        #[arg(long, default_value_t = -15)]
        i_min: i64,
        #[arg(long, default_value_t = 15)]
        i_max: i64,
        /// sampled algebraic angle tuples per configuration
        #[arg(long, default_value_t = 100)]
        tuples: usize,
        /// enforce the hypothesis i(y) ≠ -5 (default)
        #[arg(long, conflicts_with = "relax")]
        enforce: bool,
        /// relax the hypothesis to expose the witness family
        #[arg(long)]
        relax: bool,
    },
    /// Zero-mean-index family scan: the {-6,-4} pinching
    ScanClaim1 {
        #[arg(long, default_value_t = 10_000)]
        m_max: u64,
    },
    /// List all block-budget configurations of the R⁸ case
    Enumerate,
}

fn parse_tol(s: &str) -> std::result::Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got '{s}'"))?;
    let v: f64 = value
        .parse()
        .map_err(|e| format!("tolerance value '{value}': {e}"))?;
    Ok((name.to_string(), v))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut tol = Tolerances::default();
    for (name, value) in &cli.tolerances {
        tol.set(name, *value)?;
    }

    let (body, exit) = match &cli.command {
        Command::Decompose { input } => cmd_decompose(&cli, &tol, input)?,
        Command::Iterate { input, m_max } => cmd_iterate(&cli, &tol, input, *m_max)?,
        Command::Mean { input } => cmd_mean(&cli, &tol, input)?,
        Command::Oracle {
            input,
            m_max,
            crossing,
        } => cmd_oracle(&cli, &tol, input, *m_max, *crossing)?,
        Command::ScanLemma31 {
            m_max,
            i_min,
            i_max,
            tuples,
            relax,
            ..
        } => cmd_scan_lemma31(&cli, &tol, *m_max, *i_min, *i_max, *tuples, !*relax)?,
        Command::ScanClaim1 { m_max } => cmd_scan_claim1(&cli, &tol, *m_max)?,
        Command::Enumerate => cmd_enumerate(&cli, &tol)?,
    };

    match &cli.output {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(exit)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &PathBuf) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SympathError::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| SympathError::Parse(format!("{}: {e}", path.display())))
}

/// Seed input: either a bare seed or a record `{label, tau, seed}`.
fn read_seed(path: &PathBuf) -> Result<(IndexSeed, Option<String>)> {
    #[derive(Deserialize)]
    struct RecordJson {
        label: String,
        #[allow(dead_code)]
        tau: f64,
        seed: IndexSeed,
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| SympathError::Parse(format!("cannot read {}: {e}", path.display())))?;
    if let Ok(rec) = serde_json::from_str::<RecordJson>(&text) {
        return Ok((rec.seed, Some(rec.label)));
    }
    let seed: IndexSeed = serde_json::from_str(&text)
        .map_err(|e| SympathError::Parse(format!("{}: {e}", path.display())))?;
    Ok((seed, None))
}

fn render(
    cli: &Cli,
    tol: &Tolerances,
    command: &str,
    grid: serde_json::Value,
    payload: serde_json::Value,
    table: Option<Table>,
) -> Result<String> {
    match (cli.format, table) {
        (Format::Csv, Some(t)) => Ok(t.to_csv()),
        (Format::Text, Some(t)) => Ok(t.to_text()),
        (Format::Text, None) => Ok(format!("{payload:#}\n")),
        _ => ReportEnvelope::new(command, cli.rng_seed, tol.clone(), grid, payload).to_json(),
    }
}

fn cmd_decompose(cli: &Cli, tol: &Tolerances, input: &PathBuf) -> Result<(String, ExitCode)> {
    #[derive(Deserialize)]
    struct MatrixJson {
        n: usize,
        rows: Vec<Vec<f64>>,
    }
    let raw: MatrixJson = read_json(input)?;
    let dim = 2 * raw.n;
    if raw.rows.len() != dim {
        return Err(SympathError::Parse(format!(
            "field 'rows': expected {dim} rows for n = {}, got {}",
            raw.n,
            raw.rows.len()
        )));
    }
    for (i, row) in raw.rows.iter().enumerate() {
        if row.len() != dim {
            return Err(SympathError::Parse(format!(
                "field 'rows[{i}]': expected {dim} entries, got {}",
                row.len()
            )));
        }
    }
    let mat = DMatrix::from_fn(dim, dim, |r, c| raw.rows[r][c]);
    let m = SymplecticMatrix::new(mat, tol.eps_sym_user)?;
    let extracted = sympath::decompose::extract_counts(&m, tol.cluster_tol)?;
    let payload = json!({
        "counts": extracted.counts,
        "classification": extracted.classification,
    });
    let body = render(
        cli,
        tol,
        "decompose",
        json!({"input": input.display().to_string()}),
        payload,
        None,
    )?;
    Ok((body, ExitCode::SUCCESS))
}

fn cmd_iterate(
    cli: &Cli,
    tol: &Tolerances,
    input: &PathBuf,
    m_max: u64,
) -> Result<(String, ExitCode)> {
    let (seed, label) = read_seed(input)?;
    let rows = iteration_table(&seed, m_max)?;
    let mut table = Table::new(vec!["m", "i_maslov", "nullity", "i_viterbo", "good"]);
    for r in &rows {
        table.push(vec![
            r.m.to_string(),
            r.i_maslov.to_string(),
            r.nullity.to_string(),
            r.i_viterbo.to_string(),
            r.good.to_string(),
        ]);
    }
    let payload = json!({
        "label": label,
        "seed": seed,
        "mean_index": mean_index(&seed),
        "rows": rows,
    });
    let body = render(
        cli,
        tol,
        "iterate",
        json!({"input": input.display().to_string(), "m_max": m_max}),
        payload,
        Some(table),
    )?;
    Ok((body, ExitCode::SUCCESS))
}

fn cmd_mean(cli: &Cli, tol: &Tolerances, input: &PathBuf) -> Result<(String, ExitCode)> {
    let (seed, label) = read_seed(input)?;
    let exact = sympath::index::mean_index_exact(&seed).map(|s| s.to_string());
    let payload = json!({
        "label": label,
        "mean_index": mean_index(&seed),
        "mean_index_exact": exact,
    });
    let body = render(
        cli,
        tol,
        "mean",
        json!({"input": input.display().to_string()}),
        payload,
        None,
    )?;
    Ok((body, ExitCode::SUCCESS))
}

fn cmd_oracle(
    cli: &Cli,
    tol: &Tolerances,
    input: &PathBuf,
    m_max: u64,
    crossing: bool,
) -> Result<(String, ExitCode)> {
    let (seed, label) = read_seed(input)?;
    let seed_id = label.unwrap_or_else(|| "seed".into());
    let realized = seed.realize()?;
    let mut oracle = NullityOracle::new(&realized);
    let mut rows = Vec::new();
    let mut table = Table::new(vec![
        "seed_id",
        "check",
        "m",
        "formula_value",
        "oracle_value",
        "agree",
    ]);
    let mut all_agree = true;
    for m in 1..=m_max {
        let formula = iterate_nullity(&seed, m)?;
        let o = oracle.nullity(m)?;
        let agree = formula == o.value;
        all_agree &= agree;
        rows.push(json!({
            "seed_id": seed_id, "check": "nullity", "m": m,
            "formula_value": formula, "oracle_value": o.value,
            "agree": agree, "warning": o.warning,
        }));
        table.push(vec![
            seed_id.clone(),
            "nullity".into(),
            m.to_string(),
            formula.to_string(),
            o.value.to_string(),
            agree.to_string(),
        ]);
    }
    if crossing {
        let m_cross = m_max.min(20) as u32;
        let reference = reference_seed()?;
        let co = CrossingOracle::calibrate(&reference, CrossingParams::default())?;
        let path = build_path(&seed, 8, m_cross)?;
        for m in 1..=m_cross {
            let formula = iterate_index(&seed, m as u64)?;
            let value = co.crossing_index(&path, m)?;
            let agree = formula == value;
            all_agree &= agree;
            rows.push(json!({
                "seed_id": seed_id, "check": "crossing_index", "m": m,
                "formula_value": formula, "oracle_value": value, "agree": agree,
            }));
            table.push(vec![
                seed_id.clone(),
                "crossing_index".into(),
                m.to_string(),
                formula.to_string(),
                value.to_string(),
                agree.to_string(),
            ]);
        }
    }
    let payload = json!({"rows": rows, "all_agree": all_agree});
    let body = render(
        cli,
        tol,
        "oracle",
        json!({"input": input.display().to_string(), "m_max": m_max, "crossing": crossing}),
        payload,
        Some(table),
    )?;
    let code = if all_agree {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    };
    Ok((body, code))
}

/// Fixed reference seed for crossing-oracle calibration.
fn reference_seed() -> Result<IndexSeed> {
    let counts = NormalFormCounts {
        p_minus: 0,
        p_zero: 0,
        p_plus: 0,
        q_minus: 0,
        q_zero: 0,
        q_plus: 0,
        r: 1,
        r_star: 0,
        r_zero: 0,
        s: 0,
        hyperbolic_tail: HyperbolicTail::AllPositive,
        theta_list: vec![Angle::rational(2, 7)?],
        alpha_list: vec![],
        beta_list: vec![],
    };
    IndexSeed::new(1, 1, counts)
}

fn cmd_scan_lemma31(
    cli: &Cli,
    tol: &Tolerances,
    m_max: u64,
    i_min: i64,
    i_max: i64,
    tuples: usize,
    enforce: bool,
) -> Result<(String, ExitCode)> {
    let grid = ScanGrid {
        i_min,
        i_max,
        m_max,
        angle_tuples: tuples,
        rng_seed: cli.rng_seed,
        enforce_hypothesis: enforce,
    };
    let report = lemma31_scan(&grid)?;
    eprintln!("scan-lemma31: {:.2}s", report.runtime_seconds);
    let violating = enforce && !report.violations.is_empty();
    let mut table = Table::new(vec!["config", "i_viterbo", "tuple", "m", "index", "kind"]);
    for v in report.violations.iter() {
        table.push(vec![
            format!("{:?}", v.config),
            v.i_viterbo.to_string(),
            v.tuple_index.to_string(),
            v.m.to_string(),
            v.index.to_string(),
            "violation".into(),
        ]);
    }
    for w in report.witnesses.iter() {
        table.push(vec![
            format!("{:?}", w.config),
            w.i_viterbo.to_string(),
            w.tuple_index.to_string(),
            w.m.to_string(),
            w.index.to_string(),
            "witness".into(),
        ]);
    }
    let body = render(
        cli,
        tol,
        "scan-lemma31",
        serde_json::to_value(&grid)?,
        serde_json::to_value(&report)?,
        Some(table),
    )?;
    let code = if violating {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    };
    Ok((body, code))
}

fn cmd_scan_claim1(cli: &Cli, tol: &Tolerances, m_max: u64) -> Result<(String, ExitCode)> {
    let families = default_claim1_families()?;
    let report = claim1_scan(&families, m_max)?;
    eprintln!("scan-claim1: {:.2}s", report.runtime_seconds);
    let ok = report.r1_infeasible
        && report.r3_parity_contradiction
        && report.families.iter().all(|f| f.satisfied);
    let mut table = Table::new(vec![
        "family",
        "mean_zero",
        "good_values",
        "frac_sums",
        "satisfied",
    ]);
    for f in &report.families {
        table.push(vec![
            f.label.clone(),
            f.mean_index_exactly_zero.to_string(),
            format!("{:?}", f.good_values),
            format!("{:?}", f.frac_sums),
            f.satisfied.to_string(),
        ]);
    }
    let body = render(
        cli,
        tol,
        "scan-claim1",
        json!({"m_max": m_max}),
        serde_json::to_value(&report)?,
        Some(table),
    )?;
    let code = if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    };
    Ok((body, code))
}

fn cmd_enumerate(cli: &Cli, tol: &Tolerances) -> Result<(String, ExitCode)> {
    let configs = enumerate_configs();
    let mut table = Table::new(vec!["r", "s", "r_star", "r_zero"]);
    for (r, s, rs, rz) in &configs {
        table.push(vec![
            r.to_string(),
            s.to_string(),
            rs.to_string(),
            rz.to_string(),
        ]);
    }
    let body = render(
        cli,
        tol,
        "enumerate",
        json!({}),
        serde_json::to_value(&configs)?,
        Some(table),
    )?;
    Ok((body, ExitCode::SUCCESS))
}
