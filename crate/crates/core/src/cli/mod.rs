//! The `entangle` command line: `params`, `check`, `lift`, `scan`, `tower`.
//!
//! Exit codes: 0 success, 2 validation, 3 budget exceeded, 4 I/O failure.

pub mod report;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::cmparams::{fundamental_discriminants, phi_delta, validate_order, OrderParams, Parity};
use crate::entangle::{
    build_det_lift, n0_search, reduction_kernel, verify_level, NormalizerSpec, Tower,
};
use crate::error::Error;
use crate::matgroup::{FiniteGroup, Mat2, DEFAULT_BUDGET};
use crate::modarith::prime_power;
use report::{
    CheckParams, CheckReport, LevelCsvRow, LevelRow, LiftOut, ParamsOut, ScanRow, SCAN_HEADER,
};

pub const BUDGET_ENV: &str = "ENTANGLE_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "entangle", version)]
#[command(about = "Cartan normalizers in GL2(Z/mZ) and determinant lifts along reduction towers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ParityArg {
    Even,
    Odd,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print (phi, delta) for an order and a modulus parity
    Params {
        #[arg(long, allow_negative_numbers = true)]
        disc: i64,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        conductor: i64,
        #[arg(long, value_enum, default_value = "even")]
        parity: ParityArg,
    },
    /// Run every level verdict on a full normalizer tower
    Check(CheckArgs),
    /// Evaluate the determinant lift at one element
    Lift {
        #[arg(long, allow_negative_numbers = true)]
        delta: i64,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        phi: i64,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long)]
        n: u32,
        /// Row-major "a11,a12,a21,a22"
        #[arg(long, allow_hyphen_values = true)]
        element: String,
    },
    /// Kernel verdicts for every order in a discriminant range, as CSV
    Scan {
        #[arg(long, allow_negative_numbers = true)]
        disc_min: i64,
        #[arg(long, allow_negative_numbers = true)]
        disc_max: i64,
        #[arg(long, default_value_t = 1)]
        f_max: i64,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 6)]
        n_max: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every level verdict on a tower given by generators per level
    Tower {
        /// JSON object mapping level "n" to a list of "a11,a12,a21,a22" strings
        #[arg(long)]
        generators_file: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n_max: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["disc", "delta"])))]
pub struct CheckArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub disc: Option<i64>,
    #[arg(
        long,
        default_value_t = 1,
        allow_negative_numbers = true,
        requires = "disc"
    )]
    pub conductor: i64,
    #[arg(long, allow_negative_numbers = true, conflicts_with = "disc")]
    pub delta: Option<i64>,
    #[arg(
        long,
        default_value_t = 0,
        allow_negative_numbers = true,
        requires = "delta"
    )]
    pub phi: i64,
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub n_min: u32,
    #[arg(long, default_value_t = 6)]
    pub n_max: u32,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] Error),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("writing output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(Error::ClosureBudgetExceeded(_)) => 3,
            CliError::Domain(_) | CliError::Invalid(_) => 2,
            CliError::Io { .. } | CliError::Output(_) => 4,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Reads the element budget from `ENTANGLE_BUDGET`, falling back to the default.
pub fn budget_from_env() -> CliResult<usize> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Invalid(format!("{BUDGET_ENV}={v:?} is not a count"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

pub fn run(cli: Cli, budget: usize, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Params {
            disc,
            conductor,
            parity,
        } => cmd_params(disc, conductor, parity.into(), out),
        Command::Check(args) => cmd_check(&args, budget, out),
        Command::Lift {
            delta,
            phi,
            p,
            n,
            element,
        } => cmd_lift(delta, phi, p, n, &element, budget, out),
        Command::Scan {
            disc_min,
            disc_max,
            f_max,
            p,
            n_max,
            out: path,
        } => {
            let rows = scan_rows(disc_min, disc_max, f_max, p, n_max, budget)?;
            write_scan_csv(&path, &rows)?;
            writeln!(
                out,
                "{}",
                serde_json::json!({"out": path.display().to_string(), "rows": rows.len()})
            )?;
            Ok(())
        }
        Command::Tower {
            generators_file,
            p,
            n_max,
            format,
        } => cmd_tower(&generators_file, p, n_max, format, budget, out),
    }
}

fn write_json<T: serde::Serialize>(value: &T, out: &mut dyn Write) -> CliResult<()> {
    serde_json::to_writer(&mut *out, value).map_err(|e| CliError::Output(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

pub fn cmd_params(disc: i64, conductor: i64, parity: Parity, out: &mut dyn Write) -> CliResult<()> {
    let order = validate_order(disc, conductor)?;
    write_json(&ParamsOut::from(&phi_delta(&order, parity)), out)
}

fn check_range(p: u64, n_min: u32, n_max: u32) -> CliResult<()> {
    if n_min < 1 {
        return Err(CliError::Invalid("--n-min must be at least 1".into()));
    }
    if n_min > n_max {
        return Err(CliError::Invalid("--n-min exceeds --n-max".into()));
    }
    // level n_max + 1 is needed for the kernel at n_max
    prime_power(p, n_max + 1)?;
    Ok(())
}

/// Verdicts for `n_min..=n_max` plus the `n₀` search over the same range.
fn tower_report(tower: &Tower, params: CheckParams) -> CliResult<CheckReport> {
    let (n_min, n_max) = (params.n_min, params.n_max);
    let levels = (n_min..=n_max)
        .into_par_iter()
        .map(|n| verify_level(tower, n).map(|v| LevelRow::from(&v)))
        .collect::<Result<Vec<_>, _>>()?;
    let n0 = n0_search(tower, n_max)?.n0;
    Ok(CheckReport { params, levels, n0 })
}

fn emit_report(report: &CheckReport, format: Format, out: &mut dyn Write) -> CliResult<()> {
    match format {
        Format::Json => write_json(report, out),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in &report.levels {
                w.serialize(LevelCsvRow::new(row, report.n0))?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

pub fn check_report(args: &CheckArgs, budget: usize) -> CliResult<CheckReport> {
    check_range(args.p, args.n_min, args.n_max)?;
    let parity = Parity::of(args.p);
    let (spec, params) = match (args.disc, args.delta) {
        (Some(disc), _) => {
            let order = validate_order(disc, args.conductor)?;
            let pd = ParamsOut::from(&phi_delta(&order, parity));
            (
                NormalizerSpec::Order(order),
                CheckParams {
                    source: "order",
                    p: args.p,
                    n_min: args.n_min,
                    n_max: args.n_max,
                    delta_k: Some(order.delta_k()),
                    f: Some(order.conductor()),
                    order_disc: Some(order.order_disc()),
                    phi: Some(pd.phi),
                    delta: Some(pd.delta),
                    delta_denominator: pd.delta_denominator,
                },
            )
        }
        (None, Some(delta)) => (
            NormalizerSpec::Raw {
                delta,
                phi: args.phi,
            },
            CheckParams {
                source: "raw",
                p: args.p,
                n_min: args.n_min,
                n_max: args.n_max,
                delta_k: None,
                f: None,
                order_disc: None,
                phi: Some(args.phi),
                delta: Some(delta),
                delta_denominator: None,
            },
        ),
        (None, None) => return Err(CliError::Invalid("need --disc or --delta".into())),
    };
    let tower = Tower::full_normalizer(args.p, spec, args.n_min, args.n_max + 1, budget)?;
    tower_report(&tower, params)
}

pub fn cmd_check(args: &CheckArgs, budget: usize, out: &mut dyn Write) -> CliResult<()> {
    let report = check_report(args, budget)?;
    emit_report(&report, args.format, out)
}

pub fn lift_value(
    delta: i64,
    phi: i64,
    p: u64,
    n: u32,
    element: &str,
    budget: usize,
) -> CliResult<LiftOut> {
    check_range(p, n.max(1), n)?;
    let tower = Tower::full_normalizer(p, NormalizerSpec::Raw { delta, phi }, n, n + 1, budget)?;
    let g = Mat2::parse(element, prime_power(p, n)?)?;
    if !tower.level(n)?.contains(&g) {
        return Err(Error::ElementNotInGroup(g.to_string()).into());
    }
    let lift = build_det_lift(&tower, n)?;
    let value = lift.evaluate(&g)?;
    Ok(LiftOut {
        element: g.to_string(),
        lift: value.value(),
        modulus: value.modulus(),
    })
}

pub fn cmd_lift(
    delta: i64,
    phi: i64,
    p: u64,
    n: u32,
    element: &str,
    budget: usize,
    out: &mut dyn Write,
) -> CliResult<()> {
    write_json(&lift_value(delta, phi, p, n, element, budget)?, out)
}

fn scan_order(order: OrderParams, p: u64, n_max: u32, budget: usize) -> CliResult<Vec<ScanRow>> {
    let spec = NormalizerSpec::Order(order);
    let tower = Tower::full_normalizer(p, spec, 1, n_max + 1, budget)?;
    let n0 = n0_search(&tower, n_max)?.n0;
    (1..=n_max)
        .map(|n| {
            let top = prime_power(p, n + 1)?;
            let params = spec.params_at::<u64>(top)?;
            let k = reduction_kernel(&tower, n)?;
            Ok(ScanRow {
                delta_k: order.delta_k(),
                f: order.conductor(),
                order_disc: order.order_disc(),
                p,
                phi_mod: params.phi().value(),
                delta_mod: params.delta().value(),
                n,
                kernel_size: k.kernel_elements.len(),
                in_sl2: k.in_sl2,
                witness: k.witness.map(|w| w.element.to_string()),
                witness_det: k.witness.map(|w| w.det.value()),
                n0,
            })
        })
        .collect()
}

/// Rows for every valid order with `Δ_K ∈ [disc_min, disc_max]` and
/// `f ∈ [1, f_max]`, sorted by `(order_disc, p, n)`.
pub fn scan_rows(
    disc_min: i64,
    disc_max: i64,
    f_max: i64,
    p: u64,
    n_max: u32,
    budget: usize,
) -> CliResult<Vec<ScanRow>> {
    check_range(p, 1, n_max)?;
    let orders: Vec<OrderParams> = fundamental_discriminants(disc_min, disc_max)
        .into_iter()
        .flat_map(|d| (1..=f_max).map(move |f| validate_order(d, f)))
        .collect::<Result<_, _>>()?;
    let mut rows: Vec<ScanRow> = orders
        .into_par_iter()
        .map(|o| scan_order(o, p, n_max, budget))
        .collect::<CliResult<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    rows.sort_by_key(|r| (r.order_disc, r.p, r.n, r.delta_k, r.f));
    Ok(rows)
}

pub fn write_scan_csv(path: &Path, rows: &[ScanRow]) -> CliResult<()> {
    let io_err = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    w.write_record(SCAN_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

/// Parses the generators file: level `"n"` → matrices modulo `p^n`.
pub fn parse_generators(text: &str, p: u64) -> CliResult<BTreeMap<u32, Vec<Mat2>>> {
    let raw: BTreeMap<String, Vec<String>> =
        serde_json::from_str(text).map_err(|e| CliError::Invalid(e.to_string()))?;
    raw.into_iter()
        .map(|(k, gens)| {
            let n: u32 = k
                .trim()
                .parse()
                .map_err(|_| CliError::Invalid(format!("level {k:?} is not an integer")))?;
            let m = prime_power(p, n)?;
            let gens = gens
                .iter()
                .map(|s| Mat2::parse(s, m))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((n, gens))
        })
        .collect()
}

pub fn tower_file_report(path: &Path, p: u64, n_max: u32, budget: usize) -> CliResult<CheckReport> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let gens = parse_generators(&text, p)?;
    let tower = Tower::generated(p, &gens, budget)?;
    let n_min = tower
        .min_level()
        .ok_or_else(|| CliError::Invalid("generators file has no levels".into()))?;
    check_range(p, n_min, n_max)?;
    let params = CheckParams {
        source: "generated",
        p,
        n_min,
        n_max,
        delta_k: None,
        f: None,
        order_disc: None,
        phi: None,
        delta: None,
        delta_denominator: None,
    };
    tower_report(&tower, params)
}

pub fn cmd_tower(
    path: &Path,
    p: u64,
    n_max: u32,
    format: Format,
    budget: usize,
    out: &mut dyn Write,
) -> CliResult<()> {
    let report = tower_file_report(path, p, n_max, budget)?;
    emit_report(&report, format, out)
}
