//! `quadgap`: experiments on prime gaps in imaginary quadratic fields.
//!
//! Exit codes: 0 success, 1 I/O or other runtime failure, 2 incomplete
//! covering or failed verification (diagnostics as JSON on stderr), 3 budget
//! refusal, 64 bad usage or parameters.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use quadgap::csvout::{self, write_table};
use quadgap::dto::{
    self, CertificateDoc, Diagnostic, FieldInfoDoc, GapDoc, PlanSummary, RandselDoc, SieveDoc, SumWDoc,
    BIGINT_ENCODING,
};
use quadgap::{par, verify};
use quadgap_core::covering::{
    build_plan_with, certify, default_y, reconstruct_center, CenterMode, CoverError, CoverParams, Strategy,
};
use quadgap_core::growth::{growth_table, Comparator};
use quadgap_core::ideals::{pi_g, primes_in_norm_range};
use quadgap_core::norm_sieve::{for_each_prime_element, verify_gap_record, GAP_MAX_X};
use quadgap_core::numeric::li;
use quadgap_core::randsel::{
    default_offsets, sigma_of, weight_tables,
    RandomStageConfig, SecondStage, DEFAULT_TOLERANCE,
};
use quadgap_core::smooth::{psi_k, SMOOTH_MAX_X};
use quadgap_core::weights::{admissible, c_k_truncated, TupleConfig, WeightContext, WeightParams};
use quadgap_core::{Error, FieldDesc};

const EXIT_FAILED: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// Largest norm bound the `sieve` command accepts.
const SIEVE_MAX: u64 = 100_000_000;

#[derive(Parser, Debug)]
#[command(name = "quadgap", version, about = "Prime gaps in imaginary quadratic fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Discriminant, minimal polynomial, unit count and class number.
    FieldInfo(FieldArgs),
    /// Counts prime elements and prime ideals with norm in (lo, hi].
    Sieve(SieveArgs),
    /// Largest prime-free norm ball centered at norm <= X.
    Gaps(GapsArgs),
    /// Builds a covering plan and a prime-free ball certificate.
    Cover(CoverArgs),
    /// Smooth ideal counts against the envelope x exp(-u log u).
    Smooth(SmoothArgs),
    /// Sieve weight quantities.
    Weights {
        #[command(subcommand)]
        command: WeightsCommand,
    },
    /// Random residue selection experiment.
    Randsel(RandselArgs),
    /// Checks a certificate file independently of the construction.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Serialize)]
struct FieldArgs {
    /// Squarefree negative integer.
    #[arg(long, allow_hyphen_values = true)]
    d: i64,
    /// Class number, required when d is not in the built-in table.
    #[arg(long)]
    class_number: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct SieveArgs {
    #[arg(long, allow_hyphen_values = true)]
    d: i64,
    #[arg(long)]
    class_number: Option<u32>,
    #[arg(long, default_value_t = 0)]
    lo: u64,
    #[arg(long)]
    hi: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct GapsArgs {
    #[arg(long, allow_hyphen_values = true)]
    d: i64,
    #[arg(long)]
    class_number: Option<u32>,
    /// Center norm bounds; several values make a sweep.
    #[arg(long = "X", value_delimiter = ',', required = true)]
    x: Vec<u64>,
    /// Refuse X above this.
    #[arg(long = "max-X", default_value_t = GAP_MAX_X)]
    max_x: u64,
    /// JSON output: one record, or an array for a sweep.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Growth table (x, achieved, comparator, ratio).
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Cmp::Mainthm)]
    comparator: Cmp,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Cmp {
    Mainthm,
    Suffices,
    Log,
}

impl Cmp {
    fn get(self) -> Comparator {
        match self {
            Cmp::Mainthm => Comparator::MainTheorem,
            Cmp::Suffices => Comparator::Suffices,
            Cmp::Log => Comparator::TrivialLog,
        }
    }
}

#[derive(Args, Debug, Serialize)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct CoverArgs {
    #[command(subcommand)]
    #[serde(skip)]
    action: Option<CoverAction>,
    #[arg(long, allow_hyphen_values = true, required = true)]
    d: Option<i64>,
    #[arg(long)]
    class_number: Option<u32>,
    /// Prime ideals of norm <= x receive residues.
    #[arg(long, required = true)]
    x: Option<u64>,
    /// Target radius; defaults to x (log x / log_2 x) log_3 x, or 2x for small x.
    #[arg(long)]
    y: Option<u64>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Greedy)]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Phase thresholds: desk-scale defaults or the asymptotic formulas.
    #[arg(long, value_enum, default_value_t = Mode::Desk)]
    mode: Mode,
    #[arg(long, value_enum, default_value_t = CenterArg::Minimal)]
    center_mode: CenterArg,
    /// On an incomplete covering, certify the ball the partial plan covers
    /// instead of failing.
    #[arg(long)]
    allow_partial: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum CoverAction {
    /// Same as the top-level `verify`.
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum StrategyArg {
    Trivial,
    Random,
    Greedy,
    Weighted,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Desk,
    Asymptotic,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum CenterArg {
    Minimal,
    Fidelity,
}

#[derive(Args, Debug, Serialize)]
struct SmoothArgs {
    #[arg(long, allow_hyphen_values = true)]
    d: i64,
    #[arg(long)]
    class_number: Option<u32>,
    #[arg(long)]
    x: u64,
    #[arg(long, required_unless_present = "grid")]
    y: Option<u64>,
    /// x, x/10, x/100 against u in {1.5, 2, 3, 4}.
    #[arg(long)]
    grid: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum WeightsCommand {
    /// I_k, J_k and M_k by importance sampling.
    Mk(MkArgs),
    /// Sum of the sieve weights over N < N(n) <= 2N.
    Sumw(SumwArgs),
}

#[derive(Args, Debug, Serialize)]
struct MkArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct SumwArgs {
    #[arg(long, allow_hyphen_values = true)]
    d: i64,
    #[arg(long)]
    class_number: Option<u32>,
    #[arg(long)]
    k: usize,
    #[arg(long = "N")]
    n: u64,
    #[arg(long)]
    z: u64,
    #[arg(long = "R")]
    r: u64,
    /// Offsets as `a,b;a,b;...`; defaults to the first admissible ones.
    #[arg(long, allow_hyphen_values = true)]
    offsets: Option<String>,
    #[arg(long, default_value_t = 200_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct RandselArgs {
    #[arg(long, allow_hyphen_values = true)]
    d: i64,
    #[arg(long)]
    class_number: Option<u32>,
    #[arg(long)]
    x: u64,
    #[arg(long, default_value_t = 200)]
    trials: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = StageArg::Greedy)]
    second_stage: StageArg,
    /// Trials that also run the second stage.
    #[arg(long, default_value_t = 10)]
    second_stage_trials: u32,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum StageArg {
    Greedy,
    Weighted,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    file: PathBuf,
}

/// A run that ended without an exception but with a non-success status.
struct Failed(Diagnostic);

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = par::pool().install(|| run(cli.command));
    match result {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(Failed(diag))) => {
            eprintln!("{}", serde_json::to_string_pretty(&diag).expect("diagnostic serializes"));
            ExitCode::from(diag.exit_code as u8)
        }
        Err(e) => {
            let code = match e.downcast_ref::<Error>() {
                Some(Error::Budget { .. }) => EXIT_BUDGET,
                Some(_) => EXIT_USAGE,
                None => 1,
            };
            let diag = Diagnostic {
                status: if code == EXIT_BUDGET { "budget" } else { "error" }.into(),
                exit_code: code as i32,
                message: format!("{e:#}"),
                details: Value::Null,
            };
            eprintln!("{}", serde_json::to_string_pretty(&diag).expect("diagnostic serializes"));
            ExitCode::from(code)
        }
    }
}

fn run(cmd: Command) -> anyhow::Result<Option<Failed>> {
    match cmd {
        Command::FieldInfo(a) => field_info(a),
        Command::Sieve(a) => sieve(a),
        Command::Gaps(a) => gaps(a),
        Command::Cover(a) => match a.action {
            Some(CoverAction::Verify(v)) => verify_file(&v.file),
            None => cover(a),
        },
        Command::Smooth(a) => smooth(a),
        Command::Weights { command: WeightsCommand::Mk(a) } => weights_mk(a),
        Command::Weights { command: WeightsCommand::Sumw(a) } => weights_sumw(a),
        Command::Randsel(a) => randsel(a),
        Command::Verify(a) => verify_file(&a.file),
    }
}

fn field(d: i64, class_number: Option<u32>) -> Result<FieldDesc, Error> {
    match class_number {
        Some(h) => FieldDesc::with_class_number(d, h),
        None => FieldDesc::new(d),
    }
}

/// The resolved configuration stored in every output header.
fn config<T: Serialize>(command: &str, args: &T, extra: Value) -> Value {
    let mut v = json!({
        "tool": "quadgap",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "bigint": BIGINT_ENCODING,
    });
    let map = v.as_object_mut().expect("object");
    if let Value::Object(a) = serde_json::to_value(args).expect("arguments serialize") {
        map.extend(a.into_iter().filter(|(k, _)| k != "out" && k != "csv"));
    }
    if let Value::Object(e) = extra {
        map.extend(e);
    }
    v
}

fn write_json<T: Serialize>(path: Option<&Path>, doc: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(doc)? + "\n";
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

fn write_csv(path: Option<&Path>, cfg: &Value, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            let f = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            write_table(std::io::BufWriter::new(f), cfg, header, rows)
        }
        None => write_table(std::io::stdout().lock(), cfg, header, rows),
    }
}

fn field_info(a: FieldArgs) -> anyhow::Result<Option<Failed>> {
    let k = field(a.d, a.class_number)?;
    let (t, n) = k.min_poly();
    println!("d={} disc={} min_poly=w^2-{t}w+{n} |U|={} h={}", k.d, k.disc, k.unit_count, k.class_number);
    if let Some(p) = &a.out {
        let doc = FieldInfoDoc {
            schema: "quadgap/field-info/v1".into(),
            bigint: BIGINT_ENCODING.into(),
            config: config("field-info", &a, Value::Null),
            d: k.d,
            disc: k.disc,
            min_poly: [t, n],
            unit_count: k.unit_count,
            class_number: k.class_number,
        };
        write_json(Some(p), &doc)?;
    }
    Ok(None)
}

fn sieve(a: SieveArgs) -> anyhow::Result<Option<Failed>> {
    let k = field(a.d, a.class_number)?;
    if a.hi > SIEVE_MAX {
        return Err(Error::Budget { what: "sieve bound", limit: SIEVE_MAX, requested: a.hi }.into());
    }
    if a.lo > a.hi {
        return Err(Error::InvalidParameter("need lo <= hi").into());
    }
    let mut elements = 0u64;
    for_each_prime_element(&k, a.lo, a.hi, |_, _| elements += 1);
    let ideals = primes_in_norm_range(&k, a.lo, a.hi).len() as u64;
    let landau_ratio = if a.hi >= 2 { pi_g(&k, a.hi) as f64 / li(a.hi as f64) } else { 0.0 };
    let doc = SieveDoc {
        schema: "quadgap/sieve/v1".into(),
        bigint: BIGINT_ENCODING.into(),
        config: config("sieve", &a, Value::Null),
        d: k.d,
        lo: a.lo,
        hi: a.hi,
        prime_elements: elements,
        prime_ideals: ideals,
        landau_ratio,
    };
    write_json(a.out.as_deref(), &doc)?;
    Ok(None)
}

fn gaps(a: GapsArgs) -> anyhow::Result<Option<Failed>> {
    let k = field(a.d, a.class_number)?;
    let cfg = config("gaps", &a, Value::Null);
    let mut docs = Vec::new();
    let mut series = Vec::new();
    for &x in &a.x {
        let rec = par::gap_search(&k, x, a.max_x)?;
        let ok = verify_gap_record(&k, &rec)?;
        series.push((x, rec.radius as f64));
        docs.push(GapDoc::new(&k, &rec, ok, cfg.clone()));
    }
    if let Some(path) = &a.csv {
        let rows = growth_table(&series, a.comparator.get());
        write_csv(Some(path), &cfg, &csvout::GROWTH_HEADER, &csvout::growth_rows(&rows))?;
    }
    if a.out.is_some() || a.csv.is_none() {
        if docs.len() == 1 {
            write_json(a.out.as_deref(), &docs[0])?;
        } else {
            write_json(a.out.as_deref(), &docs)?;
        }
    }
    if let Some(bad) = docs.iter().find(|d| !d.verified) {
        return Ok(Some(Failed(Diagnostic {
            status: "gap-record-unverified".into(),
            exit_code: EXIT_FAILED as i32,
            message: format!("gap record for X = {} failed re-verification", bad.x),
            details: serde_json::to_value(bad)?,
        })));
    }
    Ok(None)
}

fn cover(a: CoverArgs) -> anyhow::Result<Option<Failed>> {
    let (d, x) = (a.d.expect("required"), a.x.expect("required"));
    let k = field(d, a.class_number)?;
    let y = a.y.unwrap_or_else(|| default_y(x, 1.0));
    let strategy = match a.strategy {
        StrategyArg::Trivial => Strategy::Trivial,
        StrategyArg::Random => Strategy::Random,
        StrategyArg::Greedy => Strategy::Greedy,
        StrategyArg::Weighted => Strategy::Weighted,
    };
    let params = match a.mode {
        Mode::Desk => CoverParams::desk(x),
        Mode::Asymptotic => CoverParams::asymptotic(x),
    };
    let cfg = config("cover", &a, json!({ "y": y, "t_small": params.t_small, "z0": params.z0 }));
    let (plan, complete) = match build_plan_with(&k, x, y, strategy, a.seed, params) {
        Ok(p) => (p, true),
        Err(CoverError::Core(e)) => return Err(e.into()),
        Err(CoverError::Incomplete { plan, .. }) if a.allow_partial => (*plan, false),
        Err(CoverError::Incomplete { plan, leftovers }) => {
            return Ok(Some(Failed(Diagnostic {
                status: "cover-incomplete".into(),
                exit_code: EXIT_FAILED as i32,
                message: format!("matching band exhausted with {} elements uncovered", leftovers.len()),
                details: json!({
                    "config": cfg,
                    "leftover_count": leftovers.len(),
                    "leftovers": leftovers.iter().map(dto::elem_dto).collect::<Vec<_>>(),
                    "covered_radius": plan.covered_radius(),
                }),
            })));
        }
    };
    let radius = plan.covered_radius();
    let mode = match a.center_mode {
        CenterArg::Minimal => CenterMode::Minimal,
        CenterArg::Fidelity => CenterMode::Fidelity,
    };
    let rc = match reconstruct_center(&plan, radius, mode) {
        Ok(rc) => rc,
        Err(CoverError::Core(e)) => return Err(e.into()),
        Err(e) => anyhow::bail!("{e}"),
    };
    let cert = certify(&k, &rc.center, radius, x)?;
    let summary = PlanSummary {
        strategy: plan.strategy.as_str().into(),
        seed: plan.seed,
        x,
        y,
        entries: plan.entries.len(),
        complete,
        covered_radius: radius,
        covered_count: plan.covered_count(),
        modulus: dto::JsonInt(rc.modulus.clone()),
        translate: rc.translate,
    };
    let doc = CertificateDoc::new(&cert, Some(summary), cfg);
    write_json(a.out.as_deref(), &doc)?;
    if !cert.verified {
        return Ok(Some(Failed(Diagnostic {
            status: "certificate-unverified".into(),
            exit_code: EXIT_FAILED as i32,
            message: format!("{} offsets lack a witness", cert.failures.len()),
            details: json!({ "failures": doc.failures }),
        })));
    }
    Ok(None)
}

fn verify_file(path: &Path) -> anyhow::Result<Option<Failed>> {
    let fail = |message: String, details: Value| {
        Ok(Some(Failed(Diagnostic { status: "verify-failed".into(), exit_code: EXIT_FAILED as i32, message, details })))
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: CertificateDoc = match serde_json::from_str(&text) {
        Ok(d) => d,
        Err(e) => return fail(format!("malformed certificate: {e}"), Value::Null),
    };
    let rep = verify::verify_certificate(&doc);
    if rep.ok() {
        println!("verified: {} offsets, radius {}, x = {}", rep.checked_offsets, doc.radius, doc.prime_bound_x);
        Ok(None)
    } else {
        fail(
            format!("{} problems found", rep.problems.len() + rep.suppressed),
            json!({ "problems": rep.problems, "suppressed": rep.suppressed }),
        )
    }
}

fn smooth(a: SmoothArgs) -> anyhow::Result<Option<Failed>> {
    let k = field(a.d, a.class_number)?;
    let grid: Vec<(u64, u64)> = if a.grid {
        let mut g = Vec::new();
        for x in [a.x, a.x / 10, a.x / 100] {
            if x < 10 {
                continue;
            }
            for u in [1.5f64, 2.0, 3.0, 4.0] {
                let y = (x as f64).powf(1.0 / u).round() as u64;
                g.push((x, y.max(2)));
            }
        }
        g
    } else {
        vec![(a.x, a.y.expect("required without --grid"))]
    };
    let mut rows = Vec::new();
    for &(x, y) in &grid {
        if x > SMOOTH_MAX_X {
            return Err(Error::Budget { what: "smooth count x", limit: SMOOTH_MAX_X, requested: x }.into());
        }
        let c = psi_k(&k, x, y)?;
        rows.push(vec![
            c.x.to_string(),
            c.y.to_string(),
            c.u.to_string(),
            c.count.to_string(),
            c.envelope.to_string(),
            c.ratio().to_string(),
        ]);
    }
    let cfg = config("smooth", &a, Value::Null);
    write_csv(a.out.as_deref(), &cfg, &["x", "y", "u", "count", "envelope", "ratio"], &rows)?;
    Ok(None)
}

fn weights_mk(a: MkArgs) -> anyhow::Result<Option<Failed>> {
    let mut rows = Vec::new();
    for &k in &a.k {
        let r = par::ik_jk(k, a.samples, a.seed)?;
        rows.push(vec![
            k.to_string(),
            r.samples.to_string(),
            r.i_k.to_string(),
            r.i_se.to_string(),
            r.j_k.to_string(),
            r.j_se.to_string(),
            r.m_k.to_string(),
            r.m_se.to_string(),
            r.flagged.to_string(),
        ]);
    }
    let cfg = config("weights mk", &a, Value::Null);
    let header = ["k", "samples", "i_k", "i_se", "j_k", "j_se", "m_k", "m_se", "flagged"];
    write_csv(a.out.as_deref(), &cfg, &header, &rows)?;
    Ok(None)
}

fn parse_offsets(s: &str) -> anyhow::Result<Vec<(i64, i64)>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (a, b) = p.split_once(',').ok_or(Error::InvalidParameter("offsets are a,b pairs separated by ';'"))?;
            Ok((a.trim().parse()?, b.trim().parse()?))
        })
        .collect()
}

fn weights_sumw(a: SumwArgs) -> anyhow::Result<Option<Failed>> {
    let k = field(a.d, a.class_number)?;
    let offsets = match &a.offsets {
        Some(s) => parse_offsets(s).map_err(|e| e.context(Error::InvalidParameter("bad --offsets")))?,
        None => default_offsets(&k, a.k, a.z)?,
    };
    if offsets.len() != a.k {
        return Err(Error::InvalidParameter("--offsets must list exactly k pairs").into());
    }
    let tuple = TupleConfig::from_offsets(&k, &offsets)?;
    let is_admissible = admissible(&tuple, a.z);
    let params = WeightParams::desk(&k, a.n, a.z, a.r)?;
    let ctx = WeightContext::new(tuple, params)?;
    let rep = ctx.sum_w(a.samples, a.seed)?;
    let quad = par::ik_jk(a.k, a.samples, a.seed)?;
    let u = params.theta / 8.0 * c_k_truncated(&k, a.z) * quad.m_k;
    let doc = SumWDoc {
        schema: "quadgap/sumw/v1".into(),
        bigint: BIGINT_ENCODING.into(),
        config: config("weights sumw", &a, json!({ "level_d": params.d, "theta": params.theta })),
        d: k.d,
        offsets: offsets.iter().map(|&(x, y)| [x, y]).collect(),
        admissible: is_admissible,
        n: a.n,
        z: a.z,
        r: a.r,
        level_d: params.d,
        support_size: ctx.support.len(),
        max_abs_lambda: ctx.max_abs_lambda(),
        elements: rep.elements,
        sum_w: rep.sum_w,
        sum_w_prime: rep.sum_w_prime,
        negative_points: rep.negative_points,
        v: rep.v,
        lattice_factor: rep.lattice_factor,
        xi_energy: rep.xi_energy,
        predicted_sum: rep.predicted_sum,
        predicted_sum_asymptotic: rep.predicted_sum_asymptotic,
        predicted_prime_sum: rep.predicted_prime_sum,
        ratio: rep.sum_w / (rep.lattice_factor * rep.predicted_sum),
        prime_ratio: rep.sum_w_prime / (rep.lattice_factor * rep.predicted_prime_sum),
        i_k: rep.i_k,
        m_k: quad.m_k,
        u,
    };
    write_json(a.out.as_deref(), &doc)?;
    Ok(None)
}

fn randsel(a: RandselArgs) -> anyhow::Result<Option<Failed>> {
    let k = field(a.d, a.class_number)?;
    let mut cfg = RandomStageConfig::desk(&k, a.x)?;
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.tolerance = a.tolerance;
    cfg.validate()?;
    let sigma = sigma_of(&cfg);
    let stats = par::survival_experiment(&cfg);
    let stage = match a.second_stage {
        StageArg::Greedy => SecondStage::Greedy,
        StageArg::Weighted => SecondStage::Weighted,
    };
    let p_primes = cfg.p_primes();
    let (states, _) = par::selections(&cfg, a.second_stage_trials.min(a.trials));
    let mut accepted_fraction = Vec::new();
    let mut excluded = Vec::new();
    let leftovers = match stage {
        SecondStage::Greedy => par::greedy_leftovers(&p_primes, &states),
        SecondStage::Weighted => {
            let tables = weight_tables(&cfg, &p_primes)?;
            excluded = tables.excluded.iter().map(|(p, why)| format!("{p}: {why:?}")).collect();
            let runs = par::weighted_runs(&cfg, &tables, sigma.value, &states);
            accepted_fraction = runs.iter().map(|r| r.0).collect();
            runs.into_iter().map(|r| r.1).collect()
        }
    };
    let doc = RandselDoc {
        schema: "quadgap/randsel/v1".into(),
        bigint: BIGINT_ENCODING.into(),
        config: config(
            "randsel",
            &a,
            json!({
                "y": cfg.y,
                "s_band": [cfg.s_band.0, cfg.s_band.1],
                "p_band": [cfg.p_band.0, cfg.p_band.1],
                "weight_z": cfg.weight_z,
                "weight_r": cfg.weight_r,
            }),
        ),
        d: k.d,
        x: cfg.x,
        y: cfg.y,
        s_band: [cfg.s_band.0, cfg.s_band.1],
        p_band: [cfg.p_band.0, cfg.p_band.1],
        offsets: cfg.offsets.iter().map(|&(x, y)| [x, y]).collect(),
        sigma: sigma.value,
        sigma_asymptotic: sigma.asymptotic,
        s_primes: sigma.primes,
        p_primes: p_primes.len(),
        q_count: stats.q_count,
        trials: cfg.trials,
        mean_ratio: stats.mean_ratio,
        spread: stats.spread,
        survivors: stats.counts,
        second_stage: stage.as_str().into(),
        leftovers,
        excluded,
        accepted_fraction,
    };
    write_json(a.out.as_deref(), &doc)?;
    Ok(None)
}
