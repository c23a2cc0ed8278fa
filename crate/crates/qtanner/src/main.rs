use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use qtanner_core::channel::ErrorType;
use qtanner_core::complex::{check_tnc, FaceMode, GeneratorSets, TannerCode};
use qtanner_core::decode::{Decoder, Prior};
use qtanner_core::lead::LeadDecoder;
use qtanner_core::BitVec;

use qtanner::analysis::{gains, gains_to_csv, AnalysisError};
use qtanner::config::{build_code, load_code, ConstructSpec, DecoderChoice, DecoderSpec, ExperimentSpec};
use qtanner::group_file::resolve_group;
use qtanner::harness::{self, code_id, OutputPaths, PointRecord};
use qtanner::qtc;

const EXIT_RUNTIME: u8 = 1;
const EXIT_CONSTRUCTION: u8 = 2;
const EXIT_ANALYSIS: u8 = 3;
const EXIT_CONFIG: u8 = 4;

/// An error with the exit code it maps to.
struct Failure(u8, anyhow::Error);

trait ExitWith<T> {
    fn exit_with(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> ExitWith<T> for Result<T, E> {
    fn exit_with(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure(code, e.into()))
    }
}

type CmdResult = Result<(), Failure>;

#[derive(Parser)]
#[command(name = "qtanner", version, about = "Quantum Tanner codes: construction, decoding and Monte Carlo benchmarks")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code from a left-right Cayley complex and write a .qtc file.
    Construct(ConstructArgs),
    /// Check a .qtc file and print its parameters.
    Validate { file: PathBuf },
    /// Read a .qtc file (covers optional) and write it in canonical form.
    Import {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment config over its p grid.
    Simulate(RunArgs),
    /// Like `simulate`, and also report LER trends that break monotonicity.
    Sweep(RunArgs),
    /// Compare a baseline and a LEAD result file.
    Analyze(AnalyzeArgs),
    /// Decode a single syndrome and print the estimate.
    DecodeOne(DecodeOneArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// `cyclic:<n>` or a multiplication-table file.
    #[arg(long)]
    group: String,
    #[arg(long)]
    delta: Option<usize>,
    #[arg(long)]
    ca: String,
    /// Defaults to the dual of `--ca`.
    #[arg(long)]
    cb: Option<String>,
    #[arg(long, default_value = "tuple")]
    mode: FaceMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated element indices.
    #[arg(long, value_delimiter = ',')]
    a_set: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    b_set: Option<Vec<usize>>,
    #[arg(long)]
    name: Option<String>,
    /// Output file; defaults to `<code id>.qtc`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated error rates.
    #[arg(long, value_delimiter = ',')]
    p_grid: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    decoder: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    max_trials: Option<u64>,
    #[arg(long)]
    min_failures: Option<u64>,
    /// Result base path; `.jsonl`, `.csv` and `.timing.jsonl` are appended.
    /// Defaults to `results/<config stem>`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Rerun points already present in the result file.
    #[arg(long)]
    force: bool,
    /// Print the effective config (after overrides) and exit.
    #[arg(long)]
    dump_config: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    baseline: PathBuf,
    lead: PathBuf,
    /// Write the gain CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    baseline_decoder: Option<String>,
    #[arg(long)]
    lead_decoder: Option<String>,
}

#[derive(Args)]
struct DecodeOneArgs {
    /// Code file (.qtc).
    #[arg(long)]
    code: PathBuf,
    /// File holding the syndrome as 0/1 characters (whitespace ignored).
    #[arg(long)]
    syndrome: PathBuf,
    /// Error component the syndrome belongs to: `x` (checked by hz) or `z`
    /// (checked by hx).
    #[arg(long, value_parser = parse_error_type)]
    component: ErrorType,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value = "bp-osd")]
    decoder: String,
    #[arg(long)]
    alpha: Option<f64>,
}

fn parse_error_type(s: &str) -> Result<ErrorType, String> {
    match s.to_ascii_lowercase().as_str() {
        "x" => Ok(ErrorType::X),
        "z" => Ok(ErrorType::Z),
        _ => Err(format!("expected x or z, got `{s}`")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.cmd {
        Command::Construct(a) => cmd_construct(a),
        Command::Validate { file } => cmd_validate(&file),
        Command::Import { file, out } => cmd_import(&file, &out),
        Command::Simulate(a) => cmd_run(a, false),
        Command::Sweep(a) => cmd_run(a, true),
        Command::Analyze(a) => cmd_analyze(a),
        Command::DecodeOne(a) => cmd_decode_one(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

fn print_summary(code: &TannerCode) {
    let report = code.validate();
    println!("code      {}", code_id(code));
    println!("n, k      {}, {}", report.n, report.k);
    println!("rank      hx {}  hz {}", report.rank_hx, report.rank_hz);
    for (label, h) in [("hx", &code.hx), ("hz", &code.hz)] {
        let w: Vec<usize> = (0..h.rows()).map(|r| h.row_weight(r)).collect();
        let (min, max) = (w.iter().min().copied().unwrap_or(0), w.iter().max().copied().unwrap_or(0));
        let mean = if w.is_empty() { 0.0 } else { w.iter().sum::<usize>() as f64 / w.len() as f64 };
        println!("{label} rows   {}  weight min {min} max {max} mean {mean:.2}", h.rows());
    }
    println!("col wt    max {}", report.max_col_weight);
    println!("views     x {}  z {}", code.cover_x.len(), code.cover_z.len());
}

fn cmd_construct(a: ConstructArgs) -> CmdResult {
    let spec = ConstructSpec {
        group: a.group,
        delta: a.delta,
        ca: a.ca,
        cb: a.cb,
        mode: a.mode,
        seed: a.seed,
        a_set: a.a_set,
        b_set: a.b_set,
        name: a.name,
    };
    let code = match build_code(&spec) {
        Ok(code) => code,
        Err(e) => {
            if let Some(qtanner_core::Error::TncViolation { .. }) = e.downcast_ref() {
                report_tnc_witnesses(&spec);
            }
            return Err(Failure(EXIT_CONSTRUCTION, e));
        }
    };
    let report = code.validate();
    if !report.is_ok() {
        return Err(Failure(EXIT_CONSTRUCTION, anyhow!("constructed code failed validation: {report:?}")));
    }
    let out = a.out.unwrap_or_else(|| PathBuf::from(format!("{}.qtc", code_id(&code).replace([' ', '[', ']', '/'], "_"))));
    qtc::write_code(&code, &out).exit_with(EXIT_RUNTIME)?;
    print_summary(&code);
    println!("wrote     {}", out.display());
    Ok(())
}

fn report_tnc_witnesses(spec: &ConstructSpec) {
    let (Some(a), Some(b)) = (&spec.a_set, &spec.b_set) else { return };
    let Ok(group) = resolve_group(&spec.group) else { return };
    let Ok(gens) = GeneratorSets::new(&group, a.clone(), b.clone()) else { return };
    for (g, a, b) in check_tnc(&group, &gens).witnesses {
        eprintln!("witness: a={a} g={g} b={b} with a*g == g*b");
    }
}

fn cmd_validate(file: &Path) -> CmdResult {
    let imported = qtc::import_code(file).exit_with(EXIT_CONSTRUCTION)?;
    for w in &imported.warnings {
        eprintln!("warning: {w}");
    }
    let report = imported.code.validate();
    print_summary(&imported.code);
    println!("multiplicity x {:?}", report.multiplicity_x);
    println!("multiplicity z {:?}", report.multiplicity_z);
    if !report.is_ok() {
        return Err(Failure(EXIT_CONSTRUCTION, anyhow!("validation failed: {report:?}")));
    }
    println!("ok");
    Ok(())
}

fn cmd_import(file: &Path, out: &Path) -> CmdResult {
    let imported = qtc::import_code(file).exit_with(EXIT_CONSTRUCTION)?;
    for w in &imported.warnings {
        eprintln!("warning: {w}");
    }
    qtc::write_code(&imported.code, out).exit_with(EXIT_RUNTIME)?;
    print_summary(&imported.code);
    println!("wrote     {}", out.display());
    Ok(())
}

fn apply_overrides(spec: &mut ExperimentSpec, a: &RunArgs) -> anyhow::Result<()> {
    if let Some(grid) = &a.p_grid {
        spec.p_grid = grid.clone();
    }
    if let Some(seed) = a.seed {
        spec.master_seed = seed;
    }
    if let Some(w) = a.workers {
        spec.workers = Some(w);
    }
    if let Some(kind) = &a.decoder {
        if *kind != spec.decoder.kind {
            spec.decoder = DecoderSpec::named(kind);
        }
    }
    if let Some(alpha) = a.alpha {
        spec.decoder.alpha = Some(alpha);
    }
    if let Some(m) = a.max_trials {
        spec.stopping.max_trials = m;
    }
    if let Some(m) = a.min_failures {
        spec.stopping.min_failures = Some(m);
    }
    spec.validate()
}

fn print_point(r: &PointRecord, wall: Option<f64>) {
    let sub = r.subcode_fer.map_or_else(|| "-".to_string(), |s| format!("{s:.4}"));
    let wall = wall.map_or_else(|| "skipped".to_string(), |w| format!("{w:.2}s"));
    println!(
        "{:<9} {:>8} {:>7} {:>11.4e} [{:.3e}, {:.3e}] {:>8.3} {:>8.3} {:>8} {:>8}",
        r.p, r.trials, r.failures, r.ler, r.ci_lo, r.ci_hi, r.avg_normalized_iterations, r.avg_global_iterations, sub, wall
    );
}

fn cmd_run(a: RunArgs, sweep_report: bool) -> CmdResult {
    let mut spec = ExperimentSpec::load(&a.config).exit_with(EXIT_CONFIG)?;
    apply_overrides(&mut spec, &a).exit_with(EXIT_CONFIG)?;
    if a.dump_config {
        println!("{}", spec.to_json());
        return Ok(());
    }
    let (code, warnings) = load_code(&spec.code).exit_with(EXIT_CONFIG)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let workers = harness::resolve_workers(spec.workers).exit_with(EXIT_CONFIG)?;
    let pool = harness::thread_pool(workers).exit_with(EXIT_RUNTIME)?;
    let base = a.out.clone().unwrap_or_else(|| {
        let stem = a.config.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned());
        Path::new("results").join(stem)
    });
    let out = OutputPaths::from_base(&base);
    let choice: DecoderChoice = spec.decoder.resolve().exit_with(EXIT_CONFIG)?;
    println!("code {} (n={}, k={})  decoder {}  workers {workers}", code_id(&code), code.n, code.k, choice.label());
    println!(
        "{:<9} {:>8} {:>7} {:>11} {:<25} {:>8} {:>8} {:>8} {:>8}",
        "p", "trials", "fails", "ler", "wilson 95%", "iters", "global", "subfer", "time"
    );
    let report = harness::sweep(&code, &spec, &out, a.force, &pool, print_point).exit_with(EXIT_RUNTIME)?;
    println!("results   {}", out.jsonl.display());
    if sweep_report {
        if report.warnings.is_empty() {
            println!("monotonicity: ok");
        }
        for w in &report.warnings {
            println!("monotonicity: {w}");
        }
    }
    if !report.failed.is_empty() {
        for (p, e) in &report.failed {
            eprintln!("p={p} failed: {e}");
        }
        return Err(Failure(EXIT_RUNTIME, anyhow!("{} grid point(s) failed", report.failed.len())));
    }
    Ok(())
}

fn cmd_analyze(a: AnalyzeArgs) -> CmdResult {
    let base = harness::read_records(&a.baseline).exit_with(EXIT_CONFIG)?;
    let lead = harness::read_records(&a.lead).exit_with(EXIT_CONFIG)?;
    let records = gains(&base, &lead, a.baseline_decoder.as_deref(), a.lead_decoder.as_deref())
        .map_err(|e: AnalysisError| Failure(EXIT_ANALYSIS, e.into()))?;
    let csv = gains_to_csv(&records);
    match &a.out {
        Some(path) => std::fs::write(path, &csv)
            .with_context(|| format!("writing {}", path.display()))
            .exit_with(EXIT_RUNTIME)?,
        None => print!("{csv}"),
    }
    for g in &records {
        let d = g.delta_log.map_or_else(|| "inf?".to_string(), |d| format!("{d:+.4}"));
        eprintln!("{} p={}: baseline {:.3e} lead {:.3e} delta_log {d}: {}", g.code, g.p, g.baseline_ler, g.lead_ler, g.verdict());
    }
    Ok(())
}

fn read_syndrome(path: &Path) -> anyhow::Result<BitVec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let bits = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(anyhow!("unexpected character `{other}` in syndrome")),
        })
        .collect::<anyhow::Result<Vec<bool>>>()?;
    Ok(BitVec::from_bools(&bits))
}

fn cmd_decode_one(a: DecodeOneArgs) -> CmdResult {
    let imported = qtc::import_code(&a.code).exit_with(EXIT_CONSTRUCTION)?;
    let code = imported.code;
    let s = read_syndrome(&a.syndrome).exit_with(EXIT_CONFIG)?;
    let h = code.check_matrix(a.component);
    if s.len() != h.rows() {
        return Err(Failure(EXIT_CONFIG, anyhow!("syndrome has {} bits, the check matrix {} rows", s.len(), h.rows())));
    }
    if !(0.0..1.0).contains(&a.p) {
        return Err(Failure(EXIT_CONFIG, anyhow!("p={} outside [0, 1)", a.p)));
    }
    let mut dspec = DecoderSpec::named(&a.decoder);
    dspec.alpha = a.alpha;
    let choice = dspec.resolve().exit_with(EXIT_CONFIG)?;
    let prior = Prior::uniform(code.n, 2.0 * a.p / 3.0);
    let (out, iters) = match choice {
        DecoderChoice::Baseline { cfg, .. } => {
            let out = Decoder::new(h, cfg).exit_with(EXIT_CONFIG)?.decode(&s, &prior).exit_with(EXIT_RUNTIME)?;
            let it = out.iterations as f64;
            (out, it)
        }
        DecoderChoice::Lead { cfg, .. } => {
            let mut dec = LeadDecoder::new(h, code.cover(a.component), cfg).exit_with(EXIT_CONFIG)?;
            let (out, trace) = dec.decode(&s, &prior).exit_with(EXIT_RUNTIME)?;
            (out, trace.normalized_iterations())
        }
    };
    let ones: Vec<String> = out.estimate.iter_ones().map(|i| i.to_string()).collect();
    println!("estimate  {}", if ones.is_empty() { "-".to_string() } else { ones.join(" ") });
    println!("weight    {}", out.estimate.weight());
    println!("converged {}", out.converged);
    println!("iters     {iters}");
    Ok(())
}
