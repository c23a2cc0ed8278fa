//! Monte Carlo runs: trials, statistics, sweeps and result files.
//!
//! Trials are cut into fixed-size batches. Batches run on a rayon pool and are
//! merged in batch order, and the early-stop rule is evaluated after each
//! batch in that same order, so a record depends only on the experiment and the
//! master seed, never on the worker count.

use std::collections::BTreeSet;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use qtanner_core::channel::{
    sample_depolarizing, syndrome, trial_rng, Classifier, ErrorType, PauliError, Verdict,
};
use qtanner_core::complex::TannerCode;
use qtanner_core::decode::{Decoder, Prior};
use qtanner_core::lead::{LeadDecoder, LeadTrace};
use qtanner_core::stats::{wilson_interval, WILSON_Z95};
use qtanner_core::BitVec;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{DecoderChoice, ExperimentSpec, Stopping};

/// Outcome counts for one error component.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCounts {
    pub successes: u64,
    pub logical_failures: u64,
    pub decode_failures: u64,
}

impl ComponentCounts {
    fn add(&mut self, v: Verdict) {
        match v {
            Verdict::Success => self.successes += 1,
            Verdict::LogicalFailure => self.logical_failures += 1,
            Verdict::DecodeFailure => self.decode_failures += 1,
        }
    }

    fn merge(&mut self, other: &Self) {
        self.successes += other.successes;
        self.logical_failures += other.logical_failures;
        self.decode_failures += other.decode_failures;
    }

    pub fn failures(&self) -> u64 {
        self.logical_failures + self.decode_failures
    }

    pub fn total(&self) -> u64 {
        self.successes + self.failures()
    }
}

/// One `(code, decoder, p)` point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub code: String,
    pub decoder: String,
    pub p: f64,
    pub seed: u64,
    pub trials: u64,
    /// Trials where either component failed.
    pub failures: u64,
    pub ler: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub x: ComponentCounts,
    pub z: ComponentCounts,
    /// Mean over component decodes of `I_g + I_l,total * m_l / m_g`.
    pub avg_normalized_iterations: f64,
    pub avg_global_iterations: f64,
    /// LEAD only: fraction of local views whose estimate differs from the
    /// true error on the view.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcode_fer: Option<f64>,
}

impl PointRecord {
    fn key(&self) -> (String, String, u64, u64) {
        (self.code.clone(), self.decoder.clone(), self.p.to_bits(), self.seed)
    }
}

/// A record plus its wall time, which is kept out of the record so that
/// result files stay byte-reproducible.
#[derive(Clone, Debug, PartialEq)]
pub struct PointResult {
    pub record: PointRecord,
    pub wall_time_s: f64,
}

/// Short identifier for a code: its `name` metadata, or one built from the
/// construction parameters.
pub fn code_id(code: &TannerCode) -> String {
    if let Some(name) = code.meta.get("name") {
        return name.to_string();
    }
    let mut id = String::new();
    for key in ["mode", "group", "ca", "cb"] {
        if let Some(v) = code.meta.get(key) {
            id.push_str(v);
            id.push('-');
        }
    }
    for key in ["a_set", "b_set"] {
        if let Some(v) = code.meta.get(key) {
            id.push_str(&format!("{}[{}]-", &key[..1], v.replace(',', " ")));
        }
    }
    id.push_str(&format!("n{}k{}", code.n, code.k));
    id
}

/// Per-worker decoder state for both components.
pub enum TrialDecoder {
    Baseline { x: Decoder, z: Decoder },
    Lead { x: LeadDecoder, z: LeadDecoder },
}

impl TrialDecoder {
    pub fn new(code: &TannerCode, choice: &DecoderChoice) -> Result<Self> {
        Ok(match choice {
            DecoderChoice::Baseline { cfg, .. } => TrialDecoder::Baseline {
                x: Decoder::new(code.check_matrix(ErrorType::X), *cfg)?,
                z: Decoder::new(code.check_matrix(ErrorType::Z), *cfg)?,
            },
            DecoderChoice::Lead { cfg, .. } => TrialDecoder::Lead {
                x: LeadDecoder::new(code.check_matrix(ErrorType::X), code.cover(ErrorType::X), *cfg)?,
                z: LeadDecoder::new(code.check_matrix(ErrorType::Z), code.cover(ErrorType::Z), *cfg)?,
            },
        })
    }
}

/// Number of local views whose hard estimate differs from `error` on the
/// view's columns.
pub fn subcode_frame_errors(decoder: &LeadDecoder, trace: &LeadTrace, error: &BitVec) -> usize {
    decoder
        .views()
        .iter()
        .zip(&trace.local_estimates)
        .filter(|(view, est)| error.gather(&view.col_map) != **est)
        .count()
}

/// Integer tallies; merging is exact so results do not depend on how trials
/// were grouped.
#[derive(Clone, Debug, Default)]
struct Tally {
    trials: u64,
    failures: u64,
    counts: [ComponentCounts; 2],
    global_iters: [u64; 2],
    local_iters: [u64; 2],
    views: u64,
    view_errors: u64,
}

impl Tally {
    fn merge(&mut self, o: &Tally) {
        self.trials += o.trials;
        self.failures += o.failures;
        for c in 0..2 {
            self.counts[c].merge(&o.counts[c]);
            self.global_iters[c] += o.global_iters[c];
            self.local_iters[c] += o.local_iters[c];
        }
        self.views += o.views;
        self.view_errors += o.view_errors;
    }
}

struct PointContext<'a> {
    code: &'a TannerCode,
    classifier: &'a Classifier,
    p: f64,
    seed: u64,
    prior: Prior,
}

fn component_index(t: ErrorType) -> usize {
    match t {
        ErrorType::X => 0,
        ErrorType::Z => 1,
    }
}

fn run_trial(ctx: &PointContext, dec: &mut TrialDecoder, trial: u64, tally: &mut Tally) -> Result<()> {
    let mut rng = trial_rng(ctx.seed, ctx.p, trial);
    let err: PauliError = sample_depolarizing(ctx.code.n, ctx.p, &mut rng)?;
    let syn = syndrome(ctx.code, &err)?;
    let mut word_failed = false;
    for t in ErrorType::BOTH {
        let c = component_index(t);
        let s = syn.of(t);
        let e = err.component(t);
        let estimate = match (&mut *dec, t) {
            (TrialDecoder::Baseline { x, .. }, ErrorType::X) | (TrialDecoder::Baseline { z: x, .. }, ErrorType::Z) => {
                let out = x.decode(s, &ctx.prior)?;
                tally.global_iters[c] += out.iterations as u64;
                out.estimate
            }
            (TrialDecoder::Lead { x, .. }, ErrorType::X) | (TrialDecoder::Lead { z: x, .. }, ErrorType::Z) => {
                let (out, trace) = x.decode(s, &ctx.prior)?;
                tally.global_iters[c] += trace.global_iterations as u64;
                tally.local_iters[c] += trace.i_l_total as u64;
                tally.views += trace.local_estimates.len() as u64;
                tally.view_errors += subcode_frame_errors(x, &trace, e) as u64;
                out.estimate
            }
        };
        let verdict = ctx.classifier.classify(ctx.code, t, &estimate.xor(e))?;
        tally.counts[c].add(verdict);
        word_failed |= verdict.is_failure();
    }
    tally.trials += 1;
    tally.failures += word_failed as u64;
    Ok(())
}

/// `m_l / m_g` for the component's cover, or 0 when there are no checks.
fn row_ratio(code: &TannerCode, t: ErrorType) -> f64 {
    let m_g = code.check_matrix(t).rows();
    if m_g == 0 {
        0.0
    } else {
        code.cover(t).mean_rows() / m_g as f64
    }
}

/// Runs one point until `max_trials` or, checked after each batch, until
/// `min_failures` word failures.
pub fn run_point(
    code: &TannerCode,
    choice: &DecoderChoice,
    p: f64,
    master_seed: u64,
    stopping: &Stopping,
    pool: &rayon::ThreadPool,
) -> Result<PointResult> {
    if !(0.0..=1.0).contains(&p) {
        bail!("error rate {p} outside [0, 1]");
    }
    if stopping.batch_size == 0 {
        bail!("batch_size must be at least 1");
    }
    let start = Instant::now();
    let classifier = Classifier::new(code);
    let ctx = PointContext {
        code,
        classifier: &classifier,
        p,
        seed: master_seed,
        prior: Prior::uniform(code.n, 2.0 * p / 3.0),
    };
    // Fail fast on bad decoder parameters before entering the pool.
    TrialDecoder::new(code, choice)?;

    let batch = stopping.batch_size;
    let batches = stopping.max_trials.div_ceil(batch);
    let round = 2 * pool.current_num_threads() as u64;
    let mut total = Tally::default();
    let mut next = 0;
    'rounds: while next < batches {
        let end = (next + round).min(batches);
        let parts: Vec<Result<Tally>> = pool.install(|| {
            (next..end)
                .into_par_iter()
                .map_init(
                    || TrialDecoder::new(code, choice),
                    |dec, b| {
                        let dec = dec.as_mut().map_err(|e| anyhow::anyhow!("{e}"))?;
                        let mut tally = Tally::default();
                        let lo = b * batch;
                        let hi = (lo + batch).min(stopping.max_trials);
                        for trial in lo..hi {
                            run_trial(&ctx, dec, trial, &mut tally)?;
                        }
                        Ok(tally)
                    },
                )
                .collect()
        });
        for part in parts {
            total.merge(&part?);
            if stopping.min_failures.is_some_and(|m| total.failures >= m) {
                break 'rounds;
            }
        }
        next = end;
    }

    let trials = total.trials;
    let (ci_lo, ci_hi) = wilson_interval(total.failures, trials, WILSON_Z95);
    let decodes = 2.0 * trials as f64;
    let mean = |x: f64| if trials == 0 { 0.0 } else { x / decodes };
    let ratios = [row_ratio(code, ErrorType::X), row_ratio(code, ErrorType::Z)];
    let global: u64 = total.global_iters.iter().sum();
    let normalized: f64 = (0..2)
        .map(|c| total.global_iters[c] as f64 + total.local_iters[c] as f64 * ratios[c])
        .sum();
    let record = PointRecord {
        code: code_id(code),
        decoder: choice.label().to_string(),
        p,
        seed: master_seed,
        trials,
        failures: total.failures,
        ler: if trials == 0 { 0.0 } else { total.failures as f64 / trials as f64 },
        ci_lo,
        ci_hi,
        x: total.counts[0],
        z: total.counts[1],
        avg_normalized_iterations: mean(normalized),
        avg_global_iterations: mean(global as f64),
        subcode_fer: choice.is_lead().then(|| {
            if total.views == 0 {
                0.0
            } else {
                total.view_errors as f64 / total.views as f64
            }
        }),
    };
    Ok(PointResult {
        record,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Builds a pool with `workers` threads.
pub fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?)
}

/// Worker count: explicit value, then `QTANNER_WORKERS`, then the CPU count.
pub fn resolve_workers(explicit: Option<usize>) -> Result<usize> {
    if let Some(w) = explicit {
        return Ok(w.max(1));
    }
    if let Ok(v) = std::env::var("QTANNER_WORKERS") {
        let w: usize = v
            .trim()
            .parse()
            .with_context(|| format!("QTANNER_WORKERS=`{v}` is not a count"))?;
        return Ok(w.max(1));
    }
    Ok(std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Result file locations derived from one base path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputPaths {
    pub jsonl: PathBuf,
    pub csv: PathBuf,
    pub timing: PathBuf,
}

impl OutputPaths {
    pub fn from_base(base: &Path) -> Self {
        let with = |ext: &str| {
            let mut s = base.as_os_str().to_owned();
            s.push(ext);
            PathBuf::from(s)
        };
        Self {
            jsonl: with(".jsonl"),
            csv: with(".csv"),
            timing: with(".timing.jsonl"),
        }
    }
}

pub const CSV_HEADER: &str = "code,decoder,p,trials,failures,ler,ci_lo,ci_hi,iters,subcode_fer";

pub fn read_records(path: &Path) -> Result<Vec<PointRecord>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
    };
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).with_context(|| format!("{}:{}: bad record", path.display(), i + 1))
        })
        .collect()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn records_to_csv(records: &[PointRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            csv_field(&r.code),
            csv_field(&r.decoder),
            r.p,
            r.trials,
            r.failures,
            r.ler,
            r.ci_lo,
            r.ci_hi,
            r.avg_normalized_iterations,
            r.subcode_fer.map(|f| f.to_string()).unwrap_or_default()
        ));
    }
    out
}

fn write_records(path: &Path, records: &[PointRecord]) -> Result<()> {
    let mut text = String::new();
    for r in records {
        text.push_str(&serde_json::to_string(r)?);
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn append_line(path: &Path, line: &str) -> Result<()> {
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    writeln!(f, "{line}").with_context(|| format!("writing {}", path.display()))
}

#[derive(Clone, Debug, Default)]
pub struct SweepReport {
    /// Records of this sweep in grid order, including skipped points.
    pub records: Vec<PointRecord>,
    pub skipped: Vec<f64>,
    pub failed: Vec<(f64, String)>,
    pub wall_time_s: Vec<(f64, f64)>,
    /// Monotonicity warnings (a sanity report, not an error).
    pub warnings: Vec<String>,
}

/// Flags pairs of grid points where the LER drops with growing `p` by more
/// than the confidence intervals allow.
pub fn monotonicity_warnings(records: &[PointRecord]) -> Vec<String> {
    let mut sorted: Vec<&PointRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.p.total_cmp(&b.p));
    sorted
        .windows(2)
        .filter(|w| w[1].ci_hi < w[0].ci_lo)
        .map(|w| {
            format!(
                "{} / {}: LER falls from {} at p={} to {} at p={} beyond CI overlap",
                w[0].code, w[0].decoder, w[0].ler, w[0].p, w[1].ler, w[1].p
            )
        })
        .collect()
}

/// Runs every grid point, streaming records to `out`. Points already in the
/// JSONL file are skipped unless `force`, in which case they are replaced.
/// A failing point is reported and the sweep continues.
pub fn sweep(
    code: &TannerCode,
    spec: &ExperimentSpec,
    out: &OutputPaths,
    force: bool,
    pool: &rayon::ThreadPool,
    mut on_point: impl FnMut(&PointRecord, Option<f64>),
) -> Result<SweepReport> {
    let choice = spec.decoder.resolve()?;
    if let Some(dir) = out.jsonl.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut all = read_records(&out.jsonl)?;
    let id = code_id(code);
    let mut report = SweepReport::default();
    let mut seen = BTreeSet::new();
    for &p in &spec.p_grid {
        if !seen.insert(p.to_bits()) {
            continue;
        }
        let key = (id.clone(), choice.label().to_string(), p.to_bits(), spec.master_seed);
        if let Some(existing) = all.iter().find(|r| r.key() == key) {
            if !force {
                report.skipped.push(p);
                report.records.push(existing.clone());
                on_point(existing, None);
                continue;
            }
        }
        match run_point(code, &choice, p, spec.master_seed, &spec.stopping, pool) {
            Ok(res) => {
                let before = all.len();
                all.retain(|r| r.key() != key);
                all.push(res.record.clone());
                if all.len() == before + 1 {
                    append_line(&out.jsonl, &serde_json::to_string(&res.record)?)?;
                } else {
                    write_records(&out.jsonl, &all)?;
                }
                fs::write(&out.csv, records_to_csv(&all))
                    .with_context(|| format!("writing {}", out.csv.display()))?;
                let timing = serde_json::json!({
                    "code": res.record.code,
                    "decoder": res.record.decoder,
                    "p": p,
                    "seed": spec.master_seed,
                    "wall_time_s": res.wall_time_s,
                });
                append_line(&out.timing, &timing.to_string())?;
                on_point(&res.record, Some(res.wall_time_s));
                report.wall_time_s.push((p, res.wall_time_s));
                report.records.push(res.record);
            }
            Err(e) => report.failed.push((p, format!("{e:#}"))),
        }
    }
    if !out.csv.exists() {
        fs::write(&out.csv, records_to_csv(&all))?;
    }
    report.warnings = monotonicity_warnings(&report.records);
    Ok(report)
}
