mod common;

use std::fs;

use common::{z4_code, checkless};
use qtanner::config::{CodeSource, DecoderSpec, ExperimentSpec, Stopping};
use qtanner::harness::{read_records, run_point, subcode_frame_errors, sweep, thread_pool, OutputPaths};
use qtanner_core::channel::ErrorType;
use qtanner_core::complex::extract_view;
use qtanner_core::decode::Prior;
use qtanner_core::lead::{LeadConfig, LeadDecoder};
use qtanner_core::BitVec;

fn spec(kind: &str, p_grid: Vec<f64>, stopping: Stopping) -> ExperimentSpec {
    ExperimentSpec {
        code: CodeSource::Import {
            path: "unused.qtc".into(),
            name: None,
        },
        decoder: DecoderSpec::named(kind),
        p_grid,
        stopping,
        master_seed: 11,
        workers: None,
    }
}

#[test]
fn checkless_code_matches_closed_form() {
    let n = 5;
    let p: f64 = 0.1;
    let code = checkless(n);
    let pool = thread_pool(2).unwrap();
    let stop = Stopping {
        max_trials: 4000,
        min_failures: None,
        batch_size: 100,
    };
    let word = 1.0 - (1.0 - p).powi(n as i32);
    let component = 1.0 - (1.0 - 2.0 * p / 3.0).powi(n as i32);
    for kind in ["bp-osd", "bp-lsd", "lead-bl-bo"] {
        let choice = DecoderSpec::named(kind).resolve().unwrap();
        let r = run_point(&code, &choice, p, 5, &stop, &pool).unwrap().record;
        let tol = |q: f64| 4.0 * (q * (1.0 - q) / r.trials as f64).sqrt();
        assert!((r.ler - word).abs() < tol(word), "{kind}: {} vs {word}", r.ler);
        for c in [r.x, r.z] {
            assert_eq!(c.decode_failures, 0);
            let rate = c.logical_failures as f64 / r.trials as f64;
            assert!((rate - component).abs() < tol(component), "{kind}: {rate} vs {component}");
        }
    }
}

#[test]
fn sweeps_are_byte_identical_for_any_worker_count() {
    let code = z4_code();
    let stopping = Stopping {
        max_trials: 600,
        min_failures: Some(40),
        batch_size: 50,
    };
    for kind in ["bp-osd", "lead-bl-bo"] {
        let spec = spec(kind, vec![0.04, 0.08], stopping);
        let mut outputs = Vec::new();
        for workers in [1, 4, 8, 4] {
            let dir = tempfile::tempdir().unwrap();
            let out = OutputPaths::from_base(&dir.path().join("run"));
            let pool = thread_pool(workers).unwrap();
            let report = sweep(&code, &spec, &out, false, &pool, |_, _| {}).unwrap();
            assert!(report.failed.is_empty());
            outputs.push((fs::read(&out.jsonl).unwrap(), fs::read(&out.csv).unwrap()));
        }
        assert!(outputs.windows(2).all(|w| w[0] == w[1]), "{kind}");
    }
}

#[test]
fn completed_points_are_skipped_unless_forced() {
    let code = z4_code();
    let dir = tempfile::tempdir().unwrap();
    let out = OutputPaths::from_base(&dir.path().join("nested/run"));
    let pool = thread_pool(1).unwrap();
    let stop = Stopping {
        max_trials: 100,
        min_failures: None,
        batch_size: 50,
    };
    let first = spec("bp-osd", vec![0.05], stop);
    sweep(&code, &first, &out, false, &pool, |_, _| {}).unwrap();
    let before = fs::read(&out.jsonl).unwrap();

    let again = sweep(&code, &first, &out, false, &pool, |_, _| {}).unwrap();
    assert_eq!(again.skipped, vec![0.05]);
    assert_eq!(fs::read(&out.jsonl).unwrap(), before);

    // A grid extension only appends.
    let wider = spec("bp-osd", vec![0.05, 0.07], stop);
    let r = sweep(&code, &wider, &out, false, &pool, |_, _| {}).unwrap();
    assert_eq!(r.skipped, vec![0.05]);
    let records = read_records(&out.jsonl).unwrap();
    assert_eq!(records.len(), 2);

    let forced = sweep(&code, &first, &out, true, &pool, |_, _| {}).unwrap();
    assert!(forced.skipped.is_empty());
    let records = read_records(&out.jsonl).unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records.iter().filter(|r| r.p == 0.05).count(), 1);
    let csv = fs::read_to_string(&out.csv).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert_eq!(fs::read_to_string(&out.timing).unwrap().lines().count(), 3);
}

#[test]
fn planted_local_codeword_is_a_frame_error() {
    let code = z4_code();
    let h = code.check_matrix(ErrorType::Z);
    let cover = code.cover(ErrorType::Z);
    let view = extract_view(h, cover, 0).unwrap();
    // A weight-2 pattern in the kernel of the 2 x 9 local matrix.
    let cols = view.hv.cols();
    let local = (0..cols)
        .flat_map(|i| (i + 1..cols).map(move |j| (i, j)))
        .map(|(i, j)| BitVec::from_indices(cols, &[i, j]).unwrap())
        .find(|v| view.hv.mul_vec(v).unwrap().is_zero())
        .expect("weight-2 local codeword");
    let mut e = BitVec::zeros(code.n);
    for i in local.iter_ones() {
        e.set(view.col_map[i], true);
    }
    let s = h.mul_vec(&e).unwrap();
    let mut dec = LeadDecoder::new(h, cover, LeadConfig::default()).unwrap();
    let prior = Prior::uniform(code.n, 0.02);
    let (_, trace) = dec.decode(&s, &prior).unwrap();
    assert!(trace.local_estimates[0].is_zero());

    let expected = dec
        .views()
        .iter()
        .zip(&trace.local_estimates)
        .filter(|(v, est)| e.gather(&v.col_map) != **est)
        .count();
    assert!(expected >= 1);
    assert_eq!(subcode_frame_errors(&dec, &trace, &e), expected);

    // With no error every view decodes to zero and counts as a success.
    let zero = BitVec::zeros(code.n);
    let (_, trace) = dec.decode(&h.mul_vec(&zero).unwrap(), &prior).unwrap();
    assert_eq!(subcode_frame_errors(&dec, &trace, &zero), 0);
}
