//! Local-ensemble decoding.
//!
//! 1. Every view of the cover is decoded on its own with the channel prior
//!    restricted to its columns. When a local decode matches its syndrome,
//!    the posterior of each flipped bit is raised to at least `boost_floor`.
//! 2. For each qubit the local posteriors of all views containing it are
//!    averaged and scaled by `alpha`.
//! 3. The global matrix is decoded with that aggregate as its prior.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::complex::ViewCover;
use crate::decode::{clamp_prob, DecodeOutcome, Decoder, DecoderConfig, Prior, DEFAULT_CLAMP_EPS};
use crate::gf2::{BitMatrix, BitVec};
use crate::{Error, Result};

/// Preset names accepted by [`LeadConfig::preset`].
pub const PRESETS: [&str; 4] = ["lead-bl-bo", "lead-bo-bo", "lead-bl-bl", "lead-bo-bl"];

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct LeadConfig {
    pub alpha: f64,
    pub local: DecoderConfig,
    pub global: DecoderConfig,
    pub boost_floor: f64,
    pub clamp_eps: f64,
}

impl Default for LeadConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            local: DecoderConfig::bp_lsd(3),
            global: DecoderConfig::bp_osd(3),
            boost_floor: 0.5,
            clamp_eps: DEFAULT_CLAMP_EPS,
        }
    }
}

impl LeadConfig {
    /// `lead-<local>-<global>` with `bl` = BP + LSD and `bo` = BP + OSD, both
    /// with combination-sweep order 3.
    pub fn preset(name: &str) -> Result<Self> {
        let stage = |tag: &str| match tag {
            "bl" => Some(DecoderConfig::bp_lsd(3)),
            "bo" => Some(DecoderConfig::bp_osd(3)),
            _ => None,
        };
        let mut parts = name.strip_prefix("lead-").map(|rest| rest.split('-'));
        let pair = parts.as_mut().and_then(|it| {
            let local = stage(it.next()?)?;
            let global = stage(it.next()?)?;
            it.next().is_none().then_some((local, global))
        });
        let (local, global) = pair.ok_or_else(|| {
            Error::InvalidParameter(format!("unknown LEAD preset `{name}`"))
        })?;
        Ok(Self {
            local,
            global,
            ..Self::default()
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha {} outside (0, 1]", self.alpha)));
        }
        if !(self.boost_floor > 0.0 && self.boost_floor < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "boost_floor {} outside (0, 1)",
                self.boost_floor
            )));
        }
        if !(self.clamp_eps > 0.0 && self.clamp_eps < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "clamp_eps {} outside (0, 0.5)",
                self.clamp_eps
            )));
        }
        self.local.validate()?;
        self.global.validate()
    }
}

/// After a successful local decode, raises every flipped bit's probability to
/// at least `floor`. Otherwise returns `pv` unchanged.
pub fn boost_confidence(pv: &[f64], ev: &BitVec, local_success: bool, floor: f64) -> Result<Vec<f64>> {
    if pv.len() != ev.len() {
        return Err(Error::Dimension {
            context: "boost_confidence",
            expected: pv.len(),
            found: ev.len(),
        });
    }
    let mut out = pv.to_vec();
    if local_success {
        for j in ev.iter_ones() {
            out[j] = out[j].max(floor);
        }
    }
    Ok(out)
}

/// Averages view estimates per qubit, scales by `alpha` and clamps.
///
/// Each view is `(col_map, estimates)`. Qubits covered by no view keep
/// `fallback`.
pub fn aggregate<'a, I>(views: I, fallback: &[f64], alpha: f64, eps: f64) -> Prior
where
    I: IntoIterator<Item = (&'a [usize], &'a [f64])>,
{
    let n = fallback.len();
    let mut sum = vec![0.0f64; n];
    let mut count = vec![0u32; n];
    for (cols, est) in views {
        for (&i, &p) in cols.iter().zip(est) {
            sum[i] += p;
            count[i] += 1;
        }
    }
    let probs = (0..n)
        .map(|i| {
            if count[i] == 0 {
                clamp_prob(fallback[i], eps)
            } else {
                clamp_prob(alpha * (sum[i] / f64::from(count[i])), eps)
            }
        })
        .collect();
    Prior::new(probs, eps)
}

/// `I_g + I_l_total · m_l / m_g`.
pub fn normalized_iterations(i_g: f64, i_l_total: f64, m_l: f64, m_g: f64) -> f64 {
    i_g + i_l_total * (m_l / m_g)
}

/// What happened at every stage of one decode.
#[derive(Clone, Debug, PartialEq)]
pub struct LeadTrace {
    pub local_converged: Vec<bool>,
    pub local_iterations: Vec<usize>,
    /// Hard local estimates, indexed like each view's columns.
    pub local_estimates: Vec<BitVec>,
    /// Aggregated prior fed to the global decoder.
    pub prior: Vec<f64>,
    pub global_iterations: usize,
    pub i_l_total: usize,
    /// Largest single-view iteration count (the critical path when views run
    /// in parallel).
    pub i_l_max: usize,
    /// Mean rows per local view.
    pub m_l: f64,
    /// Rows of the global matrix.
    pub m_g: usize,
}

impl LeadTrace {
    pub fn normalized_iterations(&self) -> f64 {
        if self.m_g == 0 {
            return self.global_iterations as f64;
        }
        normalized_iterations(
            self.global_iterations as f64,
            self.i_l_total as f64,
            self.m_l,
            self.m_g as f64,
        )
    }
}

/// Result of decoding one view.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalResult {
    pub converged: bool,
    pub iterations: usize,
    pub estimate: BitVec,
    /// Posterior after confidence boosting.
    pub boosted: Vec<f64>,
}

/// One vertex view with its own decoder.
#[derive(Clone, Debug)]
pub struct LocalView {
    pub vertex_id: usize,
    pub rows: Vec<usize>,
    pub col_map: Vec<usize>,
    decoder: Decoder,
}

impl LocalView {
    pub fn matrix(&self) -> &BitMatrix {
        self.decoder.matrix()
    }

    /// Decodes this view's part of the global syndrome `s`.
    pub fn run(&mut self, s: &BitVec, channel: &Prior, floor: f64) -> Result<LocalResult> {
        let sv = s.gather(&self.rows);
        let prior = channel.restrict(&self.col_map);
        let out = self.decoder.decode(&sv, &prior)?;
        let boosted = boost_confidence(&out.posterior, &out.estimate, out.converged, floor)?;
        Ok(LocalResult {
            converged: out.converged,
            iterations: out.iterations,
            estimate: out.estimate,
            boosted,
        })
    }
}

/// The three-stage decoder for one check matrix and its cover.
#[derive(Clone, Debug)]
pub struct LeadDecoder {
    cfg: LeadConfig,
    views: Vec<LocalView>,
    global: Decoder,
    n: usize,
    m_l: f64,
    uncovered: usize,
}

impl LeadDecoder {
    pub fn new(h: &BitMatrix, cover: &ViewCover, cfg: LeadConfig) -> Result<Self> {
        cfg.validate()?;
        cover.validate(h)?;
        let views = cover
            .groups
            .iter()
            .map(|g| {
                let hv = h.submatrix(&g.rows, &g.support);
                Ok(LocalView {
                    vertex_id: g.vertex_id,
                    rows: g.rows.clone(),
                    col_map: g.support.clone(),
                    decoder: Decoder::new(&hv, cfg.local)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let uncovered = cover.multiplicity(h.cols()).iter().filter(|&&m| m == 0).count();
        Ok(Self {
            cfg,
            views,
            global: Decoder::new(h, cfg.global)?,
            n: h.cols(),
            m_l: cover.mean_rows(),
            uncovered,
        })
    }

    pub fn config(&self) -> &LeadConfig {
        &self.cfg
    }

    pub fn views(&self) -> &[LocalView] {
        &self.views
    }

    /// Mutable views, for running the local stage on a thread pool.
    pub fn views_mut(&mut self) -> &mut [LocalView] {
        &mut self.views
    }

    /// Qubits that no view covers; they keep the channel prior.
    pub fn uncovered(&self) -> usize {
        self.uncovered
    }

    /// Runs all three stages sequentially.
    pub fn decode(&mut self, s: &BitVec, channel: &Prior) -> Result<(DecodeOutcome, LeadTrace)> {
        self.check_inputs(s, channel)?;
        let floor = self.cfg.boost_floor;
        let locals = self
            .views
            .iter_mut()
            .map(|v| v.run(s, channel, floor))
            .collect::<Result<Vec<_>>>()?;
        self.finish(s, channel, locals)
    }

    fn check_inputs(&self, s: &BitVec, channel: &Prior) -> Result<()> {
        let h = self.global.matrix();
        if s.len() != h.rows() {
            return Err(Error::Dimension {
                context: "syndrome length",
                expected: h.rows(),
                found: s.len(),
            });
        }
        if channel.len() != self.n {
            return Err(Error::Dimension {
                context: "prior length",
                expected: self.n,
                found: channel.len(),
            });
        }
        Ok(())
    }

    /// Aggregation and global decoding from precomputed local results, given
    /// in view order.
    pub fn finish(
        &mut self,
        s: &BitVec,
        channel: &Prior,
        locals: Vec<LocalResult>,
    ) -> Result<(DecodeOutcome, LeadTrace)> {
        self.check_inputs(s, channel)?;
        if locals.len() != self.views.len() {
            return Err(Error::Dimension {
                context: "local results",
                expected: self.views.len(),
                found: locals.len(),
            });
        }
        let prior = aggregate(
            self.views
                .iter()
                .zip(&locals)
                .map(|(v, r)| (v.col_map.as_slice(), r.boosted.as_slice())),
            channel.probs(),
            self.cfg.alpha,
            self.cfg.clamp_eps,
        );
        let out = self.global.decode(s, &prior)?;
        let mut trace = LeadTrace {
            local_converged: Vec::with_capacity(locals.len()),
            local_iterations: Vec::with_capacity(locals.len()),
            local_estimates: Vec::with_capacity(locals.len()),
            prior: prior.probs().to_vec(),
            global_iterations: out.iterations,
            i_l_total: 0,
            i_l_max: 0,
            m_l: self.m_l,
            m_g: self.global.matrix().rows(),
        };
        for r in locals {
            trace.i_l_total += r.iterations;
            trace.i_l_max = trace.i_l_max.max(r.iterations);
            trace.local_converged.push(r.converged);
            trace.local_iterations.push(r.iterations);
            trace.local_estimates.push(r.estimate);
        }
        Ok((out, trace))
    }
}

/// One-shot form of [`LeadDecoder::decode`].
pub fn lead_decode(
    h: &BitMatrix,
    cover: &ViewCover,
    s: &BitVec,
    channel: &Prior,
    cfg: LeadConfig,
) -> Result<(DecodeOutcome, LeadTrace)> {
    LeadDecoder::new(h, cover, cfg)?.decode(s, channel)
}
