//! Syndrome decoders with soft output: belief propagation followed by
//! optional OSD or LSD post-processing when BP does not match the syndrome.

mod bp;
mod lsd;
mod osd;

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub use bp::{llr, posterior, LLR_CLIP};
pub use lsd::{lsd, lsd_clusters};
pub use osd::{bit_cost, osd, reliability_order, soft_cost, OsdPolicy, MAX_EXHAUSTIVE_BITS};

use bp::BpEngine;

use crate::gf2::{BitMatrix, BitVec};
use crate::{Error, Result};

/// Default clamp applied to priors.
pub const DEFAULT_CLAMP_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BpVariant {
    #[default]
    MinSum,
    ProductSum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Schedule {
    #[default]
    Flooding,
    Serial,
}

/// Iteration cap; `Auto` uses the column count of the decoded matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MaxIter {
    #[default]
    Auto,
    Fixed(usize),
}

impl MaxIter {
    pub fn resolve(self, cols: usize) -> usize {
        match self {
            MaxIter::Auto => cols.max(1),
            MaxIter::Fixed(n) => n.max(1),
        }
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for MaxIter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        match self {
            MaxIter::Auto => s.serialize_str("auto"),
            MaxIter::Fixed(n) => s.serialize_u64(*n as u64),
        }
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for MaxIter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Count(usize),
            Name(alloc::string::String),
        }
        match Repr::deserialize(d)? {
            Repr::Count(n) => Ok(MaxIter::Fixed(n)),
            Repr::Name(s) if s == "auto" => Ok(MaxIter::Auto),
            Repr::Name(s) => Err(serde::de::Error::custom(format!(
                "max_iter must be a count or \"auto\", got \"{s}\""
            ))),
        }
    }
}

/// Post-processor applied when BP does not converge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PostKind {
    #[cfg_attr(feature = "serde", serde(rename = "none"))]
    None,
    #[cfg_attr(feature = "serde", serde(rename = "osd_0"))]
    Osd0,
    #[default]
    #[cfg_attr(feature = "serde", serde(rename = "osd_cs"))]
    OsdCs,
    #[cfg_attr(feature = "serde", serde(rename = "lsd_cs"))]
    LsdCs,
}

impl fmt::Display for PostKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PostKind::None => "none",
            PostKind::Osd0 => "osd_0",
            PostKind::OsdCs => "osd_cs",
            PostKind::LsdCs => "lsd_cs",
        })
    }
}

impl FromStr for PostKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "none" => PostKind::None,
            "osd_0" => PostKind::Osd0,
            "osd_cs" => PostKind::OsdCs,
            "lsd_cs" => PostKind::LsdCs,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown post-processor `{other}`"
                )))
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct DecoderConfig {
    pub bp_variant: BpVariant,
    pub ms_scale: f64,
    pub max_iter: MaxIter,
    pub post: PostKind,
    pub order: usize,
    pub schedule: Schedule,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self::bp_osd(3)
    }
}

impl DecoderConfig {
    /// Min-sum BP with combination-sweep OSD.
    pub fn bp_osd(order: usize) -> Self {
        Self {
            bp_variant: BpVariant::MinSum,
            ms_scale: 1.0,
            max_iter: MaxIter::Auto,
            post: PostKind::OsdCs,
            order,
            schedule: Schedule::Flooding,
        }
    }

    /// Min-sum BP with cluster post-processing.
    pub fn bp_lsd(order: usize) -> Self {
        Self {
            post: PostKind::LsdCs,
            ..Self::bp_osd(order)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ms_scale > 0.0 && self.ms_scale <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "ms_scale {} outside (0, 1]",
                self.ms_scale
            )));
        }
        Ok(())
    }
}

/// Per-qubit error probabilities, clamped to `[eps, 1 - eps]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Prior {
    probs: Vec<f64>,
}

impl Prior {
    pub fn new(probs: Vec<f64>, eps: f64) -> Self {
        let probs = probs.into_iter().map(|p| clamp_prob(p, eps)).collect();
        Self { probs }
    }

    pub fn uniform(n: usize, p: f64) -> Self {
        Self::new(alloc::vec![p; n], DEFAULT_CLAMP_EPS)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn restrict(&self, cols: &[usize]) -> Prior {
        Prior {
            probs: cols.iter().map(|&c| self.probs[c]).collect(),
        }
    }
}

#[inline]
pub(crate) fn clamp_prob(p: f64, eps: f64) -> f64 {
    if p.is_nan() {
        return 0.5;
    }
    p.clamp(eps, 1.0 - eps)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeOutcome {
    pub estimate: BitVec,
    /// BP posterior error probability per column.
    pub posterior: Vec<f64>,
    /// BP iterations executed.
    pub iterations: usize,
    /// Whether `h · estimate = s`.
    pub converged: bool,
}

/// A BP decoder bound to one check matrix, with reusable message buffers.
///
/// Not shareable across threads while decoding; create one per worker.
#[derive(Clone, Debug)]
pub struct Decoder {
    h: BitMatrix,
    cfg: DecoderConfig,
    max_iter: usize,
    engine: BpEngine,
}

impl Decoder {
    pub fn new(h: &BitMatrix, cfg: DecoderConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            h: h.clone(),
            cfg,
            max_iter: cfg.max_iter.resolve(h.cols()),
            engine: BpEngine::new(h),
        })
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.h
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    fn check_inputs(&self, s: &BitVec, prior: &Prior) -> Result<()> {
        if s.len() != self.h.rows() {
            return Err(Error::Dimension {
                context: "syndrome length",
                expected: self.h.rows(),
                found: s.len(),
            });
        }
        if prior.len() != self.h.cols() {
            return Err(Error::Dimension {
                context: "prior length",
                expected: self.h.cols(),
                found: prior.len(),
            });
        }
        Ok(())
    }

    /// Belief propagation alone.
    pub fn bp(&mut self, s: &BitVec, prior: &Prior) -> Result<DecodeOutcome> {
        self.check_inputs(s, prior)?;
        let (iterations, converged) = self.engine.run(
            s,
            prior.probs(),
            self.cfg.bp_variant,
            self.cfg.schedule,
            self.cfg.ms_scale,
            self.max_iter,
            true,
        );
        let mut estimate = BitVec::zeros(self.h.cols());
        for (i, &b) in self.engine.hard.iter().enumerate() {
            if b == 1 {
                estimate.set(i, true);
            }
        }
        Ok(DecodeOutcome {
            estimate,
            posterior: self.engine.total.iter().map(|&l| posterior(l)).collect(),
            iterations,
            converged,
        })
    }

    /// BP, then the configured post-processor if BP did not converge.
    ///
    /// A post-processing failure is not an error: the BP hard decision is
    /// returned with `converged = false`.
    pub fn decode(&mut self, s: &BitVec, prior: &Prior) -> Result<DecodeOutcome> {
        let mut out = self.bp(s, prior)?;
        if out.converged {
            return Ok(out);
        }
        let post = match self.cfg.post {
            PostKind::None => return Ok(out),
            PostKind::Osd0 => osd(&self.h, s, &out.posterior, OsdPolicy::Zero),
            PostKind::OsdCs => osd(
                &self.h,
                s,
                &out.posterior,
                OsdPolicy::CombinationSweep {
                    order: self.cfg.order,
                },
            ),
            PostKind::LsdCs => {
                lsd::lsd_with_graph(&self.h, &self.engine.graph, s, &out.posterior, self.cfg.order)
            }
        };
        match post {
            Ok(e) => {
                out.converged = self.h.mul_vec(&e)? == *s;
                out.estimate = e;
            }
            Err(Error::PostProcess(_)) => {}
            Err(e) => return Err(e),
        }
        Ok(out)
    }

    /// Posterior LLRs after exactly `iterations` BP iterations, without the
    /// early stop on syndrome match.
    pub fn llrs_after(&mut self, s: &BitVec, prior: &Prior, iterations: usize) -> Result<Vec<f64>> {
        self.check_inputs(s, prior)?;
        self.engine.run(
            s,
            prior.probs(),
            self.cfg.bp_variant,
            self.cfg.schedule,
            self.cfg.ms_scale,
            iterations,
            false,
        );
        Ok(self.engine.total.clone())
    }
}

/// One-shot belief propagation.
pub fn bp_decode(h: &BitMatrix, s: &BitVec, prior: &Prior, cfg: &DecoderConfig) -> Result<DecodeOutcome> {
    Decoder::new(h, *cfg)?.bp(s, prior)
}

/// One-shot BP plus post-processing.
pub fn decode(h: &BitMatrix, s: &BitVec, prior: &Prior, cfg: &DecoderConfig) -> Result<DecodeOutcome> {
    Decoder::new(h, *cfg)?.decode(s, prior)
}
