//! Depolarizing noise, syndromes and classification of decoding residuals.

use alloc::format;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::TannerCode;
use crate::gf2::{BitVec, RowSpace};
use crate::{Error, Result};

/// Pauli component of an error. Z errors are detected by `hx`, X errors by `hz`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ErrorType {
    X,
    Z,
}

impl ErrorType {
    pub const BOTH: [ErrorType; 2] = [ErrorType::X, ErrorType::Z];
}

/// A Pauli error in symplectic form; a Y sets both components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliError {
    pub ex: BitVec,
    pub ez: BitVec,
}

impl PauliError {
    pub fn identity(n: usize) -> Self {
        Self {
            ex: BitVec::zeros(n),
            ez: BitVec::zeros(n),
        }
    }

    pub fn component(&self, t: ErrorType) -> &BitVec {
        match t {
            ErrorType::X => &self.ex,
            ErrorType::Z => &self.ez,
        }
    }
}

/// The RNG for one trial: keyed by `(master_seed, p)`, stream = `trial`.
///
/// Streams are independent of how trials are scheduled across workers.
pub fn trial_rng(master_seed: u64, p: f64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&p.to_bits().to_le_bytes());
    key[16..24].copy_from_slice(b"qtanner\0");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}

/// Each qubit independently suffers X, Y or Z with probability `p/3` each.
pub fn sample_depolarizing<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<PauliError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "error rate {p} outside [0, 1]"
        )));
    }
    let mut err = PauliError::identity(n);
    let third = p / 3.0;
    for i in 0..n {
        let u: f64 = rng.random();
        if u < third {
            err.ex.set(i, true);
        } else if u < 2.0 * third {
            err.ex.set(i, true);
            err.ez.set(i, true);
        } else if u < p {
            err.ez.set(i, true);
        }
    }
    Ok(err)
}

/// Syndromes of both error components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Syndromes {
    /// `hx · ez`
    pub of_z: BitVec,
    /// `hz · ex`
    pub of_x: BitVec,
}

impl Syndromes {
    pub fn of(&self, t: ErrorType) -> &BitVec {
        match t {
            ErrorType::X => &self.of_x,
            ErrorType::Z => &self.of_z,
        }
    }
}

pub fn syndrome(code: &TannerCode, err: &PauliError) -> Result<Syndromes> {
    Ok(Syndromes {
        of_z: code.hx.mul_vec(&err.ez)?,
        of_x: code.hz.mul_vec(&err.ex)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Success,
    LogicalFailure,
    /// The residual has a nonzero syndrome: the estimate missed `s`.
    DecodeFailure,
}

impl Verdict {
    pub fn is_failure(self) -> bool {
        self != Verdict::Success
    }
}

/// Outcome of one trial for both components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialVerdict {
    pub x: Verdict,
    pub z: Verdict,
    pub x_residual_weight: usize,
    pub z_residual_weight: usize,
}

impl TrialVerdict {
    /// A trial fails if either component fails.
    pub fn word_failure(&self) -> bool {
        self.x.is_failure() || self.z.is_failure()
    }
}

/// Precomputed stabilizer row spaces for fast residual classification.
#[derive(Clone, Debug)]
pub struct Classifier {
    x_stabilizers: RowSpace,
    z_stabilizers: RowSpace,
}

impl Classifier {
    pub fn new(code: &TannerCode) -> Self {
        Self {
            x_stabilizers: RowSpace::new(&code.hx),
            z_stabilizers: RowSpace::new(&code.hz),
        }
    }

    /// Classifies `residual = ê ⊕ e` of component `t`.
    pub fn classify(&self, code: &TannerCode, t: ErrorType, residual: &BitVec) -> Result<Verdict> {
        let syndrome = code.check_matrix(t).mul_vec(residual)?;
        if !syndrome.is_zero() {
            return Ok(Verdict::DecodeFailure);
        }
        let same = match t {
            ErrorType::Z => &self.z_stabilizers,
            ErrorType::X => &self.x_stabilizers,
        };
        Ok(if same.contains(residual) {
            Verdict::Success
        } else {
            Verdict::LogicalFailure
        })
    }
}

/// One-shot form of [`Classifier::classify`].
pub fn classify_residual(code: &TannerCode, t: ErrorType, residual: &BitVec) -> Result<Verdict> {
    Classifier::new(code).classify(code, t, residual)
}
