//! Classical binary linear codes used as local codes of the complex.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::gf2::{BitMatrix, BitVec};
use crate::{Error, Result};

/// Names accepted by [`LinearCode::builtin`], besides the `repN` family.
pub const BUILTIN_NAMES: [&str; 4] = ["rep3", "hamming74", "bch74", "rand_eq6"];

/// A binary linear code given by a parity-check matrix and a generator basis.
///
/// Check rows may be linearly dependent; generator rows always form a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub check: BitMatrix,
    pub gen: BitMatrix,
}

impl LinearCode {
    /// Code defined as the kernel of `check`. The generator basis is read off
    /// the reduced echelon form with free variables in increasing order.
    pub fn from_check(name: impl Into<String>, check: BitMatrix) -> Self {
        let gen = check.kernel();
        Self {
            name: name.into(),
            n: check.cols(),
            k: gen.rows(),
            check,
            gen,
        }
    }

    /// Code spanned by the rows of `gen` (which may be dependent).
    pub fn from_generator(name: impl Into<String>, gen: BitMatrix) -> Self {
        let check = gen.kernel();
        let gen = if gen.rank() == gen.rows() {
            gen
        } else {
            gen.row_basis()
        };
        Self {
            name: name.into(),
            n: check.cols(),
            k: gen.rows(),
            check,
            gen,
        }
    }

    /// Looks up a named code. Besides [`BUILTIN_NAMES`], `repN` gives the
    /// length-`N` repetition code for any `N ≥ 2`.
    pub fn builtin(name: &str) -> Result<Self> {
        let code = match name {
            "rep3" => repetition(3),
            "hamming74" => Self::from_check(
                name,
                BitMatrix::from_dense(&[
                    [1u8, 0, 1, 0, 1, 0, 1],
                    [0, 1, 1, 0, 0, 1, 1],
                    [0, 0, 0, 1, 1, 1, 1],
                ]),
            ),
            "bch74" => {
                // Cyclic shifts of the generator polynomial 1 + x + x^3.
                let rows: Vec<[usize; 3]> = (0..4).map(|s| [s, s + 1, s + 3]).collect();
                let gen = BitMatrix::from_row_indices(7, &rows)?;
                Self::from_generator(name, gen)
            }
            "rand_eq6" => Self::from_check(
                name,
                BitMatrix::from_dense(&[
                    [1u8, 1, 0, 1, 0, 0],
                    [0, 1, 1, 0, 1, 0],
                    [1, 0, 1, 0, 0, 1],
                ]),
            ),
            other => match other.strip_prefix("rep").and_then(|s| s.parse::<usize>().ok()) {
                Some(n) if n >= 2 => repetition(n),
                _ => return Err(Error::UnknownCode(other.to_string())),
            },
        };
        Ok(code)
    }

    /// Resolves `dual(NAME)` or a builtin name.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        match spec.strip_prefix("dual(").and_then(|s| s.strip_suffix(')')) {
            Some(inner) => Ok(Self::parse(inner)?.dual()),
            None => Self::builtin(spec),
        }
    }

    /// The orthogonal complement. Its check matrix is this code's generator.
    pub fn dual(&self) -> Self {
        Self {
            name: format!("dual({})", self.name),
            n: self.n,
            k: self.n - self.k,
            check: self.gen.clone(),
            gen: self.check.row_basis(),
        }
    }

    /// Tensor product. Position `(i, j)` of the `self.n × other.n` array maps
    /// to index `i * other.n + j`.
    pub fn tensor(&self, other: &Self) -> Self {
        let (na, nb) = (self.n, other.n);
        let n = na * nb;
        let mut gen = BitMatrix::zeros(0, n);
        for ra in 0..self.gen.rows() {
            for rb in 0..other.gen.rows() {
                let mut row = BitVec::zeros(n);
                for i in self.gen.row_ones(ra) {
                    for j in other.gen.row_ones(rb) {
                        row.set(i * nb + j, true);
                    }
                }
                gen.push_row(&row).expect("tensor row length");
            }
        }
        // Columns of the array lie in `self`, rows lie in `other`.
        let mut check = BitMatrix::zeros(0, n);
        for r in 0..self.check.rows() {
            for j in 0..nb {
                let mut row = BitVec::zeros(n);
                for i in self.check.row_ones(r) {
                    row.set(i * nb + j, true);
                }
                check.push_row(&row).expect("tensor row length");
            }
        }
        for r in 0..other.check.rows() {
            for i in 0..na {
                let mut row = BitVec::zeros(n);
                for j in other.check.row_ones(r) {
                    row.set(i * nb + j, true);
                }
                check.push_row(&row).expect("tensor row length");
            }
        }
        Self {
            name: format!("{}x{}", self.name, other.name),
            n,
            k: self.k * other.k,
            check,
            gen,
        }
    }

    pub fn contains(&self, word: &BitVec) -> bool {
        word.len() == self.n && self.check.mul_vec(word).is_ok_and(|s| s.is_zero())
    }

    /// All `2^k` codewords. Intended for small codes only.
    pub fn codewords(&self) -> Vec<BitVec> {
        assert!(self.k < 24, "codeword enumeration limited to k < 24");
        (0u32..1 << self.k)
            .map(|mask| {
                let mut w = BitVec::zeros(self.n);
                for r in 0..self.k {
                    if mask >> r & 1 == 1 {
                        w.xor_assign(&self.gen.row(r));
                    }
                }
                w
            })
            .collect()
    }

    /// Minimum nonzero weight by enumeration; `None` for the zero code.
    pub fn min_distance(&self) -> Option<usize> {
        self.codewords()
            .iter()
            .map(BitVec::weight)
            .filter(|&w| w > 0)
            .min()
    }
}

fn repetition(n: usize) -> LinearCode {
    let rows: Vec<[usize; 2]> = (0..n - 1).map(|i| [i, i + 1]).collect();
    let check = BitMatrix::from_row_indices(n, &rows).expect("repetition check");
    LinearCode::from_check(format!("rep{n}"), check)
}
