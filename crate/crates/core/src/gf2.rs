//! Dense, bit-packed linear algebra over GF(2).
//!
//! Rows are stored as runs of 64-bit words; any bits past the logical column
//! count in the last word of a row are kept at zero so that word-level
//! comparisons, hashing and popcounts stay exact.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

const WORD_BITS: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A packed vector of bits.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Builds a vector of length `len` with ones at `indices`.
    ///
    /// Repeated indices toggle, which matches GF(2) addition of unit vectors.
    pub fn from_indices(len: usize, indices: &[usize]) -> Result<Self> {
        let mut v = Self::zeros(len);
        for &i in indices {
            if i >= len {
                return Err(Error::Dimension {
                    context: "bit index",
                    expected: len,
                    found: i,
                });
            }
            v.flip(i);
        }
        Ok(v)
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Accepts any nonzero byte as a one.
    pub fn from_bytes(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    /// In-place XOR. Panics on length mismatch.
    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "BitVec length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "BitVec length mismatch");
        parity_and(&self.words, &other.words)
    }

    /// Indices of set bits in increasing order.
    pub fn iter_ones(&self) -> Ones<'_> {
        Ones::new(&self.words)
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    /// Gathers the bits at `indices` into a new vector.
    pub fn gather(&self, indices: &[usize]) -> BitVec {
        let mut out = BitVec::zeros(indices.len());
        for (k, &i) in indices.iter().enumerate() {
            if self.get(i) {
                out.set(k, true);
            }
        }
        out
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, "]")
    }
}

#[inline]
fn parity_and(a: &[u64], b: &[u64]) -> bool {
    let mut acc = 0u64;
    for (x, y) in a.iter().zip(b) {
        acc ^= x & y;
    }
    acc.count_ones() & 1 == 1
}

/// Iterator over the set-bit positions of a word slice.
pub struct Ones<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl<'a> Ones<'a> {
    fn new(words: &'a [u64]) -> Self {
        Self {
            words,
            index: 0,
            current: words.first().copied().unwrap_or(0),
        }
    }
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD_BITS + bit);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

/// Row-major bit-packed matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{}", u8::from(self.get(r, c)))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from per-row column index lists.
    pub fn from_row_indices<R: AsRef<[usize]>>(cols: usize, rows: &[R]) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            for &c in row.as_ref() {
                if c >= cols {
                    return Err(Error::Dimension {
                        context: "column index",
                        expected: cols,
                        found: c,
                    });
                }
                m.set(r, c, true);
            }
        }
        Ok(m)
    }

    /// Builds a matrix from dense 0/1 rows. Panics on ragged input.
    pub fn from_dense<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), cols, "ragged dense matrix");
            for (c, &b) in row.iter().enumerate() {
                if b != 0 {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    /// Stacks vectors of equal length as rows.
    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Result<Self> {
        let mut m = Self::zeros(0, cols);
        for row in rows {
            m.push_row(row)?;
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / WORD_BITS];
        let mask = 1u64 << (c % WORD_BITS);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVec {
        BitVec {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    pub fn row_ones(&self, r: usize) -> Ones<'_> {
        Ones::new(self.row_words(r))
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn column(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn col_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn push_row(&mut self, row: &BitVec) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::Dimension {
                context: "push_row",
                expected: self.cols,
                found: row.len(),
            });
        }
        self.data.extend_from_slice(&row.words);
        self.rows += 1;
        Ok(())
    }

    #[inline]
    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (head, tail) = self.data.split_at_mut(hi * s);
        head[lo * s..(lo + 1) * s].swap_with_slice(&mut tail[..s]);
    }

    /// `row[dst] ^= row[src]`.
    #[inline]
    pub(crate) fn xor_row_into(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let s = self.stride;
        if src < dst {
            let (head, tail) = self.data.split_at_mut(dst * s);
            for (d, x) in tail[..s].iter_mut().zip(&head[src * s..(src + 1) * s]) {
                *d ^= *x;
            }
        } else {
            let (head, tail) = self.data.split_at_mut(src * s);
            for (d, x) in head[dst * s..(dst + 1) * s].iter_mut().zip(&tail[..s]) {
                *d ^= *x;
            }
        }
    }

    /// Matrix-vector product `self · x`.
    pub fn mul_vec(&self, x: &BitVec) -> Result<BitVec> {
        if x.len() != self.cols {
            return Err(Error::Dimension {
                context: "mul_vec",
                expected: self.cols,
                found: x.len(),
            });
        }
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if parity_and(self.row_words(r), &x.words) {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// `self · otherᵀ`; both operands must have the same column count.
    pub fn mul_transpose(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension {
                context: "mul_transpose",
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            for j in 0..other.rows {
                if parity_and(self.row_words(i), other.row_words(j)) {
                    out.set(i, j, true);
                }
            }
        }
        Ok(out)
    }

    pub fn select_rows(&self, rows: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(rows.len(), self.cols);
        for (k, &r) in rows.iter().enumerate() {
            out.row_words_mut(k).copy_from_slice(self.row_words(r));
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    out.set(r, k, true);
                }
            }
        }
        out
    }

    /// Submatrix on the given rows and columns, in the given orders.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (k, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    out.set(i, k, true);
                }
            }
        }
        out
    }

    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension {
                context: "vstack",
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut out = self.clone();
        out.data.extend_from_slice(&other.data);
        out.rows += other.rows;
        Ok(out)
    }

    /// GF(2) row rank.
    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        gauss(&mut work, 0..self.cols, &mut (), false).len()
    }

    /// Some `x` with `self · x = s`, or `None` when `s` is outside the column space.
    pub fn solve(&self, s: &BitVec) -> Result<Option<BitVec>> {
        if s.len() != self.rows {
            return Err(Error::Dimension {
                context: "solve",
                expected: self.rows,
                found: s.len(),
            });
        }
        let mut work = self.clone();
        let mut rhs = s.clone();
        let pivots = gauss(&mut work, 0..self.cols, &mut rhs, true);
        Ok(back_substitute(&pivots, &rhs, self.cols))
    }

    /// Whether `v` is a GF(2) combination of the rows.
    pub fn in_rowspace(&self, v: &BitVec) -> Result<bool> {
        if v.len() != self.cols {
            return Err(Error::Dimension {
                context: "in_rowspace",
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(RowSpace::new(self).contains(v))
    }

    /// Reduced row echelon form, visiting columns in `col_order`.
    pub fn echelonize(&self, col_order: &[usize]) -> Result<EchelonForm> {
        if !is_permutation(col_order, self.cols) {
            return Err(Error::InvalidPermutation(self.cols));
        }
        let mut transformed = self.clone();
        let mut transform = BitMatrix::identity(self.rows);
        let pivot_cols = gauss(
            &mut transformed,
            col_order.iter().copied(),
            &mut transform,
            true,
        );
        Ok(EchelonForm {
            rank: pivot_cols.len(),
            transformed,
            pivot_cols,
            transform,
        })
    }

    /// Basis of the null space `{x : self · x = 0}`, one row per free column
    /// in increasing column order.
    pub fn kernel(&self) -> BitMatrix {
        let mut work = self.clone();
        let pivots = gauss(&mut work, 0..self.cols, &mut (), true);
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = BitMatrix::zeros(0, self.cols);
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut x = BitVec::zeros(self.cols);
            x.set(free, true);
            for (r, &p) in pivots.iter().enumerate() {
                if work.get(r, free) {
                    x.set(p, true);
                }
            }
            basis.push_row(&x).expect("kernel row length");
        }
        basis
    }

    /// A basis of the row space (the nonzero rows of the RREF).
    pub fn row_basis(&self) -> BitMatrix {
        let mut work = self.clone();
        let rank = gauss(&mut work, 0..self.cols, &mut (), true).len();
        work.data.truncate(rank * work.stride);
        work.rows = rank;
        work
    }
}

pub(crate) fn is_permutation(order: &[usize], n: usize) -> bool {
    if order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &c in order {
        if c >= n || seen[c] {
            return false;
        }
        seen[c] = true;
    }
    true
}

/// Row operations mirrored onto a companion object during elimination.
pub(crate) trait RowOps {
    fn swap(&mut self, a: usize, b: usize);
    fn xor_into(&mut self, src: usize, dst: usize);
}

impl RowOps for () {
    #[inline]
    fn swap(&mut self, _: usize, _: usize) {}
    #[inline]
    fn xor_into(&mut self, _: usize, _: usize) {}
}

impl RowOps for BitVec {
    #[inline]
    fn swap(&mut self, a: usize, b: usize) {
        let (x, y) = (self.get(a), self.get(b));
        self.set(a, y);
        self.set(b, x);
    }
    #[inline]
    fn xor_into(&mut self, src: usize, dst: usize) {
        if self.get(src) {
            self.flip(dst);
        }
    }
}

impl RowOps for BitMatrix {
    #[inline]
    fn swap(&mut self, a: usize, b: usize) {
        self.swap_rows(a, b);
    }
    #[inline]
    fn xor_into(&mut self, src: usize, dst: usize) {
        self.xor_row_into(src, dst);
    }
}

/// Gaussian elimination over the columns yielded by `order`. With `full`, rows
/// above each pivot are cleared too (reduced form). Pivot row `r` ends up with
/// its pivot at the returned `pivots[r]`.
pub(crate) fn gauss<I, T>(m: &mut BitMatrix, order: I, ops: &mut T, full: bool) -> Vec<usize>
where
    I: IntoIterator<Item = usize>,
    T: RowOps + ?Sized,
{
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in order {
        if rank == m.rows {
            break;
        }
        let word = c / WORD_BITS;
        let mask = 1u64 << (c % WORD_BITS);
        let stride = m.stride;
        let Some(p) = (rank..m.rows).find(|&r| m.data[r * stride + word] & mask != 0) else {
            continue;
        };
        m.swap_rows(p, rank);
        ops.swap(p, rank);
        let start = if full { 0 } else { rank + 1 };
        for r in start..m.rows {
            if r != rank && m.data[r * stride + word] & mask != 0 {
                m.xor_row_into(rank, r);
                ops.xor_into(rank, r);
            }
        }
        pivots.push(c);
        rank += 1;
    }
    pivots
}

/// Reads a solution off a reduced system; `None` if a zero row has a nonzero rhs.
pub(crate) fn back_substitute(pivots: &[usize], rhs: &BitVec, cols: usize) -> Option<BitVec> {
    if (pivots.len()..rhs.len()).any(|r| rhs.get(r)) {
        return None;
    }
    let mut x = BitVec::zeros(cols);
    for (r, &p) in pivots.iter().enumerate() {
        if rhs.get(r) {
            x.set(p, true);
        }
    }
    Some(x)
}

/// Reduced row echelon form plus the row transform that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EchelonForm {
    pub transformed: BitMatrix,
    /// Pivot column of each pivot row, in row order.
    pub pivot_cols: Vec<usize>,
    pub rank: usize,
    /// Invertible `T` with `T · original = transformed`.
    pub transform: BitMatrix,
}

impl EchelonForm {
    /// Solves `original · x = s` using the stored transform.
    pub fn solve(&self, s: &BitVec) -> Result<Option<BitVec>> {
        let rhs = self.transform.mul_vec(s)?;
        Ok(back_substitute(
            &self.pivot_cols,
            &rhs,
            self.transformed.cols(),
        ))
    }
}

/// Precomputed row space for repeated membership queries.
#[derive(Clone, Debug)]
pub struct RowSpace {
    basis: BitMatrix,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new(m: &BitMatrix) -> Self {
        let mut basis = m.clone();
        let pivots = gauss(&mut basis, 0..m.cols, &mut (), true);
        basis.data.truncate(pivots.len() * basis.stride);
        basis.rows = pivots.len();
        Self { basis, pivots }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn len(&self) -> usize {
        self.basis.cols
    }

    pub fn is_empty(&self) -> bool {
        self.basis.cols == 0
    }

    /// Panics if `v` has the wrong length.
    pub fn contains(&self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.basis.cols, "RowSpace length mismatch");
        let mut w = v.words.clone();
        for (r, &p) in self.pivots.iter().enumerate() {
            if (w[p / WORD_BITS] >> (p % WORD_BITS)) & 1 == 1 {
                for (a, b) in w.iter_mut().zip(self.basis.row_words(r)) {
                    *a ^= *b;
                }
            }
        }
        w.iter().all(|&x| x == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eq6() -> BitMatrix {
        BitMatrix::from_dense(&[
            [1u8, 1, 0, 1, 0, 0],
            [0, 1, 1, 0, 1, 0],
            [1, 0, 1, 0, 0, 1],
        ])
    }

    /// Rank by enumerating all row combinations: the row space has 2^rank elements.
    fn brute_rank(m: &BitMatrix) -> usize {
        let mut seen = std::collections::BTreeSet::new();
        for mask in 0u32..(1 << m.rows()) {
            let mut v = BitVec::zeros(m.cols());
            for r in 0..m.rows() {
                if mask >> r & 1 == 1 {
                    v.xor_assign(&m.row(r));
                }
            }
            seen.insert(v.to_indices());
        }
        seen.len().trailing_zeros() as usize
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
        assert_eq!(BitMatrix::zeros(4, 7).rank(), 0);
        assert_eq!(brute_rank(&eq6()), 3);
        assert_eq!(eq6().rank(), 3);
        assert_eq!(BitMatrix::zeros(0, 0).rank(), 0);
    }

    #[test]
    fn solve_examples() {
        let id = BitMatrix::identity(2);
        let s = BitVec::from_bytes(&[1, 0]);
        assert_eq!(id.solve(&s).unwrap(), Some(s.clone()));

        let m = BitMatrix::from_dense(&[[1u8, 1]]);
        let x = m.solve(&BitVec::from_bytes(&[1])).unwrap().unwrap();
        assert_eq!(x.weight(), 1);

        // Enumerating all four inputs: m·x is always (x0+x1)(1,1), never (1,0).
        let m = BitMatrix::from_dense(&[[1u8, 0], [1, 0]]);
        assert_eq!(m.solve(&BitVec::from_bytes(&[1, 0])).unwrap(), None);

        assert!(matches!(
            id.solve(&BitVec::zeros(3)),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn rowspace_examples() {
        let m = BitMatrix::from_dense(&[[1u8, 1, 0], [0, 1, 1]]);
        assert!(m.in_rowspace(&BitVec::zeros(3)).unwrap());
        assert!(m.in_rowspace(&m.row(0)).unwrap());
        assert!(m.in_rowspace(&BitVec::from_bytes(&[1, 0, 1])).unwrap());
        assert!(!m.in_rowspace(&BitVec::from_bytes(&[1, 0, 0])).unwrap());
        assert!(m.in_rowspace(&BitVec::zeros(2)).is_err());
    }

    #[test]
    fn echelonize_examples() {
        let id = BitMatrix::identity(4);
        let e = id.echelonize(&[0, 1, 2, 3]).unwrap();
        assert_eq!(e.pivot_cols, [0, 1, 2, 3]);

        let e = BitMatrix::identity(2).echelonize(&[1, 0]).unwrap();
        assert_eq!(e.pivot_cols, [1, 0]);
        assert_eq!(e.rank, 2);

        // Columns 0, 1, 2 sum to zero, so the third pivot lands on column 3.
        let e = eq6().echelonize(&[0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!(e.rank, 3);
        assert_eq!(e.pivot_cols, [0, 1, 3]);

        assert!(matches!(
            eq6().echelonize(&[0, 1, 2]),
            Err(Error::InvalidPermutation(6))
        ));
        assert!(eq6().echelonize(&[0, 1, 2, 3, 4, 4]).is_err());
    }

    #[test]
    fn echelonize_is_pure() {
        let m = eq6();
        let before = m.clone();
        let a = m.echelonize(&[5, 3, 1, 0, 2, 4]).unwrap();
        let b = m.echelonize(&[5, 3, 1, 0, 2, 4]).unwrap();
        assert_eq!(m, before);
        assert_eq!(a, b);
        assert_eq!(a.pivot_cols, [5, 3, 1]);
        let prod = a.transform.mul_transpose(&m.transpose()).unwrap();
        assert_eq!(prod, a.transformed);
    }

    #[test]
    fn kernel_is_orthogonal_and_full() {
        let m = eq6();
        let k = m.kernel();
        assert_eq!(k.rows(), 3);
        assert!(m.mul_transpose(&k).unwrap().is_zero());
        assert_eq!(k.rank(), 3);
    }

    #[test]
    fn padding_bits_stay_zero() {
        let mut v = BitVec::zeros(70);
        v.set(69, true);
        v.flip(69);
        assert!(v.is_zero());
        let m = BitMatrix::from_row_indices(65, &[[64usize]]).unwrap();
        assert_eq!(m.transpose().transpose(), m);
        assert!(BitMatrix::from_row_indices(3, &[[3usize]]).is_err());
    }

    fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = BitMatrix> {
        proptest::collection::vec(proptest::collection::vec(0u8..2, cols), rows)
            .prop_map(|rows| BitMatrix::from_dense(&rows))
    }

    proptest! {
        #[test]
        fn rank_of_transpose(m in arb_matrix(20, 20)) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn row_combinations_are_in_rowspace(m in arb_matrix(6, 40), mask in 0u32..64) {
            let mut v = BitVec::zeros(40);
            for r in 0..6 {
                if mask >> r & 1 == 1 {
                    v.xor_assign(&m.row(r));
                }
            }
            prop_assert!(m.in_rowspace(&v).unwrap());
        }

        #[test]
        fn solve_is_exact_or_rank_grows(m in arb_matrix(8, 6), s in proptest::collection::vec(0u8..2, 8)) {
            let s = BitVec::from_bytes(&s);
            match m.solve(&s).unwrap() {
                Some(x) => prop_assert_eq!(m.mul_vec(&x).unwrap(), s),
                None => {
                    let aug = m.transpose().vstack(&BitMatrix::from_rows(8, &[s]).unwrap()).unwrap();
                    prop_assert!(aug.rank() > m.rank());
                }
            }
        }

        #[test]
        fn echelon_solve_matches(m in arb_matrix(7, 9), x in proptest::collection::vec(0u8..2, 9)) {
            let x = BitVec::from_bytes(&x);
            let s = m.mul_vec(&x).unwrap();
            let order: Vec<usize> = (0..9).rev().collect();
            let e = m.echelonize(&order).unwrap();
            let y = e.solve(&s).unwrap().unwrap();
            prop_assert_eq!(m.mul_vec(&y).unwrap(), s);
        }
    }
}
