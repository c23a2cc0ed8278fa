use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::channel::ErrorType;
use crate::codes::LinearCode;
use crate::gf2::{BitMatrix, BitVec};
use crate::{Error, Result};

/// Ordered `key=value` construction record.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CodeMeta {
    entries: Vec<(String, String)>,
}

impl CodeMeta {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Replaces an existing value in place or appends a new entry.
    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let key = key.into();
        let value = value.into();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Check rows owned by one vertex, with the qubits they touch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViewGroup {
    pub vertex_id: usize,
    pub rows: Vec<usize>,
    /// Sorted union of the supports of `rows`.
    pub support: Vec<usize>,
}

/// A partition of the rows of a check matrix into vertex-owned groups.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ViewCover {
    pub groups: Vec<ViewGroup>,
}

impl ViewCover {
    /// Builds a cover from `(vertex_id, rows)` pairs and checks that the rows
    /// partition `h`.
    pub fn from_rows(h: &BitMatrix, groups: Vec<(usize, Vec<usize>)>) -> Result<Self> {
        let groups = groups
            .into_iter()
            .map(|(vertex_id, rows)| {
                if let Some(&r) = rows.iter().find(|&&r| r >= h.rows()) {
                    return Err(Error::InvalidCover(format!(
                        "vertex {vertex_id} lists row {r} of a {}-row matrix",
                        h.rows()
                    )));
                }
                let support = union_support(h, &rows);
                Ok(ViewGroup {
                    vertex_id,
                    rows,
                    support,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let cover = Self { groups };
        cover.check_partition(h.rows())?;
        Ok(cover)
    }

    /// One group per row, used when no cover is known.
    pub fn singletons(h: &BitMatrix) -> Self {
        Self {
            groups: (0..h.rows())
                .map(|r| ViewGroup {
                    vertex_id: r,
                    rows: vec![r],
                    support: h.row_ones(r).collect(),
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn group(&self, v: usize) -> Result<&ViewGroup> {
        self.groups.get(v).ok_or(Error::InvalidVertex {
            vertex: v,
            groups: self.groups.len(),
        })
    }

    fn check_partition(&self, rows: usize) -> Result<()> {
        let mut owner = vec![usize::MAX; rows];
        for (gi, g) in self.groups.iter().enumerate() {
            for &r in &g.rows {
                if r >= rows {
                    return Err(Error::InvalidCover(format!("row {r} out of range")));
                }
                if owner[r] != usize::MAX {
                    return Err(Error::InvalidCover(format!(
                        "row {r} claimed by groups {} and {gi}",
                        owner[r]
                    )));
                }
                owner[r] = gi;
            }
        }
        if let Some(r) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::InvalidCover(format!("row {r} belongs to no group")));
        }
        Ok(())
    }

    /// Checks the partition property and that every support is exact.
    pub fn validate(&self, h: &BitMatrix) -> Result<()> {
        self.check_partition(h.rows())?;
        for g in &self.groups {
            if g.support != union_support(h, &g.rows) {
                return Err(Error::InvalidCover(format!(
                    "support of vertex {} does not match its rows",
                    g.vertex_id
                )));
            }
        }
        Ok(())
    }

    /// Number of groups whose support contains each of `n` qubits.
    pub fn multiplicity(&self, n: usize) -> Vec<usize> {
        let mut count = vec![0; n];
        for g in &self.groups {
            for &q in &g.support {
                count[q] += 1;
            }
        }
        count
    }

    /// `hist[m]` = number of qubits lying in exactly `m` groups.
    pub fn histogram(&self, n: usize) -> Vec<usize> {
        let mult = self.multiplicity(n);
        let mut hist = vec![0; mult.iter().copied().max().unwrap_or(0) + 1];
        for m in mult {
            hist[m] += 1;
        }
        hist
    }

    /// Mean number of rows per group.
    pub fn mean_rows(&self) -> f64 {
        if self.groups.is_empty() {
            return 0.0;
        }
        let total: usize = self.groups.iter().map(|g| g.rows.len()).sum();
        total as f64 / self.groups.len() as f64
    }
}

fn union_support(h: &BitMatrix, rows: &[usize]) -> Vec<usize> {
    let mut acc = BitVec::zeros(h.cols());
    for &r in rows {
        for c in h.row_ones(r) {
            acc.set(c, true);
        }
    }
    acc.to_indices()
}

/// A vertex's local check matrix and the global index of each local column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalView {
    pub hv: BitMatrix,
    pub col_map: Vec<usize>,
}

/// Rows of group `v` restricted to the group's support.
pub fn extract_view(h: &BitMatrix, cover: &ViewCover, v: usize) -> Result<LocalView> {
    let group = cover.group(v)?;
    Ok(LocalView {
        hv: h.submatrix(&group.rows, &group.support),
        col_map: group.support.clone(),
    })
}

/// The syndrome bits of group `v`, in group row order.
pub fn local_syndrome(s: &BitVec, cover: &ViewCover, v: usize) -> Result<BitVec> {
    let group = cover.group(v)?;
    if let Some(&r) = group.rows.iter().find(|&&r| r >= s.len()) {
        return Err(Error::Dimension {
            context: "local_syndrome",
            expected: r + 1,
            found: s.len(),
        });
    }
    Ok(s.gather(&group.rows))
}

/// A CSS code with the vertex covers of both check matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TannerCode {
    pub n: usize,
    pub k: usize,
    pub hx: BitMatrix,
    pub hz: BitMatrix,
    pub cover_x: ViewCover,
    pub cover_z: ViewCover,
    pub meta: CodeMeta,
    /// Optional local codes, labelled (`ca`, `cb`, ...).
    pub classical: Vec<(String, LinearCode)>,
}

/// Structural summary produced by [`TannerCode::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub css_ok: bool,
    /// First `(hx row, hz row)` pair with odd overlap.
    pub css_violation: Option<(usize, usize)>,
    pub covers_ok: bool,
    pub cover_error: Option<String>,
    pub n: usize,
    pub k: usize,
    pub rank_hx: usize,
    pub rank_hz: usize,
    pub max_row_weight: usize,
    pub max_col_weight: usize,
    /// `multiplicity_x[m]` = qubits in exactly `m` groups of `cover_x`.
    pub multiplicity_x: Vec<usize>,
    pub multiplicity_z: Vec<usize>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.css_ok && self.covers_ok
    }
}

fn css_violation(hx: &BitMatrix, hz: &BitMatrix) -> Option<(usize, usize)> {
    let prod = hx.mul_transpose(hz).ok()?;
    (0..prod.rows()).find_map(|i| prod.row_ones(i).next().map(|j| (i, j)))
}

impl TannerCode {
    /// Validates dimensions, the CSS condition and both covers.
    pub fn new(
        hx: BitMatrix,
        hz: BitMatrix,
        cover_x: ViewCover,
        cover_z: ViewCover,
        meta: CodeMeta,
    ) -> Result<Self> {
        if hx.cols() != hz.cols() {
            return Err(Error::Dimension {
                context: "hx vs hz columns",
                expected: hx.cols(),
                found: hz.cols(),
            });
        }
        if let Some((x_row, z_row)) = css_violation(&hx, &hz) {
            return Err(Error::CssViolation { x_row, z_row });
        }
        cover_x.validate(&hx)?;
        cover_z.validate(&hz)?;
        let n = hx.cols();
        let k = n - hx.rank() - hz.rank();
        Ok(Self {
            n,
            k,
            hx,
            hz,
            cover_x,
            cover_z,
            meta,
            classical: Vec::new(),
        })
    }

    pub fn validate(&self) -> ValidationReport {
        let css_violation = if self.hx.cols() == self.hz.cols() {
            css_violation(&self.hx, &self.hz)
        } else {
            Some((0, 0))
        };
        let cover_error = self
            .cover_x
            .validate(&self.hx)
            .and_then(|_| self.cover_z.validate(&self.hz))
            .err()
            .map(|e| e.to_string());
        let rank_hx = self.hx.rank();
        let rank_hz = self.hz.rank();
        let max_row_weight = [&self.hx, &self.hz]
            .iter()
            .flat_map(|h| (0..h.rows()).map(|r| h.row_weight(r)))
            .max()
            .unwrap_or(0);
        let mut max_col_weight = 0;
        for h in [&self.hx, &self.hz] {
            let mut w = vec![0usize; h.cols()];
            for r in 0..h.rows() {
                for c in h.row_ones(r) {
                    w[c] += 1;
                }
            }
            max_col_weight = max_col_weight.max(w.into_iter().max().unwrap_or(0));
        }
        ValidationReport {
            css_ok: css_violation.is_none(),
            css_violation,
            covers_ok: cover_error.is_none(),
            cover_error,
            n: self.n,
            k: self.n.saturating_sub(rank_hx + rank_hz),
            rank_hx,
            rank_hz,
            max_row_weight,
            max_col_weight,
            multiplicity_x: self.cover_x.histogram(self.n),
            multiplicity_z: self.cover_z.histogram(self.n),
        }
    }

    /// The matrix whose syndrome reveals errors of type `t`.
    pub fn check_matrix(&self, t: ErrorType) -> &BitMatrix {
        match t {
            ErrorType::Z => &self.hx,
            ErrorType::X => &self.hz,
        }
    }

    pub fn cover(&self, t: ErrorType) -> &ViewCover {
        match t {
            ErrorType::Z => &self.cover_x,
            ErrorType::X => &self.cover_z,
        }
    }

    /// Stabilizers of the same Pauli type as errors of type `t`.
    pub fn stabilizers(&self, t: ErrorType) -> &BitMatrix {
        match t {
            ErrorType::Z => &self.hz,
            ErrorType::X => &self.hx,
        }
    }

    pub fn name(&self) -> String {
        self.meta
            .get("name")
            .map(ToString::to_string)
            .unwrap_or_else(|| format!("n{}k{}", self.n, self.k))
    }
}
