//! Left-right Cayley complexes and the quantum Tanner codes built on them.
//!
//! A face `(g, a, b)` has corners `(g,0)`, `(ag,1)`, `(gb,1)` and `(agb,0)`.
//! Qubits sit on faces, Z-type checks on side-0 vertices and X-type checks on
//! side-1 vertices. Each vertex sees a `Δ × Δ` array of faces indexed by
//! positions in `A` and `B`; local tensor codewords are laid out on that array.
//!
//! Two face modes are supported:
//!
//! * [`FaceMode::Tuple`] keeps every triple `(g, a, b)` as its own face and
//!   keeps the corner role of each vertex. Side 0 has vertex ids `g` (role
//!   `g`) and `|G| + h` (role `agb = h`); side 1 has ids `x` (role `ag = x`)
//!   and `|G| + y` (role `gb = y`). Every face has one corner of each role, so
//!   `n = |G|Δ²` and each qubit lies in exactly two views per side. No
//!   conjugacy condition is needed.
//! * [`FaceMode::Quotient`] identifies `(g, a, b)` with `(agb, a⁻¹, b⁻¹)`,
//!   giving `n = |G|Δ²/2` and `|G|` vertices per side. This requires total
//!   no-conjugacy, which makes the four corners of every face distinct.

mod group;
mod tanner;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub use group::{FiniteGroup, GeneratorSets};
pub use tanner::{
    extract_view, local_syndrome, CodeMeta, LocalView, TannerCode, ValidationReport, ViewCover,
    ViewGroup,
};

use crate::codes::LinearCode;
use crate::gf2::{BitMatrix, BitVec};
use crate::{Error, Result};

/// At most this many witnesses are collected by [`check_tnc`].
pub const MAX_TNC_WITNESSES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum FaceMode {
    #[default]
    Tuple,
    Quotient,
}

impl fmt::Display for FaceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FaceMode::Tuple => "tuple",
            FaceMode::Quotient => "quotient",
        })
    }
}

impl FromStr for FaceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tuple" => Ok(FaceMode::Tuple),
            "quotient" => Ok(FaceMode::Quotient),
            other => Err(Error::InvalidParameter(format!("unknown face mode `{other}`"))),
        }
    }
}

/// Result of a total no-conjugacy check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TncReport {
    pub holds: bool,
    /// Triples `(g, a, b)` with `ag = gb`, capped at [`MAX_TNC_WITNESSES`].
    pub witnesses: Vec<(usize, usize, usize)>,
}

/// Checks `ag ≠ gb` for every `g ∈ G`, `a ∈ A`, `b ∈ B`.
pub fn check_tnc(group: &FiniteGroup, gens: &GeneratorSets) -> TncReport {
    let mut witnesses = Vec::new();
    let mut holds = true;
    for g in 0..group.order() {
        for &a in &gens.a {
            for &b in &gens.b {
                if group.mul(a, g) == group.mul(g, b) {
                    holds = false;
                    if witnesses.len() < MAX_TNC_WITNESSES {
                        witnesses.push((g, a, b));
                    }
                }
            }
        }
    }
    TncReport { holds, witnesses }
}

/// A face `(g, a, b)` with the positions of `a` in `A` and `b` in `B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Face {
    pub g: usize,
    pub a: usize,
    pub b: usize,
    pub a_pos: usize,
    pub b_pos: usize,
}

impl Face {
    /// Corners `[(g,0), (ag,1), (gb,1), (agb,0)]` as `(element, side)`.
    pub fn corners(&self, group: &FiniteGroup) -> [(usize, u8); 4] {
        let ag = group.mul(self.a, self.g);
        let gb = group.mul(self.g, self.b);
        [(self.g, 0), (ag, 1), (gb, 1), (group.mul(ag, self.b), 0)]
    }
}

/// One face seen from a vertex, at cell `(row, col)` of its local array.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Incidence {
    pub face: usize,
    pub row: usize,
    pub col: usize,
}

#[derive(Clone, Debug)]
pub struct CayleyComplex {
    pub group: FiniteGroup,
    pub gens: GeneratorSets,
    pub mode: FaceMode,
    /// Faces in lexicographic `(g, a_pos, b_pos)` order.
    pub faces: Vec<Face>,
    /// `vertices[side][id]` lists the incident faces of a vertex in face order.
    pub vertices: [Vec<Vec<Incidence>>; 2],
}

/// Enumerates faces and vertex neighbourhoods.
pub fn build_complex(group: &FiniteGroup, gens: &GeneratorSets, mode: FaceMode) -> Result<CayleyComplex> {
    if let Some(&x) = gens.a.iter().chain(&gens.b).find(|&&x| x >= group.order()) {
        return Err(Error::InvalidGenerators(format!(
            "element {x} outside a group of order {}",
            group.order()
        )));
    }
    let order = group.order();
    let delta = gens.delta();
    if mode == FaceMode::Quotient {
        let tnc = check_tnc(group, gens);
        if let Some(&(g, a, b)) = tnc.witnesses.first() {
            return Err(Error::TncViolation { g, a, b });
        }
    }
    let pos_a = |x: usize| gens.position_a(x).expect("A is inverse-closed");
    let pos_b = |x: usize| gens.position_b(x).expect("B is inverse-closed");

    let per_side = match mode {
        FaceMode::Tuple => 2 * order,
        FaceMode::Quotient => order,
    };
    let mut vertices = [vec![Vec::new(); per_side], vec![Vec::new(); per_side]];
    let mut faces = Vec::with_capacity(order * delta * delta);
    for g in 0..order {
        for (a_pos, &a) in gens.a.iter().enumerate() {
            for (b_pos, &b) in gens.b.iter().enumerate() {
                let face = Face { g, a, b, a_pos, b_pos };
                let ag = group.mul(a, g);
                let gb = group.mul(g, b);
                let agb = group.mul(ag, b);
                let id = faces.len();
                let at = |row, col| Incidence { face: id, row, col };
                match mode {
                    FaceMode::Tuple => {
                        vertices[0][g].push(at(a_pos, b_pos));
                        vertices[0][order + agb].push(at(a_pos, b_pos));
                        vertices[1][ag].push(at(a_pos, b_pos));
                        vertices[1][order + gb].push(at(a_pos, b_pos));
                    }
                    FaceMode::Quotient => {
                        let a_inv = pos_a(group.inv(a));
                        let b_inv = pos_b(group.inv(b));
                        if (agb, a_inv, b_inv) < (g, a_pos, b_pos) {
                            continue;
                        }
                        vertices[0][g].push(at(a_pos, b_pos));
                        vertices[0][agb].push(at(a_inv, b_inv));
                        vertices[1][ag].push(at(a_inv, b_pos));
                        vertices[1][gb].push(at(a_pos, b_inv));
                    }
                }
                faces.push(face);
            }
        }
    }
    Ok(CayleyComplex {
        group: group.clone(),
        gens: gens.clone(),
        mode,
        faces,
        vertices,
    })
}

impl CayleyComplex {
    pub fn delta(&self) -> usize {
        self.gens.delta()
    }

    pub fn vertex_count(&self, side: usize) -> usize {
        self.vertices[side].len()
    }

    /// Human-readable role of a vertex id, e.g. `g=3` or `agb=1`.
    pub fn vertex_label(&self, side: usize, id: usize) -> String {
        let order = self.group.order();
        let (role, elem) = match (self.mode, side, id >= order) {
            (FaceMode::Quotient, 0, _) => ("v0", id),
            (FaceMode::Quotient, _, _) => ("v1", id),
            (FaceMode::Tuple, 0, false) => ("g", id),
            (FaceMode::Tuple, 0, true) => ("agb", id - order),
            (FaceMode::Tuple, _, false) => ("ag", id),
            (FaceMode::Tuple, _, true) => ("gb", id - order),
        };
        format!("{role}={elem}")
    }

    /// The `Δ × Δ` array of face indices around a vertex, row-major.
    pub fn local_array(&self, side: usize, id: usize) -> Result<Vec<usize>> {
        let delta = self.delta();
        let mut cells = vec![usize::MAX; delta * delta];
        for inc in &self.vertices[side][id] {
            let cell = &mut cells[inc.row * delta + inc.col];
            if *cell != usize::MAX {
                return Err(Error::InvalidGenerators(format!(
                    "vertex {} sees two faces at cell ({}, {})",
                    self.vertex_label(side, id),
                    inc.row,
                    inc.col
                )));
            }
            *cell = inc.face;
        }
        if cells.contains(&usize::MAX) {
            return Err(Error::InvalidGenerators(format!(
                "vertex {} has an incomplete neighbourhood",
                self.vertex_label(side, id)
            )));
        }
        Ok(cells)
    }
}

/// Embeds a basis of `C_A ⊗ C_B` at every side-0 vertex (rows of `hz`) and a
/// basis of `C_A^⊥ ⊗ C_B^⊥` at every side-1 vertex (rows of `hx`).
pub fn assemble_css(complex: &CayleyComplex, ca: &LinearCode, cb: &LinearCode) -> Result<TannerCode> {
    let delta = complex.delta();
    for code in [ca, cb] {
        if code.n != delta {
            return Err(Error::Dimension {
                context: "local code length vs generator set size",
                expected: delta,
                found: code.n,
            });
        }
    }
    let n = complex.faces.len();
    let c0 = ca.tensor(cb);
    let c1 = ca.dual().tensor(&cb.dual());
    let (hz, cover_z) = embed(complex, 0, &c0.gen, n)?;
    let (hx, cover_x) = embed(complex, 1, &c1.gen, n)?;

    let mut meta = CodeMeta::default();
    meta.set("n", n.to_string());
    meta.set("mode", complex.mode.to_string());
    meta.set("group", complex.group.label());
    meta.set("delta", delta.to_string());
    meta.set("a_set", join(&complex.gens.a));
    meta.set("b_set", join(&complex.gens.b));
    meta.set("ca", ca.name.clone());
    meta.set("cb", cb.name.clone());
    let mut code = TannerCode::new(hx, hz, cover_x, cover_z, meta)?;
    code.classical = vec![("ca".to_string(), ca.clone()), ("cb".to_string(), cb.clone())];
    Ok(code)
}

fn embed(
    complex: &CayleyComplex,
    side: usize,
    local_gen: &BitMatrix,
    n: usize,
) -> Result<(BitMatrix, ViewCover)> {
    let mut h = BitMatrix::zeros(0, n);
    let mut groups = Vec::with_capacity(complex.vertex_count(side));
    for id in 0..complex.vertex_count(side) {
        let cells = complex.local_array(side, id)?;
        let first = h.rows();
        for r in 0..local_gen.rows() {
            let mut row = BitVec::zeros(n);
            for pos in local_gen.row_ones(r) {
                row.set(cells[pos], true);
            }
            h.push_row(&row)?;
        }
        groups.push((id, (first..h.rows()).collect()));
    }
    let cover = ViewCover::from_rows(&h, groups)?;
    Ok((h, cover))
}

fn join(xs: &[usize]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    parts.join(",")
}

/// Builds the complex and assembles the code in one step.
pub fn construct(
    group: &FiniteGroup,
    gens: &GeneratorSets,
    mode: FaceMode,
    ca: &LinearCode,
    cb: &LinearCode,
) -> Result<TannerCode> {
    assemble_css(&build_complex(group, gens, mode)?, ca, cb)
}
