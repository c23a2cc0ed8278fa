use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("column order is not a permutation of 0..{0}")]
    InvalidPermutation(usize),
    #[error("unknown component code `{0}`")]
    UnknownCode(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid generator sets: {0}")]
    InvalidGenerators(String),
    #[error("total no-conjugacy violated: a*g == g*b for g={g}, a={a}, b={b}")]
    TncViolation { g: usize, a: usize, b: usize },
    #[error("CSS condition violated: hx row {x_row} anticommutes with hz row {z_row}")]
    CssViolation { x_row: usize, z_row: usize },
    #[error("invalid view cover: {0}")]
    InvalidCover(String),
    #[error("vertex {vertex} out of range (cover has {groups} groups)")]
    InvalidVertex { vertex: usize, groups: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("post-processing failed: {0}")]
    PostProcess(&'static str),
}
