//! The `.qtc` code file format.
//!
//! ```text
//! # optional comment lines
//! META
//! n=36
//! mode=tuple
//! HX
//! 0 4 5 9
//! -
//! HZ
//! ...
//! COVER_X
//! 0 : 0 1
//! COVER_Z
//! ...
//! CLASSICAL
//! CODE ca rep3 3
//! 0 1
//! 1 2
//! ```
//!
//! Matrix rows are space-separated column indices; `-` is an empty row. A
//! cover line is `vertex_id : row indices`. Each `CODE <label> <name> <n>`
//! line in `CLASSICAL` starts a classical check matrix whose rows follow.
//! Blank lines and lines starting with `#` are ignored. `HX` and `HZ` are
//! required; missing covers fall back to one group per row.

use std::fmt::Write as _;
use std::path::Path;

use qtanner_core::codes::LinearCode;
use qtanner_core::complex::{CodeMeta, TannerCode, ViewCover};
use qtanner_core::BitMatrix;

#[derive(Debug, thiserror::Error)]
pub enum QtcError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid code: {0}")]
    Invalid(#[from] qtanner_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A parsed code plus any non-fatal remarks.
#[derive(Debug)]
pub struct Imported {
    pub code: TannerCode,
    pub warnings: Vec<String>,
}

const SECTIONS: [&str; 6] = ["META", "HX", "HZ", "COVER_X", "COVER_Z", "CLASSICAL"];

/// Canonical text form of `code`.
pub fn export_code(code: &TannerCode) -> String {
    let mut out = String::new();
    out.push_str("META\n");
    if code.meta.get("n").is_none() {
        let _ = writeln!(out, "n={}", code.n);
    }
    for (k, v) in code.meta.iter() {
        let _ = writeln!(out, "{k}={v}");
    }
    for (title, h) in [("HX", &code.hx), ("HZ", &code.hz)] {
        let _ = writeln!(out, "{title}");
        for r in 0..h.rows() {
            write_indices(&mut out, h.row_ones(r));
        }
    }
    for (title, cover) in [("COVER_X", &code.cover_x), ("COVER_Z", &code.cover_z)] {
        let _ = writeln!(out, "{title}");
        for g in &cover.groups {
            let _ = write!(out, "{} :", g.vertex_id);
            for r in &g.rows {
                let _ = write!(out, " {r}");
            }
            out.push('\n');
        }
    }
    if !code.classical.is_empty() {
        out.push_str("CLASSICAL\n");
        for (label, c) in &code.classical {
            let _ = writeln!(out, "CODE {label} {} {}", c.name, c.n);
            for r in 0..c.check.rows() {
                write_indices(&mut out, c.check.row_ones(r));
            }
        }
    }
    out
}

fn write_indices(out: &mut String, ones: impl Iterator<Item = usize>) {
    let mut any = false;
    for (i, c) in ones.enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{c}");
        any = true;
    }
    if !any {
        out.push('-');
    }
    out.push('\n');
}

/// Writes `code` to `path`, creating missing parent directories.
pub fn write_code(code: &TannerCode, path: &Path) -> Result<(), QtcError> {
    let io = |source| QtcError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, export_code(code)).map_err(io)
}

pub fn import_code(path: &Path) -> Result<Imported, QtcError> {
    let text = std::fs::read_to_string(path).map_err(|source| QtcError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_code(&text)
}

fn err(line: usize, msg: impl Into<String>) -> QtcError {
    QtcError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_indices(line: usize, text: &str) -> Result<Vec<usize>, QtcError> {
    if text.trim() == "-" {
        return Ok(Vec::new());
    }
    text.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| err(line, format!("`{t}` is not a non-negative integer")))
        })
        .collect()
}

/// Row index lists, checked for duplicates and range.
fn build_matrix(rows: &[(usize, Vec<usize>)], cols: usize) -> Result<BitMatrix, QtcError> {
    let mut m = BitMatrix::zeros(rows.len(), cols);
    for (r, (line, idx)) in rows.iter().enumerate() {
        for &c in idx {
            if c >= cols {
                return Err(err(*line, format!("column {c} out of range for n={cols}")));
            }
            if m.get(r, c) {
                return Err(err(*line, format!("column {c} repeated")));
            }
            m.set(r, c, true);
        }
    }
    Ok(m)
}

fn build_cover(
    groups: &[(usize, usize, Vec<usize>)],
    h: &BitMatrix,
) -> Result<ViewCover, QtcError> {
    let mut owner = vec![None; h.rows()];
    for (line, _, rows) in groups {
        for &r in rows {
            if r >= h.rows() {
                return Err(err(*line, format!("row {r} out of range ({} rows)", h.rows())));
            }
            if let Some(prev) = owner[r] {
                return Err(err(*line, format!("row {r} already assigned on line {prev}")));
            }
            owner[r] = Some(*line);
        }
    }
    if let Some(r) = owner.iter().position(Option::is_none) {
        let line = groups.last().map_or(0, |g| g.0);
        return Err(err(line, format!("row {r} is in no cover group")));
    }
    let list = groups.iter().map(|(_, v, rows)| (*v, rows.clone())).collect();
    Ok(ViewCover::from_rows(h, list)?)
}

#[derive(Default)]
struct Classical {
    line: usize,
    label: String,
    name: String,
    n: usize,
    rows: Vec<(usize, Vec<usize>)>,
}

pub fn parse_code(text: &str) -> Result<Imported, QtcError> {
    let mut section: Option<&str> = None;
    let mut seen: Vec<&str> = Vec::new();
    let mut meta = CodeMeta::default();
    let mut meta_lines: Vec<(usize, String)> = Vec::new();
    let mut hx_rows = Vec::new();
    let mut hz_rows = Vec::new();
    let mut cover_x = Vec::new();
    let mut cover_z = Vec::new();
    let mut classical: Vec<Classical> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(&name) = SECTIONS.iter().find(|&&s| s == line) {
            if seen.contains(&name) {
                return Err(err(line_no, format!("section {name} appears twice")));
            }
            seen.push(name);
            section = Some(name);
            continue;
        }
        match section {
            None => return Err(err(line_no, "content before the first section header")),
            Some("META") => {
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| err(line_no, "expected key=value"))?;
                let k = k.trim();
                if k.is_empty() {
                    return Err(err(line_no, "empty key"));
                }
                if meta.get(k).is_some() {
                    return Err(err(line_no, format!("duplicate key `{k}`")));
                }
                meta.set(k, v.trim());
                meta_lines.push((line_no, k.to_string()));
            }
            Some("HX") => hx_rows.push((line_no, parse_indices(line_no, line)?)),
            Some("HZ") => hz_rows.push((line_no, parse_indices(line_no, line)?)),
            Some(which @ ("COVER_X" | "COVER_Z")) => {
                let (v, rows) = line
                    .split_once(':')
                    .ok_or_else(|| err(line_no, "expected `vertex_id : rows`"))?;
                let v = v
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| err(line_no, format!("bad vertex id `{}`", v.trim())))?;
                let rows = parse_indices(line_no, rows)?;
                let target = if which == "COVER_X" { &mut cover_x } else { &mut cover_z };
                target.push((line_no, v, rows));
            }
            Some("CLASSICAL") => {
                if let Some(rest) = line.strip_prefix("CODE ") {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    let [label, name, n] = parts[..] else {
                        return Err(err(line_no, "expected `CODE <label> <name> <n>`"));
                    };
                    let n = n
                        .parse::<usize>()
                        .map_err(|_| err(line_no, format!("bad length `{n}`")))?;
                    classical.push(Classical {
                        line: line_no,
                        label: label.to_string(),
                        name: name.to_string(),
                        n,
                        rows: Vec::new(),
                    });
                } else {
                    let cur = classical
                        .last_mut()
                        .ok_or_else(|| err(line_no, "check row before any CODE line"))?;
                    cur.rows.push((line_no, parse_indices(line_no, line)?));
                }
            }
            Some(_) => unreachable!(),
        }
    }

    let n_line = meta_lines
        .iter()
        .find(|(_, k)| k == "n")
        .map(|(l, _)| *l)
        .ok_or_else(|| err(0, "META must define n"))?;
    let n: usize = meta
        .get("n")
        .unwrap()
        .parse()
        .map_err(|_| err(n_line, "n is not an integer"))?;
    for required in ["HX", "HZ"] {
        if !seen.contains(&required) {
            return Err(err(0, format!("missing section {required}")));
        }
    }
    let hx = build_matrix(&hx_rows, n)?;
    let hz = build_matrix(&hz_rows, n)?;

    let mut warnings = Vec::new();
    let mut cover = |groups: &[(usize, usize, Vec<usize>)], h: &BitMatrix, name: &str| {
        if seen.contains(&name) {
            build_cover(groups, h)
        } else {
            warnings.push(format!("{name} missing: using one group per row"));
            Ok(ViewCover::singletons(h))
        }
    };
    let cx = cover(&cover_x, &hx, "COVER_X")?;
    let cz = cover(&cover_z, &hz, "COVER_Z")?;

    let mut code = TannerCode::new(hx, hz, cx, cz, meta)?;
    for c in classical {
        let check = build_matrix(&c.rows, c.n)?;
        if code.classical.iter().any(|(l, _)| *l == c.label) {
            return Err(err(c.line, format!("classical label `{}` repeated", c.label)));
        }
        code.classical.push((c.label, LinearCode::from_check(c.name, check)));
    }
    Ok(Imported { code, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "META\nn=4\nname=toy\nHX\n0 1 2 3\nHZ\n0 1\n2 3\nCOVER_X\n0 : 0\nCOVER_Z\n0 : 0\n1 : 1\n";

    #[test]
    fn canonical_round_trip() {
        let imported = parse_code(SMALL).unwrap();
        assert!(imported.warnings.is_empty());
        assert_eq!(imported.code.k, 1);
        assert_eq!(export_code(&imported.code), SMALL);
    }

    #[test]
    fn missing_covers_fall_back_to_singletons() {
        let text = "META\nn=4\nHX\n0 1 2 3\nHZ\n0 1\n2 3\n";
        let imported = parse_code(text).unwrap();
        assert_eq!(imported.warnings.len(), 2);
        assert_eq!(imported.code.cover_z.len(), 2);
    }

    fn line_of(text: &str) -> usize {
        match parse_code(text) {
            Err(QtcError::Parse { line, .. }) => line,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(line_of("META\nn=4\nHX\n0 1 9\nHZ\n"), 4);
        assert_eq!(line_of("META\nn=4\nHX\n0 0\nHZ\n"), 4);
        assert_eq!(line_of("META\nn=4\nHX\n0 x\nHZ\n"), 4);
        assert_eq!(line_of("0 1\n"), 1);
        assert_eq!(line_of("META\nn=4\nn=5\n"), 3);
        assert_eq!(
            line_of("META\nn=4\nHX\n0 1 2 3\nHZ\n0 1\n2 3\nCOVER_Z\n0 : 0 1\n1 : 1\n"),
            10
        );
    }

    #[test]
    fn non_css_input_is_rejected() {
        let text = "META\nn=2\nHX\n0\nHZ\n0 1\n";
        assert!(matches!(parse_code(text), Err(QtcError::Invalid(_))));
    }

    #[test]
    fn classical_section() {
        let text = "META\nn=4\nHX\n0 1 2 3\nHZ\n0 1\n2 3\nCLASSICAL\nCODE ca rep3 3\n0 1\n1 2\n";
        let imported = parse_code(text).unwrap();
        let (label, c) = &imported.code.classical[0];
        assert_eq!((label.as_str(), c.n, c.k), ("ca", 3, 1));
    }
}
