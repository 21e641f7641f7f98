//! On-disk code bundles: `hx.mtx`, `hz.mtx` (MatrixMarket coordinate
//! pattern, 1-based) and a `manifest` of `key=value` lines.

use super::{CssCode, SurfaceLattice, ValidationError};
use crate::gf2::SparseBitMatrix;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

const HEADER: &str = "%%MatrixMarket matrix coordinate pattern general";

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> BundleError {
    BundleError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, BundleError> {
    fs::read_to_string(path).map_err(|source| BundleError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), BundleError> {
    fs::write(path, contents).map_err(|source| BundleError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_matrix_market(m: &SparseBitMatrix) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "{} {} {}", m.num_rows(), m.num_cols(), m.nnz()).unwrap();
    for (r, row) in m.rows().iter().enumerate() {
        for &c in row {
            writeln!(out, "{} {}", r + 1, c + 1).unwrap();
        }
    }
    out
}

/// Parses a coordinate-pattern MatrixMarket file. `path` is only used in
/// error messages.
pub fn read_matrix_market(text: &str, path: &Path) -> Result<SparseBitMatrix, BundleError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, h))
            if h.to_ascii_lowercase()
                .starts_with("%%matrixmarket matrix coordinate pattern") => {}
        Some((line, _)) => {
            return Err(parse_err(
                path,
                line,
                "expected coordinate pattern MatrixMarket header",
            ))
        }
        None => return Err(parse_err(path, 1, "empty file")),
    }
    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (size_line, size) = body
        .next()
        .ok_or_else(|| parse_err(path, 2, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| parse_err(path, size_line, "size line must be three integers"))?;
    let [num_rows, num_cols, nnz] = dims[..] else {
        return Err(parse_err(
            path,
            size_line,
            "size line must be three integers",
        ));
    };
    let mut rows = vec![Vec::new(); num_rows];
    let mut seen = 0;
    for (line, entry) in body {
        let mut it = entry.split_whitespace().map(str::parse::<usize>);
        let (Some(Ok(r)), Some(Ok(c)), None) = (it.next(), it.next(), it.next()) else {
            return Err(parse_err(path, line, "entry must be two 1-based indices"));
        };
        if r == 0 || r > num_rows || c == 0 || c > num_cols {
            return Err(parse_err(
                path,
                line,
                format!("entry ({r}, {c}) outside {num_rows}x{num_cols}"),
            ));
        }
        rows[r - 1].push(c - 1);
        seen += 1;
    }
    if seen != nnz {
        return Err(parse_err(
            path,
            size_line,
            format!("declared {nnz} entries, found {seen}"),
        ));
    }
    SparseBitMatrix::from_rows(num_cols, rows)
        .map_err(|e| parse_err(path, size_line, e.to_string()))
}

/// Writes `hx.mtx`, `hz.mtx` and `manifest` into `dir`, creating it if needed.
pub fn save(code: &CssCode, dir: &Path) -> Result<(), BundleError> {
    fs::create_dir_all(dir).map_err(|source| BundleError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    write(&dir.join("hx.mtx"), &write_matrix_market(code.hx()))?;
    write(&dir.join("hz.mtx"), &write_matrix_market(code.hz()))?;
    let mut manifest = format!("name={}\nn={}\nk={}\n", code.name(), code.n(), code.k());
    if let Some(lat) = code.lattice() {
        writeln!(manifest, "lattice=planar:{}", lat.distance).unwrap();
    }
    write(&dir.join("manifest"), &manifest)
}

/// Reads and validates a bundle written by [`save`].
pub fn load(dir: &Path) -> Result<CssCode, BundleError> {
    let manifest_path = dir.join("manifest");
    let text = read(&manifest_path)?;
    let (mut name, mut n, mut k, mut lattice) = (None, None, None, None);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(&manifest_path, i + 1, "expected key=value"))?;
        let number = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| parse_err(&manifest_path, i + 1, format!("{key} must be a count")))
        };
        match key.trim() {
            "name" => name = Some(value.trim().to_string()),
            "n" => n = Some((number(value)?, i + 1)),
            "k" => k = Some(number(value)?),
            "lattice" => {
                let d = value.trim().strip_prefix("planar:").ok_or_else(|| {
                    parse_err(&manifest_path, i + 1, "lattice must be planar:<d>")
                })?;
                lattice = Some((number(d)?, i + 1));
            }
            other => {
                return Err(parse_err(
                    &manifest_path,
                    i + 1,
                    format!("unknown key {other:?}"),
                ))
            }
        }
    }
    let name = name.ok_or_else(|| parse_err(&manifest_path, 0, "missing name"))?;
    let (n, n_line) = n.ok_or_else(|| parse_err(&manifest_path, 0, "missing n"))?;
    let k = k.ok_or_else(|| parse_err(&manifest_path, 0, "missing k"))?;

    let hx_path = dir.join("hx.mtx");
    let hz_path = dir.join("hz.mtx");
    let hx = read_matrix_market(&read(&hx_path)?, &hx_path)?;
    let hz = read_matrix_market(&read(&hz_path)?, &hz_path)?;
    for (m, p) in [(&hx, &hx_path), (&hz, &hz_path)] {
        if m.num_cols() != n {
            return Err(parse_err(
                &manifest_path,
                n_line,
                format!("n={n} but {} has {} columns", p.display(), m.num_cols()),
            ));
        }
    }
    let code = CssCode::from_parts(name, hx, hz, k);
    code.validate()?;
    match lattice {
        None => Ok(code),
        Some((d, line)) => {
            let lat = (d >= 2).then(|| SurfaceLattice::new(d));
            match lat {
                Some(lat)
                    if lat.face_checks() == *code.hx() && lat.vertex_checks() == *code.hz() =>
                {
                    Ok(code.with_lattice(lat))
                }
                _ => Err(parse_err(
                    &manifest_path,
                    line,
                    format!("matrices do not match the planar lattice of distance {d}"),
                )),
            }
        }
    }
}
