//! Matrix Market coordinate files (`real symmetric`, 1-based, lower
//! triangle stored).

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::Pencil;
use crate::error::{FracError, Result};
use crate::linalg::SparseSymMatrix;

const HEADER: &str = "%%MatrixMarket matrix coordinate real symmetric";

/// Reads a symmetric coordinate matrix. Off-diagonal entries are mirrored,
/// whichever triangle they were written in.
pub fn read_matrix_market(path: &Path) -> Result<SparseSymMatrix> {
    let text = fs::read_to_string(path).map_err(|source| FracError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let err = |line: usize, message: String| FracError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(err(1, "missing %%MatrixMarket banner".into()));
    }
    match tokens.get(1..5) {
        Some([obj, fmt, field, sym]) => {
            if obj != "matrix" || fmt != "coordinate" {
                return Err(err(1, format!("unsupported layout '{obj} {fmt}'")));
            }
            if field != "real" && field != "integer" {
                return Err(err(1, format!("unsupported field '{field}', expected real")));
            }
            if sym != "symmetric" {
                return Err(err(1, format!("matrix must be declared symmetric, found '{sym}'")));
            }
        }
        _ => return Err(err(1, "incomplete header".into())),
    }

    let mut size: Option<(usize, usize)> = None;
    let mut triplets = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                let parsed: Vec<usize> = fields
                    .iter()
                    .map(|f| f.parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| err(lineno, format!("bad size line: {e}")))?;
                let [rows, cols, nnz] = parsed[..] else {
                    return Err(err(lineno, "size line needs rows, cols, nnz".into()));
                };
                if rows != cols {
                    return Err(err(lineno, format!("matrix is {rows}x{cols}, not square")));
                }
                size = Some((rows, nnz));
                triplets.reserve(nnz);
            }
            Some((n, _)) => {
                if fields.len() != 3 {
                    return Err(err(lineno, "entry needs row, col, value".into()));
                }
                let i: usize = fields[0]
                    .parse()
                    .map_err(|e| err(lineno, format!("bad row index: {e}")))?;
                let j: usize = fields[1]
                    .parse()
                    .map_err(|e| err(lineno, format!("bad column index: {e}")))?;
                let v: f64 = fields[2]
                    .parse()
                    .map_err(|e| err(lineno, format!("bad value: {e}")))?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(err(lineno, format!("index ({i}, {j}) out of range 1..={n}")));
                }
                triplets.push((i - 1, j - 1, v));
            }
        }
    }
    let (n, nnz) = size.ok_or_else(|| err(1, "missing size line".into()))?;
    if triplets.len() != nnz {
        return Err(err(
            text.lines().count(),
            format!("expected {nnz} entries, found {}", triplets.len()),
        ));
    }
    SparseSymMatrix::from_lower_triplets(n, triplets)
}

/// Writes the lower triangle with 17 significant digits.
pub fn write_matrix_market(path: &Path, q: &SparseSymMatrix) -> Result<()> {
    let io = |source| FracError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io)?;
    let mut w = BufWriter::new(file);
    let lower: Vec<_> = q.lower_triplets().collect();
    writeln!(w, "{HEADER}").map_err(io)?;
    writeln!(w, "{} {} {}", q.n(), q.n(), lower.len()).map_err(io)?;
    for (i, j, v) in lower {
        writeln!(w, "{} {} {:.16e}", i + 1, j + 1, v).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Mass and stiffness matrices from two files of equal dimension.
pub fn load_matrix_market(path_m: &Path, path_a: &Path) -> Result<Pencil> {
    let m = read_matrix_market(path_m)?;
    let a = read_matrix_market(path_a)?;
    Pencil::new(m, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::laplace_1d_fem;

    fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn identity_files() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!("{HEADER}\n% comment\n2 2 2\n1 1 1.0\n2 2 1.0\n");
        let pm = write(dir.path(), "m.mtx", &body);
        let pa = write(dir.path(), "a.mtx", &body);
        let pencil = load_matrix_market(&pm, &pa).unwrap();
        assert!(pencil.mass().is_identity());
        assert!(pencil.stiffness().is_identity());
    }

    #[test]
    fn lower_triangle_expanded() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!("{HEADER}\n3 3 4\n1 1 2\n2 1 -1\n2 2 2\n3 3 2\n");
        let q = read_matrix_market(&write(dir.path(), "q.mtx", &body)).unwrap();
        assert_eq!(q.get(0, 1), -1.0);
        assert_eq!(q.get(1, 0), -1.0);
        assert_eq!(q.nnz(), 5);
    }

    #[test]
    fn roundtrip_fem_pencil() {
        let dir = tempfile::tempdir().unwrap();
        let p = laplace_1d_fem(8).unwrap();
        let pm = dir.path().join("m.mtx");
        let pa = dir.path().join("a.mtx");
        write_matrix_market(&pm, p.mass()).unwrap();
        write_matrix_market(&pa, p.stiffness()).unwrap();
        let back = load_matrix_market(&pm, &pa).unwrap();
        assert_eq!(back.mass(), p.mass());
        assert_eq!(back.stiffness(), p.stiffness());
        assert!(back.exact_eigenvalues().is_none());
    }

    #[test]
    fn descriptive_errors() {
        let dir = tempfile::tempdir().unwrap();
        let general = "%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 1\n";
        let e = read_matrix_market(&write(dir.path(), "g.mtx", general)).unwrap_err();
        assert!(e.to_string().contains("symmetric"), "{e}");

        let short = format!("{HEADER}\n2 2 3\n1 1 1\n2 2 1\n");
        let e = read_matrix_market(&write(dir.path(), "s.mtx", &short)).unwrap_err();
        assert!(e.to_string().contains("expected 3 entries"), "{e}");

        let bad = format!("{HEADER}\n2 2 1\n1 x 1\n");
        let e = read_matrix_market(&write(dir.path(), "b.mtx", &bad)).unwrap_err();
        assert!(matches!(e, FracError::Parse { line: 3, .. }), "{e}");

        let rect = format!("{HEADER}\n2 3 0\n");
        assert!(read_matrix_market(&write(dir.path(), "r.mtx", &rect)).is_err());

        let m1 = write(dir.path(), "m1.mtx", &format!("{HEADER}\n1 1 1\n1 1 1\n"));
        let m2 = write(dir.path(), "m2.mtx", &format!("{HEADER}\n2 2 2\n1 1 1\n2 2 1\n"));
        assert!(matches!(
            load_matrix_market(&m1, &m2),
            Err(FracError::Dimension { .. })
        ));

        assert!(matches!(
            read_matrix_market(&dir.path().join("missing.mtx")),
            Err(FracError::Io { .. })
        ));
    }
}
