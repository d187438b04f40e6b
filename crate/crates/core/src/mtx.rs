//! Matrix Market coordinate-format ingestion for explicit symmetric matrices.
//!
//! Accepted headers: `%%MatrixMarket matrix coordinate {real|integer|pattern}
//! {general|symmetric}`. Symmetric storage lists one triangle and is mirrored
//! on read; general storage must describe a symmetric matrix.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::oracle::{Csr, LinearOracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

#[derive(Debug, Clone)]
pub struct MatrixMarket {
    pub n: usize,
    pub matrix: Csr,
    /// Entries as listed in the file (before mirroring).
    pub stored_entries: usize,
}

fn mm_err(line: usize, msg: impl Into<String>) -> Error {
    Error::MatrixMarket {
        line,
        msg: msg.into(),
    }
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<MatrixMarket> {
    let text = fs::read_to_string(path)?;
    parse_matrix_market(&text)
}

pub fn parse_matrix_market(text: &str) -> Result<MatrixMarket> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| mm_err(1, "empty input"))?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(mm_err(
            1,
            "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'",
        ));
    }
    if tokens[2] != "coordinate" {
        return Err(mm_err(1, format!("unsupported format '{}'", tokens[2])));
    }
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(mm_err(1, format!("unsupported field '{other}'"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(mm_err(1, format!("unsupported symmetry '{other}'"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    let mut stored = 0usize;
    for (idx, raw) in lines {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let Some((rows, cols, nnz)) = size else {
            if parts.len() != 3 {
                return Err(mm_err(lineno, "size line needs 'rows cols nnz'"));
            }
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| mm_err(lineno, e.to_string()))
            };
            let (r, c, z) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
            if r != c {
                return Err(mm_err(lineno, format!("matrix is {r}x{c}, not square")));
            }
            size = Some((r, c, z));
            triplets.reserve(2 * z);
            continue;
        };
        let want = if field == Field::Pattern { 2 } else { 3 };
        if parts.len() != want {
            return Err(mm_err(
                lineno,
                format!("expected {want} fields, found {}", parts.len()),
            ));
        }
        let i: usize = parts[0]
            .parse()
            .map_err(|_| mm_err(lineno, "bad row index"))?;
        let j: usize = parts[1]
            .parse()
            .map_err(|_| mm_err(lineno, "bad column index"))?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(mm_err(lineno, format!("index ({i}, {j}) out of range")));
        }
        let v = match field {
            Field::Pattern => 1.0,
            Field::Integer => parts[2]
                .parse::<i64>()
                .map_err(|_| mm_err(lineno, "bad integer"))? as f64,
            Field::Real => parts[2]
                .parse::<f64>()
                .map_err(|_| mm_err(lineno, "bad value"))?,
        };
        stored += 1;
        if stored > nnz {
            return Err(mm_err(
                lineno,
                format!("more than the declared {nnz} entries"),
            ));
        }
        let (i, j) = (i - 1, j - 1);
        triplets.push((i, j, v));
        if symmetry == Symmetry::Symmetric && i != j {
            triplets.push((j, i, v));
        }
    }
    let (n, _, nnz) = size.ok_or_else(|| mm_err(1, "missing size line"))?;
    if stored != nnz {
        return Err(mm_err(0, format!("declared {nnz} entries, found {stored}")));
    }
    let matrix = Csr::from_triplets(n, &triplets)?;
    if symmetry == Symmetry::General {
        let defect = matrix.asymmetry();
        if defect > 0.0 {
            return Err(Error::SymmetryViolation { defect, bound: 0.0 });
        }
    }
    Ok(MatrixMarket {
        n,
        matrix,
        stored_entries: stored,
    })
}

impl MatrixMarket {
    pub fn into_oracle(self) -> LinearOracle {
        LinearOracle::new(self.matrix)
    }
}

/// Writes the lower triangle of a symmetric dense matrix in symmetric coordinate form.
pub fn write_symmetric(matrix: &nalgebra::DMatrix<f64>) -> String {
    let n = matrix.nrows();
    let mut entries = Vec::new();
    for j in 0..n {
        for i in j..n {
            let v = matrix[(i, j)];
            if v != 0.0 {
                entries.push(format!("{} {} {:.17e}", i + 1, j + 1, v));
            }
        }
    }
    let mut out = String::from("%%MatrixMarket matrix coordinate real symmetric\n");
    out.push_str(&format!("{n} {n} {}\n", entries.len()));
    for e in entries {
        out.push_str(&e);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CostLedger;

    const LAPLACE3: &str = "%%MatrixMarket matrix coordinate real symmetric\n\
% 1-D Laplacian\n\
3 3 5\n\
1 1 2.0\n\
2 1 -1.0\n\
2 2 2.0\n\
3 2 -1.0\n\
3 3 2.0\n";

    #[test]
    fn reads_symmetric_storage() {
        let mm = parse_matrix_market(LAPLACE3).unwrap();
        assert_eq!(mm.n, 3);
        assert_eq!(mm.stored_entries, 5);
        assert_eq!(mm.matrix.nnz(), 7);
        let oracle = mm.into_oracle();
        let y = oracle.apply(&[1.0, 1.0, 1.0], &mut CostLedger::new());
        assert_eq!(y, vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn round_trips_through_writer() {
        let mm = parse_matrix_market(LAPLACE3).unwrap();
        let dense = mm.matrix.to_dense();
        let again = parse_matrix_market(&write_symmetric(&dense)).unwrap();
        assert_eq!(again.matrix.to_dense(), dense);
    }

    #[test]
    fn pattern_and_integer_fields() {
        let text = "%%MatrixMarket matrix coordinate pattern symmetric\n2 2 2\n1 1\n2 1\n";
        let mm = parse_matrix_market(text).unwrap();
        assert_eq!(mm.matrix.to_dense()[(0, 1)], 1.0);
        let text = "%%MatrixMarket matrix coordinate integer general\n2 2 2\n1 1 3\n2 2 -4\n";
        let mm = parse_matrix_market(text).unwrap();
        assert_eq!(mm.matrix.to_dense()[(1, 1)], -4.0);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_matrix_market("").is_err());
        assert!(parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n").is_err());
        let nonsquare = "%%MatrixMarket matrix coordinate real general\n2 3 1\n1 1 1.0\n";
        assert!(parse_matrix_market(nonsquare).is_err());
        let short = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n";
        assert!(parse_matrix_market(short).is_err());
        let oob = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n";
        assert!(parse_matrix_market(oob).is_err());
        let skew = "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 1.0\n";
        assert!(matches!(
            parse_matrix_market(skew),
            Err(Error::SymmetryViolation { .. })
        ));
    }
}
