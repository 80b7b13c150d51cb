//! MatrixMarket coordinate files holding real symmetric matrices.

use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};
use crate::operator::CsrMatrix;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Reads a `coordinate real symmetric` (or `integer symmetric`) matrix.
///
/// Entries from either triangle are mirrored; the full matrix is stored.
pub fn parse_matrix_market(r: impl Read) -> Result<CsrMatrix<f64>> {
    let mut lines = BufReader::new(r)
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l));
    let (_, banner) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let banner = banner?;
    let words: Vec<String> = banner
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(parse_err(1, "missing %%MatrixMarket matrix banner"));
    }
    if words[2] != "coordinate" {
        return Err(parse_err(1, format!("unsupported format '{}'", words[2])));
    }
    if words[3] != "real" && words[3] != "integer" {
        return Err(parse_err(1, format!("unsupported field '{}'", words[3])));
    }
    if words[4] != "symmetric" {
        return Err(parse_err(
            1,
            format!("expected a symmetric matrix, found '{}'", words[4]),
        ));
    }

    let mut size: Option<(usize, usize)> = None;
    let mut triplets = Vec::new();
    let mut n = 0;
    for (no, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                let nums: Vec<usize> = fields
                    .iter()
                    .map(|f| f.parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| parse_err(no, "malformed size line"))?;
                if nums.len() != 3 {
                    return Err(parse_err(no, "size line needs rows, cols and entries"));
                }
                if nums[0] != nums[1] {
                    return Err(parse_err(
                        no,
                        format!("matrix is {}x{}, not square", nums[0], nums[1]),
                    ));
                }
                n = nums[0];
                size = Some((n, nums[2]));
                triplets.reserve(2 * nums[2]);
            }
            Some(_) => {
                if fields.len() != 3 {
                    return Err(parse_err(no, "entry needs row, column and value"));
                }
                let idx = |f: &str| -> Result<usize> {
                    let i: usize = f
                        .parse()
                        .map_err(|_| parse_err(no, format!("bad index '{f}'")))?;
                    if i == 0 || i > n {
                        return Err(parse_err(no, format!("index {i} outside 1..={n}")));
                    }
                    Ok(i - 1)
                };
                let (i, j) = (idx(fields[0])?, idx(fields[1])?);
                let v: f64 = fields[2]
                    .parse()
                    .map_err(|_| parse_err(no, format!("bad value '{}'", fields[2])))?;
                triplets.push((i, j, v));
                if i != j {
                    triplets.push((j, i, v));
                }
            }
        }
    }
    let (n, nnz) = size.ok_or_else(|| parse_err(0, "missing size line"))?;
    let stored = triplets.iter().filter(|t| t.0 >= t.1).count();
    if stored != nnz {
        return Err(parse_err(
            0,
            format!("header declares {nnz} entries, found {stored}"),
        ));
    }
    CsrMatrix::from_triplets(n, &triplets)
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix<f64>> {
    parse_matrix_market(std::fs::File::open(path)?)
}
