//! Sparse SDPA text format.
//!
//! The SDPA primal constraint is `Σ_i x_i F_i − F_0 ⪰ 0`, so `F_0 = −G0` and
//! `F_i = G_i` with `i = 7(φ(e) − 1) + m`, where `φ(e)` is the 1-based
//! position of edge `e` in encoding order. The objective vector is zero.
//! Party count and edge list are stored in `*` comment lines so that the
//! reader can rebuild the full constraint set.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sdp::blocks::SparseBlockMatrix;
use crate::sdp::problem::{GMatrixSet, VARS_PER_EDGE};

pub fn to_sdpa_string(gset: &GMatrixSet<f64>) -> String {
    let mut out = String::new();
    let sizes = gset.block_sizes();
    let m = gset.n_variables();
    let _ = writeln!(out, "\"separable random distillation feasibility problem");
    let _ = writeln!(out, "* parties {}", gset.n_parties());
    for d in gset.edges() {
        let _ = writeln!(out, "* edge {} {}", d.edge.0 + 1, d.edge.1 + 1);
    }
    let _ = writeln!(out, "{m}");
    let _ = writeln!(out, "{}", sizes.len());
    let _ = writeln!(out, "{}", sizes.iter().map(usize::to_string).collect::<Vec<_>>().join(" "));
    let _ = writeln!(out, "{}", vec!["0"; m].join(" "));
    let mut write_matrix = |matno: usize, mat: &SparseBlockMatrix<f64>, sign: f64| {
        for ((b, i, j), v) in mat.entries() {
            let _ = writeln!(out, "{} {} {} {} {}", matno, b + 1, i + 1, j + 1, sign * v);
        }
    };
    write_matrix(0, gset.g0(), -1.0);
    for (idx, g) in gset.constraint_matrices().enumerate() {
        write_matrix(idx + 1, g, 1.0);
    }
    out
}

pub fn export_sdpa(gset: &GMatrixSet<f64>, destination: &Path) -> Result<()> {
    let mut f = std::fs::File::create(destination)?;
    f.write_all(to_sdpa_string(gset).as_bytes())?;
    Ok(())
}

/// Contents of an SDPA file.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpaData {
    pub n_parties: Option<usize>,
    pub edges: Vec<(usize, usize)>,
    pub block_sizes: Vec<usize>,
    pub objective: Vec<f64>,
    /// `F_0, F_1, …, F_m`.
    pub matrices: Vec<SparseBlockMatrix<f64>>,
}

fn numbers<T: std::str::FromStr>(line: &str) -> Result<Vec<T>> {
    line.split(|c: char| c.is_whitespace() || ",{}()".contains(c))
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Sdpa(format!("bad number {t:?} in line {line:?}"))))
        .collect()
}

pub fn parse_sdpa(text: &str) -> Result<SdpaData> {
    let mut n_parties = None;
    let mut edges = Vec::new();
    let mut lines = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('*') {
            let words: Vec<&str> = rest.split_whitespace().collect();
            match words.as_slice() {
                ["parties", n] => n_parties = Some(numbers::<usize>(n)?[0]),
                ["edge", i, j] => {
                    let (i, j): (usize, usize) = (numbers(i)?[0], numbers(j)?[0]);
                    if i == 0 || j == 0 {
                        return Err(Error::Sdpa("edge labels are 1-based".into()));
                    }
                    edges.push((i - 1, j - 1));
                }
                _ => {}
            }
            continue;
        }
        if line.starts_with('"') || line.is_empty() && lines.len() != 3 {
            continue;
        }
        lines.push(line);
    }
    let mut it = lines.into_iter();
    let mut next = |what: &str| it.next().ok_or_else(|| Error::Sdpa(format!("missing {what}")));
    let m = *numbers::<usize>(next("variable count")?)?
        .first()
        .ok_or_else(|| Error::Sdpa("empty variable count".into()))?;
    let n_blocks = *numbers::<usize>(next("block count")?)?
        .first()
        .ok_or_else(|| Error::Sdpa("empty block count".into()))?;
    let block_sizes: Vec<usize> = numbers::<i64>(next("block structure")?)?
        .into_iter()
        .map(|b| b.unsigned_abs() as usize)
        .collect();
    if block_sizes.len() != n_blocks {
        return Err(Error::Sdpa(format!("expected {n_blocks} block sizes, got {}", block_sizes.len())));
    }
    let objective: Vec<f64> = numbers(next("objective")?)?;
    if objective.len() != m {
        return Err(Error::Sdpa(format!("expected {m} objective entries, got {}", objective.len())));
    }
    let mut matrices = vec![SparseBlockMatrix::zeros(block_sizes.clone()); m + 1];
    for line in it {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 5 {
            return Err(Error::Sdpa(format!("entry line needs 5 fields: {line:?}")));
        }
        let idx: Vec<usize> = parts[..4]
            .iter()
            .map(|t| t.parse().map_err(|_| Error::Sdpa(format!("bad index in {line:?}"))))
            .collect::<Result<_>>()?;
        let value: f64 = parts[4].parse().map_err(|_| Error::Sdpa(format!("bad value in {line:?}")))?;
        let (matno, blk, i, j) = (idx[0], idx[1], idx[2], idx[3]);
        if matno > m || blk == 0 || blk > n_blocks || i == 0 || j == 0 || i.max(j) > block_sizes[blk - 1] {
            return Err(Error::Sdpa(format!("entry out of range: {line:?}")));
        }
        matrices[matno].set(blk - 1, i - 1, j - 1, value);
    }
    Ok(SdpaData { n_parties, edges, block_sizes, objective, matrices })
}

pub fn read_sdpa(path: &Path) -> Result<SdpaData> {
    parse_sdpa(&std::fs::read_to_string(path)?)
}

impl SdpaData {
    /// Rebuilds the constraint set (requires the party/edge comment lines).
    pub fn to_gmatrix_set(&self) -> Result<GMatrixSet<f64>> {
        let n = self.n_parties.ok_or_else(|| Error::Sdpa("missing '* parties' line".into()))?;
        let ne = self.edges.len();
        if self.matrices.len() != VARS_PER_EDGE * ne + 1 {
            return Err(Error::Sdpa(format!("{} edges need {} matrices", ne, VARS_PER_EDGE * ne)));
        }
        let mut g0 = SparseBlockMatrix::zeros(self.block_sizes.clone());
        g0.add_scaled(&self.matrices[0], &-1.0);
        let g = self.matrices[1..].chunks(VARS_PER_EDGE).map(|c| c.to_vec()).collect();
        Ok(GMatrixSet::from_raw(n, self.edges.clone(), g0, g))
    }
}
