//! Coupling matrices and their structural analysis.
//!
//! A [`CouplingMatrix`] `A` is an `m x m` matrix with nonnegative off-diagonal
//! weights and zero row sums. Edge convention: `a_ij > 0` is a directed edge
//! `j -> i`, i.e. node `j` influences node `i`. The diagonal is never taken
//! from input; it is always recomputed as the negated off-diagonal row sum.
//!
//! Node indices are 0-based throughout the crate.

mod generate;
mod structure;

use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generate::{generate, GeneratorConfig, NetworkKind};
pub use structure::{analyze_structure, augment_master_slave, NetworkStructure};

/// Zero-row-sum coupling matrix with off-diagonals stored row-wise (CSR).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    m: usize,
    diag: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CouplingMatrix {
    /// Builds `A` from a weighted adjacency matrix `w` (row `i` lists the
    /// influence of every node on node `i`). The diagonal of `w` is ignored.
    pub fn from_weighted_adjacency(w: &[Vec<f64>]) -> Result<Self> {
        let m = w.len();
        for (row, r) in w.iter().enumerate() {
            if r.len() != m {
                return Err(Error::NonSquare { rows: m, row, cols: r.len() });
            }
        }
        let triplets = w
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().filter(move |&(j, _)| j != i).map(move |(j, &v)| (i, j, v)));
        Self::from_triplets(m, triplets)
    }

    /// Same as [`from_weighted_adjacency`](Self::from_weighted_adjacency) for a
    /// dense nalgebra matrix.
    pub fn from_dense(w: &DMatrix<f64>) -> Result<Self> {
        if w.nrows() != w.ncols() {
            return Err(Error::NonSquare { rows: w.nrows(), row: 0, cols: w.ncols() });
        }
        let m = w.nrows();
        let triplets = (0..m).flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j, w[(i, j)])));
        Self::from_triplets(m, triplets)
    }

    /// Builds `A` from off-diagonal `(row, col, weight)` entries. Duplicate
    /// entries are summed; zero weights are dropped; diagonal entries are rejected.
    pub fn from_triplets<I>(m: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if m == 0 {
            return Err(crate::error::invalid("m", "a coupling matrix needs at least one node"));
        }
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        for (i, j, v) in entries {
            if i >= m {
                return Err(Error::IndexOutOfRange { index: i, len: m });
            }
            if j >= m {
                return Err(Error::IndexOutOfRange { index: j, len: m });
            }
            if i == j {
                return Err(crate::error::invalid(
                    "entry",
                    format!("diagonal entry ({i}, {i}) is reconstructed, not supplied"),
                ));
            }
            if !v.is_finite() {
                return Err(Error::NonFiniteWeight { row: i, col: j });
            }
            if v < 0.0 {
                return Err(Error::NegativeWeight { row: i, col: j, value: v });
            }
            if v > 0.0 {
                rows[i].push((j, v));
            }
        }

        let mut row_ptr = Vec::with_capacity(m + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut diag = Vec::with_capacity(m);
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            let mut sum = 0.0;
            let mut last: Option<usize> = None;
            for (j, v) in row {
                if last == Some(j) {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(j);
                    vals.push(v);
                    last = Some(j);
                }
                sum += v;
            }
            diag.push(-sum);
            row_ptr.push(cols.len());
        }
        Ok(Self { m, diag, row_ptr, cols, vals })
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        self.m
    }

    pub fn diagonal(&self, i: usize) -> f64 {
        self.diag[i]
    }

    /// Nonzero off-diagonal entries `(j, a_ij)` of row `i`, ascending in `j`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    /// All nonzero off-diagonal entries `(i, j, a_ij)` in row-major order.
    pub fn off_diagonal(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.m).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn nnz_off_diagonal(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[span.clone()].binary_search(&j) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.m, self.m);
        for i in 0..self.m {
            d[(i, i)] = self.diag[i];
        }
        for (i, j, v) in self.off_diagonal() {
            d[(i, j)] = v;
        }
        d
    }

    /// Off-diagonal column sums `sum_{j != i} a_ji`: the total outgoing
    /// influence of each node.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.m];
        for (_, j, v) in self.off_diagonal() {
            sums[j] += v;
        }
        sums
    }

    pub fn max_abs_row_sum_residual(&self) -> f64 {
        (0..self.m).map(|i| (self.diag[i] + self.row(i).map(|(_, v)| v).sum::<f64>()).abs()).fold(0.0, f64::max)
    }

    /// Max absolute row sum, `||A||_inf`.
    pub fn inf_norm(&self) -> f64 {
        (0..self.m).map(|i| 2.0 * self.diag[i].abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diagonal(&self) -> f64 {
        self.diag.iter().fold(0.0, |acc, d| acc.max(d.abs()))
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        self.asymmetry() <= rel_tol * self.inf_norm().max(f64::MIN_POSITIVE)
    }

    /// `max_ij |a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        self.off_diagonal().map(|(i, j, v)| (v - self.get(j, i)).abs()).fold(0.0, f64::max)
    }

    /// Relabels nodes so that new node `k` is old node `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, got: perm.len() });
        }
        let mut inverse = vec![usize::MAX; self.m];
        for (new, &old) in perm.iter().enumerate() {
            if old >= self.m || inverse[old] != usize::MAX {
                return Err(crate::error::invalid("perm", "not a permutation"));
            }
            inverse[old] = new;
        }
        Self::from_triplets(self.m, self.off_diagonal().map(|(i, j, v)| (inverse[i], inverse[j], v)))
    }

    /// `y = A x` for a scalar field over nodes.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.m).map(|i| self.diag[i] * x[i] + self.row(i).map(|(j, v)| v * x[j]).sum::<f64>()).collect()
    }

    /// `y = A^T x`.
    pub fn mul_transpose_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, xi)| d * xi).collect();
        for (i, j, v) in self.off_diagonal() {
            y[j] += v * x[i];
        }
        y
    }

    /// Writes the sparse triplet format: a `m nnz` header, then one
    /// `i j weight` line per nonzero off-diagonal entry (0-based).
    pub fn write_triplets<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.m, self.nnz_off_diagonal())?;
        for (i, j, v) in self.off_diagonal() {
            writeln!(out, "{i} {j} {v:e}")?;
        }
        Ok(())
    }

    /// Reads the triplet format written by [`write_triplets`](Self::write_triplets).
    /// Blank lines and lines starting with `#` are skipped.
    pub fn read_triplets<R: BufRead>(input: R) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut entries = Vec::new();
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            let parse_err = |message: String| Error::Parse { line: lineno, message };
            match header {
                None => {
                    if fields.len() != 2 {
                        return Err(parse_err(format!("expected header `m nnz`, found {trimmed:?}")));
                    }
                    let m = fields[0].parse().map_err(|e| parse_err(format!("bad m: {e}")))?;
                    let nnz = fields[1].parse().map_err(|e| parse_err(format!("bad nnz: {e}")))?;
                    header = Some((m, nnz));
                }
                Some((m, _)) => {
                    if fields.len() != 3 {
                        return Err(parse_err(format!("expected `i j weight`, found {trimmed:?}")));
                    }
                    let i: usize = fields[0].parse().map_err(|e| parse_err(format!("bad row index: {e}")))?;
                    let j: usize = fields[1].parse().map_err(|e| parse_err(format!("bad column index: {e}")))?;
                    let v: f64 = fields[2].parse().map_err(|e| parse_err(format!("bad weight: {e}")))?;
                    if i >= m || j >= m {
                        return Err(parse_err(format!("index ({i}, {j}) out of range for m = {m}")));
                    }
                    if i == j {
                        return Err(parse_err(format!("diagonal entry ({i}, {j}) not allowed")));
                    }
                    entries.push((i, j, v));
                }
            }
        }
        let (m, nnz) = header.ok_or(Error::Parse { line: 0, message: "empty matrix file".into() })?;
        if entries.len() != nnz {
            return Err(Error::Parse {
                line: 0,
                message: format!("header declares {nnz} entries, found {}", entries.len()),
            });
        }
        Self::from_triplets(m, entries)
    }
}
