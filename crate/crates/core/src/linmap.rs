//! Dense real linear maps and the handful of operations the sheaf maps need.
//!
//! Vectors are plain `[f64]` slices. Maps are stored row-major. Spaces of
//! dimension zero are first class: a map into or out of `R^0` is the unique
//! empty map of the right shape.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinMapError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("expected {expected} entries for a {rows}x{cols} map, found {found}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        found: usize,
    },
    #[error("block index {index} out of range for {blocks} blocks")]
    BlockIndex { index: usize, blocks: usize },
    #[error("rows of unequal length")]
    RaggedRows,
}

#[derive(Clone, PartialEq)]
pub struct LinearMap {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl LinearMap {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        LinearMap {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinMapError> {
        if data.len() != rows * cols {
            return Err(LinMapError::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(LinearMap { rows, cols, data })
    }

    /// Builds from a list of rows. An empty list gives a `0 x cols` map only
    /// through [`LinearMap::zeros`]; here it yields `0 x 0`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, LinMapError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(LinMapError::RaggedRows);
            }
            data.extend_from_slice(r);
        }
        Ok(LinearMap {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// `1 x n` map computing the dot product with `weights`.
    pub fn row_vector(weights: &[f64]) -> Self {
        LinearMap {
            rows: 1,
            cols: weights.len(),
            data: weights.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>, LinMapError> {
        if v.len() != self.cols {
            return Err(LinMapError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `self ∘ inner`: apply `inner` first, then `self`.
    pub fn compose(&self, inner: &LinearMap) -> Result<LinearMap, LinMapError> {
        if self.cols != inner.rows {
            return Err(LinMapError::DimensionMismatch {
                expected: self.cols,
                found: inner.rows,
            });
        }
        let mut out = LinearMap::zeros(self.rows, inner.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..inner.cols {
                    out.data[i * inner.cols + j] += a * inner.data[k * inner.cols + j];
                }
            }
        }
        Ok(out)
    }

    /// Block-diagonal map `self ⊕ other`.
    pub fn direct_sum(&self, other: &LinearMap) -> LinearMap {
        let rows = self.rows + other.rows;
        let cols = self.cols + other.cols;
        let mut out = LinearMap::zeros(rows, cols);
        for i in 0..self.rows {
            out.data[i * cols..i * cols + self.cols].copy_from_slice(self.row(i));
        }
        for i in 0..other.rows {
            let r = self.rows + i;
            out.data[r * cols + self.cols..(r + 1) * cols].copy_from_slice(other.row(i));
        }
        out
    }

    /// Stacks maps with a common domain on top of each other.
    pub fn stack(maps: &[&LinearMap]) -> Result<LinearMap, LinMapError> {
        let cols = maps.first().map_or(0, |m| m.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for m in maps {
            if m.cols != cols {
                return Err(LinMapError::DimensionMismatch {
                    expected: cols,
                    found: m.cols,
                });
            }
            rows += m.rows;
            data.extend_from_slice(&m.data);
        }
        Ok(LinearMap { rows, cols, data })
    }

    /// Keeps the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> LinearMap {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        LinearMap {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> LinearMap {
        let mut out = LinearMap::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> LinearMap {
        LinearMap {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    /// Largest absolute entry difference, or `None` when shapes differ.
    pub fn max_abs_diff(&self, other: &LinearMap) -> Option<f64> {
        if self.shape() != other.shape() {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }

    pub fn approx_eq(&self, other: &LinearMap, tol: f64) -> bool {
        self.max_abs_diff(other).is_some_and(|d| d <= tol)
    }
}

impl fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearMap {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("; ")?;
            }
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
        }
        f.write_str("]")
    }
}

pub fn compose(g: &LinearMap, f: &LinearMap) -> Result<LinearMap, LinMapError> {
    g.compose(f)
}

pub fn direct_sum(f: &LinearMap, g: &LinearMap) -> LinearMap {
    f.direct_sum(g)
}

pub fn approx_eq(f: &LinearMap, g: &LinearMap, tol: f64) -> bool {
    f.approx_eq(g, tol)
}

fn block_offsets(dims: &[usize]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(dims.len() + 1);
    let mut acc = 0;
    offsets.push(0);
    for d in dims {
        acc += d;
        offsets.push(acc);
    }
    offsets
}

/// Projection of `R^{d_0} ⊕ … ⊕ R^{d_m}` onto the kept blocks, in ascending
/// block order.
pub fn block_projection(dims: &[usize], keep: &[usize]) -> Result<LinearMap, LinMapError> {
    let offsets = block_offsets(dims);
    let total = offsets[dims.len()];
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let mut rows = Vec::new();
    for &b in &kept {
        if b >= dims.len() {
            return Err(LinMapError::BlockIndex {
                index: b,
                blocks: dims.len(),
            });
        }
        rows.extend(offsets[b]..offsets[b + 1]);
    }
    let mut m = LinearMap::zeros(rows.len(), total);
    for (i, &c) in rows.iter().enumerate() {
        m.set(i, c, 1.0);
    }
    Ok(m)
}

/// Injection of the kept blocks into the full direct sum; the transpose of
/// [`block_projection`].
pub fn block_injection(dims: &[usize], keep: &[usize]) -> Result<LinearMap, LinMapError> {
    block_projection(dims, keep).map(|p| p.transpose())
}
