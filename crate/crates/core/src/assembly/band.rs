use std::io::Write;

use crate::error::{Error, Result};

/// Symmetric banded matrix; only the diagonal and `bandwidth` super-diagonals
/// are stored, row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBandMatrix {
    dim: usize,
    bandwidth: usize,
    data: Vec<f64>,
}

impl SymBandMatrix {
    pub fn zeros(dim: usize, bandwidth: usize) -> Self {
        SymBandMatrix {
            dim,
            bandwidth,
            data: vec![0.0; dim * (bandwidth + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        (c - r <= self.bandwidth).then(|| r * (self.bandwidth + 1) + (c - r))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `v` to entry (i, j) and, by symmetry, (j, i).
    ///
    /// # Panics
    /// If (i, j) lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside bandwidth {}", self.bandwidth));
        self.data[s] += v;
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim, x.len())?;
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    pub(crate) fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        let w = self.bandwidth;
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.dim {
            let row = &self.data[i * (w + 1)..(i + 1) * (w + 1)];
            y[i] += row[0] * x[i];
            for (k, &a) in row.iter().enumerate().skip(1) {
                let j = i + k;
                if j >= self.dim {
                    break;
                }
                y[i] += a * x[j];
                y[j] += a * x[i];
            }
        }
    }

    /// `|A| x`, entrywise absolute values of the matrix.
    pub fn abs_matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim, x.len())?;
        let w = self.bandwidth;
        let mut y = vec![0.0; self.dim];
        for i in 0..self.dim {
            let row = &self.data[i * (w + 1)..(i + 1) * (w + 1)];
            y[i] += row[0].abs() * x[i];
            for (k, &a) in row.iter().enumerate().skip(1) {
                let j = i + k;
                if j >= self.dim {
                    break;
                }
                y[i] += a.abs() * x[j];
                y[j] += a.abs() * x[i];
            }
        }
        Ok(y)
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_len(self.dim, y.len())?;
        let ay = self.matvec(y)?;
        check_len(self.dim, x.len())?;
        Ok(dot(x, &ay))
    }

    /// `self + s * other`; the result has the larger bandwidth.
    pub fn add_scaled(&self, s: f64, other: &SymBandMatrix) -> Result<SymBandMatrix> {
        check_len(self.dim, other.dim)?;
        let w = self.bandwidth.max(other.bandwidth);
        let mut out = SymBandMatrix::zeros(self.dim, w);
        for i in 0..self.dim {
            for j in i..(i + w + 1).min(self.dim) {
                let v = self.get(i, j) + s * other.get(i, j);
                if v != 0.0 {
                    out.add(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.get(i, j);
            }
        }
        out
    }

    pub fn cholesky(&self) -> Result<BandCholesky> {
        BandCholesky::factor(self)
    }

    /// Debug dump: one line `row col value` per stored band entry.
    pub fn write_dump<W: Write>(&self, mut out: W) -> Result<()> {
        for i in 0..self.dim {
            for j in i..(i + self.bandwidth + 1).min(self.dim) {
                writeln!(out, "{i} {j} {:.17e}", self.get(i, j))?;
            }
        }
        Ok(())
    }
}

/// Lower-triangular banded factor `L` with `A = L L^T`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    dim: usize,
    bandwidth: usize,
    /// Row i holds `L[i][i - bandwidth ..= i]`, left-padded with zeros.
    data: Vec<f64>,
}

impl BandCholesky {
    pub fn factor(a: &SymBandMatrix) -> Result<Self> {
        let n = a.dim;
        let w = a.bandwidth;
        let mut l = vec![0.0; n * (w + 1)];
        // L[i][j] lives at l[i * (w + 1) + (j + w - i)].
        let at = |i: usize, j: usize| i * (w + 1) + (j + w - i);
        for i in 0..n {
            let lo = i.saturating_sub(w);
            for j in lo..=i {
                let klo = lo.max(j.saturating_sub(w));
                let mut s = a.get(i, j);
                for k in klo..j {
                    s -= l[at(i, k)] * l[at(j, k)];
                }
                if j == i {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite { index: i, pivot: s });
                    }
                    l[at(i, i)] = s.sqrt();
                } else {
                    l[at(i, j)] = s / l[at(j, j)];
                }
            }
        }
        Ok(BandCholesky {
            dim: n,
            bandwidth: w,
            data: l,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn l(&self, i: usize, j: usize) -> f64 {
        self.data[i * (self.bandwidth + 1) + (j + self.bandwidth - i)]
    }

    /// Solves `L y = b` in place.
    pub fn forward(&self, b: &mut [f64]) {
        for i in 0..self.dim {
            let lo = i.saturating_sub(self.bandwidth);
            let s: f64 = (lo..i).map(|k| self.l(i, k) * b[k]).sum();
            b[i] = (b[i] - s) / self.l(i, i);
        }
    }

    /// Solves `L^T x = y` in place.
    pub fn backward(&self, y: &mut [f64]) {
        for i in (0..self.dim).rev() {
            let hi = (i + self.bandwidth + 1).min(self.dim);
            let s: f64 = (i + 1..hi).map(|k| self.l(k, i) * y[k]).sum();
            y[i] = (y[i] - s) / self.l(i, i);
        }
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        self.forward(b);
        self.backward(b);
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim, b.len())?;
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}
