//! Smallest eigenpairs of the generalized problem `K u = lambda M u` with
//! symmetric positive definite banded `K`, `M`.
//!
//! Both methods work with the inverse operator `(K - sigma M)^{-1} M`, whose
//! dominant eigenvalues `mu = 1 / (lambda - sigma)` are the wanted ones. This
//! keeps the small eigenvalues relatively accurate even when `K` has entries
//! of size `eps^2 / h^3` on layer elements, where forming `u^T K u` would
//! cancel most significant digits.

pub mod dense;

use serde::{Deserialize, Serialize};

use crate::assembly::{check_len, dot, BandCholesky, SymBandMatrix, SystemMatrices};
use crate::error::{Error, Result};

/// Relative gap below which neighbouring eigenvalues are flagged as clustered.
pub const CLUSTER_GAP: f64 = 1e-8;

/// A pair whose residual is within this multiple of its rounding floor is
/// accepted even if the floor lies above the requested tolerance.
pub const FLOOR_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Dense reduction of the shifted inverse, then a full symmetric
    /// eigendecomposition. Cubic in the DOF count.
    DenseReduce,
    /// Block inverse iteration on the banded factor of `K - sigma M`.
    ShiftInvert,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dense" | "dense-reduce" => Ok(Method::DenseReduce),
            "shift-invert" | "shift" | "iterative" => Ok(Method::ShiftInvert),
            _ => Err(Error::InvalidSpec(format!("unknown solver method '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub k: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub shift: f64,
    pub method: Method,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            k: 5,
            tol: 1e-11,
            max_iter: 500,
            shift: 0.0,
            method: Method::DenseReduce,
        }
    }
}

impl SolverConfig {
    pub fn with_k(k: usize) -> Self {
        SolverConfig {
            k,
            ..Default::default()
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidSpec("at least one eigenpair must be requested".into()));
        }
        if self.k > dim {
            return Err(Error::KTooLarge { k: self.k, dim });
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidSpec(format!("tolerance {} must be positive", self.tol)));
        }
        if !(self.shift >= 0.0 && self.shift.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "shift {} must be finite and nonnegative",
                self.shift
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidSpec("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// The `k` smallest eigenpairs, M-orthonormal, ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    /// Residual level explained by rounding alone,
    /// `u_mach || |K||u| + lambda |M||u| || / ||K u||`. Fine meshes push it
    /// above the default tolerance.
    pub residual_floors: Vec<f64>,
    pub ortho_error: f64,
    /// `clustered[i]` is set when eigenvalue i is within the relative gap
    /// `CLUSTER_GAP` of a neighbour.
    pub clustered: Vec<bool>,
    pub method: Method,
    /// Block iterations spent; 0 when the dense path met the tolerance.
    pub iterations: usize,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Smallest eigenpairs of `K u = lambda M u`. Signs are fixed so that the mean
/// of all vector entries is nonnegative; [`solve_system`] uses nodal values
/// only.
pub fn solve_smallest(k: &SymBandMatrix, m: &SymBandMatrix, cfg: &SolverConfig) -> Result<Spectrum> {
    solve_inner(k, m, cfg, None)
}

/// Smallest eigenpairs of an assembled system, with the sign fixed by the
/// mean of nodal values.
pub fn solve_system(sys: &SystemMatrices, cfg: &SolverConfig) -> Result<Spectrum> {
    let values = sys.dofs.value_indices();
    solve_inner(&sys.stiffness, &sys.mass, cfg, Some(&values))
}

fn solve_inner(
    k: &SymBandMatrix,
    m: &SymBandMatrix,
    cfg: &SolverConfig,
    sign_dofs: Option<&[usize]>,
) -> Result<Spectrum> {
    check_len(k.dim(), m.dim())?;
    let n = k.dim();
    cfg.validate(n)?;
    // Surfaces an indefinite mass matrix before anything else.
    m.cholesky()?;
    let chol = k.add_scaled(-cfg.shift, m)?.cholesky()?;

    let (mut pairs, iterations) = match cfg.method {
        Method::DenseReduce => {
            let pairs = dense_reduce(&chol, m, cfg)?;
            if pairs.excess(k, m, cfg)? <= 1.0 {
                (pairs, 0)
            } else {
                // Polish with the dense vectors as the starting block.
                block_inverse_iteration(&chol, k, m, cfg, Some(pairs.vectors))?
            }
        }
        Method::ShiftInvert => block_inverse_iteration(&chol, k, m, cfg, None)?,
    };

    for v in pairs.vectors.iter_mut() {
        fix_sign(v, sign_dofs);
    }
    let clustered = cluster_flags(&pairs.values, cfg.k);
    pairs.values.truncate(cfg.k);
    pairs.vectors.truncate(cfg.k);
    let mut spectrum = Spectrum {
        eigenvalues: pairs.values,
        eigenvectors: pairs.vectors,
        residuals: Vec::new(),
        residual_floors: Vec::new(),
        ortho_error: 0.0,
        clustered,
        method: cfg.method,
        iterations,
    };
    spectrum.residuals = residual_check(&spectrum, k, m)?;
    spectrum.residual_floors = spectrum
        .eigenvalues
        .iter()
        .zip(&spectrum.eigenvectors)
        .map(|(&lam, u)| residual_and_floor(k, m, lam, u).map(|(_, f)| f))
        .collect::<Result<_>>()?;
    spectrum.ortho_error = ortho_error(&spectrum.eigenvectors, m)?;
    Ok(spectrum)
}

/// `||K u_i - lambda_i M u_i|| / ||K u_i||` for every pair, recomputed from
/// scratch.
pub fn residual_check(spectrum: &Spectrum, k: &SymBandMatrix, m: &SymBandMatrix) -> Result<Vec<f64>> {
    check_len(k.dim(), m.dim())?;
    spectrum
        .eigenvalues
        .iter()
        .zip(&spectrum.eigenvectors)
        .map(|(&lam, u)| relative_residual(k, m, lam, u))
        .collect()
}

fn relative_residual(k: &SymBandMatrix, m: &SymBandMatrix, lam: f64, u: &[f64]) -> Result<f64> {
    residual_and_floor(k, m, lam, u).map(|(r, _)| r)
}

/// Relative residual and its rounding floor, both scaled by `||K u||`.
fn residual_and_floor(k: &SymBandMatrix, m: &SymBandMatrix, lam: f64, u: &[f64]) -> Result<(f64, f64)> {
    let ku = k.matvec(u)?;
    let mu = m.matvec(u)?;
    let r: f64 = ku.iter().zip(&mu).map(|(a, b)| (a - lam * b).powi(2)).sum::<f64>().sqrt();
    let abs_u: Vec<f64> = u.iter().map(|x| x.abs()).collect();
    let kabs = k.abs_matvec(&abs_u)?;
    let mabs = m.abs_matvec(&abs_u)?;
    let floor: f64 = kabs
        .iter()
        .zip(&mabs)
        .map(|(a, b)| (a + lam.abs() * b).powi(2))
        .sum::<f64>()
        .sqrt()
        * f64::EPSILON;
    let scale = dot(&ku, &ku).sqrt();
    Ok(if scale > 0.0 { (r / scale, floor / scale) } else { (r, floor) })
}

/// `max |u_i^T M u_j - delta_ij|`.
pub fn ortho_error(vectors: &[Vec<f64>], m: &SymBandMatrix) -> Result<f64> {
    let mv: Vec<Vec<f64>> = vectors.iter().map(|v| m.matvec(v)).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for (i, u) in vectors.iter().enumerate() {
        for (j, w) in mv.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(u, w) - want).abs());
        }
    }
    Ok(worst)
}

/// Candidate eigenpairs sorted ascending, possibly more than requested.
struct Pairs {
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
}

impl Pairs {
    /// Largest ratio of residual to its acceptance level
    /// `max(tol, FLOOR_FACTOR * floor)` over the first `cfg.k` pairs; at most 1
    /// means converged.
    fn excess(&self, k: &SymBandMatrix, m: &SymBandMatrix, cfg: &SolverConfig) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (lam, u) in self.values.iter().zip(&self.vectors).take(cfg.k) {
            if !lam.is_finite() {
                return Ok(f64::INFINITY);
            }
            let (r, floor) = residual_and_floor(k, m, *lam, u)?;
            worst = worst.max(r / cfg.tol.max(FLOOR_FACTOR * floor));
        }
        Ok(worst)
    }

    fn worst_residual(&self, k: &SymBandMatrix, m: &SymBandMatrix, count: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (lam, u) in self.values.iter().zip(&self.vectors).take(count) {
            worst = worst.max(relative_residual(k, m, *lam, u)?);
        }
        Ok(worst)
    }
}

/// Forms `C = L^{-1} M L^{-T}` for `K - sigma M = L L^T`, decomposes it densely
/// and maps the dominant eigenvectors back.
fn dense_reduce(chol: &BandCholesky, m: &SymBandMatrix, cfg: &SolverConfig) -> Result<Pairs> {
    let n = m.dim();
    // W = L^{-1} M, column by column; column j of M is row j by symmetry.
    let mut w = vec![0.0; n * n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        for (i, c) in col.iter_mut().enumerate() {
            *c = m.get(i, j);
        }
        chol.forward(&mut col);
        for i in 0..n {
            w[i * n + j] = col[i];
        }
    }
    // C = L^{-1} W^T; C is symmetric, so column j of C is L^{-1} (row j of W).
    let mut c = vec![0.0; n * n];
    for j in 0..n {
        col.copy_from_slice(&w[j * n..(j + 1) * n]);
        chol.forward(&mut col);
        for i in 0..n {
            c[i * n + j] = col[i];
        }
    }
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (c[i * n + j] + c[j * n + i]);
            c[i * n + j] = s;
            c[j * n + i] = s;
        }
    }
    let eig = dense::symmetric_eigen(&c, n)?;
    // Keep one extra pair, if available, for the cluster check.
    let take = (cfg.k + 1).min(n);
    let mut values = Vec::with_capacity(take);
    let mut vectors = Vec::with_capacity(take);
    for idx in (n - take..n).rev() {
        let mu = eig.values[idx];
        if !(mu > 0.0) {
            return Err(Error::NotPositiveDefinite { index: idx, pivot: mu });
        }
        let mut u = eig.vector(idx);
        chol.backward(&mut u);
        m_normalize(&mut u, m)?;
        values.push(cfg.shift + 1.0 / mu);
        vectors.push(u);
    }
    Ok(Pairs { values, vectors })
}

/// Block inverse iteration with Rayleigh-Ritz on the inverse operator. The
/// block is wider than `k` so that the `k`-th pair converges at the rate
/// `(lambda_k - sigma) / (lambda_{b+1} - sigma)`.
fn block_inverse_iteration(
    chol: &BandCholesky,
    k: &SymBandMatrix,
    m: &SymBandMatrix,
    cfg: &SolverConfig,
    start: Option<Vec<Vec<f64>>>,
) -> Result<(Pairs, usize)> {
    let n = m.dim();
    let block = n.min((2 * cfg.k).max(cfg.k + 8));
    let mut x = start.unwrap_or_default();
    x.truncate(block);
    for j in x.len()..block {
        x.push(start_vector(n, j));
    }
    m_orthonormalize(&mut x, m)?;

    let mut worst = f64::INFINITY;
    let mut mx = vec![0.0; n];
    for iter in 1..=cfg.max_iter {
        // W = (K - sigma M)^{-1} M X and T = X^T M W.
        let mut w = Vec::with_capacity(block);
        let mut t = vec![0.0; block * block];
        let mut mxs = Vec::with_capacity(block);
        for xj in &x {
            m.matvec_into(xj, &mut mx);
            let mut wj = mx.clone();
            chol.solve_in_place(&mut wj);
            mxs.push(mx.clone());
            w.push(wj);
        }
        for i in 0..block {
            for j in 0..block {
                t[i * block + j] = dot(&mxs[i], &w[j]);
            }
        }
        for i in 0..block {
            for j in 0..i {
                let s = 0.5 * (t[i * block + j] + t[j * block + i]);
                t[i * block + j] = s;
                t[j * block + i] = s;
            }
        }
        let eig = dense::symmetric_eigen(&t, block)?;

        let mut values = Vec::with_capacity(block);
        let mut next = Vec::with_capacity(block);
        for idx in (0..block).rev() {
            let mu = eig.values[idx];
            let s = eig.vector(idx);
            let mut v = vec![0.0; n];
            for (wj, &c) in w.iter().zip(&s) {
                v.iter_mut().zip(wj).for_each(|(o, x)| *o += c * x);
            }
            values.push(if mu > 0.0 { cfg.shift + 1.0 / mu } else { f64::INFINITY });
            next.push(v);
        }
        // The estimates are W s rather than the Ritz vectors X s: the extra
        // application of the inverse damps stiff layer components, which
        // otherwise dominate the residual when lambda_max / lambda_1 ~ 1e16.
        let keep = (cfg.k + 1).min(block);
        let mut pairs = Pairs {
            values: values[..keep].to_vec(),
            vectors: next[..keep].to_vec(),
        };
        for u in pairs.vectors.iter_mut() {
            m_normalize(u, m)?;
        }
        worst = pairs.worst_residual(k, m, cfg.k)?;
        if pairs.excess(k, m, cfg)? <= 1.0 {
            m_orthonormalize(&mut pairs.vectors, m)?;
            return Ok((pairs, iter));
        }
        m_orthonormalize(&mut next, m)?;
        x = next;
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iter,
        residual: worst,
    })
}

/// Deterministic, generic starting vector.
fn start_vector(n: usize, j: usize) -> Vec<f64> {
    let freq = (j + 1) as f64 * std::f64::consts::PI / (n + 1) as f64;
    (0..n)
        .map(|i| {
            let t = (i + 1) as f64;
            (freq * t).sin() + 0.25 * (0.7 * t + 1.3 * (j * j) as f64).cos()
        })
        .collect()
}

fn m_normalize(u: &mut [f64], m: &SymBandMatrix) -> Result<()> {
    let norm2 = m.bilinear(u, u)?;
    if !(norm2 > 0.0) {
        return Err(Error::ZeroVector);
    }
    let s = 1.0 / norm2.sqrt();
    u.iter_mut().for_each(|x| *x *= s);
    Ok(())
}

/// Modified Gram-Schmidt in the M inner product, two passes. Columns that
/// collapse are replaced by fresh start vectors.
fn m_orthonormalize(x: &mut [Vec<f64>], m: &SymBandMatrix) -> Result<()> {
    let n = m.dim();
    let mut mq: Vec<Vec<f64>> = Vec::with_capacity(x.len());
    let mut replacement = x.len();
    for j in 0..x.len() {
        let mut attempts = 0;
        loop {
            let (done, rest) = x.split_at_mut(j);
            let xj = &mut rest[0];
            let before = m.bilinear(xj, xj)?.sqrt();
            for _ in 0..2 {
                for (q, mqi) in done.iter().zip(&mq) {
                    let c = dot(xj, mqi);
                    xj.iter_mut().zip(q).for_each(|(t, h)| *t -= c * h);
                }
            }
            let after = m.bilinear(xj, xj)?.sqrt();
            if after > 1e-10 * before && after > 0.0 {
                xj.iter_mut().for_each(|v| *v /= after);
                break;
            }
            attempts += 1;
            if attempts > n + 1 {
                return Err(Error::ZeroVector);
            }
            x[j] = start_vector(n, replacement);
            replacement += 1;
        }
        mq.push(m.matvec(&x[j])?);
    }
    Ok(())
}

/// Flips `u` so that the mean over `dofs` (all entries if `None`) is
/// nonnegative. A vanishing mean falls back to the sign of the first entry
/// that is not negligible.
pub fn fix_sign(u: &mut [f64], dofs: Option<&[usize]>) {
    let pick: Vec<f64> = match dofs {
        Some(idx) if !idx.is_empty() => idx.iter().map(|&i| u[i]).collect(),
        _ => u.to_vec(),
    };
    let max = pick.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if max == 0.0 {
        return;
    }
    let sum: f64 = pick.iter().sum();
    let flip = if sum.abs() > 1e-10 * max * pick.len() as f64 {
        sum < 0.0
    } else {
        pick.iter().find(|v| v.abs() > 1e-3 * max).is_some_and(|&v| v < 0.0)
    };
    if flip {
        u.iter_mut().for_each(|x| *x = -*x);
    }
}

fn cluster_flags(values: &[f64], k: usize) -> Vec<bool> {
    let close = |a: f64, b: f64| (a - b).abs() < CLUSTER_GAP * a.abs();
    (0..k)
        .map(|i| {
            (i > 0 && close(values[i], values[i - 1]))
                || values.get(i + 1).is_some_and(|&next| close(values[i], next))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(entries: &[f64]) -> SymBandMatrix {
        let mut a = SymBandMatrix::zeros(entries.len(), 0);
        for (i, &v) in entries.iter().enumerate() {
            a.add(i, i, v);
        }
        a
    }

    #[test]
    fn one_by_one() {
        for method in [Method::DenseReduce, Method::ShiftInvert] {
            let cfg = SolverConfig {
                k: 1,
                method,
                ..Default::default()
            };
            let s = solve_smallest(&diag(&[2.0]), &diag(&[1.0]), &cfg).unwrap();
            assert!((s.eigenvalues[0] - 2.0).abs() < 1e-15);
            assert_eq!(s.eigenvectors[0], vec![1.0]);
        }
    }

    #[test]
    fn diagonal_two_by_two() {
        for method in [Method::DenseReduce, Method::ShiftInvert] {
            let cfg = SolverConfig {
                k: 2,
                method,
                ..Default::default()
            };
            let s = solve_smallest(&diag(&[1.0, 4.0]), &diag(&[1.0, 1.0]), &cfg).unwrap();
            assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14);
            assert!((s.eigenvalues[1] - 4.0).abs() < 1e-14);
            assert!((s.eigenvectors[0][0] - 1.0).abs() < 1e-12);
            assert!(s.eigenvectors[0][1].abs() < 1e-12);
            assert!((s.eigenvectors[1][1] - 1.0).abs() < 1e-12);
            assert!(s.residuals.iter().all(|&r| r < 1e-12));
        }
    }

    #[test]
    fn errors() {
        let k = diag(&[1.0, 2.0]);
        let m = diag(&[1.0, 1.0]);
        assert!(matches!(
            solve_smallest(&k, &m, &SolverConfig::with_k(3)),
            Err(Error::KTooLarge { k: 3, dim: 2 })
        ));
        assert!(solve_smallest(&k, &m, &SolverConfig::with_k(0)).is_err());
        let bad_m = diag(&[1.0, -1.0]);
        assert!(matches!(
            solve_smallest(&k, &bad_m, &SolverConfig::with_k(1)),
            Err(Error::NotPositiveDefinite { .. })
        ));
        let too_far = SolverConfig {
            k: 1,
            shift: 1.5,
            ..Default::default()
        };
        assert!(matches!(
            solve_smallest(&k, &m, &too_far),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(matches!(
            solve_smallest(&k, &diag(&[1.0]), &SolverConfig::with_k(1)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn residual_detects_perturbation() {
        let k = diag(&[1.0, 3.0, 7.0]);
        let m = diag(&[1.0, 1.0, 1.0]);
        let mut s = solve_smallest(&k, &m, &SolverConfig::with_k(2)).unwrap();
        assert!(residual_check(&s, &k, &m).unwrap().iter().all(|&r| r < 1e-15));
        s.eigenvectors[0][1] += 1e-3;
        s.eigenvectors[0][2] -= 0.7e-3;
        assert!(residual_check(&s, &k, &m).unwrap()[0] > 1e-6);
    }

    #[test]
    fn sign_convention() {
        let mut u = vec![-1.0, -2.0, 0.5];
        fix_sign(&mut u, None);
        assert_eq!(u, vec![1.0, 2.0, -0.5]);
        // Antisymmetric: zero mean, decided by the first significant entry.
        let mut v = vec![0.0, -1.0, 0.0, 1.0];
        fix_sign(&mut v, None);
        assert_eq!(v, vec![0.0, 1.0, 0.0, -1.0]);
        let mut w = vec![-1.0, 100.0, -1.0];
        fix_sign(&mut w, Some(&[0, 2]));
        assert_eq!(w, vec![1.0, -100.0, 1.0]);
    }

    #[test]
    fn clusters_flagged() {
        let k = diag(&[1.0, 1.0 + 1e-12, 5.0]);
        let m = diag(&[1.0, 1.0, 1.0]);
        let s = solve_smallest(&k, &m, &SolverConfig::with_k(3)).unwrap();
        assert_eq!(s.clustered, vec![true, true, false]);
        assert!(s.ortho_error < 1e-12);
    }

    #[test]
    fn method_names() {
        assert_eq!("dense".parse::<Method>().unwrap(), Method::DenseReduce);
        assert_eq!("shift-invert".parse::<Method>().unwrap(), Method::ShiftInvert);
        assert!("lanczos".parse::<Method>().is_err());
    }
}
