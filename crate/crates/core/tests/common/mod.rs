//! Independent oracles shared by the integration and acceptance tests. None of
//! these go through the library's basis, quadrature or eigensolver code.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};

use layereig::assembly::SymBandMatrix;

/// Integer polynomial as monomial coefficients, lowest degree first. The
/// reference shapes have integer coefficients, so products, derivatives and
/// integrals over [0, 1] are exact.
#[derive(Clone, Debug)]
pub struct Poly(pub Vec<i128>);

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Poly {
    pub fn mul(&self, o: &Poly) -> Poly {
        let mut c = vec![0; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly(c)
    }

    pub fn deriv(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![0]);
        }
        Poly(self.0.iter().enumerate().skip(1).map(|(k, c)| k as i128 * c).collect())
    }

    /// `t * self`.
    pub fn shift(&self) -> Poly {
        let mut c = vec![0];
        c.extend_from_slice(&self.0);
        Poly(c)
    }

    /// Integral over [0, 1] as a reduced fraction, rounded once at the end.
    pub fn integral01(&self) -> f64 {
        let (mut num, mut den) = (0i128, 1i128);
        for (k, &c) in self.0.iter().enumerate() {
            let d = (k + 1) as i128;
            num = num * d + c * den;
            den *= d;
            let g = gcd(num, den).max(1);
            num /= g;
            den /= g;
        }
        num as f64 / den as f64
    }
}

fn binom(n: usize, k: usize) -> i128 {
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// Shifted Legendre polynomial on [0, 1] from its closed-form coefficients.
fn shifted_legendre(m: usize) -> Poly {
    Poly(
        (0..=m)
            .map(|k| {
                let sign = if (m + k).is_multiple_of(2) { 1 } else { -1 };
                sign * binom(m, k) * binom(m + k, k)
            })
            .collect(),
    )
}

/// Reference shapes in DOF order: left value, left slope, bubbles
/// `t^2 (1-t)^2 P_m(2t-1)`, right value, right slope.
pub fn reference_shapes(p: usize) -> Vec<Poly> {
    let mut s = vec![Poly(vec![1, 0, -3, 2]), Poly(vec![0, 1, -2, 1])];
    let base = Poly(vec![0, 0, 1, -2, 1]);
    for m in 0..p - 3 {
        s.push(base.mul(&shifted_legendre(m)));
    }
    s.push(Poly(vec![0, 0, 3, -2]));
    s.push(Poly(vec![0, 0, -1, 1]));
    s
}

/// Exact local matrices on `[x0, x0 + h]` for `eps^2 u'' v'' + a u' v' + b u v`
/// with `a = a0 + a1 x`, `b = b0 + b1 x`; returns `(K, M)` row-major.
pub fn exact_element(p: usize, x0: f64, h: f64, eps: f64, a: (f64, f64), b: (f64, f64)) -> (Vec<f64>, Vec<f64>) {
    let shapes = reference_shapes(p);
    let n = shapes.len();
    let scale = |i: usize| if i == 1 || i == n - 1 { h } else { 1.0 };
    // c(x0 + h t) = c0 + c1 x0 + c1 h t, integrated term by term.
    let linear = |c: (f64, f64), q: &Poly| (c.0 + c.1 * x0) * q.integral01() + c.1 * h * q.shift().integral01();
    let mut k = vec![0.0; n * n];
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let (si, sj) = (&shapes[i], &shapes[j]);
            let s = scale(i) * scale(j);
            let d2 = si.deriv().deriv().mul(&sj.deriv().deriv()).integral01() / h.powi(3);
            let d1 = linear(a, &si.deriv().mul(&sj.deriv())) / h;
            let d0 = linear(b, &si.mul(sj)) * h;
            k[i * n + j] = s * (eps * eps * d2 + d1 + d0);
            m[i * n + j] = s * si.mul(sj).integral01() * h;
        }
    }
    (k, m)
}

pub fn band_to_dmatrix(a: &SymBandMatrix) -> DMatrix<f64> {
    let n = a.dim();
    DMatrix::from_row_slice(n, n, &a.to_dense())
}

/// All eigenvalues of `K u = lambda M u`, ascending, by Cholesky reduction and
/// a dense symmetric eigensolve.
pub fn dense_generalized_eigenvalues(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Vec<f64> {
    let l = m.clone().cholesky().expect("mass matrix is SPD").l();
    let linv = l.clone().try_inverse().expect("invertible factor");
    let c = &linv * k * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Smallest eigenvalues of the clamped finite-difference problem
/// `eps^2 u'''' - (a u')' + b u = lambda u` on `m` interior points, with the
/// ghost values `u_{-1} = u_1`, `u_{m+2} = u_m` from `u' = 0`.
pub fn fd_eigenvalues(eps: f64, a: impl Fn(f64) -> f64, b: impl Fn(f64) -> f64, m: usize) -> Vec<f64> {
    let h = 1.0 / (m + 1) as f64;
    let mut mat = DMatrix::<f64>::zeros(m, m);
    let e4 = eps * eps / h.powi(4);
    for i in 0..m {
        let x = (i + 1) as f64 * h;
        // Fourth difference; the clamped ghost adds 1 to the corner diagonals.
        let corner = if i == 0 || i == m - 1 { 1.0 } else { 0.0 };
        mat[(i, i)] += e4 * (6.0 + corner);
        for (off, w) in [(1usize, -4.0), (2, 1.0)] {
            if i + off < m {
                mat[(i, i + off)] += e4 * w;
                mat[(i + off, i)] += e4 * w;
            }
        }
        // Conservative second difference with a at half points.
        let (am, ap) = (a(x - 0.5 * h), a(x + 0.5 * h));
        mat[(i, i)] += (am + ap) / (h * h) + b(x);
        if i + 1 < m {
            mat[(i, i + 1)] -= ap / (h * h);
            mat[(i + 1, i)] -= ap / (h * h);
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(mat).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}
