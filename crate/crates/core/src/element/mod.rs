//! Reference-element shape functions, quadrature and Hermite interpolation.
//!
//! The reference element is [0, 1]. A degree-`p` element carries `p + 1`
//! shape functions in this local order:
//!
//! ```text
//! 0        value at the left end      1 - 3t^2 + 2t^3
//! 1        slope at the left end      t (1 - t)^2
//! 2..p-2   bubbles                    t^2 (1 - t)^2 P_m(2t - 1), m = 0..p-4
//! p-1      value at the right end     3t^2 - 2t^3
//! p        slope at the right end     t^3 - t^2
//! ```
//!
//! The order matches the global DOF layout, where an element's DOFs are the
//! contiguous block (left node pair, element bubbles, right node pair).
//! Slope shapes are multiplied by the element width when mapped to a
//! physical element so that their coefficients are physical derivatives.

mod hermite;
mod layer;
mod quadrature;

pub use hermite::{hermite_interpolant, HermiteData, PiecewiseHermite};
pub use layer::{eval_layer_function, LayerSide};
pub use quadrature::{gauss_rule, QuadRule};

use crate::error::{Error, Result};

/// Polynomial in monomial form, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Poly(Vec<f64>);

impl Poly {
    fn new(coeffs: Vec<f64>) -> Self {
        Poly(coeffs)
    }

    fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![0.0]);
        }
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    fn scale_add(&self, s: f64, other: &Poly, t: f64) -> Poly {
        let len = self.0.len().max(other.0.len());
        let get = |p: &Poly, k: usize| p.0.get(k).copied().unwrap_or(0.0);
        Poly((0..len).map(|k| s * get(self, k) + t * get(other, k)).collect())
    }
}

/// Which physical scaling a shape function takes on an element of width `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    Value,
    Slope,
    Bubble,
}

/// The `p + 1` reference shape functions with their first two derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceBasis {
    p: usize,
    polys: Vec<[Poly; 3]>,
}

impl ReferenceBasis {
    pub fn new(p: usize) -> Result<Self> {
        if p < 3 {
            return Err(Error::DegreeTooLow(p));
        }
        let mut shapes = Vec::with_capacity(p + 1);
        shapes.push(Poly::new(vec![1.0, 0.0, -3.0, 2.0]));
        shapes.push(Poly::new(vec![0.0, 1.0, -2.0, 1.0]));

        // t^2 (1 - t)^2 times shifted Legendre polynomials.
        let bubble_base = Poly::new(vec![0.0, 0.0, 1.0, -2.0, 1.0]);
        let shifted_x = Poly::new(vec![-1.0, 2.0]);
        let mut legendre = vec![Poly::new(vec![1.0]), shifted_x.clone()];
        for m in 1..p.saturating_sub(4) {
            let mf = m as f64;
            let next = shifted_x
                .mul(&legendre[m])
                .scale_add((2.0 * mf + 1.0) / (mf + 1.0), &legendre[m - 1], -mf / (mf + 1.0));
            legendre.push(next);
        }
        for leg in legendre.iter().take(p - 3) {
            shapes.push(bubble_base.mul(leg));
        }

        shapes.push(Poly::new(vec![0.0, 0.0, 3.0, -2.0]));
        shapes.push(Poly::new(vec![0.0, 0.0, -1.0, 1.0]));

        let polys = shapes
            .into_iter()
            .map(|s| {
                let d1 = s.derivative();
                let d2 = d1.derivative();
                [s, d1, d2]
            })
            .collect();
        Ok(ReferenceBasis { p, polys })
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.p + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn kind(&self, i: usize) -> ShapeKind {
        match i {
            0 => ShapeKind::Value,
            1 => ShapeKind::Slope,
            i if i == self.p - 1 => ShapeKind::Value,
            i if i == self.p => ShapeKind::Slope,
            _ => ShapeKind::Bubble,
        }
    }

    /// Derivative `deriv` (0, 1 or 2) of reference shape `i` at `t`.
    pub fn eval(&self, i: usize, t: f64, deriv: usize) -> f64 {
        self.polys[i][deriv].eval(t)
    }

    /// Physical scale factor of shape `i` on an element of width `h`.
    pub fn scale(&self, i: usize, h: f64) -> f64 {
        match self.kind(i) {
            ShapeKind::Slope => h,
            _ => 1.0,
        }
    }

    /// Evaluates `sum_i c_i phi_i^{(deriv)}` at reference point `t` on an
    /// element of width `h`, with physical scaling applied.
    pub fn combine(&self, coeffs: &[f64], h: f64, t: f64, deriv: usize) -> f64 {
        let s: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c * self.scale(i, h) * self.eval(i, t, deriv))
            .sum();
        s / h.powi(deriv as i32)
    }
}

/// Shape functions and their derivatives tabulated at the points of a
/// quadrature rule. Rows index shapes, columns quadrature points.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeTable {
    basis: ReferenceBasis,
    rule: QuadRule,
    values: Vec<Vec<f64>>,
    d1: Vec<Vec<f64>>,
    d2: Vec<Vec<f64>>,
}

impl ShapeTable {
    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn n_shapes(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &ReferenceBasis {
        &self.basis
    }

    pub fn rule(&self) -> &QuadRule {
        &self.rule
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn d1(&self) -> &[Vec<f64>] {
        &self.d1
    }

    pub fn d2(&self) -> &[Vec<f64>] {
        &self.d2
    }
}

pub fn shape_table(p: usize, rule: QuadRule) -> Result<ShapeTable> {
    let basis = ReferenceBasis::new(p)?;
    let tab = |deriv: usize| -> Vec<Vec<f64>> {
        (0..basis.len())
            .map(|i| rule.points().iter().map(|&t| basis.eval(i, t, deriv)).collect())
            .collect()
    };
    let values = tab(0);
    let d1 = tab(1);
    let d2 = tab(2);
    Ok(ShapeTable {
        basis,
        rule,
        values,
        d1,
        d2,
    })
}

/// Default element quadrature: `2p` Gauss points, exact to degree `4p - 1`.
pub fn default_shape_table(p: usize) -> Result<ShapeTable> {
    if p < 3 {
        return Err(Error::DegreeTooLow(p));
    }
    shape_table(p, gauss_rule(2 * p)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn endpoint_dofs(b: &ReferenceBasis, i: usize) -> [f64; 4] {
        [b.eval(i, 0.0, 0), b.eval(i, 0.0, 1), b.eval(i, 1.0, 0), b.eval(i, 1.0, 1)]
    }

    #[test]
    fn cubic_hermite_duality() {
        let b = ReferenceBasis::new(3).unwrap();
        let expected = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        for (i, row) in expected.iter().enumerate() {
            assert_eq!(&endpoint_dofs(&b, i), row, "shape {i}");
        }
        assert!((b.eval(1, 0.5, 0) - 0.125).abs() < 1e-16);
    }

    #[test]
    fn duality_and_bubbles_for_higher_degree() {
        for p in 4..=9 {
            let b = ReferenceBasis::new(p).unwrap();
            assert_eq!(b.len(), p + 1);
            assert_eq!(endpoint_dofs(&b, 0), [1.0, 0.0, 0.0, 0.0]);
            assert_eq!(endpoint_dofs(&b, 1), [0.0, 1.0, 0.0, 0.0]);
            assert_eq!(endpoint_dofs(&b, p - 1), [0.0, 0.0, 1.0, 0.0]);
            assert_eq!(endpoint_dofs(&b, p), [0.0, 0.0, 0.0, 1.0]);
            for i in 2..p - 1 {
                assert_eq!(b.kind(i), ShapeKind::Bubble);
                for v in endpoint_dofs(&b, i) {
                    assert!(v.abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn rejects_low_degree() {
        assert!(matches!(ReferenceBasis::new(2), Err(Error::DegreeTooLow(2))));
        assert!(matches!(
            shape_table(1, gauss_rule(2).unwrap()),
            Err(Error::DegreeTooLow(1))
        ));
    }

    #[test]
    fn quadratic_reproduced_by_cubic_hermite() {
        let table = default_shape_table(3).unwrap();
        // t^2: values 0, 1 and slopes 0, 2 at the ends.
        let c = [0.0, 0.0, 1.0, 2.0];
        for (q, &t) in table.rule().points().iter().enumerate() {
            let v: f64 = (0..4).map(|i| c[i] * table.values()[i][q]).sum();
            assert!((v - t * t).abs() < 1e-15);
        }
    }

    /// Fits t^d with endpoint values/slopes plus a least-squares bubble fit
    /// at the quadrature points; reproduction must be exact for d <= p.
    #[test]
    fn monomial_reproduction() {
        for p in 3..=8 {
            let table = default_shape_table(p).unwrap();
            let b = table.basis();
            let pts = table.rule().points();
            let nb = p - 3;
            for d in 0..=p {
                let df = d as f64;
                let f = |t: f64| t.powi(d as i32);
                let fp = |t: f64| if d == 0 { 0.0 } else { df * t.powi(d as i32 - 1) };
                let mut coeffs = vec![0.0; p + 1];
                coeffs[0] = f(0.0);
                coeffs[1] = fp(0.0);
                coeffs[p - 1] = f(1.0);
                coeffs[p] = fp(1.0);
                if nb > 0 {
                    // Normal equations for the bubble coefficients.
                    let r: Vec<f64> = pts
                        .iter()
                        .map(|&t| f(t) - b.combine(&coeffs, 1.0, t, 0))
                        .collect();
                    let mut a = vec![vec![0.0; nb]; nb];
                    let mut rhs = vec![0.0; nb];
                    for (q, &t) in pts.iter().enumerate() {
                        for i in 0..nb {
                            let bi = b.eval(2 + i, t, 0);
                            rhs[i] += bi * r[q];
                            for j in 0..nb {
                                a[i][j] += bi * b.eval(2 + j, t, 0);
                            }
                        }
                    }
                    let sol = solve_dense(a, rhs);
                    coeffs[2..2 + nb].copy_from_slice(&sol);
                }
                for &t in pts {
                    let v = b.combine(&coeffs, 1.0, t, 0);
                    assert!((v - f(t)).abs() < 1e-12, "p {p} d {d}");
                }
            }
        }
    }

    fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
                .unwrap();
            a.swap(k, piv);
            b.swap(k, piv);
            for i in k + 1..n {
                let f = a[i][k] / a[k][k];
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
            x[k] = (b[k] - s) / a[k][k];
        }
        x
    }

    #[test]
    fn derivative_tables_match_finite_differences() {
        let step = 1e-6;
        for p in 3..=7 {
            let table = default_shape_table(p).unwrap();
            let b = table.basis();
            for (q, &t) in table.rule().points().iter().enumerate() {
                for i in 0..=p {
                    let fd1 = (b.eval(i, t + step, 0) - b.eval(i, t - step, 0)) / (2.0 * step);
                    let fd2 = (b.eval(i, t + step, 1) - b.eval(i, t - step, 1)) / (2.0 * step);
                    let d1 = table.d1()[i][q];
                    let d2 = table.d2()[i][q];
                    assert!((fd1 - d1).abs() <= 1e-6 * d1.abs().max(1.0));
                    assert!((fd2 - d2).abs() <= 1e-6 * d2.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn c1_across_shared_node() {
        // Two adjacent elements of different widths sharing node DOFs.
        let b = ReferenceBasis::new(5).unwrap();
        let (h1, h2) = (0.3, 0.05);
        let (v, s) = (0.7, -2.5);
        let left = [0.1, 0.4, 0.9, -0.3, v, s];
        let right = [v, s, 0.2, 1.1, -0.4, 0.6];
        let vl = b.combine(&left, h1, 1.0, 0);
        let vr = b.combine(&right, h2, 0.0, 0);
        let dl = b.combine(&left, h1, 1.0, 1);
        let dr = b.combine(&right, h2, 0.0, 1);
        assert!((vl - vr).abs() < 1e-14);
        assert!((dl - dr).abs() < 1e-14);
        assert!((vl - v).abs() < 1e-14 && (dl - s).abs() < 1e-14);
    }
}
