//! Stiffness and mass assembly for
//! `B(u, v) = eps^2 <u'', v''> + <a u', v'> + <b u, v>` over clamped C1
//! Hermite spaces.

mod band;
mod coeffs;
mod dof;

pub use band::{BandCholesky, SymBandMatrix};
pub use coeffs::{CoefficientSet, ScalarFn};
pub use dof::DofMap;

pub(crate) use band::{check_len, dot};

use crate::element::ShapeTable;
use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Dense local matrices of one element, row-major `(p+1) x (p+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementMatrices {
    pub n: usize,
    pub stiffness: Vec<f64>,
    pub mass: Vec<f64>,
}

impl ElementMatrices {
    pub fn k(&self, i: usize, j: usize) -> f64 {
        self.stiffness[i * self.n + j]
    }

    pub fn m(&self, i: usize, j: usize) -> f64 {
        self.mass[i * self.n + j]
    }
}

/// Local stiffness and mass of the element `[x0, x0 + h]`.
pub fn element_matrices(
    x0: f64,
    h: f64,
    shapes: &ShapeTable,
    coeffs: &CoefficientSet,
) -> Result<ElementMatrices> {
    let basis = shapes.basis();
    let n = shapes.n_shapes();
    let eps2 = coeffs.epsilon() * coeffs.epsilon();
    let scale: Vec<f64> = (0..n).map(|i| basis.scale(i, h)).collect();
    let mut stiffness = vec![0.0; n * n];
    let mut mass = vec![0.0; n * n];
    let mut v = vec![0.0; n];
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for (q, (t, w)) in shapes.rule().iter().enumerate() {
        let (a, b) = coeffs.sample(x0 + h * t)?;
        for i in 0..n {
            v[i] = scale[i] * shapes.values()[i][q];
            d1[i] = scale[i] * shapes.d1()[i][q] / h;
            d2[i] = scale[i] * shapes.d2()[i][q] / (h * h);
        }
        let wh = w * h;
        for i in 0..n {
            for j in i..n {
                let k = eps2 * d2[i] * d2[j] + a * d1[i] * d1[j] + b * v[i] * v[j];
                stiffness[i * n + j] += wh * k;
                mass[i * n + j] += wh * v[i] * v[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            stiffness[i * n + j] = stiffness[j * n + i];
            mass[i * n + j] = mass[j * n + i];
        }
    }
    Ok(ElementMatrices {
        n,
        stiffness,
        mass,
    })
}

/// Assembled global system over the free DOFs.
#[derive(Debug, Clone)]
pub struct SystemMatrices {
    pub stiffness: SymBandMatrix,
    pub mass: SymBandMatrix,
    pub dofs: DofMap,
}

/// Assembles `K_ij = B(phi_j, phi_i)` and `M_ij = <phi_j, phi_i>` with the
/// clamped DOFs eliminated. Elements are processed in order.
pub fn assemble(mesh: &Mesh, shapes: &ShapeTable, coeffs: &CoefficientSet) -> Result<SystemMatrices> {
    let p = mesh.spec().p;
    if shapes.degree() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: shapes.degree(),
        });
    }
    let dofs = DofMap::new(mesh.n_elements(), p);
    let dim = dofs.n_free();
    let bw = dofs.bandwidth();
    let mut stiffness = SymBandMatrix::zeros(dim, bw);
    let mut mass = SymBandMatrix::zeros(dim, bw);
    for (e, (&x0, &h)) in mesh.nodes().iter().zip(mesh.widths()).enumerate() {
        let local = element_matrices(x0, h, shapes, coeffs)?;
        let map = dofs.element(e);
        for (i, gi) in map.iter().enumerate() {
            let Some(gi) = *gi else { continue };
            for (j, gj) in map.iter().enumerate() {
                let Some(gj) = *gj else { continue };
                if gj < gi {
                    continue;
                }
                stiffness.add(gi, gj, local.k(i, j));
                mass.add(gi, gj, local.m(i, j));
            }
        }
    }
    Ok(SystemMatrices {
        stiffness,
        mass,
        dofs,
    })
}

/// `u^T K v`, the bilinear form of the FE functions with coefficients u, v.
pub fn energy_inner_product(u: &[f64], v: &[f64], k: &SymBandMatrix) -> Result<f64> {
    k.bilinear(u, v)
}

/// `(u^T K u) / (u^T M u)`.
pub fn rayleigh_quotient(u: &[f64], k: &SymBandMatrix, m: &SymBandMatrix) -> Result<f64> {
    check_len(k.dim(), m.dim())?;
    if u.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroVector);
    }
    Ok(k.bilinear(u, u)? / m.bilinear(u, u)?)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::element::default_shape_table;
    use crate::mesh::{MeshKind, MeshSpec};

    fn isolated(eps: f64, a: f64, b: f64) -> CoefficientSet {
        CoefficientSet::unchecked(eps, Arc::new(move |_| a), Arc::new(move |_| b))
    }

    #[test]
    fn beam_bending_block() {
        let shapes = default_shape_table(3).unwrap();
        let h: f64 = 0.37;
        let em = element_matrices(0.2, h, &shapes, &isolated(1.0, 0.0, 0.0)).unwrap();
        let h2 = h * h;
        let expected = [
            [12.0, 6.0 * h, -12.0, 6.0 * h],
            [6.0 * h, 4.0 * h2, -6.0 * h, 2.0 * h2],
            [-12.0, -6.0 * h, 12.0, -6.0 * h],
            [6.0 * h, 2.0 * h2, -6.0 * h, 4.0 * h2],
        ];
        for i in 0..4 {
            for j in 0..4 {
                let e = expected[i][j] / (h * h * h);
                assert!((em.k(i, j) - e).abs() < 1e-12 * e.abs().max(1.0), "({i},{j})");
            }
        }
    }

    fn assert_block(got: impl Fn(usize, usize) -> f64, expected: [[f64; 4]; 4], scale: f64) {
        for i in 0..4 {
            for j in 0..4 {
                let e = expected[i][j] * scale;
                assert!((got(i, j) - e).abs() < 1e-12 * e.abs().max(1.0), "({i},{j}) {} vs {e}", got(i, j));
            }
        }
    }

    #[test]
    fn consistent_mass_block() {
        let shapes = default_shape_table(3).unwrap();
        let h: f64 = 0.21;
        let em = element_matrices(0.5, h, &shapes, &isolated(0.0, 0.0, 1.0)).unwrap();
        let h2 = h * h;
        let expected = [
            [156.0, 22.0 * h, 54.0, -13.0 * h],
            [22.0 * h, 4.0 * h2, 13.0 * h, -3.0 * h2],
            [54.0, 13.0 * h, 156.0, -22.0 * h],
            [-13.0 * h, -3.0 * h2, -22.0 * h, 4.0 * h2],
        ];
        assert_block(|i, j| em.m(i, j), expected, h / 420.0);
        assert_block(|i, j| em.k(i, j), expected, h / 420.0);
    }

    #[test]
    fn first_derivative_block() {
        let shapes = default_shape_table(3).unwrap();
        let h: f64 = 0.13;
        let em = element_matrices(0.0, h, &shapes, &isolated(0.0, 1.0, 0.0)).unwrap();
        let h2 = h * h;
        let expected = [
            [36.0, 3.0 * h, -36.0, 3.0 * h],
            [3.0 * h, 4.0 * h2, -3.0 * h, -h2],
            [-36.0, -3.0 * h, 36.0, -3.0 * h],
            [3.0 * h, -h2, -3.0 * h, 4.0 * h2],
        ];
        assert_block(|i, j| em.k(i, j), expected, 1.0 / (30.0 * h));
    }

    #[test]
    fn assembled_system_is_spd_and_banded() {
        let spec = MeshSpec::new(MeshKind::Exp, 1e-3, 1.0, 5, 16);
        let mesh = Mesh::build(&spec).unwrap();
        let shapes = default_shape_table(5).unwrap();
        let coeffs = CoefficientSet::new(1e-3, Arc::new(f64::exp), Arc::new(|x| x)).unwrap();
        let sys = assemble(&mesh, &shapes, &coeffs).unwrap();
        assert_eq!(sys.dofs.n_free(), 2 * 15 + 16 * 2);
        assert_eq!(sys.stiffness.bandwidth(), 5);
        assert!(sys.stiffness.cholesky().is_ok());
        assert!(sys.mass.cholesky().is_ok());
    }

    #[test]
    fn degree_mismatch() {
        let mesh = Mesh::build(&MeshSpec::new(MeshKind::Uniform, 1.0, 1.0, 4, 4)).unwrap();
        let shapes = default_shape_table(3).unwrap();
        let coeffs = CoefficientSet::constant(1.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            assemble(&mesh, &shapes, &coeffs),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rayleigh_quotient_of_unit_vector() {
        let mesh = Mesh::build(&MeshSpec::new(MeshKind::Uniform, 1.0, 1.0, 3, 4)).unwrap();
        let shapes = default_shape_table(3).unwrap();
        let coeffs = CoefficientSet::constant(1.0, 1.0, 0.0).unwrap();
        let sys = assemble(&mesh, &shapes, &coeffs).unwrap();
        let mut e1 = vec![0.0; sys.dofs.n_free()];
        e1[0] = 1.0;
        let rq = rayleigh_quotient(&e1, &sys.stiffness, &sys.mass).unwrap();
        assert!((rq - sys.stiffness.get(0, 0) / sys.mass.get(0, 0)).abs() < 1e-12 * rq);
        let zero = vec![0.0; sys.dofs.n_free()];
        assert!(matches!(
            rayleigh_quotient(&zero, &sys.stiffness, &sys.mass),
            Err(Error::ZeroVector)
        ));
        assert_eq!(energy_inner_product(&zero, &e1, &sys.stiffness).unwrap(), 0.0);
        assert!(energy_inner_product(&e1[1..], &e1, &sys.stiffness).is_err());
    }
}
