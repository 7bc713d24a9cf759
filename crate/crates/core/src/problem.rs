//! A configured eigenvalue problem: coefficients, degree and mesh family.

use crate::assembly::{assemble, CoefficientSet, SystemMatrices};
use crate::eigensolver::{solve_system, SolverConfig, Spectrum};
use crate::element::default_shape_table;
use crate::error::{Error, Result};
use crate::fe::FeFunction;
use crate::mesh::{Mesh, MeshKind, MeshSpec};

#[derive(Debug, Clone)]
pub struct Problem {
    coeffs: CoefficientSet,
    p: usize,
    beta: f64,
    kind: MeshKind,
}

impl Problem {
    /// `beta` defaults to `sqrt(a_0)`.
    pub fn new(coeffs: CoefficientSet, p: usize, beta: Option<f64>, kind: MeshKind) -> Result<Self> {
        let beta = beta.unwrap_or_else(|| coeffs.default_beta());
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidSpec(format!("beta = {beta} must be positive")));
        }
        if p < 3 {
            return Err(Error::DegreeTooLow(p));
        }
        Ok(Problem {
            coeffs,
            p,
            beta,
            kind,
        })
    }

    pub fn coeffs(&self) -> &CoefficientSet {
        &self.coeffs
    }

    pub fn epsilon(&self) -> f64 {
        self.coeffs.epsilon()
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn kind(&self) -> MeshKind {
        self.kind
    }

    /// Same problem on a different mesh family.
    pub fn with_kind(&self, kind: MeshKind) -> Problem {
        Problem { kind, ..self.clone() }
    }

    pub fn mesh_spec(&self, n: usize) -> MeshSpec {
        MeshSpec::new(self.kind, self.epsilon(), self.beta, self.p, n)
    }

    pub fn mesh(&self, n: usize) -> Result<Mesh> {
        Mesh::build(&self.mesh_spec(n))
    }

    pub fn assemble(&self, mesh: &Mesh) -> Result<SystemMatrices> {
        let shapes = default_shape_table(self.p)?;
        assemble(mesh, &shapes, &self.coeffs)
    }

    pub fn solve(&self, n: usize, cfg: &SolverConfig) -> Result<Solution> {
        self.solve_on(self.mesh(n)?, cfg)
    }

    pub fn solve_on(&self, mesh: Mesh, cfg: &SolverConfig) -> Result<Solution> {
        let sys = self.assemble(&mesh)?;
        let spectrum = solve_system(&sys, cfg)?;
        Ok(Solution {
            mesh,
            spectrum,
            dof: sys.dofs.n_free(),
        })
    }
}

/// Mesh plus computed spectrum.
#[derive(Debug, Clone)]
pub struct Solution {
    pub mesh: Mesh,
    pub spectrum: Spectrum,
    pub dof: usize,
}

impl Solution {
    /// Eigenfunction `i` (0-based) as an evaluable FE function.
    pub fn mode(&self, i: usize) -> Result<FeFunction> {
        let v = self.spectrum.eigenvectors.get(i).ok_or(Error::KTooLarge {
            k: i + 1,
            dim: self.spectrum.len(),
        })?;
        FeFunction::new(self.mesh.clone(), v.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fe::Evaluable;

    #[test]
    fn beam_limit_and_modes() {
        // eps = 1, a = b = 0 would be the clamped beam; a small a keeps it
        // coercive and the first eigenvalue close to 500.564.
        let coeffs = CoefficientSet::constant(1.0, 1e-9, 0.0).unwrap();
        let prob = Problem::new(coeffs, 3, Some(1.0), MeshKind::Uniform).unwrap();
        let sol = prob.solve(16, &SolverConfig::with_k(2)).unwrap();
        let beam1 = 4.730040744862704f64.powi(4);
        let rel = (sol.spectrum.eigenvalues[0] - beam1) / beam1;
        assert!(rel > 0.0 && rel < 2e-5, "{rel}");
        let u = sol.mode(0).unwrap();
        assert!(u.eval(0.5, 0) > 0.0);
        assert!(sol.mode(2).is_err());
        assert_eq!(sol.dof, 30);
    }
}
