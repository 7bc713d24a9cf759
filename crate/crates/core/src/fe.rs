//! Functions that can be evaluated with up to two derivatives: finite element
//! solutions, Hermite interpolants and closed-form functions.

use std::sync::Arc;

use crate::assembly::DofMap;
use crate::element::{PiecewiseHermite, ReferenceBasis};
use crate::error::{Error, Result};
use crate::mesh::Mesh;

pub trait Evaluable {
    /// Derivative of order `deriv` (0, 1 or 2) at `x` in [0, 1].
    fn eval(&self, x: f64, deriv: usize) -> f64;

    /// Points where the function may lose smoothness; integration rules split
    /// there.
    fn breakpoints(&self) -> &[f64];
}

/// A finite element function `sum_j c_j phi_j` on a mesh.
#[derive(Debug, Clone)]
pub struct FeFunction {
    mesh: Mesh,
    dofs: DofMap,
    basis: ReferenceBasis,
    coeffs: Vec<f64>,
}

impl FeFunction {
    pub fn new(mesh: Mesh, coeffs: Vec<f64>) -> Result<Self> {
        let p = mesh.spec().p;
        let dofs = DofMap::new(mesh.n_elements(), p);
        if coeffs.len() != dofs.n_free() {
            return Err(Error::DimensionMismatch {
                expected: dofs.n_free(),
                found: coeffs.len(),
            });
        }
        Ok(FeFunction {
            basis: ReferenceBasis::new(p)?,
            mesh,
            dofs,
            coeffs,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn dofs(&self) -> &DofMap {
        &self.dofs
    }

    pub fn negated(&self) -> FeFunction {
        FeFunction {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            ..self.clone()
        }
    }
}

impl Evaluable for FeFunction {
    fn eval(&self, x: f64, deriv: usize) -> f64 {
        let e = self.mesh.locate(x);
        let x0 = self.mesh.nodes()[e];
        let h = self.mesh.widths()[e];
        let local = self.dofs.gather(e, &self.coeffs);
        self.basis.combine(&local, h, (x - x0) / h, deriv)
    }

    fn breakpoints(&self) -> &[f64] {
        self.mesh.nodes()
    }
}

impl Evaluable for PiecewiseHermite {
    fn eval(&self, x: f64, deriv: usize) -> f64 {
        PiecewiseHermite::eval(self, x, deriv)
    }

    fn breakpoints(&self) -> &[f64] {
        self.nodes()
    }
}

pub type DerivFn = Arc<dyn Fn(f64, usize) -> f64>;

/// A closed-form function given together with its derivatives.
#[derive(Clone)]
pub struct ExactFunction {
    f: DerivFn,
    breaks: Vec<f64>,
}

impl std::fmt::Debug for ExactFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExactFunction").field("breaks", &self.breaks).finish_non_exhaustive()
    }
}

impl ExactFunction {
    /// `f(x, deriv)` must return the derivative of the given order.
    pub fn new(f: impl Fn(f64, usize) -> f64 + 'static) -> Self {
        ExactFunction {
            f: Arc::new(f),
            breaks: vec![0.0, 1.0],
        }
    }

    /// Same function with extra integration breakpoints, e.g. a layer mesh.
    pub fn with_breakpoints(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }
}

impl Evaluable for ExactFunction {
    fn eval(&self, x: f64, deriv: usize) -> f64 {
        (self.f)(x, deriv)
    }

    fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }
}

/// Sorted union of two breakpoint sets, dropping near-duplicates.
pub fn union_breakpoints(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b).copied().chain([0.0, 1.0]).collect();
    all.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for x in all {
        if out.last().is_none_or(|&last| x - last > 1e-15 * last.abs().max(1e-300)) {
            out.push(x);
        }
    }
    out
}
