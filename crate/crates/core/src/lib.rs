//! Eigenpairs of the clamped fourth-order problem
//! `eps^2 u'''' - (a u')' + b u = lambda u` on `(0, 1)` with
//! `u = u' = 0` at both ends, discretised by C1 Hermite finite elements on
//! layer-adapted (eXp, Shishkin) or uniform meshes.
//!
//! Typical use:
//!
//! ```
//! use std::sync::Arc;
//! use layereig::{CoefficientSet, MeshKind, Problem, SolverConfig};
//!
//! let coeffs = CoefficientSet::new(1e-6, Arc::new(f64::exp), Arc::new(|x| x)).unwrap();
//! let problem = Problem::new(coeffs, 3, None, MeshKind::Exp).unwrap();
//! let sol = problem.solve(12, &SolverConfig::default()).unwrap();
//! assert!((sol.spectrum.eigenvalues[0] - 16.68).abs() < 1e-2);
//! ```

pub mod analysis;
pub mod assembly;
pub mod cli;
pub mod eigensolver;
pub mod element;
pub mod error;
pub mod fe;
pub mod mesh;
pub mod problem;

pub use assembly::{assemble, CoefficientSet, ScalarFn, SystemMatrices};
pub use eigensolver::{Method, SolverConfig, Spectrum};
pub use error::{Error, Result};
pub use fe::{Evaluable, FeFunction};
pub use mesh::{Mesh, MeshKind, MeshSpec};
pub use problem::{Problem, Solution};
