use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{
    align_sign, discrete_max_error, energy_norm_error, fit_slope_asymptotic, SlopeFit, DEFAULT_POINTS_PER_REGION,
};
use crate::eigensolver::{Method, SolverConfig};
use crate::error::{Error, Result};
use crate::fe::{Evaluable, FeFunction};
use crate::mesh::MeshKind;
use crate::problem::{Problem, Solution};

/// Fine eXp-mesh solution standing in for the exact eigenpairs.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub solution: Solution,
    pub n_ref: usize,
    pub epsilon: f64,
    pub p: usize,
    pub solver: SolverConfig,
}

impl ReferenceSolution {
    /// `max(512, 8 N_max)`, rounded up to a multiple of 4.
    pub fn default_n(n_max: usize) -> usize {
        512usize.max(8 * n_max).next_multiple_of(4)
    }

    /// Solves `problem` (whatever its mesh family) on an eXp mesh with `n_ref`
    /// elements, using block inverse iteration.
    pub fn compute(problem: &Problem, n_ref: usize, modes: usize, solver: &SolverConfig) -> Result<Self> {
        let solver = SolverConfig {
            k: modes,
            method: Method::ShiftInvert,
            ..*solver
        };
        let solution = problem.with_kind(MeshKind::Exp).solve(n_ref, &solver)?;
        Ok(ReferenceSolution {
            solution,
            n_ref,
            epsilon: problem.epsilon(),
            p: problem.degree(),
            solver,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.solution.spectrum.eigenvalues
    }

    pub fn mode(&self, i: usize) -> Result<FeFunction> {
        self.solution.mode(i)
    }

    /// Width of the sampled layer regions for max-norm errors: the transition
    /// point of the reference mesh.
    pub fn layer_width(&self) -> f64 {
        self.solution.mesh.transition_point().unwrap_or(0.25)
    }
}

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub epsilons: Vec<f64>,
    pub n_list: Vec<usize>,
    pub modes: usize,
    /// Reference resolution; `ReferenceSolution::default_n` if `None`.
    pub ref_n: Option<usize>,
    pub solver: SolverConfig,
    pub n_per_region: usize,
    /// Compute eigenvector errors (energy and max norms) besides eigenvalues.
    pub eigenvectors: bool,
}

impl StudyConfig {
    pub fn new(epsilons: Vec<f64>, n_list: Vec<usize>, modes: usize) -> Self {
        StudyConfig {
            epsilons,
            n_list,
            modes,
            ref_n: None,
            solver: SolverConfig::with_k(modes),
            n_per_region: DEFAULT_POINTS_PER_REGION,
            eigenvectors: true,
        }
    }

    fn validate(&self) -> Result<usize> {
        if self.n_list.len() < 3 {
            return Err(Error::TooFewPoints(self.n_list.len()));
        }
        if self.n_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpec("N list must be strictly ascending".into()));
        }
        if self.epsilons.is_empty() {
            return Err(Error::InvalidSpec("no epsilon values given".into()));
        }
        if self.modes == 0 {
            return Err(Error::InvalidSpec("at least one mode must be studied".into()));
        }
        let n_max = *self.n_list.last().unwrap_or(&0);
        let n_ref = self.ref_n.unwrap_or_else(|| ReferenceSolution::default_n(n_max));
        if n_ref < 4 * n_max {
            return Err(Error::InvalidSpec(format!(
                "reference resolution {n_ref} must be at least 4 x {n_max}"
            )));
        }
        Ok(n_ref)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeError {
    /// 1-based.
    pub mode: usize,
    pub lambda_h: f64,
    pub lambda_ref: f64,
    pub lambda_err_pct: f64,
    /// Eigenvector errors are `None` for clustered or sign-ambiguous modes and
    /// when eigenvector errors were not requested.
    pub energy_err_pct: Option<f64>,
    pub maxnorm_u_pct: Option<f64>,
    pub maxnorm_du_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub n: usize,
    pub dof: usize,
    pub modes: Vec<ModeError>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonStudy {
    pub epsilon: f64,
    pub n_ref: usize,
    pub lambda_ref: Vec<f64>,
    pub records: Vec<ErrorRecord>,
    /// Keyed `lambda_k`, `energy_k`, `maxnorm_u_k`, `maxnorm_du_k`; errors
    /// against DOF.
    pub fits: BTreeMap<String, SlopeFit>,
    /// Grid points that failed, with the error message.
    pub failures: Vec<String>,
}

impl EpsilonStudy {
    pub fn fit(&self, key: &str) -> Option<&SlopeFit> {
        self.fits.get(key)
    }

    /// Errors of one metric for one mode across N, as `(dof, error)`.
    pub fn series(&self, metric: &str, mode: usize) -> Vec<(f64, f64)> {
        self.records
            .iter()
            .filter_map(|r| {
                let m = r.modes.get(mode - 1)?;
                let v = match metric {
                    "lambda" => Some(m.lambda_err_pct),
                    "energy" => m.energy_err_pct,
                    "maxnorm_u" => m.maxnorm_u_pct,
                    "maxnorm_du" => m.maxnorm_du_pct,
                    _ => None,
                }?;
                Some((r.dof as f64, v))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub mesh_kind: MeshKind,
    pub p: usize,
    pub studies: Vec<EpsilonStudy>,
}

/// One CSV line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub mesh_kind: MeshKind,
    pub epsilon: f64,
    pub p: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub dof: usize,
    pub mode: usize,
    pub lambda_h: f64,
    pub lambda_err_pct: f64,
    pub energy_err_pct: Option<f64>,
    pub maxnorm_u_pct: Option<f64>,
    pub maxnorm_du_pct: Option<f64>,
}

/// 17 significant digits.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

impl StudyReport {
    pub fn rows(&self) -> Vec<StudyRow> {
        let mut rows = Vec::new();
        for s in &self.studies {
            for r in &s.records {
                for m in &r.modes {
                    rows.push(StudyRow {
                        mesh_kind: self.mesh_kind,
                        epsilon: s.epsilon,
                        p: self.p,
                        n: r.n,
                        dof: r.dof,
                        mode: m.mode,
                        lambda_h: m.lambda_h,
                        lambda_err_pct: m.lambda_err_pct,
                        energy_err_pct: m.energy_err_pct,
                        maxnorm_u_pct: m.maxnorm_u_pct,
                        maxnorm_du_pct: m.maxnorm_du_pct,
                    });
                }
            }
        }
        rows
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "mesh_kind",
            "epsilon",
            "p",
            "N",
            "dof",
            "mode",
            "lambda_h",
            "lambda_err_pct",
            "energy_err_pct",
            "maxnorm_u_pct",
            "maxnorm_du_pct",
        ])?;
        for r in self.rows() {
            w.write_record([
                r.mesh_kind.to_string(),
                fmt_f64(r.epsilon),
                r.p.to_string(),
                r.n.to_string(),
                r.dof.to_string(),
                r.mode.to_string(),
                fmt_f64(r.lambda_h),
                fmt_f64(r.lambda_err_pct),
                fmt_opt(r.energy_err_pct),
                fmt_opt(r.maxnorm_u_pct),
                fmt_opt(r.maxnorm_du_pct),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Parses the CSV written by [`StudyReport::write_csv`].
    pub fn read_csv_rows<R: std::io::Read>(input: R) -> Result<Vec<StudyRow>> {
        let mut r = csv::Reader::from_reader(input);
        r.deserialize().map(|row| row.map_err(Error::from)).collect()
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    pub fn study(&self, epsilon: f64) -> Option<&EpsilonStudy> {
        self.studies.iter().find(|s| s.epsilon == epsilon)
    }
}

/// Runs the (epsilon, N) grid for `base` (its epsilon is replaced by each
/// value in `cfg.epsilons`) and measures errors against an eXp-mesh reference.
pub fn convergence_study(base: &Problem, cfg: &StudyConfig) -> Result<StudyReport> {
    let n_ref = cfg.validate()?;
    let order = 2 * base.degree();
    let mut studies = Vec::with_capacity(cfg.epsilons.len());
    for &eps in &cfg.epsilons {
        let problem = Problem::new(
            base.coeffs().with_epsilon(eps)?,
            base.degree(),
            Some(base.beta()),
            base.kind(),
        )?;
        let reference = ReferenceSolution::compute(&problem, n_ref, cfg.modes, &cfg.solver)?;
        let ref_modes: Vec<FeFunction> = (0..cfg.modes).map(|i| reference.mode(i)).collect::<Result<_>>()?;
        let width = reference.layer_width();
        let solver = SolverConfig {
            k: cfg.modes,
            ..cfg.solver
        };

        let mut records = Vec::new();
        let mut failures = Vec::new();
        for &n in &cfg.n_list {
            let sol = match problem.solve(n, &solver) {
                Ok(s) => s,
                Err(e) => {
                    failures.push(format!("N = {n}: {e}"));
                    continue;
                }
            };
            let mut modes = Vec::with_capacity(cfg.modes);
            for i in 0..cfg.modes {
                let lambda_h = sol.spectrum.eigenvalues[i];
                let lambda_ref = reference.eigenvalues()[i];
                let mut entry = ModeError {
                    mode: i + 1,
                    lambda_h,
                    lambda_ref,
                    lambda_err_pct: 100.0 * (lambda_h - lambda_ref).abs() / lambda_ref.abs(),
                    energy_err_pct: None,
                    maxnorm_u_pct: None,
                    maxnorm_du_pct: None,
                };
                let clustered = sol.spectrum.clustered[i] || reference.solution.spectrum.clustered[i];
                if cfg.eigenvectors && !clustered {
                    match vector_errors(&sol, i, &ref_modes[i], eps, order, width, cfg.n_per_region) {
                        Ok((e, mu, mdu)) => {
                            entry.energy_err_pct = Some(e);
                            entry.maxnorm_u_pct = Some(mu);
                            entry.maxnorm_du_pct = Some(mdu);
                        }
                        Err(Error::Ambiguous) => {}
                        Err(e) => failures.push(format!("N = {n}, mode {}: {e}", i + 1)),
                    }
                }
                modes.push(entry);
            }
            records.push(ErrorRecord {
                n,
                dof: sol.dof,
                modes,
            });
        }

        let mut study = EpsilonStudy {
            epsilon: eps,
            n_ref,
            lambda_ref: reference.eigenvalues().to_vec(),
            records,
            fits: BTreeMap::new(),
            failures,
        };
        for mode in 1..=cfg.modes {
            for metric in ["lambda", "energy", "maxnorm_u", "maxnorm_du"] {
                let series = study.series(metric, mode);
                if series.len() >= 3 {
                    if let Ok(fit) = fit_slope_asymptotic(&series) {
                        study.fits.insert(format!("{metric}_{mode}"), fit);
                    }
                }
            }
        }
        studies.push(study);
    }
    Ok(StudyReport {
        mesh_kind: base.kind(),
        p: base.degree(),
        studies,
    })
}

fn vector_errors(
    sol: &Solution,
    i: usize,
    u_ref: &FeFunction,
    eps: f64,
    order: usize,
    width: f64,
    n_per_region: usize,
) -> Result<(f64, f64, f64)> {
    let mut u_h = sol.mode(i)?;
    if align_sign(&u_h, u_ref, order)?.factor() < 0.0 {
        u_h = u_h.negated();
    }
    let u_h: &dyn Evaluable = &u_h;
    Ok((
        energy_norm_error(u_h, u_ref, eps, order)?,
        discrete_max_error(u_h, u_ref, width, n_per_region, 0)?,
        discrete_max_error(u_h, u_ref, width, n_per_region, 1)?,
    ))
}
