//! Command implementations behind the `layereig` binary. Each command takes a
//! [`ProblemConfig`], writes its files under `config.out` and returns the
//! computed data so callers (and tests) can inspect it.

mod config;
mod table1;

pub use config::{parse_expression, CoefficientPreset, ProblemConfig};
pub use table1::{cmd_table1, Table1, MATCHED_COLUMNS, PUBLISHED_DOF, PUBLISHED_EIGENVALUES, TABLE1_N};

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::{convergence_study, fmt_f64, interp_rate_study, InterpStudy, StudyConfig, StudyReport};
use crate::eigensolver::Spectrum;
use crate::error::Result;
use crate::fe::Evaluable;
use crate::mesh::{check_mesh_bounds, Mesh, MeshKind};
use crate::problem::Solution;

/// Equispaced samples per eigenfunction dump (mesh nodes are added).
pub const DUMP_SAMPLES: usize = 2001;

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

#[derive(Serialize)]
struct SpectrumDoc<'a> {
    config: &'a ProblemConfig,
    dof: usize,
    nodes: &'a [f64],
    spectrum: &'a Spectrum,
}

/// Solves one problem and writes `eigenvalues.csv`, `mode_<k>.csv` (columns
/// `x,u,du`) and `spectrum.json`.
pub fn cmd_solve(cfg: &ProblemConfig) -> Result<Solution> {
    let problem = cfg.problem()?;
    let sol = problem.solve(cfg.n, &cfg.solver_config())?;
    let spec = &sol.spectrum;

    let mut w = csv::Writer::from_writer(create(&cfg.out, "eigenvalues.csv")?);
    w.write_record(["mode", "lambda", "residual", "residual_floor", "clustered"])?;
    for i in 0..spec.len() {
        w.write_record([
            (i + 1).to_string(),
            fmt_f64(spec.eigenvalues[i]),
            fmt_f64(spec.residuals[i]),
            fmt_f64(spec.residual_floors[i]),
            spec.clustered[i].to_string(),
        ])?;
    }
    w.flush()?;

    let xs = dump_grid(&sol.mesh);
    for i in 0..spec.len() {
        let u = sol.mode(i)?;
        let mut w = csv::Writer::from_writer(create(&cfg.out, &format!("mode_{}.csv", i + 1))?);
        w.write_record(["x", "u", "du"])?;
        for &x in &xs {
            w.write_record([fmt_f64(x), fmt_f64(u.eval(x, 0)), fmt_f64(u.eval(x, 1))])?;
        }
        w.flush()?;
    }

    let doc = SpectrumDoc {
        config: cfg,
        dof: sol.dof,
        nodes: sol.mesh.nodes(),
        spectrum: spec,
    };
    serde_json::to_writer_pretty(create(&cfg.out, "spectrum.json")?, &doc)?;
    Ok(sol)
}

/// `DUMP_SAMPLES` equispaced points merged with the mesh nodes.
fn dump_grid(mesh: &Mesh) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..DUMP_SAMPLES)
        .map(|i| i as f64 / (DUMP_SAMPLES - 1) as f64)
        .chain(mesh.nodes().iter().copied())
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

pub fn study_config(cfg: &ProblemConfig) -> StudyConfig {
    let mut sc = StudyConfig::new(cfg.epsilons.clone(), cfg.n_list.clone(), cfg.modes);
    sc.ref_n = cfg.ref_n;
    sc.solver = cfg.solver_config();
    sc
}

/// Runs the convergence grid and writes `convergence.csv` and
/// `convergence.json`.
pub fn cmd_convergence(cfg: &ProblemConfig) -> Result<StudyReport> {
    let report = convergence_study(&cfg.problem()?, &study_config(cfg))?;
    report.write_csv(create(&cfg.out, "convergence.csv")?)?;
    report.write_json(create(&cfg.out, "convergence.json")?)?;
    Ok(report)
}

/// Interpolation errors of the left layer function on eXp meshes; writes
/// `interp.csv` and `interp.json`.
pub fn cmd_interp_study(cfg: &ProblemConfig) -> Result<InterpStudy> {
    let beta = match cfg.beta {
        Some(b) => b,
        None => cfg.preset.coefficients(cfg.epsilon)?.default_beta(),
    };
    let study = interp_rate_study(cfg.epsilon, beta, cfg.p, &cfg.n_list)?;
    let mut w = csv::Writer::from_writer(create(&cfg.out, "interp.csv")?);
    w.write_record(["N", "max_err_0", "max_err_1", "h2_scaled"])?;
    for r in &study.rows {
        w.write_record([
            r.n.to_string(),
            fmt_f64(r.max_err_0),
            fmt_f64(r.max_err_1),
            fmt_f64(r.h2_scaled),
        ])?;
    }
    w.flush()?;
    serde_json::to_writer_pretty(create(&cfg.out, "interp.json")?, &study)?;
    Ok(study)
}

/// Writes `mesh.csv` and, for eXp meshes, `bounds.json`.
pub fn cmd_mesh_dump(cfg: &ProblemConfig) -> Result<Mesh> {
    let mesh = cfg.problem()?.mesh(cfg.n)?;
    mesh.write_csv(create(&cfg.out, "mesh.csv")?)?;
    if mesh.kind() == MeshKind::Exp {
        serde_json::to_writer_pretty(create(&cfg.out, "bounds.json")?, &check_mesh_bounds(&mesh)?)?;
    }
    Ok(mesh)
}

/// Output path helper for messages.
pub fn out_file(cfg: &ProblemConfig, name: &str) -> PathBuf {
    cfg.out.join(name)
}
