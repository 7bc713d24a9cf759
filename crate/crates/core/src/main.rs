use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use layereig::cli::{self, ProblemConfig};
use layereig::eigensolver::Method;
use layereig::error::{exit_code, Result};
use layereig::mesh::MeshKind;

#[derive(Parser)]
#[command(name = "layereig", version, about = "Hermite FEM eigenpairs of singularly perturbed fourth-order problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and dump eigenvalues and eigenfunctions.
    Solve(Opts),
    /// Error tables and fitted rates over an (epsilon, N) grid.
    Convergence(Opts),
    /// Interpolation error rates of a layer function on eXp meshes.
    InterpStudy(Opts),
    /// Recompute the eps = 1e-6, p = 3 eigenvalue table.
    Table1(Opts),
    /// Write mesh nodes (and eXp bound checks).
    MeshDump(Opts),
}

#[derive(Args)]
struct Opts {
    /// Flat `key = value` file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    mesh: Option<MeshKind>,
    #[arg(long)]
    modes: Option<usize>,
    /// exp-x, const-one or custom.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    a_expr: Option<String>,
    #[arg(long)]
    b_expr: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    shift: Option<f64>,
    /// dense-reduce or shift-invert.
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reference resolution for convergence studies.
    #[arg(long)]
    ref_n: Option<usize>,
    /// Comma-separated N values.
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    /// Comma-separated epsilon values.
    #[arg(long, value_delimiter = ',')]
    epsilons: Option<Vec<f64>>,
}

impl Opts {
    fn config(&self) -> Result<ProblemConfig> {
        let mut cfg = match &self.config {
            Some(path) => ProblemConfig::from_file(path)?,
            None => ProblemConfig::default(),
        };
        if let Some(v) = self.epsilon {
            cfg.epsilon = v;
        }
        if self.beta.is_some() {
            cfg.beta = self.beta;
        }
        if let Some(v) = self.p {
            cfg.p = v;
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.mesh {
            cfg.mesh = v;
        }
        if let Some(v) = self.modes {
            cfg.modes = v;
        }
        if let Some(v) = self.tol {
            cfg.solver.tol = v;
        }
        if let Some(v) = self.max_iter {
            cfg.solver.max_iter = v;
        }
        if let Some(v) = self.shift {
            cfg.solver.shift = v;
        }
        if let Some(v) = self.method {
            cfg.solver.method = v;
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        if self.ref_n.is_some() {
            cfg.ref_n = self.ref_n;
        }
        if let Some(v) = &self.n_list {
            cfg.n_list = v.clone();
        }
        if let Some(v) = &self.epsilons {
            cfg.epsilons = v.clone();
        }
        cfg.set_coefficients(self.preset.as_deref(), self.a_expr.as_deref(), self.b_expr.as_deref())?;
        Ok(cfg)
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Solve(o) => {
            let cfg = o.config()?;
            let sol = cli::cmd_solve(&cfg)?;
            println!(
                "{} mesh, N = {}, p = {}, eps = {:e}, {} DOF",
                cfg.mesh, cfg.n, cfg.p, cfg.epsilon, sol.dof
            );
            for (i, lam) in sol.spectrum.eigenvalues.iter().enumerate() {
                let flag = if sol.spectrum.clustered[i] { "  (clustered)" } else { "" };
                println!(
                    "  lambda_{:<2} = {:>22.15}   residual {:.2e}{flag}",
                    i + 1,
                    lam,
                    sol.spectrum.residuals[i]
                );
            }
            println!("wrote {}", cfg.out.display());
        }
        Command::Convergence(o) => {
            let cfg = o.config()?;
            let report = cli::cmd_convergence(&cfg)?;
            for st in &report.studies {
                println!("eps = {:e} (reference N = {})", st.epsilon, st.n_ref);
                for (key, fit) in &st.fits {
                    println!("  {key:<14} slope {:>7.3}  (rms {:.3})", fit.slope, fit.residual);
                }
                for f in &st.failures {
                    println!("  failed: {f}");
                }
            }
            println!("wrote {}", cli::out_file(&cfg, "convergence.csv").display());
        }
        Command::InterpStudy(o) => {
            let cfg = o.config()?;
            let st = cli::cmd_interp_study(&cfg)?;
            println!("eps = {:e}, beta = {}, p = {}", st.epsilon, st.beta, st.p);
            for r in &st.rows {
                println!(
                    "  N = {:>5}  |e|_inf {:.3e}  |e'|_inf {:.3e}  eps^1/2 |e|_2 {:.3e}",
                    r.n, r.max_err_0, r.max_err_1, r.h2_scaled
                );
            }
            println!(
                "  orders: {:.3} (value), {:.3} (slope), {:.3} (H2)",
                st.order_0(),
                st.order_1(),
                st.order_h2()
            );
        }
        Command::Table1(o) => {
            let cfg = o.config()?;
            let table = cli::cmd_table1(&cfg)?;
            print!("{table}");
            println!("wrote {}", cli::out_file(&cfg, "table1.csv").display());
        }
        Command::MeshDump(o) => {
            let cfg = o.config()?;
            let mesh = cli::cmd_mesh_dump(&cfg)?;
            println!(
                "{} mesh, N = {}, max width {:.3e}",
                mesh.kind(),
                mesh.n_elements(),
                mesh.max_width()
            );
            println!("wrote {}", cli::out_file(&cfg, "mesh.csv").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::from(exit_code::SUCCESS as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

