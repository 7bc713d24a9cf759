use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use layereig::cli::{cmd_convergence, ProblemConfig};
use layereig::error::exit_code;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_layereig"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn solve_roundtrips_through_config_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let cfg_path = dir.path().join("problem.cfg");
    fs::write(
        &cfg_path,
        "# test problem\nepsilon = 1e-4\nmesh = shishkin\nn = 24\nmodes = 3\na_expr = 1 + x^2\nb_expr = 2*x\n",
    )
    .unwrap();
    let o = run(&[
        "solve",
        "--config",
        cfg_path.to_str().unwrap(),
        "--n",
        "16",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    // The flag wins over the file; everything else comes from the file.
    let mut cfg = ProblemConfig::from_file(&cfg_path).unwrap();
    cfg.n = 16;
    let sol = cfg.problem().unwrap().solve(cfg.n, &cfg.solver_config()).unwrap();
    let rows = read_csv(&out.join("eigenvalues.csv"));
    assert_eq!(rows.len(), 3);
    for (row, lam) in rows.iter().zip(&sol.spectrum.eigenvalues) {
        assert_eq!(row[1].parse::<f64>().unwrap().to_bits(), lam.to_bits());
    }

    let mode = read_csv(&out.join("mode_1.csv"));
    assert!(mode.len() >= 2001);
    let xs: Vec<f64> = mode.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(xs.windows(2).all(|w| w[1] > w[0]));
    for x in sol.mesh.nodes() {
        assert!(xs.contains(x));
    }
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("spectrum.json")).unwrap()).unwrap();
    assert_eq!(json["dof"].as_u64().unwrap() as usize, sol.dof);
}

#[test]
fn convergence_csv_reparses_to_the_same_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ProblemConfig {
        epsilons: vec![1e-3, 1e-6],
        n_list: vec![8, 16, 32],
        modes: 2,
        ref_n: Some(128),
        out: dir.path().to_path_buf(),
        ..ProblemConfig::default()
    };
    let report = cmd_convergence(&cfg).unwrap();
    let rows = layereig::analysis::StudyReport::read_csv_rows(fs::File::open(dir.path().join("convergence.csv")).unwrap())
        .unwrap();
    assert_eq!(rows, report.rows());
    assert!(dir.path().join("convergence.json").exists());
}

#[test]
fn table1_mesh_dump_and_interp_commands_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&["table1", "--out", d]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("16.6801"));
    assert_eq!(read_csv(&dir.path().join("table1.csv")).len(), 35);

    let o = run(&["mesh-dump", "--n", "16", "--epsilon", "1e-6", "--out", d]);
    assert!(o.status.success());
    assert_eq!(read_csv(&dir.path().join("mesh.csv")).len(), 17);
    assert!(dir.path().join("bounds.json").exists());

    let o = run(&["interp-study", "--epsilon", "1e-4", "--n-list", "16,32,64", "--out", d]);
    assert!(o.status.success());
    assert_eq!(read_csv(&dir.path().join("interp.csv")).len(), 3);
}

#[test]
fn failures_map_to_documented_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let code = |args: &[&str]| run(args).status.code().unwrap();

    assert_eq!(code(&["solve", "--n", "8", "--modes", "100", "--out", d]), exit_code::K_TOO_LARGE);
    assert_eq!(code(&["solve", "--n", "6", "--out", d]), exit_code::INVALID_SPEC);
    assert_eq!(code(&["solve", "--n", "40", "--epsilon", "0.2", "--out", d]), exit_code::REGION_OVERLAP);
    assert_eq!(
        code(&["interp-study", "--epsilon", "1e-2", "--n-list", "16,32,128", "--out", d]),
        exit_code::ASSUMPTION_VIOLATED
    );
    assert_eq!(
        code(&["solve", "--n", "64", "--method", "shift-invert", "--max-iter", "1", "--out", d]),
        exit_code::NO_CONVERGENCE
    );
    assert_eq!(code(&["solve", "--preset", "nonsense", "--out", d]), exit_code::INVALID_SPEC);
    assert_ne!(code(&["solve", "--bogus"]), 0);
}
