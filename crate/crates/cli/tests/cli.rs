use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use coreshape::decomp::{surrogate_loss, CoreShape};
use coreshape::npy::read_npy;
use coreshape::packing::{solve_brute_force, PackingInstance, SolverId};
use coreshape::spectra::mode_sq_singular_values;
use coreshape::synth::gen_synthetic;
use coreshape_cli::commands::{pareto_points, sweep_records};
use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coreshape"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = cli(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn gen(dir: &Path, name: &str, shape: &str, core: &str, noise: &str) -> PathBuf {
    let p = dir.join(name);
    ok(&["gen", "-o", p.to_str().unwrap(), "--shape", shape, "--core", core, "--noise", noise, "--seed", "3"]);
    p
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let x = gen(dir.path(), "x.npy", "6,6,6", "2,2,2", "0.1");
    let xs = x.to_str().unwrap();
    assert_eq!(cli(&["solve", xs, "--budget", "100"]).status.code(), Some(0));
    assert_eq!(cli(&["solve", xs, "--budget", "18"]).status.code(), Some(4));
    assert_eq!(cli(&["solve", xs, "--budget", "100", "--epsilon", "0.4"]).status.code(), Some(2));
    assert_eq!(cli(&["solve", xs, "--budget", "100", "--algo", "simplex"]).status.code(), Some(2));
    assert_eq!(cli(&["solve", xs]).status.code(), Some(2));
    assert_eq!(cli(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));

    let junk = dir.path().join("junk.npy");
    std::fs::write(&junk, b"not a numpy file").unwrap();
    assert_eq!(cli(&["singvals", junk.to_str().unwrap()]).status.code(), Some(3));
    let missing = dir.path().join("missing.npy");
    assert_eq!(cli(&["singvals", missing.to_str().unwrap()]).status.code(), Some(3));

    let inst = dir.path().join("inst.json");
    std::fs::write(&inst, r#"{"dims":[3,3],"budget":16,"values":[[3,2,1],[3,1,1]]}"#).unwrap();
    let is = inst.to_str().unwrap();
    assert_eq!(cli(&["solve", is, "--algo", "rre-greedy"]).status.code(), Some(2));
    assert_eq!(cli(&["solve", is, "--budget", "6"]).status.code(), Some(4));
    std::fs::write(&inst, r#"{"dims":[3,3],"budget":16,"values":[[1,2,3],[3,1,1]]}"#).unwrap();
    assert_eq!(cli(&["solve", is]).status.code(), Some(3));
    std::fs::write(&inst, "{").unwrap();
    assert_eq!(cli(&["solve", is]).status.code(), Some(3));
}

#[test]
fn brute_force_solve_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let x = gen(dir.path(), "x.npy", "6,6,6", "3,2,2", "0.2");
    let out: Value = serde_json::from_str(&ok(&["solve", x.to_str().unwrap(), "--budget", "200", "--algo", "brute"])).unwrap();
    let tensor = read_npy(&x).unwrap();
    let inst = PackingInstance::from_spectra(&mode_sq_singular_values(&tensor), 200).unwrap();
    let s = solve_brute_force(&inst).unwrap();
    let shape: Vec<usize> = serde_json::from_value(out["shape"].clone()).unwrap();
    assert_eq!(shape, s.shape.0);
    assert_eq!(out["objective"].as_f64().unwrap(), s.objective);
    assert_eq!(out["solver"], "brute");
    assert!(out["cost"].as_u64().unwrap() <= 200);
}

#[test]
fn every_algo_produces_a_feasible_shape() {
    let dir = tempfile::tempdir().unwrap();
    let x = gen(dir.path(), "x.npy", "5,6,4", "2,2,2", "0.1");
    for algo in ["ip", "greedy", "bang", "brute", "grid", "rre-greedy"] {
        let out: Value =
            serde_json::from_str(&ok(&["solve", x.to_str().unwrap(), "--budget", "80", "--algo", algo, "--hooi-iters", "3"]))
                .unwrap();
        assert!(out["cost"].as_u64().unwrap() <= 80, "{algo}");
        assert_eq!(out["solver"], algo);
    }
}

#[test]
fn rre_greedy_reports_its_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let x = gen(dir.path(), "x.npy", "6,6,6", "2,2,2", "0");
    let out: Value = serde_json::from_str(&ok(&[
        "solve", x.to_str().unwrap(), "--budget", "80", "--algo", "rre-greedy", "--hooi-iters", "5", "--with-rre",
    ]))
    .unwrap();
    let steps = out["trajectory"].as_array().unwrap();
    assert_eq!(steps[0]["shape"], serde_json::json!([1, 1, 1]));
    let exact = steps
        .iter()
        .find(|s| s["rre"].as_f64().unwrap() <= 1e-9)
        .expect("exact rank reached");
    let shape: Vec<usize> = serde_json::from_value(exact["shape"].clone()).unwrap();
    assert!(shape.iter().all(|&k| k <= 2));
    assert_eq!(out["rre"], steps.last().unwrap()["rre"]);
}

#[test]
fn sweep_records_satisfy_complement_identity() {
    let x = gen_synthetic(&[8, 7, 6], &[3, 3, 2], 0.1, 4).unwrap();
    let s = mode_sq_singular_values(&x);
    let total = x.fro_norm_sq();
    let algos = [SolverId::BruteForce, SolverId::BudgetSplit, SolverId::Greedy, SolverId::Grid];
    let rows = sweep_records(&x, &[30, 60, 120, 300], &algos, 0.25, false, 5).unwrap();
    assert_eq!(rows.len(), 16);
    for r in &rows {
        let surrogate = surrogate_loss(&s, &r.shape).unwrap();
        let sum = r.objective + surrogate;
        assert!((sum - 3.0 * total).abs() <= 1e-8 * 3.0 * total);
        assert!((r.surrogate_rre - surrogate / total).abs() <= 1e-15);
        assert!(r.shape.tucker_size(x.shape()) <= r.budget as u128);
        assert_eq!(r.hooi_rre, None);
    }
    // rows sorted by (budget, algo) and ip within its guarantee of brute force
    for w in rows.windows(2) {
        assert!((w[0].budget, w[0].algo) < (w[1].budget, w[1].algo));
    }
    for chunk in rows.chunks(4) {
        let ip = chunk.iter().find(|r| r.algo == SolverId::BudgetSplit).unwrap();
        let brute = chunk.iter().find(|r| r.algo == SolverId::BruteForce).unwrap();
        assert!(ip.shape == brute.shape || ip.objective >= 0.25 * brute.objective);
    }
}

#[test]
fn sweep_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let x = gen(dir.path(), "x.npy", "6,5,4", "2,2,2", "0.1");
    let csv = ok(&["sweep", x.to_str().unwrap(), "--budgets", "40,80", "--algos", "greedy,ip"]);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "budget,algo,shape,objective,surrogate_rre,hooi_rre,spectra_ms,solve_ms"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!((rows[0][0], rows[0][1]), ("40", "ip"));
    assert_eq!((rows[1][0], rows[1][1]), ("40", "greedy"));
    assert!(rows.iter().all(|r| r[5].is_empty()));

    let csv = ok(&["sweep", x.to_str().unwrap(), "--budgets", "80", "--with-rre", "--hooi-iters", "2"]);
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert!(row[5].parse::<f64>().is_ok());

    assert_eq!(cli(&["sweep", x.to_str().unwrap(), "--budgets", "80,40"]).status.code(), Some(2));
    assert_eq!(cli(&["sweep", x.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(cli(&["sweep", x.to_str().unwrap(), "--geometric", "10:100"]).status.code(), Some(2));
}

#[test]
fn pareto_frontier_properties() {
    let x = gen_synthetic(&[6, 6, 5], &[3, 3, 3], 0.2, 5).unwrap();
    let budgets = [20, 40, 80, 160, 400];
    let algos = [SolverId::BruteForce, SolverId::BudgetSplit];
    let points = pareto_points(&x, &budgets, &algos, None, 0.25, 20).unwrap();
    assert_eq!(points.len(), budgets.len() * algos.len());
    let brute: Vec<_> = points.iter().filter(|p| p.algo == SolverId::BruteForce).collect();
    for w in brute.windows(2) {
        assert!(w[1].rre <= w[0].rre + 1e-8, "{} → {}", w[0].rre, w[1].rre);
    }
    // budget 400 admits the full shape, whose size exceeds the tensor itself
    let full = brute.last().unwrap();
    assert_eq!(full.shape, CoreShape(vec![6, 6, 5]));
    assert!(full.compression_rate > 1.0);
    assert!(full.rre <= 1e-10);

    let capped = pareto_points(&x, &[400], &[SolverId::BruteForce], Some(&[2]), 0.25, 5).unwrap();
    assert_eq!(capped[0].shape, CoreShape(vec![2, 2, 2]));
    assert!(pareto_points(&x, &[400], &algos, Some(&[2, 2]), 0.25, 5).is_err());
}

#[test]
fn rre_and_singvals_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let x = gen(dir.path(), "x.npy", "5,4,3", "2,2,2", "0.1");
    let xs = x.to_str().unwrap();
    let out: Value = serde_json::from_str(&ok(&["rre", xs, "--shape", "2,2,2", "--hooi-iters", "7"])).unwrap();
    assert_eq!(out["shape"], serde_json::json!([2, 2, 2]));
    assert_eq!(out["iters"], 7);
    assert!(out["rre"].as_f64().unwrap() <= out["hosvd_rre"].as_f64().unwrap() + 1e-12);
    assert_eq!(cli(&["rre", xs, "--shape", "2,2"]).status.code(), Some(2));

    let out: Value = serde_json::from_str(&ok(&["singvals", xs])).unwrap();
    let modes = out.as_array().unwrap();
    assert_eq!(modes.len(), 3);
    assert_eq!(modes[0]["mode"], 1);
    assert_eq!(modes[2]["sq_singular_values"].as_array().unwrap().len(), 3);
}

#[test]
fn gen_presets_and_tree_command() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("coil.npy");
    let out: Value =
        serde_json::from_str(&ok(&["gen", "-o", x.to_str().unwrap(), "--preset", "coil-mini"])).unwrap();
    assert_eq!(out["synthetic"], true);
    assert_eq!(read_npy(&x).unwrap().shape(), &[72, 32, 32, 3]);
    assert_eq!(cli(&["gen", "-o", x.to_str().unwrap(), "--preset", "nope"]).status.code(), Some(2));

    let y = gen(dir.path(), "y.npy", "4,4,4,4", "2,2,2,2", "0.1");
    let out: Value =
        serde_json::from_str(&ok(&["tree", y.to_str().unwrap(), "--budget", "100"])).unwrap();
    assert!(out["cost"].as_u64().unwrap() <= 100);
    assert_eq!(out["ranks"].as_object().unwrap().len(), 6);
    assert_eq!(cli(&["tree", y.to_str().unwrap(), "--budget", "10"]).status.code(), Some(4));
}
