use std::path::Path;
use std::process::{Command, Output};

fn qmorph(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmorph"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn header(path: &Path) -> Vec<String> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().next().unwrap().split(',').map(String::from).collect()
}

fn rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

fn write_config(dir: &Path, json: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, json).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn spectral_golden_case() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qmorph(&["spectral", "--n-max", "10", "--grid", "1024"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let sigma = rows(&tmp.path().join("sigma.csv"));
    let value: f64 = sigma[0][2].parse().unwrap();
    assert!((value + 1.0).abs() < 1e-6);
    let h = header(&tmp.path().join("spectral.csv"));
    assert!(h.contains(&"error_bound".into()) && h.contains(&"step".into()));
    for svg in ["action_profile.svg", "ratios.svg", "persistence.svg"] {
        assert!(tmp.path().join(svg).exists(), "{svg}");
    }
}

#[test]
fn homogenize_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"target": {"kind": "whole"}, "grid": 512}"#);
    let out = qmorph(&["homogenize", "--config", &cfg, "--n-max", "6"], &tmp.path().join("o"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let h = header(&tmp.path().join("o/homogenize.csv"));
    assert_eq!(
        h,
        ["n", "ell_N", "ell_M", "a_n", "b_n", "a_ratio", "b_ratio", "error_bound", "step"]
    );
    // --n-max overrides the config, which does not set it.
    assert_eq!(rows(&tmp.path().join("o/homogenize.csv")).len(), 6);
}

#[test]
fn flags_override_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"n_max": 50, "x1": 0.25}"#);
    let out = qmorph(&["viterbo", "--config", &cfg, "--n-max", "20"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(rows(&tmp.path().join("viterbo.csv")).len(), 20);
    let summary = rows(&tmp.path().join("summary.csv"));
    assert_eq!(&summary[0][0], "0.25");
}

#[test]
fn counterexample_has_two_clusters() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qmorph(&["counterexample", "--n-max", "1000000"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let clusters = rows(&tmp.path().join("clusters.csv"));
    assert!(clusters.len() >= 2);
    assert!(rows(&tmp.path().join("counterexample.csv")).len() <= 10_001);
}

#[test]
fn dimension_with_gradings() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"grading": {"mu1": "1/2", "mu2": "-3/2", "mu_out": "2", "mu_x": "0", "mu_y": "5/2", "dim_m": 3, "dim_n": 1},
            "trials": 200}"#,
    );
    let out = qmorph(&["dimension", "--config", &cfg], &tmp.path().join("o"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let d = rows(&tmp.path().join("o/dimension.csv"));
    // 1/2 - 3/2 - 2 + 1/2 - 3
    assert_eq!(&d[0][3], "-11/2");
    // Both gluing sides equal 2 dim N - dim M.
    assert_eq!(&d[4][3], "-1");
    assert_eq!(&d[5][3], "-1");

    let bad = write_config(tmp.path(), r#"{"grading": {"mu1": "1/3", "mu2": "0", "mu_out": "0", "mu_x": "0", "mu_y": "0", "dim_m": 1, "dim_n": 0}}"#);
    assert_eq!(qmorph(&["dimension", "--config", &bad], tmp.path()).status.code(), Some(3));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tmp.path();
    assert_eq!(qmorph(&["spectral", "--grid", "-4"], o).status.code(), Some(3));
    assert_eq!(qmorph(&["nonsense"], o).status.code(), Some(3));
    let unknown = write_config(o, r#"{"nmax": 4}"#);
    assert_eq!(qmorph(&["spectral", "--config", &unknown], o).status.code(), Some(3));
    let help = Command::new(env!("CARGO_BIN_EXE_qmorph")).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));

    let steep = write_config(
        o,
        r#"{"hamiltonian": {"kind": "bump", "q0": 0.5, "p0": 0.0, "rq": 0.5, "rp": 10.0, "amplitude": 50.0},
            "target": {"kind": "whole"}, "n_max": 2, "grid": 128}"#,
    );
    assert_eq!(qmorph(&["spectral", "--config", &steep], o).status.code(), Some(2));

    // A 16-point grid cannot locate the maximum to within the spectrality tolerance.
    let coarse = write_config(
        o,
        r#"{"hamiltonian": {"kind": "lifted", "f": {"cos": [0.0, 0.3, 0.2], "sin": [0.5, -0.4]}, "cutoff": {"r0": 20.0, "r1": 21.0}},
            "target": {"kind": "whole"}, "n_max": 2, "grid": 16}"#,
    );
    let out = qmorph(&["spectral", "--config", &coarse], o);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("violation"));
}

#[test]
fn axioms_small_campaign_lists_skips() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"trials": 2, "n_max": 8, "grid": 128}"#);
    let out = qmorph(&["axioms", "--config", &cfg], &tmp.path().join("o"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = rows(&tmp.path().join("o/axioms.csv"));
    let skipped = r.iter().filter(|x| &x[2] == "skipped").count();
    assert_eq!(skipped, 3);
    assert!(r.iter().any(|x| &x[0] == "qm.conjugation-smoke" && &x[2] == "pass"));
}
