//! End-to-end runs of the `ibkit` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ibkit(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ibkit"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn header(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .next()
        .unwrap_or_default()
        .to_string()
}

const MEMBRANE: &[&str] = &[
    "membrane-eq",
    "--grid-n",
    "16",
    "--t-final",
    "0.05",
    "--kernel",
    "bs3bs2",
];

#[test]
fn membrane_run_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = ibkit(MEMBRANE, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        header(&dir.path().join("membrane-eq_bs3bs2.csv")),
        "step,t,rel_area_err,max_vorticity,max_velocity,force_l2_err"
    );
    assert_eq!(
        header(&dir.path().join("membrane-eq_bs3bs2_forces.csv")),
        "k,s,force_err"
    );
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("membrane-eq_bs3bs2.json")).unwrap()).unwrap();
    assert_eq!(manifest["schema_version"], 1);
    assert_eq!(manifest["config"]["grid_n"], 16);
    assert_eq!(manifest["config"]["kernel"], "bs3bs2");
}

#[test]
fn existing_output_is_not_overwritten() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ibkit(MEMBRANE, dir.path()).status.success());
    let csv = dir.path().join("membrane-eq_bs3bs2.csv");
    fs::write(&csv, "sentinel\n").unwrap();
    let again = ibkit(MEMBRANE, dir.path());
    assert!(!again.status.success());
    assert_eq!(fs::read_to_string(&csv).unwrap(), "sentinel\n");
    let mut forced = MEMBRANE.to_vec();
    forced.push("--overwrite");
    assert!(ibkit(&forced, dir.path()).status.success());
    assert_ne!(fs::read_to_string(&csv).unwrap(), "sentinel\n");
}

#[test]
fn runs_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(ibkit(MEMBRANE, a.path()).status.success());
    assert!(ibkit(MEMBRANE, b.path()).status.success());
    for name in ["membrane-eq_bs3bs2.csv", "membrane-eq_bs3bs2_forces.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn config_file_is_applied() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "experiment = \"lte\"\ngrid_n = 16\n").unwrap();
    let out = ibkit(&["lte", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("lte_bs2bs1_forward-euler.csv");
    assert_eq!(header(&csv), "h,dt,area_error");
    let first = fs::read_to_string(&csv).unwrap().lines().nth(1).unwrap().to_string();
    let h: f64 = first.split(',').next().unwrap().parse().unwrap();
    assert_eq!(h, 1.0 / 16.0);
}

#[test]
fn bad_configuration_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "grid_n = 16\nunknown_key = 3\n").unwrap();
    let cases: [&[&str]; 4] = [
        &["lte", "--config", cfg.to_str().unwrap()],
        &["membrane-eq", "--grid-n", "100"],
        &["membrane-eq", "--method", "dfib", "--kernel", "ib4"],
        &["advect", "--kernel", "gauss"],
    ];
    for args in cases {
        let out = ibkit(args, dir.path());
        assert!(!out.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"), "{args:?}");
    }
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}
