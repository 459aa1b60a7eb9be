use std::fs;
use std::process::{Command, Output};

fn sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dipne-sim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn help_version_and_missing_arguments() {
    assert_eq!(sim(&["--help"]).status.code(), Some(0));
    let v = sim(&["--version"]);
    assert!(String::from_utf8_lossy(&v.stdout).starts_with("dipne-sim "));
    assert_eq!(sim(&[]).status.code(), Some(2));
}

#[test]
fn configuration_errors_exit_with_2() {
    let o = sim(&["nosuch"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("interference"));

    let o = sim(&["gaussdrive", "--r_zero", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown key 'r_zero'"));

    let o = sim(&["gaussdrive", "--r0", "1", "--r0_photons", "0.1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = sim(&["interference", "--phase", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn kitten_cutoff_too_small_suggests_one() {
    let o = sim(&[
        "kitten",
        "--squeeze_photons",
        "10",
        "--ks",
        "5",
        "--cutoff",
        "20",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cutoff"), "{}", stderr(&o));
}

#[test]
fn config_file_overrides_outputs_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("drive.cfg");
    fs::write(
        &config,
        "# strong drive\nd0 = 1\nr = 0:4:5\nr0_photons = 0.1\n",
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let svg = dir.path().join("out.svg");
    let o = sim(&[
        "gaussdrive",
        "--config",
        config.to_str().unwrap(),
        "--r=0,4",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
        "--json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));

    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.contains("# config.r: 0,4"));
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(
        data[0],
        "d0,r0,r,fraction_exact,fraction_strong_limit,ratio_exact,ratio_strong_limit"
    );
    assert_eq!(data.len(), 3);
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["experiment"], "gaussdrive");
    assert_eq!(summary["rows"], 2);
}

#[test]
fn keys_listing() {
    let o = sim(&["match", "--keys"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("source_ks = 1,3,5,7,9"));
}

#[test]
fn oracle_breach_exits_with_3() {
    let o = sim(&[
        "oracle-check",
        "--circuits",
        "5",
        "--cutoff",
        "40",
        "--photon_tolerance",
        "1e-30",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("# status: FAIL"));
}

#[test]
fn unwritable_output_exits_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("out.csv");
    let o = sim(&["gaussdrive", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
