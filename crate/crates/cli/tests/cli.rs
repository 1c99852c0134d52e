//! End-to-end runs of the `rbill` binary.

use std::path::Path;
use std::process::{Command, Output};

const FIG: &str = "[params]\nenergy_E = 2.5\noffset_h = 2.0\nmass_mu = 2.0\nstiffness_om = 1.0\n";

fn rbill(dir: &Path, config: &str, extra: &[&str]) -> Output {
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_rbill"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(name)).unwrap()
}

#[test]
fn shift_profile_row_at_unit_action() {
    let dir = tempfile::tempdir().unwrap();
    let out = rbill(dir.path(), &format!("{FIG}[command]\ncommand = \"shift-profile\"\ngrid = 20\naction = 1.0\n"), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "shift_profile.csv");
    assert!(csv.starts_with("action_I,f,g,theta_bar,df,dg,dtheta_bar\n"));
    let row: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect::<Vec<f64>>())
        .find(|r| r[0] == 1.0)
        .unwrap();
    assert!((row[1] - 1.3258177).abs() < 1e-7);
    assert!((row[2] + std::f64::consts::PI).abs() < 1e-7);
    assert!((row[3] + 1.8157750).abs() < 1e-7);
    let svg = read(dir.path(), "shift_profile.svg");
    assert!(svg.contains("<polyline") && !svg.contains("<path"));
}

#[test]
fn empty_command_prints_usage_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = rbill(dir.path(), &format!("{FIG}[command]\ncommand = \"\"\n"), &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Usage") && err.contains("shift-profile"));
}

#[test]
fn config_errors_carry_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let out = rbill(dir.path(), &format!("{FIG}[command]\ncommand = \"section\"\nitertions = 3\n"), &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("itertions") && err.contains("line 8"), "{err}");
}

#[test]
fn section_is_deterministic_across_worker_counts() {
    let cfg = format!(
        "{FIG}[profile]\nepsilon = 0.02\nfourier_cos = [0.0, 0.0, 1.0]\n\
         [command]\ncommand = \"section\"\nseeds = [[0.0, 0.5], [1.0, -0.3], [2.0, 1.1]]\niterations = 15\n"
    );
    let runs: Vec<String> = [["--workers", "1"], ["--workers", "2"], ["--workers", "0"]]
        .iter()
        .map(|w| {
            let dir = tempfile::tempdir().unwrap();
            let out = rbill(dir.path(), &cfg, w);
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            read(dir.path(), "section.csv")
        })
        .collect();
    assert!(runs[0].starts_with("seed_id,k,xi,action_I,status\n"));
    assert_eq!(runs[0].lines().count(), 1 + 3 * 16);
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn oracle_check_passes_on_reference_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = rbill(dir.path(), &format!("{FIG}[command]\ncommand = \"oracle-check\"\ngrid = 50\n"), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PASS"));
    assert_eq!(read(dir.path(), "oracle_check.csv").lines().count(), 51);
}

#[test]
fn circular_caustics_and_twist_chart() {
    let dir = tempfile::tempdir().unwrap();
    let out = rbill(dir.path(), &format!("{FIG}[command]\ncommand = \"caustics\"\naction = 1.0\n"), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("R_E = 2.1357792051") && text.contains("R_I = 0.2989350844"), "{text}");
    let outer = read(dir.path(), "caustic_outer.csv");
    for l in outer.lines().skip(1) {
        let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[1].hypot(v[2]) - 2.1357792051).abs() < 1e-9);
    }

    let out = rbill(dir.path(), &format!("{FIG}[command]\ncommand = \"twist\"\ngrid = 100\n"), &[]);
    assert!(out.status.success());
    let crit = read(dir.path(), "twist_critical.csv");
    assert_eq!(crit.lines().count(), 3);
    let chart = read(dir.path(), "twist.csv");
    let signs: Vec<i32> = chart.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(signs.windows(2).filter(|w| w[0] != w[1]).count(), 2);
}
