use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use spinprobe::{ModelParams, SiteValues};
use spinprobe_cli::config::ExperimentConfig;
use spinprobe_cli::presets::{builtin_presets, preset};

fn spinprobe(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinprobe")).args(args).current_dir(dir).output().unwrap()
}

const TRAJECTORY: &str = r#"
output = "traj.csv"

[params]
n = 6
eps0 = 4.0
eps = 2.0
delta = 1.0
omega = 1.0
chi = 0.1
g = 0.3
temperature = 0.8

[trajectory]
mode = "ProjectiveCorrelated"
times = { start = 0.0, stop = 5.0, points = 51 }
"#;

#[test]
fn preset_list_has_seven_entries() {
    let dir = tempfile::tempdir().unwrap();
    let out = spinprobe(&["presets"], dir.path());
    assert!(out.status.success());
    let names: Vec<_> = String::from_utf8(out.stdout).unwrap().lines().map(str::to_owned).collect();
    assert_eq!(names, ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "oracle-check"]);
    assert_eq!(builtin_presets().len(), 7);
}

#[test]
fn preset_parameters_follow_captions() {
    let fig1 = preset("fig1").unwrap().params;
    assert_eq!(fig1, ModelParams { n: 50, g: 0.01, chi: SiteValues::Uniform(0.0), ..ModelParams::default() });
    assert_eq!(preset("fig3").unwrap().params, ModelParams { g: 1.0, ..fig1.clone() });
    let fig4 = preset("fig4").unwrap().params;
    assert_eq!((fig4.n, fig4.chi.as_uniform()), (10, Some(0.1)));
    let fig5 = preset("fig5").unwrap().params;
    assert_eq!((fig5.g, fig5.temperature), (0.1, 1.0));
    let fig6 = preset("fig6").unwrap().params;
    assert_eq!((fig6.g, fig6.temperature), (0.5, 0.5));
}

#[test]
fn empty_mode_list_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = preset("fig1").unwrap().to_toml();
    let text = text.replace(r#"modes = ["PulseCorrelated", "PulseUncorrelated"]"#, "modes = []");
    assert!(text.contains("modes = []"));
    fs::write(dir.path().join("bad.toml"), text).unwrap();
    let out = spinprobe(&["run", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("modes"));
    assert!(!dir.path().join("fig1.csv").exists());
}

#[test]
fn unreadable_inputs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(spinprobe(&["run", "missing.toml"], dir.path()).status.code(), Some(2));
    assert_eq!(spinprobe(&["preset", "fig9"], dir.path()).status.code(), Some(2));
    fs::write(dir.path().join("t.toml"), TRAJECTORY).unwrap();
    let out = spinprobe(&["run", "t.toml", "-o", "no/such/dir/x.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn projection_underflow_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let text = TRAJECTORY
        .replace("eps0 = 4.0", "eps0 = 0.0")
        .replace("g = 0.3", "g = 0.0")
        .replace("temperature = 0.8", "temperature = 5e-4");
    fs::write(dir.path().join("cold.toml"), text).unwrap();
    let out = spinprobe(&["run", "cold.toml"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn reruns_are_bit_identical_and_echo_params() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.toml"), TRAJECTORY).unwrap();
    assert!(spinprobe(&["run", "t.toml"], dir.path()).status.success());
    let first = fs::read(dir.path().join("traj.csv")).unwrap();
    assert!(spinprobe(&["run", "t.toml", "-o", "again.csv"], dir.path()).status.success());
    assert_eq!(first, fs::read(dir.path().join("again.csv")).unwrap());

    let text = String::from_utf8(first).unwrap();
    let mut lines = text.lines();
    let cfg = ExperimentConfig::from_toml(TRAJECTORY).unwrap();
    assert_eq!(ModelParams::from_header_line(lines.next().unwrap()).unwrap(), cfg.params);
    assert_eq!(lines.next(), Some("t,nx,ny,nz,Gamma,phase,mode"));
    assert_eq!(lines.count(), 51);
}

#[test]
fn preset_runs_reproduce() {
    let dir = tempfile::tempdir().unwrap();
    assert!(spinprobe(&["preset", "fig5", "-o", "a.csv"], dir.path()).status.success());
    assert!(spinprobe(&["preset", "fig5", "-o", "b.csv"], dir.path()).status.success());
    let a = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read_to_string(dir.path().join("b.csv")).unwrap());
    assert_eq!(a.lines().count(), 2 + 4 * 2001);
    let header = ModelParams::from_header_line(a.lines().next().unwrap()).unwrap();
    assert_eq!(header, preset("fig5").unwrap().params);
}

#[test]
fn dumped_preset_runs_like_the_preset() {
    let dir = tempfile::tempdir().unwrap();
    let dump = spinprobe(&["dump-preset", "oracle-check"], dir.path());
    assert!(dump.status.success());
    fs::write(dir.path().join("oc.toml"), &dump.stdout).unwrap();
    let out = spinprobe(&["run", "oc.toml"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("oracle-check.csv")).unwrap();
    let rows: Vec<_> = csv.lines().skip(2).collect();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}
