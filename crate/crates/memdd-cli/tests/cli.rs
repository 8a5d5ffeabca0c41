//! End-to-end tests of the `memdd` binary: exit codes, file outputs,
//! determinism of reruns, and the convergence / sweep workflows.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_memdd"))
}

fn tmp(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

/// Writes a config under the target tmpdir and returns its path.
fn write_cfg(name: &str, body: &str) -> PathBuf {
    let p = tmp(name);
    fs::write(&p, body).unwrap();
    p
}

/// A shipped example config, addressed relative to this crate.
fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Small insulated relaxation that runs in milliseconds.
const QUICK: &str = r#"
[scenario]
kind = "relax"
t_end = 0.01
dt = 1e-3

[mesh]
lx = 1.0
nx = 16

[model]
alpha_n = 1.6666666666666667
alpha_p = 1.6666666666666667
alpha_d = 1.6666666666666667
lambda = 0.7

[initial]
n = { base = 1.0, amplitude = 0.2, mode = 1 }
p = { base = 0.8 }
d = { base = 0.5 }
"#;

#[test]
fn unknown_config_key_is_rejected_by_name() {
    let cfg = write_cfg("unknown_key.toml", &QUICK.replace("dt = 1e-3", "dt = 1e-3\nstep = 4"));
    let out = bin().arg("run").arg(&cfg).arg("--out").arg(tmp("unknown_key_out")).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr_of(&out));
    assert!(stderr_of(&out).contains("step"), "stderr should name the key: {}", stderr_of(&out));
}

#[test]
fn invalid_parameter_is_rejected_by_name() {
    let cfg = write_cfg("bad_alpha.toml", &QUICK.replace("alpha_n = 1.6666666666666667", "alpha_n = 0.9"));
    let out = bin().arg("run").arg(&cfg).arg("--out").arg(tmp("bad_alpha_out")).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr_of(&out));
    assert!(stderr_of(&out).contains("alpha"), "stderr should name the parameter: {}", stderr_of(&out));
}

#[test]
fn missing_config_file_is_a_config_error() {
    let out = bin().arg("run").arg(tmp("no_such_file.toml")).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr_of(&out));
}

#[test]
fn insulated_scenario_rejects_contacts() {
    let body = format!("{QUICK}\n[boundary.left]\nn = 1.0\n");
    let mut with_kind = body.replace("kind = \"relax\"", "kind = \"insulated-energy-test\"");
    with_kind.push('\n');
    let cfg = write_cfg("insulated_contacts.toml", &with_kind);
    let out = bin().arg("run").arg(&cfg).arg("--out").arg(tmp("ic_out")).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr_of(&out));
    assert!(stderr_of(&out).contains("insulated"), "stderr: {}", stderr_of(&out));
}

#[test]
fn check_echoes_effective_config_and_derived_facts() {
    let cfg = write_cfg("check_quick.toml", QUICK);
    let out = bin().arg("check").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    // defaults filled in by the loader show up in the echo
    assert!(text.contains("newton_tol"), "echo misses solver defaults:\n{text}");
    assert!(text.contains("record_every"), "echo misses scenario defaults:\n{text}");
    assert!(text.contains("# grid: 16x1"), "derived grid line missing:\n{text}");
    assert!(text.contains("# potential gauge: all-neumann (zero mean)"), "gauge line missing:\n{text}");
}

#[test]
fn run_writes_records_and_reruns_are_byte_identical() {
    let cfg = repo_config("relax.toml");
    let (out_a, out_b) = (tmp("relax_a"), tmp("relax_b"));
    for dir in [&out_a, &out_b] {
        let out = bin().arg("run").arg(&cfg).arg("--out").arg(dir).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    }
    let records_a = fs::read(out_a.join("records.csv")).unwrap();
    let header = String::from_utf8_lossy(&records_a);
    let header = header.lines().next().unwrap();
    assert_eq!(
        header,
        "step,time,vd_multiplier,newton_iterations,mass_n,mass_p,mass_d,\
         min_n,min_p,min_d,free_energy,dissipation,current_left,current_right"
            .replace(" ", ""),
    );
    for file in ["records.csv", "snapshot_final.csv", "summary.txt"] {
        let a = fs::read(out_a.join(file)).unwrap();
        let b = fs::read(out_b.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}

#[test]
fn insulated_run_passes_all_monitors() {
    let cfg = repo_config("insulated.toml");
    let out = bin().arg("run").arg(&cfg).arg("--out").arg(tmp("insulated_out")).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let summary = fs::read_to_string(tmp("insulated_out").join("summary.txt")).unwrap();
    for mon in ["energy_nonincreasing", "mass_conservation", "nonnegativity"] {
        assert!(summary.contains(&format!("monitor {mon}: PASS")), "summary:\n{summary}");
    }
}

#[test]
fn sweep_summary_reports_a_nonzero_loop_area() {
    let cfg = repo_config("sweep.toml");
    let out = bin().arg("run").arg(&cfg).arg("--out").arg(tmp("sweep_out")).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let summary = fs::read_to_string(tmp("sweep_out").join("summary.txt")).unwrap();
    let area: f64 = summary
        .lines()
        .find_map(|l| l.strip_prefix("loop_area: "))
        .expect("summary should report loop_area")
        .parse()
        .unwrap();
    assert!(area.is_finite() && area.abs() > 1e-4, "loop area {area}");
}

#[test]
fn convergence_study_on_smooth_diffusion_is_second_order() {
    let cfg = repo_config("converge_diffusion.toml");
    let dir = tmp("conv_out");
    let out = bin()
        .arg("converge")
        .arg(&cfg)
        .arg("--levels")
        .arg("3")
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let csv = fs::read_to_string(dir.join("convergence.csv")).unwrap();
    let mut orders = Vec::new();
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        if let Ok(o) = cols[5].parse::<f64>() {
            orders.push(o);
        }
    }
    assert!(!orders.is_empty(), "no order column parsed from:\n{csv}");
    for o in orders {
        assert!(o >= 1.9, "observed order {o}\n{csv}");
    }
}

#[test]
fn exponent_table_prints_and_rejects_out_of_range() {
    let out = bin().arg("exponents").arg("--alpha").arg("1.25").output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.starts_with("alpha,theta,theta_companion,gradient,dual,iteration_fixed_point"));
    assert!(text.contains("1.250000000000"), "table:\n{text}");

    let out = bin().arg("exponents").arg("--alpha").arg("3.5").output().unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr_of(&out));
}
