use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_folm");

fn folm(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

/// Rows of a CSV as header-keyed lookups.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn parse(bytes: &[u8]) -> Self {
        let mut r = csv::Reader::from_reader(bytes);
        let header = r.headers().unwrap().iter().map(String::from).collect();
        let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
        Self { header, rows }
    }

    fn column(&self, name: &str) -> Vec<f64> {
        let k = self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[k].parse().unwrap()).collect()
    }
}

fn run_csv(config: &str, extra: &[&str]) -> Table {
    let mut args = vec!["run", config];
    args.extend_from_slice(extra);
    let out = folm(&args);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    Table::parse(&out.stdout)
}

#[test]
fn minimal_config_gives_one_dark_row() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "min.toml", "configuration = \"perpendicular\"\n[state]\nalpha_i_mag = 0.0\n");
    let t = run_csv(&cfg, &[]);
    assert_eq!(t.rows.len(), 1);
    assert!(t.column("p_T_unitary")[0].abs() < 1e-12);
    assert_eq!(t.column("t_mag")[0], std::f64::consts::FRAC_1_SQRT_2);
}

#[test]
fn bad_coupler_is_rejected_by_name() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "bad.toml", "configuration = \"parallel\"\n[coupler]\nt_mag = 0.9\nr_mag = 0.9\n");
    let out = folm(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("coupler"));
}

#[test]
fn unknown_key_is_rejected_with_path() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "typo.toml", "configuration = \"parallel\"\n[sphere]\nradius = 1.0\n");
    let out = folm(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sphere"));
}

#[test]
fn conflicting_coupler_keys_are_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "both.toml", "configuration = \"parallel\"\n[coupler]\nt_sq = 0.5\nt_mag = 0.7\n");
    let out = folm(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("coupler.t_sq"));
}

const DELAY_SWEEP: &str = r#"
configuration = "perpendicular"
[field]
f_m_ghz = 2.5
[state]
alpha_re = 0.3
alpha_i_mag = 0.8
[[sweep]]
path = "timing.delta_t"
start = 0.0
stop = 1e-9
count = 101
"#;

#[test]
fn delay_sweep_has_dark_points_where_the_kick_is_undone() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "delay.toml", DELAY_SWEEP);
    let t = run_csv(&cfg, &[]);
    assert_eq!(t.rows.len(), 101);
    assert_eq!(t.column("sweep_index"), (0..101).map(f64::from).collect::<Vec<_>>());
    let p_t = t.column("p_T_unitary");
    // Period 0.4 ns: cos(w_m dt / 2) = 0 at 0.2, 0.6 and 1.0 ns.
    let dark: Vec<usize> = (0..101).filter(|&k| p_t[k] < 1e-10).collect();
    assert_eq!(dark, vec![20, 60, 100]);
    let purity = t.column("purity_closed_form");
    for k in [20, 60, 100] {
        assert!((purity[k] - 1.0).abs() < 1e-10);
    }
}

#[test]
fn full_collapse_gives_half_everywhere() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "collapse.toml", &format!("collapse_d = 0.0\n{DELAY_SWEEP}"));
    let t = run_csv(&cfg, &[]);
    assert!(t.column("p_T_collapsed").iter().all(|&p| p == 0.5));
}

#[test]
fn oracle_sweep_agrees_with_closed_form() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "oracle.toml",
        r#"
configuration = "perpendicular"
[coupler]
t_sq = 0.7
[state]
alpha_re = 1.0
alpha_im = -0.5
alpha_i_mag = 1.2
[[sweep]]
path = "timing.delta_t"
start = 0.0
stop = 3e-10
count = 5
"#,
    );
    let t = run_csv(&cfg, &["--oracle"]);
    let closed = t.column("purity_closed_form");
    let oracle = t.column("purity_oracle");
    for (c, o) in closed.iter().zip(&oracle) {
        assert!((c - o).abs() < 1e-8, "{c} vs {o}");
    }
}

#[test]
fn two_axis_sweep_is_row_major() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "grid.toml",
        r#"
configuration = "parallel"
[[sweep]]
path = "coupler.t_sq"
start = 0.2
stop = 0.8
count = 3
[[sweep]]
path = "sphere.r_s_um"
start = 50.0
stop = 500.0
count = 4
scale = "log"
"#,
    );
    let t = run_csv(&cfg, &[]);
    assert_eq!(t.rows.len(), 12);
    let t_mag = t.column("t_mag");
    let r_s = t.column("r_s");
    assert!((t_mag[0] - 0.2f64.sqrt()).abs() < 1e-15);
    assert!((t_mag[4] - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((r_s[0] - 50e-6).abs() < 1e-18 && (r_s[3] - 500e-6).abs() < 1e-15);
    assert_eq!(r_s[1], r_s[5]);
}

#[test]
fn json_output_carries_every_column() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "j.toml", DELAY_SWEEP.replace("count = 101", "count = 3").as_str());
    let path = dir.path().join("out.json");
    let out = folm(&["run", &cfg, "--format", "json", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0].as_object().unwrap().len(), folm_cli::table::COLUMNS.len());
    assert!(rows[1]["purity_oracle"].is_null());
    assert_eq!(rows[2]["sweep_index"], 2);
}

#[test]
fn truncation_guard_exits_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "g.toml", "configuration = \"perpendicular\"\n[state]\nalpha_i_mag = 1.5\n");
    let out = folm(&["run", &cfg, "--oracle", "--fock-dim", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sweep index 0"));
}

#[test]
fn defaults_round_trip() {
    let dir = TempDir::new().unwrap();
    for kind in ["parallel", "perpendicular"] {
        let out = folm(&["defaults", "--configuration", kind]);
        assert!(out.status.success());
        let cfg = write_config(&dir, &format!("{kind}.toml"), &String::from_utf8(out.stdout).unwrap());
        let t = run_csv(&cfg, &[]);
        assert_eq!(t.rows.len(), 1);
        let p = t.column("p_T_unitary")[0] + t.column("p_R_unitary")[0];
        assert!((p - 1.0).abs() < 1e-12);
    }
}

#[test]
fn check_passes_and_perturbation_fails() {
    let out = folm(&["check"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 20);

    let out = folm(&["check", "--perturb", "n_f=1.5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL  L_F"));
}

#[test]
fn missing_config_file_exits_one() {
    let out = folm(&["run", Path::new("/nonexistent/x.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
