use std::fs;
use std::path::Path;
use std::process::Command;

use yardstick::cli::{run_config, RunManifest};
use yardstick::config::ExperimentConfig;
use yardstick::evolution::lightcone_fraction;
use yardstick::grid::SpatialGrid;
use yardstick::states::DensityProfile;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_yardstick"))
}

fn read_csv(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn manifest(dir: &Path) -> String {
    fs::read_to_string(dir.join("manifest.txt")).unwrap()
}

fn value(m: &str, key: &str) -> f64 {
    m.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("{key} missing"))
        .parse()
        .unwrap()
}

#[test]
fn fig1_run_writes_curves_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fig1.toml");
    fs::write(&cfg, "scenario = \"FIG1\"\n\n[shape]\nkind = \"box\"\nw = 0.005\n\n[run]\nT = 7.5e-5\n").unwrap();
    let out = dir.path().join("out");
    let st = bin().arg("run").arg(&cfg).env("YARDSTICK_OUT", &out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    for y in ["a", "phi"] {
        for t in ["t0", "tT2", "tT"] {
            assert!(out.join(format!("rho_{y}_{t}.csv")).exists());
        }
    }
    let m = manifest(&out);
    let f = value(&m, "fig1.a.tT2.fraction_outside");
    assert!((f - 0.03).abs() < 0.01);

    // recompute from the data file
    let (header, rows) = read_csv(&out.join("rho_a_tT2.csv"));
    assert_eq!(header, "z,rho");
    let g = SpatialGrid::new(rows.len(), value(&m, "config.grid.z_min"), value(&m, "config.grid.z_max")).unwrap();
    assert!((rows[0][0] - g.z_min()).abs() < 1e-15);
    let d = DensityProfile::new(g, rows.iter().map(|r| r[1]).collect()).unwrap();
    let rep = lightcone_fraction(&d, 0.005, value(&m, "fig1.a.tT2.time"), 137.0).unwrap();
    assert!((rep.fraction_outside - f).abs() < 1e-12);
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let text = "scenario = \"EVOLVE\"\n[grid]\nn_points = 2048\nz_min = -0.1\nz_max = 0.1\n[shape]\nkind = \"gaussian\"\nw = 0.004\n[run]\ntimes = [0.0, 1e-5, 3e-5]\nyardstick = \"FIELD\"\n";
    let cfg = ExperimentConfig::parse(text).unwrap();
    let a = run_config(&cfg, &dir.path().join("a")).unwrap();
    let b = run_config(&cfg, &dir.path().join("b")).unwrap();
    assert_eq!(a.files, b.files);
    for f in a.files.iter().filter(|f| *f != "manifest.txt") {
        assert_eq!(fs::read(a.output_dir.join(f)).unwrap(), fs::read(b.output_dir.join(f)).unwrap(), "{f}");
    }
    let strip = |m: &RunManifest| m.entries().iter().filter(|(k, _)| k != "wall_time_s").cloned().collect::<Vec<_>>();
    assert_eq!(strip(&a.manifest), strip(&b.manifest));
}

#[test]
fn malformed_line_exits_2_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "scenario = \"FIG1\"\n# comment\n[run]\nT 7.5e-5\n").unwrap();
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    fs::write(&cfg, "scenario = \"FIG1\"\ncolour = 3\n").unwrap();
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn precondition_failure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "scenario = \"FIG1\"\n[shape]\nkind = \"box\"\nw = 0.05\n").unwrap();
    let out = bin().arg("run").arg(&cfg).env("YARDSTICK_OUT", dir.path().join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the grid"));
}

#[test]
fn numerical_guard_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    // packets narrower than the grid spacing lose norm when sampled
    fs::write(&cfg, "scenario = \"FIG2\"\n[grid]\nn_points = 64\nz_min = -0.16\nz_max = 0.16\n[run]\nwidths = [0.0025]\n").unwrap();
    let out = bin().arg("run").arg(&cfg).env("YARDSTICK_OUT", dir.path().join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("projection"));
}

#[test]
fn list_shows_six_scenarios() {
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for s in ["FIG1", "FIG2", "FIG3", "EVOLVE", "BOOST", "KERNELS"] {
        assert!(text.lines().any(|l| l.starts_with(s)), "{s}");
    }
}

#[test]
fn fig3_and_kernels_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::parse("scenario = \"FIG3\"\n").unwrap();
    let r = run_config(&cfg, &dir.path().join("f3")).unwrap();
    let right = r.manifest.get_f64("fig3.right_peak").unwrap();
    assert!((right / 1.85e-2 - 1.0).abs() < 0.02);
    assert!(r.manifest.get_f64("fig3.nw_norm_defect").unwrap().abs() < 1e-8);
    let (header, rows) = read_csv(&dir.path().join("f3/rho_boosted.csv"));
    assert_eq!(header, "z,rho");
    assert!(rows.len() > 4096);

    let cfg = ExperimentConfig::parse("scenario = \"KERNELS\"\n").unwrap();
    let r = run_config(&cfg, &dir.path().join("k")).unwrap();
    let (header, rows) = read_csv(&dir.path().join("k/kernels.csv"));
    assert_eq!(header, "s,i_plus,i_minus,v1");
    assert_eq!(rows.len(), 1024);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    assert_eq!(r.manifest.get("kernels.i_plus.singular"), Some("false"));
}

#[test]
fn boost_scenario_by_rapidity() {
    let dir = tempfile::tempdir().unwrap();
    let text = "scenario = \"BOOST\"\n[grid]\nn_points = 1024\nz_min = -0.1\nz_max = 0.1\n[shape]\nkind = \"gaussian\"\nw = 0.005\n[run]\nrapidities = [0.0, 0.5]\n";
    let cfg = ExperimentConfig::parse(text).unwrap();
    let r = run_config(&cfg, dir.path()).unwrap();
    for k in 0..2 {
        assert!(r.manifest.get_f64(&format!("boost.b{k}.norm_defect")).unwrap().abs() < 1e-8);
    }
    assert!(dir.path().join("rho_naive_b1.csv").exists());
}
