//! Batch runner behind the `yardstick` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use thiserror::Error;

use crate::boost::{
    boost_field, boost_nw, boost_output_grid, naive_lorentz_density_on, predicted_peaks, BoostParams,
};
use crate::config::{ConfigError, ExperimentConfig, Scenario};
use crate::dispersion::KernelTable;
use crate::error::Error;
use crate::evolution::{evolve_free, lightcone_fraction_about};
use crate::grid::{RealField, SpatialGrid};
use crate::interaction::{
    asymmetry_metric, cutoff_sensitivity, initial_density, r_free_quadratic, r_int_unguarded, TwoParticleConfig,
    MAX_CUTOFF_CHANGE,
};
use crate::peaks::dominant_peaks;
use crate::states::{convert_yardstick, density, make_packet, DensityProfile, WavePacket, Yardstick};

pub const OUTPUT_ENV: &str = "YARDSTICK_OUT";
pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid configuration: {0}")]
    Precondition(Error),
    #[error("numerical guard tripped: {0}")]
    Guard(Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical_guard() {
            CliError::Guard(e)
        } else {
            CliError::Precondition(e)
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Guard(_) => 3,
            _ => 2,
        }
    }
}

/// Ordered `key = value` summary of a run.
#[derive(Clone, Debug, Default)]
pub struct RunManifest {
    entries: Vec<(String, String)>,
}

impl RunManifest {
    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    fn text(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.push((key.into(), value.into()));
    }

    fn num(&mut self, key: impl Into<String>, v: f64) {
        self.text(key, fmt_num(v));
    }

    fn list(&mut self, key: impl Into<String>, v: &[f64]) {
        self.text(key, v.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(","));
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

struct Writer {
    dir: PathBuf,
    files: Vec<String>,
}

impl Writer {
    fn new(dir: PathBuf) -> Result<Self, CliError> {
        fs::create_dir_all(&dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
        Ok(Writer { dir, files: Vec::new() })
    }

    fn columns(&mut self, name: &str, header: &[&str], z: &[f64], cols: &[&[f64]]) -> Result<(), CliError> {
        let mut s = String::with_capacity(z.len() * 25 * (cols.len() + 1));
        s.push_str(&header.join(","));
        s.push('\n');
        for (i, zi) in z.iter().enumerate() {
            s.push_str(&fmt_num(*zi));
            for c in cols {
                s.push(',');
                s.push_str(&fmt_num(c[i]));
            }
            s.push('\n');
        }
        self.put(name, &s)
    }

    fn density(&mut self, name: &str, d: &DensityProfile) -> Result<(), CliError> {
        self.columns(name, &["z", "rho"], d.grid().positions(), &[d.values()])
    }

    fn field(&mut self, name: &str, col: &str, f: &RealField) -> Result<(), CliError> {
        self.columns(name, &["z", col], f.grid().positions(), &[f.values()])
    }

    fn put(&mut self, name: &str, s: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, s).map_err(|source| CliError::Io { path, source })?;
        self.files.push(name.to_string());
        Ok(())
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub output_dir: PathBuf,
    pub manifest: RunManifest,
    pub files: Vec<String>,
}

/// Loads `path`, runs the scenario and writes data files plus the manifest.
/// The output directory may be overridden through [`OUTPUT_ENV`].
pub fn run(path: &Path) -> Result<RunOutcome, CliError> {
    let cfg = ExperimentConfig::load(path)?;
    let env = std::env::var_os(OUTPUT_ENV).map(PathBuf::from);
    run_config(&cfg, &cfg.output_dir(env))
}

pub fn run_config(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let grid = cfg.grid();
    let g = SpatialGrid::new(grid.n_points, grid.z_min, grid.z_max).map_err(CliError::Precondition)?;
    cfg.params().validate().map_err(CliError::Precondition)?;
    if let Some(s) = cfg.shape() {
        s.shape().validate_on(&g).map_err(CliError::Precondition)?;
    }
    let mut w = Writer::new(out.to_path_buf())?;
    let mut m = RunManifest::default();
    for (k, v) in cfg.echo() {
        m.text(k, v);
    }
    match cfg.scenario {
        Scenario::Fig1 => fig1(cfg, &g, &mut w, &mut m)?,
        Scenario::Fig2 => fig2(cfg, &g, &mut w, &mut m)?,
        Scenario::Fig3 => fig3(cfg, &g, &mut w, &mut m)?,
        Scenario::Evolve => evolve(cfg, &g, &mut w, &mut m)?,
        Scenario::Boost => boost(cfg, &g, &mut w, &mut m)?,
        Scenario::Kernels => kernels(cfg, &g, &mut w, &mut m)?,
    }
    m.text("files", w.files.join(","));
    m.text("tool_version", env!("CARGO_PKG_VERSION"));
    m.text("wall_time_s", format!("{:.3}", start.elapsed().as_secs_f64()));
    w.put(MANIFEST_FILE, &m.render())?;
    Ok(RunOutcome { output_dir: w.dir.clone(), files: w.files, manifest: m })
}

fn packet(cfg: &ExperimentConfig, g: &Arc<SpatialGrid>) -> Result<WavePacket, CliError> {
    let s = cfg.shape().expect("shape checked at load");
    make_packet(&s.shape(), g, &cfg.params()).map_err(CliError::Precondition)
}

fn fig1(cfg: &ExperimentConfig, g: &Arc<SpatialGrid>, w: &mut Writer, m: &mut RunManifest) -> Result<(), CliError> {
    let t_final = cfg.t_final();
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(CliError::Config(ConfigError::Invalid(format!("run.T must be positive, got {t_final}"))));
    }
    let shape = cfg.shape().unwrap();
    let nw = packet(cfg, g)?;
    let phi = convert_yardstick(&nw, Yardstick::Field)?;
    let c = cfg.params().c;
    m.num("fig1.T", t_final);
    for (label, t) in [("t0", 0.0), ("tT2", 0.5 * t_final), ("tT", t_final)] {
        for (yname, p) in [("a", &nw), ("phi", &phi)] {
            let d = density(&evolve_free(p, t)?, true);
            let rep = lightcone_fraction_about(&d, shape.center, shape.w, t, c)?;
            w.density(&format!("rho_{yname}_{label}.csv"), &d)?;
            m.num(format!("fig1.{yname}.{label}.time"), t);
            m.num(format!("fig1.{yname}.{label}.fraction_outside"), rep.fraction_outside);
            m.list(format!("fig1.{yname}.{label}.peaks"), &rep.peak_positions);
        }
    }
    Ok(())
}

fn fig2(cfg: &ExperimentConfig, g: &Arc<SpatialGrid>, w: &mut Writer, m: &mut RunManifest) -> Result<(), CliError> {
    let (x, y) = cfg.centers();
    let mid = 0.5 * (x + y);
    let widths = cfg.widths();
    let t = cfg.run.t.unwrap_or(0.0);
    let mut mids = Vec::new();
    let mut dens = Vec::new();
    for (k, &width) in widths.iter().enumerate() {
        let tp = TwoParticleConfig::new(width, x, y, cfg.params(), g.clone())?;
        let change = cutoff_sensitivity(&tp)?;
        if change > MAX_CUTOFF_CHANGE {
            return Err(Error::CutoffInstability(change).into());
        }
        let rho0 = initial_density(&tp);
        let rf = r_free_quadratic(&tp)?;
        let ri = r_int_unguarded(&tp)?;
        let lam = cfg.params().lambda;
        let rho: Vec<f64> = (0..g.n_points())
            .map(|i| rho0.values()[i] + t * t * (rf.values()[i] + lam * ri.values()[i]))
            .collect();
        let rho = RealField::new(g.clone(), rho)?;
        w.density(&format!("rho0_w{k}.csv"), &rho0)?;
        w.field(&format!("r_free_w{k}.csv"), "r_free", &rf)?;
        w.field(&format!("r_int_w{k}.csv"), "r_int", &ri)?;
        w.field(&format!("rho_t_w{k}.csv"), "rho", &rho)?;
        let p = format!("fig2.w{k}");
        let at_mid = ri.interpolate(mid).unwrap_or(0.0);
        let between: Vec<f64> = g.positions().iter().zip(ri.values()).filter(|(z, _)| **z > x && **z < y).map(|(_, v)| *v).collect();
        let positive = between.iter().filter(|v| **v > 0.0).count() as f64 / between.len().max(1) as f64;
        let half = 0.5 * (y - x).abs();
        m.num(format!("{p}.width"), width);
        m.num(format!("{p}.r_int_mid"), at_mid);
        m.num(format!("{p}.r_int_integral"), ri.integral());
        m.num(format!("{p}.r_free_integral"), rf.integral());
        m.num(format!("{p}.rho0_mid"), rho0.interpolate(mid));
        m.num(format!("{p}.asymmetry_x"), asymmetry_metric(&ri, x, half)?);
        m.num(format!("{p}.positive_fraction_between"), positive);
        m.num(format!("{p}.cutoff_change"), change);
        m.num(format!("{p}.t"), t);
        m.num(format!("{p}.norm_defect"), rho.integral() - 2.0);
        mids.push(at_mid);
        dens.push(rho0.interpolate(mid));
    }
    if mids.len() >= 2 {
        m.num("fig2.r_int_mid_ratio", mids[0] / mids[1]);
        m.num("fig2.rho0_mid_ratio", dens[0] / dens[1]);
    }
    Ok(())
}

fn peak_positions(d: &DensityProfile, k: usize) -> Vec<f64> {
    dominant_peaks(d.grid(), d.values(), k).iter().map(|p| p.z).collect()
}

fn fig3(cfg: &ExperimentConfig, g: &Arc<SpatialGrid>, w: &mut Writer, m: &mut RunManifest) -> Result<(), CliError> {
    let shape = cfg.shape().unwrap();
    let pr = cfg.params();
    let nw = packet(cfg, g)?;
    let v = cfg.velocities()[0];
    let b = BoostParams::from_velocity(&pr, v)?;
    let rest = density(&nw, true);
    let boosted = boost_nw(&nw, &b)?;
    let out = boosted.grid().clone();
    let rho_b = density(&boosted, false);
    let naive = naive_lorentz_density_on(&nw, &b, &out)?;
    let phi = convert_yardstick(&nw, Yardstick::Field)?;
    let half = cfg.field_window();
    let phi_b = boost_field(&phi, &b, Some((shape.center - half, shape.center + half)))?;
    let rho_phi = density(&phi, false);
    let rho_phi_b = density(&phi_b, false);
    w.density("rho_rest.csv", &rest)?;
    w.density("rho_boosted.csv", &rho_b)?;
    w.density("rho_naive.csv", &naive)?;
    w.density("rho_phi_rest.csv", &rho_phi)?;
    w.density("rho_phi_boosted.csv", &rho_phi_b)?;
    let peaks = peak_positions(&rho_b, 4);
    let pred = predicted_peaks(shape.center - shape.w, shape.center + shape.w, b.theta)?;
    m.num("fig3.v", v);
    m.num("fig3.theta", b.theta);
    m.list("fig3.peaks", &peaks);
    m.list("fig3.predicted_peaks", &pred);
    m.num("fig3.right_peak", peaks.last().copied().unwrap_or(f64::NAN));
    m.num("fig3.nw_norm_defect", rho_b.integral() - 1.0);
    m.num("fig3.phi_norm_rest", rho_phi.integral());
    m.num("fig3.phi_norm_boosted", rho_phi_b.integral());
    m.num("fig3.phi_norm_rel_change", (rho_phi_b.integral() / rho_phi.integral() - 1.0).abs());
    m.num("fig3.naive_l1_distance", rho_b.normalized().l1_distance(&naive));
    Ok(())
}

fn evolve(cfg: &ExperimentConfig, g: &Arc<SpatialGrid>, w: &mut Writer, m: &mut RunManifest) -> Result<(), CliError> {
    let shape = cfg.shape().unwrap();
    let mut p = packet(cfg, g)?;
    if cfg.yardstick() == Yardstick::Field {
        p = convert_yardstick(&p, Yardstick::Field)?;
    }
    let norm = cfg.normalize();
    m.text("evolve.yardstick", cfg.yardstick().label());
    m.text("evolve.normalized", norm.to_string());
    for (k, &t) in cfg.times().iter().enumerate() {
        let d = density(&evolve_free(&p, t)?, norm);
        w.density(&format!("rho_t{k}.csv"), &d)?;
        m.num(format!("evolve.t{k}.time"), t);
        m.num(format!("evolve.t{k}.integral"), d.integral());
        if norm {
            let rep = lightcone_fraction_about(&d, shape.center, shape.w, t, cfg.params().c)?;
            m.num(format!("evolve.t{k}.fraction_outside"), rep.fraction_outside);
            m.list(format!("evolve.t{k}.peaks"), &rep.peak_positions);
        }
    }
    Ok(())
}

fn boost(cfg: &ExperimentConfig, g: &Arc<SpatialGrid>, w: &mut Writer, m: &mut RunManifest) -> Result<(), CliError> {
    let shape = cfg.shape().unwrap();
    let pr = cfg.params();
    let nw = packet(cfg, g)?;
    let list: Vec<BoostParams> = match &cfg.run.rapidities {
        Some(r) => r.iter().map(|&th| BoostParams::from_rapidity(&pr, th)).collect::<Result<_, _>>()?,
        None => cfg.velocities().iter().map(|&v| BoostParams::from_velocity(&pr, v)).collect::<Result<_, _>>()?,
    };
    m.text("boost.yardstick", cfg.yardstick().label());
    for (k, b) in list.iter().enumerate() {
        m.num(format!("boost.b{k}.theta"), b.theta);
        m.num(format!("boost.b{k}.v"), b.v);
        match cfg.yardstick() {
            Yardstick::NewtonWigner => {
                let out = boost_nw(&nw, b)?;
                let d = density(&out, false);
                let naive = if b.theta == 0.0 {
                    density(&nw, true)
                } else {
                    naive_lorentz_density_on(&nw, b, &boost_output_grid(g, b.theta)?)?
                };
                w.density(&format!("rho_boosted_b{k}.csv"), &d)?;
                w.density(&format!("rho_naive_b{k}.csv"), &naive)?;
                m.num(format!("boost.b{k}.norm_defect"), d.integral() - 1.0);
                m.list(format!("boost.b{k}.peaks"), &peak_positions(&d, 4));
            }
            Yardstick::Field => {
                let phi = convert_yardstick(&nw, Yardstick::Field)?;
                let half = cfg.field_window();
                let out = boost_field(&phi, b, Some((shape.center - half, shape.center + half)))?;
                let d = density(&out, false);
                w.density(&format!("rho_boosted_b{k}.csv"), &d)?;
                m.num(format!("boost.b{k}.integral"), d.integral());
                m.list(format!("boost.b{k}.peaks"), &peak_positions(&d, 4));
            }
        }
    }
    Ok(())
}

fn kernels(cfg: &ExperimentConfig, g: &Arc<SpatialGrid>, w: &mut Writer, m: &mut RunManifest) -> Result<(), CliError> {
    let pr = cfg.params();
    let tables = [
        ("i_plus", KernelTable::i_plus(g.clone(), &pr)?),
        ("i_minus", KernelTable::i_minus(g.clone(), &pr)?),
        ("v1", KernelTable::v1(g.clone(), &pr)?),
    ];
    let s: Vec<f64> = tables[0].1.centered().iter().map(|(s, _)| *s).collect();
    let cols: Vec<Vec<f64>> = tables.iter().map(|(_, t)| t.centered().iter().map(|(_, v)| v.re).collect()).collect();
    let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
    w.columns("kernels.csv", &["s", "i_plus", "i_minus", "v1"], &s, &refs)?;
    for (name, t) in &tables {
        let imag = t.samples().values().iter().fold(0.0f64, |a, v| a.max(v.im.abs()));
        m.text(format!("kernels.{name}.singular"), t.is_singular().to_string());
        m.num(format!("kernels.{name}.max_imag"), imag);
    }
    let ip = &cols[0];
    let peak = ip.iter().fold(0.0f64, |a, v| a.max(*v));
    m.num("kernels.i_plus.peak", peak);
    m.num("kernels.i_plus.min", ip.iter().fold(f64::INFINITY, |a, v| a.min(*v)));
    m.num("kernels.compton_length", pr.compton_length());
    Ok(())
}

/// Scenario names with their defaults, for `yardstick list`.
pub fn list_scenarios() -> String {
    let mut s = String::new();
    for sc in Scenario::ALL {
        let text = match sc {
            Scenario::Fig1 => "free evolution of a box packet; rho_a and rho_phi at t = 0, T/2, T with the share outside the light cone\n    defaults: box w = 0.005, T = 7.5e-5, grid 16384 on [-0.16, 0.16]",
            Scenario::Fig2 => "two Gaussian packets, short-time interaction correction r_int for each width\n    defaults: widths = 0.0025, 0.005; centers = -0.02, 0.02; lambda = 1; grid 16384 on [-0.16, 0.16]",
            Scenario::Fig3 => "boost of a box packet: Newton-Wigner, naive Lorentz and field-yardstick densities\n    defaults: box w = 7.3e-3, v = 100 (theta = 0.93), grid 4096 on [-0.16, 0.16]",
            Scenario::Evolve => "free evolution of any [shape] at run.times in either yardstick\n    defaults: yardstick NW, normalize = true, grid 4096 on [-0.16, 0.16]",
            Scenario::Boost => "boost of any [shape] for run.velocities or run.rapidities\n    defaults: v = 100, yardstick NW, grid 4096 on [-0.16, 0.16]",
            Scenario::Kernels => "sampled kernels I+ (NW to field smearing), I- and V1 on a centered displacement axis (kernels.csv: s,i_plus,i_minus,v1)\n    defaults: grid 1024 on [-0.05, 0.05]",
        };
        let _ = writeln!(s, "{:<8} {text}", sc.name());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(Error::CutoffInstability(0.5)).exit_code(), 3);
        assert_eq!(CliError::from(Error::Overlap(0.5)).exit_code(), 2);
        assert_eq!(CliError::Config(ConfigError::Invalid("x".into())).exit_code(), 2);
    }

    #[test]
    fn listing() {
        let l = list_scenarios();
        assert_eq!(l.lines().filter(|x| !x.starts_with(' ')).count(), 6);
        assert!(l.contains("0.0025") && l.contains("0.005"));
        assert!(l.contains("I+"));
    }

    #[test]
    fn manifest_format() {
        let mut m = RunManifest::default();
        m.num("a", 0.1);
        m.list("b", &[1.0, 2.0]);
        assert_eq!(m.render(), "a = 1.0000000000000001e-1\nb = 1.0000000000000000e0,2.0000000000000000e0\n");
        assert_eq!(m.get_f64("a"), Some(0.1));
    }
}
