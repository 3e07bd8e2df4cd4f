//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits 0 after reporting so that the regular test run stays usable; set
//! `YARDSTICK_ACCEPTANCE_STRICT=1` to exit 1 when any criterion fails.

use std::sync::Arc;
use std::time::Instant;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use yardstick::boost::{
    boost_field, boost_nw, boost_nw_on, kernel_f_theta, predicted_peaks, BoostParams,
};
use yardstick::dispersion::{multiplier_i_minus, multiplier_i_plus, KernelTable, ModelParams};
use yardstick::evolution::{evolve_free, lightcone_fraction};
use yardstick::fock::{convergence_order, oracle_coefficients, oracle_short_time};
use yardstick::grid::{apply_multiplier, direct_convolve_oracle, forward_transform, ComplexField, SpatialGrid};
use yardstick::interaction::{initial_density, r_int, r_int_unguarded, TwoParticleConfig};
use yardstick::peaks::dominant_peaks;
use yardstick::states::{convert_yardstick, density, make_packet, PacketShape, WavePacket, Yardstick};

const T: f64 = 7.5e-5;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pr() -> ModelParams {
    ModelParams::default()
}

fn fig1_packet() -> WavePacket {
    let g = SpatialGrid::new(16384, -0.16, 0.16).unwrap();
    make_packet(&PacketShape::boxed(0.005, 0.0), &g, &pr()).unwrap()
}

fn fraction(p: &WavePacket, t: f64) -> f64 {
    let d = density(&evolve_free(p, t).unwrap(), true);
    lightcone_fraction(&d, 0.005, t, p.params().c).unwrap().fraction_outside
}

fn superluminal_fraction() -> Outcome {
    let p = fig1_packet();
    let (half, full) = (fraction(&p, T / 2.0), fraction(&p, T));
    Outcome {
        ok: (half - 0.03).abs() <= 0.01 && full < half,
        detail: format!("outside cone at T/2 = {half:.4} (0.03 +- 0.01), at T = {full:.4} (< T/2)"),
    }
}

fn field_fraction() -> Outcome {
    let p = convert_yardstick(&fig1_packet(), Yardstick::Field).unwrap();
    let f: Vec<f64> = [0.0, T / 2.0, T].iter().map(|&t| fraction(&p, t)).collect();
    Outcome {
        ok: (f[0] - 0.06).abs() <= 0.015 && f[0] > f[1] && f[1] > f[2],
        detail: format!("field fraction {:.4} -> {:.4} -> {:.4} (start 0.06 +- 0.015, decreasing)", f[0], f[1], f[2]),
    }
}

fn boost_peaks() -> Outcome {
    let w = 7.3e-3;
    let g = SpatialGrid::new(4096, -0.16, 0.16).unwrap();
    let p = make_packet(&PacketShape::boxed(w, 0.0), &g, &pr()).unwrap();
    let b = BoostParams::from_velocity(&pr(), 100.0).unwrap();
    let nw = boost_nw(&p, &b).unwrap();
    let d = density(&nw, false);
    let peaks: Vec<f64> = dominant_peaks(d.grid(), d.values(), 4).iter().map(|p| p.z).collect();
    let pred = predicted_peaks(-w, w, b.theta).unwrap();
    let right = peaks.last().copied().unwrap_or(f64::NAN);
    let all = peaks.len() == 4 && peaks.iter().zip(pred).all(|(a, b)| (a / b - 1.0).abs() < 0.02);
    let nw_defect = (d.integral() - 1.0).abs();
    let f = convert_yardstick(&p, Yardstick::Field).unwrap();
    let fb = boost_field(&f, &b, Some((-0.08, 0.08))).unwrap();
    let change = (density(&fb, false).integral() / density(&f, false).integral() - 1.0).abs();
    Outcome {
        ok: (right / 1.85e-2 - 1.0).abs() < 0.02 && all && nw_defect < 1e-8 && change > 1e-3,
        detail: format!(
            "theta = {:.4}, right peak {right:.5e} (1.85e-2 +- 2%), four peaks within 2%: {all}, NW norm defect {nw_defect:.1e} (< 1e-8), field norm change {change:.3} (> 1e-3)",
            b.theta
        ),
    }
}

fn oracle_equivalence() -> Outcome {
    let g = SpatialGrid::new(48, -0.048, 0.048).unwrap();
    let cfg = TwoParticleConfig::new(0.005, -0.02, 0.02, pr(), g.clone()).unwrap();
    let c = oracle_coefficients(&cfg).unwrap();
    let spectral = r_int_unguarded(&cfg).unwrap();
    let rel = spectral.rel_l2_diff(&c.r2_int);
    let quad = c.r2_free.values().iter().chain(c.r2_int.values()).fold(0.0f64, |m, v| m.max(v.abs()));
    let lin = c.r1_free.values().iter().chain(c.r1_int.values()).fold(0.0f64, |m, v| m.max(v.abs()));
    // a real initial state has no odd orders in t, so the cubic residual needs a kicked one
    let kicked = TwoParticleConfig::with_kick(0.005, -0.02, 0.02, 400.0, pr(), g).unwrap();
    let times: Vec<f64> = (0..5).map(|k| 1e-7 * 10f64.powf(k as f64 / 4.0)).collect();
    let rep = oracle_short_time(&kicked, &times).unwrap();
    let order = convergence_order(&rep.samples);
    let drift = rep.samples.iter().fold(0.0f64, |m, s| m.max(s.norm_drift));
    Outcome {
        ok: rel < 0.02 && lin < 1e-8 * quad && (order - 3.0).abs() <= 0.2 && drift < 1e-10,
        detail: format!(
            "r_int vs oracle rel L2 {rel:.2e} (< 0.02), linear/quadratic {:.1e} (< 1e-8), error exponent {order:.3} (3 +- 0.2)",
            lin / quad
        ),
    }
}

fn width_ratio() -> Outcome {
    let g = SpatialGrid::new(16384, -0.16, 0.16).unwrap();
    let cfg = |w| TwoParticleConfig::new(w, -0.02, 0.02, pr(), g.clone()).unwrap();
    let (narrow, wide) = (cfg(0.0025), cfg(0.005));
    let (ra, rb) = (r_int(&narrow).unwrap(), r_int(&wide).unwrap());
    let ratio = ra.interpolate(0.0).unwrap() / rb.interpolate(0.0).unwrap();
    let dens = initial_density(&narrow).interpolate(0.0) / initial_density(&wide).interpolate(0.0);
    let positive = |r: &yardstick::grid::RealField| {
        let inside: Vec<f64> =
            g.positions().iter().zip(r.values()).filter(|(z, _)| z.abs() < 0.02).map(|(_, v)| *v).collect();
        inside.iter().filter(|v| **v > 0.0).count() as f64 / inside.len() as f64
    };
    let (pa, pb) = (positive(&ra), positive(&rb));
    Outcome {
        ok: (0.10..=0.25).contains(&ratio) && dens < 1e-4 && pa >= 0.8 && pb >= 0.8,
        detail: format!(
            "r_int(0) ratio {ratio:.4} ([0.10, 0.25]), density ratio {dens:.1e} (< 1e-4), positive share between particles {pa:.3} / {pb:.3} (>= 0.8)"
        ),
    }
}

fn random_field(g: &Arc<SpatialGrid>, rng: &mut ChaCha8Rng) -> ComplexField {
    ComplexField::from_fn(g.clone(), |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap()
}

fn invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = Vec::new();

    let mut parseval = 0.0f64;
    for _ in 0..20 {
        let n = 2 * rng.gen_range(2..2048);
        let g = SpatialGrid::new(n, rng.gen_range(-2.0..-0.1), rng.gen_range(0.1..2.0)).unwrap();
        let f = random_field(&g, &mut rng);
        let a = f.l2_norm().powi(2);
        parseval = parseval.max((forward_transform(&f).l2_norm().powi(2) - a).abs() / a);
    }
    worst.push(("parseval", parseval, 1e-12));

    let mut duality = 0.0f64;
    for n in [4096usize, 8192] {
        let g = SpatialGrid::new(n, -0.16, 0.16).unwrap();
        let f = ComplexField::from_real_fn(g.clone(), |z| (-(z / 0.01).powi(2)).exp() * (1.0 + 0.3 * (z * 900.0).sin()))
            .unwrap()
            .add(&random_field(&g, &mut rng).scaled(Complex64::new(1e-3, 0.0)))
            .unwrap();
        let a = apply_multiplier(&f, &multiplier_i_plus(&pr())).unwrap();
        let b = apply_multiplier(&a, &multiplier_i_minus(&pr())).unwrap().scaled(Complex64::new(2.0, 0.0));
        duality = duality.max(b.rel_l2_diff(&f));
    }
    worst.push(("duality", duality, 1e-6));

    let g = SpatialGrid::new(4096, -0.08, 0.08).unwrap();
    let base = make_packet(&PacketShape::gaussian(0.004, 0.0), &g, &pr()).unwrap();
    let kick = ComplexField::from_fn(g.clone(), |z| Complex64::from_polar(1.0, 800.0 * z)).unwrap();
    let p = WavePacket::new(Yardstick::NewtonWigner, base.amplitude().mul_pointwise(&kick).unwrap(), pr()).unwrap();
    let scale = p.amplitude().values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let mut unitary = 0.0f64;
    for _ in 0..10 {
        let (t1, t2) = (rng.gen_range(-5e-5..5e-5), rng.gen_range(-5e-5..5e-5));
        let two = evolve_free(&evolve_free(&p, t1).unwrap(), t2).unwrap();
        let one = evolve_free(&p, t1 + t2).unwrap();
        unitary = unitary.max(two.amplitude().max_abs_diff(one.amplitude()) / scale).max((one.raw_norm() - 1.0).abs());
    }
    worst.push(("unitarity/group law", unitary, 1e-12));

    let box_p = fig1_packet();
    let mut reversal = 0.0f64;
    for t in [T / 4.0, T / 2.0, T] {
        let a = density(&evolve_free(&box_p, t).unwrap(), false);
        let b = density(&evolve_free(&box_p, -t).unwrap(), false);
        let d = a.values().iter().zip(b.values()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        reversal = reversal.max(d / a.max());
    }
    worst.push(("time reversal", reversal, 1e-10));

    let gs = SpatialGrid::new(256, -0.2, 0.2).unwrap();
    let ps = make_packet(&PacketShape::gaussian(0.03, 0.01), &gs, &pr()).unwrap();
    let v = DVector::from_column_slice(ps.amplitude().values());
    let dz = Complex64::new(gs.dz(), 0.0);
    let mut kernel = 0.0f64;
    for _ in 0..3 {
        let th = rng.gen_range(-0.5..0.5);
        let kp = kernel_f_theta(&gs, &pr(), &BoostParams::from_rapidity(&pr(), th).unwrap()).unwrap();
        let km = kernel_f_theta(&gs, &pr(), &BoostParams::from_rapidity(&pr(), -th).unwrap()).unwrap();
        let a = &kp * &v * dz;
        let b = km.adjoint() * &v * dz;
        let back = &kp * (&km * &v * dz) * dz;
        kernel = kernel.max((&a - &b).norm() / a.norm()).max((&back - &v).norm() / v.norm());
    }
    worst.push(("f_theta symmetry/composition", kernel, 1e-6));

    let mut group = 0.0f64;
    for _ in 0..10 {
        let (a, b) = (rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4));
        let ba = BoostParams::from_rapidity(&pr(), a).unwrap();
        let bb = BoostParams::from_rapidity(&pr(), b).unwrap();
        let bab = BoostParams::from_rapidity(&pr(), a + b).unwrap();
        let two = boost_nw_on(&boost_nw_on(&ps, &ba, &gs).unwrap(), &bb, &gs).unwrap();
        let one = boost_nw_on(&ps, &bab, &gs).unwrap();
        group = group.max(two.amplitude().rel_l2_diff(one.amplitude()));
    }
    worst.push(("boost group law", group, 1e-6));

    let gw = SpatialGrid::new(1024, -8.0, 8.0).unwrap();
    let pw = make_packet(&PacketShape::gaussian(1.0, 0.0), &gw, &pr()).unwrap();
    let fw = convert_yardstick(&pw, Yardstick::Field).unwrap();
    worst.push(("nonrelativistic L1", density(&pw, true).l1_distance(&density(&fw, true)), 0.01));

    let ok = worst.iter().all(|(_, v, tol)| v < tol);
    let detail = worst.iter().map(|(n, v, tol)| format!("{n} {v:.1e}/{tol:.0e}")).collect::<Vec<_>>().join(", ");
    Outcome { ok, detail }
}

fn oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut conv = 0.0f64;
    for n in [64usize, 128, 256] {
        let g = SpatialGrid::new(n, -0.05, 0.05).unwrap();
        let f = random_field(&g, &mut rng);
        for k in [KernelTable::i_plus(g.clone(), &pr()).unwrap(), KernelTable::v1(g.clone(), &pr()).unwrap()] {
            let fast = apply_multiplier(&f, k.multiplier()).unwrap();
            let slow = direct_convolve_oracle(&f, k.samples()).unwrap();
            conv = conv.max(fast.rel_l2_diff(&slow));
        }
    }
    let g = SpatialGrid::new(256, -0.2, 0.2).unwrap();
    let p = make_packet(&PacketShape::gaussian(0.03, 0.01), &g, &pr()).unwrap();
    let b = BoostParams::from_rapidity(&pr(), 0.5).unwrap();
    let k = kernel_f_theta(&g, &pr(), &b).unwrap();
    let via_matrix = (&k * DVector::from_column_slice(p.amplitude().values())) * Complex64::new(g.dz(), 0.0);
    let s = DVector::from_column_slice(boost_nw_on(&p, &b, &g).unwrap().amplitude().values());
    let boost = (via_matrix - &s).norm() / s.norm();
    Outcome {
        ok: conv < 1e-8 && boost < 1e-6,
        detail: format!("FFT vs direct convolution {conv:.1e} (< 1e-8), boost spectral vs matrix {boost:.1e} (< 1e-6)"),
    }
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome, Option<f64>);
    let criteria: [Criterion; 7] = [
        ("1 superluminal fraction", superluminal_fraction, Some(10.0)),
        ("2 field-yardstick fraction", field_fraction, None),
        ("3 boosted box peaks", boost_peaks, Some(30.0)),
        ("4 Fock-space oracle", oracle_equivalence, Some(60.0)),
        ("5 interaction width ratio", width_ratio, None),
        ("6 invariant suite", invariants, None),
        ("7 oracle equivalences", oracles, None),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let start = Instant::now();
        let out = f();
        let secs = start.elapsed().as_secs_f64();
        let in_time = limit.is_none_or(|l| secs < l);
        let ok = out.ok && in_time;
        if !ok {
            failed += 1;
        }
        let budget = limit.map(|l| format!(" (< {l:.0} s)")).unwrap_or_default();
        println!("{} [{name}] {}; {secs:.2} s{budget}", if ok { "PASS" } else { "FAIL" }, out.detail);
    }
    println!("acceptance: {} passed, {failed} failed", 7 - failed);
    if failed > 0 && std::env::var("YARDSTICK_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
