//! Acceptance suite. Each test prints one PASS/FAIL line per criterion (run
//! with `--nocapture` to see them) and fails if the criterion is not met.
//! All tolerances are fixed below.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use emgreen::config::load_medium;
use emgreen::dispersion::{
    default_susceptibility_contour, phase_velocity, Line, LorentzPart, OscillatorDensity, PermittivityModel,
    QuadratureSpec, C_LIGHT, EPS0,
};
use emgreen::freespace::{asymptotic_defect, FreeQuadrature, TestField3D};
use emgreen::helmholtz::{resolvent_difference_ray, DiscreteHelmholtz, Grid1D, OperatorKind};
use emgreen::quad;
use emgreen::spectral::{
    cavity_modes, causality_split, d_density, d_value, kk_reconstruct_green, mode_expansion_green, reference_coefficient,
    time_domain_field, x_operator_coefficient, KernelForm, Medium, Reference, SourceProfile,
};
use emgreen::transforms::{cauchy_loop, symmetric_grid, ContourSpec, RectangleLoop};
use emgreen::Error;
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex64;

const KK_EPS_TOL: f64 = 1e-6;
const PASSIVITY_TOL: f64 = 1e-12;
const PASSIVITY_SAMPLES: usize = 10_000;
const SUM_RULE_TOL: f64 = 1e-8;
const NORM_SLACK: f64 = 1e-8;
const LOOP_TOL: f64 = 1e-8;
const JOINT_MARGIN: f64 = 0.1;
const WITNESS_MIN: f64 = 1e-2;
const EXPANSION_TOL: f64 = 1e-10;
const KK_GREEN_TOL: f64 = 1e-3;
const KK_GREEN_GAIN: f64 = 3.0;
const KK_ABSORPTIVE_TOL: f64 = 1e-2;
const WEIGHT_FACTOR: f64 = 5.0;
const CAUSAL_TOL: f64 = 1e-6;
const FRONT_TOL: f64 = 1e-4;
const FRONT_WIDTHS: f64 = 3.0;
const ASYMPTOTIC_TOL: f64 = 1e-3;
const ASYMPTOTIC_SECONDS: f64 = 300.0;
const RESOLVENT_CAP: f64 = 1.5;

fn media(name: &str) -> PermittivityModel {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/media").join(name);
    load_medium(&p).unwrap()
}

fn lorentz_media() -> Vec<(&'static str, PermittivityModel)> {
    ["lorentz_slab.toml", "lorentz_bulk.toml", "glass_si.toml"]
        .into_iter()
        .map(|n| (n, media(n)))
        .collect()
}

/// Prints the verdict line and returns whether it passed.
fn verdict(id: &str, what: &str, measured: f64, limit: f64, pass: bool) -> bool {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] {id} {what}: measured {measured:.3e}, limit {limit:.3e}");
    pass
}

fn info(id: &str, what: &str, value: f64) {
    println!("[INFO] {id} {what}: {value:.3e}");
}

/// Independent Lorentz permittivity, written from the oscillator formula.
fn lorentz_oracle(parts: &[LorentzPart], z: C) -> C {
    parts
        .iter()
        .fold(C::new(1.0, 0.0), |acc, p| acc + p.wp * p.wp / (p.w1 * p.w1 - z * z - C::i() * p.gamma * z))
}

fn sample_x(model: &PermittivityModel) -> f64 {
    let [a, b] = model.layers()[0].interval;
    if a.is_finite() && b.is_finite() {
        0.5 * (a + b)
    } else {
        0.0
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

#[test]
fn c01_kk_permittivity_round_trip() {
    let mut ok = true;
    for (name, model) in lorentz_media() {
        let x = sample_x(&model);
        let parts = model.density_at(x).lorentz.clone();
        let top = parts.iter().map(|p| p.w1.max(p.wp)).fold(0.0, f64::max);
        let gmin = model.min_damping().unwrap();
        let res: Vec<f64> = log_grid(1e-2 * 3.0 * top, 3.0 * top, 10)
            .into_iter()
            .flat_map(|r| [-r, r])
            .collect();
        let ims = log_grid(0.1 * gmin, 3.0 * top, 20);
        let mut worst: f64 = 0.0;
        for &im in &ims {
            for &re in &res {
                let z = C::new(re, im);
                let kk = model.kk_reconstruct_permittivity(x, z, QuadratureSpec::default()).unwrap();
                let exact = lorentz_oracle(&parts, z);
                worst = worst.max((kk.value - exact).norm() / exact.norm());
            }
        }
        ok &= verdict("C1", &format!("KK round trip {name} (20x20)"), worst, KK_EPS_TOL, worst <= KK_EPS_TOL);
    }
    assert!(ok);
}

#[test]
fn c02_passivity_sweep() {
    let mut ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let media: Vec<_> = lorentz_media().into_iter().chain([("line_gap.toml", media("line_gap.toml"))]).collect();
    for (name, model) in media {
        let x = sample_x(&model);
        let mut worst = f64::INFINITY;
        for _ in 0..PASSIVITY_SAMPLES {
            let re = 100.0 * (2.0 * rng.random::<f64>() - 1.0);
            let im = 1e-3 * (1e5f64).powf(rng.random::<f64>());
            let z = C::new(re, im);
            let eps = model.eval_permittivity(x, z).unwrap();
            worst = worst.min((z * (eps - EPS0)).im);
        }
        ok &= verdict("C2", &format!("passivity {name}, min Im z(ε−ε0)"), worst, -PASSIVITY_TOL, worst >= -PASSIVITY_TOL);
    }
    assert!(ok);
}

#[test]
fn c03_sum_rule() {
    let mut ok = true;
    for (name, model) in lorentz_media() {
        let x = sample_x(&model);
        let d = model.density_at(x);
        let exact: f64 = d.lorentz.iter().map(|p| p.wp * p.wp).sum();
        let q = d.sigma_integral(QuadratureSpec::default()).unwrap();
        let rel = (q.value - exact).abs() / exact;
        let lib = (d.chi_dot_at_zero() - exact).abs() / exact;
        ok &= verdict("C3", &format!("sum rule {name}"), rel.max(lib), SUM_RULE_TOL, rel.max(lib) <= SUM_RULE_TOL);
    }
    assert!(ok);
}

#[test]
fn c04_norm_bound() {
    let model = media("lorentz_slab.toml");
    let grid = Grid1D::dirichlet(1.0, 64).unwrap();
    let res: Vec<f64> = log_grid(0.2, 20.0, 10).into_iter().flat_map(|r| [-r, r]).collect();
    let ims = log_grid(0.01, 10.0, 20);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_disp: f64 = 0.0;
    let mut worst_two: f64 = 0.0;
    for &im in &ims {
        for &re in &res {
            let z = C::new(re, im);
            let bound = 1.0 / (z.norm() * z.im);
            let n = DiscreteHelmholtz::assemble(grid, &model, OperatorKind::Dispersive { z }).unwrap().inverse_norm().unwrap();
            worst_disp = worst_disp.max(n / bound);
            for _ in 0..5 {
                let xi = C::new(40.0 * rng.random::<f64>() - 20.0, 1e-2 * 1e3f64.powf(rng.random::<f64>()));
                let op = DiscreteHelmholtz::assemble(grid, &model, OperatorKind::TwoFrequency { z, xi }).unwrap();
                worst_two = worst_two.max(op.inverse_norm().unwrap() / bound);
            }
        }
    }
    let a = verdict("C4", "dispersive ‖H⁻¹‖·|z|Im z (400 z)", worst_disp, 1.0 + NORM_SLACK, worst_disp <= 1.0 + NORM_SLACK);
    let b = verdict("C4", "two-frequency ‖H⁻¹‖·|z|Im z (2000 z,ξ)", worst_two, 1.0 + NORM_SLACK, worst_two <= 1.0 + NORM_SLACK);
    assert!(a && b);
}

#[test]
fn c05_analyticity_loops() {
    let model = media("lorentz_slab.toml");
    let grid = Grid1D::dirichlet(1.0, 64).unwrap();
    let phi: Vec<C> = grid.positions().iter().map(|&x| C::new((-((x - 0.5) / 0.1).powi(2) / 2.0).exp(), 0.0)).collect();
    let coef = |g: Grid1D, kind| DiscreteHelmholtz::assemble(g, &model, kind)?.coefficient(&phi, &phi);

    let rect = RectangleLoop::new(C::new(0.5, 0.2), C::new(2.5, 1.5), 128).unwrap();
    let dz = cauchy_loop(|z| coef(grid, OperatorKind::Dispersive { z }), &rect).unwrap();
    let z0 = C::new(1.0, 0.5);
    let rect_xi = RectangleLoop::new(C::new(1.0, 0.1), C::new(3.0, 1.0), 256).unwrap();
    let dxi = cauchy_loop(|xi| coef(grid, OperatorKind::TwoFrequency { z: z0, xi }), &rect_xi).unwrap();

    // joint domain: k-loop at fixed z and z-loop at fixed k, both with margin ≥ 0.1
    let zk = C::new(1.0, 1.0);
    let rect_k = RectangleLoop::new(C::new(-1.0, -0.5), C::new(2.0, 0.5), 64).unwrap();
    assert!(zk.im - C_LIGHT * 0.5 >= JOINT_MARGIN);
    let dk = cauchy_loop(|k| coef(Grid1D::bloch(1.0, 64, k)?, OperatorKind::Dispersive { z: zk }), &rect_k).unwrap();
    let k0 = C::new(0.5, 0.1);
    let rect_bz = RectangleLoop::new(C::new(0.5, 0.3), C::new(2.5, 1.5), 64).unwrap();
    assert!(0.3 - C_LIGHT * k0.im >= JOINT_MARGIN);
    let bloch = Grid1D::bloch(1.0, 64, k0).unwrap();
    let dbz = cauchy_loop(|z| coef(bloch, OperatorKind::Dispersive { z }), &rect_bz).unwrap();

    let witness = cauchy_loop(|z| Ok(z.conj()), &rect).unwrap();
    // ∮ conj(z) dz = 2i·area, so the scale-free defect is 2·area/(perimeter·max|z|)
    let oracle = 2.0 * 2.0 * 1.3 / (rect.perimeter() * C::new(2.5, 1.5).norm());
    let mut ok = true;
    for (what, d) in [("z loop", dz), ("ξ loop", dxi), ("(z,k) loop in k", dk), ("(z,k) loop in z", dbz)] {
        ok &= verdict("C5", what, d, LOOP_TOL, d <= LOOP_TOL);
    }
    ok &= verdict("C5", "conj(z) negative control (must exceed)", witness, WITNESS_MIN, witness >= WITNESS_MIN);
    assert!((witness - oracle).abs() < 0.02 * oracle);
    assert!(ok);
}

#[test]
fn c06_mode_expansion_identity() {
    let grid = Grid1D::dirichlet(PI, 256).unwrap();
    let modes = cavity_modes(grid, 1.0).unwrap();
    let vacuum = PermittivityModel::vacuum();
    let mut worst: f64 = 0.0;
    for z in [C::new(1.5, 0.2), C::new(0.0, 1.0), C::new(20.0, 0.5), C::new(-3.3, 0.05)] {
        let direct = DiscreteHelmholtz::assemble(grid, &vacuum, OperatorKind::Dispersive { z }).unwrap().green_matrix().unwrap();
        let sum = mode_expansion_green(&modes, z, 256).unwrap();
        for (a, b) in sum.green.values.iter().zip(direct.values.iter()) {
            worst = worst.max((a - b).norm() / b.norm());
        }
    }
    assert!(verdict("C6", "M = N expansion vs direct inverse, entry-wise relative (N = 256)", worst, EXPANSION_TOL, worst <= EXPANSION_TOL));
}

struct KkCase {
    medium: Medium,
    reference: Reference,
    center: f64,
    width: f64,
}

fn kk_green_error(case: &KkCase, zeta: f64, step_per_zeta: f64, form: KernelForm) -> f64 {
    let grid = Grid1D::dirichlet(PI, 64).unwrap();
    let z = C::new(1.0, 0.5);
    let nu_max = 60.0;
    let count = 2 * (nu_max / (step_per_zeta * zeta)).round() as usize + 1;
    let nu = symmetric_grid(nu_max, count);
    let phi: Vec<C> = grid
        .positions()
        .iter()
        .map(|&x| C::new((-((x - case.center) / case.width).powi(2) / 2.0).exp(), 0.0))
        .collect();
    let density = d_density(&case.medium, grid, case.reference, &phi, &phi, &nu, zeta).unwrap();
    let reference = match case.reference {
        Reference::Vacuum => reference_coefficient(grid, &phi, &phi, z).unwrap(),
        Reference::None => C::new(0.0, 0.0),
    };
    let rec = kk_reconstruct_green(&density, z, reference, form).unwrap();
    let exact = case.medium.operator(grid, z).unwrap().coefficient(&phi, &phi).unwrap();
    (rec.value - exact).norm() / exact.norm()
}

#[test]
fn c07_kk_green_reconstruction() {
    let plain = KkCase {
        medium: Medium::Dispersive(PermittivityModel::vacuum()),
        reference: Reference::None,
        center: 1.2,
        width: 0.3,
    };
    let absorptive = KkCase {
        medium: Medium::Dispersive(media("lorentz_bulk.toml")),
        reference: Reference::Vacuum,
        center: 1.6,
        width: 0.25,
    };
    // fixed budget: five grid points per broadening width at ν_max = 60
    let per = 0.2;
    let e1 = kk_green_error(&plain, 0.01, per, KernelForm::Shifted);
    let e4 = kk_green_error(&plain, 0.0025, per, KernelForm::Shifted);
    let ea = kk_green_error(&absorptive, 0.01, per, KernelForm::Shifted);
    let a = verdict("C7", "non-dispersive cavity, ζ = 0.01", e1, KK_GREEN_TOL, e1 <= KK_GREEN_TOL);
    let b = verdict("C7", "error gain ζ → ζ/4 (must exceed)", e1 / e4, KK_GREEN_GAIN, e1 / e4 >= KK_GREEN_GAIN);
    let c = verdict("C7", "absorptive Lorentz cavity, ζ = 0.01", ea, KK_ABSORPTIVE_TOL, ea <= KK_ABSORPTIVE_TOL);
    // the 1/(z² − ν²) kernel carries an O(ζ/|z|) bias; reported, not gated
    info("C7", "limit kernel, non-dispersive, ζ = 0.01", kk_green_error(&plain, 0.01, per, KernelForm::Limit));
    info("C7", "limit kernel, non-dispersive, ζ = 0.0025", kk_green_error(&plain, 0.0025, per, KernelForm::Limit));
    assert!(a && b && c);
}

#[test]
fn c08_peak_weights() {
    let n = 64;
    let grid = Grid1D::dirichlet(PI, n).unwrap();
    let h = grid.spacing();
    let zeta = 0.01;
    let medium = Medium::Dispersive(PermittivityModel::vacuum());
    let phi: Vec<C> = grid.positions().iter().map(|&x| C::new((-((x - 1.2) / 0.3).powi(2) / 2.0).exp(), 0.0)).collect();
    // discrete sine modes and frequencies, written out independently
    let omega = |m: usize| 2.0 / h * (m as f64 * PI * h / (2.0 * PI)).sin();
    let overlap = |m: usize| {
        let s: f64 = grid.positions().iter().zip(&phi).map(|(&x, p)| p.re * (m as f64 * x).sin()).sum();
        h * s * (2.0 / ((n + 1) as f64 * h)).sqrt()
    };
    let total: f64 = (1..=n).map(|m| overlap(m).powi(2)).sum();
    let limit = WEIGHT_FACTOR * zeta / omega(1);
    let mut worst: f64 = 0.0;
    for m in 1..=3 {
        let w = omega(m);
        let half = 0.5 * (omega(m + 1) - w).min(if m == 1 { 2.0 * w } else { w - omega(m - 1) });
        for centre in [w, -w] {
            let breaks: Vec<f64> = [-1.0, -0.1, -0.02, -0.004, 0.0, 0.004, 0.02, 0.1, 1.0].iter().map(|k| centre + k * half).collect();
            let integral = quad::adaptive(
                |nu| -d_value(&medium, grid, Reference::None, &phi, &phi, C::new(nu, zeta)).unwrap(),
                &breaks,
                1e-12,
                1e-10,
                4000,
            )
            .unwrap();
            let target = 0.5 * overlap(m).powi(2);
            worst = worst.max((integral.value - target).norm() / (0.5 * total));
        }
    }
    assert!(verdict("C8", "peak weights vs ½·overlap², modes 1-3 at ±ω_n", worst, limit, worst <= limit));
}

fn causal_contour(model: &PermittivityModel) -> ContourSpec {
    let mut spec = default_susceptibility_contour(model);
    spec.eta = spec.eta.max(30.0 / spec.alias_period());
    spec
}

fn times(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn c09_causality() {
    let bulk = media("lorentz_bulk.toml");
    let mut ok = true;

    let chi = bulk.susceptibility(0.0, &times(-20.0, 60.0, 161), &causal_contour(&bulk)).unwrap();
    let (peak, before) = causality_split(&chi);
    ok &= verdict("C9", "χ(t < 0)/peak", before / peak, CAUSAL_TOL, before <= CAUSAL_TOL * peak);

    let grid = Grid1D::dirichlet(3.0, 48).unwrap();
    let phi: Vec<C> = grid.positions().iter().map(|&x| C::new((-((x - 1.5) / 0.2).powi(2) / 2.0).exp(), 0.0)).collect();
    let x = x_operator_coefficient(
        &Medium::Dispersive(bulk.clone()),
        grid,
        Reference::Vacuum,
        &phi,
        &phi,
        &times(-20.0, 60.0, 81),
        &causal_contour(&bulk),
    )
    .unwrap();
    let (peak, before) = causality_split(&x);
    ok &= verdict("C9", "X-coefficient(t < 0)/peak", before / peak, CAUSAL_TOL, before <= CAUSAL_TOL * peak);

    let cavity = Grid1D::dirichlet(6.0, 96).unwrap();
    let shape: Vec<C> = cavity.positions().iter().map(|&x| C::new((-((x - 2.0) / 0.2).powi(2)).exp(), 0.0)).collect();
    let obs = cavity.index_of(4.0);
    let t = times(-20.0, 40.0, 61);
    let line = media("line_gap.toml");
    for (what, medium, spec) in [
        ("E(t < 0)/peak, Lorentz medium", Medium::Dispersive(bulk.clone()), causal_contour(&bulk)),
        ("E(t < 0)/peak, frozen line medium", Medium::NonDispersive { model: line.clone(), omega0: 1.0 }, causal_contour(&line)),
    ] {
        let e = time_domain_field(&medium, cavity, &shape, SourceProfile::Sine { omega_s: 1.5 }, obs, &t, &spec).unwrap();
        let (peak, before) = causality_split(&e);
        ok &= verdict("C9", what, before / peak, CAUSAL_TOL, before <= CAUSAL_TOL * peak);
    }

    // light cone in vacuum
    let long = Grid1D::dirichlet(40.0, 800).unwrap();
    let width = 0.5;
    let shape: Vec<C> = long.positions().iter().map(|&x| C::new((-((x - 10.0) / width).powi(2)).exp(), 0.0)).collect();
    let obs = long.index_of(25.0);
    let d = (long.position(obs) - 10.0).abs();
    let vacuum = PermittivityModel::vacuum();
    let e = time_domain_field(
        &Medium::Dispersive(vacuum.clone()),
        long,
        &shape,
        SourceProfile::Sine { omega_s: 2.0 },
        obs,
        &times(0.0, 30.0, 151),
        &causal_contour(&vacuum),
    )
    .unwrap();
    let peak = e.iter().map(|s| s.value.norm()).fold(0.0, f64::max);
    let early = e
        .iter()
        .filter(|s| s.t < d / C_LIGHT - FRONT_WIDTHS * width)
        .map(|s| s.value.norm())
        .fold(0.0, f64::max);
    ok &= verdict("C9", "vacuum field before d/c − 3w, /peak", early / peak, FRONT_TOL, early <= FRONT_TOL * peak);
    assert!(ok);
}

#[test]
fn c10_nondispersive_construction() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_real: f64 = 0.0;
    let mut min_eps = f64::INFINITY;
    let mut max_speed: f64 = 0.0;
    let mut oracle_gap: f64 = 0.0;
    for _ in 0..2000 {
        let gap = 0.5 + 5.0 * rng.random::<f64>();
        let lines: Vec<Line> = (0..1 + (rng.random::<f64>() * 4.0) as usize)
            .map(|_| Line { nu: gap * (1.0 + 3.0 * rng.random::<f64>()), weight: 2.0 * rng.random::<f64>() })
            .collect();
        let omega0 = gap * 0.999 * rng.random::<f64>() + 1e-6;
        let d = OscillatorDensity::new(lines.clone(), vec![], gap).unwrap();
        let eps = d.build_nondispersive(omega0).unwrap();
        let oracle = 1.0 + lines.iter().map(|l| 2.0 * l.weight / (l.nu * l.nu - omega0 * omega0)).sum::<f64>();
        oracle_gap = oracle_gap.max((eps - oracle).abs() / oracle);
        min_eps = min_eps.min(eps);
        max_speed = max_speed.max(phase_velocity(eps));
        // the frozen operator diagonal is real on the imaginary axis
        let model = PermittivityModel::homogeneous(d).unwrap();
        let op = DiscreteHelmholtz::assemble(
            Grid1D::dirichlet(1.0, 8).unwrap(),
            &model,
            OperatorKind::NonDispersive { z: C::new(0.0, 1.3), omega0 },
        )
        .unwrap();
        worst_real = worst_real.max(op.matrix().diag().iter().map(|v| v.im.abs()).fold(0.0, f64::max));
    }
    let mut ok = true;
    ok &= verdict("C10", "imaginary part of frozen diagonal", worst_real, 0.0, worst_real == 0.0);
    ok &= verdict("C10", "min ε over 2000 gap densities (must be ≥ ε0)", min_eps, EPS0, min_eps >= EPS0);
    ok &= verdict("C10", "max phase velocity (must be ≤ c)", max_speed, C_LIGHT, max_speed <= C_LIGHT);
    ok &= verdict("C10", "agreement with the line-sum formula", oracle_gap, 1e-14, oracle_gap <= 1e-14);

    let inside = OscillatorDensity::new(vec![Line { nu: 1.0, weight: 1.0 }], vec![], 2.0).unwrap();
    let lossy = OscillatorDensity::new(vec![], vec![LorentzPart { wp: 1.0, w1: 3.0, gamma: 0.1 }], 2.0).unwrap();
    let above = OscillatorDensity::new(vec![Line { nu: 3.0, weight: 1.0 }], vec![], 2.0).unwrap();
    let rejected = [inside.build_nondispersive(1.0), lossy.build_nondispersive(1.0), above.build_nondispersive(2.5)]
        .iter()
        .all(|r| matches!(r, Err(Error::GapViolation(_))));
    ok &= verdict("C10", "gap violations rejected (1 = yes)", rejected as u8 as f64, 1.0, rejected);
    assert!(ok);
}

#[test]
fn c11_free_space_asymptotics() {
    let start = Instant::now();
    let phi = TestField3D::isotropic(1.0, [1.0, 0.0, 0.0], [0.0; 3]).unwrap();
    let norm = phi.norm_sqr();
    let quad = FreeQuadrature::default();
    let radii = [10.0, 100.0, 1000.0];
    let mut ok = true;
    let mut ladders = Vec::new();
    for theta in [FRAC_PI_4, FRAC_PI_2] {
        let d: Vec<f64> = asymptotic_defect(&phi, &phi, &radii, theta, &quad).unwrap().iter().map(|e| e.value).collect();
        let ratio = d.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
        ok &= verdict("C11", &format!("worst rung ratio at θ = {theta:.4} (must be < 1)"), ratio, 1.0, ratio < 1.0);
        let last = d[2] / norm;
        ok &= verdict("C11", &format!("final defect/‖φ‖² at θ = {theta:.4}"), last, ASYMPTOTIC_TOL, last <= ASYMPTOTIC_TOL);
        ladders.push(d);
    }
    let ordered = ladders[1].iter().zip(&ladders[0]).map(|(a, b)| a / b).fold(0.0, f64::max);
    info("C11", "max defect ratio θ=π/2 over θ=π/4", ordered);
    let secs = start.elapsed().as_secs_f64();
    ok &= verdict("C11", "runtime in seconds", secs, ASYMPTOTIC_SECONDS, secs <= ASYMPTOTIC_SECONDS);
    assert!(ok);
}

#[test]
fn c12_resolvent_difference_cap() {
    let model = media("lorentz_bulk.toml");
    let grid = Grid1D::dirichlet(1.0, 256).unwrap();
    let chi_dot = model.max_chi_dot();
    let omegas = [100.0, 150.0, 200.0, 300.0, 400.0];
    let mut ok = true;
    let mut caps = Vec::new();
    for eta in [1.0, 2.0] {
        let cap = RESOLVENT_CAP * chi_dot / (eta * eta);
        caps.push(cap);
        let worst = resolvent_difference_ray(&model, grid, eta, &omegas).unwrap().into_iter().fold(0.0, f64::max);
        ok &= verdict("C12", &format!("max ‖z²(H_e⁻¹ − H_0⁻¹)‖ for ω ≥ 100 at η = {eta}"), worst, cap, worst <= cap);
    }
    let scaling = caps[0] / caps[1];
    ok &= verdict("C12", "cap(η=1)/cap(η=2) − 4", (scaling - 4.0).abs(), 1e-12, (scaling - 4.0).abs() <= 1e-12);
    assert!(ok);
}

#[test]
fn c13_cli_determinism() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut ok = true;
    for (cmd, cfg) in [
        ("kk-eps", "kk_eps_glass_si.toml"),
        ("green", "green_lorentz.toml"),
        ("modes", "modes.toml"),
        ("causality", "causality.toml"),
        ("analyticity", "analyticity.toml"),
        ("asymptotic", "asymptotic.toml"),
    ] {
        let out = |threads: &str| {
            Command::new(env!("CARGO_BIN_EXE_emgreen"))
                .args([cmd, "--config"])
                .arg(dir.join(cfg))
                .args(["--seed", "13"])
                .env("HG_THREADS", threads)
                .output()
                .unwrap()
        };
        let (a, b) = (out("1"), out("3"));
        let same = a.status.code() == Some(0) && a.stdout == b.stdout && !a.stdout.is_empty();
        ok &= verdict("C13", &format!("{cmd} byte-identical across runs (1 = yes)"), same as u8 as f64, 1.0, same);
    }
    assert!(ok);
}
