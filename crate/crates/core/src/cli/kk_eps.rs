//! Kramers-Kronig round trip, passivity, sum rule and reflection symmetry of ε.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Deserialize;

use super::{shifted_halton, Context};
use crate::config::ZGrid;
use crate::dispersion::{PermittivityModel, QuadratureSpec};
use crate::error::{Error, Result};
use crate::report::{Report, Row};

type C = Complex64;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KkEpsConfig {
    pub medium: String,
    /// Sample positions; defaults to one point inside each layer.
    pub positions: Option<Vec<f64>>,
    pub z_grid: Option<ZGrid>,
    #[serde(default)]
    pub passivity: PassivityCfg,
    #[serde(default)]
    pub quadrature: QuadCfg,
    #[serde(default)]
    pub tolerances: KkTolerances,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PassivityCfg {
    pub samples: usize,
    pub re_max: f64,
    pub im: [f64; 2],
}

impl Default for PassivityCfg {
    fn default() -> Self {
        Self { samples: 10_000, re_max: 50.0, im: [1e-3, 50.0] }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadCfg {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadCfg {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self { abs_tol: q.abs_tol, rel_tol: q.rel_tol, max_panels: q.max_panels }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KkTolerances {
    pub kk_relative: f64,
    pub passivity: f64,
    pub sum_rule: f64,
    pub schwarz: f64,
}

impl Default for KkTolerances {
    fn default() -> Self {
        Self { kk_relative: 1e-6, passivity: 1e-12, sum_rule: 1e-8, schwarz: 1e-14 }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be > 0, got {v}")))
    }
}

fn default_positions(model: &PermittivityModel) -> Vec<f64> {
    if model.layers().is_empty() {
        return vec![0.0];
    }
    model
        .layers()
        .iter()
        .map(|l| {
            let [a, b] = l.interval;
            match (a.is_finite(), b.is_finite()) {
                (true, true) => 0.5 * (a + b),
                (true, false) => a + 1.0,
                (false, true) => b - 1.0,
                (false, false) => 0.0,
            }
        })
        .collect()
}

/// 20×20 log grid reaching three times the highest resonance, with
/// Im z ≥ 0.1·min γ.
fn default_z_grid(model: &PermittivityModel) -> ZGrid {
    let top = model
        .layers()
        .iter()
        .flat_map(|l| {
            let d = &l.density;
            d.lorentz.iter().map(|p| p.w1.max(p.wp)).chain(d.lines.iter().map(|x| x.nu))
        })
        .fold(0.0, f64::max);
    let span = if top > 0.0 { 3.0 * top } else { 10.0 };
    let lo = model.min_damping().map(|g| 0.1 * g).unwrap_or(1e-3 * span);
    ZGrid { re: [-span, span], im: [lo, span], count: [20, 20], log: true }
}

pub fn cmd_kk_eps(ctx: &Context, cfg: KkEpsConfig) -> Result<Report> {
    let t = cfg.tolerances;
    for (n, v) in [
        ("kk_relative", t.kk_relative),
        ("passivity", t.passivity),
        ("sum_rule", t.sum_rule),
        ("schwarz", t.schwarz),
    ] {
        positive(n, v)?;
    }
    let model = ctx.load_medium(&cfg.medium)?;
    let positions = cfg.positions.clone().unwrap_or_else(|| default_positions(&model));
    let zs = cfg.z_grid.unwrap_or_else(|| default_z_grid(&model)).build()?;
    let quad = QuadratureSpec {
        abs_tol: cfg.quadrature.abs_tol,
        rel_tol: cfg.quadrature.rel_tol,
        max_panels: cfg.quadrature.max_panels,
    };
    let mut report = Report::default();

    for &x in &positions {
        let rows: Vec<Row> = zs
            .par_iter()
            .map(|&z| {
                let exact = model.eval_permittivity(x, z)?;
                let kk = model.kk_reconstruct_permittivity(x, z, quad)?;
                let scale = exact.norm();
                Ok(Row::new("kk_roundtrip", (kk.value - exact).norm() / scale, 0.0, t.kk_relative)
                    .param("x", x)
                    .complex_param("z", z)
                    .error(kk.error / scale))
            })
            .collect::<Result<_>>()?;
        report.extend(rows);

        let schwarz = zs
            .iter()
            .map(|&z| {
                let a = model.eval_permittivity(x, -z.conj())?;
                let b = model.eval_permittivity(x, z)?.conj();
                Ok((a - b).norm() / b.norm())
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        report.push(Row::new("schwarz_reflection", schwarz, 0.0, t.schwarz).param("x", x).param("points", zs.len()));
    }

    let p = cfg.passivity;
    if p.samples == 0 || !(p.re_max > 0.0) || !(p.im[0] > 0.0 && p.im[1] > p.im[0]) {
        return Err(Error::Config(format!("bad passivity block {p:?}")));
    }
    let points: Vec<C> = shifted_halton(ctx, 1, p.samples)
        .into_iter()
        .map(|[u, v]| C::new(p.re_max * (2.0 * u - 1.0), p.im[0] * (p.im[1] / p.im[0]).powf(v)))
        .collect();
    for &x in &positions {
        let margins = points
            .par_iter()
            .map(|&z| model.passivity_margin(x, z))
            .collect::<Result<Vec<f64>>>()?;
        let worst = margins.iter().copied().fold(f64::INFINITY, f64::min);
        report.push(
            Row::new("passivity", (-worst).max(0.0), 0.0, t.passivity)
                .param("x", x)
                .param("samples", p.samples)
                .param("min_margin", worst),
        );
    }

    for (i, layer) in model.layers().iter().enumerate() {
        let exact = layer.density.chi_dot_at_zero();
        let q = layer.density.sigma_integral(quad)?;
        let scale = if exact > 0.0 { exact } else { 1.0 };
        report.push(
            Row::new("sum_rule", (q.value - exact).abs() / scale, 0.0, t.sum_rule)
                .param("layer", i)
                .param("chi_dot", exact)
                .error(q.error / scale),
        );
    }
    if model.layers().is_empty() {
        report.push(Row::new("sum_rule", model.chi_dot_at_zero(0.0), 0.0, t.sum_rule).param("layer", "background"));
    }
    Ok(report)
}
