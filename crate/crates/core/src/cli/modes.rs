//! Cavity modes: expansion identity, truncation tails, Kramers-Kronig
//! reconstruction of Green coefficients and the weights of spectral peaks.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Deserialize;

use super::Context;
use crate::config::{Cplx, GridSpec, ProbeSpec};
use crate::dispersion::PermittivityModel;
use crate::error::{Error, Result};
use crate::helmholtz::{DiscreteHelmholtz, Grid1D, OperatorKind};
use crate::quad;
use crate::report::{Report, Row};
use crate::spectral::{
    cavity_modes, d_density, d_value, kk_reconstruct_green, mode_expansion_green, reference_coefficient, KernelForm,
    Medium, Reference,
};
use crate::transforms::symmetric_grid;

type C = Complex64;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesConfig {
    pub grid: GridSpec,
    #[serde(default)]
    pub cavity: CavityCfg,
    pub expansion: Option<ExpansionCfg>,
    #[serde(default)]
    pub kk: Vec<KkCase>,
    pub weights: Option<WeightsCfg>,
}

/// Filling of the cavity: a constant `epsilon`, a medium file, or a medium
/// frozen at `omega0`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityCfg {
    pub epsilon: Option<f64>,
    pub medium: Option<String>,
    pub omega0: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionCfg {
    pub points: Vec<Cplx>,
    /// Truncation orders; `N` is always checked against the direct inverse.
    #[serde(default)]
    pub truncations: Vec<usize>,
    #[serde(default = "expansion_tol")]
    pub tolerance: f64,
}

fn expansion_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum FormKind {
    #[default]
    Shifted,
    Limit,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    #[default]
    None,
    Vacuum,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KkCase {
    pub label: String,
    /// Overrides the cavity filling for this case.
    pub cavity: Option<CavityCfg>,
    pub z: Cplx,
    pub zeta: f64,
    pub nu_max: f64,
    /// Grid points per broadening width ζ.
    pub points_per_zeta: f64,
    pub probe: ProbeSpec,
    #[serde(default)]
    pub reference: ReferenceKind,
    #[serde(default)]
    pub form: FormKind,
    pub tolerance: f64,
    /// Repeat at ζ/refine with the same points per ζ and require the error
    /// to shrink by `min_gain`.
    pub refine: Option<f64>,
    #[serde(default = "three")]
    pub min_gain: f64,
}

fn three() -> f64 {
    3.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsCfg {
    pub zeta: f64,
    /// 1-based mode numbers.
    pub modes: Vec<usize>,
    pub probe: ProbeSpec,
    /// Error allowed in units of ζ/ω_1.
    #[serde(default = "five")]
    pub factor: f64,
}

fn five() -> f64 {
    5.0
}

struct Filling {
    medium: Medium,
    constant: Option<f64>,
}

impl CavityCfg {
    fn build(&self, ctx: &Context, grid: &Grid1D) -> Result<Filling> {
        match (&self.medium, self.epsilon) {
            (Some(_), Some(_)) => Err(Error::Config("cavity takes `epsilon` or `medium`, not both".into())),
            (None, eps) => {
                if self.omega0.is_some() {
                    return Err(Error::Config("`omega0` needs a cavity medium".into()));
                }
                let eps = eps.unwrap_or(1.0);
                Ok(Filling {
                    medium: Medium::Dispersive(PermittivityModel::new(eps, vec![])?),
                    constant: Some(eps),
                })
            }
            (Some(path), None) => {
                let model = ctx.load_medium(path)?;
                match self.omega0 {
                    Some(omega0) => {
                        let values = grid
                            .positions()
                            .iter()
                            .map(|&x| model.nondispersive_at(x, omega0))
                            .collect::<Result<Vec<f64>>>()?;
                        let constant = values.iter().all(|&v| v == values[0]).then_some(values[0]);
                        Ok(Filling { medium: Medium::NonDispersive { model, omega0 }, constant })
                    }
                    None => {
                        let constant = (model.layers().is_empty()).then_some(model.background());
                        Ok(Filling { medium: Medium::Dispersive(model), constant })
                    }
                }
            }
        }
    }
}

fn expansion_rows(grid: Grid1D, eps: f64, cfg: &ExpansionCfg) -> Result<Vec<Row>> {
    if !(cfg.tolerance > 0.0) {
        return Err(Error::Config(format!("expansion tolerance must be > 0, got {}", cfg.tolerance)));
    }
    let modes = cavity_modes(grid, eps)?;
    let model = PermittivityModel::new(eps, vec![])?;
    let n = grid.len();
    let mut orders = cfg.truncations.clone();
    orders.retain(|&m| m != n);
    orders.insert(0, n);
    let mut rows = Vec::new();
    for p in &cfg.points {
        let z: C = (*p).into();
        let direct = DiscreteHelmholtz::assemble(grid, &model, OperatorKind::Dispersive { z })?.green_matrix()?;
        let scale = direct.max_abs();
        for &m in &orders {
            let e = mode_expansion_green(&modes, z, m)?;
            if m == n {
                rows.push(
                    Row::new("expansion_identity", e.green.relative_difference(&direct.values), 0.0, cfg.tolerance)
                        .complex_param("z", z)
                        .param("M", m),
                );
            } else {
                let diff = e
                    .green
                    .values
                    .iter()
                    .zip(direct.values.iter())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                rows.push(
                    Row::new("expansion_tail", diff, e.tail_bound, cfg.tolerance * scale)
                        .complex_param("z", z)
                        .param("M", m),
                );
            }
        }
    }
    Ok(rows)
}

fn kk_error(medium: &Medium, grid: Grid1D, case: &KkCase, zeta: f64) -> Result<(f64, f64, bool)> {
    let z: C = case.z.into();
    let (phi, psi) = case.probe.build(&grid)?;
    let step = zeta / case.points_per_zeta;
    let count = 2 * (case.nu_max / step).round() as usize + 1;
    let nu = symmetric_grid(case.nu_max, count);
    let reference = match case.reference {
        ReferenceKind::None => Reference::None,
        ReferenceKind::Vacuum => Reference::Vacuum,
    };
    let density = d_density(medium, grid, reference, &phi, &psi, &nu, zeta)?;
    let ref_value = match reference {
        Reference::Vacuum => reference_coefficient(grid, &phi, &psi, z)?,
        Reference::None => C::new(0.0, 0.0),
    };
    let form = match case.form {
        FormKind::Shifted => KernelForm::Shifted,
        FormKind::Limit => KernelForm::Limit,
    };
    let rec = kk_reconstruct_green(&density, z, ref_value, form)?;
    let exact = medium.operator(grid, z)?.coefficient(&phi, &psi)?;
    let scale = exact.norm();
    Ok(((rec.value - exact).norm() / scale, rec.error / scale, rec.coarse_grid))
}

fn kk_rows(ctx: &Context, grid: Grid1D, default: &CavityCfg, case: &KkCase) -> Result<Vec<Row>> {
    if !(case.tolerance > 0.0 && case.zeta > 0.0 && case.nu_max > 0.0 && case.points_per_zeta >= 1.0) {
        return Err(Error::Config(format!("bad kk case `{}`", case.label)));
    }
    let filling = case.cavity.as_ref().unwrap_or(default).build(ctx, &grid)?;
    let (err, est, coarse) = kk_error(&filling.medium, grid, case, case.zeta)?;
    let z: C = case.z.into();
    let mut rows = vec![Row::new("kk_green", err, 0.0, case.tolerance)
        .param("label", case.label.as_str())
        .complex_param("z", z)
        .param("zeta", case.zeta)
        .param("coarse_grid", coarse)
        .error(est)];
    if let Some(r) = case.refine {
        if !(r > 1.0 && case.min_gain > 0.0) {
            return Err(Error::Config(format!("refine must be > 1 in kk case `{}`", case.label)));
        }
        let (fine, _, _) = kk_error(&filling.medium, grid, case, case.zeta / r)?;
        rows.push(
            Row::new("kk_green_zeta_scaling", fine / err, 1.0 / case.min_gain, 0.0)
                .param("label", case.label.as_str())
                .param("zeta", case.zeta)
                .param("refine", r)
                .param("error_fine", fine),
        );
    }
    Ok(rows)
}

fn weight_rows(grid: Grid1D, eps: f64, medium: &Medium, cfg: &WeightsCfg) -> Result<Vec<Row>> {
    if !(cfg.zeta > 0.0 && cfg.factor > 0.0) {
        return Err(Error::Config("weights need ζ > 0 and factor > 0".into()));
    }
    let modes = cavity_modes(grid, eps)?;
    let (phi, psi) = cfg.probe.build(&grid)?;
    let omegas = modes.omegas();
    let w1 = omegas[0];
    let total: f64 = (0..modes.len()).map(|n| (modes.overlap(&phi, n).conj() * modes.overlap(&psi, n)).re).sum();
    let zeta = cfg.zeta;
    let mut rows = Vec::new();
    for &index in &cfg.modes {
        if index == 0 || index > modes.len() {
            return Err(Error::Config(format!("mode {index} outside 1..={}", modes.len())));
        }
        let n = index - 1;
        let w = omegas[n];
        let gap_below = if n == 0 { 2.0 * w } else { w - omegas[n - 1] };
        let gap_above = omegas.get(n + 1).map(|v| v - w).unwrap_or(gap_below);
        let half = 0.5 * gap_below.min(gap_above);
        let target = 0.5 * (modes.overlap(&phi, n).conj() * modes.overlap(&psi, n)).re;
        for (sign, centre) in [("+", w), ("-", -w)] {
            let breaks: Vec<f64> = [-1.0, -0.1, -0.02, -0.004, 0.0, 0.004, 0.02, 0.1, 1.0]
                .iter()
                .map(|k| centre + k * half)
                .collect();
            let integral = quad::adaptive(
                |nu| {
                    d_value(medium, grid, Reference::None, &phi, &psi, C::new(nu, zeta)).map_or(C::new(f64::NAN, 0.0), |d| -d)
                },
                &breaks,
                1e-12,
                1e-10,
                4000,
            )?;
            if !integral.value.re.is_finite() {
                return Err(Error::domain("spectral density could not be evaluated"));
            }
            let measured = (integral.value - target).norm() / (0.5 * total);
            rows.push(
                Row::new("peak_weight", measured, cfg.factor * zeta / w1, 0.0)
                    .param("mode", index)
                    .param("side", sign)
                    .param("omega_n", w)
                    .param("zeta", zeta)
                    .param("target", target)
                    .error(integral.error / (0.5 * total)),
            );
        }
    }
    Ok(rows)
}

pub fn cmd_modes(ctx: &Context, cfg: ModesConfig) -> Result<Report> {
    let grid = cfg.grid.build()?;
    let filling = cfg.cavity.build(ctx, &grid)?;
    let mut report = Report::default();
    if let Some(e) = &cfg.expansion {
        let eps = filling
            .constant
            .ok_or_else(|| Error::Config("the mode expansion needs a uniform non-dispersive cavity".into()))?;
        report.extend(expansion_rows(grid, eps, e)?);
    }
    let kk: Vec<Vec<Row>> = cfg
        .kk
        .par_iter()
        .map(|case| kk_rows(ctx, grid, &cfg.cavity, case))
        .collect::<Result<_>>()?;
    report.extend(kk.into_iter().flatten());
    if let Some(w) = &cfg.weights {
        let eps = filling
            .constant
            .ok_or_else(|| Error::Config("peak weights need a uniform non-dispersive cavity".into()))?;
        report.extend(weight_rows(grid, eps, &filling.medium, w)?);
    }
    if report.rows.is_empty() {
        return Err(Error::Config("modes config has no checks".into()));
    }
    Ok(report)
}
