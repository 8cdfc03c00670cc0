//! Time-domain checks: χ(t), X(t) and E(x, t) vanish before their causes.

use num_complex::Complex64;
use serde::Deserialize;

use super::Context;
use crate::config::{ContourCfg, GridSpec, ProbeSpec, TimeGrid};
use crate::dispersion::{default_susceptibility_contour, PermittivityModel};
use crate::error::{Error, Result};
use crate::report::{Report, Row};
use crate::spectral::{causality_split, time_domain_field, x_operator_coefficient, Medium, Reference, SourceProfile};
use crate::transforms::{ContourSpec, TimeSample};

type C = Complex64;

const ALIAS_DAMPING: f64 = 30.0;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CausalityConfig {
    /// Vacuum when absent.
    pub medium: Option<String>,
    pub susceptibility: Option<SusceptibilityCfg>,
    pub x_operator: Option<XOperatorCfg>,
    #[serde(default)]
    pub field: Vec<FieldCfg>,
    pub front: Option<FrontCfg>,
    #[serde(default)]
    pub tolerances: CausalTolerances,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SusceptibilityCfg {
    pub x: f64,
    pub t: TimeGrid,
    pub contour: Option<ContourCfg>,
    /// Compare with the closed form of the Lorentz parts.
    #[serde(default)]
    pub oracle: bool,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    #[default]
    Vacuum,
    None,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XOperatorCfg {
    pub grid: GridSpec,
    pub probe: ProbeSpec,
    #[serde(default)]
    pub reference: ReferenceKind,
    pub t: TimeGrid,
    pub contour: Option<ContourCfg>,
}

/// Spatial source exp(−((x − center)/width)²); `amplitude = 0` switches it off.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceCfg {
    pub center: f64,
    pub width: f64,
    #[serde(default = "unit")]
    pub amplitude: f64,
    pub profile: ProfileCfg,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileCfg {
    Sine { omega_s: f64 },
    Exponential { omega_s: f64 },
}

impl From<ProfileCfg> for SourceProfile {
    fn from(p: ProfileCfg) -> Self {
        match p {
            ProfileCfg::Sine { omega_s } => SourceProfile::Sine { omega_s },
            ProfileCfg::Exponential { omega_s } => SourceProfile::Exponential { omega_s },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldCfg {
    pub label: String,
    /// Overrides the top-level medium.
    pub medium: Option<String>,
    /// Freeze the medium into its non-dispersive form at this frequency.
    pub omega0: Option<f64>,
    pub grid: GridSpec,
    pub source: SourceCfg,
    pub observe: f64,
    pub t: TimeGrid,
    pub contour: Option<ContourCfg>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontCfg {
    pub grid: GridSpec,
    pub source: SourceCfg,
    pub observe: f64,
    pub t: TimeGrid,
    pub contour: Option<ContourCfg>,
    /// Quiet zone ends this many source widths before the light-cone arrival.
    #[serde(default = "three")]
    pub widths: f64,
}

fn three() -> f64 {
    3.0
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CausalTolerances {
    pub causal: f64,
    pub front: f64,
    pub oracle: f64,
    pub real: f64,
}

impl Default for CausalTolerances {
    fn default() -> Self {
        Self { causal: 1e-6, front: 1e-4, oracle: 1e-6, real: 1e-8 }
    }
}

/// Default η is min γ/2, raised when needed so that a non-decaying signal
/// aliased from one period later is damped by e^{−30}.
fn contour(cfg: &Option<ContourCfg>, model: &PermittivityModel) -> Result<ContourSpec> {
    let mut spec = default_susceptibility_contour(model);
    if let Some(c) = cfg {
        spec.half_width = c.half_width;
        spec.n_points = c.n_points;
    }
    let eta = spec.eta.max(ALIAS_DAMPING / spec.alias_period());
    match cfg {
        Some(c) => c.build(eta),
        None => Ok(ContourSpec { eta, ..spec }),
    }
}

fn before_row(id: &str, samples: &[TimeSample], tol: f64) -> Row {
    let (peak, before) = causality_split(samples);
    let err = samples.iter().map(|s| s.error).fold(0.0, f64::max);
    let scale = if peak > 0.0 { peak } else { 1.0 };
    Row::new(id, before / scale, 0.0, tol).param("peak", peak).error(err / scale)
}

fn source_shape(grid: &crate::helmholtz::Grid1D, s: &SourceCfg) -> Result<Vec<C>> {
    if !(s.width > 0.0) {
        return Err(Error::Config(format!("source width must be > 0, got {}", s.width)));
    }
    Ok(grid
        .positions()
        .iter()
        .map(|&x| C::new(s.amplitude * (-((x - s.center) / s.width).powi(2)).exp(), 0.0))
        .collect())
}

pub fn cmd_causality(ctx: &Context, cfg: CausalityConfig) -> Result<Report> {
    let tol = cfg.tolerances;
    for v in [tol.causal, tol.front, tol.oracle, tol.real] {
        if !(v > 0.0) {
            return Err(Error::Config(format!("tolerances must be > 0, got {v}")));
        }
    }
    let model = match &cfg.medium {
        Some(m) => ctx.load_medium(m)?,
        None => PermittivityModel::vacuum(),
    };
    let mut report = Report::default();

    if let Some(s) = &cfg.susceptibility {
        let spec = contour(&s.contour, &model)?;
        let t = s.t.build()?;
        let chi = model.susceptibility(s.x, &t, &spec)?;
        report.push(before_row("chi_causal", &chi, tol.causal).param("x", s.x).param("eta", spec.eta));
        if s.oracle {
            let density = model.density_at(s.x);
            if !density.lines.is_empty() {
                return Err(Error::Config("the χ oracle covers Lorentz parts only".into()));
            }
            let (peak, _) = causality_split(&chi);
            let worst = chi
                .iter()
                .map(|p| {
                    let exact: f64 = density.lorentz.iter().map(|l| l.susceptibility(p.t)).sum();
                    (p.value - exact).norm()
                })
                .fold(0.0, f64::max);
            report.push(Row::new("chi_closed_form", worst / peak, 0.0, tol.oracle).param("x", s.x));
        }
    }

    if let Some(x) = &cfg.x_operator {
        let grid = x.grid.build()?;
        let (phi, psi) = x.probe.build(&grid)?;
        let reference = match x.reference {
            ReferenceKind::Vacuum => Reference::Vacuum,
            ReferenceKind::None => Reference::None,
        };
        let spec = contour(&x.contour, &model)?;
        let t = x.t.build()?;
        let samples = x_operator_coefficient(&Medium::Dispersive(model.clone()), grid, reference, &phi, &psi, &t, &spec)?;
        report.push(before_row("x_causal", &samples, tol.causal).param("eta", spec.eta));
        let (peak, _) = causality_split(&samples);
        let imag = samples.iter().map(|s| s.value.im.abs()).fold(0.0, f64::max);
        report.push(Row::new("x_real", imag / peak.max(f64::MIN_POSITIVE), 0.0, tol.real));
    }

    for f in &cfg.field {
        let m = match &f.medium {
            Some(path) => ctx.load_medium(path)?,
            None => model.clone(),
        };
        let spec = contour(&f.contour, &m)?;
        let medium = match f.omega0 {
            Some(omega0) => Medium::NonDispersive { model: m, omega0 },
            None => Medium::Dispersive(m),
        };
        let grid = f.grid.build()?;
        let shape = source_shape(&grid, &f.source)?;
        let observe = grid.index_of(f.observe);
        let t = f.t.build()?;
        let e = time_domain_field(&medium, grid, &shape, f.source.profile.into(), observe, &t, &spec)?;
        let row = if f.source.amplitude == 0.0 {
            let worst = e.iter().map(|s| s.value.norm()).fold(0.0, f64::max);
            Row::new("zero_source", worst, 0.0, tol.causal)
        } else {
            before_row("field_causal", &e, tol.causal)
        };
        report.push(
            row.param("label", f.label.as_str())
                .param("non_dispersive", f.omega0.is_some())
                .param("eta", spec.eta),
        );
    }

    if let Some(fr) = &cfg.front {
        let vacuum = PermittivityModel::vacuum();
        let spec = contour(&fr.contour, &vacuum)?;
        let grid = fr.grid.build()?;
        let shape = source_shape(&grid, &fr.source)?;
        let observe = grid.index_of(fr.observe);
        let distance = (grid.position(observe) - fr.source.center).abs();
        let quiet_until = distance - fr.widths * fr.source.width;
        let t = fr.t.build()?;
        if !t.iter().any(|&s| s < quiet_until) {
            return Err(Error::Config("front time grid has no samples before the light cone".into()));
        }
        let e = time_domain_field(&Medium::Dispersive(vacuum), grid, &shape, fr.source.profile.into(), observe, &t, &spec)?;
        let peak = e.iter().map(|s| s.value.norm()).fold(0.0, f64::max);
        let early = e
            .iter()
            .filter(|s| s.t < quiet_until)
            .map(|s| s.value.norm())
            .fold(0.0, f64::max);
        let err = e.iter().map(|s| s.error).fold(0.0, f64::max);
        report.push(
            Row::new("front_speed", early / peak, 0.0, tol.front)
                .param("distance", distance)
                .param("quiet_until", quiet_until)
                .param("peak", peak)
                .error(err / peak),
        );
    }

    if report.rows.is_empty() {
        return Err(Error::Config("causality config has no checks".into()));
    }
    Ok(report)
}
