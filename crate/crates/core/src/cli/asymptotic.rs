//! Large-|z| behaviour: free-space coefficient defects along rays and the
//! resolvent-difference cap.

use serde::Deserialize;

use super::Context;
use crate::config::GridSpec;
use crate::error::{Error, Result};
use crate::freespace::{asymptotic_defect, FreeQuadrature, TestField3D, Vec3};
use crate::helmholtz::resolvent_difference_ray;
use crate::report::{Report, Row};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoticConfig {
    pub phi: FieldSpec,
    /// Same as `phi` when absent.
    pub psi: Option<FieldSpec>,
    #[serde(default)]
    pub rays: Vec<RayCfg>,
    pub orthogonal: Option<OrthogonalCfg>,
    #[serde(default)]
    pub quadrature: QuadCfg,
    pub resolvent: Option<ResolventCfg>,
    #[serde(default)]
    pub tolerances: AsymptoticTolerances,
}

/// Gaussian test field given by its k-space envelope.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub width: f64,
    pub polarization: Vec3,
    #[serde(default)]
    pub position: Vec3,
    #[serde(default)]
    pub center: Vec3,
}

impl FieldSpec {
    fn build(&self) -> Result<TestField3D> {
        TestField3D::new(
            self.center,
            self.width,
            self.polarization.map(|p| num_complex::Complex64::new(p, 0.0)),
            self.position,
        )
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayCfg {
    pub theta: f64,
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrthogonalCfg {
    pub phi: FieldSpec,
    pub psi: FieldSpec,
    pub theta: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadCfg {
    pub radial_panels: usize,
    pub radial_order: usize,
    pub polar: usize,
    pub azimuthal: usize,
    pub widths: f64,
}

impl Default for QuadCfg {
    fn default() -> Self {
        let q = FreeQuadrature::default();
        Self {
            radial_panels: q.radial_panels,
            radial_order: q.radial_order,
            polar: q.polar,
            azimuthal: q.azimuthal,
            widths: q.widths,
        }
    }
}

impl From<QuadCfg> for FreeQuadrature {
    fn from(q: QuadCfg) -> Self {
        FreeQuadrature {
            radial_panels: q.radial_panels,
            radial_order: q.radial_order,
            polar: q.polar,
            azimuthal: q.azimuthal,
            widths: q.widths,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolventCfg {
    pub medium: String,
    pub grid: GridSpec,
    pub etas: Vec<f64>,
    pub omegas: Vec<f64>,
    /// Rows are written for ω at or above this.
    #[serde(default = "hundred")]
    pub omega_min: f64,
    #[serde(default = "cap")]
    pub cap: f64,
}

fn hundred() -> f64 {
    100.0
}

fn cap() -> f64 {
    1.5
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AsymptoticTolerances {
    /// Final defect relative to ‖φ‖‖ψ‖.
    pub final_defect: f64,
    pub orthogonal: f64,
}

impl Default for AsymptoticTolerances {
    fn default() -> Self {
        Self { final_defect: 1e-3, orthogonal: 1e-3 }
    }
}

fn ray_rows(phi: &TestField3D, psi: &TestField3D, rays: &[RayCfg], quad: &FreeQuadrature, t: &AsymptoticTolerances) -> Result<Vec<Row>> {
    let scale = (phi.norm_sqr() * psi.norm_sqr()).sqrt();
    let mut rows = Vec::new();
    let mut ladders = Vec::new();
    for ray in rays {
        if ray.radii.len() < 2 || ray.radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("ray radii must be increasing with at least two rungs".into()));
        }
        let d = asymptotic_defect(phi, psi, &ray.radii, ray.theta, quad)?;
        let worst_ratio = d.windows(2).map(|w| w[1].value / w[0].value).fold(0.0, f64::max);
        let defects: Vec<f64> = d.iter().map(|e| e.value).collect();
        let err = d.iter().map(|e| e.error).fold(0.0, f64::max);
        rows.push(
            Row::new("defect_decreasing", worst_ratio, 1.0, 0.0)
                .param("theta", ray.theta)
                .param("radii", ray.radii.clone())
                .param("defects", defects.clone())
                .error(err / scale),
        );
        let last = d.last().expect("at least two rungs");
        rows.push(
            Row::new("defect_final", last.value / scale, 0.0, t.final_defect)
                .param("theta", ray.theta)
                .param("radius", *ray.radii.last().expect("at least two rungs"))
                .error(last.error / scale),
        );
        ladders.push((ray.theta, ray.radii.clone(), defects));
    }
    let quarter = std::f64::consts::FRAC_PI_4;
    let half = std::f64::consts::FRAC_PI_2;
    let find = |th: f64| ladders.iter().find(|(t, _, _)| (t - th).abs() < 1e-12);
    if let (Some(a), Some(b)) = (find(quarter), find(half)) {
        if a.1 == b.1 {
            let worst = b.2.iter().zip(&a.2).map(|(x, y)| x / y).fold(0.0, f64::max);
            rows.push(Row::new("defect_angle_ordering", worst, 1.0, 0.0).param("radii", a.1.clone()));
        }
    }
    Ok(rows)
}

pub fn cmd_asymptotic(ctx: &Context, cfg: AsymptoticConfig) -> Result<Report> {
    let t = cfg.tolerances;
    if !(t.final_defect > 0.0 && t.orthogonal > 0.0) {
        return Err(Error::Config("tolerances must be > 0".into()));
    }
    let quad: FreeQuadrature = cfg.quadrature.into();
    let phi = cfg.phi.build()?;
    let psi = cfg.psi.unwrap_or(cfg.phi).build()?;
    let mut report = Report::default();
    report.extend(ray_rows(&phi, &psi, &cfg.rays, &quad, &t)?);

    if let Some(o) = &cfg.orthogonal {
        let (a, b) = (o.phi.build()?, o.psi.build()?);
        let scale = (a.norm_sqr() * b.norm_sqr()).sqrt();
        let inner = a.inner(&b).norm() / scale;
        let d = asymptotic_defect(&a, &b, &[o.radius], o.theta, &quad)?[0];
        report.push(
            Row::new("orthogonal_limit", d.value / scale, 0.0, t.orthogonal)
                .param("theta", o.theta)
                .param("radius", o.radius)
                .param("inner", inner)
                .error(d.error / scale),
        );
    }

    if let Some(r) = &cfg.resolvent {
        if r.etas.is_empty() || r.etas.iter().any(|&e| !(e > 0.0)) || !(r.cap > 0.0) {
            return Err(Error::Config("resolvent block needs η > 0 and cap > 0".into()));
        }
        let model = ctx.load_medium(&r.medium)?;
        let grid = r.grid.build()?;
        let chi_dot = model.max_chi_dot();
        let omegas: Vec<f64> = r.omegas.iter().copied().filter(|&w| w >= r.omega_min).collect();
        if omegas.is_empty() {
            return Err(Error::Config("no resolvent frequencies at or above omega_min".into()));
        }
        let mut caps = Vec::new();
        for &eta in &r.etas {
            let bound = r.cap * chi_dot / (eta * eta);
            caps.push(bound);
            let norms = resolvent_difference_ray(&model, grid, eta, &omegas)?;
            for (&w, &n) in omegas.iter().zip(&norms) {
                report.push(Row::new("resolvent_cap", n, bound, 0.0).param("eta", eta).param("omega", w));
            }
        }
        for (pair, cap_pair) in r.etas.windows(2).zip(caps.windows(2)) {
            let expected = (pair[1] / pair[0]).powi(2);
            report.push(
                Row::new("resolvent_cap_scaling", (cap_pair[0] / cap_pair[1] / expected - 1.0).abs(), 0.0, 1e-12)
                    .param("etas", pair.to_vec()),
            );
        }
    }
    if report.rows.is_empty() {
        return Err(Error::Config("asymptotic config has no checks".into()));
    }
    Ok(report)
}
