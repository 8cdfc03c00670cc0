//! Cauchy-loop certificates in z, in ξ and in the Bloch wavevector.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Deserialize;

use super::Context;
use crate::config::{Cplx, GridSpec, ProbeSpec};
use crate::dispersion::{PermittivityModel, C_LIGHT};
use crate::error::{Error, Result};
use crate::helmholtz::{Boundary, DiscreteHelmholtz, Grid1D, OperatorKind};
use crate::report::{Report, Row};
use crate::transforms::{cauchy_loop, RectangleLoop};

type C = Complex64;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticityConfig {
    /// Vacuum when absent.
    pub medium: Option<String>,
    pub grid: GridSpec,
    pub probe: ProbeSpec,
    pub loops: Vec<LoopCfg>,
    #[serde(default)]
    pub tolerances: LoopTolerances,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum LoopKind {
    /// ⟨φ, H_e(z)⁻¹ψ⟩ around a rectangle in z.
    Z,
    /// ⟨φ, H(z, ξ)⁻¹ψ⟩ around a rectangle in ξ at `fixed_z`.
    Xi,
    /// ⟨φ, H_k(z)⁻¹ψ⟩ around a rectangle in k at `fixed_z` (Bloch grids).
    K,
    /// conj(z), which has no business passing.
    ConjWitness,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopCfg {
    pub kind: LoopKind,
    pub lo: Cplx,
    pub hi: Cplx,
    #[serde(default = "points")]
    pub n_points: usize,
    pub fixed_z: Option<Cplx>,
    /// "fail" marks a negative control.
    pub expect: Option<String>,
}

fn points() -> usize {
    32
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LoopTolerances {
    pub defect: f64,
    /// A negative control passes when its defect exceeds this.
    pub witness: f64,
    /// Least Im z − c|Im k| allowed on a loop in the joint domain.
    pub joint_margin: f64,
}

impl Default for LoopTolerances {
    fn default() -> Self {
        Self { defect: 1e-8, witness: 1e-2, joint_margin: 0.1 }
    }
}

fn upper(what: &str, lo: C) -> Result<()> {
    if lo.im > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{what} loop must lie in the open upper half-plane, its lower edge is at Im = {}",
            lo.im
        )))
    }
}

fn fixed(l: &LoopCfg) -> Result<C> {
    let z: C = l.fixed_z.ok_or_else(|| Error::Config("this loop needs `fixed_z`".into()))?.into();
    upper("fixed", z)?;
    Ok(z)
}

fn loop_row(model: &PermittivityModel, grid: Grid1D, phi: &[C], psi: &[C], l: &LoopCfg, t: &LoopTolerances) -> Result<Row> {
    let (lo, hi): (C, C) = (l.lo.into(), l.hi.into());
    let rect = RectangleLoop::new(lo, hi, l.n_points)?;
    let coefficient = |g: Grid1D, kind: OperatorKind| DiscreteHelmholtz::assemble(g, model, kind)?.coefficient(phi, psi);
    let (id, defect) = match l.kind {
        LoopKind::Z => {
            upper("z", lo)?;
            if let Boundary::Bloch(k) = grid.boundary() {
                if lo.im - C_LIGHT * k.im.abs() < t.joint_margin {
                    return Err(Error::domain(format!(
                        "z loop leaves the joint domain: Im z − c|Im k| = {} < {}",
                        lo.im - C_LIGHT * k.im.abs(),
                        t.joint_margin
                    )));
                }
            }
            ("cauchy_z", cauchy_loop(|z| coefficient(grid, OperatorKind::Dispersive { z }), &rect)?)
        }
        LoopKind::Xi => {
            upper("ξ", lo)?;
            let z = fixed(l)?;
            ("cauchy_xi", cauchy_loop(|xi| coefficient(grid, OperatorKind::TwoFrequency { z, xi }), &rect)?)
        }
        LoopKind::K => {
            let z = fixed(l)?;
            if !matches!(grid.boundary(), Boundary::Bloch(_)) {
                return Err(Error::Config("k loops need a Bloch grid".into()));
            }
            let worst = C_LIGHT * lo.im.abs().max(hi.im.abs());
            if z.im - worst < t.joint_margin {
                return Err(Error::domain(format!(
                    "k loop leaves the joint domain: Im z − c|Im k| = {} < {}",
                    z.im - worst,
                    t.joint_margin
                )));
            }
            let (length, n) = (grid.length(), grid.len());
            (
                "cauchy_k",
                cauchy_loop(
                    |k| coefficient(Grid1D::bloch(length, n, k)?, OperatorKind::Dispersive { z }),
                    &rect,
                )?,
            )
        }
        LoopKind::ConjWitness => ("cauchy_conj_witness", cauchy_loop(|z| Ok(z.conj()), &rect)?),
    };
    let negative = match l.expect.as_deref() {
        None => false,
        Some("fail") => true,
        Some(other) => return Err(Error::Config(format!("expect must be \"fail\", got {other:?}"))),
    };
    let tol = if negative { t.witness } else { t.defect };
    let row = Row::new(id, defect, 0.0, tol)
        .complex_param("lo", lo)
        .complex_param("hi", hi)
        .param("n_points", l.n_points);
    let row = match l.fixed_z {
        Some(z) => row.complex_param("fixed_z", z.into()),
        None => row,
    };
    Ok(if negative { row.expect_fail() } else { row })
}

pub fn cmd_analyticity(ctx: &Context, cfg: AnalyticityConfig) -> Result<Report> {
    let t = cfg.tolerances;
    if !(t.defect > 0.0 && t.witness > 0.0 && t.joint_margin > 0.0) {
        return Err(Error::Config("tolerances must be > 0".into()));
    }
    if cfg.loops.is_empty() {
        return Err(Error::Config("analyticity config has no loops".into()));
    }
    let model = match &cfg.medium {
        Some(m) => ctx.load_medium(m)?,
        None => PermittivityModel::vacuum(),
    };
    let grid = cfg.grid.build()?;
    let (phi, psi) = cfg.probe.build(&grid)?;
    let rows: Vec<Row> = cfg
        .loops
        .par_iter()
        .map(|l| loop_row(&model, grid, &phi, &psi, l, &t))
        .collect::<Result<_>>()?;
    let mut report = Report::default();
    report.extend(rows);
    Ok(report)
}
