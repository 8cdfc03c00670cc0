//! Solves, Green samples, reciprocity and the resolvent norm bound.

use std::io::Write;

use num_complex::Complex64;
use rand::RngExt;
use rayon::prelude::*;
use serde::Deserialize;

use super::Context;
use crate::config::{Cplx, GridSpec, ProbeSpec, ZGrid};
use crate::dispersion::{PermittivityModel, C_LIGHT};
use crate::error::{Error, Result};
use crate::helmholtz::{norm_bound, Boundary, DiscreteHelmholtz, GreenSamples, Grid1D, OperatorKind};
use crate::report::{format_complex, Report, Row};

type C = Complex64;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreenConfig {
    /// Vacuum when absent.
    pub medium: Option<String>,
    pub grid: GridSpec,
    #[serde(default)]
    pub points: Vec<Cplx>,
    /// Real probe pair for the reflection row; a centred Gaussian by default.
    pub probe: Option<ProbeSpec>,
    pub norm_sweep: Option<NormSweep>,
    /// Writes G[i][j] for every entry of `points` when set.
    pub green_output: Option<String>,
    #[serde(default)]
    pub tolerances: GreenTolerances,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormSweep {
    pub z_grid: ZGrid,
    /// Independent ξ samples per z for the two-frequency operator.
    #[serde(default = "five")]
    pub xi_per_z: usize,
}

fn five() -> usize {
    5
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GreenTolerances {
    pub reciprocity: f64,
    pub schwarz: f64,
    pub residual: f64,
    /// Relative slack on the norm bound.
    pub norm: f64,
    /// Allowed factor over the Bloch margin bound.
    pub bloch_factor: f64,
}

impl Default for GreenTolerances {
    fn default() -> Self {
        Self { reciprocity: 1e-12, schwarz: 1e-12, residual: 1e-10, norm: 1e-8, bloch_factor: 2.0 }
    }
}

fn bloch_bound(grid: &Grid1D, z: C) -> Option<f64> {
    match grid.boundary() {
        Boundary::Bloch(k) => Some(1.0 / (z.norm() * (z.im - C_LIGHT * k.im.abs()))),
        Boundary::Dirichlet => None,
    }
}

fn norm_rows(grid: Grid1D, model: &PermittivityModel, kind: OperatorKind, t: &GreenTolerances) -> Result<Row> {
    let z = kind.z();
    let op = DiscreteHelmholtz::assemble(grid, model, kind)?;
    let measured = op.inverse_norm()?;
    let base = match kind {
        OperatorKind::TwoFrequency { .. } => "norm_bound_two_freq",
        _ => "norm_bound",
    };
    let row = match bloch_bound(&grid, z) {
        Some(b) => Row::new(format!("{base}_bloch"), measured, b, (t.bloch_factor - 1.0) * b).param("exploratory", true),
        None => {
            let b = norm_bound(z);
            Row::new(base, measured, b, t.norm * b)
        }
    };
    let row = row.complex_param("z", z);
    Ok(match kind {
        OperatorKind::TwoFrequency { xi, .. } => row.complex_param("xi", xi),
        _ => row,
    })
}

fn write_green(path: &std::path::Path, samples: &[GreenSamples]) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(format!("writing {}: {e}", path.display()));
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    writeln!(out, "z,i,j,x_i,x_j,value").map_err(io)?;
    for g in samples {
        let xs = g.grid.positions();
        let z = format_complex(g.z);
        for i in 0..xs.len() {
            for j in 0..xs.len() {
                writeln!(out, "{z},{i},{j},{},{},{}", xs[i], xs[j], format_complex(g.values[(i, j)])).map_err(io)?;
            }
        }
    }
    out.flush().map_err(io)
}

pub fn cmd_green(ctx: &Context, cfg: GreenConfig) -> Result<Report> {
    let t = cfg.tolerances;
    for v in [t.reciprocity, t.schwarz, t.residual, t.norm] {
        if !(v > 0.0) {
            return Err(Error::Config(format!("tolerances must be > 0, got {v}")));
        }
    }
    if !(t.bloch_factor >= 1.0) {
        return Err(Error::Config(format!("bloch_factor must be ≥ 1, got {}", t.bloch_factor)));
    }
    let model = match &cfg.medium {
        Some(m) => ctx.load_medium(m)?,
        None => PermittivityModel::vacuum(),
    };
    let grid = cfg.grid.build()?;
    let points: Vec<C> = cfg.points.iter().map(|&p| p.into()).collect();
    if let Some(z) = points.iter().find(|z| z.im <= 0.0) {
        return Err(Error::domain(format!("Green samples need Im z > 0, got z = {z}")));
    }
    let probe = cfg.probe.unwrap_or(ProbeSpec::Gaussian {
        center: 0.5 * grid.length(),
        width: 0.1 * grid.length(),
    });
    let (phi, psi) = probe.build(&grid)?;
    let source: Vec<C> = {
        let mut rng = ctx.rng(3);
        (0..grid.len()).map(|_| C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
    };
    let periodic = matches!(grid.boundary(), Boundary::Bloch(_));

    let mut report = Report::default();
    let mut greens = Vec::new();
    for &z in &points {
        let op = DiscreteHelmholtz::assemble(grid, &model, OperatorKind::Dispersive { z })?;
        let sol = op.solve(&source)?;
        report.push(Row::new("solve_residual", sol.residual, 0.0, t.residual).complex_param("z", z));
        let g = op.green_matrix()?;
        if !periodic {
            report.push(Row::new("reciprocity", g.reciprocity_defect(), 0.0, t.reciprocity).complex_param("z", z));
            let mirror = DiscreteHelmholtz::assemble(grid, &model, OperatorKind::Dispersive { z: -z.conj() })?;
            let a = mirror.coefficient(&phi, &psi)?;
            let b = op.coefficient(&phi, &psi)?.conj();
            report.push(Row::new("schwarz_coefficient", (a - b).norm() / b.norm(), 0.0, t.schwarz).complex_param("z", z));
        }
        report.push(norm_rows(grid, &model, OperatorKind::Dispersive { z }, &t)?);
        if cfg.green_output.is_some() {
            greens.push(g);
        }
    }

    if let Some(sweep) = cfg.norm_sweep {
        let zs = sweep.z_grid.build()?;
        let [re, im] = [sweep.z_grid.re, sweep.z_grid.im];
        let mut rng = ctx.rng(2);
        let xis: Vec<Vec<C>> = zs
            .iter()
            .map(|_| {
                (0..sweep.xi_per_z)
                    .map(|_| {
                        let u = rng.random::<f64>();
                        let v = rng.random::<f64>();
                        C::new(re[0] + (re[1] - re[0]) * u, im[0] * (im[1] / im[0]).powf(v))
                    })
                    .collect()
            })
            .collect();
        let rows: Vec<Vec<Row>> = zs
            .par_iter()
            .zip(xis.par_iter())
            .map(|(&z, xs)| {
                let mut rows = vec![norm_rows(grid, &model, OperatorKind::Dispersive { z }, &t)?];
                for &xi in xs {
                    rows.push(norm_rows(grid, &model, OperatorKind::TwoFrequency { z, xi }, &t)?);
                }
                Ok(rows)
            })
            .collect::<Result<_>>()?;
        report.extend(rows.into_iter().flatten());
    }

    if let Some(out) = &cfg.green_output {
        write_green(&ctx.resolve(out), &greens)?;
    }
    Ok(report)
}
