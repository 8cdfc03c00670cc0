//! Medium files and the building blocks shared by run configs.
//!
//! Everything is parsed strictly: unknown keys are errors. Medium files may be
//! written in SI units (frequencies in rad/s, positions in metres); they are
//! converted to normalized units on load. Run configs are always normalized.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use crate::dispersion::{Layer, Line, LorentzPart, OscillatorDensity, PermittivityModel, UnitSystem, C_SI};
use crate::error::{Error, Result};
use crate::helmholtz::{Boundary, Grid1D};
use crate::transforms::{ContourRule, ContourSpec, TailModel};

type C = Complex64;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumFile {
    #[serde(default)]
    pub unit_system: UnitSystem,
    #[serde(default = "one")]
    pub background_epsilon: f64,
    #[serde(default)]
    pub layers: Vec<LayerSpec>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerSpec {
    pub interval: [f64; 2],
    #[serde(default)]
    pub lorentz: Vec<LorentzPart>,
    #[serde(default)]
    pub lines: Vec<Line>,
    #[serde(default)]
    pub gap_nu0: f64,
}

impl MediumFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("medium file: {e}")))
    }

    pub fn into_model(self) -> Result<PermittivityModel> {
        let (f, w) = match self.unit_system {
            UnitSystem::Normalized => (1.0, 1.0),
            UnitSystem::Si => (1.0 / C_SI, 1.0 / (C_SI * C_SI)),
        };
        let layers = self
            .layers
            .into_iter()
            .map(|l| {
                let density = OscillatorDensity::new(
                    l.lines.iter().map(|x| Line { nu: x.nu * f, weight: x.weight * w }).collect(),
                    l.lorentz
                        .iter()
                        .map(|p| LorentzPart { wp: p.wp * f, w1: p.w1 * f, gamma: p.gamma * f })
                        .collect(),
                    l.gap_nu0 * f,
                )?;
                Ok(Layer { interval: l.interval, density })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PermittivityModel::new(self.background_epsilon, layers)?.with_unit_system(self.unit_system))
    }
}

/// Read and validate a medium file.
pub fn load_medium(path: &Path) -> Result<PermittivityModel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read medium {}: {e}", path.display())))?;
    MediumFile::parse(&text)?.into_model()
}

/// Resolve `rel` against the directory holding `base`.
pub fn resolve(base: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.parent().unwrap_or(Path::new(".")).join(p)
    }
}

/// Complex number written as `{ re = .., im = .. }`.
#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Cplx {
    pub re: f64,
    pub im: f64,
}

impl From<Cplx> for C {
    fn from(c: Cplx) -> C {
        C::new(c.re, c.im)
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    #[default]
    Dirichlet,
    Bloch,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default)]
    pub boundary: BoundaryKind,
    pub bloch_k: Option<Cplx>,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid1D> {
        let boundary = match (self.boundary, self.bloch_k) {
            (BoundaryKind::Dirichlet, None) => Boundary::Dirichlet,
            (BoundaryKind::Dirichlet, Some(_)) => {
                return Err(Error::Config("bloch_k given for a Dirichlet grid".into()))
            }
            (BoundaryKind::Bloch, k) => Boundary::Bloch(k.map(C::from).unwrap_or_default()),
        };
        Grid1D::new(self.length, self.n, boundary)
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    #[default]
    Trapezoid,
    GaussPanels,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum TailKind {
    #[default]
    InverseSquare,
    None,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourCfg {
    /// Defaults to min γ/2 of the medium (or 0.5 without damping).
    pub eta: Option<f64>,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_points")]
    pub n_points: usize,
    #[serde(default)]
    pub rule: RuleKind,
    #[serde(default)]
    pub tail: TailKind,
}

fn default_half_width() -> f64 {
    400.0
}

fn default_points() -> usize {
    1 << 16
}

impl ContourCfg {
    pub fn build(&self, default_eta: f64) -> Result<ContourSpec> {
        let c = ContourSpec {
            eta: self.eta.unwrap_or(default_eta),
            half_width: self.half_width,
            n_points: self.n_points,
            rule: match self.rule {
                RuleKind::Trapezoid => ContourRule::Trapezoid,
                RuleKind::GaussPanels => ContourRule::GaussPanels,
            },
            tail: match self.tail {
                TailKind::InverseSquare => TailModel::InverseSquare,
                TailKind::None => TailModel::None,
            },
        };
        c.validate()?;
        Ok(c)
    }
}

/// Uniform time grid.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl TimeGrid {
    pub fn build(&self) -> Result<Vec<f64>> {
        if self.count < 2 || !(self.max > self.min) {
            return Err(Error::Config(format!("bad time grid {self:?}")));
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        Ok((0..self.count).map(|i| self.min + i as f64 * step).collect())
    }
}

/// Probe pair (φ, ψ) on a grid.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProbeSpec {
    /// Normalized vacuum sine mode (1-based), φ = ψ.
    ModeIndex { index: usize },
    /// Discrete deltas e_i/h and e_j/h, so the coefficient is G[i][j].
    PointPair { i: usize, j: usize },
    /// Gaussian bump, φ = ψ.
    Gaussian { center: f64, width: f64 },
}

impl ProbeSpec {
    pub fn build(&self, grid: &Grid1D) -> Result<(Vec<C>, Vec<C>)> {
        let n = grid.len();
        match *self {
            ProbeSpec::ModeIndex { index } => {
                if index == 0 || index > n {
                    return Err(Error::Config(format!("mode index {index} outside 1..={n}")));
                }
                let m = crate::helmholtz::sine_mode(grid, index);
                Ok((m.clone(), m))
            }
            ProbeSpec::PointPair { i, j } => {
                if i >= n || j >= n {
                    return Err(Error::Config(format!("point pair ({i}, {j}) outside the grid")));
                }
                let h = grid.spacing();
                let delta = |k: usize| {
                    let mut v = vec![C::new(0.0, 0.0); n];
                    v[k] = C::new(1.0 / h, 0.0);
                    v
                };
                Ok((delta(i), delta(j)))
            }
            ProbeSpec::Gaussian { center, width } => {
                if !(width > 0.0) {
                    return Err(Error::Config(format!("gaussian probe width must be > 0, got {width}")));
                }
                let v: Vec<C> = grid
                    .positions()
                    .iter()
                    .map(|&x| C::new((-(x - center).powi(2) / (2.0 * width * width)).exp(), 0.0))
                    .collect();
                Ok((v.clone(), v))
            }
        }
    }
}

/// Symmetric ν-grid `{ max, count }`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NuGrid {
    pub max: f64,
    pub count: usize,
}

impl NuGrid {
    pub fn build(&self) -> Result<Vec<f64>> {
        if !(self.max > 0.0) || self.count < 3 {
            return Err(Error::Config(format!("bad ν-grid {self:?}")));
        }
        Ok(crate::transforms::symmetric_grid(self.max, self.count))
    }
}

/// Rectangle of complex values, sampled `count[0] × count[1]` times.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZGrid {
    pub re: [f64; 2],
    pub im: [f64; 2],
    pub count: [usize; 2],
    /// Logarithmic spacing in Im z (and in |Re z| on each side of 0 when
    /// the real range is symmetric).
    #[serde(default)]
    pub log: bool,
}

impl ZGrid {
    pub fn build(&self) -> Result<Vec<C>> {
        let [nr, ni] = self.count;
        if nr == 0 || ni == 0 || self.im[0] <= 0.0 || self.im[1] < self.im[0] || self.re[1] < self.re[0] {
            return Err(Error::Config(format!("bad z-grid {self:?}")));
        }
        let lin = |a: f64, b: f64, n: usize, i: usize| if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
        let geo = |a: f64, b: f64, n: usize, i: usize| if n == 1 { a } else { a * (b / a).powf(i as f64 / (n - 1) as f64) };
        let ims: Vec<f64> = (0..ni)
            .map(|i| if self.log { geo(self.im[0], self.im[1], ni, i) } else { lin(self.im[0], self.im[1], ni, i) })
            .collect();
        let res: Vec<f64> = if self.log && self.re[0] < 0.0 && self.re[1] == -self.re[0] && nr % 2 == 0 {
            let half = nr / 2;
            let lo = self.re[1] * 1e-2;
            let pos: Vec<f64> = (0..half).map(|i| geo(lo, self.re[1], half, i)).collect();
            pos.iter().rev().map(|v| -v).chain(pos.iter().copied()).collect()
        } else {
            (0..nr).map(|i| lin(self.re[0], self.re[1], nr, i)).collect()
        };
        Ok(ims.iter().flat_map(|&im| res.iter().map(move |&re| C::new(re, im))).collect())
    }
}

/// Parse any strict TOML config.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Config(format!("{what}: {e}")))
}
