//! Contour integrals along horizontal lines and rectangles in the complex
//! frequency plane.
//!
//! The inverse transform of a function analytic above Im z = η is
//!
//! ```text
//! x(t) = (1/2π) ∫_{Γ_η} e^{−izt} r(z) dz = e^{ηt}/(2π) ∫ e^{−iωt} r(ω + iη) dω
//! ```
//!
//! and vanishes for t < 0 when r is analytic and decays in the upper half-plane.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quad::{pairwise_sum, GaussLegendre};

type C = Complex64;

/// Quadrature rule along Γ_η.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourRule {
    /// Midpoint samples with uniform spacing 2Ω/n.
    Trapezoid,
    /// 16-point Gauss-Legendre panels.
    GaussPanels,
}

/// Known large-|z| behaviour subtracted before the window is truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailModel {
    None,
    /// Fit A/(z + iη)² to the window edges; its transform −A t e^{−ηt} is added
    /// back in closed form.
    InverseSquare,
}

/// Horizontal contour Γ_η truncated to |Re z| ≤ Ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub eta: f64,
    pub half_width: f64,
    pub n_points: usize,
    pub rule: ContourRule,
    pub tail: TailModel,
}

impl ContourSpec {
    pub fn trapezoid(eta: f64, half_width: f64, n_points: usize) -> Self {
        Self {
            eta,
            half_width,
            n_points,
            rule: ContourRule::Trapezoid,
            tail: TailModel::InverseSquare,
        }
    }

    pub fn with_rule(mut self, rule: ContourRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_tail(mut self, tail: TailModel) -> Self {
        self.tail = tail;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::domain(format!("contour height η must be > 0, got {}", self.eta)));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::domain(format!("window half-width must be > 0, got {}", self.half_width)));
        }
        if self.n_points < 16 {
            return Err(Error::domain(format!("contour needs ≥ 16 points, got {}", self.n_points)));
        }
        Ok(())
    }

    /// Period 2π/Δω of the replicas introduced by uniform sampling.
    pub fn alias_period(&self) -> f64 {
        std::f64::consts::PI * self.n_points as f64 / self.half_width
    }

    /// Nodes ω_k and weights on [−Ω, Ω].
    fn nodes(&self) -> (Vec<f64>, Vec<f64>) {
        let omega = self.half_width;
        match self.rule {
            ContourRule::Trapezoid => {
                let dw = 2.0 * omega / self.n_points as f64;
                let nodes = (0..self.n_points)
                    .map(|k| -omega + (k as f64 + 0.5) * dw)
                    .collect();
                (nodes, vec![dw; self.n_points])
            }
            ContourRule::GaussPanels => {
                let rule = GaussLegendre::new(16);
                let panels = self.n_points.div_ceil(16);
                let width = 2.0 * omega / panels as f64;
                let mut nodes = Vec::with_capacity(panels * 16);
                let mut weights = Vec::with_capacity(panels * 16);
                for p in 0..panels {
                    let mid = -omega + (p as f64 + 0.5) * width;
                    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                        nodes.push(mid + 0.5 * width * x);
                        weights.push(0.5 * width * w);
                    }
                }
                (nodes, weights)
            }
        }
    }
}

/// One inverted value with its truncation estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSample {
    pub t: f64,
    pub value: C,
    pub error: f64,
}

/// Edge value above this fraction of the peak is treated as non-decaying.
const DECAY_THRESHOLD: f64 = 1e-2;

/// Numerical inverse transform of `sampler` along Γ_η at each time in `t_grid`.
///
/// Samples are evaluated in parallel; every reduction uses a fixed pairwise
/// order so the output is reproducible bit for bit.
pub fn laplace_invert<F>(sampler: F, contour: &ContourSpec, t_grid: &[f64]) -> Result<Vec<TimeSample>>
where
    F: Fn(C) -> Result<C> + Sync,
{
    contour.validate()?;
    let eta = contour.eta;
    let omega = contour.half_width;
    let (nodes, weights) = contour.nodes();
    let values: Vec<C> = nodes
        .par_iter()
        .map(|&w| sampler(C::new(w, eta)))
        .collect::<Result<_>>()?;

    let z_hi = C::new(omega, eta);
    let z_lo = C::new(-omega, eta);
    let r_hi = sampler(z_hi)?;
    let r_lo = sampler(z_lo)?;
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let edge = r_hi.norm().max(r_lo.norm());
    if peak > 0.0 && edge > DECAY_THRESHOLD * peak {
        return Err(Error::NonDecaying { edge, peak });
    }

    let (amplitude, shift) = match contour.tail {
        TailModel::None => (C::new(0.0, 0.0), 0.0),
        TailModel::InverseSquare => (0.5 * (z_hi * z_hi * r_hi + z_lo * z_lo * r_lo), eta),
    };
    let model = |z: C| {
        let d = z + C::new(0.0, shift);
        amplitude / (d * d)
    };
    let residual: Vec<C> = nodes
        .iter()
        .zip(&values)
        .zip(&weights)
        .map(|((&w, &v), &wt)| (v - model(C::new(w, eta))) * wt)
        .collect();
    let edge_residual = (r_hi - model(z_hi)).norm() + (r_lo - model(z_lo)).norm();

    let out = t_grid
        .par_iter()
        .map(|&t| {
            let terms: Vec<C> = nodes
                .iter()
                .zip(&residual)
                .map(|(&w, &r)| r * C::from_polar(1.0, -w * t))
                .collect();
            let scale = (eta * t).exp() / (2.0 * std::f64::consts::PI);
            let mut value = pairwise_sum(&terms) * scale;
            if t > 0.0 {
                value -= amplitude * t * (-shift * t).exp();
            }
            let error = scale * edge_residual * omega;
            TimeSample { t, value, error }
        })
        .collect();
    Ok(out)
}

/// Axis-aligned rectangle with corners `lo` (bottom-left) and `hi`
/// (top-right), sampled with `n_points` Gauss nodes per edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectangleLoop {
    pub lo: C,
    pub hi: C,
    pub n_points: usize,
}

impl RectangleLoop {
    pub fn new(lo: C, hi: C, n_points: usize) -> Result<Self> {
        if !(hi.re > lo.re && hi.im > lo.im) {
            return Err(Error::domain(format!("degenerate rectangle {lo} .. {hi}")));
        }
        if n_points < 2 {
            return Err(Error::domain("rectangle needs ≥ 2 points per edge"));
        }
        Ok(Self { lo, hi, n_points })
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * ((self.hi.re - self.lo.re) + (self.hi.im - self.lo.im))
    }

    /// Counter-clockwise edges as (start, end).
    fn edges(&self) -> [(C, C); 4] {
        let a = self.lo;
        let b = C::new(self.hi.re, self.lo.im);
        let c = self.hi;
        let d = C::new(self.lo.re, self.hi.im);
        [(a, b), (b, c), (c, d), (d, a)]
    }
}

/// Scale-free analyticity defect |∮ f dz| / (perimeter · max|f|).
pub fn cauchy_loop<F>(sampler: F, rect: &RectangleLoop) -> Result<f64>
where
    F: Fn(C) -> Result<C> + Sync,
{
    let rule = GaussLegendre::new(rect.n_points);
    let points: Vec<(C, C)> = rect
        .edges()
        .iter()
        .flat_map(|&(a, b)| {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(move |(&x, &w)| (mid + half * x, half * w))
                .collect::<Vec<_>>()
        })
        .collect();
    let values: Vec<C> = points
        .par_iter()
        .map(|&(z, _)| sampler(z))
        .collect::<Result<_>>()?;
    let terms: Vec<C> = values.iter().zip(&points).map(|(f, (_, dz))| f * dz).collect();
    let max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(0.0);
    }
    Ok(pairwise_sum(&terms).norm() / (rect.perimeter() * max))
}

/// Symmetrized Lorentzian (1/2π)[ζ/((ν−ω)²+ζ²) + ζ/((ν+ω)²+ζ²)].
pub fn broadened_delta(nu: f64, omega_n: f64, zeta: f64) -> f64 {
    let a = nu - omega_n;
    let b = nu + omega_n;
    (zeta / (a * a + zeta * zeta) + zeta / (b * b + zeta * zeta)) / (2.0 * std::f64::consts::PI)
}

/// Result of `kk_kernel_integral`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelIntegral {
    pub value: C,
    /// Difference against the same rule on every other grid point.
    pub error: f64,
    /// The kernel peak width Im z spans fewer than four grid cells.
    pub coarse_grid: bool,
}

/// −∫ s(ν)/(z² − ν²) dν by the trapezoid rule on a symmetric grid, after
/// replacing s by its even part.
pub fn kk_kernel_integral(nu_grid: &[f64], samples: &[C], z: C) -> Result<KernelIntegral> {
    kernel_integral(nu_grid, samples, |nu| -1.0 / (z * z - nu * nu), z.im)
}

/// Trapezoid integral of s(ν)·kernel(ν) on a symmetric grid, with s replaced
/// by its even part. `width` is the resolution scale the grid must resolve.
pub fn kernel_integral<K>(nu_grid: &[f64], samples: &[C], kernel: K, width: f64) -> Result<KernelIntegral>
where
    K: Fn(f64) -> C,
{
    let n = nu_grid.len();
    if samples.len() != n {
        return Err(Error::Dimension { expected: n, got: samples.len() });
    }
    if width <= 0.0 {
        return Err(Error::domain(format!("kernel integral needs Im z > 0, got {width}")));
    }
    if n < 3 {
        return Err(Error::domain("ν-grid needs at least 3 points"));
    }
    let span = nu_grid[n - 1] - nu_grid[0];
    for i in 0..n {
        if (nu_grid[i] + nu_grid[n - 1 - i]).abs() > 1e-12 * span {
            return Err(Error::domain("ν-grid is not symmetric about 0"));
        }
        if i > 0 && nu_grid[i] <= nu_grid[i - 1] {
            return Err(Error::domain("ν-grid is not increasing"));
        }
    }
    let integrand: Vec<C> = (0..n)
        .map(|i| 0.5 * (samples[i] + samples[n - 1 - i]) * kernel(nu_grid[i]))
        .collect();
    let trapezoid = |stride: usize| {
        let idx: Vec<usize> = (0..n).step_by(stride).collect();
        let terms: Vec<C> = idx
            .windows(2)
            .map(|w| 0.5 * (integrand[w[0]] + integrand[w[1]]) * (nu_grid[w[1]] - nu_grid[w[0]]))
            .collect();
        pairwise_sum(&terms)
    };
    let fine = trapezoid(1);
    let coarse = if (n - 1) % 2 == 0 { trapezoid(2) } else { fine };
    let max_step = nu_grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    Ok(KernelIntegral {
        value: fine,
        error: (fine - coarse).norm(),
        coarse_grid: width < 4.0 * max_step,
    })
}

/// Uniform symmetric grid of `count` points on [−max, max], mirrored exactly.
pub fn symmetric_grid(max: f64, count: usize) -> Vec<f64> {
    let step = 2.0 * max / (count - 1) as f64;
    let half: Vec<f64> = (0..count / 2).map(|i| -(max - i as f64 * step)).collect();
    let mut grid = half.clone();
    if count % 2 == 1 {
        grid.push(0.0);
    }
    grid.extend(half.iter().rev().map(|v| -v));
    grid
}
