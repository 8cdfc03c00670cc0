//! Dispersive permittivity models.
//!
//! A medium is described by a nonnegative, even oscillator density σ(ν) made of
//! discrete lines and closed-form Lorentz parts. The permittivity at a complex
//! frequency z in the closed upper half-plane is the Kramers-Kronig transform
//!
//! ```text
//! ε(z) = ε_b − ∫ σ(ν) / (z² − ν²) dν
//! ```
//!
//! which for the two building blocks has the closed forms
//!
//! ```text
//! line (ν_j, w_j):      σ = w_j [δ(ν − ν_j) + δ(ν + ν_j)]   →   −2 w_j / (z² − ν_j²)
//! Lorentz (ωp, ω1, γ):  σ = ωp² γ ν² / (π [(ω1² − ν²)² + γ² ν²])   →   ωp² / (ω1² − z² − iγz)
//! ```
//!
//! All quantities are in normalized units (ε0 = μ0 = c = 1).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::transforms::{self, ContourSpec, TimeSample};

type C = Complex64;

/// Vacuum permittivity in normalized units.
pub const EPS0: f64 = 1.0;
/// Vacuum permeability in normalized units.
pub const MU0: f64 = 1.0;
/// Speed of light in normalized units.
pub const C_LIGHT: f64 = 1.0;
/// Speed of light in m/s, used when reading SI media.
pub const C_SI: f64 = 299_792_458.0;
/// Minimum |z² − ν²| (and Lorentz denominator) accepted by evaluation.
pub const POLE_FLOOR: f64 = 1e-12;

/// Complex frequency z = ω + iη. Operations state whether they need Im z > 0.
pub type ComplexFrequency = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    #[default]
    Normalized,
    #[serde(rename = "SI", alias = "si")]
    Si,
}

/// Discrete oscillator at ±ν with weight w on each side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Line {
    pub nu: f64,
    pub weight: f64,
}

/// Damped Lorentz oscillator: plasma frequency, resonance, damping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LorentzPart {
    pub wp: f64,
    pub w1: f64,
    pub gamma: f64,
}

impl LorentzPart {
    /// Permittivity contribution ωp² / (ω1² − z² − iγz).
    pub fn contribution(&self, z: C) -> Result<C> {
        let den = self.denominator(z);
        if den.norm() < POLE_FLOOR {
            return Err(Error::PoleProximity {
                what: "ω1² − z² − iγz".into(),
                distance: den.norm(),
                floor: POLE_FLOOR,
            });
        }
        Ok(self.wp * self.wp / den)
    }

    fn denominator(&self, z: C) -> C {
        C::new(self.w1 * self.w1, 0.0) - z * z - C::i() * self.gamma * z
    }

    /// Continuous density ωp² γ ν² / (π [(ω1² − ν²)² + γ² ν²]).
    pub fn density(&self, nu: f64) -> f64 {
        let nu2 = nu * nu;
        let d = self.w1 * self.w1 - nu2;
        self.wp * self.wp * self.gamma * nu2 / (std::f64::consts::PI * (d * d + self.gamma * self.gamma * nu2))
    }

    /// Closed-form susceptibility ωp² e^{−γt/2} sin(ω̃t)/ω̃ for t > 0.
    ///
    /// Covers the over-damped case through the analytic continuation of
    /// sin(ω̃t)/ω̃ to imaginary ω̃.
    pub fn susceptibility(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let disc = self.w1 * self.w1 - 0.25 * self.gamma * self.gamma;
        let decay = (-0.5 * self.gamma * t).exp();
        let shape = if disc > 0.0 {
            let w = disc.sqrt();
            (w * t).sin() / w
        } else if disc < 0.0 {
            let w = (-disc).sqrt();
            (w * t).sinh() / w
        } else {
            t
        };
        self.wp * self.wp * decay * shape
    }
}

/// What `sigma_eval` reports at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSample {
    pub continuous: f64,
    /// Lines with |ν_j| within the requested window around |ν|.
    pub lines: Vec<Line>,
}

/// Nonnegative, even oscillator density σ(ν).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OscillatorDensity {
    pub lines: Vec<Line>,
    pub lorentz: Vec<LorentzPart>,
    /// Lowest support frequency ν0 (0 if none).
    pub gap: f64,
}

/// Adaptive quadrature settings for Kramers-Kronig integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-11,
            max_panels: 4000,
        }
    }
}

/// Value together with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

impl OscillatorDensity {
    pub fn vacuum() -> Self {
        Self::default()
    }

    pub fn new(lines: Vec<Line>, lorentz: Vec<LorentzPart>, gap: f64) -> Result<Self> {
        let d = Self { lines, lorentz, gap };
        d.validate()?;
        Ok(d)
    }

    pub fn lorentz(wp: f64, w1: f64, gamma: f64) -> Result<Self> {
        Self::new(vec![], vec![LorentzPart { wp, w1, gamma }], 0.0)
    }

    pub fn line(nu: f64, weight: f64) -> Result<Self> {
        Self::new(vec![Line { nu, weight }], vec![], 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for l in &self.lines {
            if !(l.nu > 0.0 && l.nu.is_finite()) || !(l.weight > 0.0 && l.weight.is_finite()) {
                return Err(Error::InvalidModel(format!(
                    "line needs ν > 0 and w > 0, got ν = {}, w = {}",
                    l.nu, l.weight
                )));
            }
        }
        for p in &self.lorentz {
            if !(p.wp > 0.0 && p.w1 > 0.0 && p.gamma > 0.0)
                || !(p.wp.is_finite() && p.w1.is_finite() && p.gamma.is_finite())
            {
                return Err(Error::InvalidModel(format!(
                    "Lorentz part needs ωp, ω1, γ > 0, got ({}, {}, {})",
                    p.wp, p.w1, p.gamma
                )));
            }
        }
        if !(self.gap >= 0.0 && self.gap.is_finite()) {
            return Err(Error::InvalidModel(format!("gap ν0 must be ≥ 0, got {}", self.gap)));
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty() && self.lorentz.is_empty()
    }

    /// Continuous part of σ at ν (even in ν).
    pub fn continuous(&self, nu: f64) -> f64 {
        self.lorentz.iter().map(|p| p.density(nu)).sum()
    }

    /// σ at ν: continuous value plus the lines within `window` of |ν|.
    pub fn sigma_eval(&self, nu: f64, window: f64) -> SigmaSample {
        let a = nu.abs();
        SigmaSample {
            continuous: self.continuous(a),
            lines: self
                .lines
                .iter()
                .filter(|l| (l.nu - a).abs() <= window)
                .copied()
                .collect(),
        }
    }

    /// ∫σ dν = ∂tχ(0⁺), from the closed forms.
    pub fn chi_dot_at_zero(&self) -> f64 {
        let lines: f64 = self.lines.iter().map(|l| 2.0 * l.weight).sum();
        let lorentz: f64 = self.lorentz.iter().map(|p| EPS0 * p.wp * p.wp).sum();
        lines + lorentz
    }

    /// Closed-form ε(z) − ε_b.
    pub fn relative_permittivity(&self, z: C) -> Result<C> {
        if z.im < 0.0 {
            return Err(Error::domain(format!("Im z = {} < 0", z.im)));
        }
        if z.im == 0.0 && !self.lines.is_empty() {
            return Err(Error::domain(
                "undamped lines cannot be evaluated on the real axis",
            ));
        }
        let z2 = z * z;
        let mut acc = C::new(0.0, 0.0);
        for l in &self.lines {
            let den = z2 - l.nu * l.nu;
            if den.norm() < POLE_FLOOR {
                return Err(Error::PoleProximity {
                    what: "z² − ν_j²".into(),
                    distance: den.norm(),
                    floor: POLE_FLOOR,
                });
            }
            acc -= 2.0 * l.weight / den;
        }
        for p in &self.lorentz {
            acc += EPS0 * p.contribution(z)?;
        }
        Ok(acc)
    }

    /// d/dz of `relative_permittivity`.
    pub fn derivative(&self, z: C) -> Result<C> {
        if z.im <= 0.0 {
            return Err(Error::domain(format!("derivative needs Im z > 0, got {}", z.im)));
        }
        let z2 = z * z;
        let mut acc = C::new(0.0, 0.0);
        for l in &self.lines {
            let den = z2 - l.nu * l.nu;
            if den.norm() < POLE_FLOOR {
                return Err(Error::PoleProximity {
                    what: "z² − ν_j²".into(),
                    distance: den.norm(),
                    floor: POLE_FLOOR,
                });
            }
            acc += 4.0 * l.weight * z / (den * den);
        }
        for p in &self.lorentz {
            let den = p.denominator(z);
            acc += EPS0 * p.wp * p.wp * (2.0 * z + C::i() * p.gamma) / (den * den);
        }
        Ok(acc)
    }

    /// −∫σ(ν)/(z² − ν²) dν by quadrature of the continuous part, plus the
    /// exact line terms.
    pub fn kk_integral(&self, z: C, quad_spec: QuadratureSpec) -> Result<Estimate<C>> {
        if z.im <= 0.0 {
            return Err(Error::domain(format!("Kramers-Kronig quadrature needs Im z > 0, got {}", z.im)));
        }
        let z2 = z * z;
        let mut value = C::new(0.0, 0.0);
        for l in &self.lines {
            value -= 2.0 * l.weight / (z2 - l.nu * l.nu);
        }
        if self.lorentz.is_empty() {
            return Ok(Estimate { value, error: 0.0 });
        }
        // σ and the kernel are both even: integrate over ν > 0 and double
        let integrand = |nu: f64| -2.0 * self.continuous(nu) / (z2 - nu * nu);
        let (breaks, cut) = self.breakpoints(z.re.abs().max(z.norm()));
        let body = quad::adaptive(integrand, &breaks, quad_spec.abs_tol, quad_spec.rel_tol, quad_spec.max_panels)?;
        let tail = quad::adaptive_semi_infinite(
            integrand,
            cut,
            cut,
            quad_spec.abs_tol,
            quad_spec.rel_tol,
            quad_spec.max_panels,
        )?;
        value += body.value + tail.value;
        Ok(Estimate {
            value,
            error: body.error + tail.error,
        })
    }

    /// ∫σ dν over the whole axis by quadrature (lines added exactly).
    pub fn sigma_integral(&self, quad_spec: QuadratureSpec) -> Result<Estimate<f64>> {
        let lines: f64 = self.lines.iter().map(|l| 2.0 * l.weight).sum();
        if self.lorentz.is_empty() {
            return Ok(Estimate { value: lines, error: 0.0 });
        }
        let integrand = |nu: f64| C::new(2.0 * self.continuous(nu), 0.0);
        let (breaks, cut) = self.breakpoints(0.0);
        let body = quad::adaptive(integrand, &breaks, quad_spec.abs_tol, quad_spec.rel_tol, quad_spec.max_panels)?;
        let tail =
            quad::adaptive_semi_infinite(integrand, cut, cut, quad_spec.abs_tol, quad_spec.rel_tol, quad_spec.max_panels)?;
        Ok(Estimate {
            value: lines + body.value.re + tail.value.re,
            error: body.error + tail.error,
        })
    }

    // Panel breakpoints on [0, cut]: resonances, their half-widths and |z|.
    fn breakpoints(&self, extra: f64) -> (Vec<f64>, f64) {
        let mut pts = vec![0.0];
        let mut top: f64 = extra;
        for p in &self.lorentz {
            for k in [-8.0, -2.0, -0.5, 0.0, 0.5, 2.0, 8.0] {
                let x = p.w1 + k * p.gamma;
                if x > 0.0 {
                    pts.push(x);
                }
            }
            top = top.max(p.w1 + 10.0 * p.gamma);
        }
        if extra > 0.0 {
            pts.push(extra);
        }
        let cut = 2.0 * top.max(1.0);
        pts.push(cut);
        (pts, cut)
    }

    /// Dielectric constant of the transparent medium obtained by freezing the
    /// Kramers-Kronig form at the real frequency ω0:
    /// ε0 + ∫_{|ν|≥ν0} σ(ν)/(ν² − ω0²) dν.
    ///
    /// Only line densities can have a spectral gap; any Lorentz part has
    /// support down to ν = 0 and is rejected.
    pub fn build_nondispersive(&self, omega0: f64) -> Result<f64> {
        if !(omega0 > 0.0) {
            return Err(Error::domain(format!("ω0 must be > 0, got {omega0}")));
        }
        if self.is_empty() {
            return Ok(EPS0);
        }
        if !(self.gap > omega0) {
            return Err(Error::GapViolation(format!(
                "gap ν0 = {} must exceed ω0 = {omega0}",
                self.gap
            )));
        }
        if !self.lorentz.is_empty() {
            return Err(Error::GapViolation(
                "Lorentz parts have support at every frequency below ν0".into(),
            ));
        }
        if let Some(l) = self.lines.iter().find(|l| l.nu < self.gap) {
            return Err(Error::GapViolation(format!(
                "line at ν = {} lies inside the gap ν0 = {}",
                l.nu, self.gap
            )));
        }
        let sum: f64 = self
            .lines
            .iter()
            .map(|l| 2.0 * l.weight / (l.nu * l.nu - omega0 * omega0))
            .sum();
        Ok(EPS0 + sum)
    }
}

/// ξ = ν + (ω0² − ν²)/z, the second frequency that reproduces the
/// non-dispersive operator term by term.
pub fn xi_map(z: C, nu: f64, omega0: f64) -> Result<C> {
    if z.norm() == 0.0 {
        return Err(Error::domain("ξ-map undefined at z = 0"));
    }
    Ok(C::new(nu, 0.0) + C::new(omega0 * omega0 - nu * nu, 0.0) / z)
}

/// Phase velocity 1/√(εμ0) of a non-dispersive medium.
pub fn phase_velocity(eps: f64) -> f64 {
    1.0 / (eps * MU0).sqrt()
}

/// A layer occupying [x0, x1) of the 1D axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub interval: [f64; 2],
    pub density: OscillatorDensity,
}

impl Layer {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.interval[0] && x < self.interval[1]
    }
}

/// Layered dispersive medium on the 1D axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PermittivityModel {
    background: f64,
    layers: Vec<Layer>,
    unit_system: UnitSystem,
}

static VACUUM_DENSITY: OscillatorDensity = OscillatorDensity {
    lines: Vec::new(),
    lorentz: Vec::new(),
    gap: 0.0,
};

impl PermittivityModel {
    pub fn vacuum() -> Self {
        Self {
            background: EPS0,
            layers: vec![],
            unit_system: UnitSystem::Normalized,
        }
    }

    /// Build a model in normalized units. Layers may not overlap and the
    /// background must be ≥ ε0 (a passive, causal constant).
    pub fn new(background: f64, layers: Vec<Layer>) -> Result<Self> {
        if !(background >= EPS0 && background.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "background permittivity {background} is below ε0"
            )));
        }
        for l in &layers {
            if !(l.interval[0] < l.interval[1]) {
                return Err(Error::InvalidModel(format!("empty layer interval {:?}", l.interval)));
            }
            l.density.validate()?;
        }
        let mut sorted: Vec<&Layer> = layers.iter().collect();
        sorted.sort_by(|a, b| a.interval[0].partial_cmp(&b.interval[0]).unwrap());
        for w in sorted.windows(2) {
            if w[1].interval[0] < w[0].interval[1] {
                return Err(Error::InvalidModel(format!(
                    "layers {:?} and {:?} overlap",
                    w[0].interval, w[1].interval
                )));
            }
        }
        Ok(Self {
            background,
            layers,
            unit_system: UnitSystem::Normalized,
        })
    }

    /// Homogeneous medium: one layer covering the whole axis.
    pub fn homogeneous(density: OscillatorDensity) -> Result<Self> {
        Self::new(
            EPS0,
            vec![Layer {
                interval: [f64::NEG_INFINITY, f64::INFINITY],
                density,
            }],
        )
    }

    pub fn with_unit_system(mut self, units: UnitSystem) -> Self {
        self.unit_system = units;
        self
    }

    pub fn background(&self) -> f64 {
        self.background
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn unit_system(&self) -> UnitSystem {
        self.unit_system
    }

    pub fn is_vacuum(&self) -> bool {
        self.background == EPS0 && self.layers.iter().all(|l| l.density.is_empty())
    }

    pub fn density_at(&self, x: f64) -> &OscillatorDensity {
        self.layers
            .iter()
            .find(|l| l.contains(x))
            .map(|l| &l.density)
            .unwrap_or(&VACUUM_DENSITY)
    }

    /// Smallest Lorentz damping in the model, if any.
    pub fn min_damping(&self) -> Option<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.density.lorentz.iter().map(|p| p.gamma))
            .reduce(f64::min)
    }

    pub fn has_lines(&self) -> bool {
        self.layers.iter().any(|l| !l.density.lines.is_empty())
    }

    /// ε(x, z) for Im z ≥ 0.
    pub fn eval_permittivity(&self, x: f64, z: C) -> Result<C> {
        if z.im < 0.0 {
            return Err(Error::domain(format!("Im z = {} < 0", z.im)));
        }
        Ok(self.background + self.density_at(x).relative_permittivity(z)?)
    }

    /// Im{z[ε(x,z) − ε0]} for Im z > 0.
    pub fn passivity_margin(&self, x: f64, z: C) -> Result<f64> {
        if z.im <= 0.0 {
            return Err(Error::domain(format!("passivity margin needs Im z > 0, got {}", z.im)));
        }
        Ok((z * (self.eval_permittivity(x, z)? - EPS0)).im)
    }

    pub fn permittivity_derivative(&self, x: f64, z: C) -> Result<C> {
        self.density_at(x).derivative(z)
    }

    pub fn chi_dot_at_zero(&self, x: f64) -> f64 {
        self.density_at(x).chi_dot_at_zero()
    }

    /// Largest ∂tχ(0⁺) over the layers.
    pub fn max_chi_dot(&self) -> f64 {
        self.layers
            .iter()
            .map(|l| l.density.chi_dot_at_zero())
            .fold(0.0, f64::max)
    }

    /// z²[ε(x,z) − ε_b] + ∂tχ(x,0⁺) at z = ω + iη.
    pub fn high_freq_deviation(&self, x: f64, eta: f64, omega: f64) -> Result<C> {
        if eta <= 0.0 {
            return Err(Error::domain(format!("η must be > 0, got {eta}")));
        }
        let z = C::new(omega, eta);
        let density = self.density_at(x);
        Ok(z * z * density.relative_permittivity(z)? + density.chi_dot_at_zero())
    }

    /// Kramers-Kronig reconstruction of ε(x, z).
    pub fn kk_reconstruct_permittivity(&self, x: f64, z: C, quad_spec: QuadratureSpec) -> Result<Estimate<C>> {
        let r = self.density_at(x).kk_integral(z, quad_spec)?;
        Ok(Estimate {
            value: self.background + r.value,
            error: r.error,
        })
    }

    /// χ(x, t) by numerical inversion of ε(x, z) − ε0 along Im z = η.
    pub fn susceptibility(&self, x: f64, t_grid: &[f64], contour: &ContourSpec) -> Result<Vec<TimeSample>> {
        if self.background != EPS0 {
            // a constant offset is δ(t) in the time domain
            return Err(Error::domain(
                "susceptibility of a background ε_b ≠ ε0 is a distribution",
            ));
        }
        let density = self.density_at(x).clone();
        transforms::laplace_invert(move |z| density.relative_permittivity(z), contour, t_grid)
    }

    /// Dielectric constant per layer from `build_nondispersive`, or the
    /// background outside the layers.
    pub fn nondispersive_at(&self, x: f64, omega0: f64) -> Result<f64> {
        let d = self.density_at(x);
        Ok(self.background - EPS0 + d.build_nondispersive(omega0)?)
    }
}

/// Default contour for susceptibility inversion: η = min γ / 2 and a window
/// wide enough for the 1/ω² tail.
pub fn default_susceptibility_contour(model: &PermittivityModel) -> ContourSpec {
    let eta = model.min_damping().map(|g| 0.5 * g).unwrap_or(0.5);
    ContourSpec::trapezoid(eta, 400.0, 1 << 16)
}
