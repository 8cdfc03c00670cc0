//! Cavity eigenmodes, spectral densities of the relative resolvent, and the
//! Kramers-Kronig reconstruction of the Green's function.
//!
//! With R(z) = H_e(z)⁻¹ − H_ref(z)⁻¹ the density
//!
//! ```text
//! D(ξ) = [ξR(ξ) − conj(ξ)·R(−conj ξ)] / (2πi),   ξ = ν + iζ
//! ```
//!
//! is the anti-Hermitian part of ξR(ξ). For a lossless cavity it is a sum of
//! Lorentzians of width ζ at ±ω_n carrying weight −½⟨φ, φ_n⟩⟨φ_n, ψ⟩ each,
//! and zR(z) = −∫ D(ξ)/(z − ξ) dν for Im z > ζ.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dispersion::{PermittivityModel, EPS0, MU0};
use crate::error::{Error, Result};
use crate::helmholtz::{Boundary, DiscreteHelmholtz, GreenSamples, Grid1D, OperatorKind};
use crate::transforms::{self, ContourSpec, TimeSample};

type C = Complex64;

/// Floor on |z² − ω_n²| for mode sums.
pub const RESONANCE_FLOOR: f64 = 1e-10;

/// ε-weighted orthonormal eigenmodes of a uniform Dirichlet cavity.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    grid: Grid1D,
    epsilon: f64,
    omegas: Vec<f64>,
    modes: Vec<Vec<f64>>,
}

impl ModeSet {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn mode(&self, n: usize) -> &[f64] {
        &self.modes[n]
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// Mode n as a complex vector.
    pub fn mode_complex(&self, n: usize) -> Vec<C> {
        self.modes[n].iter().map(|&v| C::new(v, 0.0)).collect()
    }

    /// Overlap ⟨φ, φ_n⟩ = h·Σ conj(φ_i) φ_n(i).
    pub fn overlap(&self, phi: &[C], n: usize) -> C {
        self.grid.inner(phi, &self.mode_complex(n))
    }

    /// h·Σ ε φ_n φ_m for all pairs.
    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.len();
        let h = self.grid.spacing();
        DMatrix::from_fn(n, n, |a, b| {
            self.epsilon * MU0 * h * self.modes[a].iter().zip(&self.modes[b]).map(|(x, y)| x * y).sum::<f64>()
        })
    }
}

/// Eigenmodes of L = −(εμ0)⁻¹ d²/dx² on a Dirichlet grid, ω_n increasing.
pub fn cavity_modes(grid: Grid1D, epsilon: f64) -> Result<ModeSet> {
    if grid.boundary() != Boundary::Dirichlet {
        return Err(Error::domain("cavity modes need Dirichlet walls"));
    }
    if !(epsilon >= EPS0 && epsilon.is_finite()) {
        return Err(Error::domain(format!("cavity permittivity must be real and ≥ ε0, got {epsilon}")));
    }
    let n = grid.len();
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    let scale = 1.0 / (epsilon * MU0);
    let op = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => 2.0 * inv_h2 * scale,
        1 => -inv_h2 * scale,
        _ => 0.0,
    });
    let eig = SymmetricEigen::new(op);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let norm = (epsilon * MU0 * h).sqrt();
    let mut omegas = Vec::with_capacity(n);
    let mut modes = Vec::with_capacity(n);
    for &k in &order {
        omegas.push(eig.eigenvalues[k].max(0.0).sqrt());
        let col: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        let len = col.iter().map(|v| v * v).sum::<f64>().sqrt() * norm;
        // fix the sign so the first sample is positive
        let sign = if col[0] < 0.0 { -1.0 } else { 1.0 };
        modes.push(col.iter().map(|v| sign * v / len).collect());
    }
    Ok(ModeSet {
        grid,
        epsilon,
        omegas,
        modes,
    })
}

/// Truncated mode sum with a bound on the discarded tail.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeExpansion {
    pub green: GreenSamples,
    /// Σ_{n>M} max_i φ_n(i)² / |z² − ω_n²|, an entry-wise cap on the tail.
    pub tail_bound: f64,
}

/// G_ij = Σ_{n<M} φ_n(i) φ_n(j) / (z² − ω_n²).
pub fn mode_expansion_green(modes: &ModeSet, z: C, truncation: usize) -> Result<ModeExpansion> {
    let n = modes.len();
    if truncation == 0 || truncation > n {
        return Err(Error::domain(format!("truncation M must be in 1..={n}, got {truncation}")));
    }
    let z2 = z * z;
    let denoms: Vec<C> = modes
        .omegas
        .iter()
        .map(|&w| {
            let d = z2 - w * w;
            if d.norm() < RESONANCE_FLOOR {
                Err(Error::PoleProximity {
                    what: "z² − ω_n²".into(),
                    distance: d.norm(),
                    floor: RESONANCE_FLOOR,
                })
            } else {
                Ok(d)
            }
        })
        .collect::<Result<_>>()?;
    let mut values = DMatrix::<C>::zeros(n, n);
    for (k, d) in denoms.iter().enumerate().take(truncation) {
        let phi = &modes.modes[k];
        let inv = 1.0 / d;
        for j in 0..n {
            let pj = phi[j] * inv;
            for i in 0..n {
                values[(i, j)] += phi[i] * pj;
            }
        }
    }
    let tail_bound = denoms
        .iter()
        .enumerate()
        .skip(truncation)
        .map(|(k, d)| {
            let peak = modes.modes[k].iter().map(|v| v * v).fold(0.0, f64::max);
            peak / d.norm()
        })
        .sum();
    Ok(ModeExpansion {
        green: GreenSamples {
            grid: modes.grid,
            z,
            values,
        },
        tail_bound,
    })
}

/// Medium whose resolvent enters R(z).
#[derive(Debug, Clone, PartialEq)]
pub enum Medium {
    Dispersive(PermittivityModel),
    /// Frozen dielectric constant built at ω0.
    NonDispersive { model: PermittivityModel, omega0: f64 },
}

impl Medium {
    pub fn operator(&self, grid: Grid1D, z: C) -> Result<DiscreteHelmholtz> {
        match self {
            Medium::Dispersive(m) => DiscreteHelmholtz::assemble(grid, m, OperatorKind::Dispersive { z }),
            Medium::NonDispersive { model, omega0 } => {
                DiscreteHelmholtz::assemble(grid, model, OperatorKind::NonDispersive { z, omega0: *omega0 })
            }
        }
    }

    pub fn is_vacuum(&self) -> bool {
        match self {
            Medium::Dispersive(m) | Medium::NonDispersive { model: m, .. } => m.is_vacuum(),
        }
    }
}

/// Reference resolvent subtracted in R(z).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// Vacuum operator on the same grid.
    Vacuum,
    /// No subtraction: R = H_e⁻¹.
    None,
}

/// ⟨φ, R(z)ψ⟩.
pub fn relative_coefficient(medium: &Medium, grid: Grid1D, reference: Reference, phi: &[C], psi: &[C], z: C) -> Result<C> {
    let full = medium.operator(grid, z)?.coefficient(phi, psi)?;
    Ok(match reference {
        Reference::None => full,
        Reference::Vacuum => full - reference_coefficient(grid, phi, psi, z)?,
    })
}

/// ⟨φ, H_0(z)⁻¹ψ⟩ on the vacuum grid.
pub fn reference_coefficient(grid: Grid1D, phi: &[C], psi: &[C], z: C) -> Result<C> {
    DiscreteHelmholtz::vacuum(grid, z)?.coefficient(phi, psi)
}

/// Samples of ⟨φ, D(ν + iζ)ψ⟩ on a symmetric ν-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    pub nu: Vec<f64>,
    pub zeta: f64,
    pub reference: Reference,
    pub samples: Vec<C>,
}

impl SpectralDensity {
    /// max |D(ν) − D(−ν)| / max |D|.
    pub fn evenness_defect(&self) -> f64 {
        let n = self.samples.len();
        let max = self.max_abs();
        if max == 0.0 {
            return 0.0;
        }
        (0..n)
            .map(|i| (self.samples[i] - self.samples[n - 1 - i]).norm())
            .fold(0.0, f64::max)
            / max
    }

    /// max |Im D| / max |D|.
    pub fn imaginary_defect(&self) -> f64 {
        let max = self.max_abs();
        if max == 0.0 {
            return 0.0;
        }
        self.samples.iter().map(|v| v.im.abs()).fold(0.0, f64::max) / max
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// ⟨φ, D(ξ)ψ⟩ at one ξ from direct solves at ξ and −conj ξ.
pub fn d_value(medium: &Medium, grid: Grid1D, reference: Reference, phi: &[C], psi: &[C], xi: C) -> Result<C> {
    let mirror = -xi.conj();
    let a = relative_coefficient(medium, grid, reference, phi, psi, xi)?;
    let b = relative_coefficient(medium, grid, reference, phi, psi, mirror)?;
    Ok((xi * a - xi.conj() * b) / (C::new(0.0, 2.0 * std::f64::consts::PI)))
}

/// D(ν + iζ) sampled on `nu_grid`.
pub fn d_density(
    medium: &Medium,
    grid: Grid1D,
    reference: Reference,
    phi: &[C],
    psi: &[C],
    nu_grid: &[f64],
    zeta: f64,
) -> Result<SpectralDensity> {
    if !(zeta > 0.0) {
        return Err(Error::domain(format!("broadening ζ must be > 0, got {zeta}")));
    }
    let samples = if medium.is_vacuum() && reference == Reference::Vacuum {
        vec![C::new(0.0, 0.0); nu_grid.len()]
    } else {
        nu_grid
            .par_iter()
            .map(|&nu| d_value(medium, grid, reference, phi, psi, C::new(nu, zeta)))
            .collect::<Result<_>>()?
    };
    Ok(SpectralDensity {
        nu: nu_grid.to_vec(),
        zeta,
        reference,
        samples,
    })
}

/// Kernel used to rebuild the coefficient from D.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelForm {
    /// −∫ D(ν + iζ)/(z² − ν²) dν, exact only as ζ ↓ 0.
    Limit,
    /// −(1/z)∫ D(ν + iζ)/(z − ν − iζ) dν, exact for Im z > ζ.
    Shifted,
}

/// Reconstructed coefficient with quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reconstruction {
    pub value: C,
    pub error: f64,
    pub coarse_grid: bool,
}

/// ⟨φ, H_e(z)⁻¹ψ⟩ = reference + Kramers-Kronig integral of the density.
///
/// `reference_value` is ⟨φ, H_0(z)⁻¹ψ⟩ for a vacuum-subtracted density and is
/// ignored otherwise.
pub fn kk_reconstruct_green(density: &SpectralDensity, z: C, reference_value: C, form: KernelForm) -> Result<Reconstruction> {
    if z.im <= 0.0 {
        return Err(Error::domain(format!("reconstruction needs Im z > 0, got {}", z.im)));
    }
    let integral = match form {
        KernelForm::Limit => transforms::kk_kernel_integral(&density.nu, &density.samples, z)?,
        KernelForm::Shifted => {
            if z.im <= density.zeta {
                return Err(Error::domain(format!(
                    "shifted kernel needs Im z > ζ, got Im z = {} and ζ = {}",
                    z.im, density.zeta
                )));
            }
            let zeta = density.zeta;
            transforms::kernel_integral(
                &density.nu,
                &density.samples,
                |nu| -1.0 / (z * (z - C::new(nu, zeta))),
                z.im - zeta,
            )?
        }
    };
    let base = match density.reference {
        Reference::Vacuum => reference_value,
        Reference::None => C::new(0.0, 0.0),
    };
    Ok(Reconstruction {
        value: base + integral.value,
        error: integral.error,
        coarse_grid: integral.coarse_grid,
    })
}

/// X(t) = ∫_{Γ_η} e^{−izt} ⟨φ, R(z)ψ⟩ dz at each t.
pub fn x_operator_coefficient(
    medium: &Medium,
    grid: Grid1D,
    reference: Reference,
    phi: &[C],
    psi: &[C],
    t_grid: &[f64],
    contour: &ContourSpec,
) -> Result<Vec<TimeSample>> {
    if medium.is_vacuum() && reference == Reference::Vacuum {
        contour.validate()?;
        return Ok(t_grid
            .iter()
            .map(|&t| TimeSample { t, value: C::new(0.0, 0.0), error: 0.0 })
            .collect());
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let out = transforms::laplace_invert(
        |z| relative_coefficient(medium, grid, reference, phi, psi, z),
        contour,
        t_grid,
    )?;
    Ok(out
        .into_iter()
        .map(|s| TimeSample {
            t: s.t,
            value: s.value * two_pi,
            error: s.error * two_pi,
        })
        .collect())
}

/// Time profile of a source switched on at t = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceProfile {
    /// e^{−iω_s t}·step(t), transform i/(z − ω_s).
    Exponential { omega_s: f64 },
    /// sin(ω_s t)·step(t), transform ω_s/(ω_s² − z²).
    Sine { omega_s: f64 },
}

impl SourceProfile {
    /// ∫_0^∞ J(t) e^{izt} dt.
    pub fn transform(&self, z: C) -> C {
        match *self {
            SourceProfile::Exponential { omega_s } => C::i() / (z - omega_s),
            SourceProfile::Sine { omega_s } => omega_s / (omega_s * omega_s - z * z),
        }
    }
}

/// E(x_obs, t) from H(z)E = −izμ0 Ĵ(z) with Ĵ(z) = profile(z)·shape.
pub fn time_domain_field(
    medium: &Medium,
    grid: Grid1D,
    shape: &[C],
    profile: SourceProfile,
    observe: usize,
    t_grid: &[f64],
    contour: &ContourSpec,
) -> Result<Vec<TimeSample>> {
    if observe >= grid.len() {
        return Err(Error::domain(format!("observation index {observe} outside the grid")));
    }
    if shape.len() != grid.len() {
        return Err(Error::Dimension { expected: grid.len(), got: shape.len() });
    }
    if shape.iter().all(|v| *v == C::new(0.0, 0.0)) {
        contour.validate()?;
        return Ok(t_grid
            .iter()
            .map(|&t| TimeSample { t, value: C::new(0.0, 0.0), error: 0.0 })
            .collect());
    }
    transforms::laplace_invert(
        |z| {
            let factor = -C::i() * z * MU0 * profile.transform(z);
            let src: Vec<C> = shape.iter().map(|v| v * factor).collect();
            Ok(medium.operator(grid, z)?.apply_inverse(&src)?[observe])
        },
        contour,
        t_grid,
    )
}

/// Largest |value| over samples with t ≥ 0, and over t < 0.
pub fn causality_split(samples: &[TimeSample]) -> (f64, f64) {
    let mut peak: f64 = 0.0;
    let mut before: f64 = 0.0;
    for s in samples {
        if s.t < 0.0 {
            before = before.max(s.value.norm());
        } else {
            peak = peak.max(s.value.norm());
        }
    }
    (peak, before)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{Layer, OscillatorDensity};
    use crate::helmholtz::sine_mode;
    use crate::transforms::{broadened_delta, symmetric_grid};

    fn cavity(n: usize) -> Grid1D {
        Grid1D::dirichlet(std::f64::consts::PI, n).unwrap()
    }

    fn gaussian(grid: &Grid1D, center: f64, width: f64) -> Vec<C> {
        grid.positions()
            .iter()
            .map(|&x| C::new((-(x - center).powi(2) / (2.0 * width * width)).exp(), 0.0))
            .collect()
    }

    #[test]
    fn discrete_dispersion_relation() {
        let g = cavity(63);
        let m = cavity_modes(g, 1.0).unwrap();
        let h = g.spacing();
        for (n, w) in m.omegas().iter().enumerate() {
            let oracle = 2.0 / h * ((n + 1) as f64 * std::f64::consts::PI * h / (2.0 * g.length())).sin();
            assert!((w - oracle).abs() < 1e-12 * oracle.max(1.0), "n = {n}");
        }
        assert!(m.omegas().windows(2).all(|w| w[1] > w[0]));
        assert!((m.omegas()[0] - 1.0).abs() < 1e-3);
        let gram = m.gram();
        let id = DMatrix::<f64>::identity(63, 63);
        assert!((gram - id).abs().max() < 1e-10);
        for n in 0..3 {
            let exact = sine_mode(&g, n + 1);
            let ov = g.inner(&exact, &m.mode_complex(n)).norm();
            assert!(ov > 1.0 - 1e-10);
        }
    }

    #[test]
    fn weighted_modes_scale_with_epsilon() {
        let g = cavity(31);
        let a = cavity_modes(g, 1.0).unwrap();
        let b = cavity_modes(g, 4.0).unwrap();
        for (x, y) in a.omegas().iter().zip(b.omegas()) {
            assert!((x / 2.0 - y).abs() < 1e-12 * x);
        }
        assert!((b.gram() - DMatrix::<f64>::identity(31, 31)).abs().max() < 1e-10);
        assert!(cavity_modes(g, 0.5).is_err());
        assert!(cavity_modes(Grid1D::bloch(1.0, 16, C::new(0.0, 0.0)).unwrap(), 1.0).is_err());
    }

    #[test]
    fn full_expansion_equals_inverse() {
        let g = cavity(64);
        let eps = 2.25;
        let modes = cavity_modes(g, eps).unwrap();
        let model = PermittivityModel::new(eps, vec![]).unwrap();
        for z in [C::new(0.0, 0.5), C::new(1.3, 0.2)] {
            let direct = DiscreteHelmholtz::assemble(g, &model, OperatorKind::Dispersive { z })
                .unwrap()
                .green_matrix()
                .unwrap();
            let exp = mode_expansion_green(&modes, z, 64).unwrap();
            assert!(exp.green.relative_difference(&direct.values) < 1e-10);
            assert_eq!(exp.tail_bound, 0.0);
            let half = mode_expansion_green(&modes, z, 32).unwrap();
            let diff = (half.green.values.clone() - direct.values.clone()).map(|v| v.norm()).max();
            assert!(diff <= half.tail_bound);
        }
    }

    #[test]
    fn single_mode_collapse() {
        let g = cavity(40);
        let modes = cavity_modes(g, 1.0).unwrap();
        let phi = modes.mode_complex(0);
        let z = C::new(0.3, 0.7);
        let c = DiscreteHelmholtz::vacuum(g, z).unwrap().coefficient(&phi, &phi).unwrap();
        let w = modes.omegas()[0];
        assert!((c - 1.0 / (z * z - w * w)).norm() < 1e-12);
        assert!(mode_expansion_green(&modes, C::new(w, 0.0), 5).is_err());
    }

    #[test]
    fn density_is_broadened_mode_sum() {
        let g = cavity(48);
        let modes = cavity_modes(g, 1.0).unwrap();
        let medium = Medium::NonDispersive { model: PermittivityModel::vacuum(), omega0: 0.5 };
        let phi = gaussian(&g, 1.2, 0.3);
        let grid = symmetric_grid(5.0, 201);
        let d = d_density(&medium, g, Reference::None, &phi, &phi, &grid, 0.05).unwrap();
        assert!(d.evenness_defect() < 1e-10);
        assert!(d.imaginary_defect() < 1e-10);
        for (k, &nu) in grid.iter().enumerate().step_by(17) {
            let oracle: f64 = (0..modes.len())
                .map(|n| -modes.overlap(&phi, n).norm_sqr() * broadened_delta(nu, modes.omegas()[n], 0.05))
                .sum();
            assert!((d.samples[k].re - oracle).abs() < 1e-9 * (1.0 + oracle.abs()), "ν = {nu}");
        }
    }

    #[test]
    fn vacuum_density_and_x_are_zero() {
        let g = cavity(16);
        let medium = Medium::Dispersive(PermittivityModel::vacuum());
        let phi = gaussian(&g, 1.0, 0.3);
        let d = d_density(&medium, g, Reference::Vacuum, &phi, &phi, &symmetric_grid(2.0, 11), 0.1).unwrap();
        assert!(d.samples.iter().all(|v| *v == C::new(0.0, 0.0)));
        let r = kk_reconstruct_green(&d, C::i(), C::new(0.25, -1.0), KernelForm::Limit).unwrap();
        assert_eq!(r.value, C::new(0.25, -1.0));
        let x = x_operator_coefficient(&medium, g, Reference::Vacuum, &phi, &phi, &[-1.0, 1.0], &ContourSpec::trapezoid(1.0, 50.0, 256)).unwrap();
        assert!(x.iter().all(|s| s.value == C::new(0.0, 0.0)));
    }

    #[test]
    fn shifted_kernel_is_exact_for_lossless_cavity() {
        let g = cavity(32);
        let medium = Medium::NonDispersive { model: PermittivityModel::vacuum(), omega0: 0.5 };
        let phi = gaussian(&g, 1.0, 0.25);
        let psi = gaussian(&g, 1.4, 0.3);
        let zeta = 0.05;
        let grid = symmetric_grid(120.0, 24_001);
        let d = d_density(&medium, g, Reference::None, &phi, &psi, &grid, zeta).unwrap();
        let z = C::new(1.0, 0.5);
        let direct = medium.operator(g, z).unwrap().coefficient(&phi, &psi).unwrap();
        let shifted = kk_reconstruct_green(&d, z, C::new(0.0, 0.0), KernelForm::Shifted).unwrap();
        assert!((shifted.value - direct).norm() / direct.norm() < 1e-5);
        // the limit kernel rebuilds (z + iζ)R(z + iζ)/z instead
        let limit = kk_reconstruct_green(&d, z, C::new(0.0, 0.0), KernelForm::Limit).unwrap();
        let zs = z + C::new(0.0, zeta);
        let oracle = medium.operator(g, zs).unwrap().coefficient(&phi, &psi).unwrap() * zs / z;
        assert!((limit.value - oracle).norm() / oracle.norm() < 1e-5);
    }

    #[test]
    fn x_operator_is_causal_and_real() {
        let g = cavity(24);
        let model = PermittivityModel::new(
            1.0,
            vec![Layer { interval: [1.0, 2.0], density: OscillatorDensity::lorentz(1.0, 2.0, 0.2).unwrap() }],
        )
        .unwrap();
        let medium = Medium::Dispersive(model);
        let phi = gaussian(&g, 1.5, 0.3);
        let ts: Vec<f64> = (-12..=24).map(|k| 0.5 * k as f64).collect();
        let x = x_operator_coefficient(&medium, g, Reference::Vacuum, &phi, &phi, &ts, &ContourSpec::trapezoid(0.5, 300.0, 1 << 14)).unwrap();
        let (peak, before) = causality_split(&x);
        assert!(peak > 0.0);
        assert!(before <= 1e-6 * peak, "{before} vs {peak}");
        for s in x.iter().filter(|s| s.t > 0.0 && s.value.norm() > 1e-3 * peak) {
            assert!(s.value.im.abs() <= 1e-8 * s.value.norm(), "t = {}: {}", s.t, s.value);
        }
    }

    #[test]
    fn zero_source_gives_zero_field() {
        let g = cavity(16);
        let out = time_domain_field(
            &Medium::Dispersive(PermittivityModel::vacuum()),
            g,
            &vec![C::new(0.0, 0.0); 16],
            SourceProfile::Sine { omega_s: 1.0 },
            3,
            &[-1.0, 2.0],
            &ContourSpec::trapezoid(1.0, 10.0, 64),
        )
        .unwrap();
        assert!(out.iter().all(|s| s.value == C::new(0.0, 0.0)));
    }
}
