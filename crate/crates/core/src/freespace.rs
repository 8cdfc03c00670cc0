//! Free three-dimensional Helmholtz operator in Fourier space.
//!
//! For real k and Im z > 0 the inverse symbol splits into a longitudinal and a
//! transverse part,
//!
//! ```text
//! S(k, z) = k̂k̂ / (z²ε0μ0) + (I − k̂k̂) / (z²ε0μ0 − k²),
//! ```
//!
//! and coefficients ⟨φ, H_0(z)⁻¹ψ⟩ are k-space integrals of conj(φ̂)·S·ψ̂.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dispersion::{Estimate, EPS0, MU0};
use crate::error::{Error, Result};
use crate::quad::{pairwise_sum, GaussLegendre};

type C = Complex64;
pub type Vec3 = [f64; 3];
pub type Tensor = [[C; 3]; 3];

/// Smallest sin²θ accepted for asymptotic rays z = r·e^{iθ}.
pub const SIN2_FLOOR: f64 = 1e-2;
/// Gaussian tail beyond this fraction of the integral is flagged.
pub const TAIL_WARNING: f64 = 1e-9;

/// Field with Fourier transform p·exp(−|k − k_c|²/(2s²))·e^{−ik·r0}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestField3D {
    pub center: Vec3,
    pub width: f64,
    pub polarization: [C; 3],
    pub position: Vec3,
}

impl TestField3D {
    pub fn new(center: Vec3, width: f64, polarization: [C; 3], position: Vec3) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::domain(format!("envelope width must be > 0, got {width}")));
        }
        Ok(Self {
            center,
            width,
            polarization,
            position,
        })
    }

    /// Isotropic envelope at k = 0 with a real polarization.
    pub fn isotropic(width: f64, polarization: Vec3, position: Vec3) -> Result<Self> {
        Self::new([0.0; 3], width, polarization.map(|p| C::new(p, 0.0)), position)
    }

    pub fn transform(&self, k: Vec3) -> [C; 3] {
        let d2: f64 = (0..3).map(|i| (k[i] - self.center[i]).powi(2)).sum();
        let phase = -dot(k, self.position);
        let env = C::from_polar((-d2 / (2.0 * self.width * self.width)).exp(), phase);
        self.polarization.map(|p| p * env)
    }

    /// Closed-form ⟨self, other⟩ = ∫ conj(φ̂)·ψ̂ d³k.
    pub fn inner(&self, other: &TestField3D) -> C {
        let alpha = 1.0 / (2.0 * self.width * self.width);
        let beta = 1.0 / (2.0 * other.width * other.width);
        let gamma = alpha + beta;
        let pol: C = (0..3).map(|i| self.polarization[i].conj() * other.polarization[i]).sum();
        let mean: Vec3 = std::array::from_fn(|i| (alpha * self.center[i] + beta * other.center[i]) / gamma);
        let sep: Vec3 = std::array::from_fn(|i| self.position[i] - other.position[i]);
        let dc2: f64 = (0..3).map(|i| (self.center[i] - other.center[i]).powi(2)).sum();
        let sep2 = dot(sep, sep);
        let mag = (std::f64::consts::PI / gamma).powf(1.5) * (-sep2 / (4.0 * gamma) - alpha * beta / gamma * dc2).exp();
        pol * C::from_polar(mag, dot(mean, sep))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self).re
    }
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Inverse symbol S(k, z); at k = 0 the removable limit I/(z²ε0μ0).
pub fn free_symbol(k: Vec3, z: C) -> Result<Tensor> {
    if z.im <= 0.0 {
        return Err(Error::domain(format!("free symbol needs Im z > 0, got {}", z.im)));
    }
    Ok(symbol_unchecked(k, z))
}

fn symbol_unchecked(k: Vec3, z: C) -> Tensor {
    let zz = z * z * (EPS0 * MU0);
    let k2 = dot(k, k);
    let long = 1.0 / zz;
    let mut s = [[C::new(0.0, 0.0); 3]; 3];
    if k2 == 0.0 {
        for (i, row) in s.iter_mut().enumerate() {
            row[i] = long;
        }
        return s;
    }
    let trans = 1.0 / (zz - k2);
    for i in 0..3 {
        for j in 0..3 {
            let proj = k[i] * k[j] / k2;
            let id = if i == j { 1.0 } else { 0.0 };
            s[i][j] = long * proj + trans * (id - proj);
        }
    }
    s
}

/// Spherical product rule: composite Gauss-Legendre in |k| and cos θ,
/// trapezoid in azimuth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeQuadrature {
    pub radial_panels: usize,
    pub radial_order: usize,
    pub polar: usize,
    pub azimuthal: usize,
    /// Radial cut-off in envelope widths beyond the farthest envelope center.
    pub widths: f64,
}

impl Default for FreeQuadrature {
    fn default() -> Self {
        Self {
            radial_panels: 12,
            radial_order: 16,
            polar: 32,
            azimuthal: 32,
            widths: 12.0,
        }
    }
}

/// Coefficient with quadrature bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeCoefficient {
    pub value: C,
    /// Bound on the Gaussian mass outside the truncated ball.
    pub tail: f64,
    pub tail_dominant: bool,
}

/// ⟨φ, H_0(z)⁻¹ψ⟩ = ∫ conj(φ̂(k))·S(k, z)·ψ̂(k) d³k.
pub fn free_coefficient(phi: &TestField3D, psi: &TestField3D, z: C, quad: &FreeQuadrature) -> Result<FreeCoefficient> {
    if z.im <= 0.0 {
        return Err(Error::domain(format!("free coefficient needs Im z > 0, got {}", z.im)));
    }
    integrate(phi, psi, quad, |k| symbol_unchecked(k, z))
}

fn integrate<F>(phi: &TestField3D, psi: &TestField3D, quad: &FreeQuadrature, symbol: F) -> Result<FreeCoefficient>
where
    F: Fn(Vec3) -> Tensor + Sync,
{
    if quad.radial_panels == 0 || quad.radial_order == 0 || quad.polar == 0 || quad.azimuthal < 2 {
        return Err(Error::domain("empty quadrature rule"));
    }
    let reach = |f: &TestField3D| dot(f.center, f.center).sqrt() + quad.widths * f.width;
    let k_max = reach(phi).max(reach(psi));
    let radial = GaussLegendre::new(quad.radial_order);
    let polar = GaussLegendre::new(quad.polar);
    let dphi = 2.0 * std::f64::consts::PI / quad.azimuthal as f64;
    let panel = k_max / quad.radial_panels as f64;
    let shells: Vec<(f64, f64)> = (0..quad.radial_panels)
        .flat_map(|p| {
            let mid = (p as f64 + 0.5) * panel;
            radial
                .nodes
                .iter()
                .zip(&radial.weights)
                .map(move |(&x, &w)| {
                    let r = mid + 0.5 * panel * x;
                    (r, 0.5 * panel * w * r * r)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let parts: Vec<C> = shells
        .par_iter()
        .map(|&(r, wr)| {
            let mut terms = Vec::with_capacity(quad.polar * quad.azimuthal);
            for (&ct, &wt) in polar.nodes.iter().zip(&polar.weights) {
                let st = (1.0 - ct * ct).max(0.0).sqrt();
                for a in 0..quad.azimuthal {
                    let ang = (a as f64 + 0.5) * dphi;
                    let k = [r * st * ang.cos(), r * st * ang.sin(), r * ct];
                    let s = symbol(k);
                    let a_hat = phi.transform(k);
                    let b_hat = psi.transform(k);
                    let mut v = C::new(0.0, 0.0);
                    for i in 0..3 {
                        let row: C = (0..3).map(|j| s[i][j] * b_hat[j]).sum();
                        v += a_hat[i].conj() * row;
                    }
                    terms.push(v * (wt * dphi));
                }
            }
            pairwise_sum(&terms) * wr
        })
        .collect();
    let value = pairwise_sum(&parts);
    // Gaussian mass beyond k_max, bounded by the slower envelope
    let slow = phi.width.max(psi.width);
    let excess = (k_max - dot(phi.center, phi.center).sqrt().max(dot(psi.center, psi.center).sqrt())).max(0.0);
    let pol = |f: &TestField3D| f.polarization.iter().map(|p| p.norm_sqr()).sum::<f64>().sqrt();
    let tail = pol(phi) * pol(psi) * 4.0 * std::f64::consts::PI * (k_max + slow).powi(2) * slow * (-excess * excess / (2.0 * slow * slow)).exp();
    Ok(FreeCoefficient {
        value,
        tail,
        tail_dominant: tail > TAIL_WARNING * value.norm(),
    })
}

/// |z²ε0μ0·⟨φ, H_0(z)⁻¹ψ⟩ − ⟨φ, ψ⟩| along z = r·e^{iθ} for each r.
pub fn asymptotic_defect(
    phi: &TestField3D,
    psi: &TestField3D,
    radii: &[f64],
    theta: f64,
    quad: &FreeQuadrature,
) -> Result<Vec<Estimate<f64>>> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) || theta.sin().powi(2) < SIN2_FLOOR {
        return Err(Error::domain(format!(
            "ray angle θ = {theta} is too close to the real axis (sin²θ < {SIN2_FLOOR})"
        )));
    }
    let target = phi.inner(psi);
    radii
        .iter()
        .map(|&r| {
            if !(r > 0.0) {
                return Err(Error::domain(format!("ray radius must be > 0, got {r}")));
            }
            let z = C::from_polar(r, theta);
            let c = free_coefficient(phi, psi, z, quad)?;
            let zz = z * z * (EPS0 * MU0);
            Ok(Estimate {
                value: (zz * c.value - target).norm(),
                error: zz.norm() * c.tail,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn symbol_at_origin_and_axis() {
        let s = free_symbol([0.0; 3], C::i()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { C::new(-1.0, 0.0) } else { C::new(0.0, 0.0) };
                assert!(close(s[i][j], e, 1e-15));
            }
        }
        let s = free_symbol([1.0, 0.0, 0.0], C::i()).unwrap();
        assert!(close(s[0][0], C::new(-1.0, 0.0), 1e-15));
        assert!(close(s[1][1], C::new(-0.5, 0.0), 1e-15));
        assert!(close(s[2][2], C::new(-0.5, 0.0), 1e-15));
        assert!(free_symbol([1.0, 0.0, 0.0], C::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn inner_product_closed_form_matches_quadrature() {
        let a = TestField3D::new([0.3, 0.0, -0.2], 0.8, [C::new(1.0, 0.5), C::new(0.0, 0.0), C::new(0.2, 0.0)], [0.1, 0.4, 0.0]).unwrap();
        let b = TestField3D::new([0.0, 0.1, 0.0], 1.1, [C::new(0.5, 0.0), C::new(0.0, 1.0), C::new(1.0, 0.0)], [0.0, -0.2, 0.3]).unwrap();
        let ident = |_: Vec3| {
            let mut t = [[C::new(0.0, 0.0); 3]; 3];
            for (i, row) in t.iter_mut().enumerate() {
                row[i] = C::new(1.0, 0.0);
            }
            t
        };
        let q = integrate(&a, &b, &FreeQuadrature { polar: 48, azimuthal: 48, ..Default::default() }, ident).unwrap();
        let exact = a.inner(&b);
        assert!(close(q.value, exact, 1e-10 * exact.norm()), "{} vs {exact}", q.value);
        assert!(!q.tail_dominant);
        let iso = TestField3D::isotropic(1.0, [1.0, 0.0, 0.0], [0.0; 3]).unwrap();
        assert!((iso.norm_sqr() - std::f64::consts::PI.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn cross_polarization_vanishes_by_parity() {
        let a = TestField3D::isotropic(1.0, [1.0, 0.0, 0.0], [0.0; 3]).unwrap();
        let b = TestField3D::isotropic(1.0, [0.0, 1.0, 0.0], [0.0; 3]).unwrap();
        let c = free_coefficient(&a, &b, C::new(0.5, 1.0), &FreeQuadrature::default()).unwrap();
        assert!(c.value.norm() < 1e-14);
    }

    #[test]
    fn large_imaginary_frequency_limit() {
        let a = TestField3D::isotropic(1.0, [1.0, 0.0, 0.0], [0.0; 3]).unwrap();
        let z = C::new(0.0, 10.0);
        let c = free_coefficient(&a, &a, z, &FreeQuadrature::default()).unwrap();
        let approx = a.norm_sqr() / (z * z);
        assert!((c.value - approx).norm() < 0.02 * approx.norm());
    }

    #[test]
    fn schwarz_reflection_of_coefficient() {
        let a = TestField3D::isotropic(0.9, [1.0, 0.3, 0.0], [0.2, 0.0, 0.1]).unwrap();
        let b = TestField3D::isotropic(1.2, [0.0, 1.0, 0.5], [0.0, 0.3, 0.0]).unwrap();
        let z = C::new(1.3, 0.6);
        let q = FreeQuadrature::default();
        let x = free_coefficient(&a, &b, z, &q).unwrap().value;
        let y = free_coefficient(&a, &b, -z.conj(), &q).unwrap().value;
        assert!((y - x.conj()).norm() <= 1e-10 * x.norm());
    }

    #[test]
    fn defect_decreases_and_angle_ordering() {
        let a = TestField3D::isotropic(1.0, [0.0, 0.0, 1.0], [0.0; 3]).unwrap();
        let q = FreeQuadrature::default();
        let radii = [10.0, 100.0, 1000.0];
        let up = asymptotic_defect(&a, &a, &radii, std::f64::consts::FRAC_PI_2, &q).unwrap();
        let tilt = asymptotic_defect(&a, &a, &radii, std::f64::consts::FRAC_PI_4, &q).unwrap();
        for w in up.windows(2).chain(tilt.windows(2)) {
            assert!(w[1].value < w[0].value);
        }
        for (u, t) in up.iter().zip(&tilt) {
            assert!(t.value > u.value);
        }
        assert!(up[2].value <= 1e-3 * a.norm_sqr());
        assert!(asymptotic_defect(&a, &a, &radii, 0.01, &q).is_err());
        assert!(asymptotic_defect(&a, &a, &radii, 3.2, &q).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn symbol_eigen_split(kx in -3.0..3.0f64, ky in -3.0..3.0f64, kz in -3.0..3.0f64, zr in -4.0..4.0f64, zi in 0.05..4.0f64) {
            let k = [kx, ky, kz];
            let z = C::new(zr, zi);
            let s = free_symbol(k, z).unwrap();
            let k2 = dot(k, k);
            prop_assume!(k2 > 1e-6);
            let kh = k.map(|v| v / k2.sqrt());
            for i in 0..3 {
                let sk: C = (0..3).map(|j| s[i][j] * kh[j]).sum();
                prop_assert!((sk - kh[i] / (z * z)).norm() <= 1e-12 * (1.0 + sk.norm()));
            }
            // z²·S = I + k²/(z² − k²)(I − k̂k̂)
            for i in 0..3 {
                for j in 0..3 {
                    let id = if i == j { 1.0 } else { 0.0 };
                    let rhs = id + k2 / (z * z - k2) * (id - kh[i] * kh[j]);
                    prop_assert!((z * z * s[i][j] - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
                }
            }
            let neg = free_symbol([-kx, -ky, -kz], z).unwrap();
            prop_assert_eq!(neg, s);
        }
    }
}
