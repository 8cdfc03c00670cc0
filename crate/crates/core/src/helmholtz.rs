//! One-dimensional discretized Helmholtz operators.
//!
//! The transverse field of a layered medium obeys the scalar reduction
//! `E'' + z² ε(x, z) E = s`, discretized with second-order central differences
//! on an interior grid. Dirichlet walls close the cavity; Bloch boundaries
//! make the field quasi-periodic, E(x + L) = e^{ikL} E(x).

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::banded::{BandedLu, BandedMatrix, CyclicTridiagonal, Tridiagonal};
use crate::dispersion::{PermittivityModel, C_LIGHT, EPS0, MU0};
use crate::error::{Error, Result};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Dirichlet,
    /// Quasi-periodic with complex wavevector k.
    Bloch(C),
}

/// Uniform grid of N unknowns on a domain of length L.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    length: f64,
    n: usize,
    boundary: Boundary,
}

impl Grid1D {
    pub const MIN_POINTS: usize = 8;

    pub fn new(length: f64, n: usize, boundary: Boundary) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::domain(format!("grid length must be > 0, got {length}")));
        }
        if n < Self::MIN_POINTS {
            return Err(Error::domain(format!("grid needs N ≥ {}, got {n}", Self::MIN_POINTS)));
        }
        if let Boundary::Bloch(k) = boundary {
            if !(k.re.is_finite() && k.im.is_finite()) {
                return Err(Error::domain("Bloch wavevector must be finite"));
            }
        }
        Ok(Self { length, n, boundary })
    }

    pub fn dirichlet(length: f64, n: usize) -> Result<Self> {
        Self::new(length, n, Boundary::Dirichlet)
    }

    pub fn bloch(length: f64, n: usize, k: C) -> Result<Self> {
        Self::new(length, n, Boundary::Bloch(k))
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Spacing: L/(N+1) between Dirichlet walls, L/N for one Bloch cell.
    pub fn spacing(&self) -> f64 {
        match self.boundary {
            Boundary::Dirichlet => self.length / (self.n + 1) as f64,
            Boundary::Bloch(_) => self.length / self.n as f64,
        }
    }

    pub fn position(&self, i: usize) -> f64 {
        let h = self.spacing();
        match self.boundary {
            Boundary::Dirichlet => (i + 1) as f64 * h,
            Boundary::Bloch(_) => i as f64 * h,
        }
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.position(i)).collect()
    }

    /// Nearest grid index to x.
    pub fn index_of(&self, x: f64) -> usize {
        let raw = match self.boundary {
            Boundary::Dirichlet => x / self.spacing() - 1.0,
            Boundary::Bloch(_) => x / self.spacing(),
        };
        (raw.round().max(0.0) as usize).min(self.n - 1)
    }

    /// Discrete inner product h·Σ conj(a_i) b_i.
    pub fn inner(&self, a: &[C], b: &[C]) -> C {
        let terms: Vec<C> = a.iter().zip(b).map(|(x, y)| x.conj() * y).collect();
        crate::quad::pairwise_sum(&terms) * self.spacing()
    }

    pub fn norm(&self, a: &[C]) -> f64 {
        self.inner(a, a).re.sqrt()
    }
}

/// Which Helmholtz operator is assembled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind {
    /// H_e(z): z²ε(x, z)μ0 + d²/dx².
    Dispersive { z: C },
    /// H(z, ξ): z²ε0μ0 + zμ0ξ[ε(x, ξ) − ε0] + d²/dx².
    TwoFrequency { z: C, xi: C },
    /// H_d(z) with the frozen dielectric constant built at ω0.
    NonDispersive { z: C, omega0: f64 },
}

impl OperatorKind {
    pub fn z(&self) -> C {
        match *self {
            OperatorKind::Dispersive { z }
            | OperatorKind::TwoFrequency { z, .. }
            | OperatorKind::NonDispersive { z, .. } => z,
        }
    }
}

/// Assembled banded operator with a lazily computed, shared factorization.
#[derive(Debug)]
pub struct DiscreteHelmholtz {
    grid: Grid1D,
    kind: OperatorKind,
    matrix: BandedMatrix,
    lu: OnceLock<Result<BandedLu>>,
    adjoint_lu: OnceLock<Result<BandedLu>>,
}

impl Clone for DiscreteHelmholtz {
    fn clone(&self) -> Self {
        Self {
            grid: self.grid,
            kind: self.kind,
            matrix: self.matrix.clone(),
            lu: OnceLock::new(),
            adjoint_lu: OnceLock::new(),
        }
    }
}

/// Field from `solve` with its relative residual ‖HE − s‖/‖s‖.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub field: Vec<C>,
    pub residual: f64,
}

/// Samples G[i][j] ≈ G(x_i, x_j; z).
#[derive(Debug, Clone, PartialEq)]
pub struct GreenSamples {
    pub grid: Grid1D,
    pub z: C,
    pub values: DMatrix<C>,
}

impl GreenSamples {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// max |G_ij − G_ji| / max |G|.
    pub fn reciprocity_defect(&self) -> f64 {
        let n = self.values.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self.values[(i, j)] - self.values[(j, i)]).norm());
            }
        }
        worst / self.max_abs()
    }

    /// max |A_ij − B_ij| / max |B|.
    pub fn relative_difference(&self, other: &DMatrix<C>) -> f64 {
        let scale = other.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let diff = self
            .values
            .iter()
            .zip(other.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        diff / scale
    }
}

/// Continuum bound 1/(|z|ε0μ0·Im z) on ‖H(z)⁻¹‖.
pub fn norm_bound(z: C) -> f64 {
    1.0 / (z.norm() * EPS0 * MU0 * z.im)
}

/// Layers must sit inside one cell or cover it entirely for Bloch grids.
fn check_periodic(grid: &Grid1D, model: &PermittivityModel) -> Result<()> {
    let l = grid.length();
    for layer in model.layers() {
        let [a, b] = layer.interval;
        let covers = a <= 0.0 && b >= l;
        let inside = a >= 0.0 && b <= l;
        if !(covers || inside) {
            return Err(Error::Periodicity(format!(
                "layer {:?} straddles the boundary of the cell [0, {l}]",
                layer.interval
            )));
        }
    }
    Ok(())
}

impl DiscreteHelmholtz {
    pub fn assemble(grid: Grid1D, model: &PermittivityModel, kind: OperatorKind) -> Result<Self> {
        let z = kind.z();
        if let Boundary::Bloch(k) = grid.boundary() {
            check_periodic(&grid, model)?;
            let margin = z.im - C_LIGHT * k.im.abs();
            if margin <= 0.0 {
                return Err(Error::domain(format!(
                    "Bloch operator needs Im z > c|Im k|, got Im z = {}, Im k = {}",
                    z.im, k.im
                )));
            }
        }
        let positions = grid.positions();
        let diag: Vec<C> = match kind {
            OperatorKind::Dispersive { z } => {
                if z.im < 0.0 {
                    return Err(Error::domain(format!("dispersive operator needs Im z ≥ 0, got {}", z.im)));
                }
                // written as the ξ = z case of the two-frequency diagonal so the
                // two assemblies agree bit for bit
                positions
                    .iter()
                    .map(|&x| Ok(two_freq_diag(z, z, model.eval_permittivity(x, z)?)))
                    .collect::<Result<_>>()?
            }
            OperatorKind::TwoFrequency { z, xi } => {
                if z.im <= 0.0 || xi.im <= 0.0 {
                    return Err(Error::domain(format!(
                        "two-frequency operator needs Im z > 0 and Im ξ > 0, got {} and {}",
                        z.im, xi.im
                    )));
                }
                positions
                    .iter()
                    .map(|&x| Ok(two_freq_diag(z, xi, model.eval_permittivity(x, xi)?)))
                    .collect::<Result<_>>()?
            }
            OperatorKind::NonDispersive { z, omega0 } => {
                if z.im < 0.0 {
                    return Err(Error::domain(format!("non-dispersive operator needs Im z ≥ 0, got {}", z.im)));
                }
                positions
                    .iter()
                    .map(|&x| Ok(z * z * (model.nondispersive_at(x, omega0)? * MU0)))
                    .collect::<Result<_>>()?
            }
        };
        let h = grid.spacing();
        let inv_h2 = 1.0 / (h * h);
        let n = grid.len();
        let diag: Vec<C> = diag.into_iter().map(|d| d - 2.0 * inv_h2).collect();
        let off = vec![C::new(inv_h2, 0.0); n - 1];
        let tri = Tridiagonal::new(off.clone(), diag, off);
        let matrix = match grid.boundary() {
            Boundary::Dirichlet => BandedMatrix::Tridiagonal(tri),
            Boundary::Bloch(k) => {
                let phase = (C::i() * k * grid.length()).exp();
                BandedMatrix::Cyclic(CyclicTridiagonal {
                    tri,
                    top_right: inv_h2 / phase,
                    bottom_left: inv_h2 * phase,
                })
            }
        };
        Ok(Self {
            grid,
            kind,
            matrix,
            lu: OnceLock::new(),
            adjoint_lu: OnceLock::new(),
        })
    }

    /// Vacuum operator of the same kind on the same grid.
    pub fn vacuum(grid: Grid1D, z: C) -> Result<Self> {
        Self::assemble(grid, &PermittivityModel::vacuum(), OperatorKind::Dispersive { z })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn z(&self) -> C {
        self.kind.z()
    }

    pub fn matrix(&self) -> &BandedMatrix {
        &self.matrix
    }

    fn factor(&self) -> Result<&BandedLu> {
        self.lu
            .get_or_init(|| self.matrix.factor())
            .as_ref()
            .map_err(Clone::clone)
    }

    fn factor_adjoint(&self) -> Result<&BandedLu> {
        self.adjoint_lu
            .get_or_init(|| self.matrix.adjoint().factor())
            .as_ref()
            .map_err(Clone::clone)
    }

    fn check_len(&self, v: &[C]) -> Result<()> {
        if v.len() != self.grid.len() {
            return Err(Error::Dimension {
                expected: self.grid.len(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// H⁻¹ s without the residual check.
    pub fn apply_inverse(&self, source: &[C]) -> Result<Vec<C>> {
        self.check_len(source)?;
        Ok(self.factor()?.solve(source))
    }

    /// (H†)⁻¹ s.
    pub fn apply_inverse_adjoint(&self, source: &[C]) -> Result<Vec<C>> {
        self.check_len(source)?;
        Ok(self.factor_adjoint()?.solve(source))
    }

    pub fn solve(&self, source: &[C]) -> Result<Solution> {
        let field = self.apply_inverse(source)?;
        let snorm = l2(source);
        let residual = if snorm == 0.0 {
            0.0
        } else {
            let hx = self.matrix.matvec(&field);
            let r: Vec<C> = hx.iter().zip(source).map(|(a, b)| a - b).collect();
            l2(&r) / snorm
        };
        Ok(Solution { field, residual })
    }

    /// Dense H⁻¹ by columns.
    pub fn inverse_dense(&self) -> Result<DMatrix<C>> {
        let n = self.grid.len();
        let lu = self.factor()?;
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![C::new(0.0, 0.0); n];
        for j in 0..n {
            e[j] = C::new(1.0, 0.0);
            let col = lu.solve(&e);
            e[j] = C::new(0.0, 0.0);
            m.set_column(j, &nalgebra::DVector::from_vec(col));
        }
        Ok(m)
    }

    /// Green samples: column j solves H g = e_j/h.
    pub fn green_matrix(&self) -> Result<GreenSamples> {
        let values = self.inverse_dense()? / C::new(self.grid.spacing(), 0.0);
        Ok(GreenSamples {
            grid: self.grid,
            z: self.z(),
            values,
        })
    }

    /// ⟨φ, H⁻¹ψ⟩ = h·Σ conj(φ_i)(H⁻¹ψ)_i.
    pub fn coefficient(&self, phi: &[C], psi: &[C]) -> Result<C> {
        self.check_len(phi)?;
        let field = self.apply_inverse(psi)?;
        Ok(self.grid.inner(phi, &field))
    }

    /// ‖H⁻¹‖ in the h-weighted norm (the weight cancels for operator norms).
    pub fn inverse_norm(&self) -> Result<f64> {
        if self.grid.len() <= DENSE_NORM_LIMIT {
            let dense = self.matrix.to_dense();
            let sv = dense.singular_values();
            let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
            if min == 0.0 {
                return Err(Error::Singular { pivot: 0 });
            }
            return Ok(1.0 / min);
        }
        self.inverse_norm_power(POWER_TOL, POWER_CAP)
    }

    /// Power iteration on (H⁻¹)†H⁻¹.
    pub fn inverse_norm_power(&self, tol: f64, cap: usize) -> Result<f64> {
        let n = self.grid.len();
        // deterministic start vector with no special symmetry
        let mut v: Vec<C> = (0..n)
            .map(|i| C::new(1.0 + 0.3 * ((i * 7919) % 97) as f64 / 97.0, 0.1 * ((i * 104_729) % 89) as f64 / 89.0))
            .collect();
        normalize(&mut v);
        let mut prev = 0.0;
        for it in 0..cap {
            let w = self.apply_inverse(&v)?;
            let sigma = l2(&w);
            let mut u = self.apply_inverse_adjoint(&w)?;
            normalize(&mut u);
            v = u;
            if it > 0 && (sigma - prev).abs() <= tol * sigma {
                return Ok(sigma);
            }
            prev = sigma;
        }
        Err(Error::NoConvergence {
            iterations: cap,
            residual: prev,
        })
    }
}

const DENSE_NORM_LIMIT: usize = 512;
const POWER_TOL: f64 = 1e-10;
const POWER_CAP: usize = 10_000;

fn two_freq_diag(z: C, xi: C, eps_xi: C) -> C {
    z * z * (EPS0 * MU0) + z * xi * MU0 * (eps_xi - EPS0)
}

fn l2(v: &[C]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [C]) {
    let n = l2(v);
    v.iter_mut().for_each(|x| *x /= n);
}

/// Eigenvalues {Im z, Im z + c|k″|, Im z − c|k″|} of the imaginary part of
/// the free Bloch symbol.
pub fn bloch_imag_eigs(k_imag: f64, z: C) -> [f64; 3] {
    let s = C_LIGHT * k_imag.abs();
    [z.im, z.im + s, z.im - s]
}

/// ‖z²(H_e(z)⁻¹ − H_0(z)⁻¹)‖ along z = ω + iη for each ω.
pub fn resolvent_difference_ray(
    model: &PermittivityModel,
    grid: Grid1D,
    eta: f64,
    omegas: &[f64],
) -> Result<Vec<f64>> {
    if eta <= 0.0 {
        return Err(Error::domain(format!("η must be > 0, got {eta}")));
    }
    omegas
        .iter()
        .map(|&w| {
            let z = C::new(w, eta);
            let he = DiscreteHelmholtz::assemble(grid, model, OperatorKind::Dispersive { z })?;
            let h0 = DiscreteHelmholtz::vacuum(grid, z)?;
            let diff = (he.inverse_dense()? - h0.inverse_dense()?) * (z * z);
            Ok(diff.singular_values().iter().copied().fold(0.0, f64::max))
        })
        .collect()
}

/// Normalized Dirichlet sine mode n on the grid (h·Σ φ² = 1).
pub fn sine_mode(grid: &Grid1D, n: usize) -> Vec<C> {
    let l = grid.length();
    let raw: Vec<C> = grid
        .positions()
        .iter()
        .map(|&x| C::new((n as f64 * std::f64::consts::PI * x / l).sin(), 0.0))
        .collect();
    let norm = grid.norm(&raw);
    raw.into_iter().map(|v| v / norm).collect()
}
