//! Complex tridiagonal and cyclic-tridiagonal matrices with pivoted LU.
//!
//! The tridiagonal factorization follows the LAPACK `gttrf`/`gttrs` scheme:
//! partial pivoting between adjacent rows, producing one extra superdiagonal
//! of fill. Cyclic systems are solved by bordering the leading tridiagonal
//! block and eliminating the last unknown through its Schur complement.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

type C = Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<C>,
    pub diag: Vec<C>,
    pub sup: Vec<C>,
}

impl Tridiagonal {
    pub fn new(sub: Vec<C>, diag: Vec<C>, sup: Vec<C>) -> Self {
        let n = diag.len();
        assert!(n >= 1);
        assert_eq!(sub.len(), n - 1);
        assert_eq!(sup.len(), n - 1);
        Self { sub, diag, sup }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn matvec(&self, x: &[C]) -> Vec<C> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.sup[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            sub: self.sup.iter().map(|v| v.conj()).collect(),
            diag: self.diag.iter().map(|v| v.conj()).collect(),
            sup: self.sub.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn factor(&self) -> Result<TridiagonalLu> {
        TridiagonalLu::new(self)
    }
}

/// Pivoted LU factors of a tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    dl: Vec<C>,
    d: Vec<C>,
    du: Vec<C>,
    du2: Vec<C>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn new(a: &Tridiagonal) -> Result<Self> {
        let n = a.len();
        let mut dl = a.sub.clone();
        let mut d = a.diag.clone();
        let mut du = a.sup.clone();
        let mut du2 = vec![C::new(0.0, 0.0); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].norm() >= dl[i].norm() {
                if d[i] == C::new(0.0, 0.0) {
                    return Err(Error::Singular { pivot: i });
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        let scale = a
            .diag
            .iter()
            .chain(&a.sub)
            .chain(&a.sup)
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        for (i, v) in d.iter().enumerate() {
            if v.norm() <= f64::EPSILON * 1e-3 * scale || !v.is_finite() {
                return Err(Error::Singular { pivot: i });
            }
        }
        Ok(Self {
            dl,
            d,
            du,
            du2,
            swapped,
        })
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn solve_in_place(&self, b: &mut [C]) {
        let n = self.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                let t = self.dl[i] * b[i];
                b[i + 1] -= t;
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n >= 2 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }

    pub fn solve(&self, b: &[C]) -> Vec<C> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Tridiagonal matrix plus the two corner entries of a periodic stencil.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTridiagonal {
    pub tri: Tridiagonal,
    /// Entry (0, n-1).
    pub top_right: C,
    /// Entry (n-1, 0).
    pub bottom_left: C,
}

impl CyclicTridiagonal {
    pub fn matvec(&self, x: &[C]) -> Vec<C> {
        let n = self.tri.len();
        let mut y = self.tri.matvec(x);
        y[0] += self.top_right * x[n - 1];
        y[n - 1] += self.bottom_left * x[0];
        y
    }

    pub fn adjoint(&self) -> Self {
        Self {
            tri: self.tri.adjoint(),
            top_right: self.bottom_left.conj(),
            bottom_left: self.top_right.conj(),
        }
    }
}

/// Bordered factorization of a cyclic tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct CyclicLu {
    lead: TridiagonalLu,
    // last column of the leading block rows, and last row of the leading columns
    col: Vec<C>,
    row: Vec<C>,
    lead_inv_col: Vec<C>,
    schur: C,
}

impl CyclicLu {
    pub fn new(a: &CyclicTridiagonal) -> Result<Self> {
        let n = a.tri.len();
        if n < 3 {
            return Err(Error::Dimension { expected: 3, got: n });
        }
        let m = n - 1;
        let lead = Tridiagonal::new(
            a.tri.sub[..m - 1].to_vec(),
            a.tri.diag[..m].to_vec(),
            a.tri.sup[..m - 1].to_vec(),
        )
        .factor()?;
        let zero = C::new(0.0, 0.0);
        let mut col = vec![zero; m];
        col[0] += a.top_right;
        col[m - 1] += a.tri.sup[m - 1];
        let mut row = vec![zero; m];
        row[0] += a.bottom_left;
        row[m - 1] += a.tri.sub[m - 1];
        let lead_inv_col = lead.solve(&col);
        let schur = a.tri.diag[m] - dot(&row, &lead_inv_col);
        let scale = a.tri.diag.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if schur.norm() <= f64::EPSILON * 1e-3 * scale || !schur.is_finite() {
            return Err(Error::Singular { pivot: m });
        }
        Ok(Self {
            lead,
            col,
            row,
            lead_inv_col,
            schur,
        })
    }

    pub fn solve(&self, b: &[C]) -> Vec<C> {
        let m = self.col.len();
        let w = self.lead.solve(&b[..m]);
        let last = (b[m] - dot(&self.row, &w)) / self.schur;
        let mut x: Vec<C> = w
            .iter()
            .zip(&self.lead_inv_col)
            .map(|(wi, yi)| wi - yi * last)
            .collect();
        x.push(last);
        x
    }
}

fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Either banded storage used by the Helmholtz operators.
#[derive(Debug, Clone, PartialEq)]
pub enum BandedMatrix {
    Tridiagonal(Tridiagonal),
    Cyclic(CyclicTridiagonal),
}

impl BandedMatrix {
    pub fn len(&self) -> usize {
        match self {
            BandedMatrix::Tridiagonal(t) => t.len(),
            BandedMatrix::Cyclic(c) => c.tri.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn diag(&self) -> &[C] {
        match self {
            BandedMatrix::Tridiagonal(t) => &t.diag,
            BandedMatrix::Cyclic(c) => &c.tri.diag,
        }
    }

    pub fn matvec(&self, x: &[C]) -> Vec<C> {
        match self {
            BandedMatrix::Tridiagonal(t) => t.matvec(x),
            BandedMatrix::Cyclic(c) => c.matvec(x),
        }
    }

    pub fn adjoint(&self) -> Self {
        match self {
            BandedMatrix::Tridiagonal(t) => BandedMatrix::Tridiagonal(t.adjoint()),
            BandedMatrix::Cyclic(c) => BandedMatrix::Cyclic(c.adjoint()),
        }
    }

    pub fn to_dense(&self) -> DMatrix<C> {
        let n = self.len();
        let (tri, corners) = match self {
            BandedMatrix::Tridiagonal(t) => (t, None),
            BandedMatrix::Cyclic(c) => (&c.tri, Some((c.top_right, c.bottom_left))),
        };
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = tri.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = tri.sup[i];
                m[(i + 1, i)] = tri.sub[i];
            }
        }
        if let Some((tr, bl)) = corners {
            m[(0, n - 1)] += tr;
            m[(n - 1, 0)] += bl;
        }
        m
    }

    pub fn factor(&self) -> Result<BandedLu> {
        match self {
            BandedMatrix::Tridiagonal(t) => Ok(BandedLu::Tridiagonal(t.factor()?)),
            BandedMatrix::Cyclic(c) => Ok(BandedLu::Cyclic(CyclicLu::new(c)?)),
        }
    }
}

#[derive(Debug, Clone)]
pub enum BandedLu {
    Tridiagonal(TridiagonalLu),
    Cyclic(CyclicLu),
}

impl BandedLu {
    pub fn solve(&self, b: &[C]) -> Vec<C> {
        match self {
            BandedLu::Tridiagonal(f) => f.solve(b),
            BandedLu::Cyclic(f) => f.solve(b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
    }

    fn random_tri(n: usize, seed: &mut u64) -> Tridiagonal {
        let mut v = |len: usize| (0..len).map(|_| c(lcg(seed), lcg(seed))).collect::<Vec<_>>();
        Tridiagonal::new(v(n - 1), v(n), v(n - 1))
    }

    #[test]
    fn pivoted_solve_matches_dense_lu() {
        let mut seed = 7;
        for n in [1usize, 2, 3, 9, 40] {
            let t = if n == 1 {
                Tridiagonal::new(vec![], vec![c(2.0, 1.0)], vec![])
            } else {
                random_tri(n, &mut seed)
            };
            let b: Vec<C> = (0..n).map(|_| c(lcg(&mut seed), lcg(&mut seed))).collect();
            let x = t.factor().unwrap().solve(&b);
            let dense = BandedMatrix::Tridiagonal(t.clone()).to_dense();
            let xd = dense.lu().solve(&nalgebra::DVector::from_vec(b.clone())).unwrap();
            for i in 0..n {
                assert!((x[i] - xd[i]).norm() < 1e-9 * (1.0 + xd[i].norm()), "n={n} i={i}");
            }
        }
    }

    #[test]
    fn zero_leading_pivot_needs_row_swap() {
        // [[0,1,0],[1,0,1],[0,1,0]] is singular; [[0,1,0],[1,0,1],[0,1,1]] is not
        let t = Tridiagonal::new(
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(1.0, 0.0)],
        );
        let x = t.factor().unwrap().solve(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let r = t.matvec(&x);
        assert!((r[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - c(2.0, 0.0)).norm() < 1e-14);
        assert!((r[2] - c(3.0, 0.0)).norm() < 1e-14);

        let singular = Tridiagonal::new(
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(1.0, 0.0)],
        );
        assert!(matches!(singular.factor(), Err(Error::Singular { .. })));
    }

    #[test]
    fn cyclic_solve_matches_dense() {
        let mut seed = 11;
        let n = 12;
        let mut tri = random_tri(n, &mut seed);
        for d in tri.diag.iter_mut() {
            *d += c(3.0, 0.0);
        }
        let a = CyclicTridiagonal {
            tri,
            top_right: c(0.3, -0.7),
            bottom_left: c(-0.2, 0.4),
        };
        let b: Vec<C> = (0..n).map(|_| c(lcg(&mut seed), lcg(&mut seed))).collect();
        let x = CyclicLu::new(&a).unwrap().solve(&b);
        let r = a.matvec(&x);
        for i in 0..n {
            assert!((r[i] - b[i]).norm() < 1e-12);
        }
        let dense = BandedMatrix::Cyclic(a.clone()).to_dense();
        let adj = BandedMatrix::Cyclic(a.adjoint()).to_dense();
        assert_eq!(dense.adjoint(), adj);
    }
}
