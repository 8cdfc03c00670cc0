//! Quadrature building blocks: Gauss-Legendre rules, adaptive Gauss-Kronrod
//! integration of complex integrands, and pairwise summation.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights by Newton iteration on P_n, started from the
    /// Tricomi approximation of the roots.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Integrate a complex function over [a, b].
    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let terms: Vec<Complex64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(mid + half * x) * w)
            .collect();
        pairwise_sum(&terms) * half
    }

    /// Composite rule with `panels` equal panels on [a, b].
    pub fn composite<F: FnMut(f64) -> Complex64>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: F,
    ) -> Complex64 {
        let width = (b - a) / panels as f64;
        let parts: Vec<Complex64> = (0..panels)
            .map(|p| {
                let lo = a + p as f64 * width;
                self.integrate(lo, lo + width, &mut f)
            })
            .collect();
        pairwise_sum(&parts)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Pairwise (cascade) summation with a fixed reduction order.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        n if n <= 8 => values.iter().sum(),
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

/// Real-valued pairwise summation.
pub fn pairwise_sum_real(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        n if n <= 8 => values.iter().sum(),
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise_sum_real(l) + pairwise_sum_real(r)
        }
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule (positive half).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let value = kron * h;
    let err = ((kron - gauss) * h).norm();
    (value, err)
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// Adaptive Gauss-Kronrod (G7/K15) on [a, b] with initial breakpoints.
///
/// Bisects the panel with the largest error estimate until the total estimate
/// drops below `max(abs_tol, rel_tol * |I|)` or `max_panels` is reached. In the
/// latter case the achieved estimate is reported through `Error::Quadrature`.
pub fn adaptive<F: FnMut(f64) -> Complex64>(
    mut f: F,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<Integral> {
    let mut pts: Vec<f64> = breakpoints.iter().copied().filter(|x| x.is_finite()).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * a.abs().max(1.0));
    if pts.len() < 2 {
        return Ok(Integral {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut panels: Vec<(f64, f64, Complex64, f64)> = pts
        .windows(2)
        .map(|w| {
            let (v, e) = gk15(&mut f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    let mut evaluations = 15 * panels.len();
    loop {
        let values: Vec<Complex64> = panels.iter().map(|p| p.2).collect();
        let total = pairwise_sum(&values);
        let err: f64 = panels.iter().map(|p| p.3).sum();
        let target = abs_tol.max(rel_tol * total.norm());
        if err <= target {
            return Ok(Integral {
                value: total,
                error: err,
                evaluations,
            });
        }
        if panels.len() >= max_panels {
            return Err(Error::Quadrature {
                estimate: err,
                tolerance: target,
            });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .3.partial_cmp(&b.1 .3).unwrap())
            .unwrap();
        let (a, b, _, _) = panels[idx];
        let m = 0.5 * (a + b);
        let (v1, e1) = gk15(&mut f, a, m);
        let (v2, e2) = gk15(&mut f, m, b);
        evaluations += 30;
        panels[idx] = (a, m, v1, e1);
        panels.insert(idx + 1, (m, b, v2, e2));
    }
}

/// Adaptive integral over [a, ∞) using the map ν = a + c·u/(1-u).
pub fn adaptive_semi_infinite<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    scale: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<Integral> {
    let g = |u: f64| {
        if u >= 1.0 {
            return Complex64::new(0.0, 0.0);
        }
        let one_minus = 1.0 - u;
        let x = a + scale * u / one_minus;
        let jac = scale / (one_minus * one_minus);
        let v = f(x) * jac;
        if v.is_finite() {
            v
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    adaptive(g, &[0.0, 0.5, 0.75, 0.9, 1.0], abs_tol, rel_tol, max_panels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(8);
        // degree 15 is the highest exact degree for 8 nodes
        let v = rule.integrate(-1.0, 2.0, |x| Complex64::new(x.powi(15), 0.0));
        let exact = (2f64.powi(16) - 1.0) / 16.0;
        assert!((v.re - exact).abs() < 1e-10 * exact);
        let w: f64 = rule.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_odd_order_has_center_node() {
        let rule = GaussLegendre::new(5);
        assert_eq!(rule.nodes[2], 0.0);
        assert!((rule.weights[2] - 128.0 / 225.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        // ∫ 1/(x² + ε²) over [-1, 1] = 2 atan(1/ε)/ε
        let eps = 1e-3;
        let r = adaptive(
            |x| Complex64::new(1.0 / (x * x + eps * eps), 0.0),
            &[-1.0, 1.0],
            1e-10,
            1e-12,
            2000,
        )
        .unwrap();
        let exact = 2.0 * (1.0 / eps).atan() / eps;
        assert!((r.value.re - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn adaptive_reports_nonconvergence() {
        let r = adaptive(
            |x| Complex64::new((1.0 / x.abs().max(1e-300)).sin(), 0.0),
            &[-1.0, 1.0],
            1e-14,
            0.0,
            4,
        );
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn semi_infinite_map() {
        // ∫_1^∞ 1/x² = 1
        let r = adaptive_semi_infinite(|x| Complex64::new(1.0 / (x * x), 0.0), 1.0, 1.0, 1e-13, 1e-13, 500)
            .unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-11);
    }
}
