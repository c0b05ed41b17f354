//! Deterministic quadrature primitives shared by assembly and the oracles.
//!
//! Gauss-Legendre nodes are generated on demand by Newton iteration on the
//! Legendre recurrence (machine precision, no tables to transcribe), and a
//! recursive adaptive Simpson rule handles the one-dimensional integrals
//! with endpoint control. Both are bit-deterministic.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Nodes come out in increasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut nodes = Vec::new();
    nodes.resize(n, 0.0);
    let mut weights = Vec::new();
    weights.resize(n, 0.0);
    let m = (n + 1) / 2;
    for i in 0..m {
        // Tricomi-style initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..64 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (p2, d2) = legendre(n, x);
                dp = d2;
                x -= p2 / d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Value and derivative of the Legendre polynomial `P_n` at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates `f` over `[a, b]` with a fixed Gauss-Legendre rule.
pub fn gauss_on<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    nodes: &[f64],
    weights: &[f64],
) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

const SIMPSON_MAX_DEPTH: u32 = 48;

/// Adaptive Simpson integration of `f` over `[a, b]`.
///
/// `tol` is an absolute tolerance on the result. Fails with
/// [`Error::QuadratureFailure`] if the recursion depth is exhausted before
/// the local error estimates drop below the budget.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, SIMPSON_MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol || !err.is_finite() {
        if !err.is_finite() {
            return Err(Error::QuadratureFailure {
                estimate: whole,
                error: err.abs(),
            });
        }
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureFailure {
            estimate: left + right,
            error: err.abs(),
        });
    }
    let lv = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let rv = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(lv + rv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        // n-point rule is exact through degree 2n-1.
        let (x, w) = gauss_legendre(5);
        let val = gauss_on(|t| t.powi(8), -1.0, 1.0, &x, &w);
        assert!((val - 2.0 / 9.0).abs() < 1e-14, "got {val}");
        let (x, w) = gauss_legendre(3);
        let val = gauss_on(|t| 1.0 + t + t.powi(4), 0.0, 2.0, &x, &w);
        // exact: 2 + 2 + 32/5
        assert!((val - (4.0 + 32.0 / 5.0)).abs() < 1e-13, "got {val}");
    }

    #[test]
    fn gauss_legendre_high_order_weights_sum_to_two() {
        for n in [8, 24, 64] {
            let (x, w) = gauss_legendre(n);
            let sum: f64 = w.iter().sum();
            assert!((sum - 2.0).abs() < 1e-13);
            for pair in x.windows(2) {
                assert!(pair[0] < pair[1]);
            }
        }
    }

    #[test]
    fn adaptive_simpson_smooth_and_singular() {
        let v = adaptive_simpson(&|t: f64| t.exp(), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - (core::f64::consts::E - 1.0)).abs() < 1e-11);
        // near-singular endpoint behavior: t^{-1/2} truncated away from 0
        let v = adaptive_simpson(&|t: f64| t.sqrt().recip(), 1e-6, 1.0, 1e-9).unwrap();
        assert!((v - (2.0 - 2e-3)).abs() < 1e-8, "got {v}");
        // nonsmooth but bounded endpoint: sqrt has unbounded derivatives at 0
        let v = adaptive_simpson(&|t: f64| t.sqrt(), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn adaptive_simpson_reports_failure() {
        // A rapidly oscillating integrand with an absurd tolerance exhausts
        // the depth budget and must surface an error instead of a wrong value.
        let f = |t: f64| (1.0 / (t + 1e-300)).sin();
        match adaptive_simpson(&f, 0.0, 1.0, 1e-300) {
            Err(Error::QuadratureFailure { .. }) => {}
            other => panic!("expected quadrature failure, got {other:?}"),
        }
    }
}
