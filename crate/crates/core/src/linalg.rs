//! Preconditioned conjugate gradients on masked vectors.
//!
//! All solvers in this crate share one convention: vectors have one entry
//! per grid node, a boolean mask selects the unknowns, and fixed entries
//! are folded into the right-hand side by the caller. Inside the solve the
//! fixed entries are identically zero, so plain dot products over the full
//! vectors are correct.

use alloc::vec;
use alloc::vec::Vec;

#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

use crate::error::{Error, Result};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Jacobi-preconditioned conjugate gradients for a symmetric positive
/// definite operator restricted to the masked unknowns.
///
/// `apply` must compute `y = A x` on the free entries (and may write
/// anything to fixed entries; they are re-zeroed here). `diag` holds the
/// operator diagonal on free entries. Convergence is declared when the
/// residual norm falls below `tol * ||b||`; exceeding `max_iter` returns
/// [`Error::SolverDiverged`].
pub fn solve_cg<F>(
    apply: F,
    diag: &[f64],
    b: &[f64],
    free: &[bool],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    debug_assert_eq!(diag.len(), n);
    debug_assert_eq!(free.len(), n);

    let norm_b = dot(b, b).sqrt();
    if norm_b == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = tol * norm_b;

    let precond = |r: &[f64], z: &mut [f64]| {
        for i in 0..n {
            z[i] = if free[i] { r[i] / diag[i] } else { 0.0 };
        }
    };

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    for i in 0..n {
        if !free[i] {
            r[i] = 0.0;
        }
    }
    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut res = dot(&r, &r).sqrt();

    for it in 0..max_iter {
        if res <= target {
            return Ok(x);
        }
        apply(&p, &mut ap);
        for i in 0..n {
            if !free[i] {
                ap[i] = 0.0;
            }
        }
        let pap = dot(&p, &ap);
        if !(pap > 0.0) || !pap.is_finite() {
            return Err(Error::SolverDiverged {
                residual: res,
                iterations: it,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        precond(&r, &mut z);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        res = dot(&r, &r).sqrt();
        if !res.is_finite() {
            return Err(Error::SolverDiverged {
                residual: res,
                iterations: it,
            });
        }
    }
    if res <= target {
        return Ok(x);
    }
    Err(Error::SolverDiverged {
        residual: res,
        iterations: max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_apply(a: &[[f64; 3]; 3]) -> impl Fn(&[f64], &mut [f64]) + '_ {
        move |x: &[f64], y: &mut [f64]| {
            for i in 0..3 {
                y[i] = (0..3).map(|j| a[i][j] * x[j]).sum();
            }
        }
    }

    #[test]
    fn solves_small_spd_system() {
        let a = [[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]];
        let b = [1.0, 2.0, 3.0];
        let diag = [4.0, 3.0, 2.0];
        let free = [true, true, true];
        let out = solve_cg(dense_apply(&a), &diag, &b, &free, 1e-14, 100).unwrap();
        // direct elimination: x = (1/13) * (1, 9, 15) ... checked by residual
        let mut ax = [0.0; 3];
        dense_apply(&a)(&out, &mut ax);
        for i in 0..3 {
            assert!((ax[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn masked_entries_stay_fixed_at_zero() {
        let a = [[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]];
        let b = [1.0, 0.0, 3.0];
        let diag = [4.0, 3.0, 2.0];
        let free = [true, false, true];
        let out = solve_cg(dense_apply(&a), &diag, &b, &free, 1e-14, 100).unwrap();
        assert_eq!(out[1], 0.0);
        // reduced 2x2 system diag(4, 2): x = (1/4, 3/2)
        assert!((out[0] - 0.25).abs() < 1e-13);
        assert!((out[2] - 1.5).abs() < 1e-13);
    }

    #[test]
    fn zero_rhs_short_circuits() {
        let a = [[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]];
        let out = solve_cg(
            dense_apply(&a),
            &[4.0, 3.0, 2.0],
            &[0.0; 3],
            &[true; 3],
            1e-14,
            100,
        )
        .unwrap();
        assert_eq!(out, alloc::vec![0.0; 3]);
    }

    #[test]
    fn iteration_cap_reports_divergence() {
        let a = [[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]];
        let err = solve_cg(
            dense_apply(&a),
            &[4.0, 3.0, 2.0],
            &[1.0, 2.0, 3.0],
            &[true; 3],
            1e-14,
            1,
        )
        .unwrap_err();
        match err {
            Error::SolverDiverged { iterations: 1, .. } => {}
            other => panic!("expected SolverDiverged, got {other:?}"),
        }
    }
}
