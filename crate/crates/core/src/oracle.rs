//! Independent reference solutions on balls.
//!
//! For a ball the harmonic measure of the fractional Laplacian has a
//! closed-form density on the complement,
//!
//! ```text
//! P(x, y) = c * ((r^2 - |x-c|^2) / (|y-c|^2 - r^2))^s * |x - y|^(-N),
//! ```
//!
//! so Dirichlet problems with exterior data supported on intervals (1D) or
//! radial annuli (2D) reduce to one-dimensional quadrature. This module
//! evaluates that density directly and is kept deliberately independent of
//! the grid solver: no grids, no linear algebra, just the kernel and an
//! adaptive integrator. Solver tests compare against these values.
//!
//! The normalizing constant is *not* hard-coded; it is recovered at
//! construction time by integrating the kernel at the center, and unit
//! tests pin it against the analytic value `Gamma(N/2) sin(pi s) /
//! pi^(N/2+1)`. Total mass 1 at off-center points is then a genuine
//! invariant of the quadrature rather than a tautology.

#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::quad::adaptive_simpson;

/// Per-piece absolute tolerance handed to the adaptive integrator.
const PIECE_TOL: f64 = 1e-10;

/// Exact-solution oracle for the exterior Dirichlet problem on a ball.
#[derive(Debug, Clone)]
pub struct BallKernel {
    dim: usize,
    center: Point,
    radius: f64,
    s: f64,
    /// Exponent of the boundary-flattening substitution `u = r(1 + w^k)`.
    k: i32,
    /// Normalizing constant, recovered by quadrature at the center.
    norm: f64,
}

impl BallKernel {
    pub fn new(dim: usize, center: Point, radius: f64, s: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGeometry("oracle dimension must be 1 or 2"));
        }
        if dim == 1 && center.y != 0.0 {
            return Err(Error::InvalidGeometry("1d shapes must keep y = 0"));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidGeometry("ball radius must be positive"));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::SOutOfRange(s));
        }
        // k(1-s) - 1 >= 2 keeps the substituted boundary integrand C^2.
        let k = (3.0 / (1.0 - s)).ceil() as i32;
        let mut oracle = BallKernel {
            dim,
            center,
            radius,
            s,
            k,
            norm: 1.0,
        };
        let mass = oracle.exterior_integral(0.0, radius, f64::INFINITY)?;
        let mass = if dim == 1 { 2.0 * mass } else { mass };
        oracle.norm = 1.0 / (radius.powf(2.0 * s) * mass);
        Ok(oracle)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn fractional_order(&self) -> f64 {
        self.s
    }

    /// The recovered normalizing constant `c`.
    pub fn normalization(&self) -> f64 {
        self.norm
    }

    /// Kernel density without the normalizing constant.
    ///
    /// `x` must be inside the ball and `y` strictly outside its closure.
    pub fn unnormalized(&self, x: Point, y: Point) -> f64 {
        let xi = x.dist(self.center);
        let eta = y.dist(self.center);
        let r2 = self.radius * self.radius;
        let bracket = (r2 - xi * xi) / (eta * eta - r2);
        let dist = x.dist(y);
        let decay = if self.dim == 1 {
            1.0 / dist
        } else {
            1.0 / (dist * dist)
        };
        bracket.powf(self.s) * decay
    }

    /// Harmonic measure of `[a, b]` (either end may be infinite) seen from
    /// the interior point `x`. The interval is clipped to the exterior of
    /// the ball, so passing supersets of the complement is fine.
    pub fn measure_of_interval(&self, x: Point, a: f64, b: f64) -> Result<f64> {
        if self.dim != 1 {
            return Err(Error::InvalidGeometry(
                "interval data requires a 1d oracle",
            ));
        }
        let (c, r) = (self.center.x, self.radius);
        let xi = x.x - c;
        if xi.abs() >= r {
            return Err(Error::InvalidGeometry("oracle point must be in the ball"));
        }
        if !(a <= b) {
            return Err(Error::InvalidGeometry("interval must satisfy a <= b"));
        }
        let mut total = 0.0;
        // right ray [c + r, inf), distance coordinate u = y - c
        let lo = (a - c).max(r);
        let hi = b - c;
        if hi > lo {
            total += self.exterior_integral(xi, lo, hi)?;
        }
        // left ray (-inf, c - r], distance coordinate u = c - y
        let lo = (c - b).max(r);
        let hi = c - a;
        if hi > lo {
            total += self.exterior_integral(-xi, lo, hi)?;
        }
        let r2s = (r * r - xi * xi).powf(self.s);
        Ok(self.norm * r2s * total)
    }

    /// Harmonic measure of the radial annulus `rho0 <= |y - c| <= rho1`
    /// seen from the interior point `x` (clipped to the exterior). In 1D
    /// the annulus is the symmetric pair of intervals.
    pub fn measure_of_annulus(&self, x: Point, rho0: f64, rho1: f64) -> Result<f64> {
        let xi = x.dist(self.center);
        let r = self.radius;
        if xi >= r {
            return Err(Error::InvalidGeometry("oracle point must be in the ball"));
        }
        if !(rho0 <= rho1) {
            return Err(Error::InvalidGeometry("annulus must satisfy rho0 <= rho1"));
        }
        let lo = rho0.max(r);
        if !(rho1 > lo) {
            return Ok(0.0);
        }
        let total = if self.dim == 1 {
            let xi_signed = x.x - self.center.x;
            self.exterior_integral(xi_signed, lo, rho1)?
                + self.exterior_integral(-xi_signed, lo, rho1)?
        } else {
            self.exterior_integral(xi, lo, rho1)?
        };
        let r2s = (r * r - xi * xi).powf(self.s);
        Ok(self.norm * r2s * total)
    }

    /// Measure of the entire exterior; equals 1 up to quadrature error.
    pub fn total_mass(&self, x: Point) -> Result<f64> {
        self.measure_of_annulus(x, self.radius, f64::INFINITY)
    }

    /// `int_u0^u1 (u^2 - r^2)^(-s) g(u) du` over one exterior ray, where
    /// `g` is the distance part of the kernel: `(u - xi)^(-1)` in 1D and
    /// `2 pi u / (u^2 - xi^2)` in 2D (angular integral already folded in).
    ///
    /// Split at `2r`: on the boundary band `[r, 2r]` the substitution
    /// `u = r(1 + w^k)` absorbs the `(u - r)^(-s)` edge singularity; on the
    /// tail the substitution `u = 2r sigma^(-1/(2s))` maps `[2r, inf)` to
    /// `(0, 1]` with a bounded smooth integrand.
    fn exterior_integral(&self, xi: f64, u0: f64, u1: f64) -> Result<f64> {
        let r = self.radius;
        let s = self.s;
        let u0 = u0.max(r);
        debug_assert!(u1 > u0);
        let mut total = 0.0;

        let band_hi = u1.min(2.0 * r);
        if band_hi > u0 {
            let k = self.k as f64;
            let w_of = |u: f64| ((u - r) / r).max(0.0).powf(1.0 / k);
            let (w0, w1) = (w_of(u0), w_of(band_hi));
            let f = |w: f64| {
                let u = r * (1.0 + w.powf(k));
                // (u^2-r^2)^(-s) = r^(-s) w^(-ks) (u+r)^(-s); the w-powers
                // combine with the Jacobian r k w^(k-1) into w^(k-1-ks).
                let edge = r.powf(1.0 - s) * k * w.powf(k - 1.0 - k * s) * (u + r).powf(-s);
                edge * self.distance_part(xi, u)
            };
            total += adaptive_simpson(&f, w0, w1, PIECE_TOL)?;
        }

        let tail_lo = u0.max(2.0 * r);
        if u1 > tail_lo {
            let two_r = 2.0 * r;
            let sig_of = |u: f64| {
                if u.is_infinite() {
                    0.0
                } else {
                    (two_r / u).powf(2.0 * s)
                }
            };
            let (s0, s1) = (sig_of(u1), sig_of(tail_lo));
            let f = |sig: f64| {
                // inverse distance stays finite even at sigma = 0 (u = inf)
                let iu = sig.powf(0.5 / s) / two_r;
                let decay = two_r.powf(-2.0 * s) / (2.0 * s);
                let edge = (1.0 - (r * iu) * (r * iu)).powf(-s);
                let dist = if self.dim == 1 {
                    1.0 / (1.0 - xi * iu)
                } else {
                    2.0 * core::f64::consts::PI / (1.0 - (xi * iu) * (xi * iu))
                };
                decay * edge * dist
            };
            total += adaptive_simpson(&f, s0, s1, PIECE_TOL)?;
        }
        Ok(total)
    }

    /// The non-edge factor of the kernel along a ray: `u^(-N)` distance
    /// decay times the angular mass (2D integrates the full circle).
    fn distance_part(&self, xi: f64, u: f64) -> f64 {
        if self.dim == 1 {
            1.0 / (u - xi)
        } else {
            2.0 * core::f64::consts::PI * u / (u * u - xi * xi)
        }
    }
}

/// Boundary growth profile of the half-space problem: the function
/// `d -> max(d, 0)^s` solves the exterior Dirichlet problem on a half-line
/// with data 0 behind the boundary, up to normalization. Used as the
/// reference decay rate near flat boundary pieces.
pub fn halfspace_profile(d: f64, s: f64) -> f64 {
    if d <= 0.0 {
        0.0
    } else {
        d.powf(s)
    }
}
