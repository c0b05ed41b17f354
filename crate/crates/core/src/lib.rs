//! Numerical toolkit for fractional Dirichlet problems on 1D/2D grids.
//!
//! The crate assembles discrete Gagliardo energy forms for the fractional
//! Laplacian on uniform Cartesian grids, solves the associated Dirichlet
//! problems, and builds the standard diagnostics on top of them:
//!
//! * [`measure`] — fractional harmonic measure and its decay exponents,
//! * [`extension`] — the degenerate-weight extension problem in one extra
//!   dimension and its trace consistency check,
//! * [`capacity`] — Besov and weighted condenser capacities, capacity
//!   density (fatness) scans, and trivial-boundary-point detection,
//! * [`holder`] — Holder-growth constants and operator-norm lower bounds
//!   for the boundary-to-interior solution map,
//! * [`oracle`] — independent reference solutions (ball Poisson kernel,
//!   half-space profile) used to validate the solvers.
//!
//! Everything is deterministic: fixed summation orders, fixed quadrature
//! rules, no randomness. The crate is `no_std` (with `alloc`); all IO and
//! orchestration live in the companion CLI crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod capacity;
pub mod error;
pub mod extension;
pub mod geometry;
pub mod holder;
pub mod measure;
pub mod nonlocal;
pub mod oracle;
pub mod quad;

mod linalg;

pub use capacity::{
    besov_capacity, besov_capacity_with, default_refinement, fatness_ratio, fatness_ratio_with,
    fatness_scan, perfectness_check, trivial_point_test, weighted_capacity, CapacityResult,
    FatnessReport, FatnessSample, TrivialPointVerdict, WeightedCapacityResult,
    DEFAULT_FATNESS_THRESHOLD, DEFAULT_PERFECTNESS_RATIO,
};
pub use error::{Error, Result};
pub use geometry::{Aabb, Domain, ExtensionGrid, Grid, NodeClass, Point, Region};
pub use extension::{cs_consistency, CsReport, ExtensionField, WeightedForm};
pub use holder::{
    admissible_exponent, default_exponent_grid, growth_constant, growth_constant_with,
    holder_datum, holder_report, holder_seminorm, interior_oscillation_exponent,
    map_norm_lower_bound, HolderReport, OscillationDecay, DATUM_NORM_BOUND,
};
pub use measure::{
    complementation_residual, dyadic_radii, fit_decay, ghmd_samples, harmonic_measure,
    harmonic_measure_with, lhmd_samples, DecayFit, DecayKind, DecaySample, DecaySamples,
};
pub use nonlocal::{Field, NonlocalForm};
pub use oracle::{halfspace_profile, BallKernel};
