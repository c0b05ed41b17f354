//! Fractional harmonic measure and boundary decay ladders.
//!
//! The harmonic measure of a probe set `G` in the complement of the
//! domain is the solution of the Dirichlet problem with indicator data
//! `chi_G`; evaluated at an interior point it is the probability that the
//! associated jump process lands in `G` on first exit. Everything in this
//! module reduces to such solves:
//!
//! * [`harmonic_measure`] — one solve for one probe set,
//! * [`complementation_residual`] — certifies `w(G) + w(G^c) = 1`,
//! * [`ghmd_samples`] — global ladder: the measure of the far exterior
//!   `Omega^c \ B_r(a)` sampled at dyadic distances from the boundary
//!   anchor `a`, over a shrinking sequence of radii,
//! * [`lhmd_samples`] — localized ladder: the domain is re-gridded to
//!   `Omega ∩ B_r(a)` and the measure of `B_r(a)^c` is sampled the same
//!   way,
//! * [`fit_decay`] — least-squares power-law fit through either ladder.
//!
//! Decay of the ladders with an exponent bounded away from zero is the
//! measure-theoretic face of boundary regularity; the capacity and
//! Holder modules probe the same property from their own sides.

use alloc::vec::Vec;

#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{default_box, Domain, Grid, Point, Region};
use crate::nonlocal::{Field, NonlocalForm};

/// Probe distances, as fractions of the ladder radius.
pub const PROBE_FRACTIONS: [f64; 3] = [0.5, 0.25, 0.125];

/// Fit exclusion threshold: ten times the residual target of the linear
/// solver. Values below this are indistinguishable from solver noise and
/// would corrupt a log-log fit.
pub const FIT_FLOOR: f64 = 1e-11;

/// Minimum number of usable (distance, value) pairs for a decay fit.
pub const MIN_FIT_SAMPLES: usize = 6;

/// Cells per ladder radius when re-gridding a localized domain. The 1D
/// count is chosen so that even a single-node obstacle (the smallest
/// non-trivial boundary feature) is resolved at the innermost probe
/// distance; 2D grids pay quadratically for resolution and stay coarser.
const LOCAL_CELLS_1D: f64 = 128.0;
const LOCAL_CELLS_2D: f64 = 16.0;

/// Which decay quantity a sample ladder records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayKind {
    /// Measure of the far exterior, computed on the full domain.
    Global,
    /// Measure of the ball complement, computed on the localized domain.
    Local,
}

/// One probe of a decay ladder: a measure value at distance `distance`
/// from the anchor, belonging to the ladder radius `radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySample {
    pub radius: f64,
    pub distance: f64,
    pub value: f64,
}

/// Harmonic-measure values along a shrinking ladder of radii.
///
/// Entries are kept sorted by radius (descending), then by distance
/// (descending); every value lies in `[0, 1]` and every distance in
/// `(0, radius)`. Construction enforces these invariants.
#[derive(Debug, Clone)]
pub struct DecaySamples {
    kind: DecayKind,
    anchor: Point,
    entries: Vec<DecaySample>,
}

impl DecaySamples {
    /// Validates and sorts a raw entry list.
    pub fn from_entries(
        kind: DecayKind,
        anchor: Point,
        mut entries: Vec<DecaySample>,
    ) -> Result<DecaySamples> {
        for e in &entries {
            if !e.value.is_finite() || !(0.0..=1.0).contains(&e.value) {
                return Err(Error::InvalidGeometry(
                    "decay sample value outside [0, 1]",
                ));
            }
            if !(e.distance > 0.0) || !(e.distance < e.radius) {
                return Err(Error::InvalidGeometry(
                    "decay sample distance outside (0, radius)",
                ));
            }
        }
        entries.sort_unstable_by(|a, b| {
            (b.radius, b.distance)
                .partial_cmp(&(a.radius, a.distance))
                .expect("validated finite")
        });
        Ok(DecaySamples {
            kind,
            anchor,
            entries,
        })
    }

    pub fn kind(&self) -> DecayKind {
        self.kind
    }

    pub fn anchor(&self) -> Point {
        self.anchor
    }

    pub fn entries(&self) -> &[DecaySample] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Power-law fit `value ~ constant * (distance / radius)^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// Fitted decay exponent (the log-log slope).
    pub exponent: f64,
    /// Fitted multiplicative constant.
    pub constant: f64,
    /// Root-mean-square residual in log-log coordinates.
    pub residual: f64,
    /// Number of samples that entered the fit after exclusions.
    pub samples: usize,
}

/// Indicator data of the probe set, plus its value at infinity.
///
/// The value at infinity follows the one-point compactification: `1`
/// when `G` is unbounded, `0` otherwise. Fails with `GNotInComplement`
/// if any interior node lies in `G`; membership is decided at node
/// positions (cell centers), with no smoothing at the edge of `G`.
fn measure_data(grid: &Grid, g_set: &Region) -> Result<(Field, f64)> {
    let dim = grid.dim();
    for &id in grid.interior_ids() {
        if g_set.contains(dim, grid.node(id)) {
            return Err(Error::GNotInComplement { node: id });
        }
    }
    let data = Field::from_fn(grid, |p| {
        if g_set.contains(dim, p) {
            1.0
        } else {
            0.0
        }
    })?;
    let g_inf = if g_set.is_bounded(dim) { 0.0 } else { 1.0 };
    Ok((data, g_inf))
}

/// Harmonic measure of the probe set `G ⊆ Omega^c`.
///
/// Returns the full solution field: interior nodes carry the measure
/// (in `[0, 1]` by the maximum principle), exterior nodes carry the
/// indicator data itself.
pub fn harmonic_measure(grid: &Grid, s: f64, g_set: &Region) -> Result<Field> {
    let form = NonlocalForm::assemble(grid, s)?;
    harmonic_measure_with(&form, g_set)
}

/// [`harmonic_measure`] on a pre-assembled form. Prefer this variant when
/// several probe sets are measured on the same grid; assembly is the
/// expensive step.
pub fn harmonic_measure_with(form: &NonlocalForm, g_set: &Region) -> Result<Field> {
    let (data, g_inf) = measure_data(form.grid(), g_set)?;
    form.solve_dirichlet(&data, g_inf)
}

/// Largest deviation of `w(G) + w(Omega^c \ G)` from one over the
/// interior.
///
/// The complementary solve uses exactly the complementary data
/// (`1 - chi_G` on exterior nodes, `1 - chi_G(inf)` at infinity), so the
/// residual certifies the solver's normalization independently of how
/// the value at infinity is assigned to an individual probe set.
pub fn complementation_residual(grid: &Grid, s: f64, g_set: &Region) -> Result<f64> {
    let form = NonlocalForm::assemble(grid, s)?;
    let (data, g_inf) = measure_data(grid, g_set)?;
    let co_values: Vec<f64> = data.values().iter().map(|v| 1.0 - v).collect();
    let co_data = Field::from_values(grid, co_values)?;
    let w = form.solve_dirichlet(&data, g_inf)?;
    let co = form.solve_dirichlet(&co_data, 1.0 - g_inf)?;
    let mut worst = 0.0f64;
    for &id in grid.interior_ids() {
        worst = worst.max((w.get(id) + co.get(id) - 1.0).abs());
    }
    Ok(worst)
}

/// Default ladder radii: `diam(Omega)/4 * 2^{-k}` for `k = 0..=5`, with
/// the bounding-box diagonal standing in for the diameter.
pub fn dyadic_radii(domain: &Domain) -> [f64; 6] {
    let r0 = 0.25 * domain.diameter_hint();
    core::array::from_fn(|k| r0 * libm::pow(0.5, k as f64))
}

/// Global decay ladder at the boundary anchor `a`.
///
/// For each radius the probe set is the far exterior `Omega^c \ B_r(a)`
/// and the measure is sampled near distances `r/2, r/4, r/8` from the
/// snapped anchor. Each sample takes the largest value among interior
/// nodes within half a spacing of the target distance (the conservative
/// choice for decay claims) and reports that node's true distance;
/// target distances with no such node are skipped.
pub fn ghmd_samples(
    domain: &Domain,
    grid: &Grid,
    s: f64,
    anchor: Point,
    radii: &[f64],
) -> Result<DecaySamples> {
    let (_, a) = grid.snap_anchor(anchor)?;
    let radii = checked_ladder(domain, radii)?;
    let form = NonlocalForm::assemble(grid, s)?;
    let mut entries = Vec::new();
    for &r in &radii {
        let far = Region::difference(domain.exterior_region(), Region::ball(a, r));
        let w = harmonic_measure_with(&form, &far)?;
        push_ring_probes(grid, &w, a, r, &mut entries);
    }
    DecaySamples::from_entries(DecayKind::Global, a, entries)
}

/// Localized decay ladder at the boundary anchor `a`.
///
/// For each radius the domain is re-gridded to `Omega ∩ B_r(a)` (128
/// cells per radius in 1D, 16 in 2D, grid box four times the local
/// bounding box) and the measure of the full ball complement `B_r(a)^c`
/// is sampled at the same dyadic distances as in [`ghmd_samples`].
pub fn lhmd_samples(
    domain: &Domain,
    grid: &Grid,
    s: f64,
    anchor: Point,
    radii: &[f64],
) -> Result<DecaySamples> {
    let (_, a) = grid.snap_anchor(anchor)?;
    let radii = checked_ladder(domain, radii)?;
    let dim = domain.dim();
    let cells = if dim == 1 {
        LOCAL_CELLS_1D
    } else {
        LOCAL_CELLS_2D
    };
    let mut entries = Vec::new();
    for &r in &radii {
        let local_region = Region::intersect(domain.region().clone(), Region::ball(a, r));
        let local_dom = Domain::new(dim, local_region)?;
        let h = r / cells;
        let lgrid = Grid::build(&local_dom, default_box(&local_dom, h, 4.0), h)?;
        if lgrid.interior_ids().is_empty() {
            return Err(Error::LocalDomainEmpty);
        }
        let co_ball = Region::complement(Region::ball(a, r));
        let w = harmonic_measure(&lgrid, s, &co_ball)?;
        push_ring_probes(&lgrid, &w, a, r, &mut entries);
    }
    DecaySamples::from_entries(DecayKind::Local, a, entries)
}

/// Validates a radius ladder: positive, below half the diameter; sorted
/// descending with duplicates dropped.
fn checked_ladder(domain: &Domain, radii: &[f64]) -> Result<Vec<f64>> {
    let max = 0.5 * domain.diameter_hint();
    let mut rs = Vec::with_capacity(radii.len());
    for &r in radii {
        if !r.is_finite() || !(r > 0.0) {
            return Err(Error::InvalidGeometry("probe radius must be positive"));
        }
        if r >= max {
            return Err(Error::RadiusTooLarge { r, max });
        }
        rs.push(r);
    }
    rs.sort_unstable_by(|a, b| b.partial_cmp(a).expect("validated finite"));
    rs.dedup();
    Ok(rs)
}

/// Appends the ring probes for one ladder radius, one per fraction,
/// skipping empty rings and never reusing a node within the radius.
fn push_ring_probes(
    grid: &Grid,
    w: &Field,
    a: Point,
    r: f64,
    entries: &mut Vec<DecaySample>,
) {
    let h = grid.spacing();
    let mut used = [usize::MAX; PROBE_FRACTIONS.len()];
    for (slot, &f) in PROBE_FRACTIONS.iter().enumerate() {
        let target = f * r;
        let mut best: Option<(usize, f64, f64)> = None;
        for &id in grid.interior_ids() {
            let dist = grid.node(id).dist(a);
            if (dist - target).abs() > 0.5 * h || dist >= r {
                continue;
            }
            if used[..slot].contains(&id) {
                continue;
            }
            let v = w.get(id);
            if best.map_or(true, |(_, _, bv)| v > bv) {
                best = Some((id, dist, v));
            }
        }
        if let Some((id, dist, v)) = best {
            used[slot] = id;
            entries.push(DecaySample {
                radius: r,
                distance: dist,
                value: v,
            });
        }
    }
}

/// Least-squares power-law fit through a decay ladder.
///
/// Fits `log(value)` against `log(distance/radius)`; the slope is the
/// decay exponent, the exponentiated intercept the constant. Samples
/// with values outside `(FIT_FLOOR, 1)` are excluded; fewer than
/// [`MIN_FIT_SAMPLES`] survivors is an error, as is a ladder with no
/// variation in either coordinate.
pub fn fit_decay(samples: &DecaySamples) -> Result<DecayFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for e in samples.entries() {
        if e.value <= FIT_FLOOR || e.value >= 1.0 {
            continue;
        }
        xs.push((e.distance / e.radius).ln());
        ys.push(e.value.ln());
    }
    let n = xs.len();
    if n < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            have: n,
            need: MIN_FIT_SAMPLES,
        });
    }
    let varies = |v: &[f64]| v.iter().any(|&a| (a - v[0]).abs() > 1e-12);
    if !varies(&xs) || !varies(&ys) {
        return Err(Error::DegenerateSamples);
    }
    let nf = n as f64;
    let xbar = xs.iter().sum::<f64>() / nf;
    let ybar = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(&ys) {
        sxx += (x - xbar) * (x - xbar);
        sxy += (x - xbar) * (y - ybar);
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let mut ss = 0.0;
    for (&x, &y) in xs.iter().zip(&ys) {
        let e = y - (intercept + slope * x);
        ss += e * e;
    }
    Ok(DecayFit {
        exponent: slope,
        constant: intercept.exp(),
        residual: (ss / nf).sqrt(),
        samples: n,
    })
}
