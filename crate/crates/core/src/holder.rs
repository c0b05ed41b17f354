//! Holder-growth diagnostics for the boundary-to-interior solution map.
//!
//! The probe family is the clamped distance power `min(d(x, a)^sigma, 1)`
//! anchored at a boundary point. Solving the Dirichlet problem with that
//! datum and comparing the solution against `d(x, a)^sigma` yields the
//! growth constant whose stability under refinement characterizes
//! regular boundaries; the same solutions feed a lower bound on the
//! Holder operator norm of the solution map, using that the probe datum
//! has Holder norm at most 2 (sup at most 1 by the clamp, seminorm at
//! most 1 because distance powers with exponents in (0, 1] are
//! 1-Holder).
//!
//! The admissible exponent range is capped by the interior smoothness of
//! solutions, estimated empirically from oscillation decay on shrinking
//! concentric balls; [`admissible_exponent`] combines that estimate with
//! the fractional order.

use alloc::vec::Vec;

#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{Grid, Point};
use crate::nonlocal::{Field, NonlocalForm};

/// Holder norm bound of the probe datum, used as the denominator of the
/// operator-norm lower bound.
pub const DATUM_NORM_BOUND: f64 = 2.0;

/// Nodes closer to the anchor than this many grid cells are excluded
/// from the growth-constant supremum: the comparison power is
/// resolution-limited there and would pollute the constant.
pub const ANCHOR_EXCLUSION_CELLS: f64 = 2.0;

/// Growth and norm diagnostics for one exponent over an anchor family.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderReport {
    /// The probed Holder exponent.
    pub sigma: f64,
    /// Largest ratio `u(x) / d(x, a)^sigma` over anchors and interior
    /// nodes outside the exclusion ring.
    pub growth_constant: f64,
    /// Largest interior Holder seminorm among the anchor solutions.
    pub seminorm: f64,
    /// `seminorm / 2`: a lower bound on the operator norm of the
    /// solution map between Holder classes of the same exponent.
    pub norm_lower_bound: f64,
    /// Grid spacing the diagnostics were computed on.
    pub spacing: f64,
    /// Number of interior nodes.
    pub interior_nodes: usize,
    /// Number of anchors scanned.
    pub anchors: usize,
}

/// Outcome of the interior oscillation-decay fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OscillationDecay {
    /// Every usable level had zero oscillation (constant fields); the
    /// data places no constraint on the exponent.
    Unconstrained,
    /// Fitted decay exponent of the oscillation in the ball radius.
    Exponent(f64),
}

impl OscillationDecay {
    pub fn is_unconstrained(&self) -> bool {
        matches!(self, OscillationDecay::Unconstrained)
    }

    pub fn exponent(&self) -> Option<f64> {
        match self {
            OscillationDecay::Unconstrained => None,
            OscillationDecay::Exponent(a) => Some(*a),
        }
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::ExponentOutOfRange(sigma));
    }
    Ok(())
}

/// The probe datum `min(d(x, anchor)^sigma, 1)`, evaluated exactly.
///
/// Vanishes at the anchor, saturates at distance 1, and has Holder norm
/// at most [`DATUM_NORM_BOUND`] for every exponent in `(0, 1]`.
pub fn holder_datum(anchor: Point, sigma: f64, x: Point) -> f64 {
    let d = x.dist(anchor);
    if d >= 1.0 {
        1.0
    } else {
        libm::pow(d, sigma)
    }
}

fn solve_datum(form: &NonlocalForm, anchor: Point, sigma: f64) -> Result<Field> {
    let data = Field::from_fn(form.grid(), |p| holder_datum(anchor, sigma, p))?;
    // the datum equals 1 beyond unit distance, hence beyond the grid box
    form.solve_dirichlet(&data, 1.0)
}

fn growth_sup(grid: &Grid, u: &Field, anchor: Point, sigma: f64) -> Result<f64> {
    let cutoff = ANCHOR_EXCLUSION_CELLS * grid.spacing();
    let mut best: Option<f64> = None;
    for &id in grid.interior_ids() {
        let d = grid.node(id).dist(anchor);
        if d < cutoff {
            continue;
        }
        let ratio = u.get(id) / libm::pow(d, sigma);
        best = Some(best.map_or(ratio, |b| if ratio > b { ratio } else { b }));
    }
    best.ok_or(Error::InsufficientInteriorRoom)
}

/// Growth constant of the solution with probe datum anchored at the
/// boundary point nearest `anchor`: the supremum of
/// `u(x) / d(x, a)^sigma` over interior nodes at least `2h` from the
/// anchor.
///
/// Stable under refinement exactly on domains whose boundary carries no
/// trivial portion near the anchor; at a polar point it grows like a
/// negative power of the spacing.
pub fn growth_constant(grid: &Grid, s: f64, anchor: Point, sigma: f64) -> Result<f64> {
    let form = NonlocalForm::assemble(grid, s)?;
    growth_constant_with(&form, anchor, sigma)
}

/// [`growth_constant`] on a pre-assembled form.
pub fn growth_constant_with(form: &NonlocalForm, anchor: Point, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let (_, a) = form.grid().snap_anchor(anchor)?;
    let u = solve_datum(form, a, sigma)?;
    growth_sup(form.grid(), &u, a, sigma)
}

/// Holder seminorm of a field over the interior nodes: the maximum of
/// `|u_i - u_j| / d(x_i, x_j)^sigma` over all interior pairs, computed
/// exactly with a fixed reduction order.
pub fn holder_seminorm(grid: &Grid, u: &Field, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if u.stamp() != grid.stamp() {
        return Err(Error::GridMismatch);
    }
    let ids = grid.interior_ids();
    let mut worst = 0.0f64;
    for (k, &i) in ids.iter().enumerate() {
        let pi = grid.node(i);
        let ui = u.get(i);
        for &j in &ids[k + 1..] {
            let d = grid.node(j).dist(pi);
            let ratio = (u.get(j) - ui).abs() / libm::pow(d, sigma);
            if ratio > worst {
                worst = ratio;
            }
        }
    }
    Ok(worst)
}

/// Lower bound on the Holder operator norm of the solution map: the
/// largest solution seminorm over the probe family, divided by the
/// probe-norm bound 2.
///
/// Only a lower bound — the supremum over all admissible data is not
/// computable — but the probe family is the extremal one for the
/// growth characterization, so stability of this bound under refinement
/// is meaningful.
pub fn map_norm_lower_bound(
    grid: &Grid,
    s: f64,
    sigma: f64,
    anchors: &[Point],
) -> Result<f64> {
    check_sigma(sigma)?;
    if anchors.is_empty() {
        return Err(Error::InvalidGeometry("empty anchor family"));
    }
    let form = NonlocalForm::assemble(grid, s)?;
    let mut worst = 0.0f64;
    for &anchor in anchors {
        let (_, a) = grid.snap_anchor(anchor)?;
        let u = solve_datum(&form, a, sigma)?;
        let semi = holder_seminorm(grid, &u, sigma)?;
        if semi > worst {
            worst = semi;
        }
    }
    Ok(worst / DATUM_NORM_BOUND)
}

/// Full diagnostic sweep for one exponent over an anchor family:
/// growth constant, worst solution seminorm, and the operator-norm
/// lower bound, sharing one assembled form.
pub fn holder_report(
    grid: &Grid,
    s: f64,
    anchors: &[Point],
    sigma: f64,
) -> Result<HolderReport> {
    check_sigma(sigma)?;
    if anchors.is_empty() {
        return Err(Error::InvalidGeometry("empty anchor family"));
    }
    let form = NonlocalForm::assemble(grid, s)?;
    let mut growth = 0.0f64;
    let mut seminorm = 0.0f64;
    for &anchor in anchors {
        let (_, a) = grid.snap_anchor(anchor)?;
        let u = solve_datum(&form, a, sigma)?;
        let c1 = growth_sup(grid, &u, a, sigma)?;
        let semi = holder_seminorm(grid, &u, sigma)?;
        if c1 > growth {
            growth = c1;
        }
        if semi > seminorm {
            seminorm = semi;
        }
    }
    Ok(HolderReport {
        sigma,
        growth_constant: growth,
        seminorm,
        norm_lower_bound: seminorm / DATUM_NORM_BOUND,
        spacing: grid.spacing(),
        interior_nodes: grid.interior_ids().len(),
        anchors: anchors.len(),
    })
}

/// Fits the oscillation-decay exponent of a field on five concentric
/// balls `B_{rho / 2^k}(center)`, `k = 0..=4`.
///
/// Every grid node in the closed outermost ball must be interior — the
/// estimate is about interior smoothness and a ball leaking outside
/// returns [`Error::InsufficientInteriorRoom`]. Levels whose ball holds
/// fewer than two nodes or whose oscillation is zero are dropped; with
/// fewer than two usable levels the data is reported as
/// [`OscillationDecay::Unconstrained`].
pub fn interior_oscillation_exponent(
    grid: &Grid,
    u: &Field,
    center: Point,
    rho: f64,
) -> Result<OscillationDecay> {
    if u.stamp() != grid.stamp() {
        return Err(Error::GridMismatch);
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidGeometry("oscillation radius must be positive"));
    }

    // distances of interior nodes to the center; any non-interior node
    // inside the outer ball disqualifies the pair
    let mut members: Vec<(f64, f64)> = Vec::new();
    for id in 0..grid.len() {
        let d = grid.node(id).dist(center);
        if d <= rho {
            if !grid.is_interior(id) {
                return Err(Error::InsufficientInteriorRoom);
            }
            members.push((d, u.get(id)));
        }
    }
    if members.is_empty() {
        return Err(Error::InsufficientInteriorRoom);
    }

    let mut logs: Vec<(f64, f64)> = Vec::new();
    for k in 0..=4u32 {
        let r = rho / libm::pow(2.0, k as f64);
        let mut count = 0usize;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(d, v) in &members {
            if d <= r {
                count += 1;
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        let osc = hi - lo;
        if count >= 2 && osc > 0.0 {
            logs.push((r.ln(), osc.ln()));
        }
    }
    if logs.len() < 2 {
        return Ok(OscillationDecay::Unconstrained);
    }

    let n = logs.len() as f64;
    let xbar = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let ybar = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - xbar) * (p.0 - xbar)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - xbar) * (p.1 - ybar)).sum();
    Ok(OscillationDecay::Exponent(sxy / sxx))
}

/// Largest admissible probe exponent: the fractional order capped by
/// the measured interior smoothness (and by 1).
pub fn admissible_exponent(s: f64, decay: &OscillationDecay) -> f64 {
    let cap = match decay {
        OscillationDecay::Unconstrained => s,
        OscillationDecay::Exponent(a) => s.min(*a),
    };
    cap.min(1.0)
}

/// Default exponent sweep below a cap: `{0.1, 0.25, s/2, 0.9 * cap}`,
/// filtered to `(0, cap]`, sorted, deduplicated.
pub fn default_exponent_grid(s: f64, cap: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = [0.1, 0.25, 0.5 * s, 0.9 * cap]
        .into_iter()
        .filter(|&x| x > 0.0 && x <= cap && x <= 1.0)
        .collect();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    grid
}
