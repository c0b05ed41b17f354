//! Condenser capacities, fatness ratios, and trivial-point detection.
//!
//! The Besov capacity of a compact set `K` inside an ambient ball `B` is
//! the minimum of the (doubled) Gagliardo energy over fields that equal
//! one on `K` and zero outside `B`; with the quadratic energy the
//! obstacle constraint collapses to equality on `K` and the minimizer is
//! an equilibrium potential solving a constrained linear system. The
//! weighted variant minimizes the degenerate-weight Dirichlet energy in
//! one extra dimension with `K` on the trace plane.
//!
//! On top of the two capacities sit the boundary-regularity diagnostics:
//! the fatness ratio `psi(a, E, r)` compares the capacity of `E` clipped
//! to a ball against the full ball's capacity, scans of `psi` over
//! anchors and radii decide uniform fatness, the perfectness check tests
//! annulus intersections, and the trivial-point test watches the
//! capacity of `B_r(a) \ Omega` collapse (or not) under grid refinement.
//!
//! Kernels and sets are resolved at node positions; a set too small for
//! the lattice is represented by whatever nodes it captures, and
//! refinement trends — not absolute values at one resolution — decide
//! polarity questions.

use alloc::vec;
use alloc::vec::Vec;

#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::extension::{ExtensionField, WeightedForm};
use crate::geometry::{default_box, Aabb, Domain, ExtensionGrid, Grid, Point, Region};
use crate::nonlocal::{Field, NonlocalForm};

/// Default uniform-fatness threshold for scan verdicts.
pub const DEFAULT_FATNESS_THRESHOLD: f64 = 0.05;

/// Default inner-to-outer annulus ratio for perfectness checks.
pub const DEFAULT_PERFECTNESS_RATIO: f64 = 0.25;

/// Besov condenser capacity of a kernel inside an ambient ball.
#[derive(Debug, Clone)]
pub struct CapacityResult {
    /// Doubled minimal Gagliardo energy (units `length^{N-2s}`).
    pub value: f64,
    /// Equilibrium potential: 1 on kernel nodes, 0 outside the ball,
    /// discretely s-harmonic in between.
    pub potential: Field,
    /// Largest normalized equation residual over the free nodes.
    pub residual: f64,
    /// Number of grid nodes the kernel captured; 0 flags an empty
    /// kernel (value 0, not an error).
    pub kernel_nodes: usize,
    pub ball_center: Point,
    pub ball_radius: f64,
}

impl CapacityResult {
    pub fn is_empty_kernel(&self) -> bool {
        self.kernel_nodes == 0
    }
}

/// Weighted condenser capacity in the extension cylinder.
#[derive(Debug, Clone)]
pub struct WeightedCapacityResult {
    /// Minimal weighted Dirichlet energy (units `length^{N+theta-1}`);
    /// the reflection across the trace plane is already included.
    pub value: f64,
    /// Equilibrium potential on the extension grid.
    pub potential: ExtensionField,
    /// Largest normalized equation residual over the free nodes.
    pub residual: f64,
    pub kernel_nodes: usize,
    pub ball_center: Point,
    pub ball_radius: f64,
}

impl WeightedCapacityResult {
    pub fn is_empty_kernel(&self) -> bool {
        self.kernel_nodes == 0
    }
}

/// One cell of a fatness scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FatnessSample {
    pub anchor: Point,
    pub radius: f64,
    pub psi: f64,
}

/// Fatness ratios over a grid of anchors and radii, with a verdict
/// against a threshold.
#[derive(Debug, Clone)]
pub struct FatnessReport {
    samples: Vec<FatnessSample>,
    threshold: f64,
}

impl FatnessReport {
    pub fn samples(&self) -> &[FatnessSample] {
        &self.samples
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Smallest ratio over the scan.
    pub fn min_psi(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.psi)
            .fold(f64::INFINITY, f64::min)
    }

    /// Uniform-fatness verdict: every ratio at or above the threshold.
    pub fn is_fat(&self) -> bool {
        self.min_psi() >= self.threshold
    }
}

/// Capacity values for one boundary point across a grid-refinement
/// ladder, and the resulting polarity verdict.
#[derive(Debug, Clone)]
pub struct TrivialPointVerdict {
    /// Capacity of `B_r(a) \ Omega` inside `B_2r(a)` per refinement.
    pub values: Vec<f64>,
    /// True when every refinement at least halves the capacity — the
    /// signature of a polar (trivial) boundary portion.
    pub is_trivial: bool,
    /// The fixed probe radius.
    pub radius: f64,
}

/// Bounding box of a ball, degenerate in `y` for 1D.
fn ball_bbox(dim: usize, center: Point, radius: f64) -> Aabb {
    let ry = if dim == 1 { 0.0 } else { radius };
    Aabb::new(
        Point::new(center.x - radius, center.y - ry),
        Point::new(center.x + radius, center.y + ry),
    )
}

/// Besov condenser capacity of `kernel` relative to the ball
/// `B_radius(center)`.
///
/// The kernel is resolved at node positions; an empty resolution yields
/// value 0 with `kernel_nodes = 0` rather than an error. The ambient
/// ball must sit inside the grid box and contain every kernel node.
pub fn besov_capacity(
    grid: &Grid,
    s: f64,
    kernel: &Region,
    center: Point,
    radius: f64,
) -> Result<CapacityResult> {
    let form = NonlocalForm::assemble(grid, s)?;
    besov_capacity_with(&form, kernel, center, radius)
}

/// [`besov_capacity`] on a pre-assembled form; assembly is the
/// expensive step, so scans share one form per grid.
pub fn besov_capacity_with(
    form: &NonlocalForm,
    kernel: &Region,
    center: Point,
    radius: f64,
) -> Result<CapacityResult> {
    let grid = form.grid();
    let dim = grid.dim();
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidGeometry("ambient radius must be positive"));
    }
    if !grid.bbox().contains_box(dim, &ball_bbox(dim, center, radius)) {
        return Err(Error::GeometryViolation(
            "ambient ball not inside the grid box",
        ));
    }

    let n = grid.len();
    let mut fixed: Vec<Option<f64>> = vec![None; n];
    let mut kernel_nodes = 0;
    for id in 0..n {
        let p = grid.node(id);
        if kernel.contains(dim, p) {
            if p.dist(center) >= radius {
                return Err(Error::GeometryViolation(
                    "kernel not inside the ambient ball",
                ));
            }
            fixed[id] = Some(1.0);
            kernel_nodes += 1;
        } else if p.dist(center) >= radius {
            fixed[id] = Some(0.0);
        }
    }

    if kernel_nodes == 0 {
        return Ok(CapacityResult {
            value: 0.0,
            potential: Field::constant(grid, 0.0)?,
            residual: 0.0,
            kernel_nodes: 0,
            ball_center: center,
            ball_radius: radius,
        });
    }

    let potential = form.solve_constrained(&fixed, 0.0)?;
    let free: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
    let residual = form.residual_at(&potential, &free, 0.0)?;
    // the seminorm integrates ordered pairs; the form counts each once
    let value = 2.0 * form.energy(&potential)?;
    Ok(CapacityResult {
        value,
        potential,
        residual,
        kernel_nodes,
        ball_center: center,
        ball_radius: radius,
    })
}

/// Weighted condenser capacity of a trace-plane kernel relative to the
/// ball of the given radius about `(center, 0)` in the extension space.
///
/// The potential is one on kernel nodes of the trace plane, zero on
/// every node outside the ball (in `N+1` dimensions), and solves the
/// weighted equation in between. The ball must fit inside the extension
/// cylinder.
pub fn weighted_capacity(
    eg: &ExtensionGrid,
    kernel: &Region,
    center: Point,
    radius: f64,
) -> Result<WeightedCapacityResult> {
    let base = eg.base();
    let dim = base.dim();
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidGeometry("ambient radius must be positive"));
    }
    if !base.bbox().contains_box(dim, &ball_bbox(dim, center, radius))
        || radius > eg.height()
    {
        return Err(Error::GeometryViolation(
            "ambient ball not inside the extension cylinder",
        ));
    }

    let nb = base.len();
    let heights = eg.heights();
    let mut fixed: Vec<Option<f64>> = vec![None; eg.len()];
    let mut kernel_nodes = 0;
    for (k, &t) in heights.iter().enumerate() {
        for i in 0..nb {
            let p = base.node(i);
            let planar = p.dist(center);
            let d = (planar * planar + t * t).sqrt();
            let idx = k * nb + i;
            if k == 0 && kernel.contains(dim, p) {
                if d >= radius {
                    return Err(Error::GeometryViolation(
                        "kernel not inside the ambient ball",
                    ));
                }
                fixed[idx] = Some(1.0);
                kernel_nodes += 1;
            } else if d >= radius {
                fixed[idx] = Some(0.0);
            }
        }
    }

    let form = WeightedForm::assemble(eg);
    if kernel_nodes == 0 {
        let potential = form.solve_constrained(&vec![Some(0.0); eg.len()])?;
        return Ok(WeightedCapacityResult {
            value: 0.0,
            potential,
            residual: 0.0,
            kernel_nodes: 0,
            ball_center: center,
            ball_radius: radius,
        });
    }

    let potential = form.solve_constrained(&fixed)?;
    let free: Vec<usize> = (0..eg.len()).filter(|&i| fixed[i].is_none()).collect();
    let residual = form.residual_at(&potential, &free)?;
    let value = form.energy(&potential)?;
    Ok(WeightedCapacityResult {
        value,
        potential,
        residual,
        kernel_nodes,
        ball_center: center,
        ball_radius: radius,
    })
}

/// Fatness ratio `psi(a, E, r)`: the capacity of `E` clipped to the
/// closed ball `B_r(a)` over the capacity of the full closed ball, both
/// relative to the ambient ball `B_2r(a)`.
///
/// The anchor must belong to `E` (use closed set descriptions so tip
/// anchors are members). The ratio lies in `[0, 1]` up to solver
/// tolerance, with 1 attained exactly when `E` covers the ball.
pub fn fatness_ratio(
    grid: &Grid,
    s: f64,
    e_set: &Region,
    anchor: Point,
    r: f64,
) -> Result<f64> {
    let form = NonlocalForm::assemble(grid, s)?;
    fatness_ratio_with(&form, e_set, anchor, r)
}

/// [`fatness_ratio`] on a pre-assembled form.
pub fn fatness_ratio_with(
    form: &NonlocalForm,
    e_set: &Region,
    anchor: Point,
    r: f64,
) -> Result<f64> {
    let dim = form.grid().dim();
    if !e_set.contains(dim, anchor) {
        return Err(Error::GeometryViolation("anchor not in the probed set"));
    }
    let clipped = Region::intersect(e_set.clone(), Region::closed_ball(anchor, r));
    let num = besov_capacity_with(form, &clipped, anchor, 2.0 * r)?;
    let den = besov_capacity_with(form, &Region::closed_ball(anchor, r), anchor, 2.0 * r)?;
    if den.kernel_nodes == 0 || !(den.value > 0.0) {
        return Err(Error::GeometryViolation(
            "reference ball unresolved at this spacing",
        ));
    }
    Ok(num.value / den.value)
}

/// Fatness ratios over every (anchor, radius) pair, with a uniform
/// verdict against the threshold.
pub fn fatness_scan(
    grid: &Grid,
    s: f64,
    e_set: &Region,
    anchors: &[Point],
    radii: &[f64],
    threshold: f64,
) -> Result<FatnessReport> {
    if anchors.is_empty() || radii.is_empty() {
        return Err(Error::InvalidGeometry("empty fatness scan"));
    }
    let form = NonlocalForm::assemble(grid, s)?;
    let mut samples = Vec::with_capacity(anchors.len() * radii.len());
    for &a in anchors {
        for &r in radii {
            let psi = fatness_ratio_with(&form, e_set, a, r)?;
            samples.push(FatnessSample {
                anchor: a,
                radius: r,
                psi,
            });
        }
    }
    Ok(FatnessReport { samples, threshold })
}

/// Annulus-intersection perfectness check: for each anchor `x`, tests
/// whether `A(x, c5 * r, r)` meets `e_set` for every radius, sampling
/// membership on a lattice sixteen times finer than the grid spacing.
/// Returns one verdict per anchor.
pub fn perfectness_check(
    grid: &Grid,
    e_set: &Region,
    anchors: &[Point],
    radii: &[f64],
    c5: f64,
) -> Result<Vec<bool>> {
    if !(c5 > 0.0) || !(c5 < 1.0) {
        return Err(Error::InvalidGeometry(
            "annulus ratio must lie in (0, 1)",
        ));
    }
    let dim = grid.dim();
    let step = grid.spacing() / 16.0;
    let mut verdicts = Vec::with_capacity(anchors.len());
    for &a in anchors {
        let mut all = true;
        for &r in radii {
            if !(r > 0.0) {
                return Err(Error::InvalidGeometry("annulus radius must be positive"));
            }
            let cells = libm::ceil(r / step) as i64;
            let mut found = false;
            'scan: for jy in -cells..=cells {
                if dim == 1 && jy != 0 {
                    continue;
                }
                for jx in -cells..=cells {
                    let p = Point::new(
                        a.x + jx as f64 * step,
                        a.y + jy as f64 * step,
                    );
                    let d = p.dist(a);
                    if d >= c5 * r && d <= r && e_set.contains(dim, p) {
                        found = true;
                        break 'scan;
                    }
                }
            }
            if !found {
                all = false;
                break;
            }
        }
        verdicts.push(all);
    }
    Ok(verdicts)
}

/// Default spacing ladder for [`trivial_point_test`]: three refinements,
/// by factor 8 per step in 1D (where solves are cheap) and factor 2 in
/// 2D.
pub fn default_refinement(dim: usize, r: f64) -> [f64; 3] {
    if dim == 1 {
        [r / 8.0, r / 64.0, r / 512.0]
    } else {
        [r / 4.0, r / 8.0, r / 16.0]
    }
}

/// Refinement study of `Cap(B_r(a) \ Omega, B_2r(a))` at a boundary
/// point.
///
/// Each spacing gets its own grid over a box of width `8r` about the
/// anchor. The point is judged trivial (its boundary portion polar)
/// when every refinement at least halves the capacity; sets of positive
/// capacity stabilize instead.
pub fn trivial_point_test(
    domain: &Domain,
    s: f64,
    anchor: Point,
    r: f64,
    spacings: &[f64],
) -> Result<TrivialPointVerdict> {
    if spacings.len() < 2 {
        return Err(Error::InsufficientSamples {
            have: spacings.len(),
            need: 2,
        });
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidGeometry("probe radius must be positive"));
    }
    let dim = domain.dim();
    let kernel = Region::intersect(
        Region::closed_ball(anchor, r),
        Region::complement(domain.region().clone()),
    );
    let probe_dom = Domain::new(dim, Region::ball(anchor, 2.0 * r))?;
    let mut values = Vec::with_capacity(spacings.len());
    for &h in spacings {
        if !(h > 0.0) || h > r {
            return Err(Error::InvalidGeometry(
                "refinement spacing must lie in (0, r]",
            ));
        }
        let grid = Grid::build(&probe_dom, default_box(&probe_dom, h, 2.0), h)?;
        let cap = besov_capacity(&grid, s, &kernel, anchor, 2.0 * r)?;
        values.push(cap.value);
    }
    let is_trivial = values
        .windows(2)
        .all(|w| w[1] <= 0.5 * w[0]);
    Ok(TrivialPointVerdict {
        values,
        is_trivial,
        radius: r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{default_layers, DEFAULT_GRADING};

    fn line_grid(h: f64, half_width: f64) -> Grid {
        let dom = Domain::new(1, Region::ball(Point::one_d(0.0), half_width)).unwrap();
        Grid::build(&dom, default_box(&dom, h, 2.0), h).unwrap()
    }

    /// A region containing exactly one point.
    fn singleton(a: Point) -> Region {
        Region::intersect(
            Region::complement(Region::punctured_ball(a, 1.0, 0.0)),
            Region::ball(a, 0.5),
        )
    }

    #[test]
    fn empty_kernel_reports_zero() {
        let grid = line_grid(1.0 / 16.0, 2.0);
        let ball = Region::ball(Point::one_d(3.0), 0.25);
        let empty = Region::difference(ball.clone(), ball);
        let cap = besov_capacity(&grid, 0.5, &empty, Point::one_d(0.0), 1.0).unwrap();
        assert!(cap.is_empty_kernel());
        assert_eq!(cap.value, 0.0);
        assert_eq!(cap.residual, 0.0);
    }

    #[test]
    fn capacity_scales_like_r_to_the_n_minus_2s() {
        let grid = line_grid(1.0 / 64.0, 2.0);
        let s = 0.25;
        let form = NonlocalForm::assemble(&grid, s).unwrap();
        let radii = [0.25, 0.5, 1.0];
        let mut logs = Vec::new();
        for &r in &radii {
            let k = Region::closed_ball(Point::one_d(0.0), 0.5 * r);
            let cap = besov_capacity_with(&form, &k, Point::one_d(0.0), 2.0 * r).unwrap();
            assert!(cap.value > 0.0);
            logs.push((r.ln(), cap.value.ln()));
        }
        let n = logs.len() as f64;
        let xbar = logs.iter().map(|p| p.0).sum::<f64>() / n;
        let ybar = logs.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = logs.iter().map(|p| (p.0 - xbar) * (p.0 - xbar)).sum();
        let sxy: f64 = logs.iter().map(|p| (p.0 - xbar) * (p.1 - ybar)).sum();
        let slope = sxy / sxx;
        assert!(
            (slope - 0.5).abs() <= 0.05,
            "slope {slope:.4} should be near N - 2s = 0.5"
        );
    }

    #[test]
    fn capacity_monotone_in_kernel_and_antitone_in_ball() {
        let grid = line_grid(1.0 / 32.0, 2.0);
        let form = NonlocalForm::assemble(&grid, 0.5).unwrap();
        let c = Point::one_d(0.0);
        let small = besov_capacity_with(&form, &Region::closed_ball(c, 0.125), c, 1.0)
            .unwrap()
            .value;
        let large = besov_capacity_with(&form, &Region::closed_ball(c, 0.25), c, 1.0)
            .unwrap()
            .value;
        assert!(small <= large + 1e-12);
        let roomy = besov_capacity_with(&form, &Region::closed_ball(c, 0.125), c, 2.0)
            .unwrap()
            .value;
        assert!(roomy <= small + 1e-12);
    }

    #[test]
    fn equilibrium_potential_is_admissible_and_harmonic() {
        let grid = line_grid(1.0 / 32.0, 2.0);
        let c = Point::one_d(0.0);
        let kernel = Region::closed_ball(c, 0.25);
        let cap = besov_capacity(&grid, 0.75, &kernel, c, 1.0).unwrap();
        assert!(cap.residual <= 1e-8, "residual {:e}", cap.residual);
        for id in 0..grid.len() {
            let p = grid.node(id);
            let v = cap.potential.get(id);
            assert!((0.0..=1.0).contains(&v));
            if kernel.contains(1, p) {
                assert_eq!(v, 1.0);
            } else if p.dist(c) >= 1.0 {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn covered_ball_has_unit_fatness() {
        let grid = line_grid(1.0 / 32.0, 2.0);
        let a = Point::one_d(0.0);
        let e = Region::closed_ball(a, 0.25);
        let psi = fatness_ratio(&grid, 0.5, &e, a, 0.25).unwrap();
        assert_eq!(psi, 1.0);
    }

    #[test]
    fn point_obstacle_fatness_vanishes_under_refinement() {
        let a = Point::one_d(0.0);
        let e = singleton(a);
        let coarse = fatness_ratio(&line_grid(1.0 / 32.0, 2.0), 0.25, &e, a, 0.25).unwrap();
        let fine = fatness_ratio(&line_grid(1.0 / 256.0, 2.0), 0.25, &e, a, 0.25).unwrap();
        assert!(fine < 0.5 * coarse, "psi {coarse:.4} -> {fine:.4}");
        assert!(fine <= 0.15, "fine psi {fine:.4}");
    }

    #[test]
    fn halfline_is_uniformly_fat() {
        let grid = line_grid(1.0 / 64.0, 2.0);
        // closed left half-line (-inf, 0]
        let e = Region::complement(Region::halfspace(Point::one_d(1.0), 0.0));
        let a = Point::one_d(0.0);
        let radii = [0.125, 0.25, 0.5];
        let report =
            fatness_scan(&grid, 0.25, &e, &[a], &radii, DEFAULT_FATNESS_THRESHOLD).unwrap();
        assert!(report.min_psi() >= 0.2, "min psi {:.4}", report.min_psi());
        assert!(report.is_fat());

        // the verdict does not depend on scan order
        let rev: Vec<f64> = radii.iter().rev().copied().collect();
        let report2 =
            fatness_scan(&grid, 0.25, &e, &[a], &rev, DEFAULT_FATNESS_THRESHOLD).unwrap();
        assert_eq!(report.min_psi(), report2.min_psi());
        assert_eq!(report.is_fat(), report2.is_fat());
    }

    #[test]
    fn weighted_capacity_comparable_to_besov() {
        let s = 0.5;
        let grid = line_grid(1.0 / 32.0, 2.0);
        let form = NonlocalForm::assemble(&grid, s).unwrap();
        let height = 4.0;
        let layers = default_layers(&grid, height, DEFAULT_GRADING);
        let eg = ExtensionGrid::build(&grid, s, height, layers, DEFAULT_GRADING).unwrap();
        let c = Point::one_d(0.0);
        let mut ratios = Vec::new();
        for &r in &[0.25, 0.5, 1.0] {
            let k = Region::closed_ball(c, 0.5 * r);
            let besov = besov_capacity_with(&form, &k, c, 2.0 * r).unwrap();
            let weighted = weighted_capacity(&eg, &k, c, 2.0 * r).unwrap();
            assert!(weighted.residual <= 1e-7);
            ratios.push(weighted.value / besov.value);
        }
        let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(
            max / min <= 3.0,
            "ratio spread {:.3} from {ratios:?}",
            max / min
        );
    }

    #[test]
    fn weighted_capacity_antitone_in_ball() {
        let s = 0.75;
        let grid = line_grid(1.0 / 32.0, 2.0);
        let eg = ExtensionGrid::build(
            &grid,
            s,
            4.0,
            default_layers(&grid, 4.0, DEFAULT_GRADING),
            DEFAULT_GRADING,
        )
        .unwrap();
        let c = Point::one_d(0.0);
        let k = Region::closed_ball(c, 0.25);
        let tight = weighted_capacity(&eg, &k, c, 1.0).unwrap().value;
        let roomy = weighted_capacity(&eg, &k, c, 2.0).unwrap().value;
        assert!(roomy <= tight + 1e-12);

        let ball = Region::ball(Point::one_d(3.0), 0.25);
        let empty = Region::difference(ball.clone(), ball);
        let zero = weighted_capacity(&eg, &empty, c, 1.0).unwrap();
        assert!(zero.is_empty_kernel());
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn perfectness_of_halfline_singleton_and_cantor_set() {
        let grid = line_grid(1.0 / 64.0, 2.0);
        let halfline = Region::complement(Region::halfspace(Point::one_d(1.0), 0.0));
        let verdict = perfectness_check(
            &grid,
            &halfline,
            &[Point::one_d(0.0)],
            &[0.125, 0.25, 0.5],
            0.5,
        )
        .unwrap();
        assert_eq!(verdict, vec![true]);

        let lone = singleton(Point::one_d(0.0));
        let verdict =
            perfectness_check(&grid, &lone, &[Point::one_d(0.0)], &[0.25], 0.5).unwrap();
        assert_eq!(verdict, vec![false]);

        // complement of the gap region: the level-4 pre-Cantor set plus
        // everything outside the unit interval
        let cantor = Region::complement(Region::cantor_complement(
            Point::one_d(0.0),
            Point::one_d(1.0),
            4,
        ));
        let anchors = [Point::one_d(1.0 / 3.0)];
        let radii = [1.0 / 27.0, 1.0 / 9.0, 1.0 / 3.0];
        let verdict = perfectness_check(&grid, &cantor, &anchors, &radii, 0.25).unwrap();
        assert_eq!(verdict, vec![true]);

        // a gap midpoint is not surrounded by the set at small scales
        let verdict = perfectness_check(
            &grid,
            &cantor,
            &[Point::one_d(0.5)],
            &[1.0 / 9.0],
            0.25,
        )
        .unwrap();
        assert_eq!(verdict, vec![false]);
    }

    #[test]
    fn puncture_is_trivial_but_interval_endpoint_is_not() {
        let punctured =
            Domain::new(1, Region::punctured_ball(Point::one_d(0.0), 1.0, 0.0)).unwrap();
        let r = 0.125;
        let verdict = trivial_point_test(
            &punctured,
            0.25,
            Point::one_d(0.0),
            r,
            &default_refinement(1, r),
        )
        .unwrap();
        assert!(verdict.is_trivial, "values {:?}", verdict.values);

        let interval = Domain::new(1, Region::interval(-1.0, 1.0)).unwrap();
        let verdict = trivial_point_test(
            &interval,
            0.25,
            Point::one_d(1.0),
            r,
            &default_refinement(1, r),
        )
        .unwrap();
        assert!(!verdict.is_trivial, "values {:?}", verdict.values);
    }

    #[test]
    fn planar_slit_point_is_not_trivial() {
        let slit = Domain::new(
            2,
            Region::slit_box(
                Point::new(-1.0, -1.0),
                Point::new(1.0, 1.0),
                Point::new(-0.5, 0.0),
                Point::new(0.5, 0.0),
            ),
        )
        .unwrap();
        let r = 0.25;
        let verdict = trivial_point_test(
            &slit,
            0.75,
            Point::new(0.0, 0.0),
            r,
            &[r / 2.0, r / 4.0, r / 8.0],
        )
        .unwrap();
        assert!(!verdict.is_trivial, "values {:?}", verdict.values);
        assert!(verdict.values.iter().all(|&v| v > 0.0));
    }
}
