//! Domains, grids and the graded extension grid.
//!
//! Domains are small CSG trees over analytic primitives. Membership is an
//! exact predicate; boundedness is decided from conservative bounding
//! boxes, so domains should be built "positively" (primitives combined
//! with unions/intersections/differences) rather than as complements of
//! unbounded sets.
//!
//! Points are always stored with two coordinates; one-dimensional
//! geometry keeps `y = 0` everywhere, and the ambient dimension lives on
//! [`Domain`] and [`Grid`].

use alloc::boxed::Box;
use alloc::vec::Vec;

#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

use crate::error::{Error, Result};

/// A point of the ambient space. In one dimension `y` is identically 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// A 1D point (`y = 0`).
    pub const fn one_d(x: f64) -> Self {
        Point { x, y: 0.0 }
    }

    pub fn dist(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
}

/// Axis-aligned box. For `dim = 1` the `y` components are 0 and ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub lo: Point,
    pub hi: Point,
}

impl Aabb {
    pub fn new(lo: Point, hi: Point) -> Self {
        Aabb { lo, hi }
    }

    pub fn side(&self, axis: usize) -> f64 {
        match axis {
            0 => self.hi.x - self.lo.x,
            _ => self.hi.y - self.lo.y,
        }
    }

    pub fn center(&self) -> Point {
        Point::new(
            0.5 * (self.lo.x + self.hi.x),
            0.5 * (self.lo.y + self.hi.y),
        )
    }

    /// Closed-box membership, comparing only the first `dim` coordinates.
    pub fn contains(&self, dim: usize, p: Point) -> bool {
        let in_x = p.x >= self.lo.x && p.x <= self.hi.x;
        if dim == 1 {
            return in_x;
        }
        in_x && p.y >= self.lo.y && p.y <= self.hi.y
    }

    pub fn contains_box(&self, dim: usize, other: &Aabb) -> bool {
        const SLACK: f64 = 1e-12;
        let in_x = other.lo.x >= self.lo.x - SLACK && other.hi.x <= self.hi.x + SLACK;
        if dim == 1 {
            return in_x;
        }
        in_x && other.lo.y >= self.lo.y - SLACK && other.hi.y <= self.hi.y + SLACK
    }

    fn hull(a: &Aabb, b: &Aabb) -> Aabb {
        Aabb::new(
            Point::new(a.lo.x.min(b.lo.x), a.lo.y.min(b.lo.y)),
            Point::new(a.hi.x.max(b.hi.x), a.hi.y.max(b.hi.y)),
        )
    }

    fn intersection(a: &Aabb, b: &Aabb) -> Aabb {
        Aabb::new(
            Point::new(a.lo.x.max(b.lo.x), a.lo.y.max(b.lo.y)),
            Point::new(a.hi.x.min(b.hi.x), a.hi.y.min(b.hi.y)),
        )
    }

    /// Diagonal length, used as a cheap diameter surrogate.
    pub fn diagonal(&self, dim: usize) -> f64 {
        if dim == 1 {
            self.side(0)
        } else {
            Point::new(self.side(0), self.side(1)).norm()
        }
    }
}

/// Constructive solid geometry over analytic primitives.
///
/// `Region` values describe both open domains and the closed probe sets
/// (Dirichlet data supports, condenser plates) fed to the measure and
/// capacity routines. Membership is pointwise and exact; no tolerance is
/// applied except for the slit, whose nodes are matched to the segment
/// within `1e-12`.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    /// Open ball `{ |p - center| < radius }`.
    Ball { center: Point, radius: f64 },
    /// Closed ball `{ |p - center| <= radius }` (condenser plates).
    ClosedBall { center: Point, radius: f64 },
    /// Open axis-aligned box.
    Box { lo: Point, hi: Point },
    /// Open half-space `{ normal . p > offset }`.
    Halfspace { normal: Point, offset: f64 },
    /// Open ball minus the closed concentric ball of radius `hole`.
    /// `hole = 0` removes exactly the center point.
    PuncturedBall {
        center: Point,
        radius: f64,
        hole: f64,
    },
    /// Open box minus a closed line segment (2D).
    SlitBox {
        lo: Point,
        hi: Point,
        seg_a: Point,
        seg_b: Point,
    },
    /// Open box minus the level-`level` prefix of the middle-thirds Cantor
    /// set, scaled to the box extent (per axis; in 2D the removed set is
    /// the product "dust").
    CantorComplement { lo: Point, hi: Point, level: u32 },
    Union(Box<Region>, Box<Region>),
    Intersect(Box<Region>, Box<Region>),
    Complement(Box<Region>),
}

impl Region {
    pub fn ball(center: Point, radius: f64) -> Region {
        Region::Ball { center, radius }
    }

    pub fn closed_ball(center: Point, radius: f64) -> Region {
        Region::ClosedBall { center, radius }
    }

    pub fn interval(a: f64, b: f64) -> Region {
        Region::Box {
            lo: Point::one_d(a),
            hi: Point::one_d(b),
        }
    }

    pub fn rect(lo: Point, hi: Point) -> Region {
        Region::Box { lo, hi }
    }

    pub fn halfspace(normal: Point, offset: f64) -> Region {
        Region::Halfspace { normal, offset }
    }

    pub fn punctured_ball(center: Point, radius: f64, hole: f64) -> Region {
        Region::PuncturedBall {
            center,
            radius,
            hole,
        }
    }

    pub fn slit_box(lo: Point, hi: Point, seg_a: Point, seg_b: Point) -> Region {
        Region::SlitBox {
            lo,
            hi,
            seg_a,
            seg_b,
        }
    }

    pub fn cantor_complement(lo: Point, hi: Point, level: u32) -> Region {
        Region::CantorComplement { lo, hi, level }
    }

    pub fn union(a: Region, b: Region) -> Region {
        Region::Union(Box::new(a), Box::new(b))
    }

    pub fn intersect(a: Region, b: Region) -> Region {
        Region::Intersect(Box::new(a), Box::new(b))
    }

    pub fn complement(a: Region) -> Region {
        Region::Complement(Box::new(a))
    }

    /// `a \ b`, kept in a form whose boundedness is still decidable.
    pub fn difference(a: Region, b: Region) -> Region {
        Region::intersect(a, Region::complement(b))
    }

    /// Exact membership predicate.
    pub fn contains(&self, dim: usize, p: Point) -> bool {
        match self {
            Region::Ball { center, radius } => p.dist(*center) < *radius,
            Region::ClosedBall { center, radius } => p.dist(*center) <= *radius,
            Region::Box { lo, hi } => {
                let in_x = p.x > lo.x && p.x < hi.x;
                if dim == 1 {
                    in_x
                } else {
                    in_x && p.y > lo.y && p.y < hi.y
                }
            }
            Region::Halfspace { normal, offset } => normal.dot(p) > *offset,
            Region::PuncturedBall {
                center,
                radius,
                hole,
            } => {
                let d = p.dist(*center);
                d < *radius && d > *hole
            }
            Region::SlitBox {
                lo,
                hi,
                seg_a,
                seg_b,
            } => {
                let in_box = p.x > lo.x && p.x < hi.x && p.y > lo.y && p.y < hi.y;
                in_box && dist_to_segment(p, *seg_a, *seg_b) > 1e-12
            }
            Region::CantorComplement { lo, hi, level } => {
                let in_x = p.x > lo.x && p.x < hi.x;
                let in_box = if dim == 1 {
                    in_x
                } else {
                    in_x && p.y > lo.y && p.y < hi.y
                };
                if !in_box {
                    return false;
                }
                let cx = in_cantor((p.x - lo.x) / (hi.x - lo.x), *level);
                if dim == 1 {
                    return !cx;
                }
                let cy = in_cantor((p.y - lo.y) / (hi.y - lo.y), *level);
                !(cx && cy)
            }
            Region::Union(a, b) => a.contains(dim, p) || b.contains(dim, p),
            Region::Intersect(a, b) => a.contains(dim, p) && b.contains(dim, p),
            Region::Complement(a) => !a.contains(dim, p),
        }
    }

    /// Conservative bounding box; `None` means "possibly unbounded".
    pub fn bounds(&self, dim: usize) -> Option<Aabb> {
        match self {
            Region::Ball { center, radius }
            | Region::ClosedBall { center, radius }
            | Region::PuncturedBall { center, radius, .. } => {
                let r = *radius;
                let ry = if dim == 1 { 0.0 } else { r };
                Some(Aabb::new(
                    Point::new(center.x - r, center.y - ry),
                    Point::new(center.x + r, center.y + ry),
                ))
            }
            Region::Box { lo, hi }
            | Region::SlitBox { lo, hi, .. }
            | Region::CantorComplement { lo, hi, .. } => Some(Aabb::new(*lo, *hi)),
            Region::Halfspace { .. } => None,
            Region::Union(a, b) => match (a.bounds(dim), b.bounds(dim)) {
                (Some(ba), Some(bb)) => Some(Aabb::hull(&ba, &bb)),
                _ => None,
            },
            Region::Intersect(a, b) => match (a.bounds(dim), b.bounds(dim)) {
                (Some(ba), Some(bb)) => Some(Aabb::intersection(&ba, &bb)),
                (Some(ba), None) => Some(ba),
                (None, Some(bb)) => Some(bb),
                (None, None) => None,
            },
            Region::Complement(_) => None,
        }
    }

    pub fn is_bounded(&self, dim: usize) -> bool {
        self.bounds(dim).is_some()
    }

    /// Structural parameter validation (positivity, ordering, levels).
    fn validate(&self, dim: usize) -> Result<()> {
        let check_1d = |p: &Point| -> Result<()> {
            if dim == 1 && p.y != 0.0 {
                Err(Error::InvalidGeometry("1d shapes must keep y = 0"))
            } else {
                Ok(())
            }
        };
        match self {
            Region::Ball { center, radius } | Region::ClosedBall { center, radius } => {
                check_1d(center)?;
                if !(*radius > 0.0) {
                    return Err(Error::InvalidGeometry("ball radius must be positive"));
                }
                Ok(())
            }
            Region::PuncturedBall {
                center,
                radius,
                hole,
            } => {
                check_1d(center)?;
                if !(*radius > 0.0) {
                    return Err(Error::InvalidGeometry("ball radius must be positive"));
                }
                if !(*hole >= 0.0) || hole >= radius {
                    return Err(Error::InvalidGeometry("hole radius must lie in [0, radius)"));
                }
                Ok(())
            }
            Region::Box { lo, hi } => {
                check_1d(lo)?;
                check_1d(hi)?;
                if !(lo.x < hi.x) || (dim == 2 && !(lo.y < hi.y)) {
                    return Err(Error::InvalidGeometry("box must satisfy lo < hi"));
                }
                Ok(())
            }
            Region::Halfspace { normal, .. } => {
                check_1d(normal)?;
                if normal.norm() == 0.0 {
                    return Err(Error::InvalidGeometry("half-space normal is zero"));
                }
                Ok(())
            }
            Region::SlitBox {
                lo,
                hi,
                seg_a,
                seg_b,
            } => {
                if dim != 2 {
                    return Err(Error::InvalidGeometry("slit box is two-dimensional"));
                }
                if !(lo.x < hi.x && lo.y < hi.y) {
                    return Err(Error::InvalidGeometry("box must satisfy lo < hi"));
                }
                if seg_a == seg_b {
                    return Err(Error::InvalidGeometry("slit segment is degenerate"));
                }
                let inside = |p: &Point| {
                    p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y
                };
                if !inside(seg_a) || !inside(seg_b) {
                    return Err(Error::InvalidGeometry("slit segment leaves the box"));
                }
                Ok(())
            }
            Region::CantorComplement { lo, hi, level } => {
                check_1d(lo)?;
                check_1d(hi)?;
                if !(lo.x < hi.x) || (dim == 2 && !(lo.y < hi.y)) {
                    return Err(Error::InvalidGeometry("box must satisfy lo < hi"));
                }
                if *level > 6 {
                    return Err(Error::InvalidGeometry("cantor level capped at 6"));
                }
                Ok(())
            }
            Region::Union(a, b) | Region::Intersect(a, b) => {
                a.validate(dim)?;
                b.validate(dim)
            }
            Region::Complement(a) => a.validate(dim),
        }
    }
}

/// Distance from `p` to the closed segment `[a, b]`.
fn dist_to_segment(p: Point, a: Point, b: Point) -> f64 {
    let vx = b.x - a.x;
    let vy = b.y - a.y;
    let wx = p.x - a.x;
    let wy = p.y - a.y;
    let len2 = vx * vx + vy * vy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((wx * vx + wy * vy) / len2).clamp(0.0, 1.0)
    };
    Point::new(a.x + t * vx, a.y + t * vy).dist(p)
}

/// Level-`level` prefix of the middle-thirds Cantor set on `[0, 1]`.
/// Interval endpoints (which survive every level) are members.
fn in_cantor(mut xi: f64, level: u32) -> bool {
    if !(0.0..=1.0).contains(&xi) {
        return false;
    }
    for _ in 0..level {
        if xi * 3.0 < 1.0 {
            xi *= 3.0;
        } else if xi * 3.0 > 2.0 {
            xi = 3.0 * xi - 2.0;
        } else if xi * 3.0 == 1.0 || xi * 3.0 == 2.0 {
            return true;
        } else {
            return false;
        }
    }
    true
}

/// A validated open bounded domain: a [`Region`] plus its ambient
/// dimension, with parameters checked and boundedness established.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    region: Region,
    dim: usize,
    bounds: Aabb,
}

impl Domain {
    /// Validates shape parameters and boundedness.
    pub fn new(dim: usize, region: Region) -> Result<Domain> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGeometry("ambient dimension must be 1 or 2"));
        }
        region.validate(dim)?;
        let bounds = region.bounds(dim).ok_or(Error::UnboundedDomain)?;
        Ok(Domain {
            region,
            dim,
            bounds,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn bounds(&self) -> Aabb {
        self.bounds
    }

    pub fn contains(&self, p: Point) -> bool {
        self.region.contains(self.dim, p)
    }

    /// Bounding-box diagonal; cheap stand-in for the diameter.
    pub fn diameter_hint(&self) -> f64 {
        self.bounds.diagonal(self.dim)
    }

    /// The complement of the domain, as a region usable for probe sets.
    pub fn exterior_region(&self) -> Region {
        Region::complement(self.region.clone())
    }
}

/// Classification of a grid node (or an arbitrary point) relative to the
/// domain and the grid box. Stored nodes are never `FarField`; everything
/// beyond the grid box is represented implicitly by the tail loads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Interior,
    Exterior,
    FarField,
}

/// Cheap identity token for a grid; fields and forms carry one so that
/// mixing objects from different grids is caught at run time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridStamp {
    pub dim: usize,
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub lo: Point,
}

/// Uniform Cartesian grid over a box containing the domain.
///
/// Every lattice node of the box is stored and classified as interior
/// (inside the open domain) or exterior. Node cells are full `h`-cells
/// centered at the nodes, so the cell union overhangs the box by `h/2`;
/// tail integrals start at the edge of that union.
#[derive(Debug, Clone)]
pub struct Grid {
    dim: usize,
    lo: Point,
    hi: Point,
    h: f64,
    nx: usize,
    ny: usize,
    class: Vec<NodeClass>,
    interior: Vec<usize>,
    exterior: Vec<usize>,
}

impl Grid {
    /// Builds and classifies the grid. The box must contain the domain's
    /// bounding box and `h` must divide both side lengths.
    pub fn build(domain: &Domain, bbox: Aabb, h: f64) -> Result<Grid> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidGeometry("grid spacing must be positive"));
        }
        if !bbox.contains_box(domain.dim, &domain.bounds) {
            return Err(Error::DomainNotContained);
        }
        let steps = |side: f64| -> Result<usize> {
            let k = (side / h).round();
            if k < 1.0 || (k * h - side).abs() > 1e-9 * side.max(1.0) {
                return Err(Error::SpacingMismatch { side, h });
            }
            Ok(k as usize)
        };
        let nx = steps(bbox.side(0))? + 1;
        let ny = if domain.dim == 1 {
            if bbox.lo.y != 0.0 || bbox.hi.y != 0.0 {
                return Err(Error::InvalidGeometry("1d grid box must keep y = 0"));
            }
            1
        } else {
            steps(bbox.side(1))? + 1
        };
        let mut class = Vec::with_capacity(nx * ny);
        let mut interior = Vec::new();
        let mut exterior = Vec::new();
        for iy in 0..ny {
            for ix in 0..nx {
                let p = Point::new(bbox.lo.x + ix as f64 * h, bbox.lo.y + iy as f64 * h);
                let c = if domain.contains(p) {
                    NodeClass::Interior
                } else {
                    NodeClass::Exterior
                };
                class.push(c);
                let id = iy * nx + ix;
                match c {
                    NodeClass::Interior => interior.push(id),
                    NodeClass::Exterior => exterior.push(id),
                    NodeClass::FarField => unreachable!(),
                }
            }
        }
        Ok(Grid {
            dim: domain.dim,
            lo: bbox.lo,
            hi: bbox.hi,
            h,
            nx,
            ny,
            class,
            interior,
            exterior,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn bbox(&self) -> Aabb {
        Aabb::new(self.lo, self.hi)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn counts(&self) -> (usize, usize) {
        (self.interior.len(), self.exterior.len())
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn node(&self, id: usize) -> Point {
        let ix = id % self.nx;
        let iy = id / self.nx;
        Point::new(
            self.lo.x + ix as f64 * self.h,
            self.lo.y + iy as f64 * self.h,
        )
    }

    pub fn class(&self, id: usize) -> NodeClass {
        self.class[id]
    }

    pub fn interior_ids(&self) -> &[usize] {
        &self.interior
    }

    pub fn exterior_ids(&self) -> &[usize] {
        &self.exterior
    }

    pub fn is_interior(&self, id: usize) -> bool {
        self.class[id] == NodeClass::Interior
    }

    pub fn stamp(&self) -> GridStamp {
        GridStamp {
            dim: self.dim,
            nx: self.nx,
            ny: self.ny,
            h: self.h,
            lo: self.lo,
        }
    }

    /// Classifies an arbitrary point: inside the closed grid box it takes
    /// the domain-membership class, beyond it it is far field.
    pub fn classify(&self, domain: &Domain, p: Point) -> NodeClass {
        if !self.bbox().contains(self.dim, p) {
            return NodeClass::FarField;
        }
        if domain.contains(p) {
            NodeClass::Interior
        } else {
            NodeClass::Exterior
        }
    }

    /// Nearest exterior node that touches the interior along a grid axis.
    ///
    /// Anchors for boundary probes are snapped through this; the request
    /// must land within `4h` of such a node.
    pub fn snap_anchor(&self, a: Point) -> Result<(usize, Point)> {
        let mut best: Option<(usize, f64)> = None;
        for &id in &self.exterior {
            if !self.touches_interior(id) {
                continue;
            }
            let d = self.node(id).dist(a);
            let better = match best {
                None => true,
                Some((_, bd)) => d < bd,
            };
            if better {
                best = Some((id, d));
            }
        }
        match best {
            Some((id, d)) if d <= 4.0 * self.h => Ok((id, self.node(id))),
            _ => Err(Error::AnchorNotOnBoundary),
        }
    }

    fn touches_interior(&self, id: usize) -> bool {
        let ix = id % self.nx;
        let iy = id / self.nx;
        let probe = |jx: isize, jy: isize| -> bool {
            if jx < 0 || jy < 0 || jx as usize >= self.nx || jy as usize >= self.ny {
                return false;
            }
            self.class[jy as usize * self.nx + jx as usize] == NodeClass::Interior
        };
        let (ix, iy) = (ix as isize, iy as isize);
        probe(ix - 1, iy) || probe(ix + 1, iy) || probe(ix, iy - 1) || probe(ix, iy + 1)
    }
}

/// A grid box for `domain`: the bounding box dilated by `factor` about its
/// center, with sides rounded up to even multiples of `h` so the center
/// itself is a lattice node.
pub fn default_box(domain: &Domain, h: f64, factor: f64) -> Aabb {
    let b = domain.bounds();
    let c = b.center();
    let snap_half = |half: f64| -> f64 {
        let steps = (half / h).ceil();
        steps * h
    };
    let hx = snap_half(0.5 * b.side(0) * factor);
    if domain.dim() == 1 {
        Aabb::new(Point::one_d(c.x - hx), Point::one_d(c.x + hx))
    } else {
        let hy = snap_half(0.5 * b.side(1) * factor);
        Aabb::new(
            Point::new(c.x - hx, c.y - hy),
            Point::new(c.x + hx, c.y + hy),
        )
    }
}

/// Like [`default_box`], but shifted half a cell so that node cells are
/// centered between lattice lines: multiples of `h` measured from the
/// domain's bounding-box center fall on cell faces instead of nodes.
///
/// When a region boundary or a data discontinuity lies on that lattice
/// (interval endpoints, box edges, indicator-data edges), this alignment
/// makes the piecewise-constant cell representation exact, which removes
/// the leading geometric error of near-boundary values. Prefer it for
/// axis-aligned geometry; features that must coincide with nodes (a slit
/// along a lattice line) need [`default_box`] instead.
pub fn staggered_box(domain: &Domain, h: f64, factor: f64) -> Aabb {
    let b = domain.bounds();
    let c = b.center();
    // smallest half-width of the form (k + 1/2) h covering the dilation
    let snap_half = |half: f64| -> f64 {
        let steps = (half / h - 0.5).ceil().max(0.0);
        (steps + 0.5) * h
    };
    let hx = snap_half(0.5 * b.side(0) * factor);
    if domain.dim() == 1 {
        Aabb::new(Point::one_d(c.x - hx), Point::one_d(c.x + hx))
    } else {
        let hy = snap_half(0.5 * b.side(1) * factor);
        Aabb::new(
            Point::new(c.x - hx, c.y - hy),
            Point::new(c.x + hx, c.y + hy),
        )
    }
}

/// Tensor grid for the degenerate-weight extension problem: the base grid
/// times a graded stack of heights `0 = t_0 < t_1 < ... < t_M = T`, with
/// layer widths growing geometrically away from the trace plane.
///
/// `weight_exponent` is the exponent of the `|t|^theta` weight attached to
/// the fractional order of the base problem. Per-layer cell averages of
/// the weight are precomputed (the trace layer uses the half-cell
/// `[0, t_1/2]`, whose average is finite because `theta > -1`).
#[derive(Debug, Clone)]
pub struct ExtensionGrid {
    base: Grid,
    s: f64,
    theta: f64,
    grading: f64,
    heights: Vec<f64>,
    layer_weights: Vec<f64>,
}

impl ExtensionGrid {
    /// `height` is the truncation height T, `layers` the number M of
    /// intervals in the stack, `grading >= 1` the width ratio between
    /// consecutive intervals.
    pub fn build(base: &Grid, s: f64, height: f64, layers: usize, grading: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::SOutOfRange(s));
        }
        if !(height > 0.0) || !height.is_finite() {
            return Err(Error::InvalidGeometry("extension height must be positive"));
        }
        if layers < 1 {
            return Err(Error::TooFewLayers(layers));
        }
        if !(grading >= 1.0) || !grading.is_finite() {
            return Err(Error::BadGrading(grading));
        }
        let theta = 1.0 - 2.0 * s;
        let m = layers;
        let first = if grading == 1.0 {
            height / m as f64
        } else {
            height * (grading - 1.0) / (grading.powi(m as i32) - 1.0)
        };
        let mut heights = Vec::with_capacity(m + 1);
        heights.push(0.0);
        let mut t = 0.0;
        let mut w = first;
        for k in 0..m {
            t += w;
            heights.push(if k + 1 == m { height } else { t });
            w *= grading;
        }
        let mut grid = ExtensionGrid {
            base: base.clone(),
            s,
            theta,
            grading,
            heights,
            layer_weights: Vec::new(),
        };
        grid.layer_weights = (0..=m).map(|k| grid.layer_cell_average(k)).collect();
        Ok(grid)
    }

    pub fn base(&self) -> &Grid {
        &self.base
    }

    pub fn fractional_order(&self) -> f64 {
        self.s
    }

    pub fn weight_exponent(&self) -> f64 {
        self.theta
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn layers(&self) -> usize {
        self.heights.len() - 1
    }

    pub fn height(&self) -> f64 {
        *self.heights.last().unwrap()
    }

    /// Width of interval `k`, i.e. `t_{k+1} - t_k`.
    pub fn width(&self, k: usize) -> f64 {
        self.heights[k + 1] - self.heights[k]
    }

    /// Cell-averaged weight on the node cell of layer `k`.
    pub fn layer_weight(&self, k: usize) -> f64 {
        self.layer_weights[k]
    }

    /// `\int_a^b t^theta dt` for `0 <= a < b`.
    pub fn weight_mass(&self, a: f64, b: f64) -> f64 {
        let e = 1.0 + self.theta;
        (b.powf(e) - a.powf(e)) / e
    }

    fn layer_cell_average(&self, k: usize) -> f64 {
        let (a, b) = self.layer_cell(k);
        self.weight_mass(a, b) / (b - a)
    }

    /// Node cell of layer `k` along the extension axis.
    pub fn layer_cell(&self, k: usize) -> (f64, f64) {
        let m = self.layers();
        if k == 0 {
            (0.0, 0.5 * self.heights[1])
        } else if k == m {
            (
                0.5 * (self.heights[m - 1] + self.heights[m]),
                self.heights[m],
            )
        } else {
            (
                0.5 * (self.heights[k - 1] + self.heights[k]),
                0.5 * (self.heights[k] + self.heights[k + 1]),
            )
        }
    }

    /// Total node count of the tensor grid.
    pub fn len(&self) -> usize {
        self.base.len() * (self.layers() + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval_domain() -> Domain {
        Domain::new(1, Region::ball(Point::one_d(0.0), 1.0)).unwrap()
    }

    #[test]
    fn interval_grid_counts() {
        // (-1,1) in a box [-4,4] at h = 1/64: 513 stored nodes, 127 interior
        // (nodes at +-1 are exterior because the ball is open).
        let dom = interval_domain();
        let bbox = Aabb::new(Point::one_d(-4.0), Point::one_d(4.0));
        let g = Grid::build(&dom, bbox, 1.0 / 64.0).unwrap();
        assert_eq!(g.len(), 513);
        let (ni, ne) = g.counts();
        assert_eq!(ni, 127);
        assert_eq!(ni + ne, g.len());
    }

    #[test]
    fn punctured_ball_membership() {
        // ball minus the single center point
        let r = Region::punctured_ball(Point::one_d(0.0), 1.0, 0.0);
        assert!(!r.contains(1, Point::one_d(0.0)));
        assert!(r.contains(1, Point::one_d(0.5)));
        assert!(!r.contains(1, Point::one_d(1.0)));
        // positive hole removes the closed small ball
        let r = Region::punctured_ball(Point::one_d(0.0), 1.0, 0.25);
        assert!(!r.contains(1, Point::one_d(0.25)));
        assert!(r.contains(1, Point::one_d(0.26)));
    }

    #[test]
    fn ball_classification_matches_signed_distance() {
        // For balls the membership predicate is exactly the sign of the
        // analytic signed distance; check every node with |sdf| > h/2.
        let dom = Domain::new(2, Region::ball(Point::new(0.0, 0.0), 1.0)).unwrap();
        let bbox = Aabb::new(Point::new(-2.0, -2.0), Point::new(2.0, 2.0));
        let h = 1.0 / 16.0;
        let g = Grid::build(&dom, bbox, h).unwrap();
        for id in 0..g.len() {
            let p = g.node(id);
            let sdf = p.norm() - 1.0;
            if sdf.abs() <= 0.5 * h {
                continue;
            }
            let expect = if sdf < 0.0 {
                NodeClass::Interior
            } else {
                NodeClass::Exterior
            };
            assert_eq!(g.class(id), expect, "node {p:?}");
        }
    }

    #[test]
    fn grid_rejects_mismatched_spacing_and_small_box() {
        let dom = interval_domain();
        let bbox = Aabb::new(Point::one_d(-4.0), Point::one_d(4.0));
        match Grid::build(&dom, bbox, 0.3) {
            Err(Error::SpacingMismatch { .. }) => {}
            other => panic!("expected SpacingMismatch, got {other:?}"),
        }
        let small = Aabb::new(Point::one_d(-0.5), Point::one_d(0.5));
        match Grid::build(&dom, small, 0.25) {
            Err(Error::DomainNotContained) => {}
            other => panic!("expected DomainNotContained, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_domain_rejected() {
        match Domain::new(1, Region::halfspace(Point::one_d(1.0), 0.0)) {
            Err(Error::UnboundedDomain) => {}
            other => panic!("expected UnboundedDomain, got {other:?}"),
        }
        // ... but a half-space cut down by a box is fine.
        let slab = Region::intersect(
            Region::halfspace(Point::one_d(1.0), 0.0),
            Region::interval(-1.0, 1.0),
        );
        assert!(Domain::new(1, slab).is_ok());
    }

    #[test]
    fn difference_domains_stay_bounded() {
        let d = Region::difference(
            Region::interval(0.0, 1.0),
            Region::closed_ball(Point::one_d(0.5), 0.1),
        );
        let dom = Domain::new(1, d).unwrap();
        assert!(dom.contains(Point::one_d(0.2)));
        assert!(!dom.contains(Point::one_d(0.55)));
    }

    #[test]
    fn extension_grid_uniform_layers() {
        // gamma = 1, M = 4, T = 1 gives heights {0, 1/4, 1/2, 3/4, 1}.
        let dom = interval_domain();
        let bbox = Aabb::new(Point::one_d(-4.0), Point::one_d(4.0));
        let g = Grid::build(&dom, bbox, 0.25).unwrap();
        let e = ExtensionGrid::build(&g, 0.5, 1.0, 4, 1.0).unwrap();
        let expect = [0.0, 0.25, 0.5, 0.75, 1.0];
        for (a, b) in e.heights().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        // theta = 0: all layer weights are exactly 1.
        for k in 0..=4 {
            assert!((e.layer_weight(k) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn extension_grid_graded_widths_increase() {
        let dom = interval_domain();
        let bbox = Aabb::new(Point::one_d(-4.0), Point::one_d(4.0));
        let g = Grid::build(&dom, bbox, 0.25).unwrap();
        let e = ExtensionGrid::build(&g, 0.25, 2.0, 8, 1.15).unwrap();
        assert!((e.height() - 2.0).abs() < 1e-12);
        for k in 0..e.layers() - 1 {
            let ratio = e.width(k + 1) / e.width(k);
            assert!((ratio - 1.15).abs() < 1e-9, "width ratio {ratio}");
        }
        // widths sum to T; with even reflection the stack covers 2T.
        let total: f64 = (0..e.layers()).map(|k| e.width(k)).sum();
        assert!((total - e.height()).abs() < 1e-12);
    }

    #[test]
    fn extension_grid_trace_layer_weight() {
        // s = 3/4 (theta = -1/2): the trace half-cell [0, t1/2] has average
        // weight (1/a) * int_0^a t^{-1/2} dt = 2 / sqrt(a) at a = t1/2.
        let dom = interval_domain();
        let bbox = Aabb::new(Point::one_d(-4.0), Point::one_d(4.0));
        let g = Grid::build(&dom, bbox, 0.25).unwrap();
        let e = ExtensionGrid::build(&g, 0.75, 1.0, 4, 1.0).unwrap();
        let a = 0.5 * e.heights()[1];
        assert!((e.layer_weight(0) - 2.0 / a.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn extension_grid_parameter_errors() {
        let dom = interval_domain();
        let bbox = Aabb::new(Point::one_d(-4.0), Point::one_d(4.0));
        let g = Grid::build(&dom, bbox, 0.25).unwrap();
        match ExtensionGrid::build(&g, 0.5, 1.0, 0, 1.0) {
            Err(Error::TooFewLayers(0)) => {}
            other => panic!("expected TooFewLayers, got {other:?}"),
        }
        match ExtensionGrid::build(&g, 0.5, 1.0, 6, 0.9) {
            Err(Error::BadGrading(_)) => {}
            other => panic!("expected BadGrading, got {other:?}"),
        }
        match ExtensionGrid::build(&g, 1.5, 1.0, 6, 1.1) {
            Err(Error::SOutOfRange(_)) => {}
            other => panic!("expected SOutOfRange, got {other:?}"),
        }
    }

    #[test]
    fn cantor_complement_membership() {
        // level 1 removes the closed outer thirds from the complement:
        // the open middle third (1/3, 2/3) is the domain.
        let r = Region::cantor_complement(Point::one_d(0.0), Point::one_d(1.0), 1);
        assert!(r.contains(1, Point::one_d(0.5)));
        assert!(!r.contains(1, Point::one_d(0.2)));
        assert!(!r.contains(1, Point::one_d(1.0 / 3.0)));
        // level 2: (1/9, 2/9) is a gap, (0, 1/9) is not.
        let r = Region::cantor_complement(Point::one_d(0.0), Point::one_d(1.0), 2);
        assert!(r.contains(1, Point::one_d(0.15)));
        assert!(!r.contains(1, Point::one_d(0.05)));
        match Domain::new(
            1,
            Region::cantor_complement(Point::one_d(0.0), Point::one_d(1.0), 7),
        ) {
            Err(Error::InvalidGeometry(_)) => {}
            other => panic!("expected level cap, got {other:?}"),
        }
    }

    #[test]
    fn slit_box_excludes_segment_nodes() {
        let r = Region::slit_box(
            Point::new(-1.0, -1.0),
            Point::new(1.0, 1.0),
            Point::new(-0.5, 0.0),
            Point::new(0.5, 0.0),
        );
        assert!(!r.contains(2, Point::new(0.0, 0.0)));
        assert!(!r.contains(2, Point::new(0.5, 0.0)));
        assert!(r.contains(2, Point::new(0.6, 0.0)));
        assert!(r.contains(2, Point::new(0.0, 0.25)));
    }

    #[test]
    fn anchor_snaps_to_boundary_adjacent_exterior_node() {
        let dom = interval_domain();
        let bbox = Aabb::new(Point::one_d(-4.0), Point::one_d(4.0));
        let g = Grid::build(&dom, bbox, 1.0 / 64.0).unwrap();
        let (_, p) = g.snap_anchor(Point::one_d(1.0)).unwrap();
        assert!((p.x - 1.0).abs() < 1e-12);
        // nothing boundary-like near the box corner
        match g.snap_anchor(Point::one_d(3.5)) {
            Err(Error::AnchorNotOnBoundary) => {}
            other => panic!("expected AnchorNotOnBoundary, got {other:?}"),
        }
    }

    #[test]
    fn default_box_keeps_center_on_lattice() {
        let dom = interval_domain();
        let b = default_box(&dom, 1.0 / 64.0, 4.0);
        assert!((b.lo.x + 4.0).abs() < 1e-12);
        assert!((b.hi.x - 4.0).abs() < 1e-12);
        let disk = Domain::new(2, Region::ball(Point::new(0.25, 0.0), 1.0)).unwrap();
        let b = default_box(&disk, 1.0 / 16.0, 4.0);
        // sides are even multiples of h and the center is preserved
        let steps_x = b.side(0) / (1.0 / 16.0);
        assert!((steps_x - steps_x.round()).abs() < 1e-9);
        assert!((b.center().x - 0.25).abs() < 1e-12);
    }

    #[test]
    fn staggered_box_puts_lattice_on_cell_faces() {
        let h = 1.0 / 64.0;
        let dom = interval_domain();
        let b = staggered_box(&dom, h, 4.0);
        let g = Grid::build(&dom, b, h).unwrap();
        // the domain endpoint +1 sits exactly between two nodes
        let off = (1.0 - b.lo.x) / h;
        assert!((off - off.floor() - 0.5).abs() < 1e-9, "offset {off}");
        // nodes straddling the endpoint classify interior/exterior
        let below = ((1.0 - 0.5 * h) - b.lo.x) / h;
        let id = below.round() as usize;
        assert!(g.is_interior(id));
        assert!(!g.is_interior(id + 1));
        assert!((b.center().x).abs() < 1e-12);
    }
}
