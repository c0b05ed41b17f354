//! Built-in benchmark domains.
//!
//! Each entry pairs a region with the boundary anchors that make it
//! interesting: the puncture of a punctured ball, the inner endpoints
//! of a slit, a Cantor endpoint. Configs refer to entries by name.

use fraclap_core::{Domain, Point, Region};

/// One catalog row; `region()` and `default_anchors()` build fresh
/// values so entries can be `'static`.
#[derive(Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub dim: usize,
    /// Human-readable parameters, shown by `list-domains`.
    pub summary: &'static str,
    build: fn() -> Region,
    anchors: fn() -> Vec<Point>,
}

impl CatalogEntry {
    pub fn region(&self) -> Region {
        (self.build)()
    }

    pub fn domain(&self) -> Domain {
        Domain::new(self.dim, self.region()).expect("catalog entries are valid domains")
    }

    pub fn default_anchors(&self) -> Vec<Point> {
        (self.anchors)()
    }

    /// Center and radius of the exact kernel representation, for the
    /// entries that are round balls.
    pub fn oracle_ball(&self) -> Option<(Point, f64)> {
        match self.name {
            "interval" => Some((Point::one_d(0.0), 1.0)),
            "disk" => Some((Point::new(0.0, 0.0), 1.0)),
            _ => None,
        }
    }
}

static CATALOG: [CatalogEntry; 8] = [
    CatalogEntry {
        name: "interval",
        dim: 1,
        summary: "open interval (-1, 1)",
        build: || Region::interval(-1.0, 1.0),
        anchors: || vec![Point::one_d(-1.0), Point::one_d(1.0)],
    },
    CatalogEntry {
        name: "punctured-interval",
        dim: 1,
        summary: "(-1, 1) with the origin removed",
        build: || Region::punctured_ball(Point::one_d(0.0), 1.0, 0.0),
        anchors: || vec![Point::one_d(0.0)],
    },
    CatalogEntry {
        name: "cantor-interval",
        dim: 1,
        summary: "union of the middle-third gaps removed from (0, 1) through level 4",
        build: || Region::cantor_complement(Point::one_d(0.0), Point::one_d(1.0), 4),
        anchors: || vec![Point::one_d(1.0 / 3.0)],
    },
    CatalogEntry {
        name: "disk",
        dim: 2,
        summary: "open unit disk",
        build: || Region::ball(Point::new(0.0, 0.0), 1.0),
        anchors: || {
            vec![
                Point::new(1.0, 0.0),
                Point::new(0.0, 1.0),
                Point::new(-1.0, 0.0),
            ]
        },
    },
    CatalogEntry {
        name: "punctured-disk",
        dim: 2,
        summary: "unit disk with the origin removed",
        build: || Region::punctured_ball(Point::new(0.0, 0.0), 1.0, 0.0),
        anchors: || vec![Point::new(0.0, 0.0)],
    },
    CatalogEntry {
        name: "square",
        dim: 2,
        summary: "open square (-1, 1) x (-1, 1)",
        build: || Region::rect(Point::new(-1.0, -1.0), Point::new(1.0, 1.0)),
        anchors: || vec![Point::new(1.0, 0.0), Point::new(1.0, 1.0)],
    },
    CatalogEntry {
        name: "slit-square",
        dim: 2,
        summary: "(-1, 1) x (-1, 1) minus the segment [-1/2, 1/2] x {0}",
        build: || {
            Region::slit_box(
                Point::new(-1.0, -1.0),
                Point::new(1.0, 1.0),
                Point::new(-0.5, 0.0),
                Point::new(0.5, 0.0),
            )
        },
        anchors: || {
            vec![
                Point::new(0.0, 0.0),
                Point::new(-0.25, 0.0),
                Point::new(0.25, 0.0),
            ]
        },
    },
    CatalogEntry {
        name: "slab",
        dim: 2,
        summary: "open rectangle (-2, 2) x (0, 1)",
        build: || Region::rect(Point::new(-2.0, 0.0), Point::new(2.0, 1.0)),
        anchors: || vec![Point::new(0.0, 0.0)],
    },
];

pub fn catalog() -> &'static [CatalogEntry] {
    &CATALOG
}

pub fn find_domain(name: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.name == name)
}
