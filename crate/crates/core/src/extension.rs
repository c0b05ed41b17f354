//! Degenerate-weight extension problem in one extra dimension.
//!
//! A function harmonic for the fractional Laplacian of order `s` on the
//! base grid is the trace at `t = 0` of a solution of the local equation
//! `div(|t|^theta grad u*) = 0`, `theta = 1 - 2s`, in the half space
//! above the base. This module discretizes that local problem by finite
//! volumes on an [`ExtensionGrid`] (tensor product of the base grid and a
//! graded stack of layers), solves it with Dirichlet data on the trace
//! plane's exterior nodes, and compares the trace of the solution with
//! the direct nonlocal solve.
//!
//! The even reflection across `t = 0` is absorbed as a factor 2 in every
//! conductance, so energies are comparable with full-space quantities.
//! The artificial side walls carry the natural (no-flux) condition; the
//! top wall is held at the far-field value, which makes the solved energy
//! decrease monotonically as the truncation height grows (the minimizer
//! of the taller cylinder extends the shorter one by a constant).

use alloc::vec;
use alloc::vec::Vec;

#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{ExtensionGrid, Grid, GridStamp};
use crate::linalg::solve_cg;
use crate::nonlocal::{Field, NonlocalForm};

/// Relative residual target for the extension solves.
pub const CG_TOL: f64 = 1e-10;

/// Values on every node of an extension grid, level-major: node `(i, k)`
/// of base index `i` and layer level `k` is stored at `k * base_len + i`.
#[derive(Debug, Clone)]
pub struct ExtensionField {
    values: Vec<f64>,
    base_stamp: GridStamp,
    levels: usize,
}

impl ExtensionField {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of stored levels (layers + 1).
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// The slice of values on level `k`.
    pub fn level(&self, k: usize) -> &[f64] {
        let nb = self.values.len() / self.levels;
        &self.values[k * nb..(k + 1) * nb]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Finite-volume stiffness for `div(|t|^theta grad u*)` on an extension
/// grid. The tensor structure keeps the operator matrix-free: one
/// horizontal conductance per level and one vertical conductance per
/// layer gap describe every entry.
#[derive(Debug, Clone)]
pub struct WeightedForm {
    eg: ExtensionGrid,
    /// Horizontal (in-base) conductance per level `k = 0..=M`:
    /// `2 h^{N-2} * int_{cell_k} t^theta dt`.
    cx: Vec<f64>,
    /// Vertical conductance per gap `k = 0..M`:
    /// `2 h^N * int_{t_k}^{t_{k+1}} t^theta dt / (t_{k+1} - t_k)^2`.
    ct: Vec<f64>,
    /// Sum of incident conductances per node (operator diagonal).
    diag: Vec<f64>,
}

impl WeightedForm {
    pub fn assemble(eg: &ExtensionGrid) -> WeightedForm {
        let base = eg.base();
        let h = base.spacing();
        let dim = base.dim();
        let m = eg.layers();
        let hpow_x = h.powi(dim as i32 - 2);
        let hpow_t = h.powi(dim as i32);

        let mut cx = Vec::with_capacity(m + 1);
        for k in 0..=m {
            let (a, b) = eg.layer_cell(k);
            cx.push(2.0 * hpow_x * eg.weight_mass(a, b));
        }
        let mut ct = Vec::with_capacity(m);
        for k in 0..m {
            let t = eg.heights();
            let gap = eg.width(k);
            ct.push(2.0 * hpow_t * eg.weight_mass(t[k], t[k + 1]) / (gap * gap));
        }

        let nb = base.len();
        let (nx, ny) = (base.nx(), base.ny());
        let mut diag = vec![0.0; nb * (m + 1)];
        for k in 0..=m {
            for i in 0..nb {
                let (ix, iy) = (i % nx, i / nx);
                let mut d = 0.0;
                let mut horiz = 0.0;
                if ix > 0 {
                    horiz += 1.0;
                }
                if ix + 1 < nx {
                    horiz += 1.0;
                }
                if iy > 0 {
                    horiz += 1.0;
                }
                if iy + 1 < ny {
                    horiz += 1.0;
                }
                d += horiz * cx[k];
                if k > 0 {
                    d += ct[k - 1];
                }
                if k < m {
                    d += ct[k];
                }
                diag[k * nb + i] = d;
            }
        }

        WeightedForm {
            eg: eg.clone(),
            cx,
            ct,
            diag,
        }
    }

    pub fn grid(&self) -> &ExtensionGrid {
        &self.eg
    }

    /// In-base conductance on level `k` (reflection factor included).
    pub fn horizontal_conductance(&self, k: usize) -> f64 {
        self.cx[k]
    }

    /// Conductance between levels `k` and `k + 1`.
    pub fn vertical_conductance(&self, k: usize) -> f64 {
        self.ct[k]
    }

    /// Weighted Dirichlet energy of an extension field.
    pub fn energy(&self, u: &ExtensionField) -> Result<f64> {
        if u.base_stamp != self.eg.base().stamp() || u.len() != self.eg.len() {
            return Err(Error::GridMismatch);
        }
        Ok(self.energy_of(&u.values))
    }

    fn energy_of(&self, v: &[f64]) -> f64 {
        let base = self.eg.base();
        let nb = base.len();
        let (nx, ny) = (base.nx(), base.ny());
        let m = self.eg.layers();
        let mut acc = 0.0;
        for k in 0..=m {
            let lvl = &v[k * nb..(k + 1) * nb];
            let c = self.cx[k];
            for iy in 0..ny {
                let row = &lvl[iy * nx..(iy + 1) * nx];
                for ix in 0..nx - 1 {
                    let d = row[ix + 1] - row[ix];
                    acc += c * d * d;
                }
            }
            for iy in 0..ny.saturating_sub(1) {
                for ix in 0..nx {
                    let d = lvl[(iy + 1) * nx + ix] - lvl[iy * nx + ix];
                    acc += c * d * d;
                }
            }
        }
        for k in 0..m {
            let c = self.ct[k];
            for i in 0..nb {
                let d = v[(k + 1) * nb + i] - v[k * nb + i];
                acc += c * d * d;
            }
        }
        acc
    }

    /// Solves the extension problem: Dirichlet rows are the trace-plane
    /// exterior nodes (values from `g`) and the top wall (held at
    /// `g_inf`); every other node, including trace-plane interior nodes,
    /// is an unknown. Side walls are natural.
    pub fn solve(&self, g: &Field, g_inf: f64) -> Result<ExtensionField> {
        let base = self.eg.base();
        if g.stamp() != base.stamp() {
            return Err(Error::GridMismatch);
        }
        if !g_inf.is_finite() {
            return Err(Error::MissingExteriorData { node: self.eg.len() });
        }
        let nb = base.len();
        let m = self.eg.layers();

        let mut fixed: Vec<Option<f64>> = vec![None; self.eg.len()];
        for &i in base.exterior_ids() {
            fixed[i] = Some(g.get(i));
        }
        for i in 0..nb {
            fixed[m * nb + i] = Some(g_inf);
        }
        self.solve_constrained(&fixed)
    }

    /// Solves the general constrained minimization of the weighted
    /// energy: entries `Some(v)` are held at `v`, entries `None` are
    /// unknowns (indexed level-major like [`ExtensionField`]). Used by
    /// the weighted-capacity routines, where the constraint set is a
    /// condenser rather than the trace plane.
    pub fn solve_constrained(&self, fixed: &[Option<f64>]) -> Result<ExtensionField> {
        let base = self.eg.base();
        let n = self.eg.len();
        let m = self.eg.layers();
        if fixed.len() != n {
            return Err(Error::GridMismatch);
        }

        let mut vfix = vec![0.0; n];
        let mut free = vec![true; n];
        let mut any_free = false;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            match fixed[i] {
                Some(v) if v.is_finite() => {
                    vfix[i] = v;
                    free[i] = false;
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                Some(_) => return Err(Error::MissingExteriorData { node: i }),
                None => any_free = true,
            }
        }
        if !any_free {
            return Ok(ExtensionField {
                values: vfix,
                base_stamp: base.stamp(),
                levels: m + 1,
            });
        }
        if lo > hi {
            // fully unconstrained: the minimizer is the zero field
            (lo, hi) = (0.0, 0.0);
        }

        let mut rhs = vec![0.0; n];
        self.apply_off_diagonal(&vfix, &mut rhs);
        for i in 0..n {
            rhs[i] = if free[i] { -rhs[i] } else { 0.0 };
        }

        let apply = |x: &[f64], y: &mut [f64]| {
            self.apply_off_diagonal(x, y);
            for i in 0..x.len() {
                y[i] += self.diag[i] * x[i];
            }
        };
        let cap = libm::ceil(50.0 * (n as f64).sqrt()) as usize;
        let out = solve_cg(apply, &self.diag, &rhs, &free, CG_TOL, cap)?;

        let mut values = vfix;
        for i in 0..n {
            if free[i] {
                values[i] = out[i].clamp(lo, hi);
            }
        }
        Ok(ExtensionField {
            values,
            base_stamp: base.stamp(),
            levels: m + 1,
        })
    }

    /// Largest normalized equation residual of `u` over the listed
    /// (level-major) nodes: `|(A u)_i| / diag_i`, zero where `u` solves
    /// the weighted equation. Certifies equilibrium potentials.
    pub fn residual_at(&self, u: &ExtensionField, nodes: &[usize]) -> Result<f64> {
        if u.base_stamp != self.eg.base().stamp() || u.len() != self.eg.len() {
            return Err(Error::GridMismatch);
        }
        let mut y = vec![0.0; u.len()];
        self.apply_off_diagonal(&u.values, &mut y);
        let mut worst = 0.0f64;
        for &i in nodes {
            let r = self.diag[i] * u.values[i] + y[i];
            worst = worst.max((r / self.diag[i]).abs());
        }
        Ok(worst)
    }

    /// `y = -(off-diagonal part) * x`: for each node the negated sum of
    /// conductance-weighted neighbor values.
    fn apply_off_diagonal(&self, x: &[f64], y: &mut [f64]) {
        let base = self.eg.base();
        let nb = base.len();
        let (nx, ny) = (base.nx(), base.ny());
        let m = self.eg.layers();
        for v in y.iter_mut() {
            *v = 0.0;
        }
        for k in 0..=m {
            let c = self.cx[k];
            let off = k * nb;
            for iy in 0..ny {
                let row = off + iy * nx;
                for ix in 0..nx - 1 {
                    let a = row + ix;
                    y[a] -= c * x[a + 1];
                    y[a + 1] -= c * x[a];
                }
            }
            for iy in 0..ny.saturating_sub(1) {
                for ix in 0..nx {
                    let a = off + iy * nx + ix;
                    let b = a + nx;
                    y[a] -= c * x[b];
                    y[b] -= c * x[a];
                }
            }
        }
        for k in 0..m {
            let c = self.ct[k];
            for i in 0..nb {
                let a = k * nb + i;
                let b = a + nb;
                y[a] -= c * x[b];
                y[b] -= c * x[a];
            }
        }
    }

    /// Restriction of an extension field to the trace plane `t = 0`.
    pub fn trace(&self, u: &ExtensionField) -> Result<Field> {
        let base = self.eg.base();
        if u.base_stamp != base.stamp() || u.len() != self.eg.len() {
            return Err(Error::GridMismatch);
        }
        Field::from_values(base, u.level(0).to_vec())
    }
}

/// Discrepancy report between the extension trace and the direct
/// nonlocal solve on the same base grid.
#[derive(Debug, Clone)]
pub struct CsReport {
    /// Sup over interior base nodes of |trace - direct|.
    pub sup_error: f64,
    /// Discrete L2 norm (cell-mass weighted) of the discrepancy.
    pub l2_error: f64,
    /// Sup over interior base nodes of |direct| (for relative errors).
    pub direct_sup: f64,
    /// Base spacing used.
    pub spacing: f64,
    /// Number of extension layers used.
    pub layers: usize,
    /// Truncation height used.
    pub height: f64,
    /// Base grid size.
    pub base_nodes: usize,
}

/// Default truncation height: twice the base-box diagonal (eight times
/// the domain diameter when the box is the standard 4x dilation).
pub fn default_height(grid: &Grid) -> f64 {
    2.0 * grid.bbox().diagonal(grid.dim())
}

/// Default grading ratio toward the trace plane.
pub const DEFAULT_GRADING: f64 = 1.15;

/// Layer count that brings the first layer width down to about the base
/// spacing under geometric grading.
pub fn default_layers(grid: &Grid, height: f64, grading: f64) -> usize {
    let h = grid.spacing();
    if (grading - 1.0).abs() < 1e-12 {
        return libm::ceil(height / h).max(1.0) as usize;
    }
    let m = libm::ceil((1.0 + height * (grading - 1.0) / h).ln() / grading.ln());
    (m.max(1.0)) as usize
}

/// Solves the same Dirichlet data directly (nonlocal form) and through
/// the extension, and reports the trace discrepancy on interior nodes.
pub fn cs_consistency(grid: &Grid, s: f64, g: &Field, g_inf: f64) -> Result<CsReport> {
    let direct = NonlocalForm::assemble(grid, s)?.solve_dirichlet(g, g_inf)?;
    let height = default_height(grid);
    let layers = default_layers(grid, height, DEFAULT_GRADING);
    let eg = ExtensionGrid::build(grid, s, height, layers, DEFAULT_GRADING)?;
    let form = WeightedForm::assemble(&eg);
    let star = form.solve(g, g_inf)?;
    let tr = form.trace(&star)?;

    let mut sup = 0.0f64;
    let mut dsup = 0.0f64;
    let mut l2 = 0.0;
    for &i in grid.interior_ids() {
        let diff = (tr.get(i) - direct.get(i)).abs();
        sup = sup.max(diff);
        dsup = dsup.max(direct.get(i).abs());
        l2 += diff * diff;
    }
    let mass = grid.spacing().powi(grid.dim() as i32);
    Ok(CsReport {
        sup_error: sup,
        l2_error: (mass * l2).sqrt(),
        direct_sup: dsup,
        spacing: grid.spacing(),
        layers,
        height,
        base_nodes: grid.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{staggered_box, Aabb, Domain, Point, Region};

    fn interval_grid(h: f64) -> Grid {
        let dom = Domain::new(1, Region::ball(Point::one_d(0.0), 1.0)).unwrap();
        let bbox = staggered_box(&dom, h, 4.0);
        Grid::build(&dom, bbox, h).unwrap()
    }

    #[test]
    fn hand_assembled_four_node_stiffness() {
        // 1D base with two nodes (h = 1), one layer (levels t = 0 and 1),
        // s = 1/4 so theta = 1/2. Conductances, reflection included:
        //   level 0 cell [0, 1/2]:  cx0 = 2 * (2/3) * (1/2)^{3/2}
        //   level 1 cell [1/2, 1]:  cx1 = 2 * (2/3) * (1 - (1/2)^{3/2})
        //   gap [0, 1]:             ct0 = 2 * (2/3)
        let dom = Domain::new(1, Region::ball(Point::one_d(0.5), 0.3)).unwrap();
        let bbox = Aabb::new(Point::one_d(0.0), Point::one_d(1.0));
        let base = Grid::build(&dom, bbox, 1.0).unwrap();
        assert_eq!(base.len(), 2);
        let eg = ExtensionGrid::build(&base, 0.25, 1.0, 1, 1.0).unwrap();
        let form = WeightedForm::assemble(&eg);
        let half_pow = 0.5f64.powf(1.5);
        let want_cx0 = 2.0 * (2.0 / 3.0) * half_pow;
        let want_cx1 = 2.0 * (2.0 / 3.0) * (1.0 - half_pow);
        let want_ct0 = 4.0 / 3.0;
        assert!((form.horizontal_conductance(0) - want_cx0).abs() < 1e-15);
        assert!((form.horizontal_conductance(1) - want_cx1).abs() < 1e-15);
        assert!((form.vertical_conductance(0) - want_ct0).abs() < 1e-15);
        // 4-node energy check: u = (0, 1; 0, 0) level-major
        let u = ExtensionField {
            values: alloc::vec![0.0, 1.0, 0.0, 0.0],
            base_stamp: base.stamp(),
            levels: 2,
        };
        let e = form.energy(&u).unwrap();
        let want = want_cx0 + want_ct0;
        assert!((e - want).abs() < 1e-15);
    }

    #[test]
    fn entries_reduce_to_laplacian_at_half() {
        // theta = 0: cell-averaged weights are exactly 1, so conductances
        // are the plain Laplacian's (times the reflection factor 2).
        let base = interval_grid(0.5);
        let eg = ExtensionGrid::build(&base, 0.5, 1.0, 4, 1.0).unwrap();
        let form = WeightedForm::assemble(&eg);
        let h = 0.5;
        // trace half-cell [0, 1/8], interior cells width 1/4, gap 1/4
        assert!((form.horizontal_conductance(0) - 2.0 / h * 0.125).abs() < 1e-15);
        assert!((form.horizontal_conductance(2) - 2.0 / h * 0.25).abs() < 1e-15);
        for k in 0..4 {
            assert!((form.vertical_conductance(k) - 2.0 * h * 0.25 / 0.0625).abs() < 1e-12);
        }
    }

    #[test]
    fn theta_zero_solution_matches_dense_elimination() {
        // small enough to solve the same system by Gaussian elimination
        let base = interval_grid(0.25);
        let eg = ExtensionGrid::build(&base, 0.5, 2.0, 4, 1.0).unwrap();
        let form = WeightedForm::assemble(&eg);
        let g = Field::from_fn(&base, |p| if p.x > 1.0 { 1.0 } else { 0.0 }).unwrap();
        let u = form.solve(&g, 0.0).unwrap();

        let nb = base.len();
        let m = eg.layers();
        let n = eg.len();
        let mut fixed = alloc::vec![None::<f64>; n];
        for &i in base.exterior_ids() {
            fixed[i] = Some(g.get(i));
        }
        for i in 0..nb {
            fixed[m * nb + i] = Some(0.0);
        }
        // dense assembly: A[p][q] from conductances
        let mut a = alloc::vec![alloc::vec![0.0f64; n]; n];
        let mut add = |p: usize, q: usize, c: f64| {
            a[p][p] += c;
            a[q][q] += c;
            a[p][q] -= c;
            a[q][p] -= c;
        };
        for k in 0..=m {
            for i in 0..nb - 1 {
                add(k * nb + i, k * nb + i + 1, form.horizontal_conductance(k));
            }
        }
        for k in 0..m {
            for i in 0..nb {
                add(k * nb + i, (k + 1) * nb + i, form.vertical_conductance(k));
            }
        }
        let mut rhs = alloc::vec![0.0f64; n];
        for p in 0..n {
            if let Some(v) = fixed[p] {
                for q in 0..n {
                    a[p][q] = 0.0;
                }
                a[p][p] = 1.0;
                rhs[p] = v;
            }
        }
        // clear fixed columns into the rhs
        for p in 0..n {
            if fixed[p].is_none() {
                for q in 0..n {
                    if let Some(v) = fixed[q] {
                        rhs[p] -= a[p][q] * v;
                        a[p][q] = 0.0;
                    }
                }
            }
        }
        // gaussian elimination with partial pivoting
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[r][col].abs() > a[piv][col].abs() {
                    piv = r;
                }
            }
            a.swap(col, piv);
            rhs.swap(col, piv);
            let d = a[col][col];
            for r in col + 1..n {
                let f = a[r][col] / d;
                if f != 0.0 {
                    for c in col..n {
                        a[r][c] -= f * a[col][c];
                    }
                    rhs[r] -= f * rhs[col];
                }
            }
        }
        let mut x = alloc::vec![0.0f64; n];
        for r in (0..n).rev() {
            let mut acc = rhs[r];
            for c in r + 1..n {
                acc -= a[r][c] * x[c];
            }
            x[r] = acc / a[r][r];
        }
        let mut worst = 0.0f64;
        for p in 0..n {
            worst = worst.max((u.values()[p] - x[p]).abs());
        }
        assert!(worst < 1e-9, "sup difference {worst}");
    }

    #[test]
    fn constant_data_is_exact() {
        let base = interval_grid(0.25);
        let eg = ExtensionGrid::build(&base, 0.75, 4.0, 8, 1.2).unwrap();
        let form = WeightedForm::assemble(&eg);
        let g = Field::constant(&base, 1.0).unwrap();
        let u = form.solve(&g, 1.0).unwrap();
        for &v in u.values() {
            assert!((v - 1.0).abs() < 1e-10);
        }
        assert!(form.energy(&u).unwrap() < 1e-18);
        let tr = form.trace(&u).unwrap();
        for &v in tr.values() {
            assert!((v - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn maximum_principle_for_characteristic_data() {
        let base = interval_grid(0.125);
        let eg = ExtensionGrid::build(&base, 0.25, 8.0, 12, 1.3).unwrap();
        let form = WeightedForm::assemble(&eg);
        let g = Field::from_fn(&base, |p| if p.x >= 1.0 && p.x <= 2.0 { 1.0 } else { 0.0 })
            .unwrap();
        let u = form.solve(&g, 0.0).unwrap();
        for &v in u.values() {
            assert!((0.0..=1.0).contains(&v));
        }
        // dirichlet rows reproduced exactly by the trace
        let tr = form.trace(&u).unwrap();
        for &i in base.exterior_ids() {
            assert_eq!(tr.get(i), g.get(i));
        }
    }

    #[test]
    fn energy_decreases_as_height_grows() {
        // uniform grading, nested heights with identical layer width
        let base = interval_grid(0.25);
        let g = Field::from_fn(&base, |p| if p.x > 1.0 { 1.0 } else { 0.0 }).unwrap();
        let energy_at = |t: f64, m: usize| {
            let eg = ExtensionGrid::build(&base, 0.5, t, m, 1.0).unwrap();
            let form = WeightedForm::assemble(&eg);
            let u = form.solve(&g, 0.0).unwrap();
            form.energy(&u).unwrap()
        };
        let e2 = energy_at(2.0, 8);
        let e4 = energy_at(4.0, 16);
        let e8 = energy_at(8.0, 32);
        assert!(e4 <= e2 + 1e-10, "{e4} vs {e2}");
        assert!(e8 <= e4 + 1e-10, "{e8} vs {e4}");
        assert!(e8 < e2, "expected strict decrease over the sweep");
    }

    #[test]
    fn trace_agrees_with_direct_solve_on_interval() {
        // staggered box: domain endpoints and data edges sit on cell
        // faces, so both solvers consume the exact same sharp data
        let h = 1.0 / 32.0;
        let dom = Domain::new(1, Region::interval(-1.0, 1.0)).unwrap();
        let grid = Grid::build(&dom, staggered_box(&dom, h, 4.0), h).unwrap();
        let g = Field::from_fn(&grid, |p| (1.0..=2.0).contains(&p.x) as u8 as f64).unwrap();
        let report = cs_consistency(&grid, 0.5, &g, 0.0).unwrap();
        let rel = report.sup_error / report.direct_sup;
        assert!(rel < 0.022, "relative sup {rel}");
        // Cauchy: ||diff||_2 <= sqrt(interior mass) * sup
        let mass = grid.spacing() * grid.interior_ids().len() as f64;
        assert!(report.l2_error <= mass.sqrt() * report.sup_error + 1e-15);
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let base = interval_grid(0.25);
        let other = interval_grid(0.125);
        let eg = ExtensionGrid::build(&base, 0.5, 2.0, 4, 1.0).unwrap();
        let form = WeightedForm::assemble(&eg);
        let g = Field::constant(&other, 1.0).unwrap();
        match form.solve(&g, 0.0) {
            Err(Error::GridMismatch) => {}
            other => panic!("expected GridMismatch, got {other:?}"),
        }
    }
}
