//! Uniform hash grid over 2D points for range queries.
//!
//! Used wherever the crate needs "all points near X" against clouds that are
//! far too large for brute force: alpha-shape neighbor search, swept-band
//! segmentation, and panel-clearance filtering.  Cells are keyed by integer
//! coordinates; queries enumerate candidate indices and leave exact predicate
//! checks to the caller.  Candidate order within a query is deterministic
//! (insertion order per cell, cells in row-major key order).

use std::collections::HashMap;

use super::{Point2, Real};

pub struct Grid2<F> {
    cell: F,
    cells: HashMap<(i64, i64), Vec<u32>>,
}

impl<F: Real> Grid2<F> {
    /// Builds a grid with the given cell size over `points`.
    ///
    /// `cell` must be positive and finite.
    pub fn build(points: impl IntoIterator<Item = Point2<F>>, cell: F) -> Self {
        assert!(cell > F::zero() && cell.is_finite(), "grid cell size must be positive");
        let mut cells: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (i, p) in points.into_iter().enumerate() {
            cells.entry(Self::key_of(p, cell)).or_default().push(i as u32);
        }
        Self { cell, cells }
    }

    fn key_of(p: Point2<F>, cell: F) -> (i64, i64) {
        let kx = (p.x / cell).floor().to_f64().unwrap_or(0.0) as i64;
        let ky = (p.y / cell).floor().to_f64().unwrap_or(0.0) as i64;
        (kx, ky)
    }

    /// Calls `f` with the index of every point whose cell intersects the
    /// axis-aligned box `[lo, hi]` inflated by one cell in every direction.
    pub fn for_each_candidate_in_box(&self, lo: Point2<F>, hi: Point2<F>, mut f: impl FnMut(u32)) {
        self.for_each_candidate_in_box_while(lo, hi, |i| {
            f(i);
            true
        });
    }

    /// Like `for_each_candidate_in_box`, but stops the whole query as soon
    /// as `f` returns `false`.  Lets callers whose predicate saturates (all
    /// outcomes decided) skip the rest of a dense neighborhood.
    pub fn for_each_candidate_in_box_while(
        &self,
        lo: Point2<F>,
        hi: Point2<F>,
        mut f: impl FnMut(u32) -> bool,
    ) {
        let (kx0, ky0) = Self::key_of(lo, self.cell);
        let (kx1, ky1) = Self::key_of(hi, self.cell);
        for kx in kx0 - 1..=kx1 + 1 {
            for ky in ky0 - 1..=ky1 + 1 {
                if let Some(v) = self.cells.get(&(kx, ky)) {
                    for &i in v {
                        if !f(i) {
                            return;
                        }
                    }
                }
            }
        }
    }

    /// Calls `f` with the index of every point that could lie within `radius`
    /// of `center` (callers still verify the exact distance).
    pub fn for_each_candidate_near(&self, center: Point2<F>, radius: F, f: impl FnMut(u32)) {
        let r = Point2::new(radius, radius);
        self.for_each_candidate_in_box(center - r, center + r, f);
    }

    /// Like `for_each_candidate_near`, but visits cells ordered by their ring
    /// distance from the cell containing `center` and stops the whole query
    /// as soon as `f` returns `false`.  Existence queries that stop at the
    /// first witness touch the nearest candidates first, which keeps them
    /// cheap on dense clouds.  The cell box covers exactly the keys a
    /// radius-`radius` disk can reach.
    pub fn for_each_candidate_near_center_out_while(
        &self,
        center: Point2<F>,
        radius: F,
        mut f: impl FnMut(u32) -> bool,
    ) {
        let r = Point2::new(radius, radius);
        let (kx0, ky0) = Self::key_of(center - r, self.cell);
        let (kx1, ky1) = Self::key_of(center + r, self.cell);
        let (kcx, kcy) = Self::key_of(center, self.cell);
        let max_ring = (kcx - kx0)
            .max(kx1 - kcx)
            .max(kcy - ky0)
            .max(ky1 - kcy);
        for ring in 0..=max_ring {
            for kx in (kcx - ring).max(kx0)..=(kcx + ring).min(kx1) {
                for ky in (kcy - ring).max(ky0)..=(kcy + ring).min(ky1) {
                    if (kx - kcx).abs().max((ky - kcy).abs()) != ring {
                        continue;
                    }
                    if let Some(v) = self.cells.get(&(kx, ky)) {
                        for &i in v {
                            if !f(i) {
                                return;
                            }
                        }
                    }
                }
            }
        }
    }
}
