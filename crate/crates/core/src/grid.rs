//! Equal-area `N x N` grid over the sphere in canonical coordinates
//! `(phi, cos theta)`.
//!
//! Cell `(p, q)` (0-based here) has center `cos theta_p = -1 + (p + 1/2) 2/N`
//! and `phi_q = -pi + (q + 1/2) 2 pi/N`; every cell has area `4 pi / N^2`.
//! Flat cell index is `p * N + q`.

use std::f64::consts::PI;
use std::ops::Range;

use faer::{c64, Mat};

use crate::error::{Error, Result};
use crate::spin::{CoherentBasis, PhasePoint, Spin, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhaseGrid {
    n: usize,
}

impl PhaseGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::GridTooSmall(n));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> usize {
        self.n * self.n
    }

    /// `Delta A_pq` in steradians (constant).
    pub fn cell_area(&self) -> f64 {
        4.0 * PI / (self.n * self.n) as f64
    }

    pub fn cos_theta(&self, p: usize) -> f64 {
        -1.0 + (p as f64 + 0.5) * 2.0 / self.n as f64
    }

    pub fn phi(&self, q: usize) -> f64 {
        -PI + (q as f64 + 0.5) * 2.0 * PI / self.n as f64
    }

    pub fn index(&self, p: usize, q: usize) -> usize {
        p * self.n + q
    }

    pub fn coords(&self, cell: usize) -> (usize, usize) {
        (cell / self.n, cell % self.n)
    }

    pub fn center(&self, cell: usize) -> PhasePoint {
        let (p, q) = self.coords(cell);
        PhasePoint {
            theta: self.cos_theta(p).acos(),
            phi: self.phi(q),
        }
    }

    /// Cell containing canonical point `(phi, cos theta)`; edges clamp inward.
    pub fn locate(&self, phi: f64, cos_theta: f64) -> usize {
        let n = self.n as f64;
        let p = (((cos_theta + 1.0) * 0.5 * n).floor().max(0.0) as usize).min(self.n - 1);
        let q = (((phi + PI) / (2.0 * PI) * n).floor().max(0.0) as usize).min(self.n - 1);
        self.index(p, q)
    }

    /// Coherent states for the cells in `cells`, one per column.
    pub fn coherent_block(&self, basis: &CoherentBasis, cells: Range<usize>) -> Mat<c64> {
        let dim = basis.spin().dim();
        let mut out = Mat::<c64>::zeros(dim, cells.len());
        for (col, cell) in cells.enumerate() {
            basis.fill(self.center(cell), out.col_as_slice_mut(col));
        }
        out
    }
}

/// Coherent states at every cell center of a [`PhaseGrid`].
#[derive(Clone, Debug)]
pub struct CoherentGrid {
    pub grid: PhaseGrid,
    pub spin: Spin,
    states: Vec<StateVector>,
}

impl CoherentGrid {
    pub fn get(&self, p: usize, q: usize) -> &StateVector {
        &self.states[self.grid.index(p, q)]
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }
}

pub fn coherent_grid(spin: Spin, n: usize) -> Result<CoherentGrid> {
    let grid = PhaseGrid::new(n)?;
    let basis = CoherentBasis::new(spin);
    let states = (0..grid.cells()).map(|c| basis.state(grid.center(c))).collect();
    Ok(CoherentGrid { grid, spin, states })
}

/// Fixed-size partition of the cell range. Block boundaries never depend on
/// the thread count, so reductions over blocks are reproducible.
pub(crate) fn cell_blocks(cells: usize, block: usize) -> Vec<Range<usize>> {
    (0..cells)
        .step_by(block)
        .map(|start| start..(start + block).min(cells))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_centers() {
        let g = PhaseGrid::new(2).unwrap();
        assert_eq!(g.cos_theta(0), -0.5);
        assert_eq!(g.cos_theta(1), 0.5);
        assert_eq!(g.phi(0), -PI / 2.0);
        assert_eq!(g.phi(1), PI / 2.0);
    }

    #[test]
    fn rejects_small_grid() {
        assert!(matches!(PhaseGrid::new(1), Err(Error::GridTooSmall(1))));
        assert!(coherent_grid(Spin::new(1.0).unwrap(), 0).is_err());
    }

    #[test]
    fn areas_sum_to_sphere() {
        for n in [2, 7, 300] {
            let g = PhaseGrid::new(n).unwrap();
            let total = g.cell_area() * g.cells() as f64;
            assert!((total - 4.0 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn locate_inverts_center() {
        let g = PhaseGrid::new(37).unwrap();
        for cell in 0..g.cells() {
            let c = g.center(cell);
            assert_eq!(g.locate(c.phi, c.cos_theta()), cell);
        }
        assert_eq!(g.locate(PI, 1.0), g.cells() - 1);
        assert_eq!(g.locate(-PI, -1.0), 0);
    }

    #[test]
    fn grid_states_are_normalized() {
        let cg = coherent_grid(Spin::new(7.5).unwrap(), 9).unwrap();
        assert!(cg.states().iter().all(|s| (s.norm_sqr() - 1.0).abs() < 1e-12));
        let g = cg.grid;
        let block = g.coherent_block(&CoherentBasis::new(cg.spin), 10..14);
        for col in 0..4 {
            for i in 0..cg.spin.dim() {
                assert_eq!(block[(i, col)], cg.states()[10 + col].amplitudes()[i]);
            }
        }
    }

    #[test]
    fn blocks_cover_range() {
        let b = cell_blocks(10, 4);
        assert_eq!(b, vec![0..4, 4..8, 8..10]);
    }
}
