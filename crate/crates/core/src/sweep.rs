//! Block-wise traversal of the phase grid in the Floquet eigenbasis.
//!
//! Coherent states are generated per block and projected onto the
//! eigenvectors with one gemm, so the full `dim x N^2` amplitude table never
//! has to be resident.

use std::ops::Range;

use faer::linalg::matmul::matmul;
use faer::{c64, Accum, Mat, Par};
use rayon::prelude::*;

use crate::floquet::FloquetSpectrum;
use crate::grid::{cell_blocks, PhaseGrid};
use crate::spin::CoherentBasis;

/// Cells per block.
pub(crate) const BLOCK: usize = 2048;

pub(crate) struct EigenAmplitudes<'a> {
    pub spec: &'a FloquetSpectrum,
    pub grid: PhaseGrid,
    basis: CoherentBasis,
}

impl<'a> EigenAmplitudes<'a> {
    pub fn new(spec: &'a FloquetSpectrum, grid: PhaseGrid) -> Self {
        Self {
            spec,
            grid,
            basis: CoherentBasis::new(spec.spin),
        }
    }

    /// `g[(a, j)] = <eps_a | theta_j, phi_j>` for the cells in `cells`.
    pub fn block(&self, cells: Range<usize>) -> Mat<c64> {
        let coherent = self.grid.coherent_block(&self.basis, cells);
        let mut out = Mat::<c64>::zeros(self.spec.dim(), coherent.ncols());
        matmul(
            out.as_mut(),
            Accum::Replace,
            self.spec.eigenvectors.adjoint(),
            coherent.as_ref(),
            c64::new(1.0, 0.0),
            Par::Seq,
        );
        out
    }

    /// Runs `f` on every block in parallel; results come back in block order.
    pub fn map_blocks<T: Send>(&self, f: impl Fn(Range<usize>, Mat<c64>) -> T + Sync) -> Vec<T> {
        cell_blocks(self.grid.cells(), BLOCK)
            .into_par_iter()
            .map(|cells| {
                let g = self.block(cells.clone());
                f(cells, g)
            })
            .collect()
    }
}

/// Elementwise sum of equally sized vectors, in order.
pub(crate) fn sum_in_order(parts: Vec<Vec<f64>>, len: usize) -> Vec<f64> {
    let mut acc = vec![0.0; len];
    for part in parts {
        for (a, p) in acc.iter_mut().zip(part) {
            *a += p;
        }
    }
    acc
}
