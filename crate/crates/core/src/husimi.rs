//! Husimi distributions of Floquet eigenstates and the phase-space overlap
//! index against a chaotic mask.

use std::fmt;

use crate::classical::ChaoticMask;
use crate::error::{Error, Result};
use crate::floquet::FloquetSpectrum;
use crate::grid::{CoherentGrid, PhaseGrid};
use crate::spin::{Spin, StateVector};
use crate::sweep::{sum_in_order, EigenAmplitudes};

/// `Q_k(theta_p, phi_q)` on a grid, flat index `p * N + q`.
#[derive(Clone, Debug)]
pub struct HusimiField {
    pub k: usize,
    pub spin: Spin,
    pub grid: PhaseGrid,
    pub values: Vec<f64>,
}

impl HusimiField {
    /// `(2S+1)/(4 pi) sum Q dA`
    pub fn normalization(&self) -> f64 {
        husimi_weight(self.spin, self.grid) * self.values.iter().sum::<f64>()
    }

    pub fn argmax(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

/// `(2S+1)/(4 pi) dA`, the quadrature weight of one cell.
pub(crate) fn husimi_weight(spin: Spin, grid: PhaseGrid) -> f64 {
    spin.dim() as f64 / (4.0 * std::f64::consts::PI) * grid.cell_area()
}

/// `Q(theta_p, phi_q) = |<theta_p, phi_q|psi>|^2` over a coherent grid.
pub fn husimi_function(k: usize, state: &StateVector, grid: &CoherentGrid) -> HusimiField {
    HusimiField {
        k,
        spin: grid.spin,
        grid: grid.grid,
        values: grid.states().iter().map(|c| c.inner(state).norm_sqr()).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapIndex {
    pub k: usize,
    /// Norm-corrected and clamped to `[-1, 1]`.
    pub chi: f64,
    /// `(2S+1)/(4 pi) sum Q C dA` before correction.
    pub raw: f64,
    /// Discrete Husimi norm of the state.
    pub norm: f64,
}

fn check_geometry(a: PhaseGrid, b: PhaseGrid) -> Result<()> {
    if a != b {
        return Err(Error::GeometryMismatch(format!("grid {} vs mask {}", a.n(), b.n())));
    }
    Ok(())
}

fn finish_index(k: usize, raw: f64, norm: f64) -> OverlapIndex {
    OverlapIndex {
        k,
        chi: (raw / norm).clamp(-1.0, 1.0),
        raw,
        norm,
    }
}

/// `chi_k = (2S+1)/(4 pi) sum Q_k C_pq dA`, divided by the discrete norm.
pub fn overlap_index(field: &HusimiField, mask: &ChaoticMask) -> Result<OverlapIndex> {
    check_geometry(field.grid, mask.grid)?;
    let w = husimi_weight(field.spin, field.grid);
    let raw: f64 = w * field
        .values
        .iter()
        .zip(&mask.labels)
        .map(|(q, &c)| q * f64::from(c))
        .sum::<f64>();
    Ok(finish_index(field.k, raw, field.normalization()))
}

#[derive(Clone, Debug)]
pub struct HusimiSweep {
    pub indices: Vec<OverlapIndex>,
    /// Fields of the requested eigenstates, in request order.
    pub fields: Vec<HusimiField>,
}

/// Overlap indices of every eigenstate, plus full fields for `keep`.
pub fn husimi_sweep(spec: &FloquetSpectrum, mask: &ChaoticMask, keep: &[usize]) -> HusimiSweep {
    let grid = mask.grid;
    let dim = spec.dim();
    let amps = EigenAmplitudes::new(spec, grid);
    // per block: [raw sums (dim) | norm sums (dim)] and the kept columns
    let parts = amps.map_blocks(|cells, g| {
        let mut sums = vec![0.0; 2 * dim];
        let mut kept = vec![Vec::with_capacity(cells.len()); keep.len()];
        for (j, cell) in cells.enumerate() {
            let label = f64::from(mask.labels[cell]);
            for a in 0..dim {
                let q = g[(a, j)].norm_sqr();
                sums[a] += q * label;
                sums[dim + a] += q;
            }
            for (slot, &k) in kept.iter_mut().zip(keep) {
                slot.push(g[(k, j)].norm_sqr());
            }
        }
        (sums, kept)
    });
    let mut fields: Vec<HusimiField> = keep
        .iter()
        .map(|&k| HusimiField {
            k,
            spin: spec.spin,
            grid,
            values: Vec::with_capacity(grid.cells()),
        })
        .collect();
    let mut sum_parts = Vec::with_capacity(parts.len());
    for (sums, kept) in parts {
        sum_parts.push(sums);
        for (f, vals) in fields.iter_mut().zip(kept) {
            f.values.extend(vals);
        }
    }
    let sums = sum_in_order(sum_parts, 2 * dim);
    let w = husimi_weight(spec.spin, grid);
    let indices = (0..dim).map(|k| finish_index(k, w * sums[k], w * sums[dim + k])).collect();
    HusimiSweep { indices, fields }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Regular,
    Mixed,
    Chaotic,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Regular => "regular",
            Label::Mixed => "mixed",
            Label::Chaotic => "chaotic",
        })
    }
}

impl std::str::FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regular" => Ok(Label::Regular),
            "mixed" => Ok(Label::Mixed),
            "chaotic" => Ok(Label::Chaotic),
            other => Err(Error::InvalidArgument(format!("unknown label {other:?}"))),
        }
    }
}

/// Classification bands `chi <= regular` and `chi >= chaotic`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    pub regular: f64,
    pub chaotic: f64,
}

impl Thresholds {
    pub fn new(regular: f64, chaotic: f64) -> Result<Self> {
        let ok = (-1.0..=1.0).contains(&regular) && (-1.0..=1.0).contains(&chaotic) && regular < chaotic;
        if !ok {
            return Err(Error::InvalidThresholds { regular, chaotic });
        }
        Ok(Self { regular, chaotic })
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            regular: -0.8,
            chaotic: 0.8,
        }
    }
}

pub fn classify(chi: f64, thresholds: Thresholds) -> Label {
    if chi <= thresholds.regular {
        Label::Regular
    } else if chi >= thresholds.chaotic {
        Label::Chaotic
    } else {
        Label::Mixed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::ChaoticMask;
    use crate::floquet::{kicked_top_spectrum, Observable};
    use crate::grid::coherent_grid;
    use crate::spin::{coherent_state, PhasePoint};
    use std::f64::consts::PI;

    #[test]
    fn top_state_field_matches_closed_form() {
        let spin = Spin::new(6.0).unwrap();
        let cg = coherent_grid(spin, 24).unwrap();
        let field = husimi_function(0, &StateVector::basis(spin.dim(), 0), &cg);
        for (cell, q) in field.values.iter().enumerate() {
            let theta = cg.grid.center(cell).theta;
            let expect = (0.5 * theta).cos().powi(4 * 6);
            assert!((q - expect).abs() < 1e-10);
        }
        let (p, _) = cg.grid.coords(field.argmax());
        assert_eq!(p, 23);
    }

    #[test]
    fn coherent_state_peaks_at_its_cell() {
        let spin = Spin::new(10.0).unwrap();
        let cg = coherent_grid(spin, 30).unwrap();
        let cell = cg.grid.index(11, 17);
        let state = coherent_state(spin, cg.grid.center(cell));
        assert_eq!(husimi_function(0, &state, &cg).argmax(), cell);
    }

    #[test]
    fn uniform_masks_give_endpoints() {
        let spin = Spin::new(8.0).unwrap();
        let spec = kicked_top_spectrum(spin, 13.0 * PI / 19.0, 3.0, Observable::Sx).unwrap();
        let grid = PhaseGrid::new(40).unwrap();
        let neg = husimi_sweep(&spec, &ChaoticMask::uniform(grid, -1), &[]);
        let pos = husimi_sweep(&spec, &ChaoticMask::uniform(grid, 1), &[]);
        for (a, b) in neg.indices.iter().zip(&pos.indices) {
            assert!((a.chi + 1.0).abs() < 1e-3);
            assert!((b.chi - 1.0).abs() < 1e-3);
            assert_eq!(a.raw, -b.raw);
        }
    }

    #[test]
    fn sweep_matches_direct_fields() {
        let spin = Spin::new(5.0).unwrap();
        let spec = kicked_top_spectrum(spin, 1.1, 2.0, Observable::Sx).unwrap();
        let cg = coherent_grid(spin, 16).unwrap();
        let mut mask = ChaoticMask::uniform(cg.grid, -1);
        for (i, l) in mask.labels.iter_mut().enumerate() {
            if i % 3 == 0 {
                *l = 1;
            }
        }
        let sweep = husimi_sweep(&spec, &mask, &[2, 7]);
        for (f, &k) in sweep.fields.iter().zip(&[2usize, 7]) {
            let direct = husimi_function(k, &spec.eigenstate(k), &cg);
            for (a, b) in f.values.iter().zip(&direct.values) {
                assert!((a - b).abs() < 1e-13);
            }
            let chi = overlap_index(&direct, &mask).unwrap();
            assert!((chi.chi - sweep.indices[k].chi).abs() < 1e-12);
        }
    }

    #[test]
    fn geometry_mismatch_is_an_error() {
        let spin = Spin::new(2.0).unwrap();
        let cg = coherent_grid(spin, 10).unwrap();
        let field = husimi_function(0, &coherent_state(spin, PhasePoint::new(1.0, 1.0).unwrap()), &cg);
        let mask = ChaoticMask::uniform(PhaseGrid::new(12).unwrap(), 1);
        assert!(matches!(overlap_index(&field, &mask), Err(Error::GeometryMismatch(_))));
    }

    #[test]
    fn classification_bands() {
        let t = Thresholds::default();
        assert_eq!(classify(-1.0, t), Label::Regular);
        assert_eq!(classify(1.0, t), Label::Chaotic);
        assert_eq!(classify(0.3858, t), Label::Mixed);
        assert_eq!(classify(0.9985, t), Label::Chaotic);
        assert!(Thresholds::new(0.5, 0.5).is_err());
        assert!(Thresholds::new(-1.5, 0.5).is_err());
        assert!(Thresholds::new(-0.5, 1.2).is_err());
    }
}
