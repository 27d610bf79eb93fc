//! Microcanonical OTOC `c_k(t) = <eps_k|[A(t), rho_c]^dag [A(t), rho_c]|eps_k>`
//! with `A = s_x` and `rho_c` a coherent-state projector.
//!
//! `rho_c` has rank one, so with `a = <c|eps_k>`, `w = A(t)|c>` and
//! `v_k = <c|A(t)|eps_k>`:
//!
//! ```text
//! c_k(t) = |a|^2 <c|A(t)^2|c> + |v_k|^2 - 2 Re[a* <c|A(t)|c> v_k]
//! ```
//!
//! Everything is evaluated in the Floquet eigenbasis, where `A(t)` differs
//! from `A(0)` only by the phases `e^{-i(eps_a - eps_b)t}`. One product
//! `A Y` per cell and time yields `c_k` for every `k` at once.

use faer::linalg::matmul::matmul;
use faer::{c64, Accum, Mat, Par};

use crate::error::{Error, Result};
use crate::floquet::FloquetSpectrum;
use crate::grid::PhaseGrid;
use crate::husimi::{classify, husimi_weight, Label, OverlapIndex, Thresholds};
use crate::spin::{Spin, StateVector};
use crate::sweep::{sum_in_order, EigenAmplitudes};

/// Default stroboscopic snapshot times for field exports.
pub const DEFAULT_SNAPSHOTS: [u32; 4] = [0, 5, 20, 100];
pub const DEFAULT_T0: u32 = 100;
pub const DEFAULT_WINDOW: u32 = 500;

/// `c_k(t)` over the grid for one eigenstate.
#[derive(Clone, Debug)]
pub struct OtocField {
    pub k: usize,
    pub t: u32,
    pub spin: Spin,
    pub grid: PhaseGrid,
    pub values: Vec<f64>,
}

/// Phase-space averaged OTOC `C_k(t)` at the sampled times.
#[derive(Clone, Debug, PartialEq)]
pub struct OtocSeries {
    pub k: usize,
    pub times: Vec<u32>,
    pub avg: Vec<f64>,
}

impl OtocSeries {
    pub fn at(&self, t: u32) -> Option<f64> {
        self.times.iter().position(|&s| s == t).map(|i| self.avg[i])
    }
}

/// `C_k(t)` for every eigenstate at a common set of times.
#[derive(Clone, Debug)]
pub struct SeriesTable {
    pub times: Vec<u32>,
    /// `values[i][k] = C_k(times[i])`
    pub values: Vec<Vec<f64>>,
}

impl SeriesTable {
    pub fn series(&self, k: usize) -> OtocSeries {
        OtocSeries {
            k,
            times: self.times.clone(),
            avg: self.values.iter().map(|row| row[k]).collect(),
        }
    }

    /// Mean of `C_k(t)` over the stored times in `[start, end)`.
    pub fn window_mean(&self, k: usize, start: u32, end: u32) -> Option<f64> {
        let picked: Vec<f64> = self
            .times
            .iter()
            .zip(&self.values)
            .filter(|(t, _)| (start..end).contains(*t))
            .map(|(_, row)| row[k])
            .collect();
        (!picked.is_empty()).then(|| picked.iter().sum::<f64>() / picked.len() as f64)
    }
}

/// Which power of `Q_k` multiplies `(s_x)_kk^2` in the analytic long-time
/// average. `Fourth` is the published expression; `Second` is what a direct
/// time average of the rank-one expansion produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum AnalyticForm {
    #[default]
    Fourth,
    Second,
}

impl AnalyticForm {
    pub fn power(self) -> i32 {
        match self {
            AnalyticForm::Fourth => 4,
            AnalyticForm::Second => 2,
        }
    }

    pub fn from_power(p: u32) -> Result<Self> {
        match p {
            4 => Ok(AnalyticForm::Fourth),
            2 => Ok(AnalyticForm::Second),
            other => Err(Error::InvalidArgument(format!("analytic Q_k power must be 2 or 4, got {other}"))),
        }
    }
}

/// Per-eigenstate summary.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenstateProfile {
    pub k: usize,
    pub quasienergy: f64,
    pub chi: f64,
    pub gamma: f64,
    pub cbar: f64,
    pub cbar_analytic: f64,
    pub label: Label,
    pub degenerate: bool,
}

/// `tau = nint(ln(2S + 1))`
pub fn growth_time(spin: Spin) -> u32 {
    (spin.dim() as f64).ln().round() as u32
}

/// `gamma_k = (C_k(tau) - C_k(0)) / tau`
pub fn growth_rate(series: &OtocSeries, spin: Spin) -> Result<f64> {
    growth_rate_with(series, growth_time(spin))
}

pub fn growth_rate_with(series: &OtocSeries, tau: u32) -> Result<f64> {
    if tau == 0 {
        return Err(Error::InvalidArgument("growth time must be positive".into()));
    }
    let start = series.at(0).ok_or(Error::MissingTime(0))?;
    let end = series.at(tau).ok_or(Error::MissingTime(tau))?;
    Ok((end - start) / f64::from(tau))
}

/// `C_k(t) = (2S+1)/(4 pi) sum_pq c_k(t) dA`
pub fn phase_average(field: &OtocField) -> f64 {
    husimi_weight(field.spin, field.grid) * field.values.iter().sum::<f64>()
}

/// Rank-one evaluation for a single eigenstate and reference state.
pub fn otoc_point(spec: &FloquetSpectrum, k: usize, c: &StateVector, t: u32) -> f64 {
    let g = spec.to_eigenbasis(c);
    let ph = spec.phases(t);
    let dim = spec.dim();
    // Y = e^{+i eps t} g, Z = A Y; then A(t) g = e^{-i eps t} Z
    let y: Vec<c64> = g.iter().zip(&ph).map(|(g, p)| g * p.conj()).collect();
    let z: Vec<c64> = (0..dim)
        .map(|a| (0..dim).map(|b| spec.observable[(a, b)] * y[b]).sum())
        .collect();
    let norm2: f64 = z.iter().map(|z| z.norm_sqr()).sum();
    let ov: f64 = y.iter().zip(&z).map(|(y, z)| (y.conj() * z).re).sum();
    y[k].norm_sqr() * norm2 + z[k].norm_sqr() - 2.0 * ov * (y[k] * z[k].conj()).re
}

/// Evolved block: columns `[0, b)` hold real parts, `[b, 2b)` imaginary parts.
struct Evolved {
    b: usize,
    y: Mat<f64>,
    z: Mat<f64>,
}

impl Evolved {
    #[inline]
    fn cell(&self, j: usize) -> [&[f64]; 4] {
        [
            self.y.col_as_slice(j),
            self.y.col_as_slice(self.b + j),
            self.z.col_as_slice(j),
            self.z.col_as_slice(self.b + j),
        ]
    }
}

/// `c_k` for one cell, every `k`, passed to `sink(k, c_k)`.
#[inline]
fn cell_otoc([yre, yim, zre, zim]: [&[f64]; 4], mut sink: impl FnMut(usize, f64)) {
    let mut norm2 = 0.0;
    let mut ov = 0.0;
    for a in 0..yre.len() {
        norm2 += zre[a] * zre[a] + zim[a] * zim[a];
        ov += yre[a] * zre[a] + yim[a] * zim[a];
    }
    for k in 0..yre.len() {
        let q = yre[k] * yre[k] + yim[k] * yim[k];
        let v = zre[k] * zre[k] + zim[k] * zim[k];
        let cross = yre[k] * zre[k] + yim[k] * zim[k];
        sink(k, q * norm2 + v - 2.0 * ov * cross);
    }
}

/// Batched OTOC evaluation over a phase grid.
pub struct OtocEngine<'a> {
    amps: EigenAmplitudes<'a>,
}

impl<'a> OtocEngine<'a> {
    pub fn new(spec: &'a FloquetSpectrum, grid: PhaseGrid) -> Self {
        Self {
            amps: EigenAmplitudes::new(spec, grid),
        }
    }

    fn spec(&self) -> &FloquetSpectrum {
        self.amps.spec
    }

    fn weight(&self) -> f64 {
        husimi_weight(self.spec().spin, self.amps.grid)
    }

    fn evolve(&self, g: &Mat<c64>, t: u32) -> Evolved {
        let spec = self.spec();
        let dim = spec.dim();
        let b = g.ncols();
        let ph = spec.phases(t);
        let mut y = Mat::<f64>::zeros(dim, 2 * b);
        for j in 0..b {
            for a in 0..dim {
                let v = g[(a, j)] * ph[a].conj();
                y[(a, j)] = v.re;
                y[(a, b + j)] = v.im;
            }
        }
        let mut z = Mat::<f64>::zeros(dim, 2 * b);
        if let Some(real) = spec.observable_real() {
            matmul(z.as_mut(), Accum::Replace, real.as_ref(), y.as_ref(), 1.0, Par::Seq);
        } else {
            let yc = Mat::<c64>::from_fn(dim, b, |a, j| c64::new(y[(a, j)], y[(a, b + j)]));
            let mut zc = Mat::<c64>::zeros(dim, b);
            matmul(
                zc.as_mut(),
                Accum::Replace,
                spec.observable.as_ref(),
                yc.as_ref(),
                c64::new(1.0, 0.0),
                Par::Seq,
            );
            for j in 0..b {
                for a in 0..dim {
                    z[(a, j)] = zc[(a, j)].re;
                    z[(a, b + j)] = zc[(a, j)].im;
                }
            }
        }
        Evolved { b, y, z }
    }

    /// `C_k(t)` for every eigenstate and every time in `times`.
    pub fn series(&self, times: &[u32]) -> SeriesTable {
        let dim = self.spec().dim();
        let nt = times.len();
        let parts = self.amps.map_blocks(|_, g| {
            let mut acc = vec![0.0; nt * dim];
            for (ti, &t) in times.iter().enumerate() {
                let ev = self.evolve(&g, t);
                let row = &mut acc[ti * dim..(ti + 1) * dim];
                for j in 0..ev.b {
                    cell_otoc(ev.cell(j), |k, c| row[k] += c);
                }
            }
            acc
        });
        let sums = sum_in_order(parts, nt * dim);
        let w = self.weight();
        SeriesTable {
            times: times.to_vec(),
            values: sums.chunks(dim).map(|row| row.iter().map(|s| s * w).collect()).collect(),
        }
    }

    /// Full `c_k(t)` fields for the requested eigenstates.
    pub fn fields(&self, t: u32, ks: &[usize]) -> Vec<OtocField> {
        let parts = self.amps.map_blocks(|_, g| {
            let ev = self.evolve(&g, t);
            let mut kept = vec![Vec::with_capacity(ev.b); ks.len()];
            let mut all = vec![0.0; self.spec().dim()];
            for j in 0..ev.b {
                cell_otoc(ev.cell(j), |k, c| all[k] = c);
                for (slot, &k) in kept.iter_mut().zip(ks) {
                    slot.push(all[k]);
                }
            }
            kept
        });
        let mut out: Vec<OtocField> = ks
            .iter()
            .map(|&k| OtocField {
                k,
                t,
                spin: self.spec().spin,
                grid: self.amps.grid,
                values: Vec::with_capacity(self.amps.grid.cells()),
            })
            .collect();
        for kept in parts {
            for (f, vals) in out.iter_mut().zip(kept) {
                f.values.extend(vals);
            }
        }
        out
    }

    /// Mean of `C_k(t)` over integer kicks `t0 .. t0 + window`.
    pub fn longtime_numeric(&self, t0: u32, window: u32) -> Vec<f64> {
        let times: Vec<u32> = (t0..t0 + window).collect();
        let table = self.series(&times);
        (0..self.spec().dim())
            .map(|k| table.window_mean(k, t0, t0 + window).unwrap_or(0.0))
            .collect()
    }

    /// Analytic infinite-time average of `C_k(t)` for every eigenstate.
    ///
    /// Per cell, with `Q_j = |<theta,phi|eps_j>|^2` and `s = (s_x)` in the
    /// eigenbasis:
    ///
    /// ```text
    /// C_k1 = Q_k sum_p Q_p (s^2)_pp + sum_p Q_p |s_kp|^2 - 2 s_kk^2 Q_k^n
    /// C_k2 = Q_k sum_{p != k} [Q_p s_pp s_kk + Q_p |s_kp|^2]
    /// cbar = C_k1 - 2 C_k2
    /// ```
    ///
    /// with `n` set by `form`.
    pub fn longtime_analytic(&self, form: AnalyticForm) -> Vec<f64> {
        let spec = self.spec();
        let dim = spec.dim();
        let s = &spec.observable;
        let abs2 = Mat::<f64>::from_fn(dim, dim, |a, b| s[(a, b)].norm_sqr());
        let s2_diag: Vec<f64> = (0..dim).map(|a| (0..dim).map(|b| abs2[(a, b)]).sum()).collect();
        let s_diag: Vec<f64> = (0..dim).map(|a| s[(a, a)].re).collect();
        let power = form.power();
        let parts = self.amps.map_blocks(|_, g| {
            let b = g.ncols();
            let q = Mat::<f64>::from_fn(dim, b, |a, j| g[(a, j)].norm_sqr());
            let mut mixed = Mat::<f64>::zeros(dim, b);
            matmul(mixed.as_mut(), Accum::Replace, abs2.as_ref(), q.as_ref(), 1.0, Par::Seq);
            let mut acc = vec![0.0; dim];
            for j in 0..b {
                let qc = q.col_as_slice(j);
                let mc = mixed.col_as_slice(j);
                let a1: f64 = qc.iter().zip(&s2_diag).map(|(q, d)| q * d).sum();
                let d: f64 = qc.iter().zip(&s_diag).map(|(q, d)| q * d).sum();
                for k in 0..dim {
                    let qk = qc[k];
                    let skk = s_diag[k];
                    let c1 = qk * a1 + mc[k] - 2.0 * skk * skk * qk.powi(power);
                    let c2 = qk * (skk * (d - qk * skk) + (mc[k] - qk * abs2[(k, k)]));
                    acc[k] += c1 - 2.0 * c2;
                }
            }
            acc
        });
        let w = self.weight();
        sum_in_order(parts, dim).into_iter().map(|v| v * w).collect()
    }

    /// Cauchy-Schwarz bound `(2S+1)^2/(4 pi) sum dA Q_k W_t` on `c_k(t)` for
    /// the reference projector `rho_c = |c><c|`, where
    /// `W_t(theta,phi) = <theta,phi|O^dag O|theta,phi>`, `O = [A(t), rho_c]`.
    pub fn upper_bounds(&self, reference: &StateVector, t: u32) -> Vec<f64> {
        let spec = self.spec();
        let dim = spec.dim();
        let g_ref = spec.to_eigenbasis(reference);
        let m = spec.heisenberg(t);
        let w: Vec<c64> = (0..dim).map(|a| (0..dim).map(|b| m[(a, b)] * g_ref[b]).sum()).collect();
        let a_ref: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        let m_ref: f64 = g_ref.iter().zip(&w).map(|(g, w)| (g.conj() * w).re).sum();
        let parts = self.amps.map_blocks(|_, g| {
            let mut acc = vec![0.0; dim];
            for j in 0..g.ncols() {
                let mut alpha = c64::new(0.0, 0.0);
                let mut beta = c64::new(0.0, 0.0);
                for a in 0..dim {
                    alpha += g_ref[a].conj() * g[(a, j)];
                    beta += w[a].conj() * g[(a, j)];
                }
                let wt = alpha.norm_sqr() * a_ref + beta.norm_sqr() - 2.0 * (alpha.conj() * beta).re * m_ref;
                for (k, slot) in acc.iter_mut().enumerate() {
                    *slot += g[(k, j)].norm_sqr() * wt;
                }
            }
            acc
        });
        let w8 = self.weight() * spec.dim() as f64;
        sum_in_order(parts, dim).into_iter().map(|v| v * w8).collect()
    }
}

/// Sorted union of `{0, tau}` and the window `[t0, t0 + window)`.
pub fn required_times(tau: u32, t0: u32, window: u32) -> Vec<u32> {
    let mut times: Vec<u32> = (t0..t0 + window).chain([0, tau]).collect();
    times.sort_unstable();
    times.dedup();
    times
}

/// Combines overlap indices, a series table and analytic averages into
/// one profile per eigenstate.
#[allow(clippy::too_many_arguments)]
pub fn profiles(
    spec: &FloquetSpectrum,
    chi: &[OverlapIndex],
    table: &SeriesTable,
    tau: u32,
    t0: u32,
    window: u32,
    analytic: &[f64],
    thresholds: Thresholds,
) -> Result<Vec<EigenstateProfile>> {
    let dim = spec.dim();
    if chi.len() != dim {
        return Err(Error::LengthMismatch(chi.len(), dim));
    }
    if analytic.len() != dim {
        return Err(Error::LengthMismatch(analytic.len(), dim));
    }
    if window == 0 {
        return Err(Error::InvalidArgument("averaging window must be positive".into()));
    }
    let rows: Vec<usize> = (t0..t0 + window)
        .map(|t| table.times.iter().position(|&s| s == t).ok_or(Error::MissingTime(t)))
        .collect::<Result<_>>()?;
    (0..dim)
        .map(|k| {
            let gamma = growth_rate_with(&table.series(k), tau)?;
            let cbar = rows.iter().map(|&r| table.values[r][k]).sum::<f64>() / f64::from(window);
            Ok(EigenstateProfile {
                k,
                quasienergy: spec.quasienergies[k],
                chi: chi[k].chi,
                gamma,
                cbar,
                cbar_analytic: analytic[k],
                label: classify(chi[k].chi, thresholds),
                degenerate: spec.is_degenerate(k),
            })
        })
        .collect()
}

pub fn otoc_field(spec: &FloquetSpectrum, k: usize, grid: PhaseGrid, t: u32) -> OtocField {
    OtocEngine::new(spec, grid).fields(t, &[k]).pop().expect("one field")
}

pub fn longtime_avg_numeric(spec: &FloquetSpectrum, k: usize, grid: PhaseGrid, t0: u32, window: u32) -> f64 {
    OtocEngine::new(spec, grid).longtime_numeric(t0, window)[k]
}

pub fn longtime_avg_analytic(spec: &FloquetSpectrum, k: usize, grid: PhaseGrid, form: AnalyticForm) -> f64 {
    if !spec.degeneracies.is_empty() {
        log::warn!("analytic long-time average assumes a non-degenerate spectrum");
    }
    OtocEngine::new(spec, grid).longtime_analytic(form)[k]
}

pub fn otoc_upper_bound(spec: &FloquetSpectrum, k: usize, grid: PhaseGrid, reference: &StateVector, t: u32) -> f64 {
    OtocEngine::new(spec, grid).upper_bounds(reference, t)[k]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::{kicked_top_spectrum, Observable};
    use crate::grid::coherent_grid;
    use crate::spin::{coherent_state, PhasePoint};
    use std::f64::consts::PI;

    const ALPHA: f64 = 13.0 * PI / 19.0;

    #[test]
    fn growth_window() {
        assert_eq!(growth_time(Spin::new(150.0).unwrap()), 6);
        assert_eq!(growth_time(Spin::new(50.0).unwrap()), 5);
        let flat = OtocSeries {
            k: 0,
            times: vec![0, 6],
            avg: vec![0.4, 0.4],
        };
        assert_eq!(growth_rate(&flat, Spin::new(150.0).unwrap()).unwrap(), 0.0);
        let short = OtocSeries {
            k: 0,
            times: vec![0, 5],
            avg: vec![0.0, 1.0],
        };
        assert!(matches!(growth_rate(&short, Spin::new(150.0).unwrap()), Err(Error::MissingTime(6))));
    }

    #[test]
    fn phase_average_of_constant_field() {
        let spin = Spin::new(4.0).unwrap();
        let grid = PhaseGrid::new(10).unwrap();
        let mut field = OtocField {
            k: 0,
            t: 0,
            spin,
            grid,
            values: vec![0.0; grid.cells()],
        };
        assert_eq!(phase_average(&field), 0.0);
        field.values.fill(0.25);
        assert!((phase_average(&field) - 9.0 * 0.25).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_reference_gives_zero_at_t0() {
        // an eigenstate orthogonal to c with <c|s|eps_k> = 0: use c = |eps_j>,
        // k outside the support of column j of s
        let spec = kicked_top_spectrum(Spin::new(3.0).unwrap(), ALPHA, 3.0, Observable::Sx).unwrap();
        let j = 0;
        let k = (1..spec.dim()).find(|&k| spec.observable[(j, k)].norm() < 1e-14);
        if let Some(k) = k {
            assert!(otoc_point(&spec, k, &spec.eigenstate(j), 0).abs() < 1e-14);
        }
        let c = spec.eigenstate(j);
        // c_k(0) with c = |eps_k> reduces to Var(s) in that state
        let var: f64 = (0..spec.dim()).filter(|&b| b != j).map(|b| spec.observable[(j, b)].norm_sqr()).sum();
        assert!((otoc_point(&spec, j, &c, 0) - var).abs() < 1e-12);
    }

    #[test]
    fn engine_matches_pointwise() {
        let spin = Spin::new(6.0).unwrap();
        let spec = kicked_top_spectrum(spin, ALPHA, 3.0, Observable::Sx).unwrap();
        let cg = coherent_grid(spin, 12).unwrap();
        let engine = OtocEngine::new(&spec, cg.grid);
        for t in [0, 3, 11] {
            let fields = engine.fields(t, &[1, 9]);
            for f in &fields {
                for (cell, v) in f.values.iter().enumerate() {
                    let direct = otoc_point(&spec, f.k, &cg.states()[cell], t);
                    assert!((v - direct).abs() < 1e-12);
                }
            }
            let table = engine.series(&[t]);
            for f in &fields {
                assert!((table.values[0][f.k] - phase_average(f)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn complex_and_real_paths_agree() {
        let spin = Spin::new(5.0).unwrap();
        let fast = kicked_top_spectrum(spin, ALPHA, 3.0, Observable::Sx).unwrap();
        assert!(fast.observable_real().is_some());
        let f = crate::floquet::build_floquet(spin, ALPHA, 3.0).unwrap();
        let generic = crate::floquet::floquet_spectrum(&f, spin, Observable::Sx).unwrap();
        let grid = PhaseGrid::new(14).unwrap();
        let a = OtocEngine::new(&fast, grid).series(&[0, 4]);
        let b = OtocEngine::new(&generic, grid).series(&[0, 4]);
        for (ra, rb) in a.values.iter().zip(&b.values) {
            for (x, y) in ra.iter().zip(rb) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn analytic_vanishes_without_observable() {
        let spin = Spin::new(3.0).unwrap();
        let mut spec = kicked_top_spectrum(spin, ALPHA, 3.0, Observable::Sx).unwrap();
        spec.observable = Mat::<c64>::zeros(spin.dim(), spin.dim());
        let grid = PhaseGrid::new(8).unwrap();
        let v = OtocEngine::new(&spec, grid).longtime_analytic(AnalyticForm::Fourth);
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn bound_dominates_at_reference() {
        let spin = Spin::new(5.0).unwrap();
        let spec = kicked_top_spectrum(spin, ALPHA, 3.0, Observable::Sx).unwrap();
        let grid = PhaseGrid::new(40).unwrap();
        let c = coherent_state(spin, PhasePoint::new(1.2, 0.4).unwrap());
        let engine = OtocEngine::new(&spec, grid);
        for t in [0, 2, 5] {
            let bounds = engine.upper_bounds(&c, t);
            for (k, b) in bounds.iter().enumerate() {
                assert!(otoc_point(&spec, k, &c, t) <= b + 1e-9);
            }
        }
    }

    /// `||[A(t), |c><c|] |eps_k>||^2` with `A(t) = F^-t (S_x/S) F^t` built densely.
    fn dense_otoc(spin: Spin, kappa: f64, c: &StateVector, eig: &StateVector, t: u32) -> f64 {
        let f = crate::floquet::build_floquet(spin, ALPHA, kappa).unwrap().0;
        let ops = crate::spin::SpinOperators::new(spin);
        let dim = spin.dim();
        let mut ft = Mat::<c64>::identity(dim, dim);
        for _ in 0..t {
            ft = &f * &ft;
        }
        let a = ft.adjoint() * (&ops.sx * &ft);
        let a = Mat::<c64>::from_fn(dim, dim, |i, j| a[(i, j)] / spin.value());
        let cv = Mat::<c64>::from_fn(dim, 1, |i, _| c.amplitudes()[i]);
        let rho = &cv * cv.adjoint();
        let comm = &a * &rho - &rho * &a;
        let ev = Mat::<c64>::from_fn(dim, 1, |i, _| eig.amplitudes()[i]);
        let out = &comm * &ev;
        (0..dim).map(|i| out[(i, 0)].norm_sqr()).sum()
    }

    #[test]
    fn rank_one_form_matches_dense_commutator() {
        let spin = Spin::new(4.0).unwrap();
        let spec = kicked_top_spectrum(spin, ALPHA, 3.0, Observable::Sx).unwrap();
        let c = coherent_state(spin, PhasePoint::new(0.9, 2.1).unwrap());
        for t in [0, 1, 7, 30] {
            for k in 0..spec.dim() {
                let want = dense_otoc(spin, 3.0, &c, &spec.eigenstate(k), t);
                let got = otoc_point(&spec, k, &c, t);
                assert!((want - got).abs() < 1e-10, "t={t} k={k}: {want} vs {got}");
            }
        }
    }

    #[test]
    fn analytic_average_matches_long_window() {
        // Q^2 form against a brute-force time average; non-resonant spectrum
        let spin = Spin::new(2.0).unwrap();
        let spec = kicked_top_spectrum(spin, ALPHA, 3.0, Observable::Sx).unwrap();
        let grid = PhaseGrid::new(10).unwrap();
        let engine = OtocEngine::new(&spec, grid);
        let numeric = engine.longtime_numeric(0, 40_000);
        let analytic = engine.longtime_analytic(AnalyticForm::Second);
        for (n, a) in numeric.iter().zip(&analytic) {
            assert!((n - a).abs() < 2e-3 * n.abs().max(1e-2), "{n} vs {a}");
        }
        // the two forms differ only by the diagonal term
        let fourth = engine.longtime_analytic(AnalyticForm::Fourth);
        assert!(fourth.iter().zip(&analytic).all(|(f, s)| f >= s));
    }
}
