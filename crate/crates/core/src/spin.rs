//! Spin-S angular momentum matrices and SU(2) coherent states.
//!
//! Every matrix and state vector is expressed in the `S_z` eigenbasis ordered
//! `m = S, S-1, ..., -S`, so basis index `i` carries `m = S - i` and `|S,S>`
//! is the first basis vector.

use std::f64::consts::PI;

use faer::{c64, Mat, Side};

use crate::error::{Error, Result};

/// A spin magnitude `S` with `2S` a positive integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub fn new(s: f64) -> Result<Self> {
        let twice = 2.0 * s;
        if !s.is_finite() || s <= 0.0 || (twice - twice.round()).abs() > 1e-9 {
            return Err(Error::InvalidSpin(s));
        }
        Ok(Self {
            twice: twice.round() as u32,
        })
    }

    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(Error::InvalidSpin(0.0));
        }
        Ok(Self { twice })
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    /// Hilbert space dimension `2S + 1`.
    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }

    /// Magnetic quantum number of basis index `i`.
    pub fn m(self, i: usize) -> f64 {
        self.value() - i as f64
    }
}

impl std::fmt::Display for Spin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Dense `S_x`, `S_y`, `S_z` in dimension `2S + 1` (units of hbar).
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub spin: Spin,
    pub sx: Mat<c64>,
    pub sy: Mat<c64>,
    pub sz: Mat<c64>,
}

impl SpinOperators {
    /// Builds the operators from the ladder matrix elements
    /// `sqrt(S(S+1) - m(m+1))`.
    pub fn new(spin: Spin) -> Self {
        let dim = spin.dim();
        let raise = raising_elements(spin);
        let mut sx = Mat::<c64>::zeros(dim, dim);
        let mut sy = Mat::<c64>::zeros(dim, dim);
        let mut sz = Mat::<c64>::zeros(dim, dim);
        for i in 0..dim {
            sz[(i, i)] = c64::new(spin.m(i), 0.0);
        }
        // S+ takes index i to i - 1.
        for i in 1..dim {
            let a = raise[i];
            sx[(i - 1, i)] = c64::new(0.5 * a, 0.0);
            sx[(i, i - 1)] = c64::new(0.5 * a, 0.0);
            // S_y = (S+ - S-) / 2i
            sy[(i - 1, i)] = c64::new(0.0, -0.5 * a);
            sy[(i, i - 1)] = c64::new(0.0, 0.5 * a);
        }
        Self { spin, sx, sy, sz }
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }
}

/// `<m+1|S+|m>` for the basis vector at index `i` (zero at `i = 0`).
fn raising_elements(spin: Spin) -> Vec<f64> {
    let s = spin.value();
    (0..spin.dim())
        .map(|i| {
            let m = spin.m(i);
            (s * (s + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
        })
        .collect()
}

/// Real symmetric `S_x` (the ladder elements are real in this basis).
pub fn sx_real(spin: Spin) -> Mat<f64> {
    let dim = spin.dim();
    let raise = raising_elements(spin);
    let mut sx = Mat::<f64>::zeros(dim, dim);
    for i in 1..dim {
        sx[(i - 1, i)] = 0.5 * raise[i];
        sx[(i, i - 1)] = 0.5 * raise[i];
    }
    sx
}

/// A normalized state in the `S_z` basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(Vec<c64>);

impl StateVector {
    pub fn new(amplitudes: Vec<c64>) -> Self {
        Self(amplitudes)
    }

    /// The basis state at index `i` (`m = S - i`).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![c64::new(0.0, 0.0); dim];
        v[i] = c64::new(1.0, 0.0);
        Self(v)
    }

    pub fn amplitudes(&self) -> &[c64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<c64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> c64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        for a in &mut self.0 {
            *a /= n;
        }
        self
    }
}

/// A point on the sphere: polar angle in `[0, pi]`, azimuth in `[-pi, pi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint {
    pub theta: f64,
    pub phi: f64,
}

impl PhasePoint {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(-PI..=PI).contains(&phi) {
            return Err(Error::InvalidArgument(format!(
                "phase point out of range: theta = {theta}, phi = {phi}"
            )));
        }
        Ok(Self { theta, phi })
    }

    /// From canonical coordinates `(phi, cos theta)`.
    pub fn from_canonical(phi: f64, cos_theta: f64) -> Result<Self> {
        Self::new(cos_theta.clamp(-1.0, 1.0).acos(), phi)
    }

    pub fn cos_theta(&self) -> f64 {
        self.theta.cos()
    }

    /// Unit vector `(sin th cos ph, sin th sin ph, cos th)`.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Precomputed `0.5 * ln binomial(2S, i)` so coherent amplitudes never
/// overflow, even where `binomial(2S, S - m)` exceeds `f64::MAX`.
#[derive(Clone, Debug)]
pub struct CoherentBasis {
    spin: Spin,
    half_ln_binom: Vec<f64>,
    /// `sqrt((2S - i + 1) / i)`, the binomial factor between indices `i - 1` and `i`.
    step_ratio: Vec<f64>,
}

/// Phases are recomputed exactly every this many recurrence steps.
const PHASE_RESYNC: usize = 32;

impl CoherentBasis {
    pub fn new(spin: Spin) -> Self {
        let n = spin.twice() as usize;
        let mut half_ln_binom = Vec::with_capacity(n + 1);
        let mut step_ratio = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        half_ln_binom.push(0.0);
        step_ratio.push(0.0);
        for j in 1..=n {
            acc += ((n - j + 1) as f64).ln() - (j as f64).ln();
            half_ln_binom.push(0.5 * acc);
            step_ratio.push(((n - j + 1) as f64 / j as f64).sqrt());
        }
        Self {
            spin,
            half_ln_binom,
            step_ratio,
        }
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    /// Writes `|theta, phi>` into `out` (length `2S + 1`).
    ///
    /// Amplitude on index `i` (`S - m = i`) is
    /// `sqrt(C(2S, i)) cos(theta/2)^(2S-i) sin(theta/2)^i e^(i i phi)`.
    /// The modulus is evaluated in log space at its peak and propagated
    /// outwards by ratios, so it can only underflow.
    pub fn fill(&self, p: PhasePoint, out: &mut [c64]) {
        let n = self.spin.twice() as usize;
        debug_assert_eq!(out.len(), n + 1);
        let (s_half, c_half) = (0.5 * p.theta).sin_cos();
        let (s_half, c_half) = (s_half.abs(), c_half.abs());
        let peak = ((n as f64 * s_half * s_half).round() as usize).min(n);
        let log_peak = self.half_ln_binom[peak] + pow_log(n - peak, c_half.ln()) + pow_log(peak, s_half.ln());
        let tan = s_half / c_half;

        let mut mag = log_peak.exp();
        out[peak] = c64::new(mag, 0.0);
        for i in (0..peak).rev() {
            mag /= self.step_ratio[i + 1] * tan;
            out[i] = c64::new(mag, 0.0);
        }
        mag = out[peak].re;
        for i in peak + 1..=n {
            mag *= self.step_ratio[i] * tan;
            out[i] = c64::new(mag, 0.0);
        }

        let (sin, cos) = p.phi.sin_cos();
        let step = c64::new(cos, sin);
        let mut phase = c64::new(1.0, 0.0);
        for (i, slot) in out.iter_mut().enumerate() {
            if i % PHASE_RESYNC == 0 {
                let (sin, cos) = (i as f64 * p.phi).sin_cos();
                phase = c64::new(cos, sin);
            }
            *slot *= phase;
            phase *= step;
        }
    }

    pub fn state(&self, p: PhasePoint) -> StateVector {
        let mut v = vec![c64::new(0.0, 0.0); self.spin.dim()];
        self.fill(p, &mut v);
        StateVector(v)
    }
}

fn pow_log(exponent: usize, ln_base: f64) -> f64 {
    if exponent == 0 {
        0.0
    } else {
        exponent as f64 * ln_base
    }
}

/// `|theta, phi> = exp[i theta (S_x sin phi - S_y cos phi)] |S,S>` in closed form.
pub fn coherent_state(spin: Spin, p: PhasePoint) -> StateVector {
    CoherentBasis::new(spin).state(p)
}

/// The same rotation evaluated by eigendecomposition of the Hermitian
/// generator. Dense and slow; ground truth for [`coherent_state`].
pub fn coherent_state_oracle(spin: Spin, p: PhasePoint) -> Result<StateVector> {
    let ops = SpinOperators::new(spin);
    let dim = spin.dim();
    let (sp, cp) = p.phi.sin_cos();
    let generator = Mat::<c64>::from_fn(dim, dim, |i, j| ops.sx[(i, j)] * sp - ops.sy[(i, j)] * cp);
    let evd = generator
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let u = evd.U();
    let lambda = evd.S().column_vector();
    // exp(i theta G) e_0 = U diag(e^{i theta l}) U^dag e_0
    let mut out = vec![c64::new(0.0, 0.0); dim];
    for j in 0..dim {
        let l = lambda[j].re;
        let coeff = c64::new((p.theta * l).cos(), (p.theta * l).sin()) * u[(0, j)].conj();
        for (i, o) in out.iter_mut().enumerate() {
            *o += u[(i, j)] * coeff;
        }
    }
    Ok(StateVector(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(m: &Mat<c64>) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                worst = worst.max(m[(i, j)].norm());
            }
        }
        worst
    }

    #[test]
    fn rejects_bad_spin() {
        assert!(Spin::new(0.0).is_err());
        assert!(Spin::new(-1.0).is_err());
        assert!(Spin::new(0.3).is_err());
        assert!(Spin::new(f64::NAN).is_err());
        assert_eq!(Spin::new(1.5).unwrap().dim(), 4);
    }

    #[test]
    fn spin_half_is_pauli_over_two() {
        let ops = SpinOperators::new(Spin::new(0.5).unwrap());
        assert_eq!(ops.sx[(0, 1)], c64::new(0.5, 0.0));
        assert_eq!(ops.sx[(1, 0)], c64::new(0.5, 0.0));
        assert_eq!(ops.sx[(0, 0)], c64::new(0.0, 0.0));
        assert_eq!(ops.sz[(0, 0)], c64::new(0.5, 0.0));
        assert_eq!(ops.sz[(1, 1)], c64::new(-0.5, 0.0));
    }

    #[test]
    fn spin_one_sz() {
        let ops = SpinOperators::new(Spin::new(1.0).unwrap());
        let diag: Vec<f64> = (0..3).map(|i| ops.sz[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 0.0, -1.0]);
    }

    #[test]
    fn commutators_and_casimir() {
        for s in [0.5, 1.0, 5.0, 50.0, 150.0] {
            let spin = Spin::new(s).unwrap();
            let ops = SpinOperators::new(spin);
            let dim = spin.dim();
            let i_unit = c64::new(0.0, 1.0);
            let comm = &ops.sx * &ops.sy - &ops.sy * &ops.sx;
            let d = Mat::<c64>::from_fn(dim, dim, |a, b| comm[(a, b)] - i_unit * ops.sz[(a, b)]);
            let tol = 1e-14 * s * s + 1e-13;
            assert!(max_abs(&d) < tol, "[sx,sy] S={s}: {}", max_abs(&d));
            let comm = &ops.sy * &ops.sz - &ops.sz * &ops.sy;
            let d = Mat::<c64>::from_fn(dim, dim, |a, b| comm[(a, b)] - i_unit * ops.sx[(a, b)]);
            assert!(max_abs(&d) < tol, "[sy,sz] S={s}");
            let casimir = &ops.sx * &ops.sx + &ops.sy * &ops.sy + &ops.sz * &ops.sz;
            let expect = s * (s + 1.0);
            let d = Mat::<c64>::from_fn(dim, dim, |a, b| {
                casimir[(a, b)] - if a == b { c64::new(expect, 0.0) } else { c64::new(0.0, 0.0) }
            });
            assert!(max_abs(&d) < 10.0 * tol, "casimir S={s}: {}", max_abs(&d));
            let herm = Mat::<c64>::from_fn(dim, dim, |a, b| ops.sy[(a, b)] - ops.sy[(b, a)].conj());
            assert_eq!(max_abs(&herm), 0.0);
        }
    }

    #[test]
    fn coherent_state_at_north_pole_is_top_state() {
        for twice in [1, 2, 7, 20] {
            let spin = Spin::from_twice(twice).unwrap();
            for phi in [-2.0, 0.0, 1.3] {
                let v = coherent_state(spin, PhasePoint::new(0.0, phi).unwrap());
                assert!((v.amplitudes()[0] - c64::new(1.0, 0.0)).norm() < 1e-15);
                assert!(v.amplitudes()[1..].iter().all(|a| a.norm() < 1e-15));
            }
        }
    }

    #[test]
    fn antipodal_spin_half() {
        let v = coherent_state(Spin::new(0.5).unwrap(), PhasePoint::new(PI, 0.0).unwrap());
        assert!(v.amplitudes()[0].norm() < 1e-15);
        assert!((v.amplitudes()[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_oracle() {
        let spin = Spin::new(4.0).unwrap();
        let p = PhasePoint::new(1.1, 2.3).unwrap();
        let a = coherent_state(spin, p);
        let b = coherent_state_oracle(spin, p).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn oracle_trivial_cases() {
        let v = coherent_state_oracle(Spin::new(0.5).unwrap(), PhasePoint::new(0.0, 0.0).unwrap()).unwrap();
        assert!((v.amplitudes()[0] - c64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(v.amplitudes()[1].norm() < 1e-14);
        let v = coherent_state_oracle(Spin::new(1.0).unwrap(), PhasePoint::new(PI / 2.0, 0.0).unwrap()).unwrap();
        assert!((v.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn large_spin_does_not_overflow() {
        let spin = Spin::new(250.0).unwrap();
        let v = coherent_state(spin, PhasePoint::new(1.7, -0.4).unwrap());
        assert!(v.amplitudes().iter().all(|a| a.re.is_finite() && a.im.is_finite()));
        assert!((v.norm_sqr() - 1.0).abs() < 1e-12);
        let v = coherent_state(spin, PhasePoint::new(PI, 0.4).unwrap());
        assert!((v.amplitudes()[500].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expectation_points_along_unit_vector() {
        let spin = Spin::new(3.0).unwrap();
        let ops = SpinOperators::new(spin);
        let p = PhasePoint::new(0.9, -2.1).unwrap();
        let v = coherent_state(spin, p);
        let expect = |m: &Mat<c64>| {
            let mut acc = c64::new(0.0, 0.0);
            for i in 0..spin.dim() {
                for j in 0..spin.dim() {
                    acc += v.amplitudes()[i].conj() * m[(i, j)] * v.amplitudes()[j];
                }
            }
            acc.re / spin.value()
        };
        let n = p.unit_vector();
        assert!((expect(&ops.sx) - n[0]).abs() < 1e-12);
        assert!((expect(&ops.sy) - n[1]).abs() < 1e-12);
        assert!((expect(&ops.sz) - n[2]).abs() < 1e-12);
    }
}
