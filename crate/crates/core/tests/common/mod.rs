//! Dense reference implementations shared by the integration tests.
#![allow(dead_code)]

use kicked_top::{c64, Mat, Spin, StateVector};
use faer::Side;

pub const ALPHA: f64 = 13.0 * std::f64::consts::PI / 19.0;

/// `S_x` from the ladder elements `sqrt(S(S+1) - m(m+1))`, basis `m = S..-S`.
pub fn dense_sx(spin: Spin) -> Mat<c64> {
    let s = spin.value();
    let dim = spin.dim();
    Mat::from_fn(dim, dim, |a, b| {
        let (ma, mb) = (s - a as f64, s - b as f64);
        if (ma - mb - 1.0).abs() < 0.5 || (mb - ma - 1.0).abs() < 0.5 {
            let lo = ma.min(mb);
            c64::new(0.5 * (s * (s + 1.0) - lo * (lo + 1.0)).sqrt(), 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    })
}

/// `exp(-i (kappa / 2S) S_z^2) exp(-i alpha S_x)` through the spectral
/// decomposition of `S_x`.
pub fn dense_floquet(spin: Spin, alpha: f64, kappa: f64) -> Mat<c64> {
    let sx = dense_sx(spin);
    let evd = sx.self_adjoint_eigen(Side::Lower).unwrap();
    let u = evd.U();
    let lam = evd.S().column_vector();
    let dim = spin.dim();
    let phased = Mat::from_fn(dim, dim, |a, b| {
        let (sn, cs) = (-alpha * lam[b].re).sin_cos();
        u[(a, b)] * c64::new(cs, sn)
    });
    let rot = &phased * u.adjoint();
    let s = spin.value();
    Mat::from_fn(dim, dim, |a, b| {
        let m = s - a as f64;
        let (sn, cs) = (-kappa * m * m / (2.0 * s)).sin_cos();
        c64::new(cs, sn) * rot[(a, b)]
    })
}

pub fn column(v: &StateVector) -> Mat<c64> {
    Mat::from_fn(v.dim(), 1, |i, _| v.amplitudes()[i])
}

pub fn power(f: &Mat<c64>, t: u32) -> Mat<c64> {
    let mut out = Mat::<c64>::identity(f.nrows(), f.ncols());
    for _ in 0..t {
        out = f * &out;
    }
    out
}

/// `s_x(t) = F^-t (S_x / S) F^t`
pub fn heisenberg_sx(spin: Spin, f: &Mat<c64>, t: u32) -> Mat<c64> {
    let ft = power(f, t);
    let sx = dense_sx(spin);
    let scaled = Mat::from_fn(sx.nrows(), sx.ncols(), |a, b| sx[(a, b)] / spin.value());
    ft.adjoint() * (&scaled * &ft)
}

/// `O = [s_x(t), |c><c|]`
pub fn commutator(a_t: &Mat<c64>, c: &StateVector) -> Mat<c64> {
    let cv = column(c);
    let rho = &cv * cv.adjoint();
    a_t * &rho - &rho * a_t
}

/// `<e|O^dag O|e>`
pub fn expectation_oo(o: &Mat<c64>, e: &StateVector) -> f64 {
    let v = o * column(e);
    (0..v.nrows()).map(|i| v[(i, 0)].norm_sqr()).sum()
}

pub fn max_abs(m: &Mat<c64>) -> f64 {
    let mut out = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max(m[(i, j)].norm());
        }
    }
    out
}
