//! Shared fixtures for the benchmarks.

use kicked_top::{kicked_top_spectrum, FloquetSpectrum, Observable, Spin};

pub const ALPHA: f64 = 13.0 * std::f64::consts::PI / 19.0;
pub const KAPPA: f64 = 3.0;

pub fn spectrum(s: f64) -> FloquetSpectrum {
    kicked_top_spectrum(Spin::new(s).expect("valid spin"), ALPHA, KAPPA, Observable::Sx).expect("spectrum")
}
