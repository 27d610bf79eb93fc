//! Quantum kicked top: classification of Floquet eigenstates by their
//! Husimi overlap with the classical chaotic sea, and their microcanonical
//! out-of-time-order correlators.

pub mod analysis;
pub mod classical;
pub mod error;
pub mod floquet;
pub mod grid;
pub mod husimi;
pub mod otoc;
pub mod spin;
mod sweep;

pub use faer::{c64, Mat};

pub use analysis::{correlation_sweep, histogram, pearson, CorrelationReport, Histogram};
pub use classical::{
    chaotic_mask, classical_step, poincare_section, to_canonical, ChaoticMask, ClassicalState, KickedTopMap,
    PoincareSection, SeedChoice,
};
pub use error::{Error, Result};
pub use floquet::{build_floquet, floquet_spectrum, kicked_top_spectrum, FloquetSpectrum, Observable, UnitaryMatrix};
pub use grid::{coherent_grid, CoherentGrid, PhaseGrid};
pub use husimi::{classify, husimi_function, husimi_sweep, overlap_index, HusimiField, HusimiSweep, Label, OverlapIndex, Thresholds};
pub use otoc::{
    growth_rate, growth_time, longtime_avg_analytic, longtime_avg_numeric, otoc_field, otoc_point, otoc_upper_bound,
    phase_average, profiles, required_times, AnalyticForm, EigenstateProfile, OtocEngine, OtocField, OtocSeries, SeriesTable,
};
pub use spin::{coherent_state, coherent_state_oracle, PhasePoint, Spin, SpinOperators, StateVector};
