//! Exact engine over enumerated state spaces.

pub mod chain;
pub mod commute;
pub mod eigen;
pub mod mixing;
pub mod stationary;

pub use chain::{build_chain, chamber_notation_order, recurrent_class, RecurrentClass, Restrict, TransitionMatrix};
pub use commute::{commute_terms, commute_time_linear, commute_time_simple, hitting_times_to, CommuteTerm, SpectralHitting};
pub use eigen::{
    compare_spectra, compound_spectrum, eigenvalues_simple, numeric_eigenvalues, phi, phi_ratio, psi,
    left_eigen_residual, SpectrumComparison,
};
pub use mixing::{
    brown_bound, intersection_mixing_bound, mixing_bound_compound, mixing_bound_simple, moran_complete_mixing_bound,
    moran_mixing_bound, simple_tv_bound, tv_decay, tv_distance,
};
pub use stationary::{
    detailed_balance_residual, intersection_stationary, stationary_closed_form, stationary_residual, stationary_solve,
};

/// Default cap on enumerated states.
pub const DEFAULT_STATE_CAP: usize = 1 << 20;

/// Largest matrix handed to dense eigensolves and linear solves.
pub const DENSE_CAP: usize = 4096;

pub(crate) fn check_dense(n: usize) -> crate::Result<()> {
    if n > DENSE_CAP {
        return Err(crate::Error::CapExceeded { what: "states for a dense solve", needed: n as u128, cap: DENSE_CAP as u128 });
    }
    Ok(())
}
