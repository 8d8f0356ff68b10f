//! Simulation and numerical-analysis toolkit for continuous-state branching
//! processes with competition (CBC-processes).
//!
//! The process is the nonnegative strong solution of a jump SDE driven by a
//! branching mechanism `Ψ(λ) = bλ + cλ² + ∫(e^{−λz} − 1 + λz·1_{z≤1}) μ(dz)`
//! and a nondecreasing competition drift `g`. The crate provides:
//!
//! * [`mechanism`] — branching mechanisms, competition functions, and numeric
//!   checkers for the extinction/fluctuation/growth conditions that govern
//!   quasi-stationary behaviour;
//! * [`cbflow`] — the flow ODE `∂_t v_t(λ) = −Ψ(v_t(λ))`, Laplace transforms,
//!   extinction boundaries and extinction probabilities of the pure branching
//!   process;
//! * [`generator`] — pointwise evaluation of the extended generator and of the
//!   two-dimensional coupling generator, plus Lyapunov / non-explosion /
//!   coupling-inequality certificates verified on grids;
//! * [`simulator`] — jump-adapted Euler paths of the SDE, shared-noise coupled
//!   pairs, hitting times and Monte Carlo Laplace checks;
//! * [`lamperti`] — the associated spectrally one-sided Lévy process, its time
//!   change, and distributional cross-validation against direct simulation;
//! * [`qsd`] — conditional laws, Fleming–Viot particle estimation of the
//!   quasi-stationary distribution, and convergence-rate fitting;
//! * [`config`] — the plain-text `key=value` experiment configuration format
//!   shared with the `cbc-lab` command line driver.

pub mod cbflow;
mod error;
pub mod mechanism;
pub mod numeric;

pub use error::{Error, Result};

/// Standard mechanism set exercised across the unit tests.
#[cfg(test)]
pub(crate) fn test_mechanisms() -> Vec<mechanism::BranchingMechanism> {
    use mechanism::{BranchingMechanism, LevyMeasure, EULER_GAMMA};
    vec![
        BranchingMechanism::feller(1.0, 0.0),
        BranchingMechanism::feller(1.0, 1.0),
        BranchingMechanism::new(0.0, 0.0, LevyMeasure::TruncatedStable { c: 1.0, beta: 1.5 })
            .expect("valid"),
        BranchingMechanism::pure_stable(1.5),
        BranchingMechanism::neveu(1.0, 1.0 - EULER_GAMMA),
        BranchingMechanism::new(
            0.5,
            0.25,
            LevyMeasure::finite_atoms(&[(0.5, 1.0), (2.0, 0.3)]),
        )
        .expect("valid"),
    ]
}
