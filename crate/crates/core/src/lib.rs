//! Simulation of a two-qubit, one-coupler circuit of voltage-tunable
//! transmons (gatemons), plus the dielectric loss budget of a single qubit.
//!
//! * [`device_params`]: charging energy, transmon frequency, anharmonicity.
//! * [`fock`]: the truncated-Fock Hamiltonian of coupled anharmonic modes.
//! * [`spectrum`]: diagonalization, dressed-state labels, ZZ and susceptibility.
//! * [`coupler`]: ZZ sweeps and the zero-ZZ idle point.
//! * [`dephasing`]: Gaussian coupler-noise ensembles and the resulting T2.
//! * [`loss`]: participation-weighted T1/Q budgets and the TSV/planar ratio.
//! * [`cli`]: the `gatemon-sim` command-line front end.
//!
//! Frequencies are ordinary (not angular) and in MHz throughout, except in
//! [`loss`], which takes GHz and works internally with ω = 2πf.

pub mod cli;
pub mod coupler;
pub mod curve;
pub mod dephasing;
pub mod device_params;
pub mod error;
pub mod fock;
pub mod loss;
pub mod presets;
pub mod root;
pub mod spectrum;

pub use error::{Error, Result};
