//! Mode-space simulator for dark-state-polariton (DSP) quantum memory in
//! arrays of Λ-type atomic ensembles.
//!
//! A probe photon coupled to several ensembles, each dressed by a classical
//! control field, admits dark superpositions of the photon mode and the
//! collective spin waves. Ramping the controls off rotates those dark modes
//! from photonic to atomic character, storing the probe state — including
//! cat-state superpositions, which become ensemble entanglement.
//!
//! Everything is built on the low-excitation bosonization: collective
//! excitations are bosonic modes, the interaction Hamiltonian is quadratic,
//! and the evolution acts exactly as a linear map on mode amplitudes. The
//! [`fock`] module provides an independent truncated-Fock-space oracle used
//! to cross-check every closed form against brute force.
//!
//! Module map:
//! - [`system`]: physical configuration and the time-dependent mode Hamiltonian
//! - [`schedule`]: control-field profiles Ω(t) and the storage protocol
//! - [`polariton`]: mixing angles, closed-form DSP vectors, dark subspaces
//! - [`propagator`]: exact-in-mode-space time evolution
//! - [`catstate`]: coherent-branch superpositions, entropies, negativity
//! - [`fock`]: truncated-Fock-space verification oracle
//! - [`scenario`]: scenario runner, JSON config ingestion, CSV/JSON reports

pub mod catstate;
pub mod config;
pub mod error;
pub mod fock;
mod par;
pub mod polariton;
pub mod propagator;
pub mod scenario;
pub mod schedule;
pub mod system;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
