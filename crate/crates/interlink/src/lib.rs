//! Spectral toolkit for interdependent two-layer networks.
//!
//! Two identical layers are joined by interlinks into a supra-Laplacian
//! `Q = Q_A + alpha * Q_B`. This crate builds such systems from random
//! graph models or edge lists, computes their algebraic connectivity and
//! Fiedler partitions, evaluates the closed-form mean-field and
//! perturbation-theory predictions, and runs sweep experiments over the
//! interlink count that expose the partition phase transition.
//!
//! Entry points:
//! - [`graph::Graph`] and [`gen::GenSpec`] for layers,
//! - [`coupling::CoupledSystem`] for the supra-Laplacian,
//! - [`spectral::fiedler_pair`] / [`spectral::full_spectrum`] for spectra,
//! - [`theory`] for predictions, [`metrics`] for partition quality,
//! - [`sweep::run_sweep`] for experiments.

pub mod cli;
pub mod coupling;
pub mod error;
pub mod gen;
pub mod graph;
pub mod matrix;
pub mod metrics;
pub mod rng;
pub mod spectral;
pub mod sweep;
pub mod theory;

pub use coupling::{CoupledSystem, InterlinkSequence, InterlinkSet, Strategy};
pub use error::{Error, Result};
pub use gen::{GenSpec, Model};
pub use graph::Graph;
pub use matrix::SymMatrix;
pub use metrics::{partition_report, PartitionReport};
pub use spectral::{
    fiedler_pair, fiedler_pair_with, full_spectrum, simulate_diffusion, Solver, SpectralResult,
    Spectrum,
};
pub use sweep::{aggregate, detect_transition, run_sweep, SweepConfig, SweepRecord};
pub use theory::{
    meanfield_diagonal, meanfield_general, perturbation_estimate, MeanFieldPrediction,
    PerturbationEstimate,
};
