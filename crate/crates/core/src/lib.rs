// Copyright 2026 The chiral-core Authors
// SPDX-License-Identifier: Apache-2.0

//! Enantiomer-selective population transfer on a two-qubit embedding of a
//! three-level chiral molecule: pulse schedules, exact evolution, Trotterized
//! circuits and the rigid-rotor bookkeeping behind them.

pub mod circuit;
pub mod counts;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod molecule;
pub mod propagator;
pub mod pulse;
pub mod qasm;
pub mod quad;
pub mod scenario;

pub use error::{Error, Result};
pub use linalg::{populations, Matrix4c, Statevector, C64};
pub use pulse::{Discretization, DiscretizedSchedule, Handedness, Protocol, Schedule};
pub use molecule::{MoleculeSpec, RotorConstants, TransitionTable};
pub use propagator::{Evolution, PopulationTrace};
pub use scenario::{run_scenario, DiscriminationReport, ScenarioConfig};
