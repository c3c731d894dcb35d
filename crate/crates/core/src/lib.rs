//! Discrete-time quantum walks with many indistinguishable bosonic walkers.
//!
//! The crate is split by concern:
//!
//! - [`graph`]: walk substrates with ordered neighbourhoods, the n-walker
//!   virtual graph, and phase-defect patterns on it.
//! - [`fock`]: sparse bosonic Fock states, linear mode maps acting on them,
//!   and a Ryser permanent oracle for transition amplitudes.
//! - [`walk`]: coin/step/defect evolution, measurement distributions, and a
//!   single-walker simulator on the virtual graph.
//! - [`optics`]: linear-optics networks, triangular (Reck) decomposition,
//!   compilation between walks and networks, and CPHASE commutation.
//!
//! Mode maps follow the creation-operator convention used throughout:
//! a matrix `U` sends `a_i†` to `Σ_j U[i][j] a_j†`, so applying `U1` and then
//! `U2` composes to the product `U1 · U2`.

pub mod error;
pub mod fock;
pub mod graph;
pub mod linalg;
pub mod optics;
pub mod walk;

pub use error::{Error, Result};
pub use fock::{FockState, ModeUnitary, OccupationVector};
pub use graph::{DefectPattern, Graph, Mode, Multiset, VirtualGraph};
pub use linalg::Matrix;
pub use optics::{Element, OpticalNetwork};
pub use walk::{CoinAssignment, DefectOperator, DefectTiming, WalkSchedule, WalkStep};

pub use num_complex::Complex64;
