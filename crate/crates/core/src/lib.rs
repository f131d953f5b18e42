//! Key-rate lower bounds for a BB84-like protocol attacked with state-dependent
//! quantum cloning machines.
//!
//! The crate is organised bottom-up:
//!
//! - [`qstate`]: dense complex linear algebra and density-operator calculus
//!   (fidelity, trace and Hilbert-Schmidt distances, partial trace).
//! - [`circuits`]: the ideal two-qubit state-preparation circuit and the
//!   Z-basis signal pair.
//! - [`cloners`]: Wootters-Zurek and modified Buzek-Hillery cloners as explicit
//!   isometries, with closed-form fidelities.
//! - [`bounds`]: binary entropy, the cloning-bound key rate, its lower bounds,
//!   the error-rate threshold and the validity windows.
//! - [`distances`]: cloning-efficiency bounds and the efficiency tables.
//! - [`protocol`]: a seeded Monte Carlo run of the protocol with an optional
//!   intercept-clone-resend eavesdropper.
//!
//! Subsystem ordering is row-major everywhere: in a tensor product `A ⊗ B` the
//! index of `A` varies slowest.

pub mod bounds;
pub mod circuits;
pub mod cloners;
pub mod distances;
mod error;
pub mod protocol;
pub mod qstate;
pub mod roots;
pub mod tolerance;

pub use bounds::{KeyRateReport, Window};
pub use cloners::{CloneOutput, CloningMachine};
pub use distances::{EfficiencyRow, HalfOpen};
pub use error::{Error, Result};
pub use protocol::{Decision, EveConfig, ProtocolConfig, ProtocolOutcome};
pub use qstate::{DensityOperator, PureState};
