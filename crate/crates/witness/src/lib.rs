//! Finite certificates and bounded searches for the density-like,
//! strongly-density-like and equi-density-like conditions and for the
//! separation conditions built on `K_{s,F}`.
//!
//! Everything here is finite-level evidence. A certificate refutes the
//! condition for one family at one ε; a passing check never proves it.

pub mod cert;
pub mod error;
pub mod extract;
pub mod ksf;
pub mod nongdi;
pub mod obstruction;

pub use error::WitnessError;
pub use extract::{check_step, greedy_extract, SelectionStep, SelectionTrace, Thinning};
pub use ksf::{ksf_condition_check, ksf_enumerate, ksf_member, Variant, Violation};
pub use nongdi::{nongdi_witness, NonGdiWitness};
pub use obstruction::{
    equi_dl_scan, obstruction_check, sdl_check, search_obstruction, CheckOutcome, FailureWitness,
    ObstructionCertificate, SdlOutcome,
};
