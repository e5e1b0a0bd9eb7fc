//! Nonpathological envelopes of submeasures on small finite supports.
//!
//! The envelope of `φ` at `A` is the largest `η(A)` over finitely additive
//! `η ≤ φ`. It is found by a floating point LP and then certified by an
//! exactly feasible rational witness.

pub mod envelope;
pub mod error;
pub mod lp;
pub mod objective;
pub mod scan;
pub mod transfer;

pub use envelope::{envelope, EnvelopeProblem, PathologyReport, DEFAULT_SUPPORT_CAP};
pub use error::PathologyError;
pub use lp::{solve_packing, LpError, LpSolution};
pub use objective::{three_point_table, Objective, SubsetTable};
pub use scan::{pathology_scan, sample_masks, ScanReport};
pub use transfer::{hat_measure_transfer, Transfer};
