//! Builders for the named constructions: families of disjoint sets, DL
//! submeasures, support normalization and blockization, the refinement for
//! condition D_strong, and the worked counterexamples.

pub mod ad;
pub mod basic;
pub mod dl;
pub mod examples;
pub mod family;
pub mod normalize;

pub use idealkit_core::pairing::{pair_decode, pair_encode};

pub use ad::{ad_family, build_psi_a, grid_lift, mz_partition, transversal, AdFamily, MzPartition};
pub use basic::{dirac_examples, erdos_ulam, hat, nonempty_indicator, qmix, simple_density};
pub use dl::{dl_build, interval_dl, DlParts};
pub use examples::{build_capped_example, build_nu_example, capped_rows, capped_weight, NuExample};
pub use family::{DisjointFamily, Flavor};
pub use normalize::{blockize, dstrong_refine, normalize_supports, pad_supports, Padding, ScheduleEntry};
