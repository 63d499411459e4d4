//! High-rate MDS array codes with optimal repair bandwidth.
//!
//! An (n, k, l) array code stores k information columns of l field elements
//! on k systematic nodes plus r = n - k parity nodes. The codes built here
//! can repair any single systematic node by downloading exactly l/r elements
//! from each of the n - 1 survivors — a 1/r fraction of the surviving data,
//! which is information-theoretically optimal — and tolerate any r erasures.
//!
//! Three families are provided:
//! - [`construction::build_general`]: r parities, k = (r+1)m, l = r^m, built
//!   from a randomized eigenvalue search over a caller-chosen field;
//! - [`construction::build_two_parity`]: r = 2, k = 3m, l = 2^m, fully
//!   deterministic over the smallest prime field with q >= 2m + 1;
//! - [`construction::build_optimal_update`]: r = 2, k = 2m, l = 2^m, with
//!   generalized-permutation encoding matrices so each information-symbol
//!   write touches exactly r + 1 stored symbols.
//!
//! [`verify`] checks every claimed property by direct computation, [`codec`]
//! encodes/repairs/reconstructs in-memory arrays, [`transform`] trades
//! update cost for lower repair access via block-diagonal changes of basis,
//! and [`store`] persists encoded data as one file per node.

pub mod codec;
pub mod construction;
pub mod error;
pub mod gf;
pub mod linalg;
pub mod store;
pub mod transform;
pub mod verify;

pub use codec::{encode, reconstruct, repair_systematic, RepairTranscript, StorageArray};
pub use construction::{
    build_general, build_general_auto, build_optimal_update, build_optimal_update_auto,
    build_two_parity, CodeSpec, Family, Repairing,
};
pub use error::{Error, Result};
pub use gf::Field;
pub use linalg::{Matrix, Subspace};
pub use store::NodeStore;
pub use transform::{access_lowering, apply_block_diagonal};
pub use verify::{check_mds, check_subspace_property, compute_metrics, MetricsReport, Rational};
