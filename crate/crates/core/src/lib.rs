//! Decoherence-free subspaces of Pauli-subgroup error algebras.
//!
//! The crate closes subgroups of the Pauli group from error generators, lists
//! the one-dimensional characters of Abelian subgroups, builds the matching
//! projectors and state bases, and checks them against random Kraus channels
//! drawn from the subgroup's group algebra.

pub mod channel;
pub mod dense;
pub mod dfs;
pub mod error;
pub mod pauli;
pub mod report;
pub mod sampling;
pub mod subgroup;

pub use channel::{DensityMatrix, KrausSet};
pub use dense::{DenseOperator, Ket, DEFAULT_DENSE_LIMIT};
pub use dfs::{DfsBasis, IrrepProjector, PhaseClass, VerificationReport};
pub use error::{DfsError, Result};
pub use pauli::{parse_pauli, Commutation, PauliElement};
pub use report::{AnalysisReport, ChannelReport, Options};
pub use subgroup::{Character, PauliSubgroup, Reducibility, DEFAULT_ORDER_CAP};
