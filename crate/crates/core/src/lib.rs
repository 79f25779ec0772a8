//! Commutative Moufang loops, finite and structured.
//!
//! * [`loops`], [`catalog`], [`identities`]: finite loops as Cayley tables,
//!   built-in examples, and the Moufang identity with its associator calculus.
//! * [`subloops`]: generation, normality, enumeration, layers, cogenerators.
//! * [`structure`]: center, upper central series, primary decomposition, heights.
//! * [`multgroup`]: multiplication and inner mapping groups as permutation groups.
//! * [`mincond`]: exact arithmetic in `D × C`, where `D` is a finite direct sum of
//!   quasicyclic groups and `C` a finite CML.

pub mod catalog;
pub mod error;
pub mod identities;
pub mod loops;
pub mod mincond;
pub mod multgroup;
pub mod perm;
pub mod set;
pub mod structure;
pub mod subloops;

pub use error::{Error, Result};
pub use loops::CayleyLoop;
pub use perm::{Perm, PermGroup};
pub use set::ElementSet;
pub use subloops::SubloopSet;

/// Seed used by randomized checks unless another is given ("CML" in ASCII).
pub const DEFAULT_SEED: u64 = 0x43_4D_4C;
