//! Exact symmetric-group character evaluation and the counting reductions
//! that connect characters to ordered set partitions, matchings and Boolean
//! circuits.
//!
//! Module map:
//!
//! * [`combinat`]: partitions, compositions, permutations, class sizes
//! * [`setpartition`]: exact counts of ordered set partitions `P(a, b)`
//! * [`characters`]: Murnaghan–Nakayama and Frobenius-formula evaluators
//! * [`sat`]: circuits, CNF, one-in-three SAT and their parsimonious reductions
//! * [`matchings`]: 3D/4D matching counts, padding and the join construction
//! * [`pipeline`]: set-partition gadgets and character-instance constructions
//! * [`verify`]: stage-by-stage verification reports

pub mod characters;
pub mod combinat;
pub mod error;
pub mod matchings;
pub mod par;
pub mod pipeline;
pub mod sat;
pub mod setpartition;
pub mod verify;

pub use error::{Error, Result};
