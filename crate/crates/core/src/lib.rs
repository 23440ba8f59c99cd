//! Exact verification of the partition identity
//! `sum_{Π_p} prod_j (sum_{I_j} x)^(|I_j|-1) = C(m-1,p-1) (sum x)^(m-p)`
//! and of closed-form counts of rooted forests on families of vertex sets,
//! checked against exhaustive enumeration.

pub mod algebra;
pub mod closed_forms;
pub mod error;
pub mod forest;
pub mod identity;
pub mod partitions;
pub mod report;

pub use error::{Error, Result};
