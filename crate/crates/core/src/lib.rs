//! Counting framework for composita of low-degree number fields with odd
//! nilpotent extensions: permutation indices, density invariants, discriminant
//! bounds, and field-counting pipelines with asymptotic-slope diagnostics.

pub mod arith;
pub mod count;
pub mod cubic;
pub mod cyclic;
pub mod disc;
pub mod error;
pub mod fields;
pub mod group;
pub mod kp;
pub mod malle;
pub mod perm;
