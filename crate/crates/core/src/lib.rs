//! Invariants of the coadjoint representation for low-dimensional real Lie
//! algebras: exact structure constants, generic coadjoint rank, a small
//! expression language for candidate invariants, and a numerical verifier.

pub mod algebra;
pub mod catalog;
pub mod cli;
pub mod coadjoint;
pub mod expr;
pub mod families;
pub mod linalg;
pub mod rational;
pub mod report;
pub mod verify;
