//! Exact-arithmetic invariants of group actions on multitrees, computed
//! from finite quotient data: integer Smith normal form, boundary
//! K-theory formulas, dynamical deciders, set-family combinatorics, and
//! brute-force lift-tree oracles that cross-check the formulas.
//!
//! Everything here is pure and deterministic: ids iterate in sorted
//! order, arithmetic is arbitrary precision, and seeded suites reproduce
//! byte for byte.

pub mod digraph;
pub mod dynamics;
pub mod ktheory;
pub mod lifttree;
pub mod oracle;
pub mod presentation;
pub mod setfamily;
pub mod zmatrix;
