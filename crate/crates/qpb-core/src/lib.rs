//! Exact-arithmetic toolkit for differential calculi, connections and
//! cohomology on finite quantum principal bundles.

pub mod bicross;
pub mod builtins;
pub mod bundle;
pub mod calculus;
pub mod cli;
pub mod discrete;
pub mod hopf;
pub mod linalg;
pub mod qpoly;
pub mod report;
pub mod scalars;
pub mod tensor;
