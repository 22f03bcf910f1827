//! Simulation and verification toolkit for the parity-check magic-state
//! distillation protocol.

pub mod analytic;
pub mod circuit;
pub mod gate;
pub mod linalg;
pub mod poly;
pub mod protocol;
pub mod statevec;
pub mod triortho;
