//! Exact computation of U(2) Nekrasov partition functions with one
//! fundamental hypermultiplet, their blow-up and Seiberg-Witten curve data,
//! and the residue calculus that turns them into Donaldson invariants.

pub mod blowup;
pub mod cli;
pub mod error;
pub mod exactalg;
pub mod mochizuki;
pub mod nekrasov;
pub mod partitions;
pub mod prepotential;
pub mod swcurve;
pub mod toricbridge;
