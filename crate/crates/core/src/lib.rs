//! Simulation of a fiber optical loop mirror (FOLM) whose loop carries a
//! ferrimagnetic sphere resonator (FSR).
//!
//! The optical pulse injected into the loop splits at the coupler into a
//! clockwise and a counter-clockwise sub-pulse. Both hit the sphere, at times
//! `t1` and `t2`, and the magneto-optic coupling changes the polarization of
//! the light (Faraday/Voigt) and the magnetization of the sphere (inverse
//! Faraday effect). Whether the two sub-pulses still interfere destructively
//! at the dark port depends on the overlap of the branch states, which is what
//! this crate computes:
//!
//! * [`params`]: material, sphere, field and timing constants plus derived scalars.
//! * [`jones`]: polarization states, unitary Jones matrices and the Poincaré map.
//! * [`magnetooptics`]: the dielectric tensor, its transverse reduction and the sphere Jones matrix.
//! * [`bosonic`]: truncated Fock-space magnon numerics (coherent states, displacement, precession).
//! * [`interferometer`]: coupler, transmission probabilities, Schmidt decomposition and purity.
//! * [`exec`]: serial or rayon-parallel evaluation of independent work items.

pub mod bosonic;
pub mod error;
pub mod exec;
pub mod interferometer;
pub mod jones;
pub mod magnetooptics;
pub mod params;

pub use error::{Error, Result};
pub use exec::Execution;

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
