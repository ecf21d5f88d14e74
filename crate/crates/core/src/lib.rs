//! Stochastic-trajectory simulation of dual-rail linear-optical circuits
//! with lossy optical elements and imperfect photon sources.

pub mod analysis;
pub mod circuits;
pub mod engine;
pub mod error;
pub mod fock;
pub mod gbqc;
pub mod mbqc;
pub mod noise;
pub mod rng;
pub mod vqa;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
