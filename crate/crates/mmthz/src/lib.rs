//! Propagation modeling and network-coverage simulation for the mmWave
//! (30-300 GHz) and THz (0.1-10 THz) bands.
//!
//! The crate is organized around the propagation chain:
//!
//! - [`quantity`]: frequencies, linear powers, angles, dB conversion.
//! - [`registry`]: the candidate spectrum bands, queryable by frequency.
//! - [`atmosphere`]: molecular absorption (Beer-Lambert), rain, foliage,
//!   penetration tables.
//! - [`blockage`]: LOS probability models and a geometric Monte-Carlo
//!   oracle.
//! - [`surface`]: Rayleigh roughness, reflection/scattering split, and the
//!   directive-scattering lobe.
//! - [`antenna`]: analog beam-pattern models and multi-lobe fitting.
//! - [`channel`]: mmWave/THz link equations, Nakagami fading, Doppler.
//! - [`netsim`]: Monte-Carlo stochastic-geometry coverage simulation.
//! - [`config`] / [`cli`]: scenario files and the command-line front end.
//!
//! All stochastic components take explicit seeds and produce bit-identical
//! results at any parallelism level.

#![forbid(unsafe_code)]
// Validation deliberately writes `!(x > 0.0)` so NaN fails the check;
// `x <= 0.0` would accept it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod antenna;
pub mod atmosphere;
pub mod blockage;
pub mod channel;
pub mod cli;
pub mod config;
pub mod error;
mod mc;
pub mod netsim;
pub mod quantity;
pub mod registry;
pub mod surface;

pub use error::{Error, Result};
pub use quantity::{Angle, Frequency, PowerRatio, SPEED_OF_LIGHT};
