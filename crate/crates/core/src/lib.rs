//! Synthesis and verification of a dual-band transformer matching network
//! with a center-tap resonator.
//!
//! Two independent analysis paths are provided: closed-form two-port
//! algebra ([`network`]) and nodal analysis of a netlist ([`mna`]).

pub mod elements;
pub mod lm;
pub mod metrics;
pub mod mna;
pub mod netlist;
pub mod network;
pub mod resonator;
pub mod sweep;
pub mod synthesis;
pub mod touchstone;
pub mod twoport;

use thiserror::Error;

pub use twoport::C64;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    TwoPort(#[from] twoport::TwoPortError),
    #[error(transparent)]
    Element(#[from] elements::ElementError),
    #[error(transparent)]
    Netlist(#[from] netlist::NetlistError),
    #[error(transparent)]
    Mna(#[from] mna::MnaError),
    #[error(transparent)]
    Synthesis(#[from] synthesis::SynthesisError),
    #[error(transparent)]
    Touchstone(#[from] touchstone::TouchstoneError),
}
