//! Synthesis and prototyping of rational single-loop linkages.
//!
//! The pipeline runs from pose interpolation ([`interp`]) through motion
//! polynomial factorization ([`motionpoly`]) to a closed 4R/6R mechanism
//! ([`mechanism`]), its self-collision analysis ([`collision`]) and the
//! extraction of manufacturing parameters ([`design`]).

pub mod collision;
pub mod design;
pub mod error;
pub mod fixtures;
pub mod input;
pub mod interp;
pub mod mechanism;
pub mod motionpoly;
pub mod quatcore;

pub use error::{Error, Result};
