//! Filter feature selection and classifier evaluation for labelled network
//! flow tables.
//!
//! The stages are usable on their own ([`tabular`], [`sampling`],
//! [`fselect`], [`classify`], [`eval`]) or chained by [`pipeline`] from a
//! JSON [`config::PipelineConfig`].

pub mod classify;
pub mod config;
pub mod discretizer;
pub mod error;
pub mod eval;
pub mod fselect;
pub mod pipeline;
pub mod sampling;
pub mod tabular;

pub use error::{Error, Result};
