//! Static detection of transaction conflicts between Solidity functions.
//!
//! The pipeline is [`frontend::parse`] → [`access::build_access_maps`] →
//! [`engine::detect_all`] → [`report`].

pub mod access;
pub mod engine;
pub mod frontend;
pub mod report;
