//! Experiment front end for the mixture schemes: configuration, synthetic
//! data, runs and sweeps with CSV persistence, and the property suite.

pub mod config;
pub mod data;
pub mod runner;
pub mod verify;
