//! Experiment orchestration, configuration ingestion, report serialization
//! and the built-in acceptance suite for the rod Brownian-dynamics
//! simulator.

pub mod config;
pub mod experiment;
pub mod report;
pub mod selftest;
