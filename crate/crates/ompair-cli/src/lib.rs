//! Experiment runner around the simulation core: configuration, sweep
//! drivers, optimizers and file output.

pub mod config;
pub mod experiments;
pub mod optimize;
pub mod output;
