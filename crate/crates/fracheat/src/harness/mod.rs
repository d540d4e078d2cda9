//! Experiment driver: configs, CSV emission, rate fitting, and the
//! acceptance-suite runner behind the `fracheat` CLI.

pub mod fit;
