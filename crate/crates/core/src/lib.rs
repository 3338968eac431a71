//! Dynamic multimodal optimization benchmark suite.
//!
//! Eight multimodal landscape families evolve through a fixed number of
//! environments under eight change modes. A [`controller::ProblemInstance`]
//! enforces the evaluation budget and records ground truth, and
//! [`metrics`] scores reported populations by peak ratio.

pub mod basic;
pub mod composition;
pub mod config;
pub mod controller;
pub mod df;
pub mod dump;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod landscape;
pub mod metrics;
pub mod model;
pub mod optimizer;
pub mod problem;
pub mod report;
pub mod rng;
pub mod rotation;

pub use error::{DmmopError, Result};
pub use model::{euclidean_distance, Optimum, SolutionVector};
pub use problem::{ChangeMode, Family, ProblemSpec};
pub use rng::{make_rng, RngStream};
