//! Conformal link prediction with false discovery rate control.
//!
//! Given a partially observed graph, [`conformal::conformal_link_predict`]
//! returns a set of unobserved pairs predicted to be edges such that the
//! expected fraction of false edges among them stays below a target level.
//! The crate also ships a block-model simulator, two thresholding baselines
//! and a Monte-Carlo harness to compare them.
//!
//! ```
//! use conflink::conformal::{conformal_link_predict, ConformalConfig};
//! use conflink::graph::GraphBuilder;
//! use conflink::scoring::ScorerKind;
//!
//! let graph = GraphBuilder::new(4, false)
//!     .edges([(0, 1), (1, 2), (2, 3)])
//!     .unsampled(0, 2)
//!     .build()?;
//! let config = ConformalConfig { alpha: 0.5, ..ConformalConfig::default() };
//! let result = conformal_link_predict(&graph, &ScorerKind::CN, &config, 7)?;
//! assert!(result.selected.iter().all(|p| !graph.is_sampled(*p)));
//! # Ok::<(), conflink::Error>(())
//! ```

pub mod baselines;
pub mod cli;
pub mod config;
pub mod conformal;
pub mod error;
pub mod generator;
pub mod graph;
pub mod harness;
pub mod io;
pub mod rng;
pub mod scoring;

pub use error::{Error, Result};
