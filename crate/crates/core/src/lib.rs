//! Contextual multi-armed bandits with a known reward function.
//!
//! The learner sees a context, pulls one arm, observes that arm's random
//! state `x` and receives `g(y, x)` for a reward function `g` it knows in
//! advance. Because `g` is known, one observed state tells the learner what
//! the arm would have paid under every other context too. [`policy::Dcb`]
//! and [`policy::Ccb`] exploit this; [`policy::Ucb1`] and
//! [`policy::MultiUcb`] are the context-blind and per-context baselines.
//!
//! [`experiment`] simulates these policies against [`env`] presets and
//! checks the observed regret against the known bounds.

pub mod cli;
pub mod config;
pub mod env;
pub mod error;
pub mod experiment;
pub mod policy;
pub mod reproduce;

pub use error::{Error, Result};
