//! Game Master engine, dialogue games, players and scoring for evaluating
//! chat models through self-play.

pub mod backends;
pub mod engine;
pub mod games;
pub mod instancegen;
pub mod metrics;
pub mod results;
pub mod runner;
