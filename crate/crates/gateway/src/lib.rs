//! Command line entry points and the session service that seats human
//! players in live episodes.

pub mod cli;
pub mod config;
pub mod server;
pub mod session;
