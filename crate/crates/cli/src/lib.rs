//! `cna` command line, LTS documents and the local stepping service.

pub mod cli;
pub mod export;
pub mod service;

pub use cli::run;
