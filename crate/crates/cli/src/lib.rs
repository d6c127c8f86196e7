//! Building blocks of the `cablerod` experiment runner: configuration
//! schema, command dispatch, result tables, and figure-data extraction.

pub mod config;
pub mod figure;
pub mod runner;
pub mod table;
