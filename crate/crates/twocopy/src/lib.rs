//! Reports, file formats, the parallel wiring search and the command-line
//! interface on top of `twocopy-core`.

pub mod cli;
pub mod report;
pub mod search;
