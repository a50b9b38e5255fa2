//! File formats, parallel estimators and the command line on top of
//! `mrim-core`.

pub mod cli;
pub mod edgelist;
pub mod error;
pub mod parallel;
pub mod profile;
pub mod report;
pub mod schedule;
pub mod store_io;

pub use edgelist::{parse_edge_list, read_edge_list, LoadedGraph};
pub use error::{Failure, Kind};
