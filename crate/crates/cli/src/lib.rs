//! JSON documents and the `admgraph` command line.

pub mod commands;
pub mod document;

pub use commands::{run_command, Outcome};
pub use document::{parse_graph_document, DocumentError, GraphDocument};
