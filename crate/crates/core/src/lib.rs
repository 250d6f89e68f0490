//! Preferential-attachment graphs, their Pólya-point local limit, and numerical checks of the limit laws.

pub mod analytics;
pub mod cli;
pub mod error;
pub mod fenwick;
pub mod graph;
pub mod growth;
pub mod limit;
pub mod localview;
pub mod params;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod subgraph;
pub mod urn;

pub use error::{Error, Result};
pub use graph::{ModelTag, PaGraph};
pub use params::ModelParams;
pub use rng::SeedSpec;
