//! Benchmarking toolkit for causal structure search over linear Gaussian
//! models.
//!
//! The crate covers the full pipeline: random DAGs and structural equation
//! models ([`simulate`]), conditional independence tests and scores
//! ([`indtest`], [`score`]), the PC family and FGES searches ([`pc`],
//! [`fges`]), accuracy statistics ([`metrics`]), text file formats
//! ([`dataio`]) and the run matrix that ties them together ([`harness`]).
//!
//! ```
//! use causal_bench::graph::{cpdag_of, Dag};
//! use causal_bench::indtest::DsepOracle;
//! use causal_bench::pc::{pc_search, PcVariant};
//! use causal_bench::util::Deadline;
//!
//! let dag = Dag::from_edges(3, &[(0, 1), (2, 1)]).unwrap();
//! let found = pc_search(&PcVariant::pc(0.01), &DsepOracle::new(&dag), &Deadline::none()).unwrap();
//! assert_eq!(found, cpdag_of(&dag));
//! ```

pub mod dataio;
pub mod error;
pub mod fges;
pub mod graph;
pub mod harness;
pub mod indtest;
pub mod metrics;
pub mod pc;
pub mod score;
pub mod simulate;
pub mod util;

pub use error::{Error, Result};
pub use graph::{Dag, Edge, EdgeKind, Endpoint, MixedGraph};
pub use simulate::DataSet;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/tests-and-scores.md")]
    mod tests_and_scores {}
    #[doc = include_str!("../../../book/src/pc.md")]
    mod pc {}
    #[doc = include_str!("../../../book/src/fges.md")]
    mod fges {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
}
