//! Graph pattern mining on a banked processing-in-memory (PIM) model.
//!
//! The crate compiles small patterns into nested-loop matching plans, places
//! CSR neighbor lists across PIM units, and runs the plans on a tier-level
//! model of an HBM-PIM stack: near-core, intra-channel and inter-channel
//! accesses, a conditional access filter in the banks, per-channel work
//! stealing, and per-bank serialization. Results are exact pattern counts
//! plus cycle and traffic accounting in a [`SimReport`].
//!
//! ```
//! use gpm_pim::{graph, pattern, placement::Placement, sim, PimTopology};
//!
//! let g = graph::complete_graph(4);
//! let plan = pattern::compile_plan(
//!     &pattern::builtin_pattern("3cc").unwrap(),
//!     pattern::Semantics::NonInduced,
//! )
//! .unwrap();
//! let topo = PimTopology::small(2, 2);
//! let opts = sim::SimOptions::default();
//! let placement = Placement::for_options(&g, &topo, &opts).unwrap();
//! let report = sim::simulate(&g, &plan, &topo, &placement, &opts).unwrap();
//! assert_eq!(report.pattern_count, 4);
//! ```

pub mod error;
pub mod graph;
pub mod memory;
pub mod pattern;
pub mod placement;
pub mod sim;
pub mod steal;

pub use error::{Error, Result};
pub use graph::{CsrGraph, VertexId};
pub use memory::PimTopology;
pub use sim::{SimOptions, SimReport};
