//! Littlewood-Richardson positivity through hive flows.
//!
//! Flow classes on the honeycomb graph are stored as integral throughput vectors on the
//! edges of the triangular graph. Positivity is decided by augmenting along shortest
//! turnpaths of a residual digraph, optionally with capacity scaling. Small instances can
//! be counted exactly by enumerating hives, and checked against a tableau oracle.

pub mod checks;
pub mod enumerate;
pub mod error;
pub mod flow;
pub mod grid;
pub mod hives;
pub mod lr_oracle;
pub mod partition;
pub mod residual;
pub mod sample;
pub mod scalar;
pub mod solver;

pub use enumerate::{build_pz_graph, count_p, enumerate_hives, enumerate_p, find_secure_cycle, is_f_hive_preserving, is_f_secure, multiplicity_free, GCycle, PzGraph};
pub use error::{Error, Result};
pub use flow::{CapacityMap, FlowClass, GNode, Walk};
pub use hives::{flatspaces, side_throughputs, FlatSide, Flatspace, Flatspaces, HiveLabel, Shape};
pub use grid::{Contribution, EdgeId, Rhombus, Side, TriangleGrid, TriangleId, Turn, VertexId};
pub use lr_oracle::{lr_count, lr_positive};
pub use partition::{Instance, Partition};
pub use residual::{build_r, project, restrict_scaled, restrict_to_f, turnpath_slack, ResidualDigraph, TurnPath};
pub use scalar::Int;
pub use solver::{decide, decide_plain, decide_scaling, verify_certificate, Algorithm, SolveReport};

pub type Flow = FlowClass<i64>;
pub type Capacities = CapacityMap<i64>;
pub type Report = SolveReport<i64>;
