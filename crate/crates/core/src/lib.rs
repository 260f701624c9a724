//! Exact and brute-force algorithms for Nash stability in additively
//! separable hedonic games, together with generators for the hardness
//! reductions and the text formats used by the command-line tool.

pub mod coloring;
pub mod connected;
pub mod decomposition;
pub mod dp;
pub mod dynamics;
pub mod error;
pub mod format;
pub mod game;
pub mod oracle;
pub mod random;
pub mod reductions;

pub use coloring::{choose_k, coloring_to_partition, is_stable_coloring, solve_nash_via_coloring, Coloring};
pub use connected::{run_connected_dp, signature_of, solve_connected_nash, ConnectedRun, ConnectedSignature};
pub use decomposition::{
    heuristic_decompose, make_nice, square_augment, square_graph, Heuristic, NiceTreeDecomposition, TreeDecomposition,
};
pub use dp::{SolveStats, SolverConfig};
pub use dynamics::{better_response_dynamics, Schedule};
pub use error::{Error, Result};
pub use game::{
    is_connected_partition, is_nash_stable, nash_deviation, utility, utility_toward, AshgInstance, DeviationTarget,
    DeviationWitness, Partition, Vertex, Weight,
};
pub use oracle::{brute_force_connected_nash, brute_force_nash, brute_force_stable_coloring, enumerate_partitions};
