//! Bilevel hierarchical clustering through smoothing and DC programming.
//!
//! Given `m` nodes, the solver looks for `k` cluster centers and one total
//! center, all among the nodes, minimising the cost of the two-level tree
//! (every node linked to its nearest center, every center linked to the total
//! center). The discrete problem is relaxed to free centers with a penalty on
//! their distance to the nodes, the Euclidean norms are smoothed, and the
//! resulting difference-of-convex program is minimised with the DCA under a
//! growing penalty and a shrinking smoothing parameter. The continuous centers
//! are finally snapped back onto nodes.
//!
//! ```no_run
//! use hiclust::{continuation, dataio, init, ModelKind, Schedule};
//!
//! let text = std::fs::read_to_string("eil76.tsp").unwrap();
//! let data = dataio::parse_tsplib(&text).unwrap().points;
//! let schedule = Schedule::direct(1e-6, 1.0, 100.0, 0.5, 27, 20).unwrap();
//! let x0 = init::random_start(&data, 3, &init::StartSpec::with_seed(7));
//! let report = continuation::solve(&data, ModelKind::One, 3, &schedule, &x0, &Default::default()).unwrap();
//! println!("cost {}", report.snapped.cost);
//! ```

pub mod config;
pub mod continuation;
pub mod dataio;
pub mod dca;
mod error;
pub mod init;
pub mod matrix;
pub mod model_one;
pub mod model_two;
pub mod postprocess;
pub mod selfcheck;
pub mod smoothing;
mod terms;

pub use continuation::{ModelKind, Schedule, SolveOptions, SolveReport};
pub use error::{Error, Result};
pub use matrix::{CenterMatrix, DataSet, Matrix};
