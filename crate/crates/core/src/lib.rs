//! Headless, deterministic multi-robot task allocation simulator.
//!
//! Robots follow authored roadways between locations, take turns entering
//! single-occupancy rooms through FIFO queues, and stay apart through a joint
//! control-barrier-function QP solved per proximity cluster. Tasks arrive as a
//! stream with deadlines and are allocated by an exact or a greedy solver over a
//! measured travel-time graph.
//!
//! Modules, bottom up:
//! - [`world`]: ASCII occupancy grids, inflated costmaps, ray casting.
//! - [`dynamics`]: dynamic unicycle robots (RK4) and social-force pedestrians.
//! - [`planner`]: cost-aware 8-connected A*.
//! - [`safety_control`]: nominal controllers and the CBF-QP filter.
//! - [`coordination`]: neighbor sets, clusters, leader election.
//! - [`navigation`]: roadways, waypoint plans, room queues.
//! - [`tasking`]: task streams, travel-time graphs, allocation solvers.
//! - [`engine`]: scenario loading, the tick loop, traces and metrics.
//! - [`render`] and [`cli`]: SVG frames and the `mrta` command line.
//!
//! Runs are reproducible: the same scenario and seed give byte-identical traces.

pub mod geom;
pub mod world;
pub mod dynamics;
pub mod planner;
pub mod ids;
pub mod safety_control;
pub mod coordination;
pub mod navigation;
pub mod tasking;
pub mod engine;
pub mod render;
pub mod cli;
