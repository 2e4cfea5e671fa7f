//! Multi-object navigation in procedural houses.
//!
//! The crate bundles a deterministic house simulator, an incrementally
//! built 3D scene graph, a two-level planner (high-level room search plans
//! on top of point-goal navigation), and a benchmark harness with SR, SPL,
//! and Kendall-Tau metrics.
//!
//! The `examples/` directory holds one runnable example per major
//! capability; the `housenav` binary exposes the dataset, experiment, and
//! rendering workflows as subcommands.

pub mod bench;
pub mod episode;
pub mod graph;
pub mod knowledge;
pub mod nav;
pub mod plan;
pub mod sim;
