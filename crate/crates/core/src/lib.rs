//! Environment-aware near-field UE tracking.
//!
//! A mobile single-antenna UE transmits uplink pilots to a large linear
//! array in a 2D scene of straight surfaces. The crate synthesizes the
//! spherical-wavefront channel with per-element blockage and single-bounce
//! reflections, and tracks the UE by grid search over channels predicted
//! from the subset of surfaces the receiver knows about.
//!
//! Modules, bottom-up:
//! - [`geometry`]: points, segments, intersection and image-method kernels.
//! - [`propagation`]: path indicators, path sets, NF and FF channels.
//! - [`signal`]: OFDM grid, thermal noise and received-block synthesis.
//! - [`tracker`]: search grid, cosine-similarity objective, step estimate.
//! - [`scenario`]: trajectories, awareness sampling and Monte Carlo runs.

pub mod geometry;
pub mod propagation;
pub mod scenario;
pub mod signal;
pub mod tracker;

pub use num_complex::Complex64;

pub use geometry::{Point, Segment, EPS_GEOM};
pub use propagation::{
    ArrayGeometry, AwarenessSet, ChannelMatrix, ChannelModel, ChannelPredictor, Environment, PathKind, PathRecord,
    PathSet, ReflectModel, Surface,
};
pub use scenario::{EtaSweepRow, Scenario, TrackRecord};
pub use signal::{OfdmConfig, PhaseErrorModel, RxBlock, SignalConfig};
pub use tracker::{StepEstimate, TrackState, TrackerConfig};
