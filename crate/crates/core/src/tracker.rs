//! Grid-search position tracking by per-subcarrier cosine similarity.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::Point;
use crate::propagation::{ChannelMatrix, ChannelModel, ChannelPredictor};
use crate::signal::RxBlock;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrackerError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("search radius {radius} m does not exceed grid spacing {spacing} m")]
    GridCoarserThanSearch { radius: f64, spacing: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerConfig {
    /// Maximum UE speed (m/s).
    pub v_max: f64,
    /// Tracking interval (s).
    pub delta_t: f64,
    /// Error margin added to the reachable radius (m).
    pub margin: f64,
    /// Grid spacing (m).
    pub grid_spacing: f64,
}

impl TrackerConfig {
    pub fn search_radius(&self) -> f64 {
        self.v_max * self.delta_t + self.margin
    }

    pub fn validate(&self) -> Result<(), TrackerError> {
        for (name, value) in [
            ("v_max", self.v_max),
            ("delta_t", self.delta_t),
            ("margin", self.margin),
            ("grid spacing", self.grid_spacing),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(TrackerError::NonPositive { name, value });
            }
        }
        let radius = self.search_radius();
        if radius <= self.grid_spacing {
            return Err(TrackerError::GridCoarserThanSearch { radius, spacing: self.grid_spacing });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackState {
    pub prev_estimate: Point,
    pub step: usize,
    pub blind: bool,
}

impl TrackState {
    pub fn new(initial: Point) -> Self {
        TrackState { prev_estimate: initial, step: 0, blind: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepEstimate {
    pub position: Point,
    pub objective: f64,
    pub blind: bool,
}

/// Square lattice with spacing `grid_spacing` anchored at `center`,
/// restricted to the search disc. Ordered by ascending y, then x.
pub fn build_grid(center: Point, cfg: &TrackerConfig) -> Vec<Point> {
    let h = cfg.grid_spacing;
    let radius_units = cfg.search_radius() / h;
    // Relative slack keeps lattice points that sit on the circle.
    let limit = radius_units * radius_units * (1.0 + 1e-12);
    let k = radius_units.floor() as i64;
    let mut grid = Vec::new();
    for j in -k..=k {
        for i in -k..=k {
            if ((i * i + j * j) as f64) <= limit {
                grid.push(Point::new(center.x + i as f64 * h, center.y + j as f64 * h));
            }
        }
    }
    grid
}

/// `Σ_m |ĥ_mᴴ z_m| / (‖ĥ_m‖ ‖z_m‖)`; zero-norm subcarriers contribute 0.
pub fn objective(rx: &RxBlock, predicted: &ChannelMatrix) -> f64 {
    (0..predicted.num_subcarriers())
        .map(|m| {
            let h = predicted.row(m);
            let z = rx.row(m);
            let inner: Complex64 = h.iter().zip(z).map(|(h, z)| h.conj() * z).sum();
            let hn: f64 = h.iter().map(|v| v.norm_sqr()).sum();
            let zn: f64 = z.iter().map(|v| v.norm_sqr()).sum();
            cosine(inner, hn, zn)
        })
        .sum()
}

#[inline]
fn cosine(inner: Complex64, h_norm_sq: f64, z_norm_sq: f64) -> f64 {
    if h_norm_sq == 0.0 || z_norm_sq == 0.0 {
        0.0
    } else {
        (inner.norm() / (h_norm_sq.sqrt() * z_norm_sq.sqrt())).min(1.0)
    }
}

/// Scores candidate positions against one received block.
///
/// The prediction is streamed column by column so no channel matrix is
/// materialized per candidate.
pub struct ObjectiveEvaluator<'a> {
    predictor: &'a ChannelPredictor,
    /// Received block stored element-major: `[n * M + m]`.
    rx_columns: Vec<Complex64>,
    rx_norm_sq: Vec<f64>,
    model: ChannelModel,
}

impl<'a> ObjectiveEvaluator<'a> {
    pub fn new(predictor: &'a ChannelPredictor, rx: &'a RxBlock, model: ChannelModel) -> Self {
        assert_eq!(predictor.num_subcarriers(), rx.num_subcarriers(), "subcarrier count mismatch");
        assert_eq!(predictor.num_elements(), rx.num_elements(), "element count mismatch");
        let rx_norm_sq = (0..rx.num_subcarriers()).map(|m| rx.row(m).iter().map(|v| v.norm_sqr()).sum()).collect();
        let (m_count, n_count) = (rx.num_subcarriers(), rx.num_elements());
        let rx_columns = (0..n_count).flat_map(|n| (0..m_count).map(move |m| rx.row(m)[n])).collect();
        ObjectiveEvaluator { predictor, rx_columns, rx_norm_sq, model }
    }

    pub fn evaluate(&self, p: Point) -> f64 {
        let m_count = self.rx_norm_sq.len();
        let mut inner = vec![Complex64::new(0.0, 0.0); m_count];
        let mut h_norm = vec![0.0; m_count];
        self.predictor.for_each_column(p, self.model, |n, col| {
            let z = &self.rx_columns[n * m_count..(n + 1) * m_count];
            for (((acc, hn), &h), &zv) in inner.iter_mut().zip(h_norm.iter_mut()).zip(col).zip(z) {
                *acc += h.conj() * zv;
                *hn += h.norm_sqr();
            }
        });
        (0..m_count).map(|m| cosine(inner[m], h_norm[m], self.rx_norm_sq[m])).sum()
    }
}

/// One tracking step: grid search around the previous estimate.
///
/// `predictor` must be built over the known surfaces only. Ties resolve to
/// the first grid point in lattice order. When every candidate scores 0 the
/// previous estimate is held and the step is flagged blind.
pub fn estimate_step(
    rx: &RxBlock,
    state: &TrackState,
    cfg: &TrackerConfig,
    predictor: &ChannelPredictor,
    model: ChannelModel,
) -> StepEstimate {
    let grid = build_grid(state.prev_estimate, cfg);
    let evaluator = ObjectiveEvaluator::new(predictor, rx, model);
    let scores: Vec<f64> = grid.par_iter().map(|&p| evaluator.evaluate(p)).collect();

    let mut best = 0usize;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    if scores[best] > 0.0 {
        StepEstimate { position: grid[best], objective: scores[best], blind: false }
    } else {
        StepEstimate { position: state.prev_estimate, objective: 0.0, blind: true }
    }
}
