//! Experiment orchestration: trajectories, awareness sampling, tracking
//! runs, RMSE maps and awareness sweeps.
//!
//! Every random draw comes from a ChaCha stream keyed by the scenario seed
//! and the work item's indices, so results do not depend on scheduling or
//! thread count.

use std::time::Instant;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{Point, Segment};
use crate::propagation::{
    build_path_set, ArrayGeometry, AwarenessSet, ChannelModel, ChannelPredictor, Environment, PropagationError,
    ReflectModel, Surface,
};
use crate::signal::{self, OfdmConfig, PhaseErrorModel, SignalConfig, SignalError};
use crate::tracker::{estimate_step, TrackState, TrackerConfig, TrackerError};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Propagation(#[from] PropagationError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Tracker(#[from] TrackerError),
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("trajectory step {step} moves {distance:.4} m, more than v_max * delta_t = {limit:.4} m")]
    TrajectoryTooFast { step: usize, distance: f64, limit: f64 },
    #[error("trajectory point {0} coincides with an array element")]
    TrajectoryOnElement(usize),
    #[error("array has {array} elements but the scenario expects {expected}")]
    ArraySize { array: usize, expected: usize },
    #[error("awareness set covers {awareness} surfaces but the environment has {environment}")]
    AwarenessMismatch { awareness: usize, environment: usize },
    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),
    #[error("invalid map region: {0}")]
    BadMap(String),
}

/// Rectangular lattice of evaluation positions for RMSE maps and sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapRegion {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub spacing: f64,
}

impl MapRegion {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.spacing > 0.0) {
            return Err(ScenarioError::BadMap(format!("spacing {} must be positive", self.spacing)));
        }
        if !(self.x_max >= self.x_min && self.y_max >= self.y_min) {
            return Err(ScenarioError::BadMap("max bound below min bound".into()));
        }
        Ok(())
    }

    /// Lattice points from the lower-left corner, ascending y then x.
    pub fn positions(&self) -> Vec<Point> {
        let count = |lo: f64, hi: f64| ((hi - lo) / self.spacing + 1e-9).floor() as usize + 1;
        let (nx, ny) = (count(self.x_min, self.x_max), count(self.y_min, self.y_max));
        let mut out = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                out.push(Point::new(self.x_min + i as f64 * self.spacing, self.y_min + j as f64 * self.spacing));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub environment: Environment,
    pub array: ArrayGeometry,
    pub ofdm: OfdmConfig,
    pub signal: SignalConfig,
    pub tracker: TrackerConfig,
    pub trajectory: Vec<Point>,
    pub map: Option<MapRegion>,
    pub seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.signal.validate()?;
        self.tracker.validate()?;
        if let Some(map) = &self.map {
            map.validate()?;
        }
        let first = *self.trajectory.first().ok_or(ScenarioError::EmptyTrajectory)?;
        let limit = self.tracker.v_max * self.tracker.delta_t;
        let mut prev = first;
        for (step, &p) in self.trajectory.iter().enumerate() {
            let distance = p.distance(prev);
            if distance > limit * (1.0 + 1e-9) {
                return Err(ScenarioError::TrajectoryTooFast { step, distance, limit });
            }
            if self.array.elements().iter().any(|e| e.distance(p) <= crate::geometry::EPS_GEOM) {
                return Err(ScenarioError::TrajectoryOnElement(step));
            }
            prev = p;
        }
        Ok(())
    }

    /// Map lattice, or an empty list when the scenario defines none.
    pub fn map_positions(&self) -> Vec<Point> {
        self.map.map(|m| m.positions()).unwrap_or_default()
    }

    /// A copy with thermal noise and phase errors disabled.
    pub fn noiseless(&self) -> Scenario {
        let mut sc = self.clone();
        sc.signal.thermal_noise = false;
        sc.signal.phase_error = PhaseErrorModel::None;
        sc
    }
}

/// Walks the waypoint polyline at constant `speed`, emitting one point per
/// `delta_t`. The final waypoint is always included.
pub fn resample_waypoints(waypoints: &[Point], speed: f64, delta_t: f64) -> Vec<Point> {
    let Some(&start) = waypoints.first() else {
        return Vec::new();
    };
    let step = speed * delta_t;
    let mut out = vec![start];
    let mut carried = 0.0;
    for w in waypoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = a.distance(b);
        if len == 0.0 {
            continue;
        }
        let mut s = step - carried;
        while s <= len + 1e-12 {
            out.push(a + (b - a) * (s.min(len) / len));
            s += step;
        }
        carried = len - (s - step);
    }
    let last = *waypoints.last().expect("non-empty");
    if out.last().is_none_or(|p| p.distance(last) > 1e-9) {
        out.push(last);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackRecord {
    pub step: usize,
    pub truth: Point,
    pub estimate: Point,
    pub error: f64,
    pub objective: f64,
    pub blind: bool,
    /// Wall time of the estimation step (s).
    pub elapsed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaSweepRow {
    pub eta: f64,
    pub model: ChannelModel,
    /// Mean over awareness draws of the per-draw RMSE.
    pub rmse: f64,
    pub n_draws: usize,
    pub draw_rmse: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapCell {
    pub position: Point,
    pub trackable: bool,
    /// `None` for non-trackable cells and cells where every trial was blind.
    pub rmse: Option<f64>,
}

/// Independent random stream for one work item.
pub fn stream_rng(seed: u64, domain: u64, a: u64, b: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (chunk, word) in key.chunks_exact_mut(8).zip([seed, domain, a, b]) {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

const STREAM_TRACK: u64 = 1;
const STREAM_MAP: u64 = 2;
const STREAM_AWARENESS: u64 = 3;
const STREAM_SWEEP_NOISE: u64 = 4;

/// Uniformly random subset of `round(eta * S)` surface ids.
pub fn sample_awareness<R: Rng + ?Sized>(env: &Environment, eta: f64, rng: &mut R) -> AwarenessSet {
    let total = env.len();
    let k = ((eta.clamp(0.0, 1.0) * total as f64).round() as usize).min(total);
    if k == total {
        return AwarenessSet::full(total);
    }
    let ids = index::sample(rng, total, k).into_vec();
    AwarenessSet::new(ids, total).expect("sampled ids are in range")
}

/// Awareness set number `draw` at level `round(eta * S)`, from the same
/// streams [`sweep_eta`] uses.
pub fn draw_awareness(sc: &Scenario, eta: f64, draw: u64) -> AwarenessSet {
    let s = sc.environment.len();
    let level = (eta.clamp(0.0, 1.0) * s as f64).round() as u64;
    let mut rng = stream_rng(sc.seed, STREAM_AWARENESS, level, draw);
    sample_awareness(&sc.environment, eta, &mut rng)
}

/// At least one element has at least one valid path under the full
/// surface set.
pub fn trackable(p: Point, env: &Environment, array: &ArrayGeometry) -> bool {
    !build_path_set(p, array, env.surfaces()).is_blind()
}

fn check_awareness(sc: &Scenario, awareness: &AwarenessSet) -> Result<(), ScenarioError> {
    if awareness.total() != sc.environment.len() {
        return Err(ScenarioError::AwarenessMismatch {
            awareness: awareness.total(),
            environment: sc.environment.len(),
        });
    }
    Ok(())
}

/// Tracks the scenario trajectory from its known starting point.
///
/// Received blocks come from the full environment; predictions use only
/// the surfaces in `awareness`.
pub fn run_tracking(
    sc: &Scenario,
    awareness: &AwarenessSet,
    model: ChannelModel,
) -> Result<Vec<TrackRecord>, ScenarioError> {
    sc.validate()?;
    check_awareness(sc, awareness)?;
    let truth_predictor = ChannelPredictor::new(&sc.array, sc.environment.surfaces(), &sc.ofdm);
    let known = sc.environment.known_surfaces(awareness);
    let predictor = ChannelPredictor::new(&sc.array, &known, &sc.ofdm);

    let mut state = TrackState::new(sc.trajectory[0]);
    let mut records = Vec::with_capacity(sc.trajectory.len().saturating_sub(1));
    for (k, &truth) in sc.trajectory.iter().enumerate().skip(1) {
        let h = truth_predictor.channel(truth, ChannelModel::NearField);
        let mut rng = stream_rng(sc.seed, STREAM_TRACK, k as u64, 0);
        let rx = signal::synthesize_rx(k, &h, &sc.signal, &sc.ofdm, &mut rng)?;

        let started = Instant::now();
        let est = estimate_step(&rx, &state, &sc.tracker, &predictor, model);
        let elapsed = started.elapsed().as_secs_f64();

        state = TrackState { prev_estimate: est.position, step: k, blind: est.blind };
        records.push(TrackRecord {
            step: k,
            truth,
            estimate: est.position,
            error: truth.distance(est.position),
            objective: est.objective,
            blind: est.blind,
            elapsed,
        });
    }
    Ok(records)
}

/// Squared errors of single-step estimates seeded at the truth, or `None`
/// when every trial came back blind.
fn single_step_errors(
    sc: &Scenario,
    truth: Point,
    truth_predictor: &ChannelPredictor,
    predictor: &ChannelPredictor,
    model: ChannelModel,
    trials: usize,
    mut rng_for_trial: impl FnMut(usize) -> ChaCha8Rng,
) -> Result<Option<f64>, ScenarioError> {
    let h = truth_predictor.channel(truth, ChannelModel::NearField);
    let state = TrackState::new(truth);
    let mut sum_sq = 0.0;
    let mut counted = 0usize;
    for t in 0..trials {
        let mut rng = rng_for_trial(t);
        let rx = signal::synthesize_rx(0, &h, &sc.signal, &sc.ofdm, &mut rng)?;
        let est = estimate_step(&rx, &state, &sc.tracker, predictor, model);
        if !est.blind {
            sum_sq += truth.distance(est.position).powi(2);
            counted += 1;
        }
    }
    Ok((counted > 0).then(|| (sum_sq / counted as f64).sqrt()))
}

/// Per-position RMSE of single-step estimates with the previous estimate
/// set to the truth.
pub fn rmse_map(
    sc: &Scenario,
    positions: &[Point],
    trials: usize,
    model: ChannelModel,
    awareness: &AwarenessSet,
) -> Result<Vec<MapCell>, ScenarioError> {
    if trials == 0 {
        return Err(ScenarioError::ZeroCount("trials"));
    }
    sc.validate()?;
    check_awareness(sc, awareness)?;
    let truth_predictor = ChannelPredictor::new(&sc.array, sc.environment.surfaces(), &sc.ofdm);
    let predictor = ChannelPredictor::new(&sc.array, &sc.environment.known_surfaces(awareness), &sc.ofdm);

    positions
        .par_iter()
        .enumerate()
        .map(|(j, &p)| {
            if !trackable(p, &sc.environment, &sc.array) {
                return Ok(MapCell { position: p, trackable: false, rmse: None });
            }
            let rmse = single_step_errors(sc, p, &truth_predictor, &predictor, model, trials, |t| {
                stream_rng(sc.seed, STREAM_MAP, j as u64, t as u64)
            })?;
            Ok(MapCell { position: p, trackable: true, rmse })
        })
        .collect()
}

/// Mean RMSE over awareness draws and trackable positions for every
/// awareness level `0, 1/S, ..., 1` and every requested model.
///
/// Noise realizations depend only on (draw, position), and awareness draws
/// only on (level, draw), so models and levels are compared on common
/// random numbers.
pub fn sweep_eta(
    sc: &Scenario,
    positions: &[Point],
    draws: usize,
    models: &[ChannelModel],
) -> Result<Vec<EtaSweepRow>, ScenarioError> {
    if draws == 0 {
        return Err(ScenarioError::ZeroCount("draws"));
    }
    sc.validate()?;
    let s = sc.environment.len();
    let truth_predictor = ChannelPredictor::new(&sc.array, sc.environment.surfaces(), &sc.ofdm);
    let tracked: Vec<Point> =
        positions.iter().copied().filter(|&p| trackable(p, &sc.environment, &sc.array)).collect();

    let mut rows = Vec::new();
    for level in 0..=s {
        let eta = if s == 0 { 1.0 } else { level as f64 / s as f64 };
        let awareness: Vec<AwarenessSet> = (0..draws).map(|d| draw_awareness(sc, eta, d as u64)).collect();
        for &model in models {
            let mut draw_rmse = Vec::with_capacity(draws);
            for (d, aw) in awareness.iter().enumerate() {
                let predictor = ChannelPredictor::new(&sc.array, &sc.environment.known_surfaces(aw), &sc.ofdm);
                let errors: Vec<Option<f64>> = tracked
                    .par_iter()
                    .enumerate()
                    .map(|(j, &p)| {
                        single_step_errors(sc, p, &truth_predictor, &predictor, model, 1, |_| {
                            stream_rng(sc.seed, STREAM_SWEEP_NOISE, d as u64, j as u64)
                        })
                    })
                    .collect::<Result<_, _>>()?;
                let counted: Vec<f64> = errors.into_iter().flatten().collect();
                let rmse = if counted.is_empty() {
                    0.0
                } else {
                    (counted.iter().map(|e| e * e).sum::<f64>() / counted.len() as f64).sqrt()
                };
                draw_rmse.push(rmse);
            }
            let rmse = draw_rmse.iter().sum::<f64>() / draws as f64;
            rows.push(EtaSweepRow { eta, model, rmse, n_draws: draws, draw_rmse });
        }
    }
    Ok(rows)
}

/// Carrier, band and grid values of the reference configuration.
pub mod reference {
    pub const NUM_ANTENNAS: usize = 64;
    pub const CARRIER_HZ: f64 = 7.5e9;
    pub const BANDWIDTH_HZ: f64 = 100e6;
    pub const SUBCARRIER_SPACING_HZ: f64 = 120e3;
    pub const NUM_SUBCARRIERS: usize = 16;
    pub const TX_POWER_DBM: f64 = 23.0;
    pub const NOISE_FIGURE_DB: f64 = 7.0;
    pub const TEMPERATURE_K: f64 = 290.0;
    pub const DELTA_T_S: f64 = 0.05;
    pub const V_MAX_MPS: f64 = 10.0;
    pub const MARGIN_M: f64 = 0.5;
    pub const GRID_SPACING_M: f64 = 0.05;
    pub const UE_SPEED_MPS: f64 = 2.0;
    pub const SEED: u64 = 2026;

    /// Surface endpoints `(ax, ay, bx, by)`.
    pub const SURFACES: [(f64, f64, f64, f64); 8] = [
        (18.0, 5.0, 18.0, 13.0),
        (2.0, 5.0, 2.0, 13.0),
        (13.0, 7.0, 16.5, 7.0),
        (3.5, 7.0, 7.0, 7.0),
        (9.0, 11.0, 11.0, 11.0),
        (9.0, 11.0, 9.0, 13.0),
        (11.0, 11.0, 11.0, 14.0),
        (9.0, 14.0, 11.0, 14.0),
    ];
    pub const SURFACE_BETA: f64 = 0.7;

    pub const ARRAY_CENTER: (f64, f64) = (10.0, 0.0);

    pub const WAYPOINTS: [(f64, f64); 12] = [
        (16.0, 3.0),
        (17.2, 6.0),
        (17.2, 8.0),
        (15.5, 9.5),
        (13.25, 9.5),
        (12.7, 7.5),
        (13.0, 4.0),
        (10.0, 5.5),
        (10.0, 10.7),
        (8.5, 10.8),
        (8.5, 13.6),
        (10.3, 12.2),
    ];

    pub const MAP: (f64, f64, f64, f64) = (1.0, 19.0, 1.0, 14.0);
    pub const MAP_SPACING_M: f64 = 1.0;
}

/// Eight-surface reference scene with a 64-element half-wavelength ULA.
pub fn reference_scenario() -> Scenario {
    use reference::*;
    let surfaces = SURFACES
        .iter()
        .enumerate()
        .map(|(id, &(ax, ay, bx, by))| {
            let geom = Segment::new(Point::new(ax, ay), Point::new(bx, by)).expect("reference surface");
            Surface::new(id, geom, ReflectModel::ConstantBeta(SURFACE_BETA)).expect("reference surface")
        })
        .collect();
    let environment = Environment::new(surfaces).expect("reference environment");
    let ofdm = OfdmConfig::with_default_subcarriers(CARRIER_HZ, BANDWIDTH_HZ, SUBCARRIER_SPACING_HZ, NUM_SUBCARRIERS)
        .expect("reference grid");
    let spacing = ofdm.carrier_wavelength() / 2.0;
    let array = ArrayGeometry::uniform_linear(Point::new(ARRAY_CENTER.0, ARRAY_CENTER.1), spacing, NUM_ANTENNAS, 0.0)
        .expect("reference array");
    let signal = SignalConfig {
        tx_power_w: signal::dbm_to_watts(TX_POWER_DBM),
        noise_figure_db: NOISE_FIGURE_DB,
        temperature_k: TEMPERATURE_K,
        pilot: num_complex::Complex64::new(1.0, 0.0),
        phase_error: PhaseErrorModel::UniformIid,
        thermal_noise: true,
    };
    let tracker = TrackerConfig { v_max: V_MAX_MPS, delta_t: DELTA_T_S, margin: MARGIN_M, grid_spacing: GRID_SPACING_M };
    let waypoints: Vec<Point> = WAYPOINTS.iter().map(|&(x, y)| Point::new(x, y)).collect();
    let trajectory = resample_waypoints(&waypoints, UE_SPEED_MPS, DELTA_T_S);
    let map = MapRegion { x_min: MAP.0, x_max: MAP.1, y_min: MAP.2, y_max: MAP.3, spacing: MAP_SPACING_M };
    Scenario { environment, array, ofdm, signal, tracker, trajectory, map: Some(map), seed: SEED }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn wall(id: usize, ax: f64, ay: f64, bx: f64, by: f64) -> Surface {
        Surface::new(id, Segment::new(pt(ax, ay), pt(bx, by)).unwrap(), ReflectModel::ConstantBeta(0.7)).unwrap()
    }

    /// Reference parameters with a custom scene, array and trajectory.
    fn scene(surfaces: Vec<Surface>, n: usize, trajectory: Vec<Point>) -> Scenario {
        let mut sc = reference_scenario();
        sc.environment = Environment::new(surfaces).unwrap();
        sc.array = ArrayGeometry::uniform_linear(pt(0.0, 0.0), sc.ofdm.carrier_wavelength() / 2.0, n, 0.0).unwrap();
        sc.trajectory = trajectory;
        sc.map = None;
        sc
    }

    #[test]
    fn awareness_subset_statistics() {
        let env = Environment::new((0..8).map(|i| wall(i, i as f64, 1.0, i as f64 + 0.5, 1.0)).collect()).unwrap();
        let draws = 10_000;
        let mut counts = [0usize; 8];
        for d in 0..draws {
            let mut rng = stream_rng(7, STREAM_AWARENESS, 4, d);
            let aw = sample_awareness(&env, 0.5, &mut rng);
            assert_eq!(aw.known_ids().len(), 4);
            for &id in aw.known_ids() {
                counts[id] += 1;
            }
        }
        for c in counts {
            let freq = c as f64 / draws as f64;
            assert!((freq - 0.5).abs() <= 0.02, "frequency {freq}");
        }
        let mut rng = stream_rng(7, 0, 0, 0);
        assert_eq!(sample_awareness(&env, 1.0, &mut rng).known_ids(), &[0, 1, 2, 3, 4, 5, 6, 7]);
        assert!(sample_awareness(&env, 0.0, &mut rng).known_ids().is_empty());
        // 0.3 * 8 = 2.4 rounds to 2.
        assert_eq!(sample_awareness(&env, 0.3, &mut rng).known_ids().len(), 2);
    }

    #[test]
    fn trackable_cases() {
        let array = ArrayGeometry::uniform_linear(pt(0.0, 0.0), 0.02, 8, 0.0).unwrap();
        let free = Environment::new(vec![]).unwrap();
        assert!(trackable(pt(3.0, 4.0), &free, &array));

        let boxed = Environment::new(vec![
            wall(0, 4.0, 4.0, 6.0, 4.0),
            wall(1, 6.0, 4.0, 6.0, 6.0),
            wall(2, 6.0, 6.0, 4.0, 6.0),
            wall(3, 4.0, 6.0, 4.0, 4.0),
        ])
        .unwrap();
        assert!(!trackable(pt(5.0, 5.0), &boxed, &array));

        // LOS cut by a blocker, one reflector on the far side.
        let nlos = Environment::new(vec![wall(0, -1.0, 2.0, 1.0, 2.0), wall(1, 3.0, 0.0, 3.0, 8.0)]).unwrap();
        let p = pt(0.0, 4.0);
        let ps = build_path_set(p, &array, nlos.surfaces());
        assert!(ps.per_element.iter().all(|e| e.iter().all(|r| r.kind != crate::PathKind::Los)));
        assert!(trackable(p, &nlos, &array));
    }

    #[test]
    fn resampled_waypoints_respect_speed() {
        let w = [pt(0.0, 0.0), pt(1.03, 0.0), pt(1.03, 0.0), pt(1.03, 2.0)];
        let traj = resample_waypoints(&w, 2.0, 0.05);
        assert_eq!(traj[0], w[0]);
        assert_eq!(*traj.last().unwrap(), w[3]);
        for pair in traj.windows(2) {
            assert!(pair[0].distance(pair[1]) <= 0.1 + 1e-12);
        }
        assert_eq!(resample_waypoints(&[pt(1.0, 1.0)], 2.0, 0.05), vec![pt(1.0, 1.0)]);
        assert!(resample_waypoints(&[], 2.0, 0.05).is_empty());
    }

    #[test]
    fn validate_rejects_fast_trajectory() {
        let sc = scene(vec![], 4, vec![pt(1.0, 1.0), pt(3.0, 1.0)]);
        assert!(matches!(sc.validate(), Err(ScenarioError::TrajectoryTooFast { step: 1, .. })));
        let sc = scene(vec![], 4, vec![]);
        assert!(matches!(sc.validate(), Err(ScenarioError::EmptyTrajectory)));
    }

    #[test]
    fn noiseless_free_space_line_is_exact() {
        let h = reference::GRID_SPACING_M;
        let mut traj = vec![pt(1.0, 6.0)];
        for _ in 0..20 {
            let prev = *traj.last().unwrap();
            traj.push(Point::new(prev.x + 2.0 * h, prev.y + 0.0 * h));
        }
        let sc = scene(vec![], 16, traj).noiseless();
        let recs = run_tracking(&sc, &AwarenessSet::full(0), ChannelModel::NearField).unwrap();
        assert_eq!(recs.len(), 20);
        for r in &recs {
            assert_eq!(r.error, 0.0, "step {}", r.step);
            assert!(!r.blind);
        }
    }

    #[test]
    fn tracking_is_seed_deterministic() {
        let mut sc = reference_scenario();
        sc.trajectory.truncate(12);
        let full = AwarenessSet::full(sc.environment.len());
        let strip = |v: Vec<TrackRecord>| v.into_iter().map(|r| (r.estimate, r.objective)).collect::<Vec<_>>();
        let a = strip(run_tracking(&sc, &full, ChannelModel::NearField).unwrap());
        let b = strip(run_tracking(&sc, &full, ChannelModel::NearField).unwrap());
        assert_eq!(a, b);
        sc.seed += 1;
        let c = strip(run_tracking(&sc, &full, ChannelModel::NearField).unwrap());
        assert_ne!(a.iter().map(|x| x.1).collect::<Vec<_>>(), c.iter().map(|x| x.1).collect::<Vec<_>>());
    }

    #[test]
    fn tracking_holds_in_blind_zone() {
        // The whole search disc stays inside the box.
        let boxed = vec![
            wall(0, 2.0, 2.0, 8.0, 2.0),
            wall(1, 8.0, 2.0, 8.0, 8.0),
            wall(2, 8.0, 8.0, 2.0, 8.0),
            wall(3, 2.0, 8.0, 2.0, 2.0),
        ];
        let sc = scene(boxed, 8, vec![pt(5.0, 5.0), pt(5.05, 5.0), pt(5.1, 5.0)]);
        let recs = run_tracking(&sc, &AwarenessSet::full(4), ChannelModel::NearField).unwrap();
        assert!(recs.iter().all(|r| r.blind && r.estimate == pt(5.0, 5.0) && r.objective == 0.0));
    }

    #[test]
    fn awareness_must_match_environment() {
        let sc = scene(vec![wall(0, 5.0, 1.0, 5.0, 3.0)], 4, vec![pt(1.0, 1.0)]);
        let err = run_tracking(&sc, &AwarenessSet::full(3), ChannelModel::NearField).unwrap_err();
        assert!(matches!(err, ScenarioError::AwarenessMismatch { awareness: 3, environment: 1 }));
    }

    #[test]
    fn rmse_map_marks_untrackable_cells() {
        let boxed = vec![
            wall(0, 4.0, 4.0, 6.0, 4.0),
            wall(1, 6.0, 4.0, 6.0, 6.0),
            wall(2, 6.0, 6.0, 4.0, 6.0),
            wall(3, 4.0, 6.0, 4.0, 4.0),
        ];
        let sc = scene(boxed, 8, vec![pt(1.0, 1.0)]).noiseless();
        let cells = rmse_map(&sc, &[pt(5.0, 5.0), pt(2.0, 2.0)], 2, ChannelModel::NearField, &AwarenessSet::full(4))
            .unwrap();
        assert!(!cells[0].trackable && cells[0].rmse.is_none());
        assert!(cells[1].trackable);
        assert_eq!(cells[1].rmse, Some(0.0));
        assert!(rmse_map(&sc, &[], 0, ChannelModel::NearField, &AwarenessSet::full(4)).is_err());
    }

    #[test]
    fn sweep_rows_cover_levels_and_models() {
        let mut sc = scene(vec![wall(0, 3.0, 0.5, 3.0, 6.0), wall(1, -3.0, 0.5, -3.0, 6.0)], 8, vec![pt(1.0, 1.0)]);
        sc.seed = 11;
        let models = [ChannelModel::NearField, ChannelModel::FarField];
        let rows = sweep_eta(&sc, &[pt(0.5, 3.0), pt(-1.0, 2.0)], 2, &models).unwrap();
        assert_eq!(rows.len(), 3 * 2);
        let etas: Vec<f64> = rows.iter().map(|r| r.eta).collect();
        assert_eq!(etas, vec![0.0, 0.0, 0.5, 0.5, 1.0, 1.0]);
        assert!(rows.iter().all(|r| r.rmse >= 0.0 && r.n_draws == 2 && r.draw_rmse.len() == 2));
    }

    #[test]
    fn map_region_positions() {
        let m = MapRegion { x_min: 1.0, x_max: 3.0, y_min: 0.0, y_max: 1.0, spacing: 1.0 };
        let p = m.positions();
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], pt(1.0, 0.0));
        assert_eq!(p[3], pt(1.0, 1.0));
        assert!(MapRegion { spacing: 0.0, ..m }.validate().is_err());
    }

    #[test]
    fn reference_scene_is_valid() {
        let sc = reference_scenario();
        sc.validate().unwrap();
        assert_eq!(sc.environment.len(), 8);
        assert_eq!(sc.array.len(), 64);
        assert!((sc.signal.noise_variance(&sc.ofdm).unwrap() - 2.408e-15).abs() / 2.408e-15 < 1e-3);
    }
}
