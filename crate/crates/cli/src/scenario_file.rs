//! JSON scenario files.
//!
//! Every section rejects unknown keys. Powers are given in dBm and noise
//! figures in dB; conversion to linear units happens when the file is
//! turned into a [`Scenario`].

use std::path::Path;

use nftrack_core::scenario::{resample_waypoints, MapRegion};
use nftrack_core::signal::dbm_to_watts;
use nftrack_core::{
    ArrayGeometry, Complex64, Environment, OfdmConfig, PhaseErrorModel, Point, ReflectModel, Scenario, Segment, SignalConfig,
    Surface, TrackerConfig,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub seed: u64,
    pub surfaces: Vec<SurfaceSpec>,
    pub array: ArraySpec,
    pub ofdm: OfdmSpec,
    pub signal: SignalSpec,
    pub tracker: TrackerSpec,
    pub trajectory: TrajectorySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub reflect: ReflectSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ReflectSpec {
    /// Constant amplitude coefficient in `[0, 1]`.
    ConstantBeta(f64),
    /// TE Fresnel coefficient of a half-space with relative permittivity.
    Fresnel { eps_r: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArraySpec {
    pub n: usize,
    /// Element spacing in meters; half the carrier wavelength when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing_m: Option<f64>,
    /// Array centre.
    pub origin: [f64; 2],
    /// Direction of the array axis, counter-clockwise from +x.
    #[serde(default)]
    pub orientation_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfdmSpec {
    pub fc_hz: f64,
    pub bandwidth_hz: f64,
    pub delta_f_hz: f64,
    pub m: usize,
    /// Explicit tracking subcarriers; spread uniformly over the band when
    /// absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcarriers_hz: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSpec {
    pub p_dbm: f64,
    pub noise_figure_db: f64,
    pub temperature_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackerSpec {
    pub v_max_mps: f64,
    pub delta_t_s: f64,
    pub margin_m: f64,
    pub grid_spacing_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySpec {
    pub waypoints: Vec<[f64; 2]>,
    pub speed_mps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub spacing_m: f64,
}

fn point(xy: [f64; 2]) -> Point {
    Point::new(xy[0], xy[1])
}

fn config(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(config)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Builds and validates the scenario.
    pub fn to_scenario(&self) -> Result<Scenario, CliError> {
        let surfaces = self
            .surfaces
            .iter()
            .enumerate()
            .map(|(id, s)| {
                let geom = Segment::new(point(s.a), point(s.b)).map_err(|e| config(format!("surface {id}: {e}")))?;
                let model = match s.reflect {
                    ReflectSpec::ConstantBeta(beta) => ReflectModel::ConstantBeta(beta),
                    ReflectSpec::Fresnel { eps_r } => ReflectModel::Fresnel { eps_r },
                };
                Surface::new(id, geom, model).map_err(|e| config(format!("surface {id}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let environment = Environment::new(surfaces).map_err(config)?;

        let o = &self.ofdm;
        let ofdm = match &o.subcarriers_hz {
            Some(freqs) => {
                if freqs.len() != o.m {
                    return Err(config(format!("ofdm.m = {} but {} subcarriers listed", o.m, freqs.len())));
                }
                OfdmConfig::new(o.fc_hz, o.bandwidth_hz, o.delta_f_hz, freqs.clone())
            }
            None => OfdmConfig::with_default_subcarriers(o.fc_hz, o.bandwidth_hz, o.delta_f_hz, o.m),
        }
        .map_err(config)?;

        let a = &self.array;
        let spacing = a.spacing_m.unwrap_or(ofdm.carrier_wavelength() / 2.0);
        if !(spacing > 0.0) {
            return Err(config(format!("array.spacing_m must be positive, got {spacing}")));
        }
        let array = ArrayGeometry::uniform_linear(point(a.origin), spacing, a.n, a.orientation_deg.to_radians())
            .map_err(config)?;

        let signal = SignalConfig {
            tx_power_w: dbm_to_watts(self.signal.p_dbm),
            noise_figure_db: self.signal.noise_figure_db,
            temperature_k: self.signal.temperature_k,
            pilot: Complex64::new(1.0, 0.0),
            phase_error: PhaseErrorModel::UniformIid,
            thermal_noise: true,
        };
        let t = &self.tracker;
        let tracker =
            TrackerConfig { v_max: t.v_max_mps, delta_t: t.delta_t_s, margin: t.margin_m, grid_spacing: t.grid_spacing_m };

        let tr = &self.trajectory;
        if !(tr.speed_mps > 0.0) {
            return Err(config(format!("trajectory.speed_mps must be positive, got {}", tr.speed_mps)));
        }
        if !(t.delta_t_s > 0.0) {
            return Err(config(format!("tracker.delta_t_s must be positive, got {}", t.delta_t_s)));
        }
        let waypoints: Vec<Point> = tr.waypoints.iter().copied().map(point).collect();
        let trajectory = resample_waypoints(&waypoints, tr.speed_mps, t.delta_t_s);

        let map = self.map.map(|m| MapRegion {
            x_min: m.x_min,
            x_max: m.x_max,
            y_min: m.y_min,
            y_max: m.y_max,
            spacing: m.spacing_m,
        });
        let sc = Scenario { environment, array, ofdm, signal, tracker, trajectory, map, seed: self.seed };
        sc.validate()?;
        Ok(sc)
    }
}


impl ScenarioFile {
    /// The shipped reference scene in file form.
    pub fn reference() -> Self {
        use nftrack_core::scenario::reference::*;
        ScenarioFile {
            schema_version: SCHEMA_VERSION,
            seed: SEED,
            surfaces: SURFACES
                .iter()
                .map(|&(ax, ay, bx, by)| SurfaceSpec {
                    a: [ax, ay],
                    b: [bx, by],
                    reflect: ReflectSpec::ConstantBeta(SURFACE_BETA),
                })
                .collect(),
            array: ArraySpec { n: NUM_ANTENNAS, spacing_m: None, origin: [ARRAY_CENTER.0, ARRAY_CENTER.1], orientation_deg: 0.0 },
            ofdm: OfdmSpec {
                fc_hz: CARRIER_HZ,
                bandwidth_hz: BANDWIDTH_HZ,
                delta_f_hz: SUBCARRIER_SPACING_HZ,
                m: NUM_SUBCARRIERS,
                subcarriers_hz: None,
            },
            signal: SignalSpec { p_dbm: TX_POWER_DBM, noise_figure_db: NOISE_FIGURE_DB, temperature_k: TEMPERATURE_K },
            tracker: TrackerSpec {
                v_max_mps: V_MAX_MPS,
                delta_t_s: DELTA_T_S,
                margin_m: MARGIN_M,
                grid_spacing_m: GRID_SPACING_M,
            },
            trajectory: TrajectorySpec { waypoints: WAYPOINTS.iter().map(|&(x, y)| [x, y]).collect(), speed_mps: UE_SPEED_MPS },
            map: Some(MapSpec { x_min: MAP.0, x_max: MAP.1, y_min: MAP.2, y_max: MAP.3, spacing_m: MAP_SPACING_M }),
        }
    }
}
