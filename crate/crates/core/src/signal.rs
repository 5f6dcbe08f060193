//! OFDM subcarrier grid, thermal noise calibration and uplink pilot
//! synthesis.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::propagation::ChannelMatrix;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380649e-23;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("subcarrier {index} at {freq} Hz lies outside the band [{lo}, {hi}] Hz")]
    OutOfBand { index: usize, freq: f64, lo: f64, hi: f64 },
    #[error("at least one subcarrier is required")]
    NoSubcarriers,
    #[error("pilot symbol must have unit modulus, got |x| = {0}")]
    PilotNotUnitModulus(f64),
}

fn positive(name: &'static str, value: f64) -> Result<f64, SignalError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(SignalError::NonPositive { name, value })
    }
}

/// `k_B * T * Δf * F` with the noise figure given in dB.
pub fn noise_variance(temperature_k: f64, delta_f_hz: f64, noise_figure_db: f64) -> Result<f64, SignalError> {
    positive("temperature", temperature_k)?;
    positive("subcarrier spacing", delta_f_hz)?;
    Ok(BOLTZMANN * temperature_k * delta_f_hz * db_to_linear(noise_figure_db))
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// `M` tracking subcarriers spread uniformly across the band, symmetric
/// about the carrier.
pub fn default_subcarriers(fc_hz: f64, bandwidth_hz: f64, m: usize) -> Vec<f64> {
    let step = bandwidth_hz / m as f64;
    let mid = (m as f64 + 1.0) / 2.0;
    (1..=m).map(|i| fc_hz + (i as f64 - mid) * step).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OfdmConfig {
    fc: f64,
    bandwidth: f64,
    delta_f: f64,
    freqs: Vec<f64>,
    wavelengths: Vec<f64>,
    /// `2π / λ_m`
    wavenumbers: Vec<f64>,
    /// Wavenumber increment when the grid is uniformly spaced.
    uniform_step: Option<f64>,
}

impl OfdmConfig {
    pub fn new(fc: f64, bandwidth: f64, delta_f: f64, freqs: Vec<f64>) -> Result<Self, SignalError> {
        positive("carrier frequency", fc)?;
        positive("bandwidth", bandwidth)?;
        positive("subcarrier spacing", delta_f)?;
        if freqs.is_empty() {
            return Err(SignalError::NoSubcarriers);
        }
        let (lo, hi) = (fc - bandwidth / 2.0, fc + bandwidth / 2.0);
        for (index, &freq) in freqs.iter().enumerate() {
            if !(lo..=hi).contains(&freq) {
                return Err(SignalError::OutOfBand { index, freq, lo, hi });
            }
        }
        let wavelengths: Vec<f64> = freqs.iter().map(|f| SPEED_OF_LIGHT / f).collect();
        let wavenumbers: Vec<f64> = freqs.iter().map(|f| TAU * f / SPEED_OF_LIGHT).collect();
        let uniform_step = uniform_increment(&wavenumbers);
        Ok(OfdmConfig { fc, bandwidth, delta_f, freqs, wavelengths, wavenumbers, uniform_step })
    }

    /// Grid built with [`default_subcarriers`].
    pub fn with_default_subcarriers(fc: f64, bandwidth: f64, delta_f: f64, m: usize) -> Result<Self, SignalError> {
        if m == 0 {
            return Err(SignalError::NoSubcarriers);
        }
        Self::new(fc, bandwidth, delta_f, default_subcarriers(fc, bandwidth, m))
    }

    pub fn fc(&self) -> f64 {
        self.fc
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn delta_f(&self) -> f64 {
        self.delta_f
    }

    /// Number of tracking subcarriers `M`.
    pub fn num_subcarriers(&self) -> usize {
        self.freqs.len()
    }

    pub fn subcarrier_freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn wavelength(&self, m: usize) -> f64 {
        self.wavelengths[m]
    }

    pub fn wavelengths(&self) -> &[f64] {
        &self.wavelengths
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub(crate) fn uniform_step(&self) -> Option<f64> {
        self.uniform_step
    }

    pub fn carrier_wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.fc
    }
}

fn uniform_increment(k: &[f64]) -> Option<f64> {
    if k.len() < 2 {
        return None;
    }
    let step = (k[k.len() - 1] - k[0]) / (k.len() - 1) as f64;
    let uniform = k
        .windows(2)
        .all(|w| ((w[1] - w[0]) - step).abs() <= 1e-9 * step.abs().max(f64::MIN_POSITIVE));
    (uniform && step != 0.0).then_some(step)
}

/// Distribution of the synchronization phase error `φ_{k,m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseErrorModel {
    /// i.i.d. uniform on `[0, 2π)` per step and subcarrier.
    #[default]
    UniformIid,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalConfig {
    pub tx_power_w: f64,
    pub noise_figure_db: f64,
    pub temperature_k: f64,
    pub pilot: Complex64,
    pub phase_error: PhaseErrorModel,
    /// When false the thermal noise term is dropped entirely.
    pub thermal_noise: bool,
}

impl SignalConfig {
    pub fn validate(&self) -> Result<(), SignalError> {
        positive("transmit power", self.tx_power_w)?;
        positive("temperature", self.temperature_k)?;
        let modulus = self.pilot.norm();
        if (modulus - 1.0).abs() > 1e-12 {
            return Err(SignalError::PilotNotUnitModulus(modulus));
        }
        Ok(())
    }

    /// Per-entry noise variance on the given grid (0 when noise is off).
    pub fn noise_variance(&self, ofdm: &OfdmConfig) -> Result<f64, SignalError> {
        if !self.thermal_noise {
            return Ok(0.0);
        }
        noise_variance(self.temperature_k, ofdm.delta_f(), self.noise_figure_db)
    }
}

/// One tracking step's `M x N` observation (row = subcarrier).
#[derive(Debug, Clone, PartialEq)]
pub struct RxBlock {
    pub step: usize,
    num_elements: usize,
    values: Vec<Complex64>,
}

impl RxBlock {
    pub fn new(step: usize, num_subcarriers: usize, num_elements: usize, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), num_subcarriers * num_elements, "rx block shape mismatch");
        RxBlock { step, num_elements, values }
    }

    pub fn num_subcarriers(&self) -> usize {
        self.values.len() / self.num_elements
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn row(&self, m: usize) -> &[Complex64] {
        &self.values[m * self.num_elements..(m + 1) * self.num_elements]
    }

    pub fn row_mut(&mut self, m: usize) -> &mut [Complex64] {
        let n = self.num_elements;
        &mut self.values[m * n..(m + 1) * n]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Draws one received block `z_{k,m} = sqrt(P/M) h_m x e^{iφ} + w`.
///
/// `channel` must be the true channel at the UE position. Noise is
/// circularly-symmetric complex Gaussian with per-entry variance from the
/// signal configuration.
pub fn synthesize_rx<R: Rng + ?Sized>(
    step: usize,
    channel: &ChannelMatrix,
    sig: &SignalConfig,
    ofdm: &OfdmConfig,
    rng: &mut R,
) -> Result<RxBlock, SignalError> {
    let m_count = channel.num_subcarriers();
    let n_count = channel.num_elements();
    let amplitude = (sig.tx_power_w / m_count as f64).sqrt();
    let sigma = (sig.noise_variance(ofdm)? / 2.0).sqrt();

    let mut values = Vec::with_capacity(m_count * n_count);
    for m in 0..m_count {
        let phase = match sig.phase_error {
            PhaseErrorModel::UniformIid => rng.random_range(0.0..TAU),
            PhaseErrorModel::None => 0.0,
        };
        let scale = sig.pilot * Complex64::from_polar(amplitude, phase);
        for &h in channel.row(m) {
            let mut z = h * scale;
            if sigma > 0.0 {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                z += Complex64::new(re * sigma, im * sigma);
            }
            values.push(z);
        }
    }
    Ok(RxBlock::new(step, m_count, n_count, values))
}
