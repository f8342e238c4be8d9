//! Wireless service-rate model and the M/D/1 delay formulas for the three
//! kinds of path a task can take: local computation, offload to a
//! neighboring fog node, or offload to the cloud through the base station.
//!
//! All quantities are linear SI: rates in packets/s, delays in seconds,
//! powers in watts. Conversions from dBm happen in [`RadioParams::from_dbm`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, QueueKind, Result};

/// Relative headroom a queue must keep below its service rate when it is
/// used as a path in a task distribution: `lambda <= (1 - margin) * mu`.
pub const STABILITY_MARGIN: f64 = 1e-6;

/// Largest arrival rate a queue with service rate `mu` accepts on a path.
#[inline]
pub fn stable_limit(mu: f64) -> f64 {
    (1.0 - STABILITY_MARGIN) * mu
}

#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Physical-layer constants behind the link service rate, in linear units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    pub bandwidth_hz: f64,
    pub noise_psd_w_per_hz: f64,
    pub tx_power_w: f64,
    pub pathloss_const: f64,
    pub pathloss_exp: f64,
    pub packet_size_bits: f64,
}

impl RadioParams {
    /// Builds the linear parameter set from the usual datasheet units.
    pub fn from_dbm(
        bandwidth_hz: f64,
        noise_psd_dbm_per_hz: f64,
        tx_power_dbm: f64,
        pathloss_const: f64,
        pathloss_exp: f64,
        packet_size_bytes: f64,
    ) -> Result<Self> {
        let params = RadioParams {
            bandwidth_hz,
            noise_psd_w_per_hz: dbm_to_watts(noise_psd_dbm_per_hz),
            tx_power_w: dbm_to_watts(tx_power_dbm),
            pathloss_const,
            pathloss_exp,
            packet_size_bits: packet_size_bytes * 8.0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("bandwidth_hz", self.bandwidth_hz),
            ("noise_psd", self.noise_psd_w_per_hz),
            ("tx_power", self.tx_power_w),
            ("pathloss_const", self.pathloss_const),
            ("pathloss_exp", self.pathloss_exp),
            ("packet_size", self.packet_size_bits),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("radio {name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Parameters used throughout the reference scenario: 15 kHz subcarrier,
    /// -174 dBm/Hz noise, 20 dBm transmit power, -30 dB at 1 m with
    /// exponent 4, and 1500-byte packets.
    pub fn reference() -> Self {
        RadioParams::from_dbm(15e3, -174.0, 20.0, 1e-3, 4.0, 1500.0).expect("reference radio parameters are valid")
    }
}

/// Hardware profile of a computing node.
///
/// `mu` is the rate of the computation queue (packets/s) and `c` the
/// per-packet computing constant, so the computing time for a load
/// `lambda` is `c * lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComputeProfile {
    pub mu: f64,
    pub c: f64,
}

impl ComputeProfile {
    pub fn new(mu: f64, c: f64) -> Result<Self> {
        let prof = ComputeProfile { mu, c };
        prof.validate()?;
        Ok(prof)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::domain(format!("compute rate mu must be positive, got {}", self.mu)));
        }
        if !(self.c.is_finite() && self.c >= 0.0) {
            return Err(Error::domain(format!("compute constant c must be non-negative, got {}", self.c)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Linear channel gain `beta1 * d^-beta2`.
pub fn channel_gain(distance_m: f64, radio: &RadioParams) -> Result<f64> {
    if !(distance_m > 0.0) || !distance_m.is_finite() {
        return Err(Error::domain(format!("distance must be positive, got {distance_m}")));
    }
    Ok(radio.pathloss_const * distance_m.powf(-radio.pathloss_exp))
}

/// Link service rate in packets/s: Shannon capacity of the channel at
/// `distance_m` divided by the packet size.
pub fn service_rate(distance_m: f64, radio: &RadioParams) -> Result<f64> {
    let gain = channel_gain(distance_m, radio)?;
    let snr = gain * radio.tx_power_w / (radio.bandwidth_hz * radio.noise_psd_w_per_hz);
    Ok(radio.bandwidth_hz * (1.0 + snr).log2() / radio.packet_size_bits)
}

fn check_rates(lambda: f64, mu: f64, queue: QueueKind) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::domain(format!("arrival rate must be non-negative, got {lambda}")));
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::domain(format!("service rate must be positive, got {mu}")));
    }
    if lambda >= mu {
        return Err(Error::Unstable { queue, lambda, mu, limit: mu });
    }
    Ok(())
}

/// Mean waiting time of an M/D/1 queue, `lambda / (2 mu (mu - lambda))`.
pub fn md1_wait(lambda: f64, mu: f64) -> Result<f64> {
    check_rates(lambda, mu, QueueKind::Transmission)?;
    Ok(md1_wait_unchecked(lambda, mu))
}

#[inline]
fn md1_wait_unchecked(lambda: f64, mu: f64) -> f64 {
    lambda / (2.0 * mu * (mu - lambda))
}

/// Transmission-queue delay: M/D/1 wait plus the transmission time `1/mu`.
pub fn tx_delay(lambda: f64, mu_tx: f64) -> Result<f64> {
    check_rates(lambda, mu_tx, QueueKind::Transmission)?;
    Ok(md1_wait_unchecked(lambda, mu_tx) + 1.0 / mu_tx)
}

/// Computation delay at a fog node: M/D/1 wait, fetch time `1/mu`, and the
/// computing time `c * lambda`.
pub fn comp_delay_fog(lambda: f64, prof: &ComputeProfile) -> Result<f64> {
    check_rates(lambda, prof.mu, QueueKind::Computation)?;
    Ok(md1_wait_unchecked(lambda, prof.mu) + 1.0 / prof.mu + prof.c * lambda)
}

/// Computation delay at the cloud. No queueing, only `c_c * lambda`.
pub fn comp_delay_cloud(lambda: f64, c_cloud: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::domain(format!("arrival rate must be non-negative, got {lambda}")));
    }
    if !(c_cloud >= 0.0) {
        return Err(Error::domain(format!("cloud compute constant must be non-negative, got {c_cloud}")));
    }
    Ok(c_cloud * lambda)
}

/// Cloud access: base-station link rate and cloud computing constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudLink {
    pub mu_tx: f64,
    pub c: f64,
}

/// Link to a neighboring fog node plus that node's hardware.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FogLink {
    pub mu_tx: f64,
    pub prof: ComputeProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Local,
    Cloud,
    Fog,
}

/// One destination for a share of the initiator's tasks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Path {
    Local(ComputeProfile),
    Cloud(CloudLink),
    Fog(FogLink),
}

impl Path {
    pub fn kind(&self) -> PathKind {
        match self {
            Path::Local(_) => PathKind::Local,
            Path::Cloud(_) => PathKind::Cloud,
            Path::Fog(_) => PathKind::Fog,
        }
    }

    /// Largest task rate the path accepts, after the stability margin.
    pub fn stable_cap(&self) -> f64 {
        match self {
            Path::Local(p) => stable_limit(p.mu),
            Path::Cloud(l) => stable_limit(l.mu_tx),
            Path::Fog(l) => stable_limit(l.mu_tx.min(l.prof.mu)),
        }
    }

    /// Delay with no load routed to the path.
    pub fn zero_load_delay(&self) -> f64 {
        match self {
            Path::Local(p) => 1.0 / p.mu,
            Path::Cloud(l) => 1.0 / l.mu_tx,
            Path::Fog(l) => 1.0 / l.mu_tx + 1.0 / l.prof.mu,
        }
    }

    /// End-to-end delay when `lambda` packets/s are routed to the path.
    pub fn delay_at_rate(&self, lambda: f64) -> Result<f64> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::domain(format!("arrival rate must be non-negative, got {lambda}")));
        }
        match self {
            Path::Local(p) => {
                guard(lambda, p.mu, QueueKind::Computation)?;
                comp_delay_fog(lambda, p)
            }
            Path::Cloud(l) => {
                guard(lambda, l.mu_tx, QueueKind::Transmission)?;
                Ok(tx_delay(lambda, l.mu_tx)? + comp_delay_cloud(lambda, l.c)?)
            }
            Path::Fog(l) => {
                guard(lambda, l.mu_tx, QueueKind::Transmission)?;
                guard(lambda, l.prof.mu, QueueKind::Computation)?;
                Ok(tx_delay(lambda, l.mu_tx)? + comp_delay_fog(lambda, &l.prof)?)
            }
        }
    }
}

fn guard(lambda: f64, mu: f64, queue: QueueKind) -> Result<()> {
    let limit = stable_limit(mu);
    if lambda > limit {
        return Err(Error::Unstable { queue, lambda, mu, limit });
    }
    Ok(())
}

/// Delay experienced by a task routed to `path` when a fraction `alpha`
/// of the input rate `x_i` goes there.
pub fn path_delay(path: &Path, alpha: f64, x_i: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!("fraction must lie in [0, 1], got {alpha}")));
    }
    if !(x_i >= 0.0) || !x_i.is_finite() {
        return Err(Error::domain(format!("input rate must be non-negative, got {x_i}")));
    }
    path.delay_at_rate(alpha * x_i)
}
