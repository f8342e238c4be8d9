//! C ABI for the fogform simulator.
//!
//! Every function returns an [`FfStatus`]; results come back through out
//! pointers. On failure, [`ff_last_error`] describes the most recent error
//! on the calling thread. Node sets and solve reports are opaque handles
//! that must be released with their `_free` function.
//!
//! # Safety
//!
//! Every pointer argument must be null or valid for the reads and writes
//! its documentation describes; arrays must hold at least the stated
//! number of elements. Handles must come from the matching constructor and
//! be freed exactly once. Null pointers are reported, never dereferenced.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use fogform::{
    md1_wait, online_secretary, service_rate, solve_distribution, CloudLink, ComputeProfile, Error, Experiment,
    FogCandidate, FogLink, NodeSet, Override, Position, RadioParams, SecretaryParams, SolveReport, StreamEnd,
};

/// Outcome of an API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FfStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Unstable = 3,
    Infeasible = 4,
    OracleRefused = 5,
    Config = 6,
    Io = 7,
    InvalidString = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// Radio parameters in linear units (Hz, W/Hz, W, bits).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FfRadio {
    pub bandwidth_hz: f64,
    pub noise_psd_w_per_hz: f64,
    pub tx_power_w: f64,
    pub pathloss_const: f64,
    pub pathloss_exp: f64,
    pub packet_size_bits: f64,
}

impl From<FfRadio> for RadioParams {
    fn from(r: FfRadio) -> Self {
        RadioParams {
            bandwidth_hz: r.bandwidth_hz,
            noise_psd_w_per_hz: r.noise_psd_w_per_hz,
            tx_power_w: r.tx_power_w,
            pathloss_const: r.pathloss_const,
            pathloss_exp: r.pathloss_exp,
            packet_size_bits: r.packet_size_bits,
        }
    }
}

/// A candidate neighbor for online selection, in arrival order.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FfCandidate {
    /// Link rate from the initiator, packets/s.
    pub mu_tx: f64,
    /// Computation queue rate, packets/s.
    pub mu: f64,
    /// Per-packet computing constant.
    pub c: f64,
}

/// Opaque set of paths available to the initiating node.
pub struct FfNodeSet(NodeSet);

/// Opaque result of [`ff_solve`].
pub struct FfSolveReport {
    report: SolveReport,
    fractions: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FfStatus {
    match e {
        Error::Domain(_) => FfStatus::Domain,
        Error::Unstable { .. } => FfStatus::Unstable,
        Error::Infeasible { .. } => FfStatus::Infeasible,
        Error::OracleRefused(_) => FfStatus::OracleRefused,
        Error::Config { .. } => FfStatus::Config,
        Error::Io { .. } => FfStatus::Io,
    }
}

struct Failure(FfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(FfStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_last_error(format!("internal panic: {msg}"));
            FfStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(FfStatus::InvalidString, format!("`{what}` is not valid UTF-8")))
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ff_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Reference radio: 15 kHz, -174 dBm/Hz noise, 20 dBm, 1e-3 d^-4, 1500-byte packets.
#[no_mangle]
pub unsafe extern "C" fn ff_radio_reference(radio: *mut FfRadio) -> FfStatus {
    guard(|| {
        let r = RadioParams::reference();
        *out(radio, "radio")? = FfRadio {
            bandwidth_hz: r.bandwidth_hz,
            noise_psd_w_per_hz: r.noise_psd_w_per_hz,
            tx_power_w: r.tx_power_w,
            pathloss_const: r.pathloss_const,
            pathloss_exp: r.pathloss_exp,
            packet_size_bits: r.packet_size_bits,
        };
        Ok(())
    })
}

/// Link service rate in packets/s at `distance_m`.
#[no_mangle]
pub unsafe extern "C" fn ff_service_rate(distance_m: f64, radio: *const FfRadio, rate: *mut f64) -> FfStatus {
    guard(|| {
        let radio = radio.as_ref().ok_or_else(|| null("radio"))?;
        *out(rate, "rate")? = service_rate(distance_m, &(*radio).into())?;
        Ok(())
    })
}

/// Mean M/D/1 waiting time at arrival rate `lambda` and service rate `mu`.
#[no_mangle]
pub unsafe extern "C" fn ff_md1_wait(lambda: f64, mu: f64, wait: *mut f64) -> FfStatus {
    guard(|| {
        *out(wait, "wait")? = md1_wait(lambda, mu)?;
        Ok(())
    })
}

/// Creates a node set with only the local path. `x_i` is the input rate.
#[no_mangle]
pub unsafe extern "C" fn ff_node_set_new(
    x_i: f64,
    local_mu: f64,
    local_c: f64,
    nodes: *mut *mut FfNodeSet,
) -> FfStatus {
    guard(|| {
        let slot = out(nodes, "nodes")?;
        let local = ComputeProfile::new(local_mu, local_c)?;
        *slot = Box::into_raw(Box::new(FfNodeSet(NodeSet::new(x_i, local, None, Vec::new()))));
        Ok(())
    })
}

/// Sets (or replaces) the cloud path.
#[no_mangle]
pub unsafe extern "C" fn ff_node_set_set_cloud(nodes: *mut FfNodeSet, mu_tx: f64, c_cloud: f64) -> FfStatus {
    guard(|| {
        let nodes = out(nodes, "nodes")?;
        nodes.0.cloud = Some(CloudLink { mu_tx, c: c_cloud });
        Ok(())
    })
}

/// Appends a neighboring fog node.
#[no_mangle]
pub unsafe extern "C" fn ff_node_set_add_neighbor(nodes: *mut FfNodeSet, mu_tx: f64, mu: f64, c: f64) -> FfStatus {
    guard(|| {
        let nodes = out(nodes, "nodes")?;
        let prof = ComputeProfile::new(mu, c)?;
        nodes.0.neighbors.push(FogLink { mu_tx, prof });
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ff_node_set_free(nodes: *mut FfNodeSet) {
    if !nodes.is_null() {
        drop(Box::from_raw(nodes));
    }
}

/// Min-max task distribution. Paths are ordered local, cloud (if set),
/// then neighbors in insertion order.
#[no_mangle]
pub unsafe extern "C" fn ff_solve(
    nodes: *const FfNodeSet,
    eta: f64,
    tolerance: f64,
    report: *mut *mut FfSolveReport,
) -> FfStatus {
    guard(|| {
        let nodes = nodes.as_ref().ok_or_else(|| null("nodes"))?;
        let slot = out(report, "report")?;
        let r = solve_distribution(&nodes.0, eta, tolerance)?;
        let fractions = r.distribution.path_fractions(&nodes.0);
        *slot = Box::into_raw(Box::new(FfSolveReport { report: r, fractions }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ff_report_free(report: *mut FfSolveReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Number of paths in the report; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ff_report_path_count(report: *const FfSolveReport) -> usize {
    report.as_ref().map_or(0, |r| r.fractions.len())
}

/// Fraction of the input, delay, and whether the path carries load.
#[no_mangle]
pub unsafe extern "C" fn ff_report_path(
    report: *const FfSolveReport,
    index: usize,
    alpha: *mut f64,
    delay: *mut f64,
    active: *mut bool,
) -> FfStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if index >= r.fractions.len() {
            return Err(Failure(
                FfStatus::Domain,
                format!("path index {index} out of range (0..{})", r.fractions.len()),
            ));
        }
        *out(alpha, "alpha")? = r.fractions[index];
        *out(delay, "delay")? = r.report.per_path_delays[index];
        *out(active, "active")? = r.report.active_mask[index];
        Ok(())
    })
}

/// Common delay, worst path delay, and total cost (worst delay plus the
/// per-node cost).
#[no_mangle]
pub unsafe extern "C" fn ff_report_summary(
    report: *const FfSolveReport,
    common_delay: *mut f64,
    max_delay: *mut f64,
    total_cost: *mut f64,
) -> FfStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        *out(common_delay, "common_delay")? = r.report.common_delay;
        *out(max_delay, "max_delay")? = r.report.max_delay;
        *out(total_cost, "total_cost")? = r.report.total_cost;
        Ok(())
    })
}

/// Online neighbor selection over `count` candidates in arrival order.
/// Writes the 0-based arrival positions of accepted candidates into
/// `chosen` (capacity `capacity`, at least `max_neighbors`) and their
/// number into `chosen_len`. With `fill_remaining`, the last arrivals are
/// taken when they are needed to reach `max_neighbors`.
#[no_mangle]
pub unsafe extern "C" fn ff_online_secretary(
    candidates: *const FfCandidate,
    count: usize,
    tau: usize,
    max_neighbors: usize,
    fill_remaining: bool,
    chosen: *mut usize,
    capacity: usize,
    chosen_len: *mut usize,
) -> FfStatus {
    guard(|| {
        if candidates.is_null() && count > 0 {
            return Err(null("candidates"));
        }
        if chosen.is_null() {
            return Err(null("chosen"));
        }
        let len_slot = out(chosen_len, "chosen_len")?;
        if capacity < max_neighbors {
            return Err(Failure(
                FfStatus::BufferTooSmall,
                format!("capacity {capacity} is below max_neighbors {max_neighbors}"),
            ));
        }
        let input = if count == 0 { &[][..] } else { std::slice::from_raw_parts(candidates, count) };
        let stream = input
            .iter()
            .enumerate()
            .map(|(k, c)| {
                Ok(FogCandidate {
                    id: k,
                    position: Position::new(0.0, 0.0),
                    mu_tx: c.mu_tx,
                    prof: ComputeProfile::new(c.mu, c.c)?,
                    arrival_index: k + 1,
                })
            })
            .collect::<Result<Vec<_>, Error>>()?;
        let stream_end = if fill_remaining { StreamEnd::FillRemaining } else { StreamEnd::Strict };
        let params = SecretaryParams { tau, max_neighbors, stream_end };
        let outcome = online_secretary(&stream, params, |_| None)?;
        let dst = std::slice::from_raw_parts_mut(chosen, capacity);
        for (slot, c) in dst.iter_mut().zip(&outcome.chosen) {
            *slot = c.id;
        }
        *len_slot = outcome.chosen.len();
        Ok(())
    })
}

/// Runs a named experiment and writes `<name>.csv` and `<name>.manifest`
/// into `out_dir`. `config_path` may be NULL for the built-in defaults.
/// `overrides` holds `override_count` strings of the form `key=value`.
#[no_mangle]
pub unsafe extern "C" fn ff_run_experiment(
    name: *const c_char,
    config_path: *const c_char,
    overrides: *const *const c_char,
    override_count: usize,
    out_dir: *const c_char,
    workers: usize,
) -> FfStatus {
    guard(|| {
        let experiment: Experiment = str_arg(name, "name")?.parse()?;
        let out_dir = str_arg(out_dir, "out_dir")?;
        if overrides.is_null() && override_count > 0 {
            return Err(null("overrides"));
        }
        let mut parsed = Vec::with_capacity(override_count);
        for k in 0..override_count {
            parsed.push(str_arg(*overrides.add(k), "overrides[k]")?.parse::<Override>()?);
        }
        let cfg = if config_path.is_null() {
            fogform::parse_config(fogform::config::DEFAULT_CONFIG_TOML, &parsed)?
        } else {
            fogform::load_config(Path::new(str_arg(config_path, "config_path")?), &parsed)?
        };
        if workers == 0 {
            return Err(Failure(FfStatus::Config, "workers must be at least 1".into()));
        }
        fogform::manifest::write_experiment(experiment, &cfg, Path::new(out_dir), workers)?;
        Ok(())
    })
}
