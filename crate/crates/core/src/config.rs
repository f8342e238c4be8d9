//! Scenario configuration: a TOML document whose keys mirror
//! [`ScenarioConfig`], with dotted `key=value` overrides on top.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::queueing::{service_rate, CloudLink, ComputeProfile, Position, RadioParams};
use crate::selection::StreamEnd;

/// The shipped default configuration, calibrated against the reference
/// scenario (see the comments in the file).
pub const DEFAULT_CONFIG_TOML: &str = include_str!("../configs/default.toml");

/// Environment variable consulted for a config path when none is given.
pub const CONFIG_ENV_VAR: &str = "FOGFORM_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioConfig {
    pub bandwidth_hz: f64,
    pub noise_psd_dbm_per_hz: f64,
    pub tx_power_dbm: f64,
    pub pathloss_const: f64,
    pub pathloss_exp: f64,
    pub packet_size_bytes: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            bandwidth_hz: 15e3,
            noise_psd_dbm_per_hz: -174.0,
            tx_power_dbm: 20.0,
            pathloss_const: 1e-3,
            pathloss_exp: 4.0,
            packet_size_bytes: 1500.0,
        }
    }
}

impl RadioConfig {
    pub fn params(&self) -> Result<RadioParams> {
        RadioParams::from_dbm(
            self.bandwidth_hz,
            self.noise_psd_dbm_per_hz,
            self.tx_power_dbm,
            self.pathloss_const,
            self.pathloss_exp,
            self.packet_size_bytes,
        )
        .map_err(|e| Error::config("radio", e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudConfig {
    /// Base-station link rate, packets/s.
    pub mu_c: f64,
    pub c_c: f64,
    /// Ignore `mu_c` and take the rate from the radio model at `bs_distance_m`.
    pub derive_mu_c: bool,
}

impl Default for CloudConfig {
    fn default() -> Self {
        CloudConfig { mu_c: 8.8, c_c: 0.025, derive_mu_c: false }
    }
}

/// How link rates to candidate neighbors are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LinkMode {
    /// From the radio model at each candidate's distance to the initiator.
    #[default]
    Geometric,
    /// Every candidate gets `fixed_mu_tx`.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum StreamEndConfig {
    Strict,
    #[default]
    FillRemaining,
}

impl From<StreamEndConfig> for StreamEnd {
    fn from(v: StreamEndConfig) -> Self {
        match v {
            StreamEndConfig::Strict => StreamEnd::Strict,
            StreamEndConfig::FillRemaining => StreamEnd::FillRemaining,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub j_min: usize,
    pub j_max: usize,
    pub mu_ij_values: Vec<f64>,
    pub distances_m: Vec<f64>,
    pub mu_compute_values: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            j_min: 0,
            j_max: 7,
            mu_ij_values: vec![20.0, 30.0],
            distances_m: vec![200.0, 300.0, 400.0, 500.0, 600.0],
            mu_compute_values: vec![8.0, 10.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub area_m: f64,
    pub n_candidates: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initiator_pos: Option<Position>,
    pub bs_distance_m: f64,
    pub x_i: f64,
    pub eta: f64,
    pub tau: usize,
    #[serde(alias = "J")]
    pub j: usize,
    pub seed: u64,
    pub iterations: usize,
    pub link_mode: LinkMode,
    pub fixed_mu_tx: f64,
    pub stream_end: StreamEndConfig,
    pub tolerance: f64,
    pub radio: RadioConfig,
    pub local_prof: ComputeProfile,
    pub neighbor_prof: ComputeProfile,
    pub cloud: CloudConfig,
    pub sweep: SweepConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            area_m: 50.0,
            n_candidates: 15,
            initiator_pos: None,
            bs_distance_m: 600.0,
            x_i: 10.0,
            eta: 0.01,
            tau: 3,
            j: 2,
            seed: 1,
            iterations: 10_000,
            link_mode: LinkMode::Geometric,
            fixed_mu_tx: 20.0,
            stream_end: StreamEndConfig::FillRemaining,
            tolerance: 1e-9,
            radio: RadioConfig::default(),
            local_prof: ComputeProfile { mu: 8.0, c: 0.05 },
            neighbor_prof: ComputeProfile { mu: 8.0, c: 0.05 },
            cloud: CloudConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn initiator(&self) -> Position {
        self.initiator_pos.unwrap_or(Position::new(self.area_m / 2.0, self.area_m / 2.0))
    }

    pub fn radio_params(&self) -> Result<RadioParams> {
        self.radio.params()
    }

    /// Cloud link rate: configured, or from the radio model at the
    /// base-station distance.
    pub fn cloud_link(&self) -> Result<CloudLink> {
        let mu_tx = if self.cloud.derive_mu_c {
            service_rate(self.bs_distance_m, &self.radio_params()?)?
        } else {
            self.cloud.mu_c
        };
        Ok(CloudLink { mu_tx, c: self.cloud.c_c })
    }

    pub fn validate(&self) -> Result<()> {
        positive("area_m", self.area_m)?;
        positive("bs_distance_m", self.bs_distance_m)?;
        positive("x_i", self.x_i)?;
        positive("fixed_mu_tx", self.fixed_mu_tx)?;
        positive("tolerance", self.tolerance)?;
        non_negative("eta", self.eta)?;
        non_negative("cloud.c_c", self.cloud.c_c)?;
        positive("cloud.mu_c", self.cloud.mu_c)?;
        if self.n_candidates == 0 {
            return Err(Error::config("n_candidates", "must be at least 1"));
        }
        if self.iterations == 0 {
            return Err(Error::config("iterations", "must be at least 1"));
        }
        if let Some(p) = self.initiator_pos {
            if !(p.x.is_finite() && p.y.is_finite()) {
                return Err(Error::config("initiator_pos", "coordinates must be finite"));
            }
        }
        self.local_prof.validate().map_err(|e| Error::config("local_prof", e.to_string()))?;
        self.neighbor_prof.validate().map_err(|e| Error::config("neighbor_prof", e.to_string()))?;
        self.radio.params()?;
        if self.sweep.j_min > self.sweep.j_max {
            return Err(Error::config("sweep.j_min", "must not exceed sweep.j_max"));
        }
        for &v in &self.sweep.mu_ij_values {
            positive("sweep.mu_ij_values", v)?;
        }
        for &v in &self.sweep.distances_m {
            positive("sweep.distances_m", v)?;
        }
        for &v in &self.sweep.mu_compute_values {
            positive("sweep.mu_compute_values", v)?;
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("<config>", e.to_string()))
    }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(key, format!("must be positive, got {v}")))
    }
}

fn non_negative(key: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::config(key, format!("must be non-negative, got {v}")))
    }
}

/// A single `key=value` override. Keys are dotted paths into the document
/// (`radio.tx_power_dbm`); values use TOML syntax, and bare words are read
/// as strings.
#[derive(Debug, Clone, PartialEq)]
pub struct Override {
    pub key: String,
    pub value: toml::Value,
}

impl std::str::FromStr for Override {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (key, raw) = s.split_once('=').ok_or_else(|| Error::config(s, "override must have the form key=value"))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::config(s, "empty key"));
        }
        let raw = raw.trim();
        let value = parse_value(raw).unwrap_or_else(|| toml::Value::String(raw.to_string()));
        Ok(Override { key: key.to_string(), value })
    }
}

fn parse_value(raw: &str) -> Option<toml::Value> {
    let doc: toml::Table = toml::from_str(&format!("v = {raw}")).ok()?;
    doc.get("v").cloned()
}

/// Parses a config document. A run manifest is accepted too: its
/// `[config]` table is the snapshot of the run.
pub fn parse_config(text: &str, overrides: &[Override]) -> Result<ScenarioConfig> {
    let mut table: toml::Table =
        toml::from_str(text).map_err(|e| Error::config(toml_error_key(&e), e.message().to_string()))?;
    if let (Some(toml::Value::Table(cfg)), true) = (table.get("config"), table.contains_key("run")) {
        table = cfg.clone();
    }
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let mut merged: toml::Table = toml::from_str(DEFAULT_CONFIG_TOML).expect("default config parses");
    merge(&mut merged, table);
    let cfg: ScenarioConfig = toml::Value::Table(merged)
        .try_into()
        .map_err(|e: toml::de::Error| Error::config(toml_error_key(&e), e.message().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path, overrides: &[Override]) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, overrides)
}

/// Overlays `top` onto `base`, descending into tables present in both.
fn merge(base: &mut toml::Table, top: toml::Table) {
    for (key, value) in top {
        let key = normalize(&key).to_string();
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

fn toml_error_key(e: &toml::de::Error) -> String {
    // the message names unknown or mistyped fields in backticks
    let msg = e.message();
    if let Some(start) = msg.find('`') {
        if let Some(len) = msg[start + 1..].find('`') {
            return msg[start + 1..start + 1 + len].to_string();
        }
    }
    "<config>".to_string()
}

fn normalize(part: &str) -> &str {
    if part == "J" {
        "j"
    } else {
        part
    }
}

fn key_is_known(defaults: &toml::Table, parts: &[&str]) -> bool {
    if matches!(parts, ["initiator_pos"] | ["initiator_pos", "x" | "y"]) {
        return true;
    }
    let mut table = defaults;
    for (depth, part) in parts.iter().enumerate() {
        match table.get(normalize(part)) {
            Some(toml::Value::Table(sub)) if depth + 1 < parts.len() => table = sub,
            Some(_) => return depth + 1 == parts.len(),
            None => return false,
        }
    }
    false
}

fn known_leaf<'a>(defaults: &'a toml::Table, parts: &[&str]) -> Option<&'a toml::Value> {
    let mut table = defaults;
    for part in &parts[..parts.len() - 1] {
        table = table.get(normalize(part))?.as_table()?;
    }
    table.get(normalize(parts[parts.len() - 1]))
}

fn apply_override(table: &mut toml::Table, o: &Override) -> Result<()> {
    let defaults: toml::Table = toml::from_str(DEFAULT_CONFIG_TOML).expect("default config parses");
    let parts: Vec<&str> = o.key.split('.').collect();
    if !key_is_known(&defaults, &parts) {
        return Err(Error::config(&o.key, "unknown key"));
    }
    let value = coerce(o.value.clone(), known_leaf(&defaults, &parts));

    let mut cursor = table;
    for part in &parts[..parts.len() - 1] {
        let entry = cursor.entry(normalize(part).to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cursor = entry.as_table_mut().ok_or_else(|| Error::config(&o.key, format!("`{part}` is not a table")))?;
    }
    cursor.remove("J");
    cursor.insert(normalize(parts[parts.len() - 1]).to_string(), value);
    Ok(())
}

/// Integers given where the default holds a float are widened.
fn coerce(value: toml::Value, like: Option<&toml::Value>) -> toml::Value {
    match (value, like) {
        (toml::Value::Integer(i), Some(toml::Value::Float(_))) => toml::Value::Float(i as f64),
        (toml::Value::Array(items), Some(toml::Value::Array(reference))) => {
            let elem = reference.first();
            toml::Value::Array(items.into_iter().map(|v| coerce(v, elem)).collect())
        }
        (v, _) => v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_defaults_match_code_defaults() {
        let parsed = parse_config(DEFAULT_CONFIG_TOML, &[]).unwrap();
        assert_eq!(parsed, ScenarioConfig::default());
    }

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(parse_config("", &[]).unwrap(), ScenarioConfig::default());
    }

    #[test]
    fn overrides_apply() {
        let o: Vec<Override> =
            ["x_i=12", "radio.tx_power_dbm=23", "J=4", "link_mode=fixed", "sweep.mu_ij_values=[25, 30.5]"]
                .iter()
                .map(|s| s.parse().unwrap())
                .collect();
        let cfg = parse_config("", &o).unwrap();
        assert_eq!(cfg.x_i, 12.0);
        assert_eq!(cfg.radio.tx_power_dbm, 23.0);
        assert_eq!(cfg.j, 4);
        assert_eq!(cfg.link_mode, LinkMode::Fixed);
        assert_eq!(cfg.sweep.mu_ij_values, vec![25.0, 30.5]);
    }

    #[test]
    fn optional_keys_can_be_set() {
        let o: Vec<Override> =
            ["initiator_pos.x=1", "initiator_pos.y=2.5"].iter().map(|s| s.parse().unwrap()).collect();
        let cfg = parse_config("", &o).unwrap();
        assert_eq!(cfg.initiator(), Position::new(1.0, 2.5));
        let cfg = parse_config("[cloud]\nderive_mu_c = true\n", &[]).unwrap();
        assert_eq!(cfg.cloud.c_c, 0.025);
        let derived = cfg.cloud_link().unwrap().mu_tx;
        assert!((derived - 4.749018021497572).abs() < 1e-9);
    }

    #[test]
    fn unknown_override_key_is_named() {
        let o: Override = "radio.bogus=1".parse().unwrap();
        match parse_config("", &[o]) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "radio.bogus"),
            other => panic!("{other:?}"),
        }
        assert!("novalue".parse::<Override>().is_err());
    }

    #[test]
    fn malformed_document_names_key() {
        match parse_config("x_i = \"fast\"\n", &[]) {
            Err(Error::Config { .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_config("frobnicate = 3\n", &[]) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "frobnicate"),
            other => panic!("{other:?}"),
        }
        match parse_config("x_i = -1.0\n", &[]) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "x_i"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn manifest_snapshot_is_accepted() {
        let cfg = ScenarioConfig { x_i: 11.5, seed: 99, ..Default::default() };
        let doc = format!(
            "[run]\nexperiment = \"ratio-cdf\"\n\n[config]\n{}",
            cfg.to_toml().unwrap().replace("\n[", "\n[config.")
        );
        assert_eq!(parse_config(&doc, &[]).unwrap(), cfg);
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = ScenarioConfig { initiator_pos: Some(Position::new(3.0, 4.0)), ..Default::default() };
        assert_eq!(parse_config(&cfg.to_toml().unwrap(), &[]).unwrap(), cfg);
    }
}
