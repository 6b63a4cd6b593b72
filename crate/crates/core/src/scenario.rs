//! Randomized single-cell scenarios and the link budget that turns node
//! geometry into cellular and WiFi SINRs.
//!
//! Nodes are dropped uniformly on a disk centred on the tower. Every link uses
//! a log-distance pathloss with a free-space intercept at one metre:
//!
//! ```text
//! PL(d) = 20 log10(4 pi d0 f / c) + 10 alpha log10(d / d0),   d >= d0 = 1 m
//! SINR  = P_tx[dBm] - PL(d) - noise_floor - interference_margin
//! ```
//!
//! Cellular links use the 3-D distance to the top of the tower, WiFi links the
//! 2-D distance between the two nodes. SINRs are linear internally and in dB
//! at the file boundary.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Reference distance of the log-distance model, metres.
pub const REFERENCE_DISTANCE_M: f64 = 1.0;

/// Thermal noise density at room temperature, dBm/Hz.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts * 1e3).log10()
}

/// Thermal noise over `bandwidth_hz`, dBm.
pub fn thermal_noise_dbm(bandwidth_hz: f64) -> f64 {
    THERMAL_NOISE_DBM_PER_HZ + 10.0 * bandwidth_hz.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioParams {
    pub node_count: usize,
    pub cell_radius_m: f64,
    /// Fraction of WiFi airtime carrying successful transmissions.
    pub wifi_efficiency: f64,
    pub cell_pathloss_exponent: f64,
    pub wifi_pathloss_exponent: f64,
    pub tower_power_w: f64,
    pub wifi_power_w: f64,
    pub tower_height_m: f64,
    pub bandwidth_hz: f64,
    pub noise_floor_dbm: f64,
    pub cell_carrier_hz: f64,
    pub wifi_carrier_hz: f64,
    pub interference_margin_db: f64,
    pub rng_seed: u64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        let bandwidth_hz = 20e6;
        Self {
            node_count: 100,
            cell_radius_m: 1_000.0,
            wifi_efficiency: 0.75,
            cell_pathloss_exponent: 3.0,
            wifi_pathloss_exponent: 3.0,
            tower_power_w: 1.0,
            wifi_power_w: 0.1,
            tower_height_m: 30.0,
            bandwidth_hz,
            noise_floor_dbm: thermal_noise_dbm(bandwidth_hz),
            cell_carrier_hz: 2.0e9,
            wifi_carrier_hz: 2.4e9,
            interference_margin_db: 0.0,
            rng_seed: 0,
        }
    }
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        fn positive(field: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(field, format!("must be finite and > 0, got {v}")))
            }
        }
        if self.node_count == 0 {
            return Err(Error::param("node_count", "must be at least 1"));
        }
        positive("cell_radius_m", self.cell_radius_m)?;
        if !(self.wifi_efficiency > 0.0 && self.wifi_efficiency <= 1.0) {
            return Err(Error::param(
                "wifi_efficiency",
                format!("must lie in (0, 1], got {}", self.wifi_efficiency),
            ));
        }
        for (field, v) in [
            ("cell_pathloss_exponent", self.cell_pathloss_exponent),
            ("wifi_pathloss_exponent", self.wifi_pathloss_exponent),
        ] {
            if !(v.is_finite() && v >= 2.0) {
                return Err(Error::param(field, format!("must be >= 2, got {v}")));
            }
        }
        positive("tower_power_w", self.tower_power_w)?;
        positive("wifi_power_w", self.wifi_power_w)?;
        positive("bandwidth_hz", self.bandwidth_hz)?;
        positive("cell_carrier_hz", self.cell_carrier_hz)?;
        positive("wifi_carrier_hz", self.wifi_carrier_hz)?;
        if !(self.tower_height_m.is_finite() && self.tower_height_m >= 0.0) {
            return Err(Error::param("tower_height_m", "must be finite and >= 0"));
        }
        if !self.noise_floor_dbm.is_finite() {
            return Err(Error::param("noise_floor_dbm", "must be finite"));
        }
        if !self.interference_margin_db.is_finite() {
            return Err(Error::param("interference_margin_db", "must be finite"));
        }
        Ok(())
    }
}

/// Node position in metres, tower at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// A single cell: node SINRs plus, when generated, the geometry behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: ScenarioParams,
    /// Empty for scenarios given directly as SINR tables.
    pub positions: Vec<Position>,
    /// Linear cellular SINR per node.
    pub cell_sinr: Vec<f64>,
    /// Linear WiFi SINR, symmetric; the diagonal is NaN.
    pub wifi_sinr: Vec<Vec<f64>>,
}

/// Free-space loss at the reference distance plus the log-distance slope.
/// Distances below one metre are clamped to one metre.
pub fn pathloss_db(distance_m: f64, exponent: f64, carrier_hz: f64) -> f64 {
    let d = distance_m.max(REFERENCE_DISTANCE_M);
    let fspl = 20.0 * (4.0 * PI * REFERENCE_DISTANCE_M * carrier_hz / SPEED_OF_LIGHT).log10();
    fspl + 10.0 * exponent * (d / REFERENCE_DISTANCE_M).log10()
}

fn budget_db(tx_w: f64, loss_db: f64, params: &ScenarioParams) -> f64 {
    watts_to_dbm(tx_w) - loss_db - params.noise_floor_dbm - params.interference_margin_db
}

/// Linear SINR of a node at `pos` towards the tower.
pub fn cellular_sinr_at(pos: &Position, params: &ScenarioParams) -> f64 {
    let d3 = pos.radius().hypot(params.tower_height_m);
    let loss = pathloss_db(d3, params.cell_pathloss_exponent, params.cell_carrier_hz);
    db_to_linear(budget_db(params.tower_power_w, loss, params))
}

pub fn cellular_sinr(positions: &[Position], node: usize, params: &ScenarioParams) -> f64 {
    cellular_sinr_at(&positions[node], params)
}

/// Linear SINR of the WiFi link between nodes `i` and `j`.
pub fn wifi_sinr(i: usize, j: usize, positions: &[Position], params: &ScenarioParams) -> Result<f64> {
    if i == j {
        return Err(Error::UndefinedPair(i));
    }
    let d = positions[i].distance(&positions[j]);
    let loss = pathloss_db(d, params.wifi_pathloss_exponent, params.wifi_carrier_hz);
    Ok(db_to_linear(budget_db(params.wifi_power_w, loss, params)))
}

/// Drops `node_count` nodes uniformly on the disk and fills in their SINRs.
pub fn generate_scenario(params: &ScenarioParams) -> Result<Scenario> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let positions: Vec<Position> = (0..params.node_count)
        .map(|_| {
            let r = params.cell_radius_m * rng.random::<f64>().sqrt();
            let theta = 2.0 * PI * rng.random::<f64>();
            Position {
                x: r * theta.cos(),
                y: r * theta.sin(),
            }
        })
        .collect();
    Scenario::from_positions(*params, positions)
}

impl Scenario {
    pub fn from_positions(params: ScenarioParams, positions: Vec<Position>) -> Result<Self> {
        params.validate()?;
        let n = positions.len();
        if n != params.node_count {
            return Err(Error::Shape(format!(
                "{n} positions for node_count {}",
                params.node_count
            )));
        }
        let cell_sinr = (0..n).map(|i| cellular_sinr(&positions, i, &params)).collect();
        let mut wifi = vec![vec![f64::NAN; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let s = wifi_sinr(i, j, &positions, &params)?;
                wifi[i][j] = s;
                wifi[j][i] = s;
            }
        }
        Ok(Self {
            params,
            positions,
            cell_sinr,
            wifi_sinr: wifi,
        })
    }

    /// Direct-input scenario from dB tables. `wifi_db[i][i]` is ignored.
    pub fn from_db(params: ScenarioParams, cell_db: &[f64], wifi_db: &[Vec<f64>]) -> Result<Self> {
        let n = cell_db.len();
        let params = ScenarioParams {
            node_count: n,
            ..params
        };
        params.validate()?;
        if wifi_db.len() != n || wifi_db.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(format!("WiFi SINR table must be {n}x{n}")));
        }
        let mut wifi = vec![vec![f64::NAN; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                if wifi_db[i][j] != wifi_db[j][i] {
                    return Err(Error::Shape(format!(
                        "WiFi SINR table is not symmetric at ({i}, {j})"
                    )));
                }
                wifi[i][j] = db_to_linear(wifi_db[i][j]);
            }
        }
        let scenario = Self {
            params,
            positions: Vec::new(),
            cell_sinr: cell_db.iter().map(|&d| db_to_linear(d)).collect(),
            wifi_sinr: wifi,
        };
        scenario.check_sinrs()?;
        Ok(scenario)
    }

    pub fn node_count(&self) -> usize {
        self.cell_sinr.len()
    }

    fn check_sinrs(&self) -> Result<()> {
        let bad = |v: f64| !(v.is_finite() && v > 0.0);
        if let Some(i) = self.cell_sinr.iter().position(|&v| bad(v)) {
            return Err(Error::param("cell_sinr", format!("entry {i} is not finite and positive")));
        }
        for (i, row) in self.wifi_sinr.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if i != j && bad(v) {
                    return Err(Error::param(
                        "wifi_sinr",
                        format!("entry ({i}, {j}) is not finite and positive"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn to_file(&self) -> ScenarioFile {
        let n = self.node_count();
        ScenarioFile {
            params: self.params,
            positions: if self.positions.is_empty() {
                None
            } else {
                Some(self.positions.clone())
            },
            cell_sinr_db: self.cell_sinr.iter().map(|&s| linear_to_db(s)).collect(),
            wifi_sinr_db: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (i != j).then(|| linear_to_db(self.wifi_sinr[i][j])))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_file(file: ScenarioFile) -> Result<Self> {
        let n = file.cell_sinr_db.len();
        if n == 0 {
            return Err(Error::Empty("scenario has no nodes"));
        }
        let wifi_db: Vec<Vec<f64>> = file
            .wifi_sinr_db
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, v)| match v {
                        Some(v) => Ok(*v),
                        None if i == j => Ok(f64::NAN),
                        None => Err(Error::Shape(format!("missing WiFi SINR at ({i}, {j})"))),
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let mut scenario = Scenario::from_db(file.params, &file.cell_sinr_db, &wifi_db)?;
        if let Some(positions) = file.positions {
            if positions.len() != n {
                return Err(Error::Shape(format!("{} positions for {n} nodes", positions.len())));
            }
            scenario.positions = positions;
        }
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: ScenarioFile = serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        Self::from_file(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_file()).expect("scenario serializes");
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// On-disk scenario layout. SINRs are in dB; the WiFi diagonal is `null`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioFile {
    #[serde(default)]
    pub params: ScenarioParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<Position>>,
    pub cell_sinr_db: Vec<f64>,
    pub wifi_sinr_db: Vec<Vec<Option<f64>>>,
}
