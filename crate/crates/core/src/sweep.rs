//! Monte-Carlo runs over a grid of scenario parameters.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::heuristic::{configure_network, HeuristicOptions};
use crate::metrics::{
    all_node_metrics, node_records, summarize, write_node_csv, write_region_csv, AggregateSummary,
    BinEdges, NodeMetrics, NodeRecord,
};
use crate::ratemodel::{allocate_rates, baseline_rates, Network};
use crate::scenario::{generate_scenario, ScenarioParams};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub nodes: Vec<usize>,
    pub radius_km: Vec<f64>,
    pub eta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub alpha_wifi: Vec<f64>,
    pub instances: usize,
    pub base_seed: u64,
    /// Channel constants shared by every cell.
    pub base: ScenarioParams,
    pub heuristic: HeuristicOptions,
    pub edges: BinEdges,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            nodes: vec![100, 200, 400],
            radius_km: vec![1.0, 2.0, 5.0],
            eta: vec![0.5, 0.75, 1.0],
            alpha: vec![3.0],
            alpha_wifi: vec![2.5, 3.0],
            instances: 100,
            base_seed: 0,
            base: ScenarioParams::default(),
            heuristic: HeuristicOptions::default(),
            edges: BinEdges::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellKey {
    pub nodes: usize,
    pub radius_km: f64,
    pub eta: f64,
    pub alpha: f64,
    pub alpha_wifi: f64,
}

impl CellKey {
    pub fn params(&self, base: &ScenarioParams, seed: u64) -> ScenarioParams {
        ScenarioParams {
            node_count: self.nodes,
            cell_radius_m: self.radius_km * 1000.0,
            wifi_efficiency: self.eta,
            cell_pathloss_exponent: self.alpha,
            wifi_pathloss_exponent: self.alpha_wifi,
            rng_seed: seed,
            ..*base
        }
    }

    /// File-name stem, e.g. `n100_r1_eta0.75_a3_aw2.5`.
    pub fn stem(&self) -> String {
        format!(
            "n{}_r{}_eta{}_a{}_aw{}",
            self.nodes, self.radius_km, self.eta, self.alpha, self.alpha_wifi
        )
    }
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        let axes = [
            ("nodes", self.nodes.is_empty()),
            ("radius_km", self.radius_km.is_empty()),
            ("eta", self.eta.is_empty()),
            ("alpha", self.alpha.is_empty()),
            ("alpha_wifi", self.alpha_wifi.is_empty()),
        ];
        if let Some((field, _)) = axes.iter().find(|(_, empty)| *empty) {
            return Err(Error::param(field, "sweep axis is empty"));
        }
        if self.instances == 0 {
            return Err(Error::param("instances", "must be at least 1"));
        }
        self.edges.validate()?;
        for key in self.cells() {
            key.params(&self.base, 0).validate()?;
        }
        Ok(())
    }

    /// Cells in grid-key order.
    pub fn cells(&self) -> Vec<CellKey> {
        let mut out = Vec::new();
        for &nodes in &self.nodes {
            for &radius_km in &self.radius_km {
                for &eta in &self.eta {
                    for &alpha in &self.alpha {
                        for &alpha_wifi in &self.alpha_wifi {
                            out.push(CellKey {
                                nodes,
                                radius_km,
                                eta,
                                alpha,
                                alpha_wifi,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

/// Everything kept from one heuristic run.
#[derive(Debug, Clone)]
pub struct InstanceResult {
    pub instance_id: usize,
    pub metrics: Vec<NodeMetrics>,
    /// Metrics of the same hotspots before client rebalancing.
    pub pre_fair_metrics: Vec<NodeMetrics>,
    pub records: Vec<NodeRecord>,
    pub hotspot_count: usize,
    pub max_h_considered: usize,
    pub fairness_trace: Vec<f64>,
}

pub fn run_instance(key: &CellKey, grid: &SweepGrid, instance_id: usize) -> Result<InstanceResult> {
    let params = key.params(&grid.base, grid.base_seed + instance_id as u64);
    let scenario = generate_scenario(&params)?;
    let net = Network::from_scenario(&scenario);
    let baselines = baseline_rates(&net);
    let cfg = configure_network(&net, &grid.heuristic);
    let pre_alloc = allocate_rates(&net, &cfg.pre_fair_assignment)?;
    let mut fairness_trace: Vec<f64> = cfg.moves.iter().map(|m| m.fairness_before).collect();
    fairness_trace.extend(cfg.moves.last().map(|m| m.fairness_after));
    Ok(InstanceResult {
        instance_id,
        metrics: all_node_metrics(&net, &cfg.assignment, &cfg.allocation, &baselines),
        pre_fair_metrics: all_node_metrics(&net, &cfg.pre_fair_assignment, &pre_alloc, &baselines),
        records: node_records(instance_id, &net, &cfg.assignment, &cfg.allocation, &baselines),
        hotspot_count: cfg.hotspot_count,
        max_h_considered: cfg.max_h_considered(),
        fairness_trace,
    })
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub key: CellKey,
    pub summary: AggregateSummary,
    pub pre_fair_summary: AggregateSummary,
    pub mean_max_h_considered: f64,
    pub instances: Vec<InstanceResult>,
}

/// Runs every instance of every cell. Instances run in parallel; results
/// come back in grid and instance order.
pub fn run_sweep(grid: &SweepGrid) -> Result<Vec<CellResult>> {
    grid.validate()?;
    let cells = grid.cells();
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..grid.instances).map(move |i| (c, i)))
        .collect();
    let results: Vec<InstanceResult> = jobs
        .par_iter()
        .map(|&(c, i)| run_instance(&cells[c], grid, i))
        .collect::<Result<_>>()?;

    let mut results = results.into_iter();
    cells
        .into_iter()
        .map(|key| {
            let instances: Vec<InstanceResult> = results.by_ref().take(grid.instances).collect();
            let metrics: Vec<Vec<NodeMetrics>> = instances.iter().map(|r| r.metrics.clone()).collect();
            let pre: Vec<Vec<NodeMetrics>> =
                instances.iter().map(|r| r.pre_fair_metrics.clone()).collect();
            let mean_max_h_considered = instances.iter().map(|r| r.max_h_considered as f64).sum::<f64>()
                / instances.len() as f64;
            Ok(CellResult {
                key,
                summary: summarize(&metrics, &grid.edges)?,
                pre_fair_summary: summarize(&pre, &grid.edges)?,
                mean_max_h_considered,
                instances,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct SummaryRow {
    nodes: usize,
    radius_km: f64,
    eta: f64,
    alpha: f64,
    alpha_wifi: f64,
    instances: usize,
    mean_gain_pct: f64,
    median_gain_pct: f64,
    pre_fair_mean_gain_pct: f64,
    pre_fair_median_gain_pct: f64,
    mean_hotspot_count: f64,
    mean_max_h_considered: f64,
    mean_srg: f64,
}

/// Writes `summary.csv` (one row per cell) and, per cell, `<stem>_regions.csv`
/// and `<stem>_nodes.csv` into `dir`.
pub fn write_sweep(dir: &Path, cells: &[CellResult]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let create = |name: String| -> Result<BufWriter<File>> {
        let path = dir.join(name);
        File::create(&path).map(BufWriter::new).map_err(|e| Error::io(&path, e))
    };

    let mut summary = csv::Writer::from_writer(create("summary.csv".into())?);
    for cell in cells {
        let k = cell.key;
        summary.serialize(SummaryRow {
            nodes: k.nodes,
            radius_km: k.radius_km,
            eta: k.eta,
            alpha: k.alpha,
            alpha_wifi: k.alpha_wifi,
            instances: cell.summary.instances,
            mean_gain_pct: cell.summary.mean_gain_pct,
            median_gain_pct: cell.summary.median_gain_pct,
            pre_fair_mean_gain_pct: cell.pre_fair_summary.mean_gain_pct,
            pre_fair_median_gain_pct: cell.pre_fair_summary.median_gain_pct,
            mean_hotspot_count: cell.summary.mean_hotspot_count,
            mean_max_h_considered: cell.mean_max_h_considered,
            mean_srg: cell.summary.mean_srg,
        })?;
        write_region_csv(create(format!("{}_regions.csv", k.stem()))?, &cell.summary.regions)?;
        let records: Vec<NodeRecord> = cell.instances.iter().flat_map(|r| r.records.clone()).collect();
        write_node_csv(create(format!("{}_nodes.csv", k.stem()))?, &records)?;
    }
    summary.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SweepGrid {
        SweepGrid {
            nodes: vec![12],
            radius_km: vec![1.0],
            eta: vec![0.5, 1.0],
            alpha_wifi: vec![3.0],
            instances: 3,
            base_seed: 7,
            ..SweepGrid::default()
        }
    }

    #[test]
    fn cells_follow_grid_order() {
        let keys = tiny().cells();
        assert_eq!(keys.len(), 2);
        assert_eq!(keys[0].eta, 0.5);
        assert_eq!(keys[1].stem(), "n12_r1_eta1_a3_aw3");
    }

    #[test]
    fn sweep_is_deterministic() {
        let a = run_sweep(&tiny()).unwrap();
        let b = run_sweep(&tiny()).unwrap();
        assert_eq!(a.len(), 2);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.summary, y.summary);
            assert_eq!(x.instances.len(), 3);
        }
    }

    #[test]
    fn empty_axis_is_rejected() {
        let grid = SweepGrid {
            eta: vec![],
            ..tiny()
        };
        assert!(matches!(run_sweep(&grid), Err(Error::Parameter { field: "eta", .. })));
    }
}
