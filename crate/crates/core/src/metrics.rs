//! Per-node gains of a configuration and their aggregation across instances.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratemodel::{Assignment, Network, RateAllocation};
use crate::scenario::linear_to_db;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Hotspot,
    Client,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeMetrics {
    /// Baseline rate of the node's hotspot over the node's own baseline rate.
    pub srg: f64,
    /// Time share of the node on its hotspot's link, relative to `1/N`.
    pub tsg: f64,
    /// Rate gain over the baseline, in percent.
    pub gain_pct: f64,
    pub role: Role,
}

/// Metrics of node `j`. `rate / baseline = srg * tsg` by construction.
pub fn node_metrics(
    net: &Network,
    assignment: &Assignment,
    allocation: &RateAllocation,
    baselines: &[f64],
    j: usize,
) -> NodeMetrics {
    let i = assignment.hotspot_of(j);
    let n = net.node_count() as f64;
    let rate = allocation.node_rates[j];
    NodeMetrics {
        srg: baselines[i] / baselines[j],
        tsg: rate * n / net.cell_rate(i),
        gain_pct: 100.0 * (rate - baselines[j]) / baselines[j],
        role: if i == j { Role::Hotspot } else { Role::Client },
    }
}

pub fn all_node_metrics(
    net: &Network,
    assignment: &Assignment,
    allocation: &RateAllocation,
    baselines: &[f64],
) -> Vec<NodeMetrics> {
    (0..net.node_count())
        .map(|j| node_metrics(net, assignment, allocation, baselines, j))
        .collect()
}

/// Histogram edges over SRG and TSG. Bin `k` of an axis is
/// `[edges[k], edges[k+1])`; the last bin is `[edges[last], inf)`. Values
/// below the first edge fall in the first bin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinEdges {
    pub srg: Vec<f64>,
    pub tsg: Vec<f64>,
}

impl Default for BinEdges {
    fn default() -> Self {
        Self {
            srg: vec![0.0, 1.0, 1.4, 2.6],
            tsg: vec![0.0, 1.0, 2.4],
        }
    }
}

impl BinEdges {
    pub fn validate(&self) -> Result<()> {
        for (field, edges) in [("srg_edges", &self.srg), ("tsg_edges", &self.tsg)] {
            if edges.is_empty() {
                return Err(Error::param(field, "needs at least one edge"));
            }
            if !edges.windows(2).all(|w| w[0] < w[1]) || edges.iter().any(|e| !e.is_finite()) {
                return Err(Error::param(field, "edges must be finite and strictly increasing"));
            }
        }
        Ok(())
    }

    pub fn region_count(&self) -> usize {
        self.srg.len() * self.tsg.len()
    }

    fn bin(edges: &[f64], v: f64) -> usize {
        edges.iter().rposition(|&e| v >= e).unwrap_or(0)
    }

    /// Flat region index, SRG-major.
    pub fn region_of(&self, m: &NodeMetrics) -> usize {
        Self::bin(&self.srg, m.srg) * self.tsg.len() + Self::bin(&self.tsg, m.tsg)
    }

    fn bounds(edges: &[f64], k: usize) -> (f64, f64) {
        (edges[k], edges.get(k + 1).copied().unwrap_or(f64::INFINITY))
    }

    pub fn region_bounds(&self, region: usize) -> Region {
        let (s, t) = (region / self.tsg.len(), region % self.tsg.len());
        let (srg_lo, srg_hi) = Self::bounds(&self.srg, s);
        let (tsg_lo, tsg_hi) = Self::bounds(&self.tsg, t);
        Region {
            srg_lo,
            srg_hi,
            tsg_lo,
            tsg_hi,
            share: 0.0,
            count: 0,
            mean_gain_pct: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub srg_lo: f64,
    pub srg_hi: f64,
    pub tsg_lo: f64,
    pub tsg_hi: f64,
    pub count: usize,
    /// Fraction of all nodes falling in this region.
    pub share: f64,
    /// `None` for an empty region.
    pub mean_gain_pct: Option<f64>,
}

pub fn histogram<'a, I>(nodes: I, edges: &BinEdges) -> Vec<Region>
where
    I: IntoIterator<Item = &'a NodeMetrics>,
{
    let mut regions: Vec<Region> = (0..edges.region_count()).map(|r| edges.region_bounds(r)).collect();
    let mut gain_sum = vec![0.0; regions.len()];
    let mut total = 0usize;
    for m in nodes {
        let r = edges.region_of(m);
        regions[r].count += 1;
        gain_sum[r] += m.gain_pct;
        total += 1;
    }
    for (region, sum) in regions.iter_mut().zip(gain_sum) {
        if region.count > 0 {
            region.share = region.count as f64 / total as f64;
            region.mean_gain_pct = Some(sum / region.count as f64);
        }
    }
    regions
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub nodes: usize,
    pub mean_gain_pct: f64,
    pub median_gain_pct: f64,
    pub hotspot_count: usize,
    pub mean_srg: f64,
    pub regions: Vec<Region>,
}

pub fn summarize_instance(nodes: &[NodeMetrics], edges: &BinEdges) -> Result<InstanceSummary> {
    if nodes.is_empty() {
        return Err(Error::Empty("no node metrics to summarize"));
    }
    let gains: Vec<f64> = nodes.iter().map(|m| m.gain_pct).collect();
    let srgs: Vec<f64> = nodes.iter().map(|m| m.srg).collect();
    Ok(InstanceSummary {
        nodes: nodes.len(),
        mean_gain_pct: mean(&gains),
        median_gain_pct: median(&gains),
        hotspot_count: nodes.iter().filter(|m| m.role == Role::Hotspot).count(),
        mean_srg: mean(&srgs),
        regions: histogram(nodes, edges),
    })
}

/// Averages over instances; the histogram pools every node of every instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateSummary {
    pub instances: usize,
    pub mean_gain_pct: f64,
    /// Mean over instances of the per-instance median gain.
    pub median_gain_pct: f64,
    pub mean_hotspot_count: f64,
    pub mean_srg: f64,
    pub regions: Vec<Region>,
}

pub fn summarize(instances: &[Vec<NodeMetrics>], edges: &BinEdges) -> Result<AggregateSummary> {
    if instances.is_empty() {
        return Err(Error::Empty("no instances to summarize"));
    }
    let per: Vec<InstanceSummary> = instances
        .iter()
        .map(|nodes| summarize_instance(nodes, edges))
        .collect::<Result<_>>()?;
    let avg = |f: &dyn Fn(&InstanceSummary) -> f64| mean(&per.iter().map(f).collect::<Vec<_>>());
    Ok(AggregateSummary {
        instances: per.len(),
        mean_gain_pct: avg(&|s| s.mean_gain_pct),
        median_gain_pct: avg(&|s| s.median_gain_pct),
        mean_hotspot_count: avg(&|s| s.hotspot_count as f64),
        mean_srg: avg(&|s| s.mean_srg),
        regions: histogram(instances.iter().flatten(), edges),
    })
}

/// One CSV row per node per instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeRecord {
    pub instance_id: usize,
    pub node_id: usize,
    pub role: Role,
    pub sinr_db: f64,
    pub baseline_rate: f64,
    pub rate: f64,
    pub srg: f64,
    pub tsg: f64,
    pub gain_pct: f64,
}

pub fn node_records(
    instance_id: usize,
    net: &Network,
    assignment: &Assignment,
    allocation: &RateAllocation,
    baselines: &[f64],
) -> Vec<NodeRecord> {
    (0..net.node_count())
        .map(|j| {
            let m = node_metrics(net, assignment, allocation, baselines, j);
            NodeRecord {
                instance_id,
                node_id: j,
                role: m.role,
                sinr_db: linear_to_db(net.cell_sinr(j)),
                baseline_rate: baselines[j],
                rate: allocation.node_rates[j],
                srg: m.srg,
                tsg: m.tsg,
                gain_pct: m.gain_pct,
            }
        })
        .collect()
}

pub fn write_node_csv<W: Write>(out: W, records: &[NodeRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Region table of a summary, one row per region.
pub fn write_region_csv<W: Write>(out: W, regions: &[Region]) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        srg_lo: f64,
        srg_hi: f64,
        tsg_lo: f64,
        tsg_hi: f64,
        count: usize,
        share: f64,
        mean_gain_pct: Option<f64>,
    }
    let mut w = csv::Writer::from_writer(out);
    for r in regions {
        w.serialize(Row {
            srg_lo: r.srg_lo,
            srg_hi: r.srg_hi,
            tsg_lo: r.tsg_lo,
            tsg_hi: r.tsg_hi,
            count: r.count,
            share: r.share,
            mean_gain_pct: r.mean_gain_pct,
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(srg: f64, tsg: f64, gain_pct: f64) -> NodeMetrics {
        NodeMetrics {
            srg,
            tsg,
            gain_pct,
            role: if srg == 1.0 { Role::Hotspot } else { Role::Client },
        }
    }

    #[test]
    fn identical_gains_give_equal_mean_and_median() {
        let nodes = vec![m(1.2, 1.5, 17.0); 5];
        let s = summarize_instance(&nodes, &BinEdges::default()).unwrap();
        assert_eq!(s.mean_gain_pct, 17.0);
        assert_eq!(s.median_gain_pct, 17.0);
    }

    #[test]
    fn degenerate_histogram_is_one_region() {
        let nodes = vec![m(1.1, 1.3, 40.0), m(1.39, 2.3, 30.0), m(1.05, 1.01, 5.0)];
        let regions = histogram(&nodes, &BinEdges::default());
        let full: Vec<&Region> = regions.iter().filter(|r| r.count > 0).collect();
        assert_eq!(full.len(), 1);
        assert_eq!(full[0].share, 1.0);
        assert_eq!((full[0].srg_lo, full[0].tsg_lo), (1.0, 1.0));
        assert_eq!(full[0].mean_gain_pct, Some(25.0));
    }

    #[test]
    fn boundaries_go_to_the_upper_bin() {
        let e = BinEdges::default();
        assert_eq!(e.region_of(&m(1.0, 0.5, 0.0)), e.tsg.len());
        assert_eq!(e.region_of(&m(0.99, 0.5, 0.0)), 0);
        assert_eq!(e.region_of(&m(3.0, 9.0, 0.0)), e.region_count() - 1);
    }

    #[test]
    fn median_of_even_count() {
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(summarize(&[], &BinEdges::default()).is_err());
        assert!(summarize_instance(&[], &BinEdges::default()).is_err());
    }

    #[test]
    fn bad_edges_are_rejected() {
        let e = BinEdges {
            srg: vec![0.0, 1.0, 1.0],
            tsg: vec![0.0],
        };
        assert!(e.validate().is_err());
    }
}
