//! Greedy configuration pipeline.
//!
//! 1. [`prospective_client_matrix`] fixes, once, which nodes may ever be a
//!    given node's clients.
//! 2. For `H = 1, 2, ...` [`configure_network`] looks for an `H`-hotspot
//!    network through chained [`select_hotspots`] calls and stops once the
//!    best `H+1` top-SINR bound cannot beat what it already found.
//! 3. [`compute_fair_loading`] evens out hotspot loadings.
//! 4. [`allocate_rates`] splits each hotspot's link over its nodes.

mod fairness;
mod prospective;
mod select;

use std::io::Write;

use serde::Serialize;

pub use fairness::{
    compute_fair_loading, jain_fairness, loading, loading_profile, next_candidate, CandidateMove,
    FairMove, LoadingProfile,
};
pub use prospective::{prospective_client_matrix, supportable, ProspectiveClientMatrix};
pub use select::{select_hotspots, SelectContext, SelectOutcome};

pub use crate::ratemodel::CapacityMatrix;
use crate::ratemodel::{allocate_rates, baseline_rates, Assignment, Network, RateAllocation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeuristicOptions {
    pub fair_loading: bool,
    pub exit_condition: bool,
    /// Keep every selection call in the result.
    pub trace_selection: bool,
}

impl Default for HeuristicOptions {
    fn default() -> Self {
        Self {
            fair_loading: true,
            exit_condition: true,
            trace_selection: false,
        }
    }
}

/// Outcome of the search at one hotspot count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HotspotCountRecord {
    pub h: usize,
    pub feasible: bool,
    pub hotspots: Vec<usize>,
    /// Sum rate of the `H`-hotspot network, 0 when none was found.
    pub sum_rate: f64,
    pub select_calls: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub selections: Vec<SelectOutcome>,
}

#[derive(Debug, Clone)]
pub struct Configuration {
    pub assignment: Assignment,
    pub allocation: RateAllocation,
    pub hotspot_count: usize,
    pub sum_rate: f64,
    /// The chosen network before client rebalancing.
    pub pre_fair_assignment: Assignment,
    pub prospective: ProspectiveClientMatrix,
    pub records: Vec<HotspotCountRecord>,
    pub moves: Vec<FairMove>,
}

impl Configuration {
    /// Largest hotspot count the search looked at.
    pub fn max_h_considered(&self) -> usize {
        self.records.last().map_or(0, |r| r.h)
    }

    /// Line-oriented JSON trace: one record per hotspot count, then one per
    /// rebalancing move.
    pub fn write_trace<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        #[derive(Serialize)]
        #[serde(tag = "kind", rename_all = "snake_case")]
        enum Line<'a> {
            HotspotCount(&'a HotspotCountRecord),
            FairMove(&'a FairMove),
        }
        for r in &self.records {
            serde_json::to_writer(&mut out, &Line::HotspotCount(r))?;
            writeln!(out)?;
        }
        for m in &self.moves {
            serde_json::to_writer(&mut out, &Line::FairMove(m))?;
            writeln!(out)?;
        }
        Ok(())
    }
}

/// True once `H+1` hotspots can no longer beat `sum_rate_h`, the best any
/// `H+1` hotspots could reach being the mean of the top `H+1` link rates.
/// `sorted_sinr_desc` holds the linear cellular SINRs, strongest first.
pub fn exit_condition(h: usize, sum_rate_h: f64, sorted_sinr_desc: &[f64]) -> bool {
    let n = sorted_sinr_desc.len();
    if h >= n {
        return false;
    }
    let bound: f64 = sorted_sinr_desc[..=h]
        .iter()
        .map(|&s| crate::ratemodel::shannon(s))
        .sum::<f64>()
        / (h + 1) as f64;
    bound < sum_rate_h
}

struct Search<'a> {
    net: &'a Network,
    ctx: SelectContext<'a>,
    trace: bool,
}

impl Search<'_> {
    /// Chained selection for one hotspot count.
    fn try_count(&self, h: usize) -> (HotspotCountRecord, Option<Assignment>) {
        let n = self.net.node_count();
        let mut committed: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut selections = Vec::new();
        let mut pending: Option<SelectOutcome> = None;
        let mut calls = 0;

        for c in 1..=h {
            let nodes: Vec<usize> = match pending.take() {
                None => (0..n).collect(),
                Some(prev) if prev.unassigned.is_empty() => {
                    pending = Some(prev);
                    break;
                }
                Some(prev) => {
                    let mut hotspots = prev.hotspots.into_iter();
                    let mut clients = prev.clients.into_iter();
                    if let (Some(first), Some(first_clients)) = (hotspots.next(), clients.next()) {
                        committed.push((first, first_clients));
                    }
                    let mut rest = prev.unassigned;
                    for (hs, cl) in hotspots.zip(clients) {
                        rest.push(hs);
                        rest.extend(cl);
                    }
                    rest
                }
            };
            let outcome = select_hotspots(&self.ctx, &nodes, h, h - c + 1);
            calls += 1;
            if self.trace {
                selections.push(outcome.clone());
            }
            pending = Some(outcome);
        }

        let last = pending.expect("at least one selection call");
        let covered = last.unassigned.is_empty();
        committed.extend(last.hotspots.into_iter().zip(last.clients));
        let feasible = covered && committed.len() == h;
        let hotspots: Vec<usize> = committed.iter().map(|(hs, _)| *hs).collect();
        let sum_rate = if feasible {
            hotspots.iter().map(|&i| self.net.cell_rate(i)).sum::<f64>() / h as f64
        } else {
            0.0
        };
        let assignment = feasible.then(|| {
            let mut parent: Vec<usize> = (0..n).collect();
            for (hs, cl) in &committed {
                for &j in cl {
                    parent[j] = *hs;
                }
            }
            Assignment::from_parents(parent).expect("selection yields a valid assignment")
        });
        let mut sorted = hotspots.clone();
        sorted.sort_unstable();
        (
            HotspotCountRecord {
                h,
                feasible,
                hotspots: sorted,
                sum_rate,
                select_calls: calls,
                selections,
            },
            assignment,
        )
    }
}

/// Runs the whole pipeline. `H = N` always succeeds, so a configuration is
/// always returned.
pub fn configure_network(net: &Network, opts: &HeuristicOptions) -> Configuration {
    let n = net.node_count();
    let baselines = baseline_rates(net);
    let w = prospective_client_matrix(net.capacity(), &baselines);
    let sorted_sinr: Vec<f64> = net.by_sinr_desc().iter().map(|&i| net.cell_sinr(i)).collect();
    let search = Search {
        net,
        ctx: SelectContext::new(net, &baselines, &w),
        trace: opts.trace_selection,
    };

    let mut records = Vec::new();
    let mut best: Option<(f64, usize, Assignment)> = None;
    for h in 1..=n {
        let (record, assignment) = search.try_count(h);
        if let Some(a) = assignment {
            let rate = record.sum_rate;
            if best.as_ref().is_none_or(|(b, _, _)| rate > *b) {
                best = Some((rate, h, a));
            }
        }
        records.push(record);
        // The bound only shrinks with H, so the best rate found so far is as
        // safe a threshold as the current one and keeps firing past an
        // infeasible count.
        let found = best.as_ref().map_or(0.0, |(b, _, _)| *b);
        if opts.exit_condition && exit_condition(h, found, &sorted_sinr) {
            break;
        }
    }

    let (sum_rate, hotspot_count, chosen) = best.expect("every node a hotspot is always found");
    let (assignment, moves) = if opts.fair_loading {
        compute_fair_loading(net, &chosen, &w, &baselines)
    } else {
        (chosen.clone(), Vec::new())
    };
    let allocation =
        allocate_rates(net, &assignment).expect("heuristic configurations are admissible");

    Configuration {
        assignment,
        allocation,
        hotspot_count,
        sum_rate,
        pre_fair_assignment: chosen,
        prospective: w,
        records,
        moves,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::WifiGraph;
    use crate::scenario::db_to_linear;

    #[test]
    fn exit_condition_cases() {
        let s = [db_to_linear(30.0), db_to_linear(10.0)];
        assert!(!exit_condition(1, 0.0, &s));
        assert!(exit_condition(1, 1001f64.log2(), &s));
        assert!(!exit_condition(2, 100.0, &s));
    }

    #[test]
    fn single_node_network() {
        let net = WifiGraph::complete(1).network(vec![db_to_linear(6.0)]).unwrap();
        let cfg = configure_network(&net, &HeuristicOptions::default());
        assert_eq!(cfg.hotspot_count, 1);
        assert!((cfg.allocation.node_rates[0] - net.cell_rate(0)).abs() < 1e-12);
    }

    #[test]
    fn all_hotspots_when_every_node_is_its_own_hotspot() {
        let net = WifiGraph::new(3, &[])
            .unwrap()
            .network(vec![2.0, 5.0, 9.0])
            .unwrap();
        let baselines = baseline_rates(&net);
        let w = prospective_client_matrix(net.capacity(), &baselines);
        let ctx = SelectContext::new(&net, &baselines, &w);
        let out = select_hotspots(&ctx, &[0, 1, 2], 3, 3);
        assert!(out.unassigned.is_empty());
        assert_eq!(out.hotspots, vec![2, 1, 0]);
    }
}
