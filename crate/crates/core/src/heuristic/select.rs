use std::collections::BTreeMap;

use serde::Serialize;

use super::prospective::ProspectiveClientMatrix;
use crate::ratemodel::Network;

/// Shared read-only inputs of the selection step.
pub struct SelectContext<'a> {
    net: &'a Network,
    baselines: &'a [f64],
    /// Prospective clients per node, strongest cellular SINR first.
    by_sinr: Vec<Vec<usize>>,
}

impl<'a> SelectContext<'a> {
    pub fn new(net: &'a Network, baselines: &'a [f64], w: &ProspectiveClientMatrix) -> Self {
        let sinr = net.cell_sinrs();
        let by_sinr = (0..net.node_count())
            .map(|i| {
                let mut row = w.row(i).to_vec();
                row.sort_by(|&a, &b| sinr[b].total_cmp(&sinr[a]).then(a.cmp(&b)));
                row
            })
            .collect();
        Self {
            net,
            baselines,
            by_sinr,
        }
    }
}

/// Result of one selection call.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectOutcome {
    /// Picked hotspots, in pick order.
    pub hotspots: Vec<usize>,
    /// WiFi clients of each picked hotspot, same order.
    pub clients: Vec<Vec<usize>>,
    /// Nodes left uncovered.
    pub unassigned: Vec<usize>,
    /// Clients each candidate can carry after pruning.
    pub supported: BTreeMap<usize, Vec<usize>>,
    /// Prospective clients pruned away per candidate, in removal order.
    pub removed: BTreeMap<usize, Vec<usize>>,
}

/// Picks up to `picks` hotspots among `nodes`, each with a `1/h` share of the
/// tower.
///
/// Every candidate starts from its prospective clients inside `nodes` and
/// drops the strongest-SINR ones until its link covers the summed baselines.
/// Hotspots are then taken greedily by the number of still-uncovered nodes
/// they carry, ties to the stronger cellular SINR and then the lower index.
pub fn select_hotspots(ctx: &SelectContext<'_>, nodes: &[usize], h: usize, picks: usize) -> SelectOutcome {
    let n = ctx.net.node_count();
    let mut nodes = nodes.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    let mut in_set = vec![false; n];
    for &i in &nodes {
        in_set[i] = true;
    }

    let mut kept_by_node: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut removed = BTreeMap::new();
    for &i in &nodes {
        let candidates: Vec<usize> = ctx.by_sinr[i]
            .iter()
            .copied()
            .filter(|&o| o != i && in_set[o])
            .collect();
        let capacity = ctx.net.cell_rate(i) / h as f64;
        // Demand left after dropping the first k candidates.
        let mut tail = vec![0.0; candidates.len() + 1];
        for k in (0..candidates.len()).rev() {
            tail[k] = tail[k + 1] + ctx.baselines[candidates[k]];
        }
        let cut = (0..=candidates.len())
            .find(|&k| capacity >= ctx.baselines[i] + tail[k])
            .unwrap_or(candidates.len());
        let mut kept = candidates[cut..].to_vec();
        kept.sort_unstable();
        kept_by_node[i] = kept;
        removed.insert(i, candidates[..cut].to_vec());
    }

    let sinr = ctx.net.cell_sinrs();
    let mut remaining = in_set;
    let mut hotspots = Vec::new();
    let mut clients = Vec::new();
    for _ in 0..picks {
        let mut best: Option<(usize, usize)> = None;
        for &i in &nodes {
            if !remaining[i] {
                continue;
            }
            let count = kept_by_node[i].iter().filter(|&&u| remaining[u]).count();
            let better = match best {
                None => true,
                Some((b, bc)) => count > bc || (count == bc && sinr[i] > sinr[b]),
            };
            if better {
                best = Some((i, count));
            }
        }
        let Some((pick, _)) = best else { break };
        let covered: Vec<usize> = kept_by_node[pick]
            .iter()
            .copied()
            .filter(|&u| remaining[u])
            .collect();
        remaining[pick] = false;
        for &u in &covered {
            remaining[u] = false;
        }
        hotspots.push(pick);
        clients.push(covered);
    }

    let mut unassigned: Vec<usize> = nodes.iter().copied().filter(|&i| remaining[i]).collect();
    unassigned.sort_unstable();
    let supported = nodes
        .iter()
        .map(|&i| (i, std::mem::take(&mut kept_by_node[i])))
        .collect();
    SelectOutcome {
        hotspots,
        clients,
        unassigned,
        supported,
        removed,
    }
}
