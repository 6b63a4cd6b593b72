use std::collections::BTreeMap;

use serde::Serialize;

use super::prospective::ProspectiveClientMatrix;
use crate::error::{Error, Result};
use crate::ratemodel::{attached_demand, Assignment, Network};

/// Summed baseline demand on hotspot `i`'s link as a fraction of that link's
/// rate with `H` hotspots.
pub fn loading(net: &Network, assignment: &Assignment, baselines: &[f64], i: usize) -> Result<f64> {
    if i >= assignment.node_count() || !assignment.is_hotspot(i) {
        return Err(Error::NotHotspot(i));
    }
    let h = assignment.hotspot_count() as f64;
    Ok(h * attached_demand(assignment, baselines, i) / net.cell_rate(i))
}

/// Jain's index `(sum x)^2 / (n sum x^2)`; 1 for an empty or all-zero input.
pub fn jain_fairness(values: &[f64]) -> f64 {
    let sum: f64 = values.iter().sum();
    let sq: f64 = values.iter().map(|v| v * v).sum();
    if values.is_empty() || sq == 0.0 {
        return 1.0;
    }
    sum * sum / (values.len() as f64 * sq)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadingProfile {
    pub loadings: BTreeMap<usize, f64>,
    pub fairness: f64,
}

pub fn loading_profile(net: &Network, assignment: &Assignment, baselines: &[f64]) -> LoadingProfile {
    let loadings: BTreeMap<usize, f64> = assignment
        .hotspots()
        .into_iter()
        .map(|i| (i, loading(net, assignment, baselines, i).expect("hotspot")))
        .collect();
    let values: Vec<f64> = loadings.values().copied().collect();
    LoadingProfile {
        fairness: jain_fairness(&values),
        loadings,
    }
}

/// One applied client move.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FairMove {
    pub client: usize,
    pub from: usize,
    pub to: usize,
    pub fairness_before: f64,
    pub fairness_after: f64,
}

/// The move the rebalancing step would try next, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateMove {
    pub client: usize,
    pub from: usize,
    pub to: usize,
}

/// Least-loaded hotspot `i*` takes the largest-baseline client of the
/// most-loaded hotspot among those owning a client `i*` may carry.
pub fn next_candidate(
    net: &Network,
    assignment: &Assignment,
    w: &ProspectiveClientMatrix,
    baselines: &[f64],
    profile: &LoadingProfile,
) -> Option<CandidateMove> {
    let h = assignment.hotspot_count() as f64;
    // BTreeMap iteration is by index, so strict comparisons keep the lower index on ties.
    let mut target: Option<(usize, f64)> = None;
    for (&i, &l) in &profile.loadings {
        if target.is_none_or(|(_, tl)| l < tl) {
            target = Some((i, l));
        }
    }
    let (target, _) = target?;
    let spare = net.cell_rate(target) / h - attached_demand(assignment, baselines, target);
    let candidates: Vec<usize> = w
        .row(target)
        .iter()
        .copied()
        .filter(|&j| {
            !assignment.is_hotspot(j) && assignment.hotspot_of(j) != target && baselines[j] < spare
        })
        .collect();

    let mut donor: Option<(usize, f64)> = None;
    for &j in &candidates {
        let q = assignment.hotspot_of(j);
        let l = profile.loadings[&q];
        if donor.is_none_or(|(dq, dl)| l > dl || (l == dl && q < dq)) {
            donor = Some((q, l));
        }
    }
    let (donor, _) = donor?;

    let mut moved: Option<usize> = None;
    for &j in candidates.iter().filter(|&&j| assignment.hotspot_of(j) == donor) {
        if moved.is_none_or(|m| baselines[j] > baselines[m]) {
            moved = Some(j);
        }
    }
    moved.map(|client| CandidateMove {
        client,
        from: donor,
        to: target,
    })
}

/// Rebalances clients between the hotspots of `assignment` as long as each
/// prescribed move strictly raises Jain's index over the loadings. Hotspots,
/// and therefore the sum rate, are left untouched.
pub fn compute_fair_loading(
    net: &Network,
    assignment: &Assignment,
    w: &ProspectiveClientMatrix,
    baselines: &[f64],
) -> (Assignment, Vec<FairMove>) {
    let mut current = assignment.clone();
    let mut moves = Vec::new();
    let n = current.node_count();
    let mut profile = loading_profile(net, &current, baselines);
    for _ in 0..n * n {
        let Some(mv) = next_candidate(net, &current, w, baselines, &profile) else {
            break;
        };
        let mut trial = current.clone();
        trial.reattach(mv.client, mv.to);
        let trial_profile = loading_profile(net, &trial, baselines);
        if trial_profile.fairness - profile.fairness <= 0.0 {
            break;
        }
        moves.push(FairMove {
            client: mv.client,
            from: mv.from,
            to: mv.to,
            fairness_before: profile.fairness,
            fairness_after: trial_profile.fairness,
        });
        current = trial;
        profile = trial_profile;
    }
    (current, moves)
}
