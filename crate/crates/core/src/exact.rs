//! Ground-truth solvers: exhaustive search for small networks, the optimal
//! constructions for clique-structured WiFi graphs, and the binary WiFi graph.

use std::path::Path;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratemodel::{baseline_rates, Assignment, CapacityMatrix, Network, EPS_FEAS};
use crate::scenario::db_to_linear;

/// Default size guard of [`enumerate_optimal`].
pub const DEFAULT_MAX_N: usize = 12;

/// Binary abstraction of WiFi connectivity. An edge is a link that never
/// limits the rate; a missing edge is a link that carries nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WifiGraph {
    adjacency: Vec<Vec<bool>>,
}

impl WifiGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![vec![false; n]; n];
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::Structure(format!("edge ({i}, {j}) out of range for {n} nodes")));
            }
            if i == j {
                return Err(Error::Structure(format!("self-loop at {i}")));
            }
            adjacency[i][j] = true;
            adjacency[j][i] = true;
        }
        Ok(Self { adjacency })
    }

    pub fn complete(n: usize) -> Self {
        Self {
            adjacency: (0..n).map(|i| (0..n).map(|j| i != j).collect()).collect(),
        }
    }

    /// Disjoint union of cliques over the given parts.
    pub fn from_cliques(n: usize, parts: &[Vec<usize>]) -> Result<Self> {
        let mut edges = Vec::new();
        for part in parts {
            for (a, &i) in part.iter().enumerate() {
                for &j in &part[a + 1..] {
                    edges.push((i, j));
                }
            }
        }
        Self::new(n, &edges)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.node_count();
        (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.adjacency[i][j])
            .collect()
    }

    pub fn is_clique_on(&self, nodes: &[usize]) -> bool {
        nodes
            .iter()
            .enumerate()
            .all(|(a, &i)| nodes[a + 1..].iter().all(|&j| self.adjacency[i][j]))
    }

    /// Graph-mode network: uncapped links on edges, zero elsewhere.
    pub fn network(&self, cell_sinr: Vec<f64>) -> Result<Network> {
        Network::new(cell_sinr, CapacityMatrix::from_adjacency(&self.adjacency))
    }
}

/// On-disk WiFi graph with cellular SINRs in dB.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub cell_sinr_db: Vec<f64>,
}

impl GraphFile {
    pub fn network(&self) -> Result<Network> {
        if self.cell_sinr_db.len() != self.n {
            return Err(Error::Shape(format!(
                "{} cellular SINRs for {} nodes",
                self.cell_sinr_db.len(),
                self.n
            )));
        }
        WifiGraph::new(self.n, &self.edges)?
            .network(self.cell_sinr_db.iter().map(|&d| db_to_linear(d)).collect())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactStatus {
    Optimal,
    /// The optimum is the configuration where every node is a hotspot.
    BaselineOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub best_assignment: Assignment,
    pub best_sum_rate: f64,
    /// Hotspot subsets whose client assignment was searched.
    pub configurations_examined: usize,
    pub status: ExactStatus,
}

#[derive(Debug, Clone, Copy)]
pub struct ExactOptions {
    pub max_n: usize,
    /// Stop once the remaining subsets cannot beat the incumbent.
    pub prune: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            max_n: DEFAULT_MAX_N,
            prune: true,
        }
    }
}

/// Finds a client assignment for a fixed hotspot set, if one exists.
///
/// A client may join hotspot `h` only while `h`'s link still covers the
/// summed baselines and every client of `h` keeps its baseline under the WiFi
/// cap at the new client count.
pub fn assign_clients(net: &Network, hotspots: &[usize]) -> Option<Assignment> {
    let n = net.node_count();
    let baselines = baseline_rates(net);
    let h = hotspots.len();
    if h == 0 {
        return None;
    }
    let mut is_hotspot = vec![false; n];
    for &i in hotspots {
        is_hotspot[i] = true;
    }

    let mut spare: Vec<f64> = hotspots
        .iter()
        .map(|&i| net.cell_rate(i) / h as f64 - baselines[i])
        .collect();
    if spare.iter().any(|&s| s < -EPS_FEAS) {
        return None;
    }
    let total_link: f64 = hotspots.iter().map(|&i| net.cell_rate(i) / h as f64).sum();
    if baselines.total() > total_link + EPS_FEAS * n as f64 {
        return None;
    }

    let c = net.capacity();
    let mut clients: Vec<usize> = (0..n).filter(|&j| !is_hotspot[j]).collect();
    // Most demanding and least connected clients first.
    let options = |j: usize| hotspots.iter().filter(|&&i| c.get(i, j) >= baselines[j] - EPS_FEAS).count();
    clients.sort_by(|&a, &b| {
        options(a)
            .cmp(&options(b))
            .then(baselines[b].total_cmp(&baselines[a]))
            .then(a.cmp(&b))
    });

    struct Search<'a> {
        c: &'a CapacityMatrix,
        baselines: &'a [f64],
        hotspots: &'a [usize],
        clients: &'a [usize],
        spare: Vec<f64>,
        members: Vec<Vec<usize>>,
        parent: Vec<usize>,
    }

    impl Search<'_> {
        fn fits(&self, slot: usize, j: usize) -> bool {
            let i = self.hotspots[slot];
            let k = (self.members[slot].len() + 1) as f64;
            let ok = |m: usize| self.c.get(i, m) / k - self.baselines[m] >= -EPS_FEAS;
            self.spare[slot] - self.baselines[j] >= -EPS_FEAS
                && ok(j)
                && self.members[slot].iter().all(|&m| ok(m))
        }

        fn run(&mut self, depth: usize) -> bool {
            let Some(&j) = self.clients.get(depth) else {
                return true;
            };
            for slot in 0..self.hotspots.len() {
                if !self.fits(slot, j) {
                    continue;
                }
                self.spare[slot] -= self.baselines[j];
                self.members[slot].push(j);
                self.parent[j] = self.hotspots[slot];
                if self.run(depth + 1) {
                    return true;
                }
                self.members[slot].pop();
                self.spare[slot] += self.baselines[j];
            }
            false
        }
    }

    let mut parent: Vec<usize> = (0..n).collect();
    for &i in hotspots {
        parent[i] = i;
    }
    let mut search = Search {
        c,
        baselines: &baselines,
        hotspots,
        clients: &clients,
        spare: std::mem::take(&mut spare),
        members: vec![Vec::new(); h],
        parent,
    };
    if search.run(0) {
        Assignment::from_parents(search.parent).ok()
    } else {
        None
    }
}

/// Exhaustive search over hotspot subsets and client assignments.
///
/// Subsets are visited in decreasing order of their summed `1/|S|` link rates,
/// which is both the bound and the objective of a feasible subset; ties go to
/// the lexicographically smaller subset. The first best configuration found
/// is returned.
pub fn enumerate_optimal(net: &Network, opts: &ExactOptions) -> Result<ExactResult> {
    let n = net.node_count();
    if n > opts.max_n {
        return Err(Error::SizeGuard { n, max_n: opts.max_n });
    }
    if n >= usize::BITS as usize {
        return Err(Error::SizeGuard { n, max_n: usize::BITS as usize - 1 });
    }

    let rates: Vec<f64> = (0..n).map(|i| net.cell_rate(i)).collect();
    let mut subsets: Vec<(f64, Vec<usize>)> = (1usize..(1 << n))
        .map(|mask| {
            let members: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let bound = members.iter().map(|&i| rates[i]).sum::<f64>() / members.len() as f64;
            (bound, members)
        })
        .collect();
    subsets.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));

    let mut best: Option<(f64, Assignment)> = None;
    let mut examined = 0;
    for (bound, members) in &subsets {
        let incumbent = best.as_ref().map(|(v, _)| *v);
        if let (true, Some(incumbent)) = (opts.prune, incumbent) {
            if *bound < incumbent {
                break;
            }
            // Equal bounds cannot displace the first optimum found.
            continue;
        }
        examined += 1;
        if let Some(a) = assign_clients(net, members) {
            if incumbent.is_none_or(|v| *bound > v) {
                best = Some((*bound, a));
            }
        }
    }

    // The identity assignment is always feasible, so the search never comes up empty.
    let (best_sum_rate, best_assignment) = best.expect("baseline configuration is feasible");
    let status = if best_assignment.hotspot_count() == n {
        ExactStatus::BaselineOnly
    } else {
        ExactStatus::Optimal
    };
    Ok(ExactResult {
        best_assignment,
        best_sum_rate,
        configurations_examined: examined,
        status,
    })
}

fn argmax_sinr(nodes: &[usize], cell_sinr: &[f64]) -> usize {
    let mut best = nodes[0];
    for &i in &nodes[1..] {
        if cell_sinr[i] > cell_sinr[best] || (cell_sinr[i] == cell_sinr[best] && i < best) {
            best = i;
        }
    }
    best
}

/// Single hotspot at the strongest cellular link; everybody else its client.
/// Optimal whenever the WiFi graph is a clique.
pub fn lemma1_config(graph: &WifiGraph, cell_sinr: &[f64]) -> Result<Assignment> {
    let n = graph.node_count();
    if cell_sinr.len() != n || n == 0 {
        return Err(Error::Shape(format!("{} SINRs for {n} nodes", cell_sinr.len())));
    }
    let all: Vec<usize> = (0..n).collect();
    if !graph.is_clique_on(&all) {
        return Err(Error::Structure("WiFi graph is not a clique".into()));
    }
    Assignment::from_parents(vec![argmax_sinr(&all, cell_sinr); n])
}

/// One hotspot per part, at the part's strongest cellular link. Optimal
/// when the graph is a disjoint union of equal-size cliques.
pub fn lemma2_config(
    graph: &WifiGraph,
    partition: &[Vec<usize>],
    cell_sinr: &[f64],
) -> Result<Assignment> {
    let n = graph.node_count();
    if cell_sinr.len() != n || n == 0 {
        return Err(Error::Shape(format!("{} SINRs for {n} nodes", cell_sinr.len())));
    }
    let mut part_of = vec![usize::MAX; n];
    for (k, part) in partition.iter().enumerate() {
        if part.is_empty() {
            return Err(Error::Structure(format!("part {k} is empty")));
        }
        for &i in part {
            if i >= n {
                return Err(Error::Structure(format!("node {i} out of range")));
            }
            if part_of[i] != usize::MAX {
                return Err(Error::Structure(format!("node {i} appears in two parts")));
            }
            part_of[i] = k;
        }
    }
    if let Some(i) = part_of.iter().position(|&k| k == usize::MAX) {
        return Err(Error::Structure(format!("node {i} is not covered by the partition")));
    }
    let size = partition[0].len();
    if partition.iter().any(|p| p.len() != size) {
        return Err(Error::Structure("parts must all have the same size".into()));
    }
    for (k, part) in partition.iter().enumerate() {
        if !graph.is_clique_on(part) {
            return Err(Error::Structure(format!("part {k} is not a clique")));
        }
    }
    for (i, j) in graph.edges() {
        if part_of[i] != part_of[j] {
            return Err(Error::Structure(format!("edge ({i}, {j}) crosses parts")));
        }
    }
    let mut parent = vec![0; n];
    for part in partition {
        let hotspot = argmax_sinr(part, cell_sinr);
        for &i in part {
            parent[i] = hotspot;
        }
    }
    Assignment::from_parents(parent)
}

/// Connected components of the graph when every component is a clique.
/// Components come back sorted, ordered by their smallest node.
pub fn verify_clique_partition(graph: &WifiGraph) -> Option<Vec<Vec<usize>>> {
    let n = graph.node_count();
    let mut uf = UnionFind::<usize>::new(n);
    for (i, j) in graph.edges() {
        uf.union(i, j);
    }
    let labels = uf.into_labeling();
    let mut parts: Vec<Vec<usize>> = Vec::new();
    let mut slot_of_label = vec![usize::MAX; n];
    for (i, &label) in labels.iter().enumerate() {
        if slot_of_label[label] == usize::MAX {
            slot_of_label[label] = parts.len();
            parts.push(Vec::new());
        }
        parts[slot_of_label[label]].push(i);
    }
    parts.iter().all(|p| graph.is_clique_on(p)).then_some(parts)
}
