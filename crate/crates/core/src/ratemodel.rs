//! Rate model of a hotspot network: baseline rates, per-hotspot link rates,
//! WiFi link rates, constraint checking and the rate-allocation split.
//!
//! All rates are spectral efficiencies in bits/sec/Hz. Multiply by the
//! bandwidth at the reporting boundary for bits/sec.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// Feasibility tolerance, bits/sec/Hz.
pub const EPS_FEAS: f64 = 1e-9;
/// Residual below which the allocation split stops, bits/sec/Hz.
pub const EPS_ALLOC: f64 = 1e-9;

/// Shannon spectral efficiency of a link with linear SINR `sinr`.
#[inline]
pub fn shannon(sinr: f64) -> f64 {
    (1.0 + sinr).log2()
}

/// Full-medium WiFi spectral efficiencies `c_ij`.
///
/// SINR-derived matrices hold `eta * log2(1 + SINR_ij)`. Matrices built from a
/// binary WiFi graph hold `+inf` on edges and `0` elsewhere, so every
/// downstream cap check works unchanged in both modes.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityMatrix {
    n: usize,
    c: Vec<f64>,
}

impl CapacityMatrix {
    pub fn from_wifi_sinr(wifi_sinr: &[Vec<f64>], eta: f64) -> Self {
        let n = wifi_sinr.len();
        let mut c = vec![f64::NAN; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    c[i * n + j] = eta * shannon(wifi_sinr[i][j]);
                }
            }
        }
        Self { n, c }
    }

    /// `adjacent[i][j]` true means the link is never a rate bottleneck.
    pub fn from_adjacency(adjacent: &[Vec<bool>]) -> Self {
        let n = adjacent.len();
        let mut c = vec![f64::NAN; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    c[i * n + j] = if adjacent[i][j] { f64::INFINITY } else { 0.0 };
                }
            }
        }
        Self { n, c }
    }

    /// Raw constructor; `rows` must be square. Diagonal entries are ignored.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut c = vec![f64::NAN; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    c[i * n + j] = rows[i][j];
                }
            }
        }
        Self { n, c }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.c[i * self.n + j]
    }
}

/// Inputs of the optimization: cellular SINRs and WiFi capacities.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    cell_sinr: Vec<f64>,
    capacity: CapacityMatrix,
}

impl Network {
    pub fn new(cell_sinr: Vec<f64>, capacity: CapacityMatrix) -> Result<Self> {
        if cell_sinr.is_empty() {
            return Err(Error::Empty("network has no nodes"));
        }
        if capacity.len() != cell_sinr.len() {
            return Err(Error::Shape(format!(
                "{} cellular SINRs but a {n}x{n} capacity matrix",
                cell_sinr.len(),
                n = capacity.len()
            )));
        }
        if let Some(i) = cell_sinr.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::param("cell_sinr", format!("entry {i} is not finite and positive")));
        }
        Ok(Self { cell_sinr, capacity })
    }

    pub fn from_scenario(scenario: &Scenario) -> Self {
        Self {
            cell_sinr: scenario.cell_sinr.clone(),
            capacity: CapacityMatrix::from_wifi_sinr(
                &scenario.wifi_sinr,
                scenario.params.wifi_efficiency,
            ),
        }
    }

    pub fn node_count(&self) -> usize {
        self.cell_sinr.len()
    }

    pub fn cell_sinr(&self, i: usize) -> f64 {
        self.cell_sinr[i]
    }

    pub fn cell_sinrs(&self) -> &[f64] {
        &self.cell_sinr
    }

    /// Full-time cellular Shannon rate `log2(1 + SINR_i)`.
    pub fn cell_rate(&self, i: usize) -> f64 {
        shannon(self.cell_sinr[i])
    }

    pub fn capacity(&self) -> &CapacityMatrix {
        &self.capacity
    }

    /// Nodes sorted by decreasing cellular SINR, ties by lower index.
    pub fn by_sinr_desc(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.node_count()).collect();
        order.sort_by(|&a, &b| self.cell_sinr[b].total_cmp(&self.cell_sinr[a]).then(a.cmp(&b)));
        order
    }
}

impl From<&Scenario> for Network {
    fn from(s: &Scenario) -> Self {
        Network::from_scenario(s)
    }
}

/// Per-node rates when every node owns a `1/N` time share of its own link.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineRates(Vec<f64>);

impl BaselineRates {
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for BaselineRates {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

pub fn baseline_rates(net: &Network) -> BaselineRates {
    let n = net.node_count() as f64;
    BaselineRates((0..net.node_count()).map(|i| net.cell_rate(i) / n).collect())
}

/// Rate of hotspot `i`'s cellular link when it is one of `h` hotspots.
pub fn hotspot_link_rate(net: &Network, h: usize, i: usize) -> Result<f64> {
    let n = net.node_count();
    if h == 0 || h > n {
        return Err(Error::HotspotCount { h, n });
    }
    Ok(net.cell_rate(i) / h as f64)
}

/// Which hotspot every node attaches to. `a_ij = 1` iff `parent[j] == i`;
/// hotspots are their own parents.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    parent: Vec<usize>,
}

impl Assignment {
    /// Every node its own hotspot.
    pub fn identity(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub fn from_parents(parent: Vec<usize>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::Assignment("no nodes".into()));
        }
        for (j, &p) in parent.iter().enumerate() {
            if p >= n {
                return Err(Error::Assignment(format!("node {j} attached to unknown node {p}")));
            }
            if parent[p] != p {
                return Err(Error::Assignment(format!(
                    "node {j} attached to {p}, which is not a hotspot"
                )));
            }
        }
        Ok(Self { parent })
    }

    /// From a hotspot -> clients map; every node must appear exactly once,
    /// either as a hotspot key or as somebody's client.
    pub fn from_clients(n: usize, clients: &BTreeMap<usize, Vec<usize>>) -> Result<Self> {
        let mut parent = vec![usize::MAX; n];
        for &h in clients.keys() {
            if h >= n {
                return Err(Error::Assignment(format!("hotspot {h} out of range")));
            }
            parent[h] = h;
        }
        for (&h, list) in clients {
            for &j in list {
                if j >= n {
                    return Err(Error::Assignment(format!("client {j} out of range")));
                }
                if parent[j] != usize::MAX {
                    return Err(Error::Assignment(format!("node {j} attached more than once")));
                }
                parent[j] = h;
            }
        }
        if let Some(j) = parent.iter().position(|&p| p == usize::MAX) {
            return Err(Error::Assignment(format!("node {j} is not attached")));
        }
        Self::from_parents(parent)
    }

    /// From the binary `a_ij` matrix. Rejects anything that is not
    /// column-stochastic or attaches a client to a non-hotspot.
    pub fn from_matrix(a: &[Vec<u8>]) -> Result<Self> {
        let n = a.len();
        let mut parent = vec![usize::MAX; n];
        for j in 0..n {
            let mut owners = (0..n).filter(|&i| a[i][j] != 0);
            match (owners.next(), owners.next()) {
                (Some(i), None) => parent[j] = i,
                (None, _) => return Err(Error::Assignment(format!("column {j} has no 1"))),
                _ => return Err(Error::Assignment(format!("column {j} has several 1s"))),
            }
        }
        if a.iter().flatten().any(|&v| v > 1) {
            return Err(Error::Assignment("entries must be 0 or 1".into()));
        }
        Self::from_parents(parent)
    }

    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        let n = self.parent.len();
        let mut a = vec![vec![0u8; n]; n];
        for (j, &i) in self.parent.iter().enumerate() {
            a[i][j] = 1;
        }
        a
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn hotspot_of(&self, j: usize) -> usize {
        self.parent[j]
    }

    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    pub fn is_hotspot(&self, i: usize) -> bool {
        self.parent[i] == i
    }

    pub fn hotspots(&self) -> Vec<usize> {
        (0..self.parent.len()).filter(|&i| self.is_hotspot(i)).collect()
    }

    pub fn hotspot_count(&self) -> usize {
        (0..self.parent.len()).filter(|&i| self.is_hotspot(i)).count()
    }

    /// WiFi clients of `i`, excluding `i` itself.
    pub fn clients_of(&self, i: usize) -> Vec<usize> {
        (0..self.parent.len())
            .filter(|&j| j != i && self.parent[j] == i)
            .collect()
    }

    pub fn client_count(&self, i: usize) -> usize {
        self.parent
            .iter()
            .enumerate()
            .filter(|&(j, &p)| j != i && p == i)
            .count()
    }

    /// Hotspot -> clients map, hotspots in index order.
    pub fn client_map(&self) -> BTreeMap<usize, Vec<usize>> {
        self.hotspots()
            .into_iter()
            .map(|h| (h, self.clients_of(h)))
            .collect()
    }

    /// Moves client `j` to hotspot `to`.
    pub(crate) fn reattach(&mut self, j: usize, to: usize) {
        debug_assert!(self.is_hotspot(to) && !self.is_hotspot(j));
        self.parent[j] = to;
    }
}

/// Total demand of hotspot `i` and its clients, in baseline rates.
pub fn attached_demand(assignment: &Assignment, baselines: &[f64], i: usize) -> f64 {
    assignment
        .parents()
        .iter()
        .enumerate()
        .filter(|&(_, &p)| p == i)
        .map(|(j, _)| baselines[j])
        .sum()
}

/// WiFi link rate from client `j` to its hotspot `i` under `assignment`:
/// `c_ij` divided among the hotspot's WiFi clients.
pub fn wifi_link_rate(net: &Network, assignment: &Assignment, i: usize, j: usize) -> Result<f64> {
    if i == j || assignment.hotspot_of(j) != i || !assignment.is_hotspot(i) {
        return Err(Error::UndefinedLink { hotspot: i, client: j });
    }
    Ok(net.capacity().get(i, j) / assignment.client_count(i) as f64)
}

/// Objective value: the summed link rates of the hotspots.
pub fn sum_rate(net: &Network, assignment: &Assignment) -> f64 {
    let h = assignment.hotspot_count() as f64;
    assignment
        .hotspots()
        .into_iter()
        .map(|i| net.cell_rate(i) / h)
        .sum()
}

/// Per-link shares `R_ij` and per-node rates `R_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateAllocation {
    pub r: BTreeMap<(usize, usize), f64>,
    pub node_rates: Vec<f64>,
}

impl RateAllocation {
    /// Places each node's rate on the link to its hotspot.
    pub fn from_node_rates(assignment: &Assignment, node_rates: Vec<f64>) -> Self {
        let r = node_rates
            .iter()
            .enumerate()
            .map(|(j, &rate)| ((assignment.hotspot_of(j), j), rate))
            .collect();
        Self { r, node_rates }
    }

    pub fn total(&self) -> f64 {
        self.node_rates.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// Every node keeps at least its baseline rate.
    Baseline,
    /// Client shares fit through their WiFi links.
    WifiCap,
    /// A hotspot's shares add up to its link rate.
    LinkSum,
    /// Every node attaches to exactly one hotspot.
    UniqueAttach,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subject {
    Node(usize),
    Link(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub subject: Subject,
    /// Signed slack; negative by the amount the constraint is missed.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        Self {
            feasible: violations.is_empty(),
            violations,
        }
    }

    pub fn violates(&self, c: Constraint) -> bool {
        self.violations.iter().any(|v| v.constraint == c)
    }
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.feasible {
            return writeln!(f, "feasible: no violations");
        }
        writeln!(f, "infeasible: {} violation(s)", self.violations.len())?;
        for v in &self.violations {
            let subject = match v.subject {
                Subject::Node(i) => format!("node {i}"),
                Subject::Link(i, j) => format!("link {i}->{j}"),
            };
            writeln!(
                f,
                "  {:?} at {subject}: slack {:.6}",
                v.constraint,
                v.slack
            )?;
        }
        Ok(())
    }
}

/// Checks constraints (5)-(8) for an assignment and its allocation.
/// The hotspot's own share is never WiFi-capped.
pub fn check_feasibility(
    net: &Network,
    assignment: &Assignment,
    allocation: &RateAllocation,
) -> FeasibilityReport {
    let n = net.node_count();
    let baselines = baseline_rates(net);
    let mut violations = Vec::new();

    if assignment.node_count() != n || allocation.node_rates.len() != n {
        violations.push(Violation {
            constraint: Constraint::UniqueAttach,
            subject: Subject::Node(n.min(assignment.node_count())),
            slack: -1.0,
        });
        return FeasibilityReport::from_violations(violations);
    }

    // (8): shares may only sit on attached links.
    for &(i, j) in allocation.r.keys() {
        if i >= n || j >= n || assignment.hotspot_of(j) != i {
            violations.push(Violation {
                constraint: Constraint::UniqueAttach,
                subject: Subject::Link(i, j),
                slack: -1.0,
            });
        }
    }

    let share = |i: usize, j: usize| allocation.r.get(&(i, j)).copied().unwrap_or(0.0);

    for j in 0..n {
        let i = assignment.hotspot_of(j);
        let rate = share(i, j);
        // (5)
        let slack = rate - baselines[j];
        if slack < -EPS_FEAS {
            violations.push(Violation {
                constraint: Constraint::Baseline,
                subject: Subject::Node(j),
                slack,
            });
        }
        // (6)
        if i != j {
            let cap = net.capacity().get(i, j) / assignment.client_count(i) as f64;
            let slack = cap - rate;
            if slack < -EPS_FEAS {
                violations.push(Violation {
                    constraint: Constraint::WifiCap,
                    subject: Subject::Link(i, j),
                    slack,
                });
            }
        }
        if (allocation.node_rates[j] - rate).abs() > EPS_FEAS {
            violations.push(Violation {
                constraint: Constraint::UniqueAttach,
                subject: Subject::Node(j),
                slack: -(allocation.node_rates[j] - rate).abs(),
            });
        }
    }

    // (7)
    let h = assignment.hotspot_count();
    for i in assignment.hotspots() {
        let link = net.cell_rate(i) / h as f64;
        let total: f64 = (0..n)
            .filter(|&j| assignment.hotspot_of(j) == i)
            .map(|j| share(i, j))
            .sum();
        if (total - link).abs() > EPS_FEAS {
            violations.push(Violation {
                constraint: Constraint::LinkSum,
                subject: Subject::Node(i),
                slack: -(total - link).abs(),
            });
        }
    }

    FeasibilityReport::from_violations(violations)
}

/// Whether any allocation can make `assignment` feasible: each hotspot's
/// link covers the baselines attached to it and each client's WiFi cap
/// covers its own baseline.
pub fn admissibility(net: &Network, assignment: &Assignment) -> FeasibilityReport {
    let baselines = baseline_rates(net);
    let h = assignment.hotspot_count();
    let mut violations = Vec::new();
    for i in assignment.hotspots() {
        let link = net.cell_rate(i) / h as f64;
        let slack = link - attached_demand(assignment, &baselines, i);
        if slack < -EPS_FEAS {
            violations.push(Violation {
                constraint: Constraint::Baseline,
                subject: Subject::Node(i),
                slack,
            });
        }
        let count = assignment.client_count(i) as f64;
        for j in assignment.clients_of(i) {
            let slack = net.capacity().get(i, j) / count - baselines[j];
            if slack < -EPS_FEAS || slack.is_nan() {
                violations.push(Violation {
                    constraint: Constraint::WifiCap,
                    subject: Subject::Link(i, j),
                    slack,
                });
            }
        }
    }
    FeasibilityReport::from_violations(violations)
}

/// Gives every node its baseline rate, then splits each hotspot's unused link
/// rate equally over its attached nodes round by round. Clients stop growing
/// at their WiFi cap; whatever no client can take stays with the hotspot.
pub fn allocate_rates(net: &Network, assignment: &Assignment) -> Result<RateAllocation> {
    let n = net.node_count();
    if assignment.node_count() != n {
        return Err(Error::Shape(format!(
            "assignment has {} nodes, network {n}",
            assignment.node_count()
        )));
    }
    let report = admissibility(net, assignment);
    if !report.feasible {
        return Err(Error::Infeasible(Box::new(report)));
    }
    let baselines = baseline_rates(net);
    let h = assignment.hotspot_count();
    let mut rates = baselines.to_vec();

    for i in assignment.hotspots() {
        let clients = assignment.clients_of(i);
        let count = clients.len() as f64;
        let caps: Vec<f64> = clients
            .iter()
            .map(|&j| net.capacity().get(i, j) / count)
            .collect();
        let mut open: Vec<bool> = vec![true; clients.len()];
        let link = net.cell_rate(i) / h as f64;
        let mut residual = link - attached_demand(assignment, &baselines, i);

        // Each round either hands out the whole residual or closes a client.
        for _round in 0..=clients.len() {
            if residual < EPS_ALLOC {
                break;
            }
            let active = 1 + open.iter().filter(|&&o| o).count();
            let split = residual / active as f64;
            let mut handed = split;
            rates[i] += split;
            for (k, &j) in clients.iter().enumerate() {
                if !open[k] {
                    continue;
                }
                let room = caps[k] - rates[j];
                if room <= split {
                    rates[j] = caps[k].max(rates[j]);
                    handed += room.max(0.0);
                    open[k] = false;
                } else {
                    rates[j] += split;
                    handed += split;
                }
            }
            residual -= handed;
        }
        // Close (7) exactly on the hotspot's own, uncapped share.
        let total: f64 = rates[i] + clients.iter().map(|&j| rates[j]).sum::<f64>();
        rates[i] += link - total;
    }

    Ok(RateAllocation::from_node_rates(assignment, rates))
}

/// Per-node rates when each hotspot's link time is split equally over the
/// nodes attached to it.
pub fn time_share_rates(net: &Network, assignment: &Assignment) -> Vec<f64> {
    let h = assignment.hotspot_count() as f64;
    (0..net.node_count())
        .map(|j| {
            let i = assignment.hotspot_of(j);
            let members = 1 + assignment.client_count(i);
            net.cell_rate(i) / h / members as f64
        })
        .collect()
}

/// Serialized configuration: hotspots, their clients and per-node rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationFile {
    pub hotspots: Vec<usize>,
    pub clients: BTreeMap<usize, Vec<usize>>,
    #[serde(default)]
    pub rates: BTreeMap<usize, f64>,
}

impl ConfigurationFile {
    pub fn new(assignment: &Assignment, allocation: Option<&RateAllocation>) -> Self {
        Self {
            hotspots: assignment.hotspots(),
            clients: assignment.client_map(),
            rates: allocation
                .map(|a| a.node_rates.iter().copied().enumerate().collect())
                .unwrap_or_default(),
        }
    }

    pub fn assignment(&self, n: usize) -> Result<Assignment> {
        let mut clients = self.clients.clone();
        for &h in &self.hotspots {
            clients.entry(h).or_default();
        }
        if clients.len() != self.hotspots.len() {
            return Err(Error::Assignment(
                "`clients` names a hotspot missing from `hotspots`".into(),
            ));
        }
        Assignment::from_clients(n, &clients)
    }

    /// Rates for every node; missing entries count as zero.
    pub fn allocation(&self, assignment: &Assignment) -> RateAllocation {
        let n = assignment.node_count();
        let rates = (0..n)
            .map(|j| self.rates.get(&j).copied().unwrap_or(0.0))
            .collect();
        RateAllocation::from_node_rates(assignment, rates)
    }
}
