//! Test-side oracles, written against the model definitions only.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tethernet::ratemodel::{CapacityMatrix, Network};

pub const FEAS_TOL: f64 = 1e-9;

/// A network given by linear cellular SINRs and a WiFi capacity table
/// (`inf` for an uncapped link, 0 for none).
#[derive(Debug, Clone)]
pub struct Inst {
    pub sinr: Vec<f64>,
    pub cap: Vec<Vec<f64>>,
}

impl Inst {
    pub fn n(&self) -> usize {
        self.sinr.len()
    }

    pub fn network(&self) -> Network {
        Network::new(self.sinr.clone(), CapacityMatrix::from_rows(&self.cap)).unwrap()
    }

    pub fn link(&self, i: usize) -> f64 {
        (1.0 + self.sinr[i]).log2()
    }

    pub fn baselines(&self) -> Vec<f64> {
        let n = self.n() as f64;
        (0..self.n()).map(|i| self.link(i) / n).collect()
    }

    pub fn baseline_sum(&self) -> f64 {
        self.baselines().iter().sum()
    }
}

pub fn db(v: f64) -> f64 {
    10f64.powf(v / 10.0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uncapped links on the edges of a graph, nothing elsewhere.
pub fn graph_inst(sinr_db: &[f64], adj: &[Vec<bool>]) -> Inst {
    let n = sinr_db.len();
    let cap = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        f64::NAN
                    } else if adj[i][j] {
                        f64::INFINITY
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    Inst {
        sinr: sinr_db.iter().map(|&d| db(d)).collect(),
        cap,
    }
}

pub fn random_graph_inst(r: &mut ChaCha8Rng, n: usize) -> Inst {
    let p = r.random_range(0.2..0.9);
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let e = r.random_bool(p);
            adj[i][j] = e;
            adj[j][i] = e;
        }
    }
    let sinr_db: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..30.0)).collect();
    graph_inst(&sinr_db, &adj)
}

pub fn random_sinr_inst(r: &mut ChaCha8Rng, n: usize) -> Inst {
    let eta = [0.5, 0.75, 1.0][r.random_range(0..3)];
    let mut cap = vec![vec![f64::NAN; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let c = eta * (1.0 + db(r.random_range(-10.0..35.0))).log2();
            cap[i][j] = c;
            cap[j][i] = c;
        }
    }
    Inst {
        sinr: (0..n).map(|_| db(r.random_range(-5.0..30.0))).collect(),
        cap,
    }
}

pub fn complete_adj(n: usize) -> Vec<Vec<bool>> {
    (0..n).map(|i| (0..n).map(|j| i != j).collect()).collect()
}

pub fn cliques_adj(n: usize, parts: &[Vec<usize>]) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for p in parts {
        for &i in p {
            for &j in p {
                adj[i][j] = i != j;
            }
        }
    }
    adj
}

/// Whether the non-hotspots can be attached to `hotspots` so that every
/// link covers its nodes' baselines and every client keeps its baseline
/// under the WiFi cap. Plain recursion over all attachments.
pub fn brute_force_attachable(inst: &Inst, hotspots: &[usize]) -> bool {
    let b = inst.baselines();
    let h = hotspots.len() as f64;
    let rest: Vec<usize> = (0..inst.n()).filter(|j| !hotspots.contains(j)).collect();
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); hotspots.len()];

    fn ok(inst: &Inst, b: &[f64], h: f64, hs: usize, group: &[usize]) -> bool {
        let demand: f64 = b[hs] + group.iter().map(|&j| b[j]).sum::<f64>();
        let k = group.len() as f64;
        demand <= inst.link(hs) / h + FEAS_TOL
            && group.iter().all(|&j| inst.cap[hs][j] / k >= b[j] - FEAS_TOL)
    }

    fn go(
        inst: &Inst,
        b: &[f64],
        h: f64,
        hotspots: &[usize],
        rest: &[usize],
        groups: &mut Vec<Vec<usize>>,
    ) -> bool {
        let Some((&j, tail)) = rest.split_first() else {
            return hotspots.iter().zip(groups.iter()).all(|(&hs, g)| ok(inst, b, h, hs, g));
        };
        for g in 0..hotspots.len() {
            groups[g].push(j);
            let demand: f64 = b[hotspots[g]] + groups[g].iter().map(|&u| b[u]).sum::<f64>();
            if demand <= inst.link(hotspots[g]) / h + FEAS_TOL && go(inst, b, h, hotspots, tail, groups) {
                return true;
            }
            groups[g].pop();
        }
        false
    }

    go(inst, &b, h, hotspots, &rest, &mut groups)
}

/// Best sum rate over all hotspot subsets with a valid attachment.
pub fn brute_force_optimum(inst: &Inst) -> (f64, Vec<usize>) {
    let n = inst.n();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for mask in 1u32..(1 << n) {
        let hs: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let value = hs.iter().map(|&i| inst.link(i)).sum::<f64>() / hs.len() as f64;
        if value > best.0 + 1e-12 && brute_force_attachable(inst, &hs) {
            best = (value, hs);
        }
    }
    best
}

/// Checks attachment, baseline, WiFi-cap and link-sum constraints directly.
pub fn check_configuration(inst: &Inst, parent: &[usize], rates: &[f64]) -> Result<(), String> {
    let n = inst.n();
    let b = inst.baselines();
    if parent.len() != n || rates.len() != n {
        return Err("length mismatch".into());
    }
    for j in 0..n {
        if parent[parent[j]] != parent[j] {
            return Err(format!("node {j} attached to non-hotspot {}", parent[j]));
        }
    }
    let hotspots: Vec<usize> = (0..n).filter(|&i| parent[i] == i).collect();
    let h = hotspots.len() as f64;
    for j in 0..n {
        if rates[j] < b[j] - FEAS_TOL {
            return Err(format!("node {j}: rate {} below baseline {}", rates[j], b[j]));
        }
    }
    for &i in &hotspots {
        let members: Vec<usize> = (0..n).filter(|&j| parent[j] == i).collect();
        let k = (members.len() - 1) as f64;
        let sum: f64 = members.iter().map(|&j| rates[j]).sum();
        if (sum - inst.link(i) / h).abs() > FEAS_TOL {
            return Err(format!("hotspot {i}: rates sum {sum}, link {}", inst.link(i) / h));
        }
        for &j in members.iter().filter(|&&j| j != i) {
            if rates[j] > inst.cap[i][j] / k + FEAS_TOL {
                return Err(format!("client {j} of {i} above its WiFi share"));
            }
        }
    }
    Ok(())
}

/// One line per criterion: collects checks, prints the verdict, then asserts.
pub struct Criterion {
    id: u8,
    name: &'static str,
    failures: Vec<String>,
    checks: usize,
}

impl Criterion {
    pub fn new(id: u8, name: &'static str) -> Self {
        Self {
            id,
            name,
            failures: Vec::new(),
            checks: 0,
        }
    }

    pub fn check(&mut self, what: impl Into<String>, ok: bool) -> &mut Self {
        self.checks += 1;
        if !ok {
            self.failures.push(what.into());
        }
        self
    }

    pub fn close(&mut self, what: &str, got: f64, want: f64, tol: f64) -> &mut Self {
        let ok = (got - want).abs() <= tol;
        self.check(format!("{what}: got {got:.5}, want {want} ± {tol}"), ok)
    }

    pub fn finish(&self) {
        let verdict = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {verdict}: {} ({} checks{})",
            self.id,
            self.name,
            self.checks,
            if self.failures.is_empty() {
                String::new()
            } else {
                format!("; failed: {}", self.failures.join("; "))
            }
        );
        assert!(self.failures.is_empty(), "criterion {} failed", self.id);
    }
}
