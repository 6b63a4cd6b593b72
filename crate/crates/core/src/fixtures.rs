//! Small reference networks with hand-checkable answers.
//!
//! Nodes are indexed in ascending cellular SINR; labels are the dB values
//! except for the three-node network, labelled A, B and C.

use crate::error::Result;
use crate::exact::WifiGraph;
use crate::ratemodel::Network;
use crate::scenario::{Scenario, ScenarioParams};

pub const NAMES: [&str; 7] = ["intro-3node", "fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig4"];

#[derive(Debug, Clone, PartialEq)]
pub enum WifiSpec {
    /// Binary connectivity given as cliques over node labels.
    Cliques(Vec<Vec<&'static str>>),
    /// Full WiFi SINR table in dB with the given efficiency.
    SinrDb { table: Vec<Vec<f64>>, eta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub name: &'static str,
    pub labels: Vec<&'static str>,
    pub cell_sinr_db: Vec<f64>,
    pub wifi: WifiSpec,
}

impl Fixture {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn indices(&self, labels: &[&str]) -> Vec<usize> {
        labels
            .iter()
            .map(|l| self.index_of(l).unwrap_or_else(|| panic!("no node labelled {l}")))
            .collect()
    }

    pub fn label_list(&self, nodes: &[usize]) -> Vec<&'static str> {
        nodes.iter().map(|&i| self.labels[i]).collect()
    }

    pub fn cell_sinr(&self) -> Vec<f64> {
        self.cell_sinr_db.iter().map(|&d| crate::scenario::db_to_linear(d)).collect()
    }

    /// The WiFi graph, for fixtures given as cliques.
    pub fn graph(&self) -> Option<WifiGraph> {
        match &self.wifi {
            WifiSpec::Cliques(parts) => {
                let parts: Vec<Vec<usize>> = parts.iter().map(|p| self.indices(p)).collect();
                Some(WifiGraph::from_cliques(self.node_count(), &parts).expect("valid fixture"))
            }
            WifiSpec::SinrDb { .. } => None,
        }
    }

    /// Clique parts as node indices, for fixtures given as cliques.
    pub fn cliques(&self) -> Option<Vec<Vec<usize>>> {
        match &self.wifi {
            WifiSpec::Cliques(parts) => Some(parts.iter().map(|p| self.indices(p)).collect()),
            WifiSpec::SinrDb { .. } => None,
        }
    }

    pub fn network(&self) -> Result<Network> {
        match &self.wifi {
            WifiSpec::Cliques(_) => self.graph().expect("clique fixture").network(self.cell_sinr()),
            WifiSpec::SinrDb { table, eta } => {
                let params = ScenarioParams {
                    wifi_efficiency: *eta,
                    ..ScenarioParams::default()
                };
                let scenario = Scenario::from_db(params, &self.cell_sinr_db, table)?;
                Ok(Network::from_scenario(&scenario))
            }
        }
    }
}

const FIG2_LABELS: [&str; 8] = ["2", "3", "7", "8", "9", "10", "12", "17"];

fn db_labels(labels: &[&'static str]) -> (Vec<&'static str>, Vec<f64>) {
    let db = labels.iter().map(|l| l.parse().expect("numeric label")).collect();
    (labels.to_vec(), db)
}

fn clique_fixture(name: &'static str, labels: &[&'static str], parts: &[&[&'static str]]) -> Fixture {
    let (labels, cell_sinr_db) = db_labels(labels);
    Fixture {
        name,
        labels,
        cell_sinr_db,
        wifi: WifiSpec::Cliques(parts.iter().map(|p| p.to_vec()).collect()),
    }
}

pub fn fixture(name: &str) -> Option<Fixture> {
    Some(match name {
        "intro-3node" => Fixture {
            name: "intro-3node",
            labels: vec!["A", "B", "C"],
            cell_sinr_db: vec![10.0, 30.0, 10.0],
            wifi: WifiSpec::Cliques(vec![vec!["A", "B", "C"]]),
        },
        "fig2a" => clique_fixture("fig2a", &FIG2_LABELS, &[&FIG2_LABELS]),
        "fig2b" => clique_fixture(
            "fig2b",
            &FIG2_LABELS,
            &[&["8", "9", "12", "17"], &["2", "3", "7", "10"]],
        ),
        "fig2c" => clique_fixture(
            "fig2c",
            &FIG2_LABELS,
            &[&["2", "3", "7"], &["8", "9", "10", "12", "17"]],
        ),
        "fig2d" => clique_fixture(
            "fig2d",
            &["2", "3", "7", "10", "12", "13", "16", "17"],
            &[&["2", "3", "7"], &["10", "12", "13", "16", "17"]],
        ),
        "fig2e" => clique_fixture(
            "fig2e",
            &["5", "6", "7", "10", "12", "13", "16", "17"],
            &[&["5", "6", "7"], &["10", "12", "13", "16", "17"]],
        ),
        "fig4" => {
            let (labels, cell_sinr_db) = db_labels(&["5", "8", "10", "13", "14", "15"]);
            let x = f64::NAN;
            Fixture {
                name: "fig4",
                labels,
                cell_sinr_db,
                wifi: WifiSpec::SinrDb {
                    table: vec![
                        vec![x, -10.0, -8.0, 29.0, 20.0, 22.0],
                        vec![-10.0, x, 20.0, 25.0, -8.0, -5.0],
                        vec![-8.0, 20.0, x, 21.0, -15.0, -6.0],
                        vec![29.0, 25.0, 21.0, x, 22.0, 26.0],
                        vec![20.0, -8.0, -15.0, 22.0, x, 21.0],
                        vec![22.0, -5.0, -6.0, 26.0, 21.0, x],
                    ],
                    eta: 1.0,
                },
            }
        }
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_named_fixture_builds() {
        for name in NAMES {
            let f = fixture(name).unwrap();
            assert_eq!(f.name, name);
            let net = f.network().unwrap();
            assert_eq!(net.node_count(), f.node_count());
        }
        assert!(fixture("fig3").is_none());
    }

    #[test]
    fn sinr_ascends_with_index() {
        for name in NAMES.iter().skip(1) {
            let f = fixture(name).unwrap();
            assert!(f.cell_sinr_db.windows(2).all(|w| w[0] < w[1]), "{name}");
        }
    }
}
