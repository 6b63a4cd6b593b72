//! Acceptance criteria, one test per criterion. Run with `--nocapture` to see
//! the verdict lines.

mod common;

use common::*;
use rand::seq::SliceRandom;
use rand::Rng;
use tethernet::exact::{
    assign_clients, enumerate_optimal, lemma1_config, lemma2_config, verify_clique_partition,
    ExactOptions, ExactStatus, WifiGraph,
};
use tethernet::fixtures::fixture;
use tethernet::heuristic::{
    configure_network, loading_profile, prospective_client_matrix, HeuristicOptions,
};
use tethernet::metrics::{all_node_metrics, summarize, BinEdges, NodeMetrics};
use tethernet::ratemodel::{
    allocate_rates, baseline_rates, check_feasibility, hotspot_link_rate, sum_rate, Assignment,
    Network,
};
use tethernet::sweep::{run_sweep, SweepGrid};

/// Reference rates are given to two to four significant figures.
const TOL_RATE: f64 = 0.01;
/// Rates printed to one decimal only.
const TOL_ONE_DECIMAL: f64 = 0.05;
/// Percentage-point tolerance on per-node gains.
const TOL_GAIN_PP: f64 = 0.05;
/// Numerical tolerance on equalities that hold exactly in the model.
const TOL_EXACT: f64 = 1e-9;

fn exact(net: &Network) -> tethernet::exact::ExactResult {
    enumerate_optimal(net, &ExactOptions::default()).unwrap()
}

fn labels_of(f: &tethernet::fixtures::Fixture, a: &Assignment) -> Vec<&'static str> {
    f.label_list(&a.hotspots())
}

fn sorted(mut v: Vec<&'static str>) -> Vec<&'static str> {
    v.sort_by(|a, b| a.parse::<f64>().unwrap().total_cmp(&b.parse::<f64>().unwrap()));
    v
}

#[test]
fn criterion_01_intro_network() {
    let mut c = Criterion::new(1, "three-node introduction example");
    let f = fixture("intro-3node").unwrap();
    let net = f.network().unwrap();
    let b = baseline_rates(&net);
    let (a, bb, cc) = (0, 1, 2);
    c.close("baseline sum", b.total(), 5.63, TOL_RATE);
    c.close("B baseline", b[bb], 3.32, TOL_RATE);
    let best = exact(&net);
    c.check("B is the single optimal hotspot", best.best_assignment.hotspots() == vec![bb]);
    c.close("single-hotspot B sum", best.best_sum_rate, 9.96, TOL_RATE);
    c.close("two-hotspot B link", hotspot_link_rate(&net, 2, bb).unwrap(), 4.98, TOL_RATE);
    c.check("A alone infeasible", assign_clients(&net, &[a]).is_none());
    c.check("C alone infeasible", assign_clients(&net, &[cc]).is_none());
    c.check("B and C feasible", assign_clients(&net, &[bb, cc]).is_some());
    c.finish();
}

#[test]
fn criterion_02_single_clique() {
    let mut c = Criterion::new(2, "single-clique network");
    let f = fixture("fig2a").unwrap();
    let net = f.network().unwrap();
    let b = baseline_rates(&net);
    c.close("baseline sum", b.total(), 3.0976, 1e-4);
    let lemma = lemma1_config(&f.graph().unwrap(), net.cell_sinrs()).unwrap();
    let best = exact(&net);
    c.check("construction picks 17", labels_of(&f, &lemma) == vec!["17"]);
    c.check("exhaustive picks 17", labels_of(&f, &best.best_assignment) == vec!["17"]);
    c.close("optimal sum", best.best_sum_rate, 5.68, TOL_RATE);
    c.close("construction sum", sum_rate(&net, &lemma), best.best_sum_rate, TOL_EXACT);
    let gain = 100.0 * (best.best_sum_rate / b.total() - 1.0);
    c.close("sum gain %", gain, 83.0, 0.5);
    let alloc = allocate_rates(&net, &lemma).unwrap();
    let want = [0.5, 0.5, 0.6, 0.7, 0.7, 0.8, 0.8, 1.0];
    for (j, (&got, &w)) in alloc.node_rates.iter().zip(&want).enumerate() {
        c.close(&format!("rate of node {}", f.labels[j]), got, w, TOL_ONE_DECIMAL);
    }
    c.finish();
}

#[test]
fn criterion_03_equal_cliques() {
    let mut c = Criterion::new(3, "two equal cliques");
    let f = fixture("fig2b").unwrap();
    let net = f.network().unwrap();
    let graph = f.graph().unwrap();
    let parts = verify_clique_partition(&graph).unwrap();
    c.check("graph splits into two cliques of four", parts.len() == 2 && parts.iter().all(|p| p.len() == 4));
    let lemma = lemma2_config(&graph, &parts, net.cell_sinrs()).unwrap();
    let best = exact(&net);
    c.check("construction picks {10, 17}", sorted(labels_of(&f, &lemma)) == vec!["10", "17"]);
    c.check("exhaustive picks {10, 17}", sorted(labels_of(&f, &best.best_assignment)) == vec!["10", "17"]);
    c.close("optimal sum", best.best_sum_rate, 4.57, TOL_RATE);
    c.close("construction sum", sum_rate(&net, &lemma), best.best_sum_rate, TOL_EXACT);
    c.check("17 alone infeasible", assign_clients(&net, &f.indices(&["17"])).is_none());
    c.finish();
}

#[test]
fn criterion_04_unequal_cliques() {
    let mut c = Criterion::new(4, "unequal cliques, exhaustive search");
    let f = fixture("fig2c").unwrap();
    let best = exact(&f.network().unwrap());
    c.check("fig2c optimum {7, 17}", sorted(labels_of(&f, &best.best_assignment)) == vec!["7", "17"]);

    let f = fixture("fig2d").unwrap();
    let best = exact(&f.network().unwrap());
    c.check(
        "fig2d optimum {7, 16, 17}",
        sorted(labels_of(&f, &best.best_assignment)) == vec!["7", "16", "17"],
    );

    let f = fixture("fig2e").unwrap();
    let net = f.network().unwrap();
    let best = exact(&net);
    c.check("fig2e baseline optimal", best.status == ExactStatus::BaselineOnly);
    c.check("fig2e optimum has every node a hotspot", best.best_assignment.hotspot_count() == 8);
    let candidate = f.indices(&["6", "7", "13", "16", "17"]);
    c.check("{6, 7, 13, 16, 17} has no attachment", assign_clients(&net, &candidate).is_none());
    let b = baseline_rates(&net);
    let [n5, n6, n7] = [0, 1, 2];
    c.close("link of 7 at 1/5", hotspot_link_rate(&net, 5, n7).unwrap(), 0.518, TOL_RATE);
    c.close("link of 6 at 1/5", hotspot_link_rate(&net, 5, n6).unwrap(), 0.463, TOL_RATE);
    c.close("baseline 5", b[n5], 0.257, TOL_RATE);
    c.close("baseline 6", b[n6], 0.290, TOL_RATE);
    c.close("baseline 7", b[n7], 0.324, TOL_RATE);
    c.close("demand of 7 with 5", b[n7] + b[n5], 0.581, TOL_RATE);
    c.check("7 cannot carry 5", hotspot_link_rate(&net, 5, n7).unwrap() < b[n7] + b[n5]);
    c.finish();
}

#[test]
fn criterion_05_six_node_pipeline() {
    let mut c = Criterion::new(5, "six-node heuristic walkthrough");
    let f = fixture("fig4").unwrap();
    let net = f.network().unwrap();
    let b = baseline_rates(&net);
    let id = |l: &str| f.index_of(l).unwrap();

    let n15 = id("15");
    for (l, want) in [("5", 7.32), ("8", 0.40), ("10", 0.32), ("13", 8.64), ("14", 6.99)] {
        c.close(&format!("c(15, {l})"), net.capacity().get(n15, id(l)), want, TOL_RATE);
    }
    let w = prospective_client_matrix(net.capacity(), &b);
    c.check("n* of 15 is 3", w.budget(n15) == Some(3));
    c.check("S of 15 is {5, 13, 14}", w.row(n15) == f.indices(&["5", "13", "14"]).as_slice());

    let traced = configure_network(
        &net,
        &HeuristicOptions {
            trace_selection: true,
            ..HeuristicOptions::default()
        },
    );
    let h1 = &traced.records[0];
    let first = &h1.selections[0];
    c.check("H=1: 15 pruned from 5", first.removed[&id("5")] == vec![n15]);
    c.check(
        "H=1: nothing else pruned",
        first.removed.iter().all(|(&i, r)| i == id("5") || r.is_empty()),
    );
    c.check("H=1: 13 is a feasible single hotspot", h1.feasible && h1.hotspots == vec![id("13")]);
    let h2 = &traced.records[1];
    c.check("H=2: two selection calls", h2.selections.len() == 2);
    c.check("H=2: 13 picked first", h2.selections[0].hotspots.first() == Some(&id("13")));
    let second_nodes: Vec<usize> = h2.selections[1].supported.keys().copied().collect();
    c.check("H=2: second call over {14, 15}", second_nodes == vec![id("14"), n15]);
    c.check("H=2: 15 chosen over 14", h2.selections[1].hotspots == vec![n15]);

    let cfg = configure_network(&net, &HeuristicOptions::default());
    c.check("H* = 2", cfg.hotspot_count == 2);
    c.check("hotspots {13, 15}", cfg.assignment.hotspots() == vec![id("13"), n15]);
    let before = loading_profile(&net, &cfg.pre_fair_assignment, &b);
    let after = loading_profile(&net, &cfg.assignment, &b);
    c.close("L13 before", before.loadings[&id("13")], 0.97, TOL_RATE);
    c.close("L15 before", before.loadings[&n15], 0.64, TOL_RATE);
    c.close("L13 after", after.loadings[&id("13")], 0.82, TOL_RATE);
    c.close("L15 after", after.loadings[&n15], 0.78, TOL_RATE);

    let unfair = configure_network(
        &net,
        &HeuristicOptions {
            fair_loading: false,
            ..HeuristicOptions::default()
        },
    );
    c.check("unbalanced run keeps the selected clients", unfair.assignment == cfg.pre_fair_assignment);
    let gains = |a: &Assignment, alloc| -> Vec<f64> {
        all_node_metrics(&net, a, alloc, &b).iter().map(|m| m.gain_pct).collect()
    };
    let want_before = [4.76, 3.41, 2.82, 2.23, 56.81, 53.19];
    let want_after = [53.31, 28.43, 23.59, 18.59, 23.30, 21.82];
    for (j, (&g, &w)) in gains(&unfair.assignment, &unfair.allocation).iter().zip(&want_before).enumerate() {
        c.close(&format!("gain before, node {}", f.labels[j]), g, w, TOL_GAIN_PP);
    }
    for (j, (&g, &w)) in gains(&cfg.assignment, &cfg.allocation).iter().zip(&want_after).enumerate() {
        c.close(&format!("gain after, node {}", f.labels[j]), g, w, TOL_GAIN_PP);
    }
    c.finish();
}

/// 200 small instances, half uncapped graphs and half SINR-derived caps.
fn oracle_instances() -> Vec<Inst> {
    let mut r = rng(0x5eed_0006);
    (0..200)
        .map(|k| {
            let n = r.random_range(4..=8);
            if k % 2 == 0 {
                random_graph_inst(&mut r, n)
            } else {
                random_sinr_inst(&mut r, n)
            }
        })
        .collect()
}

#[test]
fn criterion_06_heuristic_below_exact() {
    let mut c = Criterion::new(6, "heuristic feasible and dominated by the exact optimum");
    for (k, inst) in oracle_instances().iter().enumerate() {
        let net = inst.network();
        let best = exact(&net);
        let (oracle, _) = brute_force_optimum(inst);
        c.check(
            format!("instance {k}: exact {} vs brute force {oracle}", best.best_sum_rate),
            (best.best_sum_rate - oracle).abs() <= TOL_EXACT,
        );
        c.check(format!("instance {k}: exact below baseline"), best.best_sum_rate >= inst.baseline_sum() - TOL_EXACT);
        let cfg = configure_network(&net, &HeuristicOptions::default());
        let report = check_feasibility(&net, &cfg.assignment, &cfg.allocation);
        c.check(format!("instance {k}: heuristic infeasible: {report}"), report.feasible);
        if let Err(e) = check_configuration(inst, cfg.assignment.parents(), &cfg.allocation.node_rates) {
            c.check(format!("instance {k}: independent check: {e}"), false);
        }
        c.check(
            format!("instance {k}: heuristic {} above exact {}", cfg.sum_rate, best.best_sum_rate),
            cfg.sum_rate <= best.best_sum_rate + TOL_EXACT,
        );
    }
    c.finish();
}

#[test]
fn criterion_07_clique_constructions_optimal() {
    let mut c = Criterion::new(7, "clique constructions match the exhaustive optimum");
    let mut r = rng(0x5eed_0007);
    for k in 0..100 {
        let n = r.random_range(1..=9);
        let sinr_db: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..30.0)).collect();
        let inst = graph_inst(&sinr_db, &complete_adj(n));
        let net = inst.network();
        let lemma = lemma1_config(&WifiGraph::complete(n), net.cell_sinrs()).unwrap();
        let (oracle, _) = brute_force_optimum(&inst);
        c.close(&format!("clique {k}"), sum_rate(&net, &lemma), oracle, TOL_EXACT);
        c.close(&format!("clique {k} exact"), exact(&net).best_sum_rate, oracle, TOL_EXACT);
    }
    for k in 0..100 {
        let size = r.random_range(1..=4);
        let parts_n = r.random_range(1..=9 / size);
        let n = size * parts_n;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut r);
        let parts: Vec<Vec<usize>> = order.chunks(size).map(|p| p.to_vec()).collect();
        let sinr_db: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..30.0)).collect();
        let inst = graph_inst(&sinr_db, &cliques_adj(n, &parts));
        let net = inst.network();
        let graph = WifiGraph::from_cliques(n, &parts).unwrap();
        let found = verify_clique_partition(&graph).unwrap();
        let lemma = lemma2_config(&graph, &found, net.cell_sinrs()).unwrap();
        let (oracle, _) = brute_force_optimum(&inst);
        c.close(&format!("{parts_n} cliques of {size} ({k})"), sum_rate(&net, &lemma), oracle, TOL_EXACT);
        c.close(&format!("{parts_n} cliques of {size} ({k}) exact"), exact(&net).best_sum_rate, oracle, TOL_EXACT);
    }
    c.finish();
}

#[test]
fn criterion_08_generated_feasibility() {
    let mut c = Criterion::new(8, "feasibility over a reduced generated grid");
    let grid = SweepGrid {
        nodes: vec![50, 100],
        radius_km: vec![1.0, 5.0],
        eta: vec![0.5, 1.0],
        alpha: vec![3.0],
        alpha_wifi: vec![3.0],
        instances: 100,
        base_seed: 8_000,
        ..SweepGrid::default()
    };
    let mut runs = 0;
    for key in grid.cells() {
        for i in 0..grid.instances {
            let params = key.params(&grid.base, grid.base_seed + i as u64);
            let scenario = tethernet::scenario::generate_scenario(&params).unwrap();
            let net = Network::from_scenario(&scenario);
            let b = baseline_rates(&net);
            let cfg = configure_network(&net, &HeuristicOptions::default());
            let tag = format!("{} #{i}", key.stem());
            for j in 0..net.node_count() {
                if cfg.allocation.node_rates[j] < b[j] - TOL_EXACT {
                    c.check(format!("{tag}: node {j} below baseline"), false);
                }
            }
            let h = cfg.assignment.hotspot_count() as f64;
            for hs in cfg.assignment.hotspots() {
                let total: f64 = std::iter::once(hs)
                    .chain(cfg.assignment.clients_of(hs))
                    .map(|j| cfg.allocation.node_rates[j])
                    .sum();
                if (total - net.cell_rate(hs) / h).abs() > TOL_EXACT {
                    c.check(format!("{tag}: link sum of {hs} off by {}", total - net.cell_rate(hs) / h), false);
                }
            }
            let report = check_feasibility(&net, &cfg.assignment, &cfg.allocation);
            if !report.feasible {
                c.check(format!("{tag}: {report}"), false);
            }
            let mut last = loading_profile(&net, &cfg.pre_fair_assignment, &b).fairness;
            for m in &cfg.moves {
                if m.fairness_after < m.fairness_before || (m.fairness_before - last).abs() > TOL_EXACT {
                    c.check(format!("{tag}: fairness fell on moving {}", m.client), false);
                }
                last = m.fairness_after;
            }
            let end = loading_profile(&net, &cfg.assignment, &b).fairness;
            c.check(format!("{tag}: final fairness mismatch"), (end - last).abs() <= TOL_EXACT);
            runs += 1;
        }
    }
    c.check("every scenario ran", runs == 800);
    c.finish();
}

fn mean_gain(nodes: usize, radius_km: f64, eta: f64, alpha_wifi: f64) -> (f64, f64) {
    let grid = SweepGrid {
        nodes: vec![nodes],
        radius_km: vec![radius_km],
        eta: vec![eta],
        alpha: vec![3.0],
        alpha_wifi: vec![alpha_wifi],
        instances: 100,
        base_seed: 9_000,
        ..SweepGrid::default()
    };
    let cell = &run_sweep(&grid).unwrap()[0];
    let metrics: Vec<Vec<NodeMetrics>> = cell.instances.iter().map(|r| r.metrics.clone()).collect();
    let s = summarize(&metrics, &BinEdges::default()).unwrap();
    (s.mean_gain_pct, s.mean_hotspot_count)
}

#[test]
fn criterion_09_monte_carlo_trends() {
    let mut c = Criterion::new(9, "Monte-Carlo gain trends at N = 100, 1 km");
    let (g50, _) = mean_gain(100, 1.0, 0.5, 3.0);
    let (g75, h75) = mean_gain(100, 1.0, 0.75, 3.0);
    let (g100, _) = mean_gain(100, 1.0, 1.0, 3.0);
    let (g75_aw25, _) = mean_gain(100, 1.0, 0.75, 2.5);
    c.check(format!("mean gain {g75:.2}% below 20%"), g75 >= 20.0);
    c.check(
        format!("gain not monotone in eta: {g50:.2}, {g75:.2}, {g100:.2}"),
        g50 <= g75 && g75 <= g100,
    );
    c.check(format!("alpha_w 2.5 gain {g75_aw25:.2}% not above {g75:.2}%"), g75_aw25 > g75);
    c.check(format!("mean H* {h75:.2} not below N/2"), h75 < 50.0);
    println!(
        "  gains: eta 0.5 {g50:.2}%, 0.75 {g75:.2}%, 1 {g100:.2}%; alpha_w 2.5 {g75_aw25:.2}%; mean H* {h75:.2}"
    );
    c.finish();
}

#[test]
fn criterion_10_exit_condition_sound() {
    let mut c = Criterion::new(10, "exit condition never changes the result");
    let off = HeuristicOptions {
        exit_condition: false,
        ..HeuristicOptions::default()
    };
    for (k, inst) in oracle_instances().iter().enumerate() {
        let net = inst.network();
        let with = configure_network(&net, &HeuristicOptions::default());
        let without = configure_network(&net, &off);
        c.check(
            format!("instance {k}"),
            with.assignment == without.assignment
                && with.hotspot_count == without.hotspot_count
                && with.allocation.node_rates == without.allocation.node_rates,
        );
    }
    c.finish();
}
