use std::io::Write;

use crate::error::{Error, Result};
use crate::exact::{
    assign_clients, enumerate_optimal, lemma1_config, lemma2_config, ExactOptions, ExactStatus,
};
use crate::fixtures::{fixture, Fixture, NAMES};
use crate::heuristic::{
    compute_fair_loading, configure_network, loading_profile, prospective_client_matrix,
    HeuristicOptions,
};
use crate::metrics::all_node_metrics;
use crate::ratemodel::{allocate_rates, baseline_rates, hotspot_link_rate, Assignment, Network};

struct Printer<'a> {
    out: &'a mut dyn Write,
}

impl Printer<'_> {
    fn row(&mut self, what: &str, expected: impl AsRef<str>, computed: impl AsRef<str>) -> Result<()> {
        writeln!(
            self.out,
            "{what:<34} expected {:<40} computed {}",
            expected.as_ref(),
            computed.as_ref()
        )
        .map_err(|e| Error::io("<stdout>", e))
    }
}

fn fmt_list(xs: &[f64], digits: usize) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.digits$}")).collect();
    format!("({})", parts.join(", "))
}

fn hotspot_labels(f: &Fixture, a: &Assignment) -> String {
    format!("{{{}}}", f.label_list(&a.hotspots()).join(", "))
}

fn feasible_word(ok: bool) -> &'static str {
    if ok {
        "feasible"
    } else {
        "infeasible"
    }
}

fn exact(net: &Network) -> Result<crate::exact::ExactResult> {
    enumerate_optimal(net, &ExactOptions::default())
}

pub fn run_demo(name: &str, out: &mut dyn Write) -> Result<()> {
    let f = fixture(name).ok_or_else(|| {
        Error::param("demo", format!("unknown demo `{name}`; expected one of {}", NAMES.join(", ")))
    })?;
    let net = f.network()?;
    let b = baseline_rates(&net);
    let mut p = Printer { out };
    match name {
        "intro-3node" => {
            let [a, bb, c] = [0, 1, 2];
            p.row("baseline sum rate", "5.63", format!("{:.2}", b.total()))?;
            p.row("node B baseline rate", "3.32", format!("{:.2}", b[bb]))?;
            let best = exact(&net)?;
            p.row("best sum rate, hotspot B", "9.96", format!(
                "{:.2}, hotspots {}",
                best.best_sum_rate,
                hotspot_labels(&f, &best.best_assignment)
            ))?;
            p.row("B link rate with two hotspots", "4.98", format!("{:.2}", hotspot_link_rate(&net, 2, bb)?))?;
            p.row("A as only hotspot", "infeasible", feasible_word(assign_clients(&net, &[a]).is_some()))?;
            p.row("C as only hotspot", "infeasible", feasible_word(assign_clients(&net, &[c]).is_some()))?;
            p.row("B, C as hotspots", "feasible", feasible_word(assign_clients(&net, &[bb, c]).is_some()))?;
        }
        "fig2a" => {
            p.row("baseline sum rate", "3.0976", format!("{:.4}", b.total()))?;
            let graph = f.graph().expect("clique fixture");
            let lemma = lemma1_config(&graph, net.cell_sinrs())?;
            let best = exact(&net)?;
            p.row("single-clique construction", "{17}", hotspot_labels(&f, &lemma))?;
            p.row("exhaustive optimum", "{17}", hotspot_labels(&f, &best.best_assignment))?;
            p.row("optimal sum rate", "5.68", format!("{:.2}", best.best_sum_rate))?;
            p.row("sum rate gain", "83%", format!("{:.0}%", 100.0 * (best.best_sum_rate / b.total() - 1.0)))?;
            let alloc = allocate_rates(&net, &lemma)?;
            p.row(
                "allocated rates",
                "(0.5, 0.5, 0.6, 0.7, 0.7, 0.8, 0.8, 1.0)",
                fmt_list(&alloc.node_rates, 3),
            )?;
        }
        "fig2b" => {
            let graph = f.graph().expect("clique fixture");
            let parts = f.cliques().expect("clique fixture");
            let lemma = lemma2_config(&graph, &parts, net.cell_sinrs())?;
            let best = exact(&net)?;
            p.row("equal-clique construction", "{10, 17}", hotspot_labels(&f, &lemma))?;
            p.row("exhaustive optimum", "{10, 17}", hotspot_labels(&f, &best.best_assignment))?;
            p.row("optimal sum rate", "4.57", format!("{:.2}", best.best_sum_rate))?;
            let h17 = f.indices(&["17"]);
            p.row("17 as only hotspot", "infeasible", feasible_word(assign_clients(&net, &h17).is_some()))?;
        }
        "fig2c" | "fig2d" => {
            let expected = if name == "fig2c" { "{7, 17}" } else { "{7, 16, 17}" };
            let best = exact(&net)?;
            p.row("exhaustive optimum", expected, hotspot_labels(&f, &best.best_assignment))?;
            p.row("optimal sum rate", "", format!("{:.4}", best.best_sum_rate))?;
        }
        "fig2e" => {
            let best = exact(&net)?;
            let status = match best.status {
                ExactStatus::Optimal => "hotspots improve on baseline",
                ExactStatus::BaselineOnly => "baseline optimal",
            };
            p.row("exhaustive optimum", "baseline optimal", status)?;
            let candidate = f.indices(&["6", "7", "13", "16", "17"]);
            p.row(
                "hotspots {6, 7, 13, 16, 17}",
                "infeasible",
                feasible_word(assign_clients(&net, &candidate).is_some()),
            )?;
            let [n5, n6, n7] = [0, 1, 2];
            let h = candidate.len();
            p.row(
                "links of 7 and 6 at 1/5 share",
                "(0.518, 0.463)",
                fmt_list(&[hotspot_link_rate(&net, h, n7)?, hotspot_link_rate(&net, h, n6)?], 3),
            )?;
            p.row("baselines of 5, 6, 7", "(0.257, 0.290, 0.324)", fmt_list(&[b[n5], b[n6], b[n7]], 3))?;
            p.row("demand of 7 with 5 attached", "0.581", format!("{:.3}", b[n7] + b[n5]))?;
        }
        "fig4" => {
            let n15 = f.index_of("15").expect("node 15");
            let others: Vec<usize> = (0..net.node_count()).filter(|&j| j != n15).collect();
            let row: Vec<f64> = others.iter().map(|&j| net.capacity().get(n15, j)).collect();
            p.row("c(15, j), j = 5 8 10 13 14", "(7.32, 0.40, 0.32, 8.64, 6.99)", fmt_list(&row, 2))?;
            let w = prospective_client_matrix(net.capacity(), &b);
            p.row("client budget of 15", "3", format!("{}", w.budget(n15).map_or(0, |v| v)))?;
            p.row("prospective clients of 15", "{5, 13, 14}", format!("{{{}}}", f.label_list(w.row(n15)).join(", ")))?;

            let cfg = configure_network(&net, &HeuristicOptions::default());
            p.row("hotspot count", "2", format!("{}", cfg.hotspot_count))?;
            p.row("hotspots", "{13, 15}", hotspot_labels(&f, &cfg.assignment))?;
            let before = loading_profile(&net, &cfg.pre_fair_assignment, &b);
            let after = loading_profile(&net, &cfg.assignment, &b);
            let l = |prof: &crate::heuristic::LoadingProfile| {
                fmt_list(&prof.loadings.values().copied().collect::<Vec<_>>(), 3)
            };
            p.row("loadings of 13, 15 before", "(0.97, 0.64)", l(&before))?;
            p.row("loadings of 13, 15 after", "(0.82, 0.78)", l(&after))?;

            let pre_alloc = allocate_rates(&net, &cfg.pre_fair_assignment)?;
            let gains = |a: &Assignment, alloc| -> Vec<f64> {
                all_node_metrics(&net, a, alloc, &b).iter().map(|m| m.gain_pct).collect()
            };
            p.row(
                "gains % before rebalancing",
                "(4.76, 3.41, 2.82, 2.23, 56.81, 53.19)",
                fmt_list(&gains(&cfg.pre_fair_assignment, &pre_alloc), 2),
            )?;
            p.row(
                "gains % after rebalancing",
                "(53.31, 28.43, 23.59, 18.59, 23.30, 21.82)",
                fmt_list(&gains(&cfg.assignment, &cfg.allocation), 2),
            )?;
            let (_, moves) = compute_fair_loading(&net, &cfg.pre_fair_assignment, &w, &b);
            for m in moves {
                p.row(
                    &format!("move {} from {} to {}", f.labels[m.client], f.labels[m.from], f.labels[m.to]),
                    "",
                    format!("fairness {:.4} -> {:.4}", m.fairness_before, m.fairness_after),
                )?;
            }
        }
        _ => unreachable!("every fixture has a demo"),
    }
    Ok(())
}
