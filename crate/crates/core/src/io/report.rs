//! Report formats. Numbers use the shortest representation that parses back
//! to the same f64.

use std::fmt::Write;

use serde_json::json;

use crate::moo::GenerationStats;
use crate::network::Network;
use crate::placement::{EvaluatedPlan, PENALTY};
use crate::power_flow::PowerFlowState;
use crate::reliability::ReliabilityResult;

pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

const PARETO_HEADER: &str = "index,switches,maneuvers,num_switches,num_maneuvers,f1,f2,\
switch_capital,maneuver_capital,maintenance_pw,loss_pw,total_ens,penalized";

/// One row per plan, in the given order.
pub fn pareto_csv(plans: &[EvaluatedPlan]) -> String {
    let mut out = String::from(PARETO_HEADER);
    out.push('\n');
    for (i, e) in plans.iter().enumerate() {
        let cost = match &e.cost {
            Some(c) => {
                [c.switch_capital, c.maneuver_capital, c.maintenance_pw, c.loss_pw].map(fmt_num).join(",")
            }
            None => ",,,".into(),
        };
        writeln!(
            out,
            "{i},{},{},{},{},{},{},{cost},{},{}",
            e.plan.switch_bits(),
            e.plan.maneuver_bits(),
            e.plan.num_switches(),
            e.plan.num_maneuvers(),
            fmt_num(e.f1),
            fmt_num(e.f2),
            fmt_num(e.reliability.total_ens),
            e.penalized
        )
        .unwrap();
    }
    out
}

pub fn pareto_json(net: &Network, plans: &[EvaluatedPlan]) -> String {
    let ids = |idx: &[usize]| -> Vec<&str> { idx.iter().map(|&c| net.candidates()[c].id.as_str()).collect() };
    let front: Vec<_> = plans
        .iter()
        .enumerate()
        .map(|(i, e)| {
            json!({
                "index": i,
                "switches": e.plan.switch_bits(),
                "maneuvers": e.plan.maneuver_bits(),
                "f1": e.f1,
                "f2": e.f2,
                "cost": e.cost,
                "total_ens": e.reliability.total_ens,
                "penalized": e.penalized,
            })
        })
        .collect();
    let doc = json!({
        "penalty_sentinel": PENALTY,
        "switch_candidates": ids(net.switch_candidates()),
        "maneuver_candidates": ids(net.maneuver_candidates()),
        "front": front,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json value serializes");
    s.push('\n');
    s
}

/// `key = value` summary of the selected plan.
pub fn compromise_text(net: &Network, e: &EvaluatedPlan) -> String {
    let chosen = |idx: &[usize], flags: &[bool]| -> String {
        idx.iter()
            .zip(flags)
            .filter(|(_, on)| **on)
            .map(|(&c, _)| net.candidates()[c].id.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut out = String::new();
    writeln!(out, "switches = {}", e.plan.switch_bits()).unwrap();
    writeln!(out, "maneuvers = {}", e.plan.maneuver_bits()).unwrap();
    writeln!(out, "installed_switches = {}", chosen(net.switch_candidates(), &e.plan.switches)).unwrap();
    writeln!(out, "built_maneuvers = {}", chosen(net.maneuver_candidates(), &e.plan.maneuvers)).unwrap();
    writeln!(out, "f1 = {}", fmt_num(e.f1)).unwrap();
    writeln!(out, "f2 = {}", fmt_num(e.f2)).unwrap();
    if let Some(c) = &e.cost {
        writeln!(out, "capital = {}", fmt_num(c.capital)).unwrap();
        writeln!(out, "maintenance_pw = {}", fmt_num(c.maintenance_pw)).unwrap();
        writeln!(out, "loss_pw = {}", fmt_num(c.loss_pw)).unwrap();
    }
    writeln!(out, "total_ens = {}", fmt_num(e.reliability.total_ens)).unwrap();
    writeln!(out, "penalized = {}", e.penalized).unwrap();
    out
}

/// Per-generation statistics of a two-objective run.
pub fn generations_csv(history: &[GenerationStats]) -> String {
    let mut out = String::from("generation,front0_size,hypervolume,best_f1,best_f2\n");
    for g in history {
        let best = |k: usize| g.best.get(k).copied().map(fmt_num).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{}",
            g.generation,
            g.front0_size,
            fmt_num(g.hypervolume),
            best(0),
            best(1)
        )
        .unwrap();
    }
    out
}

pub fn ens_csv(result: &ReliabilityResult) -> String {
    let mut out = String::from("load_point,lambda_s,u_s,r_s,ens,ic,k,cost_contribution\n");
    for lp in &result.load_points {
        let r = &lp.indices;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            lp.id,
            fmt_num(r.lambda_s),
            fmt_num(r.u_s),
            fmt_num(r.r_s),
            fmt_num(r.ens),
            fmt_num(lp.ic),
            fmt_num(lp.k),
            fmt_num(lp.cost_contribution)
        )
        .unwrap();
    }
    out
}

pub fn voltages_csv(net: &Network, state: &PowerFlowState) -> String {
    let mut out = String::from("node,magnitude_pu,angle_deg\n");
    for (n, v) in net.nodes().iter().zip(&state.voltages) {
        writeln!(out, "{},{},{}", n.id, fmt_num(v.norm()), fmt_num(v.arg().to_degrees())).unwrap();
    }
    out
}

pub fn losses_csv(net: &Network, state: &PowerFlowState) -> String {
    let mut out = String::from("branch,from_node,to_node,current_pu,loss_kw\n");
    for (i, b) in net.branches().iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{}",
            b.id,
            b.from_node,
            b.to_node,
            fmt_num(state.branch_currents[i].norm()),
            fmt_num(state.branch_loss_active[i])
        )
        .unwrap();
    }
    out
}

/// Scatter of (F1, F2) with the compromise drawn as a square. When given,
/// the enumerated front is drawn underneath as hollow circles.
pub fn front_svg(front: &[[f64; 2]], compromise: Option<usize>, truth: Option<&[[f64; 2]]>) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const M: f64 = 60.0;
    let all: Vec<[f64; 2]> = front.iter().chain(truth.unwrap_or(&[])).copied().collect();
    let lo = |k: usize| all.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
    let hi = |k: usize| all.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
    let (x0, x1, y0, y1) = (lo(0), hi(0), lo(1), hi(1));
    let scale = |v: f64, a: f64, b: f64| if b > a { (v - a) / (b - a) } else { 0.5 };
    let px = |p: &[f64; 2]| M + scale(p[0], x0, x1) * (W - 2.0 * M);
    let py = |p: &[f64; 2]| H - M - scale(p[1], y0, y1) * (H - 2.0 * M);

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(out, r#"<path d="M{M} {} V{} H{}" stroke="black" fill="none"/>"#, M, H - M, W - M).unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">F1 cost</text>"#,
        W / 2.0,
        H - 20.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="20" y="{}" text-anchor="middle" font-size="14" transform="rotate(-90 20 {})">F2 interruption cost</text>"#,
        H / 2.0,
        H / 2.0
    )
    .unwrap();
    if !all.is_empty() {
        for (x, y, anchor, v) in [(M, H - M + 16.0, "start", x0), (W - M, H - M + 16.0, "end", x1)] {
            writeln!(
                out,
                r#"<text x="{x}" y="{y}" text-anchor="{anchor}" font-size="11">{}</text>"#,
                short(v)
            )
            .unwrap();
        }
        for (y, v) in [(H - M, y0), (M, y1)] {
            writeln!(
                out,
                r#"<text x="{}" y="{y}" text-anchor="end" font-size="11">{}</text>"#,
                M - 4.0,
                short(v)
            )
            .unwrap();
        }
    }
    for p in truth.unwrap_or(&[]) {
        writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="6" fill="none" stroke="gray"/>"#, px(p), py(p))
            .unwrap();
    }
    for (i, p) in front.iter().enumerate() {
        if Some(i) == compromise {
            continue;
        }
        writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="crimson"/>"#, px(p), py(p)).unwrap();
    }
    if let Some(p) = compromise.and_then(|i| front.get(i)) {
        writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="blue"><title>compromise</title></rect>"#,
            px(p) - 5.0,
            py(p) - 5.0
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

fn short(v: f64) -> String {
    if v.abs() >= 1e5 || (v != 0.0 && v.abs() < 1e-2) {
        format!("{v:.3e}")
    } else {
        format!("{v:.2}")
    }
}
