//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::path::PathBuf;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use switchplace::network::{
    Branch, CandidateKind, CandidateSite, Construction, CustomerClass, FeederData, LoadPoint, Node, NodeKind,
    TransformerUnit,
};
use switchplace::{ReliabilityParams, SwitchPlan};

pub fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn feeder_path(name: &str) -> PathBuf {
    manifest().join("feeders").join(name)
}

pub fn fixture_path(name: &str) -> PathBuf {
    manifest().join("tests").join("fixtures").join(name)
}

pub const BUNDLED: [&str; 3] = ["two_feeder", "dg_feeder", "double_feed"];

// ---------------------------------------------------------------- generators

fn node(id: String, kind: NodeKind) -> Node {
    Node { id, kind, nominal_voltage: 1.0 }
}

fn res_load(id: String, at: String, kw: f64, kvar: f64) -> LoadPoint {
    LoadPoint {
        id,
        at_node: at,
        mean_active: kw,
        sigma_active: 0.0,
        mean_reactive: kvar,
        class_mix: BTreeMap::from([(CustomerClass::Res, 1.0)]),
        class_interrupt_cost: BTreeMap::from([(CustomerClass::Res, 2.0)]),
        importance: 1.0,
    }
}

/// Appends a random tree of `n` nodes rooted at a new source named
/// `{prefix}0`. Branch orientation is randomized.
fn push_tree(d: &mut FeederData, rng: &mut ChaCha8Rng, prefix: &str, n: usize, max_kw: f64) {
    let id = |i: usize| format!("{prefix}{i}");
    d.nodes.push(node(id(0), NodeKind::Source));
    for i in 1..n {
        d.nodes.push(node(id(i), NodeKind::Load));
        let parent = rng.random_range(0..i);
        let (from, to) = if rng.random::<bool>() { (id(parent), id(i)) } else { (id(i), id(parent)) };
        d.branches.push(Branch {
            id: format!("{prefix}b{i}"),
            from_node: from,
            to_node: to,
            resistance: rng.random_range(0.0005..0.005),
            reactance: rng.random_range(0.0005..0.005),
            length: rng.random_range(0.2..2.0),
            construction: Construction::Overhead,
            failure_rate_per_km: rng.random_range(0.01..0.2),
            repair_time: rng.random_range(1.0..8.0),
        });
        if rng.random::<f64>() < 0.7 {
            let kw = rng.random_range(0.0..max_kw);
            let kvar = rng.random_range(0.0..max_kw * 0.6);
            d.load_points.push(res_load(format!("{prefix}l{i}"), id(i), kw, kvar));
        }
    }
}

/// Random single radial feeder with nonnegative loads.
pub fn random_radial(seed: u64, max_nodes: usize) -> FeederData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_nodes);
    let mut d = empty("random");
    push_tree(&mut d, &mut rng, "n", n, 20.0);
    d
}

fn empty(name: &str) -> FeederData {
    FeederData {
        name: name.into(),
        base_kva: 1000.0,
        nodes: vec![],
        branches: vec![],
        transformers: vec![],
        load_points: vec![],
        candidates: vec![],
    }
}

/// Two random feeders with transformers, switch candidates on a random
/// subset of branches and `ties` maneuver candidates between them.
pub fn random_two_feeder(seed: u64, max_nodes: usize, ties: usize) -> FeederData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = empty("random-two");
    let na = rng.random_range(2..=max_nodes);
    let nb = rng.random_range(2..=max_nodes);
    push_tree(&mut d, &mut rng, "a", na, 200.0);
    push_tree(&mut d, &mut rng, "b", nb, 200.0);
    let load_nodes: Vec<String> = d.load_points.iter().map(|l| l.at_node.clone()).collect();
    for (k, at) in load_nodes.iter().enumerate() {
        if rng.random::<f64>() < 0.5 {
            d.transformers.push(TransformerUnit {
                id: format!("t{k}"),
                at_node: at.clone(),
                failure_rate: rng.random_range(0.001..0.02),
                repair_time: rng.random_range(2.0..10.0),
            });
        }
    }
    let branch_ids: Vec<String> = d.branches.iter().map(|b| b.id.clone()).collect();
    for b in branch_ids {
        if rng.random::<f64>() < 0.6 {
            d.candidates.push(CandidateSite {
                id: format!("s_{b}"),
                kind: CandidateKind::Switch,
                on_branch: Some(b),
                between: None,
                build_cost: None,
            });
        }
    }
    for k in 0..ties {
        let a = format!("a{}", rng.random_range(0..na));
        let b = format!("b{}", rng.random_range(0..nb));
        d.candidates.push(CandidateSite {
            id: format!("m{k}"),
            kind: CandidateKind::Maneuver,
            on_branch: None,
            between: Some([a, b]),
            build_cost: Some(rng.random_range(1000.0..9000.0)),
        });
    }
    d
}

pub fn random_plan(rng: &mut ChaCha8Rng, n: usize, m: usize) -> SwitchPlan {
    SwitchPlan {
        switches: (0..n).map(|_| rng.random()).collect(),
        maneuvers: (0..m).map(|_| rng.random()).collect(),
    }
}

// ------------------------------------------------------------ power flow

/// Receiving-end voltage magnitude of a two-bus system from the
/// bi-quadratic in |V2|^2 (sending end at `v1`, loads in pu).
pub fn two_bus_voltage(v1: f64, r: f64, x: f64, p: f64, q: f64) -> f64 {
    let b = v1 * v1 - 2.0 * (p * r + q * x);
    let c = (r * r + x * x) * (p * p + q * q);
    ((b + (b * b - 4.0 * c).sqrt()) / 2.0).sqrt()
}

/// Full Newton-Raphson on the nodal power-balance equations in
/// rectangular coordinates with a finite-difference Jacobian. Returns node
/// voltages in data order; the source is the slack at (v_src, 0).
pub fn newton_power_flow(d: &FeederData, v_src: f64) -> Vec<Complex64> {
    let idx: HashMap<&str, usize> = d.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
    let n = d.nodes.len();
    let mut y = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for b in &d.branches {
        let (i, j) = (idx[b.from_node.as_str()], idx[b.to_node.as_str()]);
        let yb = Complex64::new(1.0, 0.0) / Complex64::new(b.resistance, b.reactance);
        y[i][i] += yb;
        y[j][j] += yb;
        y[i][j] -= yb;
        y[j][i] -= yb;
    }
    let mut load = vec![Complex64::new(0.0, 0.0); n];
    for l in &d.load_points {
        load[idx[l.at_node.as_str()]] += Complex64::new(l.mean_active, l.mean_reactive) / d.base_kva;
    }
    let slack: Vec<bool> = d.nodes.iter().map(|n| n.kind == NodeKind::Source).collect();
    let pq: Vec<usize> = (0..n).filter(|&i| !slack[i]).collect();
    let mut v = vec![Complex64::new(v_src, 0.0); n];

    let mismatch = |v: &[Complex64]| -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * pq.len());
        for &i in &pq {
            let current: Complex64 = (0..n).map(|j| y[i][j] * v[j]).sum();
            let s = v[i] * current.conj() + load[i];
            out.push(s.re);
            out.push(s.im);
        }
        out
    };
    let dim = 2 * pq.len();
    for _ in 0..50 {
        let f = mismatch(&v);
        if f.iter().map(|x| x.abs()).fold(0.0, f64::max) < 1e-13 {
            break;
        }
        let h = 1e-7;
        let mut jac = vec![vec![0.0; dim]; dim];
        for (k, &i) in pq.iter().enumerate() {
            for part in 0..2 {
                let mut vp = v.clone();
                let mut vm = v.clone();
                let step = if part == 0 { Complex64::new(h, 0.0) } else { Complex64::new(0.0, h) };
                vp[i] += step;
                vm[i] -= step;
                let (fp, fm) = (mismatch(&vp), mismatch(&vm));
                for row in 0..dim {
                    jac[row][2 * k + part] = (fp[row] - fm[row]) / (2.0 * h);
                }
            }
        }
        let dx = solve_dense(jac, f.iter().map(|x| -x).collect());
        for (k, &i) in pq.iter().enumerate() {
            v[i] += Complex64::new(dx[2 * k], dx[2 * k + 1]);
        }
    }
    v
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            let pivot_row = a[col].clone();
            for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= factor * p;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

// ----------------------------------------------------------- reliability

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleIndices {
    pub lambda: f64,
    pub u: f64,
}

/// Outage hours of every load point for every failure, by explicit graph
/// search over the raw feeder data.
///
/// For a failed branch: the faulted zone is everything connected to the
/// branch's downstream end once installed switches are opened. Remaining
/// nodes still connected to their source are restored after switching;
/// nodes connected to a built tie are restored after switching when
/// backfeed is on; the rest wait for the repair.
pub fn oracle_indices(d: &FeederData, plan: &SwitchPlan, params: &ReliabilityParams) -> Vec<OracleIndices> {
    let n = d.nodes.len();
    let idx: HashMap<&str, usize> = d.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
    let ends: Vec<(usize, usize)> =
        d.branches.iter().map(|b| (idx[b.from_node.as_str()], idx[b.to_node.as_str()])).collect();

    let reach = |start: &[usize], usable: &dyn Fn(usize) -> bool, blocked: &HashSet<usize>| {
        let mut seen = vec![false; n];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &s in start {
            if !blocked.contains(&s) && !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for (k, &(a, b)) in ends.iter().enumerate() {
                if !usable(k) {
                    continue;
                }
                let other = if a == u {
                    b
                } else if b == u {
                    a
                } else {
                    continue;
                };
                if !blocked.contains(&other) && !seen[other] {
                    seen[other] = true;
                    queue.push_back(other);
                }
            }
        }
        seen
    };

    let sources: Vec<usize> = (0..n).filter(|&i| d.nodes[i].kind == NodeKind::Source).collect();
    // Feeder membership and distance from the source.
    let mut feeder = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    for (f, &s) in sources.iter().enumerate() {
        let mut queue = VecDeque::from([s]);
        depth[s] = 0;
        feeder[s] = f;
        while let Some(u) = queue.pop_front() {
            for &(a, b) in &ends {
                let other = if a == u {
                    b
                } else if b == u {
                    a
                } else {
                    continue;
                };
                if depth[other] == usize::MAX {
                    depth[other] = depth[u] + 1;
                    feeder[other] = f;
                    queue.push_back(other);
                }
            }
        }
    }

    let mut switched = vec![false; d.branches.len()];
    let mut ties: Vec<(usize, usize)> = Vec::new();
    let (mut si, mut mi) = (0, 0);
    for c in &d.candidates {
        match c.kind {
            CandidateKind::Switch => {
                if plan.switches[si] {
                    let b = d.branches.iter().position(|b| Some(&b.id) == c.on_branch.as_ref()).unwrap();
                    switched[b] = true;
                }
                si += 1;
            }
            CandidateKind::Maneuver => {
                if plan.maneuvers[mi] {
                    let [a, b] = c.between.clone().unwrap();
                    ties.push((idx[a.as_str()], idx[b.as_str()]));
                }
                mi += 1;
            }
        }
    }

    let mut out = vec![OracleIndices { lambda: 0.0, u: 0.0 }; d.load_points.len()];
    let lp_node: Vec<usize> = d.load_points.iter().map(|l| idx[l.at_node.as_str()]).collect();

    for (k, br) in d.branches.iter().enumerate() {
        let rate = br.failure_rate_per_km * br.length;
        let (a, b) = ends[k];
        let downstream = if depth[a] > depth[b] { a } else { b };
        let f = feeder[downstream];
        let unswitched = |e: usize| !switched[e];
        let zone_mask = reach(&[downstream], &unswitched, &HashSet::new());
        let zone: HashSet<usize> = (0..n).filter(|&i| zone_mask[i]).collect();
        let all = |_e: usize| true;
        let from_source = reach(&[sources[f]], &all, &zone);
        let tie_starts: Vec<usize> =
            ties.iter().flat_map(|&(x, y)| [x, y]).filter(|&t| feeder[t] == f).collect();
        let from_tie = reach(&tie_starts, &all, &zone);
        for (l, &node) in lp_node.iter().enumerate() {
            if feeder[node] != f || d.nodes[node].kind == NodeKind::Source {
                continue;
            }
            let hours = if zone.contains(&node) {
                br.repair_time
            } else if from_source[node] || (params.include_maneuver_backfeed && from_tie[node]) {
                params.remote_switch_time.min(br.repair_time)
            } else {
                br.repair_time
            };
            if hours > 0.0 {
                out[l].lambda += rate;
                out[l].u += rate * hours;
            }
        }
    }
    for t in &d.transformers {
        let node = idx[t.at_node.as_str()];
        for (l, &ln) in lp_node.iter().enumerate() {
            if ln == node && t.repair_time > 0.0 {
                out[l].lambda += t.failure_rate;
                out[l].u += t.failure_rate * t.repair_time;
            }
        }
    }
    out
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}
