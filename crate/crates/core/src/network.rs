//! Radial distribution network model.
//!
//! [`FeederData`] is the raw, serializable description of one feeder file.
//! [`validate_network`] checks it and reports every violated invariant as
//! data. [`Network`] is the immutable, validated form: branches are
//! reoriented so that `from_node` is always the source side, and the rooted
//! tree is indexed for path and subtree queries.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on the sum of a load point's customer-class fractions.
pub const CLASS_MIX_TOLERANCE: f64 = 1e-9;

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Source,
    Junction,
    Load,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    #[serde(default = "default_nominal_voltage")]
    pub nominal_voltage: f64,
}

fn default_nominal_voltage() -> f64 {
    1.0
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Overhead,
    Underground,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Branch {
    pub id: String,
    pub from_node: String,
    pub to_node: String,
    /// Per-unit on the feeder base.
    pub resistance: f64,
    /// Per-unit on the feeder base.
    pub reactance: f64,
    /// km
    pub length: f64,
    pub construction: Construction,
    /// failures / yr / km
    pub failure_rate_per_km: f64,
    /// hours
    pub repair_time: f64,
}

impl Branch {
    /// Annual failure rate of the whole branch (f/yr).
    pub fn failure_rate(&self) -> f64 {
        self.failure_rate_per_km * self.length
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TransformerUnit {
    pub id: String,
    pub at_node: String,
    /// failures / yr
    pub failure_rate: f64,
    /// hours
    pub repair_time: f64,
}

/// Customer classes used for the class-weighted interruption cost.
#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[serde(rename_all = "lowercase")]
pub enum CustomerClass {
    Res,
    Com,
    Ind,
    Agr,
    Gen,
}

impl CustomerClass {
    pub const ALL: [CustomerClass; 5] =
        [CustomerClass::Res, CustomerClass::Com, CustomerClass::Ind, CustomerClass::Agr, CustomerClass::Gen];
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LoadPoint {
    pub id: String,
    pub at_node: String,
    /// kW. Negative values model a distributed generator injecting power.
    pub mean_active: f64,
    /// kW
    #[serde(default)]
    pub sigma_active: f64,
    /// kvar
    #[serde(default)]
    pub mean_reactive: f64,
    pub class_mix: BTreeMap<CustomerClass, f64>,
    /// $/kWh per class.
    #[serde(default)]
    pub class_interrupt_cost: BTreeMap<CustomerClass, f64>,
    #[serde(default = "default_importance")]
    pub importance: f64,
}

fn default_importance() -> f64 {
    1.0
}

impl LoadPoint {
    /// True when the point injects power (negative mean_active).
    pub fn is_generation(&self) -> bool {
        self.mean_active < 0.0
    }
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum CandidateKind {
    Switch,
    Maneuver,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CandidateSite {
    pub id: String,
    pub kind: CandidateKind,
    /// Switch candidates: the branch the switch sits on (at its source end).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub on_branch: Option<String>,
    /// Maneuver candidates: the two nodes the normally open tie would join.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub between: Option<[String; 2]>,
    /// Construction cost. Optional for switches (the run's switch cost applies).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub build_cost: Option<f64>,
}

/// Raw content of a feeder file.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FeederData {
    #[serde(default)]
    pub name: String,
    /// Power base for the per-unit impedances, kVA.
    #[serde(default = "default_base_kva")]
    pub base_kva: f64,
    pub nodes: Vec<Node>,
    pub branches: Vec<Branch>,
    #[serde(default)]
    pub transformers: Vec<TransformerUnit>,
    pub load_points: Vec<LoadPoint>,
    #[serde(default)]
    pub candidates: Vec<CandidateSite>,
}

fn default_base_kva() -> f64 {
    1000.0
}

/// One invariant violation found by [`validate_network`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    DuplicateId { collection: &'static str, id: String },
    UnknownNode { owner: String, node: String },
    SelfLoop { branch: String },
    BadBranchParameter { branch: String, field: &'static str, value: f64 },
    BadTransformerParameter { transformer: String, field: &'static str, value: f64 },
    BadNodeParameter { node: String, field: &'static str, value: f64 },
    Cycle { branches: Vec<String> },
    NoSource,
    MultipleSources { nodes: Vec<String> },
    Unreachable { nodes: Vec<String> },
    ClassMixSum { load_point: String, sum: f64 },
    BadLoadParameter { load_point: String, field: String, value: f64 },
    NegativeLoad { load_point: String },
    UnknownBranch { candidate: String, branch: String },
    MalformedCandidate { candidate: String, reason: &'static str },
    DuplicateSwitchSite { candidate: String, branch: String },
    ManeuverNotAcrossFeeders { candidate: String },
    NonPositiveBase { value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateId { collection, id } => {
                write!(f, "duplicate id '{id}' in {collection}")
            }
            Violation::UnknownNode { owner, node } => {
                write!(f, "'{owner}' references unknown node '{node}'")
            }
            Violation::SelfLoop { branch } => write!(f, "branch '{branch}' connects a node to itself"),
            Violation::BadBranchParameter { branch, field, value } => {
                write!(f, "branch '{branch}' has invalid {field} = {value}")
            }
            Violation::BadTransformerParameter { transformer, field, value } => {
                write!(f, "transformer '{transformer}' has invalid {field} = {value}")
            }
            Violation::BadNodeParameter { node, field, value } => {
                write!(f, "node '{node}' has invalid {field} = {value}")
            }
            Violation::Cycle { branches } => {
                write!(f, "branches form a cycle: {}", branches.join(", "))
            }
            Violation::NoSource => write!(f, "network has no source node"),
            Violation::MultipleSources { nodes } => {
                write!(f, "a connected feeder has several sources: {}", nodes.join(", "))
            }
            Violation::Unreachable { nodes } => {
                write!(f, "nodes not reachable from any source: {}", nodes.join(", "))
            }
            Violation::ClassMixSum { load_point, sum } => {
                write!(f, "load point '{load_point}' class_mix sums to {sum}, expected 1")
            }
            Violation::BadLoadParameter { load_point, field, value } => {
                write!(f, "load point '{load_point}' has invalid {field} = {value}")
            }
            Violation::NegativeLoad { load_point } => {
                write!(f, "load point '{load_point}' has negative mean_active but is not pure 'gen' class")
            }
            Violation::UnknownBranch { candidate, branch } => {
                write!(f, "candidate '{candidate}' references unknown branch '{branch}'")
            }
            Violation::MalformedCandidate { candidate, reason } => {
                write!(f, "candidate '{candidate}': {reason}")
            }
            Violation::DuplicateSwitchSite { candidate, branch } => {
                write!(f, "candidate '{candidate}' duplicates a switch site on branch '{branch}'")
            }
            Violation::ManeuverNotAcrossFeeders { candidate } => {
                write!(f, "maneuver candidate '{candidate}' must join two nodes on distinct feeders")
            }
            Violation::NonPositiveBase { value } => write!(f, "base_kva must be positive, got {value}"),
        }
    }
}

/// Every invariant violation found in a feeder description.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("invalid network:\n{0}")]
    Invalid(ValidationReport),
    #[error("unknown branch '{0}'")]
    UnknownBranch(String),
    #[error("unknown node '{0}'")]
    UnknownNode(String),
    #[error("unknown load point '{0}'")]
    UnknownLoadPoint(String),
    #[error("unknown component '{0}'")]
    UnknownComponent(String),
    #[error("component id '{0}' names both a branch and a transformer")]
    AmbiguousComponent(String),
}

/// Simple union-find used for cycle and component detection.
struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[rb] = ra;
        true
    }
}

fn check_duplicates<'a>(
    report: &mut ValidationReport,
    collection: &'static str,
    ids: impl Iterator<Item = &'a str>,
) {
    let mut seen = HashSet::new();
    let mut reported = HashSet::new();
    for id in ids {
        if !seen.insert(id) && reported.insert(id) {
            report.push(Violation::DuplicateId { collection, id: id.to_string() });
        }
    }
}

/// Branch ids along the forest path between `a` and `b` (both in one tree).
fn forest_path(adj: &[Vec<(usize, usize)>], a: usize, b: usize) -> Vec<usize> {
    let mut prev: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut queue = VecDeque::from([a]);
    let mut visited = HashSet::from([a]);
    while let Some(u) = queue.pop_front() {
        if u == b {
            break;
        }
        for &(v, br) in &adj[u] {
            if visited.insert(v) {
                prev.insert(v, (u, br));
                queue.push_back(v);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = b;
    while cur != a {
        let Some(&(p, br)) = prev.get(&cur) else { break };
        path.push(br);
        cur = p;
    }
    path
}

/// Checks every structural and parametric invariant of a feeder description.
///
/// Violations are collected, not raised; an empty report means the data
/// describes a well-formed set of radial feeders.
pub fn validate_network(data: &FeederData) -> ValidationReport {
    let mut report = ValidationReport::default();

    if !(data.base_kva > 0.0) {
        report.push(Violation::NonPositiveBase { value: data.base_kva });
    }

    check_duplicates(&mut report, "nodes", data.nodes.iter().map(|n| n.id.as_str()));
    check_duplicates(&mut report, "branches", data.branches.iter().map(|b| b.id.as_str()));
    check_duplicates(&mut report, "transformers", data.transformers.iter().map(|t| t.id.as_str()));
    check_duplicates(&mut report, "load_points", data.load_points.iter().map(|l| l.id.as_str()));
    check_duplicates(&mut report, "candidates", data.candidates.iter().map(|c| c.id.as_str()));

    let mut node_index: HashMap<&str, usize> = HashMap::new();
    for (i, n) in data.nodes.iter().enumerate() {
        node_index.entry(n.id.as_str()).or_insert(i);
        if !(n.nominal_voltage > 0.0) {
            report.push(Violation::BadNodeParameter {
                node: n.id.clone(),
                field: "nominal_voltage",
                value: n.nominal_voltage,
            });
        }
    }

    // Branch parameters and endpoints.
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for (bi, b) in data.branches.iter().enumerate() {
        let checks: [(&'static str, f64, bool); 5] = [
            ("resistance", b.resistance, b.resistance >= 0.0),
            ("reactance", b.reactance, b.reactance >= 0.0),
            ("length", b.length, b.length > 0.0),
            ("failure_rate_per_km", b.failure_rate_per_km, b.failure_rate_per_km >= 0.0),
            ("repair_time", b.repair_time, b.repair_time > 0.0),
        ];
        for (field, value, ok) in checks {
            if !ok {
                report.push(Violation::BadBranchParameter { branch: b.id.clone(), field, value });
            }
        }
        let from = node_index.get(b.from_node.as_str()).copied();
        let to = node_index.get(b.to_node.as_str()).copied();
        for (end, idx) in [(&b.from_node, from), (&b.to_node, to)] {
            if idx.is_none() {
                report.push(Violation::UnknownNode { owner: b.id.clone(), node: end.clone() });
            }
        }
        if let (Some(f), Some(t)) = (from, to) {
            if f == t {
                report.push(Violation::SelfLoop { branch: b.id.clone() });
            } else {
                edges.push((f, t, bi));
            }
        }
    }

    // Cycles: any edge closing a loop in the growing forest.
    let n = data.nodes.len();
    let mut dsu = DisjointSet::new(n);
    let mut forest_adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for &(f, t, bi) in &edges {
        if dsu.union(f, t) {
            forest_adj[f].push((t, bi));
            forest_adj[t].push((f, bi));
        } else {
            let mut cycle = forest_path(&forest_adj, f, t);
            cycle.push(bi);
            cycle.sort_unstable();
            report.push(Violation::Cycle {
                branches: cycle.into_iter().map(|i| data.branches[i].id.clone()).collect(),
            });
        }
    }

    // Components must each hold exactly one source.
    let mut sources_by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut members_by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, node) in data.nodes.iter().enumerate() {
        if node_index[node.id.as_str()] != i {
            continue;
        }
        let root = dsu.find(i);
        members_by_root.entry(root).or_default().push(i);
        if node.kind == NodeKind::Source {
            sources_by_root.entry(root).or_default().push(i);
        }
    }
    if sources_by_root.is_empty() {
        report.push(Violation::NoSource);
    }
    let mut unreachable = Vec::new();
    for (root, members) in &members_by_root {
        match sources_by_root.get(root) {
            None => unreachable.extend(members.iter().map(|&i| data.nodes[i].id.clone())),
            Some(s) if s.len() > 1 => report.push(Violation::MultipleSources {
                nodes: s.iter().map(|&i| data.nodes[i].id.clone()).collect(),
            }),
            _ => {}
        }
    }
    if !unreachable.is_empty() && !sources_by_root.is_empty() {
        report.push(Violation::Unreachable { nodes: unreachable });
    }

    for t in &data.transformers {
        if !node_index.contains_key(t.at_node.as_str()) {
            report.push(Violation::UnknownNode { owner: t.id.clone(), node: t.at_node.clone() });
        }
        if !(t.failure_rate >= 0.0) {
            report.push(Violation::BadTransformerParameter {
                transformer: t.id.clone(),
                field: "failure_rate",
                value: t.failure_rate,
            });
        }
        if !(t.repair_time > 0.0) {
            report.push(Violation::BadTransformerParameter {
                transformer: t.id.clone(),
                field: "repair_time",
                value: t.repair_time,
            });
        }
    }

    for lp in &data.load_points {
        if !node_index.contains_key(lp.at_node.as_str()) {
            report.push(Violation::UnknownNode { owner: lp.id.clone(), node: lp.at_node.clone() });
        }
        let mut sum = 0.0;
        for (class, &frac) in &lp.class_mix {
            if !(0.0..=1.0).contains(&frac) {
                report.push(Violation::BadLoadParameter {
                    load_point: lp.id.clone(),
                    field: format!("class_mix.{}", class_name(*class)),
                    value: frac,
                });
            }
            sum += frac;
        }
        if !((sum - 1.0).abs() <= CLASS_MIX_TOLERANCE) {
            report.push(Violation::ClassMixSum { load_point: lp.id.clone(), sum });
        }
        for (class, &cost) in &lp.class_interrupt_cost {
            if !(cost >= 0.0) {
                report.push(Violation::BadLoadParameter {
                    load_point: lp.id.clone(),
                    field: format!("class_interrupt_cost.{}", class_name(*class)),
                    value: cost,
                });
            }
        }
        if !(lp.sigma_active >= 0.0) {
            report.push(Violation::BadLoadParameter {
                load_point: lp.id.clone(),
                field: "sigma_active".into(),
                value: lp.sigma_active,
            });
        }
        if !(lp.importance >= 0.0) {
            report.push(Violation::BadLoadParameter {
                load_point: lp.id.clone(),
                field: "importance".into(),
                value: lp.importance,
            });
        }
        if !lp.mean_active.is_finite() || !lp.mean_reactive.is_finite() {
            report.push(Violation::BadLoadParameter {
                load_point: lp.id.clone(),
                field: "mean_active".into(),
                value: lp.mean_active,
            });
        } else if lp.mean_active < 0.0 {
            let pure_gen = lp.class_mix.get(&CustomerClass::Gen).copied() == Some(1.0);
            if !pure_gen {
                report.push(Violation::NegativeLoad { load_point: lp.id.clone() });
            }
        }
    }

    let branch_ids: HashSet<&str> = data.branches.iter().map(|b| b.id.as_str()).collect();
    let mut switch_sites: HashSet<&str> = HashSet::new();
    for c in &data.candidates {
        if let Some(cost) = c.build_cost {
            if !(cost >= 0.0) {
                report.push(Violation::MalformedCandidate {
                    candidate: c.id.clone(),
                    reason: "build_cost must be non-negative",
                });
            }
        }
        match c.kind {
            CandidateKind::Switch => {
                if c.between.is_some() {
                    report.push(Violation::MalformedCandidate {
                        candidate: c.id.clone(),
                        reason: "switch candidates take on_branch, not between",
                    });
                }
                match &c.on_branch {
                    None => report.push(Violation::MalformedCandidate {
                        candidate: c.id.clone(),
                        reason: "switch candidate lacks on_branch",
                    }),
                    Some(b) if !branch_ids.contains(b.as_str()) => {
                        report.push(Violation::UnknownBranch { candidate: c.id.clone(), branch: b.clone() })
                    }
                    Some(b) => {
                        if !switch_sites.insert(b.as_str()) {
                            report.push(Violation::DuplicateSwitchSite {
                                candidate: c.id.clone(),
                                branch: b.clone(),
                            });
                        }
                    }
                }
            }
            CandidateKind::Maneuver => {
                if c.on_branch.is_some() {
                    report.push(Violation::MalformedCandidate {
                        candidate: c.id.clone(),
                        reason: "maneuver candidates take between, not on_branch",
                    });
                }
                if c.build_cost.is_none() {
                    report.push(Violation::MalformedCandidate {
                        candidate: c.id.clone(),
                        reason: "maneuver candidate lacks build_cost",
                    });
                }
                let Some([a, b]) = &c.between else {
                    report.push(Violation::MalformedCandidate {
                        candidate: c.id.clone(),
                        reason: "maneuver candidate lacks between",
                    });
                    continue;
                };
                let ia = node_index.get(a.as_str()).copied();
                let ib = node_index.get(b.as_str()).copied();
                for (end, idx) in [(a, ia), (b, ib)] {
                    if idx.is_none() {
                        report.push(Violation::UnknownNode { owner: c.id.clone(), node: end.clone() });
                    }
                }
                if let (Some(ia), Some(ib)) = (ia, ib) {
                    if dsu.find(ia) == dsu.find(ib) {
                        report.push(Violation::ManeuverNotAcrossFeeders { candidate: c.id.clone() });
                    }
                }
            }
        }
    }

    report
}

fn class_name(c: CustomerClass) -> &'static str {
    match c {
        CustomerClass::Res => "res",
        CustomerClass::Com => "com",
        CustomerClass::Ind => "ind",
        CustomerClass::Agr => "agr",
        CustomerClass::Gen => "gen",
    }
}

/// One radial feeder: a source and the tree hanging from it.
#[derive(Clone, Debug, PartialEq)]
pub struct Feeder {
    pub source: usize,
    /// Node indices in breadth-first order from the source.
    pub nodes: Vec<usize>,
    /// Branch indices, each listed when its `to_node` is first reached.
    pub branches: Vec<usize>,
}

/// A failure-prone component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    Branch(usize),
    Transformer(usize),
}

/// Validated, immutable radial network.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    data: FeederData,
    node_index: HashMap<String, usize>,
    branch_index: HashMap<String, usize>,
    transformer_index: HashMap<String, usize>,
    load_index: HashMap<String, usize>,
    feeders: Vec<Feeder>,
    node_feeder: Vec<usize>,
    parent_branch: Vec<Option<usize>>,
    child_branches: Vec<Vec<usize>>,
    branch_feeder: Vec<usize>,
    /// Position of each node in its feeder's BFS order.
    node_order: Vec<usize>,
    lp_node: Vec<usize>,
    loads_at_node: Vec<Vec<usize>>,
    transformer_node: Vec<usize>,
    switch_candidates: Vec<usize>,
    switch_branch: Vec<usize>,
    maneuver_candidates: Vec<usize>,
    maneuver_nodes: Vec<(usize, usize)>,
}

fn index_of<'a>(items: impl Iterator<Item = &'a str>) -> HashMap<String, usize> {
    items.enumerate().map(|(i, id)| (id.to_string(), i)).collect()
}

impl Network {
    /// Validates `data`, reorients every branch away from its source and
    /// indexes the resulting trees.
    pub fn from_data(mut data: FeederData) -> Result<Self, NetworkError> {
        let report = validate_network(&data);
        if !report.is_empty() {
            return Err(NetworkError::Invalid(report));
        }

        let node_index = index_of(data.nodes.iter().map(|n| n.id.as_str()));
        let branch_index = index_of(data.branches.iter().map(|b| b.id.as_str()));
        let transformer_index = index_of(data.transformers.iter().map(|t| t.id.as_str()));
        let load_index = index_of(data.load_points.iter().map(|l| l.id.as_str()));

        let n = data.nodes.len();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (bi, b) in data.branches.iter().enumerate() {
            let f = node_index[&b.from_node];
            let t = node_index[&b.to_node];
            adj[f].push((t, bi));
            adj[t].push((f, bi));
        }

        let mut feeders = Vec::new();
        let mut node_feeder = vec![usize::MAX; n];
        let mut parent_branch = vec![None; n];
        let mut child_branches = vec![Vec::new(); n];
        let mut branch_feeder = vec![usize::MAX; data.branches.len()];
        let mut node_order = vec![0; n];
        for (si, node) in data.nodes.iter().enumerate() {
            if node.kind != NodeKind::Source {
                continue;
            }
            let fi = feeders.len();
            let mut feeder = Feeder { source: si, nodes: Vec::new(), branches: Vec::new() };
            node_feeder[si] = fi;
            let mut queue = VecDeque::from([si]);
            while let Some(u) = queue.pop_front() {
                node_order[u] = feeder.nodes.len();
                feeder.nodes.push(u);
                for &(v, bi) in &adj[u] {
                    if node_feeder[v] != usize::MAX {
                        continue;
                    }
                    node_feeder[v] = fi;
                    parent_branch[v] = Some(bi);
                    child_branches[u].push(bi);
                    branch_feeder[bi] = fi;
                    feeder.branches.push(bi);
                    let b = &mut data.branches[bi];
                    if node_index[&b.from_node] != u {
                        std::mem::swap(&mut b.from_node, &mut b.to_node);
                    }
                    queue.push_back(v);
                }
            }
            feeders.push(feeder);
        }

        let lp_node: Vec<usize> = data.load_points.iter().map(|l| node_index[&l.at_node]).collect();
        let mut loads_at_node = vec![Vec::new(); n];
        for (li, &node) in lp_node.iter().enumerate() {
            loads_at_node[node].push(li);
        }
        let transformer_node = data.transformers.iter().map(|t| node_index[&t.at_node]).collect();

        let mut switch_candidates = Vec::new();
        let mut switch_branch = Vec::new();
        let mut maneuver_candidates = Vec::new();
        let mut maneuver_nodes = Vec::new();
        for (ci, c) in data.candidates.iter().enumerate() {
            match c.kind {
                CandidateKind::Switch => {
                    switch_candidates.push(ci);
                    switch_branch.push(branch_index[c.on_branch.as_deref().unwrap_or_default()]);
                }
                CandidateKind::Maneuver => {
                    let [a, b] = c.between.as_ref().expect("validated maneuver candidate");
                    maneuver_candidates.push(ci);
                    maneuver_nodes.push((node_index[a], node_index[b]));
                }
            }
        }

        Ok(Self {
            data,
            node_index,
            branch_index,
            transformer_index,
            load_index,
            feeders,
            node_feeder,
            parent_branch,
            child_branches,
            branch_feeder,
            node_order,
            lp_node,
            loads_at_node,
            transformer_node,
            switch_candidates,
            switch_branch,
            maneuver_candidates,
            maneuver_nodes,
        })
    }

    /// Re-runs validation on the normalized data; always empty for a built network.
    pub fn validate(&self) -> ValidationReport {
        validate_network(&self.data)
    }

    /// Normalized feeder description (branches oriented from the source side).
    pub fn data(&self) -> &FeederData {
        &self.data
    }

    pub fn name(&self) -> &str {
        &self.data.name
    }

    pub fn base_kva(&self) -> f64 {
        self.data.base_kva
    }

    pub fn nodes(&self) -> &[Node] {
        &self.data.nodes
    }

    pub fn branches(&self) -> &[Branch] {
        &self.data.branches
    }

    pub fn transformers(&self) -> &[TransformerUnit] {
        &self.data.transformers
    }

    pub fn load_points(&self) -> &[LoadPoint] {
        &self.data.load_points
    }

    pub fn candidates(&self) -> &[CandidateSite] {
        &self.data.candidates
    }

    pub fn feeders(&self) -> &[Feeder] {
        &self.feeders
    }

    pub fn node_idx(&self, id: &str) -> Result<usize, NetworkError> {
        self.node_index.get(id).copied().ok_or_else(|| NetworkError::UnknownNode(id.into()))
    }

    pub fn branch_idx(&self, id: &str) -> Result<usize, NetworkError> {
        self.branch_index.get(id).copied().ok_or_else(|| NetworkError::UnknownBranch(id.into()))
    }

    pub fn load_idx(&self, id: &str) -> Result<usize, NetworkError> {
        self.load_index.get(id).copied().ok_or_else(|| NetworkError::UnknownLoadPoint(id.into()))
    }

    /// Resolves a failed-component id to a branch or transformer.
    pub fn component(&self, id: &str) -> Result<Component, NetworkError> {
        match (self.branch_index.get(id), self.transformer_index.get(id)) {
            (Some(_), Some(_)) => Err(NetworkError::AmbiguousComponent(id.into())),
            (Some(&b), None) => Ok(Component::Branch(b)),
            (None, Some(&t)) => Ok(Component::Transformer(t)),
            (None, None) => Err(NetworkError::UnknownComponent(id.into())),
        }
    }

    /// Every failure-prone component, branches first.
    pub fn components(&self) -> impl Iterator<Item = Component> + '_ {
        (0..self.data.branches.len())
            .map(Component::Branch)
            .chain((0..self.data.transformers.len()).map(Component::Transformer))
    }

    pub fn node_feeder(&self, node: usize) -> usize {
        self.node_feeder[node]
    }

    pub fn branch_feeder(&self, branch: usize) -> usize {
        self.branch_feeder[branch]
    }

    pub fn parent_branch(&self, node: usize) -> Option<usize> {
        self.parent_branch[node]
    }

    pub fn child_branches(&self, node: usize) -> &[usize] {
        &self.child_branches[node]
    }

    pub fn branch_from(&self, branch: usize) -> usize {
        self.node_index[&self.data.branches[branch].from_node]
    }

    pub fn branch_to(&self, branch: usize) -> usize {
        self.node_index[&self.data.branches[branch].to_node]
    }

    pub fn is_source(&self, node: usize) -> bool {
        self.parent_branch[node].is_none()
    }

    pub fn load_node(&self, lp: usize) -> usize {
        self.lp_node[lp]
    }

    pub fn loads_at_node(&self, node: usize) -> &[usize] {
        &self.loads_at_node[node]
    }

    pub fn transformer_node(&self, t: usize) -> usize {
        self.transformer_node[t]
    }

    /// Candidate indices (into [`Network::candidates`]) of switch sites, in file order.
    pub fn switch_candidates(&self) -> &[usize] {
        &self.switch_candidates
    }

    /// Branch carrying the `i`-th switch candidate.
    pub fn switch_branch(&self, i: usize) -> usize {
        self.switch_branch[i]
    }

    /// Candidate indices of maneuver (tie) sites, in file order.
    pub fn maneuver_candidates(&self) -> &[usize] {
        &self.maneuver_candidates
    }

    /// Endpoints of the `j`-th maneuver candidate.
    pub fn maneuver_nodes(&self, j: usize) -> (usize, usize) {
        self.maneuver_nodes[j]
    }

    pub fn num_switch_sites(&self) -> usize {
        self.switch_candidates.len()
    }

    pub fn num_maneuver_sites(&self) -> usize {
        self.maneuver_candidates.len()
    }

    /// Branch indices from `node` up to its source, distal first.
    pub fn path_to_source_idx(&self, node: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = node;
        while let Some(b) = self.parent_branch[cur] {
            path.push(b);
            cur = self.branch_from(b);
        }
        path
    }

    /// Branch ids from `node` up to its source, distal first; empty for a source.
    pub fn path_to_source(&self, node: &str) -> Result<Vec<&str>, NetworkError> {
        let idx = self.node_idx(node)?;
        Ok(self.path_to_source_idx(idx).into_iter().map(|b| self.data.branches[b].id.as_str()).collect())
    }

    /// True if `node` lies in the subtree below `branch` (its `to_node` included).
    pub fn is_downstream_of(&self, node: usize, branch: usize) -> bool {
        if self.node_feeder[node] != self.branch_feeder[branch] {
            return false;
        }
        let head = self.branch_to(branch);
        let mut cur = node;
        loop {
            if cur == head {
                return true;
            }
            if self.node_order[cur] <= self.node_order[head] {
                return false;
            }
            match self.parent_branch[cur] {
                Some(b) => cur = self.branch_from(b),
                None => return false,
            }
        }
    }

    /// Nodes of the subtree hanging below `branch`, in BFS order.
    pub fn subtree_nodes(&self, branch: usize) -> Vec<usize> {
        let mut out = vec![self.branch_to(branch)];
        let mut i = 0;
        while i < out.len() {
            for &b in &self.child_branches[out[i]] {
                out.push(self.branch_to(b));
            }
            i += 1;
        }
        out
    }

    /// Load-point indices whose path to the source traverses `branch`.
    pub fn downstream_load_points_idx(&self, branch: usize) -> Vec<usize> {
        let mut lps: Vec<usize> = self
            .subtree_nodes(branch)
            .into_iter()
            .flat_map(|n| self.loads_at_node[n].iter().copied())
            .collect();
        lps.sort_unstable();
        lps
    }

    /// Load-point ids whose unique path to the source traverses `branch`,
    /// in file order.
    pub fn downstream_load_points(&self, branch: &str) -> Result<Vec<&str>, NetworkError> {
        let b = self.branch_idx(branch)?;
        Ok(self
            .downstream_load_points_idx(b)
            .into_iter()
            .map(|l| self.data.load_points[l].id.as_str())
            .collect())
    }
}
