//! Analytical failure-mode reliability evaluation of a switch plan.
//!
//! Installed sectionalizing switches sit at the source end of their branch;
//! together with the feeder breaker at each source they cut every feeder
//! into isolation zones. A branch failure trips the breaker, the faulted
//! zone is isolated, the source side is re-energized, and the islands
//! downstream of the zone are picked up through built tie points when
//! backfeed is enabled. A transformer failure only interrupts the load
//! points served at its node.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{Component, LoadPoint, Network, NetworkError};
use crate::plan::{PlanError, SwitchPlan};

pub const HOURS_PER_YEAR: f64 = 8760.0;

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ReliabilityParams {
    /// Hours to isolate and restore through remote-controlled switches.
    pub remote_switch_time: f64,
    /// Hours to restore when the zone boundary is not remotely operable.
    pub manual_section_time: f64,
    /// Let built tie points pick up islands downstream of a faulted zone.
    pub include_maneuver_backfeed: bool,
}

impl Default for ReliabilityParams {
    fn default() -> Self {
        Self { remote_switch_time: 0.05, manual_section_time: 1.0, include_maneuver_backfeed: true }
    }
}

impl ReliabilityParams {
    pub fn check(&self) -> Result<(), ReliabilityError> {
        if !(self.remote_switch_time > 0.0 && self.remote_switch_time <= self.manual_section_time) {
            return Err(ReliabilityError::InvalidParams(
                "switching times must satisfy 0 < remote_switch_time <= manual_section_time",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ReliabilityError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("invalid reliability parameters: {0}")]
    InvalidParams(&'static str),
    #[error("monte carlo needs at least one simulated year")]
    NoYears,
}

/// How a failure reaches a load point.
#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[serde(rename_all = "snake_case")]
pub enum ImpactClass {
    /// Waits for the repair: inside the faulted zone, or downstream of it
    /// with no backfeed available.
    InZoneRepair,
    /// Source side of the faulted zone, restored once it is isolated.
    UpstreamSwitched,
    /// Downstream island picked up through a built tie point.
    BackfedSwitched,
    /// No electrical dependence on the failed component.
    Unaffected,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Impact {
    pub class: ImpactClass,
    /// Outage duration, hours.
    pub hours: f64,
}

impl Impact {
    const NONE: Impact = Impact { class: ImpactClass::Unaffected, hours: 0.0 };
}

/// Isolation zones of one plan, ready for repeated classification.
pub struct OutageModel<'a> {
    net: &'a Network,
    params: ReliabilityParams,
    node_zone: Vec<usize>,
    /// Switched branch bounding each zone on its source side; `None` for the
    /// zone directly behind a feeder breaker.
    zone_head: Vec<Option<usize>>,
    zone_parent: Vec<Option<usize>>,
    /// Zone's subtree touches a built tie point.
    zone_has_tie: Vec<bool>,
}

impl<'a> OutageModel<'a> {
    pub fn new(
        net: &'a Network,
        plan: &SwitchPlan,
        params: &ReliabilityParams,
    ) -> Result<Self, ReliabilityError> {
        plan.check(net)?;
        params.check()?;

        let mut switched = vec![false; net.branches().len()];
        for (i, &on) in plan.switches.iter().enumerate() {
            if on {
                switched[net.switch_branch(i)] = true;
            }
        }

        let mut node_zone = vec![usize::MAX; net.nodes().len()];
        let mut zone_head = Vec::new();
        let mut zone_parent = Vec::new();
        for feeder in net.feeders() {
            let top = zone_head.len();
            zone_head.push(None);
            zone_parent.push(None);
            for &node in &feeder.nodes {
                node_zone[node] = match net.parent_branch(node) {
                    None => top,
                    Some(b) => {
                        let upstream = node_zone[net.branch_from(b)];
                        if switched[b] {
                            zone_head.push(Some(b));
                            zone_parent.push(Some(upstream));
                            zone_head.len() - 1
                        } else {
                            upstream
                        }
                    }
                };
            }
        }

        let mut zone_has_tie = vec![false; zone_head.len()];
        for (j, &built) in plan.maneuvers.iter().enumerate() {
            if !built {
                continue;
            }
            let (a, b) = net.maneuver_nodes(j);
            for end in [a, b] {
                let mut zone = Some(node_zone[end]);
                while let Some(z) = zone {
                    zone_has_tie[z] = true;
                    zone = zone_parent[z];
                }
            }
        }

        Ok(Self { net, params: params.clone(), node_zone, zone_head, zone_parent, zone_has_tie })
    }

    pub fn network(&self) -> &Network {
        self.net
    }

    /// Number of isolation zones (including one per feeder breaker).
    pub fn num_zones(&self) -> usize {
        self.zone_head.len()
    }

    /// Zone index of every node.
    pub fn node_zones(&self) -> &[usize] {
        &self.node_zone
    }

    /// Impact of `failed` on load point `lp` (indices).
    pub fn classify(&self, failed: Component, lp: usize) -> Impact {
        let net = self.net;
        let node = net.load_node(lp);
        match failed {
            Component::Transformer(t) => {
                if net.transformer_node(t) == node {
                    Impact { class: ImpactClass::InZoneRepair, hours: net.transformers()[t].repair_time }
                } else {
                    Impact::NONE
                }
            }
            Component::Branch(b) => {
                if net.is_source(node) || net.branch_feeder(b) != net.node_feeder(node) {
                    return Impact::NONE;
                }
                let repair = net.branches()[b].repair_time;
                let faulted = self.node_zone[net.branch_to(b)];
                let own = self.node_zone[node];
                if own == faulted {
                    return Impact { class: ImpactClass::InZoneRepair, hours: repair };
                }
                // Climb the zone tree; reaching the faulted zone means the load
                // point sits in an island hanging below it.
                let mut island = own;
                let mut up = self.zone_parent[own];
                while let Some(z) = up {
                    if z == faulted {
                        return if self.params.include_maneuver_backfeed && self.zone_has_tie[island] {
                            Impact {
                                class: ImpactClass::BackfedSwitched,
                                hours: self.params.remote_switch_time.min(repair),
                            }
                        } else {
                            Impact { class: ImpactClass::InZoneRepair, hours: repair }
                        };
                    }
                    island = z;
                    up = self.zone_parent[z];
                }
                let switching = if self.zone_head[faulted].is_some() {
                    self.params.remote_switch_time
                } else {
                    self.params.manual_section_time
                };
                Impact { class: ImpactClass::UpstreamSwitched, hours: switching.min(repair) }
            }
        }
    }

    /// Annual failure rate of a component.
    pub fn failure_rate(&self, c: Component) -> f64 {
        match c {
            Component::Branch(b) => self.net.branches()[b].failure_rate(),
            Component::Transformer(t) => self.net.transformers()[t].failure_rate,
        }
    }

    /// Components that can interrupt `lp`: branches of its feeder and the
    /// transformers at its node.
    fn candidate_modes(&self, lp: usize) -> impl Iterator<Item = Component> + '_ {
        let node = self.net.load_node(lp);
        let feeder = &self.net.feeders()[self.net.node_feeder(node)];
        feeder.branches.iter().map(|&b| Component::Branch(b)).chain(
            (0..self.net.transformers().len())
                .filter(move |&t| self.net.transformer_node(t) == node)
                .map(Component::Transformer),
        )
    }

    pub fn load_point(&self, lp: usize) -> LoadPointReliability {
        let mut lambda_s = 0.0;
        let mut u_s = 0.0;
        for mode in self.candidate_modes(lp) {
            let impact = self.classify(mode, lp);
            if impact.hours > 0.0 {
                let rate = self.failure_rate(mode);
                lambda_s += rate;
                u_s += rate * impact.hours;
            }
        }
        let r_s = if lambda_s > 0.0 { u_s / lambda_s } else { 0.0 };
        let ens = energy_weight(&self.net.load_points()[lp]) * u_s;
        LoadPointReliability { lambda_s, u_s, r_s, ens }
    }
}

/// Power interrupted at a load point, kW. Generators contribute nothing.
pub fn energy_weight(lp: &LoadPoint) -> f64 {
    lp.mean_active.max(0.0)
}

/// Impact class and outage hours of `failed` on `lp` for the given plan.
pub fn classify_impact(
    net: &Network,
    plan: &SwitchPlan,
    failed: &str,
    lp: &str,
    params: &ReliabilityParams,
) -> Result<(ImpactClass, f64), ReliabilityError> {
    let component = net.component(failed)?;
    let lp = net.load_idx(lp)?;
    let impact = OutageModel::new(net, plan, params)?.classify(component, lp);
    Ok((impact.class, impact.hours))
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
pub struct LoadPointReliability {
    /// f/yr
    pub lambda_s: f64,
    /// h/yr
    pub u_s: f64,
    /// h/f
    pub r_s: f64,
    /// kWh/yr
    pub ens: f64,
}

pub fn load_point_reliability(
    net: &Network,
    plan: &SwitchPlan,
    lp: &str,
    params: &ReliabilityParams,
) -> Result<LoadPointReliability, ReliabilityError> {
    let lp = net.load_idx(lp)?;
    Ok(OutageModel::new(net, plan, params)?.load_point(lp))
}

/// Class-weighted interruption cost, $/kWh.
pub fn interruption_cost_rate(lp: &LoadPoint) -> f64 {
    lp.class_mix
        .iter()
        .map(|(class, frac)| lp.class_interrupt_cost.get(class).copied().unwrap_or(0.0) * frac)
        .sum()
}

/// One row of the per-section breakdown.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct LoadPointSummary {
    pub id: String,
    #[serde(flatten)]
    pub indices: LoadPointReliability,
    /// $/kWh
    pub ic: f64,
    pub k: f64,
    /// $/yr
    pub cost_contribution: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct ReliabilityResult {
    pub load_points: Vec<LoadPointSummary>,
    /// kWh/yr over all load points.
    pub total_ens: f64,
    /// Monetized, importance-weighted ENS, $/yr.
    pub f2: f64,
}

impl OutageModel<'_> {
    pub fn evaluate(&self) -> ReliabilityResult {
        let load_points: Vec<LoadPointSummary> = self
            .net
            .load_points()
            .iter()
            .enumerate()
            .map(|(i, lp)| {
                let indices = self.load_point(i);
                let ic = interruption_cost_rate(lp);
                LoadPointSummary {
                    id: lp.id.clone(),
                    indices,
                    ic,
                    k: lp.importance,
                    cost_contribution: ic * indices.ens * lp.importance,
                }
            })
            .collect();
        let total_ens = load_points.iter().fold(0.0, |a, l| a + l.indices.ens);
        let f2 = load_points.iter().fold(0.0, |a, l| a + l.cost_contribution);
        ReliabilityResult { load_points, total_ens, f2 }
    }
}

/// Second objective with its per-load-point breakdown.
pub fn ens_objective(
    net: &Network,
    plan: &SwitchPlan,
    params: &ReliabilityParams,
) -> Result<ReliabilityResult, ReliabilityError> {
    Ok(OutageModel::new(net, plan, params)?.evaluate())
}

/// Sequential Monte Carlo estimate of per-load-point ENS.
#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    /// kWh/yr per load point.
    pub ens: Vec<f64>,
    /// Standard error of each estimate (batch means), kWh/yr.
    pub std_error: Vec<f64>,
    /// Failure events simulated.
    pub events: u64,
    pub years: u64,
}

const MAX_BATCHES: u64 = 1000;

/// Simulates `years` of alternating up/repair cycles for every component.
///
/// Times to failure are exponential at the component's annual rate and
/// repairs last the fixed repair time. Each failure event is classified
/// against every load point; outage energies are accumulated into batches
/// of equal simulated length to estimate standard errors.
pub fn monte_carlo_ens(
    net: &Network,
    plan: &SwitchPlan,
    params: &ReliabilityParams,
    years: u64,
    seed: u64,
) -> Result<MonteCarloEstimate, ReliabilityError> {
    if years == 0 {
        return Err(ReliabilityError::NoYears);
    }
    let model = OutageModel::new(net, plan, params)?;
    let n_lp = net.load_points().len();
    let weights: Vec<f64> = net.load_points().iter().map(energy_weight).collect();
    let batches = years.min(MAX_BATCHES) as usize;
    let batch_len = years as f64 / batches as f64;
    let mut batch_energy = vec![vec![0.0; n_lp]; batches];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events = 0;
    let horizon = years as f64;

    for component in net.components() {
        let rate = model.failure_rate(component);
        if rate <= 0.0 {
            continue;
        }
        let impacts: Vec<(usize, f64)> =
            (0..n_lp).map(|lp| (lp, model.classify(component, lp).hours)).filter(|&(_, h)| h > 0.0).collect();
        let repair_years = match component {
            Component::Branch(b) => net.branches()[b].repair_time,
            Component::Transformer(t) => net.transformers()[t].repair_time,
        } / HOURS_PER_YEAR;
        let ttf = Exp::new(rate).expect("positive failure rate");
        let mut t = 0.0;
        loop {
            t += ttf.sample(&mut rng);
            if t >= horizon {
                break;
            }
            events += 1;
            let batch = ((t / batch_len) as usize).min(batches - 1);
            for &(lp, hours) in &impacts {
                batch_energy[batch][lp] += weights[lp] * hours;
            }
            t += repair_years;
        }
    }

    let mut ens = vec![0.0; n_lp];
    let mut std_error = vec![0.0; n_lp];
    for lp in 0..n_lp {
        let means: Vec<f64> = batch_energy.iter().map(|b| b[lp] / batch_len).collect();
        let mean = means.iter().sum::<f64>() / batches as f64;
        ens[lp] = batch_energy.iter().map(|b| b[lp]).sum::<f64>() / horizon;
        if batches > 1 {
            let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
            std_error[lp] = (var / batches as f64).sqrt();
        }
    }
    Ok(MonteCarloEstimate { ens, std_error, events, years })
}

/// One demand draw (kW) from the load point's normal distribution,
/// truncated at zero.
pub fn sample_load<R: Rng + ?Sized>(lp: &LoadPoint, rng: &mut R) -> f64 {
    if lp.sigma_active == 0.0 {
        return lp.mean_active.max(0.0);
    }
    let normal = Normal::new(lp.mean_active, lp.sigma_active).expect("validated sigma");
    normal.sample(rng).max(0.0)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::network::tests::{branch, load, node, path_data};
    use crate::network::{
        CandidateKind, CandidateSite, CustomerClass, FeederData, NodeKind, TransformerUnit,
    };

    fn switch(id: &str, on: &str) -> CandidateSite {
        CandidateSite {
            id: id.into(),
            kind: CandidateKind::Switch,
            on_branch: Some(on.into()),
            between: None,
            build_cost: None,
        }
    }

    /// Two path feeders: s - a1 - a2 - a3 and t - c1, tie candidate a3..c1.
    fn two_feeders() -> Network {
        let d = FeederData {
            name: "two".into(),
            base_kva: 1000.0,
            nodes: vec![
                node("s", NodeKind::Source),
                node("a1", NodeKind::Load),
                node("a2", NodeKind::Load),
                node("a3", NodeKind::Load),
                node("t", NodeKind::Source),
                node("c1", NodeKind::Load),
            ],
            branches: vec![
                branch("b1", "s", "a1"),
                branch("b2", "a1", "a2"),
                branch("b3", "a2", "a3"),
                branch("c", "t", "c1"),
            ],
            transformers: vec![],
            load_points: vec![
                load("l1", "a1", 100.0),
                load("l2", "a2", 100.0),
                load("l3", "a3", 100.0),
                load("lc", "c1", 100.0),
            ],
            candidates: vec![
                switch("s2", "b2"),
                switch("s3", "b3"),
                CandidateSite {
                    id: "tie".into(),
                    kind: CandidateKind::Maneuver,
                    on_branch: None,
                    between: Some(["a3".into(), "c1".into()]),
                    build_cost: Some(1000.0),
                },
            ],
        };
        Network::from_data(d).unwrap()
    }

    fn plan(s: &str, t: &str) -> SwitchPlan {
        SwitchPlan::from_bitstrings(s, t).unwrap()
    }

    #[test]
    fn no_switches_means_one_zone_per_feeder() {
        let net = two_feeders();
        let p = ReliabilityParams::default();
        for failed in ["b1", "b2", "b3"] {
            for lp in ["l1", "l2", "l3"] {
                let (class, h) = classify_impact(&net, &plan("00", "0"), failed, lp, &p).unwrap();
                assert_eq!((class, h), (ImpactClass::InZoneRepair, 2.0), "{failed} {lp}");
            }
            let (class, h) = classify_impact(&net, &plan("00", "0"), failed, "lc", &p).unwrap();
            assert_eq!((class, h), (ImpactClass::Unaffected, 0.0));
        }
    }

    #[test]
    fn switch_isolates_distal_fault() {
        let net = two_feeders();
        let p = ReliabilityParams::default();
        let (class, h) = classify_impact(&net, &plan("01", "0"), "b3", "l1", &p).unwrap();
        assert_eq!((class, h), (ImpactClass::UpstreamSwitched, 0.05));
        let (class, _) = classify_impact(&net, &plan("01", "0"), "b3", "l3", &p).unwrap();
        assert_eq!(class, ImpactClass::InZoneRepair);
    }

    #[test]
    fn tie_backfeeds_downstream_island() {
        let net = two_feeders();
        let p = ReliabilityParams::default();
        // Fault on b2 with switches on b2 and b3: a3 is an island below the faulted zone.
        let with_tie = classify_impact(&net, &plan("11", "1"), "b2", "l3", &p).unwrap();
        assert_eq!(with_tie, (ImpactClass::BackfedSwitched, 0.05));
        let without = classify_impact(&net, &plan("11", "0"), "b2", "l3", &p).unwrap();
        assert_eq!(without, (ImpactClass::InZoneRepair, 2.0));
        let disabled = ReliabilityParams { include_maneuver_backfeed: false, ..p };
        let off = classify_impact(&net, &plan("11", "1"), "b2", "l3", &disabled).unwrap();
        assert_eq!(off, (ImpactClass::InZoneRepair, 2.0));
    }

    #[test]
    fn hand_evaluated_indices() {
        // One 2 km line and one transformer at Table I rates.
        let mut d = path_data();
        d.nodes.truncate(2);
        d.branches.truncate(1);
        d.branches[0].length = 2.0;
        d.load_points[0].at_node = "n1".into();
        d.transformers.push(TransformerUnit {
            id: "tx".into(),
            at_node: "n1".into(),
            failure_rate: 0.004,
            repair_time: 4.0,
        });
        let net = Network::from_data(d).unwrap();
        let r = load_point_reliability(&net, &SwitchPlan::empty(&net), "lp2", &Default::default()).unwrap();
        assert!((r.lambda_s - 0.019).abs() < 1e-15);
        assert!((r.u_s - 0.046).abs() < 1e-15);
        assert!((r.r_s - 0.046 / 0.019).abs() < 1e-12);
        assert!((r.r_s - 2.4211).abs() < 1e-4);
        assert!((r.ens - 100.0 * 0.046).abs() < 1e-12);
    }

    #[test]
    fn load_at_source_sees_nothing() {
        let mut d = path_data();
        d.load_points.push(load("ls", "s", 40.0));
        let net = Network::from_data(d).unwrap();
        let r = load_point_reliability(&net, &SwitchPlan::empty(&net), "ls", &Default::default()).unwrap();
        assert_eq!((r.lambda_s, r.u_s, r.r_s, r.ens), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn interruption_cost_is_class_weighted() {
        let mut lp = load("x", "n", 1.0);
        assert_eq!(interruption_cost_rate(&lp), 1.5);
        lp.class_mix = BTreeMap::from([(CustomerClass::Res, 0.5), (CustomerClass::Ind, 0.5)]);
        lp.class_interrupt_cost = BTreeMap::from([(CustomerClass::Res, 1.0), (CustomerClass::Ind, 3.0)]);
        assert!((interruption_cost_rate(&lp) - 2.0).abs() < 1e-15);
        lp.class_mix = CustomerClass::ALL.iter().map(|&c| (c, 0.2)).collect();
        lp.class_interrupt_cost = CustomerClass::ALL.iter().zip(1..).map(|(&c, v)| (c, v as f64)).collect();
        assert!((interruption_cost_rate(&lp) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn objective_products() {
        let mut d = path_data();
        d.load_points[0].importance = 0.0;
        let net = Network::from_data(d).unwrap();
        let res = ens_objective(&net, &SwitchPlan::empty(&net), &Default::default()).unwrap();
        assert_eq!(res.f2, 0.0);
        assert!(res.total_ens > 0.0);

        // IC = 2, ENS = 50 kWh/yr (100 kW x 0.5 h/yr), K = 1.5.
        let mut d = path_data();
        d.branches[0].failure_rate_per_km = 0.125;
        d.branches[1].failure_rate_per_km = 0.125;
        let lp = &mut d.load_points[0];
        lp.class_interrupt_cost = BTreeMap::from([(CustomerClass::Res, 2.0)]);
        lp.importance = 1.5;
        let net = Network::from_data(d).unwrap();
        let res = ens_objective(&net, &SwitchPlan::empty(&net), &Default::default()).unwrap();
        assert!((res.load_points[0].indices.ens - 50.0).abs() < 1e-12);
        assert!((res.f2 - 150.0).abs() < 1e-10);
    }

    #[test]
    fn switching_time_never_exceeds_repair() {
        let net = two_feeders();
        let p = ReliabilityParams { remote_switch_time: 5.0, manual_section_time: 6.0, ..Default::default() };
        let (_, h) = classify_impact(&net, &plan("01", "0"), "b3", "l1", &p).unwrap();
        assert_eq!(h, 2.0);
    }

    #[test]
    fn invalid_inputs() {
        let net = two_feeders();
        let p = ReliabilityParams { remote_switch_time: 2.0, ..Default::default() };
        assert!(matches!(ens_objective(&net, &plan("00", "0"), &p), Err(ReliabilityError::InvalidParams(_))));
        assert!(matches!(
            ens_objective(&net, &plan("0", "0"), &Default::default()),
            Err(ReliabilityError::Plan(_))
        ));
        assert!(matches!(
            classify_impact(&net, &plan("00", "0"), "zz", "l1", &Default::default()),
            Err(ReliabilityError::Network(_))
        ));
        assert!(matches!(
            monte_carlo_ens(&net, &plan("00", "0"), &Default::default(), 0, 1),
            Err(ReliabilityError::NoYears)
        ));
    }

    #[test]
    fn monte_carlo_with_no_failures_is_zero() {
        let mut d = path_data();
        for b in &mut d.branches {
            b.failure_rate_per_km = 0.0;
        }
        let net = Network::from_data(d).unwrap();
        let mc = monte_carlo_ens(&net, &SwitchPlan::empty(&net), &Default::default(), 1000, 3).unwrap();
        assert_eq!(mc.ens, vec![0.0]);
        assert_eq!(mc.std_error, vec![0.0]);
        assert_eq!(mc.events, 0);
    }

    #[test]
    fn monte_carlo_single_component_converges() {
        // lambda = 0.1 /yr, 2 h repair, 100 kW: analytical ENS = 20 kWh/yr.
        let mut d = path_data();
        d.nodes.truncate(2);
        d.branches.truncate(1);
        d.branches[0].failure_rate_per_km = 0.1;
        d.load_points[0].at_node = "n1".into();
        let net = Network::from_data(d).unwrap();
        let plan = SwitchPlan::empty(&net);
        let mc = monte_carlo_ens(&net, &plan, &Default::default(), 1_000_000, 42).unwrap();
        assert!((mc.ens[0] - 20.0).abs() / 20.0 < 0.02, "{}", mc.ens[0]);
        let again = monte_carlo_ens(&net, &plan, &Default::default(), 1_000_000, 42).unwrap();
        assert_eq!(mc, again);
    }

    #[test]
    fn load_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut lp = load("x", "n", 100.0);
        assert_eq!(sample_load(&lp, &mut rng), 100.0);
        lp.mean_active = 0.0;
        assert_eq!(sample_load(&lp, &mut rng), 0.0);

        lp.mean_active = 100.0;
        lp.sigma_active = 10.0;
        let draws: Vec<f64> = (0..100_000).map(|_| sample_load(&lp, &mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let sd = (draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64).sqrt();
        assert!((mean - 100.0).abs() < 0.2, "{mean}");
        assert!((sd - 10.0).abs() < 0.3, "{sd}");

        lp.mean_active = 1.0;
        assert!((0..1000).all(|_| sample_load(&lp, &mut rng) >= 0.0));
    }
}
