//! The switch-placement problem: genotype decoding, plan evaluation, the
//! exhaustive oracle and compromise selection.
//!
//! Normal-state losses do not depend on the plan (installed switches are
//! closed and tie points are normally open), so the load flow runs once per
//! problem and every plan reuses its branch losses.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::{placement_cost, CostBreakdown, CostError, CostParams};
use crate::moo::{non_dominated_indices, Problem};
use crate::network::Network;
use crate::plan::{PlanError, SwitchPlan};
use crate::power_flow::{solve_power_flow, Loads, PowerFlowError, PowerFlowSettings};
use crate::reliability::{OutageModel, ReliabilityError, ReliabilityParams, ReliabilityResult};

/// Objective value given to every plan when the load flow fails.
pub const PENALTY: f64 = 1e15;

/// Default enumeration cap for [`exhaustive_pareto`].
pub const DEFAULT_MAX_BITS: usize = 16;

/// Decision threshold: a gene at or above it selects the candidate.
pub const GENE_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error)]
pub enum PlacementError {
    #[error("genotype has {got} genes, expected {expected}")]
    GenotypeLength { expected: usize, got: usize },
    #[error("instance has {bits} decision bits, enumeration cap is {max_bits}")]
    TooLarge { bits: usize, max_bits: usize },
    #[error("empty front")]
    EmptyFront,
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Reliability(#[from] ReliabilityError),
    #[error(transparent)]
    PowerFlow(#[from] PowerFlowError),
}

/// Thresholds a genotype: the first `n_switches` genes are switch decisions,
/// the rest maneuver decisions.
pub fn decode(genotype: &[f64], n_switches: usize, n_maneuvers: usize) -> Result<SwitchPlan, PlacementError> {
    if genotype.len() != n_switches + n_maneuvers {
        return Err(PlacementError::GenotypeLength {
            expected: n_switches + n_maneuvers,
            got: genotype.len(),
        });
    }
    let on = |g: &f64| *g >= GENE_THRESHOLD;
    Ok(SwitchPlan {
        switches: genotype[..n_switches].iter().map(on).collect(),
        maneuvers: genotype[n_switches..].iter().map(on).collect(),
    })
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct EvaluatedPlan {
    pub plan: SwitchPlan,
    /// Investment, maintenance and loss cost.
    pub f1: f64,
    /// Monetized energy not supplied, per year.
    pub f2: f64,
    /// `None` when the plan was penalized.
    pub cost: Option<CostBreakdown>,
    pub reliability: ReliabilityResult,
    /// Load flow failed and both objectives hold [`PENALTY`].
    pub penalized: bool,
}

impl EvaluatedPlan {
    pub fn objectives(&self) -> [f64; 2] {
        [self.f1, self.f2]
    }
}

/// One network with resolved parameters and its normal-state losses.
#[derive(Clone, Debug)]
pub struct PlacementProblem<'a> {
    net: &'a Network,
    cost: CostParams,
    reliability: ReliabilityParams,
    /// Per-branch kW, or `None` when the load flow failed.
    losses: Option<Vec<f64>>,
    power_flow_error: Option<String>,
}

impl<'a> PlacementProblem<'a> {
    pub fn new(
        net: &'a Network,
        cost: CostParams,
        reliability: ReliabilityParams,
        pf: &PowerFlowSettings,
    ) -> Result<Self, PlacementError> {
        cost.check()?;
        reliability.check()?;
        pf.check()?;
        if cost.switch_costs.len() != net.num_switch_sites() {
            return Err(PlanError::SwitchCount {
                expected: net.num_switch_sites(),
                got: cost.switch_costs.len(),
            }
            .into());
        }
        if cost.maneuver_costs.len() != net.num_maneuver_sites() {
            return Err(PlanError::ManeuverCount {
                expected: net.num_maneuver_sites(),
                got: cost.maneuver_costs.len(),
            }
            .into());
        }
        let (losses, power_flow_error) = match solve_power_flow(net, &Loads::mean(net), pf) {
            Ok(state) if state.converged => (Some(state.branch_loss_active), None),
            Ok(state) => {
                (None, Some(format!("load flow did not converge in {} iterations", state.iterations)))
            }
            Err(e) => (None, Some(e.to_string())),
        };
        Ok(Self { net, cost, reliability, losses, power_flow_error })
    }

    pub fn network(&self) -> &'a Network {
        self.net
    }

    pub fn cost_params(&self) -> &CostParams {
        &self.cost
    }

    pub fn reliability_params(&self) -> &ReliabilityParams {
        &self.reliability
    }

    /// Normal-state branch losses in kW, if the load flow converged.
    pub fn branch_losses(&self) -> Option<&[f64]> {
        self.losses.as_deref()
    }

    /// Why the load flow failed, when it did.
    pub fn power_flow_error(&self) -> Option<&str> {
        self.power_flow_error.as_deref()
    }

    pub fn num_bits(&self) -> usize {
        self.net.num_switch_sites() + self.net.num_maneuver_sites()
    }

    pub fn decode(&self, genotype: &[f64]) -> Result<SwitchPlan, PlacementError> {
        decode(genotype, self.net.num_switch_sites(), self.net.num_maneuver_sites())
    }

    pub fn evaluate_plan(&self, plan: &SwitchPlan) -> Result<EvaluatedPlan, PlacementError> {
        let reliability = OutageModel::new(self.net, plan, &self.reliability)?.evaluate();
        let Some(losses) = &self.losses else {
            return Ok(EvaluatedPlan {
                plan: plan.clone(),
                f1: PENALTY,
                f2: PENALTY,
                cost: None,
                reliability,
                penalized: true,
            });
        };
        let cost = placement_cost(plan, &self.cost, losses)?;
        Ok(EvaluatedPlan {
            plan: plan.clone(),
            f1: cost.total,
            f2: reliability.f2,
            cost: Some(cost),
            reliability,
            penalized: false,
        })
    }

    fn objectives_of(&self, plan: &SwitchPlan) -> [f64; 2] {
        match self.evaluate_plan(plan) {
            Ok(e) => e.objectives(),
            Err(_) => [PENALTY, PENALTY],
        }
    }

    /// Every plan on the exact Pareto front, in enumeration-index order.
    /// Plans sharing an objective vector are all kept.
    pub fn exhaustive_pareto(&self, max_bits: usize) -> Result<Vec<EvaluatedPlan>, PlacementError> {
        let bits = self.num_bits();
        if bits > max_bits || bits >= 64 {
            return Err(PlacementError::TooLarge { bits, max_bits });
        }
        let (n, m) = (self.net.num_switch_sites(), self.net.num_maneuver_sites());
        let objectives: Vec<[f64; 2]> = (0..1u64 << bits)
            .into_par_iter()
            .map(|i| self.objectives_of(&SwitchPlan::from_index(i, n, m)))
            .collect();
        non_dominated_indices(&objectives)
            .into_iter()
            .map(|i| self.evaluate_plan(&SwitchPlan::from_index(i as u64, n, m)))
            .collect()
    }
}

impl Problem for PlacementProblem<'_> {
    fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(0.0, 1.0); self.num_bits()]
    }

    fn num_objectives(&self) -> usize {
        2
    }

    fn evaluate(&self, genotype: &[f64]) -> Vec<f64> {
        match self.decode(genotype) {
            Ok(plan) => self.objectives_of(&plan).to_vec(),
            Err(_) => vec![PENALTY, PENALTY],
        }
    }
}

/// Evaluates one plan from scratch, including the load flow.
pub fn evaluate(
    net: &Network,
    plan: &SwitchPlan,
    cost: &CostParams,
    rel: &ReliabilityParams,
    pf: &PowerFlowSettings,
) -> Result<EvaluatedPlan, PlacementError> {
    plan.check(net)?;
    PlacementProblem::new(net, cost.clone(), rel.clone(), pf)?.evaluate_plan(plan)
}

/// Exact Pareto set by enumerating all `2^(n+m)` plans.
pub fn exhaustive_pareto(
    net: &Network,
    cost: &CostParams,
    rel: &ReliabilityParams,
    pf: &PowerFlowSettings,
    max_bits: usize,
) -> Result<Vec<EvaluatedPlan>, PlacementError> {
    PlacementProblem::new(net, cost.clone(), rel.clone(), pf)?.exhaustive_pareto(max_bits)
}

/// Index of the member with the largest worst-case membership, where each
/// objective's membership is one minus its value normalized over the front.
/// Ties go to the lower first objective, then to the earlier member.
pub fn compromise_index(objectives: &[[f64; 2]]) -> Option<usize> {
    if objectives.is_empty() {
        return None;
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for o in objectives {
        for k in 0..2 {
            lo[k] = lo[k].min(o[k]);
            hi[k] = hi[k].max(o[k]);
        }
    }
    let score = |o: &[f64; 2]| {
        (0..2)
            .map(|k| {
                let range = hi[k] - lo[k];
                if range > 0.0 {
                    1.0 - (o[k] - lo[k]) / range
                } else {
                    1.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut best = 0;
    let mut best_score = score(&objectives[0]);
    for (i, o) in objectives.iter().enumerate().skip(1) {
        let s = score(o);
        if s > best_score || (s == best_score && o[0] < objectives[best][0]) {
            best = i;
            best_score = s;
        }
    }
    Some(best)
}

pub fn select_compromise(front: &[EvaluatedPlan]) -> Result<&EvaluatedPlan, PlacementError> {
    let objectives: Vec<[f64; 2]> = front.iter().map(EvaluatedPlan::objectives).collect();
    compromise_index(&objectives).map(|i| &front[i]).ok_or(PlacementError::EmptyFront)
}
