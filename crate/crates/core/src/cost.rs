//! First objective: capital, discounted maintenance and discounted loss cost.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{CandidateKind, Network};
use crate::plan::{PlanError, SwitchPlan};

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error("interest rate must exceed -1, got {0}")]
    Interest(f64),
    #[error("invalid cost parameter: {0}")]
    Invalid(&'static str),
    #[error("no construction cost for maneuver candidate '{0}'")]
    MissingManeuverCost(String),
    #[error("cost override for unknown candidate '{0}'")]
    UnknownCandidate(String),
    #[error(transparent)]
    Plan(#[from] PlanError),
}

/// One-year conversion factor `(1 + inflation) / (1 + interest)`.
pub fn present_worth_factor(inflation: f64, interest: f64) -> Result<f64, CostError> {
    if !(interest > -1.0) {
        return Err(CostError::Interest(interest));
    }
    Ok((1.0 + inflation) / (1.0 + interest))
}

/// Cost parameters resolved against one network.
#[derive(Clone, Debug, PartialEq)]
pub struct CostParams {
    /// Construction cost of each switch candidate, in candidate order.
    pub switch_costs: Vec<f64>,
    /// Construction cost of each maneuver candidate, in candidate order.
    pub maneuver_costs: Vec<f64>,
    /// Annual maintenance as a fraction of installed capital.
    pub maintenance_fraction: f64,
    /// Fixed annual maintenance cost replacing the fraction rule.
    pub maintenance_override: Option<f64>,
    pub inflation: f64,
    pub interest: f64,
    pub horizon_years: u32,
    /// $/kWh of lost energy.
    pub loss_cost_rate: f64,
    pub hours_per_year: f64,
}

impl CostParams {
    /// Same cost `switch_cost` for every switch site; everything else zero
    /// except a one-year horizon.
    pub fn uniform(switch_cost: f64, n_switches: usize, maneuver_costs: Vec<f64>) -> Self {
        Self {
            switch_costs: vec![switch_cost; n_switches],
            maneuver_costs,
            maintenance_fraction: 0.0,
            maintenance_override: None,
            inflation: 0.0,
            interest: 0.0,
            horizon_years: 1,
            loss_cost_rate: 0.0,
            hours_per_year: 8760.0,
        }
    }

    pub fn check(&self) -> Result<(), CostError> {
        let mut money: Vec<f64> = self.switch_costs.iter().chain(&self.maneuver_costs).copied().collect();
        money.extend(self.maintenance_override);
        money.extend([self.loss_cost_rate, self.maintenance_fraction]);
        if money.iter().any(|v| !(*v >= 0.0)) {
            return Err(CostError::Invalid("monetary values must be non-negative"));
        }
        if !(self.inflation > -1.0) {
            return Err(CostError::Invalid("inflation must exceed -1"));
        }
        if !(self.interest > -1.0) {
            return Err(CostError::Interest(self.interest));
        }
        if self.horizon_years < 1 {
            return Err(CostError::Invalid("horizon_years must be at least 1"));
        }
        if !(self.hours_per_year > 0.0) {
            return Err(CostError::Invalid("hours_per_year must be positive"));
        }
        Ok(())
    }

    /// `sum_{t=1}^{ny} P_w^t`, the multiplier applied to every recurring annual cost.
    pub fn discount_sum(&self) -> Result<f64, CostError> {
        let pw = present_worth_factor(self.inflation, self.interest)?;
        if pw == 1.0 {
            return Ok(self.horizon_years as f64);
        }
        let mut acc = 0.0;
        let mut factor = 1.0;
        for _ in 0..self.horizon_years {
            factor *= pw;
            acc += factor;
        }
        Ok(acc)
    }
}

/// Run-configuration form of the cost parameters, before resolving
/// per-candidate costs against a network.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct CostConfig {
    /// Default switch construction cost (CS).
    pub switch_cost: f64,
    pub maintenance_fraction: f64,
    pub maintenance_override: Option<f64>,
    pub inflation: f64,
    pub interest: f64,
    pub horizon_years: u32,
    pub loss_cost_rate: f64,
    pub hours_per_year: f64,
    /// Per-candidate construction costs overriding the feeder file.
    pub candidate_costs: BTreeMap<String, f64>,
}

impl Default for CostConfig {
    fn default() -> Self {
        Self {
            switch_cost: 4700.0,
            maintenance_fraction: 0.02,
            maintenance_override: None,
            inflation: 0.0,
            interest: 0.0,
            horizon_years: 1,
            loss_cost_rate: 0.0,
            hours_per_year: 8760.0,
            candidate_costs: BTreeMap::new(),
        }
    }
}

impl CostConfig {
    /// Resolves site costs: config override, then the feeder file's
    /// `build_cost`, then (switches only) `switch_cost`.
    pub fn resolve(&self, net: &Network) -> Result<CostParams, CostError> {
        for id in self.candidate_costs.keys() {
            if !net.candidates().iter().any(|c| &c.id == id) {
                return Err(CostError::UnknownCandidate(id.clone()));
            }
        }
        let mut switch_costs = Vec::new();
        let mut maneuver_costs = Vec::new();
        for c in net.candidates() {
            let cost = self.candidate_costs.get(&c.id).copied().or(c.build_cost);
            match c.kind {
                CandidateKind::Switch => switch_costs.push(cost.unwrap_or(self.switch_cost)),
                CandidateKind::Maneuver => {
                    maneuver_costs.push(cost.ok_or_else(|| CostError::MissingManeuverCost(c.id.clone()))?)
                }
            }
        }
        let params = CostParams {
            switch_costs,
            maneuver_costs,
            maintenance_fraction: self.maintenance_fraction,
            maintenance_override: self.maintenance_override,
            inflation: self.inflation,
            interest: self.interest,
            horizon_years: self.horizon_years,
            loss_cost_rate: self.loss_cost_rate,
            hours_per_year: self.hours_per_year,
        };
        params.check()?;
        Ok(params)
    }
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
pub struct CostBreakdown {
    pub switch_capital: f64,
    pub maneuver_capital: f64,
    /// Installed capital (switches plus tie points).
    pub capital: f64,
    /// Discounted maintenance over the horizon.
    pub maintenance_pw: f64,
    /// Discounted loss cost over the horizon.
    pub loss_pw: f64,
    pub total: f64,
}

/// Evaluates F1 for `plan` given per-branch loss power in kW.
pub fn placement_cost(
    plan: &SwitchPlan,
    params: &CostParams,
    annual_loss_kw: &[f64],
) -> Result<CostBreakdown, CostError> {
    if plan.switches.len() != params.switch_costs.len() {
        return Err(
            PlanError::SwitchCount { expected: params.switch_costs.len(), got: plan.switches.len() }.into()
        );
    }
    if plan.maneuvers.len() != params.maneuver_costs.len() {
        return Err(PlanError::ManeuverCount {
            expected: params.maneuver_costs.len(),
            got: plan.maneuvers.len(),
        }
        .into());
    }
    let selected = |flags: &[bool], costs: &[f64]| -> f64 {
        flags.iter().zip(costs).filter(|(on, _)| **on).fold(0.0, |acc, (_, c)| acc + c)
    };
    let switch_capital = selected(&plan.switches, &params.switch_costs);
    let maneuver_capital = selected(&plan.maneuvers, &params.maneuver_costs);
    let capital = switch_capital + maneuver_capital;

    let discount = params.discount_sum()?;
    let annual_maintenance = params.maintenance_override.unwrap_or(params.maintenance_fraction * capital);
    let maintenance_pw = discount * annual_maintenance;
    let loss_kw: f64 = annual_loss_kw.iter().fold(0.0, |a, b| a + b);
    let loss_pw = loss_kw * params.hours_per_year * params.loss_cost_rate * discount;

    Ok(CostBreakdown {
        switch_capital,
        maneuver_capital,
        capital,
        maintenance_pw,
        loss_pw,
        total: capital + maintenance_pw + loss_pw,
    })
}
