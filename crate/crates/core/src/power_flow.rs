//! Backward-forward sweep load flow for radial feeders.
//!
//! Each iteration computes constant-PQ node currents from the previous
//! voltages, accumulates branch currents from the leaves towards the source,
//! then walks from the source outwards updating voltages with the branch
//! drops. All quantities are per-unit on the feeder's `base_kva`; losses are
//! reported in kW.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::Network;

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct PowerFlowSettings {
    /// Convergence threshold on the largest node-voltage change, pu.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Voltage held at every source node, pu.
    pub source_voltage: f64,
}

impl Default for PowerFlowSettings {
    fn default() -> Self {
        Self { tolerance: 1e-6, max_iterations: 100, source_voltage: 1.0 }
    }
}

impl PowerFlowSettings {
    pub fn check(&self) -> Result<(), PowerFlowError> {
        if !(self.tolerance > 0.0) {
            return Err(PowerFlowError::InvalidSettings("tolerance must be positive"));
        }
        if self.max_iterations < 1 {
            return Err(PowerFlowError::InvalidSettings("max_iterations must be at least 1"));
        }
        if !(self.source_voltage > 0.0) {
            return Err(PowerFlowError::InvalidSettings("source_voltage must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PowerFlowError {
    #[error("invalid power-flow settings: {0}")]
    InvalidSettings(&'static str),
    #[error("expected {expected} load entries, got {got}")]
    LoadCount { expected: usize, got: usize },
    #[error("unknown load point '{0}'")]
    UnknownLoadPoint(String),
    #[error("zero voltage at loaded node '{0}'")]
    ZeroVoltage(String),
    #[error("power flow did not converge")]
    NotConverged,
}

/// Active/reactive demand per load point (kW, kvar), indexed like
/// [`Network::load_points`].
#[derive(Clone, Debug, PartialEq)]
pub struct Loads(pub Vec<(f64, f64)>);

impl Loads {
    /// Mean demand of every load point.
    pub fn mean(net: &Network) -> Self {
        Self(net.load_points().iter().map(|l| (l.mean_active, l.mean_reactive)).collect())
    }

    pub fn zero(net: &Network) -> Self {
        Self(vec![(0.0, 0.0); net.load_points().len()])
    }

    /// Builds a load vector from a map keyed by load-point id. Load points
    /// missing from the map draw nothing.
    pub fn from_map(net: &Network, map: &BTreeMap<String, (f64, f64)>) -> Result<Self, PowerFlowError> {
        let mut v = vec![(0.0, 0.0); net.load_points().len()];
        for (id, &pq) in map {
            let i = net.load_idx(id).map_err(|_| PowerFlowError::UnknownLoadPoint(id.clone()))?;
            v[i] = pq;
        }
        Ok(Self(v))
    }
}

/// Solved (or last-iterate) state of the network.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerFlowState {
    /// Per node, pu.
    pub voltages: Vec<Complex64>,
    /// Load current injected at each node, pu.
    pub node_currents: Vec<Complex64>,
    /// Current through each branch, from its source side, pu.
    pub branch_currents: Vec<Complex64>,
    /// Per branch, kW.
    pub branch_loss_active: Vec<f64>,
    /// kW
    pub total_loss_active: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Largest node-voltage change of every iteration.
    pub voltage_change: Vec<f64>,
}

impl PowerFlowState {
    /// Active power injected by all sources, pu.
    pub fn source_injection_pu(&self, net: &Network) -> f64 {
        net.feeders()
            .iter()
            .map(|f| {
                let s = f.source;
                let out: Complex64 =
                    net.child_branches(s).iter().map(|&b| self.branch_currents[b]).sum::<Complex64>()
                        + self.node_currents[s];
                (self.voltages[s] * out.conj()).re
            })
            .sum()
    }

    pub fn voltage(&self, net: &Network, node: &str) -> Option<Complex64> {
        net.node_idx(node).ok().map(|i| self.voltages[i])
    }
}

/// Runs the backward-forward sweep.
///
/// Non-convergence is not an error: the last iterate is returned with
/// `converged = false`.
pub fn solve_power_flow(
    net: &Network,
    loads: &Loads,
    settings: &PowerFlowSettings,
) -> Result<PowerFlowState, PowerFlowError> {
    settings.check()?;
    let n_lp = net.load_points().len();
    if loads.0.len() != n_lp {
        return Err(PowerFlowError::LoadCount { expected: n_lp, got: loads.0.len() });
    }

    let n = net.nodes().len();
    let base = net.base_kva();
    let mut demand = vec![Complex64::new(0.0, 0.0); n];
    for (li, &(p, q)) in loads.0.iter().enumerate() {
        demand[net.load_node(li)] += Complex64::new(p / base, q / base);
    }
    let impedance: Vec<Complex64> =
        net.branches().iter().map(|b| Complex64::new(b.resistance, b.reactance)).collect();

    // Parent-before-child order across all feeders.
    let order: Vec<usize> = net.feeders().iter().flat_map(|f| f.nodes.iter().copied()).collect();

    let v_src = Complex64::new(settings.source_voltage, 0.0);
    let mut voltages = vec![v_src; n];
    let mut node_currents = vec![Complex64::new(0.0, 0.0); n];
    let mut branch_currents = vec![Complex64::new(0.0, 0.0); net.branches().len()];
    let mut accum = vec![Complex64::new(0.0, 0.0); n];
    let mut voltage_change = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < settings.max_iterations {
        iterations += 1;

        // Backward sweep: node currents, then branch currents leaf to source.
        for &node in &order {
            let s = demand[node];
            node_currents[node] = if s == Complex64::new(0.0, 0.0) {
                Complex64::new(0.0, 0.0)
            } else {
                let v = voltages[node];
                if v.norm() == 0.0 {
                    return Err(PowerFlowError::ZeroVoltage(net.nodes()[node].id.clone()));
                }
                (s / v).conj()
            };
            accum[node] = node_currents[node];
        }
        for &node in order.iter().rev() {
            if let Some(b) = net.parent_branch(node) {
                branch_currents[b] = accum[node];
                accum[net.branch_from(b)] += branch_currents[b];
            }
        }

        // Forward sweep: voltages source to leaf.
        let mut max_change: f64 = 0.0;
        for &node in &order {
            let updated = match net.parent_branch(node) {
                None => v_src,
                Some(b) => voltages[net.branch_from(b)] - impedance[b] * branch_currents[b],
            };
            max_change = max_change.max((updated - voltages[node]).norm());
            voltages[node] = updated;
        }
        voltage_change.push(max_change);
        if max_change < settings.tolerance {
            converged = true;
            break;
        }
    }

    let branch_loss_active: Vec<f64> = net
        .branches()
        .iter()
        .zip(&branch_currents)
        .map(|(b, i)| b.resistance * i.norm_sqr() * base)
        .collect();
    let total_loss_active = branch_loss_active.iter().fold(0.0, |a, b| a + b);

    Ok(PowerFlowState {
        voltages,
        node_currents,
        branch_currents,
        branch_loss_active,
        total_loss_active,
        iterations,
        converged,
        voltage_change,
    })
}

/// Per-branch active losses (kW) of a converged state, keyed by branch id.
pub fn branch_losses(state: &PowerFlowState, net: &Network) -> Result<BTreeMap<String, f64>, PowerFlowError> {
    if !state.converged {
        return Err(PowerFlowError::NotConverged);
    }
    Ok(net.branches().iter().zip(&state.branch_loss_active).map(|(b, &loss)| (b.id.clone(), loss)).collect())
}
