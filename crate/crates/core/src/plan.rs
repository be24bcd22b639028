//! Binary placement decisions.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::Network;

/// Install/build decisions for every candidate site of a network.
///
/// `switches[i]` refers to the `i`-th switch candidate and `maneuvers[j]` to
/// the `j`-th maneuver candidate, both in feeder-file order.
#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SwitchPlan {
    pub switches: Vec<bool>,
    pub maneuvers: Vec<bool>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanError {
    #[error("plan has {got} switch decisions, network has {expected} switch candidates")]
    SwitchCount { expected: usize, got: usize },
    #[error("plan has {got} maneuver decisions, network has {expected} maneuver candidates")]
    ManeuverCount { expected: usize, got: usize },
    #[error("invalid bit '{0}' in plan bitstring (expected 0 or 1)")]
    BadBit(char),
}

impl SwitchPlan {
    /// Nothing installed.
    pub fn empty(net: &Network) -> Self {
        Self {
            switches: vec![false; net.num_switch_sites()],
            maneuvers: vec![false; net.num_maneuver_sites()],
        }
    }

    /// Every candidate installed.
    pub fn full(net: &Network) -> Self {
        Self { switches: vec![true; net.num_switch_sites()], maneuvers: vec![true; net.num_maneuver_sites()] }
    }

    /// Plan from the bits of `index`: switch bits first (bit 0 = first switch
    /// candidate), then maneuver bits.
    pub fn from_index(index: u64, n_switches: usize, n_maneuvers: usize) -> Self {
        let bit = |k: usize| (index >> k) & 1 == 1;
        Self {
            switches: (0..n_switches).map(bit).collect(),
            maneuvers: (n_switches..n_switches + n_maneuvers).map(bit).collect(),
        }
    }

    pub fn check(&self, net: &Network) -> Result<(), PlanError> {
        if self.switches.len() != net.num_switch_sites() {
            return Err(PlanError::SwitchCount {
                expected: net.num_switch_sites(),
                got: self.switches.len(),
            });
        }
        if self.maneuvers.len() != net.num_maneuver_sites() {
            return Err(PlanError::ManeuverCount {
                expected: net.num_maneuver_sites(),
                got: self.maneuvers.len(),
            });
        }
        Ok(())
    }

    pub fn num_switches(&self) -> usize {
        self.switches.iter().filter(|&&b| b).count()
    }

    pub fn num_maneuvers(&self) -> usize {
        self.maneuvers.iter().filter(|&&b| b).count()
    }

    /// Parses two 0/1 strings (switch bits, maneuver bits).
    pub fn from_bitstrings(switches: &str, maneuvers: &str) -> Result<Self, PlanError> {
        Ok(Self { switches: parse_bits(switches)?, maneuvers: parse_bits(maneuvers)? })
    }

    pub fn switch_bits(&self) -> String {
        bits(&self.switches)
    }

    pub fn maneuver_bits(&self) -> String {
        bits(&self.maneuvers)
    }

    /// The 0/1 real encoding of this plan (switch genes then maneuver genes).
    pub fn encode(&self) -> Vec<f64> {
        self.switches.iter().chain(&self.maneuvers).map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }
}

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn parse_bits(s: &str) -> Result<Vec<bool>, PlanError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(PlanError::BadBit(other)),
        })
        .collect()
}

impl fmt::Display for SwitchPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DS={} DT={}", self.switch_bits(), self.maneuver_bits())
    }
}
