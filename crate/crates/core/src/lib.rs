//! Trust-gated neighbour selection for vehicular ad-hoc networks.
//!
//! Every node keeps a Beta-posterior view of how reliably each neighbour
//! forwards packets, fuses neighbours' recommendations as Dempster-Shafer
//! evidence, and only lets neighbours whose combined trust clears a threshold
//! into its Q-learning action set. Q-values estimate accumulated link-life
//! time, and the learning rate follows the velocity difference between the
//! two ends of a link.
//!
//! The crate is `no_std` (it needs `alloc`). The deterministic simulator in
//! [`sim`] lives here too; file formats, sweeps and the CLI are in the
//! `trustroute` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adversary;
mod math;
pub mod mobility;
pub mod qrouting;
pub mod sim;
pub mod trust;

use core::fmt;

/// Simulation time in whole ticks.
pub type Tick = u64;

/// Identifier of a simulated vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
