use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{ScenarioConfig, Topology, TrustEvaluation};
use super::SimError;
use crate::adversary::{self, AttackerProfile, ForwardDecision, PhaseClock};
use crate::mobility::{Heading, NodeKinematics};
use crate::qrouting::QTable;
use crate::trust::{Claim, MassAssignment, TrustTable};
use crate::{NodeId, Tick};

const PLACEMENT_ATTEMPTS: usize = 1000;
const MIN_DEGREE: usize = 1;
const MAX_DEGREE: usize = 3;

/// Independent random streams so that, say, extra exploration draws never
/// shift attacker behaviour.
pub(crate) struct Streams {
    pub topology: ChaCha8Rng,
    pub explore: ChaCha8Rng,
    pub adversary: ChaCha8Rng,
    pub change: ChaCha8Rng,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        let stream = |k: u64| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(k);
            r
        };
        Self {
            topology: stream(1),
            explore: stream(2),
            adversary: stream(3),
            change: stream(4),
        }
    }
}

/// Initial placement. Grid puts everyone on one lane at even spacing;
/// random placement resamples offending nodes until every degree is in
/// 1..=3.
pub fn build_topology<R: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    rng: &mut R,
) -> Result<Vec<NodeKinematics>, SimError> {
    let n = cfg.n_nodes;
    let (v_lo, v_hi) = cfg.velocity_range;
    let mut static_flags = alloc::vec![false; n];
    let n_static = libm::round(cfg.static_fraction * n as f64) as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for &i in order.iter().take(n_static) {
        static_flags[i] = true;
    }

    let speed = |rng: &mut R| {
        if v_hi > v_lo {
            rng.random_range(v_lo..=v_hi)
        } else {
            v_lo
        }
    };

    let mut nodes: Vec<NodeKinematics> = Vec::with_capacity(n);
    match cfg.topology {
        Topology::Grid => {
            let spacing = cfg.road_length / n as f64;
            for (i, &parked) in static_flags.iter().enumerate() {
                let s = speed(rng);
                nodes.push(NodeKinematics {
                    node: NodeId(i as u32),
                    x: i as f64 * spacing,
                    y: 0.0,
                    speed: if parked { 0.0 } else { s },
                    heading: Heading::Forward,
                    mobile: !parked,
                });
            }
        }
        Topology::Random => {
            for (i, &parked) in static_flags.iter().enumerate() {
                let heading = if rng.random::<bool>() {
                    Heading::Forward
                } else {
                    Heading::Backward
                };
                let s = speed(rng);
                nodes.push(NodeKinematics {
                    node: NodeId(i as u32),
                    x: rng.random_range(0.0..cfg.road_length),
                    y: lane_y(heading, cfg.lane_offset),
                    speed: if parked { 0.0 } else { s },
                    heading,
                    mobile: !parked,
                });
            }
            let mut attempts = 0;
            loop {
                let bad: Vec<usize> = (0..n)
                    .filter(|&i| {
                        let d = degree(&nodes, i, cfg.tx_range);
                        !(MIN_DEGREE..=MAX_DEGREE).contains(&d)
                    })
                    .collect();
                if bad.is_empty() {
                    break;
                }
                if attempts == PLACEMENT_ATTEMPTS {
                    return Err(SimError::Placement {
                        attempts,
                        violating: bad.len(),
                    });
                }
                attempts += 1;
                let i = bad[rng.random_range(0..bad.len())];
                nodes[i].x = rng.random_range(0.0..cfg.road_length);
            }
        }
    }

    for o in &cfg.overrides {
        let k = &mut nodes[o.node.index()];
        if let Some(x) = o.x {
            k.x = x;
        }
        if let Some(h) = o.heading {
            k.heading = h;
            k.y = lane_y(h, cfg.lane_offset);
        }
        if let Some(m) = o.mobile {
            k.mobile = m;
            if !m {
                k.speed = 0.0;
            }
        }
        if let Some(s) = o.speed {
            k.speed = s;
            if s > 0.0 && o.mobile.is_none() {
                k.mobile = true;
            }
        }
    }
    Ok(nodes)
}

fn lane_y(h: Heading, offset: f64) -> f64 {
    match h {
        Heading::Forward => 0.0,
        Heading::Backward => offset,
    }
}

fn degree(nodes: &[NodeKinematics], i: usize, range: f64) -> usize {
    nodes
        .iter()
        .enumerate()
        .filter(|&(j, k)| j != i && nodes[i].distance_to(k) <= range)
        .count()
}

/// The pair of honest nodes furthest apart on the road, lowest ids on ties.
pub fn farthest_honest_pair(
    nodes: &[NodeKinematics],
    attackers: &BTreeSet<NodeId>,
) -> (NodeId, NodeId) {
    let honest: Vec<&NodeKinematics> = nodes
        .iter()
        .filter(|k| !attackers.contains(&k.node))
        .collect();
    let mut best = (honest[0].node, honest[1].node, -1.0);
    for (i, a) in honest.iter().enumerate() {
        for b in &honest[i + 1..] {
            let d = a.distance_to(b);
            if d > best.2 {
                best = (a.node, b.node, d);
            }
        }
    }
    (best.0, best.1)
}

/// Mutable simulation state: kinematics, per-node trust and Q tables, and
/// HELLO-driven neighbour tables.
pub struct Network {
    pub(crate) cfg: ScenarioConfig,
    pub(crate) nodes: Vec<NodeKinematics>,
    pub(crate) trust: Vec<TrustTable>,
    pub(crate) q: Vec<QTable>,
    /// Last HELLO tick heard from each neighbour.
    pub(crate) heard: Vec<BTreeMap<NodeId, Tick>>,
    pub(crate) profiles: Vec<Option<AttackerProfile>>,
    /// Relay requests each node has received, for packet-count Grayholes.
    pub(crate) relay_requests: Vec<u64>,
    /// Result of the latest per-HELLO evaluation.
    pub(crate) trusted_cache: Vec<BTreeSet<NodeId>>,
    pub(crate) now: Tick,
    pub(crate) streams: Streams,
}

impl Network {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self, SimError> {
        cfg.validate()?;
        let mut streams = Streams::new(cfg.seed);
        let nodes = build_topology(cfg, &mut streams.topology)?;
        let n = cfg.n_nodes;
        let mut profiles = alloc::vec![None; n];
        for a in &cfg.attackers {
            profiles[a.node.index()] = Some(a.clone());
        }
        let mut net = Self {
            cfg: cfg.clone(),
            nodes,
            trust: (0..n as u32).map(|i| TrustTable::new(NodeId(i))).collect(),
            q: (0..n as u32).map(|i| QTable::new(NodeId(i))).collect(),
            heard: alloc::vec![BTreeMap::new(); n],
            profiles,
            relay_requests: alloc::vec![0; n],
            trusted_cache: alloc::vec![BTreeSet::new(); n],
            now: 0,
            streams,
        };
        net.hello()?;
        Ok(net)
    }

    pub fn now(&self) -> Tick {
        self.now
    }

    pub fn nodes(&self) -> &[NodeKinematics] {
        &self.nodes
    }

    pub fn trust_table(&self, node: NodeId) -> &TrustTable {
        &self.trust[node.index()]
    }

    pub fn q_table(&self, node: NodeId) -> &QTable {
        &self.q[node.index()]
    }

    pub fn profile(&self, node: NodeId) -> Option<&AttackerProfile> {
        self.profiles[node.index()].as_ref()
    }

    pub(crate) fn is_attacker(&self, node: NodeId) -> bool {
        self.profiles[node.index()].is_some()
    }

    /// Trust time advances once per HELLO interval.
    pub(crate) fn trust_clock(&self) -> Tick {
        self.now / self.cfg.hello_interval
    }

    pub(crate) fn in_range(&self, a: NodeId, b: NodeId) -> bool {
        self.nodes[a.index()].distance_to(&self.nodes[b.index()]) <= self.cfg.tx_range
    }

    /// Current one-hop neighbours: entries in the HELLO table that are still
    /// within radio range.
    pub(crate) fn one_hop(&self, node: NodeId) -> Vec<NodeId> {
        self.heard[node.index()]
            .keys()
            .copied()
            .filter(|&n| self.in_range(node, n))
            .collect()
    }

    /// Advances one tick, running HELLO processing on interval boundaries.
    pub fn tick(&mut self) -> Result<(), SimError> {
        let road = Some(self.cfg.road_length);
        for k in &mut self.nodes {
            *k = k.step(self.cfg.dt, road);
        }
        self.now += 1;
        if self.now.is_multiple_of(self.cfg.hello_interval) {
            self.hello()?;
        }
        Ok(())
    }

    /// Zeroes every Q entry, network-wide, that routes through `node`.
    pub fn forget_relay(&mut self, node: NodeId) {
        for t in &mut self.q {
            t.reset_neighbour(node);
        }
    }

    /// Asks `relay` to forward a packet and reports what it did.
    pub(crate) fn relay(&mut self, relay: NodeId) -> ForwardDecision {
        let i = relay.index();
        let clock = match self.profiles[i].as_ref().map(|p| p.phase_clock) {
            Some(PhaseClock::PacketCount) => self.relay_requests[i],
            _ => self.now,
        };
        self.relay_requests[i] += 1;
        adversary::forward_decision(
            self.profiles[i].as_ref(),
            clock,
            &mut self.streams.adversary,
        )
    }

    fn hello(&mut self) -> Result<(), SimError> {
        let n = self.nodes.len();
        let now = self.now;
        for i in 0..n {
            let me = NodeId(i as u32);
            for j in 0..n {
                if i != j && self.in_range(me, NodeId(j as u32)) {
                    self.heard[i].insert(NodeId(j as u32), now);
                }
            }
            let timeout = self.cfg.hello_timeout;
            let expired: Vec<NodeId> = self.heard[i]
                .iter()
                .filter(|&(_, &t)| now - t >= timeout)
                .map(|(&k, _)| k)
                .collect();
            for k in expired {
                self.heard[i].remove(&k);
                self.q[i].reset_neighbour(k);
            }
        }

        // Overheard relaying keeps direct trust informed between packets.
        let tclock = self.trust_clock();
        let c = self.cfg.trust.params.c;
        for i in 0..n {
            let me = NodeId(i as u32);
            for j in self.one_hop(me) {
                let (mut fwd, mut drop) = (0, 0);
                for _ in 0..self.cfg.trust.background_packets {
                    match self.relay(j) {
                        ForwardDecision::Forward => fwd += 1,
                        ForwardDecision::Drop => drop += 1,
                    }
                }
                if fwd + drop > 0 {
                    self.trust[i].observe(j, fwd, drop, tclock, c)?;
                }
            }
        }

        if self.cfg.trust_enabled && self.cfg.trust.evaluation == TrustEvaluation::PerHello {
            for i in 0..n {
                let me = NodeId(i as u32);
                self.trusted_cache[i] = self.evaluate_neighbours(me)?;
            }
        }
        Ok(())
    }

    /// Runs the trusted-neighbour algorithm for `owner` over its current
    /// one-hop neighbours.
    pub(crate) fn evaluate_neighbours(
        &mut self,
        owner: NodeId,
    ) -> Result<BTreeSet<NodeId>, SimError> {
        let one_hop = self.one_hop(owner);
        let tclock = self.trust_clock();
        let mut recs = BTreeMap::new();
        for &subject in &one_hop {
            recs.insert(subject, self.recommendations(owner, subject, &one_hop));
        }
        let params = self.cfg.trust.params;
        Ok(self.trust[owner.index()].trusted_neighbour_list(&one_hop, &recs, tclock, &params)?)
    }

    /// One round of recommendations about `subject` from the owner's other
    /// neighbours, in ascending id order.
    ///
    /// A recommender needs its own record of the subject. Its claim follows
    /// its direct trust relative to the threshold; a value exactly at the
    /// threshold carries no evidence. The owner weights each claim by its
    /// own direct trust in the recommender.
    pub(crate) fn recommendations(
        &self,
        owner: NodeId,
        subject: NodeId,
        one_hop: &[NodeId],
    ) -> Vec<MassAssignment> {
        let tclock = self.trust_clock();
        let params = &self.cfg.trust.params;
        let subject_is_attacker = self.is_attacker(subject);
        let mut out = Vec::new();
        for &r in one_hop {
            if r == subject {
                continue;
            }
            let Some(view) = self.trust[r.index()].direct_trust_at(subject, tclock, params.c)
            else {
                continue;
            };
            let weight = self.trust[owner.index()]
                .direct_trust_at(r, tclock, params.c)
                .unwrap_or(0.5);
            let honest = if view > params.threshold {
                MassAssignment::from_claim(weight, Claim::Normal)
            } else if view < params.threshold {
                MassAssignment::from_claim(weight, Claim::Malicious)
            } else {
                MassAssignment::VACUOUS
            };
            out.push(adversary::recommendation(
                self.profiles[r.index()].as_ref(),
                subject,
                subject_is_attacker,
                honest,
                weight,
            ));
        }
        out
    }
}
