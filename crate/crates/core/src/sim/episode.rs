use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::config::TrustEvaluation;
use super::metrics::{DropCause, EpisodeRecord};
use super::network::Network;
use super::SimError;
use crate::adversary::{self, ForwardDecision};
use crate::mobility::link_life;
use crate::qrouting::learning_rate;
use crate::NodeId;

impl Network {
    /// Candidate relays for `cur`: neighbours in range that are not already
    /// on the path, filtered by trust when enabled.
    fn relay_candidates(
        &mut self,
        cur: NodeId,
        path: &[NodeId],
    ) -> Result<BTreeSet<NodeId>, SimError> {
        let trusted = if !self.cfg.trust_enabled {
            self.one_hop(cur).into_iter().collect()
        } else {
            match self.cfg.trust.evaluation {
                TrustEvaluation::PerHop => self.evaluate_neighbours(cur)?,
                TrustEvaluation::PerHello => self.trusted_cache[cur.index()]
                    .iter()
                    .copied()
                    .filter(|&n| self.in_range(cur, n))
                    .collect(),
            }
        };
        Ok(trusted.into_iter().filter(|n| !path.contains(n)).collect())
    }

    /// Best Q `node` can offer toward `dest` over trusted neighbours not on
    /// the path, as it would report it upstream.
    fn advertised_max(&self, node: NodeId, dest: NodeId, path: &[NodeId]) -> f64 {
        let threshold = self.cfg.trust.params.threshold;
        let table = &self.trust[node.index()];
        let downstream: Vec<NodeId> = self
            .one_hop(node)
            .into_iter()
            .filter(|n| !path.contains(n))
            .filter(|&n| {
                !self.cfg.trust_enabled || table.get(n).is_some_and(|r| r.total > threshold)
            })
            .collect();
        let true_max = self.q[node.index()].max_q(dest, &downstream);
        let cap = self.cfg.max_link_life;
        let ceiling = cap * (self.cfg.n_nodes as f64 - 1.0);
        adversary::advertise_q(self.profile(node), true_max, cap).min(ceiling)
    }

    /// Routes one packet from `source` toward `dest`, learning as it goes.
    pub fn run_episode(
        &mut self,
        episode: usize,
        source: NodeId,
        dest: NodeId,
        epsilon: f64,
    ) -> Result<EpisodeRecord, SimError> {
        let ttl = self.cfg.n_nodes;
        let mut rec = EpisodeRecord {
            episode,
            tick: self.now,
            epsilon,
            path: alloc::vec![source],
            drop_cause: None,
            reward: 0.0,
            hop_trust: Vec::new(),
            max_q_delta: 0.0,
        };
        let mut cur = source;
        loop {
            if rec.hops() >= ttl {
                rec.drop_cause = Some(DropCause::TtlExceeded);
                break;
            }
            let candidates = self.relay_candidates(cur, &rec.path)?;
            let Some(next) = self.q[cur.index()].select_next_hop(
                dest,
                &candidates,
                &mut self.streams.explore,
                epsilon,
            ) else {
                rec.drop_cause = Some(DropCause::NoTrustedNeighbour);
                break;
            };
            rec.hop_trust
                .push(self.trust[cur.index()].get(next).map_or(0.5, |r| r.total));

            let (a, b) = (&self.nodes[cur.index()], &self.nodes[next.index()]);
            let reward = link_life(a, b, self.cfg.tx_range, self.cfg.max_link_life).unwrap_or(0.0);
            let lambda = learning_rate(a.velocity(), b.velocity(), &self.cfg.learning);
            rec.reward += reward;

            let decision = if next == dest {
                ForwardDecision::Forward
            } else {
                self.relay(next)
            };
            rec.path.push(next);
            let max_next = if next == dest {
                0.0
            } else {
                self.advertised_max(next, dest, &rec.path)
            };
            let table = &mut self.q[cur.index()];
            let before = table.q(dest, next);
            let after = table.update(
                dest,
                next,
                reward,
                max_next,
                lambda,
                self.cfg.learning.gamma,
            )?;
            rec.max_q_delta = rec.max_q_delta.max((after - before).abs());

            if next != dest {
                let (fwd, drop) = match decision {
                    ForwardDecision::Forward => (1, 0),
                    ForwardDecision::Drop => (0, 1),
                };
                let tclock = self.trust_clock();
                let c = self.cfg.trust.params.c;
                self.trust[cur.index()].observe(next, fwd, drop, tclock, c)?;
            }
            if decision == ForwardDecision::Drop {
                rec.drop_cause = Some(DropCause::AttackerDrop);
                break;
            }
            if next == dest {
                break;
            }
            cur = next;
        }
        Ok(rec)
    }
}
