use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::trust::evidence::{indirect_trust, MassAssignment};
use crate::trust::{InteractionCounters, TrustError, TrustParams};
use crate::{NodeId, Tick};

/// Trust one node holds about one neighbour.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrustRecord {
    pub subject: NodeId,
    pub direct: f64,
    pub indirect: f64,
    pub confidence: f64,
    pub total: f64,
    pub counters: InteractionCounters,
}

impl TrustRecord {
    pub fn fresh(subject: NodeId, now: Tick) -> Self {
        let counters = InteractionCounters::new(now);
        let direct = counters.direct_trust();
        Self {
            subject,
            direct,
            indirect: 0.5,
            confidence: counters.confidence(),
            total: direct,
            counters,
        }
    }
}

/// Confidence-weighted mix of direct and indirect trust.
pub fn total_trust(direct: f64, indirect: f64, confidence: f64) -> f64 {
    confidence * direct + (1.0 - confidence) * indirect
}

/// Everything one node knows about the trustworthiness of others.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustTable {
    owner: NodeId,
    entries: BTreeMap<NodeId, TrustRecord>,
}

impl TrustTable {
    pub fn new(owner: NodeId) -> Self {
        Self {
            owner,
            entries: BTreeMap::new(),
        }
    }

    pub fn owner(&self) -> NodeId {
        self.owner
    }

    pub fn get(&self, subject: NodeId) -> Option<&TrustRecord> {
        self.entries.get(&subject)
    }

    pub fn records(&self) -> impl Iterator<Item = &TrustRecord> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn entry(&mut self, subject: NodeId, now: Tick) -> Result<&mut TrustRecord, TrustError> {
        if subject == self.owner {
            return Err(TrustError::SelfReference(subject));
        }
        Ok(self
            .entries
            .entry(subject)
            .or_insert_with(|| TrustRecord::fresh(subject, now)))
    }

    /// Adds forwarding observations about `subject`, decaying the existing
    /// counts to `now` first.
    pub fn observe(
        &mut self,
        subject: NodeId,
        forwarded: u32,
        dropped: u32,
        now: Tick,
        c: f64,
    ) -> Result<(), TrustError> {
        let rec = self.entry(subject, now)?;
        rec.counters = rec.counters.decay(now, c)?.record(forwarded, dropped);
        Ok(())
    }

    /// Direct trust in `subject` as of `now`, without touching the table.
    /// `None` if the subject was never observed.
    pub fn direct_trust_at(&self, subject: NodeId, now: Tick, c: f64) -> Option<f64> {
        let rec = self.entries.get(&subject)?;
        let counters = rec
            .counters
            .decay(now.max(rec.counters.last_update()), c)
            .ok()?;
        Some(counters.direct_trust())
    }

    /// Re-evaluates one neighbour: decay, confidence, direct, indirect and
    /// total trust. Creates a fresh record for unseen neighbours.
    pub fn evaluate(
        &mut self,
        subject: NodeId,
        recommendations: &[MassAssignment],
        now: Tick,
        params: &TrustParams,
    ) -> Result<TrustRecord, TrustError> {
        let rec = self.entry(subject, now)?;
        rec.counters = rec.counters.decay(now, params.c)?;
        rec.confidence = rec.counters.confidence();
        rec.direct = rec.counters.direct_trust();
        rec.indirect = indirect_trust(recommendations, params.fusion_rule);
        rec.total = total_trust(rec.direct, rec.indirect, rec.confidence);
        Ok(*rec)
    }

    /// Builds the trusted neighbour set: every one-hop neighbour whose total
    /// trust is strictly above the threshold. Records are updated in place.
    pub fn trusted_neighbour_list(
        &mut self,
        one_hop: &[NodeId],
        recommendations: &BTreeMap<NodeId, Vec<MassAssignment>>,
        now: Tick,
        params: &TrustParams,
    ) -> Result<BTreeSet<NodeId>, TrustError> {
        let mut trusted = BTreeSet::new();
        for &n in one_hop {
            let recs = recommendations.get(&n).map(Vec::as_slice).unwrap_or(&[]);
            let rec = self.evaluate(n, recs, now, params)?;
            if rec.total > params.threshold {
                trusted.insert(n);
            }
        }
        Ok(trusted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trust::evidence::Claim;
    use crate::trust::FusionRule;
    use approx::assert_relative_eq;

    fn params(threshold: f64) -> TrustParams {
        TrustParams {
            c: 0.9,
            threshold,
            fusion_rule: FusionRule::Normalized,
        }
    }

    #[test]
    fn total_trust_examples() {
        assert_relative_eq!(total_trust(0.9, 0.1, 1.0), 0.9);
        assert_relative_eq!(total_trust(0.9, 0.1, 0.0), 0.1);
        assert_relative_eq!(total_trust(0.8, 0.4, 0.25), 0.5);
    }

    #[test]
    fn heavy_dropper_is_excluded() {
        let mut t = TrustTable::new(NodeId(0));
        t.observe(NodeId(1), 0, 10, 0, 0.9).unwrap();
        let trusted = t
            .trusted_neighbour_list(&[NodeId(1)], &BTreeMap::new(), 0, &params(0.5))
            .unwrap();
        assert!(trusted.is_empty());
        let rec = t.get(NodeId(1)).unwrap();
        // rho = 12*11/(144*13)
        assert_relative_eq!(rec.confidence, 132.0 / 1872.0, epsilon = 1e-12);
        let expected = rec.confidence / 12.0 + (1.0 - rec.confidence) * 0.5;
        assert_relative_eq!(rec.total, expected, epsilon = 1e-12);
        assert_relative_eq!(rec.total, 0.4706197, epsilon = 1e-6);
    }

    #[test]
    fn fresh_neighbour_sits_on_the_threshold_and_is_excluded() {
        let mut t = TrustTable::new(NodeId(0));
        let trusted = t
            .trusted_neighbour_list(&[NodeId(4)], &BTreeMap::new(), 3, &params(0.5))
            .unwrap();
        assert!(trusted.is_empty());
        let rec = t.get(NodeId(4)).unwrap();
        assert_eq!(rec.total, 0.5);
        assert_eq!(rec.confidence, 1.0);
    }

    #[test]
    fn perfect_forwarder_with_good_references_is_trusted() {
        let mut t = TrustTable::new(NodeId(0));
        t.observe(NodeId(1), 20, 0, 0, 0.9).unwrap();
        let mut recs = BTreeMap::new();
        recs.insert(
            NodeId(1),
            alloc::vec![
                MassAssignment::from_claim(0.9, Claim::Normal),
                MassAssignment::from_claim(0.9, Claim::Normal),
            ],
        );
        let trusted = t
            .trusted_neighbour_list(&[NodeId(1)], &recs, 0, &params(0.5))
            .unwrap();
        assert!(trusted.contains(&NodeId(1)));
        let rec = t.get(NodeId(1)).unwrap();
        assert_relative_eq!(rec.direct, 21.0 / 22.0, epsilon = 1e-12);
        assert_relative_eq!(
            rec.confidence,
            12.0 * 21.0 / (484.0 * 23.0),
            epsilon = 1e-12
        );
        assert_relative_eq!(rec.indirect, 0.99, epsilon = 1e-12);
        assert!(rec.total > 0.93);
    }

    #[test]
    fn owner_never_appears_in_its_table() {
        let mut t = TrustTable::new(NodeId(2));
        assert_eq!(
            t.observe(NodeId(2), 1, 0, 0, 0.9),
            Err(TrustError::SelfReference(NodeId(2)))
        );
        assert!(t.is_empty());
    }

    #[test]
    fn evaluation_decays_to_now() {
        let mut t = TrustTable::new(NodeId(0));
        t.observe(NodeId(1), 9, 0, 0, 0.9).unwrap();
        let rec = t.evaluate(NodeId(1), &[], 2, &params(0.5)).unwrap();
        assert_relative_eq!(rec.counters.alpha(), 10.0 * 0.81, epsilon = 1e-12);
        assert_eq!(rec.counters.last_update(), 2);
        assert_relative_eq!(rec.direct, 10.0 / 11.0, epsilon = 1e-12);
    }

    #[test]
    fn direct_trust_at_is_read_only() {
        let mut t = TrustTable::new(NodeId(0));
        t.observe(NodeId(1), 3, 1, 0, 0.9).unwrap();
        let before = t.clone();
        assert_relative_eq!(
            t.direct_trust_at(NodeId(1), 50, 0.9).unwrap(),
            4.0 / 6.0,
            epsilon = 1e-9
        );
        assert_eq!(t, before);
        assert_eq!(t.direct_trust_at(NodeId(7), 50, 0.9), None);
    }
}
