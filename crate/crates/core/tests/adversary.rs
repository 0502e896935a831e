use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trustroute::adversary::{
    forward_decision, AttackKind, AttackerProfile, ForwardDecision, PhaseClock,
};
use trustroute::NodeId;

fn drop_fraction(p: &AttackerProfile, n: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let drops = (0..n)
        .filter(|&t| forward_decision(Some(p), t, &mut rng) == ForwardDecision::Drop)
        .count();
    drops as f64 / n as f64
}

#[test]
fn grayhole_long_run_drop_rate_is_duty_times_probability() {
    for (duty, prob) in [(0.5, 1.0), (0.3, 0.6), (0.8, 0.25)] {
        let mut g = AttackerProfile::new(NodeId(2), AttackKind::Grayhole);
        g.grayhole_duty = duty;
        g.grayhole_drop_prob = prob;
        let f = drop_fraction(&g, 100_000);
        assert!(
            (f - duty * prob).abs() < 0.02,
            "duty {duty} prob {prob}: {f}"
        );
    }
}

#[test]
fn packet_clock_follows_the_counter_not_time() {
    let mut g = AttackerProfile::new(NodeId(2), AttackKind::Grayhole);
    g.phase_clock = PhaseClock::PacketCount;
    g.grayhole_period = 10;
    assert!(g.in_drop_phase(3));
    assert!(!g.in_drop_phase(7));
}
