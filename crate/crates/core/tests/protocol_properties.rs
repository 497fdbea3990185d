use ce_sampler::analysis::{
    compute_ph, exact_extended_payoffs, exact_output_distribution, payoff, policy_distribution, AdversaryPolicyExact,
};
use ce_sampler::battery::{random_ce, random_game};
use ce_sampler::emulation::{BitPrefix, MultisetEmulation};
use ce_sampler::extended::{augmented_normal_form, play_extended_game, Check};
use ce_sampler::montecarlo::{output_counts, payoff_stats, play_many};
use ce_sampler::protocol::{
    compute_preference, run_trial, Honest, MessageKind, PartyBehavior, PreferenceRule, PreferenceTable, Resolution,
    Scripted, Setup,
};
use ce_sampler::rational::{frac, half, int, to_f64};
use ce_sampler::rng::Stream;
use ce_sampler::{Game, JointDistribution, JointStrategy, Player};
use proptest::prelude::*;

fn instance(seed: u64, delta_den: i64) -> Setup {
    let mut rng = Stream::new(seed, 0);
    let game = random_game(&mut rng);
    let p = random_ce(&game, &mut rng).unwrap();
    Setup::new(&game.normalize(), &p, frac(1, 10), frac(1, delta_den), PreferenceRule::default()).unwrap()
}

fn bos_uniform() -> Setup {
    let g = Game::battle_of_the_sexes();
    Setup::new(&g, &JointDistribution::uniform(&g), frac(1, 10), half(), PreferenceRule::default()).unwrap()
}

#[test]
fn empirical_outputs_track_exact_distribution() {
    // small tables only, so every leaf gets plenty of samples
    let trials = 200_000u64;
    for (seed, delta_den) in [(1u64, 2i64), (5, 4), (9, 1)] {
        let s = instance(seed, delta_den);
        if s.k() > 4 {
            continue;
        }
        let bound = 4.0 * ((1u64 << s.k()) as f64 / trials as f64).sqrt();
        for (parties, exact) in [
            ([&Honest as &dyn PartyBehavior, &Honest], compute_ph(&s)),
            ([&Scripted::greedy() as &dyn PartyBehavior, &Honest], {
                let greedy = AdversaryPolicyExact::truthful(&s, Player::One, s.config().max_win_probability());
                policy_distribution(&s, &greedy, s.config().per_round_bias())
            }),
        ] {
            let counts = output_counts(&s, parties, seed, trials);
            let l1: f64 =
                counts.iter().zip(exact.probs()).map(|(&c, p)| (c as f64 / trials as f64 - to_f64(p)).abs()).sum();
            assert!(l1 <= bound, "seed {seed}: l1 {l1} above {bound}");
        }
    }
}

#[test]
fn extended_game_payoffs() {
    let s = bos_uniform();
    let honest = play_many(&s, [&Honest, &Honest], 3, 20_000);
    assert!(honest.iter().all(|o| o.checks == [Check::Accept, Check::Accept]));
    let expected = payoff(&s, &compute_ph(&s), Player::One);
    let (mean, hw) = payoff_stats(&honest, 0);
    assert!((mean - to_f64(&expected)).abs() <= hw * 1.5 + 1e-9);

    // deviating in stage two is always caught
    let policy = ce_sampler::protocol::AdversaryPolicy::from_json(
        r#"{"default":{"announce":"truthful","request":"honest"},"stage2":{"play":1}}"#,
    )
    .unwrap();
    let deviant = Scripted::new(policy, "deviant");
    let exact = exact_extended_payoffs(&s, [&deviant, &Honest]);
    let sampled = play_many(&s, [&deviant, &Honest], 8, 20_000);
    for (i, e) in exact.iter().enumerate() {
        let (mean, hw) = payoff_stats(&sampled, i);
        assert!((mean - to_f64(e)).abs() <= 2.0 * hw, "player {}: {mean} vs {e}", i + 1);
    }
    assert_eq!(exact_extended_payoffs(&s, [&Honest, &Honest]), Player::BOTH.map(|p| payoff(&s, &compute_ph(&s), p)));
    for t in 0..200 {
        let (o, tr) = play_extended_game(&s, [&deviant, &Honest], &mut Stream::new(4, t));
        if tr.outputs[0].s1 != 1 {
            assert_eq!(o.checks[1], Check::Reject);
            assert_eq!(o.payoffs, [int(0), int(0)]);
        }
    }
}

#[test]
fn augmented_game_shape() {
    let g = Game::battle_of_the_sexes();
    let aug = augmented_normal_form(&g).unwrap();
    assert_eq!((aug.rows(), aug.cols()), (4, 4));
    assert_eq!(aug.labels(Player::One)[0], "(A,Accept)");
    let both_accept = JointStrategy::new(0, 0);
    assert_eq!(aug.utility(Player::One, both_accept), g.utility(Player::One, JointStrategy::new(0, 0)));
    assert_eq!(aug.utility(Player::Two, JointStrategy::new(2, 0)), &int(0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn honest_runs_agree(seed in 0u64..10_000, delta_den in prop::sample::select(vec![2i64, 4, 8]), trial in 0u64..1000) {
        let s = instance(seed, delta_den);
        let tr = run_trial(&s, [&Honest, &Honest], seed, trial);
        prop_assert_eq!(tr.rounds.len(), s.k());
        prop_assert_eq!(tr.ell[0], tr.ell[1]);
        prop_assert!(tr.output().is_some());
        prop_assert_eq!(tr.messages.len(), 4 * s.k());
        prop_assert!(compute_ph(&s).prob(tr.ell[0].value()) > &int(0));
        for (r, record) in tr.rounds.iter().enumerate() {
            prop_assert_eq!(record.round, r + 1);
            prop_assert_eq!(record.coins[0], record.coins[1]);
            if record.resolution == Resolution::Agreed {
                prop_assert_eq!(record.coins[0], record.announced[0].preferred_bit());
            }
        }
        for pair in tr.messages.chunks(4) {
            let is_preference = |m: &ce_sampler::protocol::Message| matches!(m.kind, MessageKind::Preference { .. });
            prop_assert!(is_preference(&pair[0]) && is_preference(&pair[1]));
        }
        prop_assert_eq!(s.config().per_round_bias(), &(s.config().epsilon() / int(2 * s.k() as i64)));
    }

    #[test]
    fn table_matches_direct_computation(seed in 0u64..10_000, block_mean in any::<bool>()) {
        let s = instance(seed, 4);
        let rule = if block_mean { PreferenceRule::BlockMean } else { PreferenceRule::HonestContinuation };
        let table = PreferenceTable::build(s.emulation(), s.game(), rule);
        for len in 0..s.k() {
            for v in 0..1u64 << len {
                let prefix = BitPrefix::from_value(v, len);
                for p in Player::BOTH {
                    prop_assert_eq!(table.sign(prefix, p), compute_preference(s.emulation(), s.game(), prefix, p, rule));
                }
            }
        }
    }

    #[test]
    fn emulation_rounds_and_error(seed in 0u64..10_000, delta_den in prop::sample::select(vec![1i64, 2, 3, 8, 20])) {
        let mut rng = Stream::new(seed, 1);
        let game = random_game(&mut rng);
        let p = random_ce(&game, &mut rng).unwrap();
        let delta = frac(1, delta_den);
        let em = MultisetEmulation::new(&p, &delta).unwrap();
        let cells = game.num_cells() as i64;
        let k = em.k() as u32;
        // least k with 2^k >= |S| / delta
        prop_assert!(int(1i64 << k) >= int(cells) / &delta);
        prop_assert!(k == 1 || int(1i64 << (k - 1)) < int(cells) / &delta);
        prop_assert_eq!(em.table().len(), 1usize << k);
        prop_assert_eq!(em.counts().iter().sum::<u64>(), 1u64 << k);
        prop_assert!(em.approximation_error() <= delta);
    }

    #[test]
    fn exact_distribution_for_honest_pairs(seed in 0u64..10_000) {
        let s = instance(seed, 2);
        let q = exact_output_distribution(&s, [&Honest, &Honest]);
        prop_assert_eq!(q, compute_ph(&s));
    }
}
