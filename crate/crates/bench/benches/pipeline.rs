use ce_sampler::analysis::{compute_ph, optimize_adversary, AnnouncementClass, Goal};
use ce_sampler::emulation::MultisetEmulation;
use ce_sampler::lp::{solve_ce, CeObjective};
use ce_sampler::montecarlo::output_counts;
use ce_sampler::protocol::{run_trial, Honest, Scripted};
use ce_sampler::rational::frac;
use ce_sampler::Player;
use ce_sampler_bench::{bos_setup, random_instance, setup_for};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_ce");
    for seed in [1u64, 2, 3] {
        let (game, _) = random_instance(seed);
        let id = format!("{}x{}", game.rows(), game.cols());
        for objective in [CeObjective::MaxFair, CeObjective::MaxTotalLex] {
            group.bench_with_input(BenchmarkId::new(objective.to_string(), format!("{id}/{seed}")), &game, |b, g| {
                b.iter(|| solve_ce(black_box(g), objective).unwrap())
            });
        }
    }
    group.finish();
}

fn emulate(c: &mut Criterion) {
    let (_, p) = random_instance(4);
    let mut group = c.benchmark_group("emulate");
    for delta_den in [2i64, 16, 128] {
        group.bench_with_input(BenchmarkId::from_parameter(delta_den), &delta_den, |b, &d| {
            b.iter(|| MultisetEmulation::new(black_box(&p), &frac(1, d)).unwrap())
        });
    }
    group.finish();
}

fn adversary(c: &mut Criterion) {
    let (game, p) = random_instance(5);
    let mut group = c.benchmark_group("adversary_dp");
    for delta_den in [2i64, 8, 32] {
        let setup = setup_for(&game, &p, delta_den);
        let eps_p = setup.config().per_round_bias().clone();
        group.bench_function(BenchmarkId::new("k", setup.k()), |b| {
            b.iter(|| {
                optimize_adversary(
                    &setup,
                    &eps_p,
                    Player::One,
                    Goal::OwnPayoff { stage_two: true },
                    AnnouncementClass::Arbitrary,
                )
            })
        });
        group.bench_function(BenchmarkId::new("p_h/k", setup.k()), |b| b.iter(|| compute_ph(black_box(&setup))));
    }
    group.finish();
}

fn protocol(c: &mut Criterion) {
    let setup = bos_setup(8);
    let greedy = Scripted::greedy();
    let mut group = c.benchmark_group("protocol");
    group.bench_function("honest_run", |b| {
        let mut t = 0;
        b.iter(|| {
            t += 1;
            run_trial(&setup, [&Honest, &Honest], 1, t)
        })
    });
    group.bench_function("greedy_run", |b| {
        let mut t = 0;
        b.iter(|| {
            t += 1;
            run_trial(&setup, [&greedy, &Honest], 1, t)
        })
    });
    group.sample_size(10);
    group.bench_function("10k_trials", |b| b.iter(|| output_counts(&setup, [&Honest, &Honest], 2, 10_000)));
    group.finish();
}

criterion_group!(benches, solve, emulate, adversary, protocol);
criterion_main!(benches);
