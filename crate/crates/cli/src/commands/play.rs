use crate::common::{exact, load_party, resolve_seed, write_json, SetupArgs};
use anyhow::Result;
use ce_sampler::analysis::{
    compute_ph, exact_extended_payoffs, normalized, optimize_adversary, payoff, AnnouncementClass, Goal,
};
use ce_sampler::extended::play_extended_game;
use ce_sampler::montecarlo::mean_and_half_width;
use ce_sampler::rational::{format_rational, to_f64};
use ce_sampler::rng::Stream;
use ce_sampler::{JointStrategy, Player};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Debug, clap::Args)]
pub struct Args {
    #[command(flatten)]
    setup: SetupArgs,

    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,

    #[arg(long)]
    seed: Option<u64>,

    /// honest, greedy or script:<file>
    #[arg(long, default_value = "honest")]
    party1: String,

    #[arg(long, default_value = "honest")]
    party2: String,

    #[arg(long)]
    report: PathBuf,
}

pub fn run(args: Args) -> Result<bool> {
    let setup = args.setup.load()?;
    let boxed = [load_party(&args.party1)?, load_party(&args.party2)?];
    let parties = [&*boxed[0], &*boxed[1]];
    let seed = resolve_seed(args.seed);
    let game = setup.game();
    let labels = |s: JointStrategy| json!([game.labels(Player::One)[s.s1], game.labels(Player::Two)[s.s2]]);

    let runs: Vec<_> = (0..args.trials)
        .into_par_iter()
        .map(|t| play_extended_game(&setup, parties, &mut Stream::new(seed, t)))
        .collect();
    let summaries: Vec<Value> = runs
        .iter()
        .enumerate()
        .map(|(t, (o, tr))| {
            json!({
                "trial": t,
                "ell": tr.ell[0].to_string(),
                "output": tr.output().map(labels),
                "stage2": labels(o.stage2),
                "checks": o.checks,
                "payoffs": o.payoffs.iter().map(format_rational).collect::<Vec<_>>(),
            })
        })
        .collect();

    let exact_pay = exact_extended_payoffs(&setup, parties);
    let empirical: Vec<Value> = Player::BOTH
        .iter()
        .map(|&p| {
            let (mean, hw) = mean_and_half_width(runs.iter().map(|(o, _)| to_f64(&o.payoffs[p.index()])));
            let target = to_f64(&exact_pay[p.index()]);
            json!({
                "player": p.number(),
                "mean": mean,
                "half_width": hw,
                "exact_in_interval": (mean - target).abs() <= hw,
            })
        })
        .collect();

    // verdicts compare payoffs on the normalized game
    let norm = normalized(&setup);
    let eps = norm.config().epsilon().clone();
    let eps_p = norm.config().per_round_bias().clone();
    let p_h = compute_ph(&norm);
    let norm_pay = exact_extended_payoffs(&norm, parties);
    let verdicts: Vec<Value> = Player::BOTH
        .iter()
        .map(|&p| {
            let honest = payoff(&norm, &p_h, p);
            let gain = &norm_pay[p.index()] - &honest;
            let best =
                optimize_adversary(&norm, &eps_p, p, Goal::OwnPayoff { stage_two: true }, AnnouncementClass::Arbitrary);
            let best_gain = &best.value - &honest;
            json!({
                "player": p.number(),
                "honest_payoff": exact(&honest),
                "profile_payoff": exact(&norm_pay[p.index()]),
                "gain": exact(&gain),
                "gain_within_epsilon": gain <= eps,
                "best_deviation_gain": exact(&best_gain),
                "epsilon_nash": best_gain <= eps,
            })
        })
        .collect();

    let report = json!({
        "config": args.setup.echo(&setup),
        "parties": [parties[0].name(), parties[1].name()],
        "seed": seed,
        "trials": args.trials,
        "empirical_payoffs": empirical,
        "exact_payoffs": exact_pay.iter().map(exact).collect::<Vec<_>>(),
        "verdicts": verdicts,
        "per_trial": summaries,
    });
    write_json(&args.report, &report)?;
    for p in Player::BOTH {
        let e = &report["empirical_payoffs"][p.index()];
        println!(
            "player {}: mean payoff {:.4} +- {:.4}, exact {}",
            p.number(),
            e["mean"].as_f64().unwrap_or(f64::NAN),
            e["half_width"].as_f64().unwrap_or(f64::NAN),
            format_rational(&exact_pay[p.index()])
        );
    }
    Ok(true)
}
