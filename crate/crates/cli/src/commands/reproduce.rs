use anyhow::{bail, Result};
use ce_sampler::acceptance::{criterion_id, Suite, BATTERY_GAMES, BATTERY_SEED, CRITERIA, MC_TRIALS};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Criteria to run, by number or key (e.g. `claim1`); all when omitted.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    only: Vec<String>,

    /// Seed of the random game battery.
    #[arg(long, default_value_t = BATTERY_SEED)]
    seed: u64,

    /// Number of random games in the battery.
    #[arg(long, default_value_t = BATTERY_GAMES)]
    games: usize,

    /// Monte Carlo trials per distribution.
    #[arg(long, default_value_t = MC_TRIALS)]
    trials: u64,
}

pub fn run(args: Args) -> Result<bool> {
    let mut ids = Vec::new();
    for name in &args.only {
        match criterion_id(name) {
            Some(id) if !ids.contains(&id) => ids.push(id),
            Some(_) => {}
            None => {
                let keys: Vec<&str> = CRITERIA.iter().map(|c| c.1).collect();
                bail!("unknown criterion `{name}` (expected 1-10 or one of {})", keys.join(", "));
            }
        }
    }
    if ids.is_empty() {
        ids = CRITERIA.iter().map(|c| c.0).collect();
    }
    ids.sort_unstable();
    let suite = Suite::new(args.seed, args.games, args.trials);
    let mut failed = 0;
    for id in ids.iter().copied() {
        let result = suite.run(id);
        println!("{}", result.line());
        failed += usize::from(!result.passed);
    }
    println!("{} of {} criteria passed", ids.len() - failed, ids.len());
    Ok(failed == 0)
}
