use crate::common::{load_party, resolve_seed, write_output, SetupArgs};
use anyhow::Result;
use ce_sampler::extended::play_extended_game;
use ce_sampler::rng::Stream;
use rayon::prelude::*;
use std::path::PathBuf;

#[derive(Debug, clap::Args)]
pub struct Args {
    #[command(flatten)]
    setup: SetupArgs,

    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,

    #[arg(long)]
    seed: Option<u64>,

    /// honest, greedy or script:<file>
    #[arg(long, default_value = "honest")]
    party1: String,

    #[arg(long, default_value = "honest")]
    party2: String,

    /// Transcript file (JSON lines); stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<bool> {
    let setup = args.setup.load()?;
    let parties = [load_party(&args.party1)?, load_party(&args.party2)?];
    let seed = resolve_seed(args.seed);
    let logs: Vec<String> = (0..args.trials)
        .into_par_iter()
        .map(|t| {
            let (outcome, transcript) =
                play_extended_game(&setup, [&*parties[0], &*parties[1]], &mut Stream::new(seed, t));
            transcript.to_json_lines(setup.game(), Some(&outcome.payoffs))
        })
        .collect();
    write_output(args.out.as_deref(), &logs.concat())?;
    if let Some(out) = &args.out {
        println!("wrote {} trial(s) to {} (k = {})", args.trials, out.display(), setup.k());
    }
    Ok(true)
}
