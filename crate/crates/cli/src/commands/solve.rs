use crate::common::write_output;
use anyhow::Result;
use ce_sampler::format::{distribution_to_json, parse_game_file};
use ce_sampler::game::expected_utility;
use ce_sampler::lp::{solve_ce, CeObjective};
use ce_sampler::rational::format_rational;
use ce_sampler::Player;
use std::path::PathBuf;

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long)]
    game: PathBuf,

    #[arg(long, default_value = "max-fair")]
    objective: CeObjective,

    /// Distribution file to write; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<bool> {
    let game = parse_game_file(&args.game)?;
    let p = solve_ce(&game, args.objective)?;
    let mut text = serde_json::to_string_pretty(&distribution_to_json(&p))?;
    text.push('\n');
    write_output(args.out.as_deref(), &text)?;
    if let Some(out) = &args.out {
        let [u1, u2] = Player::BOTH.map(|i| format_rational(&expected_utility(&game, &p, i)));
        println!("wrote {} (expected payoffs {u1}, {u2})", out.display());
    }
    Ok(true)
}
