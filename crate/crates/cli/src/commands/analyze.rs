use crate::common::{write_json, SetupArgs};
use anyhow::Result;
use ce_sampler::analysis::{compute_worst_case_q, normalized, verify_claim1};
use ce_sampler::Player;
use std::path::PathBuf;

#[derive(Debug, clap::Args)]
pub struct Args {
    #[command(flatten)]
    setup: SetupArgs,

    /// The deviating player.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    dishonest: u8,

    #[arg(long)]
    report: PathBuf,

    /// Also write the optimal deviation as a policy script.
    #[arg(long)]
    policy_out: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<bool> {
    let setup = args.setup.load()?;
    let j = Player::from_number(args.dishonest).expect("range checked by clap");
    let report = verify_claim1(&setup, j);
    let mut json = report.to_json();
    json["config"] = args.setup.echo(&setup);
    write_json(&args.report, &json)?;
    if let Some(path) = &args.policy_out {
        let norm = normalized(&setup);
        let (_, policy) = compute_worst_case_q(&norm, norm.config().per_round_bias(), j);
        write_json(path, &policy.to_policy().to_json())?;
    }
    let pass = report.all_pass();
    println!(
        "k = {}, final L1 = {}, verdicts {}",
        report.k,
        report.l1_per_round.last().expect("k + 1 entries"),
        if pass { "all pass" } else { "FAIL" }
    );
    Ok(pass)
}
