use anyhow::{bail, Context, Result};
use ce_sampler::format::{parse_distribution_file, parse_game_file};
use ce_sampler::lp::{solve_ce, CeObjective};
use ce_sampler::protocol::{AdversaryPolicy, Honest, PartyBehavior, PreferenceRule, Scripted, Setup};
use ce_sampler::rational::{format_rational, parse_rational, to_f64};
use ce_sampler::Rational;
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};

pub fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Game, distribution and protocol parameters shared by the protocol commands.
#[derive(Debug, clap::Args)]
pub struct SetupArgs {
    /// Game file (JSON).
    #[arg(long)]
    pub game: PathBuf,

    /// Which correlated equilibrium to sample.
    #[arg(long, default_value = "max-fair")]
    pub objective: CeObjective,

    /// Sample this distribution instead of solving for one.
    #[arg(long, conflicts_with = "objective")]
    pub dist: Option<PathBuf>,

    #[arg(long, value_parser = rational_arg)]
    pub epsilon: Rational,

    #[arg(long, value_parser = rational_arg)]
    pub delta: Rational,

    /// How parties compute their preferred next bit.
    #[arg(long, default_value = "honest-continuation")]
    pub rule: PreferenceRule,
}

impl SetupArgs {
    pub fn load(&self) -> Result<Setup> {
        let game = parse_game_file(&self.game)?;
        let p = match &self.dist {
            Some(path) => parse_distribution_file(path, &game)?,
            None => solve_ce(&game, self.objective)
                .with_context(|| format!("{}: no correlated equilibrium found", self.game.display()))?,
        };
        Ok(Setup::new(&game, &p, self.epsilon.clone(), self.delta.clone(), self.rule)?)
    }

    pub fn echo(&self, setup: &Setup) -> Value {
        json!({
            "game": self.game.display().to_string(),
            "distribution": match &self.dist {
                Some(p) => p.display().to_string(),
                None => self.objective.to_string(),
            },
            "protocol": setup.config().to_json(),
        })
    }
}

/// `honest`, `greedy` or `script:<file>`.
pub fn load_party(spec: &str) -> Result<Box<dyn PartyBehavior>> {
    match spec {
        "honest" => Ok(Box::new(Honest)),
        "greedy" => Ok(Box::new(Scripted::greedy())),
        _ => match spec.strip_prefix("script:") {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("{path}: cannot read policy"))?;
                let policy = AdversaryPolicy::from_json(&text).with_context(|| format!("{path}: invalid policy"))?;
                Ok(Box::new(Scripted::new(policy, format!("script:{path}"))))
            }
            None => bail!("unknown party `{spec}` (expected honest, greedy or script:<file>)"),
        },
    }
}

/// The given seed, or a fresh one that is announced on stderr.
pub fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    })
}

pub fn exact(value: &Rational) -> Value {
    json!({ "exact": format_rational(value), "approx": to_f64(value) })
}

pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("{}: cannot write", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_output(Some(path), &text)
}
