//! JSON file formats for games and distributions.
//!
//! ```json
//! { "strategies": [["A","B"],["A","B"]],
//!   "u1": [["4","0"],["0","2"]],
//!   "u2": [["2","0"],["0","4"]] }
//! ```
//!
//! Distributions are `{ "probs": { "0,0": "1/2", "1,1": "1/2" } }` keyed by
//! `row,col`. Cells absent from the map have probability zero.

use crate::game::{Game, JointDistribution, JointStrategy};
use crate::rational::{format_rational, parse_rational, Rational};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: file not found")]
    MissingFile { path: PathBuf },

    #[error("{path}: cannot read file: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}:{line}:{column}: malformed JSON: {message}")]
    MalformedJson { path: PathBuf, line: usize, column: usize, message: String },

    #[error("{path}: dimension mismatch in `{field}`: {detail}")]
    DimensionMismatch { path: PathBuf, field: String, detail: String },

    #[error("{path}: `{field}` holds `{value}`, which is not a rational number")]
    NonRationalEntry { path: PathBuf, field: String, value: String },

    #[error("{path}: invalid distribution: {detail}")]
    InvalidDistribution { path: PathBuf, detail: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GameFile {
    strategies: Vec<Vec<String>>,
    u1: Vec<Vec<Value>>,
    u2: Vec<Vec<Value>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DistributionFile {
    probs: BTreeMap<String, String>,
}

fn read(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            FormatError::MissingFile { path: path.to_path_buf() }
        } else {
            FormatError::Io { path: path.to_path_buf(), source }
        }
    })
}

fn malformed(path: &Path, e: serde_json::Error) -> FormatError {
    FormatError::MalformedJson { path: path.to_path_buf(), line: e.line(), column: e.column(), message: e.to_string() }
}

fn entry_to_rational(path: &Path, field: String, value: &Value) -> Result<Rational, FormatError> {
    let text = match value {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => other.to_string(),
    };
    parse_rational(&text).map_err(|_| FormatError::NonRationalEntry { path: path.to_path_buf(), field, value: text })
}

pub fn parse_game_file(path: impl AsRef<Path>) -> Result<Game, FormatError> {
    let path = path.as_ref();
    parse_game_str(&read(path)?, path)
}

/// Parses game JSON; `origin` is only used in error messages.
pub fn parse_game_str(text: &str, origin: &Path) -> Result<Game, FormatError> {
    let file: GameFile = serde_json::from_str(text).map_err(|e| malformed(origin, e))?;
    let mismatch = |field: &str, detail: String| FormatError::DimensionMismatch {
        path: origin.to_path_buf(),
        field: field.to_string(),
        detail,
    };
    if file.strategies.len() != 2 {
        return Err(mismatch("strategies", format!("expected 2 players, found {}", file.strategies.len())));
    }
    let rows = file.strategies[0].len();
    let cols = file.strategies[1].len();
    if rows == 0 || cols == 0 {
        return Err(mismatch("strategies", "each player needs at least one strategy".into()));
    }
    let matrix = |name: &str, m: &[Vec<Value>]| -> Result<Vec<Vec<Rational>>, FormatError> {
        if m.len() != rows {
            return Err(mismatch(name, format!("expected {rows} rows, found {}", m.len())));
        }
        m.iter()
            .enumerate()
            .map(|(r, row)| {
                if row.len() != cols {
                    return Err(mismatch(
                        &format!("{name}[{r}]"),
                        format!("expected {cols} entries, found {}", row.len()),
                    ));
                }
                row.iter().enumerate().map(|(c, v)| entry_to_rational(origin, format!("{name}[{r}][{c}]"), v)).collect()
            })
            .collect()
    };
    let u1 = matrix("u1", &file.u1)?;
    let u2 = matrix("u2", &file.u2)?;
    let [l1, l2]: [Vec<String>; 2] = file.strategies.try_into().expect("length checked");
    Game::new(l1, l2, u1, u2).map_err(|e| mismatch("game", e.to_string()))
}

pub fn game_to_json(game: &Game) -> Value {
    use crate::game::Player;
    let matrix = |p: Player| -> Vec<Vec<String>> {
        game.utility_matrix(p).iter().map(|r| r.iter().map(format_rational).collect()).collect()
    };
    serde_json::json!({
        "strategies": [game.labels(Player::One), game.labels(Player::Two)],
        "u1": matrix(Player::One),
        "u2": matrix(Player::Two),
    })
}

pub fn parse_distribution_file(path: impl AsRef<Path>, game: &Game) -> Result<JointDistribution, FormatError> {
    let path = path.as_ref();
    parse_distribution_str(&read(path)?, path, game)
}

pub fn parse_distribution_str(text: &str, origin: &Path, game: &Game) -> Result<JointDistribution, FormatError> {
    let file: DistributionFile = serde_json::from_str(text).map_err(|e| malformed(origin, e))?;
    let invalid = |detail: String| FormatError::InvalidDistribution { path: origin.to_path_buf(), detail };
    let mut probs = vec![Rational::zero(); game.num_cells()];
    for (key, value) in &file.probs {
        let s = parse_cell_key(key).ok_or_else(|| invalid(format!("bad joint-strategy key `{key}`")))?;
        if !game.contains(s) {
            return Err(invalid(format!("joint strategy `{key}` outside the game")));
        }
        let p = parse_rational(value).map_err(|_| FormatError::NonRationalEntry {
            path: origin.to_path_buf(),
            field: format!("probs.{key}"),
            value: value.clone(),
        })?;
        probs[game.cell_index(s)] += p;
    }
    JointDistribution::for_game(game, probs).map_err(|e| invalid(e.to_string()))
}

pub fn parse_cell_key(key: &str) -> Option<JointStrategy> {
    let (a, b) = key.split_once(',')?;
    Some(JointStrategy::new(a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// Distribution JSON listing only the support.
pub fn distribution_to_json(dist: &JointDistribution) -> Value {
    let probs: BTreeMap<String, String> = dist.support().map(|(s, p)| (s.to_string(), format_rational(p))).collect();
    serde_json::json!({ "probs": probs })
}

pub const BOS_JSON: &str = include_str!("../games/bos.json");
pub const COIN_FLIP_JSON: &str = include_str!("../games/coinflip.json");

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn origin() -> &'static Path {
        Path::new("test.json")
    }

    #[test]
    fn bundled_games_match_presets() {
        assert_eq!(parse_game_str(BOS_JSON, origin()).unwrap(), Game::battle_of_the_sexes());
        assert_eq!(parse_game_str(COIN_FLIP_JSON, origin()).unwrap(), Game::coin_flip());
    }

    #[test]
    fn accepts_decimals_fractions_and_numbers() {
        let g = parse_game_str(r#"{"strategies":[["a"],["b","c"]],"u1":[["0.5", 2]],"u2":[["1/3","-1"]]}"#, origin())
            .unwrap();
        assert_eq!(g.utilities(crate::game::Player::One), &[frac(1, 2), frac(2, 1)]);
        assert_eq!(g.utilities(crate::game::Player::Two), &[frac(1, 3), frac(-1, 1)]);
    }

    #[test]
    fn ragged_rows_name_the_field() {
        let err = parse_game_str(
            r#"{"strategies":[["a","b"],["x","y"]],"u1":[["1","2"],["3"]],"u2":[["0","0"],["0","0"]]}"#,
            origin(),
        )
        .unwrap_err();
        match err {
            FormatError::DimensionMismatch { field, .. } => assert_eq!(field, "u1[1]"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn non_rational_entry_names_the_field() {
        let err = parse_game_str(r#"{"strategies":[["a"],["x"]],"u1":[["abc"]],"u2":[["0"]]}"#, origin()).unwrap_err();
        match err {
            FormatError::NonRationalEntry { field, value, .. } => {
                assert_eq!(field, "u1[0][0]");
                assert_eq!(value, "abc");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_game_str("{\n  \"strategies\": [[\"a\"],\n  oops", origin()).unwrap_err();
        match err {
            FormatError::MalformedJson { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
        assert!(matches!(parse_game_file("/nonexistent/game.json").unwrap_err(), FormatError::MissingFile { .. }));
    }

    #[test]
    fn distribution_json_round_trip() {
        let g = Game::battle_of_the_sexes();
        let d = parse_distribution_str(r#"{"probs":{"0,0":"1/2","1,1":"0.5"}}"#, origin(), &g).unwrap();
        assert_eq!(d.prob(JointStrategy::new(1, 1)), &frac(1, 2));
        let text = distribution_to_json(&d).to_string();
        assert_eq!(text, r#"{"probs":{"0,0":"1/2","1,1":"1/2"}}"#);
        assert!(parse_distribution_str(r#"{"probs":{"0,0":"1/3"}}"#, origin(), &g).is_err());
        assert!(parse_distribution_str(r#"{"probs":{"5,0":"1"}}"#, origin(), &g).is_err());
    }
}
