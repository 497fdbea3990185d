use ce_sampler::format::{
    distribution_to_json, game_to_json, parse_distribution_str, parse_game_file, parse_game_str, FormatError,
};
use ce_sampler::rational::{frac, half, int};
use ce_sampler::{Game, JointDistribution};
use std::path::{Path, PathBuf};

fn games_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("games")
}

#[test]
fn bundled_games_parse() {
    assert_eq!(parse_game_file(games_dir().join("bos.json")).unwrap(), Game::battle_of_the_sexes());
    assert_eq!(parse_game_file(games_dir().join("coinflip.json")).unwrap(), Game::coin_flip());
}

#[test]
fn game_round_trip() {
    let g =
        Game::from_pairs(&["u", "d", "m"], &["l", "r"], &[&[(1, -2), (0, 3)], &[(5, 5), (2, 0)], &[(-1, 1), (7, 2)]])
            .unwrap();
    let text = game_to_json(&g).to_string();
    assert_eq!(parse_game_str(&text, Path::new("mem")).unwrap(), g);
}

#[test]
fn fractions_and_numbers_are_accepted() {
    let text = r#"{"strategies":[["a"],["x","y"]],"u1":[["1/3", 2]],"u2":[[0.5, "-4"]]}"#;
    let g = parse_game_str(text, Path::new("mem")).unwrap();
    assert_eq!(g.utility_matrix(ce_sampler::Player::One)[0], vec![frac(1, 3), int(2)]);
    assert_eq!(g.utility_matrix(ce_sampler::Player::Two)[0], vec![half(), int(-4)]);
}

#[test]
fn errors_carry_location() {
    let err = parse_game_str("{\n  \"strategies\": [\n  oops", Path::new("broken.json")).unwrap_err();
    assert!(matches!(err, FormatError::MalformedJson { line: 3, .. }), "{err}");
    assert!(err.to_string().starts_with("broken.json:3:"), "{err}");

    let ragged = r#"{"strategies":[["a","b"],["x"]],"u1":[["1"],["1","2"]],"u2":[["1"],["1"]]}"#;
    let err = parse_game_str(ragged, Path::new("g.json")).unwrap_err();
    assert!(err.to_string().contains("u1[1]"), "{err}");

    let bad = r#"{"strategies":[["a"],["x"]],"u1":[["one"]],"u2":[["1"]]}"#;
    let err = parse_game_str(bad, Path::new("g.json")).unwrap_err();
    assert!(matches!(err, FormatError::NonRationalEntry { .. }), "{err}");

    let missing = parse_game_file(games_dir().join("no-such-game.json")).unwrap_err();
    assert!(matches!(missing, FormatError::MissingFile { .. }));
}

#[test]
fn distributions() {
    let g = Game::battle_of_the_sexes();
    let p = parse_distribution_str(r#"{"probs":{"0,0":"1/2","1,1":"1/2"}}"#, Path::new("p"), &g).unwrap();
    assert_eq!(p, JointDistribution::for_game(&g, vec![half(), int(0), int(0), half()]).unwrap());
    let back = distribution_to_json(&p).to_string();
    assert_eq!(parse_distribution_str(&back, Path::new("p"), &g).unwrap(), p);
    for bad in [r#"{"probs":{"0,0":"1/2"}}"#, r#"{"probs":{"2,0":"1"}}"#, r#"{"probs":{"0;0":"1"}}"#] {
        assert!(matches!(
            parse_distribution_str(bad, Path::new("p"), &g),
            Err(FormatError::InvalidDistribution { .. })
        ));
    }
}
