//! The acceptance checks, shared by the `acceptance` test target and the
//! `reproduce` command. Every check is exact unless it says otherwise.

use crate::analysis::{
    compute_ph, compute_worst_case_q, exact_output_distribution, optimize_adversary, payoff, verify_claim1,
    verify_claim1_for, wlog_gap, AdversaryPolicyExact, AnalysisReport, AnnouncementClass, Goal,
};
use crate::battery::{self, Instance};
use crate::error::Result;
use crate::extended::augmented_normal_form;
use crate::game::{
    check_mixed_ne, check_pure_ne, expected_utility, Game, JointDistribution, JointStrategy, Player,
    ProductDistribution,
};
use crate::lp::polytope::{coordinate_ranges, enumerate_vertices};
use crate::lp::{build_ce_lp, solve_ce, CeObjective, Constraint, ConstraintKind, Relation};
use crate::montecarlo::{output_counts, total_variation};
use crate::protocol::{Honest, PreferenceRule, Scripted, Setup};
use crate::rational::{format_rational, frac, half, int, Rational};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use std::sync::OnceLock;
use std::time::Instant;

pub const BATTERY_SEED: u64 = 2024;
pub const BATTERY_GAMES: usize = 100;
pub const MC_SEED: u64 = 7;
pub const MC_TRIALS: u64 = 200_000;
pub const MC_TOLERANCE: f64 = 0.02;

/// `(number, key, title)` of every criterion.
pub const CRITERIA: [(u8, &str, &str); 10] = [
    (1, "bos-equilibria", "BoS pure and mixed equilibria"),
    (2, "bos-fair-ce", "BoS fair correlated equilibrium"),
    (3, "coin-flip", "Coin-flip fair CE is unique, also when augmented"),
    (4, "cheating-bound", "One disputed BoS round gives the cheater 3 + 2e'"),
    (5, "claim1", "L1 drift per round under the worst-case deviator"),
    (6, "css", "Sampling properties on normalized games"),
    (7, "epsilon-nash", "Honest strategy is an epsilon-Nash equilibrium"),
    (8, "corollary1", "Honest payoff drops by at most epsilon"),
    (9, "monte-carlo", "Simulated runs match the exact distributions"),
    (10, "wlog", "Truthful announcements lose nothing"),
];

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u8,
    pub key: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<15} {}  ({:.2}s)  {}",
            self.id,
            self.key,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.detail
        )
    }
}

/// Resolves `"5"`, `"claim1"` and similar to a criterion number.
pub fn criterion_id(name: &str) -> Option<u8> {
    CRITERIA.iter().find(|(id, key, _)| *key == name || id.to_string() == name).map(|c| c.0)
}

struct Check {
    label: String,
    reports: [AnalysisReport; 2],
    greedy_claim1: [bool; 2],
    sigma_vs_p: bool,
    truthful_gain_ok: [bool; 2],
    /// Honest payoff under the self-interested deviator following its
    /// suggestion, minus `E_{p_h}[u_honest] - epsilon`.
    corollary_margin: [Rational; 2],
    /// Honest payoff change under a deviator minimizing it, arbitrary and
    /// truthful announcements.
    spiteful_drop: [[Rational; 2]; 2],
    wlog: bool,
}

fn check_instance(inst: &Instance) -> Result<Check> {
    let setup = Setup::new(&inst.game, &inst.p, inst.epsilon.clone(), inst.delta.clone(), PreferenceRule::default())?;
    let cfg = setup.config();
    let eps_p = cfg.per_round_bias().clone();
    let p_h = compute_ph(&setup);
    let reports = Player::BOTH.map(|j| verify_claim1(&setup, j));
    let greedy_claim1 = Player::BOTH.map(|j| {
        let r = verify_claim1_for(&setup, &AdversaryPolicyExact::truthful(&setup, j, cfg.max_win_probability()));
        r.claim1.cumulative && r.claim1.per_round && r.claim1.total
    });
    let sigma_vs_p =
        Player::BOTH.iter().all(|&i| payoff(&setup, &p_h, i) >= expected_utility(&inst.game, &inst.p, i) - cfg.delta());
    let truthful_gain_ok = Player::BOTH.map(|j| {
        let t = optimize_adversary(&setup, &eps_p, j, Goal::OwnPayoff { stage_two: true }, AnnouncementClass::Truthful);
        t.value <= payoff(&setup, &p_h, j) + cfg.epsilon()
    });
    let corollary_margin = Player::BOTH.map(|j| {
        let h = j.other();
        let opt =
            optimize_adversary(&setup, &eps_p, j, Goal::OwnPayoff { stage_two: false }, AnnouncementClass::Arbitrary);
        payoff(&setup, &opt.q, h) - (payoff(&setup, &p_h, h) - cfg.epsilon())
    });
    let spiteful_drop = Player::BOTH.map(|j| {
        [AnnouncementClass::Arbitrary, AnnouncementClass::Truthful].map(|class| {
            let h = j.other();
            let opt = optimize_adversary(&setup, &eps_p, j, Goal::HurtOpponent, class);
            payoff(&setup, &p_h, h) - payoff(&setup, &opt.q, h)
        })
    });
    let wlog = Player::BOTH.iter().all(|&j| wlog_gap(&setup, &eps_p, j).is_zero());
    let label = format!(
        "game {} ({}x{}) delta={} eps={} k={}",
        inst.index,
        inst.game.rows(),
        inst.game.cols(),
        inst.delta,
        inst.epsilon,
        setup.k()
    );
    Ok(Check { label, reports, greedy_claim1, sigma_vs_p, truthful_gain_ok, corollary_margin, spiteful_drop, wlog })
}

/// Runs criteria on demand; the random battery is built once and shared.
pub struct Suite {
    seed: u64,
    games: usize,
    trials: u64,
    battery: OnceLock<std::result::Result<Vec<Check>, String>>,
}

impl Default for Suite {
    fn default() -> Self {
        Suite::new(BATTERY_SEED, BATTERY_GAMES, MC_TRIALS)
    }
}

impl Suite {
    pub fn new(seed: u64, games: usize, trials: u64) -> Self {
        Suite { seed, games, trials, battery: OnceLock::new() }
    }

    fn battery(&self) -> std::result::Result<&[Check], String> {
        self.battery
            .get_or_init(|| {
                let instances = battery::instances(self.seed, self.games).map_err(|e| e.to_string())?;
                instances.par_iter().map(check_instance).collect::<Result<Vec<_>>>().map_err(|e| e.to_string())
            })
            .as_deref()
            .map_err(Clone::clone)
    }

    pub fn run(&self, id: u8) -> CriterionResult {
        let (_, key, title) = *CRITERIA.iter().find(|c| c.0 == id).expect("criterion number 1..=10");
        let start = Instant::now();
        let outcome = match id {
            1 => bos_equilibria(),
            2 => bos_fair_ce(),
            3 => coin_flip_uniqueness(),
            4 => cheating_bound(),
            9 => monte_carlo(self.trials),
            _ => self.battery().map(|b| match id {
                5 => claim1(b),
                6 => css(b),
                7 => epsilon_nash(b),
                8 => corollary1(b),
                _ => wlog(b),
            }),
        };
        let (passed, detail) = match outcome {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        CriterionResult { id, key, title, passed, detail, seconds: start.elapsed().as_secs_f64() }
    }

    pub fn run_all(&self) -> Vec<CriterionResult> {
        CRITERIA.iter().map(|c| self.run(c.0)).collect()
    }
}

type Outcome = std::result::Result<(bool, String), String>;

fn err(e: crate::Error) -> String {
    e.to_string()
}

fn bos_equilibria() -> Outcome {
    let g = Game::battle_of_the_sexes();
    let pure: Vec<JointStrategy> = g.joint_strategies().filter(|&s| check_pure_ne(&g, s)).collect();
    let pure_ok = pure == [JointStrategy::new(0, 0), JointStrategy::new(1, 1)];
    let mixed = ProductDistribution::new(vec![frac(2, 3), frac(1, 3)], vec![frac(1, 3), frac(2, 3)]).map_err(err)?;
    let mixed_ok = check_mixed_ne(&g, &mixed, &Rational::zero());
    let joint = mixed.to_joint();
    let payoffs = Player::BOTH.map(|p| expected_utility(&g, &joint, p));
    let miss = joint.prob(JointStrategy::new(0, 1)) + joint.prob(JointStrategy::new(1, 0));
    let passed = pure_ok && mixed_ok && payoffs == [frac(4, 3), frac(4, 3)] && miss == frac(5, 9);
    let detail = format!(
        "pure NE {:?}; mixed NE {}; payoffs ({}, {}); miscoordination {}",
        pure.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        if mixed_ok { "accepted" } else { "rejected" },
        payoffs[0],
        payoffs[1],
        miss
    );
    Ok((passed, detail))
}

fn bos_fair_ce() -> Outcome {
    let g = Game::battle_of_the_sexes();
    let p = solve_ce(&g, CeObjective::MaxFair).map_err(err)?;
    let expected = JointDistribution::for_game(&g, vec![half(), int(0), int(0), half()]).map_err(err)?;
    let payoffs = Player::BOTH.map(|pl| expected_utility(&g, &p, pl));
    let passed = p == expected && payoffs == [int(3), int(3)];
    let probs: Vec<String> = p.probs().iter().map(format_rational).collect();
    Ok((passed, format!("p = [{}]; payoffs ({}, {})", probs.join(", "), payoffs[0], payoffs[1])))
}

/// Restricts the CE polytope to fair points with total payoff 1.
fn fair_total_one(game: &Game) -> crate::lp::LpProblem {
    let mut lp = build_ce_lp(game, CeObjective::Feasible);
    let u1 = game.utilities(Player::One);
    let u2 = game.utilities(Player::Two);
    lp.constraints.push(Constraint {
        coeffs: u1.iter().zip(u2).map(|(a, b)| a - b).collect(),
        relation: Relation::Eq,
        rhs: Rational::zero(),
        kind: ConstraintKind::Other,
    });
    lp.constraints.push(Constraint {
        coeffs: u1.iter().zip(u2).map(|(a, b)| a + b).collect(),
        relation: Relation::Eq,
        rhs: int(1),
        kind: ConstraintKind::Other,
    });
    lp
}

/// The single point of the restricted polytope, if its coordinate ranges
/// all have zero width.
fn unique_point(lp: &crate::lp::LpProblem) -> std::result::Result<Option<Vec<Rational>>, String> {
    let ranges = coordinate_ranges(lp).map_err(err)?;
    Ok(ranges.iter().all(|(lo, hi)| lo == hi).then(|| ranges.into_iter().map(|r| r.0).collect()))
}

fn coin_flip_uniqueness() -> Outcome {
    let g = Game::coin_flip();
    let all = enumerate_vertices(&build_ce_lp(&g, CeObjective::Feasible)).map_err(err)?;
    let restricted = fair_total_one(&g);
    let vertices = enumerate_vertices(&restricted).map_err(err)?;
    let target = vec![half(), int(0), int(0), half()];
    let small_ok = vertices == [target.clone()] && unique_point(&restricted)? == Some(target);

    let aug = augmented_normal_form(&g).map_err(err)?;
    let mut aug_target = vec![Rational::zero(); aug.num_cells()];
    aug_target[aug.cell_index(JointStrategy::new(0, 0))] = half();
    aug_target[aug.cell_index(JointStrategy::new(1, 1))] = half();
    let aug_point = unique_point(&fair_total_one(&aug))?;
    let aug_ok = aug_point.as_ref() == Some(&aug_target);
    Ok((
        small_ok && aug_ok,
        format!(
            "CE polytope has {} vertices; fair total-1 face: {} vertex ({}); augmented 4x4: {}",
            all.len(),
            vertices.len(),
            if small_ok { "1/2 on (0,0) and (1,1)" } else { "unexpected" },
            if aug_ok {
                "unique, 1/2 on ((0,Accept),(0,Accept)) and ((1,Accept),(1,Accept))"
            } else {
                "not unique or unexpected"
            }
        ),
    ))
}

fn bos_fair_setup(epsilon: Rational) -> std::result::Result<Setup, String> {
    let g = Game::battle_of_the_sexes();
    let p = JointDistribution::for_game(&g, vec![half(), int(0), int(0), half()]).map_err(err)?;
    Setup::new(&g, &p, epsilon, half(), PreferenceRule::default()).map_err(err)
}

fn cheating_bound() -> Outcome {
    let mut lines = Vec::new();
    let mut passed = true;
    for eps in [frac(1, 10), frac(1, 100), frac(3, 7)] {
        let s = bos_fair_setup(eps)?;
        let eps_p = s.config().per_round_bias().clone();
        let (q, _) = compute_worst_case_q(&s, &eps_p, Player::One);
        let got = payoff(&s, &q, Player::One);
        let want = int(3) + int(2) * &eps_p;
        passed &= got == want;
        lines.push(format!("e'={eps_p}: {got}"));
    }
    Ok((passed, format!("dishonest payoff {} (expected 3 + 2e')", lines.join(", "))))
}

fn count(b: &[Check], f: impl Fn(&Check) -> bool) -> (usize, Option<&Check>) {
    let bad: Vec<&Check> = b.iter().filter(|c| !f(c)).collect();
    (b.len() - bad.len(), bad.first().copied())
}

fn summary(b: &[Check], ok: usize, first_bad: Option<&Check>, what: &str) -> String {
    match first_bad {
        None => format!("{ok}/{} instances hold {what}", b.len()),
        Some(c) => format!("{ok}/{} instances hold {what}; first failure: {}", b.len(), c.label),
    }
}

fn claim1(b: &[Check]) -> (bool, String) {
    let holds = |c: &Check| c.reports.iter().all(|r| r.claim1.cumulative && r.claim1.total);
    let (ok, bad) = count(b, holds);
    let (greedy_ok, _) = count(b, |c| c.greedy_claim1.iter().all(|&x| x));
    let mut detail = summary(b, ok, bad, "||q^m - p_h^m|| <= m e/k and ||q - p_h|| <= e");
    if let Some(c) = bad {
        let r = c.reports.iter().find(|r| !(r.claim1.cumulative && r.claim1.total)).expect("a failing report");
        let l1: Vec<String> = r.l1_per_round.iter().map(format_rational).collect();
        detail.push_str(&format!(" (deviator {}, l1 per round [{}])", r.dishonest.number(), l1.join(", ")));
    }
    detail.push_str(&format!("; greedy deviator: {greedy_ok}/{}", b.len()));
    (bad.is_none(), detail)
}

fn css(b: &[Check]) -> (bool, String) {
    let (ok, bad) =
        count(b, |c| c.reports.iter().all(|r| r.css.property1 && r.css.deviator_bound && r.css.honest_bound));
    (bad.is_none(), summary(b, ok, bad, "properties 1 and 2 for both deviators"))
}

fn epsilon_nash(b: &[Check]) -> (bool, String) {
    let (ok, bad) =
        count(b, |c| c.sigma_vs_p && c.truthful_gain_ok.iter().all(|&x| x) && c.reports.iter().all(|r| r.epsilon_nash));
    let worst = b
        .iter()
        .flat_map(|c| c.reports.iter())
        .map(|r| (&r.deviator_value - &r.payoff_ph[r.dishonest.index()]) / &r.epsilon)
        .max()
        .unwrap_or_else(Rational::zero);
    let detail = summary(b, ok, bad, "gain <= e and honest payoff >= E_p - delta");
    (bad.is_none(), format!("{detail}; largest gain / e = {:.4}", crate::rational::to_f64(&worst)))
}

fn corollary1(b: &[Check]) -> (bool, String) {
    let (ok, bad) = count(b, |c| c.corollary_margin.iter().all(|m| !m.is_negative()));
    let spite = |class: usize| {
        b.iter()
            .flat_map(|c| c.spiteful_drop.iter().map(move |d| d[class].clone()))
            .max()
            .map(|d| crate::rational::to_f64(&d))
            .unwrap_or(0.0)
    };
    let detail = summary(b, ok, bad, "honest payoff >= E_{p_h} - e");
    (
        bad.is_none(),
        format!(
            "{detail}; diagnostic, largest drop under a spiteful deviator: {:.4} (truthful), {:.4} (arbitrary)",
            spite(1),
            spite(0)
        ),
    )
}

fn wlog(b: &[Check]) -> (bool, String) {
    let (ok, bad) = count(b, |c| c.wlog);
    (bad.is_none(), summary(b, ok, bad, "equal optima with and without lying"))
}

fn monte_carlo(trials: u64) -> Outcome {
    let s = bos_fair_setup(frac(1, 10))?;
    let p_h = compute_ph(&s);
    let honest = output_counts(&s, [&Honest, &Honest], MC_SEED, trials);
    let tv_honest = total_variation(&honest, &p_h);

    let greedy = Scripted::greedy();
    let (q, policy) = compute_worst_case_q(&s, s.config().per_round_bias(), Player::One);
    // on this instance the optimal deviation is the greedy script
    let same = exact_output_distribution(&s, [&greedy, &Honest]) == q
        && exact_output_distribution(&s, [&Scripted::new(policy.to_policy(), "optimal"), &Honest]) == q;
    let cheat = output_counts(&s, [&greedy, &Honest], MC_SEED + 1, trials);
    let tv_cheat = total_variation(&cheat, &q);
    let passed = s.k() == 3 && same && tv_honest <= MC_TOLERANCE && tv_cheat <= MC_TOLERANCE;
    Ok((
        passed,
        format!(
            "k={}, {trials} trials each: TV(honest, p_h) = {tv_honest:.4}, TV(greedy, q) = {tv_cheat:.4}{}",
            s.k(),
            if same { "" } else { "; greedy script differs from the optimal deviation" }
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        assert_eq!(criterion_id("claim1"), Some(5));
        assert_eq!(criterion_id("10"), Some(10));
        assert_eq!(criterion_id("nope"), None);
    }

    #[test]
    fn small_battery_runs() {
        let suite = Suite::new(1, 3, 2000);
        let r = suite.run(6);
        assert!(r.detail.contains("/12 instances"), "{}", r.detail);
        assert!(suite.run(2).passed);
    }
}
