//! The finite iterated prisoner's dilemma: backward induction and exhaustive
//! pure-Nash enumeration.
//!
//! Strategies are full-history objects — a mapping from every history of
//! joint actions to an action — so the enumeration at small horizons ranges
//! over the complete strategy spaces (2 strategies per player at n = 1,
//! 32 at n = 2). The subgame-perfect solver works round-wise: at each round
//! the continuation value after any history is the same by induction, so the
//! augmented stage game is dominance-solvable and defection is selected
//! everywhere.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

pub type Rational = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Cooperate,
    Defect,
}

impl Action {
    pub const BOTH: [Action; 2] = [Action::Cooperate, Action::Defect];

    pub fn to_char(self) -> char {
        match self {
            Action::Cooperate => 'C',
            Action::Defect => 'D',
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A joint action: (row player, column player).
pub type JointAction = (Action, Action);
/// A sequence of completed rounds.
pub type History = Vec<JointAction>;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("not a prisoner's dilemma: requires T > R > P > S, got T={t} R={r} P={p} S={s}")]
    NotPrisonersDilemma {
        t: Rational,
        r: Rational,
        p: Rational,
        s: Rational,
    },
    #[error("round count must be at least 1")]
    ZeroRounds,
    #[error("exhaustive enumeration is desk-scale only for n <= {max} (got n = {n})")]
    HorizonTooLarge { n: usize, max: usize },
    #[error("strategy table is not total: missing history {0:?}")]
    PartialStrategy(String),
    #[error("affine payoff scaling requires a positive factor")]
    NonPositiveScale,
}

/// Stage-game payoffs: temptation, reward, punishment, sucker
/// (`T > R > P > S`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PayoffMatrix {
    pub temptation: Rational,
    pub reward: Rational,
    pub punishment: Rational,
    pub sucker: Rational,
}

impl PayoffMatrix {
    pub fn new(
        temptation: Rational,
        reward: Rational,
        punishment: Rational,
        sucker: Rational,
    ) -> Result<Self, GameError> {
        if !(temptation > reward && reward > punishment && punishment > sucker) {
            return Err(GameError::NotPrisonersDilemma {
                t: temptation,
                r: reward,
                p: punishment,
                s: sucker,
            });
        }
        Ok(PayoffMatrix {
            temptation,
            reward,
            punishment,
            sucker,
        })
    }

    /// The default quadruple (2, 1, 0, -2): mutual defection scores zero,
    /// mutual cooperation a moderate payoff, unilateral defection a large
    /// payoff against a large loss.
    pub fn default_values() -> Self {
        PayoffMatrix::new(
            Rational::from_integer(2),
            Rational::from_integer(1),
            Rational::from_integer(0),
            Rational::from_integer(-2),
        )
        .expect("default quadruple is a prisoner's dilemma")
    }

    /// Per-round payoffs for a joint action.
    pub fn stage(&self, joint: JointAction) -> (Rational, Rational) {
        match joint {
            (Action::Cooperate, Action::Cooperate) => (self.reward, self.reward),
            (Action::Cooperate, Action::Defect) => (self.sucker, self.temptation),
            (Action::Defect, Action::Cooperate) => (self.temptation, self.sucker),
            (Action::Defect, Action::Defect) => (self.punishment, self.punishment),
        }
    }

    /// Positive affine transformation `x -> scale * x + shift`, which leaves
    /// every best-response comparison unchanged.
    pub fn affine(&self, scale: Rational, shift: Rational) -> Result<Self, GameError> {
        if scale <= Rational::from_integer(0) {
            return Err(GameError::NonPositiveScale);
        }
        PayoffMatrix::new(
            self.temptation * scale + shift,
            self.reward * scale + shift,
            self.punishment * scale + shift,
            self.sucker * scale + shift,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum StrategyRepr {
    /// History-independent action per round index.
    PerRound(Vec<Action>),
    /// Explicit total table over all histories of length < n.
    Table(BTreeMap<History, Action>),
}

/// A pure full-history strategy for one player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy(StrategyRepr);

impl Strategy {
    /// A strategy playing `actions[k]` in round `k` regardless of history.
    pub fn per_round(actions: Vec<Action>) -> Strategy {
        Strategy(StrategyRepr::PerRound(actions))
    }

    /// The same action at every history.
    pub fn uniform(n: usize, action: Action) -> Strategy {
        Strategy(StrategyRepr::PerRound(vec![action; n]))
    }

    /// An explicit table; must be total over all histories of length < `n`.
    pub fn from_table(n: usize, table: BTreeMap<History, Action>) -> Result<Strategy, GameError> {
        for h in all_histories(n) {
            if !table.contains_key(&h) {
                return Err(GameError::PartialStrategy(format!("{h:?}")));
            }
        }
        Ok(Strategy(StrategyRepr::Table(table)))
    }

    pub fn action(&self, history: &History) -> Action {
        match &self.0 {
            StrategyRepr::PerRound(actions) => actions[history.len()],
            StrategyRepr::Table(table) => *table
                .get(history)
                .expect("strategy tables are total by construction"),
        }
    }

    /// Materializes the mapping over all histories of length < `n`,
    /// lexicographically ordered.
    pub fn table(&self, n: usize) -> BTreeMap<History, Action> {
        all_histories(n)
            .into_iter()
            .map(|h| {
                let a = self.action(&h);
                (h, a)
            })
            .collect()
    }

    /// True iff the strategy plays `action` at every history.
    pub fn always_plays(&self, n: usize, action: Action) -> bool {
        match &self.0 {
            StrategyRepr::PerRound(actions) => {
                actions.len() == n && actions.iter().all(|&a| a == action)
            }
            StrategyRepr::Table(table) => table.values().all(|&a| a == action),
        }
    }
}

/// All histories of length < n, lexicographically ordered (prefixes first).
pub fn all_histories(n: usize) -> Vec<History> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<History> = vec![Vec::new()];
    for _ in 1..n {
        let mut next = Vec::new();
        for h in &layer {
            for a1 in Action::BOTH {
                for a2 in Action::BOTH {
                    let mut h2 = h.clone();
                    h2.push((a1, a2));
                    next.push(h2);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out.sort();
    out
}

/// A pure strategy pair for an `n`-round game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyProfile {
    pub n: usize,
    pub row: Strategy,
    pub col: Strategy,
}

impl StrategyProfile {
    /// The unique play path induced by the profile.
    pub fn play_path(&self) -> Vec<JointAction> {
        let mut history = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            let joint = (self.row.action(&history), self.col.action(&history));
            history.push(joint);
        }
        history
    }
}

/// Total payoffs along the profile's play path.
pub fn payoff_of(profile: &StrategyProfile, pm: &PayoffMatrix) -> (Rational, Rational) {
    let mut totals = (Rational::from_integer(0), Rational::from_integer(0));
    for joint in profile.play_path() {
        let (a, b) = pm.stage(joint);
        totals.0 += a;
        totals.1 += b;
    }
    totals
}

/// Backward-induction solution.
#[derive(Clone, Debug)]
pub struct SpeSolution {
    pub profile: StrategyProfile,
    pub value: (Rational, Rational),
}

/// Solves the `n`-round game by backward induction.
///
/// Inductively the continuation value after round `k` is the same for every
/// history, so each round reduces to the one-shot stage game (shifted by a
/// constant), where defection strictly dominates under `T > R > P > S`.
pub fn solve_spe(n: usize, pm: &PayoffMatrix) -> Result<SpeSolution, GameError> {
    if n == 0 {
        return Err(GameError::ZeroRounds);
    }
    let mut continuation = (Rational::from_integer(0), Rational::from_integer(0));
    let mut per_round = vec![Action::Defect; n];
    for round in (0..n).rev() {
        // Augmented one-shot game at this round; the continuation is
        // history-independent by the inductive hypothesis.
        let aug = |joint: JointAction| {
            let (a, b) = pm.stage(joint);
            (a + continuation.0, b + continuation.1)
        };
        let row_dominant = Action::BOTH
            .into_iter()
            .find(|&mine| {
                Action::BOTH.into_iter().all(|theirs| {
                    Action::BOTH
                        .into_iter()
                        .filter(|&other| other != mine)
                        .all(|other| aug((mine, theirs)).0 > aug((other, theirs)).0)
                })
            })
            .expect("T > R and P > S make defection strictly dominant");
        let col_dominant = Action::BOTH
            .into_iter()
            .find(|&mine| {
                Action::BOTH.into_iter().all(|theirs| {
                    Action::BOTH
                        .into_iter()
                        .filter(|&other| other != mine)
                        .all(|other| aug((theirs, mine)).1 > aug((theirs, other)).1)
                })
            })
            .expect("T > R and P > S make defection strictly dominant");
        per_round[round] = row_dominant;
        debug_assert_eq!(row_dominant, col_dominant);
        continuation = aug((row_dominant, col_dominant));
    }
    let profile = StrategyProfile {
        n,
        row: Strategy::per_round(per_round.clone()),
        col: Strategy::per_round(per_round),
    };
    Ok(SpeSolution {
        value: continuation,
        profile,
    })
}

/// A pure Nash equilibrium found by exhaustive best-response checking.
#[derive(Clone, Debug)]
pub struct Equilibrium {
    pub profile: StrategyProfile,
    pub path: Vec<JointAction>,
    pub value: (Rational, Rational),
}

/// Exhaustively enumerates all pure Nash equilibria for `n <= 2` (strategy
/// spaces of 2 and 32 per player).
pub fn enumerate_pure_nash(n: usize, pm: &PayoffMatrix) -> Result<Vec<Equilibrium>, GameError> {
    if n == 0 {
        return Err(GameError::ZeroRounds);
    }
    if n > 2 {
        return Err(GameError::HorizonTooLarge { n, max: 2 });
    }
    let strategies = all_strategies(n);
    let payoff = |row: &Strategy, col: &Strategy| {
        payoff_of(
            &StrategyProfile {
                n,
                row: row.clone(),
                col: col.clone(),
            },
            pm,
        )
    };
    let mut equilibria = Vec::new();
    for row in &strategies {
        for col in &strategies {
            let value = payoff(row, col);
            let row_can_improve = strategies.iter().any(|alt| payoff(alt, col).0 > value.0);
            if row_can_improve {
                continue;
            }
            let col_can_improve = strategies.iter().any(|alt| payoff(row, alt).1 > value.1);
            if col_can_improve {
                continue;
            }
            let profile = StrategyProfile {
                n,
                row: row.clone(),
                col: col.clone(),
            };
            let path = profile.play_path();
            equilibria.push(Equilibrium {
                profile,
                path,
                value,
            });
        }
    }
    Ok(equilibria)
}

/// Every pure strategy for an `n`-round game, in a stable lexicographic
/// order over the history table.
pub fn all_strategies(n: usize) -> Vec<Strategy> {
    let histories = all_histories(n);
    let count = 1usize << histories.len();
    (0..count)
        .map(|mask| {
            let table: BTreeMap<History, Action> = histories
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    let action = if mask >> i & 1 == 1 {
                        Action::Defect
                    } else {
                        Action::Cooperate
                    };
                    (h.clone(), action)
                })
                .collect();
            Strategy(StrategyRepr::Table(table))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn pm() -> PayoffMatrix {
        PayoffMatrix::default_values()
    }

    #[test]
    fn stage_payoffs() {
        let pm = pm();
        assert_eq!(pm.stage((Action::Defect, Action::Defect)), (rat(0), rat(0)));
        assert_eq!(pm.stage((Action::Cooperate, Action::Cooperate)), (rat(1), rat(1)));
        assert_eq!(pm.stage((Action::Defect, Action::Cooperate)), (rat(2), rat(-2)));
    }

    #[test]
    fn invalid_matrices_are_rejected() {
        assert!(matches!(
            PayoffMatrix::new(rat(1), rat(2), rat(0), rat(-2)),
            Err(GameError::NotPrisonersDilemma { .. })
        ));
        assert!(PayoffMatrix::new(rat(5), rat(3), rat(1), rat(0)).is_ok());
    }

    #[test]
    fn payoff_examples() {
        let both_defect = StrategyProfile {
            n: 1,
            row: Strategy::uniform(1, Action::Defect),
            col: Strategy::uniform(1, Action::Defect),
        };
        assert_eq!(payoff_of(&both_defect, &pm()), (rat(0), rat(0)));

        let both_cooperate = StrategyProfile {
            n: 2,
            row: Strategy::uniform(2, Action::Cooperate),
            col: Strategy::uniform(2, Action::Cooperate),
        };
        assert_eq!(payoff_of(&both_cooperate, &pm()), (rat(2), rat(2)));

        let exploit = StrategyProfile {
            n: 1,
            row: Strategy::uniform(1, Action::Defect),
            col: Strategy::uniform(1, Action::Cooperate),
        };
        assert_eq!(payoff_of(&exploit, &pm()), (rat(2), rat(-2)));
    }

    #[test]
    fn history_dependent_strategies_follow_the_path() {
        // Tit-for-tat against always-defect: (C,D) then (D,D).
        let mut table = BTreeMap::new();
        table.insert(vec![], Action::Cooperate);
        for a1 in Action::BOTH {
            for a2 in Action::BOTH {
                table.insert(vec![(a1, a2)], a2);
            }
        }
        let tft = Strategy::from_table(2, table).unwrap();
        let profile = StrategyProfile {
            n: 2,
            row: tft,
            col: Strategy::uniform(2, Action::Defect),
        };
        assert_eq!(
            profile.play_path(),
            vec![
                (Action::Cooperate, Action::Defect),
                (Action::Defect, Action::Defect)
            ]
        );
        assert_eq!(payoff_of(&profile, &pm()), (rat(-2), rat(2)));
    }

    #[test]
    fn partial_tables_are_rejected() {
        let mut table = BTreeMap::new();
        table.insert(vec![], Action::Cooperate);
        assert!(matches!(
            Strategy::from_table(2, table),
            Err(GameError::PartialStrategy(_))
        ));
    }

    #[test]
    fn spe_is_all_defect() {
        for n in 1..=10 {
            let solution = solve_spe(n, &pm()).unwrap();
            assert!(solution.profile.row.always_plays(n, Action::Defect));
            assert!(solution.profile.col.always_plays(n, Action::Defect));
            let expected = pm().punishment * rat(n as i64);
            assert_eq!(solution.value, (expected, expected));
            assert_eq!(payoff_of(&solution.profile, &pm()), solution.value);
        }
        assert_eq!(solve_spe(0, &pm()).unwrap_err(), GameError::ZeroRounds);
    }

    #[test]
    fn one_round_has_exactly_one_equilibrium() {
        let eqs = enumerate_pure_nash(1, &pm()).unwrap();
        assert_eq!(eqs.len(), 1);
        assert_eq!(eqs[0].path, vec![(Action::Defect, Action::Defect)]);
        assert_eq!(eqs[0].value, (rat(0), rat(0)));
    }

    #[test]
    fn two_round_equilibria_all_play_defect() {
        let eqs = enumerate_pure_nash(2, &pm()).unwrap();
        assert!(!eqs.is_empty());
        let all_defect_path = vec![
            (Action::Defect, Action::Defect),
            (Action::Defect, Action::Defect),
        ];
        for eq in &eqs {
            assert_eq!(eq.path, all_defect_path);
            assert_eq!(eq.value, (rat(0), rat(0)));
        }
        // The everywhere-defect profile is among them.
        assert!(eqs.iter().any(|eq| {
            eq.profile.row.always_plays(2, Action::Defect)
                && eq.profile.col.always_plays(2, Action::Defect)
        }));
        assert!(matches!(
            enumerate_pure_nash(3, &pm()),
            Err(GameError::HorizonTooLarge { .. })
        ));
    }

    #[test]
    fn affine_rescaling_preserves_solutions() {
        let scaled = pm()
            .affine(Rational::new(7, 3), Rational::new(-5, 2))
            .unwrap();
        for n in 1..=2usize {
            let base = enumerate_pure_nash(n, &pm()).unwrap();
            let transformed = enumerate_pure_nash(n, &scaled).unwrap();
            assert_eq!(base.len(), transformed.len());
            for (a, b) in base.iter().zip(&transformed) {
                assert_eq!(a.profile, b.profile);
                assert_eq!(a.path, b.path);
            }
        }
        let spe = solve_spe(6, &scaled).unwrap();
        assert!(spe.profile.row.always_plays(6, Action::Defect));
        assert!(pm().affine(rat(0), rat(1)).is_err());
    }
}
