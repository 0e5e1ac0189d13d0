//! Seeded random formula and term generators for property suites and
//! fuzz-style round-trip tests.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{Formula, Term};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const AGENTS: [&str; 7] = ["a", "b", "1", "2", "3", "Art", "Bob"];
const LABELS: [&str; 2] = ["P", "K"];

/// Shape constraints for generated formulas.
#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    pub max_depth: usize,
    /// Permit knowledge operators (off for the self-reference fragment).
    pub allow_know: bool,
    /// Permit code predicates (off for the modal fragment).
    pub allow_code_pred: bool,
    pub max_day: u32,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_depth: 6,
            allow_know: true,
            allow_code_pred: true,
            max_day: 9,
        }
    }
}

impl GenConfig {
    /// Formulas the Gödel numbering accepts: no knowledge operators.
    pub fn fragment() -> Self {
        GenConfig {
            allow_know: false,
            ..Default::default()
        }
    }
}

/// A random numeral, usually small, occasionally hundreds of digits.
pub fn random_numeral(rng: &mut impl Rng) -> BigUint {
    match rng.gen_range(0..10) {
        0..=6 => BigUint::from(rng.gen_range(0u64..1000)),
        7 | 8 => BigUint::from(rng.gen::<u64>()),
        _ => {
            let len = rng.gen_range(20..200);
            let mut digits = String::new();
            digits.push(char::from(b'1' + rng.gen_range(0u8..9)));
            for _ in 1..len {
                digits.push(char::from(b'0' + rng.gen_range(0u8..10)));
            }
            digits.parse().unwrap()
        }
    }
}

pub fn random_term(rng: &mut impl Rng, depth: usize) -> Term {
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => Term::Var,
            _ => Term::Numeral(random_numeral(rng)),
        };
    }
    match rng.gen_range(0..8) {
        0 => Term::Var,
        1 | 2 => Term::Numeral(random_numeral(rng)),
        3 => Term::neg(random_term(rng, depth - 1)),
        4 => Term::conj(random_term(rng, depth - 1), random_term(rng, depth - 1)),
        5 | 6 => Term::imp(random_term(rng, depth - 1), random_term(rng, depth - 1)),
        _ => Term::diag(random_term(rng, depth - 1), random_term(rng, depth - 1)),
    }
}

pub fn random_formula(rng: &mut impl Rng, cfg: &GenConfig) -> Formula {
    random_formula_at(rng, cfg, cfg.max_depth)
}

fn random_leaf(rng: &mut impl Rng, cfg: &GenConfig, depth: usize) -> Formula {
    match rng.gen_range(0..6) {
        0 if cfg.allow_code_pred => Formula::code_pred(
            LABELS[rng.gen_range(0..LABELS.len())],
            random_term(rng, depth.min(3)),
        ),
        5 => Formula::Falsum,
        _ => Formula::DayAtom(rng.gen_range(1..=cfg.max_day)),
    }
}

fn random_formula_at(rng: &mut impl Rng, cfg: &GenConfig, depth: usize) -> Formula {
    if depth == 0 {
        return random_leaf(rng, cfg, depth);
    }
    match rng.gen_range(0..10) {
        0 => random_leaf(rng, cfg, depth),
        1 => Formula::not(random_formula_at(rng, cfg, depth - 1)),
        2 if cfg.allow_know => Formula::know(
            AGENTS[rng.gen_range(0..AGENTS.len())],
            random_formula_at(rng, cfg, depth - 1),
        ),
        2 => Formula::not(random_formula_at(rng, cfg, depth - 1)),
        3 | 4 => Formula::and(
            random_formula_at(rng, cfg, depth - 1),
            random_formula_at(rng, cfg, depth - 1),
        ),
        5 | 6 => Formula::or(
            random_formula_at(rng, cfg, depth - 1),
            random_formula_at(rng, cfg, depth - 1),
        ),
        7 => Formula::xor(
            random_formula_at(rng, cfg, depth - 1),
            random_formula_at(rng, cfg, depth - 1),
        ),
        8 => Formula::implies(
            random_formula_at(rng, cfg, depth - 1),
            random_formula_at(rng, cfg, depth - 1),
        ),
        _ => Formula::iff(
            random_formula_at(rng, cfg, depth - 1),
            random_formula_at(rng, cfg, depth - 1),
        ),
    }
}
