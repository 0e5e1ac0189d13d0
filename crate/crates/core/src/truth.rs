//! Truth-table tautology checking over opaque atoms.
//!
//! Day atoms, code-predicate atoms (distinguished by their full term) and
//! knowledge atoms (distinguished by agent and body) are treated as opaque
//! propositional variables. Evaluation is vectorized 64 assignments at a
//! time, which keeps the generated derivations (whose announcements expand to
//! ~20 atoms at a five-day horizon) at millisecond scale.

use std::collections::HashMap;

use crate::formula::Formula;

/// Hard cap on distinct atoms per truth table (2^24 assignments).
pub const MAX_ATOMS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TooManyAtoms {
    pub count: usize,
}

const PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

enum Instr {
    Atom(usize),
    Zero,
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Xor(usize, usize),
    Implies(usize, usize),
    Iff(usize, usize),
}

fn is_atom(f: &Formula) -> bool {
    matches!(
        f,
        Formula::DayAtom(_) | Formula::CodePred(_, _) | Formula::Know(_, _)
    )
}

// Repeated subformulas (glue tautologies mention the same announcement
// several times) are compiled once and shared.
fn compile(
    f: &Formula,
    atoms: &mut HashMap<Formula, usize>,
    code: &mut Vec<Instr>,
    memo: &mut HashMap<Formula, usize>,
) -> Result<usize, TooManyAtoms> {
    if let Some(&slot) = memo.get(f) {
        return Ok(slot);
    }
    if is_atom(f) {
        let next = atoms.len();
        let id = *atoms.entry(f.clone()).or_insert(next);
        if atoms.len() > MAX_ATOMS {
            return Err(TooManyAtoms { count: atoms.len() });
        }
        code.push(Instr::Atom(id));
        let slot = code.len() - 1;
        memo.insert(f.clone(), slot);
        return Ok(slot);
    }
    let instr = match f {
        Formula::Falsum => Instr::Zero,
        Formula::Not(g) => Instr::Not(compile(g, atoms, code, memo)?),
        Formula::And(a, b) => Instr::And(
            compile(a, atoms, code, memo)?,
            compile(b, atoms, code, memo)?,
        ),
        Formula::Or(a, b) => Instr::Or(
            compile(a, atoms, code, memo)?,
            compile(b, atoms, code, memo)?,
        ),
        Formula::Xor(a, b) => Instr::Xor(
            compile(a, atoms, code, memo)?,
            compile(b, atoms, code, memo)?,
        ),
        Formula::Implies(a, b) => Instr::Implies(
            compile(a, atoms, code, memo)?,
            compile(b, atoms, code, memo)?,
        ),
        Formula::Iff(a, b) => Instr::Iff(
            compile(a, atoms, code, memo)?,
            compile(b, atoms, code, memo)?,
        ),
        _ => unreachable!("atoms handled above"),
    };
    code.push(instr);
    let slot = code.len() - 1;
    memo.insert(f.clone(), slot);
    Ok(slot)
}

/// Decides whether `f` is a propositional tautology over opaque atoms.
pub fn is_tautology(f: &Formula) -> Result<bool, TooManyAtoms> {
    let mut atoms = HashMap::new();
    let mut code = Vec::new();
    compile(f, &mut atoms, &mut code, &mut HashMap::new())?;
    let n = atoms.len();

    let mask = if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1usize << n)) - 1
    };
    let chunks: u64 = if n > 6 { 1 << (n - 6) } else { 1 };

    let mut slots = vec![0u64; code.len()];
    let mut inputs = [0u64; MAX_ATOMS];
    inputs[..n.min(6)].copy_from_slice(&PATTERNS[..n.min(6)]);

    for chunk in 0..chunks {
        for i in 6..n {
            inputs[i] = if (chunk >> (i - 6)) & 1 == 1 {
                u64::MAX
            } else {
                0
            };
        }
        for (i, instr) in code.iter().enumerate() {
            slots[i] = match *instr {
                Instr::Atom(a) => inputs[a],
                Instr::Zero => 0,
                Instr::Not(x) => !slots[x],
                Instr::And(x, y) => slots[x] & slots[y],
                Instr::Or(x, y) => slots[x] | slots[y],
                Instr::Xor(x, y) => slots[x] ^ slots[y],
                Instr::Implies(x, y) => !slots[x] | slots[y],
                Instr::Iff(x, y) => !(slots[x] ^ slots[y]),
            };
        }
        if slots[code.len() - 1] & mask != mask {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn taut(s: &str) -> bool {
        is_tautology(&parse(s).unwrap()).unwrap()
    }

    #[test]
    fn classical_tautologies() {
        assert!(taut("Q1 -> Q1"));
        assert!(taut("Q1 | ~Q1"));
        assert!(taut("(Q1 -> Q2) -> (~Q2 -> ~Q1)"));
        assert!(taut("~(Q1 & ~Q1)"));
        assert!(taut("false -> Q1"));
        assert!(taut("(Q1 xor Q2) <-> ~(Q1 <-> Q2)"));
        assert!(!taut("Q1 -> Q2"));
        assert!(!taut("Q1 | Q2"));
        assert!(!taut("false"));
    }

    #[test]
    fn modal_atoms_are_opaque() {
        // Ka Q1 and Q1 are distinct atoms, so factivity is not a tautology.
        assert!(!taut("Ka 1 -> 1"));
        assert!(taut("Ka 1 -> Ka 1"));
        // Knowledge atoms are distinguished by agent and body.
        assert!(!taut("Ka 1 -> Kb 1"));
        assert!(!taut("Ka 1 -> Ka 2"));
    }

    #[test]
    fn code_pred_atoms_distinguished_by_term() {
        assert!(!taut("P[1] -> P[2]"));
        assert!(taut("P[D(x,x)] -> P[D(x,x)]"));
    }

    #[test]
    fn many_atoms_vectorized() {
        // 10 distinct atoms exercises the multi-chunk path.
        let mut disj = String::from("Q1");
        let mut conj = String::from("Q1");
        for k in 2..=10 {
            disj = format!("{disj} | Q{k}");
            conj = format!("{conj} & Q{k}");
        }
        assert!(taut(&format!("({conj}) -> ({disj})")));
        assert!(!taut(&format!("({disj}) -> ({conj})")));
    }

    #[test]
    fn atom_cap() {
        let mut f = String::from("Q1");
        for k in 2..=(MAX_ATOMS + 1) {
            f = format!("{f} & Q{k}");
        }
        assert!(is_tautology(&parse(&f).unwrap()).is_err());
    }
}
