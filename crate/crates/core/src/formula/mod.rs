//! The object language shared by every deduction module: code-valued terms,
//! formulas with day atoms, code predicates and knowledge operators, and
//! linear proof transcripts with embedded sub-proofs.
//!
//! Concrete syntax (see the grammar in the crate README): `~` binds tightest,
//! then `&`, then `|` and `xor`, then `->`, then `<->`. Day atoms are written
//! `Q1`, `Q2`, … or bare `1`, `2`, … in modal contexts; the parser accepts
//! both everywhere. Code predicates are written `P[term]` / `K[term]` and
//! knowledge operators `Ka`, `Kb`, `K3`, `KArt`, …

mod ast;
mod parse;
mod print;
mod proof;

pub use ast::{Formula, Term};
pub use parse::{parse, parse_term, parse_term_with_env, parse_with_env, ParseError};
pub use print::{print, print_term, print_term_with_env, print_with_env, SymbolEnv};
pub use proof::{Proof, RuleLabel, Step, StepJson, TranscriptError};

#[cfg(test)]
mod tests {
    use num_bigint::BigUint;

    use super::*;

    #[test]
    fn parse_code_pred_with_symbols() {
        let mut env = SymbolEnv::new();
        env.bind("q1", BigUint::from(81u32));
        let f = parse_with_env("Q1 & ~P[D(x,x) Imp q1]", &env).unwrap();
        assert_eq!(
            f,
            Formula::and(
                Formula::DayAtom(1),
                Formula::not(Formula::code_pred(
                    "P",
                    Term::imp(Term::diag(Term::Var, Term::Var), Term::numeral(81u32)),
                )),
            )
        );
        // Plain parse has no symbol table.
        assert!(parse("~P[D(x,x) Imp q1]").is_err());
    }

    #[test]
    fn parse_knowledge_prefixes() {
        let f = parse("Ka (1 -> ~Ka 1)").unwrap();
        assert_eq!(
            f,
            Formula::know(
                "a",
                Formula::implies(
                    Formula::DayAtom(1),
                    Formula::not(Formula::know("a", Formula::DayAtom(1))),
                ),
            )
        );
        assert_eq!(
            parse("KArt ~2").unwrap(),
            Formula::know("Art", Formula::not(Formula::DayAtom(2)))
        );
        // `K[...]` is the knowledge predicate on codes, not an operator.
        assert_eq!(
            parse("K[7]").unwrap(),
            Formula::code_pred("K", Term::numeral(7u32))
        );
    }

    #[test]
    fn parse_error_positions() {
        let err = parse("Q1 &").unwrap_err();
        assert_eq!(err.offset, 4);
        let err = parse("Q0").unwrap_err();
        assert!(err.message.contains("day index 0"));
        let err = parse("R[x]").unwrap_err();
        assert!(err.message.contains("unknown predicate label"));
    }

    #[test]
    fn print_examples() {
        assert_eq!(print(&Formula::Falsum), "false");
        assert_eq!(
            print(&Formula::xor(Formula::DayAtom(1), Formula::DayAtom(2))),
            "Q1 xor Q2"
        );
        // Day atoms print bare under knowledge operators.
        let f = parse("(1 -> ~Ka 1) & (2 -> (~Kb 2 & Kb ~1)) & (1 | 2)").unwrap();
        assert_eq!(print(&f), "(1 -> ~Ka 1) & (2 -> (~Kb 2 & Kb ~1)) & (1 | 2)");
    }

    #[test]
    fn precedence_round_trips() {
        for text in [
            "Q1 & Q2 | Q3",
            "~Q1 -> Q2 <-> Q3",
            "Q1 -> Q2 -> Q3",
            "Q1 & (Q2 | Q3)",
            "P[Neg (x Conj 4) Imp D(7,x)]",
            "K[Conj(1,2)]",
        ] {
            let f = parse(text).unwrap();
            assert_eq!(parse(&print(&f)).unwrap(), f, "{text}");
        }
    }

    #[test]
    fn substitute_examples() {
        let seven = BigUint::from(7u32);
        let f = Formula::code_pred("P", Term::diag(Term::Var, Term::Var));
        assert_eq!(
            f.substitute(&seven),
            Formula::code_pred("P", Term::diag(Term::numeral(7u32), Term::numeral(7u32)))
        );
        assert_eq!(Formula::DayAtom(1).substitute(&seven), Formula::DayAtom(1));
        // Idempotence on closed formulas.
        let closed = f.substitute(&seven);
        assert_eq!(closed.substitute(&BigUint::from(9u32)), closed);
    }

    #[test]
    fn transcript_text_round_trip() {
        let mut sub = Proof::new();
        sub.push(Step::new(parse("Q1 -> Q1").unwrap(), RuleLabel::Taut));
        let mut p = Proof::new();
        let a = p.push(Step::new(parse("Q1 -> Q2").unwrap(), RuleLabel::Taut));
        let b = p.push(Step::new(parse("Q1").unwrap(), RuleLabel::Taut));
        p.push(
            Step::new(parse("Q2").unwrap(), RuleLabel::Mp)
                .with_premises(vec![a, b])
                .with_subproof(sub),
        );
        let text = p.to_text();
        let back = Proof::from_text(&text).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.to_text(), text);

        let json = serde_json::to_string(&p.to_json_steps()).unwrap();
        let steps: Vec<StepJson> = serde_json::from_str(&json).unwrap();
        assert_eq!(Proof::from_json_steps(&steps).unwrap(), p);
    }

    #[test]
    fn transcript_rejects_bad_numbering() {
        let err = Proof::from_text("2. Q1 [TAUT]\n").unwrap_err();
        assert!(matches!(err, TranscriptError::BadNumbering { .. }));
        let err = Proof::from_text("1. Q1 [FROB]\n").unwrap_err();
        assert!(matches!(err, TranscriptError::UnknownRule { .. }));
    }
}
