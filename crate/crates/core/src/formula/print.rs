use std::fmt::{self, Write};

use num_bigint::BigUint;

use super::ast::{Formula, Term};

/// Named numeral bindings for concrete syntax.
///
/// Large Gödel numbers are unwieldy in displayed formulas, so the concrete
/// syntax lets numerals be written as symbolic names (`q1`, `q2`, `h`, …)
/// bound in an environment. Printing substitutes a name for a numeral when
/// one is bound to exactly that value; parsing resolves names back to values.
#[derive(Clone, Debug, Default)]
pub struct SymbolEnv {
    bindings: Vec<(String, BigUint)>,
}

impl SymbolEnv {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `name` to `value`. Later bindings win on lookup by value.
    pub fn bind(&mut self, name: impl Into<String>, value: BigUint) {
        self.bindings.push((name.into(), value));
    }

    pub fn value_of(&self, name: &str) -> Option<&BigUint> {
        self.bindings
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
    }

    pub fn name_of(&self, value: &BigUint) -> Option<&str> {
        self.bindings
            .iter()
            .rev()
            .find(|(_, v)| v == value)
            .map(|(n, _)| n.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BigUint)> {
        self.bindings.iter().map(|(n, v)| (n.as_str(), v))
    }
}

/// Canonical printing; `parse(print(f))` returns a tree equal to `f`.
pub fn print(f: &Formula) -> String {
    render(f, None)
}

/// Canonical printing with numerals abbreviated through `env`.
pub fn print_with_env(f: &Formula, env: &SymbolEnv) -> String {
    render(f, Some(env))
}

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, t, false, None).unwrap();
    out
}

pub fn print_term_with_env(t: &Term, env: &SymbolEnv) -> String {
    let mut out = String::new();
    write_term(&mut out, t, false, Some(env)).unwrap();
    out
}

fn render(f: &Formula, env: Option<&SymbolEnv>) -> String {
    // Day atoms print bare (`1`) in modal formulas and indexed (`Q1`)
    // elsewhere; the parser accepts both forms in any context.
    let bare = f.contains_know();
    let mut out = String::new();
    write_formula(&mut out, f, bare, env).unwrap();
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self, None))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum BinOp {
    And,
    Or,
    Xor,
    Implies,
    Iff,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "&",
            BinOp::Or => "|",
            BinOp::Xor => "xor",
            BinOp::Implies => "->",
            BinOp::Iff => "<->",
        }
    }

    fn of(f: &Formula) -> Option<(BinOp, &Formula, &Formula)> {
        match f {
            Formula::And(a, b) => Some((BinOp::And, a, b)),
            Formula::Or(a, b) => Some((BinOp::Or, a, b)),
            Formula::Xor(a, b) => Some((BinOp::Xor, a, b)),
            Formula::Implies(a, b) => Some((BinOp::Implies, a, b)),
            Formula::Iff(a, b) => Some((BinOp::Iff, a, b)),
        _ => None,
        }
    }

    /// `&`, `|`, `xor` chains print left-associated; `->`, `<->` chains
    /// print right-associated.
    fn right_assoc(self) -> bool {
        matches!(self, BinOp::Implies | BinOp::Iff)
    }
}

// A binary child is parenthesized unless it continues a same-operator chain
// on the operator's associative side; unary operators parenthesize binary
// operands only. This reproduces the conventional display of each
// construction while keeping the printer unambiguous under the declared
// precedences.
fn write_formula(
    out: &mut String,
    f: &Formula,
    bare: bool,
    env: Option<&SymbolEnv>,
) -> fmt::Result {
    match f {
        Formula::Falsum => out.write_str("false"),
        Formula::DayAtom(k) => {
            if bare {
                write!(out, "{k}")
            } else {
                write!(out, "Q{k}")
            }
        }
        Formula::CodePred(label, t) => {
            write!(out, "{label}[")?;
            write_term(out, t, false, env)?;
            out.write_str("]")
        }
        Formula::Not(g) => {
            out.write_str("~")?;
            write_operand(out, g, bare, env)
        }
        Formula::Know(agent, g) => {
            write!(out, "K{agent} ")?;
            write_operand(out, g, bare, env)
        }
        _ => {
            let (op, lhs, rhs) = BinOp::of(f).expect("binary");
            write_child(out, lhs, op, !op.right_assoc(), bare, env)?;
            write!(out, " {} ", op.symbol())?;
            write_child(out, rhs, op, op.right_assoc(), bare, env)
        }
    }
}

fn write_operand(
    out: &mut String,
    g: &Formula,
    bare: bool,
    env: Option<&SymbolEnv>,
) -> fmt::Result {
    if BinOp::of(g).is_some() {
        out.write_str("(")?;
        write_formula(out, g, bare, env)?;
        out.write_str(")")
    } else {
        write_formula(out, g, bare, env)
    }
}

fn write_child(
    out: &mut String,
    child: &Formula,
    parent: BinOp,
    assoc_side: bool,
    bare: bool,
    env: Option<&SymbolEnv>,
) -> fmt::Result {
    let parens = match BinOp::of(child) {
        Some((op, _, _)) => op != parent || !assoc_side,
        None => false,
    };
    if parens {
        out.write_str("(")?;
        write_formula(out, child, bare, env)?;
        out.write_str(")")
    } else {
        write_formula(out, child, bare, env)
    }
}

// Term operators print infix (`Conj`, `Imp`) with binary children always
// parenthesized, `Neg` prefix, and `D` in call form, matching the customary
// display of diagonal constructions.
fn write_term(
    out: &mut String,
    t: &Term,
    parenthesize_binary: bool,
    env: Option<&SymbolEnv>,
) -> fmt::Result {
    let binary = matches!(t, Term::Conj(_, _) | Term::Imp(_, _));
    if binary && parenthesize_binary {
        out.write_str("(")?;
        write_term(out, t, false, env)?;
        return out.write_str(")");
    }
    match t {
        Term::Numeral(n) => match env.and_then(|e| e.name_of(n)) {
            Some(name) => out.write_str(name),
            None => write!(out, "{n}"),
        },
        Term::Var => out.write_str("x"),
        Term::Neg(inner) => {
            out.write_str("Neg ")?;
            write_term(out, inner, true, env)
        }
        Term::Conj(a, b) => {
            write_term(out, a, true, env)?;
            out.write_str(" Conj ")?;
            write_term(out, b, true, env)
        }
        Term::Imp(a, b) => {
            write_term(out, a, true, env)?;
            out.write_str(" Imp ")?;
            write_term(out, b, true, env)
        }
        Term::Diag(a, b) => {
            out.write_str("D(")?;
            write_term(out, a, false, env)?;
            out.write_str(",")?;
            write_term(out, b, false, env)?;
            out.write_str(")")
        }
    }
}
