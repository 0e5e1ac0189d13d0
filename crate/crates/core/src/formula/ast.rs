use num_bigint::BigUint;

/// A code-valued term of the object language.
///
/// Terms denote natural numbers. `Neg`, `Conj` and `Imp` are the code-level
/// connective functions, and `Diag` is the diagonalization operator `D`; the
/// single free variable is written `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// A numeral literal (a non-negative integer).
    Numeral(BigUint),
    /// The free variable `x`.
    Var,
    /// `Neg(t)`: the code of the negation of the formula coded by `t`.
    Neg(Box<Term>),
    /// `t1 Conj t2`: the code of the conjunction of the coded formulas.
    Conj(Box<Term>, Box<Term>),
    /// `t1 Imp t2`: the code of the implication of the coded formulas.
    Imp(Box<Term>, Box<Term>),
    /// `D(t1, t2)`: the code of the formula coded by `t1` with its free
    /// variable replaced by the numeral for the value of `t2`.
    Diag(Box<Term>, Box<Term>),
}

impl Term {
    pub fn numeral(n: impl Into<BigUint>) -> Self {
        Term::Numeral(n.into())
    }

    pub fn neg(t: Term) -> Self {
        Term::Neg(Box::new(t))
    }

    pub fn conj(t1: Term, t2: Term) -> Self {
        Term::Conj(Box::new(t1), Box::new(t2))
    }

    pub fn imp(t1: Term, t2: Term) -> Self {
        Term::Imp(Box::new(t1), Box::new(t2))
    }

    pub fn diag(t1: Term, t2: Term) -> Self {
        Term::Diag(Box::new(t1), Box::new(t2))
    }

    /// Left-associated `Conj` chain: `conj_chain([a, b, c])` is
    /// `(a Conj b) Conj c`. Panics on an empty chain.
    pub fn conj_chain(parts: Vec<Term>) -> Self {
        let mut it = parts.into_iter();
        let first = it.next().expect("conj_chain needs at least one term");
        it.fold(first, Term::conj)
    }

    /// A term is closed iff it contains no occurrence of the free variable.
    pub fn is_closed(&self) -> bool {
        match self {
            Term::Numeral(_) => true,
            Term::Var => false,
            Term::Neg(t) => t.is_closed(),
            Term::Conj(a, b) | Term::Imp(a, b) | Term::Diag(a, b) => {
                a.is_closed() && b.is_closed()
            }
        }
    }

    /// Replaces every occurrence of the free variable by the numeral `n`.
    pub fn substitute(&self, n: &BigUint) -> Term {
        match self {
            Term::Numeral(_) => self.clone(),
            Term::Var => Term::Numeral(n.clone()),
            Term::Neg(t) => Term::neg(t.substitute(n)),
            Term::Conj(a, b) => Term::conj(a.substitute(n), b.substitute(n)),
            Term::Imp(a, b) => Term::imp(a.substitute(n), b.substitute(n)),
            Term::Diag(a, b) => Term::diag(a.substitute(n), b.substitute(n)),
        }
    }

    /// Number of nodes in the term tree.
    pub fn size(&self) -> usize {
        match self {
            Term::Numeral(_) | Term::Var => 1,
            Term::Neg(t) => 1 + t.size(),
            Term::Conj(a, b) | Term::Imp(a, b) | Term::Diag(a, b) => 1 + a.size() + b.size(),
        }
    }

    fn max_numeral_digits(&self, acc: &mut usize) {
        match self {
            Term::Numeral(n) => *acc = (*acc).max(n.to_string().len()),
            Term::Var => {}
            Term::Neg(t) => t.max_numeral_digits(acc),
            Term::Conj(a, b) | Term::Imp(a, b) | Term::Diag(a, b) => {
                a.max_numeral_digits(acc);
                b.max_numeral_digits(acc);
            }
        }
    }
}

/// A formula of the object language.
///
/// A single shared syntax tree serves both the self-reference fragment (day
/// atoms and code predicates, no knowledge operators) and the modal fragment
/// (day atoms and knowledge operators, no code predicates). Fragment
/// discipline is enforced by the rule sets at check time, not at
/// construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    /// `Q<k>`: the exam occurs on day `k` (1-based).
    DayAtom(u32),
    /// `P[t]` or `K[t]`: an atomic predicate on the code denoted by `t`.
    CodePred(String, Term),
    /// `K<agent> f`: the agent knows `f`.
    Know(String, Box<Formula>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Xor(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// `false`.
    Falsum,
}

impl Formula {
    pub fn code_pred(label: impl Into<String>, t: Term) -> Self {
        Formula::CodePred(label.into(), t)
    }

    pub fn know(agent: impl Into<String>, f: Formula) -> Self {
        Formula::Know(agent.into(), Box::new(f))
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(f1: Formula, f2: Formula) -> Self {
        Formula::And(Box::new(f1), Box::new(f2))
    }

    pub fn or(f1: Formula, f2: Formula) -> Self {
        Formula::Or(Box::new(f1), Box::new(f2))
    }

    pub fn xor(f1: Formula, f2: Formula) -> Self {
        Formula::Xor(Box::new(f1), Box::new(f2))
    }

    pub fn implies(f1: Formula, f2: Formula) -> Self {
        Formula::Implies(Box::new(f1), Box::new(f2))
    }

    pub fn iff(f1: Formula, f2: Formula) -> Self {
        Formula::Iff(Box::new(f1), Box::new(f2))
    }

    /// Left-associated conjunction `(…(f1 & f2) & …) & fn`. Panics on empty.
    pub fn and_chain(parts: Vec<Formula>) -> Self {
        let mut it = parts.into_iter();
        let first = it.next().expect("and_chain needs at least one formula");
        it.fold(first, Formula::and)
    }

    /// Left-associated disjunction. Panics on empty.
    pub fn or_chain(parts: Vec<Formula>) -> Self {
        let mut it = parts.into_iter();
        let first = it.next().expect("or_chain needs at least one formula");
        it.fold(first, Formula::or)
    }

    /// Right-associated implication chain `f1 -> (f2 -> (… -> goal))`.
    pub fn implies_chain(antecedents: Vec<Formula>, goal: Formula) -> Self {
        antecedents
            .into_iter()
            .rev()
            .fold(goal, |acc, a| Formula::implies(a, acc))
    }

    /// Replaces the free variable by `n` in every term of the formula.
    pub fn substitute(&self, n: &BigUint) -> Formula {
        match self {
            Formula::DayAtom(_) | Formula::Falsum => self.clone(),
            Formula::CodePred(label, t) => Formula::CodePred(label.clone(), t.substitute(n)),
            Formula::Know(agent, f) => Formula::know(agent.clone(), f.substitute(n)),
            Formula::Not(f) => Formula::not(f.substitute(n)),
            Formula::And(a, b) => Formula::and(a.substitute(n), b.substitute(n)),
            Formula::Or(a, b) => Formula::or(a.substitute(n), b.substitute(n)),
            Formula::Xor(a, b) => Formula::xor(a.substitute(n), b.substitute(n)),
            Formula::Implies(a, b) => Formula::implies(a.substitute(n), b.substitute(n)),
            Formula::Iff(a, b) => Formula::iff(a.substitute(n), b.substitute(n)),
        }
    }

    /// True iff the formula contains a knowledge operator.
    pub fn contains_know(&self) -> bool {
        match self {
            Formula::Know(_, _) => true,
            Formula::DayAtom(_) | Formula::CodePred(_, _) | Formula::Falsum => false,
            Formula::Not(f) => f.contains_know(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Xor(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.contains_know() || b.contains_know(),
        }
    }

    /// True iff the formula contains a code-predicate atom anywhere,
    /// including under knowledge operators.
    pub fn contains_code_pred(&self) -> bool {
        match self {
            Formula::CodePred(_, _) => true,
            Formula::DayAtom(_) | Formula::Falsum => false,
            Formula::Know(_, f) | Formula::Not(f) => f.contains_code_pred(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Xor(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.contains_code_pred() || b.contains_code_pred(),
        }
    }

    /// True iff every term occurring in the formula is closed.
    pub fn terms_closed(&self) -> bool {
        match self {
            Formula::DayAtom(_) | Formula::Falsum => true,
            Formula::CodePred(_, t) => t.is_closed(),
            Formula::Know(_, f) | Formula::Not(f) => f.terms_closed(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Xor(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.terms_closed() && b.terms_closed(),
        }
    }

    /// Number of nodes in the formula tree, terms included.
    pub fn size(&self) -> usize {
        match self {
            Formula::DayAtom(_) | Formula::Falsum => 1,
            Formula::CodePred(_, t) => 1 + t.size(),
            Formula::Know(_, f) | Formula::Not(f) => 1 + f.size(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Xor(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Length in decimal digits of the longest numeral in the formula
    /// (at least 1, so it can serve as a multiplicative bound).
    pub fn max_numeral_digits(&self) -> usize {
        let mut acc = 1;
        self.visit_terms(&mut |t| t.max_numeral_digits(&mut acc));
        acc
    }

    /// Renames every knowledge-operator agent through `rename`.
    pub fn map_agents(&self, rename: &impl Fn(&str) -> String) -> Formula {
        match self {
            Formula::DayAtom(_) | Formula::Falsum | Formula::CodePred(_, _) => self.clone(),
            Formula::Know(agent, f) => Formula::know(rename(agent), f.map_agents(rename)),
            Formula::Not(f) => Formula::not(f.map_agents(rename)),
            Formula::And(a, b) => Formula::and(a.map_agents(rename), b.map_agents(rename)),
            Formula::Or(a, b) => Formula::or(a.map_agents(rename), b.map_agents(rename)),
            Formula::Xor(a, b) => Formula::xor(a.map_agents(rename), b.map_agents(rename)),
            Formula::Implies(a, b) => {
                Formula::implies(a.map_agents(rename), b.map_agents(rename))
            }
            Formula::Iff(a, b) => Formula::iff(a.map_agents(rename), b.map_agents(rename)),
        }
    }

    fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Formula::DayAtom(_) | Formula::Falsum => {}
            Formula::CodePred(_, t) => f(t),
            Formula::Know(_, g) | Formula::Not(g) => g.visit_terms(f),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Xor(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
        }
    }
}
