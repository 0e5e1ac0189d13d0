//! Self-referential announcements and the code-predicate proof kernel.
//!
//! This module builds the Gödelized announcement for an `m`-day week as a
//! fixed point of the diagonalization operator, generates and checks the
//! students' refutation of it, and mechanizes the Knower paradox for a
//! factive, self-applicable knowledge predicate.
//!
//! The provability predicate is treated as an atomic code predicate with an
//! explicit-witness introduction rule (`NEC`) rather than as a first-order
//! existential: the witness is the embedded sub-proof, and the proof relation
//! stays independently checkable through [`crate::godel::check_proof_code`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::formula::{Formula, Proof, RuleLabel, Step, SymbolEnv, Term};
use crate::godel::{self, encode, eval_term, Code};
use crate::truth;

/// Which code-predicate deduction system a proof is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleSetName {
    Fitch,
    Knower,
}

impl fmt::Display for RuleSetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleSetName::Fitch => f.write_str("fitch"),
            RuleSetName::Knower => f.write_str("knower"),
        }
    }
}

/// A closed rule configuration; every proof is checked against exactly one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSet {
    pub name: RuleSetName,
    enabled: BTreeSet<RuleLabel>,
}

impl RuleSet {
    /// The provability system: `TAUT`, `MP`, `EVAL`, `NEC` over predicate `P`.
    pub fn fitch() -> Self {
        RuleSet {
            name: RuleSetName::Fitch,
            enabled: [RuleLabel::Taut, RuleLabel::Mp, RuleLabel::Eval, RuleLabel::Nec]
                .into_iter()
                .collect(),
        }
    }

    /// The knowledge-predicate system: `TAUT`, `MP`, `EVAL`, `SCHEMA_A`,
    /// `AXIOM_B`, `RULE_C` over predicate `K`.
    pub fn knower() -> Self {
        RuleSet {
            name: RuleSetName::Knower,
            enabled: [
                RuleLabel::Taut,
                RuleLabel::Mp,
                RuleLabel::Eval,
                RuleLabel::SchemaA,
                RuleLabel::AxiomB,
                RuleLabel::RuleC,
            ]
            .into_iter()
            .collect(),
        }
    }

    /// Copy of this rule set with one rule removed (for soundness probes).
    pub fn without(&self, rule: RuleLabel) -> Self {
        let mut rs = self.clone();
        rs.enabled.remove(&rule);
        rs
    }

    pub fn allows(&self, rule: RuleLabel) -> bool {
        self.enabled.contains(&rule)
    }

    pub fn enabled_rules(&self) -> impl Iterator<Item = RuleLabel> + '_ {
        self.enabled.iter().copied()
    }

    /// The code-predicate label this system reasons about.
    pub fn pred_label(&self) -> &'static str {
        match self.name {
            RuleSetName::Fitch => "P",
            RuleSetName::Knower => "K",
        }
    }
}

/// Location and cause of the first failing step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckFailure {
    /// 1-based step ids from the outermost transcript down to the failing
    /// step (inner entries address embedded sub-proofs).
    pub path: Vec<usize>,
    pub rule: RuleLabel,
    pub reason: String,
}

impl CheckFailure {
    fn here(step: usize, rule: RuleLabel, reason: impl Into<String>) -> Self {
        CheckFailure {
            path: vec![step],
            rule,
            reason: reason.into(),
        }
    }

    fn nested(mut self, step: usize) -> Self {
        self.path.insert(0, step);
        self
    }

    pub fn path_string(&self) -> String {
        self.path
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// Outcome of checking a proof against a rule set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub ok: bool,
    /// Total number of steps in the transcript, sub-proofs included.
    pub total_steps: usize,
    pub failure: Option<CheckFailure>,
}

impl CheckReport {
    fn accepted(total_steps: usize) -> Self {
        CheckReport {
            ok: true,
            total_steps,
            failure: None,
        }
    }

    fn rejected(total_steps: usize, failure: CheckFailure) -> Self {
        CheckReport {
            ok: false,
            total_steps,
            failure: Some(failure),
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "accepted ({} steps)", self.total_steps),
            Some(fail) => write!(
                f,
                "rejected at step {} ({}): {}",
                fail.path_string(),
                fail.rule,
                fail.reason
            ),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SelfRefError {
    #[error("day count must be at least 1")]
    ZeroDays,
    #[error("the exclusive-or announcement is only defined for m <= 2 (got m = {0})")]
    XorTooWide(u32),
}

/// How the per-day disjuncts of the announcement are joined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connective {
    /// Exact two-day form; exclusive-or chains have unintended parity
    /// semantics for m > 2, so this is limited to m <= 2.
    Xor,
    /// Inclusive disjunction, valid for any horizon.
    Or,
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Connective::Xor => f.write_str("xor"),
            Connective::Or => f.write_str("inclusive-or"),
        }
    }
}

/// The self-referential announcement for an `m`-day week.
///
/// `sentence` is the fixed point: `diag(h, h) = encode(sentence)` holds
/// bit-exactly, and disjunct `k` asserts the exam falls on day `k` while the
/// implication "if not before day k then on day k" is unprovable.
#[derive(Clone, Debug)]
pub struct FitchConstruction {
    pub m: u32,
    pub connective: Connective,
    /// The announcement with the free variable still open.
    pub open_formula: Formula,
    /// Gödel number of `open_formula`.
    pub h: Code,
    /// The closed announcement `S`: `open_formula` with `h` substituted.
    pub sentence: Formula,
    /// Closed per-day terms `t_1 .. t_m` naming the unprovable implications.
    pub day_terms: Vec<Term>,
    /// `q_1 .. q_m`: Gödel numbers of the day atoms.
    pub day_codes: Vec<Code>,
    /// Symbol bindings `q1..qm, h` for display.
    pub env: SymbolEnv,
}

impl FitchConstruction {
    /// The implication named by day `k`'s term:
    /// `(S & ~Q1 & … & ~Q_{k-1}) -> Qk`.
    pub fn day_implication(&self, k: u32) -> Formula {
        let mut parts = vec![self.sentence.clone()];
        for j in 1..k {
            parts.push(Formula::not(Formula::DayAtom(j)));
        }
        Formula::implies(Formula::and_chain(parts), Formula::DayAtom(k))
    }
}

/// Open (pre-substitution) term for day `k`: the days are counted 1-based.
fn open_day_term(day_codes: &[Code], k: u32) -> Term {
    let mut parts = vec![Term::diag(Term::Var, Term::Var)];
    for j in 1..k {
        parts.push(Term::neg(Term::Numeral(
            day_codes[(j - 1) as usize].value().clone(),
        )));
    }
    Term::imp(
        Term::conj_chain(parts),
        Term::Numeral(day_codes[(k - 1) as usize].value().clone()),
    )
}

/// Builds the announcement for an `m`-day week.
pub fn build_fitch(m: u32, connective: Connective) -> Result<FitchConstruction, SelfRefError> {
    if m == 0 {
        return Err(SelfRefError::ZeroDays);
    }
    if connective == Connective::Xor && m > 2 {
        return Err(SelfRefError::XorTooWide(m));
    }

    let day_codes: Vec<Code> = (1..=m)
        .map(|k| encode(&Formula::DayAtom(k)).expect("day atoms are in fragment"))
        .collect();

    let disjuncts: Vec<Formula> = (1..=m)
        .map(|k| {
            Formula::and(
                Formula::DayAtom(k),
                Formula::not(Formula::code_pred("P", open_day_term(&day_codes, k))),
            )
        })
        .collect();
    let open_formula = match connective {
        Connective::Xor => {
            let mut it = disjuncts.into_iter();
            let first = it.next().unwrap();
            it.fold(first, Formula::xor)
        }
        Connective::Or => Formula::or_chain(disjuncts),
    };

    let h = encode(&open_formula).expect("announcement is in fragment");
    let sentence = open_formula.substitute(h.value());
    let day_terms: Vec<Term> = (1..=m)
        .map(|k| open_day_term(&day_codes, k).substitute(h.value()))
        .collect();

    let mut env = SymbolEnv::new();
    for (k, q) in day_codes.iter().enumerate() {
        env.bind(format!("q{}", k + 1), q.value().clone());
    }
    env.bind("h", h.value().clone());

    Ok(FitchConstruction {
        m,
        connective,
        open_formula,
        h,
        sentence,
        day_terms,
        day_codes,
        env,
    })
}

/// Checks a transcript against a code-predicate rule set.
pub fn check(p: &Proof, rs: &RuleSet) -> CheckReport {
    let mut kernel = Kernel {
        rs,
        taut_cache: HashMap::new(),
        sub_cache: HashMap::new(),
    };
    let total = p.total_steps();
    match kernel.check_steps(p, &Ctx::Main) {
        Ok(()) => CheckReport::accepted(total),
        Err(f) => CheckReport::rejected(total, f),
    }
}

#[derive(Clone, PartialEq, Eq)]
enum Ctx {
    /// The outer transcript, or a `NEC` witness (same rule set).
    Main,
    /// A `RULE_C` witness: rules restricted to `TAUT`/`MP`/`EVAL`/`SCHEMA_A`
    /// plus citations of the licensed premise formulas.
    RuleCSub { licensed: Vec<Formula> },
}

struct Kernel<'a> {
    rs: &'a RuleSet,
    taut_cache: HashMap<Formula, bool>,
    /// Memoized verdicts for `NEC` witness proofs, which the generators
    /// duplicate verbatim across steps.
    sub_cache: HashMap<Proof, Result<(), CheckFailure>>,
}

impl<'a> Kernel<'a> {
    fn is_taut(&mut self, f: &Formula) -> Result<bool, String> {
        if let Some(&v) = self.taut_cache.get(f) {
            return Ok(v);
        }
        let v = truth::is_tautology(f)
            .map_err(|e| format!("too many distinct atoms for a truth table ({})", e.count))?;
        self.taut_cache.insert(f.clone(), v);
        Ok(v)
    }

    fn check_steps(&mut self, p: &Proof, ctx: &Ctx) -> Result<(), CheckFailure> {
        if p.is_empty() {
            return Err(CheckFailure::here(0, RuleLabel::Taut, "empty transcript"));
        }
        for (idx, step) in p.steps.iter().enumerate() {
            let id = idx + 1;
            self.check_step(p, step, id, ctx)
                .map_err(|reason| CheckFailure::here(id, step.rule, reason))
                .and_then(|nested| match nested {
                    None => Ok(()),
                    Some(failure) => Err(failure.nested(id)),
                })?;
        }
        Ok(())
    }

    fn check_nec_witness(&mut self, sub: &Proof) -> Result<(), CheckFailure> {
        if let Some(res) = self.sub_cache.get(sub) {
            return res.clone();
        }
        let res = self.check_steps(sub, &Ctx::Main);
        self.sub_cache.insert(sub.clone(), res.clone());
        res
    }

    /// Returns `Err(reason)` for a violation at this step itself, or
    /// `Ok(Some(failure))` for a violation inside an embedded sub-proof.
    fn check_step(
        &mut self,
        p: &Proof,
        step: &Step,
        id: usize,
        ctx: &Ctx,
    ) -> Result<Option<CheckFailure>, String> {
        let rule = step.rule;
        let allowed = match ctx {
            Ctx::Main => self.rs.allows(rule),
            Ctx::RuleCSub { .. } => {
                rule == RuleLabel::Prem
                    || (matches!(
                        rule,
                        RuleLabel::Taut | RuleLabel::Mp | RuleLabel::Eval | RuleLabel::SchemaA
                    ) && self.rs.allows(rule))
            }
        };
        if !allowed {
            return Err(format!(
                "rule {} is not available in the {} system here",
                rule, self.rs.name
            ));
        }

        if step.formula.contains_know() {
            return Err("fragment violation: knowledge operator in a code-predicate proof".into());
        }
        if !fragment_labels_ok(&step.formula, self.rs.pred_label()) {
            return Err(format!(
                "fragment violation: predicate other than {} used",
                self.rs.pred_label()
            ));
        }
        if !step.formula.terms_closed() {
            return Err("open term in a proof step".into());
        }
        for &pr in &step.premises {
            if pr == 0 || pr >= id {
                return Err(format!("premise reference {pr} does not point strictly backwards"));
            }
        }

        let prem = |i: usize| &p.steps[step.premises[i] - 1].formula;
        match rule {
            RuleLabel::Taut => {
                self.expect_shape(step, 0, 0)?;
                if !self.is_taut(&step.formula)? {
                    return Err("conclusion is not a propositional tautology".into());
                }
            }
            RuleLabel::Mp => {
                self.expect_shape(step, 2, 0)?;
                match prem(0) {
                    Formula::Implies(a, b) => {
                        if prem(1) != a.as_ref() {
                            return Err("second premise is not the antecedent of the first".into());
                        }
                        if step.formula != **b {
                            return Err("conclusion is not the consequent of the first premise".into());
                        }
                    }
                    _ => return Err("first premise is not an implication".into()),
                }
            }
            RuleLabel::Eval => {
                self.expect_shape(step, 0, 0)?;
                self.check_eval(&step.formula)?;
            }
            RuleLabel::Nec => {
                self.expect_shape(step, 0, 1)?;
                let n = self.pred_numeral(&step.formula)?;
                let sub = &step.subproofs[0];
                if let Err(f) = self.check_nec_witness(sub) {
                    return Ok(Some(f));
                }
                let concl = sub.conclusion().expect("non-empty checked proof");
                let code = encode(concl).map_err(|e| e.to_string())?;
                if *code.value() != n {
                    return Err(
                        "witness conclusion code does not match the asserted numeral".into(),
                    );
                }
            }
            RuleLabel::SchemaA => {
                self.expect_shape(step, 0, 0)?;
                let Formula::Implies(lhs, rhs) = &step.formula else {
                    return Err("SCHEMA_A conclusion must be an implication".into());
                };
                let n = self.pred_numeral(lhs)?;
                let code = encode(rhs).map_err(|e| e.to_string())?;
                if *code.value() != n {
                    return Err("numeral does not code the consequent".into());
                }
            }
            RuleLabel::AxiomB => {
                self.expect_shape(step, 0, 0)?;
                let n = self.pred_numeral(&step.formula)?;
                let inner = godel::decode(&Code::from(n))
                    .map_err(|_| "numeral does not decode to a formula".to_string())?;
                let Formula::Implies(lhs, rhs) = &inner else {
                    return Err("coded formula is not a SCHEMA_A instance".into());
                };
                let j = self.pred_numeral(lhs)?;
                let code = encode(rhs).map_err(|e| e.to_string())?;
                if *code.value() != j {
                    return Err("coded formula is not a SCHEMA_A instance".into());
                }
            }
            RuleLabel::RuleC => {
                if step.subproofs.len() != 1 {
                    return Err("RULE_C carries exactly one witness sub-proof".into());
                }
                let mut licensed = Vec::new();
                for i in 0..step.premises.len() {
                    let n = self.pred_numeral(prem(i)).map_err(|e| {
                        format!("RULE_C premises must be knowledge assertions K[n]: {e}")
                    })?;
                    let f = godel::decode(&Code::from(n))
                        .map_err(|_| "RULE_C premise numeral does not decode".to_string())?;
                    licensed.push(f);
                }
                let sub = &step.subproofs[0];
                if let Err(f) = self.check_steps(sub, &Ctx::RuleCSub { licensed }) {
                    return Ok(Some(f));
                }
                let n = self.pred_numeral(&step.formula)?;
                let concl = sub.conclusion().expect("non-empty checked proof");
                let code = encode(concl).map_err(|e| e.to_string())?;
                if *code.value() != n {
                    return Err(
                        "witness conclusion code does not match the asserted numeral".into(),
                    );
                }
            }
            RuleLabel::Prem => {
                self.expect_shape(step, 0, 0)?;
                let Ctx::RuleCSub { licensed } = ctx else {
                    unreachable!("PREM admitted only inside RULE_C");
                };
                if !licensed.contains(&step.formula) {
                    return Err("cited formula is not among the licensed premises".into());
                }
            }
            _ => unreachable!("rule filtered by the availability check"),
        }
        Ok(None)
    }

    fn expect_shape(&self, step: &Step, premises: usize, subproofs: usize) -> Result<(), String> {
        if step.premises.len() != premises {
            return Err(format!(
                "{} takes {} premise(s), found {}",
                step.rule,
                premises,
                step.premises.len()
            ));
        }
        if step.subproofs.len() != subproofs {
            return Err(format!(
                "{} takes {} sub-proof(s), found {}",
                step.rule,
                subproofs,
                step.subproofs.len()
            ));
        }
        Ok(())
    }

    /// For a conclusion of shape `L[n]` with the system's predicate label,
    /// returns `n`.
    fn pred_numeral(&self, f: &Formula) -> Result<BigUint, String> {
        match f {
            Formula::CodePred(label, Term::Numeral(n)) if label == self.rs.pred_label() => {
                Ok(n.clone())
            }
            Formula::CodePred(_, _) => Err(format!(
                "expected {}[<numeral>] with a literal numeral argument",
                self.rs.pred_label()
            )),
            _ => Err(format!("expected a {} predicate atom", self.rs.pred_label())),
        }
    }

    /// `EVAL` bridges a predicate on a closed term to the predicate on the
    /// numeral it evaluates to: `L[t] <-> L[n]` with `eval(t) = n`.
    fn check_eval(&self, f: &Formula) -> Result<(), String> {
        let Formula::Iff(lhs, rhs) = f else {
            return Err("EVAL conclusion must be a biconditional".into());
        };
        let Formula::CodePred(l1, t) = lhs.as_ref() else {
            return Err("EVAL left side must be a code predicate".into());
        };
        let n = self.pred_numeral(rhs)?;
        if l1 != self.rs.pred_label() {
            return Err(format!("EVAL predicates must be {}", self.rs.pred_label()));
        }
        let v = eval_term(t).map_err(|e| e.to_string())?;
        if *v.value() != n {
            return Err("evaluation mismatch".into());
        }
        Ok(())
    }
}

/// Only the system's own predicate label may appear in its proofs.
fn fragment_labels_ok(f: &Formula, label: &str) -> bool {
    match f {
        Formula::CodePred(l, _) => l == label,
        Formula::DayAtom(_) | Formula::Falsum => true,
        Formula::Know(_, g) | Formula::Not(g) => fragment_labels_ok(g, label),
        Formula::And(a, b)
        | Formula::Or(a, b)
        | Formula::Xor(a, b)
        | Formula::Implies(a, b)
        | Formula::Iff(a, b) => fragment_labels_ok(a, label) && fragment_labels_ok(b, label),
    }
}

fn pred_on(label: &str, n: &Code) -> Formula {
    Formula::code_pred(label, Term::Numeral(n.value().clone()))
}

/// Generates the students' refutation: a kernel-accepted proof of
/// `~sentence`, eliminating day `m` down to day 1.
///
/// For m = 2 the transcript begins with the two named implications
/// `(S & ~Q1) -> Q2` and (after the first provability introduction)
/// `S -> Q1`, mirroring the classical presentation.
pub fn derive_refutation(fc: &FitchConstruction) -> Proof {
    let mut p = Proof::new();
    let mut p_tj: HashMap<u32, usize> = HashMap::new();
    for k in (1..=fc.m).rev() {
        derive_day_implication(fc, &mut p, k, &p_tj);
        introduce_provability(fc, &mut p, k, &mut p_tj);
    }
    // With every P[t_k] in hand, all disjuncts of the announcement fail.
    let chain = Formula::implies_chain(
        (1..=fc.m)
            .rev()
            .map(|k| Formula::code_pred("P", fc.day_terms[(k - 1) as usize].clone()))
            .collect(),
        Formula::not(fc.sentence.clone()),
    );
    let mut id = p.push(Step::new(chain, RuleLabel::Taut));
    for k in (1..=fc.m).rev() {
        id = mp_peel(&mut p, id, p_tj[&k]);
    }
    p
}

/// Self-contained proof of the day-`k` implication `(S & ~Q1 … ) -> Qk`,
/// used as the `NEC` witness.
fn day_implication_proof(fc: &FitchConstruction, k: u32) -> Proof {
    let mut p = Proof::new();
    let mut p_tj = HashMap::new();
    for j in (k + 1..=fc.m).rev() {
        introduce_provability(fc, &mut p, j, &mut p_tj);
    }
    derive_day_implication(fc, &mut p, k, &p_tj);
    p
}

/// Extends `p` with a derivation of the day-`k` implication, given that
/// `P[t_j]` is available for every later day `j`.
fn derive_day_implication(
    fc: &FitchConstruction,
    p: &mut Proof,
    k: u32,
    p_tj: &HashMap<u32, usize>,
) {
    let goal = fc.day_implication(k);
    let chain = Formula::implies_chain(
        (k + 1..=fc.m)
            .rev()
            .map(|j| Formula::code_pred("P", fc.day_terms[(j - 1) as usize].clone()))
            .collect(),
        goal,
    );
    let mut id = p.push(Step::new(chain, RuleLabel::Taut));
    for j in (k + 1..=fc.m).rev() {
        id = mp_peel(p, id, p_tj[&j]);
    }
}

/// Extends `p` with the provability introduction for day `k`:
/// `NEC` asserts `P[#G_k]` with an embedded witness, `EVAL` bridges the
/// day term to that numeral, and two tautology steps land `P[t_k]`.
fn introduce_provability(
    fc: &FitchConstruction,
    p: &mut Proof,
    k: u32,
    p_tj: &mut HashMap<u32, usize>,
) {
    let witness = day_implication_proof(fc, k);
    let a_k = encode(&fc.day_implication(k)).expect("fragment");
    let p_numeral = pred_on("P", &a_k);
    let p_term = Formula::code_pred("P", fc.day_terms[(k - 1) as usize].clone());

    let nec = p.push(Step::new(p_numeral.clone(), RuleLabel::Nec).with_subproof(witness));
    let eval = p.push(Step::new(
        Formula::iff(p_term.clone(), p_numeral.clone()),
        RuleLabel::Eval,
    ));
    let taut = p.push(Step::new(
        Formula::implies(
            p_numeral.clone(),
            Formula::implies(Formula::iff(p_term.clone(), p_numeral), p_term.clone()),
        ),
        RuleLabel::Taut,
    ));
    let m1 = mp_peel(p, taut, nec);
    let m2 = mp_peel(p, m1, eval);
    p_tj.insert(k, m2);
}

/// Pushes the modus-ponens step peeling the outermost antecedent of
/// `p[imp_id]` using `p[ant_id]`, returning the new step id.
fn mp_peel(p: &mut Proof, imp_id: usize, ant_id: usize) -> usize {
    let Formula::Implies(_, b) = &p.steps[imp_id - 1].formula else {
        panic!("mp_peel on a non-implication");
    };
    let conclusion = (**b).clone();
    p.push(Step::new(conclusion, RuleLabel::Mp).with_premises(vec![imp_id, ant_id]))
}

/// The Knower sentence `S = K[Neg(D(h, h))]` with `eval` of its argument
/// equal to `#(~S)`: the sentence asserts that its own negation is known.
#[derive(Clone, Debug)]
pub struct KnowerConstruction {
    /// The open diagonal formula `K[Neg(D(x, x))]`.
    pub open_formula: Formula,
    /// Gödel number of the open formula.
    pub h: Code,
    /// The closed sentence `S`.
    pub sentence: Formula,
    /// `#(~S)`, the code the sentence's term evaluates to.
    pub negated_code: Code,
}

/// Builds the Knower sentence by diagonalization.
pub fn build_knower() -> KnowerConstruction {
    let open_formula = Formula::code_pred("K", Term::neg(Term::diag(Term::Var, Term::Var)));
    let h = encode(&open_formula).expect("fragment");
    let sentence = open_formula.substitute(h.value());
    let negated_code = encode(&Formula::not(sentence.clone())).expect("fragment");
    KnowerConstruction {
        open_formula,
        h,
        sentence,
        negated_code,
    }
}

/// Derives `false` under the Knower rule set: the factivity instance for
/// `S` yields `~S`; knowing that instance (`AXIOM_B`) lets `RULE_C` conclude
/// that `~S` is known, which is `S` itself; contradiction.
pub fn derive_knower_contradiction(kc: &KnowerConstruction) -> Proof {
    let s = kc.sentence.clone();
    let not_s = Formula::not(s.clone());
    let k_nstar = pred_on("K", &kc.negated_code);
    let a_instance = Formula::implies(k_nstar.clone(), not_s.clone());
    let b_code = encode(&a_instance).expect("fragment");

    // Shared propositional glue: from the factivity instance and the
    // evaluation bridge, the sentence refutes itself.
    let bridge = Formula::iff(s.clone(), k_nstar.clone());
    let glue = Formula::implies(
        a_instance.clone(),
        Formula::implies(bridge.clone(), not_s.clone()),
    );

    let refute_s = |p: &mut Proof, first: usize| -> usize {
        let eval = p.push(Step::new(bridge.clone(), RuleLabel::Eval));
        let taut = p.push(Step::new(glue.clone(), RuleLabel::Taut));
        let m1 = mp_peel(p, taut, first);
        mp_peel(p, m1, eval)
    };

    let mut p = Proof::new();
    let schema = p.push(Step::new(a_instance.clone(), RuleLabel::SchemaA));
    let not_s_id = refute_s(&mut p, schema);

    // The same refutation, replayed from the licensed premise, witnesses
    // that ~S is known.
    let mut witness = Proof::new();
    let prem = witness.push(Step::new(a_instance, RuleLabel::Prem));
    refute_s(&mut witness, prem);

    let axiom_b = p.push(Step::new(pred_on("K", &b_code), RuleLabel::AxiomB));
    let rule_c = p.push(
        Step::new(k_nstar.clone(), RuleLabel::RuleC)
            .with_premises(vec![axiom_b])
            .with_subproof(witness),
    );

    let back = p.push(Step::new(
        Formula::implies(bridge.clone(), Formula::implies(k_nstar.clone(), s.clone())),
        RuleLabel::Taut,
    ));
    let eval2 = p.push(Step::new(bridge, RuleLabel::Eval));
    let m1 = mp_peel(&mut p, back, eval2);
    let s_id = mp_peel(&mut p, m1, rule_c);

    let collapse = p.push(Step::new(
        Formula::implies(
            s,
            Formula::implies(not_s, Formula::Falsum),
        ),
        RuleLabel::Taut,
    ));
    let m2 = mp_peel(&mut p, collapse, s_id);
    mp_peel(&mut p, m2, not_s_id);
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, print_with_env};
    use crate::godel::{check_proof_code, decode, diag, proof_code};

    #[test]
    fn fixed_point_is_bit_exact() {
        for m in 1..=5 {
            for connective in [Connective::Xor, Connective::Or] {
                if connective == Connective::Xor && m > 2 {
                    continue;
                }
                let fc = build_fitch(m, connective).unwrap();
                assert_eq!(
                    diag(&fc.h, fc.h.value()).unwrap(),
                    encode(&fc.sentence).unwrap(),
                    "m={m} {connective}"
                );
            }
        }
    }

    #[test]
    fn two_day_announcement_prints_in_classical_shape() {
        let fc = build_fitch(2, Connective::Xor).unwrap();
        assert_eq!(
            print_with_env(&fc.open_formula, &fc.env),
            "(Q1 & ~P[D(x,x) Imp q1]) xor (Q2 & ~P[(D(x,x) Conj Neg q1) Imp q2])"
        );
        // One-day degenerate case: a single conjunct, no disjunction.
        let fc1 = build_fitch(1, Connective::Or).unwrap();
        assert_eq!(
            fc1.sentence,
            Formula::and(
                Formula::DayAtom(1),
                Formula::not(Formula::code_pred("P", fc1.day_terms[0].clone())),
            )
        );
    }

    #[test]
    fn construction_preconditions() {
        assert_eq!(
            build_fitch(0, Connective::Or).unwrap_err(),
            SelfRefError::ZeroDays
        );
        assert_eq!(
            build_fitch(3, Connective::Xor).unwrap_err(),
            SelfRefError::XorTooWide(3)
        );
    }

    #[test]
    fn day_terms_evaluate_to_the_named_implications() {
        for m in 1..=4 {
            let fc = build_fitch(m, Connective::Or).unwrap();
            for k in 1..=m {
                assert_eq!(
                    eval_term(&fc.day_terms[(k - 1) as usize]).unwrap(),
                    encode(&fc.day_implication(k)).unwrap(),
                    "m={m} k={k}"
                );
            }
        }
    }

    #[test]
    fn code_sizes_are_pinned() {
        // Regression pins for the shipped coding scheme.
        let sizes: Vec<(usize, usize)> = (1..=3)
            .map(|m| {
                let fc = build_fitch(m, Connective::Or).unwrap();
                (fc.h.digit_len(), encode(&fc.sentence).unwrap().digit_len())
            })
            .collect();
        assert_eq!(sizes, vec![(50, 296), (130, 1392), (236, 3661)]);
        let kc = build_knower();
        assert_eq!(kc.h.digit_len(), 17);
        assert_eq!(kc.negated_code.digit_len(), 106);
    }

    #[test]
    fn refutation_is_kernel_accepted() {
        for (m, connective) in [
            (1, Connective::Or),
            (1, Connective::Xor),
            (2, Connective::Or),
            (2, Connective::Xor),
            (3, Connective::Or),
        ] {
            let fc = build_fitch(m, connective).unwrap();
            let p = derive_refutation(&fc);
            let report = check(&p, &RuleSet::fitch());
            assert!(report.ok, "m={m} {connective}: {report}");
            assert_eq!(p.conclusion(), Some(&Formula::not(fc.sentence.clone())));
        }
    }

    #[test]
    fn two_day_refutation_contains_the_named_steps() {
        let fc = build_fitch(2, Connective::Xor).unwrap();
        let p = derive_refutation(&fc);
        // (1): (S & ~Q1) -> Q2 opens the transcript.
        assert_eq!(p.steps[0].formula, fc.day_implication(2));
        // (2): S -> Q1 appears as a main-line step.
        let step2 = fc.day_implication(1);
        assert!(p.steps.iter().any(|s| s.formula == step2));
    }

    #[test]
    fn refutation_self_applicability() {
        let fc = build_fitch(2, Connective::Xor).unwrap();
        let p = derive_refutation(&fc);
        let not_s = encode(&Formula::not(fc.sentence.clone())).unwrap();
        assert!(check_proof_code(&proof_code(&p).unwrap(), &not_s));
        assert!(!check_proof_code(
            &proof_code(&p).unwrap(),
            &encode(&fc.sentence).unwrap()
        ));
    }

    #[test]
    fn disabling_any_used_rule_rejects() {
        let fc = build_fitch(2, Connective::Xor).unwrap();
        let p = derive_refutation(&fc);
        let rs = RuleSet::fitch();
        for rule in [RuleLabel::Taut, RuleLabel::Mp, RuleLabel::Eval, RuleLabel::Nec] {
            assert!(p.any_step(&mut |s| s.rule == rule), "{rule} unused");
            let report = check(&p, &rs.without(rule));
            assert!(!report.ok, "accepted without {rule}");
            let failure = report.failure.unwrap();
            assert_eq!(failure.rule, rule);
        }
    }

    #[test]
    fn tampered_eval_step_is_rejected() {
        let fc = build_fitch(1, Connective::Or).unwrap();
        let p = derive_refutation(&fc);
        let tampered = p.map_formulas(&|f| match f {
            Formula::Iff(a, b) => {
                // Claim a wrong numeral on the right of the bridge.
                if let Formula::CodePred(l, Term::Numeral(n)) = b.as_ref() {
                    Formula::iff(
                        (**a).clone(),
                        Formula::code_pred(l.clone(), Term::Numeral(n + 1u32)),
                    )
                } else {
                    f.clone()
                }
            }
            _ => f.clone(),
        });
        let report = check(&tampered, &RuleSet::fitch());
        assert!(!report.ok);
        let failure = report.failure.unwrap();
        assert!(
            failure.reason.contains("evaluation mismatch")
                || failure.reason.contains("does not match"),
            "{failure:?}"
        );
    }

    #[test]
    fn knower_sentence_asserts_its_own_negation_is_known() {
        let kc = build_knower();
        let Formula::CodePred(label, term) = &kc.sentence else {
            panic!("knower sentence shape");
        };
        assert_eq!(label, "K");
        assert_eq!(eval_term(term).unwrap(), kc.negated_code);
        assert_eq!(
            decode(&diag(&kc.h, kc.h.value()).unwrap()).unwrap(),
            kc.sentence
        );
    }

    #[test]
    fn knower_contradiction_checks_and_ablates() {
        let kc = build_knower();
        let p = derive_knower_contradiction(&kc);
        assert_eq!(p.conclusion(), Some(&Formula::Falsum));
        let rs = RuleSet::knower();
        assert!(check(&p, &rs).ok);
        for rule in [RuleLabel::SchemaA, RuleLabel::AxiomB, RuleLabel::RuleC] {
            assert!(p.any_step(&mut |s| s.rule == rule), "{rule} unused");
            assert!(!check(&p, &rs.without(rule)).ok, "accepted without {rule}");
        }
        // The refutation of a different system does not check here.
        let fc = build_fitch(1, Connective::Or).unwrap();
        assert!(!check(&derive_refutation(&fc), &rs).ok);
    }

    #[test]
    fn rule_c_witness_must_avoid_nec() {
        let kc = build_knower();
        let mut p = derive_knower_contradiction(&kc);
        // Replace the RULE_C witness with one that smuggles in NEC.
        let target = p
            .steps
            .iter()
            .position(|s| s.rule == RuleLabel::RuleC)
            .unwrap();
        let mut witness = Proof::new();
        let inner_taut = {
            let mut w = Proof::new();
            w.push(Step::new(parse("Q1 -> Q1").unwrap(), RuleLabel::Taut));
            w
        };
        let coded = encode(&parse("Q1 -> Q1").unwrap()).unwrap();
        witness.push(
            Step::new(pred_on("K", &coded), RuleLabel::Nec).with_subproof(inner_taut),
        );
        p.steps[target].subproofs = vec![witness];
        let report = check(&p, &RuleSet::knower());
        assert!(!report.ok);
        assert_eq!(report.failure.unwrap().rule, RuleLabel::Nec);
    }

    #[test]
    fn fragment_violations_are_rejected() {
        let mut p = Proof::new();
        p.push(Step::new(parse("Ka 1 -> Ka 1").unwrap(), RuleLabel::Taut));
        let report = check(&p, &RuleSet::fitch());
        assert!(!report.ok);
        assert!(report.failure.unwrap().reason.contains("fragment"));
        // The Fitch system must not mention the Knower's predicate.
        let mut p2 = Proof::new();
        p2.push(Step::new(parse("K[5] -> K[5]").unwrap(), RuleLabel::Taut));
        assert!(!check(&p2, &RuleSet::fitch()).ok);
    }

    #[test]
    fn transcripts_round_trip_and_recheck() {
        let fc = build_fitch(2, Connective::Xor).unwrap();
        let p = derive_refutation(&fc);
        let text = p.to_text();
        let back = Proof::from_text(&text).unwrap();
        assert_eq!(back, p);
        assert!(check(&back, &RuleSet::fitch()).ok);
        let json = serde_json::to_string(&p.to_json_steps()).unwrap();
        let steps: Vec<crate::formula::StepJson> = serde_json::from_str(&json).unwrap();
        assert_eq!(Proof::from_json_steps(&steps).unwrap(), p);
    }
}
