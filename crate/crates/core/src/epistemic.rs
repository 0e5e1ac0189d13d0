//! The knowledge-rule formalization of the announcement.
//!
//! One agent per day ("the students on the eve of day k"); the announcement
//! says the exam falls on some day, is not known on its eve, and that by its
//! eve every earlier day is known to have passed. Three assumptions about
//! knowledge join the logic:
//!
//! * `KD` — knowledge distributes over conjunction and over implication;
//! * `KI` — all logical truths are known (applied to an embedded
//!   hypothesis-free derivation);
//! * `KE` — it is not possible to know something false (the axiom
//!   `K<a> A -> A`).
//!
//! `KD` and `KE` are admitted both as inference rules and as their axiom
//! (conditional) forms: the axiom forms are what make the hypothesis-free
//! elimination lemma derivable at all, while the rule forms keep the
//! contradiction transcript parallel to the informal argument. The single
//! permitted hypothesis (`HYP`) is the knowledge tower
//! `K_1(K_2(… K_m(announcement)))`, which at m = 2 is exactly `Ka Kb (‡)`.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::formula::{Formula, Proof, RuleLabel, Step};
use crate::selfref::{CheckFailure, CheckReport};
use crate::truth;

/// The designated-student labels (the five-student lineup variant).
pub const DESIGNATED_STUDENTS: [&str; 5] = ["Art", "Bob", "Carl", "Don", "Eric"];

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EpistemicError {
    #[error("day count must be at least 1")]
    ZeroDays,
    #[error("invalid agent list: {0}")]
    BadAgents(String),
    #[error("the elimination lemma needs at least two days (the one-day case is the direct contradiction)")]
    OneDayLemma,
    #[error("the designated-student preset has 5 students (got m = {0})")]
    TooManyStudents(u32),
}

/// A day horizon, one agent per day, and the enabled knowledge rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpistemicSystem {
    pub m: u32,
    agents: Vec<String>,
    enabled: BTreeSet<RuleLabel>,
}

fn all_rules() -> BTreeSet<RuleLabel> {
    [
        RuleLabel::KdConj,
        RuleLabel::KdMp,
        RuleLabel::Ki,
        RuleLabel::Ke,
        RuleLabel::Hyp,
    ]
    .into_iter()
    .collect()
}

impl EpistemicSystem {
    /// Default agent labels: `a`/`b` for the classical two-day week, day
    /// numbers otherwise.
    pub fn new(m: u32) -> Result<Self, EpistemicError> {
        let agents = if m == 2 {
            vec!["a".to_string(), "b".to_string()]
        } else {
            (1..=m).map(|k| k.to_string()).collect()
        };
        Self::with_agents(m, agents)
    }

    /// The five-student lineup: Art sees everyone later in the line, so the
    /// nested-knowledge hypothesis needs no temporal or KK principle.
    pub fn designated_students(m: u32) -> Result<Self, EpistemicError> {
        if m as usize > DESIGNATED_STUDENTS.len() {
            return Err(EpistemicError::TooManyStudents(m));
        }
        Self::with_agents(
            m,
            DESIGNATED_STUDENTS[..m as usize]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        )
    }

    pub fn with_agents(m: u32, agents: Vec<String>) -> Result<Self, EpistemicError> {
        if m == 0 {
            return Err(EpistemicError::ZeroDays);
        }
        if agents.len() != m as usize {
            return Err(EpistemicError::BadAgents(format!(
                "need exactly {m} agents, got {}",
                agents.len()
            )));
        }
        for a in &agents {
            if a.is_empty() || !a.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_') {
                return Err(EpistemicError::BadAgents(format!(
                    "agent id '{a}' is not alphanumeric"
                )));
            }
        }
        let mut seen = BTreeSet::new();
        for a in &agents {
            if !seen.insert(a) {
                return Err(EpistemicError::BadAgents(format!("duplicate agent '{a}'")));
            }
        }
        Ok(EpistemicSystem {
            m,
            agents,
            enabled: all_rules(),
        })
    }

    /// Copy with one rule disabled (for soundness probes).
    pub fn without(&self, rule: RuleLabel) -> Self {
        let mut sys = self.clone();
        sys.enabled.remove(&rule);
        sys
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    /// Agent for day `k` (1-based).
    pub fn agent(&self, k: u32) -> &str {
        &self.agents[(k - 1) as usize]
    }

    pub fn enabled_rules(&self) -> impl Iterator<Item = RuleLabel> + '_ {
        self.enabled.iter().copied()
    }

    /// The announcement (‡) for this horizon.
    pub fn announcement(&self) -> Announcement {
        build_announcement(self)
    }

    /// The tower hypothesis `K_1(K_2(… K_m(‡)))`; at m = 2 this is `Ka Kb ‡`.
    pub fn tower(&self) -> Formula {
        self.tower_from(1)
    }

    /// `K_j(K_{j+1}(… K_m(‡)))`; `tower_from(m + 1)` is the announcement.
    pub fn tower_from(&self, j: u32) -> Formula {
        let mut f = self.announcement().formula;
        for k in (j..=self.m).rev() {
            f = Formula::know(self.agent(k), f);
        }
        f
    }

    fn disjunction(&self) -> Formula {
        Formula::or_chain((1..=self.m).map(Formula::DayAtom).collect())
    }
}

/// The announcement (‡): one conjunct per day plus the disjunction that the
/// exam happens at all.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Announcement {
    pub m: u32,
    pub formula: Formula,
}

/// Builds (‡): conjunct `k` is
/// `k -> (~K_k k & K_k ~1 & … & K_k ~(k-1))`, and the final conjunct is
/// `1 | 2 | … | m`.
pub fn build_announcement(sys: &EpistemicSystem) -> Announcement {
    let mut conjuncts: Vec<Formula> = (1..=sys.m)
        .map(|k| {
            let agent = sys.agent(k);
            let mut parts = vec![Formula::not(Formula::know(agent, Formula::DayAtom(k)))];
            for j in 1..k {
                parts.push(Formula::know(
                    agent,
                    Formula::not(Formula::DayAtom(j)),
                ));
            }
            Formula::implies(Formula::DayAtom(k), Formula::and_chain(parts))
        })
        .collect();
    conjuncts.push(sys.disjunction());
    Announcement {
        m: sys.m,
        formula: Formula::and_chain(conjuncts),
    }
}

/// Checks a transcript against the epistemic rules.
///
/// `TAUT` and `MP` are always available; `HYP`, `KD_CONJ`, `KD_MP`, `KE` and
/// `KI` according to the system's enabled set. `KD_CONJ`, `KD_MP` and `KE`
/// are accepted in rule form (with premises) and in axiom form (the
/// corresponding conditional, with none).
pub fn check(p: &Proof, sys: &EpistemicSystem) -> CheckReport {
    let mut kernel = EpKernel {
        sys,
        tower: sys.tower(),
        taut_cache: HashMap::new(),
        sub_cache: HashMap::new(),
    };
    let total = p.total_steps();
    match kernel.check_steps(p) {
        Ok(()) => CheckReport {
            ok: true,
            total_steps: total,
            failure: None,
        },
        Err(failure) => CheckReport {
            ok: false,
            total_steps: total,
            failure: Some(failure),
        },
    }
}

struct EpKernel<'a> {
    sys: &'a EpistemicSystem,
    tower: Formula,
    taut_cache: HashMap<Formula, bool>,
    sub_cache: HashMap<Proof, Result<(), CheckFailure>>,
}

impl<'a> EpKernel<'a> {
    fn is_taut(&mut self, f: &Formula) -> Result<bool, String> {
        if let Some(&v) = self.taut_cache.get(f) {
            return Ok(v);
        }
        let v = truth::is_tautology(f)
            .map_err(|e| format!("too many distinct atoms for a truth table ({})", e.count))?;
        self.taut_cache.insert(f.clone(), v);
        Ok(v)
    }

    fn allowed(&self, rule: RuleLabel) -> bool {
        matches!(rule, RuleLabel::Taut | RuleLabel::Mp) || self.sys.enabled.contains(&rule)
    }

    fn agent_known(&self, agent: &str) -> Result<(), String> {
        if self.sys.agents.iter().any(|a| a == agent) {
            Ok(())
        } else {
            Err(format!("agent '{agent}' is not declared in this system"))
        }
    }

    fn check_steps(&mut self, p: &Proof) -> Result<(), CheckFailure> {
        if p.is_empty() {
            return Err(CheckFailure {
                path: vec![0],
                rule: RuleLabel::Taut,
                reason: "empty transcript".into(),
            });
        }
        for (idx, step) in p.steps.iter().enumerate() {
            let id = idx + 1;
            match self.check_step(p, step, id) {
                Ok(None) => {}
                Ok(Some(mut nested)) => {
                    nested.path.insert(0, id);
                    return Err(nested);
                }
                Err(reason) => {
                    return Err(CheckFailure {
                        path: vec![id],
                        rule: step.rule,
                        reason,
                    })
                }
            }
        }
        Ok(())
    }

    fn check_ki_witness(&mut self, sub: &Proof) -> Result<(), CheckFailure> {
        if let Some(res) = self.sub_cache.get(sub) {
            return res.clone();
        }
        let res = self.check_steps(sub);
        self.sub_cache.insert(sub.clone(), res.clone());
        res
    }

    fn check_step(
        &mut self,
        p: &Proof,
        step: &Step,
        id: usize,
    ) -> Result<Option<CheckFailure>, String> {
        let rule = step.rule;
        if !self.allowed(rule) {
            return Err(format!("rule {rule} is not enabled in this system"));
        }
        if step.formula.contains_code_pred() {
            return Err("fragment violation: code predicate in a modal proof".into());
        }
        for &pr in &step.premises {
            if pr == 0 || pr >= id {
                return Err(format!(
                    "premise reference {pr} does not point strictly backwards"
                ));
            }
        }
        let prem = |i: usize| &p.steps[step.premises[i] - 1].formula;
        let shape = |np: usize, ns: usize| -> Result<(), String> {
            if step.premises.len() != np {
                return Err(format!(
                    "{rule} takes {np} premise(s) in this form, found {}",
                    step.premises.len()
                ));
            }
            if step.subproofs.len() != ns {
                return Err(format!(
                    "{rule} takes {ns} sub-proof(s), found {}",
                    step.subproofs.len()
                ));
            }
            Ok(())
        };

        match rule {
            RuleLabel::Taut => {
                shape(0, 0)?;
                if !self.is_taut(&step.formula)? {
                    return Err("conclusion is not a propositional tautology".into());
                }
            }
            RuleLabel::Mp => {
                shape(2, 0)?;
                match prem(0) {
                    Formula::Implies(a, b) => {
                        if prem(1) != a.as_ref() {
                            return Err("second premise is not the antecedent of the first".into());
                        }
                        if step.formula != **b {
                            return Err(
                                "conclusion is not the consequent of the first premise".into()
                            );
                        }
                    }
                    _ => return Err("first premise is not an implication".into()),
                }
            }
            RuleLabel::Hyp => {
                shape(0, 0)?;
                if step.formula != self.tower {
                    return Err("HYP must cite the declared knowledge-tower hypothesis".into());
                }
            }
            RuleLabel::KdConj => {
                if step.premises.is_empty() {
                    shape(0, 0)?;
                    // Axiom form: K<a>(A & B) -> K<a>(A or B).
                    let Formula::Implies(lhs, rhs) = &step.formula else {
                        return Err("KD_CONJ axiom form must be an implication".into());
                    };
                    let (agent, a, b) = split_know_and(lhs)
                        .ok_or("KD_CONJ axiom antecedent must be K<a>(A & B)")?;
                    self.agent_known(agent)?;
                    if **rhs != Formula::know(agent, a.clone())
                        && **rhs != Formula::know(agent, b.clone())
                    {
                        return Err("KD_CONJ consequent must know one of the conjuncts".into());
                    }
                } else {
                    shape(1, 0)?;
                    let (agent, a, b) =
                        split_know_and(prem(0)).ok_or("KD_CONJ premise must be K<a>(A & B)")?;
                    self.agent_known(agent)?;
                    if step.formula != Formula::know(agent, a.clone())
                        && step.formula != Formula::know(agent, b.clone())
                    {
                        return Err("KD_CONJ conclusion must know one of the conjuncts".into());
                    }
                }
            }
            RuleLabel::KdMp => {
                if step.premises.is_empty() {
                    shape(0, 0)?;
                    // Axiom form: K<a>(A -> B) -> (K<a> A -> K<a> B).
                    let Formula::Implies(lhs, rhs) = &step.formula else {
                        return Err("KD_MP axiom form must be an implication".into());
                    };
                    let (agent, a, b) = split_know_implies(lhs)
                        .ok_or("KD_MP axiom antecedent must be K<a>(A -> B)")?;
                    self.agent_known(agent)?;
                    let expected = Formula::implies(
                        Formula::know(agent, a.clone()),
                        Formula::know(agent, b.clone()),
                    );
                    if **rhs != expected {
                        return Err("KD_MP consequent must be K<a>A -> K<a>B".into());
                    }
                } else {
                    shape(2, 0)?;
                    let (agent, a, b) =
                        split_know_implies(prem(0)).ok_or("KD_MP premise must be K<a>(A -> B)")?;
                    self.agent_known(agent)?;
                    if *prem(1) != Formula::know(agent, a.clone()) {
                        return Err("second KD_MP premise must be K<a> of the antecedent".into());
                    }
                    if step.formula != Formula::know(agent, b.clone()) {
                        return Err("KD_MP conclusion must be K<a> of the consequent".into());
                    }
                }
            }
            RuleLabel::Ke => {
                shape(0, 0)?;
                let Formula::Implies(lhs, rhs) = &step.formula else {
                    return Err("KE must be an instance of K<a> A -> A".into());
                };
                let Formula::Know(agent, body) = lhs.as_ref() else {
                    return Err("KE antecedent must be a knowledge atom".into());
                };
                self.agent_known(agent)?;
                if rhs != body {
                    return Err("KE consequent must be the known formula itself".into());
                }
            }
            RuleLabel::Ki => {
                shape(0, 1)?;
                let Formula::Know(agent, body) = &step.formula else {
                    return Err("KI concludes K<a> of the witness conclusion".into());
                };
                self.agent_known(agent)?;
                let sub = &step.subproofs[0];
                if sub.any_step(&mut |s| s.rule == RuleLabel::Hyp) {
                    return Err("KI witness must be hypothesis-free".into());
                }
                if let Err(f) = self.check_ki_witness(sub) {
                    return Ok(Some(f));
                }
                if sub.conclusion() != Some(body.as_ref()) {
                    return Err("KI conclusion does not match the witness conclusion".into());
                }
            }
            _ => {
                return Err(format!("rule {rule} does not belong to the epistemic systems"));
            }
        }
        Ok(None)
    }
}

fn split_know_and(f: &Formula) -> Option<(&str, &Formula, &Formula)> {
    if let Formula::Know(agent, body) = f {
        if let Formula::And(a, b) = body.as_ref() {
            return Some((agent, a, b));
        }
    }
    None
}

fn split_know_implies(f: &Formula) -> Option<(&str, &Formula, &Formula)> {
    if let Formula::Know(agent, body) = f {
        if let Formula::Implies(a, b) = body.as_ref() {
            return Some((agent, a, b));
        }
    }
    None
}

fn taut(f: Formula) -> Step {
    Step::new(f, RuleLabel::Taut)
}

fn mp_peel(p: &mut Proof, imp_id: usize, ant_id: usize) -> usize {
    let Formula::Implies(_, b) = &p.steps[imp_id - 1].formula else {
        panic!("mp_peel on a non-implication");
    };
    let conclusion = (**b).clone();
    p.push(Step::new(conclusion, RuleLabel::Mp).with_premises(vec![imp_id, ant_id]))
}

/// Pushes `(A -> B) -> ((B -> C) -> (A -> C))` and the two `MP`s, given step
/// ids concluding `A -> B` and `B -> C`; returns the id concluding `A -> C`.
fn compose_implications(p: &mut Proof, ab_id: usize, bc_id: usize) -> usize {
    let ab = p.steps[ab_id - 1].formula.clone();
    let bc = p.steps[bc_id - 1].formula.clone();
    let (Formula::Implies(a, _), Formula::Implies(_, c)) = (&ab, &bc) else {
        panic!("compose_implications on non-implications");
    };
    let ac = Formula::implies((**a).clone(), (**c).clone());
    let glue = p.push(taut(Formula::implies(
        ab.clone(),
        Formula::implies(bc, ac),
    )));
    let m1 = mp_peel(p, glue, ab_id);
    mp_peel(p, m1, bc_id)
}

/// The implication chain `~d_1 -> (~d_2 -> … -> (~d_r -> target))` over the
/// listed days.
fn elimination_chain(days: &[u32], target: u32) -> Formula {
    Formula::implies_chain(
        days.iter()
            .map(|&d| Formula::not(Formula::DayAtom(d)))
            .collect(),
        Formula::DayAtom(target),
    )
}

/// Hypothesis-free proof of `tower_from(from) -> tower_from(to)` for
/// `from < to <= m + 1` (`to = m + 1` unwraps all the way to (‡)),
/// by composed factivity instances.
fn unwrap_tower(sys: &EpistemicSystem, from: u32, to: u32, p: &mut Proof) -> usize {
    debug_assert!(from < to);
    let ke = |k: u32| {
        Step::new(
            Formula::implies(sys.tower_from(k), sys.tower_from(k + 1)),
            RuleLabel::Ke,
        )
    };
    let mut id = p.push(ke(from));
    for k in from + 1..to {
        let next = p.push(ke(k));
        id = compose_implications(p, id, next);
    }
    id
}

/// Hypothesis-free proof of `tower_from(from) -> ~day`, composing the tower
/// unwrapping with the day's elimination lemma.
fn theorem_not_day(sys: &EpistemicSystem, from: u32, day: u32) -> Proof {
    if from == day {
        return eliminate_day(sys, day);
    }
    debug_assert!(from < day);
    let mut p = Proof::new();
    let descend = unwrap_tower(sys, from, day, &mut p);
    let elim = p.append(eliminate_day(sys, day));
    compose_implications(&mut p, descend, elim);
    p
}

/// Hypothesis-free proof of `K_day(rest of the tower) -> ~day`: the
/// elimination lemma for that day. For the last day this is the classical
/// lemma; earlier days additionally import the later days' eliminations
/// through `KI` and the distribution axioms.
fn eliminate_day(sys: &EpistemicSystem, day: u32) -> Proof {
    let m = sys.m;
    let agent = sys.agent(day);
    let announcement = sys.announcement().formula;
    // X = K_day(rest): the antecedent of the lemma.
    let x = sys.tower_from(day);
    let know = |f: Formula| Formula::know(agent, f);
    let k_ann = know(announcement.clone());

    let mut p = Proof::new();
    let mut ingredients: Vec<usize> = Vec::new();

    // X -> K_day ~i for every later day i, importing each elimination.
    for i in day + 1..=m {
        let witness = theorem_not_day(sys, day + 1, i);
        let imported = know(witness.conclusion().unwrap().clone());
        let ki = p.push(Step::new(imported.clone(), RuleLabel::Ki).with_subproof(witness));
        let ax = p.push(Step::new(
            Formula::implies(
                imported,
                Formula::implies(x.clone(), know(Formula::not(Formula::DayAtom(i)))),
            ),
            RuleLabel::KdMp,
        ));
        ingredients.push(mp_peel(&mut p, ax, ki));
    }

    // X -> K_day (‡) (when day = m, X is K_day (‡) itself and no import is
    // needed).
    if day < m {
        let mut witness = Proof::new();
        unwrap_tower(sys, day + 1, m + 1, &mut witness);
        let imported = know(witness.conclusion().unwrap().clone());
        let ki = p.push(Step::new(imported.clone(), RuleLabel::Ki).with_subproof(witness));
        let ax = p.push(Step::new(
            Formula::implies(imported, Formula::implies(x.clone(), k_ann.clone())),
            RuleLabel::KdMp,
        ));
        let id = mp_peel(&mut p, ax, ki);
        ingredients.push(id);
    }

    // K_day (‡) -> K_day (disjunction): distribution over the final conjunct.
    let disj = sys.disjunction();
    ingredients.push(p.push(Step::new(
        Formula::implies(k_ann.clone(), know(disj.clone())),
        RuleLabel::KdConj,
    )));

    // K_day (‡) -> (day -> ~K_day day & K_day ~1 & …): factivity composed
    // with the announcement's own day conjunct.
    let ke_ax = p.push(Step::new(
        Formula::implies(k_ann.clone(), announcement.clone()),
        RuleLabel::Ke,
    ));
    let mut consequences = vec![Formula::not(know(Formula::DayAtom(day)))];
    for j in 1..day {
        consequences.push(know(Formula::not(Formula::DayAtom(j))));
    }
    let day_conjunct = Formula::implies(
        Formula::DayAtom(day),
        Formula::and_chain(consequences),
    );
    let prop = p.push(taut(Formula::implies(announcement.clone(), day_conjunct)));
    ingredients.push(compose_implications(&mut p, ke_ax, prop));

    // K_day (disjunction -> chain) by KI, then distribute stepwise.
    let other_days: Vec<u32> = (1..=m).filter(|&d| d != day).collect();
    let chain = elimination_chain(&other_days, day);
    let mut witness = Proof::new();
    witness.push(taut(Formula::implies(disj.clone(), chain.clone())));
    ingredients.push(p.push(Step::new(
        Formula::implies(
            know(Formula::implies(disj.clone(), chain.clone())),
            Formula::implies(know(disj.clone()), know(chain.clone())),
        ),
        RuleLabel::KdMp,
    )));
    ingredients.push(p.push(
        Step::new(know(Formula::implies(disj, chain)), RuleLabel::Ki).with_subproof(witness),
    ));
    for (idx, &d) in other_days.iter().enumerate() {
        let tail = elimination_chain(&other_days[idx + 1..], day);
        ingredients.push(p.push(Step::new(
            Formula::implies(
                know(Formula::implies(Formula::not(Formula::DayAtom(d)), tail.clone())),
                Formula::implies(know(Formula::not(Formula::DayAtom(d))), know(tail)),
            ),
            RuleLabel::KdMp,
        )));
    }

    // Assemble: all ingredients are categorical implications over opaque
    // knowledge atoms, so one tautology (plus modus ponens) closes the lemma.
    let goal = Formula::implies(x, Formula::not(Formula::DayAtom(day)));
    let assembly = Formula::implies_chain(
        ingredients
            .iter()
            .map(|&id| p.steps[id - 1].formula.clone())
            .collect(),
        goal,
    );
    let mut id = p.push(taut(assembly));
    for &ing in &ingredients {
        id = mp_peel(&mut p, id, ing);
    }
    p
}

/// The elimination lemma `K_m(‡) -> ~m` for the last day, derived from no
/// hypotheses.
pub fn derive_elimination_lemma(sys: &EpistemicSystem) -> Result<Proof, EpistemicError> {
    if sys.m < 2 {
        return Err(EpistemicError::OneDayLemma);
    }
    Ok(eliminate_day(sys, sys.m))
}

/// Derives `false` from the single tower hypothesis
/// `K_1(K_2(… K_m(‡)))`.
///
/// For m = 2 the transcript follows the classical argument step for step:
/// the elimination lemma enters through `KI`, distribution yields `Ka ~2`,
/// then `Ka (‡)`, `Ka (1 | 2)`, and `Ka 1`; factivity turns `Ka 1` into `1`,
/// the announcement's first conjunct then refutes `Ka 1`, a contradiction.
pub fn derive_contradiction(sys: &EpistemicSystem) -> Proof {
    let m = sys.m;
    let agent = sys.agent(1);
    let announcement = sys.announcement().formula;
    let know = |f: Formula| Formula::know(agent, f);
    let mut p = Proof::new();

    let hyp = p.push(Step::new(sys.tower(), RuleLabel::Hyp));

    let k_ann_id = if m == 1 {
        hyp
    } else {
        // K_1 ~j for each later day j, by importing the day's elimination.
        let mut known_not: HashMap<u32, usize> = HashMap::new();
        for j in (2..=m).rev() {
            let witness = theorem_not_day(sys, 2, j);
            let imported = know(witness.conclusion().unwrap().clone());
            let ki = p.push(Step::new(imported, RuleLabel::Ki).with_subproof(witness));
            let id = p.push(
                Step::new(know(Formula::not(Formula::DayAtom(j))), RuleLabel::KdMp)
                    .with_premises(vec![ki, hyp]),
            );
            known_not.insert(j, id);
        }

        // K_1 (‡) from the hypothesis and the unwrapping theorem.
        let mut witness = Proof::new();
        unwrap_tower(sys, 2, m + 1, &mut witness);
        let imported = know(witness.conclusion().unwrap().clone());
        let ki = p.push(Step::new(imported, RuleLabel::Ki).with_subproof(witness));
        let k_ann_id = p.push(
            Step::new(know(announcement.clone()), RuleLabel::KdMp).with_premises(vec![ki, hyp]),
        );

        // K_1 (1 | … | m), then eliminate the later days inside K_1.
        let disj = sys.disjunction();
        let k_disj = p.push(
            Step::new(know(disj.clone()), RuleLabel::KdConj).with_premises(vec![k_ann_id]),
        );
        let other_days: Vec<u32> = (2..=m).collect();
        let chain = elimination_chain(&other_days, 1);
        let mut chain_witness = Proof::new();
        chain_witness.push(taut(Formula::implies(disj.clone(), chain.clone())));
        let ki_chain = p.push(
            Step::new(know(Formula::implies(disj, chain.clone())), RuleLabel::Ki)
                .with_subproof(chain_witness),
        );
        let mut cur = p.push(
            Step::new(know(chain), RuleLabel::KdMp).with_premises(vec![ki_chain, k_disj]),
        );
        for (idx, &d) in other_days.iter().enumerate() {
            let tail = elimination_chain(&other_days[idx + 1..], 1);
            cur = p.push(
                Step::new(know(tail), RuleLabel::KdMp).with_premises(vec![cur, known_not[&d]]),
            );
        }
        // `cur` now concludes K_1 1; keep both it and K_1 (‡).
        debug_assert_eq!(p.steps[cur - 1].formula, know(Formula::DayAtom(1)));
        finish_contradiction(&mut p, sys, cur, k_ann_id);
        return p;
    };

    // One-day week: K_1(‡) is the hypothesis itself; distribution gives
    // K_1 1 directly (the Moore-sentence collapse).
    let k_day = p.push(
        Step::new(know(Formula::DayAtom(1)), RuleLabel::KdConj).with_premises(vec![k_ann_id]),
    );
    finish_contradiction(&mut p, sys, k_day, k_ann_id);
    p
}

/// Shared ending: from `K_1 1` and `K_1 (‡)`, factivity yields `1` and (‡),
/// the first conjunct yields `~K_1 1`, and `false` follows.
fn finish_contradiction(p: &mut Proof, sys: &EpistemicSystem, k_day_id: usize, k_ann_id: usize) {
    let agent = sys.agent(1);
    let announcement = sys.announcement().formula;
    let k_day = Formula::know(agent, Formula::DayAtom(1));

    let ke_day = p.push(Step::new(
        Formula::implies(k_day.clone(), Formula::DayAtom(1)),
        RuleLabel::Ke,
    ));
    let day = mp_peel(p, ke_day, k_day_id);

    let ke_ann = p.push(Step::new(
        Formula::implies(
            Formula::know(agent, announcement.clone()),
            announcement.clone(),
        ),
        RuleLabel::Ke,
    ));
    let ann_id = mp_peel(p, ke_ann, k_ann_id);

    let first_conjunct = p.push(taut(Formula::implies(
        announcement,
        Formula::implies(Formula::DayAtom(1), Formula::not(k_day.clone())),
    )));
    let m1 = mp_peel(p, first_conjunct, ann_id);
    let not_k_day = mp_peel(p, m1, day);

    let clash = p.push(taut(Formula::implies(
        k_day,
        Formula::implies(
            Formula::not(Formula::know(agent, Formula::DayAtom(1))),
            Formula::Falsum,
        ),
    )));
    let m2 = mp_peel(p, clash, k_day_id);
    mp_peel(p, m2, not_k_day);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, print};

    fn sys(m: u32) -> EpistemicSystem {
        EpistemicSystem::new(m).unwrap()
    }

    #[test]
    fn announcement_prints_in_classical_shape() {
        assert_eq!(
            print(&build_announcement(&sys(2)).formula),
            "(1 -> ~Ka 1) & (2 -> (~Kb 2 & Kb ~1)) & (1 | 2)"
        );
        // One-day week: the Moore/blindspot sentence.
        assert_eq!(print(&build_announcement(&sys(1)).formula), "(1 -> ~K1 1) & 1");
        // Day 3's conjunct retains knowledge of both earlier days.
        let three = print(&build_announcement(&sys(3)).formula);
        assert!(three.contains("3 -> (~K3 3 & K3 ~1 & K3 ~2)"), "{three}");
    }

    #[test]
    fn tower_specializes_to_the_two_day_hypothesis() {
        let s = sys(2);
        let expected = parse("Ka Kb ((1 -> ~Ka 1) & (2 -> (~Kb 2 & Kb ~1)) & (1 | 2))").unwrap();
        assert_eq!(s.tower(), expected);
    }

    #[test]
    fn system_validation() {
        assert_eq!(EpistemicSystem::new(0).unwrap_err(), EpistemicError::ZeroDays);
        assert!(matches!(
            EpistemicSystem::with_agents(2, vec!["a".into(), "a".into()]).unwrap_err(),
            EpistemicError::BadAgents(_)
        ));
        assert!(matches!(
            EpistemicSystem::with_agents(2, vec!["a".into()]).unwrap_err(),
            EpistemicError::BadAgents(_)
        ));
        assert_eq!(
            EpistemicSystem::designated_students(6).unwrap_err(),
            EpistemicError::TooManyStudents(6)
        );
        assert_eq!(
            EpistemicSystem::designated_students(5).unwrap().agents(),
            DESIGNATED_STUDENTS
        );
    }

    #[test]
    fn elimination_lemma_checks_for_all_horizons() {
        for m in 2..=5 {
            let s = sys(m);
            let lemma = derive_elimination_lemma(&s).unwrap();
            let report = check(&lemma, &s);
            assert!(report.ok, "m={m}: {report}");
            let expected = Formula::implies(
                s.tower_from(m),
                Formula::not(Formula::DayAtom(m)),
            );
            assert_eq!(lemma.conclusion(), Some(&expected));
        }
        assert_eq!(
            derive_elimination_lemma(&sys(1)).unwrap_err(),
            EpistemicError::OneDayLemma
        );
    }

    #[test]
    fn contradiction_checks_for_all_horizons() {
        for m in 1..=5 {
            let s = sys(m);
            let p = derive_contradiction(&s);
            assert_eq!(p.conclusion(), Some(&Formula::Falsum));
            assert_eq!(p.steps[0].rule, RuleLabel::Hyp);
            assert_eq!(p.steps[0].formula, s.tower());
            let report = check(&p, &s);
            assert!(report.ok, "m={m}: {report}");
        }
    }

    #[test]
    fn disabling_any_used_rule_rejects() {
        for m in 1..=5 {
            let s = sys(m);
            let p = derive_contradiction(&s);
            for rule in [
                RuleLabel::KdConj,
                RuleLabel::KdMp,
                RuleLabel::Ki,
                RuleLabel::Ke,
                RuleLabel::Hyp,
            ] {
                if !p.any_step(&mut |st| st.rule == rule) {
                    continue;
                }
                let report = check(&p, &s.without(rule));
                assert!(!report.ok, "m={m}: accepted without {rule}");
                assert_eq!(report.failure.unwrap().rule, rule);
            }
        }
    }

    #[test]
    fn contradiction_uses_the_lemma_verbatim() {
        let s = sys(2);
        let lemma = derive_elimination_lemma(&s).unwrap();
        let target = lemma.conclusion().unwrap().clone();
        let p = derive_contradiction(&s);
        assert!(p.any_step(&mut |st| st.formula == target));
    }

    #[test]
    fn ki_rejects_hypothesis_dependent_witnesses() {
        let s = sys(2);
        let mut witness = Proof::new();
        witness.push(Step::new(s.tower(), RuleLabel::Hyp));
        let mut p = Proof::new();
        p.push(Step::new(Formula::know("a", s.tower()), RuleLabel::Ki).with_subproof(witness));
        let report = check(&p, &s);
        assert!(!report.ok);
        assert!(report
            .failure
            .unwrap()
            .reason
            .contains("hypothesis-free"));
    }

    #[test]
    fn undeclared_agents_and_wrong_fragment_are_rejected() {
        let s = sys(2);
        let mut p = Proof::new();
        p.push(Step::new(parse("Kz 1 -> 1").unwrap(), RuleLabel::Ke));
        assert!(!check(&p, &s).ok);
        let mut p2 = Proof::new();
        p2.push(Step::new(parse("P[5] -> P[5]").unwrap(), RuleLabel::Taut));
        let report = check(&p2, &s);
        assert!(!report.ok);
        assert!(report.failure.unwrap().reason.contains("fragment"));
    }

    #[test]
    fn relabeling_is_an_isomorphism() {
        let base_sys = sys(5);
        let student_sys = EpistemicSystem::designated_students(5).unwrap();
        let base = derive_contradiction(&base_sys);
        let students = derive_contradiction(&student_sys);
        assert!(check(&students, &student_sys).ok);
        let renamed = base.map_formulas(&|f| {
            f.map_agents(&|a| {
                let idx = base_sys.agents().iter().position(|d| d == a).unwrap();
                student_sys.agents()[idx].clone()
            })
        });
        assert_eq!(renamed, students);
    }

    #[test]
    fn transcripts_round_trip_and_recheck() {
        let s = sys(3);
        let p = derive_contradiction(&s);
        let back = Proof::from_text(&p.to_text()).unwrap();
        assert_eq!(back, p);
        assert!(check(&back, &s).ok);
    }

    #[test]
    fn rule_and_axiom_forms_both_check() {
        let s = sys(2);
        // Axiom form of KD_CONJ.
        let mut p = Proof::new();
        p.push(Step::new(
            parse("Ka (1 & 2) -> Ka 1").unwrap(),
            RuleLabel::KdConj,
        ));
        assert!(check(&p, &s).ok, "{}", check(&p, &s));
        // Rule form, fed by KI.
        let mut w = Proof::new();
        w.push(Step::new(parse("(Q1 -> Q1) & (Q2 -> Q2)").unwrap(), RuleLabel::Taut));
        let mut p2 = Proof::new();
        let ki = p2.push(
            Step::new(
                parse("Kb ((1 -> 1) & (2 -> 2))").unwrap(),
                RuleLabel::Ki,
            )
            .with_subproof(w),
        );
        p2.push(
            Step::new(parse("Kb (2 -> 2)").unwrap(), RuleLabel::KdConj)
                .with_premises(vec![ki]),
        );
        assert!(check(&p2, &s).ok, "{}", check(&p2, &s));
        // Wrong conjunct is rejected.
        let mut p3 = Proof::new();
        p3.push(Step::new(
            parse("Ka (1 & 2) -> Ka 3").unwrap(),
            RuleLabel::KdConj,
        ));
        assert!(!check(&p3, &s).ok);
    }
}
