use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ast::Formula;
use super::parse::{parse, ParseError};
use super::print::print;

/// Inference-rule labels across all rule sets.
///
/// Which labels are admissible, and with what side conditions, is decided by
/// the rule set a proof is checked against; the transcript format itself is
/// shared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleLabel {
    /// Propositional tautology over opaque atoms (truth-table verified).
    Taut,
    /// Modus ponens from `A -> B` and `A`.
    Mp,
    /// Code-predicate evaluation bridge `P[t] <-> P[n]` with `eval(t) = n`.
    Eval,
    /// Provability introduction: `P[n]` justified by an embedded proof whose
    /// conclusion has code `n`.
    Nec,
    /// Factivity of the knowledge predicate: `K[n] -> Q` with `#Q = n`.
    SchemaA,
    /// Knowledge of factivity: `K[n]` where `n` codes a SCHEMA_A instance.
    AxiomB,
    /// Known conclusion of an explicitly given proof from known premises.
    RuleC,
    /// Premise citation inside a RULE_C sub-proof.
    Prem,
    /// The declared hypothesis of an epistemic system (the knowledge tower).
    Hyp,
    /// Knowledge distributes over conjunction.
    KdConj,
    /// Knowledge distributes over implication.
    KdMp,
    /// Factivity: `K<a> A -> A`.
    Ke,
    /// Logical omniscience: theorems are known.
    Ki,
}

impl RuleLabel {
    pub const fn as_str(self) -> &'static str {
        match self {
            RuleLabel::Taut => "TAUT",
            RuleLabel::Mp => "MP",
            RuleLabel::Eval => "EVAL",
            RuleLabel::Nec => "NEC",
            RuleLabel::SchemaA => "SCHEMA_A",
            RuleLabel::AxiomB => "AXIOM_B",
            RuleLabel::RuleC => "RULE_C",
            RuleLabel::Prem => "PREM",
            RuleLabel::Hyp => "HYP",
            RuleLabel::KdConj => "KD_CONJ",
            RuleLabel::KdMp => "KD_MP",
            RuleLabel::Ke => "KE",
            RuleLabel::Ki => "KI",
        }
    }

    pub fn from_str(s: &str) -> Option<Self> {
        Some(match s {
            "TAUT" => RuleLabel::Taut,
            "MP" => RuleLabel::Mp,
            "EVAL" => RuleLabel::Eval,
            "NEC" => RuleLabel::Nec,
            "SCHEMA_A" => RuleLabel::SchemaA,
            "AXIOM_B" => RuleLabel::AxiomB,
            "RULE_C" => RuleLabel::RuleC,
            "PREM" => RuleLabel::Prem,
            "HYP" => RuleLabel::Hyp,
            "KD_CONJ" => RuleLabel::KdConj,
            "KD_MP" => RuleLabel::KdMp,
            "KE" => RuleLabel::Ke,
            "KI" => RuleLabel::Ki,
            _ => return None,
        })
    }
}

impl std::fmt::Display for RuleLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One justified step of a linear transcript.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub formula: Formula,
    pub rule: RuleLabel,
    /// 1-based references to earlier steps of the same transcript.
    pub premises: Vec<usize>,
    /// Embedded derivations, for rules that carry a witness proof.
    pub subproofs: Vec<Proof>,
}

impl Step {
    pub fn new(formula: Formula, rule: RuleLabel) -> Self {
        Step {
            formula,
            rule,
            premises: Vec::new(),
            subproofs: Vec::new(),
        }
    }

    pub fn with_premises(mut self, premises: Vec<usize>) -> Self {
        self.premises = premises;
        self
    }

    pub fn with_subproof(mut self, sub: Proof) -> Self {
        self.subproofs.push(sub);
        self
    }
}

/// A numbered linear transcript of justified steps; the conclusion is the
/// formula of the final step.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Proof {
    pub steps: Vec<Step>,
}

/// Error reading a transcript from its text or JSON form.
#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("{0}")]
    Syntax(#[from] ParseError),
    #[error("transcript error at offset {offset}: {message}")]
    Malformed { offset: usize, message: String },
    #[error("invalid JSON transcript: {0}")]
    Json(#[from] serde_json::Error),
    #[error("step {step}: unknown rule label '{label}'")]
    UnknownRule { step: usize, label: String },
    #[error("step numbering is not sequential (found {found}, expected {expected})")]
    BadNumbering { found: usize, expected: usize },
}

impl Proof {
    pub fn new() -> Self {
        Proof { steps: Vec::new() }
    }

    /// Appends a step and returns its 1-based id.
    pub fn push(&mut self, step: Step) -> usize {
        self.steps.push(step);
        self.steps.len()
    }

    pub fn conclusion(&self) -> Option<&Formula> {
        self.steps.last().map(|s| &s.formula)
    }

    /// Appends another transcript inline, shifting its premise references
    /// past the steps already present; returns the id of its final step.
    pub fn append(&mut self, other: Proof) -> usize {
        let offset = self.steps.len();
        for mut s in other.steps {
            for p in &mut s.premises {
                *p += offset;
            }
            self.steps.push(s);
        }
        self.steps.len()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// True iff some step (at any nesting depth) satisfies `pred`.
    pub fn any_step(&self, pred: &mut impl FnMut(&Step) -> bool) -> bool {
        self.steps
            .iter()
            .any(|s| pred(s) || s.subproofs.iter().any(|p| p.any_step(pred)))
    }

    /// Applies a formula transformation to every step, sub-proofs included;
    /// rules and premise references are preserved.
    pub fn map_formulas(&self, f: &impl Fn(&Formula) -> Formula) -> Proof {
        Proof {
            steps: self
                .steps
                .iter()
                .map(|s| Step {
                    formula: f(&s.formula),
                    rule: s.rule,
                    premises: s.premises.clone(),
                    subproofs: s.subproofs.iter().map(|p| p.map_formulas(f)).collect(),
                })
                .collect(),
        }
    }

    /// Total number of steps including embedded sub-proofs.
    pub fn total_steps(&self) -> usize {
        self.steps
            .iter()
            .map(|s| 1 + s.subproofs.iter().map(Proof::total_steps).sum::<usize>())
            .sum()
    }

    /// Renders the transcript in the line-oriented text format:
    /// `<n>. <formula> [<rule> <premise-ids> {subproof…}]`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(&mut out, 0);
        out
    }

    fn write_text(&self, out: &mut String, indent: usize) {
        for (i, step) in self.steps.iter().enumerate() {
            out.push_str(&" ".repeat(indent));
            out.push_str(&format!("{}. {} [{}", i + 1, print(&step.formula), step.rule));
            for p in &step.premises {
                out.push_str(&format!(" {p}"));
            }
            for sub in &step.subproofs {
                out.push_str(" {\n");
                sub.write_text(out, indent + 2);
                out.push_str(&" ".repeat(indent));
                out.push('}');
            }
            out.push_str("]\n");
        }
    }

    /// Parses the text format produced by [`Proof::to_text`].
    pub fn from_text(text: &str) -> Result<Proof, TranscriptError> {
        let mut reader = TextReader {
            text,
            bytes: text.as_bytes(),
            pos: 0,
        };
        let proof = reader.block()?;
        reader.skip_ws();
        if reader.pos != reader.bytes.len() {
            return Err(reader.err("unexpected trailing input"));
        }
        Ok(proof)
    }

    pub fn to_json_steps(&self) -> Vec<StepJson> {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, s)| StepJson {
                step: i + 1,
                formula: print(&s.formula),
                rule: s.rule.as_str().to_string(),
                premises: s.premises.clone(),
                subproofs: s.subproofs.iter().map(Proof::to_json_steps).collect(),
            })
            .collect()
    }

    pub fn from_json_steps(steps: &[StepJson]) -> Result<Proof, TranscriptError> {
        let mut proof = Proof::new();
        for (i, s) in steps.iter().enumerate() {
            if s.step != i + 1 {
                return Err(TranscriptError::BadNumbering {
                    found: s.step,
                    expected: i + 1,
                });
            }
            let rule = RuleLabel::from_str(&s.rule).ok_or_else(|| TranscriptError::UnknownRule {
                step: s.step,
                label: s.rule.clone(),
            })?;
            let mut step = Step::new(parse(&s.formula)?, rule).with_premises(s.premises.clone());
            for sub in &s.subproofs {
                step = step.with_subproof(Proof::from_json_steps(sub)?);
            }
            proof.push(step);
        }
        Ok(proof)
    }
}

/// JSON form of a transcript step.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepJson {
    pub step: usize,
    pub formula: String,
    pub rule: String,
    #[serde(default)]
    pub premises: Vec<usize>,
    #[serde(default)]
    pub subproofs: Vec<Vec<StepJson>>,
}

struct TextReader<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> TextReader<'a> {
    fn err(&self, message: impl Into<String>) -> TranscriptError {
        TranscriptError::Malformed {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Parses a sequence of steps up to end of input or a closing `}`.
    fn block(&mut self) -> Result<Proof, TranscriptError> {
        let mut proof = Proof::new();
        loop {
            self.skip_ws();
            if self.pos == self.bytes.len() || self.bytes[self.pos] == b'}' {
                return Ok(proof);
            }
            let expected = proof.len() + 1;
            let step = self.step(expected)?;
            proof.push(step);
        }
    }

    fn step(&mut self, expected: usize) -> Result<Step, TranscriptError> {
        let n = self.number()?;
        if n != expected {
            return Err(TranscriptError::BadNumbering {
                found: n,
                expected,
            });
        }
        if !self.eat(b'.') {
            return Err(self.err("expected '.' after step number"));
        }
        self.skip_ws();
        let formula = self.formula()?;
        self.skip_ws();
        if !self.eat(b'[') {
            return Err(self.err("expected '[' for the justification"));
        }
        let label = self.word();
        let rule = RuleLabel::from_str(&label).ok_or(TranscriptError::UnknownRule {
            step: expected,
            label,
        })?;
        let mut step = Step::new(formula, rule);
        loop {
            self.skip_ws();
            match self.bytes.get(self.pos) {
                Some(b']') => {
                    self.pos += 1;
                    return Ok(step);
                }
                Some(b'{') => {
                    self.pos += 1;
                    let sub = self.block()?;
                    if !self.eat(b'}') {
                        return Err(self.err("expected '}' closing the sub-proof"));
                    }
                    step.subproofs.push(sub);
                }
                Some(b'0'..=b'9') => {
                    if !step.subproofs.is_empty() {
                        return Err(self.err("premise ids must precede sub-proofs"));
                    }
                    step.premises.push(self.number()?);
                }
                _ => return Err(self.err("expected premise id, sub-proof, or ']'")),
            }
        }
    }

    fn number(&mut self) -> Result<usize, TranscriptError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| self.err("number out of range"))
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.bytes.get(self.pos) == Some(&b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        self.text[start..self.pos].to_string()
    }

    /// The formula runs up to the ` [` that opens the justification; brackets
    /// inside code predicates are tracked so `P[…]` never terminates the scan.
    fn formula(&mut self) -> Result<Formula, TranscriptError> {
        let start = self.pos;
        let mut depth = 0usize;
        let mut end = None;
        let mut i = self.pos;
        while i < self.bytes.len() {
            match self.bytes[i] {
                b'[' if depth == 0 && i > start && self.bytes[i - 1].is_ascii_whitespace() => {
                    end = Some(i);
                    break;
                }
                b'[' => depth += 1,
                b']' => {
                    depth = depth.saturating_sub(1);
                }
                b'\n' => {
                    return Err(TranscriptError::Malformed {
                        offset: i,
                        message: "step line ended before its justification".into(),
                    })
                }
                _ => {}
            }
            i += 1;
        }
        let end = end.ok_or_else(|| TranscriptError::Malformed {
            offset: i,
            message: "missing justification".into(),
        })?;
        let slice = self.text[start..end].trim_end();
        let formula = parse(slice).map_err(|e| e.offset_by(start))?;
        self.pos = end;
        Ok(formula)
    }
}
