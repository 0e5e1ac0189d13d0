//! Gödel numbering of formulas and proofs.
//!
//! The scheme serializes a syntax tree to a token string over a fixed byte
//! alphabet, with numerals embedded as decimal digit strings, and reads the
//! string as a base-256 natural number. Codes therefore grow linearly with
//! formula size — coding a formula that contains a large numeral costs only
//! the digit length of that numeral — which keeps the diagonal construction
//! desk-scale and bit-exact. Iterated pairing would blow up
//! super-exponentially here.
//!
//! The code-level connective functions operate directly on the byte strings
//! (prepend a tag, concatenate), so the homomorphism with the formula
//! constructors holds by construction:
//!
//! * `neg_code(#A) = #(~A)`
//! * `conj_code(#A, #B) = #(A & B)`
//! * `imp_code(#A, #B) = #(A -> B)`
//!
//! Decoding is total: every natural number either parses as exactly one
//! canonical serialization or is rejected.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::formula::{Formula, Proof, RuleLabel, Step, Term};
use crate::selfref::{check, RuleSet};

/// A Gödel number of a formula or proof.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Code(BigUint);

impl Code {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_value(self) -> BigUint {
        self.0
    }

    /// Decimal digit count.
    pub fn digit_len(&self) -> usize {
        self.0.to_string().len()
    }

    /// Abbreviated display: first and last 16 digits, digit count, and a
    /// content hash. The full value is always available via [`Code::value`].
    pub fn abbreviated(&self) -> String {
        let digits = self.0.to_string();
        if digits.len() <= 40 {
            return digits;
        }
        let mut hasher = Sha256::new();
        hasher.update(digits.as_bytes());
        let hash = hasher.finalize();
        format!(
            "{}...{} ({} digits, sha256:{})",
            &digits[..16],
            &digits[digits.len() - 16..],
            digits.len(),
            hex_prefix(&hash, 8)
        )
    }
}

fn hex_prefix(bytes: &[u8], n: usize) -> String {
    bytes
        .iter()
        .take(n / 2)
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl From<BigUint> for Code {
    fn from(v: BigUint) -> Self {
        Code(v)
    }
}

impl From<u64> for Code {
    fn from(v: u64) -> Self {
        Code(BigUint::from(v))
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    /// Encoding is defined on the self-reference fragment only.
    #[error("formula outside the self-reference fragment (contains a knowledge operator)")]
    FragmentViolation,
    #[error("not a valid code: {0}")]
    Invalid(String),
    #[error("open term (contains the free variable x)")]
    OpenTerm,
}

// Formula tags.
const TAG_FALSUM: u8 = b'F';
const TAG_DAY: u8 = b'Q';
const TAG_PRED: u8 = b'P';
const TAG_NOT: u8 = b'N';
const TAG_AND: u8 = b'A';
const TAG_OR: u8 = b'O';
const TAG_XOR: u8 = b'X';
const TAG_IMPLIES: u8 = b'I';
const TAG_IFF: u8 = b'B';
// Term tags.
const TAG_NUMERAL: u8 = b'n';
const TAG_VAR: u8 = b'x';
const TAG_TNEG: u8 = b'g';
const TAG_TCONJ: u8 = b'c';
const TAG_TIMP: u8 = b'i';
const TAG_TDIAG: u8 = b'd';
// Proof tags.
const TAG_PROOF: u8 = b'r';
const TAG_STEP: u8 = b's';
const SEP: u8 = b';';

fn rule_byte(rule: RuleLabel) -> u8 {
    match rule {
        RuleLabel::Taut => b'T',
        RuleLabel::Mp => b'M',
        RuleLabel::Eval => b'E',
        RuleLabel::Nec => b'N',
        RuleLabel::SchemaA => b'A',
        RuleLabel::AxiomB => b'B',
        RuleLabel::RuleC => b'C',
        RuleLabel::Prem => b'P',
        RuleLabel::Hyp => b'H',
        RuleLabel::KdConj => b'D',
        RuleLabel::KdMp => b'J',
        RuleLabel::Ke => b'K',
        RuleLabel::Ki => b'I',
    }
}

fn rule_from_byte(b: u8) -> Option<RuleLabel> {
    Some(match b {
        b'T' => RuleLabel::Taut,
        b'M' => RuleLabel::Mp,
        b'E' => RuleLabel::Eval,
        b'N' => RuleLabel::Nec,
        b'A' => RuleLabel::SchemaA,
        b'B' => RuleLabel::AxiomB,
        b'C' => RuleLabel::RuleC,
        b'P' => RuleLabel::Prem,
        b'H' => RuleLabel::Hyp,
        b'D' => RuleLabel::KdConj,
        b'J' => RuleLabel::KdMp,
        b'K' => RuleLabel::Ke,
        b'I' => RuleLabel::Ki,
        _ => return None,
    })
}

fn push_number(out: &mut Vec<u8>, digits: &str) {
    out.extend_from_slice(digits.as_bytes());
    out.push(SEP);
}

fn serialize_term(t: &Term, out: &mut Vec<u8>) {
    match t {
        Term::Numeral(n) => {
            out.push(TAG_NUMERAL);
            push_number(out, &n.to_string());
        }
        Term::Var => out.push(TAG_VAR),
        Term::Neg(inner) => {
            out.push(TAG_TNEG);
            serialize_term(inner, out);
        }
        Term::Conj(a, b) => {
            out.push(TAG_TCONJ);
            serialize_term(a, out);
            serialize_term(b, out);
        }
        Term::Imp(a, b) => {
            out.push(TAG_TIMP);
            serialize_term(a, out);
            serialize_term(b, out);
        }
        Term::Diag(a, b) => {
            out.push(TAG_TDIAG);
            serialize_term(a, out);
            serialize_term(b, out);
        }
    }
}

fn serialize_formula(f: &Formula, out: &mut Vec<u8>) -> Result<(), CodeError> {
    match f {
        Formula::Know(_, _) => return Err(CodeError::FragmentViolation),
        Formula::Falsum => out.push(TAG_FALSUM),
        Formula::DayAtom(k) => {
            out.push(TAG_DAY);
            push_number(out, &k.to_string());
        }
        Formula::CodePred(label, t) => {
            out.push(TAG_PRED);
            out.extend_from_slice(label.as_bytes());
            out.push(SEP);
            serialize_term(t, out);
        }
        Formula::Not(g) => {
            out.push(TAG_NOT);
            serialize_formula(g, out)?;
        }
        Formula::And(a, b) => {
            out.push(TAG_AND);
            serialize_formula(a, out)?;
            serialize_formula(b, out)?;
        }
        Formula::Or(a, b) => {
            out.push(TAG_OR);
            serialize_formula(a, out)?;
            serialize_formula(b, out)?;
        }
        Formula::Xor(a, b) => {
            out.push(TAG_XOR);
            serialize_formula(a, out)?;
            serialize_formula(b, out)?;
        }
        Formula::Implies(a, b) => {
            out.push(TAG_IMPLIES);
            serialize_formula(a, out)?;
            serialize_formula(b, out)?;
        }
        Formula::Iff(a, b) => {
            out.push(TAG_IFF);
            serialize_formula(a, out)?;
            serialize_formula(b, out)?;
        }
    }
    Ok(())
}

fn serialize_steps(steps: &[Step], out: &mut Vec<u8>) -> Result<(), CodeError> {
    push_number(out, &steps.len().to_string());
    for step in steps {
        out.push(TAG_STEP);
        serialize_formula(&step.formula, out)?;
        out.push(rule_byte(step.rule));
        push_number(out, &step.premises.len().to_string());
        for p in &step.premises {
            push_number(out, &p.to_string());
        }
        push_number(out, &step.subproofs.len().to_string());
        for sub in &step.subproofs {
            serialize_steps(&sub.steps, out)?;
        }
    }
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn invalid(&self, what: &str) -> CodeError {
        CodeError::Invalid(format!("{what} at byte {}", self.pos))
    }

    fn next(&mut self) -> Result<u8, CodeError> {
        let b = *self
            .bytes
            .get(self.pos)
            .ok_or_else(|| self.invalid("unexpected end"))?;
        self.pos += 1;
        Ok(b)
    }

    /// Reads a canonical decimal digit string up to the separator.
    fn digits(&mut self) -> Result<String, CodeError> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.invalid("expected digits"));
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        if s.len() > 1 && s.starts_with('0') {
            return Err(self.invalid("non-canonical digit string"));
        }
        if self.next()? != SEP {
            return Err(self.invalid("expected separator"));
        }
        Ok(s.to_string())
    }

    fn count(&mut self) -> Result<usize, CodeError> {
        self.digits()?
            .parse()
            .map_err(|_| self.invalid("count out of range"))
    }

    fn term(&mut self) -> Result<Term, CodeError> {
        match self.next()? {
            TAG_NUMERAL => Ok(Term::Numeral(self.digits()?.parse().unwrap())),
            TAG_VAR => Ok(Term::Var),
            TAG_TNEG => Ok(Term::neg(self.term()?)),
            TAG_TCONJ => Ok(Term::conj(self.term()?, self.term()?)),
            TAG_TIMP => Ok(Term::imp(self.term()?, self.term()?)),
            TAG_TDIAG => Ok(Term::diag(self.term()?, self.term()?)),
            _ => Err(self.invalid("unknown term tag")),
        }
    }

    fn formula(&mut self) -> Result<Formula, CodeError> {
        match self.next()? {
            TAG_FALSUM => Ok(Formula::Falsum),
            TAG_DAY => {
                let k: u32 = self
                    .digits()?
                    .parse()
                    .map_err(|_| self.invalid("day index out of range"))?;
                if k == 0 {
                    return Err(self.invalid("day index 0"));
                }
                Ok(Formula::DayAtom(k))
            }
            TAG_PRED => {
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(self.invalid("empty predicate label"));
                }
                let label = std::str::from_utf8(&self.bytes[start..self.pos])
                    .unwrap()
                    .to_string();
                if self.next()? != SEP {
                    return Err(self.invalid("expected separator"));
                }
                Ok(Formula::CodePred(label, self.term()?))
            }
            TAG_NOT => Ok(Formula::not(self.formula()?)),
            TAG_AND => Ok(Formula::and(self.formula()?, self.formula()?)),
            TAG_OR => Ok(Formula::or(self.formula()?, self.formula()?)),
            TAG_XOR => Ok(Formula::xor(self.formula()?, self.formula()?)),
            TAG_IMPLIES => Ok(Formula::implies(self.formula()?, self.formula()?)),
            TAG_IFF => Ok(Formula::iff(self.formula()?, self.formula()?)),
            _ => Err(self.invalid("unknown formula tag")),
        }
    }

    fn steps(&mut self) -> Result<Proof, CodeError> {
        let n = self.count()?;
        let mut proof = Proof::new();
        for _ in 0..n {
            if self.next()? != TAG_STEP {
                return Err(self.invalid("expected step tag"));
            }
            let formula = self.formula()?;
            let rule =
                rule_from_byte(self.next()?).ok_or_else(|| self.invalid("unknown rule byte"))?;
            let nprem = self.count()?;
            let mut premises = Vec::with_capacity(nprem);
            for _ in 0..nprem {
                premises.push(self.count()?);
            }
            let nsub = self.count()?;
            let mut step = Step::new(formula, rule).with_premises(premises);
            for _ in 0..nsub {
                step.subproofs.push(self.steps()?);
            }
            proof.push(step);
        }
        Ok(proof)
    }
}

fn code_bytes(c: &Code) -> Vec<u8> {
    c.0.to_bytes_be()
}

fn bytes_to_code(bytes: Vec<u8>) -> Code {
    Code(BigUint::from_bytes_be(&bytes))
}

/// Gödel number of a formula in the self-reference fragment.
pub fn encode(f: &Formula) -> Result<Code, CodeError> {
    let mut out = Vec::new();
    serialize_formula(f, &mut out)?;
    Ok(bytes_to_code(out))
}

/// Inverse of [`encode`] on its image; rejects every other number.
pub fn decode(c: &Code) -> Result<Formula, CodeError> {
    if c.0.is_zero() {
        return Err(CodeError::Invalid("zero is not a code".into()));
    }
    let bytes = code_bytes(c);
    let mut reader = Reader {
        bytes: &bytes,
        pos: 0,
    };
    let f = reader.formula()?;
    if reader.pos != bytes.len() {
        return Err(reader.invalid("trailing bytes"));
    }
    Ok(f)
}

fn validated_bytes(c: &Code) -> Result<Vec<u8>, CodeError> {
    decode(c)?;
    Ok(code_bytes(c))
}

/// Code-level negation: `decode(neg_code(#Q)) = ~Q`.
pub fn neg_code(c: &Code) -> Result<Code, CodeError> {
    let mut out = vec![TAG_NOT];
    out.extend(validated_bytes(c)?);
    Ok(bytes_to_code(out))
}

/// Code-level conjunction: `decode(conj_code(#A, #B)) = A & B`.
pub fn conj_code(c1: &Code, c2: &Code) -> Result<Code, CodeError> {
    let mut out = vec![TAG_AND];
    out.extend(validated_bytes(c1)?);
    out.extend(validated_bytes(c2)?);
    Ok(bytes_to_code(out))
}

/// Code-level implication: `decode(imp_code(#A, #B)) = A -> B`.
pub fn imp_code(c1: &Code, c2: &Code) -> Result<Code, CodeError> {
    let mut out = vec![TAG_IMPLIES];
    out.extend(validated_bytes(c1)?);
    out.extend(validated_bytes(c2)?);
    Ok(bytes_to_code(out))
}

/// Diagonalization: the code of the formula coded by `m` with its free
/// variable replaced by the numeral `n`, i.e.
/// `diag(m, n) = encode(substitute(decode(m), n))`.
pub fn diag(m: &Code, n: &BigUint) -> Result<Code, CodeError> {
    let f = decode(m)?;
    encode(&f.substitute(n))
}

/// Evaluates a closed term to the code it denotes.
pub fn eval_term(t: &Term) -> Result<Code, CodeError> {
    match t {
        Term::Numeral(n) => Ok(Code(n.clone())),
        Term::Var => Err(CodeError::OpenTerm),
        Term::Neg(inner) => neg_code(&eval_term(inner)?),
        Term::Conj(a, b) => conj_code(&eval_term(a)?, &eval_term(b)?),
        Term::Imp(a, b) => imp_code(&eval_term(a)?, &eval_term(b)?),
        Term::Diag(a, b) => {
            let m = eval_term(a)?;
            let n = eval_term(b)?;
            diag(&m, n.value())
        }
    }
}

/// Gödel number of a proof transcript.
///
/// Callers are expected to pass kernel-accepted proofs; the code itself is
/// defined for any transcript over the self-reference fragment.
pub fn proof_code(p: &Proof) -> Result<Code, CodeError> {
    let mut out = vec![TAG_PROOF];
    serialize_steps(&p.steps, &mut out)?;
    Ok(bytes_to_code(out))
}

fn decode_proof(c: &Code) -> Result<Proof, CodeError> {
    if c.0.is_zero() {
        return Err(CodeError::Invalid("zero is not a code".into()));
    }
    let bytes = code_bytes(c);
    let mut reader = Reader {
        bytes: &bytes,
        pos: 0,
    };
    if reader.next()? != TAG_PROOF {
        return Err(reader.invalid("not a proof code"));
    }
    let p = reader.steps()?;
    if reader.pos != bytes.len() {
        return Err(reader.invalid("trailing bytes"));
    }
    if p.is_empty() {
        return Err(reader.invalid("empty proof"));
    }
    Ok(p)
}

/// The decidable proof relation `R`: true iff `i` is the Gödel number of a
/// kernel-valid proof (under one of the code-predicate rule sets) whose
/// conclusion has Gödel number `j`. Invalid `i` yields `false`, never an
/// error.
pub fn check_proof_code(i: &Code, j: &Code) -> bool {
    let Ok(proof) = decode_proof(i) else {
        return false;
    };
    let Some(conclusion) = proof.conclusion() else {
        return false;
    };
    let Ok(cj) = encode(conclusion) else {
        return false;
    };
    if cj != *j {
        return false;
    }
    check(&proof, &RuleSet::fitch()).ok || check(&proof, &RuleSet::knower()).ok
}

#[cfg(test)]
mod tests {
    use num_traits::One;
    use rand::Rng;

    use super::*;
    use crate::formula::parse;
    use crate::testkit;

    fn enc(text: &str) -> Code {
        encode(&parse(text).unwrap()).unwrap()
    }

    #[test]
    fn round_trips() {
        for text in ["Q1", "false", "Q1 & ~P[D(x,x) Imp 81]", "P[Neg 5 Conj x] <-> Q2 xor Q3"] {
            let f = parse(text).unwrap();
            assert_eq!(decode(&encode(&f).unwrap()).unwrap(), f, "{text}");
        }
    }

    #[test]
    fn random_round_trips() {
        let mut rng = testkit::rng(11);
        let cfg = testkit::GenConfig::fragment();
        for _ in 0..500 {
            let f = testkit::random_formula(&mut rng, &cfg);
            assert_eq!(decode(&encode(&f).unwrap()).unwrap(), f);
        }
    }

    #[test]
    fn zero_and_small_values_are_rejected_not_panics() {
        assert!(decode(&Code::from(0u64)).is_err());
        let mut rng = testkit::rng(12);
        let mut valid = 0u32;
        for _ in 0..2000 {
            let c = Code::from(rng.gen::<u64>());
            if decode(&c).is_ok() {
                valid += 1;
            }
        }
        // Almost all naturals are not codes; small valid ones do exist
        // (e.g. single-tag serializations), decoding just must not panic.
        assert!(valid < 100);
        assert_eq!(decode(&encode(&Formula::Falsum).unwrap()).unwrap(), Formula::Falsum);
    }

    #[test]
    fn encode_rejects_modal_operators() {
        let f = parse("Ka 1").unwrap();
        assert_eq!(encode(&f), Err(CodeError::FragmentViolation));
    }

    #[test]
    fn connective_codes_are_homomorphic() {
        let a = parse("Q1 & P[7]").unwrap();
        let b = parse("~Q2").unwrap();
        let (ca, cb) = (encode(&a).unwrap(), encode(&b).unwrap());
        assert_eq!(
            decode(&neg_code(&ca).unwrap()).unwrap(),
            Formula::not(a.clone())
        );
        assert_eq!(
            decode(&conj_code(&ca, &cb).unwrap()).unwrap(),
            Formula::and(a.clone(), b.clone())
        );
        assert_eq!(
            decode(&imp_code(&ca, &cb).unwrap()).unwrap(),
            Formula::implies(a.clone(), b.clone())
        );
        assert_eq!(neg_code(&ca).unwrap(), encode(&Formula::not(a)).unwrap());
        assert!(conj_code(&Code::from(1u64), &cb).is_err());
    }

    #[test]
    fn diag_matches_substitution() {
        let q1 = enc("Q1");
        assert_eq!(diag(&q1, &BigUint::from(5u32)).unwrap(), q1);
        let mut rng = testkit::rng(13);
        let cfg = testkit::GenConfig::fragment();
        for _ in 0..200 {
            let f = testkit::random_formula(&mut rng, &cfg);
            let n = testkit::random_numeral(&mut rng);
            let c = encode(&f).unwrap();
            assert_eq!(
                diag(&c, &n).unwrap(),
                encode(&f.substitute(&n)).unwrap()
            );
        }
        assert!(diag(&Code::from(2u64), &BigUint::one()).is_err());
    }

    #[test]
    fn eval_term_examples() {
        assert_eq!(
            *eval_term(&Term::numeral(9u32)).unwrap().value(),
            BigUint::from(9u32)
        );
        assert_eq!(
            eval_term(&Term::diag(Term::Var, Term::Var)),
            Err(CodeError::OpenTerm)
        );
        // Neg of a non-code numeral is an invalid-code error.
        assert!(matches!(
            eval_term(&Term::neg(Term::numeral(5u32))),
            Err(CodeError::Invalid(_))
        ));
        let q1 = enc("Q1");
        let t = Term::imp(
            Term::Numeral(q1.value().clone()),
            Term::Numeral(enc("Q2").value().clone()),
        );
        assert_eq!(eval_term(&t).unwrap(), enc("Q1 -> Q2"));
    }

    #[test]
    fn proof_relation_basics() {
        use crate::formula::{RuleLabel, Step};
        let mut p = Proof::new();
        p.push(Step::new(parse("Q1 -> Q1").unwrap(), RuleLabel::Taut));
        let pc = proof_code(&p).unwrap();
        assert!(check_proof_code(&pc, &enc("Q1 -> Q1")));
        assert!(!check_proof_code(&pc, &enc("Q2 -> Q2")));
        assert!(!check_proof_code(&Code::from(0u64), &enc("false")));
        // A transcript that fails both kernels is not in the relation.
        let mut bad = Proof::new();
        bad.push(Step::new(parse("Q1").unwrap(), RuleLabel::Taut));
        let bc = proof_code(&bad).unwrap();
        assert!(!check_proof_code(&bc, &enc("Q1")));
        // Round trip through the serialization.
        assert_eq!(decode_proof(&pc).unwrap(), p);
    }

    #[test]
    fn code_length_grows_linearly() {
        // digits(#f) <= C * size(f) * max_numeral_digits(f) with C = 16.
        let mut rng = testkit::rng(14);
        let cfg = testkit::GenConfig::fragment();
        for _ in 0..300 {
            let f = testkit::random_formula(&mut rng, &cfg);
            let code = encode(&f).unwrap();
            let bound = 16 * f.size() * f.max_numeral_digits();
            assert!(
                code.digit_len() <= bound,
                "digits {} > bound {} for {f}",
                code.digit_len(),
                bound
            );
        }
    }

    #[test]
    fn abbreviated_display() {
        let short = Code::from(12345u64);
        assert_eq!(short.abbreviated(), "12345");
        let f = crate::selfref::build_fitch(2, crate::selfref::Connective::Xor).unwrap();
        let abbr = encode(&f.sentence).unwrap().abbreviated();
        assert!(abbr.contains("digits, sha256:"));
        assert!(abbr.contains("..."));
    }
}
