use examiner_core::formula::print_with_env;
use examiner_core::godel::{diag, encode, eval_term, proof_code, check_proof_code};
use examiner_core::selfref::*;
use examiner_core::formula::Formula;

fn main() {
    for m in 1..=5u32 {
        for conn in [Connective::Xor, Connective::Or] {
            if conn == Connective::Xor && m > 2 { continue; }
            let fc = build_fitch(m, conn).unwrap();
            let lhs = diag(&fc.h, fc.h.value()).unwrap();
            let rhs = encode(&fc.sentence).unwrap();
            println!("m={m} {conn}: fixed point {} (h: {} digits, #S: {} digits)",
                lhs == rhs, fc.h.digit_len(), rhs.digit_len());
            for k in 1..=m {
                let tv = eval_term(&fc.day_terms[(k-1) as usize]).unwrap();
                let gv = encode(&fc.day_implication(k)).unwrap();
                assert_eq!(tv, gv, "day term coherence m={m} k={k}");
            }
            if m <= 3 {
                let p = derive_refutation(&fc);
                let rep = check(&p, &RuleSet::fitch());
                println!("  refutation m={m} {conn}: {} ({} steps)", rep.ok, p.total_steps());
                assert!(rep.ok, "refutation rejected: {rep}");
                assert_eq!(p.conclusion(), Some(&Formula::not(fc.sentence.clone())));
                let pc = proof_code(&p).unwrap();
                let ns = encode(&Formula::not(fc.sentence.clone())).unwrap();
                println!("  self-applicability R(#p, #~S) = {} (proof code: {} digits)", check_proof_code(&pc, &ns), pc.digit_len());
            }
        }
    }
    let fc2 = build_fitch(2, Connective::Xor).unwrap();
    println!("open formula (2, xor): {}", print_with_env(&fc2.open_formula, &fc2.env));
    let kc = build_knower();
    println!("knower h: {} digits; S = {}", kc.h.digit_len(), print_with_env(&kc.sentence, &{
        let mut e = examiner_core::formula::SymbolEnv::new();
        e.bind("hK", kc.h.value().clone());
        e
    }));
    let tau = match &kc.sentence { Formula::CodePred(_, t) => t.clone(), _ => unreachable!() };
    assert_eq!(eval_term(&tau).unwrap(), kc.negated_code, "knower eval identity");
    println!("knower eval identity ok; #(~S) digits = {}", kc.negated_code.digit_len());
    let kp = derive_knower_contradiction(&kc);
    let rep = check(&kp, &RuleSet::knower());
    println!("knower contradiction: {} ({} steps), conclusion {:?}", rep.ok, kp.total_steps(), kp.conclusion());
    assert!(rep.ok, "knower rejected: {rep}");
}
