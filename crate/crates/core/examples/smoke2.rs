use examiner_core::epistemic::*;
use examiner_core::formula::{print, Formula, RuleLabel};
use std::time::Instant;

fn main() {
    let sys1 = EpistemicSystem::new(1).unwrap();
    println!("m=1 announcement: {}", print(&build_announcement(&sys1).formula));
    let sys2 = EpistemicSystem::new(2).unwrap();
    println!("m=2 announcement: {}", print(&build_announcement(&sys2).formula));
    println!("m=2 tower: {}", print(&sys2.tower()));

    let t0 = Instant::now();
    for m in 1..=5u32 {
        let sys = EpistemicSystem::new(m).unwrap();
        if m >= 2 {
            let lemma = derive_elimination_lemma(&sys).unwrap();
            let rep = check(&lemma, &sys);
            println!("m={m} lemma: {} ({} steps): {}", rep.ok, lemma.total_steps(), print(lemma.conclusion().unwrap()));
            assert!(rep.ok, "lemma rejected: {rep}");
        }
        let contra = derive_contradiction(&sys);
        let rep = check(&contra, &sys);
        println!("m={m} contradiction: {} ({} steps) concl={:?}", rep.ok, contra.total_steps(), contra.conclusion());
        assert!(rep.ok, "contradiction rejected: {rep}");
        assert_eq!(contra.conclusion(), Some(&Formula::Falsum));
        // ablations
        for rule in [RuleLabel::KdConj, RuleLabel::KdMp, RuleLabel::Ki, RuleLabel::Ke, RuleLabel::Hyp] {
            let used = contra.any_step(&mut |s| s.rule == rule);
            if used {
                let rep = check(&contra, &sys.without(rule));
                assert!(!rep.ok, "m={m}: still accepted without {rule}");
            } else {
                println!("  m={m}: rule {rule} unused");
            }
        }
    }
    println!("all m in 1..=5 done in {:?}", t0.elapsed());

    // m=2 transcript printout
    let sys = EpistemicSystem::new(2).unwrap();
    let contra = derive_contradiction(&sys);
    println!("--- m=2 contradiction transcript ---\n{}", contra.to_text());

    // designated students
    let sys5 = EpistemicSystem::designated_students(5).unwrap();
    let c5 = derive_contradiction(&sys5);
    let rep = check(&c5, &sys5);
    println!("designated students m=5: {} ({} steps)", rep.ok, c5.total_steps());
    assert!(rep.ok);

    // relabeling isomorphism
    let base = derive_contradiction(&EpistemicSystem::new(5).unwrap());
    let defaults: Vec<String> = (1..=5).map(|k| k.to_string()).collect();
    let renamed = base.map_formulas(&|f| f.map_agents(&|a| {
        let idx = defaults.iter().position(|d| d == a).unwrap();
        DESIGNATED_STUDENTS[idx].to_string()
    }));
    println!("relabel isomorphism: {}", renamed == c5);
    let t1 = Instant::now();
    let rep = check(&c5, &sys5);
    println!("recheck m=5: {} in {:?}", rep.ok, t1.elapsed());
}
