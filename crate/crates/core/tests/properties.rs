mod common;

use std::collections::BTreeSet;

use common::{learning_instance, stratified_program};
use fold_core::dataset::{read_csv, split_folds, LoadOptions};
use fold_core::engine::{covers, stable_model, stable_model_with, EngineConfig, Strategy};
use fold_core::learner::{learn, LearnerConfig};
use fold_core::logic::{parse_program, print_program, stratify, Atom, Literal, Program};
use proptest::prelude::*;

fn model_atoms(p: &Program, strategy: Strategy) -> BTreeSet<Atom> {
    let config = EngineConfig {
        strategy,
        ..EngineConfig::default()
    };
    stable_model_with(p, &config).unwrap().atoms().collect()
}

/// Heads sit at or above positive body predicates and strictly above
/// negated ones.
fn strata_monotone(p: &Program) -> bool {
    let s = stratify(p).unwrap().strata.unwrap();
    p.clauses.iter().all(|c| {
        let h = s[&c.head.pred()];
        c.body.iter().all(|l| match l {
            Literal::Pos(a) => s.get(&a.pred()).is_none_or(|&b| b <= h),
            Literal::Neg(a) => s.get(&a.pred()).is_none_or(|&b| b < h),
            _ => true,
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn learned_programs_round_trip(seed in any::<u64>()) {
        let inst = learning_instance(seed, true);
        let h = learn(&inst.background, &inst.examples, &LearnerConfig::fold_r()).unwrap().program();
        prop_assert_eq!(parse_program(&print_program(&h)).unwrap(), h);
    }

    #[test]
    fn generated_programs_round_trip(seed in any::<u64>()) {
        let p = parse_program(&stratified_program(seed)).unwrap();
        prop_assert_eq!(parse_program(&print_program(&p)).unwrap(), p);
    }

    #[test]
    fn naive_matches_semi_naive(seed in any::<u64>()) {
        let p = parse_program(&stratified_program(seed)).unwrap();
        prop_assert_eq!(model_atoms(&p, Strategy::Naive), model_atoms(&p, Strategy::SemiNaive));
    }

    #[test]
    fn naive_matches_semi_naive_on_learned(seed in any::<u64>()) {
        let inst = learning_instance(seed, true);
        let h = learn(&inst.background, &inst.examples, &LearnerConfig::fold_r()).unwrap().program();
        let p = inst.background.union(&h);
        prop_assert_eq!(model_atoms(&p, Strategy::Naive), model_atoms(&p, Strategy::SemiNaive));
    }

    #[test]
    fn covers_is_a_subset(seed in any::<u64>(), mask in any::<u32>()) {
        let inst = learning_instance(seed, true);
        let h = learn(&inst.background, &inst.examples, &LearnerConfig::fold_r()).unwrap().program();
        let all: Vec<Atom> = inst.examples.positives.iter().chain(&inst.examples.negatives).cloned().collect();
        let e: BTreeSet<Atom> = all.into_iter().enumerate().filter(|(i, _)| mask >> (i % 32) & 1 == 1).map(|(_, a)| a).collect();
        let covered = covers(&h, &e, &inst.background).unwrap();
        prop_assert!(covered.is_subset(&e));
    }

    #[test]
    fn training_fit_is_exact(seed in any::<u64>()) {
        let inst = learning_instance(seed, true);
        let h = learn(&inst.background, &inst.examples, &LearnerConfig::fold_r()).unwrap().program();
        let pos = &inst.examples.positives;
        prop_assert_eq!(&covers(&h, pos, &inst.background).unwrap(), pos);
        prop_assert!(covers(&h, &inst.examples.negatives, &inst.background).unwrap().is_empty());
    }

    #[test]
    fn learned_strata_are_monotone(seed in any::<u64>()) {
        let inst = learning_instance(seed, true);
        let h = learn(&inst.background, &inst.examples, &LearnerConfig::fold_r()).unwrap().program();
        prop_assert!(strata_monotone(&h));
        prop_assert!(strata_monotone(&inst.background.union(&h)));
    }

    #[test]
    fn generated_strata_are_monotone(seed in any::<u64>()) {
        prop_assert!(strata_monotone(&parse_program(&stratified_program(seed)).unwrap()));
    }

    #[test]
    fn fold_r_without_numbers_is_fold(seed in any::<u64>()) {
        let inst = learning_instance(seed, false);
        let a = learn(&inst.background, &inst.examples, &LearnerConfig::fold()).unwrap();
        let b = learn(&inst.background, &inst.examples, &LearnerConfig::fold_r()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn recursion_flag_keeps_training_fit(seed in any::<u64>()) {
        let inst = learning_instance(seed, true);
        let config = LearnerConfig { allow_recursion: true, ..LearnerConfig::fold_r() };
        let h = learn(&inst.background, &inst.examples, &config).unwrap().program();
        let pos = &inst.examples.positives;
        prop_assert_eq!(&covers(&h, pos, &inst.background).unwrap(), pos);
        prop_assert!(covers(&h, &inst.examples.negatives, &inst.background).unwrap().is_empty());
    }

    #[test]
    fn folds_partition_rows(rows in 2usize..60, k in 2usize..12, seed in any::<u64>()) {
        prop_assume!(k <= rows);
        let mut csv = String::from("v:num,y:label=yes\n");
        for i in 0..rows {
            csv.push_str(&format!("{i},{}\n", if i % 3 == 0 { "yes" } else { "no" }));
        }
        let d = read_csv(csv.as_bytes(), "t", &LoadOptions::default()).unwrap();
        let folds = split_folds(&d, k, seed).unwrap();
        prop_assert_eq!(folds.len(), k);
        let mut seen = BTreeSet::new();
        let sizes: Vec<usize> = folds.iter().map(|(_, test)| test.len()).collect();
        for (train, test) in &folds {
            prop_assert_eq!(train.len() + test.len(), rows);
            let tr: BTreeSet<&str> = train.rows.iter().map(|r| r.subject.as_str()).collect();
            for r in &test.rows {
                prop_assert!(!tr.contains(r.subject.as_str()));
                prop_assert!(seen.insert(r.subject.clone()));
            }
        }
        prop_assert_eq!(seen.len(), rows);
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let again = split_folds(&d, k, seed).unwrap();
        prop_assert_eq!(folds, again);
    }
}

#[test]
fn model_is_a_fixpoint() {
    for seed in 0..50 {
        let p = parse_program(&stratified_program(seed)).unwrap();
        let m: BTreeSet<Atom> = stable_model(&p).unwrap().atoms().collect();
        let facts: BTreeSet<Atom> = p.clauses.iter().filter(|c| c.is_fact()).map(|c| c.head.clone()).collect();
        assert!(facts.is_subset(&m), "seed {seed}");
    }
}
