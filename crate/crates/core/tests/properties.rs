//! Property tests: document roundtrips, solver/witness coherence, flag
//! algebra, and the equality-language invariants. Random inputs come from
//! the seeded generators in `common`, so every failure replays from the
//! seed proptest reports.

mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom as _;
use rand::Rng as _;

use alien_csp::structures::no_references;
use alien_csp::{
    decompose_alien, eq_definition_models, ground_equality, orbit_decompose, schaefer_flags,
    solve_alien_fpt, solve_bruteforce, BaseSolver, BruteForceOptions, EqLanguage, EqRelation,
    Instance, OperationTable, Relation, SchaeferClass, Structure, Value,
};

use common::{
    close_under, oracle_sat, oracle_solve, random_instance, random_relation, rng, InstanceShape,
};

fn random_structure(seed: u64, domain: usize, max_arity: usize) -> Structure {
    let mut r = rng(seed);
    let count = r.gen_range(1..=3);
    let rels: Vec<(String, Relation)> = (0..count)
        .map(|i| {
            let arity = r.gen_range(1..=max_arity);
            (
                format!("r{i}"),
                random_relation(&mut r, domain, arity, 5),
            )
        })
        .collect();
    Structure::new(domain, rels).expect("generated symbols are distinct")
}

fn random_pair(seed: u64, domain: usize) -> Instance {
    let mut r = rng(seed);
    let count = r.gen_range(1..=2);
    let rels: Vec<(String, Relation)> = (0..count)
        .map(|i| {
            let arity = r.gen_range(1..=3);
            (
                format!("r{i}"),
                random_relation(&mut r, domain, arity, 5),
            )
        })
        .collect();
    let base = Structure::new(domain, rels).expect("generated symbols are distinct");
    let alien = Structure::new(
        domain,
        vec![("s0".to_string(), random_relation(&mut r, domain, 2, 3))],
    )
    .expect("single symbol");
    let shape = InstanceShape {
        max_variables: 6,
        max_constraints: 8,
        max_alien: 3,
    };
    random_instance(&mut r, &base, &alien, &shape)
}

fn random_eq_relation(seed: u64, arity: usize) -> EqRelation {
    let mut r = rng(seed);
    let count = r.gen_range(0..=4);
    let patterns: Vec<Vec<usize>> = (0..count)
        .map(|_| (0..arity).map(|_| r.gen_range(0..arity)).collect())
        .collect();
    EqRelation::new(arity, patterns).expect("patterns match the arity")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn structures_survive_the_document_roundtrip(seed: u64, domain in 2usize..=4) {
        let s = random_structure(seed, domain, 3);
        let back = Structure::parse(&s.serialize()).expect("own output parses");
        prop_assert_eq!(back, s);
    }

    #[test]
    fn instances_survive_the_document_roundtrip(seed: u64, domain in 2usize..=3) {
        let inst = random_pair(seed, domain);
        let back = Instance::parse(&inst.serialize(), no_references).expect("own output parses");
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn brute_force_matches_the_oracle_and_its_witness_evaluates(seed: u64, domain in 2usize..=3) {
        let inst = random_pair(seed, domain);
        let result = solve_bruteforce(&inst, &BruteForceOptions::default())
            .expect("instances fit the node budget");
        let expected = oracle_solve(&inst);
        prop_assert_eq!(result.is_sat(), expected.is_some());
        if let Some(w) = result.witness() {
            prop_assert!(inst.evaluate(w).expect("witnesses are total"));
        }
        if let Some(values) = expected {
            prop_assert!(inst.evaluate_dense(&values));
        }
    }

    #[test]
    fn union_flags_are_the_intersection_of_side_flags(seed: u64) {
        let mut r = rng(seed);
        let base_arity = r.gen_range(1..=3);
        let base = Structure::new(
            2,
            vec![("r0".to_string(), random_relation(&mut r, 2, base_arity, 4))],
        )
        .expect("single symbol");
        let alien_arity = r.gen_range(1..=3);
        let alien = Structure::new(
            2,
            vec![("s0".to_string(), random_relation(&mut r, 2, alien_arity, 4))],
        )
        .expect("single symbol");
        let union = base.union(&alien).expect("symbols are disjoint");
        let fb = schaefer_flags(&base).expect("Boolean structures always rate");
        let fa = schaefer_flags(&alien).expect("Boolean structures always rate");
        let fu = schaefer_flags(&union).expect("Boolean structures always rate");
        for class in SchaeferClass::ALL {
            prop_assert_eq!(fu.has(class), fb.has(class) && fa.has(class));
        }
    }

    #[test]
    fn closure_output_is_actually_closed(seed: u64) {
        let mut r = rng(seed);
        let ops = [
            OperationTable::boolean_min(),
            OperationTable::boolean_max(),
            OperationTable::boolean_majority(),
            OperationTable::boolean_minority(),
        ];
        let op = &ops[r.gen_range(0..ops.len())];
        let arity = r.gen_range(1..=3);
        let rel = close_under(&random_relation(&mut r, 2, arity, 4), op);
        prop_assert!(op.preserves(&rel));
    }

    #[test]
    fn equality_membership_only_sees_the_partition(seed: u64, arity in 1usize..=4) {
        let mut r = rng(seed);
        let rel = random_eq_relation(seed, arity);
        let tuple: Vec<Value> = (0..arity).map(|_| r.gen_range(0..6)).collect();
        let mut names: Vec<Value> = (0..12).collect();
        names.shuffle(&mut r);
        let renamed: Vec<Value> = tuple.iter().map(|&v| names[v]).collect();
        prop_assert_eq!(
            rel.contains(&tuple).expect("widths match"),
            rel.contains(&renamed).expect("widths match")
        );
    }

    #[test]
    fn equality_slices_grow_with_the_domain(seed: u64, arity in 1usize..=3, c in 1usize..=4) {
        let rel = random_eq_relation(seed, arity);
        let small = rel.slice(c).expect("slice widths are positive");
        let large = rel.slice(c + 1).expect("slice widths are positive");
        for t in small.tuples() {
            prop_assert!(large.contains(t));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn branching_respects_its_leaf_bound_and_the_oracle(seed: u64, domain in 2usize..=3) {
        let inst = random_pair(seed, domain);
        let dec = decompose_alien(inst.alien(), domain).expect("domains match");
        let out = solve_alien_fpt(
            &inst,
            &dec,
            &BaseSolver::Brute(BruteForceOptions::default()),
        )
        .expect("leaves fit the node budget");
        prop_assert_eq!(out.result.is_sat(), oracle_sat(&inst));
        prop_assert!(out.leaves <= out.leaf_bound);
        let k = inst.alien_count() as u32;
        prop_assert!(out.leaf_bound <= (dec.branching() as u64).saturating_pow(k));
    }

    #[test]
    fn grounding_needs_no_spare_values(seed: u64) {
        let mut r = rng(seed);
        let relations: Vec<(String, EqRelation)> = (0..r.gen_range(1..=2))
            .map(|i| (format!("e{i}"), random_eq_relation(seed.wrapping_add(i as u64), r.gen_range(1..=3))))
            .collect();
        let base = EqLanguage::new(relations).expect("generated symbols are distinct");
        let n = r.gen_range(1..=4);
        let variables: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let symbols: Vec<(String, usize)> = base
            .relations()
            .map(|(s, rel)| (s.to_string(), rel.arity()))
            .collect();
        let constraints: Vec<alien_csp::Constraint> = (0..r.gen_range(1..=4))
            .map(|_| {
                let (s, a) = symbols[r.gen_range(0..symbols.len())].clone();
                alien_csp::Constraint::base(s, (0..a).map(|_| r.gen_range(0..n)).collect())
            })
            .collect();
        let inst = alien_csp::EqInstance::new(
            base.clone(),
            EqLanguage::empty(),
            variables.clone(),
            constraints.clone(),
            [],
        )
        .expect("generated constraints are well formed");

        let grounded = ground_equality(&inst).expect("grounding is total");
        let wider = Structure::new(
            grounded.domain_size() + 1,
            base.relations()
                .map(|(s, rel)| {
                    (s.to_string(), rel.slice(grounded.domain_size() + 1).expect("slice widths are positive"))
                })
                .collect::<Vec<_>>(),
        )
        .expect("slices stay in the domain");
        let widened = Instance::new(
            wider,
            Structure::without_relations(grounded.domain_size() + 1),
            variables,
            constraints,
        )
        .expect("same constraints over a wider domain");
        prop_assert_eq!(oracle_sat(&grounded), oracle_sat(&widened));
    }

    #[test]
    fn orbit_definitions_union_back_to_their_relation(seed: u64, arity in 1usize..=3, domain in 1usize..=4) {
        let rel = random_eq_relation(seed, arity);
        let empty = EqLanguage::empty();
        let mut union = Relation::empty(arity);
        for def in orbit_decompose(&rel) {
            let models = eq_definition_models(&empty, &empty, &def, domain)
                .expect("pure equality definitions always evaluate");
            let merged: Vec<Vec<Value>> = union
                .tuples()
                .chain(models.tuples())
                .map(|t| t.to_vec())
                .collect();
            union = Relation::new(arity, merged).expect("arities agree");
        }
        prop_assert_eq!(union, rel.slice(domain).expect("slice widths are positive"));
    }
}
