//! Walks the instance transformers: inlining definitions, turning
//! redundancy questions into satisfiability questions, merging and
//! eliminating constant constraints, and the Turing-reduction drivers.

use indexmap::IndexMap;

use alien_csp::reductions::{
    endomorphism_relation, equiv_via_impl, impl_via_redundant, inline_ppdefs, merge_constants,
    neq_gadget_reduce, redundant_to_alien,
};
use alien_csp::{
    constants_structure, solve_bruteforce, Atom, BruteForceOptions, Constraint, Instance,
    PpDefinition, Relation, Structure,
};

fn sat(inst: &Instance) -> bool {
    solve_bruteforce(inst, &BruteForceOptions::default())
        .unwrap()
        .is_sat()
}

fn main() {
    // or(x, x) holds only for x = 1, so the constant 1 has an alien-free
    // definition over {or}. Inlining it removes the alien constraint.
    let base = Structure::new(
        2,
        vec![(
            "or".to_string(),
            Relation::new(2, [vec![0, 1], vec![1, 0], vec![1, 1]]).unwrap(),
        )],
    )
    .unwrap();
    let inst = Instance::new(
        base.clone(),
        constants_structure(2),
        vec!["x".to_string(), "y".to_string()],
        vec![
            Constraint::base("or", vec![0, 1]),
            Constraint::alien("c_1", vec![0]),
        ],
    )
    .unwrap();
    let mut defs = IndexMap::new();
    defs.insert(
        "c_1".to_string(),
        PpDefinition::new(1, 0, vec![Atom::base("or", vec![0, 0])]),
    );
    let inlined = inline_ppdefs(&inst, &defs).unwrap();
    println!(
        "inlining c_1: {} alien constraints -> {}, satisfiable {} -> {}",
        inst.alien_count(),
        inlined.alien_count(),
        sat(&inst),
        sat(&inlined),
    );

    // Redundancy via satisfiability: swap the target constraint for its
    // complement; the original is redundant exactly when that instance has
    // no solution.
    let duplicated = Instance::new(
        base.clone(),
        Structure::without_relations(2),
        vec!["x".to_string(), "y".to_string()],
        vec![
            Constraint::base("or", vec![0, 1]),
            Constraint::base("or", vec![0, 1]),
        ],
    )
    .unwrap();
    let rewritten = redundant_to_alien(&duplicated, 1).unwrap();
    println!(
        "duplicated constraint: complement-instance satisfiable = {} (so redundant = {})",
        sat(&rewritten),
        !sat(&rewritten),
    );

    // The drivers answer implication and equivalence through the same
    // rewrite, one constraint at a time.
    let weaker = Instance::new(
        base.clone(),
        Structure::without_relations(2),
        vec!["x".to_string(), "y".to_string()],
        vec![Constraint::base("or", vec![0, 1])],
    )
    .unwrap();
    let mut solve = |i: &Instance| solve_bruteforce(i, &BruteForceOptions::default());
    println!(
        "duplicated implies weaker: {}",
        impl_via_redundant(&duplicated, &weaker, &mut solve).unwrap()
    );
    println!(
        "duplicated equiv weaker: {}",
        equiv_via_impl(&duplicated, &weaker, &mut solve).unwrap()
    );

    // Constants against a complement-invariant base reduce to one alien
    // disequality; constants against a core reduce to one constraint over
    // the endomorphism relation.
    let neq_base = Structure::new(
        2,
        vec![(
            "neq".to_string(),
            Relation::new(2, [vec![0, 1], vec![1, 0]]).unwrap(),
        )],
    )
    .unwrap();
    let pinned = Instance::new(
        neq_base.clone(),
        constants_structure(2),
        vec!["v".to_string(), "w".to_string()],
        vec![
            Constraint::base("neq", vec![0, 1]),
            Constraint::alien("c_0", vec![0]),
            Constraint::alien("c_1", vec![1]),
            Constraint::alien("c_1", vec![1]),
        ],
    )
    .unwrap();
    let merged = merge_constants(&pinned).unwrap();
    println!(
        "merging constants: {} alien constraints -> {}",
        pinned.alien_count(),
        merged.alien_count()
    );
    let gadget = neq_gadget_reduce(&merged).unwrap();
    println!(
        "disequality gadget: {} (alien constraints {}, satisfiable {})",
        gadget.serialize(),
        gadget.alien_count(),
        sat(&gadget),
    );

    let e = endomorphism_relation(&neq_base).unwrap();
    println!("endomorphism relation of the neq core: {e}");
    let via_e = alien_csp::reductions::constants_to_e_gadget(&merged, &e).unwrap();
    println!(
        "E-gadget: alien constraints {}, satisfiable {}",
        via_e.alien_count(),
        sat(&via_e),
    );
}
