//! Tours the equality-language toolkit: relations as kernel sets, the
//! Horn and zero-validity tests, finite slices, hardness thresholds,
//! orbit decompositions, grounding, and the two specialized solvers.

use alien_csp::{
    eq_compute_c, eq_solve_alien, eq_solve_horn_fpt, ground_equality, orbit_decompose,
    solve_bruteforce, BruteForceOptions, Constraint, EqInstance, EqLanguage, EqRelation,
    NeqPrecondition,
};

fn main() {
    // Relations over an infinite domain that only see which arguments
    // coincide. A formula compiles to the set of satisfying partitions.
    let link = EqRelation::from_formula(3, "(x0=x1)|(x1=x2)").unwrap();
    let neq = EqRelation::from_formula(2, "x0!=x1").unwrap();
    let nad = EqRelation::from_formula(3, "(x0=x1)|(x1=x2)|(x0=x2)").unwrap();

    println!("kernels of x0=x1 | x1=x2:");
    for kernel in link.kernels() {
        println!("  {kernel:?}");
    }
    println!("link contains (7,7,9): {}", link.contains(&[7, 7, 9]).unwrap());
    println!("link is zero-valid: {}", link.is_zero_valid());
    println!("link is horn: {}", link.is_horn());
    println!("neq is horn:  {}", neq.is_horn());

    // Finite slices restrict to the values 0..c. The 2-slice of the link
    // relation is where its hardness with constants first shows.
    println!("2-slice of link: {}", link.slice(2).unwrap());

    let link_lang = EqLanguage::new([("link".to_string(), link.clone())]).unwrap();
    let nad_lang = EqLanguage::new([("nad".to_string(), nad.clone())]).unwrap();
    println!("threshold c for {{link}}: {:?}", eq_compute_c(&link_lang).unwrap());
    println!("threshold c for {{nad}}:  {:?}", eq_compute_c(&nad_lang).unwrap());

    // Each kernel is one orbit, definable by equalities inside blocks and
    // disequalities between them.
    println!("orbit decomposition of nad:");
    for def in orbit_decompose(&nad) {
        println!("  {}", def.serialize());
    }

    // An instance with n variables needs at most n ground values, so the
    // infinite domain reduces to a finite brute-force search.
    let neq_lang = EqLanguage::new([("neq".to_string(), neq.clone())]).unwrap();
    let inst = EqInstance::new(
        neq_lang.clone(),
        EqLanguage::new([("link".to_string(), link.clone())]).unwrap(),
        vec!["x".to_string(), "y".to_string(), "z".to_string()],
        vec![
            Constraint::base("neq", vec![0, 1]),
            Constraint::base("neq", vec![1, 2]),
            Constraint::alien("link", vec![0, 1, 2]),
        ],
        [],
    )
    .unwrap();
    let grounded = ground_equality(&inst).unwrap();
    println!(
        "grounded domain {}, brute force: {}",
        grounded.domain_size(),
        serde_json::to_string(&solve_bruteforce(&grounded, &BruteForceOptions::default()).unwrap())
            .unwrap()
    );

    // With a Horn base, branching each alien constraint over its kernels
    // gives a fixed-parameter algorithm.
    let outcome = eq_solve_horn_fpt(&inst).unwrap();
    println!(
        "horn branching: {} ({} of at most {} leaves)",
        serde_json::to_string(&outcome.result).unwrap(),
        outcome.leaves,
        outcome.leaf_bound,
    );

    // With a zero-valid base and few alien constraints, solutions can be
    // assumed to use fewer than c values on the alien scopes. The caller
    // vouches for that precondition explicitly.
    let ranged_inst = EqInstance::new(
        nad_lang,
        neq_lang,
        vec!["x".to_string(), "y".to_string(), "z".to_string()],
        vec![
            Constraint::base("nad", vec![0, 1, 2]),
            Constraint::alien("neq", vec![0, 1]),
        ],
        [],
    )
    .unwrap();
    let result = eq_solve_alien(&ranged_inst, 3, NeqPrecondition::Asserted).unwrap();
    println!(
        "range-bounded solver: {}",
        serde_json::to_string(&result).unwrap()
    );
}
