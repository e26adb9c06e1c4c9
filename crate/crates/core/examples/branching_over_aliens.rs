//! Solves instances whose few alien constraints would wreck the base
//! language's tractability, by branching each alien constraint over a
//! union decomposition into base-friendly parts.

use alien_csp::{
    decompose_alien, schaefer_flags, solve_alien_auto, solve_alien_fpt, BaseSolver, Constraint,
    Instance, Relation, SchaeferClass, Structure,
};

fn main() {
    // Implication alone is Horn, hence polynomial. Disequality is not
    // Horn, so adding even a few ≠-constraints leaves the Horn solver
    // inapplicable as-is.
    let base = Structure::new(
        2,
        vec![(
            "imp".to_string(),
            Relation::new(2, [vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap(),
        )],
    )
    .unwrap();
    let alien = Structure::new(
        2,
        vec![(
            "neq".to_string(),
            Relation::new(2, [vec![0, 1], vec![1, 0]]).unwrap(),
        )],
    )
    .unwrap();

    println!(
        "base flags:  {}",
        serde_json::to_string(&schaefer_flags(&base).unwrap()).unwrap()
    );
    println!(
        "alien flags: {}",
        serde_json::to_string(&schaefer_flags(&alien).unwrap()).unwrap()
    );

    // The default decomposition splits every alien relation into
    // singletons, one per tuple. Singletons survive all four closure
    // operations, so the branches stay solvable by the base-class solver.
    let decomposition = decompose_alien(&alien, base.domain_size()).unwrap();
    for (symbol, parts) in decomposition.parts() {
        println!("{symbol} splits into {} parts:", parts.len());
        for part in parts {
            println!("  {}", part.relation);
        }
    }

    // x -> y, y -> z, plus two alien disequalities. Branching tries the
    // singleton replacements per alien constraint; the leaf count is
    // bounded by (parts per constraint)^k.
    let inst = Instance::new(
        base,
        alien,
        vec!["x".to_string(), "y".to_string(), "z".to_string()],
        vec![
            Constraint::base("imp", vec![0, 1]),
            Constraint::base("imp", vec![1, 2]),
            Constraint::alien("neq", vec![0, 2]),
            Constraint::alien("neq", vec![0, 1]),
        ],
    )
    .unwrap();

    let outcome = solve_alien_fpt(
        &inst,
        &decomposition,
        &BaseSolver::Schaefer(SchaeferClass::Horn),
    )
    .unwrap();
    println!(
        "fpt result: {} ({} of at most {} leaves, branching {})",
        serde_json::to_string(&outcome.result).unwrap(),
        outcome.leaves,
        outcome.leaf_bound,
        outcome.branching,
    );

    // The automatic front door inspects the languages first. Here the
    // union of base and alien happens to be bijunctive, so it skips
    // branching and solves the whole instance directly.
    let auto = solve_alien_auto(&inst).unwrap();
    println!("auto picked: {}", serde_json::to_string(&auto).unwrap());

    // Against an alien relation that poisons the union, branching is the
    // route it takes.
    let one_in_three = Structure::new(
        2,
        vec![(
            "oit".to_string(),
            Relation::new(3, [vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]).unwrap(),
        )],
    )
    .unwrap();
    let harder = Instance::new(
        inst.base().clone(),
        one_in_three,
        vec!["x".to_string(), "y".to_string(), "z".to_string()],
        vec![
            Constraint::base("imp", vec![0, 1]),
            Constraint::base("imp", vec![1, 2]),
            Constraint::alien("oit", vec![0, 1, 2]),
        ],
    )
    .unwrap();
    let auto = solve_alien_auto(&harder).unwrap();
    println!("auto on a harder alien: {}", serde_json::to_string(&auto).unwrap());
}
