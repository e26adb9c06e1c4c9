//! Detects which closure operations a Boolean structure respects and runs
//! the matching polynomial-time solver against brute force.

use alien_csp::{
    schaefer_flags, solve_bruteforce, solve_schaefer, BruteForceOptions, Constraint, Instance,
    Relation, SchaeferClass, Structure,
};

fn structure(rels: Vec<(&str, Vec<Vec<usize>>)>) -> Structure {
    Structure::new(
        2,
        rels.into_iter()
            .map(|(s, ts)| {
                let arity = ts.first().map_or(1, Vec::len);
                (s.to_string(), Relation::new(arity, ts).unwrap())
            })
            .collect::<Vec<_>>(),
    )
    .unwrap()
}

fn main() {
    let horn = structure(vec![
        ("imp", vec![vec![0, 0], vec![0, 1], vec![1, 1]]),
        ("nand", vec![vec![0, 0], vec![0, 1], vec![1, 0]]),
    ]);
    let two_sat = structure(vec![("neq", vec![vec![0, 1], vec![1, 0]])]);
    let affine = structure(vec![(
        "xor",
        vec![vec![0, 1], vec![1, 0]],
    )]);
    let one_in_three = structure(vec![(
        "oit",
        vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]],
    )]);

    for (name, s) in [
        ("horn", &horn),
        ("two-sat", &two_sat),
        ("affine", &affine),
        ("1-in-3", &one_in_three),
    ] {
        let flags = schaefer_flags(s).unwrap();
        println!(
            "{name:8} -> {}",
            serde_json::to_string(&flags).unwrap()
        );
    }

    // A Horn instance: implications forming a chain plus a nand at the top.
    let inst = Instance::new(
        horn,
        Structure::without_relations(2),
        vec!["a".to_string(), "b".to_string(), "c".to_string()],
        vec![
            Constraint::base("imp", vec![0, 1]),
            Constraint::base("imp", vec![1, 2]),
            Constraint::base("nand", vec![0, 2]),
        ],
    )
    .unwrap();

    let fast = solve_schaefer(&inst, SchaeferClass::Horn).unwrap();
    let slow = solve_bruteforce(&inst, &BruteForceOptions::default()).unwrap();
    println!(
        "horn solver:  {}",
        serde_json::to_string(&fast).unwrap()
    );
    println!(
        "brute force:  {}",
        serde_json::to_string(&slow).unwrap()
    );
    assert_eq!(fast.is_sat(), slow.is_sat());

    // The dedicated solvers verify their witnesses, so a wrong class claim
    // is caught instead of silently accepted.
    let oit_inst = Instance::new(
        one_in_three,
        Structure::without_relations(2),
        vec!["a".to_string(), "b".to_string(), "c".to_string()],
        vec![Constraint::base("oit", vec![0, 1, 2])],
    )
    .unwrap();
    let wrong = solve_schaefer(&oit_inst, SchaeferClass::ZeroValid);
    println!(
        "claiming zero-valid on 1-in-3: {}",
        wrong.expect_err("the all-zero witness fails verification")
    );
}
