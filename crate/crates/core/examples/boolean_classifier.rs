//! Runs the Boolean complexity classifier over base/alien pairs covering
//! all five verdicts, then demonstrates the constant-assignment shortcut
//! that backs the "polynomial at one alien constraint" case.

use alien_csp::{
    classify_boolean, constants_structure, solve_alien_by_constants, solve_bruteforce,
    BruteForceOptions, Constraint, Instance, Relation, Structure,
};

fn structure(rels: Vec<(&str, usize, Vec<Vec<usize>>)>) -> Structure {
    Structure::new(
        2,
        rels.into_iter()
            .map(|(s, arity, ts)| (s.to_string(), Relation::new(arity, ts).unwrap()))
            .collect::<Vec<_>>(),
    )
    .unwrap()
}

fn main() {
    // x1 = x2 or x2 = x3: satisfied by anything gluing a neighboring pair.
    let link = structure(vec![(
        "link",
        3,
        vec![
            vec![0, 0, 0],
            vec![0, 0, 1],
            vec![1, 0, 0],
            vec![0, 1, 1],
            vec![1, 1, 0],
            vec![1, 1, 1],
        ],
    )]);
    let neq = structure(vec![("neq", 2, vec![vec![0, 1], vec![1, 0]])]);
    let one_in_three = structure(vec![(
        "oit",
        3,
        vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]],
    )]);
    let horn = structure(vec![
        ("imp", 2, vec![vec![0, 0], vec![0, 1], vec![1, 1]]),
        ("c_0", 1, vec![vec![0]]),
        ("c_1", 1, vec![vec![1]]),
    ]);

    let pairs: Vec<(&str, &Structure, Structure)> = vec![
        ("link + neq", &link, neq.clone()),
        ("link + constants", &link, constants_structure(2)),
        ("horn + 1-in-3", &horn, one_in_three.clone()),
        ("horn + neq", &horn, neq),
        ("1-in-3 + constants", &one_in_three, constants_structure(2)),
    ];
    for (name, base, alien) in &pairs {
        let report = classify_boolean(base, alien).unwrap();
        println!("{name:20} -> {}", report.verdict);
    }
    println!();

    // The "link + constants" pair is hard from two alien constraints but
    // easy at one. With a single constant pinned, every satisfiable
    // instance also has an all-constant solution, so trying both constant
    // assignments decides it.
    let report = classify_boolean(&link, &constants_structure(2)).unwrap();
    println!(
        "evidence: {}",
        serde_json::to_string(&report).unwrap()
    );

    let inst = Instance::new(
        link,
        constants_structure(2),
        vec!["x".to_string(), "y".to_string(), "z".to_string()],
        vec![
            Constraint::base("link", vec![0, 1, 2]),
            Constraint::alien("c_1", vec![1]),
        ],
    )
    .unwrap();
    let constant = solve_alien_by_constants(&inst);
    let brute = solve_bruteforce(&inst, &BruteForceOptions::default()).unwrap();
    println!(
        "constant strategy: {}",
        serde_json::to_string(&constant).unwrap()
    );
    println!(
        "brute force:       {}",
        serde_json::to_string(&brute).unwrap()
    );
}
