//! Builds structures and instances by hand, evaluates assignments, runs
//! the exhaustive solver, and round-trips everything through JSON.

use alien_csp::{
    constants_structure, solve_bruteforce, Assignment, BruteForceOptions, Constraint, Instance,
    Relation, Structure,
};

fn main() {
    // A structure is a domain size plus named relations. This one has the
    // Boolean disequality and implication.
    let base = Structure::new(
        2,
        vec![
            (
                "neq".to_string(),
                Relation::new(2, [vec![0, 1], vec![1, 0]]).unwrap(),
            ),
            (
                "imp".to_string(),
                Relation::new(2, [vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap(),
            ),
        ],
    )
    .unwrap();

    // The two Boolean constants as a second structure. Constraints carry a
    // flag saying which side their symbol resolves against.
    let alien = constants_structure(2);

    let inst = Instance::new(
        base,
        alien,
        vec!["x".to_string(), "y".to_string(), "z".to_string()],
        vec![
            Constraint::base("imp", vec![0, 1]),
            Constraint::base("imp", vec![1, 2]),
            Constraint::alien("c_1", vec![0]),
        ],
    )
    .unwrap();

    println!("instance document:\n  {}", inst.serialize());
    println!("alien constraints: {}", inst.alien_count());

    let good = Assignment::from_pairs([
        ("x".to_string(), 1),
        ("y".to_string(), 1),
        ("z".to_string(), 1),
    ]);
    let bad = Assignment::from_pairs([
        ("x".to_string(), 1),
        ("y".to_string(), 0),
        ("z".to_string(), 0),
    ]);
    println!("all-ones satisfies: {}", inst.evaluate(&good).unwrap());
    println!("x=1,y=0,z=0 satisfies: {}", inst.evaluate(&bad).unwrap());

    // The exhaustive solver walks assignments in lexicographic order and
    // returns the first satisfying one.
    let result = solve_bruteforce(&inst, &BruteForceOptions::default()).unwrap();
    println!(
        "brute force: {}",
        serde_json::to_string(&result).unwrap()
    );

    // Documents parse back to equal values, so files are a faithful
    // representation.
    let reparsed = Instance::parse(&inst.serialize(), alien_csp::structures::no_references)
        .unwrap();
    assert_eq!(reparsed, inst);
    println!("round trip: ok");
}
