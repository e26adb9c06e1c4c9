//! Computes endomorphisms and cores, and decides primitive-positive
//! definability through the polymorphism test.

use alien_csp::{
    compute_core, endomorphisms, ppdef_check, Relation, Structure,
};

fn main() {
    // x1 = x2 or x2 = x3 over the Boolean domain collapses: mapping both
    // values to 0 preserves the relation, so the structure is not a core.
    let link = Structure::new(
        2,
        vec![(
            "link".to_string(),
            Relation::new(
                3,
                [
                    vec![0, 0, 0],
                    vec![0, 0, 1],
                    vec![1, 0, 0],
                    vec![0, 1, 1],
                    vec![1, 1, 0],
                    vec![1, 1, 1],
                ],
            )
            .unwrap(),
        )],
    )
    .unwrap();

    let endos = endomorphisms(&link).unwrap();
    println!("endomorphisms of the link structure:");
    for e in &endos {
        println!("  {:?}", e.values());
    }

    let report = compute_core(&link).unwrap();
    println!(
        "core: {} (via map {:?}, keeping values {:?})",
        report.core.serialize(),
        report.map,
        report.range,
    );

    // Disequality keeps both values apart; its only endomorphisms are the
    // identity and the flip, both bijections, so it is its own core.
    let neq = Structure::new(
        2,
        vec![(
            "neq".to_string(),
            Relation::new(2, [vec![0, 1], vec![1, 0]]).unwrap(),
        )],
    )
    .unwrap();
    let report = compute_core(&neq).unwrap();
    println!("core of neq has domain {}", report.core.domain_size());

    // pp-definability: a relation is definable from a structure exactly
    // when every polymorphism of the structure preserves it. Implication
    // defines the order relation "less or equal" trivially, but not
    // disequality: min preserves imp and breaks neq.
    let imp = Structure::new(
        2,
        vec![(
            "imp".to_string(),
            Relation::new(2, [vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap(),
        )],
    )
    .unwrap();
    let le = Relation::new(2, [vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
    let neq_rel = Relation::new(2, [vec![0, 1], vec![1, 0]]).unwrap();

    let yes = ppdef_check(&imp, &le).unwrap();
    println!(
        "imp defines <=: {} (checked polymorphisms of arity {})",
        yes.definable, yes.witness_arity
    );
    let no = ppdef_check(&imp, &neq_rel).unwrap();
    println!(
        "imp defines neq: {} (violating operation table {:?})",
        no.definable,
        no.violating.map(|op| op.values().to_vec()),
    );
}
