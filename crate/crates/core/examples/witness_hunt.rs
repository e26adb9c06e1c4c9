//! Searches for bounded-budget definitions of all-distinct relations,
//! feeds a found witness to the pin-elimination gadget, and runs the full
//! equality classifier.

use alien_csp::reductions::neq_expansion_gadget;
use alien_csp::{
    classify_equality, ground_equality, neq_witness_search, solve_bruteforce, BruteForceOptions,
    Constraint, EqClassifyOptions, EqInstance, EqLanguage, EqRelation, NeqSearchOutcome,
    SearchBounds,
};

fn main() {
    let neq = EqRelation::from_formula(2, "x0!=x1").unwrap();
    let link = EqRelation::from_formula(3, "(x0=x1)|(x1=x2)").unwrap();
    let nad = EqRelation::from_formula(3, "(x0=x1)|(x1=x2)|(x0=x2)").unwrap();
    let neq_lang = EqLanguage::new([("neq".to_string(), neq.clone())]).unwrap();
    let empty = EqLanguage::empty();
    let bounds = SearchBounds::default();

    // One alien ≠-atom separates two positions; the search finds and
    // verifies that single-atom definition.
    match neq_witness_search(&empty, &neq_lang, 1, 2, &bounds).unwrap() {
        NeqSearchOutcome::Found(w) => {
            println!("k=1, c=2: found {}", w.definition.serialize())
        }
        NeqSearchOutcome::Unknown => println!("k=1, c=2: unknown"),
    }

    // One atom cannot force three values apart, three can (the triangle).
    for k in [1, 3] {
        let outcome = neq_witness_search(&empty, &neq_lang, k, 3, &bounds).unwrap();
        match outcome {
            NeqSearchOutcome::Found(w) => println!(
                "k={k}, c=3: found a definition with {} atoms forcing {} apart",
                w.definition.atoms.len(),
                w.c
            ),
            NeqSearchOutcome::Unknown => println!("k={k}, c=3: unknown within bounds"),
        }
    }
    println!();

    // A witness is exactly what the pin-elimination gadget needs: an
    // instance with unit assignments becomes one without, the pinned
    // values replaced by shared variables forced apart.
    let NeqSearchOutcome::Found(witness) = neq_witness_search(&empty, &neq_lang, 1, 2, &bounds)
        .unwrap()
    else {
        unreachable!("found above");
    };
    let eq2 = EqRelation::from_formula(2, "x0=x1").unwrap();
    let pinned = EqInstance::new(
        EqLanguage::new([("eq".to_string(), eq2)]).unwrap(),
        neq_lang.clone(),
        vec!["v".to_string(), "w".to_string()],
        vec![Constraint::base("eq", vec![0, 1])],
        [("v".to_string(), 0), ("w".to_string(), 1)],
    )
    .unwrap();
    let expanded = neq_expansion_gadget(&pinned, &witness.definition).unwrap();
    println!("pinned:   {}", pinned.serialize());
    println!("expanded: {}", expanded.serialize());
    let solve = |inst: &EqInstance| {
        solve_bruteforce(&ground_equality(inst).unwrap(), &BruteForceOptions::default())
            .unwrap()
            .is_sat()
    };
    println!(
        "satisfiable: pinned {}, expanded {}",
        solve(&pinned),
        solve(&expanded)
    );
    println!();

    // The classifier strings the pieces together. A Horn base is FPT
    // outright; a zero-valid non-Horn base gets its threshold c computed
    // and each alien budget probed by the witness search.
    let link_lang = EqLanguage::new([("link".to_string(), link)]).unwrap();
    let nad_lang = EqLanguage::new([("nad".to_string(), nad)]).unwrap();
    for (name, base) in [("{link}", &link_lang), ("{nad}", &nad_lang)] {
        let verdict = classify_equality(base, &neq_lang, &EqClassifyOptions::default()).unwrap();
        println!(
            "{name} with alien {{neq}}: {}",
            serde_json::to_string(&verdict).unwrap()
        );
    }
    let horn_verdict =
        classify_equality(&neq_lang, &link_lang, &EqClassifyOptions::default()).unwrap();
    println!(
        "{{neq}} with alien {{link}}: {}",
        serde_json::to_string(&horn_verdict).unwrap()
    );
}
