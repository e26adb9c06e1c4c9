//! Shared test scaffolding: an independent enumeration oracle and seeded
//! random generators for structures and instances.
//!
//! The oracle reads tuples straight out of the relations and walks raw
//! assignment vectors, so it shares no decision logic with any solver in
//! the library.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use alien_csp::{Constraint, Instance, OperationTable, Relation, Structure, Value};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Decides an instance by plain odometer enumeration. Returns the first
/// satisfying assignment in lexicographic order, if any.
pub fn oracle_solve(inst: &Instance) -> Option<Vec<Value>> {
    let d = inst.domain_size();
    let n = inst.variables().len();
    let mut assignment = vec![0usize; n];
    loop {
        let ok = inst.constraints().iter().all(|c| {
            let side = if c.alien { inst.alien() } else { inst.base() };
            let rel = side.relation(&c.symbol).expect("constraints are resolved");
            let tuple: Vec<Value> = c.scope.iter().map(|&ix| assignment[ix]).collect();
            rel.contains(&tuple)
        });
        if ok {
            return Some(assignment);
        }
        let mut i = 0;
        loop {
            if i == n {
                return None;
            }
            assignment[i] += 1;
            if assignment[i] < d {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
}

pub fn oracle_sat(inst: &Instance) -> bool {
    oracle_solve(inst).is_some()
}

/// Every satisfying assignment of the instance, by the same raw
/// enumeration as [`oracle_solve`].
pub fn solution_set(inst: &Instance) -> BTreeSet<Vec<Value>> {
    let d = inst.domain_size();
    let n = inst.variables().len();
    let mut found = BTreeSet::new();
    let mut assignment = vec![0usize; n];
    loop {
        let ok = inst.constraints().iter().all(|c| {
            let side = if c.alien { inst.alien() } else { inst.base() };
            let rel = side.relation(&c.symbol).expect("constraints are resolved");
            let tuple: Vec<Value> = c.scope.iter().map(|&ix| assignment[ix]).collect();
            rel.contains(&tuple)
        });
        if ok {
            found.insert(assignment.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                return found;
            }
            assignment[i] += 1;
            if assignment[i] < d {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
}

/// Checks a witness against the instance it allegedly solves.
pub fn witness_satisfies(inst: &Instance, witness: &alien_csp::Assignment) -> bool {
    inst.variables().iter().all(|v| witness.get(v).is_some())
        && inst.constraints().iter().all(|c| {
            let side = if c.alien { inst.alien() } else { inst.base() };
            let rel = side.relation(&c.symbol).expect("constraints are resolved");
            let tuple: Option<Vec<Value>> = c
                .scope
                .iter()
                .map(|&ix| witness.get(&inst.variables()[ix]))
                .collect();
            tuple.is_some_and(|t| rel.contains(&t))
        })
}

pub fn random_relation(
    rng: &mut ChaCha8Rng,
    domain: usize,
    arity: usize,
    max_tuples: usize,
) -> Relation {
    let count = rng.gen_range(0..=max_tuples);
    let tuples = (0..count).map(|_| {
        (0..arity)
            .map(|_| rng.gen_range(0..domain))
            .collect::<Vec<_>>()
    });
    Relation::new(arity, tuples).expect("generated tuples fit the domain")
}

/// Closes a tuple set under an operation by applying it coordinatewise to
/// every combination until nothing new appears.
pub fn close_under(rel: &Relation, op: &OperationTable) -> Relation {
    let arity = rel.arity();
    let mut tuples: BTreeSet<Vec<Value>> = rel.tuples().map(|t| t.to_vec()).collect();
    if tuples.is_empty() {
        return rel.clone();
    }
    loop {
        let current: Vec<Vec<Value>> = tuples.iter().cloned().collect();
        let mut grew = false;
        let mut combo = vec![0usize; op.arity()];
        'combos: loop {
            let image: Vec<Value> = (0..arity)
                .map(|coord| {
                    let args: Vec<Value> =
                        combo.iter().map(|&pick| current[pick][coord]).collect();
                    op.apply(&args)
                })
                .collect();
            if tuples.insert(image) {
                grew = true;
            }
            let mut i = 0;
            loop {
                if i == combo.len() {
                    break 'combos;
                }
                combo[i] += 1;
                if combo[i] < current.len() {
                    break;
                }
                combo[i] = 0;
                i += 1;
            }
        }
        if !grew {
            return Relation::new(arity, tuples).expect("closure stays in the domain");
        }
    }
}

/// A random Boolean structure whose relations are all closed under `op`
/// (and contain the constant tuple when `constant` is given), so a
/// dedicated class solver applies.
pub fn random_closed_structure(
    rng: &mut ChaCha8Rng,
    op: Option<&OperationTable>,
    constant: Option<Value>,
    relation_count: usize,
) -> Structure {
    let rels: Vec<(String, Relation)> = (0..relation_count)
        .map(|i| {
            let arity = rng.gen_range(1..=3);
            let mut rel = random_relation(rng, 2, arity, 4);
            if let Some(v) = constant {
                let mut tuples: Vec<Vec<Value>> = rel.tuples().map(|t| t.to_vec()).collect();
                tuples.push(vec![v; arity]);
                rel = Relation::new(arity, tuples).unwrap();
            }
            if let Some(op) = op {
                rel = close_under(&rel, op);
            }
            (format!("r{i}"), rel)
        })
        .collect();
    Structure::new(2, rels).expect("generated symbols are distinct")
}

pub struct InstanceShape {
    pub max_variables: usize,
    pub max_constraints: usize,
    pub max_alien: usize,
}

/// Random constraints over the given pair of structures. Scopes repeat
/// variables freely; the alien count is capped but otherwise random.
pub fn random_instance(
    rng: &mut ChaCha8Rng,
    base: &Structure,
    alien: &Structure,
    shape: &InstanceShape,
) -> Instance {
    let n = rng.gen_range(1..=shape.max_variables);
    let variables: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let base_symbols: Vec<(String, usize)> = base
        .relations()
        .map(|(s, r)| (s.to_string(), r.arity()))
        .collect();
    let alien_symbols: Vec<(String, usize)> = alien
        .relations()
        .map(|(s, r)| (s.to_string(), r.arity()))
        .collect();

    let mut constraints = Vec::new();
    let total = rng.gen_range(1..=shape.max_constraints);
    let alien_count = if alien_symbols.is_empty() {
        0
    } else {
        rng.gen_range(0..=shape.max_alien.min(total))
    };
    for i in 0..total {
        let is_alien = i < alien_count;
        let pool = if is_alien { &alien_symbols } else { &base_symbols };
        if pool.is_empty() {
            continue;
        }
        let (symbol, arity) = pool.choose(rng).expect("pool checked non-empty").clone();
        let scope = (0..arity).map(|_| rng.gen_range(0..n)).collect();
        constraints.push(Constraint {
            symbol,
            scope,
            alien: is_alien,
        });
    }
    Instance::new(base.clone(), alien.clone(), variables, constraints)
        .expect("generated constraints are well formed")
}

/// All relations over the Boolean domain of the given arity, empty one
/// included, in mask order.
pub fn all_boolean_relations(arity: usize) -> Vec<Relation> {
    let tuple_count = 1usize << arity;
    let universe: Vec<Vec<Value>> = (0..tuple_count)
        .map(|mask| (0..arity).map(|bit| (mask >> bit) & 1).collect())
        .collect();
    (0..(1usize << tuple_count))
        .map(|selector| {
            let tuples = universe
                .iter()
                .enumerate()
                .filter(|(i, _)| (selector >> i) & 1 == 1)
                .map(|(_, t)| t.clone());
            Relation::new(arity, tuples).unwrap()
        })
        .collect()
}
