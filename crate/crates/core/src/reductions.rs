//! Instance transformers: primitive-positive definitions and their
//! inlining, the redundancy-to-alien rewrite, constant merging, the
//! disequality and endomorphism gadgets, and Turing-reduction drivers that
//! answer implication, equivalence, and redundancy through each other.
//!
//! Every transformer is a pure function from instances to instances (or
//! definitions to definitions) that either preserves satisfiability or
//! converts between problems in a documented direction. None of them
//! mutates its input, and all failure modes are typed errors; there are no
//! partially rewritten instances.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{endomorphisms, AlgebraError, OperationTable};
use crate::equality::{EqError, EqInstance};
use crate::solvers::{SolveResult, SolverError};
use crate::structures::{
    fresh_name, fresh_symbol, tuples_over, Constraint, Instance, ModelError, Relation, Structure,
    Value,
};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Equality(#[from] EqError),
    #[error("constraint index {index} out of range for {count} constraints")]
    ConstraintIndex { index: usize, count: usize },
    #[error("pin value {value} does not fit below the slot count {c}")]
    PinValue { value: usize, c: usize },
    #[error("constraint {index} is alien, expected a base constraint")]
    NotBaseConstraint { index: usize },
    #[error("definition refers to unknown {side} symbol {symbol:?}")]
    DefinitionSymbol { symbol: String, side: &'static str },
    #[error("definition applies {symbol:?} (arity {arity}) to {found} arguments")]
    DefinitionArity {
        symbol: String,
        arity: usize,
        found: usize,
    },
    #[error("definition uses variable index {index}, but only {count} are bound")]
    DefinitionIndex { index: usize, count: usize },
    #[error("definition for {symbol:?} has head arity {head_arity}, relation has arity {arity}")]
    HeadArity {
        symbol: String,
        head_arity: usize,
        arity: usize,
    },
    #[error("disequality atoms are not allowed here")]
    DisequalityAtom,
    #[error("relation is empty")]
    EmptyRelation,
    #[error("relation contains the all-zero tuple, so nothing pins the constant")]
    ZeroValidRelation,
    #[error("construction requires a two-element domain, got {domain}")]
    NotBoolean { domain: usize },
    #[error("the constant definition may not use alien atoms")]
    AlienInConstantDefinition,
    #[error("base relation {symbol:?} is not invariant under the Boolean flip")]
    NotComplementInvariant { symbol: String },
    #[error("alien relation {symbol:?} is not a single-value unary constant")]
    NotAConstant { symbol: String },
    #[error("constant symbol {symbol:?} appears {count} times, merge constants first")]
    ConstantsNotMerged { symbol: String, count: usize },
    #[error("two distinct constants pin value {value}")]
    DuplicateConstantValue { value: Value },
    #[error("endomorphism relation has arity {found}, domain needs {expected}")]
    EndomorphismArity { expected: usize, found: usize },
    #[error("instances declare different variable sets")]
    VariableSetMismatch,
    #[error("instances are over different base structures")]
    StructureMismatch,
    #[error("driver requires instances without alien constraints")]
    AlienConstraints,
}

/// One atom of a primitive-positive definition. Argument indices refer to
/// the definition's variables: `0..head_arity` are the head variables,
/// `head_arity..head_arity+exists` the existential ones.
///
/// Equality is a built-in atom because definitions are always read over a
/// structure extended with it. Disequality is built in only for the pure
/// equality-language signature; transformers over finite structures reject
/// it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Atom {
    Rel {
        #[serde(default)]
        alien: bool,
        #[serde(rename = "rel")]
        symbol: String,
        args: Vec<usize>,
    },
    Eq { args: [usize; 2] },
    Neq { args: [usize; 2] },
}

impl Atom {
    pub fn base(symbol: impl Into<String>, args: Vec<usize>) -> Self {
        Atom::Rel {
            alien: false,
            symbol: symbol.into(),
            args,
        }
    }

    pub fn alien(symbol: impl Into<String>, args: Vec<usize>) -> Self {
        Atom::Rel {
            alien: true,
            symbol: symbol.into(),
            args,
        }
    }

    pub fn eq(a: usize, b: usize) -> Self {
        Atom::Eq { args: [a, b] }
    }

    pub fn neq(a: usize, b: usize) -> Self {
        Atom::Neq { args: [a, b] }
    }
}

/// An existentially quantified conjunction of atoms defining a relation of
/// arity `head_arity`. The alien-atom count is the currency of the bounded
/// closure: a definition with at most `k` alien atoms stays within the
/// `≤ k` fragment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PpDefinition {
    pub head_arity: usize,
    pub exists: usize,
    pub atoms: Vec<Atom>,
}

impl PpDefinition {
    pub fn new(head_arity: usize, exists: usize, atoms: Vec<Atom>) -> Self {
        PpDefinition {
            head_arity,
            exists,
            atoms,
        }
    }

    pub fn var_count(&self) -> usize {
        self.head_arity + self.exists
    }

    pub fn alien_atom_count(&self) -> usize {
        self.atoms
            .iter()
            .filter(|a| matches!(a, Atom::Rel { alien: true, .. }))
            .count()
    }

    /// Validates every atom against the two structures: symbols must
    /// resolve on the side their flag names, arities must match, and
    /// argument indices must be bound.
    pub fn check(&self, base: &Structure, alien: &Structure) -> Result<(), ReductionError> {
        let bound = self.var_count();
        for atom in &self.atoms {
            match atom {
                Atom::Rel {
                    alien: is_alien,
                    symbol,
                    args,
                } => {
                    let side = if *is_alien { alien } else { base };
                    let side_name = if *is_alien { "alien" } else { "base" };
                    let rel =
                        side.relation(symbol)
                            .ok_or_else(|| ReductionError::DefinitionSymbol {
                                symbol: symbol.clone(),
                                side: side_name,
                            })?;
                    if rel.arity() != args.len() {
                        return Err(ReductionError::DefinitionArity {
                            symbol: symbol.clone(),
                            arity: rel.arity(),
                            found: args.len(),
                        });
                    }
                    if let Some(&index) = args.iter().find(|&&ix| ix >= bound) {
                        return Err(ReductionError::DefinitionIndex {
                            index,
                            count: bound,
                        });
                    }
                }
                Atom::Eq { args } | Atom::Neq { args } => {
                    if let Some(&index) = args.iter().find(|&&ix| ix >= bound) {
                        return Err(ReductionError::DefinitionIndex {
                            index,
                            count: bound,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Evaluates the defined relation at one head tuple by searching the
    /// existential variables exhaustively.
    pub fn evaluate(
        &self,
        base: &Structure,
        alien: &Structure,
        head: &[Value],
    ) -> Result<bool, ReductionError> {
        self.check(base, alien)?;
        assert_eq!(head.len(), self.head_arity);
        let domain = base.domain_size();
        Ok(tuples_over(domain, self.exists).any(|ext| self.holds(base, alien, head, &ext)))
    }

    /// Spells out the defined relation tuple by tuple. Exponential in the
    /// head arity and existential count; meant for small definitions.
    pub fn defined_relation(
        &self,
        base: &Structure,
        alien: &Structure,
    ) -> Result<Relation, ReductionError> {
        self.check(base, alien)?;
        let domain = base.domain_size();
        let tuples = tuples_over(domain, self.head_arity).filter(|head| {
            tuples_over(domain, self.exists).any(|ext| self.holds(base, alien, head, &ext))
        });
        Ok(Relation::new(self.head_arity, tuples).expect("enumerated tuples keep the arity"))
    }

    fn holds(&self, base: &Structure, alien: &Structure, head: &[Value], ext: &[Value]) -> bool {
        let value = |ix: usize| {
            if ix < self.head_arity {
                head[ix]
            } else {
                ext[ix - self.head_arity]
            }
        };
        self.atoms.iter().all(|atom| match atom {
            Atom::Rel {
                alien: is_alien,
                symbol,
                args,
            } => {
                let side = if *is_alien { alien } else { base };
                let tuple: Vec<Value> = args.iter().map(|&ix| value(ix)).collect();
                side.relation(symbol)
                    .expect("checked before evaluation")
                    .contains(&tuple)
            }
            Atom::Eq { args } => value(args[0]) == value(args[1]),
            Atom::Neq { args } => value(args[0]) != value(args[1]),
        })
    }

    pub fn parse(doc: &str) -> Result<Self, ModelError> {
        Ok(serde_json::from_str(doc)?)
    }

    pub fn serialize(&self) -> String {
        serde_json::to_string(self).expect("definition serializes")
    }
}

// Rebuilds an instance from name-based constraints, after transformers
// that rename or drop variables.
fn instance_from_names(
    base: Structure,
    alien: Structure,
    variables: Vec<String>,
    constraints: Vec<(String, Vec<String>, bool)>,
) -> Result<Instance, ModelError> {
    let index_of = |name: &String| -> Result<usize, ModelError> {
        variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| ModelError::UnknownVariable(name.clone()))
    };
    let constraints = constraints
        .into_iter()
        .map(|(symbol, args, alien)| {
            Ok(Constraint {
                symbol,
                scope: args.iter().map(&index_of).collect::<Result<_, _>>()?,
                alien,
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    Instance::new(base, alien, variables, constraints)
}

/// Replaces every constraint whose symbol has a definition by the
/// definition's atoms, with fresh variables for the existentials. Equality
/// atoms merge variables globally, which is how a definition pins two of
/// its arguments together. The rewrite touches one level only: atoms that
/// mention defined symbols are emitted as ordinary constraints.
///
/// The alien-constraint count of the result is exactly the sum of the
/// definitions' alien-atom counts over replaced constraints plus the kept
/// alien constraints, so the growth is computable from `defs` alone.
pub fn inline_ppdefs(
    inst: &Instance,
    defs: &IndexMap<String, PpDefinition>,
) -> Result<Instance, ReductionError> {
    for (symbol, def) in defs {
        def.check(inst.base(), inst.alien())?;
        let arity = inst
            .base()
            .relation(symbol)
            .or_else(|| inst.alien().relation(symbol))
            .map(Relation::arity)
            .ok_or_else(|| ReductionError::DefinitionSymbol {
                symbol: symbol.clone(),
                side: "either",
            })?;
        if def.head_arity != arity {
            return Err(ReductionError::HeadArity {
                symbol: symbol.clone(),
                head_arity: def.head_arity,
                arity,
            });
        }
        if def.atoms.iter().any(|a| matches!(a, Atom::Neq { .. })) {
            return Err(ReductionError::DisequalityAtom);
        }
    }

    let expected_alien: usize = inst
        .constraints()
        .iter()
        .map(|c| match defs.get(&c.symbol) {
            Some(def) => def.alien_atom_count(),
            None => usize::from(c.alien),
        })
        .sum();

    let mut variables: Vec<String> = inst.variables().to_vec();
    let mut merged: IndexMap<String, String> = IndexMap::new();
    let resolve = |merged: &IndexMap<String, String>, name: &str| -> String {
        let mut cur = name.to_string();
        while let Some(next) = merged.get(&cur) {
            cur = next.clone();
        }
        cur
    };

    let mut out: Vec<(String, Vec<String>, bool)> = Vec::new();
    for c in inst.constraints() {
        let args: Vec<String> = c
            .scope
            .iter()
            .map(|&ix| inst.variables()[ix].clone())
            .collect();
        let Some(def) = defs.get(&c.symbol) else {
            out.push((c.symbol.clone(), args, c.alien));
            continue;
        };

        let mut names: Vec<String> = args;
        for _ in 0..def.exists {
            let fresh = fresh_name(&variables, "aux");
            variables.push(fresh.clone());
            names.push(fresh);
        }
        for atom in &def.atoms {
            match atom {
                Atom::Rel {
                    alien,
                    symbol,
                    args,
                } => {
                    let mapped = args.iter().map(|&ix| names[ix].clone()).collect();
                    out.push((symbol.clone(), mapped, *alien));
                }
                Atom::Eq { args } => {
                    let a = resolve(&merged, &names[args[0]]);
                    let b = resolve(&merged, &names[args[1]]);
                    if a == b {
                        continue;
                    }
                    // Keep the variable declared first; rename the other.
                    let pos = |n: &String| variables.iter().position(|v| v == n).unwrap();
                    let (keep, drop) = if pos(&a) < pos(&b) { (a, b) } else { (b, a) };
                    merged.insert(drop, keep);
                }
                Atom::Neq { .. } => unreachable!("rejected during validation"),
            }
        }
    }

    let final_vars: Vec<String> = variables
        .iter()
        .filter(|v| !merged.contains_key(*v))
        .cloned()
        .collect();
    let final_constraints: Vec<(String, Vec<String>, bool)> = out
        .into_iter()
        .map(|(sym, args, alien)| {
            let args = args.iter().map(|a| resolve(&merged, a)).collect();
            (sym, args, alien)
        })
        .collect();

    let result = instance_from_names(
        inst.base().clone(),
        inst.alien().clone(),
        final_vars,
        final_constraints,
    )?;
    assert_eq!(result.alien_count(), expected_alien);
    Ok(result)
}

/// Swaps the constraint at `index` for its complement, flagged alien. The
/// constraint is redundant in the input exactly when the output is
/// unsatisfiable: an assignment satisfying the output is one satisfying
/// everything else while breaking the removed constraint.
pub fn redundant_to_alien(inst: &Instance, index: usize) -> Result<Instance, ReductionError> {
    let count = inst.constraints().len();
    let target = inst
        .constraints()
        .get(index)
        .ok_or(ReductionError::ConstraintIndex { index, count })?;
    if target.alien {
        return Err(ReductionError::NotBaseConstraint { index });
    }
    let rel = inst.relation_of(target);
    let co = rel.complement(inst.domain_size());
    let co_symbol = fresh_symbol(
        &[inst.base(), inst.alien()],
        &format!("co_{}", target.symbol),
    );
    let extra = Structure::new(inst.domain_size(), vec![(co_symbol.clone(), co)])
        .expect("complement stays in the domain");
    let alien = inst.alien().union(&extra)?;

    let mut constraints: Vec<Constraint> = Vec::with_capacity(count);
    for (ci, c) in inst.constraints().iter().enumerate() {
        if ci == index {
            constraints.push(Constraint::alien(co_symbol.clone(), c.scope.clone()));
        } else {
            constraints.push(c.clone());
        }
    }
    Ok(Instance::new(
        inst.base().clone(),
        alien,
        inst.variables().to_vec(),
        constraints,
    )?)
}

// True when the relation pins a single value: unary with exactly one tuple.
fn constant_value(rel: &Relation) -> Option<Value> {
    if rel.arity() == 1 && rel.len() == 1 {
        rel.tuples().next().map(|t| t[0])
    } else {
        None
    }
}

/// Collapses repeated applications of each alien constant: the first
/// application's variable becomes the representative, every other pinned
/// variable is renamed to it and dropped. The result has at most one alien
/// constraint per constant symbol and the same satisfiability.
pub fn merge_constants(inst: &Instance) -> Result<Instance, ReductionError> {
    for (symbol, rel) in inst.alien().relations() {
        if constant_value(rel).is_none() {
            return Err(ReductionError::NotAConstant {
                symbol: symbol.to_string(),
            });
        }
    }

    let name_of = |ix: usize| inst.variables()[ix].clone();
    let mut merged: IndexMap<String, String> = IndexMap::new();
    let resolve = |merged: &IndexMap<String, String>, name: &str| -> String {
        let mut cur = name.to_string();
        while let Some(next) = merged.get(&cur) {
            cur = next.clone();
        }
        cur
    };

    let mut kept: Vec<(String, Vec<String>, bool)> = Vec::new();
    let mut representative: IndexMap<String, String> = IndexMap::new();
    for c in inst.constraints() {
        let args: Vec<String> = c.scope.iter().map(|&ix| name_of(ix)).collect();
        if !c.alien {
            kept.push((c.symbol.clone(), args, false));
            continue;
        }
        let pinned = resolve(&merged, &args[0]);
        match representative.get(&c.symbol) {
            None => {
                representative.insert(c.symbol.clone(), pinned.clone());
                kept.push((c.symbol.clone(), vec![pinned], true));
            }
            Some(rep) => {
                let rep = resolve(&merged, rep);
                if rep != pinned {
                    merged.insert(pinned, rep);
                }
            }
        }
    }

    let variables: Vec<String> = inst
        .variables()
        .iter()
        .filter(|v| !merged.contains_key(*v))
        .cloned()
        .collect();
    let constraints = kept
        .into_iter()
        .map(|(sym, args, alien)| {
            let args = args.iter().map(|a| resolve(&merged, a)).collect();
            (sym, args, alien)
        })
        .collect();
    Ok(instance_from_names(
        inst.base().clone(),
        inst.alien().clone(),
        variables,
        constraints,
    )?)
}

/// Builds a definition of the constant-1 relation from one application of a
/// Boolean relation that misses the all-zero tuple, plus a given alien-free
/// definition of constant 0. The witness tuple is the relation's
/// lexicographically least one; positions holding 1 bind to the head
/// variable, positions holding 0 to one shared existential pinned to 0.
/// The result uses exactly one alien atom.
pub fn define_c1_via_nonvalid(
    r: &Relation,
    symbol: &str,
    c0_def: &PpDefinition,
) -> Result<PpDefinition, ReductionError> {
    if r.is_empty() {
        return Err(ReductionError::EmptyRelation);
    }
    if let Some(v) = r.max_value() {
        if v > 1 {
            return Err(ReductionError::NotBoolean { domain: v + 1 });
        }
    }
    if r.contains_constant(0) {
        return Err(ReductionError::ZeroValidRelation);
    }
    if c0_def.head_arity != 1 {
        return Err(ReductionError::HeadArity {
            symbol: "c_0".to_string(),
            head_arity: c0_def.head_arity,
            arity: 1,
        });
    }
    if c0_def.alien_atom_count() > 0 {
        return Err(ReductionError::AlienInConstantDefinition);
    }

    let witness = r.tuples().next().expect("relation is non-empty");
    if witness.iter().all(|&b| b == 1) {
        // No zero positions: the single atom r(x,…,x) already pins 1.
        return Ok(PpDefinition::new(
            1,
            0,
            vec![Atom::alien(symbol, vec![0; r.arity()])],
        ));
    }

    // Variable layout: 0 = head, 1 = the shared zero variable, then the
    // constant definition's own existentials.
    let shift = |ix: usize| if ix == 0 { 1 } else { ix + 1 };
    let mut atoms: Vec<Atom> = c0_def
        .atoms
        .iter()
        .map(|atom| match atom {
            Atom::Rel {
                alien,
                symbol,
                args,
            } => Atom::Rel {
                alien: *alien,
                symbol: symbol.clone(),
                args: args.iter().map(|&ix| shift(ix)).collect(),
            },
            Atom::Eq { args } => Atom::eq(shift(args[0]), shift(args[1])),
            Atom::Neq { args } => Atom::neq(shift(args[0]), shift(args[1])),
        })
        .collect();
    atoms.push(Atom::alien(
        symbol,
        witness.iter().map(|&b| if b == 1 { 0 } else { 1 }).collect(),
    ));
    Ok(PpDefinition::new(1, 1 + c0_def.exists, atoms))
}

/// For a complement-invariant Boolean base, replaces the two merged
/// constant constraints by a single alien disequality between their
/// variables. Satisfiability is unchanged: flipping every value in a
/// solution is again a solution, so pinning the two sides to differ is as
/// good as pinning them to 0 and 1.
pub fn neq_gadget_reduce(inst: &Instance) -> Result<Instance, ReductionError> {
    if inst.domain_size() != 2 {
        return Err(ReductionError::NotBoolean {
            domain: inst.domain_size(),
        });
    }
    let flip = OperationTable::unary(vec![1, 0]).expect("flip is well formed");
    for (symbol, rel) in inst.base().relations() {
        if !flip.preserves(rel) {
            return Err(ReductionError::NotComplementInvariant {
                symbol: symbol.to_string(),
            });
        }
    }

    let mut pinned: [Option<String>; 2] = [None, None];
    let mut kept: Vec<(String, Vec<String>, bool)> = Vec::new();
    let mut seen: IndexMap<String, usize> = IndexMap::new();
    for c in inst.constraints() {
        let args: Vec<String> = c
            .scope
            .iter()
            .map(|&ix| inst.variables()[ix].clone())
            .collect();
        if !c.alien {
            kept.push((c.symbol.clone(), args, false));
            continue;
        }
        let rel = inst.relation_of(c);
        let value = constant_value(rel).ok_or_else(|| ReductionError::NotAConstant {
            symbol: c.symbol.clone(),
        })?;
        *seen.entry(c.symbol.clone()).or_insert(0) += 1;
        if pinned[value].is_some() {
            return Err(ReductionError::DuplicateConstantValue { value });
        }
        pinned[value] = Some(args[0].clone());
    }
    for (symbol, count) in &seen {
        if *count > 1 {
            return Err(ReductionError::ConstantsNotMerged {
                symbol: symbol.clone(),
                count: *count,
            });
        }
    }

    let mut variables: Vec<String> = inst.variables().to_vec();
    let mut slot = |value: usize, variables: &mut Vec<String>| match pinned[value].take() {
        Some(v) => v,
        None => {
            let fresh = fresh_name(variables, &format!("z{value}"));
            variables.push(fresh.clone());
            fresh
        }
    };
    let z0 = slot(0, &mut variables);
    let z1 = slot(1, &mut variables);

    let neq_symbol = fresh_symbol(&[inst.base()], "neq");
    let neq = Relation::new(2, vec![vec![0, 1], vec![1, 0]]).expect("disequality is binary");
    let alien = Structure::new(2, vec![(neq_symbol.clone(), neq)]).expect("Boolean structure");
    kept.push((neq_symbol, vec![z0, z1], true));
    Ok(instance_from_names(
        inst.base().clone(),
        alien,
        variables,
        kept,
    )?)
}

/// The endomorphisms of a structure collected into one relation: row
/// `(e(0), …, e(d-1))` per endomorphism `e`. For a core this relation is
/// definable from the structure itself, which is what makes the gadget
/// below sound.
pub fn endomorphism_relation(s: &Structure) -> Result<Relation, AlgebraError> {
    let d = s.domain_size();
    let rows = endomorphisms(s)?
        .into_iter()
        .map(|op| op.values().to_vec());
    Ok(Relation::new(d, rows).expect("tables all have length d"))
}

/// Replaces all (pre-merged) constant constraints by one alien constraint
/// applying `e` to the tuple of pinned variables, one slot per domain
/// value, with fresh variables filling slots whose constant never occurs.
/// When `e` is the endomorphism relation of a core, solutions of the
/// output are solutions of the input composed with an automorphism, so
/// satisfiability is preserved.
pub fn constants_to_e_gadget(inst: &Instance, e: &Relation) -> Result<Instance, ReductionError> {
    let d = inst.domain_size();
    if e.arity() != d {
        return Err(ReductionError::EndomorphismArity {
            expected: d,
            found: e.arity(),
        });
    }

    let mut pinned: Vec<Option<String>> = vec![None; d];
    let mut kept: Vec<(String, Vec<String>, bool)> = Vec::new();
    let mut seen: IndexMap<String, usize> = IndexMap::new();
    for c in inst.constraints() {
        let args: Vec<String> = c
            .scope
            .iter()
            .map(|&ix| inst.variables()[ix].clone())
            .collect();
        if !c.alien {
            kept.push((c.symbol.clone(), args, false));
            continue;
        }
        let rel = inst.relation_of(c);
        let value = constant_value(rel).ok_or_else(|| ReductionError::NotAConstant {
            symbol: c.symbol.clone(),
        })?;
        *seen.entry(c.symbol.clone()).or_insert(0) += 1;
        if pinned[value].is_some() {
            return Err(ReductionError::DuplicateConstantValue { value });
        }
        pinned[value] = Some(args[0].clone());
    }
    for (symbol, count) in &seen {
        if *count > 1 {
            return Err(ReductionError::ConstantsNotMerged {
                symbol: symbol.clone(),
                count: *count,
            });
        }
    }

    let mut variables: Vec<String> = inst.variables().to_vec();
    let slots: Vec<String> = (0..d)
        .map(|value| match pinned[value].take() {
            Some(v) => v,
            None => {
                let fresh = fresh_name(&variables, &format!("u{value}"));
                variables.push(fresh.clone());
                fresh
            }
        })
        .collect();

    let e_symbol = fresh_symbol(&[inst.base()], "E");
    let alien = Structure::new(d, vec![(e_symbol.clone(), e.clone())])
        .map_err(ModelError::from)?;
    kept.push((e_symbol, slots, true));
    Ok(instance_from_names(
        inst.base().clone(),
        alien,
        variables,
        kept,
    )?)
}

/// Rewrites a pinned equality-language instance into an unpinned one: a
/// shared variable per value slot, constrained pairwise distinct through
/// the supplied definition of the all-distinct relation, with every pinned
/// variable merged into the slot of its value. Relations that only see
/// coincidence patterns cannot tell the concrete pinned values from any
/// other pairwise-distinct ones, so satisfiability is preserved.
///
/// The definition's head arity fixes the slot count; its equality atoms
/// merge variables, its relation atoms become constraints with their
/// base/alien flags intact, and bare disequality atoms are rejected since
/// the output has no relation to express them with.
pub fn neq_expansion_gadget(
    inst: &EqInstance,
    def: &PpDefinition,
) -> Result<EqInstance, ReductionError> {
    let c = def.head_arity;
    for &value in inst.pins().values() {
        if value >= c {
            return Err(ReductionError::PinValue { value, c });
        }
    }
    let slot_count = def.head_arity + def.exists;
    for atom in &def.atoms {
        match atom {
            Atom::Rel {
                alien,
                symbol,
                args,
            } => {
                let (language, side) = if *alien {
                    (inst.alien(), "alien")
                } else {
                    (inst.base(), "base")
                };
                let rel = language.relation(symbol).ok_or_else(|| {
                    ReductionError::DefinitionSymbol {
                        symbol: symbol.clone(),
                        side,
                    }
                })?;
                if args.len() != rel.arity() {
                    return Err(ReductionError::DefinitionArity {
                        symbol: symbol.clone(),
                        arity: rel.arity(),
                        found: args.len(),
                    });
                }
                for &ix in args {
                    if ix >= slot_count {
                        return Err(ReductionError::DefinitionIndex {
                            index: ix,
                            count: slot_count,
                        });
                    }
                }
            }
            Atom::Eq { args } => {
                for &ix in args {
                    if ix >= slot_count {
                        return Err(ReductionError::DefinitionIndex {
                            index: ix,
                            count: slot_count,
                        });
                    }
                }
            }
            Atom::Neq { .. } => return Err(ReductionError::DisequalityAtom),
        }
    }

    // Union-find over the definition's variable slots; equality atoms
    // merge, and the smallest slot wins so head slots stay roots.
    let mut parent: Vec<usize> = (0..slot_count).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for atom in &def.atoms {
        if let Atom::Eq { args } = atom {
            let a = find(&mut parent, args[0]);
            let b = find(&mut parent, args[1]);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let roots: Vec<usize> = (0..slot_count).map(|i| find(&mut parent, i)).collect();

    // One representative variable per slot class: the first pinned
    // variable carrying a value in the class, or a fresh one.
    let mut used: Vec<String> = inst.variables().to_vec();
    let mut root_names: Vec<Option<String>> = vec![None; slot_count];
    for slot in 0..slot_count {
        let root = roots[slot];
        if root_names[root].is_some() {
            continue;
        }
        let pinned = inst
            .pins()
            .iter()
            .find(|(_, &v)| roots[v] == root)
            .map(|(name, _)| name.clone());
        let name = pinned.unwrap_or_else(|| {
            let stem = if root < c {
                format!("x{root}")
            } else {
                format!("w{}", root - c)
            };
            let fresh = fresh_name(&used, &stem);
            used.push(fresh.clone());
            fresh
        });
        root_names[root] = Some(name);
    }
    let slot_name = |slot: usize| -> &str {
        root_names[roots[slot]]
            .as_deref()
            .expect("every root was named")
    };

    // Original variables keep their order; pinned variables collapse into
    // their slot's representative. Slot and existential variables follow.
    let rename = |name: &String| -> String {
        match inst.pins().get(name) {
            Some(&value) => slot_name(value).to_string(),
            None => name.clone(),
        }
    };
    let mut variables: Vec<String> = Vec::new();
    for name in inst.variables() {
        let target = rename(name);
        if !variables.contains(&target) {
            variables.push(target);
        }
    }
    for slot in 0..slot_count {
        let name = slot_name(slot);
        if !variables.iter().any(|v| v == name) {
            variables.push(name.to_string());
        }
    }

    let index_of = |variables: &[String], name: &str| -> usize {
        variables
            .iter()
            .position(|v| v == name)
            .expect("every renamed variable is in the list")
    };

    let mut constraints: Vec<Constraint> = Vec::new();
    for constraint in inst.constraints() {
        let scope = constraint
            .scope
            .iter()
            .map(|&ix| index_of(&variables, &rename(&inst.variables()[ix])))
            .collect();
        constraints.push(Constraint {
            symbol: constraint.symbol.clone(),
            scope,
            alien: constraint.alien,
        });
    }
    for atom in &def.atoms {
        if let Atom::Rel {
            alien,
            symbol,
            args,
        } = atom
        {
            let scope = args
                .iter()
                .map(|&slot| index_of(&variables, slot_name(slot)))
                .collect();
            constraints.push(Constraint {
                symbol: symbol.clone(),
                scope,
                alien: *alien,
            });
        }
    }

    Ok(EqInstance::new(
        inst.base().clone(),
        inst.alien().clone(),
        variables,
        constraints,
        [],
    )?)
}

/// Shared-signature solver callback used by the Turing-reduction drivers.
pub type SolveFn<'a> = dyn FnMut(&Instance) -> Result<SolveResult, SolverError> + 'a;

fn check_driver_inputs(a: &Instance, b: &Instance) -> Result<(), ReductionError> {
    if a.alien_count() > 0 || b.alien_count() > 0 {
        return Err(ReductionError::AlienConstraints);
    }
    if a.base() != b.base() {
        return Err(ReductionError::StructureMismatch);
    }
    let mut va: Vec<&String> = a.variables().iter().collect();
    let mut vb: Vec<&String> = b.variables().iter().collect();
    va.sort();
    vb.sort();
    if va != vb {
        return Err(ReductionError::VariableSetMismatch);
    }
    Ok(())
}

/// Does every solution of `antecedent` satisfy `consequent`? Answered one
/// consequent constraint at a time: add the constraint, rewrite it with
/// [`redundant_to_alien`], and ask the solver; the constraint is implied
/// exactly when that rewritten instance is unsatisfiable.
pub fn impl_via_redundant(
    antecedent: &Instance,
    consequent: &Instance,
    solve: &mut SolveFn,
) -> Result<bool, ReductionError> {
    check_driver_inputs(antecedent, consequent)?;
    for c in consequent.constraints() {
        let scope = c
            .scope
            .iter()
            .map(|&ix| {
                let name = &consequent.variables()[ix];
                antecedent
                    .var_index(name)
                    .expect("variable sets were checked equal")
            })
            .collect();
        let mut constraints = antecedent.constraints().to_vec();
        constraints.push(Constraint::base(c.symbol.clone(), scope));
        let extended = Instance::new(
            antecedent.base().clone(),
            antecedent.alien().clone(),
            antecedent.variables().to_vec(),
            constraints,
        )?;
        let rewritten = redundant_to_alien(&extended, extended.constraints().len() - 1)?;
        if solve(&rewritten)?.is_sat() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Do the two instances have the same solution set? Two implication calls.
pub fn equiv_via_impl(
    a: &Instance,
    b: &Instance,
    solve: &mut SolveFn,
) -> Result<bool, ReductionError> {
    Ok(impl_via_redundant(a, b, solve)? && impl_via_redundant(b, a, solve)?)
}

/// Is the constraint at `index` redundant? One equivalence call against
/// the instance with the constraint removed.
pub fn redundant_via_equiv(
    inst: &Instance,
    index: usize,
    solve: &mut SolveFn,
) -> Result<bool, ReductionError> {
    let count = inst.constraints().len();
    if index >= count {
        return Err(ReductionError::ConstraintIndex { index, count });
    }
    let mut constraints = inst.constraints().to_vec();
    constraints.remove(index);
    let without = Instance::new(
        inst.base().clone(),
        inst.alien().clone(),
        inst.variables().to_vec(),
        constraints,
    )?;
    equiv_via_impl(inst, &without, solve)
}
