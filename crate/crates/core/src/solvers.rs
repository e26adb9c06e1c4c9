//! Satisfiability procedures: an exhaustive backtracking search that works
//! on any instance, and six polynomial-time solvers for Boolean instances
//! whose relations all lie in one of the classic tractable classes.
//!
//! The class solvers take the class as an explicit claim. Each one verifies
//! any witness it produces before returning it, so a wrong claim surfaces as
//! [`SolverError::ClassViolation`] rather than a bad answer on the
//! satisfiable side; an `unsat` answer is only meaningful when the claim
//! actually holds. Use the polymorphism tests in [`crate::algebra`] to
//! establish the claim mechanically.
//!
//! All solvers are deterministic: the exhaustive search returns the
//! lexicographically least witness with respect to variable declaration
//! order, the Horn solver returns the least model, and its mirror returns
//! the greatest.

use crate::structures::{tuples_over, Assignment, Instance, ModelError, Value};
use serde::ser::SerializeMap;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("node budget {budget} exceeded before the search finished")]
    BudgetExceeded { budget: u64 },
    #[error("class solvers require a two-element domain, got {domain}")]
    NotBoolean { domain: usize },
    #[error("instance is not {claimed}: the computed witness fails a constraint")]
    ClassViolation { claimed: SchaeferClass },
}

/// Outcome of a satisfiability call. Witnesses are total assignments and
/// can only be observed through the accessors, so `sat` without a witness
/// cannot be constructed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    witness: Option<Assignment>,
}

impl SolveResult {
    pub fn sat(witness: Assignment) -> Self {
        SolveResult {
            witness: Some(witness),
        }
    }

    pub fn unsat() -> Self {
        SolveResult { witness: None }
    }

    pub fn is_sat(&self) -> bool {
        self.witness.is_some()
    }

    pub fn witness(&self) -> Option<&Assignment> {
        self.witness.as_ref()
    }
}

impl Serialize for SolveResult {
    /// `{"status":"sat","witness":{…}}` or `{"status":"unsat"}`.
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match &self.witness {
            Some(w) => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("status", "sat")?;
                m.serialize_entry("witness", w)?;
                m.end()
            }
            None => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("status", "unsat")?;
                m.end()
            }
        }
    }
}

/// Tuning for [`solve_bruteforce`]. The budget counts variable-value
/// assignments tried, so it bounds running time independently of how
/// expensive each consistency check is.
#[derive(Clone, Copy, Debug)]
pub struct BruteForceOptions {
    pub node_budget: u64,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        BruteForceOptions {
            node_budget: 10_000_000,
        }
    }
}

/// Exhaustive backtracking search. Variables are assigned in declaration
/// order with values tried in ascending order, and a branch is abandoned as
/// soon as some constraint has its whole scope assigned and fails, so the
/// first witness found is the lexicographically least one.
pub fn solve_bruteforce(
    inst: &Instance,
    opts: &BruteForceOptions,
) -> Result<SolveResult, SolverError> {
    let n = inst.variables().len();

    // Nullary constraints have no variables to wait for; settle them first.
    for c in inst.constraints() {
        if c.scope.is_empty() && !inst.relation_of(c).contains(&[]) {
            return Ok(SolveResult::unsat());
        }
    }

    // Check each remaining constraint at the moment its last scope variable
    // receives a value.
    let mut by_last: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ci, c) in inst.constraints().iter().enumerate() {
        if let Some(&last) = c.scope.iter().max() {
            by_last[last].push(ci);
        }
    }

    let mut search = Search {
        inst,
        by_last,
        values: vec![0; n],
        nodes: 0,
        budget: opts.node_budget,
    };
    if search.run(0)? {
        let witness = Assignment::from_dense(inst.variables(), &search.values);
        Ok(SolveResult::sat(witness))
    } else {
        Ok(SolveResult::unsat())
    }
}

struct Search<'a> {
    inst: &'a Instance,
    by_last: Vec<Vec<usize>>,
    values: Vec<Value>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn run(&mut self, depth: usize) -> Result<bool, SolverError> {
        if depth == self.values.len() {
            return Ok(true);
        }
        for v in 0..self.inst.domain_size() {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(SolverError::BudgetExceeded {
                    budget: self.budget,
                });
            }
            self.values[depth] = v;
            if self.consistent(depth) && self.run(depth + 1)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn consistent(&self, depth: usize) -> bool {
        self.by_last[depth].iter().all(|&ci| {
            let c = &self.inst.constraints()[ci];
            let tuple: Vec<Value> = c.scope.iter().map(|&ix| self.values[ix]).collect();
            self.inst.relation_of(c).contains(&tuple)
        })
    }
}

/// The six tractable classes of Boolean constraint languages. Each names
/// the closure operation behind it: the two constants, the two semilattice
/// operations, majority, and minority.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchaeferClass {
    ZeroValid,
    OneValid,
    Horn,
    AntiHorn,
    Bijunctive,
    Affine,
}

impl SchaeferClass {
    pub const ALL: [SchaeferClass; 6] = [
        SchaeferClass::ZeroValid,
        SchaeferClass::OneValid,
        SchaeferClass::Horn,
        SchaeferClass::AntiHorn,
        SchaeferClass::Bijunctive,
        SchaeferClass::Affine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchaeferClass::ZeroValid => "zero_valid",
            SchaeferClass::OneValid => "one_valid",
            SchaeferClass::Horn => "horn",
            SchaeferClass::AntiHorn => "anti_horn",
            SchaeferClass::Bijunctive => "bijunctive",
            SchaeferClass::Affine => "affine",
        }
    }

    pub fn from_name(name: &str) -> Option<SchaeferClass> {
        SchaeferClass::ALL.into_iter().find(|c| c.name() == name)
    }
}

impl std::fmt::Display for SchaeferClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Solves a Boolean instance under the claim that every relation it uses
/// (base and alien alike) lies in `class`. Polynomial time throughout; see
/// the module docs for what happens when the claim is wrong.
pub fn solve_schaefer(inst: &Instance, class: SchaeferClass) -> Result<SolveResult, SolverError> {
    if inst.domain_size() != 2 {
        return Err(SolverError::NotBoolean {
            domain: inst.domain_size(),
        });
    }
    match class {
        SchaeferClass::ZeroValid => solve_constant(inst, 0, class),
        SchaeferClass::OneValid => solve_constant(inst, 1, class),
        SchaeferClass::Horn => solve_semilattice(inst, false),
        SchaeferClass::AntiHorn => solve_semilattice(inst, true),
        SchaeferClass::Bijunctive => solve_bijunctive(inst),
        SchaeferClass::Affine => solve_affine(inst),
    }
}

// A language valid at the constant v is satisfied by the constant-v
// assignment, so anything else means the claim was false. Empty relations
// are the one exception: they are closed under every operation yet satisfy
// nothing, so a constraint using one makes the instance plainly unsat.
fn solve_constant(
    inst: &Instance,
    v: Value,
    claimed: SchaeferClass,
) -> Result<SolveResult, SolverError> {
    if inst.constraints().iter().any(|c| inst.relation_of(c).is_empty()) {
        return Ok(SolveResult::unsat());
    }
    let values = vec![v; inst.variables().len()];
    if inst.evaluate_dense(&values) {
        Ok(SolveResult::sat(Assignment::from_dense(
            inst.variables(),
            &values,
        )))
    } else {
        Err(SolverError::ClassViolation { claimed })
    }
}

// One implication clause: when every variable in `body` is true, `head`
// must be true too; with no head, the body must not be all true.
struct HornClause {
    body: Vec<usize>,
    head: Option<usize>,
}

/// Horn and its 0/1-flipped mirror share one implementation. With
/// `flipped` the relations are read through a bit flip, the least model of
/// the flipped instance is computed, and the result is flipped back, which
/// yields the greatest model of the original.
fn solve_semilattice(inst: &Instance, flipped: bool) -> Result<SolveResult, SolverError> {
    let n = inst.variables().len();
    let claimed = if flipped {
        SchaeferClass::AntiHorn
    } else {
        SchaeferClass::Horn
    };

    let mut clauses: Vec<HornClause> = Vec::new();
    for c in inst.constraints() {
        let rel = inst.relation_of(c);
        let arity = rel.arity();
        let tuples: Vec<Vec<Value>> = rel
            .tuples()
            .map(|t| {
                if flipped {
                    t.iter().map(|&b| 1 - b).collect()
                } else {
                    t.to_vec()
                }
            })
            .collect();
        for falsifier in tuples_over(2, arity) {
            if tuples.contains(&falsifier) {
                continue;
            }
            let ones: Vec<usize> = (0..arity).filter(|&i| falsifier[i] == 1).collect();
            // Every satisfying tuple that dominates the falsifier's ones
            // agrees on some further position; their meet names it. With no
            // such tuple the ones alone are already contradictory.
            let above: Vec<&Vec<Value>> = tuples
                .iter()
                .filter(|t| ones.iter().all(|&i| t[i] == 1))
                .collect();
            let head_pos = if above.is_empty() {
                None
            } else {
                let meet: Vec<Value> =
                    (0..arity).map(|i| above.iter().map(|t| t[i]).min().unwrap()).collect();
                Some(
                    (0..arity)
                        .find(|&i| meet[i] == 1 && falsifier[i] == 0)
                        .expect("meet of dominating tuples exceeds a falsifier"),
                )
            };
            let mut body: Vec<usize> = ones.iter().map(|&i| c.scope[i]).collect();
            body.sort_unstable();
            body.dedup();
            clauses.push(HornClause {
                body,
                head: head_pos.map(|i| c.scope[i]),
            });
        }
    }

    // Least-model computation: grow the true set until no implication fires.
    let mut truth = vec![false; n];
    loop {
        let mut changed = false;
        for cl in &clauses {
            if let Some(h) = cl.head {
                if !truth[h] && cl.body.iter().all(|&v| truth[v]) {
                    truth[h] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    for cl in &clauses {
        if cl.head.is_none() && cl.body.iter().all(|&v| truth[v]) {
            return Ok(SolveResult::unsat());
        }
    }

    let values: Vec<Value> = truth
        .iter()
        .map(|&b| if b != flipped { 1 } else { 0 })
        .collect();
    finish_with(inst, values, claimed)
}

/// Majority-closed relations are fixed by their unary and binary
/// projections, so the instance flattens to a 2-CNF formula, solved by
/// strongly connected components of the implication graph.
fn solve_bijunctive(inst: &Instance) -> Result<SolveResult, SolverError> {
    let n = inst.variables().len();
    // Literal encoding: 2v is "x_v = 1", 2v + 1 is "x_v = 0".
    let lit = |var: usize, val: Value| 2 * var + (1 - val);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); 2 * n];
    let add_clause = |l1: usize, l2: usize, adj: &mut Vec<Vec<usize>>| {
        adj[l1 ^ 1].push(l2);
        adj[l2 ^ 1].push(l1);
    };

    for c in inst.constraints() {
        let rel = inst.relation_of(c);
        if rel.is_empty() {
            return Ok(SolveResult::unsat());
        }
        let arity = rel.arity();
        for i in 0..arity {
            for j in i..arity {
                for a in 0..2 {
                    for b in 0..2 {
                        if i == j && a != b {
                            continue;
                        }
                        let present = rel.tuples().any(|t| t[i] == a && t[j] == b);
                        if !present {
                            // Forbid x_{s(i)} = a together with x_{s(j)} = b.
                            add_clause(lit(c.scope[i], 1 - a), lit(c.scope[j], 1 - b), &mut adj);
                        }
                    }
                }
            }
        }
    }

    let comp = tarjan_scc(&adj);
    let mut values = vec![0; n];
    for v in 0..n {
        if comp[2 * v] == comp[2 * v + 1] {
            return Ok(SolveResult::unsat());
        }
        // Tarjan numbers components sinks first, and a literal whose
        // component is on the sink side can safely be made true.
        values[v] = if comp[2 * v] < comp[2 * v + 1] { 1 } else { 0 };
    }
    finish_with(inst, values, SchaeferClass::Bijunctive)
}

// Iterative Tarjan; returns the component index per node, sinks numbered
// first. Recursion would overflow on long implication chains.
fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut comp = vec![UNSEEN; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut frames: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;

    for start in 0..n {
        if index[start] != UNSEEN {
            continue;
        }
        index[start] = next_index;
        low[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;
        frames.push((start, 0));

        while let Some(frame) = frames.last_mut() {
            let v = frame.0;
            if frame.1 < adj[v].len() {
                let w = adj[v][frame.1];
                frame.1 += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(parent) = frames.last() {
                    let p = parent.0;
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("component root is on the stack");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// A minority-closed relation is the solution set of a linear system over
/// the two-element field, recovered from any tuple plus the span of its
/// differences. All systems are pooled and eliminated together; free
/// variables are set to 0, keeping the witness deterministic.
fn solve_affine(inst: &Instance) -> Result<SolveResult, SolverError> {
    let n = inst.variables().len();
    // Each row is (coefficients over the n variables, right-hand side).
    let mut rows: Vec<(Vec<bool>, bool)> = Vec::new();

    for c in inst.constraints() {
        let rel = inst.relation_of(c);
        let arity = rel.arity();
        if rel.is_empty() {
            rows.push((vec![false; n], true));
            continue;
        }
        let tuples: Vec<&[Value]> = rel.tuples().collect();
        let origin = tuples[0];
        let mut diffs: Vec<Vec<bool>> = tuples
            .iter()
            .map(|t| (0..arity).map(|i| t[i] != origin[i]).collect())
            .collect();
        reduce_gf2(&mut diffs);
        diffs.retain(|row| row.iter().any(|&b| b));

        // Rows orthogonal to every difference: one per non-pivot position.
        let mut pivot_of: Vec<Option<usize>> = vec![None; arity];
        for (ri, row) in diffs.iter().enumerate() {
            let p = row.iter().position(|&b| b).unwrap();
            pivot_of[p] = Some(ri);
        }
        for free in 0..arity {
            if pivot_of[free].is_some() {
                continue;
            }
            let mut positional = vec![false; arity];
            positional[free] = true;
            for (p, slot) in pivot_of.iter().enumerate() {
                if let Some(ri) = slot {
                    positional[p] = diffs[*ri][free];
                }
            }
            // Fold positions onto variables; repeats add coefficients mod 2.
            let mut coeffs = vec![false; n];
            let mut rhs = false;
            for (i, &on) in positional.iter().enumerate() {
                if on {
                    coeffs[c.scope[i]] ^= true;
                    rhs ^= origin[i] == 1;
                }
            }
            rows.push((coeffs, rhs));
        }
    }

    // Forward elimination in variable order.
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut used = vec![false; rows.len()];
    for var in 0..n {
        let Some(ri) = (0..rows.len()).find(|&ri| !used[ri] && rows[ri].0[var]) else {
            continue;
        };
        used[ri] = true;
        pivots.push((var, ri));
        for other in 0..rows.len() {
            if other != ri && rows[other].0[var] {
                let (a, b) = if other < ri {
                    let (lo, hi) = rows.split_at_mut(ri);
                    (&mut lo[other], &hi[0])
                } else {
                    let (lo, hi) = rows.split_at_mut(other);
                    (&mut hi[0], &lo[ri])
                };
                for (x, y) in a.0.iter_mut().zip(b.0.iter()) {
                    *x ^= y;
                }
                a.1 ^= b.1;
            }
        }
    }
    if rows
        .iter()
        .any(|(coeffs, rhs)| *rhs && coeffs.iter().all(|&b| !b))
    {
        return Ok(SolveResult::unsat());
    }

    // After full reduction each pivot row reads x_var = rhs directly.
    let mut values = vec![0; n];
    for (var, ri) in pivots {
        values[var] = if rows[ri].1 { 1 } else { 0 };
    }
    finish_with(inst, values, SchaeferClass::Affine)
}

// Row-reduce a GF(2) matrix in place to reduced echelon form.
fn reduce_gf2(rows: &mut [Vec<bool>]) {
    if rows.is_empty() {
        return;
    }
    let width = rows[0].len();
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col]) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] {
                let (a, b) = if r < rank {
                    let (lo, hi) = rows.split_at_mut(rank);
                    (&mut lo[r], &hi[0])
                } else {
                    let (lo, hi) = rows.split_at_mut(r);
                    (&mut hi[0], &lo[rank])
                };
                for (x, y) in a.iter_mut().zip(b.iter()) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
}

fn finish_with(
    inst: &Instance,
    values: Vec<Value>,
    claimed: SchaeferClass,
) -> Result<SolveResult, SolverError> {
    if inst.evaluate_dense(&values) {
        Ok(SolveResult::sat(Assignment::from_dense(
            inst.variables(),
            &values,
        )))
    } else {
        Err(SolverError::ClassViolation { claimed })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{Constraint, Relation, Structure};

    fn rel(arity: usize, tuples: &[&[Value]]) -> Relation {
        Relation::new(arity, tuples.iter().map(|t| t.to_vec())).unwrap()
    }

    fn boolean_instance(
        relations: Vec<(&str, Relation)>,
        variables: &[&str],
        constraints: Vec<(&str, Vec<usize>)>,
    ) -> Instance {
        let base = Structure::new(
            2,
            relations.into_iter().map(|(s, r)| (s.to_string(), r)),
        )
        .unwrap();
        Instance::new(
            base,
            Structure::without_relations(2),
            variables.iter().map(|v| v.to_string()).collect(),
            constraints
                .into_iter()
                .map(|(s, scope)| Constraint::base(s, scope))
                .collect(),
        )
        .unwrap()
    }

    fn dense(inst: &Instance, res: &SolveResult) -> Vec<Value> {
        let w = res.witness().unwrap();
        inst.variables().iter().map(|v| w.get(v).unwrap()).collect()
    }

    #[test]
    fn bruteforce_finds_lex_least_witness() {
        let inst = boolean_instance(
            vec![("or", rel(2, &[&[0, 1], &[1, 0], &[1, 1]]))],
            &["x", "y"],
            vec![("or", vec![0, 1])],
        );
        let res = solve_bruteforce(&inst, &BruteForceOptions::default()).unwrap();
        assert_eq!(dense(&inst, &res), vec![0, 1]);
    }

    #[test]
    fn bruteforce_reports_unsat() {
        let inst = boolean_instance(
            vec![("neq", rel(2, &[&[0, 1], &[1, 0]]))],
            &["x"],
            vec![("neq", vec![0, 0])],
        );
        let res = solve_bruteforce(&inst, &BruteForceOptions::default()).unwrap();
        assert!(!res.is_sat());
    }

    #[test]
    fn bruteforce_respects_budget() {
        let inst = boolean_instance(
            vec![("neq", rel(2, &[&[0, 1], &[1, 0]]))],
            &["a", "b", "c", "d", "e"],
            vec![("neq", vec![4, 4])],
        );
        let err = solve_bruteforce(&inst, &BruteForceOptions { node_budget: 10 });
        assert!(matches!(err, Err(SolverError::BudgetExceeded { budget: 10 })));
    }

    #[test]
    fn bruteforce_handles_nullary_relations() {
        let inst = boolean_instance(
            vec![("never", Relation::empty(0))],
            &["x"],
            vec![("never", vec![])],
        );
        let res = solve_bruteforce(&inst, &BruteForceOptions::default()).unwrap();
        assert!(!res.is_sat());
    }

    #[test]
    fn constant_solvers_use_the_constant_assignment() {
        let imp = rel(2, &[&[0, 0], &[0, 1], &[1, 1]]);
        let inst = boolean_instance(vec![("imp", imp)], &["x", "y"], vec![("imp", vec![0, 1])]);
        let zero = solve_schaefer(&inst, SchaeferClass::ZeroValid).unwrap();
        assert_eq!(dense(&inst, &zero), vec![0, 0]);
        let one = solve_schaefer(&inst, SchaeferClass::OneValid).unwrap();
        assert_eq!(dense(&inst, &one), vec![1, 1]);
    }

    #[test]
    fn constant_solver_rejects_false_claims() {
        let inst = boolean_instance(
            vec![("one", rel(1, &[&[1]]))],
            &["x"],
            vec![("one", vec![0])],
        );
        assert!(matches!(
            solve_schaefer(&inst, SchaeferClass::ZeroValid),
            Err(SolverError::ClassViolation {
                claimed: SchaeferClass::ZeroValid
            })
        ));
    }

    #[test]
    fn horn_returns_least_model() {
        let inst = boolean_instance(
            vec![
                ("one", rel(1, &[&[1]])),
                ("imp", rel(2, &[&[0, 0], &[0, 1], &[1, 1]])),
            ],
            &["x", "y", "z"],
            vec![("one", vec![0]), ("imp", vec![0, 1])],
        );
        let res = solve_schaefer(&inst, SchaeferClass::Horn).unwrap();
        // x forces y, nothing touches z, and the least model leaves z at 0.
        assert_eq!(dense(&inst, &res), vec![1, 1, 0]);
    }

    #[test]
    fn horn_detects_unsat_through_propagation() {
        let inst = boolean_instance(
            vec![
                ("one", rel(1, &[&[1]])),
                ("zero", rel(1, &[&[0]])),
                ("imp", rel(2, &[&[0, 0], &[0, 1], &[1, 1]])),
            ],
            &["x", "y"],
            vec![("one", vec![0]), ("imp", vec![0, 1]), ("zero", vec![1])],
        );
        let res = solve_schaefer(&inst, SchaeferClass::Horn).unwrap();
        assert!(!res.is_sat());
    }

    #[test]
    fn horn_handles_purely_negative_clauses() {
        let not_both = rel(2, &[&[0, 0], &[0, 1], &[1, 0]]);
        let inst = boolean_instance(
            vec![("one", rel(1, &[&[1]])), ("nb", not_both)],
            &["x", "y"],
            vec![("one", vec![0]), ("one", vec![1]), ("nb", vec![0, 1])],
        );
        let res = solve_schaefer(&inst, SchaeferClass::Horn).unwrap();
        assert!(!res.is_sat());
    }

    #[test]
    fn horn_handles_empty_relations() {
        let inst = boolean_instance(
            vec![("void", Relation::empty(2))],
            &["x", "y"],
            vec![("void", vec![0, 1])],
        );
        let res = solve_schaefer(&inst, SchaeferClass::Horn).unwrap();
        assert!(!res.is_sat());
    }

    #[test]
    fn anti_horn_returns_greatest_model() {
        // y <= x together with "y or x": greatest model is all ones.
        let imp = rel(2, &[&[0, 0], &[0, 1], &[1, 1]]);
        let or2 = rel(2, &[&[0, 1], &[1, 0], &[1, 1]]);
        let inst = boolean_instance(
            vec![("imp", imp), ("or", or2)],
            &["x", "y", "z"],
            vec![("imp", vec![1, 0]), ("or", vec![0, 1])],
        );
        let res = solve_schaefer(&inst, SchaeferClass::AntiHorn).unwrap();
        assert_eq!(dense(&inst, &res), vec![1, 1, 1]);
    }

    #[test]
    fn bijunctive_solves_two_colorings() {
        let neq = rel(2, &[&[0, 1], &[1, 0]]);
        let path = boolean_instance(
            vec![("neq", neq.clone())],
            &["x", "y", "z"],
            vec![("neq", vec![0, 1]), ("neq", vec![1, 2])],
        );
        let res = solve_schaefer(&path, SchaeferClass::Bijunctive).unwrap();
        let w = dense(&path, &res);
        assert_ne!(w[0], w[1]);
        assert_ne!(w[1], w[2]);

        let triangle = boolean_instance(
            vec![("neq", neq)],
            &["x", "y", "z"],
            vec![
                ("neq", vec![0, 1]),
                ("neq", vec![1, 2]),
                ("neq", vec![0, 2]),
            ],
        );
        let res = solve_schaefer(&triangle, SchaeferClass::Bijunctive).unwrap();
        assert!(!res.is_sat());
    }

    #[test]
    fn bijunctive_applies_unary_projections() {
        // The relation forces its first coordinate to 1 no matter what the
        // second does; unary projection must pick that up.
        let r = rel(2, &[&[1, 0], &[1, 1]]);
        let inst = boolean_instance(vec![("r", r)], &["x", "y"], vec![("r", vec![0, 1])]);
        let res = solve_schaefer(&inst, SchaeferClass::Bijunctive).unwrap();
        assert_eq!(dense(&inst, &res)[0], 1);
    }

    #[test]
    fn affine_solves_parity_chains() {
        let xor3 = rel(3, &[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0], &[1, 1, 1]]);
        let inst = boolean_instance(
            vec![("xor3", xor3), ("one", rel(1, &[&[1]]))],
            &["x", "y", "z"],
            vec![("xor3", vec![0, 1, 2]), ("one", vec![0])],
        );
        let res = solve_schaefer(&inst, SchaeferClass::Affine).unwrap();
        // x = 1 leaves y + z = 0; free variables settle to 0.
        assert_eq!(dense(&inst, &res), vec![1, 0, 0]);
    }

    #[test]
    fn affine_detects_inconsistent_systems() {
        let xor3 = rel(3, &[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0], &[1, 1, 1]]);
        let inst = boolean_instance(
            vec![("xor3", xor3), ("zero", rel(1, &[&[0]]))],
            &["x", "y", "z"],
            vec![
                ("xor3", vec![0, 1, 2]),
                ("zero", vec![0]),
                ("zero", vec![1]),
                ("zero", vec![2]),
            ],
        );
        let res = solve_schaefer(&inst, SchaeferClass::Affine).unwrap();
        assert!(!res.is_sat());
    }

    #[test]
    fn affine_handles_repeated_scope_variables() {
        let xor3 = rel(3, &[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0], &[1, 1, 1]]);
        // x + x + y = 1 collapses to y = 1.
        let inst = boolean_instance(
            vec![("xor3", xor3)],
            &["x", "y"],
            vec![("xor3", vec![0, 0, 1])],
        );
        let res = solve_schaefer(&inst, SchaeferClass::Affine).unwrap();
        let w = dense(&inst, &res);
        assert_eq!(w[1], 1);
    }

    #[test]
    fn class_solvers_reject_larger_domains() {
        let base = Structure::new(3, vec![("r".to_string(), rel(1, &[&[2]]))]).unwrap();
        let inst = Instance::new(
            base,
            Structure::without_relations(3),
            vec!["x".into()],
            vec![Constraint::base("r", vec![0])],
        )
        .unwrap();
        assert!(matches!(
            solve_schaefer(&inst, SchaeferClass::Horn),
            Err(SolverError::NotBoolean { domain: 3 })
        ));
    }

    #[test]
    fn solve_result_serializes_both_shapes() {
        let sat = SolveResult::sat(Assignment::from_pairs(vec![("x".to_string(), 1)]));
        assert_eq!(
            serde_json::to_string(&sat).unwrap(),
            r#"{"status":"sat","witness":{"x":1}}"#
        );
        assert_eq!(
            serde_json::to_string(&SolveResult::unsat()).unwrap(),
            r#"{"status":"unsat"}"#
        );
    }
}
