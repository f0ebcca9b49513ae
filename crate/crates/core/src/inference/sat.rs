//! 2-SAT over an implication graph.
//!
//! Strongly connected components are found with an iterative Tarjan pass.
//! Literal nodes are laid out as `2v` (positive) and `2v + 1` (negative),
//! and the DFS is rooted at every positive literal before any negative
//! one. A variable is set true when its positive literal's component is
//! completed before its negation's. For formulas whose binary clauses are
//! all implications between positive literals (the shape the tier encoder
//! emits) the only way a DFS from a positive literal reaches a negative
//! one is through a negative unit, so a negative literal is finished
//! first only when it is forced. The result is the unique maximal-true
//! model: every "tier ≤ i" bit that can be true is true.

use std::fmt::{self, Write as _};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn pos(var: u32) -> Lit {
        Lit(var << 1)
    }

    pub fn neg(var: u32) -> Lit {
        Lit((var << 1) | 1)
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn negate(self) -> Lit {
        Lit(self.0 ^ 1)
    }

    fn index(self) -> usize {
        self.0 as usize
    }

    /// 1-based signed integer, as in DIMACS.
    pub fn dimacs(self) -> i64 {
        let v = self.var() as i64 + 1;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    Unit(Lit),
    Binary(Lit, Lit),
}

impl Clause {
    pub fn lits(&self) -> impl Iterator<Item = Lit> {
        let (a, b) = match *self {
            Clause::Unit(a) => (a, None),
            Clause::Binary(a, b) => (a, Some(b)),
        };
        std::iter::once(a).chain(b)
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.lits()
            .any(|l| assignment[l.var() as usize] != l.is_negated())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClauseSet {
    pub num_vars: u32,
    pub clauses: Vec<Clause>,
}

impl ClauseSet {
    pub fn new(num_vars: u32) -> Self {
        ClauseSet {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn push(&mut self, c: Clause) {
        debug_assert!(c.lits().all(|l| l.var() < self.num_vars));
        self.clauses.push(c);
    }

    /// `(¬a ∨ b)`, i.e. `a ⇒ b`.
    pub fn implies(&mut self, a: Lit, b: Lit) {
        self.push(Clause::Binary(a.negate(), b));
    }

    pub fn unit(&mut self, a: Lit) {
        self.push(Clause::Unit(a));
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.satisfied_by(assignment))
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = String::new();
        self.write_dimacs(&mut s).expect("writing to a String cannot fail");
        s
    }

    pub fn write_dimacs(&self, out: &mut impl fmt::Write) -> fmt::Result {
        writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        for c in &self.clauses {
            for l in c.lits() {
                write!(out, "{} ", l.dimacs())?;
            }
            out.write_str("0\n")?;
        }
        Ok(())
    }
}

/// Returns a satisfying assignment, or `None` when some variable shares a
/// component with its negation.
pub fn solve_2sat(cs: &ClauseSet) -> Option<Vec<bool>> {
    let n = 2 * cs.num_vars as usize;

    // CSR adjacency of the implication graph
    let mut degree = vec![0u32; n + 1];
    let edges = |c: &Clause| -> [(Lit, Lit); 2] {
        match *c {
            Clause::Unit(a) => [(a.negate(), a), (a.negate(), a)],
            Clause::Binary(a, b) => [(a.negate(), b), (b.negate(), a)],
        }
    };
    for c in &cs.clauses {
        let e = edges(c);
        degree[e[0].0.index()] += 1;
        if matches!(c, Clause::Binary(..)) {
            degree[e[1].0.index()] += 1;
        }
    }
    let mut start = vec![0usize; n + 1];
    for i in 0..n {
        start[i + 1] = start[i] + degree[i] as usize;
    }
    let mut fill = start.clone();
    let mut adj = vec![0u32; start[n]];
    for c in &cs.clauses {
        let e = edges(c);
        let count = if matches!(c, Clause::Binary(..)) { 2 } else { 1 };
        for &(from, to) in &e[..count] {
            adj[fill[from.index()]] = to.0;
            fill[from.index()] += 1;
        }
    }
    drop(fill);

    const UNSEEN: u32 = u32::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut comp = vec![UNSEEN; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<(u32, usize)> = Vec::new();
    let mut next_index = 0u32;
    let mut next_comp = 0u32;

    let roots = (0..n).step_by(2).chain((1..n).step_by(2));
    for root in roots {
        if index[root] != UNSEEN {
            continue;
        }
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root as u32);
        on_stack[root] = true;
        call.push((root as u32, start[root]));

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let v = v as usize;
            if *pos < start[v + 1] {
                let w = adj[*pos] as usize;
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w as u32);
                    on_stack[w] = true;
                    call.push((w as u32, start[w]));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                let parent = parent as usize;
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow") as usize;
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

    let mut assignment = Vec::with_capacity(cs.num_vars as usize);
    for v in 0..cs.num_vars as usize {
        let (p, q) = (comp[2 * v], comp[2 * v + 1]);
        if p == q {
            return None;
        }
        assignment.push(p < q);
    }
    Some(assignment)
}

/// Helper for writing several clause sets into one text dump.
pub fn dimacs_section(title: &str, cs: &ClauseSet) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "c {title}");
    let _ = cs.write_dimacs(&mut s);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_equivalence() {
        let mut cs = ClauseSet::new(2);
        let (a, b) = (Lit::pos(0), Lit::pos(1));
        cs.implies(a, b);
        cs.implies(b, a);
        cs.unit(a);
        assert_eq!(solve_2sat(&cs), Some(vec![true, true]));
    }

    #[test]
    fn contradiction() {
        let mut cs = ClauseSet::new(1);
        cs.unit(Lit::pos(0));
        cs.unit(Lit::neg(0));
        assert_eq!(solve_2sat(&cs), None);
    }

    #[test]
    fn mixed_polarity() {
        // (a ∨ b), (¬a ∨ b), (a ∨ ¬b), (¬a ∨ ¬b) is unsatisfiable
        let mut cs = ClauseSet::new(2);
        let (a, b) = (Lit::pos(0), Lit::pos(1));
        cs.push(Clause::Binary(a, b));
        cs.push(Clause::Binary(a.negate(), b));
        cs.push(Clause::Binary(a, b.negate()));
        assert!(solve_2sat(&cs).unwrap() == vec![true, true]);
        cs.push(Clause::Binary(a.negate(), b.negate()));
        assert_eq!(solve_2sat(&cs), None);
    }

    #[test]
    fn negative_units_propagate_backwards() {
        // a ⇒ b ⇒ c, ¬c: everything false; d unconstrained stays true
        let mut cs = ClauseSet::new(4);
        cs.implies(Lit::pos(0), Lit::pos(1));
        cs.implies(Lit::pos(1), Lit::pos(2));
        cs.unit(Lit::neg(2));
        assert_eq!(solve_2sat(&cs), Some(vec![false, false, false, true]));
    }

    #[test]
    fn dimacs_text() {
        let mut cs = ClauseSet::new(2);
        cs.implies(Lit::pos(0), Lit::pos(1));
        cs.unit(Lit::neg(1));
        assert_eq!(cs.to_dimacs(), "p cnf 2 2\n-1 2 0\n-2 0\n");
    }
}
