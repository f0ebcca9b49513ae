//! Invariants of the interpreter, the solver and inference on random
//! inputs.

use proptest::prelude::*;

use tier_core::inference::sat::{solve_2sat, Clause, ClauseSet, Lit};
use tier_core::semantics::{eval_cmd, ExecutionTrace};
use tier_core::syntax::{program_size, Cmd, Expr, Program, Var};
use tier_core::tiers::{audit_derivation, verify_rules};
use tier_core::{check, infer, parse, run_program, truncate_pad, Oracle, Registry, Store, Word};

const VARS: [&str; 4] = ["a", "b", "c", "d"];
const FUEL: u64 = 20_000;
/// Same constant as the acceptance bound on clause counts.
const CLAUSE_CONSTANT: u64 = 5;

fn word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(prop::bool::ANY, 0..=max_len)
        .prop_map(|bits| Word::from_symbols(&bits.iter().map(|&b| if b { b'1' } else { b'0' }).collect::<Vec<_>>()))
}

fn var() -> impl Strategy<Value = Var> {
    prop::sample::select(VARS.to_vec()).prop_map(Var::new)
}

fn expr(oracle: bool) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        4 => var().prop_map(|name| Expr::Var { name }),
        1 => word(3).prop_map(Expr::lit),
        1 => prop::sample::select(vec!["zero", "one", "eps"]).prop_map(|op| Expr::op(op, vec![])),
    ];
    leaf.prop_recursive(3, 12, 2, move |inner| {
        let unary = (prop::sample::select(vec!["pred", "suc0", "suc1", "gt0"]), inner.clone())
            .prop_map(|(op, a)| Expr::op(op, vec![a]));
        let binary = (
            prop::sample::select(vec!["eq", "geq", "lmin", "maxlen"]),
            inner.clone(),
            inner.clone(),
        )
            .prop_map(|(op, a, b)| Expr::op(op, vec![a, b]));
        let call = (inner.clone(), inner).prop_map(|(d, b)| Expr::oracle(d, b));
        if oracle {
            prop_oneof![3 => unary, 2 => binary, 1 => call].boxed()
        } else {
            prop_oneof![3 => unary, 2 => binary].boxed()
        }
    })
}

fn cmd(oracle: bool) -> impl Strategy<Value = Cmd> {
    let leaf = prop_oneof![
        1 => Just(Cmd::Skip),
        4 => (var(), expr(oracle)).prop_map(|(x, e)| Cmd::Assign { var: x, expr: e }),
    ];
    leaf.prop_recursive(3, 16, 3, move |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Cmd::seq(a, b)),
            (expr(oracle), inner.clone(), inner.clone()).prop_map(|(g, a, b)| Cmd::if_else(g, a, b)),
            (expr(oracle), inner).prop_map(|(g, b)| Cmd::while_loop(g, b)),
        ]
    })
}

fn has_oracle(c: &Cmd) -> bool {
    match c {
        Cmd::Skip => false,
        Cmd::Assign { expr, .. } => expr.has_oracle_call(),
        Cmd::Seq { first, rest } => has_oracle(first) || has_oracle(rest),
        Cmd::If {
            guard,
            then_branch,
            else_branch,
        } => guard.has_oracle_call() || has_oracle(then_branch) || has_oracle(else_branch),
        Cmd::While { guard, body } => guard.has_oracle_call() || has_oracle(body),
    }
}

fn program() -> impl Strategy<Value = Program> {
    (cmd(true), var()).prop_map(|(body, ret)| {
        let oracle = has_oracle(&body).then(|| "phi".to_string());
        Program { body, ret, oracle }
    })
}

fn store() -> impl Strategy<Value = Store> {
    prop::collection::vec(word(6), VARS.len())
        .prop_map(|ws| Store::from_bindings(VARS.iter().map(|x| Var::new(x)).zip(ws)))
}

fn oracle() -> impl Strategy<Value = Oracle> {
    (word(4), prop::collection::vec((word(5), word(5)), 0..8)).prop_map(|(d, entries)| {
        entries
            .into_iter()
            .fold(Oracle::constant(d), |phi, (q, a)| phi.with_entry(q, a))
    })
}

fn subexpressions(e: &Expr, out: &mut Vec<usize>) {
    out.push(e.size());
    match e {
        Expr::Op { args, .. } => args.iter().for_each(|a| subexpressions(a, out)),
        Expr::Oracle { data, bound } => {
            subexpressions(data, out);
            subexpressions(bound, out);
        }
        _ => {}
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printing_then_parsing_is_the_identity(p in program()) {
        let reg = Registry::builtin();
        let text = p.to_string();
        let back = parse(&text, &reg).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, p);
    }

    #[test]
    fn program_size_exceeds_every_subterm(p in program()) {
        let n = program_size(&p);
        let mut sizes = Vec::new();
        fn walk(c: &Cmd, sizes: &mut Vec<usize>) {
            sizes.push(c.size());
            match c {
                Cmd::Skip => {}
                Cmd::Assign { expr, .. } => subexpressions(expr, sizes),
                Cmd::Seq { first, rest } => { walk(first, sizes); walk(rest, sizes); }
                Cmd::If { guard, then_branch, else_branch } => {
                    subexpressions(guard, sizes);
                    walk(then_branch, sizes);
                    walk(else_branch, sizes);
                }
                Cmd::While { guard, body } => { subexpressions(guard, sizes); walk(body, sizes); }
            }
        }
        walk(&p.body, &mut sizes);
        prop_assert!(sizes.iter().all(|&s| s >= 1 && s < n));
    }

    #[test]
    fn assigned_variables_are_variables(p in program()) {
        let all = p.variables();
        prop_assert!(p.body.assigned_vars().is_subset(&all));
        prop_assert!(all.contains(&p.ret));
    }

    #[test]
    fn truncate_pad_has_length_one_more_than_the_bound(v in word(20), w in word(20)) {
        let r = truncate_pad(&v, &w);
        prop_assert_eq!(r.len(), w.len() + 1);
        let keep = v.len().min(w.len());
        prop_assert_eq!(r.prefix(keep), v.prefix(keep));
        let tail = r.to_vec()[keep..].to_vec();
        prop_assert_eq!(tail[0], b'1');
        prop_assert!(tail[1..].iter().all(|&s| s == b'0'));
    }

    #[test]
    fn runs_are_deterministic(p in program(), mu in store(), phi in oracle()) {
        let reg = Registry::builtin();
        let a = run_program(&p, &mu, &reg, &phi, Some(FUEL));
        let b = run_program(&p, &mu, &reg, &phi, Some(FUEL));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn oracle_queries_are_never_empty(p in program(), mu in store(), phi in oracle()) {
        let reg = Registry::builtin();
        if let Ok(r) = run_program(&p, &mu, &reg, &phi, Some(FUEL)) {
            prop_assert!(r.trace.oracle_log.iter().all(|(q, _)| !q.is_empty()));
            let answers = r.trace.oracle_log.iter().map(|(_, u)| u.len()).max().unwrap_or(0);
            prop_assert_eq!(r.trace.m, answers.max(mu.size()));
        }
    }

    #[test]
    fn sequencing_adds_one_step(c1 in cmd(true), c2 in cmd(true), mu in store(), phi in oracle()) {
        let reg = Registry::builtin();
        let run = |c: &Cmd, mu: &mut Store| {
            let mut t = ExecutionTrace::default();
            eval_cmd(c, mu, &reg, &phi, &mut t, Some(FUEL)).map(|_| t.steps)
        };
        let mut m1 = mu.clone();
        let (Ok(s1), Ok(s2)) = (run(&c1, &mut m1), run(&c2, &mut m1.clone())) else {
            return Ok(());
        };
        let mut both = mu.clone();
        let total = run(&Cmd::seq(c1, c2), &mut both);
        prop_assert_eq!(total, Ok(1 + s1 + s2));
    }

    #[test]
    fn operators_respect_their_classification(args in prop::collection::vec(word(12), 2)) {
        let reg = Registry::builtin();
        for spec in reg.iter() {
            let a = &args[..spec.arity];
            let out = spec.apply(a);
            let max = a.iter().map(Word::len).max().unwrap_or(0);
            prop_assert!(out.len() <= max + spec.classification.length_slack(), "{}", spec.name);
        }
        let (x, y) = (&args[0], &args[1]);
        let lmin = reg.get("lmin").unwrap().apply(&args);
        prop_assert!(lmin == *x || lmin == *y);
        prop_assert_eq!(lmin.len(), x.len().min(y.len()));
        if x.len() == y.len() {
            prop_assert_eq!(&lmin, y);
        }
        for op in ["gt0", "eq", "geq"] {
            let spec = reg.get(op).unwrap();
            prop_assert!(spec.apply(&args[..spec.arity]).is_bit());
        }
    }
}

/// Random 2-CNF over `n` variables.
fn clause_set(max_vars: u32, max_clauses: usize) -> impl Strategy<Value = ClauseSet> {
    (1..=max_vars).prop_flat_map(move |n| {
        let lit = (0..n, prop::bool::ANY).prop_map(|(v, s)| if s { Lit::pos(v) } else { Lit::neg(v) });
        let clause = prop_oneof![
            1 => lit.clone().prop_map(Clause::Unit),
            4 => (lit.clone(), lit).prop_map(|(a, b)| Clause::Binary(a, b)),
        ];
        prop::collection::vec(clause, 0..max_clauses).prop_map(move |clauses| {
            let mut cs = ClauseSet::new(n);
            clauses.into_iter().for_each(|c| cs.push(c));
            cs
        })
    })
}

/// Clauses `¬a ∨ b`, `a`, `¬a` only: the shape the tier encoding produces.
fn implicational_set(max_vars: u32, max_clauses: usize) -> impl Strategy<Value = ClauseSet> {
    (1..=max_vars).prop_flat_map(move |n| {
        let item = prop_oneof![
            6 => (0..n, 0..n).prop_map(|(a, b)| Clause::Binary(Lit::neg(a), Lit::pos(b))),
            1 => (0..n).prop_map(|a| Clause::Unit(Lit::pos(a))),
            1 => (0..n).prop_map(|a| Clause::Unit(Lit::neg(a))),
        ];
        prop::collection::vec(item, 0..max_clauses).prop_map(move |clauses| {
            let mut cs = ClauseSet::new(n);
            clauses.into_iter().for_each(|c| cs.push(c));
            cs
        })
    })
}

fn brute_force_sat(cs: &ClauseSet) -> bool {
    (0u32..1 << cs.num_vars).any(|bits| {
        let a: Vec<bool> = (0..cs.num_vars).map(|i| bits >> i & 1 == 1).collect();
        cs.satisfied_by(&a)
    })
}

/// Greatest model by downward propagation from all-true.
fn greatest_model(cs: &ClauseSet) -> Option<Vec<bool>> {
    let mut a = vec![true; cs.num_vars as usize];
    loop {
        let mut changed = false;
        for c in &cs.clauses {
            match *c {
                Clause::Unit(l) if l.is_negated() && a[l.var() as usize] => {
                    a[l.var() as usize] = false;
                    changed = true;
                }
                Clause::Binary(x, y)
                    if x.is_negated() && !y.is_negated() && a[x.var() as usize] && !a[y.var() as usize] =>
                {
                    a[x.var() as usize] = false;
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    cs.satisfied_by(&a).then_some(a)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn two_sat_matches_exhaustive_search(cs in clause_set(8, 24)) {
        let model = solve_2sat(&cs);
        prop_assert_eq!(model.is_some(), brute_force_sat(&cs));
        if let Some(m) = model {
            prop_assert!(cs.satisfied_by(&m));
        }
    }

    #[test]
    fn two_sat_returns_the_greatest_model_of_implicational_sets(cs in implicational_set(12, 30)) {
        prop_assert_eq!(solve_2sat(&cs), greatest_model(&cs));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn inferred_typings_check_and_pass_the_audits(p in program()) {
        let reg = Registry::builtin();
        let out = infer(&p, &reg, None).unwrap();
        if let Some(r) = out.result {
            prop_assert!(verify_rules(&r.derivation, &r.gamma, &reg).is_ok());
            prop_assert!(audit_derivation(&r.derivation, &r.gamma).is_ok());
            prop_assert!(check(&p, &r.gamma, r.triple, &reg).unwrap().is_some());
        }
    }

    #[test]
    fn clause_count_is_within_the_quadratic_bound(p in program(), t_max in 1u32..8) {
        let reg = Registry::builtin();
        let stats = infer(&p, &reg, Some(t_max)).unwrap().stats;
        let n = stats.program_size as u64;
        prop_assert!((stats.clauses as u64) <= CLAUSE_CONSTANT * n * n * u64::from(t_max));
    }
}
