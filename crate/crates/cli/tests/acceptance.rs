//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use bcplus_core::action::{classify, ActionDescription, CausalLaw};
use bcplus_core::formula::{expand_cardinality, uec_constant, Formula};
use bcplus_core::frontends::{bc2bcp, cp2bcp, interpretation_to_state, pf2bcp};
use bcplus_core::query::{solve, QueryOutcome, SolveOptions};
use bcplus_core::signature::{Atom, ConstantKind, Signature};
use bcplus_core::stable::{StableEngine, StableQuery};
use bcplus_core::suite::{
    compose_chains, minimal_models, oracle_is_stable, oracle_stable_models, propositions, random_bc_description,
    random_cplus_description, random_formula, random_positive_formula, random_simple_description, random_subset,
    total_valuations, SuiteBounds,
};
use bcplus_core::translate::{translate, TimedAtom};
use bcplus_core::transition::{is_transition, paths, states, transitions, Transition, TransitionSystem, Valuation};
use bcplus_core::{Interpretation, Symbol};
use bcplus_lang::{load, Description, GroundOptions, Mode};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn engine() -> StableEngine {
    StableEngine::default()
}

fn program(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../programs/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn c_signature() -> Signature {
    Signature::new()
        .with("c", ConstantKind::RegularFluent, [1, 2, 3].map(Symbol::int))
        .unwrap()
}

fn c(v: i64) -> Atom {
    Atom::new("c", v)
}

fn models(f: &Formula<Atom>) -> BTreeSet<BTreeSet<Atom>> {
    engine()
        .stable_models(&StableQuery::new(f, c_signature().atoms()))
        .unwrap()
        .into_iter()
        .map(Interpretation::into_atoms)
        .collect()
}

fn f1(bare_existence: bool) -> Formula<Atom> {
    let mut uec = uec_constant(c_signature().get(&"c".into()).unwrap());
    if bare_existence {
        let last = uec.pop().unwrap();
        uec.push(last.negated().and_then(Formula::negated).unwrap().clone());
    }
    Formula::and(Formula::choice(Formula::Atom(c(1))), Formula::conj(uec))
}

fn singleton(v: i64) -> BTreeSet<Atom> {
    BTreeSet::from([c(v)])
}

fn choice_with_existence() -> Outcome {
    let f1 = f1(false);
    let f2 = Formula::and(f1.clone(), Formula::Atom(c(2)));
    let universe: Vec<Atom> = c_signature().atoms().collect();
    ensure!(models(&f1) == BTreeSet::from([singleton(1)]), "F1 stable models {:?}", models(&f1));
    for v in [2, 3] {
        let x = singleton(v);
        ensure!(Interpretation(x.clone()).satisfies(&f1), "{{c={v}}} is not a model of F1");
        ensure!(!oracle_is_stable(&f1, &x, None), "{{c={v}}} is stable for F1");
    }
    ensure!(models(&f2) == BTreeSet::from([singleton(2)]), "F2 stable models {:?}", models(&f2));
    ensure!(
        !engine().is_stable_model(&Interpretation(singleton(1)), &StableQuery::new(&f2, universe)),
        "{{c=1}} is stable for F2"
    );
    Ok(())
}

fn no_double_negation() -> Outcome {
    let got = models(&f1(true));
    let want: BTreeSet<_> = (1..=3).map(singleton).collect();
    ensure!(got == want, "stable models without double negation: {got:?}");
    Ok(())
}

fn cardinality() -> Outcome {
    let f = expand_cardinality(Some(2), &["p", "q", "r"], None);
    for bits in 0u8..8 {
        let holds = |a: &&str| bits >> ["p", "q", "r"].iter().position(|x| x == a).unwrap() & 1 == 1;
        let (p, q, r) = (holds(&"p"), holds(&"q"), holds(&"r"));
        let want = (p && q) || (q && r) || (p && r);
        ensure!(f.eval(&holds) == want, "valuation {bits:03b}");
    }
    Ok(())
}

fn sd() -> ActionDescription {
    let sig = Signature::new()
        .with_boolean("p", ConstantKind::RegularFluent)
        .unwrap()
        .with_boolean("a", ConstantKind::Action)
        .unwrap();
    let (p, np) = (Formula::Atom(Atom::truth("p")), Formula::Atom(Atom::falsity("p")));
    let (a, na) = (Formula::Atom(Atom::truth("a")), Formula::Atom(Atom::falsity("a")));
    ActionDescription::new(sig)
        .with_law(CausalLaw::fluent_dynamic(p.clone(), Formula::top(), a.clone()))
        .unwrap()
        .with_law(CausalLaw::action_dynamic(Formula::choice(a), Formula::top()))
        .unwrap()
        .with_law(CausalLaw::action_dynamic(Formula::choice(na), Formula::top()))
        .unwrap()
        .with_law(CausalLaw::fluent_dynamic(Formula::choice(p.clone()), Formula::top(), p))
        .unwrap()
        .with_law(CausalLaw::fluent_dynamic(Formula::choice(np.clone()), Formula::top(), np))
        .unwrap()
}

fn val(atoms: &[Atom]) -> Valuation {
    Valuation::new(atoms.iter().cloned())
}

fn brute_force_transitions(d: &ActionDescription) -> BTreeSet<Transition> {
    let pf1 = translate(d, 1).formula();
    let fluents = total_valuations(d.signature.fluents());
    let actions = total_valuations(d.signature.actions());
    let mut out = BTreeSet::new();
    for s in &fluents {
        for e in &actions {
            for s2 in &fluents {
                let t = Transition::new(s.clone(), e.clone(), s2.clone());
                if oracle_is_stable(&pf1, &t.to_model().into_atoms(), None) {
                    out.insert(t);
                }
            }
        }
    }
    out
}

fn sd_criterion() -> Outcome {
    let d = sd();
    let (p, np) = (Atom::truth("p"), Atom::falsity("p"));
    let (a, na) = (Atom::truth("a"), Atom::falsity("a"));
    let got = states(&d, &engine()).unwrap();
    ensure!(got == BTreeSet::from([val(&[p.clone()]), val(&[np.clone()])]), "states {got:?}");
    let ts = transitions(&d, &engine()).unwrap();
    ensure!(
        ts.contains(&Transition::new(val(&[np.clone()]), val(&[na.clone()]), val(&[np.clone()]))),
        "missing <~p, ~a, ~p>"
    );
    ensure!(
        ts.contains(&Transition::new(val(&[np.clone()]), val(&[a.clone()]), val(&[p.clone()]))),
        "missing <~p, a, p>"
    );
    let oracle = brute_force_transitions(&d);
    ensure!(ts == oracle, "{} transitions, oracle has {}", ts.len(), oracle.len());
    let path: BTreeSet<TimedAtom> = [
        TimedAtom::new(0, np.clone()),
        TimedAtom::new(0, na),
        TimedAtom::new(1, np),
        TimedAtom::new(1, a),
        TimedAtom::new(2, p),
    ]
    .into();
    let two = paths(&d, 2, &engine()).unwrap();
    ensure!(two.iter().any(|x| x.to_model().into_atoms() == path), "path missing from paths(SD, 2)");
    Ok(())
}

fn st(s: &str, x: &str) -> Atom {
    Atom::new(Symbol::app("sw_status", [Symbol::name(s)]), x)
}

fn flip(s: &str, on: bool) -> Atom {
    let c = Symbol::app("flip", [Symbol::name(s)]);
    if on {
        Atom::truth(c)
    } else {
        Atom::falsity(c)
    }
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bcplus"))
        .args(args)
        .output()
        .expect("running bcplus");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn two_switches() -> Outcome {
    let start = val(&[st("s1", "off"), st("s2", "on")]);
    let swapped = val(&[st("s1", "on"), st("s2", "off")]);
    let labelings = [(false, false, &start), (true, true, &swapped), (false, true, &swapped), (true, false, &swapped)];
    let mut want: BTreeSet<Transition> = labelings
        .iter()
        .map(|(a, b, to)| Transition::new(start.clone(), val(&[flip("s1", *a), flip("s2", *b)]), (*to).clone()))
        .collect();
    for (mode, extra) in [(Mode::BcPlus, false), (Mode::Cplus, true)] {
        let g = load(&program("switch.bcp"), mode, &GroundOptions::default()).map_err(|d| d.to_string())?;
        if extra {
            want.insert(Transition::new(start.clone(), val(&[flip("s1", false), flip("s2", false)]), swapped.clone()));
        }
        let graph = TransitionSystem::build(&g.description.to_bcplus().unwrap(), &engine()).unwrap();
        let got: BTreeSet<Transition> = graph.outgoing(&start).cloned().collect();
        ensure!(got == want, "{mode}: {} transitions from the start state", got.len());
    }

    let switch = format!("{}/../../programs/switch", env!("CARGO_MANIFEST_DIR"));
    let (code, out) = run_cli(&["-l", "bc+", &switch, "query=test", "0"]);
    ensure!(code == 0, "bc+ run exited with {code}");
    ensure!(out == golden("switch_bcplus.txt"), "bc+ output differs from the golden listing:\n{out}");
    let (code, out) = run_cli(&["-l", "c+", &switch, "query=test", "0"]);
    ensure!(code == 0, "c+ run exited with {code}");
    let want = format!("{}\nSolution: 5\n{}", golden("switch_bcplus.txt"), golden("switch_cplus_extra.txt"));
    ensure!(out == want, "c+ output:\n{out}");
    Ok(())
}

fn simple_suite(seed: u64, check: impl Fn(&ActionDescription) -> Outcome) -> Outcome {
    let mut rng = StdRng::seed_from_u64(seed);
    let bounds = SuiteBounds::default();
    for i in 0..200 {
        let d = random_simple_description(&mut rng, &bounds);
        ensure!(classify(&d).simple, "description {i} is not simple");
        check(&d).map_err(|e| format!("description {i}: {e}\n{d:?}"))?;
    }
    Ok(())
}

fn endpoints_are_states() -> Outcome {
    simple_suite(101, |d| {
        let graph = TransitionSystem::build(d, &engine()).map_err(|e| e.to_string())?;
        for t in &graph.transitions {
            ensure!(
                graph.states.contains(&t.from) && graph.states.contains(&t.to),
                "transition {t} leaves the states"
            );
        }
        Ok(())
    })
}

fn paths_are_chains() -> Outcome {
    simple_suite(101, |d| {
        let ts = transitions(d, &engine()).map_err(|e| e.to_string())?;
        for m in [2, 3] {
            let ps = paths(d, m, &engine()).map_err(|e| e.to_string())?;
            let chains: BTreeSet<Vec<Transition>> = ps.iter().map(|p| p.transitions()).collect();
            ensure!(chains.len() == ps.len(), "m={m}: two paths share a chain");
            ensure!(chains == compose_chains(&ts, m), "m={m}: paths differ from composed chains");
        }
        Ok(())
    })
}

fn formulas_as_fluents() -> Outcome {
    let mut rng = StdRng::seed_from_u64(103);
    for i in 0..200 {
        let atoms = propositions(rng.gen_range(1..=5));
        let f = random_formula(&mut rng, &atoms, 4);
        let universe: BTreeSet<Symbol> = atoms.iter().cloned().collect();
        let want: BTreeSet<Valuation> = oracle_stable_models(&f, &atoms, None)
            .into_iter()
            .map(|x| interpretation_to_state(&Interpretation(x), &universe))
            .collect();
        let d = pf2bcp(&f, atoms.iter().cloned()).map_err(|e| e.to_string())?;
        let got = states(&d, &engine()).map_err(|e| e.to_string())?;
        ensure!(got == want, "formula {i}: {f}");
    }
    Ok(())
}

fn embeddings() -> Outcome {
    let mut rng = StdRng::seed_from_u64(104);
    let bounds = SuiteBounds::default();
    for i in 0..100 {
        let d = random_bc_description(&mut rng, &bounds);
        let native = TransitionSystem::build(&d, &engine()).map_err(|e| e.to_string())?;
        let embedded = TransitionSystem::build(&bc2bcp(&d), &engine()).map_err(|e| e.to_string())?;
        ensure!(native == embedded, "BC description {i}: {d:?}");
    }
    for i in 0..100 {
        let d = random_cplus_description(&mut rng, &bounds);
        let native = TransitionSystem::build(&d, &engine()).map_err(|e| e.to_string())?;
        let embedded = TransitionSystem::build(&cp2bcp(&d).map_err(|e| e.to_string())?, &engine())
            .map_err(|e| e.to_string())?;
        ensure!(native == embedded, "C+ description {i}: {d:?}");
    }
    Ok(())
}

const THREE_BLOCKS: &str = "
:- sorts location >> block.
:- objects b(1..3) :: block; table :: location.
:- constants loc(block) :: inertialFluent(location); in_tower(block) :: sdFluent;
             move(block) :: exogenousAction; dest(block) :: attribute(location*) of move(block).
:- variables B, B1 :: block; L :: location.
constraint -(loc(B)=B).
caused in_tower(B) if loc(B)=table.
caused in_tower(B) if loc(B)=B1 & in_tower(B1).
default ~in_tower(B).
constraint in_tower(B).
constraint {B1| loc(B1)=B}1.
move(B) causes loc(B)=L if dest(B)=L.
nonexecutable move(B) if loc(B1)=B.
:- query label :: goal;
   0: loc(b(1))=table & loc(b(2))=table & loc(b(3))=table;
   maxstep: loc(b(1))=b(3).
";

fn plan(src: &str, bindings: &[(&str, i64)], label: &str, horizon: usize) -> Outcome {
    let opts = GroundOptions {
        bindings: bindings.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>(),
        ..GroundOptions::default()
    };
    let g = load(src, Mode::BcPlus, &opts).map_err(|d| d.to_string())?;
    let Description::BcPlus(d) = &g.description else {
        return Err("not a BC+ description".into());
    };
    ensure!(classify(d).simple, "grounded description is not simple");
    let q = g.query(label).ok_or("query missing")?;
    let opts = SolveOptions {
        limit: 0,
        ..SolveOptions::default()
    };
    let QueryOutcome::Found { horizon: m, solutions } = solve(d, q, &opts).map_err(|e| e.to_string())? else {
        return Err("no plan found".into());
    };
    ensure!(m == horizon, "least horizon {m}, expected {horizon}");
    for (i, sol) in solutions.iter().enumerate() {
        for t in sol.transitions() {
            ensure!(is_transition(d, &t).map_err(|e| e.to_string())?, "solution {i}: {t} is not a transition");
        }
    }
    Ok(())
}

fn blocks_world() -> Outcome {
    plan(&program("blocks4.bcp"), &[("k", 2), ("g", 1)], "stack", 2)?;
    plan(THREE_BLOCKS, &[], "goal", 1)
}

fn engine_laws() -> Outcome {
    let mut rng = StdRng::seed_from_u64(111);
    for i in 0..1000 {
        let atoms: Vec<u8> = (0..rng.gen_range(1..=8)).collect();
        let f = random_formula(&mut rng, &atoms, 4);
        let x = random_subset(&mut rng, &atoms).into_atoms();
        let reduct = f.reduct(&x);
        ensure!(reduct.reduct(&x) == reduct, "pair {i}: reduct is not idempotent for {f}");
        let i_x = Interpretation(x.clone());
        ensure!(i_x.satisfies(&reduct) == i_x.satisfies(&f), "pair {i}: X |= F^X differs from X |= F for {f}");

        let g = random_positive_formula(&mut rng, &atoms, 4);
        let got: BTreeSet<BTreeSet<u8>> = engine()
            .stable_models(&StableQuery::new(&g, atoms.iter().copied()))
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(Interpretation::into_atoms)
            .collect();
        ensure!(got == minimal_models(&g, &atoms), "pair {i}: stable and minimal models differ for {g}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("stable models of a choice under uniqueness and existence", choice_with_existence),
        ("existence without double negation", no_double_negation),
        ("cardinality expansion", cardinality),
        ("SD states, transitions and paths", sd_criterion),
        ("two switches in bc+ and c+, golden output", two_switches),
        ("transition endpoints are states", endpoints_are_states),
        ("paths are composed transitions", paths_are_chains),
        ("formulas as statically determined fluents", formulas_as_fluents),
        ("BC and C+ embeddings", embeddings),
        ("blocks world plans", blocks_world),
        ("engine laws", engine_laws),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("criterion {:>2}: PASS  {name} ({secs:.1}s)", n + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name} ({secs:.1}s): {e}", n + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
