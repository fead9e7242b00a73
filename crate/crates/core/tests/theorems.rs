use std::collections::BTreeSet;

use bcplus_core::action::{classify, Abbreviation, ActionDescription, CausalLaw};
use bcplus_core::formula::{uec_constant, Formula};
use bcplus_core::frontends::{bc2bcp, cp2bcp, interpretation_to_state, pf2bcp, CplusDescription};
use bcplus_core::signature::{Atom, ConstantKind, Signature};
use bcplus_core::stable::{stable_models, StableEngine, StableQuery};
use bcplus_core::suite::{
    compose_chains, oracle_is_stable, propositions, random_bc_description, random_cplus_description,
    random_formula, random_simple_description, total_valuations, SuiteBounds,
};
use bcplus_core::translate::{timed_signature, translate, TimedAtom};
use bcplus_core::transition::{paths, states, transitions, Transition, TransitionSystem, Valuation};
use bcplus_core::Symbol;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn engine() -> StableEngine {
    StableEngine::default()
}

fn sd() -> ActionDescription {
    let sig = Signature::new()
        .with_boolean("p", ConstantKind::RegularFluent)
        .unwrap()
        .with_boolean("a", ConstantKind::Action)
        .unwrap();
    let p = Formula::Atom(Atom::truth("p"));
    let np = Formula::Atom(Atom::falsity("p"));
    let a = Formula::Atom(Atom::truth("a"));
    let na = Formula::Atom(Atom::falsity("a"));
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

fn v(atoms: &[Atom]) -> Valuation {
    Valuation::new(atoms.iter().cloned())
}

/// Every triple of total valuations whose timed union is stable for `PF_1`,
/// checked against the reduct definition by subset enumeration.
fn brute_force_transitions(d: &ActionDescription) -> BTreeSet<Transition> {
    let pf1 = translate(d, 1).formula();
    let fluent_vals = total_valuations(d.signature.fluents());
    let action_vals = total_valuations(d.signature.actions());
    let mut out = BTreeSet::new();
    for s in &fluent_vals {
        for e in &action_vals {
            for s2 in &fluent_vals {
                let t = Transition::new(s.clone(), e.clone(), s2.clone());
                let x: BTreeSet<TimedAtom> = t.to_model().into_atoms();
                if oracle_is_stable(&pf1, &x, None) {
                    out.insert(t);
                }
            }
        }
    }
    out
}

#[test]
fn sd_states_transitions_and_paths() {
    let d = sd();
    let (p, np) = (Atom::truth("p"), Atom::falsity("p"));
    let (a, na) = (Atom::truth("a"), Atom::falsity("a"));
    assert_eq!(
        states(&d, &engine()).unwrap(),
        BTreeSet::from([v(&[p.clone()]), v(&[np.clone()])])
    );
    let ts = transitions(&d, &engine()).unwrap();
    assert!(ts.contains(&Transition::new(v(&[np.clone()]), v(&[na.clone()]), v(&[np.clone()]))));
    assert!(ts.contains(&Transition::new(v(&[np.clone()]), v(&[a.clone()]), v(&[p.clone()]))));
    assert_eq!(ts, brute_force_transitions(&d));
    assert_eq!(ts.len(), 4);

    let two = paths(&d, 2, &engine()).unwrap();
    let wanted: BTreeSet<TimedAtom> = [
        TimedAtom::new(0, np.clone()),
        TimedAtom::new(0, na),
        TimedAtom::new(1, np),
        TimedAtom::new(1, a),
        TimedAtom::new(2, p),
    ]
    .into();
    assert!(two.iter().any(|path| path.to_model().into_atoms() == wanted));
    assert_eq!(two.len(), compose_chains(&ts, 2).len());
    assert_eq!(two.len(), 8);
}

fn switch_signature() -> Signature {
    let status = ["off", "on"].map(Symbol::name);
    let mut sig = Signature::new();
    for s in ["s1", "s2"] {
        sig.declare(Symbol::app("st", [Symbol::name(s)]), ConstantKind::RegularFluent, status.clone())
            .unwrap();
    }
    for s in ["s1", "s2"] {
        sig.declare_boolean(Symbol::app("flip", [Symbol::name(s)]), ConstantKind::Action)
            .unwrap();
    }
    sig
}

fn st(s: &str, x: &str) -> Atom {
    Atom::new(Symbol::app("st", [Symbol::name(s)]), x)
}

fn flip(s: &str) -> Atom {
    Atom::truth(Symbol::app("flip", [Symbol::name(s)]))
}

fn switch_abbreviations() -> Vec<Abbreviation> {
    let mut out = Vec::new();
    for s in ["s1", "s2"] {
        for (x, y) in [("on", "off"), ("off", "on")] {
            out.push(Abbreviation::Causes {
                action: Formula::Atom(flip(s)),
                effect: Formula::Atom(st(s, x)),
                if_part: Formula::Atom(st(s, y)),
            });
        }
    }
    for s in ["s1", "s2"] {
        out.push(Abbreviation::Inertial(Symbol::app("st", [Symbol::name(s)])));
        out.push(Abbreviation::Exogenous(Symbol::app("flip", [Symbol::name(s)])));
    }
    out
}

fn indirect_effects() -> Vec<CausalLaw> {
    let mut out = Vec::new();
    for (s, other) in [("s1", "s2"), ("s2", "s1")] {
        for (x, y) in [("on", "off"), ("off", "on")] {
            out.push(CausalLaw::static_law(Formula::Atom(st(s, x)), Formula::Atom(st(other, y))));
        }
    }
    out
}

#[test]
fn two_switches_in_both_languages() {
    let mut bcp = ActionDescription::new(switch_signature());
    let mut cp = CplusDescription::new(switch_signature());
    for law in indirect_effects() {
        bcp.add_law(law.clone()).unwrap();
        cp.add_law(law).unwrap();
    }
    for ab in switch_abbreviations() {
        bcp.add(&ab).unwrap();
        cp.add(&ab).unwrap();
    }
    let start = v(&[st("s1", "off"), st("s2", "on")]);
    let swapped = v(&[st("s1", "on"), st("s2", "off")]);

    let graph = TransitionSystem::build(&bcp, &engine()).unwrap();
    assert_eq!(graph.states, BTreeSet::from([start.clone(), swapped.clone()]));
    let from_start: BTreeSet<Transition> = graph.outgoing(&start).cloned().collect();
    let no_flip = v(&[Atom::falsity(flip("s1").constant), Atom::falsity(flip("s2").constant)]);
    let expected: BTreeSet<Transition> = [
        Transition::new(start.clone(), no_flip.clone(), start.clone()),
        Transition::new(start.clone(), v(&[flip("s1"), Atom::falsity(flip("s2").constant)]), swapped.clone()),
        Transition::new(start.clone(), v(&[Atom::falsity(flip("s1").constant), flip("s2")]), swapped.clone()),
        Transition::new(start.clone(), v(&[flip("s1"), flip("s2")]), swapped.clone()),
    ]
    .into();
    assert_eq!(from_start, expected);

    let cplus_graph = TransitionSystem::build(&cp, &engine()).unwrap();
    let from_start_cplus: BTreeSet<Transition> = cplus_graph.outgoing(&start).cloned().collect();
    let mut expected_cplus = expected;
    expected_cplus.insert(Transition::new(start.clone(), no_flip, swapped));
    assert_eq!(from_start_cplus, expected_cplus);
    assert_eq!(
        TransitionSystem::build(&cp2bcp(&cp).unwrap(), &engine()).unwrap(),
        cplus_graph
    );
}

fn example_one(double_negation: bool) -> Vec<BTreeSet<Atom>> {
    let sig = Signature::new()
        .with("c", ConstantKind::RegularFluent, [1, 2, 3].map(Symbol::int))
        .unwrap();
    let mut uec = uec_constant(sig.get(&"c".into()).unwrap());
    if !double_negation {
        let last = uec.pop().unwrap();
        uec.push(last.negated().and_then(Formula::negated).unwrap().clone());
    }
    let f1 = Formula::and(Formula::choice(Formula::Atom(Atom::new("c", 1))), Formula::conj(uec));
    stable_models(&StableQuery::new(&f1, sig.atoms()))
        .unwrap()
        .into_iter()
        .map(|m| m.into_atoms())
        .collect()
}

#[test]
fn double_negation_in_existence_matters() {
    assert_eq!(example_one(true), vec![BTreeSet::from([Atom::new("c", 1)])]);
    let without: BTreeSet<BTreeSet<Atom>> = example_one(false).into_iter().collect();
    let singletons: BTreeSet<BTreeSet<Atom>> =
        (1..=3).map(|v| BTreeSet::from([Atom::new("c", v)])).collect();
    assert_eq!(without, singletons);
}

#[test]
fn transitions_connect_states_and_paths_compose() {
    let mut rng = StdRng::seed_from_u64(1);
    let bounds = SuiteBounds::default();
    for _ in 0..40 {
        let d = random_simple_description(&mut rng, &bounds);
        assert!(classify(&d).simple);
        let graph = TransitionSystem::build(&d, &engine()).unwrap();
        for t in &graph.transitions {
            assert!(graph.states.contains(&t.from) && graph.states.contains(&t.to), "{d:?}");
        }
        for m in [2, 3] {
            let got: BTreeSet<Vec<Transition>> = paths(&d, m, &engine())
                .unwrap()
                .into_iter()
                .map(|p| p.transitions())
                .collect();
            assert_eq!(got, compose_chains(&graph.transitions, m), "{d:?} m={m}");
        }
    }
}

#[test]
fn transitions_match_brute_force_on_random_descriptions() {
    let mut rng = StdRng::seed_from_u64(2);
    let bounds = SuiteBounds {
        max_constants: 2,
        ..SuiteBounds::default()
    };
    for _ in 0..25 {
        let d = random_simple_description(&mut rng, &bounds);
        if timed_signature(&d.signature, 1).len() > 14 {
            continue;
        }
        assert_eq!(transitions(&d, &engine()).unwrap(), brute_force_transitions(&d), "{d:?}");
    }
}

#[test]
fn formulas_embed_as_statically_determined_fluents() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..60 {
        let atoms = propositions(rand::Rng::gen_range(&mut rng, 1..=5));
        let f = random_formula(&mut rng, &atoms, 4);
        let universe: BTreeSet<Symbol> = atoms.iter().cloned().collect();
        let d = pf2bcp(&f, atoms.iter().cloned()).unwrap();
        let want: BTreeSet<Valuation> = stable_models(&StableQuery::new(&f, atoms.iter().cloned()))
            .unwrap()
            .iter()
            .map(|i| interpretation_to_state(i, &universe))
            .collect();
        assert_eq!(states(&d, &engine()).unwrap(), want, "{f}");
    }
}

#[test]
fn bc_and_cplus_embeddings_preserve_transition_systems() {
    let mut rng = StdRng::seed_from_u64(4);
    let bounds = SuiteBounds::default();
    for _ in 0..30 {
        let d = random_bc_description(&mut rng, &bounds);
        assert_eq!(
            TransitionSystem::build(&d, &engine()).unwrap(),
            TransitionSystem::build(&bc2bcp(&d), &engine()).unwrap(),
            "{d:?}"
        );
        let c = random_cplus_description(&mut rng, &bounds);
        assert_eq!(
            TransitionSystem::build(&c, &engine()).unwrap(),
            TransitionSystem::build(&cp2bcp(&c).unwrap(), &engine()).unwrap(),
            "{c:?}"
        );
    }
}
