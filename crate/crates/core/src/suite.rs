//! Test support: random formulas and descriptions, and brute-force oracles
//! that do not share code with the search engine.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::action::{Abbreviation, ActionDescription, CausalLaw};
use crate::formula::{expand_cardinality, Formula, Interpretation};
use crate::frontends::{BcDescription, BcLaw, CplusDescription};
use crate::signature::{Atom, ConstantDecl, ConstantKind, Signature};
use crate::symbol::Symbol;
use crate::transition::{Transition, Valuation};

/// A random formula of depth at most `depth` over `atoms`.
pub fn random_formula<A: Clone, R: Rng + ?Sized>(rng: &mut R, atoms: &[A], depth: usize) -> Formula<A> {
    if depth == 0 || rng.gen_bool(0.25) {
        return if atoms.is_empty() || rng.gen_bool(0.08) {
            Formula::falsity()
        } else {
            Formula::Atom(atoms.choose(rng).expect("nonempty").clone())
        };
    }
    let sub = |rng: &mut R| random_formula(rng, atoms, depth - 1);
    match rng.gen_range(0..4) {
        0 => Formula::and(sub(rng), sub(rng)),
        1 => Formula::or(sub(rng), sub(rng)),
        2 => Formula::implies(sub(rng), sub(rng)),
        _ => Formula::not(sub(rng)),
    }
}

/// A formula built from `⊥`, atoms, `∧` and `∨` only.
pub fn random_positive_formula<A: Clone, R: Rng + ?Sized>(rng: &mut R, atoms: &[A], depth: usize) -> Formula<A> {
    if depth == 0 || rng.gen_bool(0.25) {
        return if atoms.is_empty() || rng.gen_bool(0.05) {
            Formula::falsity()
        } else {
            Formula::Atom(atoms.choose(rng).expect("nonempty").clone())
        };
    }
    let l = random_positive_formula(rng, atoms, depth - 1);
    let r = random_positive_formula(rng, atoms, depth - 1);
    if rng.gen_bool(0.5) {
        Formula::and(l, r)
    } else {
        Formula::or(l, r)
    }
}

pub fn random_subset<A: Ord + Clone, R: Rng + ?Sized>(rng: &mut R, atoms: &[A]) -> Interpretation<A> {
    atoms.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
}

/// `p0, p1, …` as symbols.
pub fn propositions(n: usize) -> Vec<Symbol> {
    (0..n).map(|i| Symbol::name(&format!("p{i}"))).collect()
}

fn subsets<A: Ord + Clone>(atoms: &[A]) -> impl Iterator<Item = BTreeSet<A>> + '_ {
    assert!(atoms.len() < 24, "subset enumeration over {} atoms", atoms.len());
    (0u32..(1 << atoms.len())).map(move |bits| {
        atoms
            .iter()
            .enumerate()
            .filter(|(k, _)| bits >> k & 1 == 1)
            .map(|(_, a)| a.clone())
            .collect()
    })
}

/// Stable-model test straight from the definition: `x ⊨ F` and no proper
/// subset of `x` that agrees with it outside `p` satisfies `F^x`.
pub fn oracle_is_stable<A: Ord + Clone>(f: &Formula<A>, x: &BTreeSet<A>, p: Option<&BTreeSet<A>>) -> bool {
    let holds = |set: &BTreeSet<A>, g: &Formula<A>| g.eval(&|a| set.contains(a));
    if !holds(x, f) {
        return false;
    }
    let reduct = f.reduct(x);
    let (inside, outside): (Vec<A>, Vec<A>) = x
        .iter()
        .cloned()
        .partition(|a| p.map_or(true, |p| p.contains(a)));
    let no_smaller = subsets(&inside).all(|sub| {
        if sub.len() == inside.len() {
            return true;
        }
        let mut j: BTreeSet<A> = sub;
        j.extend(outside.iter().cloned());
        !holds(&j, &reduct)
    });
    no_smaller
}

/// All stable models over `universe`, by exhaustive enumeration.
pub fn oracle_stable_models<A: Ord + Clone>(
    f: &Formula<A>,
    universe: &[A],
    p: Option<&BTreeSet<A>>,
) -> BTreeSet<BTreeSet<A>> {
    subsets(universe).filter(|x| oracle_is_stable(f, x, p)).collect()
}

/// Satisfaction in the logic of here-and-there, `(h, t)` with `h ⊆ t`.
pub fn ht_satisfies<A: Ord>(f: &Formula<A>, h: &BTreeSet<A>, t: &BTreeSet<A>) -> bool {
    match f {
        Formula::False => false,
        Formula::Atom(a) => h.contains(a),
        Formula::And(l, r) => ht_satisfies(l, h, t) && ht_satisfies(r, h, t),
        Formula::Or(l, r) => ht_satisfies(l, h, t) || ht_satisfies(r, h, t),
        Formula::Implies(l, r) => {
            f.eval(&|a| t.contains(a)) && (!ht_satisfies(l, h, t) || ht_satisfies(r, h, t))
        }
    }
}

/// Equilibrium models: `(t, t) ⊨ F` and no `(h, t)` with `h ⊊ t` satisfies `F`.
pub fn equilibrium_models<A: Ord + Clone>(f: &Formula<A>, universe: &[A]) -> BTreeSet<BTreeSet<A>> {
    subsets(universe)
        .filter(|t| {
            ht_satisfies(f, t, t) && {
                let t_vec: Vec<A> = t.iter().cloned().collect();
                let minimal = subsets(&t_vec).all(|h| h.len() == t.len() || !ht_satisfies(f, &h, t));
                minimal
            }
        })
        .collect()
}

/// Minimal classical models over `universe`.
pub fn minimal_models<A: Ord + Clone>(f: &Formula<A>, universe: &[A]) -> BTreeSet<BTreeSet<A>> {
    let models: Vec<BTreeSet<A>> = subsets(universe)
        .filter(|x| f.eval(&|a| x.contains(a)))
        .collect();
    models
        .iter()
        .filter(|x| !models.iter().any(|y| y.len() < x.len() && y.is_subset(x)))
        .cloned()
        .collect()
}

/// Every valuation assigning exactly one value to each constant.
pub fn total_valuations<'a>(constants: impl IntoIterator<Item = &'a ConstantDecl>) -> Vec<Valuation> {
    let mut out = vec![Valuation::default()];
    for decl in constants {
        out = out
            .into_iter()
            .flat_map(|v| {
                decl.atoms().map(move |a| {
                    let mut v = v.clone();
                    v.0.insert(a);
                    v
                })
            })
            .collect();
    }
    out
}

/// Sequences of `m` transitions in which each ends where the next begins.
pub fn compose_chains(transitions: &BTreeSet<Transition>, m: usize) -> BTreeSet<Vec<Transition>> {
    let mut by_source: BTreeMap<&Valuation, Vec<&Transition>> = BTreeMap::new();
    for t in transitions {
        by_source.entry(&t.from).or_default().push(t);
    }
    let mut chains: Vec<Vec<Transition>> = if m == 0 {
        vec![Vec::new()]
    } else {
        transitions.iter().map(|t| vec![t.clone()]).collect()
    };
    for _ in 1..m {
        chains = chains
            .into_iter()
            .flat_map(|chain| {
                let last = chain.last().expect("nonempty chain").to.clone();
                by_source
                    .get(&last)
                    .into_iter()
                    .flatten()
                    .map(move |t| {
                        let mut c = chain.clone();
                        c.push((*t).clone());
                        c
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    chains.into_iter().collect()
}

/// Bounds for the random description generators.
#[derive(Debug, Clone, Copy)]
pub struct SuiteBounds {
    pub max_constants: usize,
    pub max_domain: usize,
    pub max_laws: usize,
}

impl Default for SuiteBounds {
    fn default() -> Self {
        SuiteBounds {
            max_constants: 3,
            max_domain: 3,
            max_laws: 6,
        }
    }
}

fn random_signature<R: Rng + ?Sized>(rng: &mut R, bounds: &SuiteBounds, boolean_actions: bool) -> Signature {
    let n = rng.gen_range(1..=bounds.max_constants);
    let mut sig = Signature::new();
    for i in 0..n {
        let kind = match (i, rng.gen_range(0..20)) {
            (0, _) | (_, 0..=6) => ConstantKind::RegularFluent,
            (_, 7..=10) => ConstantKind::StaticallyDeterminedFluent,
            _ => ConstantKind::Action,
        };
        let size = if boolean_actions && kind == ConstantKind::Action {
            2
        } else {
            rng.gen_range(2..=bounds.max_domain)
        };
        let name = match kind {
            ConstantKind::Action => format!("a{i}"),
            ConstantKind::RegularFluent => format!("f{i}"),
            ConstantKind::StaticallyDeterminedFluent => format!("d{i}"),
        };
        if size == 2 {
            sig.declare_boolean(name.as_str(), kind).expect("fresh name");
        } else {
            let domain = (0..size).map(|v| Symbol::name(&format!("v{v}")));
            sig.declare(name.as_str(), kind, domain).expect("fresh name");
        }
    }
    sig
}

fn atoms_where(sig: &Signature, pred: impl Fn(ConstantKind) -> bool) -> Vec<Atom> {
    sig.constants()
        .filter(|d| pred(d.kind))
        .flat_map(|d| d.atoms())
        .collect()
}

fn literal<R: Rng + ?Sized>(rng: &mut R, atoms: &[Atom]) -> Formula<Atom> {
    let a = Formula::Atom(atoms.choose(rng).expect("nonempty").clone());
    match rng.gen_range(0..6) {
        0 | 1 => Formula::not(a),
        2 => Formula::not(Formula::not(a)),
        _ => a,
    }
}

/// A conjunction of literals and occasional count aggregates.
fn simple_body<R: Rng + ?Sized>(rng: &mut R, atoms: &[Atom]) -> Formula<Atom> {
    if atoms.is_empty() {
        return Formula::top();
    }
    let n = rng.gen_range(0..=2);
    Formula::conj((0..n).map(|_| {
        if rng.gen_bool(0.15) {
            let k = rng.gen_range(2..=atoms.len().min(3));
            let chosen: Vec<Atom> = atoms.choose_multiple(rng, k).cloned().collect();
            let agg = expand_cardinality(Some(1), &chosen, None);
            if rng.gen_bool(0.5) {
                Formula::not(agg)
            } else {
                agg
            }
        } else {
            literal(rng, atoms)
        }
    }))
}

fn simple_head<R: Rng + ?Sized>(rng: &mut R, atoms: &[Atom]) -> Formula<Atom> {
    if atoms.is_empty() || rng.gen_bool(0.15) {
        return Formula::falsity();
    }
    let a = Formula::Atom(atoms.choose(rng).expect("nonempty").clone());
    if rng.gen_bool(0.5) {
        Formula::choice(a)
    } else {
        a
    }
}

/// A random simple BC+ description.
pub fn random_simple_description<R: Rng + ?Sized>(rng: &mut R, bounds: &SuiteBounds) -> ActionDescription {
    let sig = random_signature(rng, bounds, false);
    let fluents = atoms_where(&sig, ConstantKind::is_fluent);
    let regular = atoms_where(&sig, |k| k == ConstantKind::RegularFluent);
    let actions = atoms_where(&sig, |k| k == ConstantKind::Action);
    let all: Vec<Atom> = sig.atoms().collect();
    let mut d = ActionDescription::new(sig.clone());
    let target = rng.gen_range(0..=bounds.max_laws);
    let mut guard = 0;
    while d.laws.len() < target && guard < 50 {
        guard += 1;
        let room = target - d.laws.len();
        let candidate: Vec<CausalLaw> = match rng.gen_range(0..5) {
            0 => {
                let c = sig.constants().filter(|c| c.kind == ConstantKind::RegularFluent).collect::<Vec<_>>();
                match c.choose(rng) {
                    Some(c) => Abbreviation::Inertial(c.name.clone()).expand(&sig).expect("regular"),
                    None => continue,
                }
            }
            1 => {
                let c = sig.actions().collect::<Vec<_>>();
                match c.choose(rng) {
                    Some(c) => Abbreviation::Exogenous(c.name.clone()).expand(&sig).expect("action"),
                    None => continue,
                }
            }
            2 => vec![CausalLaw::static_law(simple_head(rng, &fluents), simple_body(rng, &fluents))],
            3 if !actions.is_empty() => {
                let head = Formula::choice(Formula::Atom(actions.choose(rng).expect("nonempty").clone()));
                let head = if rng.gen_bool(0.5) { head } else { simple_head(rng, &actions) };
                if head.is_false() {
                    continue;
                }
                vec![CausalLaw::action_dynamic(head, simple_body(rng, &all))]
            }
            _ => vec![CausalLaw::fluent_dynamic(
                simple_head(rng, &regular),
                simple_body(rng, &fluents),
                simple_body(rng, &all),
            )],
        };
        if candidate.len() > room {
            continue;
        }
        for law in candidate {
            d.add_law(law).expect("generated laws are well formed");
        }
    }
    d
}

/// A random BC description with Boolean actions.
pub fn random_bc_description<R: Rng + ?Sized>(rng: &mut R, bounds: &SuiteBounds) -> BcDescription {
    let sig = random_signature(rng, bounds, true);
    let fluents = atoms_where(&sig, ConstantKind::is_fluent);
    let regular = atoms_where(&sig, |k| k == ConstantKind::RegularFluent);
    let action_true: Vec<Atom> = sig.actions().map(|a| Atom::truth(a.name.clone())).collect();
    let mut d = BcDescription::new(sig).expect("Boolean actions");
    let pick = |rng: &mut R, atoms: &[Atom], max: usize| -> Vec<Atom> {
        let n = rng.gen_range(0..=max.min(atoms.len()));
        (0..n).map(|_| atoms.choose(rng).expect("nonempty").clone()).collect()
    };
    for _ in 0..rng.gen_range(0..=bounds.max_laws) {
        let law = if rng.gen_bool(0.4) || regular.is_empty() {
            let head = fluents.choose(rng).expect("a fluent").clone();
            BcLaw::static_law(head, pick(rng, &fluents, 2), pick(rng, &fluents, 2))
        } else {
            let head = regular.choose(rng).expect("a regular fluent").clone();
            let mut body_atoms = fluents.clone();
            body_atoms.extend(action_true.iter().cloned());
            // inertia-shaped laws are common in practice
            if rng.gen_bool(0.3) {
                BcLaw::dynamic(head.clone(), [head.clone()], [head])
            } else {
                BcLaw::dynamic(head, pick(rng, &body_atoms, 2), pick(rng, &fluents, 2))
            }
        };
        d.add_law(law).expect("generated laws are well formed");
    }
    d
}

fn small_formula<R: Rng + ?Sized>(rng: &mut R, atoms: &[Atom]) -> Formula<Atom> {
    if atoms.is_empty() || rng.gen_bool(0.3) {
        return Formula::top();
    }
    let f = random_formula(rng, atoms, 2);
    if f.is_false() {
        Formula::top()
    } else {
        f
    }
}

/// A random definite C+ description.
pub fn random_cplus_description<R: Rng + ?Sized>(rng: &mut R, bounds: &SuiteBounds) -> CplusDescription {
    let sig = random_signature(rng, bounds, false);
    let fluents = atoms_where(&sig, ConstantKind::is_fluent);
    let regular = atoms_where(&sig, |k| k == ConstantKind::RegularFluent);
    let actions = atoms_where(&sig, |k| k == ConstantKind::Action);
    let all: Vec<Atom> = sig.atoms().collect();
    let mut d = CplusDescription::new(sig.clone());
    let head = |rng: &mut R, atoms: &[Atom]| -> Formula<Atom> {
        if atoms.is_empty() || rng.gen_bool(0.15) {
            Formula::falsity()
        } else {
            Formula::Atom(atoms.choose(rng).expect("nonempty").clone())
        }
    };
    let target = rng.gen_range(0..=bounds.max_laws);
    let mut guard = 0;
    while d.laws.len() < target && guard < 50 {
        guard += 1;
        let room = target - d.laws.len();
        let before = d.laws.len();
        match rng.gen_range(0..5) {
            0 => {
                let c: Vec<Symbol> = sig
                    .constants()
                    .filter(|c| c.kind == ConstantKind::RegularFluent && c.domain.len() <= room)
                    .map(|c| c.name.clone())
                    .collect();
                if let Some(c) = c.choose(rng) {
                    d.add(&Abbreviation::Inertial(c.clone())).expect("regular");
                }
            }
            1 => {
                let c: Vec<Symbol> = sig
                    .actions()
                    .filter(|c| c.domain.len() <= room)
                    .map(|c| c.name.clone())
                    .collect();
                if let Some(c) = c.choose(rng) {
                    d.add(&Abbreviation::Exogenous(c.clone())).expect("action");
                }
            }
            2 => d
                .add_law(CausalLaw::static_law(head(rng, &fluents), small_formula(rng, &fluents)))
                .expect("well formed"),
            3 if !actions.is_empty() => {
                let h = Formula::Atom(actions.choose(rng).expect("nonempty").clone());
                d.add_law(CausalLaw::action_dynamic(h, small_formula(rng, &all)))
                    .expect("well formed")
            }
            _ => d
                .add_law(CausalLaw::fluent_dynamic(
                    head(rng, &regular),
                    small_formula(rng, &fluents),
                    small_formula(rng, &all),
                ))
                .expect("well formed"),
        }
        debug_assert!(d.laws.len() >= before);
    }
    d
}
