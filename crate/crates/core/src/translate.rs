//! The timed propositional theory `PF_m(D)`.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use crate::action::{ActionDescription, LawForm};
use crate::error::Result;
use crate::formula::{expand_cardinality, Formula};
use crate::signature::{Atom, ConstantKind, Signature};
use crate::symbol::Symbol;

/// An atom `i:c=v`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimedAtom {
    pub step: usize,
    pub atom: Atom,
}

impl TimedAtom {
    pub fn new(step: usize, atom: Atom) -> Self {
        TimedAtom { step, atom }
    }
}

impl fmt::Display for TimedAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.step, self.atom)
    }
}

impl fmt::Debug for TimedAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `i:F`: prefixes every atom of `f` with step `i`.
pub fn timestamp(f: &Formula<Atom>, i: usize) -> Formula<TimedAtom> {
    f.map_atoms(&|a| TimedAtom::new(i, a.clone()))
}

/// `σ_m`: fluent atoms at steps `0..=m`, action atoms at steps `0..m`.
pub fn timed_signature(sig: &Signature, m: usize) -> BTreeSet<TimedAtom> {
    let mut out = BTreeSet::new();
    for decl in sig.constants() {
        let last = if decl.kind.is_fluent() { m + 1 } else { m };
        for i in 0..last {
            out.extend(decl.atoms().map(|a| TimedAtom::new(i, a)));
        }
    }
    out
}

/// Where a conjunct of a timed theory comes from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Origin {
    Law { index: usize },
    InitialChoice { atom: Atom },
    Uniqueness { constant: Symbol },
    /// `i:(a=t ∨ a=f)` in the BC reference translation.
    ActionExistence { constant: Symbol },
    Query,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Law { index } => write!(f, "law {index}"),
            Origin::InitialChoice { atom } => write!(f, "initial choice {atom}"),
            Origin::Uniqueness { constant } => write!(f, "uniqueness and existence of {constant}"),
            Origin::ActionExistence { constant } => write!(f, "action {constant} has a value"),
            Origin::Query => f.write_str("query"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conjunct {
    pub formula: Formula<TimedAtom>,
    pub origin: Origin,
    /// The least horizon whose theory contains this conjunct.
    pub step: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedTheory {
    pub horizon: usize,
    pub conjuncts: Vec<Conjunct>,
}

impl TimedTheory {
    pub fn new(horizon: usize) -> Self {
        TimedTheory {
            horizon,
            conjuncts: Vec::new(),
        }
    }

    pub fn push(&mut self, formula: Formula<TimedAtom>, origin: Origin, step: usize) {
        self.conjuncts.push(Conjunct {
            formula,
            origin,
            step,
        });
    }

    pub fn formula(&self) -> Formula<TimedAtom> {
        Formula::conj(self.conjuncts.iter().map(|c| c.formula.clone()))
    }

    /// The conjuncts that belong to the theory at horizon `k ≤ horizon`.
    pub fn restrict(&self, k: usize) -> TimedTheory {
        TimedTheory {
            horizon: k.min(self.horizon),
            conjuncts: self
                .conjuncts
                .iter()
                .filter(|c| c.step <= k)
                .cloned()
                .collect(),
        }
    }

    pub fn conjuncts_from<'a>(&'a self, origin: &'a Origin) -> impl Iterator<Item = &'a Conjunct> + 'a {
        self.conjuncts.iter().filter(move |c| c.origin == *origin)
    }

    /// One conjunct per line, each followed by a `%` comment naming its origin.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for c in &self.conjuncts {
            let _ = writeln!(out, "{}.  % {}", c.formula, c.origin);
        }
        out
    }
}

/// Anything with a timed translation: BC+ descriptions and the reference
/// translations of BC and C+.
pub trait Translation {
    fn signature(&self) -> &Signature;
    fn translate(&self, m: usize) -> Result<TimedTheory>;
}

/// `G ← F`, written as plain `G` when `F` is `⊤`.
pub(crate) fn rule<A>(head: Formula<A>, body: Formula<A>) -> Formula<A> {
    if body.is_top() {
        head
    } else {
        Formula::rule(head, body)
    }
}

/// `{0:c=v}^ch` for every regular fluent, then `UEC_{σ_m}` step by step.
pub(crate) fn push_boilerplate(theory: &mut TimedTheory, sig: &Signature) {
    for decl in sig.fluents() {
        if decl.kind == ConstantKind::RegularFluent {
            for a in decl.atoms() {
                theory.push(
                    Formula::choice(Formula::Atom(TimedAtom::new(0, a.clone()))),
                    Origin::InitialChoice { atom: a },
                    0,
                );
            }
        }
    }
    push_uec(theory, sig);
}

/// `⊥ ← ¬(1 ≤ {i:c=v1, …, i:c=vk} ≤ 1)` for every constant and step.
pub fn push_uec(theory: &mut TimedTheory, sig: &Signature) {
    let m = theory.horizon;
    for i in 0..=m {
        for decl in sig.constants() {
            let step = if decl.kind.is_fluent() { i } else { i + 1 };
            if step > m {
                continue;
            }
            let atoms: Vec<TimedAtom> = decl.atoms().map(|a| TimedAtom::new(i, a)).collect();
            let exactly_one = expand_cardinality(Some(1), &atoms, Some(1));
            theory.push(
                Formula::rule(Formula::falsity(), Formula::not(exactly_one)),
                Origin::Uniqueness {
                    constant: decl.name.clone(),
                },
                step,
            );
        }
    }
}

/// `i:F ∧ j:G`, dropping `⊤` operands.
pub(crate) fn timed_and(f: Formula<TimedAtom>, g: Formula<TimedAtom>) -> Formula<TimedAtom> {
    crate::action::and_simplified(f, g)
}

impl Translation for ActionDescription {
    fn signature(&self) -> &Signature {
        &self.signature
    }

    fn translate(&self, m: usize) -> Result<TimedTheory> {
        let mut theory = TimedTheory::new(m);
        for (index, law) in self.laws.iter().enumerate() {
            let origin = Origin::Law { index };
            match law.form {
                LawForm::Static => {
                    for i in 0..=m {
                        let f = rule(timestamp(&law.head, i), timestamp(&law.if_part, i));
                        theory.push(f, origin.clone(), i);
                    }
                }
                LawForm::ActionDynamic => {
                    for i in 0..m {
                        let f = rule(timestamp(&law.head, i), timestamp(&law.if_part, i));
                        theory.push(f, origin.clone(), i + 1);
                    }
                }
                LawForm::FluentDynamic => {
                    let after = law.after.as_ref().expect("fluent dynamic law has an after part");
                    for i in 0..m {
                        let body = timed_and(timestamp(&law.if_part, i + 1), timestamp(after, i));
                        theory.push(rule(timestamp(&law.head, i + 1), body), origin.clone(), i + 1);
                    }
                }
            }
        }
        push_boilerplate(&mut theory, &self.signature);
        Ok(theory)
    }
}

/// `PF_m(D)`.
pub fn translate(d: &ActionDescription, m: usize) -> TimedTheory {
    Translation::translate(d, m).expect("BC+ translation is total")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{Abbreviation, CausalLaw};
    use crate::formula::Interpretation;

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

    fn t(i: usize, c: &str, v: &str) -> Formula<TimedAtom> {
        Formula::Atom(TimedAtom::new(i, Atom::new(c, v)))
    }

    #[test]
    fn timestamps() {
        let a = Formula::Atom(Atom::truth("a"));
        assert_eq!(timestamp(&a, 0), t(0, "a", "t"));
        assert_eq!(timestamp(&Formula::<Atom>::falsity(), 3), Formula::falsity());
        let pq = Formula::and(
            Formula::Atom(Atom::truth("p")),
            Formula::not(Formula::Atom(Atom::truth("q"))),
        );
        assert_eq!(
            timestamp(&pq, 2),
            Formula::and(t(2, "p", "t"), Formula::not(t(2, "q", "t")))
        );
    }

    #[test]
    fn sd_translation_contains_listed_formulas() {
        let theory = translate(&sd(), 1);
        let got: Vec<_> = theory.conjuncts.iter().map(|c| c.formula.clone()).collect();
        let expected = [
            Formula::choice(t(0, "a", "t")),
            Formula::choice(t(0, "a", "f")),
            Formula::rule(Formula::choice(t(1, "p", "t")), t(0, "p", "t")),
            Formula::rule(Formula::choice(t(1, "p", "f")), t(0, "p", "f")),
            Formula::choice(t(0, "p", "t")),
            Formula::choice(t(0, "p", "f")),
            Formula::rule(t(1, "p", "t"), t(0, "a", "t")),
        ];
        for f in expected {
            assert!(got.contains(&f), "missing {f}");
        }
        let uec_p0 = Formula::rule(
            Formula::falsity(),
            Formula::not(expand_cardinality(
                Some(1),
                &[
                    TimedAtom::new(0, Atom::falsity("p")),
                    TimedAtom::new(0, Atom::truth("p")),
                ],
                Some(1),
            )),
        );
        assert!(got.contains(&uec_p0));
        let uec_count = theory
            .conjuncts
            .iter()
            .filter(|c| matches!(c.origin, Origin::Uniqueness { .. }))
            .count();
        // p at steps 0 and 1, a at step 0
        assert_eq!(uec_count, 3);
    }

    #[test]
    fn horizon_zero_has_no_actions() {
        let theory = translate(&sd(), 0);
        let atoms = theory.formula().atoms();
        assert!(atoms.iter().all(|a| a.atom.constant != Symbol::name("a")));
        assert!(atoms.iter().all(|a| a.step == 0));
    }

    #[test]
    fn restriction_is_a_prefix_translation() {
        let d = sd();
        let full = translate(&d, 3);
        for k in 0..=3 {
            assert_eq!(full.restrict(k), translate(&d, k));
        }
    }

    #[test]
    fn sd_fluents_get_no_initial_choice() {
        let sig = Signature::new()
            .with_boolean("nc", ConstantKind::StaticallyDeterminedFluent)
            .unwrap()
            .with_boolean("p", ConstantKind::RegularFluent)
            .unwrap();
        let d = ActionDescription::new(sig)
            .with(Abbreviation::Default {
                head: Formula::Atom(Atom::falsity("nc")),
                if_part: Formula::top(),
                after: None,
            })
            .unwrap();
        let theory = translate(&d, 1);
        let choice_nc = Formula::choice(t(0, "nc", "t"));
        assert!(!theory.conjuncts.iter().any(|c| c.formula == choice_nc));
        assert_eq!(
            theory
                .conjuncts
                .iter()
                .filter(|c| matches!(c.origin, Origin::InitialChoice { .. }))
                .count(),
            2
        );
    }

    #[test]
    fn timed_uec_models_are_total_functions() {
        let sig = Signature::new()
            .with("c", ConstantKind::RegularFluent, [1, 2, 3].map(Symbol::int))
            .unwrap();
        let mut theory = TimedTheory::new(1);
        push_uec(&mut theory, &sig);
        let f = theory.formula();
        let universe: Vec<TimedAtom> = timed_signature(&sig, 1).into_iter().collect();
        let mut models = 0;
        for bits in 0u32..(1 << universe.len()) {
            let x: Interpretation<TimedAtom> = universe
                .iter()
                .enumerate()
                .filter(|(k, _)| bits >> k & 1 == 1)
                .map(|(_, a)| a.clone())
                .collect();
            let total = (0..=1).all(|i| x.atoms().iter().filter(|a| a.step == i).count() == 1);
            assert_eq!(x.satisfies(&f), total);
            models += total as usize;
        }
        assert_eq!(models, 9);
    }

    #[test]
    fn dump_names_origins() {
        let dump = translate(&sd(), 1).dump();
        assert!(dump.lines().next().unwrap().ends_with("% law 0"));
        assert!(dump.contains("% initial choice p=t"));
    }
}
