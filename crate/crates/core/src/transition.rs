//! States, transitions and paths of the transition system `T(D)`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use crate::error::Result;
use crate::formula::Interpretation;
use crate::signature::{Atom, Signature};
use crate::stable::{StableEngine, StableQuery};
use crate::translate::{timed_signature, TimedAtom, TimedTheory, Translation};

/// A set of atoms `c=v`; used both for states (over fluents) and events
/// (over actions).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Valuation(pub BTreeSet<Atom>);

pub type State = Valuation;
pub type Event = Valuation;

impl Valuation {
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Self {
        Valuation(atoms.into_iter().collect())
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.0.contains(a)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.0.iter()
    }

    /// `i:s`.
    pub fn at(&self, i: usize) -> impl Iterator<Item = TimedAtom> + '_ {
        self.0.iter().map(move |a| TimedAtom::new(i, a.clone()))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `⟨s, e, s′⟩`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: State,
    pub event: Event,
    pub to: State,
}

impl Transition {
    pub fn new(from: State, event: Event, to: State) -> Self {
        Transition { from, event, to }
    }

    /// `0:s ∪ 0:e ∪ 1:s′`.
    pub fn to_model(&self) -> Interpretation<TimedAtom> {
        self.from
            .at(0)
            .chain(self.event.at(0))
            .chain(self.to.at(1))
            .collect()
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} --[{}]--> {}", self.from, self.event, self.to)
    }
}

impl fmt::Debug for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An interpretation of `σ_m` split as `(0:s_0) ∪ (0:e_0) ∪ … ∪ (m:s_m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub states: Vec<State>,
    pub events: Vec<Event>,
}

impl Path {
    pub fn from_model(model: &Interpretation<TimedAtom>, sig: &Signature, m: usize) -> Path {
        let mut states = vec![Valuation::default(); m + 1];
        let mut events = vec![Valuation::default(); m];
        for ta in model.atoms() {
            let is_fluent = sig.kind_of(&ta.atom.constant).is_some_and(|k| k.is_fluent());
            if is_fluent {
                states[ta.step].0.insert(ta.atom.clone());
            } else if ta.step < m {
                events[ta.step].0.insert(ta.atom.clone());
            }
        }
        Path { states, events }
    }

    pub fn horizon(&self) -> usize {
        self.events.len()
    }

    pub fn to_model(&self) -> Interpretation<TimedAtom> {
        let mut atoms = BTreeSet::new();
        for (i, s) in self.states.iter().enumerate() {
            atoms.extend(s.at(i));
        }
        for (i, e) in self.events.iter().enumerate() {
            atoms.extend(e.at(i));
        }
        Interpretation(atoms)
    }

    /// The triples `⟨s_i, e_i, s_{i+1}⟩`.
    pub fn transitions(&self) -> Vec<Transition> {
        (0..self.horizon())
            .map(|i| {
                Transition::new(
                    self.states[i].clone(),
                    self.events[i].clone(),
                    self.states[i + 1].clone(),
                )
            })
            .collect()
    }
}

/// Stable models of a timed theory over `σ_m`.
pub fn theory_models(
    theory: &TimedTheory,
    sig: &Signature,
    engine: &StableEngine,
) -> Result<Vec<Interpretation<TimedAtom>>> {
    let formula = theory.formula();
    let q = StableQuery::new(&formula, timed_signature(sig, theory.horizon));
    engine.stable_models(&q)
}

fn is_theory_model(theory: &TimedTheory, sig: &Signature, x: &Interpretation<TimedAtom>) -> bool {
    let formula = theory.formula();
    let q = StableQuery::new(&formula, timed_signature(sig, theory.horizon));
    StableEngine::default().is_stable_model(x, &q)
}

/// All states: `s` such that `0:s` is a stable model of `PF_0(D)`.
pub fn states<T: Translation + ?Sized>(d: &T, engine: &StableEngine) -> Result<BTreeSet<State>> {
    let theory = d.translate(0)?;
    Ok(theory_models(&theory, d.signature(), engine)?
        .iter()
        .map(|x| Path::from_model(x, d.signature(), 0).states.remove(0))
        .collect())
}

/// All transitions: stable models of `PF_1(D)`.
pub fn transitions<T: Translation + ?Sized>(
    d: &T,
    engine: &StableEngine,
) -> Result<BTreeSet<Transition>> {
    Ok(paths(d, 1, engine)?
        .into_iter()
        .flat_map(|p| p.transitions())
        .collect())
}

/// Stable models of `PF_m(D)`, split into paths, in the engine's order.
pub fn paths<T: Translation + ?Sized>(d: &T, m: usize, engine: &StableEngine) -> Result<Vec<Path>> {
    let theory = d.translate(m)?;
    Ok(theory_models(&theory, d.signature(), engine)?
        .iter()
        .map(|x| Path::from_model(x, d.signature(), m))
        .collect())
}

pub fn is_state<T: Translation + ?Sized>(d: &T, s: &State) -> Result<bool> {
    let theory = d.translate(0)?;
    Ok(is_theory_model(&theory, d.signature(), &s.at(0).collect()))
}

pub fn is_transition<T: Translation + ?Sized>(d: &T, t: &Transition) -> Result<bool> {
    let theory = d.translate(1)?;
    Ok(is_theory_model(&theory, d.signature(), &t.to_model()))
}

pub fn is_path<T: Translation + ?Sized>(d: &T, p: &Path) -> Result<bool> {
    let theory = d.translate(p.horizon())?;
    Ok(is_theory_model(&theory, d.signature(), &p.to_model()))
}

/// The labeled directed graph `T(D)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TransitionSystem {
    pub states: BTreeSet<State>,
    pub transitions: BTreeSet<Transition>,
}

impl TransitionSystem {
    pub fn build<T: Translation + ?Sized>(d: &T, engine: &StableEngine) -> Result<Self> {
        Ok(TransitionSystem {
            states: states(d, engine)?,
            transitions: transitions(d, engine)?,
        })
    }

    pub fn outgoing<'a>(&'a self, s: &'a State) -> impl Iterator<Item = &'a Transition> + 'a {
        self.transitions.iter().filter(move |t| t.from == *s)
    }

    /// The subgraph reachable from `start`.
    pub fn reachable_from(&self, start: &State) -> TransitionSystem {
        let mut out = TransitionSystem::default();
        if !self.states.contains(start) {
            return out;
        }
        let mut queue = VecDeque::from([start.clone()]);
        out.states.insert(start.clone());
        while let Some(s) = queue.pop_front() {
            for t in self.outgoing(&s) {
                out.transitions.insert(t.clone());
                if out.states.insert(t.to.clone()) {
                    queue.push_back(t.to.clone());
                }
            }
        }
        out
    }

    /// One `state --[event]--> state` line per transition, then any
    /// isolated states on their own lines.
    pub fn edge_list(&self) -> String {
        let mut out = String::new();
        let mut touched = BTreeSet::new();
        for t in &self.transitions {
            let _ = writeln!(out, "{t}");
            touched.insert(&t.from);
            touched.insert(&t.to);
        }
        for s in self.states.iter().filter(|s| !touched.contains(s)) {
            let _ = writeln!(out, "{s}");
        }
        out
    }

    /// Graphviz DOT text.
    pub fn to_dot(&self) -> String {
        let ids: BTreeMap<&State, usize> = self.states.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut out = String::from("digraph transitions {\n");
        for (s, i) in &ids {
            let _ = writeln!(out, "  s{i} [label=\"{s}\"];");
        }
        for t in &self.transitions {
            let (Some(a), Some(b)) = (ids.get(&t.from), ids.get(&t.to)) else {
                continue;
            };
            let _ = writeln!(out, "  s{a} -> s{b} [label=\"{}\"];", t.event);
        }
        out.push_str("}\n");
        out
    }
}
