//! Propositional formulas as BC+ descriptions whose states are the stable
//! models of the formula.

use std::collections::BTreeSet;

use crate::action::{Abbreviation, ActionDescription, CausalLaw};
use crate::error::Result;
use crate::formula::{Formula, Interpretation};
use crate::signature::{Atom, ConstantKind, Signature};
use crate::symbol::Symbol;
use crate::transition::State;

/// Every atom of `f` (and of `extra`) becomes a Boolean statically
/// determined fluent; the description is `caused F` plus `default c=f` for
/// every constant.
pub fn pf2bcp(f: &Formula<Symbol>, extra: impl IntoIterator<Item = Symbol>) -> Result<ActionDescription> {
    let mut atoms = f.atoms();
    atoms.extend(extra);
    let mut sig = Signature::new();
    for p in &atoms {
        sig.declare_boolean(p.clone(), ConstantKind::StaticallyDeterminedFluent)?;
    }
    let lifted = f.map_atoms(&|p| Atom::truth(p.clone()));
    let mut d = ActionDescription::new(sig);
    d.add_law(CausalLaw::static_law(lifted, Formula::top()))?;
    for p in &atoms {
        d.add(&Abbreviation::Default {
            head: Formula::Atom(Atom::falsity(p.clone())),
            if_part: Formula::top(),
            after: None,
        })?;
    }
    Ok(d)
}

/// `I ↦ I′ = {c=t : c ∈ I} ∪ {c=f : c ∉ I}` over `atoms`.
pub fn interpretation_to_state(i: &Interpretation<Symbol>, atoms: &BTreeSet<Symbol>) -> State {
    State::new(atoms.iter().map(|p| {
        if i.contains(p) {
            Atom::truth(p.clone())
        } else {
            Atom::falsity(p.clone())
        }
    }))
}

/// Inverse of [`interpretation_to_state`].
pub fn state_to_interpretation(s: &State) -> Interpretation<Symbol> {
    s.atoms()
        .filter(|a| a.value == Symbol::t())
        .map(|a| a.constant.clone())
        .collect()
}
