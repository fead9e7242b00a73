//! Propositional formulas over `c=v` atoms, classical satisfaction, the
//! reduct, and the standard shorthands (negation, choice, cardinality, UEC).
//!
//! Only four node kinds exist: falsity, conjunction, disjunction and
//! implication. Everything else is rewritten into them at construction:
//! `¬F` is `F → ⊥`, `⊤` is `⊥ → ⊥`, `F ↔ G` is `(F → G) ∧ (G → F)` and
//! `{F}^ch` is `F ∨ ¬F`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;

use crate::error::FormulaError;
use crate::signature::{Atom, ConstantDecl, Signature};

/// Default cap on the number of subsets a cardinality expansion may enumerate.
pub const DEFAULT_EXPANSION_LIMIT: u128 = 1_000_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula<A> {
    False,
    Atom(A),
    And(Arc<Formula<A>>, Arc<Formula<A>>),
    Or(Arc<Formula<A>>, Arc<Formula<A>>),
    Implies(Arc<Formula<A>>, Arc<Formula<A>>),
}

impl<A> Formula<A> {
    pub fn falsity() -> Self {
        Formula::False
    }

    pub fn top() -> Self {
        Formula::implies(Formula::False, Formula::False)
    }

    pub fn atom(a: A) -> Self {
        Formula::Atom(a)
    }

    pub fn and(lhs: Self, rhs: Self) -> Self {
        Formula::And(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn or(lhs: Self, rhs: Self) -> Self {
        Formula::Or(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn implies(antecedent: Self, consequent: Self) -> Self {
        Formula::Implies(Arc::new(antecedent), Arc::new(consequent))
    }

    /// `G ← F`, stored as `F → G`.
    pub fn rule(head: Self, body: Self) -> Self {
        Formula::implies(body, head)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Self) -> Self {
        Formula::implies(f, Formula::False)
    }

    pub fn iff(lhs: Self, rhs: Self) -> Self
    where
        A: Clone,
    {
        Formula::and(
            Formula::implies(lhs.clone(), rhs.clone()),
            Formula::implies(rhs, lhs),
        )
    }

    /// The choice formula `{F}^ch`, i.e. `F ∨ ¬F`.
    pub fn choice(f: Self) -> Self
    where
        A: Clone,
    {
        Formula::or(f.clone(), Formula::not(f))
    }

    /// Balanced conjunction; the empty conjunction is `⊤`.
    pub fn conj(items: impl IntoIterator<Item = Self>) -> Self {
        let items: Vec<Self> = items.into_iter().collect();
        balanced(items, Formula::top, Formula::and)
    }

    /// Balanced disjunction; the empty disjunction is `⊥`.
    pub fn disj(items: impl IntoIterator<Item = Self>) -> Self {
        let items: Vec<Self> = items.into_iter().collect();
        balanced(items, Formula::falsity, Formula::or)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::False)
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::Implies(a, b) if a.is_false() && b.is_false())
    }

    /// The operand `F` if this formula has the shape `F → ⊥`.
    pub fn negated(&self) -> Option<&Formula<A>> {
        match self {
            Formula::Implies(a, b) if b.is_false() => Some(a),
            _ => None,
        }
    }

    /// Classical truth value under the valuation `holds`.
    pub fn eval(&self, holds: &impl Fn(&A) -> bool) -> bool {
        match self {
            Formula::False => false,
            Formula::Atom(a) => holds(a),
            Formula::And(l, r) => l.eval(holds) && r.eval(holds),
            Formula::Or(l, r) => l.eval(holds) || r.eval(holds),
            Formula::Implies(l, r) => !l.eval(holds) || r.eval(holds),
        }
    }

    pub fn for_each_atom<'a>(&'a self, visit: &mut impl FnMut(&'a A)) {
        match self {
            Formula::False => {}
            Formula::Atom(a) => visit(a),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.for_each_atom(visit);
                r.for_each_atom(visit);
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<A>
    where
        A: Ord + Clone,
    {
        let mut out = BTreeSet::new();
        self.for_each_atom(&mut |a| {
            out.insert(a.clone());
        });
        out
    }

    /// Structure-preserving relabeling of atoms.
    pub fn map_atoms<B>(&self, f: &impl Fn(&A) -> B) -> Formula<B> {
        match self {
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::Atom(f(a)),
            Formula::And(l, r) => Formula::and(l.map_atoms(f), r.map_atoms(f)),
            Formula::Or(l, r) => Formula::or(l.map_atoms(f), r.map_atoms(f)),
            Formula::Implies(l, r) => Formula::implies(l.map_atoms(f), r.map_atoms(f)),
        }
    }

    /// Replaces every atom by a formula.
    pub fn substitute<B>(&self, f: &impl Fn(&A) -> Formula<B>) -> Formula<B> {
        match self {
            Formula::False => Formula::False,
            Formula::Atom(a) => f(a),
            Formula::And(l, r) => Formula::and(l.substitute(f), r.substitute(f)),
            Formula::Or(l, r) => Formula::or(l.substitute(f), r.substitute(f)),
            Formula::Implies(l, r) => Formula::implies(l.substitute(f), r.substitute(f)),
        }
    }

    /// Flattens nested conjunctions; `⊤` contributes nothing.
    pub fn conjuncts(&self) -> Vec<&Formula<A>> {
        let mut out = Vec::new();
        collect_binary(self, &mut out, &|f| match f {
            Formula::And(l, r) => Some((l, r)),
            _ => None,
        });
        out.retain(|f| !f.is_top());
        out
    }

    /// Flattens nested disjunctions; `⊥` contributes nothing.
    pub fn disjuncts(&self) -> Vec<&Formula<A>> {
        let mut out = Vec::new();
        collect_binary(self, &mut out, &|f| match f {
            Formula::Or(l, r) => Some((l, r)),
            _ => None,
        });
        out.retain(|f| !f.is_false());
        out
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::False | Formula::Atom(_) => 0,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                1 + l.depth().max(r.depth())
            }
        }
    }
}

impl<A: Ord + Clone> Formula<A> {
    /// The reduct `F^X`: every maximal subformula not satisfied by `x` becomes `⊥`.
    pub fn reduct(&self, x: &BTreeSet<A>) -> Formula<A> {
        let holds = |a: &A| x.contains(a);
        self.reduct_with(&holds)
    }

    fn reduct_with(&self, holds: &impl Fn(&A) -> bool) -> Formula<A> {
        if !self.eval(holds) {
            return Formula::False;
        }
        match self {
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::Atom(a.clone()),
            Formula::And(l, r) => Formula::and(l.reduct_with(holds), r.reduct_with(holds)),
            Formula::Or(l, r) => Formula::or(l.reduct_with(holds), r.reduct_with(holds)),
            Formula::Implies(l, r) => {
                Formula::implies(l.reduct_with(holds), r.reduct_with(holds))
            }
        }
    }
}

fn collect_binary<'a, A>(
    f: &'a Formula<A>,
    out: &mut Vec<&'a Formula<A>>,
    split: &impl Fn(&'a Formula<A>) -> Option<(&'a Arc<Formula<A>>, &'a Arc<Formula<A>>)>,
) {
    match split(f) {
        Some((l, r)) => {
            collect_binary(l, out, split);
            collect_binary(r, out, split);
        }
        None => out.push(f),
    }
}

fn balanced<A>(
    mut items: Vec<Formula<A>>,
    empty: fn() -> Formula<A>,
    join: fn(Formula<A>, Formula<A>) -> Formula<A>,
) -> Formula<A> {
    match items.len() {
        0 => empty(),
        1 => items.pop().unwrap(),
        n => {
            let right = items.split_off(n / 2);
            join(balanced(items, empty, join), balanced(right, empty, join))
        }
    }
}

/// An interpretation, identified with the set of atoms true in it.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interpretation<A: Ord>(pub BTreeSet<A>);

impl<A: Ord> Interpretation<A> {
    pub fn new(atoms: impl IntoIterator<Item = A>) -> Self {
        Interpretation(atoms.into_iter().collect())
    }

    pub fn empty() -> Self {
        Interpretation(BTreeSet::new())
    }

    pub fn contains(&self, a: &A) -> bool {
        self.0.contains(a)
    }

    pub fn atoms(&self) -> &BTreeSet<A> {
        &self.0
    }

    pub fn into_atoms(self) -> BTreeSet<A> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn satisfies(&self, f: &Formula<A>) -> bool {
        f.eval(&|a| self.0.contains(a))
    }

    /// Satisfaction, rejecting formulas or interpretations that mention atoms
    /// outside `universe`.
    pub fn satisfies_within(
        &self,
        f: &Formula<A>,
        universe: &BTreeSet<A>,
    ) -> Result<bool, FormulaError>
    where
        A: fmt::Display,
    {
        let mut stray = None;
        f.for_each_atom(&mut |a| {
            if stray.is_none() && !universe.contains(a) {
                stray = Some(a.to_string());
            }
        });
        if let Some(a) = stray.or_else(|| {
            self.0
                .iter()
                .find(|a| !universe.contains(a))
                .map(|a| a.to_string())
        }) {
            return Err(FormulaError::AtomOutsideSignature(a));
        }
        Ok(self.satisfies(f))
    }
}

impl<A: Ord + fmt::Display> fmt::Display for Interpretation<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().join(", "))
    }
}

impl<A: Ord + fmt::Debug> fmt::Debug for Interpretation<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl<A: Ord> FromIterator<A> for Interpretation<A> {
    fn from_iter<T: IntoIterator<Item = A>>(iter: T) -> Self {
        Interpretation(iter.into_iter().collect())
    }
}

/// The choice formula `{F}^ch`.
pub fn choice<A: Clone>(f: Formula<A>) -> Formula<A> {
    Formula::choice(f)
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Number of subsets [`expand_cardinality`] enumerates for these bounds.
pub fn cardinality_cost(lower: Option<usize>, size: usize, upper: Option<usize>) -> u128 {
    let lo = lower.map_or(0, |l| binomial(size, l));
    let hi = upper.map_or(0, |u| binomial(size, u + 1));
    lo.saturating_add(hi)
}

/// Expands `l ≤ Z ≤ u` into a propositional formula.
///
/// `l ≤ Z` is the disjunction, over all `l`-element subsets of `Z`, of their
/// conjunctions; `Z ≤ u` is `¬((u+1) ≤ Z)`; with both bounds the result is
/// their conjunction. Missing bounds are dropped; with neither the result is `⊤`.
pub fn expand_cardinality<A: Clone>(
    lower: Option<usize>,
    atoms: &[A],
    upper: Option<usize>,
) -> Formula<A> {
    let at_least = |l: usize| -> Formula<A> {
        Formula::disj(
            atoms
                .iter()
                .combinations(l)
                .map(|subset| Formula::conj(subset.into_iter().cloned().map(Formula::Atom))),
        )
    };
    match (lower, upper) {
        (None, None) => Formula::top(),
        (Some(l), None) => at_least(l),
        (None, Some(u)) => Formula::not(at_least(u + 1)),
        (Some(l), Some(u)) => Formula::and(at_least(l), Formula::not(at_least(u + 1))),
    }
}

/// [`expand_cardinality`] with a cap on the number of enumerated subsets.
pub fn expand_cardinality_capped<A: Clone>(
    lower: Option<usize>,
    atoms: &[A],
    upper: Option<usize>,
    limit: u128,
) -> Result<Formula<A>, FormulaError> {
    let needed = cardinality_cost(lower, atoms.len(), upper);
    if needed > limit {
        return Err(FormulaError::ExpansionTooLarge { needed, limit });
    }
    Ok(expand_cardinality(lower, atoms, upper))
}

/// Uniqueness and existence constraints for one constant: pairwise
/// `¬(c=v ∧ c=w)` followed by the doubly negated existence disjunction.
pub fn uec_constant(decl: &ConstantDecl) -> Vec<Formula<Atom>> {
    let atoms: Vec<Atom> = decl.atoms().collect();
    let mut out: Vec<Formula<Atom>> = atoms
        .iter()
        .tuple_combinations()
        .map(|(v, w)| {
            Formula::not(Formula::and(
                Formula::Atom(v.clone()),
                Formula::Atom(w.clone()),
            ))
        })
        .collect();
    out.push(Formula::not(Formula::not(Formula::disj(
        atoms.into_iter().map(Formula::Atom),
    ))));
    out
}

/// `UEC_σ` for every constant of the signature.
pub fn uec(signature: &Signature) -> Formula<Atom> {
    Formula::conj(signature.constants().flat_map(uec_constant))
}

impl<A: fmt::Display> Formula<A> {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent: u8) -> fmt::Result {
        // 0: top level, 1: operand of a binary connective, 2: operand of negation
        if self.is_top() {
            return f.write_str("true");
        }
        if let Some(inner) = self.negated() {
            f.write_str("-")?;
            return inner.fmt_prec(f, 2);
        }
        let (op, l, r) = match self {
            Formula::False => return f.write_str("false"),
            Formula::Atom(a) => return write!(f, "{a}"),
            Formula::And(l, r) => ("&", l, r),
            Formula::Or(l, r) => ("|", l, r),
            Formula::Implies(l, r) => ("->", l, r),
        };
        if parent > 0 {
            f.write_str("(")?;
        }
        l.fmt_prec(f, 1)?;
        write!(f, " {op} ")?;
        r.fmt_prec(f, 1)?;
        if parent > 0 {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl<A: fmt::Display> fmt::Display for Formula<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl<A: fmt::Display> fmt::Debug for Formula<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
