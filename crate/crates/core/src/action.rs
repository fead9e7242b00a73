//! BC+ causal laws, abbreviations, and action descriptions.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, LawDiagnostic};
use crate::formula::{binomial, Formula};
use crate::signature::{Atom, ConstantKind, Signature};
use crate::symbol::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LawForm {
    Static,
    ActionDynamic,
    FluentDynamic,
}

/// `caused F if G` or `caused F if G after H`.
#[derive(Clone)]
pub struct CausalLaw {
    pub form: LawForm,
    pub head: Formula<Atom>,
    pub if_part: Formula<Atom>,
    pub after: Option<Formula<Atom>>,
    /// Surface text of the law or abbreviation this law came from.
    pub origin: Option<String>,
}

impl PartialEq for CausalLaw {
    fn eq(&self, other: &Self) -> bool {
        self.form == other.form
            && self.head == other.head
            && self.if_part == other.if_part
            && self.after == other.after
    }
}

impl Eq for CausalLaw {}

impl CausalLaw {
    pub fn static_law(head: Formula<Atom>, if_part: Formula<Atom>) -> Self {
        CausalLaw {
            form: LawForm::Static,
            head,
            if_part,
            after: None,
            origin: None,
        }
    }

    pub fn action_dynamic(head: Formula<Atom>, if_part: Formula<Atom>) -> Self {
        CausalLaw {
            form: LawForm::ActionDynamic,
            ..CausalLaw::static_law(head, if_part)
        }
    }

    pub fn fluent_dynamic(head: Formula<Atom>, if_part: Formula<Atom>, after: Formula<Atom>) -> Self {
        CausalLaw {
            form: LawForm::FluentDynamic,
            after: Some(after),
            ..CausalLaw::static_law(head, if_part)
        }
    }

    /// `caused head if if_part [after after]`, with the form read off the
    /// signature: a law with an `after` part is fluent dynamic, a law whose
    /// head mentions an action constant is action dynamic, and any other law
    /// is static.
    pub fn caused(
        sig: &Signature,
        head: Formula<Atom>,
        if_part: Formula<Atom>,
        after: Option<Formula<Atom>>,
    ) -> Self {
        match after {
            Some(h) => CausalLaw::fluent_dynamic(head, if_part, h),
            None if mentions(sig, &head, |k| k == ConstantKind::Action) => {
                CausalLaw::action_dynamic(head, if_part)
            }
            None => CausalLaw::static_law(head, if_part),
        }
    }

    pub fn with_origin(mut self, origin: impl Into<String>) -> Self {
        self.origin = Some(origin.into());
        self
    }
}

impl fmt::Display for CausalLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "caused {} if {}", self.head, self.if_part)?;
        if let Some(h) = &self.after {
            write!(f, " after {h}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CausalLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn mentions(sig: &Signature, f: &Formula<Atom>, pred: impl Fn(ConstantKind) -> bool) -> bool {
    let mut found = false;
    f.for_each_atom(&mut |a| {
        if sig.kind_of(&a.constant).is_some_and(&pred) {
            found = true;
        }
    });
    found
}

fn first_constant(
    sig: &Signature,
    f: &Formula<Atom>,
    pred: impl Fn(ConstantKind) -> bool,
) -> Option<Symbol> {
    let mut found = None;
    f.for_each_atom(&mut |a| {
        if found.is_none() && sig.kind_of(&a.constant).is_some_and(&pred) {
            found = Some(a.constant.clone());
        }
    });
    found
}

fn check_atoms(sig: &Signature, f: &Formula<Atom>) -> Result<(), LawDiagnostic> {
    let mut bad = None;
    f.for_each_atom(&mut |a| {
        if bad.is_none() && !sig.contains_atom(a) {
            bad = Some(a.clone());
        }
    });
    match bad {
        None => Ok(()),
        Some(a) => Err(LawDiagnostic::new(
            format!("atom {a} is not in the signature"),
            Some(a.constant),
        )),
    }
}

fn require_fluent(sig: &Signature, f: &Formula<Atom>, what: &str) -> Result<(), LawDiagnostic> {
    match first_constant(sig, f, |k| k == ConstantKind::Action) {
        Some(c) => Err(LawDiagnostic::new(
            format!("action constant {c} in {what}"),
            Some(c),
        )),
        None => Ok(()),
    }
}

/// Checks the syntactic provisos of the law's form.
pub fn validate_law(law: &CausalLaw, sig: &Signature) -> Result<(), LawDiagnostic> {
    check_atoms(sig, &law.head)?;
    check_atoms(sig, &law.if_part)?;
    if let Some(h) = &law.after {
        check_atoms(sig, h)?;
    }
    match law.form {
        LawForm::Static => {
            if law.after.is_some() {
                return Err(LawDiagnostic::new("static law with an after part", None));
            }
            require_fluent(sig, &law.head, "static head")?;
            require_fluent(sig, &law.if_part, "static if part")
        }
        LawForm::ActionDynamic => {
            if law.after.is_some() {
                return Err(LawDiagnostic::new("action dynamic law with an after part", None));
            }
            if let Some(c) = first_constant(sig, &law.head, ConstantKind::is_fluent) {
                return Err(LawDiagnostic::new(
                    format!("fluent constant {c} in action dynamic head"),
                    Some(c),
                ));
            }
            if !mentions(sig, &law.head, |k| k == ConstantKind::Action) {
                return Err(LawDiagnostic::new(
                    "action dynamic head contains no action constant",
                    None,
                ));
            }
            Ok(())
        }
        LawForm::FluentDynamic => {
            if law.after.is_none() {
                return Err(LawDiagnostic::new("fluent dynamic law without an after part", None));
            }
            require_fluent(sig, &law.head, "fluent dynamic head")?;
            if let Some(c) = first_constant(sig, &law.head, |k| {
                k == ConstantKind::StaticallyDeterminedFluent
            }) {
                return Err(LawDiagnostic::new(
                    format!("statically determined constant {c} in fluent dynamic head"),
                    Some(c),
                ));
            }
            require_fluent(sig, &law.if_part, "fluent dynamic if part")
        }
    }
}

/// The abbreviations that stand for causal laws.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Abbreviation {
    /// `default F if G [after H]`; `F` is normally an atom `c=v`.
    Default {
        head: Formula<Atom>,
        if_part: Formula<Atom>,
        after: Option<Formula<Atom>>,
    },
    /// `A causes F if G`.
    Causes {
        action: Formula<Atom>,
        effect: Formula<Atom>,
        if_part: Formula<Atom>,
    },
    Exogenous(Symbol),
    Inertial(Symbol),
    Constraint(Formula<Atom>),
    Always(Formula<Atom>),
    /// `nonexecutable F if G`.
    Nonexecutable {
        action: Formula<Atom>,
        if_part: Formula<Atom>,
    },
}

/// Which language's reading of the abbreviations to use. They differ only in
/// `default`, `exogenous` and `inertial`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    BcPlus,
    Cplus,
}

fn domain_atoms(sig: &Signature, c: &Symbol) -> Vec<Atom> {
    sig.get(c).map(|d| d.atoms().collect()).unwrap_or_default()
}

impl Abbreviation {
    /// Expands under BC+ and validates every resulting law.
    pub fn expand(&self, sig: &Signature) -> Result<Vec<CausalLaw>, LawDiagnostic> {
        self.expand_in(sig, Dialect::BcPlus)
    }

    pub fn expand_in(&self, sig: &Signature, dialect: Dialect) -> Result<Vec<CausalLaw>, LawDiagnostic> {
        let top = Formula::top;
        let default_head = |head: &Formula<Atom>| match dialect {
            Dialect::BcPlus => Formula::choice(head.clone()),
            Dialect::Cplus => head.clone(),
        };
        let default_body = |head: &Formula<Atom>, body: Formula<Atom>| match dialect {
            Dialect::BcPlus => body,
            Dialect::Cplus => and_simplified(head.clone(), body),
        };
        let laws = match self {
            Abbreviation::Default {
                head,
                if_part,
                after,
            } => vec![CausalLaw::caused(
                sig,
                default_head(head),
                default_body(head, if_part.clone()),
                after.clone(),
            )],
            Abbreviation::Causes {
                action,
                effect,
                if_part,
            } => vec![CausalLaw::fluent_dynamic(
                effect.clone(),
                top(),
                and_simplified(action.clone(), if_part.clone()),
            )],
            Abbreviation::Exogenous(c) => {
                match sig.kind_of(c) {
                    Some(ConstantKind::Action) => {}
                    Some(k) => {
                        return Err(LawDiagnostic::new(
                            format!("exogenous requires an action constant, but {c} is a {k}"),
                            Some(c.clone()),
                        ))
                    }
                    None => return Err(unknown(c)),
                }
                domain_atoms(sig, c)
                    .into_iter()
                    .map(|a| {
                        let a = Formula::Atom(a);
                        CausalLaw::action_dynamic(default_head(&a), default_body(&a, top()))
                    })
                    .collect()
            }
            Abbreviation::Inertial(c) => {
                match sig.kind_of(c) {
                    Some(ConstantKind::RegularFluent) => {}
                    Some(k) => {
                        return Err(LawDiagnostic::new(
                            format!("inertial requires a regular fluent constant, but {c} is a {k}"),
                            Some(c.clone()),
                        ))
                    }
                    None => return Err(unknown(c)),
                }
                domain_atoms(sig, c)
                    .into_iter()
                    .map(|a| {
                        let a = Formula::Atom(a);
                        CausalLaw::fluent_dynamic(
                            default_head(&a),
                            default_body(&a, top()),
                            a.clone(),
                        )
                    })
                    .collect()
            }
            Abbreviation::Constraint(f) => {
                vec![CausalLaw::static_law(Formula::falsity(), Formula::not(f.clone()))]
            }
            Abbreviation::Always(f) => vec![CausalLaw::fluent_dynamic(
                Formula::falsity(),
                top(),
                Formula::not(f.clone()),
            )],
            Abbreviation::Nonexecutable { action, if_part } => vec![CausalLaw::fluent_dynamic(
                Formula::falsity(),
                top(),
                and_simplified(action.clone(), if_part.clone()),
            )],
        };
        for law in &laws {
            validate_law(law, sig)?;
        }
        Ok(laws)
    }
}

fn unknown(c: &Symbol) -> LawDiagnostic {
    LawDiagnostic::new(format!("unknown constant {c}"), Some(c.clone()))
}

/// `F ∧ G`, dropping a `⊤` operand.
pub(crate) fn and_simplified<A>(f: Formula<A>, g: Formula<A>) -> Formula<A> {
    if f.is_top() {
        g
    } else if g.is_top() {
        f
    } else {
        Formula::and(f, g)
    }
}

/// A signature with a finite list of causal laws.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActionDescription {
    pub signature: Signature,
    pub laws: Vec<CausalLaw>,
}

impl ActionDescription {
    pub fn new(signature: Signature) -> Self {
        ActionDescription {
            signature,
            laws: Vec::new(),
        }
    }

    pub fn add_law(&mut self, law: CausalLaw) -> Result<(), Error> {
        validate_law(&law, &self.signature).map_err(|diagnostic| Error::Law {
            index: self.laws.len(),
            diagnostic,
        })?;
        self.laws.push(law);
        Ok(())
    }

    pub fn add(&mut self, abbreviation: &Abbreviation) -> Result<(), Error> {
        let laws = abbreviation
            .expand(&self.signature)
            .map_err(|diagnostic| Error::Law {
                index: self.laws.len(),
                diagnostic,
            })?;
        self.laws.extend(laws);
        Ok(())
    }

    /// Builder form of [`ActionDescription::add_law`].
    pub fn with_law(mut self, law: CausalLaw) -> Result<Self, Error> {
        self.add_law(law)?;
        Ok(self)
    }

    pub fn with(mut self, abbreviation: Abbreviation) -> Result<Self, Error> {
        self.add(&abbreviation)?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), Error> {
        for (index, law) in self.laws.iter().enumerate() {
            validate_law(law, &self.signature).map_err(|diagnostic| Error::Law { index, diagnostic })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub definite: bool,
    pub simple: bool,
}

/// Heads of definite descriptions: `⊥`, an atom, or `{atom}^ch`.
pub fn is_definite_head<A: PartialEq>(head: &Formula<A>) -> bool {
    match head {
        Formula::False | Formula::Atom(_) => true,
        Formula::Or(l, r) => match (&**l, r.negated()) {
            (Formula::Atom(a), Some(Formula::Atom(b))) => a == b,
            _ => false,
        },
        _ => false,
    }
}

/// A conjunction of atoms and count aggregates, each possibly negated.
pub fn is_simple_body<A: Ord + Clone>(body: &Formula<A>) -> bool {
    body.conjuncts().into_iter().all(|c| {
        let mut c = c;
        while let Some(inner) = c.negated() {
            c = inner;
        }
        is_count_aggregate(c)
    })
}

/// Recognizes `l ≤ Z` in its expanded form: the disjunction of the
/// conjunctions of all `l`-element subsets of `Z`. Single atoms, `⊤` and `⊥`
/// qualify.
fn is_count_aggregate<A: Ord + Clone>(f: &Formula<A>) -> bool {
    if matches!(f, Formula::False | Formula::Atom(_)) || f.is_top() {
        return true;
    }
    let mut subsets: BTreeSet<BTreeSet<A>> = BTreeSet::new();
    for d in f.disjuncts() {
        let mut set = BTreeSet::new();
        for c in d.conjuncts() {
            match c {
                Formula::Atom(a) => {
                    if !set.insert(a.clone()) {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        subsets.insert(set);
    }
    let Some(size) = subsets.first().map(BTreeSet::len) else {
        return true;
    };
    if subsets.iter().any(|s| s.len() != size) {
        return false;
    }
    let union: BTreeSet<&A> = subsets.iter().flatten().collect();
    binomial(union.len(), size) == subsets.len() as u128
}

pub fn classify(d: &ActionDescription) -> Classification {
    let definite = d.laws.iter().all(|l| is_definite_head(&l.head));
    let simple = definite
        && d.laws.iter().all(|l| {
            is_simple_body(&l.if_part) && l.after.as_ref().map_or(true, is_simple_body)
        });
    Classification { definite, simple }
}
