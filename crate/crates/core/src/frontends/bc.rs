//! Action language BC: its reference translation `PF_m^BC` and its
//! embedding into BC+.

use crate::action::{Abbreviation, ActionDescription, CausalLaw};
use crate::error::{Error, LawDiagnostic, Result};
use crate::formula::Formula;
use crate::signature::{Atom, ConstantKind, Signature};
use crate::symbol::Symbol;
use crate::translate::{push_boilerplate, rule, timed_and, timestamp, Origin, TimedTheory, Translation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BcLawForm {
    Static,
    Dynamic,
}

/// `A0 if A1,…,Am ifcons Am+1,…,An` (static) or
/// `A0 after A1,…,Am ifcons Am+1,…,An` (dynamic).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BcLaw {
    pub form: BcLawForm,
    pub head: Atom,
    pub body: Vec<Atom>,
    pub ifcons: Vec<Atom>,
}

impl BcLaw {
    pub fn static_law(head: Atom, body: impl IntoIterator<Item = Atom>, ifcons: impl IntoIterator<Item = Atom>) -> Self {
        BcLaw {
            form: BcLawForm::Static,
            head,
            body: body.into_iter().collect(),
            ifcons: ifcons.into_iter().collect(),
        }
    }

    pub fn dynamic(head: Atom, body: impl IntoIterator<Item = Atom>, ifcons: impl IntoIterator<Item = Atom>) -> Self {
        BcLaw {
            form: BcLawForm::Dynamic,
            ..BcLaw::static_law(head, body, ifcons)
        }
    }

    fn body_formula(&self) -> Formula<Atom> {
        Formula::conj(self.body.iter().cloned().map(Formula::Atom))
    }

    fn ifcons_formula(&self) -> Formula<Atom> {
        Formula::conj(
            self.ifcons
                .iter()
                .cloned()
                .map(|a| Formula::not(Formula::not(Formula::Atom(a)))),
        )
    }
}

pub fn validate_bc_law(law: &BcLaw, sig: &Signature) -> Result<(), LawDiagnostic> {
    let kind = |a: &Atom| -> Result<ConstantKind, LawDiagnostic> {
        if !sig.contains_atom(a) {
            return Err(LawDiagnostic::new(
                format!("atom {a} is not in the signature"),
                Some(a.constant.clone()),
            ));
        }
        Ok(sig.kind_of(&a.constant).expect("atom is in the signature"))
    };
    let fluent = |a: &Atom, what: &str| -> Result<(), LawDiagnostic> {
        if kind(a)?.is_fluent() {
            Ok(())
        } else {
            Err(LawDiagnostic::new(
                format!("action constant {} in {what}", a.constant),
                Some(a.constant.clone()),
            ))
        }
    };
    for a in &law.ifcons {
        fluent(a, "ifcons part")?;
    }
    match law.form {
        BcLawForm::Static => {
            fluent(&law.head, "static head")?;
            for a in &law.body {
                fluent(a, "static body")?;
            }
        }
        BcLawForm::Dynamic => {
            if kind(&law.head)? != ConstantKind::RegularFluent {
                return Err(LawDiagnostic::new(
                    format!("head {} of a dynamic law must be a regular fluent", law.head),
                    Some(law.head.constant.clone()),
                ));
            }
            for a in &law.body {
                if !kind(a)?.is_fluent() && a.value != Symbol::t() {
                    return Err(LawDiagnostic::new(
                        format!("action atom {a} in a dynamic body must have the form a=t"),
                        Some(a.constant.clone()),
                    ));
                }
            }
        }
    }
    Ok(())
}

/// A BC description. Action constants are Boolean.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BcDescription {
    pub signature: Signature,
    pub laws: Vec<BcLaw>,
}

impl BcDescription {
    pub fn new(signature: Signature) -> Result<Self> {
        if let Some(a) = signature.actions().find(|d| !d.is_boolean()) {
            return Err(LawDiagnostic::new(
                format!("action constant {} is not Boolean", a.name),
                Some(a.name.clone()),
            )
            .into());
        }
        Ok(BcDescription {
            signature,
            laws: Vec::new(),
        })
    }

    pub fn add_law(&mut self, law: BcLaw) -> Result<()> {
        validate_bc_law(&law, &self.signature).map_err(|diagnostic| Error::Law {
            index: self.laws.len(),
            diagnostic,
        })?;
        self.laws.push(law);
        Ok(())
    }

    pub fn with_law(mut self, law: BcLaw) -> Result<Self> {
        self.add_law(law)?;
        Ok(self)
    }
}

impl Translation for BcDescription {
    fn signature(&self) -> &Signature {
        &self.signature
    }

    fn translate(&self, m: usize) -> Result<TimedTheory> {
        let mut theory = TimedTheory::new(m);
        for (index, law) in self.laws.iter().enumerate() {
            let origin = Origin::Law { index };
            let head = Formula::Atom(law.head.clone());
            match law.form {
                BcLawForm::Static => {
                    let body = crate::action::and_simplified(law.body_formula(), law.ifcons_formula());
                    for i in 0..=m {
                        theory.push(rule(timestamp(&head, i), timestamp(&body, i)), origin.clone(), i);
                    }
                }
                BcLawForm::Dynamic => {
                    for i in 0..m {
                        let body = timed_and(
                            timestamp(&law.body_formula(), i),
                            timestamp(&law.ifcons_formula(), i + 1),
                        );
                        theory.push(rule(timestamp(&head, i + 1), body), origin.clone(), i + 1);
                    }
                }
            }
        }
        for i in 0..m {
            for a in self.signature.actions() {
                let f = Formula::or(
                    Formula::Atom(Atom::truth(a.name.clone())),
                    Formula::Atom(Atom::falsity(a.name.clone())),
                );
                theory.push(
                    timestamp(&f, i),
                    Origin::ActionExistence {
                        constant: a.name.clone(),
                    },
                    i + 1,
                );
            }
        }
        push_boilerplate(&mut theory, &self.signature);
        Ok(theory)
    }
}

/// Static laws become `caused A0 if A1∧…∧Am∧¬¬Am+1∧…∧¬¬An`, dynamic laws
/// `caused A0 if ¬¬Am+1∧…∧¬¬An after A1∧…∧Am`, and every action is
/// declared exogenous.
pub fn bc2bcp(d: &BcDescription) -> ActionDescription {
    let mut out = ActionDescription::new(d.signature.clone());
    for law in &d.laws {
        let head = Formula::Atom(law.head.clone());
        let lowered = match law.form {
            BcLawForm::Static => CausalLaw::static_law(
                head,
                crate::action::and_simplified(law.body_formula(), law.ifcons_formula()),
            ),
            BcLawForm::Dynamic => {
                CausalLaw::fluent_dynamic(head, law.ifcons_formula(), law.body_formula())
            }
        };
        out.add_law(lowered).expect("well-formed BC laws lower to well-formed BC+ laws");
    }
    let actions: Vec<Symbol> = d.signature.actions().map(|a| a.name.clone()).collect();
    for a in actions {
        out.add(&Abbreviation::Exogenous(a))
            .expect("BC action constants are action constants");
    }
    out
}
