//! Definite C+: its reference translation `PF_m^C+` and its embedding into
//! BC+.

use crate::action::{validate_law, Abbreviation, ActionDescription, CausalLaw, Dialect, LawForm};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::signature::{Atom, Signature};
use crate::translate::{push_boilerplate, rule, timed_and, timestamp, Origin, TimedTheory, Translation};

/// A C+ description. Laws share the shape of BC+ causal laws; only the
/// definite ones (heads `⊥` or an atom) can be translated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CplusDescription {
    pub signature: Signature,
    pub laws: Vec<CausalLaw>,
}

fn double_negation(g: &Formula<Atom>) -> Formula<Atom> {
    if g.is_top() {
        g.clone()
    } else {
        Formula::not(Formula::not(g.clone()))
    }
}

impl CplusDescription {
    pub fn new(signature: Signature) -> Self {
        CplusDescription {
            signature,
            laws: Vec::new(),
        }
    }

    pub fn add_law(&mut self, law: CausalLaw) -> Result<()> {
        validate_law(&law, &self.signature).map_err(|diagnostic| Error::Law {
            index: self.laws.len(),
            diagnostic,
        })?;
        self.laws.push(law);
        Ok(())
    }

    /// Adds an abbreviation under its C+ reading.
    pub fn add(&mut self, abbreviation: &Abbreviation) -> Result<()> {
        let laws = abbreviation
            .expand_in(&self.signature, Dialect::Cplus)
            .map_err(|diagnostic| Error::Law {
                index: self.laws.len(),
                diagnostic,
            })?;
        self.laws.extend(laws);
        Ok(())
    }

    pub fn with_law(mut self, law: CausalLaw) -> Result<Self> {
        self.add_law(law)?;
        Ok(self)
    }

    pub fn with(mut self, abbreviation: Abbreviation) -> Result<Self> {
        self.add(&abbreviation)?;
        Ok(self)
    }

    /// Every head is `⊥` or an atom `c=v`.
    pub fn check_definite(&self) -> Result<()> {
        for (index, law) in self.laws.iter().enumerate() {
            if !matches!(law.head, Formula::False | Formula::Atom(_)) {
                return Err(Error::NonDefinite {
                    index,
                    head: law.head.to_string(),
                });
            }
        }
        Ok(())
    }
}

impl Translation for CplusDescription {
    fn signature(&self) -> &Signature {
        &self.signature
    }

    fn translate(&self, m: usize) -> Result<TimedTheory> {
        self.check_definite()?;
        let mut theory = TimedTheory::new(m);
        for (index, law) in self.laws.iter().enumerate() {
            let origin = Origin::Law { index };
            let cond = double_negation(&law.if_part);
            match law.form {
                LawForm::Static => {
                    for i in 0..=m {
                        theory.push(rule(timestamp(&law.head, i), timestamp(&cond, i)), origin.clone(), i);
                    }
                }
                LawForm::ActionDynamic => {
                    for i in 0..m {
                        theory.push(rule(timestamp(&law.head, i), timestamp(&cond, i)), origin.clone(), i + 1);
                    }
                }
                LawForm::FluentDynamic => {
                    let after = law.after.as_ref().expect("fluent dynamic law has an after part");
                    for i in 0..m {
                        let body = timed_and(timestamp(&cond, i + 1), timestamp(after, i));
                        theory.push(rule(timestamp(&law.head, i + 1), body), origin.clone(), i + 1);
                    }
                }
            }
        }
        push_boilerplate(&mut theory, &self.signature);
        Ok(theory)
    }
}

/// `caused F if G [after H]` becomes `caused F if ¬¬G [after H]`.
pub fn cp2bcp(d: &CplusDescription) -> Result<ActionDescription> {
    d.check_definite()?;
    let mut out = ActionDescription::new(d.signature.clone());
    for law in &d.laws {
        let mut lowered = law.clone();
        lowered.if_part = double_negation(&law.if_part);
        out.add_law(lowered)?;
    }
    Ok(out)
}
