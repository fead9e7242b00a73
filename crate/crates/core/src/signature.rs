//! Constants, their kinds and finite domains, and the atoms `c=v` they induce.

use std::fmt;

use indexmap::IndexMap;

use crate::error::DeclarationError;
use crate::symbol::Symbol;

/// A propositional atom `c=v`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub constant: Symbol,
    pub value: Symbol,
}

impl Atom {
    pub fn new(constant: impl Into<Symbol>, value: impl Into<Symbol>) -> Self {
        Atom {
            constant: constant.into(),
            value: value.into(),
        }
    }

    /// `c=t`, written `c` for Boolean constants.
    pub fn truth(constant: impl Into<Symbol>) -> Self {
        Atom::new(constant, Symbol::t())
    }

    /// `c=f`, written `~c` for Boolean constants.
    pub fn falsity(constant: impl Into<Symbol>) -> Self {
        Atom::new(constant, Symbol::f())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.constant, self.value)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstantKind {
    Action,
    RegularFluent,
    StaticallyDeterminedFluent,
}

impl ConstantKind {
    pub fn is_fluent(self) -> bool {
        !matches!(self, ConstantKind::Action)
    }
}

impl fmt::Display for ConstantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstantKind::Action => "action",
            ConstantKind::RegularFluent => "regular fluent",
            ConstantKind::StaticallyDeterminedFluent => "statically determined fluent",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantDecl {
    pub name: Symbol,
    pub kind: ConstantKind,
    pub domain: Vec<Symbol>,
    /// For action attributes: the Boolean action this constant qualifies.
    pub attribute_of: Option<Symbol>,
}

impl ConstantDecl {
    pub fn is_boolean(&self) -> bool {
        self.domain.len() == 2
            && self.domain.contains(&Symbol::t())
            && self.domain.contains(&Symbol::f())
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.domain.iter().map(|v| Atom::new(self.name.clone(), v.clone()))
    }
}

/// An ordered set of constant declarations; iteration follows declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    constants: IndexMap<Symbol, ConstantDecl>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a constant. Domains must have at least two distinct elements.
    pub fn declare(
        &mut self,
        name: impl Into<Symbol>,
        kind: ConstantKind,
        domain: impl IntoIterator<Item = Symbol>,
    ) -> Result<&mut ConstantDecl, DeclarationError> {
        let name = name.into();
        let mut values: Vec<Symbol> = Vec::new();
        for v in domain {
            if values.contains(&v) {
                return Err(DeclarationError::DuplicateValue {
                    constant: name,
                    value: v,
                });
            }
            values.push(v);
        }
        if values.len() < 2 {
            return Err(DeclarationError::DomainTooSmall {
                constant: name,
                size: values.len(),
            });
        }
        if self.constants.contains_key(&name) {
            return Err(DeclarationError::DuplicateConstant(name));
        }
        let decl = ConstantDecl {
            name: name.clone(),
            kind,
            domain: values,
            attribute_of: None,
        };
        Ok(self.constants.entry(name).or_insert(decl))
    }

    /// Declares a Boolean constant with domain `{f, t}`.
    pub fn declare_boolean(
        &mut self,
        name: impl Into<Symbol>,
        kind: ConstantKind,
    ) -> Result<&mut ConstantDecl, DeclarationError> {
        self.declare(name, kind, [Symbol::f(), Symbol::t()])
    }

    /// Builder form of [`Signature::declare`].
    pub fn with(
        mut self,
        name: impl Into<Symbol>,
        kind: ConstantKind,
        domain: impl IntoIterator<Item = Symbol>,
    ) -> Result<Self, DeclarationError> {
        self.declare(name, kind, domain)?;
        Ok(self)
    }

    pub fn with_boolean(
        mut self,
        name: impl Into<Symbol>,
        kind: ConstantKind,
    ) -> Result<Self, DeclarationError> {
        self.declare_boolean(name, kind)?;
        Ok(self)
    }

    pub fn get(&self, name: &Symbol) -> Option<&ConstantDecl> {
        self.constants.get(name)
    }

    pub fn kind_of(&self, name: &Symbol) -> Option<ConstantKind> {
        self.constants.get(name).map(|d| d.kind)
    }

    pub fn constants(&self) -> impl Iterator<Item = &ConstantDecl> {
        self.constants.values()
    }

    pub fn len(&self) -> usize {
        self.constants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constants.is_empty()
    }

    pub fn contains_atom(&self, atom: &Atom) -> bool {
        self.constants
            .get(&atom.constant)
            .is_some_and(|d| d.domain.contains(&atom.value))
    }

    /// All atoms `c=v`, constants in declaration order, values in domain order.
    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.constants.values().flat_map(|d| d.atoms())
    }

    pub fn fluents(&self) -> impl Iterator<Item = &ConstantDecl> {
        self.constants().filter(|d| d.kind.is_fluent())
    }

    pub fn actions(&self) -> impl Iterator<Item = &ConstantDecl> {
        self.constants()
            .filter(|d| d.kind == ConstantKind::Action)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domains_need_two_elements() {
        let err = Signature::new()
            .with("c", ConstantKind::RegularFluent, [Symbol::int(1)])
            .unwrap_err();
        assert!(matches!(err, DeclarationError::DomainTooSmall { size: 1, .. }));
    }

    #[test]
    fn duplicate_constants_rejected() {
        let err = Signature::new()
            .with_boolean("p", ConstantKind::RegularFluent)
            .unwrap()
            .with_boolean("p", ConstantKind::Action)
            .unwrap_err();
        assert!(matches!(err, DeclarationError::DuplicateConstant(_)));
    }

    #[test]
    fn atoms_follow_declaration_order() {
        let sig = Signature::new()
            .with_boolean("q", ConstantKind::RegularFluent)
            .unwrap()
            .with_boolean("a", ConstantKind::Action)
            .unwrap();
        let atoms: Vec<String> = sig.atoms().map(|a| a.to_string()).collect();
        assert_eq!(atoms, ["q=f", "q=t", "a=f", "a=t"]);
        assert!(sig.get(&"q".into()).unwrap().is_boolean());
    }
}
