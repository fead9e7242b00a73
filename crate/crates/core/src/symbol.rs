//! Ground symbols used for constant names and domain elements.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// A ground term: an integer or a function symbol applied to ground terms.
///
/// Symbols are cheap to clone. Integers order before function terms and
/// compare numerically, so `b(2)` sorts before `b(10)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Symbol(Arc<SymbolData>);

#[derive(Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum SymbolData {
    Int(i64),
    App(Box<str>, Vec<Symbol>),
}

impl Symbol {
    /// A nullary symbol such as `table` or `s1`.
    pub fn name(name: &str) -> Self {
        Symbol(Arc::new(SymbolData::App(name.into(), Vec::new())))
    }

    pub fn app(functor: &str, args: impl IntoIterator<Item = Symbol>) -> Self {
        Symbol(Arc::new(SymbolData::App(
            functor.into(),
            args.into_iter().collect(),
        )))
    }

    pub fn int(value: i64) -> Self {
        Symbol(Arc::new(SymbolData::Int(value)))
    }

    /// The Boolean value `t`.
    pub fn t() -> Self {
        Symbol::name("t")
    }

    /// The Boolean value `f`.
    pub fn f() -> Self {
        Symbol::name("f")
    }

    pub fn as_int(&self) -> Option<i64> {
        match *self.0 {
            SymbolData::Int(v) => Some(v),
            SymbolData::App(..) => None,
        }
    }

    /// Functor name; `None` for integers.
    pub fn functor(&self) -> Option<&str> {
        match &*self.0 {
            SymbolData::Int(_) => None,
            SymbolData::App(name, _) => Some(name),
        }
    }

    pub fn args(&self) -> &[Symbol] {
        match &*self.0 {
            SymbolData::Int(_) => &[],
            SymbolData::App(_, args) => args,
        }
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.cmp(&other.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            SymbolData::Int(v) => write!(f, "{v}"),
            SymbolData::App(name, args) => {
                f.write_str(name)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::name(s)
    }
}

impl From<i64> for Symbol {
    fn from(v: i64) -> Self {
        Symbol::int(v)
    }
}
