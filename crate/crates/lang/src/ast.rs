//! Syntax trees for action description files. Every node carries the
//! position where it starts.

use crate::diagnostic::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    /// `name` or `name(args)`: an object, constant, sort or binding name.
    Id { name: String, args: Vec<Term>, span: Span },
    Var { name: String, span: Span },
    Int { value: i64, span: Span },
    Arith { op: ArithOp, lhs: Box<Term>, rhs: Box<Term>, span: Span },
    /// `lo..hi`, allowed in object declarations only.
    Range { lo: Box<Term>, hi: Box<Term>, span: Span },
}

impl Term {
    pub fn span(&self) -> Span {
        match self {
            Term::Id { span, .. }
            | Term::Var { span, .. }
            | Term::Int { span, .. }
            | Term::Arith { span, .. }
            | Term::Range { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True(Span),
    False(Span),
    /// A Boolean constant used as a formula, `c` for `c=t`.
    Atom(Term),
    /// `~c`, the atom `c=f`.
    NegAtom(Term, Span),
    Compare { op: CompareOp, lhs: Term, rhs: Term, span: Span },
    Not(Box<Formula>, Span),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// `l{X1,…,Xn | F}u`.
    Count {
        lower: Option<Term>,
        vars: Vec<(String, Span)>,
        element: Box<Formula>,
        upper: Option<Term>,
        span: Span,
    },
}

impl Formula {
    pub fn span(&self) -> Span {
        match self {
            Formula::True(s) | Formula::False(s) | Formula::NegAtom(_, s) | Formula::Not(_, s) => *s,
            Formula::Atom(t) => t.span(),
            Formula::Compare { span, .. } | Formula::Count { span, .. } => *span,
            Formula::And(l, _) | Formula::Or(l, _) | Formula::Implies(l, _) | Formula::Iff(l, _) => l.span(),
        }
    }
}

/// A sort name, optionally starred (`location*` adds the object `none`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortRef {
    pub name: String,
    pub star: bool,
    pub span: Span,
}

/// `a >> b >> c`: each sort is a supersort of the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortDecl {
    pub chain: Vec<(String, Span)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectDecl {
    pub objects: Vec<Term>,
    pub sort: String,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindKeyword {
    SimpleFluent,
    InertialFluent,
    SdFluent,
    Action,
    ExogenousAction,
    Attribute,
}

impl KindKeyword {
    pub fn parse(word: &str) -> Option<Self> {
        Some(match word {
            "simpleFluent" => KindKeyword::SimpleFluent,
            "inertialFluent" => KindKeyword::InertialFluent,
            "sdFluent" => KindKeyword::SdFluent,
            "action" => KindKeyword::Action,
            "exogenousAction" => KindKeyword::ExogenousAction,
            "attribute" => KindKeyword::Attribute,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantDecl {
    /// Constant schemas such as `loc(block)`; arguments name sorts.
    pub names: Vec<Term>,
    pub kind: KindKeyword,
    /// `None` means Boolean.
    pub domain: Option<SortRef>,
    /// For attributes: the action schema after `of`.
    pub parent: Option<Term>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableDecl {
    pub names: Vec<(String, Span)>,
    pub sort: SortRef,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LawKind {
    Caused {
        head: Formula,
        if_part: Option<Formula>,
        after: Option<Formula>,
        ifcons: Option<Formula>,
    },
    Default {
        head: Formula,
        if_part: Option<Formula>,
        after: Option<Formula>,
    },
    Causes {
        action: Formula,
        effect: Formula,
        if_part: Option<Formula>,
    },
    Exogenous(Term),
    Inertial(Term),
    Constraint(Formula),
    Always(Formula),
    Nonexecutable {
        action: Formula,
        if_part: Option<Formula>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Law {
    pub kind: LawKind,
    pub span: Span,
    /// The law's source text, whitespace-normalized.
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepAst {
    At(i64),
    Maxstep,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryItem {
    Label(String, Span),
    Maxstep(Term),
    Constraint { step: StepAst, formula: Formula, span: Span },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryDecl {
    pub items: Vec<QueryItem>,
    pub span: Span,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub sorts: Vec<SortDecl>,
    pub objects: Vec<ObjectDecl>,
    pub constants: Vec<ConstantDecl>,
    pub variables: Vec<VariableDecl>,
    pub laws: Vec<Law>,
    pub queries: Vec<QueryDecl>,
}
