//! Grounding: replaces variables by objects, evaluates side conditions and
//! arithmetic, expands counts, and lowers laws into the chosen language.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use bcplus_core::action::{validate_law, Abbreviation, ActionDescription, CausalLaw, Dialect};
use bcplus_core::formula::{expand_cardinality_capped, Formula, DEFAULT_EXPANSION_LIMIT};
use bcplus_core::frontends::{bc2bcp, cp2bcp, BcDescription, BcLaw, CplusDescription};
use bcplus_core::query::{Maxstep, QuerySpec, StepRef};
use bcplus_core::signature::{Atom, ConstantKind, Signature};
use bcplus_core::translate::{TimedTheory, Translation};
use bcplus_core::Symbol;
use indexmap::IndexMap;

use crate::ast::{self, ArithOp, CompareOp, KindKeyword, LawKind, Program, QueryItem, SortRef, StepAst, Term};
use crate::diagnostic::{Diagnostic, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    BcPlus,
    Bc,
    Cplus,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bc+" | "bcplus" => Ok(Mode::BcPlus),
            "bc" => Ok(Mode::Bc),
            "c+" | "cplus" => Ok(Mode::Cplus),
            _ => Err(format!("unknown language `{s}` (expected bc+, bc or c+)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::BcPlus => "bc+",
            Mode::Bc => "bc",
            Mode::Cplus => "c+",
        })
    }
}

/// A ground description in the language it was written in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Description {
    BcPlus(ActionDescription),
    Bc(BcDescription),
    Cplus(CplusDescription),
}

impl Description {
    /// The equivalent BC+ description.
    pub fn to_bcplus(&self) -> bcplus_core::Result<ActionDescription> {
        match self {
            Description::BcPlus(d) => Ok(d.clone()),
            Description::Bc(d) => Ok(bc2bcp(d)),
            Description::Cplus(d) => cp2bcp(d),
        }
    }
}

impl Translation for Description {
    fn signature(&self) -> &Signature {
        match self {
            Description::BcPlus(d) => &d.signature,
            Description::Bc(d) => &d.signature,
            Description::Cplus(d) => &d.signature,
        }
    }

    fn translate(&self, m: usize) -> bcplus_core::Result<TimedTheory> {
        match self {
            Description::BcPlus(d) => d.translate(m),
            Description::Bc(d) => d.translate(m),
            Description::Cplus(d) => d.translate(m),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Grounded {
    pub description: Description,
    pub queries: Vec<QuerySpec>,
}

impl Grounded {
    pub fn query(&self, label: &str) -> Option<&QuerySpec> {
        self.queries.iter().find(|q| q.label == label)
    }
}

#[derive(Debug, Clone)]
pub struct GroundOptions {
    /// Values for integer names such as `k` in `{B| p(B)}k`.
    pub bindings: BTreeMap<String, i64>,
    pub expansion_limit: u128,
}

impl Default for GroundOptions {
    fn default() -> Self {
        GroundOptions {
            bindings: BTreeMap::new(),
            expansion_limit: DEFAULT_EXPANSION_LIMIT,
        }
    }
}

type GResult<T> = Result<T, Diagnostic>;
type Env = HashMap<String, Symbol>;

/// A ground formula with constant subformulas folded away.
#[derive(Debug, Clone, PartialEq, Eq)]
enum G {
    Const(bool),
    F(Formula<Atom>),
}

impl G {
    fn into_formula(self) -> Formula<Atom> {
        match self {
            G::Const(true) => Formula::top(),
            G::Const(false) => Formula::falsity(),
            G::F(f) => f,
        }
    }

    fn not(self) -> G {
        match self {
            G::Const(b) => G::Const(!b),
            G::F(f) => G::F(Formula::not(f)),
        }
    }

    fn and(self, other: G) -> G {
        match (self, other) {
            (G::Const(false), _) | (_, G::Const(false)) => G::Const(false),
            (G::Const(true), x) | (x, G::Const(true)) => x,
            (G::F(a), G::F(b)) => G::F(Formula::and(a, b)),
        }
    }

    fn or(self, other: G) -> G {
        match (self, other) {
            (G::Const(true), _) | (_, G::Const(true)) => G::Const(true),
            (G::Const(false), x) | (x, G::Const(false)) => x,
            (G::F(a), G::F(b)) => G::F(Formula::or(a, b)),
        }
    }

    fn implies(self, other: G) -> G {
        match (self, other) {
            (G::Const(false), _) | (_, G::Const(true)) => G::Const(true),
            (G::Const(true), x) => x,
            (x, G::Const(false)) => x.not(),
            (G::F(a), G::F(b)) => G::F(Formula::implies(a, b)),
        }
    }

    fn is_false(&self) -> bool {
        *self == G::Const(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Value {
    Constant(Symbol),
    Object(Symbol),
}

#[derive(Debug, Default)]
struct Sort {
    objects: Vec<Symbol>,
    subsorts: Vec<String>,
}

enum Item {
    Causal(CausalLaw),
    Bc(BcLaw),
}

fn product(domains: &[Vec<Symbol>]) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    for d in domains {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Symbol>| {
                d.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    p
                })
            })
            .collect();
    }
    out
}

fn make_symbol(name: &str, args: Vec<Symbol>) -> Symbol {
    if args.is_empty() {
        Symbol::name(name)
    } else {
        Symbol::app(name, args)
    }
}

struct Grounder<'a> {
    mode: Mode,
    opts: &'a GroundOptions,
    sorts: IndexMap<String, Sort>,
    objects: HashSet<Symbol>,
    sig: Signature,
    arity: HashMap<String, usize>,
    variables: HashMap<String, SortRef>,
}

pub fn ground(prog: &Program, mode: Mode, opts: &GroundOptions) -> GResult<Grounded> {
    let mut g = Grounder {
        mode,
        opts,
        sorts: IndexMap::new(),
        objects: HashSet::new(),
        sig: Signature::new(),
        arity: HashMap::new(),
        variables: HashMap::new(),
    };
    g.declare_sorts(prog)?;
    g.declare_objects(prog)?;
    let mut items = g.declare_constants(prog)?;
    g.declare_variables(prog)?;
    for law in &prog.laws {
        items.extend(g.ground_law(law)?);
    }
    let description = g.assemble(items)?;
    let queries = g.queries(prog)?;
    Ok(Grounded {
        description,
        queries,
    })
}

impl Grounder<'_> {
    fn declare_sorts(&mut self, prog: &Program) -> GResult<()> {
        for decl in &prog.sorts {
            for (name, _) in &decl.chain {
                self.sorts.entry(name.clone()).or_default();
            }
            for pair in decl.chain.windows(2) {
                let sub = pair[1].0.clone();
                let sup = &mut self.sorts[&pair[0].0];
                if !sup.subsorts.contains(&sub) {
                    sup.subsorts.push(sub);
                }
            }
        }
        for name in self.sorts.keys() {
            let mut stack = vec![name.clone()];
            let mut seen = HashSet::new();
            while let Some(s) = stack.pop() {
                for sub in &self.sorts[&s].subsorts {
                    if sub == name {
                        return Err(Diagnostic::new(format!("sort `{name}` is its own subsort")));
                    }
                    if seen.insert(sub.clone()) {
                        stack.push(sub.clone());
                    }
                }
            }
        }
        Ok(())
    }

    fn int(&self, t: &Term) -> GResult<i64> {
        match t {
            Term::Int { value, .. } => Ok(*value),
            Term::Id { name, args, span } if args.is_empty() => self
                .opts
                .bindings
                .get(name)
                .copied()
                .ok_or_else(|| Diagnostic::at(*span, format!("`{name}` has no integer value; bind it with {name}=N"))),
            Term::Arith { op, lhs, rhs, span } => {
                let (a, b) = (self.int(lhs)?, self.int(rhs)?);
                arith(*op, a, b).ok_or_else(|| Diagnostic::at(*span, "integer overflow"))
            }
            other => Err(Diagnostic::at(other.span(), "expected an integer")),
        }
    }

    fn object_terms(&self, t: &Term) -> GResult<Vec<Symbol>> {
        match t {
            Term::Range { lo, hi, .. } => Ok((self.int(lo)?..=self.int(hi)?).map(Symbol::int).collect()),
            Term::Int { value, .. } => Ok(vec![Symbol::int(*value)]),
            Term::Arith { .. } => Ok(vec![Symbol::int(self.int(t)?)]),
            Term::Id { name, args, .. } => {
                let parts = args
                    .iter()
                    .map(|a| self.object_terms(a))
                    .collect::<GResult<Vec<_>>>()?;
                Ok(product(&parts)
                    .into_iter()
                    .map(|args| make_symbol(name, args))
                    .collect())
            }
            Term::Var { name, span } => Err(Diagnostic::at(*span, format!("variable {name} in an object declaration"))),
        }
    }

    fn declare_objects(&mut self, prog: &Program) -> GResult<()> {
        for decl in &prog.objects {
            if !self.sorts.contains_key(&decl.sort) {
                return Err(Diagnostic::at(decl.span, format!("unknown sort `{}`", decl.sort)));
            }
            for t in &decl.objects {
                for obj in self.object_terms(t)? {
                    self.objects.insert(obj.clone());
                    let sort = &mut self.sorts[&decl.sort];
                    if !sort.objects.contains(&obj) {
                        sort.objects.push(obj);
                    }
                }
            }
        }
        Ok(())
    }

    fn objects_of(&self, r: &SortRef) -> GResult<Vec<Symbol>> {
        if !self.sorts.contains_key(&r.name) {
            return Err(Diagnostic::at(r.span, format!("unknown sort `{}`", r.name)));
        }
        let mut out = BTreeSet::new();
        let mut stack = vec![r.name.as_str()];
        while let Some(s) = stack.pop() {
            let sort = &self.sorts[s];
            out.extend(sort.objects.iter().cloned());
            stack.extend(sort.subsorts.iter().map(String::as_str));
        }
        let mut out: Vec<Symbol> = out.into_iter().collect();
        if r.star && !out.contains(&Symbol::name("none")) {
            out.push(Symbol::name("none"));
        }
        if out.is_empty() {
            return Err(Diagnostic::at(r.span, format!("sort `{}` has no objects", r.name)));
        }
        Ok(out)
    }

    /// Expands a constant schema such as `loc(block)`; returns the sorts of its
    /// arguments and the ground instances in enumeration order.
    fn schema_instances(&self, t: &Term) -> GResult<(String, Vec<String>, Vec<Vec<Symbol>>)> {
        let Term::Id { name, args, .. } = t else {
            return Err(Diagnostic::at(t.span(), "expected a constant name"));
        };
        let mut sorts = Vec::new();
        let mut domains = Vec::new();
        for a in args {
            let Term::Id { name: sort, args: inner, span } = a else {
                return Err(Diagnostic::at(a.span(), "constant arguments must be sort names"));
            };
            if !inner.is_empty() {
                return Err(Diagnostic::at(*span, "constant arguments must be sort names"));
            }
            let r = SortRef {
                name: sort.clone(),
                star: false,
                span: *span,
            };
            domains.push(self.objects_of(&r)?);
            sorts.push(sort.clone());
        }
        Ok((name.clone(), sorts, product(&domains)))
    }

    fn declare_constants(&mut self, prog: &Program) -> GResult<Vec<(Item, Span)>> {
        let mut generated = Vec::new();
        for decl in &prog.constants {
            let kind = match decl.kind {
                KindKeyword::SimpleFluent | KindKeyword::InertialFluent => ConstantKind::RegularFluent,
                KindKeyword::SdFluent => ConstantKind::StaticallyDeterminedFluent,
                KindKeyword::Action | KindKeyword::ExogenousAction | KindKeyword::Attribute => ConstantKind::Action,
            };
            if self.mode == Mode::Bc
                && kind == ConstantKind::Action
                && (decl.domain.is_some() || decl.kind == KindKeyword::Attribute)
            {
                return Err(Diagnostic::at(decl.span, "bc mode requires Boolean actions"));
            }
            let mut domain = match &decl.domain {
                Some(r) => Some(self.objects_of(r)?),
                None => None,
            };
            if decl.kind == KindKeyword::Attribute {
                let d = domain.get_or_insert_with(|| vec![Symbol::f(), Symbol::t()]);
                if !d.contains(&Symbol::name("none")) {
                    d.push(Symbol::name("none"));
                }
            }
            if let Some(d) = &domain {
                self.objects.extend(d.iter().cloned());
            }
            for schema in &decl.names {
                let (name, sorts, instances) = self.schema_instances(schema)?;
                self.arity.insert(name.clone(), sorts.len());
                for args in instances {
                    let c = make_symbol(&name, args.clone());
                    if self.objects.contains(&c) {
                        return Err(Diagnostic::at(
                            decl.span,
                            format!("`{c}` is declared both as an object and as a constant"),
                        ));
                    }
                    let parent = match decl.kind {
                        KindKeyword::Attribute => Some(self.attribute_parent(decl, &sorts, &args)?),
                        _ => None,
                    };
                    let declared = match &domain {
                        Some(d) => self.sig.declare(c.clone(), kind, d.iter().cloned()),
                        None => self.sig.declare_boolean(c.clone(), kind),
                    };
                    declared
                        .map_err(|e| Diagnostic::at(decl.span, e.to_string()))?
                        .attribute_of = parent.clone();
                    let origin = format!("declaration of {c}");
                    let laws = match (decl.kind, parent) {
                        (KindKeyword::InertialFluent, _) => vec![Abbreviation::Inertial(c.clone())],
                        (KindKeyword::ExogenousAction, _) => vec![Abbreviation::Exogenous(c.clone())],
                        (KindKeyword::Attribute, Some(p)) => attribute_laws(&c, &p),
                        _ => Vec::new(),
                    };
                    for ab in laws {
                        for item in self.lower_abbreviation(&ab, &origin, decl.span)? {
                            generated.push((item, decl.span));
                        }
                    }
                }
            }
        }
        Ok(generated)
    }

    fn attribute_parent(&self, decl: &ast::ConstantDecl, sorts: &[String], args: &[Symbol]) -> GResult<Symbol> {
        let parent = decl.parent.as_ref().expect("parser requires `of` for attributes");
        let (pname, psorts, _) = self.schema_instances(parent)?;
        if psorts != sorts {
            return Err(Diagnostic::at(
                parent.span(),
                "an attribute must take the same arguments as its action",
            ));
        }
        let p = make_symbol(&pname, args.to_vec());
        match self.sig.get(&p) {
            Some(d) if d.kind == ConstantKind::Action && d.is_boolean() => Ok(p),
            _ => Err(Diagnostic::at(
                parent.span(),
                format!("`{p}` must be a Boolean action declared before its attribute"),
            )),
        }
    }

    fn declare_variables(&mut self, prog: &Program) -> GResult<()> {
        for decl in &prog.variables {
            self.objects_of(&decl.sort)?;
            for (name, span) in &decl.names {
                if self.variables.insert(name.clone(), decl.sort.clone()).is_some() {
                    return Err(Diagnostic::at(*span, format!("variable {name} is declared twice")));
                }
            }
        }
        Ok(())
    }

    fn eval(&self, t: &Term, env: &Env) -> GResult<Value> {
        match t {
            Term::Var { name, span } => match env.get(name) {
                Some(v) => Ok(Value::Object(v.clone())),
                None if self.variables.contains_key(name) => {
                    Err(Diagnostic::at(*span, format!("variable {name} is not bound here")))
                }
                None => Err(Diagnostic::at(*span, format!("undeclared variable {name}"))),
            },
            Term::Int { value, .. } => Ok(Value::Object(Symbol::int(*value))),
            Term::Arith { op, lhs, rhs, span } => {
                let a = self.eval_int(lhs, env)?;
                let b = self.eval_int(rhs, env)?;
                let v = arith(*op, a, b).ok_or_else(|| Diagnostic::at(*span, "integer overflow"))?;
                Ok(Value::Object(Symbol::int(v)))
            }
            Term::Range { span, .. } => Err(Diagnostic::at(*span, "ranges are only allowed in object declarations")),
            Term::Id { name, args, span } => {
                let mut ground = Vec::new();
                for a in args {
                    match self.eval(a, env)? {
                        Value::Object(o) => ground.push(o),
                        Value::Constant(c) => {
                            return Err(Diagnostic::at(a.span(), format!("constant `{c}` used as an argument")))
                        }
                    }
                }
                let arity = ground.len();
                let sym = make_symbol(name, ground);
                if self.sig.get(&sym).is_some() {
                    return Ok(Value::Constant(sym));
                }
                if self.objects.contains(&sym) {
                    return Ok(Value::Object(sym));
                }
                if arity == 0 {
                    if let Some(v) = self.opts.bindings.get(name) {
                        return Ok(Value::Object(Symbol::int(*v)));
                    }
                }
                match self.arity.get(name) {
                    Some(n) if *n != arity => Err(Diagnostic::at(
                        *span,
                        format!("`{name}` takes {n} argument(s), not {arity}"),
                    )),
                    Some(_) => Err(Diagnostic::at(*span, format!("`{sym}` is not a declared constant"))),
                    None if arity == 0 => Err(Diagnostic::at(
                        *span,
                        format!("unbound symbol `{name}`; declare it or bind it with {name}=N"),
                    )),
                    None => Err(Diagnostic::at(*span, format!("unknown symbol `{sym}`"))),
                }
            }
        }
    }

    fn eval_int(&self, t: &Term, env: &Env) -> GResult<i64> {
        match self.eval(t, env)? {
            Value::Object(o) => o
                .as_int()
                .ok_or_else(|| Diagnostic::at(t.span(), format!("`{o}` is not an integer"))),
            Value::Constant(c) => Err(Diagnostic::at(t.span(), format!("constant `{c}` used as an integer"))),
        }
    }

    fn boolean_constant(&self, t: &Term, env: &Env) -> GResult<Symbol> {
        match self.eval(t, env)? {
            Value::Constant(c) if self.sig.get(&c).is_some_and(|d| d.is_boolean()) => Ok(c),
            Value::Constant(c) => Err(Diagnostic::at(t.span(), format!("`{c}` is not Boolean; write {c}=v"))),
            Value::Object(o) => Err(Diagnostic::at(t.span(), format!("object `{o}` used as a formula"))),
        }
    }

    /// `oob` is set when an atom with a value outside its constant's domain
    /// is met; such atoms are false.
    fn formula(&self, f: &ast::Formula, env: &Env, oob: &mut bool) -> GResult<G> {
        use ast::Formula as F;
        Ok(match f {
            F::True(_) => G::Const(true),
            F::False(_) => G::Const(false),
            F::Atom(t) => G::F(Formula::Atom(Atom::truth(self.boolean_constant(t, env)?))),
            F::NegAtom(t, _) => G::F(Formula::Atom(Atom::falsity(self.boolean_constant(t, env)?))),
            F::Not(inner, _) => self.formula(inner, env, oob)?.not(),
            F::And(a, b) => self.formula(a, env, oob)?.and(self.formula(b, env, oob)?),
            F::Or(a, b) => self.formula(a, env, oob)?.or(self.formula(b, env, oob)?),
            F::Implies(a, b) => self.formula(a, env, oob)?.implies(self.formula(b, env, oob)?),
            F::Iff(a, b) => {
                let (a, b) = (self.formula(a, env, oob)?, self.formula(b, env, oob)?);
                a.clone().implies(b.clone()).and(b.implies(a))
            }
            F::Compare { op, lhs, rhs, span } => self.compare(*op, lhs, rhs, *span, env, oob)?,
            F::Count {
                lower,
                vars,
                element,
                upper,
                span,
            } => self.count(lower.as_ref(), vars, element, upper.as_ref(), *span, env)?,
        })
    }

    fn compare(&self, op: CompareOp, lhs: &Term, rhs: &Term, span: Span, env: &Env, oob: &mut bool) -> GResult<G> {
        let (l, r) = (self.eval(lhs, env)?, self.eval(rhs, env)?);
        let (c, v) = match (l, r) {
            (Value::Constant(c), Value::Object(v)) | (Value::Object(v), Value::Constant(c)) => (c, v),
            (Value::Constant(_), Value::Constant(_)) => {
                return Err(Diagnostic::at(span, "comparing two constants is not supported"))
            }
            (Value::Object(a), Value::Object(b)) => {
                let holds = match op {
                    CompareOp::Eq => a == b,
                    CompareOp::Neq => a != b,
                    _ => {
                        let (Some(x), Some(y)) = (a.as_int(), b.as_int()) else {
                            return Err(Diagnostic::at(span, "ordering comparisons need integers"));
                        };
                        match op {
                            CompareOp::Lt => x < y,
                            CompareOp::Le => x <= y,
                            CompareOp::Gt => x > y,
                            _ => x >= y,
                        }
                    }
                };
                return Ok(G::Const(holds));
            }
        };
        let atom = Atom::new(c, v);
        let g = if self.sig.contains_atom(&atom) {
            G::F(Formula::Atom(atom))
        } else {
            *oob = true;
            G::Const(false)
        };
        match op {
            CompareOp::Eq => Ok(g),
            CompareOp::Neq => Ok(g.not()),
            _ => Err(Diagnostic::at(span, "constants can only be compared with = and \\=")),
        }
    }

    fn assignments(&self, vars: &[(String, Span)], base: &Env) -> GResult<Vec<Env>> {
        let mut domains = Vec::new();
        for (name, span) in vars {
            let sort = self
                .variables
                .get(name)
                .ok_or_else(|| Diagnostic::at(*span, format!("undeclared variable {name}")))?;
            domains.push(self.objects_of(sort)?);
        }
        Ok(product(&domains)
            .into_iter()
            .map(|values| {
                let mut env = base.clone();
                for ((name, _), v) in vars.iter().zip(values) {
                    env.insert(name.clone(), v);
                }
                env
            })
            .collect())
    }

    fn bound(&self, t: Option<&Term>, env: &Env) -> GResult<Option<usize>> {
        let Some(t) = t else { return Ok(None) };
        let v = self.eval_int(t, env)?;
        usize::try_from(v)
            .map(Some)
            .map_err(|_| Diagnostic::at(t.span(), format!("count bound {v} is negative")))
    }

    fn count(
        &self,
        lower: Option<&Term>,
        vars: &[(String, Span)],
        element: &ast::Formula,
        upper: Option<&Term>,
        span: Span,
        env: &Env,
    ) -> GResult<G> {
        let mut atoms: Vec<Atom> = Vec::new();
        for inner in self.assignments(vars, env)? {
            match self.formula(element, &inner, &mut false)? {
                G::Const(false) => {}
                G::F(Formula::Atom(a)) => {
                    if !atoms.contains(&a) {
                        atoms.push(a);
                    }
                }
                _ => return Err(Diagnostic::at(element.span(), "count elements must be atoms")),
            }
        }
        let (lo, hi) = (self.bound(lower, env)?, self.bound(upper, env)?);
        let f = expand_cardinality_capped(lo, &atoms, hi, self.opts.expansion_limit)
            .map_err(|e| Diagnostic::at(span, e.to_string()))?;
        Ok(fold(f))
    }

    fn opt(&self, f: &Option<ast::Formula>, env: &Env) -> GResult<G> {
        match f {
            Some(f) => self.formula(f, env, &mut false),
            None => Ok(G::Const(true)),
        }
    }

    fn constant(&self, t: &Term, env: &Env) -> GResult<Symbol> {
        match self.eval(t, env)? {
            Value::Constant(c) => Ok(c),
            Value::Object(o) => Err(Diagnostic::at(t.span(), format!("`{o}` is not a constant"))),
        }
    }

    fn ground_law(&self, law: &ast::Law) -> GResult<Vec<(Item, Span)>> {
        let mut vars = Vec::new();
        law_vars(&law.kind, &mut vars);
        let mut out = Vec::new();
        for env in self.assignments(&vars, &Env::new())? {
            let origin = if vars.is_empty() {
                law.text.clone()
            } else {
                let binding: Vec<String> = vars.iter().map(|(v, _)| format!("{v}={}", env[v])).collect();
                format!("{} [{}]", law.text, binding.join(", "))
            };
            let items = match self.mode {
                Mode::Bc => self.lower_bc(&law.kind, &env, law.span)?,
                _ => self.lower_causal(&law.kind, &env, &origin, law.span)?,
            };
            out.extend(items.into_iter().map(|i| (i, law.span)));
        }
        Ok(out)
    }

    fn lower_causal(&self, kind: &LawKind, env: &Env, origin: &str, span: Span) -> GResult<Vec<Item>> {
        let ab = match kind {
            LawKind::Caused {
                head,
                if_part,
                after,
                ifcons,
            } => {
                if let Some(f) = ifcons {
                    return Err(Diagnostic::at(f.span(), format!("`ifcons` is only available in bc mode, not {}", self.mode)));
                }
                let mut oob = false;
                let head = self.formula(head, env, &mut oob)?;
                let body = self.opt(if_part, env)?;
                let after = match after {
                    Some(a) => Some(self.formula(a, env, &mut false)?),
                    None => None,
                };
                if oob || head == G::Const(true) || body.is_false() || after.as_ref().is_some_and(G::is_false) {
                    return Ok(Vec::new());
                }
                let law = CausalLaw::caused(
                    &self.sig,
                    head.into_formula(),
                    body.into_formula(),
                    after.map(G::into_formula),
                )
                .with_origin(origin);
                validate_law(&law, &self.sig).map_err(|d| Diagnostic::at(span, format!("{d} in `{origin}`")))?;
                return Ok(vec![Item::Causal(law)]);
            }
            LawKind::Default { head, if_part, after } => {
                let mut oob = false;
                let head = self.formula(head, env, &mut oob)?;
                let body = self.opt(if_part, env)?;
                let after = match after {
                    Some(a) => Some(self.formula(a, env, &mut false)?),
                    None => None,
                };
                if oob || matches!(head, G::Const(_)) || body.is_false() || after.as_ref().is_some_and(G::is_false) {
                    return Ok(Vec::new());
                }
                Abbreviation::Default {
                    head: head.into_formula(),
                    if_part: body.into_formula(),
                    after: after.map(G::into_formula),
                }
            }
            LawKind::Causes {
                action,
                effect,
                if_part,
            } => {
                let action = self.formula(action, env, &mut false)?;
                let mut oob = false;
                let effect = self.formula(effect, env, &mut oob)?;
                let body = self.opt(if_part, env)?;
                if oob || action.is_false() || body.is_false() || effect == G::Const(true) {
                    return Ok(Vec::new());
                }
                Abbreviation::Causes {
                    action: action.into_formula(),
                    effect: effect.into_formula(),
                    if_part: body.into_formula(),
                }
            }
            LawKind::Exogenous(t) => Abbreviation::Exogenous(self.constant(t, env)?),
            LawKind::Inertial(t) => Abbreviation::Inertial(self.constant(t, env)?),
            LawKind::Constraint(f) | LawKind::Always(f) => {
                let g = self.formula(f, env, &mut false)?;
                if g == G::Const(true) {
                    return Ok(Vec::new());
                }
                if matches!(kind, LawKind::Constraint(_)) {
                    Abbreviation::Constraint(g.into_formula())
                } else {
                    Abbreviation::Always(g.into_formula())
                }
            }
            LawKind::Nonexecutable { action, if_part } => {
                let action = self.formula(action, env, &mut false)?;
                let body = self.opt(if_part, env)?;
                if action.is_false() || body.is_false() {
                    return Ok(Vec::new());
                }
                Abbreviation::Nonexecutable {
                    action: action.into_formula(),
                    if_part: body.into_formula(),
                }
            }
        };
        self.lower_abbreviation(&ab, origin, span)
    }

    fn lower_abbreviation(&self, ab: &Abbreviation, origin: &str, span: Span) -> GResult<Vec<Item>> {
        if self.mode == Mode::Bc {
            return self.lower_bc_abbreviation(ab, span);
        }
        let dialect = if self.mode == Mode::Cplus {
            Dialect::Cplus
        } else {
            Dialect::BcPlus
        };
        let laws = ab
            .expand_in(&self.sig, dialect)
            .map_err(|d| Diagnostic::at(span, format!("{d} in `{origin}`")))?;
        Ok(laws
            .into_iter()
            .map(|l| Item::Causal(l.with_origin(origin)))
            .collect())
    }

    fn atoms(&self, g: G, span: Span, what: &str) -> GResult<Option<Vec<Atom>>> {
        match g {
            G::Const(false) => Ok(None),
            G::Const(true) => Ok(Some(Vec::new())),
            G::F(f) => f
                .conjuncts()
                .into_iter()
                .map(|c| match c {
                    Formula::Atom(a) => Ok(a.clone()),
                    _ => Err(Diagnostic::at(span, format!("bc mode allows only a conjunction of atoms in {what}"))),
                })
                .collect::<GResult<Vec<_>>>()
                .map(Some),
        }
    }

    fn head_atom(&self, f: &ast::Formula, env: &Env) -> GResult<Option<Atom>> {
        let mut oob = false;
        match self.formula(f, env, &mut oob)? {
            _ if oob => Ok(None),
            G::F(Formula::Atom(a)) => Ok(Some(a)),
            _ => Err(Diagnostic::at(f.span(), "bc heads must be atoms")),
        }
    }

    fn part(&self, f: &Option<ast::Formula>, env: &Env, span: Span, what: &str) -> GResult<Option<Vec<Atom>>> {
        let g = self.opt(f, env)?;
        self.atoms(g, f.as_ref().map_or(span, ast::Formula::span), what)
    }

    #[allow(clippy::too_many_arguments)]
    fn bc_caused(
        &self,
        head: &ast::Formula,
        if_part: &Option<ast::Formula>,
        after: &Option<ast::Formula>,
        ifcons: &Option<ast::Formula>,
        default: bool,
        env: &Env,
        span: Span,
    ) -> GResult<Option<BcLaw>> {
        if if_part.is_some() && after.is_some() {
            return Err(Diagnostic::at(span, "a bc law has an `if` part or an `after` part, not both"));
        }
        let Some(h) = self.head_atom(head, env)? else {
            return Ok(None);
        };
        let Some(mut cons) = self.part(ifcons, env, span, "`ifcons`")? else {
            return Ok(None);
        };
        if default {
            cons.push(h.clone());
        }
        Ok(match after {
            Some(_) => self
                .part(after, env, span, "`after`")?
                .map(|body| BcLaw::dynamic(h, body, cons)),
            None => self
                .part(if_part, env, span, "`if`")?
                .map(|body| BcLaw::static_law(h, body, cons)),
        })
    }

    fn lower_bc(&self, kind: &LawKind, env: &Env, span: Span) -> GResult<Vec<Item>> {
        let law = match kind {
            LawKind::Caused {
                head,
                if_part,
                after,
                ifcons,
            } => match self.bc_caused(head, if_part, after, ifcons, false, env, span)? {
                Some(law) => law,
                None => return Ok(Vec::new()),
            },
            LawKind::Default { head, if_part, after } => {
                match self.bc_caused(head, if_part, after, &None, true, env, span)? {
                    Some(law) => law,
                    None => return Ok(Vec::new()),
                }
            }
            LawKind::Causes {
                action,
                effect,
                if_part,
            } => {
                let Some(h) = self.head_atom(effect, env)? else {
                    return Ok(Vec::new());
                };
                let a = self.formula(action, env, &mut false)?;
                let Some(mut body) = self.atoms(a, action.span(), "the action")? else {
                    return Ok(Vec::new());
                };
                let Some(rest) = self.part(if_part, env, span, "`if`")? else {
                    return Ok(Vec::new());
                };
                body.extend(rest);
                BcLaw::dynamic(h, body, [])
            }
            LawKind::Exogenous(t) => {
                return self.lower_bc_abbreviation(&Abbreviation::Exogenous(self.constant(t, env)?), span)
            }
            LawKind::Inertial(t) => {
                return self.lower_bc_abbreviation(&Abbreviation::Inertial(self.constant(t, env)?), span)
            }
            LawKind::Constraint(_) => return Err(Diagnostic::at(span, "`constraint` is not available in bc mode")),
            LawKind::Always(_) => return Err(Diagnostic::at(span, "`always` is not available in bc mode")),
            LawKind::Nonexecutable { .. } => {
                return Err(Diagnostic::at(span, "`nonexecutable` is not available in bc mode"))
            }
        };
        Ok(vec![Item::Bc(law)])
    }

    fn lower_bc_abbreviation(&self, ab: &Abbreviation, span: Span) -> GResult<Vec<Item>> {
        match ab {
            Abbreviation::Exogenous(c) => match self.sig.kind_of(c) {
                Some(ConstantKind::Action) => Ok(Vec::new()),
                _ => Err(Diagnostic::at(span, format!("exogenous requires an action constant, not `{c}`"))),
            },
            Abbreviation::Inertial(c) => match self.sig.get(c) {
                Some(d) if d.kind == ConstantKind::RegularFluent => Ok(d
                    .atoms()
                    .map(|a| Item::Bc(BcLaw::dynamic(a.clone(), [a.clone()], [a])))
                    .collect()),
                _ => Err(Diagnostic::at(span, format!("inertial requires a regular fluent constant, not `{c}`"))),
            },
            _ => Err(Diagnostic::at(span, "this abbreviation is not available in bc mode")),
        }
    }

    fn assemble(&self, items: Vec<(Item, Span)>) -> GResult<Description> {
        let core_err = |span: Span| move |e: bcplus_core::Error| Diagnostic::at(span, e.to_string());
        match self.mode {
            Mode::Bc => {
                let mut d = BcDescription::new(self.sig.clone()).map_err(|e| Diagnostic::new(e.to_string()))?;
                for (item, span) in items {
                    if let Item::Bc(law) = item {
                        d.add_law(law).map_err(core_err(span))?;
                    }
                }
                Ok(Description::Bc(d))
            }
            mode => {
                let laws = items
                    .into_iter()
                    .filter_map(|(item, _)| match item {
                        Item::Causal(l) => Some(l),
                        Item::Bc(_) => None,
                    })
                    .collect();
                Ok(if mode == Mode::Cplus {
                    Description::Cplus(CplusDescription {
                        signature: self.sig.clone(),
                        laws,
                    })
                } else {
                    Description::BcPlus(ActionDescription {
                        signature: self.sig.clone(),
                        laws,
                    })
                })
            }
        }
    }

    fn queries(&self, prog: &Program) -> GResult<Vec<QuerySpec>> {
        let mut out: Vec<QuerySpec> = Vec::new();
        for (i, decl) in prog.queries.iter().enumerate() {
            let mut q = QuerySpec::new((i + 1).to_string(), Maxstep::Unbounded);
            for item in &decl.items {
                match item {
                    QueryItem::Label(l, span) => {
                        if out.iter().any(|o| o.label == *l) {
                            return Err(Diagnostic::at(*span, format!("query label `{l}` is used twice")));
                        }
                        q.label = l.clone();
                    }
                    QueryItem::Maxstep(t) => {
                        let m = self.eval_int(t, &Env::new())?;
                        let m = usize::try_from(m)
                            .map_err(|_| Diagnostic::at(t.span(), format!("maxstep {m} is negative")))?;
                        q.maxstep = Maxstep::Fixed(m);
                    }
                    QueryItem::Constraint { step, formula, span } => {
                        let step = match step {
                            StepAst::Maxstep => StepRef::Maxstep,
                            StepAst::At(i) => StepRef::At(
                                usize::try_from(*i)
                                    .map_err(|_| Diagnostic::at(*span, format!("step {i} is negative")))?,
                            ),
                        };
                        match self.formula(formula, &Env::new(), &mut false)? {
                            G::Const(true) => {}
                            g => q.constraints.push((step, g.into_formula())),
                        }
                    }
                }
            }
            out.push(q);
        }
        Ok(out)
    }
}

/// `exogenous c` and `always c=none <-> ¬a`, the latter as two
/// nonexecutable laws.
fn attribute_laws(c: &Symbol, parent: &Symbol) -> Vec<Abbreviation> {
    let none = Formula::Atom(Atom::new(c.clone(), Symbol::name("none")));
    let act = Formula::Atom(Atom::truth(parent.clone()));
    vec![
        Abbreviation::Exogenous(c.clone()),
        Abbreviation::Nonexecutable {
            action: Formula::and(none.clone(), act.clone()),
            if_part: Formula::top(),
        },
        Abbreviation::Nonexecutable {
            action: Formula::and(Formula::not(none), Formula::not(act)),
            if_part: Formula::top(),
        },
    ]
}

fn arith(op: ArithOp, a: i64, b: i64) -> Option<i64> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
    }
}

fn fold(f: Formula<Atom>) -> G {
    if f.is_top() {
        G::Const(true)
    } else if f.is_false() {
        G::Const(false)
    } else {
        G::F(f)
    }
}

fn term_vars(t: &Term, bound: &[String], out: &mut Vec<(String, Span)>) {
    match t {
        Term::Var { name, span } => {
            if !bound.contains(name) && !out.iter().any(|(v, _)| v == name) {
                out.push((name.clone(), *span));
            }
        }
        Term::Id { args, .. } => args.iter().for_each(|a| term_vars(a, bound, out)),
        Term::Arith { lhs, rhs, .. } | Term::Range { lo: lhs, hi: rhs, .. } => {
            term_vars(lhs, bound, out);
            term_vars(rhs, bound, out);
        }
        Term::Int { .. } => {}
    }
}

fn formula_vars(f: &ast::Formula, bound: &mut Vec<String>, out: &mut Vec<(String, Span)>) {
    use ast::Formula as F;
    match f {
        F::True(_) | F::False(_) => {}
        F::Atom(t) | F::NegAtom(t, _) => term_vars(t, bound, out),
        F::Compare { lhs, rhs, .. } => {
            term_vars(lhs, bound, out);
            term_vars(rhs, bound, out);
        }
        F::Not(inner, _) => formula_vars(inner, bound, out),
        F::And(a, b) | F::Or(a, b) | F::Implies(a, b) | F::Iff(a, b) => {
            formula_vars(a, bound, out);
            formula_vars(b, bound, out);
        }
        F::Count {
            lower,
            vars,
            element,
            upper,
            ..
        } => {
            for t in lower.iter().chain(upper.iter()) {
                term_vars(t, bound, out);
            }
            let depth = bound.len();
            bound.extend(vars.iter().map(|(v, _)| v.clone()));
            formula_vars(element, bound, out);
            bound.truncate(depth);
        }
    }
}

fn law_vars(kind: &LawKind, out: &mut Vec<(String, Span)>) {
    let mut bound = Vec::new();
    let mut visit = |f: &Option<ast::Formula>, out: &mut Vec<(String, Span)>| {
        if let Some(f) = f {
            formula_vars(f, &mut bound, out);
        }
    };
    match kind {
        LawKind::Caused {
            head,
            if_part,
            after,
            ifcons,
        } => {
            visit(&Some(head.clone()), out);
            visit(if_part, out);
            visit(after, out);
            visit(ifcons, out);
        }
        LawKind::Default { head, if_part, after } => {
            visit(&Some(head.clone()), out);
            visit(if_part, out);
            visit(after, out);
        }
        LawKind::Causes {
            action,
            effect,
            if_part,
        } => {
            visit(&Some(action.clone()), out);
            visit(&Some(effect.clone()), out);
            visit(if_part, out);
        }
        LawKind::Exogenous(t) | LawKind::Inertial(t) => term_vars(t, &[], out),
        LawKind::Constraint(f) | LawKind::Always(f) => visit(&Some(f.clone()), out),
        LawKind::Nonexecutable { action, if_part } => {
            visit(&Some(action.clone()), out);
            visit(if_part, out);
        }
    }
}
