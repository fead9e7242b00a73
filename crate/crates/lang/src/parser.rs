use crate::ast::*;
use crate::diagnostic::{Diagnostic, Span};
use crate::lexer::{tokenize, Tok, Token};

const KEYWORDS: &[&str] = &[
    "caused",
    "if",
    "after",
    "ifcons",
    "causes",
    "default",
    "exogenous",
    "inertial",
    "constraint",
    "always",
    "nonexecutable",
    "true",
    "false",
    "maxstep",
    "label",
    "of",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

pub fn parse(src: &str) -> Result<Program, Diagnostic> {
    let tokens = tokenize(src)?;
    let chars: Vec<char> = src.chars().collect();
    let mut p = Parser {
        tokens,
        pos: 0,
        chars,
    };
    p.program()
}

/// Parses a single formula, for queries supplied outside a file.
pub fn parse_formula(src: &str) -> Result<Formula, Diagnostic> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        chars: Vec::new(),
    };
    let f = p.formula()?;
    p.expect(Tok::Eof)?;
    Ok(f)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    chars: Vec<char>,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn at_word(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w == word)
    }

    fn eat_word(&mut self, word: &str) -> bool {
        if self.at_word(word) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        Err(Diagnostic::at(
            self.span(),
            format!("expected {wanted}, found {}", self.peek()),
        ))
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            self.unexpected(&tok.to_string())
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(w) if !is_keyword(&w) => {
                let span = self.bump().span;
                Ok((w, span))
            }
            _ => self.unexpected(what),
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let mut prog = Program::default();
        loop {
            match self.peek() {
                Tok::Eof => return Ok(prog),
                Tok::Directive => {
                    self.bump();
                    let (section, span) = match self.peek().clone() {
                        Tok::Ident(w) => (w, self.bump().span),
                        _ => return self.unexpected("a section name"),
                    };
                    match section.as_str() {
                        "sorts" => self.items(|p| {
                            let d = p.sort_decl()?;
                            prog.sorts.push(d);
                            Ok(())
                        })?,
                        "objects" => self.items(|p| {
                            let d = p.object_decl()?;
                            prog.objects.push(d);
                            Ok(())
                        })?,
                        "constants" => self.items(|p| {
                            let d = p.constant_decl()?;
                            prog.constants.push(d);
                            Ok(())
                        })?,
                        "variables" => self.items(|p| {
                            let d = p.variable_decl()?;
                            prog.variables.push(d);
                            Ok(())
                        })?,
                        "query" => {
                            let mut items = Vec::new();
                            self.items(|p| {
                                items.push(p.query_item()?);
                                Ok(())
                            })?;
                            prog.queries.push(QueryDecl { items, span });
                        }
                        other => {
                            return Err(Diagnostic::at(span, format!("unknown section `{other}`")))
                        }
                    }
                }
                _ => {
                    let law = self.law()?;
                    prog.laws.push(law);
                }
            }
        }
    }

    /// Items separated by `;` and terminated by `.`.
    fn items(&mut self, mut item: impl FnMut(&mut Self) -> PResult<()>) -> PResult<()> {
        loop {
            item(self)?;
            match self.peek() {
                Tok::Semi => {
                    self.bump();
                }
                Tok::Dot => {
                    self.bump();
                    return Ok(());
                }
                _ => return self.unexpected("`;` or `.`"),
            }
        }
    }

    fn sort_decl(&mut self) -> PResult<SortDecl> {
        let mut chain = vec![self.ident("a sort name")?];
        while self.eat(&Tok::Supersort) {
            chain.push(self.ident("a sort name")?);
        }
        Ok(SortDecl { chain })
    }

    fn term_list(&mut self) -> PResult<Vec<Term>> {
        let mut out = vec![self.arg()?];
        while self.eat(&Tok::Comma) {
            out.push(self.arg()?);
        }
        Ok(out)
    }

    fn object_decl(&mut self) -> PResult<ObjectDecl> {
        let span = self.span();
        let objects = self.term_list()?;
        self.expect(Tok::ColonColon)?;
        let (sort, _) = self.ident("a sort name")?;
        Ok(ObjectDecl {
            objects,
            sort,
            span,
        })
    }

    fn sort_ref(&mut self) -> PResult<SortRef> {
        let (name, span) = self.ident("a sort name")?;
        let star = self.eat(&Tok::Star);
        Ok(SortRef { name, star, span })
    }

    fn constant_decl(&mut self) -> PResult<ConstantDecl> {
        let span = self.span();
        let names = self.term_list()?;
        self.expect(Tok::ColonColon)?;
        let (word, kspan) = self.ident("a constant kind")?;
        let kind = KindKeyword::parse(&word)
            .ok_or_else(|| Diagnostic::at(kspan, format!("unknown constant kind `{word}`")))?;
        let domain = if self.eat(&Tok::LParen) {
            let s = self.sort_ref()?;
            self.expect(Tok::RParen)?;
            Some(s)
        } else {
            None
        };
        let parent = if self.eat_word("of") {
            Some(self.term()?)
        } else {
            None
        };
        if kind == KindKeyword::Attribute && parent.is_none() {
            return Err(Diagnostic::at(kspan, "attribute declaration needs `of` and an action"));
        }
        if kind != KindKeyword::Attribute && parent.is_some() {
            return Err(Diagnostic::at(kspan, "only attributes take `of`"));
        }
        Ok(ConstantDecl {
            names,
            kind,
            domain,
            parent,
            span,
        })
    }

    fn variable_decl(&mut self) -> PResult<VariableDecl> {
        let span = self.span();
        let mut names = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Var(v) => names.push((v, self.bump().span)),
                _ => return self.unexpected("a variable"),
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::ColonColon)?;
        let sort = self.sort_ref()?;
        Ok(VariableDecl { names, sort, span })
    }

    fn query_item(&mut self) -> PResult<QueryItem> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Ident(w) if w == "label" => {
                self.bump();
                self.expect(Tok::ColonColon)?;
                match self.bump().tok {
                    Tok::Ident(l) => Ok(QueryItem::Label(l, span)),
                    Tok::Int(v) => Ok(QueryItem::Label(v.to_string(), span)),
                    _ => Err(Diagnostic::at(span, "expected a query label")),
                }
            }
            Tok::Ident(w) if w == "maxstep" => {
                self.bump();
                if self.eat(&Tok::ColonColon) {
                    Ok(QueryItem::Maxstep(self.term()?))
                } else {
                    self.expect(Tok::Colon)?;
                    let formula = self.formula()?;
                    Ok(QueryItem::Constraint {
                        step: StepAst::Maxstep,
                        formula,
                        span,
                    })
                }
            }
            Tok::Int(i) => {
                self.bump();
                self.expect(Tok::Colon)?;
                let formula = self.formula()?;
                Ok(QueryItem::Constraint {
                    step: StepAst::At(i),
                    formula,
                    span,
                })
            }
            _ => self.unexpected("`label`, `maxstep` or a step number"),
        }
    }

    fn law(&mut self) -> PResult<Law> {
        let start = self.tokens[self.pos].offset;
        let span = self.span();
        let kind = if self.eat_word("caused") {
            let head = self.formula()?;
            self.caused_tail(head)?
        } else if self.eat_word("default") {
            let head = self.formula()?;
            let (if_part, after) = self.if_after()?;
            LawKind::Default {
                head,
                if_part,
                after,
            }
        } else if self.eat_word("exogenous") {
            LawKind::Exogenous(self.term()?)
        } else if self.eat_word("inertial") {
            LawKind::Inertial(self.term()?)
        } else if self.eat_word("constraint") {
            let f = self.formula()?;
            if self.eat_word("after") {
                let after = self.formula()?;
                let fspan = f.span();
                LawKind::Caused {
                    head: Formula::False(span),
                    if_part: Some(Formula::Not(Box::new(f), fspan)),
                    after: Some(after),
                    ifcons: None,
                }
            } else {
                LawKind::Constraint(f)
            }
        } else if self.eat_word("always") {
            LawKind::Always(self.formula()?)
        } else if self.eat_word("nonexecutable") {
            let action = self.formula()?;
            let if_part = if self.eat_word("if") {
                Some(self.formula()?)
            } else {
                None
            };
            LawKind::Nonexecutable { action, if_part }
        } else {
            let first = self.formula()?;
            if self.eat_word("causes") {
                let effect = self.formula()?;
                let if_part = if self.eat_word("if") {
                    Some(self.formula()?)
                } else {
                    None
                };
                LawKind::Causes {
                    action: first,
                    effect,
                    if_part,
                }
            } else {
                self.caused_tail(first)?
            }
        };
        let end = self.tokens[self.pos].offset;
        self.expect(Tok::Dot)?;
        let text: String = self.chars[start..end.max(start)].iter().collect();
        let text = text.split_whitespace().collect::<Vec<_>>().join(" ");
        Ok(Law { kind, span, text })
    }

    fn caused_tail(&mut self, head: Formula) -> PResult<LawKind> {
        let (mut if_part, mut after, mut ifcons) = (None, None, None);
        loop {
            let span = self.span();
            let slot = if self.eat_word("if") {
                &mut if_part
            } else if self.eat_word("after") {
                &mut after
            } else if self.eat_word("ifcons") {
                &mut ifcons
            } else {
                break;
            };
            if slot.is_some() {
                return Err(Diagnostic::at(span, "clause given twice"));
            }
            *slot = Some(self.formula()?);
        }
        Ok(LawKind::Caused {
            head,
            if_part,
            after,
            ifcons,
        })
    }

    fn if_after(&mut self) -> PResult<(Option<Formula>, Option<Formula>)> {
        let if_part = if self.eat_word("if") {
            Some(self.formula()?)
        } else {
            None
        };
        let after = if self.eat_word("after") {
            Some(self.formula()?)
        } else {
            None
        };
        Ok((if_part, after))
    }

    pub fn formula(&mut self) -> PResult<Formula> {
        let mut lhs = self.implication()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.implication()?;
            lhs = Formula::Iff(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implication()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Bar) {
            let rhs = self.conjunction()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.unary()?;
        while matches!(self.peek(), Tok::Amp | Tok::Comma) {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Formula> {
        let span = self.span();
        if self.eat(&Tok::Minus) {
            let inner = self.unary()?;
            return Ok(Formula::Not(Box::new(inner), span));
        }
        if self.eat(&Tok::Tilde) {
            let t = self.term()?;
            return Ok(Formula::NegAtom(t, span));
        }
        self.primary()
    }

    fn is_bound_token(tok: &Tok) -> bool {
        match tok {
            Tok::Int(_) | Tok::Var(_) => true,
            Tok::Ident(w) => !is_keyword(w),
            _ => false,
        }
    }

    fn bound(&mut self) -> PResult<Term> {
        let t = self.bump();
        Ok(match t.tok {
            Tok::Int(value) => Term::Int {
                value,
                span: t.span,
            },
            Tok::Var(name) => Term::Var { name, span: t.span },
            Tok::Ident(name) => Term::Id {
                name,
                args: Vec::new(),
                span: t.span,
            },
            _ => unreachable!(),
        })
    }

    fn primary(&mut self) -> PResult<Formula> {
        let span = self.span();
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        if self.eat_word("true") {
            return Ok(Formula::True(span));
        }
        if self.eat_word("false") {
            return Ok(Formula::False(span));
        }
        let lower = if Self::is_bound_token(self.peek()) && *self.peek_at(1) == Tok::LBrace {
            Some(self.bound()?)
        } else {
            None
        };
        if self.eat(&Tok::LBrace) {
            let mut vars = Vec::new();
            loop {
                match self.peek().clone() {
                    Tok::Var(v) => vars.push((v, self.bump().span)),
                    _ => return self.unexpected("a variable"),
                }
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::Bar)?;
            let element = self.formula()?;
            self.expect(Tok::RBrace)?;
            let upper = if Self::is_bound_token(self.peek()) && *self.peek_at(1) != Tok::LParen {
                Some(self.bound()?)
            } else {
                None
            };
            return Ok(Formula::Count {
                lower,
                vars,
                element: Box::new(element),
                upper,
                span,
            });
        }
        match self.peek() {
            Tok::Ident(w) if !is_keyword(w) => {}
            Tok::Int(_) | Tok::Var(_) => {}
            _ => return self.unexpected("a formula"),
        }
        let lhs = self.term()?;
        let op = match self.peek() {
            Tok::Eq => CompareOp::Eq,
            Tok::Neq => CompareOp::Neq,
            Tok::Lt => CompareOp::Lt,
            Tok::Le => CompareOp::Le,
            Tok::Gt => CompareOp::Gt,
            Tok::Ge => CompareOp::Ge,
            _ => return Ok(Formula::Atom(lhs)),
        };
        self.bump();
        let rhs = self.term()?;
        Ok(Formula::Compare { op, lhs, rhs, span })
    }

    /// A term, or a range `lo..hi` where arguments are allowed.
    fn arg(&mut self) -> PResult<Term> {
        let lo = self.term()?;
        if self.eat(&Tok::DotDot) {
            let hi = self.term()?;
            let span = lo.span();
            return Ok(Term::Range {
                lo: Box::new(lo),
                hi: Box::new(hi),
                span,
            });
        }
        Ok(lo)
    }

    fn term(&mut self) -> PResult<Term> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.product()?;
            let span = lhs.span();
            lhs = Term::Arith {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                span,
            };
        }
    }

    fn product(&mut self) -> PResult<Term> {
        let mut lhs = self.atom_term()?;
        while self.eat(&Tok::Star) {
            let rhs = self.atom_term()?;
            let span = lhs.span();
            lhs = Term::Arith {
                op: ArithOp::Mul,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                span,
            };
        }
        Ok(lhs)
    }

    fn atom_term(&mut self) -> PResult<Term> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(value) => {
                self.bump();
                Ok(Term::Int { value, span })
            }
            Tok::Minus if matches!(self.peek_at(1), Tok::Int(_)) => {
                self.bump();
                let Tok::Int(v) = self.bump().tok else { unreachable!() };
                Ok(Term::Int { value: -v, span })
            }
            Tok::Var(name) => {
                self.bump();
                Ok(Term::Var { name, span })
            }
            Tok::Ident(name) if !is_keyword(&name) => {
                self.bump();
                let mut args = Vec::new();
                if self.eat(&Tok::LParen) {
                    args = self.term_list()?;
                    self.expect(Tok::RParen)?;
                }
                Ok(Term::Id { name, args, span })
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => self.unexpected("a term"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law(src: &str) -> LawKind {
        let p = parse(src).unwrap();
        assert_eq!(p.laws.len(), 1);
        p.laws[0].kind.clone()
    }

    #[test]
    fn precedence() {
        let f = parse_formula("-p & q | r -> s <-> t").unwrap();
        let Formula::Iff(lhs, _) = f else { panic!() };
        let Formula::Implies(or, _) = *lhs else { panic!() };
        let Formula::Or(and, _) = *or else { panic!() };
        let Formula::And(neg, _) = *and else { panic!() };
        assert!(matches!(*neg, Formula::Not(..)));
    }

    #[test]
    fn implication_is_right_associative() {
        let f = parse_formula("p -> q -> r").unwrap();
        let Formula::Implies(_, rhs) = f else { panic!() };
        assert!(matches!(*rhs, Formula::Implies(..)));
    }

    #[test]
    fn comparisons_bind_tightest() {
        let f = parse_formula("-c=v & X\\=Y").unwrap();
        let Formula::And(l, r) = f else { panic!() };
        assert!(matches!(*l, Formula::Not(ref inner, _) if matches!(**inner, Formula::Compare { op: CompareOp::Eq, .. })));
        assert!(matches!(*r, Formula::Compare { op: CompareOp::Neq, .. }));
    }

    #[test]
    fn counts_with_bounds() {
        let f = parse_formula("{B1| loc(B1)=B}1").unwrap();
        let Formula::Count { lower, vars, upper, .. } = f else { panic!() };
        assert!(lower.is_none());
        assert_eq!(vars[0].0, "B1");
        assert!(matches!(upper, Some(Term::Int { value: 1, .. })));
        let f = parse_formula("2{X, Y | p(X,Y)}k & q").unwrap();
        let Formula::And(count, _) = f else { panic!() };
        assert!(matches!(*count, Formula::Count { lower: Some(_), upper: Some(Term::Id { .. }), .. }));
    }

    #[test]
    fn law_forms() {
        assert!(matches!(law("caused p if q after r."), LawKind::Caused { if_part: Some(_), after: Some(_), .. }));
        assert!(matches!(law("a causes p=1 if q."), LawKind::Causes { if_part: Some(_), .. }));
        assert!(matches!(law("default ~p."), LawKind::Default { head: Formula::NegAtom(..), .. }));
        assert!(matches!(law("nonexecutable a if p."), LawKind::Nonexecutable { .. }));
        assert!(matches!(law("constraint p after q."), LawKind::Caused { head: Formula::False(_), .. }));
        assert!(matches!(law("p if q ifcons r."), LawKind::Caused { ifcons: Some(_), .. }));
        assert!(matches!(law("exogenous move(B)."), LawKind::Exogenous(_)));
    }

    #[test]
    fn law_text_is_normalized() {
        let p = parse("caused p\n   if  q.").unwrap();
        assert_eq!(p.laws[0].text, "caused p if q");
    }

    #[test]
    fn declarations() {
        let p = parse(
            ":- sorts location >> block; other.\n\
             :- objects b(1..3) :: block; table :: location.\n\
             :- constants dest(block) :: attribute(location*) of move(block); p :: sdFluent.\n\
             :- variables B, B1 :: block; L :: location*.",
        )
        .unwrap();
        assert_eq!(p.sorts.len(), 2);
        assert_eq!(p.sorts[0].chain.len(), 2);
        assert!(matches!(p.objects[0].objects[0], Term::Id { ref args, .. } if matches!(args[0], Term::Range { .. })));
        assert_eq!(p.constants[0].kind, KindKeyword::Attribute);
        assert!(p.constants[0].domain.as_ref().unwrap().star);
        assert!(p.constants[1].domain.is_none());
        assert!(p.variables[1].sort.star);
    }

    #[test]
    fn queries() {
        let p = parse(":- query label :: test; maxstep :: 1; 0: p & q; maxstep: r.").unwrap();
        let items = &p.queries[0].items;
        assert!(matches!(items[0], QueryItem::Label(ref l, _) if l == "test"));
        assert!(matches!(items[1], QueryItem::Maxstep(Term::Int { value: 1, .. })));
        assert!(matches!(items[2], QueryItem::Constraint { step: StepAst::At(0), .. }));
        assert!(matches!(items[3], QueryItem::Constraint { step: StepAst::Maxstep, .. }));
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("caused p if.\n").unwrap_err();
        assert_eq!(err.span, Some(Span { line: 1, col: 12 }));
        assert!(err.message.contains("expected a formula"), "{err}");
        let err = parse(":- constants p :: fluent.").unwrap_err();
        assert!(err.message.contains("unknown constant kind"), "{err}");
        let err = parse(":- widgets p.").unwrap_err();
        assert!(err.message.contains("unknown section"), "{err}");
        let err = parse("caused p").unwrap_err();
        assert!(err.message.contains("end of input"), "{err}");
    }
}
