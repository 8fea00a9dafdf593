//! Recursive descent parser producing de Bruijn syntax directly.
//!
//! Names are resolved while parsing: LF variables first, then the LF
//! constants, then computation variables and definitions. A computation name
//! in LF position stands for its unboxing at the identity substitution.

use crate::syntax::{
    Arg, Branch, Branches, CompTerm, Const, CtxHead, CtxObj, CtxType, Domain, ErasedCtx, LfCtx, LfSubst, LfTerm,
    LfType, Name, Recursor,
};

use super::lexer::{lex, Span, Tok, Token};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

type PResult<T> = Result<T, ParseError>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ItemKind {
    Def { name: Name, ty: CompTerm, body: CompTerm },
    Check { term: CompTerm, ty: CompTerm },
    Eval { term: CompTerm },
    AssertConv { lhs: CompTerm, rhs: CompTerm, ty: CompTerm },
    FailCheck { term: CompTerm, ty: CompTerm },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub kind: ItemKind,
    pub span: Span,
}

/// The LF context in scope inside a box.
#[derive(Clone, Debug, Default)]
struct LfScope {
    /// Computation level of the context variable, if any.
    head: Option<usize>,
    names: Vec<String>,
}

/// Parser over a token stream. Definitions in scope are supplied per item.
pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
    comp: Vec<String>,
    lf: Option<LfScope>,
    globals: Vec<Name>,
}

fn is_universe(s: &str) -> Option<u32> {
    if s.len() > 1 && s.starts_with('U') && s[1..].bytes().all(|b| b.is_ascii_digit()) {
        s[1..].parse().ok()
    } else {
        None
    }
}

impl Parser {
    pub fn new(src: &str) -> PResult<Parser> {
        let toks = lex(src).map_err(|e| ParseError { span: e.span, message: e.message })?;
        Ok(Parser { toks, pos: 0, comp: Vec::new(), lf: None, globals: Vec::new() })
    }

    /// A parser for a single term under the given computation names.
    pub fn with_scope(src: &str, names: &[Name], globals: &[Name]) -> PResult<Parser> {
        let mut p = Parser::new(src)?;
        p.comp = names.iter().map(|n| n.to_string()).collect();
        p.globals = globals.to_vec();
        Ok(p)
    }

    // -----------------------------------------------------------------------
    // Token helpers

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].span.1
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError { span: self.span(), message: msg.into() })
    }

    fn expect(&mut self, t: &Tok) -> PResult<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.error(format!("expected {t}, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(x)
            }
            t => self.error(format!("expected a name, found {t}")),
        }
    }

    fn binder(&mut self) -> PResult<String> {
        let sp = self.span();
        let x = self.ident()?;
        if is_universe(&x).is_some() || x == "tm_ctx" {
            return Err(ParseError { span: sp, message: format!("`{x}` cannot be bound") });
        }
        Ok(x)
    }

    fn at_item_start(&self) -> bool {
        matches!(self.peek(), Tok::Def | Tok::Directive(_) | Tok::Eof)
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    /// Skips to the start of the next item after an error.
    pub fn recover(&mut self) {
        self.bump();
        while !self.at_item_start() {
            self.bump();
        }
    }

    // -----------------------------------------------------------------------
    // Scopes

    fn comp_index(&self, x: &str) -> Option<usize> {
        if x == "_" {
            return None;
        }
        self.comp.iter().rev().position(|y| y == x)
    }

    fn global(&self, x: &str) -> Option<CompTerm> {
        self.globals.iter().rposition(|g| g.as_str() == x).map(|i| CompTerm::Global(i, Name::new(x)))
    }

    fn with_comp<T>(&mut self, names: &[String], f: impl FnOnce(&mut Parser) -> PResult<T>) -> PResult<T> {
        let n = self.comp.len();
        self.comp.extend(names.iter().cloned());
        let r = f(self);
        self.comp.truncate(n);
        r
    }

    fn with_lf<T>(&mut self, scope: Option<LfScope>, f: impl FnOnce(&mut Parser) -> PResult<T>) -> PResult<T> {
        let saved = std::mem::replace(&mut self.lf, scope);
        let r = f(self);
        self.lf = saved;
        r
    }

    fn scope(&self) -> &LfScope {
        self.lf.as_ref().expect("LF syntax is only parsed inside a box")
    }

    fn scope_mut(&mut self) -> &mut LfScope {
        self.lf.as_mut().expect("LF syntax is only parsed inside a box")
    }

    fn head_of(&self, level: Option<usize>) -> CtxHead {
        match level {
            None => CtxHead::Empty,
            Some(l) => CtxHead::Var(self.comp.len() - 1 - l),
        }
    }

    fn hat(&self) -> ErasedCtx {
        let s = self.scope();
        ErasedCtx { head: self.head_of(s.head), names: s.names.iter().map(|x| Name::new(x)).collect() }
    }

    // -----------------------------------------------------------------------
    // Items

    /// Parses the next item, or returns `None` at the end of input.
    pub fn next_item(&mut self, globals: &[Name]) -> Option<PResult<Item>> {
        if self.at_eof() {
            return None;
        }
        self.globals = globals.to_vec();
        self.comp.clear();
        self.lf = None;
        Some(self.item())
    }

    fn item(&mut self) -> PResult<Item> {
        let start = self.span().0;
        let kind = match self.peek().clone() {
            Tok::Def => {
                self.bump();
                let name = self.binder()?;
                self.expect(&Tok::Colon)?;
                let ty = self.expr()?;
                self.expect(&Tok::Eq)?;
                let body = self.expr()?;
                ItemKind::Def { name: Name::new(&name), ty, body }
            }
            Tok::Directive(d) => {
                self.bump();
                match d.as_str() {
                    "check" => {
                        let term = self.expr()?;
                        self.expect(&Tok::Colon)?;
                        ItemKind::Check { term, ty: self.expr()? }
                    }
                    "eval" => ItemKind::Eval { term: self.expr()? },
                    "assert_conv" => {
                        let lhs = self.arg_term()?;
                        let rhs = self.arg_term()?;
                        self.expect(&Tok::Colon)?;
                        ItemKind::AssertConv { lhs, rhs, ty: self.expr()? }
                    }
                    "fail_check" => {
                        let term = self.expr()?;
                        self.expect(&Tok::Colon)?;
                        ItemKind::FailCheck { term, ty: self.expr()? }
                    }
                    other => return self.error(format!("unknown directive #{other}")),
                }
            }
            t => return self.error(format!("expected `def` or a directive, found {t}")),
        };
        if !self.at_item_start() {
            return self.error(format!("unexpected {} after the end of the item", self.peek()));
        }
        Ok(Item { kind, span: (start, self.prev_end()) })
    }

    /// Parses a whole input consisting of one computation.
    pub fn term_eof(&mut self) -> PResult<CompTerm> {
        let t = self.expr()?;
        if !self.at_eof() {
            return self.error(format!("unexpected {}", self.peek()));
        }
        Ok(t)
    }

    /// Parses a whole input consisting of one LF context in argument form.
    pub fn ctx_eof(&mut self) -> PResult<LfCtx> {
        let c = match self.arg()?.as_ctx() {
            Some(c) => c,
            None => return self.error("expected an LF context"),
        };
        if !self.at_eof() {
            return self.error(format!("unexpected {}", self.peek()));
        }
        Ok(c)
    }

    // -----------------------------------------------------------------------
    // Computations

    pub fn expr(&mut self) -> PResult<CompTerm> {
        match self.peek() {
            Tok::Fn => {
                self.bump();
                let mut xs = vec![self.binder()?];
                while matches!(self.peek(), Tok::Ident(_)) {
                    xs.push(self.binder()?);
                }
                self.expect(&Tok::FatArrow)?;
                let body = self.with_comp(&xs, |p| p.expr())?;
                Ok(xs.iter().rev().fold(body, |b, x| CompTerm::Fn(Name::new(x), Box::new(b))))
            }
            Tok::LParen if matches!(self.peek_at(1), Tok::Ident(_)) && *self.peek_at(2) == Tok::Colon => {
                self.bump();
                let x = self.binder()?;
                self.expect(&Tok::Colon)?;
                let dom = self.domain()?;
                self.expect(&Tok::RParen)?;
                self.expect(&Tok::Arrow)?;
                let cod = self.with_comp(std::slice::from_ref(&x), |p| p.expr())?;
                Ok(CompTerm::Pi(Name::new(&x), Box::new(dom), Box::new(cod)))
            }
            _ => {
                let dom = if matches!(self.peek(), Tok::Ident(x) if x == "tm_ctx") {
                    self.bump();
                    Domain::TmCtx
                } else {
                    Domain::Type(self.app()?)
                };
                if self.eat(&Tok::Arrow) {
                    let cod = self.with_comp(&["_".to_string()], |p| p.expr())?;
                    Ok(CompTerm::Pi(Name::new("_"), Box::new(dom), Box::new(cod)))
                } else {
                    match dom {
                        Domain::Type(t) => Ok(t),
                        Domain::TmCtx => self.error("`tm_ctx` is not a computation"),
                    }
                }
            }
        }
    }

    fn domain(&mut self) -> PResult<Domain> {
        if matches!(self.peek(), Tok::Ident(x) if x == "tm_ctx") && !matches!(self.peek_at(1), Tok::Arrow) {
            self.bump();
            return Ok(Domain::TmCtx);
        }
        Ok(Domain::Type(self.expr()?))
    }

    fn starts_arg(&self) -> bool {
        match self.peek() {
            Tok::Ident(x) => x != "tm_ctx",
            Tok::LParen | Tok::LBrack | Tok::Dot => true,
            _ => false,
        }
    }

    fn app(&mut self) -> PResult<CompTerm> {
        let mut head = if *self.peek() == Tok::Rec { self.rec()? } else { self.atom()? };
        while self.starts_arg() {
            let a = self.arg()?;
            head = CompTerm::App(Box::new(head), Box::new(a));
        }
        Ok(head)
    }

    /// An argument that must be a computation.
    fn arg_term(&mut self) -> PResult<CompTerm> {
        match self.arg()? {
            Arg::Term(t) => Ok(t),
            Arg::Ctx(_) => self.error("expected a computation, found an LF context"),
        }
    }

    fn is_ctx_literal(&self) -> bool {
        *self.peek() == Tok::LParen
            && matches!(
                (self.peek_at(1), self.peek_at(2)),
                (Tok::Dot, Tok::Comma | Tok::RParen) | (Tok::Ident(_), Tok::Colon | Tok::Comma)
            )
    }

    fn arg(&mut self) -> PResult<Arg> {
        if self.eat(&Tok::Dot) {
            return Ok(Arg::Ctx(LfCtx::empty()));
        }
        if self.is_ctx_literal() {
            self.bump();
            let LfCtxItems { ctx, untyped } = self.with_lf(None, |p| p.lf_ctx_items())?;
            self.expect(&Tok::RParen)?;
            if let Some(sp) = untyped {
                return Err(ParseError { span: sp, message: "declarations of a context argument need types".into() });
            }
            return Ok(Arg::ctx(ctx));
        }
        Ok(Arg::Term(self.atom()?))
    }

    fn atom(&mut self) -> PResult<CompTerm> {
        let sp = self.span();
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                if let Some(k) = is_universe(&x) {
                    return Ok(CompTerm::Univ(k));
                }
                if let Some(i) = self.comp_index(&x) {
                    return Ok(CompTerm::Var(i));
                }
                if let Some(g) = self.global(&x) {
                    return Ok(g);
                }
                Err(ParseError { span: sp, message: format!("unbound name `{x}`") })
            }
            Tok::LParen => {
                self.bump();
                let t = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            Tok::LBrack => self.boxed(),
            t => self.error(format!("expected a term, found {t}")),
        }
    }

    fn rec(&mut self) -> PResult<CompTerm> {
        self.expect(&Tok::Rec)?;
        self.expect(&Tok::Caret)?;
        let motive = self.atom()?;
        self.expect(&Tok::LParen)?;
        let mut var = None;
        let mut app = None;
        let mut lam = None;
        loop {
            let sp = self.span();
            let label = self.ident()?;
            let mut xs = Vec::new();
            while matches!(self.peek(), Tok::Ident(_)) {
                xs.push(self.binder()?);
            }
            self.expect(&Tok::FatArrow)?;
            let body = self.with_comp(&xs, |p| p.expr())?;
            let branch = Branch { binders: xs.iter().map(|x| Name::new(x)).collect(), body };
            let slot = match label.as_str() {
                "var" => &mut var,
                "app" => &mut app,
                "lam" => &mut lam,
                _ => return Err(ParseError { span: sp, message: format!("unknown branch `{label}`, expected var, app or lam") }),
            };
            if slot.replace(branch).is_some() {
                return Err(ParseError { span: sp, message: format!("duplicate `{label}` branch") });
            }
            if !self.eat(&Tok::Bar) {
                break;
            }
        }
        self.expect(&Tok::RParen)?;
        let missing = |l: &str| ParseError { span: self.span(), message: format!("recursor is missing its `{l}` branch") };
        let branches = Branches {
            var: var.ok_or_else(|| missing("var"))?,
            app: app.ok_or_else(|| missing("app"))?,
            lam: lam.ok_or_else(|| missing("lam"))?,
        };
        let ctx = match self.arg()?.as_ctx() {
            Some(c) => c,
            None => return self.error("expected an LF context for the recursor"),
        };
        let scrutinee = self.arg_term()?;
        Ok(CompTerm::rec(Recursor { motive, branches, ctx, scrutinee }))
    }

    // -----------------------------------------------------------------------
    // Boxes

    /// Parses context items up to (not including) `stop`, binding the
    /// declared names in a fresh LF scope which is left installed.
    fn lf_ctx_items(&mut self) -> PResult<LfCtxItems> {
        self.lf = Some(LfScope::default());
        let mut decls: Vec<(Name, Option<LfType>)> = Vec::new();
        let mut untyped = None;
        let mut typed = false;
        let mut first = true;
        while !matches!(self.peek(), Tok::Turnstile | Tok::TurnstileHash | Tok::RParen) {
            if first && self.eat(&Tok::Dot) {
                first = false;
                if !self.eat(&Tok::Comma) {
                    break;
                }
                continue;
            }
            let sp = self.span();
            let x = self.ident()?;
            if self.eat(&Tok::Colon) {
                let a = self.lf_type()?;
                typed = true;
                decls.push((Name::new(&x), Some(a)));
                self.scope_mut().names.push(x);
            } else if first && self.comp_index(&x).is_some() {
                let i = self.comp_index(&x).unwrap_or_default();
                self.scope_mut().head = Some(self.comp.len() - 1 - i);
            } else {
                untyped.get_or_insert(sp);
                decls.push((Name::new(&x), None));
                self.scope_mut().names.push(x);
            }
            first = false;
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        if typed && untyped.is_some() {
            return Err(ParseError { span: untyped.unwrap_or_default(), message: "either all declarations carry types or none do".into() });
        }
        let head = self.head_of(self.scope().head);
        let decls = decls.into_iter().map(|(x, a)| (x, a.unwrap_or_else(LfType::tm))).collect();
        Ok(LfCtxItems { ctx: LfCtx { head, decls }, untyped: if typed { None } else { untyped } })
    }

    fn boxed(&mut self) -> PResult<CompTerm> {
        self.expect(&Tok::LBrack)?;
        let saved = self.lf.take();
        let r = self.boxed_inner();
        self.lf = saved;
        r
    }

    fn boxed_inner(&mut self) -> PResult<CompTerm> {
        let items = self.lf_ctx_items()?;
        let typed_decls = items.untyped.is_none() && !items.ctx.decls.is_empty();
        if self.eat(&Tok::TurnstileHash) {
            if items.untyped.is_some() {
                return self.error("declarations of a contextual type need types");
            }
            let a = self.lf_type()?;
            self.expect(&Tok::RBrack)?;
            return Ok(CompTerm::box_ty(CtxType::Param(items.ctx, a)));
        }
        self.expect(&Tok::Turnstile)?;
        if typed_decls {
            let a = self.lf_type()?;
            self.expect(&Tok::RBrack)?;
            return Ok(CompTerm::box_ty(CtxType::Term(items.ctx, a)));
        }
        if items.untyped.is_none() {
            let save = self.pos;
            if let Ok(a) = self.lf_type() {
                if self.eat(&Tok::RBrack) {
                    return Ok(CompTerm::box_ty(CtxType::Term(items.ctx, a)));
                }
            }
            self.pos = save;
        }
        let hat = self.hat();
        let body = self.lf_term()?;
        self.expect(&Tok::RBrack)?;
        Ok(CompTerm::BoxObj(Box::new(CtxObj { ctx: hat, body })))
    }

    // -----------------------------------------------------------------------
    // LF types

    fn with_lf_binder<T>(&mut self, x: &str, f: impl FnOnce(&mut Parser) -> PResult<T>) -> PResult<T> {
        self.scope_mut().names.push(x.to_string());
        let r = f(self);
        self.scope_mut().names.pop();
        r
    }

    pub fn lf_type(&mut self) -> PResult<LfType> {
        if self.eat(&Tok::Pi) {
            let x = self.binder()?;
            self.expect(&Tok::Colon)?;
            let a = self.lf_type()?;
            self.expect(&Tok::Dot)?;
            let b = self.with_lf_binder(&x, |p| p.lf_type())?;
            return Ok(LfType::Pi(Name::new(&x), Box::new(a), Box::new(b)));
        }
        let a = self.lf_type_atom()?;
        if self.eat(&Tok::Arrow) {
            let b = self.with_lf_binder("_", |p| p.lf_type())?;
            return Ok(LfType::Pi(Name::new("_"), Box::new(a), Box::new(b)));
        }
        Ok(a)
    }

    fn lf_type_atom(&mut self) -> PResult<LfType> {
        match self.peek().clone() {
            Tok::Ident(x) if Const::from_name(&x).is_some_and(Const::is_family) => {
                self.bump();
                let c = Const::from_name(&x).unwrap_or(Const::Tm);
                Ok(LfType::Atom(c, Vec::new()))
            }
            Tok::LParen => {
                self.bump();
                let a = self.lf_type()?;
                self.expect(&Tok::RParen)?;
                Ok(a)
            }
            t => self.error(format!("expected an LF type, found {t}")),
        }
    }

    // -----------------------------------------------------------------------
    // LF terms

    pub fn lf_term(&mut self) -> PResult<LfTerm> {
        if self.eat(&Tok::Lambda) {
            let mut xs = vec![self.binder()?];
            while matches!(self.peek(), Tok::Ident(_)) {
                xs.push(self.binder()?);
            }
            self.expect(&Tok::Dot)?;
            let n = xs.len();
            self.scope_mut().names.extend(xs.iter().cloned());
            let body = self.lf_term();
            let len = self.scope().names.len();
            self.scope_mut().names.truncate(len - n);
            let body = body?;
            return Ok(xs.iter().rev().fold(body, |b, x| LfTerm::Lam(Name::new(x), Box::new(b))));
        }
        let mut head = self.lf_atom()?;
        while matches!(self.peek(), Tok::Ident(_) | Tok::LParen | Tok::Lambda) {
            let a = if *self.peek() == Tok::Lambda { self.lf_term()? } else { self.lf_atom()? };
            head = LfTerm::app(head, a);
        }
        Ok(head)
    }

    fn lf_var(&self, x: &str) -> Option<usize> {
        if x == "_" {
            return None;
        }
        self.scope().names.iter().rev().position(|y| y == x)
    }

    fn lf_atom(&mut self) -> PResult<LfTerm> {
        let sp = self.span();
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                if *self.peek() == Tok::LBrack {
                    let t = self.comp_name(&x, sp)?;
                    let s = self.subst()?;
                    return Ok(LfTerm::unbox(t, s));
                }
                if let Some(i) = self.lf_var(&x) {
                    return Ok(LfTerm::Var(i));
                }
                if let Some(c) = Const::from_name(&x) {
                    if c.is_family() {
                        return Err(ParseError { span: sp, message: format!("type family `{x}` used as a term") });
                    }
                    return Ok(LfTerm::Const(c));
                }
                let t = self.comp_name(&x, sp)?;
                Ok(LfTerm::unbox(t, LfSubst::Wk(self.hat(), 0)))
            }
            Tok::LParen => {
                let save = self.pos;
                self.bump();
                let comp = self.with_lf(None, |p| {
                    let t = p.expr()?;
                    p.expect(&Tok::RParen)?;
                    if *p.peek() == Tok::LBrack {
                        Ok(t)
                    } else {
                        p.error("not an unboxing")
                    }
                });
                if let Ok(t) = comp {
                    let s = self.subst()?;
                    return Ok(LfTerm::unbox(t, s));
                }
                self.pos = save + 1;
                let m = self.lf_term()?;
                self.expect(&Tok::RParen)?;
                Ok(m)
            }
            t => self.error(format!("expected an LF term, found {t}")),
        }
    }

    fn comp_name(&self, x: &str, sp: Span) -> PResult<CompTerm> {
        if let Some(i) = self.comp_index(x) {
            return Ok(CompTerm::Var(i));
        }
        if let Some(g) = self.global(x) {
            return Ok(g);
        }
        Err(ParseError { span: sp, message: format!("unbound name `{x}`") })
    }

    /// `[base, M1, ..., Mn]` with base `.`, `id`, `wk` or `wk(x1, ..., xk)`;
    /// an omitted base is `.`.
    fn subst(&mut self) -> PResult<LfSubst> {
        self.expect(&Tok::LBrack)?;
        let mut s = LfSubst::Empty;
        if self.eat(&Tok::RBrack) {
            return Ok(s);
        }
        let mut first = true;
        loop {
            let base = first && match self.peek() {
                Tok::Dot => {
                    self.bump();
                    true
                }
                Tok::Ident(x) if x == "id" => {
                    self.bump();
                    s = LfSubst::Wk(self.hat(), 0);
                    true
                }
                Tok::Ident(x) if x == "wk" => {
                    self.bump();
                    let mut n = 0;
                    if self.eat(&Tok::LParen) {
                        while *self.peek() != Tok::RParen {
                            self.ident()?;
                            n += 1;
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                        self.expect(&Tok::RParen)?;
                    }
                    let hat = self.hat();
                    if n > hat.len() {
                        return self.error(format!("weakening of {n} declarations in a context of {}", hat.len()));
                    }
                    let k = hat.len() - n;
                    s = LfSubst::Wk(hat.prefix(n), k);
                    true
                }
                _ => false,
            };
            if !base {
                let m = self.lf_term()?;
                s = s.snoc(m);
            }
            first = false;
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::RBrack)?;
        Ok(s)
    }
}

struct LfCtxItems {
    ctx: LfCtx,
    /// Position of the first declaration without a type.
    untyped: Option<Span>,
}

/// Parses a closed computation.
pub fn parse_term(src: &str) -> PResult<CompTerm> {
    Parser::new(src)?.term_eof()
}

/// Parses a computation under the given computation names, leftmost first.
pub fn parse_term_in(src: &str, names: &[Name]) -> PResult<CompTerm> {
    Parser::with_scope(src, names, &[])?.term_eof()
}

/// Parses an LF context written as a computation argument (`.`, a context
/// variable, or a parenthesized list) under the given names.
pub fn parse_ctx_in(src: &str, names: &[Name]) -> PResult<LfCtx> {
    Parser::with_scope(src, names, &[])?.ctx_eof()
}

/// Parses every item of a source file against no prior definitions; later
/// definitions see earlier ones.
pub fn parse_items(src: &str) -> PResult<Vec<Item>> {
    let mut p = Parser::new(src)?;
    let mut globals = Vec::new();
    let mut out = Vec::new();
    while let Some(item) = p.next_item(&globals) {
        let item = item?;
        if let ItemKind::Def { name, .. } = &item.kind {
            globals.push(name.clone());
        }
        out.push(item);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::print;

    fn tm() -> LfType {
        LfType::tm()
    }

    #[test]
    fn functions_and_boxes() {
        assert_eq!(parse_term("fn y => y"), Ok(CompTerm::fun("y", CompTerm::Var(0))));
        let b = CompTerm::box_obj(ErasedCtx::empty(), LfTerm::lam_tm("x", LfTerm::app_tm(LfTerm::Var(0), LfTerm::Var(0))));
        assert_eq!(parse_term("[. |- lam \\x. app x x]"), Ok(b.clone()));
        assert_eq!(parse_term("⌜· ⊢ lam λx. app x x⌝"), Ok(b));
    }

    #[test]
    fn contextual_types() {
        let t = parse_term("(psi : tm_ctx) -> [psi |- tm] -> [psi, x : tm |-# tm]").unwrap();
        let expect = CompTerm::pi(
            "psi",
            Domain::TmCtx,
            CompTerm::pi(
                "_",
                Domain::Type(CompTerm::box_ty(CtxType::Term(LfCtx::var(0), tm()))),
                CompTerm::box_ty(CtxType::Param(LfCtx::var(1).with("x", tm()), tm())),
            ),
        );
        assert_eq!(t, expect);
        assert_eq!(parse_term("tm_ctx -> U0").unwrap(), CompTerm::pi("_", Domain::TmCtx, CompTerm::Univ(0)));
    }

    #[test]
    fn unboxing_forms() {
        let names = [Name::new("psi"), Name::new("m")];
        let t = parse_term_in("[psi, x |- app m x]", &names).unwrap();
        let hat = ErasedCtx::var(1).with("x");
        let expect = CompTerm::box_obj(
            hat.clone(),
            LfTerm::app_tm(LfTerm::unbox(CompTerm::Var(0), LfSubst::Wk(hat, 0)), LfTerm::Var(0)),
        );
        assert_eq!(t, expect);
        let t = parse_term_in("[psi, x |- m[wk(), ]]", &names);
        assert!(t.is_err());
        let t = parse_term_in("[psi, x |- m[wk]]", &names).unwrap();
        let expect = CompTerm::box_obj(
            ErasedCtx::var(1).with("x"),
            LfTerm::unbox(CompTerm::Var(0), LfSubst::Wk(ErasedCtx::var(1), 1)),
        );
        assert_eq!(t, expect);
        let t = parse_term("[x |- ([. |- lam \\y. y])[.]]").unwrap();
        let inner = CompTerm::box_obj(ErasedCtx::empty(), LfTerm::lam_tm("y", LfTerm::Var(0)));
        assert_eq!(t, CompTerm::box_obj(ErasedCtx::empty().with("x"), LfTerm::unbox(inner, LfSubst::Empty)));
        let t = parse_term("[x |- (lam (\\y. y))]").unwrap();
        assert_eq!(t, CompTerm::box_obj(ErasedCtx::empty().with("x"), LfTerm::lam_tm("y", LfTerm::Var(0))));
    }

    #[test]
    fn context_arguments() {
        let names = [Name::new("f"), Name::new("psi")];
        let t = parse_term_in("f (psi, x : tm) .", &names).unwrap();
        let c = LfCtx::var(0).with("x", tm());
        let expect = CompTerm::App(
            Box::new(CompTerm::App(Box::new(CompTerm::Var(1)), Box::new(Arg::Ctx(c)))),
            Box::new(Arg::Ctx(LfCtx::empty())),
        );
        assert_eq!(t, expect);
    }

    #[test]
    fn recursor() {
        let src = "fn psi m => rec^(fn q y => [q |- tm]) \
                   (var p v => v | app p a b fa fb => fa | lam p a fa => a) psi m";
        let t = parse_term(src).unwrap();
        let CompTerm::Fn(_, b) = t else { panic!() };
        let CompTerm::Fn(_, b) = *b else { panic!() };
        let CompTerm::Rec(r) = *b else { panic!() };
        assert_eq!(r.ctx, LfCtx::var(1));
        assert_eq!(r.scrutinee, CompTerm::Var(0));
        assert_eq!(r.branches.app.body, CompTerm::Var(1));
        assert!(parse_term("rec^U0 (var p v => v) . U0").is_err());
    }

    #[test]
    fn items() {
        let src = "def idt : U1 = U0 -> U0\n#check idt : U1\n#eval idt\n#assert_conv U0 U0 : U1\n#fail_check U0 : U0";
        let items = parse_items(src).unwrap();
        assert_eq!(items.len(), 5);
        assert!(matches!(&items[1].kind, ItemKind::Check { term: CompTerm::Global(0, _), .. }));
        assert!(parse_items("#check U0 : U1 )").is_err());
        assert!(parse_items("#frobnicate U0").is_err());
    }

    #[test]
    fn printed_terms_parse_back() {
        let srcs = [
            "(psi : tm_ctx) -> [psi |- tm] -> [psi |- tm]",
            "fn psi m => [psi, x |- lam (\\y. app x (m[wk]))]",
            "[. |- Pi f : tm -> tm. tm]",
        ];
        for s in srcs {
            let t = parse_term(s).unwrap();
            let back = parse_term(&print::comp(&t)).unwrap();
            assert_eq!(back, t, "{s}");
        }
    }
}
