//! Pretty printing back into the surface syntax.
//!
//! Binders are renamed apart from every name in scope at either layer, so
//! the output parses back to an alpha-equivalent term. Variables outside the
//! supplied scope print as `#i` (computations) or `%i` (LF).

use crate::comp_subst::mentions;
use crate::syntax::{
    Arg, CompTerm, CtxHead, CtxType, Domain, ErasedCtx, LfCtx, LfSubst, LfTerm, LfType, Name, Recursor,
};

const RESERVED: &[&str] = &[
    "def", "fn", "rec", "Pi", "tm", "lam", "app", "var", "id", "wk", "tm_ctx", "_",
];

fn is_universe_name(s: &str) -> bool {
    s.len() > 1 && s.starts_with('U') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

struct Printer {
    comp: Vec<String>,
    lf: Vec<String>,
}

impl Printer {
    fn new(names: &[Name]) -> Printer {
        let mut p = Printer { comp: Vec::new(), lf: Vec::new() };
        for n in names {
            let x = p.fresh(n.as_str(), "y");
            p.comp.push(x);
        }
        p
    }

    fn fresh(&self, base: &str, default: &str) -> String {
        let base = if base.is_empty() || base == "_" { default } else { base };
        let taken = |s: &str| {
            RESERVED.contains(&s) || is_universe_name(s) || self.comp.iter().any(|c| c == s) || self.lf.iter().any(|c| c == s)
        };
        if !taken(base) {
            return base.to_string();
        }
        (1..).map(|i| format!("{base}{i}")).find(|s| !taken(s)).expect("unbounded")
    }

    fn comp_name(&self, i: usize) -> String {
        let n = self.comp.len();
        if i < n {
            self.comp[n - 1 - i].clone()
        } else {
            format!("#{i}")
        }
    }

    fn lf_name(&self, i: usize) -> String {
        let n = self.lf.len();
        if i < n {
            self.lf[n - 1 - i].clone()
        } else {
            format!("%{i}")
        }
    }

    fn bind_comp(&mut self, x: &Name) -> String {
        let s = self.fresh(x.as_str(), "y");
        self.comp.push(s.clone());
        s
    }

    fn bind_lf(&mut self, x: &Name) -> String {
        let s = self.fresh(x.as_str(), "x");
        self.lf.push(s.clone());
        s
    }

    /// Runs `f` with a fresh LF scope, as entered by a box.
    fn in_box<T>(&mut self, f: impl FnOnce(&mut Printer) -> T) -> T {
        let saved = std::mem::take(&mut self.lf);
        let r = f(self);
        self.lf = saved;
        r
    }

    // -----------------------------------------------------------------------
    // Computations. Precedence: 0 binders and arrows, 1 applications, 2 atoms.

    fn comp(&mut self, t: &CompTerm, prec: u8) -> String {
        let (s, p) = match t {
            CompTerm::Var(i) => (self.comp_name(*i), 2),
            CompTerm::Global(_, n) => (n.to_string(), 2),
            CompTerm::Univ(k) => (format!("U{k}"), 2),
            CompTerm::BoxType(ct) => (self.in_box(|p| p.ctx_type(ct)), 2),
            CompTerm::BoxObj(obj) => (self.in_box(|p| p.boxed(&obj.ctx, &obj.body)), 2),
            CompTerm::Pi(x, d, c) => {
                let s = if mentions(&**c, 0) {
                    let dom = self.domain(d, 0);
                    let x = self.bind_comp(x);
                    format!("({x} : {dom}) -> {}", self.comp(c, 0))
                } else {
                    let dom = self.domain(d, 1);
                    self.bind_comp(x);
                    format!("{dom} -> {}", self.comp(c, 0))
                };
                self.comp.pop();
                (s, 0)
            }
            CompTerm::Fn(..) => {
                let mut xs = Vec::new();
                let mut body = t;
                while let CompTerm::Fn(x, b) = body {
                    xs.push(self.bind_comp(x));
                    body = b;
                }
                let s = format!("fn {} => {}", xs.join(" "), self.comp(body, 0));
                self.comp.truncate(self.comp.len() - xs.len());
                (s, 0)
            }
            CompTerm::App(f, a) => {
                let f = self.comp(f, 1);
                let a = match &**a {
                    Arg::Term(t) => self.comp(t, 2),
                    Arg::Ctx(c) => self.ctx_arg(c),
                };
                (format!("{f} {a}"), 1)
            }
            CompTerm::Rec(r) => (self.rec(r), 1),
        };
        if p < prec {
            format!("({s})")
        } else {
            s
        }
    }

    fn domain(&mut self, d: &Domain, prec: u8) -> String {
        match d {
            Domain::TmCtx => "tm_ctx".to_string(),
            Domain::Type(t) => self.comp(t, prec),
        }
    }

    fn rec(&mut self, r: &Recursor) -> String {
        let motive = self.comp(&r.motive, 2);
        let mut arms = Vec::new();
        for (label, b) in [("var", &r.branches.var), ("app", &r.branches.app), ("lam", &r.branches.lam)] {
            let xs: Vec<String> = b.binders.iter().map(|x| self.bind_comp(x)).collect();
            let body = self.comp(&b.body, 0);
            self.comp.truncate(self.comp.len() - xs.len());
            let sep = if xs.is_empty() { "" } else { " " };
            arms.push(format!("{label}{sep}{} => {body}", xs.join(" ")));
        }
        let ctx = self.ctx_arg(&r.ctx);
        let scrutinee = self.comp(&r.scrutinee, 2);
        format!("rec^{motive} ({}) {ctx} {scrutinee}", arms.join(" | "))
    }

    /// A context in argument position.
    fn ctx_arg(&mut self, c: &LfCtx) -> String {
        match (c.head, c.decls.is_empty()) {
            (CtxHead::Empty, true) => ".".to_string(),
            (CtxHead::Var(i), true) => self.comp_name(i),
            _ => format!("({})", self.in_box(|p| p.lf_ctx(c))),
        }
    }

    // -----------------------------------------------------------------------
    // Contexts and contextual types. These leave the declared names bound.

    fn head(&self, h: CtxHead) -> Option<String> {
        match h {
            CtxHead::Empty => None,
            CtxHead::Var(i) => Some(self.comp_name(i)),
        }
    }

    fn lf_ctx(&mut self, c: &LfCtx) -> String {
        let mut items: Vec<String> = self.head(c.head).into_iter().collect();
        for (x, a) in &c.decls {
            let a = self.lf_type(a, 0);
            let x = self.bind_lf(x);
            items.push(format!("{x} : {a}"));
        }
        if items.is_empty() {
            ".".to_string()
        } else {
            items.join(", ")
        }
    }

    fn erased(&mut self, c: &ErasedCtx) -> String {
        let mut items: Vec<String> = self.head(c.head).into_iter().collect();
        for x in &c.names {
            items.push(self.bind_lf(x));
        }
        if items.is_empty() {
            ".".to_string()
        } else {
            items.join(", ")
        }
    }

    fn ctx_type(&mut self, t: &CtxType) -> String {
        let ctx = self.lf_ctx(t.ctx());
        let turnstile = if t.is_param() { "|-#" } else { "|-" };
        format!("[{ctx} {turnstile} {}]", self.lf_type(t.ty(), 0))
    }

    fn boxed(&mut self, c: &ErasedCtx, m: &LfTerm) -> String {
        let ctx = self.erased(c);
        format!("[{ctx} |- {}]", self.lf_term(m, 0))
    }

    // -----------------------------------------------------------------------
    // LF. Precedence: 0 binders and arrows, 1 applications, 2 atoms.

    fn lf_type(&mut self, a: &LfType, prec: u8) -> String {
        let (s, p) = match a {
            LfType::Atom(c, args) => {
                if args.is_empty() {
                    (c.name().to_string(), 2)
                } else {
                    let args: Vec<String> = args.iter().map(|m| self.lf_term(m, 2)).collect();
                    (format!("{} {}", c.name(), args.join(" ")), 1)
                }
            }
            LfType::Pi(x, dom, cod) => {
                let s = if type_mentions(cod, 0) {
                    let d = self.lf_type(dom, 0);
                    let x = self.bind_lf(x);
                    format!("Pi {x} : {d}. {}", self.lf_type(cod, 0))
                } else {
                    let d = self.lf_type(dom, 1);
                    self.bind_lf(x);
                    format!("{d} -> {}", self.lf_type(cod, 0))
                };
                self.lf.pop();
                (s, 0)
            }
        };
        if p < prec {
            format!("({s})")
        } else {
            s
        }
    }

    fn lf_term(&mut self, m: &LfTerm, prec: u8) -> String {
        let (s, p) = match m {
            LfTerm::Var(i) => (self.lf_name(*i), 2),
            LfTerm::Const(c) => (c.name().to_string(), 2),
            LfTerm::App(f, a) => (format!("{} {}", self.lf_term(f, 1), self.lf_term(a, 2)), 1),
            LfTerm::Lam(..) => {
                let mut xs = Vec::new();
                let mut body = m;
                while let LfTerm::Lam(x, b) = body {
                    xs.push(self.bind_lf(x));
                    body = b;
                }
                let s = format!("\\{}. {}", xs.join(" "), self.lf_term(body, 0));
                self.lf.truncate(self.lf.len() - xs.len());
                (s, 0)
            }
            LfTerm::Unbox(t, sigma) => {
                let head = self.in_box(|p| match &**t {
                    CompTerm::Var(_) | CompTerm::Global(..) => p.comp(t, 2),
                    t => format!("({})", p.comp(t, 0)),
                });
                (format!("{head}[{}]", self.subst(sigma)), 2)
            }
        };
        if p < prec {
            format!("({s})")
        } else {
            s
        }
    }

    fn subst(&mut self, s: &LfSubst) -> String {
        let mut items = Vec::new();
        let mut cur = s;
        while let LfSubst::Snoc(rest, m) = cur {
            items.push(self.lf_term(m, 0));
            cur = rest;
        }
        let base = match cur {
            LfSubst::Empty => ".".to_string(),
            LfSubst::Wk(dom, 0) if dom.len() == self.lf.len() => "id".to_string(),
            LfSubst::Wk(dom, _) if dom.names.is_empty() => "wk".to_string(),
            LfSubst::Wk(dom, _) => {
                let names: Vec<String> = (0..dom.len())
                    .map(|j| self.lf.get(j).cloned().unwrap_or_else(|| dom.names[j].to_string()))
                    .collect();
                format!("wk({})", names.join(", "))
            }
            LfSubst::Snoc(..) => unreachable!(),
        };
        items.push(base);
        items.reverse();
        items.join(", ")
    }
}

fn term_mentions(m: &LfTerm, i: usize) -> bool {
    match m {
        LfTerm::Var(j) => *j == i,
        LfTerm::Const(_) => false,
        LfTerm::App(f, a) => term_mentions(f, i) || term_mentions(a, i),
        LfTerm::Lam(_, b) => term_mentions(b, i + 1),
        LfTerm::Unbox(_, s) => subst_mentions(s, i),
    }
}

fn subst_mentions(s: &LfSubst, i: usize) -> bool {
    match s {
        LfSubst::Empty => false,
        LfSubst::Wk(dom, k) => *k <= i && i < k + dom.len(),
        LfSubst::Snoc(rest, m) => subst_mentions(rest, i) || term_mentions(m, i),
    }
}

/// Whether LF variable `i` occurs free in `a`.
pub fn type_mentions(a: &LfType, i: usize) -> bool {
    match a {
        LfType::Atom(_, args) => args.iter().any(|m| term_mentions(m, i)),
        LfType::Pi(_, d, c) => type_mentions(d, i) || type_mentions(c, i + 1),
    }
}

pub fn comp(t: &CompTerm) -> String {
    comp_in(&[], t)
}

/// Prints `t` under a computation context with the given names, leftmost
/// first.
pub fn comp_in(names: &[Name], t: &CompTerm) -> String {
    Printer::new(names).comp(t, 0)
}

pub fn domain_in(names: &[Name], d: &Domain) -> String {
    Printer::new(names).domain(d, 0)
}

/// Prints an LF type under computation names and an LF context.
pub fn lf_type_in(names: &[Name], psi: &LfCtx, a: &LfType) -> String {
    let mut p = Printer::new(names);
    p.lf_ctx(psi);
    p.lf_type(a, 0)
}

pub fn lf_term_in(names: &[Name], hat: &ErasedCtx, m: &LfTerm) -> String {
    let mut p = Printer::new(names);
    p.erased(hat);
    p.lf_term(m, 0)
}

pub fn lf_ctx_in(names: &[Name], psi: &LfCtx) -> String {
    Printer::new(names).lf_ctx(psi)
}

pub fn erased_in(names: &[Name], hat: &ErasedCtx) -> String {
    Printer::new(names).erased(hat)
}

pub fn ctx_type_in(names: &[Name], t: &CtxType) -> String {
    Printer::new(names).ctx_type(t)
}
