//! Abstract syntax for both layers of the theory.
//!
//! Variables are de Bruijn indices, one index space per layer: LF variables
//! count outward through LF binders and the explicit declarations of the
//! enclosing LF context, computation variables count outward through the
//! computation context. Surface names are kept only as display hints and
//! never take part in equality, so the derived `PartialEq` is α-equivalence.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// A binder name kept for printing. All names compare equal.
#[derive(Clone)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Name {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl PartialEq for Name {
    fn eq(&self, _: &Name) -> bool {
        true
    }
}

impl Eq for Name {}

impl Hash for Name {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Name {
        Name::new(s)
    }
}

/// Constants of the fixed LF signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Const {
    /// The type family `tm`.
    Tm,
    /// `lam : (tm -> tm) -> tm`
    Lam,
    /// `app : tm -> tm -> tm`
    App,
}

impl Const {
    pub fn name(self) -> &'static str {
        match self {
            Const::Tm => "tm",
            Const::Lam => "lam",
            Const::App => "app",
        }
    }

    pub fn from_name(s: &str) -> Option<Const> {
        match s {
            "tm" => Some(Const::Tm),
            "lam" => Some(Const::Lam),
            "app" => Some(Const::App),
            _ => None,
        }
    }

    pub fn is_family(self) -> bool {
        matches!(self, Const::Tm)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LfKind {
    Type,
    Pi(Name, Box<LfType>, Box<LfKind>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LfType {
    /// A type family constant applied to a spine.
    Atom(Const, Vec<LfTerm>),
    Pi(Name, Box<LfType>, Box<LfType>),
}

impl LfType {
    pub fn tm() -> LfType {
        LfType::Atom(Const::Tm, Vec::new())
    }

    pub fn arrow(a: LfType, b: LfType) -> LfType {
        // `b` does not mention the new binder, so it must be weakened over it.
        LfType::Pi(Name::new("_"), Box::new(a), Box::new(crate::lf_subst::shift_type(&b, 1, 0)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LfTerm {
    Lam(Name, Box<LfTerm>),
    Var(usize),
    Const(Const),
    App(Box<LfTerm>, Box<LfTerm>),
    /// A computation promising a contextual object, relocated by a substitution.
    Unbox(Box<CompTerm>, Box<LfSubst>),
}

impl LfTerm {
    pub fn lam(name: &str, body: LfTerm) -> LfTerm {
        LfTerm::Lam(Name::new(name), Box::new(body))
    }

    pub fn app(f: LfTerm, a: LfTerm) -> LfTerm {
        LfTerm::App(Box::new(f), Box::new(a))
    }

    pub fn unbox(t: CompTerm, s: LfSubst) -> LfTerm {
        LfTerm::Unbox(Box::new(t), Box::new(s))
    }

    /// `app m n` with the signature constant.
    pub fn app_tm(m: LfTerm, n: LfTerm) -> LfTerm {
        LfTerm::app(LfTerm::app(LfTerm::Const(Const::App), m), n)
    }

    /// `lam (\x. body)` with the signature constant.
    pub fn lam_tm(name: &str, body: LfTerm) -> LfTerm {
        LfTerm::app(LfTerm::Const(Const::Lam), LfTerm::lam(name, body))
    }

    /// Splits an application spine into its head and arguments.
    pub fn spine(&self) -> (&LfTerm, Vec<&LfTerm>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let LfTerm::App(f, a) = cur {
            args.push(&**a);
            cur = f;
        }
        args.reverse();
        (cur, args)
    }
}

/// The head of an LF context: either nothing or a context variable, which is
/// a computation variable of schema `tm_ctx`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CtxHead {
    Empty,
    Var(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LfCtx {
    pub head: CtxHead,
    /// Declarations, leftmost first. Each type is scoped over the declarations
    /// before it.
    pub decls: Vec<(Name, LfType)>,
}

impl LfCtx {
    pub fn empty() -> LfCtx {
        LfCtx { head: CtxHead::Empty, decls: Vec::new() }
    }

    pub fn var(idx: usize) -> LfCtx {
        LfCtx { head: CtxHead::Var(idx), decls: Vec::new() }
    }

    pub fn with(mut self, name: &str, ty: LfType) -> LfCtx {
        self.decls.push((Name::new(name), ty));
        self
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.head == CtxHead::Empty && self.decls.is_empty()
    }

    pub fn erase(&self) -> ErasedCtx {
        erase(self)
    }

    /// The prefix holding the head and the first `n` declarations.
    pub fn prefix(&self, n: usize) -> LfCtx {
        LfCtx { head: self.head, decls: self.decls[..n].to_vec() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ErasedCtx {
    pub head: CtxHead,
    pub names: Vec<Name>,
}

impl ErasedCtx {
    pub fn empty() -> ErasedCtx {
        ErasedCtx { head: CtxHead::Empty, names: Vec::new() }
    }

    pub fn var(idx: usize) -> ErasedCtx {
        ErasedCtx { head: CtxHead::Var(idx), names: Vec::new() }
    }

    pub fn with(mut self, name: &str) -> ErasedCtx {
        self.names.push(Name::new(name));
        self
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.head == CtxHead::Empty && self.names.is_empty()
    }

    pub fn prefix(&self, n: usize) -> ErasedCtx {
        ErasedCtx { head: self.head, names: self.names[..n].to_vec() }
    }
}

/// LF substitutions. Domains are not stored; they are supplied as an erased
/// context whenever a substitution is applied.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LfSubst {
    Empty,
    /// Weakening of the given domain into a range with `shift` additional
    /// declarations on the right. `shift == 0` is the identity.
    Wk(ErasedCtx, usize),
    Snoc(Box<LfSubst>, LfTerm),
}

impl LfSubst {
    pub fn snoc(self, m: LfTerm) -> LfSubst {
        LfSubst::Snoc(Box::new(self), m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CtxType {
    /// `Psi |- A`
    Term(LfCtx, LfType),
    /// `Psi |-# A`: inhabited only by variables.
    Param(LfCtx, LfType),
}

impl CtxType {
    pub fn ctx(&self) -> &LfCtx {
        match self {
            CtxType::Term(c, _) | CtxType::Param(c, _) => c,
        }
    }

    pub fn ty(&self) -> &LfType {
        match self {
            CtxType::Term(_, a) | CtxType::Param(_, a) => a,
        }
    }

    pub fn is_param(&self) -> bool {
        matches!(self, CtxType::Param(..))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CtxObj {
    pub ctx: ErasedCtx,
    pub body: LfTerm,
}

/// The domain of a computation-level function.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Type(CompTerm),
    TmCtx,
}

/// Argument of an application: a computation, or an LF context when the
/// function abstracts over `tm_ctx`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Arg {
    Term(CompTerm),
    Ctx(LfCtx),
}

impl Arg {
    /// A context argument in canonical form: a lone context variable is
    /// represented as a variable term.
    pub fn ctx(c: LfCtx) -> Arg {
        match c {
            LfCtx { head: CtxHead::Var(j), decls } if decls.is_empty() => Arg::Term(CompTerm::Var(j)),
            c => Arg::Ctx(c),
        }
    }

    /// Reads the argument as an LF context. A bare variable is accepted since
    /// the surface syntax cannot tell a context variable from a term variable.
    pub fn as_ctx(&self) -> Option<LfCtx> {
        match self {
            Arg::Ctx(c) => Some(c.clone()),
            Arg::Term(CompTerm::Var(i)) => Some(LfCtx::var(*i)),
            Arg::Term(_) => None,
        }
    }
}

/// Universe levels are capped at `2^31 - 1`.
pub const MAX_LEVEL: u32 = (1 << 31) - 1;

/// Computations and their types share one grammar, as in any pure type system.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CompTerm {
    Var(usize),
    /// A checked top-level definition.
    Global(usize, Name),
    Univ(u32),
    BoxType(Box<CtxType>),
    Pi(Name, Box<Domain>, Box<CompTerm>),
    Fn(Name, Box<CompTerm>),
    App(Box<CompTerm>, Box<Arg>),
    BoxObj(Box<CtxObj>),
    Rec(Box<Recursor>),
}

pub type CompType = CompTerm;

impl CompTerm {
    pub fn fun(name: &str, body: CompTerm) -> CompTerm {
        CompTerm::Fn(Name::new(name), Box::new(body))
    }

    pub fn app(f: CompTerm, a: CompTerm) -> CompTerm {
        CompTerm::App(Box::new(f), Box::new(Arg::Term(a)))
    }

    pub fn app_ctx(f: CompTerm, c: LfCtx) -> CompTerm {
        CompTerm::App(Box::new(f), Box::new(Arg::ctx(c)))
    }

    pub fn pi(name: &str, dom: Domain, cod: CompTerm) -> CompTerm {
        CompTerm::Pi(Name::new(name), Box::new(dom), Box::new(cod))
    }

    pub fn box_ty(t: CtxType) -> CompTerm {
        CompTerm::BoxType(Box::new(t))
    }

    pub fn box_obj(ctx: ErasedCtx, body: LfTerm) -> CompTerm {
        CompTerm::BoxObj(Box::new(CtxObj { ctx, body }))
    }

    pub fn rec(r: Recursor) -> CompTerm {
        CompTerm::Rec(Box::new(r))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Recursor {
    /// `(psi : tm_ctx) -> (y : [psi |- tm]) -> tau`
    pub motive: CompTerm,
    pub branches: Branches,
    pub ctx: LfCtx,
    pub scrutinee: CompTerm,
}

/// A branch body under its pattern binders (outermost first).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Branch {
    pub binders: Vec<Name>,
    pub body: CompTerm,
}

impl Branch {
    pub fn new(binders: &[&str], body: CompTerm) -> Branch {
        Branch { binders: binders.iter().map(|b| Name::new(b)).collect(), body }
    }
}

/// Binders: var `psi, p`; app `psi, m, n, f_m, f_n`; lam `psi, m, f_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Branches {
    pub var: Branch,
    pub app: Branch,
    pub lam: Branch,
}

pub const VAR_ARITY: usize = 2;
pub const APP_ARITY: usize = 5;
pub const LAM_ARITY: usize = 3;

/// Computation context, leftmost entry first. Variable `i` names the entry
/// `i` positions from the right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CompCtx {
    pub entries: Vec<(Name, Domain)>,
}

impl CompCtx {
    pub fn new() -> CompCtx {
        CompCtx::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, name: Name, dom: Domain) {
        self.entries.push((name, dom));
    }

    pub fn extended(&self, name: Name, dom: Domain) -> CompCtx {
        let mut c = self.clone();
        c.push(name, dom);
        c
    }

    pub fn with(mut self, name: &str, dom: Domain) -> CompCtx {
        self.push(Name::new(name), dom);
        self
    }

    /// The domain of variable `idx`, weakened to be valid in the whole context.
    pub fn lookup(&self, idx: usize) -> Option<Domain> {
        let n = self.entries.len();
        if idx >= n {
            return None;
        }
        let dom = &self.entries[n - 1 - idx].1;
        Some(crate::comp_subst::shift_domain(dom, idx + 1))
    }

    pub fn name(&self, idx: usize) -> Option<&Name> {
        let n = self.entries.len();
        (idx < n).then(|| &self.entries[n - 1 - idx].0)
    }

    pub fn names(&self) -> Vec<Name> {
        self.entries.iter().map(|(n, _)| n.clone()).collect()
    }
}

/// The fixed LF signature: `tm : type`, `lam : (tm -> tm) -> tm`,
/// `app : tm -> tm -> tm`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Signature;

impl Signature {
    pub fn family_kind(&self, c: Const) -> Option<LfKind> {
        match c {
            Const::Tm => Some(LfKind::Type),
            _ => None,
        }
    }

    pub fn const_type(&self, c: Const) -> Option<LfType> {
        match c {
            Const::Tm => None,
            Const::Lam => Some(LfType::Pi(
                Name::new("y"),
                Box::new(LfType::Pi(Name::new("x"), Box::new(LfType::tm()), Box::new(LfType::tm()))),
                Box::new(LfType::tm()),
            )),
            Const::App => Some(LfType::Pi(
                Name::new("x"),
                Box::new(LfType::tm()),
                Box::new(LfType::Pi(Name::new("y"), Box::new(LfType::tm()), Box::new(LfType::tm()))),
            )),
        }
    }
}

/// Drops the type annotations of an LF context.
pub fn erase(ctx: &LfCtx) -> ErasedCtx {
    ErasedCtx { head: ctx.head, names: ctx.decls.iter().map(|(n, _)| n.clone()).collect() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NotFound;

/// The type of LF variable `x` (an index into the explicit declarations),
/// weakened to the whole context.
pub fn ctx_lookup(ctx: &LfCtx, x: usize) -> Result<LfType, NotFound> {
    let n = ctx.decls.len();
    if x >= n {
        return Err(NotFound);
    }
    Ok(crate::lf_subst::shift_type(&ctx.decls[n - 1 - x].1, x + 1, 0))
}

/// α-equivalence. Names are hints only, so this is structural equality.
pub fn alpha_eq<T: PartialEq>(a: &T, b: &T) -> bool {
    a == b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erase_examples() {
        assert_eq!(erase(&LfCtx::empty()), ErasedCtx::empty());
        let c = LfCtx::empty().with("x", LfType::tm()).with("y", LfType::tm());
        let e = erase(&c);
        assert_eq!(e.names.iter().map(Name::as_str).collect::<Vec<_>>(), ["x", "y"]);
        assert_eq!(e.head, CtxHead::Empty);
        let c = LfCtx::var(0).with("x", LfType::tm());
        let e = erase(&c);
        assert_eq!(e.head, CtxHead::Var(0));
        assert_eq!(e.len(), 1);
    }

    #[test]
    fn erase_ignores_annotations() {
        let a = LfCtx::var(2).with("x", LfType::tm());
        let b = LfCtx::var(2).with("x", LfType::arrow(LfType::tm(), LfType::tm()));
        assert_eq!(erase(&a), erase(&b));
    }

    #[test]
    fn lookup_examples() {
        let c = LfCtx::empty().with("x", LfType::tm()).with("y", LfType::tm());
        assert_eq!(ctx_lookup(&c, 0), Ok(LfType::tm()));
        let c = LfCtx::var(0).with("x", LfType::tm());
        assert_eq!(ctx_lookup(&c, 0), Ok(LfType::tm()));
        assert_eq!(ctx_lookup(&LfCtx::var(0), 0), Err(NotFound));
    }

    #[test]
    fn alpha_examples() {
        let a = LfTerm::lam("x", LfTerm::Var(0));
        let b = LfTerm::lam("y", LfTerm::Var(0));
        assert!(alpha_eq(&a, &b));
        let a = CompTerm::fun("y", CompTerm::Var(0));
        let b = CompTerm::fun("z", CompTerm::Var(0));
        assert!(alpha_eq(&a, &b));
        // \x. app x x  vs  \x. app x y with y free
        let a = LfTerm::lam("x", LfTerm::app_tm(LfTerm::Var(0), LfTerm::Var(0)));
        let b = LfTerm::lam("x", LfTerm::app_tm(LfTerm::Var(0), LfTerm::Var(1)));
        assert!(!alpha_eq(&a, &b));
    }

    #[test]
    fn signature_is_total_on_constants() {
        let s = Signature;
        assert_eq!(s.family_kind(Const::Tm), Some(LfKind::Type));
        assert!(s.const_type(Const::Lam).is_some());
        assert!(s.const_type(Const::App).is_some());
        assert_eq!(Const::from_name("foo"), None);
    }
}
