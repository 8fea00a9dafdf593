//! Bidirectional checking for every judgment of both layers.
//!
//! Universes are not cumulative, but boxed contextual types and the schema
//! `tm_ctx` inhabit every universe. Sorts of type formers are therefore
//! tracked as either an exact level or a lower bound, and checking a type
//! against `U_k` tests compatibility instead of converting.

use crate::comp_subst::{csubst_sim, instantiate, shift_from, CompSubst, Payload};
use crate::error::{Judgment, KernelError, Result, TypeError, TypeErrorKind};
use crate::frontend::print;
use crate::lf_subst::{id_subst, lf_subst_type, single_subst_kind, single_subst_type};
use crate::reduce::{is_wne_comp, Kernel};
use crate::syntax::{
    alpha_eq, ctx_lookup, Arg, CompCtx, CompTerm, CompType, CtxHead, CtxObj, CtxType, Domain, ErasedCtx, LfCtx,
    LfKind, LfSubst, LfTerm, LfType, Name, Recursor, Signature, MAX_LEVEL,
};

/// The universes a type former may live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sort {
    Exact(u32),
    AtLeast(u32),
}

impl Sort {
    pub fn min_level(self) -> u32 {
        match self {
            Sort::Exact(k) | Sort::AtLeast(k) => k,
        }
    }

    pub fn admits(self, k: u32) -> bool {
        match self {
            Sort::Exact(j) => j == k,
            Sort::AtLeast(j) => k >= j,
        }
    }

    /// The sort of a function type from the sorts of its parts.
    pub fn pi(dom: Sort, cod: Sort) -> Sort {
        match (dom, cod) {
            (Sort::Exact(a), Sort::Exact(b)) => Sort::Exact(a.max(b)),
            (a, b) => Sort::AtLeast(a.min_level().max(b.min_level())),
        }
    }
}

fn err(kind: TypeErrorKind, judgment: Judgment, msg: impl Into<String>) -> KernelError {
    TypeError::new(kind, judgment, msg).into()
}

/// Prepends context to the message of a type error.
fn in_context(e: KernelError, what: &str) -> KernelError {
    match e {
        KernelError::Type(mut t) => {
            t.message = format!("{what}: {}", t.message);
            KernelError::Type(t)
        }
        e => e,
    }
}

/// A recursor branch: the pattern variables it binds and the type its body
/// must have under them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchSpec {
    pub entries: Vec<(Name, Domain)>,
    pub goal: CompType,
}

/// `{psi/psi, y/y} tau` where `tau` lives under `Gamma, psi, y` and the
/// result under `Gamma` extended by `extra` further variables, in which the
/// payloads are given.
pub fn instantiate_motive(tau: &CompType, extra: usize, psi: Payload, y: Payload) -> Result<CompType> {
    instantiate(&shift_from(tau, extra, 2), &[psi, y])
}

fn box_tm(ctx: LfCtx) -> CompTerm {
    CompTerm::box_ty(CtxType::Term(ctx, LfType::tm()))
}

/// Branch contexts and goals for a motive body `tau` (under `psi, y`), in
/// the order var, app, lam.
pub fn branch_specs(tau: &CompType) -> [Result<BranchSpec>; 3] {
    let ctxv = |i: usize| Payload::Ctx(LfCtx::var(i));
    let var = || -> Result<BranchSpec> {
        Ok(BranchSpec {
            entries: vec![
                (Name::new("psi"), Domain::TmCtx),
                (Name::new("p"), Domain::Type(CompTerm::box_ty(CtxType::Param(LfCtx::var(0), LfType::tm())))),
            ],
            // The pattern variable sits exactly where `y` does.
            goal: tau.clone(),
        })
    };
    let app = || -> Result<BranchSpec> {
        let f_m = instantiate_motive(tau, 3, ctxv(2), Payload::var(1))?;
        let f_n = instantiate_motive(tau, 4, ctxv(3), Payload::var(1))?;
        let hat = ErasedCtx::var(4);
        let id = LfSubst::Wk(hat.clone(), 0);
        let body = LfTerm::app_tm(LfTerm::unbox(CompTerm::Var(3), id.clone()), LfTerm::unbox(CompTerm::Var(2), id));
        let goal = instantiate_motive(tau, 5, ctxv(4), Payload::Term(CompTerm::box_obj(hat, body)))?;
        Ok(BranchSpec {
            entries: vec![
                (Name::new("psi"), Domain::TmCtx),
                (Name::new("m"), Domain::Type(box_tm(LfCtx::var(0)))),
                (Name::new("n"), Domain::Type(box_tm(LfCtx::var(1)))),
                (Name::new("f_m"), Domain::Type(f_m)),
                (Name::new("f_n"), Domain::Type(f_n)),
            ],
            goal,
        })
    };
    let lam = || -> Result<BranchSpec> {
        let ext = |i: usize| LfCtx::var(i).with("x", LfType::tm());
        let f_m = instantiate_motive(tau, 2, Payload::Ctx(ext(1)), Payload::var(0))?;
        let hat = ErasedCtx::var(2);
        let inner = LfTerm::unbox(CompTerm::Var(1), LfSubst::Wk(hat.clone().with("x"), 0));
        let goal = instantiate_motive(tau, 3, ctxv(2), Payload::Term(CompTerm::box_obj(hat, LfTerm::lam_tm("x", inner))))?;
        Ok(BranchSpec {
            entries: vec![
                (Name::new("psi"), Domain::TmCtx),
                (Name::new("m"), Domain::Type(box_tm(ext(0)))),
                (Name::new("f_m"), Domain::Type(f_m)),
            ],
            goal,
        })
    };
    [var(), app(), lam()]
}

/// The type of a neutral computation, if it has one.
pub(crate) fn neutral_domain(k: &Kernel, gamma: &CompCtx, t: &CompTerm) -> Option<Domain> {
    match t {
        CompTerm::Var(i) => gamma.lookup(*i),
        _ => k.typeof_neutral(gamma, t).ok().map(Domain::Type),
    }
}

impl Kernel {
    fn show(&self, gamma: &CompCtx, t: &CompTerm) -> String {
        print::comp_in(&gamma.names(), t)
    }

    fn show_lf_type(&self, gamma: &CompCtx, psi: &LfCtx, a: &LfType) -> String {
        print::lf_type_in(&gamma.names(), psi, a)
    }

    // -----------------------------------------------------------------------
    // Contexts

    /// `|- Gamma`
    pub fn check_comp_ctx(&self, gamma: &CompCtx) -> Result<()> {
        let mut prefix = CompCtx::new();
        for (x, d) in &gamma.entries {
            if let Domain::Type(t) = d {
                self.infer_sort(&prefix, t)
                    .map_err(|e| in_context(e, &format!("declaration of {x}")))?;
            }
            prefix.push(x.clone(), d.clone());
        }
        Ok(())
    }

    fn check_head(&self, gamma: &CompCtx, head: CtxHead, j: Judgment) -> Result<()> {
        if let CtxHead::Var(i) = head {
            match gamma.lookup(i) {
                Some(Domain::TmCtx) => {}
                Some(_) => {
                    let name = gamma.name(i).map(|n| n.to_string()).unwrap_or_default();
                    return Err(err(TypeErrorKind::UnknownCtxVar, j, format!("{name} is not a context variable")));
                }
                None => return Err(err(TypeErrorKind::UnknownCtxVar, j, format!("unbound context variable #{i}"))),
            }
        }
        Ok(())
    }

    /// `Gamma |- Psi : ctx`
    pub fn check_lf_ctx(&self, gamma: &CompCtx, psi: &LfCtx) -> Result<()> {
        self.check_head(gamma, psi.head, Judgment::LfCtx)?;
        for k in 0..psi.len() {
            let (x, a) = &psi.decls[k];
            self.check_lf_type(gamma, &psi.prefix(k), a).map_err(|e| match e {
                KernelError::Type(mut t) => {
                    t.kind = TypeErrorKind::IllKindedDecl;
                    t.judgment = Judgment::LfCtx;
                    t.message = format!("declaration {x}: {}", t.message);
                    KernelError::Type(t)
                }
                e => e,
            })?;
        }
        Ok(())
    }

    /// `Gamma |- Psi : tm_ctx`
    pub fn schema_check(&self, gamma: &CompCtx, psi: &LfCtx) -> Result<()> {
        self.check_head(gamma, psi.head, Judgment::Schema)?;
        for k in 0..psi.len() {
            let (x, a) = &psi.decls[k];
            let prefix = psi.prefix(k);
            self.check_lf_type(gamma, &prefix, a)?;
            if !self.conv_lf_type(gamma, &prefix, a, &LfType::tm())? {
                return Err(TypeError::new(
                    TypeErrorKind::SchemaViolation,
                    Judgment::Schema,
                    format!("declaration {x} is not of type tm"),
                )
                .expected("tm")
                .actual(self.show_lf_type(gamma, &prefix, a))
                .into());
            }
        }
        Ok(())
    }

    // -----------------------------------------------------------------------
    // LF types and kinds

    /// `Gamma; Psi |- K : lfkind`
    pub fn check_lf_kind(&self, gamma: &CompCtx, psi: &LfCtx, k: &LfKind) -> Result<()> {
        match k {
            LfKind::Type => Ok(()),
            LfKind::Pi(x, a, rest) => {
                self.check_lf_type(gamma, psi, a)?;
                self.check_lf_kind(gamma, &psi.clone().with(x.as_str(), (**a).clone()), rest)
            }
        }
    }

    /// `Gamma; Psi |- A : K`, synthesizing `K`.
    pub fn kind_lf_type(&self, gamma: &CompCtx, psi: &LfCtx, a: &LfType) -> Result<LfKind> {
        match a {
            LfType::Atom(c, args) => {
                let mut kind = Signature.family_kind(*c).ok_or_else(|| {
                    err(TypeErrorKind::IllKinded, Judgment::LfType, format!("{} is not a type family", c.name()))
                })?;
                for m in args {
                    let LfKind::Pi(_, dom, rest) = kind else {
                        return Err(err(
                            TypeErrorKind::IllKinded,
                            Judgment::LfType,
                            format!("{} applied to too many arguments", c.name()),
                        ));
                    };
                    self.check_lf(gamma, psi, m, &dom)?;
                    kind = single_subst_kind(m, &rest)?;
                }
                Ok(kind)
            }
            LfType::Pi(x, dom, cod) => {
                self.check_lf_type(gamma, psi, dom)?;
                self.check_lf_type(gamma, &psi.clone().with(x.as_str(), (**dom).clone()), cod)?;
                Ok(LfKind::Type)
            }
        }
    }

    /// `Gamma; Psi |- A : lftype`
    pub fn check_lf_type(&self, gamma: &CompCtx, psi: &LfCtx, a: &LfType) -> Result<()> {
        match self.kind_lf_type(gamma, psi, a)? {
            LfKind::Type => Ok(()),
            _ => Err(err(TypeErrorKind::IllKinded, Judgment::LfType, "type family is not fully applied")),
        }
    }

    // -----------------------------------------------------------------------
    // LF terms

    /// `Gamma; Psi |- M => A`
    pub fn infer_lf(&self, gamma: &CompCtx, psi: &LfCtx, m: &LfTerm) -> Result<LfType> {
        match m {
            LfTerm::Var(i) => ctx_lookup(psi, *i).map_err(|_| {
                err(TypeErrorKind::UnboundLfVar, Judgment::LfTerm, format!("LF variable #{i} is not declared"))
            }),
            LfTerm::Const(c) => Signature.const_type(*c).ok_or_else(|| {
                err(TypeErrorKind::IllKinded, Judgment::LfTerm, format!("{} is a type family, not a term", c.name()))
            }),
            LfTerm::App(f, n) => {
                let fty = self.infer_lf(gamma, psi, f)?;
                let LfType::Pi(_, dom, cod) = fty else {
                    return Err(TypeError::new(TypeErrorKind::NotAFunction, Judgment::LfTerm, "LF application of a non-function")
                        .actual(self.show_lf_type(gamma, psi, &fty))
                        .into());
                };
                self.check_lf(gamma, psi, n, &dom).map_err(|e| match e {
                    KernelError::Type(mut t) if t.kind == TypeErrorKind::TypeMismatch => {
                        t.kind = TypeErrorKind::DomainMismatch;
                        KernelError::Type(t)
                    }
                    e => e,
                })?;
                single_subst_type(n, &cod)
            }
            LfTerm::Lam(..) => Err(err(
                TypeErrorKind::CannotInfer,
                Judgment::LfTerm,
                "cannot infer the type of an LF abstraction",
            )),
            LfTerm::Unbox(t, sigma) => {
                let ct = self.box_type_of(gamma, t, Judgment::LfTerm)?;
                self.check_lf_subst(gamma, psi, sigma, ct.ctx())?;
                lf_subst_type(sigma, &ct.ctx().erase(), ct.ty())
            }
        }
    }

    fn box_type_of(&self, gamma: &CompCtx, t: &CompTerm, j: Judgment) -> Result<CtxType> {
        let ty = self.infer_comp(gamma, t)?;
        match self.whnf_comp(&ty)? {
            CompTerm::BoxType(ct) => Ok(*ct),
            other => Err(TypeError::new(TypeErrorKind::UnboxNotBox, j, "unboxed computation does not have a box type")
                .actual(self.show(gamma, &other))
                .into()),
        }
    }

    /// `Gamma; Psi |- M <= A`
    pub fn check_lf(&self, gamma: &CompCtx, psi: &LfCtx, m: &LfTerm, a: &LfType) -> Result<()> {
        match (m, a) {
            (LfTerm::Lam(x, body), LfType::Pi(_, dom, cod)) => {
                self.check_lf(gamma, &psi.clone().with(x.as_str(), (**dom).clone()), body, cod)
            }
            (LfTerm::Lam(..), _) => Err(TypeError::new(
                TypeErrorKind::TypeMismatch,
                Judgment::LfTerm,
                "LF abstraction checked against a non-function type",
            )
            .expected(self.show_lf_type(gamma, psi, a))
            .into()),
            _ => {
                let b = self.infer_lf(gamma, psi, m)?;
                if self.conv_lf_type(gamma, psi, &b, a)? {
                    Ok(())
                } else {
                    Err(TypeError::new(TypeErrorKind::TypeMismatch, Judgment::LfTerm, "LF type mismatch")
                        .expected(self.show_lf_type(gamma, psi, a))
                        .actual(self.show_lf_type(gamma, psi, &b))
                        .into())
                }
            }
        }
    }

    /// `Gamma; Psi |-# M : A`: `M` must be a variable of `Psi`, possibly
    /// obtained by unboxing a parameter.
    pub fn check_lf_param(&self, gamma: &CompCtx, psi: &LfCtx, m: &LfTerm, a: &LfType) -> Result<()> {
        let not_param = || err(TypeErrorKind::NotAParameter, Judgment::LfParam, "term is not an LF variable");
        let m = match m {
            LfTerm::Var(_) | LfTerm::Unbox(..) => m.clone(),
            _ => {
                // Checked first so that reduction only sees well-typed input.
                self.check_lf(gamma, psi, m, a)?;
                self.whnf_lf(m)?
            }
        };
        let b = match m {
            LfTerm::Var(i) => ctx_lookup(psi, i).map_err(|_| not_param())?,
            LfTerm::Unbox(t, sigma) => {
                let ct = self.box_type_of(gamma, &t, Judgment::LfParam)?;
                let CtxType::Param(phi, b) = ct else {
                    return Err(not_param());
                };
                if phi.head != psi.head || phi.len() > psi.len() || !self.conv_ctx(gamma, &psi.prefix(phi.len()), &phi)? {
                    return Err(not_param());
                }
                let wk = LfSubst::Wk(phi.erase(), psi.len() - phi.len());
                if !self.conv_subst(gamma, psi, &sigma, &wk, &phi)? {
                    return Err(not_param());
                }
                lf_subst_type(&sigma, &phi.erase(), &b)?
            }
            _ => return Err(not_param()),
        };
        if self.conv_lf_type(gamma, psi, &b, a)? {
            Ok(())
        } else {
            Err(TypeError::new(TypeErrorKind::TypeMismatch, Judgment::LfParam, "parameter type mismatch")
                .expected(self.show_lf_type(gamma, psi, a))
                .actual(self.show_lf_type(gamma, psi, &b))
                .into())
        }
    }

    /// `Gamma; Psi |- sigma : Phi`
    pub fn check_lf_subst(&self, gamma: &CompCtx, psi: &LfCtx, sigma: &LfSubst, phi: &LfCtx) -> Result<()> {
        let not_prefix = |msg: &str| err(TypeErrorKind::NotAPrefix, Judgment::LfSubst, msg.to_string());
        match sigma {
            LfSubst::Empty => {
                if phi.head == CtxHead::Empty && phi.decls.is_empty() {
                    Ok(())
                } else {
                    Err(not_prefix("empty substitution for a nonempty domain"))
                }
            }
            LfSubst::Wk(dom, k) => {
                if dom.head != phi.head || dom.len() != phi.len() {
                    return Err(not_prefix("weakening does not match its domain"));
                }
                if psi.head != phi.head || psi.len() != phi.len() + k {
                    return Err(not_prefix("range does not extend the domain of the weakening"));
                }
                if !self.conv_ctx(gamma, &psi.prefix(phi.len()), phi)? {
                    return Err(not_prefix("range does not extend the domain of the weakening"));
                }
                Ok(())
            }
            LfSubst::Snoc(rest, m) => {
                let n = phi.len();
                if n == 0 {
                    return Err(not_prefix("substitution is longer than its domain"));
                }
                let prefix = phi.prefix(n - 1);
                self.check_lf_subst(gamma, psi, rest, &prefix)?;
                let (x, a) = &phi.decls[n - 1];
                let a = lf_subst_type(rest, &prefix.erase(), a)?;
                self.check_lf(gamma, psi, m, &a).map_err(|e| match e {
                    KernelError::Type(mut t) => {
                        t.kind = TypeErrorKind::EntryTypeMismatch;
                        t.judgment = Judgment::LfSubst;
                        t.message = format!("entry for {x}: {}", t.message);
                        KernelError::Type(t)
                    }
                    e => e,
                })
            }
        }
    }

    // -----------------------------------------------------------------------
    // Contextual objects and types

    /// `Gamma |- T`
    pub fn check_ctx_type(&self, gamma: &CompCtx, t: &CtxType) -> Result<()> {
        self.check_lf_ctx(gamma, t.ctx())?;
        self.check_lf_type(gamma, t.ctx(), t.ty())
    }

    /// `Gamma |- C : T`
    pub fn check_ctx_obj(&self, gamma: &CompCtx, c: &CtxObj, t: &CtxType) -> Result<()> {
        let hat = t.ctx().erase();
        if c.ctx.head != hat.head || c.ctx.len() != hat.len() {
            return Err(TypeError::new(TypeErrorKind::CtxMismatch, Judgment::CtxObj, "contextual object has the wrong context")
                .expected(print::erased_in(&gamma.names(), &hat))
                .actual(print::erased_in(&gamma.names(), &c.ctx))
                .into());
        }
        match t {
            CtxType::Term(psi, a) => self.check_lf(gamma, psi, &c.body, a),
            CtxType::Param(psi, a) => self.check_lf_param(gamma, psi, &c.body, a),
        }
    }

    // -----------------------------------------------------------------------
    // Computations

    /// The sort of a computation-level type.
    pub fn infer_sort(&self, gamma: &CompCtx, tau: &CompType) -> Result<Sort> {
        match tau {
            CompTerm::Univ(k) => {
                if *k >= MAX_LEVEL {
                    return Err(err(TypeErrorKind::UniverseError, Judgment::Comp, format!("universe U{k} has no type")));
                }
                Ok(Sort::Exact(k + 1))
            }
            CompTerm::BoxType(t) => {
                self.check_ctx_type(gamma, t)?;
                Ok(Sort::AtLeast(0))
            }
            CompTerm::Pi(x, dom, cod) => {
                let ds = self.domain_sort(gamma, dom)?;
                let cs = self.infer_sort(&gamma.extended(x.clone(), (**dom).clone()), cod)?;
                Ok(Sort::pi(ds, cs))
            }
            _ => {
                let ty = self.infer_comp(gamma, tau)?;
                match self.whnf_comp(&ty)? {
                    CompTerm::Univ(k) => Ok(Sort::Exact(k)),
                    other => Err(TypeError::new(TypeErrorKind::TypeMismatch, Judgment::Comp, "expected a type")
                        .expected("a universe")
                        .actual(self.show(gamma, &other))
                        .into()),
                }
            }
        }
    }

    pub fn domain_sort(&self, gamma: &CompCtx, d: &Domain) -> Result<Sort> {
        match d {
            Domain::TmCtx => Ok(Sort::AtLeast(0)),
            Domain::Type(t) => self.infer_sort(gamma, t),
        }
    }

    /// `Gamma |- t => tau`
    pub fn infer_comp(&self, gamma: &CompCtx, t: &CompTerm) -> Result<CompType> {
        match t {
            CompTerm::Var(i) => match gamma.lookup(*i) {
                Some(Domain::Type(ty)) => Ok(ty),
                Some(Domain::TmCtx) => Err(err(
                    TypeErrorKind::TypeMismatch,
                    Judgment::Comp,
                    format!("context variable {} used as a computation", self.show(gamma, t)),
                )),
                None => Err(err(TypeErrorKind::UnboundCompVar, Judgment::Comp, format!("unbound variable #{i}"))),
            },
            CompTerm::Global(i, name) => self
                .def(*i)
                .map(|d| d.ty.clone())
                .ok_or_else(|| err(TypeErrorKind::UnboundCompVar, Judgment::Comp, format!("unknown definition {name}"))),
            CompTerm::Univ(_) | CompTerm::Pi(..) | CompTerm::BoxType(_) => {
                let s = self.infer_sort(gamma, t)?;
                Ok(CompTerm::Univ(s.min_level()))
            }
            CompTerm::App(f, a) => {
                let fty = self.infer_comp(gamma, f)?;
                let CompTerm::Pi(_, dom, cod) = self.whnf_comp(&fty)? else {
                    return Err(TypeError::new(TypeErrorKind::NotAFunction, Judgment::Comp, "application of a non-function")
                        .actual(self.show(gamma, &fty))
                        .into());
                };
                let p = self.check_arg(gamma, a, &dom)?;
                instantiate(&*cod, &[p])
            }
            CompTerm::Fn(..) => Err(err(TypeErrorKind::CannotInfer, Judgment::Comp, "cannot infer the type of a function")),
            CompTerm::BoxObj(obj) => {
                // Erased declarations carry no types; in this signature every
                // LF variable of a term context is a `tm`.
                let psi = LfCtx {
                    head: obj.ctx.head,
                    decls: obj.ctx.names.iter().map(|x| (x.clone(), LfType::tm())).collect(),
                };
                self.check_lf_ctx(gamma, &psi)?;
                let a = self.infer_lf(gamma, &psi, &obj.body)?;
                Ok(CompTerm::box_ty(CtxType::Term(psi, a)))
            }
            CompTerm::Rec(r) => self.check_recursor(gamma, r),
        }
    }

    /// Checks an application argument against the domain and returns it as
    /// a substitution payload.
    fn check_arg(&self, gamma: &CompCtx, a: &Arg, dom: &Domain) -> Result<Payload> {
        let mismatch = |msg: &str| err(TypeErrorKind::DomainMismatch, Judgment::Comp, msg.to_string());
        match dom {
            Domain::TmCtx => {
                let ctx = a.as_ctx().ok_or_else(|| mismatch("expected an LF context argument"))?;
                self.schema_check(gamma, &ctx)?;
                Ok(Payload::Ctx(ctx))
            }
            Domain::Type(d) => match a {
                Arg::Term(s) => {
                    self.check_comp(gamma, s, d).map_err(|e| match e {
                        KernelError::Type(mut t) if t.kind == TypeErrorKind::TypeMismatch => {
                            t.kind = TypeErrorKind::DomainMismatch;
                            KernelError::Type(t)
                        }
                        e => e,
                    })?;
                    Ok(Payload::Term(s.clone()))
                }
                Arg::Ctx(_) => Err(mismatch("LF context passed where a computation is expected")),
            },
        }
    }

    /// `Gamma |- t <= tau`
    pub fn check_comp(&self, gamma: &CompCtx, t: &CompTerm, tau: &CompType) -> Result<()> {
        match t {
            CompTerm::Fn(x, body) => match self.whnf_comp(tau)? {
                CompTerm::Pi(_, dom, cod) => self.check_comp(&gamma.extended(x.clone(), *dom), body, &cod),
                other => Err(TypeError::new(TypeErrorKind::NotAFunction, Judgment::Comp, "function checked against a non-function type")
                    .expected(self.show(gamma, &other))
                    .into()),
            },
            CompTerm::BoxObj(obj) => match self.whnf_comp(tau)? {
                CompTerm::BoxType(ct) => self.check_ctx_obj(gamma, obj, &ct),
                other => Err(TypeError::new(TypeErrorKind::TypeMismatch, Judgment::Comp, "box checked against a non-box type")
                    .expected(self.show(gamma, &other))
                    .into()),
            },
            CompTerm::Univ(_) | CompTerm::Pi(..) | CompTerm::BoxType(_) => match self.whnf_comp(tau)? {
                CompTerm::Univ(k) => {
                    let s = self.infer_sort(gamma, t)?;
                    if s.admits(k) {
                        Ok(())
                    } else {
                        let actual = match s {
                            Sort::Exact(j) => format!("U{j}"),
                            Sort::AtLeast(j) => format!("U{j} or above"),
                        };
                        Err(TypeError::new(TypeErrorKind::UniverseError, Judgment::Comp, "type lives in the wrong universe")
                            .expected(format!("U{k}"))
                            .actual(actual)
                            .into())
                    }
                }
                other => Err(TypeError::new(TypeErrorKind::TypeMismatch, Judgment::Comp, "type checked against a non-universe")
                    .expected(self.show(gamma, &other))
                    .actual(self.show(gamma, t))
                    .into()),
            },
            _ => {
                let inferred = self.infer_comp(gamma, t)?;
                if self.conv_comp_type(gamma, &inferred, tau)? {
                    Ok(())
                } else {
                    Err(TypeError::new(TypeErrorKind::TypeMismatch, Judgment::Comp, "type mismatch")
                        .expected(self.show(gamma, tau))
                        .actual(self.show(gamma, &inferred))
                        .into())
                }
            }
        }
    }

    /// Checks that `motive` has the shape `(psi : tm_ctx) -> (y : [psi |- tm]) -> tau`
    /// and returns `tau`.
    pub fn decompose_motive(&self, gamma: &CompCtx, motive: &CompType) -> Result<CompType> {
        let bad = || err(TypeErrorKind::BadInvariantShape, Judgment::Recursor, "invariant must have the shape (psi : tm_ctx) -> (y : [psi |- tm]) -> tau");
        let CompTerm::Pi(x, d1, rest) = self.whnf_comp(motive)? else {
            return Err(bad());
        };
        if *d1 != Domain::TmCtx {
            return Err(bad());
        }
        let inner = gamma.extended(x, Domain::TmCtx);
        let CompTerm::Pi(_, d2, tau) = self.whnf_comp(&rest)? else {
            return Err(bad());
        };
        let Domain::Type(d2) = *d2 else {
            return Err(bad());
        };
        if !self.conv_comp_type(&inner, &d2, &box_tm(LfCtx::var(0)))? {
            return Err(bad());
        }
        Ok(*tau)
    }

    /// `Gamma |- rec^I B Psi t : {Psi/psi, t/y} tau`
    pub fn check_recursor(&self, gamma: &CompCtx, r: &Recursor) -> Result<CompType> {
        self.infer_sort(gamma, &r.motive).map_err(|e| in_context(e, "invariant"))?;
        let tau = self.decompose_motive(gamma, &r.motive)?;
        self.schema_check(gamma, &r.ctx)?;
        self.check_comp(gamma, &r.scrutinee, &box_tm(r.ctx.clone()))
            .map_err(|e| in_context(e, "scrutinee"))?;
        let branches = [("var", &r.branches.var), ("app", &r.branches.app), ("lam", &r.branches.lam)];
        for ((label, b), spec) in branches.into_iter().zip(branch_specs(&tau)) {
            let spec = spec?;
            if b.binders.len() != spec.entries.len() {
                return Err(err(
                    TypeErrorKind::BadInvariantShape,
                    Judgment::Recursor,
                    format!("{label} branch binds {} variables, expected {}", b.binders.len(), spec.entries.len()),
                ));
            }
            let mut inner = gamma.clone();
            for (x, (_, d)) in b.binders.iter().zip(spec.entries) {
                inner.push(x.clone(), d);
            }
            self.check_comp(&inner, &b.body, &spec.goal)
                .map_err(|e| in_context(e, &format!("{label} branch")))?;
        }
        instantiate_motive(&tau, 0, Payload::Ctx(r.ctx.clone()), Payload::Term(r.scrutinee.clone()))
    }

    /// The type of a weak head neutral computation, read off without
    /// rechecking its parts.
    pub fn typeof_neutral(&self, gamma: &CompCtx, t: &CompTerm) -> Result<CompType> {
        let not_neutral = || err(TypeErrorKind::NotNeutral, Judgment::Comp, "term is not neutral");
        if !is_wne_comp(t) {
            return Err(not_neutral());
        }
        match t {
            CompTerm::Var(i) => match gamma.lookup(*i) {
                Some(Domain::Type(ty)) => Ok(ty),
                _ => Err(not_neutral()),
            },
            CompTerm::App(f, a) => {
                let fty = self.typeof_neutral(gamma, f)?;
                let CompTerm::Pi(_, dom, cod) = self.whnf_comp(&fty)? else {
                    return Err(not_neutral());
                };
                let p = match *dom {
                    Domain::TmCtx => Payload::Ctx(a.as_ctx().ok_or_else(not_neutral)?),
                    Domain::Type(_) => Payload::from((**a).clone()),
                };
                instantiate(&*cod, &[p])
            }
            CompTerm::Rec(r) => {
                let tau = self.decompose_motive(gamma, &r.motive)?;
                instantiate_motive(&tau, 0, Payload::Ctx(r.ctx.clone()), Payload::Term(r.scrutinee.clone()))
            }
            _ => Err(not_neutral()),
        }
    }

    /// `Gamma' |- theta : Gamma`
    pub fn check_comp_subst(&self, target: &CompCtx, theta: &CompSubst, source: &CompCtx) -> Result<()> {
        if theta.len() != source.len() {
            return Err(err(
                TypeErrorKind::TypeMismatch,
                Judgment::Substitution,
                format!("substitution has {} entries for a context of {}", theta.len(), source.len()),
            ));
        }
        let mut prefix = CompSubst::new();
        for ((x, d), (_, p)) in source.entries.iter().zip(&theta.entries) {
            let d = csubst_sim(&prefix, d)?;
            let res = match (&d, p) {
                (Domain::TmCtx, p) => match Arg::from_payload(p).as_ctx() {
                    Some(c) => self.schema_check(target, &c),
                    None => Err(err(TypeErrorKind::DomainMismatch, Judgment::Substitution, "expected an LF context")),
                },
                (Domain::Type(ty), Payload::Term(s)) => self.check_comp(target, s, ty),
                (Domain::Type(_), Payload::Ctx(_)) => {
                    Err(err(TypeErrorKind::DomainMismatch, Judgment::Substitution, "expected a computation"))
                }
            };
            res.map_err(|e| in_context(e, &format!("entry for {x}")))?;
            prefix.entries.push((x.clone(), p.clone()));
        }
        Ok(())
    }

    /// Checks a closed type and then a closed term against it.
    pub fn check_closed(&self, t: &CompTerm, tau: &CompType) -> Result<()> {
        let g = CompCtx::new();
        self.infer_sort(&g, tau)?;
        self.check_comp(&g, t, tau)
    }

    /// Box-η and α aware equality of two closed contextual objects at `T`.
    pub fn same_ctx_obj(&self, gamma: &CompCtx, a: &CtxObj, b: &CtxObj, t: &CtxType) -> Result<bool> {
        if alpha_eq(a, b) {
            return Ok(true);
        }
        self.conv_lf(gamma, t.ctx(), &a.body, &b.body, t.ty())
    }

    /// The identity substitution on `psi`, as used by box-η.
    pub fn id_of(&self, psi: &LfCtx) -> LfSubst {
        id_subst(psi)
    }
}

impl Arg {
    fn from_payload(p: &Payload) -> Arg {
        match p {
            Payload::Term(t) => Arg::Term(t.clone()),
            Payload::Ctx(c) => Arg::ctx(c.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Branch, Branches, Const};

    fn tm() -> LfType {
        LfType::tm()
    }

    fn k() -> Kernel {
        Kernel::new()
    }

    fn kind(e: Result<impl std::fmt::Debug>) -> Option<TypeErrorKind> {
        e.err().and_then(|e| e.kind())
    }

    #[test]
    fn comp_contexts() {
        assert!(k().check_comp_ctx(&CompCtx::new()).is_ok());
        assert!(k().check_comp_ctx(&CompCtx::new().with("psi", Domain::TmCtx)).is_ok());
        let bad = CompCtx::new().with("y", Domain::Type(CompTerm::Var(0)));
        assert_eq!(kind(k().check_comp_ctx(&bad)), Some(TypeErrorKind::UnboundCompVar));
    }

    #[test]
    fn lf_contexts() {
        let g = CompCtx::new().with("psi", Domain::TmCtx);
        assert!(k().check_lf_ctx(&CompCtx::new(), &LfCtx::empty()).is_ok());
        assert!(k().check_lf_ctx(&g, &LfCtx::var(0).with("x", tm())).is_ok());
        assert_eq!(kind(k().check_lf_ctx(&CompCtx::new(), &LfCtx::var(0))), Some(TypeErrorKind::UnknownCtxVar));
    }

    #[test]
    fn schemas() {
        let g = CompCtx::new().with("psi", Domain::TmCtx);
        assert!(k().schema_check(&g, &LfCtx::empty()).is_ok());
        assert!(k().schema_check(&g, &LfCtx::var(0).with("x", tm())).is_ok());
        let bad = LfCtx::empty().with("x", LfType::arrow(tm(), tm()));
        assert_eq!(kind(k().schema_check(&g, &bad)), Some(TypeErrorKind::SchemaViolation));
    }

    #[test]
    fn lf_terms() {
        let g = CompCtx::new();
        let psi = LfCtx::empty().with("x", tm());
        assert_eq!(k().infer_lf(&g, &psi, &LfTerm::Var(0)), Ok(tm()));
        assert_eq!(k().infer_lf(&g, &psi, &LfTerm::Const(Const::Lam)), Ok(Signature.const_type(Const::Lam).unwrap()));
        // m : [psi |- tm] ; psi |- m[id] => tm
        let g = CompCtx::new()
            .with("psi", Domain::TmCtx)
            .with("m", Domain::Type(box_tm(LfCtx::var(0))));
        let psi = LfCtx::var(1);
        let m = LfTerm::unbox(CompTerm::Var(0), LfSubst::Wk(ErasedCtx::var(1), 0));
        assert_eq!(k().infer_lf(&g, &psi, &m), Ok(tm()));
        let app = LfTerm::app(LfTerm::Var(0), LfTerm::Var(0));
        let psi = LfCtx::empty().with("x", tm());
        assert_eq!(kind(k().infer_lf(&CompCtx::new(), &psi, &app)), Some(TypeErrorKind::NotAFunction));
    }

    #[test]
    fn params() {
        let g = CompCtx::new();
        let psi = LfCtx::empty().with("x", tm());
        assert!(k().check_lf_param(&g, &psi, &LfTerm::Var(0), &tm()).is_ok());
        let lam = LfTerm::lam_tm("y", LfTerm::Var(0));
        assert_eq!(kind(k().check_lf_param(&g, &psi, &lam, &tm())), Some(TypeErrorKind::NotAParameter));
        let g = CompCtx::new()
            .with("psi", Domain::TmCtx)
            .with("p", Domain::Type(CompTerm::box_ty(CtxType::Param(LfCtx::var(0), tm()))));
        let psi = LfCtx::var(1).with("x", tm());
        let m = LfTerm::unbox(CompTerm::Var(0), LfSubst::Wk(ErasedCtx::var(1), 1));
        assert!(k().check_lf_param(&g, &psi, &m, &tm()).is_ok());
    }

    #[test]
    fn lf_substs() {
        let g = CompCtx::new().with("psi", Domain::TmCtx);
        let x = LfCtx::empty().with("x", tm());
        assert!(k().check_lf_subst(&g, &x, &LfSubst::Wk(ErasedCtx::empty(), 1), &LfCtx::empty()).is_ok());
        let psix = LfCtx::var(0).with("x", tm());
        assert!(k().check_lf_subst(&g, &psix, &LfSubst::Wk(ErasedCtx::var(0), 1), &LfCtx::var(0)).is_ok());
        let s = LfSubst::Empty.snoc(LfTerm::lam_tm("z", LfTerm::Var(0)));
        assert!(k().check_lf_subst(&g, &LfCtx::empty(), &s, &x).is_ok());
        let s = LfSubst::Empty.snoc(LfTerm::Const(Const::Lam));
        assert_eq!(kind(k().check_lf_subst(&g, &LfCtx::empty(), &s, &x)), Some(TypeErrorKind::EntryTypeMismatch));
        assert_eq!(
            kind(k().check_lf_subst(&g, &LfCtx::empty(), &LfSubst::Wk(ErasedCtx::var(0), 0), &LfCtx::var(0))),
            Some(TypeErrorKind::NotAPrefix)
        );
    }

    #[test]
    fn kinding() {
        let g = CompCtx::new();
        let p = LfCtx::empty();
        assert_eq!(k().kind_lf_type(&g, &p, &tm()), Ok(LfKind::Type));
        assert_eq!(k().kind_lf_type(&g, &p, &LfType::arrow(tm(), tm())), Ok(LfKind::Type));
        let bad = LfType::Atom(Const::Tm, vec![LfTerm::Const(Const::Lam)]);
        assert_eq!(kind(k().kind_lf_type(&g, &p, &bad)), Some(TypeErrorKind::IllKinded));
    }

    #[test]
    fn ctx_objs() {
        let g = CompCtx::new();
        let x = LfCtx::empty().with("x", tm());
        let obj = CtxObj { ctx: x.erase(), body: LfTerm::Var(0) };
        assert!(k().check_ctx_obj(&g, &obj, &CtxType::Term(x, tm())).is_ok());
        let obj2 = CtxObj { ctx: ErasedCtx::empty(), body: LfTerm::lam_tm("x", LfTerm::Var(0)) };
        assert!(k().check_ctx_obj(&g, &obj2, &CtxType::Term(LfCtx::empty(), tm())).is_ok());
        assert_eq!(kind(k().check_ctx_obj(&g, &obj, &CtxType::Term(LfCtx::empty(), tm()))), Some(TypeErrorKind::CtxMismatch));
    }

    #[test]
    fn universes_and_functions() {
        let g = CompCtx::new();
        assert_eq!(k().infer_comp(&g, &CompTerm::Univ(0)), Ok(CompTerm::Univ(1)));
        assert_eq!(kind(k().infer_comp(&g, &CompTerm::Univ(MAX_LEVEL))), Some(TypeErrorKind::UniverseError));
        let copy_ty = CompTerm::pi(
            "psi",
            Domain::TmCtx,
            CompTerm::pi("m", Domain::Type(box_tm(LfCtx::var(0))), box_tm(LfCtx::var(1))),
        );
        assert!(k().check_comp(&g, &copy_ty, &CompTerm::Univ(0)).is_ok());
        assert!(k().check_comp(&g, &copy_ty, &CompTerm::Univ(3)).is_ok());
        let f = CompTerm::fun("y", CompTerm::Var(0));
        assert_eq!(kind(k().check_comp(&g, &f, &CompTerm::Univ(0))), Some(TypeErrorKind::NotAFunction));
        assert_eq!(kind(k().check_comp(&g, &CompTerm::Univ(0), &CompTerm::Univ(2))), Some(TypeErrorKind::UniverseError));
    }

    #[test]
    fn sort_lattice() {
        assert_eq!(Sort::pi(Sort::Exact(1), Sort::Exact(0)), Sort::Exact(1));
        assert_eq!(Sort::pi(Sort::AtLeast(0), Sort::Exact(2)), Sort::AtLeast(2));
        assert!(Sort::AtLeast(1).admits(4));
        assert!(!Sort::Exact(1).admits(4));
    }

    fn copy_rec(ctx: LfCtx, scrutinee: CompTerm) -> Recursor {
        // Under (psi, y): [psi |- tm]
        let tau = box_tm(LfCtx::var(1));
        let motive = CompTerm::pi("psi", Domain::TmCtx, CompTerm::pi("y", Domain::Type(box_tm(LfCtx::var(0))), tau));
        let id = |i: usize| LfSubst::Wk(ErasedCtx::var(i), 0);
        Recursor {
            motive,
            branches: Branches {
                var: Branch::new(&["psi", "p"], CompTerm::box_obj(ErasedCtx::var(1), LfTerm::unbox(CompTerm::Var(0), id(1)))),
                app: Branch::new(
                    &["psi", "m", "n", "f_n", "f_m"],
                    CompTerm::box_obj(
                        ErasedCtx::var(4),
                        LfTerm::app_tm(LfTerm::unbox(CompTerm::Var(1), id(4)), LfTerm::unbox(CompTerm::Var(0), id(4))),
                    ),
                ),
                lam: Branch::new(
                    &["psi", "m", "f_m"],
                    CompTerm::box_obj(
                        ErasedCtx::var(2),
                        LfTerm::lam_tm(
                            "x",
                            LfTerm::unbox(CompTerm::Var(0), LfSubst::Wk(ErasedCtx::var(2).with("x"), 0)),
                        ),
                    ),
                ),
            },
            ctx,
            scrutinee,
        }
    }

    #[test]
    fn copy_typechecks_and_runs() {
        let kern = k();
        let g = CompCtx::new();
        let input = CompTerm::box_obj(
            ErasedCtx::empty(),
            LfTerm::lam_tm("x", LfTerm::app_tm(LfTerm::Var(0), LfTerm::Var(0))),
        );
        let r = CompTerm::rec(copy_rec(LfCtx::empty(), input.clone()));
        let ty = kern.infer_comp(&g, &r).unwrap();
        assert!(kern.conv_comp_type(&g, &ty, &box_tm(LfCtx::empty())).unwrap());
        let w = kern.whnf_comp(&r).unwrap();
        assert!(kern.conv_comp(&g, &w, &input, &box_tm(LfCtx::empty())).unwrap());
    }

    #[test]
    fn bad_branch_arity() {
        let mut r = copy_rec(LfCtx::empty(), CompTerm::box_obj(ErasedCtx::empty(), LfTerm::lam_tm("x", LfTerm::Var(0))));
        r.branches.var.binders.pop();
        assert_eq!(kind(k().check_recursor(&CompCtx::new(), &r)), Some(TypeErrorKind::BadInvariantShape));
    }

    #[test]
    fn neutral_types() {
        let g = CompCtx::new()
            .with("a", Domain::Type(CompTerm::Univ(0)))
            .with("f", Domain::Type(CompTerm::pi("y", Domain::Type(CompTerm::Var(0)), CompTerm::Var(1))))
            .with("s", Domain::Type(CompTerm::Var(1)));
        assert_eq!(k().typeof_neutral(&g, &CompTerm::Var(0)), Ok(CompTerm::Var(2)));
        let app = CompTerm::app(CompTerm::Var(1), CompTerm::Var(0));
        assert_eq!(k().typeof_neutral(&g, &app), Ok(CompTerm::Var(2)));
        assert_eq!(kind(k().typeof_neutral(&g, &CompTerm::fun("y", CompTerm::Var(0)))), Some(TypeErrorKind::NotNeutral));
    }

    #[test]
    fn comp_substs() {
        assert!(k().check_comp_subst(&CompCtx::new(), &CompSubst::new(), &CompCtx::new()).is_ok());
        let g = CompCtx::new().with("y", Domain::Type(CompTerm::Univ(0)));
        assert!(k().check_comp_subst(&g, &CompSubst::identity(&g), &g).is_ok());
        let src = CompCtx::new().with("psi", Domain::TmCtx);
        let theta = CompSubst::new().with("psi", Payload::Ctx(LfCtx::empty()));
        assert!(k().check_comp_subst(&CompCtx::new(), &theta, &src).is_ok());
    }
}
