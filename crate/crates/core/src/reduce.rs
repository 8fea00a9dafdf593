//! Weak head reduction for both layers.
//!
//! Reduction is untyped and deterministic. Every contraction (β at either
//! layer, unfolding of a definition, unboxing a box, recursor dispatch)
//! consumes one unit of fuel, so reduction of ill-typed input terminates.

use std::cell::Cell;
use std::fmt;

use crate::comp_subst::{instantiate, Payload};
use crate::error::{KernelError, Result};
use crate::lf_subst::{lf_subst_term, single_subst};
use crate::syntax::{
    Arg, Branch, Branches, CompTerm, Const, CtxHead, CtxObj, CtxType, Domain, ErasedCtx, LfCtx, LfSubst, LfTerm,
    LfType, Name, Recursor,
    APP_ARITY, LAM_ARITY, VAR_ARITY,
};

pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WhnfClass {
    /// Weak head neutral (and therefore also weak head normal).
    Wne,
    Whnf,
    Reducible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    LfBeta,
    UnboxBox,
    CompBeta,
    Delta,
    RecVar,
    RecApp,
    RecLam,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::LfBeta => "lf-beta",
            Rule::UnboxBox => "unbox-box",
            Rule::CompBeta => "beta",
            Rule::Delta => "delta",
            Rule::RecVar => "rec-var",
            Rule::RecApp => "rec-app",
            Rule::RecLam => "rec-lam",
        }
    }
}

/// The redex contracted by a head step.
#[derive(Clone, Debug)]
pub enum Redex {
    Lf(LfTerm),
    Comp(CompTerm),
}

#[derive(Clone, Debug)]
pub struct TraceStep {
    pub rule: Rule,
    pub redex: Redex,
}

/// A checked top-level definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Definition {
    pub name: Name,
    pub ty: CompTerm,
    pub body: CompTerm,
}

type TraceHook = Box<dyn Fn(&TraceStep)>;

/// Reduction, conversion and checking state: the definitions in scope, the
/// step budget and an optional trace hook.
pub struct Kernel {
    defs: Vec<Definition>,
    fuel_limit: u64,
    fuel: Cell<u64>,
    trace: Option<TraceHook>,
    pub(crate) lf_eta: bool,
}

impl Default for Kernel {
    fn default() -> Kernel {
        Kernel::new()
    }
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("defs", &self.defs.len())
            .field("fuel_limit", &self.fuel_limit)
            .field("fuel", &self.fuel.get())
            .finish()
    }
}

impl Kernel {
    pub fn new() -> Kernel {
        Kernel::with_fuel(DEFAULT_FUEL)
    }

    pub fn with_fuel(limit: u64) -> Kernel {
        Kernel { defs: Vec::new(), fuel_limit: limit, fuel: Cell::new(limit), trace: None, lf_eta: true }
    }

    pub fn set_trace(&mut self, hook: impl Fn(&TraceStep) + 'static) {
        self.trace = Some(Box::new(hook));
    }

    /// Disables LF η in conversion. Only meant for mutation testing of the
    /// property harness.
    pub fn disable_lf_eta(&mut self) {
        self.lf_eta = false;
    }

    pub fn fuel_limit(&self) -> u64 {
        self.fuel_limit
    }

    pub fn fuel_left(&self) -> u64 {
        self.fuel.get()
    }

    pub fn reset_fuel(&self) {
        self.fuel.set(self.fuel_limit);
    }

    pub fn defs(&self) -> &[Definition] {
        &self.defs
    }

    pub fn def(&self, i: usize) -> Option<&Definition> {
        self.defs.get(i)
    }

    /// Adds a definition without checking it; returns its reference.
    pub fn push_def(&mut self, def: Definition) -> CompTerm {
        let t = CompTerm::Global(self.defs.len(), def.name.clone());
        self.defs.push(def);
        t
    }

    /// Consumes one unit of fuel. The redex is only built when tracing.
    fn tick(&self, rule: Rule, redex: impl FnOnce() -> Redex) -> Result<()> {
        let left = self.fuel.get();
        if left == 0 {
            return Err(KernelError::FuelExhausted(self.fuel_limit));
        }
        self.fuel.set(left - 1);
        if let Some(hook) = &self.trace {
            hook(&TraceStep { rule, redex: redex() });
        }
        Ok(())
    }

    // -----------------------------------------------------------------------
    // LF

    pub fn whnf_lf(&self, m: &LfTerm) -> Result<LfTerm> {
        let mut head = m.clone();
        let mut spine: Vec<LfTerm> = Vec::new();
        loop {
            match head {
                LfTerm::App(f, a) => {
                    spine.push(*a);
                    head = *f;
                }
                LfTerm::Lam(x, body) => match spine.pop() {
                    Some(a) => {
                        self.tick(Rule::LfBeta, || Redex::Lf(LfTerm::app(LfTerm::Lam(x.clone(), body.clone()), a.clone())))?;
                        head = single_subst(&a, &body)?;
                    }
                    None => {
                        head = LfTerm::Lam(x, body);
                        break;
                    }
                },
                LfTerm::Unbox(t, sigma) => {
                    let w = self.whnf_comp(&t)?;
                    match w {
                        CompTerm::BoxObj(obj) => {
                            self.tick(Rule::UnboxBox, || {
                                Redex::Lf(LfTerm::Unbox(Box::new(CompTerm::BoxObj(obj.clone())), sigma.clone()))
                            })?;
                            head = lf_subst_term(&sigma, &obj.ctx, &obj.body)?;
                        }
                        w if is_wne_comp(&w) => {
                            head = LfTerm::Unbox(Box::new(w), sigma);
                            break;
                        }
                        w => return Err(KernelError::StuckTerm(format!("unbox of a non-box value {w:?}"))),
                    }
                }
                LfTerm::Var(_) | LfTerm::Const(_) => break,
            }
        }
        while let Some(a) = spine.pop() {
            head = LfTerm::app(head, a);
        }
        Ok(head)
    }

    pub fn whnf_subst(&self, s: &LfSubst) -> LfSubst {
        whnf_subst(s)
    }

    // -----------------------------------------------------------------------
    // Computations

    pub fn whnf_comp(&self, t: &CompTerm) -> Result<CompTerm> {
        let mut head = t.clone();
        let mut spine: Vec<Arg> = Vec::new();
        loop {
            match head {
                CompTerm::App(f, a) => {
                    spine.push(*a);
                    head = *f;
                }
                CompTerm::Fn(x, body) => match spine.pop() {
                    Some(a) => {
                        self.tick(Rule::CompBeta, || {
                            Redex::Comp(CompTerm::App(Box::new(CompTerm::Fn(x.clone(), body.clone())), Box::new(a.clone())))
                        })?;
                        head = instantiate(&*body, &[Payload::from(a)])?;
                    }
                    None => {
                        head = CompTerm::Fn(x, body);
                        break;
                    }
                },
                CompTerm::Global(i, name) => {
                    let def = self.defs.get(i).ok_or_else(|| KernelError::StuckTerm(format!("unknown definition {name}")))?;
                    self.tick(Rule::Delta, || Redex::Comp(CompTerm::Global(i, name.clone())))?;
                    head = def.body.clone();
                }
                CompTerm::Rec(r) => match self.step_rec(*r)? {
                    RecStep::Neutral(r) => {
                        head = CompTerm::Rec(r);
                        break;
                    }
                    RecStep::Continue(t) => head = t,
                },
                _ => break,
            }
        }
        while let Some(a) = spine.pop() {
            head = CompTerm::App(Box::new(head), Box::new(a));
        }
        Ok(head)
    }

    fn step_rec(&self, r: Recursor) -> Result<RecStep> {
        let s = self.whnf_comp(&r.scrutinee)?;
        match s {
            CompTerm::BoxObj(obj) => {
                let n = self.whnf_lf(&obj.body)?;
                if unbox_headed(&n) {
                    let scrutinee = CompTerm::BoxObj(Box::new(CtxObj { ctx: obj.ctx, body: n }));
                    return Ok(RecStep::Neutral(Box::new(Recursor { scrutinee, ..r })));
                }
                let ctx = obj.ctx;
                let rec = Recursor { scrutinee: CompTerm::box_obj(ctx.clone(), n.clone()), ..r };
                self.dispatch(&rec, &ctx, &n).map(RecStep::Continue)
            }
            s if is_wne_comp(&s) => Ok(RecStep::Neutral(Box::new(Recursor { scrutinee: s, ..r }))),
            s => Err(KernelError::StuckTerm(format!("recursor applied to non-box value {s:?}"))),
        }
    }

    /// Selects the branch for the whnf `n` of the scrutinee's body and
    /// instantiates its pattern variables. The result is not reduced further.
    pub fn branch_dispatch(&self, rec: &Recursor, n: &LfTerm) -> Result<CompTerm> {
        let ctx = rec.ctx.erase();
        self.dispatch(rec, &ctx, n)
    }

    fn dispatch(&self, rec: &Recursor, hat: &ErasedCtx, n: &LfTerm) -> Result<CompTerm> {
        let psi = Payload::Ctx(rec.ctx.clone());
        let boxed = |m: LfTerm| CompTerm::box_obj(hat.clone(), m);
        let call = |ctx: LfCtx, scrutinee: CompTerm| {
            CompTerm::rec(Recursor { motive: rec.motive.clone(), branches: rec.branches.clone(), ctx, scrutinee })
        };
        let redex = || Redex::Comp(CompTerm::rec(rec.clone()));
        let (head, args) = n.spine();
        match (head, args.as_slice()) {
            (LfTerm::Var(_), []) => {
                self.tick(Rule::RecVar, redex)?;
                let b = arity(&rec.branches.var, VAR_ARITY)?;
                instantiate(&b.body, &[psi, Payload::Term(boxed(n.clone()))])
            }
            (LfTerm::Const(Const::App), [m, k]) => {
                self.tick(Rule::RecApp, redex)?;
                let b = arity(&rec.branches.app, APP_ARITY)?;
                let bm = boxed((*m).clone());
                let bn = boxed((*k).clone());
                let fm = call(rec.ctx.clone(), bm.clone());
                let fn_ = call(rec.ctx.clone(), bn.clone());
                instantiate(&b.body, &[psi, Payload::Term(bm), Payload::Term(bn), Payload::Term(fm), Payload::Term(fn_)])
            }
            (LfTerm::Const(Const::Lam), [m]) => {
                self.tick(Rule::RecLam, redex)?;
                let b = arity(&rec.branches.lam, LAM_ARITY)?;
                let (x, body) = match m {
                    LfTerm::Lam(x, body) => (x.clone(), (**body).clone()),
                    // An η-short argument is expanded to expose the binder.
                    other => (Name::new("x"), LfTerm::app(crate::lf_subst::shift_term(other, 1, 0), LfTerm::Var(0))),
                };
                let mut ext_hat = hat.clone();
                ext_hat.names.push(x.clone());
                let mut ext = rec.ctx.clone();
                ext.decls.push((x, LfType::tm()));
                let bm = CompTerm::box_obj(ext_hat, body);
                let fm = call(ext, bm.clone());
                instantiate(&b.body, &[psi, Payload::Term(bm), Payload::Term(fm)])
            }
            _ => Err(KernelError::DispatchFailure(format!("{n:?}"))),
        }
    }

    // -----------------------------------------------------------------------
    // Full normalization, by iterated weak head reduction.

    pub fn normalize_comp(&self, t: &CompTerm) -> Result<CompTerm> {
        Ok(match self.whnf_comp(t)? {
            CompTerm::Fn(x, b) => CompTerm::Fn(x, Box::new(self.normalize_comp(&b)?)),
            CompTerm::Pi(x, d, c) => CompTerm::Pi(x, Box::new(self.normalize_domain(&d)?), Box::new(self.normalize_comp(&c)?)),
            CompTerm::BoxType(ct) => CompTerm::BoxType(Box::new(match *ct {
                CtxType::Term(psi, a) => CtxType::Term(self.normalize_ctx(&psi)?, self.normalize_lf_type(&a)?),
                CtxType::Param(psi, a) => CtxType::Param(self.normalize_ctx(&psi)?, self.normalize_lf_type(&a)?),
            })),
            CompTerm::BoxObj(obj) => CompTerm::box_obj(obj.ctx.clone(), self.normalize_lf(&obj.body)?),
            CompTerm::App(f, a) => {
                let a = match *a {
                    Arg::Term(t) => Arg::Term(self.normalize_comp(&t)?),
                    Arg::Ctx(c) => Arg::ctx(self.normalize_ctx(&c)?),
                };
                CompTerm::App(Box::new(self.normalize_comp(&f)?), Box::new(a))
            }
            CompTerm::Rec(r) => {
                let branch = |b: &Branch| -> Result<Branch> {
                    Ok(Branch { binders: b.binders.clone(), body: self.normalize_comp(&b.body)? })
                };
                CompTerm::rec(Recursor {
                    motive: self.normalize_comp(&r.motive)?,
                    branches: Branches {
                        var: branch(&r.branches.var)?,
                        app: branch(&r.branches.app)?,
                        lam: branch(&r.branches.lam)?,
                    },
                    ctx: self.normalize_ctx(&r.ctx)?,
                    scrutinee: self.normalize_comp(&r.scrutinee)?,
                })
            }
            w => w,
        })
    }

    fn normalize_domain(&self, d: &Domain) -> Result<Domain> {
        Ok(match d {
            Domain::TmCtx => Domain::TmCtx,
            Domain::Type(t) => Domain::Type(self.normalize_comp(t)?),
        })
    }

    fn normalize_ctx(&self, psi: &LfCtx) -> Result<LfCtx> {
        let decls = psi
            .decls
            .iter()
            .map(|(x, a)| Ok((x.clone(), self.normalize_lf_type(a)?)))
            .collect::<Result<_>>()?;
        Ok(LfCtx { head: psi.head, decls })
    }

    fn normalize_lf_type(&self, a: &LfType) -> Result<LfType> {
        Ok(match a {
            LfType::Atom(c, args) => LfType::Atom(*c, args.iter().map(|m| self.normalize_lf(m)).collect::<Result<_>>()?),
            LfType::Pi(x, a, b) => {
                LfType::Pi(x.clone(), Box::new(self.normalize_lf_type(a)?), Box::new(self.normalize_lf_type(b)?))
            }
        })
    }

    pub fn normalize_lf(&self, m: &LfTerm) -> Result<LfTerm> {
        Ok(match self.whnf_lf(m)? {
            LfTerm::Lam(x, b) => LfTerm::Lam(x, Box::new(self.normalize_lf(&b)?)),
            LfTerm::App(f, a) => LfTerm::app(self.normalize_lf(&f)?, self.normalize_lf(&a)?),
            LfTerm::Unbox(t, s) => LfTerm::unbox(self.normalize_comp(&t)?, self.normalize_subst(&s)?),
            w => w,
        })
    }

    fn normalize_subst(&self, s: &LfSubst) -> Result<LfSubst> {
        Ok(match s {
            LfSubst::Snoc(r, m) => self.normalize_subst(r)?.snoc(self.normalize_lf(m)?),
            s => s.clone(),
        })
    }
}

enum RecStep {
    Neutral(Box<Recursor>),
    Continue(CompTerm),
}

fn arity(b: &Branch, n: usize) -> Result<&Branch> {
    if b.binders.len() == n {
        Ok(b)
    } else {
        Err(KernelError::DispatchFailure(format!("branch binds {} variables, expected {n}", b.binders.len())))
    }
}

/// Unfolds a weakening one step; every other substitution is already in whnf.
pub fn whnf_subst(s: &LfSubst) -> LfSubst {
    match s {
        LfSubst::Wk(dom, k) if !dom.names.is_empty() => {
            let n = dom.names.len();
            LfSubst::Wk(dom.prefix(n - 1), k + 1).snoc(LfTerm::Var(*k))
        }
        LfSubst::Wk(dom, _) if dom.head == CtxHead::Empty => LfSubst::Empty,
        _ => s.clone(),
    }
}

/// True when the spine of `m` is headed by an unbox of a neutral computation.
pub fn unbox_headed(m: &LfTerm) -> bool {
    matches!(m.spine().0, LfTerm::Unbox(t, _) if is_wne_comp(t))
}

pub fn is_wne_lf(m: &LfTerm) -> bool {
    match m.spine() {
        (LfTerm::Var(_) | LfTerm::Const(_), _) => true,
        (LfTerm::Unbox(t, _), _) => is_wne_comp(t),
        (LfTerm::Lam(..), _) | (LfTerm::App(..), _) => false,
    }
}

pub fn classify_lf(m: &LfTerm) -> WhnfClass {
    if is_wne_lf(m) {
        WhnfClass::Wne
    } else if matches!(m, LfTerm::Lam(..)) {
        WhnfClass::Whnf
    } else {
        WhnfClass::Reducible
    }
}

pub fn classify_subst(s: &LfSubst) -> WhnfClass {
    match s {
        LfSubst::Wk(dom, _) if !dom.names.is_empty() || dom.head == CtxHead::Empty => WhnfClass::Reducible,
        _ => WhnfClass::Whnf,
    }
}

pub fn is_wne_comp(t: &CompTerm) -> bool {
    match t {
        CompTerm::Var(_) => true,
        CompTerm::App(f, _) => is_wne_comp(f),
        CompTerm::Rec(r) => match &r.scrutinee {
            CompTerm::BoxObj(obj) => unbox_headed(&obj.body),
            s => is_wne_comp(s),
        },
        _ => false,
    }
}

pub fn classify_comp(t: &CompTerm) -> WhnfClass {
    match t {
        CompTerm::Univ(_) | CompTerm::BoxType(_) | CompTerm::Pi(..) | CompTerm::Fn(..) | CompTerm::BoxObj(_) => {
            WhnfClass::Whnf
        }
        t if is_wne_comp(t) => WhnfClass::Wne,
        _ => WhnfClass::Reducible,
    }
}
