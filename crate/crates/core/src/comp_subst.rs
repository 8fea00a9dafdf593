//! Computation-level substitution and shifting.
//!
//! Every operation is an instance of one traversal that visits each free
//! computation variable together with the number of computation binders
//! crossed to reach it. Variables occur both as computations and as heads of
//! LF contexts, so a replacement is a [`Payload`] that can take either role.

use std::convert::Infallible;

use crate::error::{Judgment, KernelError, Result, TypeError, TypeErrorKind};
use crate::syntax::{
    Arg, Branch, Branches, CompCtx, CompTerm, CtxHead, CtxObj, CtxType, Domain, ErasedCtx, LfCtx, LfKind, LfSubst,
    LfTerm, LfType, Name, Recursor,
};

/// What a computation variable can stand for.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Payload {
    Term(CompTerm),
    Ctx(LfCtx),
}

impl Payload {
    pub fn var(i: usize) -> Payload {
        Payload::Term(CompTerm::Var(i))
    }

    fn into_term(self) -> Option<CompTerm> {
        match self {
            Payload::Term(t) => Some(t),
            Payload::Ctx(LfCtx { head: CtxHead::Var(j), decls }) if decls.is_empty() => Some(CompTerm::Var(j)),
            Payload::Ctx(_) => None,
        }
    }

    fn into_ctx(self) -> Option<LfCtx> {
        match self {
            Payload::Ctx(c) => Some(c),
            Payload::Term(CompTerm::Var(j)) => Some(LfCtx::var(j)),
            Payload::Term(_) => None,
        }
    }

    fn into_arg(self) -> Arg {
        match self {
            Payload::Term(t) => Arg::Term(t),
            Payload::Ctx(c) => Arg::ctx(c),
        }
    }
}

impl From<Arg> for Payload {
    fn from(a: Arg) -> Payload {
        match a {
            Arg::Term(t) => Payload::Term(t),
            Arg::Ctx(c) => Payload::Ctx(c),
        }
    }
}

/// Replacement for free computation variables.
pub trait VarMap {
    type Err;
    /// The replacement for variable `i` found under `depth` binders, already
    /// valid under those binders.
    fn var(&self, i: usize, depth: usize) -> Result<Payload, Self::Err>;
    fn ill_sorted(&self, what: String) -> Self::Err;
}

/// Syntax that may contain computation variables.
pub trait CompNode: Sized {
    fn map_vars<M: VarMap>(&self, m: &M, depth: usize) -> Result<Self, M::Err>;
}

fn term_of<M: VarMap>(m: &M, i: usize, depth: usize) -> Result<CompTerm, M::Err> {
    m.var(i, depth)?.into_term().ok_or_else(|| m.ill_sorted(format!("context substituted for variable {i} in term position")))
}

fn ctx_of<M: VarMap>(m: &M, i: usize, depth: usize) -> Result<LfCtx, M::Err> {
    m.var(i, depth)?.into_ctx().ok_or_else(|| m.ill_sorted(format!("non-variable term substituted for context variable {i}")))
}

impl CompNode for CompTerm {
    fn map_vars<M: VarMap>(&self, m: &M, depth: usize) -> Result<Self, M::Err> {
        Ok(match self {
            CompTerm::Var(i) => term_of(m, *i, depth)?,
            CompTerm::Global(..) | CompTerm::Univ(_) => self.clone(),
            CompTerm::BoxType(t) => CompTerm::BoxType(Box::new(t.map_vars(m, depth)?)),
            CompTerm::Pi(x, dom, cod) => {
                CompTerm::Pi(x.clone(), Box::new(dom.map_vars(m, depth)?), Box::new(cod.map_vars(m, depth + 1)?))
            }
            CompTerm::Fn(x, body) => CompTerm::Fn(x.clone(), Box::new(body.map_vars(m, depth + 1)?)),
            CompTerm::App(f, a) => CompTerm::App(Box::new(f.map_vars(m, depth)?), Box::new(a.map_vars(m, depth)?)),
            CompTerm::BoxObj(c) => CompTerm::BoxObj(Box::new(c.map_vars(m, depth)?)),
            CompTerm::Rec(r) => CompTerm::Rec(Box::new(r.map_vars(m, depth)?)),
        })
    }
}

impl CompNode for Arg {
    fn map_vars<M: VarMap>(&self, m: &M, depth: usize) -> Result<Self, M::Err> {
        Ok(match self {
            Arg::Term(CompTerm::Var(i)) => m.var(*i, depth)?.into_arg(),
            Arg::Term(t) => Arg::Term(t.map_vars(m, depth)?),
            Arg::Ctx(c) => Arg::ctx(c.map_vars(m, depth)?),
        })
    }
}

impl CompNode for Payload {
    fn map_vars<M: VarMap>(&self, m: &M, depth: usize) -> Result<Self, M::Err> {
        Ok(match self {
            Payload::Term(CompTerm::Var(i)) => m.var(*i, depth)?,
            Payload::Term(t) => Payload::Term(t.map_vars(m, depth)?),
            Payload::Ctx(c) => Payload::Ctx(c.map_vars(m, depth)?),
        })
    }
}

impl CompNode for Domain {
    fn map_vars<M: VarMap>(&self, m: &M, depth: usize) -> Result<Self, M::Err> {
        Ok(match self {
            Domain::Type(t) => Domain::Type(t.map_vars(m, depth)?),
            Domain::TmCtx => Domain::TmCtx,
        })
    }
}

impl CompNode for CtxType {
    fn map_vars<M: VarMap>(&self, m: &M, depth: usize) -> Result<Self, M::Err> {
        Ok(match self {
            CtxType::Term(c, a) => CtxType::Term(c.map_vars(m, depth)?, a.map_vars(m, depth)?),
            CtxType::Param(c, a) => CtxType::Param(c.map_vars(m, depth)?, a.map_vars(m, depth)?),
        })
    }
}

impl CompNode for CtxObj {
    fn map_vars<M: VarMap>(&self, m: &M, depth: usize) -> Result<Self, M::Err> {
        Ok(CtxObj { ctx: self.ctx.map_vars(m, depth)?, body: self.body.map_vars(m, depth)? })
    }
}

impl CompNode for Recursor {
    fn map_vars<M: VarMap>(&self, m: &M, depth: usize) -> Result<Self, M::Err> {
        let branch = |b: &Branch| -> Result<Branch, M::Err> {
            Ok(Branch { binders: b.binders.clone(), body: b.body.map_vars(m, depth + b.binders.len())? })
        };
        Ok(Recursor {
            motive: self.motive.map_vars(m, depth)?,
            branches: Branches {
                var: branch(&self.branches.var)?,
                app: branch(&self.branches.app)?,
                lam: branch(&self.branches.lam)?,
            },
            ctx: self.ctx.map_vars(m, depth)?,
            scrutinee: self.scrutinee.map_vars(m, depth)?,
        })
    }
}

impl CompNode for LfCtx {
    fn map_vars<M: VarMap>(&self, m: &M, depth: usize) -> Result<Self, M::Err> {
        let decls = self
            .decls
            .iter()
            .map(|(x, a)| Ok((x.clone(), a.map_vars(m, depth)?)))
            .collect::<Result<Vec<_>, M::Err>>()?;
        match self.head {
            CtxHead::Empty => Ok(LfCtx { head: CtxHead::Empty, decls }),
            CtxHead::Var(i) => {
                // Indices count from the right, so splicing the instantiating
                // context in front of the suffix needs no reindexing.
                let mut phi = ctx_of(m, i, depth)?;
                phi.decls.extend(decls);
                Ok(phi)
            }
        }
    }
}

impl CompNode for ErasedCtx {
    fn map_vars<M: VarMap>(&self, m: &M, depth: usize) -> Result<Self, M::Err> {
        match self.head {
            CtxHead::Empty => Ok(self.clone()),
            CtxHead::Var(i) => {
                let mut phi = ctx_of(m, i, depth)?.erase();
                phi.names.extend(self.names.iter().cloned());
                Ok(phi)
            }
        }
    }
}

impl CompNode for LfTerm {
    fn map_vars<M: VarMap>(&self, m: &M, depth: usize) -> Result<Self, M::Err> {
        Ok(match self {
            LfTerm::Var(_) | LfTerm::Const(_) => self.clone(),
            LfTerm::Lam(x, body) => LfTerm::Lam(x.clone(), Box::new(body.map_vars(m, depth)?)),
            LfTerm::App(f, a) => LfTerm::app(f.map_vars(m, depth)?, a.map_vars(m, depth)?),
            LfTerm::Unbox(t, s) => LfTerm::Unbox(Box::new(t.map_vars(m, depth)?), Box::new(s.map_vars(m, depth)?)),
        })
    }
}

impl CompNode for LfSubst {
    fn map_vars<M: VarMap>(&self, m: &M, depth: usize) -> Result<Self, M::Err> {
        Ok(match self {
            LfSubst::Empty => LfSubst::Empty,
            LfSubst::Wk(dom, k) => LfSubst::Wk(dom.map_vars(m, depth)?, *k),
            LfSubst::Snoc(s, n) => LfSubst::Snoc(Box::new(s.map_vars(m, depth)?), n.map_vars(m, depth)?),
        })
    }
}

impl CompNode for LfType {
    fn map_vars<M: VarMap>(&self, m: &M, depth: usize) -> Result<Self, M::Err> {
        Ok(match self {
            LfType::Atom(c, args) => {
                LfType::Atom(*c, args.iter().map(|a| a.map_vars(m, depth)).collect::<Result<_, _>>()?)
            }
            LfType::Pi(x, a, b) => LfType::Pi(x.clone(), Box::new(a.map_vars(m, depth)?), Box::new(b.map_vars(m, depth)?)),
        })
    }
}

impl CompNode for LfKind {
    fn map_vars<M: VarMap>(&self, m: &M, depth: usize) -> Result<Self, M::Err> {
        Ok(match self {
            LfKind::Type => LfKind::Type,
            LfKind::Pi(x, a, k) => LfKind::Pi(x.clone(), Box::new(a.map_vars(m, depth)?), Box::new(k.map_vars(m, depth)?)),
        })
    }
}

// ---------------------------------------------------------------------------
// Shifting.

struct Shift {
    by: usize,
    cutoff: usize,
}

impl VarMap for Shift {
    type Err = Infallible;

    fn var(&self, i: usize, depth: usize) -> Result<Payload, Infallible> {
        Ok(Payload::var(if i >= self.cutoff + depth { i + self.by } else { i }))
    }

    fn ill_sorted(&self, _: String) -> Infallible {
        unreachable!("shifting only produces variables")
    }
}

/// Weakens `t` by `by` new computation variables inserted below the innermost
/// `cutoff` ones.
pub fn shift_from<T: CompNode + Clone>(t: &T, by: usize, cutoff: usize) -> T {
    if by == 0 {
        return t.clone();
    }
    t.map_vars(&Shift { by, cutoff }, 0).unwrap_or_else(|e| match e {})
}

pub fn shift<T: CompNode + Clone>(t: &T, by: usize) -> T {
    shift_from(t, by, 0)
}

pub fn shift_domain(d: &Domain, by: usize) -> Domain {
    shift(d, by)
}

struct Occurs(usize);

impl VarMap for Occurs {
    type Err = ();

    fn var(&self, i: usize, depth: usize) -> Result<Payload, ()> {
        if i == self.0 + depth {
            Err(())
        } else {
            Ok(Payload::var(i))
        }
    }

    fn ill_sorted(&self, _: String) {}
}

/// Whether computation variable `i` occurs free in `t`.
pub fn mentions<T: CompNode>(t: &T, i: usize) -> bool {
    t.map_vars(&Occurs(i), 0).is_err()
}

// ---------------------------------------------------------------------------
// Instantiating the innermost binders.

struct Top<'a> {
    payloads: &'a [Payload],
}

impl VarMap for Top<'_> {
    type Err = KernelError;

    fn var(&self, i: usize, depth: usize) -> Result<Payload> {
        if i < depth {
            return Ok(Payload::var(i));
        }
        let j = i - depth;
        let k = self.payloads.len();
        if j < k {
            Ok(shift(&self.payloads[k - 1 - j], depth))
        } else {
            Ok(Payload::var(i - k))
        }
    }

    fn ill_sorted(&self, what: String) -> KernelError {
        KernelError::IllSorted(what)
    }
}

/// Replaces the innermost `payloads.len()` variables of `t`, the first
/// payload instantiating the outermost of them, and lowers the rest.
pub fn instantiate<T: CompNode>(t: &T, payloads: &[Payload]) -> Result<T> {
    t.map_vars(&Top { payloads }, 0)
}

/// `{p/y} t` where `y` is the innermost variable.
pub fn csubst<T: CompNode>(t: &T, p: &Payload) -> Result<T> {
    instantiate(t, std::slice::from_ref(p))
}

// ---------------------------------------------------------------------------
// Simultaneous substitutions.

/// `theta` with `Gamma' |- theta : Gamma`: one payload per entry of the
/// domain `Gamma`, leftmost first, each valid in `Gamma'`. Renamings are the
/// special case where every payload is a variable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompSubst {
    pub entries: Vec<(Name, Payload)>,
}

impl CompSubst {
    pub fn new() -> CompSubst {
        CompSubst::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn with(mut self, name: &str, p: Payload) -> CompSubst {
        self.entries.push((Name::new(name), p));
        self
    }

    /// The renaming from `gamma` into `gamma` extended by `by` entries.
    pub fn weakening(gamma: &CompCtx, by: usize) -> CompSubst {
        let n = gamma.len();
        let entries = gamma
            .entries
            .iter()
            .enumerate()
            .map(|(k, (x, d))| {
                let idx = n - 1 - k + by;
                let p = match d {
                    Domain::TmCtx => Payload::Ctx(LfCtx::var(idx)),
                    Domain::Type(_) => Payload::var(idx),
                };
                (x.clone(), p)
            })
            .collect();
        CompSubst { entries }
    }

    pub fn identity(gamma: &CompCtx) -> CompSubst {
        CompSubst::weakening(gamma, 0)
    }
}

impl VarMap for CompSubst {
    type Err = KernelError;

    fn var(&self, i: usize, depth: usize) -> Result<Payload> {
        if i < depth {
            return Ok(Payload::var(i));
        }
        let j = i - depth;
        let n = self.entries.len();
        if j < n {
            Ok(shift(&self.entries[n - 1 - j].1, depth))
        } else {
            Err(TypeError::new(
                TypeErrorKind::UnboundCompVar,
                Judgment::Substitution,
                format!("variable {j} is not covered by a substitution of length {n}"),
            )
            .into())
        }
    }

    fn ill_sorted(&self, what: String) -> KernelError {
        KernelError::IllSorted(what)
    }
}

pub fn csubst_sim<T: CompNode>(theta: &CompSubst, t: &T) -> Result<T> {
    t.map_vars(theta, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Const;

    fn tm() -> LfType {
        LfType::tm()
    }

    #[test]
    fn single_var() {
        let s = CompTerm::Univ(0);
        assert_eq!(csubst(&CompTerm::Var(0), &Payload::Term(s.clone())), Ok(s));
        assert_eq!(csubst(&CompTerm::Var(3), &Payload::Term(CompTerm::Univ(0))), Ok(CompTerm::Var(2)));
    }

    #[test]
    fn context_instantiation_splices_declarations() {
        // {(x:tm, y:tm)/psi} [psi, x |- lam \y. app x y]
        let body = LfTerm::lam_tm("y", LfTerm::app_tm(LfTerm::Var(1), LfTerm::Var(0)));
        let t = CompTerm::box_obj(ErasedCtx::var(0).with("x"), body.clone());
        let phi = LfCtx::empty().with("x", tm()).with("y", tm());
        let got = csubst(&t, &Payload::Ctx(phi)).unwrap();
        let expect = CompTerm::box_obj(ErasedCtx::empty().with("x").with("y").with("w"), body);
        assert_eq!(got, expect);
    }

    #[test]
    fn pushes_into_unbox() {
        let sigma = LfSubst::Wk(ErasedCtx::var(1), 0);
        let m = LfTerm::unbox(CompTerm::Var(0), sigma.clone());
        let s = CompTerm::box_obj(ErasedCtx::empty(), LfTerm::Const(Const::Lam));
        let got = csubst(&m, &Payload::Term(s.clone())).unwrap();
        assert_eq!(got, LfTerm::unbox(s, LfSubst::Wk(ErasedCtx::var(0), 0)));
    }

    #[test]
    fn identity_is_identity() {
        let gamma = CompCtx::new()
            .with("psi", Domain::TmCtx)
            .with("m", Domain::Type(CompTerm::box_ty(CtxType::Term(LfCtx::var(0), tm()))));
        let t = CompTerm::box_obj(ErasedCtx::var(1), LfTerm::unbox(CompTerm::Var(0), LfSubst::Wk(ErasedCtx::var(1), 0)));
        assert_eq!(csubst_sim(&CompSubst::identity(&gamma), &t), Ok(t));
    }

    #[test]
    fn simultaneous_extension() {
        let theta = CompSubst::new().with("a", Payload::Term(CompTerm::Univ(0))).with("y", Payload::Term(CompTerm::Univ(1)));
        assert_eq!(csubst_sim(&theta, &CompTerm::Var(0)), Ok(CompTerm::Univ(1)));
        assert_eq!(csubst_sim(&theta, &CompTerm::Var(1)), Ok(CompTerm::Univ(0)));
        assert!(matches!(csubst_sim(&theta, &CompTerm::Var(2)), Err(KernelError::Type(_))));
    }

    #[test]
    fn simultaneous_into_box() {
        // (. / psi, [. |- lam \x.x] / m) on [psi |- m[id]]
        let lam_id = CompTerm::box_obj(ErasedCtx::empty(), LfTerm::lam_tm("x", LfTerm::Var(0)));
        let theta = CompSubst::new().with("psi", Payload::Ctx(LfCtx::empty())).with("m", Payload::Term(lam_id.clone()));
        let t = CompTerm::box_obj(ErasedCtx::var(1), LfTerm::unbox(CompTerm::Var(0), LfSubst::Wk(ErasedCtx::var(1), 0)));
        let expect = CompTerm::box_obj(ErasedCtx::empty(), LfTerm::unbox(lam_id, LfSubst::Wk(ErasedCtx::empty(), 0)));
        assert_eq!(csubst_sim(&theta, &t), Ok(expect));
    }

    #[test]
    fn binders_protect_bound_variables() {
        let t = CompTerm::fun("z", CompTerm::app(CompTerm::Var(0), CompTerm::Var(1)));
        let got = csubst(&t, &Payload::Term(CompTerm::Var(5))).unwrap();
        assert_eq!(got, CompTerm::fun("z", CompTerm::app(CompTerm::Var(0), CompTerm::Var(6))));
    }

    #[test]
    fn ill_sorted_context_payload() {
        let t = LfCtx::var(0);
        assert!(matches!(csubst(&t, &Payload::Term(CompTerm::Univ(0))), Err(KernelError::IllSorted(_))));
        let t = CompTerm::app(CompTerm::Var(1), CompTerm::Var(0));
        let got = csubst(&t, &Payload::Ctx(LfCtx::empty())).unwrap();
        assert_eq!(got, CompTerm::app_ctx(CompTerm::Var(0), LfCtx::empty()));
    }

    #[test]
    fn shift_respects_cutoff() {
        let t = CompTerm::fun("z", CompTerm::app(CompTerm::Var(0), CompTerm::Var(1)));
        assert_eq!(shift(&t, 2), CompTerm::fun("z", CompTerm::app(CompTerm::Var(0), CompTerm::Var(3))));
        assert_eq!(shift_from(&CompTerm::Var(0), 2, 1), CompTerm::Var(0));
    }
}
