//! Type-directed algorithmic equality.
//!
//! Both sides are brought to weak head normal form and compared according to
//! their type: functions are applied to a fresh variable, boxes are unboxed
//! with the identity substitution, LF functions are η-expanded. Neutral terms
//! are compared structurally, which also recovers their types.

use crate::comp_subst::{instantiate, shift, Payload};
use crate::error::Result;
use crate::lf_subst::{lf_subst_type, shift_term, single_subst_kind, single_subst_type};
use crate::reduce::{whnf_subst, Kernel};
use crate::syntax::{
    alpha_eq, ctx_lookup, Arg, CompCtx, CompTerm, CompType, CtxType, Domain, LfCtx, LfKind, LfSubst, LfTerm,
    LfType, Signature,
};

/// Argument standing for the innermost variable of a context extended by
/// `dom`.
pub(crate) fn fresh_arg(dom: &Domain) -> Arg {
    match dom {
        Domain::TmCtx => Arg::ctx(LfCtx::var(0)),
        Domain::Type(_) => Arg::Term(CompTerm::Var(0)),
    }
}

fn weaken_app(t: &CompTerm, a: &Arg) -> CompTerm {
    CompTerm::App(Box::new(shift(t, 1)), Box::new(a.clone()))
}

impl Kernel {
    /// `Gamma |- t1 == t2 : tau`
    pub fn conv_comp(&self, gamma: &CompCtx, t1: &CompTerm, t2: &CompTerm, tau: &CompType) -> Result<bool> {
        if alpha_eq(t1, t2) {
            return Ok(true);
        }
        match self.whnf_comp(tau)? {
            CompTerm::Pi(x, dom, cod) => {
                let a = fresh_arg(&dom);
                let inner = gamma.extended(x, *dom);
                self.conv_comp(&inner, &weaken_app(t1, &a), &weaken_app(t2, &a), &cod)
            }
            CompTerm::BoxType(ct) => {
                let m1 = self.unbox_id(t1, ct.ctx())?;
                let m2 = self.unbox_id(t2, ct.ctx())?;
                self.conv_lf(gamma, ct.ctx(), &m1, &m2, ct.ty())
            }
            CompTerm::Univ(_) => self.conv_comp_type(gamma, t1, t2),
            _ => {
                let w1 = self.whnf_comp(t1)?;
                let w2 = self.whnf_comp(t2)?;
                if alpha_eq(&w1, &w2) {
                    return Ok(true);
                }
                Ok(self.conv_neutral(gamma, &w1, &w2)?.is_some())
            }
        }
    }

    /// The LF body of `t` seen at a box type over `psi`: the body of a box
    /// value, or `t[id]` for anything else.
    fn unbox_id(&self, t: &CompTerm, psi: &LfCtx) -> Result<LfTerm> {
        Ok(match self.whnf_comp(t)? {
            CompTerm::BoxObj(obj) => obj.body,
            w => LfTerm::unbox(w, crate::lf_subst::id_subst(psi)),
        })
    }

    /// `Gamma |- tau1 == tau2 : u`
    pub fn conv_comp_type(&self, gamma: &CompCtx, tau1: &CompType, tau2: &CompType) -> Result<bool> {
        if alpha_eq(tau1, tau2) {
            return Ok(true);
        }
        let w1 = self.whnf_comp(tau1)?;
        let w2 = self.whnf_comp(tau2)?;
        match (&w1, &w2) {
            (CompTerm::Univ(a), CompTerm::Univ(b)) => Ok(a == b),
            (CompTerm::Pi(x, d1, c1), CompTerm::Pi(_, d2, c2)) => {
                if !self.conv_domain(gamma, d1, d2)? {
                    return Ok(false);
                }
                self.conv_comp_type(&gamma.extended(x.clone(), (**d1).clone()), c1, c2)
            }
            (CompTerm::BoxType(a), CompTerm::BoxType(b)) => self.conv_ctx_type(gamma, a, b),
            _ if alpha_eq(&w1, &w2) => Ok(true),
            _ => Ok(self.conv_neutral(gamma, &w1, &w2)?.is_some()),
        }
    }

    pub fn conv_domain(&self, gamma: &CompCtx, d1: &Domain, d2: &Domain) -> Result<bool> {
        match (d1, d2) {
            (Domain::TmCtx, Domain::TmCtx) => Ok(true),
            (Domain::Type(a), Domain::Type(b)) => self.conv_comp_type(gamma, a, b),
            _ => Ok(false),
        }
    }

    pub fn conv_ctx_type(&self, gamma: &CompCtx, a: &CtxType, b: &CtxType) -> Result<bool> {
        if a.is_param() != b.is_param() || !self.conv_ctx(gamma, a.ctx(), b.ctx())? {
            return Ok(false);
        }
        self.conv_lf_type(gamma, a.ctx(), a.ty(), b.ty())
    }

    /// Compares weak head neutral computations and returns the domain of
    /// the first one when they are equal.
    pub fn conv_neutral(&self, gamma: &CompCtx, n1: &CompTerm, n2: &CompTerm) -> Result<Option<Domain>> {
        match (n1, n2) {
            (CompTerm::Var(i), CompTerm::Var(j)) if i == j => Ok(gamma.lookup(*i)),
            (CompTerm::App(f1, a1), CompTerm::App(f2, a2)) => {
                let Some(Domain::Type(ft)) = self.conv_neutral(gamma, f1, f2)? else {
                    return Ok(None);
                };
                let CompTerm::Pi(_, dom, cod) = self.whnf_comp(&ft)? else {
                    return Ok(None);
                };
                let same = match (&*dom, a1.as_ref(), a2.as_ref()) {
                    (Domain::TmCtx, a1, a2) => match (a1.as_ctx(), a2.as_ctx()) {
                        (Some(c1), Some(c2)) => self.conv_ctx(gamma, &c1, &c2)?,
                        _ => false,
                    },
                    (Domain::Type(d), Arg::Term(s1), Arg::Term(s2)) => self.conv_comp(gamma, s1, s2, d)?,
                    _ => false,
                };
                if !same {
                    return Ok(None);
                }
                let p = match &*dom {
                    Domain::TmCtx => Payload::Ctx(a1.as_ctx().expect("checked above")),
                    Domain::Type(_) => Payload::from((**a1).clone()),
                };
                Ok(Some(Domain::Type(instantiate(&*cod, &[p])?)))
            }
            (CompTerm::Rec(r1), CompTerm::Rec(r2)) => {
                if !self.conv_comp_type(gamma, &r1.motive, &r2.motive)? || !self.conv_ctx(gamma, &r1.ctx, &r2.ctx)? {
                    return Ok(None);
                }
                let Ok(tau) = self.decompose_motive(gamma, &r1.motive) else {
                    return Ok(None);
                };
                let scrut_ty = CompTerm::box_ty(CtxType::Term(r1.ctx.clone(), LfType::tm()));
                if !self.conv_comp(gamma, &r1.scrutinee, &r2.scrutinee, &scrut_ty)? {
                    return Ok(None);
                }
                let specs = crate::typing::branch_specs(&tau);
                let pairs = [
                    (&r1.branches.var, &r2.branches.var),
                    (&r1.branches.app, &r2.branches.app),
                    (&r1.branches.lam, &r2.branches.lam),
                ];
                for ((b1, b2), spec) in pairs.into_iter().zip(specs) {
                    let spec = spec?;
                    if b1.binders.len() != spec.entries.len() || b2.binders.len() != spec.entries.len() {
                        return Ok(None);
                    }
                    let mut inner = gamma.clone();
                    for (x, d) in spec.entries {
                        inner.push(x, d);
                    }
                    if !self.conv_comp(&inner, &b1.body, &b2.body, &spec.goal)? {
                        return Ok(None);
                    }
                }
                let ty = crate::typing::instantiate_motive(
                    &tau,
                    0,
                    Payload::Ctx(r1.ctx.clone()),
                    Payload::Term(r1.scrutinee.clone()),
                )?;
                Ok(Some(Domain::Type(ty)))
            }
            _ => Ok(None),
        }
    }

    // -----------------------------------------------------------------------
    // LF

    /// `Gamma; Psi |- m1 == m2 : a`
    pub fn conv_lf(&self, gamma: &CompCtx, psi: &LfCtx, m1: &LfTerm, m2: &LfTerm, a: &LfType) -> Result<bool> {
        if alpha_eq(m1, m2) {
            return Ok(true);
        }
        match a {
            LfType::Pi(x, dom, cod) if self.lf_eta => {
                let inner = extend(psi, x.as_str(), dom);
                let e1 = LfTerm::app(shift_term(m1, 1, 0), LfTerm::Var(0));
                let e2 = LfTerm::app(shift_term(m2, 1, 0), LfTerm::Var(0));
                self.conv_lf(gamma, &inner, &e1, &e2, cod)
            }
            _ => {
                let w1 = self.whnf_lf(m1)?;
                let w2 = self.whnf_lf(m2)?;
                if alpha_eq(&w1, &w2) {
                    return Ok(true);
                }
                match (&w1, &w2, a) {
                    // Only reachable with η disabled.
                    (LfTerm::Lam(_, b1), LfTerm::Lam(_, b2), LfType::Pi(x, dom, cod)) => {
                        self.conv_lf(gamma, &extend(psi, x.as_str(), dom), b1, b2, cod)
                    }
                    _ => Ok(self.conv_lf_neutral(gamma, psi, &w1, &w2)?.is_some()),
                }
            }
        }
    }

    /// Compares weak head neutral LF terms; returns the type of the first.
    pub fn conv_lf_neutral(&self, gamma: &CompCtx, psi: &LfCtx, n1: &LfTerm, n2: &LfTerm) -> Result<Option<LfType>> {
        match (n1, n2) {
            (LfTerm::Var(i), LfTerm::Var(j)) if i == j => Ok(ctx_lookup(psi, *i).ok()),
            (LfTerm::Const(c), LfTerm::Const(d)) if c == d => Ok(Signature.const_type(*c)),
            (LfTerm::App(f1, a1), LfTerm::App(f2, a2)) => {
                let Some(LfType::Pi(_, dom, cod)) = self.conv_lf_neutral(gamma, psi, f1, f2)? else {
                    return Ok(None);
                };
                if !self.conv_lf(gamma, psi, a1, a2, &dom)? {
                    return Ok(None);
                }
                Ok(Some(single_subst_type(a1, &cod)?))
            }
            (LfTerm::Unbox(t1, s1), LfTerm::Unbox(t2, s2)) => {
                let ty = if alpha_eq(t1, t2) {
                    match crate::typing::neutral_domain(self, gamma, t1) {
                        Some(d) => Some(d),
                        None => return Ok(None),
                    }
                } else {
                    self.conv_neutral(gamma, t1, t2)?
                };
                let Some(Domain::Type(ty)) = ty else {
                    return Ok(None);
                };
                let CompTerm::BoxType(ct) = self.whnf_comp(&ty)? else {
                    return Ok(None);
                };
                if !self.conv_subst(gamma, psi, s1, s2, ct.ctx())? {
                    return Ok(None);
                }
                Ok(Some(lf_subst_type(s1, &ct.ctx().erase(), ct.ty())?))
            }
            _ => Ok(None),
        }
    }

    /// `Gamma; Psi |- s1 == s2 : Phi`
    pub fn conv_subst(&self, gamma: &CompCtx, psi: &LfCtx, s1: &LfSubst, s2: &LfSubst, phi: &LfCtx) -> Result<bool> {
        let mut s1 = s1.clone();
        let mut s2 = s2.clone();
        let mut n = phi.len();
        loop {
            if alpha_eq(&s1, &s2) {
                return Ok(true);
            }
            s1 = whnf_subst(&s1);
            s2 = whnf_subst(&s2);
            if n == 0 {
                return Ok(match (&s1, &s2, phi.head) {
                    // Every substitution out of the empty context is equal.
                    (_, _, crate::syntax::CtxHead::Empty) => true,
                    (LfSubst::Wk(d1, k1), LfSubst::Wk(d2, k2), _) => d1.head == d2.head && k1 == k2,
                    _ => false,
                });
            }
            let (LfSubst::Snoc(r1, m1), LfSubst::Snoc(r2, m2)) = (&s1, &s2) else {
                return Ok(false);
            };
            let prefix = phi.prefix(n - 1);
            let a = lf_subst_type(r1, &prefix.erase(), &phi.decls[n - 1].1)?;
            if !self.conv_lf(gamma, psi, m1, m2, &a)? {
                return Ok(false);
            }
            s1 = (**r1).clone();
            s2 = (**r2).clone();
            n -= 1;
        }
    }

    /// `Gamma |- Psi1 == Psi2 : ctx`
    pub fn conv_ctx(&self, gamma: &CompCtx, psi1: &LfCtx, psi2: &LfCtx) -> Result<bool> {
        if psi1.head != psi2.head || psi1.len() != psi2.len() {
            return Ok(false);
        }
        for (k, ((_, a), (_, b))) in psi1.decls.iter().zip(&psi2.decls).enumerate() {
            if !self.conv_lf_type(gamma, &psi1.prefix(k), a, b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `Gamma; Psi |- A == B : lftype`
    pub fn conv_lf_type(&self, gamma: &CompCtx, psi: &LfCtx, a: &LfType, b: &LfType) -> Result<bool> {
        if alpha_eq(a, b) {
            return Ok(true);
        }
        match (a, b) {
            (LfType::Atom(c, xs), LfType::Atom(d, ys)) => {
                if c != d || xs.len() != ys.len() {
                    return Ok(false);
                }
                let Some(mut kind) = Signature.family_kind(*c) else {
                    return Ok(false);
                };
                for (x, y) in xs.iter().zip(ys) {
                    let LfKind::Pi(_, dom, rest) = kind else {
                        return Ok(false);
                    };
                    if !self.conv_lf(gamma, psi, x, y, &dom)? {
                        return Ok(false);
                    }
                    kind = single_subst_kind(x, &rest)?;
                }
                Ok(true)
            }
            (LfType::Pi(x, a1, b1), LfType::Pi(_, a2, b2)) => {
                Ok(self.conv_lf_type(gamma, psi, a1, a2)?
                    && self.conv_lf_type(gamma, &extend(psi, x.as_str(), a1), b1, b2)?)
            }
            _ => Ok(false),
        }
    }

    /// `Gamma; Psi |- K == K' : lfkind`
    pub fn conv_kind(&self, gamma: &CompCtx, psi: &LfCtx, k1: &LfKind, k2: &LfKind) -> Result<bool> {
        match (k1, k2) {
            (LfKind::Type, LfKind::Type) => Ok(true),
            (LfKind::Pi(x, a1, r1), LfKind::Pi(_, a2, r2)) => {
                Ok(self.conv_lf_type(gamma, psi, a1, a2)?
                    && self.conv_kind(gamma, &extend(psi, x.as_str(), a1), r1, r2)?)
            }
            _ => Ok(false),
        }
    }
}

fn extend(psi: &LfCtx, x: &str, a: &LfType) -> LfCtx {
    psi.clone().with(x, a.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Const, ErasedCtx};

    fn k() -> Kernel {
        Kernel::new()
    }

    fn tm() -> LfType {
        LfType::tm()
    }

    fn box_tm(psi: LfCtx) -> CompTerm {
        CompTerm::box_ty(CtxType::Term(psi, tm()))
    }

    #[test]
    fn universes() {
        let g = CompCtx::new();
        assert_eq!(k().conv_comp_type(&g, &CompTerm::Univ(0), &CompTerm::Univ(0)), Ok(true));
        assert_eq!(k().conv_comp_type(&g, &CompTerm::Univ(0), &CompTerm::Univ(1)), Ok(false));
        let a = CompTerm::pi("y", Domain::Type(box_tm(LfCtx::empty())), CompTerm::Univ(0));
        let b = CompTerm::pi("z", Domain::Type(box_tm(LfCtx::empty())), CompTerm::Univ(0));
        assert_eq!(k().conv_comp_type(&g, &a, &b), Ok(true));
        assert_eq!(k().conv_comp_type(&g, &a, &CompTerm::Univ(0)), Ok(false));
    }

    #[test]
    fn box_eta() {
        let g = CompCtx::new().with("t", Domain::Type(box_tm(LfCtx::empty())));
        let t = CompTerm::Var(0);
        let expanded = CompTerm::box_obj(ErasedCtx::empty(), LfTerm::unbox(t.clone(), LfSubst::Wk(ErasedCtx::empty(), 0)));
        assert_eq!(k().conv_comp(&g, &t, &expanded, &box_tm(LfCtx::empty())), Ok(true));
    }

    #[test]
    fn comp_beta() {
        let g = CompCtx::new().with("s", Domain::Type(CompTerm::Univ(0)));
        let r = CompTerm::app(CompTerm::fun("y", CompTerm::Var(0)), CompTerm::Var(0));
        assert_eq!(k().conv_comp(&g, &r, &CompTerm::Var(0), &CompTerm::Univ(0)), Ok(true));
    }

    #[test]
    fn lf_eta() {
        let g = CompCtx::new();
        let a = LfType::arrow(tm(), tm());
        let psi = LfCtx::empty().with("f", a.clone());
        let m = LfTerm::Var(0);
        let expanded = LfTerm::lam("x", LfTerm::app(LfTerm::Var(1), LfTerm::Var(0)));
        assert_eq!(k().conv_lf(&g, &psi, &m, &expanded, &a), Ok(true));
        let mut mutant = k();
        mutant.disable_lf_eta();
        assert_eq!(mutant.conv_lf(&g, &psi, &m, &expanded, &a), Ok(false));
    }

    #[test]
    fn lf_beta() {
        let g = CompCtx::new();
        let psi = LfCtx::empty().with("y", tm());
        let redex = LfTerm::app(LfTerm::lam("x", LfTerm::app_tm(LfTerm::Var(0), LfTerm::Var(0))), LfTerm::Var(0));
        let reduct = LfTerm::app_tm(LfTerm::Var(0), LfTerm::Var(0));
        assert_eq!(k().conv_lf(&g, &psi, &redex, &reduct, &tm()), Ok(true));
        let other = LfTerm::app_tm(LfTerm::Var(0), LfTerm::Const(Const::Lam));
        assert_eq!(k().conv_lf(&g, &psi, &redex, &other, &tm()), Ok(false));
    }

    #[test]
    fn substitutions() {
        let g = CompCtx::new();
        let psi = LfCtx::empty().with("x", tm());
        let wk = LfSubst::Wk(ErasedCtx::empty(), 0);
        assert_eq!(k().conv_subst(&g, &psi, &wk, &LfSubst::Empty, &LfCtx::empty()), Ok(true));
        let phi = LfCtx::empty().with("x", tm());
        let w = LfSubst::Wk(phi.erase(), 0);
        let e = LfSubst::Wk(ErasedCtx::empty(), 1).snoc(LfTerm::Var(0));
        assert_eq!(k().conv_subst(&g, &psi, &w, &e, &phi), Ok(true));
        let m = LfSubst::Empty.snoc(LfTerm::Var(0));
        let n = LfSubst::Empty.snoc(LfTerm::lam_tm("z", LfTerm::Var(0)));
        assert_eq!(k().conv_subst(&g, &psi, &m, &n, &phi), Ok(false));
    }

    #[test]
    fn contexts() {
        let g = CompCtx::new().with("psi", Domain::TmCtx);
        assert_eq!(k().conv_ctx(&g, &LfCtx::var(0), &LfCtx::var(0)), Ok(true));
        let x = LfCtx::empty().with("x", tm());
        let y = LfCtx::empty().with("y", tm());
        assert_eq!(k().conv_ctx(&g, &x, &y), Ok(true));
        assert_eq!(k().conv_ctx(&g, &LfCtx::empty(), &x), Ok(false));
    }

    #[test]
    fn lf_types() {
        let g = CompCtx::new();
        let p = LfCtx::empty();
        let a = LfType::Pi("x".into(), Box::new(tm()), Box::new(tm()));
        let b = LfType::Pi("y".into(), Box::new(tm()), Box::new(tm()));
        assert_eq!(k().conv_lf_type(&g, &p, &tm(), &tm()), Ok(true));
        assert_eq!(k().conv_lf_type(&g, &p, &a, &b), Ok(true));
        assert_eq!(k().conv_lf_type(&g, &p, &tm(), &a), Ok(false));
    }
}
