//! Simultaneous LF substitution `[sigma / Psi^] M` with domain resurrection,
//! plus the de Bruijn shifting it relies on.

use crate::error::{KernelError, Result};
use crate::syntax::{CtxHead, ErasedCtx, LfCtx, LfKind, LfSubst, LfTerm, LfType};

// ---------------------------------------------------------------------------
// Shifting: weaken the range of LF objects by `d` new variables inserted
// below the innermost `c` ones.

pub fn shift_term(m: &LfTerm, d: usize, c: usize) -> LfTerm {
    if d == 0 {
        return m.clone();
    }
    match m {
        LfTerm::Var(i) if *i >= c => LfTerm::Var(i + d),
        LfTerm::Var(_) | LfTerm::Const(_) => m.clone(),
        LfTerm::Lam(x, body) => LfTerm::Lam(x.clone(), Box::new(shift_term(body, d, c + 1))),
        LfTerm::App(f, a) => LfTerm::app(shift_term(f, d, c), shift_term(a, d, c)),
        LfTerm::Unbox(t, s) => LfTerm::Unbox(t.clone(), Box::new(shift_subst(s, d, c))),
    }
}

pub fn shift_subst(s: &LfSubst, d: usize, c: usize) -> LfSubst {
    if d == 0 {
        return s.clone();
    }
    match s {
        LfSubst::Empty => LfSubst::Empty,
        LfSubst::Snoc(rest, m) => LfSubst::Snoc(Box::new(shift_subst(rest, d, c)), shift_term(m, d, c)),
        LfSubst::Wk(dom, k) if *k >= c || dom.names.is_empty() => LfSubst::Wk(dom.clone(), k + d),
        // The cutoff falls inside the image of the weakening, so it has to be
        // unfolded until every remaining entry lies above the cutoff.
        LfSubst::Wk(dom, k) => shift_subst(&unfold_wk(dom, *k), d, c),
    }
}

pub fn shift_type(a: &LfType, d: usize, c: usize) -> LfType {
    if d == 0 {
        return a.clone();
    }
    match a {
        LfType::Atom(k, args) => LfType::Atom(*k, args.iter().map(|m| shift_term(m, d, c)).collect()),
        LfType::Pi(x, dom, cod) => {
            LfType::Pi(x.clone(), Box::new(shift_type(dom, d, c)), Box::new(shift_type(cod, d, c + 1)))
        }
    }
}

pub fn shift_kind(k: &LfKind, d: usize, c: usize) -> LfKind {
    match k {
        LfKind::Type => LfKind::Type,
        LfKind::Pi(x, dom, cod) => {
            LfKind::Pi(x.clone(), Box::new(shift_type(dom, d, c)), Box::new(shift_kind(cod, d, c + 1)))
        }
    }
}

/// One step of `wk_(Psi^, x) = wk_Psi^, x`. The domain must be nonempty.
fn unfold_wk(dom: &ErasedCtx, k: usize) -> LfSubst {
    let n = dom.names.len();
    debug_assert!(n > 0);
    LfSubst::Wk(dom.prefix(n - 1), k + 1).snoc(LfTerm::Var(k))
}

/// Fully expands a weakening into an explicit list `., x_n, ..., x_1` over
/// its head.
pub fn expand_wk(dom: &ErasedCtx, k: usize) -> LfSubst {
    let n = dom.names.len();
    let base = match dom.head {
        CtxHead::Empty => LfSubst::Empty,
        CtxHead::Var(_) => LfSubst::Wk(dom.prefix(0), k + n),
    };
    (0..n).rev().fold(base, |acc, i| acc.snoc(LfTerm::Var(k + i)))
}

pub fn id_subst(ctx: &LfCtx) -> LfSubst {
    LfSubst::Wk(ctx.erase(), 0)
}

// ---------------------------------------------------------------------------
// Lookup and truncation.

/// Finds the instantiation of LF variable `x` of `domain` in `sigma`.
pub fn lf_lookup(x: usize, sigma: &LfSubst, domain: &ErasedCtx) -> Result<LfTerm> {
    if x >= domain.len() {
        return Err(KernelError::IllScoped(x));
    }
    let mut x = x;
    let mut len = domain.len();
    let mut sigma = sigma;
    loop {
        match sigma {
            LfSubst::Snoc(rest, m) => {
                if len == 0 {
                    return Err(KernelError::LookupFailure("substitution longer than its domain".into()));
                }
                if x == 0 {
                    return Ok(m.clone());
                }
                x -= 1;
                len -= 1;
                sigma = rest;
            }
            LfSubst::Wk(dom, k) => {
                if dom.head != domain.head || dom.len() != len {
                    return Err(KernelError::LookupFailure(format!(
                        "weakening of a {}-variable domain used against {} variables",
                        dom.len(),
                        len
                    )));
                }
                return Ok(LfTerm::Var(x + k));
            }
            LfSubst::Empty => {
                return Err(KernelError::LookupFailure("empty substitution against a nonempty domain".into()));
            }
        }
    }
}

/// `trunc_target (sigma / domain)`: drops the instantiations of the
/// variables of `domain` that are not in its prefix `target`.
pub fn trunc(target: &ErasedCtx, sigma: &LfSubst, domain: &ErasedCtx) -> Result<LfSubst> {
    if target.head != domain.head || target.len() > domain.len() {
        return Err(KernelError::TruncFailure("target is not a prefix of the domain".into()));
    }
    let mut extra = domain.len() - target.len();
    let mut sigma = sigma;
    loop {
        if extra == 0 {
            return Ok(sigma.clone());
        }
        match sigma {
            LfSubst::Snoc(rest, _) => {
                sigma = rest;
                extra -= 1;
            }
            LfSubst::Wk(dom, k) => {
                if dom.head != domain.head || dom.len() != target.len() + extra {
                    return Err(KernelError::TruncFailure("weakening does not match the domain".into()));
                }
                return Ok(LfSubst::Wk(target.clone(), k + extra));
            }
            LfSubst::Empty => {
                return Err(KernelError::TruncFailure("empty substitution against a nonempty target".into()));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Simultaneous substitution.

fn lift(sigma: &LfSubst) -> LfSubst {
    shift_subst(sigma, 1, 0).snoc(LfTerm::Var(0))
}

fn extend(domain: &ErasedCtx, x: &crate::syntax::Name) -> ErasedCtx {
    let mut d = domain.clone();
    d.names.push(x.clone());
    d
}

pub fn lf_subst_term(sigma: &LfSubst, domain: &ErasedCtx, m: &LfTerm) -> Result<LfTerm> {
    Ok(match m {
        LfTerm::Var(x) => lf_lookup(*x, sigma, domain)?,
        LfTerm::Const(_) => m.clone(),
        LfTerm::App(f, a) => LfTerm::app(lf_subst_term(sigma, domain, f)?, lf_subst_term(sigma, domain, a)?),
        LfTerm::Lam(x, body) => {
            let body = lf_subst_term(&lift(sigma), &extend(domain, x), body)?;
            LfTerm::Lam(x.clone(), Box::new(body))
        }
        LfTerm::Unbox(t, inner) => LfTerm::Unbox(t.clone(), Box::new(lf_subst_subst(sigma, domain, inner)?)),
    })
}

pub fn lf_subst_subst(sigma: &LfSubst, domain: &ErasedCtx, inner: &LfSubst) -> Result<LfSubst> {
    Ok(match inner {
        LfSubst::Empty => LfSubst::Empty,
        LfSubst::Wk(dom, k) => {
            if dom.head != domain.head || dom.len() + k != domain.len() {
                return Err(KernelError::TruncFailure(format!(
                    "weakening over {} variables applied in a {}-variable domain",
                    dom.len() + k,
                    domain.len()
                )));
            }
            trunc(dom, sigma, domain)?
        }
        LfSubst::Snoc(rest, m) => {
            LfSubst::Snoc(Box::new(lf_subst_subst(sigma, domain, rest)?), lf_subst_term(sigma, domain, m)?)
        }
    })
}

pub fn lf_subst_type(sigma: &LfSubst, domain: &ErasedCtx, a: &LfType) -> Result<LfType> {
    Ok(match a {
        LfType::Atom(c, args) => {
            LfType::Atom(*c, args.iter().map(|m| lf_subst_term(sigma, domain, m)).collect::<Result<_>>()?)
        }
        LfType::Pi(x, dom, cod) => LfType::Pi(
            x.clone(),
            Box::new(lf_subst_type(sigma, domain, dom)?),
            Box::new(lf_subst_type(&lift(sigma), &extend(domain, x), cod)?),
        ),
    })
}

pub fn lf_subst_kind(sigma: &LfSubst, domain: &ErasedCtx, k: &LfKind) -> Result<LfKind> {
    Ok(match k {
        LfKind::Type => LfKind::Type,
        LfKind::Pi(x, dom, cod) => LfKind::Pi(
            x.clone(),
            Box::new(lf_subst_type(sigma, domain, dom)?),
            Box::new(lf_subst_kind(&lift(sigma), &extend(domain, x), cod)?),
        ),
    })
}

/// Substitutes every declaration type of `ctx` (an extension of the domain
/// `domain`) with `sigma`, producing the corresponding extension of the range.
/// Used when relocating LF contexts that sit on top of a substituted prefix.
pub fn lf_subst_decls(
    sigma: &LfSubst,
    domain: &ErasedCtx,
    decls: &[(crate::syntax::Name, LfType)],
) -> Result<Vec<(crate::syntax::Name, LfType)>> {
    let mut sigma = sigma.clone();
    let mut domain = domain.clone();
    let mut out = Vec::with_capacity(decls.len());
    for (x, a) in decls {
        out.push((x.clone(), lf_subst_type(&sigma, &domain, a)?));
        sigma = lift(&sigma);
        domain.names.push(x.clone());
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Single substitution `[N/x]M` for the innermost variable, by direct index
// instantiation. It agrees with `lf_subst_term((id, N), (Psi^, x), M)` but
// does not need the surrounding context.

fn inst_term(m: &LfTerm, n: &LfTerm, c: usize) -> Result<LfTerm> {
    Ok(match m {
        LfTerm::Var(i) if *i == c => shift_term(n, c, 0),
        LfTerm::Var(i) if *i > c => LfTerm::Var(i - 1),
        LfTerm::Var(_) | LfTerm::Const(_) => m.clone(),
        LfTerm::Lam(x, body) => LfTerm::Lam(x.clone(), Box::new(inst_term(body, n, c + 1)?)),
        LfTerm::App(f, a) => LfTerm::app(inst_term(f, n, c)?, inst_term(a, n, c)?),
        LfTerm::Unbox(t, s) => LfTerm::Unbox(t.clone(), Box::new(inst_subst(s, n, c)?)),
    })
}

fn inst_subst(s: &LfSubst, n: &LfTerm, c: usize) -> Result<LfSubst> {
    Ok(match s {
        LfSubst::Empty => LfSubst::Empty,
        LfSubst::Snoc(rest, m) => LfSubst::Snoc(Box::new(inst_subst(rest, n, c)?), inst_term(m, n, c)?),
        LfSubst::Wk(dom, k) if *k > c => LfSubst::Wk(dom.clone(), k - 1),
        LfSubst::Wk(dom, k) if !dom.names.is_empty() => inst_subst(&unfold_wk(dom, *k), n, c)?,
        LfSubst::Wk(_, k) => return Err(KernelError::IllScoped(*k)),
    })
}

fn inst_type(a: &LfType, n: &LfTerm, c: usize) -> Result<LfType> {
    Ok(match a {
        LfType::Atom(k, args) => LfType::Atom(*k, args.iter().map(|m| inst_term(m, n, c)).collect::<Result<_>>()?),
        LfType::Pi(x, dom, cod) => {
            LfType::Pi(x.clone(), Box::new(inst_type(dom, n, c)?), Box::new(inst_type(cod, n, c + 1)?))
        }
    })
}

fn inst_kind(k: &LfKind, n: &LfTerm, c: usize) -> Result<LfKind> {
    Ok(match k {
        LfKind::Type => LfKind::Type,
        LfKind::Pi(x, dom, cod) => {
            LfKind::Pi(x.clone(), Box::new(inst_type(dom, n, c)?), Box::new(inst_kind(cod, n, c + 1)?))
        }
    })
}

/// `[n/x]m` where `x` is the innermost variable of `m`'s context.
pub fn single_subst(n: &LfTerm, m: &LfTerm) -> Result<LfTerm> {
    inst_term(m, n, 0)
}

pub fn single_subst_type(n: &LfTerm, a: &LfType) -> Result<LfType> {
    inst_type(a, n, 0)
}

pub fn single_subst_kind(n: &LfTerm, k: &LfKind) -> Result<LfKind> {
    inst_kind(k, n, 0)
}
