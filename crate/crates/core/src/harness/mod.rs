//! Property harness: generates well-typed terms and checks the metatheory
//! of the kernel on them.
//!
//! Each suite draws `count` cases, each from its own seed derived from the
//! run seed. A failing case is shrunk by regenerating it from the same seed
//! at smaller depths and keeping the smallest depth that still fails.

pub mod gen;

use serde::Serialize;

use crate::comp_subst::{csubst_sim, CompSubst, Payload};
use crate::frontend::{print, Session};
use crate::lf_subst::{lf_subst_term, shift_term, single_subst};
use crate::reduce::Kernel;
use crate::syntax::{alpha_eq, CompCtx, CompTerm, CtxHead, CtxObj, Domain, LfCtx, LfTerm, LfType, Name};

use gen::{Gen, Lf, Scope, Shape, PRELUDE};

/// Largest generation depth.
pub const MAX_DEPTH: usize = 6;

/// Harness configuration.
#[derive(Clone, Debug)]
pub struct Config {
    pub seed: u64,
    pub count: usize,
    /// Runs the kernels with LF η disabled, to check that the η suite notices.
    pub skip_eta: bool,
    pub fuel: u64,
}

impl Config {
    pub fn new(seed: u64, count: usize) -> Config {
        Config { seed, count, skip_eta: false, fuel: crate::reduce::DEFAULT_FUEL }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub case: usize,
    pub seed: u64,
    /// Depth of the shrunk witness.
    pub depth: usize,
    pub witness: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<Failure>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.failures.is_empty())
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.name == name)
    }
}

/// Names of the suites, in the order they run.
pub const SUITES: [&str; 9] = [
    "determinacy-lf",
    "determinacy-subst",
    "determinacy-comp",
    "subject-reduction",
    "uniqueness",
    "lf-subst-lemma",
    "comp-subst-lemma",
    "conv-laws",
    "eta",
];

/// A case that failed: the generated input and what went wrong.
#[derive(Debug)]
pub struct Counterexample {
    pub witness: String,
    pub message: String,
}

type Outcome = Result<(), Counterexample>;

fn fail(witness: &str, message: impl Into<String>) -> Counterexample {
    Counterexample { witness: witness.to_string(), message: message.into() }
}

/// Two independently built sessions holding the prelude.
pub struct Harness {
    a: Session,
    b: Session,
}

fn prelude(cfg: &Config) -> Session {
    let mut k = Kernel::with_fuel(cfg.fuel);
    if cfg.skip_eta {
        k.disable_lf_eta();
    }
    let mut s = Session::new(k);
    let r = s.run(PRELUDE, false);
    assert!(r.diagnostics.is_empty(), "prelude does not check: {:?}", r.diagnostics);
    s
}

/// Runs every suite.
pub fn run(cfg: &Config) -> Report {
    if cfg.count == 0 {
        return Report::default();
    }
    let h = Harness { a: prelude(cfg), b: prelude(cfg) };
    let suites = SUITES.iter().map(|name| h.run_suite(name, cfg.seed, cfg.count)).collect();
    Report { suites }
}

/// Runs one suite by name.
pub fn run_suite(cfg: &Config, name: &str) -> Option<SuiteReport> {
    let h = Harness { a: prelude(cfg), b: prelude(cfg) };
    SUITES.contains(&name).then(|| h.run_suite(name, cfg.seed, cfg.count))
}

/// Parses and checks the computation context described by `sc`.
pub fn context_of(s: &Session, sc: &Scope) -> Result<CompCtx, String> {
    let mut gamma = CompCtx::new();
    for (x, d) in &sc.entries {
        let dom = if d == "tm_ctx" {
            Domain::TmCtx
        } else {
            Domain::Type(s.parse_in(d, &gamma.names()).map_err(|e| e.message)?)
        };
        gamma.push(Name::new(x), dom);
    }
    s.kernel.check_comp_ctx(&gamma).map_err(|e| e.to_string())?;
    Ok(gamma)
}

/// A session holding the generator prelude.
pub fn prelude_session() -> Session {
    prelude(&Config::new(0, 0))
}

/// Mixes the run seed with a suite and case index.
fn case_seed(seed: u64, suite: &str, case: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in suite.bytes().chain(seed.to_le_bytes()).chain((case as u64).to_le_bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

impl Harness {
    pub fn run_suite(&self, name: &str, seed: u64, count: usize) -> SuiteReport {
        let mut failures = Vec::new();
        for case in 0..count {
            let s = case_seed(seed, name, case);
            if let Err(first) = self.case(name, s, MAX_DEPTH) {
                let (depth, cx) = (0..MAX_DEPTH)
                    .find_map(|d| self.case(name, s, d).err().map(|cx| (d, cx)))
                    .unwrap_or((MAX_DEPTH, first));
                failures.push(Failure { case, seed: s, depth, witness: cx.witness, message: cx.message });
            }
        }
        SuiteReport { name: name.to_string(), cases: count, failures }
    }

    fn case(&self, name: &str, seed: u64, depth: usize) -> Outcome {
        self.a.kernel.reset_fuel();
        self.b.kernel.reset_fuel();
        let mut g = Gen::new(seed);
        match name {
            "determinacy-lf" => self.determinacy_lf(&mut g, depth),
            "determinacy-subst" => self.determinacy_subst(&mut g, depth),
            "determinacy-comp" => self.determinacy_comp(&mut g, depth),
            "subject-reduction" => self.subject_reduction(&mut g, depth),
            "uniqueness" => self.uniqueness(&mut g, depth),
            "lf-subst-lemma" => self.lf_subst_lemma(&mut g, depth),
            "comp-subst-lemma" => self.comp_subst_lemma(&mut g, depth),
            "conv-laws" => self.conv_laws(&mut g, depth),
            "eta" => self.eta(&mut g, depth),
            _ => Err(fail("", format!("unknown suite `{name}`"))),
        }
    }

    // -----------------------------------------------------------------------
    // Building cases

    fn context(&self, sc: &Scope) -> Result<CompCtx, String> {
        context_of(&self.a, sc)
    }

    fn parse(&self, gamma: &CompCtx, src: &str) -> Result<CompTerm, Counterexample> {
        self.a.parse_in(src, &gamma.names()).map_err(|e| fail(src, format!("generated text does not parse: {}", e.message)))
    }

    /// A generated computation, parsed and checked against its generated type.
    fn typed_comp(&self, g: &mut Gen, depth: usize) -> Result<(CompCtx, CompTerm, CompTerm, String), Counterexample> {
        let sc = Scope::menu(g.below(5));
        let (src, ty_src) = g.comp(&sc, depth);
        self.typed(&sc, &src, &ty_src)
    }

    fn typed(&self, sc: &Scope, src: &str, ty_src: &str) -> Result<(CompCtx, CompTerm, CompTerm, String), Counterexample> {
        let witness = format!("{} |- {src} : {ty_src}", scope_text(sc));
        let gamma = self.context(sc).map_err(|m| fail(&witness, m))?;
        let t = self.parse(&gamma, src)?;
        let ty = self.parse(&gamma, ty_src)?;
        let k = &self.a.kernel;
        k.infer_sort(&gamma, &ty).map_err(|e| fail(&witness, format!("generated type is ill-formed: {e}")))?;
        k.check_comp(&gamma, &t, &ty).map_err(|e| fail(&witness, format!("generated term is ill-typed: {e}")))?;
        Ok((gamma, t, ty, witness))
    }

    /// An LF term of type `tm` in a generated context, as the body of a
    /// checked box.
    fn typed_lf(&self, g: &mut Gen, depth: usize) -> Result<(CompCtx, LfCtx, LfTerm, String), Counterexample> {
        let sc = Scope::menu(g.below(5));
        let shape = g.shape(&sc);
        let names = g.names("x", shape.len);
        let lf = Lf::new(shape.head.clone(), names);
        let body = g.tm(&sc, &lf, depth);
        let (gamma, t, ty, witness) = self.typed(&sc, &format!("[{} |- {body}]", lf.hat()), &shape.box_ty())?;
        match (t, ty) {
            (CompTerm::BoxObj(obj), CompTerm::BoxType(ct)) => Ok((gamma, ct.ctx().clone(), obj.body, witness)),
            _ => Err(fail(&witness, "generated text is not a box")),
        }
    }

    // -----------------------------------------------------------------------
    // Suites

    fn determinacy_lf(&self, g: &mut Gen, depth: usize) -> Outcome {
        let (_, _, m, w) = self.typed_lf(g, depth)?;
        let r1 = self.a.kernel.whnf_lf(&m).map_err(|e| fail(&w, e.to_string()))?;
        let r2 = self.b.kernel.whnf_lf(&m).map_err(|e| fail(&w, e.to_string()))?;
        if alpha_eq(&r1, &r2) {
            Ok(())
        } else {
            Err(fail(&w, "whnf differs between runs"))
        }
    }

    fn determinacy_subst(&self, g: &mut Gen, depth: usize) -> Outcome {
        let (_, _, m, w) = self.lf_subst_case(g, depth)?;
        let LfTerm::Unbox(_, sigma) = &m else { return Err(fail(&w, "expected an unbox")) };
        if !alpha_eq(&self.a.kernel.whnf_subst(sigma), &self.b.kernel.whnf_subst(sigma)) {
            return Err(fail(&w, "substitution whnf differs between runs"));
        }
        let r1 = self.a.kernel.whnf_lf(&m).map_err(|e| fail(&w, e.to_string()))?;
        let r2 = self.b.kernel.whnf_lf(&m).map_err(|e| fail(&w, e.to_string()))?;
        if alpha_eq(&r1, &r2) {
            Ok(())
        } else {
            Err(fail(&w, "applying the substitution differs between runs"))
        }
    }

    fn determinacy_comp(&self, g: &mut Gen, depth: usize) -> Outcome {
        let (_, t, _, w) = self.typed_comp(g, depth)?;
        let r1 = self.a.kernel.whnf_comp(&t).map_err(|e| fail(&w, e.to_string()))?;
        let r2 = self.b.kernel.whnf_comp(&t).map_err(|e| fail(&w, e.to_string()))?;
        if alpha_eq(&r1, &r2) {
            Ok(())
        } else {
            Err(fail(&w, "whnf differs between runs"))
        }
    }

    fn subject_reduction(&self, g: &mut Gen, depth: usize) -> Outcome {
        let (gamma, t, ty, w) = self.typed_comp(g, depth)?;
        let k = &self.a.kernel;
        let v = k.whnf_comp(&t).map_err(|e| fail(&w, e.to_string()))?;
        k.check_comp(&gamma, &v, &ty)
            .map_err(|e| fail(&w, format!("whnf {} does not check: {e}", print::comp_in(&gamma.names(), &v))))?;
        match k.conv_comp(&gamma, &t, &v, &ty) {
            Ok(true) => Ok(()),
            Ok(false) => Err(fail(&w, "whnf is not convertible with its source")),
            Err(e) => Err(fail(&w, e.to_string())),
        }
    }

    fn uniqueness(&self, g: &mut Gen, depth: usize) -> Outcome {
        let (gamma, t, ty, w) = self.typed_comp(g, depth)?;
        let inferable = matches!(
            t,
            CompTerm::Var(_) | CompTerm::Global(..) | CompTerm::App(..) | CompTerm::Rec(_) | CompTerm::BoxObj(_)
        ) || matches!(t, CompTerm::Univ(_) | CompTerm::Pi(..) | CompTerm::BoxType(_));
        if !inferable {
            return Ok(());
        }
        let t1 = self.a.kernel.infer_comp(&gamma, &t).map_err(|e| fail(&w, e.to_string()))?;
        let t2 = self.b.kernel.infer_comp(&gamma, &t).map_err(|e| fail(&w, e.to_string()))?;
        let k = &self.a.kernel;
        let same = k.conv_comp_type(&gamma, &t1, &t2).map_err(|e| fail(&w, e.to_string()))?;
        if !same {
            return Err(fail(&w, "two inferences disagree"));
        }
        // Type formers infer their least universe, which the checked type
        // may exceed; everything else must agree with the checked type.
        if matches!(t, CompTerm::Univ(_) | CompTerm::Pi(..) | CompTerm::BoxType(_)) {
            return Ok(());
        }
        match k.conv_comp_type(&gamma, &t1, &ty) {
            Ok(true) => Ok(()),
            Ok(false) => Err(fail(&w, format!("inferred {}", print::comp_in(&gamma.names(), &t1)))),
            Err(e) => Err(fail(&w, e.to_string())),
        }
    }

    /// `[Psi |- ([Phi |- M])[sigma]]`, checked; returns the inner unbox.
    fn lf_subst_case(&self, g: &mut Gen, depth: usize) -> Result<(CompCtx, LfCtx, LfTerm, String), Counterexample> {
        let sc = Scope::menu(g.below(5));
        let outer = g.shape(&sc);
        let single = g.chance(0.3);
        let inner_len = if single { outer.len + 1 } else { g.below(3) };
        let inner = Shape { head: outer.head.clone(), len: inner_len };
        let psi = Lf::new(outer.head.clone(), g.names("x", outer.len));
        let phi = Lf::new(inner.head.clone(), g.names("y", inner.len));
        let m = g.tm(&sc, &phi, depth);
        let sigma = if single {
            format!("{}, {}", psi_wk_all(&psi), g.tm(&sc, &psi, depth.min(2)))
        } else {
            g.subst_into(&sc, &psi, &inner)
        };
        let src = format!("[{} |- ([{} |- {m}])[{sigma}]]", psi.hat(), phi.hat());
        let (gamma, t, _, w) = self.typed(&sc, &src, &outer.box_ty())?;
        let CompTerm::BoxObj(obj) = t else { return Err(fail(&w, "generated text is not a box")) };
        let ctx = self.context(&sc).map_err(|e| fail(&w, e))?;
        let psi_ctx = lf_ctx_of(&ctx, &outer);
        Ok((gamma, psi_ctx, obj.body, w))
    }

    fn lf_subst_lemma(&self, g: &mut Gen, depth: usize) -> Outcome {
        let (gamma, psi, m, w) = self.lf_subst_case(g, depth)?;
        let LfTerm::Unbox(inner, sigma) = &m else { return Err(fail(&w, "expected an unbox")) };
        let CompTerm::BoxObj(obj) = inner.as_ref() else { return Err(fail(&w, "expected a box")) };
        let CtxObj { ctx: phi, body } = obj.as_ref();
        let r = lf_subst_term(sigma, phi, body).map_err(|e| fail(&w, e.to_string()))?;
        let k = &self.a.kernel;
        k.check_lf(&gamma, &psi, &r, &LfType::tm()).map_err(|e| fail(&w, format!("substituted term does not check: {e}")))?;
        // The single-variable route must agree when sigma is `id, N`.
        if let crate::syntax::LfSubst::Snoc(base, n) = sigma.as_ref() {
            if let crate::syntax::LfSubst::Wk(dom, 0) = base.as_ref() {
                if dom.len() == psi.len() && phi.len() == psi.len() + 1 {
                    let r2 = single_subst(n, body).map_err(|e| fail(&w, e.to_string()))?;
                    if !alpha_eq(&r, &r2) {
                        return Err(fail(&w, "single substitution disagrees with the simultaneous one"));
                    }
                }
            }
        }
        Ok(())
    }

    fn comp_subst_lemma(&self, g: &mut Gen, depth: usize) -> Outcome {
        let source = Scope::empty().ctx("psi").boxed("u", Shape::open("psi", 0)).value("A", "a");
        let (src, ty_src) = g.comp(&source, depth);
        let (gamma, t, ty, w) = self.typed(&source, &src, &ty_src)?;
        let target = if g.chance(0.5) {
            Scope::empty()
        } else {
            Scope::empty().ctx("q").boxed("v", Shape::open("q", 0))
        };
        let target_ctx = self.context(&target).map_err(|e| fail(&w, e))?;
        let names = target_ctx.names();
        let psi = g.shape(&target);
        let u = g.boxed(&target, &psi, depth.min(3));
        let other = g.shape(&target);
        let a_ty = if g.chance(0.5) { other.box_ty() } else { format!("(Tm {})", other.arg()) };
        let a = g.boxed(&target, &other, depth.min(3));
        let w = format!("{w}\n  under psi := {}, u := {u}, A := {a_ty}, a := {a} in {}", psi.arg(), scope_text(&target));
        let parse = |s: &str| self.a.parse_in(s, &names).map_err(|e| fail(&w, e.message));
        let theta = CompSubst::new()
            .with("psi", Payload::Ctx(self.a.parse_ctx_in(&psi.arg(), &names).map_err(|e| fail(&w, e.message))?))
            .with("u", Payload::Term(parse(&u)?))
            .with("A", Payload::Term(parse(&a_ty)?))
            .with("a", Payload::Term(parse(&a)?));
        let k = &self.a.kernel;
        k.check_comp_subst(&target_ctx, &theta, &gamma).map_err(|e| fail(&w, format!("generated substitution is ill-typed: {e}")))?;
        let t2 = csubst_sim(&theta, &t).map_err(|e| fail(&w, e.to_string()))?;
        let ty2 = csubst_sim(&theta, &ty).map_err(|e| fail(&w, e.to_string()))?;
        k.infer_sort(&target_ctx, &ty2).map_err(|e| fail(&w, format!("substituted type is ill-formed: {e}")))?;
        k.check_comp(&target_ctx, &t2, &ty2).map_err(|e| fail(&w, format!("substituted term does not check: {e}")))
    }

    fn conv_laws(&self, g: &mut Gen, depth: usize) -> Outcome {
        let sc = Scope::menu(g.below(5));
        let (src, other, ty_src) = if g.chance(0.8) {
            let s = g.shape(&sc);
            (g.boxed(&sc, &s, depth), g.boxed(&sc, &s, depth), s.box_ty())
        } else {
            (g.ty0(&sc), g.ty0(&sc), "U0".to_string())
        };
        let (gamma, t, ty, w) = self.typed(&sc, &src, &ty_src)?;
        let (_, s, _, _) = self.typed(&sc, &other, &ty_src)?;
        let w = format!("{w}\n  against {other}");
        let k = &self.a.kernel;
        let conv = |x: &CompTerm, y: &CompTerm| k.conv_comp(&gamma, x, y, &ty).map_err(|e| fail(&w, e.to_string()));
        let t2 = self.variant(g, &gamma, &t, &ty).map_err(|e| fail(&w, e))?;
        let t3 = self.variant(g, &gamma, &t2, &ty).map_err(|e| fail(&w, e))?;
        if !conv(&t, &t)? {
            return Err(fail(&w, "not reflexive"));
        }
        if conv(&t, &s)? != conv(&s, &t)? {
            return Err(fail(&w, "not symmetric"));
        }
        if !conv(&t, &t2)? || !conv(&t2, &t)? {
            return Err(fail(&w, format!("variant {} not convertible", print::comp_in(&gamma.names(), &t2))));
        }
        if !conv(&t2, &t3)? || !conv(&t, &t3)? {
            return Err(fail(&w, format!("not transitive through {}", print::comp_in(&gamma.names(), &t3))));
        }
        if conv(&t, &s)? && conv(&s, &t3)? != conv(&t, &t3)? {
            return Err(fail(&w, "not transitive through the unrelated term"));
        }
        Ok(())
    }

    /// A term definitionally equal to `t` at `ty`.
    fn variant(&self, g: &mut Gen, gamma: &CompCtx, t: &CompTerm, ty: &CompTerm) -> Result<CompTerm, String> {
        let k = &self.a.kernel;
        let tyw = k.whnf_comp(ty).map_err(|e| e.to_string())?;
        let boxed = match &tyw {
            CompTerm::BoxType(ct) if !ct.is_param() => Some(ct.clone()),
            _ => None,
        };
        Ok(match (g.below(4), boxed) {
            (0, _) => k.whnf_comp(t).map_err(|e| e.to_string())?,
            (1, _) => k.normalize_comp(t).map_err(|e| e.to_string())?,
            (2, Some(ct)) => {
                let id = k.id_of(ct.ctx());
                CompTerm::box_obj(ct.ctx().erase(), LfTerm::unbox(t.clone(), id))
            }
            (_, Some(ct)) => {
                let f = self.a.global("idbox").ok_or("idbox is missing")?;
                CompTerm::app(CompTerm::app_ctx(f, ct.ctx().clone()), t.clone())
            }
            (_, None) => {
                let f = self.a.global("idU").ok_or("idU is missing")?;
                let _ = gamma;
                CompTerm::app(CompTerm::app(f, ty.clone()), t.clone())
            }
        })
    }

    /// LF η at `tm -> tm`: every function is convertible with its expansion.
    fn eta(&self, g: &mut Gen, depth: usize) -> Outcome {
        let sc = if g.chance(0.5) { Scope::empty() } else { Scope::menu(1) };
        let shape = g.shape(&sc);
        let f = g.name("g");
        let mut lf = Lf::new(shape.head.clone(), g.names("x", shape.len));
        lf.vars.push((f.clone(), true));
        let body = match g.below(3) {
            0 => f.clone(),
            1 => format!("app {}", g.tm(&sc, &lf, depth)),
            _ => {
                let z = g.name("z");
                let mut inner = lf.clone();
                inner.vars.push((z.clone(), false));
                format!("\\{z}. {}", g.tm(&sc, &inner, depth))
            }
        };
        let witness = format!("{} ; {} |- {body} : tm -> tm", scope_text(&sc), lf.hat());
        let gamma = self.context(&sc).map_err(|e| fail(&witness, e))?;
        let psi = lf_ctx_of(&gamma, &shape).with(&f, LfType::arrow(LfType::tm(), LfType::tm()));
        let t = self.parse(&gamma, &format!("[{} |- {body}]", lf.hat()))?;
        let CompTerm::BoxObj(obj) = t else { return Err(fail(&witness, "generated text is not a box")) };
        let m = obj.body;
        let arrow = LfType::arrow(LfType::tm(), LfType::tm());
        let k = &self.a.kernel;
        k.check_lf(&gamma, &psi, &m, &arrow).map_err(|e| fail(&witness, format!("generated term is ill-typed: {e}")))?;
        let expanded = LfTerm::lam("w", LfTerm::app(shift_term(&m, 1, 0), LfTerm::Var(0)));
        match k.conv_lf(&gamma, &psi, &m, &expanded, &arrow) {
            Ok(true) => Ok(()),
            Ok(false) => Err(fail(&witness, "not convertible with its eta expansion")),
            Err(e) => Err(fail(&witness, e.to_string())),
        }
    }
}

fn psi_wk_all(psi: &Lf) -> String {
    let names: Vec<&str> = psi.vars.iter().map(|(n, _)| n.as_str()).collect();
    if names.is_empty() {
        match psi.head {
            Some(_) => "wk".into(),
            None => ".".into(),
        }
    } else {
        format!("wk({})", names.join(", "))
    }
}

/// The LF context described by `shape` under `gamma`.
fn lf_ctx_of(gamma: &CompCtx, shape: &Shape) -> LfCtx {
    let mut c = match &shape.head {
        Some(h) => {
            let names = gamma.names();
            let pos = names.iter().rposition(|n| n.as_str() == h).expect("context variable in scope");
            LfCtx::var(names.len() - 1 - pos)
        }
        None => LfCtx::empty(),
    };
    debug_assert!(matches!(c.head, CtxHead::Var(_) | CtxHead::Empty));
    for i in 0..shape.len {
        c = c.with(&format!("z{i}"), LfType::tm());
    }
    c
}

fn scope_text(sc: &Scope) -> String {
    let items: Vec<String> = sc.entries.iter().map(|(x, d)| format!("{x} : {d}")).collect();
    format!("[{}]", items.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_run() {
        assert!(run(&Config::new(3, 0)).suites.is_empty());
    }

    #[test]
    fn seeds_are_spread() {
        assert_ne!(case_seed(0, "eta", 0), case_seed(0, "eta", 1));
        assert_ne!(case_seed(0, "eta", 0), case_seed(1, "eta", 0));
    }
}
