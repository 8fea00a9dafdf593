use ctxtt::comp_subst::csubst_sim;
use ctxtt::frontend::print;
use ctxtt::harness::gen::{Gen, Lf, Scope};
use ctxtt::harness::{context_of, prelude_session};
use ctxtt::lf_subst::{expand_wk, lf_subst_term, shift_term};
use ctxtt::{alpha_eq, CompCtx, CompSubst, CompTerm, ErasedCtx, Kernel, LfCtx, LfSubst, LfTerm, LfType, Session};
use proptest::prelude::*;

thread_local! {
    static SESSION: Session = prelude_session();
}

/// A generated, checked computation with its context.
fn comp(s: &Session, seed: u64, depth: usize) -> (CompCtx, CompTerm, CompTerm) {
    let mut g = Gen::new(seed);
    let sc = Scope::menu(g.below(5));
    let (src, ty) = g.comp(&sc, depth);
    let gamma = context_of(s, &sc).unwrap();
    let t = s.parse_in(&src, &gamma.names()).unwrap();
    let ty = s.parse_in(&ty, &gamma.names()).unwrap();
    s.kernel.check_comp(&gamma, &t, &ty).unwrap();
    (gamma, t, ty)
}

/// A generated LF term of type `tm` with the erased context it lives in.
fn lf_term(s: &Session, seed: u64, depth: usize) -> (ErasedCtx, LfTerm) {
    let (_, _, dom, m) = lf_term_in(s, seed, depth);
    (dom, m)
}

fn lf_term_in(s: &Session, seed: u64, depth: usize) -> (CompCtx, LfCtx, ErasedCtx, LfTerm) {
    let mut g = Gen::new(seed);
    let sc = Scope::menu(g.below(5));
    let shape = g.shape(&sc);
    let names = g.names("x", shape.len);
    let lf = Lf::new(shape.head.clone(), names);
    let body = g.tm(&sc, &lf, depth);
    let gamma = context_of(s, &sc).unwrap();
    match s.parse_in(&format!("[{} |- {body}]", lf.hat()), &gamma.names()).unwrap() {
        CompTerm::BoxObj(o) => {
            let psi = s.parse_ctx_in(&shape.arg(), &gamma.names()).unwrap();
            (gamma, psi, o.ctx, o.body)
        }
        t => panic!("not a box: {t:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printing_round_trips(seed in any::<u64>(), depth in 0usize..6) {
        SESSION.with(|s| {
            let (gamma, t, _) = comp(s, seed, depth);
            let names = gamma.names();
            let printed = print::comp_in(&names, &t);
            let back = s.parse_in(&printed, &names).unwrap();
            prop_assert!(alpha_eq(&back, &t), "{printed}");
            prop_assert_eq!(print::comp_in(&names, &back), printed);
            Ok(())
        })?;
    }

    #[test]
    fn whnf_is_idempotent(seed in any::<u64>(), depth in 0usize..6) {
        SESSION.with(|s| {
            let (_, t, _) = comp(s, seed, depth);
            let v = s.kernel.whnf_comp(&t).unwrap();
            prop_assert_eq!(s.kernel.whnf_comp(&v).unwrap(), v.clone());
            let n = s.kernel.normalize_comp(&t).unwrap();
            prop_assert_eq!(s.kernel.normalize_comp(&n).unwrap(), n);
            Ok(())
        })?;
    }

    #[test]
    fn identity_substitutions_are_neutral(seed in any::<u64>(), depth in 0usize..6) {
        SESSION.with(|s| {
            let (gamma, t, ty) = comp(s, seed, depth);
            let id = CompSubst::identity(&gamma);
            prop_assert_eq!(csubst_sim(&id, &t).unwrap(), t);
            prop_assert_eq!(csubst_sim(&id, &ty).unwrap(), ty);
            Ok(())
        })?;
    }

    #[test]
    fn weakening_matches_its_expansion(seed in any::<u64>(), depth in 0usize..5, k in 0usize..4) {
        SESSION.with(|s| {
            let (gamma, mut psi, dom, m) = lf_term_in(s, seed, depth);
            let wk = lf_subst_term(&LfSubst::Wk(dom.clone(), k), &dom, &m).unwrap();
            let listed = lf_subst_term(&expand_wk(&dom, k), &dom, &m).unwrap();
            prop_assert_eq!(&wk, &shift_term(&m, k, 0));
            for i in 0..k {
                psi = psi.with(&format!("w{i}"), LfType::tm());
            }
            s.kernel.check_lf(&gamma, &psi, &wk, &LfType::tm()).unwrap();
            prop_assert!(s.kernel.conv_lf(&gamma, &psi, &wk, &listed, &LfType::tm()).unwrap());
            Ok(())
        })?;
    }

    #[test]
    fn shifts_compose(seed in any::<u64>(), a in 0usize..3, b in 0usize..3, c in 0usize..3) {
        SESSION.with(|s| {
            let (_, m) = lf_term(s, seed, 4);
            prop_assert_eq!(shift_term(&shift_term(&m, a, c), b, c), shift_term(&m, a + b, c));
            Ok(())
        })?;
    }

    #[test]
    fn lf_whnf_is_deterministic_across_kernels(seed in any::<u64>(), depth in 0usize..6) {
        SESSION.with(|s| {
            let (_, m) = lf_term(s, seed, depth);
            let fresh = prelude_session();
            prop_assert_eq!(s.kernel.whnf_lf(&m).unwrap(), fresh.kernel.whnf_lf(&m).unwrap());
            Ok(())
        })?;
    }
}

#[test]
fn diagnostics_are_deterministic() {
    let src = "#check U0 : U0\ndef f : U1 = U0\n#check (fn x => x) : U0\n#eval f\n#fail_check f : U1\n#check [. |- y] : [. |- tm]";
    let run = || Session::new(Kernel::new()).run(src, true);
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    assert_eq!(serde_json::to_string(&a.diagnostics).unwrap(), serde_json::to_string(&b.diagnostics).unwrap());
}
