//! Acceptance criteria, one line of output each.

use std::time::{Duration, Instant};

use ctxtt::harness::{self, Config};
use ctxtt::lf_subst::{expand_wk, lf_lookup, lf_subst_term, trunc};
use ctxtt::{
    CompCtx, CompTerm, Const, CtxHead, Domain, ErasedCtx, Kernel, KernelError, LfCtx, LfSubst, LfTerm, LfType, Name,
    Session, Status,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn prelude() -> Session {
    let mut s = Session::new(Kernel::new());
    let r = s.run(harness::gen::PRELUDE, false);
    assert_eq!(r.status, Status::Ok, "{:?}", r.diagnostics);
    s
}

fn ctx_names(gamma: &CompCtx) -> Vec<Name> {
    gamma.names()
}

// ---------------------------------------------------------------------------

fn copy_example() -> Outcome {
    let start = Instant::now();
    let src = std::fs::read_to_string(format!("{}/../../corpus/copy.kern", env!("CARGO_MANIFEST_DIR")))
        .map_err(|e| e.to_string())?;
    let mut s = Session::new(Kernel::new());
    let r = s.run(&src, false);
    ensure(r.status == Status::Ok, format!("corpus file failed: {:?}", r.diagnostics))?;
    let k = &s.kernel;
    let g = CompCtx::new();
    let copy = s.global("copy").ok_or("copy is not defined")?;
    let expected = s.parse("(psi : tm_ctx) -> (m : [psi |- tm]) -> [psi |- tm]").map_err(|e| e.message)?;
    let ty = k.infer_comp(&g, &copy).map_err(|e| e.to_string())?;
    ensure(k.conv_comp_type(&g, &ty, &expected).map_err(|e| e.to_string())?, "copy has the wrong type")?;
    let input = s.parse("[. |- lam \\x. app x x]").map_err(|e| e.message)?;
    let call = s.parse("copy . [. |- lam \\x. app x x]").map_err(|e| e.message)?;
    let box_ty = s.parse("[. |- tm]").map_err(|e| e.message)?;
    k.check_comp(&g, &call, &box_ty).map_err(|e| e.to_string())?;
    let v = k.whnf_comp(&call).map_err(|e| e.to_string())?;
    ensure(k.conv_comp(&g, &v, &input, &box_ty).map_err(|e| e.to_string())?, "copy did not return its input")?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("{elapsed:?}"))
}

/// One equality rule: a convertible pair and a perturbed pair that is not.
struct Twin {
    rule: &'static str,
    /// The left side is a bare redex, which is convertible but not inferable.
    redex: bool,
    ctx: &'static [(&'static str, &'static str)],
    ty: &'static str,
    lhs: &'static str,
    rhs: &'static str,
    perturbed: &'static str,
}

const COMP_TWINS: &[Twin] = &[
    Twin {
        rule: "computation beta",
        redex: true,
        ctx: &[],
        ty: "[. |- tm]",
        lhs: "(fn y => [. |- app y y]) [. |- lam \\z. z]",
        rhs: "[. |- app (lam \\z. z) (lam \\z. z)]",
        perturbed: "[. |- lam \\z. z]",
    },
    Twin {
        rule: "computation beta at a context",
        redex: true,
        ctx: &[],
        ty: "[x : tm |- tm]",
        lhs: "(fn p => fn m => m) (x : tm) [x |- app x x]",
        rhs: "[x |- app x x]",
        perturbed: "[x |- x]",
    },
    Twin {
        rule: "box eta",
        redex: false,
        ctx: &[("psi", "tm_ctx"), ("u", "[psi |- tm]")],
        ty: "[psi |- tm]",
        lhs: "u",
        rhs: "[psi |- u]",
        perturbed: "[psi |- app u u]",
    },
    Twin {
        rule: "unbox of box",
        redex: false,
        ctx: &[],
        ty: "[. |- tm]",
        lhs: "[. |- ([y |- app y y])[lam \\z. z]]",
        rhs: "[. |- app (lam \\z. z) (lam \\z. z)]",
        perturbed: "[. |- lam \\z. z]",
    },
    Twin {
        rule: "recursor on a variable",
        redex: false,
        ctx: &[],
        ty: "[x : tm, y : tm |- tm]",
        lhs: "copy (x : tm, y : tm) [x, y |- x]",
        rhs: "[x, y |- x]",
        perturbed: "[x, y |- y]",
    },
    Twin {
        rule: "recursor on app",
        redex: false,
        ctx: &[],
        ty: "[. |- tm]",
        lhs: "swapc . [. |- app (lam \\z. z) (lam \\w. app w w)]",
        rhs: "[. |- app (lam \\w. app w w) (lam \\z. z)]",
        perturbed: "[. |- app (lam \\z. z) (lam \\w. app w w)]",
    },
    Twin {
        rule: "recursor on lam",
        redex: false,
        ctx: &[],
        ty: "[. |- tm]",
        lhs: "erase (x : tm) [x |- lam \\y. app y x]",
        rhs: "[. |- lam \\z. app (lam \\q. q) (lam \\q. q)]",
        perturbed: "[. |- lam \\z. z]",
    },
    Twin {
        rule: "recursor on an open context",
        redex: false,
        ctx: &[("psi", "tm_ctx"), ("u", "[psi |- tm]")],
        ty: "[psi |- tm]",
        lhs: "copy psi [psi |- lam \\x. app x u[wk]]",
        rhs: "[psi |- lam \\x. app x (copy (psi, y : tm) [psi, y |- u[wk]])[wk(x)]]",
        perturbed: "[psi |- lam \\x. app u[wk] x]",
    },
];

/// LF twins: bodies of boxes over `ctx`, compared at `ty`.
struct LfTwin {
    rule: &'static str,
    redex: bool,
    hat: &'static str,
    ctx: LfCtx,
    ty: LfType,
    lhs: &'static str,
    rhs: &'static str,
    perturbed: &'static str,
}

fn arrow() -> LfType {
    LfType::arrow(LfType::tm(), LfType::tm())
}

fn lf_twins() -> Vec<LfTwin> {
    vec![
        LfTwin {
            rule: "LF beta",
            redex: true,
            hat: "y",
            ctx: LfCtx::empty().with("y", LfType::tm()),
            ty: LfType::tm(),
            lhs: "(\\x. app x y) (lam \\z. z)",
            rhs: "app (lam \\z. z) y",
            perturbed: "app y (lam \\z. z)",
        },
        LfTwin {
            rule: "LF eta",
            redex: false,
            hat: "g",
            ctx: LfCtx::empty().with("g", arrow()),
            ty: arrow(),
            lhs: "g",
            rhs: "\\x. g x",
            perturbed: "\\x. g (g x)",
        },
        LfTwin {
            rule: "LF eta at a constant",
            redex: false,
            hat: ".",
            ctx: LfCtx::empty(),
            ty: LfType::arrow(arrow(), LfType::tm()),
            lhs: "lam",
            rhs: "\\f. lam f",
            perturbed: "\\f. lam (\\x. x)",
        },
        LfTwin {
            rule: "LF substitution closure",
            redex: false,
            hat: "y",
            ctx: LfCtx::empty().with("y", LfType::tm()),
            ty: LfType::tm(),
            lhs: "([a, b |- app b a])[y, lam \\z. z]",
            rhs: "app (lam \\z. z) y",
            perturbed: "app y (lam \\z. z)",
        },
    ]
}

fn equality_rules() -> Outcome {
    let s = prelude();
    let k = &s.kernel;
    let mut n = 0;
    for t in COMP_TWINS {
        let mut gamma = CompCtx::new();
        for (x, d) in t.ctx {
            let dom = if *d == "tm_ctx" { Domain::TmCtx } else { Domain::Type(s.parse_in(d, &gamma.names()).unwrap()) };
            gamma.push(Name::new(x), dom);
        }
        let names = ctx_names(&gamma);
        let parse = |src: &str| s.parse_in(src, &names).map_err(|e| format!("{}: {}", t.rule, e.message));
        let ty = parse(t.ty)?;
        let (l, r, p) = (parse(t.lhs)?, parse(t.rhs)?, parse(t.perturbed)?);
        let checked = if t.redex { vec![&r, &p] } else { vec![&l, &r, &p] };
        for x in checked {
            k.check_comp(&gamma, x, &ty).map_err(|e| format!("{}: {e}", t.rule))?;
        }
        let conv = |a: &CompTerm, b: &CompTerm| k.conv_comp(&gamma, a, b, &ty).map_err(|e| format!("{}: {e}", t.rule));
        ensure(conv(&l, &r)?, format!("{}: positive instance rejected", t.rule))?;
        ensure(!conv(&l, &p)?, format!("{}: perturbed instance accepted", t.rule))?;
        n += 1;
    }
    let gamma = CompCtx::new();
    for t in lf_twins() {
        let body = |src: &str| match s.parse(&format!("[{} |- {src}]", t.hat)) {
            Ok(CompTerm::BoxObj(o)) => Ok(o.body),
            Ok(_) => Err(format!("{}: not a box", t.rule)),
            Err(e) => Err(format!("{}: {}", t.rule, e.message)),
        };
        let (l, r, p) = (body(t.lhs)?, body(t.rhs)?, body(t.perturbed)?);
        let checked = if t.redex { vec![&r, &p] } else { vec![&l, &r, &p] };
        for x in checked {
            k.check_lf(&gamma, &t.ctx, x, &t.ty).map_err(|e| format!("{}: {e}", t.rule))?;
        }
        let conv = |a: &LfTerm, b: &LfTerm| k.conv_lf(&gamma, &t.ctx, a, b, &t.ty).map_err(|e| format!("{}: {e}", t.rule));
        ensure(conv(&l, &r)?, format!("{}: positive instance rejected", t.rule))?;
        ensure(conv(&r, &l)?, format!("{}: positive instance rejected when flipped", t.rule))?;
        ensure(!conv(&l, &p)?, format!("{}: perturbed instance accepted", t.rule))?;
        n += 1;
    }
    Ok(format!("{n} rules, each with a rejected twin"))
}

fn suites(cfg: &Config, names: &[&str], limit: Option<Duration>) -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for name in names {
        let r = harness::run_suite(cfg, name).ok_or("unknown suite")?;
        if let Some(f) = r.failures.first() {
            return Err(format!("{name}: {} failures, first: {}\n    {}", r.failures.len(), f.message, f.witness));
        }
        cases += r.cases;
    }
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        ensure(elapsed < limit, format!("took {elapsed:?}"))?;
    }
    Ok(format!("{cases} cases in {elapsed:?}"))
}

fn consistency() -> Outcome {
    let s = prelude();
    let k = &s.kernel;
    let gamma = CompCtx::new().with("x", Domain::Type(CompTerm::Univ(0)));
    let names = gamma.names();
    let x = CompTerm::Var(0);
    let mut rejected = 0;
    for src in ["x", "fn y => y", "U0", "[. |- lam \\z. z]"] {
        let t = s.parse_in(src, &names).map_err(|e| e.message)?;
        match k.check_comp(&gamma, &t, &x) {
            Err(KernelError::Type(_)) => rejected += 1,
            Err(e) => return Err(format!("`{src}` raised {e}")),
            Ok(()) => return Err(format!("`{src}` was accepted at type x")),
        }
    }
    match k.check_closed(&CompTerm::Univ(0), &CompTerm::Univ(2)) {
        Err(KernelError::Type(_)) => rejected += 1,
        other => return Err(format!("U0 at U2: {other:?}")),
    }
    Ok(format!("{rejected} candidates rejected"))
}

fn lookup_table() -> Outcome {
    let t = |c| LfTerm::Const(c);
    let dom = ErasedCtx::empty().with("y").with("x");
    let sigma = LfSubst::Empty.snoc(t(Const::Lam)).snoc(t(Const::App));
    let err = |e: KernelError| e.to_string();
    let mut rows = 0;
    let mut row = |name: &str, ok: bool| -> Result<(), String> {
        rows += 1;
        ensure(ok, format!("row `{name}` differs"))
    };
    row("lookup x in (s, M / P, x)", lf_lookup(0, &sigma, &dom).map_err(err)? == t(Const::App))?;
    row("lookup y in (s, M / P, x)", lf_lookup(1, &sigma, &dom).map_err(err)? == t(Const::Lam))?;
    row("lookup x in wk / P", lf_lookup(1, &LfSubst::Wk(dom.clone(), 0), &dom).map_err(err)? == LfTerm::Var(1))?;
    row("lookup x in wk shifted", lf_lookup(1, &LfSubst::Wk(dom.clone(), 2), &dom).map_err(err)? == LfTerm::Var(3))?;
    row("lookup fails on empty", matches!(lf_lookup(0, &LfSubst::Empty, &dom), Err(KernelError::LookupFailure(_))))?;

    let open = ErasedCtx::var(0).with("a").with("b");
    let target = ErasedCtx::var(0);
    row("trunc at the domain", trunc(&dom, &sigma, &dom).map_err(err)? == sigma)?;
    row(
        "trunc drops an instantiation",
        trunc(&dom.prefix(1), &sigma, &dom).map_err(err)? == LfSubst::Empty.snoc(t(Const::Lam)),
    )?;
    row("trunc drops all", trunc(&ErasedCtx::empty(), &sigma, &dom).map_err(err)? == LfSubst::Empty)?;
    row("trunc of wk", trunc(&target, &LfSubst::Wk(open.clone(), 1), &open).map_err(err)? == LfSubst::Wk(target.clone(), 3))?;
    row(
        "trunc of empty fails",
        matches!(trunc(&dom.prefix(1), &LfSubst::Empty, &dom), Err(KernelError::TruncFailure(_))),
    )?;

    // wk over (psi, a, b) into three more variables, applied to
    // `app b (lam \z. app z a)`.
    let m = LfTerm::app_tm(
        LfTerm::Var(0),
        LfTerm::lam_tm("z", LfTerm::app_tm(LfTerm::Var(0), LfTerm::Var(2))),
    );
    let expanded = expand_wk(&open, 3);
    row(
        "wk expands to a list",
        expanded == LfSubst::Wk(target.clone(), 5).snoc(LfTerm::Var(4)).snoc(LfTerm::Var(3)),
    )?;
    let via_wk = lf_subst_term(&LfSubst::Wk(open.clone(), 3), &open, &m).map_err(err)?;
    let via_list = lf_subst_term(&expanded, &open, &m).map_err(err)?;
    let want = LfTerm::app_tm(
        LfTerm::Var(3),
        LfTerm::lam_tm("z", LfTerm::app_tm(LfTerm::Var(0), LfTerm::Var(5))),
    );
    row("wk expansion law", via_wk == via_list && via_wk == want)?;
    let closed = ErasedCtx::empty().with("a");
    row(
        "closed wk expands without a head",
        expand_wk(&closed, 1) == LfSubst::Empty.snoc(LfTerm::Var(1)) && matches!(closed.head, CtxHead::Empty),
    )?;
    Ok(format!("{rows} rows"))
}

fn main() {
    let cfg = |count| Config::new(0, count);
    let criteria: Vec<Criterion> = vec![
        ("copy example", Box::new(copy_example)),
        ("equality rules and twins", Box::new(equality_rules)),
        (
            "determinacy",
            Box::new(move || suites(&cfg(1000), &["determinacy-lf", "determinacy-subst", "determinacy-comp"], None)),
        ),
        (
            "subject reduction",
            Box::new(move || suites(&cfg(1000), &["subject-reduction"], Some(Duration::from_secs(60)))),
        ),
        ("type uniqueness", Box::new(move || suites(&cfg(1000), &["uniqueness"], None))),
        ("substitution lemmas", Box::new(move || suites(&cfg(500), &["lf-subst-lemma", "comp-subst-lemma"], None))),
        ("consistency negatives", Box::new(consistency)),
        ("lookup/trunc table", Box::new(lookup_table)),
        ("conversion laws", Box::new(move || suites(&cfg(300), &["conv-laws"], None))),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail})", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
