//! Random generation of well-typed source text.
//!
//! Generators emit surface syntax, which the harness parses under the
//! matching computation context. Every generated term is meant to check at
//! the type reported alongside it; the harness verifies this before using it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Definitions available to generated terms.
pub const PRELUDE: &str = r"
def copy : (psi : tm_ctx) -> [psi |- tm] -> [psi |- tm] =
  fn psi m => rec^((q : tm_ctx) -> (y : [q |- tm]) -> [q |- tm])
    (var p r => [p |- r] | app p a b fa fb => [p |- app fa fb] | lam p a fa => [p |- lam \x. fa]) psi m
def swapc : (psi : tm_ctx) -> [psi |- tm] -> [psi |- tm] =
  fn psi m => rec^((q : tm_ctx) -> (y : [q |- tm]) -> [q |- tm])
    (var p r => [p |- r] | app p a b fa fb => [p |- app fb fa] | lam p a fa => [p |- lam \x. fa]) psi m
def erase : (psi : tm_ctx) -> [psi |- tm] -> [. |- tm] =
  fn psi m => rec^((q : tm_ctx) -> (y : [q |- tm]) -> [. |- tm])
    (var p r => [. |- lam \z. z] | app p a b fa fb => [. |- app fa fb] | lam p a fa => [. |- lam \z. fa[wk]]) psi m
def idbox : (psi : tm_ctx) -> [psi |- tm] -> [psi |- tm] = fn psi m => m
def mkapp : (psi : tm_ctx) -> [psi |- tm] -> [psi |- tm] -> [psi |- tm] = fn psi m n => [psi |- app m n]
def mklam : (psi : tm_ctx) -> [psi, x : tm |- tm] -> [psi |- tm] = fn psi m => [psi |- lam \x. m]
def subst0 : (psi : tm_ctx) -> [psi, x : tm |- tm] -> [psi |- tm] -> [psi |- tm] = fn psi m n => [psi |- m[id, n]]
def idU : (X : U0) -> X -> X = fn X x => x
def Tm : tm_ctx -> U0 = fn psi => [psi |- tm]
";

const COPY_MOTIVE: &str = "((q : tm_ctx) -> (y : [q |- tm]) -> [q |- tm])";
const COPY_BRANCHES: &str = "(var p r => [p |- r] | app p a b fa fb => [p |- app fa fb] | lam p a fa => [p |- lam \\x. fa])";
const SWAP_BRANCHES: &str = "(var p r => [p |- r] | app p a b fa fb => [p |- app fb fa] | lam p a fa => [p |- lam \\x. fa])";
const ERASE_MOTIVE: &str = "((q : tm_ctx) -> (y : [q |- tm]) -> [. |- tm])";
const ERASE_BRANCHES: &str =
    "(var p r => [. |- lam \\z. z] | app p a b fa fb => [. |- app fa fb] | lam p a fa => [. |- lam \\z. fa[wk]])";

/// An LF context all of whose declarations have type `tm`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub head: Option<String>,
    pub len: usize,
}

impl Shape {
    pub fn closed(len: usize) -> Shape {
        Shape { head: None, len }
    }

    pub fn open(head: &str, len: usize) -> Shape {
        Shape { head: Some(head.to_string()), len }
    }

    pub fn extend(&self) -> Shape {
        Shape { head: self.head.clone(), len: self.len + 1 }
    }

    fn decls(&self) -> Vec<String> {
        (0..self.len).map(|i| format!("z{i} : tm")).collect()
    }

    /// The context as a computation argument.
    pub fn arg(&self) -> String {
        match (&self.head, self.len) {
            (None, 0) => ".".into(),
            (Some(h), 0) => h.clone(),
            (h, _) => {
                let items: Vec<String> = h.iter().cloned().chain(self.decls()).collect();
                format!("({})", items.join(", "))
            }
        }
    }

    pub fn box_ty(&self) -> String {
        let items: Vec<String> = self.head.iter().cloned().chain(self.decls()).collect();
        let ctx = if items.is_empty() { ".".to_string() } else { items.join(", ") };
        format!("[{ctx} |- tm]")
    }
}

/// Computation variables available to generated terms.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    /// Declarations in order, with their domains in surface syntax.
    pub entries: Vec<(String, String)>,
    ctx_var: Option<String>,
    boxes: Vec<(String, Shape)>,
    ty_var: Option<(String, String)>,
}

impl Scope {
    pub fn empty() -> Scope {
        Scope::default()
    }

    pub fn ctx(mut self, name: &str) -> Scope {
        self.entries.push((name.into(), "tm_ctx".into()));
        self.ctx_var = Some(name.into());
        self
    }

    pub fn boxed(mut self, name: &str, shape: Shape) -> Scope {
        self.entries.push((name.into(), shape.box_ty()));
        self.boxes.push((name.into(), shape));
        self
    }

    /// A type variable `ty : U0` and a value `val : ty`.
    pub fn value(mut self, ty: &str, val: &str) -> Scope {
        self.entries.push((ty.into(), "U0".into()));
        self.entries.push((val.into(), ty.into()));
        self.ty_var = Some((ty.into(), val.into()));
        self
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|(n, _)| n.clone()).collect()
    }

    /// The fixed menu of contexts cases are drawn from.
    pub fn menu(i: usize) -> Scope {
        match i % 5 {
            0 => Scope::empty(),
            1 => Scope::empty().ctx("psi").boxed("u", Shape::open("psi", 0)),
            2 => Scope::empty().value("A", "a"),
            3 => Scope::empty()
                .ctx("psi")
                .boxed("u", Shape::open("psi", 0))
                .boxed("v", Shape::open("psi", 1))
                .value("A", "a"),
            _ => Scope::empty().boxed("w", Shape::closed(1)),
        }
    }
}

/// The LF context in scope while generating LF terms.
#[derive(Clone, Debug)]
pub struct Lf {
    pub head: Option<String>,
    /// Declared names, leftmost first; the flag marks `tm -> tm` variables.
    pub vars: Vec<(String, bool)>,
}

impl Lf {
    pub fn new(head: Option<String>, names: Vec<String>) -> Lf {
        Lf { head, vars: names.into_iter().map(|n| (n, false)).collect() }
    }

    fn with(&self, x: &str) -> Lf {
        let mut l = self.clone();
        l.vars.push((x.to_string(), false));
        l
    }

    pub fn hat(&self) -> String {
        let items: Vec<String> = self.head.iter().cloned().chain(self.vars.iter().map(|(n, _)| n.clone())).collect();
        if items.is_empty() {
            ".".into()
        } else {
            items.join(", ")
        }
    }

    /// Length of the leading run of `tm` declarations.
    fn tm_prefix(&self) -> usize {
        self.vars.iter().take_while(|(_, arrow)| !arrow).count()
    }

    fn wk(&self, j: usize) -> String {
        if j == 0 {
            "wk".into()
        } else {
            let names: Vec<&str> = self.vars[..j].iter().map(|(n, _)| n.as_str()).collect();
            format!("wk({})", names.join(", "))
        }
    }

    fn shape(&self) -> Option<Shape> {
        (self.tm_prefix() == self.vars.len()).then(|| Shape { head: self.head.clone(), len: self.vars.len() })
    }
}

pub struct Gen {
    rng: ChaCha8Rng,
    fresh: usize,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), fresh: 0 }
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn name(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    pub fn names(&mut self, prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|_| self.name(prefix)).collect()
    }

    /// A random context shape usable in `sc`.
    pub fn shape(&mut self, sc: &Scope) -> Shape {
        let len = self.below(3);
        match &sc.ctx_var {
            Some(h) if self.chance(0.5) => Shape::open(h, len),
            _ => Shape::closed(len),
        }
    }

    // -----------------------------------------------------------------------
    // LF

    /// An LF term of type `tm`, parenthesized unless atomic.
    pub fn tm(&mut self, sc: &Scope, lf: &Lf, depth: usize) -> String {
        if depth == 0 {
            return self.tm_leaf(sc, lf, true);
        }
        let d = depth - 1;
        match self.below(12) {
            0 | 1 => self.tm_leaf(sc, lf, true),
            2 | 3 => format!("(app {} {})", self.tm(sc, lf, d), self.tm(sc, lf, d)),
            4 | 5 => {
                let x = self.name("x");
                format!("(lam \\{x}. {})", self.tm(sc, &lf.with(&x), d))
            }
            7 => format!("(lam (app {}))", self.tm(sc, lf, d)),
            6 | 8 | 9 => {
                let k = self.below(3);
                let ys = self.names("y", k);
                let inner = Lf::new(None, ys.clone());
                let body = self.tm(sc, &inner, d);
                let items: Vec<String> = (0..k).map(|_| self.tm(sc, lf, d)).collect();
                let s = if k == 0 { ".".to_string() } else { items.join(", ") };
                format!("(([{} |- {body}])[{s}])", inner.hat())
            }
            10 => match lf.shape() {
                Some(shape) => format!("({})[{}]", self.boxed(sc, &shape, d), lf.wk(lf.vars.len())),
                None => self.tm_leaf(sc, lf, true),
            },
            _ => match lf.vars.iter().filter(|(_, arrow)| *arrow).count() {
                0 => format!("(app {} {})", self.tm(sc, lf, d), self.tm_leaf(sc, lf, false)),
                _ => {
                    let fs: Vec<String> = lf.vars.iter().filter(|(_, a)| *a).map(|(n, _)| n.clone()).collect();
                    let f = fs[self.below(fs.len())].clone();
                    format!("({f} {})", self.tm(sc, lf, d))
                }
            },
        }
    }

    fn tm_leaf(&mut self, sc: &Scope, lf: &Lf, allow_unbox: bool) -> String {
        let tms: Vec<String> = lf.vars.iter().filter(|(_, a)| !a).map(|(n, _)| n.clone()).collect();
        let boxes: Vec<(String, Shape)> = if allow_unbox {
            sc.boxes.iter().filter(|(_, s)| s.head.is_none() || s.head == lf.head).cloned().collect()
        } else {
            Vec::new()
        };
        let n = tms.len() + boxes.len() + 1;
        let i = self.below(n);
        if i < tms.len() {
            return tms[i].clone();
        }
        if i < tms.len() + boxes.len() {
            let (u, shape) = boxes[i - tms.len()].clone();
            return format!("{u}[{}]", self.subst_into(sc, lf, &shape));
        }
        let z = self.name("x");
        format!("(lam \\{z}. {z})")
    }

    /// A substitution from `dom` to the current LF context, without the
    /// surrounding brackets.
    pub fn subst_into(&mut self, sc: &Scope, lf: &Lf, dom: &Shape) -> String {
        let same_head = dom.head == lf.head;
        let weaken = same_head && (dom.head.is_some() || self.chance(0.5));
        let j = if weaken { self.below(dom.len.min(lf.tm_prefix()) + 1) } else { 0 };
        let base = if weaken { lf.wk(j) } else { ".".into() };
        let mut items = vec![base];
        for _ in j..dom.len {
            items.push(self.tm_leaf(sc, lf, false));
        }
        items.join(", ")
    }

    // -----------------------------------------------------------------------
    // Computations

    /// A computation of type `shape.box_ty()`.
    pub fn boxed(&mut self, sc: &Scope, shape: &Shape, depth: usize) -> String {
        let vars: Vec<String> = sc.boxes.iter().filter(|(_, s)| s == shape).map(|(n, _)| n.clone()).collect();
        if depth == 0 {
            if !vars.is_empty() && self.chance(0.3) {
                return vars[self.below(vars.len())].clone();
            }
            return self.box_obj(sc, shape, 0);
        }
        let d = depth - 1;
        let arg = shape.arg();
        match self.below(14) {
            0..=3 => self.box_obj(sc, shape, d),
            4 if !vars.is_empty() => vars[self.below(vars.len())].clone(),
            4 | 5 => format!("(copy {arg} {})", self.boxed(sc, shape, d)),
            6 => format!("(idbox {arg} {})", self.boxed(sc, shape, d)),
            7 => format!("(swapc {arg} {})", self.boxed(sc, shape, d)),
            8 => format!("(mkapp {arg} {} {})", self.boxed(sc, shape, d), self.boxed(sc, shape, d)),
            9 => format!("(mklam {arg} {})", self.boxed(sc, &shape.extend(), d)),
            10 => format!("(subst0 {arg} {} {})", self.boxed(sc, &shape.extend(), d), self.boxed(sc, shape, d)),
            11 => {
                let ty = if self.chance(0.5) { shape.box_ty() } else { format!("(Tm {arg})") };
                format!("(idU {ty} {})", self.boxed(sc, shape, d))
            }
            12 => {
                let branches = if self.chance(0.5) { COPY_BRANCHES } else { SWAP_BRANCHES };
                format!("(rec^{COPY_MOTIVE} {branches} {arg} {})", self.boxed(sc, shape, d))
            }
            _ if *shape == Shape::closed(0) => {
                let other = self.shape(sc);
                let t = self.boxed(sc, &other, d);
                if self.chance(0.5) {
                    format!("(erase {} {t})", other.arg())
                } else {
                    format!("(rec^{ERASE_MOTIVE} {ERASE_BRANCHES} {} {t})", other.arg())
                }
            }
            _ => self.box_obj(sc, shape, d),
        }
    }

    fn box_obj(&mut self, sc: &Scope, shape: &Shape, depth: usize) -> String {
        let names = self.names("x", shape.len);
        let lf = Lf::new(shape.head.clone(), names);
        let body = self.tm(sc, &lf, depth);
        format!("[{} |- {body}]", lf.hat())
    }

    /// A type in `U0`.
    pub fn ty0(&mut self, sc: &Scope) -> String {
        let s = self.shape(sc);
        match self.below(6) {
            0 | 1 => s.box_ty(),
            2 => format!("(Tm {})", s.arg()),
            3 => {
                let t = self.shape(sc);
                format!("({} -> {})", s.box_ty(), t.box_ty())
            }
            4 => "((p : tm_ctx) -> [p |- tm])".into(),
            _ => match &sc.ty_var {
                Some((a, _)) => a.clone(),
                None => s.box_ty(),
            },
        }
    }

    /// A type in `U1`.
    pub fn ty1(&mut self, sc: &Scope) -> String {
        match self.below(5) {
            0 => "U0".into(),
            1 => "(U0 -> U0)".into(),
            2 => "((X : U0) -> X -> X)".into(),
            3 => format!("({} -> U0)", self.shape(sc).box_ty()),
            _ => "(tm_ctx -> U0)".into(),
        }
    }

    /// A computation together with its type.
    pub fn comp(&mut self, sc: &Scope, depth: usize) -> (String, String) {
        match self.below(10) {
            0 => (self.ty0(sc), "U0".into()),
            1 => (self.ty1(sc), "U1".into()),
            2 => match sc.ty_var.clone() {
                Some((a, v)) => {
                    let mut t = v;
                    for _ in 0..self.below(3) {
                        t = format!("(idU {a} {t})");
                    }
                    (t, a)
                }
                None => self.comp(sc, depth),
            },
            3 => {
                let s = self.shape(sc);
                let bt = s.box_ty();
                match self.below(4) {
                    0 => (format!("(copy {})", s.arg()), format!("({bt} -> {bt})")),
                    1 => (format!("(mkapp {} {})", s.arg(), self.boxed(sc, &s, depth.saturating_sub(1))), format!("({bt} -> {bt})")),
                    2 => ("copy".into(), "((psi : tm_ctx) -> [psi |- tm] -> [psi |- tm])".into()),
                    _ => ("Tm".into(), "(tm_ctx -> U0)".into()),
                }
            }
            _ => {
                let s = self.shape(sc);
                (self.boxed(sc, &s, depth), s.box_ty())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_print() {
        assert_eq!(Shape::closed(0).arg(), ".");
        assert_eq!(Shape::open("psi", 0).arg(), "psi");
        assert_eq!(Shape::open("psi", 1).arg(), "(psi, z0 : tm)");
        assert_eq!(Shape::closed(2).box_ty(), "[z0 : tm, z1 : tm |- tm]");
    }

    #[test]
    fn generation_is_deterministic() {
        let sc = Scope::menu(3);
        let a = Gen::new(7).comp(&sc, 5);
        let b = Gen::new(7).comp(&sc, 5);
        assert_eq!(a, b);
    }
}
