//! Runs source files: checks definitions and executes directives.

use serde::Serialize;

use crate::error::KernelError;
use crate::reduce::{Definition, Kernel};
use crate::syntax::{CompCtx, CompTerm, LfCtx, Name};

use super::parser::{Item, ItemKind, ParseError, Parser};
use super::print;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Info,
}

/// One message about an item, in the machine-readable report format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: [usize; 2],
    pub judgment: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actual: Option<String>,
}

impl Diagnostic {
    fn info(span: (usize, usize), judgment: &str, message: String) -> Diagnostic {
        Diagnostic { severity: Severity::Info, span: [span.0, span.1], judgment: judgment.into(), message, expected: None, actual: None }
    }

    fn error(span: (usize, usize), judgment: &str, message: String) -> Diagnostic {
        Diagnostic { severity: Severity::Error, span: [span.0, span.1], judgment: judgment.into(), message, expected: None, actual: None }
    }

    fn from_parse(e: &ParseError) -> Diagnostic {
        Diagnostic::error(e.span, "syntax", e.message.clone())
    }

    fn from_kernel(span: (usize, usize), e: &KernelError) -> Diagnostic {
        match e {
            KernelError::Type(t) => Diagnostic {
                severity: Severity::Error,
                span: [span.0, span.1],
                judgment: t.judgment.tag().into(),
                message: format!("{:?}: {}", t.kind, t.message),
                expected: t.expected.clone(),
                actual: t.actual.clone(),
            },
            KernelError::FuelExhausted(_) => Diagnostic::error(span, "whnf", format!("FuelExhausted: {e}")),
            e => Diagnostic::error(span, "internal", e.to_string()),
        }
    }

    /// Renders the diagnostic for a terminal, with a line and column.
    pub fn render(&self, file: &str, src: &str) -> String {
        let (line, col) = line_col(src, self.span[0]);
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Info => "info",
        };
        let mut s = format!("{file}:{line}:{col}: {sev} [{}] {}", self.judgment, self.message);
        if let Some(e) = &self.expected {
            s.push_str(&format!("\n  expected: {e}"));
        }
        if let Some(a) = &self.actual {
            s.push_str(&format!("\n  actual:   {a}"));
        }
        s
    }
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.chars().count(), |i| before[i + 1..].chars().count()) + 1;
    (line, col)
}

/// How a run ended, ordered by severity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    CheckFailed,
    /// Fuel exhaustion or a kernel invariant violation.
    Resource,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::CheckFailed => 1,
            Status::Resource => 2,
        }
    }

    fn of(e: &KernelError) -> Status {
        if e.is_internal() {
            Status::Resource
        } else {
            Status::CheckFailed
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub diagnostics: Vec<Diagnostic>,
    pub status: Status,
}

/// Definitions accumulated over a run.
pub struct Session {
    pub kernel: Kernel,
    globals: Vec<Name>,
}

impl Session {
    pub fn new(kernel: Kernel) -> Session {
        Session { kernel, globals: Vec::new() }
    }

    pub fn globals(&self) -> &[Name] {
        &self.globals
    }

    /// Looks up a definition by name.
    pub fn global(&self, name: &str) -> Option<CompTerm> {
        self.globals.iter().rposition(|g| g.as_str() == name).map(|i| CompTerm::Global(i, Name::new(name)))
    }

    /// Parses a closed term against the definitions of this session.
    pub fn parse(&self, src: &str) -> Result<CompTerm, ParseError> {
        self.parse_in(src, &[])
    }

    /// Parses a term under computation names (leftmost first).
    pub fn parse_in(&self, src: &str, names: &[Name]) -> Result<CompTerm, ParseError> {
        Parser::with_scope(src, names, &self.globals)?.term_eof()
    }

    pub fn parse_ctx_in(&self, src: &str, names: &[Name]) -> Result<LfCtx, ParseError> {
        Parser::with_scope(src, names, &self.globals)?.ctx_eof()
    }

    /// Runs every item of `src`. Without `keep_going` the run stops at the
    /// first failing item.
    pub fn run(&mut self, src: &str, keep_going: bool) -> Report {
        let mut diagnostics = Vec::new();
        let mut status = Status::Ok;
        let mut parser = match Parser::new(src) {
            Ok(p) => p,
            Err(e) => {
                return Report { diagnostics: vec![Diagnostic::from_parse(&e)], status: Status::CheckFailed };
            }
        };
        while let Some(item) = parser.next_item(&self.globals) {
            let outcome = match item {
                Ok(item) => self.run_item(&item),
                Err(e) => {
                    parser.recover();
                    Err((Diagnostic::from_parse(&e), Status::CheckFailed))
                }
            };
            match outcome {
                Ok(Some(d)) => diagnostics.push(d),
                Ok(None) => {}
                Err((d, s)) => {
                    diagnostics.push(d);
                    status = status.max(s);
                    if !keep_going {
                        break;
                    }
                }
            }
        }
        Report { diagnostics, status }
    }

    #[allow(clippy::result_large_err)]
    fn run_item(&mut self, item: &Item) -> Result<Option<Diagnostic>, (Diagnostic, Status)> {
        let fail = |e: KernelError| (Diagnostic::from_kernel(item.span, &e), Status::of(&e));
        let k = &self.kernel;
        k.reset_fuel();
        let g = CompCtx::new();
        match &item.kind {
            ItemKind::Def { name, ty, body } => {
                if self.globals.iter().any(|g| g.as_str() == name.as_str()) {
                    return Err((
                        Diagnostic::error(item.span, "syntax", format!("`{name}` is already defined")),
                        Status::CheckFailed,
                    ));
                }
                k.infer_sort(&g, ty).map_err(fail)?;
                k.check_comp(&g, body, ty).map_err(fail)?;
                self.kernel.push_def(Definition { name: name.clone(), ty: ty.clone(), body: body.clone() });
                self.globals.push(name.clone());
                Ok(None)
            }
            ItemKind::Check { term, ty } => {
                k.check_closed(term, ty).map_err(fail)?;
                Ok(None)
            }
            ItemKind::Eval { term } => {
                let ty = k.infer_comp(&g, term).map_err(fail)?;
                let v = k.whnf_comp(term).map_err(fail)?;
                let msg = format!("{} : {}", print::comp(&v), print::comp(&ty));
                Ok(Some(Diagnostic::info(item.span, "eval", msg)))
            }
            ItemKind::AssertConv { lhs, rhs, ty } => {
                k.check_closed(lhs, ty).map_err(fail)?;
                k.check_closed(rhs, ty).map_err(fail)?;
                if k.conv_comp(&g, lhs, rhs, ty).map_err(fail)? {
                    Ok(None)
                } else {
                    let mut d = Diagnostic::error(item.span, "conversion", "terms are not convertible".into());
                    d.expected = Some(print::comp(lhs));
                    d.actual = Some(print::comp(rhs));
                    Err((d, Status::CheckFailed))
                }
            }
            ItemKind::FailCheck { term, ty } => match k.check_closed(term, ty) {
                Ok(()) => Err((
                    Diagnostic::error(item.span, "Gamma |- t : tau", "term was expected to be rejected".into()),
                    Status::CheckFailed,
                )),
                Err(KernelError::Type(_)) => Ok(None),
                Err(e) => Err(fail(e)),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(src: &str) -> Report {
        Session::new(Kernel::new()).run(src, true)
    }

    #[test]
    fn definitions_are_visible_later() {
        let r = run("def t : U2 = U1\n#check U0 : t\n#eval t");
        assert_eq!(r.status, Status::Ok, "{r:?}");
        assert_eq!(r.diagnostics.len(), 1);
        assert_eq!(r.diagnostics[0].message, "U1 : U2");
    }

    #[test]
    fn failures_and_keep_going() {
        let src = "#check U0 : U0\n#check U1 : U2\n#fail_check U0 : U0\n#fail_check U0 : U1";
        let r = run(src);
        assert_eq!(r.status, Status::CheckFailed);
        assert_eq!(r.diagnostics.len(), 2);
        let r = Session::new(Kernel::new()).run(src, false);
        assert_eq!(r.diagnostics.len(), 1);
        assert_eq!(r.diagnostics[0].span, [0, 14]);
    }

    #[test]
    fn syntax_errors_recover() {
        let r = run("#check ) : U1\n#check U0 : U1\n#check U0 : U0");
        assert_eq!(r.status, Status::CheckFailed);
        assert_eq!(r.diagnostics.len(), 2);
        assert_eq!(r.diagnostics[0].judgment, "syntax");
    }

    #[test]
    fn fuel_is_a_resource_error() {
        let mut s = Session::new(Kernel::with_fuel(0));
        let r = s.run("def t : U1 = U0\n#eval t", true);
        assert_eq!(r.status, Status::Resource);
        assert_eq!(r.diagnostics[0].judgment, "whnf");
    }

    #[test]
    fn json_shape() {
        let r = run("#check U0 : U0");
        let v = serde_json::to_value(&r.diagnostics[0]).unwrap();
        assert_eq!(v["severity"], "error");
        assert_eq!(v["span"], serde_json::json!([0, 14]));
        assert!(v["judgment"].is_string());
        assert_eq!(v["expected"], "U0");
    }

    #[test]
    fn line_columns() {
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
        assert_eq!(line_col("ab", 0), (1, 1));
    }
}
