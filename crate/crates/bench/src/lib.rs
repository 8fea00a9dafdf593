//! Shared fixtures for the benchmarks.

use ctxtt::{Kernel, Session, Status};

/// Source defining `copy` and closed terms `d0 .. dn`, where `d(i+1)`
/// applies `di` to itself, so `dn` has `2^n` leaves.
pub fn doubling_source(n: usize) -> String {
    let mut src = String::from(ctxtt::harness::gen::PRELUDE);
    src.push_str("def d0 : [. |- tm] = [. |- lam \\x. x]\n");
    for i in 1..=n {
        src.push_str(&format!("def d{i} : [. |- tm] = [. |- app d{} d{}]\n", i - 1, i - 1));
    }
    src
}

/// A session with the definitions of [`doubling_source`] loaded.
pub fn doubling_session(n: usize) -> Session {
    let mut s = Session::new(Kernel::new());
    let r = s.run(&doubling_source(n), false);
    assert_eq!(r.status, Status::Ok, "{:?}", r.diagnostics);
    s
}
