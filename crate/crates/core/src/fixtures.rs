//! Reference bodies of evidence used by tests and the CLI demos.

use crate::frame::{Frame, Proposition};
use crate::mass::MassFunction;

/// `Θ = {a..i}` with `m = {a: .1, b: .1, h: .1, df: .2, beg: .2, Θ: .3}`.
pub fn example4() -> MassFunction {
    let frame = Frame::new(["a", "b", "c", "d", "e", "f", "g", "h", "i"]).unwrap();
    let p = |s: &str| frame.proposition(s.chars().map(|c| c.to_string())).unwrap();
    let entries = vec![
        (p("a"), 0.1),
        (p("b"), 0.1),
        (p("h"), 0.1),
        (p("df"), 0.2),
        (p("beg"), 0.2),
        (frame.full(), 0.3),
    ];
    MassFunction::new(frame, entries).unwrap()
}

/// Candidate frame `{c1, ..., cn}`.
pub fn candidates(n: usize) -> Frame {
    Frame::new((1..=n).map(|i| format!("c{i}"))).unwrap()
}

/// Uniform Bayesian BoE over `{c1, ..., cn}`.
pub fn uniform(n: usize) -> MassFunction {
    let frame = candidates(n);
    let share = 1.0 / n as f64;
    MassFunction::new(frame, (0..n).map(|i| (Proposition::singleton(i), share))).unwrap()
}
