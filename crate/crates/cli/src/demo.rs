//! Narrated walk-throughs of the built-in examples.

use std::fmt::Write;

use clap::ValueEnum;
use gcu_core::fixtures::{example4, uniform};
use gcu_core::io::format_sig17;
use gcu_core::{
    cct_decompose, fh_conditional_mass, AlphaStrategy, BetaStrategy, MassFunction, UpdateConfig,
    UpdateRule,
};

#[derive(Clone, Copy, ValueEnum)]
pub enum Demo {
    Mvp1,
    Mvp2,
    Mvp3,
    Cct,
}

fn masses(out: &mut String, title: &str, m: &MassFunction) {
    writeln!(out, "{title}:").unwrap();
    for (p, v) in m.iter() {
        writeln!(out, "  m({}) = {}", m.frame().display(p), format_sig17(v)).unwrap();
    }
}

fn pignistic(out: &mut String, m: &MassFunction) {
    writeln!(out, "pignistic probabilities:").unwrap();
    for (label, v) in m.frame().labels().iter().zip(m.pignistic()) {
        writeln!(out, "  BetP({label}) = {}", format_sig17(v)).unwrap();
    }
}

pub fn run(demo: Demo) -> anyhow::Result<String> {
    match demo {
        Demo::Mvp1 => mvp(
            "MVP poll: c1 and c2 are out for the season, so the poll is conditioned on A = {c3,c4,c5} with certainty.",
            &[("c3,c4,c5", 1.0)],
            UpdateRule::BayesBaseline,
            AlphaStrategy::ZeroInertia,
            "P_{k+1}(c_i) = P_k(c_i ∩ A) / P_k(A)",
        ),
        Demo::Mvp2 => mvp(
            "MVP poll v.2: an analyst believes with 75% confidence that c1 and c2 will not return.",
            &[("c3,c4,c5", 1.0)],
            UpdateRule::Gcu,
            AlphaStrategy::Fixed(0.25),
            "Bl_{k+1}(B) = α Bl_k(B) + β(A) Bl_k(B|A), α = 0.25, β(A) = 0.75",
        ),
        Demo::Mvp3 => mvp(
            "MVP poll v.3: A1 = {c3,c4,c5} (c1 and c2 do not return) with 90% chance, otherwise A2 = {c1,c2}.",
            &[("c3,c4,c5", 0.9), ("c1,c2", 0.1)],
            UpdateRule::Gcu,
            AlphaStrategy::ZeroInertia,
            "Bl_{k+1}(B) = β(A1) Bl_k(B|A1) + β(A2) Bl_k(B|A2), β(A1) = 0.9, β(A2) = 0.1",
        ),
        Demo::Cct => cct(),
    }
}

fn mvp(
    story: &str,
    events: &[(&str, f64)],
    rule: UpdateRule,
    alpha: AlphaStrategy,
    formula: &str,
) -> anyhow::Result<String> {
    let prior = uniform(5);
    let frame = prior.frame().clone();
    let entries = events
        .iter()
        .map(|(labels, v)| Ok((frame.parse_proposition(labels)?, *v)))
        .collect::<gcu_core::Result<Vec<_>>>()?;
    let incoming = MassFunction::new(frame, entries)?;
    let config = UpdateConfig {
        rule,
        alpha,
        beta: BetaStrategy::Receptive,
        ..UpdateConfig::default()
    };
    let updated = config.step(&prior, &incoming, 0)?.boe;

    let mut out = String::new();
    writeln!(out, "{story}").unwrap();
    writeln!(
        out,
        "The example gives no numeric poll, so the prior is uniform over c1..c5;"
    )
    .unwrap();
    writeln!(out, "every number below is derived from that assumption.").unwrap();
    writeln!(out).unwrap();
    masses(&mut out, "prior", &prior);
    masses(&mut out, "incoming evidence", &incoming);
    writeln!(out, "rule: {rule}, alpha: {alpha}, beta: receptive").unwrap();
    writeln!(out, "formula: {formula}").unwrap();
    writeln!(out).unwrap();
    masses(&mut out, "updated", &updated);
    pignistic(&mut out, &updated);
    Ok(out)
}

fn cct() -> anyhow::Result<String> {
    let m = example4();
    let frame = m.frame();
    let a = frame.parse_proposition("a,b,c,d,e")?;
    let d = cct_decompose(&m, a)?;
    let cond = fh_conditional_mass(&m, a)?;

    let mut out = String::new();
    writeln!(
        out,
        "Conditional core of a nine-element frame, A = {}.",
        frame.display(a)
    )
    .unwrap();
    writeln!(out).unwrap();
    masses(&mut out, "body of evidence", &m);
    writeln!(out).unwrap();
    writeln!(out, "in(A)={}", frame.display_set(&d.inner)).unwrap();
    writeln!(out, "out(A)={}", frame.display_set(&d.outer)).unwrap();
    writeln!(out, "IN(A)={}", frame.display_set(&d.inner_unions)).unwrap();
    writeln!(out, "OUT(A)={}", frame.display_set(&d.outer_unions)).unwrap();
    let core: Vec<_> = cond.core().collect();
    writeln!(
        out,
        "conditional core ({} elements)={}",
        core.len(),
        frame.display_set(&core)
    )
    .unwrap();
    writeln!(
        out,
        "each element is X ∪ Y with X in in(A) and Y in OUT(A) or empty"
    )
    .unwrap();
    writeln!(out).unwrap();
    masses(
        &mut out,
        "conditional masses m(B|A), via Möbius inversion of Bl(B|A)",
        &cond,
    );
    Ok(out)
}
