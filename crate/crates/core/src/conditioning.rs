//! Fagin-Halpern conditioning and the conditional core.
//!
//! For an event `A` with `Bl(A) > 0`:
//!
//! ```text
//! Bl(B|A) = Bl(A∩B) / (Bl(A∩B) + Pl(A∩B̄))
//! Pl(B|A) = Pl(A∩B) / (Pl(A∩B) + Bl(A∩B̄))
//! ```
//!
//! The conditional mass is the Möbius inverse of `Bl(·|A)`. Its support is
//! also available combinatorially: a proposition carries conditional mass iff
//! it is `X ∪ Y` with `X` a focal element inside `A` and `Y` either empty or a
//! union of `A`-traces of focal elements that straddle `A` and `Ā`.
//! [`conditional_core_cct`] computes that set without any transform, which
//! gives an independent check on [`fh_conditional_mass`].

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::frame::{Frame, Proposition};
use crate::mass::MassFunction;
use crate::transform::{collect_masses, inverse_subset_sums, zeta_transform, BeliefTable};

/// An event with positive belief, the precondition for FH conditioning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditioningEvent {
    pub event: Proposition,
    pub belief_in_event: f64,
}

impl ConditioningEvent {
    pub fn new(t: &BeliefTable, event: Proposition) -> Result<Self> {
        t.frame().check_contains(event)?;
        let belief_in_event = t.belief(event);
        if belief_in_event > 0.0 {
            Ok(Self {
                event,
                belief_in_event,
            })
        } else {
            Err(zero_belief(t.frame(), event))
        }
    }
}

fn zero_belief(frame: &Frame, event: Proposition) -> Error {
    Error::ZeroBeliefEvent {
        event: frame.display(event),
    }
}

/// `Bl(B|A)` under Fagin-Halpern conditioning.
pub fn fh_conditional_belief(t: &BeliefTable, a: Proposition, b: Proposition) -> Result<f64> {
    let ev = ConditioningEvent::new(t, a)?;
    t.frame().check_contains(b)?;
    Ok(conditional_belief_unchecked(t, ev.event, b))
}

/// `Pl(B|A)` under Fagin-Halpern conditioning.
pub fn fh_conditional_plausibility(t: &BeliefTable, a: Proposition, b: Proposition) -> Result<f64> {
    let ev = ConditioningEvent::new(t, a)?;
    t.frame().check_contains(b)?;
    let inside = ev.event.intersection(b);
    let outside = ev.event.difference(b);
    let pl = t.plausibility(inside);
    Ok(pl / (pl + t.belief(outside)))
}

// Caller guarantees Bl(a) > 0, which keeps the denominator positive: every
// focal element inside `a` is inside a∩b or meets a∖b.
fn conditional_belief_unchecked(t: &BeliefTable, a: Proposition, b: Proposition) -> f64 {
    let inside = a.intersection(b);
    let bl = t.belief(inside);
    let denom = bl + t.plausibility(a.difference(b));
    debug_assert!(denom > 0.0, "FH denominator vanished");
    bl / denom
}

/// Dense `Bl(·|A)` over the whole power set.
pub fn fh_conditional_table(t: &BeliefTable, a: Proposition) -> Result<BeliefTable> {
    let ev = ConditioningEvent::new(t, a)?;
    let values = (0..t.frame().power_set_size())
        .map(|i| conditional_belief_unchecked(t, ev.event, Proposition::from_bits(i as u32)))
        .collect();
    BeliefTable::from_values(t.frame().clone(), values)
}

/// Conditional mass `m(·|A)`: the Möbius inverse of `Bl(·|A)`.
pub fn fh_conditional_mass(m: &MassFunction, a: Proposition) -> Result<MassFunction> {
    let t = zeta_transform(m)?;
    conditional_mass_from_table(m, &t, a)
}

/// Same as [`fh_conditional_mass`] with a precomputed `Bl` table for `m`.
pub(crate) fn conditional_mass_from_table(
    m: &MassFunction,
    t: &BeliefTable,
    a: Proposition,
) -> Result<MassFunction> {
    let ev = ConditioningEvent::new(t, a)?;
    let frame = m.frame();
    if ev.event == frame.full() {
        return Ok(m.clone());
    }
    // Every conditional focal element lies inside A, and Bl(B|A) only
    // depends on A∩B, so the inversion runs over the 2^|A| subsets of A.
    let size = 1usize << a.len();
    let mut local = Vec::with_capacity(size);
    let mut sub = 0u32;
    for _ in 0..size {
        local.push(conditional_belief_unchecked(
            t,
            a,
            Proposition::from_bits(sub),
        ));
        sub = sub.wrapping_sub(a.bits()) & a.bits();
    }
    inverse_subset_sums(&mut local);
    let out = collect_masses(frame, &local, |j| deposit(j as u32, a))?;
    // The union closure gets expensive on large cores; check small ones only.
    debug_assert!(
        m.core_size() > 64
            || out.core().collect::<BTreeSet<_>>()
                == conditional_core_cct(m, a).unwrap_or_default(),
        "conditional support disagrees with the conditional core theorem"
    );
    Ok(out)
}

/// Scatters the low bits of `j` onto the set bits of `mask`.
fn deposit(mut j: u32, mask: Proposition) -> Proposition {
    let mut out = 0u32;
    let mut rest = mask.bits();
    while j != 0 && rest != 0 {
        let low = rest & rest.wrapping_neg();
        if j & 1 != 0 {
            out |= low;
        }
        j >>= 1;
        rest ^= low;
    }
    Proposition::from_bits(out)
}

/// Building blocks of the conditional core for one event `A`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CctDecomposition {
    /// `in(A)`: focal elements contained in `A`.
    pub inner: BTreeSet<Proposition>,
    /// `out(A)`: `C ∩ A` for focal `C` meeting both `A` and `Ā`.
    pub outer: BTreeSet<Proposition>,
    /// `IN(A)`: non-empty unions of `in(A)` members. Diagnostic only.
    pub inner_unions: BTreeSet<Proposition>,
    /// `OUT(A)`: non-empty unions of `out(A)` members.
    pub outer_unions: BTreeSet<Proposition>,
}

pub fn cct_decompose(m: &MassFunction, a: Proposition) -> Result<CctDecomposition> {
    m.frame().check_contains(a)?;
    let mut inner = BTreeSet::new();
    let mut outer = BTreeSet::new();
    for c in m.core() {
        if c.is_subset_of(a) {
            inner.insert(c);
        } else if c.intersects(a) {
            outer.insert(c.intersection(a));
        }
    }
    Ok(CctDecomposition {
        inner_unions: union_closure(&inner),
        outer_unions: union_closure(&outer),
        inner,
        outer,
    })
}

/// All non-empty unions of members of `gens`.
fn union_closure(gens: &BTreeSet<Proposition>) -> BTreeSet<Proposition> {
    let mut closed: BTreeSet<Proposition> = BTreeSet::new();
    for &g in gens {
        let grown: Vec<Proposition> = closed.iter().map(|&c| c.union(g)).collect();
        closed.insert(g);
        closed.extend(grown);
    }
    closed
}

/// Conditional core `{X ∪ Y : X ∈ in(A), Y ∈ OUT(A) ∪ {∅}}`, no transforms involved.
pub fn conditional_core_cct(m: &MassFunction, a: Proposition) -> Result<BTreeSet<Proposition>> {
    let d = cct_decompose(m, a)?;
    if d.inner.is_empty() {
        return Err(zero_belief(m.frame(), a));
    }
    let mut core = d.inner.clone();
    for &x in &d.inner {
        core.extend(d.outer_unions.iter().map(|&y| x.union(y)));
    }
    Ok(core)
}
