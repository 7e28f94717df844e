//! Dense belief tables and the fast subset-sum (zeta) and Möbius transforms
//! between them and sparse mass functions.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::frame::{Frame, Proposition};
use crate::mass::MassFunction;
use crate::tol;

/// In-place subset sums: `xs[B] ← Σ_{C ⊆ B} xs[C]`. `xs.len()` must be a power of two.
pub fn subset_sums(xs: &mut [f64]) {
    let n = xs.len();
    debug_assert!(n.is_power_of_two());
    let mut bit = 1;
    while bit < n {
        for block in xs.chunks_exact_mut(bit * 2) {
            let (lo, hi) = block.split_at_mut(bit);
            for (h, l) in hi.iter_mut().zip(lo.iter()) {
                *h += *l;
            }
        }
        bit <<= 1;
    }
}

/// Inverse of [`subset_sums`]: `xs[B] ← Σ_{C ⊆ B} (−1)^{|B∖C|} xs[C]`.
pub fn inverse_subset_sums(xs: &mut [f64]) {
    let n = xs.len();
    debug_assert!(n.is_power_of_two());
    let mut bit = 1;
    while bit < n {
        for block in xs.chunks_exact_mut(bit * 2) {
            let (lo, hi) = block.split_at_mut(bit);
            for (h, l) in hi.iter_mut().zip(lo.iter()) {
                *h -= *l;
            }
        }
        bit <<= 1;
    }
}

/// `Bl(B)` for every `B ⊆ Θ`, indexed by the proposition's bit pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct BeliefTable {
    frame: Frame,
    values: Vec<f64>,
}

impl BeliefTable {
    /// Wraps raw values. Length must be `2^n`; no belief-function check is made.
    pub fn from_values(frame: Frame, values: Vec<f64>) -> Result<Self> {
        if values.len() != frame.power_set_size() {
            return Err(Error::FrameMismatch(format!(
                "belief table has {} entries, frame needs {}",
                values.len(),
                frame.power_set_size()
            )));
        }
        Ok(Self { frame, values })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn belief(&self, b: Proposition) -> f64 {
        self.values[b.index()]
    }

    pub fn plausibility(&self, b: Proposition) -> f64 {
        if b.is_empty() {
            return 0.0;
        }
        1.0 - self.values[self.frame.complement(b).index()]
    }

    /// Propositions with positive belief (`F̂`).
    pub fn positive_belief(&self) -> impl Iterator<Item = Proposition> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(|(i, _)| Proposition::from_bits(i as u32))
    }
}

/// Bulk `Bl` over the power set via the `n·2^n` subset-sum transform.
pub fn zeta_transform(m: &MassFunction) -> Result<BeliefTable> {
    let frame = m.frame().clone();
    let mut values = vec![0.0; frame.power_set_size()];
    for (p, v) in m.iter() {
        values[p.index()] = v;
    }
    subset_sums(&mut values);
    Ok(BeliefTable { frame, values })
}

/// Recovers the mass function behind a belief table.
///
/// Recovered masses in `[−1e-9, 0)` are treated as rounding noise: clamped
/// to zero, after which the result is renormalized. Anything more negative
/// means the table is not a belief function.
pub fn mobius_inversion(t: &BeliefTable) -> Result<MassFunction> {
    let mut values = t.values.clone();
    inverse_subset_sums(&mut values);
    collect_masses(&t.frame, &values, |i| Proposition::from_bits(i as u32))
}

/// Shared tail of Möbius inversion: checks for negative mass, clamps noise,
/// drops empty/zero entries and renormalizes. `map` turns a local table
/// index into the proposition it stands for.
pub(crate) fn collect_masses(
    frame: &Frame,
    values: &[f64],
    map: impl Fn(usize) -> Proposition,
) -> Result<MassFunction> {
    let mut masses = BTreeMap::new();
    let mut total = 0.0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < -tol::NEGATIVE_CLAMP {
            return Err(Error::NotABeliefFunction {
                set: frame.display(map(i)),
                mass: v,
            });
        }
        if v > tol::SUPPORT {
            masses.insert(map(i), v);
            total += v;
        }
    }
    if values[0].abs() > tol::NEGATIVE_CLAMP {
        return Err(Error::NotABeliefFunction {
            set: frame.display(Proposition::EMPTY),
            mass: values[0],
        });
    }
    if !(total > 0.0) {
        return Err(Error::InvalidBpa("table carries no positive mass".into()));
    }
    if (total - 1.0).abs() > tol::MASS_SUM {
        return Err(Error::InvalidBpa(format!(
            "recovered masses sum to {total}"
        )));
    }
    for v in masses.values_mut() {
        *v /= total;
    }
    Ok(MassFunction::from_computed(frame.clone(), masses))
}
