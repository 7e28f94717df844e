//! Mass functions (basic probability assignments) and the quantities read
//! directly off their focal elements.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frame::{Frame, Proposition};
use crate::tol;
use crate::transform::{subset_sums, zeta_transform};

/// A single problem found while checking an assignment.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Mass placed on the empty proposition.
    EmptySetMass { mass: f64 },
    /// Zero, negative or non-finite mass on a focal entry.
    NonPositiveMass { set: Proposition, mass: f64 },
    /// The same proposition listed twice.
    DuplicateFocal { set: Proposition },
    /// Proposition uses bits beyond the frame.
    OutsideFrame { set: Proposition },
    /// Total mass differs from one by more than the tolerance.
    SumMismatch { sum: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub total_mass: f64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn describe(&self, frame: &Frame) -> Vec<String> {
        self.violations
            .iter()
            .map(|v| match v {
                Violation::EmptySetMass { mass } => {
                    format!("mass {mass} assigned to the empty set")
                }
                Violation::NonPositiveMass { set, mass } => {
                    format!("non-positive mass {mass} on {}", frame.display(*set))
                }
                Violation::DuplicateFocal { set } => {
                    format!(
                        "focal element {} listed more than once",
                        frame.display(*set)
                    )
                }
                Violation::OutsideFrame { set } => {
                    format!("proposition {:#x} lies outside the frame", set.bits())
                }
                Violation::SumMismatch { sum } => {
                    format!(
                        "masses sum to {sum}, expected 1 (tolerance {})",
                        tol::MASS_SUM
                    )
                }
            })
            .collect()
    }
}

/// Checks raw `(proposition, mass)` pairs against the BPA axioms and reports
/// every violation found.
pub fn validate_assignments(frame: &Frame, entries: &[(Proposition, f64)]) -> ValidationReport {
    let mut violations = Vec::new();
    let mut seen = std::collections::HashSet::with_capacity(entries.len());
    let mut total = 0.0;
    for &(set, mass) in entries {
        total += mass;
        if !frame.contains(set) {
            violations.push(Violation::OutsideFrame { set });
            continue;
        }
        if set.is_empty() {
            violations.push(Violation::EmptySetMass { mass });
            continue;
        }
        if !seen.insert(set) {
            violations.push(Violation::DuplicateFocal { set });
        }
        if !(mass > 0.0 && mass.is_finite()) {
            violations.push(Violation::NonPositiveMass { set, mass });
        }
    }
    if !((total - 1.0).abs() <= tol::MASS_SUM) {
        violations.push(Violation::SumMismatch { sum: total });
    }
    ValidationReport {
        total_mass: total,
        violations,
    }
}

/// Sparse body of evidence: the frame plus its focal elements and masses.
///
/// Construction validates the BPA axioms; every stored mass is strictly
/// positive and the key set is exactly the core.
#[derive(Clone, PartialEq)]
pub struct MassFunction {
    frame: Frame,
    masses: BTreeMap<Proposition, f64>,
}

impl MassFunction {
    pub fn new<I>(frame: Frame, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Proposition, f64)>,
    {
        let entries: Vec<(Proposition, f64)> = entries.into_iter().collect();
        let report = validate_assignments(&frame, &entries);
        if !report.is_valid() {
            return Err(Error::InvalidBpa(report.describe(&frame).join("; ")));
        }
        Ok(Self {
            frame,
            masses: entries.into_iter().collect(),
        })
    }

    /// Builds from entries produced by internal arithmetic: entries at or
    /// below `tol::SUPPORT` are dropped; no renormalization happens.
    pub(crate) fn from_computed(frame: Frame, masses: BTreeMap<Proposition, f64>) -> Self {
        let masses = masses
            .into_iter()
            .filter(|&(p, v)| !p.is_empty() && v > tol::SUPPORT)
            .collect();
        Self { frame, masses }
    }

    /// Builds from a non-negative combination of valid BPAs; keeps every
    /// strictly positive entry as is.
    pub(crate) fn from_mixture(frame: Frame, masses: BTreeMap<Proposition, f64>) -> Self {
        let masses = masses
            .into_iter()
            .filter(|&(p, v)| !p.is_empty() && v > 0.0)
            .collect();
        Self { frame, masses }
    }

    /// Convenience constructor from label lists.
    pub fn from_labels<S: AsRef<str>>(frame: Frame, entries: &[(&[S], f64)]) -> Result<Self> {
        let mut pairs = Vec::with_capacity(entries.len());
        for (labels, mass) in entries {
            pairs.push((frame.proposition(labels.iter().map(AsRef::as_ref))?, *mass));
        }
        Self::new(frame, pairs)
    }

    /// The vacuous body of evidence `m(Θ) = 1`.
    pub fn vacuous(frame: &Frame) -> Self {
        let mut masses = BTreeMap::new();
        masses.insert(frame.full(), 1.0);
        Self {
            frame: frame.clone(),
            masses,
        }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn mass(&self, p: Proposition) -> f64 {
        self.masses.get(&p).copied().unwrap_or(0.0)
    }

    /// Focal elements with their masses, in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (Proposition, f64)> + '_ {
        self.masses.iter().map(|(&p, &m)| (p, m))
    }

    /// The core: all focal elements.
    pub fn core(&self) -> impl Iterator<Item = Proposition> + '_ {
        self.masses.keys().copied()
    }

    pub fn core_size(&self) -> usize {
        self.masses.len()
    }

    pub fn is_focal(&self, p: Proposition) -> bool {
        self.masses.contains_key(&p)
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.values().sum()
    }

    /// Re-runs the BPA checks on the stored assignment.
    pub fn validate(&self) -> ValidationReport {
        let entries: Vec<_> = self.iter().collect();
        validate_assignments(&self.frame, &entries)
    }

    /// Mass on `Θ`, used as the ignorance indicator.
    pub fn ignorance(&self) -> f64 {
        self.mass(self.frame.full())
    }

    pub fn is_vacuous(&self) -> bool {
        self.masses.len() == 1 && self.is_focal(self.frame.full())
    }

    pub fn is_bayesian(&self) -> bool {
        self.masses.keys().all(|p| p.is_singleton())
    }

    /// `Bl(B) = Σ_{C ⊆ B} m(C)`, evaluated over the sparse core.
    pub fn belief(&self, b: Proposition) -> Result<f64> {
        self.frame.check_contains(b)?;
        Ok(self
            .iter()
            .filter(|(c, _)| c.is_subset_of(b))
            .fold(0.0, |acc, (_, m)| acc + m))
    }

    /// `Pl(B) = 1 − Bl(B̄)`, computed as the mass of focal elements meeting `B`.
    pub fn plausibility(&self, b: Proposition) -> Result<f64> {
        self.frame.check_contains(b)?;
        Ok(self
            .iter()
            .filter(|(c, _)| c.intersects(b))
            .fold(0.0, |acc, (_, m)| acc + m))
    }

    /// Pignistic probabilities `BetP(θ_i) = Σ_{θ_i ∈ B} m(B)/|B|`, indexed by singleton.
    pub fn pignistic(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.frame.len()];
        for (set, mass) in self.iter() {
            let share = mass / set.len() as f64;
            for i in set.indices() {
                p[i] += share;
            }
        }
        p
    }

    /// Checks `Bl(B) ≤ Pr(B) ≤ Pl(B)` on every subset, extending `p` additively.
    pub fn is_compatible(&self, p: &[f64]) -> Result<bool> {
        if p.len() != self.frame.len() {
            return Err(Error::FrameMismatch(format!(
                "distribution has {} entries for a frame of {}",
                p.len(),
                self.frame.len()
            )));
        }
        let bl = zeta_transform(self)?;
        let mut pr = vec![0.0; self.frame.power_set_size()];
        for (i, &v) in p.iter().enumerate() {
            pr[1 << i] = v;
        }
        subset_sums(&mut pr);
        let full = self.frame.full();
        Ok(full.subsets().all(|b| {
            let lo = bl.belief(b);
            let hi = 1.0 - bl.belief(self.frame.complement(b));
            let v = pr[b.index()];
            lo <= v + tol::COMPATIBILITY && v <= hi + tol::COMPATIBILITY
        }))
    }
}

impl fmt::Debug for MassFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (p, m) in self.iter() {
            map.entry(&self.frame.display(p), &m);
        }
        map.finish()
    }
}

/// Seeded random BoE: between 1 and `max_focal` focal sets drawn uniformly
/// without replacement from the non-empty subsets, masses uniform on the simplex.
pub fn random_boe(frame: &Frame, max_focal: usize, seed: u64) -> MassFunction {
    let universe = frame.power_set_size() - 1;
    let max_focal = max_focal.clamp(1, universe);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.random_range(1..=max_focal);
    let sets = index::sample(&mut rng, universe, count);
    // Normalized unit exponentials are uniform on the simplex.
    let weights: Vec<f64> = (0..count)
        .map(|_| {
            let u: f64 = rng.random();
            -(1.0 - u).ln() + f64::MIN_POSITIVE
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let masses = sets
        .iter()
        .zip(&weights)
        .map(|(s, w)| (Proposition::from_bits(s as u32 + 1), w / total))
        .collect();
    MassFunction {
        frame: frame.clone(),
        masses,
    }
}
