//! Evidence updating: the generalized conditional update (GCU), the
//! conditional update equation (CUE), and a plain Bayes baseline.
//!
//! Both update rules have the form
//!
//! ```text
//! Bl_{k+1}(B) = α_k Bl_k(B) + Σ_{A ∈ F*_k} β_k(A) Bl(B | A)
//! ```
//!
//! GCU conditions the current body of evidence on the events offered by the
//! incoming one; CUE conditions the incoming body of evidence on its own focal
//! elements. Since the Möbius transform is linear, the same combination is
//! carried out directly on masses, which keeps the cores sparse.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::conditioning::conditional_mass_from_table;
use crate::error::{Error, Result};
use crate::frame::{Frame, Proposition};
use crate::mass::MassFunction;
use crate::tol;
use crate::transform::zeta_transform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UpdateRule {
    Gcu,
    Cue,
    /// Bayes conditioning on a single certain event; Bayesian BoEs only.
    BayesBaseline,
}

impl FromStr for UpdateRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gcu" => Ok(Self::Gcu),
            "cue" => Ok(Self::Cue),
            "bayes" | "bayes_baseline" | "bayes-baseline" => Ok(Self::BayesBaseline),
            _ => Err(Error::InvalidStrategy(s.to_string())),
        }
    }
}

impl fmt::Display for UpdateRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gcu => "gcu",
            Self::Cue => "cue",
            Self::BayesBaseline => "bayes",
        })
    }
}

/// How much weight `α_k` the existing knowledge base keeps at step `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaStrategy {
    Fixed(f64),
    /// `α = 1`: the knowledge base never moves.
    InfiniteInertia,
    /// `α = 0`: full commitment to incoming evidence.
    ZeroInertia,
    /// `α_k = k / (k + 1)`.
    ProportionalInertia,
}

impl AlphaStrategy {
    pub fn resolve(&self, k: u64) -> f64 {
        match *self {
            Self::Fixed(a) => a,
            Self::InfiniteInertia => 1.0,
            Self::ZeroInertia => 0.0,
            Self::ProportionalInertia => k as f64 / (k as f64 + 1.0),
        }
    }
}

impl FromStr for AlphaStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "zero" => return Ok(Self::ZeroInertia),
            "infinite" => return Ok(Self::InfiniteInertia),
            "proportional" => return Ok(Self::ProportionalInertia),
            _ => {}
        }
        let value = s
            .strip_prefix("fixed:")
            .and_then(|v| v.trim().parse::<f64>().ok())
            .ok_or_else(|| Error::InvalidStrategy(s.to_string()))?;
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidStrategy(format!(
                "{s} (alpha must lie in [0, 1])"
            )));
        }
        Ok(Self::Fixed(value))
    }
}

impl fmt::Display for AlphaStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fixed(a) => write!(f, "fixed:{a}"),
            Self::InfiniteInertia => f.write_str("infinite"),
            Self::ZeroInertia => f.write_str("zero"),
            Self::ProportionalInertia => f.write_str("proportional"),
        }
    }
}

/// Per-event weights `β_k(A)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BetaWeights(BTreeMap<Proposition, f64>);

impl BetaWeights {
    pub fn new(weights: BTreeMap<Proposition, f64>) -> Self {
        Self(weights)
    }

    pub fn get(&self, a: Proposition) -> f64 {
        self.0.get(&a).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Proposition, f64)> + '_ {
        self.0.iter().map(|(&a, &w)| (a, w))
    }

    pub fn total(&self) -> f64 {
        self.0.values().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(Proposition, f64)> for BetaWeights {
    fn from_iter<I: IntoIterator<Item = (Proposition, f64)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BetaStrategy {
    /// `β(A) ∝ m*(A)` over the incoming core.
    Receptive,
    /// `β(A) ∝ m_k(A)` over events offered by both bodies of evidence.
    Cautious,
    Explicit(BetaWeights),
}

impl BetaStrategy {
    /// Resolves weights so that `α + Σβ = 1`.
    pub fn resolve(
        &self,
        alpha: f64,
        current: &MassFunction,
        incoming: &MassFunction,
    ) -> Result<BetaWeights> {
        check_alpha(alpha)?;
        current.frame().check_same(incoming.frame())?;
        let budget = 1.0 - alpha;
        let weights = match self {
            Self::Receptive => proportional(budget, incoming.iter()),
            Self::Cautious => {
                let shared: Vec<(Proposition, f64)> = incoming
                    .core()
                    .filter(|&a| current.is_focal(a))
                    .map(|a| (a, current.mass(a)))
                    .collect();
                if shared.is_empty() {
                    if budget > tol::WEIGHT_SUM {
                        return Err(Error::EmptyEventSet);
                    }
                    BetaWeights::default()
                } else {
                    proportional(budget, shared.into_iter())
                }
            }
            Self::Explicit(w) => w.clone(),
        };
        check_weights(alpha, &weights, incoming)?;
        Ok(weights)
    }
}

fn proportional(budget: f64, support: impl Iterator<Item = (Proposition, f64)>) -> BetaWeights {
    let support: Vec<_> = support.collect();
    let total: f64 = support.iter().map(|(_, m)| m).sum();
    if budget <= 0.0 {
        return BetaWeights::default();
    }
    support
        .into_iter()
        .map(|(a, m)| (a, budget * m / total))
        .collect()
}

impl fmt::Display for BetaStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Receptive => "receptive",
            Self::Cautious => "cautious",
            Self::Explicit(_) => "explicit",
        })
    }
}

/// What the GCU does with a weighted event whose current belief is zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum DegenerateEventPolicy {
    /// Drop the event and rescale `α` and the surviving `β` to sum to one.
    #[default]
    SkipAndRenormalize,
    Error,
}

impl FromStr for DegenerateEventPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "skip" => Ok(Self::SkipAndRenormalize),
            "error" => Ok(Self::Error),
            other => Err(Error::InvalidStrategy(other.to_string())),
        }
    }
}

impl fmt::Display for DegenerateEventPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SkipAndRenormalize => "skip",
            Self::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PriorSpec {
    Vacuous,
    Uniform,
    /// `m(θ_i) = (1 − γ)/n`, `m(Θ) = γ`.
    Dirichlet(f64),
    Explicit(MassFunction),
}

impl FromStr for PriorSpec {
    type Err = Error;

    /// Parses `vacuous`, `uniform` or `dirichlet:<gamma>`. Explicit priors
    /// come from a BoE file and are built by the caller.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "vacuous" => Ok(Self::Vacuous),
            "uniform" => Ok(Self::Uniform),
            _ => {
                let gamma = s
                    .strip_prefix("dirichlet:")
                    .and_then(|g| g.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidStrategy(s.to_string()))?;
                Ok(Self::Dirichlet(gamma))
            }
        }
    }
}

pub fn init_prior(spec: &PriorSpec, frame: &Frame) -> Result<MassFunction> {
    let n = frame.len();
    match spec {
        PriorSpec::Vacuous => Ok(MassFunction::vacuous(frame)),
        PriorSpec::Uniform => MassFunction::new(
            frame.clone(),
            (0..n).map(|i| (Proposition::singleton(i), 1.0 / n as f64)),
        ),
        PriorSpec::Dirichlet(gamma) => {
            let gamma = *gamma;
            if !(gamma > 0.0 && gamma < 1.0) {
                return Err(Error::InvalidGamma(gamma));
            }
            if n == 1 {
                // Θ is the only singleton; the two shares land on the same set.
                return Ok(MassFunction::vacuous(frame));
            }
            let share = (1.0 - gamma) / n as f64;
            MassFunction::new(
                frame.clone(),
                (0..n)
                    .map(|i| (Proposition::singleton(i), share))
                    .chain(std::iter::once((frame.full(), gamma))),
            )
        }
        PriorSpec::Explicit(m) => {
            frame.check_same(m.frame())?;
            Ok(m.clone())
        }
    }
}

/// Result of one update step.
#[derive(Debug, Clone, PartialEq)]
pub struct Update {
    pub boe: MassFunction,
    /// Weighted events dropped because the current belief in them was zero.
    pub skipped: Vec<Proposition>,
    /// Every weighted event was skipped and `α = 0`; the state was left as is.
    pub degenerate: bool,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::ConstraintViolation(format!(
            "alpha {alpha} outside [0, 1]"
        )))
    }
}

fn check_weights(alpha: f64, beta: &BetaWeights, incoming: &MassFunction) -> Result<()> {
    check_alpha(alpha)?;
    let frame = incoming.frame();
    for (a, w) in beta.iter() {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::ConstraintViolation(format!(
                "beta({}) = {w} is negative or not finite",
                frame.display(a)
            )));
        }
        if !incoming.is_focal(a) {
            return Err(Error::ConstraintViolation(format!(
                "beta assigns weight to {}, which is not an incoming focal element",
                frame.display(a)
            )));
        }
    }
    let sum = alpha + beta.total();
    if (sum - 1.0).abs() > tol::WEIGHT_SUM {
        return Err(Error::ConstraintViolation(format!(
            "alpha + sum(beta) = {sum}, expected 1"
        )));
    }
    Ok(())
}

fn accumulate(acc: &mut BTreeMap<Proposition, f64>, m: &MassFunction, weight: f64) {
    for (p, v) in m.iter() {
        *acc.entry(p).or_insert(0.0) += weight * v;
    }
}

/// One GCU step: `m_{k+1} = α m_k + Σ_A β(A) m_k(·|A)`.
pub fn gcu_update(
    current: &MassFunction,
    incoming: &MassFunction,
    alpha: f64,
    beta: &BetaWeights,
    policy: DegenerateEventPolicy,
) -> Result<Update> {
    current.frame().check_same(incoming.frame())?;
    check_weights(alpha, beta, incoming)?;
    let frame = current.frame();
    let table = zeta_transform(current)?;

    let mut events = Vec::new();
    let mut skipped = Vec::new();
    for (a, w) in beta.iter().filter(|&(_, w)| w > 0.0) {
        if table.belief(a) > 0.0 {
            events.push((a, w));
            continue;
        }
        match policy {
            DegenerateEventPolicy::SkipAndRenormalize => {
                log::warn!(
                    "skipping conditioning event {} with zero belief",
                    frame.display(a)
                );
                skipped.push(a);
            }
            DegenerateEventPolicy::Error => {
                return Err(Error::ZeroBeliefEvent {
                    event: frame.display(a),
                })
            }
        }
    }

    let kept = alpha + events.iter().map(|(_, w)| w).sum::<f64>();
    if !(kept > 0.0) {
        return Ok(Update {
            boe: current.clone(),
            skipped,
            degenerate: true,
        });
    }
    // Conditioning on Θ is the identity, so its weight joins α.
    let full = frame.full();
    let keep = alpha
        + events
            .iter()
            .filter(|(a, _)| *a == full)
            .map(|(_, w)| w)
            .sum::<f64>();
    events.retain(|(a, _)| *a != full);
    if events.is_empty() {
        return Ok(Update {
            boe: current.clone(),
            skipped,
            degenerate: false,
        });
    }
    let scale = if skipped.is_empty() { 1.0 } else { 1.0 / kept };

    let mut acc = BTreeMap::new();
    if keep > 0.0 {
        accumulate(&mut acc, current, keep * scale);
    }
    for (a, w) in events {
        let cond = conditional_mass_from_table(current, &table, a)?;
        accumulate(&mut acc, &cond, w * scale);
    }
    Ok(Update {
        boe: MassFunction::from_mixture(frame.clone(), acc),
        skipped,
        degenerate: false,
    })
}

/// One CUE step: `m_{k+1} = α m_k + Σ_A β(A) m*_k(·|A)`.
///
/// Every `A ∈ F*_k` has `Bl*(A) ≥ m*(A) > 0`, so no degenerate events arise.
pub fn cue_update(
    current: &MassFunction,
    incoming: &MassFunction,
    alpha: f64,
    beta: &BetaWeights,
) -> Result<Update> {
    current.frame().check_same(incoming.frame())?;
    check_weights(alpha, beta, incoming)?;
    let table = zeta_transform(incoming)?;
    let mut acc = BTreeMap::new();
    if alpha > 0.0 {
        accumulate(&mut acc, current, alpha);
    }
    for (a, w) in beta.iter().filter(|&(_, w)| w > 0.0) {
        let cond = conditional_mass_from_table(incoming, &table, a)?;
        accumulate(&mut acc, &cond, w);
    }
    Ok(Update {
        boe: MassFunction::from_mixture(current.frame().clone(), acc),
        skipped: Vec::new(),
        degenerate: false,
    })
}

/// Bayes conditioning `P(θ|A) = P(θ ∩ A)/P(A)` for a Bayesian BoE and an
/// incoming BoE that is a single certain event `{A: 1}`.
pub fn bayes_update(current: &MassFunction, incoming: &MassFunction) -> Result<Update> {
    current.frame().check_same(incoming.frame())?;
    if !current.is_bayesian() {
        return Err(Error::BaselineInapplicable(
            "current body of evidence is not Bayesian".into(),
        ));
    }
    let mut core = incoming.core();
    let event = match (core.next(), core.next()) {
        (Some(a), None) => a,
        _ => {
            return Err(Error::BaselineInapplicable(
                "incoming evidence must be a single certain event".into(),
            ))
        }
    };
    let frame = current.frame();
    let p_event = current.belief(event)?;
    if !(p_event > 0.0) {
        return Err(Error::ZeroBeliefEvent {
            event: frame.display(event),
        });
    }
    let acc = current
        .iter()
        .filter(|(p, _)| p.is_subset_of(event))
        .map(|(p, v)| (p, v / p_event))
        .collect();
    Ok(Update {
        boe: MassFunction::from_mixture(frame.clone(), acc),
        skipped: Vec::new(),
        degenerate: false,
    })
}

/// Rule selector plus parameter strategies for a pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateConfig {
    pub rule: UpdateRule,
    pub alpha: AlphaStrategy,
    pub beta: BetaStrategy,
    pub policy: DegenerateEventPolicy,
}

impl Default for UpdateConfig {
    fn default() -> Self {
        Self {
            rule: UpdateRule::Gcu,
            alpha: AlphaStrategy::ZeroInertia,
            beta: BetaStrategy::Receptive,
            policy: DegenerateEventPolicy::SkipAndRenormalize,
        }
    }
}

impl UpdateConfig {
    /// Resolves the strategies for step `k` and applies the selected rule.
    pub fn step(&self, current: &MassFunction, incoming: &MassFunction, k: u64) -> Result<Update> {
        self.step_with(current, incoming, k, None, None)
    }

    pub fn step_with(
        &self,
        current: &MassFunction,
        incoming: &MassFunction,
        k: u64,
        alpha_override: Option<&AlphaStrategy>,
        beta_override: Option<&BetaStrategy>,
    ) -> Result<Update> {
        if self.rule == UpdateRule::BayesBaseline {
            return bayes_update(current, incoming);
        }
        let alpha = alpha_override.unwrap_or(&self.alpha).resolve(k);
        let beta = beta_override
            .unwrap_or(&self.beta)
            .resolve(alpha, current, incoming)?;
        match self.rule {
            UpdateRule::Gcu => gcu_update(current, incoming, alpha, &beta, self.policy),
            UpdateRule::Cue => cue_update(current, incoming, alpha, &beta),
            UpdateRule::BayesBaseline => unreachable!(),
        }
    }
}
