//! Evidence streams: ingestion, sequential updating, trajectory logging,
//! rule comparison and resumable state.
//!
//! A stream is a JSON-Lines file, one record per line:
//!
//! ```text
//! {"k": 0, "boe": {"frame": [...], "focal": [...]}, "alpha": "fixed:0.5", "beta": "receptive"}
//! ```
//!
//! `alpha` and `beta` are optional per-step overrides. Indices must strictly
//! increase. Processing record `k` turns state `E_k` into `E_{k+1}`; samples
//! in a trajectory are labelled with the index of the state they describe.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Frame, Proposition};
use crate::io::{format_sig17, parse_beta_strategy, raw_boe_from_value, BoeOut, Sig17};
use crate::mass::MassFunction;
use crate::transform::zeta_transform;
use crate::updating::{init_prior, AlphaStrategy, BetaStrategy, PriorSpec, UpdateConfig};

/// Largest core whose masses are kept in full in a trajectory sample.
pub const SNAPSHOT_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct StreamRecord {
    pub k: u64,
    pub incoming: MassFunction,
    pub alpha: Option<AlphaStrategy>,
    pub beta: Option<BetaStrategy>,
}

impl StreamRecord {
    pub fn new(k: u64, incoming: MassFunction) -> Self {
        Self {
            k,
            incoming,
            alpha: None,
            beta: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordDoc {
    k: u64,
    boe: serde_json::Value,
    #[serde(default)]
    alpha: Option<String>,
    #[serde(default)]
    beta: Option<String>,
}

fn parse_error(line: usize, e: impl ToString) -> Error {
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

/// Parses JSONL stream text. Blank lines are ignored. Relative paths in
/// `explicit:` beta overrides resolve against `base_dir`.
pub fn parse_stream(text: &str, base_dir: Option<&Path>) -> Result<Vec<StreamRecord>> {
    let mut records: Vec<StreamRecord> = Vec::new();
    let mut frame: Option<Frame> = None;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let doc: RecordDoc = serde_json::from_str(line).map_err(|e| parse_error(line_no, e))?;
        let raw = raw_boe_from_value(doc.boe).map_err(|e| parse_error(line_no, e))?;
        match &frame {
            Some(f) if *f != raw.frame => {
                return Err(Error::FrameMismatch(format!(
                    "line {line_no} (k = {}): frame [{}] differs from stream frame [{}]",
                    doc.k,
                    raw.frame.labels().join(","),
                    f.labels().join(",")
                )))
            }
            Some(_) => {}
            None => frame = Some(raw.frame.clone()),
        }
        if let Some(prev) = records.last() {
            if doc.k <= prev.k {
                return Err(Error::NonMonotoneIndex {
                    line: line_no,
                    previous: prev.k,
                    k: doc.k,
                });
            }
        }
        let alpha = doc
            .alpha
            .map(|a| a.parse::<AlphaStrategy>())
            .transpose()
            .map_err(|e| parse_error(line_no, e))?;
        let beta = doc
            .beta
            .map(|b| parse_beta_strategy(&b, &raw.frame, base_dir))
            .transpose()
            .map_err(|e| parse_error(line_no, e))?;
        let incoming = raw.into_mass().map_err(|e| parse_error(line_no, e))?;
        records.push(StreamRecord {
            k: doc.k,
            incoming,
            alpha,
            beta,
        });
    }
    Ok(records)
}

pub fn load_stream(path: impl AsRef<Path>) -> Result<Vec<StreamRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_stream(&text, path.parent())
}

/// Observable summary of one state in a stream.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub k: u64,
    /// Full sparse masses when the core has at most [`SNAPSHOT_LIMIT`] elements.
    pub masses: Option<Vec<(Proposition, f64)>>,
    pub core_size: usize,
    pub ignorance: f64,
    pub pignistic: Vec<f64>,
    /// `Bl` of each singleton, in frame order.
    pub belief: Vec<f64>,
    /// `Pl` of each singleton, in frame order.
    pub plausibility: Vec<f64>,
    pub skipped: usize,
    pub degenerate: bool,
}

impl TrajectorySample {
    pub fn capture(k: u64, m: &MassFunction, skipped: usize, degenerate: bool) -> Self {
        let n = m.frame().len();
        let masses = (m.core_size() <= SNAPSHOT_LIMIT).then(|| m.iter().collect());
        Self {
            k,
            masses,
            core_size: m.core_size(),
            ignorance: m.ignorance(),
            pignistic: m.pignistic(),
            belief: (0..n).map(|i| m.mass(Proposition::singleton(i))).collect(),
            plausibility: (0..n)
                .map(|i| {
                    let s = Proposition::singleton(i);
                    m.iter()
                        .filter(|(p, _)| p.intersects(s))
                        .fold(0.0, |acc, (_, v)| acc + v)
                })
                .collect(),
            skipped,
            degenerate,
        }
    }
}

/// Saved pipeline position: the state `E_k` and its index `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineState {
    pub k: u64,
    pub boe: MassFunction,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDoc {
    k: u64,
    frame: Vec<String>,
    /// `[hex bit pattern, mass]` pairs.
    masses: Vec<(String, f64)>,
}

#[derive(Serialize)]
struct StateOut<'a> {
    k: u64,
    frame: &'a [String],
    masses: Vec<(String, Sig17)>,
}

impl PipelineState {
    /// Compact JSON: sets are written as hexadecimal bit patterns over the frame.
    pub fn to_json(&self) -> String {
        let out = StateOut {
            k: self.k,
            frame: self.boe.frame().labels(),
            masses: self
                .boe
                .iter()
                .map(|(p, v)| (format!("{:x}", p.bits()), Sig17(v)))
                .collect(),
        };
        serde_json::to_string(&out).expect("state serialization is infallible")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let doc: StateDoc = serde_json::from_str(json)?;
        let frame = Frame::new(doc.frame)?;
        let mut entries = Vec::with_capacity(doc.masses.len());
        for (hex, mass) in doc.masses {
            let bits = u32::from_str_radix(&hex, 16)
                .map_err(|e| parse_error(1, format!("bad set `{hex}`: {e}")))?;
            entries.push((Proposition::from_bits(bits), mass));
        }
        Ok(Self {
            k: doc.k,
            boe: MassFunction::new(frame, entries)?,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

/// One sequential consumer of a stream.
#[derive(Debug, Clone)]
pub struct Pipeline {
    config: UpdateConfig,
    state: PipelineState,
}

impl Pipeline {
    pub fn new(config: UpdateConfig, initial: MassFunction) -> Self {
        Self::resume(config, PipelineState { k: 0, boe: initial })
    }

    pub fn resume(config: UpdateConfig, state: PipelineState) -> Self {
        Self { config, state }
    }

    pub fn state(&self) -> &PipelineState {
        &self.state
    }

    pub fn config(&self) -> &UpdateConfig {
        &self.config
    }

    pub fn sample(&self) -> TrajectorySample {
        TrajectorySample::capture(self.state.k, &self.state.boe, 0, false)
    }

    /// Applies one record. Records older than the current state are rejected.
    pub fn push(&mut self, record: &StreamRecord) -> Result<TrajectorySample> {
        if record.k < self.state.k {
            return Err(Error::NonMonotoneIndex {
                line: 0,
                previous: self.state.k,
                k: record.k,
            });
        }
        let update = self
            .config
            .step_with(
                &self.state.boe,
                &record.incoming,
                record.k,
                record.alpha.as_ref(),
                record.beta.as_ref(),
            )
            .map_err(|e| e.at_step(record.k))?;
        self.state = PipelineState {
            k: record.k + 1,
            boe: update.boe,
        };
        Ok(TrajectorySample::capture(
            self.state.k,
            &self.state.boe,
            update.skipped.len(),
            update.degenerate,
        ))
    }

    /// Runs every record not yet consumed, returning the initial sample plus one per step.
    pub fn run(&mut self, records: &[StreamRecord]) -> Result<Vec<TrajectorySample>> {
        let mut samples = vec![self.sample()];
        let start = self.state.k;
        for record in records.iter().filter(|r| r.k >= start) {
            samples.push(self.push(record)?);
        }
        Ok(samples)
    }
}

#[derive(Debug, Clone)]
pub struct TrajectoryLog {
    pub frame: Frame,
    pub samples: Vec<TrajectorySample>,
    pub final_state: PipelineState,
}

impl TrajectoryLog {
    pub fn final_boe(&self) -> &MassFunction {
        &self.final_state.boe
    }

    /// CSV columns: `k, ignorance, core_size, skipped`, then `betp_<label>` for
    /// every singleton, then `bl_<label>, pl_<label>` pairs per singleton.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(csv_header(&self.frame))?;
        for s in &self.samples {
            let mut row = vec![
                s.k.to_string(),
                format_sig17(s.ignorance),
                s.core_size.to_string(),
                s.skipped.to_string(),
            ];
            row.extend(s.pignistic.iter().map(|&v| format_sig17(v)));
            for (bl, pl) in s.belief.iter().zip(&s.plausibility) {
                row.push(format_sig17(*bl));
                row.push(format_sig17(*pl));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&LogOut::new(self)).expect("log serialization is infallible")
    }
}

pub fn csv_header(frame: &Frame) -> Vec<String> {
    let mut header: Vec<String> = ["k", "ignorance", "core_size", "skipped"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(frame.labels().iter().map(|l| format!("betp_{l}")));
    for l in frame.labels() {
        header.push(format!("bl_{l}"));
        header.push(format!("pl_{l}"));
    }
    header
}

#[derive(Serialize)]
struct SampleOut<'a> {
    k: u64,
    ignorance: Sig17,
    core_size: usize,
    skipped: usize,
    degenerate: bool,
    pignistic: Vec<Sig17>,
    belief: Vec<Sig17>,
    plausibility: Vec<Sig17>,
    truncated: bool,
    masses: Option<BoeOut<'a>>,
}

impl<'a> SampleOut<'a> {
    fn new(frame: &'a Frame, s: &'a TrajectorySample) -> Self {
        let sig = |xs: &[f64]| xs.iter().map(|&v| Sig17(v)).collect();
        Self {
            k: s.k,
            ignorance: Sig17(s.ignorance),
            core_size: s.core_size,
            skipped: s.skipped,
            degenerate: s.degenerate,
            pignistic: sig(&s.pignistic),
            belief: sig(&s.belief),
            plausibility: sig(&s.plausibility),
            truncated: s.masses.is_none(),
            masses: s
                .masses
                .as_ref()
                .map(|m| BoeOut::from_entries(frame, m.iter().copied())),
        }
    }
}

#[derive(Serialize)]
struct LogOut<'a> {
    frame: &'a [String],
    samples: Vec<SampleOut<'a>>,
    #[serde(rename = "final")]
    final_boe: BoeOut<'a>,
}

impl<'a> LogOut<'a> {
    fn new(log: &'a TrajectoryLog) -> Self {
        Self {
            frame: log.frame.labels(),
            samples: log
                .samples
                .iter()
                .map(|s| SampleOut::new(&log.frame, s))
                .collect(),
            final_boe: BoeOut::new(log.final_boe()),
        }
    }
}

fn check_record_frames(frame: &Frame, records: &[StreamRecord]) -> Result<()> {
    for r in records {
        if r.incoming.frame() != frame {
            return Err(Error::FrameMismatch(format!(
                "record frame [{}] differs from pipeline frame [{}]",
                r.incoming.frame().labels().join(","),
                frame.labels().join(",")
            ))
            .at_step(r.k));
        }
    }
    Ok(())
}

/// Runs a fresh pipeline from `prior` over `records`.
pub fn run_stream(
    prior: &PriorSpec,
    frame: &Frame,
    records: &[StreamRecord],
    config: &UpdateConfig,
) -> Result<TrajectoryLog> {
    let initial = init_prior(prior, frame)?;
    run_from(PipelineState { k: 0, boe: initial }, records, config)
}

/// Runs a pipeline that starts from a saved state.
pub fn run_from(
    state: PipelineState,
    records: &[StreamRecord],
    config: &UpdateConfig,
) -> Result<TrajectoryLog> {
    let frame = state.boe.frame().clone();
    check_record_frames(&frame, records)?;
    let mut pipeline = Pipeline::resume(config.clone(), state);
    let samples = pipeline.run(records)?;
    Ok(TrajectoryLog {
        frame,
        samples,
        final_state: pipeline.state,
    })
}

#[derive(Debug, Clone)]
pub struct PairDivergence {
    pub first: usize,
    pub second: usize,
    /// Max absolute pignistic difference at each sample.
    pub per_step: Vec<f64>,
    /// Max absolute mass difference at each sample; `None` where a snapshot was truncated.
    pub per_step_mass: Vec<Option<f64>>,
    /// Max absolute mass difference between the final states.
    pub final_mass_diff: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub configs: Vec<UpdateConfig>,
    pub logs: Vec<TrajectoryLog>,
    pub pairs: Vec<PairDivergence>,
    /// Max over all pairs of the per-step pignistic divergence.
    pub max_divergence: Vec<f64>,
}

fn pignistic_gap(a: &TrajectorySample, b: &TrajectorySample) -> f64 {
    a.pignistic
        .iter()
        .zip(&b.pignistic)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn mass_gap(a: &MassFunction, b: &MassFunction) -> f64 {
    let keys: BTreeSet<Proposition> = a.core().chain(b.core()).collect();
    keys.into_iter()
        .map(|p| (a.mass(p) - b.mass(p)).abs())
        .fold(0.0, f64::max)
}

fn snapshot_gap(a: &TrajectorySample, b: &TrajectorySample) -> Option<f64> {
    let a: BTreeMap<Proposition, f64> = a.masses.as_ref()?.iter().copied().collect();
    let b: BTreeMap<Proposition, f64> = b.masses.as_ref()?.iter().copied().collect();
    let keys: BTreeSet<&Proposition> = a.keys().chain(b.keys()).collect();
    Some(keys.into_iter().fold(0.0, |acc, p| {
        let x = a.get(p).copied().unwrap_or(0.0);
        let y = b.get(p).copied().unwrap_or(0.0);
        acc.max((x - y).abs())
    }))
}

/// Runs every configuration on the same records, concurrently, and compares them.
pub fn compare_rules(
    prior: &PriorSpec,
    frame: &Frame,
    records: &[StreamRecord],
    configs: &[UpdateConfig],
) -> Result<ExperimentReport> {
    if configs.len() < 2 {
        return Err(Error::ConstraintViolation(
            "rule comparison needs at least two configurations".into(),
        ));
    }
    let initial = init_prior(prior, frame)?;
    let results: Vec<Result<TrajectoryLog>> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|cfg| {
                let state = PipelineState {
                    k: 0,
                    boe: initial.clone(),
                };
                scope.spawn(move || run_from(state, records, cfg))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("pipeline thread panicked"))
            .collect()
    });
    let logs = results.into_iter().collect::<Result<Vec<_>>>()?;

    let steps = logs[0].samples.len();
    let mut pairs = Vec::new();
    let mut max_divergence = vec![0.0f64; steps];
    for i in 0..logs.len() {
        for j in i + 1..logs.len() {
            let per_step: Vec<f64> = logs[i]
                .samples
                .iter()
                .zip(&logs[j].samples)
                .map(|(a, b)| pignistic_gap(a, b))
                .collect();
            for (m, d) in max_divergence.iter_mut().zip(&per_step) {
                *m = m.max(*d);
            }
            let per_step_mass = logs[i]
                .samples
                .iter()
                .zip(&logs[j].samples)
                .map(|(a, b)| snapshot_gap(a, b))
                .collect();
            pairs.push(PairDivergence {
                first: i,
                second: j,
                per_step_mass,
                final_mass_diff: mass_gap(logs[i].final_boe(), logs[j].final_boe()),
                per_step,
            });
        }
    }
    Ok(ExperimentReport {
        configs: configs.to_vec(),
        logs,
        pairs,
        max_divergence,
    })
}

#[derive(Serialize)]
struct ConfigOut {
    rule: String,
    alpha: String,
    beta: String,
    policy: String,
}

#[derive(Serialize)]
struct PairOut {
    first: usize,
    second: usize,
    pignistic_divergence: Vec<Sig17>,
    mass_divergence: Vec<Option<Sig17>>,
    final_mass_max_abs_diff: Sig17,
}

#[derive(Serialize)]
struct ReportOut<'a> {
    configs: Vec<ConfigOut>,
    steps: Vec<u64>,
    max_pignistic_divergence: Vec<Sig17>,
    pairs: Vec<PairOut>,
    #[serde(rename = "final")]
    final_boes: Vec<BoeOut<'a>>,
    trajectories: Vec<LogOut<'a>>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        let out = ReportOut {
            configs: self
                .configs
                .iter()
                .map(|c| ConfigOut {
                    rule: c.rule.to_string(),
                    alpha: c.alpha.to_string(),
                    beta: c.beta.to_string(),
                    policy: c.policy.to_string(),
                })
                .collect(),
            steps: self.logs[0].samples.iter().map(|s| s.k).collect(),
            max_pignistic_divergence: self.max_divergence.iter().map(|&v| Sig17(v)).collect(),
            pairs: self
                .pairs
                .iter()
                .map(|p| PairOut {
                    first: p.first,
                    second: p.second,
                    pignistic_divergence: p.per_step.iter().map(|&v| Sig17(v)).collect(),
                    mass_divergence: p.per_step_mass.iter().map(|v| v.map(Sig17)).collect(),
                    final_mass_max_abs_diff: Sig17(p.final_mass_diff),
                })
                .collect(),
            final_boes: self
                .logs
                .iter()
                .map(|l| BoeOut::new(l.final_boe()))
                .collect(),
            trajectories: self.logs.iter().map(LogOut::new).collect(),
        };
        serde_json::to_string(&out).expect("report serialization is infallible")
    }
}

/// Mass history of one proposition across a stream.
#[derive(Debug, Clone, PartialEq)]
pub struct PropositionTrend {
    pub proposition: Proposition,
    /// Mass in the first sample of the log.
    pub initial_mass: f64,
    /// Mass after each step; `None` where the sample was truncated.
    pub masses: Vec<Option<f64>>,
    /// Whether some conditioning event of that step contained the proposition.
    pub supported: Vec<bool>,
    pub non_increasing: bool,
    /// Never supported, non-increasing, and lower at the end than at the start.
    pub decay_candidate: bool,
}

/// Tracks every proposition that was ever focal and whether incoming
/// evidence offered an event containing it at each step.
pub fn unsupported_proposition_report(
    log: &TrajectoryLog,
    records: &[StreamRecord],
) -> Vec<PropositionTrend> {
    let by_k: BTreeMap<u64, &StreamRecord> = records.iter().map(|r| (r.k, r)).collect();
    let snapshots: Vec<Option<BTreeMap<Proposition, f64>>> = log
        .samples
        .iter()
        .map(|s| s.masses.as_ref().map(|m| m.iter().copied().collect()))
        .collect();
    let ever_focal: BTreeSet<Proposition> = snapshots
        .iter()
        .flatten()
        .flat_map(|m| m.keys().copied())
        .collect();
    let mass_at = |idx: usize, p: Proposition| -> Option<f64> {
        snapshots[idx]
            .as_ref()
            .map(|m| m.get(&p).copied().unwrap_or(0.0))
    };

    ever_focal
        .into_iter()
        .map(|p| {
            let initial_mass = mass_at(0, p).unwrap_or(f64::NAN);
            let mut masses = Vec::new();
            let mut supported = Vec::new();
            for (idx, s) in log.samples.iter().enumerate().skip(1) {
                masses.push(mass_at(idx, p));
                let contained =
                    s.k.checked_sub(1)
                        .and_then(|k| by_k.get(&k))
                        .is_some_and(|r| r.incoming.core().any(|a| p.is_subset_of(a)));
                supported.push(contained);
            }
            let known: Vec<f64> = std::iter::once(Some(initial_mass))
                .chain(masses.iter().copied())
                .flatten()
                .filter(|v| !v.is_nan())
                .collect();
            let non_increasing = known.windows(2).all(|w| w[1] <= w[0] + 1e-15);
            let decay_candidate = non_increasing
                && !supported.iter().any(|&s| s)
                && known.last().is_some_and(|&last| last < initial_mass);
            PropositionTrend {
                proposition: p,
                initial_mass,
                masses,
                supported,
                non_increasing,
                decay_candidate,
            }
        })
        .collect()
}

#[derive(Serialize)]
struct TrendOut {
    set: Vec<String>,
    initial_mass: Sig17,
    masses: Vec<Option<Sig17>>,
    supported: Vec<bool>,
    non_increasing: bool,
    decay_candidate: bool,
}

pub fn trends_to_json(frame: &Frame, trends: &[PropositionTrend]) -> String {
    let out: Vec<TrendOut> = trends
        .iter()
        .map(|t| TrendOut {
            set: frame
                .labels_of(t.proposition)
                .iter()
                .map(|s| s.to_string())
                .collect(),
            initial_mass: Sig17(t.initial_mass),
            masses: t.masses.iter().map(|m| m.map(Sig17)).collect(),
            supported: t.supported.clone(),
            non_increasing: t.non_increasing,
            decay_candidate: t.decay_candidate,
        })
        .collect();
    serde_json::to_string(&out).expect("trend serialization is infallible")
}

/// `Bl` and `Pl` of every singleton, via the dense transform.
pub fn singleton_bounds(m: &MassFunction) -> Result<(Vec<f64>, Vec<f64>)> {
    let t = zeta_transform(m)?;
    let n = m.frame().len();
    Ok((0..n)
        .map(|i| {
            let s = Proposition::singleton(i);
            (t.belief(s), t.plausibility(s))
        })
        .unzip())
}
