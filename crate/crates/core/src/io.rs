//! JSON file formats and numeric formatting.
//!
//! BoE files look like
//!
//! ```json
//! {"frame": ["a", "b", "c"], "focal": [{"set": ["a", "b"], "mass": 0.2}, {"set": ["a", "b", "c"], "mass": 0.8}]}
//! ```
//!
//! Sets are label lists; order inside a set does not matter and repeated
//! labels are rejected. Floating-point output uses 17 significant digits.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::frame::{Frame, Proposition};
use crate::mass::{validate_assignments, MassFunction, ValidationReport};
use crate::updating::{BetaStrategy, BetaWeights};

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros dropped.
pub fn format_sig17(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Serializes an `f64` as a JSON number with 17 significant digits.
#[derive(Debug, Clone, Copy)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let raw = RawValue::from_string(format_sig17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoeDoc {
    frame: Vec<String>,
    focal: Vec<FocalDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FocalDoc {
    set: Vec<String>,
    mass: f64,
}

/// A parsed but not yet validated BoE file.
#[derive(Debug, Clone)]
pub struct RawBoe {
    pub frame: Frame,
    pub entries: Vec<(Proposition, f64)>,
}

impl RawBoe {
    pub fn validate(&self) -> ValidationReport {
        validate_assignments(&self.frame, &self.entries)
    }

    pub fn into_mass(self) -> Result<MassFunction> {
        MassFunction::new(self.frame, self.entries)
    }

    fn from_doc(doc: BoeDoc) -> Result<Self> {
        let frame = Frame::new(doc.frame)?;
        let entries = doc
            .focal
            .into_iter()
            .map(|f| Ok((frame.proposition(&f.set)?, f.mass)))
            .collect::<Result<_>>()?;
        Ok(Self { frame, entries })
    }
}

pub fn parse_raw_boe(json: &str) -> Result<RawBoe> {
    let doc: BoeDoc = serde_json::from_str(json)?;
    RawBoe::from_doc(doc)
}

pub(crate) fn raw_boe_from_value(value: serde_json::Value) -> Result<RawBoe> {
    let doc: BoeDoc = serde_json::from_value(value)?;
    RawBoe::from_doc(doc)
}

pub fn parse_boe(json: &str) -> Result<MassFunction> {
    parse_raw_boe(json)?.into_mass()
}

pub fn read_raw_boe(path: impl AsRef<Path>) -> Result<RawBoe> {
    parse_raw_boe(&fs::read_to_string(path)?)
}

pub fn read_boe(path: impl AsRef<Path>) -> Result<MassFunction> {
    read_raw_boe(path)?.into_mass()
}

#[derive(Serialize)]
pub(crate) struct FocalOut<'a> {
    set: Vec<&'a str>,
    mass: Sig17,
}

/// Serializable view of a mass function in the BoE file layout.
#[derive(Serialize)]
pub struct BoeOut<'a> {
    frame: &'a [String],
    focal: Vec<FocalOut<'a>>,
}

impl<'a> BoeOut<'a> {
    pub fn new(m: &'a MassFunction) -> Self {
        Self::from_entries(m.frame(), m.iter())
    }

    pub(crate) fn from_entries(
        frame: &'a Frame,
        entries: impl Iterator<Item = (Proposition, f64)>,
    ) -> Self {
        Self {
            frame: frame.labels(),
            focal: entries
                .map(|(p, v)| FocalOut {
                    set: frame.labels_of(p),
                    mass: Sig17(v),
                })
                .collect(),
        }
    }
}

pub fn boe_to_json(m: &MassFunction) -> String {
    serde_json::to_string(&BoeOut::new(m)).expect("BoE serialization is infallible")
}

pub fn write_boe(path: impl AsRef<Path>, m: &MassFunction) -> Result<()> {
    fs::write(path, boe_to_json(m) + "\n")?;
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightDoc {
    set: Vec<String>,
    weight: f64,
}

/// Reads an explicit β mapping: `[{"set": ["a", "b"], "weight": 0.75}, ...]`.
pub fn read_beta_weights(path: impl AsRef<Path>, frame: &Frame) -> Result<BetaWeights> {
    let docs: Vec<WeightDoc> = serde_json::from_str(&fs::read_to_string(path)?)?;
    let mut weights = BTreeMap::new();
    for d in docs {
        let p = frame.proposition(&d.set)?;
        if weights.insert(p, d.weight).is_some() {
            return Err(Error::ConstraintViolation(format!(
                "beta mapping lists {} twice",
                frame.display(p)
            )));
        }
    }
    Ok(BetaWeights::new(weights))
}

/// Parses `receptive`, `cautious` or `explicit:<path>`; relative paths are
/// resolved against `base_dir`.
pub fn parse_beta_strategy(
    s: &str,
    frame: &Frame,
    base_dir: Option<&Path>,
) -> Result<BetaStrategy> {
    match s.trim() {
        "receptive" => Ok(BetaStrategy::Receptive),
        "cautious" => Ok(BetaStrategy::Cautious),
        other => {
            let path = other
                .strip_prefix("explicit:")
                .ok_or_else(|| Error::InvalidStrategy(other.to_string()))?;
            let path = Path::new(path);
            let path = match base_dir {
                Some(dir) if path.is_relative() => dir.join(path),
                _ => path.to_path_buf(),
            };
            Ok(BetaStrategy::Explicit(read_beta_weights(path, frame)?))
        }
    }
}
