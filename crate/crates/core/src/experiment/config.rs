//! Protocol parameters and their TOML representation.
//!
//! Every section of the file is optional; anything left out keeps the
//! standard protocol's value. Amplitudes are real and may be written as
//! numbers, fractions (`"1/3"`) or square roots of non-negative rationals
//! (`"sqrt:1/3"`, `"-sqrt:1/2"`). See `configs/default.toml` for the full
//! schema.

use super::time::TimePoint;
use serde::{Deserialize, Deserializer, Serialize};
use std::path::Path;
use thiserror::Error;

/// Tolerance for normalization and orthonormality checks on config input.
pub const CONFIG_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{field}`: {constraint}")]
    Validation { field: String, constraint: String },
}

impl ConfigError {
    fn invalid(field: &str, constraint: impl Into<String>) -> Self {
        ConfigError::Validation {
            field: field.to_owned(),
            constraint: constraint.into(),
        }
    }
}

/// A two-vector basis of a qubit, given as real components in the
/// subsystem's label order. `first` is recorded as level 0 of the lab that
/// holds the result, `second` as level 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisPair {
    pub first: [f64; 2],
    pub second: [f64; 2],
}

/// Which interval each measurement belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TimeLabels {
    pub fbar_measures: TimePoint,
    pub f_measures: TimePoint,
    pub wbar_measures: TimePoint,
    pub w_measures: TimePoint,
}

impl Default for TimeLabels {
    fn default() -> Self {
        Self {
            fbar_measures: TimePoint::T1,
            f_measures: TimePoint::T2,
            wbar_measures: TimePoint::T3,
            w_measures: TimePoint::T3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    /// Amplitude of |heads⟩ in R's initial state.
    pub a_heads: f64,
    /// Amplitude of |tails⟩ in R's initial state.
    pub a_tails: f64,
    /// S state prepared by F̄ for heads / tails, components over (up, down).
    pub spin_prep: [[f64; 2]; 2],
    /// F's basis over (up, down); `first` = "down" (z = −½), `second` = "up".
    pub f_basis: BasisPair,
    /// W̄'s basis over (hbar, tbar); `first` = okbar, `second` = failsbar.
    pub wbar_basis: BasisPair,
    /// W's basis over (minus, plus); `first` = ok, `second` = fails.
    pub w_basis: BasisPair,
    pub time_labels: TimeLabels,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        let h = 0.5f64.sqrt();
        Self {
            a_heads: (1.0f64 / 3.0).sqrt(),
            a_tails: (2.0f64 / 3.0).sqrt(),
            spin_prep: [[0.0, 1.0], [h, h]],
            f_basis: BasisPair {
                first: [0.0, 1.0],
                second: [1.0, 0.0],
            },
            wbar_basis: BasisPair {
                first: [h, -h],
                second: [h, h],
            },
            w_basis: BasisPair {
                first: [h, -h],
                second: [h, h],
            },
            time_labels: TimeLabels::default(),
        }
    }
}

fn rotation(angle: f64) -> BasisPair {
    let (s, c) = angle.sin_cos();
    BasisPair {
        first: [c, s],
        second: [-s, c],
    }
}

impl ProtocolConfig {
    /// Config with every amplitude set by an angle: R's state is
    /// `cos θ|heads⟩ + sin θ|tails⟩`, each prepared spin is
    /// `cos φ|up⟩ + sin φ|down⟩`, and each basis is a rotation by its angle.
    /// Used to generate random valid protocols.
    pub fn from_angles(
        coin: f64,
        prep_heads: f64,
        prep_tails: f64,
        f_basis: f64,
        wbar_basis: f64,
        w_basis: f64,
    ) -> Self {
        let (sh, ch) = prep_heads.sin_cos();
        let (st, ct) = prep_tails.sin_cos();
        Self {
            a_heads: coin.cos(),
            a_tails: coin.sin(),
            spin_prep: [[ch, sh], [ct, st]],
            f_basis: rotation(f_basis),
            wbar_basis: rotation(wbar_basis),
            w_basis: rotation(w_basis),
            time_labels: TimeLabels::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let n = self.a_heads.powi(2) + self.a_tails.powi(2);
        if !n.is_finite() || (n - 1.0).abs() > CONFIG_TOLERANCE {
            return Err(ConfigError::invalid(
                "initial",
                format!("normalization: heads² + tails² = {n}, expected 1"),
            ));
        }
        for (name, v) in [
            ("spin_prep.heads", self.spin_prep[0]),
            ("spin_prep.tails", self.spin_prep[1]),
        ] {
            let n = v[0].powi(2) + v[1].powi(2);
            if !n.is_finite() || (n - 1.0).abs() > CONFIG_TOLERANCE {
                return Err(ConfigError::invalid(
                    name,
                    format!("normalization: squared norm {n}, expected 1"),
                ));
            }
        }
        for (name, b) in [
            ("bases.f", self.f_basis),
            ("bases.wbar", self.wbar_basis),
            ("bases.w", self.w_basis),
        ] {
            check_orthonormal(name, &b)?;
        }
        let t = &self.time_labels;
        if t.fbar_measures == TimePoint::T0
            || t.fbar_measures > t.f_measures
            || t.f_measures > t.wbar_measures
            || t.wbar_measures > t.w_measures
        {
            return Err(ConfigError::invalid(
                "time_labels",
                "measurements must be scheduled after t0 in protocol order (fbar ≤ f ≤ wbar ≤ w)",
            ));
        }
        Ok(())
    }

    /// Reads and validates a TOML config.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map(|s| line_col(text, s.start)).unwrap_or((0, 0));
            ConfigError::Parse {
                line,
                column,
                message: e.message().to_owned(),
            }
        })?;
        let cfg = raw.into_config();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }
}

fn check_orthonormal(name: &str, b: &BasisPair) -> Result<(), ConfigError> {
    let dot = |u: [f64; 2], v: [f64; 2]| u[0] * v[0] + u[1] * v[1];
    for (which, v) in [("first", b.first), ("second", b.second)] {
        let n = dot(v, v);
        if !n.is_finite() || (n - 1.0).abs() > CONFIG_TOLERANCE {
            return Err(ConfigError::invalid(
                name,
                format!("basis vector `{which}` has squared norm {n}, expected 1"),
            ));
        }
    }
    let overlap = dot(b.first, b.second);
    if overlap.abs() > CONFIG_TOLERANCE {
        return Err(ConfigError::invalid(
            name,
            format!("basis is not orthonormal: vectors overlap (inner product {overlap})"),
        ));
    }
    Ok(())
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses `"sqrt:p/q"`, `"-sqrt:x"`, `"p/q"` or a plain decimal. Rationals
/// are reduced to `p / q` before the square root is taken.
pub fn parse_amplitude(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim_start()),
        None => (1.0, s.strip_prefix('+').unwrap_or(s)),
    };
    let (root, body) = match body.strip_prefix("sqrt:") {
        Some(rest) => (true, rest.trim()),
        None => (false, body),
    };
    let value = parse_rational(body)?;
    if root {
        if value < 0.0 {
            return Err(format!("cannot take sqrt of negative value in `{s}`"));
        }
        Ok(sign * value.sqrt())
    } else {
        Ok(sign * value)
    }
}

fn parse_rational(s: &str) -> Result<f64, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{s}` is not a number or fraction"))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (num(p)?, num(q)?);
            if q == 0.0 {
                return Err(format!("zero denominator in `{s}`"));
            }
            Ok(p / q)
        }
        None => num(s),
    }
}

#[derive(Debug, Clone, Copy)]
struct Amplitude(f64);

impl<'de> Deserialize<'de> for Amplitude {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Float(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(i) => Ok(Amplitude(i as f64)),
            Repr::Float(f) => Ok(Amplitude(f)),
            Repr::Text(t) => parse_amplitude(&t).map(Amplitude).map_err(serde::de::Error::custom),
        }
    }
}

fn pair(v: [Amplitude; 2]) -> [f64; 2] {
    [v[0].0, v[1].0]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    initial: Option<RawInitial>,
    spin_prep: Option<RawSpinPrep>,
    bases: Option<RawBases>,
    time_labels: Option<TimeLabels>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    heads: Amplitude,
    tails: Amplitude,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpinPrep {
    heads: [Amplitude; 2],
    tails: [Amplitude; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBases {
    f: Option<RawFBasis>,
    wbar: Option<RawWBarBasis>,
    w: Option<RawWBasis>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFBasis {
    down: [Amplitude; 2],
    up: [Amplitude; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWBarBasis {
    okbar: [Amplitude; 2],
    failsbar: [Amplitude; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWBasis {
    ok: [Amplitude; 2],
    fails: [Amplitude; 2],
}

impl RawConfig {
    fn into_config(self) -> ProtocolConfig {
        let mut cfg = ProtocolConfig::default();
        if let Some(i) = self.initial {
            cfg.a_heads = i.heads.0;
            cfg.a_tails = i.tails.0;
        }
        if let Some(p) = self.spin_prep {
            cfg.spin_prep = [pair(p.heads), pair(p.tails)];
        }
        if let Some(b) = self.bases {
            if let Some(f) = b.f {
                cfg.f_basis = BasisPair {
                    first: pair(f.down),
                    second: pair(f.up),
                };
            }
            if let Some(w) = b.wbar {
                cfg.wbar_basis = BasisPair {
                    first: pair(w.okbar),
                    second: pair(w.failsbar),
                };
            }
            if let Some(w) = b.w {
                cfg.w_basis = BasisPair {
                    first: pair(w.ok),
                    second: pair(w.fails),
                };
            }
        }
        if let Some(t) = self.time_labels {
            cfg.time_labels = t;
        }
        cfg
    }
}
