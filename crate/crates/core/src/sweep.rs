//! One-parameter sweeps of a designed network.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::elements::{ElementError, Quality};
use crate::metrics::{band_metrics, BandMetrics};
use crate::netlist::render_value;
use crate::network::MatchingNetwork;
use crate::twoport::{power_db, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Cts,
    Qxfmr,
    Km,
    Qt,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Cts => "cts",
            SweepKind::Qxfmr => "qxfmr",
            SweepKind::Km => "km",
            SweepKind::Qt => "qt",
        }
    }

    /// Checks a parameter value; infinite Q means lossless.
    pub fn check(self, v: f64) -> Result<(), String> {
        let ok = match self {
            SweepKind::Cts => v >= 0.0 && v.is_finite(),
            SweepKind::Km => v > 0.0 && v <= 1.0,
            SweepKind::Qxfmr | SweepKind::Qt => v > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(format!("invalid {} value {v}", self.name()))
        }
    }

    pub fn apply(self, base: &MatchingNetwork, v: f64) -> MatchingNetwork {
        let mut n = *base;
        match self {
            SweepKind::Cts => n.resonator.c_ts = v,
            SweepKind::Km => n.transformer.coupling = v,
            SweepKind::Qxfmr => n.transformer.q_xfmr = Quality::finite(v),
            SweepKind::Qt => n.resonator.q_t = Quality::finite(v),
        }
        n
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "cts" => Ok(SweepKind::Cts),
            "qxfmr" => Ok(SweepKind::Qxfmr),
            "km" => Ok(SweepKind::Km),
            "qt" => Ok(SweepKind::Qt),
            _ => Err(format!("unknown sweep kind '{s}' (cts, qxfmr, km, qt)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub value: f64,
    pub label: String,
    #[serde(skip)]
    pub gain_db: Vec<f64>,
    pub metrics: BandMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub kind: SweepKind,
    #[serde(skip)]
    pub frequencies: Vec<f64>,
    pub curves: Vec<SweepCurve>,
}

fn label(kind: SweepKind, v: f64) -> String {
    if v.is_infinite() {
        format!("{kind}=inf")
    } else {
        format!("{kind}={}", render_value(v))
    }
}

fn curve(net: &MatchingNetwork, kind: SweepKind, v: f64, freqs: &[f64], f_low: f64, f_high: f64) -> Result<SweepCurve, ElementError> {
    let n = kind.apply(net, v);
    let mut gain = Vec::with_capacity(freqs.len());
    let mut s11: Vec<C64> = Vec::with_capacity(freqs.len());
    let mut s22: Vec<C64> = Vec::with_capacity(freqs.len());
    for f in freqs {
        let w = 2.0 * PI * f;
        gain.push(n.transducer_gain(w)?);
        let s = n.s_params(w)?;
        s11.push(s.s11);
        s22.push(s.s22);
    }
    Ok(SweepCurve {
        value: v,
        label: label(kind, v),
        gain_db: gain.iter().map(|g| power_db(*g)).collect(),
        metrics: band_metrics(freqs, &gain, Some(&s11), Some(&s22), f_low, f_high),
    })
}

/// Evaluates every curve (one worker thread per curve); the result order
/// follows `values`.
pub fn run(
    base: &MatchingNetwork,
    kind: SweepKind,
    values: &[f64],
    freqs: &[f64],
    f_low: f64,
    f_high: f64,
) -> Result<SweepResult, String> {
    if values.is_empty() {
        return Err("empty sweep range".into());
    }
    for v in values {
        kind.check(*v)?;
    }
    let curves: Vec<Result<SweepCurve, ElementError>> = std::thread::scope(|s| {
        let handles: Vec<_> = values
            .iter()
            .map(|&v| s.spawn(move || curve(base, kind, v, freqs, f_low, f_high)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let curves = curves.into_iter().collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    Ok(SweepResult { kind, frequencies: freqs.to_vec(), curves })
}

impl SweepResult {
    /// `freq_hz,<kind>=v1,...` then one row per frequency, gains in dB.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("freq_hz");
        for c in &self.curves {
            out.push(',');
            out.push_str(&c.label);
        }
        out.push('\n');
        for (k, f) in self.frequencies.iter().enumerate() {
            out.push_str(&format!("{f}"));
            for c in &self.curves {
                out.push_str(&format!(",{}", c.gain_db[k]));
            }
            out.push('\n');
        }
        out
    }
}
