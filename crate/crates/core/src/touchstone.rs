//! Touchstone v1 (`.s2p`) writer and a reader for the same subset.

use thiserror::Error;

use crate::mna::FrequencyResponse;
use crate::twoport::{TwoPortError, C64};

pub const OPTION_LINE: &str = "# HZ S RI R 50";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TouchstoneError {
    #[error("touchstone output needs a 2-port response, got {0} ports")]
    NotTwoPort(usize),
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error(transparent)]
    TwoPort(#[from] TwoPortError),
}

/// One row per frequency: S11, S21, S12, S22 as real/imaginary pairs,
/// renormalized to 50 Ω.
pub fn emit(resp: &FrequencyResponse) -> Result<String, TouchstoneError> {
    if resp.ports() != 2 {
        return Err(TouchstoneError::NotTwoPort(resp.ports()));
    }
    let mut out = String::new();
    out.push_str("! 2-port S-parameters\n");
    out.push_str(OPTION_LINE);
    out.push('\n');
    for (k, f) in resp.frequencies.iter().enumerate() {
        let mut s = resp.twoport(k, 1, 2);
        if s.zref1 != 50.0 || s.zref2 != 50.0 {
            s = s.renormalize(50.0, 50.0)?;
        }
        out.push_str(&format!("{f:.11e}"));
        for v in [s.s11, s.s21, s.s12, s.s22] {
            out.push_str(&format!(" {:.11e} {:.11e}", v.re, v.im));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Rows of `(f, [S11, S21, S12, S22])`. Accepts only the RI / Hz / 50 Ω
/// form that [`emit`] writes.
pub fn read(text: &str) -> Result<Vec<(f64, [C64; 4])>, TouchstoneError> {
    let mut rows = Vec::new();
    let mut seen_option = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.split('!').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            let opts: Vec<String> = line[1..].split_whitespace().map(str::to_ascii_uppercase).collect();
            if opts != ["HZ", "S", "RI", "R", "50"] {
                return Err(TouchstoneError::Parse(i + 1, format!("unsupported option line '{line}'")));
            }
            seen_option = true;
            continue;
        }
        let v: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| TouchstoneError::Parse(i + 1, e.to_string()))?;
        if v.len() != 9 {
            return Err(TouchstoneError::Parse(i + 1, format!("expected 9 columns, got {}", v.len())));
        }
        let c = |k: usize| C64::new(v[1 + 2 * k], v[2 + 2 * k]);
        rows.push((v[0], [c(0), c(1), c(2), c(3)]));
    }
    if !seen_option {
        return Err(TouchstoneError::Parse(1, "missing option line".into()));
    }
    Ok(rows)
}
