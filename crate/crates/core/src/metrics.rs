//! Band metrics extracted from sampled responses.

use serde::{Deserialize, Serialize};

use crate::netlist::AcSweep;
use crate::twoport::{magnitude_db, power_db, C64};

/// 20–45 GHz in 10 MHz steps.
pub const DEFAULT_GRID: AcSweep = AcSweep { count: 2501, start: 20e9, stop: 45e9 };

/// How `suppression` is referenced; carried in emitted metadata.
pub const SUPPRESSION_DEFINITION: &str =
    "min(G_T(f_low), G_T(f_high)) in dB minus G_T at the deepest interior minimum between the bands";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Notch {
    pub freq: f64,
    pub gain_db: f64,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandMetrics {
    pub f_low: f64,
    pub f_high: f64,
    /// Grid frequencies actually used for the band points.
    pub f_low_grid: f64,
    pub f_high_grid: f64,
    pub il_low: f64,
    pub il_high: f64,
    pub f_notch: Option<f64>,
    pub notch_db: Option<f64>,
    pub suppression: Option<f64>,
    pub rl_in_low: Option<f64>,
    pub rl_in_high: Option<f64>,
    pub rl_out_low: Option<f64>,
    pub rl_out_high: Option<f64>,
}

pub fn nearest_index(freqs: &[f64], f: f64) -> usize {
    let mut best = 0;
    for (i, x) in freqs.iter().enumerate() {
        if (x - f).abs() < (freqs[best] - f).abs() {
            best = i;
        }
    }
    best
}

/// Deepest point of `gain_db` strictly inside `(lo, hi)`, if it is a local
/// minimum of the sampled curve (not pinned to the window edge).
pub fn interior_minimum(freqs: &[f64], gain_db: &[f64], lo: f64, hi: f64) -> Option<Notch> {
    let inside: Vec<usize> = (0..freqs.len()).filter(|&i| freqs[i] > lo && freqs[i] < hi).collect();
    let (&first, &last) = (inside.first()?, inside.last()?);
    let k = inside
        .iter()
        .copied()
        .min_by(|a, b| gain_db[*a].total_cmp(&gain_db[*b]))?;
    if k == first || k == last {
        return None;
    }
    (gain_db[k] <= gain_db[k - 1] && gain_db[k] <= gain_db[k + 1])
        .then(|| Notch { freq: freqs[k], gain_db: gain_db[k], index: k })
}

/// Indices of strict-interior local minima of a sampled curve.
pub fn local_minima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&k| values[k] <= values[k - 1] && values[k] < values[k + 1])
        .collect()
}

/// Local minimum of `gain_db` closest to `f_ref`, used to follow one notch
/// as it moves out of the band gap.
pub fn tracked_minimum(freqs: &[f64], gain_db: &[f64], f_ref: f64) -> Option<Notch> {
    local_minima(gain_db)
        .into_iter()
        .min_by(|a, b| (freqs[*a] - f_ref).abs().total_cmp(&(freqs[*b] - f_ref).abs()))
        .map(|k| Notch { freq: freqs[k], gain_db: gain_db[k], index: k })
}

/// Metrics from linear transducer gain and optional reflection curves.
pub fn band_metrics(
    freqs: &[f64],
    gain: &[f64],
    s11: Option<&[C64]>,
    s22: Option<&[C64]>,
    f_low: f64,
    f_high: f64,
) -> BandMetrics {
    let db: Vec<f64> = gain.iter().map(|g| power_db(*g)).collect();
    let il = nearest_index(freqs, f_low);
    let ih = nearest_index(freqs, f_high);
    let notch = interior_minimum(freqs, &db, f_low, f_high);
    let rl = |s: Option<&[C64]>, i: usize| s.map(|s| -magnitude_db(s[i].norm()));
    BandMetrics {
        f_low,
        f_high,
        f_low_grid: freqs[il],
        f_high_grid: freqs[ih],
        il_low: 0.0 - db[il],
        il_high: 0.0 - db[ih],
        f_notch: notch.map(|n| n.freq),
        notch_db: notch.map(|n| n.gain_db),
        suppression: notch.map(|n| db[il].min(db[ih]) - n.gain_db),
        rl_in_low: rl(s11, il),
        rl_in_high: rl(s11, ih),
        rl_out_low: rl(s22, il),
        rl_out_high: rl(s22, ih),
    }
}
