//! Browser bindings. Every entry point takes and returns JSON text.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use dualband::elements::Quality;
use dualband::metrics::{band_metrics, BandMetrics};
use dualband::netlist::AcSweep;
use dualband::resonator::{poles_zeros, resonator_impedance, ResonatorSpec};
use dualband::synthesis::{synthesize_then_degrade, DesignSpec, LtsChoice, RefineOptions, SynthesizedNetwork};
use dualband::twoport::power_db;

#[derive(Debug, Deserialize)]
pub struct DesignParams {
    pub f_low: f64,
    pub f_high: f64,
    #[serde(default = "fifty")]
    pub r_opt: f64,
    #[serde(default = "fifty")]
    pub r_load: f64,
    pub c_p: f64,
    pub c_s: f64,
    #[serde(default = "one")]
    pub k_m: f64,
    /// `null` for lossless.
    #[serde(default)]
    pub q_xfmr: Option<f64>,
    #[serde(default)]
    pub q_t: Option<f64>,
    /// `null` picks L_ts automatically.
    #[serde(default)]
    pub l_ts: Option<f64>,
}

fn fifty() -> f64 {
    50.0
}

fn one() -> f64 {
    1.0
}

#[derive(Serialize)]
struct Curve {
    freqs: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize)]
struct Response {
    curve: Curve,
    metrics: BandMetrics,
}

fn design(params: &DesignParams) -> Result<SynthesizedNetwork, String> {
    if !(params.f_low < params.f_high) {
        return Err("f_low must be below f_high".into());
    }
    let spec = DesignSpec {
        f_low: params.f_low,
        f_high: params.f_high,
        f_sc: None,
        r_opt: params.r_opt,
        r_load: params.r_load,
        c_par_primary: params.c_p,
        c_par_secondary: params.c_s,
        k_m: params.k_m,
        q_xfmr: Quality(params.q_xfmr),
        q_t: Quality(params.q_t),
    };
    spec.validate().map_err(|e| e.to_string())?;
    let lts = params.l_ts.map_or(LtsChoice::Auto, LtsChoice::Fixed);
    synthesize_then_degrade(&spec, lts, &RefineOptions::default()).map_err(|e| e.to_string())
}

fn grid(points: usize, start: f64, stop: f64) -> Result<AcSweep, String> {
    let g = AcSweep::new(points, start, stop);
    if g.is_valid() { Ok(g) } else { Err(format!("invalid grid {points} points {start}..{stop}")) }
}

/// Design from a parameter object; returns the design JSON.
#[wasm_bindgen]
pub fn synthesize(params: &str) -> Result<String, String> {
    let p: DesignParams = serde_json::from_str(params).map_err(|e| e.to_string())?;
    serde_json::to_string(&design(&p)?).map_err(|e| e.to_string())
}

/// Transducer gain in dB of a design over a linear grid, plus band metrics.
#[wasm_bindgen]
pub fn response_curve(design_json: &str, points: usize, start: f64, stop: f64) -> Result<String, String> {
    let d: SynthesizedNetwork = serde_json::from_str(design_json).map_err(|e| e.to_string())?;
    let freqs = grid(points, start, stop)?.frequencies();
    let gain = d.network.gain_curve(&freqs).map_err(|e| e.to_string())?;
    let metrics = band_metrics(&freqs, &gain, None, None, d.spec.f_low, d.spec.f_high);
    let values = gain.iter().map(|g| power_db(*g)).collect();
    serde_json::to_string(&Response { curve: Curve { freqs, values }, metrics }).map_err(|e| e.to_string())
}

/// `|Z_T|` in dB-ohm of a design's tap resonator, with its poles and zeros in Hz.
#[wasm_bindgen]
pub fn resonator_curve(design_json: &str, points: usize, start: f64, stop: f64) -> Result<String, String> {
    let d: SynthesizedNetwork = serde_json::from_str(design_json).map_err(|e| e.to_string())?;
    let r: ResonatorSpec = d.network.resonator;
    let freqs = grid(points, start, stop)?.frequencies();
    let values = freqs
        .iter()
        .map(|f| 20.0 * resonator_impedance(&r, 2.0 * std::f64::consts::PI * f).norm().log10())
        .collect();
    let pz = poles_zeros(&r);
    let hz = |v: &[f64]| v.iter().map(|w| w / (2.0 * std::f64::consts::PI)).collect::<Vec<_>>();
    serde_json::to_string(&serde_json::json!({
        "curve": Curve { freqs, values },
        "poles_hz": hz(&pz.poles),
        "zeros_hz": hz(&pz.zeros),
    }))
    .map_err(|e| e.to_string())
}
