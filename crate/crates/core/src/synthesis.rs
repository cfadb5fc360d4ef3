//! Design of the dual-band network from a band plan.
//!
//! The primary resonates with the input-referred capacitance at `f_L`.
//! The tap resonator has its pole at `f_L` and presents, at the notch
//! frequency, the capacitance that series-resonates with `L_s / 4`.
//! A damped least-squares pass then adjusts `L_p`, `L_ts`, `C_ts1` and the
//! winding split so both bands are matched and the output is shorted at
//! `f_SC`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elements::{ElementError, Quality, TransformerSpec};
use crate::lm::{self, LmError, LmOptions};
use crate::network::{MatchingNetwork, Terminations};
use crate::resonator::{network_iii_closed_form, ResonatorSpec, Topology, DELTA_RANGE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthesisError {
    #[error("invalid design spec: {0}")]
    InvalidSpec(String),
    #[error("no resonating capacitance: C_p + C_s/n² is zero")]
    NoResonatingCapacitance,
    #[error(
        "infeasible L_ts = {l_ts:e} H: C_ts = {c_ts:e} F must exceed {required:e} F; increase C_ts (decrease L_ts)"
    )]
    InfeasibleLts { l_ts: f64, c_ts: f64, required: f64 },
    #[error("delta below feasibility bound: {delta} <= {delta_min}")]
    DeltaBelowBound { delta: f64, delta_min: f64 },
    #[error("degenerate refinement: Jacobian lost rank")]
    DegenerateRefinement,
    #[error("refinement supports resonator network III only")]
    UnsupportedTopology,
    #[error(transparent)]
    Element(#[from] ElementError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub f_low: f64,
    pub f_high: f64,
    /// Defaults to the geometric mean of the band frequencies.
    #[serde(default)]
    pub f_sc: Option<f64>,
    pub r_opt: f64,
    pub r_load: f64,
    pub c_par_primary: f64,
    pub c_par_secondary: f64,
    pub k_m: f64,
    pub q_xfmr: Quality,
    pub q_t: Quality,
}

impl DesignSpec {
    /// 28/38 GHz, 50 Ω on both sides, 150 fF parasitics, lossless.
    pub fn worked_example() -> Self {
        Self {
            f_low: 28e9,
            f_high: 38e9,
            f_sc: None,
            r_opt: 50.0,
            r_load: 50.0,
            c_par_primary: 150e-15,
            c_par_secondary: 150e-15,
            k_m: 1.0,
            q_xfmr: Quality::IDEAL,
            q_t: Quality::IDEAL,
        }
    }

    /// Same bands with parasitics sized so that `L_p = l_p` at 1:1.
    pub fn with_primary_inductance(mut self, l_p: f64) -> Self {
        let n2 = self.r_opt / self.r_load;
        let c_in = 1.0 / (self.omega_low().powi(2) * l_p);
        // split evenly between the two sides, input-referred
        self.c_par_primary = c_in / 2.0;
        self.c_par_secondary = c_in / 2.0 * n2;
        self
    }

    pub fn ideal(mut self) -> Self {
        self.k_m = 1.0;
        self.q_xfmr = Quality::IDEAL;
        self.q_t = Quality::IDEAL;
        self
    }

    pub fn with_losses(mut self, k_m: f64, q_xfmr: Quality, q_t: Quality) -> Self {
        self.k_m = k_m;
        self.q_xfmr = q_xfmr;
        self.q_t = q_t;
        self
    }

    pub fn f_sc_value(&self) -> f64 {
        self.f_sc.unwrap_or_else(|| (self.f_low * self.f_high).sqrt())
    }

    pub fn omega_low(&self) -> f64 {
        2.0 * PI * self.f_low
    }

    pub fn omega_high(&self) -> f64 {
        2.0 * PI * self.f_high
    }

    pub fn omega_sc(&self) -> f64 {
        2.0 * PI * self.f_sc_value()
    }

    pub fn terminations(&self) -> Terminations {
        Terminations {
            r_source: self.r_opt,
            c_source: self.c_par_primary,
            r_load: self.r_load,
            c_load: self.c_par_secondary,
        }
    }

    pub fn validate(&self) -> Result<(), SynthesisError> {
        let bad = |m: String| Err(SynthesisError::InvalidSpec(m));
        let fsc = self.f_sc_value();
        if !(self.f_low > 0.0 && self.f_low.is_finite() && self.f_high.is_finite()) {
            return bad(format!("f_low must be positive, got {}", self.f_low));
        }
        if !(self.f_low < fsc && fsc < self.f_high) {
            return bad(format!(
                "need f_low < f_sc < f_high, got {} / {} / {}",
                self.f_low, fsc, self.f_high
            ));
        }
        if !(self.r_opt > 0.0 && self.r_load > 0.0) {
            return bad("resistances must be positive".into());
        }
        if !(self.c_par_primary >= 0.0 && self.c_par_secondary >= 0.0) {
            return bad("capacitances must be non-negative".into());
        }
        if !(self.k_m > 0.0 && self.k_m <= 1.0) {
            return bad(format!("coupling must lie in (0, 1], got {}", self.k_m));
        }
        for q in [self.q_xfmr, self.q_t] {
            if let Some(v) = q.0 {
                if !(v > 0.0) {
                    return bad(format!("quality factors must be positive, got {v}"));
                }
            }
        }
        Ok(())
    }
}

pub fn turn_ratio(r_opt: f64, r_load: f64) -> f64 {
    (r_opt / r_load).sqrt()
}

pub fn short_circuit_frequency(f_low: f64, f_high: f64) -> Result<f64, SynthesisError> {
    if !(f_low > 0.0 && f_low < f_high && f_high.is_finite()) {
        return Err(SynthesisError::InvalidSpec(format!(
            "need 0 < f_low < f_high, got {f_low} / {f_high}"
        )));
    }
    Ok((f_low * f_high).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimaryDesign {
    pub n: f64,
    pub c_in: f64,
    pub l_in: f64,
    pub r_in: f64,
    pub l_p: f64,
    pub l_s: f64,
}

pub fn primary_design(spec: &DesignSpec) -> Result<PrimaryDesign, SynthesisError> {
    spec.validate()?;
    let n = turn_ratio(spec.r_opt, spec.r_load);
    let c_in = spec.c_par_primary + spec.c_par_secondary / (n * n);
    if !(c_in > 0.0) {
        return Err(SynthesisError::NoResonatingCapacitance);
    }
    let wl = spec.omega_low();
    let l_p = 1.0 / (wl * wl * c_in);
    Ok(PrimaryDesign { n, c_in, l_in: l_p, r_in: n * n * spec.r_load, l_p, l_s: l_p / (n * n) })
}

/// Lower bound on `C_ts` for a positive `C_ts1`.
pub fn min_c_ts(l_s: f64, spec: &DesignSpec) -> f64 {
    let (wl, wh) = (spec.omega_low(), spec.omega_high());
    sc_capacitance(l_s, spec) * wh / (wh - wl)
}

/// Capacitance resonating with a quarter of `L_s` at the notch frequency.
pub fn sc_capacitance(l_s: f64, spec: &DesignSpec) -> f64 {
    let wsc = spec.omega_sc();
    4.0 / (wsc * wsc * l_s)
}

pub fn alpha(spec: &DesignSpec) -> f64 {
    let (wl, wh) = (spec.omega_low(), spec.omega_high());
    wh * wh / (wh * wh - wl * wl)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonatorDesign {
    pub resonator: ResonatorSpec,
    pub c_sc: f64,
    pub delta: f64,
    pub alpha: f64,
    pub warnings: Vec<String>,
}

pub fn resonator_synthesis(
    l_s: f64,
    spec: &DesignSpec,
    l_ts: f64,
) -> Result<ResonatorDesign, SynthesisError> {
    if !(l_ts > 0.0 && l_ts.is_finite()) {
        return Err(ElementError::NonPositive { what: "L_ts", value: l_ts }.into());
    }
    let (wl, wh) = (spec.omega_low(), spec.omega_high());
    let c_ts = 1.0 / (wl * wl * l_ts);
    let c_sc = sc_capacitance(l_s, spec);
    let den = (wh - wl) - c_sc * wh / c_ts;
    if !(den > 0.0) {
        return Err(SynthesisError::InfeasibleLts { l_ts, c_ts, required: min_c_ts(l_s, spec) });
    }
    let c_ts1 = c_sc * (wh - wl) / den;
    let delta = network_iii_closed_form(l_ts, c_ts, c_ts1, wh).norm() / spec.r_load;
    let mut warnings = Vec::new();
    if !(DELTA_RANGE.0..=DELTA_RANGE.1).contains(&delta) {
        warnings.push(format!(
            "delta = {delta:.4} outside the typical range {}..{}",
            DELTA_RANGE.0, DELTA_RANGE.1
        ));
    }
    Ok(ResonatorDesign {
        resonator: ResonatorSpec::network_iii(l_ts, c_ts, c_ts1, spec.q_t),
        c_sc,
        delta,
        alpha: alpha(spec),
        warnings,
    })
}

/// `C_ts1` giving `|Z_T(jω_H)| = δ R_L` with the pole of `C_ts` at `ω_L`.
pub fn forward_delta_design(c_ts: f64, spec: &DesignSpec, delta: f64) -> Result<f64, SynthesisError> {
    let a = alpha(spec);
    let wh = spec.omega_high();
    let delta_min = a / (wh * c_ts * spec.r_load);
    if !(delta > delta_min) {
        return Err(SynthesisError::DeltaBelowBound { delta, delta_min });
    }
    Ok(c_ts / (delta * wh * c_ts * spec.r_load - a))
}

/// `|Z_T(jω_H)|` as `C_ts1 → ∞`.
pub fn min_tap_impedance(c_ts: f64, spec: &DesignSpec) -> f64 {
    alpha(spec) / (spec.omega_high() * c_ts)
}

/// Largest `L_ts` keeping `C_ts` 20 % above its feasibility bound.
pub fn auto_l_ts(l_s: f64, spec: &DesignSpec) -> f64 {
    let wl = spec.omega_low();
    1.0 / (wl * wl * 1.2 * min_c_ts(l_s, spec))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LtsChoice {
    #[default]
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineOptions {
    pub solver: LmOptions,
    pub vary_split: bool,
}

impl Default for RefineOptions {
    fn default() -> Self {
        // element values may move by at most a factor of 8 either way
        Self { solver: LmOptions { max_excursion: 8f64.ln(), ..LmOptions::default() }, vary_split: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub converged: bool,
    pub iterations: usize,
    pub initial_norm: f64,
    pub final_norm: f64,
}

/// Element values straight from the design formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub l_p: f64,
    pub l_s: f64,
    pub l_ts: f64,
    pub c_ts: f64,
    pub c_ts1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub n: f64,
    pub l_in: f64,
    pub c_in: f64,
    pub r_in: f64,
    pub c_sc: f64,
    pub alpha: f64,
    /// From the refined resonator.
    pub delta: f64,
    pub delta_min: f64,
    /// `[Re Zin(ωL) - R_opt, Im Zin(ωL), Re Zin(ωH) - R_opt, Im Zin(ωH), |Zout(ωSC)|] / R_opt`.
    pub residuals: [f64; 5],
    pub residual_norm: f64,
    pub z_out_sc: f64,
    pub closed_form: ClosedForm,
    pub closed_form_delta: f64,
    pub refinement: Option<RefinementReport>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesizedNetwork {
    pub spec: DesignSpec,
    pub network: MatchingNetwork,
    pub diagnostics: Diagnostics,
}

/// Match and notch residuals normalized by `R_opt`.
pub fn match_residuals(net: &MatchingNetwork, spec: &DesignSpec) -> Result<[f64; 5], SynthesisError> {
    let zl = net.input_impedance(spec.omega_low())?;
    let zh = net.input_impedance(spec.omega_high())?;
    let zo = net.output_impedance(spec.omega_sc())?;
    let r = spec.r_opt;
    Ok([(zl.re - r) / r, zl.im / r, (zh.re - r) / r, zh.im / r, zo.norm() / r])
}

fn norm5(r: &[f64; 5]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Builds the unrefined network from the design formulas.
pub fn closed_form_network(spec: &DesignSpec, l_ts: LtsChoice) -> Result<SynthesizedNetwork, SynthesisError> {
    let p = primary_design(spec)?;
    let l_ts = match l_ts {
        LtsChoice::Auto => auto_l_ts(p.l_s, spec),
        LtsChoice::Fixed(v) => v,
    };
    let res = resonator_synthesis(p.l_s, spec, l_ts)?;
    let transformer = TransformerSpec::new(p.l_p, p.l_s, spec.k_m, spec.q_xfmr);
    transformer.validate()?;
    let network = MatchingNetwork { transformer, resonator: res.resonator, terminations: spec.terminations() };
    let residuals = match_residuals(&network, spec)?;
    let r = res.resonator;
    Ok(SynthesizedNetwork {
        spec: *spec,
        network,
        diagnostics: Diagnostics {
            n: p.n,
            l_in: p.l_in,
            c_in: p.c_in,
            r_in: p.r_in,
            c_sc: res.c_sc,
            alpha: res.alpha,
            delta: res.delta,
            delta_min: res.alpha / (spec.omega_high() * r.c_ts * spec.r_load),
            residuals,
            residual_norm: norm5(&residuals),
            z_out_sc: residuals[4] * spec.r_opt,
            closed_form: ClosedForm { l_p: p.l_p, l_s: p.l_s, l_ts: r.l_ts, c_ts: r.c_ts, c_ts1: r.c_ts1 },
            closed_form_delta: res.delta,
            refinement: None,
            warnings: res.warnings,
        },
    })
}

fn logit(s: f64) -> f64 {
    (s / (1.0 - s)).ln()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Applies refinement coordinates to a base network. `C_ts` follows
/// `L_ts` so the `L_ts C_ts` product, and with it the pole, stays put.
fn apply(base: &MatchingNetwork, x: &[f64], vary_split: bool) -> MatchingNetwork {
    let mut n = *base;
    let kp = x[0].exp();
    let kt = x[1].exp();
    n.transformer.l_primary *= kp;
    n.transformer.l_secondary *= kp;
    n.resonator.l_ts *= kt;
    n.resonator.c_ts /= kt;
    n.resonator.c_ts1 *= x[2].exp();
    if vary_split {
        let s = sigmoid(x[3]);
        n.transformer.primary_split = s;
        n.transformer.secondary_split = s;
    }
    n
}

pub fn refine(
    net: &SynthesizedNetwork,
    spec: &DesignSpec,
    opts: &RefineOptions,
) -> Result<SynthesizedNetwork, SynthesisError> {
    if net.network.resonator.topology != Topology::III {
        return Err(SynthesisError::UnsupportedTopology);
    }
    let base = net.network;
    let mut x0 = vec![0.0, 0.0, 0.0];
    if opts.vary_split {
        x0.push(logit(base.transformer.primary_split));
    }
    let f = |x: &[f64]| -> Option<Vec<f64>> {
        let n = apply(&base, x, opts.vary_split);
        let r = match_residuals(&n, spec).ok()?;
        r.iter().all(|v| v.is_finite()).then(|| r.to_vec())
    };
    let rep = lm::minimize(f, &x0, &opts.solver).map_err(|e| match e {
        LmError::Degenerate => SynthesisError::DegenerateRefinement,
        LmError::BadStart => SynthesisError::InvalidSpec("network cannot be evaluated".into()),
    })?;
    let network = apply(&base, &rep.x, opts.vary_split);
    let residuals = match_residuals(&network, spec)?;
    let r = network.resonator;
    let delta = network_iii_closed_form(r.l_ts, r.c_ts, r.c_ts1, spec.omega_high()).norm() / spec.r_load;
    let mut out = net.clone();
    out.network = network;
    let d = &mut out.diagnostics;
    d.delta = delta;
    d.delta_min = d.alpha / (spec.omega_high() * r.c_ts * spec.r_load);
    d.residuals = residuals;
    d.residual_norm = norm5(&residuals);
    d.z_out_sc = residuals[4] * spec.r_opt;
    d.refinement = Some(RefinementReport {
        converged: rep.converged,
        iterations: rep.iterations,
        initial_norm: rep.initial_norm,
        final_norm: rep.norm,
    });
    if !rep.converged {
        d.warnings.push(format!("refinement unconverged: residual norm {:.3e}", rep.norm));
    }
    Ok(out)
}

/// Closed-form design followed by refinement.
pub fn synthesize(
    spec: &DesignSpec,
    l_ts: LtsChoice,
    opts: Option<&RefineOptions>,
) -> Result<SynthesizedNetwork, SynthesisError> {
    let initial = closed_form_network(spec, l_ts)?;
    match opts {
        Some(o) => refine(&initial, spec, o),
        None => Ok(initial),
    }
}

/// Refines on the lossless, unity-coupled model, then applies the spec's
/// coupling and losses to the refined element values.
pub fn synthesize_then_degrade(
    spec: &DesignSpec,
    l_ts: LtsChoice,
    opts: &RefineOptions,
) -> Result<SynthesizedNetwork, SynthesisError> {
    let ideal = spec.ideal();
    let mut net = synthesize(&ideal, l_ts, Some(opts))?;
    net.network = net.network.with_losses(Some(spec.k_m), Some(spec.q_xfmr), Some(spec.q_t));
    net.spec = *spec;
    let residuals = match_residuals(&net.network, spec)?;
    let d = &mut net.diagnostics;
    d.residuals = residuals;
    d.residual_norm = norm5(&residuals);
    d.z_out_sc = residuals[4] * spec.r_opt;
    Ok(net)
}
