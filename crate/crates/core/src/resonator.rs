//! Center-tap resonator networks.
//!
//! Every three-element reactive two-terminal network is either an
//! element in series with a two-element tank, or an element shunting a
//! two-element series branch. The four non-degenerate arrangements with
//! a finite pole and a finite zero are given the names below:
//!
//! | name | arrangement        | elements | finite ordering   |
//! |------|--------------------|----------|-------------------|
//! | I    | L1 + (L ‖ C)       | 2L + 1C  | zero above pole   |
//! | II   | L1 ‖ (L + C)       | 2L + 1C  | zero above pole   |
//! | III  | C1 + (L ‖ C)       | 1L + 2C  | pole above zero   |
//! | IV   | C1 ‖ (L + C)       | 1L + 2C  | pole above zero   |
//!
//! Network III is the one used by the synthesis pipeline. The mapping of
//! I, II and IV onto arrangements is by inductor count and ordering only.

use serde::{Deserialize, Serialize};

use crate::elements::{Capacitor, LossyInductor, Quality};
use crate::synthesis::DesignSpec;
use crate::twoport::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Topology {
    I,
    II,
    III,
    IV,
}

impl Topology {
    pub fn arrangement(self) -> Arrangement {
        use ElementKind::*;
        match self {
            Topology::I => Arrangement::SeriesTank { series: L, tank: [L, C] },
            Topology::II => Arrangement::ShuntBranch { shunt: L, branch: [L, C] },
            Topology::III => Arrangement::SeriesTank { series: C, tank: [L, C] },
            Topology::IV => Arrangement::ShuntBranch { shunt: C, branch: [L, C] },
        }
    }

    pub fn inductor_count(self) -> usize {
        self.arrangement().inductor_count()
    }
}

impl std::str::FromStr for Topology {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Topology::I),
            "II" | "2" => Ok(Topology::II),
            "III" | "3" => Ok(Topology::III),
            "IV" | "4" => Ok(Topology::IV),
            other => Err(format!("unknown resonator topology '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElementKind {
    L,
    C,
}

/// A three-element two-terminal arrangement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arrangement {
    /// `series + (tank[0] ‖ tank[1])`
    SeriesTank { series: ElementKind, tank: [ElementKind; 2] },
    /// `shunt ‖ (branch[0] + branch[1])`
    ShuntBranch { shunt: ElementKind, branch: [ElementKind; 2] },
}

impl Arrangement {
    fn kinds(&self) -> [ElementKind; 3] {
        match *self {
            Arrangement::SeriesTank { series, tank } => [series, tank[0], tank[1]],
            Arrangement::ShuntBranch { shunt, branch } => [shunt, branch[0], branch[1]],
        }
    }

    pub fn inductor_count(&self) -> usize {
        self.kinds().iter().filter(|k| **k == ElementKind::L).count()
    }

    /// The pair element kinds match, so the pair collapses to one element.
    pub fn is_degenerate(&self) -> bool {
        let k = self.kinds();
        k[1] == k[2]
    }

    /// The named topology this arrangement corresponds to, if any.
    pub fn named(&self) -> Option<Topology> {
        [Topology::I, Topology::II, Topology::III, Topology::IV]
            .into_iter()
            .find(|t| t.arrangement() == *self)
    }
}

/// Result of the enumeration over all 1L+2C and 2L+1C arrangements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub arrangement: Arrangement,
    pub inductors: usize,
    pub degenerate: bool,
    pub ordering: Option<Ordering>,
    pub named: Option<Topology>,
}

/// All series-tank and shunt-branch arrangements of three reactive
/// elements with one or two inductors, classified by pole/zero order.
pub fn enumerate_three_element() -> Vec<Classification> {
    use ElementKind::*;
    let pairs = [[L, L], [L, C], [C, C]];
    let mut out = Vec::new();
    for outer in [L, C] {
        for pair in pairs {
            for arr in [
                Arrangement::SeriesTank { series: outer, tank: pair },
                Arrangement::ShuntBranch { shunt: outer, branch: pair },
            ] {
                let n = arr.inductor_count();
                if n == 0 || n == 3 {
                    continue;
                }
                let degenerate = arr.is_degenerate();
                // unit element values are enough to fix the ordering
                let ordering = if degenerate {
                    None
                } else {
                    Some(pole_zero_of(arr, [1.0, 1.0, 1.0]).ordering)
                };
                out.push(Classification {
                    arrangement: arr,
                    inductors: n,
                    degenerate,
                    ordering,
                    named: arr.named(),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    ZeroAbovePole,
    PoleAboveZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleZeroReport {
    /// rad/s, ascending, DC included where present.
    pub poles: Vec<f64>,
    /// rad/s, ascending, DC included where present.
    pub zeros: Vec<f64>,
    pub ordering: Ordering,
    /// The finite pole and zero coincide.
    pub degenerate: bool,
}

/// Element values for a center-tap resonator.
///
/// `l_ts` and `c_ts` form the resonant pair (tank or series branch). The
/// third element is `c_ts1` for III/IV and `l_ts1` for I/II. `q_t` applies
/// to every inductor in the network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonatorSpec {
    pub topology: Topology,
    pub l_ts: f64,
    pub c_ts: f64,
    pub c_ts1: f64,
    #[serde(default)]
    pub l_ts1: f64,
    pub q_t: Quality,
}

impl ResonatorSpec {
    pub fn network_iii(l_ts: f64, c_ts: f64, c_ts1: f64, q_t: Quality) -> Self {
        Self { topology: Topology::III, l_ts, c_ts, c_ts1, l_ts1: 0.0, q_t }
    }

    fn third(&self) -> f64 {
        match self.topology {
            Topology::I | Topology::II => self.l_ts1,
            Topology::III | Topology::IV => self.c_ts1,
        }
    }

    /// A zero element value that collapses the network (degenerate sweep).
    pub fn is_degenerate(&self) -> bool {
        self.l_ts <= 0.0 || self.c_ts <= 0.0 || self.third() <= 0.0
    }

    pub fn with_quality(mut self, q_t: Quality) -> Self {
        self.q_t = q_t;
        self
    }
}

fn infinite() -> C64 {
    C64::new(0.0, f64::INFINITY)
}

/// Impedance of `a` in parallel with `b`; an infinite side is ignored.
fn parallel(a: C64, b: C64) -> C64 {
    if !a.is_finite() {
        return b;
    }
    if !b.is_finite() {
        return a;
    }
    let den = a + b;
    if den.norm() == 0.0 {
        return infinite();
    }
    a * b / den
}

fn cap_impedance(omega: f64, c: f64) -> C64 {
    if c <= 0.0 {
        return infinite();
    }
    let y = Capacitor::ideal(c).admittance(omega);
    C64::new(1.0, 0.0) / y
}

/// Resonator impedance at `omega`. Inductor loss is the series `ωL/Q_T`.
/// Exactly at a lossless pole the result is `+j∞`.
pub fn resonator_impedance(r: &ResonatorSpec, omega: f64) -> C64 {
    let zl = LossyInductor::new(r.l_ts, r.q_t).impedance(omega);
    let zc = cap_impedance(omega, r.c_ts);
    match r.topology {
        Topology::III => {
            let tank = parallel(zl, zc);
            let series = cap_impedance(omega, r.c_ts1);
            if !tank.is_finite() || !series.is_finite() {
                return infinite();
            }
            tank + series
        }
        Topology::I => {
            let tank = parallel(zl, zc);
            if !tank.is_finite() {
                return infinite();
            }
            tank + LossyInductor::new(r.l_ts1, r.q_t).impedance(omega)
        }
        Topology::IV => {
            let branch = if zc.is_finite() { zl + zc } else { infinite() };
            parallel(cap_impedance(omega, r.c_ts1), branch)
        }
        Topology::II => {
            let branch = if zc.is_finite() { zl + zc } else { infinite() };
            parallel(LossyInductor::new(r.l_ts1, r.q_t).impedance(omega), branch)
        }
    }
}

/// Closed-form lossless impedance of network III,
/// `[1 - ω²L(C + C1)] / [1 - ω²LC] · 1/(jωC1)`.
pub fn network_iii_closed_form(l_ts: f64, c_ts: f64, c_ts1: f64, omega: f64) -> C64 {
    let w2 = omega * omega;
    let num = 1.0 - w2 * l_ts * (c_ts + c_ts1);
    let den = 1.0 - w2 * l_ts * c_ts;
    if den == 0.0 {
        return infinite();
    }
    C64::new(0.0, -num / (den * omega * c_ts1))
}

fn pole_zero_of(arr: Arrangement, v: [f64; 3]) -> PoleZeroReport {
    use ElementKind::*;
    let w = |l: f64, c: f64| 1.0 / (l * c).sqrt();
    // v = [outer, pair0, pair1]; pair is always (L, C) for non-degenerate
    let (mut poles, mut zeros) = match arr {
        Arrangement::SeriesTank { series: C, .. } => {
            let (c1, l, c) = (v[0], v[1], v[2]);
            (vec![0.0, w(l, c)], vec![w(l, c + c1)])
        }
        Arrangement::SeriesTank { series: L, .. } => {
            let (l1, l, c) = (v[0], v[1], v[2]);
            (vec![w(l, c)], vec![0.0, w(l1 * l / (l1 + l), c)])
        }
        Arrangement::ShuntBranch { shunt: C, .. } => {
            let (c1, l, c) = (v[0], v[1], v[2]);
            (vec![0.0, w(l, c * c1 / (c + c1))], vec![w(l, c)])
        }
        Arrangement::ShuntBranch { shunt: L, .. } => {
            let (l1, l, c) = (v[0], v[1], v[2]);
            (vec![w(l1 + l, c)], vec![0.0, w(l, c)])
        }
    };
    poles.sort_by(f64::total_cmp);
    zeros.sort_by(f64::total_cmp);
    let fp = poles.iter().copied().filter(|p| *p > 0.0).fold(f64::NAN, f64::max);
    let fz = zeros.iter().copied().filter(|z| *z > 0.0).fold(f64::NAN, f64::max);
    let ordering = if fz > fp { Ordering::ZeroAbovePole } else { Ordering::PoleAboveZero };
    let degenerate = !(fp.is_finite() && fz.is_finite()) || (fp - fz).abs() <= 1e-12 * fp.max(fz);
    PoleZeroReport { poles, zeros, ordering, degenerate }
}

pub fn poles_zeros(r: &ResonatorSpec) -> PoleZeroReport {
    pole_zero_of(r.topology.arrangement(), [r.third(), r.l_ts, r.c_ts])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// `(ω_pole - ω_L) / ω_L` for the finite pole nearest ω_L.
    pub pole_placement_error: f64,
    /// `|Z_T(jω_H)| / R_L`.
    pub delta: f64,
    /// `α / (ω_H C_ts R_L)`; network III only.
    pub delta_min: Option<f64>,
    pub feasibility_margin: Option<f64>,
    /// `ω_H² / (ω_H² - ω_L²)`.
    pub alpha: f64,
    /// Equivalent capacitance of the resonator at ω_SC.
    pub c_sc: f64,
    pub delta_in_typical_range: bool,
}

/// Typical bounds on `δ`.
pub const DELTA_RANGE: (f64, f64) = (0.01, 0.1);

pub fn check_conditions(r: &ResonatorSpec, spec: &DesignSpec) -> ConditionReport {
    let wl = spec.omega_low();
    let wh = spec.omega_high();
    let wsc = spec.omega_sc();
    let pz = poles_zeros(r);
    let pole = pz
        .poles
        .iter()
        .copied()
        .filter(|p| *p > 0.0)
        .min_by(|a, b| (a - wl).abs().total_cmp(&(b - wl).abs()))
        .unwrap_or(f64::NAN);
    let alpha = wh * wh / (wh * wh - wl * wl);
    let delta = resonator_impedance(r, wh).norm() / spec.r_load;
    let (delta_min, c_sc) = match r.topology {
        Topology::III => {
            let dmin = alpha / (wh * r.c_ts * spec.r_load);
            let c_sc = (wh - wl) * r.c_ts1 / ((1.0 + r.c_ts1 / r.c_ts) * wh - wl);
            (Some(dmin), c_sc)
        }
        _ => (None, -1.0 / (wsc * resonator_impedance(r, wsc).im)),
    };
    ConditionReport {
        pole_placement_error: (pole - wl) / wl,
        delta,
        delta_min,
        feasibility_margin: delta_min.map(|d| delta - d),
        alpha,
        c_sc,
        delta_in_typical_range: (DELTA_RANGE.0..=DELTA_RANGE.1).contains(&delta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const PH: f64 = 1e-12;
    const PF: f64 = 1e-12;

    fn worked() -> ResonatorSpec {
        // values reproduced by direct evaluation of the design formulas
        let wl = 2.0 * PI * 28e9;
        let l_ts = 8.0 * PH;
        ResonatorSpec::network_iii(l_ts, 1.0 / (wl * wl * l_ts), 5.262062080357261 * PF, Quality::IDEAL)
    }

    #[test]
    fn lossless_pole_at_low_band() {
        let r = worked();
        let z = resonator_impedance(&r, 2.0 * PI * 28e9);
        assert!(z.norm() > 1e9 || !z.is_finite(), "{z}");
    }

    #[test]
    fn exact_pole_gives_sentinel() {
        let r = ResonatorSpec::network_iii(1.0, 1.0, 1.0, Quality::IDEAL);
        let z = resonator_impedance(&r, 1.0);
        assert!(z.im.is_infinite() && z.im > 0.0);
        assert!(network_iii_closed_form(1.0, 1.0, 1.0, 1.0).im.is_infinite());
    }

    #[test]
    fn upper_band_impedance_and_delta() {
        let r = worked();
        let z = resonator_impedance(&r, 2.0 * PI * 38e9);
        assert!((z.norm() - 3.06).abs() < 0.01, "{}", z.norm());
        assert!((z.norm() / 50.0 - 0.0613).abs() < 2e-4);
    }

    #[test]
    fn large_series_cap_approaches_minimum() {
        let wl = 2.0 * PI * 28e9;
        let wh = 2.0 * PI * 38e9;
        let r = ResonatorSpec { c_ts1: 1e3, ..worked() };
        let zmin = wh * wh / (wh * wh - wl * wl) / (wh * r.c_ts);
        let z = resonator_impedance(&r, wh).norm();
        assert!((z - zmin).abs() < 1e-9 * zmin);
    }

    #[test]
    fn worked_pole_zero() {
        let pz = poles_zeros(&worked());
        assert_eq!(pz.poles.len(), 2);
        assert_eq!(pz.poles[0], 0.0);
        assert!((pz.poles[1] / (2.0 * PI) - 28e9).abs() < 1.0);
        assert_eq!(pz.ordering, Ordering::PoleAboveZero);
        assert!(pz.zeros[0] < pz.poles[1]);
        assert!(!pz.degenerate);
    }

    #[test]
    fn vanishing_series_cap_is_degenerate() {
        let r = ResonatorSpec { c_ts1: 1e-30, ..worked() };
        assert!(poles_zeros(&r).degenerate);
        assert!(ResonatorSpec { c_ts1: 0.0, ..worked() }.is_degenerate());
    }

    #[test]
    fn scaling_lc_by_four_halves_pole() {
        let r = worked();
        let s = ResonatorSpec { l_ts: 2.0 * r.l_ts, c_ts: 2.0 * r.c_ts, ..r };
        let (p, q) = (poles_zeros(&r).poles[1], poles_zeros(&s).poles[1]);
        assert!((q - p / 2.0).abs() < 1e-9 * p);
    }

    #[test]
    fn condition_report_worked() {
        let spec = DesignSpec::worked_example();
        let rep = check_conditions(&worked(), &spec);
        assert!(rep.pole_placement_error.abs() < 1e-12);
        assert!((rep.alpha - 1444.0 / 660.0).abs() < 1e-12);
        assert!((rep.delta - 0.0613).abs() < 2e-4);
        // α / (ω_H C_ts R_L) evaluates to 0.0454 for these values
        let dmin = rep.delta_min.unwrap();
        assert!((dmin - 0.04538).abs() < 1e-4, "{dmin}");
        assert!(rep.feasibility_margin.unwrap() > 0.0);
        assert!((rep.c_sc / PF - 0.8842).abs() < 1e-3);
        assert!(rep.delta_in_typical_range);
    }

    #[test]
    fn enumeration_classifies_named_topologies() {
        let all = enumerate_three_element();
        assert_eq!(all.len(), 8);
        let named: Vec<_> = all.iter().filter(|c| c.named.is_some()).collect();
        assert_eq!(named.len(), 4);
        for c in named {
            let t = c.named.unwrap();
            let want = match t {
                Topology::I | Topology::II => Ordering::ZeroAbovePole,
                Topology::III | Topology::IV => Ordering::PoleAboveZero,
            };
            assert_eq!(c.ordering, Some(want), "{t:?}");
            assert!(!c.degenerate);
        }
        assert_eq!(all.iter().filter(|c| c.degenerate).count(), 4);
        assert_eq!(Topology::III.inductor_count(), 1);
        assert_eq!(Topology::I.inductor_count(), 2);
    }

    /// Finds sign changes of the reactance (zeros) and of its reciprocal
    /// (poles) by dense sampling, independently of the closed forms.
    fn sampled_critical_points(r: &ResonatorSpec) -> (Vec<f64>, Vec<f64>) {
        let (mut zeros, mut poles) = (vec![], vec![]);
        let n = 200_000;
        let (lo, hi) = (1e9f64.ln(), 1e13f64.ln());
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=n {
            let w = (lo + (hi - lo) * i as f64 / n as f64).exp();
            let x = resonator_impedance(r, w).im;
            if let Some((pw, px)) = prev {
                if px.signum() != x.signum() {
                    if px.abs() < 1e3 && x.abs() < 1e3 {
                        zeros.push((pw * w).sqrt());
                    } else {
                        poles.push((pw * w).sqrt());
                    }
                }
            }
            prev = Some((w, x));
        }
        (zeros, poles)
    }

    #[test]
    fn closed_form_poles_zeros_match_sampling() {
        for topology in [Topology::I, Topology::II, Topology::III, Topology::IV] {
            let r = ResonatorSpec {
                topology,
                l_ts: 1e-9,
                c_ts: 1e-12,
                c_ts1: 3e-12,
                l_ts1: 2e-9,
                q_t: Quality::IDEAL,
            };
            let pz = poles_zeros(&r);
            let (zs, ps) = sampled_critical_points(&r);
            let fin = |v: &Vec<f64>| v.iter().copied().filter(|x| *x > 0.0).collect::<Vec<_>>();
            assert_eq!(fin(&pz.zeros).len(), zs.len(), "{topology:?}");
            assert_eq!(fin(&pz.poles).len(), ps.len(), "{topology:?}");
            for (a, b) in fin(&pz.zeros).iter().zip(&zs) {
                assert!((a - b).abs() < 1e-3 * a, "{topology:?} zero {a} vs {b}");
            }
            for (a, b) in fin(&pz.poles).iter().zip(&ps) {
                assert!((a - b).abs() < 1e-3 * a, "{topology:?} pole {a} vs {b}");
            }
        }
    }

    proptest! {
        #[test]
        fn iii_matches_closed_form(
            l in 1e-12f64..1e-9, c in 1e-13f64..1e-11, c1 in 1e-13f64..1e-11, f in 1e9f64..1e11,
        ) {
            let w = 2.0 * PI * f;
            let r = ResonatorSpec::network_iii(l, c, c1, Quality::IDEAL);
            let a = resonator_impedance(&r, w);
            let b = network_iii_closed_form(l, c, c1, w);
            prop_assert!(a.re.abs() <= 1e-15 * a.norm().max(1.0));
            prop_assert!((a - b).norm() <= 1e-9 * b.norm().max(1e-12));
        }

        #[test]
        fn iii_zero_below_pole(l in 1e-12f64..1e-9, c in 1e-14f64..1e-11, c1 in 1e-14f64..1e-11) {
            let pz = poles_zeros(&ResonatorSpec::network_iii(l, c, c1, Quality::IDEAL));
            prop_assert!(pz.zeros[0] < pz.poles[1]);
            prop_assert_eq!(pz.ordering, Ordering::PoleAboveZero);
        }

        #[test]
        fn impedance_above_theoretical_minimum(
            fl in 1e9f64..50e9, ratio in 1.05f64..3.0, l in 1e-12f64..1e-10, c1 in 1e-15f64..1e-9,
        ) {
            let (wl, wh) = (2.0 * PI * fl, 2.0 * PI * fl * ratio);
            let c = 1.0 / (wl * wl * l);
            let zmin = wh * wh / (wh * wh - wl * wl) / (wh * c);
            let z = resonator_impedance(&ResonatorSpec::network_iii(l, c, c1, Quality::IDEAL), wh);
            prop_assert!(z.norm() > zmin);
        }
    }
}
