//! The complete dual-band network: source and load terminations with
//! their parasitic capacitances, the center-tapped transformer and the
//! tap resonator. Closed-form evaluation goes through the transformer
//! two-port, `network_netlist` builds the equivalent circuit for the
//! nodal solver.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::elements::{
    centertapped_twoport, coupling_coefficients, Capacitor, ElementError, Quality, TapImpedance,
    TransformerSpec,
};
use crate::netlist::{AcSweep, ElementKind, Item, Netlist, NetlistElement};
use crate::resonator::{resonator_impedance, ResonatorSpec, Topology};
use crate::twoport::{
    shunt, transducer_gain_terminated, TwoPortError, TwoPortS, TwoPortZ, C64,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Terminations {
    pub r_source: f64,
    pub c_source: f64,
    pub r_load: f64,
    pub c_load: f64,
}

impl Terminations {
    /// Source impedance `R_opt ‖ C_p` at `omega`.
    pub fn source(&self, omega: f64) -> C64 {
        shunt(C64::new(self.r_source, 0.0), Capacitor::ideal(self.c_source).admittance(omega))
    }

    /// Load impedance `R_L ‖ C_s` at `omega`.
    pub fn load(&self, omega: f64) -> C64 {
        shunt(C64::new(self.r_load, 0.0), Capacitor::ideal(self.c_load).admittance(omega))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchingNetwork {
    pub transformer: TransformerSpec,
    pub resonator: ResonatorSpec,
    pub terminations: Terminations,
}

/// Frequency-domain quantities of the network at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResponse {
    pub freq: f64,
    pub gain: f64,
    pub s: TwoPortS,
}

impl MatchingNetwork {
    pub fn tap(&self, omega: f64) -> TapImpedance {
        TapImpedance::from_value(resonator_impedance(&self.resonator, omega))
    }

    /// Transformer plus resonator, without the port capacitances.
    pub fn core_twoport(&self, omega: f64) -> Result<TwoPortZ, ElementError> {
        centertapped_twoport(&self.transformer, self.tap(omega), omega)
    }

    /// Input impedance including `C_p`, output loaded by `R_L ‖ C_s`.
    pub fn input_impedance(&self, omega: f64) -> Result<C64, ElementError> {
        let z = self.core_twoport(omega)?;
        let zin = z.input_impedance(self.terminations.load(omega));
        Ok(shunt(zin, Capacitor::ideal(self.terminations.c_source).admittance(omega)))
    }

    /// Output impedance of the transformer with the source `R_opt ‖ C_p`
    /// attached, excluding `C_s`.
    pub fn output_impedance(&self, omega: f64) -> Result<C64, ElementError> {
        let z = self.core_twoport(omega)?;
        Ok(z.output_impedance(self.terminations.source(omega)))
    }

    /// Transducer gain through the transformer two-port with the port
    /// capacitances folded into complex terminations.
    pub fn transducer_gain(&self, omega: f64) -> Result<f64, ElementError> {
        let z = self.core_twoport(omega)?;
        Ok(transducer_gain_terminated(
            &z,
            self.terminations.source(omega),
            self.terminations.load(omega),
        )?)
    }

    /// Full two-port S-parameters referenced to `(R_opt, R_L)`, computed by
    /// cascading shunt `C_p`, the transformer and shunt `C_s` as ABCD
    /// matrices.
    pub fn s_params(&self, omega: f64) -> Result<TwoPortS, ElementError> {
        let z = self.core_twoport(omega)?;
        if z.z21.norm() == 0.0 {
            return Err(TwoPortError::ResonantSingularity.into());
        }
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let core = [[z.z11 / z.z21, z.det() / z.z21], [one / z.z21, z.z22 / z.z21]];
        let yp = Capacitor::ideal(self.terminations.c_source).admittance(omega);
        let ys = Capacitor::ideal(self.terminations.c_load).admittance(omega);
        let m = mul(mul([[one, zero], [yp, one]], core), [[one, zero], [ys, one]]);
        let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
        let (r1, r2) = (self.terminations.r_source, self.terminations.r_load);
        let den = a * r2 + b + c * r1 * r2 + d * r1;
        let det = a * d - b * c;
        let k = 2.0 * (r1 * r2).sqrt();
        Ok(TwoPortS::new(
            (a * r2 + b - c * r1 * r2 - d * r1) / den,
            k * det / den,
            k / den,
            (-a * r2 + b - c * r1 * r2 + d * r1) / den,
            r1,
            r2,
        )?)
    }

    pub fn point(&self, freq: f64) -> Result<PointResponse, ElementError> {
        let w = 2.0 * PI * freq;
        Ok(PointResponse { freq, gain: self.transducer_gain(w)?, s: self.s_params(w)? })
    }

    /// Closed-form transducer gain at each frequency.
    pub fn gain_curve(&self, freqs: &[f64]) -> Result<Vec<f64>, ElementError> {
        freqs.iter().map(|f| self.transducer_gain(2.0 * PI * f)).collect()
    }

    /// Same network with coupling / losses overridden where given.
    pub fn with_losses(
        &self,
        coupling: Option<f64>,
        q_xfmr: Option<Quality>,
        q_t: Option<Quality>,
    ) -> Self {
        let mut out = *self;
        if let Some(k) = coupling {
            out.transformer.coupling = k;
        }
        if let Some(q) = q_xfmr {
            out.transformer.q_xfmr = q;
        }
        if let Some(q) = q_t {
            out.resonator.q_t = q;
        }
        out
    }

    /// Multiplies every impedance level by `k`: inductances and
    /// resistances scale up, capacitances down.
    pub fn impedance_scaled(&self, k: f64) -> Self {
        let mut out = *self;
        out.transformer.l_primary *= k;
        out.transformer.l_secondary *= k;
        out.resonator.l_ts *= k;
        out.resonator.l_ts1 *= k;
        out.resonator.c_ts /= k;
        out.resonator.c_ts1 /= k;
        out.terminations.r_source *= k;
        out.terminations.r_load *= k;
        out.terminations.c_source /= k;
        out.terminations.c_load /= k;
        out
    }

    /// Equivalent circuit in netlist form. Port 1 drives the primary
    /// (node `p`, return grounded), port 2 is the load terminal `out`.
    pub fn to_netlist(&self, title: &str, sweep: AcSweep) -> Netlist {
        let t = &self.transformer;
        let h = t.halves();
        let k = coupling_coefficients(t);
        let qx = t.q_xfmr.0;
        let qt = self.resonator.q_t.0;
        let r = &self.resonator;
        let mut items = Vec::new();
        let el = |name: &str, kind: ElementKind, comment: Option<&str>| {
            Item::Element(NetlistElement {
                name: name.to_string(),
                kind,
                comment: comment.map(str::to_string),
            })
        };
        let two = |a: &str, b: &str| (a.to_string(), b.to_string());
        items.push(Item::Comment("* source and load ports".into()));
        items.push(el("P1", ElementKind::Port { index: 1, nodes: two("p", "0"), z_ref: self.terminations.r_source }, None));
        items.push(el("P2", ElementKind::Port { index: 2, nodes: two("out", "0"), z_ref: self.terminations.r_load }, None));
        items.push(el("Cp", ElementKind::Capacitor { nodes: two("p", "0"), value: self.terminations.c_source, q: None }, Some("primary parasitic")));
        items.push(el("Cs", ElementKind::Capacitor { nodes: two("out", "0"), value: self.terminations.c_load, q: None }, Some("secondary parasitic")));
        items.push(Item::Comment("* center-tapped transformer".into()));
        items.push(el("Lp1", ElementKind::Inductor { nodes: two("p", "pc"), value: h[0], q: qx }, None));
        items.push(el("Lp2", ElementKind::Inductor { nodes: two("pc", "0"), value: h[1], q: qx }, None));
        items.push(el("Ls1", ElementKind::Inductor { nodes: two("out", "tap"), value: h[2], q: qx }, None));
        items.push(el("Ls2", ElementKind::Inductor { nodes: two("tap", "0"), value: h[3], q: qx }, None));
        let names = ["Lp1", "Lp2", "Ls1", "Ls2"];
        let mut kn = 1;
        for p in 0..2 {
            for s in 2..4 {
                if k[p][s] != 0.0 {
                    items.push(el(
                        &format!("K{kn}"),
                        ElementKind::Coupling { inductors: two(names[p], names[s]), k: k[p][s] },
                        None,
                    ));
                    kn += 1;
                }
            }
        }
        items.push(Item::Comment("* center-tap resonator".into()));
        match r.topology {
            Topology::III => {
                items.push(el("Lts", ElementKind::Inductor { nodes: two("tap", "rt"), value: r.l_ts, q: qt }, None));
                items.push(el("Cts", ElementKind::Capacitor { nodes: two("tap", "rt"), value: r.c_ts, q: None }, Some("pole at the lower band")));
                items.push(el("Cts1", ElementKind::Capacitor { nodes: two("rt", "0"), value: r.c_ts1, q: None }, None));
            }
            Topology::I => {
                items.push(el("Lts", ElementKind::Inductor { nodes: two("tap", "rt"), value: r.l_ts, q: qt }, None));
                items.push(el("Cts", ElementKind::Capacitor { nodes: two("tap", "rt"), value: r.c_ts, q: None }, None));
                items.push(el("Lts1", ElementKind::Inductor { nodes: two("rt", "0"), value: r.l_ts1, q: qt }, None));
            }
            Topology::IV => {
                items.push(el("Cts1", ElementKind::Capacitor { nodes: two("tap", "0"), value: r.c_ts1, q: None }, None));
                items.push(el("Lts", ElementKind::Inductor { nodes: two("tap", "rt"), value: r.l_ts, q: qt }, None));
                items.push(el("Cts", ElementKind::Capacitor { nodes: two("rt", "0"), value: r.c_ts, q: None }, None));
            }
            Topology::II => {
                items.push(el("Lts1", ElementKind::Inductor { nodes: two("tap", "0"), value: r.l_ts1, q: qt }, None));
                items.push(el("Lts", ElementKind::Inductor { nodes: two("tap", "rt"), value: r.l_ts, q: qt }, None));
                items.push(el("Cts", ElementKind::Capacitor { nodes: two("rt", "0"), value: r.c_ts, q: None }, None));
            }
        }
        Netlist { title: title.to_string(), items, analysis: sweep }
    }
}

fn mul(a: [[C64; 2]; 2], b: [[C64; 2]; 2]) -> [[C64; 2]; 2] {
    crate::twoport::mul2(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twoport::transducer_gain;

    fn sample() -> MatchingNetwork {
        MatchingNetwork {
            transformer: TransformerSpec::new(107.7e-12, 107.7e-12, 0.8, Quality::finite(25.0)),
            resonator: ResonatorSpec::network_iii(8e-12, 4.0386e-12, 5.262e-12, Quality::finite(30.0)),
            terminations: Terminations { r_source: 50.0, c_source: 150e-15, r_load: 50.0, c_load: 150e-15 },
        }
    }

    #[test]
    fn s21_power_equals_transducer_gain() {
        let n = sample();
        for f in [21e9, 28e9, 32.6e9, 38e9, 44e9] {
            let p = n.point(f).unwrap();
            assert!((p.s.s21.norm_sqr() - p.gain).abs() <= 1e-12 * p.gain.max(1e-12));
            assert!((p.s.s12 - p.s.s21).norm() <= 1e-12 * p.s.s21.norm());
        }
    }

    #[test]
    fn input_reflection_consistent_with_impedance() {
        let n = sample();
        let w = 2.0 * PI * 30e9;
        let zin = n.input_impedance(w).unwrap();
        let g = (zin - 50.0) / (zin + 50.0);
        let s = n.s_params(w).unwrap();
        assert!((s.s11 - g).norm() < 1e-12);
    }

    #[test]
    fn purely_resistive_terminations_reduce_to_eq_form() {
        let mut n = sample();
        n.terminations.c_source = 0.0;
        n.terminations.c_load = 0.0;
        let w = 2.0 * PI * 33e9;
        let z = n.core_twoport(w).unwrap();
        assert_eq!(n.transducer_gain(w).unwrap(), transducer_gain(&z, 50.0, 50.0).unwrap());
    }

    #[test]
    fn impedance_scaling_keeps_gain() {
        let n = sample();
        let m = n.impedance_scaled(3.7);
        for f in [25e9, 33e9, 40e9] {
            let (a, b) = (n.point(f).unwrap().gain, m.point(f).unwrap().gain);
            assert!((a - b).abs() <= 1e-12 * a);
        }
    }
}
