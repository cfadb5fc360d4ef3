//! Two-port network algebra: impedance and scattering representations,
//! conversions between them, Kron reduction of multiport impedance
//! matrices and the transducer power gain.

use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

const J: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TwoPortError {
    #[error("non-finite two-port entry {0}")]
    NonFinite(&'static str),
    #[error("degenerate network: (Z + Zref) is singular")]
    Degenerate,
    #[error("no Z representation: (I - S) is singular")]
    NoZRepresentation,
    #[error("reference impedance must be positive, got {0}")]
    BadReference(f64),
    #[error("termination resistance must be positive, got {0}")]
    BadTermination(f64),
    #[error("resonant singularity: transducer gain denominator vanishes")]
    ResonantSingularity,
    #[error("floating internal node {0}: zero pivot in reduction")]
    FloatingInternalNode(usize),
    #[error("index {index} out of range for {ports}-port")]
    IndexOutOfRange { index: usize, ports: usize },
}

/// Open-circuit impedance parameters at a single frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPortZ {
    pub z11: C64,
    pub z12: C64,
    pub z21: C64,
    pub z22: C64,
}

impl TwoPortZ {
    pub fn new(z11: C64, z12: C64, z21: C64, z22: C64) -> Result<Self, TwoPortError> {
        for (name, v) in [("z11", z11), ("z12", z12), ("z21", z21), ("z22", z22)] {
            if !v.is_finite() {
                return Err(TwoPortError::NonFinite(name));
            }
        }
        Ok(Self { z11, z12, z21, z22 })
    }

    pub fn from_matrix(m: [[C64; 2]; 2]) -> Result<Self, TwoPortError> {
        Self::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }

    pub fn as_matrix(&self) -> [[C64; 2]; 2] {
        [[self.z11, self.z12], [self.z21, self.z22]]
    }

    pub fn det(&self) -> C64 {
        self.z11 * self.z22 - self.z12 * self.z21
    }

    /// Impedance seen at port 1 with port 2 terminated in `z_load`.
    pub fn input_impedance(&self, z_load: C64) -> C64 {
        self.z11 - self.z12 * self.z21 / (self.z22 + z_load)
    }

    /// Impedance seen at port 2 with port 1 terminated in `z_source`.
    pub fn output_impedance(&self, z_source: C64) -> C64 {
        self.z22 - self.z12 * self.z21 / (self.z11 + z_source)
    }

    /// Every entry multiplied by a common factor.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            z11: self.z11 * k,
            z12: self.z12 * k,
            z21: self.z21 * k,
            z22: self.z22 * k,
        }
    }

    /// Relative reciprocity defect |z12 - z21| / max|z|.
    pub fn reciprocity_defect(&self) -> f64 {
        let scale = [self.z11, self.z12, self.z21, self.z22]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            0.0
        } else {
            (self.z12 - self.z21).norm() / scale
        }
    }
}

/// Scattering parameters with real, per-port reference resistances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPortS {
    pub s11: C64,
    pub s12: C64,
    pub s21: C64,
    pub s22: C64,
    pub zref1: f64,
    pub zref2: f64,
}

impl TwoPortS {
    pub fn new(
        s11: C64,
        s12: C64,
        s21: C64,
        s22: C64,
        zref1: f64,
        zref2: f64,
    ) -> Result<Self, TwoPortError> {
        check_ref(zref1)?;
        check_ref(zref2)?;
        for (name, v) in [("s11", s11), ("s12", s12), ("s21", s21), ("s22", s22)] {
            if !v.is_finite() {
                return Err(TwoPortError::NonFinite(name));
            }
        }
        Ok(Self { s11, s12, s21, s22, zref1, zref2 })
    }

    /// Ideal through connection between two ports of equal reference.
    pub fn through(zref: f64) -> Self {
        Self {
            s11: C64::new(0.0, 0.0),
            s12: C64::new(1.0, 0.0),
            s21: C64::new(1.0, 0.0),
            s22: C64::new(0.0, 0.0),
            zref1: zref,
            zref2: zref,
        }
    }

    pub fn as_matrix(&self) -> [[C64; 2]; 2] {
        [[self.s11, self.s12], [self.s21, self.s22]]
    }

    /// Column power sums `(|s11|² + |s21|², |s12|² + |s22|²)`; both are
    /// at most one for a passive network.
    pub fn power_sums(&self) -> (f64, f64) {
        (
            self.s11.norm_sqr() + self.s21.norm_sqr(),
            self.s12.norm_sqr() + self.s22.norm_sqr(),
        )
    }

    /// Re-expresses the same network against new real port references.
    pub fn renormalize(&self, zref1: f64, zref2: f64) -> Result<Self, TwoPortError> {
        check_ref(zref1)?;
        check_ref(zref2)?;
        // a' = P a + Q b, b' = Q a + P b per port; S' = (Q + P S)(P + Q S)^-1
        let pq = |r: f64, rn: f64| {
            let d = 2.0 * (r * rn).sqrt();
            ((r + rn) / d, (r - rn) / d)
        };
        let (p1, q1) = pq(self.zref1, zref1);
        let (p2, q2) = pq(self.zref2, zref2);
        let s = self.as_matrix();
        let num = [
            [q1 + p1 * s[0][0], p1 * s[0][1]],
            [p2 * s[1][0], q2 + p2 * s[1][1]],
        ];
        let den = [
            [p1 + q1 * s[0][0], q1 * s[0][1]],
            [q2 * s[1][0], p2 + q2 * s[1][1]],
        ];
        let inv = inverse2(den).ok_or(TwoPortError::Degenerate)?;
        let m = mul2(num, inv);
        Self::new(m[0][0], m[0][1], m[1][0], m[1][1], zref1, zref2)
    }
}

fn check_ref(r: f64) -> Result<(), TwoPortError> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(TwoPortError::BadReference(r))
    }
}

pub(crate) fn inverse2(m: [[C64; 2]; 2]) -> Option<[[C64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    if !det.is_finite() || det.norm() <= 1e-14 * scale * scale {
        return None;
    }
    Some([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]])
}

pub(crate) fn mul2(a: [[C64; 2]; 2], b: [[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// `S = R^-1/2 (Z - Zref)(Z + Zref)^-1 R^1/2` for real references.
pub fn z_to_s(z: &TwoPortZ, zref1: f64, zref2: f64) -> Result<TwoPortS, TwoPortError> {
    check_ref(zref1)?;
    check_ref(zref2)?;
    let r = [zref1, zref2];
    let zm = z.as_matrix();
    let mut minus = zm;
    let mut plus = zm;
    for i in 0..2 {
        minus[i][i] -= r[i];
        plus[i][i] += r[i];
    }
    let inv = inverse2(plus).ok_or(TwoPortError::Degenerate)?;
    let mut s = mul2(minus, inv);
    for (i, row) in s.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v *= (r[j] / r[i]).sqrt();
        }
    }
    TwoPortS::new(s[0][0], s[0][1], s[1][0], s[1][1], zref1, zref2)
}

/// `Z = R^1/2 (I - S)^-1 (I + S) R^1/2`.
pub fn s_to_z(s: &TwoPortS) -> Result<TwoPortZ, TwoPortError> {
    let sm = s.as_matrix();
    let one = C64::new(1.0, 0.0);
    let mut i_minus = [[-sm[0][0], -sm[0][1]], [-sm[1][0], -sm[1][1]]];
    let mut i_plus = sm;
    for i in 0..2 {
        i_minus[i][i] += one;
        i_plus[i][i] += one;
    }
    let inv = inverse2(i_minus).ok_or(TwoPortError::NoZRepresentation)?;
    let mut z = mul2(inv, i_plus);
    let r = [s.zref1, s.zref2];
    for (i, row) in z.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v *= (r[i] * r[j]).sqrt();
        }
    }
    TwoPortZ::from_matrix(z).map_err(|_| TwoPortError::NoZRepresentation)
}

/// Transducer power gain between resistive terminations:
/// `4 Rs Rl |z21|² / |(z11 + Rs)(z22 + Rl) - z12 z21|²`.
pub fn transducer_gain(z: &TwoPortZ, r_src: f64, r_load: f64) -> Result<f64, TwoPortError> {
    if !(r_src > 0.0) {
        return Err(TwoPortError::BadTermination(r_src));
    }
    if !(r_load > 0.0) {
        return Err(TwoPortError::BadTermination(r_load));
    }
    transducer_gain_terminated(z, C64::new(r_src, 0.0), C64::new(r_load, 0.0))
}

/// Transducer gain with complex source and load impedances. Available
/// power uses `Re(z_src)` and delivered power `Re(z_load)`, so shunt
/// reactances folded into the terminations leave the definition intact.
pub fn transducer_gain_terminated(
    z: &TwoPortZ,
    z_src: C64,
    z_load: C64,
) -> Result<f64, TwoPortError> {
    if !(z_src.re > 0.0) {
        return Err(TwoPortError::BadTermination(z_src.re));
    }
    if !(z_load.re > 0.0) {
        return Err(TwoPortError::BadTermination(z_load.re));
    }
    let den = (z.z11 + z_src) * (z.z22 + z_load) - z.z12 * z.z21;
    let den2 = den.norm_sqr();
    if den2 == 0.0 || !den2.is_finite() {
        return Err(TwoPortError::ResonantSingularity);
    }
    Ok(4.0 * z_src.re * z_load.re * z.z21.norm_sqr() / den2)
}

/// Impedance of `z` in parallel with admittance `y`, computed without
/// inverting `z` so that `z = 0` stays finite.
pub fn shunt(z: C64, y: C64) -> C64 {
    z / (C64::new(1.0, 0.0) + y * z)
}

/// Shunt-capacitor admittance `jωC`.
pub fn cap_admittance(omega: f64, c: f64) -> C64 {
    J * omega * c
}

/// Square multiport impedance matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPortZ {
    ports: usize,
    data: Vec<C64>,
}

impl MultiPortZ {
    pub fn new(ports: usize, data: Vec<C64>) -> Result<Self, TwoPortError> {
        assert_eq!(data.len(), ports * ports, "multiport data must be ports²");
        if data.iter().any(|z| !z.is_finite()) {
            return Err(TwoPortError::NonFinite("multiport entry"));
        }
        Ok(Self { ports, data })
    }

    pub fn zeros(ports: usize) -> Self {
        Self { ports, data: vec![C64::new(0.0, 0.0); ports * ports] }
    }

    pub fn ports(&self) -> usize {
        self.ports
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.ports + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.ports + j] = v;
    }

    fn check_index(&self, k: usize) -> Result<(), TwoPortError> {
        if k >= self.ports {
            Err(TwoPortError::IndexOutOfRange { index: k, ports: self.ports })
        } else {
            Ok(())
        }
    }

    /// Kron reduction: port `k` is shorted and removed,
    /// `z'_ij = z_ij - z_ik z_kj / z_kk`.
    pub fn eliminate_internal_node(&self, k: usize) -> Result<Self, TwoPortError> {
        self.check_index(k)?;
        let pivot = self.get(k, k);
        if pivot.norm() == 0.0 || !pivot.is_finite() {
            return Err(TwoPortError::FloatingInternalNode(k));
        }
        let n = self.ports - 1;
        let keep: Vec<usize> = (0..self.ports).filter(|&i| i != k).collect();
        let mut data = Vec::with_capacity(n * n);
        for &i in &keep {
            for &j in &keep {
                data.push(self.get(i, j) - self.get(i, k) * self.get(k, j) / pivot);
            }
        }
        MultiPortZ::new(n, data)
    }

    /// Drops port `k`, leaving it open-circuited.
    pub fn open_port(&self, k: usize) -> Result<Self, TwoPortError> {
        self.check_index(k)?;
        let keep: Vec<usize> = (0..self.ports).filter(|&i| i != k).collect();
        let mut data = Vec::with_capacity(keep.len() * keep.len());
        for &i in &keep {
            for &j in &keep {
                data.push(self.get(i, j));
            }
        }
        MultiPortZ::new(keep.len(), data)
    }

    pub fn to_twoport(&self) -> Result<TwoPortZ, TwoPortError> {
        if self.ports != 2 {
            return Err(TwoPortError::IndexOutOfRange { index: self.ports, ports: 2 });
        }
        TwoPortZ::new(self.get(0, 0), self.get(0, 1), self.get(1, 0), self.get(1, 1))
    }
}

/// Linear power ratio to dB.
pub fn power_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Wave amplitude to dB.
pub fn magnitude_db(x: f64) -> f64 {
    20.0 * x.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn matched_diagonal_has_zero_s() {
        let z = TwoPortZ::new(c(50.0), c(0.0), c(0.0), c(50.0)).unwrap();
        let s = z_to_s(&z, 50.0, 50.0).unwrap();
        for v in s.as_matrix().iter().flatten() {
            assert!(v.norm() < 1e-15);
        }
    }

    #[test]
    fn shunt_element_textbook_values() {
        let z = TwoPortZ::new(c(50.0), c(50.0), c(50.0), c(50.0)).unwrap();
        let s = z_to_s(&z, 50.0, 50.0).unwrap();
        assert!(close(s.s21, c(2.0 / 3.0), 1e-15));
        assert!(close(s.s11, c(-1.0 / 3.0), 1e-15));
        // Zp = R/2 between R terminations
        let zp = TwoPortZ::new(c(25.0), c(25.0), c(25.0), c(25.0)).unwrap();
        let g = transducer_gain(&zp, 50.0, 50.0).unwrap();
        assert!((g - 0.25).abs() < 1e-15);
        assert!((power_db(g) + 6.0206).abs() < 1e-4);
    }

    #[test]
    fn zero_s_maps_to_reference_diagonal() {
        let s = TwoPortS::new(c(0.0), c(0.0), c(0.0), c(0.0), 50.0, 50.0).unwrap();
        let z = s_to_z(&s).unwrap();
        assert!(close(z.z11, c(50.0), 1e-15) && close(z.z22, c(50.0), 1e-15));
        assert!(z.z12.norm() < 1e-15 && z.z21.norm() < 1e-15);
    }

    #[test]
    fn through_has_no_z() {
        assert_eq!(s_to_z(&TwoPortS::through(50.0)), Err(TwoPortError::NoZRepresentation));
    }

    #[test]
    fn round_trip_unequal_references() {
        let z = TwoPortZ::new(
            C64::new(12.0, 30.0),
            C64::new(3.0, -7.0),
            C64::new(3.0, -7.0),
            C64::new(80.0, -4.0),
        )
        .unwrap();
        let s = z_to_s(&z, 50.0, 25.0).unwrap();
        let back = s_to_z(&s).unwrap();
        for (a, b) in back.as_matrix().iter().flatten().zip(z.as_matrix().iter().flatten()) {
            assert!(close(*a, *b, 1e-12));
        }
    }

    #[test]
    fn degenerate_z_plus_ref() {
        let z = TwoPortZ::new(c(-50.0), c(0.0), c(0.0), c(-50.0)).unwrap();
        assert_eq!(z_to_s(&z, 50.0, 50.0), Err(TwoPortError::Degenerate));
    }

    #[test]
    fn rejects_non_finite() {
        assert!(TwoPortZ::new(C64::new(f64::INFINITY, 0.0), c(0.0), c(0.0), c(1.0)).is_err());
        assert!(MultiPortZ::new(1, vec![C64::new(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn resonant_singularity_reported() {
        // lossless series resonance cancelling the terminations
        let z = TwoPortZ::new(c(-50.0), c(0.0), c(0.0), c(1.0)).unwrap();
        assert_eq!(transducer_gain(&z, 50.0, 50.0), Err(TwoPortError::ResonantSingularity));
        assert!(transducer_gain(&z, 0.0, 50.0).is_err());
    }

    #[test]
    fn ideal_matched_transformer_gain_is_unity() {
        // two-winding 1:1, k = 1, magnetizing reactance tuned out by a
        // conjugate shunt: with huge ωL the network approaches a through
        let x = 1.0e9;
        let z = TwoPortZ::new(C64::new(0.0, x), C64::new(0.0, x), C64::new(0.0, x), C64::new(0.0, x))
            .unwrap();
        let g = transducer_gain(&z, 50.0, 50.0).unwrap();
        assert!((g - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kron_three_port_short_matches_direct() {
        // series Za from port1 to node, Zb node to ground, port3 = node shorted through Zc
        let (za, zb) = (C64::new(10.0, 5.0), C64::new(3.0, -20.0));
        // two-port: T network a - b with port 2 at the node through zero
        // Build as 3-port where port 3 is a branch Zc in parallel with Zb.
        let zc = C64::new(7.0, 2.0);
        // loop currents: I1 (through za, zb), I2 (through zb), I3 loop through zc and zb
        let full = MultiPortZ::new(
            3,
            vec![za + zb, zb, -zb, zb, zb, -zb, -zb, -zb, zb + zc],
        )
        .unwrap();
        let red = full.eliminate_internal_node(2).unwrap().to_twoport().unwrap();
        let zpar = zb * zc / (zb + zc);
        let direct = TwoPortZ::new(za + zpar, zpar, zpar, zpar).unwrap();
        for (a, b) in red.as_matrix().iter().flatten().zip(direct.as_matrix().iter().flatten()) {
            assert!(close(*a, *b, 1e-14));
        }
    }

    #[test]
    fn kron_of_diagonal_keeps_diagonal() {
        let mut m = MultiPortZ::zeros(3);
        m.set(0, 0, c(1.0));
        m.set(1, 1, c(2.0));
        m.set(2, 2, c(3.0));
        let r = m.eliminate_internal_node(1).unwrap();
        assert_eq!(r.get(0, 0), c(1.0));
        assert_eq!(r.get(1, 1), c(3.0));
        assert_eq!(r.get(0, 1), c(0.0));
    }

    #[test]
    fn kron_zero_pivot_is_floating_node() {
        let m = MultiPortZ::zeros(2);
        assert_eq!(m.eliminate_internal_node(1), Err(TwoPortError::FloatingInternalNode(1)));
    }

    #[test]
    fn renormalize_round_trip() {
        let z = TwoPortZ::new(
            C64::new(20.0, 3.0),
            C64::new(5.0, 1.0),
            C64::new(5.0, 1.0),
            C64::new(40.0, -9.0),
        )
        .unwrap();
        let s50 = z_to_s(&z, 50.0, 50.0).unwrap();
        let s_mixed = z_to_s(&z, 100.0, 25.0).unwrap();
        let back = s_mixed.renormalize(50.0, 50.0).unwrap();
        for (a, b) in back.as_matrix().iter().flatten().zip(s50.as_matrix().iter().flatten()) {
            assert!(close(*a, *b, 1e-13));
        }
        // a through keeps working with no Z-matrix
        let t = TwoPortS::through(50.0).renormalize(50.0, 50.0).unwrap();
        assert!(close(t.s21, c(1.0), 1e-15));
    }
}
