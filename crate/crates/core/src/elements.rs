//! Lumped elements with series-resistance loss and the center-tapped
//! transformer model.
//!
//! Windings are split into two halves each. Coil order in every 4×4
//! matrix is `(Lp1, Lp2, Ls1, Ls2)`. The secondary runs from the load
//! terminal through `Ls1` to the center tap and through `Ls2` to ground;
//! the tap is returned to ground through the resonator impedance.

use nalgebra::{Matrix4, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::twoport::{MultiPortZ, TwoPortError, TwoPortZ, C64};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElementError {
    #[error("unphysical coupling k = {0}: must lie in (0, 1]")]
    UnphysicalCoupling(f64),
    #[error("unrealizable transformer: inductance matrix has eigenvalue {0:e}")]
    Unrealizable(f64),
    #[error("winding split {0} must lie in (0, 1)")]
    BadSplit(f64),
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("angular frequency must be positive, got {0}")]
    BadFrequency(f64),
    #[error(transparent)]
    TwoPort(#[from] TwoPortError),
}

/// Quality factor; `None` is lossless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct Quality(pub Option<f64>);

impl Quality {
    pub const IDEAL: Quality = Quality(None);

    pub fn finite(q: f64) -> Self {
        if q.is_finite() {
            Quality(Some(q))
        } else {
            Quality(None)
        }
    }

    pub fn is_ideal(&self) -> bool {
        self.0.is_none()
    }

    /// Series loss `x / Q` for a reactance magnitude `x`.
    pub fn series_loss(&self, reactance: f64) -> f64 {
        match self.0 {
            Some(q) => reactance.abs() / q,
            None => 0.0,
        }
    }

    pub fn value(&self) -> f64 {
        self.0.unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossyInductor {
    pub inductance: f64,
    pub quality: Quality,
}

impl LossyInductor {
    pub fn new(inductance: f64, quality: Quality) -> Self {
        Self { inductance, quality }
    }

    /// `jωL + ωL/Q`.
    pub fn impedance(&self, omega: f64) -> C64 {
        let x = omega * self.inductance;
        C64::new(self.quality.series_loss(x), x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Capacitor {
    pub capacitance: f64,
    #[serde(default)]
    pub quality: Quality,
}

impl Capacitor {
    pub fn ideal(capacitance: f64) -> Self {
        Self { capacitance, quality: Quality::IDEAL }
    }

    /// `jωC + ωC/Q`.
    pub fn admittance(&self, omega: f64) -> C64 {
        let b = omega * self.capacitance;
        C64::new(self.quality.series_loss(b), b)
    }
}

/// How the winding halves couple across the primary/secondary gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingTopology {
    /// Each primary half couples to its mirror secondary half only.
    #[default]
    Mirror,
    /// Every primary half couples to every secondary half.
    AllPairs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformerSpec {
    pub l_primary: f64,
    pub l_secondary: f64,
    pub coupling: f64,
    pub q_xfmr: Quality,
    pub primary_split: f64,
    pub secondary_split: f64,
    #[serde(default)]
    pub topology: CouplingTopology,
}

impl TransformerSpec {
    /// Symmetric halves (split 0.5), mirror coupling.
    pub fn new(l_primary: f64, l_secondary: f64, coupling: f64, q_xfmr: Quality) -> Self {
        Self {
            l_primary,
            l_secondary,
            coupling,
            q_xfmr,
            primary_split: 0.5,
            secondary_split: 0.5,
            topology: CouplingTopology::Mirror,
        }
    }

    pub fn with_split(mut self, split: f64) -> Self {
        self.primary_split = split;
        self.secondary_split = split;
        self
    }

    pub fn with_topology(mut self, topology: CouplingTopology) -> Self {
        self.topology = topology;
        self
    }

    /// Half-winding inductances `(Lp1, Lp2, Ls1, Ls2)`.
    pub fn halves(&self) -> [f64; 4] {
        let (sp, ss) = (self.primary_split, self.secondary_split);
        [
            sp * self.l_primary,
            (1.0 - sp) * self.l_primary,
            ss * self.l_secondary,
            (1.0 - ss) * self.l_secondary,
        ]
    }

    /// Whole-winding mutual `k √(Lp Ls)`.
    pub fn winding_mutual(&self) -> f64 {
        self.coupling * (self.l_primary * self.l_secondary).sqrt()
    }

    pub fn validate(&self) -> Result<(), ElementError> {
        if !(self.l_primary > 0.0) {
            return Err(ElementError::NonPositive { what: "primary inductance", value: self.l_primary });
        }
        if !(self.l_secondary > 0.0) {
            return Err(ElementError::NonPositive {
                what: "secondary inductance",
                value: self.l_secondary,
            });
        }
        if !(self.coupling > 0.0 && self.coupling <= 1.0) {
            return Err(ElementError::UnphysicalCoupling(self.coupling));
        }
        for s in [self.primary_split, self.secondary_split] {
            if !(s > 0.0 && s < 1.0) {
                return Err(ElementError::BadSplit(s));
            }
        }
        Ok(())
    }
}

/// Coupling coefficients between the four half windings, indexed like
/// the inductance matrix.
pub fn coupling_coefficients(t: &TransformerSpec) -> [[f64; 4]; 4] {
    let l = inductance_matrix_unchecked(t);
    let mut k = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            k[i][j] = l[i][j] / (l[i][i] * l[j][j]).sqrt();
        }
    }
    k
}

fn inductance_matrix_unchecked(t: &TransformerSpec) -> [[f64; 4]; 4] {
    let h = t.halves();
    let mut l = [[0.0; 4]; 4];
    for i in 0..4 {
        l[i][i] = h[i];
    }
    match t.topology {
        CouplingTopology::Mirror => {
            for (p, s) in [(0, 2), (1, 3)] {
                let m = t.coupling * (h[p] * h[s]).sqrt();
                l[p][s] = m;
                l[s][p] = m;
            }
        }
        CouplingTopology::AllPairs => {
            let fp = [t.primary_split, 1.0 - t.primary_split];
            let fs = [t.secondary_split, 1.0 - t.secondary_split];
            let m = t.winding_mutual();
            for (i, a) in fp.iter().enumerate() {
                for (j, b) in fs.iter().enumerate() {
                    l[i][2 + j] = m * a * b;
                    l[2 + j][i] = m * a * b;
                }
            }
        }
    }
    l
}

/// Smallest eigenvalue of a symmetric 4×4 matrix.
pub fn min_eigenvalue(l: &[[f64; 4]; 4]) -> f64 {
    let m = Matrix4::from_fn(|i, j| l[i][j]);
    SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Inductance matrix of the four half windings, henries.
pub fn inductance_matrix(t: &TransformerSpec) -> Result<[[f64; 4]; 4], ElementError> {
    t.validate()?;
    let l = inductance_matrix_unchecked(t);
    let trace: f64 = (0..4).map(|i| l[i][i]).sum();
    let min = min_eigenvalue(&l);
    if min < -1e-12 * trace {
        return Err(ElementError::Unrealizable(min));
    }
    Ok(l)
}

/// Center-tap termination seen by the secondary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TapImpedance {
    Finite(C64),
    Open,
}

impl TapImpedance {
    pub fn from_value(z: C64) -> Self {
        if z.is_finite() {
            TapImpedance::Finite(z)
        } else {
            TapImpedance::Open
        }
    }
}

/// Two-port of the center-tapped transformer, port 1 across the full
/// primary, port 2 from the load terminal to ground.
///
/// Mesh currents `(I1, I2, It)`: `I1` through both primary halves, `I2`
/// into the load terminal through `Ls1`, `It` circulating through the tap
/// impedance and back through `Ls2`. The tap mesh is removed by Kron
/// reduction; an open tap simply drops it.
pub fn centertapped_twoport(
    t: &TransformerSpec,
    z_tap: TapImpedance,
    omega: f64,
) -> Result<TwoPortZ, ElementError> {
    if !(omega > 0.0) {
        return Err(ElementError::BadFrequency(omega));
    }
    let l = inductance_matrix(t)?;
    let mut coil = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            coil[i][j] = C64::new(0.0, omega * l[i][j]);
        }
        coil[i][i].re += t.q_xfmr.series_loss(omega * l[i][i]);
    }
    // coil currents = incidence · mesh currents
    const INC: [[f64; 3]; 4] = [[1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 1.0, -1.0]];
    let mut mesh = MultiPortZ::zeros(3);
    for a in 0..3 {
        for b in 0..3 {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..4 {
                if INC[i][a] == 0.0 {
                    continue;
                }
                for j in 0..4 {
                    if INC[j][b] != 0.0 {
                        acc += coil[i][j] * (INC[i][a] * INC[j][b]);
                    }
                }
            }
            mesh.set(a, b, acc);
        }
    }
    let reduced = match z_tap {
        TapImpedance::Open => mesh.open_port(2)?,
        TapImpedance::Finite(z) => {
            mesh.set(2, 2, mesh.get(2, 2) + z);
            mesh.eliminate_internal_node(2)?
        }
    };
    Ok(reduced.to_twoport()?)
}
