//! AC modified nodal analysis over a parsed [`Netlist`].
//!
//! Unknowns are the non-ground node voltages, one branch current per
//! inductor and one per port. Ports are a source `E` behind their
//! reference resistance; the branch current flows out of `n+` into the
//! source, which keeps the stamped matrix complex symmetric.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

use crate::netlist::{ElementKind, Netlist};
use crate::twoport::{TwoPortS, C64};

/// Relative residual every solve must meet.
pub const RESIDUAL_BOUND: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MnaError {
    #[error("floating node or shorted loop at {freq} Hz (nodes: {nodes:?})")]
    Singular { freq: f64, nodes: Vec<String> },
    #[error("solution residual {residual:e} above bound at {freq} Hz")]
    Inaccurate { freq: f64, residual: f64 },
    #[error("unrealizable coupling set {0:?}")]
    UnrealizableCoupling(Vec<String>),
    #[error("coupling {name} references unknown inductor {inductor}")]
    UnknownInductor { name: String, inductor: String },
    #[error("coupling {name} has |k| = {k} above 1")]
    CouplingRange { name: String, k: f64 },
    #[error("netlist declares no ports")]
    NoPorts,
    #[error("port {0} out of range")]
    PortRange(usize),
    #[error("frequency {0} Hz must be positive and finite")]
    BadFrequency(f64),
}

#[derive(Debug, Clone)]
enum Stamp {
    Admittance { a: Option<usize>, b: Option<usize>, g: f64, c: f64, q: Option<f64> },
    Inductor { a: Option<usize>, b: Option<usize>, row: usize, l: f64, q: Option<f64> },
    Mutual { r1: usize, r2: usize, m: f64 },
    Port { a: Option<usize>, b: Option<usize>, row: usize, z_ref: f64 },
}

/// Assembly plan for one netlist; immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct AcSolver {
    nodes: Vec<String>,
    inductors: Vec<String>,
    stamps: Vec<Stamp>,
    port_rows: Vec<usize>,
    port_refs: Vec<f64>,
    edges: Vec<(Option<usize>, Option<usize>)>,
    dim: usize,
}

/// Matrix and excitation for a single frequency.
#[derive(Debug, Clone)]
pub struct StampedSystem {
    pub freq: f64,
    pub matrix: Vec<C64>,
    pub dim: usize,
}

impl StampedSystem {
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix[i * self.dim + j]
    }

    fn add(&mut self, i: usize, j: usize, v: C64) {
        self.matrix[i * self.dim + j] += v;
    }

    /// Largest `|a_ij - a_ji|` over `max |a_ij|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                scale = scale.max(self.get(i, j).norm());
                worst = worst.max((self.get(i, j) - self.get(j, i)).norm());
            }
        }
        if scale == 0.0 { 0.0 } else { worst / scale }
    }
}

/// Solution of one excitation at one frequency.
#[derive(Debug, Clone)]
pub struct AcSolution {
    pub freq: f64,
    pub unknowns: Vec<C64>,
    pub residual: f64,
    node_count: usize,
}

impl AcSolution {
    pub fn node_voltages(&self) -> &[C64] {
        &self.unknowns[..self.node_count]
    }

    pub fn branch_currents(&self) -> &[C64] {
        &self.unknowns[self.node_count..]
    }
}

/// S-matrices over a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    pub frequencies: Vec<f64>,
    pub z_ref: Vec<f64>,
    /// Row-major `ports × ports` per frequency.
    pub s: Vec<Vec<C64>>,
}

impl FrequencyResponse {
    pub fn ports(&self) -> usize {
        self.z_ref.len()
    }

    /// `S_ij` at grid index `k`, ports numbered from 1.
    pub fn s_at(&self, k: usize, i: usize, j: usize) -> C64 {
        self.s[k][(i - 1) * self.ports() + (j - 1)]
    }

    /// `|S_out,in|²`, which is the transducer gain between real references.
    pub fn gain(&self, k: usize, out: usize, inp: usize) -> f64 {
        self.s_at(k, out, inp).norm_sqr()
    }

    pub fn gain_curve(&self, out: usize, inp: usize) -> Vec<f64> {
        (0..self.frequencies.len()).map(|k| self.gain(k, out, inp)).collect()
    }

    /// Two-port view on ports `(p1, p2)`; the others stay terminated.
    pub fn twoport(&self, k: usize, p1: usize, p2: usize) -> TwoPortS {
        TwoPortS {
            s11: self.s_at(k, p1, p1),
            s12: self.s_at(k, p1, p2),
            s21: self.s_at(k, p2, p1),
            s22: self.s_at(k, p2, p2),
            zref1: self.z_ref[p1 - 1],
            zref2: self.z_ref[p2 - 1],
        }
    }

    pub fn select(&self, p1: usize, p2: usize) -> Result<FrequencyResponse, MnaError> {
        for p in [p1, p2] {
            if p == 0 || p > self.ports() {
                return Err(MnaError::PortRange(p));
            }
        }
        Ok(FrequencyResponse {
            frequencies: self.frequencies.clone(),
            z_ref: vec![self.z_ref[p1 - 1], self.z_ref[p2 - 1]],
            s: (0..self.frequencies.len())
                .map(|k| {
                    let t = self.twoport(k, p1, p2);
                    vec![t.s11, t.s12, t.s21, t.s22]
                })
                .collect(),
        })
    }
}

fn lu_factor(a: &mut [C64], n: usize) -> Result<Vec<usize>, ()> {
    let mut piv: Vec<usize> = (0..n).collect();
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    for k in 0..n {
        let (p, best) = (k..n)
            .map(|i| (i, a[i * n + k].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if !(best > 1e-14 * scale) {
            return Err(());
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            piv.swap(k, p);
        }
        let d = a[k * n + k];
        for i in k + 1..n {
            let f = a[i * n + k] / d;
            a[i * n + k] = f;
            if f != C64::new(0.0, 0.0) {
                for j in k + 1..n {
                    let u = a[k * n + j];
                    a[i * n + j] -= f * u;
                }
            }
        }
    }
    Ok(piv)
}

fn lu_solve(lu: &[C64], piv: &[usize], n: usize, b: &[C64]) -> Vec<C64> {
    let mut x: Vec<C64> = piv.iter().map(|&p| b[p]).collect();
    for i in 0..n {
        for j in 0..i {
            let l = lu[i * n + j];
            x[i] = x[i] - l * x[j];
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            let u = lu[i * n + j];
            x[i] = x[i] - u * x[j];
        }
        x[i] /= lu[i * n + i];
    }
    x
}

fn residual(a: &[C64], n: usize, x: &[C64], b: &[C64]) -> Vec<C64> {
    (0..n)
        .map(|i| b[i] - (0..n).map(|j| a[i * n + j] * x[j]).sum::<C64>())
        .collect()
}

fn inf_norm(v: &[C64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.norm()))
}

impl AcSolver {
    pub fn new(netlist: &Netlist) -> Result<Self, MnaError> {
        let mut nodes: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut node = |name: &str| -> Option<usize> {
            if name == "0" {
                return None;
            }
            Some(*index.entry(name.to_string()).or_insert_with(|| {
                nodes.push(name.to_string());
                nodes.len() - 1
            }))
        };
        let mut pending = Vec::new();
        let mut edges = Vec::new();
        let mut inductors: Vec<(String, f64)> = Vec::new();
        let mut ports: Vec<(usize, Option<usize>, Option<usize>, f64)> = Vec::new();
        let mut couplings = Vec::new();
        for e in netlist.elements() {
            match &e.kind {
                ElementKind::Resistor { nodes: (p, m), value } => {
                    let (a, b) = (node(p), node(m));
                    edges.push((a, b));
                    pending.push(Stamp::Admittance { a, b, g: 1.0 / value, c: 0.0, q: None });
                }
                ElementKind::Capacitor { nodes: (p, m), value, q } => {
                    let (a, b) = (node(p), node(m));
                    if *value > 0.0 {
                        edges.push((a, b));
                    }
                    pending.push(Stamp::Admittance { a, b, g: 0.0, c: *value, q: *q });
                }
                ElementKind::Inductor { nodes: (p, m), value, q } => {
                    let (a, b) = (node(p), node(m));
                    edges.push((a, b));
                    let row = inductors.len();
                    inductors.push((e.name.to_ascii_lowercase(), *value));
                    pending.push(Stamp::Inductor { a, b, row, l: *value, q: *q });
                }
                ElementKind::Coupling { inductors: (l1, l2), k } => {
                    couplings.push((e.name.clone(), l1.to_ascii_lowercase(), l2.to_ascii_lowercase(), *k));
                }
                ElementKind::Port { index, nodes: (p, m), z_ref } => {
                    let (a, b) = (node(p), node(m));
                    edges.push((a, b));
                    ports.push((*index, a, b, *z_ref));
                }
            }
        }
        let n_nodes = nodes.len();
        let l_index: HashMap<&str, usize> =
            inductors.iter().enumerate().map(|(i, (n, _))| (n.as_str(), i)).collect();
        let mut stamps = Vec::new();
        for s in pending {
            stamps.push(match s {
                Stamp::Inductor { a, b, row, l, q } => Stamp::Inductor { a, b, row: n_nodes + row, l, q },
                other => other,
            });
        }
        let mut pairs = Vec::new();
        for (name, l1, l2, k) in &couplings {
            if k.abs() > 1.0 {
                return Err(MnaError::CouplingRange { name: name.clone(), k: *k });
            }
            let mut idx = [0usize; 2];
            for (slot, l) in idx.iter_mut().zip([l1, l2]) {
                *slot = *l_index
                    .get(l.as_str())
                    .ok_or_else(|| MnaError::UnknownInductor { name: name.clone(), inductor: l.clone() })?;
            }
            pairs.push((idx[0], idx[1], *k));
        }
        for (i, j, m) in mutual_stamps(&inductors, &pairs)? {
            stamps.push(Stamp::Mutual { r1: n_nodes + i, r2: n_nodes + j, m });
        }
        ports.sort_by_key(|p| p.0);
        let base = n_nodes + inductors.len();
        let mut port_rows = Vec::new();
        let mut port_refs = Vec::new();
        for (k, (_, a, b, z_ref)) in ports.into_iter().enumerate() {
            stamps.push(Stamp::Port { a, b, row: base + k, z_ref });
            port_rows.push(base + k);
            port_refs.push(z_ref);
        }
        let dim = base + port_rows.len();
        Ok(Self {
            nodes,
            inductors: inductors.into_iter().map(|(n, _)| n).collect(),
            stamps,
            port_rows,
            port_refs,
            edges,
            dim,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn node_names(&self) -> &[String] {
        &self.nodes
    }

    pub fn inductor_names(&self) -> &[String] {
        &self.inductors
    }

    pub fn port_refs(&self) -> &[f64] {
        &self.port_refs
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn stamp(&self, freq: f64) -> Result<StampedSystem, MnaError> {
        if !(freq > 0.0 && freq.is_finite()) {
            return Err(MnaError::BadFrequency(freq));
        }
        let w = 2.0 * PI * freq;
        let mut sys = StampedSystem { freq, matrix: vec![C64::new(0.0, 0.0); self.dim * self.dim], dim: self.dim };
        let one = C64::new(1.0, 0.0);
        for s in &self.stamps {
            match *s {
                Stamp::Admittance { a, b, g, c, q } => {
                    let wc = w * c;
                    let y = C64::new(g + q.map_or(0.0, |q| wc / q), wc);
                    if let Some(a) = a {
                        sys.add(a, a, y);
                    }
                    if let Some(b) = b {
                        sys.add(b, b, y);
                    }
                    if let (Some(a), Some(b)) = (a, b) {
                        sys.add(a, b, -y);
                        sys.add(b, a, -y);
                    }
                }
                Stamp::Inductor { a, b, row, l, q } => {
                    let wl = w * l;
                    let z = C64::new(q.map_or(0.0, |q| wl / q), wl);
                    if let Some(a) = a {
                        sys.add(a, row, one);
                        sys.add(row, a, one);
                    }
                    if let Some(b) = b {
                        sys.add(b, row, -one);
                        sys.add(row, b, -one);
                    }
                    sys.add(row, row, -z);
                }
                Stamp::Mutual { r1, r2, m } => {
                    let z = C64::new(0.0, w * m);
                    sys.add(r1, r2, -z);
                    sys.add(r2, r1, -z);
                }
                Stamp::Port { a, b, row, z_ref } => {
                    if let Some(a) = a {
                        sys.add(a, row, one);
                        sys.add(row, a, one);
                    }
                    if let Some(b) = b {
                        sys.add(b, row, -one);
                        sys.add(row, b, -one);
                    }
                    sys.add(row, row, C64::new(-z_ref, 0.0));
                }
            }
        }
        Ok(sys)
    }

    /// Nodes with no element path to ground.
    pub fn floating_nodes(&self) -> Vec<String> {
        let n = self.nodes.len();
        let mut adj = vec![Vec::new(); n];
        let mut grounded = VecDeque::new();
        let mut seen = vec![false; n];
        for (a, b) in &self.edges {
            match (a, b) {
                (Some(a), Some(b)) => {
                    adj[*a].push(*b);
                    adj[*b].push(*a);
                }
                (Some(a), None) | (None, Some(a)) => grounded.push_back(*a),
                (None, None) => {}
            }
        }
        while let Some(v) = grounded.pop_front() {
            if std::mem::replace(&mut seen[v], true) {
                continue;
            }
            grounded.extend(adj[v].iter().copied().filter(|u| !seen[*u]));
        }
        let set: BTreeSet<&String> = (0..n).filter(|i| !seen[*i]).map(|i| &self.nodes[i]).collect();
        set.into_iter().cloned().collect()
    }

    /// Solves for several right-hand sides sharing one factorization.
    pub fn solve_many(&self, freq: f64, rhs: &[Vec<C64>]) -> Result<Vec<AcSolution>, MnaError> {
        let sys = self.stamp(freq)?;
        let n = self.dim;
        let mut lu = sys.matrix.clone();
        let piv = lu_factor(&mut lu, n)
            .map_err(|_| MnaError::Singular { freq, nodes: self.floating_nodes() })?;
        rhs.iter()
            .map(|b| {
                let mut x = lu_solve(&lu, &piv, n, b);
                let bn = inf_norm(b).max(f64::MIN_POSITIVE);
                let mut r = residual(&sys.matrix, n, &x, b);
                if inf_norm(&r) / bn >= RESIDUAL_BOUND {
                    let dx = lu_solve(&lu, &piv, n, &r);
                    for (xi, d) in x.iter_mut().zip(dx) {
                        *xi += d;
                    }
                    r = residual(&sys.matrix, n, &x, b);
                }
                let res = inf_norm(&r) / bn;
                if !(res < RESIDUAL_BOUND) || x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                    return Err(MnaError::Inaccurate { freq, residual: res });
                }
                Ok(AcSolution { freq, unknowns: x, residual: res, node_count: self.nodes.len() })
            })
            .collect()
    }

    fn port_rhs(&self, port: usize) -> Vec<C64> {
        let mut b = vec![C64::new(0.0, 0.0); self.dim];
        b[self.port_rows[port]] = C64::new(1.0, 0.0);
        b
    }

    /// Response to a unit source at port 1 with all other ports terminated.
    pub fn solve(&self, freq: f64) -> Result<AcSolution, MnaError> {
        let b = if self.port_rows.is_empty() { vec![C64::new(0.0, 0.0); self.dim] } else { self.port_rhs(0) };
        Ok(self.solve_many(freq, &[b])?.remove(0))
    }

    /// Full S-matrix (row-major) at one frequency.
    pub fn s_matrix(&self, freq: f64) -> Result<Vec<C64>, MnaError> {
        let p = self.port_rows.len();
        if p == 0 {
            return Err(MnaError::NoPorts);
        }
        let rhs: Vec<_> = (0..p).map(|j| self.port_rhs(j)).collect();
        let sols = self.solve_many(freq, &rhs)?;
        let mut s = vec![C64::new(0.0, 0.0); p * p];
        for (j, sol) in sols.iter().enumerate() {
            for i in 0..p {
                let v = self.port_voltage(sol, i, i == j);
                s[i * p + j] = if i == j {
                    2.0 * v - 1.0
                } else {
                    2.0 * v * (self.port_refs[j] / self.port_refs[i]).sqrt()
                };
            }
        }
        Ok(s)
    }

    fn port_voltage(&self, sol: &AcSolution, port: usize, driven: bool) -> C64 {
        // branch row reads V+ - V- - R J = E
        let e = if driven { 1.0 } else { 0.0 };
        sol.unknowns[self.port_rows[port]] * self.port_refs[port] + e
    }

    pub fn sparams(&self, freqs: &[f64]) -> Result<FrequencyResponse, MnaError> {
        let s = freqs.iter().map(|f| self.s_matrix(*f)).collect::<Result<Vec<_>, _>>()?;
        Ok(self.response(freqs, s))
    }

    /// Same result as [`AcSolver::sparams`], spread over `threads` workers.
    pub fn sparams_threaded(&self, freqs: &[f64], threads: usize) -> Result<FrequencyResponse, MnaError> {
        let threads = threads.max(1);
        let chunk = freqs.len().div_ceil(threads).max(1);
        let parts: Vec<Result<Vec<Vec<C64>>, MnaError>> = std::thread::scope(|scope| {
            let handles: Vec<_> = freqs
                .chunks(chunk)
                .map(|c| scope.spawn(move || c.iter().map(|f| self.s_matrix(*f)).collect()))
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        let mut s = Vec::with_capacity(freqs.len());
        for p in parts {
            s.extend(p?);
        }
        Ok(self.response(freqs, s))
    }

    fn response(&self, freqs: &[f64], s: Vec<Vec<C64>>) -> FrequencyResponse {
        FrequencyResponse { frequencies: freqs.to_vec(), z_ref: self.port_refs.clone(), s }
    }
}

/// Mutual-inductance terms `(i, j, M)` for each coupled pair, after
/// checking every connected coupling group for a PSD inductance matrix.
pub fn mutual_stamps(
    inductors: &[(String, f64)],
    pairs: &[(usize, usize, f64)],
) -> Result<Vec<(usize, usize, f64)>, MnaError> {
    let n = inductors.len();
    let mut group: Vec<usize> = (0..n).collect();
    fn find(g: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while g[r] != r {
            r = g[r];
        }
        g[i] = r;
        r
    }
    let mut out = Vec::new();
    for &(i, j, k) in pairs {
        let (ri, rj) = (find(&mut group, i), find(&mut group, j));
        group[ri] = rj;
        out.push((i, j, k * (inductors[i].1 * inductors[j].1).sqrt()));
    }
    let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        let r = find(&mut group, i);
        members.entry(r).or_default().push(i);
    }
    for ids in members.values().filter(|m| m.len() > 1) {
        let m = ids.len();
        let pos: HashMap<usize, usize> = ids.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let mut l = DMatrix::<f64>::zeros(m, m);
        for (a, &i) in ids.iter().enumerate() {
            l[(a, a)] = inductors[i].1;
        }
        for &(i, j, mij) in &out {
            if let (Some(&a), Some(&b)) = (pos.get(&i), pos.get(&j)) {
                l[(a, b)] += mij;
                l[(b, a)] += mij;
            }
        }
        let trace = l.trace();
        let min = SymmetricEigen::new(l).eigenvalues.min();
        if min < -1e-12 * trace {
            let mut names: Vec<String> = ids.iter().map(|&i| inductors[i].0.clone()).collect();
            names.sort();
            return Err(MnaError::UnrealizableCoupling(names));
        }
    }
    Ok(out)
}

pub fn solve_ac(netlist: &Netlist, freqs: &[f64]) -> Result<Vec<AcSolution>, MnaError> {
    let solver = AcSolver::new(netlist)?;
    freqs.iter().map(|f| solver.solve(*f)).collect()
}

pub fn sparams(netlist: &Netlist, freqs: &[f64]) -> Result<FrequencyResponse, MnaError> {
    let solver = AcSolver::new(netlist)?;
    if solver.port_rows.is_empty() {
        return Err(MnaError::NoPorts);
    }
    solver.sparams(freqs)
}
