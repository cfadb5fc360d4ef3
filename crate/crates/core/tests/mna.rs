mod common;

use dualband::metrics::DEFAULT_GRID;
use dualband::mna::{AcSolver, MnaError};
use dualband::netlist::{parse, AcSweep};
use dualband::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn solver(text: &str) -> AcSolver {
    AcSolver::new(&parse(text).unwrap()).unwrap()
}

fn voltage(s: &AcSolver, freq: f64, node: &str) -> C64 {
    let sol = s.solve(freq).unwrap();
    sol.node_voltages()[s.node_index(node).unwrap()]
}

#[test]
fn matched_divider() {
    let s = solver("divider\nP1 a 0 50\nR1 a 0 50\n.ac lin 1 1g 1g\n");
    let v = voltage(&s, 1e9, "a");
    assert!((v - C64::new(0.5, 0.0)).norm() < 1e-14);
}

#[test]
fn rc_corner() {
    let (r, c) = (50.0, 1e-12);
    let s = solver("rc\nP1 a 0 50\nC1 a 0 1p\n.ac lin 1 1g 1g\n");
    let f3 = 1.0 / (2.0 * std::f64::consts::PI * r * c);
    let v = voltage(&s, f3, "a");
    assert!((v.norm() - 0.5f64.sqrt()).abs() < 1e-12);
    assert!((v.arg() + std::f64::consts::FRAC_PI_4).abs() < 1e-12);
}

#[test]
fn through_and_shunt() {
    let through = solver("through\nP1 a 0 50\nP2 a 0 50\n.ac lin 1 1g 1g\n");
    let m = through.s_matrix(1e9).unwrap();
    assert!(m[0].norm() < 1e-14 && (m[2] - 1.0).norm() < 1e-14);

    let shunt = solver("shunt\nP1 a 0 50\nP2 a 0 50\nR1 a 0 25\n.ac lin 1 1g 1g\n");
    let v = voltage(&shunt, 1e9, "a");
    assert!((v - C64::new(0.25, 0.0)).norm() < 1e-14);
    let m = shunt.s_matrix(1e9).unwrap();
    assert!((m[2] - 0.5).norm() < 1e-14);
    assert!((m[0] + 0.5).norm() < 1e-14);
}

#[test]
fn unity_coupling_approaches_ideal_transformer() {
    let s = solver("xfmr\nP1 a 0 50\nP2 b 0 200\nL1 a 0 1m\nL2 b 0 4m\nK1 L1 L2 1\n.ac lin 1 1g 1g\n");
    let m = s.s_matrix(1e9).unwrap();
    // only the magnetizing reactance remains
    let expect = 50.0 / (2.0 * 2.0 * std::f64::consts::PI * 1e9 * 1e-3);
    assert!((m[0].norm() - expect).abs() / expect < 1e-6, "{}", m[0]);
    assert!((m[2].norm() - 1.0).abs() < 1e-9);
}

#[test]
fn zero_coupling_isolates() {
    let s = solver("apart\nP1 a 0 50\nP2 b 0 50\nL1 a 0 1n\nL2 b 0 1n\nK1 L1 L2 0\n.ac lin 1 1g 1g\n");
    let m = s.s_matrix(1e9).unwrap();
    assert_eq!(m[2], C64::new(0.0, 0.0));
}

#[test]
fn stamped_matrix_is_symmetric() {
    let net = common::worked_design().network.to_netlist("w", DEFAULT_GRID);
    let s = AcSolver::new(&net).unwrap();
    assert!(s.stamp(30e9).unwrap().asymmetry() < 1e-15);
}

#[test]
fn floating_nodes_are_named() {
    let text = "float\nP1 a 0 50\nR1 a 0 50\nR2 x y 50\n.ac lin 1 1g 1g\n";
    let s = solver(text);
    let mut nodes = s.floating_nodes();
    nodes.sort();
    assert_eq!(nodes, vec!["x", "y"]);
    match s.solve(1e9) {
        Err(MnaError::Singular { nodes, .. }) => assert!(nodes.contains(&"x".to_string())),
        other => panic!("expected singular, got {other:?}"),
    }
}

#[test]
fn non_psd_coupling_is_rejected() {
    let text = "bad\nP1 a 0 50\nL1 a 0 1n\nL2 a 0 1n\nL3 a 0 1n\nK1 L1 L2 0.9\nK2 L2 L3 -0.9\nK3 L1 L3 0.9\n.ac lin 1 1g 1g\n";
    match AcSolver::new(&parse(text).unwrap()) {
        Err(MnaError::UnrealizableCoupling(names)) => assert_eq!(names.len(), 3),
        other => panic!("expected rejection, got {other:?}"),
    }
}

#[test]
fn threaded_matches_serial_bitwise() {
    let net = common::worked_design().network.to_netlist("w", DEFAULT_GRID);
    let s = AcSolver::new(&net).unwrap();
    let freqs = AcSweep::new(257, 20e9, 45e9).frequencies();
    let serial = s.sparams(&freqs).unwrap();
    for threads in [1, 3, 8] {
        assert_eq!(serial.s, s.sparams_threaded(&freqs, threads).unwrap().s);
    }
}

#[test]
fn points_do_not_depend_on_the_grid() {
    let net = common::worked_design().network.to_netlist("w", DEFAULT_GRID);
    let s = AcSolver::new(&net).unwrap();
    let fine = DEFAULT_GRID.frequencies();
    assert_eq!(fine[1000], 30e9);
    let a = s.sparams(&fine).unwrap();
    let b = s.sparams(&[30e9]).unwrap();
    assert_eq!(a.s[1000], b.s[0]);
}

#[test]
fn closed_form_agrees_with_nodal_solution() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..25 {
        let net = common::random_network(&mut rng, false);
        let nl = net.to_netlist("r", DEFAULT_GRID);
        let s = AcSolver::new(&nl).unwrap();
        for f in [21e9, 33e9, 44e9] {
            let cf = net.s_params(2.0 * std::f64::consts::PI * f).unwrap().as_matrix();
            let m = s.s_matrix(f).unwrap();
            let scale = m.iter().map(|v| v.norm()).fold(1e-300, f64::max);
            for (i, row) in cf.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    assert!((v - m[2 * i + j]).norm() / scale < 1e-9);
                }
            }
        }
    }
}

#[test]
fn bad_frequency() {
    let s = solver("d\nP1 a 0 50\nR1 a 0 50\n.ac lin 1 1g 1g\n");
    assert!(matches!(s.solve(0.0), Err(MnaError::BadFrequency(_))));
}
