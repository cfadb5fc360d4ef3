mod common;

use dualband::elements::Quality;
use dualband::metrics::{band_metrics, DEFAULT_GRID};
use dualband::mna::AcSolver;
use dualband::sweep::{self, SweepKind};
use dualband::synthesis::{synthesize, DesignSpec, LtsChoice, RefineOptions};
use dualband::touchstone;

#[test]
fn worked_design_values() {
    let d = common::worked_design();
    let r = &d.network.resonator;
    assert!(d.diagnostics.refinement.as_ref().unwrap().converged);
    assert!(common::rel(d.network.transformer.primary_split, 0.6952) < 1e-3);
    assert!(common::rel(r.l_ts, 6.7157e-12) < 1e-3);
    assert!(common::rel(r.c_ts, 4.811e-12) < 1e-3);
    assert!(common::rel(r.c_ts1, 5.9285e-12) < 1e-3);
}

#[test]
fn lossy_refinement_regression() {
    let spec = DesignSpec::worked_example()
        .with_primary_inductance(200e-12)
        .with_losses(0.8, Quality::finite(25.0), Quality::finite(30.0));
    let d = synthesize(&spec, LtsChoice::Auto, Some(&RefineOptions::default())).unwrap();
    let rep = d.diagnostics.refinement.as_ref().unwrap();
    let freqs = DEFAULT_GRID.frequencies();
    let m = band_metrics(&freqs, &d.network.gain_curve(&freqs).unwrap(), None, None, 28e9, 38e9);
    assert!(!rep.converged);
    assert!((rep.final_norm - 0.4586).abs() < 1e-3);
    assert!((m.il_low - 1.0005).abs() < 1e-3);
    assert!((m.il_high - 0.9573).abs() < 1e-3);
    assert!((m.suppression.unwrap() - 7.24).abs() < 1e-2);
}

#[test]
fn touchstone_round_trip() {
    let net = common::worked_design().network.to_netlist("w", DEFAULT_GRID);
    let freqs: Vec<f64> = (0..21).map(|i| 20e9 + 1.25e9 * i as f64).collect();
    let resp = AcSolver::new(&net).unwrap().sparams(&freqs).unwrap();
    let rows = touchstone::read(&touchstone::emit(&resp).unwrap()).unwrap();
    assert_eq!(rows.len(), freqs.len());
    for (k, (f, s)) in rows.iter().enumerate() {
        assert!(common::rel(*f, freqs[k]) < 1e-11);
        let expect = [resp.s_at(k, 1, 1), resp.s_at(k, 2, 1), resp.s_at(k, 1, 2), resp.s_at(k, 2, 2)];
        for (a, b) in s.iter().zip(expect) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}

#[test]
fn sweep_family() {
    let d = common::base_200p(0.8, Quality::finite(25.0), Quality::finite(30.0));
    let freqs = dualband::netlist::AcSweep::new(251, 20e9, 45e9).frequencies();
    let res = sweep::run(&d.network, SweepKind::Qt, &[10.0, 40.0, f64::INFINITY], &freqs, 28e9, 38e9).unwrap();
    let csv = res.to_csv();
    assert_eq!(csv.lines().next().unwrap(), "freq_hz,qt=10,qt=40,qt=inf");
    assert_eq!(csv.lines().count(), 252);
    let s: Vec<f64> = res.curves.iter().map(|c| c.metrics.suppression.unwrap()).collect();
    assert!(s[0] < s[1] && s[1] < s[2], "{s:?}");
}

#[test]
fn closed_form_conditions() {
    let spec = DesignSpec::worked_example();
    let d = dualband::synthesis::closed_form_network(&spec, LtsChoice::Fixed(8e-12)).unwrap();
    let c = dualband::resonator::check_conditions(&d.network.resonator, &spec);
    assert!(c.pole_placement_error.abs() < 1e-12);
    assert!((c.delta - 0.0613).abs() < 5e-4, "{}", c.delta);
    assert!((c.delta_min.unwrap() - 0.0454).abs() < 5e-4, "{:?}", c.delta_min);
    assert!(c.feasibility_margin.unwrap() > 0.0);
    assert!(common::rel(c.c_sc, 0.884e-12) < 1e-3);
    assert!((c.alpha - 1444.0 / 660.0).abs() < 1e-12);
}
