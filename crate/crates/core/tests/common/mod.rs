#![allow(dead_code)]

use dualband::elements::{CouplingTopology, Quality, TransformerSpec};
use dualband::network::{MatchingNetwork, Terminations};
use dualband::resonator::{ResonatorSpec, Topology};
use dualband::synthesis::{synthesize, synthesize_then_degrade, DesignSpec, LtsChoice, RefineOptions, SynthesizedNetwork};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 { 0.0 } else { (a - b).abs() / s }
}

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn quality(rng: &mut ChaCha8Rng, lossless: bool) -> Quality {
    if lossless || rng.gen_bool(0.3) {
        Quality::IDEAL
    } else {
        Quality::finite(rng.gen_range(5.0..80.0))
    }
}

/// Random passive network of the dual-band shape; `lossless` forces every
/// quality factor to infinity.
pub fn random_network(rng: &mut ChaCha8Rng, lossless: bool) -> MatchingNetwork {
    let topology = [Topology::I, Topology::II, Topology::III, Topology::IV][rng.gen_range(0..4)];
    let mut transformer = TransformerSpec::new(
        log_uniform(rng, 50e-12, 400e-12),
        log_uniform(rng, 30e-12, 400e-12),
        rng.gen_range(0.3..=1.0),
        quality(rng, lossless),
    );
    transformer.primary_split = rng.gen_range(0.2..0.8);
    transformer.secondary_split = rng.gen_range(0.2..0.8);
    if rng.gen_bool(0.5) {
        transformer.topology = CouplingTopology::AllPairs;
    }
    let resonator = ResonatorSpec {
        topology,
        l_ts: log_uniform(rng, 2e-12, 30e-12),
        c_ts: log_uniform(rng, 0.5e-12, 10e-12),
        c_ts1: log_uniform(rng, 0.5e-12, 10e-12),
        l_ts1: log_uniform(rng, 2e-12, 30e-12),
        q_t: quality(rng, lossless),
    };
    let terminations = Terminations {
        r_source: rng.gen_range(10.0..100.0),
        c_source: rng.gen_range(0.0..300e-15),
        r_load: rng.gen_range(10.0..100.0),
        c_load: rng.gen_range(0.0..300e-15),
    };
    MatchingNetwork { transformer, resonator, terminations }
}

/// The worked 28/38 GHz design, refined on the ideal model.
pub fn worked_design() -> SynthesizedNetwork {
    synthesize(&DesignSpec::worked_example(), LtsChoice::Fixed(8e-12), Some(&RefineOptions::default()))
        .expect("worked design")
}

/// 28/38 GHz with a 200 pH primary and the given losses applied after
/// ideal refinement.
pub fn base_200p(k_m: f64, q_xfmr: Quality, q_t: Quality) -> SynthesizedNetwork {
    let spec = DesignSpec::worked_example().with_primary_inductance(200e-12).with_losses(k_m, q_xfmr, q_t);
    synthesize_then_degrade(&spec, LtsChoice::Auto, &RefineOptions::default()).expect("200 pH design")
}
