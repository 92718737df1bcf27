#![allow(dead_code)]

use admgraph_core::graph::{push_divisor, Divisor};
use admgraph_core::hyperelliptic::HyperellipticGraph;
use admgraph_core::testkit::{named_corpus, random_hyperelliptic, random_lengths, random_polarization};

/// Hand-built graphs followed by `random` seeded draws of sizes 1 to 5 with
/// random lengths.
pub fn corpus(random: u64) -> Vec<(String, HyperellipticGraph)> {
    let mut out: Vec<(String, HyperellipticGraph)> =
        named_corpus().into_iter().map(|(n, h)| (n.to_string(), h)).collect();
    for seed in 0..random {
        let h = random_hyperelliptic(seed, 1..=5).expect("feasible bounds");
        out.push((format!("seed{seed}"), random_lengths(&h, seed ^ 0x5eed)));
    }
    out
}

/// Polarizations to try on `h`: the canonical-shape one with zero at fixed
/// vertices plus a few random ones.
pub fn polarizations(h: &HyperellipticGraph, seeds: u64) -> Vec<Divisor> {
    let mut out: Vec<Divisor> = (0..seeds).map(|s| random_polarization(h, s)).collect();
    let base = random_polarization(h, 0);
    let mut shaped = Divisor::zero();
    for v in h.non_fixed_vertices() {
        shaped.set(v, base.coefficient(v));
    }
    if shaped.degree() != admgraph_core::rational::int(-2) {
        out.push(shaped);
    }
    out
}

/// Contracts one class and carries the divisor along.
pub fn contract_polarized(h: &HyperellipticGraph, class: &str, d: &Divisor) -> (HyperellipticGraph, Divisor) {
    let (hc, map) = h.contract_classes(&[class]).expect("class exists");
    let dc = push_divisor(d, &map).expect("supported");
    (hc, dc)
}
