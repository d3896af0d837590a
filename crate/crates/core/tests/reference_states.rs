//! End-to-end checks on the 10 mm / 186 fs reference configuration.

use std::time::Instant;

use biphoton::entanglement::{purity_quadrature_k, QuadratureConfig};
use biphoton::jsa::{build_grid, sample_jsa, Biphoton, GridPolicy};
use biphoton::{schmidt_decomposition, PhaseMatchConstants, PumpSpec};

fn reference() -> (PhaseMatchConstants, PumpSpec) {
    let pump = PumpSpec::new(397.5, 186.0).unwrap();
    let c = PhaseMatchConstants::anchored(0.1748, 0.0695, 0.01, pump.tau_s()).unwrap();
    (c, pump)
}

#[test]
fn decomposition_and_purity_agree() {
    let (c, pump) = reference();
    let bp = Biphoton::new(&c, &pump, 0.01).unwrap();
    let t = Instant::now();
    let grid = build_grid(&bp, &GridPolicy::schmidt()).unwrap();
    let jsa = sample_jsa(&bp, &grid).unwrap();
    let dec = schmidt_decomposition(&jsa).unwrap();
    eprintln!("decomposition: n = {}, K = {:.2}, {:?}", grid.nu1.len(), dec.k, t.elapsed());
    let conv = dec.convergence.unwrap();
    assert!(conv.converged, "{conv:?}");
    assert!((dec.k / 316.0 - 1.0).abs() < 0.2, "{}", dec.k);

    let t = Instant::now();
    let pur = purity_quadrature_k(&c, &pump, 0.01, &QuadratureConfig::default()).unwrap();
    eprintln!("purity: K = {:.2}, {:?}", pur.k, t.elapsed());
    assert!((pur.k / dec.k - 1.0).abs() < 0.02, "{} vs {}", pur.k, dec.k);
    assert!(pur.convergence.unwrap().converged);
}
