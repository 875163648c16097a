//! Values recorded from the first run of this implementation. They pin
//! behavior, they do not come from an external reference.

use spinwire::chain::{
    dipolar_couplings, engineered_couplings, perturb_couplings, transfer_timing,
    DipolarGeometry, Model, Truncation,
};
use spinwire::logical::{logical_basis, logical_transport, transport_curve, Family, LogicalObservable};
use spinwire::mqc::{mqc_analytic, prepare_state, MqcOracle, StateKind};
use spinwire::oracle::OracleBudget;
use spinwire::output::linear_grid;
use spinwire::propagator::{propagate, spectral_decompose};

const DISORDER_MEDIAN: f64 = 0.952749440978748;
const HOMOGENEOUS_N10_MAX_F: f64 = 0.690925964712442;

#[test]
fn disorder_median_fidelity_n15() {
    let n = 15;
    let base = engineered_couplings(n, 1.0).unwrap();
    let t_star = transfer_timing(&base).unwrap().t_star;
    let basis = logical_basis(Model::Xx, n).unwrap();
    let mut f: Vec<f64> = (0..100u64)
        .map(|seed| {
            let spec = perturb_couplings(&base, 0.05, seed).unwrap();
            let prop = propagate(&spectral_decompose(&spec).unwrap(), t_star);
            LogicalObservable::ALL.iter().map(|&a| logical_transport(&prop, &basis, a, false).unwrap()).sum::<f64>() / 4.0
        })
        .collect();
    f.sort_by(f64::total_cmp);
    let median = (f[49] + f[50]) / 2.0;
    assert!(median > 0.9 && median < 1.0);
    assert!((median - DISORDER_MEDIAN).abs() < 1e-12, "median {median:.15}");
}

#[test]
fn homogeneous_n10_fidelity_peak() {
    let times = linear_grid(0.0, 30.0, 3001);
    let curve = transport_curve(10, 1.0, Family::Homogeneous, &times).unwrap();
    let max = curve.fidelity.iter().copied().fold(f64::MIN, f64::max);
    assert!(max < 1.0);
    assert!((max - HOMOGENEOUS_N10_MAX_F).abs() < 1e-12, "max {max:.15}");
}

#[test]
fn full_dipolar_contrast_n8() {
    let positions: Vec<f64> = (0..8).map(|j| j as f64).collect();
    let spec = dipolar_couplings(&DipolarGeometry::new(positions, 1.0).unwrap(), Truncation::Full).unwrap();
    let oracle = MqcOracle::new(&spec, &OracleBudget::default()).unwrap();
    for (kind, total) in [(StateKind::FullZ, 8.0), (StateKind::ZEnds, 2.0)] {
        let rho = prepare_state(8, kind).unwrap();
        for t in [0.5, 1.0, 3.0] {
            let s = oracle.spectrum(&rho, t, 8).unwrap();
            assert!((s.intensity(0) - total).abs() < 1e-10);
            assert_eq!(s.max_populated_order(1e-10), 0);
        }
    }
}

#[test]
fn mqc_mirror_peak_n21() {
    let n = 21;
    let times = linear_grid(0.0, n as f64, 2101);
    let j0: Vec<f64> = times.iter().map(|&t| mqc_analytic(n, 1.0, StateKind::ZEnds, t).unwrap().intensity(0)).collect();
    let peak = (1..j0.len() - 1)
        .filter(|&i| j0[i] >= j0[i - 1] && j0[i] >= j0[i + 1])
        .max_by(|&a, &b| j0[a].total_cmp(&j0[b]))
        .unwrap();
    let predicted = (n + 1) as f64 / 4.0;
    assert!((times[peak] - predicted).abs() / predicted <= 0.10, "peak at {}", times[peak]);
}
