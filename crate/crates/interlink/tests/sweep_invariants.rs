//! Slow statistical invariants of the sweep harness.

use interlink::coupling::Strategy;
use interlink::gen::Model;
use interlink::spectral::Solver;
use interlink::sweep::{aggregate, run_sweep, SweepConfig};

/// The realization-to-realization fluctuation of the interdependence angle
/// peaks near the transition: its variance has an interior maximum over
/// the count grid, not a boundary one.
#[test]
fn angle_fluctuation_peaks_inside_the_grid() {
    let counts: Vec<usize> = (1..=25).map(|i| i * 20).collect();
    let cfg = SweepConfig {
        model: Some(Model::Rr),
        layer: None,
        n: Some(500),
        k: Some(4),
        m: None,
        p: None,
        side: None,
        seed: 17,
        strategy: Strategy::Diagonal,
        counts: Some(counts.clone()),
        count_grid: None,
        realizations: 30,
        solver: Solver::Auto,
        output: None,
    };
    let records = run_sweep(&cfg).unwrap();
    assert!(records.iter().all(|r| r.error.is_none()));
    let aggregates = aggregate(&records);
    let vars: Vec<f64> = aggregates.iter().map(|a| a.angle_var.unwrap()).collect();
    let peak = vars
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    assert!(
        peak > 0 && peak < vars.len() - 1,
        "peak at index {peak} of {} (counts {:?})",
        vars.len(),
        aggregates[peak].count
    );
    // and the peak dwarfs the boundary fluctuations
    assert!(vars[peak] > 5.0 * vars[0].max(*vars.last().unwrap()));
}
