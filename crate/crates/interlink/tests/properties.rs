//! Randomized invariants over the core types.

use proptest::prelude::*;

use interlink::coupling::{CoupledSystem, InterlinkSequence, Strategy as LinkStrategy};
use interlink::gen;
use interlink::graph::Graph;
use interlink::metrics::{
    cut_metrics, fiedler_entropy, fiedler_partition, interdependence_angle,
};
use interlink::spectral::{fiedler_pair_with, full_spectrum, Solver, DEFAULT_TOL};
use interlink::sweep::{parse_records_csv, records_to_csv, SweepRecord};

/// A connected random graph drawn from one of the generator models.
fn connected_layer(model: u8, n: usize, seed: u64) -> Graph {
    match model % 3 {
        0 => gen::gen_random_regular(n + (n % 2), 4, seed).unwrap(),
        1 => gen::gen_barabasi_albert(n, 2, seed).unwrap(),
        _ => gen::gen_watts_strogatz(n, 4, 0.3, seed).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn edge_list_round_trip(n in 2usize..40, seed in 0u64..1000) {
        let g = connected_layer((seed % 3) as u8, n.max(6), seed);
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let back = Graph::parse_edge_list(std::io::BufReader::new(&buf[..])).unwrap();
        prop_assert_eq!(g.edges(), back.edges());
        prop_assert_eq!(g.n(), back.n());
    }

    #[test]
    fn laplacian_is_psd_with_zero_row_sums(n in 6usize..30, seed in 0u64..1000) {
        let g = connected_layer((seed % 3) as u8, n, seed);
        let q = g.laplacian();
        for i in 0..g.n() {
            prop_assert!(q.row_sum(i).abs() < 1e-12);
        }
        let spec = full_spectrum(&q).unwrap();
        prop_assert!(spec.eigenvalues[0].abs() < 1e-9);
        prop_assert!(spec.eigenvalues.iter().all(|&l| l > -1e-9));
    }

    #[test]
    fn supra_connectivity_monotone_in_nested_counts(n in 6usize..16, seed in 0u64..500) {
        let g = connected_layer((seed % 3) as u8, n, seed);
        let n1 = g.n();
        let seq = InterlinkSequence::diagonal(g, seed ^ 0x5a5a);
        let mut last = -1e-12;
        for count in 1..=n1 {
            let q = seq.system(count).unwrap().supra_laplacian();
            let mu = full_spectrum(&q).unwrap().eigenvalues[1];
            prop_assert!(mu >= last - 1e-10, "count {}: {} < {}", count, mu, last);
            last = mu;
        }
    }

    #[test]
    fn metrics_are_sign_invariant(n in 6usize..24, seed in 0u64..500) {
        let g = connected_layer((seed % 3) as u8, n, seed);
        let sys = CoupledSystem::diagonal(g, 1 + (seed as usize) % n, seed).unwrap();
        let f = fiedler_pair_with(&sys.supra_laplacian(), Solver::Dense, DEFAULT_TOL).unwrap();
        let neg: Vec<f64> = f.vector.iter().map(|v| -v).collect();
        prop_assert!(
            (interdependence_angle(&f.vector) - interdependence_angle(&neg)).abs() < 1e-14
        );
        prop_assert!((fiedler_entropy(&f.vector) - fiedler_entropy(&neg)).abs() < 1e-12);
        let (_, s_pos) = fiedler_partition(&f.vector);
        let (r_neg, _) = fiedler_partition(&neg);
        let cut_pos = cut_metrics(&sys, &s_pos);
        // flipping signs swaps R and S (up to exact-zero ties); the cut is
        // the same set of edges either way
        let cut_neg = cut_metrics(&sys, &r_neg);
        prop_assert!((cut_pos.cut_size - cut_neg.cut_size).abs() < 1e-14);
    }

    #[test]
    fn entropy_and_fraction_bounds(n in 6usize..24, seed in 0u64..500) {
        let g = connected_layer((seed % 3) as u8, n, seed);
        let n1 = g.n();
        let sys = CoupledSystem::general(g, 1 + (seed as usize) % (2 * n1), seed).unwrap();
        let f = fiedler_pair_with(&sys.supra_laplacian(), Solver::Dense, DEFAULT_TOL).unwrap();
        let h = fiedler_entropy(&f.vector);
        prop_assert!(h >= -1e-12);
        prop_assert!(h <= ((2 * n1) as f64).ln() + 1e-9);
        let (_, s) = fiedler_partition(&f.vector);
        let cut = cut_metrics(&sys, &s);
        if cut.cut_links > 0 {
            prop_assert!(
                (cut.interlink_cut_fraction + cut.intralink_cut_fraction - 1.0).abs() < 1e-14
            );
        }
    }

    #[test]
    fn iterative_matches_dense(n in 6usize..30, seed in 0u64..500) {
        let g = connected_layer((seed % 3) as u8, n, seed);
        let n1 = g.n();
        let sys = CoupledSystem::diagonal(g, 1 + (seed as usize) % n1, seed).unwrap();
        let q = sys.supra_laplacian();
        let dense = full_spectrum(&q).unwrap().eigenvalues[1];
        let iter = fiedler_pair_with(&q, Solver::Iterative, DEFAULT_TOL).unwrap().mu;
        prop_assert!((dense - iter).abs() < 1e-9, "{} vs {}", dense, iter);
    }
}

fn arb_record() -> impl Strategy<Value = SweepRecord> {
    let opt_f = proptest::option::of(-1e3f64..1e3);
    (
        "[a-z,\"]{0,8}",
        0usize..1000,
        prop_oneof![Just(LinkStrategy::Diagonal), Just(LinkStrategy::General)],
        (0usize..500, 0usize..50),
        (opt_f.clone(), opt_f.clone(), opt_f.clone()),
        (opt_f.clone(), opt_f.clone()),
        any::<bool>(),
        0.0f64..1e4,
        // nonempty: an empty error string reads back as the no-error case
        proptest::option::of("[ -~]{1,20}"),
    )
        .prop_map(
            |(model, n1, strategy, (count, realization), (mu, mu_gap, cut_size), (angle, entropy), degenerate, wall_ms, error)| {
                SweepRecord {
                    model,
                    n1,
                    strategy,
                    count,
                    realization,
                    mu,
                    mu_gap,
                    cut_size,
                    interlink_cut_fraction: None,
                    angle,
                    entropy,
                    degenerate,
                    wall_ms,
                    error,
                }
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trips_arbitrary_records(records in proptest::collection::vec(arb_record(), 0..12)) {
        let text = records_to_csv(&records);
        let parsed = parse_records_csv(&text).unwrap();
        prop_assert_eq!(parsed, records);
    }
}
