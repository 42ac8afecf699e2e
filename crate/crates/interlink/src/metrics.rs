//! Partition quality metrics for Fiedler vectors of coupled systems: the
//! sign partition with its per-layer subsets, the relative cut size, the
//! interdependence angle, and the component entropy.

use crate::coupling::{CoupledSystem, Strategy};
use crate::spectral::{dot, SpectralResult};
use crate::theory::natural_indicator;

/// Components this close to zero are tie-broken into `setR`.
pub const SIGN_THRESHOLD: f64 = 1e-12;

/// A Fiedler sign partition with its layer intersections and quality
/// metrics.
#[derive(Debug, Clone)]
pub struct PartitionReport {
    pub set_r: Vec<usize>,
    pub set_s: Vec<usize>,
    /// `set_r` restricted to layer 1 (node indices < N1).
    pub r1: Vec<usize>,
    pub s1: Vec<usize>,
    /// `set_r` restricted to layer 2, as layer-local indices.
    pub r2: Vec<usize>,
    pub s2: Vec<usize>,
    /// Cut links over intra-layer links: `l(R,S) / (L1 + L2)`.
    pub cut_size: f64,
    pub interlink_cut_fraction: f64,
    pub intralink_cut_fraction: f64,
    /// Angle to the natural two-layer indicator, in `[0, pi/2]`.
    pub angle: f64,
    pub entropy: f64,
    pub degenerate: bool,
}

/// Splits node indices by the sign of their Fiedler component.
///
/// Near-zero components (`|x_i| <= 1e-12`) go to `set_r`, so the output is
/// a genuine bipartition even on vectors with exact zeros.
pub fn fiedler_partition(x: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let mut r = Vec::new();
    let mut s = Vec::new();
    for (i, &v) in x.iter().enumerate() {
        if v < -SIGN_THRESHOLD {
            s.push(i);
        } else {
            r.push(i);
        }
    }
    (r, s)
}

/// Cut counts for one partition of a coupled system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutMetrics {
    pub cut_size: f64,
    pub interlink_cut_fraction: f64,
    pub intralink_cut_fraction: f64,
    pub cut_links: usize,
}

/// Counts links crossing the partition. The numerator counts every supra
/// link (intra-layer and interlink alike); the denominator is the number
/// of intra-layer links only.
pub fn cut_metrics(sys: &CoupledSystem, set_s: &[usize]) -> CutMetrics {
    let n1 = sys.n1();
    let mut in_s = vec![false; 2 * n1];
    for &i in set_s {
        in_s[i] = true;
    }
    let mut intra_cut = 0usize;
    for &(i, j) in sys.layer().edges() {
        if in_s[i] != in_s[j] {
            intra_cut += 1;
        }
        if in_s[n1 + i] != in_s[n1 + j] {
            intra_cut += 1;
        }
    }
    let mut inter_cut = 0usize;
    match sys.interlinks().strategy {
        Strategy::MeanFieldDiagonal => {
            for i in 0..n1 {
                if in_s[i] != in_s[n1 + i] {
                    inter_cut += 1;
                }
            }
        }
        Strategy::MeanFieldGeneral => {
            let s1 = (0..n1).filter(|&i| in_s[i]).count();
            let s2 = (0..n1).filter(|&i| in_s[n1 + i]).count();
            inter_cut = s1 * (n1 - s2) + (n1 - s1) * s2;
        }
        _ => {
            for &(i, j) in &sys.interlinks().pairs {
                if in_s[i] != in_s[n1 + j] {
                    inter_cut += 1;
                }
            }
        }
    }
    let intra_total = 2 * sys.layer().edge_count();
    let cut_links = intra_cut + inter_cut;
    let cut_size = if intra_total == 0 {
        0.0
    } else {
        cut_links as f64 / intra_total as f64
    };
    let (fi, fa) = if cut_links == 0 {
        (0.0, 0.0)
    } else {
        (
            inter_cut as f64 / cut_links as f64,
            intra_cut as f64 / cut_links as f64,
        )
    };
    CutMetrics {
        cut_size,
        interlink_cut_fraction: fi,
        intralink_cut_fraction: fa,
        cut_links,
    }
}

/// `arccos |x' x0|` against the natural indicator `(1..1,-1..-1)/sqrt(N)`.
///
/// The absolute value quotients out the eigenvector sign, so the result
/// lies in `[0, pi/2]`. `x` must have even length `2 n1` and unit norm.
pub fn interdependence_angle(x: &[f64]) -> f64 {
    let n1 = x.len() / 2;
    let x0 = natural_indicator(n1);
    dot(x, &x0).abs().clamp(0.0, 1.0).acos()
}

/// Shannon entropy of the squared components, `-sum x_i^2 ln x_i^2`, in
/// nats. Flat vectors attain the maximum `ln N`; one-hot vectors give 0.
pub fn fiedler_entropy(x: &[f64]) -> f64 {
    -x.iter()
        .map(|&v| {
            let p = v * v;
            if p > 0.0 {
                p * p.ln()
            } else {
                0.0
            }
        })
        .sum::<f64>()
}

/// Computes the full partition report for one solved Fiedler pair.
pub fn partition_report(sys: &CoupledSystem, fiedler: &SpectralResult) -> PartitionReport {
    let n1 = sys.n1();
    let x = &fiedler.vector;
    let (set_r, set_s) = fiedler_partition(x);
    let cut = cut_metrics(sys, &set_s);
    let split = |set: &[usize]| -> (Vec<usize>, Vec<usize>) {
        let a = set.iter().copied().filter(|&i| i < n1).collect();
        let b = set.iter().filter(|&&i| i >= n1).map(|&i| i - n1).collect();
        (a, b)
    };
    let (r1, r2) = split(&set_r);
    let (s1, s2) = split(&set_s);
    PartitionReport {
        set_r,
        set_s,
        r1,
        s1,
        r2,
        s2,
        cut_size: cut.cut_size,
        interlink_cut_fraction: cut.interlink_cut_fraction,
        intralink_cut_fraction: cut.intralink_cut_fraction,
        angle: interdependence_angle(x),
        entropy: fiedler_entropy(x),
        degenerate: fiedler.degenerate,
    }
}
