//! Interdependent two-layer systems: interlink patterns, the interlink
//! Laplacian `Q_B`, and the supra-Laplacian `Q = Q_A + alpha * Q_B`.
//!
//! Both layers share one `Graph`. Layer-2 node `j` is globally indexed
//! `n1 + j`. Explicit strategies carry unit-weight interlinks (`alpha = 1`);
//! the mean-field variants replace them with the dense weighted patterns
//! `B = I` and `B = J` and leave `alpha` free.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::SymMatrix;
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Diagonal,
    General,
    MeanFieldDiagonal,
    MeanFieldGeneral,
}

impl Strategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Diagonal => "diagonal",
            Strategy::General => "general",
            Strategy::MeanFieldDiagonal => "mf-diagonal",
            Strategy::MeanFieldGeneral => "mf-general",
        }
    }

    pub fn is_mean_field(&self) -> bool {
        matches!(self, Strategy::MeanFieldDiagonal | Strategy::MeanFieldGeneral)
    }
}

/// Cross-layer link pattern. `pairs` holds `(i, j)` with `i` in layer 1 and
/// `j` in layer 2; mean-field variants carry no explicit pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterlinkSet {
    pub strategy: Strategy,
    pub pairs: Vec<(usize, usize)>,
}

/// Two identical layers plus interlinks and a coupling weight.
#[derive(Debug, Clone)]
pub struct CoupledSystem {
    layer: Arc<Graph>,
    interlinks: InterlinkSet,
    alpha: f64,
}

impl CoupledSystem {
    /// Diagonal strategy: `count` distinct nodes drawn uniformly without
    /// replacement, linked to their counterparts. `alpha = 1`.
    pub fn diagonal(layer: Graph, count: usize, seed: u64) -> Result<Self> {
        Self::diagonal_shared(Arc::new(layer), count, seed)
    }

    pub fn diagonal_shared(layer: Arc<Graph>, count: usize, seed: u64) -> Result<Self> {
        let n1 = layer.n();
        if count > n1 {
            return Err(Error::Parameter(format!(
                "diagonal count {count} exceeds layer size {n1}"
            )));
        }
        let picks = sample_without_replacement(n1 as u64, count, seed);
        let pairs = picks.into_iter().map(|i| (i as usize, i as usize)).collect();
        Ok(CoupledSystem {
            layer,
            interlinks: InterlinkSet {
                strategy: Strategy::Diagonal,
                pairs,
            },
            alpha: 1.0,
        })
    }

    /// General strategy: `count` distinct `(i, j)` pairs drawn uniformly
    /// over the `n1 x n1` grid. `alpha = 1`.
    pub fn general(layer: Graph, count: usize, seed: u64) -> Result<Self> {
        Self::general_shared(Arc::new(layer), count, seed)
    }

    pub fn general_shared(layer: Arc<Graph>, count: usize, seed: u64) -> Result<Self> {
        let n1 = layer.n();
        if count > n1 * n1 {
            return Err(Error::Parameter(format!(
                "general count {count} exceeds {}",
                n1 * n1
            )));
        }
        let picks = sample_without_replacement((n1 * n1) as u64, count, seed);
        let pairs = picks
            .into_iter()
            .map(|c| ((c as usize) / n1, (c as usize) % n1))
            .collect();
        Ok(CoupledSystem {
            layer,
            interlinks: InterlinkSet {
                strategy: Strategy::General,
                pairs,
            },
            alpha: 1.0,
        })
    }

    /// Explicit system from a given pair list (no sampling).
    pub fn explicit(layer: Graph, strategy: Strategy, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let n1 = layer.n();
        if strategy.is_mean_field() {
            return Err(Error::Parameter(
                "explicit pairs require an explicit strategy".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for &(i, j) in &pairs {
            if i >= n1 {
                return Err(Error::IndexOutOfRange { index: i, n: n1 });
            }
            if j >= n1 {
                return Err(Error::IndexOutOfRange { index: j, n: n1 });
            }
            if strategy == Strategy::Diagonal && i != j {
                return Err(Error::Parameter(format!(
                    "diagonal strategy requires i == j, got ({i}, {j})"
                )));
            }
            if !seen.insert((i, j)) {
                return Err(Error::DuplicateEdge(i, j));
            }
        }
        Ok(CoupledSystem {
            layer: Arc::new(layer),
            interlinks: InterlinkSet { strategy, pairs },
            alpha: 1.0,
        })
    }

    /// Mean-field pattern `B = I`, interlink weight `alpha`.
    pub fn mean_field_diagonal(layer: Graph, alpha: f64) -> Self {
        CoupledSystem {
            layer: Arc::new(layer),
            interlinks: InterlinkSet {
                strategy: Strategy::MeanFieldDiagonal,
                pairs: Vec::new(),
            },
            alpha,
        }
    }

    /// Mean-field pattern `B = J`, interlink weight `alpha`.
    pub fn mean_field_general(layer: Graph, alpha: f64) -> Self {
        CoupledSystem {
            layer: Arc::new(layer),
            interlinks: InterlinkSet {
                strategy: Strategy::MeanFieldGeneral,
                pairs: Vec::new(),
            },
            alpha,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn layer(&self) -> &Graph {
        &self.layer
    }

    pub fn interlinks(&self) -> &InterlinkSet {
        &self.interlinks
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n1(&self) -> usize {
        self.layer.n()
    }

    pub fn total_nodes(&self) -> usize {
        2 * self.layer.n()
    }

    /// `Q_B = D - B`, the Laplacian of the interlinks alone (weight-free;
    /// `alpha` is applied in [`CoupledSystem::supra_laplacian`]).
    pub fn interlink_laplacian(&self) -> SymMatrix {
        let n1 = self.layer.n();
        let mut q = SymMatrix::zeros(2 * n1);
        match self.interlinks.strategy {
            Strategy::Diagonal | Strategy::General => {
                for &(i, j) in &self.interlinks.pairs {
                    q.add(i, i, 1.0);
                    q.add(n1 + j, n1 + j, 1.0);
                    q.add(i, n1 + j, -1.0);
                }
            }
            Strategy::MeanFieldDiagonal => {
                for i in 0..n1 {
                    q.add(i, i, 1.0);
                    q.add(n1 + i, n1 + i, 1.0);
                    q.add(i, n1 + i, -1.0);
                }
            }
            Strategy::MeanFieldGeneral => {
                for i in 0..n1 {
                    q.add(i, i, n1 as f64);
                    q.add(n1 + i, n1 + i, n1 as f64);
                    for j in 0..n1 {
                        q.add(i, n1 + j, -1.0);
                    }
                }
            }
        }
        q
    }

    /// `Q = blockdiag(Q_1, Q_2) + alpha * Q_B`.
    pub fn supra_laplacian(&self) -> SymMatrix {
        let n1 = self.layer.n();
        let mut q = SymMatrix::zeros(2 * n1);
        for &(a, b) in self.layer.edges() {
            for off in [0, n1] {
                q.add(off + a, off + a, 1.0);
                q.add(off + b, off + b, 1.0);
                q.add(off + a, off + b, -1.0);
            }
        }
        q.add_scaled(&self.interlink_laplacian(), self.alpha);
        q
    }

    /// The coupled system viewed as one big graph (supra-graph); only valid
    /// for explicit strategies.
    pub fn supra_graph(&self) -> Result<Graph> {
        if self.interlinks.strategy.is_mean_field() {
            return Err(Error::Parameter(
                "supra-graph undefined for mean-field strategies".into(),
            ));
        }
        let n1 = self.layer.n();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for &(a, b) in self.layer.edges() {
            edges.push((a, b));
            edges.push((n1 + a, n1 + b));
        }
        for &(i, j) in &self.interlinks.pairs {
            edges.push((i, n1 + j));
        }
        Graph::new(2 * n1, edges)
    }
}

/// A nested interlink order for one realization: the set at count `c + 1`
/// extends the set at count `c`.
#[derive(Debug, Clone)]
pub struct InterlinkSequence {
    layer: Arc<Graph>,
    strategy: Strategy,
    order: Vec<(usize, usize)>,
}

impl InterlinkSequence {
    pub fn diagonal(layer: Graph, seed: u64) -> Self {
        let layer = Arc::new(layer);
        let n1 = layer.n();
        let order = sample_without_replacement(n1 as u64, n1, seed)
            .into_iter()
            .map(|i| (i as usize, i as usize))
            .collect();
        InterlinkSequence {
            layer,
            strategy: Strategy::Diagonal,
            order,
        }
    }

    /// Draws the first `max_count` entries of a random permutation of the
    /// `n1 x n1` pair grid.
    pub fn general(layer: Graph, max_count: usize, seed: u64) -> Result<Self> {
        let layer = Arc::new(layer);
        let n1 = layer.n();
        if max_count > n1 * n1 {
            return Err(Error::Parameter(format!(
                "general max_count {max_count} exceeds {}",
                n1 * n1
            )));
        }
        let order = sample_without_replacement((n1 * n1) as u64, max_count, seed)
            .into_iter()
            .map(|c| ((c as usize) / n1, (c as usize) % n1))
            .collect();
        Ok(InterlinkSequence {
            layer,
            strategy: Strategy::General,
            order,
        })
    }

    pub fn max_count(&self) -> usize {
        self.order.len()
    }

    pub fn system(&self, count: usize) -> Result<CoupledSystem> {
        if count > self.order.len() {
            return Err(Error::Parameter(format!(
                "count {count} exceeds sequence length {}",
                self.order.len()
            )));
        }
        Ok(CoupledSystem {
            layer: Arc::clone(&self.layer),
            interlinks: InterlinkSet {
                strategy: self.strategy,
                pairs: self.order[..count].to_vec(),
            },
            alpha: 1.0,
        })
    }
}

/// First `count` entries of a seeded random permutation of `0..universe`,
/// via a sparse Fisher-Yates shuffle (O(count) memory).
fn sample_without_replacement(universe: u64, count: usize, seed: u64) -> Vec<u64> {
    assert!(count as u64 <= universe);
    let mut rng = rng_from_seed(seed);
    let mut swapped: HashMap<u64, u64> = HashMap::new();
    let mut out = Vec::with_capacity(count);
    for i in 0..count as u64 {
        let j = rng.random_range(i..universe);
        let vj = *swapped.get(&j).unwrap_or(&j);
        let vi = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, vi);
        out.push(vj);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::full_spectrum;

    fn k3() -> Graph {
        Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn p2() -> Graph {
        Graph::new(2, [(0, 1)]).unwrap()
    }

    #[test]
    fn diagonal_exhaustive_and_bounds() {
        let sys = CoupledSystem::diagonal(k3(), 3, 1).unwrap();
        let mut pairs = sys.interlinks().pairs.clone();
        pairs.sort_unstable();
        assert_eq!(pairs, vec![(0, 0), (1, 1), (2, 2)]);

        let sys = CoupledSystem::diagonal(k3(), 0, 1).unwrap();
        assert!(sys.interlinks().pairs.is_empty());
        assert!(!sys.supra_graph().unwrap().is_connected());

        assert!(matches!(
            CoupledSystem::diagonal(k3(), 4, 1),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn general_exhaustive_and_bounds() {
        let sys = CoupledSystem::general(p2(), 4, 1).unwrap();
        let mut pairs = sys.interlinks().pairs.clone();
        pairs.sort_unstable();
        assert_eq!(pairs, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);

        assert!(matches!(
            CoupledSystem::general(p2(), 5, 1),
            Err(Error::Parameter(_))
        ));

        let sys = CoupledSystem::general(k3(), 1, 1).unwrap();
        assert_eq!(sys.supra_graph().unwrap().edge_count(), 7);
    }

    #[test]
    fn interlink_laplacian_single_pair() {
        let sys =
            CoupledSystem::explicit(p2(), Strategy::Diagonal, vec![(0, 0)]).unwrap();
        let qb = sys.interlink_laplacian();
        assert_eq!(qb.get(0, 0), 1.0);
        assert_eq!(qb.get(1, 1), 0.0);
        assert_eq!(qb.get(0, 2), -1.0);
        assert_eq!(qb.get(2, 2), 1.0);
    }

    #[test]
    fn mean_field_interlink_spectra() {
        // [[I,-I],[-I,I]] on K3: eigenvalues {0,0,0,2,2,2}
        let sys = CoupledSystem::mean_field_diagonal(k3(), 1.0);
        let spec = full_spectrum(&sys.interlink_laplacian()).unwrap();
        let expect = [0.0, 0.0, 0.0, 2.0, 2.0, 2.0];
        for (a, b) in spec.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        // [[2I,-J],[-J,2I]] on P2: eigenvalues {0, 2, 2, 4}
        let sys = CoupledSystem::mean_field_general(p2(), 1.0);
        let spec = full_spectrum(&sys.interlink_laplacian()).unwrap();
        let expect = [0.0, 2.0, 2.0, 4.0];
        for (a, b) in spec.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn supra_spectrum_mean_field() {
        // two K3, no interlinks: block diagonal, second eigenvalue 0
        let sys = CoupledSystem::diagonal(k3(), 0, 1).unwrap();
        let spec = full_spectrum(&sys.supra_laplacian()).unwrap();
        assert!(spec.eigenvalues[1].abs() < 1e-10);

        // two K3, mean-field diagonal alpha=1: {0,3,3} u {2,5,5}
        let sys = CoupledSystem::mean_field_diagonal(k3(), 1.0);
        let spec = full_spectrum(&sys.supra_laplacian()).unwrap();
        let expect = [0.0, 2.0, 3.0, 3.0, 5.0, 5.0];
        for (a, b) in spec.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }

        // two P2, mean-field general alpha=0.5: mu_{N-1} = 2 alpha N1 = 2
        let sys = CoupledSystem::mean_field_general(p2(), 0.5);
        let spec = full_spectrum(&sys.supra_laplacian()).unwrap();
        assert!((spec.eigenvalues[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn row_sums_vanish() {
        let sys = CoupledSystem::general(k3(), 5, 3).unwrap();
        let q = sys.supra_laplacian();
        for i in 0..q.order() {
            assert!(q.row_sum(i).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_field_commutes_with_intralayer() {
        for sys in [
            CoupledSystem::mean_field_diagonal(k3(), 1.0),
            CoupledSystem::mean_field_general(k3(), 1.0),
        ] {
            let qb = sys.interlink_laplacian().to_dense();
            let qa = sys.clone().with_alpha(0.0).supra_laplacian().to_dense();
            let diff = (&qa * &qb) - (&qb * &qa);
            assert!(diff.amax() <= 1e-12);
        }
    }

    #[test]
    fn explicit_full_diagonal_matches_mean_field() {
        let sys = CoupledSystem::diagonal(k3(), 3, 7).unwrap();
        let mf = CoupledSystem::mean_field_diagonal(k3(), 1.0);
        assert_eq!(sys.supra_laplacian(), mf.supra_laplacian());
    }

    #[test]
    fn nested_sequences_are_prefixes() {
        let seq = InterlinkSequence::general(k3(), 6, 5).unwrap();
        let a = seq.system(3).unwrap();
        let b = seq.system(5).unwrap();
        assert_eq!(&b.interlinks().pairs[..3], a.interlinks().pairs.as_slice());
    }

    #[test]
    fn sampling_is_uniform_permutation_prefix() {
        let picks = sample_without_replacement(10, 10, 3);
        let mut sorted = picks.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..10).collect::<Vec<_>>());
        assert_eq!(picks, sample_without_replacement(10, 10, 3));
    }
}
