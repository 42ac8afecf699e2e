//! Seeded constructors for the four single-network models: random regular,
//! Barabasi-Albert, Watts-Strogatz, and the periodic 3D lattice.
//!
//! Random models resample whole graphs until connected (disconnected draws
//! are discarded, never repaired).

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{mix_seed, rng_from_seed};

const MAX_RETRIES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Rr,
    Ba,
    Ws,
    La,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Rr => "rr",
            Model::Ba => "ba",
            Model::Ws => "ws",
            Model::La => "la",
        }
    }
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rr" => Ok(Model::Rr),
            "ba" => Ok(Model::Ba),
            "ws" => Ok(Model::Ws),
            "la" => Ok(Model::La),
            other => Err(Error::Parameter(format!("unknown model {other:?}"))),
        }
    }
}

/// Full description of one generated graph, including the seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenSpec {
    pub model: Model,
    #[serde(default)]
    pub n: Option<usize>,
    /// Degree parameter (RR, WS).
    #[serde(default)]
    pub k: Option<usize>,
    /// Attachment count (BA).
    #[serde(default)]
    pub m: Option<usize>,
    /// Rewiring probability (WS).
    #[serde(default)]
    pub p: Option<f64>,
    /// Lattice side length (LA).
    #[serde(default)]
    pub side: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl GenSpec {
    pub fn generate(&self) -> Result<Graph> {
        match self.model {
            Model::Rr => {
                let n = self.require("n", self.n)?;
                let k = self.require("k", self.k)?;
                gen_random_regular(n, k, self.seed)
            }
            Model::Ba => {
                let n = self.require("n", self.n)?;
                let m = self.require("m", self.m)?;
                gen_barabasi_albert(n, m, self.seed)
            }
            Model::Ws => {
                let n = self.require("n", self.n)?;
                let k = self.require("k", self.k)?;
                let p = self
                    .p
                    .ok_or_else(|| Error::Parameter("ws requires p".into()))?;
                gen_watts_strogatz(n, k, p, self.seed)
            }
            Model::La => {
                let side = self.require("side", self.side)?;
                gen_lattice_3d_torus(side)
            }
        }
    }

    /// Same spec with a different seed (one fresh layer per realization).
    pub fn with_seed(&self, seed: u64) -> GenSpec {
        GenSpec {
            seed,
            ..self.clone()
        }
    }

    fn require(&self, name: &str, v: Option<usize>) -> Result<usize> {
        v.ok_or_else(|| {
            Error::Parameter(format!("{} requires {name}", self.model.as_str()))
        })
    }
}

/// Random regular graph by stub matching: every node gets exactly `k` stubs,
/// a shuffled matching is accepted only if simple, and the resulting graph
/// only if connected.
pub fn gen_random_regular(n: usize, k: usize, seed: u64) -> Result<Graph> {
    if n == 0 || k >= n {
        return Err(Error::Parameter(format!("rr requires 0 < k < n, got n={n} k={k}")));
    }
    if (n * k) % 2 != 0 {
        return Err(Error::Parameter(format!("rr requires n*k even, got n={n} k={k}")));
    }
    let mut rng = rng_from_seed(seed);
    'retry: for _ in 0..MAX_RETRIES {
        // pair stubs incrementally: keep every valid pair from a shuffle,
        // reshuffle the leftovers, and restart only when no further pair
        // can be placed
        let mut seen: HashSet<(usize, usize)> = HashSet::with_capacity(n * k / 2);
        let mut stubs: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat_n(i, k)).collect();
        while !stubs.is_empty() {
            stubs.shuffle(&mut rng);
            let mut leftover = Vec::new();
            let mut progress = false;
            for pair in stubs.chunks_exact(2) {
                let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
                if a != b && seen.insert((a, b)) {
                    progress = true;
                } else {
                    leftover.push(pair[0]);
                    leftover.push(pair[1]);
                }
            }
            if !progress {
                continue 'retry;
            }
            stubs = leftover;
        }
        let g = Graph::new(n, seen)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::GenerationFailed {
        retries: MAX_RETRIES,
    })
}

/// Barabasi-Albert preferential attachment starting from a clique on
/// `m + 1` nodes; each later node draws `m` distinct degree-proportional
/// targets.
pub fn gen_barabasi_albert(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m < 1 || m >= n {
        return Err(Error::Parameter(format!("ba requires 1 <= m < n, got n={n} m={m}")));
    }
    let mut rng = rng_from_seed(seed);
    let m0 = m + 1;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // one entry per edge endpoint: sampling uniformly from this list is
    // degree-proportional sampling
    let mut endpoints: Vec<usize> = Vec::new();
    for i in 0..m0 {
        for j in (i + 1)..m0 {
            edges.push((i, j));
            endpoints.push(i);
            endpoints.push(j);
        }
    }
    for v in m0..n {
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        while targets.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for t in targets {
            edges.push((t, v));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    Graph::new(n, edges)
}

/// Watts-Strogatz ring lattice (each node tied to `k/2` neighbors per side)
/// with probability-`p` rewiring that preserves the edge count.
pub fn gen_watts_strogatz(n: usize, k: usize, p: f64, seed: u64) -> Result<Graph> {
    if k < 2 || k % 2 != 0 || k >= n {
        return Err(Error::Parameter(format!(
            "ws requires even k with 2 <= k < n, got n={n} k={k}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("ws requires 0 <= p <= 1, got p={p}")));
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..MAX_RETRIES {
        let mut set: HashSet<(usize, usize)> = HashSet::with_capacity(n * k / 2);
        let mut ring: Vec<(usize, usize)> = Vec::with_capacity(n * k / 2);
        for i in 0..n {
            for d in 1..=(k / 2) {
                let j = (i + d) % n;
                let e = (i.min(j), i.max(j));
                ring.push(e);
                set.insert(e);
            }
        }
        let mut degree = vec![k; n];
        for e in ring {
            if rng.random::<f64>() >= p {
                continue;
            }
            let (i, old) = e;
            // re-draw until the replacement creates neither a self-loop nor
            // a duplicate; skip the rewire if the anchor node is saturated
            if degree[i] >= n - 1 {
                continue;
            }
            set.remove(&e);
            let mut placed = false;
            for _ in 0..MAX_RETRIES {
                let j = rng.random_range(0..n);
                if j == i {
                    continue;
                }
                let cand = (i.min(j), i.max(j));
                if set.contains(&cand) {
                    continue;
                }
                set.insert(cand);
                degree[old] -= 1;
                degree[j] += 1;
                placed = true;
                break;
            }
            if !placed {
                set.insert((i.min(old), i.max(old)));
            }
        }
        let g = Graph::new(n, set)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::GenerationFailed {
        retries: MAX_RETRIES,
    })
}

/// Deterministic 3D torus on `side^3` nodes. 6-regular for `side >= 3`;
/// for `side = 2` the two periodic neighbors per axis coincide, leaving a
/// 3-regular graph after de-duplication.
pub fn gen_lattice_3d_torus(side: usize) -> Result<Graph> {
    if side < 2 {
        return Err(Error::Parameter(format!("la requires side >= 2, got {side}")));
    }
    let n = side * side * side;
    let idx = |x: usize, y: usize, z: usize| (x * side + y) * side + z;
    let mut set: HashSet<(usize, usize)> = HashSet::new();
    for x in 0..side {
        for y in 0..side {
            for z in 0..side {
                let a = idx(x, y, z);
                for b in [
                    idx((x + 1) % side, y, z),
                    idx(x, (y + 1) % side, z),
                    idx(x, y, (z + 1) % side),
                ] {
                    if a != b {
                        set.insert((a.min(b), a.max(b)));
                    }
                }
            }
        }
    }
    Graph::new(n, set)
}

/// Splits a master seed into the per-realization stream.
pub fn realization_seed(master: u64, realization: usize) -> u64 {
    mix_seed(master, realization as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rr_four_nodes_degree_two_is_cycle() {
        // the 4-cycle is the only connected 2-regular graph on 4 nodes, so
        // degree + connectivity pin it down
        for seed in 0..5 {
            let g = gen_random_regular(4, 2, seed).unwrap();
            assert_eq!(g.degrees(), vec![2, 2, 2, 2]);
            assert!(g.is_connected());
            assert_eq!(g.edge_count(), 4);
        }
    }

    #[test]
    fn rr_parity_and_degree_counts() {
        assert!(matches!(
            gen_random_regular(5, 3, 1),
            Err(Error::Parameter(_))
        ));
        let g = gen_random_regular(100, 4, 42).unwrap();
        assert_eq!(g.edge_count(), 200);
        assert!(g.degrees().iter().all(|&d| d == 4));
    }

    #[test]
    fn ba_edge_counts() {
        // n=3, m=1: K2 core plus one attachment
        let g = gen_barabasi_albert(3, 1, 9).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(g.is_connected());
        // clique core on m0=4 nodes, then (n - m0) * m attachments
        let g = gen_barabasi_albert(1000, 3, 7).unwrap();
        assert_eq!(g.edge_count(), 6 + 996 * 3);
        assert!(g.is_connected());
        assert!(matches!(
            gen_barabasi_albert(2, 2, 1),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn ws_ring_and_rewired() {
        let g = gen_watts_strogatz(6, 2, 0.0, 3).unwrap();
        let ring: Vec<(usize, usize)> =
            vec![(0, 1), (0, 5), (1, 2), (2, 3), (3, 4), (4, 5)];
        assert_eq!(g.edges(), ring.as_slice());

        let g = gen_watts_strogatz(6, 4, 0.0, 3).unwrap();
        assert_eq!(g.edge_count(), 12);
        assert!(g.degrees().iter().all(|&d| d == 4));

        let g = gen_watts_strogatz(1000, 4, 0.1, 3).unwrap();
        assert_eq!(g.edge_count(), 2000);
        assert!(g.is_connected());
        // rewiring must actually move edges off the ring
        let ring = gen_watts_strogatz(1000, 4, 0.0, 3).unwrap();
        let moved = g
            .edges()
            .iter()
            .filter(|e| !ring.edges().contains(e))
            .count();
        // p = 0.1 over 2000 edges: expect about 200 rewired
        assert!((100..400).contains(&moved), "moved {moved}");
    }

    #[test]
    fn torus_side_three_and_two() {
        let g = gen_lattice_3d_torus(3).unwrap();
        assert_eq!(g.n(), 27);
        assert_eq!(g.edge_count(), 81);
        assert!(g.degrees().iter().all(|&d| d == 6));
        assert!(g.is_connected());

        let g = gen_lattice_3d_torus(2).unwrap();
        assert_eq!(g.n(), 8);
        assert_eq!(g.edge_count(), 12);
        assert!(g.degrees().iter().all(|&d| d == 3));

        assert!(matches!(gen_lattice_3d_torus(1), Err(Error::Parameter(_))));
    }

    #[test]
    fn torus_neighbors_match_brute_force() {
        // independent neighbor count with explicit periodic wrap
        let side = 3usize;
        let g = gen_lattice_3d_torus(side).unwrap();
        let q = g.laplacian();
        let coords = |i: usize| (i / (side * side), (i / side) % side, i % side);
        for i in 0..g.n() {
            let (x, y, z) = coords(i);
            let mut nbrs = HashSet::new();
            for (dx, dy, dz) in [(1, 0, 0), (side - 1, 0, 0), (0, 1, 0), (0, side - 1, 0), (0, 0, 1), (0, 0, side - 1)] {
                let j = (((x + dx) % side) * side + (y + dy) % side) * side + (z + dz) % side;
                nbrs.insert(j);
            }
            assert_eq!(q.get(i, i), nbrs.len() as f64);
        }
    }

    #[test]
    fn determinism_per_seed() {
        let a = gen_random_regular(60, 4, 11).unwrap();
        let b = gen_random_regular(60, 4, 11).unwrap();
        assert_eq!(a, b);
        let c = gen_random_regular(60, 4, 12).unwrap();
        assert_ne!(a, c);

        let a = gen_watts_strogatz(60, 4, 0.2, 5).unwrap();
        let b = gen_watts_strogatz(60, 4, 0.2, 5).unwrap();
        assert_eq!(a, b);

        let a = gen_barabasi_albert(60, 2, 5).unwrap();
        let b = gen_barabasi_albert(60, 2, 5).unwrap();
        assert_eq!(a, b);
    }
}
