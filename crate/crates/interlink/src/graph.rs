//! Undirected simple graphs, Laplacian assembly, and edge-list file I/O.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

/// An undirected simple graph on nodes `0..n`.
///
/// Edges are stored canonically: each pair as `(i, j)` with `i < j`, the
/// whole list sorted. Construction rejects self-loops, duplicates, and
/// out-of-range endpoints. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut canon: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a >= n {
                return Err(Error::IndexOutOfRange { index: a, n });
            }
            if b >= n {
                return Err(Error::IndexOutOfRange { index: b, n });
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        for w in canon.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        Ok(Graph { n, edges: canon })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.n];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Laplacian `Q = D - A`.
    pub fn laplacian(&self) -> SymMatrix {
        let mut q = SymMatrix::zeros(self.n);
        for &(a, b) in &self.edges {
            q.add(a, a, 1.0);
            q.add(b, b, 1.0);
            q.add(a, b, -1.0);
        }
        q
    }

    /// True iff a traversal from node 0 reaches every node.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let adj = self.adjacency_lists();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut reached = 1usize;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    stack.push(v);
                }
            }
        }
        reached == self.n
    }

    /// Reads a whitespace-separated edge list.
    ///
    /// `#`-prefixed lines are comments; an optional `n=<int>` line fixes the
    /// node count, which otherwise defaults to the maximum index plus one.
    pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path)?;
        Self::parse_edge_list(BufReader::new(file))
    }

    pub fn parse_edge_list(reader: impl BufRead) -> Result<Self> {
        let mut header_n: Option<usize> = None;
        let mut raw: Vec<(usize, usize, usize)> = Vec::new(); // (a, b, line)
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("n=") {
                header_n = Some(rest.trim().parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("bad node count {rest:?}"),
                })?);
                continue;
            }
            let mut it = line.split_whitespace();
            let a: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse {
                    line: lineno,
                    message: format!("expected two integers, got {line:?}"),
                })?;
            let b: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse {
                    line: lineno,
                    message: format!("expected two integers, got {line:?}"),
                })?;
            if it.next().is_some() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("trailing tokens in {line:?}"),
                });
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            raw.push((a, b, lineno));
        }
        let max_idx = raw.iter().map(|&(a, b, _)| a.max(b)).max();
        let n = header_n.unwrap_or_else(|| max_idx.map_or(0, |m| m + 1));
        Graph::new(n, raw.into_iter().map(|(a, b, _)| (a, b)))
    }

    /// Writes the canonical edge list: `n=` header, then sorted `i j` lines,
    /// LF endings. Byte-stable for a given graph.
    pub fn save_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = File::create(path)?;
        let mut w = BufWriter::new(file);
        self.write_edge_list(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn write_edge_list(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "n={}", self.n)?;
        for &(a, b) in &self.edges {
            writeln!(w, "{a} {b}")?;
        }
        Ok(())
    }
}
