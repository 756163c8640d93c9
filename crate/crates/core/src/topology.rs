//! Network graphs and Metropolis combination weights.
//!
//! Neighbourhoods are self-inclusive: `|N_k|` counts node `k` itself, and the
//! Metropolis weight of a link is `1 / max(|N_k|, |N_l|)`.
//!
//! ```
//! use drjio_core::topology::{metropolis_weights, Topology};
//!
//! let path = Topology::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
//! let c = metropolis_weights(&path).unwrap();
//! assert!((c.weight(0, 0) - 2.0 / 3.0).abs() < 1e-15);
//! assert!((c.weight(1, 1) - 1.0 / 3.0).abs() < 1e-15);
//! ```

use std::collections::VecDeque;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::rng;
use crate::{Error, Result};

/// Branches of the IEEE 14-bus test system (1-indexed bus numbers).
pub const IEEE_14_BUS_BRANCHES: [(usize, usize); 20] = [
    (1, 2),
    (1, 5),
    (2, 3),
    (2, 4),
    (2, 5),
    (3, 4),
    (4, 5),
    (4, 7),
    (4, 9),
    (5, 6),
    (6, 11),
    (6, 12),
    (6, 13),
    (7, 8),
    (7, 9),
    (9, 10),
    (9, 14),
    (10, 11),
    (12, 13),
    (13, 14),
];

/// Undirected, connected graph with self-loops on every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    n_nodes: usize,
    adjacency: Vec<bool>,
}

impl Topology {
    /// Builds a topology from a row-major `n × n` adjacency relation.
    ///
    /// Rejects asymmetric relations, missing self-loops and disconnected graphs.
    pub fn from_adjacency(n_nodes: usize, adjacency: Vec<bool>) -> Result<Self> {
        if n_nodes == 0 {
            return Err(Error::InvalidTopology("a network needs at least one node".into()));
        }
        if adjacency.len() != n_nodes * n_nodes {
            return Err(Error::DimensionMismatch {
                expected: n_nodes * n_nodes,
                found: adjacency.len(),
            });
        }
        let t = Topology { n_nodes, adjacency };
        t.validate()?;
        Ok(t)
    }

    /// Builds a topology from 0-indexed undirected edges; self-loops are implied.
    pub fn from_edges(n_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![false; n_nodes * n_nodes];
        for k in 0..n_nodes {
            adjacency[k * n_nodes + k] = true;
        }
        for &(k, l) in edges {
            if k >= n_nodes || l >= n_nodes {
                return Err(Error::InvalidTopology(format!(
                    "edge ({k}, {l}) references a node outside 0..{n_nodes}"
                )));
            }
            adjacency[k * n_nodes + l] = true;
            adjacency[l * n_nodes + k] = true;
        }
        Self::from_adjacency(n_nodes, adjacency)
    }

    /// Parses the `k l` edge-list text format (1-indexed, `#` comments).
    ///
    /// The node count is the largest index seen unless a `nodes N` line
    /// declares it explicitly.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("expected a node index, found `{s}`"),
                })
            };
            match fields.as_slice() {
                ["nodes", n] => declared = Some(parse(n)?),
                [a, b] => {
                    let (k, l) = (parse(a)?, parse(b)?);
                    if k == 0 || l == 0 {
                        return Err(Error::Parse {
                            line: idx + 1,
                            message: "node indices are 1-based".into(),
                        });
                    }
                    edges.push((k - 1, l - 1));
                }
                _ => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: format!("expected `k l`, found `{line}`"),
                    })
                }
            }
        }
        let max_index = edges.iter().map(|&(k, l)| k.max(l) + 1).max().unwrap_or(0);
        let n = declared.unwrap_or(max_index);
        if n < max_index {
            return Err(Error::InvalidTopology(format!(
                "declared {n} nodes but an edge references node {max_index}"
            )));
        }
        Self::from_edges(n, &edges)
    }

    /// Writes the edge list (1-indexed, one `k l` line per undirected link).
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "nodes {}", self.n_nodes);
        for (k, l) in self.edges() {
            let _ = writeln!(out, "{} {}", k + 1, l + 1);
        }
        out
    }

    /// The IEEE 14-bus grid.
    pub fn ieee_14_bus() -> Self {
        let edges: Vec<_> = IEEE_14_BUS_BRANCHES.iter().map(|&(a, b)| (a - 1, b - 1)).collect();
        Self::from_edges(14, &edges).expect("embedded 14-bus branch list is connected")
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn linked(&self, k: usize, l: usize) -> bool {
        self.adjacency[k * self.n_nodes + l]
    }

    /// Neighbourhood of `k`, including `k`, in ascending order.
    pub fn neighbors(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_nodes).filter(move |&l| self.linked(k, l))
    }

    /// Self-inclusive degree `|N_k|`.
    pub fn degree(&self, k: usize) -> usize {
        self.neighbors(k).count()
    }

    /// Undirected links `(k, l)` with `k < l`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n_nodes;
        (0..n)
            .flat_map(|k| ((k + 1)..n).map(move |l| (k, l)))
            .filter(|&(k, l)| self.linked(k, l))
            .collect()
    }

    /// Average number of neighbours, not counting the node itself.
    pub fn mean_degree(&self) -> f64 {
        2.0 * self.edges().len() as f64 / self.n_nodes as f64
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n_nodes;
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == n
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_nodes;
        for k in 0..n {
            if !self.linked(k, k) {
                return Err(Error::InvalidTopology(format!("node {k} is missing its self-loop")));
            }
            for l in (k + 1)..n {
                if self.linked(k, l) != self.linked(l, k) {
                    return Err(Error::InvalidTopology(format!(
                        "adjacency is asymmetric between nodes {k} and {l}"
                    )));
                }
            }
        }
        if !self.is_connected() {
            return Err(Error::InvalidTopology("graph is disconnected".into()));
        }
        Ok(())
    }
}

/// Row-stochastic combination weights `c_kl`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationMatrix {
    weights: DMatrix<f64>,
}

impl CombinationMatrix {
    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn n_nodes(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weight(&self, k: usize, l: usize) -> f64 {
        self.weights[(k, l)]
    }

    /// Nonzero entries of row `k` as `(l, c_kl)`.
    pub fn row(&self, k: usize) -> Vec<(usize, f64)> {
        (0..self.n_nodes())
            .filter_map(|l| {
                let c = self.weights[(k, l)];
                (c != 0.0).then_some((l, c))
            })
            .collect()
    }

    /// The identity combination (no cooperation).
    pub fn identity(n_nodes: usize) -> Self {
        CombinationMatrix {
            weights: DMatrix::identity(n_nodes, n_nodes),
        }
    }
}

/// Metropolis combination weights over self-inclusive neighbourhoods.
pub fn metropolis_weights(topology: &Topology) -> Result<CombinationMatrix> {
    topology.validate()?;
    let n = topology.n_nodes();
    let degree: Vec<usize> = (0..n).map(|k| topology.degree(k)).collect();
    let mut weights = DMatrix::zeros(n, n);
    for k in 0..n {
        let mut off = 0.0;
        for l in topology.neighbors(k).filter(|&l| l != k) {
            let c = 1.0 / degree[k].max(degree[l]) as f64;
            weights[(k, l)] = c;
            off += c;
        }
        weights[(k, k)] = 1.0 - off;
    }
    Ok(CombinationMatrix { weights })
}

/// Random connected graph with roughly `target_degree` neighbours per node.
///
/// Each pair is linked with probability `target_degree / (n − 1)`; a random
/// spanning tree is then overlaid so the graph is always connected.
pub fn random_connected_topology(n_nodes: usize, target_degree: f64, seed: u64) -> Result<Topology> {
    if n_nodes == 0 {
        return Err(Error::InvalidParameter("n_nodes must be at least 1".into()));
    }
    if !(target_degree.is_finite() && target_degree > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "target degree must be positive, got {target_degree}"
        )));
    }
    if n_nodes == 1 {
        return Topology::from_edges(1, &[]);
    }
    if target_degree > (n_nodes - 1) as f64 {
        return Err(Error::InvalidParameter(format!(
            "target degree {target_degree} exceeds the {} possible neighbours",
            n_nodes - 1
        )));
    }
    let mut rng = rng::stream(seed, &[rng::role::TOPOLOGY]);
    let p = target_degree / (n_nodes - 1) as f64;
    let mut edges = Vec::new();
    for k in 0..n_nodes {
        for l in (k + 1)..n_nodes {
            if rng.random_bool(p) {
                edges.push((k, l));
            }
        }
    }
    let mut order: Vec<usize> = (0..n_nodes).collect();
    order.shuffle(&mut rng);
    for i in 1..n_nodes {
        let parent = order[rng.random_range(0..i)];
        edges.push((order[i], parent));
    }
    Topology::from_edges(n_nodes, &edges)
}
