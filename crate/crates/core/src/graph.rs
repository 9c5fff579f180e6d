//! Undirected weighted graphs and all-pairs shortest paths.

use std::collections::VecDeque;

use ndarray::Array2;
use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::manifolds::DistanceMatrix;

/// Simple undirected graph on nodes `0..n` with positive edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<(usize, f64)>>,
}

impl Graph {
    /// Builds a graph from `(u, v, w)` triples. Self-loops are rejected;
    /// repeated edges keep the smallest weight.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u},{v}) references a node outside 0..{n}")));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop on node {u}")));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::invalid(format!("edge ({u},{v}) has non-positive weight {w}")));
            }
            match adj[u].iter_mut().find(|(x, _)| *x == v) {
                Some(e) => {
                    e.1 = e.1.min(w);
                    let back = adj[v].iter_mut().find(|(x, _)| *x == u).unwrap();
                    back.1 = back.1.min(w);
                }
                None => {
                    adj[u].push((v, w));
                    adj[v].push((u, w));
                }
            }
        }
        for list in &mut adj {
            list.sort_by_key(|e| e.0);
        }
        Ok(Self { n, adj })
    }

    /// Unit-weight graph.
    pub fn from_unweighted(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let e: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        Self::from_edges(n, &e)
    }

    /// Graph whose edges are the pairs at distance exactly 1.
    pub fn from_unit_distances(d: &DistanceMatrix) -> Self {
        let n = d.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if d.get(i, j) == 1.0 {
                    edges.push((i, j));
                }
            }
        }
        Self::from_unweighted(n, &edges).expect("indices are in range")
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[u].iter().map(|e| e.0)
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search_by_key(&v, |e| e.0).is_ok()
    }

    /// Edges as `(u, v, w)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adj.iter().enumerate() {
            for &(v, w) in list {
                if u < v {
                    out.push((u, v, w));
                }
            }
        }
        out
    }

    pub fn is_unit_weight(&self) -> bool {
        self.adj.iter().flatten().all(|e| e.1 == 1.0)
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::<usize>::new(self.n);
        for (u, v, _) in self.edges() {
            uf.union(u, v);
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; self.n];
        for u in 0..self.n {
            let r = uf.find(u);
            if slot[r] == usize::MAX {
                slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[r]].push(u);
        }
        groups
    }

    /// All-pairs shortest-path distances: breadth-first search for unit
    /// weights, Dijkstra otherwise.
    pub fn distance_matrix(&self) -> Result<DistanceMatrix> {
        if self.n == 0 {
            return Err(Error::invalid("graph has no nodes"));
        }
        let comps = self.components();
        if comps.len() > 1 {
            return Err(Error::Disconnected { components: comps });
        }
        let mut m = Array2::zeros((self.n, self.n));
        if self.is_unit_weight() {
            for s in 0..self.n {
                let mut dist = vec![usize::MAX; self.n];
                dist[s] = 0;
                let mut q = VecDeque::from([s]);
                while let Some(u) = q.pop_front() {
                    for v in self.neighbors(u) {
                        if dist[v] == usize::MAX {
                            dist[v] = dist[u] + 1;
                            q.push_back(v);
                        }
                    }
                }
                for (t, d) in dist.into_iter().enumerate() {
                    m[[s, t]] = d as f64;
                }
            }
        } else {
            let mut g = UnGraph::<(), f64>::with_capacity(self.n, self.edge_count());
            let nodes: Vec<NodeIndex> = (0..self.n).map(|_| g.add_node(())).collect();
            for (u, v, w) in self.edges() {
                g.add_edge(nodes[u], nodes[v], w);
            }
            for s in 0..self.n {
                let res = dijkstra(&g, nodes[s], None, |e| *e.weight());
                for (node, d) in res {
                    m[[s, node.index()]] = d;
                }
            }
            // Floating sums along different paths can differ in the last bit.
            for i in 0..self.n {
                for j in i + 1..self.n {
                    let v = m[[i, j]].min(m[[j, i]]);
                    m[[i, j]] = v;
                    m[[j, i]] = v;
                }
            }
        }
        DistanceMatrix::new(m)
    }
}

/// Shortest-path distance matrix of an edge list.
pub fn graph_to_distance_matrix(n: usize, edges: &[(usize, usize, f64)]) -> Result<DistanceMatrix> {
    Graph::from_edges(n, edges)?.distance_matrix()
}
