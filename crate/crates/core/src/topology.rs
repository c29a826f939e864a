//! Bridges, weak connectivity and the bridge path between two vertices.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::gcd_all;
use crate::graph::ArithmeticalGraph;

/// Bridges of the multigraph of `G`. Edges with `c_ij >= 2` are never
/// bridges.
#[derive(Clone, Debug)]
pub struct Topology {
    bridges: HashSet<(usize, usize)>,
    nodes: Vec<bool>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Topology {
    pub fn new(g: &ArithmeticalGraph) -> Self {
        let two = BigInt::from(2);
        Topology {
            bridges: find_bridges(g),
            nodes: (0..g.vertex_count()).map(|i| g.degree(i) > two).collect(),
        }
    }

    pub fn is_bridge(&self, a: usize, b: usize) -> bool {
        self.bridges.contains(&key(a, b))
    }

    /// Bridges as sorted pairs, in increasing order.
    pub fn bridges(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.bridges.iter().copied().collect();
        v.sort_unstable();
        v
    }

    pub fn is_node(&self, i: usize) -> bool {
        self.nodes[i]
    }

    /// The path of bridges from `c` to `c2`, or `None` when the pair is
    /// multiply connected. `c == c2` yields the one-vertex path.
    pub fn weak_path(&self, g: &ArithmeticalGraph, c: usize, c2: usize) -> Option<WeakPath> {
        let n = g.vertex_count();
        let mut parent = vec![usize::MAX; n];
        parent[c] = c;
        let mut stack = vec![c];
        while let Some(u) = stack.pop() {
            if u == c2 {
                break;
            }
            for (v, _) in g.neighbors(u) {
                if parent[v] == usize::MAX && self.is_bridge(u, v) {
                    parent[v] = u;
                    stack.push(v);
                }
            }
        }
        if parent[c2] == usize::MAX {
            return None;
        }
        let mut vertices = vec![c2];
        let mut at = c2;
        while at != c {
            at = parent[at];
            vertices.push(at);
        }
        vertices.reverse();
        Some(WeakPath::from_vertices(g, self, vertices))
    }
}

/// Iterative Tarjan low-link over the simple graph underlying `G`, with
/// multi-edges treated as two parallel edges.
fn find_bridges(g: &ArithmeticalGraph) -> HashSet<(usize, usize)> {
    let n = g.vertex_count();
    let adj: Vec<Vec<(usize, bool)>> = (0..n)
        .map(|i| g.neighbors(i).map(|(j, c)| (j, c.is_one())).collect())
        .collect();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut out = HashSet::new();
    let mut time = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // (vertex, parent, next neighbor index)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        disc[root] = time;
        low[root] = time;
        time += 1;
        while let Some(&mut (u, p, ref mut next)) = stack.last_mut() {
            if *next < adj[u].len() {
                let (v, simple) = adj[u][*next];
                *next += 1;
                if v == p && simple {
                    continue;
                }
                if disc[v] == usize::MAX {
                    disc[v] = time;
                    low[v] = time;
                    time += 1;
                    stack.push((v, u, 0));
                } else {
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if p != usize::MAX {
                    low[p] = low[p].min(low[u]);
                    if low[u] > disc[p] {
                        out.insert(key(u, p));
                    }
                }
            }
        }
    }
    out
}

/// The bridge path `C = P_0, ..., P_{n+1} = C'` between a weakly connected
/// pair, with the nodes on the open path and the chains they cut it into.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakPath {
    pub vertices: Vec<usize>,
    /// Positions in `vertices` of the nodes `C_1, ..., C_s`, endpoints
    /// excluded.
    pub node_positions: Vec<usize>,
    /// Chains `C_0, ..., C_s` as vertex lists including their endpoints.
    pub segments: Vec<Vec<usize>>,
    /// `w(C_i)`: gcd of the multiplicities on each chain.
    pub weights: Vec<BigInt>,
}

impl WeakPath {
    fn from_vertices(g: &ArithmeticalGraph, topo: &Topology, vertices: Vec<usize>) -> Self {
        let last = vertices.len() - 1;
        let node_positions: Vec<usize> = (1..last.max(1))
            .filter(|&k| topo.is_node(vertices[k]))
            .collect();
        let mut cuts = vec![0];
        cuts.extend(&node_positions);
        cuts.push(last);
        let segments: Vec<Vec<usize>> = cuts
            .windows(2)
            .map(|w| vertices[w[0]..=w[1]].to_vec())
            .collect();
        let weights = segments
            .iter()
            .map(|seg| gcd_all(seg.iter().map(|&v| g.multiplicity(v))))
            .collect();
        WeakPath {
            vertices,
            node_positions,
            segments,
            weights,
        }
    }

    pub fn nodes(&self) -> Vec<usize> {
        self.node_positions.iter().map(|&k| self.vertices[k]).collect()
    }

    /// `s`: the number of nodes strictly inside the path.
    pub fn node_count(&self) -> usize {
        self.node_positions.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.windows(2).map(|w| key(w[0], w[1]))
    }

    /// For every vertex of `G`, the position on the path of the unique
    /// path vertex in its component of `G` minus the path edges.
    pub fn projections(&self, g: &ArithmeticalGraph) -> Vec<usize> {
        let path_edges: HashSet<(usize, usize)> = self.edges().collect();
        let sources: Vec<usize> = self.vertices.clone();
        let mut owner = vec![usize::MAX; g.vertex_count()];
        let mut queue = std::collections::VecDeque::new();
        for (pos, &v) in sources.iter().enumerate() {
            owner[v] = pos;
            queue.push_back(v);
        }
        while let Some(u) = queue.pop_front() {
            for (v, _) in g.neighbors(u) {
                if owner[v] == usize::MAX && !path_edges.contains(&key(u, v)) {
                    owner[v] = owner[u];
                    queue.push_back(v);
                }
            }
        }
        owner
    }
}
