//! Nodes, chains and terminal chains; the `b`-sequence of a chain and the
//! order-one shortcuts that follow from chain structure.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::gcd_all;
use crate::error::{Error, Result};
use crate::graph::ArithmeticalGraph;
use crate::linalg::IntegerMatrix;
use crate::topology::Topology;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexClass {
    /// degree > 2
    Node,
    /// degree 1
    Terminal,
    /// degree 2 (or 0 in the one-vertex graph)
    Chain,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexClasses {
    pub nodes: Vec<usize>,
    pub terminals: Vec<usize>,
    pub chain_vertices: Vec<usize>,
}

pub fn vertex_class(g: &ArithmeticalGraph, i: usize) -> VertexClass {
    let d = g.degree(i);
    if d > BigInt::from(2) {
        VertexClass::Node
    } else if d.is_one() {
        VertexClass::Terminal
    } else {
        VertexClass::Chain
    }
}

/// Partition of the vertices by degree, multi-edges counted with
/// multiplicity.
pub fn classify_vertices(g: &ArithmeticalGraph) -> VertexClasses {
    let mut out = VertexClasses::default();
    for i in 0..g.vertex_count() {
        match vertex_class(g, i) {
            VertexClass::Node => out.nodes.push(i),
            VertexClass::Terminal => out.terminals.push(i),
            VertexClass::Chain => out.chain_vertices.push(i),
        }
    }
    out
}

/// A maximal run of non-node vertices, closed up with its bounding nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    /// Ordered vertices. When the chain touches a node, `vertices[0]` is a
    /// node; a terminal chain runs from its node to the terminal vertex.
    pub vertices: Vec<usize>,
    pub start_node: Option<usize>,
    pub end_node: Option<usize>,
    pub is_terminal: bool,
    /// The whole graph is a cycle without nodes.
    pub is_closed: bool,
    /// gcd of the multiplicities of every vertex listed, endpoints included.
    pub weight: BigInt,
}

impl Chain {
    /// Vertices strictly between the bounding nodes.
    pub fn interior(&self) -> &[usize] {
        let lo = usize::from(self.start_node.is_some());
        let hi = self.vertices.len() - usize::from(self.end_node.is_some());
        &self.vertices[lo..hi.max(lo)]
    }

    pub fn terminal_vertex(&self) -> Option<usize> {
        if self.is_terminal && self.end_node.is_none() {
            self.vertices.last().copied()
        } else {
            None
        }
    }

    /// First vertex after the starting node.
    pub fn first_vertex(&self) -> Option<usize> {
        self.interior().first().copied()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }
}

/// Chains of `G`: components of `G` minus its nodes closed with their
/// bounding nodes, plus one bare chain per edge joining two nodes.
pub fn enumerate_chains(g: &ArithmeticalGraph) -> Vec<Chain> {
    let n = g.vertex_count();
    let node: Vec<bool> = (0..n).map(|i| vertex_class(g, i) == VertexClass::Node).collect();
    let alive: Vec<bool> = node.iter().map(|x| !x).collect();
    let mut chains = Vec::new();
    for comp in g.components(&alive, |_, _| true) {
        chains.push(build_chain(g, &node, &comp));
    }
    for (i, j, _) in g.edges() {
        if node[i] && node[j] {
            chains.push(Chain {
                vertices: vec![i, j],
                start_node: Some(i),
                end_node: Some(j),
                is_terminal: false,
                is_closed: false,
                weight: g.multiplicity(i).gcd(g.multiplicity(j)),
            });
        }
    }
    chains
}

fn build_chain(g: &ArithmeticalGraph, node: &[bool], comp: &[usize]) -> Chain {
    let in_comp = |v: usize| comp.binary_search(&v).is_ok();
    let internal_degree = |v: usize| -> BigInt {
        g.neighbors(v)
            .filter(|(u, _)| in_comp(*u))
            .map(|(_, c)| c.clone())
            .sum()
    };
    let node_neighbors = |v: usize| -> Vec<usize> {
        let mut out = Vec::new();
        for (u, c) in g.neighbors(v) {
            if node[u] {
                let k: usize = c.try_into().unwrap_or(2);
                out.extend(std::iter::repeat(u).take(k));
            }
        }
        out
    };

    let ends: Vec<usize> = comp
        .iter()
        .copied()
        .filter(|&v| internal_degree(v) <= BigInt::one())
        .collect();
    if ends.is_empty() {
        // a cycle with no nodes: the whole graph
        let mut order = vec![comp[0]];
        let (mut prev, mut at) = (usize::MAX, comp[0]);
        while let Some(u) = g.neighbors(at).map(|(u, _)| u).find(|&u| u != prev) {
            if u == comp[0] {
                break;
            }
            order.push(u);
            prev = at;
            at = u;
        }
        let weight = gcd_all(order.iter().map(|&v| g.multiplicity(v)));
        return Chain {
            vertices: order,
            start_node: None,
            end_node: None,
            is_terminal: false,
            is_closed: true,
            weight,
        };
    }

    // Walk from an end that touches a node when there is one.
    let start = ends
        .iter()
        .copied()
        .find(|&v| !node_neighbors(v).is_empty())
        .unwrap_or(ends[0]);
    let mut walk = vec![start];
    let mut prev = usize::MAX;
    let mut at = start;
    while let Some(u) = g
        .neighbors(at)
        .map(|(u, _)| u)
        .find(|&u| u != prev && in_comp(u))
    {
        walk.push(u);
        prev = at;
        at = u;
    }
    let first = walk[0];
    let last = *walk.last().unwrap();
    let mut head = node_neighbors(first);
    let tail = if first == last {
        // single vertex: split its node edges between both ends
        head.split_off(head.len().min(1))
    } else {
        node_neighbors(last)
    };
    let start_node = head.first().copied();
    let end_node = tail.first().copied();
    let mut vertices = Vec::with_capacity(walk.len() + 2);
    vertices.extend(start_node);
    vertices.extend(&walk);
    vertices.extend(end_node);
    let is_terminal = vertex_class(g, last) == VertexClass::Terminal
        || vertex_class(g, first) == VertexClass::Terminal
        || (walk.len() == 1 && g.vertex_count() == 1);
    let weight = gcd_all(vertices.iter().map(|&v| g.multiplicity(v)));
    Chain {
        vertices,
        start_node,
        end_node,
        is_terminal,
        is_closed: false,
        weight,
    }
}

/// The tridiagonal matrix `N` of a chain and its `b`-sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainData {
    /// `N`: the intersection matrix restricted to the interior vertices.
    pub n_matrix: IntegerMatrix,
    /// `b_1 = 1, ..., b_n`
    pub b: Vec<BigInt>,
    /// the final value `b`
    pub b_final: BigInt,
    /// multiplicity of the starting node
    pub r: BigInt,
    /// multiplicity of the far node, or 0 for a terminal chain
    pub r_far: BigInt,
    /// interior multiplicities `r_1, ..., r_n`
    pub rs: Vec<BigInt>,
}

/// Solves `(b_1, ..., b_n) N = (0, ..., 0, -b)` left to right from `b_1 = 1`.
pub fn b_sequence(g: &ArithmeticalGraph, chain: &Chain) -> Result<ChainData> {
    let Some(start) = chain.start_node else {
        return Err(Error::InvalidArgument(
            "chain has no bounding node; the b-sequence is defined from a node".into(),
        ));
    };
    let interior = chain.interior();
    if interior.is_empty() {
        return Err(Error::InvalidArgument(
            "chain has no interior vertices; no b-sequence".into(),
        ));
    }
    if !g.entry(start, interior[0]).is_one()
        || chain
            .end_node
            .is_some_and(|e| !g.entry(*interior.last().unwrap(), e).is_one())
    {
        return Err(Error::InvalidArgument(
            "chain is attached to its node by a multiple edge".into(),
        ));
    }
    let n = interior.len();
    let n_matrix = IntegerMatrix::from_fn(n, n, |i, j| g.entry(interior[i], interior[j]));
    let c: Vec<BigInt> = interior.iter().map(|&v| -g.diagonal(v)).collect();
    let mut b = vec![BigInt::one()];
    let mut prev = BigInt::zero();
    for j in 0..n {
        let next = &c[j] * &b[j] - &prev;
        prev = b[j].clone();
        if j + 1 < n {
            b.push(next);
        } else {
            return Ok(ChainData {
                n_matrix,
                b,
                b_final: next,
                r: g.multiplicity(start).clone(),
                r_far: chain
                    .end_node
                    .map_or_else(BigInt::zero, |e| g.multiplicity(e).clone()),
                rs: interior.iter().map(|&v| g.multiplicity(v).clone()).collect(),
            });
        }
    }
    unreachable!("loop returns on its last step")
}

impl ChainData {
    /// `(b_1, ..., b_n) N = (0, ..., 0, -b)`, by explicit multiplication.
    pub fn check_relation(&self) -> bool {
        let n = self.b.len();
        let row = IntegerMatrix::from_fn(1, n, |_, j| self.b[j].clone()).mul(&self.n_matrix);
        (0..n).all(|j| {
            if j + 1 < n {
                row[(0, j)].is_zero()
            } else {
                row[(0, j)] == -&self.b_final
            }
        })
    }

    pub fn check_positive(&self) -> bool {
        self.b.iter().all(Signed::is_positive) && self.b_final.is_positive()
    }

    /// `b r_n = r + b_n r'` (with `r' = 0` on a terminal chain).
    pub fn check_ratio_identity(&self) -> bool {
        let bn = self.b.last().unwrap();
        let rn = self.rs.last().unwrap();
        &self.b_final * rn == &self.r + bn * &self.r_far
    }

    /// On terminal chains: `r | r_i b_j - r_j b_i` for all `i, j`, and
    /// `gcd(b_n, r / r_n) = 1`.
    pub fn check_divisibility(&self) -> bool {
        let n = self.b.len();
        for i in 0..n {
            for j in 0..n {
                let x = &self.rs[i] * &self.b[j] - &self.rs[j] * &self.b[i];
                if !x.is_multiple_of(&self.r) {
                    return false;
                }
            }
        }
        let rn = self.rs.last().unwrap();
        self.r.is_multiple_of(rn) && self.b.last().unwrap().gcd(&(&self.r / rn)).is_one()
    }

    /// On terminal chains: `sum_k 1/(r_k r_{k+1})` from the node to the
    /// terminal vertex equals `b_n / (r r_n)`.
    pub fn check_partial_sum(&self) -> bool {
        let mut seq = vec![self.r.clone()];
        seq.extend(self.rs.iter().cloned());
        let sum: BigRational = seq
            .windows(2)
            .map(|w| BigRational::new(BigInt::one(), &w[0] * &w[1]))
            .sum();
        let rn = self.rs.last().unwrap();
        sum == BigRational::new(self.b.last().unwrap().clone(), &self.r * rn)
    }
}

/// A shortcut that bounds the order of `E(C, C')` without the Smith form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FastRule {
    /// Both vertices lie on one terminal chain (its node excluded).
    SameTerminalChain,
    /// One vertex is the node bounding a terminal chain holding the other.
    NodeOfTerminalChain,
    /// A single bridge joins the pair: the order divides `bound`.
    BridgeBound(BigInt),
}

impl FastRule {
    /// The proven bound on the order (`1` for the triviality rules).
    pub fn bound(&self) -> BigInt {
        match self {
            FastRule::BridgeBound(b) => b.clone(),
            _ => BigInt::one(),
        }
    }
}

pub fn fast_order_rules(
    g: &ArithmeticalGraph,
    chains: &[Chain],
    topo: &Topology,
    c: usize,
    c2: usize,
) -> Option<FastRule> {
    for ch in chains.iter().filter(|ch| ch.is_terminal) {
        let body = ch.interior();
        let (a, b) = (body.contains(&c), body.contains(&c2));
        if a && b {
            return Some(FastRule::SameTerminalChain);
        }
        if let Some(nd) = ch.start_node {
            if (a && c2 == nd) || (b && c == nd) {
                return Some(FastRule::NodeOfTerminalChain);
            }
        }
    }
    if g.entry(c, c2).is_one() && topo.is_bridge(c, c2) {
        let side = |from: usize| -> BigInt {
            let alive = vec![true; g.vertex_count()];
            let comps = g.components(&alive, |u, v| {
                !((u == c && v == c2) || (u == c2 && v == c))
            });
            let comp = comps.into_iter().find(|k| k.contains(&from)).unwrap();
            gcd_all(comp.iter().map(|&v| g.multiplicity(v)))
        };
        let gg = g.multiplicity(c).gcd(g.multiplicity(c2));
        let (s, s2) = (side(c), side(c2));
        return Some(FastRule::BridgeBound((&gg / s).gcd(&(&gg / s2))));
    }
    None
}
