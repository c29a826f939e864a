//! A graph bundled with lazily computed, immutable analyses.

use std::sync::OnceLock;

use num_bigint::BigInt;

use crate::chains::{enumerate_chains, Chain};
use crate::graph::ArithmeticalGraph;
use crate::group::{pair_element_or_zero, ComponentGroup, GroupElement, RationalModZ};
use crate::topology::{Topology, WeakPath};

/// Owns a graph and caches its component group, bridges and chains.
/// Safe to share between threads; every cache is filled at most once.
#[derive(Debug)]
pub struct Analysis {
    graph: ArithmeticalGraph,
    group: OnceLock<ComponentGroup>,
    topology: OnceLock<Topology>,
    chains: OnceLock<Vec<Chain>>,
}

impl Analysis {
    pub fn new(graph: ArithmeticalGraph) -> Self {
        Analysis {
            graph,
            group: OnceLock::new(),
            topology: OnceLock::new(),
            chains: OnceLock::new(),
        }
    }

    pub fn graph(&self) -> &ArithmeticalGraph {
        &self.graph
    }

    pub fn into_graph(self) -> ArithmeticalGraph {
        self.graph
    }

    pub fn group(&self) -> &ComponentGroup {
        self.group.get_or_init(|| ComponentGroup::new(&self.graph))
    }

    pub fn topology(&self) -> &Topology {
        self.topology.get_or_init(|| Topology::new(&self.graph))
    }

    pub fn chains(&self) -> &[Chain] {
        self.chains.get_or_init(|| enumerate_chains(&self.graph))
    }

    /// Terminal chains whose node is `d`.
    pub fn terminal_chains_at(&self, d: usize) -> Vec<&Chain> {
        self.chains()
            .iter()
            .filter(|c| c.is_terminal && c.start_node == Some(d))
            .collect()
    }

    pub fn weak_path(&self, c: usize, c2: usize) -> Option<WeakPath> {
        self.topology().weak_path(&self.graph, c, c2)
    }

    /// `E(C, C')`, or zero for `C = C'`.
    pub fn pair(&self, c: usize, c2: usize) -> GroupElement {
        pair_element_or_zero(&self.graph, c, c2)
    }

    pub fn pair_order(&self, c: usize, c2: usize) -> BigInt {
        self.group().element_order(&self.pair(c, c2))
    }

    pub fn pair_ell_part_order(&self, c: usize, c2: usize, ell: u64) -> BigInt {
        self.group().ell_part_order(&self.pair(c, c2), ell)
    }

    /// `<E(C, C'), E(D, D')>` by the exact rational solve.
    pub fn pair_pairing(&self, c: (usize, usize), d: (usize, usize)) -> RationalModZ {
        self.group().pairing(&self.pair(c.0, c.1), &self.pair(d.0, d.1))
    }
}

impl From<ArithmeticalGraph> for Analysis {
    fn from(g: ArithmeticalGraph) -> Self {
        Analysis::new(g)
    }
}
