//! Arithmetical graphs: storage, validation, the text format and the
//! reduced "tilde" graph.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::gcd_all;
use crate::error::GraphError;
use crate::linalg::IntegerMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub multiplicity: BigInt,
}

/// A connected multigraph with multiplicities `R` and intersection matrix
/// `M` satisfying `M R = 0` and `gcd(R) = 1`.
///
/// Only the off-diagonal edge counts are stored; the diagonal is derived.
/// Values are immutable once built and always valid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArithmeticalGraph {
    vertices: Vec<Vertex>,
    index: HashMap<String, usize>,
    adjacency: Vec<BTreeMap<usize, BigInt>>,
    diagonal: Vec<BigInt>,
}

pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Incremental construction; `build` runs the full validation.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    vertices: Vec<Vertex>,
    index: HashMap<String, usize>,
    edges: BTreeMap<(usize, usize), BigInt>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(
        &mut self,
        name: impl Into<String>,
        multiplicity: impl Into<BigInt>,
    ) -> Result<usize, GraphError> {
        let name = name.into();
        let multiplicity = multiplicity.into();
        if !is_valid_name(&name) {
            return Err(GraphError::Syntax {
                line: 0,
                column: 0,
                message: format!("invalid vertex name `{name}`"),
            });
        }
        if self.index.contains_key(&name) {
            return Err(GraphError::DuplicateVertex(name));
        }
        if !multiplicity.is_positive() {
            return Err(GraphError::NonPositiveMultiplicity(name));
        }
        let id = self.vertices.len();
        self.index.insert(name.clone(), id);
        self.vertices.push(Vertex { name, multiplicity });
        Ok(id)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Adds `count` edges between two vertices; repeated calls accumulate.
    pub fn edge(&mut self, a: usize, b: usize, count: impl Into<BigInt>) -> Result<(), GraphError> {
        let count = count.into();
        let n = self.vertices.len();
        if a >= n || b >= n {
            return Err(GraphError::UnknownVertex(a.max(b).to_string()));
        }
        if a == b {
            return Err(GraphError::SelfLoop(self.vertices[a].name.clone()));
        }
        if !count.is_positive() {
            return Err(GraphError::NonPositiveEdgeCount(
                self.vertices[a].name.clone(),
                self.vertices[b].name.clone(),
            ));
        }
        *self.edges.entry((a.min(b), a.max(b))).or_insert_with(BigInt::zero) += count;
        Ok(())
    }

    pub fn edge_by_name(&mut self, a: &str, b: &str, count: impl Into<BigInt>) -> Result<(), GraphError> {
        let ia = self
            .index_of(a)
            .ok_or_else(|| GraphError::UnknownVertex(a.to_string()))?;
        let ib = self
            .index_of(b)
            .ok_or_else(|| GraphError::UnknownVertex(b.to_string()))?;
        self.edge(ia, ib, count)
    }

    pub fn build(self) -> Result<ArithmeticalGraph, GraphError> {
        let n = self.vertices.len();
        let mut adjacency = vec![BTreeMap::new(); n];
        for ((a, b), c) in self.edges {
            adjacency[a].insert(b, c.clone());
            adjacency[b].insert(a, c);
        }
        let mut g = ArithmeticalGraph {
            vertices: self.vertices,
            index: self.index,
            adjacency,
            diagonal: Vec::new(),
        };
        g.diagonal = g.derive_diagonal()?;
        g.check_connected()?;
        g.check_primitive()?;
        Ok(g)
    }
}

impl ArithmeticalGraph {
    fn derive_diagonal(&self) -> Result<Vec<BigInt>, GraphError> {
        if self.vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        (0..self.vertex_count())
            .map(|i| {
                let r = &self.vertices[i].multiplicity;
                let s = self.neighbor_sum(i);
                if s.is_multiple_of(r) {
                    Ok(-(s / r))
                } else {
                    Err(GraphError::NotBalanced {
                        vertex: self.vertices[i].name.clone(),
                        multiplicity: r.to_string(),
                        neighbor_sum: s.to_string(),
                    })
                }
            })
            .collect()
    }

    fn check_connected(&self) -> Result<(), GraphError> {
        let reach = self.bfs_distances(&[0], |_, _| true);
        match reach.iter().position(Option::is_none) {
            Some(i) => Err(GraphError::Disconnected(
                self.vertices[i].name.clone(),
                self.vertices[0].name.clone(),
            )),
            None => Ok(()),
        }
    }

    fn check_primitive(&self) -> Result<(), GraphError> {
        let g = gcd_all(self.vertices.iter().map(|v| &v.multiplicity));
        if g.is_one() {
            Ok(())
        } else {
            Err(GraphError::NotPrimitive(g.to_string()))
        }
    }

    /// Re-checks every axiom from scratch.
    pub fn validate(&self) -> Result<(), GraphError> {
        let diag = self.derive_diagonal()?;
        if diag != self.diagonal {
            return Err(GraphError::Family("stored diagonal is stale".into()));
        }
        self.check_connected()?;
        self.check_primitive()?;
        let m = self.intersection_matrix();
        if !m.is_symmetric() || !m.mul_vec(&self.multiplicities()).iter().all(Zero::is_zero) {
            return Err(GraphError::Family("M is not symmetric with MR = 0".into()));
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn name(&self, i: usize) -> &str {
        &self.vertices[i].name
    }

    pub fn multiplicity(&self, i: usize) -> &BigInt {
        &self.vertices[i].multiplicity
    }

    pub fn multiplicities(&self) -> Vec<BigInt> {
        self.vertices.iter().map(|v| v.multiplicity.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Edge count `c_ij` for `i != j`, and the derived `c_ii` otherwise.
    pub fn entry(&self, i: usize, j: usize) -> BigInt {
        if i == j {
            self.diagonal[i].clone()
        } else {
            self.adjacency[i].get(&j).cloned().unwrap_or_else(BigInt::zero)
        }
    }

    /// Neighbors with their edge counts, in increasing index order.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, &BigInt)> + '_ {
        self.adjacency[i].iter().map(|(&j, c)| (j, c))
    }

    pub fn diagonal(&self, i: usize) -> &BigInt {
        &self.diagonal[i]
    }

    /// `d_i`: number of edges at `i`, counted with multiplicity.
    pub fn degree(&self, i: usize) -> BigInt {
        self.adjacency[i].values().sum()
    }

    /// `sum_{j != i} c_ij r_j`
    pub fn neighbor_sum(&self, i: usize) -> BigInt {
        self.adjacency[i]
            .iter()
            .map(|(&j, c)| c * &self.vertices[j].multiplicity)
            .sum()
    }

    /// Undirected edges `(i, j, c_ij)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, adj)| adj.range(i + 1..).map(move |(&j, c)| (i, j, c)))
    }

    pub fn intersection_matrix(&self) -> IntegerMatrix {
        IntegerMatrix::from_fn(self.vertex_count(), self.vertex_count(), |i, j| self.entry(i, j))
    }

    pub fn is_reduced(&self) -> bool {
        self.vertices.iter().all(|v| v.multiplicity.is_one())
    }

    pub fn multiplicity_product(&self) -> BigInt {
        self.vertices.iter().map(|v| &v.multiplicity).product()
    }

    /// Multi-source BFS over edges accepted by `keep`; `None` marks
    /// unreachable vertices.
    pub fn bfs_distances(
        &self,
        sources: &[usize],
        mut keep: impl FnMut(usize, usize) -> bool,
    ) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in self.adjacency[u].keys() {
                if dist[v].is_none() && keep(u, v) {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Connected components of the subgraph on vertices with `alive[i]`,
    /// using only edges accepted by `keep`. Components are listed in order
    /// of their smallest vertex, each sorted.
    pub fn components(
        &self,
        alive: &[bool],
        mut keep: impl FnMut(usize, usize) -> bool,
    ) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || !alive[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &v in self.adjacency[u].keys() {
                    if alive[v] && !seen[v] && keep(u, v) {
                        seen[v] = true;
                        comp.push(v);
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Serializes to the line format read by [`parse_graph`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            out.push_str(&format!("vertex {} {}\n", v.name, v.multiplicity));
        }
        let mut edges: Vec<(&str, &str, &BigInt)> = self
            .edges()
            .map(|(i, j, c)| {
                let (a, b) = (self.name(i), self.name(j));
                if a <= b {
                    (a, b, c)
                } else {
                    (b, a, c)
                }
            })
            .collect();
        edges.sort();
        for (a, b, c) in edges {
            out.push_str(&format!("edge {a} {b} {c}\n"));
        }
        out
    }

    pub fn resolve(&self, r: &VertexRef) -> Result<usize, GraphError> {
        r.resolve(self)
    }

    /// Resolves a command-line style reference: a vertex name, or failing
    /// that a zero-based index.
    pub fn resolve_str(&self, s: &str) -> Result<usize, GraphError> {
        VertexRef::parse(s).resolve(self)
    }
}

impl fmt::Display for ArithmeticalGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// A reference to one vertex, by index or by name.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VertexRef {
    Index(usize),
    Name(String),
    /// Textual reference: matched against names first, then as an index.
    Text(String),
}

impl VertexRef {
    pub fn parse(s: &str) -> Self {
        VertexRef::Text(s.to_string())
    }

    pub fn resolve(&self, g: &ArithmeticalGraph) -> Result<usize, GraphError> {
        match self {
            VertexRef::Index(i) if *i < g.vertex_count() => Ok(*i),
            VertexRef::Index(i) => Err(GraphError::UnknownVertex(i.to_string())),
            VertexRef::Name(n) => g
                .index_of(n)
                .ok_or_else(|| GraphError::UnknownVertex(n.clone())),
            VertexRef::Text(s) => {
                let by_name = g.index_of(s);
                let by_index = s.parse::<usize>().ok().filter(|&i| i < g.vertex_count());
                match (by_name, by_index) {
                    (Some(a), Some(b)) if a != b => Err(GraphError::AmbiguousVertex(s.clone())),
                    (Some(a), _) => Ok(a),
                    (None, Some(b)) => Ok(b),
                    (None, None) => Err(GraphError::UnknownVertex(s.clone())),
                }
            }
        }
    }
}

impl From<usize> for VertexRef {
    fn from(i: usize) -> Self {
        VertexRef::Index(i)
    }
}

impl From<&str> for VertexRef {
    fn from(s: &str) -> Self {
        VertexRef::Name(s.to_string())
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> GraphError {
    GraphError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Parses the line-oriented graph format:
///
/// ```text
/// # comment
/// vertex <name> <multiplicity>
/// edge <name> <name> [count]
/// ```
///
/// Repeated edge lines between the same pair are summed.
pub fn parse_graph(text: &str) -> Result<ArithmeticalGraph, GraphError> {
    let mut b = GraphBuilder::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<(usize, &str)> = tokenize(content);
        let Some(&(col, keyword)) = tokens.first() else {
            continue;
        };
        let positive = |idx: usize, what: &str| -> Result<BigInt, GraphError> {
            let (c, tok) = tokens[idx];
            let v: BigInt = tok
                .parse()
                .map_err(|_| syntax(line, c, format!("expected {what}, found `{tok}`")))?;
            if !v.is_positive() {
                return Err(syntax(line, c, format!("{what} must be positive, found `{tok}`")));
            }
            Ok(v)
        };
        let name = |idx: usize| -> Result<&str, GraphError> {
            let (c, tok) = tokens[idx];
            if is_valid_name(tok) {
                Ok(tok)
            } else {
                Err(syntax(line, c, format!("invalid vertex name `{tok}`")))
            }
        };
        match keyword {
            "vertex" => {
                if tokens.len() != 3 {
                    return Err(syntax(line, col, "expected `vertex <name> <multiplicity>`"));
                }
                let n = name(1)?;
                let r = positive(2, "multiplicity")?;
                b.vertex(n, r)?;
            }
            "edge" => {
                if !(3..=4).contains(&tokens.len()) {
                    return Err(syntax(line, col, "expected `edge <name> <name> [count]`"));
                }
                let (x, y) = (name(1)?, name(2)?);
                let count = if tokens.len() == 4 {
                    positive(3, "edge count")?
                } else {
                    BigInt::one()
                };
                let ix = b
                    .index_of(x)
                    .ok_or_else(|| GraphError::UnknownVertex(x.to_string()))?;
                let iy = b
                    .index_of(y)
                    .ok_or_else(|| GraphError::UnknownVertex(y.to_string()))?;
                b.edge(ix, iy, count)?;
            }
            other => return Err(syntax(line, col, format!("unknown directive `{other}`"))),
        }
    }
    b.build()
}

fn tokenize(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in s.char_indices() {
        if ch.is_whitespace() {
            if let Some(st) = start.take() {
                out.push((st, &s[st..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push((st, &s[st..]));
    }
    // 1-based columns, counted in characters
    out.into_iter()
        .map(|(b, t)| (s[..b].chars().count() + 1, t))
        .collect()
}

/// The reduced graph with off-diagonal entries `r_i r_j c_ij` and every
/// multiplicity equal to 1; same vertex names and order.
pub fn tilde_graph(g: &ArithmeticalGraph) -> ArithmeticalGraph {
    let mut b = GraphBuilder::new();
    for v in g.vertices() {
        b.vertex(v.name.clone(), 1).expect("names already validated");
    }
    for (i, j, c) in g.edges() {
        b.edge(i, j, c * g.multiplicity(i) * g.multiplicity(j))
            .expect("edge already validated");
    }
    b.build().expect("tilde graph of a valid graph is valid")
}
