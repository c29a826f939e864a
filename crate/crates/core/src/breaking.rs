//! Breakability along bridge paths, `lambda`, breaking a graph at a cut
//! vertex, and the structural order formulas for pairs of vertices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::Analysis;
use crate::arith::{ell_power, gcd_all, require_prime, valuation};
use crate::chains::Chain;
use crate::citation as cite;
use crate::error::{Error, Result};
use crate::graph::{ArithmeticalGraph, GraphBuilder};
use crate::group::{pair_element_or_zero, ComponentGroup, GroupElement};
use crate::topology::WeakPath;

pub use crate::families::euclid_chain;

fn divides(ell: u64, x: &BigInt) -> bool {
    x.is_multiple_of(&BigInt::from(ell))
}

/// No chain weight along the path is divisible by `ell`.
pub fn is_ell_breakable(path: &WeakPath, ell: u64) -> bool {
    path.weights.iter().all(|w| !divides(ell, w))
}

/// Per-node data behind `lambda` for a weakly connected pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BreakabilityReport {
    pub weights: Vec<BigInt>,
    /// `m_i`: gcd of the multiplicities in the component of `C_i` once the
    /// path edges are removed.
    pub node_gcds: Vec<BigInt>,
    pub lambda_exponent: u32,
    pub lambda: BigInt,
}

pub fn breakability_report(g: &ArithmeticalGraph, path: &WeakPath, ell: u64) -> Result<BreakabilityReport> {
    require_prime(ell)?;
    if !is_ell_breakable(path, ell) {
        return Err(Error::precondition(
            format!("the pair is not {ell}-breakable (a chain weight on the path is divisible by {ell})"),
            cite::LAMBDA,
        ));
    }
    let nodes = path.nodes();
    let mut node_gcds = Vec::with_capacity(nodes.len());
    if !nodes.is_empty() {
        let path_edges: Vec<(usize, usize)> = path.edges().collect();
        let alive = vec![true; g.vertex_count()];
        let comps = g.components(&alive, |u, v| !path_edges.contains(&(u.min(v), u.max(v))));
        let mut comp_of = vec![0usize; g.vertex_count()];
        for (k, comp) in comps.iter().enumerate() {
            for &v in comp {
                comp_of[v] = k;
            }
        }
        let gcds: Vec<BigInt> = comps
            .iter()
            .map(|comp| gcd_all(comp.iter().map(|&v| g.multiplicity(v))))
            .collect();
        for &c in &nodes {
            node_gcds.push(gcds[comp_of[c]].clone());
        }
    }
    let lambda_exponent = nodes
        .iter()
        .zip(&node_gcds)
        .map(|(&c, m)| valuation(&(g.multiplicity(c) / m), ell))
        .max()
        .unwrap_or(0);
    Ok(BreakabilityReport {
        weights: path.weights.clone(),
        node_gcds,
        lambda_exponent,
        lambda: ell_power(ell, lambda_exponent),
    })
}

/// `lambda(C, C')`: `ell^(max ord_ell(r_i / m_i))` over the nodes on the
/// path, and 1 when the path has no node.
pub fn lambda(g: &ArithmeticalGraph, path: &WeakPath, ell: u64) -> Result<BigInt> {
    Ok(breakability_report(g, path, ell)?.lambda)
}

/// The structural order of the `ell`-part of `E(C, C')`, defined when
/// `ell` divides neither multiplicity and the pair is weakly connected and
/// `ell`-breakable.
pub fn order_via_structure(a: &Analysis, c: usize, c2: usize, ell: u64) -> Result<BigInt> {
    require_prime(ell)?;
    let g = a.graph();
    if divides(ell, &(g.multiplicity(c) * g.multiplicity(c2))) {
        return Err(Error::precondition(
            format!("{ell} divides r r'"),
            cite::ORDER_VIA_STRUCTURE,
        ));
    }
    let Some(path) = a.weak_path(c, c2) else {
        return Err(Error::precondition(
            "the pair is multiply connected",
            cite::ORDER_VIA_STRUCTURE,
        ));
    };
    if !is_ell_breakable(&path, ell) {
        return Err(Error::precondition(
            format!("the pair is not {ell}-breakable"),
            cite::ORDER_VIA_STRUCTURE,
        ));
    }
    lambda(g, &path, ell)
}

/// One graph `G_i` produced by breaking at `D`.
#[derive(Clone, Debug)]
pub struct BreakPart {
    pub graph: ArithmeticalGraph,
    /// For each vertex of `graph`, its vertex in `G`; `None` for the
    /// vertices of the appended chain.
    pub vertex_map: Vec<Option<usize>>,
    /// Index of the copy of `D` in `graph`.
    pub d_index: usize,
    /// `g_i`: gcd of `r` and the multiplicities of the component.
    pub divisor: BigInt,
    /// Multiplicity `r / g_i` of the copy of `D`.
    pub d_multiplicity: BigInt,
    /// `c_i`: self-intersection of `D` in the part.
    pub self_intersection: BigInt,
    /// `r_hat_i`, when a chain was appended.
    pub r_hat: Option<BigInt>,
    /// Multiplicities of the appended chain, from `D` outwards.
    pub appended: Vec<BigInt>,
}

impl BreakPart {
    /// Index in the part of a vertex of `G`, if it belongs to the part.
    pub fn local_index(&self, v: usize) -> Option<usize> {
        self.vertex_map.iter().position(|&x| x == Some(v))
    }
}

#[derive(Clone, Debug)]
pub struct BreakResult {
    pub d: usize,
    /// Components of `G` minus `D`, as sorted vertex lists of `G`.
    pub components: Vec<Vec<usize>>,
    pub parts: Vec<BreakPart>,
}

impl BreakResult {
    /// Which part a vertex of `G` other than `D` went to.
    pub fn part_of(&self, v: usize) -> Option<usize> {
        self.components.iter().position(|c| c.binary_search(&v).is_ok())
    }
}

/// Splits `G` at a cut vertex `D` into one arithmetical graph per
/// component of `G` minus `D`.
pub fn break_at(g: &ArithmeticalGraph, d: usize) -> Result<BreakResult> {
    let n = g.vertex_count();
    let mut alive = vec![true; n];
    alive[d] = false;
    let components = g.components(&alive, |_, _| true);
    if components.len() < 2 {
        return Err(Error::precondition(
            format!("`{}` is not a cut vertex", g.name(d)),
            cite::BREAKING,
        ));
    }
    let r = g.multiplicity(d);
    let mut parts = Vec::with_capacity(components.len());
    for comp in &components {
        let gi = gcd_all(comp.iter().map(|&v| g.multiplicity(v)).chain(std::iter::once(r)));
        let sigma: BigInt = comp.iter().map(|&v| g.entry(v, d) * g.multiplicity(v)).sum();
        let ci = sigma.div_ceil(r);
        let deficit = &ci * r - &sigma;

        let mut b = GraphBuilder::new();
        let mut vertex_map = Vec::new();
        let d_mult = r / &gi;
        let d_index = b.vertex(g.name(d), d_mult.clone())?;
        vertex_map.push(Some(d));
        let mut local = vec![usize::MAX; n];
        local[d] = d_index;
        for &v in comp {
            local[v] = b.vertex(g.name(v), g.multiplicity(v) / &gi)?;
            vertex_map.push(Some(v));
        }
        for &v in comp {
            for (u, c) in g.neighbors(v) {
                if u == d || (u > v && local[u] != usize::MAX) {
                    b.edge(local[v], local[u], c.clone())?;
                }
            }
        }
        let (r_hat, appended) = if deficit.is_zero() {
            (None, Vec::new())
        } else {
            let rh = &deficit / &gi;
            let chain = euclid_chain(&d_mult, &rh)?;
            let mut prev = d_index;
            for (k, m) in chain.iter().enumerate() {
                let mut name = format!("{}_t{}", g.name(d), k + 1);
                while b.index_of(&name).is_some() {
                    name.push('x');
                }
                let id = b.vertex(name, m.clone())?;
                b.edge(prev, id, 1)?;
                vertex_map.push(None);
                prev = id;
            }
            (Some(rh), chain)
        };
        parts.push(BreakPart {
            graph: b.build()?,
            vertex_map,
            d_index,
            divisor: gi,
            d_multiplicity: d_mult,
            self_intersection: ci,
            r_hat,
            appended,
        });
    }
    Ok(BreakResult {
        d,
        components,
        parts,
    })
}

/// Outcome of comparing `Phi_ell(G)` with the parts of a break.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SplitRecord {
    pub ell: u64,
    /// Sorted exponents of the `ell`-primary cyclic factors of `Phi(G)`.
    pub whole_exponents: Vec<u32>,
    /// The same, collected over all parts.
    pub parts_exponents: Vec<u32>,
    pub elements_checked: usize,
    /// Human-readable descriptions of every mismatch found.
    pub failures: Vec<String>,
}

impl SplitRecord {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the splitting `Phi_ell(G) = prod Phi_ell(G_i)` for a break at `D`
/// with `ell` not dividing `r(D)`:
///
/// * the `ell`-primary factors agree as multisets;
/// * in `Phi(G)`, the `ell`-parts of `E(C, D)` for `C` in component `j`
///   generate a subgroup `H_j` of order `|Phi_ell(G_j)|`, and the `H_j`
///   together have order `|Phi_ell(G)|`;
/// * for sampled elements supported on component `j` and `D` (pairs and
///   random combinations), the `ell`-part lies in `H_j` and has the same
///   order in `G` and in `G_j`.
pub fn split_check(a: &Analysis, d: usize, ell: u64, samples: usize, seed: u64) -> Result<SplitRecord> {
    require_prime(ell)?;
    let g = a.graph();
    if divides(ell, g.multiplicity(d)) {
        return Err(Error::precondition(
            format!("{ell} divides the multiplicity of `{}`", g.name(d)),
            cite::SPLITTING,
        ));
    }
    let broken = break_at(g, d)?;
    let part_groups: Vec<ComponentGroup> = broken.parts.iter().map(|p| ComponentGroup::new(&p.graph)).collect();
    split_check_with(a, &broken, &part_groups, ell, samples, seed)
}

/// [`split_check`] against a precomputed break, so that one break can be
/// reused for several primes.
pub fn split_check_with(
    a: &Analysis,
    broken: &BreakResult,
    part_groups: &[ComponentGroup],
    ell: u64,
    samples: usize,
    seed: u64,
) -> Result<SplitRecord> {
    let g = a.graph();
    let phi = a.group();
    let d = broken.d;
    let mut rec = SplitRecord {
        ell,
        ..Default::default()
    };
    rec.whole_exponents = phi.ell_primary_exponents(ell);
    rec.whole_exponents.sort_unstable();
    rec.parts_exponents = part_groups.iter().flat_map(|p| p.ell_primary_exponents(ell)).collect();
    rec.parts_exponents.sort_unstable();
    if rec.whole_exponents != rec.parts_exponents {
        rec.failures.push(format!(
            "ell-primary exponents differ: G {:?}, parts {:?}",
            rec.whole_exponents, rec.parts_exponents
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all_gens = Vec::new();
    let mut order_product = BigInt::one();
    for (j, (part, pg)) in broken.parts.iter().zip(part_groups).enumerate() {
        let comp = &broken.components[j];
        let gens: Vec<GroupElement> = comp
            .iter()
            .map(|&c| phi.ell_part(&pair_element_or_zero(g, c, d), ell))
            .collect();
        let h_order = phi.subgroup_order(&gens);
        let expected = pg.ell_order(ell);
        if h_order != expected {
            rec.failures.push(format!(
                "component {j}: subgroup from E(C, D) has order {h_order}, part has Phi_ell of order {expected}"
            ));
        }
        order_product *= h_order;

        // candidate vertices: the component and D
        let mut verts = comp.clone();
        verts.push(d);
        let local = |v: usize| part.local_index(v).expect("vertex belongs to the part");
        let check = |whole: GroupElement, piece: GroupElement, what: String, rec: &mut SplitRecord| {
            rec.elements_checked += 1;
            let lp = phi.ell_part(&whole, ell);
            let o1 = phi.element_order(&lp);
            let o2 = pg.ell_part_order(&piece, ell);
            if o1 != o2 {
                rec.failures.push(format!("{what}: ell-part order {o1} in G, {o2} in part {j}"));
            }
            if !phi.in_subgroup(&gens, &lp) {
                rec.failures.push(format!("{what}: ell-part leaves the subgroup of component {j}"));
            }
        };
        for _ in 0..samples {
            let x = verts[rng.gen_range(0..verts.len())];
            let y = verts[rng.gen_range(0..verts.len())];
            if x == y {
                continue;
            }
            let whole = pair_element_or_zero(g, x, y);
            let piece = pair_element_or_zero(&part.graph, local(x), local(y));
            check(whole, piece, format!("E({}, {})", g.name(x), g.name(y)), &mut rec);
        }
        for _ in 0..samples.div_ceil(2) {
            let mut whole = phi.zero();
            let mut piece = pg.zero();
            for &c in comp {
                let k = BigInt::from(rng.gen_range(-3i64..=3));
                if k.is_zero() {
                    continue;
                }
                whole = &whole + &pair_element_or_zero(g, c, d).scale(&k);
                piece = &piece + &pair_element_or_zero(&part.graph, local(c), part.d_index).scale(&k);
            }
            check(whole, piece, "combination of E(C, D)".into(), &mut rec);
        }
        all_gens.extend(gens);
    }
    let whole = phi.ell_order(ell);
    let spanned = phi.subgroup_order(&all_gens);
    if order_product != whole || spanned != whole {
        rec.failures.push(format!(
            "subgroups do not split Phi_ell(G): product {order_product}, span {spanned}, |Phi_ell(G)| = {whole}"
        ));
    }
    Ok(rec)
}

/// Terminal chains at the same node, as needed by the elementary pair
/// formulas.
#[derive(Clone, Copy, Debug)]
pub struct ElementaryPair<'a> {
    pub node: usize,
    pub first: &'a Chain,
    pub second: &'a Chain,
}

impl<'a> ElementaryPair<'a> {
    pub fn new(a: &'a Analysis, node: usize, first: &'a Chain, second: &'a Chain) -> Result<Self> {
        let ok = |c: &Chain| c.is_terminal && c.start_node == Some(node) && c.terminal_vertex().is_some();
        if !ok(first) || !ok(second) {
            return Err(Error::precondition(
                format!("chains are not terminal chains at `{}`", a.graph().name(node)),
                cite::ELEMENTARY_PAIR_ORDER,
            ));
        }
        if first == second {
            return Err(Error::precondition(
                "the two terminal chains coincide",
                cite::ELEMENTARY_PAIR_ORDER,
            ));
        }
        Ok(ElementaryPair { node, first, second })
    }

    /// Terminal vertices `(C_n, C'_n')`.
    pub fn terminals(&self) -> (usize, usize) {
        (
            self.first.terminal_vertex().unwrap(),
            self.second.terminal_vertex().unwrap(),
        )
    }

    /// `m`: gcd of the multiplicities on the component of `D` after
    /// removing the edges of both chains.
    pub fn m(&self, g: &ArithmeticalGraph) -> BigInt {
        let mut removed = Vec::new();
        for ch in [self.first, self.second] {
            for w in ch.vertices.windows(2) {
                removed.push((w[0].min(w[1]), w[0].max(w[1])));
            }
        }
        let reach = g.bfs_distances(&[self.node], |u, v| !removed.contains(&(u.min(v), u.max(v))));
        gcd_all(
            reach
                .iter()
                .enumerate()
                .filter(|(_, d)| d.is_some())
                .map(|(v, _)| g.multiplicity(v)),
        )
    }

    /// `z = Delta r - r_1 - r'_1`, the contribution of the other neighbors
    /// of `D` to its relation.
    pub fn z(&self, g: &ArithmeticalGraph) -> BigInt {
        let r1 = g.multiplicity(self.first.first_vertex().unwrap());
        let r1b = g.multiplicity(self.second.first_vertex().unwrap());
        -g.diagonal(self.node) * g.multiplicity(self.node) - r1 - r1b
    }

    fn terminal_divisibility(&self, g: &ArithmeticalGraph, ell: u64) -> (bool, bool) {
        let (t1, t2) = self.terminals();
        (divides(ell, g.multiplicity(t1)), divides(ell, g.multiplicity(t2)))
    }
}

/// Order of the `ell`-part of `E(C_n, C'_n')` for an elementary pair.
pub fn elementary_pair_order(a: &Analysis, pair: &ElementaryPair<'_>, ell: u64) -> Result<BigInt> {
    require_prime(ell)?;
    let g = a.graph();
    let r = g.multiplicity(pair.node);
    let (t1, t2) = pair.terminals();
    match pair.terminal_divisibility(g, ell) {
        (false, false) => Ok(ell_power(ell, valuation(&(r / pair.m(g)), ell))),
        (true, false) | (false, true) => {
            let l = g.multiplicity(t1).lcm(g.multiplicity(t2));
            Ok(ell_power(ell, valuation(&(r / l), ell)))
        }
        (true, true) => Err(Error::precondition(
            format!("{ell} divides both terminal multiplicities; case not covered"),
            cite::ELEMENTARY_PAIR_ORDER,
        )),
    }
}

/// Predicted `ell`-part of the order of `<tau, tau>` for `tau = E(C_n, C'_n')`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfPairingPrediction {
    pub order: BigInt,
    /// `tau` is predicted not to be `ell`-divisible in `Phi(G)`.
    pub not_divisible: bool,
}

pub fn self_pairing_order(a: &Analysis, pair: &ElementaryPair<'_>, ell: u64) -> Result<SelfPairingPrediction> {
    require_prime(ell)?;
    let g = a.graph();
    let r = g.multiplicity(pair.node);
    let (t1, t2) = pair.terminals();
    let (order, condition) = match pair.terminal_divisibility(g, ell) {
        (false, false) => {
            let z = pair.z(g);
            let vr = valuation(r, ell);
            let vz = valuation(&z, ell);
            let order = ell_power(ell, vr.saturating_sub(vz));
            (order, vz == valuation(&pair.m(g), ell))
        }
        (true, false) | (false, true) => {
            let l = g.multiplicity(t1).lcm(g.multiplicity(t2));
            (ell_power(ell, valuation(&(r / l), ell)), true)
        }
        (true, true) => {
            return Err(Error::precondition(
                format!("{ell} divides both terminal multiplicities; case not covered"),
                cite::SELF_PAIRING_ORDER,
            ))
        }
    };
    // Non-divisibility only has content when the ell-part of tau is
    // nontrivial: the zero class is divisible by every prime.
    let tau_order = elementary_pair_order(a, pair, ell)?;
    Ok(SelfPairingPrediction {
        order,
        not_divisible: condition && !tau_order.is_one(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{euclid_tree, kodaira_star, random_reduced};
    use crate::graph::parse_graph;

    fn int(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn breakability_of_kodaira_stars() {
        let g = kodaira_star(2).unwrap();
        let a = Analysis::new(g);
        let g = a.graph();
        let (l1, l2, l3) = (
            g.index_of("l1").unwrap(),
            g.index_of("l2").unwrap(),
            g.index_of("l3").unwrap(),
        );
        let p = a.weak_path(l1, l3).unwrap();
        assert!(!is_ell_breakable(&p, 2));
        assert!(is_ell_breakable(&p, 3));
        let p = a.weak_path(l1, l2).unwrap();
        assert_eq!(lambda(g, &p, 2).unwrap(), int(2));
        assert_eq!(a.pair_ell_part_order(l1, l2, 2), int(2));
    }

    #[test]
    fn lambda_on_euclid_tree() {
        let a = Analysis::new(euclid_tree(&int(4), &[int(2), int(3), int(3)]).unwrap());
        let g = a.graph();
        let (x, y) = (g.index_of("t2_3").unwrap(), g.index_of("t3_3").unwrap());
        assert_eq!(order_via_structure(&a, x, y, 2).unwrap(), int(2));
        assert_eq!(a.pair_ell_part_order(x, y, 2), int(2));
    }

    #[test]
    fn same_terminal_chain_lambda_is_one() {
        let a = Analysis::new(euclid_tree(&int(4), &[int(2), int(3), int(3)]).unwrap());
        let g = a.graph();
        let (x, y) = (g.index_of("t2_1").unwrap(), g.index_of("t2_3").unwrap());
        let p = a.weak_path(x, y).unwrap();
        assert_eq!(p.node_count(), 0);
        assert_eq!(order_via_structure(&a, x, y, 5), Ok(int(1)));
        assert!(order_via_structure(&a, x, y, 3).is_err());
    }

    #[test]
    fn break_star_of_reduced_legs() {
        let g = parse_graph(
            "vertex d 1\nvertex a 1\nvertex b 1\nvertex c 1\nvertex a2 1\n\
             edge d a\nedge d b\nedge d c\nedge a a2\n",
        )
        .unwrap();
        let br = break_at(&g, 0).unwrap();
        assert_eq!(br.parts.len(), 3);
        for p in &br.parts {
            assert!(p.appended.is_empty());
            p.graph.validate().unwrap();
        }
        assert!(break_at(&g, 4).is_err());
    }

    #[test]
    fn break_kodaira_center() {
        let g = kodaira_star(0).unwrap();
        let br = break_at(&g, 0).unwrap();
        assert_eq!(br.parts.len(), 4);
        for p in &br.parts {
            assert_eq!(p.d_multiplicity, int(2));
            assert_eq!(p.self_intersection, int(1));
            assert_eq!(p.r_hat, Some(int(1)));
            assert_eq!(p.appended, vec![int(1)]);
            p.graph.validate().unwrap();
        }
    }

    #[test]
    fn break_node_six() {
        let g = euclid_tree(&int(6), &[int(1), int(5), int(4), int(2)]).unwrap();
        let a = Analysis::new(g);
        let br = break_at(a.graph(), 0).unwrap();
        assert_eq!(br.parts.len(), 4);
        assert!(br.parts.iter().any(|p| !p.appended.is_empty()));
        for p in &br.parts {
            p.graph.validate().unwrap();
        }
        let rec = split_check(&a, 0, 5, 10, 1).unwrap();
        assert!(rec.passed(), "{:?}", rec.failures);
    }

    #[test]
    fn split_on_random_trees() {
        for seed in 0..10 {
            let a = Analysis::new(random_reduced(10, 0.0, seed).unwrap());
            for d in 0..a.graph().vertex_count() {
                if let Ok(rec) = split_check(&a, d, 2, 5, seed) {
                    assert!(rec.passed(), "{:?}", rec.failures);
                    assert!(rec.whole_exponents.is_empty());
                }
            }
        }
    }

    #[test]
    fn elementary_pairs_on_kodaira() {
        let a = Analysis::new(kodaira_star(0).unwrap());
        let chains = a.terminal_chains_at(0);
        let pair = ElementaryPair::new(&a, 0, chains[0], chains[1]).unwrap();
        assert_eq!(elementary_pair_order(&a, &pair, 2).unwrap(), int(2));
        assert_eq!(pair.z(a.graph()), int(2));
        let pred = self_pairing_order(&a, &pair, 2).unwrap();
        assert_eq!(pred.order, int(1));
        assert!(!pred.not_divisible);
        let (x, y) = pair.terminals();
        assert!(a.pair_pairing((x, y), (x, y)).is_zero());
        assert!(ElementaryPair::new(&a, 0, chains[0], chains[0]).is_err());
    }
}
