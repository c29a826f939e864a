//! Generators for the graph families used in tests and on the command line.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{gcd_all, is_prime};
use crate::error::GraphError;
use crate::graph::{ArithmeticalGraph, GraphBuilder};

/// Multiplicities of the chain hanging off a vertex of multiplicity `a`
/// whose first vertex has multiplicity `b`: `x_0 = a`, `x_1 = b`,
/// `x_{k+1} = (-x_{k-1}) mod x_k`, stopping before the first zero.
///
/// The last entry is `gcd(a, b)`. Attaching the chain to a vertex of
/// multiplicity `a` satisfies `MR = 0` along the chain.
pub fn euclid_chain(a: &BigInt, b: &BigInt) -> Result<Vec<BigInt>, GraphError> {
    if !a.is_positive() || !b.is_positive() {
        return Err(GraphError::Family(format!(
            "euclid chain needs positive inputs, got ({a}, {b})"
        )));
    }
    let mut out = vec![b.clone()];
    let (mut prev, mut cur) = (a.clone(), b.clone());
    loop {
        let next = (-&prev).mod_floor(&cur);
        if next.is_zero() {
            return Ok(out);
        }
        out.push(next.clone());
        prev = std::mem::replace(&mut cur, next);
    }
}

/// A family descriptor, as accepted by `gen`.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilySpec {
    Cycle(usize),
    KodairaStar(usize),
    EuclidTree { node: BigInt, firsts: Vec<BigInt> },
    Lorenzini76 { ell: u64, a: u32, b: u32 },
    RandomReduced { n: usize, density: f64, seed: u64 },
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Cycle(n) => write!(f, "cycle({n})"),
            FamilySpec::KodairaStar(n) => write!(f, "kodaira_star({n})"),
            FamilySpec::EuclidTree { node, firsts } => {
                let list: Vec<String> = firsts.iter().map(ToString::to_string).collect();
                write!(f, "euclid_tree({node}, [{}])", list.join(","))
            }
            FamilySpec::Lorenzini76 { ell, a, b } => write!(f, "lorenzini76({ell}, {a}, {b})"),
            FamilySpec::RandomReduced { n, density, seed } => {
                write!(f, "random_reduced({n}, {density}, {seed})")
            }
        }
    }
}

fn family_err(msg: impl Into<String>) -> GraphError {
    GraphError::Family(msg.into())
}

fn parse_arg<T: std::str::FromStr>(family: &str, what: &str, s: &str) -> Result<T, GraphError> {
    s.parse()
        .map_err(|_| family_err(format!("{family}: cannot read {what} from `{s}`")))
}

impl FamilySpec {
    /// Reads a descriptor from a family name and its positional arguments.
    /// List arguments may be comma separated or given as separate words.
    pub fn from_args(family: &str, args: &[String], seed: Option<u64>) -> Result<Self, GraphError> {
        let want = |n: usize| -> Result<(), GraphError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(family_err(format!(
                    "{family} takes {n} argument(s), got {}",
                    args.len()
                )))
            }
        };
        match family {
            "cycle" => {
                want(1)?;
                Ok(FamilySpec::Cycle(parse_arg(family, "length", &args[0])?))
            }
            "kodaira_star" => {
                want(1)?;
                Ok(FamilySpec::KodairaStar(parse_arg(family, "nu", &args[0])?))
            }
            "euclid_tree" => {
                if args.len() < 2 {
                    return Err(family_err("euclid_tree takes a node multiplicity and a list"));
                }
                let node = parse_arg(family, "node multiplicity", &args[0])?;
                let firsts = args[1..]
                    .iter()
                    .flat_map(|a| a.split(','))
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_arg(family, "chain multiplicity", s))
                    .collect::<Result<_, _>>()?;
                Ok(FamilySpec::EuclidTree { node, firsts })
            }
            "lorenzini76" => {
                want(3)?;
                Ok(FamilySpec::Lorenzini76 {
                    ell: parse_arg(family, "ell", &args[0])?,
                    a: parse_arg(family, "a", &args[1])?,
                    b: parse_arg(family, "b", &args[2])?,
                })
            }
            "random_reduced" => {
                want(2)?;
                Ok(FamilySpec::RandomReduced {
                    n: parse_arg(family, "vertex count", &args[0])?,
                    density: parse_arg(family, "density", &args[1])?,
                    seed: seed.unwrap_or(0),
                })
            }
            other => Err(family_err(format!("unknown family `{other}`"))),
        }
    }

    pub fn generate(&self) -> Result<ArithmeticalGraph, GraphError> {
        match self {
            FamilySpec::Cycle(n) => cycle(*n),
            FamilySpec::KodairaStar(n) => kodaira_star(*n),
            FamilySpec::EuclidTree { node, firsts } => euclid_tree(node, firsts),
            FamilySpec::Lorenzini76 { ell, a, b } => lorenzini76(*ell, *a, *b),
            FamilySpec::RandomReduced { n, density, seed } => random_reduced(*n, *density, *seed),
        }
    }
}

pub fn gen_family(spec: &FamilySpec) -> Result<ArithmeticalGraph, GraphError> {
    spec.generate()
}

/// `nu` vertices of multiplicity 1 in a ring; `cycle(2)` is a double edge.
pub fn cycle(nu: usize) -> Result<ArithmeticalGraph, GraphError> {
    if nu < 2 {
        return Err(family_err("cycle needs at least 2 vertices"));
    }
    let mut b = GraphBuilder::new();
    for i in 0..nu {
        b.vertex(format!("c{i}"), 1)?;
    }
    if nu == 2 {
        b.edge(0, 1, 2)?;
    } else {
        for i in 0..nu {
            b.edge(i, (i + 1) % nu, 1)?;
        }
    }
    b.build()
}

/// Kodaira type I_nu^*: a chain `x0 .. x_nu` of multiplicity 2 with leaves
/// `l1`, `l2` at `x0` and `l3`, `l4` at `x_nu`.
pub fn kodaira_star(nu: usize) -> Result<ArithmeticalGraph, GraphError> {
    let mut b = GraphBuilder::new();
    let xs: Vec<usize> = (0..=nu)
        .map(|i| b.vertex(format!("x{i}"), 2))
        .collect::<Result<_, _>>()?;
    for w in xs.windows(2) {
        b.edge(w[0], w[1], 1)?;
    }
    for (k, at) in [(1, xs[0]), (2, xs[0]), (3, xs[nu]), (4, xs[nu])] {
        let leaf = b.vertex(format!("l{k}"), 1)?;
        b.edge(at, leaf, 1)?;
    }
    b.build()
}

/// Attaches `euclid_chain(r(at), first)` to `at`, naming the new vertices
/// `{prefix}1, {prefix}2, ...`. Returns the new vertex ids.
pub fn attach_euclid_chain(
    b: &mut GraphBuilder,
    at: usize,
    at_multiplicity: &BigInt,
    first: &BigInt,
    prefix: &str,
) -> Result<Vec<usize>, GraphError> {
    let chain = euclid_chain(at_multiplicity, first)?;
    let mut prev = at;
    let mut ids = Vec::with_capacity(chain.len());
    for (k, m) in chain.into_iter().enumerate() {
        let id = b.vertex(format!("{prefix}{}", k + 1), m)?;
        b.edge(prev, id, 1)?;
        ids.push(id);
        prev = id;
    }
    Ok(ids)
}

/// A node `n` of multiplicity `r` with one Euclid chain per entry of
/// `firsts`; chain `i` has vertices `t{i}_1, t{i}_2, ...`.
pub fn euclid_tree(r: &BigInt, firsts: &[BigInt]) -> Result<ArithmeticalGraph, GraphError> {
    if !r.is_positive() || firsts.iter().any(|x| !x.is_positive()) {
        return Err(family_err("euclid_tree multiplicities must be positive"));
    }
    if firsts.is_empty() {
        return Err(family_err("euclid_tree needs at least one chain"));
    }
    let total: BigInt = firsts.iter().sum();
    if !total.is_multiple_of(r) {
        return Err(family_err(format!(
            "node multiplicity {r} does not divide {total}"
        )));
    }
    let g = gcd_all(firsts.iter().chain(std::iter::once(r)));
    if !g.is_one() {
        return Err(family_err(format!("multiplicities share the factor {g}")));
    }
    let mut b = GraphBuilder::new();
    let node = b.vertex("n", r.clone())?;
    for (i, first) in firsts.iter().enumerate() {
        attach_euclid_chain(&mut b, node, r, first, &format!("t{}_", i + 1))?;
    }
    b.build()
}

/// Two nodes `Cr` (multiplicity `ell^a`) and `Cs` (multiplicity
/// `ell^(a+b)`) joined through one vertex `t1` of multiplicity
/// `ell^a (ell^b + 1)`.
///
/// `Cr` carries terminal chains ending at `B` (first multiplicity 1) and at
/// `A` (first multiplicity `ell^a - 1`); `Cs` carries chains ending at `C`
/// (first multiplicity 1) and `D` (first multiplicity
/// `ell^(a+b) - ell^a - 1`). Every terminal vertex has multiplicity 1, so
/// both first multiplicities at each node are prime to `ell`.
pub fn lorenzini76(ell: u64, a: u32, b: u32) -> Result<ArithmeticalGraph, GraphError> {
    if !is_prime(ell) {
        return Err(family_err(format!("lorenzini76: {ell} is not prime")));
    }
    if a == 0 || b == 0 {
        return Err(family_err("lorenzini76 needs a >= 1 and b >= 1"));
    }
    let l = BigInt::from(ell);
    let r: BigInt = Pow::pow(&l, a);
    let s: BigInt = Pow::pow(&l, a + b);
    let mut g = GraphBuilder::new();
    let cr = g.vertex("Cr", r.clone())?;
    let cs = g.vertex("Cs", s.clone())?;
    let t1 = g.vertex("t1", &r + &s)?;
    g.edge(cr, t1, 1)?;
    g.edge(t1, cs, 1)?;

    let terminal = |g: &mut GraphBuilder,
                        at: usize,
                        mult: &BigInt,
                        first: BigInt,
                        prefix: &str,
                        name: &str|
     -> Result<(), GraphError> {
        let chain = euclid_chain(mult, &first)?;
        let mut prev = at;
        let last = chain.len() - 1;
        for (k, m) in chain.into_iter().enumerate() {
            let label = if k == last {
                name.to_string()
            } else {
                format!("{prefix}{}", k + 1)
            };
            let id = g.vertex(label, m)?;
            g.edge(prev, id, 1)?;
            prev = id;
        }
        Ok(())
    };
    terminal(&mut g, cr, &r, BigInt::one(), "b", "B")?;
    terminal(&mut g, cr, &r, &r - 1, "a", "A")?;
    terminal(&mut g, cs, &s, BigInt::one(), "c", "C")?;
    terminal(&mut g, cs, &s, &s - &r - 1, "d", "D")?;
    g.build()
}

/// `n` vertices of multiplicity 1: a random recursive spanning tree, then
/// one extra edge for each vertex pair independently with probability
/// `density` (extra edges on tree pairs create multi-edges).
pub fn random_reduced(n: usize, density: f64, seed: u64) -> Result<ArithmeticalGraph, GraphError> {
    if n == 0 {
        return Err(family_err("random_reduced needs at least one vertex"));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(family_err(format!("density {density} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.vertex(format!("v{i}"), 1)?;
    }
    for i in 1..n {
        let j = rng.gen_range(0..i);
        b.edge(i, j, 1)?;
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                b.edge(i, j, 1)?;
            }
        }
    }
    b.build()
}

/// Glues `x` in `g1` to `y` in `g2`, scaling each side so the identified
/// vertex gets multiplicity `lcm(r(x), r(y))`. Names from `g2` that clash
/// with `g1` get a `_w` suffix.
pub fn wedge(
    g1: &ArithmeticalGraph,
    x: usize,
    g2: &ArithmeticalGraph,
    y: usize,
) -> Result<ArithmeticalGraph, GraphError> {
    let (a, c) = (g1.multiplicity(x), g2.multiplicity(y));
    let g = a.gcd(c);
    let (s1, s2) = (c / &g, a / &g);
    let mut b = GraphBuilder::new();
    for v in g1.vertices() {
        b.vertex(v.name.clone(), &v.multiplicity * &s1)?;
    }
    let mut map = vec![0usize; g2.vertex_count()];
    for (j, v) in g2.vertices().iter().enumerate() {
        if j == y {
            map[j] = x;
            continue;
        }
        let mut name = v.name.clone();
        while b.index_of(&name).is_some() || (g2.index_of(&name).is_some() && name != v.name) {
            name.push_str("_w");
        }
        map[j] = b.vertex(name, &v.multiplicity * &s2)?;
    }
    for (i, j, c) in g1.edges() {
        b.edge(i, j, c.clone())?;
    }
    for (i, j, c) in g2.edges() {
        b.edge(map[i], map[j], c.clone())?;
    }
    b.build()
}

/// Named graph in a test corpus.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub label: String,
    pub graph: ArithmeticalGraph,
}

/// A deterministic mixed corpus: cycles, Kodaira stars, Euclid trees,
/// `lorenzini76` instances, random reduced graphs and wedges of these.
/// Every graph has at most `max_vertices` vertices.
pub fn standard_corpus(count: usize, max_vertices: usize, seed: u64) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<CorpusEntry> = Vec::with_capacity(count);
    let push = |out: &mut Vec<CorpusEntry>, label: String, g: ArithmeticalGraph| {
        if g.vertex_count() <= max_vertices && out.len() < count {
            out.push(CorpusEntry { label, graph: g });
        }
    };
    for nu in 2..=10 {
        push(&mut out, format!("cycle({nu})"), cycle(nu).unwrap());
    }
    for nu in 0..=6 {
        push(&mut out, format!("kodaira_star({nu})"), kodaira_star(nu).unwrap());
    }
    for (ell, a, b) in [(2, 1, 1), (2, 1, 2), (2, 2, 1), (3, 1, 1), (5, 1, 1)] {
        push(
            &mut out,
            format!("lorenzini76({ell},{a},{b})"),
            lorenzini76(ell, a, b).unwrap(),
        );
    }

    let mut bases: Vec<(String, ArithmeticalGraph)> = out
        .iter()
        .map(|e| (e.label.clone(), e.graph.clone()))
        .collect();
    let mut round = 0u64;
    while out.len() < count {
        round += 1;
        let pick = rng.gen_range(0..10);
        let made = match pick {
            0..=2 => random_euclid_tree(&mut rng).map(|(s, g)| (s.to_string(), g)),
            3..=4 => {
                let n = rng.gen_range(2..=14);
                let density = [0.0, 0.05, 0.15, 0.3][rng.gen_range(0..4)];
                let s = rng.gen::<u64>();
                random_reduced(n, density, s)
                    .ok()
                    .map(|g| (format!("random_reduced({n},{density},{s})"), g))
            }
            _ => {
                let i = rng.gen_range(0..bases.len());
                let j = rng.gen_range(0..bases.len());
                let (l1, g1) = &bases[i];
                let (l2, g2) = &bases[j];
                let x = rng.gen_range(0..g1.vertex_count());
                let y = rng.gen_range(0..g2.vertex_count());
                wedge(g1, x, g2, y).ok().map(|g| (format!("wedge({l1}@{x},{l2}@{y})"), g))
            }
        };
        if let Some((label, g)) = made {
            let small = g.vertex_count() <= max_vertices.min(24)
                && g.multiplicities().iter().all(|m| m.to_u64().is_some_and(|v| v < 1 << 20));
            if small && pick <= 4 {
                bases.push((format!("b{round}"), g.clone()));
            }
            push(&mut out, label, g);
        }
    }
    out
}

/// A random valid Euclid tree descriptor with a small node multiplicity.
pub fn random_euclid_tree(rng: &mut impl Rng) -> Option<(FamilySpec, ArithmeticalGraph)> {
    for _ in 0..50 {
        let r: u64 = rng.gen_range(2..=12);
        let k = rng.gen_range(2..=5);
        let mut firsts: Vec<u64> = (0..k - 1).map(|_| rng.gen_range(1..r.max(2) + 1)).collect();
        let s: u64 = firsts.iter().sum();
        let last = (r - s % r) % r;
        firsts.push(if last == 0 { r } else { last });
        let spec = FamilySpec::EuclidTree {
            node: BigInt::from(r),
            firsts: firsts.iter().map(|&x| BigInt::from(x)).collect(),
        };
        if let Ok(g) = spec.generate() {
            return Some((spec, g));
        }
    }
    None
}
