//! The group of components `Phi(G) = Ker(tR) / Im(M)` and its pairing.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{ell_power, mod_inverse, valuation};
use crate::error::{Error, Result};
use crate::graph::ArithmeticalGraph;
use crate::topology::WeakPath;
use crate::linalg::{
    dot, smith_normal_form, solve_rational_singular, AbelianGroupStructure, IntegerMatrix,
};

/// An integer vector `T` with `tR T = 0`, standing for its class mod `Im(M)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    rep: Vec<BigInt>,
}

impl GroupElement {
    pub fn zero(n: usize) -> Self {
        GroupElement {
            rep: vec![BigInt::zero(); n],
        }
    }

    pub fn representative(&self) -> &[BigInt] {
        &self.rep
    }

    pub fn into_representative(self) -> Vec<BigInt> {
        self.rep
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        GroupElement {
            rep: self.rep.iter().map(|x| x * k).collect(),
        }
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        self.scale(&BigInt::from(k))
    }

    pub fn is_zero_vector(&self) -> bool {
        self.rep.iter().all(Zero::is_zero)
    }
}

impl Add for &GroupElement {
    type Output = GroupElement;
    fn add(self, o: &GroupElement) -> GroupElement {
        GroupElement {
            rep: self.rep.iter().zip(&o.rep).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &GroupElement {
    type Output = GroupElement;
    fn sub(self, o: &GroupElement) -> GroupElement {
        GroupElement {
            rep: self.rep.iter().zip(&o.rep).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement {
            rep: self.rep.iter().map(|a| -a).collect(),
        }
    }
}

/// An element `a/b` of `Q/Z` with `0 <= a < b` and `gcd(a, b) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalModZ {
    num: BigInt,
    den: BigInt,
}

impl RationalModZ {
    pub fn zero() -> Self {
        RationalModZ {
            num: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    pub fn new(q: &BigRational) -> Self {
        let den = q.denom().clone();
        let num = q.numer().mod_floor(&den);
        // BigRational is already reduced; reducing the numerator mod the
        // denominator keeps gcd(num, den) = 1.
        if num.is_zero() {
            Self::zero()
        } else {
            RationalModZ { num, den }
        }
    }

    pub fn from_ratio(num: BigInt, den: BigInt) -> Self {
        Self::new(&BigRational::new(num, den))
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Order of the element in `Q/Z`.
    pub fn order(&self) -> &BigInt {
        &self.den
    }

    /// Order of the `ell`-primary component.
    pub fn ell_part_order(&self, ell: u64) -> BigInt {
        ell_power(ell, valuation(&self.den, ell))
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), self.den.clone())
    }
}

impl Add for &RationalModZ {
    type Output = RationalModZ;
    fn add(self, o: &RationalModZ) -> RationalModZ {
        RationalModZ::new(&(self.to_rational() + o.to_rational()))
    }
}

impl fmt::Display for RationalModZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Integer pseudo-inverse of `M` read off its Smith form: for `T` in
/// `Ker(tR)`, `S = green * T / den` solves `M S = T`.
#[derive(Clone, Debug)]
struct GreenTable {
    green: IntegerMatrix,
    den: BigInt,
}

/// `Phi(G)` in invariant-factor form with its coordinate map.
#[derive(Debug)]
pub struct ComponentGroup {
    m: IntegerMatrix,
    r: Vec<BigInt>,
    structure: AbelianGroupStructure,
    green: OnceLock<GreenTable>,
    snf: crate::linalg::SnfDecomposition,
}

/// Alias matching the structure's role as the presentation of `Phi(G)`.
pub type PhiStructure = ComponentGroup;

impl ComponentGroup {
    pub fn new(g: &ArithmeticalGraph) -> Self {
        let m = g.intersection_matrix();
        let snf = smith_normal_form(&m);
        debug_assert!(snf.verify(&m));
        let structure = AbelianGroupStructure::from_snf(&snf);
        debug_assert_eq!(structure.free_rank(), 1);
        ComponentGroup {
            m,
            r: g.multiplicities(),
            structure,
            green: OnceLock::new(),
            snf,
        }
    }

    pub fn structure(&self) -> &AbelianGroupStructure {
        &self.structure
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        self.structure.invariant_factors()
    }

    pub fn order(&self) -> BigInt {
        self.structure.torsion_order()
    }

    pub fn is_trivial(&self) -> bool {
        self.structure.is_trivial_torsion()
    }

    /// Exponents `k` of the nontrivial `ell`-primary cyclic factors `Z/ell^k`.
    pub fn ell_primary_exponents(&self, ell: u64) -> Vec<u32> {
        self.structure.ell_primary_factors(ell)
    }

    /// `|Phi_ell(G)|`
    pub fn ell_order(&self, ell: u64) -> BigInt {
        let k: u32 = self.ell_primary_exponents(ell).iter().sum();
        ell_power(ell, k)
    }

    /// Human form, e.g. `Z/2 x Z/2`; the trivial group prints as `0`.
    pub fn describe(&self) -> String {
        describe_factors(self.invariant_factors())
    }

    pub fn dimension(&self) -> usize {
        self.r.len()
    }

    pub fn intersection_matrix(&self) -> &IntegerMatrix {
        &self.m
    }

    /// Wraps a vector after checking `tR T = 0`.
    pub fn element(&self, rep: Vec<BigInt>) -> Result<GroupElement> {
        if rep.len() != self.r.len() {
            return Err(Error::InvalidArgument(format!(
                "vector of length {} for a graph with {} vertices",
                rep.len(),
                self.r.len()
            )));
        }
        if !dot(&self.r, &rep).is_zero() {
            return Err(Error::NotInKernel);
        }
        Ok(GroupElement { rep })
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement::zero(self.r.len())
    }

    /// `E(C, C')`: `r'/gcd(r, r')` at `C`, `-r/gcd(r, r')` at `C'`.
    pub fn pair_element(&self, g: &ArithmeticalGraph, c: usize, c2: usize) -> Result<GroupElement> {
        pair_element(g, c, c2)
    }

    pub fn coordinates(&self, t: &GroupElement) -> Vec<BigInt> {
        self.structure
            .coordinates(&t.rep)
            .expect("kernel vectors are torsion classes")
    }

    pub fn element_order(&self, t: &GroupElement) -> BigInt {
        self.structure.order_of_coordinates(&self.coordinates(t))
    }

    pub fn is_zero(&self, t: &GroupElement) -> bool {
        self.coordinates(t).iter().all(Zero::is_zero)
    }

    pub fn same_class(&self, a: &GroupElement, b: &GroupElement) -> bool {
        self.is_zero(&(a - b))
    }

    /// Projection to the `ell`-Sylow subgroup, as an integer multiple of `t`.
    pub fn ell_part(&self, t: &GroupElement, ell: u64) -> GroupElement {
        let m = self.element_order(t);
        let k = valuation(&m, ell);
        let pk = ell_power(ell, k);
        let q = &m / &pk;
        let coeff = mod_inverse(&q, &pk).expect("cofactor is prime to ell") * q;
        t.scale(&coeff)
    }

    /// Order of the `ell`-part of `t`: `ell^(ord_ell(order t))`.
    pub fn ell_part_order(&self, t: &GroupElement, ell: u64) -> BigInt {
        ell_power(ell, valuation(&self.element_order(t), ell))
    }

    pub fn is_divisible_by(&self, t: &GroupElement, ell: u64) -> bool {
        self.structure
            .is_divisible_by(&t.rep, ell)
            .expect("kernel vectors are torsion classes")
    }

    /// Whether the class of `target` lies in the subgroup generated by `gens`.
    pub fn in_subgroup(&self, gens: &[GroupElement], target: &GroupElement) -> bool {
        let coords: Vec<Vec<BigInt>> = gens.iter().map(|g| self.coordinates(g)).collect();
        self.structure.span_contains(&coords, &self.coordinates(target))
    }

    /// Order of the subgroup generated by `gens`.
    pub fn subgroup_order(&self, gens: &[GroupElement]) -> BigInt {
        let coords: Vec<Vec<BigInt>> = gens.iter().map(|g| self.coordinates(g)).collect();
        self.structure.subgroup_order(&coords)
    }

    /// Representatives of the cyclic generators, one per invariant factor.
    pub fn generators(&self) -> Vec<GroupElement> {
        self.structure
            .generators()
            .iter()
            // torsion classes of Z^v / Im(M) lie in Ker(tR)
            .map(|v| GroupElement { rep: v.clone() })
            .collect()
    }

    /// The pairing by an exact rational solve of `M S = T`.
    ///
    /// Normalized as `-tS T' mod Z`, the sign under which the path-sum
    /// formula holds with positive terms.
    pub fn pairing(&self, t: &GroupElement, t2: &GroupElement) -> RationalModZ {
        let s = solve_rational_singular(&self.m, &t.rep).expect("Ker(tR) lies in the rational image of M");
        let v: BigRational = s
            .iter()
            .zip(&t2.rep)
            .filter(|(_, b)| !b.is_zero())
            .map(|(a, b)| a * BigRational::from_integer(b.clone()))
            .sum();
        RationalModZ::new(&-v)
    }

    fn green(&self) -> &GreenTable {
        self.green.get_or_init(|| {
            let diag = self.snf.diagonal();
            let den = diag
                .iter()
                .filter(|d| !d.is_zero())
                .last()
                .cloned()
                .unwrap_or_else(BigInt::one);
            let n = self.r.len();
            // V * diag(den/d_i) * U, skipping the zero factor
            let mut scaled_u = IntegerMatrix::zeros(n, n);
            for i in 0..n {
                let d = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
                if d.is_zero() {
                    continue;
                }
                let f = &den / &d;
                for j in 0..n {
                    scaled_u[(i, j)] = &self.snf.u[(i, j)] * &f;
                }
            }
            GreenTable {
                green: self.snf.v.mul(&scaled_u),
                den,
            }
        })
    }

    /// The same pairing through the cached Smith pseudo-inverse; agrees
    /// with [`ComponentGroup::pairing`] and is much faster in bulk.
    pub fn pairing_fast(&self, t: &GroupElement, t2: &GroupElement) -> RationalModZ {
        self.pairing_functional(t).apply(t2)
    }

    /// `<t, .>` with the solve for `t` done once.
    pub fn pairing_functional(&self, t: &GroupElement) -> PairingFunctional {
        let gt = self.green();
        PairingFunctional {
            s: gt.green.mul_vec(&t.rep),
            den: gt.den.clone(),
        }
    }

    /// Whether `x -> <x, .>` is injective on `Phi(G)`, tested on the
    /// cyclic generators.
    pub fn pairing_is_nondegenerate(&self) -> bool {
        let gens = self.generators();
        let d = self.invariant_factors();
        let k = gens.len();
        if k == 0 {
            return true;
        }
        // Q_ij = d_j <g_i, g_j>, an integer mod d_j; injectivity of
        // x -> (sum_i x_i Q_ij mod d_j)_j is surjectivity of [tQ | diag d].
        let mut lattice = IntegerMatrix::zeros(k, 2 * k);
        for i in 0..k {
            for j in 0..k {
                let p = self.pairing_fast(&gens[i], &gens[j]);
                let q = BigRational::from_integer(d[j].clone()) * p.to_rational();
                assert!(q.is_integer(), "pairing value exceeds generator order");
                lattice[(j, i)] = q.to_integer();
            }
            lattice[(i, k + i)] = d[i].clone();
        }
        smith_normal_form(&lattice)
            .diagonal()
            .iter()
            .all(|x| x.is_one())
    }

    /// Elements `σ` (given as generator coefficient vectors) with
    /// `<σ, g> = 0` for every generator `g`; computed by brute force and
    /// meant for small groups in tests.
    pub fn annihilator_size_bruteforce(&self, limit: u64) -> Option<u64> {
        let gens = self.generators();
        let d: Vec<u64> = self
            .invariant_factors()
            .iter()
            .map(|x| x.try_into().ok())
            .collect::<Option<_>>()?;
        let total: u64 = d.iter().product();
        if total > limit {
            return None;
        }
        let pairings: Vec<Vec<RationalModZ>> = gens
            .iter()
            .map(|a| gens.iter().map(|b| self.pairing_fast(a, b)).collect())
            .collect();
        let mut count = 0;
        for idx in 0..total {
            let mut rest = idx;
            let coeffs: Vec<u64> = d
                .iter()
                .map(|&di| {
                    let c = rest % di;
                    rest /= di;
                    c
                })
                .collect();
            let kills_all = (0..gens.len()).all(|j| {
                let mut acc = BigRational::zero();
                for (i, &c) in coeffs.iter().enumerate() {
                    acc += pairings[i][j].to_rational() * BigRational::from_integer(c.into());
                }
                acc.is_integer()
            });
            if kills_all {
                count += 1;
            }
        }
        Some(count)
    }
}

pub fn describe_factors(factors: &[BigInt]) -> String {
    if factors.is_empty() {
        return "0".to_string();
    }
    factors
        .iter()
        .map(|d| format!("Z/{d}"))
        .collect::<Vec<_>>()
        .join(" x ")
}

/// `E(C, C')` for distinct vertices.
pub fn pair_element(g: &ArithmeticalGraph, c: usize, c2: usize) -> Result<GroupElement> {
    if c == c2 {
        return Err(Error::TrivialPair(g.name(c).to_string()));
    }
    let (r, r2) = (g.multiplicity(c), g.multiplicity(c2));
    let d = r.gcd(r2);
    let mut rep = vec![BigInt::zero(); g.vertex_count()];
    rep[c] = r2 / &d;
    rep[c2] = -(r / &d);
    Ok(GroupElement { rep })
}

/// `E(C, C')`, or zero when `C = C'`.
pub fn pair_element_or_zero(g: &ArithmeticalGraph, c: usize, c2: usize) -> GroupElement {
    if c == c2 {
        GroupElement::zero(g.vertex_count())
    } else {
        pair_element(g, c, c2).expect("distinct vertices")
    }
}

/// The map `t2 -> <t, t2>` for a fixed `t`.
#[derive(Clone, Debug)]
pub struct PairingFunctional {
    s: Vec<BigInt>,
    den: BigInt,
}

impl PairingFunctional {
    pub fn apply(&self, t2: &GroupElement) -> RationalModZ {
        let v: BigInt = self
            .s
            .iter()
            .zip(&t2.rep)
            .filter(|(_, b)| !b.is_zero())
            .map(|(a, b)| a * b)
            .sum();
        RationalModZ::from_ratio(-v, self.den.clone())
    }
}

/// The path-sum formula for `<E(C, C'), E(D, D')>` along the bridge path
/// of `(C, C')`: with `P_a`, `P_b` the path vertices onto which `D`, `D'`
/// project, the value is `lcm(r, r') lcm(s, s') sum_{a <= k < b}
/// 1/(r_k r_{k+1})`, read with a sign when `b < a`.
pub fn pairing_closed_form(g: &ArithmeticalGraph, path: &WeakPath, d: usize, d2: usize) -> RationalModZ {
    PathPairing::new(g, path).value(g, d, d2)
}

/// The path-sum formula with projections and prefix sums computed once, for
/// evaluating many `(D, D')` against one `E(C, C')`.
#[derive(Clone, Debug)]
pub struct PathPairing {
    projections: Vec<usize>,
    prefix: Vec<BigRational>,
    lcm_ends: BigInt,
}

impl PathPairing {
    pub fn new(g: &ArithmeticalGraph, path: &WeakPath) -> Self {
        let mut prefix = vec![BigRational::zero()];
        for w in path.vertices.windows(2) {
            let step = BigRational::new(BigInt::one(), g.multiplicity(w[0]) * g.multiplicity(w[1]));
            let next = prefix.last().unwrap() + step;
            prefix.push(next);
        }
        let (c, c2) = (path.vertices[0], *path.vertices.last().unwrap());
        PathPairing {
            projections: path.projections(g),
            prefix,
            lcm_ends: g.multiplicity(c).lcm(g.multiplicity(c2)),
        }
    }

    pub fn value(&self, g: &ArithmeticalGraph, d: usize, d2: usize) -> RationalModZ {
        if d == d2 || self.prefix.len() < 2 {
            return RationalModZ::zero();
        }
        let (alpha, beta) = (self.projections[d], self.projections[d2]);
        if alpha == beta {
            return RationalModZ::zero();
        }
        let l2 = g.multiplicity(d).lcm(g.multiplicity(d2));
        let value = BigRational::from_integer(&self.lcm_ends * l2) * (&self.prefix[beta] - &self.prefix[alpha]);
        RationalModZ::new(&value)
    }
}
