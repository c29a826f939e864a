//! Graph-level verdicts on membership of `E(C_P, C_Q)` in the kernel `Psi`
//! of the component map to a field of semistable reduction, the base
//! change bookkeeping behind them, and the candidate element `tau`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::analysis::Analysis;
use crate::arith::{ell_power, is_prime, require_prime, valuation};
use crate::breaking::{is_ell_breakable, lambda};
use crate::chains::Chain;
use crate::citation as cite;
use crate::error::{Error, GraphError, Result};
use crate::families::lorenzini76;
use crate::graph::ArithmeticalGraph;
use crate::group::GroupElement;
use crate::topology::WeakPath;

/// `max ord_ell(r)` over the vertices of the bridge path.
pub fn mu_exponent(g: &ArithmeticalGraph, path: &WeakPath, ell: u64) -> u32 {
    path.vertices
        .iter()
        .map(|&v| valuation(g.multiplicity(v), ell))
        .max()
        .unwrap_or(0)
}

/// Multiplicity after a tame extension of degree `ell^d`:
/// `r ell^(-min(d, ord_ell(r)))`.
pub fn base_change_multiplicity(r: &BigInt, ell: u64, d: u32) -> BigInt {
    r / ell_power(ell, d.min(valuation(r, ell)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseChangeProfile {
    pub ell: u64,
    pub degree_exponent: u32,
    /// New multiplicity of each path vertex, in path order.
    pub multiplicities: Vec<BigInt>,
}

impl BaseChangeProfile {
    pub fn new(g: &ArithmeticalGraph, path: &WeakPath, ell: u64, d: u32) -> Self {
        BaseChangeProfile {
            ell,
            degree_exponent: d,
            multiplicities: path
                .vertices
                .iter()
                .map(|&v| base_change_multiplicity(g.multiplicity(v), ell, d))
                .collect(),
        }
    }

    pub fn is_ell_free(&self) -> bool {
        let l = BigInt::from(self.ell);
        self.multiplicities.iter().all(|m| !m.is_multiple_of(&l))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Conjecture {
    /// Weakly connected, not `ell`-breakable, `ell` prime to `r r'`.
    NotBreakable,
    /// Multiply connected with `gcd(ell, r r') = 1` but not `r = r' = 1`:
    /// only the suggested extension of the conjecture covers this case.
    MultiplyConnectedExtended,
}

impl Conjecture {
    pub fn tag(self) -> &'static str {
        match self {
            Conjecture::NotBreakable => cite::CONJ_NOT_BREAKABLE,
            Conjecture::MultiplyConnectedExtended => cite::CONJ_MULTIPLY_CONNECTED,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    TrivialImage,
    /// In `Psi`, with `ell`-part of order `lambda`.
    InPsi(BigInt),
    NotInPsi,
    ConjecturalNotInPsi(Conjecture),
    Unknown(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiVerdict {
    pub verdict: Verdict,
    pub justification: &'static str,
}

impl PsiVerdict {
    pub fn tag(&self) -> &'static str {
        match self.verdict {
            Verdict::TrivialImage => "TrivialImage",
            Verdict::InPsi(_) => "InPsi",
            Verdict::NotInPsi => "NotInPsi",
            Verdict::ConjecturalNotInPsi(_) => "ConjecturalNotInPsi",
            Verdict::Unknown(_) => "Unknown",
        }
    }

    pub fn order(&self) -> Option<&BigInt> {
        match &self.verdict {
            Verdict::InPsi(o) => Some(o),
            _ => None,
        }
    }

    /// Backed by a theorem rather than a conjecture or nothing.
    pub fn is_proven(&self) -> bool {
        matches!(
            self.verdict,
            Verdict::TrivialImage | Verdict::InPsi(_) | Verdict::NotInPsi
        )
    }
}

fn check_vertex(g: &ArithmeticalGraph, v: usize) -> Result<()> {
    if v < g.vertex_count() {
        Ok(())
    } else {
        Err(GraphError::UnknownVertex(v.to_string()).into())
    }
}

/// Decides membership of the `ell`-part of `E(C_P, C_Q)` in `Psi` as far as
/// proven results (and, marked as such, conjectures) allow. `p` is the
/// residue characteristic, 0 or a prime.
pub fn psi_classify(a: &Analysis, cp: usize, cq: usize, ell: u64, p: u64) -> Result<PsiVerdict> {
    let g = a.graph();
    check_vertex(g, cp)?;
    check_vertex(g, cq)?;
    require_prime(ell)?;
    if p != 0 && !is_prime(p) {
        return Err(Error::InvalidArgument(format!(
            "residue characteristic must be 0 or prime, got {p}"
        )));
    }
    let verdict = |verdict, justification| Ok(PsiVerdict { verdict, justification });
    if cp == cq {
        return verdict(Verdict::TrivialImage, cite::TRIVIAL_PAIR);
    }
    if ell == p {
        return verdict(
            Verdict::Unknown("ell equals the residue characteristic".into()),
            cite::RESIDUE_CHARACTERISTIC,
        );
    }
    let l = BigInt::from(ell);
    let (r, r2) = (g.multiplicity(cp), g.multiplicity(cq));
    let prime_to = !(r * r2).is_multiple_of(&l);
    let reduced = r.is_one() && r2.is_one();
    match a.weak_path(cp, cq) {
        Some(path) => {
            let breakable = is_ell_breakable(&path, ell);
            if breakable && prime_to {
                verdict(Verdict::InPsi(lambda(g, &path, ell)?), cite::IN_PSI)
            } else if !breakable && reduced {
                verdict(Verdict::NotInPsi, cite::NOT_BREAKABLE)
            } else if !breakable && prime_to {
                verdict(
                    Verdict::ConjecturalNotInPsi(Conjecture::NotBreakable),
                    cite::CONJ_NOT_BREAKABLE,
                )
            } else {
                verdict(
                    Verdict::Unknown(format!("{ell} divides r r'")),
                    cite::IN_PSI,
                )
            }
        }
        None => {
            if reduced {
                verdict(Verdict::NotInPsi, cite::MULTIPLY_CONNECTED)
            } else if prime_to {
                verdict(
                    Verdict::ConjecturalNotInPsi(Conjecture::MultiplyConnectedExtended),
                    cite::CONJ_MULTIPLY_CONNECTED,
                )
            } else {
                verdict(
                    Verdict::Unknown(format!("multiply connected and {ell} divides r r'")),
                    cite::CONJ_MULTIPLY_CONNECTED,
                )
            }
        }
    }
}

/// `tau = sum_{i<s} r_i tau_i` at a node `D`, with `tau_i = E(C_i, C_s)`
/// for the terminal vertices `C_i` of the terminal chains `T_i`.
#[derive(Clone, Debug)]
pub struct ThetaCandidate {
    pub node: usize,
    pub chains: Vec<Chain>,
    /// `r_i`: multiplicity of the vertex of `T_i` adjacent to `D`.
    pub first_multiplicities: Vec<BigInt>,
    pub terminals: Vec<usize>,
    /// `tau_1 .. tau_{s-1}`.
    pub taus: Vec<GroupElement>,
    pub tau: GroupElement,
}

impl ThetaCandidate {
    pub fn s(&self) -> usize {
        self.chains.len()
    }

    pub fn first_sum(&self) -> BigInt {
        self.first_multiplicities.iter().sum()
    }
}

/// Builds `tau` at `d`. `ordering`, if given, is a permutation of the
/// terminal chains at `d` (as listed by [`Analysis::terminal_chains_at`]);
/// the last chain plays the role of `T_s`.
pub fn theta_candidate(a: &Analysis, d: usize, ordering: Option<&[usize]>) -> Result<ThetaCandidate> {
    let g = a.graph();
    check_vertex(g, d)?;
    let fail = |h: String| Err(Error::precondition(h, cite::THETA_CANDIDATE));
    if !a.topology().is_node(d) {
        return fail(format!("`{}` is not a node", g.name(d)));
    }
    for (u, c) in g.neighbors(d) {
        if !c.is_one() {
            return fail(format!("edge between `{}` and `{}` is not simple", g.name(d), g.name(u)));
        }
    }
    let found = a.terminal_chains_at(d);
    let chains: Vec<Chain> = match ordering {
        None => found.into_iter().cloned().collect(),
        Some(order) => {
            let mut seen = vec![false; found.len()];
            let mut out = Vec::with_capacity(order.len());
            for &k in order {
                if k >= found.len() || seen[k] {
                    return Err(Error::InvalidArgument(format!(
                        "ordering must be a permutation of 0..{}",
                        found.len()
                    )));
                }
                seen[k] = true;
                out.push(found[k].clone());
            }
            if out.len() != found.len() {
                return Err(Error::InvalidArgument(format!(
                    "ordering must list all {} terminal chains",
                    found.len()
                )));
            }
            out
        }
    };
    if chains.len() < 2 {
        return fail(format!(
            "`{}` carries {} terminal chain(s), need at least 2",
            g.name(d),
            chains.len()
        ));
    }
    let r = g.multiplicity(d);
    let mut firsts = Vec::with_capacity(chains.len());
    let mut terminals = Vec::with_capacity(chains.len());
    for ch in &chains {
        let first = ch.first_vertex().expect("terminal chains have interior vertices");
        let ri = g.multiplicity(first);
        if !ri.gcd(r).is_one() {
            return fail(format!(
                "gcd(r, r_i) = {} for the chain through `{}`",
                ri.gcd(r),
                g.name(first)
            ));
        }
        let t = ch.terminal_vertex().expect("terminal chain");
        if !g.multiplicity(t).is_one() {
            return fail(format!("terminal vertex `{}` has multiplicity {}", g.name(t), g.multiplicity(t)));
        }
        firsts.push(ri.clone());
        terminals.push(t);
    }
    let cs = *terminals.last().unwrap();
    let taus: Vec<GroupElement> = terminals[..terminals.len() - 1].iter().map(|&ci| a.pair(ci, cs)).collect();
    let mut tau = a.group().zero();
    for (t, ri) in taus.iter().zip(&firsts) {
        tau = &tau + &t.scale(ri);
    }
    Ok(ThetaCandidate {
        node: d,
        chains,
        first_multiplicities: firsts,
        terminals,
        taus,
        tau,
    })
}

/// Whether `<tau, tau_k>` has trivial `ell`-part for every `k < s`. Refuses
/// unless `ord_ell(r) <= ord_ell(sum r_i)`.
pub fn theta_orthogonality_check(a: &Analysis, cand: &ThetaCandidate, ell: u64) -> Result<bool> {
    require_prime(ell)?;
    let r = a.graph().multiplicity(cand.node);
    let sum = cand.first_sum();
    if valuation(r, ell) > valuation(&sum, ell) {
        return Err(Error::precondition(
            format!("ord_{ell}(r) > ord_{ell}(sum r_i) = ord_{ell}({sum})"),
            cite::THETA_ORTHOGONALITY,
        ));
    }
    let phi = a.group();
    Ok(cand
        .taus
        .iter()
        .all(|t| phi.pairing(&cand.tau, t).ell_part_order(ell).is_one()))
}

/// Oracle checks on the family with nodes of multiplicity `ell^a` and
/// `ell^(a+b)`.
#[derive(Clone, Debug)]
pub struct TwoNodeFamilyAudit {
    pub ell: u64,
    pub a: u32,
    pub b: u32,
    pub graph: ArithmeticalGraph,
    pub phi_ell_exponents: Vec<u32>,
    /// `ell`-part order of `E(B, C)`.
    pub order_bc: BigInt,
    pub order_ab: BigInt,
    pub order_cd: BigInt,
    /// `s` with `ell^(a+b) E(B, C) = s E(Cr, Cs)`, if `s = +-1` works.
    pub relation_sign: Option<i8>,
    pub verdict_cd: PsiVerdict,
    pub verdict_ab: PsiVerdict,
    pub verdict_crcs: PsiVerdict,
    /// The `ell`-part of `E(A, B)` is `ell` times an element of the
    /// subgroup generated by the `ell`-part of `E(C, D)`.
    pub ab_divisible_in_psi: bool,
    /// The `ell`-part of `E(Cr, Cs)` lies in that subgroup.
    pub crcs_in_psi: bool,
    pub failures: Vec<String>,
}

impl TwoNodeFamilyAudit {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn lorenzini_family_audit(ell: u64, a: u32, b: u32) -> Result<TwoNodeFamilyAudit> {
    let az = Analysis::new(lorenzini76(ell, a, b)?);
    let g = az.graph();
    let phi = az.group();
    let v = |name: &str| g.index_of(name).expect("generated vertex");
    let (va, vb, vc, vd, cr, cs) = (v("A"), v("B"), v("C"), v("D"), v("Cr"), v("Cs"));
    let mut failures = Vec::new();

    let exps = phi.ell_primary_exponents(ell);
    if exps != vec![2 * a + b] {
        failures.push(format!("Phi_ell exponents {exps:?}, expected [{}]", 2 * a + b));
    }
    let bc = phi.ell_part(&az.pair(vb, vc), ell);
    let order_bc = phi.element_order(&bc);
    if order_bc != ell_power(ell, 2 * a + b) {
        failures.push(format!("E(B, C) has ell-part order {order_bc}"));
    }
    let order_ab = az.pair_ell_part_order(va, vb, ell);
    if order_ab != ell_power(ell, a) {
        failures.push(format!("E(A, B) has ell-part order {order_ab}, expected ell^a"));
    }
    let order_cd = az.pair_ell_part_order(vc, vd, ell);
    if order_cd != ell_power(ell, a + b) {
        failures.push(format!("E(C, D) has ell-part order {order_cd}, expected ell^(a+b)"));
    }

    let lhs = az.pair(vb, vc).scale(&ell_power(ell, a + b));
    let rhs = az.pair(cr, cs);
    let relation_sign = if phi.same_class(&lhs, &rhs) {
        Some(1)
    } else if phi.same_class(&lhs, &-&rhs) {
        Some(-1)
    } else {
        failures.push("ell^(a+b) E(B, C) is not +-E(Cr, Cs)".into());
        None
    };

    let verdict_cd = psi_classify(&az, vc, vd, ell, 0)?;
    if verdict_cd.verdict != Verdict::InPsi(order_cd.clone()) {
        failures.push(format!("E(C, D) classified {:?}", verdict_cd.verdict));
    }
    let verdict_ab = psi_classify(&az, va, vb, ell, 0)?;
    if verdict_ab.verdict != Verdict::InPsi(order_ab.clone()) {
        failures.push(format!("E(A, B) classified {:?}", verdict_ab.verdict));
    }
    let verdict_crcs = psi_classify(&az, cr, cs, ell, 0)?;
    if matches!(verdict_crcs.verdict, Verdict::ConjecturalNotInPsi(_) | Verdict::NotInPsi) {
        failures.push(format!("(Cr, Cs) classified {:?}", verdict_crcs.verdict));
    }

    let cd = phi.ell_part(&az.pair(vc, vd), ell);
    let ab = phi.ell_part(&az.pair(va, vb), ell);
    let ab_divisible_in_psi = phi.in_subgroup(&[cd.scale_i64(ell as i64)], &ab) && phi.is_divisible_by(&ab, ell);
    if !ab_divisible_in_psi {
        failures.push("E(A, B) is not ell-divisible inside <E(C, D)>".into());
    }
    let crcs_in_psi = phi.in_subgroup(std::slice::from_ref(&cd), &phi.ell_part(&rhs, ell));
    if !crcs_in_psi {
        failures.push("E(Cr, Cs) is outside <E(C, D)>".into());
    }
    if order_ab.is_zero() {
        unreachable!("orders are positive");
    }

    Ok(TwoNodeFamilyAudit {
        ell,
        a,
        b,
        graph: az.into_graph(),
        phi_ell_exponents: exps,
        order_bc,
        order_ab,
        order_cd,
        relation_sign,
        verdict_cd,
        verdict_ab,
        verdict_crcs,
        ab_divisible_in_psi,
        crcs_in_psi,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{cycle, kodaira_star};
    use crate::graph::parse_graph;

    fn int(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn base_change_formula() {
        assert_eq!(base_change_multiplicity(&int(12), 2, 1), int(6));
        assert_eq!(base_change_multiplicity(&int(12), 2, 5), int(3));
        assert_eq!(base_change_multiplicity(&int(5), 2, 3), int(5));
    }

    #[test]
    fn mu_on_stars() {
        let a = Analysis::new(kodaira_star(0).unwrap());
        let g = a.graph();
        let p = a.weak_path(g.index_of("l1").unwrap(), g.index_of("l2").unwrap()).unwrap();
        assert_eq!(mu_exponent(g, &p, 2), 1);
        assert!(BaseChangeProfile::new(g, &p, 2, 1).is_ell_free());
        assert!(!BaseChangeProfile::new(g, &p, 2, 0).is_ell_free());
        let a = Analysis::new(kodaira_star(2).unwrap());
        let g = a.graph();
        let p = a.weak_path(g.index_of("l1").unwrap(), g.index_of("l3").unwrap()).unwrap();
        assert_eq!(mu_exponent(g, &p, 2), 1);
    }

    #[test]
    fn classify_examples() {
        for nu in 1..4 {
            let a = Analysis::new(kodaira_star(nu).unwrap());
            let g = a.graph();
            let v = psi_classify(&a, g.index_of("l1").unwrap(), g.index_of("l3").unwrap(), 2, 0).unwrap();
            assert_eq!(v.verdict, Verdict::NotInPsi);
            assert_eq!(v.justification, cite::NOT_BREAKABLE);
        }
        let a = Analysis::new(kodaira_star(0).unwrap());
        let g = a.graph();
        let (l1, l2) = (g.index_of("l1").unwrap(), g.index_of("l2").unwrap());
        let v = psi_classify(&a, l1, l2, 2, 0).unwrap();
        assert_eq!(v.verdict, Verdict::InPsi(int(2)));
        assert_eq!(v.justification, cite::IN_PSI);
        assert_eq!(psi_classify(&a, l1, l2, 2, 2).unwrap().tag(), "Unknown");
        assert_eq!(psi_classify(&a, l1, l1, 2, 0).unwrap().verdict, Verdict::TrivialImage);
        assert!(psi_classify(&a, l1, 99, 2, 0).is_err());
        assert!(psi_classify(&a, l1, l2, 2, 4).is_err());

        let a = Analysis::new(cycle(5).unwrap());
        let v = psi_classify(&a, 0, 1, 5, 0).unwrap();
        assert_eq!(v.verdict, Verdict::NotInPsi);
        assert_eq!(v.justification, cite::MULTIPLY_CONNECTED);
    }

    #[test]
    fn classify_conjectural_branches() {
        let a = Analysis::new(kodaira_star(1).unwrap());
        let g = a.graph();
        // x0 has multiplicity 2: ell = 3 is prime to it, the path is
        // 3-breakable, so the verdict is proven
        let v = psi_classify(&a, g.index_of("x0").unwrap(), g.index_of("l3").unwrap(), 3, 0).unwrap();
        assert!(matches!(v.verdict, Verdict::InPsi(_)));
        // a cycle through a vertex of multiplicity 2
        let g = parse_graph(
            "vertex x 2\nvertex y 1\nvertex z 1\nvertex u 1\nvertex w 1\n\
             edge x y\nedge y z\nedge z x\nedge x u\nedge x w\n",
        )
        .unwrap();
        let a = Analysis::new(g);
        let v = psi_classify(&a, 0, 1, 3, 0).unwrap();
        assert_eq!(v.verdict, Verdict::ConjecturalNotInPsi(Conjecture::MultiplyConnectedExtended));
        assert!(!v.is_proven());
        assert_eq!(psi_classify(&a, 0, 1, 2, 0).unwrap().tag(), "Unknown");
    }

    #[test]
    fn theta_on_i0_star() {
        let a = Analysis::new(kodaira_star(0).unwrap());
        let cand = theta_candidate(&a, 0, None).unwrap();
        assert_eq!(cand.s(), 4);
        assert_eq!(cand.first_sum(), int(4));
        let expected = &(&cand.taus[0] + &cand.taus[1]) + &cand.taus[2];
        assert!(a.group().same_class(&cand.tau, &expected));
        assert!(theta_orthogonality_check(&a, &cand, 2).unwrap());
        // the three nonzero classes of Z/2 x Z/2 sum to zero
        assert_eq!(a.group().element_order(&cand.tau), int(1));
        assert!(theta_candidate(&a, 1, None).is_err());
        assert!(theta_candidate(&a, 0, Some(&[0, 1])).is_err());
    }

    #[test]
    fn theta_order_r_with_off_chain_vertex() {
        // node d of multiplicity 5 with two unit leaves and an off-chain
        // neighbor x of multiplicity 3, itself a node with four unit leaves
        let g = parse_graph(
            "vertex d 5\nvertex t1 1\nvertex t2 1\nvertex x 3\n\
             vertex y1 1\nvertex y2 1\nvertex y3 1\nvertex y4 1\n\
             edge d t1\nedge d t2\nedge d x\n\
             edge x y1\nedge x y2\nedge x y3\nedge x y4\n",
        )
        .unwrap();
        let a = Analysis::new(g);
        let cand = theta_candidate(&a, 0, None).unwrap();
        assert_eq!(cand.s(), 2);
        assert!(a.group().same_class(&cand.tau, &cand.taus[0]));
        assert_eq!(a.group().element_order(&cand.tau), int(5));
        assert!(theta_orthogonality_check(&a, &cand, 5).is_err());
        assert!(theta_orthogonality_check(&a, &cand, 2).unwrap());
    }

    #[test]
    fn two_node_family_small_cases() {
        for (ell, a, b) in [(2, 1, 1), (3, 1, 1), (2, 1, 2)] {
            let audit = lorenzini_family_audit(ell, a, b).unwrap();
            assert!(audit.passed(), "{:?}", audit.failures);
        }
        let audit = lorenzini_family_audit(2, 1, 2).unwrap();
        assert_eq!(audit.order_cd, int(8));
        assert_eq!(lorenzini_family_audit(3, 1, 1).unwrap().order_bc, int(27));
    }
}
