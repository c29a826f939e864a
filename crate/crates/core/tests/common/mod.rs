//! Reference computations for the integration tests, written without the
//! library's Smith normal form, bridge finder or chain code.
//!
//! Orders and pairings come from the fraction-free inverse of the minor
//! `M'` (last row and column deleted), which is definite for a connected
//! arithmetical graph: `M s = x` has the solution `s = (adj(M') x', 0)`
//! over `det(M')`, unique up to adding multiples of `R`.

#![allow(dead_code)]

use std::collections::VecDeque;

use arithgraph::graph::ArithmeticalGraph;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn int(x: i64) -> BigInt {
    BigInt::from(x)
}

pub fn ord(x: &BigInt, ell: u64) -> u32 {
    assert!(!x.is_zero());
    let l = BigInt::from(ell);
    let mut x = x.abs();
    let mut k = 0;
    while x.is_multiple_of(&l) {
        x /= &l;
        k += 1;
    }
    k
}

pub fn ell_pow(ell: u64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(ell), k as usize)
}

/// Dense intersection matrix.
pub fn matrix(g: &ArithmeticalGraph) -> Vec<Vec<BigInt>> {
    let n = g.vertex_count();
    (0..n).map(|i| (0..n).map(|j| g.entry(i, j)).collect()).collect()
}

/// Determinant by Bareiss elimination with row swaps.
pub fn det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(p) => {
                    m.swap(k, p);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    &m[n - 1][n - 1] * sign
}

/// `|Phi(G)| = |det M_i| / r_i^2` for any vertex `i`.
pub fn phi_order(g: &ArithmeticalGraph) -> BigInt {
    let n = g.vertex_count();
    if n == 1 {
        return BigInt::one();
    }
    let m = matrix(g);
    let minor: Vec<Vec<BigInt>> = m[..n - 1].iter().map(|row| row[..n - 1].to_vec()).collect();
    let r = g.multiplicity(n - 1);
    let d = det(minor).abs();
    let (q, rem) = d.div_rem(&(r * r));
    assert!(rem.is_zero(), "r_i^2 must divide the minor");
    q
}

/// Spanning trees of the underlying multigraph, by the matrix-tree theorem
/// on the combinatorial Laplacian.
pub fn spanning_trees(g: &ArithmeticalGraph) -> BigInt {
    let n = g.vertex_count();
    if n == 1 {
        return BigInt::one();
    }
    let mut lap = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let c = g.entry(i, j);
                lap[i][i] += &c;
                lap[i][j] = -c;
            }
        }
    }
    let minor: Vec<Vec<BigInt>> = lap[..n - 1].iter().map(|row| row[..n - 1].to_vec()).collect();
    det(minor)
}

pub struct Oracle {
    n: usize,
    r: Vec<BigInt>,
    /// `adj(M')`, `(n-1) x (n-1)`
    adj: Vec<Vec<BigInt>>,
    det: BigInt,
    /// an integer vector with `u . R = 1`
    u: Vec<BigInt>,
    /// rows `1..n` of `V^{-1}`, where `V` is unimodular with
    /// `tR V = (1, 0, ..., 0)`: coordinates in a basis of `Ker(tR)`
    kernel_coords: Vec<Vec<BigInt>>,
    m: Vec<Vec<BigInt>>,
}

/// Fraction-free Gauss-Jordan on `[A | I]`; returns `(det A, adj A)`.
/// Requires nonzero leading principal minors.
fn adjugate(a: &[Vec<BigInt>]) -> (BigInt, Vec<Vec<BigInt>>) {
    let n = a.len();
    if n == 0 {
        return (BigInt::one(), Vec::new());
    }
    let mut w: Vec<Vec<BigInt>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        assert!(!w[k][k].is_zero(), "leading minor vanished");
        for i in 0..n {
            if i == k {
                continue;
            }
            for j in 0..2 * n {
                if j == k {
                    continue;
                }
                w[i][j] = (&w[k][k] * &w[i][j] - &w[i][k] * &w[k][j]) / &prev;
            }
            w[i][k] = BigInt::zero();
        }
        prev = w[k][k].clone();
    }
    // all diagonal entries now equal det A, and the right block is adj A
    let d = prev;
    let adj = w.into_iter().map(|row| row[n..].to_vec()).collect();
    (d, adj)
}

/// Extended Euclid on the entries of `r`, as column operations on a row
/// vector: returns unimodular `V` and `V^{-1}` with `r V = (g, 0, ..., 0)`.
fn row_reduce(r: &[BigInt]) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let n = r.len();
    let eye = |n: usize| -> Vec<Vec<BigInt>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect()
    };
    let (mut v, mut vinv) = (eye(n), eye(n));
    let mut row = r.to_vec();
    loop {
        let nz: Vec<usize> = (0..n).filter(|&j| !row[j].is_zero()).collect();
        let p = *nz.iter().min_by_key(|&&j| row[j].abs()).unwrap();
        if nz.len() == 1 {
            if p != 0 {
                row.swap(0, p);
                for rw in v.iter_mut() {
                    rw.swap(0, p);
                }
                vinv.swap(0, p);
            }
            break;
        }
        for &j in &nz {
            if j == p {
                continue;
            }
            let q = row[j].div_floor(&row[p]);
            // column j -= q column p; V^{-1} row p += q row j
            row[j] = &row[j] - &q * &row[p];
            for rw in v.iter_mut() {
                let t = &rw[p] * &q;
                rw[j] -= t;
            }
            let add: Vec<BigInt> = vinv[j].iter().map(|x| x * &q).collect();
            for (x, a) in vinv[p].iter_mut().zip(add) {
                *x += a;
            }
        }
    }
    if row[0].is_negative() {
        for rw in v.iter_mut() {
            rw[0] = -&rw[0];
        }
        for x in vinv[0].iter_mut() {
            *x = -&*x;
        }
    }
    (v, vinv)
}

impl Oracle {
    pub fn new(g: &ArithmeticalGraph) -> Self {
        let n = g.vertex_count();
        let m = matrix(g);
        let minor: Vec<Vec<BigInt>> = m[..n - 1].iter().map(|row| row[..n - 1].to_vec()).collect();
        let (det, adj) = adjugate(&minor);
        let r = g.multiplicities();
        let (v, vinv) = row_reduce(&r);
        let u: Vec<BigInt> = (0..n).map(|i| v[i][0].clone()).collect();
        debug_assert!(dot(&u, &r).is_one());
        Oracle {
            n,
            r,
            adj,
            det,
            u,
            kernel_coords: vinv[1..].to_vec(),
            m,
        }
    }

    /// Numerators of the solution of `M s = x` normalized by `u . s = 0`,
    /// over the common denominator `det(M')`.
    fn solve_num(&self, x: &[BigInt]) -> Vec<BigInt> {
        let k = self.n - 1;
        let mut s = vec![BigInt::zero(); self.n];
        for (j, xj) in x[..k].iter().enumerate() {
            if xj.is_zero() {
                continue;
            }
            for i in 0..k {
                s[i] += &self.adj[i][j] * xj;
            }
        }
        let us = dot(&self.u, &s);
        for i in 0..self.n {
            s[i] -= &us * &self.r[i];
        }
        s
    }

    /// Order of the class of `x` (a vector of `Ker(tR)`) in `Phi`.
    pub fn order(&self, x: &[BigInt]) -> BigInt {
        assert!(dot(x, &self.r).is_zero(), "not in Ker(tR)");
        if self.n == 1 {
            return BigInt::one();
        }
        let s = self.solve_num(x);
        let g = s.iter().fold(self.det.abs(), |acc, v| acc.gcd(v));
        self.det.abs() / g
    }

    pub fn ell_part_order(&self, x: &[BigInt], ell: u64) -> BigInt {
        ell_pow(ell, ord(&self.order(x), ell))
    }

    /// `<x, y> = -(tS y) mod Z` with `M S = x`.
    pub fn pairing(&self, x: &[BigInt], y: &[BigInt]) -> BigRational {
        self.pairing_with_solution(&self.solution(x), y)
    }

    /// `det * S` for `M S = x`, to pair one `x` against many `y`.
    pub fn solution(&self, x: &[BigInt]) -> Vec<BigInt> {
        if self.n == 1 {
            return vec![BigInt::zero()];
        }
        self.solve_num(x)
    }

    pub fn pairing_with_solution(&self, s: &[BigInt], y: &[BigInt]) -> BigRational {
        if self.n == 1 {
            return BigRational::zero();
        }
        let num: BigInt = s.iter().zip(y).filter(|(_, b)| !b.is_zero()).map(|(a, b)| a * b).sum();
        let q = BigRational::new(-num, self.det.clone());
        &q - q.floor()
    }

    /// Whether the class of `x` is `ell` times a class: the image of `x` in
    /// `Ker(tR) / ell Ker(tR)` lies in the span of the columns of `M`.
    pub fn is_divisible(&self, x: &[BigInt], ell: u64) -> bool {
        let l = BigInt::from(ell);
        let coords = |v: &[BigInt]| -> Vec<BigInt> {
            self.kernel_coords.iter().map(|row| dot(row, v).mod_floor(&l)).collect()
        };
        let mut rows: Vec<Vec<BigInt>> = (0..self.n)
            .map(|j| coords(&self.m.iter().map(|row| row[j].clone()).collect::<Vec<_>>()))
            .collect();
        let base = rank_mod(&mut rows.clone(), &l);
        rows.push(coords(x));
        rank_mod(&mut rows, &l) == base
    }
}

fn rank_mod(rows: &mut [Vec<BigInt>], l: &BigInt) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = inverse_mod(&rows[rank][c], l);
        let pivot: Vec<BigInt> = rows[rank].iter().map(|x| (x * &inv).mod_floor(l)).collect();
        rows[rank] = pivot.clone();
        for i in 0..rows.len() {
            if i != rank && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..cols {
                    rows[i][j] = (&rows[i][j] - &f * &pivot[j]).mod_floor(l);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn inverse_mod(a: &BigInt, l: &BigInt) -> BigInt {
    let e = num_integer::Integer::extended_gcd(a, l);
    assert!(e.gcd.is_one());
    e.x.mod_floor(l)
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `E(C, C')` from the definition.
pub fn pair_vector(g: &ArithmeticalGraph, c: usize, c2: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); g.vertex_count()];
    if c == c2 {
        return v;
    }
    let (r, r2) = (g.multiplicity(c), g.multiplicity(c2));
    let gg = r.gcd(r2);
    v[c] = r2 / &gg;
    v[c2] = -(r / &gg);
    v
}

fn connected_without(g: &ArithmeticalGraph, skip: (usize, usize)) -> bool {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut q = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(u) = q.pop_front() {
        for (v, _) in g.neighbors(u) {
            if (u.min(v), u.max(v)) == skip || seen[v] {
                continue;
            }
            seen[v] = true;
            q.push_back(v);
        }
    }
    seen.into_iter().all(|s| s)
}

/// Bridges by deleting each simple edge in turn.
pub fn bridges(g: &ArithmeticalGraph) -> Vec<(usize, usize)> {
    g.edges()
        .filter(|(_, _, c)| c.is_one())
        .map(|(i, j, _)| (i.min(j), i.max(j)))
        .filter(|&e| !connected_without(g, e))
        .collect()
}

/// Label of each vertex's component in the subgraph of bridges.
pub fn bridge_components(g: &ArithmeticalGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let b = bridges(g);
    let mut label: Vec<usize> = (0..n).collect();
    fn find(l: &mut Vec<usize>, x: usize) -> usize {
        if l[x] != x {
            let root = find(l, l[x]);
            l[x] = root;
        }
        l[x]
    }
    for (x, y) in b {
        let (a, c) = (find(&mut label, x), find(&mut label, y));
        label[a] = c;
    }
    (0..n).map(|x| find(&mut label, x)).collect()
}

/// `b_1 = 1`, `b_{j+1} = c_j b_j - b_{j-1}`; returns `(b_1..b_n, b)` for the
/// self-intersections `-c_j` of the interior vertices.
pub fn b_sequence(c: &[BigInt]) -> (Vec<BigInt>, BigInt) {
    let mut b = vec![BigInt::one()];
    let mut prev = BigInt::zero();
    for j in 0..c.len() {
        let next = &c[j] * &b[j] - &prev;
        prev = b[j].clone();
        b.push(next);
    }
    let last = b.pop().unwrap();
    (b, last)
}
