//! Exact integer and rational linear algebra.
//!
//! Everything here works over `BigInt`/`BigRational`; there is no floating
//! point and no modular shortcut. The Smith normal form is the ground truth
//! for every group-theoretic quantity computed elsewhere in the crate.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::valuation;
use crate::error::{Error, Result};

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntegerMatrix { rows, cols, data }
    }

    /// Builds a matrix from small integer rows; panics on ragged input.
    pub fn from_rows<T: Into<BigInt> + Copy>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        Self::from_fn(rows.len(), cols, |i, j| rows[i][j].into())
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| dot(self.row(i), v))
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[target] -= q * row[src]`
    fn row_axpy(&mut self, target: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j];
            if !s.is_zero() {
                let delta = q * s;
                self.data[target * self.cols + j] -= delta;
            }
        }
    }

    /// `col[target] -= q * col[src]`
    fn col_axpy(&mut self, target: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + src];
            if !s.is_zero() {
                let delta = q * s;
                self.data[i * self.cols + target] -= delta;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let e = &mut self.data[i * self.cols + j];
            *e = -std::mem::take(e);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let e = &mut self.data[i * self.cols + j];
            *e = -std::mem::take(e);
        }
    }
}

impl Index<(usize, usize)> for IntegerMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntegerMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal with
/// `d_1 | d_2 | ...` (zeros last). `u_inv` is carried along so that cokernel
/// generators can be read off without a second inversion.
#[derive(Clone, Debug)]
pub struct SnfDecomposition {
    pub u: IntegerMatrix,
    pub u_inv: IntegerMatrix,
    pub v: IntegerMatrix,
    pub d: IntegerMatrix,
}

impl SnfDecomposition {
    /// Diagonal entries `d_1, ..., d_min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }

    /// Re-checks `U A V = D`, `U U^-1 = I`, the diagonal shape and the
    /// divisibility chain by exact multiplication.
    pub fn verify(&self, a: &IntegerMatrix) -> bool {
        let n = self.u.rows();
        if self.u.mul(a).mul(&self.v) != self.d {
            return false;
        }
        if self.u.mul(&self.u_inv) != IntegerMatrix::identity(n) {
            return false;
        }
        for i in 0..self.d.rows() {
            for j in 0..self.d.cols() {
                if i != j && !self.d[(i, j)].is_zero() {
                    return false;
                }
            }
        }
        let diag = self.diagonal();
        let mut seen_zero = false;
        for w in diag.windows(2) {
            if w[0].is_negative() || w[1].is_negative() {
                return false;
            }
            if w[0].is_zero() {
                seen_zero = true;
            }
            if seen_zero && !w[1].is_zero() {
                return false;
            }
            if !w[0].is_zero() && !w[1].is_multiple_of(&w[0]) {
                return false;
            }
        }
        // det V = ±1 follows from the Bezout-free construction (only
        // swaps, negations and elementary transvections are applied).
        true
    }
}

/// Smith normal form by elementary operations.
///
/// Pivot rule: the nonzero entry of smallest absolute value in the trailing
/// submatrix, earliest in row-major order on ties. Output is deterministic.
pub fn smith_normal_form(a: &IntegerMatrix) -> SnfDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntegerMatrix::identity(m);
    let mut u_inv = IntegerMatrix::identity(m);
    let mut v = IntegerMatrix::identity(n);

    let row_axpy = |d: &mut IntegerMatrix,
                        u: &mut IntegerMatrix,
                        u_inv: &mut IntegerMatrix,
                        target: usize,
                        src: usize,
                        q: &BigInt| {
        d.row_axpy(target, src, q);
        u.row_axpy(target, src, q);
        // (I - q e_t e_s^T)^-1 = I + q e_t e_s^T
        let minus_q = -q;
        u_inv.col_axpy(src, target, &minus_q);
    };

    'outer: for k in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = find_pivot(&d, k) else {
                break 'outer;
            };
            d.swap_rows(k, pi);
            u.swap_rows(k, pi);
            u_inv.swap_cols(k, pi);
            d.swap_cols(k, pj);
            v.swap_cols(k, pj);

            let pivot = d[(k, k)].clone();
            let mut clean = true;
            for i in k + 1..m {
                if d[(i, k)].is_zero() {
                    continue;
                }
                let q = &d[(i, k)] / &pivot;
                if !q.is_zero() {
                    row_axpy(&mut d, &mut u, &mut u_inv, i, k, &q);
                }
                if !d[(i, k)].is_zero() {
                    clean = false;
                }
            }
            for j in k + 1..n {
                if d[(k, j)].is_zero() {
                    continue;
                }
                let q = &d[(k, j)] / &pivot;
                if !q.is_zero() {
                    d.col_axpy(j, k, &q);
                    v.col_axpy(j, k, &q);
                }
                if !d[(k, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Divisibility: fold an offending row into the pivot row and retry.
            let offending = (k + 1..m).find(|&i| {
                (k + 1..n).any(|j| !d[(i, j)].is_multiple_of(&pivot))
            });
            match offending {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut d, &mut u, &mut u_inv, k, i, &minus_one);
                }
                None => break,
            }
        }
        if d[(k, k)].is_negative() {
            d.negate_row(k);
            u.negate_row(k);
            u_inv.negate_col(k);
        }
    }
    SnfDecomposition { u, u_inv, v, d }
}

fn find_pivot(d: &IntegerMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in k..d.rows() {
        for j in k..d.cols() {
            let e = &d[(i, j)];
            if e.is_zero() {
                continue;
            }
            let abs = e.abs();
            if best.as_ref().map_or(true, |(_, _, b)| abs < *b) {
                let is_one = abs.is_one();
                best = Some((i, j, abs));
                if is_one {
                    return best.map(|(i, j, _)| (i, j));
                }
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Finds some rational `x` with `A x = b`, or `None` if the system is
/// inconsistent. Plain Gauss-Jordan elimination over `BigRational`; free
/// variables are set to zero.
pub fn solve_rational_singular(a: &IntegerMatrix, b: &[BigInt]) -> Option<Vec<BigRational>> {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(b.len(), m, "right-hand side has wrong length");
    let mut aug: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            let mut row: Vec<BigRational> = a
                .row(i)
                .iter()
                .map(|e| BigRational::from_integer(e.clone()))
                .collect();
            row.push(BigRational::from_integer(b[i].clone()));
            row
        })
        .collect();

    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !aug[i][c].is_zero()) else {
            continue;
        };
        aug.swap(r, p);
        let inv = aug[r][c].recip();
        for e in aug[r].iter_mut() {
            *e *= &inv;
        }
        let pivot_row = aug[r].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (e, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *e -= &f * p;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == m {
            break;
        }
    }
    if aug[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (row, &c) in aug.iter().zip(&pivot_cols) {
        x[c] = row[n].clone();
    }
    Some(x)
}

/// A finitely generated abelian group `Z^m / Im(A)` in invariant-factor
/// form, together with the coordinate map read off the Smith form.
#[derive(Clone, Debug)]
pub struct AbelianGroupStructure {
    factors: Vec<BigInt>,
    free_rank: usize,
    /// Rows of `U` for the nontrivial factors, reduced modulo the factor.
    coordinate_rows: Vec<Vec<BigInt>>,
    /// Exact rows of `U` for the free part.
    free_rows: Vec<Vec<BigInt>>,
    /// Columns of `U^-1` for the nontrivial factors.
    generators: Vec<Vec<BigInt>>,
    ambient: usize,
}

impl AbelianGroupStructure {
    pub fn cokernel(a: &IntegerMatrix) -> Self {
        Self::from_snf(&smith_normal_form(a))
    }

    pub fn from_snf(snf: &SnfDecomposition) -> Self {
        let m = snf.u.rows();
        let diag = snf.diagonal();
        let mut factors = Vec::new();
        let mut coordinate_rows = Vec::new();
        let mut generators = Vec::new();
        let mut free_rows = Vec::new();
        for i in 0..m {
            let d = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
            if d.is_zero() {
                free_rows.push(snf.u.row(i).to_vec());
            } else if !d.is_one() {
                coordinate_rows.push(snf.u.row(i).iter().map(|e| e.mod_floor(&d)).collect());
                generators.push(snf.u_inv.column(i));
                factors.push(d);
            }
        }
        AbelianGroupStructure {
            free_rank: free_rows.len(),
            factors,
            coordinate_rows,
            free_rows,
            generators,
            ambient: m,
        }
    }

    /// Invariant factors `> 1`, each dividing the next.
    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.factors
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.factors.iter().product()
    }

    pub fn is_trivial_torsion(&self) -> bool {
        self.factors.is_empty()
    }

    /// Representatives in `Z^m` of the cyclic generators, one per factor.
    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Coordinates `(x_i mod d_i)` of the class of a torsion vector.
    pub fn coordinates(&self, t: &[BigInt]) -> Result<Vec<BigInt>> {
        if t.len() != self.ambient {
            return Err(Error::InvalidArgument(format!(
                "vector of length {} in a group on Z^{}",
                t.len(),
                self.ambient
            )));
        }
        if self.free_rows.iter().any(|row| !dot(row, t).is_zero()) {
            return Err(Error::NotTorsion);
        }
        Ok(self
            .coordinate_rows
            .iter()
            .zip(&self.factors)
            .map(|(row, d)| dot(row, t).mod_floor(d))
            .collect())
    }

    /// Order of the class with the given coordinates.
    pub fn order_of_coordinates(&self, coords: &[BigInt]) -> BigInt {
        coords
            .iter()
            .zip(&self.factors)
            .fold(BigInt::one(), |acc, (x, d)| acc.lcm(&(d / x.gcd(d))))
    }

    /// Minimal `d > 0` with `d t` in the image.
    pub fn order_of(&self, t: &[BigInt]) -> Result<BigInt> {
        Ok(self.order_of_coordinates(&self.coordinates(t)?))
    }

    /// Whether some torsion `x` satisfies `ell x = t` modulo the image.
    pub fn is_divisible_by(&self, t: &[BigInt], ell: u64) -> Result<bool> {
        let ell = BigInt::from(ell);
        let coords = self.coordinates(t)?;
        Ok(coords
            .iter()
            .zip(&self.factors)
            .all(|(x, d)| !d.is_multiple_of(&ell) || x.is_multiple_of(&ell)))
    }

    /// Whether the class with coordinates `target` lies in the subgroup
    /// generated by the classes with coordinates `gens`.
    pub fn span_contains(&self, gens: &[Vec<BigInt>], target: &[BigInt]) -> bool {
        if self.factors.is_empty() {
            return true;
        }
        let quotient = AbelianGroupStructure::cokernel(&self.span_lattice(gens));
        // The lattice has full rank, so every class is torsion.
        quotient
            .coordinates(target)
            .map(|c| c.iter().all(Zero::is_zero))
            .unwrap_or(false)
    }

    /// Order of the subgroup generated by the classes with coordinates `gens`.
    pub fn subgroup_order(&self, gens: &[Vec<BigInt>]) -> BigInt {
        if self.factors.is_empty() {
            return BigInt::one();
        }
        let quotient = AbelianGroupStructure::cokernel(&self.span_lattice(gens));
        self.torsion_order() / quotient.torsion_order()
    }

    /// Columns: the generators, then `d_i e_i`.
    fn span_lattice(&self, gens: &[Vec<BigInt>]) -> IntegerMatrix {
        let k = self.factors.len();
        IntegerMatrix::from_fn(k, gens.len() + k, |i, j| {
            if j < gens.len() {
                gens[j][i].clone()
            } else if j - gens.len() == i {
                self.factors[i].clone()
            } else {
                BigInt::zero()
            }
        })
    }

    /// The `ell`-primary parts of the invariant factors that are nontrivial.
    pub fn ell_primary_factors(&self, ell: u64) -> Vec<u32> {
        self.factors
            .iter()
            .map(|d| valuation(d, ell))
            .filter(|&k| k > 0)
            .collect()
    }
}

/// Order of the class of `t` in the torsion of `Z^m / Im(A)`.
pub fn cokernel_order_of(a: &IntegerMatrix, t: &[BigInt]) -> Result<BigInt> {
    AbelianGroupStructure::cokernel(a).order_of(t)
}

/// Whether the class of `t` is `ell`-divisible among torsion classes.
pub fn is_divisible_by(a: &IntegerMatrix, t: &[BigInt], ell: u64) -> Result<bool> {
    crate::arith::require_prime(ell)?;
    AbelianGroupStructure::cokernel(a).is_divisible_by(t, ell)
}

/// Whether `t` lies in the integer column span of `A`.
pub fn in_integer_image(a: &IntegerMatrix, t: &[BigInt]) -> bool {
    let g = AbelianGroupStructure::cokernel(a);
    g.coordinates(t)
        .map(|c| c.iter().all(Zero::is_zero))
        .unwrap_or(false)
}
