//! Slow, independent reference computations used only by unit tests.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::linalg::IntegerMatrix;

/// Absolute value of the determinant of `A` with its last row and column
/// removed, by fraction-free Bareiss elimination.
pub fn reduced_laplacian_determinant(a: &IntegerMatrix) -> BigInt {
    let n = a.rows() - 1;
    let mut m: Vec<Vec<BigInt>> = (0..n).map(|i| a.row(i)[..n].to_vec()).collect();
    bareiss(&mut m).abs()
}

pub fn bareiss(m: &mut [Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    &m[n - 1][n - 1] * sign
}

/// Whether `t` is an integer combination of the columns of `A`, by
/// Euclidean column echelon reduction.
pub fn integer_preimage_exists(a: &IntegerMatrix, t: &[BigInt]) -> bool {
    let m = a.rows();
    let mut pool: Vec<Vec<BigInt>> = (0..a.cols()).map(|j| a.column(j)).collect();
    let mut pivots: Vec<Option<Vec<BigInt>>> = vec![None; m];
    for (p, slot) in pivots.iter_mut().enumerate() {
        loop {
            let mut nz: Vec<usize> = (0..pool.len()).filter(|&i| !pool[i][p].is_zero()).collect();
            if nz.len() <= 1 {
                if let Some(&i) = nz.first() {
                    *slot = Some(pool.remove(i));
                }
                break;
            }
            nz.sort_by_key(|&i| pool[i][p].abs());
            let base = pool[nz[0]].clone();
            for &i in &nz[1..] {
                let q = pool[i][p].div_floor(&base[p]);
                for (x, b) in pool[i].iter_mut().zip(&base) {
                    *x -= &q * b;
                }
            }
        }
    }
    let mut t = t.to_vec();
    for (p, piv) in pivots.iter().enumerate() {
        if t[p].is_zero() {
            continue;
        }
        let Some(piv) = piv else {
            return false;
        };
        if !t[p].is_multiple_of(&piv[p]) {
            return false;
        }
        let q = &t[p] / &piv[p];
        for (x, b) in t.iter_mut().zip(piv) {
            *x -= &q * b;
        }
    }
    t.iter().all(Zero::is_zero)
}
