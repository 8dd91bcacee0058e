//! Exact rational linear algebra: row reduction, null spaces, and the
//! double description method for cones of the form `{x >= 0, Mx = 0}`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Dense rational matrix, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Rat>>,
}

impl RatMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMat { rows, cols, data: vec![vec![Rat::zero(); cols]; rows] }
    }

    pub fn from_rows(data: Vec<Vec<Rat>>) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        assert!(data.iter().all(|r| r.len() == cols), "ragged matrix");
        RatMat { rows, cols, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.data[i][i] = Rat::one();
        }
        m
    }

    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.rows);
        let mut out = RatMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = &self.data[i][k] * &other.data[k][j];
                    out.data[i][j] += t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        self.data
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).fold(Rat::zero(), |s, t| s + t))
            .collect()
    }

    /// Reduced row echelon form in place; returns pivot column indices.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.data[r][col].is_zero()) else {
                continue;
            };
            self.data.swap(row, p);
            let inv = self.data[row][col].clone();
            for x in self.data[row].iter_mut() {
                *x = &*x / &inv;
            }
            for r in 0..self.rows {
                if r != row && !self.data[r][col].is_zero() {
                    let f = self.data[r][col].clone();
                    for c in 0..self.cols {
                        let t = &f * &self.data[row][c];
                        self.data[r][c] -= t;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right null space `{x : Mx = 0}`.
    pub fn null_space(&self) -> Vec<Vec<Rat>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut basis = Vec::new();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        for free in (0..self.cols).filter(|c| !pivot_set.contains(c)) {
            let mut v = vec![Rat::zero(); self.cols];
            v[free] = Rat::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.data[r][free].clone();
            }
            basis.push(v);
        }
        basis
    }
}

/// Dense integer matrix, row major. Used for transition-matrix products
/// where entries can exceed machine integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<BigInt>>,
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![vec![BigInt::zero(); cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.data[i][i] = BigInt::one();
        }
        m
    }

    pub fn from_u64(rows: &[Vec<u64>]) -> Self {
        let data: Vec<Vec<BigInt>> =
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let rows_n = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        IntMat { rows: rows_n, cols, data }
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = &self.data[i][k] * &other.data[k][j];
                    out.data[i][j] += t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        self.data
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).fold(BigInt::zero(), |s, t| s + t))
            .collect()
    }

    pub fn pow(&self, k: usize) -> IntMat {
        assert_eq!(self.rows, self.cols);
        let mut out = IntMat::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(|x| x.is_positive()))
    }

    pub fn to_rat(&self) -> RatMat {
        RatMat::from_rows(
            self.data
                .iter()
                .map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect())
                .collect(),
        )
    }
}

/// Scale a rational vector to a primitive integer vector (entries coprime,
/// first nonzero entry positive).
pub fn primitive_integer(v: &[Rat]) -> Vec<BigInt> {
    let mut denom_lcm = BigInt::one();
    for x in v {
        denom_lcm = denom_lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&denom_lcm / x.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return ints;
    }
    let mut out: Vec<BigInt> = ints.iter().map(|x| x / &g).collect();
    if let Some(first) = out.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in out.iter_mut() {
                *x = -&*x;
            }
        }
    }
    out
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).fold(Rat::zero(), |s, t| s + t)
}

fn zero_set(v: &[Rat]) -> Vec<usize> {
    v.iter().enumerate().filter(|(_, x)| x.is_zero()).map(|(i, _)| i).collect()
}

/// Extreme rays of the pointed cone `{x >= 0, Mx = 0}` by the double
/// description method, inserting the equality rows one at a time in order.
/// Rays are returned as primitive integer vectors, sorted lexicographically.
pub fn extreme_rays(m: &RatMat) -> Vec<Vec<BigInt>> {
    let n = m.cols;
    let mut rays: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut v = vec![Rat::zero(); n];
            v[i] = Rat::one();
            v
        })
        .collect();
    for row in &m.data {
        let vals: Vec<Rat> = rays.iter().map(|r| dot(row, r)).collect();
        let mut next: Vec<Vec<Rat>> = Vec::new();
        let zero_sets: Vec<Vec<usize>> = rays.iter().map(|r| zero_set(r)).collect();
        for (r, v) in rays.iter().zip(&vals) {
            if v.is_zero() {
                next.push(r.clone());
            }
        }
        for (pi, pv) in vals.iter().enumerate() {
            if !pv.is_positive() {
                continue;
            }
            for (ni, nv) in vals.iter().enumerate() {
                if !nv.is_negative() {
                    continue;
                }
                if !adjacent(&zero_sets, pi, ni) {
                    continue;
                }
                // combination with value 0 on this row, nonnegative entries
                let mut comb = vec![Rat::zero(); n];
                for j in 0..n {
                    comb[j] = pv * &rays[ni][j] - nv * &rays[pi][j];
                }
                next.push(comb);
            }
        }
        rays = dedupe_rays(next);
    }
    let mut out: Vec<Vec<BigInt>> = rays.iter().map(|r| primitive_integer(r)).collect();
    out.sort();
    out.dedup();
    out
}

/// Combinatorial adjacency test w.r.t. the sign constraints `x_i >= 0`:
/// rays p and n are adjacent iff no other ray's zero set contains
/// `Z(p) ∩ Z(n)`.
fn adjacent(zero_sets: &[Vec<usize>], p: usize, n: usize) -> bool {
    let inter: Vec<usize> =
        zero_sets[p].iter().filter(|i| zero_sets[n].contains(i)).copied().collect();
    for (k, z) in zero_sets.iter().enumerate() {
        if k == p || k == n {
            continue;
        }
        if inter.iter().all(|i| z.contains(i)) {
            return false;
        }
    }
    true
}

fn dedupe_rays(rays: Vec<Vec<Rat>>) -> Vec<Vec<Rat>> {
    let mut seen: Vec<Vec<BigInt>> = Vec::new();
    let mut out = Vec::new();
    for r in rays {
        let key = primitive_integer(&r);
        if key.iter().all(|x| x.is_zero()) {
            continue;
        }
        if !seen.contains(&key) {
            seen.push(key);
            out.push(r);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_and_rank() {
        let m = RatMat::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn null_space_of_sum_row() {
        // x + y - z = 0
        let m = RatMat::from_i64(&[&[1, 1, -1]]);
        let ns = m.null_space();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(dot(&m.data[0], v).is_zero());
        }
    }

    #[test]
    fn primitive_normalization() {
        let v = vec![ratio(1, 2), ratio(3, 4), rat(0)];
        assert_eq!(primitive_integer(&v), vec![BigInt::from(2), BigInt::from(3), BigInt::from(0)]);
    }

    #[test]
    fn extreme_rays_of_plane_in_orthant() {
        // {x >= 0} ∩ {x1 + x2 = x3}: rays (1,0,1) and (0,1,1)
        let m = RatMat::from_i64(&[&[1, 1, -1]]);
        let rays = extreme_rays(&m);
        assert_eq!(rays.len(), 2);
        let to_i64 = |r: &Vec<BigInt>| -> Vec<i64> {
            r.iter().map(|x| i64::try_from(x).unwrap()).collect()
        };
        let rays: Vec<Vec<i64>> = rays.iter().map(to_i64).collect();
        assert!(rays.contains(&vec![0, 1, 1]));
        assert!(rays.contains(&vec![1, 0, 1]));
    }

    #[test]
    fn extreme_rays_no_constraints() {
        let m = RatMat::zero(0, 3);
        let rays = extreme_rays(&m);
        assert_eq!(rays.len(), 3);
    }

    #[test]
    fn extreme_rays_trivial_cone() {
        // x1 = 0, x2 = 0 in R^2
        let m = RatMat::from_i64(&[&[1, 0], &[0, 1]]);
        assert!(extreme_rays(&m).is_empty());
    }

    #[test]
    fn intmat_pow() {
        let fib = IntMat::from_u64(&[vec![1, 1], vec![1, 0]]);
        let f = fib.pow(10);
        assert_eq!(f.data[0][0], BigInt::from(89));
    }
}
