//! Compressed-row matrices, banded LU without pivoting, inertia counting
//! and Jacobi-preconditioned conjugate gradients.

use crate::error::{Error, Result};

/// Square sparse matrix in compressed row form.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds an `n × n` matrix from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside {n}×{n}");
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            cols.push(c);
            vals.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            *yi = self.row(i).map(|(c, v)| v * x[c]).sum();
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `self + diag(d)`.
    pub fn add_diagonal(&self, d: &[f64]) -> CsrMatrix {
        let mut t: Vec<(usize, usize, f64)> = Vec::with_capacity(self.nnz() + self.n);
        for i in 0..self.n {
            t.extend(self.row(i).map(|(c, v)| (i, c, v)));
            t.push((i, i, d[i]));
        }
        CsrMatrix::from_triplets(self.n, t)
    }

    /// `diag(left) · self · diag(right)`.
    pub fn scale(&self, left: &[f64], right: &[f64]) -> CsrMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out.vals[k] *= left[i] * right[self.cols[k]];
            }
        }
        out
    }

    /// Lower and upper bandwidths.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut lo = 0;
        let mut up = 0;
        for i in 0..self.n {
            for (c, _) in self.row(i) {
                if c < i {
                    lo = lo.max(i - c);
                } else {
                    up = up.max(c - i);
                }
            }
        }
        (lo, up)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(c, v)| (v - self.get(c, i)).abs() <= tol * (1.0 + v.abs())))
    }

    /// Gershgorin lower bound on the real parts of the spectrum.
    pub fn gershgorin_lower(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let (d, off) = self.row(i).fold((0.0, 0.0), |(d, off), (c, v)| {
                    if c == i {
                        (d + v, off)
                    } else {
                        (d, off + v.abs())
                    }
                });
                d - off
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// LU factors of a banded matrix computed without pivoting.
#[derive(Clone, Debug)]
pub struct BandLu {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl BandLu {
    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    fn at(&self, i: usize, j: usize) -> usize {
        i * self.width() + (j + self.lower - i)
    }

    /// Factors `a`. Pivots smaller than `1e-300` in magnitude are reported as singular.
    pub fn factor(a: &CsrMatrix) -> Result<BandLu> {
        let mut lu = Self::load(a);
        lu.eliminate(false)?;
        Ok(lu)
    }

    fn load(a: &CsrMatrix) -> BandLu {
        let (lower, upper) = a.bandwidths();
        let n = a.dim();
        let mut lu = BandLu { n, lower, upper, data: vec![0.0; n * (lower + upper + 1)] };
        for i in 0..n {
            for (c, v) in a.row(i) {
                let k = lu.at(i, c);
                lu.data[k] += v;
            }
        }
        lu
    }

    /// Doolittle elimination; `perturb` replaces pivots below `ε·max|a_ij|`
    /// by that value instead of failing.
    fn eliminate(&mut self, perturb: bool) -> Result<()> {
        let (n, lower, upper) = (self.n, self.lower, self.upper);
        let w = self.width();
        let tiny = if perturb {
            f64::EPSILON * self.data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE)
        } else {
            1e-300
        };
        for k in 0..n {
            let mut pivot = self.data[k * w + lower];
            if !pivot.is_finite() || pivot.abs() < tiny {
                if perturb && pivot.is_finite() {
                    pivot = tiny;
                    self.data[k * w + lower] = pivot;
                } else {
                    return Err(Error::Singular { row: k, pivot });
                }
            }
            let i_end = (k + lower).min(n - 1);
            let j_end = (k + upper).min(n - 1);
            for i in k + 1..=i_end {
                let ik = i * w + (k + lower - i);
                let l = self.data[ik] / pivot;
                if l == 0.0 {
                    continue;
                }
                self.data[ik] = l;
                let row_k = k * w + lower - k;
                let row_i = i * w + lower - i;
                for j in k + 1..=j_end {
                    self.data[row_i + j] -= l * self.data[row_k + j];
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves in place.
    pub fn solve(&self, b: &mut [f64]) {
        let (n, lower, upper) = (self.n, self.lower, self.upper);
        let w = self.width();
        for i in 0..n {
            let start = i.saturating_sub(lower);
            let row = i * w + lower - i;
            let mut s = b[i];
            for j in start..i {
                s -= self.data[row + j] * b[j];
            }
            b[i] = s;
        }
        for i in (0..n).rev() {
            let end = (i + upper).min(n - 1);
            let row = i * w + lower - i;
            let mut s = b[i];
            for j in i + 1..=end {
                s -= self.data[row + j] * b[j];
            }
            b[i] = s / self.data[row + i];
        }
    }

    fn pivots(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.data[k * self.width() + self.lower])
    }
}

/// Counts of negative, zero and positive eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

/// Inertia of the symmetric matrix `a − shift·I` from the signs of the
/// pivots of its `LDLᵀ` factorisation (Sylvester's law).
pub fn inertia(a: &CsrMatrix, shift: f64) -> Inertia {
    let shifted = a.add_diagonal(&vec![-shift; a.dim()]);
    let mut lu = BandLu::load(&shifted);
    lu.eliminate(true).expect("perturbed elimination cannot fail on finite input");
    let tiny = f64::EPSILON * shifted.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut out = Inertia { negative: 0, zero: 0, positive: 0 };
    for p in lu.pivots() {
        if p < 0.0 {
            out.negative += 1;
        } else if p <= tiny {
            out.zero += 1;
        } else {
            out.positive += 1;
        }
    }
    out
}

/// Outcome of an iterative solve.
#[derive(Clone, Debug, PartialEq)]
pub struct KrylovStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for a symmetric positive definite `a`.
pub fn pcg(a: &CsrMatrix, b: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> Result<KrylovStats> {
    let n = a.dim();
    let dinv: Vec<f64> = a.diagonal().iter().map(|d| if *d != 0.0 { 1.0 / d } else { 1.0 }).collect();
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(KrylovStats { iterations: 0, relative_residual: 0.0 });
    }
    let mut r: Vec<f64> = a.mul(x).iter().zip(b).map(|(ax, bi)| bi - ax).collect();
    let mut z: Vec<f64> = r.iter().zip(&dinv).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];
    let mut rel = r.iter().map(|v| v * v).sum::<f64>().sqrt() / bnorm;
    for it in 0..max_iter {
        if rel <= rel_tol {
            return Ok(KrylovStats { iterations: it, relative_residual: rel });
        }
        a.matvec(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::NotConverged { method: "conjugate gradients", iterations: it, residual: rel });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] = r[i] * dinv[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rel = r.iter().map(|v| v * v).sum::<f64>().sqrt() / bnorm;
    }
    if rel <= rel_tol {
        return Ok(KrylovStats { iterations: max_iter, relative_residual: rel });
    }
    Err(Error::NotConverged { method: "conjugate gradients", iterations: max_iter, residual: rel })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, t)
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = CsrMatrix::from_triplets(2, vec![(0, 0, 1.0), (1, 0, 2.0), (0, 0, 3.0)]);
        assert_eq!(a.get(0, 0), 4.0);
        assert_eq!(a.get(1, 0), 2.0);
        assert_eq!(a.get(1, 1), 0.0);
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn band_lu_solves_tridiagonal() {
        let n = 50;
        let a = laplace_1d(n);
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut b = a.mul(&x);
        BandLu::factor(&a).unwrap().solve(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-11);
        }
    }

    #[test]
    fn band_lu_nonsymmetric_2d() {
        let m = 7;
        let n = m * m;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.5));
            if i % m > 0 {
                t.push((i, i - 1, -1.2));
            }
            if i % m + 1 < m {
                t.push((i, i + 1, -0.8));
            }
            if i >= m {
                t.push((i, i - m, -1.0));
            }
            if i + m < n {
                t.push((i, i + m, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, t);
        assert_eq!(a.bandwidths(), (m, m));
        let x: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64).cos()).collect();
        let mut b = a.mul(&x);
        BandLu::factor(&a).unwrap().solve(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_pivot_reported() {
        let a = CsrMatrix::from_triplets(2, vec![(0, 0, 0.0), (0, 1, 1.0), (1, 0, 1.0)]);
        assert!(matches!(BandLu::factor(&a), Err(Error::Singular { row: 0, .. })));
    }

    #[test]
    fn inertia_counts_eigenvalues_below_shift() {
        // eigenvalues 2 − 2cos(kπ/(n+1))
        let n = 20;
        let a = laplace_1d(n);
        let eig = |k: usize| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
        for k in 1..n {
            let shift = 0.5 * (eig(k) + eig(k + 1));
            let i = inertia(&a, shift);
            assert_eq!(i.negative, k);
            assert_eq!(i.negative + i.zero + i.positive, n);
        }
    }

    #[test]
    fn pcg_matches_direct() {
        let n = 200;
        let a = laplace_1d(n);
        let b: Vec<f64> = (0..n).map(|i| 1.0 + (i % 3) as f64).collect();
        let mut x = vec![0.0; n];
        let stats = pcg(&a, &b, &mut x, 1e-12, 10_000).unwrap();
        assert!(stats.relative_residual <= 1e-12);
        let mut y = b.clone();
        BandLu::factor(&a).unwrap().solve(&mut y);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-7 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn gershgorin_bounds_spectrum() {
        let a = laplace_1d(10);
        assert_eq!(a.gershgorin_lower(), 0.0);
        let shifted = a.add_diagonal(&[-3.0; 10]);
        assert_eq!(shifted.gershgorin_lower(), -3.0);
    }
}
