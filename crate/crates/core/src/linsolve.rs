//! Dense complex matrices and LU factorization with partial pivoting.

use std::io::Write;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;

/// Condition estimates above this attach a warning to the solution.
pub const CONDITION_WARNING_THRESHOLD: f64 = 1e12;

/// Square matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        DenseMatrix { n, data }
    }

    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                found: data.len(),
            });
        }
        Ok(DenseMatrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n, "matvec dimension");
        self.data
            .chunks(self.n.max(1))
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// self += s * other
    pub fn add_scaled(&mut self, s: Complex64, other: &DenseMatrix) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    /// self = s * self
    pub fn scale(&mut self, s: Complex64) {
        for a in &mut self.data {
            *a *= s;
        }
    }

    pub fn add_diagonal(&mut self, s: Complex64) {
        for i in 0..self.n {
            self[(i, i)] += s;
        }
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, |i, j| self[(j, i)])
    }

    /// [[a, b], [c, d]] for equally sized square blocks.
    pub fn from_blocks(
        a: &DenseMatrix,
        b: &DenseMatrix,
        c: &DenseMatrix,
        d: &DenseMatrix,
    ) -> DenseMatrix {
        let n = a.n;
        assert!(b.n == n && c.n == n && d.n == n, "block sizes differ");
        DenseMatrix::from_fn(2 * n, |i, j| {
            let blk = match (i < n, j < n) {
                (true, true) => a,
                (true, false) => b,
                (false, true) => c,
                (false, false) => d,
            };
            blk[(i % n, j % n)]
        })
    }

    pub fn norm_inf(&self) -> f64 {
        self.data
            .chunks(self.n.max(1))
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_one(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Plain-text dump: one row per line, entries as `re,im` separated by spaces.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for row in self.data.chunks(self.n.max(1)) {
            let line: Vec<String> = row
                .iter()
                .map(|z| format!("{:.17e},{:.17e}", z.re, z.im))
                .collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionWarning {
    /// Estimate of the 1-norm condition number.
    pub estimate: f64,
}

#[derive(Clone, Debug)]
pub struct LuSolution {
    pub x: Vec<Complex64>,
    pub warning: Option<ConditionWarning>,
}

/// P A = L U, with L unit lower triangular, stored in place.
#[derive(Clone, Debug)]
pub struct LuFactorization {
    n: usize,
    lu: Vec<Complex64>,
    /// row `i` of P A is row `perm[i]` of A
    perm: Vec<usize>,
    norm_one: f64,
    pivot_growth: f64,
}

impl LuFactorization {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        Self::with_execution(a, Execution::default())
    }

    pub fn with_execution(a: &DenseMatrix, exec: Execution) -> Result<Self> {
        let n = a.n;
        if n == 0 {
            return Err(Error::InvalidParameter("empty matrix".into()));
        }
        if !a.is_finite() {
            return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
        }
        let max_a = a.max_abs();
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut max_u: f64 = 0.0;

        for k in 0..n {
            let (mut p, mut best) = (k, 0.0);
            for i in k..n {
                let v = lu[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::Singular {
                    step: k + 1,
                    hint: String::new(),
                });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let (head, tail) = lu.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..];
            max_u = pivot_row[k..].iter().map(|z| z.norm()).fold(max_u, f64::max);
            let inv_pivot = pivot_row[k].inv();
            eliminate_below(exec, tail, pivot_row, n, k, inv_pivot);
        }

        Ok(LuFactorization {
            n,
            lu,
            perm,
            norm_one: a.norm_one(),
            pivot_growth: if max_a > 0.0 { max_u / max_a } else { 1.0 },
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// max |U_ij| / max |A_ij|
    pub fn pivot_growth(&self) -> f64 {
        self.pivot_growth
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// (L, U) as separate dense matrices.
    pub fn factors(&self) -> (DenseMatrix, DenseMatrix) {
        let n = self.n;
        let l = DenseMatrix::from_fn(n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.lu[i * n + j],
            std::cmp::Ordering::Equal => Complex64::new(1.0, 0.0),
            std::cmp::Ordering::Less => Complex64::new(0.0, 0.0),
        });
        let u = DenseMatrix::from_fn(n, |i, j| {
            if i <= j {
                self.lu[i * n + j]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        (l, u)
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: b.len(),
            });
        }
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: Complex64 = row.iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let s: Complex64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - s) / row[i];
        }
        Ok(x)
    }

    pub fn solve_many(&self, rhs: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
        rhs.iter().map(|b| self.solve(b)).collect()
    }

    /// Solve A^H z = c.
    fn solve_adjoint(&self, c: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        // U^H w = c (forward)
        let mut w = c.to_vec();
        for i in 0..n {
            let mut s = w[i];
            for j in 0..i {
                s -= self.lu[j * n + i].conj() * w[j];
            }
            w[i] = s / self.lu[i * n + i].conj();
        }
        // L^H v = w (backward, unit diagonal)
        for i in (0..n).rev() {
            let mut s = w[i];
            for j in i + 1..n {
                s -= self.lu[j * n + i].conj() * w[j];
            }
            w[i] = s;
        }
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        for (i, &p) in self.perm.iter().enumerate() {
            z[p] = w[i];
        }
        z
    }

    /// Hager/Higham estimate of ||A||_1 ||A^-1||_1.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.n;
        let one_norm = |v: &[Complex64]| v.iter().map(|z| z.norm()).sum::<f64>();
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut estimate = 0.0;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = match self.solve(&x) {
                Ok(y) => y,
                Err(_) => return f64::INFINITY,
            };
            estimate = one_norm(&y);
            let xi: Vec<Complex64> = y
                .iter()
                .map(|z| {
                    let r = z.norm();
                    if r > 0.0 {
                        z / r
                    } else {
                        Complex64::new(1.0, 0.0)
                    }
                })
                .collect();
            let z = self.solve_adjoint(&xi);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(j, v)| (j, v.norm()))
                .fold((0, 0.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            last_j = j;
            x = vec![Complex64::new(0.0, 0.0); n];
            x[j] = Complex64::new(1.0, 0.0);
        }
        // alternating-sign probe guards against the estimator's blind spots
        let denom = (n.max(2) - 1) as f64;
        let alt: Vec<Complex64> = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(s * (1.0 + i as f64 / denom), 0.0)
            })
            .collect();
        if let Ok(y) = self.solve(&alt) {
            estimate = f64::max(estimate, 2.0 * one_norm(&y) / (3.0 * n as f64));
        }
        estimate * self.norm_one
    }
}

fn eliminate_below(
    exec: Execution,
    tail: &mut [Complex64],
    pivot_row: &[Complex64],
    n: usize,
    k: usize,
    inv_pivot: Complex64,
) {
    let update = |row: &mut [Complex64]| {
        let l = row[k] * inv_pivot;
        row[k] = l;
        if l.re == 0.0 && l.im == 0.0 {
            return;
        }
        for (a, u) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..n]) {
            *a -= l * u;
        }
    };
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && tail.len() >= 64 * n {
        use rayon::prelude::*;
        tail.par_chunks_mut(n).for_each(update);
        return;
    }
    let _ = exec;
    tail.chunks_mut(n).for_each(update);
}

/// Factor and solve in one call, attaching a condition warning when the
/// estimate exceeds [`CONDITION_WARNING_THRESHOLD`].
pub fn lu_solve(a: &DenseMatrix, b: &[Complex64]) -> Result<LuSolution> {
    let lu = LuFactorization::new(a)?;
    let x = lu.solve(b)?;
    Ok(LuSolution {
        x,
        warning: condition_warning(&lu),
    })
}

pub fn condition_warning(lu: &LuFactorization) -> Option<ConditionWarning> {
    let estimate = lu.condition_estimate();
    (estimate > CONDITION_WARNING_THRESHOLD).then_some(ConditionWarning { estimate })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_returns_rhs() {
        let a = DenseMatrix::identity(5);
        let b: Vec<_> = (0..5).map(|i| c(i as f64, -(i as f64))).collect();
        let s = lu_solve(&a, &b).unwrap();
        assert_eq!(s.x, b);
        assert!(s.warning.is_none());
    }

    #[test]
    fn diagonal_two_by_two() {
        let a = DenseMatrix::from_row_major(2, vec![c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)])
            .unwrap();
        let s = lu_solve(&a, &[c(0.0, 1.0), c(4.0, 0.0)]).unwrap();
        assert!((s.x[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((s.x[1] - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_column_is_singular_with_step() {
        let mut a = DenseMatrix::identity(4);
        a[(2, 2)] = c(0.0, 0.0);
        match LuFactorization::new(&a) {
            Err(Error::Singular { step, .. }) => assert_eq!(step, 3),
            other => panic!("expected singular, got {other:?}"),
        }
    }

    #[test]
    fn nearly_singular_warns() {
        let mut a = DenseMatrix::identity(3);
        a[(2, 2)] = c(1e-14, 0.0);
        let s = lu_solve(&a, &[c(1.0, 0.0); 3]).unwrap();
        let w = s.warning.expect("warning");
        assert!(w.estimate > 1e13);
    }

    #[test]
    fn condition_estimate_of_diagonal() {
        let a = DenseMatrix::from_fn(4, |i, j| if i == j { c((i + 1) as f64, 0.0) } else { c(0.0, 0.0) });
        let lu = LuFactorization::new(&a).unwrap();
        assert!((lu.condition_estimate() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_wrong_rhs_length() {
        let lu = LuFactorization::new(&DenseMatrix::identity(3)).unwrap();
        assert!(matches!(lu.solve(&[c(1.0, 0.0)]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn block_assembly() {
        let a = DenseMatrix::identity(2);
        let mut b = DenseMatrix::zeros(2);
        b[(0, 1)] = c(3.0, 0.0);
        let m = DenseMatrix::from_blocks(&a, &b, &b, &a);
        assert_eq!(m.dim(), 4);
        assert_eq!(m[(0, 3)], c(3.0, 0.0));
        assert_eq!(m[(2, 1)], c(3.0, 0.0));
        assert_eq!(m[(3, 3)], c(1.0, 0.0));
    }

    #[test]
    fn text_dump_format() {
        let a = DenseMatrix::from_row_major(1, vec![c(1.5, -2.0)]).unwrap();
        let mut out = Vec::new();
        a.write_text(&mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        let (re, im) = s.trim().split_once(',').unwrap();
        assert_eq!(re.parse::<f64>().unwrap(), 1.5);
        assert_eq!(im.parse::<f64>().unwrap(), -2.0);
    }
}
