//! Nyström matrices of the discrete single, double, adjoint double and
//! hypersingular layer operators on a staggered pair of grids.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{fill_rows, Execution};
use crate::geometry::{GridGeometry, Vec2};
use crate::linsolve::DenseMatrix;
use crate::special_fn::{hankel1_0_unchecked, hankel1_1_unchecked};

const QUARTER_I: Complex64 = Complex64::new(0.0, 0.25);

/// Which node carries the normal in the off-diagonal entries of K and J.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NormalConvention {
    /// K uses `n_j` (integration node), J uses `n_i^eps` (observation node),
    /// matching the continuous kernels.
    #[default]
    Kernel,
    /// K uses `n_i`, J uses `n_j^eps`. Kept for comparison only; the
    /// resulting matrices fail the Calderón consistency check.
    AsPrinted,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AssemblyOptions {
    pub exec: Execution,
    pub normals: NormalConvention,
}

/// The four operator matrices for one grid and wavenumber.
#[derive(Clone, Debug)]
pub struct OperatorSet<'g> {
    pub k: f64,
    pub vh: DenseMatrix,
    pub kh: DenseMatrix,
    pub jh: DenseMatrix,
    pub wh: DenseMatrix,
    /// Breakpoint single layer used inside `wh`.
    pub vtilde: DenseMatrix,
    pub grid: &'g GridGeometry,
}

fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("wavenumber k = {k} must be positive")))
    }
}

#[inline]
fn distance(operator: &'static str, a: Vec2, b: Vec2, i: usize, j: usize) -> Result<f64> {
    let r = (a - b).norm();
    if r > 0.0 {
        Ok(r)
    } else {
        Err(Error::CoincidentPoints {
            operator,
            row: i + 1,
            col: j + 1,
        })
    }
}

fn build(
    n: usize,
    exec: Execution,
    f: impl Fn(usize, &mut [Complex64]) -> Result<()> + Sync + Send,
) -> Result<DenseMatrix> {
    let mut m = DenseMatrix::zeros(n);
    fill_rows(exec, m.data_mut(), n, f)?;
    Ok(m)
}

/// V_ij = (i/4) H0(k |m_i - m_j^eps|)
pub fn assemble_v(grid: &GridGeometry, k: f64, exec: Execution) -> Result<DenseMatrix> {
    check_k(k)?;
    let (m, me) = (&grid.main().m, &grid.companion().m);
    build(grid.len(), exec, |i, row| {
        for (j, out) in row.iter_mut().enumerate() {
            let r = distance("V", m[i], me[j], i, j)?;
            *out = QUARTER_I * hankel1_0_unchecked(k * r);
        }
        Ok(())
    })
}

/// Off-diagonal: (ik/4) H1(k r) (m_i - m_j).n / r with r = |m_i - m_j|;
/// diagonal: s_i.n_i / (4 pi l_i^2).
pub fn assemble_k(
    grid: &GridGeometry,
    k: f64,
    normals: NormalConvention,
    exec: Execution,
) -> Result<DenseMatrix> {
    check_k(k)?;
    let g = grid.main();
    let pre = QUARTER_I * k;
    build(grid.len(), exec, |i, row| {
        for (j, out) in row.iter_mut().enumerate() {
            if i == j {
                *out = Complex64::new(curvature_term(g.s[i], g.n[i], g.ell[i]), 0.0);
                continue;
            }
            let r = distance("K", g.m[i], g.m[j], i, j)?;
            let normal = match normals {
                NormalConvention::Kernel => g.n[j],
                NormalConvention::AsPrinted => g.n[i],
            };
            let proj = (g.m[i] - g.m[j]).dot(normal) / r;
            *out = pre * hankel1_1_unchecked(k * r) * proj;
        }
        Ok(())
    })
}

/// Off-diagonal: (ik/4) H1(k r) (m_j^eps - m_i^eps).n^eps / r on the
/// companion grid; diagonal: s_i^eps.n_i^eps / (4 pi (l_i^eps)^2).
pub fn assemble_j(
    grid: &GridGeometry,
    k: f64,
    normals: NormalConvention,
    exec: Execution,
) -> Result<DenseMatrix> {
    check_k(k)?;
    let g = grid.companion();
    let pre = QUARTER_I * k;
    build(grid.len(), exec, |i, row| {
        for (j, out) in row.iter_mut().enumerate() {
            if i == j {
                *out = Complex64::new(curvature_term(g.s[i], g.n[i], g.ell[i]), 0.0);
                continue;
            }
            let r = distance("J", g.m[i], g.m[j], i, j)?;
            let normal = match normals {
                NormalConvention::Kernel => g.n[i],
                NormalConvention::AsPrinted => g.n[j],
            };
            let proj = (g.m[j] - g.m[i]).dot(normal) / r;
            *out = pre * hankel1_1_unchecked(k * r) * proj;
        }
        Ok(())
    })
}

#[inline]
fn curvature_term(s: Vec2, n: Vec2, ell: f64) -> f64 {
    s.dot(n) / (4.0 * PI * ell * ell)
}

/// Ṽ_ij = (i/4) H0(k |b_i^eps - b_j|)
pub fn assemble_vtilde(grid: &GridGeometry, k: f64, exec: Execution) -> Result<DenseMatrix> {
    check_k(k)?;
    let (be, b) = (&grid.companion().b, &grid.main().b);
    build(grid.len(), exec, |i, row| {
        for (j, out) in row.iter_mut().enumerate() {
            let r = distance("W", be[i], b[j], i, j)?;
            *out = QUARTER_I * hankel1_0_unchecked(k * r);
        }
        Ok(())
    })
}

/// The finite-difference part of W:
/// Ṽ_{n(i),n(j)} + Ṽ_ij - Ṽ_{n(i),j} - Ṽ_{i,n(j)}.
pub fn w_difference_part(grid: &GridGeometry, vtilde: &DenseMatrix, exec: Execution) -> Result<DenseMatrix> {
    let next = grid.next_map();
    build(grid.len(), exec, |i, row| {
        let ni = next[i];
        for (j, out) in row.iter_mut().enumerate() {
            let nj = next[j];
            *out = vtilde[(ni, nj)] + vtilde[(i, j)] - vtilde[(ni, j)] - vtilde[(i, nj)];
        }
        Ok(())
    })
}

/// W_ij = (finite-difference part)_ij - k^2 (n_i^eps . n_j) V_ji
pub fn assemble_w_from(
    grid: &GridGeometry,
    k: f64,
    vtilde: &DenseMatrix,
    v: &DenseMatrix,
    exec: Execution,
) -> Result<DenseMatrix> {
    check_k(k)?;
    let next = grid.next_map();
    let (ne, n) = (&grid.companion().n, &grid.main().n);
    let k2 = k * k;
    build(grid.len(), exec, |i, row| {
        let ni = next[i];
        for (j, out) in row.iter_mut().enumerate() {
            let nj = next[j];
            let fd = vtilde[(ni, nj)] + vtilde[(i, j)] - vtilde[(ni, j)] - vtilde[(i, nj)];
            *out = fd - v[(j, i)] * (k2 * ne[i].dot(n[j]));
        }
        Ok(())
    })
}

pub fn assemble_w(grid: &GridGeometry, k: f64, exec: Execution) -> Result<DenseMatrix> {
    let vtilde = assemble_vtilde(grid, k, exec)?;
    let v = assemble_v(grid, k, exec)?;
    assemble_w_from(grid, k, &vtilde, &v, exec)
}

pub fn assemble_all(grid: &GridGeometry, k: f64) -> Result<OperatorSet<'_>> {
    assemble_all_with(grid, k, AssemblyOptions::default())
}

pub fn assemble_all_with(grid: &GridGeometry, k: f64, opts: AssemblyOptions) -> Result<OperatorSet<'_>> {
    check_k(k)?;
    let vh = assemble_v(grid, k, opts.exec)?;
    let kh = assemble_k(grid, k, opts.normals, opts.exec)?;
    let jh = assemble_j(grid, k, opts.normals, opts.exec)?;
    let vtilde = assemble_vtilde(grid, k, opts.exec)?;
    let wh = assemble_w_from(grid, k, &vtilde, &vh, opts.exec)?;
    Ok(OperatorSet {
        k,
        vh,
        kh,
        jh,
        wh,
        vtilde,
        grid,
    })
}

impl OperatorSet<'_> {
    pub fn n(&self) -> usize {
        self.vh.dim()
    }

    /// Write `V.txt`, `K.txt`, `J.txt`, `W.txt` into `dir`.
    pub fn dump(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, m) in [("V", &self.vh), ("K", &self.kh), ("J", &self.jh), ("W", &self.wh)] {
            let file = std::fs::File::create(dir.join(format!("{name}.txt")))?;
            let mut w = std::io::BufWriter::new(file);
            m.write_text(&mut w)?;
            w.flush()?;
        }
        Ok(())
    }
}
