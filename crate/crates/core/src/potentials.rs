//! Discrete layer potentials, the discrete representation formula and the
//! analytic fields used as data.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indices, Execution};
use crate::geometry::{GridGeometry, Vec2};
use crate::special_fn::{hankel1_0, hankel1_0_unchecked, hankel1_1, hankel1_1_unchecked};

const QUARTER_I: Complex64 = Complex64::new(0.0, 0.25);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensityKind {
    /// h-scaled coefficients on the companion grid (input of S, V, J).
    Charge,
    /// Pointwise values on the main grid (input of D, K, W).
    Dipole,
}

impl DensityKind {
    pub fn name(self) -> &'static str {
        match self {
            DensityKind::Charge => "charge",
            DensityKind::Dipole => "dipole",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Density {
    pub coeffs: Vec<Complex64>,
    pub kind: DensityKind,
}

impl Density {
    pub fn charge(coeffs: Vec<Complex64>) -> Self {
        Density {
            coeffs,
            kind: DensityKind::Charge,
        }
    }

    pub fn dipole(coeffs: Vec<Complex64>) -> Self {
        Density {
            coeffs,
            kind: DensityKind::Dipole,
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn expect(&self, kind: DensityKind, grid: &GridGeometry) -> Result<()> {
        if self.kind != kind {
            return Err(Error::DensityKind {
                expected: kind.name(),
                found: self.kind.name(),
            });
        }
        if self.coeffs.len() != grid.len() {
            return Err(Error::Dimension {
                expected: grid.len(),
                found: self.coeffs.len(),
            });
        }
        Ok(())
    }
}

/// Analytic Helmholtz fields used as incident waves and manufactured solutions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum IncidentField {
    /// H0(k |z - x0|)
    PointSource { x0: Vec2, k: f64 },
    /// exp(i k d.z), |d| = 1
    PlaneWave { d: Vec2, k: f64 },
}

impl IncidentField {
    pub fn point_source(x0: Vec2, k: f64) -> Result<Self> {
        check_wavenumber(k)?;
        Ok(IncidentField::PointSource { x0, k })
    }

    /// Plane wave travelling along `d`; `d` must have unit length.
    pub fn plane_wave(d: Vec2, k: f64) -> Result<Self> {
        check_wavenumber(k)?;
        if (d.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "plane-wave direction {d} must have unit length"
            )));
        }
        Ok(IncidentField::PlaneWave { d, k })
    }

    pub fn k(&self) -> f64 {
        match *self {
            IncidentField::PointSource { k, .. } | IncidentField::PlaneWave { k, .. } => k,
        }
    }

    pub fn value(&self, z: Vec2) -> Result<Complex64> {
        match *self {
            IncidentField::PointSource { x0, k } => hankel1_0(k * (z - x0).norm()),
            IncidentField::PlaneWave { d, k } => Ok(Complex64::new(0.0, k * d.dot(z)).exp()),
        }
    }

    /// (dU/dx, dU/dy)
    pub fn gradient(&self, z: Vec2) -> Result<[Complex64; 2]> {
        match *self {
            IncidentField::PointSource { x0, k } => {
                let dz = z - x0;
                let r = dz.norm();
                let f = hankel1_1(k * r)? * (-k / r);
                Ok([f * dz.x, f * dz.y])
            }
            IncidentField::PlaneWave { d, k } => {
                let f = Complex64::new(0.0, k) * Complex64::new(0.0, k * d.dot(z)).exp();
                Ok([f * d.x, f * d.y])
            }
        }
    }

    /// grad U(z) . v
    pub fn normal_derivative(&self, z: Vec2, v: Vec2) -> Result<Complex64> {
        let g = self.gradient(z)?;
        Ok(g[0] * v.x + g[1] * v.y)
    }
}

fn check_wavenumber(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("wavenumber k = {k} must be positive")))
    }
}

/// Cauchy data vectors of a field on the grids:
/// beta0_j = U(m_j), beta1_j = grad U(m_j^eps) . n_j^eps.
pub fn incident_traces(field: &IncidentField, grid: &GridGeometry) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let on_curve = |_| Error::InvalidParameter("field source lies on the boundary".into());
    let beta0 = grid
        .main()
        .m
        .iter()
        .map(|&m| field.value(m).map_err(on_curve))
        .collect::<Result<Vec<_>>>()?;
    let c = grid.companion();
    let beta1 = c
        .m
        .iter()
        .zip(&c.n)
        .map(|(&m, &n)| field.normal_derivative(m, n).map_err(on_curve))
        .collect::<Result<Vec<_>>>()?;
    Ok((beta0, beta1))
}

/// Minimum admissible distance from an observation point to the source nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Clearance {
    /// factor * h * max|x'|, the factor times one cell length
    Scaled(f64),
    Absolute(f64),
}

impl Default for Clearance {
    fn default() -> Self {
        Clearance::Scaled(10.0)
    }
}

impl Clearance {
    pub const NONE: Clearance = Clearance::Absolute(0.0);

    pub fn distance(&self, grid: &GridGeometry) -> f64 {
        match *self {
            Clearance::Scaled(f) => f * grid.cell_length(),
            Clearance::Absolute(d) => d,
        }
    }
}

/// Reject `z` if it is within the clearance of any main or companion node.
pub fn check_clearance(grid: &GridGeometry, z: Vec2, clearance: Clearance) -> Result<()> {
    let limit = clearance.distance(grid);
    let (mut node, mut best) = (0, f64::INFINITY);
    for pts in [&grid.main().m, &grid.companion().m] {
        for (j, &p) in pts.iter().enumerate() {
            let d = (z - p).norm();
            if d < best {
                best = d;
                node = j;
            }
        }
    }
    if best > limit {
        Ok(())
    } else {
        Err(Error::Clearance {
            x: z.x,
            y: z.y,
            node: node + 1,
            distance: best,
            clearance: limit,
        })
    }
}

/// Single layer sum over companion nodes; caller has checked clearance.
fn s_sum(grid: &GridGeometry, k: f64, eta: &[Complex64], z: Vec2) -> Complex64 {
    let me = &grid.companion().m;
    let s: Complex64 = me
        .iter()
        .zip(eta)
        .map(|(&p, &c)| hankel1_0_unchecked(k * (z - p).norm()) * c)
        .sum();
    QUARTER_I * s
}

/// Double layer sum over main nodes; caller has checked clearance.
fn d_sum(grid: &GridGeometry, k: f64, psi: &[Complex64], z: Vec2) -> Complex64 {
    let g = grid.main();
    let s: Complex64 = g
        .m
        .iter()
        .zip(&g.n)
        .zip(psi)
        .map(|((&p, &n), &c)| {
            let dz = z - p;
            let r = dz.norm();
            hankel1_1_unchecked(k * r) * (dz.dot(n) / r) * c
        })
        .sum();
    QUARTER_I * k * s
}

/// S_h(z) eta = sum_j (i/4) H0(k |z - m_j^eps|) eta_j
pub fn eval_s(grid: &GridGeometry, k: f64, eta: &Density, z: Vec2, clearance: Clearance) -> Result<Complex64> {
    check_wavenumber(k)?;
    eta.expect(DensityKind::Charge, grid)?;
    check_clearance(grid, z, clearance)?;
    Ok(s_sum(grid, k, &eta.coeffs, z))
}

/// D_h(z) psi = sum_j (ik/4) H1(k |z - m_j|) (z - m_j).n_j / |z - m_j| psi_j
pub fn eval_d(grid: &GridGeometry, k: f64, psi: &Density, z: Vec2, clearance: Clearance) -> Result<Complex64> {
    check_wavenumber(k)?;
    psi.expect(DensityKind::Dipole, grid)?;
    check_clearance(grid, z, clearance)?;
    Ok(d_sum(grid, k, &psi.coeffs, z))
}

/// U_h(z) = D_h(z) phi - S_h(z) lambda
pub fn eval_representation(
    grid: &GridGeometry,
    k: f64,
    phi: &Density,
    lambda: &Density,
    z: Vec2,
    clearance: Clearance,
) -> Result<Complex64> {
    check_wavenumber(k)?;
    phi.expect(DensityKind::Dipole, grid)?;
    lambda.expect(DensityKind::Charge, grid)?;
    check_clearance(grid, z, clearance)?;
    Ok(d_sum(grid, k, &phi.coeffs, z) - s_sum(grid, k, &lambda.coeffs, z))
}

/// A potential ready to be evaluated at many points.
#[derive(Clone, Debug)]
pub struct LayerField<'g> {
    pub grid: &'g GridGeometry,
    pub k: f64,
    /// coefficient of the double layer term (dipole density)
    pub dipole: Option<Density>,
    /// coefficient of the single layer term (charge density)
    pub charge: Option<Density>,
    /// overall factors: value = dipole_scale D psi + charge_scale S eta
    pub dipole_scale: Complex64,
    pub charge_scale: Complex64,
}

impl<'g> LayerField<'g> {
    pub fn single(grid: &'g GridGeometry, k: f64, eta: Density, scale: Complex64) -> Result<Self> {
        check_wavenumber(k)?;
        eta.expect(DensityKind::Charge, grid)?;
        Ok(LayerField {
            grid,
            k,
            dipole: None,
            charge: Some(eta),
            dipole_scale: Complex64::new(0.0, 0.0),
            charge_scale: scale,
        })
    }

    pub fn double(grid: &'g GridGeometry, k: f64, psi: Density, scale: Complex64) -> Result<Self> {
        check_wavenumber(k)?;
        psi.expect(DensityKind::Dipole, grid)?;
        Ok(LayerField {
            grid,
            k,
            dipole: Some(psi),
            charge: None,
            dipole_scale: scale,
            charge_scale: Complex64::new(0.0, 0.0),
        })
    }

    /// D phi - S lambda
    pub fn representation(grid: &'g GridGeometry, k: f64, phi: Density, lambda: Density) -> Result<Self> {
        Self::combined(grid, k, phi, Complex64::new(1.0, 0.0), lambda, Complex64::new(-1.0, 0.0))
    }

    pub fn combined(
        grid: &'g GridGeometry,
        k: f64,
        psi: Density,
        dipole_scale: Complex64,
        eta: Density,
        charge_scale: Complex64,
    ) -> Result<Self> {
        check_wavenumber(k)?;
        psi.expect(DensityKind::Dipole, grid)?;
        eta.expect(DensityKind::Charge, grid)?;
        Ok(LayerField {
            grid,
            k,
            dipole: Some(psi),
            charge: Some(eta),
            dipole_scale,
            charge_scale,
        })
    }

    pub fn eval(&self, z: Vec2, clearance: Clearance) -> Result<Complex64> {
        check_clearance(self.grid, z, clearance)?;
        let mut v = Complex64::new(0.0, 0.0);
        if let Some(psi) = &self.dipole {
            v += self.dipole_scale * d_sum(self.grid, self.k, &psi.coeffs, z);
        }
        if let Some(eta) = &self.charge {
            v += self.charge_scale * s_sum(self.grid, self.k, &eta.coeffs, z);
        }
        Ok(v)
    }

    /// Evaluate at many points; each point succeeds or fails independently.
    pub fn eval_many(&self, points: &[Vec2], clearance: Clearance, exec: Execution) -> Vec<Result<Complex64>> {
        map_indices(exec, points.len(), |i| self.eval(points[i], clearance))
    }
}

/// Rectangular lattice of observation points, row by row in y then x.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Lattice {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64, nx: usize, ny: usize) -> Result<Self> {
        let l = Lattice {
            xmin,
            xmax,
            ymin,
            ymax,
            nx,
            ny,
        };
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidParameter("lattice needs nx, ny >= 1".into()));
        }
        if !(xmin <= xmax && ymin <= ymax) || ![xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("lattice bounds must be finite and ordered".into()));
        }
        Ok(l)
    }

    fn coord(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
        if n == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    }

    pub fn points(&self) -> Vec<Vec2> {
        let mut pts = Vec::with_capacity(self.nx * self.ny);
        for iy in 0..self.ny {
            let y = Self::coord(self.ymin, self.ymax, self.ny, iy);
            for ix in 0..self.nx {
                pts.push(Vec2::new(Self::coord(self.xmin, self.xmax, self.nx, ix), y));
            }
        }
        pts
    }
}

/// CSV with header `x,y,re,im`; missing values leave `re,im` empty.
pub fn write_field_csv<W: Write>(mut w: W, points: &[Vec2], values: &[Option<Complex64>]) -> Result<()> {
    if points.len() != values.len() {
        return Err(Error::Dimension {
            expected: points.len(),
            found: values.len(),
        });
    }
    writeln!(w, "x,y,re,im")?;
    for (p, v) in points.iter().zip(values) {
        match v {
            Some(v) => writeln!(w, "{:e},{:e},{:e},{:e}", p.x, p.y, v.re, v.im)?,
            None => writeln!(w, "{:e},{:e},,", p.x, p.y)?,
        }
    }
    Ok(())
}
