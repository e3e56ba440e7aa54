//! Direct and indirect boundary-integral methods, the transmission solver and
//! the Burton–Miller solver, all on the staggered Nyström matrices.
//!
//! Data vectors follow the grid conventions: `beta0_j` is a trace value at the
//! main midpoint `m_j`; `beta1_j = grad U(m_j^eps) . n_j^eps` is a normal
//! derivative at the companion midpoint, scaled by `h` through `n_j^eps`.
//! Dividing a charge-type vector by `h_j` gives pointwise flux values.
//!
//! Burton–Miller: the combined system `(I/2 + J + c V) xi = beta1 + c beta0`
//! mixes `J` rows (h-scaled) with `V` rows (pointwise), so its effective
//! continuous coupling is `c / h`. The exact density satisfies both component
//! equations, so the mixing does not change the limit; it only affects the
//! conditioning and the pre-asymptotic error. [`BmScaling::MeshScaled`] uses
//! `c h` instead, which restores coupling `c` at the continuous level.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GridGeometry;
use crate::linsolve::{condition_warning, ConditionWarning, DenseMatrix, LuFactorization};
use crate::operators::OperatorSet;
use crate::potentials::{Density, IncidentField, LayerField};

const HALF: Complex64 = Complex64::new(0.5, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// The eight single-equation methods. `d`/`i`: direct/indirect,
/// `D`/`N`: Dirichlet/Neumann data, `01`/`02`: first/second Calderón row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "dD01")]
    DD01,
    #[serde(rename = "dD02")]
    DD02,
    #[serde(rename = "dN01")]
    DN01,
    #[serde(rename = "dN02")]
    DN02,
    #[serde(rename = "iD01")]
    ID01,
    #[serde(rename = "iD02")]
    ID02,
    #[serde(rename = "iN01")]
    IN01,
    #[serde(rename = "iN02")]
    IN02,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::DD01,
        Method::DD02,
        Method::DN01,
        Method::DN02,
        Method::ID01,
        Method::ID02,
        Method::IN01,
        Method::IN02,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::DD01 => "dD01",
            Method::DD02 => "dD02",
            Method::DN01 => "dN01",
            Method::DN02 => "dN02",
            Method::ID01 => "iD01",
            Method::ID02 => "iD02",
            Method::IN01 => "iN01",
            Method::IN02 => "iN02",
        }
    }

    pub fn is_direct(self) -> bool {
        matches!(self, Method::DD01 | Method::DD02 | Method::DN01 | Method::DN02)
    }

    /// Dirichlet data (trace given) as opposed to Neumann data.
    pub fn is_dirichlet(self) -> bool {
        matches!(self, Method::DD01 | Method::DD02 | Method::ID01 | Method::ID02)
    }

    /// Which interior eigenvalue family makes the system matrix singular.
    fn resonance_family(self) -> &'static str {
        match self {
            // V, -I/2 + K, -I/2 + J
            Method::DD01 | Method::ID01 | Method::DN01 | Method::IN01 => "Dirichlet",
            // I/2 + J, I/2 + K, W
            Method::DD02 | Method::ID02 | Method::DN02 | Method::IN02 => "Neumann",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum BmScaling {
    /// (I/2 + J + c V) xi = beta1 + c beta0
    #[default]
    Unscaled,
    /// (I/2 + J + c h V) xi = beta1 + c h beta0
    MeshScaled,
}

/// What to solve, with the parameters each problem needs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ProblemSpec {
    Boundary {
        method: Method,
        k: f64,
    },
    /// Exterior wavenumber `k`, interior `k / c`, flux ratio `alpha`.
    Transmission {
        k: f64,
        c: f64,
        alpha: f64,
    },
    BurtonMiller {
        k: f64,
        coupling: Complex64,
        scaling: BmScaling,
    },
}

impl ProblemSpec {
    pub fn k(&self) -> f64 {
        match *self {
            ProblemSpec::Boundary { k, .. }
            | ProblemSpec::Transmission { k, .. }
            | ProblemSpec::BurtonMiller { k, .. } => k,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} = {v} must be positive")))
            }
        };
        positive("k", self.k())?;
        match *self {
            ProblemSpec::Transmission { c, alpha, .. } => {
                positive("c", c)?;
                positive("alpha", alpha)
            }
            ProblemSpec::BurtonMiller { coupling, .. } => {
                if coupling.re.is_finite() && coupling.im.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("coupling must be finite".into()))
                }
            }
            ProblemSpec::Boundary { .. } => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            ProblemSpec::Boundary { method, .. } => method.name().to_string(),
            ProblemSpec::Transmission { .. } => "transmission".into(),
            ProblemSpec::BurtonMiller { .. } => "burton_miller".into(),
        }
    }
}

/// Sampled Cauchy data: `beta0` at main midpoints, `beta1` h-scaled at
/// companion midpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct CauchyData {
    pub beta0: Vec<Complex64>,
    pub beta1: Vec<Complex64>,
}

impl CauchyData {
    pub fn from_field(field: &IncidentField, grid: &GridGeometry) -> Result<Self> {
        let (beta0, beta1) = crate::potentials::incident_traces(field, grid)?;
        Ok(CauchyData { beta0, beta1 })
    }

    pub fn zeros(n: usize) -> Self {
        CauchyData {
            beta0: vec![Complex64::new(0.0, 0.0); n],
            beta1: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        for v in [&self.beta0, &self.beta1] {
            if v.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub pivot_growth: f64,
    pub condition_warning: Option<ConditionWarning>,
}

#[derive(Clone, Debug)]
pub struct Solution<'g> {
    pub problem: ProblemSpec,
    /// The solved vector (phi, lambda, psi, eta or xi), typed by grid.
    pub unknown: Density,
    /// Exterior trace at main midpoints: given, solved, or recovered.
    pub phi: Vec<Complex64>,
    /// Exterior h-scaled normal derivative at companion midpoints.
    pub lambda: Vec<Complex64>,
    /// Discrete exterior field.
    pub exterior: LayerField<'g>,
    /// Discrete interior field (transmission only).
    pub interior: Option<LayerField<'g>>,
    /// Interior Cauchy data (phi^-, lambda^-) for transmission.
    pub interior_data: Option<(Vec<Complex64>, Vec<Complex64>)>,
    pub diagnostics: Diagnostics,
}

impl Solution<'_> {
    pub fn grid(&self) -> &GridGeometry {
        self.exterior.grid
    }
}

fn resonance_hint(family: &str) -> String {
    format!(
        "; k^2 may be an interior {family} eigenvalue of -Laplace (resonant wavenumber), \
         try a slightly different k"
    )
}

fn solve_system(a: &DenseMatrix, b: &[Complex64], hint: &str) -> Result<(Vec<Complex64>, Diagnostics)> {
    let lu = LuFactorization::new(a).map_err(|e| match e {
        Error::Singular { step, .. } => Error::Singular {
            step,
            hint: hint.to_string(),
        },
        other => other,
    })?;
    let x = lu.solve(b)?;
    if x.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Singular {
            step: a.dim(),
            hint: hint.to_string(),
        });
    }
    Ok((
        x,
        Diagnostics {
            pivot_growth: lu.pivot_growth(),
            condition_warning: condition_warning(&lu),
        },
    ))
}

/// a + s I
fn shifted(a: &DenseMatrix, s: f64) -> DenseMatrix {
    let mut m = a.clone();
    m.add_diagonal(Complex64::new(s, 0.0));
    m
}

fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    x.iter().zip(y).map(|(x, y)| alpha * x + y).collect()
}

fn neg(v: Vec<Complex64>) -> Vec<Complex64> {
    v.into_iter().map(|z| -z).collect()
}

/// Dispatch a single-equation method to [`solve_direct`] or [`solve_indirect`].
pub fn solve_boundary<'g>(ops: &OperatorSet<'g>, method: Method, data: &CauchyData) -> Result<Solution<'g>> {
    if method.is_direct() {
        solve_direct(ops, method, data)
    } else {
        solve_indirect(ops, method, data)
    }
}

/// Direct methods: the unknown is the missing Cauchy datum and the field is
/// `U_h = D_h phi - S_h lambda`.
pub fn solve_direct<'g>(ops: &OperatorSet<'g>, method: Method, data: &CauchyData) -> Result<Solution<'g>> {
    if !method.is_direct() {
        return Err(Error::InvalidParameter(format!("{method} is not a direct method")));
    }
    let n = ops.n();
    data.check(n)?;
    let hint = resonance_hint(method.resonance_family());
    let (phi, lambda, diagnostics, unknown_is_lambda) = match method {
        Method::DD01 => {
            // V lambda = (-I/2 + K) beta0
            let rhs = shifted(&ops.kh, -0.5).matvec(&data.beta0);
            let (x, d) = solve_system(&ops.vh, &rhs, &hint)?;
            (data.beta0.clone(), x, d, true)
        }
        Method::DD02 => {
            // (I/2 + J) lambda = -W beta0
            let rhs = neg(ops.wh.matvec(&data.beta0));
            let (x, d) = solve_system(&shifted(&ops.jh, 0.5), &rhs, &hint)?;
            (data.beta0.clone(), x, d, true)
        }
        Method::DN01 => {
            // (-I/2 + K) phi = V beta1
            let rhs = ops.vh.matvec(&data.beta1);
            let (x, d) = solve_system(&shifted(&ops.kh, -0.5), &rhs, &hint)?;
            (x, data.beta1.clone(), d, false)
        }
        Method::DN02 => {
            // -W phi = (I/2 + J) beta1
            let rhs = shifted(&ops.jh, 0.5).matvec(&data.beta1);
            let mut m = ops.wh.clone();
            m.scale(-ONE);
            let (x, d) = solve_system(&m, &rhs, &hint)?;
            (x, data.beta1.clone(), d, false)
        }
        _ => unreachable!(),
    };
    let unknown = if unknown_is_lambda {
        Density::charge(lambda.clone())
    } else {
        Density::dipole(phi.clone())
    };
    let exterior = LayerField::representation(ops.grid, ops.k, Density::dipole(phi.clone()), Density::charge(lambda.clone()))?;
    Ok(Solution {
        problem: ProblemSpec::Boundary { method, k: ops.k },
        unknown,
        phi,
        lambda,
        exterior,
        interior: None,
        interior_data: None,
        diagnostics,
    })
}

/// Indirect methods: the unknown is a layer density and the field is a
/// single (`U_h = S_h eta`) or double (`U_h = D_h psi`) layer. The missing
/// Cauchy datum is recovered from the density through the jump relations.
pub fn solve_indirect<'g>(ops: &OperatorSet<'g>, method: Method, data: &CauchyData) -> Result<Solution<'g>> {
    if method.is_direct() {
        return Err(Error::InvalidParameter(format!("{method} is not an indirect method")));
    }
    let n = ops.n();
    data.check(n)?;
    let hint = resonance_hint(method.resonance_family());
    let (grid, k) = (ops.grid, ops.k);
    let sol = match method {
        Method::ID01 => {
            // V eta = beta0
            let (eta, d) = solve_system(&ops.vh, &data.beta0, &hint)?;
            let lambda = shifted(&ops.jh, -0.5).matvec(&eta);
            (Density::charge(eta), data.beta0.clone(), lambda, d)
        }
        Method::ID02 => {
            // (I/2 + K) psi = beta0
            let (psi, d) = solve_system(&shifted(&ops.kh, 0.5), &data.beta0, &hint)?;
            let lambda = neg(ops.wh.matvec(&psi));
            (Density::dipole(psi), data.beta0.clone(), lambda, d)
        }
        Method::IN01 => {
            // (-I/2 + J) eta = beta1
            let (eta, d) = solve_system(&shifted(&ops.jh, -0.5), &data.beta1, &hint)?;
            let phi = ops.vh.matvec(&eta);
            (Density::charge(eta), phi, data.beta1.clone(), d)
        }
        Method::IN02 => {
            // W psi = -beta1
            let rhs = neg(data.beta1.clone());
            let (psi, d) = solve_system(&ops.wh, &rhs, &hint)?;
            let phi = shifted(&ops.kh, 0.5).matvec(&psi);
            (Density::dipole(psi), phi, data.beta1.clone(), d)
        }
        _ => unreachable!(),
    };
    let (unknown, phi, lambda, diagnostics) = sol;
    let exterior = match unknown.kind {
        crate::potentials::DensityKind::Charge => LayerField::single(grid, k, unknown.clone(), ONE)?,
        crate::potentials::DensityKind::Dipole => LayerField::double(grid, k, unknown.clone(), ONE)?,
    };
    Ok(Solution {
        problem: ProblemSpec::Boundary { method, k },
        unknown,
        phi,
        lambda,
        exterior,
        interior: None,
        interior_data: None,
        diagnostics,
    })
}

/// Transmission problem: exterior field U at wavenumber `k`, interior field V
/// at `k / c`, with jumps `V - U = beta0` and `alpha dV/dn - dU/dn = beta1`
/// across the boundary. `ext` and `int` are the operator sets at `k` and
/// `k / c` on the same grid. Unknowns are the interior Cauchy data
/// `(phi^-, lambda^-)` with `lambda^-` approximating `alpha dV/dn`.
pub fn solve_transmission<'g>(
    ext: &OperatorSet<'g>,
    int: &OperatorSet<'g>,
    alpha: f64,
    data: &CauchyData,
) -> Result<Solution<'g>> {
    if !std::ptr::eq(ext.grid, int.grid) {
        return Err(Error::InvalidParameter("transmission operators on different grids".into()));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must be positive")));
    }
    let n = ext.n();
    data.check(n)?;
    let a = Complex64::new(alpha, 0.0);

    let mut a11 = ext.wh.clone();
    a11.add_scaled(a, &int.wh);
    let mut a12 = ext.jh.clone();
    a12.add_scaled(ONE, &int.jh);
    let mut a21 = ext.kh.clone();
    a21.add_scaled(ONE, &int.kh);
    a21.scale(-ONE);
    let mut a22 = ext.vh.clone();
    a22.add_scaled(a.inv(), &int.vh);
    let system = DenseMatrix::from_blocks(&a11, &a12, &a21, &a22);

    // [[W, I/2 + J], [I/2 - K, V]] (beta0, beta1) at the exterior wavenumber
    let j_half = shifted(&ext.jh, 0.5);
    let mut k_half = ext.kh.clone();
    k_half.scale(-ONE);
    k_half.add_diagonal(HALF);
    let top = axpy(ONE, &ext.wh.matvec(&data.beta0), &j_half.matvec(&data.beta1));
    let bottom = axpy(ONE, &k_half.matvec(&data.beta0), &ext.vh.matvec(&data.beta1));
    let rhs: Vec<Complex64> = top.into_iter().chain(bottom).collect();

    let hint = "; the transmission system is singular, check k, c and alpha for a resonance".to_string();
    let (x, diagnostics) = solve_system(&system, &rhs, &hint)?;
    let phi_int = x[..n].to_vec();
    let lambda_int = x[n..].to_vec();

    let grid = ext.grid;
    // U = D_k (phi^- - beta0) - S_k (lambda^- - beta1)
    let phi_ext = sub(&phi_int, &data.beta0);
    let lambda_ext = sub(&lambda_int, &data.beta1);
    let exterior = LayerField::representation(
        grid,
        ext.k,
        Density::dipole(phi_ext.clone()),
        Density::charge(lambda_ext.clone()),
    )?;
    // V = alpha^-1 S_{k/c} lambda^- - D_{k/c} phi^-
    let interior = LayerField::combined(
        grid,
        int.k,
        Density::dipole(phi_int.clone()),
        -ONE,
        Density::charge(lambda_int.clone()),
        a.inv(),
    )?;
    Ok(Solution {
        problem: ProblemSpec::Transmission {
            k: ext.k,
            c: ext.k / int.k,
            alpha,
        },
        unknown: Density::dipole(x),
        phi: phi_ext,
        lambda: lambda_ext,
        exterior,
        interior: Some(interior),
        interior_data: Some((phi_int, lambda_int)),
        diagnostics,
    })
}

/// Sound-soft scattering by the combined-field equation
/// `(I/2 + J + c V) xi = beta1 + c beta0` with data from the incident wave.
/// The scattered field is `U_h = -S_h xi`; `lambda = xi - beta1` approximates
/// the h-scaled normal derivative of the scattered field.
pub fn solve_burton_miller<'g>(
    ops: &OperatorSet<'g>,
    coupling: Complex64,
    scaling: BmScaling,
    incident: &CauchyData,
) -> Result<Solution<'g>> {
    let n = ops.n();
    incident.check(n)?;
    if !(coupling.re.is_finite() && coupling.im.is_finite()) {
        return Err(Error::InvalidParameter("coupling must be finite".into()));
    }
    let grid = ops.grid;
    let mut m = shifted(&ops.jh, 0.5);
    let mut rhs = incident.beta1.clone();
    for j in 0..n {
        let c = match scaling {
            BmScaling::Unscaled => coupling,
            BmScaling::MeshScaled => coupling * grid.h(j),
        };
        for (a, v) in m.data_mut()[j * n..(j + 1) * n].iter_mut().zip(ops.vh.row(j)) {
            *a += c * v;
        }
        rhs[j] += c * incident.beta0[j];
    }
    let hint = "; the combined-field matrix is singular, adjust the coupling parameter".to_string();
    let (xi, diagnostics) = solve_system(&m, &rhs, &hint)?;
    let lambda = sub(&xi, &incident.beta1);
    let phi = neg(incident.beta0.clone());
    let exterior = LayerField::single(grid, ops.k, Density::charge(xi.clone()), -ONE)?;
    Ok(Solution {
        problem: ProblemSpec::BurtonMiller {
            k: ops.k,
            coupling,
            scaling,
        },
        unknown: Density::charge(xi),
        phi,
        lambda,
        exterior,
        interior: None,
        interior_data: None,
        diagnostics,
    })
}

/// max_j |a_j - b_j|
pub fn max_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// max_j |a_j - b_j| / h_j, the pointwise error of two h-scaled charge vectors.
pub fn max_flux_error(grid: &GridGeometry, a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(grid.mesh_sizes())
        .map(|((x, y), h)| (x - y).norm() / h)
        .fold(0.0, f64::max)
}

/// The error a boundary method is judged by against exact Cauchy data:
/// the datum that was not given (solved or recovered), in max norm.
pub fn density_error(solution: &Solution<'_>, exact: &CauchyData) -> Result<f64> {
    let method = match solution.problem {
        ProblemSpec::Boundary { method, .. } => method,
        _ => return Err(Error::InvalidParameter("density error applies to boundary methods".into())),
    };
    let n = solution.phi.len();
    exact.check(n)?;
    Ok(if method.is_dirichlet() {
        max_flux_error(solution.grid(), &solution.lambda, &exact.beta1)
    } else {
        max_error(&solution.phi, &exact.beta0)
    })
}
