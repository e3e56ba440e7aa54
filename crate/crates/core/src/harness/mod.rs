//! Convergence studies, field export and the built-in self test.
//!
//! Error columns per problem:
//! - boundary methods: `E_density` (the Cauchy datum that was not given,
//!   flux-type errors divided by `h`) and `E_field` (max over observation
//!   points of the exterior field error); the exact solution is the point
//!   source `H0(k |z - x0|)`.
//! - transmission: `E_lambda`, `E_phi` (interior Cauchy data) and `E_V`
//!   (interior field at the observation points).
//! - Burton–Miller: `E_U` = max |S_h xi - U_inc| at the (interior)
//!   observation points and `E_xi`, the pointwise distance between the
//!   normal derivative recovered from `xi` and the one from dD01.

pub mod config;
pub mod report;
pub mod selftest;

use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

pub use config::{Settings, StudyConfig};
pub use report::{ConvergenceReport, ReportMeta, ReportRow};

use crate::error::{Error, Result};
use crate::exec::try_map;
use crate::geometry::{sample_grids, GridGeometry, Vec2};
use crate::operators::{assemble_all_with, AssemblyOptions, OperatorSet};
use crate::potentials::{write_field_csv, Clearance, IncidentField, Lattice, LayerField};
use crate::solvers::{
    density_error, max_error, max_flux_error, solve_boundary, solve_burton_miller, solve_direct,
    solve_transmission, CauchyData, Method, ProblemSpec, Solution,
};

pub fn error_columns(problem: &ProblemSpec) -> Vec<String> {
    let names: &[&str] = match problem {
        ProblemSpec::Boundary { .. } => &["E_density", "E_field"],
        ProblemSpec::Transmission { .. } => &["E_lambda", "E_phi", "E_V"],
        ProblemSpec::BurtonMiller { .. } => &["E_U", "E_xi"],
    };
    names.iter().map(|s| s.to_string()).collect()
}

pub fn grid_for(cfg: &StudyConfig, n: usize) -> Result<GridGeometry> {
    sample_grids(&[(cfg.curve.clone(), n)], cfg.eps, cfg.sampling)
}

fn assemble<'g>(cfg: &StudyConfig, grid: &'g GridGeometry, k: f64) -> Result<OperatorSet<'g>> {
    assemble_all_with(
        grid,
        k,
        AssemblyOptions {
            exec: cfg.exec,
            normals: cfg.normals,
        },
    )
}

/// max over points of |field(z) - exact(z)|, observation points taken as given.
fn field_error(field: &LayerField<'_>, scale: Complex64, exact: &IncidentField, points: &[Vec2]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &z in points {
        let v = scale * field.eval(z, Clearance::NONE)?;
        worst = worst.max((v - exact.value(z)?).norm());
    }
    Ok(worst)
}

/// Data and exact fields of the transmission experiment.
pub struct TransmissionCase {
    pub exterior: IncidentField,
    pub interior: IncidentField,
    /// jumps (gamma V - gamma U, alpha dV/dn - dU/dn)
    pub data: CauchyData,
    /// exact interior unknowns (gamma V, alpha dV/dn) on the grids
    pub exact: CauchyData,
}

pub fn transmission_case(grid: &GridGeometry, k: f64, c: f64, alpha: f64, x0: Vec2, d: Vec2) -> Result<TransmissionCase> {
    let exterior = IncidentField::point_source(x0, k)?;
    let interior = IncidentField::plane_wave(d, k / c)?;
    let u = CauchyData::from_field(&exterior, grid)?;
    let v = CauchyData::from_field(&interior, grid)?;
    let exact = CauchyData {
        beta0: v.beta0.clone(),
        beta1: v.beta1.iter().map(|z| z * alpha).collect(),
    };
    let data = CauchyData {
        beta0: exact.beta0.iter().zip(&u.beta0).map(|(a, b)| a - b).collect(),
        beta1: exact.beta1.iter().zip(&u.beta1).map(|(a, b)| a - b).collect(),
    };
    Ok(TransmissionCase {
        exterior,
        interior,
        data,
        exact,
    })
}

/// One solved ladder entry.
pub struct Case<'g> {
    pub solution: Solution<'g>,
    pub errors: Vec<f64>,
    pub warnings: Vec<String>,
}

fn collect_warnings(n: usize, s: &Solution<'_>, out: &mut Vec<String>) {
    if let Some(w) = s.diagnostics.condition_warning {
        out.push(format!("N = {n}: condition estimate {:.3e}", w.estimate));
    }
}

/// Solve the configured problem on `grid` and measure its errors.
pub fn solve_case<'g>(cfg: &StudyConfig, grid: &'g GridGeometry) -> Result<Case<'g>> {
    let n = grid.len();
    let mut warnings = Vec::new();
    match cfg.problem {
        ProblemSpec::Boundary { method, k } => {
            let ops = assemble(cfg, grid, k)?;
            let exact = IncidentField::point_source(cfg.x0, k)?;
            let data = CauchyData::from_field(&exact, grid)?;
            let solution = solve_boundary(&ops, method, &data)?;
            collect_warnings(n, &solution, &mut warnings);
            let errors = vec![
                density_error(&solution, &data)?,
                field_error(&solution.exterior, Complex64::new(1.0, 0.0), &exact, &cfg.observe)?,
            ];
            Ok(Case {
                solution,
                errors,
                warnings,
            })
        }
        ProblemSpec::Transmission { k, c, alpha } => {
            let ext = assemble(cfg, grid, k)?;
            let int = assemble(cfg, grid, k / c)?;
            let case = transmission_case(grid, k, c, alpha, cfg.x0, cfg.d)?;
            let solution = solve_transmission(&ext, &int, alpha, &case.data)?;
            collect_warnings(n, &solution, &mut warnings);
            let (phi, lambda) = solution.interior_data.clone().expect("transmission interior data");
            let interior = solution.interior.as_ref().expect("transmission interior field");
            let errors = vec![
                max_flux_error(grid, &lambda, &case.exact.beta1),
                max_error(&phi, &case.exact.beta0),
                field_error(interior, Complex64::new(1.0, 0.0), &case.interior, &cfg.observe)?,
            ];
            Ok(Case {
                solution,
                errors,
                warnings,
            })
        }
        ProblemSpec::BurtonMiller { k, coupling, scaling } => {
            let ops = assemble(cfg, grid, k)?;
            let incident = IncidentField::plane_wave(cfg.d, k)?;
            let data = CauchyData::from_field(&incident, grid)?;
            let solution = solve_burton_miller(&ops, coupling, scaling, &data)?;
            collect_warnings(n, &solution, &mut warnings);
            // sound-soft scattered field: Dirichlet datum -U_inc
            let dirichlet = CauchyData {
                beta0: data.beta0.iter().map(|z| -z).collect(),
                beta1: data.beta1.clone(),
            };
            let reference = solve_direct(&ops, Method::DD01, &dirichlet)?;
            collect_warnings(n, &reference, &mut warnings);
            let errors = vec![
                // exterior = -S xi, so S xi = -exterior
                field_error(&solution.exterior, Complex64::new(-1.0, 0.0), &incident, &cfg.observe)?,
                max_flux_error(grid, &reference.lambda, &solution.lambda),
            ];
            Ok(Case {
                solution,
                errors,
                warnings,
            })
        }
    }
}

fn at_ladder(n: usize) -> impl Fn(Error) -> Error {
    move |e| Error::AtLadder { n, source: Box::new(e) }
}

/// Errors for one ladder entry.
pub fn study_errors(cfg: &StudyConfig, n: usize) -> Result<(Vec<f64>, Vec<String>)> {
    let grid = grid_for(cfg, n).map_err(at_ladder(n))?;
    let case = solve_case(cfg, &grid).map_err(at_ladder(n))?;
    Ok((case.errors, case.warnings))
}

/// Run the ladder and tabulate errors with e.c.r.; the report carries
/// metadata (wall time, config echo, special-function check).
pub fn run_study(cfg: &StudyConfig) -> Result<ConvergenceReport> {
    let start = Instant::now();
    let results = try_map(cfg.exec, &cfg.ladder, |&n| study_errors(cfg, n))?;
    let mut warnings = Vec::new();
    let mut entries = Vec::new();
    for (&n, (errors, w)) in cfg.ladder.iter().zip(results) {
        warnings.extend(w);
        entries.push((n, errors));
    }
    let mut report = ConvergenceReport::from_errors(cfg.problem.label(), error_columns(&cfg.problem), entries);
    report.warnings = warnings;
    report.meta = Some(meta(cfg, start));
    Ok(report)
}

fn meta(cfg: &StudyConfig, start: Instant) -> ReportMeta {
    ReportMeta {
        config: cfg.echo(),
        settings: cfg.echo.clone(),
        wall_time_s: start.elapsed().as_secs_f64(),
        special_fn_check: selftest::special_fn_summary(),
        threads: threads(),
    }
}

fn threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Several boundary methods on the same ladder, sharing one operator
/// assembly per N. `cfg.problem` supplies `k`; its method is ignored.
pub fn run_boundary_sweep(cfg: &StudyConfig, methods: &[Method]) -> Result<Vec<ConvergenceReport>> {
    let k = match cfg.problem {
        ProblemSpec::Boundary { k, .. } => k,
        _ => return Err(Error::InvalidParameter("boundary sweep needs a boundary-method config".into())),
    };
    let start = Instant::now();
    let per_n = try_map(cfg.exec, &cfg.ladder, |&n| {
        let run = || -> Result<Vec<(Vec<f64>, Vec<String>)>> {
            let grid = grid_for(cfg, n)?;
            let ops = assemble(cfg, &grid, k)?;
            let exact = IncidentField::point_source(cfg.x0, k)?;
            let data = CauchyData::from_field(&exact, &grid)?;
            methods
                .iter()
                .map(|&m| {
                    let s = solve_boundary(&ops, m, &data)?;
                    let mut w = Vec::new();
                    collect_warnings(n, &s, &mut w);
                    let errors = vec![
                        density_error(&s, &data)?,
                        field_error(&s.exterior, Complex64::new(1.0, 0.0), &exact, &cfg.observe)?,
                    ];
                    Ok((errors, w))
                })
                .collect()
        };
        run().map_err(at_ladder(n))
    })?;
    let mut reports = Vec::with_capacity(methods.len());
    for (mi, &m) in methods.iter().enumerate() {
        let problem = ProblemSpec::Boundary { method: m, k };
        let mut warnings = Vec::new();
        let entries = cfg
            .ladder
            .iter()
            .zip(&per_n)
            .map(|(&n, row)| {
                warnings.extend(row[mi].1.iter().cloned());
                (n, row[mi].0.clone())
            })
            .collect();
        let mut r = ConvergenceReport::from_errors(m.name().to_string(), error_columns(&problem), entries);
        r.warnings = warnings;
        let mut c = cfg.clone();
        c.problem = problem;
        r.meta = Some(meta(&c, start));
        reports.push(r);
    }
    Ok(reports)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldSide {
    Exterior,
    /// Interior field of the transmission problem.
    Interior,
}

/// Evaluate a solution's field on a lattice and write `x,y,re,im` CSV;
/// points within the clearance get empty values.
pub fn export_field<W: Write>(
    cfg: &StudyConfig,
    solution: &Solution<'_>,
    lattice: &Lattice,
    side: FieldSide,
    out: W,
) -> Result<()> {
    let field = match side {
        FieldSide::Exterior => &solution.exterior,
        FieldSide::Interior => solution
            .interior
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("only the transmission problem has an interior field".into()))?,
    };
    let points = lattice.points();
    let values = field
        .eval_many(&points, cfg.clearance, cfg.exec)
        .into_iter()
        .map(|r| match r {
            Ok(v) => Ok(Some(v)),
            Err(Error::Clearance { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    write_field_csv(out, &points, &values)
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveSummary {
    pub method: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub columns: Vec<String>,
    pub errors: Vec<f64>,
    pub warnings: Vec<String>,
    pub pivot_growth: f64,
    /// Exterior trace at main midpoints, (re, im).
    pub trace: Vec<(f64, f64)>,
    /// Exterior normal derivative at companion midpoints, divided by h.
    pub flux: Vec<(f64, f64)>,
}

pub fn summarize(cfg: &StudyConfig, case: &Case<'_>) -> SolveSummary {
    let s = &case.solution;
    let grid = s.grid();
    SolveSummary {
        method: cfg.problem.label(),
        n: grid.len(),
        columns: error_columns(&cfg.problem),
        errors: case.errors.clone(),
        warnings: case.warnings.clone(),
        pivot_growth: s.diagnostics.pivot_growth,
        trace: s.phi.iter().map(|z| (z.re, z.im)).collect(),
        flux: s
            .lambda
            .iter()
            .zip(grid.mesh_sizes())
            .map(|(z, h)| (z.re / h, z.im / h))
            .collect(),
    }
}

impl SolveSummary {
    /// `j,trace_re,trace_im,flux_re,flux_im` with 1-based `j`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "j,trace_re,trace_im,flux_re,flux_im")?;
        for (j, (t, f)) in self.trace.iter().zip(&self.flux).enumerate() {
            writeln!(w, "{},{:e},{:e},{:e},{:e}", j + 1, t.0, t.1, f.0, f.1)?;
        }
        Ok(())
    }
}
