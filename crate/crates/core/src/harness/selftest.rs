//! Built-in checks: special functions against frozen reference values and
//! hand-computable N = 4 circle fixtures.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::exec::Execution;
use crate::geometry::{Curve, GridGeometry};
use crate::operators::{assemble_all, assemble_vtilde, w_difference_part};
use crate::special_fn::{bessel_j0, bessel_j1, bessel_y0, bessel_y1, hankel1_0};

/// (x, J0, J1, Y0, Y1) from an independent 480-bit ascending-series evaluation.
const FROZEN: [(f64, f64, f64, f64, f64); 11] = [
    (0.0001, 0.9999999975, 4.99999999375e-5, -5.937289069709337, -6366.198036455761),
    (0.1, 0.99750156206604, 0.049937526036242, -1.5342386513503667, -6.4589510947020266),
    (1.0, 0.7651976865579666, 0.4400505857449335, 0.08825696421567696, -0.7812128213002887),
    (2.404825557695773, -6.10876525973673e-17, 0.5191474972894667, 0.509924383448479, 0.1027466824382596),
    (3.831705970207512, -0.402759395702553, 1.1736302822728639e-16, 0.05139767309941108, 0.4125173951588258),
    (5.0, -0.1775967713143383, -0.32757913759146523, -0.30851762524903376, 0.14786314339122683),
    (10.0, -0.24593576445134835, 0.04347274616886144, 0.055671167283599395, 0.24901542420695388),
    (19.75, 0.17844944575138386, 0.023999816388423013, 0.01947876322801493, -0.17801358614613996),
    (20.5, 0.11509696025367476, 0.13625468819339573, 0.1334095666575905, -0.11187909834450974),
    (57.3, 0.1053341332124604, -0.0029007973423950915, -0.003819728084969293, -0.10537146996796659),
    (200.0, -0.015437439930565091, -0.05430453818237822, -0.05426577524981791, 0.01530182458038999),
];

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail,
    }
}

/// Worst relative error against the frozen table, with an absolute floor
/// of 1e-6 so that values at Bessel zeros are judged absolutely.
pub fn special_fn_accuracy() -> f64 {
    let mut worst: f64 = 0.0;
    for &(x, j0, j1, y0, y1) in &FROZEN {
        let got = [
            bessel_j0(x),
            bessel_j1(x),
            bessel_y0(x).unwrap_or(f64::NAN),
            bessel_y1(x).unwrap_or(f64::NAN),
        ];
        for (g, r) in got.iter().zip([j0, j1, y0, y1]) {
            let e = (g - r).abs() / r.abs().max(1e-6);
            worst = worst.max(if e.is_nan() { f64::INFINITY } else { e });
        }
    }
    worst
}

/// Worst relative deviation of J1 Y0 - J0 Y1 from 2/(pi x) on a log sweep.
pub fn wronskian_accuracy() -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..=400 {
        let x = 1e-4 * (2e6f64).powf(i as f64 / 400.0);
        let w = bessel_j1(x) * bessel_y0(x).unwrap_or(f64::NAN) - bessel_j0(x) * bessel_y1(x).unwrap_or(f64::NAN);
        let expected = 2.0 / (PI * x);
        let e = ((w - expected) / expected).abs();
        worst = worst.max(if e.is_nan() { f64::INFINITY } else { e });
    }
    worst
}

pub fn special_fn_summary() -> String {
    let a = special_fn_accuracy();
    let w = wronskian_accuracy();
    let ok = a <= 1e-10 && w <= 1e-9;
    format!(
        "{} (max rel err {a:.2e}, Wronskian {w:.2e})",
        if ok { "pass" } else { "FAIL" }
    )
}

pub fn run() -> SelftestReport {
    let mut checks = Vec::new();
    let a = special_fn_accuracy();
    checks.push(check("special functions vs frozen table", a <= 1e-10, format!("max rel err {a:.3e}")));
    let w = wronskian_accuracy();
    checks.push(check("Wronskian J1 Y0 - J0 Y1 = 2/(pi x)", w <= 1e-9, format!("max rel err {w:.3e}")));

    let grid = match GridGeometry::new(&Curve::circle(1.0), 4, 1.0 / 6.0) {
        Ok(g) => g,
        Err(e) => {
            checks.push(check("circle N=4 grid", false, e.to_string()));
            return SelftestReport { checks };
        }
    };
    let ell_err = grid
        .main()
        .ell
        .iter()
        .chain(&grid.companion().ell)
        .map(|l| (l - PI / 2.0).abs())
        .fold(0.0, f64::max);
    checks.push(check("circle N=4 cell lengths = pi/2", ell_err <= 1e-14, format!("max dev {ell_err:.3e}")));

    match assemble_all(&grid, 1.0) {
        Ok(ops) => {
            let diag_err = (0..4)
                .flat_map(|i| [ops.kh[(i, i)], ops.jh[(i, i)]])
                .map(|z| (z - Complex64::new(-0.125, 0.0)).norm())
                .fold(0.0, f64::max);
            checks.push(check("circle N=4 K_ii = J_ii = -1/8", diag_err <= 1e-13, format!("max dev {diag_err:.3e}")));

            // m_1 = x(1/4), m_1^eps = x(7/24): angle pi/12
            let chord = 2.0 * (PI / 24.0).sin();
            let v11 = Complex64::new(0.0, 0.25) * hankel1_0(chord).unwrap_or_default();
            let v_err = (ops.vh[(0, 0)] - v11).norm();
            checks.push(check("circle N=4 V_11 from chord 2 sin(pi/24)", v_err <= 1e-14, format!("dev {v_err:.3e}")));

            let circ = [&ops.vh, &ops.kh, &ops.jh, &ops.wh]
                .iter()
                .map(|m| {
                    (0..4)
                        .flat_map(|i| (0..4).map(move |j| (i, j)))
                        .map(|(i, j)| (m[(i, j)] - m[((i + 1) % 4, (j + 1) % 4)]).norm())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            checks.push(check("circle N=4 matrices circulant", circ <= 1e-12, format!("max dev {circ:.3e}")));

            let row_sum = assemble_vtilde(&grid, 1.0, Execution::Sequential)
                .and_then(|vt| Ok((w_difference_part(&grid, &vt, Execution::Sequential)?, vt.max_abs())))
                .map(|(fd, scale)| {
                    (0..4)
                        .map(|i| fd.row(i).iter().sum::<Complex64>().norm() / scale)
                        .fold(0.0, f64::max)
                });
            match row_sum {
                Ok(r) => checks.push(check("circle N=4 W difference-part row sums", r <= 1e-12, format!("max rel {r:.3e}"))),
                Err(e) => checks.push(check("circle N=4 W difference-part row sums", false, e.to_string())),
            }
        }
        Err(e) => checks.push(check("circle N=4 assembly", false, e.to_string())),
    }
    SelftestReport { checks }
}
