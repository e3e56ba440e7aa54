mod support;

use calderon::error::Error;
use calderon::exec::Execution;
use calderon::geometry::{Curve, GridGeometry, Vec2};
use calderon::potentials::{
    eval_d, eval_representation, eval_s, incident_traces, write_field_csv, Clearance, Density, IncidentField, Lattice,
    LayerField,
};
use num_complex::Complex64;
use proptest::prelude::*;
use support::random::{complex_vec, rng};

const SIXTH: f64 = 1.0 / 6.0;

fn ellipse(n: usize) -> GridGeometry {
    GridGeometry::new(&Curve::paper_ellipse(), n, SIXTH).unwrap()
}

/// 5-point Laplacian plus k^2 u, relative to |u|.
fn helmholtz_residual(f: impl Fn(Vec2) -> Complex64, z: Vec2, k: f64, step: f64) -> f64 {
    let u = f(z);
    let lap = (f(Vec2::new(z.x + step, z.y))
        + f(Vec2::new(z.x - step, z.y))
        + f(Vec2::new(z.x, z.y + step))
        + f(Vec2::new(z.x, z.y - step))
        - u * 4.0)
        / (step * step);
    (lap + u * (k * k)).norm() / u.norm()
}

#[test]
fn discrete_potentials_solve_helmholtz() {
    let grid = ellipse(32);
    let mut r = rng(1);
    let k = 3.0;
    let field = LayerField::combined(
        &grid,
        k,
        Density::dipole(complex_vec(&mut r, 32)),
        Complex64::new(1.0, 0.0),
        Density::charge(complex_vec(&mut r, 32)),
        Complex64::new(0.0, -2.0),
    )
    .unwrap();
    for z in [Vec2::new(4.0, 1.0), Vec2::new(-1.0, 3.0), Vec2::new(0.3, 0.1)] {
        let res = helmholtz_residual(|p| field.eval(p, Clearance::NONE).unwrap(), z, k, 1e-3);
        assert!(res <= 1e-4, "{z:?}: {res:e}");
    }
}

#[test]
fn incident_gradients_match_finite_differences() {
    let step = 1e-5;
    for field in [
        IncidentField::point_source(Vec2::new(0.1, 0.2), 3.0).unwrap(),
        IncidentField::plane_wave(Vec2::new(0.6, 0.8), 2.0).unwrap(),
    ] {
        for z in [Vec2::new(2.0, -1.0), Vec2::new(-0.7, 0.9)] {
            let g = field.gradient(z).unwrap();
            let dx = (field.value(Vec2::new(z.x + step, z.y)).unwrap() - field.value(Vec2::new(z.x - step, z.y)).unwrap())
                / (2.0 * step);
            let dy = (field.value(Vec2::new(z.x, z.y + step)).unwrap() - field.value(Vec2::new(z.x, z.y - step)).unwrap())
                / (2.0 * step);
            assert!((g[0] - dx).norm() <= 1e-7 * (1.0 + dx.norm()));
            assert!((g[1] - dy).norm() <= 1e-7 * (1.0 + dy.norm()));
            let n = Vec2::new(0.3, -0.4);
            let dn = field.normal_derivative(z, n).unwrap();
            assert!((dn - (g[0] * n.x + g[1] * n.y)).norm() < 1e-14 * (1.0 + dn.norm()));
        }
        assert!(helmholtz_residual(|p| field.value(p).unwrap(), Vec2::new(1.5, 2.5), field.k(), 1e-3) < 1e-4);
    }
}

#[test]
fn point_source_is_singular_at_its_center() {
    let f = IncidentField::point_source(Vec2::new(1.0, 1.0), 2.0).unwrap();
    assert!(f.value(Vec2::new(1.0, 1.0)).is_err());
    assert!(IncidentField::plane_wave(Vec2::new(1.0, 1.0), 2.0).is_err());
}

/// Green's formula with exact Cauchy data of a radiating field from inside.
fn representation_error(n: usize, z: Vec2, expected: Complex64) -> f64 {
    let grid = ellipse(n);
    let u = IncidentField::point_source(Vec2::new(0.1, 0.2), 3.0).unwrap();
    let (phi, lambda) = incident_traces(&u, &grid).unwrap();
    let v = eval_representation(
        &grid,
        3.0,
        &Density::dipole(phi),
        &Density::charge(lambda),
        z,
        Clearance::NONE,
    )
    .unwrap();
    (v - expected).norm()
}

#[test]
fn representation_reproduces_exterior_field() {
    let z = Vec2::new(4.0, 1.0);
    let exact = IncidentField::point_source(Vec2::new(0.1, 0.2), 3.0).unwrap().value(z).unwrap();
    for (n, tol) in [(20, 1e-2), (40, 1e-5), (80, 1e-10)] {
        let e = representation_error(n, z, exact);
        assert!(e < tol, "N = {n}: {e:e}");
    }
}

#[test]
fn representation_vanishes_inside() {
    let z = Vec2::new(0.9, 0.5);
    let zero = Complex64::new(0.0, 0.0);
    let e1 = representation_error(20, z, zero);
    let e2 = representation_error(80, z, zero);
    assert!(e2 < e1 && e2 < 1e-8, "{e1:e} {e2:e}");
}

#[test]
fn clearance_violation_names_nearest_node() {
    let grid = ellipse(20);
    let eta = Density::charge(vec![Complex64::new(1.0, 0.0); 20]);
    // just outside main node 5 (1-based 6)
    let p = grid.main().m[5];
    let z = Vec2::new(p.x * 1.001, p.y * 1.001);
    match eval_s(&grid, 2.0, &eta, z, Clearance::default()) {
        Err(Error::Clearance { node, distance, .. }) => {
            assert_eq!(node, 6);
            assert!(distance < 0.01);
        }
        other => panic!("{other:?}"),
    }
    assert!(eval_s(&grid, 2.0, &eta, z, Clearance::Absolute(1e-6)).is_ok());
}

#[test]
fn density_kinds_are_enforced() {
    let grid = ellipse(12);
    let c = Density::charge(vec![Complex64::new(1.0, 0.0); 12]);
    let d = Density::dipole(vec![Complex64::new(1.0, 0.0); 12]);
    let z = Vec2::new(6.0, 0.0);
    assert!(matches!(eval_d(&grid, 1.0, &c, z, Clearance::NONE), Err(Error::DensityKind { .. })));
    assert!(matches!(eval_s(&grid, 1.0, &d, z, Clearance::NONE), Err(Error::DensityKind { .. })));
    let short = Density::charge(vec![Complex64::new(1.0, 0.0); 11]);
    assert!(eval_s(&grid, 1.0, &short, z, Clearance::NONE).is_err());
}

#[test]
fn lattice_order_and_csv() {
    let l = Lattice::new(0.0, 1.0, 5.0, 6.0, 2, 2).unwrap();
    let pts = l.points();
    assert_eq!(pts, vec![Vec2::new(0.0, 5.0), Vec2::new(1.0, 5.0), Vec2::new(0.0, 6.0), Vec2::new(1.0, 6.0)]);
    let mut out = Vec::new();
    let vals = vec![Some(Complex64::new(0.5, -2.0)), None, None, Some(Complex64::new(1.0, 0.0))];
    write_field_csv(&mut out, &pts, &vals).unwrap();
    assert_eq!(
        String::from_utf8(out).unwrap(),
        "x,y,re,im\n0e0,5e0,5e-1,-2e0\n1e0,5e0,,\n0e0,6e0,,\n1e0,6e0,1e0,0e0\n"
    );
    assert!(Lattice::new(1.0, 0.0, 0.0, 1.0, 2, 2).is_err());
    assert!(Lattice::new(0.0, 1.0, 0.0, 1.0, 0, 2).is_err());
}

#[test]
fn eval_many_is_execution_independent() {
    let grid = ellipse(40);
    let mut r = rng(2);
    let f = LayerField::single(&grid, 2.0, Density::charge(complex_vec(&mut r, 40)), Complex64::new(1.0, 0.0)).unwrap();
    let pts = Lattice::new(-5.0, 5.0, -4.0, 4.0, 9, 7).unwrap().points();
    let seq = f.eval_many(&pts, Clearance::default(), Execution::Sequential);
    let par = f.eval_many(&pts, Clearance::default(), Execution::Parallel);
    assert_eq!(seq, par);
    assert!(seq.iter().any(|v| v.is_err()) && seq.iter().any(|v| v.is_ok()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn layer_potentials_are_linear(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let grid = ellipse(16);
        let mut r = rng(seed);
        let (x, y) = (complex_vec(&mut r, 16), complex_vec(&mut r, 16));
        let combo: Vec<Complex64> = x.iter().zip(&y).map(|(p, q)| p * a + q * b).collect();
        let z = Vec2::new(5.0, -3.0);
        for dipole in [false, true] {
            let eval = |v: &[Complex64]| {
                if dipole {
                    eval_d(&grid, 2.5, &Density::dipole(v.to_vec()), z, Clearance::NONE).unwrap()
                } else {
                    eval_s(&grid, 2.5, &Density::charge(v.to_vec()), z, Clearance::NONE).unwrap()
                }
            };
            let lhs = eval(&combo);
            let rhs = eval(&x) * a + eval(&y) * b;
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }
    }
}
