//! Parametrized closed curves and the two staggered sample grids.
//!
//! A boundary is one or more smooth, 1-periodic, positively oriented curves.
//! For a component sampled with `N` points and `h = 1/N` the main grid uses
//! `t_i = i h` (midpoints) and `s_i = (i - 1/2) h` (breakpoints), `i = 1..N`;
//! the companion grid uses the same construction displaced by `eps h`.
//!
//! Node indices in the Rust API are 0-based: node `j` is the paper-style
//! index `i = j + 1` of its component. Text outputs use the 1-based form.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// (y, -x): the tangent rotated clockwise, outward for positive orientation.
    #[inline]
    pub fn rotate_cw(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, f: f64) -> Vec2 {
        Vec2::new(self.x * f, self.y * f)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A 1-periodic parametrization with analytic first and second derivatives.
pub trait Parametrization: Send + Sync + fmt::Debug {
    fn point(&self, t: f64) -> Vec2;
    fn derivative(&self, t: f64) -> Vec2;
    fn second_derivative(&self, t: f64) -> Vec2;
}

/// One trigonometric mode: x1 += x_cos cos(2 pi m t) + x_sin sin(2 pi m t),
/// and likewise for x2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub m: u32,
    pub x_cos: f64,
    pub x_sin: f64,
    pub y_cos: f64,
    pub y_sin: f64,
}

#[derive(Clone, Debug)]
pub enum Curve {
    Circle { radius: f64, center: Vec2 },
    Ellipse { a: f64, b: f64, center: Vec2 },
    Fourier(Vec<FourierMode>),
    Custom(Arc<dyn Parametrization>),
}

impl Curve {
    pub fn circle(radius: f64) -> Self {
        Curve::Circle {
            radius,
            center: Vec2::default(),
        }
    }

    /// (x - 0.1)^2 / 4 + (y - 0.2)^2 = 1, the obstacle of the reference experiments.
    pub fn paper_ellipse() -> Self {
        Curve::ellipse(2.0, 1.0, 0.1, 0.2)
    }

    pub fn ellipse(a: f64, b: f64, cx: f64, cy: f64) -> Self {
        Curve::Ellipse {
            a,
            b,
            center: Vec2::new(cx, cy),
        }
    }

    pub fn fourier(modes: Vec<FourierMode>) -> Self {
        Curve::Fourier(modes)
    }

    pub fn custom(p: impl Parametrization + 'static) -> Self {
        Curve::Custom(Arc::new(p))
    }
}

/// Build a builtin curve from its name and numeric parameters:
/// `circle [r [cx cy]]`, `paper_ellipse`, `ellipse a b cx cy`.
/// Fourier curves need coefficient data and are built with [`Curve::fourier`].
pub fn builtin_curve(name: &str, params: &[f64]) -> Result<Curve> {
    let bad = |what: &str| Error::InvalidParameter(format!("curve `{name}`: {what}"));
    match name {
        "circle" => match params {
            [] => Ok(Curve::circle(1.0)),
            [r] => Ok(Curve::circle(*r)),
            [r, cx, cy] => Ok(Curve::Circle {
                radius: *r,
                center: Vec2::new(*cx, *cy),
            }),
            _ => Err(bad("expected `circle [r [cx cy]]`")),
        },
        "paper_ellipse" if params.is_empty() => Ok(Curve::paper_ellipse()),
        "paper_ellipse" => Err(bad("takes no parameters")),
        "ellipse" => match params {
            [a, b, cx, cy] => Ok(Curve::ellipse(*a, *b, *cx, *cy)),
            [a, b] => Ok(Curve::ellipse(*a, *b, 0.0, 0.0)),
            _ => Err(bad("expected `ellipse a b [cx cy]`")),
        },
        _ => Err(Error::InvalidParameter(format!("unknown curve `{name}`"))),
    }
}

impl Parametrization for Curve {
    fn point(&self, t: f64) -> Vec2 {
        let w = 2.0 * PI;
        match self {
            Curve::Circle { radius, center } => {
                let (s, c) = (w * t).sin_cos();
                *center + Vec2::new(c, s) * *radius
            }
            Curve::Ellipse { a, b, center } => {
                let (s, c) = (w * t).sin_cos();
                *center + Vec2::new(a * c, b * s)
            }
            Curve::Fourier(modes) => fourier_eval(modes, t, 0),
            Curve::Custom(p) => p.point(t),
        }
    }

    fn derivative(&self, t: f64) -> Vec2 {
        let w = 2.0 * PI;
        match self {
            Curve::Circle { radius, .. } => {
                let (s, c) = (w * t).sin_cos();
                Vec2::new(-s, c) * (w * radius)
            }
            Curve::Ellipse { a, b, .. } => {
                let (s, c) = (w * t).sin_cos();
                Vec2::new(-a * s, b * c) * w
            }
            Curve::Fourier(modes) => fourier_eval(modes, t, 1),
            Curve::Custom(p) => p.derivative(t),
        }
    }

    fn second_derivative(&self, t: f64) -> Vec2 {
        let w = 2.0 * PI;
        match self {
            Curve::Circle { radius, .. } => {
                let (s, c) = (w * t).sin_cos();
                Vec2::new(c, s) * (-w * w * radius)
            }
            Curve::Ellipse { a, b, .. } => {
                let (s, c) = (w * t).sin_cos();
                Vec2::new(a * c, b * s) * (-w * w)
            }
            Curve::Fourier(modes) => fourier_eval(modes, t, 2),
            Curve::Custom(p) => p.second_derivative(t),
        }
    }
}

fn fourier_eval(modes: &[FourierMode], t: f64, order: u32) -> Vec2 {
    let mut out = Vec2::default();
    for mode in modes {
        let w = 2.0 * PI * mode.m as f64;
        let (s, c) = (w * t).sin_cos();
        // d^order/dt^order of (cos, sin)
        let (dc, ds) = match order {
            0 => (c, s),
            1 => (-w * s, w * c),
            _ => (-w * w * c, -w * w * s),
        };
        out.x += mode.x_cos * dc + mode.x_sin * ds;
        out.y += mode.y_cos * dc + mode.y_sin * ds;
    }
    out
}

/// Samples of one grid (main or companion), indexed by global node.
#[derive(Clone, Debug, Default)]
pub struct GridSamples {
    /// x(t_i)
    pub m: Vec<Vec2>,
    /// x(s_i)
    pub b: Vec<Vec2>,
    /// h n(t_i), n = (x2', -x1')
    pub n: Vec<Vec2>,
    /// |n_i|
    pub ell: Vec<f64>,
    /// h^2 x''(t_i)
    pub s: Vec<Vec2>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComponentRange {
    pub offset: usize,
    pub len: usize,
    pub h: f64,
    /// max |x'| over the sampled parameters of this component
    pub max_speed: f64,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SamplingOptions {
    /// Admit eps = +-1/2, for which the discrete single layer is unstable.
    pub allow_unstable_half: bool,
}

#[derive(Clone, Debug)]
pub struct GridGeometry {
    eps: f64,
    main: GridSamples,
    companion: GridSamples,
    components: Vec<ComponentRange>,
    next: Vec<usize>,
    h: Vec<f64>,
}

impl GridGeometry {
    /// Single closed curve with `n` nodes.
    pub fn new(curve: &Curve, n: usize, eps: f64) -> Result<Self> {
        sample_grids(&[(curve.clone(), n)], eps, SamplingOptions::default())
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn main(&self) -> &GridSamples {
        &self.main
    }

    pub fn companion(&self) -> &GridSamples {
        &self.companion
    }

    pub fn components(&self) -> &[ComponentRange] {
        &self.components
    }

    /// Mesh size of the component holding node `j`.
    #[inline]
    pub fn h(&self, j: usize) -> f64 {
        self.h[j]
    }

    pub fn mesh_sizes(&self) -> &[f64] {
        &self.h
    }

    /// Next node in the rotating order of the component holding `j`.
    #[inline]
    pub fn next(&self, j: usize) -> usize {
        self.next[j]
    }

    pub fn next_map(&self) -> &[usize] {
        &self.next
    }

    /// The `next` permutation as cycles of 1-based indices.
    pub fn next_cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut cycles = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                cycle.push(j + 1);
                j = self.next[j];
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// max over components of h * max|x'|, the arclength scale of one cell.
    pub fn cell_length(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.h * c.max_speed)
            .fold(0.0, f64::max)
    }

    /// Shoelace area of the main-grid midpoints of one component.
    pub fn signed_area(&self, component: usize) -> f64 {
        let c = self.components[component];
        shoelace(&self.main.m[c.offset..c.offset + c.len])
    }
}

fn shoelace(points: &[Vec2]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let (p, q) = (points[i], points[(i + 1) % n]);
            p.x * q.y - q.x * p.y
        })
        .sum::<f64>()
        * 0.5
}

fn validate_eps(eps: f64, opts: SamplingOptions) -> Result<()> {
    if !eps.is_finite() || eps == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eps = {eps}: the companion grid must be displaced (eps != 0)"
        )));
    }
    if eps.abs() == 0.5 {
        if opts.allow_unstable_half {
            return Ok(());
        }
        return Err(Error::InvalidParameter(
            "eps = +-1/2 gives an unstable single-layer discretization; \
             enable the unstable override to use it anyway"
                .into(),
        ));
    }
    if eps.abs() > 0.5 {
        return Err(Error::InvalidParameter(format!(
            "eps = {eps} outside (-1/2, 1/2)"
        )));
    }
    Ok(())
}

/// Sample main and companion grids for one or more boundary components.
pub fn sample_grids(
    components: &[(Curve, usize)],
    eps: f64,
    opts: SamplingOptions,
) -> Result<GridGeometry> {
    validate_eps(eps, opts)?;
    if components.is_empty() {
        return Err(Error::Geometry("no boundary components".into()));
    }
    let total: usize = components.iter().map(|(_, n)| n).sum();
    let mut main = GridSamples::default();
    let mut companion = GridSamples::default();
    let mut ranges = Vec::with_capacity(components.len());
    let mut next = Vec::with_capacity(total);
    let mut hs = Vec::with_capacity(total);

    for (ci, (curve, n)) in components.iter().enumerate() {
        let n = *n;
        if n < 4 {
            return Err(Error::InvalidParameter(format!(
                "component {ci}: N = {n}, need at least 4 nodes"
            )));
        }
        let h = 1.0 / n as f64;
        let offset = hs.len();
        let mut max_speed: f64 = 0.0;
        for (grid, shift) in [(&mut main, 0.0), (&mut companion, eps)] {
            for i in 1..=n {
                let t = (i as f64 + shift) * h;
                let s = (i as f64 + shift - 0.5) * h;
                let m = curve.point(t);
                let d = curve.derivative(t);
                let speed = d.norm();
                if !(speed > 0.0 && speed.is_finite()) {
                    return Err(Error::Geometry(format!(
                        "component {ci}: parametrization not regular at t = {t}"
                    )));
                }
                let wrapped = curve.point(t + 1.0);
                if (wrapped - m).norm() > 1e-10 * (1.0 + m.norm()) {
                    return Err(Error::Geometry(format!(
                        "component {ci}: parametrization not 1-periodic at t = {t}"
                    )));
                }
                max_speed = max_speed.max(speed);
                let normal = d.rotate_cw() * h;
                grid.m.push(m);
                grid.b.push(curve.point(s));
                grid.n.push(normal);
                grid.ell.push(normal.norm());
                grid.s.push(curve.second_derivative(t) * (h * h));
            }
        }
        for j in 0..n {
            next.push(offset + (j + 1) % n);
            hs.push(h);
        }
        let area = shoelace(&main.m[offset..offset + n]);
        if area.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Geometry(format!(
                "component {ci}: signed area {area:.6e} <= 0, parametrization is not positively oriented"
            )));
        }
        ranges.push(ComponentRange {
            offset,
            len: n,
            h,
            max_speed,
        });
    }

    Ok(GridGeometry {
        eps,
        main,
        companion,
        components: ranges,
        next,
        h: hs,
    })
}
