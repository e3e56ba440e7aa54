//! Operator entries computed straight from a closed-form ellipse and the
//! extended-precision Bessel values, without the library's grid sampling or
//! special functions.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::bessel_oracle::bessel_all;

#[derive(Clone, Copy, Debug)]
pub struct Ellipse {
    pub a: f64,
    pub b: f64,
    pub cx: f64,
    pub cy: f64,
}

pub const PAPER_ELLIPSE: Ellipse = Ellipse {
    a: 2.0,
    b: 1.0,
    cx: 0.1,
    cy: 0.2,
};

pub const UNIT_CIRCLE: Ellipse = Ellipse {
    a: 1.0,
    b: 1.0,
    cx: 0.0,
    cy: 0.0,
};

impl Ellipse {
    pub fn point(&self, t: f64) -> [f64; 2] {
        let w = 2.0 * PI * t;
        [self.cx + self.a * w.cos(), self.cy + self.b * w.sin()]
    }

    /// h n(t) with n = (x2', -x1')
    pub fn scaled_normal(&self, t: f64, h: f64) -> [f64; 2] {
        let w = 2.0 * PI * t;
        [h * 2.0 * PI * self.b * w.cos(), h * 2.0 * PI * self.a * w.sin()]
    }

    /// h^2 x''(t)
    pub fn scaled_accel(&self, t: f64, h: f64) -> [f64; 2] {
        let w = 2.0 * PI * t;
        let c = -4.0 * PI * PI * h * h;
        [c * self.a * w.cos(), c * self.b * w.sin()]
    }
}

pub fn h0(x: f64) -> Complex64 {
    let v = bessel_all(x);
    Complex64::new(v.j0, v.y0)
}

pub fn h1(x: f64) -> Complex64 {
    let v = bessel_all(x);
    Complex64::new(v.j1, v.y1)
}

fn dist(p: [f64; 2], q: [f64; 2]) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

fn dot(p: [f64; 2], q: [f64; 2]) -> f64 {
    p[0] * q[0] + p[1] * q[1]
}

const QI: Complex64 = Complex64::new(0.0, 0.25);

/// One staggered discretization: `n` nodes, companion shift `eps`, 0-based
/// node indices mapped to t = (i + 1) h.
#[derive(Clone, Copy, Debug)]
pub struct Discretization {
    pub curve: Ellipse,
    pub n: usize,
    pub eps: f64,
    pub k: f64,
}

impl Discretization {
    fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    fn t(&self, i: usize) -> f64 {
        (i as f64 + 1.0) * self.h()
    }

    fn te(&self, i: usize) -> f64 {
        (i as f64 + 1.0 + self.eps) * self.h()
    }

    fn diag(&self, t: f64) -> Complex64 {
        let h = self.h();
        let n = self.curve.scaled_normal(t, h);
        let s = self.curve.scaled_accel(t, h);
        Complex64::new(dot(s, n) / (4.0 * PI * dot(n, n)), 0.0)
    }

    pub fn v(&self, i: usize, j: usize) -> Complex64 {
        let r = dist(self.curve.point(self.t(i)), self.curve.point(self.te(j)));
        QI * h0(self.k * r)
    }

    pub fn k_entry(&self, i: usize, j: usize) -> Complex64 {
        if i == j {
            return self.diag(self.t(i));
        }
        let (p, q) = (self.curve.point(self.t(i)), self.curve.point(self.t(j)));
        let n = self.curve.scaled_normal(self.t(j), self.h());
        let r = dist(p, q);
        QI * self.k * h1(self.k * r) * (dot([p[0] - q[0], p[1] - q[1]], n) / r)
    }

    pub fn j_entry(&self, i: usize, j: usize) -> Complex64 {
        if i == j {
            return self.diag(self.te(i));
        }
        let (p, q) = (self.curve.point(self.te(i)), self.curve.point(self.te(j)));
        let n = self.curve.scaled_normal(self.te(i), self.h());
        let r = dist(p, q);
        QI * self.k * h1(self.k * r) * (dot([q[0] - p[0], q[1] - p[1]], n) / r)
    }

    /// Single layer between companion breakpoint i and main breakpoint j.
    pub fn vtilde(&self, i: usize, j: usize) -> Complex64 {
        let h = self.h();
        let be = self.curve.point((i as f64 + 0.5 + self.eps) * h);
        let b = self.curve.point((j as f64 + 0.5) * h);
        QI * h0(self.k * dist(be, b))
    }

    /// (finite-difference part, k^2 normal-product part) of W_ij.
    pub fn w_terms(&self, i: usize, j: usize) -> (Complex64, Complex64) {
        let (ni, nj) = ((i + 1) % self.n, (j + 1) % self.n);
        let fd = self.vtilde(ni, nj) + self.vtilde(i, j) - self.vtilde(ni, j) - self.vtilde(i, nj);
        let h = self.h();
        let prod = dot(self.curve.scaled_normal(self.te(i), h), self.curve.scaled_normal(self.t(j), h));
        (fd, self.v(j, i) * (self.k * self.k * prod))
    }

    pub fn w(&self, i: usize, j: usize) -> Complex64 {
        let (fd, normal) = self.w_terms(i, j);
        fd - normal
    }
}
