//! Bessel functions of integer order 0 and 1 for real arguments, and the
//! Hankel functions of the first kind built from them.
//!
//! For `x <= SERIES_LIMIT` the ascending series are summed in double-double
//! arithmetic. The series for J0 at x = 20 has terms up to ~1e7 that cancel
//! to a result of size ~0.1, so the ~32 significant digits of double-double
//! leave a comfortable margin and relative accuracy is kept near the zeros.
//! Above the switch the Hankel asymptotic expansion is summed in f64; at
//! x = 20 its smallest term is below 1e-17. The phase `x - (2n+1)pi/4` is never
//! formed explicitly: cos/sin of the exact argument are combined instead, so
//! no absolute phase error is introduced for large x.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Abscissa where evaluation switches from the ascending series to the
/// asymptotic expansion.
pub const SERIES_LIMIT: f64 = 20.0;

const TWO_OVER_PI: Dd = Dd::new(0.6366197723675814, -3.935735335036497e-17);
const EULER_GAMMA: Dd = Dd::new(0.5772156649015329, -4.942915152430645e-18);
const HARMONIC_TERMS: usize = 96;

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_LIMIT {
        series_order0(x).0
    } else {
        asymptotic_order0(x).0
    }
}

/// Bessel function of the first kind, order one.
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= SERIES_LIMIT {
        series_j1(ax)
    } else {
        asymptotic_order1(ax).0
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// Bessel function of the second kind, order zero. Requires `x > 0`.
pub fn bessel_y0(x: f64) -> Result<f64> {
    check_positive("bessel_y0", x)?;
    Ok(order0(x).1)
}

/// Bessel function of the second kind, order one. Requires `x > 0`.
pub fn bessel_y1(x: f64) -> Result<f64> {
    check_positive("bessel_y1", x)?;
    Ok(order1(x).1)
}

/// H0^(1)(x) = J0(x) + i Y0(x) for `x > 0`.
pub fn hankel1_0(x: f64) -> Result<Complex64> {
    check_positive("hankel1_0", x)?;
    Ok(hankel1_0_unchecked(x))
}

/// H1^(1)(x) = J1(x) + i Y1(x) for `x > 0`.
pub fn hankel1_1(x: f64) -> Result<Complex64> {
    check_positive("hankel1_1", x)?;
    Ok(hankel1_1_unchecked(x))
}

/// Kernel-loop variant; caller guarantees a positive finite argument.
#[inline]
pub(crate) fn hankel1_0_unchecked(x: f64) -> Complex64 {
    let (j, y) = order0(x);
    Complex64::new(j, y)
}

#[inline]
pub(crate) fn hankel1_1_unchecked(x: f64) -> Complex64 {
    let (j, y) = order1(x);
    Complex64::new(j, y)
}

fn check_positive(function: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { function, x })
    }
}

#[inline]
fn order0(x: f64) -> (f64, f64) {
    if x <= SERIES_LIMIT {
        series_order0(x)
    } else {
        asymptotic_order0(x)
    }
}

#[inline]
fn order1(x: f64) -> (f64, f64) {
    if x <= SERIES_LIMIT {
        series_order1(x)
    } else {
        asymptotic_order1(x)
    }
}

/// (J0, Y0) from the ascending series; Y0 is meaningful only for x > 0.
pub(crate) fn series_order0(x: f64) -> (f64, f64) {
    let harmonic = harmonic_numbers();
    let q = Dd::from_prod(x, x).scale(0.25);
    let mut term = Dd::ONE;
    let mut j0 = Dd::ONE;
    let mut s0 = Dd::ZERO; // sum H_k (-q)^k / (k!)^2
    let mut k = 1usize;
    loop {
        term = term.mul(q).div_f64(-((k * k) as f64));
        j0 = j0.add(term);
        s0 = s0.add(harmonic[k].mul(term));
        if (term.hi.abs() * harmonic[k].hi < 1e-21 && k as f64 > x * 0.5) || k + 1 >= HARMONIC_TERMS {
            break;
        }
        k += 1;
    }
    if x == 0.0 {
        return (j0.hi, f64::NEG_INFINITY);
    }
    let log_term = EULER_GAMMA.add(Dd::from(0.5 * x).ln_f64());
    let y0 = TWO_OVER_PI.mul(log_term.mul(j0).sub(s0));
    (j0.to_f64(), y0.to_f64())
}

fn series_j1(x: f64) -> f64 {
    let q = Dd::from_prod(x, x).scale(0.25);
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    let mut k = 1usize;
    loop {
        term = term.mul(q).div_f64(-((k * (k + 1)) as f64));
        sum = sum.add(term);
        if (term.hi.abs() < 1e-21 && k as f64 > x * 0.5) || k + 1 >= HARMONIC_TERMS {
            break;
        }
        k += 1;
    }
    sum.scale(0.5).mul_f64(x).to_f64()
}

/// (J1, Y1) from the ascending series, x > 0.
pub(crate) fn series_order1(x: f64) -> (f64, f64) {
    let harmonic = harmonic_numbers();
    let q = Dd::from_prod(x, x).scale(0.25);
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    // sum (H_k + H_{k+1}) (-q)^k / (k! (k+1)!), with H_0 + H_1 = 1
    let mut s1 = Dd::ONE;
    let mut k = 1usize;
    loop {
        term = term.mul(q).div_f64(-((k * (k + 1)) as f64));
        sum = sum.add(term);
        s1 = s1.add(harmonic[k].add(harmonic[k + 1]).mul(term));
        if (term.hi.abs() * harmonic[k + 1].hi < 1e-21 && k as f64 > x * 0.5) || k + 2 >= HARMONIC_TERMS {
            break;
        }
        k += 1;
    }
    let j1 = sum.scale(0.5).mul_f64(x);
    let log_term = EULER_GAMMA.add(Dd::from(0.5 * x).ln_f64());
    // Y1 = (2/pi) [ (ln(x/2) + gamma) J1 - (x/4) s1 - 1/x ]
    let inner = log_term
        .mul(j1)
        .sub(s1.scale(0.25).mul_f64(x))
        .sub(Dd::ONE.div_f64(x));
    (j1.to_f64(), TWO_OVER_PI.mul(inner).to_f64())
}

/// Hankel's P and Q for order `nu` (0 or 1), summed until the terms drop
/// below f64 resolution or start growing.
fn hankel_pq(nu: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (nu * nu) as f64;
    let mut c = 1.0_f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        c *= (mu - odd * odd) / (8.0 * k as f64 * x);
        if c.abs() > prev || c.abs() < 1e-18 {
            break;
        }
        prev = c.abs();
        match k % 4 {
            1 => q += c,
            2 => p -= c,
            3 => q -= c,
            _ => p += c,
        }
    }
    (p, q)
}

/// (J0, Y0) from the large-argument expansion.
pub(crate) fn asymptotic_order0(x: f64) -> (f64, f64) {
    let (p, q) = hankel_pq(0, x);
    let (s, c) = x.sin_cos();
    let amp = (std::f64::consts::FRAC_1_PI / x).sqrt();
    // cos(x - pi/4) = (c + s)/sqrt2, sin(x - pi/4) = (s - c)/sqrt2
    let j = amp * (p * (c + s) - q * (s - c));
    let y = amp * (p * (s - c) + q * (c + s));
    (j, y)
}

/// (J1, Y1) from the large-argument expansion.
pub(crate) fn asymptotic_order1(x: f64) -> (f64, f64) {
    let (p, q) = hankel_pq(1, x);
    let (s, c) = x.sin_cos();
    let amp = (std::f64::consts::FRAC_1_PI / x).sqrt();
    // cos(x - 3pi/4) = (s - c)/sqrt2, sin(x - 3pi/4) = -(s + c)/sqrt2
    let j = amp * (p * (s - c) + q * (s + c));
    let y = amp * (q * (s - c) - p * (s + c));
    (j, y)
}

fn harmonic_numbers() -> &'static [Dd; HARMONIC_TERMS] {
    static TABLE: std::sync::OnceLock<[Dd; HARMONIC_TERMS]> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [Dd::ZERO; HARMONIC_TERMS];
        for k in 1..HARMONIC_TERMS {
            table[k] = table[k - 1].add(Dd::ONE.div_f64(k as f64));
        }
        table
    })
}

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl From<f64> for Dd {
    fn from(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = 134_217_729.0 * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    const ZERO: Dd = Dd::new(0.0, 0.0);
    const ONE: Dd = Dd::new(1.0, 0.0);

    const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    #[inline]
    fn from_prod(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Exact for powers of two.
    #[inline]
    fn scale(self, f: f64) -> Self {
        Dd::new(self.hi * f, self.lo * f)
    }

    #[inline]
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    #[inline]
    fn sub(self, o: Dd) -> Dd {
        self.add(Dd::new(-o.hi, -o.lo))
    }

    #[inline]
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi));
        Dd { hi, lo }
    }

    #[inline]
    fn mul_f64(self, f: f64) -> Dd {
        let (p, e) = two_prod(self.hi, f);
        let (hi, lo) = quick_two_sum(p, e + self.lo * f);
        Dd { hi, lo }
    }

    #[inline]
    fn div_f64(self, f: f64) -> Dd {
        let q1 = self.hi / f;
        let (p, e) = two_prod(q1, f);
        let (s, mut r) = two_sum(self.hi, -p);
        r -= e;
        r += self.lo;
        let q2 = (s + r) / f;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    /// Natural logarithm of `self.hi` (lo ignored) to double-double accuracy:
    /// one Newton step on exp(y) = v, with exp of the small correction taken
    /// from its Taylor series and exp(y0) rebuilt from the f64 value via
    /// `exp_m1` identities.
    fn ln_f64(self) -> Dd {
        let v = self.hi;
        let y0 = v.ln();
        // exp(y0) in double-double: y0 = k ln2 + r with small r
        let e = exp_dd(y0);
        // y = y0 + (v - e)/e
        let correction = Dd::from(v).sub(e).to_f64() / e.hi;
        Dd::from(y0).add(Dd::from(correction))
    }
}

/// exp(y) for an f64 argument, returned in double-double.
fn exp_dd(y: f64) -> Dd {
    const LN2: Dd = Dd::new(0.6931471805599453, 2.3190468138462996e-17);
    let k = (y / LN2.hi).round();
    // r = y - k ln2 in double-double
    let r = Dd::from(y).sub(LN2.mul_f64(k));
    // reduce further by 2^-8 and square back
    let r = r.scale(1.0 / 256.0);
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    for i in 1..14 {
        term = term.mul(r).div_f64(i as f64);
        sum = sum.add(term);
    }
    for _ in 0..8 {
        sum = sum.mul(sum);
    }
    let p = 2f64.powi(k as i32);
    Dd::new(sum.hi * p, sum.lo * p)
}
