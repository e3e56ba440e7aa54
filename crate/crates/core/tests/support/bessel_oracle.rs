//! Extended-precision reference values for J0, J1, Y0, Y1.
//!
//! Everything is computed from the ascending power series in binary fixed
//! point (FRAC fractional bits, backed by `BigInt`), for every argument,
//! including the large-argument range where the production code switches to
//! the Hankel asymptotic expansion. At x = 200 the largest series term is about
//! 2^290, so FRAC = 480 leaves well over 150 bits after cancellation.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

const FRAC: u32 = 480;

const PI_DIGITS: &str = "3.141592653589793238462643383279502884197169399375105820974944";
const EULER_GAMMA_DIGITS: &str = "0.577215664901532860606512090082402431042159335939923598805767";

#[derive(Clone, Debug)]
struct Fixed(BigInt);

impl Fixed {
    fn one() -> Self {
        Fixed(BigInt::one() << FRAC)
    }

    fn from_decimal(s: &str) -> Self {
        let (int, frac) = s.split_once('.').unwrap();
        let digits: BigInt = format!("{int}{frac}").parse().unwrap();
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        Fixed((digits << FRAC) / scale)
    }

    /// Exact conversion of a finite f64.
    fn from_f64(x: f64) -> Self {
        let (mant, exp) = decompose(x);
        Fixed(shift(BigInt::from(mant), FRAC as i64 + exp))
    }

    fn to_f64(&self) -> f64 {
        // keep 64 significant bits before handing over to f64 rounding
        let bits = self.0.bits() as i64;
        let drop = (bits - 64).max(0);
        let top = (&self.0 >> drop as u64).to_f64().unwrap();
        top * 2f64.powi((drop - FRAC as i64) as i32)
    }

    fn add(&self, o: &Fixed) -> Fixed {
        Fixed(&self.0 + &o.0)
    }
    fn sub(&self, o: &Fixed) -> Fixed {
        Fixed(&self.0 - &o.0)
    }
    fn mul(&self, o: &Fixed) -> Fixed {
        Fixed((&self.0 * &o.0) >> FRAC)
    }
    fn div(&self, o: &Fixed) -> Fixed {
        Fixed((&self.0 << FRAC) / &o.0)
    }
    fn div_int(&self, k: u64) -> Fixed {
        Fixed(&self.0 / BigInt::from(k))
    }
    fn neg(&self) -> Fixed {
        Fixed(-&self.0)
    }
}

fn shift(v: BigInt, by: i64) -> BigInt {
    if by >= 0 {
        v << by as u64
    } else {
        v >> (-by) as u64
    }
}

/// x = mant * 2^exp with integer mantissa.
fn decompose(x: f64) -> (i64, i64) {
    assert!(x.is_finite());
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    let (m, e) = if raw_exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1i64 << 52), raw_exp - 1075)
    };
    (sign * m, e)
}

/// 2 atanh(z) = ln((1+z)/(1-z)) for |z| <= 1/3.
fn two_atanh(z: &Fixed) -> Fixed {
    let z2 = z.mul(z);
    let mut power = z.clone();
    let mut sum = Fixed(BigInt::zero());
    let mut k = 0u64;
    while !power.0.is_zero() {
        sum = sum.add(&power.div_int(2 * k + 1));
        power = power.mul(&z2);
        k += 1;
    }
    Fixed(sum.0 << 1)
}

fn ln2() -> Fixed {
    let third = Fixed::one().div_int(3);
    two_atanh(&third)
}

/// ln(x) for a positive finite f64.
fn ln_f64(x: f64) -> Fixed {
    assert!(x > 0.0);
    let (mant, exp) = decompose(x);
    // mant * 2^exp = u * 2^e2 with u in [1, 2)
    let mbits = 64 - (mant as u64).leading_zeros() as i64;
    let e2 = exp + mbits - 1;
    let u = Fixed(shift(BigInt::from(mant), FRAC as i64 - (mbits - 1)));
    let one = Fixed::one();
    let z = u.sub(&one).div(&u.add(&one));
    let ln_u = two_atanh(&z);
    let l2 = ln2();
    ln_u.add(&Fixed(&l2.0 * BigInt::from(e2)))
}

#[derive(Clone, Copy, Debug)]
pub struct BesselValues {
    pub j0: f64,
    pub j1: f64,
    pub y0: f64,
    pub y1: f64,
}

/// J0, J1, Y0, Y1 at a positive f64 argument.
pub fn bessel_all(x: f64) -> BesselValues {
    assert!(x > 0.0);
    let (mant, exp) = decompose(x);
    let m2 = BigInt::from(mant) * BigInt::from(mant);
    // q = x^2 / 4 = m^2 2^(2 exp - 2); multiplying a Fixed by q
    let q_shift = 2 * exp - 2;
    let times_q = |v: &Fixed| Fixed(shift(&v.0 * &m2, q_shift));
    let q_sqrt = x / 2.0;

    let one = Fixed::one();
    let zero = || Fixed(BigInt::zero());

    // order 0: t_k = q^k/(k!)^2; order 1: u_k = q^k/(k!(k+1)!)
    let mut t = one.clone();
    let mut u = one.clone();
    let mut harmonic = zero(); // H_k
    let mut harmonic_next = one.clone(); // H_{k+1}
    let mut j0 = zero();
    let mut s0 = zero(); // sum (-1)^k H_k t_k
    let mut j1s = zero(); // sum (-1)^k u_k
    let mut s1 = zero(); // sum (-1)^k (H_k + H_{k+1}) u_k
    let mut k: u64 = 0;
    loop {
        let sign_neg = k % 2 == 1;
        let ht = t.mul(&harmonic);
        let hu = u.mul(&harmonic.add(&harmonic_next));
        if sign_neg {
            j0 = j0.sub(&t);
            s0 = s0.sub(&ht);
            j1s = j1s.sub(&u);
            s1 = s1.sub(&hu);
        } else {
            j0 = j0.add(&t);
            s0 = s0.add(&ht);
            j1s = j1s.add(&u);
            s1 = s1.add(&hu);
        }
        k += 1;
        t = times_q(&t).div_int(k * k);
        u = times_q(&u).div_int(k * (k + 1));
        harmonic = harmonic_next.clone();
        harmonic_next = harmonic_next.add(&one.div_int(k + 1));
        if (k as f64) > q_sqrt && t.0.is_zero() && u.0.is_zero() {
            break;
        }
    }

    let pi = Fixed::from_decimal(PI_DIGITS);
    let gamma = Fixed::from_decimal(EULER_GAMMA_DIGITS);
    let half_x = Fixed::from_f64(x / 2.0);
    let log_term = ln_f64(x / 2.0).add(&gamma);
    let two_over_pi = Fixed(one.0.clone() << 1).div(&pi);

    let j1 = half_x.mul(&j1s);
    let y0 = two_over_pi.mul(&log_term.mul(&j0).sub(&s0));
    let y1 = two_over_pi
        .div(&Fixed::from_f64(x))
        .neg()
        .add(&two_over_pi.mul(&log_term.mul(&j1)))
        .sub(&half_x.mul(&s1).div(&pi));

    BesselValues {
        j0: j0.to_f64(),
        j1: j1.to_f64(),
        y0: y0.to_f64(),
        y1: y1.to_f64(),
    }
}

/// Relative error with the reference as denominator.
pub fn rel_err(value: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        value.abs()
    } else {
        ((value - reference) / reference).abs()
    }
}

