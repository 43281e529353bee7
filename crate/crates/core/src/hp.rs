//! Arbitrary-precision complex numbers built from a pair of MPFR floats.
//!
//! Every value carries its own precision; binary operations use the larger
//! precision of the two operands.

use num_rational::Rational64;
use rug::float::Constant;
use rug::Float;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Extra bits carried on top of the requested precision.
pub const GUARD_BITS: u32 = 64;

/// Working precision used internally for a requested output precision.
pub fn working_prec(prec: u32) -> u32 {
    prec + GUARD_BITS
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

pub fn float(prec: u32, x: f64) -> Float {
    Float::with_val(prec, x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HpComplex {
    pub re: Float,
    pub im: Float,
}

impl HpComplex {
    pub fn new(re: Float, im: Float) -> Self {
        HpComplex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        HpComplex::new(Float::new(prec), Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        HpComplex::new(Float::with_val(prec, 1), Float::new(prec))
    }

    pub fn i(prec: u32) -> Self {
        HpComplex::new(Float::new(prec), Float::with_val(prec, 1))
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        HpComplex::new(Float::with_val(prec, re), Float::with_val(prec, im))
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        HpComplex::new(re, Float::new(prec))
    }

    pub fn from_rational(r: Rational64, prec: u32) -> Self {
        let re = Float::with_val(prec, *r.numer()) / Float::with_val(prec, *r.denom());
        HpComplex::from_real(re)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        HpComplex::new(Float::with_val(prec, &self.re), Float::with_val(prec, &self.im))
    }

    pub fn conj(&self) -> Self {
        HpComplex::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, s: &Float) -> Self {
        let p = self.prec();
        HpComplex::new(Float::with_val(p, &self.re * s), Float::with_val(p, &self.im * s))
    }

    pub fn scale_f64(&self, s: f64) -> Self {
        self.scale(&Float::with_val(self.prec(), s))
    }

    pub fn scale_i64(&self, s: i64) -> Self {
        let p = self.prec();
        HpComplex::new(Float::with_val(p, &self.re * s), Float::with_val(p, &self.im * s))
    }

    pub fn scale_rational(&self, r: Rational64) -> Self {
        let p = self.prec();
        let n = *r.numer();
        let d = *r.denom();
        HpComplex::new(
            Float::with_val(p, &self.re * n) / d,
            Float::with_val(p, &self.im * n) / d,
        )
    }

    /// Multiplication by i.
    pub fn mul_i(&self) -> Self {
        HpComplex::new(-self.im.clone(), self.re.clone())
    }

    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        HpComplex::new(Float::with_val(n.prec(), &self.re / &n), -(Float::with_val(n.prec(), &self.im / &n)))
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = Float::with_val(p, self.re.exp_ref());
        let (s, c) = Float::with_val(p, &self.im).sin_cos(Float::new(p));
        HpComplex::new(Float::with_val(p, &m * &c), m * s)
    }

    /// exp(2πi·self).
    pub fn e2pii(&self) -> Self {
        let p = self.prec();
        let two_pi = pi(p) * 2u32;
        HpComplex::new(
            -Float::with_val(p, &self.im * &two_pi),
            Float::with_val(p, &self.re * &two_pi),
        )
        .exp()
    }

    /// Principal square root, branch cut along the negative real axis.
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return HpComplex::zero(p);
        }
        let r = self.abs();
        if !self.re.is_sign_negative() {
            let t = (Float::with_val(p, &r + &self.re) / 2u32).sqrt();
            let im = Float::with_val(p, &self.im / &t) / 2u32;
            HpComplex::new(t, im)
        } else {
            let mut t = (Float::with_val(p, &r - &self.re) / 2u32).sqrt();
            if self.im.is_sign_negative() && !self.im.is_zero() {
                t = -t;
            }
            let re = Float::with_val(p, &self.im / &t) / 2u32;
            HpComplex::new(re, t)
        }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let p = self.prec();
        let r = self.abs().ln();
        let a = Float::with_val(p, self.im.atan2_ref(&self.re));
        HpComplex::new(r, a)
    }

    pub fn powi(&self, n: i64) -> Self {
        let p = self.prec();
        if n < 0 {
            return self.inv().powi(-n);
        }
        let mut base = self.clone();
        let mut acc = HpComplex::one(p);
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }

    /// Principal branch of self^(k/2) for integer k: sqrt(self)^k.
    pub fn pow_half(&self, k: i64) -> Self {
        if k % 2 == 0 {
            self.powi(k / 2)
        } else {
            self.sqrt().powi(k)
        }
    }

    /// Decimal rendering with the given number of significant digits.
    pub fn to_decimal(&self, digits: usize) -> (String, String) {
        (format!("{:.*e}", digits, self.re), format!("{:.*e}", digits, self.im))
    }
}

/// e^{2πi r} for an exact rational r.
pub fn root_of_unity(r: Rational64, prec: u32) -> HpComplex {
    let reduced = Rational64::new(r.numer().rem_euclid(*r.denom()), *r.denom());
    match (*reduced.numer(), *reduced.denom()) {
        (0, _) => return HpComplex::one(prec),
        (1, 2) => return HpComplex::one(prec).neg(),
        (1, 4) => return HpComplex::i(prec),
        (3, 4) => return HpComplex::i(prec).neg(),
        _ => {}
    }
    let p = prec;
    let theta = pi(p) * 2u32 * Float::with_val(p, *reduced.numer()) / Float::with_val(p, *reduced.denom());
    let (s, c) = theta.sin_cos(Float::new(p));
    HpComplex::new(c, s)
}

impl fmt::Display for HpComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = f.precision().unwrap_or(20);
        write!(f, "({:.*e}, {:.*e})", d, self.re, d, self.im)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<HpComplex> for HpComplex {
            type Output = HpComplex;
            fn $m(self, rhs: HpComplex) -> HpComplex {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&HpComplex> for HpComplex {
            type Output = HpComplex;
            fn $m(self, rhs: &HpComplex) -> HpComplex {
                (&self).$m(rhs)
            }
        }
        impl $tr<HpComplex> for &HpComplex {
            type Output = HpComplex;
            fn $m(self, rhs: HpComplex) -> HpComplex {
                self.$m(&rhs)
            }
        }
    };
}

impl Add<&HpComplex> for &HpComplex {
    type Output = HpComplex;
    fn add(self, rhs: &HpComplex) -> HpComplex {
        let p = self.prec().max(rhs.prec());
        HpComplex::new(Float::with_val(p, &self.re + &rhs.re), Float::with_val(p, &self.im + &rhs.im))
    }
}

impl Sub<&HpComplex> for &HpComplex {
    type Output = HpComplex;
    fn sub(self, rhs: &HpComplex) -> HpComplex {
        let p = self.prec().max(rhs.prec());
        HpComplex::new(Float::with_val(p, &self.re - &rhs.re), Float::with_val(p, &self.im - &rhs.im))
    }
}

impl Mul<&HpComplex> for &HpComplex {
    type Output = HpComplex;
    fn mul(self, rhs: &HpComplex) -> HpComplex {
        let p = self.prec().max(rhs.prec());
        let ac = Float::with_val(p, &self.re * &rhs.re);
        let bd = Float::with_val(p, &self.im * &rhs.im);
        let ad = Float::with_val(p, &self.re * &rhs.im);
        let bc = Float::with_val(p, &self.im * &rhs.re);
        HpComplex::new(ac - bd, ad + bc)
    }
}

impl Div<&HpComplex> for &HpComplex {
    type Output = HpComplex;
    fn div(self, rhs: &HpComplex) -> HpComplex {
        let p = self.prec().max(rhs.prec());
        let n = rhs.norm_sqr();
        let re = Float::with_val(p, &self.re * &rhs.re) + Float::with_val(p, &self.im * &rhs.im);
        let im = Float::with_val(p, &self.im * &rhs.re) - Float::with_val(p, &self.re * &rhs.im);
        HpComplex::new(re / &n, im / &n)
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for HpComplex {
    type Output = HpComplex;
    fn neg(self) -> HpComplex {
        HpComplex::new(-self.re, -self.im)
    }
}

impl Neg for &HpComplex {
    type Output = HpComplex;
    fn neg(self) -> HpComplex {
        HpComplex::new(-self.re.clone(), -self.im.clone())
    }
}

impl AddAssign<&HpComplex> for HpComplex {
    fn add_assign(&mut self, rhs: &HpComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl AddAssign<HpComplex> for HpComplex {
    fn add_assign(&mut self, rhs: HpComplex) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl SubAssign<&HpComplex> for HpComplex {
    fn sub_assign(&mut self, rhs: &HpComplex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&HpComplex> for HpComplex {
    fn mul_assign(&mut self, rhs: &HpComplex) {
        *self = &*self * rhs;
    }
}

/// A point τ = u + iv of the upper half-plane.
#[derive(Clone, Debug, PartialEq)]
pub struct UHPoint {
    tau: HpComplex,
}

impl UHPoint {
    pub fn new(tau: HpComplex) -> Result<Self, crate::Error> {
        if tau.im.is_sign_negative() || tau.im.is_zero() || !tau.is_finite() {
            return Err(crate::Error::NotInUpperHalfPlane(tau.im.to_f64()));
        }
        Ok(UHPoint { tau })
    }

    pub fn from_f64(u: f64, v: f64, prec: u32) -> Result<Self, crate::Error> {
        UHPoint::new(HpComplex::from_f64(u, v, prec))
    }

    pub fn tau(&self) -> &HpComplex {
        &self.tau
    }

    pub fn u(&self) -> &Float {
        &self.tau.re
    }

    pub fn v(&self) -> &Float {
        &self.tau.im
    }

    pub fn prec(&self) -> u32 {
        self.tau.prec()
    }

    /// The point m·τ for a positive integer m.
    pub fn scaled(&self, m: i64) -> UHPoint {
        UHPoint { tau: self.tau.scale_i64(m) }
    }

    /// The point −τ̄.
    pub fn neg_conj(&self) -> UHPoint {
        UHPoint { tau: HpComplex::new(-self.tau.re.clone(), self.tau.im.clone()) }
    }

    /// q^r = e^{2πi r τ}.
    pub fn q_pow(&self, r: Rational64) -> HpComplex {
        self.tau.scale_rational(r).e2pii()
    }

    pub fn with_prec(&self, prec: u32) -> UHPoint {
        UHPoint { tau: self.tau.with_prec(prec) }
    }

    /// cτ + d.
    pub fn automorphy(&self, c: i64, d: i64) -> HpComplex {
        let p = self.prec();
        &self.tau.scale_i64(c) + &HpComplex::from_f64(d as f64, 0.0, p)
    }

    /// (aτ + b)/(cτ + d).
    pub fn mobius(&self, a: i64, b: i64, c: i64, d: i64) -> Result<UHPoint, crate::Error> {
        let p = self.prec();
        let num = &self.tau.scale_i64(a) + &HpComplex::from_f64(b as f64, 0.0, p);
        UHPoint::new(&num / &self.automorphy(c, d))
    }

    /// τ + r for a rational r.
    pub fn shift(&self, r: Rational64) -> UHPoint {
        let p = self.prec();
        UHPoint { tau: &self.tau + &HpComplex::from_rational(r, p) }
    }
}
