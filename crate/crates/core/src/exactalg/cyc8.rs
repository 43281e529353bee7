//! Exact arithmetic in Q(ζ₈), ζ₈⁴ = −1.
//!
//! Elements are stored as four integer numerators over one positive common
//! denominator, kept in lowest terms. Most series coefficients are integers,
//! so the denominator is usually 1 and normalization is skipped.

use crate::error::{Error, Result};
use crate::hp::{root_of_unity, HpComplex};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cyc8 {
    num: [BigInt; 4],
    den: BigInt,
}

impl Default for Cyc8 {
    fn default() -> Self {
        Cyc8::zero()
    }
}

impl Cyc8 {
    pub fn zero() -> Self {
        Cyc8 { num: [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()], den: BigInt::one() }
    }

    pub fn one() -> Self {
        Cyc8::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Cyc8 { num: [BigInt::from(n), BigInt::zero(), BigInt::zero(), BigInt::zero()], den: BigInt::one() }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Cyc8 { num: [n, BigInt::zero(), BigInt::zero(), BigInt::zero()], den: BigInt::one() }
    }

    pub fn from_rational(r: Rational64) -> Self {
        Cyc8::new([*r.numer(), 0, 0, 0], *r.denom())
    }

    /// c0 + c1ζ + c2ζ² + c3ζ³ over the denominator `den`.
    pub fn new(c: [i64; 4], den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let mut x = Cyc8 { num: c.map(BigInt::from), den: BigInt::from(den) };
        x.normalize();
        x
    }

    pub fn from_rationals(c: [BigRational; 4]) -> Self {
        let den = c.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let num = c.map(|r| r.numer() * (&den / r.denom()));
        let mut x = Cyc8 { num, den };
        x.normalize();
        x
    }

    /// ζ₈^k.
    pub fn zeta8(k: i64) -> Self {
        let k = k.rem_euclid(8);
        let mut c = [0i64; 4];
        if k < 4 {
            c[k as usize] = 1;
        } else {
            c[(k - 4) as usize] = -1;
        }
        Cyc8::new(c, 1)
    }

    /// The imaginary unit ζ₈².
    pub fn i() -> Self {
        Cyc8::zeta8(2)
    }

    /// e^{2πi r} when it lies in Q(ζ₈).
    pub fn root_of_unity(r: Rational64) -> Result<Self> {
        let scaled = r * Rational64::from_integer(8);
        if !scaled.is_integer() {
            return Err(Error::RootOfUnityOutsideCyc8(format!("e^(2 pi i {r})")));
        }
        Ok(Cyc8::zeta8(scaled.to_integer()))
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -self.den.clone();
            for c in self.num.iter_mut() {
                *c = -c.clone();
            }
        }
        if self.num.iter().all(|c| c.is_zero()) {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            for c in self.num.iter_mut() {
                *c = &*c / &g;
            }
            self.den = &self.den / &g;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(|c| c.is_zero())
    }

    /// Component k as an exact rational.
    pub fn component(&self, k: usize) -> BigRational {
        BigRational::new(self.num[k].clone(), self.den.clone())
    }

    pub fn components(&self) -> [BigRational; 4] {
        [self.component(0), self.component(1), self.component(2), self.component(3)]
    }

    /// The value as a rational number when the ζ-components vanish.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(|c| c.is_zero()) {
            Some(self.component(0))
        } else {
            None
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        if self.den.is_one() && self.num[1..].iter().all(|c| c.is_zero()) {
            Some(self.num[0].clone())
        } else {
            None
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let mut x = Cyc8 { num: self.num.clone().map(|c| c * k), den: self.den.clone() };
        x.normalize();
        x
    }

    pub fn scale_rational(&self, r: Rational64) -> Self {
        let mut x = Cyc8 { num: self.num.clone().map(|c| c * *r.numer()), den: &self.den * *r.denom() };
        x.normalize();
        x
    }

    /// Multiplication by ζ₈^k.
    pub fn mul_zeta8(&self, k: i64) -> Self {
        let k = k.rem_euclid(8) as usize;
        let mut out: [BigInt; 4] = Default::default();
        for (j, c) in self.num.iter().enumerate() {
            let t = j + k;
            let (idx, neg) = ((t % 4), (t / 4) % 2 == 1);
            out[idx] = if neg { -c.clone() } else { c.clone() };
        }
        Cyc8 { num: out, den: self.den.clone() }
    }

    /// Image under ζ₈ ↦ ζ₈^{-1} (complex conjugation).
    pub fn conj(&self) -> Self {
        let [c0, c1, c2, c3] = &self.num;
        Cyc8 { num: [c0.clone(), -c3.clone(), -c2.clone(), -c1.clone()], den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // Write x = a + bζ with a, b ∈ Q(i); then x(a − bζ) = a² − i b² ∈ Q(i).
        let [c0, c1, c2, c3] = &self.num;
        let partner = Cyc8 { num: [c0.clone(), -c1.clone(), c2.clone(), -c3.clone()], den: self.den.clone() };
        let n = self * &partner;
        debug_assert!(n.num[1].is_zero() && n.num[3].is_zero());
        let n_bar = Cyc8 { num: [n.num[0].clone(), BigInt::zero(), -n.num[2].clone(), BigInt::zero()], den: n.den.clone() };
        let norm = &n * &n_bar;
        let norm_q = norm.component(0);
        let mut out = &partner * &n_bar;
        out.num = out.num.map(|c| c * norm_q.denom());
        out.den = &out.den * norm_q.numer();
        out.normalize();
        Ok(out)
    }

    pub fn div(&self, rhs: &Cyc8) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Cyc8::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Numeric value with ζ₈ = e^{πi/4}.
    pub fn to_complex(&self, prec: u32) -> HpComplex {
        let mut acc = HpComplex::zero(prec);
        for k in 0..4 {
            if self.num[k].is_zero() {
                continue;
            }
            let c = rug::Float::with_val(prec, rug::Integer::from_str_radix(&self.num[k].to_str_radix(16), 16).unwrap());
            let w = root_of_unity(Rational64::new(k as i64, 8), prec);
            acc += &w.scale(&c);
        }
        let d = rug::Float::with_val(prec, rug::Integer::from_str_radix(&self.den.to_str_radix(16), 16).unwrap());
        HpComplex::new(acc.re / &d, acc.im / &d)
    }

    /// Approximate modulus, for diagnostics.
    pub fn approx_abs(&self) -> f64 {
        let (re, im) = self.to_complex(64).to_f64();
        re.hypot(im)
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn max_abs_numerator_bits(&self) -> u64 {
        self.num.iter().map(|c| c.bits()).max().unwrap_or(0)
    }

    pub fn to_i64_if_small(&self) -> Option<i64> {
        self.as_integer().and_then(|n| n.to_i64())
    }
}

impl fmt::Display for Cyc8 {
    /// Canonical form `p/q + p/q*z8 + p/q*z8^2 + p/q*z8^3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..4)
            .map(|k| {
                let r = self.component(k);
                let s = format!("{}/{}", r.numer(), r.denom());
                match k {
                    0 => s,
                    1 => format!("{s}*z8"),
                    _ => format!("{s}*z8^{k}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl std::str::FromStr for Cyc8 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut comps: [BigRational; 4] = Default::default();
        for term in s.split(" + ") {
            let term = term.trim();
            let (coef, k) = match term.split_once("*z8") {
                None => (term, 0usize),
                Some((c, "")) => (c, 1),
                Some((c, pow)) => {
                    let k: usize = pow.trim_start_matches('^').parse().map_err(|_| Error::Parse(term.to_string()))?;
                    (c, k)
                }
            };
            if k > 3 {
                return Err(Error::Parse(term.to_string()));
            }
            let r: BigRational = coef.parse().map_err(|_| Error::Parse(term.to_string()))?;
            comps[k] += r;
        }
        Ok(Cyc8::from_rationals(comps))
    }
}

impl Add<&Cyc8> for &Cyc8 {
    type Output = Cyc8;
    fn add(self, rhs: &Cyc8) -> Cyc8 {
        let mut out = if self.den == rhs.den {
            Cyc8 { num: std::array::from_fn(|k| &self.num[k] + &rhs.num[k]), den: self.den.clone() }
        } else {
            Cyc8 {
                num: std::array::from_fn(|k| &self.num[k] * &rhs.den + &rhs.num[k] * &self.den),
                den: &self.den * &rhs.den,
            }
        };
        out.normalize();
        out
    }
}

impl Sub<&Cyc8> for &Cyc8 {
    type Output = Cyc8;
    fn sub(self, rhs: &Cyc8) -> Cyc8 {
        self + &(-rhs)
    }
}

impl Mul<&Cyc8> for &Cyc8 {
    type Output = Cyc8;
    fn mul(self, rhs: &Cyc8) -> Cyc8 {
        let a = &self.num;
        let b = &rhs.num;
        let mut c: [BigInt; 4] = Default::default();
        for i in 0..4 {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                if b[j].is_zero() {
                    continue;
                }
                let p = &a[i] * &b[j];
                if i + j < 4 {
                    c[i + j] += p;
                } else {
                    c[i + j - 4] -= p;
                }
            }
        }
        let mut out = Cyc8 { num: c, den: &self.den * &rhs.den };
        out.normalize();
        out
    }
}

impl Neg for &Cyc8 {
    type Output = Cyc8;
    fn neg(self) -> Cyc8 {
        Cyc8 { num: self.num.clone().map(|c| -c), den: self.den.clone() }
    }
}

impl Neg for Cyc8 {
    type Output = Cyc8;
    fn neg(self) -> Cyc8 {
        -&self
    }
}

impl Add for Cyc8 {
    type Output = Cyc8;
    fn add(self, rhs: Cyc8) -> Cyc8 {
        &self + &rhs
    }
}

impl Sub for Cyc8 {
    type Output = Cyc8;
    fn sub(self, rhs: Cyc8) -> Cyc8 {
        &self - &rhs
    }
}

impl Mul for Cyc8 {
    type Output = Cyc8;
    fn mul(self, rhs: Cyc8) -> Cyc8 {
        &self * &rhs
    }
}

impl AddAssign<&Cyc8> for Cyc8 {
    fn add_assign(&mut self, rhs: &Cyc8) {
        if self.den == rhs.den {
            for k in 0..4 {
                self.num[k] += &rhs.num[k];
            }
            if !self.den.is_one() {
                self.normalize();
            }
        } else {
            *self = &*self + rhs;
        }
    }
}

impl SubAssign<&Cyc8> for Cyc8 {
    fn sub_assign(&mut self, rhs: &Cyc8) {
        *self += &(-rhs);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_squared_is_minus_one() {
        assert_eq!(&Cyc8::i() * &Cyc8::i(), Cyc8::from_int(-1));
    }

    #[test]
    fn self_division() {
        let x = &Cyc8::one() + &Cyc8::i();
        assert!(x.div(&x).unwrap().is_one());
    }

    #[test]
    fn zeta_times_minus_zeta_cubed() {
        let z = Cyc8::zeta8(1);
        let w = -Cyc8::zeta8(3);
        assert_eq!(&z * &w, Cyc8::one());
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(Cyc8::one().div(&Cyc8::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn inverse_of_generic_element() {
        let x = Cyc8::new([3, -1, 2, 5], 7);
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
    }

    #[test]
    fn text_round_trip() {
        let x = Cyc8::new([1, -2, 0, 3], 6);
        assert_eq!(x.to_string(), "1/6 + -1/3*z8 + 0/1*z8^2 + 1/2*z8^3");
        let y: Cyc8 = x.to_string().parse().unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn numeric_value_of_zeta() {
        let z = Cyc8::zeta8(1).to_complex(128);
        let (re, im) = z.to_f64();
        assert!((re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((im - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn conj_is_field_automorphism() {
        let x = Cyc8::new([1, 2, -3, 4], 5);
        let y = Cyc8::new([-2, 0, 1, 1], 3);
        assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
    }
}
