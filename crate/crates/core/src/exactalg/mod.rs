//! Exact arithmetic kernel: Q(ζ₈) coefficients, q-series on a fractional
//! exponent lattice, and two-variable Jacobi series.

mod cyc8;
mod jacobi;
mod qseries;

pub use cyc8::Cyc8;
pub use jacobi::{jacobi_qpochhammer, JacobiSeries, ZetaPoint, DEFAULT_ZETA_LATTICE};
pub use qseries::{format_exponent, scale_exponent, Mismatch, QSeries, DEFAULT_LATTICE};

use crate::error::{Error, Result};
use num_rational::Rational64;

/// coef · q^{q_exp} · ζ^{z_exp}.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coef: Cyc8,
    pub q_exp: Rational64,
    pub z_exp: Rational64,
}

impl Monomial {
    pub fn new(coef: Cyc8, q_exp: Rational64, z_exp: Rational64) -> Self {
        Monomial { coef, q_exp, z_exp }
    }

    /// coef · q^{q_exp}.
    pub fn q(coef: Cyc8, q_exp: Rational64) -> Self {
        Monomial::new(coef, q_exp, Rational64::from_integer(0))
    }

    /// q^{num/den}.
    pub fn q_pow(num: i64, den: i64) -> Self {
        Monomial::q(Cyc8::one(), Rational64::new(num, den))
    }

    pub fn one() -> Self {
        Monomial::q_pow(0, 1)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::new(&self.coef * &other.coef, self.q_exp + other.q_exp, self.z_exp + other.z_exp)
    }

    pub fn div(&self, other: &Monomial) -> Result<Monomial> {
        Ok(Monomial::new(self.coef.div(&other.coef)?, self.q_exp - other.q_exp, self.z_exp - other.z_exp))
    }

    pub fn neg(&self) -> Monomial {
        Monomial::new(-&self.coef, self.q_exp, self.z_exp)
    }

    pub fn powi(&self, n: i64) -> Result<Monomial> {
        let c = if n >= 0 { self.coef.pow(n as u32) } else { self.coef.inv()?.pow((-n) as u32) };
        Ok(Monomial::new(c, self.q_exp * n, self.z_exp * n))
    }
}

/// Π_{j=0}^{n−1}(1 − base·q^{j·step}) to O(q^{order/d}); `n = None` is the
/// infinite product.
pub fn qpochhammer_step(base: &Monomial, step: Rational64, n: Option<usize>, d: i64, order: i64) -> Result<QSeries> {
    if base.z_exp != Rational64::from_integer(0) {
        return Err(Error::InvalidArgument("q-Pochhammer base must not involve zeta".into()));
    }
    let e0 = scale_exponent(base.q_exp, d)?;
    let s = scale_exponent(step, d)?;
    if n.is_none() && s <= 0 {
        return Err(Error::DivergentProduct(format!("step q^{step} does not increase")));
    }
    let mut acc = QSeries::one(d, order);
    let mut j = 0usize;
    loop {
        if let Some(n) = n {
            if j >= n {
                break;
            }
        }
        let e = e0 + j as i64 * s;
        if e > 0 && acc.floor() + e >= acc.order() && (n.is_none() || s > 0) {
            break;
        }
        let ord_f = (acc.order() - acc.floor() + e.min(0)).max(e).max(0) + 1;
        let factor = QSeries::from_terms(d, [(0, Cyc8::one()), (e, -&base.coef)], ord_f);
        acc = acc.mul(&factor)?;
        j += 1;
        if n.is_none() && j > 1_000_000 {
            return Err(Error::DivergentProduct("too many factors".into()));
        }
    }
    Ok(acc.truncate(order))
}

/// (base; q)_n to O(q^{order/d}).
pub fn qpochhammer(base: &Monomial, n: Option<usize>, d: i64, order: i64) -> Result<QSeries> {
    qpochhammer_step(base, Rational64::from_integer(1), n, d, order)
}

/// (q^a; q^s)_n with integer exponents, on lattice d, to O(q^{order_whole}).
pub fn qpoch_int(a: i64, s: i64, n: Option<usize>, d: i64, order_whole: i64) -> Result<QSeries> {
    qpochhammer_step(&Monomial::q_pow(a, 1), Rational64::from_integer(s), n, d, order_whole * d)
}

/// (−q^a; q^s)_n with integer exponents.
pub fn qpoch_neg_int(a: i64, s: i64, n: Option<usize>, d: i64, order_whole: i64) -> Result<QSeries> {
    qpochhammer_step(&Monomial::q(Cyc8::from_int(-1), Rational64::from_integer(a)), Rational64::from_integer(s), n, d, order_whole * d)
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: i64 = DEFAULT_LATTICE;

    #[test]
    fn empty_product() {
        let p = qpochhammer(&Monomial::q_pow(3, 1), Some(0), D, 10 * D).unwrap();
        assert_eq!(p, QSeries::one(D, 10 * D));
    }

    #[test]
    fn euler_product_low_order() {
        let p = qpochhammer(&Monomial::q_pow(1, 1), None, D, 6 * D).unwrap();
        assert_eq!(p, QSeries::from_int_coeffs(D, &[1, -1, -1, 0, 0, 1], 6));
    }

    #[test]
    fn single_factor_step_two() {
        let p = qpoch_int(2, 2, Some(1), D, 10).unwrap();
        assert_eq!(p, QSeries::from_int_coeffs(D, &[1, 0, -1], 10));
    }

    #[test]
    fn divergent_step() {
        let r = qpochhammer_step(&Monomial::q_pow(1, 1), Rational64::from_integer(0), None, D, 5 * D);
        assert!(matches!(r, Err(Error::DivergentProduct(_))));
    }
}
