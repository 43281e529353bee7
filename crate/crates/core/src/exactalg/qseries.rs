//! Truncated Laurent–Puiseux series in q with Q(ζ₈) coefficients.
//!
//! Exponents are stored scaled by the lattice denominator `d`: the scaled
//! exponent k stands for q^{k/d}. A series is known modulo q^{order/d}.

use super::cyc8::Cyc8;
use super::Monomial;
use crate::error::{Error, Result};
use crate::hp::{HpComplex, UHPoint};
use num_integer::Integer;
use num_rational::Rational64;
use serde::Serialize;

pub const DEFAULT_LATTICE: i64 = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct QSeries {
    d: i64,
    terms: Vec<(i64, Cyc8)>,
    order: i64,
}

/// First coefficient at which two series disagree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    pub exponent: String,
    pub left: String,
    pub right: String,
}

impl QSeries {
    pub fn zero(d: i64, order: i64) -> Self {
        assert!(d > 0, "lattice denominator must be positive");
        QSeries { d, terms: Vec::new(), order }
    }

    pub fn one(d: i64, order: i64) -> Self {
        QSeries::from_terms(d, [(0, Cyc8::one())], order)
    }

    /// Builds a series from (scaled exponent, coefficient) pairs; duplicates are
    /// summed, zeros and exponents at or beyond `order` are dropped.
    pub fn from_terms<I: IntoIterator<Item = (i64, Cyc8)>>(d: i64, terms: I, order: i64) -> Self {
        let mut v: Vec<(i64, Cyc8)> = terms.into_iter().filter(|(e, _)| *e < order).collect();
        v.sort_by_key(|(e, _)| *e);
        let mut out: Vec<(i64, Cyc8)> = Vec::with_capacity(v.len());
        for (e, c) in v {
            match out.last_mut() {
                Some((le, lc)) if *le == e => *lc += &c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        QSeries { d, terms: out, order }
    }

    /// coef·q^{e} with e an exact rational on the lattice.
    pub fn monomial(d: i64, coef: Cyc8, exp: Rational64, order: i64) -> Result<Self> {
        let e = scale_exponent(exp, d)?;
        Ok(QSeries::from_terms(d, [(e, coef)], order))
    }

    /// Integer-indexed constructor: coefficients of q^0, q^1, ... (in whole powers).
    pub fn from_int_coeffs(d: i64, coeffs: &[i64], order_whole: i64) -> Self {
        QSeries::from_terms(
            d,
            coeffs.iter().enumerate().map(|(n, c)| (n as i64 * d, Cyc8::from_int(*c))),
            order_whole * d,
        )
    }

    pub fn lattice(&self) -> i64 {
        self.d
    }

    /// Truncation order, scaled.
    pub fn order(&self) -> i64 {
        self.order
    }

    /// Truncation order as an exact rational exponent.
    pub fn order_exponent(&self) -> Rational64 {
        Rational64::new(self.order, self.d)
    }

    /// Least stored exponent (scaled), or the order for a series with no terms.
    pub fn floor(&self) -> i64 {
        self.terms.first().map(|(e, _)| *e).unwrap_or(self.order)
    }

    pub fn terms(&self) -> &[(i64, Cyc8)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of q^{e/d}.
    pub fn coeff(&self, e: i64) -> Cyc8 {
        match self.terms.binary_search_by_key(&e, |(k, _)| *k) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Cyc8::zero(),
        }
    }

    /// Coefficient of q^n for an integer n.
    pub fn coeff_whole(&self, n: i64) -> Cyc8 {
        self.coeff(n * self.d)
    }

    fn check_lattice(&self, other: &QSeries) -> Result<()> {
        if self.d != other.d {
            return Err(Error::LatticeMismatch(format!("lattice {} vs {}", self.d, other.d)));
        }
        Ok(())
    }

    pub fn truncate(&self, order: i64) -> Self {
        let order = order.min(self.order);
        QSeries { d: self.d, terms: self.terms.iter().filter(|(e, _)| *e < order).cloned().collect(), order }
    }

    pub fn add(&self, other: &QSeries) -> Result<Self> {
        self.check_lattice(other)?;
        let order = self.order.min(other.order);
        Ok(QSeries::from_terms(
            self.d,
            self.terms.iter().chain(other.terms.iter()).filter(|(e, _)| *e < order).cloned(),
            order,
        ))
    }

    pub fn sub(&self, other: &QSeries) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        QSeries { d: self.d, terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(), order: self.order }
    }

    pub fn scale(&self, c: &Cyc8) -> Self {
        if c.is_zero() {
            return QSeries::zero(self.d, self.order);
        }
        QSeries { d: self.d, terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(), order: self.order }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&Cyc8::from_int(k))
    }

    /// Multiplication by coef·q^{e/d}; the order shifts with the exponent.
    pub fn mul_monomial(&self, coef: &Cyc8, e: i64) -> Self {
        if coef.is_zero() {
            return QSeries::zero(self.d, self.order + e);
        }
        QSeries { d: self.d, terms: self.terms.iter().map(|(k, x)| (k + e, x * coef)).collect(), order: self.order + e }
    }

    pub fn mul_by(&self, m: &Monomial) -> Result<Self> {
        let e = scale_exponent(m.q_exp, self.d)?;
        Ok(self.mul_monomial(&m.coef, e))
    }

    /// Cauchy product, truncated at min(ordA + floorB, ordB + floorA).
    pub fn mul(&self, other: &QSeries) -> Result<Self> {
        self.check_lattice(other)?;
        let (fa, fb) = (self.floor(), other.floor());
        let order = (self.order + fb).min(other.order + fa);
        if self.terms.is_empty() || other.terms.is_empty() {
            return Ok(QSeries::zero(self.d, order));
        }
        let base = fa + fb;
        if order <= base {
            return Ok(QSeries::zero(self.d, order));
        }
        let g = self.step_gcd().gcd(&other.step_gcd()).max(1);
        let len = ((order - base + g - 1) / g) as usize;
        let mut acc: Vec<Cyc8> = vec![Cyc8::zero(); len];
        for (ea, ca) in &self.terms {
            if ea + fb >= order {
                break;
            }
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if e >= order {
                    break;
                }
                acc[((e - base) / g) as usize] += &(ca * cb);
            }
        }
        Ok(QSeries {
            d: self.d,
            terms: acc
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (base + i as i64 * g, c))
                .collect(),
            order,
        })
    }

    /// gcd of the exponent offsets from the floor (0 for fewer than two terms).
    fn step_gcd(&self) -> i64 {
        let f = self.floor();
        self.terms.iter().fold(0i64, |g, (e, _)| g.gcd(&(e - f)))
    }

    /// Laurent inverse; the result is known to order ord − 2·floor.
    pub fn invert(&self) -> Result<Self> {
        let (e0, c0) = match self.terms.first() {
            Some((e, c)) => (*e, c.clone()),
            None => return Err(Error::NonInvertibleLeadingTerm),
        };
        let inv0 = c0.inv()?;
        let len_scaled = self.order - e0;
        let order = self.order - 2 * e0;
        let g = self.step_gcd();
        if g == 0 {
            return Ok(QSeries::from_terms(self.d, [(-e0, inv0)], order));
        }
        let n = ((len_scaled + g - 1) / g) as usize;
        let u: Vec<(usize, Cyc8)> =
            self.terms.iter().skip(1).map(|(e, c)| (((e - e0) / g) as usize, c.clone())).collect();
        let mut w: Vec<Cyc8> = Vec::with_capacity(n);
        w.push(inv0.clone());
        let neg_inv0 = -&inv0;
        for m in 1..n {
            let mut s = Cyc8::zero();
            for (k, uk) in &u {
                if *k > m {
                    break;
                }
                let wm = &w[m - k];
                if !wm.is_zero() {
                    s += &(uk * wm);
                }
            }
            w.push(&s * &neg_inv0);
        }
        Ok(QSeries::from_terms(
            self.d,
            w.into_iter().enumerate().map(|(m, c)| (-e0 + m as i64 * g, c)),
            order,
        ))
    }

    pub fn div(&self, other: &QSeries) -> Result<Self> {
        self.mul(&other.invert()?)
    }

    pub fn pow(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.invert()?.pow(-n);
        }
        if n == 0 {
            return Ok(QSeries::one(self.d, self.order - self.floor()));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Substitution q ↦ q^m for a positive integer m.
    pub fn dilate(&self, m: i64) -> Self {
        assert!(m > 0);
        QSeries { d: self.d, terms: self.terms.iter().map(|(e, c)| (e * m, c.clone())).collect(), order: self.order * m }
    }

    /// Numeric value of the stored terms at τ.
    pub fn eval(&self, tau: &UHPoint) -> HpComplex {
        let prec = tau.prec();
        let mut acc = HpComplex::zero(prec);
        for (e, c) in &self.terms {
            let qe = tau.q_pow(Rational64::new(*e, self.d));
            acc += &(&c.to_complex(prec) * &qe);
        }
        acc
    }

    /// Exact coefficient comparison below the smaller of the two orders.
    pub fn agree_to(&self, other: &QSeries) -> Result<std::result::Result<i64, Mismatch>> {
        self.check_lattice(other)?;
        let order = self.order.min(other.order);
        let diff = self.sub(other)?;
        match diff.terms.iter().find(|(e, _)| *e < order) {
            None => Ok(Ok(order)),
            Some((e, _)) => Ok(Err(Mismatch {
                exponent: format_exponent(*e, self.d),
                left: self.coeff(*e).to_string(),
                right: other.coeff(*e).to_string(),
            })),
        }
    }

    /// `[[exponent, coefficient], ...]` pairs, ascending.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        self.terms.iter().map(|(e, c)| (format_exponent(*e, self.d), c.to_string())).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.to_pairs().into_iter().map(|(e, c)| serde_json::json!([e, c])).collect(),
        )
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("exponent,coefficient\n");
        for (e, c) in self.to_pairs() {
            s.push_str(&format!("{e},\"{c}\"\n"));
        }
        s
    }
}

/// Scaled integer exponent for q^{exp} on lattice d.
pub fn scale_exponent(exp: Rational64, d: i64) -> Result<i64> {
    let s = exp * Rational64::from_integer(d);
    if !s.is_integer() {
        return Err(Error::LatticeMismatch(format!("exponent {exp} not on lattice 1/{d}")));
    }
    Ok(s.to_integer())
}

/// Text form `k/D` of a scaled exponent.
pub fn format_exponent(e: i64, d: i64) -> String {
    format!("{e}/{d}")
}
