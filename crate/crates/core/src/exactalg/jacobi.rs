//! Series in q whose coefficients are Laurent polynomials in a second
//! variable ζ with fractional exponents.
//!
//! q-exponents are scaled by `d`, ζ-exponents by `dz`. A substitution
//! ζ := c·q^a with a ≠ 0 moves mass across the truncation, so it needs a
//! bound on the ζ-support of the *whole* series, not only of the stored part.
//! That bound is the optional zeta window, in scaled units.

use super::cyc8::Cyc8;
use super::qseries::{format_exponent, scale_exponent, Mismatch, QSeries};
use super::Monomial;
use crate::error::{Error, Result};
use num_rational::Rational64;
use std::collections::BTreeMap;

pub const DEFAULT_ZETA_LATTICE: i64 = 4;

/// Evaluation points for the ζ-derivative brackets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZetaPoint {
    /// [∂/∂ζ]_{ζ=1}
    One,
    /// [ζ ∂/∂ζ]_{ζ=q}
    Q,
}

type Row = BTreeMap<i64, Cyc8>;

#[derive(Clone, Debug, PartialEq)]
pub struct JacobiSeries {
    d: i64,
    dz: i64,
    terms: BTreeMap<i64, Row>,
    order: i64,
    window: Option<(i64, i64)>,
}

fn add_into(row: &mut Row, z: i64, c: &Cyc8) {
    let zero = {
        let e = row.entry(z).or_insert_with(Cyc8::zero);
        *e += c;
        e.is_zero()
    };
    if zero {
        row.remove(&z);
    }
}

fn window_union(a: Option<(i64, i64)>, b: Option<(i64, i64)>) -> Option<(i64, i64)> {
    match (a, b) {
        (Some((l1, h1)), Some((l2, h2))) => Some((l1.min(l2), h1.max(h2))),
        _ => None,
    }
}

fn window_sum(a: Option<(i64, i64)>, b: Option<(i64, i64)>) -> Option<(i64, i64)> {
    match (a, b) {
        (Some((l1, h1)), Some((l2, h2))) => Some((l1 + l2, h1 + h2)),
        _ => None,
    }
}

impl JacobiSeries {
    pub fn zero(d: i64, dz: i64, order: i64) -> Self {
        assert!(d > 0 && dz > 0, "lattice denominators must be positive");
        JacobiSeries { d, dz, terms: BTreeMap::new(), order, window: Some((0, 0)) }
    }

    pub fn one(d: i64, dz: i64, order: i64) -> Self {
        JacobiSeries::from_terms(d, dz, [(0, 0, Cyc8::one())], order)
    }

    /// Builds from (scaled q-exponent, scaled ζ-exponent, coefficient) triples.
    /// The zeta window is left undeclared.
    pub fn from_terms<I: IntoIterator<Item = (i64, i64, Cyc8)>>(d: i64, dz: i64, terms: I, order: i64) -> Self {
        let mut j = JacobiSeries::zero(d, dz, order);
        j.window = None;
        for (q, z, c) in terms {
            if q < order && !c.is_zero() {
                let row = j.terms.entry(q).or_default();
                add_into(row, z, &c);
                if row.is_empty() {
                    j.terms.remove(&q);
                }
            }
        }
        j
    }

    /// A ζ-free series; its ζ-support is {0} at every order.
    pub fn from_qseries(s: &QSeries, dz: i64) -> Self {
        let mut j = JacobiSeries::from_terms(s.lattice(), dz, s.terms().iter().map(|(e, c)| (*e, 0, c.clone())), s.order());
        j.window = Some((0, 0));
        j
    }

    /// A single monomial; its window is the single exponent.
    pub fn monomial(d: i64, dz: i64, m: &Monomial, order: i64) -> Result<Self> {
        let q = scale_exponent(m.q_exp, d)?;
        let z = scale_exponent(m.z_exp, dz)?;
        let mut j = JacobiSeries::from_terms(d, dz, [(q, z, m.coef.clone())], order);
        j.window = Some((z, z));
        Ok(j)
    }

    pub fn lattice(&self) -> i64 {
        self.d
    }

    pub fn zeta_lattice(&self) -> i64 {
        self.dz
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn floor(&self) -> i64 {
        self.terms.keys().next().copied().unwrap_or(self.order)
    }

    pub fn zeta_window(&self) -> Option<(i64, i64)> {
        self.window
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored (q, ζ) monomials.
    pub fn len(&self) -> usize {
        self.terms.values().map(|r| r.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Declares that every ζ-exponent of the full series lies in [lo, hi]
    /// (scaled by `dz`). Fails if a stored exponent already violates it.
    pub fn with_zeta_window(mut self, lo: i64, hi: i64) -> Result<Self> {
        for row in self.terms.values() {
            for z in row.keys() {
                if *z < lo || *z > hi {
                    return Err(Error::WindowTooSmall { exponent: format_exponent(*z, self.dz), lo, hi });
                }
            }
        }
        self.window = Some((lo, hi));
        Ok(self)
    }

    /// Stored (q, ζ, coefficient) triples in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, &Cyc8)> + '_ {
        self.terms.iter().flat_map(|(q, row)| row.iter().map(move |(z, c)| (*q, *z, c)))
    }

    pub fn coeff(&self, q: i64, z: i64) -> Cyc8 {
        self.terms.get(&q).and_then(|r| r.get(&z)).cloned().unwrap_or_else(Cyc8::zero)
    }

    /// The q-series multiplying ζ^{z/dz}.
    pub fn zeta_coeff(&self, z: i64) -> QSeries {
        QSeries::from_terms(
            self.d,
            self.terms.iter().filter_map(|(q, row)| row.get(&z).map(|c| (*q, c.clone()))),
            self.order,
        )
    }

    fn check(&self, other: &JacobiSeries) -> Result<()> {
        if self.d != other.d || self.dz != other.dz {
            return Err(Error::LatticeMismatch(format!(
                "(1/{}, 1/{}) vs (1/{}, 1/{})",
                self.d, self.dz, other.d, other.dz
            )));
        }
        Ok(())
    }

    pub fn truncate(&self, order: i64) -> Self {
        let order = order.min(self.order);
        let mut j = self.clone();
        j.terms = self.terms.range(..order).map(|(q, r)| (*q, r.clone())).collect();
        j.order = order;
        j
    }

    pub fn add(&self, other: &JacobiSeries) -> Result<Self> {
        self.check(other)?;
        let order = self.order.min(other.order);
        let mut out = self.truncate(order);
        for (q, row) in other.terms.range(..order) {
            let r = out.terms.entry(*q).or_default();
            for (z, c) in row {
                add_into(r, *z, c);
            }
            if r.is_empty() {
                out.terms.remove(q);
            }
        }
        out.window = window_union(self.window, other.window);
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.scale(&Cyc8::from_int(-1))
    }

    pub fn sub(&self, other: &JacobiSeries) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Cyc8) -> Self {
        let mut j = self.clone();
        if c.is_zero() {
            j.terms.clear();
            return j;
        }
        for row in j.terms.values_mut() {
            for v in row.values_mut() {
                *v = &*v * c;
            }
        }
        j
    }

    /// Product, truncated at min(ordA + floorB, ordB + floorA).
    pub fn mul(&self, other: &JacobiSeries) -> Result<Self> {
        self.check(other)?;
        let (fa, fb) = (self.floor(), other.floor());
        let order = (self.order + fb).min(other.order + fa);
        let mut out = JacobiSeries::zero(self.d, self.dz, order);
        out.window = window_sum(self.window, other.window);
        for (qa, ra) in &self.terms {
            if qa + fb >= order {
                break;
            }
            for (qb, rb) in &other.terms {
                let q = qa + qb;
                if q >= order {
                    break;
                }
                let row = out.terms.entry(q).or_default();
                for (za, ca) in ra {
                    for (zb, cb) in rb {
                        add_into(row, za + zb, &(ca * cb));
                    }
                }
            }
        }
        out.terms.retain(|_, r| !r.is_empty());
        Ok(out)
    }

    pub fn mul_qseries(&self, s: &QSeries) -> Result<Self> {
        self.mul(&JacobiSeries::from_qseries(s, self.dz))
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Result<Self> {
        let q = scale_exponent(m.q_exp, self.d)?;
        let z = scale_exponent(m.z_exp, self.dz)?;
        let mut j = JacobiSeries::zero(self.d, self.dz, self.order + q);
        if m.coef.is_zero() {
            return Ok(j);
        }
        for (qe, row) in &self.terms {
            j.terms.insert(qe + q, row.iter().map(|(ze, c)| (ze + z, c * &m.coef)).collect());
        }
        j.window = self.window.map(|(lo, hi)| (lo + z, hi + z));
        Ok(j)
    }

    /// ζ ∂/∂ζ applied termwise.
    pub fn zeta_euler(&self) -> Self {
        let mut j = self.clone();
        for row in j.terms.values_mut() {
            for (z, c) in row.iter_mut() {
                *c = c.scale_rational(Rational64::new(*z, self.dz));
            }
            row.retain(|_, c| !c.is_zero());
        }
        j.terms.retain(|_, r| !r.is_empty());
        j
    }

    /// ζ ↦ val. `val` must be free of ζ; a fractional power of its coefficient
    /// is only taken for eighth roots of unity.
    pub fn substitute(&self, val: &Monomial) -> Result<QSeries> {
        if val.z_exp != Rational64::from_integer(0) {
            return Err(Error::InvalidArgument("substituted value must not involve zeta".into()));
        }
        let a = val.q_exp;
        let order = if a == Rational64::from_integer(0) {
            self.order
        } else {
            let (lo, hi) = self.window.ok_or(Error::UnboundedZetaSupport)?;
            let s1 = a * Rational64::new(lo, self.dz) * Rational64::from_integer(self.d);
            let s2 = a * Rational64::new(hi, self.dz) * Rational64::from_integer(self.d);
            self.order + s1.min(s2).floor().to_integer()
        };
        let mut powers: BTreeMap<i64, (Cyc8, i64)> = BTreeMap::new();
        let mut out: Vec<(i64, Cyc8)> = Vec::new();
        let mut least: Option<i64> = None;
        for (q, z, c) in self.iter() {
            if !powers.contains_key(&z) {
                let r = Rational64::new(z, self.dz);
                let coef = coef_power(&val.coef, r)?;
                let shift = scale_exponent(a * r, self.d)?;
                powers.insert(z, (coef, shift));
            }
            let (pc, sh) = &powers[&z];
            let e = q + sh;
            least = Some(least.map_or(e, |l: i64| l.min(e)));
            out.push((e, c * pc));
        }
        if let Some(l) = least {
            if order <= l {
                return Err(Error::PrecisionExhausted { order, floor: l });
            }
        }
        Ok(QSeries::from_terms(self.d, out, order))
    }

    /// [∂/∂ζ]_{ζ=1} or [ζ ∂/∂ζ]_{ζ=q}.
    pub fn dzeta_at(&self, point: ZetaPoint) -> Result<QSeries> {
        let e = self.zeta_euler();
        match point {
            ZetaPoint::One => e.substitute(&Monomial::one()),
            ZetaPoint::Q => e.substitute(&Monomial::q_pow(1, 1)),
        }
    }

    /// Exact comparison below the smaller order.
    pub fn agree_to(&self, other: &JacobiSeries) -> Result<std::result::Result<i64, Mismatch>> {
        let diff = self.sub(other)?;
        let first = diff.iter().next().map(|(q, z, _)| (q, z));
        match first {
            None => Ok(Ok(diff.order)),
            Some((q, z)) => Ok(Err(Mismatch {
                exponent: format!("q^{} z^{}", format_exponent(q, self.d), format_exponent(z, self.dz)),
                left: self.coeff(q, z).to_string(),
                right: other.coeff(q, z).to_string(),
            })),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.iter()
                .map(|(q, z, c)| serde_json::json!([format_exponent(q, self.d), format_exponent(z, self.dz), c.to_string()]))
                .collect(),
        )
    }
}

/// Π_{j=0}^{n−1}(1 − base·q^j) with a ζ-dependent base; `n = None` is the
/// infinite product, whose ζ-window is then undeclared unless base is ζ-free.
pub fn jacobi_qpochhammer(base: &Monomial, n: Option<usize>, d: i64, dz: i64, order: i64) -> Result<JacobiSeries> {
    let e0 = scale_exponent(base.q_exp, d)?;
    let z = scale_exponent(base.z_exp, dz)?;
    let mut acc = JacobiSeries::one(d, dz, order);
    acc.window = Some((0, 0));
    let mut j = 0usize;
    loop {
        if let Some(n) = n {
            if j >= n {
                break;
            }
        }
        let e = e0 + j as i64 * d;
        if e > 0 && acc.floor() + e >= acc.order() {
            break;
        }
        let ord_f = (acc.order() - acc.floor() + e.min(0)).max(e).max(0) + 1;
        let mut factor = JacobiSeries::from_terms(d, dz, [(0, 0, Cyc8::one()), (e, z, -&base.coef)], ord_f);
        factor.window = Some((z.min(0), z.max(0)));
        acc = acc.mul(&factor)?;
        j += 1;
        if j > 1_000_000 {
            return Err(Error::DivergentProduct("too many factors".into()));
        }
    }
    if n.is_none() && z != 0 {
        acc.window = None;
    }
    Ok(acc.truncate(order))
}

/// c^r for a rational r. Integer r is exact for any nonzero c; otherwise c must
/// be ζ₈^k and k·r an integer, giving ζ₈^{k·r}.
fn coef_power(c: &Cyc8, r: Rational64) -> Result<Cyc8> {
    if r.is_integer() {
        let n = r.to_integer();
        return if n >= 0 { Ok(c.pow(n as u32)) } else { Ok(c.inv()?.pow((-n) as u32)) };
    }
    for k in 0..8 {
        if *c == Cyc8::zeta8(k) {
            let kr = r * Rational64::from_integer(k);
            if kr.is_integer() {
                return Ok(Cyc8::zeta8(kr.to_integer()));
            }
            break;
        }
    }
    Err(Error::RootOfUnityOutsideCyc8(format!("({c})^({r})")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::DEFAULT_LATTICE;

    const D: i64 = DEFAULT_LATTICE;
    const DZ: i64 = DEFAULT_ZETA_LATTICE;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn substitute_one() {
        let j = JacobiSeries::from_terms(D, DZ, [(D, 2 * DZ, Cyc8::one())], 5 * D);
        let s = j.substitute(&Monomial::one()).unwrap();
        assert_eq!(s, QSeries::from_int_coeffs(D, &[0, 1], 5));
    }

    #[test]
    fn substitute_q() {
        let j = JacobiSeries::from_terms(D, DZ, [(0, DZ, Cyc8::one()), (D, -DZ, Cyc8::one())], 5 * D)
            .with_zeta_window(-DZ, DZ)
            .unwrap();
        let s = j.substitute(&Monomial::q_pow(1, 1)).unwrap();
        // ζ + ζ⁻¹q at ζ = q is q + 1
        assert_eq!(s, QSeries::from_int_coeffs(D, &[1, 1], 4));
        let t = JacobiSeries::from_terms(D, DZ, [(0, DZ, Cyc8::one()), (2 * D, -DZ, Cyc8::one())], 5 * D)
            .with_zeta_window(-DZ, DZ)
            .unwrap();
        assert_eq!(t.substitute(&Monomial::q_pow(1, 1)).unwrap(), QSeries::from_int_coeffs(D, &[0, 2], 4));
    }

    #[test]
    fn substitute_q_needs_window() {
        let j = JacobiSeries::from_terms(D, DZ, [(0, DZ, Cyc8::one())], 5 * D);
        assert_eq!(j.substitute(&Monomial::q_pow(1, 1)), Err(Error::UnboundedZetaSupport));
    }

    #[test]
    fn window_too_small() {
        let j = JacobiSeries::from_terms(D, DZ, [(0, 3, Cyc8::one())], D);
        assert!(matches!(j.with_zeta_window(0, 2), Err(Error::WindowTooSmall { .. })));
    }

    #[test]
    fn precision_exhausted() {
        let j = JacobiSeries::from_terms(D, DZ, [(0, 0, Cyc8::one())], D)
            .with_zeta_window(-2 * DZ, 0)
            .unwrap();
        assert!(matches!(j.substitute(&Monomial::q_pow(1, 1)), Err(Error::PrecisionExhausted { .. })));
    }

    #[test]
    fn dzeta_power_rule() {
        let j = JacobiSeries::monomial(D, DZ, &Monomial::new(Cyc8::one(), r(0, 1), r(1, 2)), D).unwrap();
        let s = j.dzeta_at(ZetaPoint::One).unwrap();
        assert_eq!(s.coeff(0), Cyc8::from_rational(r(1, 2)));

        let sym = JacobiSeries::from_terms(D, DZ, [(0, DZ, Cyc8::one()), (0, -DZ, Cyc8::one())], D);
        assert!(sym.dzeta_at(ZetaPoint::One).unwrap().is_zero());

        for k in -2..=2i64 {
            let m = JacobiSeries::monomial(D, DZ, &Monomial::new(Cyc8::one(), r(0, 1), r(k, 1)), 10 * D).unwrap();
            let s = m.dzeta_at(ZetaPoint::Q).unwrap();
            let want = QSeries::from_terms(D, [(k * D, Cyc8::from_int(k))], s.order());
            assert_eq!(s, want, "k = {k}");
        }
    }

    #[test]
    fn zeta_pochhammer() {
        // (ζ;q)_2 = 1 − ζ − ζq + ζ²q
        let p = jacobi_qpochhammer(&Monomial::new(Cyc8::one(), r(0, 1), r(1, 1)), Some(2), D, DZ, 3 * D).unwrap();
        let want = JacobiSeries::from_terms(
            D,
            DZ,
            [(0, 0, Cyc8::one()), (0, DZ, Cyc8::from_int(-1)), (D, DZ, Cyc8::from_int(-1)), (D, 2 * DZ, Cyc8::one())],
            3 * D,
        );
        assert!(p.agree_to(&want).unwrap().is_ok());
        assert_eq!(p.zeta_window(), Some((0, 2 * DZ)));
    }

    #[test]
    fn fractional_root_power() {
        let j = JacobiSeries::monomial(D, DZ, &Monomial::new(Cyc8::one(), r(0, 1), r(1, 2)), D).unwrap();
        let s = j.substitute(&Monomial::q(Cyc8::from_int(-1), r(0, 1))).unwrap();
        assert_eq!(s.coeff(0), Cyc8::i());
        let bad = j.substitute(&Monomial::q(Cyc8::from_int(2), r(0, 1)));
        assert!(matches!(bad, Err(Error::RootOfUnityOutsideCyc8(_))));
    }

    #[test]
    fn substitution_is_multiplicative() {
        let a = JacobiSeries::from_terms(D, DZ, [(0, DZ, Cyc8::one()), (D, -DZ, Cyc8::i())], 6 * D)
            .with_zeta_window(-DZ, DZ)
            .unwrap();
        let b = JacobiSeries::from_terms(D, DZ, [(0, 0, Cyc8::one()), (2 * D, 2, Cyc8::from_int(3))], 6 * D)
            .with_zeta_window(0, 2)
            .unwrap();
        let ab = a.mul(&b).unwrap();
        for v in [Monomial::one(), Monomial::q_pow(1, 1), Monomial::q(Cyc8::zeta8(2), r(1, 2))] {
            let lhs = ab.substitute(&v).unwrap();
            let rhs = a.substitute(&v).unwrap().mul(&b.substitute(&v).unwrap()).unwrap();
            assert!(lhs.agree_to(&rhs).unwrap().is_ok());
        }
    }
}
