//! Partition families with smallest-part constraints: brute-force census and
//! exact generating functions.

use crate::error::{Error, Result};
use crate::exactalg::{qpoch_int, qpoch_neg_int, Cyc8, QSeries, DEFAULT_LATTICE};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const DEFAULT_CENSUS_CAP: u32 = 50;

const D: i64 = DEFAULT_LATTICE;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Spt,
    POmega,
    SptOmega,
    PbarOmega,
    SptbarOmega,
    SptG2,
}

impl Family {
    pub const ALL: [Family; 6] =
        [Family::Spt, Family::POmega, Family::SptOmega, Family::PbarOmega, Family::SptbarOmega, Family::SptG2];

    pub fn tag(self) -> &'static str {
        match self {
            Family::Spt => "spt",
            Family::POmega => "p_omega",
            Family::SptOmega => "spt_omega",
            Family::PbarOmega => "pbar_omega",
            Family::SptbarOmega => "sptbar_omega",
            Family::SptG2 => "spt_G2",
        }
    }

    fn rules(self) -> Option<Rules> {
        let (odd_bound, overlined, weighted) = match self {
            Family::Spt => (false, false, true),
            Family::POmega => (true, false, false),
            Family::SptOmega => (true, false, true),
            Family::PbarOmega => (true, true, false),
            Family::SptbarOmega => (true, true, true),
            Family::SptG2 => return None,
        };
        Some(Rules { odd_bound, overlined, weighted })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        Family::ALL
            .into_iter()
            .find(|f| f.tag().to_ascii_lowercase() == norm)
            .ok_or_else(|| Error::UnknownObject(format!("family {s}")))
    }
}

/// Which side of a family's identity to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// The q-factorial sum defining the generating function.
    Definition,
    /// The companion expression the definition is identified with.
    Alternate,
}

#[derive(Clone, Copy, Debug)]
struct Rules {
    /// odd parts must be < 2·smallest
    odd_bound: bool,
    /// overpartitions with the smallest part always overlined
    overlined: bool,
    /// weight by the multiplicity of the smallest part
    weighted: bool,
}

/// A partition stored as ascending parts; `overlined` lists the part sizes
/// whose first occurrence carries an overline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overpartition {
    pub parts: Vec<u32>,
    pub overlined: Vec<u32>,
}

impl Overpartition {
    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn smallest(&self) -> Option<u32> {
        self.parts.first().copied()
    }

    pub fn smallest_multiplicity(&self) -> usize {
        match self.smallest() {
            Some(s) => self.parts.iter().take_while(|p| **p == s).count(),
            None => 0,
        }
    }
}

/// Calls `visit` on every (over)partition of `n` admitted by the family.
pub fn enumerate<F: FnMut(&Overpartition)>(family: Family, n: u32, cap: u32, mut visit: F) -> Result<()> {
    let rules = family.rules().ok_or_else(|| Error::NoCombinatorialDefinition(family.tag().into()))?;
    if n > cap {
        return Err(Error::ResourceBound(format!("census n = {n} exceeds cap {cap}")));
    }
    let mut cur = Overpartition { parts: Vec::new(), overlined: Vec::new() };
    for s in 1..=n {
        let mut m = 1;
        while m * s <= n {
            cur.parts.extend(std::iter::repeat(s).take(m as usize));
            if rules.overlined {
                cur.overlined.push(s);
            }
            rest(&rules, s, s + 1, n - m * s, &mut cur, &mut visit);
            if rules.overlined {
                cur.overlined.pop();
            }
            cur.parts.truncate(cur.parts.len() - m as usize);
            m += 1;
        }
    }
    Ok(())
}

fn rest<F: FnMut(&Overpartition)>(rules: &Rules, s: u32, from: u32, left: u32, cur: &mut Overpartition, visit: &mut F) {
    if left == 0 {
        visit(cur);
        return;
    }
    for k in from..=left {
        if rules.odd_bound && k % 2 == 1 && k >= 2 * s {
            continue;
        }
        let mut m = 1;
        while m * k <= left {
            cur.parts.extend(std::iter::repeat(k).take(m as usize));
            rest(rules, s, k + 1, left - m * k, cur, visit);
            if rules.overlined {
                cur.overlined.push(k);
                rest(rules, s, k + 1, left - m * k, cur, visit);
                cur.overlined.pop();
            }
            cur.parts.truncate(cur.parts.len() - m as usize);
            m += 1;
        }
    }
}

/// Exhaustive count of the family at n, with the default cap.
pub fn census(family: Family, n: u32) -> Result<u64> {
    census_capped(family, n, DEFAULT_CENSUS_CAP)
}

pub fn census_capped(family: Family, n: u32, cap: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidArgument("census needs n >= 1".into()));
    }
    let weighted = family.rules().map(|r| r.weighted).unwrap_or(false);
    let mut total = 0u64;
    enumerate(family, n, cap, |p| {
        total += if weighted { p.smallest_multiplicity() as u64 } else { 1 };
    })?;
    Ok(total)
}

/// Rows (n, count) for n = 1..=n_max.
pub fn census_table(family: Family, n_max: u32) -> Result<Vec<(u32, u64)>> {
    (1..=n_max).map(|n| Ok((n, census(family, n)?))).collect()
}

/// Generating function of the family to O(q^order), on the default lattice.
pub fn genfun(family: Family, side: Side, order: i64) -> Result<QSeries> {
    if order < 1 {
        return Ok(QSeries::zero(D, order.max(0) * D));
    }
    let n = order;
    match (family, side) {
        (Family::Spt, Side::Definition) => smallest_parts_sum(n, |k, o| {
            let tail = qpoch_int(k + 1, 1, None, D, o)?.invert()?;
            Ok((2, tail))
        }),
        (Family::Spt, Side::Alternate) => {
            let inv = qpoch_int(1, 1, None, D, n)?.invert()?;
            let inner = divisor_sum(n).add(&pentagonal_poles(n)?)?;
            inv.mul(&inner)
        }
        (Family::POmega, Side::Definition) => smallest_parts_sum(n, |k, o| Ok((1, omega_tail(k, o)?))),
        (Family::POmega, Side::Alternate) => Ok(omega(n - 1)?.mul_monomial(&Cyc8::one(), D)),
        (Family::SptOmega, Side::Definition) => smallest_parts_sum(n, |k, o| Ok((2, omega_tail(k, o)?))),
        (Family::SptOmega, Side::Alternate) => {
            let inv = qpoch_int(2, 2, None, D, n)?.invert()?;
            let mut inner = divisor_sum(n);
            for k in 1.. {
                let e = k * (3 * k + 1);
                if e >= n {
                    break;
                }
                let o = n - e;
                let num = QSeries::from_terms(D, [(0, Cyc8::one()), (2 * k * D, Cyc8::one())], o * D);
                let t = num.mul(&geometric_sq(2 * k, o))?.mul_monomial(&Cyc8::from_int(sign(k)), e * D);
                inner = inner.add(&t.truncate(n * D))?;
            }
            inv.mul(&inner)
        }
        (Family::PbarOmega, Side::Definition) => smallest_parts_sum(n, |k, o| Ok((1, overline_tail(k, o)?))),
        (Family::PbarOmega, Side::Alternate) => {
            let top = (n - 1).min(DEFAULT_CENSUS_CAP as i64);
            let mut coeffs = vec![0i64; (top + 1) as usize];
            for m in 1..=top {
                coeffs[m as usize] = census(Family::PbarOmega, m as u32)? as i64;
            }
            Ok(QSeries::from_int_coeffs(D, &coeffs, top + 1))
        }
        (Family::SptbarOmega, Side::Definition) | (Family::SptG2, Side::Alternate) => {
            smallest_parts_sum(n, |k, o| Ok((2, overline_tail(k, o)?)))
        }
        (Family::SptbarOmega, Side::Alternate) => {
            let pre = qpoch_neg_int(2, 2, None, D, n)?.mul(&qpoch_int(2, 2, None, D, n)?.invert()?)?;
            let mut inner = divisor_sum(n);
            for k in 1.. {
                let e = 2 * k * (k + 1);
                if e >= n {
                    break;
                }
                let o = n - e;
                let t = geometric_sq(2 * k, o).mul_monomial(&Cyc8::from_int(2 * sign(k)), e * D);
                inner = inner.add(&t.truncate(n * D))?;
            }
            pre.mul(&inner)
        }
        (Family::SptG2, Side::Definition) => smallest_parts_sum(n, |k, o| {
            let a = qpoch_int(k + 1, 1, Some(k as usize), D, o)?;
            let den = a
                .mul(&a)?
                .mul(&qpoch_int(2 * k + 2, 2, None, D, o)?)?
                .mul(&qpoch_int(4 * k + 2, 4, None, D, o)?)?;
            Ok((2, den.invert()?))
        }),
    }
}

fn sign(k: i64) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Σ_{k≥1} q^k/(1−q^k)^p · T_k(q), where `tail(k, o)` returns (p, T_k to O(q^o)).
fn smallest_parts_sum<F>(n: i64, tail: F) -> Result<QSeries>
where
    F: Fn(i64, i64) -> Result<(u32, QSeries)>,
{
    let mut acc = QSeries::zero(D, n * D);
    for k in 1..n {
        let o = n - k;
        let (p, t) = tail(k, o)?;
        let g = if p == 1 { geometric(k, o) } else { geometric_sq(k, o) };
        let term = g.mul(&t)?.mul_monomial(&Cyc8::one(), k * D);
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// 1/((q^{k+1};q)_k (q^{2k+2};q²)_∞)
fn omega_tail(k: i64, o: i64) -> Result<QSeries> {
    qpoch_int(k + 1, 1, Some(k as usize), D, o)?.mul(&qpoch_int(2 * k + 2, 2, None, D, o)?)?.invert()
}

/// (−q^{k+1};q)_k (−q^{2k+2};q²)_∞ / ((q^{k+1};q)_k (q^{2k+2};q²)_∞)
fn overline_tail(k: i64, o: i64) -> Result<QSeries> {
    let num = qpoch_neg_int(k + 1, 1, Some(k as usize), D, o)?.mul(&qpoch_neg_int(2 * k + 2, 2, None, D, o)?)?;
    num.mul(&omega_tail(k, o)?)
}

/// ω(q) = Σ_{n≥0} q^{2n(n+1)}/(q;q²)_{n+1}² to O(q^o).
pub fn omega(o: i64) -> Result<QSeries> {
    let mut acc = QSeries::zero(D, o * D);
    for k in 0.. {
        let e = 2 * k * (k + 1);
        if e >= o {
            break;
        }
        let r = o - e;
        let den = qpoch_int(1, 2, Some((k + 1) as usize), D, r)?;
        let t = den.mul(&den)?.invert()?.mul_monomial(&Cyc8::one(), e * D);
        acc = acc.add(&t)?;
    }
    Ok(acc)
}

/// Σ_k q^{k·j} to O(q^o).
fn geometric(k: i64, o: i64) -> QSeries {
    QSeries::from_terms(D, (0..).map(|j| j * k).take_while(|e| *e < o).map(|e| (e * D, Cyc8::one())), o * D)
}

/// 1/(1−q^k)² = Σ (j+1) q^{k·j} to O(q^o).
fn geometric_sq(k: i64, o: i64) -> QSeries {
    QSeries::from_terms(
        D,
        (0..).take_while(|j| j * k < o).map(|j| (j * k * D, Cyc8::from_int(j + 1))),
        o * D,
    )
}

/// Σ_{k≥1} k q^k/(1−q^k) = Σ σ(m) q^m.
fn divisor_sum(n: i64) -> QSeries {
    let mut c = vec![0i64; n.max(1) as usize];
    for k in 1..n {
        let mut m = k;
        while m < n {
            c[m as usize] += k;
            m += k;
        }
    }
    QSeries::from_int_coeffs(D, &c, n)
}

/// Σ_{k≥1} (−1)^k q^{k(3k+1)/2}(1+q^k)/(1−q^k)².
fn pentagonal_poles(n: i64) -> Result<QSeries> {
    let mut acc = QSeries::zero(D, n * D);
    for k in 1.. {
        let e = k * (3 * k + 1) / 2;
        if e >= n {
            break;
        }
        let o = n - e;
        let num = QSeries::from_terms(D, [(0, Cyc8::one()), (k * D, Cyc8::one())], o * D);
        let t = num.mul(&geometric_sq(k, o))?.mul_monomial(&Cyc8::from_int(sign(k)), e * D);
        acc = acc.add(&t)?;
    }
    Ok(acc)
}
