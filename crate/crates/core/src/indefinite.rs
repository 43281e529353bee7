//! Indefinite theta series summed over pairs of cones, the two expansions of
//! P̄_ω(ζ;q), and the completed functions built from μ̂: F̂, Ĝ, Ĥ, 𝓕, P̂_ω.
//!
//! z-derivatives of non-holomorphic pieces are Wirtinger derivatives ∂/∂z.
//! Pieces that are holomorphic in z but are assembled from terms with poles
//! at the expansion point are differentiated by trapezoidal contour sums.

use crate::appell::{r_jets, r_numeric, theta_mu, TorsionPoint};
use crate::classical::{eta_numeric, theta_jets, theta_numeric};
use crate::combinatorics::{genfun, Family, Side};
use crate::error::{Error, Result};
use crate::exactalg::{
    qpoch_int, qpoch_neg_int, scale_exponent, Cyc8, JacobiSeries, Mismatch, Monomial, QSeries, DEFAULT_LATTICE,
};
use crate::hp::{pi, root_of_unity, working_prec, HpComplex, UHPoint};
use num_rational::Rational64;
use rug::Float;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

fn rat(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn ri(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

const EPS: f64 = 1e-12;
const MAX_CONE_POINTS: u64 = 50_000_000;

/// One half-line constraint on a summation variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    AtLeast(i64),
    AtMost(i64),
}

impl Bound {
    fn frame(self) -> (i64, i64) {
        match self {
            Bound::AtLeast(l) => (1, l),
            Bound::AtMost(u) => (-1, u),
        }
    }
}

/// A product of half-lines with an overall sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub bounds: [Bound; 3],
    pub sign: i64,
}

impl Cone {
    pub fn new(bounds: [Bound; 3], sign: i64) -> Self {
        Cone { bounds, sign }
    }
}

/// The exponent form on one cone in coordinates y ≥ 0, x = o + s·y.
#[derive(Clone, Debug)]
struct Orthant {
    a: [[f64; 3]; 3],
    b: [f64; 3],
    c: f64,
    s: [i64; 3],
    o: [i64; 3],
}

impl Orthant {
    fn new(a: &[[f64; 3]; 3], b: &[f64; 3], c: f64, bounds: &[Bound; 3]) -> Result<Self> {
        let mut s = [0i64; 3];
        let mut o = [0i64; 3];
        for i in 0..3 {
            let (si, oi) = bounds[i].frame();
            s[i] = si;
            o[i] = oi;
        }
        let of = o.map(|x| x as f64);
        let mut ap = [[0.0; 3]; 3];
        let mut bp = [0.0; 3];
        let mut cp = c;
        for i in 0..3 {
            let mut ao = 0.0;
            for j in 0..3 {
                ap[i][j] = (s[i] * s[j]) as f64 * a[i][j];
                ao += a[i][j] * of[j];
            }
            bp[i] = s[i] as f64 * (ao + b[i]);
            cp += 0.5 * of[i] * ao + b[i] * of[i];
        }
        for i in 0..3 {
            for j in 0..3 {
                if ap[i][j] < -EPS {
                    return Err(Error::UnboundedCone(format!("variables {i} and {j} couple negatively on the cone")));
                }
            }
            if ap[i][i] <= EPS && bp[i] <= EPS {
                return Err(Error::UnboundedCone(format!("exponent does not grow along variable {i}")));
            }
        }
        Ok(Orthant { a: ap, b: bp, c: cp, s, o })
    }

    /// min over integers t ≥ 0 of a_ii t²/2 + b_i t.
    fn floor_min(&self, i: usize) -> f64 {
        let (a, b) = (self.a[i][i], self.b[i]);
        let f = |t: f64| 0.5 * a * t * t + b * t;
        if a <= EPS {
            return 0.0;
        }
        let t = -b / a;
        if t <= 0.0 {
            0.0
        } else {
            f(t.floor()).min(f(t.ceil()))
        }
    }

    fn lower_bound(&self) -> f64 {
        self.c + (0..3).map(|i| self.floor_min(i)).sum::<f64>()
    }

    fn point(&self, y: [i64; 3]) -> [i64; 3] {
        [0, 1, 2].map(|i| self.o[i] + self.s[i] * y[i])
    }

    /// Visits every cone point whose exponent may lie below `budget`.
    fn walk(&self, budget: f64, visit: &mut dyn FnMut([i64; 3])) -> Result<()> {
        let m = [self.floor_min(0), self.floor_min(1), self.floor_min(2)];
        let tail = [m[1] + m[2], m[2], 0.0];
        let mut y = [0i64; 3];
        let mut count = 0u64;
        self.level(0, &mut y, self.c, &tail, budget, visit, &mut count)
    }

    #[allow(clippy::too_many_arguments)]
    fn level(
        &self,
        l: usize,
        y: &mut [i64; 3],
        base: f64,
        tail: &[f64; 3],
        budget: f64,
        visit: &mut dyn FnMut([i64; 3]),
        count: &mut u64,
    ) -> Result<()> {
        let beta = self.b[l] + (0..l).map(|j| self.a[l][j] * y[j] as f64).sum::<f64>();
        let all = self.a[l][l];
        let vertex = if all > EPS { -beta / all } else { 0.0 };
        let mut t = 0i64;
        loop {
            let tf = t as f64;
            let val = base + 0.5 * all * tf * tf + beta * tf;
            if val + tail[l] >= budget && tf >= vertex {
                break;
            }
            y[l] = t;
            if l == 2 {
                if val < budget {
                    visit(self.point(*y));
                }
                *count += 1;
                if *count > MAX_CONE_POINTS {
                    return Err(Error::ResourceBound("cone walk exceeds the point budget".into()));
                }
            } else {
                self.level(l + 1, y, val, tail, budget, visit, count)?;
            }
            t += 1;
        }
        y[l] = 0;
        Ok(())
    }
}

/// A triple sum Σ_{cones} sign·q^{Q(x)}·Π chars_i^{x_i} with
/// Q(x) = ½xᵀAx + b·x + c, optional (−1)^{x_i} factors and an optional
/// linear weight λ·x, times a fixed prefactor.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeSumSpec {
    quad: [[Rational64; 3]; 3],
    linear: [Rational64; 3],
    constant: Rational64,
    cones: Vec<Cone>,
    alternating: [bool; 3],
    weight: Option<[i64; 3]>,
    chars: [Monomial; 3],
    prefactor: Monomial,
}

fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl ConeSumSpec {
    pub fn new(quad: [[Rational64; 3]; 3], linear: [Rational64; 3], cones: Vec<Cone>) -> Result<Self> {
        for i in 0..3 {
            for j in 0..3 {
                if quad[i][j] != quad[j][i] {
                    return Err(Error::InvalidArgument("quadratic form must be symmetric".into()));
                }
            }
        }
        let spec = ConeSumSpec {
            quad,
            linear,
            constant: ri(0),
            cones,
            alternating: [false; 3],
            weight: None,
            chars: [Monomial::one(), Monomial::one(), Monomial::one()],
            prefactor: Monomial::one(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_constant(mut self, c: Rational64) -> Self {
        self.constant = c;
        self
    }

    pub fn alternating(mut self, alt: [bool; 3]) -> Self {
        self.alternating = alt;
        self
    }

    pub fn weighted(mut self, w: [i64; 3]) -> Self {
        self.weight = Some(w);
        self
    }

    /// Per-variable characters; their q-parts shift the linear form, so the
    /// cone conditions are checked again.
    pub fn with_chars(mut self, chars: [Monomial; 3]) -> Result<Self> {
        self.chars = chars;
        self.validate()?;
        Ok(self)
    }

    pub fn with_prefactor(mut self, m: Monomial) -> Self {
        self.prefactor = m;
        self
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    fn effective_linear(&self) -> [Rational64; 3] {
        [0, 1, 2].map(|i| self.linear[i] + self.chars[i].q_exp)
    }

    fn orthants_f64(&self, scale: f64, shift: [f64; 3]) -> Result<Vec<(Orthant, i64)>> {
        let a = self.quad.map(|row| row.map(|x| to_f64(x) * scale));
        let lin = self.effective_linear();
        let b = [0, 1, 2].map(|i| to_f64(lin[i]) * scale + shift[i]);
        let c = to_f64(self.constant) * scale;
        self.cones.iter().map(|cone| Ok((Orthant::new(&a, &b, c, &cone.bounds)?, cone.sign))).collect()
    }

    fn validate(&self) -> Result<()> {
        self.orthants_f64(1.0, [0.0; 3]).map(|_| ())
    }

    /// Q(x) without character shifts.
    pub fn exponent(&self, x: [i64; 3]) -> Rational64 {
        let mut e = self.constant;
        for i in 0..3 {
            e += self.linear[i] * x[i];
            for j in 0..3 {
                e += self.quad[i][j] * (x[i] * x[j]) / 2;
            }
        }
        e
    }

    fn sign_weight(&self, x: [i64; 3], cone_sign: i64) -> i64 {
        let mut s = cone_sign;
        for i in 0..3 {
            if self.alternating[i] && x[i].rem_euclid(2) == 1 {
                s = -s;
            }
        }
        match self.weight {
            Some(w) => s * (w[0] * x[0] + w[1] * x[1] + w[2] * x[2]),
            None => s,
        }
    }

    /// Smallest q-exponent the sum can reach, including characters and prefactor.
    pub fn min_exponent(&self) -> Result<f64> {
        let o = self.orthants_f64(1.0, [0.0; 3])?;
        let lb = o.iter().map(|(o, _)| o.lower_bound()).fold(f64::INFINITY, f64::min);
        Ok(lb + to_f64(self.prefactor.q_exp))
    }
}

/// The exact triple sum to O(q^{order/d}) as a Jacobi series in the ζ of the
/// characters.
pub fn cone_sum_series(spec: &ConeSumSpec, d: i64, dz: i64, order: i64) -> Result<JacobiSeries> {
    let budget = order as f64 / d as f64 - to_f64(spec.prefactor.q_exp) + 1e-9;
    let mut points: Vec<([i64; 3], i64)> = Vec::new();
    for (o, sign) in spec.orthants_f64(1.0, [0.0; 3])? {
        o.walk(budget, &mut |x| points.push((x, sign)))?;
    }
    let mut terms: Vec<(i64, i64, Cyc8)> = Vec::with_capacity(points.len());
    for (x, sign) in points {
        let sw = spec.sign_weight(x, sign);
        if sw == 0 {
            continue;
        }
        let mut m = spec.prefactor.clone();
        for i in 0..3 {
            m = m.mul(&spec.chars[i].powi(x[i])?);
        }
        let qe = scale_exponent(spec.exponent(x) + m.q_exp, d)?;
        if qe >= order {
            continue;
        }
        let ze = scale_exponent(m.z_exp, dz)?;
        terms.push((qe, ze, m.coef.scale_int(sw)));
    }
    Ok(JacobiSeries::from_terms(d, dz, terms, order))
}

/// The triple sum at complex parameters: Σ sign·e^{2πi(τQ(x) + w·x)}.
/// Characters and prefactor of the spec are not used; `w` plays their role.
pub fn cone_sum_numeric(spec: &ConeSumSpec, w: &[HpComplex; 3], tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    let wp = working_prec(prec);
    let v = tau.v().to_f64();
    let shift = [w[0].im.to_f64(), w[1].im.to_f64(), w[2].im.to_f64()];
    let unshifted = ConeSumSpec { chars: [Monomial::one(), Monomial::one(), Monomial::one()], ..spec.clone() };
    let orth = unshifted.orthants_f64(v, shift).map_err(|e| match e {
        Error::UnboundedCone(m) => Error::UnboundedCone(format!("numeric sum diverges: {m}")),
        e => e,
    })?;
    let lower = orth.iter().map(|(o, _)| o.lower_bound()).fold(f64::INFINITY, f64::min);
    let budget = lower + (wp as f64 + 32.0) * LN_2 / (2.0 * std::f64::consts::PI);
    let t = tau.tau().with_prec(wp);
    let w = w.clone().map(|x| x.with_prec(wp));
    let mut acc = HpComplex::zero(wp);
    let mut err = None;
    for (o, sign) in orth {
        o.walk(budget, &mut |x| {
            if err.is_some() {
                return;
            }
            let sw = unshifted.sign_weight(x, sign);
            if sw == 0 {
                return;
            }
            let mut arg = t.scale_rational(unshifted.exponent(x));
            for i in 0..3 {
                if x[i] != 0 {
                    arg += &w[i].scale_i64(x[i]);
                }
            }
            acc += &arg.e2pii().scale_i64(sw);
        })
        .map_err(|e| err.get_or_insert(e).clone())?;
    }
    Ok(acc)
}

fn sym3(a: [[i64; 3]; 3]) -> [[Rational64; 3]; 3] {
    a.map(|row| row.map(ri))
}

/// The sum defining F: q^{k(k+1)/2+kℓ+kn+ℓn}, (−1)^k, over k > 0, ℓ, n ≥ 0
/// and k ≤ 0, ℓ, n < 0.
pub fn f_spec() -> ConeSumSpec {
    use Bound::*;
    ConeSumSpec::new(
        sym3([[1, 1, 1], [1, 0, 1], [1, 1, 0]]),
        [rat(1, 2), ri(0), ri(0)],
        vec![
            Cone::new([AtLeast(1), AtLeast(0), AtLeast(0)], 1),
            Cone::new([AtMost(0), AtMost(-1), AtMost(-1)], 1),
        ],
    )
    .expect("F cones are valid")
    .alternating([true, false, false])
}

/// The sum defining G: q^{k(k+1)/2+2kℓ+2kn+4ℓn}, same cones as F.
pub fn g_spec() -> ConeSumSpec {
    use Bound::*;
    ConeSumSpec::new(
        sym3([[1, 2, 2], [2, 0, 4], [2, 4, 0]]),
        [rat(1, 2), ri(0), ri(0)],
        vec![
            Cone::new([AtLeast(1), AtLeast(0), AtLeast(0)], 1),
            Cone::new([AtMost(0), AtMost(-1), AtMost(-1)], 1),
        ],
    )
    .expect("G cones are valid")
    .alternating([true, false, false])
}

/// The two pieces of j(1 − q^j)(−1)^{j+n+ℓ}q^{j(j+1)/2+2nj+2ℓj+4nℓ+n+ℓ}
/// over j, n, ℓ ≥ 0 and j, n, ℓ < 0: weight j with the form as printed, and
/// weight −j with j added to the form.
pub fn pwrep_specs() -> [ConeSumSpec; 2] {
    use Bound::*;
    let cones = vec![
        Cone::new([AtLeast(0), AtLeast(0), AtLeast(0)], 1),
        Cone::new([AtMost(-1), AtMost(-1), AtMost(-1)], 1),
    ];
    let quad = sym3([[1, 2, 2], [2, 0, 4], [2, 4, 0]]);
    let first = ConeSumSpec::new(quad, [rat(1, 2), ri(1), ri(1)], cones.clone())
        .expect("pwrep cones are valid")
        .alternating([true; 3])
        .weighted([1, 0, 0]);
    let second = ConeSumSpec::new(quad, [rat(3, 2), ri(1), ri(1)], cones)
        .expect("pwrep cones are valid")
        .alternating([true; 3])
        .weighted([-1, 0, 0]);
    [first, second]
}

fn torsion_char(t: TorsionPoint, frac: Rational64) -> Result<Monomial> {
    Ok(Monomial::q(Cyc8::root_of_unity(t.b * frac)?, t.a * frac))
}

/// F(z1, z2, z3) with z2, z3 at torsion points, as a series in ζ = ζ1.
pub fn f_torsion_series(z2: TorsionPoint, z3: TorsionPoint, d: i64, dz: i64, order: i64) -> Result<JacobiSeries> {
    let zeta = Monomial::new(Cyc8::one(), ri(0), ri(1));
    let spec = f_spec().with_chars([zeta, torsion_char(z2, ri(1))?, torsion_char(z3, ri(1))?])?.with_prefactor(
        Monomial::new(Cyc8::one(), rat(-1, 8), rat(-1, 2))
            .mul(&torsion_char(z2, rat(1, 2))?)
            .mul(&torsion_char(z3, rat(1, 2))?),
    );
    cone_sum_series(&spec, d, dz, order)
}

/// G(z1, z2, z3) with z2, z3 at torsion points, from its own cone sum.
pub fn g_torsion_series(z2: TorsionPoint, z3: TorsionPoint, d: i64, dz: i64, order: i64) -> Result<JacobiSeries> {
    let zeta = Monomial::new(Cyc8::one(), ri(0), ri(1));
    let spec = g_spec().with_chars([zeta, torsion_char(z2, ri(1))?, torsion_char(z3, ri(1))?])?.with_prefactor(
        Monomial::new(Cyc8::from_int(4), rat(-1, 8), rat(-1, 2))
            .mul(&torsion_char(z2, rat(1, 4))?)
            .mul(&torsion_char(z3, rat(1, 4))?),
    );
    cone_sum_series(&spec, d, dz, order)
}

/// Σ_{α,β∈{0,1}} i^{−α−β} F(z1, z2/2 + α/2, z3/2 + β/2).
pub fn g_from_f_series(z2: TorsionPoint, z3: TorsionPoint, d: i64, dz: i64, order: i64) -> Result<JacobiSeries> {
    let mut acc = JacobiSeries::zero(d, dz, order);
    for alpha in 0..2 {
        for beta in 0..2 {
            let h2 = TorsionPoint::new(z2.a / 2, z2.b / 2 + rat(alpha, 2));
            let h3 = TorsionPoint::new(z3.a / 2, z3.b / 2 + rat(beta, 2));
            let f = f_torsion_series(h2, h3, d, dz, order)?;
            acc = acc.add(&f.scale(&Cyc8::zeta8(-2 * (alpha + beta))))?;
        }
    }
    Ok(acc)
}

/// Route used to build P̄_ω(q).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PbarRoute {
    /// The smallest-parts sum over overpartition factors.
    Definition,
    /// −(q)_∞^{−3} times the indefinite triple sum.
    TripleSum,
    /// Direct enumeration of overpartitions.
    Oracle,
}

impl fmt::Display for PbarRoute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PbarRoute::Definition => "definition",
            PbarRoute::TripleSum => "triple_sum",
            PbarRoute::Oracle => "oracle",
        })
    }
}

impl FromStr for PbarRoute {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "definition" => Ok(PbarRoute::Definition),
            "triple_sum" => Ok(PbarRoute::TripleSum),
            "oracle" => Ok(PbarRoute::Oracle),
            _ => Err(Error::InvalidArgument(format!("unknown route {s}"))),
        }
    }
}

/// The indefinite triple sum of the P̄_ω representation, to O(q^n), on the default lattice.
pub fn pwrep_triple_sum(n: i64) -> Result<QSeries> {
    let d = DEFAULT_LATTICE;
    let order = n.max(0) * d;
    let mut acc = JacobiSeries::zero(d, 1, order);
    for spec in pwrep_specs() {
        acc = acc.add(&cone_sum_series(&spec, d, 1, order)?)?;
    }
    Ok(acc.zeta_coeff(0))
}

/// P̄_ω(q) to O(q^n) along the chosen route. The oracle is capped by the
/// enumeration limit and may return a lower order.
pub fn pbar_omega_series(n: i64, route: PbarRoute) -> Result<QSeries> {
    match route {
        PbarRoute::Definition => genfun(Family::PbarOmega, Side::Definition, n),
        PbarRoute::Oracle => genfun(Family::PbarOmega, Side::Alternate, n),
        PbarRoute::TripleSum => {
            if n < 1 {
                return Ok(QSeries::zero(DEFAULT_LATTICE, 0));
            }
            let d = DEFAULT_LATTICE;
            let q3 = qpoch_int(1, 1, None, d, n)?.pow(3)?;
            pwrep_triple_sum(n)?.mul(&q3.invert()?).map(|s| s.neg())
        }
    }
}

const PWZ_D: i64 = 2;

/// Both sides of the denominator-cleared two-variable identity to O(q^n):
/// (q)_∞²/(−q;q²)_∞ Σ_{k≥1}(ζ,ζ⁻¹q)_k(−q;q²)_k q^k/(q)_{2k} against
/// Σ_{j≥1,n,m≥0}(−1)^{j+1}iⁿ(−i)^m(1−ζ^j)(1−ζ^{−j}q^j)q^{j(j+1)/2+n(j+1/2)+m(j+n+1/2)}.
/// Exponents are on the half-integer lattice; ζ-exponents are integers.
pub fn pwz_sides(n: i64) -> Result<(JacobiSeries, JacobiSeries)> {
    let d = PWZ_D;
    let order = n.max(0) * d;
    let mut acc = JacobiSeries::zero(d, 1, order);
    let mut poly = JacobiSeries::one(d, 1, order);
    let mut neg = QSeries::one(d, order);
    for k in 1..n.max(1) {
        let a = JacobiSeries::from_terms(d, 1, [(0, 0, Cyc8::one()), ((k - 1) * d, 1, Cyc8::from_int(-1))], order);
        let b = JacobiSeries::from_terms(d, 1, [(0, 0, Cyc8::one()), (k * d, -1, Cyc8::from_int(-1))], order);
        poly = poly.mul(&a)?.mul(&b)?;
        neg = neg.mul(&QSeries::from_terms(d, [(0, Cyc8::one()), ((2 * k - 1) * d, Cyc8::one())], order))?;
        let den = qpoch_int(1, 1, Some(2 * k as usize), d, n)?.invert()?;
        let coef = neg.mul(&den)?.mul_monomial(&Cyc8::one(), k * d);
        acc = acc.add(&poly.mul_qseries(&coef)?)?;
    }
    let q = qpoch_int(1, 1, None, d, n)?;
    let pre = q.mul(&q)?.mul(&qpoch_neg_int(1, 2, None, d, n)?.invert()?)?;
    let lhs = acc.mul_qseries(&pre)?;

    let mut terms: BTreeMap<(i64, i64), Cyc8> = BTreeMap::new();
    let mut push = |q: i64, z: i64, c: Cyc8| {
        let e = terms.entry((q, z)).or_insert_with(Cyc8::zero);
        *e += &c;
    };
    for j in 1.. {
        let ej = j * (j + 1) / 2 * d;
        if ej >= order {
            break;
        }
        for nn in 0.. {
            let en = ej + nn * (2 * j + 1);
            if en >= order {
                break;
            }
            for m in 0.. {
                let e = en + m * (2 * j + 2 * nn + 1);
                if e >= order {
                    break;
                }
                let mut c = Cyc8::zeta8(2 * (nn + 3 * m));
                if j % 2 == 0 {
                    c = -c;
                }
                push(e, 0, c.clone());
                push(e, j, -c.clone());
                push(e + j * d, -j, -c.clone());
                push(e + j * d, 0, c);
            }
        }
    }
    let rhs = JacobiSeries::from_terms(d, 1, terms.into_iter().map(|((q, z), c)| (q, z, c)), order);
    Ok((lhs, rhs))
}

/// Checks the cleared two-variable identity to O(q^n) with every ζ-exponent
/// required to lie in `window`.
pub fn pwz_identity_check(n: i64, window: (i64, i64)) -> Result<std::result::Result<i64, Mismatch>> {
    let (lhs, rhs) = pwz_sides(n)?;
    let lhs = lhs.with_zeta_window(window.0, window.1)?;
    let rhs = rhs.with_zeta_window(window.0, window.1)?;
    lhs.agree_to(&rhs)
}

/// [ζ^j] of (ζ,ζ⁻¹q)_∞P̄_ω(ζ;q) computed from the definition, and the closed
/// form (−1)^j q^{j(j+1)/2}/(q)_∞ Σ_n iⁿq^{n(j+1/2)}/(1+iq^{j+1/2+n}), to O(q^n).
pub fn pwz_coefficient_sides(j: i64, n: i64) -> Result<(QSeries, QSeries)> {
    if j < 1 {
        return Err(Error::InvalidArgument("coefficient formula needs j >= 1".into()));
    }
    let d = PWZ_D;
    let order = n * d;
    let (lhs, _) = pwz_sides(n)?;
    let qinv = qpoch_int(1, 1, None, d, n)?.invert()?;
    let left = lhs.mul_qseries(&qinv)?.zeta_coeff(j);
    let mut terms = Vec::new();
    let ej = j * (j + 1) / 2 * d;
    for nn in 0.. {
        let en = ej + nn * (2 * j + 1);
        if en >= order {
            break;
        }
        for m in 0.. {
            let e = en + m * (2 * j + 2 * nn + 1);
            if e >= order {
                break;
            }
            let mut c = Cyc8::zeta8(2 * (nn + 3 * m));
            if j % 2 == 1 {
                c = -c;
            }
            terms.push((e, c));
        }
    }
    let right = QSeries::from_terms(d, terms, order).mul(&qinv)?;
    Ok((left, right))
}

pub fn pwz_coefficient_check(j: i64, n: i64) -> Result<std::result::Result<i64, Mismatch>> {
    let (l, r) = pwz_coefficient_sides(j, n)?;
    l.agree_to(&r)
}

// ---------------------------------------------------------------------------
// Numerical layer

fn half() -> Rational64 {
    rat(1, 2)
}

fn pole_guard(x: &HpComplex, prec: u32, what: &str) -> Result<()> {
    if x.abs_f64() < 2f64.powi(-(prec as i32) / 2) {
        return Err(Error::PoleProximity(format!("{what} vanishes")));
    }
    Ok(())
}

/// F through Appell functions:
/// iϑ(z1)μ(z1,z2)μ(z1,z3) − η³ϑ(z2+z3)/(ϑ(z2)ϑ(z3))·μ(z1,z2+z3),
/// written with ϑ(s)μ(z1,s) so that ϑ(z2+z3) may vanish.
pub fn f_mu_numeric(z1: &HpComplex, z2: &HpComplex, z3: &HpComplex, tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    let t2 = theta_numeric(z2, tau, prec)?;
    let t3 = theta_numeric(z3, tau, prec)?;
    pole_guard(&t2, prec, "theta(z2)")?;
    pole_guard(&t3, prec, "theta(z3)")?;
    let t1 = theta_numeric(z1, tau, prec)?;
    let eta3 = eta_numeric(tau, prec)?.powi(3);
    let m2 = theta_mu(z1, z2, tau, prec)?;
    let m3 = theta_mu(z1, z3, tau, prec)?;
    let m23 = theta_mu(z1, &(z2 + z3), tau, prec)?;
    let num = &(&(&t1 * &m2) * &m3).mul_i() - &(&eta3 * &m23);
    Ok(&num / &(&t2 * &t3))
}

/// F from its cone sum: q^{−1/8}ζ1^{−1/2}ζ2^{1/2}ζ3^{1/2}·Σ.
pub fn f_cone_numeric(z1: &HpComplex, z2: &HpComplex, z3: &HpComplex, tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    let wp = working_prec(prec);
    let w = [z1.with_prec(wp), z2.with_prec(wp), z3.with_prec(wp)];
    let s = cone_sum_numeric(&f_spec(), &w, tau, prec)?;
    let arg = &(&(&tau.tau().scale_rational(rat(-1, 8)) - &w[0].scale_rational(half())) + &w[1].scale_rational(half()))
        + &w[2].scale_rational(half());
    Ok(&arg.e2pii() * &s)
}

/// F̂ − F:
/// −½ϑ(z1)μ(z1,z2)R(z1−z3) − ½ϑ(z1)R(z1−z2)μ(z1,z3) − (i/4)ϑ(z1)R(z1−z2)R(z1−z3)
/// − (i/2)η³ϑ(z2+z3)/(ϑ(z2)ϑ(z3))·R(z1−z2−z3). At z1 = 0 the limit form is used.
pub fn rstar_numeric(z1: &HpComplex, z2: &HpComplex, z3: &HpComplex, tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    if z1.is_zero() {
        return rstar_zero_numeric(z2, z3, tau, prec);
    }
    let t1 = theta_numeric(z1, tau, prec)?;
    let t2 = theta_numeric(z2, tau, prec)?;
    let t3 = theta_numeric(z3, tau, prec)?;
    pole_guard(&t2, prec, "theta(z2)")?;
    pole_guard(&t3, prec, "theta(z3)")?;
    let s = z2 + z3;
    let p2 = &(&t1 * &theta_mu(z1, z2, tau, prec)?) / &t2;
    let p3 = &(&t1 * &theta_mu(z1, z3, tau, prec)?) / &t3;
    let r2 = r_numeric(&(z1 - z2), tau, prec)?;
    let r3 = r_numeric(&(z1 - z3), tau, prec)?;
    let r23 = r_numeric(&(z1 - &s), tau, prec)?;
    let k = &(&eta_numeric(tau, prec)?.powi(3) * &theta_numeric(&s, tau, prec)?) / &(&t2 * &t3);
    Ok(rstar_combine(&p2, &p3, &t1, &r2, &r3, &r23, &k))
}

fn rstar_combine(
    p2: &HpComplex,
    p3: &HpComplex,
    t1: &HpComplex,
    r2: &HpComplex,
    r3: &HpComplex,
    r23: &HpComplex,
    k: &HpComplex,
) -> HpComplex {
    let a = (&(p2 * r3) + &(p3 * r2)).scale_rational(rat(-1, 2));
    let b = (&(t1 * r2) * r3).mul_i().scale_rational(rat(-1, 4));
    let c = (k * r23).mul_i().scale_rational(rat(-1, 2));
    &(&a + &b) + &c
}

/// R*(0, z2, z3) = (i/2)η³(R(z2)/ϑ(z3) + R(z3)/ϑ(z2) − ϑ(z2+z3)/(ϑ(z2)ϑ(z3))·R(z2+z3)).
pub fn rstar_zero_numeric(z2: &HpComplex, z3: &HpComplex, tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    let t2 = theta_numeric(z2, tau, prec)?;
    let t3 = theta_numeric(z3, tau, prec)?;
    pole_guard(&t2, prec, "theta(z2)")?;
    pole_guard(&t3, prec, "theta(z3)")?;
    let s = z2 + z3;
    let ts = theta_numeric(&s, tau, prec)?;
    let sum = &(&(&r_numeric(z2, tau, prec)? / &t3) + &(&r_numeric(z3, tau, prec)? / &t2))
        - &(&(&ts * &r_numeric(&s, tau, prec)?) / &(&t2 * &t3));
    Ok((&eta_numeric(tau, prec)?.powi(3) * &sum).mul_i().scale_rational(half()))
}

/// F̂ = iϑ(z1)μ̂(z1,z2)μ̂(z1,z3) − η³ϑ(z2+z3)/(ϑ(z2)ϑ(z3))·μ̂(z1,z2+z3) at generic z1.
pub fn fhat_numeric(z1: &HpComplex, z2: &HpComplex, z3: &HpComplex, tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    Ok(&f_mu_numeric(z1, z2, z3, tau, prec)? + &rstar_numeric(z1, z2, z3, tau, prec)?)
}

/// Ĝ(z1,z2,z3) = Σ_{α,β} i^{−α−β}F̂(z1, z2/2+α/2, z3/2+β/2).
pub fn ghat_numeric(z1: &HpComplex, z2: &HpComplex, z3: &HpComplex, tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    let wp = working_prec(prec);
    let mut acc = HpComplex::zero(wp);
    for alpha in 0..2 {
        for beta in 0..2 {
            let h2 = &z2.scale_rational(half()) + &HpComplex::from_rational(rat(alpha, 2), wp);
            let h3 = &z3.scale_rational(half()) + &HpComplex::from_rational(rat(beta, 2), wp);
            let f = fhat_numeric(z1, &h2, &h3, tau, prec)?;
            acc += &(&root_of_unity(rat(-(alpha + beta), 4), wp) * &f);
        }
    }
    Ok(acc)
}

/// Ĥ(z) = q^{−1/4}ζĜ(z, τ+1/2, τ+1/2).
pub fn hhat_numeric(z: &HpComplex, tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    let wp = working_prec(prec);
    let s = &tau.tau().with_prec(wp) + &HpComplex::from_rational(half(), wp);
    let g = ghat_numeric(z, &s, &s, tau, prec)?;
    let pre = (&tau.tau().scale_rational(rat(-1, 4)) + z).e2pii();
    Ok(&pre * &g)
}

/// τ, precision and contour data for z-derivatives at lattice points.
#[derive(Clone, Debug)]
pub struct PhatContext {
    pub tau: UHPoint,
    pub prec: u32,
    pub radius: f64,
    pub nodes: usize,
}

impl PhatContext {
    /// Radius 0.1·min(1, v) and 64 nodes.
    pub fn new(tau: &UHPoint, prec: u32) -> Self {
        let v = tau.v().to_f64();
        PhatContext { tau: tau.with_prec(working_prec(prec)), prec, radius: 0.1 * v.min(1.0), nodes: 64 }
    }

    pub fn with_contour(mut self, radius: f64, nodes: usize) -> Result<Self> {
        let v = self.tau.v().to_f64();
        if !(radius > 0.0) || radius > 0.5 * v.min(1.0) {
            return Err(Error::ContourThroughPole(format!(
                "radius {radius} reaches another lattice point (limit {})",
                0.5 * v.min(1.0)
            )));
        }
        if nodes < 8 {
            return Err(Error::InvalidArgument("contour needs at least 8 nodes".into()));
        }
        self.radius = radius;
        self.nodes = nodes;
        Ok(self)
    }

    fn wp(&self) -> u32 {
        working_prec(self.prec)
    }

    /// τ/2 + 1/4.
    fn w(&self) -> HpComplex {
        &self.tau.tau().scale_rational(half()) + &HpComplex::from_rational(rat(1, 4), self.wp())
    }
}

const MAX_NODES: usize = 4096;

/// Derivatives 0..=kmax at `center` of each component of `f`, from
/// trapezoidal sums on |z − center| = r. The node count doubles until two
/// consecutive estimates agree.
fn contour_derivs<F>(center: &HpComplex, ctx: &PhatContext, kmax: usize, f: F) -> Result<Vec<Vec<HpComplex>>>
where
    F: Fn(&HpComplex) -> Result<Vec<HpComplex>>,
{
    let wp = ctx.wp();
    let r = Float::with_val(wp, ctx.radius);
    let eval = |j: usize, m: usize| -> Result<(HpComplex, Vec<HpComplex>)> {
        let off = root_of_unity(rat(j as i64, m as i64), wp).scale(&r);
        let vals = f(&(center + &off)).map_err(|e| match e {
            Error::PoleProximity(m) => Error::ContourThroughPole(m),
            e => e,
        })?;
        Ok((off, vals))
    };
    let mut m = ctx.nodes;
    let mut samples = (0..m).map(|j| eval(j, m)).collect::<Result<Vec<_>>>()?;
    let mut prev = combine_nodes(&samples, kmax, wp);
    loop {
        if 2 * m > MAX_NODES {
            return Err(Error::PrecisionUnreachable("contour sums do not settle".into()));
        }
        let mut next = Vec::with_capacity(2 * m);
        for (j, s) in samples.into_iter().enumerate() {
            next.push(s);
            next.push(eval(2 * j + 1, 2 * m)?);
        }
        samples = next;
        m *= 2;
        let cur = combine_nodes(&samples, kmax, wp);
        let settled = cur.iter().zip(&prev).all(|(c, p)| {
            c.iter().zip(p).enumerate().all(|(k, (a, b))| {
                let tol = 2f64.powi(-(ctx.prec as i32)) * (1.0 + a.abs_f64()) * ctx.radius.powi(-(k as i32));
                (a - b).abs_f64() <= tol
            })
        });
        if settled {
            return Ok(cur);
        }
        prev = cur;
    }
}

fn combine_nodes(samples: &[(HpComplex, Vec<HpComplex>)], kmax: usize, wp: u32) -> Vec<Vec<HpComplex>> {
    let nf = samples[0].1.len();
    let m = samples.len() as i64;
    let mut out = vec![vec![HpComplex::zero(wp); kmax + 1]; nf];
    for (off, vals) in samples {
        let inv = off.inv();
        let mut pw = HpComplex::one(wp);
        for k in 0..=kmax {
            for (i, v) in vals.iter().enumerate() {
                out[i][k] += &(v * &pw);
            }
            pw = &pw * &inv;
        }
    }
    let mut fact = 1i64;
    for k in 0..=kmax {
        if k > 0 {
            fact *= k as i64;
        }
        for row in out.iter_mut() {
            row[k] = row[k].scale_rational(rat(fact, m));
        }
    }
    out
}

/// F̂(z1, z2, z3) and ∂F̂/∂z1 at z1 = center. The meromorphic parts are
/// differentiated by contour, so the center may be a lattice point.
pub fn fhat_jet(center: &HpComplex, z2: &HpComplex, z3: &HpComplex, ctx: &PhatContext) -> Result<[HpComplex; 2]> {
    let (tau, prec) = (&ctx.tau, ctx.prec);
    let eta3 = eta_numeric(tau, prec)?.powi(3);
    let t2 = theta_numeric(z2, tau, prec)?;
    let t3 = theta_numeric(z3, tau, prec)?;
    pole_guard(&t2, prec, "theta(z2)")?;
    pole_guard(&t3, prec, "theta(z3)")?;
    let s = z2 + z3;
    let d23 = &t2 * &t3;
    let hol = contour_derivs(center, ctx, 1, |z| {
        let t1 = theta_numeric(z, tau, prec)?;
        let m2 = theta_mu(z, z2, tau, prec)?;
        let m3 = theta_mu(z, z3, tau, prec)?;
        let m23 = theta_mu(z, &s, tau, prec)?;
        let f = &(&(&t1 * &m2) * &m3).mul_i() - &(&eta3 * &m23);
        Ok(vec![&f / &d23, &(&t1 * &m2) / &t2, &(&t1 * &m3) / &t3])
    })?;
    let th = theta_jets(center, tau, 1, prec)?;
    let r2 = r_jets(&(center - z2), tau, 1, prec)?;
    let r3 = r_jets(&(center - z3), tau, 1, prec)?;
    let r23 = r_jets(&(center - &s), tau, 1, prec)?;
    let k = &(&eta3 * &theta_numeric(&s, tau, prec)?) / &d23;
    let (p2, p3) = (&hol[1], &hol[2]);
    let v = rstar_combine(&p2[0], &p3[0], &th[0], &r2[0], &r3[0], &r23[0], &k);
    let a = (&(&(&p2[1] * &r3[0]) + &(&p2[0] * &r3[1])) + &(&(&p3[1] * &r2[0]) + &(&p3[0] * &r2[1])))
        .scale_rational(rat(-1, 2));
    let b = (&(&(&(&th[1] * &r2[0]) * &r3[0]) + &(&(&th[0] * &r2[1]) * &r3[0])) + &(&(&th[0] * &r2[0]) * &r3[1]))
        .mul_i()
        .scale_rational(rat(-1, 4));
    let c = (&k * &r23[1]).mul_i().scale_rational(rat(-1, 2));
    let dv = &(&a + &b) + &c;
    Ok([&hol[0][0] + &v, &hol[0][1] + &dv])
}

/// Ĝ(z1, τ+1/2, τ+1/2) and its z1-derivative at z1 = center.
fn ghat_h_jet(center: &HpComplex, ctx: &PhatContext) -> Result<[HpComplex; 2]> {
    let wp = ctx.wp();
    let w = ctx.w();
    let mut acc = [HpComplex::zero(wp), HpComplex::zero(wp)];
    for alpha in 0..2 {
        for beta in 0..2 {
            let z2 = &w + &HpComplex::from_rational(rat(alpha, 2), wp);
            let z3 = &w + &HpComplex::from_rational(rat(beta, 2), wp);
            let u = root_of_unity(rat(-(alpha + beta), 4), wp);
            let [f, df] = fhat_jet(center, &z2, &z3, ctx)?;
            acc[0] += &(&u * &f);
            acc[1] += &(&u * &df);
        }
    }
    Ok(acc)
}

/// (Ĥ₁, Ĥ₂) at ctx.τ, with
/// Ĥ₁ = −½(Ĥ(0) + q^{−1/2}Ĥ(τ)) and
/// Ĥ₂ = [∂_ζĤ]_{ζ=1} − [∂_ζ(q^{−1/2}ζ^{−1}Ĥ(z+τ))]_{ζ=1}.
pub fn hhat12_numeric(ctx: &PhatContext) -> Result<(HpComplex, HpComplex)> {
    let wp = ctx.wp();
    let zero = HpComplex::zero(wp);
    let t = ctx.tau.tau().clone();
    let [g0, dg0] = ghat_h_jet(&zero, ctx)?;
    let [gt, dgt] = ghat_h_jet(&t, ctx)?;
    let qm = ctx.tau.q_pow(rat(-1, 4));
    let qp = ctx.tau.q_pow(rat(1, 4));
    let h1 = (&(&qm * &g0) + &(&qp * &gt)).scale_rational(rat(-1, 2));
    let two_pi_i = HpComplex::new(Float::new(wp), pi(wp) * 2u32);
    let h21 = &(&qm * &(&(&two_pi_i * &g0) + &dg0)) / &two_pi_i;
    let h22 = &(&qp * &dgt) / &two_pi_i;
    Ok((h1, &h21 - &h22))
}

pub fn hhat1_numeric(ctx: &PhatContext) -> Result<HpComplex> {
    let wp = ctx.wp();
    let zero = HpComplex::zero(wp);
    let t = ctx.tau.tau().clone();
    let [g0, _] = ghat_h_jet(&zero, ctx)?;
    let [gt, _] = ghat_h_jet(&t, ctx)?;
    let qm = ctx.tau.q_pow(rat(-1, 4));
    let qp = ctx.tau.q_pow(rat(1, 4));
    Ok((&(&qm * &g0) + &(&qp * &gt)).scale_rational(rat(-1, 2)))
}

pub fn hhat2_numeric(ctx: &PhatContext) -> Result<HpComplex> {
    Ok(hhat12_numeric(ctx)?.1)
}

/// 𝓕(z) = q^{−1/8}ζ^{1/2}ϑ(z)μ̂(z, τ/2+1/4) for z off the lattice.
pub fn fcal_numeric(z: &HpComplex, tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    let ctx = PhatContext::new(tau, prec);
    let w = ctx.w();
    let th = theta_numeric(z, tau, prec)?;
    let tw = theta_numeric(&w, tau, prec)?;
    let tm = theta_mu(z, &w, tau, prec)?;
    let r = r_numeric(&(z - &w), tau, prec)?;
    let inner = &(&tm / &tw) + &r.mul_i().scale_rational(half());
    let pre = (&tau.tau().scale_rational(rat(-1, 8)) + &z.scale_rational(half())).e2pii();
    Ok(&pre * &(&th * &inner))
}

/// 𝓕 and its first two z-derivatives at 0, with the parts coming from
/// q^{−1/8}ζ^{1/2}ϑ(z)μ(z, τ/2+1/4) kept separately in `hol`.
#[derive(Clone, Debug)]
pub struct FcalJet {
    pub value: HpComplex,
    pub d1: HpComplex,
    pub d2: HpComplex,
    pub hol: [HpComplex; 3],
}

pub fn fcal_derivs(ctx: &PhatContext) -> Result<FcalJet> {
    let (tau, prec, wp) = (&ctx.tau, ctx.prec, ctx.wp());
    let w = ctx.w();
    let tw = theta_numeric(&w, tau, prec)?;
    pole_guard(&tw, prec, "theta(tau/2+1/4)")?;
    let q8 = tau.q_pow(rat(-1, 8));
    let zero = HpComplex::zero(wp);
    let a = contour_derivs(&zero, ctx, 2, |z| {
        let th = theta_numeric(z, tau, prec)?;
        let tm = theta_mu(z, &w, tau, prec)?;
        let e = z.scale_rational(half()).e2pii();
        Ok(vec![&(&(&q8 * &e) * &(&th * &tm)) / &tw])
    })?
    .swap_remove(0);
    let th = theta_jets(&zero, tau, 2, prec)?;
    let pii = HpComplex::new(Float::new(wp), pi(wp));
    // g = e^{πiz}ϑ(z)
    let g0 = th[0].clone();
    let g1 = &(&pii * &th[0]) + &th[1];
    let g2 = &(&(&(&pii * &pii) * &th[0]) + &(&pii * &th[1]).scale_i64(2)) + &th[2];
    let r = r_jets(&(-&w), tau, 2, prec)?;
    let c = q8.mul_i().scale_rational(half());
    let b0 = &c * &(&g0 * &r[0]);
    let b1 = &c * &(&(&g1 * &r[0]) + &(&g0 * &r[1]));
    let b2 = &c * &(&(&(&g2 * &r[0]) + &(&g1 * &r[1]).scale_i64(2)) + &(&g0 * &r[2]));
    Ok(FcalJet { value: &a[0] + &b0, d1: &a[1] + &b1, d2: &a[2] + &b2, hol: [a[0].clone(), a[1].clone(), a[2].clone()] })
}

struct EtaTriple {
    e1: HpComplex,
    e2: HpComplex,
    e4: HpComplex,
}

fn eta_triple(tau: &UHPoint, prec: u32) -> Result<EtaTriple> {
    Ok(EtaTriple {
        e1: eta_numeric(tau, prec)?,
        e2: eta_numeric(&tau.scaled(2), prec)?,
        e4: eta_numeric(&tau.scaled(4), prec)?,
    })
}

fn four_pi_sq(wp: u32) -> HpComplex {
    let p = pi(wp);
    HpComplex::from_real(Float::with_val(wp, &p * &p) * 4u32)
}

/// i·a²/(4π²η⁶) + e^{−πi/4}η(4τ)·b/(4π²η³η(2τ)²).
fn phat_combine(a: &HpComplex, b: &HpComplex, e: &EtaTriple, wp: u32) -> HpComplex {
    let fp = four_pi_sq(wp);
    let e3 = e.e1.powi(3);
    let first = &(a * a).mul_i() / &(&fp * &(&e3 * &e3));
    let second = &(&(&root_of_unity(rat(-1, 8), wp) * &e.e4) * b) / &(&fp * &(&e3 * &e.e2.square()));
    &first + &second
}

pub fn phat_omega_ctx(ctx: &PhatContext) -> Result<HpComplex> {
    let jet = fcal_derivs(ctx)?;
    let e = eta_triple(&ctx.tau, ctx.prec)?;
    Ok(phat_combine(&jet.d1, &jet.d2, &e, ctx.wp()))
}

/// P̂_ω(τ) = i𝓕'(0)²/(4π²η⁶) + e^{−πi/4}η(4τ)𝓕''(0)/(4π²η³η(2τ)²).
pub fn phat_omega_numeric(tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    phat_omega_ctx(&PhatContext::new(tau, prec))
}

/// The same combination with 𝓕' replaced by its holomorphic part
/// A'(0) − πie^{πi/4}η³ and 𝓕'' by A''(0), where A is the μ-part of 𝓕.
pub fn phat_holomorphic_numeric(tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    let ctx = PhatContext::new(tau, prec);
    let wp = ctx.wp();
    let jet = fcal_derivs(&ctx)?;
    let e = eta_triple(&ctx.tau, prec)?;
    let pii = HpComplex::new(Float::new(wp), pi(wp));
    let corr = &(&pii * &root_of_unity(rat(1, 8), wp)) * &e.e1.powi(3);
    let fh = &jet.hol[1] - &corr;
    Ok(phat_combine(&fh, &jet.hol[2], &e, wp))
}

/// P̄_ω(q) + 1/4 − η(4τ)/(2η(2τ)²), with P̄_ω summed from its series to O(q^n).
pub fn holomorphic_part_numeric(tau: &UHPoint, n: i64, prec: u32) -> Result<HpComplex> {
    let wp = working_prec(prec);
    let s = pbar_omega_series(n, PbarRoute::Definition)?;
    let f3 = f_family_numeric(3, tau, prec)?;
    let quarter = HpComplex::from_rational(rat(1, 4), wp);
    Ok(&(&s.eval(&tau.with_prec(wp)) + &quarter) - &f3.scale_rational(half()))
}

/// f₁ = v^{3/2}η(−4τ̄)³, f₂ = 𝓕'(0)/η³, f₃ = η(4τ)/η(2τ)², f₄ = v^{1/2}η(−2τ̄)⁵/(η(−τ̄)²η(−4τ̄)²).
pub fn f_family_numeric(k: u32, tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    let wp = working_prec(prec);
    let v = Float::with_val(wp, tau.v());
    let nc = tau.with_prec(wp).neg_conj();
    match k {
        1 => {
            let e = eta_numeric(&nc.scaled(4), prec)?.powi(3);
            let v32 = Float::with_val(wp, &v * &Float::with_val(wp, v.sqrt_ref()));
            Ok(e.scale(&v32))
        }
        2 => {
            let ctx = PhatContext::new(tau, prec);
            let jet = fcal_derivs(&ctx)?;
            Ok(&jet.d1 / &eta_numeric(tau, prec)?.powi(3))
        }
        3 => Ok(&eta_numeric(&tau.scaled(4), prec)? / &eta_numeric(&tau.scaled(2), prec)?.square()),
        4 => {
            let num = eta_numeric(&nc.scaled(2), prec)?.powi(5);
            let den = &eta_numeric(&nc, prec)?.square() * &eta_numeric(&nc.scaled(4), prec)?.square();
            Ok((&num / &den).scale(&Float::with_val(wp, v.sqrt_ref())))
        }
        _ => Err(Error::InvalidArgument(format!("no function f{k}"))),
    }
}

/// (e^{3πi/4}√2/π)f₁f₂ − (e^{πi/4}/(2√2π))f₃f₄.
pub fn lowering_rhs_numeric(tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    let wp = working_prec(prec);
    let p = pi(wp);
    let s2 = Float::with_val(wp, 2u32).sqrt();
    let f = |k| f_family_numeric(k, tau, prec);
    let c1 = root_of_unity(rat(3, 8), wp).scale(&Float::with_val(wp, &s2 / &p));
    let c2 = root_of_unity(rat(1, 8), wp).scale(&Float::with_val(wp, Float::with_val(wp, &s2 * &p) * 2u32).recip());
    Ok(&(&c1 * &(&f(1)? * &f(2)?)) - &(&c2 * &(&f(3)? * &f(4)?)))
}

/// (e^{3πi/4}√2/π)f₁f₂ − (1/(2√2π))f₃·v^{1/2}η(−2τ̄)²/η(−4τ̄). This is what
/// finite differences of P̂_ω give; it differs from the printed second term
/// by a factor e^{πi/4} and by conj θ₄(2τ) in place of conj θ₃(τ).
pub fn lowering_rhs_corrected_numeric(tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    let wp = working_prec(prec);
    let p = pi(wp);
    let s2 = Float::with_val(wp, 2u32).sqrt();
    let f = |k| f_family_numeric(k, tau, prec);
    let c1 = root_of_unity(rat(3, 8), wp).scale(&Float::with_val(wp, &s2 / &p));
    let nc = tau.with_prec(wp).neg_conj();
    let th = &eta_numeric(&nc.scaled(2), prec)?.square() / &eta_numeric(&nc.scaled(4), prec)?;
    let v = Float::with_val(wp, tau.v());
    let c2 = Float::with_val(wp, v.sqrt() / Float::with_val(wp, &s2 * &p)) / 2u32;
    Ok(&(&c1 * &(&f(1)? * &f(2)?)) - &(&f(3)? * &th).scale(&c2))
}

/// πe^{3πi/4}√2·v^{−1/2}η(τ)³η(−4τ̄)³.
pub fn dtaubar_fcal1_expected(tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    let wp = working_prec(prec);
    let v = Float::with_val(wp, tau.v());
    let c = Float::with_val(wp, Float::with_val(wp, 2u32).sqrt() * pi(wp)) / v.sqrt();
    let e = &eta_numeric(tau, prec)?.powi(3) * &eta_numeric(&tau.with_prec(wp).neg_conj().scaled(4), prec)?.powi(3);
    Ok((&root_of_unity(rat(3, 8), wp) * &e).scale(&c))
}

/// 2√2e^{−πi/4}πη(4τ)³.
pub fn f2_shadow_expected(tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    let wp = working_prec(prec);
    let c = Float::with_val(wp, Float::with_val(wp, 8u32).sqrt() * pi(wp));
    Ok((&root_of_unity(rat(-1, 8), wp) * &eta_numeric(&tau.scaled(4), prec)?.powi(3)).scale(&c))
}

/// 𝓕'(0) as a function of τ, for finite differences in τ.
pub fn fcal_d1_numeric(tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    Ok(fcal_derivs(&PhatContext::new(tau, prec))?.d1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tp(a: Rational64, b: Rational64) -> TorsionPoint {
        TorsionPoint::new(a, b)
    }

    fn c(re: f64, im: f64) -> HpComplex {
        HpComplex::from_f64(re, im, 256)
    }

    #[test]
    fn cone_validation() {
        use Bound::*;
        let bad = ConeSumSpec::new(
            sym3([[1, -1, 0], [-1, 0, 0], [0, 0, 1]]),
            [ri(0), ri(1), ri(0)],
            vec![Cone::new([AtLeast(0), AtLeast(0), AtLeast(0)], 1)],
        );
        assert!(matches!(bad, Err(Error::UnboundedCone(_))));
        let flat = ConeSumSpec::new(
            sym3([[1, 0, 0], [0, 0, 0], [0, 0, 1]]),
            [ri(0), ri(0), ri(0)],
            vec![Cone::new([AtLeast(0), AtLeast(0), AtLeast(0)], 1)],
        );
        assert!(matches!(flat, Err(Error::UnboundedCone(_))));
        // a character pushing ℓ's growth to zero on the negative cone
        let shifted = f_spec().with_chars([Monomial::one(), Monomial::q_pow(1, 1), Monomial::one()]);
        assert!(matches!(shifted, Err(Error::UnboundedCone(_))));
    }

    #[test]
    fn empty_truncation() {
        let spec = pwrep_specs()[0].clone();
        assert!(spec.min_exponent().unwrap() >= 0.0);
        let s = cone_sum_series(&spec, 1, 1, 0).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn cone_walk_matches_brute_force() {
        let spec = f_spec();
        let order = 12;
        let mut brute: BTreeMap<(i64, i64), i64> = BTreeMap::new();
        for k in -30i64..30 {
            for l in -30i64..30 {
                for n in -30i64..30 {
                    let inside = (k > 0 && l >= 0 && n >= 0) || (k <= 0 && l < 0 && n < 0);
                    if !inside {
                        continue;
                    }
                    let e = spec.exponent([k, l, n]);
                    if e < ri(order) {
                        let s = if k.rem_euclid(2) == 1 { -1 } else { 1 };
                        *brute.entry(((e * 2).to_integer(), k * 100 + l * 10 + n)).or_default() += s;
                    }
                }
            }
        }
        let mut walked: BTreeMap<(i64, i64), i64> = BTreeMap::new();
        for (o, sign) in spec.orthants_f64(1.0, [0.0; 3]).unwrap() {
            o.walk(order as f64, &mut |x| {
                let e = spec.exponent(x);
                if e < ri(order) {
                    *walked.entry(((e * 2).to_integer(), x[0] * 100 + x[1] * 10 + x[2])).or_default() +=
                        spec.sign_weight(x, sign);
                }
            })
            .unwrap();
        }
        assert_eq!(brute, walked);
    }

    #[test]
    fn pwrep_first_coefficients() {
        let s = pbar_omega_series(8, PbarRoute::TripleSum).unwrap();
        let d = pbar_omega_series(8, PbarRoute::Definition).unwrap();
        assert_eq!(s.agree_to(&d).unwrap(), Ok(8 * DEFAULT_LATTICE));
        assert_eq!(s.coeff_whole(1), Cyc8::one());
        assert_eq!(s.coeff_whole(0), Cyc8::zero());
    }

    #[test]
    fn g_is_sum_of_f() {
        let d = 8;
        let dz = 2;
        let order = 8 * d;
        let cases = [
            (tp(ri(1), half()), tp(ri(1), half())),
            (tp(half(), ri(0)), tp(rat(3, 2), half())),
        ];
        for (z2, z3) in cases {
            let g = g_torsion_series(z2, z3, d, dz, order).unwrap();
            let f = g_from_f_series(z2, z3, d, dz, order).unwrap();
            assert!(!g.is_zero());
            assert_eq!(g.agree_to(&f).unwrap(), Ok(order));
        }
    }

    #[test]
    fn pwz_low_order() {
        let (l, r) = pwz_sides(10).unwrap();
        assert!(l.coeff(0, 0).is_zero() && r.coeff(0, 0).is_zero());
        assert_eq!(pwz_identity_check(10, (-10, 10)).unwrap(), Ok(20));
        assert_eq!(pwz_coefficient_check(1, 10).unwrap(), Ok(20));
        assert!(matches!(pwz_identity_check(10, (-2, 2)), Err(Error::WindowTooSmall { .. })));
    }

    #[test]
    fn brz_representation_at_one_point() {
        let tau = UHPoint::from_f64(0.13, 1.07, 128).unwrap();
        let (z1, z2, z3) = (c(0.21, 0.17), c(0.33, 0.41), c(-0.12, 0.29));
        let a = f_mu_numeric(&z1, &z2, &z3, &tau, 128).unwrap();
        let b = f_cone_numeric(&z1, &z2, &z3, &tau, 128).unwrap();
        assert!((&a - &b).abs_f64() < 1e-30, "{a} vs {b}");
        let s = f_mu_numeric(&z1, &z3, &z2, &tau, 128).unwrap();
        assert!((&a - &s).abs_f64() < 1e-30);
    }

    #[test]
    fn fcal_at_zero() {
        let tau = UHPoint::from_f64(0.17, 1.05, 128).unwrap();
        let ctx = PhatContext::new(&tau, 128);
        let jet = fcal_derivs(&ctx).unwrap();
        let w = ctx.w();
        let tw = theta_numeric(&w, &tau, 128).unwrap();
        let eta3 = eta_numeric(&tau, 128).unwrap().powi(3);
        let expect = (&(&eta3 * &tau.q_pow(rat(-1, 8))) / &tw).mul_i().scale_i64(-1);
        assert!((&jet.value - &expect).abs_f64() < 1e-30);
        let c0 = &jet.value.square() + &(&(&eta3.square() * &tau.q_pow(rat(-1, 4))) / &tw.square());
        assert!(c0.abs_f64() < 1e-30);
    }

    #[test]
    fn contour_radius_is_checked() {
        let tau = UHPoint::from_f64(0.1, 0.5, 64).unwrap();
        assert!(matches!(PhatContext::new(&tau, 64).with_contour(0.3, 64), Err(Error::ContourThroughPole(_))));
    }
}
