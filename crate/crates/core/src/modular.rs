//! Congruence subgroups, multiplier systems, transformation residuals and
//! finite-difference versions of ξ_k, L and Δ_k.

use crate::classical::psi_turns;
use crate::error::{Error, Result};
use crate::hp::{root_of_unity, working_prec, HpComplex, UHPoint};
use num_integer::Integer;
use num_rational::Rational64;
use rand::Rng;
use rug::Float;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

fn rat(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// An element of SL₂(Z).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GroupElement {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl GroupElement {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a * d - b * c;
        if det != 1 {
            return Err(Error::NotUnimodular(det));
        }
        Ok(GroupElement { a, b, c, d })
    }

    pub fn identity() -> Self {
        GroupElement { a: 1, b: 0, c: 0, d: 1 }
    }

    pub fn t() -> Self {
        GroupElement { a: 1, b: 1, c: 0, d: 1 }
    }

    pub fn s() -> Self {
        GroupElement { a: 0, b: -1, c: 1, d: 0 }
    }

    pub fn mul(&self, o: &GroupElement) -> GroupElement {
        GroupElement {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn act(&self, tau: &UHPoint) -> Result<UHPoint> {
        tau.mobius(self.a, self.b, self.c, self.d)
    }

    pub fn automorphy(&self, tau: &UHPoint) -> HpComplex {
        tau.automorphy(self.c, self.d)
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for GroupElement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<i64> = s
            .split(',')
            .map(|p| p.trim().parse::<i64>().map_err(|e| Error::Parse(format!("matrix entry {p:?}: {e}"))))
            .collect::<Result<_>>()?;
        match parts[..] {
            [a, b, c, d] => GroupElement::new(a, b, c, d),
            _ => Err(Error::Parse(format!("expected a,b,c,d, got {s:?}"))),
        }
    }
}

impl TryFrom<String> for GroupElement {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GroupElement> for String {
    fn from(m: GroupElement) -> String {
        m.to_string()
    }
}

/// The strictest of Γ ⊂ Γ₀(4) ⊂ SL₂(Z) containing a matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupClass {
    Gamma,
    Gamma0_4,
    Sl2z,
}

impl fmt::Display for GroupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupClass::Gamma => "Gamma",
            GroupClass::Gamma0_4 => "Gamma0(4)",
            GroupClass::Sl2z => "SL2(Z)",
        })
    }
}

/// Γ = {4 | c, c/4 ≡ (d−1)/2 ≡ b (mod 2)}.
pub fn in_gamma(m: &GroupElement) -> bool {
    if m.c % 4 != 0 {
        return false;
    }
    let x = (m.c / 4).rem_euclid(2);
    (m.d - 1).div_euclid(2).rem_euclid(2) == x && m.b.rem_euclid(2) == x
}

pub fn group_membership(m: &GroupElement) -> GroupClass {
    if in_gamma(m) {
        GroupClass::Gamma
    } else if m.c % 4 == 0 {
        GroupClass::Gamma0_4
    } else {
        GroupClass::Sl2z
    }
}

/// Classifies raw entries, rejecting non-unimodular input.
pub fn classify(a: i64, b: i64, c: i64, d: i64) -> Result<GroupClass> {
    Ok(group_membership(&GroupElement::new(a, b, c, d)?))
}

/// A random element of Γ with entries of size roughly `size`.
pub fn random_gamma_element<R: Rng>(rng: &mut R, size: i64) -> GroupElement {
    loop {
        let c = 4 * rng.gen_range(-size..=size);
        let d = 2 * rng.gen_range(-size..=size) + 1;
        if c.gcd(&d) != 1 {
            continue;
        }
        // a d − b c = 1
        let e = i64::extended_gcd(&d, &(-c));
        let sign = e.gcd;
        let (mut a, mut b) = (e.x * sign, e.y * sign);
        let t = rng.gen_range(-2..=2);
        a += t * c;
        b += t * d;
        let mut m = GroupElement { a, b, c, d };
        if m.b.rem_euclid(2) != (c / 4).rem_euclid(2) {
            m = GroupElement { a: a + c, b: b + d, c, d };
        }
        if in_gamma(&m) {
            debug_assert_eq!(m.a * m.d - m.b * m.c, 1);
            return m;
        }
    }
}

/// A unimodular root of unity, with its exact angle as a fraction of a turn when known.
#[derive(Clone, Debug)]
pub struct MultiplierValue {
    pub turns: Option<Rational64>,
    pub value: HpComplex,
}

impl MultiplierValue {
    pub fn from_turns(t: Rational64, prec: u32) -> Self {
        let t = t - t.floor();
        MultiplierValue { turns: Some(t), value: root_of_unity(t, working_prec(prec)) }
    }

    pub fn mul(&self, o: &MultiplierValue) -> MultiplierValue {
        let turns = match (self.turns, o.turns) {
            (Some(x), Some(y)) => {
                let t = x + y;
                Some(t - t.floor())
            }
            _ => None,
        };
        MultiplierValue { turns, value: &self.value * &o.value }
    }

    pub fn powi(&self, n: i64) -> MultiplierValue {
        let turns = self.turns.map(|t| {
            let t = t * n;
            t - t.floor()
        });
        MultiplierValue { turns, value: self.value.powi(n) }
    }
}

/// The η multiplier: η(Mτ) = ψ(M)(cτ+d)^{1/2}η(τ).
pub fn psi_multiplier(m: &GroupElement, prec: u32) -> Result<MultiplierValue> {
    Ok(MultiplierValue::from_turns(psi_turns(m.a, m.b, m.c, m.d)?, prec))
}

fn psi_scaled(m: &GroupElement, k: i64, prec: u32) -> Result<MultiplierValue> {
    if m.c % k != 0 {
        return Err(Error::DomainViolation(format!("{k} does not divide c in {m}")));
    }
    psi_multiplier(&GroupElement::new(m.a, k * m.b, m.c / k, m.d)?, prec)
}

/// ψ(a, 4b, c/4, d) exactly as printed for χ₁.
pub fn chi1_as_printed(m: &GroupElement, prec: u32) -> Result<MultiplierValue> {
    psi_scaled(m, 4, prec)
}

/// χ₁…χ₄. χ₁ is the multiplier of η(4τ)³, namely ψ(a,4b,c/4,d)³; χ₂ is
/// defined on Γ only.
pub fn chi_multiplier(k: u32, m: &GroupElement, prec: u32) -> Result<MultiplierValue> {
    if m.c % 4 != 0 {
        return Err(Error::DomainViolation(format!("chi multipliers need 4 | c, got {m}")));
    }
    match k {
        1 => Ok(psi_scaled(m, 4, prec)?.powi(3)),
        2 => {
            if !in_gamma(m) {
                return Err(Error::DomainViolation(format!("chi2 is defined on Gamma only, got {m}")));
            }
            let t = if m.c % 8 == 0 {
                rat(m.c, 32) + rat(m.d - 1, 8)
            } else {
                rat(1, 4) - rat(m.c, 32)
            };
            Ok(MultiplierValue::from_turns(t, prec))
        }
        3 => Ok(psi_scaled(m, 4, prec)?.mul(&psi_scaled(m, 2, prec)?.powi(-2))),
        4 => Ok(psi_scaled(m, 2, prec)?
            .powi(5)
            .mul(&psi_multiplier(m, prec)?.powi(-2))
            .mul(&psi_scaled(m, 4, prec)?.powi(-2))),
        _ => Err(Error::InvalidArgument(format!("no multiplier chi{k}"))),
    }
}

/// e^{πic/8}, the multiplier of the weight-one law on Γ.
pub fn phat_multiplier(m: &GroupElement, prec: u32) -> Result<MultiplierValue> {
    if !in_gamma(m) {
        return Err(Error::DomainViolation(format!("{m} is not in Gamma")));
    }
    Ok(MultiplierValue::from_turns(rat(m.c, 16), prec))
}

/// |f(Mτ) − mult·(cτ+d)^k f(τ)| / max(|f(Mτ)|, |f(τ)|) for half-integral k,
/// with the principal branch of the square root.
pub fn weight_transform_residual<F>(
    f: F,
    k: Rational64,
    mult: &MultiplierValue,
    m: &GroupElement,
    tau: &UHPoint,
    prec: u32,
) -> Result<f64>
where
    F: Fn(&UHPoint) -> Result<HpComplex>,
{
    let twice = k * 2;
    if !twice.is_integer() {
        return Err(Error::InvalidArgument(format!("weight {k} is not half-integral")));
    }
    let tau = tau.with_prec(working_prec(prec));
    let mt = m.act(&tau)?;
    let lhs = f(&mt)?;
    let base = f(&tau)?;
    let rhs = &(&mult.value * &m.automorphy(&tau).pow_half(twice.to_integer())) * &base;
    let scale = lhs.abs_f64().max(base.abs_f64());
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((&lhs - &rhs).abs_f64() / scale)
}

/// Sign σ in ψ(M₁M₂) = σψ(M₁)ψ(M₂), forced by the principal branches of
/// √(c₁M₂τ+d₁)·√(c₂τ+d₂)/√(c₁₂τ+d₁₂).
pub fn psi_cocycle_sign(m1: &GroupElement, m2: &GroupElement, tau: &UHPoint, prec: u32) -> Result<i64> {
    let tau = tau.with_prec(working_prec(prec));
    let j1 = m1.automorphy(&m2.act(&tau)?).sqrt();
    let j2 = m2.automorphy(&tau).sqrt();
    let j12 = m1.mul(m2).automorphy(&tau).sqrt();
    let r = &(&j1 * &j2) / &j12;
    let (re, im) = r.to_f64();
    if im.abs() > 1e-6 || (re.abs() - 1.0).abs() > 1e-6 {
        return Err(Error::PrecisionUnreachable(format!("branch ratio {re}+{im}i is not a sign")));
    }
    Ok(if re > 0.0 { 1 } else { -1 })
}

/// A finite-difference value with the size of its last Richardson correction.
#[derive(Clone, Debug)]
pub struct FdEstimate {
    pub value: HpComplex,
    pub error: f64,
}

pub const FD_STEP: f64 = 1e-4;
pub const FD_STEP_LAPLACE: f64 = 1e-3;

struct Stencil<'a, F> {
    f: &'a F,
    tau: UHPoint,
    wp: u32,
}

impl<'a, F> Stencil<'a, F>
where
    F: Fn(&UHPoint) -> Result<HpComplex>,
{
    fn new(f: &'a F, tau: &UHPoint, prec: u32, h: f64) -> Result<Self> {
        if tau.v().to_f64() <= 2.0 * h {
            return Err(Error::StencilThroughSingularity(format!("stencil of width {h} leaves the upper half plane")));
        }
        let wp = working_prec(prec);
        Ok(Stencil { f, tau: tau.with_prec(wp), wp })
    }

    fn at(&self, du: &Float, dv: &Float) -> Result<HpComplex> {
        let p = UHPoint::new(self.tau.tau() + &HpComplex::new(du.clone(), dv.clone()))?;
        (self.f)(&p).map_err(|e| match e {
            Error::PoleProximity(m) | Error::ContourThroughPole(m) => Error::StencilThroughSingularity(m),
            e => e,
        })
    }

    fn h(&self, h: f64) -> Float {
        Float::with_val(self.wp, h)
    }

    /// Central first difference along u (dir = 0) or v (dir = 1).
    fn d1(&self, dir: usize, h: f64) -> Result<HpComplex> {
        let hh = self.h(h);
        let z = Float::new(self.wp);
        let neg = Float::with_val(self.wp, -&hh);
        let (p, m) = if dir == 0 {
            (self.at(&hh, &z)?, self.at(&neg, &z)?)
        } else {
            (self.at(&z, &hh)?, self.at(&z, &neg)?)
        };
        Ok((&p - &m).scale(&Float::with_val(self.wp, 2.0 * &hh).recip()))
    }

    fn d2(&self, dir: usize, h: f64, center: &HpComplex) -> Result<HpComplex> {
        let hh = self.h(h);
        let z = Float::new(self.wp);
        let neg = Float::with_val(self.wp, -&hh);
        let (p, m) = if dir == 0 {
            (self.at(&hh, &z)?, self.at(&neg, &z)?)
        } else {
            (self.at(&z, &hh)?, self.at(&z, &neg)?)
        };
        let h2 = Float::with_val(self.wp, &hh * &hh);
        Ok((&(&p + &m) - &center.scale_i64(2)).scale(&h2.recip()))
    }

    fn richardson(coarse: HpComplex, fine: HpComplex) -> FdEstimate {
        let value = (&fine.scale_i64(4) - &coarse).scale_rational(rat(1, 3));
        let error = (&value - &fine).abs_f64();
        FdEstimate { value, error }
    }

    fn first(&self, dir: usize, h: f64) -> Result<FdEstimate> {
        Ok(Self::richardson(self.d1(dir, h)?, self.d1(dir, h / 2.0)?))
    }

    fn second(&self, dir: usize, h: f64, center: &HpComplex) -> Result<FdEstimate> {
        Ok(Self::richardson(self.d2(dir, h, center)?, self.d2(dir, h / 2.0, center)?))
    }
}

/// ∂f/∂τ̄ = ½(∂_u + i∂_v)f.
pub fn dtaubar_fd<F>(f: F, tau: &UHPoint, prec: u32) -> Result<FdEstimate>
where
    F: Fn(&UHPoint) -> Result<HpComplex>,
{
    let st = Stencil::new(&f, tau, prec, FD_STEP)?;
    let du = st.first(0, FD_STEP)?;
    let dv = st.first(1, FD_STEP)?;
    Ok(FdEstimate {
        value: (&du.value + &dv.value.mul_i()).scale_rational(rat(1, 2)),
        error: 0.5 * (du.error + dv.error),
    })
}

/// L f = −2iv²∂f/∂τ̄.
pub fn lowering_fd<F>(f: F, tau: &UHPoint, prec: u32) -> Result<FdEstimate>
where
    F: Fn(&UHPoint) -> Result<HpComplex>,
{
    let d = dtaubar_fd(f, tau, prec)?;
    let v = tau.v().to_f64();
    Ok(FdEstimate { value: d.value.mul_i().scale_f64(-2.0 * v * v), error: 2.0 * v * v * d.error })
}

/// ξ_k f = v^{k−2}·conj(L f) = 2iv^k·conj(∂f/∂τ̄).
pub fn xi_fd<F>(f: F, k: Rational64, tau: &UHPoint, prec: u32) -> Result<FdEstimate>
where
    F: Fn(&UHPoint) -> Result<HpComplex>,
{
    let l = lowering_fd(f, tau, prec)?;
    let v = tau.v().to_f64();
    let s = v.powf(*k.numer() as f64 / *k.denom() as f64 - 2.0);
    Ok(FdEstimate { value: l.value.conj().scale_f64(s), error: s * l.error })
}

/// Δ_k = −v²(∂_u² + ∂_v²) + ikv(∂_u + i∂_v), with step 10⁻³.
pub fn laplacian_fd<F>(f: F, k: Rational64, tau: &UHPoint, prec: u32) -> Result<FdEstimate>
where
    F: Fn(&UHPoint) -> Result<HpComplex>,
{
    let h = FD_STEP_LAPLACE;
    let st = Stencil::new(&f, tau, prec, h)?;
    let center = f(&st.tau)?;
    let uu = st.second(0, h, &center)?;
    let vv = st.second(1, h, &center)?;
    let du = st.first(0, h)?;
    let dv = st.first(1, h)?;
    let v = tau.v().to_f64();
    let kf = *k.numer() as f64 / *k.denom() as f64;
    let second = (&uu.value + &vv.value).scale_f64(-v * v);
    let first = (&du.value + &dv.value.mul_i()).mul_i().scale_f64(kf * v);
    Ok(FdEstimate {
        value: &second + &first,
        error: v * v * (uu.error + vv.error) + kf.abs() * v * (du.error + dv.error),
    })
}
