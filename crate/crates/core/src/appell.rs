//! Zwegers' μ, the non-holomorphic R and E, the completion μ̂, and their
//! torsion specializations.
//!
//! z-derivatives of R are Wirtinger derivatives ∂/∂z (R is not holomorphic in z).

use crate::classical::{gaussian_jets, psi_turns, theta_numeric, theta_series_at_torsion};
use crate::error::{Error, Result};
use crate::exactalg::{scale_exponent, Cyc8, QSeries};
use crate::hp::{pi, root_of_unity, working_prec, HpComplex, UHPoint};
use num_rational::Rational64;
use rug::Float;
use std::f64::consts::{LN_2, PI};

fn rat(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// E(w) = 2∫₀^w e^{−πt²}dt = erf(√π·w).
pub fn e_numeric(w: &Float, prec: u32) -> Float {
    let wp = working_prec(prec);
    let x = Float::with_val(wp, w) * pi(wp).sqrt();
    x.erf()
}

/// sgn(s) − E(x), with the complementary route when the signs agree.
fn sgn_minus_e(s: i32, x: &Float) -> Float {
    let p = x.prec();
    let sx = if x.is_zero() { 0 } else if x.is_sign_negative() { -1 } else { 1 };
    let spx = Float::with_val(p, x * pi(p).sqrt());
    if sx == s && s != 0 {
        let e = Float::with_val(p, spx.abs_ref()).erfc();
        if s > 0 {
            e
        } else {
            -e
        }
    } else {
        Float::with_val(p, s) - spx.erf()
    }
}

/// R(z;τ) and its Wirtinger z-derivatives up to order `kmax` (at most 2).
pub fn r_jets(z: &HpComplex, tau: &UHPoint, kmax: usize, prec: u32) -> Result<Vec<HpComplex>> {
    assert!(kmax <= 2, "R jets are implemented up to second order");
    let wp = working_prec(prec);
    let t = tau.tau().with_prec(wp);
    let z = z.with_prec(wp);
    let vf = t.im.to_f64();
    let yf = z.im.to_f64();
    let v = t.im.clone();
    let yv = Float::with_val(wp, &z.im / &v);
    let s2v = Float::with_val(wp, &v * 2u32).sqrt();
    let center = -yf / vf;
    let span = ((wp as f64 + 24.0) * LN_2 / (PI * vf)).sqrt() + 2.0;
    let lo = (center.min(0.0) - span).floor() as i64;
    let hi = (center.max(0.0) + span).ceil() as i64;
    if hi - lo > 4_000_000 {
        return Err(Error::PrecisionUnreachable("R needs too many terms".into()));
    }
    let pif = pi(wp);
    let two_pi_i = HpComplex::new(Float::new(wp), Float::with_val(wp, &pif * 2u32));
    let g1c = HpComplex::new(Float::new(wp), Float::with_val(wp, Float::with_val(wp, 2u32 / &v).sqrt()));
    let mut out = vec![HpComplex::zero(wp); kmax + 1];
    for k in lo..=hi {
        let n = rat(2 * k + 1, 2);
        let s = if k >= 0 { 1 } else { -1 };
        let nf = Float::with_val(wp, k) + 0.5f64;
        let x = Float::with_val(wp, &nf + &yv) * &s2v;
        let g = HpComplex::from_real(sgn_minus_e(s, &x));
        // X = (−1)^k e^{−2πi(n²τ/2 + nz)}
        let arg = &t.scale_rational(n * n / 2) + &z.scale_rational(n);
        let mut xn = (-arg).e2pii();
        if k.rem_euclid(2) == 1 {
            xn = -xn;
        }
        out[0] += &(&g * &xn);
        if kmax >= 1 {
            let dx = two_pi_i.scale_rational(-n);
            let gauss = Float::with_val(wp, -(Float::with_val(wp, &x * &x) * &pif)).exp();
            let g1 = g1c.scale(&gauss);
            let xd = &xn * &dx;
            out[1] += &(&(&g1 * &xn) + &(&g * &xd));
            if kmax >= 2 {
                let g2 = HpComplex::from_real(-(Float::with_val(wp, &x * &pif) * 2u32 / &v) * &gauss);
                let xdd = &xd * &dx;
                out[2] += &(&(&(&g2 * &xn) + &(&g1 * &xd).scale_i64(2)) + &(&g * &xdd));
            }
        }
    }
    Ok(out)
}

pub fn r_numeric(z: &HpComplex, tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    Ok(r_jets(z, tau, 0, prec)?.swap_remove(0))
}

/// e^{πiz1} Σ_n (−1)^n e^{2πins} q^{(n²+n)/2}/(1 − e^{2πiz1}qⁿ), i.e. ϑ(s)·μ(z1,s)
/// without the division, so that s may be a lattice point.
pub fn theta_mu(z1: &HpComplex, s: &HpComplex, tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    let wp = working_prec(prec);
    let t = tau.tau().with_prec(wp);
    let (z1, s) = (z1.with_prec(wp), s.with_prec(wp));
    let vf = t.im.to_f64();
    let (y1, ys) = (z1.im.to_f64(), s.im.to_f64());
    let logmag = |n: f64| {
        let den = (-2.0 * PI * (y1 + vf * n)).max(0.0);
        -PI * vf * (n * n + n) - 2.0 * PI * n * ys - den
    };
    let center = -(0.5 + ys / vf);
    let lmax = logmag(center).max(logmag(center.floor())).max(logmag(center.ceil()));
    let cutoff = lmax - (wp as f64 + 24.0) * LN_2;
    let pole_tol = 2f64.powi(-(prec as i32) / 2);
    let zeta1 = z1.e2pii();
    let mut acc = HpComplex::zero(wp);
    let one = HpComplex::one(wp);
    let mut term = |n: i64| -> Result<bool> {
        let nf = n as f64;
        if logmag(nf) < cutoff {
            return Ok(false);
        }
        let qn = (&t.scale_i64(n)).e2pii();
        let den = &one - &(&zeta1 * &qn);
        if den.abs_f64() < pole_tol {
            return Err(Error::PoleProximity(format!("|1 - e(z1) q^{n}| below 2^(-P/2)")));
        }
        let num = (&t.scale_rational(rat(n * n + n, 2)) + &s.scale_i64(n)).e2pii();
        let mut tn = &num / &den;
        if n.rem_euclid(2) == 1 {
            tn = -tn;
        }
        acc += &tn;
        Ok(true)
    };
    let k0 = center.round() as i64;
    term(k0)?;
    let mut n = k0 + 1;
    while term(n)? || (n as f64) < center {
        n += 1;
        if n - k0 > 4_000_000 {
            return Err(Error::PrecisionUnreachable("mu needs too many terms".into()));
        }
    }
    let mut n = k0 - 1;
    while term(n)? || (n as f64) > center {
        n -= 1;
        if k0 - n > 4_000_000 {
            return Err(Error::PrecisionUnreachable("mu needs too many terms".into()));
        }
    }
    Ok(&z1.scale_rational(rat(1, 2)).e2pii() * &acc)
}

pub fn mu_numeric(z1: &HpComplex, z2: &HpComplex, tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    let th = theta_numeric(z2, tau, prec)?;
    if th.abs_f64() < 2f64.powi(-(prec as i32) / 2) {
        return Err(Error::PoleProximity("theta(z2) vanishes".into()));
    }
    Ok(&theta_mu(z1, z2, tau, prec)? / &th)
}

/// μ̂ = μ + (i/2)R(z1 − z2).
pub fn mu_hat_numeric(z1: &HpComplex, z2: &HpComplex, tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    let m = mu_numeric(z1, z2, tau, prec)?;
    let r = r_numeric(&(z1 - z2), tau, prec)?;
    Ok(&m + &r.mul_i().scale_rational(rat(1, 2)))
}

/// Relative residual of the modular law of μ̂ under M = [a, b, c, d].
pub fn mu_hat_transform_check(m: [i64; 4], z1: &HpComplex, z2: &HpComplex, tau: &UHPoint, prec: u32) -> Result<f64> {
    let [a, b, c, d] = m;
    let wp = working_prec(prec);
    let t = tau.with_prec(wp);
    let j = t.automorphy(c, d);
    let mt = t.mobius(a, b, c, d)?;
    let (z1, z2) = (z1.with_prec(wp), z2.with_prec(wp));
    let lhs = mu_hat_numeric(&(&z1 / &j), &(&z2 / &j), &mt, prec)?;
    let psi = root_of_unity(-psi_turns(a, b, c, d)? * 3, wp);
    let dz = &z1 - &z2;
    let ex = (&(&dz * &dz).scale_i64(c) / &j).scale_rational(rat(-1, 2)).e2pii();
    let rhs = &(&(&psi * &j.sqrt()) * &ex) * &mu_hat_numeric(&z1, &z2, &t, prec)?;
    let scale = lhs.abs_f64().max(rhs.abs_f64()).max(f64::MIN_POSITIVE);
    Ok((&lhs - &rhs).abs_f64() / scale)
}

fn rel(a: &HpComplex, b: &HpComplex) -> f64 {
    let scale = a.abs_f64().max(b.abs_f64()).max(f64::MIN_POSITIVE);
    (a - b).abs_f64() / scale
}

/// Relative residuals of the symmetry, elliptic and modular laws of μ, μ̂
/// and R at one point, labelled by law.
pub fn mu_law_residuals(
    z1: &HpComplex,
    z2: &HpComplex,
    tau: &UHPoint,
    m: [i64; 4],
    shifts: [i64; 4],
    prec: u32,
) -> Result<Vec<(&'static str, f64)>> {
    let wp = working_prec(prec);
    let t = tau.with_prec(wp);
    let (z1, z2) = (z1.with_prec(wp), z2.with_prec(wp));
    let tt = t.tau().clone();
    let mut out = Vec::new();

    let mh = mu_hat_numeric(&z1, &z2, &t, prec)?;
    out.push(("mu_hat swap", rel(&mh, &mu_hat_numeric(&z2, &z1, &t, prec)?)));
    out.push(("mu_hat negate", rel(&mh, &mu_hat_numeric(&-&z1, &-&z2, &t, prec)?)));
    out.push(("mu_hat modular", mu_hat_transform_check(m, &z1, &z2, &t, prec)?));

    let [r1, s1, r2, s2] = shifts;
    let w1 = &(&z1 + &tt.scale_i64(r1)) + &HpComplex::from_f64(s1 as f64, 0.0, wp);
    let w2 = &(&z2 + &tt.scale_i64(r2)) + &HpComplex::from_f64(s2 as f64, 0.0, wp);
    let dr = r1 - r2;
    let sign = if (r1 + s1 + r2 + s2).rem_euclid(2) == 0 { 1 } else { -1 };
    let ex = (&tt.scale_rational(rat(dr * dr, 2)) + &(&z1 - &z2).scale_i64(dr)).e2pii();
    out.push(("mu_hat lattice shift", rel(&mu_hat_numeric(&w1, &w2, &t, prec)?, &(&ex * &mh).scale_i64(sign))));

    let z = &z1 - &z2;
    let r = r_numeric(&z, &t, prec)?;
    out.push(("R(z+1)", rel(&r_numeric(&(&z + &HpComplex::one(wp)), &t, prec)?, &-&r)));
    let want = &(-&(&(&z.e2pii() * &t.q_pow(rat(1, 2))) * &r))
        + &(&z.scale_rational(rat(1, 2)).e2pii() * &t.q_pow(rat(3, 8))).scale_i64(2);
    out.push(("R(z+tau)", rel(&r_numeric(&(&z + &tt), &t, prec)?, &want)));

    let mu = mu_numeric(&z1, &z2, &t, prec)?;
    out.push(("mu swap", rel(&mu, &mu_numeric(&z2, &z1, &t, prec)?)));
    let want = &(-&(&(&z + &tt.scale_rational(rat(1, 2))).e2pii() * &mu))
        - &(&z.scale_rational(rat(1, 2)) + &tt.scale_rational(rat(3, 8))).e2pii().mul_i();
    out.push(("mu(z1+tau)", rel(&mu_numeric(&(&z1 + &tt), &z2, &t, prec)?, &want)));
    Ok(out)
}

/// A torsion point z = aτ + b.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorsionPoint {
    pub a: Rational64,
    pub b: Rational64,
}

impl TorsionPoint {
    pub fn new(a: Rational64, b: Rational64) -> Self {
        TorsionPoint { a, b }
    }

    pub fn eval(&self, tau: &UHPoint) -> HpComplex {
        let p = tau.prec();
        &tau.tau().scale_rational(self.a) + &HpComplex::from_rational(self.b, p)
    }
}

/// Σ_n (−1)^n e^{2πinb2} q^{(n²+n)/2 + na2}/(1 − e^{2πib1}q^{a1+n}), expanded to O(q^{order/d}).
fn theta_mu_series(z1: TorsionPoint, z2: TorsionPoint, d: i64, order: i64) -> Result<QSeries> {
    let x = order as f64 / d as f64;
    let a1 = *z1.a.numer() as f64 / *z1.a.denom() as f64;
    let a2 = *z2.a.numer() as f64 / *z2.a.denom() as f64;
    let m = (2.0 * x.abs()).sqrt() as i64 + (a1.abs() + a2.abs()) as i64 + 8;
    let w = Cyc8::root_of_unity(z1.b)?;
    let mut terms: Vec<(i64, Cyc8)> = Vec::new();
    for n in -m..=m {
        let nr = Rational64::from_integer(n);
        let base = scale_exponent(rat(n * n + n, 2) + nr * z2.a, d)?;
        let mut c = Cyc8::root_of_unity(nr * z2.b)?;
        if n.rem_euclid(2) == 1 {
            c = -c;
        }
        let g = scale_exponent(z1.a + nr, d)?;
        if g > 0 {
            // Σ_k w^k q^{kg}
            let mut e = base;
            let mut wk = Cyc8::one();
            while e < order {
                terms.push((e, &c * &wk));
                e += g;
                wk = &wk * &w;
            }
        } else if g < 0 {
            // −Σ_{k≥1} w^{−k} q^{−kg}
            let winv = w.inv()?;
            let mut e = base - g;
            let mut wk = winv.clone();
            while e < order {
                terms.push((e, -(&c * &wk)));
                e -= g;
                wk = &wk * &winv;
            }
        } else {
            let den = &Cyc8::one() - &w;
            if den.is_zero() {
                return Err(Error::SpecializationPole(format!("1 - e({}) vanishes at n = {n}", z1.b)));
            }
            if base < order {
                terms.push((base, c.div(&den)?));
            }
        }
    }
    Ok(QSeries::from_terms(d, terms, order))
}

/// μ(z1, z2) at torsion points as an exact series to O(q^{order/d}).
pub fn mu_torsion_series(z1: TorsionPoint, z2: TorsionPoint, d: i64, order: i64) -> Result<QSeries> {
    let p = scale_exponent(z1.a / 2, d)?;
    let pre = Cyc8::root_of_unity(z1.b / 2)?;
    // ϑ(z2) with enough terms to know its floor, then the real orders
    let th_probe = theta_series_at_torsion(z2.a, z2.b, d, order.abs() + 4 * d)?;
    let ft = th_probe.floor();
    if th_probe.is_zero() {
        return Err(Error::SpecializationPole("theta(z2) vanishes identically".into()));
    }
    let s = theta_mu_series(z1, z2, d, order - p + ft)?;
    let fs = s.floor();
    let th = theta_series_at_torsion(z2.a, z2.b, d, order - p - fs + 2 * ft)?;
    Ok(s.mul(&th.invert()?)?.mul_monomial(&pre, p).truncate(order))
}

/// ∂/∂τ̄ of R(aτ + b; τ) as a unary theta-type sum.
pub fn dtaubar_r_numeric(a: Rational64, b: Rational64, tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    let wp = working_prec(prec);
    let (j0, j1, pre) = shadow_parts(a, b, tau, wp)?;
    let two_pi_i = HpComplex::new(Float::new(wp), pi(wp) * 2u32);
    // (−1)^{n+1/2} = i e^{πin}
    let s = (&(&j1 / &two_pi_i) + &j0.scale_rational(a)).mul_i();
    let c = Float::with_val(wp, Float::with_val(wp, tau.v() * 2u32).sqrt()).recip();
    Ok((&pre * &s).mul_i().scale(&c))
}

/// ∂/∂τ̄ of [∂R/∂z](aτ + b; τ) as a unary theta-type sum.
pub fn dz_dtaubar_r_numeric(a: Rational64, b: Rational64, tau: &UHPoint, prec: u32) -> Result<HpComplex> {
    let wp = working_prec(prec);
    let (j0, j1, pre) = shadow_parts(a, b, tau, wp)?;
    let pif = pi(wp);
    let two_pi_i = HpComplex::new(Float::new(wp), Float::with_val(wp, &pif * 2u32));
    let v = Float::with_val(wp, tau.v());
    let af = Float::with_val(wp, *a.numer()) / *a.denom();
    let c0 = Float::with_val(wp, v.clone().recip()) + Float::with_val(wp, &af * &af) * Float::with_val(wp, &pif * 4u32);
    let c1 = Float::with_val(wp, &af * &pif) * 4u32;
    let s = &j0.scale(&c0) + &(&j1 / &two_pi_i).scale(&c1);
    // (−1)^{n−1/2} = −i e^{πin}
    let s = -s.mul_i();
    let den = Float::with_val(wp, Float::with_val(wp, &v * 2u32).sqrt() * 2u32).recip();
    Ok((&pre * &s).scale(&den))
}

/// (Σ e^{πin²τ' + 2πinw}, Σ 2πin(...), e^{−2πa²v}) over n ∈ 1/2+Z, with
/// τ' = −τ̄ and w = aτ' − b + 1/2. The e^{πin} absorbed in w equals i(−1)^{n−1/2}.
fn shadow_parts(a: Rational64, b: Rational64, tau: &UHPoint, wp: u32) -> Result<(HpComplex, HpComplex, HpComplex)> {
    let t = tau.with_prec(wp).neg_conj();
    let w = &(&t.tau().scale_rational(a) - &HpComplex::from_rational(b, wp)) + &HpComplex::from_rational(rat(1, 2), wp);
    let (j, _) = gaussian_jets(rat(1, 2), &w, t.tau(), 1, wp)?;
    let v = Float::with_val(wp, t.v());
    let af = Float::with_val(wp, *a.numer()) / *a.denom();
    let e = Float::with_val(wp, -(Float::with_val(wp, &af * &af) * &v * pi(wp) * 2u32)).exp();
    Ok((j[0].clone(), j[1].clone(), HpComplex::from_real(e)))
}

/// R(τ/2 + 1/4) = e^{πi/4}q^{1/8} + N₁(τ); returns the turn offset of the
/// holomorphic coefficient and N₁(τ).
pub fn r_holo_split(tau: &UHPoint, prec: u32) -> Result<(Rational64, HpComplex)> {
    let wp = working_prec(prec);
    let t = tau.with_prec(wp);
    let vf = t.v().to_f64();
    let s2v = Float::with_val(wp, Float::with_val(wp, t.v() * 2u32).sqrt());
    let span = ((wp as f64 + 24.0) * LN_2 / (PI * vf)).sqrt() as i64 + 2;
    let mut acc = HpComplex::zero(wp);
    for n in -span..=span {
        let m = 2 * n + 1;
        let x = Float::with_val(wp, &s2v * m);
        let g = sgn_minus_e(if m > 0 { 1 } else { -1 }, &x);
        let mut term = t.q_pow(rat(-m * m, 2)).scale(&g);
        if n.rem_euclid(2) == 1 {
            term = -term;
        }
        acc += &term;
    }
    let n1 = &(&root_of_unity(rat(-1, 8), wp) * &t.q_pow(rat(1, 8))) * &acc;
    Ok((rat(1, 8), n1))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;
    const WP: u32 = 256;

    fn c(re: f64, im: f64) -> HpComplex {
        HpComplex::from_f64(re, im, WP)
    }

    fn tau(u: f64, v: f64) -> UHPoint {
        UHPoint::from_f64(u, v, WP).unwrap()
    }

    #[test]
    fn e_basic() {
        assert!(e_numeric(&Float::new(WP), P).is_zero());
        for w in [0.3, 1.7, -2.2] {
            let a = e_numeric(&Float::with_val(WP, w), P);
            let b = e_numeric(&Float::with_val(WP, -w), P);
            assert!(Float::with_val(WP, &a + &b).abs() < 1e-70);
        }
    }

    #[test]
    fn e_matches_series_oracle() {
        // 2 Σ (−π)^k w^{2k+1}/(k!(2k+1))
        for w in [0.25f64, 1.0, 3.0] {
            let p = 400;
            let wf = Float::with_val(p, w);
            let pif = pi(p);
            let mut term = Float::with_val(p, &wf);
            let mut sum = Float::new(p);
            for k in 0..2000u32 {
                sum += Float::with_val(p, &term / (2 * k + 1));
                term *= Float::with_val(p, -(Float::with_val(p, &wf * &wf) * &pif));
                term /= k + 1;
            }
            sum *= 2u32;
            let e = e_numeric(&Float::with_val(WP, w), 192);
            let diff = Float::with_val(p, &sum - &e).abs().to_f64();
            assert!(diff < 2f64.powi(-192 + 4), "w = {w}: {diff}");
        }
    }

    #[test]
    fn e_matches_quadrature_oracle() {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, eps: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() < 15.0 * eps {
                return left + right + (left + right - whole) / 15.0;
            }
            simpson(f, a, m, fa, flm, fm, eps / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, eps / 2.0, depth - 1)
        }
        let f = |t: f64| 2.0 * (-PI * t * t).exp();
        for w in [0.25f64, 1.0, 3.0] {
            let q = simpson(&f, 0.0, w, f(0.0), f(w / 2.0), f(w), 1e-15, 40);
            let e = e_numeric(&Float::with_val(WP, w), 40).to_f64();
            assert!((q - e).abs() < 2f64.powi(-40 + 4), "w = {w}");
        }
    }

    #[test]
    fn r_symmetries() {
        let t = tau(0.17, 0.83);
        let z = c(0.23, -0.11);
        let r = r_numeric(&z, &t, P).unwrap();
        let r1 = r_numeric(&(&z + &HpComplex::one(WP)), &t, P).unwrap();
        assert!((&r + &r1).abs_f64() < 1e-34);
        let rm = r_numeric(&-&z, &t, P).unwrap();
        assert!((&r - &rm).abs_f64() < 1e-34);
        // R(z+τ) = −ζq^{1/2}R(z) + 2ζ^{1/2}q^{3/8}
        let rt = r_numeric(&(&z + t.tau()), &t, P).unwrap();
        let zeta = z.e2pii();
        let want = &(-&(&zeta * &t.q_pow(rat(1, 2))) * &r)
            + &(&z.scale_rational(rat(1, 2)).e2pii() * &t.q_pow(rat(3, 8))).scale_i64(2);
        assert!((&rt - &want).abs_f64() < 1e-33);
    }

    #[test]
    fn r_at_tau_plus_half() {
        let t = tau(0.13, 1.1);
        let z = &t.tau().clone() + &HpComplex::from_rational(rat(1, 2), WP);
        let r = r_numeric(&z, &t, P).unwrap();
        let want = t.q_pow(rat(3, 8)).mul_i().scale_i64(2);
        assert!((&r - &want).abs_f64() < 1e-20);
    }

    #[test]
    fn r_jets_match_finite_differences() {
        let t = tau(0.1, 0.9);
        let z = c(0.2, 0.15);
        let j = r_jets(&z, &t, 2, P).unwrap();
        let h = 1e-12;
        let f = |dx: f64, dy: f64| r_numeric(&(&z + &c(dx, dy)), &t, P).unwrap();
        // ∂z = (∂x − i∂y)/2
        let dx = (&f(h, 0.0) - &f(-h, 0.0)).scale_f64(0.5 / h);
        let dy = (&f(0.0, h) - &f(0.0, -h)).scale_f64(0.5 / h);
        let dz = (&dx - &dy.mul_i()).scale_f64(0.5);
        assert!((&dz - &j[1]).abs_f64() < 1e-9);
        let g = |dx: f64, dy: f64| r_jets(&(&z + &c(dx, dy)), &t, 1, P).unwrap().swap_remove(1);
        let dx = (&g(h, 0.0) - &g(-h, 0.0)).scale_f64(0.5 / h);
        let dy = (&g(0.0, h) - &g(0.0, -h)).scale_f64(0.5 / h);
        let dz2 = (&dx - &dy.mul_i()).scale_f64(0.5);
        assert!((&dz2 - &j[2]).abs_f64() < 1e-8);
    }

    #[test]
    fn mu_laws() {
        let t = tau(0.07, 1.03);
        let (z1, z2) = (c(0.31, 0.12), c(-0.17, 0.29));
        let a = mu_numeric(&z1, &z2, &t, P).unwrap();
        let b = mu_numeric(&z2, &z1, &t, P).unwrap();
        assert!((&a - &b).abs_f64() < 1e-33);
        let ha = mu_hat_numeric(&z1, &z2, &t, P).unwrap();
        let hb = mu_hat_numeric(&-&z1, &-&z2, &t, P).unwrap();
        assert!((&ha - &hb).abs_f64() < 1e-33);
        let shifted = mu_numeric(&(&z1 + t.tau()), &z2, &t, P).unwrap();
        let d = &z1 - &z2;
        let want = &(-&(&(&d + &t.tau().scale_rational(rat(1, 2))).e2pii() * &a))
            - &(&d.scale_rational(rat(1, 2)) + &t.tau().scale_rational(rat(3, 8))).e2pii().mul_i();
        assert!((&shifted - &want).abs_f64() < 1e-32);
    }

    #[test]
    fn mu_hat_modular() {
        let t = tau(0.11, 0.97);
        let (z1, z2) = (c(0.21, 0.1), c(0.05, -0.2));
        for m in [[1, 0, 0, 1], [1, 1, 0, 1], [0, -1, 1, 0], [1, 0, 2, 1]] {
            let r = mu_hat_transform_check(m, &z1, &z2, &t, P).unwrap();
            assert!(r < 2f64.powi(-(P as i32) + 10), "{m:?}: {r}");
        }
    }

    #[test]
    fn pole_proximity() {
        let t = tau(0.0, 1.0);
        let r = mu_numeric(&HpComplex::zero(WP), &c(0.3, 0.1), &t, P);
        assert!(matches!(r, Err(Error::PoleProximity(_))));
    }

    #[test]
    fn mu_series_symmetry_and_numeric() {
        let d = 24;
        let z1 = TorsionPoint::new(rat(1, 2), rat(0, 1));
        let z2 = TorsionPoint::new(rat(1, 2), rat(1, 4));
        let a = mu_torsion_series(z1, z2, d, 20 * d).unwrap();
        let b = mu_torsion_series(z2, z1, d, 20 * d).unwrap();
        assert_eq!(a.agree_to(&b).unwrap(), Ok(20 * d));

        let big = mu_torsion_series(z1, z2, d, 60 * d).unwrap();
        let t = tau(0.0, 1.2);
        let direct = mu_numeric(&z1.eval(&t), &z2.eval(&t), &t, P).unwrap();
        assert!((&big.eval(&t) - &direct).abs_f64() < 2f64.powi(-40));
    }

    #[test]
    fn shadow_sums_match_finite_differences() {
        let t = tau(0.15, 0.95);
        let h = 1e-6;
        for (a, b) in [(rat(1, 2), rat(1, 4)), (rat(-1, 2), rat(-1, 2)), (rat(1, 3), rat(1, 5))] {
            let f = |du: f64, dv: f64| {
                let tt = UHPoint::from_f64(0.15 + du, 0.95 + dv, WP).unwrap();
                let z = TorsionPoint::new(a, b).eval(&tt);
                r_jets(&z, &tt, 1, P).unwrap()
            };
            let (up, um, vp, vm) = (f(h, 0.0), f(-h, 0.0), f(0.0, h), f(0.0, -h));
            let fd = |k: usize| {
                let du = (&up[k] - &um[k]).scale_f64(0.5 / h);
                let dv = (&vp[k] - &vm[k]).scale_f64(0.5 / h);
                (&du + &dv.mul_i()).scale_f64(0.5)
            };
            let s0 = dtaubar_r_numeric(a, b, &t, P).unwrap();
            assert!((&fd(0) - &s0).abs_f64() < 1e-8, "(2.4) at {a},{b}: {} vs {}", fd(0), s0);
            let s1 = dz_dtaubar_r_numeric(a, b, &t, P).unwrap();
            assert!((&fd(1) - &s1).abs_f64() < 1e-6, "(2.5) at {a},{b}: {} vs {}", fd(1), s1);
        }
    }

    #[test]
    fn holo_split() {
        let t = tau(0.2, 1.3);
        let (turn, n1) = r_holo_split(&t, P).unwrap();
        let holo = &root_of_unity(turn, WP) * &t.q_pow(rat(1, 8));
        let z = TorsionPoint::new(rat(1, 2), rat(1, 4)).eval(&t);
        let r = r_numeric(&z, &t, P).unwrap();
        assert!((&(&holo + &n1) - &r).abs_f64() < 1e-33, "{} vs {}", &holo + &n1, r);
        let z3 = TorsionPoint::new(rat(1, 2), rat(3, 4)).eval(&t);
        let r3 = r_numeric(&z3, &t, P).unwrap();
        let want = &(-n1.mul_i()) + &(&root_of_unity(rat(3, 8), WP) * &t.q_pow(rat(1, 8)));
        assert!((&want - &r3).abs_f64() < 1e-33);
        let mut last = f64::INFINITY;
        for v in [2.0, 4.0, 6.0] {
            let m = r_holo_split(&tau(0.0, v), P).unwrap().1.abs_f64();
            assert!(m < last * 1e-2);
            last = m;
        }
    }
}
