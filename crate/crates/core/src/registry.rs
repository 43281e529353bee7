//! Named identity checks with default parameters and machine-readable reports.

use crate::appell::{mu_hat_numeric, mu_law_residuals, r_numeric};
use crate::classical::{finite_jtp_check, heine_check, heine_extraction_params, theta_series_at_torsion, EtaQuotient};
use crate::combinatorics::{genfun, Family, Side};
use crate::error::{Error, Result};
use crate::exactalg::{Cyc8, Mismatch, Monomial, DEFAULT_LATTICE, DEFAULT_ZETA_LATTICE};
use crate::hp::{working_prec, HpComplex, UHPoint};
use crate::indefinite::{
    dtaubar_fcal1_expected, f2_shadow_expected, f_cone_numeric, f_family_numeric, f_mu_numeric, fcal_d1_numeric,
    hhat12_numeric, hhat1_numeric, holomorphic_part_numeric, lowering_rhs_corrected_numeric, lowering_rhs_numeric,
    pbar_omega_series, phat_holomorphic_numeric, phat_omega_numeric, pwz_coefficient_check, pwz_identity_check,
    PbarRoute, PhatContext,
};
use crate::modular::{
    chi_multiplier, dtaubar_fd, laplacian_fd, lowering_fd, phat_multiplier, weight_transform_residual, xi_fd,
    GroupElement,
};
use crate::classical::eta_numeric;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use std::time::Instant;

pub const SCHEMA_VERSION: u32 = 1;

/// Generic points, v ≈ 1, away from cusps.
pub const DEFAULT_TAUS: [(f64, f64); 3] = [(0.11, 0.93), (-0.23, 1.07), (0.31, 1.49)];
const EXTRA_TAUS: [(f64, f64); 2] = [(0.05, 1.21), (-0.37, 0.88)];
pub const DEFAULT_MATRICES: [[i64; 4]; 3] = [[7, 5, 4, 3], [1, 0, 8, 1], [-1, 1, -4, 3]];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Exact,
    Numeric,
}

/// Where a check failed: a coefficient exponent or an evaluation point, and both sides there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub location: String,
    pub left: String,
    pub right: String,
}

impl From<Mismatch> for Witness {
    fn from(m: Mismatch) -> Self {
        Witness { location: m.exponent, left: m.left, right: m.right }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub order: Option<i64>,
    pub prec: Option<u32>,
    pub taus: Vec<[f64; 2]>,
    pub matrices: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub id: String,
    pub params: Params,
    pub status: Status,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub witness: Option<Witness>,
    pub message: Option<String>,
    pub elapsed_ms: u64,
}

/// Per-run replacements for registered defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    pub order: Option<i64>,
    pub prec: Option<u32>,
    pub taus: Option<Vec<(f64, f64)>>,
    pub tolerance: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct IdentityInfo {
    pub id: &'static str,
    pub kind: Kind,
    pub summary: &'static str,
    pub order: Option<i64>,
    pub prec: Option<u32>,
    pub tolerance: Option<f64>,
}

const fn exact(id: &'static str, summary: &'static str, order: i64) -> IdentityInfo {
    IdentityInfo { id, kind: Kind::Exact, summary, order: Some(order), prec: None, tolerance: None }
}

const fn numeric(id: &'static str, summary: &'static str, prec: u32, tol: f64) -> IdentityInfo {
    IdentityInfo { id, kind: Kind::Numeric, summary, order: None, prec: Some(prec), tolerance: Some(tol) }
}

static REGISTRY: [IdentityInfo; 21] = [
    exact("spt-andrews", "spt generating function: smallest-parts sum against divisor and pentagonal form", 40),
    exact("spt-omega", "spt_omega generating function against its Appell-Lerch type form", 40),
    exact("sptbar-omega", "overpartition spt_omega against its Appell-Lerch type form", 40),
    exact("sptG2-equiv", "spt_G2 agrees termwise with the overpartition spt_omega", 40),
    exact("pomega-qomega", "p_omega(q) = q omega(q)", 40),
    exact("thm-pwz", "two-variable identity for (zeta, zeta^-1 q)_inf P_omega(zeta; q), denominators cleared", 25),
    exact("cor-pwrep", "P_omega as an indefinite triple sum over two cones, against definition and enumeration", 60),
    numeric("brz-F", "cone sum for F against its Appell function form", 192, 1e-20),
    numeric("hhat1-zero", "H1 vanishes", 192, 1e-20),
    numeric("hhat2-phat", "H2 = -4i eta^3 P_omega-hat", 192, 1e-20),
    numeric("phat-weight1", "P_omega-hat is weight one on Gamma with multiplier e(c/16)", 192, 1e-15),
    numeric("phat-holpart", "P_omega-hat minus P_omega + 1/4 - f3/2 is below 1e-8 at v = 4 and decays", 128, 1e-8),
    numeric("phat-lowering", "lowering operator of P_omega-hat, right side as printed", 128, 1e-6),
    numeric("f2-shadow", "xi_1/2 f2 and the antiholomorphic derivative of F'(0)", 128, 1e-6),
    IdentityInfo {
        id: "theta-shifts",
        kind: Kind::Exact,
        summary: "theta at tau+1/2 and tau/2+1/4 as eta quotients (exact), R(tau+1/2) = 2iq^(3/8) (numeric)",
        order: Some(30),
        prec: Some(128),
        tolerance: Some(1e-20),
    },
    IdentityInfo {
        id: "mu-laws",
        kind: Kind::Numeric,
        summary: "laws of mu, mu-hat and R below 2^(10-P); Laplacian of mu-hat at torsion points below 1e-5",
        order: None,
        prec: Some(128),
        tolerance: None,
    },
    exact("finite-jtp", "finite Jacobi triple product for n <= 5", 30),
    exact("heine", "Heine transformation for the parameters used in the coefficient extraction", 25),
    numeric("phat-holpart-corrected", "holomorphic part of P_omega-hat from the mu-part of F", 192, 1e-20),
    numeric("phat-lowering-corrected", "lowering operator of P_omega-hat against finite differences", 128, 1e-6),
    numeric("f2-weight-half", "f2 transforms with chi2 on Gamma for c > 0", 128, 1e-15),
];

pub fn registry() -> &'static [IdentityInfo] {
    &REGISTRY
}

pub fn lookup(id: &str) -> Result<&'static IdentityInfo> {
    REGISTRY.iter().find(|i| i.id == id).ok_or_else(|| Error::UnknownIdentity(id.to_string()))
}

struct Outcome {
    residual: Option<f64>,
    witness: Option<Witness>,
    message: Option<String>,
    passed: bool,
}

impl Outcome {
    fn exact(r: std::result::Result<i64, Mismatch>) -> Outcome {
        match r {
            Ok(_) => Outcome { residual: Some(0.0), witness: None, message: None, passed: true },
            Err(m) => Outcome { residual: None, witness: Some(m.into()), message: None, passed: false },
        }
    }

    fn all_exact(rs: Vec<(String, std::result::Result<i64, Mismatch>)>) -> Outcome {
        for (label, r) in rs {
            if let Err(m) = r {
                return Outcome { residual: None, witness: Some(m.into()), message: Some(label), passed: false };
            }
        }
        Outcome { residual: Some(0.0), witness: None, message: None, passed: true }
    }
}

/// Tracks the worst residual over a set of evaluation points.
struct Worst {
    tol: f64,
    residual: f64,
    witness: Option<Witness>,
}

impl Worst {
    fn new(tol: f64) -> Self {
        Worst { tol, residual: 0.0, witness: None }
    }

    fn record(&mut self, location: String, residual: f64, left: &HpComplex, right: &HpComplex) {
        if residual >= self.residual || residual.is_nan() {
            self.residual = residual;
            self.witness = Some(Witness { location, left: fmt_c(left), right: fmt_c(right) });
        }
    }

    fn record_scalar(&mut self, location: String, residual: f64) {
        if residual >= self.residual || residual.is_nan() {
            self.residual = residual;
            self.witness = Some(Witness { location, left: format!("{residual:e}"), right: "0".into() });
        }
    }

    fn finish(self) -> Outcome {
        let passed = self.residual < self.tol;
        Outcome {
            residual: Some(self.residual),
            witness: if passed { None } else { self.witness },
            message: None,
            passed,
        }
    }
}

fn fmt_c(z: &HpComplex) -> String {
    let (re, im) = z.to_decimal(20);
    format!("{re} + {im}i")
}

fn abs_diff(a: &HpComplex, b: &HpComplex) -> f64 {
    (a - b).abs_f64()
}

fn rel_diff(a: &HpComplex, b: &HpComplex) -> f64 {
    let s = a.abs_f64().max(b.abs_f64()).max(f64::MIN_POSITIVE);
    (a - b).abs_f64() / s
}

fn tau_label(t: (f64, f64)) -> String {
    format!("tau={}{:+}i", t.0, t.1)
}

struct Run {
    order: Option<i64>,
    prec: u32,
    taus: Vec<(f64, f64)>,
    tol: Option<f64>,
}

impl Run {
    fn point(&self, t: (f64, f64)) -> Result<UHPoint> {
        UHPoint::from_f64(t.0, t.1, working_prec(self.prec))
    }
}

fn family_check(f: Family, n: i64) -> Result<Outcome> {
    let a = genfun(f, Side::Definition, n)?;
    let b = genfun(f, Side::Alternate, n)?;
    Ok(Outcome::exact(a.agree_to(&b)?))
}

fn check(info: &IdentityInfo, run: &Run) -> Result<Outcome> {
    let n = run.order.unwrap_or(0);
    let prec = run.prec;
    match info.id {
        "spt-andrews" => family_check(Family::Spt, n),
        "spt-omega" => family_check(Family::SptOmega, n),
        "sptbar-omega" => family_check(Family::SptbarOmega, n),
        "sptG2-equiv" => family_check(Family::SptG2, n),
        "pomega-qomega" => family_check(Family::POmega, n),
        "thm-pwz" => {
            let mut rs = vec![("cleared identity".to_string(), pwz_identity_check(n, (-n, n))?)];
            for j in 1..=3 {
                rs.push((format!("coefficient of zeta^{j}"), pwz_coefficient_check(j, n)?));
            }
            Ok(Outcome::all_exact(rs))
        }
        "cor-pwrep" => {
            let def = pbar_omega_series(n, PbarRoute::Definition)?;
            let tri = pbar_omega_series(n, PbarRoute::TripleSum)?;
            let m = n.min(26);
            let ora = pbar_omega_series(m, PbarRoute::Oracle)?;
            let short = pbar_omega_series(m, PbarRoute::Definition)?;
            Ok(Outcome::all_exact(vec![
                ("triple sum".into(), def.agree_to(&tri)?),
                ("enumeration".into(), short.agree_to(&ora)?),
            ]))
        }
        "brz-F" => {
            let zs = [
                (0.21, 0.17, 0.33, 0.41, -0.12, 0.29),
                (-0.31, 0.05, 0.18, -0.22, 0.27, 0.11),
                (0.44, -0.13, -0.19, 0.35, 0.08, -0.31),
                (0.07, 0.26, 0.41, 0.12, -0.36, 0.23),
                (-0.15, -0.2, -0.28, -0.09, 0.31, 0.37),
            ];
            let mut w = Worst::new(run.tol.unwrap_or(0.0));
            let wp = working_prec(prec);
            for (k, z) in zs.iter().enumerate() {
                let t = run.taus[k % run.taus.len()];
                let tau = run.point(t)?;
                let c = |re, im| HpComplex::from_f64(re, im, wp);
                let (z1, z2, z3) = (c(z.0, z.1), c(z.2, z.3), c(z.4, z.5));
                let a = f_cone_numeric(&z1, &z2, &z3, &tau, prec)?;
                let b = f_mu_numeric(&z1, &z2, &z3, &tau, prec)?;
                w.record(format!("{} z={z:?}", tau_label(t)), abs_diff(&a, &b), &a, &b);
            }
            Ok(w.finish())
        }
        "hhat1-zero" => {
            let mut w = Worst::new(run.tol.unwrap_or(0.0));
            for &t in &run.taus {
                let h = hhat1_numeric(&PhatContext::new(&run.point(t)?, prec))?;
                w.record(tau_label(t), h.abs_f64(), &h, &HpComplex::zero(64));
            }
            Ok(w.finish())
        }
        "hhat2-phat" => {
            let mut w = Worst::new(run.tol.unwrap_or(0.0));
            for &t in &run.taus {
                let tau = run.point(t)?;
                let ctx = PhatContext::new(&tau, prec);
                let (_, h2) = hhat12_numeric(&ctx)?;
                let p = crate::indefinite::phat_omega_ctx(&ctx)?;
                let want = (&eta_numeric(&tau, prec)?.powi(3) * &p).mul_i().scale_i64(-4);
                w.record(tau_label(t), rel_diff(&h2, &want), &h2, &want);
            }
            Ok(w.finish())
        }
        "phat-weight1" => {
            let mut w = Worst::new(run.tol.unwrap_or(0.0));
            for m in DEFAULT_MATRICES {
                let g = GroupElement::new(m[0], m[1], m[2], m[3])?;
                let mult = phat_multiplier(&g, prec)?;
                for &t in &run.taus {
                    let r = weight_transform_residual(
                        |x| phat_omega_numeric(x, prec),
                        Rational64::from_integer(1),
                        &mult,
                        &g,
                        &run.point(t)?,
                        prec,
                    )?;
                    w.record_scalar(format!("M={g} {}", tau_label(t)), r);
                }
            }
            Ok(w.finish())
        }
        "phat-holpart" => {
            let at = |v: f64| -> Result<(HpComplex, HpComplex)> {
                let tau = run.point((0.3, v))?;
                Ok((phat_omega_numeric(&tau, prec)?, holomorphic_part_numeric(&tau, n, prec)?))
            };
            let (p4, h4) = at(4.0)?;
            let (p3, h3) = at(3.0)?;
            let r4 = abs_diff(&p4, &h4);
            let r3 = abs_diff(&p3, &h3);
            let decay = r3 / r4;
            let passed = r4 < run.tol.unwrap_or(0.0) && decay > 10.0;
            Ok(Outcome {
                residual: Some(r4),
                witness: (!passed).then(|| Witness { location: "tau=0.3+4i".into(), left: fmt_c(&p4), right: fmt_c(&h4) }),
                message: Some(format!("residual at v=3: {r3:e}; decay factor v 3 -> 4: {decay:.4}")),
                passed,
            })
        }
        "phat-holpart-corrected" => {
            let mut w = Worst::new(run.tol.unwrap_or(0.0));
            for &t in &run.taus {
                let tau = run.point(t)?;
                let a = phat_holomorphic_numeric(&tau, prec)?;
                let b = holomorphic_part_numeric(&tau, n, prec)?;
                w.record(tau_label(t), abs_diff(&a, &b), &a, &b);
            }
            Ok(w.finish())
        }
        "phat-lowering" | "phat-lowering-corrected" => {
            let mut w = Worst::new(run.tol.unwrap_or(0.0));
            for &t in &run.taus {
                let tau = run.point(t)?;
                let l = lowering_fd(|x| phat_omega_numeric(x, prec), &tau, prec)?;
                let want = if info.id == "phat-lowering" {
                    lowering_rhs_numeric(&tau, prec)?
                } else {
                    lowering_rhs_corrected_numeric(&tau, prec)?
                };
                w.record(tau_label(t), abs_diff(&l.value, &want), &l.value, &want);
            }
            Ok(w.finish())
        }
        "f2-shadow" => {
            let mut w = Worst::new(run.tol.unwrap_or(0.0));
            for &t in &run.taus {
                let tau = run.point(t)?;
                let x = xi_fd(|s| f_family_numeric(2, s, prec), Rational64::new(1, 2), &tau, prec)?;
                let want = f2_shadow_expected(&tau, prec)?;
                w.record(format!("xi {}", tau_label(t)), abs_diff(&x.value, &want), &x.value, &want);
                let d = dtaubar_fd(|s| fcal_d1_numeric(s, prec), &tau, prec)?;
                let want = dtaubar_fcal1_expected(&tau, prec)?;
                w.record(format!("dtaubar F'(0) {}", tau_label(t)), abs_diff(&d.value, &want), &d.value, &want);
            }
            Ok(w.finish())
        }
        "f2-weight-half" => {
            let mut w = Worst::new(run.tol.unwrap_or(0.0));
            for m in [[7, 5, 4, 3], [1, 0, 8, 1], [3, -1, 4, -1], [1, 2, 0, 1]] {
                let g = GroupElement::new(m[0], m[1], m[2], m[3])?;
                let mult = chi_multiplier(2, &g, prec)?;
                for &t in &run.taus {
                    let r = weight_transform_residual(
                        |x| f_family_numeric(2, x, prec),
                        Rational64::new(1, 2),
                        &mult,
                        &g,
                        &run.point(t)?,
                        prec,
                    )?;
                    w.record_scalar(format!("M={g} {}", tau_label(t)), r);
                }
            }
            Ok(w.finish())
        }
        "theta-shifts" => {
            let d = DEFAULT_LATTICE;
            let order = n * d;
            let t1 = theta_series_at_torsion(Rational64::new(1, 2), Rational64::new(1, 4), d, order)?;
            let q1 = EtaQuotient::new(&[(2, 2), (4, -1)])
                .with_prefactor(Monomial::q(Cyc8::zeta8(-3), Rational64::new(-1, 8)))
                .series(d, order)?;
            let t2 = theta_series_at_torsion(Rational64::from_integer(1), Rational64::new(1, 2), d, order)?;
            let q2 = EtaQuotient::new(&[(2, 2), (1, -1)])
                .with_prefactor(Monomial::q(Cyc8::from_int(-2), Rational64::new(-1, 2)))
                .series(d, order)?;
            let exact = Outcome::all_exact(vec![
                ("theta(tau/2+1/4)".into(), t1.agree_to(&q1)?),
                ("theta(tau+1/2)".into(), t2.agree_to(&q2)?),
            ]);
            if !exact.passed {
                return Ok(exact);
            }
            let mut w = Worst::new(run.tol.unwrap_or(0.0));
            let prec = prec.max(128);
            for &t in &run.taus {
                let tau = run.point(t)?;
                let z = tau.tau() + &HpComplex::from_rational(Rational64::new(1, 2), working_prec(prec));
                let r = r_numeric(&z, &tau, prec)?;
                let want = tau.q_pow(Rational64::new(3, 8)).mul_i().scale_i64(2);
                w.record(format!("R(tau+1/2) {}", tau_label(t)), abs_diff(&r, &want), &r, &want);
            }
            Ok(w.finish())
        }
        "mu-laws" => {
            use rand::{Rng, SeedableRng};
            let law_tol = run.tol.unwrap_or(2f64.powi(-(prec as i32) + 10));
            let mut rng = rand::rngs::StdRng::seed_from_u64(24);
            let wp = working_prec(prec);
            let mut w = Worst::new(law_tol);
            let ms = [[1, 1, 0, 1], [0, -1, 1, 0], [1, 0, 4, 1], [2, 1, 3, 2], [7, 5, 4, 3]];
            for k in 0..10 {
                let tau = UHPoint::from_f64(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..1.4), wp)?;
                let mut c = || HpComplex::from_f64(rng.gen_range(-0.5..0.5), rng.gen_range(-0.3..0.3), wp);
                let (z1, z2) = (c(), c());
                let shifts = [rng.gen_range(-1..=1), rng.gen_range(-2..=2), rng.gen_range(-1..=1), rng.gen_range(-2..=2)];
                for (label, r) in mu_law_residuals(&z1, &z2, &tau, ms[k % ms.len()], shifts, prec)? {
                    w.record_scalar(format!("point {k}: {label}"), r);
                }
            }
            let laws = w.finish();
            if !laws.passed {
                return Ok(laws);
            }
            let mut h = Worst::new(run.tol.unwrap_or(1e-5));
            let (a, b, d) = (Rational64::new(1, 3), Rational64::new(1, 5), Rational64::new(2, 7));
            for &t in &run.taus {
                let f = |s: &UHPoint| {
                    let z1 = &s.tau().scale_rational(a) + &HpComplex::from_rational(b, s.prec());
                    let z2 = &s.tau().scale_rational(a) + &HpComplex::from_rational(d, s.prec());
                    mu_hat_numeric(&z1, &z2, s, prec)
                };
                let l = laplacian_fd(f, Rational64::new(1, 2), &run.point(t)?, prec)?;
                h.record(format!("laplacian {}", tau_label(t)), l.value.abs_f64(), &l.value, &HpComplex::zero(64));
            }
            let mut out = h.finish();
            out.message = Some(format!("worst law residual {:e}", laws.residual.unwrap_or(0.0)));
            Ok(out)
        }
        "finite-jtp" => {
            let d = DEFAULT_LATTICE;
            let rs = (0..=5)
                .map(|k| Ok((format!("n={k}"), finite_jtp_check(k, d, DEFAULT_ZETA_LATTICE, n * d)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Outcome::all_exact(rs))
        }
        "heine" => {
            let d = DEFAULT_LATTICE;
            let rs = (0..3)
                .map(|j| {
                    let [a, b, c, z] = heine_extraction_params(j);
                    Ok((format!("j={j}"), heine_check(&a, &b, &c, &z, d, n * d)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Outcome::all_exact(rs))
        }
        other => Err(Error::UnknownIdentity(other.to_string())),
    }
}

fn default_taus(id: &str) -> Vec<(f64, f64)> {
    let mut t = DEFAULT_TAUS.to_vec();
    if matches!(id, "brz-F" | "hhat1-zero" | "hhat2-phat") {
        t.extend(EXTRA_TAUS);
    }
    t
}

/// Runs one registered identity. Only an unknown id is an error; failures of
/// the underlying computation are reported with status `error`.
pub fn run_identity(id: &str, overrides: &Overrides) -> Result<VerificationReport> {
    let info = lookup(id)?;
    let order = overrides.order.or(info.order).or(match info.id {
        "phat-holpart" | "phat-holpart-corrected" => Some(120),
        _ => None,
    });
    let prec = overrides.prec.or(info.prec).unwrap_or(128);
    let taus = overrides.taus.clone().unwrap_or_else(|| default_taus(info.id));
    let tol = overrides.tolerance.or(info.tolerance);
    let run = Run { order, prec, taus, tol };
    let params = Params {
        order,
        prec: (info.kind == Kind::Numeric || info.id == "theta-shifts").then_some(prec),
        taus: if info.kind == Kind::Numeric || info.id == "theta-shifts" {
            if info.id == "phat-holpart" {
                vec![[0.3, 4.0], [0.3, 3.0]]
            } else {
                run.taus.iter().map(|t| [t.0, t.1]).collect()
            }
        } else {
            Vec::new()
        },
        matrices: match info.id {
            "phat-weight1" => DEFAULT_MATRICES.iter().map(|m| format!("{},{},{},{}", m[0], m[1], m[2], m[3])).collect(),
            _ => Vec::new(),
        },
    };
    let tolerance = tol;
    let start = Instant::now();
    let outcome = if run.taus.is_empty() && info.kind == Kind::Numeric {
        Err(Error::InvalidArgument("no evaluation points".into()))
    } else {
        check(info, &run)
    };
    let elapsed_ms = start.elapsed().as_millis() as u64;
    let report = match outcome {
        Ok(o) => VerificationReport {
            schema_version: SCHEMA_VERSION,
            id: info.id.to_string(),
            params,
            status: if o.passed { Status::Pass } else { Status::Fail },
            residual: o.residual,
            tolerance,
            witness: o.witness,
            message: o.message,
            elapsed_ms,
        },
        Err(e) => VerificationReport {
            schema_version: SCHEMA_VERSION,
            id: info.id.to_string(),
            params,
            status: Status::Error,
            residual: None,
            tolerance,
            witness: None,
            message: Some(e.to_string()),
            elapsed_ms,
        },
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_stable() {
        let ids: Vec<_> = registry().iter().map(|i| i.id).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), ids.len());
        for id in [
            "spt-andrews", "spt-omega", "sptbar-omega", "sptG2-equiv", "pomega-qomega", "thm-pwz", "cor-pwrep",
            "brz-F", "hhat1-zero", "hhat2-phat", "phat-weight1", "phat-holpart", "phat-lowering", "f2-shadow",
            "theta-shifts", "mu-laws", "finite-jtp", "heine",
        ] {
            assert!(lookup(id).is_ok(), "{id}");
        }
    }

    #[test]
    fn unknown_id() {
        assert!(matches!(run_identity("nonexistent", &Overrides::default()), Err(Error::UnknownIdentity(_))));
    }

    #[test]
    fn exact_report_round_trips() {
        let r = run_identity("pomega-qomega", &Overrides { order: Some(15), ..Default::default() }).unwrap();
        assert_eq!(r.status, Status::Pass);
        let s = serde_json::to_string(&r).unwrap();
        let back: VerificationReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn forced_failure_carries_witness() {
        let o = Overrides { tolerance: Some(0.0), prec: Some(64), taus: Some(vec![(0.1, 1.0)]), ..Default::default() };
        let r = run_identity("brz-F", &o).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.witness.is_some());
    }
}
