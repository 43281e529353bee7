use num_rational::Rational64;
use pomega_core::classical::{eta_numeric, eta_series, theta_numeric, theta_series_at_torsion};
use pomega_core::{Cyc8, HpComplex, Monomial, UHPoint};

const D: i64 = 24;

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

// ϑ(z + λτ + μ) = (−1)^{λ+μ} q^{−λ²/2} e^{−2πiλz} ϑ(z)
#[test]
fn theta_torsion_shifts() {
    let order = 12 * D;
    for (a, b) in [(r(1, 2), r(1, 4)), (r(1, 3), r(0, 1)), (r(0, 1), r(1, 4)), (r(-1, 4), r(1, 2)), (r(1, 6), r(3, 4))] {
        let base = theta_series_at_torsion(a, b, D, order).unwrap();
        for l in -1i64..=1 {
            for m in -1i64..=1 {
                let shifted = theta_series_at_torsion(a + l, b + m, D, order).unwrap();
                let sign = if (l + m).rem_euclid(2) == 1 { -1 } else { 1 };
                let coef = Cyc8::root_of_unity(-b * l).unwrap().scale_int(sign);
                let factor = Monomial::q(coef, r(-l * l, 2) - a * l);
                let want = base.mul_by(&factor).unwrap();
                let agree = shifted.agree_to(&want).unwrap();
                assert!(agree.is_ok(), "a={a} b={b} l={l} m={m}: {agree:?}");
                assert!(agree.unwrap() >= 10 * D);
            }
        }
    }
}

#[test]
fn theta_series_matches_direct_sum() {
    let p = 128;
    let tol = 2f64.powi(-(p as i32) + 8);
    for (u, v) in [(0.1, 0.6), (-0.3, 0.9), (0.45, 1.3)] {
        let tau = UHPoint::from_f64(u, v, p + 64).unwrap();
        for (a, b) in [(r(1, 2), r(1, 4)), (r(1, 3), r(0, 1)), (r(-1, 4), r(1, 2))] {
            let s = theta_series_at_torsion(a, b, D, 60 * D).unwrap().eval(&tau);
            let z = &tau.tau().scale_rational(a) + &HpComplex::from_rational(b, p + 64);
            let t = theta_numeric(&z, &tau, p).unwrap();
            let scale = t.abs_f64().max(1.0);
            assert!((&s - &t).abs_f64() / scale < tol, "tau={u}+{v}i a={a} b={b}");
        }
    }
}

#[test]
fn eta_power_24_is_the_discriminant_series() {
    let p = 128;
    for (u, v) in [(0.0, 1.0), (0.27, 0.8), (-0.4, 1.7)] {
        let tau = UHPoint::from_f64(u, v, p + 64).unwrap();
        let delta = eta_series(D, 50 * D).unwrap().pow(24).unwrap().eval(&tau);
        let eta24 = eta_numeric(&tau, p).unwrap().powi(24);
        let rel = (&delta - &eta24).abs_f64() / eta24.abs_f64();
        assert!(rel < 1e-30, "tau={u}+{v}i: {rel}");
    }
}
