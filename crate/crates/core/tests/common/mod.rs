#![allow(dead_code)]

use pomega_core::{Cyc8, JacobiSeries, QSeries};
use proptest::prelude::*;

pub const D: i64 = 4;

pub fn cyc8() -> impl Strategy<Value = Cyc8> {
    (prop::array::uniform4(-3i64..=3), 1i64..=3).prop_map(|(c, den)| Cyc8::new(c, den))
}

/// Sparse series on the lattice q^{1/D} with exponents in [lo, lo+span) and order lo+span.
pub fn qseries(lo: i64, span: i64) -> impl Strategy<Value = QSeries> {
    prop::collection::vec((lo..lo + span, cyc8()), 0..8)
        .prop_map(move |terms| QSeries::from_terms(D, terms, lo + span))
}

/// A series whose leading term sits at `lo` with a unit coefficient.
pub fn invertible_qseries(lo: i64, span: i64) -> impl Strategy<Value = QSeries> {
    (qseries(lo + 1, span - 1), 1i64..=3, 0i64..8).prop_map(move |(s, c, k)| {
        let lead = QSeries::from_terms(D, [(lo, Cyc8::from_int(c).mul_zeta8(k))], lo + span);
        lead.add(&s).unwrap()
    })
}

/// Jacobi series with a q⁰ term, ζ exponents in [−3, 3] and a declared window.
pub fn jacobi(span: i64) -> impl Strategy<Value = JacobiSeries> {
    (prop::collection::vec((1..span, -3i64..=3, cyc8()), 0..8), -3i64..=3, 1i64..=3).prop_map(move |(mut terms, z0, c0)| {
        terms.push((0, z0, Cyc8::from_int(c0)));
        JacobiSeries::from_terms(D, 1, terms, span).with_zeta_window(-3, 3).unwrap()
    })
}

pub fn eq(a: &QSeries, b: &QSeries) -> Result<(), String> {
    match a.agree_to(b).map_err(|e| e.to_string())? {
        Ok(_) => Ok(()),
        Err(m) => Err(format!("{m:?}")),
    }
}

/// Random series for the acceptance harness, from a seeded generator.
pub fn random_series(rng: &mut impl rand::Rng, lo: i64, span: i64) -> QSeries {
    let n = rng.gen_range(1..10);
    let terms: Vec<(i64, Cyc8)> = (0..n)
        .map(|_| {
            let c = [0; 4].map(|_| rng.gen_range(-4i64..=4));
            (rng.gen_range(lo..lo + span), Cyc8::new(c, rng.gen_range(1..=4)))
        })
        .collect();
    QSeries::from_terms(D, terms, lo + span)
}
