//! Fixtures shared by the benchmarks.

use pomega_core::classical::eta_series;
use pomega_core::{QSeries, Result, UHPoint};

/// η(τ)/q^{1/24} to O(q^n), the usual dense-ish input for series kernels.
pub fn euler_series(n: i64) -> Result<QSeries> {
    let d = 24;
    let eta = eta_series(d, (n + 1) * d)?;
    Ok(eta.mul_monomial(&pomega_core::Cyc8::one(), -1).truncate(n * d))
}

pub fn sample_tau(prec: u32) -> UHPoint {
    UHPoint::from_f64(0.11, 0.93, prec).expect("in the upper half plane")
}
