use pomega_bench::euler_series;
use pomega_core::QSeries;

#[test]
fn euler_fixture_is_the_pentagonal_series() {
    let s = euler_series(8).unwrap();
    assert_eq!(s, QSeries::from_int_coeffs(24, &[1, -1, -1, 0, 0, 1, 0, 1], 8));
}
