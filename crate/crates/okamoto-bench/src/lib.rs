//! Fixtures shared by the benchmarks.

use num_complex::Complex64;
use okamoto::parabolic::{from_surface_point, ExponentData, PhiConnection, SurfacePoint};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn standard_exponents() -> ExponentData<Complex64> {
    ExponentData::new(
        [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)],
        [c(0.11, 0.0), c(0.12, 0.0), c(0.13, 0.0), c(0.15, 0.0)],
    )
    .expect("distinct poles")
}

pub fn standard_connection() -> PhiConnection<Complex64> {
    from_surface_point(&SurfacePoint::chart(c(0.7, 0.4), c(0.3, -0.2)), &standard_exponents()).expect("chart point")
}
