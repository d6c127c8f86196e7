//! Stable evaluation of sinc-family quotients.
//!
//! The tip maps and their derivatives are built from sin(x)/x-type ratios
//! that are removable singularities at x = 0. Below |x| = 1e-4 each is
//! evaluated by its Maclaurin series, which is exact to double precision
//! there; above, the direct quotient is accurate.

const SERIES_CUTOFF: f64 = 1e-4;

/// sin(x)/x.
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// (1 - cos(x))/x.
pub(crate) fn versinc(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        x * (0.5 - x2 / 24.0 + x2 * x2 / 720.0)
    } else {
        (1.0 - x.cos()) / x
    }
}

/// d/dx [sin(x)/x] = (cos(x) - sinc(x))/x.
pub(crate) fn dsinc(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        x * (-1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0)
    } else {
        (x.cos() - sinc(x)) / x
    }
}

/// d/dx [(1 - cos(x))/x] = (sin(x) - versinc(x))/x.
pub(crate) fn dversinc(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        0.5 - x2 / 8.0 + x2 * x2 / 144.0
    } else {
        (x.sin() - versinc(x)) / x
    }
}
