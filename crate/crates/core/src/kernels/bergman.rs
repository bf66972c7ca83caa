//! Weighted Bergman kernels of the disk in the invariant gauge.
//!
//! The classical weighted Bergman kernel 1/(1 − z·conj(w))^{α+2} reproduces
//! against a non-invariant weighted Lebesgue measure. Multiplying through by
//! sqrt(h(z)h(w)), where h is the density of that measure against the
//! invariant area measure, preserves the point process and yields a kernel
//! whose modulus depends only on the hyperbolic distance:
//!
//!   K(z,w) = ((α+1)/4π)·((1−|z|²)(1−|w|²))^{(α+2)/2} / (1 − z·conj(w))^{α+2}
//!   |K(z,w)| = ((α+1)/4π)·sech^{α+2}(d(z,w)/2)

use num_complex::Complex;

pub fn eval(alpha: f64, z: Complex<f64>, w: Complex<f64>) -> Complex<f64> {
    let koo = (alpha + 1.0) / (4.0 * std::f64::consts::PI);
    let num = ((1.0 - z.norm_sqr()) * (1.0 - w.norm_sqr())).powf((alpha + 2.0) / 2.0);
    let den = (Complex::new(1.0, 0.0) - z * w.conj()).powf(alpha + 2.0);
    koo * num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::disk;

    #[test]
    fn modulus_matches_radial_profile() {
        let alpha = 1.5;
        let koo = (alpha + 1.0) / (4.0 * std::f64::consts::PI);
        let z = Complex::new(0.4, -0.2);
        let w = Complex::new(-0.1, 0.55);
        let d = disk::dist(z, w);
        let expected = koo / (d / 2.0).cosh().powf(alpha + 2.0);
        let got = eval(alpha, z, w).norm();
        assert!((got - expected).abs() < 1e-12 * koo);
    }

    #[test]
    fn diagonal_is_constant() {
        for alpha in [0.0, 1.0, 2.0] {
            let koo = (alpha + 1.0) / (4.0 * std::f64::consts::PI);
            for z in [Complex::new(0.0, 0.0), Complex::new(0.7, 0.1)] {
                let v = eval(alpha, z, z);
                assert!((v.re - koo).abs() < 1e-13 && v.im.abs() < 1e-15);
            }
        }
    }
}
