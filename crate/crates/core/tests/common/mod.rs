//! Shared test oracles, independent of the library's integration paths.

#![allow(dead_code)]

/// Exact eigenvalues of the Bergman operator restricted to B_R: the
/// restricted operator diagonalizes over angular modes with eigenvalues
/// given by regularized incomplete beta values I_x(m+1, α+1) at
/// x = tanh²(R/2). Closed binomial forms for integer α.
pub fn bergman_restricted_eigenvalue(alpha: u32, big_r: f64, m: u32) -> f64 {
    let x = (big_r / 2.0).tanh().powi(2);
    let a = m as f64 + 1.0;
    match alpha {
        0 => x.powf(a),
        1 => (a + 1.0) * x.powf(a) * (1.0 - x) + x.powf(a + 1.0),
        2 => {
            (a + 2.0) * (a + 1.0) / 2.0 * x.powf(a) * (1.0 - x).powi(2)
                + (a + 2.0) * x.powf(a + 1.0) * (1.0 - x)
                + x.powf(a + 2.0)
        }
        _ => panic!("closed form implemented for alpha in 0..=2"),
    }
}

/// Exact number variance of the restricted Bergman process: Σ λ_m(1−λ_m)
/// over the angular eigenvalue sequence. An algebraic route entirely
/// independent of the lunule and double-integral quadratures.
pub fn bergman_variance_exact(alpha: u32, big_r: f64) -> f64 {
    let mut total = 0.0;
    let mut m = 0u32;
    loop {
        let lam = bergman_restricted_eigenvalue(alpha, big_r, m);
        total += lam * (1.0 - lam);
        if lam < 1e-18 && m > 16 {
            return total;
        }
        m += 1;
    }
}

/// Exact expectation of the restricted Bergman process.
pub fn bergman_expectation_exact(alpha: u32, big_r: f64) -> f64 {
    (alpha as f64 + 1.0) * (big_r / 2.0).sinh().powi(2)
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}
