//! q-deformed integers and factorials, and the asymptotic decomposition
//! ln([n]_q!/n!) = n·A(β) + B(β) + R_n(β) at q = exp(−β/n), with the
//! remainder R_n(β) → 0 as n → ∞.

use crate::special::{integrate_adaptive, ln_factorial};
use crate::{Error, Result};

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::Domain(format!("q must lie in (0, 1], got {q}")));
    }
    Ok(())
}

/// The q-integer [n]_q = (1 − qⁿ)/(1 − q), with the continuous extension
/// [n]_1 = n.
///
/// Near q = 1 the direct quotient loses all precision, so for |1−q| < 1e−6
/// the value is computed from the series n − C(n,2)ε + C(n,3)ε², ε = 1−q.
pub fn q_integer(n: u64, q: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    check_q(q)?;
    let nf = n as f64;
    let eps = 1.0 - q;
    if eps.abs() < 1e-6 {
        let c2 = nf * (nf - 1.0) / 2.0;
        let c3 = c2 * (nf - 2.0) / 3.0;
        Ok(nf - c2 * eps + c3 * eps * eps)
    } else {
        Ok((-((n as f64 * q.ln()).exp_m1())) / eps)
    }
}

/// ln [k]_q for q ∈ (0, 1), stable for q arbitrarily close to 1:
/// ln(1 − q^k) − ln(1 − q) with both logs via expm1 in the exponent.
fn ln_q_integer(k: u64, ln_q: f64) -> f64 {
    // ln(1 − e^{k ln q}) − ln(1 − e^{ln q})
    let num = (-((k as f64 * ln_q).exp_m1())).ln();
    let den = (-(ln_q.exp_m1())).ln();
    num - den
}

/// ln [n]_q! = Σ_{k=1..n} ln [k]_q, in log domain (no overflow up to n = 10⁶).
pub fn log_q_factorial(n: u64, q: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    check_q(q)?;
    if q == 1.0 {
        return Ok(ln_factorial(n));
    }
    let ln_q = q.ln();
    Ok((1..=n).map(|k| ln_q_integer(k, ln_q)).sum())
}

/// ln((1 − e^{−t})/t), smooth across t = 0 (value 0 in the limit).
fn ln_one_minus_exp_over(t: f64) -> f64 {
    if t.abs() < 1e-2 {
        // (1−e^{−t})/t = e^{−t/2} sinh(t/2)/(t/2); expand ln(sinh u / u).
        let u2 = t * t / 4.0;
        -t / 2.0 + u2 / 6.0 - u2 * u2 / 180.0 + u2 * u2 * u2 / 2835.0
    } else if t > 0.0 {
        (-(-t).exp_m1()).ln() - t.ln()
    } else {
        ((-t).exp_m1()).ln() - (-t).ln()
    }
}

/// The n-independent coefficients of the decomposition:
/// A(β) = ∫₀¹ ln((1 − e^{−βy})/(βy)) dy and
/// B(β) = β/2 + ½ ln((1 − e^{−β})/β), with (A, B) = (0, 0) at β = 0.
///
/// A is evaluated by adaptive quadrature (absolute error ≤ 1e−10); the
/// removable singularity of the integrand at y = 0 is handled by the series
/// branch of the integrand itself.
pub fn stirling_coefficients(beta: f64) -> (f64, f64) {
    if beta == 0.0 {
        return (0.0, 0.0);
    }
    let a = integrate_adaptive(&|y: f64| ln_one_minus_exp_over(beta * y), 0.0, 1.0, 1e-12);
    let b = beta / 2.0 + 0.5 * ln_one_minus_exp_over(beta);
    (a, b)
}

/// R_n(β) = ln([n]_q!/n!) − n·A(β) − B(β) with q = exp(−β/n), the
/// ln([n]!/n!) part computed by exact summation Σ (ln[k]_q − ln k).
pub fn q_stirling_remainder(n: u64, beta: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    if beta == 0.0 {
        return Ok(0.0);
    }
    let ln_q = -beta / n as f64;
    let exact: f64 = (1..=n)
        .map(|k| ln_q_integer(k, ln_q) - (k as f64).ln())
        .sum();
    let (a, b) = stirling_coefficients(beta);
    Ok(exact - n as f64 * a - b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Reference values from an independent 30-digit quadrature oracle.
    const A_1: f64 = -0.23617977949933016743923019049304;
    const A_HALF: f64 = -0.12153210579784879216155809747965;
    const A_QUARTER: f64 = -0.061632215519755975515806383426531;
    const A_2: f64 = -0.44550792303861443844166846835513;
    const A_NEG1: f64 = 0.26382022050066983256076980950696;
    const B_1: f64 = 0.27066242730645905448917817746634;

    #[test]
    fn q_integer_basic() {
        assert_relative_eq!(q_integer(5, 1.0).unwrap(), 5.0);
        assert_relative_eq!(q_integer(3, 0.5).unwrap(), 1.75, max_relative = 1e-15);
        for &q in &[0.1, 0.5, 0.999, 1.0] {
            assert_relative_eq!(q_integer(1, q).unwrap(), 1.0, max_relative = 1e-14);
        }
        assert!(q_integer(3, 0.0).is_err());
        assert!(q_integer(3, 1.5).is_err());
    }

    #[test]
    fn q_integer_continuous_at_one() {
        // |[n]_{1−ε} − n| ≤ C n² ε for tiny ε.
        for &n in &[2u64, 10, 100] {
            let eps = 1e-9;
            let v = q_integer(n, 1.0 - eps).unwrap();
            assert!((v - n as f64).abs() <= (n * n) as f64 * eps);
        }
    }

    #[test]
    fn log_q_factorial_matches_product() {
        // [3]_{0.5}! = 1 · 1.5 · 1.75 = 2.625
        assert_relative_eq!(
            log_q_factorial(3, 0.5).unwrap(),
            2.625_f64.ln(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            log_q_factorial(10, 1.0).unwrap(),
            ln_factorial(10),
            max_relative = 1e-14
        );
        assert_relative_eq!(log_q_factorial(1, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn log_q_factorial_ratio_is_q_integer() {
        for &q in &[0.2, 0.7, 0.95] {
            for &n in &[2u64, 5, 17] {
                let lhs = log_q_factorial(n, q).unwrap() - log_q_factorial(n - 1, q).unwrap();
                assert_relative_eq!(
                    lhs,
                    q_integer(n, q).unwrap().ln(),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn stirling_coefficients_golden() {
        assert_eq!(stirling_coefficients(0.0), (0.0, 0.0));
        let (a, b) = stirling_coefficients(1.0);
        assert_relative_eq!(a, A_1, epsilon = 1e-10);
        assert_relative_eq!(b, B_1, epsilon = 1e-12);
        // Closed form for B(1) directly.
        assert_relative_eq!(
            b,
            0.5 + 0.5 * (1.0 - (-1.0_f64).exp()).ln(),
            max_relative = 1e-14
        );
        assert_relative_eq!(stirling_coefficients(0.5).0, A_HALF, epsilon = 1e-10);
        assert_relative_eq!(stirling_coefficients(0.25).0, A_QUARTER, epsilon = 1e-10);
        assert_relative_eq!(stirling_coefficients(2.0).0, A_2, epsilon = 1e-10);
        assert_relative_eq!(stirling_coefficients(-1.0).0, A_NEG1, epsilon = 1e-10);
    }

    #[test]
    fn remainder_zero_beta_exact() {
        assert_eq!(q_stirling_remainder(1000, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn remainder_decays() {
        // Oracle-pinned: |R_n(1)| ≈ 3.4835e−4 / (n/100) along the grid.
        let r100 = q_stirling_remainder(100, 1.0).unwrap().abs();
        let r1000 = q_stirling_remainder(1000, 1.0).unwrap().abs();
        let r10000 = q_stirling_remainder(10_000, 1.0).unwrap().abs();
        assert!(r100 > r1000 && r1000 > r10000);
        assert!(r10000 < 1e-3);
        assert_relative_eq!(r100, 3.4835e-4, max_relative = 1e-3);
        assert_relative_eq!(r1000, 3.4835e-5, max_relative = 1e-3);
        assert_relative_eq!(r10000, 3.4835e-6, max_relative = 1e-3);
    }
}
