//! Shared numerical utilities: log-domain helpers, stable partial sums of the
//! exponential series, the standard normal CDF, and Gauss–Legendre quadrature.

use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma as statrs_ln_gamma;

/// Natural log of the gamma function.
pub fn ln_gamma(x: f64) -> f64 {
    statrs_ln_gamma(x)
}

/// ln(n!) for integer n ≥ 0.
pub fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Standard normal CDF Φ(x).
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Stable ln(e^a + e^b).
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

/// Stable ln(e^a − e^b), requiring a ≥ b. Returns −∞ when a == b.
pub fn ln_sub_exp(a: f64, b: f64) -> f64 {
    debug_assert!(a >= b, "ln_sub_exp requires a >= b (got {a} < {b})");
    if b == f64::NEG_INFINITY {
        a
    } else {
        a + (-((b - a).exp())).ln_1p()
    }
}

/// ln Σ_{k<n} x^k / k! for x ≥ 0, computed by a streaming log-sum-exp so the
/// result is finite and accurate even when x ≫ 708 (where e^x overflows).
///
/// This is the log of the degree-(n−1) partial sum of the exponential series,
/// equivalently ln(e^x · Q(n, x)) with Q the regularized upper incomplete
/// gamma function; the direct summation avoids Q's underflow for x ≫ n.
pub fn ln_exp_partial_sum(n: u64, x: f64) -> f64 {
    assert!(x >= 0.0 && n >= 1, "need x >= 0, n >= 1");
    if x == 0.0 {
        return 0.0;
    }
    let ln_x = x.ln();
    // Term logs t_k = k ln x − ln k! peak near k ≈ x; single pass with a
    // running maximum keeps everything in range.
    let mut t = 0.0_f64; // t_0
    let mut max = t;
    let mut sum = 1.0_f64; // Σ exp(t_k − max)
    for k in 1..n {
        t += ln_x - (k as f64).ln();
        if t > max {
            sum = sum * (max - t).exp() + 1.0;
            max = t;
        } else {
            sum += (t - max).exp();
        }
    }
    max + sum.ln()
}

/// Gauss–Legendre nodes and weights on [−1, 1], computed by Newton iteration
/// on the Legendre polynomial. Accurate to ~1e−15 for n ≤ 64.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Initial guess (Abramowitz–Stegun 22.16.6).
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by recurrence.
            let (mut p0, mut p1) = (1.0_f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Fixed-order Gauss–Legendre integral of `f` over [a, b].
pub fn integrate_gl<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, order: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for (&x, &w) in nodes.iter().zip(&weights) {
        s += w * f(c + h * x);
    }
    s * h
}

/// Adaptive Gauss–Legendre quadrature: bisects until the G15-vs-G7 estimate
/// difference is below `tol` on every panel.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let coarse = integrate_gl(f, a, b, 7);
        let fine = integrate_gl(f, a, b, 15);
        if (fine - coarse).abs() <= tol || depth >= 40 {
            fine
        } else {
            let m = 0.5 * (a + b);
            recurse(f, a, m, tol / 2.0, depth + 1) + recurse(f, m, b, tol / 2.0, depth + 1)
        }
    }
    recurse(f, a, b, tol, 0)
}
