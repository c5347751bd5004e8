//! Exact four-quadrant count law for the Mallows point process, its W_q
//! correction factor, and the q-Stirling asymptotic rate.
//!
//! Quadrant layout (unit square, first index = row from the bottom, second
//! index = column from the left): R11 bottom-left, R12 bottom-right, R21
//! top-left, R22 top-right; the q-power couples n12·n21.

use crate::mallows::{inversions, Permutation};
use crate::qcomb::{log_q_factorial, stirling_coefficients};
use crate::special::ln_factorial;
use crate::{Error, Result};
use std::collections::HashMap;

/// Quadrant counts n_ij with the corresponding areas p_ij.
#[derive(Debug, Clone, Copy)]
pub struct QuadrantCounts {
    pub n11: u64,
    pub n12: u64,
    pub n21: u64,
    pub n22: u64,
    pub p11: f64,
    pub p12: f64,
    pub p21: f64,
    pub p22: f64,
}

impl QuadrantCounts {
    pub fn new(counts: [u64; 4], areas: [f64; 4]) -> Result<Self> {
        if areas.iter().any(|&p| !(0.0..1.0).contains(&p) || p <= 0.0) {
            return Err(Error::Domain("areas must lie in (0, 1)".into()));
        }
        let total: f64 = areas.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("areas must sum to 1, got {total}")));
        }
        Ok(Self {
            n11: counts[0],
            n12: counts[1],
            n21: counts[2],
            n22: counts[3],
            p11: areas[0],
            p12: areas[1],
            p21: areas[2],
            p22: areas[3],
        })
    }

    /// Counts with areas induced by a split of the unit square at x = s
    /// (left/right) and y = t (bottom/top).
    pub fn from_split(counts: [u64; 4], s: f64, t: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0 && t > 0.0 && t < 1.0) {
            return Err(Error::Domain("split coordinates must lie in (0, 1)".into()));
        }
        Self::new(
            counts,
            [s * t, (1.0 - s) * t, s * (1.0 - t), (1.0 - s) * (1.0 - t)],
        )
    }

    pub fn total(&self) -> u64 {
        self.n11 + self.n12 + self.n21 + self.n22
    }

    /// Cell counts (n₁₁, n₁₂, n₂₁, n₂₂): first index is the row from the
    /// bottom, second the column from the left.
    pub fn counts(&self) -> [u64; 4] {
        [self.n11, self.n12, self.n21, self.n22]
    }

    /// Cell probabilities/areas in the same order as `counts`.
    pub fn areas(&self) -> [f64; 4] {
        [self.p11, self.p12, self.p21, self.p22]
    }

    /// Cell fractions ν_ij = n_ij/n in the same order as `counts`.
    pub fn fractions(&self) -> [f64; 4] {
        let n = self.total() as f64;
        self.counts().map(|c| c as f64 / n)
    }
}

/// ln {m}! = ln([m]_q!/m!), with the empty-cell convention {0}! = 1.
fn ln_curly_factorial(m: u64, q: f64) -> Result<f64> {
    if m == 0 {
        return Ok(0.0);
    }
    Ok(log_q_factorial(m, q)? - ln_factorial(m))
}

/// ln W_q: the q-correction factor multiplying the multinomial law,
/// q^{n12·n21}·Π_{row/col sums}{·}! / (Π_{cells}{·}!·{n}!).
pub fn w_q_log(counts: &QuadrantCounts, q: f64) -> Result<f64> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::Domain(format!("q must lie in (0, 1], got {q}")));
    }
    let [n11, n12, n21, n22] = counts.counts();
    let mut lnw = (n12 * n21) as f64 * q.ln();
    for m in [n11 + n12, n11 + n21, n12 + n22, n21 + n22] {
        lnw += ln_curly_factorial(m, q)?;
    }
    for m in counts.counts() {
        lnw -= ln_curly_factorial(m, q)?;
    }
    lnw -= ln_curly_factorial(counts.total(), q)?;
    Ok(lnw)
}

/// Log of the exact quadrant-count law: multinomial times W_q. At q = 1 this
/// is the log-multinomial exactly.
pub fn log_prob_exact(counts: &QuadrantCounts, q: f64) -> Result<f64> {
    let mut lp = ln_factorial(counts.total());
    for (c, p) in counts.counts().into_iter().zip(counts.areas()) {
        lp -= ln_factorial(c);
        lp += c as f64 * p.ln();
    }
    Ok(lp + w_q_log(counts, q)?)
}

/// The n → ∞ limit of (1/n)ln W_q at cell fractions ν (all positive,
/// summing to 1) and β = −n·ln q:
/// −βν₁₂ν₂₁ + Σ_{row/col sums s}s·A(βs) − Σ_{cells}ν·A(βν) − A(β).
pub fn asymptotic_rate(nu: [f64; 4], beta: f64) -> Result<f64> {
    if nu.iter().any(|&v| v <= 0.0) {
        return Err(Error::Domain("all cell fractions must be positive".into()));
    }
    if (nu.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::Domain("cell fractions must sum to 1".into()));
    }
    let [v11, v12, v21, v22] = nu;
    let a = |x: f64| stirling_coefficients(beta * x).0;
    let mut rate = -beta * v12 * v21;
    for s in [v11 + v12, v11 + v21, v12 + v22, v21 + v22] {
        rate += s * a(s);
    }
    for v in nu {
        rate -= v * a(v);
    }
    rate -= a(1.0);
    Ok(rate)
}

/// Full exponent Ã of the asymptotic law
/// P ≈ √(2πn)/Π√(2πn_ij)·e^{Ã}:
/// Ã = n·ln n − Σn_ij·ln n_ij + Σn_ij·ln p_ij + n·rate(ν, β).
pub fn a_tilde(counts: &QuadrantCounts, beta: f64) -> Result<f64> {
    let n = counts.total();
    if counts.counts().iter().any(|&c| c == 0) {
        return Err(Error::Domain("all cells must be nonempty".into()));
    }
    let mut at = n as f64 * (n as f64).ln();
    for (c, p) in counts.counts().into_iter().zip(counts.areas()) {
        at -= c as f64 * (c as f64).ln();
        at += c as f64 * p.ln();
    }
    Ok(at + n as f64 * asymptotic_rate(counts.fractions(), beta)?)
}

/// Finite-n residual log_prob_exact − [ln prefactor + Ã] at q = e^{−β/n};
/// tends to 0 as n grows at fixed fractions.
pub fn finite_n_residual(counts: &QuadrantCounts, beta: f64) -> Result<f64> {
    let n = counts.total();
    let q = (-beta / n as f64).exp();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut ln_pref = 0.5 * (two_pi * n as f64).ln();
    for c in counts.counts() {
        ln_pref -= 0.5 * (two_pi * c as f64).ln();
    }
    Ok(log_prob_exact(counts, q)? - ln_pref - a_tilde(counts, beta)?)
}

/// Brute-force law of the quadrant counts for a Mallows permutation of
/// size n ≤ 8 under the canonical embedding y_i = (i−½)/n,
/// x_i = (π(i)−½)/n, split at (s, t). Returns the probability of each
/// attainable count vector (n11, n12, n21, n22).
pub fn brute_force_distribution(
    n: usize,
    s: f64,
    t: f64,
    q: f64,
) -> Result<HashMap<[u64; 4], f64>> {
    if n == 0 || n > 8 {
        return Err(Error::Size("brute force needs 1 <= n <= 8".into()));
    }
    if !(s > 0.0 && s < 1.0 && t > 0.0 && t < 1.0) {
        return Err(Error::Domain("split coordinates must lie in (0, 1)".into()));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::Domain(format!("q must lie in (0, 1], got {q}")));
    }
    let mut out: HashMap<[u64; 4], f64> = HashMap::new();
    let mut z = 0.0;
    let mut vals: Vec<u32> = (1..=n as u32).collect();
    permute_all(&mut vals, 0, &mut |perm| {
        let p = Permutation::new(perm.to_vec()).expect("valid permutation");
        let w = q.powi(inversions(&p) as i32);
        z += w;
        let mut c = [0u64; 4];
        for (i, &pi) in perm.iter().enumerate() {
            let y = (i as f64 + 0.5) / n as f64;
            let x = (pi as f64 - 0.5) / n as f64;
            let idx = match (y < t, x < s) {
                (true, true) => 0,   // bottom-left
                (true, false) => 1,  // bottom-right
                (false, true) => 2,  // top-left
                (false, false) => 3, // top-right
            };
            c[idx] += 1;
        }
        *out.entry(c).or_default() += w;
    });
    for v in out.values_mut() {
        *v /= z;
    }
    Ok(out)
}

fn permute_all<F: FnMut(&[u32])>(v: &mut Vec<u32>, k: usize, f: &mut F) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute_all(v, k + 1, f);
        v.swap(k, i);
    }
}
