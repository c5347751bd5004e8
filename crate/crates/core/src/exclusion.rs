//! Asymmetric simple exclusion process (ASEP) on a segment, blocking product
//! measures, and the midpoint-height / walk-LIS fluctuation experiments.

use crate::lis::binary_walk_lis;
use crate::stream::derive_stream;
use crate::{Error, Result};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Binary occupation vector with cached particle count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParticleConfig {
    occupancy: Vec<u8>,
    particle_count: usize,
}

impl ParticleConfig {
    pub fn new(occupancy: Vec<u8>) -> Result<Self> {
        if occupancy.iter().any(|&x| x > 1) {
            return Err(Error::Domain("occupancy entries must be 0 or 1".into()));
        }
        let particle_count = occupancy.iter().map(|&x| x as usize).sum();
        Ok(Self {
            occupancy,
            particle_count,
        })
    }

    /// Balanced configuration (n/2 particles) in exchangeable random order.
    pub fn balanced_shuffled<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n % 2 != 0 {
            return Err(Error::Domain("n must be even".into()));
        }
        let mut occ: Vec<u8> = (0..n).map(|i| (i < n / 2) as u8).collect();
        // Fisher–Yates shuffle.
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            occ.swap(i, j);
        }
        Ok(Self {
            particle_count: n / 2,
            occupancy: occ,
        })
    }

    pub fn len(&self) -> usize {
        self.occupancy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupancy.is_empty()
    }

    pub fn occupancy(&self) -> &[u8] {
        &self.occupancy
    }

    pub fn particle_count(&self) -> usize {
        self.particle_count
    }
}

/// ASEP swap rates. Defaults follow the asymmetric convention
/// (1,0) → (0,1) with probability 1 − q/2 and (0,1) → (1,0) with
/// probability q/2; both are configurable.
#[derive(Debug, Clone, Copy)]
pub struct AsepParams {
    pub q: f64,
    pub swap_up: f64,
    pub swap_down: f64,
}

impl AsepParams {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::Domain(format!("q must lie in (0, 1], got {q}")));
        }
        Ok(Self {
            q,
            swap_up: 1.0 - q / 2.0,
            swap_down: q / 2.0,
        })
    }

    pub fn with_rates(q: f64, swap_up: f64, swap_down: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&swap_up) || !(0.0..=1.0).contains(&swap_down) {
            return Err(Error::Domain("swap probabilities must lie in [0, 1]".into()));
        }
        Ok(Self {
            q,
            swap_up,
            swap_down,
        })
    }
}

/// One discrete ASEP step: a uniform bond i is examined; equal neighbors are
/// left unchanged, a discordant pair swaps with the configured probability.
/// Particle count is conserved.
pub fn asep_step<R: Rng + ?Sized>(config: &mut ParticleConfig, params: &AsepParams, rng: &mut R) {
    let n = config.occupancy.len();
    debug_assert!(n >= 2);
    let i = rng.gen_range(0..n - 1);
    let (a, b) = (config.occupancy[i], config.occupancy[i + 1]);
    if a == b {
        // Still consume one uniform so the step count is draw-homogeneous.
        let _ = rng.gen::<f64>();
        return;
    }
    let p = if (a, b) == (1, 0) {
        params.swap_up
    } else {
        params.swap_down
    };
    if rng.gen::<f64>() < p {
        config.occupancy.swap(i, i + 1);
    }
}

/// Spectral gap λ_n = 1 − Δ⁻¹ cos(π/n) with Δ = (q + q⁻¹)/2.
pub fn asep_spectral_gap(n: usize, q: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain("n must be >= 2".into()));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("q must lie in (0, 1), got {q}")));
    }
    let delta = (q + 1.0 / q) / 2.0;
    Ok(1.0 - (std::f64::consts::PI / n as f64).cos() / delta)
}

/// Small-gap companion approximation c²/(2 n^{2α}) for q = 1 − c/n^α.
pub fn asep_gap_approx(n: usize, c: f64, alpha: f64) -> f64 {
    c * c / (2.0 * (n as f64).powf(2.0 * alpha))
}

/// Height of the walk at the midpoint: H_{n/2} = Σ_{i ≤ n/2} s_i with
/// s_i = +1 when X_i equals `up_value` and −1 otherwise.
pub fn midpoint_height(config: &ParticleConfig, up_value: u8) -> Result<i64> {
    let n = config.occupancy.len();
    if n % 2 != 0 {
        return Err(Error::Domain("midpoint_height needs even n".into()));
    }
    Ok(config.occupancy[..n / 2]
        .iter()
        .map(|&x| if x == up_value { 1i64 } else { -1 })
        .sum())
}

/// Independent-site blocking measure sample: P(X_k = 1) = a·q^k/(a·q^k + 1)
/// with 1-based site index k.
pub fn blocking_product_sample<R: Rng + ?Sized>(
    n: usize,
    a: f64,
    q: f64,
    rng: &mut R,
) -> Result<ParticleConfig> {
    if a <= 0.0 {
        return Err(Error::Domain("a must be positive".into()));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("q must lie in (0, 1), got {q}")));
    }
    let ln_a = a.ln();
    let ln_q = q.ln();
    let occ: Vec<u8> = (1..=n)
        .map(|k| {
            // p = aq^k/(aq^k+1) computed through the logistic of ln(aq^k).
            let t = ln_a + k as f64 * ln_q;
            let p = 1.0 / (1.0 + (-t).exp());
            (rng.gen::<f64>() < p) as u8
        })
        .collect();
    ParticleConfig::new(occ)
}

/// Observable recorded by [`fluctuation_experiment`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Observable {
    Midpoint,
    WalkLis,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExceedanceRow {
    pub r: f64,
    pub empirical: f64,
    pub envelope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FluctuationSummary {
    pub n: usize,
    pub q: f64,
    pub observable: Observable,
    pub trials: usize,
    pub mean: f64,
    pub sd: f64,
    pub exceedance: Vec<ExceedanceRow>,
    pub values: Vec<f64>,
}

/// Runs `trials` independent chains at q = 1 − c/n^α from uniformly shuffled
/// balanced initial configurations, records the observable after `burn_in`
/// steps, and reports empirical exceedance frequencies
/// P(|O − mean| ≥ r) against the concentration envelope
/// 6·exp(−(r/2)·√(c²(n−1)/n^{2α})) (midpoint) or 6·exp(−(r/2)·√(c²/n^{2α}))
/// (walk LIS) on an r-grid.
pub fn fluctuation_experiment(
    n: usize,
    alpha: f64,
    c: f64,
    observable: Observable,
    burn_in: usize,
    trials: usize,
    master_seed: u64,
) -> Result<FluctuationSummary> {
    if trials == 0 {
        return Err(Error::Size("trials must be positive".into()));
    }
    if n % 2 != 0 || n < 2 {
        return Err(Error::Domain("n must be even and >= 2".into()));
    }
    let q = 1.0 - c / (n as f64).powf(alpha);
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!(
            "derived q = {q} outside (0, 1); adjust c, alpha"
        )));
    }
    let params = AsepParams::new(q)?;
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = derive_stream(master_seed, t as u64);
            let mut cfg = ParticleConfig::balanced_shuffled(n, &mut rng).expect("even n");
            for _ in 0..burn_in {
                asep_step(&mut cfg, &params, &mut rng);
            }
            match observable {
                Observable::Midpoint => midpoint_height(&cfg, 1).expect("even n") as f64,
                Observable::WalkLis => binary_walk_lis(cfg.occupancy()) as f64,
            }
        })
        .collect();
    let mean = values.iter().sum::<f64>() / trials as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / trials as f64;
    let sd = var.sqrt();
    let rate = match observable {
        Observable::Midpoint => (c * c * (n as f64 - 1.0) / (n as f64).powf(2.0 * alpha)).sqrt(),
        Observable::WalkLis => (c * c / (n as f64).powf(2.0 * alpha)).sqrt(),
    };
    let exceedance = (1..=12)
        .map(|j| {
            let r = j as f64 * sd.max(1.0) / 2.0;
            let empirical =
                values.iter().filter(|&&v| (v - mean).abs() >= r).count() as f64 / trials as f64;
            ExceedanceRow {
                r,
                empirical,
                envelope: 6.0 * (-(r / 2.0) * rate).exp(),
            }
        })
        .collect();
    Ok(FluctuationSummary {
        n,
        q,
        observable,
        trials,
        mean,
        sd,
        exceedance,
        values,
    })
}

/// Detailed-balance diagnostic: maximum over all configurations of length n
/// and all bonds of |w(x)P(x→y) − w(y)P(y→x)|, where w(X) = q^{inv(X)} and
/// inv counts pairs i < j with X_i = 1, X_j = 0. A rate pair balances these
/// weights iff swap_down = q·swap_up; the default (1 − q/2, q/2) does not.
pub fn detailed_balance_residual(n: usize, q: f64, swap_up: f64, swap_down: f64) -> f64 {
    assert!(n <= 16, "exhaustive diagnostic limited to n <= 16");
    let inv = |mask: u32| -> u32 {
        let mut count = 0;
        for i in 0..n {
            for j in i + 1..n {
                if mask >> i & 1 == 1 && mask >> j & 1 == 0 {
                    count += 1;
                }
            }
        }
        count
    };
    let bond_prob = 1.0 / (n as f64 - 1.0);
    let mut max_res: f64 = 0.0;
    for mask in 0u32..(1 << n) {
        for i in 0..n - 1 {
            let (a, b) = (mask >> i & 1, mask >> (i + 1) & 1);
            if a == b {
                continue;
            }
            let y = mask ^ (1 << i) ^ (1 << (i + 1));
            let (p_xy, p_yx) = if (a, b) == (1, 0) {
                (swap_up, swap_down)
            } else {
                (swap_down, swap_up)
            };
            let res = (q.powi(inv(mask) as i32) * p_xy * bond_prob
                - q.powi(inv(y) as i32) * p_yx * bond_prob)
                .abs();
            max_res = max_res.max(res);
        }
    }
    max_res
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conservation_and_equal_neighbors() {
        let mut rng = derive_stream(1, 0);
        let params = AsepParams::new(0.5).unwrap();
        let mut cfg = ParticleConfig::balanced_shuffled(50, &mut rng).unwrap();
        let count = cfg.particle_count();
        for _ in 0..100_000 {
            asep_step(&mut cfg, &params, &mut rng);
            assert_eq!(cfg.occupancy().iter().map(|&x| x as usize).sum::<usize>(), count);
        }
    }

    #[test]
    fn symmetric_rates_at_q_one() {
        let p = AsepParams::new(1.0).unwrap();
        assert_eq!(p.swap_up, 0.5);
        assert_eq!(p.swap_down, 0.5);
    }

    #[test]
    fn spectral_gap_values() {
        // n = 2, q = 0.5: Δ = 1.25, cos(π/2) = 0 → gap 1.
        assert!((asep_spectral_gap(2, 0.5).unwrap() - 1.0).abs() < 1e-15);
        // q → 1 limit: 1 − cos(π/n).
        let g = asep_spectral_gap(10, 0.999999).unwrap();
        assert!((g - (1.0 - (std::f64::consts::PI / 10.0).cos())).abs() < 1e-5);
        // Small-gap approximation against the exact formula.
        let (n, c, alpha) = (500usize, 1.0, 0.5);
        let q = (-c / (n as f64).powf(alpha)).exp();
        let exact = asep_spectral_gap(n, q).unwrap();
        let approx = asep_gap_approx(n, c, alpha);
        assert!((exact / approx - 1.0).abs() < 0.05, "{exact} vs {approx}");
    }

    #[test]
    fn midpoint_height_basics() {
        let cfg = ParticleConfig::new(vec![1, 0, 1, 0]).unwrap();
        assert_eq!(midpoint_height(&cfg, 1).unwrap(), 0);
        let cfg = ParticleConfig::new(vec![1, 1, 0, 0]).unwrap();
        assert_eq!(midpoint_height(&cfg, 1).unwrap(), 2);
        let odd = ParticleConfig::new(vec![1, 0, 1]).unwrap();
        assert!(midpoint_height(&odd, 1).is_err());
    }

    #[test]
    fn midpoint_changes_by_at_most_two_per_step() {
        // A swap across the midpoint bond moves one ±1 increment in or out of
        // the left half, so H_{n/2} moves by exactly 0 or ±2 per step.
        let mut rng = derive_stream(2, 0);
        let params = AsepParams::new(0.4).unwrap();
        let mut cfg = ParticleConfig::balanced_shuffled(40, &mut rng).unwrap();
        let mut h = midpoint_height(&cfg, 1).unwrap();
        for _ in 0..20_000 {
            asep_step(&mut cfg, &params, &mut rng);
            let h2 = midpoint_height(&cfg, 1).unwrap();
            assert!((h2 - h).abs() <= 2 && (h2 - h) % 2 == 0);
            h = h2;
        }
    }

    #[test]
    fn walk_lis_changes_by_at_most_one_per_step() {
        let mut rng = derive_stream(3, 0);
        let params = AsepParams::new(0.7).unwrap();
        let mut cfg = ParticleConfig::balanced_shuffled(40, &mut rng).unwrap();
        let mut l = binary_walk_lis(cfg.occupancy()) as i64;
        for _ in 0..20_000 {
            asep_step(&mut cfg, &params, &mut rng);
            let l2 = binary_walk_lis(cfg.occupancy()) as i64;
            assert!((l2 - l).abs() <= 1);
            l = l2;
        }
    }

    #[test]
    fn blocking_marginals() {
        let (n, q) = (40usize, 0.9_f64);
        let a = q.powf(-(9.0 * n as f64 / 20.0));
        let mut rng = derive_stream(4, 0);
        let trials = 100_000;
        let mut ones = vec![0u64; n];
        let mut var_accum = 0.0;
        let mut mean_accum = 0.0;
        for _ in 0..trials {
            let cfg = blocking_product_sample(n, a, q, &mut rng).unwrap();
            for (k, &x) in cfg.occupancy().iter().enumerate() {
                ones[k] += x as u64;
            }
            let nx = cfg.particle_count() as f64;
            mean_accum += nx;
            var_accum += nx * nx;
        }
        for k in 0..n {
            let p = a * q.powi(k as i32 + 1) / (a * q.powi(k as i32 + 1) + 1.0);
            let emp = ones[k] as f64 / trials as f64;
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            assert!(
                (emp - p).abs() <= 5.0 * sigma + 1e-9,
                "site {k}: emp {emp} vs p {p}"
            );
        }
        // The interface site k = 9n/20 has P(X=1) = 1/2.
        let kstar = 9 * n / 20;
        let p_star = a * q.powi(kstar as i32) / (a * q.powi(kstar as i32) + 1.0);
        assert!((p_star - 0.5).abs() < 1e-12);
        // Var(N_X) = Σ p(1−p) ≤ n.
        let mean = mean_accum / trials as f64;
        let var = var_accum / trials as f64 - mean * mean;
        assert!(var <= n as f64);
    }

    #[test]
    fn detailed_balance_diagnostic() {
        let q = 0.6;
        // Balancing family: swap_down = q·swap_up.
        let balanced = detailed_balance_residual(6, q, 0.5, q * 0.5);
        assert!(balanced < 1e-14, "residual {balanced}");
        // The literal default is not reversible for these weights.
        let literal = detailed_balance_residual(6, q, 1.0 - q / 2.0, q / 2.0);
        assert!(literal > 1e-3, "residual {literal}");
    }

    #[test]
    fn fluctuation_experiment_smoke() {
        let s = fluctuation_experiment(50, 0.5, 1.0, Observable::WalkLis, 2_000, 64, 7).unwrap();
        assert_eq!(s.values.len(), 64);
        assert!(s.mean > 25.0 && s.mean < 50.0);
        for row in &s.exceedance {
            assert!(row.empirical <= 1.0 && row.envelope > 0.0);
        }
        assert!(fluctuation_experiment(50, 0.5, 1.0, Observable::WalkLis, 10, 0, 7).is_err());
    }
}
