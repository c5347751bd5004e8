//! Ginibre sampling, Monte Carlo mixed matrix moments, and the limiting
//! non-crossing-matching counts with the pinch decomposition.

use crate::stream::derive_stream;
use crate::{Error, Result};
use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use std::collections::HashMap;

/// Signature of a mixed moment (1/n)·E tr[Aᵖ⁽¹⁾(A*)^q(1) ⋯ Aᵖ⁽ᵏ⁾(A*)^q(k)].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentSignature {
    p: Vec<u32>,
    q: Vec<u32>,
}

impl MomentSignature {
    pub fn new(p: Vec<u32>, q: Vec<u32>) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::Size("p and q must have equal length".into()));
        }
        if p.is_empty() || (p.iter().all(|&x| x == 0) && q.iter().all(|&x| x == 0)) {
            return Err(Error::Domain("signature must not be empty or all zero".into()));
        }
        Ok(Self { p, q })
    }

    pub fn sum_p(&self) -> u32 {
        self.p.iter().sum()
    }

    pub fn sum_q(&self) -> u32 {
        self.q.iter().sum()
    }

    /// Total word length R = Σp + Σq.
    pub fn total(&self) -> u32 {
        self.sum_p() + self.sum_q()
    }

    /// Circle spins σ = (+1)^{p(1)}, (−1)^{q(1)}, …, in word order.
    pub fn spins(&self) -> Vec<i8> {
        let mut s = Vec::with_capacity(self.total() as usize);
        for (&pi, &qi) in self.p.iter().zip(&self.q) {
            s.extend(std::iter::repeat(1i8).take(pi as usize));
            s.extend(std::iter::repeat(-1i8).take(qi as usize));
        }
        s
    }
}

/// An n×n matrix of iid complex Gaussians with E|a_jk|² = 1/n:
/// entries (X + iY)/√(2n), X, Y standard normal.
pub fn sample_ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Array2<Complex64> {
    let scale = 1.0 / (2.0 * n as f64).sqrt();
    Array2::from_shape_fn((n, n), |_| {
        let x: f64 = StandardNormal.sample(rng);
        let y: f64 = StandardNormal.sample(rng);
        Complex64::new(x * scale, y * scale)
    })
}

/// Monte Carlo estimate of a mixed moment with per-component standard errors.
#[derive(Debug, Clone, Copy)]
pub struct MomentEstimate {
    pub mean_re: f64,
    pub stderr_re: f64,
    pub mean_im: f64,
    pub stderr_im: f64,
}

fn adjoint(a: &Array2<Complex64>) -> Array2<Complex64> {
    a.t().mapv(|x| x.conj())
}

/// Trace functional (1/n)tr[A^{p1}(A*)^{q1}⋯] for one sample.
fn trace_word(a: &Array2<Complex64>, sig: &MomentSignature) -> Complex64 {
    let n = a.nrows();
    let astar = adjoint(a);
    let mut m = Array2::<Complex64>::eye(n);
    for (&pi, &qi) in sig.p.iter().zip(&sig.q) {
        for _ in 0..pi {
            m = m.dot(a);
        }
        for _ in 0..qi {
            m = m.dot(&astar);
        }
    }
    let tr: Complex64 = (0..n).map(|i| m[[i, i]]).sum();
    tr / n as f64
}

/// Per-trial samples of the trace functional, one per derived stream; the
/// result is ordered by trial index regardless of the worker count.
pub fn mixed_moment_samples(
    n: usize,
    sig: &MomentSignature,
    trials: usize,
    master_seed: u64,
) -> Vec<Complex64> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = derive_stream(master_seed, t as u64);
            let a = sample_ginibre(n, &mut rng);
            trace_word(&a, sig)
        })
        .collect()
}

/// Mixed moment M_n(p;q) estimated over independent Ginibre samples.
pub fn mixed_moment_mc(
    n: usize,
    sig: &MomentSignature,
    trials: usize,
    master_seed: u64,
) -> Result<MomentEstimate> {
    if trials < 2 {
        return Err(Error::Size("need trials >= 2".into()));
    }
    let vals = mixed_moment_samples(n, sig, trials, master_seed);
    let tf = trials as f64;
    let mean: Complex64 = vals.iter().sum::<Complex64>() / tf;
    let var_re = vals.iter().map(|v| (v.re - mean.re).powi(2)).sum::<f64>() / (tf - 1.0);
    let var_im = vals.iter().map(|v| (v.im - mean.im).powi(2)).sum::<f64>() / (tf - 1.0);
    Ok(MomentEstimate {
        mean_re: mean.re,
        stderr_re: (var_re / tf).sqrt(),
        mean_im: mean.im,
        stderr_im: (var_im / tf).sqrt(),
    })
}

/// Counts non-crossing perfect matchings of the interval [l, r) in which
/// every chord joins a +1 to a −1 spin.
fn count_interval(spins: &[i8], l: usize, r: usize, memo: &mut HashMap<(usize, usize), u64>) -> u64 {
    if l == r {
        return 1;
    }
    if (r - l) % 2 == 1 {
        return 0;
    }
    if let Some(&v) = memo.get(&(l, r)) {
        return v;
    }
    let mut total = 0u64;
    // Chord from l to j splits the interval into two independent halves.
    let mut j = l + 1;
    while j < r {
        if spins[j] == -spins[l] {
            total += count_interval(spins, l + 1, j, memo) * count_interval(spins, j + 1, r, memo);
        }
        j += 2;
    }
    memo.insert((l, r), total);
    total
}

/// Limiting mixed moment m(p;q): the number of non-crossing perfect
/// matchings of the spin circle σ_{p,q} whose chords join +1 to −1.
/// Returns 0 whenever Σp ≠ Σq.
pub fn limit_moment_matchings(sig: &MomentSignature) -> Result<u64> {
    let r = sig.total();
    if r > 24 {
        return Err(Error::Size(format!("word length {r} exceeds the R <= 24 guard")));
    }
    if sig.sum_p() != sig.sum_q() {
        return Ok(0);
    }
    let spins = sig.spins();
    let mut memo = HashMap::new();
    Ok(count_interval(&spins, 0, spins.len(), &mut memo))
}

/// Verifies the pinch decomposition: matching the first +1 spin to each
/// admissible −1 splits the circle into two independent sub-problems whose
/// counts multiply; the sum over admissible pinches must reproduce the total.
pub fn pinch_recurrence_check(sig: &MomentSignature) -> Result<bool> {
    let r = sig.total();
    if r > 20 {
        return Err(Error::Size(format!("word length {r} exceeds the R <= 20 guard")));
    }
    let total = limit_moment_matchings(sig)?;
    let spins = sig.spins();
    if spins.is_empty() {
        return Ok(total == 1);
    }
    let mut pinched = 0u64;
    let mut j = 1;
    while j < spins.len() {
        if spins[j] == -spins[0] {
            let mut memo_a = HashMap::new();
            let mut memo_b = HashMap::new();
            pinched += count_interval(&spins, 1, j, &mut memo_a)
                * count_interval(&spins, j + 1, spins.len(), &mut memo_b);
        }
        j += 2;
    }
    Ok(pinched == total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(p: &[u32], q: &[u32]) -> MomentSignature {
        MomentSignature::new(p.to_vec(), q.to_vec()).unwrap()
    }

    fn catalan(n: u32) -> u64 {
        // C_n = (2n)!/(n!(n+1)!)
        let mut c = 1u64;
        for k in 0..n as u64 {
            c = c * (2 * (k + 1)) * (2 * k + 1) / ((k + 1) * (k + 2));
        }
        c
    }

    #[test]
    fn signature_validation() {
        assert!(MomentSignature::new(vec![1], vec![1, 2]).is_err());
        assert!(MomentSignature::new(vec![0], vec![0]).is_err());
        assert!(MomentSignature::new(vec![], vec![]).is_err());
        let s = sig(&[2, 2], &[2, 2]);
        assert_eq!(s.total(), 8);
        assert_eq!(s.spins(), vec![1, 1, -1, -1, 1, 1, -1, -1]);
    }

    #[test]
    fn matching_counts() {
        assert_eq!(limit_moment_matchings(&sig(&[2, 2], &[2, 2])).unwrap(), 3);
        assert_eq!(limit_moment_matchings(&sig(&[1], &[1])).unwrap(), 1);
        assert_eq!(limit_moment_matchings(&sig(&[2], &[1])).unwrap(), 0);
        assert_eq!(limit_moment_matchings(&sig(&[3], &[3])).unwrap(), 1);
        // A A* A A* has the two ladder/rainbow matchings.
        assert_eq!(limit_moment_matchings(&sig(&[1, 1], &[1, 1])).unwrap(), 2);
        // (AA*)^p gives the Catalan number itself (alternating spins).
        for p in 1..=5u32 {
            let s = MomentSignature::new(vec![1; p as usize], vec![1; p as usize]).unwrap();
            assert_eq!(limit_moment_matchings(&s).unwrap(), catalan(p));
        }
        assert!(limit_moment_matchings(&sig(&[13], &[13])).is_err());
    }

    #[test]
    fn catalan_upper_bound() {
        for s in [
            sig(&[2, 2], &[2, 2]),
            sig(&[1, 2, 1], &[2, 1, 1]),
            sig(&[3, 1], &[2, 2]),
        ] {
            let m = limit_moment_matchings(&s).unwrap();
            assert!(m <= catalan(s.total() / 2));
        }
    }

    #[test]
    fn pinch_decomposition_holds() {
        for s in [
            sig(&[2, 2], &[2, 2]),
            sig(&[1], &[1]),
            sig(&[3], &[3]),
            sig(&[1, 1, 1], &[1, 1, 1]),
            sig(&[2, 1], &[1, 2]),
        ] {
            assert!(pinch_recurrence_check(&s).unwrap(), "pinch failed for {s:?}");
        }
    }

    #[test]
    fn sample_entry_statistics() {
        let n = 50;
        let mut rng = derive_stream(7, 0);
        let trials = 40;
        let mut mean = Complex64::new(0.0, 0.0);
        let mut sq = 0.0;
        let mut cross = Complex64::new(0.0, 0.0);
        for _ in 0..trials {
            let a = sample_ginibre(n, &mut rng);
            mean += a.iter().sum::<Complex64>();
            sq += a.iter().map(|v| v.norm_sqr()).sum::<f64>();
            cross += a.iter().map(|v| v * v).sum::<Complex64>();
        }
        let count = (trials * n * n) as f64;
        let sigma = (1.0 / n as f64 / count).sqrt();
        assert!((mean / count).norm() < 4.0 * sigma);
        // E|a|² = 1/n; E[a²] = 0.
        assert!((sq / count - 1.0 / n as f64).abs() < 4.0 * sigma / (n as f64).sqrt() + 1e-3);
        assert!((cross / count).norm() < 4.0 * sigma * 2.0);
    }

    #[test]
    fn moment_identity_signature() {
        // (1/n)E tr(AA*) = 1 exactly; tight MC check.
        let est = mixed_moment_mc(60, &sig(&[1], &[1]), 100, 8).unwrap();
        assert!((est.mean_re - 1.0).abs() <= 4.0 * est.stderr_re.max(1e-6));
        assert!(est.mean_im.abs() <= 4.0 * est.stderr_im.max(1e-6));
    }

    #[test]
    fn moment_alternating_matches_limit() {
        // (1/n)E tr(AA*AA*) → 2.
        let est = mixed_moment_mc(150, &sig(&[1, 1], &[1, 1]), 80, 9).unwrap();
        assert!((est.mean_re - 2.0).abs() <= 4.0 * est.stderr_re + 0.05);
    }

    #[test]
    fn unbalanced_moment_is_zero() {
        let est = mixed_moment_mc(80, &sig(&[2], &[1]), 100, 10).unwrap();
        assert!(est.mean_re.abs() <= 4.0 * est.stderr_re.max(1e-9));
        assert!(est.mean_im.abs() <= 4.0 * est.stderr_im.max(1e-9));
    }
}
