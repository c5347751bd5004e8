//! Empirical spectral distributions, exact Kolmogorov distances, and the
//! rotation- and thermostat-compression concentration experiments.

use crate::kacwalk::{coupled_step, haar_sample, kac_step, sample_gaussian_matrix, OrthoMatrix, ThermoParams};
use crate::stream::derive_stream;
use crate::{Error, Result};
use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

/// Dense complex Hermitian matrix, validated at construction.
#[derive(Debug, Clone)]
pub struct HermitianMatrix {
    a: Array2<Complex64>,
}

impl HermitianMatrix {
    pub fn new(a: Array2<Complex64>) -> Result<Self> {
        let n = a.nrows();
        if n != a.ncols() {
            return Err(Error::Size("matrix must be square".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if (a[[i, j]] - a[[j, i]].conj()).norm() > 1e-12 {
                    return Err(Error::Domain("matrix is not Hermitian".into()));
                }
            }
        }
        Ok(Self { a })
    }

    pub fn from_real_symmetric(m: &Array2<f64>) -> Result<Self> {
        Self::new(m.mapv(|x| Complex64::new(x, 0.0)))
    }

    /// Diagonal fixture.
    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut a = Array2::zeros((n, n));
        for (i, &v) in values.iter().enumerate() {
            a[[i, i]] = Complex64::new(v, 0.0);
        }
        Self { a }
    }

    /// GOE-type fixture: symmetrized Gaussian with entry scale 1/√n.
    pub fn goe<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut a = Array2::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let x: f64 = StandardNormal.sample(rng);
                let v = x / (n as f64).sqrt();
                a[[i, j]] = Complex64::new(v, 0.0);
                a[[j, i]] = Complex64::new(v, 0.0);
            }
        }
        Self { a }
    }

    /// Two-atom fixture: half the spectrum at `lo`, half at `hi`.
    pub fn two_atom(n: usize, lo: f64, hi: f64) -> Self {
        let vals: Vec<f64> = (0..n).map(|i| if i < n / 2 { lo } else { hi }).collect();
        Self::diag(&vals)
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn as_array(&self) -> &Array2<Complex64> {
        &self.a
    }
}

/// All eigenvalues of a Hermitian matrix, sorted ascending.
pub fn hermitian_eigenvalues(a: &HermitianMatrix) -> Result<Vec<f64>> {
    let (vals, _) = a
        .a
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Numeric(format!("eigensolver failed: {e}")))?;
    let mut v = vals.to_vec();
    v.sort_by(|x, y| x.total_cmp(y));
    Ok(v)
}

/// Empirical spectral distribution: sorted eigenvalues with CDF evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct Esd {
    eigenvalues: Vec<f64>,
}

impl Esd {
    pub fn new(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(|x, y| x.total_cmp(y));
        Self { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// F(x) = (#eigenvalues ≤ x)/k.
    pub fn cdf(&self, x: f64) -> f64 {
        self.eigenvalues.partition_point(|&v| v <= x) as f64 / self.eigenvalues.len() as f64
    }

    /// Left limit F(x−).
    pub fn cdf_left(&self, x: f64) -> f64 {
        self.eigenvalues.partition_point(|&v| v < x) as f64 / self.eigenvalues.len() as f64
    }
}

/// Exact Kolmogorov sup-distance between two ESDs, evaluated over the union
/// of jump points with both one-sided limits.
pub fn kolmogorov_distance(f: &Esd, g: &Esd) -> f64 {
    let mut sup: f64 = 0.0;
    for &x in f.eigenvalues.iter().chain(&g.eigenvalues) {
        sup = sup.max((f.cdf(x) - g.cdf(x)).abs());
        sup = sup.max((f.cdf_left(x) - g.cdf_left(x)).abs());
    }
    sup
}

/// Exact sup-distance between an ESD and a (continuous or not) reference CDF.
pub fn kolmogorov_distance_to_cdf<F: Fn(f64) -> f64>(f: &Esd, reference: F) -> f64 {
    let mut sup: f64 = 0.0;
    for &x in &f.eigenvalues {
        let r = reference(x);
        sup = sup.max((f.cdf(x) - r).abs());
        sup = sup.max((f.cdf_left(x) - r).abs());
    }
    sup
}

#[derive(Debug, Clone, Serialize)]
pub struct ExceedanceRow {
    pub r: f64,
    pub empirical: f64,
    pub envelope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompressionSummary {
    pub k: usize,
    pub trials: usize,
    pub mean_distance: f64,
    pub max_distance: f64,
    pub distances: Vec<f64>,
    pub exceedance: Vec<ExceedanceRow>,
}

fn compression_eigs(b: &Array2<Complex64>, k: usize) -> Result<Vec<f64>> {
    let a = b.slice(ndarray::s![..k, ..k]).to_owned();
    let (vals, _) = a
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Numeric(format!("eigensolver failed: {e}")))?;
    Ok(vals.to_vec())
}

fn conjugate_real(g: &Array2<Complex64>, r: &OrthoMatrix) -> Array2<Complex64> {
    let rc = r.as_array().mapv(|x| Complex64::new(x, 0.0));
    rc.dot(g).dot(&rc.t())
}

fn summarize(
    k: usize,
    spectra: Vec<Vec<f64>>,
    envelope: impl Fn(f64) -> f64,
) -> CompressionSummary {
    let trials = spectra.len();
    let pooled = Esd::new(spectra.iter().flatten().copied().collect());
    let distances: Vec<f64> = spectra
        .into_iter()
        .map(|eigs| kolmogorov_distance(&Esd::new(eigs), &pooled))
        .collect();
    let mean_distance = distances.iter().sum::<f64>() / trials as f64;
    let max_distance = distances.iter().cloned().fold(0.0, f64::max);
    let base = 1.0 / (k as f64).sqrt();
    let exceedance = (0..=20)
        .map(|j| {
            let r = j as f64 * 0.05;
            let empirical =
                distances.iter().filter(|&&d| d >= base + r).count() as f64 / trials as f64;
            ExceedanceRow {
                r,
                empirical,
                envelope: envelope(r),
            }
        })
        .collect();
    CompressionSummary {
        k,
        trials,
        mean_distance,
        max_distance,
        distances,
        exceedance,
    }
}

/// Rotation-compression experiment: per trial, conjugate G by an SO(n)
/// rotation (a Kac chain run for `burn_in` steps, or an exact Haar sample
/// when `burn_in == 0`), take the top-left k×k block, and record its ESD.
/// The comparator F̄ is the across-trial mean ESD, and exceedance
/// frequencies P(‖F_A − F̄‖ ≥ 1/√k + r) are reported against the envelope
/// 12√k·exp(−r√(k/32)).
pub fn kac_compression_experiment(
    g: &HermitianMatrix,
    k: usize,
    burn_in: usize,
    trials: usize,
    master_seed: u64,
) -> Result<CompressionSummary> {
    let n = g.n();
    if k < 1 || k > n {
        return Err(Error::Size(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    if trials == 0 {
        return Err(Error::Size("trials must be positive".into()));
    }
    let spectra: Result<Vec<Vec<f64>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = derive_stream(master_seed, t as u64);
            let rot = if burn_in == 0 {
                haar_sample(n, &mut rng)
            } else {
                let mut r = OrthoMatrix::identity(n);
                for _ in 0..burn_in {
                    kac_step(&mut r, &mut rng);
                }
                r
            };
            compression_eigs(&conjugate_real(g.as_array(), &rot), k)
        })
        .collect();
    let kf = k as f64;
    Ok(summarize(k, spectra?, move |r| {
        12.0 * kf.sqrt() * (-r * (kf / 32.0).sqrt()).exp()
    }))
}

/// Thermostat-compression experiment: per trial S is the first k columns of
/// an iid N(0, 1/β) matrix and A = S*GS; exceedances are reported against
/// 12√k·exp(−r√(kμ/108)).
pub fn thermostat_compression_experiment(
    g: &HermitianMatrix,
    k: usize,
    params: &ThermoParams,
    trials: usize,
    master_seed: u64,
) -> Result<CompressionSummary> {
    let n = g.n();
    if k < 1 || k > n {
        return Err(Error::Size(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    if trials == 0 {
        return Err(Error::Size("trials must be positive".into()));
    }
    let spectra: Result<Vec<Vec<f64>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = derive_stream(master_seed, t as u64);
            let m = sample_gaussian_matrix(n, params.beta, &mut rng);
            let s = m
                .slice(ndarray::s![.., ..k])
                .mapv(|x| Complex64::new(x, 0.0));
            let a = s
                .t()
                .mapv(|x| x.conj())
                .dot(g.as_array())
                .dot(&s);
            let (vals, _) = a
                .eigh(UPLO::Lower)
                .map_err(|e| Error::Numeric(format!("eigensolver failed: {e}")))?;
            Ok(vals.to_vec())
        })
        .collect();
    let kf = k as f64;
    let mu = params.mu;
    Ok(summarize(k, spectra?, move |r| {
        12.0 * kf.sqrt() * (-r * (kf * mu / 108.0).sqrt()).exp()
    }))
}

/// Maximum Kolmogorov distance between compressions at consecutive Kac
/// steps; each step changes at most two rows/columns of the conjugated
/// matrix, so every value is bounded by 2/k.
pub fn kac_step_sensitivity(
    g: &HermitianMatrix,
    k: usize,
    steps: usize,
    master_seed: u64,
) -> Result<f64> {
    let n = g.n();
    if k < 1 || k > n {
        return Err(Error::Size(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    let mut rng = derive_stream(master_seed, 0);
    let mut rot = haar_sample(n, &mut rng);
    let mut prev = Esd::new(compression_eigs(&conjugate_real(g.as_array(), &rot), k)?);
    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        kac_step(&mut rot, &mut rng);
        let cur = Esd::new(compression_eigs(&conjugate_real(g.as_array(), &rot), k)?);
        worst = worst.max(kolmogorov_distance(&prev, &cur));
        prev = cur;
    }
    Ok(worst)
}

/// Maximum Kolmogorov distance between compressions A = S*GS at consecutive
/// coupled-chain steps (at most 2 rows + 1 column change per step, rank ≤ 3),
/// bounded by 3/k.
pub fn coupled_step_sensitivity(
    g: &HermitianMatrix,
    k: usize,
    params: &ThermoParams,
    steps: usize,
    master_seed: u64,
) -> Result<f64> {
    let n = g.n();
    if k < 1 || k > n {
        return Err(Error::Size(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    let mut rng = derive_stream(master_seed, 0);
    let mut m = sample_gaussian_matrix(n, params.beta, &mut rng);
    let compress = |m: &Array2<f64>| -> Result<Esd> {
        let s = m
            .slice(ndarray::s![.., ..k])
            .mapv(|x| Complex64::new(x, 0.0));
        let a = s.t().mapv(|x| x.conj()).dot(g.as_array()).dot(&s);
        let (vals, _) = a
            .eigh(UPLO::Lower)
            .map_err(|e| Error::Numeric(format!("eigensolver failed: {e}")))?;
        Ok(Esd::new(vals.to_vec()))
    };
    let mut prev = compress(&m)?;
    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        coupled_step(&mut m, params, &mut rng);
        let cur = compress(&m)?;
        worst = worst.max(kolmogorov_distance(&prev, &cur));
        prev = cur;
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eigenvalues_basic() {
        let a = HermitianMatrix::diag(&[3.0, 1.0, 2.0]);
        assert_eq!(hermitian_eigenvalues(&a).unwrap(), vec![1.0, 2.0, 3.0]);
        let mut m = Array2::zeros((2, 2));
        m[[0, 1]] = Complex64::new(1.0, 0.0);
        m[[1, 0]] = Complex64::new(1.0, 0.0);
        let a = HermitianMatrix::new(m).unwrap();
        let e = hermitian_eigenvalues(&a).unwrap();
        assert_relative_eq!(e[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(e[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m: Array2<Complex64> = Array2::zeros((2, 2));
        m[[0, 1]] = Complex64::new(1.0, 0.5);
        m[[1, 0]] = Complex64::new(1.0, 0.5); // should be conj
        assert!(HermitianMatrix::new(m).is_err());
    }

    #[test]
    fn similarity_invariance() {
        let mut rng = derive_stream(40, 0);
        let g = HermitianMatrix::goe(12, &mut rng);
        let u = haar_sample(12, &mut rng);
        let e1 = hermitian_eigenvalues(&g).unwrap();
        let rotated = HermitianMatrix::new(conjugate_real(g.as_array(), &u)).unwrap();
        let e2 = hermitian_eigenvalues(&rotated).unwrap();
        for (a, b) in e1.iter().zip(&e2) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn eigen_residuals_small() {
        let mut rng = derive_stream(41, 0);
        let g = HermitianMatrix::goe(20, &mut rng);
        let (vals, vecs) = g.as_array().eigh(UPLO::Lower).unwrap();
        let norm = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (j, &lam) in vals.iter().enumerate() {
            let v = vecs.column(j).to_owned();
            let av = g.as_array().dot(&v);
            let resid: f64 = av
                .iter()
                .zip(v.iter())
                .map(|(a, b)| (a - b * lam).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(resid <= 1e-8 * norm.max(1.0));
        }
    }

    #[test]
    fn kolmogorov_basics() {
        let f = Esd::new(vec![0.0, 1.0, 2.0]);
        assert_eq!(kolmogorov_distance(&f, &f), 0.0);
        let a = Esd::new(vec![0.0]);
        let b = Esd::new(vec![1.0]);
        assert_eq!(kolmogorov_distance(&a, &b), 1.0);
        // Symmetry and triangle inequality.
        let c = Esd::new(vec![0.5, 1.5]);
        let dab = kolmogorov_distance(&a, &b);
        let dac = kolmogorov_distance(&a, &c);
        let dcb = kolmogorov_distance(&c, &b);
        assert_eq!(dab, kolmogorov_distance(&b, &a));
        assert!(dab <= dac + dcb + 1e-15);
    }

    #[test]
    fn bai_rank_inequality() {
        // Perturbing r diagonal entries changes the ESD by at most r/k.
        let k = 10;
        let base: Vec<f64> = (0..k).map(|i| i as f64).collect();
        for r in 1..=3 {
            let mut pert = base.clone();
            for item in pert.iter_mut().take(r) {
                *item += 100.0;
            }
            let d = kolmogorov_distance(&Esd::new(base.clone()), &Esd::new(pert));
            assert!(d <= r as f64 / k as f64 + 1e-12);
        }
    }

    #[test]
    fn compression_full_size_is_exact() {
        let mut rng = derive_stream(42, 0);
        let g = HermitianMatrix::goe(8, &mut rng);
        // k = n: every trial is a similarity transform, all distances vanish.
        // Each cluster of near-identical atoms still contributes up to
        // 1/k − 1/(k·trials) of Kolmogorov distance against the pooled
        // comparator (the trial's atom sits somewhere inside the pooled
        // cluster of rounded copies), so 1/k is the exactness bound here.
        let s = kac_compression_experiment(&g, 8, 0, 20, 43).unwrap();
        assert!(s.max_distance <= 1.0 / 8.0 + 1e-10, "max {}", s.max_distance);
    }

    #[test]
    fn kac_sensitivity_bound() {
        let mut rng = derive_stream(44, 0);
        let g = HermitianMatrix::goe(16, &mut rng);
        let worst = kac_step_sensitivity(&g, 8, 200, 45).unwrap();
        assert!(worst <= 2.0 / 8.0 + 1e-12, "worst {worst}");
    }

    #[test]
    fn coupled_sensitivity_bound() {
        let mut rng = derive_stream(46, 0);
        let g = HermitianMatrix::goe(16, &mut rng);
        let params = ThermoParams::new(1.0, 1.0, 1.0).unwrap();
        let worst = coupled_step_sensitivity(&g, 8, &params, 200, 47).unwrap();
        assert!(worst <= 3.0 / 8.0 + 1e-12, "worst {worst}");
    }

    #[test]
    fn haar_and_chain_modes_agree() {
        let g = HermitianMatrix::two_atom(24, -1.0, 1.0);
        let haar = kac_compression_experiment(&g, 12, 0, 100, 48).unwrap();
        let chain = kac_compression_experiment(&g, 12, 4_000, 100, 49).unwrap();
        let pooled_h = Esd::new(haar.distances.clone());
        let pooled_c = Esd::new(chain.distances.clone());
        // Distances are small and similar in distribution.
        assert!(kolmogorov_distance(&pooled_h, &pooled_c) < 0.25);
        assert!((haar.mean_distance - chain.mean_distance).abs() < 0.05);
    }
}
