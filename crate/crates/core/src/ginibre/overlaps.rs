//! Monte Carlo estimation of the eigenvector-overlap densities via full
//! bi-orthogonal eigendecompositions of Ginibre samples.

use crate::ginibre::densities::o2_density_exact;
use crate::ginibre::moments::sample_ginibre;
use crate::stream::derive_stream;
use crate::{Error, Result};
use ndarray::Array2;
use ndarray_linalg::{Eig, Inverse};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Eigenvalues and the two Gram matrices of one sample:
/// `g_psi[k][j] = ⟨ψ_k, ψ_j⟩` for the unit-norm right eigenvectors ψ (columns
/// of V) and `g_phi[j][k] = ⟨φ_j, φ_k⟩` for the left eigenvectors φ (rows of
/// V⁻¹ conjugated), which satisfy φ*_kψ_j = δ_jk.
#[derive(Debug, Clone)]
pub struct OverlapSample {
    pub eigenvalues: Vec<Complex64>,
    pub g_psi: Array2<Complex64>,
    pub g_phi: Array2<Complex64>,
}

/// Full eigendecomposition with bi-orthogonal normalization.
pub fn overlap_data(a: &Array2<Complex64>) -> Result<OverlapSample> {
    let (lam, v) = a
        .eig()
        .map_err(|e| Error::Numeric(format!("eigensolver failed: {e}")))?;
    let w = v
        .inv()
        .map_err(|e| Error::Numeric(format!("eigenvector matrix singular: {e}")))?;
    let vh = v.t().mapv(|x| x.conj());
    let wh = w.t().mapv(|x| x.conj());
    Ok(OverlapSample {
        eigenvalues: lam.to_vec(),
        g_psi: vh.dot(&v),
        g_phi: w.dot(&wh),
    })
}

impl OverlapSample {
    /// Diagonal overlap weights w_k = ‖ψ_k‖²‖φ_k‖² ≥ 1.
    pub fn o1_weights(&self) -> Vec<f64> {
        (0..self.eigenvalues.len())
            .map(|k| self.g_psi[[k, k]].re * self.g_phi[[k, k]].re)
            .collect()
    }
}

/// Exact per-sample identity: (1/n)tr(Aᵖ(A*)ᵖ) reconstructed from the
/// spectral data, Σ_{j,k} λ_jᵖλ̄_kᵖ⟨ψ_k,ψ_j⟩⟨φ_j,φ_k⟩ / n.
pub fn moment_from_overlaps(sample: &OverlapSample, p: u32) -> Complex64 {
    let n = sample.eigenvalues.len();
    let lp: Vec<Complex64> = sample.eigenvalues.iter().map(|l| l.powu(p)).collect();
    let mut s = Complex64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            s += lp[j] * lp[k].conj() * sample.g_psi[[k, j]] * sample.g_phi[[j, k]];
        }
    }
    s / n as f64
}

/// Binned radial estimate with its standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BinEstimate {
    pub r_lo: f64,
    pub r_hi: f64,
    pub mean: f64,
    pub stderr: f64,
}

/// Monte Carlo estimate of the (1/N-normalized) diagonal overlap density
/// 𝒪⁽¹⁾ on radial annuli: per trial, (1/N)Σ_k w_k·1{|λ_k| ∈ bin} divided by
/// the annulus area.
pub fn o1_mc(
    n: usize,
    trials: usize,
    r_edges: &[f64],
    master_seed: u64,
) -> Result<Vec<BinEstimate>> {
    if trials < 100 {
        return Err(Error::Size("need trials >= 100".into()));
    }
    if n > 200 {
        return Err(Error::Size("dense eigenproblem guard: n <= 200".into()));
    }
    if r_edges.len() < 2 || r_edges.windows(2).any(|w| w[1] <= w[0]) || r_edges[0] < 0.0 {
        return Err(Error::Domain("bin edges must be nonnegative and increasing".into()));
    }
    let n_bins = r_edges.len() - 1;
    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = derive_stream(master_seed, t as u64);
            let a = sample_ginibre(n, &mut rng);
            let sample = match overlap_data(&a) {
                Ok(s) => s,
                Err(_) => return vec![f64::NAN; n_bins], // skipped, counted below
            };
            let weights = sample.o1_weights();
            let mut bins = vec![0.0; n_bins];
            for (lam, w) in sample.eigenvalues.iter().zip(&weights) {
                let r = lam.norm();
                if r >= r_edges[0] && r < r_edges[n_bins] {
                    let b = r_edges.partition_point(|&e| e <= r) - 1;
                    bins[b] += w / n as f64;
                }
            }
            bins
        })
        .collect();
    let kept: Vec<&Vec<f64>> = per_trial.iter().filter(|v| !v[0].is_nan()).collect();
    let tf = kept.len() as f64;
    if kept.len() < 2 {
        return Err(Error::Numeric("all trials failed in the eigensolver".into()));
    }
    Ok((0..n_bins)
        .map(|b| {
            let area = PI * (r_edges[b + 1].powi(2) - r_edges[b].powi(2));
            let vals: Vec<f64> = kept.iter().map(|v| v[b] / area).collect();
            let mean = vals.iter().sum::<f64>() / tf;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (tf - 1.0);
            BinEstimate {
                r_lo: r_edges[b],
                r_hi: r_edges[b + 1],
                mean,
                stderr: (var / tf).sqrt(),
            }
        })
        .collect())
}

/// A point-pair estimate of 𝒪⁽²⁾ with its standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PairEstimate {
    pub mean: f64,
    pub stderr: f64,
}

/// Monte Carlo estimate of the off-diagonal overlap density 𝒪⁽²⁾ averaged
/// over square boxes of half-width `half` around each point of every pair:
/// per trial, (1/N)Σ_{j≠k}⟨ψ_k,ψ_j⟩⟨φ_j,φ_k⟩·1{λ_j ∈ box₁, λ_k ∈ box₂},
/// divided by the squared box area.
pub fn o2_mc(
    n: usize,
    trials: usize,
    pairs: &[(Complex64, Complex64)],
    half: f64,
    master_seed: u64,
) -> Result<Vec<PairEstimate>> {
    if trials < 100 {
        return Err(Error::Size("need trials >= 100".into()));
    }
    if n > 200 {
        return Err(Error::Size("dense eigenproblem guard: n <= 200".into()));
    }
    if half <= 0.0 {
        return Err(Error::Domain("box half-width must be positive".into()));
    }
    let in_box = |lam: Complex64, c: Complex64| {
        (lam.re - c.re).abs() < half && (lam.im - c.im).abs() < half
    };
    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = derive_stream(master_seed, t as u64);
            let a = sample_ginibre(n, &mut rng);
            let sample = match overlap_data(&a) {
                Ok(s) => s,
                Err(_) => return vec![f64::NAN; pairs.len()],
            };
            pairs
                .iter()
                .map(|&(c1, c2)| {
                    let mut s = Complex64::new(0.0, 0.0);
                    for j in 0..n {
                        if !in_box(sample.eigenvalues[j], c1) {
                            continue;
                        }
                        for k in 0..n {
                            if j == k || !in_box(sample.eigenvalues[k], c2) {
                                continue;
                            }
                            s += sample.g_psi[[k, j]] * sample.g_phi[[j, k]];
                        }
                    }
                    s.re / n as f64
                })
                .collect()
        })
        .collect();
    let kept: Vec<&Vec<f64>> = per_trial.iter().filter(|v| !v[0].is_nan()).collect();
    let tf = kept.len() as f64;
    if kept.len() < 2 {
        return Err(Error::Numeric("all trials failed in the eigensolver".into()));
    }
    let area = (2.0 * half).powi(2);
    Ok((0..pairs.len())
        .map(|i| {
            let vals: Vec<f64> = kept.iter().map(|v| v[i] / (area * area)).collect();
            let mean = vals.iter().sum::<f64>() / tf;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (tf - 1.0);
            PairEstimate {
                mean,
                stderr: (var / tf).sqrt(),
            }
        })
        .collect())
}

/// Box average of the exact 𝒪⁽²⁾ density over the same boxes the MC
/// estimator integrates, on an m×m×m×m midpoint grid.
pub fn o2_box_average(
    n: u64,
    c1: Complex64,
    c2: Complex64,
    half: f64,
    m: usize,
) -> Result<f64> {
    if m < 1 {
        return Err(Error::Size("grid resolution must be >= 1".into()));
    }
    let offsets: Vec<f64> = (0..m)
        .map(|i| -half + 2.0 * half * (i as f64 + 0.5) / m as f64)
        .collect();
    let mut tot = 0.0;
    for &dx1 in &offsets {
        for &dy1 in &offsets {
            for &dx2 in &offsets {
                for &dy2 in &offsets {
                    tot += o2_density_exact(
                        n,
                        c1 + Complex64::new(dx1, dy1),
                        c2 + Complex64::new(dx2, dy2),
                    )?;
                }
            }
        }
    }
    Ok(tot / (m as f64).powi(4))
}
