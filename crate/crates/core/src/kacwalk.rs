//! Kac's walk on SO(n) (random two-coordinate rotations), the
//! Gaussian-thermostat chain, and their invariant-measure samplers.

use crate::{Error, Result};
use ndarray::{Array2, Axis};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Real orthogonal matrix with drift monitoring.
#[derive(Debug, Clone)]
pub struct OrthoMatrix {
    m: Array2<f64>,
}

impl OrthoMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            m: Array2::eye(n),
        }
    }

    /// Wraps an explicitly orthogonal matrix (‖GᵀG − I‖_max ≤ 1e−8).
    pub fn from_matrix(m: Array2<f64>) -> Result<Self> {
        let g = Self { m };
        if g.ortho_defect() > 1e-8 {
            return Err(Error::Domain("matrix is not orthogonal".into()));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.m
    }

    /// max |GᵀG − I|.
    pub fn ortho_defect(&self) -> f64 {
        let p = self.m.t().dot(&self.m);
        let n = self.n();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p[[i, j]] - target).abs());
            }
        }
        worst
    }

    /// Restores orthonormality by modified Gram–Schmidt on the columns.
    pub fn reorthonormalize(&mut self) {
        let n = self.n();
        for j in 0..n {
            for i in 0..j {
                let dot = self.m.column(i).dot(&self.m.column(j));
                let ci = self.m.column(i).to_owned();
                self.m.column_mut(j).scaled_add(-dot, &ci);
            }
            let norm = self.m.column(j).dot(&self.m.column(j)).sqrt();
            self.m.column_mut(j).mapv_inplace(|x| x / norm);
        }
    }
}

/// Left-multiplies G by the Givens rotation R_ij(θ): rows i and j become
/// (cosθ·row_i + sinθ·row_j, −sinθ·row_i + cosθ·row_j). O(n) work.
/// Indices are 0-based and must satisfy i < j.
pub fn apply_rotation(g: &mut OrthoMatrix, i: usize, j: usize, theta: f64) -> Result<()> {
    if i >= j || j >= g.n() {
        return Err(Error::Domain(format!(
            "need 0 <= i < j < n, got i={i}, j={j}, n={}",
            g.n()
        )));
    }
    rotate_rows(&mut g.m, i, j, theta);
    Ok(())
}

fn rotate_rows(m: &mut Array2<f64>, i: usize, j: usize, theta: f64) {
    let (c, s) = (theta.cos(), theta.sin());
    let (mut top, mut bottom) = m.multi_slice_mut((ndarray::s![i, ..], ndarray::s![j, ..]));
    for (a, b) in top.iter_mut().zip(bottom.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x + s * y;
        *b = -s * x + c * y;
    }
}

/// One step of Kac's walk: uniform pair i < j and uniform angle on (−π, π].
pub fn kac_step<R: Rng + ?Sized>(g: &mut OrthoMatrix, rng: &mut R) {
    let n = g.n();
    debug_assert!(n >= 2);
    let (i, j) = random_pair(n, rng);
    let theta = random_angle(rng);
    rotate_rows(&mut g.m, i, j, theta);
}

fn random_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i.min(j), i.max(j))
}

fn random_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Uniform on (−π, π]: map (0, 1] linearly.
    let u = 1.0 - rng.gen::<f64>();
    std::f64::consts::PI * (2.0 * u - 1.0)
}

/// Spectral gap (n+2)/(2(n−1)n) of Kac's walk on SO(n).
pub fn kac_spectral_gap(n: usize) -> f64 {
    (n as f64 + 2.0) / (2.0 * (n as f64 - 1.0) * n as f64)
}

/// Parameters of the thermostat / coupled chain.
#[derive(Debug, Clone, Copy)]
pub struct ThermoParams {
    /// Inverse variance of the thermostat Gaussians.
    pub beta: f64,
    /// Thermostat interaction rate.
    pub mu: f64,
    /// Kac (internal) interaction rate.
    pub lambda: f64,
}

impl ThermoParams {
    pub fn new(beta: f64, mu: f64, lambda: f64) -> Result<Self> {
        if beta <= 0.0 {
            return Err(Error::Domain("beta must be positive".into()));
        }
        if mu + lambda <= 0.0 || mu < 0.0 || lambda < 0.0 {
            return Err(Error::Domain("need mu, lambda >= 0 and mu + lambda > 0".into()));
        }
        Ok(Self { beta, mu, lambda })
    }
}

/// One thermostat step: a uniform column j, a uniform angle θ, and a fresh
/// Gaussian vector ω ~ N(0, 1/β)ⁿ; every entry of column j is updated as
/// g_ij ← g_ij cosθ + ω_i sinθ. The invariant law has iid N(0, 1/β) entries.
pub fn thermostat_step<R: Rng + ?Sized>(g: &mut Array2<f64>, params: &ThermoParams, rng: &mut R) {
    let n = g.nrows();
    let j = rng.gen_range(0..n);
    let theta = random_angle(rng);
    let (c, s) = (theta.cos(), theta.sin());
    let scale = (1.0 / params.beta).sqrt();
    for i in 0..n {
        let w: f64 = StandardNormal.sample(rng);
        g[[i, j]] = g[[i, j]] * c + scale * w * s;
    }
}

/// One step of the coupled chain: a Kac rotation with probability
/// λ/(λ+μ), otherwise a thermostat step.
pub fn coupled_step<R: Rng + ?Sized>(g: &mut Array2<f64>, params: &ThermoParams, rng: &mut R) {
    let p_kac = params.lambda / (params.lambda + params.mu);
    if rng.gen::<f64>() < p_kac {
        let n = g.nrows();
        let (i, j) = random_pair(n, rng);
        let theta = random_angle(rng);
        rotate_rows(g, i, j, theta);
    } else {
        thermostat_step(g, params, rng);
    }
}

/// Spectral gap μ/(2n) of the pure thermostat chain.
pub fn thermostat_spectral_gap(n: usize, mu: f64) -> f64 {
    mu / (2.0 * n as f64)
}

/// Direct sampler of the thermostat's invariant measure: iid N(0, 1/β).
pub fn sample_gaussian_matrix<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> Array2<f64> {
    let scale = (1.0 / beta).sqrt();
    Array2::from_shape_fn((n, n), |_| {
        let w: f64 = StandardNormal.sample(rng);
        scale * w
    })
}

/// Haar sample on SO(n): Gram–Schmidt orthogonalization of a Gaussian matrix
/// with positive-diagonal sign fix, then a final column flip to force
/// det = +1. Independent of the Kac chain; used as an oracle in experiments.
pub fn haar_sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> OrthoMatrix {
    let mut m = sample_gaussian_matrix(n, 1.0, rng);
    // Modified Gram–Schmidt with R_jj > 0 gives the Haar law on O(n).
    for j in 0..n {
        for i in 0..j {
            let dot = m.column(i).dot(&m.column(j));
            let ci = m.column(i).to_owned();
            m.column_mut(j).scaled_add(-dot, &ci);
        }
        let norm = m.column(j).dot(&m.column(j)).sqrt();
        m.column_mut(j).mapv_inplace(|x| x / norm);
    }
    if determinant_sign(&m) < 0.0 {
        m.index_axis_mut(Axis(1), n - 1).mapv_inplace(|x| -x);
    }
    OrthoMatrix { m }
}

/// Sign of det for an (orthogonal) matrix via Gaussian elimination with
/// partial pivoting.
fn determinant_sign(m: &Array2<f64>) -> f64 {
    let n = m.nrows();
    let mut a = m.clone();
    let mut sign = 1.0;
    for c in 0..n {
        let mut piv = c;
        for r in c + 1..n {
            if a[[r, c]].abs() > a[[piv, c]].abs() {
                piv = r;
            }
        }
        if piv != c {
            for k in 0..n {
                let tmp = a[[c, k]];
                a[[c, k]] = a[[piv, k]];
                a[[piv, k]] = tmp;
            }
            sign = -sign;
        }
        if a[[c, c]] < 0.0 {
            sign = -sign;
        }
        let d = a[[c, c]];
        for r in c + 1..n {
            let f = a[[r, c]] / d;
            for k in c..n {
                a[[r, k]] -= f * a[[c, k]];
            }
        }
    }
    sign
}
