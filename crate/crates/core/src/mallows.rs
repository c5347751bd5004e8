//! The Mallows measure μ_{n,q}(π) ∝ q^{Inv(π)} on permutations, inversion
//! counting, exact small-n distributions, and the two insertion
//! (Fisher–Yates-style) samplers: uniform and Mallows.

use crate::qcomb::log_q_factorial;
use crate::special::ln_factorial;
use crate::{Error, Result};
use rand::Rng;
use std::collections::HashMap;

/// A permutation of {1..n}, stored as its one-line notation (1-based values).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    mapping: Vec<u32>,
}

impl Permutation {
    /// Validates that `mapping` is a bijection of {1..n}.
    pub fn new(mapping: Vec<u32>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &v in &mapping {
            if v < 1 || v as usize > n || seen[v as usize - 1] {
                return Err(Error::Domain(format!(
                    "not a permutation of 1..{n}: value {v}"
                )));
            }
            seen[v as usize - 1] = true;
        }
        Ok(Self { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mapping: (1..=n as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.mapping
    }

    /// One-line space-separated serialization, e.g. "1 3 4 2".
    pub fn to_one_line(&self) -> String {
        self.mapping
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Number of inversions Inv(π) = #{(i, j) : i < j, π(i) > π(j)}, counted in
/// O(n log n) by merge sort.
pub fn inversions(perm: &Permutation) -> u64 {
    fn merge_count(v: &mut [u32], buf: &mut [u32]) -> u64 {
        let n = v.len();
        if n <= 1 {
            return 0;
        }
        let mid = n / 2;
        let mut inv = {
            let (a, b) = v.split_at_mut(mid);
            merge_count(a, buf) + merge_count(b, buf)
        };
        buf[..n].copy_from_slice(v);
        let (left, right) = buf[..n].split_at(mid);
        let (mut i, mut j) = (0, 0);
        for slot in v.iter_mut() {
            if i < left.len() && (j >= right.len() || left[i] <= right[j]) {
                *slot = left[i];
                i += 1;
            } else {
                *slot = right[j];
                j += 1;
                inv += (left.len() - i) as u64;
            }
        }
        inv
    }
    let mut v = perm.mapping.clone();
    let mut buf = vec![0u32; v.len()];
    merge_count(&mut v, &mut buf)
}

/// ln μ_{n,q}(π) = Inv(π)·ln q − ln [n]_q!; the q = 1 case is −ln(n!).
pub fn mallows_log_pmf(perm: &Permutation, q: f64) -> Result<f64> {
    let n = perm.len() as u64;
    if q == 1.0 {
        return Ok(-ln_factorial(n));
    }
    let lzf = log_q_factorial(n, q)?;
    Ok(inversions(perm) as f64 * q.ln() - lzf)
}

/// Insertion step shared by both samplers: insert value `m` into `list` at
/// 1-based position `k`; `k == list.len() + 1` appends.
fn insert_at(list: &mut Vec<u32>, m: u32, k: usize) {
    if k == list.len() + 1 {
        list.push(m);
    } else {
        list.insert(k - 1, m);
    }
}

/// Uniform sampler by random insertion: for m = 2..n draw k uniform in
/// {1..m}; k = m appends m, otherwise m is inserted at 1-based position k.
pub fn sample_uniform_fy<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    let mut list = Vec::with_capacity(n);
    list.push(1u32);
    for m in 2..=n {
        let k = rng.gen_range(1..=m);
        let pos = if k == m { m } else { k };
        insert_at(&mut list, m as u32, pos);
    }
    Permutation { mapping: list }
}

/// Geometric draw with P(k = t) = (1−q)q^{t−1}, t ≥ 1, by CDF inversion from
/// a single uniform: k = 1 + ⌊ln U / ln q⌋.
fn geometric<R: Rng + ?Sized>(q: f64, rng: &mut R) -> u64 {
    let u = 1.0 - rng.gen::<f64>(); // in (0, 1]
    1 + (u.ln() / q.ln()).floor() as u64
}

/// Mallows sampler: for m = 2..n draw k geometric, fold to
/// j = 1 + ((k−1) mod m); j = 1 appends m, otherwise m is inserted at
/// 1-based position m+1−j. The output is distributed as μ_{n,q}.
pub fn sample_mallows_fy<R: Rng + ?Sized>(n: usize, q: f64, rng: &mut R) -> Result<Permutation> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!(
            "q must lie in (0, 1) for the Mallows sampler, got {q}"
        )));
    }
    let mut list = Vec::with_capacity(n);
    list.push(1u32);
    for m in 2..=n {
        let k = geometric(q, rng);
        let j = 1 + ((k - 1) % m as u64) as usize;
        let pos = if j == 1 { m } else { m + 1 - j };
        insert_at(&mut list, m as u32, pos);
    }
    Ok(Permutation { mapping: list })
}

/// Brute-force law of μ_{n,q} for n ≤ 8: every permutation with its exact
/// probability q^{Inv}/[n]_q!.
pub fn exact_distribution(n: usize, q: f64) -> Result<HashMap<Permutation, f64>> {
    if n > 8 {
        return Err(Error::Size(format!("exact_distribution needs n <= 8, got {n}")));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::Domain(format!("q must lie in (0, 1], got {q}")));
    }
    let lzf = log_q_factorial(n as u64, q)?;
    let mut out = HashMap::new();
    let mut vals: Vec<u32> = (1..=n as u32).collect();
    permute(&mut vals, 0, &mut |perm| {
        let p = Permutation {
            mapping: perm.to_vec(),
        };
        let lp = inversions(&p) as f64 * q.ln() - lzf;
        out.insert(p, lp.exp());
    });
    Ok(out)
}

fn permute<F: FnMut(&[u32])>(v: &mut Vec<u32>, k: usize, f: &mut F) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}
