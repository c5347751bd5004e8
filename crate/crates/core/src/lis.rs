//! Patience sorting, longest increasing / non-decreasing subsequence lengths,
//! and witness extraction via back-pointers.

use crate::{Error, Result};

/// Subsequence flavor computed by [`patience_sort`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Strictly increasing subsequences: a card goes on the leftmost pile
    /// whose top is ≥ the card.
    Strict,
    /// Non-decreasing subsequences: a card goes on the leftmost pile whose
    /// top is strictly greater, so equal values chain across piles.
    Lax,
}

/// Final pile configuration plus per-card back-pointers.
#[derive(Debug, Clone)]
pub struct PileState {
    /// Sequence values, in input order.
    values: Vec<f64>,
    /// Piles of card indices into `values`, bottom to top.
    piles: Vec<Vec<usize>>,
    /// For each card, the index of the card that was on top of the pile
    /// immediately to the left when it was placed (None for the first pile).
    back: Vec<Option<usize>>,
}

impl PileState {
    pub fn pile_count(&self) -> usize {
        self.piles.len()
    }

    /// Pile contents as values, bottom to top.
    pub fn pile_values(&self) -> Vec<Vec<f64>> {
        self.piles
            .iter()
            .map(|p| p.iter().map(|&i| self.values[i]).collect())
            .collect()
    }
}

/// Greedy patience sorting: each card is placed on the leftmost admissible
/// pile (binary search over the pile tops), else opens a new rightmost pile.
/// The final pile count equals the longest strictly-increasing (strict mode)
/// or non-decreasing (lax mode) subsequence length of `seq`.
pub fn patience_sort(seq: &[f64], mode: Mode) -> Result<(usize, PileState)> {
    if seq.is_empty() {
        return Err(Error::Size("patience_sort needs a non-empty sequence".into()));
    }
    let mut piles: Vec<Vec<usize>> = Vec::new();
    let mut tops: Vec<f64> = Vec::new();
    let mut back: Vec<Option<usize>> = Vec::with_capacity(seq.len());
    for (i, &card) in seq.iter().enumerate() {
        let j = match mode {
            Mode::Strict => tops.partition_point(|&t| t < card),
            Mode::Lax => tops.partition_point(|&t| t <= card),
        };
        back.push(if j > 0 {
            Some(*piles[j - 1].last().unwrap())
        } else {
            None
        });
        if j == piles.len() {
            piles.push(vec![i]);
            tops.push(card);
        } else {
            piles[j].push(i);
            tops[j] = card;
        }
    }
    let count = piles.len();
    Ok((
        count,
        PileState {
            values: seq.to_vec(),
            piles,
            back,
        },
    ))
}

/// Follows back-pointers from the top card of the last pile; the returned
/// indices form an increasing subsequence of length `pile_count`.
pub fn lis_witness(state: &PileState) -> Vec<usize> {
    let mut out = Vec::with_capacity(state.piles.len());
    let mut cur = state.piles.last().and_then(|p| p.last().copied());
    while let Some(i) = cur {
        out.push(i);
        cur = state.back[i];
    }
    out.reverse();
    out
}

/// Longest non-decreasing subsequence of a 0/1 sequence in O(n):
/// max over the split point t of (#zeros in positions ≤ t) + (#ones after t).
pub fn binary_walk_lis(config: &[u8]) -> usize {
    let total_ones = config.iter().filter(|&&x| x == 1).count();
    let mut best = total_ones; // t = 0
    let mut zeros = 0usize;
    let mut ones_after = total_ones;
    for &x in config {
        if x == 1 {
            ones_after -= 1;
        } else {
            zeros += 1;
        }
        best = best.max(zeros + ones_after);
    }
    best
}
