//! Weighted sampler with O(1) point updates and O(log N + B) draws.
//!
//! Leaves are grouped into blocks of [`BLOCK`] entries. Each block keeps an
//! incrementally updated sum; a segment tree over block sums is refreshed
//! lazily before a draw. Internal tree nodes are always recomputed as the sum
//! of their children, so only the block sums can drift. Every incremental
//! update adds at most one rounding of the new block sum, since halving,
//! doubling and zeroing produce exact deltas. A block sum is recomputed from
//! its leaves once the accumulated bound could exceed [`REL_TOL`] of its value.
//!
//! Weights are stored scaled by a power of two so that long runs of halving
//! or doubling never underflow or overflow the total.

use rand::Rng;

use crate::error::{Error, Result};

pub const BLOCK: usize = 64;

/// Relative error allowed on any block sum before it is recomputed exactly.
pub const REL_TOL: f64 = 1e-12;

const RESCALE_HIGH: f64 = 1e180;
const RESCALE_LOW: f64 = 1e-180;

#[derive(Debug, Clone, Copy, Default)]
struct Block {
    sum: f64,
    /// Bound on the rounding error accumulated since the last exact pass.
    err: f64,
}

#[derive(Debug, Clone)]
pub struct WeightedIndex {
    leaves: Vec<f64>,
    blocks: Vec<Block>,
    tree: Vec<f64>,
    cap: usize,
    dirty: Vec<usize>,
    is_dirty: Vec<bool>,
    /// Stored leaf `x` represents weight `x * 2^exponent`.
    exponent: i32,
}

impl WeightedIndex {
    pub fn new(weights: Vec<f64>) -> Self {
        assert!(
            weights.iter().all(|w| *w >= 0.0 && w.is_finite()),
            "weights must be finite and non-negative"
        );
        let nblocks = weights.len().div_ceil(BLOCK).max(1);
        let cap = nblocks.next_power_of_two();
        let mut index = Self {
            leaves: weights,
            blocks: vec![Block::default(); nblocks],
            tree: vec![0.0; 2 * cap],
            cap,
            dirty: Vec::new(),
            is_dirty: vec![false; nblocks],
            exponent: 0,
        };
        index.rebuild();
        index
    }

    pub fn uniform(len: usize) -> Self {
        Self::new(vec![1.0; len])
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    /// Current weight of item `i`.
    pub fn weight(&self, i: usize) -> f64 {
        self.leaves[i] * 2f64.powi(self.exponent)
    }

    /// Weight of item `i` relative to the internal scale. Ratios between
    /// items are exact; use this when only proportions matter.
    pub fn scaled_weight(&self, i: usize) -> f64 {
        self.leaves[i]
    }

    pub fn exponent(&self) -> i32 {
        self.exponent
    }

    #[inline]
    fn write(&mut self, i: usize, stored: f64) {
        let old = self.leaves[i];
        if old == stored {
            return;
        }
        self.leaves[i] = stored;
        let b = i / BLOCK;
        let block = &mut self.blocks[b];
        block.sum += stored - old;
        block.err += block.sum.abs() * f64::EPSILON;
        if !self.is_dirty[b] {
            self.is_dirty[b] = true;
            self.dirty.push(b);
        }
    }

    pub fn set(&mut self, i: usize, weight: f64) {
        assert!(weight >= 0.0 && weight.is_finite(), "invalid weight {weight}");
        let stored = weight * 2f64.powi(-self.exponent);
        self.write(i, stored);
    }

    #[inline]
    pub fn scale(&mut self, i: usize, factor: f64) {
        debug_assert!(factor >= 0.0 && factor.is_finite());
        let stored = self.leaves[i] * factor;
        self.write(i, stored);
    }

    /// Multiply `factor` into every item `start + j` with bit `j` of `mask`
    /// set. Equivalent to calling [`WeightedIndex::scale`] per item; factor
    /// 0.5 or 2.0 keeps every product exact.
    #[inline]
    pub fn scale_masked(&mut self, start: usize, mask: u64, factor: f64) {
        if mask == 0 {
            return;
        }
        let first_len = BLOCK - start % BLOCK;
        if first_len >= 64 {
            self.scale_run(start, mask, factor);
        } else {
            self.scale_run(start, mask & ((1u64 << first_len) - 1), factor);
            self.scale_run(start + first_len, mask >> first_len, factor);
        }
    }

    /// [`WeightedIndex::scale_masked`] for a mask lying inside one block.
    #[inline]
    fn scale_run(&mut self, start: usize, mut mask: u64, factor: f64) {
        if mask == 0 {
            return;
        }
        let mut delta = 0.0;
        let mut magnitude = 0.0;
        while mask != 0 {
            let i = start + mask.trailing_zeros() as usize;
            let old = self.leaves[i];
            let new = old * factor;
            self.leaves[i] = new;
            delta += new - old;
            magnitude += old + new;
            mask &= mask - 1;
        }
        let b = start / BLOCK;
        let block = &mut self.blocks[b];
        block.sum += delta;
        // One rounding per term of the delta plus one for the block sum.
        block.err += (block.sum.abs() + BLOCK as f64 * magnitude) * f64::EPSILON;
        if !self.is_dirty[b] {
            self.is_dirty[b] = true;
            self.dirty.push(b);
        }
    }

    #[inline]
    pub fn zero(&mut self, i: usize) {
        self.write(i, 0.0);
    }

    /// Sum of all weights.
    pub fn total(&mut self) -> f64 {
        self.commit();
        self.tree[1] * 2f64.powi(self.exponent)
    }

    /// Sum of all weights recomputed from scratch; for verification.
    pub fn exact_total(&self) -> f64 {
        self.leaves.iter().sum::<f64>() * 2f64.powi(self.exponent)
    }

    /// Draw index `i` with probability `weight(i) / total`.
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<usize> {
        loop {
            self.commit();
            let total = self.tree[1];
            if !(total > 0.0) {
                return Err(Error::EmptyDistribution);
            }
            let mut u = rng.random::<f64>() * total;
            let mut node = 1;
            while node < self.cap {
                let left = self.tree[2 * node];
                let right = self.tree[2 * node + 1];
                if (u < left && left > 0.0) || right <= 0.0 {
                    node *= 2;
                } else {
                    u -= left;
                    node = 2 * node + 1;
                }
            }
            let b = node - self.cap;
            let start = b * BLOCK;
            let end = (start + BLOCK).min(self.leaves.len());
            let mut acc = 0.0;
            let mut last_positive = None;
            for i in start..end {
                let w = self.leaves[i];
                if w > 0.0 {
                    acc += w;
                    last_positive = Some(i);
                    if u < acc {
                        return Ok(i);
                    }
                }
            }
            if let Some(i) = last_positive {
                // u overshot the block by rounding; the last positive leaf
                // owns the tail of the interval.
                return Ok(i);
            }
            // Block sum was stale residue over all-zero leaves.
            self.refresh_block(b);
            self.update_tree_path(b);
        }
    }

    fn refresh_block(&mut self, b: usize) {
        let start = b * BLOCK;
        let end = (start + BLOCK).min(self.leaves.len());
        let sum: f64 = self.leaves[start..end].iter().sum();
        self.blocks[b] = Block { sum, err: 0.0 };
    }

    fn needs_refresh(block: &Block) -> bool {
        block.err > REL_TOL * block.sum.abs()
    }

    fn update_tree_path(&mut self, b: usize) {
        let mut node = self.cap + b;
        self.tree[node] = self.blocks[b].sum.max(0.0);
        node /= 2;
        while node >= 1 {
            self.tree[node] = self.tree[2 * node] + self.tree[2 * node + 1];
            node /= 2;
        }
    }

    fn rebuild_tree(&mut self) {
        for (b, block) in self.blocks.iter().enumerate() {
            self.tree[self.cap + b] = block.sum.max(0.0);
        }
        for node in (1..self.cap).rev() {
            self.tree[node] = self.tree[2 * node] + self.tree[2 * node + 1];
        }
    }

    fn rebuild(&mut self) {
        for b in 0..self.blocks.len() {
            self.refresh_block(b);
        }
        self.rebuild_tree();
        self.dirty.clear();
        self.is_dirty.iter_mut().for_each(|d| *d = false);
    }

    /// Fold pending updates into the tree.
    pub fn commit(&mut self) {
        if !self.dirty.is_empty() {
            let dirty = std::mem::take(&mut self.dirty);
            for &b in &dirty {
                if Self::needs_refresh(&self.blocks[b]) {
                    self.refresh_block(b);
                }
                self.is_dirty[b] = false;
            }
            let depth = self.cap.trailing_zeros() as usize + 1;
            if dirty.len() * depth > self.blocks.len() {
                self.rebuild_tree();
            } else {
                for &b in &dirty {
                    self.update_tree_path(b);
                }
            }
            self.dirty = dirty;
            self.dirty.clear();
        }
        let total = self.tree[1];
        if total > RESCALE_HIGH || (total > 0.0 && total < RESCALE_LOW) {
            let shift = -(total.log2().floor() as i32);
            let factor = 2f64.powi(shift);
            self.leaves.iter_mut().for_each(|w| *w *= factor);
            self.exponent -= shift;
            self.rebuild();
        }
    }
}
