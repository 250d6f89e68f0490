//! Cumulative-weight tree over integer weights, used for degree-proportional
//! sampling with logarithmic updates.

use rand::Rng;

#[derive(Debug, Clone)]
pub struct Fenwick {
    tree: Vec<u64>,
    total: u64,
    top_bit: usize,
}

impl Fenwick {
    /// Tree over `len` slots (0-based), all weights zero.
    pub fn new(len: usize) -> Self {
        let top_bit = if len == 0 {
            0
        } else {
            1 << (usize::BITS - 1 - len.leading_zeros())
        };
        Fenwick {
            tree: vec![0; len + 1],
            total: 0,
            top_bit,
        }
    }

    pub fn len(&self) -> usize {
        self.tree.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn add(&mut self, idx: usize, delta: u64) {
        self.total += delta;
        let mut i = idx + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    pub fn sub(&mut self, idx: usize, delta: u64) {
        self.total -= delta;
        let mut i = idx + 1;
        while i < self.tree.len() {
            self.tree[i] -= delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum of weights in slots `0..idx`.
    pub fn prefix(&self, idx: usize) -> u64 {
        let mut i = idx;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s
    }

    /// Smallest slot `i` with `prefix(i + 1) > target`. Requires `target < total`.
    pub fn find(&self, mut target: u64) -> usize {
        debug_assert!(target < self.total);
        let mut pos = 0;
        let mut step = self.top_bit;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        pos
    }

    /// Draws a slot with probability proportional to its weight.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.find(rng.random_range(0..self.total))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn find_matches_linear_scan(weights in proptest::collection::vec(0u64..20, 1..64), t in 0u64..10_000) {
            let mut f = Fenwick::new(weights.len());
            for (i, &w) in weights.iter().enumerate() {
                f.add(i, w);
            }
            let total: u64 = weights.iter().sum();
            prop_assume!(total > 0);
            let target = t % total;
            let mut acc = 0;
            let expected = weights.iter().position(|&w| { acc += w; acc > target }).unwrap();
            prop_assert_eq!(f.find(target), expected);
            prop_assert_eq!(f.prefix(weights.len()), total);
        }
    }

    #[test]
    fn sub_undoes_add() {
        let mut f = Fenwick::new(5);
        f.add(3, 4);
        f.add(1, 2);
        f.sub(3, 4);
        assert_eq!(f.total(), 2);
        assert_eq!(f.find(0), 1);
        assert_eq!(f.find(1), 1);
    }
}
