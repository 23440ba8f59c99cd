//! Streaming set partitions with a fixed block count, injective index
//! tuples, and the Stirling numbers that count the former.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{param_err, Result};

/// A partition of `{1..m}` into nonempty blocks, each sorted, ordered by
/// their minimum element. Block 0 always contains `1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetPartition {
    ground: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Builds the partition encoded by a restricted growth string
    /// (`rgs[i]` is the block of element `i + 1`).
    fn from_rgs(rgs: &[usize], block_count: usize) -> Self {
        let mut blocks = vec![Vec::new(); block_count];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i + 1);
        }
        SetPartition {
            ground: rgs.len(),
            blocks,
        }
    }

    pub fn ground_size(&self) -> usize {
        self.ground
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().map(Vec::len)
    }

    /// Bitmask of each block, element `e` mapped to bit `e - 1`.
    pub fn block_masks(&self) -> impl Iterator<Item = u64> + '_ {
        self.blocks
            .iter()
            .map(|b| b.iter().fold(0u64, |acc, &e| acc | 1 << (e - 1)))
    }

    /// Checks the structural invariants: exact cover, nonempty sorted
    /// blocks, ascending block minima.
    pub fn is_well_formed(&self) -> bool {
        let mut seen = vec![false; self.ground + 1];
        let mut prev_min = 0;
        for block in &self.blocks {
            let Some(&first) = block.first() else {
                return false;
            };
            if first <= prev_min || block.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
            prev_min = first;
            for &e in block {
                if e == 0 || e > self.ground || seen[e] {
                    return false;
                }
                seen[e] = true;
            }
        }
        seen[1..].iter().all(|&s| s)
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for block in &self.blocks {
            let items: Vec<String> = block.iter().map(usize::to_string).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        Ok(())
    }
}

/// Lazy iterator over `Π_p({1..m})` in lexicographic restricted-growth-string order.
#[derive(Debug, Clone)]
pub struct Partitions {
    rgs: Vec<usize>,
    blocks: usize,
    done: bool,
}

impl Partitions {
    /// Yields nothing when no partition exists (`p > m`, or `p == 0 < m`);
    /// `(0, 0)` yields the single empty partition.
    pub(crate) fn lenient(m: usize, p: usize) -> Self {
        let feasible = p <= m && (p > 0 || m == 0);
        let rgs = if feasible {
            // Minimal string: zeros, then 1, 2, ..., p - 1 at the tail.
            let zeros = m - p.saturating_sub(1);
            (0..m)
                .map(|i| if i < zeros { 0 } else { i + 1 - zeros })
                .collect()
        } else {
            Vec::new()
        };
        Partitions {
            rgs,
            blocks: p,
            done: !feasible,
        }
    }

    fn advance(&mut self) {
        let m = self.rgs.len();
        let p = self.blocks;
        for i in (1..m).rev() {
            let prefix_max = *self.rgs[..i].iter().max().expect("i >= 1");
            let v = self.rgs[i] + 1;
            if v > prefix_max + 1 || v >= p {
                continue;
            }
            let top = prefix_max.max(v);
            let remaining = m - 1 - i;
            let missing = p - 1 - top;
            if missing > remaining {
                continue;
            }
            self.rgs[i] = v;
            let zeros = remaining - missing;
            for (k, slot) in self.rgs[i + 1..].iter_mut().enumerate() {
                *slot = if k < zeros { 0 } else { top + 1 + (k - zeros) };
            }
            return;
        }
        self.done = true;
    }
}

impl Iterator for Partitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let item = SetPartition::from_rgs(&self.rgs, self.blocks);
        self.advance();
        Some(item)
    }
}

/// Every partition of `{1..m}` into exactly `p` nonempty blocks.
pub fn enumerate_partitions(m: usize, p: usize) -> Result<Partitions> {
    if p < 1 || p > m {
        return param_err(format!("partition needs 1 <= p <= m, got m={m}, p={p}"));
    }
    Ok(Partitions::lenient(m, p))
}

/// Stirling number of the second kind `S(m, p)`.
pub fn stirling2(m: usize, p: usize) -> BigInt {
    if p > m {
        return BigInt::zero();
    }
    // row[k] = S(n, k) for the current n.
    let mut row = vec![BigInt::zero(); p + 1];
    row[0] = BigInt::one();
    for _ in 0..m {
        for k in (1..=p).rev() {
            let carried = std::mem::take(&mut row[k]);
            row[k] = carried * k + &row[k - 1];
        }
        row[0] = BigInt::zero();
    }
    row[p].clone()
}

/// An ordered tuple of pairwise distinct indices from `{1..p}`.
pub type InjectiveTuple = Vec<usize>;

/// Lexicographic iterator over `q`-tuples of distinct entries from `{1..p}`.
#[derive(Debug, Clone)]
pub struct InjectiveTuples {
    current: Vec<usize>,
    range: usize,
    done: bool,
}

impl InjectiveTuples {
    pub(crate) fn lenient(p: usize, q: usize) -> Self {
        InjectiveTuples {
            current: (1..=q).collect(),
            range: p,
            done: q > p,
        }
    }

    fn advance(&mut self) {
        let q = self.current.len();
        for i in (0..q).rev() {
            let used = &self.current[..i];
            let next = (self.current[i] + 1..=self.range).find(|v| !used.contains(v));
            if let Some(v) = next {
                self.current[i] = v;
                let prefix = &self.current[..=i];
                let fill: Vec<usize> = (1..=self.range)
                    .filter(|v| !prefix.contains(v))
                    .take(q - i - 1)
                    .collect();
                self.current.truncate(i + 1);
                self.current.extend(fill);
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for InjectiveTuples {
    type Item = InjectiveTuple;

    fn next(&mut self) -> Option<InjectiveTuple> {
        if self.done {
            return None;
        }
        let item = self.current.clone();
        self.advance();
        Some(item)
    }
}

pub fn enumerate_injective_tuples(p: usize, q: usize) -> Result<InjectiveTuples> {
    if q > p {
        return param_err(format!("injective tuple needs q <= p, got p={p}, q={q}"));
    }
    Ok(InjectiveTuples::lenient(p, q))
}

/// Falling factorial `p (p-1) ... (p-q+1)`.
pub fn falling_factorial(p: usize, q: usize) -> BigInt {
    if q > p {
        return BigInt::zero();
    }
    (p - q + 1..=p).fold(BigInt::one(), |acc, k| acc * k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// Bell numbers from the Bell triangle, independent of `stirling2`.
    fn bell_triangle(n: usize) -> Vec<BigInt> {
        let mut bells = vec![BigInt::one()];
        let mut row = vec![BigInt::one()];
        for _ in 1..=n {
            let mut next = vec![row.last().unwrap().clone()];
            for v in &row {
                let t = next.last().unwrap() + v;
                next.push(t);
            }
            bells.push(next[0].clone());
            row = next;
        }
        bells
    }

    fn render_all(m: usize, p: usize) -> Vec<String> {
        enumerate_partitions(m, p)
            .unwrap()
            .map(|sp| sp.to_string())
            .collect()
    }

    #[test]
    fn three_into_two() {
        let got: HashSet<String> = render_all(3, 2).into_iter().collect();
        let expected: HashSet<String> = ["{1}{2,3}", "{1,3}{2}", "{1,2}{3}"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(got, expected);
        // Lexicographic RGS order: 001, 010, 011.
        assert_eq!(render_all(3, 2), vec!["{1,2}{3}", "{1,3}{2}", "{1}{2,3}"]);
    }

    #[test]
    fn extreme_block_counts() {
        for m in 1..=7 {
            assert_eq!(render_all(m, m).len(), 1);
            let singletons: String = (1..=m).map(|e| format!("{{{e}}}")).collect();
            assert_eq!(render_all(m, m)[0], singletons);
            let one = render_all(m, 1);
            assert_eq!(one.len(), 1);
            let all: Vec<String> = (1..=m).map(|e| e.to_string()).collect();
            assert_eq!(one[0], format!("{{{}}}", all.join(",")));
        }
    }

    #[test]
    fn invalid_ranges_rejected() {
        assert!(enumerate_partitions(3, 0).is_err());
        assert!(enumerate_partitions(3, 4).is_err());
        assert!(enumerate_partitions(0, 0).is_err());
        assert_eq!(Partitions::lenient(3, 4).count(), 0);
        assert_eq!(Partitions::lenient(0, 0).count(), 1);
        assert!(enumerate_injective_tuples(2, 3).is_err());
    }

    #[test]
    fn stirling_values() {
        assert_eq!(stirling2(4, 2), BigInt::from(7));
        assert_eq!(stirling2(9, 9), BigInt::one());
        assert_eq!(stirling2(3, 0), BigInt::zero());
        assert_eq!(stirling2(0, 0), BigInt::one());
        assert_eq!(stirling2(10, 5), BigInt::from(42525));
    }

    #[test]
    fn enumeration_count_matches_stirling() {
        for m in 1..=9 {
            for p in 1..=m {
                let count = enumerate_partitions(m, p).unwrap().count();
                assert_eq!(BigInt::from(count), stirling2(m, p), "m={m} p={p}");
            }
        }
    }

    #[test]
    fn stirling_rows_sum_to_bell() {
        let bells = bell_triangle(20);
        for m in 1..=20 {
            let row: BigInt = (1..=m).map(|p| stirling2(m, p)).sum();
            assert_eq!(row, bells[m], "m={m}");
        }
    }

    #[test]
    fn partitions_well_formed_and_distinct() {
        for m in 1..=7 {
            for p in 1..=m {
                let mut seen = HashSet::new();
                for sp in enumerate_partitions(m, p).unwrap() {
                    assert!(sp.is_well_formed(), "{sp}");
                    assert_eq!(sp.num_blocks(), p);
                    assert!(sp.blocks()[0].contains(&1));
                    assert!(seen.insert(sp.to_string()), "duplicate {sp}");
                }
            }
        }
    }

    #[test]
    fn injective_tuple_examples() {
        assert_eq!(enumerate_injective_tuples(3, 2).unwrap().count(), 6);
        let empty: Vec<_> = enumerate_injective_tuples(4, 0).unwrap().collect();
        assert_eq!(empty, vec![Vec::<usize>::new()]);
        let two: Vec<_> = enumerate_injective_tuples(2, 2).unwrap().collect();
        assert_eq!(two, vec![vec![1, 2], vec![2, 1]]);
    }

    #[test]
    fn injective_tuples_lexicographic_and_complete() {
        for p in 0..=5 {
            for q in 0..=p {
                let all: Vec<_> = enumerate_injective_tuples(p, q).unwrap().collect();
                assert_eq!(BigInt::from(all.len()), falling_factorial(p, q));
                assert!(all.windows(2).all(|w| w[0] < w[1]));
                for t in &all {
                    let distinct: HashSet<_> = t.iter().collect();
                    assert_eq!(distinct.len(), q);
                    assert!(t.iter().all(|&v| (1..=p).contains(&v)));
                }
            }
        }
    }
}
