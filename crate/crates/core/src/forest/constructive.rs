//! Constructive oracle: build every forest from its contraction.
//!
//! Each labeled tree on the `m` units (decoded from its Prüfer sequence) is
//! rooted at `V_1`; a parent-to-child edge is realized by choosing one
//! vertex of the parent set and a nonempty subset of the child set.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::One;

use super::VertexFamily;
use crate::error::{param_err, Result};

/// Edges of the labeled tree on `0..k` with Prüfer sequence `seq`
/// (`seq.len() == k - 2`).
fn prufer_decode(seq: &[usize], k: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; k];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(k - 1);
    for &s in seq {
        let leaf = (0..k)
            .find(|&v| degree[v] == 1)
            .expect("a leaf always exists");
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..k).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Advances `seq` as a base-`k` counter; `false` once it wraps around.
fn next_sequence(seq: &mut [usize], k: usize) -> bool {
    for digit in seq.iter_mut().rev() {
        *digit += 1;
        if *digit < k {
            return true;
        }
        *digit = 0;
    }
    false
}

fn weight(tree: &[(usize, usize)], sizes: &[usize]) -> BigInt {
    let k = sizes.len();
    let mut adj = vec![Vec::new(); k];
    for &(a, b) in tree {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; k];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    let mut product = BigInt::one();
    while let Some(parent) = queue.pop_front() {
        for &child in &adj[parent] {
            if seen[child] {
                continue;
            }
            seen[child] = true;
            let subsets = (BigInt::one() << sizes[child]) - 1;
            product *= sizes[parent] * subsets;
            queue.push_back(child);
        }
    }
    product
}

/// Number of admissible forests on sets without extra vertices.
pub fn oracle_constructive_count(fam: &VertexFamily) -> Result<BigInt> {
    if fam.extras() != 0 {
        return param_err("the constructive count is defined for families without extra vertices");
    }
    let sizes = fam.sizes();
    let k = sizes.len();
    match k {
        1 => Ok(BigInt::one()),
        2 => Ok(weight(&[(0, 1)], sizes)),
        _ => {
            let mut seq = vec![0; k - 2];
            let mut total = BigInt::default();
            loop {
                total += weight(&prufer_decode(&seq, k), sizes);
                if !next_sequence(&mut seq, k) {
                    break;
                }
            }
            Ok(total)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeSet, HashSet};

    fn count(sizes: &[usize]) -> BigInt {
        oracle_constructive_count(&VertexFamily::sets(sizes).unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(count(&[1, 1, 1]), BigInt::from(3));
        assert_eq!(count(&[2, 2]), BigInt::from(6));
        assert_eq!(count(&[1, 2, 3]), BigInt::from(126));
        assert_eq!(count(&[5]), BigInt::one());
    }

    #[test]
    fn prufer_gives_every_tree_once() {
        for k in 3..=6usize {
            let mut seq = vec![0; k - 2];
            let mut trees = HashSet::new();
            loop {
                let edges = prufer_decode(&seq, k);
                assert_eq!(edges.len(), k - 1);
                let tree: BTreeSet<(usize, usize)> = edges
                    .into_iter()
                    .map(|(a, b)| (a.min(b), a.max(b)))
                    .collect();
                assert!(trees.insert(tree));
                if !next_sequence(&mut seq, k) {
                    break;
                }
            }
            assert_eq!(trees.len(), k.pow(k as u32 - 2));
        }
    }

    #[test]
    fn rejects_extras() {
        let fam = VertexFamily::new(vec![1, 1], 1).unwrap();
        assert!(oracle_constructive_count(&fam).is_err());
    }
}
