//! Both sides of the partition identity
//!
//! ```text
//!   sum over {I_1..I_p} in Π_p({1..m}) of prod_j (sum_{i in I_j} x_i)^(|I_j|-1)
//!     = C(m-1, p-1) (x_1 + ... + x_m)^(m-p)
//! ```
//!
//! as expanded polynomials, plus the two inductive-step identities and the
//! multinomial variant used by the census recombination.
//!
//! Variable `x_i` (1-based) is stored at index `i - 1`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{binomial, MPoly, Monomial, Vars};
use crate::error::{param_err, Result};
use crate::partitions::{enumerate_partitions, InjectiveTuples, Partitions};

/// Largest `m` accepted by the numeric evaluator (subset DP over `2^m` masks).
pub const NUMERIC_MAX_M: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IdentityInstance {
    m: usize,
    p: usize,
}

impl IdentityInstance {
    pub fn new(m: usize, p: usize) -> Result<Self> {
        if p < 1 || p > m {
            return param_err(format!("identity needs 1 <= p <= m, got m={m}, p={p}"));
        }
        Ok(IdentityInstance { m, p })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// All instances `1 <= p <= m <= max_m`, ordered by `(m, p)`.
    pub fn grid(max_m: usize) -> Vec<IdentityInstance> {
        (1..=max_m)
            .flat_map(|m| (1..=m).map(move |p| IdentityInstance { m, p }))
            .collect()
    }
}

/// Outcome of an equality check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Equal,
    Differs(Difference),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Difference {
    /// `lhs - rhs`, nonzero.
    Symbolic(MPoly),
    /// Both sides evaluated at a rational point.
    AtPoint {
        point: Vec<BigRational>,
        lhs: BigRational,
        rhs: BigRational,
    },
}

impl Verdict {
    pub fn compare(lhs: &MPoly, rhs: &MPoly) -> Verdict {
        let diff = lhs - rhs;
        if diff.is_zero() {
            Verdict::Equal
        } else {
            Verdict::Differs(Difference::Symbolic(diff))
        }
    }

    pub fn is_equal(&self) -> bool {
        matches!(self, Verdict::Equal)
    }
}

/// Memoized `(sum_{i in block} x_i)^e`, blocks given as bitmasks over `{1..m}`.
#[derive(Default)]
struct BlockPowers {
    cache: HashMap<(u64, u32), MPoly>,
}

impl BlockPowers {
    fn get(&mut self, mask: u64, exp: u32) -> &MPoly {
        self.cache.entry((mask, exp)).or_insert_with(|| {
            let sum = (0..64)
                .filter(|b| mask >> b & 1 == 1)
                .fold(MPoly::zero(), |acc, b| acc + MPoly::var(b));
            sum.pow(exp)
        })
    }
}

fn full_mask(m: usize) -> u64 {
    if m == 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

/// Sum over `Π_p({1..m})` of `prod_j (sum I_j)^(|I_j| - 1)`, with the power
/// of one distinguished block optionally replaced.
fn partition_sum(
    m: usize,
    p: usize,
    powers: &mut BlockPowers,
    mut term: impl FnMut(&[u64], &mut BlockPowers) -> MPoly,
) -> MPoly {
    let mut total = MPoly::zero();
    for sp in Partitions::lenient(m, p) {
        let masks: Vec<u64> = sp.block_masks().collect();
        total += term(&masks, powers);
    }
    total
}

fn standard_product(masks: &[u64], powers: &mut BlockPowers) -> MPoly {
    masks.iter().fold(MPoly::one(), |acc, &mask| {
        &acc * powers.get(mask, mask.count_ones() - 1)
    })
}

pub fn lhs_eq1(inst: IdentityInstance) -> MPoly {
    let mut powers = BlockPowers::default();
    partition_sum(inst.m, inst.p, &mut powers, standard_product)
}

pub fn rhs_eq1(inst: IdentityInstance) -> MPoly {
    let sum = Vars::indexed(inst.m).sum_all();
    sum.pow((inst.m - inst.p) as u32)
        .scale(&binomial(inst.m as u64 - 1, inst.p as u64 - 1))
}

/// Symbolic check by full expansion.
pub fn verify_eq1(inst: IdentityInstance) -> Verdict {
    Verdict::compare(&lhs_eq1(inst), &rhs_eq1(inst))
}

/// Left side of the `n = 0` inductive identity:
/// partitions into `p - 1` blocks, plus partitions into `p` blocks with one
/// block raised to its full size. Equals `C(m, p-1) (sum x)^(m+1-p)`.
pub fn verify_claim0(m: usize, p: usize) -> Result<Verdict> {
    if m < 1 || p < 2 || p > m + 1 {
        return param_err(format!("claim0 needs 2 <= p <= m+1, got m={m}, p={p}"));
    }
    let mut powers = BlockPowers::default();
    let mut lhs = partition_sum(m, p - 1, &mut powers, standard_product);
    lhs += partition_sum(m, p, &mut powers, |masks, powers| {
        let mut acc = MPoly::zero();
        for l in 0..masks.len() {
            let mut prod = MPoly::one();
            for (j, &mask) in masks.iter().enumerate() {
                let exp = if j == l {
                    mask.count_ones()
                } else {
                    mask.count_ones() - 1
                };
                prod = &prod * powers.get(mask, exp);
            }
            acc += prod;
        }
        acc
    });
    let rhs = Vars::indexed(m)
        .sum_all()
        .pow((m + 1 - p) as u32)
        .scale(&binomial(m as u64, p as u64 - 1));
    Ok(Verdict::compare(&lhs, &rhs))
}

/// The `n >= 1` inductive identity: one block `l` with `|I_l| >= n` carries
/// `C(|I_l|, n) (sum I_l)^(|I_l| - n)`. Equals
/// `C(m, p-1) C(m+1-p, n) (sum x)^(m+1-p-n)`.
pub fn verify_claim(m: usize, p: usize, n: usize) -> Result<Verdict> {
    if p < 1 || p > m || n < 1 || n > m + 1 - p {
        return param_err(format!(
            "claim needs 1 <= p <= m and 1 <= n <= m+1-p, got m={m}, p={p}, n={n}"
        ));
    }
    let mut powers = BlockPowers::default();
    let lhs = partition_sum(m, p, &mut powers, |masks, powers| {
        let mut acc = MPoly::zero();
        for (l, &lmask) in masks.iter().enumerate() {
            let size = lmask.count_ones() as usize;
            if size < n {
                continue;
            }
            let mut prod = powers
                .get(lmask, (size - n) as u32)
                .scale(&binomial(size as u64, n as u64));
            for (j, &mask) in masks.iter().enumerate() {
                if j != l {
                    prod = &prod * powers.get(mask, mask.count_ones() - 1);
                }
            }
            acc += prod;
        }
        acc
    });
    let coeff = binomial(m as u64, p as u64 - 1) * binomial((m + 1 - p) as u64, n as u64);
    let rhs = Vars::indexed(m)
        .sum_all()
        .pow((m + 1 - p - n) as u32)
        .scale(&coeff);
    Ok(Verdict::compare(&lhs, &rhs))
}

/// Sum over block counts `q`, partitions `{J_1..J_q}` of the `m - 1`
/// exponent slots and injective assignments of blocks to the variables
/// `x_1..x_p` of `prod_k x_{j_k}^{|J_k|}`; equals `(x_1 + ... + x_p)^(m-1)`.
pub fn multinomial_variant_lhs(p: usize, m: usize) -> MPoly {
    let slots = m - 1;
    let mut total = MPoly::zero();
    for q in 1..=slots.min(p) {
        for sp in Partitions::lenient(slots, q) {
            let sizes: Vec<u32> = sp.block_sizes().map(|s| s as u32).collect();
            for tuple in InjectiveTuples::lenient(p, q) {
                let mut exps = vec![0u32; p];
                for (k, &j) in tuple.iter().enumerate() {
                    exps[j - 1] += sizes[k];
                }
                total += MPoly::monomial(Monomial::from_exponents(&exps), 1);
            }
        }
    }
    total
}

pub fn verify_multinomial_variant(p: usize, m: usize) -> Result<Verdict> {
    if p < 1 || m < 2 {
        return param_err(format!(
            "multinomial variant needs p >= 1, m >= 2, got p={p}, m={m}"
        ));
    }
    let rhs = Vars::indexed(p).sum_all().pow((m - 1) as u32);
    Ok(Verdict::compare(&multinomial_variant_lhs(p, m), &rhs))
}

/// `count` seeded random rational points in `Q^m`.
pub fn random_points(m: usize, count: usize, seed: u64) -> Vec<Vec<BigRational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (m as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    (0..count)
        .map(|_| {
            (0..m)
                .map(|_| {
                    let num: i64 = rng.gen_range(-12..=12);
                    let den: i64 = rng.gen_range(1..=12);
                    BigRational::new(num.into(), den.into())
                })
                .collect()
        })
        .collect()
}

/// Values of the left side at `point` for every block count: entry `p`
/// holds the sum over `Π_p({1..m})` (entry 0 is unused).
///
/// Organizes the partition sum by peeling off the block that contains the
/// smallest remaining element, over a shared denominator so the inner
/// arithmetic stays integral.
pub fn lhs_eq1_values_at(point: &[BigRational]) -> Vec<BigRational> {
    let m = point.len();
    assert!(
        (1..=NUMERIC_MAX_M).contains(&m),
        "numeric mode supports 1 <= m <= {NUMERIC_MAX_M}"
    );
    let denom = point
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let nums: Vec<BigInt> = point
        .iter()
        .map(|x| x.numer() * (&denom / x.denom()))
        .collect();

    let full = full_mask(m) as usize;
    let size = full + 1;
    // weight[B] = (sum_{i in B} k_i)^(|B| - 1)
    let mut sums = vec![BigInt::zero(); size];
    let mut weight = vec![BigInt::zero(); size];
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = &sums[mask & (mask - 1)] + &nums[low];
        weight[mask] = num_traits::pow(sums[mask].clone(), mask.count_ones() as usize - 1);
    }

    // table[S][k] = sum over partitions of S into k blocks.
    let mut table: Vec<Vec<BigInt>> = vec![Vec::new(); size];
    table[0] = vec![BigInt::one()];
    for set in 1..size {
        // Only sets avoiding element 0, and the full set, are ever reached.
        if set & 1 == 1 && set != full {
            continue;
        }
        let blocks_max = set.count_ones() as usize;
        let mut row = vec![BigInt::zero(); blocks_max + 1];
        let low = set & set.wrapping_neg();
        let rest = set ^ low;
        let mut sub = rest;
        loop {
            let block = sub | low;
            let remainder = set ^ block;
            let w = &weight[block];
            for (k, v) in table[remainder].iter().enumerate() {
                if !v.is_zero() {
                    row[k + 1] += w * v;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        table[set] = row;
    }

    let mut values = vec![BigRational::zero(); m + 1];
    for (p, slot) in values.iter_mut().enumerate().skip(1) {
        let scale = num_traits::pow(denom.clone(), m - p);
        *slot = BigRational::new(table[full][p].clone(), scale);
    }
    values
}

pub fn rhs_eq1_at(inst: IdentityInstance, point: &[BigRational]) -> BigRational {
    let sum: BigRational = point.iter().cloned().sum();
    num_traits::pow(sum, inst.m - inst.p)
        * BigRational::from_integer(binomial(inst.m as u64 - 1, inst.p as u64 - 1))
}

/// Numeric check of every `p` for one `m` at the given points. Returns one
/// verdict per `p = 1..=m`.
pub fn verify_eq1_numeric(m: usize, points: &[Vec<BigRational>]) -> Vec<Verdict> {
    let mut verdicts = vec![Verdict::Equal; m];
    for point in points {
        let lhs = lhs_eq1_values_at(point);
        for p in 1..=m {
            if !verdicts[p - 1].is_equal() {
                continue;
            }
            let inst = IdentityInstance { m, p };
            let rhs = rhs_eq1_at(inst, point);
            if lhs[p] != rhs {
                verdicts[p - 1] = Verdict::Differs(Difference::AtPoint {
                    point: point.clone(),
                    lhs: lhs[p].clone(),
                    rhs,
                });
            }
        }
    }
    verdicts
}

/// Symbolic left side for a single instance via the public partition stream.
/// Slower than [`lhs_eq1`]; retained as an independent cross-check.
pub fn lhs_eq1_uncached(inst: IdentityInstance) -> MPoly {
    let mut total = MPoly::zero();
    for sp in enumerate_partitions(inst.m, inst.p).expect("valid instance") {
        let mut prod = MPoly::one();
        for block in sp.blocks() {
            let sum = block
                .iter()
                .fold(MPoly::zero(), |acc, &i| acc + MPoly::var(i - 1));
            prod = &prod * &sum.pow(block.len() as u32 - 1);
        }
        total += prod;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(m: usize) -> Vec<BigRational> {
        vec![BigRational::one(); m]
    }

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn inst(m: usize, p: usize) -> IdentityInstance {
        IdentityInstance::new(m, p).unwrap()
    }

    #[test]
    fn instance_validation() {
        assert!(IdentityInstance::new(3, 0).is_err());
        assert!(IdentityInstance::new(3, 4).is_err());
        assert_eq!(IdentityInstance::grid(3).len(), 6);
    }

    #[test]
    fn diagonal_is_one() {
        for m in 1..=6 {
            assert_eq!(lhs_eq1(inst(m, m)), MPoly::one());
            assert_eq!(rhs_eq1(inst(m, m)), MPoly::one());
        }
    }

    #[test]
    fn single_block_is_power_of_sum() {
        for m in 1..=6 {
            let expected = Vars::indexed(m).sum_all().pow(m as u32 - 1);
            assert_eq!(lhs_eq1(inst(m, 1)), expected);
            assert_eq!(rhs_eq1(inst(m, 1)), expected);
        }
    }

    #[test]
    fn small_evaluations() {
        assert_eq!(lhs_eq1(inst(3, 2)).eval(&ones(3)), int(6));
        assert_eq!(rhs_eq1(inst(3, 2)).eval(&ones(3)), int(6));
        let e1 = [int(1), int(0), int(0), int(0)];
        assert_eq!(rhs_eq1(inst(4, 2)).eval(&e1), int(3));
        assert_eq!(lhs_eq1(inst(4, 2)).eval(&e1), int(3));
    }

    #[test]
    fn trivial_instance_passes() {
        assert!(verify_eq1(inst(1, 1)).is_equal());
    }

    #[test]
    fn cached_and_uncached_agree() {
        for i in IdentityInstance::grid(6) {
            assert_eq!(lhs_eq1(i), lhs_eq1_uncached(i), "{i:?}");
        }
    }

    #[test]
    fn mutated_binomial_detected() {
        // C(3,2) == C(3,1), so m=4, p=2 cannot expose this mutation; p=3 does.
        for (m, p, expect_equal) in [(4, 2, true), (4, 3, false), (3, 2, false)] {
            let i = inst(m, p);
            let mutated = Vars::indexed(m)
                .sum_all()
                .pow((m - p) as u32)
                .scale(&binomial(m as u64 - 1, p as u64));
            let verdict = Verdict::compare(&lhs_eq1(i), &mutated);
            assert_eq!(verdict.is_equal(), expect_equal, "m={m} p={p}");
            if let Verdict::Differs(Difference::Symbolic(d)) = verdict {
                assert!(!d.is_zero());
            }
        }
    }

    #[test]
    fn homogeneity_and_symmetry() {
        for i in IdentityInstance::grid(6) {
            let lhs = lhs_eq1(i);
            let degree = (i.m() - i.p()) as u32;
            assert!(lhs.is_homogeneous_of_degree(degree));
            assert!(rhs_eq1(i).is_homogeneous_of_degree(degree));
            let m = i.m();
            let reversed: Vec<usize> = (0..m).rev().collect();
            let rotated: Vec<usize> = (0..m).map(|k| (k + 1) % m).collect();
            assert_eq!(lhs.rename_vars(&reversed), lhs);
            assert_eq!(lhs.rename_vars(&rotated), lhs);
        }
    }

    #[test]
    fn claim0_examples() {
        assert!(verify_claim0(3, 2).unwrap().is_equal());
        for m in 1..=5 {
            if m >= 2 {
                assert!(verify_claim0(m, m).unwrap().is_equal(), "m={m}");
            }
            assert!(verify_claim0(m, m + 1).unwrap().is_equal(), "m={m}");
        }
        assert!(verify_claim0(4, 3).unwrap().is_equal());
        assert!(verify_claim0(3, 1).is_err());
        assert!(verify_claim0(3, 5).is_err());
    }

    #[test]
    fn claim_examples() {
        assert!(verify_claim(3, 2, 1).unwrap().is_equal());
        for m in 1..=5 {
            for p in 1..=m {
                assert!(
                    verify_claim(m, p, m + 1 - p).unwrap().is_equal(),
                    "m={m} p={p}"
                );
            }
        }
        assert!(verify_claim(4, 2, 2).unwrap().is_equal());
        assert!(verify_claim(3, 2, 0).is_err());
        assert!(verify_claim(3, 2, 3).is_err());
    }

    #[test]
    fn multinomial_examples() {
        let lhs = multinomial_variant_lhs(2, 3);
        let x0 = MPoly::var(0);
        let x1 = MPoly::var(1);
        let expected = &(&x0 * &x0) + &(&x1 * &x1) + MPoly::constant(2) * x0 * x1;
        assert_eq!(lhs, expected);
        for m in 2..=6 {
            assert!(verify_multinomial_variant(1, m).unwrap().is_equal());
        }
        assert!(verify_multinomial_variant(3, 4).unwrap().is_equal());
        assert!(verify_multinomial_variant(0, 4).is_err());
        assert!(verify_multinomial_variant(2, 1).is_err());
    }

    #[test]
    fn numeric_matches_symbolic_evaluation() {
        for m in 1..=7 {
            let values = lhs_eq1_values_at(&random_points(m, 1, 11)[0]);
            let point = &random_points(m, 1, 11)[0];
            for p in 1..=m {
                assert_eq!(values[p], lhs_eq1(inst(m, p)).eval(point), "m={m} p={p}");
            }
        }
    }

    #[test]
    fn numeric_detects_wrong_rhs() {
        let point = &random_points(5, 1, 3)[0];
        let values = lhs_eq1_values_at(point);
        let wrong = rhs_eq1_at(inst(5, 2), point) * int(2);
        assert_ne!(values[2], wrong);
    }

    #[test]
    fn random_points_are_seeded() {
        assert_eq!(random_points(4, 3, 9), random_points(4, 3, 9));
        assert_ne!(random_points(4, 3, 9), random_points(4, 3, 10));
    }
}
