//! Closed-form forest counts and weighted censuses.
//!
//! With `V = V_1 ∪ ... ∪ V_m`, `rho_i(lambda) = (1 + lambda)^|V_i| - 1` and
//! `n` extra vertices:
//!
//! ```text
//! N_m         = |V_1| |V|^(m-2) prod_{i>=2} (2^|V_i| - 1)
//! Q_n(m)      = lambda |V_1| prod_{i>=2} rho_i (|V| + n)^(m-1) (lambda |V| + n a)^(n-1)
//! Qtilde_n(m) = lambda |V_1| prod_{i>=2} rho_i  n^(m-1)        (lambda |V| + n a)^(n-1)
//! ```

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::{MPoly, Monomial};
use crate::error::{param_err, Result};
use crate::forest::{CensusPolynomial, VertexFamily, A, LAMBDA};
use crate::partitions::{InjectiveTuples, Partitions};

/// The weight of choosing a nonempty subset of a set of `size` vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RhoFactor {
    pub size: usize,
}

impl RhoFactor {
    /// `(1 + lambda)^size - 1`.
    pub fn poly(&self) -> MPoly {
        (MPoly::one() + MPoly::var(LAMBDA)).pow(self.size as u32) - MPoly::one()
    }

    /// `2^size - 1`.
    pub fn count(&self) -> BigInt {
        (BigInt::one() << self.size) - 1
    }
}

fn lambda() -> MPoly {
    MPoly::var(LAMBDA)
}

fn int_pow(base: usize, exp: usize) -> BigInt {
    num_traits::pow(BigInt::from(base), exp)
}

fn rho_product(fam: &VertexFamily) -> MPoly {
    fam.sizes()[1..]
        .iter()
        .fold(MPoly::one(), |acc, &s| &acc * &RhoFactor { size: s }.poly())
}

/// `lambda |V_1| prod_{i>=2} rho_i(lambda)`, the factor shared by every
/// census formula with `n >= 1`.
fn census_prefactor(fam: &VertexFamily) -> MPoly {
    rho_product(fam).scale(&BigInt::from(fam.sizes()[0])) * lambda()
}

/// `(lambda |V| + n a)^(n-1)` for `n >= 1`.
fn extras_factor(fam: &VertexFamily) -> MPoly {
    let n = fam.extras();
    let base = lambda().scale(&BigInt::from(fam.set_vertex_count()))
        + MPoly::var(A).scale(&BigInt::from(n));
    base.pow(n as u32 - 1)
}

/// Number of rooted forests on the sets of `fam` (which must have no extras).
pub fn n_m_closed(fam: &VertexFamily) -> Result<BigInt> {
    if fam.extras() != 0 {
        return param_err("the forest count is defined for families without extra vertices");
    }
    let sizes = fam.sizes();
    let m = sizes.len();
    if m == 1 {
        return Ok(BigInt::one());
    }
    let rho: BigInt = sizes[1..]
        .iter()
        .map(|&s| RhoFactor { size: s }.count())
        .product();
    Ok(BigInt::from(sizes[0]) * int_pow(fam.set_vertex_count(), m - 2) * rho)
}

/// Weighted census `Q_n(m)`.
///
/// For `n = 0` the formula's `(lambda |V| + n a)^(-1)` is read as its limit:
/// `|V_1| prod rho_i(lambda) |V|^(m-2)`, and `1` when also `m = 1`.
pub fn q_closed(fam: &VertexFamily) -> CensusPolynomial {
    let m = fam.num_sets();
    let n = fam.extras();
    let total = fam.set_vertex_count();
    if n == 0 {
        if m == 1 {
            return CensusPolynomial::new(MPoly::one());
        }
        let coeff = BigInt::from(fam.sizes()[0]) * int_pow(total, m - 2);
        return CensusPolynomial::new(rho_product(fam).scale(&coeff));
    }
    let poly = census_prefactor(fam).scale(&int_pow(total + n, m - 1)) * extras_factor(fam);
    CensusPolynomial::new(poly)
}

/// Census `Qtilde_n(m)` of forests without edges between different sets.
pub fn qtilde_closed(fam: &VertexFamily) -> Result<CensusPolynomial> {
    let n = fam.extras();
    if n == 0 {
        return param_err("the restricted census needs at least one extra vertex");
    }
    let poly = census_prefactor(fam).scale(&int_pow(n, fam.num_sets() - 1)) * extras_factor(fam);
    Ok(CensusPolynomial::new(poly))
}

/// How [`qtilde_expansion`] evaluates the nested sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionMode {
    /// Every subdivision, partition and injective tuple, term by term.
    Literal,
    /// Grouped by block-size shapes with multiplicities.
    Memoized,
}

/// Integer partitions of `total` into exactly `parts` parts, non-increasing.
fn shapes(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn extend(
        rest: usize,
        parts: usize,
        cap: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if parts == 0 {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let hi = cap.min(rest + 1 - parts);
        for first in (1..=hi).rev() {
            if first * parts < rest {
                break;
            }
            cur.push(first);
            extend(rest - first, parts - 1, first, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts >= 1 && parts <= total {
        extend(total, parts, total, &mut Vec::new(), &mut out);
    }
    out
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Number of set partitions of a `sum(shape)`-set with these block sizes.
fn shape_multiplicity(shape: &[usize]) -> BigInt {
    let total: usize = shape.iter().sum();
    let mut denom = BigInt::one();
    let mut runs: HashMap<usize, usize> = HashMap::new();
    for &s in shape {
        denom *= factorial(s);
        *runs.entry(s).or_default() += 1;
    }
    for &r in runs.values() {
        denom *= factorial(r);
    }
    factorial(total) / denom
}

/// `sum over injective (j_k) of prod_k inner[j_k]^outer[k]`.
fn injective_power_sum(outer: &[usize], inner: &[usize]) -> BigInt {
    let mut total = BigInt::zero();
    for tuple in InjectiveTuples::lenient(inner.len(), outer.len()) {
        let term: BigInt = tuple
            .iter()
            .zip(outer)
            .map(|(&j, &e)| int_pow(inner[j - 1], e))
            .product();
        total += term;
    }
    total
}

/// `prod_j |I_j|^(|I_j| - 1)`, the tree count weight without the `a` powers.
fn tree_weight(inner: &[usize]) -> BigInt {
    inner.iter().map(|&s| int_pow(s, s - 1)).product()
}

/// `coeffs[p]` = the part of the nested sum with `p` extra-vertex trees,
/// stripped of `(lambda |V|)^(p-1) a^(n-p)`.
fn expansion_coefficients(m: usize, n: usize, mode: ExpansionMode) -> Vec<BigInt> {
    let mut coeffs = vec![BigInt::zero(); n + 1];
    match mode {
        ExpansionMode::Literal => {
            for q in 1..m {
                for subdivision in Partitions::lenient(m - 1, q) {
                    let outer: Vec<usize> = subdivision.block_sizes().collect();
                    for (p, slot) in coeffs.iter_mut().enumerate().skip(q) {
                        for forest in Partitions::lenient(n, p) {
                            let inner: Vec<usize> = forest.block_sizes().collect();
                            *slot += injective_power_sum(&outer, &inner) * tree_weight(&inner);
                        }
                    }
                }
            }
        }
        ExpansionMode::Memoized => {
            let inner_shapes: Vec<Vec<(Vec<usize>, BigInt)>> = (0..=n)
                .map(|p| {
                    shapes(n, p)
                        .into_iter()
                        .map(|s| {
                            let w = shape_multiplicity(&s) * tree_weight(&s);
                            (s, w)
                        })
                        .collect()
                })
                .collect();
            for q in 1..m {
                for outer in shapes(m - 1, q) {
                    let outer_count = shape_multiplicity(&outer);
                    for (p, slot) in coeffs.iter_mut().enumerate().skip(q) {
                        for (inner, weight) in &inner_shapes[p] {
                            *slot += &outer_count * weight * injective_power_sum(&outer, inner);
                        }
                    }
                }
            }
        }
    }
    coeffs
}

/// The nested-sum form of `Qtilde_n(m)`: over subdivisions `{J_k}` of
/// `{2..m}`, partitions `{I_j}` of the extra vertices into `p` trees and
/// injective attachments `(j_k)` of the `J_k` to those trees, of
/// `lambda |V_1| prod rho_i prod_k |I_{j_k}|^|J_k| (lambda |V|)^(p-1) prod_j (a |I_j|)^(|I_j|-1)`.
pub fn qtilde_expansion(fam: &VertexFamily, mode: ExpansionMode) -> Result<CensusPolynomial> {
    let m = fam.num_sets();
    let n = fam.extras();
    if m < 2 || n < 1 {
        return param_err(format!(
            "the expansion needs m >= 2 and n >= 1, got m={m}, n={n}"
        ));
    }
    let coeffs = expansion_coefficients(m, n, mode);
    let total = fam.set_vertex_count();
    let mut sum = MPoly::zero();
    for (p, c) in coeffs.into_iter().enumerate().skip(1) {
        let coeff = c * int_pow(total, p - 1);
        let mono = Monomial::from_exponents(&[(p - 1) as u32, (n - p) as u32]);
        sum += MPoly::monomial(mono, coeff);
    }
    Ok(CensusPolynomial::new(&census_prefactor(fam) * &sum))
}

/// `Q_n(m)` reassembled from connected groups: for each subdivision
/// `{J_1..J_q}` of the sets, the groups contribute
/// `prod_k |V_{J_k}|^(|J_k| - 1)` and are joined through the extras with
/// weight `n^(q-1)`; the rest is the shared `lambda |V_1| prod rho_i
/// (lambda |V| + a n)^(n-1)`.
pub fn q_from_qtilde(fam: &VertexFamily) -> Result<CensusPolynomial> {
    let m = fam.num_sets();
    let n = fam.extras();
    if n < 1 {
        return param_err("the recombination needs at least one extra vertex");
    }
    let sizes = fam.sizes();
    let mut weight = BigInt::zero();
    for q in 1..=m {
        let mut groups = BigInt::zero();
        for subdivision in Partitions::lenient(m, q) {
            let term: BigInt = subdivision
                .blocks()
                .iter()
                .map(|block| {
                    let size: usize = block.iter().map(|&i| sizes[i - 1]).sum();
                    int_pow(size, block.len() - 1)
                })
                .product();
            groups += term;
        }
        weight += groups * int_pow(n, q - 1);
    }
    let poly = census_prefactor(fam).scale(&weight) * extras_factor(fam);
    Ok(CensusPolynomial::new(poly))
}
