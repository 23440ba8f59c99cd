//! Exact integer, rational and sparse multivariate polynomial arithmetic.
//!
//! Every downstream quantity (identity sides, forest counts, census
//! polynomials) lives in `Z[x_0, ..., x_k]`, so comparisons are structural
//! equality of normalized term maps.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        // acc * (n - i) is always divisible by (i + 1) at this point.
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Names for a dense family of formal variables, fixed for one computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vars {
    names: Vec<String>,
}

impl Vars {
    /// `x0, x1, ..., x{count-1}`.
    pub fn indexed(count: usize) -> Self {
        Vars {
            names: (0..count).map(|i| format!("x{i}")).collect(),
        }
    }

    /// The census ring: `lambda` at index 0 and `a` at index 1.
    pub fn census() -> Self {
        Vars {
            names: vec!["lambda".to_string(), "a".to_string()],
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    /// The polynomial consisting of the single variable `index`.
    pub fn var(&self, index: usize) -> MPoly {
        assert!(
            index < self.len(),
            "variable index {index} outside declared family of {}",
            self.len()
        );
        MPoly::var(index)
    }

    /// `x0 + x1 + ... + x{len-1}`.
    pub fn sum_all(&self) -> MPoly {
        (0..self.len())
            .map(MPoly::var)
            .fold(MPoly::zero(), |acc, v| acc + v)
    }
}

/// A power product with sparse, strictly increasing variable indices and
/// strictly positive exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    powers: Vec<(usize, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(index: usize) -> Self {
        Monomial::var_pow(index, 1)
    }

    pub fn var_pow(index: usize, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial {
                powers: vec![(index, exp)],
            }
        }
    }

    /// Builds a monomial from a dense exponent vector.
    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial {
            powers: exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| (i, e))
                .collect(),
        }
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.powers
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|pos| self.powers[pos].1)
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.powers.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.powers.is_empty()
    }

    /// Highest variable index with a nonzero exponent.
    pub fn max_var(&self) -> Option<usize> {
        self.powers.last().map(|&(i, _)| i)
    }

    /// `(index, exponent)` pairs in increasing index order.
    pub fn powers(&self) -> &[(usize, u32)] {
        &self.powers
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut powers = Vec::with_capacity(self.powers.len() + other.powers.len());
        let (mut a, mut b) = (
            self.powers.iter().peekable(),
            other.powers.iter().peekable(),
        );
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(ia, ea)), Some(&&(ib, eb))) => match ia.cmp(&ib) {
                    Ordering::Less => {
                        powers.push((ia, ea));
                        a.next();
                    }
                    Ordering::Greater => {
                        powers.push((ib, eb));
                        b.next();
                    }
                    Ordering::Equal => {
                        powers.push((ia, ea + eb));
                        a.next();
                        b.next();
                    }
                },
                (Some(&&p), None) => {
                    powers.push(p);
                    a.next();
                }
                (None, Some(&&p)) => {
                    powers.push(p);
                    b.next();
                }
                (None, None) => break,
            }
        }
        Monomial { powers }
    }

    /// Relabels variable `i` as `perm[i]`.
    pub fn rename(&self, perm: &[usize]) -> Monomial {
        let mut powers: Vec<(usize, u32)> =
            self.powers.iter().map(|&(i, e)| (perm[i], e)).collect();
        powers.sort_unstable();
        Monomial { powers }
    }

    pub fn render(&self, vars: &Vars) -> String {
        if self.is_one() {
            return "1".to_string();
        }
        self.powers
            .iter()
            .map(|&(i, e)| {
                let name = vars.name(i);
                if e == 1 {
                    name.to_string()
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Graded lexicographic order: total degree first, then the larger exponent
/// on the lowest-indexed variable wins.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| {
                for (&(ia, ea), &(ib, eb)) in self.powers.iter().zip(&other.powers) {
                    if ia != ib {
                        // A positive exponent on a lower index ranks higher.
                        return ib.cmp(&ia);
                    }
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                }
                self.powers.len().cmp(&other.powers.len())
            })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial over the integers.
///
/// Terms with zero coefficients are never stored, so derived `PartialEq` is
/// polynomial equality.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn one() -> Self {
        MPoly::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        MPoly::monomial(Monomial::one(), c)
    }

    pub fn var(index: usize) -> Self {
        MPoly::monomial(Monomial::var(index), 1)
    }

    pub fn monomial(mono: Monomial, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        MPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mono: &Monomial) -> BigInt {
        self.terms.get(mono).cloned().unwrap_or_default()
    }

    /// Total degree of the leading term; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::total_degree)
    }

    pub fn is_homogeneous_of_degree(&self, degree: u32) -> bool {
        self.terms.keys().all(|m| m.total_degree() == degree)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.keys().filter_map(Monomial::max_var).max()
    }

    pub fn has_nonnegative_coefficients(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    fn add_term(&mut self, mono: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigInt) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> MPoly {
        let mut base = self.clone();
        let mut acc = MPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact evaluation at a rational point.
    ///
    /// Panics if the point is shorter than the highest variable index used.
    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        if let Some(max) = self.max_var() {
            assert!(
                point.len() > max,
                "evaluation point has {} coordinates, polynomial uses x{max}",
                point.len()
            );
        }
        let mut total = BigRational::zero();
        for (mono, c) in &self.terms {
            let mut value = BigRational::from_integer(c.clone());
            for &(i, e) in mono.powers() {
                value *= num_traits::pow(point[i].clone(), e as usize);
            }
            total += value;
        }
        total
    }

    /// Relabels variable `i` as `perm[i]` in every term.
    pub fn rename_vars(&self, perm: &[usize]) -> MPoly {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.rename(perm), c.clone());
        }
        out
    }

    /// Canonical text: descending graded-lex order with explicit
    /// coefficients, e.g. `4*lambda^2 + 4*lambda*a`.
    pub fn render(&self, vars: &Vars) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (mono, c)) in self.terms.iter().rev().enumerate() {
            let magnitude = c.abs();
            if idx == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            if mono.is_one() {
                out.push_str(&magnitude.to_string());
            } else {
                out.push_str(&format!("{magnitude}*{}", mono.render(vars)));
            }
        }
        out
    }

    /// Structured `{monomial: coefficient}` map; the constant term is keyed `"1"`.
    pub fn term_map(&self, vars: &Vars) -> BTreeMap<String, String> {
        self.terms
            .iter()
            .map(|(m, c)| (m.render(vars), c.to_string()))
            .collect()
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.max_var().map_or(0, |v| v + 1);
        f.write_str(&self.render(&Vars::indexed(width)))
    }
}

impl From<BigInt> for MPoly {
    fn from(c: BigInt) -> Self {
        MPoly::constant(c)
    }
}

impl AddAssign<&MPoly> for MPoly {
    fn add_assign(&mut self, rhs: &MPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign for MPoly {
    fn add_assign(&mut self, rhs: MPoly) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl Add<&MPoly> for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for MPoly {
    type Output = MPoly;
    fn add(mut self, rhs: MPoly) -> MPoly {
        self += rhs;
        self
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

impl Sub<&MPoly> for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Sub for MPoly {
    type Output = MPoly;
    fn sub(self, rhs: MPoly) -> MPoly {
        &self - &rhs
    }
}

impl Mul<&MPoly> for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for MPoly {
    type Output = MPoly;
    fn mul(self, rhs: MPoly) -> MPoly {
        &self * &rhs
    }
}
