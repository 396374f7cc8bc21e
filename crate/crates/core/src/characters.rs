//! Irreducible characters of the symmetric group.
//!
//! Two independent evaluators are provided:
//!
//! * [`char_mn`]: the Murnaghan–Nakayama rule, removing one border strip per
//!   cycle length.
//! * [`char_jt`]: the Frobenius formula as a signed sum over `S_ℓ` of ordered
//!   set partition counts, `χ^λ(α) = Σ_σ sign(σ) P(α, λ + σ − id)`.
//!
//! Both accept the cycle type as an unsorted composition; characters are
//! class functions, so only the multiset of cycle lengths matters.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::combinat::{factorial, for_each_permutation, partitions_of, small_partitions, Composition, Partition, Permutation};
use crate::error::{Error, Result};
use crate::par;
use crate::setpartition::{count_with, memo, CountOptions, SetPartitionInstance};

/// Largest degree the exhaustive oracles over `S_n` accept.
pub const SQRT_ORACLE_BOUND: usize = 9;
/// Largest degree accepted by the fixed-word oracle.
pub const FIXED_WORDS_BOUND: usize = 10;
/// Default bound on `ℓ(λ)` for [`char_jt`].
pub const JT_DEFAULT_MAX_LEN: usize = 8;
/// Default bound on `n` for row and column sums.
pub const TABLE_BOUND: usize = 14;

/// A character query `χ^λ(α)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharQuery {
    pub lambda: Partition,
    pub alpha: Composition,
}

impl CharQuery {
    pub fn new(lambda: Partition, alpha: Composition) -> Result<Self> {
        if let Some(bad) = alpha.entries().iter().find(|e| !e.is_positive()) {
            return Err(Error::InvalidValue(format!("cycle length {bad} is not positive")));
        }
        let (l, a) = (BigInt::from(lambda.size()), alpha.sum());
        if l != a {
            return Err(Error::SizeMismatch { left: format!("|λ| = {l}"), right: format!("|α| = {a}") });
        }
        Ok(CharQuery { lambda, alpha })
    }

    pub fn from_small(lambda: &[usize], alpha: &[usize]) -> Result<Self> {
        let alpha: Vec<i64> = alpha.iter().map(|&a| a as i64).collect();
        Self::new(Partition::from_small(lambda)?, Composition::from_i64s(&alpha))
    }

    fn small(&self) -> Result<(Vec<usize>, Vec<usize>)> {
        let lambda = self
            .lambda
            .to_small()
            .ok_or_else(|| Error::InvalidValue("partition too large for rim-hook recursion".into()))?;
        let mut mu: Vec<usize> = self
            .alpha
            .entries()
            .iter()
            .map(|e| e.to_usize())
            .collect::<Option<_>>()
            .ok_or_else(|| Error::InvalidValue("cycle type too large for rim-hook recursion".into()))?;
        mu.sort_unstable_by(|a, b| b.cmp(a));
        Ok((lambda, mu))
    }
}

/// Border strips of length `k` removable from `shape`, as
/// `(remaining shape, height - 1)`.
///
/// Works on beta numbers `β_i = λ_i + ℓ − 1 − i`: removing a strip of length
/// `k` moves one bead from `b` to the empty position `b − k`, and the strip
/// spans one more row than the number of beads strictly between the two.
pub fn border_strips(shape: &[usize], k: usize) -> Vec<(Vec<usize>, usize)> {
    let l = shape.len();
    let beta: Vec<usize> = shape.iter().enumerate().map(|(i, &p)| p + l - 1 - i).collect();
    let mut out = Vec::new();
    for (idx, &b) in beta.iter().enumerate() {
        if b < k || beta.contains(&(b - k)) {
            continue;
        }
        let target = b - k;
        let between = beta.iter().filter(|&&c| c > target && c < b).count();
        let mut nb = beta.clone();
        nb[idx] = target;
        nb.sort_unstable_by(|x, y| y.cmp(x));
        let remaining: Vec<usize> =
            nb.iter().enumerate().map(|(i, &c)| c - (l - 1 - i)).filter(|&p| p > 0).collect();
        out.push((remaining, between));
    }
    out
}

struct MnEval<'a> {
    mu: &'a [usize],
    memo: HashMap<(Vec<usize>, usize), BigInt>,
}

impl MnEval<'_> {
    fn eval(&mut self, shape: Vec<usize>, idx: usize) -> BigInt {
        if idx == self.mu.len() {
            return if shape.is_empty() { BigInt::one() } else { BigInt::zero() };
        }
        let key = (shape, idx);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut total = BigInt::zero();
        for (rest, height_minus_one) in border_strips(&key.0, self.mu[idx]) {
            let v = self.eval(rest, idx + 1);
            if height_minus_one % 2 == 0 {
                total += v;
            } else {
                total -= v;
            }
        }
        self.memo.insert(key, total.clone());
        total
    }
}

/// `χ^λ(α)` by the Murnaghan–Nakayama rule, memoized on
/// (remaining shape, position in the sorted cycle type).
pub fn char_mn(q: &CharQuery) -> Result<BigInt> {
    let (lambda, mu) = q.small()?;
    Ok(mn_small(&lambda, &mu))
}

/// Murnaghan–Nakayama on machine-sized inputs. `mu` must be sorted
/// decreasingly and `|lambda| = |mu|`.
pub fn mn_small(lambda: &[usize], mu: &[usize]) -> BigInt {
    let mut ev = MnEval { mu, memo: HashMap::new() };
    ev.eval(lambda.to_vec(), 0)
}

/// Counts complete rim-hook removal sequences for `χ^λ(μ)` by sign:
/// `(positive, negative)`. Their difference is the character value.
pub fn rim_hook_sign_counts(lambda: &[usize], mu: &[usize]) -> (BigUint, BigUint) {
    fn go(
        shape: Vec<usize>,
        idx: usize,
        mu: &[usize],
        memo: &mut HashMap<(Vec<usize>, usize), (BigUint, BigUint)>,
    ) -> (BigUint, BigUint) {
        if idx == mu.len() {
            let one = if shape.is_empty() { BigUint::one() } else { BigUint::zero() };
            return (one, BigUint::zero());
        }
        let key = (shape, idx);
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let (mut pos, mut neg) = (BigUint::zero(), BigUint::zero());
        for (rest, h) in border_strips(&key.0, mu[idx]) {
            let (p, n) = go(rest, idx + 1, mu, memo);
            if h % 2 == 0 {
                pos += p;
                neg += n;
            } else {
                pos += n;
                neg += p;
            }
        }
        memo.insert(key, (pos.clone(), neg.clone()));
        (pos, neg)
    }
    go(lambda.to_vec(), 0, mu, &mut HashMap::new())
}

/// Options for [`char_jt`].
#[derive(Clone, Debug)]
pub struct JtOptions {
    /// Largest `ℓ(λ)` accepted.
    pub max_len: usize,
    pub count: CountOptions,
}

impl Default for JtOptions {
    fn default() -> Self {
        JtOptions { max_len: JT_DEFAULT_MAX_LEN, count: CountOptions::default() }
    }
}

/// `χ^λ(α) = Σ_{σ ∈ S_ℓ} sign(σ) · P(α, λ + σ − id)` with the default options.
pub fn char_jt(q: &CharQuery) -> Result<BigInt> {
    char_jt_with(q, &JtOptions::default())
}

/// One nonzero-candidate term of the Frobenius sum.
#[derive(Clone, Debug)]
pub struct JtTerm {
    /// `σ` as 0-based images.
    pub sigma: Vec<usize>,
    pub sign: i32,
    /// `λ + σ − id`, zeros kept.
    pub bins: Vec<BigInt>,
}

/// The terms of the Frobenius sum that can be nonzero.
///
/// Permutations are generated in lexicographic order with the sign tracked
/// incrementally. A prefix is cut as soon as a bin goes negative. When all
/// items except a few "breakers" share a common divisor `g`, each bin whose
/// size is not divisible by `g` must hold a breaker, so prefixes with more
/// such bins than breakers are cut too.
pub fn jt_terms(lambda: &Partition, alpha: &Composition) -> Vec<JtTerm> {
    let l = lambda.len();
    let parts: Vec<BigInt> = lambda.parts().iter().map(|p| BigInt::from(p.clone())).collect();
    let mut distinct: Vec<BigInt> = alpha.entries().to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let (breaker_values, g) = memo::gcd_breakers(&distinct);
    let breaker_items = alpha.entries().iter().filter(|a| breaker_values.contains(a)).count();
    let modulus = (g > BigInt::one()).then_some(g);

    struct Walk<'a> {
        parts: &'a [BigInt],
        modulus: Option<BigInt>,
        budget: usize,
        used: Vec<bool>,
        sigma: Vec<usize>,
        bins: Vec<BigInt>,
        out: Vec<JtTerm>,
    }

    impl Walk<'_> {
        fn go(&mut self, i: usize, inversions: usize, off_residue: usize) {
            let l = self.parts.len();
            if i == l {
                self.out.push(JtTerm {
                    sigma: self.sigma.clone(),
                    sign: if inversions.is_multiple_of(2) { 1 } else { -1 },
                    bins: self.bins.clone(),
                });
                return;
            }
            for s in 0..l {
                if self.used[s] {
                    continue;
                }
                let bin = &self.parts[i] + BigInt::from(s as i64) - BigInt::from(i as i64);
                if bin.is_negative() {
                    continue;
                }
                let off = match &self.modulus {
                    Some(g) if !(&bin % g).is_zero() => 1,
                    _ => 0,
                };
                if off_residue + off > self.budget {
                    continue;
                }
                // inversions added: earlier positions holding larger values
                let inv = self.sigma.iter().filter(|&&t| t > s).count();
                self.used[s] = true;
                self.sigma.push(s);
                self.bins.push(bin);
                self.go(i + 1, inversions + inv, off_residue + off);
                self.bins.pop();
                self.sigma.pop();
                self.used[s] = false;
            }
        }
    }

    let mut walk = Walk {
        parts: &parts,
        budget: if modulus.is_some() { breaker_items } else { usize::MAX },
        modulus,
        used: vec![false; l],
        sigma: Vec::with_capacity(l),
        bins: Vec::with_capacity(l),
        out: Vec::new(),
    };
    walk.go(0, 0, 0);
    walk.out
}

/// [`char_jt`] with explicit options.
pub fn char_jt_with(q: &CharQuery, opts: &JtOptions) -> Result<BigInt> {
    let l = q.lambda.len();
    if l > opts.max_len {
        return Err(Error::BoundExceeded { what: "ℓ(λ)", value: l, bound: opts.max_len });
    }
    let terms = jt_terms(&q.lambda, &q.alpha);
    let values = par::map_slice(&terms, |t| {
        let bins = Composition::new(t.bins.clone()).without_zeros();
        let inst = SetPartitionInstance::new(q.alpha.clone(), bins).expect("cycle lengths are positive");
        let p = BigInt::from(count_with(&inst, &opts.count));
        if t.sign > 0 {
            p
        } else {
            -p
        }
    });
    Ok(values.into_iter().sum())
}

/// `φ^ν(α) = P(α, ν)`: the character of the trivial representation induced
/// from the Young subgroup `S_ν`, at cycle type `α`. A negative entry of `ν`
/// gives 0 and zero entries are ignored.
pub fn phi_induced(nu: &Composition, alpha: &Composition) -> Result<BigUint> {
    check_phi_args(nu, alpha)?;
    if nu.entries().iter().any(|e| e.is_negative()) {
        return Ok(BigUint::zero());
    }
    let inst = SetPartitionInstance::new(alpha.clone(), nu.without_zeros())?;
    Ok(count_with(&inst, &CountOptions::default()))
}

fn check_phi_args(nu: &Composition, alpha: &Composition) -> Result<()> {
    if let Some(bad) = alpha.entries().iter().find(|e| !e.is_positive()) {
        return Err(Error::InvalidValue(format!("cycle length {bad} is not positive")));
    }
    if nu.sum() != alpha.sum() {
        return Err(Error::SizeMismatch { left: format!("|ν| = {}", nu.sum()), right: format!("|α| = {}", alpha.sum()) });
    }
    Ok(())
}

/// `φ^ν(α)` by counting words with `ν_i` letters `i` that are fixed when
/// their positions are permuted by a concrete permutation of cycle type `α`.
/// Refuses `|α| >` [`FIXED_WORDS_BOUND`].
pub fn phi_fixedwords_oracle(nu: &Composition, alpha: &Composition) -> Result<BigUint> {
    check_phi_args(nu, alpha)?;
    if nu.entries().iter().any(|e| e.is_negative()) {
        return Ok(BigUint::zero());
    }
    let n = alpha.sum().to_usize().unwrap_or(usize::MAX);
    if n > FIXED_WORDS_BOUND {
        return Err(Error::BoundExceeded { what: "|α|", value: n, bound: FIXED_WORDS_BOUND });
    }
    let cycles: Vec<usize> = alpha.entries().iter().map(|e| e.to_usize().expect("bounded")).collect();
    let pi = Permutation::with_cycle_type(&cycles);
    let mut remaining: Vec<usize> = nu.entries().iter().map(|e| e.to_usize().expect("bounded")).collect();
    let mut word = vec![0usize; n];
    let mut fixed = 0u64;

    fn fill(pos: usize, word: &mut [usize], remaining: &mut [usize], pi: &Permutation, fixed: &mut u64) {
        if pos == word.len() {
            if (0..word.len()).all(|i| word[pi.apply(i)] == word[i]) {
                *fixed += 1;
            }
            return;
        }
        for letter in 0..remaining.len() {
            if remaining[letter] == 0 {
                continue;
            }
            remaining[letter] -= 1;
            word[pos] = letter;
            fill(pos + 1, word, remaining, pi, fixed);
            remaining[letter] += 1;
        }
    }
    fill(0, &mut word, &mut remaining, &pi, &mut fixed);
    Ok(BigUint::from(fixed))
}

/// `χ^λ(1^n)` by the hook-length formula.
pub fn dimension(lambda: &Partition) -> Result<BigUint> {
    let shape = lambda
        .to_small()
        .ok_or_else(|| Error::InvalidValue("partition too large for the hook-length formula".into()))?;
    let conj = lambda.conjugate().expect("small partition").to_small().expect("small");
    let n: usize = shape.iter().sum();
    let mut hooks = BigUint::one();
    for (i, &row) in shape.iter().enumerate() {
        for (j, &col_len) in conj.iter().enumerate().take(row) {
            hooks *= BigUint::from(row - j + col_len - i - 1);
        }
    }
    Ok(factorial(n) / hooks)
}

fn small_n(lambda: &Partition, bound: usize) -> Result<(Vec<usize>, usize)> {
    let shape = lambda.to_small().ok_or_else(|| Error::InvalidValue("partition too large".into()))?;
    let n: usize = shape.iter().sum();
    if n > bound {
        return Err(Error::BoundExceeded { what: "n", value: n, bound });
    }
    Ok((shape, n))
}

/// `a_λ = Σ_{μ ⊢ n} χ^λ(μ)`, the row sum of the character table.
pub fn row_sum(lambda: &Partition) -> Result<BigInt> {
    let (shape, n) = small_n(lambda, TABLE_BOUND)?;
    let mus = small_partitions(n);
    Ok(par::map_slice(&mus, |mu| mn_small(&shape, mu)).into_iter().sum())
}

/// `b_λ = Σ_{μ ⊢ n} χ^μ(λ)`, the column sum of the character table.
pub fn column_sum(lambda: &Partition) -> Result<BigInt> {
    let (shape, n) = small_n(lambda, TABLE_BOUND)?;
    let rows = small_partitions(n);
    Ok(par::map_slice(&rows, |row| mn_small(row, &shape)).into_iter().sum())
}

/// The number of `ω ∈ S_n` with `ω² = σ` for a fixed `σ` of cycle type `λ`,
/// by enumerating `S_n`.
pub fn sqrt_count_oracle(lambda: &Partition) -> Result<BigUint> {
    let (shape, n) = small_n(lambda, SQRT_ORACLE_BOUND)?;
    let sigma = Permutation::with_cycle_type(&shape);
    let mut count = 0u64;
    for_each_permutation(n, |w| {
        if (0..n).all(|i| w[w[i]] == sigma.apply(i)) {
            count += 1;
        }
    });
    Ok(BigUint::from(count))
}

/// The character table of `S_n`: rows are `λ`, columns `μ`, both in the
/// order of [`partitions_of`].
pub fn character_table(n: usize) -> Vec<Vec<BigInt>> {
    let parts = small_partitions(n);
    par::map_slice(&parts, |lambda| parts.iter().map(|mu| mn_small(lambda, mu)).collect())
}

/// Labels matching [`character_table`].
pub fn table_labels(n: usize) -> Vec<Partition> {
    partitions_of(n)
}
