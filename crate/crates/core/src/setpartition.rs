//! Exact counting of ordered set partitions `P(a, b)`.
//!
//! An ordered set partition of the items `a = (a_1, …, a_m)` into the bins
//! `b = (b_1, …, b_ℓ)` assigns every item to exactly one bin so that the item
//! sizes in bin `i` sum to `b_i`. Bins are distinguishable.
//!
//! Two engines are provided:
//!
//! * [`Strategy::Plain`]: depth-first assignment of the items in decreasing
//!   size order with residual-capacity pruning. This is the reference
//!   implementation every other path is checked against.
//! * [`Strategy::Memo`]: the same search over *groups* of equal items, memoized
//!   on the sorted multiset of residual bin sizes. Equal items are placed
//!   together with a multinomial weight.
//! * [`Strategy::Bins`] (default): bins are filled one at a time, each with an
//!   exact sub-multiset of the remaining items, memoized on the remaining
//!   item counts. Much faster when a few large bins would otherwise stay
//!   open through the whole search.
//!
//! For the two memoized engines, when a radix is supplied and the instance
//! is carry-free in that radix, residuals are tracked as balanced digit
//! vectors and pruned digit by digit.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::combinat::{factorial, Composition};
use crate::error::{Error, Result};

/// Item sizes `a` (positive) and bin sizes `b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetPartitionInstance {
    items: Composition,
    bins: Composition,
}

impl SetPartitionInstance {
    pub fn new(items: Composition, bins: Composition) -> Result<Self> {
        if let Some(bad) = items.entries().iter().find(|e| !e.is_positive()) {
            return Err(Error::InvalidValue(format!("item size {bad} is not positive")));
        }
        Ok(SetPartitionInstance { items, bins })
    }

    pub fn from_i64s(items: &[i64], bins: &[i64]) -> Result<Self> {
        Self::new(Composition::from_i64s(items), Composition::from_i64s(bins))
    }

    pub fn items(&self) -> &Composition {
        &self.items
    }

    pub fn bins(&self) -> &Composition {
        &self.bins
    }

    /// Checks the invariants after deserialization.
    pub fn validate(self) -> Result<Self> {
        Self::new(self.items, self.bins)
    }

    /// True when the count is trivially zero: a negative bin or unequal sums.
    fn trivially_zero(&self) -> bool {
        self.bins.entries().iter().any(|b| b.is_negative()) || self.items.sum() != self.bins.sum()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Plain depth-first backtracking; the reference engine.
    Plain,
    /// Grouped, memoized search.
    Memo,
    /// Bin-by-bin search memoized on the remaining items.
    #[default]
    Bins,
}

#[derive(Clone, Debug, Default)]
pub struct CountOptions {
    pub strategy: Strategy,
    /// Radix hint for digit-wise residual tracking in memo mode. Ignored if
    /// the instance is not carry-free in this radix.
    pub radix: Option<BigUint>,
}

impl CountOptions {
    pub fn plain() -> Self {
        CountOptions { strategy: Strategy::Plain, radix: None }
    }

    pub fn with_radix(radix: BigUint) -> Self {
        CountOptions { strategy: Strategy::default(), radix: Some(radix) }
    }
}

/// `P(a, b)` with the default (memoized) engine.
pub fn count_ordered_partitions(inst: &SetPartitionInstance) -> BigUint {
    count_with(inst, &CountOptions::default())
}

/// `P(a, b)` with an explicit engine choice.
pub fn count_with(inst: &SetPartitionInstance, opts: &CountOptions) -> BigUint {
    if inst.trivially_zero() {
        return BigUint::zero();
    }
    match opts.strategy {
        Strategy::Plain => plain::count(inst, None),
        Strategy::Memo => memo::count(inst.items.entries(), &[], inst.bins.entries(), opts.radix.as_ref()),
        Strategy::Bins => bins::count(inst.items.entries(), &[], inst.bins.entries(), opts.radix.as_ref()),
    }
}

/// Counts the solutions in which items `i` and `j` (0-based) share a bin
/// (`same_bin = true`) or sit in different bins.
pub fn count_with_fixed_pair(inst: &SetPartitionInstance, i: usize, j: usize, same_bin: bool) -> Result<BigUint> {
    count_with_fixed_pair_opts(inst, i, j, same_bin, &CountOptions::default())
}

pub fn count_with_fixed_pair_opts(
    inst: &SetPartitionInstance,
    i: usize,
    j: usize,
    same_bin: bool,
    opts: &CountOptions,
) -> Result<BigUint> {
    let m = inst.items.len();
    for idx in [i, j] {
        if idx >= m {
            return Err(Error::IndexOutOfRange { index: idx, len: m });
        }
    }
    if i == j {
        return Err(Error::InvalidValue("fixed pair needs two distinct items".into()));
    }
    if inst.trivially_zero() {
        return Ok(BigUint::zero());
    }
    Ok(match opts.strategy {
        Strategy::Plain => plain::count(inst, Some((i, j, same_bin))),
        Strategy::Memo => memo::count_fixed_pair(inst, i, j, same_bin, opts.radix.as_ref()),
        Strategy::Bins => {
            let (items, bins) = (inst.items.entries(), inst.bins.entries());
            let mut total = BigUint::zero();
            for bi in 0..bins.len() {
                for bj in 0..bins.len() {
                    if (bi == bj) == same_bin {
                        let mut residual = bins.to_vec();
                        residual[bi] -= &items[i];
                        residual[bj] -= &items[j];
                        total += bins::count(items, &[i, j], &residual, opts.radix.as_ref());
                    }
                }
            }
            total
        }
    })
}

/// Enumerates every solution with the plain engine, calling `f` with the bin
/// index of each item (in the original item order). Stops early and returns
/// `false` once `f` returns `false`.
pub fn for_each_solution(inst: &SetPartitionInstance, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if inst.trivially_zero() {
        return true;
    }
    plain::enumerate(inst, &mut f)
}

mod plain {
    use super::*;

    type Visitor<'a> = &'a mut dyn FnMut(&[usize]) -> bool;

    struct Search<'a> {
        sizes: Vec<BigInt>,
        original: Vec<usize>,
        residual: Vec<BigInt>,
        assignment: Vec<usize>,
        pair: Option<(usize, usize, bool)>,
        visit: Option<Visitor<'a>>,
        stopped: bool,
    }

    fn setup<'a>(inst: &SetPartitionInstance, pair: Option<(usize, usize, bool)>) -> Search<'a> {
        let mut order: Vec<usize> = (0..inst.items.len()).collect();
        order.sort_by(|&x, &y| inst.items.entries()[y].cmp(&inst.items.entries()[x]));
        // pair positions are remapped into search order
        let pos_of = |item: usize| order.iter().position(|&o| o == item).expect("index in range");
        let pair = pair.map(|(i, j, same)| (pos_of(i), pos_of(j), same));
        Search {
            sizes: order.iter().map(|&o| inst.items.entries()[o].clone()).collect(),
            original: order,
            residual: inst.bins.entries().to_vec(),
            assignment: vec![usize::MAX; inst.items.len()],
            pair,
            visit: None,
            stopped: false,
        }
    }

    impl Search<'_> {
        fn pair_ok(&self, t: usize, bin: usize) -> bool {
            match self.pair {
                Some((i, j, same)) if t == i.max(j) => {
                    let other = self.assignment[i.min(j)];
                    (other == bin) == same
                }
                _ => true,
            }
        }

        fn go(&mut self, t: usize) -> BigUint {
            if self.stopped {
                return BigUint::zero();
            }
            if t == self.sizes.len() {
                // sums were equal initially, so every residual is now zero
                debug_assert!(self.residual.iter().all(|r| r.is_zero()));
                if let Some(visit) = self.visit.as_mut() {
                    let mut by_item = vec![0; self.sizes.len()];
                    for (pos, &bin) in self.assignment.iter().enumerate() {
                        by_item[self.original[pos]] = bin;
                    }
                    if !visit(&by_item) {
                        self.stopped = true;
                    }
                }
                return BigUint::one();
            }
            let mut total = BigUint::zero();
            for bin in 0..self.residual.len() {
                if self.residual[bin] < self.sizes[t] || !self.pair_ok(t, bin) {
                    continue;
                }
                self.residual[bin] -= &self.sizes[t];
                self.assignment[t] = bin;
                total += self.go(t + 1);
                self.residual[bin] += &self.sizes[t];
            }
            self.assignment[t] = usize::MAX;
            total
        }
    }

    pub(super) fn count(inst: &SetPartitionInstance, pair: Option<(usize, usize, bool)>) -> BigUint {
        setup(inst, pair).go(0)
    }

    pub(super) fn enumerate(inst: &SetPartitionInstance, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let mut s = setup(inst, None);
        s.visit = Some(f);
        s.go(0);
        !s.stopped
    }
}

pub(crate) mod memo {
    use super::*;
    use std::hash::Hash;

    /// A residual representation the memoized search can run over.
    pub(crate) trait Weight: Clone + Eq + Hash + Ord {
        fn minus(&self, item: &Self, times: u32) -> Self;
    }

    impl Weight for BigInt {
        fn minus(&self, item: &Self, times: u32) -> Self {
            self - item * BigInt::from(times)
        }
    }

    #[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
    pub(crate) struct Digits(Vec<i64>);

    impl Weight for Digits {
        fn minus(&self, item: &Self, times: u32) -> Self {
            let t = times as i64;
            Digits(self.0.iter().zip(&item.0).map(|(r, x)| r - t * x).collect())
        }
    }

    /// Feasibility information about the items still to be placed.
    pub(crate) trait Suffix<W> {
        fn feasible(&self, residual: &W) -> bool;
    }

    pub(crate) struct BigSuffix {
        count: usize,
        sum: BigInt,
        min: BigInt,
        gcd: BigInt,
    }

    impl Suffix<BigInt> for BigSuffix {
        fn feasible(&self, r: &BigInt) -> bool {
            if r.is_negative() {
                return false;
            }
            if self.count == 0 {
                return r.is_zero();
            }
            if r.is_zero() {
                return true;
            }
            *r <= self.sum && *r >= self.min && (r % &self.gcd).is_zero()
        }
    }

    pub(crate) struct DigitSuffix {
        count: usize,
        lo: Vec<i64>,
        hi: Vec<i64>,
        /// `(g, r^d mod g)` when the suffix gcd fits a machine word.
        modulus: Option<(i128, Vec<i128>)>,
    }

    impl Suffix<Digits> for DigitSuffix {
        fn feasible(&self, r: &Digits) -> bool {
            if self.count == 0 {
                return r.0.iter().all(|&d| d == 0);
            }
            if r.0.iter().zip(self.lo.iter().zip(&self.hi)).any(|(&d, (&lo, &hi))| d < lo || d > hi) {
                return false;
            }
            if let Some((g, pows)) = &self.modulus {
                let v: i128 = r.0.iter().zip(pows).map(|(&d, &p)| (d as i128).rem_euclid(*g) * p % g).sum();
                if v % g != 0 {
                    return false;
                }
            }
            true
        }
    }

    /// A group of equal items.
    pub(crate) struct Group<W> {
        value: W,
        count: u32,
    }

    pub(crate) struct Dp<W, S> {
        groups: Vec<Group<W>>,
        suffix: Vec<S>,
        memo: HashMap<(usize, Vec<W>), BigUint>,
        fact: Vec<BigUint>,
    }

    impl<W: Weight, S: Suffix<W>> Dp<W, S> {
        fn count(&mut self, g: usize, state: Vec<W>) -> BigUint {
            if g == self.groups.len() {
                return BigUint::one();
            }
            let key = (g, state);
            if let Some(v) = self.memo.get(&key) {
                return v.clone();
            }
            let state = key.1.clone();
            let mut total = BigUint::zero();
            let count = self.groups[g].count;
            let mut next = state.clone();
            let mut split = vec![0u32; state.len()];
            self.distribute(g, 0, count, &state, &mut next, &mut split, &mut total);
            self.memo.insert(key, total.clone());
            total
        }

        /// Enumerates how the `count` copies of group `g` spread over bins
        /// `bin..`, recursing into the next group for each complete split.
        #[allow(clippy::too_many_arguments)]
        fn distribute(
            &mut self,
            g: usize,
            bin: usize,
            left: u32,
            state: &[W],
            next: &mut Vec<W>,
            split: &mut Vec<u32>,
            total: &mut BigUint,
        ) {
            if bin == state.len() {
                if left != 0 {
                    return;
                }
                let mut sorted = next.clone();
                sorted.sort_unstable();
                let sub = self.count(g + 1, sorted);
                if sub.is_zero() {
                    return;
                }
                let count = self.groups[g].count as usize;
                let mut weight = self.fact[count].clone();
                for &n in split.iter() {
                    weight /= &self.fact[n as usize];
                }
                *total += weight * sub;
                return;
            }
            let min_here = if bin + 1 == state.len() { left } else { 0 };
            for n in min_here..=left {
                let r = state[bin].minus(&self.groups[g].value, n);
                if !self.suffix[g + 1].feasible(&r) {
                    continue;
                }
                next[bin] = r;
                split[bin] = n;
                self.distribute(g, bin + 1, left - n, state, next, split, total);
            }
            next[bin] = state[bin].clone();
            split[bin] = 0;
        }
    }

    fn fact_table(n: usize) -> Vec<BigUint> {
        (0..=n).map(factorial).collect()
    }

    /// Search order over distinct item values: "gcd breakers" first, then
    /// the remaining values in decreasing order. A breaker is a value whose
    /// removal raises the gcd of the rest; placing breakers first lets the
    /// suffix-gcd test prune immediately.
    pub(crate) fn group_order(items: &[BigInt]) -> Vec<(BigInt, u32)> {
        let mut counts: Vec<(BigInt, u32)> = Vec::new();
        let mut sorted = items.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        for v in sorted {
            match counts.last_mut() {
                Some((last, c)) if *last == v => *c += 1,
                _ => counts.push((v, 1)),
            }
        }
        let (breakers, _) = gcd_breakers(&counts.iter().map(|(v, _)| v.clone()).collect::<Vec<_>>());
        let mut out: Vec<(BigInt, u32)> = Vec::with_capacity(counts.len());
        for b in &breakers {
            let idx = counts.iter().position(|(v, _)| v == b).expect("breaker is an item");
            out.push(counts.remove(idx));
        }
        out.extend(counts);
        out
    }

    fn gcd_of<'a>(vals: impl Iterator<Item = &'a BigInt>) -> BigInt {
        vals.fold(BigInt::zero(), |g, v| g.gcd(v))
    }

    /// Greedily finds distinct values whose removal raises the gcd of the
    /// remaining values. Returns the breakers (in removal order) and the gcd
    /// of what is left.
    pub(crate) fn gcd_breakers(values: &[BigInt]) -> (Vec<BigInt>, BigInt) {
        let mut rest: Vec<BigInt> = values.to_vec();
        let mut breakers = Vec::new();
        const MAX_BREAKERS: usize = 4;
        loop {
            let g0 = gcd_of(rest.iter());
            if rest.len() <= 2 || breakers.len() >= MAX_BREAKERS {
                return (breakers, g0);
            }
            let gcd_without = |skip: &[usize]| {
                gcd_of(rest.iter().enumerate().filter(|(i, _)| !skip.contains(i)).map(|(_, v)| v))
            };
            let mut best: Option<(BigInt, Vec<usize>)> = None;
            for i in 0..rest.len() {
                let g = gcd_without(&[i]);
                if g > g0 && best.as_ref().is_none_or(|(bg, _)| g > *bg) {
                    best = Some((g, vec![i]));
                }
            }
            if best.is_none() && breakers.len() + 2 <= MAX_BREAKERS {
                for i in 0..rest.len() {
                    for j in i + 1..rest.len() {
                        let g = gcd_without(&[i, j]);
                        if g > g0 && best.as_ref().is_none_or(|(bg, _)| g > *bg) {
                            best = Some((g, vec![i, j]));
                        }
                    }
                }
            }
            let Some((_, mut idx)) = best else {
                return (breakers, g0);
            };
            idx.sort_unstable_by(|a, b| b.cmp(a));
            let mut removed: Vec<BigInt> = idx.iter().map(|&i| rest.remove(i)).collect();
            removed.reverse();
            breakers.extend(removed);
        }
    }

    /// Balanced base-`radix` digits of `x` (each in `(-radix/2, radix/2]`),
    /// least significant first, padded to `len`. `None` if `len` is too short.
    pub(crate) fn balanced_digits(x: &BigInt, radix: i64, len: usize) -> Option<Vec<i64>> {
        let r = BigInt::from(radix);
        let half = radix / 2;
        let mut rest = x.clone();
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            let (q, m) = rest.div_mod_floor(&r);
            let mut d = m.to_i64()?;
            rest = q;
            if d > half {
                d -= radix;
                rest += 1;
            }
            out.push(d);
        }
        rest.is_zero().then_some(out)
    }

    fn digit_len(values: &[BigInt], radix: &BigInt) -> usize {
        let max = values.iter().map(|v| v.abs()).max().unwrap_or_default();
        let mut len = 1;
        let mut cap = radix.clone();
        while cap <= &max * 2 {
            cap *= radix;
            len += 1;
        }
        len + 1
    }

    /// Converts items and bins into digit vectors when the instance is
    /// carry-free in `radix`: at every position the total digit mass of all
    /// items plus any bin digit stays below the radix, so digitwise equality
    /// of a bin's contents is equivalent to equality of values.
    pub(crate) fn to_digits(groups: &[(BigInt, u32)], bins: &[BigInt], radix: &BigUint) -> Option<(Vec<Digits>, Vec<Digits>, i64)> {
        let r = radix.to_i64()?;
        if !(4..=(1 << 40)).contains(&r) {
            return None;
        }
        let rb = BigInt::from(r);
        let all: Vec<BigInt> = groups.iter().map(|(v, _)| v.clone()).chain(bins.iter().cloned()).collect();
        let len = digit_len(&all, &rb);
        let items: Vec<Digits> = groups
            .iter()
            .map(|(v, _)| balanced_digits(v, r, len).map(Digits))
            .collect::<Option<_>>()?;
        let bin_digits: Vec<Digits> = bins.iter().map(|v| balanced_digits(v, r, len).map(Digits)).collect::<Option<_>>()?;
        for d in 0..len {
            let mass: i128 = items
                .iter()
                .zip(groups)
                .map(|(x, (_, c))| (x.0[d] as i128).abs() * *c as i128)
                .sum();
            let bin_max = bin_digits.iter().map(|b| (b.0[d] as i128).abs()).max().unwrap_or(0);
            if mass + bin_max >= r as i128 {
                return None;
            }
        }
        Some((items, bin_digits, r))
    }

    pub(crate) fn big_suffixes(groups: &[(BigInt, u32)]) -> Vec<BigSuffix> {
        let mut out = Vec::with_capacity(groups.len() + 1);
        out.push(BigSuffix { count: 0, sum: BigInt::zero(), min: BigInt::zero(), gcd: BigInt::zero() });
        for (v, c) in groups.iter().rev() {
            let prev = out.last().expect("seeded");
            out.push(BigSuffix {
                count: prev.count + *c as usize,
                sum: &prev.sum + v * BigInt::from(*c),
                min: if prev.count == 0 { v.clone() } else { prev.min.clone().min(v.clone()) },
                gcd: prev.gcd.gcd(v),
            });
        }
        out.reverse();
        out
    }

    pub(crate) fn digit_suffixes(groups: &[(BigInt, u32)], items: &[Digits], radix: i64) -> Vec<DigitSuffix> {
        let len = items.first().map_or(1, |d| d.0.len());
        let mut out = Vec::with_capacity(items.len() + 1);
        let mut lo = vec![0i64; len];
        let mut hi = vec![0i64; len];
        let mut count = 0usize;
        let mut g = BigInt::zero();
        out.push(DigitSuffix { count: 0, lo: lo.clone(), hi: hi.clone(), modulus: None });
        for ((v, c), x) in groups.iter().zip(items).rev() {
            count += *c as usize;
            g = g.gcd(v);
            for d in 0..len {
                let t = x.0[d] * *c as i64;
                if t < 0 {
                    lo[d] += t;
                } else {
                    hi[d] += t;
                }
            }
            let modulus = g.to_i64().filter(|&g| g > 1 && g < (1 << 40)).map(|g| {
                let g = g as i128;
                let mut pows = Vec::with_capacity(len);
                let mut p = 1i128 % g;
                for _ in 0..len {
                    pows.push(p);
                    p = p * (radix as i128 % g) % g;
                }
                (g, pows)
            });
            out.push(DigitSuffix { count, lo: lo.clone(), hi: hi.clone(), modulus });
        }
        out.reverse();
        out
    }

    /// Counts placements of `items` into bins with residuals `bins`. Items in
    /// `skip` (0-based) are excluded; callers use it after pre-placing them.
    pub(super) fn count(items: &[BigInt], skip: &[usize], bins: &[BigInt], radix: Option<&BigUint>) -> BigUint {
        let mut ctx = Context::new(items, skip, radix);
        ctx.count(bins)
    }

    pub(super) fn count_fixed_pair(
        inst: &SetPartitionInstance,
        i: usize,
        j: usize,
        same_bin: bool,
        radix: Option<&BigUint>,
    ) -> BigUint {
        let items = inst.items.entries();
        let bins = inst.bins.entries();
        let mut ctx = Context::new(items, &[i, j], radix);
        let mut total = BigUint::zero();
        for bi in 0..bins.len() {
            for bj in 0..bins.len() {
                if (bi == bj) != same_bin {
                    continue;
                }
                let mut residual = bins.to_vec();
                residual[bi] -= &items[i];
                residual[bj] -= &items[j];
                if residual.iter().any(|r| r.is_negative()) {
                    continue;
                }
                total += ctx.count(&residual);
            }
        }
        total
    }

    /// A reusable search context over a fixed item list. Memo tables are
    /// shared across calls with different bin vectors.
    pub(crate) enum Context {
        Big(Dp<BigInt, BigSuffix>),
        Digit { dp: Dp<Digits, DigitSuffix>, radix: i64, len: usize, fallback: Box<Dp<BigInt, BigSuffix>> },
    }

    impl Context {
        pub(crate) fn new(items: &[BigInt], skip: &[usize], radix: Option<&BigUint>) -> Context {
            let kept: Vec<BigInt> =
                items.iter().enumerate().filter(|(i, _)| !skip.contains(i)).map(|(_, v)| v.clone()).collect();
            let groups = group_order(&kept);
            let fact = fact_table(groups.iter().map(|(_, c)| *c as usize).max().unwrap_or(0));
            let big = Dp {
                suffix: big_suffixes(&groups),
                groups: groups.iter().map(|(v, c)| Group { value: v.clone(), count: *c }).collect(),
                memo: HashMap::new(),
                fact: fact.clone(),
            };
            if let Some(radix) = radix {
                // probe carry-freeness with a representative bin of the right magnitude
                let total: BigInt = kept.iter().sum();
                if let Some((digits, _, r)) = to_digits(&groups, &[total], radix) {
                    let len = digits.first().map_or(1, |d| d.0.len());
                    let dp = Dp {
                        suffix: digit_suffixes(&groups, &digits, r),
                        groups: groups
                            .iter()
                            .zip(digits)
                            .map(|((_, c), d)| Group { value: d, count: *c })
                            .collect(),
                        memo: HashMap::new(),
                        fact,
                    };
                    return Context::Digit { dp, radix: r, len, fallback: Box::new(big) };
                }
            }
            Context::Big(big)
        }

        pub(crate) fn count(&mut self, bins: &[BigInt]) -> BigUint {
            if bins.iter().any(|b| b.is_negative()) {
                return BigUint::zero();
            }
            match self {
                Context::Big(dp) => run(dp, bins.to_vec()),
                Context::Digit { dp, radix, len, fallback } => {
                    match digit_bins(dp, bins, *radix, *len) {
                        Some(state) => run(dp, state),
                        None => run(fallback, bins.to_vec()),
                    }
                }
            }
        }
    }

    /// Bins as digit vectors, provided the carry-free bound still holds with
    /// these particular bins.
    fn digit_bins(dp: &Dp<Digits, DigitSuffix>, bins: &[BigInt], radix: i64, len: usize) -> Option<Vec<Digits>> {
        let out: Vec<Digits> = bins.iter().map(|b| balanced_digits(b, radix, len).map(Digits)).collect::<Option<_>>()?;
        let top = &dp.suffix[0];
        for d in 0..len {
            let mass = top.hi[d] as i128 - top.lo[d] as i128;
            let bin_max = out.iter().map(|b| (b.0[d] as i128).abs()).max().unwrap_or(0);
            if mass + bin_max >= radix as i128 {
                return None;
            }
        }
        Some(out)
    }

    fn run<W: Weight, S: Suffix<W>>(dp: &mut Dp<W, S>, mut state: Vec<W>) -> BigUint {
        if !state.iter().all(|r| dp.suffix[0].feasible(r)) {
            return BigUint::zero();
        }
        state.sort_unstable();
        dp.count(0, state)
    }
}


/// Bin-major search: bins are filled one at a time, largest first, each
/// with an exact sub-multiset of the remaining items, memoized on the
/// vector of remaining item counts.
pub(crate) mod bins {
    use super::memo::{big_suffixes, digit_suffixes, to_digits, Digits, Suffix, Weight};
    use super::*;

    struct Search<W> {
        values: Vec<W>,
        /// Integer value of each group, for suffix builders.
        sizes: Vec<BigInt>,
        bins: Vec<W>,
        radix: i64,
        binom: Vec<Vec<BigUint>>,
        memo: HashMap<(usize, Vec<u32>), BigUint>,
    }

    trait Suffixes<W>: Sized {
        type S: Suffix<W>;
        fn build(search: &Search<W>, active: &[usize], rem: &[u32]) -> Vec<Self::S>;
    }

    struct BigMode;
    struct DigitMode;

    impl Suffixes<BigInt> for BigMode {
        type S = memo::BigSuffix;
        fn build(search: &Search<BigInt>, active: &[usize], rem: &[u32]) -> Vec<Self::S> {
            let groups: Vec<(BigInt, u32)> = active.iter().map(|&g| (search.values[g].clone(), rem[g])).collect();
            big_suffixes(&groups)
        }
    }

    impl Suffixes<Digits> for DigitMode {
        type S = memo::DigitSuffix;
        fn build(search: &Search<Digits>, active: &[usize], rem: &[u32]) -> Vec<Self::S> {
            let groups: Vec<(BigInt, u32)> = active.iter().map(|&g| (search.sizes[g].clone(), rem[g])).collect();
            let digits: Vec<Digits> = active.iter().map(|&g| search.values[g].clone()).collect();
            digit_suffixes(&groups, &digits, search.radix)
        }
    }

    impl<W: Weight> Search<W> {
        fn count<M: Suffixes<W>>(&mut self, bin: usize, rem: Vec<u32>) -> BigUint {
            if bin == self.bins.len() {
                return if rem.iter().all(|&c| c == 0) { BigUint::one() } else { BigUint::zero() };
            }
            let key = (bin, rem);
            if let Some(v) = self.memo.get(&key) {
                return v.clone();
            }
            let rem = key.1.clone();
            let active: Vec<usize> = (0..rem.len()).filter(|&g| rem[g] > 0).collect();
            let suffix = M::build(self, &active, &rem);
            let mut fills = Vec::new();
            let mut take = vec![0u32; rem.len()];
            let target = self.bins[bin].clone();
            self.fill(&active, &suffix, 0, &target, &rem, &mut take, BigUint::one(), &mut fills);
            let mut total = BigUint::zero();
            for (next, weight) in fills {
                let sub = self.count::<M>(bin + 1, next);
                if !sub.is_zero() {
                    total += weight * sub;
                }
            }
            self.memo.insert(key, total.clone());
            total
        }

        /// Collects every way to fill `residual` from the active groups
        /// `active[pos..]`, as (remaining counts, number of item choices).
        #[allow(clippy::too_many_arguments)]
        fn fill<S: Suffix<W>>(
            &self,
            active: &[usize],
            suffix: &[S],
            pos: usize,
            residual: &W,
            rem: &[u32],
            take: &mut Vec<u32>,
            weight: BigUint,
            out: &mut Vec<(Vec<u32>, BigUint)>,
        ) {
            if pos == active.len() {
                let next: Vec<u32> = rem.iter().zip(take.iter()).map(|(r, t)| r - t).collect();
                out.push((next, weight));
                return;
            }
            let g = active[pos];
            for n in 0..=rem[g] {
                let r = residual.minus(&self.values[g], n);
                if !suffix[pos + 1].feasible(&r) {
                    continue;
                }
                take[g] = n;
                let w = &weight * &self.binom[rem[g] as usize][n as usize];
                self.fill(active, suffix, pos + 1, &r, rem, take, w, out);
            }
            take[g] = 0;
        }
    }

    fn binomials(n: usize) -> Vec<Vec<BigUint>> {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut row = vec![BigUint::one(); i + 1];
            for j in 1..i {
                row[j] = &rows[i - 1][j - 1] + &rows[i - 1][j];
            }
            rows.push(row);
        }
        rows
    }

    pub(crate) fn count(items: &[BigInt], skip: &[usize], bins: &[BigInt], radix: Option<&BigUint>) -> BigUint {
        if bins.iter().any(|b| b.is_negative()) {
            return BigUint::zero();
        }
        let kept: Vec<BigInt> =
            items.iter().enumerate().filter(|(i, _)| !skip.contains(i)).map(|(_, v)| v.clone()).collect();
        if kept.iter().sum::<BigInt>() != bins.iter().sum::<BigInt>() {
            return BigUint::zero();
        }
        let mut groups: Vec<(BigInt, u32)> = Vec::new();
        let mut sorted = kept;
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        for v in sorted {
            match groups.last_mut() {
                Some((last, c)) if *last == v => *c += 1,
                _ => groups.push((v, 1)),
            }
        }
        let mut bins: Vec<BigInt> = bins.iter().filter(|b| !b.is_zero()).cloned().collect();
        bins.sort_unstable_by(|a, b| b.cmp(a));
        let counts: Vec<u32> = groups.iter().map(|(_, c)| *c).collect();
        let binom = binomials(counts.iter().copied().max().unwrap_or(0) as usize);
        let sizes: Vec<BigInt> = groups.iter().map(|(v, _)| v.clone()).collect();
        if let Some((digits, bin_digits, r)) = radix.and_then(|r| to_digits(&groups, &bins, r)) {
            let mut s = Search { values: digits, sizes, bins: bin_digits, radix: r, binom, memo: HashMap::new() };
            return s.count::<DigitMode>(0, counts);
        }
        let mut s = Search { values: sizes.clone(), sizes, bins, radix: 0, binom, memo: HashMap::new() };
        s.count::<BigMode>(0, counts)
    }
}

#[allow(unused_imports)]
pub(crate) use memo::Context as CountContext;
