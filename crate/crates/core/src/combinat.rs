//! Partitions, compositions, permutations and class-size arithmetic.
//!
//! Every part and entry is an arbitrary-precision integer. On the wire both
//! [`Partition`] and [`Composition`] are JSON arrays of decimal strings.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An integer partition: weakly decreasing positive parts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<BigUint>,
}

impl Partition {
    /// Builds a partition, rejecting zero parts and increasing steps.
    pub fn new(parts: Vec<BigUint>) -> Result<Self> {
        if let Some(p) = parts.iter().find(|p| p.is_zero()) {
            return Err(Error::InvalidValue(format!("partition part {p} is not positive")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidValue("partition parts must be weakly decreasing".into()));
        }
        Ok(Partition { parts })
    }

    pub fn from_small(parts: &[usize]) -> Result<Self> {
        Self::new(parts.iter().map(|&p| BigUint::from(p)).collect())
    }

    /// Sorts the given positive values into a partition.
    pub fn from_unsorted(mut parts: Vec<BigUint>) -> Result<Self> {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(parts)
    }

    /// Interprets a composition as a partition after sorting; entries must be
    /// positive. Zero entries are dropped.
    pub fn from_composition(c: &Composition) -> Result<Self> {
        let mut parts = Vec::with_capacity(c.len());
        for e in c.entries() {
            if e.is_negative() {
                return Err(Error::InvalidValue(format!("negative entry {e} in partition")));
            }
            if !e.is_zero() {
                parts.push(e.magnitude().clone());
            }
        }
        Self::from_unsorted(parts)
    }

    pub fn parts(&self) -> &[BigUint] {
        &self.parts
    }

    /// Number of parts, ℓ(λ).
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// |λ|.
    pub fn size(&self) -> BigUint {
        self.parts.iter().sum()
    }

    /// The parts as machine integers, if they all fit.
    pub fn to_small(&self) -> Option<Vec<usize>> {
        self.parts.iter().map(|p| p.to_usize()).collect()
    }

    pub fn to_composition(&self) -> Composition {
        Composition::new(self.parts.iter().map(|p| BigInt::from(p.clone())).collect())
    }

    /// Multiplicity of each distinct part value.
    pub fn multiplicities(&self) -> BTreeMap<BigUint, usize> {
        let mut m = BTreeMap::new();
        for p in &self.parts {
            *m.entry(p.clone()).or_insert(0) += 1;
        }
        m
    }

    /// The conjugate partition. Only defined for machine-sized parts.
    pub fn conjugate(&self) -> Option<Partition> {
        let small = self.to_small()?;
        let first = small.first().copied().unwrap_or(0);
        let conj: Vec<usize> = (1..=first)
            .map(|c| small.iter().take_while(|&&r| r >= c).count())
            .collect();
        Partition::from_small(&conj).ok()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, self.parts.iter())
    }
}

/// A finite sequence of integers. Negative and zero entries are allowed;
/// each consumer states its own domain.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    entries: Vec<BigInt>,
}

impl Composition {
    pub fn new(entries: Vec<BigInt>) -> Self {
        Composition { entries }
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        Composition::new(entries.iter().map(|&e| BigInt::from(e)).collect())
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> BigInt {
        self.entries.iter().sum()
    }

    pub fn all_positive(&self) -> bool {
        self.entries.iter().all(|e| e.is_positive())
    }

    pub fn all_nonnegative(&self) -> bool {
        self.entries.iter().all(|e| !e.is_negative())
    }

    /// Multiplies every entry by `factor`.
    pub fn scale(&self, factor: &BigInt) -> Composition {
        Composition::new(self.entries.iter().map(|e| e * factor).collect())
    }

    /// Adds `delta` to entry `index` (0-based), i.e. `self + delta·e_{index+1}`.
    pub fn add_basis(&self, index: usize, delta: &BigInt) -> Composition {
        let mut entries = self.entries.clone();
        entries[index] += delta;
        Composition::new(entries)
    }

    /// Entries with zeros removed.
    pub fn without_zeros(&self) -> Composition {
        Composition::new(self.entries.iter().filter(|e| !e.is_zero()).cloned().collect())
    }

    /// Concatenation `(self, other)`.
    pub fn concat(&self, other: &Composition) -> Composition {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Composition::new(entries)
    }

    pub fn to_small(&self) -> Option<Vec<i64>> {
        self.entries.iter().map(|e| e.to_i64()).collect()
    }

    /// Parses a comma- or whitespace-separated list such as `3,2,1`.
    /// Surrounding brackets or parentheses are ignored.
    pub fn parse_list(s: &str) -> Result<Composition> {
        let trimmed = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let mut entries = Vec::new();
        for tok in trimmed.split(|c: char| c == ',' || c.is_whitespace()) {
            let tok = tok.trim().trim_matches('"');
            if tok.is_empty() {
                continue;
            }
            let v: BigInt = tok
                .parse()
                .map_err(|_| Error::InvalidValue(format!("not an integer: {tok:?}")))?;
            entries.push(v);
        }
        Ok(Composition::new(entries))
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, self.entries.iter())
    }
}

fn write_tuple<T: fmt::Display>(f: &mut fmt::Formatter<'_>, it: impl Iterator<Item = T>) -> fmt::Result {
    f.write_str("(")?;
    for (i, x) in it.enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str(")")
}

/// Entries of `a` in weakly decreasing order.
pub fn sort_desc(a: &Composition) -> Composition {
    let mut entries = a.entries.clone();
    entries.sort_unstable_by(|x, y| y.cmp(x));
    Composition::new(entries)
}

/// A bijection on `{0, …, n-1}`, stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// From 0-based images.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidValue(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// From 1-based images, e.g. `[2, 1, 4, 3]`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::InvalidValue("1-based images cannot contain 0".into()));
        }
        Self::from_images(images.iter().map(|&i| i - 1).collect())
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    /// Cycle lengths in order of first appearance.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
                len += 1;
            }
            out.push(len);
        }
        out
    }

    /// +1 or -1.
    pub fn sign(&self) -> i32 {
        let even = self.cycle_lengths().iter().filter(|&&l| l % 2 == 0).count();
        if even % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// A fixed permutation of the given cycle type: consecutive blocks rotated.
    pub fn with_cycle_type(cycle_lengths: &[usize]) -> Permutation {
        let n: usize = cycle_lengths.iter().sum();
        let mut images = Vec::with_capacity(n);
        let mut start = 0;
        for &len in cycle_lengths {
            for k in 0..len {
                images.push(start + (k + 1) % len);
            }
            start += len;
        }
        Permutation { images }
    }
}

/// The cycle type of `p`, as a partition of its degree.
pub fn cycle_type(p: &Permutation) -> Partition {
    let mut lens = p.cycle_lengths();
    lens.sort_unstable_by(|a, b| b.cmp(a));
    Partition::from_small(&lens).expect("cycle lengths are positive")
}

/// `∏ i^{m_i} · m_i!` over the part multiplicities of `mu`; the conjugacy
/// class of type `mu` in S_n has `n! / z_factor(mu)` elements.
pub fn z_factor(mu: &Partition) -> BigUint {
    let mut z = BigUint::one();
    for (part, m) in mu.multiplicities() {
        z *= num_traits::pow(part, m);
        z *= factorial(m);
    }
    z
}

pub fn factorial(n: usize) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// All partitions of `n` in reverse lexicographic order:
/// `(4), (3,1), (2,2), (2,1,1), (1,1,1,1)`.
pub fn partitions_of(n: usize) -> Vec<Partition> {
    small_partitions(n)
        .into_iter()
        .map(|p| Partition::from_small(&p).expect("valid by construction"))
        .collect()
}

/// Machine-integer version of [`partitions_of`], same order.
pub fn small_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            go(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Calls `f` on every permutation of `{0, …, n-1}` in lexicographic order.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        f(&p);
        // next_permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("pivot exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

// --- serde: arrays of decimal strings ---------------------------------------

#[derive(Deserialize)]
#[serde(untagged)]
enum WireInt {
    Str(String),
    Num(serde_json::Number),
}

impl WireInt {
    fn into_bigint<E: serde::de::Error>(self) -> std::result::Result<BigInt, E> {
        let s = match self {
            WireInt::Str(s) => s,
            WireInt::Num(n) => n.to_string(),
        };
        s.trim()
            .parse()
            .map_err(|_| E::custom(format!("not a decimal integer: {s:?}")))
    }
}

pub(crate) fn ser_bigints<S: Serializer, T: fmt::Display>(
    v: &[T],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

pub(crate) fn de_bigints<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigInt>, D::Error> {
    Vec::<WireInt>::deserialize(d)?
        .into_iter()
        .map(WireInt::into_bigint)
        .collect()
}

pub(crate) fn ser_bigint<S: Serializer, T: fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub(crate) fn de_bigint<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
    WireInt::deserialize(d)?.into_bigint()
}

pub(crate) fn de_biguint<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
    let v = de_bigint(d)?;
    v.to_biguint()
        .ok_or_else(|| serde::de::Error::custom(format!("expected nonnegative integer, got {v}")))
}

pub(crate) fn ser_opt_bigint<S: Serializer, T: fmt::Display>(
    v: &Option<T>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&x.to_string()),
        None => s.serialize_none(),
    }
}

pub(crate) fn de_opt_bigint<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<BigInt>, D::Error> {
    Option::<WireInt>::deserialize(d)?.map(WireInt::into_bigint).transpose()
}

impl Serialize for Composition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ser_bigints(&self.entries, s)
    }
}

impl<'de> Deserialize<'de> for Composition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Composition::new(de_bigints(d)?))
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ser_bigints(&self.parts, s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = de_bigints(d)?;
        let parts = entries
            .into_iter()
            .map(|e| {
                e.to_biguint()
                    .ok_or_else(|| serde::de::Error::custom(format!("negative partition part {e}")))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Partition::new(parts).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(v: &[i64]) -> Composition {
        Composition::from_i64s(v)
    }

    #[test]
    fn sort_desc_examples() {
        assert_eq!(sort_desc(&comp(&[1, 3, 2])), comp(&[3, 2, 1]));
        assert_eq!(sort_desc(&comp(&[])), comp(&[]));
        assert_eq!(sort_desc(&comp(&[5, 5, 5])), comp(&[5, 5, 5]));
    }

    #[test]
    fn cycle_type_examples() {
        let id = Permutation::identity(4);
        assert_eq!(cycle_type(&id), Partition::from_small(&[1, 1, 1, 1]).unwrap());
        let p = Permutation::from_one_based(&[2, 1, 4, 3]).unwrap();
        assert_eq!(cycle_type(&p), Partition::from_small(&[2, 2]).unwrap());
        let p = Permutation::from_one_based(&[2, 3, 1]).unwrap();
        assert_eq!(cycle_type(&p), Partition::from_small(&[3]).unwrap());
    }

    #[test]
    fn z_factor_examples() {
        let z = |v: &[usize]| z_factor(&Partition::from_small(v).unwrap());
        assert_eq!(z(&[1, 1, 1, 1]), BigUint::from(24u32));
        assert_eq!(z(&[2, 2]), BigUint::from(8u32));
        assert_eq!(z(&[3]), BigUint::from(3u32));
        assert_eq!(z(&[]), BigUint::one());
    }

    #[test]
    fn class_of_22_has_three_elements() {
        let target = Partition::from_small(&[2, 2]).unwrap();
        let mut count = 0u32;
        for_each_permutation(4, |p| {
            let p = Permutation::from_images(p.to_vec()).unwrap();
            if cycle_type(&p) == target {
                count += 1;
            }
        });
        assert_eq!(count, 3);
        assert_eq!(factorial(4) / z_factor(&target), BigUint::from(3u32));
    }

    #[test]
    fn partition_counts_and_order() {
        assert_eq!(partitions_of(0), vec![Partition::default()]);
        assert_eq!(partitions_of(4).len(), 5);
        assert_eq!(partitions_of(8).len(), 22);
        let four: Vec<String> = partitions_of(4).iter().map(|p| p.to_string()).collect();
        assert_eq!(four, ["(4)", "(3,1)", "(2,2)", "(2,1,1)", "(1,1,1,1)"]);
    }

    #[test]
    fn class_sizes_sum_to_group_order() {
        for n in 0..=10 {
            let total: BigUint = partitions_of(n).iter().map(|mu| factorial(n) / z_factor(mu)).sum();
            assert_eq!(total, factorial(n), "n = {n}");
        }
    }

    #[test]
    fn partition_rejects_bad_input() {
        assert!(Partition::from_small(&[1, 2]).is_err());
        assert!(Partition::from_small(&[2, 0]).is_err());
        assert!(Permutation::from_images(vec![0, 0]).is_err());
    }

    #[test]
    fn conjugate_and_json() {
        let p = Partition::from_small(&[3, 1]).unwrap();
        assert_eq!(p.conjugate().unwrap(), Partition::from_small(&[2, 1, 1]).unwrap());
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"["3","1"]"#);
        let back: Partition = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        let big = Composition::parse_list("(-7, 123456789012345678901234567890, 0)").unwrap();
        let json = serde_json::to_string(&big).unwrap();
        assert_eq!(json, r#"["-7","123456789012345678901234567890","0"]"#);
        assert_eq!(serde_json::from_str::<Composition>(&json).unwrap(), big);
        assert!(serde_json::from_str::<Partition>(r#"["1","2"]"#).is_err());
    }

    #[test]
    fn permutation_sign() {
        assert_eq!(Permutation::from_one_based(&[2, 1, 3]).unwrap().sign(), -1);
        assert_eq!(Permutation::from_one_based(&[2, 3, 1]).unwrap().sign(), 1);
        assert_eq!(Permutation::with_cycle_type(&[3, 2]).cycle_lengths(), vec![3, 2]);
    }
}
