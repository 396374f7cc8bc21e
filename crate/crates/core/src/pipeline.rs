//! From matching counts to character values.
//!
//! [`build_gadget`] turns a join `(J, H, H')` into a set-partition instance
//! whose solutions are, up to the factor `δ`, the perfect matchings of `J`.
//! [`modify_gadget`] adds small items so that two bin vectors `d̄`, `d̄'`
//! select the matchings through `H` or through `H'`.
//! [`char_instance_diff`] then produces `(λ, α)` with
//! `χ^λ(α) = P(c, d̄) − P(c, d̄')`, and [`reduce_matching_pair`] /
//! [`reduce_pair`] compose the whole chain.
//!
//! Gadget sizes are written in radix `r` with the digit notation
//! `[a_1, a_2, …] = a_1·r + a_2·r² + …` (no constant term).

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::characters::{char_jt_with, CharQuery, JtOptions, JT_DEFAULT_MAX_LEN};
use crate::combinat::{
    de_bigint, de_biguint, de_opt_bigint, factorial, ser_bigint, ser_opt_bigint, sort_desc, Composition, Partition,
};
use crate::error::{Error, Result};
use crate::matchings::{join, Hypergraph3, JoinResult};
use crate::sat::{one_in_three_to_3dm, to_one_in_three, tseytin, Circuit, Cnf, OneInThree};
use crate::setpartition::{count_with, CountOptions, SetPartitionInstance};

/// What a gadget item stands for. Vertices are `(i, j) ∈ Z_u × Z_4`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum Role {
    RealVertex { i: usize, j: usize },
    DummyVertex { i: usize, j: usize },
    Hyperedge { edge: [usize; 4] },
    Small { value: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetItem {
    #[serde(flatten)]
    pub role: Role,
    #[serde(serialize_with = "ser_bigint", deserialize_with = "de_bigint")]
    pub size: BigInt,
}

/// The set-partition gadget of a join.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetInstance {
    pub items: Vec<GadgetItem>,
    pub bins: Composition,
    #[serde(serialize_with = "ser_bigint", deserialize_with = "de_biguint")]
    pub r: BigUint,
    pub u: usize,
    #[serde(serialize_with = "ser_bigint", deserialize_with = "de_biguint")]
    pub delta: BigUint,
    /// Indices of the special vertex item `(u, 4)` and of the items of `H`
    /// and `H'`.
    pub special: [usize; 3],
    /// `mult[i-1][j-1]`: number of edges of `J` with coordinate `j` equal to `i`.
    pub mult: Vec<[usize; 4]>,
}

/// `[d_1, d_2, …] = d_1·r + d_2·r² + …`.
pub fn encode_digits(r: &BigInt, digits: &[i64]) -> BigInt {
    let mut acc = BigInt::zero();
    for &d in digits.iter().rev() {
        acc = acc * r + d;
    }
    acc * r
}

/// `r = 16·(max(4, u)·5·|J| + 1)`.
pub fn gadget_radix(u: usize, edges: usize) -> BigUint {
    BigUint::from(16u32) * (BigUint::from(u.max(4) * 5 * edges) + 1u32)
}

fn vertex_digits(i: usize, j: usize, last: i64) -> Vec<i64> {
    let mut d = vec![0i64; 10];
    d[j - 1] = 1;
    d[5 + j - 1] = i as i64;
    d[9] = last;
    d
}

/// `β(j)`: last digit of a dummy vertex item.
fn beta(j: usize) -> i64 {
    if j <= 3 {
        4
    } else {
        0
    }
}

pub fn build_gadget(jr: &JoinResult) -> Result<GadgetInstance> {
    let u = jr.u();
    let n = jr.j.len();
    let mut mult = vec![[0usize; 4]; u];
    for (i, row) in mult.iter_mut().enumerate() {
        for (j, m) in row.iter_mut().enumerate() {
            *m = jr.j.mult(i + 1, j);
            if *m == 0 {
                return Err(Error::Coverage(format!("vertex ({}, {}) of J lies on no edge", i + 1, j + 1)));
            }
        }
    }
    let r = gadget_radix(u, n);
    let rb = BigInt::from(r.clone());
    let mut items = Vec::with_capacity(5 * n);
    for i in 1..=u {
        for j in 1..=4 {
            let size = encode_digits(&rb, &vertex_digits(i, j, 3));
            items.push(GadgetItem { role: Role::RealVertex { i, j }, size });
        }
    }
    for i in 1..=u {
        for j in 1..=4 {
            let size = encode_digits(&rb, &vertex_digits(i, j, beta(j)));
            for _ in 1..mult[i - 1][j - 1] {
                items.push(GadgetItem { role: Role::DummyVertex { i, j }, size: size.clone() });
            }
        }
    }
    let mut special = [(u - 1) * 4 + 3, 0, 0];
    for e in jr.j.edges() {
        let ui = u as i64;
        let digits = [0, 0, 0, 0, 1, ui - e[0] as i64, ui - e[1] as i64, ui - e[2] as i64, ui - e[3] as i64, 0];
        if *e == jr.h {
            special[1] = items.len();
        }
        if *e == jr.h_prime {
            special[2] = items.len();
        }
        items.push(GadgetItem { role: Role::Hyperedge { edge: *e }, size: encode_digits(&rb, &digits) });
    }
    let ui = u as i64;
    let b1 = encode_digits(&rb, &[1, 1, 1, 1, 1, ui, ui, ui, ui, 12]);
    let mut delta = factorial(n);
    for row in &mult {
        for &m in row {
            delta *= factorial(m - 1);
        }
    }
    Ok(GadgetInstance { items, bins: Composition::new(vec![b1; n]), r, u, delta, special, mult })
}

impl GadgetInstance {
    pub fn item_sizes(&self) -> Composition {
        Composition::new(self.items.iter().map(|it| it.size.clone()).collect())
    }

    pub fn set_partition_instance(&self) -> SetPartitionInstance {
        SetPartitionInstance::new(self.item_sizes(), self.bins.clone()).expect("gadget items are positive")
    }

    /// Memo engine with the gadget radix as digit hint.
    pub fn count_options(&self) -> CountOptions {
        CountOptions::with_radix(self.r.clone())
    }

    /// Re-checks the structural invariants (for instances read from disk).
    pub fn validate(&self) -> Result<()> {
        let n = self.bins.len();
        let bad = |msg: String| Err(Error::InvalidValue(msg));
        if self.r != gadget_radix(self.u, n) {
            return bad(format!("radix {} does not match u = {} and |J| = {n}", self.r, self.u));
        }
        if self.items.len() != 5 * n {
            return bad(format!("{} items, expected 5·|J| = {}", self.items.len(), 5 * n));
        }
        if self.item_sizes().sum() != self.bins.sum() {
            return bad("item and bin totals differ".into());
        }
        if self.mult.len() != self.u || self.mult.iter().flatten().any(|&m| m == 0) {
            return Err(Error::Coverage("some mult(i, j) is zero".into()));
        }
        let mut delta = factorial(n);
        for &m in self.mult.iter().flatten() {
            delta *= factorial(m - 1);
        }
        if delta != self.delta {
            return bad(format!("δ = {} but the multiplicities give {delta}", self.delta));
        }
        if self.special.iter().any(|&s| s >= self.items.len()) {
            return bad("special index out of range".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: GadgetInstance = serde_json::from_str(text)?;
        g.validate()?;
        Ok(g)
    }
}

/// The modified gadget: `c` and the bin vectors `d`, `d̄ = (2, 4, d…)`,
/// `d̄' = (1, 5, d…)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModifiedGadget {
    pub c: Composition,
    pub d: Composition,
    pub d_bar: Composition,
    pub d_bar_prime: Composition,
    /// Gadget item index at each position of the reordered item list.
    pub order: Vec<usize>,
    /// Role of every entry of `c`.
    pub roles: Vec<Role>,
    #[serde(serialize_with = "ser_bigint", deserialize_with = "de_biguint")]
    pub r: BigUint,
}

impl ModifiedGadget {
    pub fn count_options(&self) -> CountOptions {
        CountOptions::with_radix(self.r.clone())
    }

    /// `P(c, d̄)`.
    pub fn count_bar(&self) -> BigUint {
        let inst = SetPartitionInstance::new(self.c.clone(), self.d_bar.clone()).expect("c is positive");
        count_with(&inst, &self.count_options())
    }

    /// `P(c, d̄')`.
    pub fn count_bar_prime(&self) -> BigUint {
        let inst = SetPartitionInstance::new(self.c.clone(), self.d_bar_prime.clone()).expect("c is positive");
        count_with(&inst, &self.count_options())
    }
}

/// Moves the special items to the front and applies
/// `c = (1, 2, 4, 5, a_1 + 1, a_2 − 5, a_3 − 2, a_4, …)`.
///
/// With bins `(2, 4, d…)` the small items 2 and 4 fill the first two bins
/// and the offsets force the special vertex item into a bin with `a_3`;
/// with `(1, 5, d…)` it goes with `a_2`. So `a_2` is the item of `H'` and
/// `a_3` the item of `H`, making `P(c, d̄)` count the matchings through `H`.
pub fn modify_gadget(g: &GadgetInstance) -> ModifiedGadget {
    let mut order: Vec<usize> = vec![g.special[0], g.special[2], g.special[1]];
    order.extend((0..g.items.len()).filter(|i| !g.special.contains(i)));
    let mut c: Vec<BigInt> = [1, 2, 4, 5].into_iter().map(BigInt::from).collect();
    let mut roles: Vec<Role> = [1, 2, 4, 5].into_iter().map(|value| Role::Small { value }).collect();
    for (pos, &idx) in order.iter().enumerate() {
        let offset = match pos {
            0 => 1,
            1 => -5,
            2 => -2,
            _ => 0,
        };
        c.push(&g.items[idx].size + offset);
        roles.push(g.items[idx].role.clone());
    }
    let d = g.bins.clone();
    let d_bar = Composition::from_i64s(&[2, 4]).concat(&d);
    let d_bar_prime = Composition::from_i64s(&[1, 5]).concat(&d);
    ModifiedGadget { c: Composition::new(c), d, d_bar, d_bar_prime, order, roles, r: g.r.clone() }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    #[default]
    Lemma,
    Difference,
    Parsimonious,
    Pipeline,
}

/// How a character instance was obtained.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub construction: Construction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_opt_bigint",
        deserialize_with = "de_opt_bigint"
    )]
    pub m: Option<BigInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Composition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Composition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Composition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Composition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_bar: Option<Composition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_bar_prime: Option<Composition>,
    /// Gadget item order used for `c`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item_order: Option<Vec<usize>>,
    /// Radix hint for counting, when the sizes come from a gadget.
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_opt_bigint",
        deserialize_with = "de_opt_bigint"
    )]
    pub radix: Option<BigInt>,
}

/// A character query together with its provenance and the overcount `δ`
/// (1 outside the gadget pipeline).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharInstance {
    pub lambda: Partition,
    pub alpha: Composition,
    #[serde(serialize_with = "ser_bigint", deserialize_with = "de_biguint")]
    pub delta: BigUint,
    pub derivation: Derivation,
}

impl CharInstance {
    pub fn query(&self) -> Result<CharQuery> {
        CharQuery::new(self.lambda.clone(), self.alpha.clone())
    }

    /// Options for [`char_jt_with`]: `ℓ(λ)` is always admitted and the
    /// recorded radix is used as digit hint.
    pub fn jt_options(&self) -> JtOptions {
        let radix = self.derivation.radix.as_ref().and_then(|r| r.to_biguint());
        JtOptions {
            max_len: self.lambda.len().max(JT_DEFAULT_MAX_LEN),
            count: CountOptions { radix, ..CountOptions::default() },
        }
    }

    /// `χ^λ(α)` through the Frobenius formula.
    pub fn evaluate(&self) -> Result<BigInt> {
        char_jt_with(&self.query()?, &self.jt_options())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ci: CharInstance = serde_json::from_str(text)?;
        ci.query()?;
        Ok(ci)
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidValue(msg()))
    }
}

fn require_sums(a: &Composition, b: &Composition) -> Result<()> {
    if a.sum() != b.sum() {
        return Err(Error::SizeMismatch { left: format!("|{a}| = {}", a.sum()), right: format!("|{b}| = {}", b.sum()) });
    }
    Ok(())
}

/// `p = ℓ(b) + 1`, `λ = sort(p·b)`, `α = p·a + e_1 − e_2`.
///
/// `a` needs at least two positive entries; zero entries of `b` count
/// towards `ℓ` but not towards `λ`.
pub fn char_instance_lemma(a: &Composition, b: &Composition) -> Result<CharInstance> {
    require(a.len() >= 2, || format!("a = {a} needs at least two parts"))?;
    require(a.all_positive(), || format!("a = {a} must be positive"))?;
    require(b.all_nonnegative() && !b.is_empty(), || format!("b = {b} must be nonempty and nonnegative"))?;
    require_sums(a, b)?;
    let ell = b.len();
    let p = ell + 1;
    let pb = BigInt::from(p);
    let lambda = Partition::from_composition(&b.scale(&pb))?;
    let alpha = a.scale(&pb).add_basis(0, &BigInt::one()).add_basis(1, &-BigInt::one());
    let derivation = Derivation {
        construction: Construction::Lemma,
        p: Some(p),
        ell: Some(ell),
        a: Some(a.clone()),
        b: Some(b.clone()),
        ..Derivation::default()
    };
    Ok(CharInstance { lambda, alpha, delta: BigUint::one(), derivation })
}

fn count(items: &Composition, bins: &Composition, opts: &CountOptions) -> BigInt {
    match SetPartitionInstance::new(items.clone(), bins.clone()) {
        Ok(inst) => BigInt::from(count_with(&inst, opts)),
        Err(_) => BigInt::zero(),
    }
}

/// Right-hand side of the two-sum identity for [`char_instance_lemma`]:
/// `Σ_i P(ā, b − (a_1+a_2)e_i) − Σ_{i<ℓ} P(ā, b − a_1 e_i − a_2 e_{i+1})`
/// with `ā = (a_3, a_4, …)`. Equals `χ^λ(α)` when `b` is weakly decreasing;
/// for other orders the second sum pairs the wrong bins.
pub fn lemma_rhs(a: &Composition, b: &Composition, opts: &CountOptions) -> BigInt {
    let (a1, a2) = (&a.entries()[0], &a.entries()[1]);
    let rest = Composition::new(a.entries()[2..].to_vec());
    let ell = b.len();
    let mut total = BigInt::zero();
    for i in 0..ell {
        total += count(&rest, &b.add_basis(i, &-(a1 + a2)), opts);
    }
    for i in 0..ell.saturating_sub(1) {
        total -= count(&rest, &b.add_basis(i, &-a1).add_basis(i + 1, &-a2), opts);
    }
    total
}

/// `m = max(c, d) + 4`, `a = (2, m, m − 3, c…)`, `b = (m + 4, m + 1, d…)`,
/// then [`char_instance_lemma`]; `χ^λ(α) = P(c, d̄) − P(c, d̄')`.
pub fn char_instance_diff(c: &Composition, d: &Composition) -> Result<CharInstance> {
    require(c.all_positive(), || format!("c = {c} must be positive"))?;
    require(d.all_nonnegative(), || format!("d = {d} must be nonnegative"))?;
    if c.sum() != d.sum() + 6 {
        return Err(Error::SizeMismatch {
            left: format!("|c| = {}", c.sum()),
            right: format!("|d| + 6 = {}", d.sum() + 6),
        });
    }
    let max: BigInt = c.entries().iter().chain(d.entries()).max().cloned().unwrap_or_default();
    let m: BigInt = max + 4;
    let a = Composition::new(vec![BigInt::from(2), m.clone(), &m - 3]).concat(c);
    let b = Composition::new(vec![&m + 4, &m + 1]).concat(d);
    let mut inst = char_instance_lemma(&a, &b)?;
    let dv = &mut inst.derivation;
    dv.construction = Construction::Difference;
    dv.m = Some(m);
    dv.c = Some(c.clone());
    dv.d = Some(d.clone());
    dv.d_bar = Some(Composition::from_i64s(&[2, 4]).concat(d));
    dv.d_bar_prime = Some(Composition::from_i64s(&[1, 5]).concat(d));
    Ok(inst)
}

/// `P(c, (2, 4, d…)) − P(c, (1, 5, d…))`.
pub fn diff_rhs(c: &Composition, d: &Composition, opts: &CountOptions) -> BigInt {
    count(c, &Composition::from_i64s(&[2, 4]).concat(d), opts) - count(c, &Composition::from_i64s(&[1, 5]).concat(d), opts)
}

/// `p = ℓ(b) + 1`, `λ = p·sort(b)`, `α = p·a`; then `χ^λ(α) = P(a, b)`.
pub fn parsimonious_encode(a: &Composition, b: &Composition) -> Result<CharInstance> {
    require(a.all_positive() && !a.is_empty(), || format!("a = {a} must be nonempty and positive"))?;
    require(b.all_positive() && !b.is_empty(), || format!("b = {b} must be nonempty and positive"))?;
    require_sums(a, b)?;
    let ell = b.len();
    let p = ell + 1;
    let pb = BigInt::from(p);
    let lambda = Partition::from_composition(&sort_desc(b).scale(&pb))?;
    let alpha = a.scale(&pb);
    let derivation = Derivation {
        construction: Construction::Parsimonious,
        p: Some(p),
        ell: Some(ell),
        a: Some(a.clone()),
        b: Some(b.clone()),
        ..Derivation::default()
    };
    Ok(CharInstance { lambda, alpha, delta: BigUint::one(), derivation })
}

/// Every intermediate artifact of the reduction of a pair of instances.
/// The SAT-side fields are present only when the chain starts there.
#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub circuits: Option<(Circuit, Circuit)>,
    pub cnf: Option<(Cnf, Cnf)>,
    pub oit: Option<(OneInThree, OneInThree)>,
    pub e: Hypergraph3,
    pub e_prime: Hypergraph3,
    pub join: JoinResult,
    pub gadget: GadgetInstance,
    pub modified: ModifiedGadget,
    pub char_instance: CharInstance,
    pub delta: BigUint,
}

impl PipelineResult {
    pub fn to_json(&self) -> Result<serde_json::Value> {
        let pair = |a: String, b: String| json!([a, b]);
        Ok(json!({
            "circuits": self.circuits.as_ref().map(|(a, b)| pair(a.to_text(), b.to_text())),
            "cnf": self.cnf.as_ref().map(|(a, b)| pair(a.to_dimacs(), b.to_dimacs())),
            "oit": self.oit.as_ref().map(|(a, b)| pair(a.to_dimacs(), b.to_dimacs())),
            "e": self.e.to_text("k"),
            "e_prime": self.e_prime.to_text("k"),
            "join": self.join.to_text(),
            "gadget": serde_json::to_value(&self.gadget)?,
            "modified": serde_json::to_value(&self.modified)?,
            "char_instance": serde_json::to_value(&self.char_instance)?,
            "delta": self.delta.to_string(),
        }))
    }
}

/// Reduction from the matching stage: `χ^λ(α) = δ·(#3DM(E) − #3DM(E'))`.
///
/// Fails with a coverage error when the join leaves some vertex of
/// `Z_u × Z_4` without an edge.
pub fn reduce_matching_pair(e: &Hypergraph3, e_prime: &Hypergraph3) -> Result<PipelineResult> {
    let jr = join(e, e_prime);
    let gadget = build_gadget(&jr)?;
    let modified = modify_gadget(&gadget);
    let mut ci = char_instance_diff(&modified.c, &modified.d)?;
    ci.delta = gadget.delta.clone();
    ci.derivation.construction = Construction::Pipeline;
    ci.derivation.item_order = Some(modified.order.clone());
    ci.derivation.radix = Some(BigInt::from(gadget.r.clone()));
    Ok(PipelineResult {
        circuits: None,
        cnf: None,
        oit: None,
        e: e.clone(),
        e_prime: e_prime.clone(),
        join: jr,
        delta: gadget.delta.clone(),
        gadget,
        modified,
        char_instance: ci,
    })
}

/// Reduction from the CNF stage.
pub fn reduce_cnf_pair(f1: &Cnf, f2: &Cnf) -> Result<PipelineResult> {
    let (o1, o2) = (to_one_in_three(f1), to_one_in_three(f2));
    let mut res = reduce_matching_pair(&one_in_three_to_3dm(&o1), &one_in_three_to_3dm(&o2))?;
    res.cnf = Some((f1.clone(), f2.clone()));
    res.oit = Some((o1, o2));
    Ok(res)
}

/// Full reduction: `χ^λ(α) = δ·(#SAT(c1) − #SAT(c2))`.
pub fn reduce_pair(c1: &Circuit, c2: &Circuit) -> Result<PipelineResult> {
    let mut res = reduce_cnf_pair(&tseytin(c1), &tseytin(c2))?;
    res.circuits = Some((c1.clone(), c2.clone()));
    Ok(res)
}

/// `true` when the value is consistent with `δ·(n1 − n2)`, including its sign.
pub fn pipeline_value_matches(chi: &BigInt, delta: &BigUint, n1: &BigUint, n2: &BigUint) -> bool {
    let expected = BigInt::from(delta.clone()) * (BigInt::from(n1.clone()) - BigInt::from(n2.clone()));
    *chi == expected && chi.signum() == expected.signum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{char_jt, char_mn};
    use crate::matchings::Hypergraph;
    use crate::setpartition::count_with_fixed_pair_opts;

    fn comp(v: &[i64]) -> Composition {
        Composition::from_i64s(v)
    }

    fn tiny_join() -> JoinResult {
        let e = Hypergraph::new(1, vec![[1, 1, 1]]).unwrap();
        join(&e, &e)
    }

    #[test]
    fn digit_encoder() {
        let r = BigInt::from(10);
        assert_eq!(encode_digits(&r, &[1, 2, 3]), BigInt::from(3210));
        assert_eq!(encode_digits(&r, &[]), BigInt::zero());
    }

    #[test]
    fn tiny_gadget_shape() {
        let g = build_gadget(&tiny_join()).unwrap();
        assert_eq!(g.r, BigUint::from(1296u32));
        assert_eq!(g.items.len(), 20);
        assert_eq!(g.bins.len(), 4);
        assert!(g.mult.iter().flatten().all(|&m| m == 2));
        assert_eq!(g.delta, BigUint::from(24u32));
        let r = BigInt::from(1296);
        assert_eq!(g.items[g.special[0]].size, encode_digits(&r, &[0, 0, 0, 1, 0, 0, 0, 0, 2, 3]));
        assert_eq!(g.items[g.special[1]].role, Role::Hyperedge { edge: [2, 2, 2, 2] });
        assert_eq!(g.items[g.special[2]].role, Role::Hyperedge { edge: [1, 2, 2, 2] });
        g.validate().unwrap();
    }

    #[test]
    fn tiny_gadget_counts() {
        let jr = tiny_join();
        let g = build_gadget(&jr).unwrap();
        let inst = g.set_partition_instance();
        let opts = g.count_options();
        let delta = BigUint::from(24u32);
        let p0 = count_with_fixed_pair_opts(&inst, g.special[0], g.special[1], true, &opts).unwrap();
        let p1 = count_with_fixed_pair_opts(&inst, g.special[0], g.special[2], true, &opts).unwrap();
        assert_eq!(&p0 / &delta, jr.without_h_prime().count_matchings().unwrap());
        assert_eq!(&p1 / &delta, jr.without_h().count_matchings().unwrap());
        assert_eq!(count_with(&inst, &opts), p0 + p1);

        let m = modify_gadget(&g);
        assert_eq!(m.c.sum(), m.d.sum() + 6);
        assert_eq!(m.count_bar() / &delta, BigUint::one());
        assert_eq!(m.count_bar_prime() / &delta, BigUint::one());
    }

    #[test]
    fn coverage_error() {
        let e = Hypergraph::new(2, vec![[1, 1, 1]]).unwrap();
        let empty = Hypergraph::new(1, vec![]).unwrap();
        assert!(matches!(build_gadget(&join(&e, &empty)), Err(Error::Coverage(_))));
        assert!(matches!(reduce_matching_pair(&e, &empty), Err(Error::Coverage(_))));
    }

    #[test]
    fn lemma_examples() {
        let ci = char_instance_lemma(&comp(&[1, 1]), &comp(&[1, 1])).unwrap();
        assert_eq!(ci.lambda, Partition::from_small(&[3, 3]).unwrap());
        assert_eq!(ci.alpha, comp(&[4, 2]));
        assert_eq!(char_mn(&ci.query().unwrap()).unwrap(), BigInt::from(-1));
        assert_eq!(lemma_rhs(&comp(&[1, 1]), &comp(&[1, 1]), &CountOptions::default()), BigInt::from(-1));

        let ci = char_instance_lemma(&comp(&[2, 1]), &comp(&[3])).unwrap();
        assert_eq!(ci.lambda, Partition::from_small(&[6]).unwrap());
        assert_eq!(ci.alpha, comp(&[5, 1]));
        assert_eq!(lemma_rhs(&comp(&[2, 1]), &comp(&[3]), &CountOptions::default()), BigInt::one());

        assert!(char_instance_lemma(&comp(&[1]), &comp(&[1])).is_err());
        assert!(matches!(char_instance_lemma(&comp(&[1, 1]), &comp(&[3])), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn diff_examples() {
        let ci = char_instance_diff(&comp(&[2, 4]), &comp(&[])).unwrap();
        assert_eq!(ci.derivation.m, Some(BigInt::from(8)));
        assert_eq!(ci.derivation.p, Some(3));
        assert_eq!(ci.lambda, Partition::from_small(&[36, 27]).unwrap());
        assert_eq!(ci.alpha, comp(&[7, 23, 15, 6, 12]));
        assert_eq!(char_jt(&ci.query().unwrap()).unwrap(), BigInt::one());

        for (c, want) in [(vec![3, 3], 0), (vec![1, 5], -1), (vec![2, 4], 1)] {
            let ci = char_instance_diff(&comp(&c), &comp(&[])).unwrap();
            let chi = char_jt(&ci.query().unwrap()).unwrap();
            assert_eq!(chi, BigInt::from(want));
            assert_eq!(diff_rhs(&comp(&c), &comp(&[]), &CountOptions::default()), chi);
        }
        assert!(matches!(char_instance_diff(&comp(&[1, 1]), &comp(&[])), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn parsimonious_examples() {
        for (a, b, lambda, alpha, want) in [
            (vec![1, 1], vec![2], vec![4], vec![2, 2], 1),
            (vec![1, 1], vec![1, 1], vec![3, 3], vec![3, 3], 2),
            (vec![1, 1, 1], vec![2, 1], vec![6, 3], vec![3, 3, 3], 3),
        ] {
            let ci = parsimonious_encode(&comp(&a), &comp(&b)).unwrap();
            assert_eq!(ci.lambda, Partition::from_small(&lambda).unwrap());
            assert_eq!(ci.alpha, comp(&alpha));
            assert_eq!(char_mn(&ci.query().unwrap()).unwrap(), BigInt::from(want));
        }
    }

    #[test]
    fn json_roundtrips() {
        let ci = char_instance_diff(&comp(&[2, 4]), &comp(&[])).unwrap();
        let text = ci.to_json().unwrap();
        assert!(text.contains("\"lambda\": [\n    \"36\""));
        assert_eq!(CharInstance::from_json(&text).unwrap(), ci);

        let g = build_gadget(&tiny_join()).unwrap();
        let text = g.to_json().unwrap();
        assert!(text.contains("\"role\": \"dummy_vertex\""));
        assert_eq!(GadgetInstance::from_json(&text).unwrap(), g);
    }

    #[test]
    fn end_to_end_tiny() {
        let one = Hypergraph::new(1, vec![[1, 1, 1]]).unwrap();
        let none = Hypergraph::new(1, vec![]).unwrap();
        for (e, ep, sign) in [(&one, &none, 1), (&one, &one, 0), (&none, &one, -1)] {
            let res = reduce_matching_pair(e, ep).unwrap();
            let chi = res.char_instance.evaluate().unwrap();
            assert_eq!(chi, BigInt::from(res.delta.clone()) * sign);
            assert_eq!(
                BigInt::from(res.modified.count_bar()) - BigInt::from(res.modified.count_bar_prime()),
                chi
            );
        }
    }
}
