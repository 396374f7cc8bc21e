//! Stage-by-stage verification: every reduction step is re-counted by an
//! independent oracle and the two sides are recorded in a [`VerifyReport`].

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::characters::{column_sum, dimension, mn_small, row_sum, sqrt_count_oracle};
use crate::combinat::{factorial, small_partitions, z_factor, Partition};
use crate::error::{Error, Result};
use crate::matchings::{Hypergraph3, Hypergraph4};
use crate::par;
use crate::pipeline::reduce_matching_pair;
use crate::sat::{
    count_circuit_sat, count_cnf, count_one_in_three, count_one_in_three_brute, one_in_three_to_3dm,
    to_one_in_three, tseytin, Circuit, Gate, GateKind,
};
use crate::setpartition::count_with_fixed_pair_opts;

/// Largest `n` accepted by [`verify_identity`].
pub const IDENTITY_BOUND: usize = 8;

/// Ground-set bound used for the matching side of the parsimony chain,
/// whose 3DM instances have a few hundred elements but little branching.
pub const PARSIMONY_MAX_GROUND: usize = 2048;

/// Ground-set bound for the pipeline's 4DM recounts.
pub const PIPELINE_MAX_GROUND: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageRecord {
    pub name: String,
    pub left: String,
    pub right: String,
    pub pass: bool,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub stages: Vec<StageRecord>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn new() -> Self {
        VerifyReport { stages: Vec::new(), pass: true }
    }

    pub fn push(&mut self, name: impl Into<String>, left: impl ToString, right: impl ToString, pass: bool, started: Instant) {
        self.pass &= pass;
        self.stages.push(StageRecord {
            name: name.into(),
            left: left.to_string(),
            right: right.to_string(),
            pass,
            elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
        });
    }

    /// Records an equality check.
    pub fn check_eq<T: PartialEq + ToString>(&mut self, name: impl Into<String>, left: T, right: T, started: Instant) {
        let pass = left == right;
        self.push(name, left, right, pass, started);
    }

    /// Appends the stages of `other`, prefixing their names.
    pub fn extend(&mut self, prefix: &str, other: VerifyReport) {
        self.pass &= other.pass;
        self.stages.extend(other.stages.into_iter().map(|mut s| {
            s.name = format!("{prefix}{}", s.name);
            s
        }));
    }

    pub fn failures(&self) -> impl Iterator<Item = &StageRecord> {
        self.stages.iter().filter(|s| !s.pass)
    }

    /// One line per stage, then an overall verdict.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for st in &self.stages {
            let mark = if st.pass { "ok  " } else { "FAIL" };
            let _ = writeln!(s, "{mark} {}: {} vs {} ({:.1} ms)", st.name, st.left, st.right, st.elapsed_ms);
        }
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{verdict} ({} stages)", self.stages.len());
        s
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Identity {
    /// `Σ_λ dim(λ)² = n!`.
    Rsk,
    /// `Σ_μ (n!/z_μ)·χ^λ(μ)² = n!` for each `λ`.
    Charsum,
    /// `Σ_λ χ^λ(μ)² = z_μ` for each `μ`.
    Burnside,
    /// Column sums count square roots; row sums are positive apart from
    /// the sign character of `S_2`.
    Rowcol,
}

impl Identity {
    pub const ALL: [Identity; 4] = [Identity::Rsk, Identity::Charsum, Identity::Burnside, Identity::Rowcol];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Rsk => "rsk",
            Identity::Charsum => "charsum",
            Identity::Burnside => "burnside",
            Identity::Rowcol => "rowcol",
        }
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Identity::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| Error::InvalidValue(format!("unknown identity {s:?} (rsk, charsum, burnside, rowcol)")))
    }
}

fn label(p: &[usize]) -> String {
    format!("({})", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

/// Checks one character-table identity exhaustively for `S_n`.
pub fn verify_identity(n: usize, which: Identity) -> Result<VerifyReport> {
    if n > IDENTITY_BOUND {
        return Err(Error::BoundExceeded { what: "n", value: n, bound: IDENTITY_BOUND });
    }
    let mut report = VerifyReport::new();
    let parts = small_partitions(n);
    let nf = factorial(n);
    match which {
        Identity::Rsk => {
            let t = Instant::now();
            let mut total = BigUint::zero();
            for p in &parts {
                let d = dimension(&Partition::from_small(p)?)?;
                total += &d * &d;
            }
            report.check_eq(format!("sum dim^2, n={n}"), total, nf, t);
        }
        Identity::Charsum | Identity::Burnside => {
            let t = Instant::now();
            let table: Vec<Vec<BigInt>> = par::map_slice(&parts, |l| parts.iter().map(|m| mn_small(l, m)).collect());
            let z: Vec<BigUint> =
                parts.iter().map(|m| Partition::from_small(m).map(|p| z_factor(&p))).collect::<Result<_>>()?;
            if which == Identity::Charsum {
                for (row, l) in table.iter().zip(&parts) {
                    let total: BigInt =
                        row.iter().zip(&z).map(|(x, z)| BigInt::from(&nf / z) * x * x).sum();
                    report.check_eq(format!("row {}", label(l)), total, BigInt::from(nf.clone()), t);
                }
            } else {
                for (c, m) in parts.iter().enumerate() {
                    let total: BigInt = table.iter().map(|row| &row[c] * &row[c]).sum();
                    report.check_eq(format!("column {}", label(m)), total, BigInt::from(z[c].clone()), t);
                }
            }
        }
        Identity::Rowcol => {
            for p in &parts {
                let lambda = Partition::from_small(p)?;
                let t = Instant::now();
                let col = column_sum(&lambda)?;
                let roots = BigInt::from(sqrt_count_oracle(&lambda)?);
                report.check_eq(format!("column sum {} = #square roots", label(p)), col, roots, t);
                if n > 1 {
                    let t = Instant::now();
                    let row = row_sum(&lambda)?;
                    // the sign character of S_2 is the one row summing to 0
                    if p[..] == [1, 1] {
                        let pass = row.is_zero();
                        report.push(format!("row sum {} = 0 (sign of S_2)", label(p)), row, 0, pass, t);
                    } else {
                        let pass = row >= BigInt::one();
                        report.push(format!("row sum {} >= 1", label(p)), row, 1, pass, t);
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Deterministic generator for every randomized suite.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random circuit with 1..=`max_inputs` inputs and 0..=`max_gates` gates;
/// the output is the last node.
pub fn random_circuit(rng: &mut impl Rng, max_inputs: usize, max_gates: usize) -> Circuit {
    let n = rng.gen_range(1..=max_inputs.max(1));
    let g = rng.gen_range(0..=max_gates);
    let inputs: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let mut gates = Vec::with_capacity(g);
    for k in 0..g {
        let nodes = n + k;
        let kind = match rng.gen_range(0..3) {
            0 => GateKind::Not,
            1 => GateKind::And,
            _ => GateKind::Or,
        };
        let operands = (0..kind.arity()).map(|_| rng.gen_range(0..nodes)).collect();
        gates.push(Gate { name: format!("g{}", k + 1), kind, operands });
    }
    Circuit::new(inputs, gates, n + g - 1).expect("operands precede their gate")
}

/// A random subset of `Z_k³`, each triple kept with probability `density`.
pub fn random_hypergraph3(rng: &mut impl Rng, k: usize, density: f64) -> Hypergraph3 {
    let mut edges = Vec::new();
    for x in 1..=k {
        for y in 1..=k {
            for z in 1..=k {
                if rng.gen_bool(density) {
                    edges.push([x, y, z]);
                }
            }
        }
    }
    Hypergraph3::new(k, edges).expect("distinct triples in range")
}

/// Counts every stage of circuit → CNF → one-in-three → 3DM.
pub fn verify_parsimony(c: &Circuit, max_ground: usize) -> Result<VerifyReport> {
    let mut report = VerifyReport::new();
    let t = Instant::now();
    let sat = count_circuit_sat(c)?;
    let cnf = tseytin(c);
    let n_cnf = count_cnf(&cnf)?;
    report.check_eq("#CircuitSAT = #CNF(tseytin)", sat, n_cnf.clone(), t);

    let t = Instant::now();
    let oit = to_one_in_three(&cnf);
    let n_oit = count_one_in_three(&oit)?;
    report.check_eq("#CNF = #1-in-3", n_cnf, n_oit.clone(), t);
    if oit.num_vars() <= 24 {
        let t = Instant::now();
        report.check_eq("#1-in-3 propagation = brute force", n_oit.clone(), count_one_in_three_brute(&oit)?, t);
    }

    let t = Instant::now();
    let e = one_in_three_to_3dm(&oit);
    let covers = e.covers();
    report.push("3DM instance covers Z_k", covers, true, covers, t);
    let t = Instant::now();
    let n_3dm = e.count_matchings_bounded(max_ground)?;
    report.check_eq(format!("#1-in-3 = #3DM (k={})", e.size()), n_oit, n_3dm, t);
    Ok(report)
}

/// [`verify_parsimony`] on `count` seeded random circuits.
pub fn verify_parsimony_suite(
    seed: u64,
    count: usize,
    max_inputs: usize,
    max_gates: usize,
    max_ground: usize,
) -> Result<VerifyReport> {
    let mut rng = seeded_rng(seed);
    let circuits: Vec<Circuit> = (0..count).map(|_| random_circuit(&mut rng, max_inputs, max_gates)).collect();
    let reports = par::map_slice(&circuits, |c| verify_parsimony(c, max_ground));
    let mut report = VerifyReport::new();
    for (i, r) in reports.into_iter().enumerate() {
        report.extend(&format!("circuit {i}: "), r?);
    }
    Ok(report)
}

fn count4(g: &Hypergraph4, max_ground: usize) -> Result<BigUint> {
    g.count_matchings_bounded(max_ground)
}

/// Runs the matching-pair reduction and re-counts every stage: the join
/// lemma, the gadget split `P_0`/`P_1`, `δ`-divisibility, the modified
/// gadget, the character value through the Frobenius formula and the
/// collapsed identity `χ = δ·(#3DM(E) − #3DM(E'))`.
pub fn verify_pipeline(e: &Hypergraph3, e_prime: &Hypergraph3, max_ground: usize) -> Result<VerifyReport> {
    let mut report = VerifyReport::new();
    let t = Instant::now();
    let res = reduce_matching_pair(e, e_prime)?;
    report.push("reduce", format!("|J| = {}", res.join.j.len()), format!("δ = {}", res.delta), true, t);
    let delta = &res.delta;

    let t = Instant::now();
    let m_e = e.count_matchings_bounded(max_ground)?;
    let m_ep = e_prime.count_matchings_bounded(max_ground)?;
    let j0 = count4(&res.join.without_h_prime(), max_ground)?;
    let j1 = count4(&res.join.without_h(), max_ground)?;
    report.check_eq("#3DM(E) = #4DM(J \\ H')", m_e.clone(), j0.clone(), t);
    report.check_eq("#3DM(E') = #4DM(J \\ H)", m_ep.clone(), j1.clone(), t);

    let g = &res.gadget;
    let inst = g.set_partition_instance();
    let opts = g.count_options();
    for (k, name, want) in [(1, "P0", &j0), (2, "P1", &j1)] {
        let t = Instant::now();
        let p = count_with_fixed_pair_opts(&inst, g.special[0], g.special[k], true, &opts)?;
        let (q, r) = p.div_rem(delta);
        report.push(format!("{name} divisible by δ"), &p, delta, r.is_zero(), t);
        report.check_eq(format!("{name}/δ = #4DM"), q, want.clone(), t);
    }

    let t = Instant::now();
    let pb = res.modified.count_bar();
    let pbp = res.modified.count_bar_prime();
    for (name, p, want) in [("P(c,d̄)", &pb, &j0), ("P(c,d̄')", &pbp, &j1)] {
        let (q, r) = p.div_rem(delta);
        report.push(format!("{name} divisible by δ"), p, delta, r.is_zero(), t);
        report.check_eq(format!("{name}/δ = #4DM"), q, want.clone(), t);
    }

    let t = Instant::now();
    let chi = res.char_instance.evaluate()?;
    let diff = BigInt::from(pb) - BigInt::from(pbp);
    report.check_eq("χ (Frobenius) = P(c,d̄) − P(c,d̄')", chi.clone(), diff, t);
    let t = Instant::now();
    let expected = BigInt::from(delta.clone()) * (BigInt::from(m_e) - BigInt::from(m_ep));
    report.check_eq("χ = δ·(#3DM(E) − #3DM(E'))", chi, expected, t);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_small_n() {
        for n in 0..=6 {
            for which in Identity::ALL {
                let r = verify_identity(n, which).unwrap();
                assert!(r.pass, "{which:?} n={n}\n{}", r.to_text());
            }
        }
        assert!(matches!(verify_identity(9, Identity::Rsk), Err(Error::BoundExceeded { .. })));
        assert_eq!("burnside".parse::<Identity>().unwrap(), Identity::Burnside);
        assert!("nope".parse::<Identity>().is_err());
    }

    #[test]
    fn rsk_n4_and_burnside_22() {
        let r = verify_identity(4, Identity::Rsk).unwrap();
        assert_eq!(r.stages[0].left, "24");
        let r = verify_identity(4, Identity::Burnside).unwrap();
        let st = r.stages.iter().find(|s| s.name == "column (2,2)").unwrap();
        assert_eq!((st.left.as_str(), st.right.as_str()), ("8", "8"));
    }

    #[test]
    fn seeded_generators_are_reproducible() {
        let a: Vec<String> = (0..5).map(|_| random_circuit(&mut seeded_rng(7), 4, 6).to_text()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let mut r1 = seeded_rng(3);
        let mut r2 = seeded_rng(3);
        assert_eq!(random_hypergraph3(&mut r1, 2, 0.5), random_hypergraph3(&mut r2, 2, 0.5));
    }

    #[test]
    fn parsimony_small_suite() {
        let r = verify_parsimony_suite(1, 4, 3, 3, PARSIMONY_MAX_GROUND).unwrap();
        assert!(r.pass, "{}", r.to_text());
    }

    #[test]
    fn pipeline_tiny() {
        let one = Hypergraph3::new(1, vec![[1, 1, 1]]).unwrap();
        let none = Hypergraph3::new(1, vec![]).unwrap();
        for (e, ep) in [(&one, &none), (&one, &one), (&none, &one)] {
            let r = verify_pipeline(e, ep, PIPELINE_MAX_GROUND).unwrap();
            assert!(r.pass, "{}", r.to_text());
        }
    }

    #[test]
    fn failing_stage_fails_report() {
        let mut r = VerifyReport::new();
        r.check_eq("a", 1, 1, Instant::now());
        assert!(r.pass);
        r.check_eq("b", 1, 2, Instant::now());
        assert!(!r.pass);
        assert_eq!(r.failures().count(), 1);
        assert!(r.to_text().contains("FAIL b"));
    }
}
