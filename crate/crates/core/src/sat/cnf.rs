use num_bigint::BigUint;

use super::circuit::{Circuit, GateKind};
use super::{format_dimacs, lit_value, parse_dimacs};
use crate::error::{Error, Result};

/// Default bound on the number of variables for brute-force CNF counting.
pub const DEFAULT_MAX_CNF_VARS: usize = 24;

/// A CNF formula with clauses of width at most 3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        for c in &clauses {
            if c.len() > 3 {
                return Err(Error::InvalidValue(format!("clause {c:?} is wider than 3")));
            }
            if let Some(&l) = c.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize > num_vars) {
                return Err(Error::InvalidValue(format!("literal {l} out of range 1..={num_vars}")));
            }
        }
        Ok(Cnf { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn eval(&self, assign: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| lit_value(l, assign)))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (vars, clauses) = parse_dimacs(text, "cnf")?;
        Cnf::new(vars, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        format_dimacs("cnf", self.num_vars, self.clauses.iter().map(Vec::as_slice))
    }
}

pub fn count_cnf(f: &Cnf) -> Result<BigUint> {
    count_cnf_bounded(f, DEFAULT_MAX_CNF_VARS)
}

/// Model count by enumerating all `2^n` assignments.
pub fn count_cnf_bounded(f: &Cnf, max_vars: usize) -> Result<BigUint> {
    let n = f.num_vars;
    if n > max_vars {
        return Err(Error::BoundExceeded { what: "CNF variables", value: n, bound: max_vars });
    }
    let mut assign = vec![false; n + 1];
    let mut count = 0u64;
    for code in 0u64..(1u64 << n) {
        for v in 1..=n {
            assign[v] = code >> (v - 1) & 1 == 1;
        }
        if f.eval(&assign) {
            count += 1;
        }
    }
    Ok(BigUint::from(count))
}

/// Tseytin encoding: input `i` becomes variable `i + 1`, gate `g` becomes
/// variable `n_inputs + g + 1`, and a unit clause asserts the output.
pub fn tseytin(c: &Circuit) -> Cnf {
    let n = c.inputs().len();
    let var = |node: usize| (node + 1) as i32;
    let mut clauses = Vec::new();
    for (i, gate) in c.gates().iter().enumerate() {
        let g = var(n + i);
        let a = var(gate.operands[0]);
        match gate.kind {
            GateKind::Not => {
                clauses.push(vec![-g, -a]);
                clauses.push(vec![g, a]);
            }
            GateKind::And => {
                let b = var(gate.operands[1]);
                clauses.push(vec![-g, a]);
                clauses.push(vec![-g, b]);
                clauses.push(vec![g, -a, -b]);
            }
            GateKind::Or => {
                let b = var(gate.operands[1]);
                clauses.push(vec![g, -a]);
                clauses.push(vec![g, -b]);
                clauses.push(vec![-g, a, b]);
            }
        }
    }
    clauses.push(vec![var(c.output())]);
    Cnf { num_vars: c.num_nodes(), clauses }
}
