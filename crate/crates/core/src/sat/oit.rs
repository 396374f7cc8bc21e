use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::cnf::Cnf;
use super::{format_dimacs, lit_value, parse_dimacs};
use crate::error::{Error, Result};

/// Default variable bound for [`count_one_in_three`]. The counter
/// propagates forced literals, so it handles the reduction outputs of
/// small circuits, which have far more variables than free choices.
pub const DEFAULT_MAX_OIT_VARS: usize = 512;

/// Variable bound for the `2^n` enumeration oracle.
const BRUTE_MAX_VARS: usize = 24;

/// Conjunction of one-in-three constraints: each triple needs exactly one
/// true literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneInThree {
    num_vars: usize,
    triples: Vec<[i32; 3]>,
}

impl OneInThree {
    pub fn new(num_vars: usize, triples: Vec<[i32; 3]>) -> Result<Self> {
        for t in &triples {
            if let Some(&l) = t.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize > num_vars) {
                return Err(Error::InvalidValue(format!("literal {l} out of range 1..={num_vars}")));
            }
            let [a, b, c] = t.map(i32::unsigned_abs);
            if a == b || b == c || a == c {
                return Err(Error::InvalidValue(format!("triple {t:?} repeats a variable")));
            }
        }
        Ok(OneInThree { num_vars, triples })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn triples(&self) -> &[[i32; 3]] {
        &self.triples
    }

    pub fn eval(&self, assign: &[bool]) -> bool {
        self.triples.iter().all(|t| t.iter().filter(|&&l| lit_value(l, assign)).count() == 1)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (vars, clauses) = parse_dimacs(text, "oit")?;
        let triples = clauses
            .into_iter()
            .map(|c| {
                <[i32; 3]>::try_from(c.as_slice())
                    .map_err(|_| Error::InvalidValue(format!("clause {c:?} does not have 3 literals")))
            })
            .collect::<Result<Vec<_>>>()?;
        OneInThree::new(vars, triples)
    }

    pub fn to_dimacs(&self) -> String {
        format_dimacs("oit", self.num_vars, self.triples.iter().map(|t| t.as_slice()))
    }
}

/// Model count by enumerating all `2^n` assignments (at most 24 variables).
pub fn count_one_in_three_brute(f: &OneInThree) -> Result<BigUint> {
    let n = f.num_vars;
    if n > BRUTE_MAX_VARS {
        return Err(Error::BoundExceeded { what: "one-in-three variables", value: n, bound: BRUTE_MAX_VARS });
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

pub fn count_one_in_three(f: &OneInThree) -> Result<BigUint> {
    count_one_in_three_bounded(f, DEFAULT_MAX_OIT_VARS)
}

/// Exact model count by backtracking with propagation: a true literal
/// falsifies the other two, two false literals force the third. Variables
/// absent from every triple contribute a factor of 2 each.
pub fn count_one_in_three_bounded(f: &OneInThree, max_vars: usize) -> Result<BigUint> {
    let n = f.num_vars;
    if n > max_vars {
        return Err(Error::BoundExceeded { what: "one-in-three variables", value: n, bound: max_vars });
    }
    let mut occurs = vec![Vec::new(); n + 1];
    for (i, t) in f.triples.iter().enumerate() {
        for &l in t {
            occurs[l.unsigned_abs() as usize].push(i);
        }
    }
    let free = occurs.iter().skip(1).filter(|o| o.is_empty()).count();
    let order: Vec<usize> = (1..=n).filter(|&v| !occurs[v].is_empty()).collect();
    let mut solver = Dpll { triples: &f.triples, occurs, value: vec![None; n + 1], trail: Vec::new() };
    let count = solver.count(&order, 0);
    Ok(count << free)
}

struct Dpll<'a> {
    triples: &'a [[i32; 3]],
    occurs: Vec<Vec<usize>>,
    value: Vec<Option<bool>>,
    trail: Vec<usize>,
}

impl Dpll<'_> {
    fn lit(&self, l: i32) -> Option<bool> {
        self.value[l.unsigned_abs() as usize].map(|v| v == (l > 0))
    }

    fn set_lit(&mut self, l: i32, truth: bool, queue: &mut Vec<usize>) -> bool {
        let v = l.unsigned_abs() as usize;
        let val = truth == (l > 0);
        match self.value[v] {
            Some(x) => x == val,
            None => {
                self.value[v] = Some(val);
                self.trail.push(v);
                queue.push(v);
                true
            }
        }
    }

    /// Assigns `var := val` and propagates; false on conflict.
    fn assign(&mut self, var: usize, val: bool) -> bool {
        let mut queue = Vec::new();
        if !self.set_lit(var as i32, val, &mut queue) {
            return false;
        }
        while let Some(v) = queue.pop() {
            for k in 0..self.occurs[v].len() {
                let t = self.triples[self.occurs[v][k]];
                let vals = t.map(|l| self.lit(l));
                let trues = vals.iter().filter(|x| **x == Some(true)).count();
                let falses = vals.iter().filter(|x| **x == Some(false)).count();
                if trues > 1 || falses == 3 {
                    return false;
                }
                for (i, &l) in t.iter().enumerate() {
                    if vals[i].is_none() {
                        let forced = if trues == 1 {
                            Some(false)
                        } else if falses == 2 {
                            Some(true)
                        } else {
                            None
                        };
                        if let Some(x) = forced {
                            if !self.set_lit(l, x, &mut queue) {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        for v in self.trail.drain(mark..) {
            self.value[v] = None;
        }
    }

    fn count(&mut self, order: &[usize], from: usize) -> BigUint {
        let Some(pos) = order[from..].iter().position(|&v| self.value[v].is_none()) else {
            return BigUint::one();
        };
        let var = order[from + pos];
        let mut total = BigUint::zero();
        for val in [false, true] {
            let mark = self.trail.len();
            if self.assign(var, val) {
                total += self.count(order, from + pos + 1);
            }
            self.undo_to(mark);
        }
        total
    }
}

/// Parsimonious reduction from CNF to one-in-three SAT.
///
/// Short clauses are padded with the auxiliaries `f1`, `f2` of a forcing
/// block whose only model is `t = 1, f1 = f2 = 0`. Each width-3 clause
/// `x ∨ y ∨ z` becomes `oit(¬x,u1,u2) ∧ oit(y,u2,u3) ∧ oit(¬z,u3,u4)` with
/// fresh `u1..u4`. Those three triples have two models when `x = z = 1`,
/// `y = 0`; the extra `oit(u1,u3,u5)` rules out the one with `u1 = u3 = 1`
/// and is determined everywhere else.
pub fn to_one_in_three(f: &Cnf) -> OneInThree {
    let mut next = f.num_vars();
    let mut fresh = || {
        next += 1;
        next as i32
    };
    let mut triples = Vec::new();
    let pad = if f.clauses().iter().any(|c| c.len() < 3) {
        let (t, f1, f2) = (fresh(), fresh(), fresh());
        triples.push([t, f1, f2]);
        triples.push([-t, f1, -f2]);
        triples.push([-t, -f1, f2]);
        Some((f1, f2))
    } else {
        None
    };
    for c in f.clauses() {
        let [x, y, z] = match (c.as_slice(), pad) {
            (&[x, y, z], _) => [x, y, z],
            (&[x, y], Some((f1, _))) => [x, y, f1],
            (&[x], Some((f1, f2))) => [x, f1, f2],
            (&[], Some((f1, f2))) => [f1, f2, f1],
            _ => unreachable!("short clauses always allocate the forcing block"),
        };
        let u = [fresh(), fresh(), fresh(), fresh(), fresh()];
        triples.push([-x, u[0], u[1]]);
        triples.push([y, u[1], u[2]]);
        triples.push([-z, u[2], u[3]]);
        triples.push([u[0], u[2], u[4]]);
    }
    OneInThree { num_vars: next, triples }
}
