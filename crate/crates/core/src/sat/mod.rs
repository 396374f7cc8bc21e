//! Boolean counting front end: circuits, CNF and one-in-three SAT, with
//! brute-force model counters and the parsimonious reductions
//! circuit → 3CNF → one-in-three SAT → 3D matching.
//!
//! Variables are numbered from 1; a literal is a nonzero `i32` whose sign
//! gives its polarity, as in DIMACS.

mod circuit;
mod cnf;
mod oit;
mod young;

pub use circuit::{count_circuit_sat, count_circuit_sat_bounded, Circuit, Gate, GateKind, DEFAULT_MAX_INPUTS};
pub use cnf::{count_cnf, count_cnf_bounded, tseytin, Cnf, DEFAULT_MAX_CNF_VARS};
pub use oit::{
    count_one_in_three, count_one_in_three_bounded, count_one_in_three_brute, to_one_in_three, OneInThree,
    DEFAULT_MAX_OIT_VARS,
};
pub use young::{canonical_zero_instance, one_in_three_to_3dm};

use crate::error::{Error, Result};

/// Value of literal `lit` under `assign` (indexed by variable, slot 0 unused).
pub(crate) fn lit_value(lit: i32, assign: &[bool]) -> bool {
    assign[lit.unsigned_abs() as usize] == (lit > 0)
}

/// Parses a DIMACS-style file with header `p <kind> <vars> <clauses>`.
pub(crate) fn parse_dimacs(text: &str, kind: &str) -> Result<(usize, Vec<Vec<i32>>)> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut last_line = 0;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        last_line = line;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('c') || content.starts_with('%') {
            continue;
        }
        let err = |msg: String| Error::Parse { line, msg };
        if content.starts_with('p') {
            let toks: Vec<&str> = content.split_whitespace().collect();
            if header.is_some() {
                return Err(err("duplicate header".into()));
            }
            if toks.len() != 4 || toks[0] != "p" || toks[1] != kind {
                return Err(err(format!("expected `p {kind} <vars> <clauses>`")));
            }
            let v = toks[2].parse().map_err(|_| err(format!("bad variable count {}", toks[2])))?;
            let c = toks[3].parse().map_err(|_| err(format!("bad clause count {}", toks[3])))?;
            header = Some((v, c));
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(err("clause before header".into()));
        };
        for tok in content.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| err(format!("bad literal {tok}")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > vars {
                return Err(err(format!("literal {lit} exceeds {vars} variables")));
            } else {
                current.push(lit);
            }
        }
    }
    let (vars, count) = header.ok_or(Error::Parse { line: last_line, msg: "missing header".into() })?;
    if !current.is_empty() {
        return Err(Error::Parse { line: last_line, msg: "last clause is not zero-terminated".into() });
    }
    if clauses.len() != count {
        return Err(Error::Parse {
            line: last_line,
            msg: format!("header declares {count} clauses, found {}", clauses.len()),
        });
    }
    Ok((vars, clauses))
}

pub(crate) fn format_dimacs<'a>(kind: &str, vars: usize, clauses: impl ExactSizeIterator<Item = &'a [i32]>) -> String {
    let mut s = format!("p {kind} {vars} {}\n", clauses.len());
    for c in clauses {
        for l in c {
            s.push_str(&l.to_string());
            s.push(' ');
        }
        s.push_str("0\n");
    }
    s
}
