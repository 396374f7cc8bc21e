use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Default bound on the number of circuit inputs for brute-force counting.
pub const DEFAULT_MAX_INPUTS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    Not,
    And,
    Or,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Not => 1,
            GateKind::And | GateKind::Or => 2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            GateKind::Not => "NOT",
            GateKind::And => "AND",
            GateKind::Or => "OR",
        }
    }
}

/// A gate whose operands are node indices: inputs occupy `0..n_inputs`,
/// gate `g` is node `n_inputs + g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub name: String,
    pub kind: GateKind,
    pub operands: Vec<usize>,
}

/// A Boolean circuit over NOT and fan-in-2 AND/OR gates, in topological order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    inputs: Vec<String>,
    gates: Vec<Gate>,
    output: usize,
}

impl Circuit {
    /// Validates arity, acyclicity (operands precede their gate) and the output.
    pub fn new(inputs: Vec<String>, gates: Vec<Gate>, output: usize) -> Result<Self> {
        let n = inputs.len();
        for (g, gate) in gates.iter().enumerate() {
            if gate.operands.len() != gate.kind.arity() {
                return Err(Error::MalformedCircuit(format!(
                    "gate {} has {} operands, {} expects {}",
                    gate.name,
                    gate.operands.len(),
                    gate.kind.name(),
                    gate.kind.arity()
                )));
            }
            if let Some(&bad) = gate.operands.iter().find(|&&o| o >= n + g) {
                return Err(Error::MalformedCircuit(format!(
                    "gate {} refers to node {bad}, which is not defined before it",
                    gate.name
                )));
            }
        }
        if output >= n + gates.len() {
            return Err(Error::MalformedCircuit(format!("output node {output} does not exist")));
        }
        let mut names: Vec<&str> = inputs.iter().map(String::as_str).chain(gates.iter().map(|g| g.name.as_str())).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedCircuit("duplicate node name".into()));
        }
        Ok(Circuit { inputs, gates, output })
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn num_nodes(&self) -> usize {
        self.inputs.len() + self.gates.len()
    }

    pub fn node_name(&self, node: usize) -> &str {
        if node < self.inputs.len() {
            &self.inputs[node]
        } else {
            &self.gates[node - self.inputs.len()].name
        }
    }

    /// Values of every node under the given input assignment.
    pub fn eval_nodes(&self, input: &[bool]) -> Vec<bool> {
        let mut v = input.to_vec();
        v.reserve(self.gates.len());
        for gate in &self.gates {
            let x = match gate.kind {
                GateKind::Not => !v[gate.operands[0]],
                GateKind::And => v[gate.operands[0]] && v[gate.operands[1]],
                GateKind::Or => v[gate.operands[0]] || v[gate.operands[1]],
            };
            v.push(x);
        }
        v
    }

    pub fn eval(&self, input: &[bool]) -> bool {
        self.eval_nodes(input)[self.output]
    }

    /// Parses the line format:
    ///
    /// ```text
    /// input x
    /// input y
    /// gate g = AND x y
    /// gate h = NOT g
    /// output h
    /// ```
    ///
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut inputs = Vec::new();
        let mut gates: Vec<Gate> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut output = None;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            let err = |msg: String| Error::Parse { line, msg };
            match toks[0] {
                "input" => {
                    if toks.len() != 2 {
                        return Err(err("expected `input <name>`".into()));
                    }
                    if !gates.is_empty() {
                        return Err(err("inputs must be declared before gates".into()));
                    }
                    if index.insert(toks[1].to_string(), inputs.len()).is_some() {
                        return Err(err(format!("duplicate name {}", toks[1])));
                    }
                    inputs.push(toks[1].to_string());
                }
                "gate" => {
                    if toks.len() < 4 || toks[2] != "=" {
                        return Err(err("expected `gate <id> = AND|OR|NOT <operands>`".into()));
                    }
                    let kind = match toks[3] {
                        "AND" => GateKind::And,
                        "OR" => GateKind::Or,
                        "NOT" => GateKind::Not,
                        other => return Err(err(format!("unknown gate kind {other}"))),
                    };
                    let ops = &toks[4..];
                    if ops.len() != kind.arity() {
                        return Err(err(format!("{} takes {} operand(s)", kind.name(), kind.arity())));
                    }
                    let operands = ops
                        .iter()
                        .map(|o| index.get(*o).copied().ok_or_else(|| err(format!("undefined operand {o}"))))
                        .collect::<Result<Vec<_>>>()?;
                    let node = inputs.len() + gates.len();
                    if index.insert(toks[1].to_string(), node).is_some() {
                        return Err(err(format!("duplicate name {}", toks[1])));
                    }
                    gates.push(Gate { name: toks[1].to_string(), kind, operands });
                }
                "output" => {
                    if toks.len() != 2 {
                        return Err(err("expected `output <id>`".into()));
                    }
                    if output.is_some() {
                        return Err(err("more than one output".into()));
                    }
                    output = Some(*index.get(toks[1]).ok_or_else(|| err(format!("undefined output {}", toks[1])))?);
                }
                other => return Err(err(format!("unknown directive {other}"))),
            }
        }
        let output = output.ok_or(Error::Parse { line: 0, msg: "missing `output` line".into() })?;
        Circuit::new(inputs, gates, output)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for i in &self.inputs {
            let _ = writeln!(s, "input {i}");
        }
        for g in &self.gates {
            let ops: Vec<&str> = g.operands.iter().map(|&o| self.node_name(o)).collect();
            let _ = writeln!(s, "gate {} = {} {}", g.name, g.kind.name(), ops.join(" "));
        }
        let _ = writeln!(s, "output {}", self.node_name(self.output));
        s
    }
}

/// Number of satisfying input assignments, by enumeration.
pub fn count_circuit_sat(c: &Circuit) -> Result<BigUint> {
    count_circuit_sat_bounded(c, DEFAULT_MAX_INPUTS)
}

pub fn count_circuit_sat_bounded(c: &Circuit, max_inputs: usize) -> Result<BigUint> {
    let n = c.inputs.len();
    if n > max_inputs {
        return Err(Error::BoundExceeded { what: "circuit inputs", value: n, bound: max_inputs });
    }
    let mut count = 0u64;
    let mut input = vec![false; n];
    for code in 0u64..(1u64 << n) {
        for (i, slot) in input.iter_mut().enumerate() {
            *slot = code >> i & 1 == 1;
        }
        if c.eval(&input) {
            count += 1;
        }
    }
    Ok(BigUint::from(count))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Circuit {
        Circuit::parse(s).unwrap()
    }

    #[test]
    fn counts() {
        let n = |c: &Circuit| count_circuit_sat(c).unwrap();
        assert_eq!(n(&parse("input x\noutput x\n")), BigUint::from(1u32));
        assert_eq!(n(&parse("input a\ninput b\ngate g = AND a b\noutput g\n")), BigUint::from(1u32));
        assert_eq!(n(&parse("input a\ninput b\ngate g = OR a b\noutput g\n")), BigUint::from(3u32));
        assert_eq!(n(&parse("input a\ngate g = NOT a\noutput g\n")), BigUint::from(1u32));
    }

    #[test]
    fn malformed() {
        assert!(matches!(Circuit::parse("input a\ngate g = AND a b\noutput g"), Err(Error::Parse { line: 2, .. })));
        assert!(Circuit::parse("input a\ngate g = NOT a a\noutput g").is_err());
        assert!(Circuit::parse("input a\n").is_err());
        assert!(Circuit::parse("input a\nfrob a\noutput a").is_err());
        let bad = Circuit::new(vec!["a".into()], vec![Gate { name: "g".into(), kind: GateKind::Not, operands: vec![1] }], 1);
        assert!(matches!(bad, Err(Error::MalformedCircuit(_))));
    }

    #[test]
    fn text_roundtrip() {
        let c = parse("input a\ninput b\ngate g = AND a b\ngate h = NOT g\ngate k = OR h a\noutput k\n");
        assert_eq!(Circuit::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn bound() {
        let text: String = (0..21).map(|i| format!("input x{i}\n")).collect::<String>() + "output x0\n";
        assert!(matches!(count_circuit_sat(&parse(&text)), Err(Error::BoundExceeded { .. })));
    }
}
