//! Boolean circuits, the straight-line VM, the compiler for Barak's
//! trapdoor language, and a public-coin Σ-protocol for circuit
//! satisfiability.

pub mod builder;
pub mod csat;
pub mod gadgets;
pub mod lambda;
pub mod vm;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use builder::{Bit, Builder};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("malformed circuit: {0}")]
    Malformed(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("vm validation: {0}")]
    Vm(String),
    #[error("assignment does not satisfy the circuit")]
    Unsatisfied,
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    And,
    Xor,
    Not,
}

impl GateKind {
    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            GateKind::And => a & b,
            GateKind::Xor => a ^ b,
            GateKind::Not => !a,
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Not => 1,
            _ => 2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Xor => "XOR",
            GateKind::Not => "NOT",
        }
    }
}

/// `out = kind(a, b)`; for `Not`, `b == a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub a: u32,
    pub b: u32,
    pub out: u32,
}

/// Wires `0..num_public` are public inputs, the next `num_witness` are
/// witness inputs, and gate `i` drives wire `num_public + num_witness + i`.
/// Gates are therefore topologically ordered and every wire has exactly one
/// driver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub num_public: usize,
    pub num_witness: usize,
    pub gates: Vec<Gate>,
    pub output: u32,
}

impl Circuit {
    pub fn num_inputs(&self) -> usize {
        self.num_public + self.num_witness
    }

    pub fn num_wires(&self) -> usize {
        self.num_inputs() + self.gates.len()
    }

    pub fn witness_wires(&self) -> std::ops::Range<usize> {
        self.num_public..self.num_inputs()
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        let base = self.num_inputs();
        for (i, g) in self.gates.iter().enumerate() {
            let out = (base + i) as u32;
            if g.out != out {
                return Err(CircuitError::Malformed(format!("gate {i} drives {} not {out}", g.out)));
            }
            if g.a >= out || g.b >= out {
                return Err(CircuitError::Malformed(format!("gate {i} reads a later wire")));
            }
            if g.kind == GateKind::Not && g.a != g.b {
                return Err(CircuitError::Malformed(format!("NOT gate {i} has two inputs")));
            }
        }
        if self.output as usize >= self.num_wires() {
            return Err(CircuitError::Malformed("output wire out of range".into()));
        }
        Ok(())
    }

    /// All wire values.
    pub fn eval(&self, public: &[bool], witness: &[bool]) -> Vec<bool> {
        assert_eq!(public.len(), self.num_public, "public input length");
        assert_eq!(witness.len(), self.num_witness, "witness length");
        let mut wires = Vec::with_capacity(self.num_wires());
        wires.extend_from_slice(public);
        wires.extend_from_slice(witness);
        for g in &self.gates {
            let v = g.kind.apply(wires[g.a as usize], wires[g.b as usize]);
            wires.push(v);
        }
        wires
    }

    pub fn is_satisfied(&self, public: &[bool], witness: &[bool]) -> bool {
        self.eval(public, witness)[self.output as usize]
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }

    /// Line-oriented interchange format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "public {}", self.num_public).unwrap();
        writeln!(s, "witness {}", self.num_witness).unwrap();
        writeln!(s, "output {}", self.output).unwrap();
        for g in &self.gates {
            match g.kind {
                GateKind::Not => writeln!(s, "gate NOT {} - {}", g.a, g.out),
                k => writeln!(s, "gate {} {} {} {}", k.name(), g.a, g.b, g.out),
            }
            .unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Circuit, CircuitError> {
        let mut num_public = None;
        let mut num_witness = None;
        let mut output = None;
        let mut gates = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |msg: &str| CircuitError::Parse { line, msg: msg.to_string() };
            let fields: Vec<&str> = raw.split_whitespace().collect();
            let num = |s: &str| s.parse::<u32>().map_err(|_| err("expected an integer"));
            match fields.as_slice() {
                [] => continue,
                ["public", n] => num_public = Some(num(n)? as usize),
                ["witness", n] => num_witness = Some(num(n)? as usize),
                ["output", n] => output = Some(num(n)?),
                ["gate", kind, a, b, out] => {
                    let kind = match *kind {
                        "AND" => GateKind::And,
                        "XOR" => GateKind::Xor,
                        "NOT" => GateKind::Not,
                        _ => return Err(err("unknown gate kind")),
                    };
                    let a = num(a)?;
                    let b = if kind == GateKind::Not {
                        if *b != "-" {
                            return Err(err("NOT takes one input"));
                        }
                        a
                    } else {
                        num(b)?
                    };
                    gates.push(Gate { kind, a, b, out: num(out)? });
                }
                _ => return Err(err("unrecognized line")),
            }
        }
        let missing = |what: &str| CircuitError::Parse { line: 0, msg: format!("missing {what}") };
        let c = Circuit {
            num_public: num_public.ok_or_else(|| missing("public"))?,
            num_witness: num_witness.ok_or_else(|| missing("witness"))?,
            gates,
            output: output.ok_or_else(|| missing("output"))?,
        };
        c.validate()?;
        Ok(c)
    }
}
