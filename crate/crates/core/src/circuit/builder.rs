//! Circuit construction with constant folding.

use super::{Circuit, Gate, GateKind};

/// A value during construction: either a known constant or a wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bit {
    Const(bool),
    Wire(u32),
}

impl Bit {
    pub const ZERO: Bit = Bit::Const(false);
    pub const ONE: Bit = Bit::Const(true);
}

pub struct Builder {
    num_public: usize,
    num_witness: usize,
    gates: Vec<Gate>,
}

impl Builder {
    pub fn new(num_public: usize, num_witness: usize) -> Self {
        Builder {
            num_public,
            num_witness,
            gates: Vec::new(),
        }
    }

    pub fn public(&self, i: usize) -> Bit {
        assert!(i < self.num_public);
        Bit::Wire(i as u32)
    }

    pub fn witness(&self, i: usize) -> Bit {
        assert!(i < self.num_witness);
        Bit::Wire((self.num_public + i) as u32)
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    fn push(&mut self, kind: GateKind, a: u32, b: u32) -> Bit {
        let out = (self.num_public + self.num_witness + self.gates.len()) as u32;
        self.gates.push(Gate { kind, a, b, out });
        Bit::Wire(out)
    }

    pub fn not(&mut self, a: Bit) -> Bit {
        match a {
            Bit::Const(v) => Bit::Const(!v),
            Bit::Wire(w) => self.push(GateKind::Not, w, w),
        }
    }

    pub fn xor(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::Const(x), Bit::Const(y)) => Bit::Const(x ^ y),
            (Bit::Const(false), w) | (w, Bit::Const(false)) => w,
            (Bit::Const(true), w) | (w, Bit::Const(true)) => self.not(w),
            (Bit::Wire(x), Bit::Wire(y)) if x == y => Bit::ZERO,
            (Bit::Wire(x), Bit::Wire(y)) => self.push(GateKind::Xor, x, y),
        }
    }

    pub fn and(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::Const(x), Bit::Const(y)) => Bit::Const(x & y),
            (Bit::Const(false), _) | (_, Bit::Const(false)) => Bit::ZERO,
            (Bit::Const(true), w) | (w, Bit::Const(true)) => w,
            (Bit::Wire(x), Bit::Wire(y)) if x == y => Bit::Wire(x),
            (Bit::Wire(x), Bit::Wire(y)) => self.push(GateKind::And, x, y),
        }
    }

    /// `a | b = a ^ b ^ (a & b)`.
    pub fn or(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::Const(true), _) | (_, Bit::Const(true)) => Bit::ONE,
            (Bit::Const(false), w) | (w, Bit::Const(false)) => w,
            _ => {
                let x = self.xor(a, b);
                let y = self.and(a, b);
                self.xor(x, y)
            }
        }
    }

    /// `sel ? b : a`, as `a ^ (sel & (a ^ b))`.
    pub fn mux(&mut self, sel: Bit, a: Bit, b: Bit) -> Bit {
        match sel {
            Bit::Const(false) => a,
            Bit::Const(true) => b,
            _ => {
                let d = self.xor(a, b);
                let t = self.and(sel, d);
                self.xor(a, t)
            }
        }
    }

    pub fn xor_many(&mut self, a: &[Bit], b: &[Bit]) -> Vec<Bit> {
        assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(&x, &y)| self.xor(x, y)).collect()
    }

    pub fn or_all(&mut self, bits: &[Bit]) -> Bit {
        // balanced tree keeps depth logarithmic
        match bits.len() {
            0 => Bit::ZERO,
            1 => bits[0],
            n => {
                let (l, r) = bits.split_at(n / 2);
                let l = self.or_all(l);
                let r = self.or_all(r);
                self.or(l, r)
            }
        }
    }

    /// Finalizes with `out` as the output wire. A constant output is
    /// materialized from input wire 0.
    pub fn finish(mut self, out: Bit) -> Circuit {
        let output = match out {
            Bit::Wire(w) => w,
            Bit::Const(v) => {
                assert!(self.num_public + self.num_witness > 0, "circuit without inputs");
                let zero = self.push(GateKind::Xor, 0, 0);
                let w = if v { self.not(zero) } else { zero };
                match w {
                    Bit::Wire(w) => w,
                    Bit::Const(_) => unreachable!(),
                }
            }
        };
        let c = Circuit {
            num_public: self.num_public,
            num_witness: self.num_witness,
            gates: self.gates,
            output,
        };
        debug_assert!(c.validate().is_ok());
        c
    }
}
