//! A straight-line VM over eight 8-bit registers.
//!
//! Each instruction is two bytes. The first byte is `op << 4 | dst`
//! (bit 3 reserved, must be zero); the second is an immediate or a source
//! register in its low three bits.
//!
//! | op | mnemonic | effect                                       |
//! |----|----------|----------------------------------------------|
//! | 0  | NOP      | nothing                                      |
//! | 1  | LDI      | `r[dst] = imm`                               |
//! | 2  | XOR      | `r[dst] ^= r[src]`                           |
//! | 3  | AND      | `r[dst] &= r[src]`                           |
//! | 4  | OR       | `r[dst] \|= r[src]`                          |
//! | 5  | NOT      | `r[dst] = !r[dst]`                           |
//! | 6  | MOV      | `r[dst] = r[src]`                            |
//! | 7  | OUT      | append `r[dst]` to the output                |
//! | 8  | IN       | `r[dst] = input[imm]` (0 when out of range)  |
//!
//! Programs run for exactly as many steps as they have instructions.

use serde::{Deserialize, Serialize};

use super::builder::{Bit, Builder};
use super::gadgets::{const_byte, Byte};
use super::CircuitError;

pub const REGISTERS: usize = 8;
pub const MAX_INSTRUCTIONS: usize = 64;
pub const MAX_STEPS: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Instr {
    Nop,
    Ldi { dst: u8, imm: u8 },
    Xor { dst: u8, src: u8 },
    And { dst: u8, src: u8 },
    Or { dst: u8, src: u8 },
    Not { dst: u8 },
    Mov { dst: u8, src: u8 },
    Out { src: u8 },
    In { dst: u8, index: u8 },
}

impl Instr {
    pub fn encode(self) -> [u8; 2] {
        let (op, reg, arg) = match self {
            Instr::Nop => (0, 0, 0),
            Instr::Ldi { dst, imm } => (1, dst, imm),
            Instr::Xor { dst, src } => (2, dst, src),
            Instr::And { dst, src } => (3, dst, src),
            Instr::Or { dst, src } => (4, dst, src),
            Instr::Not { dst } => (5, dst, 0),
            Instr::Mov { dst, src } => (6, dst, src),
            Instr::Out { src } => (7, src, 0),
            Instr::In { dst, index } => (8, dst, index),
        };
        [op << 4 | (reg & 7), arg]
    }

    /// Strict decoding: rejects reserved bits and non-canonical operands.
    pub fn decode(word: [u8; 2]) -> Result<Instr, CircuitError> {
        let [b0, arg] = word;
        let err = |m: &str| Err(CircuitError::Vm(format!("{m} in {:02x}{:02x}", b0, arg)));
        if b0 & 0x08 != 0 {
            return err("reserved bit set");
        }
        let reg = b0 & 7;
        let src = || if arg < 8 { Ok(arg) } else { Err(()) };
        let ins = match b0 >> 4 {
            0 if reg == 0 && arg == 0 => Instr::Nop,
            1 => Instr::Ldi { dst: reg, imm: arg },
            2 => src().map(|src| Instr::Xor { dst: reg, src }).or_else(|_| err("bad source"))?,
            3 => src().map(|src| Instr::And { dst: reg, src }).or_else(|_| err("bad source"))?,
            4 => src().map(|src| Instr::Or { dst: reg, src }).or_else(|_| err("bad source"))?,
            5 if arg == 0 => Instr::Not { dst: reg },
            6 => src().map(|src| Instr::Mov { dst: reg, src }).or_else(|_| err("bad source"))?,
            7 if arg == 0 => Instr::Out { src: reg },
            8 => Instr::In { dst: reg, index: arg },
            0 | 5 | 7 => return err("nonzero unused operand"),
            _ => return err("unknown opcode"),
        };
        Ok(ins)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VmProgram {
    pub code: Vec<Instr>,
    pub input_len: usize,
    pub output_len: usize,
}

impl VmProgram {
    pub fn new(code: Vec<Instr>, input_len: usize, output_len: usize) -> Result<Self, CircuitError> {
        let p = VmProgram { code, input_len, output_len };
        p.validate(MAX_INSTRUCTIONS)?;
        Ok(p)
    }

    /// Program that ignores its input and outputs `bytes`.
    pub fn constant(bytes: &[u8], input_len: usize) -> Self {
        let mut code = Vec::new();
        for &b in bytes {
            code.push(Instr::Ldi { dst: 0, imm: b });
            code.push(Instr::Out { src: 0 });
        }
        VmProgram { code, input_len, output_len: bytes.len() }
    }

    /// Program that outputs the first `n` input bytes.
    pub fn echo(n: usize, input_len: usize) -> Self {
        let mut code = Vec::new();
        for i in 0..n {
            code.push(Instr::In { dst: 0, index: i as u8 });
            code.push(Instr::Out { src: 0 });
        }
        VmProgram { code, input_len, output_len: n }
    }

    pub fn validate(&self, max_instructions: usize) -> Result<(), CircuitError> {
        if self.code.len() > max_instructions {
            return Err(CircuitError::Vm(format!(
                "{} instructions exceed the bound {max_instructions}",
                self.code.len()
            )));
        }
        if self.input_len > 256 {
            return Err(CircuitError::Vm("input longer than 256 bytes".into()));
        }
        let mut outs = 0;
        for ins in &self.code {
            match *ins {
                Instr::In { index, .. } if index as usize >= self.input_len => {
                    return Err(CircuitError::Vm(format!("input index {index} out of range")))
                }
                Instr::Out { .. } => outs += 1,
                _ => {}
            }
            // registers are masked by the encoding; reject anything that would not roundtrip
            if Instr::decode(ins.encode()).ok() != Some(*ins) {
                return Err(CircuitError::Vm(format!("non-canonical instruction {ins:?}")));
            }
        }
        if outs > self.output_len {
            return Err(CircuitError::Vm(format!("{outs} outputs declared as {}", self.output_len)));
        }
        Ok(())
    }

    pub fn encode(&self) -> Vec<u8> {
        self.code.iter().flat_map(|i| i.encode()).collect()
    }

    /// Encoding padded with NOPs to exactly `slots` instructions.
    pub fn encode_padded(&self, slots: usize) -> Result<Vec<u8>, CircuitError> {
        self.validate(slots)?;
        let mut e = self.encode();
        e.resize(2 * slots, 0);
        Ok(e)
    }

    pub fn decode(bytes: &[u8], input_len: usize, output_len: usize) -> Result<Self, CircuitError> {
        if !bytes.len().is_multiple_of(2) {
            return Err(CircuitError::Vm("odd encoding length".into()));
        }
        let code = bytes
            .chunks(2)
            .map(|w| Instr::decode([w[0], w[1]]))
            .collect::<Result<Vec<_>, _>>()?;
        VmProgram::new(code, input_len, output_len)
    }
}

/// Runs a validated program.
pub fn vm_run(prog: &VmProgram, input: &[u8]) -> Result<Vec<u8>, CircuitError> {
    prog.validate(MAX_INSTRUCTIONS)?;
    if input.len() != prog.input_len {
        return Err(CircuitError::Vm(format!(
            "input has {} bytes, program declares {}",
            input.len(),
            prog.input_len
        )));
    }
    Ok(vm_run_raw(&prog.encode(), input, prog.output_len))
}

/// Total semantics on raw words, as realized by the circuit: unknown
/// opcodes act as NOP, reserved bits are ignored, surplus outputs are
/// dropped and missing ones are zero.
pub fn vm_run_raw(code: &[u8], input: &[u8], output_len: usize) -> Vec<u8> {
    let mut r = [0u8; REGISTERS];
    let mut out = vec![0u8; output_len];
    let mut pos = 0;
    for w in code.chunks_exact(2) {
        let (op, d, arg) = (w[0] >> 4, (w[0] & 7) as usize, w[1]);
        let s = (arg & 7) as usize;
        match op {
            1 => r[d] = arg,
            2 => r[d] ^= r[s],
            3 => r[d] &= r[s],
            4 => r[d] |= r[s],
            5 => r[d] = !r[d],
            6 => r[d] = r[s],
            7 => {
                if pos < output_len {
                    out[pos] = r[d];
                    pos += 1;
                }
            }
            8 => r[d] = input.get(arg as usize).copied().unwrap_or(0),
            _ => {}
        }
    }
    out
}

fn mux_byte(b: &mut Builder, sel: Bit, x: &Byte, y: &Byte) -> Byte {
    std::array::from_fn(|k| b.mux(sel, x[k], y[k]))
}

/// Selects `items[index]`, with `index` given LSB-first; entries past the
/// end read as zero.
fn select(b: &mut Builder, index: &[Bit], items: &[Byte]) -> Byte {
    if items.is_empty() {
        return const_byte(0);
    }
    if items.len() == 1 {
        // remaining index bits must all be zero
        let any = b.or_all(index);
        let keep = b.not(any);
        return std::array::from_fn(|k| b.and(keep, items[0][k]));
    }
    let (bit, rest) = index.split_first().expect("index too short");
    let even: Vec<Byte> = items.iter().step_by(2).copied().collect();
    let odd: Vec<Byte> = items.iter().skip(1).step_by(2).copied().collect();
    let e = select(b, rest, &even);
    let o = select(b, rest, &odd);
    mux_byte(b, *bit, &e, &o)
}

/// One-hot decode of LSB-first bits into `2^bits.len()` lines.
fn decode_lines(b: &mut Builder, bits: &[Bit]) -> Vec<Bit> {
    let mut lines = vec![Bit::ONE];
    for &bit in bits {
        let nb = b.not(bit);
        let mut next = Vec::with_capacity(lines.len() * 2);
        for &l in &lines {
            next.push(b.and(l, nb));
        }
        for &l in &lines {
            next.push(b.and(l, bit));
        }
        // index v + len * bit, so value order is preserved
        lines = next;
    }
    lines
}

/// Unrolled execution of `code` (2 bytes per slot) matching [`vm_run_raw`].
pub fn vm_gadget(b: &mut Builder, code: &[[Byte; 2]], input: &[Byte], output_len: usize) -> Vec<Byte> {
    let zero = const_byte(0);
    let mut regs = [zero; REGISTERS];
    let mut out = vec![zero; output_len];
    // one-hot output position, saturating at output_len
    let mut pos: Vec<Bit> = (0..=output_len).map(|j| Bit::Const(j == 0)).collect();
    for [b0, arg] in code {
        let op = decode_lines(b, &b0[4..8]);
        let dst = decode_lines(b, &b0[0..3]);
        let d = select(b, &b0[0..3], &regs);
        let s = select(b, &arg[0..3], &regs);
        let inp = select(b, arg, input);
        let mut result = zero;
        for k in 0..8 {
            let x = b.xor(d[k], s[k]);
            let a = b.and(d[k], s[k]);
            let o = b.xor(x, a);
            let vals = [
                (1, arg[k]),
                (2, x),
                (3, a),
                (4, o),
                (5, b.not(d[k])),
                (6, s[k]),
                (8, inp[k]),
            ];
            let mut acc = Bit::ZERO;
            for (i, v) in vals {
                let t = b.and(op[i], v);
                acc = b.xor(acc, t);
            }
            result[k] = acc;
        }
        let mut write = Bit::ZERO;
        for i in [1, 2, 3, 4, 5, 6, 8] {
            write = b.xor(write, op[i]);
        }
        for (r, &line) in regs.iter_mut().zip(&dst) {
            let en = b.and(write, line);
            *r = mux_byte(b, en, r, &result);
        }
        let is_out = op[7];
        for j in 0..output_len {
            let en = b.and(is_out, pos[j]);
            out[j] = mux_byte(b, en, &out[j], &d);
        }
        let mut next = Vec::with_capacity(pos.len());
        next.push(b.mux(is_out, pos[0], Bit::ZERO));
        for j in 1..output_len {
            next.push(b.mux(is_out, pos[j], pos[j - 1]));
        }
        if output_len > 0 {
            let sat = b.or(pos[output_len - 1], pos[output_len]);
            next.push(b.mux(is_out, pos[output_len], sat));
        }
        pos = next;
    }
    out
}
