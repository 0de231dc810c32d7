//! Compiler for the bounded trapdoor language
//! `Λ = {(h, c, r) : ∃ Π, s. c = Com(h(Π), s) ∧ Π(c) = r ∧ |Π| ≤ B}`.
//!
//! `Π` is hashed as its NOP-padded `B`-slot encoding, so the circuit has a
//! fixed shape. Inside the circuit the program runs under the total
//! semantics of [`vm_run_raw`]; any validated program behaves identically.
//!
//! Public input wires, in order: the 32 bits of the hash family index
//! (bit `i` of the `u32`), `rc`, each component of `c`, then `r`. Bit
//! strings keep their `Bits` order. Witness wires: the `2B` encoding bytes,
//! then the `n` seeds, each byte LSB first.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::builder::{Bit, Builder};
use super::gadgets::{self, bytes_from_msb_bits, Byte};
use super::vm::{vm_gadget, vm_run, VmProgram, MAX_INSTRUCTIONS, MAX_STEPS};
use super::{Circuit, CircuitError};
use crate::commitments::{naor_commit, NaorCommitment};
use crate::primitives::{hash_eval, Bits, HashIndex};

/// Largest supported security parameter inside the circuit.
pub const MAX_N: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaBounds {
    /// `B`: instruction slots.
    pub max_instructions: usize,
    /// `T`: step bound. Straight-line programs need `B <= T`.
    pub max_steps: usize,
}

impl LambdaBounds {
    pub const TOY: LambdaBounds = LambdaBounds { max_instructions: 4, max_steps: 8 };

    pub fn check(&self) -> Result<(), CircuitError> {
        if self.max_instructions == 0 || self.max_instructions > MAX_INSTRUCTIONS {
            return Err(CircuitError::Capacity(format!(
                "B = {} outside 1..={MAX_INSTRUCTIONS}",
                self.max_instructions
            )));
        }
        if self.max_steps > MAX_STEPS || self.max_steps < self.max_instructions {
            return Err(CircuitError::Capacity(format!(
                "T = {} outside {}..={MAX_STEPS}",
                self.max_steps, self.max_instructions
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LambdaStatement {
    pub h: HashIndex,
    pub rc: Bits,
    pub c: NaorCommitment,
    pub r: Bits,
}

impl LambdaStatement {
    pub fn n(&self) -> usize {
        self.rc.len() / 3
    }

    /// VM input: the commitment bytes.
    pub fn vm_input(&self) -> Vec<u8> {
        self.c.to_bytes()
    }

    pub fn check(&self) -> Result<usize, CircuitError> {
        let n = self.n();
        if n == 0 || !n.is_multiple_of(8) || self.rc.len() != 3 * n {
            return Err(CircuitError::Malformed(format!("rc of {} bits", self.rc.len())));
        }
        if n > MAX_N || 3 * n * n / 8 > 256 {
            return Err(CircuitError::Capacity(format!("n = {n} too large")));
        }
        if self.h.out_bits as usize != n {
            return Err(CircuitError::Malformed("hash output length differs from n".into()));
        }
        if self.c.bits.len() != n || self.c.bits.iter().any(|b| b.len() != 3 * n) {
            return Err(CircuitError::Malformed("commitment shape".into()));
        }
        if self.r.len() != n {
            return Err(CircuitError::Malformed("r length".into()));
        }
        Ok(n)
    }

    /// Public input assignment in wire order.
    pub fn public_inputs(&self) -> Vec<bool> {
        let mut v: Vec<bool> = (0..32).map(|i| (self.h.iv >> i) & 1 == 1).collect();
        v.extend(self.rc.iter());
        for b in &self.c.bits {
            v.extend(b.iter());
        }
        v.extend(self.r.iter());
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaWitness {
    pub program: VmProgram,
    pub seeds: Vec<Vec<u8>>,
}

/// Commits to `h(encode_B(Π))` as a prover of Barak's protocol does.
pub fn commit_program<R: Rng + ?Sized>(
    h: HashIndex,
    rc: &Bits,
    program: &VmProgram,
    bounds: LambdaBounds,
    rng: &mut R,
) -> Result<(NaorCommitment, Vec<Vec<u8>>), CircuitError> {
    let n = rc.len() / 3;
    let digest = hash_eval(h, &program.encode_padded(bounds.max_instructions)?);
    let seeds: Vec<Vec<u8>> = (0..n)
        .map(|_| {
            let mut s = vec![0u8; n / 8];
            rng.fill(&mut s[..]);
            s
        })
        .collect();
    let c = naor_commit(rc, &digest.to_bools(), &seeds)
        .map_err(|e| CircuitError::Malformed(e.to_string()))?;
    Ok((c, seeds))
}

/// Native membership check, independent of the circuit.
pub fn lambda_holds(stmt: &LambdaStatement, bounds: LambdaBounds, w: &LambdaWitness) -> bool {
    let Ok(n) = stmt.check() else { return false };
    let p = &w.program;
    if bounds.check().is_err()
        || p.validate(bounds.max_instructions).is_err()
        || p.input_len != 3 * n * n / 8
        || p.output_len != n / 8
    {
        return false;
    }
    let Ok(enc) = p.encode_padded(bounds.max_instructions) else { return false };
    let digest = hash_eval(stmt.h, &enc);
    match naor_commit(&stmt.rc, &digest.to_bools(), &w.seeds) {
        Ok(c) if c == stmt.c => {}
        _ => return false,
    }
    matches!(vm_run(p, &stmt.vm_input()), Ok(out) if out == stmt.r.as_bytes())
}

#[derive(Clone, Debug)]
pub struct LambdaCircuit {
    pub circuit: Circuit,
    pub n: usize,
    pub bounds: LambdaBounds,
}

impl LambdaCircuit {
    /// Witness wire assignment for `(Π, s)`.
    pub fn witness_bits(&self, w: &LambdaWitness) -> Result<Vec<bool>, CircuitError> {
        let enc = w.program.encode_padded(self.bounds.max_instructions)?;
        if w.seeds.len() != self.n || w.seeds.iter().any(|s| s.len() != self.n / 8) {
            return Err(CircuitError::Malformed("seed shape".into()));
        }
        let bytes = enc.iter().chain(w.seeds.iter().flatten());
        Ok(bytes.flat_map(|&b| (0..8).map(move |k| (b >> k) & 1 == 1)).collect())
    }

    /// Inverse of [`witness_bits`](Self::witness_bits) on the raw level:
    /// the padded program encoding and the seeds.
    pub fn split_witness(&self, bits: &[bool]) -> (Vec<u8>, Vec<Vec<u8>>) {
        let bytes: Vec<u8> = bits
            .chunks(8)
            .map(|c| c.iter().enumerate().fold(0u8, |a, (k, &v)| a | (v as u8) << k))
            .collect();
        let split = 2 * self.bounds.max_instructions;
        let seeds = bytes[split..].chunks(self.n / 8).map(|c| c.to_vec()).collect();
        (bytes[..split].to_vec(), seeds)
    }
}

/// Builds the circuit deciding `Λ` for statements shaped like `stmt`. The
/// circuit depends only on `n` and the bounds; statement values enter as
/// public inputs.
pub fn compile_lambda(stmt: &LambdaStatement, bounds: LambdaBounds) -> Result<LambdaCircuit, CircuitError> {
    bounds.check()?;
    let n = stmt.check()?;
    compile_lambda_shape(n, bounds)
}

/// The same circuit from the shape alone.
pub fn compile_lambda_shape(n: usize, bounds: LambdaBounds) -> Result<LambdaCircuit, CircuitError> {
    bounds.check()?;
    if n == 0 || !n.is_multiple_of(8) {
        return Err(CircuitError::Malformed(format!("n = {n}")));
    }
    if n > MAX_N || 3 * n * n / 8 > 256 {
        return Err(CircuitError::Capacity(format!("n = {n} too large")));
    }
    let slots = bounds.max_instructions;
    let num_public = 32 + 3 * n + 3 * n * n + n;
    let num_witness = 16 * slots + n * n;
    let mut b = Builder::new(num_public, num_witness);

    let iv: [Bit; 32] = std::array::from_fn(|i| b.public(i));
    let rc: Vec<Bit> = (0..3 * n).map(|i| b.public(32 + i)).collect();
    let c: Vec<Vec<Bit>> = (0..n)
        .map(|i| (0..3 * n).map(|j| b.public(32 + 3 * n + 3 * n * i + j)).collect())
        .collect();
    let r: Vec<Bit> = (0..n).map(|i| b.public(32 + 3 * n + 3 * n * n + i)).collect();

    let wbyte = |b: &Builder, j: usize| -> Byte { std::array::from_fn(|k| b.witness(8 * j + k)) };
    let code: Vec<[Byte; 2]> = (0..slots)
        .map(|s| [wbyte(&b, 2 * s), wbyte(&b, 2 * s + 1)])
        .collect();
    let seeds: Vec<Vec<Byte>> = (0..n)
        .map(|i| (0..n / 8).map(|j| wbyte(&b, 2 * slots + i * n / 8 + j)).collect())
        .collect();

    let mut diffs = Vec::new();
    let enc: Vec<Byte> = code.iter().flatten().copied().collect();
    let digest = gadgets::hash(&mut b, iv, &enc, n);
    for i in 0..n {
        let stream = gadgets::prg(&mut b, &seeds[i], 3 * n);
        for j in 0..3 * n {
            let m = b.and(digest[i], rc[j]);
            let x = b.xor(stream[j], m);
            diffs.push(b.xor(x, c[i][j]));
        }
    }
    let flat_c: Vec<Bit> = c.iter().flatten().copied().collect();
    let input = bytes_from_msb_bits(&flat_c);
    let out = vm_gadget(&mut b, &code, &input, n / 8);
    let want = bytes_from_msb_bits(&r);
    for (o, w) in out.iter().zip(&want) {
        for k in 0..8 {
            diffs.push(b.xor(o[k], w[k]));
        }
    }
    let any = b.or_all(&diffs);
    let ok = b.not(any);
    Ok(LambdaCircuit { circuit: b.finish(ok), n, bounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::vm::Instr;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn statement(program: &VmProgram, rng: &mut ChaCha20Rng) -> (LambdaStatement, LambdaWitness) {
        let n = 8;
        let h = HashIndex::new(rng.gen(), n as u16);
        let mut rc = Bits::zeros(3 * n);
        for i in 0..3 * n {
            rc.set(i, rng.gen());
        }
        let (c, seeds) = commit_program(h, &rc, program, LambdaBounds::TOY, rng).unwrap();
        let input = c.to_bytes();
        let r = vm_run(program, &input).unwrap();
        let stmt = LambdaStatement { h, rc, c, r: Bits::from_bytes(&r, n) };
        (stmt, LambdaWitness { program: program.clone(), seeds })
    }

    #[test]
    fn honest_witness_satisfies() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for prog in [
            VmProgram::constant(&[0x3c], 24),
            VmProgram::echo(1, 24),
            VmProgram::new(
                vec![
                    Instr::In { dst: 1, index: 5 },
                    Instr::Ldi { dst: 2, imm: 0x81 },
                    Instr::Xor { dst: 1, src: 2 },
                    Instr::Out { src: 1 },
                ],
                24,
                1,
            )
            .unwrap(),
        ] {
            let (stmt, w) = statement(&prog, &mut rng);
            assert!(lambda_holds(&stmt, LambdaBounds::TOY, &w));
            let lc = compile_lambda(&stmt, LambdaBounds::TOY).unwrap();
            let bits = lc.witness_bits(&w).unwrap();
            assert!(lc.circuit.is_satisfied(&stmt.public_inputs(), &bits));
            let (enc, seeds) = lc.split_witness(&bits);
            assert_eq!(enc, prog.encode_padded(4).unwrap());
            assert_eq!(seeds, w.seeds);
        }
    }

    #[test]
    fn wrong_r_or_seed_is_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let prog = VmProgram::echo(1, 24);
        let (stmt, w) = statement(&prog, &mut rng);
        let lc = compile_lambda(&stmt, LambdaBounds::TOY).unwrap();
        let mut bad_r = stmt.clone();
        bad_r.r.set(3, !bad_r.r.get(3));
        assert!(!lambda_holds(&bad_r, LambdaBounds::TOY, &w));
        assert!(!lc.circuit.is_satisfied(&bad_r.public_inputs(), &lc.witness_bits(&w).unwrap()));
        let mut bad_s = w.clone();
        bad_s.seeds[2][0] ^= 1;
        assert!(!lambda_holds(&stmt, LambdaBounds::TOY, &bad_s));
        assert!(!lc.circuit.is_satisfied(&stmt.public_inputs(), &lc.witness_bits(&bad_s).unwrap()));
    }

    #[test]
    fn oversize_bounds_are_capacity_errors() {
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let (stmt, _) = statement(&VmProgram::echo(1, 24), &mut rng);
        for bounds in [
            LambdaBounds { max_instructions: 65, max_steps: 256 },
            LambdaBounds { max_instructions: 4, max_steps: 257 },
        ] {
            assert!(matches!(compile_lambda(&stmt, bounds), Err(CircuitError::Capacity(_))));
        }
    }

    #[test]
    fn circuit_shape_is_statement_independent() {
        let mut rng = ChaCha20Rng::seed_from_u64(14);
        let (a, _) = statement(&VmProgram::echo(1, 24), &mut rng);
        let (b, _) = statement(&VmProgram::constant(&[7], 24), &mut rng);
        let ca = compile_lambda(&a, LambdaBounds::TOY).unwrap().circuit;
        let cb = compile_lambda(&b, LambdaBounds::TOY).unwrap().circuit;
        assert_eq!(ca, cb);
    }
}
