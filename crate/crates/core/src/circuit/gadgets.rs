//! Gate-level descriptions of the sponge permutation, the hash family and
//! the PRG. Each gadget mirrors its native counterpart bit for bit.
//!
//! Bytes are `[Bit; 8]` with index `k` holding the `2^k` bit. Bit strings
//! (hash digests, PRG output) are returned MSB-first to match [`Bits`].
//!
//! [`Bits`]: crate::primitives::Bits

use super::builder::{Bit, Builder};
use crate::primitives::hash::{
    HashIndex, PAD_BYTE, RATE_SHIFT, ROT_AND_A, ROT_AND_B, ROT_XOR, ROUND_CONSTANTS,
};
use crate::primitives::prf::BLOCK_BITS;
use crate::primitives::Bits;

pub type Byte = [Bit; 8];

pub fn const_byte(v: u8) -> Byte {
    std::array::from_fn(|k| Bit::Const((v >> k) & 1 == 1))
}

pub fn const_word(v: u32) -> [Bit; 32] {
    std::array::from_fn(|k| Bit::Const((v >> k) & 1 == 1))
}

/// MSB-first bits of a byte.
pub fn byte_msb_first(b: &Byte) -> impl Iterator<Item = Bit> + '_ {
    (0..8).rev().map(move |k| b[k])
}

/// Bytes from an MSB-first bit list whose length is a multiple of 8.
pub fn bytes_from_msb_bits(bits: &[Bit]) -> Vec<Byte> {
    assert!(bits.len().is_multiple_of(8));
    bits.chunks(8)
        .map(|c| std::array::from_fn(|k| c[7 - k]))
        .collect()
}

pub fn const_bits(bits: &Bits) -> Vec<Bit> {
    bits.iter().map(Bit::Const).collect()
}

fn rotl16(x: &[Bit; 16], k: u32) -> [Bit; 16] {
    std::array::from_fn(|j| x[(j + 16 - k as usize) % 16])
}

/// One application of the sponge permutation. Bit `i` of the array is bit
/// `i` of the native `u32` state.
pub fn permute(b: &mut Builder, state: &[Bit; 32]) -> [Bit; 32] {
    let mut r: [Bit; 16] = std::array::from_fn(|j| state[j]);
    let mut l: [Bit; 16] = std::array::from_fn(|j| state[16 + j]);
    for rc in ROUND_CONSTANTS {
        let la = rotl16(&l, ROT_AND_A);
        let lb = rotl16(&l, ROT_AND_B);
        let lx = rotl16(&l, ROT_XOR);
        let new_l: [Bit; 16] = std::array::from_fn(|j| {
            let f = b.and(la[j], lb[j]);
            let f = b.xor(f, lx[j]);
            let f = b.xor(f, r[j]);
            b.xor(f, Bit::Const((rc >> j) & 1 == 1))
        });
        r = l;
        l = new_l;
    }
    std::array::from_fn(|i| if i < 16 { r[i] } else { l[i - 16] })
}

pub struct SpongeGadget {
    state: [Bit; 32],
}

impl SpongeGadget {
    pub fn new(iv: [Bit; 32]) -> Self {
        SpongeGadget { state: iv }
    }

    pub fn absorb(&mut self, b: &mut Builder, byte: &Byte) {
        for k in 0..8 {
            let i = RATE_SHIFT as usize + k;
            self.state[i] = b.xor(self.state[i], byte[k]);
        }
        self.state = permute(b, &self.state);
    }

    /// Pads, then squeezes `bits` output bits MSB-first.
    pub fn squeeze(mut self, b: &mut Builder, bits: usize) -> Vec<Bit> {
        self.absorb(b, &const_byte(PAD_BYTE));
        let mut out = Vec::with_capacity(bits);
        for i in 0..bits.div_ceil(8) {
            if i > 0 {
                self.state = permute(b, &self.state);
            }
            let byte: Byte = std::array::from_fn(|k| self.state[RATE_SHIFT as usize + k]);
            out.extend(byte_msb_first(&byte));
        }
        out.truncate(bits);
        out
    }
}

/// `hash_eval` with the family index given as 32 state bits.
pub fn hash(b: &mut Builder, iv: [Bit; 32], data: &[Byte], out_bits: usize) -> Vec<Bit> {
    let mut s = SpongeGadget::new(iv);
    for byte in data {
        s.absorb(b, byte);
    }
    s.squeeze(b, out_bits)
}

/// `prg_expand(seed, out_len)`.
pub fn prg(b: &mut Builder, seed: &[Byte], out_len: usize) -> Vec<Bit> {
    let mut out = Vec::with_capacity(out_len);
    for i in 0..out_len.div_ceil(BLOCK_BITS) {
        let remaining = (out_len - out.len()).min(BLOCK_BITS);
        let iv = const_word(HashIndex::PRG_BASE.wrapping_add(i as u32));
        // squeezing fewer bytes than a full block yields a prefix of it
        out.extend(hash(b, iv, seed, remaining.div_ceil(8) * 8));
        out.truncate(out.len() - (remaining.div_ceil(8) * 8 - remaining));
    }
    out
}

/// Gates for one permutation call on all-wire input.
pub fn permutation_gate_count() -> usize {
    let mut b = Builder::new(0, 32);
    let state: [Bit; 32] = std::array::from_fn(|i| b.witness(i));
    permute(&mut b, &state);
    b.gate_count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::hash::permute as native_permute;
    use crate::primitives::{hash_eval, prg_expand};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn bits_of_word(v: u32) -> Vec<bool> {
        (0..32).map(|i| (v >> i) & 1 == 1).collect()
    }

    fn value(b: Bit, wires: &[bool]) -> bool {
        match b {
            Bit::Const(v) => v,
            Bit::Wire(w) => wires[w as usize],
        }
    }

    #[test]
    fn permutation_gadget_matches_native() {
        let mut b = Builder::new(0, 32);
        let state: [Bit; 32] = std::array::from_fn(|i| b.witness(i));
        let out = permute(&mut b, &state);
        let c = b.finish(Bit::ZERO);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x: u32 = rng.gen();
            let wires = c.eval(&[], &bits_of_word(x));
            let got = out
                .iter()
                .enumerate()
                .fold(0u32, |acc, (i, &bit)| acc | (value(bit, &wires) as u32) << i);
            assert_eq!(got, native_permute(x));
        }
    }

    #[test]
    fn permutation_fits_the_block_budget() {
        let gates = permutation_gate_count();
        assert!(gates <= 2000, "{gates} gates per block");
    }

    #[test]
    fn hash_and_prg_gadgets_match_native() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for len in [0usize, 1, 3] {
            let data: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            let iv: u32 = rng.gen();
            let mut b = Builder::new(0, 8 * len.max(1));
            let bytes: Vec<Byte> = (0..len)
                .map(|j| std::array::from_fn(|k| b.witness(8 * j + k)))
                .collect();
            let digest = hash(&mut b, const_word(iv), &bytes, 16);
            let stream = prg(&mut b, &bytes, 40);
            let c = b.finish(Bit::ZERO);
            let mut input: Vec<bool> = data
                .iter()
                .flat_map(|byte| (0..8).map(move |k| (byte >> k) & 1 == 1))
                .collect();
            input.resize(8 * len.max(1), false);
            let wires = c.eval(&[], &input);
            let eval = |bits: &[Bit]| Bits::from_bools(&bits.iter().map(|&x| value(x, &wires)).collect::<Vec<_>>());
            assert_eq!(eval(&digest), hash_eval(HashIndex::new(iv, 16), &data));
            assert_eq!(eval(&stream), prg_expand(&data, 40));
        }
    }
}
