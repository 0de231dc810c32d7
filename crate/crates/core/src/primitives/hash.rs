//! A toy sponge hash over a 32-bit Feistel permutation.
//!
//! The permutation splits the state into halves `(l, r)` of 16 bits and runs
//! [`ROUNDS`] rounds of
//!
//! ```text
//! l' = r ^ f(l) ^ RC[i],  r' = l,    f(x) = (x <<< 1 & x <<< 8) ^ (x <<< 2)
//! ```
//!
//! Only rotations (free wiring), XOR and AND appear, so one permutation
//! call costs `ROUNDS * 48` two-input gates plus constant inversions in a
//! boolean circuit. The sponge absorbs one byte per call into the low byte
//! of `l`, pads with a single `0x01` byte and squeezes one byte per call
//! from the same position. The hash family is indexed by the 32-bit initial
//! state.

use serde::{Deserialize, Serialize};

use super::bits::Bits;

pub const ROUNDS: usize = 12;

pub const ROUND_CONSTANTS: [u16; ROUNDS] = [
    0x243f, 0x6a88, 0x85a3, 0x08d3, 0x1319, 0x8a2e, 0x0370, 0x7344, 0xa409, 0x3822, 0x299f,
    0x31d0,
];

/// Left-rotation amounts used by the round function, in `f`'s order.
pub const ROT_AND_A: u32 = 1;
pub const ROT_AND_B: u32 = 8;
pub const ROT_XOR: u32 = 2;

/// Bit offset of the rate byte inside the 32-bit state.
pub const RATE_SHIFT: u32 = 16;

pub const PAD_BYTE: u8 = 0x01;

#[inline]
pub fn round_fn(x: u16) -> u16 {
    (x.rotate_left(ROT_AND_A) & x.rotate_left(ROT_AND_B)) ^ x.rotate_left(ROT_XOR)
}

#[inline]
pub fn permute(state: u32) -> u32 {
    let mut l = (state >> 16) as u16;
    let mut r = state as u16;
    for rc in ROUND_CONSTANTS {
        let t = l;
        l = r ^ round_fn(l) ^ rc;
        r = t;
    }
    ((l as u32) << 16) | r as u32
}

/// Selects one function of the family: initial state plus output length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HashIndex {
    pub iv: u32,
    pub out_bits: u16,
}

impl HashIndex {
    pub const TO_GROUP: HashIndex = HashIndex { iv: 0x6772_7030, out_bits: 64 };
    pub const PRF: HashIndex = HashIndex { iv: 0x7072_6630, out_bits: 32 };
    pub const PRG_BASE: u32 = 0x7072_6700;

    pub fn new(iv: u32, out_bits: u16) -> Self {
        HashIndex { iv, out_bits }
    }
}

#[derive(Clone, Debug)]
pub struct Sponge {
    state: u32,
}

impl Sponge {
    pub fn new(iv: u32) -> Self {
        Sponge { state: iv }
    }

    #[inline]
    pub fn absorb_byte(&mut self, b: u8) {
        self.state = permute(self.state ^ ((b as u32) << RATE_SHIFT));
    }

    pub fn absorb(&mut self, data: &[u8]) {
        for &b in data {
            self.absorb_byte(b);
        }
    }

    /// Pads, then squeezes `bits` output bits.
    pub fn squeeze(mut self, bits: usize) -> Bits {
        self.absorb_byte(PAD_BYTE);
        let nbytes = bits.div_ceil(8);
        let mut out = Vec::with_capacity(nbytes);
        for i in 0..nbytes {
            if i > 0 {
                self.state = permute(self.state);
            }
            out.push((self.state >> RATE_SHIFT) as u8);
        }
        Bits::from_bytes(&out, bits)
    }
}

/// `h(data)` for the selected family member; always `h.out_bits` long.
pub fn hash_eval(h: HashIndex, data: &[u8]) -> Bits {
    let mut s = Sponge::new(h.iv);
    s.absorb(data);
    s.squeeze(h.out_bits as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn permutation_is_invertible() {
        fn inverse(state: u32) -> u32 {
            let mut l = (state >> 16) as u16;
            let mut r = state as u16;
            for rc in ROUND_CONSTANTS.iter().rev() {
                let t = r;
                r = l ^ round_fn(r) ^ rc;
                l = t;
            }
            ((l as u32) << 16) | r as u32
        }
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let x: u32 = rng.gen();
            assert_eq!(inverse(permute(x)), x);
        }
    }

    #[test]
    fn output_length_is_fixed() {
        let h = HashIndex::new(7, 16);
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for len in (0..=1 << 16).step_by(4099).chain([1, 2, 3]) {
            let data: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            assert_eq!(hash_eval(h, &data).len(), 16);
        }
        assert_eq!(hash_eval(HashIndex::new(7, 13), b"abc").len(), 13);
    }

    #[test]
    fn family_members_differ() {
        let a = hash_eval(HashIndex::new(1, 32), b"");
        let b = hash_eval(HashIndex::new(2, 32), b"");
        assert_ne!(a, b);
    }

    #[test]
    fn padding_separates_trailing_pad_byte() {
        let h = HashIndex::new(9, 32);
        assert_ne!(hash_eval(h, &[]), hash_eval(h, &[PAD_BYTE]));
    }
}
