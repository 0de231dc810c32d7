use std::fmt;

use serde::{Deserialize, Serialize};

/// A bit string of explicit length, stored MSB-first in bytes.
///
/// Unused low-order bits of the final byte are always zero, so two `Bits`
/// with equal length and equal content compare equal byte-for-byte.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Bits {
    len: usize,
    bytes: Vec<u8>,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits {
            len,
            bytes: vec![0; len.div_ceil(8)],
        }
    }

    /// Takes the first `len` bits of `bytes`.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Self {
        assert!(bytes.len() * 8 >= len, "not enough bytes for {len} bits");
        let mut out = Bits {
            len,
            bytes: bytes[..len.div_ceil(8)].to_vec(),
        };
        out.clear_tail();
        out
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut out = Bits::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            out.set(i, b);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        (self.bytes[i / 8] >> (7 - i % 8)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len);
        let mask = 1u8 << (7 - i % 8);
        if v {
            self.bytes[i / 8] |= mask;
        } else {
            self.bytes[i / 8] &= !mask;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bools(&self) -> Vec<bool> {
        self.iter().collect()
    }

    pub fn count_ones(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// XOR of two equal-length strings.
    pub fn xor(&self, other: &Bits) -> Bits {
        assert_eq!(self.len, other.len, "xor of unequal lengths");
        Bits {
            len: self.len,
            bytes: self
                .bytes
                .iter()
                .zip(&other.bytes)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    pub fn concat(&self, other: &Bits) -> Bits {
        let mut out = Bits::zeros(self.len + other.len);
        for (i, b) in self.iter().chain(other.iter()).enumerate() {
            out.set(i, b);
        }
        out
    }

    pub fn truncate(&mut self, len: usize) {
        assert!(len <= self.len);
        self.len = len;
        self.bytes.truncate(len.div_ceil(8));
        self.clear_tail();
    }

    /// Interprets the first `min(len, 64)` bits as a big-endian integer.
    pub fn to_u64(&self) -> u64 {
        self.iter().take(64).fold(0u64, |acc, b| (acc << 1) | b as u64)
    }

    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mut out = Bits::zeros(len);
        for i in 0..len {
            out.set(i, (value >> (len - 1 - i)) & 1 == 1);
        }
        out
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 8;
        if rem != 0 {
            if let Some(last) = self.bytes.last_mut() {
                *last &= 0xffu8 << (8 - rem);
            }
        }
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({}:{})", self.len, self.to_hex())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_bits_are_cleared() {
        let b = Bits::from_bytes(&[0xff, 0xff], 11);
        assert_eq!(b.as_bytes(), &[0xff, 0xe0]);
        assert_eq!(b.count_ones(), 11);
    }

    #[test]
    fn u64_roundtrip_msb_first() {
        let b = Bits::from_u64(0b1011, 4);
        assert_eq!(b.to_bools(), vec![true, false, true, true]);
        assert_eq!(b.to_u64(), 0b1011);
    }

    #[test]
    fn concat_and_xor() {
        let a = Bits::from_u64(0b10, 2);
        let b = Bits::from_u64(0b011, 3);
        let c = a.concat(&b);
        assert_eq!(c.to_u64(), 0b10011);
        assert_eq!(c.xor(&c), Bits::zeros(5));
    }
}
