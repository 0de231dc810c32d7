//! Counter-mode PRG and the keyed PRF ensemble.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::bits::Bits;
use super::hash::{HashIndex, Sponge};

/// Bits produced per hash call by the PRG and the PRF.
pub const BLOCK_BITS: usize = 32;

/// `prg_expand(seed, out_len)`: block `i` is `h_{PRG_BASE + i}(seed)`
/// squeezed to 32 bits; the blocks are concatenated and truncated.
///
/// Indexing the counter through the family member (the initial state)
/// keeps each block a single absorb of the seed.
pub fn prg_expand(seed: &[u8], out_len: usize) -> Bits {
    let blocks = out_len.div_ceil(BLOCK_BITS);
    let mut bytes = Vec::with_capacity(blocks * 4);
    for i in 0..blocks {
        let mut s = Sponge::new(HashIndex::PRG_BASE.wrapping_add(i as u32));
        s.absorb(seed);
        bytes.extend_from_slice(s.squeeze(BLOCK_BITS).as_bytes());
    }
    Bits::from_bytes(&bytes, out_len)
}

/// A PRF seed of `n` bits (`n` a multiple of 8).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrfKey {
    bytes: Vec<u8>,
}

impl std::fmt::Debug for PrfKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PrfKey({})", hex::encode(&self.bytes))
    }
}

impl PrfKey {
    pub fn new(bytes: Vec<u8>) -> Self {
        assert!(!bytes.is_empty() && bytes.len() <= 64, "key length");
        PrfKey { bytes }
    }

    pub fn random<R: Rng + ?Sized>(n_bits: usize, rng: &mut R) -> Self {
        assert!(n_bits.is_multiple_of(8), "key length must be whole bytes");
        let mut bytes = vec![0u8; n_bits / 8];
        rng.fill(&mut bytes[..]);
        PrfKey::new(bytes)
    }

    pub fn n_bits(&self) -> usize {
        self.bytes.len() * 8
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Derives a subkey of the same length, for handing a party its own
    /// key without exposing this one.
    pub fn derive(&self, label: &[u8]) -> PrfKey {
        PrfKey::new(prf_expand(self, label, self.n_bits()).as_bytes().to_vec())
    }
}

/// Counter expansion of the keyed hash to `out_bits`:
/// block `i` = `H_PRF(len(k) || k || x || be32(i))`.
pub fn prf_expand(key: &PrfKey, x: &[u8], out_bits: usize) -> Bits {
    let mut prefix = Sponge::new(HashIndex::PRF.iv);
    prefix.absorb(&(key.bytes.len() as u16).to_be_bytes());
    prefix.absorb(&key.bytes);
    prefix.absorb(x);
    let blocks = out_bits.div_ceil(BLOCK_BITS);
    let mut bytes = Vec::with_capacity(blocks * 4);
    for i in 0..blocks as u32 {
        let mut s = prefix.clone();
        s.absorb(&i.to_be_bytes());
        bytes.extend_from_slice(s.squeeze(BLOCK_BITS).as_bytes());
    }
    Bits::from_bytes(&bytes, out_bits)
}

/// `f_k(x)` with output length `d(n) = n`.
pub fn prf_eval(key: &PrfKey, x: &[u8]) -> Bits {
    prf_expand(key, x, key.n_bits())
}

/// A deterministic coin stream keyed by `prf_k(label || x)`.
pub fn prf_rng(key: &PrfKey, label: &[u8], x: &[u8]) -> ChaCha20Rng {
    let mut input = Vec::with_capacity(2 + label.len() + x.len());
    input.extend_from_slice(&(label.len() as u16).to_be_bytes());
    input.extend_from_slice(label);
    input.extend_from_slice(x);
    let seed = prf_expand(key, &input, 256);
    let mut s = [0u8; 32];
    s.copy_from_slice(seed.as_bytes());
    ChaCha20Rng::from_seed(s)
}
