//! Prime-order subgroups of `Z_p^*` for safe primes `p = 2q + 1`.
//!
//! All arithmetic fits a 128-bit accumulator: the `small` profile keeps
//! `p < 2^62`, so every product of two residues is below `2^124`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::hash::{HashIndex, Sponge};
use super::DomainError;

/// Size class of a group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Profile {
    /// `q <= 2^10`: every distribution over exponents is enumerable.
    Tiny,
    /// `q >= 2^60`: for throughput runs.
    Small,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Tiny => "tiny",
            Profile::Small => "small",
        }
    }
}

const TINY_MIN_Q: u64 = 11;
const TINY_MAX_Q: u64 = 1 << 10;
const SMALL_MIN_Q: u64 = 1 << 60;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupParams {
    pub p: u64,
    pub q: u64,
    pub g: u64,
    pub profile: Profile,
}

/// An element of the order-`q` subgroup.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement(u64);

impl GroupElement {
    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "El({})", self.0)
    }
}

impl fmt::Debug for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Group[{}](p={}, q={}, g={})",
            self.profile.name(),
            self.p,
            self.q,
            self.g
        )
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Trial division; used for the tiny profile where it is exhaustive.
pub fn is_prime_trial(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Miller-Rabin with the first twelve prime bases, which is exact for all
/// 64-bit inputs.
pub fn is_prime_mr(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn tiny_safe_primes() -> Vec<u64> {
    (TINY_MIN_Q..=TINY_MAX_Q)
        .filter(|&q| is_prime_trial(q) && is_prime_trial(2 * q + 1))
        .collect()
}

impl GroupParams {
    /// Deterministic parameter search.
    ///
    /// `tiny` walks the list of safe primes with `11 <= q <= 2^10` (seed 0
    /// gives `p = 23`); `small` starts from a seed-derived 61-bit odd
    /// number and walks upward until `q` and `2q + 1` are both prime. The
    /// generator is the least `g >= 2` with `g^q = 1`.
    pub fn generate(profile: Profile, seed: u64) -> GroupParams {
        let q = match profile {
            Profile::Tiny => {
                let list = tiny_safe_primes();
                list[(seed % list.len() as u64) as usize]
            }
            Profile::Small => {
                let mut q = SMALL_MIN_Q | (splitmix64(seed) & ((1 << 59) - 1)) | 1;
                while !(is_prime_mr(q) && is_prime_mr(2 * q + 1)) {
                    q += 2;
                }
                q
            }
        };
        let p = 2 * q + 1;
        let g = (2..p)
            .find(|&g| pow_mod(g, q, p) == 1)
            .expect("a safe-prime group has quadratic residues");
        GroupParams { p, q, g, profile }
    }

    /// Rebuilds parameters read from a file; the profile follows from `q`.
    pub fn from_parts(p: u64, q: u64, g: u64) -> Result<GroupParams, DomainError> {
        let profile = if q <= TINY_MAX_Q { Profile::Tiny } else { Profile::Small };
        let params = GroupParams { p, q, g, profile };
        params.validate()?;
        Ok(params)
    }

    /// Re-checks every parameter invariant.
    pub fn validate(&self) -> Result<(), DomainError> {
        let prime = |n| match self.profile {
            Profile::Tiny => is_prime_trial(n),
            Profile::Small => is_prime_mr(n),
        };
        if !prime(self.p) || !prime(self.q) {
            return Err(DomainError::InvalidGroup("p and q must be prime"));
        }
        if !(self.p - 1).is_multiple_of(self.q) {
            return Err(DomainError::InvalidGroup("q must divide p - 1"));
        }
        if self.g <= 1 || self.g >= self.p || pow_mod(self.g, self.q, self.p) != 1 {
            return Err(DomainError::InvalidGroup("g must generate the order-q subgroup"));
        }
        let size_ok = match self.profile {
            Profile::Tiny => self.q <= TINY_MAX_Q,
            Profile::Small => self.q >= SMALL_MIN_Q && self.p < (1 << 62),
        };
        if !size_ok {
            return Err(DomainError::InvalidGroup("q outside the profile's size class"));
        }
        Ok(())
    }

    pub fn generator(&self) -> GroupElement {
        GroupElement(self.g)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(1)
    }

    pub fn is_member(&self, v: u64) -> bool {
        v >= 1 && v < self.p && pow_mod(v, self.q, self.p) == 1
    }

    /// Wraps a raw residue after a subgroup-membership check.
    pub fn element(&self, v: u64) -> Result<GroupElement, DomainError> {
        if self.is_member(v) {
            Ok(GroupElement(v))
        } else {
            Err(DomainError::NotInSubgroup(v))
        }
    }

    pub fn mul(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        GroupElement(mul_mod(a.0, b.0, self.p))
    }

    pub fn pow(&self, a: GroupElement, e: u64) -> GroupElement {
        GroupElement(pow_mod(a.0, e % self.q, self.p))
    }

    pub fn inv(&self, a: GroupElement) -> GroupElement {
        self.pow(a, self.q - 1)
    }

    pub fn div(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        self.mul(a, self.inv(b))
    }

    /// `g^x` for an exponent already reduced mod `q`.
    pub fn exp(&self, x: u64) -> GroupElement {
        self.pow(self.generator(), x)
    }

    pub fn check_scalar(&self, x: u64) -> Result<u64, DomainError> {
        if x < self.q {
            Ok(x)
        } else {
            Err(DomainError::OutOfRange { value: x, bound: self.q })
        }
    }

    pub fn add_q(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.q as u128) as u64
    }

    pub fn sub_q(&self, a: u64, b: u64) -> u64 {
        self.add_q(a, self.q - b % self.q)
    }

    pub fn mul_q(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.q)
    }

    /// Inverse mod the prime `q`; `None` for zero.
    pub fn inv_q(&self, a: u64) -> Option<u64> {
        let a = a % self.q;
        (a != 0).then(|| pow_mod(a, self.q - 2, self.q))
    }

    pub fn random_scalar<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.q)
    }

    /// Width of the bit-string challenge space that embeds injectively
    /// into `Z_q`: `floor(log2 q)`.
    pub fn challenge_bits(&self) -> u8 {
        (63 - self.q.leading_zeros()) as u8
    }

    /// Fixed big-endian encoding width: `ceil(bits(p) / 8)`.
    pub fn element_width(&self) -> usize {
        ((64 - self.p.leading_zeros()) as usize).div_ceil(8)
    }

    pub fn encode_element(&self, a: GroupElement) -> Vec<u8> {
        let w = self.element_width();
        a.0.to_be_bytes()[8 - w..].to_vec()
    }

    pub fn decode_element(&self, bytes: &[u8]) -> Result<GroupElement, DomainError> {
        if bytes.len() != self.element_width() {
            return Err(DomainError::Encoding("group element width"));
        }
        let mut buf = [0u8; 8];
        buf[8 - bytes.len()..].copy_from_slice(bytes);
        self.element(u64::from_be_bytes(buf))
    }

    /// Maps a public label into the subgroup so that nobody knows the
    /// discrete log of the result relative to `g`.
    pub fn hash_to_element(&self, label: &[u8]) -> GroupElement {
        let cofactor = (self.p - 1) / self.q;
        for ctr in 0u32.. {
            let mut sponge = Sponge::new(HashIndex::TO_GROUP.iv);
            sponge.absorb(&self.p.to_be_bytes());
            sponge.absorb(label);
            sponge.absorb(&ctr.to_be_bytes());
            let raw = sponge.squeeze(64).to_u64() % self.p;
            let h = pow_mod(raw, cofactor, self.p);
            if h > 1 && h != self.g {
                return GroupElement(h);
            }
        }
        unreachable!()
    }

    /// Every subgroup element, in order of increasing exponent.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.q).map(move |x| self.exp(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> GroupParams {
        GroupParams::generate(Profile::Tiny, 0)
    }

    #[test]
    fn tiny_seed_zero_is_23_11_2() {
        let g = tiny();
        assert_eq!((g.p, g.q, g.g), (23, 11, 2));
        assert_eq!(pow_mod(2, 11, 23), 1);
        g.validate().unwrap();
    }

    #[test]
    fn every_tiny_seed_is_valid() {
        for seed in 0..200 {
            let g = GroupParams::generate(Profile::Tiny, seed);
            g.validate().unwrap();
            assert_ne!(g.g, 1);
            assert_eq!(pow_mod(g.g, g.q, g.p), 1);
        }
    }

    #[test]
    fn small_profile_sizes() {
        let g = GroupParams::generate(Profile::Small, 7);
        assert!(g.q >= 1 << 60);
        g.validate().unwrap();
        assert_eq!(g.challenge_bits(), 60);
        assert_eq!(g.element_width(), 8);
    }

    #[test]
    fn miller_rabin_agrees_with_trial_division() {
        for n in 0..20_000u64 {
            assert_eq!(is_prime_mr(n), is_prime_trial(n), "n = {n}");
        }
        // strong pseudoprime to bases 2..=37 except the full set
        assert!(!is_prime_mr(3_825_123_056_546_413_051));
    }

    #[test]
    fn scalar_inverse() {
        let g = tiny();
        assert_eq!(g.inv_q(3), Some(4));
        assert_eq!(g.inv_q(0), None);
        assert_eq!(g.sub_q(2, 5), 8);
    }

    #[test]
    fn element_codec() {
        let g = tiny();
        assert_eq!(g.element_width(), 1);
        let e = g.exp(3);
        assert_eq!(g.encode_element(e), vec![8]);
        assert_eq!(g.decode_element(&[8]).unwrap(), e);
        assert!(g.decode_element(&[5]).is_err(), "5 is a non-residue mod 23");
    }

    #[test]
    fn hashed_element_is_a_nontrivial_member() {
        let g = tiny();
        let h = g.hash_to_element(b"h");
        assert!(g.is_member(h.value()));
        assert_ne!(h, g.identity());
    }
}
