//! Commitment schemes.
//!
//! * COM0, ElGamal-style `(g^r, h^r g^e)`: perfectly binding, and its
//!   opening claim is a discrete-log-equality statement.
//! * COM1, Pedersen `g^m h^r`: perfectly hiding, binding only while
//!   `log_g h` is unknown.
//! * Naor bit commitment `G(s) ^ (b * rc)` against a receiver challenge
//!   `rc` of `3n` bits: statistically binding, and compilable to gates.
//!
//! `h` normally comes from [`GroupParams::hash_to_element`]. A key built with
//! [`CommitmentKey::with_trapdoor`] knows `log_g h`; it exists only so tests
//! can manufacture Pedersen equivocations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::primitives::{prg_expand, Bits, DomainError, GroupElement, GroupParams};

const H_LABEL: &[u8] = b"bpk-rzk/commitment-h";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CommitError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("format error: {0}")]
    Format(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitmentKey {
    pub group: GroupParams,
    pub h: GroupElement,
    /// `log_g h`, present only for negative-test keys.
    pub trapdoor: Option<u64>,
}

impl CommitmentKey {
    pub fn public(group: GroupParams) -> Self {
        CommitmentKey {
            group,
            h: group.hash_to_element(H_LABEL),
            trapdoor: None,
        }
    }

    /// Negative-test mode: `h = g^t` with `t` retained.
    pub fn with_trapdoor(group: GroupParams, t: u64) -> Self {
        let t = t % group.q;
        assert_ne!(t, 0, "trapdoor must be nonzero");
        CommitmentKey {
            group,
            h: group.exp(t),
            trapdoor: Some(t),
        }
    }

    /// An explicit `h`, e.g. from test vectors.
    pub fn with_h(group: GroupParams, h: GroupElement) -> Self {
        CommitmentKey { group, h, trapdoor: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ElGamalCommitment {
    pub u: GroupElement,
    pub v: GroupElement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PedersenCommitment {
    pub c: GroupElement,
}

/// One `3n`-bit string per committed message bit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NaorCommitment {
    pub bits: Vec<Bits>,
}

impl NaorCommitment {
    /// Raw concatenation, each component padded to a byte boundary.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.bits.iter().flat_map(|b| b.as_bytes().iter().copied()).collect()
    }
}

pub fn com0_commit(
    key: &CommitmentKey,
    e: u64,
    r: u64,
) -> Result<ElGamalCommitment, DomainError> {
    let g = &key.group;
    g.check_scalar(e)?;
    g.check_scalar(r)?;
    Ok(ElGamalCommitment {
        u: g.exp(r),
        v: g.mul(g.pow(key.h, r), g.exp(e)),
    })
}

pub fn com1_commit(
    key: &CommitmentKey,
    m: u64,
    r: u64,
) -> Result<PedersenCommitment, DomainError> {
    let g = &key.group;
    g.check_scalar(m)?;
    g.check_scalar(r)?;
    Ok(PedersenCommitment {
        c: g.mul(g.exp(m), g.pow(key.h, r)),
    })
}

/// Second opening of a Pedersen commitment to `new_m`, computed with the
/// trapdoor. `None` for honest keys.
pub fn com1_equivocate(key: &CommitmentKey, m: u64, r: u64, new_m: u64) -> Option<u64> {
    let t = key.trapdoor?;
    let g = &key.group;
    // m + t r = m' + t r'  =>  r' = r + (m - m') / t
    let delta = g.mul_q(g.sub_q(m, new_m), g.inv_q(t)?);
    Some(g.add_q(r, delta))
}

/// Commits one bit: `prg(seed, 3n) ^ (bit ? rc : 0)`.
pub fn naor_commit_bit(rc: &Bits, bit: bool, seed: &[u8]) -> Bits {
    let stream = prg_expand(seed, rc.len());
    if bit {
        stream.xor(rc)
    } else {
        stream
    }
}

pub fn naor_commit(
    rc: &Bits,
    bits: &[bool],
    seeds: &[Vec<u8>],
) -> Result<NaorCommitment, CommitError> {
    if !rc.len().is_multiple_of(3) || rc.is_empty() {
        return Err(CommitError::Format(format!(
            "receiver challenge of {} bits is not 3n",
            rc.len()
        )));
    }
    let n = rc.len() / 3;
    if bits.len() != seeds.len() {
        return Err(CommitError::Format(format!(
            "{} bits but {} seeds",
            bits.len(),
            seeds.len()
        )));
    }
    if let Some(s) = seeds.iter().find(|s| s.len() * 8 != n) {
        return Err(CommitError::Format(format!(
            "seed of {} bits, expected n = {n}",
            s.len() * 8
        )));
    }
    Ok(NaorCommitment {
        bits: bits
            .iter()
            .zip(seeds)
            .map(|(&b, s)| naor_commit_bit(rc, b, s))
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Commitment {
    ElGamal(ElGamalCommitment),
    Pedersen(PedersenCommitment),
    Naor { rc: Bits, value: NaorCommitment },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Opening {
    Scalar { message: u64, randomness: u64 },
    Bits { message: Vec<bool>, seeds: Vec<Vec<u8>> },
}

impl Opening {
    fn same_message(&self, other: &Opening) -> bool {
        match (self, other) {
            (Opening::Scalar { message: a, .. }, Opening::Scalar { message: b, .. }) => a == b,
            (Opening::Bits { message: a, .. }, Opening::Bits { message: b, .. }) => a == b,
            _ => false,
        }
    }
}

/// Accepts iff recommitting the opening reproduces `commitment` exactly.
/// Malformed inputs are rejections, not errors.
pub fn com_verify_opening(key: &CommitmentKey, commitment: &Commitment, opening: &Opening) -> bool {
    match (commitment, opening) {
        (Commitment::ElGamal(c), Opening::Scalar { message, randomness }) => {
            com0_commit(key, *message, *randomness).is_ok_and(|re| re == *c)
        }
        (Commitment::Pedersen(c), Opening::Scalar { message, randomness }) => {
            com1_commit(key, *message, *randomness).is_ok_and(|re| re == *c)
        }
        (Commitment::Naor { rc, value }, Opening::Bits { message, seeds }) => {
            naor_commit(rc, message, seeds).is_ok_and(|re| re == *value)
        }
        _ => false,
    }
}

/// Two valid openings of one commitment to different messages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BindingViolation {
    pub commitment: Commitment,
    pub first: Opening,
    pub second: Opening,
}

impl BindingViolation {
    pub fn is_valid(&self, key: &CommitmentKey) -> bool {
        !self.first.same_message(&self.second)
            && com_verify_opening(key, &self.commitment, &self.first)
            && com_verify_opening(key, &self.commitment, &self.second)
    }

    pub fn to_record(&self) -> String {
        let open = |o: &Opening| match o {
            Opening::Scalar { message, randomness } => format!("{message:x}:{randomness:x}"),
            Opening::Bits { message, .. } => Bits::from_bools(message).to_hex(),
        };
        let c = match &self.commitment {
            Commitment::ElGamal(c) => format!("elgamal:{:x}:{:x}", c.u.value(), c.v.value()),
            Commitment::Pedersen(c) => format!("pedersen:{:x}", c.c.value()),
            Commitment::Naor { value, .. } => format!("naor:{}", hex::encode(value.to_bytes())),
        };
        format!("violation {c} {} {}", open(&self.first), open(&self.second))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::Profile;
    use std::collections::{HashMap, HashSet};

    fn tiny_key_h9() -> CommitmentKey {
        let g = GroupParams::generate(Profile::Tiny, 0);
        CommitmentKey::with_h(g, g.element(9).unwrap())
    }

    #[test]
    fn com0_examples() {
        let k = tiny_key_h9();
        let c = com0_commit(&k, 7, 4).unwrap();
        assert_eq!((c.u.value(), c.v.value()), (16, 9));
        let c = com0_commit(&k, 0, 0).unwrap();
        assert_eq!((c.u.value(), c.v.value()), (1, 1));
        assert!(com0_commit(&k, 11, 0).is_err());
    }

    #[test]
    fn com0_is_perfectly_binding_by_enumeration() {
        let k = tiny_key_h9();
        let mut by_value: HashMap<ElGamalCommitment, HashSet<u64>> = HashMap::new();
        for e in 0..11 {
            for r in 0..11 {
                by_value.entry(com0_commit(&k, e, r).unwrap()).or_default().insert(e);
            }
        }
        assert_eq!(by_value.len(), 121);
        assert!(by_value.values().all(|es| es.len() == 1));
    }

    #[test]
    fn com1_examples() {
        let k = tiny_key_h9();
        assert_eq!(com1_commit(&k, 3, 2).unwrap().c.value(), 4);
        assert_eq!(com1_commit(&k, 0, 0).unwrap().c.value(), 1);
        assert!(com1_commit(&k, 0, 11).is_err());
    }

    #[test]
    fn com1_hides_perfectly_by_enumeration() {
        let k = tiny_key_h9();
        let subgroup: HashSet<_> = k.group.elements().collect();
        for m in 0..11 {
            let image: Vec<_> = (0..11).map(|r| com1_commit(&k, m, r).unwrap().c).collect();
            let set: HashSet<_> = image.iter().copied().collect();
            assert_eq!(set.len(), 11, "each element exactly once");
            assert_eq!(set, subgroup);
        }
    }

    #[test]
    fn trapdoor_equivocation_is_detected_as_violation() {
        let g = GroupParams::generate(Profile::Tiny, 0);
        let k = CommitmentKey::with_trapdoor(g, 5);
        let c = com1_commit(&k, 3, 7).unwrap();
        let r2 = com1_equivocate(&k, 3, 7, 9).unwrap();
        let v = BindingViolation {
            commitment: Commitment::Pedersen(c),
            first: Opening::Scalar { message: 3, randomness: 7 },
            second: Opening::Scalar { message: 9, randomness: r2 },
        };
        assert!(v.is_valid(&k));
        assert!(com1_equivocate(&CommitmentKey::public(g), 3, 7, 9).is_none());
    }

    #[test]
    fn verify_opening_rejects_wrong_message() {
        let k = tiny_key_h9();
        let c = Commitment::ElGamal(com0_commit(&k, 7, 4).unwrap());
        assert!(com_verify_opening(&k, &c, &Opening::Scalar { message: 7, randomness: 4 }));
        assert!(!com_verify_opening(&k, &c, &Opening::Scalar { message: 8, randomness: 4 }));
        assert!(!com_verify_opening(&k, &c, &Opening::Scalar { message: 99, randomness: 4 }));
    }

    #[test]
    fn naor_zero_bit_is_the_prg_stream() {
        let rc = Bits::from_bytes(&[0xa5, 0x3c, 0x0f], 24);
        let seed = vec![0x42];
        assert_eq!(naor_commit_bit(&rc, false, &seed), prg_expand(&seed, 24));
        let c = naor_commit(&rc, &[true, false], &[seed.clone(), seed.clone()]).unwrap();
        assert_eq!(c.bits[0].xor(&c.bits[1]), rc);
    }

    #[test]
    fn naor_format_errors() {
        let rc = Bits::zeros(24);
        assert!(naor_commit(&rc, &[true], &[]).is_err());
        assert!(naor_commit(&rc, &[true], &[vec![1, 2]]).is_err());
        assert!(naor_commit(&Bits::zeros(23), &[true], &[vec![1]]).is_err());
    }

    #[test]
    fn naor_opening_roundtrip() {
        let rc = Bits::from_bytes(&[1, 2, 3], 24);
        let seeds = vec![vec![4], vec![5]];
        let value = naor_commit(&rc, &[true, false], &seeds).unwrap();
        let k = tiny_key_h9();
        let c = Commitment::Naor { rc, value };
        let good = Opening::Bits { message: vec![true, false], seeds: seeds.clone() };
        let bad = Opening::Bits { message: vec![false, false], seeds };
        assert!(com_verify_opening(&k, &c, &good));
        assert!(!com_verify_opening(&k, &c, &bad));
    }
}
