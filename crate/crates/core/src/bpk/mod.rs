//! The bare public-key model and the main protocol.
//!
//! Phase 1: the verifier proves knowledge of one of the preimages behind
//! its public key (Π_v, a two-branch Schnorr OR) and sends `c_e`, a COM₀
//! commitment to the Π_p challenge. Phase 2: the prover commits to some
//! `s` with COM₁ and runs Π_p for
//! `R′ = {x ∈ L} ∨ {y₀ = g^s ∧ c = COM₁(s)} ∨ {y₁ = g^s ∧ c = COM₁(s)}`;
//! the verifier reveals `e` and proves that `c_e` opens to it.
//!
//! All prover coins are a PRF of what it has seen, so a reset prover
//! repeats itself exactly.

mod keys;
mod messages;
mod prover;
mod verifier;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::codec::{Encode, Encoder};
use crate::commitments::{CommitmentKey, PedersenCommitment};
use crate::primitives::{GroupElement, GroupParams, PrfKey, Profile};
use crate::rszk::RszkError;
use crate::sigma::{Instance, OrInstance, SigmaError};

pub use keys::{keygen, keygen_from, keygen_reduction, keygen_with_rng, KeyPair, PublicFile, PublicKey, Record, SecretKey};
pub use messages::{Direction, Msg};
pub use prover::{Prover, ProverTape, ProverVariant, Strategy, SubVerifierMode};
pub use verifier::{PvWitness, SubProverMode, Verifier};

/// Repetitions of the opening sub-proof by default.
pub const DEFAULT_T: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BpkError {
    #[error("registration stage is over")]
    RegistrationClosed,
    #[error("message {got} not expected in round {round}")]
    OutOfOrder { round: usize, got: &'static str },
    #[error("session is finished")]
    Finished,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("bad parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Sigma(#[from] SigmaError),
    #[error(transparent)]
    Rszk(#[from] RszkError),
}

/// Which instantiation of the opening sub-proof runs in step 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubPath {
    /// Derandomized parallel Chaum-Pedersen.
    A,
    /// Barak skeleton with the toy Λ.
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub group: GroupParams,
    /// Shared by COM₀ and COM₁.
    pub ck: CommitmentKey,
    pub path: SubPath,
    pub t: usize,
}

impl Params {
    pub fn new(group: GroupParams, path: SubPath, t: usize) -> Self {
        Params { group, ck: CommitmentKey::public(group), path, t }
    }

    pub fn tiny() -> Self {
        Params::new(GroupParams::generate(Profile::Tiny, 0), SubPath::A, DEFAULT_T)
    }

    pub fn small() -> Self {
        Params::new(GroupParams::generate(Profile::Small, 0), SubPath::A, DEFAULT_T)
    }

    pub fn check(&self) -> Result<(), BpkError> {
        if self.t == 0 || self.t > 64 {
            return Err(BpkError::Params(format!("t = {} outside 1..=64", self.t)));
        }
        if self.ck.group != self.group {
            return Err(BpkError::Params("commitment key over another group".into()));
        }
        Ok(())
    }
}

/// Everything both parties of one session agree on up front.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Common {
    pub params: Params,
    pub pk: PublicKey,
    /// Statement of the demo language: knowledge of `log_g x`.
    pub x: GroupElement,
    pub session: u64,
}

impl Encode for Common {
    fn encode(&self, e: &mut Encoder) {
        let p = &self.params;
        e.u64(0x01, p.group.p).u64(0x02, p.group.q).u64(0x03, p.group.g);
        e.u64(0x04, p.ck.h.value());
        e.u64(0x05, p.t as u64).u64(0x06, matches!(p.path, SubPath::B) as u64);
        e.u64(0x07, self.pk.y0.value()).u64(0x08, self.pk.y1.value());
        e.u64(0x09, self.x.value()).u64(0x0a, self.session);
    }
}

/// Π_v: knowledge of `log_g y₀` or `log_g y₁`.
pub fn pi_v_instance(pk: &PublicKey) -> OrInstance {
    let g = pk.group;
    OrInstance::new(vec![
        Instance::schnorr(g, pk.y0).with_group_bits(),
        Instance::schnorr(g, pk.y1).with_group_bits(),
    ])
    .expect("two Schnorr branches")
}

/// R′ as a three-branch OR: `x ∈ L`, `(y₀, c)`, `(y₁, c)`.
pub fn build_relation_rprime(params: &Params, x: GroupElement, pk: &PublicKey, c: &PedersenCommitment) -> OrInstance {
    let g = params.group;
    let h = params.ck.h;
    OrInstance::new(vec![
        Instance::schnorr(g, x).with_group_bits(),
        Instance::okamoto(g, h, pk.y0, c.c).with_group_bits(),
        Instance::okamoto(g, h, pk.y1, c.c).with_group_bits(),
    ])
    .expect("three algebraic branches")
}

pub(crate) fn digest(data: &[u8]) -> [u8; 32] {
    Sha256::digest(data).into()
}

pub(crate) fn derive_key(key: &PrfKey, label: &str) -> PrfKey {
    key.derive(label.as_bytes())
}

/// What a party does after receiving a message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    Send(Msg),
    Accept,
    Reject(String),
    /// The prover stops without answering.
    Halt(String),
}
