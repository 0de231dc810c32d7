//! Σ-protocols: Schnorr, Chaum-Pedersen, the Okamoto-style instance for
//! `y = g^w ∧ c = g^w h^r`, and circuit satisfiability; parallel copies,
//! the k-way OR combinator and the four-round variant.
//!
//! A challenge is a `u64`. For [`ChallengeSpace::Zq`] it is an element of
//! `Z_q`. For [`ChallengeSpace::Bits`]`(w)` it is a `w·copies`-bit string
//! and copy `i` reads bits `w·i .. w·(i+1)`; algebraic copies reduce their
//! slice mod `q` (exact whenever `2^w <= q`).

pub mod or;

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::csat::{self, CsatProver, CsatStatement, RepCommit, RepResponse};
use crate::circuit::CircuitError;
use crate::codec::{Encode, Encoder};
use crate::primitives::{Bits, DomainError, GroupElement, GroupParams};

pub use or::{OrFirst, OrInstance, OrProver, OrResponse};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SigmaError {
    #[error("witness does not satisfy the relation")]
    InvalidWitness,
    #[error("challenge {0} outside the challenge space")]
    Challenge(u64),
    #[error("extraction precondition violated: {0}")]
    Precondition(&'static str),
    #[error("extracted value fails the relation")]
    ExtractionFailed,
    #[error("malformed instance: {0}")]
    Malformed(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChallengeSpace {
    Zq,
    /// Bits per copy.
    Bits(u8),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// `y = g^w`.
    Schnorr { y: GroupElement },
    /// `u = g^w ∧ v = h^w`.
    ChaumPedersen { h: GroupElement, u: GroupElement, v: GroupElement },
    /// `y = g^w ∧ c = g^w h^r`, one shared exponent.
    Okamoto { h: GroupElement, y: GroupElement, c: GroupElement },
    Circuit(Arc<CsatStatement>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub group: GroupParams,
    pub relation: Relation,
    pub space: ChallengeSpace,
    pub copies: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Witness {
    Scalar(u64),
    Pair { w: u64, r: u64 },
    Wires(Vec<bool>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FirstMessage {
    Group(Vec<GroupElement>),
    Circuit(Vec<RepCommit>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Response {
    Scalars(Vec<u64>),
    Circuit(Vec<RepResponse>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaTranscript {
    pub a: FirstMessage,
    pub e: u64,
    pub z: Response,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ProverState {
    Algebraic { nonces: Vec<u64>, witness: Witness },
    Circuit(CsatProver),
}

impl Encode for FirstMessage {
    fn encode(&self, e: &mut Encoder) {
        match self {
            FirstMessage::Group(v) => {
                let bytes: Vec<u8> = v.iter().flat_map(|x| x.value().to_be_bytes()).collect();
                e.bytes(0x10, &bytes);
            }
            FirstMessage::Circuit(reps) => {
                let mut inner = Encoder::new();
                for r in reps {
                    inner.bytes(0x12, &r.data);
                }
                e.nested(0x11, &inner);
            }
        }
    }
}

impl Encode for Response {
    fn encode(&self, e: &mut Encoder) {
        match self {
            Response::Scalars(v) => {
                let bytes: Vec<u8> = v.iter().flat_map(|x| x.to_be_bytes()).collect();
                e.bytes(0x20, &bytes);
            }
            Response::Circuit(reps) => {
                let mut inner = Encoder::new();
                for r in reps {
                    inner.bytes(0x22, &r.to_bytes());
                }
                e.nested(0x21, &inner);
            }
        }
    }
}

fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

impl Instance {
    fn algebraic(group: GroupParams, relation: Relation) -> Self {
        Instance { group, relation, space: ChallengeSpace::Zq, copies: 1 }
    }

    pub fn schnorr(group: GroupParams, y: GroupElement) -> Self {
        Instance::algebraic(group, Relation::Schnorr { y })
    }

    pub fn chaum_pedersen(group: GroupParams, h: GroupElement, u: GroupElement, v: GroupElement) -> Self {
        Instance::algebraic(group, Relation::ChaumPedersen { h, u, v })
    }

    pub fn okamoto(group: GroupParams, h: GroupElement, y: GroupElement, c: GroupElement) -> Self {
        Instance::algebraic(group, Relation::Okamoto { h, y, c })
    }

    /// `t` repetitions of the masked-table protocol, one bit each.
    pub fn circuit(group: GroupParams, stmt: Arc<CsatStatement>, t: usize) -> Self {
        Instance { group, relation: Relation::Circuit(stmt), space: ChallengeSpace::Bits(1), copies: t }
    }

    /// `copies` parallel copies with `bits`-bit challenges each.
    pub fn with_bits(mut self, bits: u8, copies: usize) -> Self {
        self.space = ChallengeSpace::Bits(bits);
        self.copies = copies;
        self
    }

    /// Native challenge length for this group: `floor(log2 q)` bits.
    pub fn with_group_bits(self) -> Self {
        let bits = self.group.challenge_bits();
        self.with_bits(bits, 1)
    }

    pub fn is_circuit(&self) -> bool {
        matches!(self.relation, Relation::Circuit(_))
    }

    pub fn check(&self) -> Result<(), SigmaError> {
        match self.space {
            ChallengeSpace::Zq if self.copies != 1 || self.is_circuit() => {
                Err(SigmaError::Malformed("Z_q challenges need one algebraic copy".into()))
            }
            ChallengeSpace::Bits(w) if w == 0 || w as usize * self.copies > 64 || self.copies == 0 => {
                Err(SigmaError::Malformed(format!("{} copies of {w} bits", self.copies)))
            }
            ChallengeSpace::Bits(w) if self.is_circuit() && w != 1 => {
                Err(SigmaError::Malformed("circuit copies take one bit".into()))
            }
            _ => Ok(()),
        }
    }

    /// Total challenge length in bits; `None` for `Z_q`.
    pub fn challenge_bits(&self) -> Option<u32> {
        match self.space {
            ChallengeSpace::Zq => None,
            ChallengeSpace::Bits(w) => Some(w as u32 * self.copies as u32),
        }
    }

    pub fn challenge_ok(&self, e: u64) -> bool {
        match self.challenge_bits() {
            None => e < self.group.q,
            Some(bits) => e & !mask(bits) == 0,
        }
    }

    pub fn random_challenge<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self.challenge_bits() {
            None => self.group.random_scalar(rng),
            Some(bits) => rng.gen::<u64>() & mask(bits),
        }
    }

    fn copy_challenge(&self, e: u64, i: usize) -> u64 {
        match self.space {
            ChallengeSpace::Zq => e,
            ChallengeSpace::Bits(w) => {
                let slice = (e >> (w as usize * i)) & mask(w as u32);
                if self.is_circuit() {
                    slice
                } else {
                    slice % self.group.q
                }
            }
        }
    }

    /// Group elements per copy in the first message / scalars in the response.
    fn arity(&self) -> (usize, usize) {
        match self.relation {
            Relation::Schnorr { .. } => (1, 1),
            Relation::ChaumPedersen { .. } => (2, 1),
            Relation::Okamoto { .. } => (2, 2),
            Relation::Circuit(_) => (0, 0),
        }
    }

    pub fn nonces_per_copy(&self) -> usize {
        self.arity().1
    }

    pub fn relation_holds(&self, w: &Witness) -> bool {
        let g = &self.group;
        match (&self.relation, w) {
            (Relation::Schnorr { y }, Witness::Scalar(x)) => *x < g.q && g.exp(*x) == *y,
            (Relation::ChaumPedersen { h, u, v }, Witness::Scalar(x)) => {
                *x < g.q && g.exp(*x) == *u && g.pow(*h, *x) == *v
            }
            (Relation::Okamoto { h, y, c }, Witness::Pair { w, r }) => {
                *w < g.q && *r < g.q && g.exp(*w) == *y && g.mul(g.exp(*w), g.pow(*h, *r)) == *c
            }
            (Relation::Circuit(s), Witness::Wires(bits)) => {
                bits.len() == s.circuit.num_witness && s.circuit.is_satisfied(&s.public, bits)
            }
            _ => false,
        }
    }

    /// First message for explicit nonces (`copies × nonces_per_copy`).
    pub fn commit_with_nonces(&self, w: &Witness, nonces: &[u64]) -> Result<(FirstMessage, ProverState), SigmaError> {
        self.check()?;
        if self.is_circuit() {
            return Err(SigmaError::Malformed("circuit commitments draw their own coins".into()));
        }
        if !self.relation_holds(w) {
            return Err(SigmaError::InvalidWitness);
        }
        let per = self.nonces_per_copy();
        if nonces.len() != per * self.copies {
            return Err(SigmaError::Malformed(format!("{} nonces", nonces.len())));
        }
        for &k in nonces {
            self.group.check_scalar(k)?;
        }
        let g = &self.group;
        let mut a = Vec::new();
        for k in nonces.chunks(per) {
            match &self.relation {
                Relation::Schnorr { .. } => a.push(g.exp(k[0])),
                Relation::ChaumPedersen { h, .. } => {
                    a.push(g.exp(k[0]));
                    a.push(g.pow(*h, k[0]));
                }
                Relation::Okamoto { h, .. } => {
                    a.push(g.exp(k[0]));
                    a.push(g.mul(g.exp(k[0]), g.pow(*h, k[1])));
                }
                Relation::Circuit(_) => unreachable!(),
            }
        }
        Ok((FirstMessage::Group(a), ProverState::Algebraic { nonces: nonces.to_vec(), witness: w.clone() }))
    }

    pub fn commit<R: Rng + ?Sized>(&self, w: &Witness, rng: &mut R) -> Result<(FirstMessage, ProverState), SigmaError> {
        self.check()?;
        match (&self.relation, w) {
            (Relation::Circuit(s), Witness::Wires(bits)) => {
                if !self.relation_holds(w) {
                    return Err(SigmaError::InvalidWitness);
                }
                let (a, p) = csat::csat_prove(s, bits, self.copies, rng)?;
                Ok((FirstMessage::Circuit(a), ProverState::Circuit(p)))
            }
            (Relation::Circuit(_), _) => Err(SigmaError::InvalidWitness),
            _ => {
                let nonces: Vec<u64> =
                    (0..self.copies * self.nonces_per_copy()).map(|_| self.group.random_scalar(rng)).collect();
                self.commit_with_nonces(w, &nonces)
            }
        }
    }

    pub fn respond(&self, state: &ProverState, e: u64) -> Result<Response, SigmaError> {
        if !self.challenge_ok(e) {
            return Err(SigmaError::Challenge(e));
        }
        let g = &self.group;
        match (state, &self.relation) {
            (ProverState::Circuit(p), Relation::Circuit(s)) => Ok(Response::Circuit(p.respond(s, e))),
            (ProverState::Algebraic { nonces, witness }, _) => {
                let per = self.nonces_per_copy();
                let mut z = Vec::with_capacity(nonces.len());
                for (i, k) in nonces.chunks(per).enumerate() {
                    let ei = self.copy_challenge(e, i);
                    match witness {
                        Witness::Scalar(x) => z.push(g.add_q(k[0], g.mul_q(ei, *x))),
                        Witness::Pair { w, r } => {
                            z.push(g.add_q(k[0], g.mul_q(ei, *w)));
                            z.push(g.add_q(k[1], g.mul_q(ei, *r)));
                        }
                        Witness::Wires(_) => return Err(SigmaError::InvalidWitness),
                    }
                }
                Ok(Response::Scalars(z))
            }
            _ => Err(SigmaError::Malformed("state does not match instance".into())),
        }
    }

    pub fn verify(&self, a: &FirstMessage, e: u64, z: &Response) -> bool {
        if self.check().is_err() || !self.challenge_ok(e) {
            return false;
        }
        let g = &self.group;
        match (&self.relation, a, z) {
            (Relation::Circuit(s), FirstMessage::Circuit(a), Response::Circuit(z)) => {
                a.len() == self.copies && csat::csat_verify(s, a, e, z)
            }
            (rel, FirstMessage::Group(a), Response::Scalars(z)) => {
                let (na, nz) = self.arity();
                if a.len() != na * self.copies || z.len() != nz * self.copies {
                    return false;
                }
                if a.iter().any(|x| !g.is_member(x.value())) || z.iter().any(|&x| x >= g.q) {
                    return false;
                }
                (0..self.copies).all(|i| {
                    let ei = self.copy_challenge(e, i);
                    let (a, z) = (&a[na * i..na * (i + 1)], &z[nz * i..nz * (i + 1)]);
                    match rel {
                        Relation::Schnorr { y } => g.exp(z[0]) == g.mul(a[0], g.pow(*y, ei)),
                        Relation::ChaumPedersen { h, u, v } => {
                            g.exp(z[0]) == g.mul(a[0], g.pow(*u, ei)) && g.pow(*h, z[0]) == g.mul(a[1], g.pow(*v, ei))
                        }
                        Relation::Okamoto { h, y, c } => {
                            g.exp(z[0]) == g.mul(a[0], g.pow(*y, ei))
                                && g.mul(g.exp(z[0]), g.pow(*h, z[1])) == g.mul(a[1], g.pow(*c, ei))
                        }
                        Relation::Circuit(_) => false,
                    }
                })
            }
            _ => false,
        }
    }

    pub fn verify_transcript(&self, t: &SigmaTranscript) -> bool {
        self.verify(&t.a, t.e, &t.z)
    }

    /// Simulated first message for challenge `e` and explicit responses.
    pub fn simulate_with(&self, e: u64, z: &[u64]) -> Result<FirstMessage, SigmaError> {
        self.check()?;
        if !self.challenge_ok(e) {
            return Err(SigmaError::Challenge(e));
        }
        let (_, nz) = self.arity();
        if self.is_circuit() || z.len() != nz * self.copies {
            return Err(SigmaError::Malformed("explicit simulation needs algebraic responses".into()));
        }
        let g = &self.group;
        let mut a = Vec::new();
        for (i, z) in z.chunks(nz).enumerate() {
            for &x in z {
                g.check_scalar(x)?;
            }
            let neg = g.sub_q(0, self.copy_challenge(e, i));
            match &self.relation {
                Relation::Schnorr { y } => a.push(g.mul(g.exp(z[0]), g.pow(*y, neg))),
                Relation::ChaumPedersen { h, u, v } => {
                    a.push(g.mul(g.exp(z[0]), g.pow(*u, neg)));
                    a.push(g.mul(g.pow(*h, z[0]), g.pow(*v, neg)));
                }
                Relation::Okamoto { h, y, c } => {
                    a.push(g.mul(g.exp(z[0]), g.pow(*y, neg)));
                    a.push(g.mul(g.mul(g.exp(z[0]), g.pow(*h, z[1])), g.pow(*c, neg)));
                }
                Relation::Circuit(_) => unreachable!(),
            }
        }
        Ok(FirstMessage::Group(a))
    }

    pub fn simulate<R: Rng + ?Sized>(&self, e: u64, rng: &mut R) -> Result<(FirstMessage, Response), SigmaError> {
        self.check()?;
        if !self.challenge_ok(e) {
            return Err(SigmaError::Challenge(e));
        }
        if let Relation::Circuit(s) = &self.relation {
            let (a, z) = (0..self.copies)
                .map(|i| csat::rep_simulate(s, (e >> i) & 1 == 1, rng))
                .unzip();
            return Ok((FirstMessage::Circuit(a), Response::Circuit(z)));
        }
        let z: Vec<u64> = (0..self.copies * self.arity().1).map(|_| self.group.random_scalar(rng)).collect();
        let a = self.simulate_with(e, &z)?;
        Ok((a, Response::Scalars(z)))
    }

    /// Special soundness. The result is re-checked against the relation.
    pub fn extract(&self, t1: &SigmaTranscript, t2: &SigmaTranscript) -> Result<Witness, SigmaError> {
        if t1.a != t2.a {
            return Err(SigmaError::Precondition("first messages differ"));
        }
        if t1.e == t2.e {
            return Err(SigmaError::Precondition("identical challenges"));
        }
        if !self.verify_transcript(t1) || !self.verify_transcript(t2) {
            return Err(SigmaError::Precondition("transcript does not verify"));
        }
        let g = &self.group;
        let i = (0..self.copies)
            .find(|&i| self.copy_challenge(t1.e, i) != self.copy_challenge(t2.e, i))
            .ok_or(SigmaError::Precondition("challenges agree in every copy"))?;
        let (e1, e2) = (self.copy_challenge(t1.e, i), self.copy_challenge(t2.e, i));
        let w = match (&self.relation, &t1.z, &t2.z) {
            (Relation::Circuit(s), Response::Circuit(z1), Response::Circuit(z2)) => {
                let (tables, path) = if e1 == 0 { (&z1[i], &z2[i]) } else { (&z2[i], &z1[i]) };
                Witness::Wires(csat::rep_extract(s, tables, path).ok_or(SigmaError::ExtractionFailed)?)
            }
            (rel, Response::Scalars(z1), Response::Scalars(z2)) => {
                let nz = self.arity().1;
                let inv = g.inv_q(g.sub_q(e1, e2)).ok_or(SigmaError::ExtractionFailed)?;
                let solve = |k: usize| g.mul_q(g.sub_q(z1[nz * i + k], z2[nz * i + k]), inv);
                match rel {
                    Relation::Okamoto { .. } => Witness::Pair { w: solve(0), r: solve(1) },
                    _ => Witness::Scalar(solve(0)),
                }
            }
            _ => return Err(SigmaError::Precondition("response kinds differ")),
        };
        if !self.relation_holds(&w) {
            return Err(SigmaError::ExtractionFailed);
        }
        Ok(w)
    }
}

/// The four-round variant of a circuit instance: the verifier first sends
/// the Naor receiver string `f`, which the commitments then use.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FourRound {
    pub group: GroupParams,
    pub circuit: Arc<crate::circuit::Circuit>,
    pub public: Vec<bool>,
    pub copies: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourRoundTranscript {
    pub f: Bits,
    pub a: FirstMessage,
    pub e: u64,
    pub z: Response,
}

pub fn four_round_variant(inst: &Instance) -> Result<FourRound, SigmaError> {
    match &inst.relation {
        Relation::Circuit(s) => Ok(FourRound {
            group: inst.group,
            circuit: s.circuit.clone(),
            public: s.public.clone(),
            copies: inst.copies,
        }),
        _ => Err(SigmaError::Malformed("no receiver message to prepend".into())),
    }
}

impl FourRound {
    /// The three-round instance once `f` is fixed.
    pub fn bind(&self, f: &Bits) -> Result<Instance, SigmaError> {
        let s = CsatStatement::new(self.circuit.clone(), self.public.clone(), f.clone())?;
        Ok(Instance::circuit(self.group, Arc::new(s), self.copies))
    }

    pub fn verify(&self, t: &FourRoundTranscript) -> bool {
        self.bind(&t.f).is_ok_and(|i| i.verify(&t.a, t.e, &t.z))
    }

    pub fn extract(&self, t1: &FourRoundTranscript, t2: &FourRoundTranscript) -> Result<Witness, SigmaError> {
        if t1.f != t2.f {
            return Err(SigmaError::Precondition("receiver messages differ"));
        }
        let inst = self.bind(&t1.f)?;
        let tr = |t: &FourRoundTranscript| SigmaTranscript { a: t.a.clone(), e: t.e, z: t.z.clone() };
        inst.extract(&tr(t1), &tr(t2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::tests::and_circuit;
    use crate::primitives::Profile;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn tiny() -> GroupParams {
        GroupParams::generate(Profile::Tiny, 0)
    }

    #[test]
    fn schnorr_examples() {
        let g = tiny();
        let inst = Instance::schnorr(g, g.exp(3));
        assert_eq!(g.exp(3).value(), 8);
        let (a, st) = inst.commit_with_nonces(&Witness::Scalar(3), &[4]).unwrap();
        assert_eq!(a, FirstMessage::Group(vec![g.element(16).unwrap()]));
        let z = inst.respond(&st, 5).unwrap();
        assert_eq!(z, Response::Scalars(vec![8]));
        assert_eq!(g.exp(8).value(), 3);
        assert!(inst.verify(&a, 5, &z));
        assert!(!inst.verify(&a, 5, &Response::Scalars(vec![9])));
        // e = 0 gives z = k
        assert_eq!(inst.respond(&st, 0).unwrap(), Response::Scalars(vec![4]));
        assert!(matches!(inst.respond(&st, 11), Err(SigmaError::Challenge(11))));
        let t1 = SigmaTranscript { a: a.clone(), e: 5, z: Response::Scalars(vec![8]) };
        let t2 = SigmaTranscript { a: a.clone(), e: 2, z: Response::Scalars(vec![10]) };
        assert!(inst.verify_transcript(&t2));
        assert_eq!(inst.extract(&t1, &t2).unwrap(), Witness::Scalar(3));
        assert!(matches!(inst.extract(&t1, &t1), Err(SigmaError::Precondition(_))));
    }

    #[test]
    fn invalid_witness_is_refused() {
        let g = tiny();
        let inst = Instance::schnorr(g, g.exp(3));
        assert_eq!(inst.commit_with_nonces(&Witness::Scalar(4), &[1]).err(), Some(SigmaError::InvalidWitness));
    }

    #[test]
    fn chaum_pedersen_zero_nonce_and_simulation() {
        let g = tiny();
        let h = g.exp(7);
        let inst = Instance::chaum_pedersen(g, h, g.exp(5), g.pow(h, 5));
        let (a, _) = inst.commit_with_nonces(&Witness::Scalar(5), &[0]).unwrap();
        assert_eq!(a, FirstMessage::Group(vec![g.identity(), g.identity()]));
        let a = inst.simulate_with(0, &[6]).unwrap();
        assert_eq!(a, FirstMessage::Group(vec![g.exp(6), g.pow(h, 6)]));
        assert!(inst.verify(&a, 0, &Response::Scalars(vec![6])));
    }

    #[test]
    fn accepted_grid_has_one_z_per_e() {
        let g = tiny();
        let inst = Instance::schnorr(g, g.exp(3));
        for av in g.elements() {
            let a = FirstMessage::Group(vec![av]);
            let mut accepted = 0;
            for e in 0..g.q {
                let zs: Vec<u64> = (0..g.q).filter(|&z| inst.verify(&a, e, &Response::Scalars(vec![z]))).collect();
                assert_eq!(zs.len(), 1);
                accepted += zs.len();
            }
            assert_eq!(accepted as u64, g.q);
        }
    }

    #[test]
    fn simulation_matches_honest_distribution_exactly() {
        // for each e: honest (over k) and simulated (over z) transcript sets coincide
        let g = tiny();
        for (inst, w) in [
            (Instance::schnorr(g, g.exp(4)), Witness::Scalar(4)),
            (Instance::chaum_pedersen(g, g.exp(9), g.exp(2), g.pow(g.exp(9), 2)), Witness::Scalar(2)),
        ] {
            for e in 0..g.q {
                let mut honest: Vec<_> = (0..g.q)
                    .map(|k| {
                        let (a, st) = inst.commit_with_nonces(&w, &[k]).unwrap();
                        (a, inst.respond(&st, e).unwrap())
                    })
                    .collect();
                let mut sim: Vec<_> =
                    (0..g.q).map(|z| (inst.simulate_with(e, &[z]).unwrap(), Response::Scalars(vec![z]))).collect();
                honest.sort_by_key(|x| format!("{x:?}"));
                sim.sort_by_key(|x| format!("{x:?}"));
                assert_eq!(honest, sim);
            }
        }
    }

    #[test]
    fn okamoto_roundtrip() {
        let g = tiny();
        let h = g.exp(6);
        let (w, r) = (7, 2);
        let inst = Instance::okamoto(g, h, g.exp(w), g.mul(g.exp(w), g.pow(h, r)));
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (a, st) = inst.commit(&Witness::Pair { w, r }, &mut rng).unwrap();
        let t1 = SigmaTranscript { a: a.clone(), e: 1, z: inst.respond(&st, 1).unwrap() };
        let t2 = SigmaTranscript { a, e: 9, z: inst.respond(&st, 9).unwrap() };
        assert_eq!(inst.extract(&t1, &t2).unwrap(), Witness::Pair { w, r });
    }

    #[test]
    fn circuit_instance_single_gate() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let rc = Bits::from_bytes(&[0x5a, 0x11, 0xc3], 24);
        let s = Arc::new(CsatStatement::new(Arc::new(and_circuit()), vec![], rc.clone()).unwrap());
        let inst = Instance::circuit(tiny(), s, 1);
        let w = Witness::Wires(vec![true, true]);
        let (a, st) = inst.commit(&w, &mut rng).unwrap();
        let FirstMessage::Circuit(reps) = &a else { panic!() };
        // 3 wire masks + 12 row components
        assert_eq!(reps[0].data.len(), 15 * 3);
        let z0 = inst.respond(&st, 0).unwrap();
        assert!(matches!(&z0, Response::Circuit(r) if matches!(r[0], RepResponse::Tables { .. })));
        let z1 = inst.respond(&st, 1).unwrap();
        let t0 = SigmaTranscript { a: a.clone(), e: 0, z: z0 };
        let t1 = SigmaTranscript { a: a.clone(), e: 1, z: z1 };
        assert_eq!(inst.extract(&t0, &t1).unwrap(), w);

        let fr = four_round_variant(&inst).unwrap();
        let ft = |t: &SigmaTranscript| FourRoundTranscript { f: rc.clone(), a: t.a.clone(), e: t.e, z: t.z.clone() };
        assert!(fr.verify(&ft(&t0)));
        assert_eq!(fr.extract(&ft(&t0), &ft(&t1)).unwrap(), w);
        let mut other = ft(&t1);
        other.f = Bits::zeros(24);
        assert!(fr.extract(&ft(&t0), &other).is_err());
    }

    #[test]
    fn parallel_bit_copies() {
        let g = GroupParams::generate(Profile::Small, 1);
        let h = g.hash_to_element(b"cp");
        let inst = Instance::chaum_pedersen(g, h, g.exp(77), g.pow(h, 77)).with_bits(1, 8);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (a, st) = inst.commit(&Witness::Scalar(77), &mut rng).unwrap();
        let z = inst.respond(&st, 0b1011_0010).unwrap();
        assert!(inst.verify(&a, 0b1011_0010, &z));
        assert!(!inst.verify(&a, 0b1011_0011, &z));
        assert!(!inst.challenge_ok(256));
    }

    proptest! {
        #[test]
        fn completeness_small_group(seed in 0u64..1000, x in 1u64..u64::MAX, e in any::<u64>()) {
            let g = GroupParams::generate(Profile::Small, seed % 4);
            let x = x % g.q;
            let inst = Instance::schnorr(g, g.exp(x)).with_group_bits();
            let e = e & ((1 << g.challenge_bits()) - 1);
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let (a, st) = inst.commit(&Witness::Scalar(x), &mut rng).unwrap();
            let z = inst.respond(&st, e).unwrap();
            prop_assert!(inst.verify(&a, e, &z));
        }
    }
}
