//! Resettably-sound proofs that a COM₀ commitment opens to a claimed value.
//!
//! The proving party is the main protocol's verifier; the verifying party
//! (the main prover) is derandomized with a PRF applied to its view.
//!
//! * Path A: `t` parallel Chaum-Pedersen copies with one-bit challenges,
//!   for `c_e = (g^r, h^r g^e)` the statement `(g, h, u, v·g^{-e})`.
//! * Path B: Barak's skeleton. The verifier sends `(h, rc)`, the prover a
//!   Naor commitment `c`, the verifier `r`, then a WI OR-proof of
//!   "opening ∨ (h, c, r) ∈ Λ".

pub mod one_many;

use std::sync::{Arc, OnceLock};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::csat::CsatStatement;
use crate::circuit::lambda::{
    commit_program, compile_lambda_shape, lambda_holds, LambdaBounds, LambdaCircuit, LambdaStatement, LambdaWitness,
};
use crate::circuit::vm::VmProgram;
use crate::circuit::CircuitError;
use crate::codec::{Encode, Encoder};
use crate::commitments::{naor_commit, CommitmentKey, ElGamalCommitment, NaorCommitment};
use crate::primitives::{hash_eval, prf_expand, Bits, HashIndex, PrfKey};
use crate::sigma::{FirstMessage, Instance, OrFirst, OrInstance, OrProver, OrResponse, ProverState, Response, SigmaError, Witness};

/// Security parameter of the Barak skeleton in the toy profile.
pub const TOY_N: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RszkError {
    #[error("verifier is not public-coin")]
    NotPublicCoin,
    #[error("prover refuses: {0}")]
    Refused(&'static str),
    #[error("round {0} outside the verifier's schedule")]
    Round(usize),
    #[error(transparent)]
    Sigma(#[from] SigmaError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Description of a verifier: public-coin with the given coin lengths per
/// round, or private-coin (not derandomizable this way).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifierSpec {
    PublicCoin { rounds: Vec<usize> },
    PrivateCoin,
}

/// Every message is `prf(key, context || round || prefix)` truncated to
/// the round's coin length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerandomizedVerifier {
    key: PrfKey,
    rounds: Vec<usize>,
    #[serde(with = "crate::codec::hex_vec")]
    context: Vec<u8>,
}

pub fn bggl_wrap(spec: &VerifierSpec, key: PrfKey, context: &[u8]) -> Result<DerandomizedVerifier, RszkError> {
    match spec {
        VerifierSpec::PublicCoin { rounds } => Ok(DerandomizedVerifier {
            key,
            rounds: rounds.clone(),
            context: context.to_vec(),
        }),
        VerifierSpec::PrivateCoin => Err(RszkError::NotPublicCoin),
    }
}

impl DerandomizedVerifier {
    pub fn coins(&self, round: usize, prefix: &[u8]) -> Result<Bits, RszkError> {
        let bits = *self.rounds.get(round).ok_or(RszkError::Round(round))?;
        let mut x = Vec::with_capacity(self.context.len() + 6 + prefix.len());
        x.extend_from_slice(&(self.context.len() as u16).to_be_bytes());
        x.extend_from_slice(&self.context);
        x.extend_from_slice(&(round as u32).to_be_bytes());
        x.extend_from_slice(prefix);
        Ok(prf_expand(&self.key, &x, bits))
    }

    /// Coins of a round of at most 64 bits as an integer.
    pub fn challenge(&self, round: usize, prefix: &[u8]) -> Result<u64, RszkError> {
        let c = self.coins(round, prefix)?;
        if c.len() > 64 {
            return Err(RszkError::Round(round));
        }
        Ok(c.to_u64())
    }
}

/// "`ce` opens to `e`".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpeningClaim {
    pub key: CommitmentKey,
    pub ce: ElGamalCommitment,
    pub e: u64,
}

impl Encode for OpeningClaim {
    fn encode(&self, enc: &mut Encoder) {
        let g = &self.key.group;
        enc.u64(0x40, g.p).u64(0x41, g.q).u64(0x42, g.g);
        enc.u64(0x43, self.key.h.value());
        enc.u64(0x44, self.ce.u.value()).u64(0x45, self.ce.v.value());
        enc.u64(0x46, self.e);
    }
}

impl OpeningClaim {
    /// Chaum-Pedersen statement, `t` one-bit copies.
    pub fn instance(&self, t: usize) -> Instance {
        let g = self.key.group;
        let shifted = g.div(self.ce.v, g.exp(self.e % g.q));
        Instance::chaum_pedersen(g, self.key.h, self.ce.u, shifted).with_bits(1, t)
    }

    pub fn witness_ok(&self, r_e: u64) -> bool {
        self.instance(1).relation_holds(&Witness::Scalar(r_e))
    }
}

/// Path A prover side.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathAProver {
    state: ProverState,
}

impl PathAProver {
    pub fn start<R: Rng + ?Sized>(claim: &OpeningClaim, r_e: u64, t: usize, rng: &mut R) -> Result<(FirstMessage, Self), RszkError> {
        if !claim.witness_ok(r_e) {
            return Err(RszkError::Refused("randomness does not open the commitment to e"));
        }
        let (a, state) = claim.instance(t).commit(&Witness::Scalar(r_e), rng)?;
        Ok((a, PathAProver { state }))
    }

    pub fn respond(&self, claim: &OpeningClaim, t: usize, e: u64) -> Result<Response, RszkError> {
        Ok(claim.instance(t).respond(&self.state, e)?)
    }
}

pub fn path_a_verify(claim: &OpeningClaim, t: usize, a: &FirstMessage, e: u64, z: &Response) -> bool {
    claim.instance(t).verify(a, e, z)
}

/// Coin schedule of the derandomized path-A verifier.
pub fn path_a_spec(t: usize) -> VerifierSpec {
    VerifierSpec::PublicCoin { rounds: vec![t] }
}

/// Coin schedule of the derandomized Barak verifier: `(h, rc)`, `r`, `ε`.
pub fn barak_spec(n: usize, t: usize) -> VerifierSpec {
    VerifierSpec::PublicCoin { rounds: vec![32 + 3 * n, n, t] }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathATranscript {
    pub a: FirstMessage,
    pub e: u64,
    pub z: Response,
    pub accepted: bool,
}

/// One run of path A against a derandomized verifier whose prefix is the
/// claim followed by `a`.
pub fn rszk_prove_opening_a<R: Rng + ?Sized>(
    claim: &OpeningClaim,
    r_e: u64,
    verifier: &DerandomizedVerifier,
    t: usize,
    rng: &mut R,
) -> Result<PathATranscript, RszkError> {
    let (a, p) = PathAProver::start(claim, r_e, t, rng)?;
    let mut prefix = claim.to_bytes();
    prefix.extend(a.to_bytes());
    let e = verifier.challenge(0, &prefix)?;
    let z = p.respond(claim, t, e)?;
    let accepted = path_a_verify(claim, t, &a, e, &z);
    Ok(PathATranscript { a, e, z, accepted })
}

/// The Λ circuit for `n = 8` under the toy bounds, compiled once.
pub fn toy_lambda() -> &'static LambdaCircuit {
    static C: OnceLock<LambdaCircuit> = OnceLock::new();
    C.get_or_init(|| compile_lambda_shape(TOY_N, LambdaBounds::TOY).expect("toy bounds are valid"))
}

fn lambda_for(n: usize) -> Result<LambdaCircuit, RszkError> {
    if n == TOY_N {
        Ok(toy_lambda().clone())
    } else {
        Ok(compile_lambda_shape(n, LambdaBounds::TOY)?)
    }
}

/// The verifier's first Barak message.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BarakSetup {
    pub h: HashIndex,
    pub rc: Bits,
}

impl BarakSetup {
    pub fn from_coins(coins: &Bits, n: usize) -> Self {
        let bools = coins.to_bools();
        let iv = Bits::from_bools(&bools[..32]).to_u64() as u32;
        BarakSetup { h: HashIndex::new(iv, n as u16), rc: Bits::from_bools(&bools[32..]) }
    }

    pub fn n(&self) -> usize {
        self.rc.len() / 3
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut e = Encoder::new();
        e.u64(0x50, self.h.iv as u64).u64(0x51, self.h.out_bits as u64).bytes(0x52, self.rc.as_bytes());
        e.into_bytes()
    }
}

/// The WI statement "claim ∨ (h, c, r) ∈ Λ" with `t` repetitions per branch.
pub fn barak_wi_instance(
    claim: &OpeningClaim,
    setup: &BarakSetup,
    c: &NaorCommitment,
    r: &Bits,
    t: usize,
) -> Result<(OrInstance, LambdaStatement), RszkError> {
    let stmt = LambdaStatement { h: setup.h, rc: setup.rc.clone(), c: c.clone(), r: r.clone() };
    stmt.check()?;
    let lc = lambda_for(setup.n())?;
    let cs = CsatStatement::new(Arc::new(lc.circuit), stmt.public_inputs(), setup.rc.clone())?;
    let or = OrInstance::new(vec![claim.instance(t), Instance::circuit(claim.key.group, Arc::new(cs), t)])?;
    Ok((or, stmt))
}

/// What the Barak prover holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubWitness {
    Opening(u64),
    /// A program expected to predict the verifier's `r`.
    Program(VmProgram),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiveBranch {
    Opening,
    Lambda,
}

/// Prover side of path B.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BarakProver {
    claim: OpeningClaim,
    witness: SubWitness,
    t: usize,
    setup: Option<BarakSetup>,
    c: Option<NaorCommitment>,
    seeds: Vec<Vec<u8>>,
    r: Option<Bits>,
    wi: Option<(OrProver, LiveBranch)>,
}

impl BarakProver {
    pub fn new(claim: OpeningClaim, witness: SubWitness, t: usize) -> Result<Self, RszkError> {
        if let SubWitness::Opening(r_e) = witness {
            if !claim.witness_ok(r_e) {
                return Err(RszkError::Refused("randomness does not open the commitment to e"));
            }
        }
        Ok(BarakProver { claim, witness, t, setup: None, c: None, seeds: Vec::new(), r: None, wi: None })
    }

    /// Sends `c`: honestly a commitment to `h(0^{3n})`, in simulation a
    /// commitment to `h(encode_B(Π))`.
    pub fn commit<R: Rng + ?Sized>(&mut self, setup: &BarakSetup, rng: &mut R) -> Result<NaorCommitment, RszkError> {
        let n = setup.n();
        if n == 0 || !n.is_multiple_of(8) || setup.h.out_bits as usize != n {
            return Err(RszkError::Refused("malformed hash index or receiver string"));
        }
        let (c, seeds) = match &self.witness {
            SubWitness::Opening(_) => {
                let digest = hash_eval(setup.h, &vec![0u8; 3 * n / 8]);
                let seeds: Vec<Vec<u8>> = (0..n)
                    .map(|_| {
                        let mut s = vec![0u8; n / 8];
                        rng.fill(&mut s[..]);
                        s
                    })
                    .collect();
                let c = naor_commit(&setup.rc, &digest.to_bools(), &seeds)
                    .map_err(|_| RszkError::Refused("commitment format"))?;
                (c, seeds)
            }
            SubWitness::Program(p) => commit_program(setup.h, &setup.rc, p, LambdaBounds::TOY, rng)?,
        };
        self.setup = Some(setup.clone());
        self.c = Some(c.clone());
        self.seeds = seeds;
        Ok(c)
    }

    /// First WI message after receiving `r`. In simulation this is where
    /// the committed program must have predicted `r`.
    pub fn wi_commit<R: Rng + ?Sized>(&mut self, r: &Bits, rng: &mut R) -> Result<OrFirst, RszkError> {
        let (setup, c) = match (&self.setup, &self.c) {
            (Some(s), Some(c)) => (s.clone(), c.clone()),
            _ => return Err(RszkError::Refused("out of order")),
        };
        let (or, stmt) = barak_wi_instance(&self.claim, &setup, &c, r, self.t)?;
        let (witnesses, live) = match &self.witness {
            SubWitness::Opening(r_e) => (vec![Some(Witness::Scalar(*r_e)), None], LiveBranch::Opening),
            SubWitness::Program(p) => {
                let lw = LambdaWitness { program: p.clone(), seeds: self.seeds.clone() };
                if !lambda_holds(&stmt, LambdaBounds::TOY, &lw) {
                    return Err(RszkError::Refused("committed program does not predict r"));
                }
                let bits = lambda_for(setup.n())?.witness_bits(&lw)?;
                (vec![None, Some(Witness::Wires(bits))], LiveBranch::Lambda)
            }
        };
        let (a, p) = or.commit(&witnesses, rng)?;
        self.r = Some(r.clone());
        self.wi = Some((p, live));
        Ok(a)
    }

    pub fn wi_respond(&self, eps: u64) -> Result<OrResponse, RszkError> {
        let (setup, c, r) = match (&self.setup, &self.c, &self.r) {
            (Some(s), Some(c), Some(r)) => (s, c, r),
            _ => return Err(RszkError::Refused("out of order")),
        };
        let (p, live) = self.wi.as_ref().ok_or(RszkError::Refused("out of order"))?;
        let (or, _) = barak_wi_instance(&self.claim, setup, c, r, self.t)?;
        let free = match live {
            LiveBranch::Opening => 0,
            LiveBranch::Lambda => 1,
        };
        Ok(or.respond(p, eps, free)?)
    }

    /// Internal witness tag; never visible in the transcript.
    pub fn live_branch(&self) -> Option<LiveBranch> {
        self.wi.as_ref().map(|(_, l)| *l)
    }
}

pub fn barak_verify(
    claim: &OpeningClaim,
    setup: &BarakSetup,
    c: &NaorCommitment,
    r: &Bits,
    t: usize,
    a: &OrFirst,
    eps: u64,
    z: &OrResponse,
) -> bool {
    barak_wi_instance(claim, setup, c, r, t).is_ok_and(|(or, _)| or.verify(a, eps, z))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarakTranscript {
    pub setup: BarakSetup,
    pub c: NaorCommitment,
    pub r: Bits,
    pub a: OrFirst,
    pub eps: u64,
    pub z: OrResponse,
    pub accepted: bool,
}

/// Runs path B against a derandomized verifier. The verifier's `r` comes
/// from its coins unless `r_program` is given (a program-backed verifier).
pub fn rszk_prove_opening_b<R: Rng + ?Sized>(
    claim: &OpeningClaim,
    witness: SubWitness,
    verifier: &DerandomizedVerifier,
    r_program: Option<&VmProgram>,
    t: usize,
    rng: &mut R,
) -> Result<(BarakTranscript, LiveBranch), RszkError> {
    let mut prefix = claim.to_bytes();
    let setup = BarakSetup::from_coins(&verifier.coins(0, &prefix)?, TOY_N);
    prefix.extend(setup.to_bytes());
    let mut prover = BarakProver::new(claim.clone(), witness, t)?;
    let c = prover.commit(&setup, rng)?;
    prefix.extend(c.to_bytes());
    let r = match r_program {
        Some(p) => {
            let out = crate::circuit::vm::vm_run(p, &c.to_bytes())?;
            Bits::from_bytes(&out, TOY_N)
        }
        None => verifier.coins(1, &prefix)?,
    };
    prefix.extend(r.as_bytes());
    let a = prover.wi_commit(&r, rng)?;
    let mut view = crate::codec::View::new();
    view.append(0, &prefix);
    view.append(1, &a.to_bytes());
    let eps = verifier.challenge(2, view.as_bytes())?;
    let z = prover.wi_respond(eps)?;
    let accepted = barak_verify(claim, &setup, &c, &r, t, &a, eps, &z);
    let live = prover.live_branch().expect("wi ran");
    Ok((BarakTranscript { setup, c, r, a, eps, z, accepted }, live))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commitments::com0_commit;
    use crate::primitives::{GroupParams, Profile};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn claim(profile: Profile, rng: &mut ChaCha20Rng) -> (OpeningClaim, u64) {
        let g = GroupParams::generate(profile, 0);
        let key = CommitmentKey::public(g);
        let e = rng.gen_range(0..1u64 << g.challenge_bits());
        let r = g.random_scalar(rng);
        (OpeningClaim { ce: com0_commit(&key, e, r).unwrap(), key, e }, r)
    }

    fn dv(spec: VerifierSpec, seed: u8) -> DerandomizedVerifier {
        bggl_wrap(&spec, PrfKey::new(vec![seed; 2]), b"test").unwrap()
    }

    #[test]
    fn private_coin_verifiers_are_rejected() {
        assert_eq!(bggl_wrap(&VerifierSpec::PrivateCoin, PrfKey::new(vec![1]), b"").err(), Some(RszkError::NotPublicCoin));
    }

    #[test]
    fn derandomized_verifier_is_a_function_of_the_prefix() {
        let v = dv(path_a_spec(16), 1);
        assert_eq!(v.challenge(0, b"prefix").unwrap(), v.challenge(0, b"prefix").unwrap());
        assert_ne!(v.challenge(0, b"prefix").unwrap(), v.challenge(0, b"prefiy").unwrap());
        assert!(v.challenge(1, b"x").is_err());
    }

    #[test]
    fn path_a_honest_and_refusal() {
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        for profile in [Profile::Tiny, Profile::Small] {
            let (cl, r) = claim(profile, &mut rng);
            let t = rszk_prove_opening_a(&cl, r, &dv(path_a_spec(8), 2), 8, &mut rng).unwrap();
            assert!(t.accepted);
            let mut wrong = cl.clone();
            wrong.e ^= 1;
            assert!(matches!(
                rszk_prove_opening_a(&wrong, r, &dv(path_a_spec(8), 2), 8, &mut rng),
                Err(RszkError::Refused(_))
            ));
        }
    }

    #[test]
    fn path_b_honest_and_simulated() {
        let mut rng = ChaCha20Rng::seed_from_u64(32);
        let (cl, r) = claim(Profile::Small, &mut rng);
        let v = dv(barak_spec(TOY_N, 8), 3);
        let (t, live) = rszk_prove_opening_b(&cl, SubWitness::Opening(r), &v, None, 8, &mut rng).unwrap();
        assert!(t.accepted);
        assert_eq!(live, LiveBranch::Opening);

        // a program-backed verifier echoing c[0]; the simulator commits to it
        let echo = VmProgram::echo(1, 24);
        let mut false_claim = cl.clone();
        false_claim.e ^= 1;
        let (t, live) =
            rszk_prove_opening_b(&false_claim, SubWitness::Program(echo.clone()), &v, Some(&echo), 8, &mut rng).unwrap();
        assert!(t.accepted);
        assert_eq!(live, LiveBranch::Lambda);

        // a program that does not predict r is refused before the WI starts
        let wrong = VmProgram::constant(&[0x42], 24);
        assert!(matches!(
            rszk_prove_opening_b(&false_claim, SubWitness::Program(wrong), &v, Some(&echo), 8, &mut rng),
            Err(RszkError::Refused(_))
        ));
    }
}
