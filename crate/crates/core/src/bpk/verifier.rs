use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::{build_relation_rprime, pi_v_instance, Action, BpkError, Common, Msg, SecretKey, SubPath};
use crate::circuit::vm::VmProgram;
use crate::codec::{Encode, View};
use crate::commitments::{com0_commit, ElGamalCommitment, PedersenCommitment};
use crate::primitives::{prf_rng, PrfKey};
use crate::rszk::{BarakProver, LiveBranch, OpeningClaim, PathAProver, SubWitness};
use crate::sigma::{FirstMessage, OrFirst, OrInstance, OrProver, OrResponse, Response, Witness};

/// Witness for Π_v.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PvWitness {
    Single(SecretKey),
    /// Both preimages; the branch is picked when the response is due.
    Both { x0: u64, x1: u64, choice: u8 },
}

/// How the verifier reveals `e` and backs it in step 3.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubProverMode {
    /// The committed `e` with an honest opening proof.
    Honest,
    /// Reveal `e` but send a recorded path-A sub-proof verbatim.
    Replay { e: u64, a: FirstMessage, z: Response },
    /// Reveal `e` and simulate the path-A proof for a guessed challenge.
    Guess { e: u64, seed: u64 },
    /// Reveal `e` and run path B with the sub-verifier's program as Λ
    /// witness.
    Simulate { e: u64, program: VmProgram },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
enum Sub {
    None,
    A(PathAProver),
    Fixed { guess: Option<u64>, z: Response },
    B(Box<BarakProver>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
enum Stage {
    Start,
    PvChallenge,
    PpCommit,
    SubChallenge,
    BarakSetup,
    BarakR,
    WiChallenge,
    PpResponse,
    Done,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verifier {
    pub common: Common,
    key: PrfKey,
    pv_witness: PvWitness,
    plan: SubProverMode,
    forced_e: Option<u64>,
    view: View,
    stage: Stage,
    pv_or: Option<OrProver>,
    committed_e: u64,
    r_e: u64,
    ce: Option<ElGamalCommitment>,
    c: Option<PedersenCommitment>,
    a: Option<OrFirst>,
    revealed: u64,
    sub: Sub,
    sub_a: Option<FirstMessage>,
    sub_z: Option<Response>,
    z: Option<OrResponse>,
}

impl Verifier {
    pub fn new(common: Common, key: PrfKey, pv_witness: PvWitness) -> Self {
        let mut view = View::new();
        view.append(0x00, &common.to_bytes());
        Verifier {
            common,
            key,
            pv_witness,
            plan: SubProverMode::Honest,
            forced_e: None,
            view,
            stage: Stage::Start,
            pv_or: None,
            committed_e: 0,
            r_e: 0,
            ce: None,
            c: None,
            a: None,
            revealed: 0,
            sub: Sub::None,
            sub_a: None,
            sub_z: None,
            z: None,
        }
    }

    pub fn set_plan(&mut self, plan: SubProverMode) {
        self.plan = plan;
    }

    /// Commit to this `e` in phase 1 instead of a fresh one.
    pub fn commit_to(&mut self, e: u64) {
        self.forced_e = Some(e);
    }

    /// Π_v branch for responses not yet sent (deferred-choice mode).
    pub fn set_pv_choice(&mut self, b: u8) {
        if let PvWitness::Both { choice, .. } = &mut self.pv_witness {
            *choice = b;
        }
    }

    pub fn view(&self) -> &View {
        &self.view
    }

    pub fn is_done(&self) -> bool {
        self.stage == Stage::Done
    }

    pub fn committed_e(&self) -> u64 {
        self.committed_e
    }

    /// The `e` sent in step 3.
    pub fn revealed(&self) -> u64 {
        self.revealed
    }

    pub fn ce(&self) -> Option<ElGamalCommitment> {
        self.ce
    }

    /// `(a, e, z)` of Π_p once the session is over.
    pub fn pp_transcript(&self) -> Option<(OrFirst, u64, OrResponse)> {
        Some((self.a.clone()?, self.revealed, self.z.clone()?))
    }

    pub fn commitment(&self) -> Option<PedersenCommitment> {
        self.c
    }

    /// The path-A sub-proof as sent: first message and response.
    pub fn sub_transcript(&self) -> Option<(FirstMessage, Response)> {
        Some((self.sub_a.clone()?, self.sub_z.clone()?))
    }

    /// Witness branch of the path-B WI argument, once it started.
    pub fn sub_live_branch(&self) -> Option<LiveBranch> {
        match &self.sub {
            Sub::B(bp) => bp.live_branch(),
            _ => None,
        }
    }

    pub fn rprime(&self) -> Option<OrInstance> {
        Some(build_relation_rprime(&self.common.params, self.common.x, &self.common.pk, self.c.as_ref()?))
    }

    fn rng(&self, label: &str) -> ChaCha20Rng {
        prf_rng(&self.key, label.as_bytes(), self.view.as_bytes())
    }

    fn push(&mut self, m: &Msg) {
        self.view.append(0x10 + m.round() as u8, &m.to_bytes());
    }

    fn send(&mut self, m: Msg) -> Action {
        self.push(&m);
        Action::Send(m)
    }

    fn claim(&self, e: u64) -> OpeningClaim {
        OpeningClaim { key: self.common.params.ck, ce: self.ce.expect("after phase 1"), e }
    }

    /// First Π_v message.
    pub fn start(&mut self) -> Result<Msg, BpkError> {
        if self.stage != Stage::Start {
            return Err(BpkError::OutOfOrder { round: 0, got: "start" });
        }
        let pv = pi_v_instance(&self.common.pk);
        let witnesses = match self.pv_witness {
            PvWitness::Single(sk) if sk.b == 0 => vec![Some(Witness::Scalar(sk.alpha)), None],
            PvWitness::Single(sk) => vec![None, Some(Witness::Scalar(sk.alpha))],
            PvWitness::Both { x0, x1, .. } => vec![Some(Witness::Scalar(x0)), Some(Witness::Scalar(x1))],
        };
        let (a, or) = pv.commit(&witnesses, &mut self.rng("pv"))?;
        self.pv_or = Some(or);
        self.stage = Stage::PvChallenge;
        let m = Msg::PvCommit { a };
        self.push(&m);
        Ok(m)
    }

    pub fn receive(&mut self, m: &Msg) -> Result<Action, BpkError> {
        let p = self.common.params;
        match (self.stage, m) {
            (Stage::Done, _) => Err(BpkError::Finished),
            (Stage::PvChallenge, Msg::PvChallenge { e }) => {
                let pv = pi_v_instance(&self.common.pk);
                if !pv.challenge_ok(*e) {
                    self.stage = Stage::Done;
                    return Ok(Action::Reject("malformed Π_v challenge".into()));
                }
                self.push(m);
                let free = match self.pv_witness {
                    PvWitness::Single(sk) => sk.b as usize,
                    PvWitness::Both { choice, .. } => choice as usize,
                };
                let z = pv.respond(self.pv_or.as_ref().expect("started"), *e, free)?;
                let mut rng = self.rng("e");
                let fresh = rng.gen_range(0..1u64 << p.group.challenge_bits());
                let e = self.forced_e.unwrap_or(fresh);
                let r_e = p.group.random_scalar(&mut rng);
                let ce = com0_commit(&p.ck, e, r_e).map_err(|e| BpkError::Params(e.to_string()))?;
                self.committed_e = e;
                self.r_e = r_e;
                self.ce = Some(ce);
                self.stage = Stage::PpCommit;
                Ok(self.send(Msg::PvResponse { z, ce }))
            }
            (Stage::PpCommit, Msg::PpCommit { c, a }) => {
                if !p.group.is_member(c.c.value()) {
                    self.stage = Stage::Done;
                    return Ok(Action::Reject("commitment outside the group".into()));
                }
                self.push(m);
                self.c = Some(*c);
                self.a = Some(a.clone());
                self.reveal()
            }
            (Stage::SubChallenge, Msg::SubChallenge { eps }) => {
                self.push(m);
                let z = match &self.sub {
                    Sub::A(prover) => prover.respond(&self.claim(self.revealed), p.t, *eps)?,
                    Sub::Fixed { guess, z } => {
                        if guess.is_some_and(|g| g != *eps) {
                            self.stage = Stage::Done;
                            return Ok(Action::Halt("guessed sub-challenge missed".into()));
                        }
                        z.clone()
                    }
                    _ => unreachable!("path A state"),
                };
                self.sub_z = Some(z.clone());
                self.stage = Stage::PpResponse;
                Ok(self.send(Msg::SubResponse { z }))
            }
            (Stage::BarakSetup, Msg::BarakSetup { setup }) => {
                self.push(m);
                let mut rng = self.rng("barak-c");
                let Sub::B(bp) = &mut self.sub else { unreachable!("path B state") };
                match bp.commit(setup, &mut rng) {
                    Ok(c) => {
                        self.stage = Stage::BarakR;
                        Ok(self.send(Msg::BarakCommit { c }))
                    }
                    Err(e) => {
                        self.stage = Stage::Done;
                        Ok(Action::Reject(e.to_string()))
                    }
                }
            }
            (Stage::BarakR, Msg::BarakR { r }) => {
                self.push(m);
                let mut rng = self.rng("barak-wi");
                let Sub::B(bp) = &mut self.sub else { unreachable!("path B state") };
                match bp.wi_commit(r, &mut rng) {
                    Ok(a) => {
                        self.stage = Stage::WiChallenge;
                        Ok(self.send(Msg::WiCommit { a }))
                    }
                    Err(e) => {
                        self.stage = Stage::Done;
                        Ok(Action::Halt(e.to_string()))
                    }
                }
            }
            (Stage::WiChallenge, Msg::WiChallenge { eps }) => {
                self.push(m);
                let Sub::B(bp) = &self.sub else { unreachable!("path B state") };
                let z = bp.wi_respond(*eps)?;
                self.stage = Stage::PpResponse;
                Ok(self.send(Msg::WiResponse { z }))
            }
            (Stage::PpResponse, Msg::PpResponse { z }) => {
                self.push(m);
                self.stage = Stage::Done;
                self.z = Some(z.clone());
                let ok = self.rprime().is_some_and(|r| r.verify(self.a.as_ref().expect("stored"), self.revealed, z));
                Ok(if ok { Action::Accept } else { Action::Reject("Π_p transcript rejected".into()) })
            }
            _ => Err(BpkError::OutOfOrder { round: self.view.len(), got: m.name() }),
        }
    }

    fn reveal(&mut self) -> Result<Action, BpkError> {
        let p = self.common.params;
        let mut rng = self.rng("sub");
        let (e, sub) = match (&self.plan, p.path) {
            (SubProverMode::Honest, SubPath::A) => {
                let claim = self.claim(self.committed_e);
                let (a, prover) = PathAProver::start(&claim, self.r_e, p.t, &mut rng)?;
                self.sub_a = Some(a);
                (self.committed_e, Sub::A(prover))
            }
            (SubProverMode::Honest, SubPath::B) => {
                let claim = self.claim(self.committed_e);
                (self.committed_e, Sub::B(Box::new(BarakProver::new(claim, SubWitness::Opening(self.r_e), p.t)?)))
            }
            (SubProverMode::Replay { e, a, z }, SubPath::A) => {
                self.sub_a = Some(a.clone());
                (*e, Sub::Fixed { guess: None, z: z.clone() })
            }
            (SubProverMode::Guess { e, seed }, SubPath::A) => {
                let mut rng = prf_rng(&self.key, b"guess", &[self.view.as_bytes(), &seed.to_be_bytes()].concat());
                let inst = self.claim(*e).instance(p.t);
                let guess = inst.random_challenge(&mut rng);
                let (a, z) = inst.simulate(guess, &mut rng)?;
                self.sub_a = Some(a);
                (*e, Sub::Fixed { guess: Some(guess), z })
            }
            (SubProverMode::Simulate { e, program }, SubPath::B) => {
                let claim = self.claim(*e);
                (*e, Sub::B(Box::new(BarakProver::new(claim, SubWitness::Program(program.clone()), p.t)?)))
            }
            _ => return Err(BpkError::Params("reveal plan does not match the sub-proof path".into())),
        };
        self.revealed = e;
        self.sub = sub;
        match p.path {
            SubPath::A => {
                self.stage = Stage::SubChallenge;
                let a = self.sub_a.clone().expect("set above");
                Ok(self.send(Msg::RevealA { e, a }))
            }
            SubPath::B => {
                self.stage = Stage::BarakSetup;
                Ok(self.send(Msg::RevealB { e }))
            }
        }
    }
}
