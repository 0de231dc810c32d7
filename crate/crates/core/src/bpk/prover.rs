use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::{build_relation_rprime, derive_key, digest, pi_v_instance, Action, BpkError, Common, Msg, SubPath};
use crate::circuit::vm::{vm_run, VmProgram};
use crate::codec::{Encode, View};
use crate::commitments::{com1_commit, ElGamalCommitment, NaorCommitment, PedersenCommitment};
use crate::primitives::{prf_rng, Bits, PrfKey};
use crate::rszk::{
    barak_spec, barak_verify, bggl_wrap, path_a_spec, path_a_verify, BarakSetup, DerandomizedVerifier, OpeningClaim,
    TOY_N,
};
use crate::sigma::{FirstMessage, OrFirst, OrInstance, OrProver, Witness};

/// `(r₁, r₂)`: fixed for the lifetime of a prover, reused across resets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProverTape {
    pub r1: PrfKey,
    pub r2: PrfKey,
}

impl ProverTape {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        ProverTape { r1: PrfKey::random(128, rng), r2: PrfKey::random(128, rng) }
    }
}

/// Weakened provers for the reset experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProverVariant {
    /// Coins are a PRF of the view. When off, they are read from the tape
    /// at fixed positions regardless of what was received.
    pub prf_coins: bool,
    /// Verify the opening sub-proof before answering.
    pub check_subproof: bool,
}

impl ProverVariant {
    pub const FULL: ProverVariant = ProverVariant { prf_coins: true, check_subproof: true };
    pub const NO_PRF: ProverVariant = ProverVariant { prf_coins: false, check_subproof: true };
    pub const NO_SUBPROOF: ProverVariant = ProverVariant { prf_coins: true, check_subproof: false };
    pub const NO_PRF_NO_SUBPROOF: ProverVariant = ProverVariant { prf_coins: false, check_subproof: false };

    pub const ALL: [ProverVariant; 4] = [Self::FULL, Self::NO_PRF, Self::NO_SUBPROOF, Self::NO_PRF_NO_SUBPROOF];

    pub fn name(self) -> &'static str {
        match (self.prf_coins, self.check_subproof) {
            (true, true) => "full",
            (false, true) => "no-prf",
            (true, false) => "no-subproof",
            (false, false) => "no-prf-no-subproof",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }
}

/// Which witness of `R′` the prover uses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// `x = g^w`; branch 0.
    Honest { w: u64 },
    /// Knows `α` with `y_b = g^α`; commits to `α` and uses branch `1 + b`.
    Escape { alpha: u64, b: u8 },
    /// Commits to `α` but answers on branch 0 with `w`.
    Hybrid { w: u64, alpha: u64 },
    /// Knows both preimages and `log_g h`; commits to a random value and
    /// opens it to `x_game` on branch `1 + game`. Negative tests only.
    Trapdoor { x0: u64, x1: u64, trapdoor: u64, game: u8 },
}

impl Strategy {
    fn free_branch(&self) -> usize {
        match self {
            Strategy::Honest { .. } | Strategy::Hybrid { .. } => 0,
            Strategy::Escape { b, .. } => 1 + *b as usize,
            Strategy::Trapdoor { game, .. } => 1 + *game as usize,
        }
    }
}

/// How the prover computes its `r` as the Barak sub-verifier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubVerifierMode {
    Prf,
    /// `r = program(c)`; scripted provers whose code must be expressible
    /// as a VM program.
    Program(VmProgram),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
enum Stage {
    PvCommit,
    PvResponse,
    Reveal,
    SubResponse,
    BarakCommit,
    WiCommit,
    WiResponse,
    Done,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Prover {
    pub common: Common,
    tape: ProverTape,
    strategy: Strategy,
    variant: ProverVariant,
    sub_mode: SubVerifierMode,
    view: View,
    stage: Stage,
    pv_a: Option<OrFirst>,
    pv_e: u64,
    ce: Option<ElGamalCommitment>,
    c: Option<PedersenCommitment>,
    a: Option<OrFirst>,
    or: Option<OrProver>,
    e: u64,
    sub_a: Option<FirstMessage>,
    sub_eps: u64,
    setup: Option<BarakSetup>,
    barak_c: Option<NaorCommitment>,
    barak_r: Option<Bits>,
    wi_a: Option<OrFirst>,
}

impl Prover {
    pub fn new(common: Common, tape: ProverTape, strategy: Strategy) -> Self {
        let mut view = View::new();
        view.append(0x00, &common.to_bytes());
        // stands in for the private inputs
        let secrets = serde_json::to_vec(&(&strategy, &tape)).expect("serializable");
        view.append(0x01, &digest(&secrets));
        Prover {
            common,
            tape,
            strategy,
            variant: ProverVariant::FULL,
            sub_mode: SubVerifierMode::Prf,
            view,
            stage: Stage::PvCommit,
            pv_a: None,
            pv_e: 0,
            ce: None,
            c: None,
            a: None,
            or: None,
            e: 0,
            sub_a: None,
            sub_eps: 0,
            setup: None,
            barak_c: None,
            barak_r: None,
            wi_a: None,
        }
    }

    pub fn with_variant(mut self, v: ProverVariant) -> Self {
        self.variant = v;
        self
    }

    pub fn with_sub_mode(mut self, m: SubVerifierMode) -> Self {
        self.sub_mode = m;
        self
    }

    pub fn variant(&self) -> ProverVariant {
        self.variant
    }

    pub fn strategy(&self) -> &Strategy {
        &self.strategy
    }

    /// Scripted provers may switch strategy between snapshots.
    pub fn set_game(&mut self, g: u8) {
        if let Strategy::Trapdoor { game, .. } = &mut self.strategy {
            *game = g;
        }
    }

    pub fn view(&self) -> &View {
        &self.view
    }

    pub fn is_done(&self) -> bool {
        self.stage == Stage::Done
    }

    pub fn first_message(&self) -> Option<(&PedersenCommitment, &OrFirst)> {
        self.c.as_ref().zip(self.a.as_ref())
    }

    /// The Π_p challenge received in step 3.
    pub fn challenge(&self) -> u64 {
        self.e
    }

    pub fn ce(&self) -> Option<&ElGamalCommitment> {
        self.ce.as_ref()
    }

    pub fn rprime(&self) -> Option<OrInstance> {
        let c = self.c.as_ref()?;
        Some(build_relation_rprime(&self.common.params, self.common.x, &self.common.pk, c))
    }

    fn coin_input(&self) -> Vec<u8> {
        if self.variant.prf_coins {
            self.view.as_bytes().to_vec()
        } else {
            Vec::new()
        }
    }

    fn rng(&self, key: &PrfKey, label: &str) -> ChaCha20Rng {
        prf_rng(key, label.as_bytes(), &self.coin_input())
    }

    fn sub_verifier(&self) -> DerandomizedVerifier {
        let p = &self.common.params;
        let spec = match p.path {
            SubPath::A => path_a_spec(p.t),
            SubPath::B => barak_spec(TOY_N, p.t),
        };
        bggl_wrap(&spec, derive_key(&self.tape.r2, "rszk"), &self.common.to_bytes()).expect("public-coin")
    }

    fn push(&mut self, m: &Msg) {
        self.view.append(0x10 + m.round() as u8, &m.to_bytes());
    }

    fn send(&mut self, m: Msg) -> Action {
        self.push(&m);
        Action::Send(m)
    }

    fn out_of_order(&self, m: &Msg) -> BpkError {
        BpkError::OutOfOrder { round: self.view.len(), got: m.name() }
    }

    fn claim(&self) -> OpeningClaim {
        OpeningClaim { key: self.common.params.ck, ce: self.ce.expect("after phase 1"), e: self.e }
    }

    pub fn receive(&mut self, m: &Msg) -> Result<Action, BpkError> {
        let path = self.common.params.path;
        match (self.stage, m) {
            (Stage::Done, _) => Err(BpkError::Finished),
            (Stage::PvCommit, Msg::PvCommit { a }) => {
                self.push(m);
                let bits = self.common.params.group.challenge_bits();
                let e = self.rng(&self.tape.r1, "pv").gen_range(0..1u64 << bits);
                self.pv_a = Some(a.clone());
                self.pv_e = e;
                self.stage = Stage::PvResponse;
                Ok(self.send(Msg::PvChallenge { e }))
            }
            (Stage::PvResponse, Msg::PvResponse { z, ce }) => {
                let g = self.common.params.group;
                let pv = pi_v_instance(&self.common.pk);
                if !pv.verify(self.pv_a.as_ref().expect("stored"), self.pv_e, z)
                    || !g.is_member(ce.u.value())
                    || !g.is_member(ce.v.value())
                {
                    self.stage = Stage::Done;
                    return Ok(Action::Halt("verifier's proof of knowledge rejected".into()));
                }
                self.push(m);
                self.ce = Some(*ce);
                self.phase2()
            }
            (Stage::Reveal, Msg::RevealA { e, a }) if path == SubPath::A => {
                if !self.accept_e(*e) {
                    return Ok(Action::Halt("challenge outside the space".into()));
                }
                self.push(m);
                self.sub_a = Some(a.clone());
                self.sub_eps = self.sub_verifier().challenge(0, &self.coin_input())?;
                self.stage = Stage::SubResponse;
                Ok(self.send(Msg::SubChallenge { eps: self.sub_eps }))
            }
            (Stage::SubResponse, Msg::SubResponse { z }) => {
                self.push(m);
                let ok = path_a_verify(&self.claim(), self.common.params.t, self.sub_a.as_ref().expect("stored"), self.sub_eps, z);
                self.finish(ok)
            }
            (Stage::Reveal, Msg::RevealB { e }) if path == SubPath::B => {
                if !self.accept_e(*e) {
                    return Ok(Action::Halt("challenge outside the space".into()));
                }
                self.push(m);
                let setup = BarakSetup::from_coins(&self.sub_verifier().coins(0, &self.coin_input())?, TOY_N);
                self.setup = Some(setup.clone());
                self.stage = Stage::BarakCommit;
                Ok(self.send(Msg::BarakSetup { setup }))
            }
            (Stage::BarakCommit, Msg::BarakCommit { c }) => {
                self.push(m);
                let r = match &self.sub_mode {
                    SubVerifierMode::Prf => self.sub_verifier().coins(1, &self.coin_input())?,
                    SubVerifierMode::Program(p) => match vm_run(p, &c.to_bytes()) {
                        Ok(out) if out.len() * 8 >= TOY_N => Bits::from_bytes(&out, TOY_N),
                        _ => {
                            self.stage = Stage::Done;
                            return Ok(Action::Halt("sub-verifier program failed".into()));
                        }
                    },
                };
                self.barak_c = Some(c.clone());
                self.barak_r = Some(r.clone());
                self.stage = Stage::WiCommit;
                Ok(self.send(Msg::BarakR { r }))
            }
            (Stage::WiCommit, Msg::WiCommit { a }) => {
                self.push(m);
                self.wi_a = Some(a.clone());
                let eps = self.sub_verifier().challenge(2, &self.coin_input())?;
                self.sub_eps = eps;
                self.stage = Stage::WiResponse;
                Ok(self.send(Msg::WiChallenge { eps }))
            }
            (Stage::WiResponse, Msg::WiResponse { z }) => {
                self.push(m);
                let ok = barak_verify(
                    &self.claim(),
                    self.setup.as_ref().expect("stored"),
                    self.barak_c.as_ref().expect("stored"),
                    self.barak_r.as_ref().expect("stored"),
                    self.common.params.t,
                    self.wi_a.as_ref().expect("stored"),
                    self.sub_eps,
                    z,
                );
                self.finish(ok)
            }
            _ => Err(self.out_of_order(m)),
        }
    }

    fn accept_e(&mut self, e: u64) -> bool {
        let ok = self.rprime().is_some_and(|r| r.challenge_ok(e));
        if ok {
            self.e = e;
        } else {
            self.stage = Stage::Done;
        }
        ok
    }

    fn phase2(&mut self) -> Result<Action, BpkError> {
        let params = self.common.params;
        let g = params.group;
        let mut rng = self.rng(&self.tape.r2, "phase2");
        let r_s = g.random_scalar(&mut rng);
        let (s, witnesses) = match self.strategy {
            Strategy::Honest { w } => (g.random_scalar(&mut rng), vec![Some(Witness::Scalar(w)), None, None]),
            Strategy::Hybrid { w, alpha } => (alpha, vec![Some(Witness::Scalar(w)), None, None]),
            Strategy::Escape { alpha, b } => {
                let mut ws = vec![None, None, None];
                ws[1 + b as usize] = Some(Witness::Pair { w: alpha, r: r_s });
                (alpha, ws)
            }
            Strategy::Trapdoor { x0, x1, trapdoor, .. } => {
                let s = g.random_scalar(&mut rng);
                let t_inv = g.inv_q(trapdoor % g.q).ok_or(BpkError::Params("zero trapdoor".into()))?;
                // g^x h^{r'} = g^s h^{r_s}  ⇔  r' = r_s + (s - x)/t
                let open = |x: u64| g.add_q(r_s, g.mul_q(g.sub_q(s, x % g.q), t_inv));
                (s, vec![None, Some(Witness::Pair { w: x0, r: open(x0) }), Some(Witness::Pair { w: x1, r: open(x1) })])
            }
        };
        let c = com1_commit(&params.ck, s % g.q, r_s).map_err(|e| BpkError::Params(e.to_string()))?;
        let rprime = build_relation_rprime(&params, self.common.x, &self.common.pk, &c);
        let (a, or) = rprime.commit(&witnesses, &mut rng)?;
        self.c = Some(c);
        self.a = Some(a.clone());
        self.or = Some(or);
        self.stage = Stage::Reveal;
        Ok(self.send(Msg::PpCommit { c, a }))
    }

    fn finish(&mut self, sub_ok: bool) -> Result<Action, BpkError> {
        self.stage = Stage::Done;
        if self.variant.check_subproof && !sub_ok {
            return Ok(Action::Halt("opening proof rejected".into()));
        }
        let rprime = self.rprime().expect("after phase 2");
        let z = rprime.respond(self.or.as_ref().expect("after phase 2"), self.e, self.strategy.free_branch())?;
        Ok(self.send(Msg::PpResponse { z }))
    }
}
