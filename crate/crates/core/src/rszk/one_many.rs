//! One-many simulation of the Barak skeleton against a deterministic,
//! program-backed verifier.
//!
//! All sessions first receive `(h, rc)` and send `c`; then each session
//! gets `r`, the WI argument, `ε` and `z`. In session `j` the simulator
//! commits to the verifier's residual program for that session, with
//! every value produced by the honest sessions inlined as a constant.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    barak_spec, barak_verify, bggl_wrap, BarakProver, BarakSetup, BarakTranscript, DerandomizedVerifier, LiveBranch,
    OpeningClaim, RszkError, SubWitness, TOY_N,
};
use crate::circuit::lambda::LambdaBounds;
use crate::circuit::vm::{vm_run, Instr, VmProgram};
use crate::circuit::CircuitError;
use crate::codec::{Encode, View};
use crate::commitments::NaorCommitment;
use crate::primitives::{Bits, PrfKey};

/// How the adversary derives `r_i` (one byte at `n = 8`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdversaryKind {
    /// `r_i = K`.
    Const(u8),
    /// `r_i = c_i[0]`.
    Echo,
    /// `r_i = c_i[k] ^ c_0[m]`: couples every session to the first one.
    Mixer { k: u8, m: u8 },
}

/// Deterministic verifier: setups and `ε` come from a PRF of its view.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Adversary {
    pub kind: AdversaryKind,
    pub coins: DerandomizedVerifier,
}

impl Adversary {
    pub fn new(kind: AdversaryKind, key: PrfKey, t: usize) -> Self {
        let coins = bggl_wrap(&barak_spec(TOY_N, t), key, b"one-many").expect("public-coin");
        Adversary { kind, coins }
    }

    fn setup(&self, i: usize, claim: &OpeningClaim) -> Result<BarakSetup, RszkError> {
        let mut prefix = (i as u32).to_be_bytes().to_vec();
        prefix.extend(claim.to_bytes());
        Ok(BarakSetup::from_coins(&self.coins.coins(0, &prefix)?, TOY_N))
    }

    /// Next message `r_i` given every commitment seen so far.
    pub fn next_r(&self, i: usize, cs: &[NaorCommitment]) -> Bits {
        let byte = match self.kind {
            AdversaryKind::Const(k) => k,
            AdversaryKind::Echo => cs[i].to_bytes()[0],
            AdversaryKind::Mixer { k, m } => cs[i].to_bytes()[k as usize] ^ cs[0].to_bytes()[m as usize],
        };
        Bits::from_bytes(&[byte], TOY_N)
    }

    /// The adversary's code for session `i` as a function of `c_i` alone,
    /// other sessions' messages inlined.
    pub fn residual_program(&self, i: usize, cs: &[NaorCommitment]) -> Result<VmProgram, RszkError> {
        let input_len = 3 * TOY_N * TOY_N / 8;
        let code = match self.kind {
            AdversaryKind::Const(k) => return Ok(VmProgram::constant(&[k], input_len)),
            AdversaryKind::Echo => return Ok(VmProgram::echo(1, input_len)),
            AdversaryKind::Mixer { k, m } => {
                let other = if i == 0 {
                    Instr::In { dst: 1, index: m }
                } else {
                    Instr::Ldi { dst: 1, imm: cs[0].to_bytes()[m as usize] }
                };
                vec![Instr::In { dst: 0, index: k }, other, Instr::Xor { dst: 0, src: 1 }, Instr::Out { src: 0 }]
            }
        };
        let p = VmProgram { code, input_len, output_len: 1 };
        let b = LambdaBounds::TOY.max_instructions;
        if p.code.len() > b {
            return Err(CircuitError::Capacity(format!("residual program has {} instructions, bound {b}", p.code.len())).into());
        }
        p.validate(b)?;
        Ok(p)
    }

    fn eps(&self, i: usize, t: &BarakTranscript, a_bytes: &[u8]) -> Result<u64, RszkError> {
        let mut v = View::new();
        v.append(0, &(i as u32).to_be_bytes());
        v.append(1, &t.setup.to_bytes());
        v.append(2, &t.c.to_bytes());
        v.append(3, t.r.as_bytes());
        v.append(4, a_bytes);
        self.coins.challenge(2, v.as_bytes())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneManyView {
    pub sessions: Vec<BarakTranscript>,
    /// The adversary's final output: all sessions accepted.
    pub accept: bool,
}

#[derive(Clone, Debug)]
pub struct OneManyReport {
    pub view: OneManyView,
    pub live: Vec<LiveBranch>,
    /// Set when the target session's program was checked to output the
    /// `r` the adversary actually sent.
    pub lambda_asserted: bool,
    pub residual: Option<VmProgram>,
}

/// Runs every session. With `target = Some(j)` session `j` is simulated
/// and needs no witness; otherwise all witnesses are used.
pub fn one_many_run<R: Rng + ?Sized>(
    adv: &Adversary,
    claims: &[OpeningClaim],
    witnesses: &[Option<u64>],
    target: Option<usize>,
    t: usize,
    rng: &mut R,
) -> Result<OneManyReport, RszkError> {
    let s = claims.len();
    if witnesses.len() != s || target.is_some_and(|j| j >= s) {
        return Err(RszkError::Refused("session count mismatch"));
    }
    let setups: Vec<BarakSetup> = claims.iter().enumerate().map(|(i, c)| adv.setup(i, c)).collect::<Result<_, _>>()?;

    // commitment phase; the target commits last so everything it depends on
    // is already fixed
    let mut order: Vec<usize> = (0..s).filter(|&i| Some(i) != target).collect();
    order.extend(target);
    let mut provers: Vec<Option<BarakProver>> = vec![None; s];
    let mut cs: Vec<Option<NaorCommitment>> = vec![None; s];
    let mut residual = None;
    for &i in &order {
        let witness = if Some(i) == target {
            let known: Vec<NaorCommitment> = cs.iter().map(|c| c.clone().unwrap_or(NaorCommitment { bits: vec![] })).collect();
            let p = adv.residual_program(i, &known)?;
            residual = Some(p.clone());
            SubWitness::Program(p)
        } else {
            SubWitness::Opening(witnesses[i].ok_or(RszkError::Refused("missing witness"))?)
        };
        let mut p = BarakProver::new(claims[i].clone(), witness, t)?;
        cs[i] = Some(p.commit(&setups[i], rng)?);
        provers[i] = Some(p);
    }
    let cs: Vec<NaorCommitment> = cs.into_iter().map(|c| c.expect("all committed")).collect();

    let mut sessions = Vec::with_capacity(s);
    let mut live = Vec::with_capacity(s);
    let mut lambda_asserted = false;
    for i in 0..s {
        let r = adv.next_r(i, &cs);
        let p = provers[i].as_mut().expect("all committed");
        if Some(i) == target {
            let prog = residual.as_ref().expect("target committed");
            let out = vm_run(prog, &cs[i].to_bytes())?;
            assert_eq!(out, r.as_bytes(), "residual program must predict r");
            lambda_asserted = true;
        }
        let a = p.wi_commit(&r, rng)?;
        let mut tr = BarakTranscript {
            setup: setups[i].clone(),
            c: cs[i].clone(),
            r: r.clone(),
            a: a.clone(),
            eps: 0,
            z: crate::sigma::OrResponse { e: vec![], z: vec![] },
            accepted: false,
        };
        tr.eps = adv.eps(i, &tr, &a.to_bytes())?;
        tr.z = p.wi_respond(tr.eps)?;
        tr.accepted = barak_verify(&claims[i], &tr.setup, &tr.c, &tr.r, t, &tr.a, tr.eps, &tr.z);
        live.push(p.live_branch().expect("wi ran"));
        sessions.push(tr);
    }
    let accept = sessions.iter().all(|t| t.accepted);
    Ok(OneManyReport { view: OneManyView { sessions, accept }, live, lambda_asserted, residual })
}

/// Simulates session `j` while playing the others honestly.
pub fn one_many_simulate<R: Rng + ?Sized>(
    adv: &Adversary,
    claims: &[OpeningClaim],
    j: usize,
    witnesses: &[Option<u64>],
    t: usize,
    rng: &mut R,
) -> Result<OneManyReport, RszkError> {
    one_many_run(adv, claims, witnesses, Some(j), t, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commitments::{com0_commit, CommitmentKey};
    use crate::primitives::{GroupParams, Profile};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn claims(s: usize, rng: &mut ChaCha20Rng) -> (Vec<OpeningClaim>, Vec<Option<u64>>) {
        let g = GroupParams::generate(Profile::Tiny, 0);
        let key = CommitmentKey::public(g);
        (0..s)
            .map(|_| {
                let e = rng.gen_range(0..1u64 << g.challenge_bits());
                let r = g.random_scalar(rng);
                (OpeningClaim { ce: com0_commit(&key, e, r).unwrap(), key, e }, Some(r))
            })
            .unzip()
    }

    #[test]
    fn mixer_residual_inlines_the_first_session() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let (cl, w) = claims(2, &mut rng);
        let adv = Adversary::new(AdversaryKind::Mixer { k: 3, m: 7 }, PrfKey::new(vec![9, 9]), 8);
        let rep = one_many_simulate(&adv, &cl, 1, &w, 8, &mut rng).unwrap();
        assert!(rep.lambda_asserted && rep.view.accept);
        assert_eq!(rep.live, vec![LiveBranch::Opening, LiveBranch::Lambda]);
        assert!(matches!(rep.residual.unwrap().code[1], Instr::Ldi { dst: 1, .. }));
    }

    #[test]
    fn target_without_witness_and_false_claim() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let (mut cl, mut w) = claims(1, &mut rng);
        cl[0].e ^= 1;
        w[0] = None;
        let adv = Adversary::new(AdversaryKind::Const(0x5a), PrfKey::new(vec![1]), 8);
        let rep = one_many_simulate(&adv, &cl, 0, &w, 8, &mut rng).unwrap();
        assert!(rep.view.accept);
        assert_eq!(rep.residual.unwrap(), VmProgram::constant(&[0x5a], 24));
        assert!(one_many_run(&adv, &cl, &w, None, 8, &mut rng).is_err());
    }
}
