//! The rZK simulator Sim, the hybrid HSim and the real interaction, run
//! against the same deterministic verifier.
//!
//! Sim never sees a witness for `x`. It rewinds the verifier's Π_v on a
//! fresh copy of the verifier's code, extracts `α` from two answers, and
//! proves `R′` through branch `1 + b`. HSim commits to `α` the same way but
//! answers on branch 0 with the real witness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::{run_events, HarnessError, Schedule, Verdict, World};
use crate::bpk::{pi_v_instance, Action, Msg, Params, Strategy, SubVerifierMode};
use crate::primitives::GroupElement;
use crate::sigma::Witness;

/// Sim's budget of Π_v rewinds per key.
pub const SIM_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VStarKind {
    /// Runs the sessions round robin.
    HonestLike,
    /// Random interleaving with at least this many resets of the prover.
    Resetting { resets: usize },
    /// Never answers the prover's Π_v challenge.
    Aborting,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Real,
    Sim,
    HSim,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Real => "real",
            Mode::Sim => "sim",
            Mode::HSim => "hsim",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Accept,
    Reject,
    Aborted,
}

#[derive(Clone, Debug)]
pub struct RzkReport {
    pub mode: Mode,
    /// The verifier's output bit per session.
    pub outcomes: Vec<Outcome>,
    /// Π_v rewinds Sim spent (0 in the real run).
    pub attempts: usize,
    pub extracted: Option<(u8, u64)>,
    pub prefixes_unique: bool,
    pub log: String,
}

/// Forks the verifier's Π_v on two distinct challenges until extraction
/// succeeds. Returns `(b, α)` with `y_b = g^α` and the attempts used.
pub fn sim_extract_key(world: &World, x: GroupElement, seed: u64) -> (Option<(u8, u64)>, usize) {
    let pk = world.keys.pk;
    let pv = pi_v_instance(&pk);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut v = world.probe_verifier(x, 0);
    let Ok(first) = v.start() else { return (None, 0) };
    let Msg::PvCommit { a } = first else { return (None, 0) };
    let bits = world.params.group.challenge_bits();
    let answer = |e: u64| match v.clone().receive(&Msg::PvChallenge { e }) {
        Ok(Action::Send(Msg::PvResponse { z, .. })) => Some(z),
        _ => None,
    };
    for k in 1..=SIM_CAP {
        let e1 = rng.gen_range(0..1u64 << bits);
        let e2 = rng.gen_range(0..1u64 << bits);
        if e1 == e2 {
            continue;
        }
        let (Some(z1), Some(z2)) = (answer(e1), answer(e2)) else { continue };
        if let Ok((b, Witness::Scalar(alpha))) = pv.extract(&a, (e1, &z1), (e2, &z2)) {
            // re-checked against the public key, not trusted from the extractor
            if world.params.group.exp(alpha) == pk.y(b as u8) {
                return (Some((b as u8, alpha)), k);
            }
        }
    }
    (None, SIM_CAP)
}

/// Runs `s` sessions in `mode` against the verifier fixed by `seed`.
pub fn rzk_run(params: Params, kind: VStarKind, s: usize, mode: Mode, seed: u64) -> Result<RzkReport, HarnessError> {
    let mut w = World::new(params, seed)?;
    let stmts: Vec<(GroupElement, u64)> = (0..s).map(|i| w.statement(i)).collect();
    let xs: Vec<GroupElement> = stmts.iter().map(|p| p.0).collect();

    let (extracted, attempts) = match (mode, kind) {
        (Mode::Real, _) => (None, 0),
        // sessions never reach phase 2; nothing to extract
        (_, VStarKind::Aborting) => (None, 0),
        _ => {
            let (k, n) = sim_extract_key(&w, xs.first().copied().unwrap_or(w.params.group.generator()), seed);
            if k.is_none() && s > 0 {
                return Err(HarnessError::Schedule(format!("Sim found no key within {SIM_CAP} rewinds")));
            }
            (k, n)
        }
    };
    let strategy = |i: usize| match (mode, extracted) {
        (Mode::Real, _) => Strategy::Honest { w: stmts[i].1 },
        (Mode::Sim, Some((b, alpha))) => Strategy::Escape { alpha, b },
        (Mode::HSim, Some((_, alpha))) => Strategy::Hybrid { w: stmts[i].1, alpha },
        // aborting verifier: phase 2 is never reached, so no witness is used
        (_, None) => Strategy::Honest { w: 0 },
    };
    let mut start = |w: &mut World, x: GroupElement| -> Result<usize, HarnessError> {
        let i = w.num_sessions();
        w.start_with(x, strategy(i), SubVerifierMode::Prf)
    };
    match kind {
        VStarKind::HonestLike => run_events(&mut w, &Schedule::round_robin(&xs, params.path), &mut start)?,
        VStarKind::Resetting { resets } => {
            run_events(&mut w, &Schedule::with_resets(&xs, params.path, resets, seed), &mut start)?
        }
        VStarKind::Aborting => {
            for &x in &xs {
                let sid = start(&mut w, x)?;
                w.run_until(sid, |m| matches!(m, Msg::PvChallenge { .. }))?;
            }
        }
    }
    let outcomes = w
        .verdicts()
        .into_iter()
        .map(|v| match v {
            Some(Verdict::Accept) => Outcome::Accept,
            Some(_) => Outcome::Reject,
            None => Outcome::Aborted,
        })
        .collect();
    Ok(RzkReport { mode, outcomes, attempts, extracted, prefixes_unique: w.prefixes_unique(), log: w.log_text() })
}

/// Real, Sim and HSim on the same verifier.
pub fn rzk_compare(params: Params, kind: VStarKind, s: usize, seed: u64) -> Result<[RzkReport; 3], HarnessError> {
    Ok([
        rzk_run(params, kind, s, Mode::Real, seed)?,
        rzk_run(params, kind, s, Mode::Sim, seed)?,
        rzk_run(params, kind, s, Mode::HSim, seed)?,
    ])
}
