//! Extraction by rewinding (Extra) and the two extracting games.
//!
//! Both run against scripted cheaters that know a key preimage and prove
//! through an escape branch of `R′`. The extractor plays the honest verifier,
//! snapshots the target session right after the prover's `a`, and replays
//! step 3 with `e′ ≠ e` until the prover answers again. On path A the opening
//! proof for `e′` is simulated for a guessed sub-challenge, so each replay
//! succeeds with probability `2^-t`; on path B the sub-verifier's program is
//! committed and the replay always goes through.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::{deliveries, HarnessError, Verdict, World};
use crate::bpk::{
    keygen_from, keygen_reduction, Msg, Params, PvWitness, Strategy, SubPath, SubProverMode, SubVerifierMode,
};
use crate::circuit::vm::{Instr, VmProgram};
use crate::codec::Encode;
use crate::commitments::{com0_commit, com_verify_opening, BindingViolation, Commitment, CommitmentKey, Opening, PedersenCommitment};
use crate::primitives::{PrfKey, Profile, GroupParams};
use crate::rszk::one_many::{one_many_run, Adversary, AdversaryKind};
use crate::rszk::{LiveBranch, OpeningClaim, TOY_N};
use crate::sigma::{OrFirst, OrResponse, Witness};

/// Code of the scripted prover's sub-verifier in session `i`:
/// `r = c[i] ^ K_i`.
pub fn p_star_program(i: usize) -> VmProgram {
    let input_len = 3 * TOY_N * TOY_N / 8;
    VmProgram {
        code: vec![
            Instr::In { dst: 0, index: (i % input_len) as u8 },
            Instr::Ldi { dst: 1, imm: 0x5a ^ i as u8 },
            Instr::Xor { dst: 0, src: 1 },
            Instr::Out { src: 0 },
        ],
        input_len,
        output_len: 1,
    }
}

fn sub_mode(params: &Params, i: usize) -> SubVerifierMode {
    match params.path {
        SubPath::A => SubVerifierMode::Prf,
        SubPath::B => SubVerifierMode::Program(p_star_program(i)),
    }
}

/// Replays per accepted session on path A: one success in `2^t` guesses.
fn guess_factor(params: &Params) -> usize {
    match params.path {
        SubPath::A => 1usize << params.t.min(20),
        SubPath::B => 1,
    }
}

struct Second {
    a: OrFirst,
    e: u64,
    z: OrResponse,
    attempts: usize,
    lambda: bool,
}

/// Restores `sid` to `snap` and reveals `e2` until the prover answers, at
/// most `cap` times. `prep` re-applies per-game settings after each restore.
fn rewind_second(
    w: &mut World,
    sid: usize,
    snap: &str,
    e2: u64,
    cap: usize,
    prep: impl Fn(&mut World),
) -> Result<Option<Second>, HarnessError> {
    let path = w.params.path;
    for k in 0..cap {
        w.reset(sid, snap)?;
        prep(w);
        let plan = match path {
            SubPath::A => SubProverMode::Guess { e: e2, seed: k as u64 },
            SubPath::B => SubProverMode::Simulate { e: e2, program: p_star_program(sid) },
        };
        w.session_mut(sid).verifier.set_plan(plan);
        if w.run_to_end(sid)? == Verdict::Accept {
            let v = &w.session(sid).verifier;
            let (a, e, z) = v.pp_transcript().expect("accepted");
            let lambda = v.sub_live_branch() == Some(LiveBranch::Lambda);
            return Ok(Some(Second { a, e, z, attempts: k + 1, lambda }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtractOutcome {
    /// A preimage of the injected `y`, re-checked as `g^x = y`.
    Preimage(u64),
    /// Session `j` was proven with a witness for `x`: no key extracted.
    NoKey,
    Bottom(String),
}

impl ExtractOutcome {
    pub fn preimage(&self) -> Option<u64> {
        match self {
            ExtractOutcome::Preimage(x) => Some(*x),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExtractReport {
    pub outcome: ExtractOutcome,
    /// The element injected as `y_{1-b}`.
    pub y: u64,
    pub sessions: usize,
    pub stage1_accepts: usize,
    pub cap: usize,
    pub attempts: usize,
    /// Path B: the replay's WI argument ran on the Λ branch, after the
    /// committed program was checked to predict `r`.
    pub lambda_asserted: bool,
    pub log: String,
}

/// Runs `s` concurrent sessions of a scripted prover against a verifier whose
/// key has `y` injected, then rewinds session `j`. The prover cheats (uses the
/// preimage of `y`) in session `cheat` and is honest elsewhere.
pub fn extract_concurrent(
    params: Params,
    s: usize,
    j: usize,
    cheat: Option<usize>,
    seed: u64,
) -> Result<ExtractReport, HarnessError> {
    if s == 0 || j >= s || cheat.is_some_and(|c| c >= s) {
        return Err(HarnessError::Schedule(format!("session index out of range for s = {s}")));
    }
    let g = params.group;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    // only the scripted prover knows x*; the reduction gets y alone
    let x_star = nonzero_scalar(&params, &mut rng);
    let y = g.exp(x_star);
    let keys = keygen_reduction(g, y, &mut rng);
    let hidden = 1 - keys.sk.b;
    let mut w = World::with_keys(params, keys, PvWitness::Single(keys.sk), &mut rng)?;
    for i in 0..s {
        let (x, wit) = w.statement(i);
        let strategy = if cheat == Some(i) {
            Strategy::Escape { alpha: x_star, b: hidden }
        } else {
            Strategy::Honest { w: wit }
        };
        w.start_with(x, strategy, sub_mode(&params, i))?;
    }

    let mut report = ExtractReport {
        outcome: ExtractOutcome::Bottom(String::new()),
        y: y.value(),
        sessions: s,
        stage1_accepts: 0,
        cap: 0,
        attempts: 0,
        lambda_asserted: false,
        log: String::new(),
    };

    // stage 1: honest verifier everywhere, round robin
    let snap = "extra";
    let mut snapped = false;
    for _ in 0..deliveries(params.path) {
        for i in 0..s {
            if w.session(i).verdict.is_some() {
                continue;
            }
            if i == j && !snapped && matches!(w.session(i).pending, Some(Msg::PpCommit { .. })) {
                w.snap(j, snap)?;
                snapped = true;
            }
            w.deliver(i)?;
        }
    }
    report.stage1_accepts = w.verdicts().iter().filter(|v| v.as_ref().is_some_and(Verdict::accepted)).count();
    let done = |mut r: ExtractReport, w: &World, o: ExtractOutcome| {
        r.outcome = o;
        r.log = w.log_text();
        Ok(r)
    };
    if !snapped || !w.session(j).verdict.as_ref().is_some_and(Verdict::accepted) {
        return done(report, &w, ExtractOutcome::Bottom(format!("session {j} did not accept in stage 1")));
    }
    report.cap = 64 * s.div_ceil(report.stage1_accepts) * guess_factor(&params);

    // stage 2
    let (a, e, z) = w.session(j).verifier.pp_transcript().expect("accepted");
    let Some(second) = rewind_second(&mut w, j, snap, e ^ 1, report.cap, |_| {})? else {
        report.attempts = report.cap;
        let why = format!("no second accept within {} replays", report.cap);
        return done(report, &w, ExtractOutcome::Bottom(why));
    };
    report.attempts = second.attempts;
    report.lambda_asserted = second.lambda;
    if second.a != a {
        return Err(HarnessError::Snapshot("replayed first message differs".into()));
    }
    let rprime = w.session(j).verifier.rprime().expect("phase 2 ran");
    let outcome = match rprime.extract(&a, (e, &z), (second.e, &second.z)) {
        Ok((b, Witness::Pair { w: pre, .. })) if b == 1 + hidden as usize && g.exp(pre) == y => ExtractOutcome::Preimage(pre),
        Ok((0, _)) => ExtractOutcome::NoKey,
        Ok((b, _)) => ExtractOutcome::Bottom(format!("branch {b} witness is not a preimage of y")),
        Err(err) => ExtractOutcome::Bottom(err.to_string()),
    };
    done(report, &w, outcome)
}

#[derive(Clone, Debug)]
pub struct GameResult {
    /// Verdict of the other session, whose Π_v used `x_b`.
    pub other_accepted: bool,
    pub a: Vec<u8>,
    pub c: PedersenCommitment,
    /// `(branch, w, r)` with `c = g^w h^r`, re-checked.
    pub opening: Option<(usize, u64, u64)>,
    pub attempts: usize,
}

#[derive(Clone, Debug)]
pub struct ExpReport {
    pub games: [GameResult; 2],
    pub a_identical: bool,
    pub violation: Option<BindingViolation>,
    pub ck: CommitmentKey,
    pub log: String,
}

fn nonzero_scalar(params: &Params, rng: &mut ChaCha20Rng) -> u64 {
    loop {
        let x = params.group.random_scalar(rng);
        if x != 0 {
            return x;
        }
    }
}

/// Runs the shared prefix once, snapshots the target session after `a`, then
/// plays Extracting Game 0 and Game 1 from that snapshot. With `trapdoor`,
/// the commitment key's trapdoor is handed to the scripted prover, which
/// opens `c` to `x_b` in game `b`.
pub fn run_exp_games(params: Params, seed: u64, trapdoor: bool) -> Result<ExpReport, HarnessError> {
    let mut params = params;
    let g = params.group;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let x0 = nonzero_scalar(&params, &mut rng);
    let x1 = loop {
        let x = nonzero_scalar(&params, &mut rng);
        if x != x0 {
            break x;
        }
    };
    let keys = keygen_from(g, x0, 0, x1);
    let strategy = if trapdoor {
        let td = nonzero_scalar(&params, &mut rng);
        params.ck = CommitmentKey::with_trapdoor(g, td);
        Strategy::Trapdoor { x0, x1, trapdoor: td, game: 0 }
    } else {
        Strategy::Escape { alpha: x0, b: 0 }
    };
    let mut w = World::with_keys(params, keys, PvWitness::Both { x0, x1, choice: 0 }, &mut rng)?;
    let (xt, _) = w.statement(0);
    let (xo, wo) = w.statement(1);
    let target = w.start_with(xt, strategy, sub_mode(&params, 0))?;
    let other = w.start_with(xo, Strategy::Honest { w: wo }, sub_mode(&params, 1))?;

    // shared prefix: the other session stops with its Π_v response due
    w.run_until(other, |m| matches!(m, Msg::PvChallenge { .. }))?;
    w.run_until(target, |m| matches!(m, Msg::PpCommit { .. }))?;
    w.snap(target, "split-target")?;
    w.snap(other, "split-other")?;
    let cap = 64 * guess_factor(&params);

    let mut games = Vec::with_capacity(2);
    for b in 0..2u8 {
        w.reset(other, "split-other")?;
        w.session_mut(other).verifier.set_pv_choice(b);
        let other_accepted = w.run_to_end(other)?.accepted();

        let prep = |w: &mut World| w.session_mut(target).prover.set_game(b);
        w.reset(target, "split-target")?;
        prep(&mut w);
        let first = w.run_to_end(target)?;
        let v = &w.session(target).verifier;
        let c = v.commitment().expect("phase 2 ran");
        let Some((a, e, z)) = v.pp_transcript().filter(|_| first.accepted()) else {
            return Err(HarnessError::Schedule(format!("game {b}: target session rejected: {first:?}")));
        };
        let mut game = GameResult { other_accepted, a: a.to_bytes(), c, opening: None, attempts: 0 };
        if let Some(second) = rewind_second(&mut w, target, "split-target", e ^ 1, cap, prep)? {
            game.attempts = second.attempts;
            let rprime = w.session(target).verifier.rprime().expect("phase 2 ran");
            if let Ok((branch, Witness::Pair { w: m, r })) = rprime.extract(&a, (e, &z), (second.e, &second.z)) {
                let ok = com_verify_opening(&params.ck, &Commitment::Pedersen(c), &Opening::Scalar { message: m, randomness: r });
                if ok {
                    game.opening = Some((branch, m, r));
                }
            }
        } else {
            game.attempts = cap;
        }
        games.push(game);
    }
    let games: [GameResult; 2] = games.try_into().expect("two games");
    let a_identical = games[0].a == games[1].a && games[0].c == games[1].c;
    let violation = match (games[0].opening, games[1].opening) {
        (Some((_, m0, r0)), Some((_, m1, r1))) if a_identical && m0 != m1 => Some(BindingViolation {
            commitment: Commitment::Pedersen(games[0].c),
            first: Opening::Scalar { message: m0, randomness: r0 },
            second: Opening::Scalar { message: m1, randomness: r1 },
        }),
        _ => None,
    };
    Ok(ExpReport { games, a_identical, violation, ck: params.ck, log: w.log_text() })
}

#[derive(Clone, Debug)]
pub struct OneManyDemo {
    pub real_accept: bool,
    pub sim_accept: bool,
    pub lambda_asserted: bool,
    pub live: Vec<LiveBranch>,
}

/// One-many run of the Barak skeleton: all sessions real, then session `j`
/// simulated without its witness. The adversary's accept bit must agree.
pub fn one_many_demo(kind: AdversaryKind, s: usize, j: usize, t: usize, seed: u64) -> Result<OneManyDemo, HarnessError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let g = GroupParams::generate(Profile::Tiny, 0);
    let key = CommitmentKey::public(g);
    let mut claims = Vec::with_capacity(s);
    let mut witnesses = Vec::with_capacity(s);
    for _ in 0..s {
        let e = rng.gen_range(0..1u64 << g.challenge_bits());
        let r = g.random_scalar(&mut rng);
        let ce = com0_commit(&key, e, r).map_err(|e| HarnessError::Schedule(e.to_string()))?;
        claims.push(OpeningClaim { key, ce, e });
        witnesses.push(Some(r));
    }
    let adv = Adversary::new(kind, PrfKey::random(128, &mut rng), t);
    let real = one_many_run(&adv, &claims, &witnesses, None, t, &mut rng)?;
    let mut hidden = witnesses.clone();
    if let Some(w) = hidden.get_mut(j) {
        *w = None;
    }
    let sim = one_many_run(&adv, &claims, &hidden, Some(j), t, &mut rng)?;
    Ok(OneManyDemo {
        real_accept: real.view.accept,
        sim_accept: sim.view.accept,
        lambda_asserted: sim.lambda_asserted,
        live: sim.live,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extra_recovers_the_injected_preimage() {
        let p = Params::tiny();
        for seed in 0..5 {
            let r = extract_concurrent(p, 4, 2, Some(2), seed).unwrap();
            let x = r.outcome.preimage().unwrap_or_else(|| panic!("seed {seed}: {:?}", r.outcome));
            assert_eq!(p.group.exp(x).value(), r.y);
            assert!(r.attempts <= r.cap);
        }
    }

    #[test]
    fn honest_prover_and_wrong_guess_give_no_key() {
        let p = Params::tiny();
        assert_eq!(extract_concurrent(p, 2, 0, None, 1).unwrap().outcome, ExtractOutcome::NoKey);
        assert!(extract_concurrent(p, 3, 0, Some(1), 1).unwrap().outcome.preimage().is_none());
        assert!(extract_concurrent(p, 2, 2, None, 1).is_err());
    }

    #[test]
    fn exp_games_share_a() {
        for seed in 0..3 {
            let r = run_exp_games(Params::tiny(), seed, false).unwrap();
            assert!(r.a_identical && r.violation.is_none());
            assert_eq!(r.games[0].opening, r.games[1].opening);
            assert!(r.games[0].opening.is_some() && r.games.iter().all(|g| g.other_accepted));
        }
    }

    #[test]
    fn one_many_bits_agree() {
        let d = one_many_demo(AdversaryKind::Echo, 3, 1, 8, 2).unwrap();
        assert!(d.lambda_asserted && d.real_accept == d.sim_accept);
        assert_eq!(d.live[1], LiveBranch::Lambda);
    }

    #[test]
    fn trapdoor_prover_yields_violation() {
        let r = run_exp_games(Params::tiny(), 4, true).unwrap();
        assert!(r.a_identical);
        let v = r.violation.expect("two openings");
        assert!(v.is_valid(&r.ck));
    }
}
