//! Resetting-verifier attacks on Π_p.
//!
//! The reset attack tries two ways of getting a second accepting
//! `(a, e′, z′)` for the same first message `a`:
//!
//! 1. restore the prover right after `a` and reveal `e′ = e ⊕ 1`, backed by
//!    the sub-proof recorded for `e` (only a prover that skips the
//!    sub-proof check answers);
//! 2. restart the prover from scratch and commit to `e′` in phase 1, so the
//!    opening proof is honest (only a prover whose coins ignore the view
//!    sends the same `a` again).
//!
//! Neither avenue grinds the sub-proof: with `t`-bit sub-challenges a
//! verifier willing to reset about `2^t` times would get through.

use std::time::{Duration, Instant};

use super::{HarnessError, Verdict, World};
use crate::bpk::{Msg, Params, ProverVariant, SubPath, SubProverMode};
use crate::sigma::{OrFirst, OrResponse, Witness};

#[derive(Clone, Debug)]
pub struct AttackReport {
    pub variant: ProverVariant,
    pub trials: usize,
    pub successes: usize,
    /// Successes per avenue.
    pub by_avenue: [usize; 2],
    /// Every extracted witness satisfied `x = g^w`.
    pub witnesses_verified: bool,
    pub prefixes_unique: bool,
    pub elapsed: Duration,
}

fn trial_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64)
}

/// Extracts from two accepting transcripts sharing `a` and re-checks the
/// result against the statement.
fn extract_checked(w: &World, sid: usize, a: &OrFirst, t1: (u64, &OrResponse), t2: (u64, &OrResponse)) -> Option<u64> {
    let rprime = w.session(sid).verifier.rprime()?;
    let (branch, wit) = rprime.extract(a, t1, t2).ok()?;
    match (branch, wit) {
        (0, Witness::Scalar(x)) if w.params.group.exp(x) == w.session(sid).verifier.common.x => Some(x),
        _ => None,
    }
}

pub fn reset_attack(params: Params, variant: ProverVariant, trials: usize, seed: u64) -> Result<AttackReport, HarnessError> {
    if params.path != SubPath::A {
        return Err(HarnessError::Schedule("the reset attack runs on path A".into()));
    }
    let start = Instant::now();
    let mut report = AttackReport {
        variant,
        trials,
        successes: 0,
        by_avenue: [0, 0],
        witnesses_verified: true,
        prefixes_unique: true,
        elapsed: Duration::ZERO,
    };
    for i in 0..trials {
        let mut w = World::new(params, trial_seed(seed, i))?;
        w.variant = variant;
        let x = w.statement(0).0;
        let sid = w.start(x)?;
        w.snap(sid, "init")?;
        w.run_until(sid, |m| matches!(m, Msg::PpCommit { .. }))?;
        w.snap(sid, "a")?;
        if !w.run_to_end(sid)?.accepted() {
            return Err(HarnessError::Schedule("honest run rejected".into()));
        }
        let (a, e, z) = w.session(sid).verifier.pp_transcript().expect("finished");
        let (sub_a, sub_z) = w.session(sid).verifier.sub_transcript().expect("path A");
        let e2 = e ^ 1;

        let mut got = None;
        // avenue 1
        w.reset(sid, "a")?;
        w.session_mut(sid).verifier.set_plan(SubProverMode::Replay { e: e2, a: sub_a, z: sub_z });
        if w.run_to_end(sid)? == Verdict::Accept {
            let (a2, _, z2) = w.session(sid).verifier.pp_transcript().expect("finished");
            if a2 == a {
                got = extract_checked(&w, sid, &a, (e, &z), (e2, &z2)).map(|x| (0, x));
            }
        }
        // avenue 2
        if got.is_none() {
            w.reset(sid, "init")?;
            w.session_mut(sid).verifier.commit_to(e2);
            if w.run_to_end(sid)? == Verdict::Accept {
                let (a2, _, z2) = w.session(sid).verifier.pp_transcript().expect("finished");
                if a2 == a {
                    got = extract_checked(&w, sid, &a, (e, &z), (e2, &z2)).map(|x| (1, x));
                }
            }
        }
        if let Some((avenue, xw)) = got {
            report.successes += 1;
            report.by_avenue[avenue] += 1;
            report.witnesses_verified &= w.params.group.exp(xw) == x;
        }
        report.prefixes_unique &= w.prefixes_unique();
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct ReplayReport {
    pub trials: usize,
    /// Runs where the prover answered `e′` after a guessed sub-proof.
    pub accepted: usize,
    pub prefixes_unique: bool,
    pub releases_unique_violations: usize,
}

impl ReplayReport {
    pub fn rate(&self) -> f64 {
        self.accepted as f64 / self.trials as f64
    }
}

/// After an honest run, restores the prover after `a` and reveals
/// `e′ ≠ e` with a path-A proof simulated for a guessed challenge: one
/// attempt per trial.
pub fn challenge_replay(params: Params, variant: ProverVariant, trials: usize, seed: u64) -> Result<ReplayReport, HarnessError> {
    if params.path != SubPath::A {
        return Err(HarnessError::Schedule("challenge replay runs on path A".into()));
    }
    let mut rep = ReplayReport { trials, accepted: 0, prefixes_unique: true, releases_unique_violations: 0 };
    for i in 0..trials {
        let mut w = World::new(params, trial_seed(seed ^ 0x5eed, i))?;
        w.variant = variant;
        let x = w.statement(0).0;
        let sid = w.start(x)?;
        w.run_until(sid, |m| matches!(m, Msg::PpCommit { .. }))?;
        w.snap(sid, "a")?;
        w.run_to_end(sid)?;
        let e = w.session(sid).verifier.revealed();
        w.reset(sid, "a")?;
        w.session_mut(sid).verifier.set_plan(SubProverMode::Guess { e: e ^ 1, seed: i as u64 });
        if w.run_to_end(sid)?.accepted() {
            rep.accepted += 1;
        }
        rep.prefixes_unique &= w.prefixes_unique();
        rep.releases_unique_violations += (!w.releases_unique()) as usize;
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weakened_variants_fall_full_protocol_holds() {
        let p = Params::tiny();
        for v in ProverVariant::ALL {
            let r = reset_attack(p, v, 10, 1).unwrap();
            let expected = if v == ProverVariant::FULL { 0 } else { 10 };
            assert_eq!(r.successes, expected, "{}", v.name());
            assert!(r.witnesses_verified && r.prefixes_unique);
        }
        let r = reset_attack(p, ProverVariant::NO_PRF, 3, 2).unwrap();
        assert_eq!(r.by_avenue, [0, 3]);
    }

    #[test]
    fn guessed_sub_proofs_rarely_pass() {
        let r = challenge_replay(Params::tiny(), ProverVariant::FULL, 200, 3).unwrap();
        assert!(r.accepted <= 5, "{}", r.accepted);
        assert!(r.prefixes_unique);
    }
}
