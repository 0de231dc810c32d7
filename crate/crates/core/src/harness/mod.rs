//! Scheduler, snapshots and the adversarial experiments.
//!
//! A [`World`] holds one verifier key pair, one prover tape and any number
//! of sessions. Sessions advance one message per `deliver`; `snap` and
//! `reset` save and restore a whole session (both parties and the message
//! in flight) through its JSON serialization.

pub mod attacks;
pub mod reductions;
pub mod rzk;

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bpk::{
    keygen_with_rng, Action, BpkError, Common, Direction, KeyPair, Msg, Params, Prover, ProverTape, ProverVariant,
    PublicFile, PvWitness, Strategy, SubPath, SubVerifierMode, Verifier,
};
use crate::codec::{Encode, VIEW_DIGEST_THRESHOLD};
use crate::primitives::{GroupElement, PrfKey};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("schedule error: {0}")]
    Schedule(String),
    #[error("snapshot error: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Bpk(#[from] BpkError),
    #[error(transparent)]
    Rszk(#[from] crate::rszk::RszkError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Accept,
    Reject(String),
    /// The prover stopped; the verifier never got `z`.
    Halt(String),
}

impl Verdict {
    pub fn accepted(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Session {
    pub prover: Prover,
    pub verifier: Verifier,
    pub pending: Option<Msg>,
    pub verdict: Option<Verdict>,
}

/// Messages a session needs delivered from start to verdict.
pub fn deliveries(path: SubPath) -> usize {
    match path {
        SubPath::A => 8,
        SubPath::B => 12,
    }
}

pub fn payload_text(bytes: &[u8]) -> String {
    if bytes.len() > VIEW_DIGEST_THRESHOLD {
        format!("sha256:{}", hex::encode(crate::bpk::digest(bytes)))
    } else {
        hex::encode(bytes)
    }
}

pub struct World {
    pub params: Params,
    pub file: PublicFile,
    pub keys: KeyPair,
    pub pv_witness: PvWitness,
    pub variant: ProverVariant,
    vkey: PrfKey,
    tape: ProverTape,
    pool: Vec<(GroupElement, u64)>,
    sessions: Vec<Session>,
    snapshots: BTreeMap<String, (usize, String)>,
    pub log: Vec<String>,
    /// Prover input prefix (digest) → digests of what it answered.
    pub prefix_log: BTreeMap<[u8; 32], BTreeSet<[u8; 32]>>,
    /// `(session, c_e, a)` → every `e` the prover answered with `z`.
    pub release_log: BTreeMap<(usize, Vec<u8>), BTreeSet<u64>>,
    pub resets: usize,
}

pub const POOL_SIZE: usize = 16;

impl World {
    /// Registration stage: one verifier key, a statement pool with
    /// witnesses, and the prover's tape, all from `seed`.
    pub fn new(params: Params, seed: u64) -> Result<Self, HarnessError> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let keys = keygen_with_rng(params.group, &mut rng);
        Self::with_keys(params, keys, PvWitness::Single(keys.sk), &mut rng)
    }

    pub fn with_keys<R: Rng + ?Sized>(params: Params, keys: KeyPair, pv_witness: PvWitness, rng: &mut R) -> Result<Self, HarnessError> {
        params.check()?;
        let mut file = PublicFile::new();
        file.register(keys.pk)?;
        let pool = (0..POOL_SIZE)
            .map(|_| {
                let w = params.group.random_scalar(rng);
                (params.group.exp(w), w)
            })
            .collect();
        Ok(World {
            params,
            file,
            keys,
            pv_witness,
            variant: ProverVariant::FULL,
            vkey: PrfKey::random(128, rng),
            tape: ProverTape::random(rng),
            pool,
            sessions: Vec::new(),
            snapshots: BTreeMap::new(),
            log: Vec::new(),
            prefix_log: BTreeMap::new(),
            release_log: BTreeMap::new(),
            resets: 0,
        })
    }

    pub fn statement(&self, i: usize) -> (GroupElement, u64) {
        self.pool[i % self.pool.len()]
    }

    pub fn tape(&self) -> &ProverTape {
        &self.tape
    }

    pub fn session(&self, sid: usize) -> &Session {
        &self.sessions[sid]
    }

    pub fn session_mut(&mut self, sid: usize) -> &mut Session {
        &mut self.sessions[sid]
    }

    pub fn num_sessions(&self) -> usize {
        self.sessions.len()
    }

    pub fn verdicts(&self) -> Vec<Option<Verdict>> {
        self.sessions.iter().map(|s| s.verdict.clone()).collect()
    }

    /// Honest session on statement `x` from the pool.
    pub fn start(&mut self, x: GroupElement) -> Result<usize, HarnessError> {
        let w = self
            .pool
            .iter()
            .find(|(px, _)| *px == x)
            .map(|&(_, w)| w)
            .ok_or_else(|| HarnessError::Schedule(format!("no witness for statement {:x}", x.value())))?;
        self.start_with(x, Strategy::Honest { w }, SubVerifierMode::Prf)
    }

    pub fn start_with(&mut self, x: GroupElement, strategy: Strategy, sub_mode: SubVerifierMode) -> Result<usize, HarnessError> {
        self.file.close();
        let sid = self.sessions.len();
        let common = Common { params: self.params, pk: self.keys.pk, x, session: sid as u64 };
        let prover = Prover::new(common.clone(), self.tape.clone(), strategy).with_variant(self.variant).with_sub_mode(sub_mode);
        let mut verifier = Verifier::new(common, self.vkey.clone(), self.pv_witness);
        let first = verifier.start()?;
        self.log_msg(sid, &first);
        self.sessions.push(Session { prover, verifier, pending: Some(first), verdict: None });
        Ok(sid)
    }

    /// A fresh copy of the verifier that session `sid` on `x` would run.
    /// Simulators use it to rewind the verifier's Π_v.
    pub fn probe_verifier(&self, x: GroupElement, sid: usize) -> Verifier {
        let common = Common { params: self.params, pk: self.keys.pk, x, session: sid as u64 };
        Verifier::new(common, self.vkey.clone(), self.pv_witness)
    }

    fn log_msg(&mut self, sid: usize, m: &Msg) {
        let line = format!("msg {sid} {} {} {}", m.direction().tag(), m.round(), payload_text(&m.to_bytes()));
        self.log.push(line);
    }

    /// Delivers the message in flight. Returns the verdict once there is one.
    pub fn deliver(&mut self, sid: usize) -> Result<Option<Verdict>, HarnessError> {
        let s = self
            .sessions
            .get_mut(sid)
            .ok_or_else(|| HarnessError::Schedule(format!("unknown session {sid}")))?;
        let m = s
            .pending
            .take()
            .ok_or_else(|| HarnessError::Schedule(format!("session {sid} has nothing in flight")))?;
        let action = match m.direction() {
            Direction::VerifierToProver => {
                let mut prefix = s.prover.view().as_bytes().to_vec();
                prefix.extend(m.to_bytes());
                let action = s.prover.receive(&m)?;
                if let Action::Send(out) = &action {
                    let key = crate::bpk::digest(&prefix);
                    self.prefix_log.entry(key).or_default().insert(crate::bpk::digest(&out.to_bytes()));
                    if let Msg::PpResponse { .. } = out {
                        let (c, a) = s.prover.first_message().expect("phase 2 ran");
                        let ce = s.prover.ce().expect("phase 1 ran");
                        let mut id = [ce.u.value(), ce.v.value(), c.c.value()].map(u64::to_be_bytes).concat();
                        id.extend(a.to_bytes());
                        let e = s.prover.challenge();
                        self.release_log.entry((sid, id)).or_default().insert(e);
                    }
                }
                action
            }
            Direction::ProverToVerifier => s.verifier.receive(&m)?,
        };
        let s = &mut self.sessions[sid];
        let verdict = match action {
            Action::Send(n) => {
                s.pending = Some(n.clone());
                self.log_msg(sid, &n);
                return Ok(None);
            }
            Action::Accept => Verdict::Accept,
            Action::Reject(r) => Verdict::Reject(r),
            Action::Halt(r) => Verdict::Halt(r),
        };
        s.verdict = Some(verdict.clone());
        let word = if verdict.accepted() { "accept" } else { "reject" };
        self.log.push(format!("verdict {sid} {word}"));
        Ok(Some(verdict))
    }

    /// Delivers until the session has a verdict.
    pub fn run_to_end(&mut self, sid: usize) -> Result<Verdict, HarnessError> {
        loop {
            if let Some(v) = &self.sessions[sid].verdict {
                return Ok(v.clone());
            }
            if let Some(v) = self.deliver(sid)? {
                return Ok(v);
            }
        }
    }

    /// Delivers until the in-flight message satisfies `stop`.
    pub fn run_until(&mut self, sid: usize, stop: impl Fn(&Msg) -> bool) -> Result<(), HarnessError> {
        loop {
            match &self.sessions[sid].pending {
                Some(m) if stop(m) => return Ok(()),
                Some(_) => {
                    self.deliver(sid)?;
                }
                None => return Err(HarnessError::Schedule(format!("session {sid} ended before the stop point"))),
            }
        }
    }

    pub fn snap(&mut self, sid: usize, id: &str) -> Result<(), HarnessError> {
        let s = self.sessions.get(sid).ok_or_else(|| HarnessError::Snapshot(format!("unknown session {sid}")))?;
        let json = serde_json::to_string(s).map_err(|e| HarnessError::Snapshot(e.to_string()))?;
        self.snapshots.insert(id.to_string(), (sid, json));
        self.log.push(format!("snap {sid} {id}"));
        Ok(())
    }

    pub fn reset(&mut self, sid: usize, id: &str) -> Result<(), HarnessError> {
        let (owner, json) = self.snapshots.get(id).ok_or_else(|| HarnessError::Snapshot(format!("no snapshot {id}")))?;
        if *owner != sid {
            return Err(HarnessError::Snapshot(format!("snapshot {id} belongs to session {owner}")));
        }
        self.sessions[sid] = serde_json::from_str(json).map_err(|e| HarnessError::Snapshot(e.to_string()))?;
        self.resets += 1;
        self.log.push(format!("reset {sid} {id}"));
        Ok(())
    }

    /// Every prover input prefix was answered in exactly one way.
    pub fn prefixes_unique(&self) -> bool {
        self.prefix_log.values().all(|s| s.len() == 1)
    }

    /// No `(session, c_e, a)` got `z` for two different `e`.
    pub fn releases_unique(&self) -> bool {
        self.release_log.values().all(|s| s.len() <= 1)
    }

    pub fn log_text(&self) -> String {
        let mut s = self.log.join("\n");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    Start(GroupElement),
    Deliver(usize),
    Snap(usize, String),
    Reset(usize, String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schedule {
    pub events: Vec<Event>,
}

impl Schedule {
    /// Starts every statement, then delivers one message per session in turn.
    pub fn round_robin(xs: &[GroupElement], path: SubPath) -> Self {
        let mut events: Vec<Event> = xs.iter().map(|&x| Event::Start(x)).collect();
        for _ in 0..deliveries(path) {
            events.extend((0..xs.len()).map(Event::Deliver));
        }
        Schedule { events }
    }

    /// Random interleaving with snapshots and at least `resets` resets.
    pub fn with_resets(xs: &[GroupElement], path: SubPath, resets: usize, seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let total = deliveries(path);
        let mut events: Vec<Event> = xs.iter().map(|&x| Event::Start(x)).collect();
        let mut pos = vec![0usize; xs.len()];
        let mut snaps: Vec<Vec<(String, usize)>> = vec![Vec::new(); xs.len()];
        let mut done_resets = 0;
        let mut next_id = 0;
        loop {
            let live: Vec<usize> = (0..xs.len()).filter(|&i| pos[i] < total).collect();
            if live.is_empty() {
                break;
            }
            let sid = live[rng.gen_range(0..live.len())];
            match rng.gen_range(0..10) {
                0 | 1 => {
                    let id = format!("s{next_id}");
                    next_id += 1;
                    snaps[sid].push((id.clone(), pos[sid]));
                    events.push(Event::Snap(sid, id));
                }
                2..=4 if done_resets < resets && !snaps[sid].is_empty() => {
                    let (id, p) = snaps[sid][rng.gen_range(0..snaps[sid].len())].clone();
                    pos[sid] = p;
                    done_resets += 1;
                    events.push(Event::Reset(sid, id));
                }
                _ => {
                    // hold the last message back until the reset budget is spent
                    if pos[sid] + 1 == total && done_resets < resets {
                        continue;
                    }
                    pos[sid] += 1;
                    events.push(Event::Deliver(sid));
                }
            }
        }
        Schedule { events }
    }

    pub fn resets(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, Event::Reset(..))).count()
    }

    pub fn to_text(&self) -> String {
        self.events
            .iter()
            .map(|e| match e {
                Event::Start(x) => format!("start {:x}\n", x.value()),
                Event::Deliver(s) => format!("deliver {s}\n"),
                Event::Snap(s, id) => format!("snap {s} {id}\n"),
                Event::Reset(s, id) => format!("reset {s} {id}\n"),
            })
            .collect()
    }

    pub fn parse(text: &str, params: &Params) -> Result<Self, HarnessError> {
        let mut events = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || HarnessError::Schedule(format!("line {}: `{line}`", n + 1));
            let parts: Vec<&str> = line.split_whitespace().collect();
            let sid = |i: usize| parts.get(i).and_then(|s| s.parse::<usize>().ok()).ok_or_else(bad);
            let ev = match (parts[0], parts.len()) {
                ("start", 2) => {
                    let v = u64::from_str_radix(parts[1], 16).map_err(|_| bad())?;
                    Event::Start(params.group.element(v).map_err(|_| bad())?)
                }
                ("deliver", 2) => Event::Deliver(sid(1)?),
                ("snap", 3) => Event::Snap(sid(1)?, parts[2].to_string()),
                ("reset", 3) => Event::Reset(sid(1)?, parts[2].to_string()),
                _ => return Err(bad()),
            };
            events.push(ev);
        }
        Ok(Schedule { events })
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub verdicts: Vec<Option<Verdict>>,
    pub log: String,
    pub resets: usize,
    pub prefixes_unique: bool,
    pub releases_unique: bool,
}

pub fn run_schedule(world: &mut World, schedule: &Schedule) -> Result<RunReport, HarnessError> {
    run_events(world, schedule, &mut |w, x| w.start(x))?;
    Ok(RunReport {
        verdicts: world.verdicts(),
        log: world.log_text(),
        resets: world.resets,
        prefixes_unique: world.prefixes_unique(),
        releases_unique: world.releases_unique(),
    })
}

/// Plays `schedule`, opening sessions through `start`.
pub fn run_events(
    world: &mut World,
    schedule: &Schedule,
    start: &mut dyn FnMut(&mut World, GroupElement) -> Result<usize, HarnessError>,
) -> Result<(), HarnessError> {
    for ev in &schedule.events {
        match ev {
            Event::Start(x) => {
                start(world, *x)?;
            }
            Event::Deliver(s) => {
                world.deliver(*s)?;
            }
            Event::Snap(s, id) => world.snap(*s, id)?,
            Event::Reset(s, id) => world.reset(*s, id)?,
        }
    }
    Ok(())
}
