//! Masked truth tables: a public-coin Σ-protocol for circuit
//! satisfiability with one challenge bit per repetition.
//!
//! Per repetition the prover picks a mask `m_w` per wire and commits (Naor,
//! one receiver string `rc` for the whole session) to
//!
//! * every mask, one commitment per wire, then
//! * per gate the rows `(α, β, G(α⊕m_a, β⊕m_b)⊕m_c)` for `(α, β)` in
//!   lexicographic order, one commitment per row component (NOT gates
//!   have two rows `(α, ¬(α⊕m_a)⊕m_c)`).
//!
//! Challenge 0 opens everything. Challenge 1 reveals the masked values
//! `v = w ⊕ m` of all wires and opens one row per gate, at position
//! `(v_a, v_b)`, plus the masks of the public wires and of the output.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::{Arc, OnceLock};

use super::{Circuit, CircuitError, GateKind};
use crate::primitives::{prg_expand, Bits};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsatStatement {
    pub circuit: Arc<Circuit>,
    pub public: Vec<bool>,
    /// Receiver string for the Naor commitments, `3n` bits.
    pub rc: Bits,
}

/// `prg_expand(seed, 24)` for every one-byte seed; at `n = 8` each
/// commitment becomes a table lookup.
fn prg_table_n8() -> &'static [[u8; 3]; 256] {
    static TABLE: OnceLock<[[u8; 3]; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        std::array::from_fn(|s| {
            let b = prg_expand(&[s as u8], 24);
            [b.as_bytes()[0], b.as_bytes()[1], b.as_bytes()[2]]
        })
    })
}

/// The rows of one gate's masked table in canonical order.
pub fn masked_table(kind: GateKind, ma: bool, mb: bool, mc: bool) -> Vec<Vec<bool>> {
    match kind {
        GateKind::Not => (0..2)
            .map(|a| {
                let a = a == 1;
                vec![a, !(a ^ ma) ^ mc]
            })
            .collect(),
        k => (0..4)
            .map(|p| {
                let (a, b) = (p >> 1 == 1, p & 1 == 1);
                vec![a, b, k.apply(a ^ ma, b ^ mb) ^ mc]
            })
            .collect(),
    }
}

fn row_width(kind: GateKind) -> usize {
    if kind == GateKind::Not {
        2
    } else {
        3
    }
}

fn table_slots(kind: GateKind) -> usize {
    if kind == GateKind::Not {
        4
    } else {
        12
    }
}

impl CsatStatement {
    pub fn new(circuit: Arc<Circuit>, public: Vec<bool>, rc: Bits) -> Result<Self, CircuitError> {
        circuit.validate()?;
        if public.len() != circuit.num_public {
            return Err(CircuitError::Malformed("public input length".into()));
        }
        let n = rc.len() / 3;
        if n == 0 || !n.is_multiple_of(8) || rc.len() != 3 * n {
            return Err(CircuitError::Malformed(format!("rc of {} bits", rc.len())));
        }
        Ok(CsatStatement { circuit, public, rc })
    }

    fn n(&self) -> usize {
        self.rc.len() / 3
    }

    fn seed_bytes(&self) -> usize {
        self.n() / 8
    }

    fn com_bytes(&self) -> usize {
        3 * self.n() / 8
    }

    /// Commitments per repetition.
    pub fn slots(&self) -> usize {
        self.circuit.num_wires() + self.circuit.gates.iter().map(|g| table_slots(g.kind)).sum::<usize>()
    }

    fn gate_offsets(&self) -> Vec<usize> {
        let mut off = self.circuit.num_wires();
        self.circuit
            .gates
            .iter()
            .map(|g| {
                let o = off;
                off += table_slots(g.kind);
                o
            })
            .collect()
    }

    fn commit_slot(&self, bit: bool, seed: &[u8], out: &mut [u8]) {
        let owned;
        let stream: &[u8] = if seed.len() == 1 {
            &prg_table_n8()[seed[0] as usize]
        } else {
            owned = prg_expand(seed, self.rc.len());
            owned.as_bytes()
        };
        for ((o, s), r) in out.iter_mut().zip(stream).zip(self.rc.as_bytes()) {
            *o = if bit { s ^ r } else { *s };
        }
    }

    fn check_slot(&self, commit: &RepCommit, slot: usize, bit: bool, seed: &[u8]) -> bool {
        let cb = self.com_bytes();
        let mut buf = vec![0u8; cb];
        self.commit_slot(bit, seed, &mut buf);
        commit.data.get(slot * cb..(slot + 1) * cb) == Some(&buf[..])
    }

    /// Plaintext of every slot for the given masks.
    fn plaintexts(&self, masks: &[bool]) -> Vec<bool> {
        let mut v = masks.to_vec();
        for g in &self.circuit.gates {
            let (a, b, c) = (masks[g.a as usize], masks[g.b as usize], masks[g.out as usize]);
            v.extend(masked_table(g.kind, a, b, c).into_iter().flatten());
        }
        v
    }

    fn commit_all<R: Rng + ?Sized>(&self, plain: &[bool], rng: &mut R) -> (RepCommit, Vec<u8>) {
        let (cb, sb) = (self.com_bytes(), self.seed_bytes());
        let mut seeds = vec![0u8; plain.len() * sb];
        rng.fill(&mut seeds[..]);
        let mut data = vec![0u8; plain.len() * cb];
        for (i, &bit) in plain.iter().enumerate() {
            self.commit_slot(bit, &seeds[i * sb..(i + 1) * sb], &mut data[i * cb..(i + 1) * cb]);
        }
        (RepCommit { data }, seeds)
    }

    /// Slots opened under challenge 1 with their claimed plaintexts.
    fn path_openings(&self, masked: &[bool]) -> Vec<(usize, bool)> {
        let c = &self.circuit;
        let mut v = Vec::with_capacity(c.num_public + 1 + 3 * c.gates.len());
        for (i, &x) in self.public.iter().enumerate() {
            v.push((i, masked[i] ^ x));
        }
        v.push((c.output as usize, masked[c.output as usize] ^ true));
        for (g, off) in c.gates.iter().zip(self.gate_offsets()) {
            let (a, b, o) = (masked[g.a as usize], masked[g.b as usize], masked[g.out as usize]);
            let w = row_width(g.kind);
            if g.kind == GateKind::Not {
                let base = off + w * a as usize;
                v.push((base, a));
                v.push((base + 1, o));
            } else {
                let base = off + w * (2 * a as usize + b as usize);
                v.push((base, a));
                v.push((base + 1, b));
                v.push((base + 2, o));
            }
        }
        v
    }
}

/// First message of one repetition: `slots * 3n/8` bytes of commitments.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RepCommit {
    #[serde(with = "hex_bytes")]
    pub data: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepSecret {
    masks: Vec<bool>,
    masked: Vec<bool>,
    seeds: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RepResponse {
    /// Challenge 0: every mask, every seed.
    Tables { masks: Vec<bool>, #[serde(with = "hex_bytes")] seeds: Vec<u8> },
    /// Challenge 1: masked wire values and the seeds of the opened slots.
    Path { masked: Vec<bool>, #[serde(with = "hex_bytes")] seeds: Vec<u8> },
}

impl RepResponse {
    pub fn to_bytes(&self) -> Vec<u8> {
        let (tag, bits, seeds) = match self {
            RepResponse::Tables { masks, seeds } => (0u8, masks, seeds),
            RepResponse::Path { masked, seeds } => (1u8, masked, seeds),
        };
        let mut v = vec![tag];
        v.extend(Bits::from_bools(bits).as_bytes());
        v.extend(seeds);
        v
    }
}

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        hex::decode(s).map_err(serde::de::Error::custom)
    }
}

/// Commits one repetition for a full wire assignment `wires`.
pub fn rep_commit<R: Rng + ?Sized>(stmt: &CsatStatement, wires: &[bool], rng: &mut R) -> (RepCommit, RepSecret) {
    let masks: Vec<bool> = (0..wires.len()).map(|_| rng.gen()).collect();
    let masked = wires.iter().zip(&masks).map(|(w, m)| w ^ m).collect();
    let (commit, seeds) = stmt.commit_all(&stmt.plaintexts(&masks), rng);
    (commit, RepSecret { masks, masked, seeds })
}

pub fn rep_respond(stmt: &CsatStatement, secret: &RepSecret, bit: bool) -> RepResponse {
    let sb = stmt.seed_bytes();
    if !bit {
        return RepResponse::Tables { masks: secret.masks.clone(), seeds: secret.seeds.clone() };
    }
    let seeds = stmt
        .path_openings(&secret.masked)
        .into_iter()
        .flat_map(|(slot, _)| secret.seeds[slot * sb..(slot + 1) * sb].iter().copied())
        .collect();
    RepResponse::Path { masked: secret.masked.clone(), seeds }
}

pub fn rep_verify(stmt: &CsatStatement, commit: &RepCommit, bit: bool, resp: &RepResponse) -> bool {
    let slots = stmt.slots();
    let (cb, sb) = (stmt.com_bytes(), stmt.seed_bytes());
    if commit.data.len() != slots * cb {
        return false;
    }
    let wires = stmt.circuit.num_wires();
    match (bit, resp) {
        (false, RepResponse::Tables { masks, seeds }) => {
            if masks.len() != wires || seeds.len() != slots * sb {
                return false;
            }
            stmt.plaintexts(masks)
                .iter()
                .enumerate()
                .all(|(i, &p)| stmt.check_slot(commit, i, p, &seeds[i * sb..(i + 1) * sb]))
        }
        (true, RepResponse::Path { masked, seeds }) => {
            if masked.len() != wires {
                return false;
            }
            let open = stmt.path_openings(masked);
            if seeds.len() != open.len() * sb {
                return false;
            }
            open.iter()
                .enumerate()
                .all(|(k, &(slot, p))| stmt.check_slot(commit, slot, p, &seeds[k * sb..(k + 1) * sb]))
        }
        _ => false,
    }
}

/// Transcript for a known challenge bit, without a witness.
pub fn rep_simulate<R: Rng + ?Sized>(stmt: &CsatStatement, bit: bool, rng: &mut R) -> (RepCommit, RepResponse) {
    let wires = stmt.circuit.num_wires();
    if !bit {
        // tables never depend on the witness
        let (c, s) = rep_commit(stmt, &vec![false; wires], rng);
        return (c, rep_respond(stmt, &s, false));
    }
    let masked: Vec<bool> = (0..wires).map(|_| rng.gen()).collect();
    let mut plain: Vec<bool> = (0..stmt.slots()).map(|_| rng.gen()).collect();
    let open = stmt.path_openings(&masked);
    for &(slot, p) in &open {
        plain[slot] = p;
    }
    let (commit, seeds) = stmt.commit_all(&plain, rng);
    let sb = stmt.seed_bytes();
    let seeds = open
        .iter()
        .flat_map(|&(slot, _)| seeds[slot * sb..(slot + 1) * sb].iter().copied())
        .collect();
    (commit, RepResponse::Path { masked, seeds })
}

/// Witness bits from a table opening and a path opening of one commit.
pub fn rep_extract(stmt: &CsatStatement, tables: &RepResponse, path: &RepResponse) -> Option<Vec<bool>> {
    let (RepResponse::Tables { masks, .. }, RepResponse::Path { masked, .. }) = (tables, path) else {
        return None;
    };
    let c = &stmt.circuit;
    let w: Vec<bool> = c.witness_wires().map(|i| masks[i] ^ masked[i]).collect();
    c.is_satisfied(&stmt.public, &w).then_some(w)
}

/// `t` parallel repetitions; bit `i` of a challenge goes to repetition `i`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CsatProver {
    secrets: Vec<RepSecret>,
}

pub fn csat_prove<R: Rng + ?Sized>(
    stmt: &CsatStatement,
    witness: &[bool],
    t: usize,
    rng: &mut R,
) -> Result<(Vec<RepCommit>, CsatProver), CircuitError> {
    if witness.len() != stmt.circuit.num_witness {
        return Err(CircuitError::Malformed("witness length".into()));
    }
    let wires = stmt.circuit.eval(&stmt.public, witness);
    if !wires[stmt.circuit.output as usize] {
        return Err(CircuitError::Unsatisfied);
    }
    let (commits, secrets) = (0..t).map(|_| rep_commit(stmt, &wires, rng)).unzip();
    Ok((commits, CsatProver { secrets }))
}

impl CsatProver {
    pub fn respond(&self, stmt: &CsatStatement, challenge: u64) -> Vec<RepResponse> {
        self.secrets
            .iter()
            .enumerate()
            .map(|(i, s)| rep_respond(stmt, s, (challenge >> i) & 1 == 1))
            .collect()
    }
}

pub fn csat_verify(stmt: &CsatStatement, commits: &[RepCommit], challenge: u64, responses: &[RepResponse]) -> bool {
    commits.len() == responses.len()
        && commits.len() <= 64
        && (commits.len() == 64 || challenge >> commits.len() == 0)
        && commits
            .iter()
            .zip(responses)
            .enumerate()
            .all(|(i, (c, z))| rep_verify(stmt, c, (challenge >> i) & 1 == 1, z))
}
