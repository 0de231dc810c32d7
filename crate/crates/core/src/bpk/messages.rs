use serde::{Deserialize, Serialize};

use crate::codec::{Encode, Encoder};
use crate::commitments::{ElGamalCommitment, NaorCommitment, PedersenCommitment};
use crate::primitives::Bits;
use crate::rszk::BarakSetup;
use crate::sigma::{FirstMessage, OrFirst, OrResponse, Response};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    VerifierToProver,
    ProverToVerifier,
}

impl Direction {
    pub fn tag(self) -> &'static str {
        match self {
            Direction::VerifierToProver => "v->p",
            Direction::ProverToVerifier => "p->v",
        }
    }
}

/// Every message of one session, in protocol order. Rounds 0..=3 are
/// shared; the opening sub-proof then follows path A or path B, and
/// `PpResponse` closes the session.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Msg {
    PvCommit { a: OrFirst },
    PvChallenge { e: u64 },
    PvResponse { z: OrResponse, ce: ElGamalCommitment },
    PpCommit { c: PedersenCommitment, a: OrFirst },
    RevealA { e: u64, a: FirstMessage },
    SubChallenge { eps: u64 },
    SubResponse { z: Response },
    RevealB { e: u64 },
    BarakSetup { setup: BarakSetup },
    BarakCommit { c: NaorCommitment },
    BarakR { r: Bits },
    WiCommit { a: OrFirst },
    WiChallenge { eps: u64 },
    WiResponse { z: OrResponse },
    PpResponse { z: OrResponse },
}

impl Msg {
    pub fn name(&self) -> &'static str {
        match self {
            Msg::PvCommit { .. } => "pv-commit",
            Msg::PvChallenge { .. } => "pv-challenge",
            Msg::PvResponse { .. } => "pv-response",
            Msg::PpCommit { .. } => "pp-commit",
            Msg::RevealA { .. } => "reveal-a",
            Msg::SubChallenge { .. } => "sub-challenge",
            Msg::SubResponse { .. } => "sub-response",
            Msg::RevealB { .. } => "reveal-b",
            Msg::BarakSetup { .. } => "barak-setup",
            Msg::BarakCommit { .. } => "barak-commit",
            Msg::BarakR { .. } => "barak-r",
            Msg::WiCommit { .. } => "wi-commit",
            Msg::WiChallenge { .. } => "wi-challenge",
            Msg::WiResponse { .. } => "wi-response",
            Msg::PpResponse { .. } => "pp-response",
        }
    }

    pub fn direction(&self) -> Direction {
        match self {
            Msg::PvCommit { .. }
            | Msg::PvResponse { .. }
            | Msg::RevealA { .. }
            | Msg::SubResponse { .. }
            | Msg::RevealB { .. }
            | Msg::BarakCommit { .. }
            | Msg::WiCommit { .. }
            | Msg::WiResponse { .. } => Direction::VerifierToProver,
            _ => Direction::ProverToVerifier,
        }
    }

    /// Position in the session.
    pub fn round(&self) -> usize {
        match self {
            Msg::PvCommit { .. } => 0,
            Msg::PvChallenge { .. } => 1,
            Msg::PvResponse { .. } => 2,
            Msg::PpCommit { .. } => 3,
            Msg::RevealA { .. } | Msg::RevealB { .. } => 4,
            Msg::SubChallenge { .. } | Msg::BarakSetup { .. } => 5,
            Msg::SubResponse { .. } | Msg::BarakCommit { .. } => 6,
            Msg::BarakR { .. } => 7,
            Msg::WiCommit { .. } => 8,
            Msg::WiChallenge { .. } => 9,
            Msg::WiResponse { .. } => 10,
            Msg::PpResponse { .. } => 11,
        }
    }

    fn tag(&self) -> u8 {
        0x60 + self.round() as u8 + if matches!(self, Msg::RevealB { .. } | Msg::BarakSetup { .. } | Msg::BarakCommit { .. }) { 0x10 } else { 0 }
    }
}

impl Encode for Msg {
    fn encode(&self, enc: &mut Encoder) {
        let mut b = Encoder::new();
        match self {
            Msg::PvCommit { a } | Msg::WiCommit { a } => a.encode(&mut b),
            Msg::PvChallenge { e } | Msg::RevealB { e } => {
                b.u64(0x70, *e);
            }
            Msg::SubChallenge { eps } | Msg::WiChallenge { eps } => {
                b.u64(0x71, *eps);
            }
            Msg::PvResponse { z, ce } => {
                z.encode(&mut b);
                b.u64(0x72, ce.u.value()).u64(0x73, ce.v.value());
            }
            Msg::PpCommit { c, a } => {
                b.u64(0x74, c.c.value());
                a.encode(&mut b);
            }
            Msg::RevealA { e, a } => {
                b.u64(0x70, *e);
                a.encode(&mut b);
            }
            Msg::SubResponse { z } => z.encode(&mut b),
            Msg::BarakSetup { setup } => {
                b.bytes(0x75, &setup.to_bytes());
            }
            Msg::BarakCommit { c } => {
                b.bytes(0x76, &c.to_bytes());
            }
            Msg::BarakR { r } => {
                b.bytes(0x77, r.as_bytes());
            }
            Msg::WiResponse { z } | Msg::PpResponse { z } => z.encode(&mut b),
        }
        enc.nested(self.tag(), &b);
    }
}
