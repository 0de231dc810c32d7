//! k-way OR composition. All branches share one bit-string challenge
//! space; the branch challenges must XOR to the verifier's challenge.
//!
//! Every branch challenge except the free one is fixed at commit time, so
//! a prover holding several witnesses can still choose which one to use
//! when the challenge arrives.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{FirstMessage, Instance, ProverState, Response, SigmaError, SigmaTranscript, Witness};
use crate::codec::{Encode, Encoder};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrInstance {
    pub branches: Vec<Instance>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrFirst {
    pub a: Vec<FirstMessage>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrResponse {
    pub e: Vec<u64>,
    pub z: Vec<Response>,
}

impl Encode for OrFirst {
    fn encode(&self, e: &mut Encoder) {
        let mut inner = Encoder::new();
        for a in &self.a {
            a.encode(&mut inner);
        }
        e.nested(0x30, &inner);
    }
}

impl Encode for OrResponse {
    fn encode(&self, e: &mut Encoder) {
        let mut inner = Encoder::new();
        for (c, z) in self.e.iter().zip(&self.z) {
            inner.u64(0x32, *c);
            z.encode(&mut inner);
        }
        e.nested(0x31, &inner);
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
enum Branch {
    Witnessed { state: ProverState, e: u64 },
    Simulated { e: u64, z: Response },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrProver {
    branches: Vec<Branch>,
}

/// Explicit coins for one algebraic branch: nonces when witnessed,
/// otherwise the simulated challenge `e` and responses `z`. A witnessed
/// branch also uses `e` if it ends up not being free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchCoins {
    pub nonces: Vec<u64>,
    pub e: u64,
    pub z: Vec<u64>,
}

impl OrProver {
    pub fn witnessed(&self) -> Vec<usize> {
        self.branches
            .iter()
            .enumerate()
            .filter(|(_, b)| matches!(b, Branch::Witnessed { .. }))
            .map(|(i, _)| i)
            .collect()
    }
}

impl OrInstance {
    pub fn new(branches: Vec<Instance>) -> Result<Self, SigmaError> {
        if branches.len() < 2 {
            return Err(SigmaError::Malformed("an OR needs at least two branches".into()));
        }
        let bits = branches[0].challenge_bits();
        for b in &branches {
            b.check()?;
            if b.challenge_bits().is_none() || b.challenge_bits() != bits {
                return Err(SigmaError::Malformed("branches must share a bit-string challenge space".into()));
            }
        }
        Ok(OrInstance { branches })
    }

    pub fn challenge_bits(&self) -> u32 {
        self.branches[0].challenge_bits().expect("checked in new")
    }

    pub fn challenge_ok(&self, e: u64) -> bool {
        self.branches[0].challenge_ok(e)
    }

    fn check_witnesses(&self, witnesses: &[Option<Witness>]) -> Result<(), SigmaError> {
        if witnesses.len() != self.branches.len() {
            return Err(SigmaError::Malformed(format!("{} witness slots", witnesses.len())));
        }
        if witnesses.iter().all(Option::is_none) {
            return Err(SigmaError::InvalidWitness);
        }
        Ok(())
    }

    pub fn commit<R: Rng + ?Sized>(
        &self,
        witnesses: &[Option<Witness>],
        rng: &mut R,
    ) -> Result<(OrFirst, OrProver), SigmaError> {
        self.check_witnesses(witnesses)?;
        let mut a = Vec::new();
        let mut branches = Vec::new();
        for (inst, w) in self.branches.iter().zip(witnesses) {
            let e = inst.random_challenge(rng);
            match w {
                Some(w) => {
                    let (ai, state) = inst.commit(w, rng)?;
                    a.push(ai);
                    branches.push(Branch::Witnessed { state, e });
                }
                None => {
                    let (ai, z) = inst.simulate(e, rng)?;
                    a.push(ai);
                    branches.push(Branch::Simulated { e, z });
                }
            }
        }
        Ok((OrFirst { a }, OrProver { branches }))
    }

    /// Deterministic commit for algebraic branches.
    pub fn commit_with_coins(
        &self,
        witnesses: &[Option<Witness>],
        coins: &[BranchCoins],
    ) -> Result<(OrFirst, OrProver), SigmaError> {
        self.check_witnesses(witnesses)?;
        let mut a = Vec::new();
        let mut branches = Vec::new();
        for ((inst, w), c) in self.branches.iter().zip(witnesses).zip(coins) {
            if !inst.challenge_ok(c.e) {
                return Err(SigmaError::Challenge(c.e));
            }
            match w {
                Some(w) => {
                    let (ai, state) = inst.commit_with_nonces(w, &c.nonces)?;
                    a.push(ai);
                    branches.push(Branch::Witnessed { state, e: c.e });
                }
                None => {
                    a.push(inst.simulate_with(c.e, &c.z)?);
                    branches.push(Branch::Simulated { e: c.e, z: Response::Scalars(c.z.clone()) });
                }
            }
        }
        Ok((OrFirst { a }, OrProver { branches }))
    }

    /// Answers `e` with branch `free` absorbing the challenge.
    pub fn respond(&self, prover: &OrProver, e: u64, free: usize) -> Result<OrResponse, SigmaError> {
        if !self.challenge_ok(e) {
            return Err(SigmaError::Challenge(e));
        }
        if !matches!(prover.branches.get(free), Some(Branch::Witnessed { .. })) {
            return Err(SigmaError::InvalidWitness);
        }
        let others = prover
            .branches
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != free)
            .fold(0u64, |acc, (_, b)| match b {
                Branch::Witnessed { e, .. } | Branch::Simulated { e, .. } => acc ^ e,
            });
        let mut es = Vec::new();
        let mut zs = Vec::new();
        for (i, (inst, b)) in self.branches.iter().zip(&prover.branches).enumerate() {
            let (ei, zi) = match b {
                Branch::Witnessed { state, e: pre } => {
                    let ei = if i == free { e ^ others } else { *pre };
                    (ei, inst.respond(state, ei)?)
                }
                Branch::Simulated { e, z } => (*e, z.clone()),
            };
            es.push(ei);
            zs.push(zi);
        }
        Ok(OrResponse { e: es, z: zs })
    }

    pub fn verify(&self, a: &OrFirst, e: u64, z: &OrResponse) -> bool {
        let k = self.branches.len();
        if a.a.len() != k || z.e.len() != k || z.z.len() != k || !self.challenge_ok(e) {
            return false;
        }
        if z.e.iter().fold(0, |acc, x| acc ^ x) != e {
            return false;
        }
        self.branches
            .iter()
            .enumerate()
            .all(|(i, inst)| inst.verify(&a.a[i], z.e[i], &z.z[i]))
    }

    pub fn simulate<R: Rng + ?Sized>(&self, e: u64, rng: &mut R) -> Result<(OrFirst, OrResponse), SigmaError> {
        if !self.challenge_ok(e) {
            return Err(SigmaError::Challenge(e));
        }
        let k = self.branches.len();
        let mut es: Vec<u64> = self.branches[..k - 1].iter().map(|b| b.random_challenge(rng)).collect();
        es.push(es.iter().fold(e, |acc, x| acc ^ x));
        let mut a = Vec::new();
        let mut z = Vec::new();
        for (inst, &ei) in self.branches.iter().zip(&es) {
            let (ai, zi) = inst.simulate(ei, rng)?;
            a.push(ai);
            z.push(zi);
        }
        Ok((OrFirst { a }, OrResponse { e: es, z }))
    }

    /// Extracts from the first branch whose challenges differ. Returns the
    /// branch index and its witness, re-checked against that branch.
    pub fn extract(
        &self,
        a: &OrFirst,
        (e1, z1): (u64, &OrResponse),
        (e2, z2): (u64, &OrResponse),
    ) -> Result<(usize, Witness), SigmaError> {
        if e1 == e2 {
            return Err(SigmaError::Precondition("identical challenges"));
        }
        if !self.verify(a, e1, z1) || !self.verify(a, e2, z2) {
            return Err(SigmaError::Precondition("transcript does not verify"));
        }
        let mut last = SigmaError::Precondition("no branch challenge differs");
        for (i, inst) in self.branches.iter().enumerate() {
            if z1.e[i] == z2.e[i] {
                continue;
            }
            let t1 = SigmaTranscript { a: a.a[i].clone(), e: z1.e[i], z: z1.z[i].clone() };
            let t2 = SigmaTranscript { a: a.a[i].clone(), e: z2.e[i], z: z2.z[i].clone() };
            match inst.extract(&t1, &t2) {
                Ok(w) => return Ok((i, w)),
                Err(e) => last = e,
            }
        }
        Err(last)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::{GroupParams, Profile};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn two_schnorr() -> (GroupParams, OrInstance) {
        let g = GroupParams::generate(Profile::Tiny, 0);
        let or = OrInstance::new(vec![
            Instance::schnorr(g, g.exp(3)).with_group_bits(),
            Instance::schnorr(g, g.exp(7)).with_group_bits(),
        ])
        .unwrap();
        (g, or)
    }

    #[test]
    fn xor_split_example() {
        let g = GroupParams::generate(Profile::Small, 0);
        let or = OrInstance::new(vec![
            Instance::schnorr(g, g.exp(5)).with_bits(4, 1),
            Instance::schnorr(g, g.exp(6)).with_bits(4, 1),
        ])
        .unwrap();
        let coins = [
            BranchCoins { nonces: vec![9], e: 0, z: vec![] },
            BranchCoins { nonces: vec![], e: 0b0110, z: vec![12] },
        ];
        let (a, p) = or.commit_with_coins(&[Some(Witness::Scalar(5)), None], &coins).unwrap();
        let z = or.respond(&p, 0b1010, 0).unwrap();
        assert_eq!(z.e, vec![0b1100, 0b0110]);
        assert!(or.verify(&a, 0b1010, &z));
    }

    #[test]
    fn rejects_when_challenges_do_not_xor() {
        let (_, or) = two_schnorr();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let (a, p) = or.commit(&[None, Some(Witness::Scalar(7))], &mut rng).unwrap();
        let z = or.respond(&p, 5, 1).unwrap();
        assert!(or.verify(&a, 5, &z));
        for e in 0..8 {
            assert_eq!(or.verify(&a, e, &z), e == 5);
        }
        assert!(or.respond(&p, 5, 0).is_err());
    }

    #[test]
    fn three_way_split_and_extraction() {
        let g = GroupParams::generate(Profile::Tiny, 3);
        let bits = g.challenge_bits();
        let or = OrInstance::new(
            (1..=3).map(|x| Instance::schnorr(g, g.exp(x)).with_bits(bits, 1)).collect(),
        )
        .unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let (a, p) = or.commit(&[None, None, Some(Witness::Scalar(3))], &mut rng).unwrap();
        let z1 = or.respond(&p, 1, 2).unwrap();
        let z2 = or.respond(&p, 6, 2).unwrap();
        assert_eq!(z1.e.iter().fold(0, |a, b| a ^ b), 1);
        assert_eq!(or.extract(&a, (1, &z1), (6, &z2)).unwrap(), (2, Witness::Scalar(3)));
    }

    #[test]
    fn deferred_choice_between_two_witnesses() {
        let (_, or) = two_schnorr();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let (a, p) = or.commit(&[Some(Witness::Scalar(3)), Some(Witness::Scalar(7))], &mut rng).unwrap();
        for free in 0..2 {
            let z = or.respond(&p, 6, free).unwrap();
            assert!(or.verify(&a, 6, &z));
            let z2 = or.respond(&p, 1, free).unwrap();
            assert_eq!(or.extract(&a, (6, &z), (1, &z2)).unwrap().0, free);
        }
    }

    #[test]
    fn simulation_verifies() {
        let (_, or) = two_schnorr();
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        for e in 0..8 {
            let (a, z) = or.simulate(e, &mut rng).unwrap();
            assert!(or.verify(&a, e, &z));
        }
    }
}
