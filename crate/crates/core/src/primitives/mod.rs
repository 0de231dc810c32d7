//! In-repo algebraic and symmetric primitives.
//!
//! Everything here is implemented from scratch so that each symmetric
//! primitive also has a gate-level description (see `circuit::gadgets`).
//! Parameters are toy-sized; nothing in this module is meant to resist a
//! real attacker.

pub mod bits;
pub mod group;
pub mod hash;
pub mod prf;

use thiserror::Error;

pub use bits::Bits;
pub use group::{GroupElement, GroupParams, Profile};
pub use hash::{hash_eval, HashIndex};
pub use prf::{prf_eval, prf_expand, prf_rng, prg_expand, PrfKey};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DomainError {
    #[error("value {value} outside [0, {bound})")]
    OutOfRange { value: u64, bound: u64 },
    #[error("{0} is not in the prime-order subgroup")]
    NotInSubgroup(u64),
    #[error("invalid group parameters: {0}")]
    InvalidGroup(&'static str),
    #[error("malformed encoding: {0}")]
    Encoding(&'static str),
}

/// The one-way permutation `f(x) = g^x mod p` on `Z_q`.
pub fn owf_eval(group: &GroupParams, x: u64) -> Result<GroupElement, DomainError> {
    group.check_scalar(x)?;
    Ok(group.exp(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn owf_examples() {
        let g = GroupParams::generate(Profile::Tiny, 0);
        assert_eq!(owf_eval(&g, 3).unwrap().value(), 8);
        assert_eq!(owf_eval(&g, 0).unwrap().value(), 1);
        assert!(matches!(
            owf_eval(&g, 11),
            Err(DomainError::OutOfRange { value: 11, bound: 11 })
        ));
    }

    #[test]
    fn owf_is_a_bijection_onto_the_subgroup() {
        for seed in 0..20 {
            let g = GroupParams::generate(Profile::Tiny, seed);
            let image: HashSet<_> = (0..g.q).map(|x| owf_eval(&g, x).unwrap()).collect();
            assert_eq!(image.len() as u64, g.q);
            // brute force the subgroup membership independently
            let members: HashSet<u64> = (1..g.p)
                .filter(|&v| group::pow_mod(v, g.q, g.p) == 1)
                .collect();
            assert_eq!(image.iter().map(|e| e.value()).collect::<HashSet<_>>(), members);
        }
    }
}
