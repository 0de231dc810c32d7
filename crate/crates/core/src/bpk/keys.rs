use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::BpkError;
use crate::primitives::{owf_eval, GroupElement, GroupParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PublicKey {
    pub group: GroupParams,
    pub y0: GroupElement,
    pub y1: GroupElement,
}

impl PublicKey {
    pub fn y(&self, b: u8) -> GroupElement {
        if b == 0 {
            self.y0
        } else {
            self.y1
        }
    }
}

/// `α` with `y_b = g^α`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecretKey {
    pub alpha: u64,
    pub b: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyPair {
    pub pk: PublicKey,
    pub sk: SecretKey,
}

impl KeyPair {
    pub fn is_valid(&self) -> bool {
        self.sk.b <= 1 && owf_eval(&self.pk.group, self.sk.alpha).is_ok_and(|y| y == self.pk.y(self.sk.b))
    }
}

/// Key pair from explicit exponents: `y_b = g^α`, `y_{1-b} = g^other`.
pub fn keygen_from(group: GroupParams, alpha: u64, b: u8, other: u64) -> KeyPair {
    let held = group.exp(alpha);
    let other = group.exp(other);
    let (y0, y1) = if b == 0 { (held, other) } else { (other, held) };
    KeyPair { pk: PublicKey { group, y0, y1 }, sk: SecretKey { alpha: alpha % group.q, b } }
}

/// Key exponents are drawn from `1..q`: `y = 1` would be a visible key.
fn key_exponent<R: Rng + ?Sized>(group: GroupParams, rng: &mut R) -> u64 {
    rng.gen_range(1..group.q)
}

pub fn keygen_with_rng<R: Rng + ?Sized>(group: GroupParams, rng: &mut R) -> KeyPair {
    let alpha = key_exponent(group, rng);
    let b = rng.gen_range(0..2u8);
    // the exponent of the other key is dropped right here
    let other = key_exponent(group, rng);
    keygen_from(group, alpha, b, other)
}

pub fn keygen(group: GroupParams, seed: u64) -> KeyPair {
    keygen_with_rng(group, &mut ChaCha20Rng::seed_from_u64(seed))
}

/// Reduction mode: `y_b = g^α` and the injected `y` at slot `1 - b`.
pub fn keygen_reduction<R: Rng + ?Sized>(group: GroupParams, y: GroupElement, rng: &mut R) -> KeyPair {
    let alpha = key_exponent(group, rng);
    let b = rng.gen_range(0..2u8);
    let held = group.exp(alpha);
    let (y0, y1) = if b == 0 { (held, y) } else { (y, held) };
    KeyPair { pk: PublicKey { group, y0, y1 }, sk: SecretKey { alpha, b } }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub index: usize,
    pub pk: PublicKey,
}

/// Append-only list of public keys. Registration closes when the first
/// session starts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicFile {
    records: Vec<Record>,
    closed: bool,
}

impl PublicFile {
    pub fn new() -> Self {
        PublicFile::default()
    }

    pub fn register(&mut self, pk: PublicKey) -> Result<usize, BpkError> {
        if self.closed {
            return Err(BpkError::RegistrationClosed);
        }
        if !pk.group.is_member(pk.y0.value()) || !pk.group.is_member(pk.y1.value()) {
            return Err(BpkError::Params("public key outside the subgroup".into()));
        }
        let index = self.records.len();
        self.records.push(Record { index, pk });
        Ok(index)
    }

    pub fn close(&mut self) {
        self.closed = true;
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn get(&self, i: usize) -> Option<&Record> {
        self.records.get(i)
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// `record <i> <hex p> <hex q> <hex g> <hex y0> <hex y1>` per line.
    pub fn to_text(&self) -> String {
        self.records
            .iter()
            .map(|r| {
                let g = r.pk.group;
                format!(
                    "record {} {:x} {:x} {:x} {:x} {:x}\n",
                    r.index,
                    g.p,
                    g.q,
                    g.g,
                    r.pk.y0.value(),
                    r.pk.y1.value()
                )
            })
            .collect()
    }

    /// Parses [`to_text`](Self::to_text) output; groups are rebuilt from
    /// `(p, q, g)` and validated.
    pub fn from_text(text: &str) -> Result<Self, BpkError> {
        let mut file = PublicFile::new();
        for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = |what: &str| BpkError::Parse(format!("line {}: {what}", n + 1));
            if parts.len() != 7 || parts[0] != "record" {
                return Err(bad("expected `record i p q g y0 y1`"));
            }
            let index: usize = parts[1].parse().map_err(|_| bad("index"))?;
            if index != file.len() {
                return Err(bad("indices must be dense from 0"));
            }
            let hex = |s: &str| u64::from_str_radix(s, 16).map_err(|_| bad("hex field"));
            let (p, q, g) = (hex(parts[2])?, hex(parts[3])?, hex(parts[4])?);
            let group = GroupParams::from_parts(p, q, g).map_err(|e| bad(&e.to_string()))?;
            let y0 = group.element(hex(parts[5])?).map_err(|e| bad(&e.to_string()))?;
            let y1 = group.element(hex(parts[6])?).map_err(|e| bad(&e.to_string()))?;
            file.register(PublicKey { group, y0, y1 })?;
        }
        Ok(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::Profile;

    #[test]
    fn tiny_keygen_example() {
        let g = GroupParams::generate(Profile::Tiny, 0);
        let kp = keygen_from(g, 3, 0, 5);
        assert_eq!(kp.pk.y0.value(), 8);
        assert!(kp.is_valid());
    }

    #[test]
    fn reduction_mode_injects_y() {
        let g = GroupParams::generate(Profile::Tiny, 0);
        let y = g.exp(7);
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..20 {
            let kp = keygen_reduction(g, y, &mut rng);
            assert_eq!(kp.pk.y(1 - kp.sk.b), y);
            assert!(kp.is_valid());
        }
    }

    #[test]
    fn b_is_balanced() {
        let g = GroupParams::generate(Profile::Tiny, 0);
        let ones: usize = (0..1000).map(|s| keygen(g, s).sk.b as usize).sum();
        assert!((450..=550).contains(&ones), "{ones}");
    }

    #[test]
    fn public_file_roundtrip_and_closing() {
        let g = GroupParams::generate(Profile::Small, 0);
        let mut f = PublicFile::new();
        for s in 0..3 {
            f.register(keygen(g, s).pk).unwrap();
        }
        let text = f.to_text();
        assert!(text.starts_with("record 0 "));
        assert_eq!(PublicFile::from_text(&text).unwrap().records(), f.records());
        f.close();
        assert_eq!(f.register(keygen(g, 9).pk), Err(BpkError::RegistrationClosed));
        assert!(PublicFile::from_text("record 1 17 b 2 1 1").is_err());
    }
}
