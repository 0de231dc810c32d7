//! Deterministic transcript encoding: every field is `tag || len32 || bytes`.
//!
//! The PRF-derived coins of both parties are computed over these bytes, so
//! identical values must always encode identically.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Default)]
pub struct Encoder {
    buf: Vec<u8>,
}

impl Encoder {
    pub fn new() -> Self {
        Encoder::default()
    }

    pub fn bytes(&mut self, tag: u8, data: &[u8]) -> &mut Self {
        self.buf.push(tag);
        self.buf.extend_from_slice(&(data.len() as u32).to_be_bytes());
        self.buf.extend_from_slice(data);
        self
    }

    pub fn u64(&mut self, tag: u8, v: u64) -> &mut Self {
        self.bytes(tag, &v.to_be_bytes())
    }

    pub fn nested(&mut self, tag: u8, inner: &Encoder) -> &mut Self {
        self.bytes(tag, &inner.buf)
    }

    pub fn finish(&self) -> Vec<u8> {
        self.buf.clone()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

pub trait Encode {
    fn encode(&self, e: &mut Encoder);

    fn to_bytes(&self) -> Vec<u8> {
        let mut e = Encoder::new();
        self.encode(&mut e);
        e.into_bytes()
    }
}

/// Payloads above this size enter a [`View`] as their SHA-256 digest.
pub const VIEW_DIGEST_THRESHOLD: usize = 4096;

/// Append-only serialization of what a party has seen so far.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct View {
    #[serde(with = "hex_vec")]
    bytes: Vec<u8>,
}

impl View {
    pub fn new() -> Self {
        View::default()
    }

    pub fn append(&mut self, tag: u8, payload: &[u8]) {
        if payload.len() > VIEW_DIGEST_THRESHOLD {
            let digest = Sha256::digest(payload);
            self.bytes.push(tag | 0x80);
            self.bytes.extend_from_slice(&(payload.len() as u32).to_be_bytes());
            self.bytes.extend_from_slice(&digest);
        } else {
            self.bytes.push(tag);
            self.bytes.extend_from_slice(&(payload.len() as u32).to_be_bytes());
            self.bytes.extend_from_slice(payload);
        }
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }
}

pub(crate) mod hex_vec {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        hex::decode(s).map_err(serde::de::Error::custom)
    }
}
