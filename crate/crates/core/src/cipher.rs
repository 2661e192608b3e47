//! Merkle–Hellman knapsack cryptosystem.
//!
//! The private key is a superincreasing sequence `b`, a modulus `q > Σb` and
//! a multiplier `w` coprime to `q`. The public weights are `a_i = w·b_i mod q`.
//! A block of bits `x` encrypts to `c = Σ a_i·x_i`; decryption maps `c` back
//! to `Σ b_i·x_i` with `w⁻¹ mod q` and solves the easy knapsack greedily.
//!
//! All key material is `u64`. Key generation reports an error instead of
//! producing a modulus that does not fit.

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::problem::{weighted_sum, Chromosome};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPrivateKey")]
pub struct PrivateKey {
    superincreasing: Vec<u64>,
    modulus: u64,
    multiplier: u64,
}

#[derive(Deserialize)]
struct RawPrivateKey {
    superincreasing: Vec<u64>,
    modulus: u64,
    multiplier: u64,
}

impl TryFrom<RawPrivateKey> for PrivateKey {
    type Error = Error;

    fn try_from(raw: RawPrivateKey) -> Result<Self> {
        PrivateKey::new(raw.superincreasing, raw.modulus, raw.multiplier)
    }
}

impl PrivateKey {
    /// Validates every private-key invariant.
    pub fn new(superincreasing: Vec<u64>, modulus: u64, multiplier: u64) -> Result<Self> {
        if superincreasing.is_empty() {
            return Err(Error::InvalidKey("superincreasing sequence is empty".into()));
        }
        let mut total: u128 = 0;
        for (i, &b) in superincreasing.iter().enumerate() {
            if b == 0 || (b as u128) <= total {
                return Err(Error::InvalidKey(format!(
                    "element {i} ({b}) does not exceed the sum of its predecessors ({total})"
                )));
            }
            total += b as u128;
        }
        if (modulus as u128) <= total {
            return Err(Error::InvalidKey(format!(
                "modulus {modulus} must exceed the sequence sum {total}"
            )));
        }
        if multiplier <= 1 || multiplier >= modulus {
            return Err(Error::InvalidKey(format!(
                "multiplier {multiplier} must lie strictly between 1 and the modulus {modulus}"
            )));
        }
        if multiplier.gcd(&modulus) != 1 {
            return Err(Error::InvalidKey(format!(
                "multiplier {multiplier} is not coprime to modulus {modulus}"
            )));
        }
        Ok(Self { superincreasing, modulus, multiplier })
    }

    pub fn superincreasing(&self) -> &[u64] {
        &self.superincreasing
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn multiplier(&self) -> u64 {
        self.multiplier
    }

    pub fn len(&self) -> usize {
        self.superincreasing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.superincreasing.is_empty()
    }

    /// `w⁻¹ mod q`.
    pub fn inverse_multiplier(&self) -> u64 {
        let q = self.modulus as i128;
        let egcd = (self.multiplier as i128).extended_gcd(&q);
        debug_assert_eq!(egcd.gcd, 1);
        egcd.x.rem_euclid(q) as u64
    }

    pub fn public_key(&self) -> PublicKey {
        let q = self.modulus as u128;
        let w = self.multiplier as u128;
        PublicKey {
            public: self
                .superincreasing
                .iter()
                .map(|&b| (w * b as u128 % q) as u64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicKey {
    public: Vec<u64>,
}

impl PublicKey {
    /// Wraps arbitrary public weights; useful for attacking keys that were
    /// not produced here.
    pub fn from_weights(public: Vec<u64>) -> Result<Self> {
        if public.is_empty() {
            return Err(Error::InvalidKey("public key is empty".into()));
        }
        Ok(Self { public })
    }

    pub fn weights(&self) -> &[u64] {
        &self.public
    }

    pub fn len(&self) -> usize {
        self.public.len()
    }

    pub fn is_empty(&self) -> bool {
        self.public.is_empty()
    }

    /// Largest ciphertext value any block can produce.
    pub fn capacity(&self) -> u128 {
        self.public.iter().map(|&a| a as u128).sum()
    }

    /// First 16 hex digits of SHA-256 over the comma-joined weights.
    pub fn fingerprint(&self) -> String {
        let joined = self
            .public
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",");
        let digest = Sha256::digest(joined.as_bytes());
        hex::encode(&digest[..8])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPair {
    pub private: PrivateKey,
    pub public: PublicKey,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CiphertextBlock(pub u128);

impl CiphertextBlock {
    pub fn value(self) -> u128 {
        self.0
    }
}

/// Ciphertext file contents. `byte_len` lets decoding drop tail padding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ciphertext {
    pub n: usize,
    pub byte_len: usize,
    pub blocks: Vec<CiphertextBlock>,
}

impl Ciphertext {
    /// Checks that the block count is exactly what `byte_len` bytes need.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::MalformedCiphertext("block size n must be at least 1".into()));
        }
        let expected = (self.byte_len * 8).div_ceil(self.n);
        if self.blocks.len() != expected {
            return Err(Error::MalformedCiphertext(format!(
                "{} bytes at n={} need {expected} blocks, found {}",
                self.byte_len,
                self.n,
                self.blocks.len()
            )));
        }
        Ok(())
    }
}

fn uniform_increment(rng: &mut impl Rng, magnitude: u32) -> u64 {
    rng.gen_range(1..=(1u64 << magnitude))
}

fn overflow(n: usize, magnitude: u32) -> Error {
    Error::InvalidKey(format!(
        "n={n} with magnitude={magnitude} produces a modulus that does not fit in 64 bits"
    ))
}

/// Deterministic Merkle–Hellman key generation.
///
/// `b_1` is uniform in `[1, 2^magnitude]`, each later `b_i` is the running
/// sum plus a fresh increment from the same range, `q` is the total plus one
/// more increment, and `w` is redrawn from `(1, q)` until coprime to `q`.
pub fn generate_keypair(n: usize, seed: u64, magnitude: u32) -> Result<KeyPair> {
    if n == 0 {
        return Err(Error::InvalidKey("block size n must be at least 1".into()));
    }
    if magnitude == 0 || magnitude > 62 {
        return Err(Error::InvalidKey(format!(
            "magnitude must be in 1..=62, got {magnitude}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut superincreasing = Vec::with_capacity(n);
    let mut total: u64 = 0;
    for _ in 0..n {
        let b = total
            .checked_add(uniform_increment(&mut rng, magnitude))
            .ok_or_else(|| overflow(n, magnitude))?;
        superincreasing.push(b);
        total = total.checked_add(b).ok_or_else(|| overflow(n, magnitude))?;
    }
    // q = 2 leaves no multiplier in (1, q); redraw the increment.
    let modulus = loop {
        let q = total
            .checked_add(uniform_increment(&mut rng, magnitude))
            .ok_or_else(|| overflow(n, magnitude))?;
        if q > 2 {
            break q;
        }
    };
    let multiplier = loop {
        let w = rng.gen_range(2..modulus);
        if w.gcd(&modulus) == 1 {
            break w;
        }
    };
    let private = PrivateKey::new(superincreasing, modulus, multiplier)?;
    let public = private.public_key();
    Ok(KeyPair { private, public })
}

pub fn encrypt_block(bits: &Chromosome, key: &PublicKey) -> Result<CiphertextBlock> {
    weighted_sum(key.weights(), bits).map(CiphertextBlock)
}

pub fn decrypt_block(cipher: CiphertextBlock, key: &PrivateKey) -> Result<Chromosome> {
    let q = key.modulus() as u128;
    let mut residue = (cipher.value() % q) * key.inverse_multiplier() as u128 % q;
    let mut bits = vec![false; key.len()];
    for (i, &b) in key.superincreasing().iter().enumerate().rev() {
        if residue >= b as u128 {
            residue -= b as u128;
            bits[i] = true;
        }
    }
    if residue != 0 {
        return Err(Error::MalformedCiphertext(format!(
            "greedy residue {residue} left after unwinding the trapdoor"
        )));
    }
    let bits = Chromosome::new(bits);
    // A value past the key capacity can still reduce to a valid residue mod q.
    let expected = encrypt_block(&bits, &key.public_key())?;
    if expected != cipher {
        return Err(Error::MalformedCiphertext(format!(
            "value {} is not a valid encryption under this key",
            cipher.value()
        )));
    }
    Ok(bits)
}

/// Splits `text` into `n`-bit blocks, most significant bit of each byte
/// first, zero-padding the final block.
pub fn encode_message(text: &[u8], n: usize) -> Vec<Chromosome> {
    assert!(n >= 1, "block size must be at least 1");
    let bits: Vec<bool> = text
        .iter()
        .flat_map(|&byte| (0..8).rev().map(move |i| (byte >> i) & 1 == 1))
        .collect();
    bits.chunks(n)
        .map(|chunk| {
            let mut block = chunk.to_vec();
            block.resize(n, false);
            Chromosome::new(block)
        })
        .collect()
}

/// Concatenates the blocks and packs every complete byte.
pub fn decode_message(blocks: &[Chromosome]) -> Result<Vec<u8>> {
    let Some(first) = blocks.first() else {
        return Ok(Vec::new());
    };
    let n = first.len();
    if let Some(bad) = blocks.iter().find(|b| b.len() != n) {
        return Err(Error::Dimension { expected: n, actual: bad.len() });
    }
    let bits: Vec<bool> = blocks.iter().flat_map(|b| b.bits().iter().copied()).collect();
    Ok(bits
        .chunks_exact(8)
        .map(|byte| byte.iter().fold(0u8, |acc, &b| (acc << 1) | u8::from(b)))
        .collect())
}

pub fn encrypt_message(text: &[u8], key: &PublicKey) -> Ciphertext {
    let n = key.len();
    let blocks = encode_message(text, n)
        .iter()
        .map(|b| encrypt_block(b, key).expect("blocks are encoded at key length"))
        .collect();
    Ciphertext { n, byte_len: text.len(), blocks }
}

pub fn decrypt_message(ciphertext: &Ciphertext, key: &PrivateKey) -> Result<Vec<u8>> {
    ciphertext.validate()?;
    if ciphertext.n != key.len() {
        return Err(Error::Dimension { expected: key.len(), actual: ciphertext.n });
    }
    let blocks = ciphertext
        .blocks
        .iter()
        .map(|&c| decrypt_block(c, key))
        .collect::<Result<Vec<_>>>()?;
    let mut text = decode_message(&blocks)?;
    text.truncate(ciphertext.byte_len);
    Ok(text)
}
