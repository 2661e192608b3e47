//! Ciphertext-only recovery: every ciphertext block becomes the subset-sum
//! instance (public weights, block value) and the GA searches for a
//! preimage. The trapdoor is never used.
//!
//! Once the population settles on a near miss the GA rarely escapes, so a
//! block is attempted up to `attempts` times with independent seeds, stopping
//! at the first run that finds a preimage.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cipher::{decode_message, encrypt_block, Ciphertext, CiphertextBlock, PublicKey};
use crate::error::{Error, Result};
use crate::ga::{run_ga, GaParams};
use crate::oracle::{count_solutions, DEFAULT_ORACLE_LIMIT};
use crate::problem::{Chromosome, Instance};
use crate::seed::derive_seed;

/// Independent GA runs per block before the block is reported as failed.
pub const DEFAULT_ATTEMPTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveredBlock {
    pub index: usize,
    pub bits: Chromosome,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackReport {
    pub recovered_blocks: Vec<RecoveredBlock>,
    /// Recovered blocks with a second known preimage.
    pub ambiguous_blocks: Vec<usize>,
    pub failed_blocks: Vec<usize>,
    pub total_generations: usize,
}

impl AttackReport {
    pub fn is_complete(&self) -> bool {
        self.failed_blocks.is_empty()
    }
}

#[derive(Debug)]
struct BlockOutcome {
    recovered: Option<Chromosome>,
    distinct_found: usize,
    generations: usize,
}

fn block_instance(index: usize, cipher: CiphertextBlock, key: &PublicKey) -> Result<Instance> {
    let capacity = key.capacity();
    if cipher.value() > capacity {
        return Err(Error::InfeasibleCiphertext { index, value: cipher.value(), capacity });
    }
    Instance::new(key.weights().to_vec(), cipher.value())
}

// Attempt 0 runs with `params.seed`; attempt k derives its seed from it.
fn run_block(instance: &Instance, params: &GaParams, attempts: usize) -> Result<BlockOutcome> {
    let mut generations = 0;
    for attempt in 0..attempts.max(1) {
        let seed = match attempt {
            0 => params.seed,
            k => derive_seed(params.seed, k as u64),
        };
        let result = run_ga(instance, &params.clone().with_seed(seed))?;
        generations += result.generations_executed;
        if let Some(first) = result.solutions.first() {
            return Ok(BlockOutcome {
                recovered: Some(first.clone()),
                distinct_found: result.solutions.len(),
                generations,
            });
        }
    }
    Ok(BlockOutcome { recovered: None, distinct_found: 0, generations })
}

/// Recovers one block. Fails with [`Error::NotFound`] when every attempt
/// exhausts its generation budget.
pub fn attack_block(
    cipher: CiphertextBlock,
    key: &PublicKey,
    params: &GaParams,
    attempts: usize,
) -> Result<Chromosome> {
    let instance = block_instance(0, cipher, key)?;
    let outcome = run_block(&instance, params, attempts)?;
    outcome.recovered.ok_or(Error::NotFound { generations: outcome.generations })
}

/// Attacks every block with a seed derived from `params.seed` and the block
/// index, then decodes what was recovered. Failed blocks decode as zero bits
/// and are listed in the report.
pub fn attack_message(
    ciphertext: &Ciphertext,
    key: &PublicKey,
    params: &GaParams,
    attempts: usize,
) -> Result<(Vec<u8>, AttackReport)> {
    params.validate()?;
    ciphertext.validate()?;
    if ciphertext.n != key.len() {
        return Err(Error::Dimension { expected: key.len(), actual: ciphertext.n });
    }
    let instances = ciphertext
        .blocks
        .iter()
        .enumerate()
        .map(|(i, &c)| block_instance(i, c, key))
        .collect::<Result<Vec<_>>>()?;

    let outcomes = instances
        .par_iter()
        .enumerate()
        .map(|(i, instance)| {
            let block_params = params.clone().with_seed(derive_seed(params.seed, i as u64));
            let outcome = run_block(instance, &block_params, attempts)?;
            let ambiguous = match &outcome.recovered {
                None => false,
                Some(_) if key.len() <= DEFAULT_ORACLE_LIMIT => count_solutions(instance)? > 1,
                Some(_) => outcome.distinct_found > 1,
            };
            Ok((outcome, ambiguous))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = AttackReport::default();
    let mut blocks = Vec::with_capacity(outcomes.len());
    for (index, (outcome, ambiguous)) in outcomes.into_iter().enumerate() {
        report.total_generations += outcome.generations;
        match outcome.recovered {
            Some(bits) => {
                debug_assert_eq!(
                    encrypt_block(&bits, key).ok(),
                    Some(ciphertext.blocks[index])
                );
                if ambiguous {
                    report.ambiguous_blocks.push(index);
                }
                blocks.push(bits.clone());
                report.recovered_blocks.push(RecoveredBlock { index, bits });
            }
            None => {
                report.failed_blocks.push(index);
                blocks.push(Chromosome::zeros(key.len()));
            }
        }
    }
    let mut plaintext = decode_message(&blocks)?;
    plaintext.truncate(ciphertext.byte_len);
    Ok((plaintext, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cipher::{encrypt_message, generate_keypair};
    use crate::oracle::brute_force_solve;

    fn params(seed: u64) -> GaParams {
        GaParams { seed, max_generations: 400, ..GaParams::default() }
    }

    #[test]
    fn zero_block_recovers_all_zeros() {
        let pair = generate_keypair(8, 1, 10).unwrap();
        let got = attack_block(CiphertextBlock(0), &pair.public, &params(1), DEFAULT_ATTEMPTS).unwrap();
        assert_eq!(got, Chromosome::zeros(8));
    }

    #[test]
    fn generated_key_block_round_trip() {
        let pair = generate_keypair(8, 2, 10).unwrap();
        let block: Chromosome = "01100001".parse().unwrap();
        let c = encrypt_block(&block, &pair.public).unwrap();
        let got = attack_block(c, &pair.public, &params(2), DEFAULT_ATTEMPTS).unwrap();
        assert_eq!(encrypt_block(&got, &pair.public).unwrap(), c);
        let inst = Instance::new(pair.public.weights().to_vec(), c.value()).unwrap();
        if brute_force_solve(&inst).unwrap().len() == 1 {
            assert_eq!(got, block);
        }
    }

    #[test]
    fn infeasible_block_is_rejected() {
        let pair = generate_keypair(8, 3, 10).unwrap();
        let over = CiphertextBlock(pair.public.capacity() + 1);
        assert!(matches!(
            attack_block(over, &pair.public, &params(3), DEFAULT_ATTEMPTS),
            Err(Error::InfeasibleCiphertext { .. })
        ));
        let ct = Ciphertext { n: 8, byte_len: 1, blocks: vec![over] };
        assert!(matches!(
            attack_message(&ct, &pair.public, &params(3), DEFAULT_ATTEMPTS),
            Err(Error::InfeasibleCiphertext { index: 0, .. })
        ));
    }

    #[test]
    fn unsatisfiable_block_fails() {
        let key = PublicKey::from_weights(vec![2, 4, 6, 8]).unwrap();
        let p = GaParams { max_generations: 20, ..params(1) };
        assert!(matches!(
            attack_block(CiphertextBlock(5), &key, &p, 3),
            Err(Error::NotFound { generations: 60 })
        ));
    }

    #[test]
    fn ambiguous_public_map_is_flagged() {
        // 3 + 5 == 8: target 8 has the two preimages 110000 and 001000
        let key = PublicKey::from_weights(vec![3, 5, 8, 17, 40, 90]).unwrap();
        let ct = Ciphertext { n: 6, byte_len: 0, blocks: vec![] };
        assert_eq!(attack_message(&ct, &key, &params(1), DEFAULT_ATTEMPTS).unwrap().1, AttackReport::default());

        let target = CiphertextBlock(8);
        let inst = Instance::new(key.weights().to_vec(), 8).unwrap();
        let preimages = brute_force_solve(&inst).unwrap();
        assert_eq!(preimages.len(), 2);
        let got = attack_block(target, &key, &params(4), DEFAULT_ATTEMPTS).unwrap();
        assert!(preimages.contains(&got));

        // 6-bit blocks: 3 bytes pack into exactly 4 blocks
        let blocks = vec![CiphertextBlock(8), CiphertextBlock(17), CiphertextBlock(0), CiphertextBlock(130)];
        let ct = Ciphertext { n: 6, byte_len: 3, blocks };
        let (_, report) = attack_message(&ct, &key, &params(5), DEFAULT_ATTEMPTS).unwrap();
        assert!(report.is_complete());
        assert_eq!(report.recovered_blocks.len(), 4);
        for i in report.ambiguous_blocks.iter().copied() {
            let value = ct.blocks[i].value();
            let inst = Instance::new(key.weights().to_vec(), value).unwrap();
            assert!(brute_force_solve(&inst).unwrap().len() > 1);
        }
        assert!(report.ambiguous_blocks.contains(&0));
    }

    #[test]
    fn message_attack_recovers_ok() {
        let pair = generate_keypair(8, 11, 10).unwrap();
        let ct = encrypt_message(b"ok", &pair.public);
        let (plain, report) = attack_message(&ct, &pair.public, &params(7), DEFAULT_ATTEMPTS).unwrap();
        assert!(report.is_complete());
        assert!(report.ambiguous_blocks.is_empty());
        assert_eq!(plain, b"ok");
        let again = attack_message(&ct, &pair.public, &params(7), DEFAULT_ATTEMPTS).unwrap();
        assert_eq!(again.1, report);
    }

    #[test]
    fn partial_recovery_reports_failures() {
        let key = PublicKey::from_weights(vec![2, 4, 6, 8, 10, 12, 14, 16]).unwrap();
        // odd sums are unreachable with even weights
        let ct = Ciphertext {
            n: 8,
            byte_len: 2,
            blocks: vec![CiphertextBlock(6), CiphertextBlock(7)],
        };
        let p = GaParams { max_generations: 50, ..params(1) };
        let (plain, report) = attack_message(&ct, &key, &p, 2).unwrap();
        assert_eq!(report.failed_blocks, vec![1]);
        assert_eq!(report.recovered_blocks.len(), 1);
        assert_eq!(plain.len(), 2);
        assert_eq!(plain[1], 0);
        assert!(!report.is_complete());
    }

    #[test]
    fn mismatched_block_size_is_rejected() {
        let pair = generate_keypair(8, 1, 10).unwrap();
        let ct = Ciphertext { n: 4, byte_len: 1, blocks: vec![CiphertextBlock(0); 2] };
        assert!(matches!(
            attack_message(&ct, &pair.public, &params(1), DEFAULT_ATTEMPTS),
            Err(Error::Dimension { .. })
        ));
    }
}
