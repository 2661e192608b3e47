//! Subset-sum problem representation and chromosome evaluation.
//!
//! A chromosome is a bit vector aligned with the instance weights: bit `i`
//! selects `weights[i]`. Weights are `u64` and every sum is accumulated in
//! `u128`, which cannot overflow for any realistic number of weights.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexSet;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A weight list plus the target sum the GA searches for.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct Instance {
    weights: Vec<u64>,
    target: u128,
}

#[derive(Deserialize)]
struct RawInstance {
    weights: Vec<u64>,
    target: u128,
}

impl TryFrom<RawInstance> for Instance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        Instance::new(raw.weights, raw.target)
    }
}

impl Instance {
    pub fn new(weights: Vec<u64>, target: u128) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidInstance("weights must not be empty".into()));
        }
        if let Some(pos) = weights.iter().position(|&w| w == 0) {
            return Err(Error::InvalidInstance(format!(
                "weights must be positive, weights[{pos}] is 0"
            )));
        }
        Ok(Self { weights, target })
    }

    /// Parses the CLI form: comma-separated weights and an integer target.
    pub fn parse_args(weights: &str, target: &str) -> Result<Self> {
        let weights = weights
            .split(',')
            .map(|w| {
                w.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::InvalidInstance(format!("bad weight {w:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let target = target
            .trim()
            .parse::<u128>()
            .map_err(|e| Error::InvalidInstance(format!("bad target {target:?}: {e}")))?;
        Self::new(weights, target)
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn target(&self) -> u128 {
        self.target
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_weight(&self) -> u128 {
        self.weights.iter().map(|&w| w as u128).sum()
    }
}

/// Fixed-length bit vector; serializes as a `"0110"` bit string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chromosome(Vec<bool>);

impl Chromosome {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![true; n])
    }

    /// Bit `i` of the chromosome is bit `i` of `mask` (least significant first).
    pub fn from_mask(mask: u64, n: usize) -> Self {
        Self((0..n).map(|i| (mask >> i) & 1 == 1).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.0
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn hamming(&self, other: &Chromosome) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid bit string character {0:?}")]
pub struct ParseChromosomeError(char);

impl FromStr for Chromosome {
    type Err = ParseChromosomeError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ParseChromosomeError(other)),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Chromosome)
    }
}

impl Serialize for Chromosome {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Chromosome {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Distinct solutions in discovery order. Equality ignores order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SolutionSet(IndexSet<Chromosome>);

impl SolutionSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns true if `c` was not already present.
    pub fn insert(&mut self, c: Chromosome) -> bool {
        self.0.insert(c)
    }

    pub fn contains(&self, c: &Chromosome) -> bool {
        self.0.contains(c)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<&Chromosome> {
        self.0.first()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Chromosome> {
        self.0.iter()
    }

    pub fn is_subset(&self, other: &SolutionSet) -> bool {
        self.0.iter().all(|c| other.contains(c))
    }
}

impl FromIterator<Chromosome> for SolutionSet {
    fn from_iter<I: IntoIterator<Item = Chromosome>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a SolutionSet {
    type Item = &'a Chromosome;
    type IntoIter = indexmap::set::Iter<'a, Chromosome>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Weighted sum of the selected weights.
pub fn evaluate(instance: &Instance, chromosome: &Chromosome) -> Result<u128> {
    weighted_sum(instance.weights(), chromosome)
}

pub(crate) fn weighted_sum(weights: &[u64], chromosome: &Chromosome) -> Result<u128> {
    if chromosome.len() != weights.len() {
        return Err(Error::Dimension {
            expected: weights.len(),
            actual: chromosome.len(),
        });
    }
    Ok(weights
        .iter()
        .zip(chromosome.bits())
        .filter(|(_, &bit)| bit)
        .map(|(&w, _)| w as u128)
        .sum())
}

/// Absolute distance between a sum and the target.
pub fn difference(sum: u128, target: u128) -> u128 {
    sum.abs_diff(target)
}
