//! Population operators: random initialization, fitness, roulette-wheel
//! selection, single-point crossover and single-bit mutation.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::problem::{difference, evaluate, Chromosome, Instance};

/// Fitness awarded to an exact hit. Non-solutions score at most 100.
pub const SOLUTION_FITNESS: f64 = 101.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessValue {
    pub value: f64,
    pub is_solution: bool,
}

/// `100 / diff` for a miss, the 101 sentinel for an exact hit.
pub fn fitness(diff: u128) -> FitnessValue {
    if diff == 0 {
        FitnessValue { value: SOLUTION_FITNESS, is_solution: true }
    } else {
        FitnessValue { value: 100.0 / diff as f64, is_solution: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Population {
    members: Vec<Chromosome>,
}

impl Population {
    /// Panics if the members do not share one length.
    pub fn new(members: Vec<Chromosome>) -> Self {
        if let Some(first) = members.first() {
            assert!(
                members.iter().all(|c| c.len() == first.len()),
                "population members must share one chromosome length"
            );
        }
        Self { members }
    }

    pub fn members(&self) -> &[Chromosome] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Chromosome> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn chromosome_len(&self) -> usize {
        self.members.first().map_or(0, Chromosome::len)
    }
}

pub fn random_population(n: usize, size: usize, rng: &mut impl Rng) -> Population {
    let members = (0..size)
        .map(|_| Chromosome::new((0..n).map(|_| rng.gen::<bool>()).collect()))
        .collect();
    Population { members }
}

pub fn evaluate_population(pop: &Population, instance: &Instance) -> Result<Vec<FitnessValue>> {
    pop.members
        .iter()
        .map(|c| Ok(fitness(difference(evaluate(instance, c)?, instance.target()))))
        .collect()
}

/// Fitness-proportional resampling: every slot independently picks member
/// `i` with probability `fit[i] / Σ fit`.
pub fn roulette_select(pop: &Population, fits: &[FitnessValue], rng: &mut impl Rng) -> Population {
    assert_eq!(pop.len(), fits.len(), "one fitness value per member");
    let mut cumulative = Vec::with_capacity(fits.len());
    let mut total = 0.0;
    for f in fits {
        debug_assert!(f.value > 0.0);
        total += f.value;
        cumulative.push(total);
    }
    let last = pop.len() - 1;
    let members = (0..pop.len())
        .map(|_| {
            let spin = rng.gen::<f64>() * total;
            let pick = cumulative.partition_point(|&c| c <= spin).min(last);
            pop.members[pick].clone()
        })
        .collect();
    Population { members }
}

/// Number of individuals paired per generation: `rate`% of the population,
/// floored, then rounded down to an even count.
pub fn crossover_participants(crossover_rate: f64, population_size: usize) -> usize {
    let k = (crossover_rate * population_size as f64 / 100.0).floor() as usize;
    let k = k.min(population_size);
    k - k % 2
}

/// Swaps the tails of `a` and `b` from position `cut` on.
pub fn single_point_crossover(a: &Chromosome, b: &Chromosome, cut: usize) -> (Chromosome, Chromosome) {
    assert_eq!(a.len(), b.len());
    assert!(cut <= a.len());
    let mut left = a.bits()[..cut].to_vec();
    left.extend_from_slice(&b.bits()[cut..]);
    let mut right = b.bits()[..cut].to_vec();
    right.extend_from_slice(&a.bits()[cut..]);
    (Chromosome::new(left), Chromosome::new(right))
}

/// Picks the participants uniformly without replacement, pairs them in
/// draw order, and crosses each pair at a uniform cut in `1..n`.
/// Single-bit chromosomes have no interior cut and pass through.
pub fn crossover(mut pop: Population, crossover_rate: f64, rng: &mut impl Rng) -> Population {
    let k = crossover_participants(crossover_rate, pop.len());
    let n = pop.chromosome_len();
    if k == 0 || n < 2 {
        return pop;
    }
    let chosen = index::sample(rng, pop.len(), k).into_vec();
    for pair in chosen.chunks_exact(2) {
        let (i, j) = (pair[0], pair[1]);
        let cut = rng.gen_range(1..n);
        let (a, b) = single_point_crossover(&pop.members[i], &pop.members[j], cut);
        pop.members[i] = a;
        pop.members[j] = b;
    }
    pop
}

/// With probability `mutation_rate` a chromosome has exactly one uniformly
/// chosen bit flipped.
pub fn mutate(mut pop: Population, mutation_rate: f64, rng: &mut impl Rng) -> Population {
    for c in &mut pop.members {
        if !c.is_empty() && rng.gen_bool(mutation_rate) {
            let bit = rng.gen_range(0..c.len());
            c.flip(bit);
        }
    }
    pop
}
