//! Genetic-algorithm subset-sum solver.
//!
//! Each generation is evaluated, every exact hit is recorded, and the next
//! population is bred by roulette-wheel selection followed by crossover and
//! mutation. There is no elitism and no duplicate suppression.

mod operators;

pub use operators::{
    crossover, crossover_participants, evaluate_population, fitness, mutate, random_population,
    roulette_select, single_point_crossover, FitnessValue, Population, SOLUTION_FITNESS,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Instance, SolutionSet};

/// GA configuration. `crossover_rate` is a percentage of the population
/// paired each generation; `mutation_rate` is the per-chromosome probability
/// of one bit flip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaParams {
    pub population_size: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub max_generations: usize,
    pub seed: u64,
    pub stop_on_first: bool,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population_size: 50,
            crossover_rate: 2.0,
            mutation_rate: 0.6,
            max_generations: 1000,
            seed: 0,
            stop_on_first: false,
        }
    }
}

impl GaParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.population_size < 2 {
            problems.push(format!("population_size must be >= 2, got {}", self.population_size));
        }
        if !(self.crossover_rate.is_finite() && self.crossover_rate >= 0.0) {
            problems.push(format!("crossover_rate must be >= 0, got {}", self.crossover_rate));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            problems.push(format!("mutation_rate must be in [0, 1], got {}", self.mutation_rate));
        }
        if self.max_generations < 1 {
            problems.push("max_generations must be >= 1".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(problems.join("; ")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    /// Distinct exact hits in the order they were first seen.
    pub solutions: SolutionSet,
    pub generations_executed: usize,
    /// Generation (1-based) at which the first solution appeared.
    pub first_hit_generation: Option<usize>,
    pub best_fitness_history: Vec<f64>,
    pub params_echo: GaParams,
}

/// Initial population drawn from a generator seeded with `params.seed`;
/// this is exactly the first generation of [`run_ga`].
pub fn init_population(n: usize, params: &GaParams) -> Population {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    random_population(n, params.population_size, &mut rng)
}

pub fn run_ga(instance: &Instance, params: &GaParams) -> Result<RunResult> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut pop = random_population(instance.len(), params.population_size, &mut rng);
    let mut solutions = SolutionSet::new();
    let mut history = Vec::with_capacity(params.max_generations);
    let mut first_hit_generation = None;
    let mut generations_executed = 0;

    for generation in 1..=params.max_generations {
        let fits = evaluate_population(&pop, instance)?;
        generations_executed = generation;
        let mut best = 0.0f64;
        for (member, fit) in pop.members().iter().zip(&fits) {
            best = best.max(fit.value);
            if fit.is_solution && solutions.insert(member.clone()) && first_hit_generation.is_none() {
                first_hit_generation = Some(generation);
            }
        }
        history.push(best);
        if (params.stop_on_first && !solutions.is_empty()) || generation == params.max_generations {
            break;
        }
        let selected = roulette_select(&pop, &fits, &mut rng);
        let crossed = crossover(selected, params.crossover_rate, &mut rng);
        pop = mutate(crossed, params.mutation_rate, &mut rng);
    }

    Ok(RunResult {
        solutions,
        generations_executed,
        first_hit_generation,
        best_fitness_history: history,
        params_echo: params.clone(),
    })
}
