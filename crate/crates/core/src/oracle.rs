//! Exhaustive subset enumeration, the ground truth every other solver is
//! checked against.

use crate::error::{Error, Result};
use crate::problem::{Chromosome, Instance, SolutionSet};

/// Default bound on the number of weights the oracle will enumerate.
pub const DEFAULT_ORACLE_LIMIT: usize = 30;

/// Masks are `u64`, so no limit can exceed this.
pub const MAX_ORACLE_LIMIT: usize = 63;

/// All chromosomes whose weighted sum equals the target, in ascending mask
/// order (bit `i` of the mask selects weight `i`).
pub fn brute_force_solve(instance: &Instance) -> Result<SolutionSet> {
    brute_force_solve_with_limit(instance, DEFAULT_ORACLE_LIMIT)
}

pub fn brute_force_solve_with_limit(instance: &Instance, limit: usize) -> Result<SolutionSet> {
    let n = instance.len();
    check_limit(n, limit)?;
    let mut masks = Vec::new();
    enumerate_hits(instance.weights(), instance.target(), |mask| masks.push(mask));
    masks.sort_unstable();
    Ok(masks.into_iter().map(|m| Chromosome::from_mask(m, n)).collect())
}

pub fn count_solutions(instance: &Instance) -> Result<usize> {
    count_solutions_with_limit(instance, DEFAULT_ORACLE_LIMIT)
}

pub fn count_solutions_with_limit(instance: &Instance, limit: usize) -> Result<usize> {
    check_limit(instance.len(), limit)?;
    let mut count = 0;
    enumerate_hits(instance.weights(), instance.target(), |_| count += 1);
    Ok(count)
}

fn check_limit(n: usize, limit: usize) -> Result<()> {
    let limit = limit.min(MAX_ORACLE_LIMIT);
    if n > limit {
        return Err(Error::Capacity { n, limit });
    }
    Ok(())
}

// Walks all 2^n masks in Gray-code order so each step adjusts the running
// sum by a single weight.
fn enumerate_hits(weights: &[u64], target: u128, mut hit: impl FnMut(u64)) {
    let n = weights.len();
    let mut mask = 0u64;
    let mut sum = 0u128;
    if target == 0 {
        hit(0);
    }
    for step in 1..(1u64 << n) {
        let bit = step.trailing_zeros() as usize;
        mask ^= 1 << bit;
        if mask & (1 << bit) != 0 {
            sum += weights[bit] as u128;
        } else {
            sum -= weights[bit] as u128;
        }
        if sum == target {
            hit(mask);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::evaluate;
    use proptest::prelude::*;

    // Independent include/exclude recursion, used to freeze expected values.
    fn recursive_count(weights: &[u64], target: u128) -> usize {
        match weights.split_first() {
            None => usize::from(target == 0),
            Some((&w, rest)) => {
                let skip = recursive_count(rest, target);
                let take = if target >= w as u128 {
                    recursive_count(rest, target - w as u128)
                } else {
                    0
                };
                skip + take
            }
        }
    }

    fn selected(instance: &Instance, c: &Chromosome) -> Vec<u64> {
        instance
            .weights()
            .iter()
            .zip(c.bits())
            .filter(|(_, &b)| b)
            .map(|(&w, _)| w)
            .collect()
    }

    #[test]
    fn set_a1_has_five_solutions() {
        let inst = Instance::new(vec![2, 4, 6, 8, 10, 12], 20).unwrap();
        let sols = brute_force_solve(&inst).unwrap();
        let mut picked: Vec<Vec<u64>> = sols.iter().map(|c| selected(&inst, c)).collect();
        picked.sort();
        assert_eq!(
            picked,
            vec![
                vec![2, 4, 6, 8],
                vec![2, 6, 12],
                vec![2, 8, 10],
                vec![4, 6, 10],
                vec![8, 12],
            ]
        );
    }

    #[test]
    fn unique_solution_instance() {
        let inst = Instance::new(vec![5, 7, 21, 33, 37, 91], 112).unwrap();
        let sols = brute_force_solve(&inst).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(selected(&inst, sols.first().unwrap()), vec![21, 91]);
    }

    #[test]
    fn zero_target_is_only_the_empty_selection() {
        let inst = Instance::new(vec![3, 1, 4, 1, 5], 0).unwrap();
        let sols = brute_force_solve(&inst).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols.first().unwrap(), &Chromosome::zeros(5));
    }

    #[test]
    fn count_examples() {
        let cases: [(&[u64], u128, usize); 3] = [
            (&[1, 3, 5, 7, 9, 11], 20, 3),
            (&[2, 9, 21, 33, 77, 101], 79, 1),
            (&[7, 10, 13, 20, 27, 30], 57, 4),
        ];
        for (w, m, expected) in cases {
            assert_eq!(recursive_count(w, m), expected);
            let inst = Instance::new(w.to_vec(), m).unwrap();
            assert_eq!(count_solutions(&inst).unwrap(), expected);
        }
        let inst = Instance::new(vec![2, 9, 21, 33, 77, 101], 79).unwrap();
        let sols = brute_force_solve(&inst).unwrap();
        assert_eq!(selected(&inst, sols.first().unwrap()), vec![2, 77]);
        let inst = Instance::new(vec![7, 10, 13, 20, 27, 30], 57).unwrap();
        let mut picked: Vec<_> = brute_force_solve(&inst)
            .unwrap()
            .iter()
            .map(|c| selected(&inst, c))
            .collect();
        picked.sort();
        assert_eq!(
            picked,
            vec![vec![7, 10, 13, 27], vec![7, 20, 30], vec![10, 20, 27], vec![27, 30]]
        );
    }

    #[test]
    fn guard_limit() {
        let inst = Instance::new(vec![1; 31], 3).unwrap();
        assert!(matches!(
            count_solutions(&inst),
            Err(Error::Capacity { n: 31, limit: 30 })
        ));
        let small = Instance::new(vec![1; 8], 3).unwrap();
        assert!(brute_force_solve_with_limit(&small, 7).is_err());
        assert_eq!(brute_force_solve_with_limit(&small, 8).unwrap().len(), 56);
    }

    proptest! {
        #[test]
        fn oracle_is_exactly_the_solution_set(
            weights in prop::collection::vec(1u64..40, 1..=12),
            target in 0u128..120,
        ) {
            let inst = Instance::new(weights.clone(), target).unwrap();
            let sols = brute_force_solve(&inst).unwrap();
            let n = weights.len();
            for mask in 0..(1u64 << n) {
                let c = Chromosome::from_mask(mask, n);
                let hits = evaluate(&inst, &c).unwrap() == target;
                prop_assert_eq!(hits, sols.contains(&c));
            }
            prop_assert_eq!(sols.len(), recursive_count(&weights, target));
        }
    }
}
