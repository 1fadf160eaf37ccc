//! Deterministic random-instance sampling for the acceptance suite,
//! filtered to sizes the brute-force oracle accepts.

use exchange_clear::harness::ORACLE_BUDGET;
use exchange_clear::indexsets::{enumerate_chains, enumerate_cycles};
use exchange_clear::instance::{generate_random, Instance, WeightMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

#[derive(Clone)]
pub struct Recipe {
    pub ndds: (usize, usize),
    pub pairs: (usize, usize),
    pub cycle_cap: (usize, usize),
    pub chain_cap: (usize, usize),
}

pub fn draw(recipe: &Recipe, seed: u64) -> Instance<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let ndds = rng.random_range(recipe.ndds.0..=recipe.ndds.1);
    let pairs = rng.random_range(recipe.pairs.0..=recipe.pairs.1);
    let density = rng.random_range(0.08..0.28);
    let cycle_cap = rng.random_range(recipe.cycle_cap.0..=recipe.cycle_cap.1);
    let chain_cap = rng.random_range(recipe.chain_cap.0..=recipe.chain_cap.1);
    let mode = if rng.random_bool(0.5) {
        WeightMode::Unit
    } else {
        WeightMode::UniformInt { lo: 1, hi: 5 }
    };
    generate_random(ndds, pairs, density, mode, cycle_cap, chain_cap, seed)
}

pub fn oracle_eligible(instance: &Instance<f64>) -> bool {
    let cycles = enumerate_cycles(instance).len();
    cycles <= ORACLE_BUDGET && cycles + enumerate_chains(instance).len() <= ORACLE_BUDGET
}

/// First `count` oracle-eligible instances from consecutive seeds.
pub fn sample(recipe: &Recipe, count: usize, base_seed: u64) -> Vec<Instance<f64>> {
    let mut out = Vec::with_capacity(count);
    let mut seed = base_seed;
    while out.len() < count {
        let inst = draw(recipe, seed);
        if oracle_eligible(&inst) {
            out.push(inst);
        }
        seed += 1;
    }
    out
}
