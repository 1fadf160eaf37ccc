//! Shared helpers for the integration suites: deterministic random-instance
//! sampling filtered to sizes the brute-force oracle accepts.

use exchange_clear::harness::ORACLE_BUDGET;
use exchange_clear::indexsets::{enumerate_chains, enumerate_cycles};
use exchange_clear::instance::{generate_random, Instance, WeightMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Parameter ranges for sampled instances.
#[derive(Clone)]
pub struct Recipe {
    pub ndds: (usize, usize),
    pub pairs: (usize, usize),
    pub cycle_cap: (usize, usize),
    pub chain_cap: (usize, usize),
    pub unit_weights: bool,
}

impl Recipe {
    pub fn no_ndds(cycle_cap: (usize, usize)) -> Self {
        Recipe {
            ndds: (0, 0),
            pairs: (4, 10),
            cycle_cap,
            chain_cap: (0, 0),
            unit_weights: false,
        }
    }

    pub fn with_ndds(
        ndds: (usize, usize),
        cycle_cap: (usize, usize),
        chain_cap: (usize, usize),
    ) -> Self {
        Recipe {
            ndds,
            pairs: (4, 10),
            cycle_cap,
            chain_cap,
            unit_weights: false,
        }
    }
}

fn pick(rng: &mut ChaCha12Rng, range: (usize, usize)) -> usize {
    rng.random_range(range.0..=range.1)
}

/// Draws one instance from the recipe for a given seed.
pub fn draw(recipe: &Recipe, seed: u64) -> Instance<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let ndds = pick(&mut rng, recipe.ndds);
    let pairs = pick(&mut rng, recipe.pairs);
    let density = rng.random_range(0.08..0.28);
    let cycle_cap = pick(&mut rng, recipe.cycle_cap);
    let chain_cap = pick(&mut rng, recipe.chain_cap);
    let mode = if recipe.unit_weights || rng.random_bool(0.5) {
        WeightMode::Unit
    } else {
        WeightMode::UniformInt { lo: 1, hi: 5 }
    };
    generate_random(ndds, pairs, density, mode, cycle_cap, chain_cap, seed)
}

/// Whether the instance fits the subset-search oracle budget.
pub fn oracle_eligible(instance: &Instance<f64>) -> bool {
    let cycles = enumerate_cycles(instance).len();
    if cycles > ORACLE_BUDGET {
        return false;
    }
    cycles + enumerate_chains(instance).len() <= ORACLE_BUDGET
}

/// The first `count` oracle-eligible instances drawn from consecutive seeds.
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
