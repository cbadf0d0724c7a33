use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::chain::{resolve, LiveState, Resolution};
use super::model::{ModelError, Outcome, OutcomeModel};

/// Plate appearances allowed per half-inning before the generator stops a
/// model that rarely or never records outs.
pub const PA_CAP: usize = 50;

/// Samples outcomes under a model, with the double play only where it can
/// happen.
#[derive(Debug, Clone)]
pub struct OutcomeSampler {
    with_gdp: WeightedIndex<f64>,
    without_gdp: WeightedIndex<f64>,
}

impl OutcomeSampler {
    pub fn new(model: &OutcomeModel) -> Result<Self, ModelError> {
        model.validate()?;
        let weights = |first, outs| model.effective(first, outs).map(|(_, p)| p);
        let build = |w: [f64; 8]| WeightedIndex::new(w).map_err(|e| ModelError::InvalidModel(e.to_string()));
        Ok(OutcomeSampler { with_gdp: build(weights(true, 0))?, without_gdp: build(weights(false, 0))? })
    }

    pub fn sample<R: Rng + ?Sized>(&self, state: LiveState, rng: &mut R) -> Outcome {
        let dist = if state.occupied(1) && state.outs < 2 { &self.with_gdp } else { &self.without_gdp };
        Outcome::ALL[dist.sample(rng)]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulatedPa {
    pub before: LiveState,
    pub runs_before: u32,
    pub outcome: Outcome,
    pub resolution: Resolution,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulatedHalfInning {
    pub pas: Vec<SimulatedPa>,
    pub runs: u32,
    /// Set when [`PA_CAP`] stopped the half-inning before three outs.
    pub capped: bool,
}

impl SimulatedHalfInning {
    pub fn diagnostic(&self) -> Option<String> {
        self.capped.then(|| format!("half-inning stopped at {PA_CAP} plate appearances without three outs"))
    }
}

pub fn simulate_half_inning(model: &OutcomeModel, seed: u64) -> Result<SimulatedHalfInning, ModelError> {
    let sampler = OutcomeSampler::new(model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(simulate_from(model, &sampler, LiveState::START, &mut rng))
}

pub fn simulate_from<R: Rng + ?Sized>(
    model: &OutcomeModel,
    sampler: &OutcomeSampler,
    start: LiveState,
    rng: &mut R,
) -> SimulatedHalfInning {
    let mut state = start;
    let mut runs = 0u32;
    let mut pas = Vec::new();
    loop {
        if pas.len() >= PA_CAP {
            return SimulatedHalfInning { pas, runs, capped: true };
        }
        let outcome = sampler.sample(state, rng);
        let resolution = resolve(model, state, outcome);
        let next = resolution.next;
        let scored = u32::from(resolution.runs);
        pas.push(SimulatedPa { before: state, runs_before: runs, outcome, resolution });
        runs += scored;
        match next {
            Some(n) => state = n,
            None => return SimulatedHalfInning { pas, runs, capped: false },
        }
    }
}
