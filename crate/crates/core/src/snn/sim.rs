//! Sequence-level simulation: cumulative rate decoding, softmax confidence,
//! spike-energy accounting, and checkpointed traces.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::snn::network::{forward_step, InputSequence, NetworkParams, NetworkState, StepOutput};

/// Softmax over spike counts in max-subtracted form.
///
/// Returns the predictive probability vector; entries are strictly positive
/// and sum to one up to rounding.
pub fn predictive_probs<T: Scalar>(counts: &[u32]) -> Vec<T> {
    if counts.is_empty() {
        return Vec::new();
    }
    let max = *counts.iter().max().unwrap();
    let exps: Vec<T> = counts
        .iter()
        .map(|c| {
            let d = T::from_u32(*c).unwrap() - T::from_u32(max).unwrap();
            d.exp()
        })
        .collect();
    let total: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Incremental inference run over one input: tracks per-class cumulative
/// spike counts and the hidden-spike energy while stepping the network.
#[derive(Debug, Clone)]
pub struct Simulation<'p, T> {
    params: &'p NetworkParams<T>,
    state: NetworkState<T>,
    counts: Vec<u32>,
    hidden_spikes: u64,
}

impl<'p, T: Scalar> Simulation<'p, T> {
    pub fn new(params: &'p NetworkParams<T>) -> Self {
        Simulation {
            params,
            state: NetworkState::new(params),
            counts: vec![0; params.n_classes()],
            hidden_spikes: 0,
        }
    }

    pub fn step(&mut self, x_t: &[T]) -> Result<StepOutput> {
        let out = forward_step(self.params, &mut self.state, x_t)?;
        for (count, spiked) in self.counts.iter_mut().zip(&out.output_spikes) {
            *count += u32::from(*spiked);
        }
        self.hidden_spikes += u64::from(out.hidden_spikes);
        Ok(out)
    }

    /// Advance through input rows until `time() == until` (1-based step).
    pub fn run_until(&mut self, x: &InputSequence<T>, until: usize) -> Result<()> {
        while self.state.time() < until {
            let t = self.state.time();
            self.step(x.row(t))?;
        }
        Ok(())
    }

    pub fn time(&self) -> usize {
        self.state.time()
    }

    /// Cumulative per-class spike counts `r(x^t)`.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Softmax confidence `p(x^t)` over the current counts.
    pub fn probs(&self) -> Vec<T> {
        predictive_probs(&self.counts)
    }

    /// Cumulative hidden-layer spikes `S(x^t)`.
    pub fn energy(&self) -> u64 {
        self.hidden_spikes
    }
}

/// Spike counts, confidence vectors, and cumulative energy captured at a set
/// of recording times.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace<T> {
    pub recorded_times: Vec<usize>,
    /// One count vector per recorded time.
    pub spike_counts: Vec<Vec<u32>>,
    /// One probability vector per recorded time.
    pub probs: Vec<Vec<T>>,
    /// Cumulative hidden spikes at each recorded time.
    pub hidden_spikes: Vec<u64>,
}

impl<T: Scalar> RunTrace<T> {
    pub fn len(&self) -> usize {
        self.recorded_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.recorded_times.is_empty()
    }

    /// Index of a recorded time, if present.
    pub fn position(&self, time: usize) -> Option<usize> {
        self.recorded_times.iter().position(|t| *t == time)
    }
}

/// Validate a checkpoint list: non-empty, strictly increasing, within `1..=t_len`.
pub(crate) fn validate_checkpoints(checkpoints: &[usize], t_len: usize) -> Result<()> {
    if checkpoints.is_empty() {
        return Err(Error::invalid("checkpoint set must not be empty"));
    }
    for w in checkpoints.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::invalid("checkpoints must be strictly increasing"));
        }
    }
    let first = checkpoints[0];
    let last = *checkpoints.last().unwrap();
    if first == 0 || last > t_len {
        return Err(Error::invalid(format!(
            "checkpoints must lie in 1..={t_len}"
        )));
    }
    Ok(())
}

/// Run the network over `x` and record counts, probabilities, and energy at
/// exactly the requested times. The run stops after the last checkpoint.
pub fn run_to_checkpoints<T: Scalar>(
    params: &NetworkParams<T>,
    x: &InputSequence<T>,
    checkpoints: &[usize],
) -> Result<RunTrace<T>> {
    validate_checkpoints(checkpoints, params.t_len())?;
    if x.channels() != params.n_input() {
        return Err(Error::shape(format!(
            "input has {} channels, network expects {}",
            x.channels(),
            params.n_input()
        )));
    }
    if x.steps() < *checkpoints.last().unwrap() {
        return Err(Error::shape(format!(
            "input has {} steps, last checkpoint is {}",
            x.steps(),
            checkpoints.last().unwrap()
        )));
    }

    let mut sim = Simulation::new(params);
    let mut trace = RunTrace {
        recorded_times: Vec::with_capacity(checkpoints.len()),
        spike_counts: Vec::with_capacity(checkpoints.len()),
        probs: Vec::with_capacity(checkpoints.len()),
        hidden_spikes: Vec::with_capacity(checkpoints.len()),
    };
    for &cp in checkpoints {
        sim.run_until(x, cp)?;
        trace.recorded_times.push(cp);
        trace.spike_counts.push(sim.counts().to_vec());
        trace.probs.push(sim.probs());
        trace.hidden_spikes.push(sim.energy());
    }
    Ok(trace)
}
