//! Network parameters, per-run state, and the single-step membrane update.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use crate::snn::kernel::FilterKernel;

/// A real-valued input time series of shape `steps x channels`, stored
/// row-major. Entries must be finite.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSequence<T> {
    values: Vec<T>,
    steps: usize,
    channels: usize,
}

impl<T: Scalar> InputSequence<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let steps = rows.len();
        if steps == 0 {
            return Err(Error::shape("input sequence must have at least one step"));
        }
        let channels = rows[0].len();
        let mut values = Vec::with_capacity(steps * channels);
        for (t, row) in rows.iter().enumerate() {
            if row.len() != channels {
                return Err(Error::shape(format!(
                    "row {t} has {} channels, expected {channels}",
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("input entry at step {t}, channel {j}")));
                }
                values.push(*v);
            }
        }
        Ok(InputSequence {
            values,
            steps,
            channels,
        })
    }

    /// 0-based step access; step `t` of the paper's 1-based time axis is
    /// `row(t - 1)`.
    pub fn row(&self, step: usize) -> &[T] {
        let start = step * self.channels;
        &self.values[start..start + self.channels]
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn channels(&self) -> usize {
        self.channels
    }
}

/// Fully-connected weights of one layer, `post x pre`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams<T> {
    weights: Vec<T>,
    post: usize,
    pre: usize,
}

impl<T: Scalar> LayerParams<T> {
    pub fn new(weights: Vec<T>, post: usize, pre: usize) -> Result<Self> {
        if post == 0 || pre == 0 {
            return Err(Error::shape("layer dimensions must be positive"));
        }
        if weights.len() != post * pre {
            return Err(Error::shape(format!(
                "weight vector has {} entries, expected {post} x {pre}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("layer weight".into()));
        }
        Ok(LayerParams { weights, post, pre })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let post = rows.len();
        let pre = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut weights = Vec::with_capacity(post * pre);
        for row in &rows {
            if row.len() != pre {
                return Err(Error::shape("ragged weight rows"));
            }
            weights.extend_from_slice(row);
        }
        Self::new(weights, post, pre)
    }

    /// Weights of post-synaptic neuron `k`.
    pub fn row(&self, k: usize) -> &[T] {
        &self.weights[k * self.pre..(k + 1) * self.pre]
    }

    pub fn row_mut(&mut self, k: usize) -> &mut [T] {
        &mut self.weights[k * self.pre..(k + 1) * self.pre]
    }

    pub fn post(&self) -> usize {
        self.post
    }

    pub fn pre(&self) -> usize {
        self.pre
    }

    pub fn fan_in(&self) -> usize {
        self.pre
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

/// Immutable description of a layered SRM network: weights, firing threshold,
/// filter kernel, and the nominal sequence length `T`.
///
/// Kernel taps are precomputed at construction so per-step work is pure
/// arithmetic. `NetworkParams` is cheap to share across threads; all mutable
/// simulation state lives in [`NetworkState`].
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams<T> {
    layers: Vec<LayerParams<T>>,
    n_input: usize,
    n_classes: usize,
    threshold: T,
    kernel: FilterKernel<T>,
    t_len: usize,
    syn_taps: Vec<T>,
    ref_taps: Vec<T>,
}

impl<T: Scalar> NetworkParams<T> {
    pub fn new(
        layers: Vec<LayerParams<T>>,
        n_input: usize,
        threshold: T,
        kernel: FilterKernel<T>,
        t_len: usize,
    ) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::shape("network needs at least one layer"));
        }
        if t_len == 0 {
            return Err(Error::invalid("sequence length T must be at least 1"));
        }
        if !threshold.is_finite() || threshold <= T::zero() {
            return Err(Error::invalid("firing threshold must be positive"));
        }
        let mut expected_pre = n_input;
        for (i, layer) in layers.iter().enumerate() {
            if layer.pre() != expected_pre {
                return Err(Error::shape(format!(
                    "layer {i} expects {} inputs, previous width is {expected_pre}",
                    layer.pre()
                )));
            }
            expected_pre = layer.post();
        }
        let n_classes = layers.last().unwrap().post();
        let syn_taps = kernel.synaptic_taps();
        let ref_taps = kernel.refractory_taps(threshold);
        Ok(NetworkParams {
            layers,
            n_input,
            n_classes,
            threshold,
            kernel,
            t_len,
            syn_taps,
            ref_taps,
        })
    }

    /// Seeded uniform initialization. Per layer the half-width is scaled so a
    /// neuron driven by typical filtered activity sits near its threshold:
    /// `a = sqrt(3) * threshold / (sqrt(fan_in) * 0.5 * sum |alpha|)`.
    pub fn random(
        n_input: usize,
        hidden: &[usize],
        n_classes: usize,
        threshold: T,
        kernel: FilterKernel<T>,
        t_len: usize,
        seed: u64,
    ) -> Result<Self> {
        let syn_mass: T = kernel.synaptic_taps().iter().map(|a| a.abs()).sum();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::with_capacity(hidden.len() + 1);
        let mut pre = n_input;
        let widths = hidden.iter().copied().chain(std::iter::once(n_classes));
        for post in widths {
            let fan = lit::<T>(pre as f64).sqrt();
            let half = lit::<T>(3.0_f64.sqrt()) * threshold / (fan * lit::<T>(0.5) * syn_mass);
            let weights = (0..post * pre)
                .map(|_| lit::<T>(rng.gen_range(-1.0..1.0)) * half)
                .collect();
            layers.push(LayerParams::new(weights, post, pre)?);
            pre = post;
        }
        Self::new(layers, n_input, threshold, kernel, t_len)
    }

    pub fn layers(&self) -> &[LayerParams<T>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [LayerParams<T>] {
        &mut self.layers
    }

    pub fn n_input(&self) -> usize {
        self.n_input
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn threshold(&self) -> T {
        self.threshold
    }

    pub fn kernel(&self) -> &FilterKernel<T> {
        &self.kernel
    }

    pub fn t_len(&self) -> usize {
        self.t_len
    }

    /// Number of neurons in all layers except the readout layer.
    pub fn hidden_neuron_count(&self) -> usize {
        self.layers[..self.layers.len() - 1]
            .iter()
            .map(|l| l.post())
            .sum()
    }

    pub(crate) fn syn_taps(&self) -> &[T] {
        &self.syn_taps
    }

    pub(crate) fn ref_taps(&self) -> &[T] {
        &self.ref_taps
    }
}

/// Fixed-depth ring buffer holding the last `horizon` values per channel.
/// Lag 0 is the most recent push; entries older than the horizon are dropped,
/// which makes kernel truncation exact.
#[derive(Debug, Clone)]
pub(crate) struct History<T> {
    data: Vec<T>,
    channels: usize,
    horizon: usize,
    cursor: usize,
}

impl<T: Scalar> History<T> {
    fn new(channels: usize, horizon: usize) -> Self {
        History {
            data: vec![T::zero(); channels * horizon],
            channels,
            horizon,
            cursor: 0,
        }
    }

    fn clear(&mut self) {
        self.data.fill(T::zero());
        self.cursor = 0;
    }

    /// Push one value per channel; the pushed values become lag 0.
    fn push(&mut self, values: &[T]) {
        debug_assert_eq!(values.len(), self.channels);
        self.cursor = (self.cursor + 1) % self.horizon;
        let base = self.cursor * self.channels;
        self.data[base..base + self.channels].copy_from_slice(values);
    }

    #[inline]
    fn get(&self, channel: usize, lag: usize) -> T {
        debug_assert!(lag < self.horizon);
        let slot = (self.cursor + self.horizon - lag) % self.horizon;
        self.data[slot * self.channels + channel]
    }

    /// Dot product of `taps` with this channel's history, tap `i` at lag `i`.
    #[inline]
    fn convolve(&self, channel: usize, taps: &[T]) -> T {
        let mut acc = T::zero();
        for (i, tap) in taps.iter().enumerate() {
            acc = acc + *tap * self.get(channel, i);
        }
        acc
    }
}

#[derive(Debug, Clone)]
struct LayerState<T> {
    input_hist: History<T>,
    own_hist: History<T>,
    filtered: Vec<T>,
    potentials: Vec<T>,
    spikes: Vec<T>,
}

/// Mutable per-run state: input and own-spike histories for each layer plus
/// the current time. One `NetworkState` serves one inference run at a time.
#[derive(Debug, Clone)]
pub struct NetworkState<T> {
    layers: Vec<LayerState<T>>,
    t: usize,
}

impl<T: Scalar> NetworkState<T> {
    pub fn new(params: &NetworkParams<T>) -> Self {
        let horizon = params.kernel().horizon();
        let layers = params
            .layers()
            .iter()
            .map(|l| LayerState {
                input_hist: History::new(l.pre(), horizon),
                own_hist: History::new(l.post(), horizon),
                filtered: vec![T::zero(); l.pre()],
                potentials: vec![T::zero(); l.post()],
                spikes: vec![T::zero(); l.post()],
            })
            .collect();
        NetworkState { layers, t: 0 }
    }

    /// Zero all histories and rewind to `t = 0`.
    pub fn reset(&mut self) {
        for layer in &mut self.layers {
            layer.input_hist.clear();
            layer.own_hist.clear();
            layer.filtered.fill(T::zero());
            layer.potentials.fill(T::zero());
            layer.spikes.fill(T::zero());
        }
        self.t = 0;
    }

    /// Steps completed so far (the paper's time index `t`).
    pub fn time(&self) -> usize {
        self.t
    }

    /// Membrane potentials of layer `layer` computed at the latest step.
    pub fn potentials(&self, layer: usize) -> &[T] {
        &self.layers[layer].potentials
    }
}

/// Result of a single time step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutput {
    /// Readout-layer spikes for this step, one flag per class.
    pub output_spikes: Vec<bool>,
    /// Spikes emitted by all non-readout neurons during this step.
    pub hidden_spikes: u32,
}

/// Advance the network by one time step.
///
/// For every neuron the membrane potential is the kernel-filtered weighted
/// sum of its inputs plus the refractory response to its own recent spikes;
/// it fires when the potential reaches the threshold (spike iff `o >= theta`).
pub fn forward_step<T: Scalar>(
    params: &NetworkParams<T>,
    state: &mut NetworkState<T>,
    x_t: &[T],
) -> Result<StepOutput> {
    if state.t >= params.t_len() {
        return Err(Error::invalid(format!(
            "state already advanced to t = {} with T = {}",
            state.t,
            params.t_len()
        )));
    }
    if x_t.len() != params.n_input() {
        return Err(Error::shape(format!(
            "input has {} channels, network expects {}",
            x_t.len(),
            params.n_input()
        )));
    }
    if x_t.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("input sample".into()));
    }

    let syn_taps = params.syn_taps();
    let ref_taps = params.ref_taps();
    let threshold = params.threshold();
    let last = params.layers().len() - 1;

    let mut hidden_spikes = 0u32;
    let mut activity: Vec<T> = x_t.to_vec();
    for (li, layer) in params.layers().iter().enumerate() {
        let ls = &mut state.layers[li];
        ls.input_hist.push(&activity);
        for j in 0..layer.pre() {
            ls.filtered[j] = ls.input_hist.convolve(j, syn_taps);
        }
        for k in 0..layer.post() {
            let mut o = T::zero();
            for (w, f) in layer.row(k).iter().zip(&ls.filtered) {
                o = o + *w * *f;
            }
            // Own spikes are queried before this step's push, so lag 0 is the
            // previous step and lines up with the first refractory tap.
            o = o + ls.own_hist.convolve(k, ref_taps);
            ls.potentials[k] = o;
            ls.spikes[k] = if o >= threshold { T::one() } else { T::zero() };
        }
        ls.own_hist.push(&ls.spikes);
        if li < last {
            hidden_spikes += ls.spikes.iter().filter(|s| **s == T::one()).count() as u32;
        }
        activity.clear();
        activity.extend_from_slice(&ls.spikes);
    }

    state.t += 1;
    Ok(StepOutput {
        output_spikes: activity.iter().map(|s| *s == T::one()).collect(),
        hidden_spikes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snn::kernel::FilterKernel;
    use approx::assert_relative_eq;

    fn single_neuron(threshold: f64, weight: f64) -> NetworkParams<f64> {
        let tau = 1.0 / std::f64::consts::LN_2;
        let kernel = FilterKernel::first_order(tau, 1.0, 16).unwrap();
        let layer = LayerParams::new(vec![weight], 1, 1).unwrap();
        NetworkParams::new(vec![layer], 1, threshold, kernel, 16).unwrap()
    }

    #[test]
    fn impulse_response_matches_hand_convolution() {
        // One pre-synaptic spike at t=1 through w=1 with exp(-1/tau)=0.5 and a
        // threshold high enough to keep the neuron silent.
        let params = single_neuron(10.0, 1.0);
        let mut state = NetworkState::new(&params);
        let expected = [1.0, 0.5, 0.25, 0.125];
        for (i, want) in expected.iter().enumerate() {
            let x = if i == 0 { [1.0] } else { [0.0] };
            let out = forward_step(&params, &mut state, &x).unwrap();
            assert!(!out.output_spikes[0]);
            assert_relative_eq!(state.potentials(0)[0], *want, max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_input_stays_silent() {
        let params = NetworkParams::random(
            3,
            &[4],
            2,
            1.0,
            FilterKernel::first_order(5.0, 1.0, 8).unwrap(),
            10,
            7,
        )
        .unwrap();
        let mut state = NetworkState::new(&params);
        for _ in 0..10 {
            let out = forward_step(&params, &mut state, &[0.0, 0.0, 0.0]).unwrap();
            assert_eq!(out.hidden_spikes, 0);
            assert!(out.output_spikes.iter().all(|s| !s));
            assert!(state.potentials(0).iter().all(|p| *p == 0.0));
            assert!(state.potentials(1).iter().all(|p| *p == 0.0));
        }
    }

    #[test]
    fn refractory_suppresses_following_spike() {
        // Constant drive equal to the threshold: fires at t=1, then the
        // refractory tap subtracts the full threshold at t=2.
        let params = single_neuron(1.0, 1.0);
        let mut state = NetworkState::new(&params);

        let out1 = forward_step(&params, &mut state, &[1.0]).unwrap();
        assert!(out1.output_spikes[0]);
        assert_relative_eq!(state.potentials(0)[0], 1.0, max_relative = 1e-12);

        let out2 = forward_step(&params, &mut state, &[1.0]).unwrap();
        assert!(!out2.output_spikes[0]);
        let half = 0.5; // exp(-1/tau)
        assert_relative_eq!(state.potentials(0)[0], 1.0 + half - 1.0, max_relative = 1e-12);
    }

    #[test]
    fn heaviside_is_closed_at_threshold() {
        let params = single_neuron(1.0, 1.0);
        let mut state = NetworkState::new(&params);
        let out = forward_step(&params, &mut state, &[1.0]).unwrap();
        assert!(out.output_spikes[0], "o == theta must spike");
    }

    #[test]
    fn rejects_bad_input() {
        let params = single_neuron(1.0, 1.0);
        let mut state = NetworkState::new(&params);
        assert!(forward_step(&params, &mut state, &[1.0, 2.0]).is_err());
        assert!(forward_step(&params, &mut state, &[f64::NAN]).is_err());
        for _ in 0..16 {
            forward_step(&params, &mut state, &[0.0]).unwrap();
        }
        assert!(forward_step(&params, &mut state, &[0.0]).is_err());
    }

    #[test]
    fn reset_restores_initial_state() {
        let params = single_neuron(1.0, 1.0);
        let mut state = NetworkState::new(&params);
        forward_step(&params, &mut state, &[1.0]).unwrap();
        forward_step(&params, &mut state, &[1.0]).unwrap();
        state.reset();
        assert_eq!(state.time(), 0);
        let out = forward_step(&params, &mut state, &[1.0]).unwrap();
        assert!(out.output_spikes[0]);
    }

    #[test]
    fn layer_dimension_checks() {
        let kernel = FilterKernel::first_order(5.0_f64, 1.0, 8).unwrap();
        let l1 = LayerParams::new(vec![0.0; 6], 3, 2).unwrap();
        let l2 = LayerParams::new(vec![0.0; 8], 2, 4).unwrap();
        assert!(NetworkParams::new(vec![l1, l2], 2, 1.0, kernel, 10).is_err());
        assert!(LayerParams::new(vec![f64::INFINITY], 1, 1).is_err());
    }
}
