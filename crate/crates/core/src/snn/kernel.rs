//! Synaptic and refractory filter kernels for the spike response model.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Shape of the synaptic filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// Single decaying exponential, `exp(-(t-1)/tau_mem)` for `t = 1..horizon`.
    FirstOrder,
    /// Difference of exponentials, `exp(-t/tau_mem) - exp(-t/tau_syn)`.
    SecondOrder,
}

impl KernelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelKind::FirstOrder => "first-order",
            KernelKind::SecondOrder => "second-order",
        }
    }
}

impl std::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first-order" => Ok(KernelKind::FirstOrder),
            "second-order" => Ok(KernelKind::SecondOrder),
            other => Err(Error::invalid(format!("unknown kernel kind `{other}`"))),
        }
    }
}

/// Truncated filter pair applied to incoming spikes (synaptic) and to a
/// neuron's own spikes (refractory). Time constants are in units of
/// simulation steps; the kernel is cut off after `horizon` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterKernel<T> {
    kind: KernelKind,
    tau_mem: T,
    tau_syn: T,
    tau_ref: T,
    horizon: usize,
}

impl<T: Scalar> FilterKernel<T> {
    pub fn new(kind: KernelKind, tau_mem: T, tau_syn: T, tau_ref: T, horizon: usize) -> Result<Self> {
        for (name, tau) in [("tau_mem", tau_mem), ("tau_syn", tau_syn), ("tau_ref", tau_ref)] {
            if !tau.is_finite() || tau <= T::zero() {
                return Err(Error::invalid(format!("{name} must be a positive finite number")));
            }
        }
        if horizon == 0 {
            return Err(Error::invalid("kernel horizon must be at least 1"));
        }
        Ok(FilterKernel {
            kind,
            tau_mem,
            tau_syn,
            tau_ref,
            horizon,
        })
    }

    /// First-order kernel; `tau_syn` is unused by this shape.
    pub fn first_order(tau_mem: T, tau_ref: T, horizon: usize) -> Result<Self> {
        Self::new(KernelKind::FirstOrder, tau_mem, tau_mem, tau_ref, horizon)
    }

    pub fn second_order(tau_mem: T, tau_syn: T, tau_ref: T, horizon: usize) -> Result<Self> {
        Self::new(KernelKind::SecondOrder, tau_mem, tau_syn, tau_ref, horizon)
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn tau_mem(&self) -> T {
        self.tau_mem
    }

    pub fn tau_syn(&self) -> T {
        self.tau_syn
    }

    pub fn tau_ref(&self) -> T {
        self.tau_ref
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Synaptic taps `alpha_1..alpha_h`. Index `i` holds the response `i`
    /// steps after (and including) the spike step, so `taps[0]` multiplies a
    /// spike arriving at the current step.
    pub fn synaptic_taps(&self) -> Vec<T> {
        (1..=self.horizon)
            .map(|t| {
                let tf = lit_step::<T>(t);
                match self.kind {
                    KernelKind::FirstOrder => (-(tf - T::one()) / self.tau_mem).exp(),
                    KernelKind::SecondOrder => {
                        (-tf / self.tau_mem).exp() - (-tf / self.tau_syn).exp()
                    }
                }
            })
            .collect()
    }

    /// Refractory taps `beta_1..beta_h` with a soft-reset gain of
    /// `-threshold`. `taps[0]` multiplies the neuron's own spike from the
    /// previous step.
    pub fn refractory_taps(&self, threshold: T) -> Vec<T> {
        (1..=self.horizon)
            .map(|t| {
                let tf = lit_step::<T>(t);
                -threshold * (-(tf - T::one()) / self.tau_ref).exp()
            })
            .collect()
    }
}

#[inline]
fn lit_step<T: Scalar>(t: usize) -> T {
    T::from_usize(t).expect("step index representable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn first_order_taps_match_closed_form() {
        let tau = 1.0 / std::f64::consts::LN_2; // exp(-1/tau) = 0.5
        let kernel = FilterKernel::first_order(tau, 1.0, 5).unwrap();
        let taps = kernel.synaptic_taps();
        let expected = [1.0, 0.5, 0.25, 0.125, 0.0625];
        for (tap, want) in taps.iter().zip(expected) {
            assert_relative_eq!(*tap, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn second_order_taps_match_closed_form() {
        let kernel = FilterKernel::second_order(10.0_f64, 2.0, 1.0, 4).unwrap();
        let taps = kernel.synaptic_taps();
        for (i, tap) in taps.iter().enumerate() {
            let t = (i + 1) as f64;
            let want = (-t / 10.0).exp() - (-t / 2.0).exp();
            assert_relative_eq!(*tap, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn refractory_taps_are_negative_soft_reset() {
        let kernel = FilterKernel::first_order(10.0_f64, 1.0, 3).unwrap();
        let taps = kernel.refractory_taps(1.0);
        assert_relative_eq!(taps[0], -1.0, max_relative = 1e-15);
        assert_relative_eq!(taps[1], -(-1.0_f64).exp(), max_relative = 1e-12);
        assert_relative_eq!(taps[2], -(-2.0_f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn taps_decay_beyond_peak() {
        for kernel in [
            FilterKernel::first_order(7.5_f64, 0.0195, 64).unwrap(),
            FilterKernel::second_order(10.0, 3.0, 1.0, 64).unwrap(),
        ] {
            let taps = kernel.synaptic_taps();
            let peak = taps
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            for w in taps[peak..].windows(2) {
                assert!(w[1].abs() <= w[0].abs() + 1e-15);
                assert!(w[0].is_finite() && w[1].is_finite());
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FilterKernel::first_order(0.0_f64, 1.0, 4).is_err());
        assert!(FilterKernel::first_order(1.0_f64, -2.0, 4).is_err());
        assert!(FilterKernel::first_order(1.0_f64, 1.0, 0).is_err());
        assert!(FilterKernel::second_order(f64::NAN, 1.0, 1.0, 4).is_err());
    }
}
