//! Componentwise adaptation for random scan Metropolis-within-Gibbs: proposal
//! variances from running sample variances (HST) or from batch acceptance
//! rates (RR), selection weights proportional to `(σ²_i a_i²)^{1/2}`, and a
//! monitor for diminishing adaptation.

use std::io::Write;

use crate::error::{Error, Result};
use crate::samplers::{Adaptation, History};
use crate::weights::{make_selection_weights, SelectionWeights};

pub const BATCH_SIZE: usize = 50;
pub const DEFAULT_CLAMP: f64 = 10.0;
pub const TARGET_ACCEPTANCE: f64 = 0.44;
/// `(2.4)²`.
pub const HST_FACTOR: f64 = 5.76;
pub const HST_OFFSET: f64 = 0.05;

/// Single-pass mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningMoments {
    count: usize,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; 0 with fewer than two observations.
    pub fn sample_variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Hst,
    Rr,
}

/// Adaptation bookkeeping for one run.
#[derive(Debug, Clone)]
pub struct AdaptState {
    pub moments: Vec<RunningMoments>,
    pub log_scales: Vec<f64>,
    pub batch_proposals: Vec<usize>,
    pub batch_acceptances: Vec<usize>,
    /// Completed batches per coordinate.
    pub batches: Vec<usize>,
    pub batch_size: usize,
    pub clamp: f64,
    pub weights: SelectionWeights,
    pub proposal_variances: Vec<f64>,
}

impl AdaptState {
    /// Starts with `ls_i = log γ0_i` (clamped) and `weights`.
    pub fn new(weights: SelectionWeights, gamma0: &[f64], clamp: f64) -> Result<Self> {
        let d = weights.dim();
        if gamma0.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: gamma0.len(),
            });
        }
        if gamma0.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
            return Err(Error::InvalidArgument("proposal variances must be positive".into()));
        }
        if !(clamp > 0.0) {
            return Err(Error::InvalidArgument("clamp bound must be positive".into()));
        }
        Ok(Self {
            moments: vec![RunningMoments::default(); d],
            log_scales: gamma0.iter().map(|g| g.ln().clamp(-clamp, clamp)).collect(),
            batch_proposals: vec![0; d],
            batch_acceptances: vec![0; d],
            batches: vec![0; d],
            batch_size: BATCH_SIZE,
            clamp,
            weights,
            proposal_variances: gamma0.to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.weights.dim()
    }

    /// Records one proposal for coordinate `i`; true when its batch is full.
    pub fn record_proposal(&mut self, i: usize, accepted: bool) -> bool {
        self.batch_proposals[i] += 1;
        self.batch_acceptances[i] += usize::from(accepted);
        self.batch_proposals[i] >= self.batch_size
    }
}

/// `5.76 (s²_i + 0.05)`.
pub fn hst_variance(state: &AdaptState, i: usize) -> f64 {
    HST_FACTOR * (state.moments[i].sample_variance() + HST_OFFSET)
}

/// `δ(b) = min(0.1, b^{-1/2})`.
pub fn rr_step(b: usize) -> f64 {
    (1.0 / (b.max(1) as f64).sqrt()).min(0.1)
}

/// Closes batch `b` of coordinate `i`: `ls_i ± δ(b)` depending on whether the
/// acceptance fraction exceeded 0.44, clamped to `[−M, M]`. Updates the
/// proposal variance to `e^{ls_i}` and returns the new `ls_i`.
pub fn rr_scale_update(state: &mut AdaptState, i: usize, b: usize) -> Result<f64> {
    let count = state.batch_proposals[i];
    if count != state.batch_size {
        return Err(Error::OffBatchBoundary {
            coordinate: i,
            count,
            size: state.batch_size,
        });
    }
    let fraction = state.batch_acceptances[i] as f64 / count as f64;
    let step = rr_step(b);
    let ls = if fraction > TARGET_ACCEPTANCE {
        state.log_scales[i] + step
    } else {
        state.log_scales[i] - step
    };
    let ls = ls.clamp(-state.clamp, state.clamp);
    state.log_scales[i] = ls;
    state.proposal_variances[i] = ls.exp();
    state.batch_proposals[i] = 0;
    state.batch_acceptances[i] = 0;
    state.batches[i] = b;
    Ok(ls)
}

/// `α_i ∝ (σ²_i a_i²)^{1/2}` with the variant's `σ²`, projected onto Y.
pub fn weight_update(state: &AdaptState, variant: Variant, a: &[f64], epsilon: f64) -> Result<SelectionWeights> {
    if a.len() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            got: a.len(),
        });
    }
    let raw: Vec<f64> = (0..state.dim())
        .map(|i| {
            let v = match variant {
                Variant::Hst => hst_variance(state, i),
                Variant::Rr => state.log_scales[i].exp(),
            };
            (v * a[i] * a[i]).sqrt()
        })
        .collect();
    make_selection_weights(&raw, epsilon)
}

/// HST or RR adaptation of both proposal variances and selection weights,
/// plugged into the Metropolis-within-Gibbs sampler.
///
/// Before step `n`: HST records `X_{n−1}` (all coordinates) unless `n − 1` is
/// inside the burn-in and refreshes every proposal variance; RR counts the
/// outcome of step `n − 1` and closes a batch when the coordinate's counter
/// reaches 50. Weights are recomputed when `n − 1` is a positive multiple of
/// 50. After `freeze_at` steps nothing changes any more.
#[derive(Debug, Clone)]
pub struct ComponentwiseAdapter {
    pub state: AdaptState,
    pub variant: Variant,
    pub a: Vec<f64>,
    pub epsilon: f64,
    /// Observations `X_0, ..., X_{burn_in − 1}` are left out of the HST
    /// variances.
    pub burn_in: usize,
    pub weight_interval: usize,
    pub freeze_at: Option<usize>,
    /// Acceptance fraction of every completed batch, per coordinate.
    pub batch_fractions: Vec<Vec<f64>>,
    /// `(n, α_n)` at every weight update.
    pub weight_history: Vec<(usize, Vec<f64>)>,
    gamma_dirty: bool,
}

impl ComponentwiseAdapter {
    pub fn new(variant: Variant, a: Vec<f64>, alpha0: SelectionWeights, gamma0: &[f64]) -> Result<Self> {
        let epsilon = alpha0.epsilon();
        if a.len() != alpha0.dim() {
            return Err(Error::DimensionMismatch {
                expected: alpha0.dim(),
                got: a.len(),
            });
        }
        let d = a.len();
        let state = AdaptState::new(alpha0, gamma0, DEFAULT_CLAMP)?;
        Ok(Self {
            state,
            variant,
            a,
            epsilon,
            burn_in: 0,
            weight_interval: BATCH_SIZE,
            freeze_at: None,
            batch_fractions: vec![Vec::new(); d],
            weight_history: Vec::new(),
            gamma_dirty: false,
        })
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_freeze_at(mut self, n: usize) -> Self {
        self.freeze_at = Some(n);
        self
    }

    pub fn with_clamp(mut self, m: f64) -> Self {
        self.state.clamp = m;
        for ls in &mut self.state.log_scales {
            *ls = ls.clamp(-m, m);
        }
        self
    }

    fn frozen(&self, n: usize) -> bool {
        self.freeze_at.is_some_and(|f| n > f)
    }

    /// Mean acceptance fraction of coordinate `i` over its last `k` batches.
    pub fn recent_acceptance(&self, i: usize, k: usize) -> Option<f64> {
        let f = &self.batch_fractions[i];
        if f.is_empty() {
            return None;
        }
        let tail = &f[f.len().saturating_sub(k)..];
        Some(tail.iter().sum::<f64>() / tail.len() as f64)
    }
}

impl Adaptation for ComponentwiseAdapter {
    fn weights(&mut self, h: &History<'_>) -> Result<Option<Vec<f64>>> {
        if self.frozen(h.n) {
            return Ok(None);
        }
        let prev = h.n - 1;
        match self.variant {
            Variant::Hst => {
                if prev >= self.burn_in {
                    for (m, x) in self.state.moments.iter_mut().zip(h.state) {
                        m.push(*x);
                    }
                }
                for i in 0..self.state.dim() {
                    self.state.proposal_variances[i] = hst_variance(&self.state, i);
                }
                self.gamma_dirty = true;
            }
            Variant::Rr => {
                if let (Some(i), Some(acc)) = (h.last_coordinate, h.last_accepted) {
                    if self.state.record_proposal(i, acc) {
                        let fraction = self.state.batch_acceptances[i] as f64 / self.state.batch_size as f64;
                        let b = self.state.batches[i] + 1;
                        rr_scale_update(&mut self.state, i, b)?;
                        self.batch_fractions[i].push(fraction);
                        self.gamma_dirty = true;
                    }
                }
            }
        }
        if prev > 0 && prev.is_multiple_of(self.weight_interval) {
            let w = weight_update(&self.state, self.variant, &self.a, self.epsilon)?;
            self.state.weights = w.clone();
            self.weight_history.push((h.n, w.as_slice().to_vec()));
            return Ok(Some(w.into_vec()));
        }
        Ok(None)
    }

    fn gamma(&mut self, h: &History<'_>) -> Result<Option<Vec<f64>>> {
        if self.frozen(h.n) || !self.gamma_dirty {
            return Ok(None);
        }
        self.gamma_dirty = false;
        Ok(Some(self.state.proposal_variances.clone()))
    }
}

/// Output of [`diminishing_monitor`].
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorReport {
    /// `max_i |α_{n,i} − α_{n−1,i}|` for `n = 1, ...`.
    pub weight_gap: Vec<f64>,
    /// `max_{m ≥ n} weight_gap[m]`.
    pub tail_max: Vec<f64>,
    /// `sup_x ‖P_n(x,·) − P_{n−1}(x,·)‖_TV` when supplied.
    pub kernel_gap: Option<Vec<f64>>,
    /// Set when the largest gap in the final window is not below the largest
    /// gap in the first window (and is nonzero).
    pub non_diminishing: bool,
}

impl MonitorReport {
    /// CSV `n, weight_gap, kernel_gap`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "weight_gap", "kernel_gap"])?;
        for (k, g) in self.weight_gap.iter().enumerate() {
            let kg = self
                .kernel_gap
                .as_ref()
                .and_then(|v| v.get(k))
                .map(|v| v.to_string())
                .unwrap_or_default();
            w.write_record([(k + 1).to_string(), g.to_string(), kg])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Folds a weight history into successive sup-norm gaps and tail maxima.
/// `window` sets the size of the first and last windows compared for the
/// flag.
pub fn diminishing_monitor(
    weight_history: &[Vec<f64>],
    kernel_gaps: Option<&[f64]>,
    window: usize,
) -> Result<MonitorReport> {
    let gaps: Vec<f64> = weight_history
        .windows(2)
        .map(|w| {
            w[0].iter()
                .zip(&w[1])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    if let Some(k) = kernel_gaps {
        if k.len() != gaps.len() {
            return Err(Error::DimensionMismatch {
                expected: gaps.len(),
                got: k.len(),
            });
        }
    }
    let mut tail_max = gaps.clone();
    for k in (0..tail_max.len().saturating_sub(1)).rev() {
        tail_max[k] = tail_max[k].max(tail_max[k + 1]);
    }
    let w = window.max(1).min(gaps.len().max(1));
    let first = gaps.iter().take(w).copied().fold(0.0, f64::max);
    let last = gaps.iter().rev().take(w).copied().fold(0.0, f64::max);
    Ok(MonitorReport {
        weight_gap: gaps,
        tail_max,
        kernel_gap: kernel_gaps.map(<[f64]>::to_vec),
        non_diminishing: last > 0.0 && last >= first,
    })
}
