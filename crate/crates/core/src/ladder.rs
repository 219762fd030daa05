//! The ladder counter-example: a target on `{(i,j) : i = j or i = j + 1}`
//! with `π(i,j) ∝ j^{-2}`, whose adaptive random scan Gibbs sampler is
//! transient even though every fixed-weight kernel is ergodic and the
//! weights converge. Also the quantities used to prove it: the `a_n`
//! schedule, one-step laws of `X̃ = i + j − 2`, the dominating walk,
//! Hoeffding tails and the failure-probability budget.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{
    coordinate_update_matrix, tv_slices, DistributionVector, TransitionMatrix,
};
use crate::rng::{derive_seed, rng_from_seed};
use crate::samplers::{Constant, GibbsSampler, GibbsTarget, History, WeightRule};
use crate::target::FiniteProductTarget;
use crate::weights::{make_selection_weights, SelectionWeights};

/// Floor used for the ladder's selection weights. The rule's smaller weight
/// is `1/2 − 4/a_n > 0`, which stays above this for every `a_n ≥ 8.7`.
pub const LADDER_EPSILON: f64 = 0.01;

/// A sequence `8 < a_1 ≤ a_2 ≤ ... → ∞` driving the adaptive rule.
pub trait GrowthSequence: Send + Sync {
    fn a(&self, n: usize) -> Result<f64>;
}

/// `b_1 = 1000`, `b_n = b_{n−1}(1 + 1/(10 + log n))`, `c_n = Σ_{k≤n} b_k`
/// and `a_n = 10 + log k` for `c_{k−1} < n ≤ c_k`, all real-valued.
#[derive(Debug, Clone)]
pub struct Schedule {
    log_b: Vec<f64>,
    c: Vec<f64>,
}

impl Default for Schedule {
    fn default() -> Self {
        Self::new()
    }
}

impl Schedule {
    pub fn new() -> Self {
        Self::covering(0)
    }

    /// Memoizes enough blocks to answer `a(n)` for `n ≤ n_max` by lookup.
    pub fn covering(n_max: usize) -> Self {
        let mut s = Self {
            log_b: vec![1000f64.ln()],
            c: vec![1000.0],
        };
        while *s.c.last().unwrap() < n_max as f64 {
            s.grow();
        }
        s
    }

    /// Extends the memo so that `b_k` is known for `k ≤ k_max`.
    pub fn with_blocks(k_max: usize) -> Self {
        let mut s = Self::new();
        while s.log_b.len() < k_max {
            s.grow();
        }
        s
    }

    fn grow(&mut self) {
        let k = self.log_b.len() + 1;
        let lb = self.log_b.last().unwrap() + (1.0 / (10.0 + (k as f64).ln())).ln_1p();
        self.log_b.push(lb);
        let c = self.c.last().unwrap() + lb.exp();
        self.c.push(c);
    }

    /// `b_k` (1-based).
    pub fn b(&self, k: usize) -> f64 {
        self.log_b[k - 1].exp()
    }

    pub fn log_b(&self, k: usize) -> f64 {
        self.log_b[k - 1]
    }

    /// `c_k` (1-based), with `c_0 = 0`.
    pub fn c(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.c[k - 1]
        }
    }

    pub fn blocks(&self) -> usize {
        self.log_b.len()
    }

    /// The block `k` with `c_{k−1} < n ≤ c_k`.
    pub fn block_of(&self, n: usize) -> Result<usize> {
        if n == 0 {
            return Err(Error::InvalidArgument("schedule index must be at least 1".into()));
        }
        let x = n as f64;
        if x <= *self.c.last().unwrap() {
            return Ok(self.c.partition_point(|c| *c < x) + 1);
        }
        // beyond the memo: continue the recursion without storing
        let mut k = self.log_b.len();
        let mut lb = *self.log_b.last().unwrap();
        let mut c = *self.c.last().unwrap();
        while c < x {
            k += 1;
            lb += (1.0 / (10.0 + (k as f64).ln())).ln_1p();
            c += lb.exp();
        }
        Ok(k)
    }

    pub fn a(&self, n: usize) -> Result<f64> {
        Ok(10.0 + (self.block_of(n)? as f64).ln())
    }
}

impl GrowthSequence for Schedule {
    fn a(&self, n: usize) -> Result<f64> {
        Schedule::a(self, n)
    }
}

/// `a_n` of the default block schedule.
pub fn schedule_a(n: usize) -> Result<f64> {
    Schedule::new().a(n)
}

/// `a_n = a0 + scale · n^power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSequence {
    pub a0: f64,
    pub scale: f64,
    pub power: f64,
}

impl PowerSequence {
    pub fn new(a0: f64, scale: f64, power: f64) -> Result<Self> {
        if !(a0 > 8.0 && scale >= 0.0 && power >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "power sequence needs a0 > 8 and nonnegative scale and power, got ({a0}, {scale}, {power})"
            )));
        }
        Ok(Self { a0, scale, power })
    }
}

impl GrowthSequence for PowerSequence {
    fn a(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidArgument("sequence index must be at least 1".into()));
        }
        Ok(self.a0 + self.scale * (n as f64).powf(self.power))
    }
}

/// A point of the ladder: `i = j` or `i = j + 1`, both positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LadderState {
    pub i: u64,
    pub j: u64,
}

impl LadderState {
    pub fn new(i: u64, j: u64) -> Result<Self> {
        if j >= 1 && (i == j || i == j + 1) {
            Ok(Self { i, j })
        } else {
            Err(Error::OutsideSupport(format!("({i},{j})")))
        }
    }

    pub fn from_values(x: &[f64]) -> Result<Self> {
        if x.len() != 2 || x.iter().any(|v| *v < 1.0 || v.fract() != 0.0) {
            return Err(Error::OutsideSupport(crate::target::state_label(x)));
        }
        Self::new(x[0] as u64, x[1] as u64)
    }

    pub fn on_diagonal(&self) -> bool {
        self.i == self.j
    }

    /// `X̃ = i + j − 2`.
    pub fn tilde(&self) -> u64 {
        self.i + self.j - 2
    }

    pub fn from_tilde(t: u64) -> Self {
        if t % 2 == 0 {
            let i = t / 2 + 1;
            Self { i, j: i }
        } else {
            let i = (t + 3) / 2;
            Self { i, j: i - 1 }
        }
    }

    pub fn values(&self) -> [f64; 2] {
        [self.i as f64, self.j as f64]
    }
}

/// `(1/2 + 4/a, 1/2 − 4/a)` on the diagonal, swapped off it.
pub fn ladder_rule_at(x: LadderState, a: f64) -> [f64; 2] {
    let hi = 0.5 + 4.0 / a;
    let lo = 0.5 - 4.0 / a;
    if x.on_diagonal() {
        [hi, lo]
    } else {
        [lo, hi]
    }
}

/// The adaptive weights `α_n` used at step `n` from state `x = X_{n−1}`.
pub fn ladder_update_rule<G: GrowthSequence + ?Sized>(x: LadderState, n: usize, seq: &G) -> Result<SelectionWeights> {
    let a = seq.a(n)?;
    SelectionWeights::new(ladder_rule_at(x, a).to_vec(), LADDER_EPSILON.min(0.5 - 4.0 / a))
}

/// Two-point full conditionals at `x = (i, j)`: coordinate 1 over
/// `i ∈ {j, j+1}` and coordinate 2 over `j ∈ {i−1, i}`, each as
/// `[(value, probability)]` in ascending order of value, restricted to
/// `i ≤ truncation` when given.
pub fn ladder_conditionals(x: LadderState, truncation: Option<u64>) -> [Vec<(u64, f64)>; 2] {
    let j = x.j;
    let first = if truncation.is_some_and(|m| j + 1 > m) {
        vec![(j, 1.0)]
    } else {
        vec![(j, 0.5), (j + 1, 0.5)]
    };
    let i = x.i as f64;
    let second = if x.i == 1 {
        vec![(1, 1.0)]
    } else {
        let z = i * i + (i - 1.0) * (i - 1.0);
        vec![(x.i - 1, i * i / z), (x.i, (i - 1.0) * (i - 1.0) / z)]
    };
    [first, second]
}

/// Law of `X̃_n − X̃_{n−1}` on `{−1, 0, +1}` given `X_{n−1} = x` and `a_n = a`.
/// At `(1,1)` the down move does not exist and its mass stays put.
pub fn ladder_step_law_at(x: LadderState, a: f64) -> [f64; 3] {
    ladder_step_law_truncated(x, a, None)
}

fn ladder_step_law_truncated(x: LadderState, a: f64, truncation: Option<u64>) -> [f64; 3] {
    let alpha = ladder_rule_at(x, a);
    let [c1, c2] = ladder_conditionals(x, truncation);
    let mut law = [0.0; 3];
    // coordinate 1 changes i, coordinate 2 changes j; either moves X̃ by ±1
    for (value, p) in c1 {
        let d = value as i64 - x.i as i64;
        law[(d + 1) as usize] += alpha[0] * p;
    }
    for (value, p) in c2 {
        let d = value as i64 - x.j as i64;
        law[(d + 1) as usize] += alpha[1] * p;
    }
    law
}

pub fn ladder_step_law<G: GrowthSequence + ?Sized>(x: LadderState, n: usize, seq: &G) -> Result<[f64; 3]> {
    Ok(ladder_step_law_at(x, seq.a(n)?))
}

/// `ν = (1/4 − 1/a, 1/2, 1/4 + 1/a)`, mean `2/a`.
pub fn dominating_walk_law_at(a: f64) -> [f64; 3] {
    [0.25 - 1.0 / a, 0.5, 0.25 + 1.0 / a]
}

pub fn dominating_walk_law<G: GrowthSequence + ?Sized>(n: usize, seq: &G) -> Result<[f64; 3]> {
    Ok(dominating_walk_law_at(seq.a(n)?))
}

/// The common lower law `μ^i` of both one-step laws at level `i`.
pub fn intermediate_law_at(i: u64, a: f64) -> [f64; 3] {
    let i = i as f64;
    let m = i.max(4.0);
    let down = (0.25 - 2.0 / a) * (1.0 + 2.0 / i);
    let up = (0.25 + 2.0 / a) * (1.0 - 2.0 / m);
    [down, 1.0 - down - up, up]
}

/// `p ≥_st q` for laws on `{−1, 0, +1}`: the CDF of `p` lies below that of
/// `q`, up to `tol`.
pub fn stochastically_dominates(p: &[f64; 3], q: &[f64; 3], tol: f64) -> bool {
    p[0] <= q[0] + tol && p[0] + p[1] <= q[0] + q[1] + tol
}

/// Tolerance for CDF comparisons, so that exact boundary cases such as
/// `2i − 8 = a_n` are decided as equalities.
pub const DOMINANCE_TOL: f64 = 1e-12;

/// Whether `μ^i ≥_st ν` at `a_n = a`, by CDF comparison.
pub fn dominance_holds_at(i: u64, a: f64) -> bool {
    stochastically_dominates(&intermediate_law_at(i, a), &dominating_walk_law_at(a), DOMINANCE_TOL)
}

pub fn dominance_holds<G: GrowthSequence + ?Sized>(i: u64, n: usize, seq: &G) -> Result<bool> {
    Ok(dominance_holds_at(i, seq.a(n)?))
}

/// `exp(−n t²/2)`: bound on `P(S − ES ≤ −n t)` for a sum of `n` independent
/// increments in `[−1, 1]`.
pub fn hoeffding_tail(n_terms: usize, t: f64) -> f64 {
    (-(n_terms as f64) * t * t / 2.0).exp()
}

/// `log p_n = −(1/2) b_n / (10 + log n)²`.
pub fn log_failure_probability(schedule: &Schedule, n: usize) -> f64 {
    let d = 10.0 + (n as f64).ln();
    -0.5 * (schedule.log_b(n) - 2.0 * d.ln()).exp()
}

#[derive(Debug, Clone)]
pub struct FailureBudget {
    /// `p_1, ..., p_{n_max}`.
    pub p: Vec<f64>,
    /// `log p_1, ..., log p_{n_max}`, usable where `p_n` underflows.
    pub log_p: Vec<f64>,
    /// `Π_{n=2}^{n_max} (1 − p_n)`.
    pub product_from_2: f64,
}

pub fn failure_probability_budget(n_max: usize) -> Result<FailureBudget> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let s = Schedule::with_blocks(n_max);
    let log_p: Vec<f64> = (1..=n_max).map(|n| log_failure_probability(&s, n)).collect();
    let p: Vec<f64> = log_p.iter().map(|l| l.exp()).collect();
    let log_prod: f64 = p.iter().skip(1).map(|x| (-x).ln_1p()).sum();
    Ok(FailureBudget {
        p,
        log_p,
        product_from_2: log_prod.exp(),
    })
}

/// The ladder target, optionally truncated to `i ≤ M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LadderTarget {
    pub truncation: Option<u64>,
}

impl LadderTarget {
    pub fn unbounded() -> Self {
        Self { truncation: None }
    }

    pub fn truncated(m: u64) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidArgument("truncation must be at least 1".into()));
        }
        Ok(Self { truncation: Some(m) })
    }

    pub fn admits(&self, x: LadderState) -> bool {
        self.truncation.is_none_or(|m| x.i <= m)
    }

    /// Finite enumeration of the truncated ladder.
    pub fn finite(&self) -> Result<FiniteProductTarget> {
        let m = self
            .truncation
            .ok_or_else(|| Error::InvalidArgument("the unbounded ladder is not finite".into()))?;
        let levels: Vec<f64> = (1..=m).map(|v| v as f64).collect();
        FiniteProductTarget::new(
            vec![levels.clone(), levels],
            |x: &[f64]| x[1].powi(-2),
            Some(|x: &[f64]| x[0] == x[1] || x[0] == x[1] + 1.0),
        )
    }
}

impl GibbsTarget for LadderTarget {
    fn dim(&self) -> usize {
        2
    }

    fn in_support(&self, x: &[f64]) -> bool {
        LadderState::from_values(x).is_ok_and(|s| self.admits(s))
    }

    /// One uniform, inverse CDF over the candidates in ascending order.
    fn sample_conditional<R: Rng + ?Sized>(&self, x: &[f64], i: usize, rng: &mut R) -> f64 {
        let s = LadderState {
            i: x[0] as u64,
            j: x[1] as u64,
        };
        let u: f64 = rng.random();
        let cond = &ladder_conditionals(s, self.truncation)[i];
        let mut acc = 0.0;
        for &(v, p) in cond {
            acc += p;
            if u < acc {
                return v as f64;
            }
        }
        cond[cond.len() - 1].0 as f64
    }
}

/// The ladder rule as a sampler weight rule.
pub struct LadderRule<G> {
    pub sequence: G,
}

impl<G: GrowthSequence> WeightRule for LadderRule<G> {
    fn update(&mut self, h: &History<'_>) -> Result<Option<Vec<f64>>> {
        let x = LadderState::from_values(h.state)?;
        let a = self.sequence.a(h.n)?;
        Ok(Some(ladder_rule_at(x, a).to_vec()))
    }
}

/// Exact law of the adaptive chain on a truncated ladder. Row `x` of the
/// step-`n` kernel is `A(x,·) + (4/a_n) s(x) B(x,·)` with `A = (P_1+P_2)/2`,
/// `B = P_1 − P_2` and `s = +1` on the diagonal, `−1` off it.
pub struct TruncatedLadderEvolution {
    target: FiniteProductTarget,
    mean: DMatrix<f64>,
    signed_diff: DMatrix<f64>,
}

impl TruncatedLadderEvolution {
    pub fn new(m: u64) -> Result<Self> {
        let target = LadderTarget::truncated(m)?.finite()?;
        let p1 = coordinate_update_matrix(&target, 0)?;
        let p2 = coordinate_update_matrix(&target, 1)?;
        let mean = (p1.matrix() + p2.matrix()) * 0.5;
        let mut signed_diff = p1.matrix() - p2.matrix();
        for k in 0..target.len() {
            let v = target.state_values(k);
            if v[0] != v[1] {
                signed_diff.row_mut(k).neg_mut();
            }
        }
        Ok(Self {
            target,
            mean,
            signed_diff,
        })
    }

    pub fn target(&self) -> &FiniteProductTarget {
        &self.target
    }

    /// The kernel used at a step with `a_n = a`.
    pub fn kernel(&self, a: f64) -> Result<TransitionMatrix> {
        TransitionMatrix::new(
            crate::kernels::StateSpace::of_target(&self.target),
            &self.mean + &self.signed_diff * (4.0 / a),
        )
    }

    /// Evolves the law from `X_0 = (1,1)`, calling `observer(n, TV(π_n, π))`
    /// for `n = 0..=n_steps`, and returns the final law.
    pub fn evolve<G, O>(&self, seq: &G, n_steps: usize, mut observer: O) -> Result<DistributionVector>
    where
        G: GrowthSequence + ?Sized,
        O: FnMut(usize, f64),
    {
        let pi = self.target.pi();
        let n = pi.len();
        let start = self
            .target
            .index_of_values(&[1.0, 1.0])
            .expect("(1,1) is a ladder state");
        let mut law = vec![0.0; n];
        law[start] = 1.0;
        observer(0, tv_slices(&law, pi));
        let mut from_mean = vec![0.0; n];
        let mut from_diff = vec![0.0; n];
        for step in 1..=n_steps {
            let a = seq.a(step)?;
            vec_mat(&law, &self.mean, &mut from_mean);
            vec_mat(&law, &self.signed_diff, &mut from_diff);
            let w = 4.0 / a;
            for k in 0..n {
                law[k] = from_mean[k] + w * from_diff[k];
            }
            observer(step, tv_slices(&law, pi));
        }
        let s: f64 = law.iter().sum();
        law.iter_mut().for_each(|p| *p /= s);
        DistributionVector::new(crate::kernels::StateSpace::of_target(&self.target), law)
    }
}

fn vec_mat(v: &[f64], m: &DMatrix<f64>, out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    for (r, &p) in v.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for (c, o) in out.iter_mut().enumerate() {
            *o += p * m[(r, c)];
        }
    }
}

/// Result of [`truncated_ladder_convergence`].
#[derive(Debug, Clone)]
pub struct TruncatedConvergence {
    /// `TV(π_n, π)` for `n = 0..=horizon`.
    pub tv: Vec<f64>,
    /// First `n` with `TV < threshold`, if reached.
    pub first_below: Option<usize>,
    /// Horizon actually evolved.
    pub horizon: usize,
    /// Whether TV is nonincreasing over the final 10% of the horizon.
    pub tail_monotone: bool,
}

/// Evolves the truncated adaptive chain until `TV(π_n, π) < threshold`, then
/// continues for another 10% of that time (at least one step) so the tail
/// can be inspected; gives up at `max_steps`.
pub fn truncated_ladder_convergence<G: GrowthSequence + ?Sized>(
    m: u64,
    seq: &G,
    threshold: f64,
    max_steps: usize,
) -> Result<TruncatedConvergence> {
    let evo = TruncatedLadderEvolution::new(m)?;
    let pi = evo.target.pi().to_vec();
    let n = pi.len();
    let start = evo.target.index_of_values(&[1.0, 1.0]).unwrap();
    let mut law = vec![0.0; n];
    law[start] = 1.0;
    let mut tv = vec![tv_slices(&law, &pi)];
    let mut first_below = None;
    let mut horizon = max_steps;
    let mut from_mean = vec![0.0; n];
    let mut from_diff = vec![0.0; n];
    let mut step = 0;
    while step < horizon {
        step += 1;
        let a = seq.a(step)?;
        vec_mat(&law, &evo.mean, &mut from_mean);
        vec_mat(&law, &evo.signed_diff, &mut from_diff);
        for k in 0..n {
            law[k] = from_mean[k] + 4.0 / a * from_diff[k];
        }
        let d = tv_slices(&law, &pi);
        tv.push(d);
        if first_below.is_none() && d < threshold {
            first_below = Some(step);
            horizon = horizon.min(step + (step / 10).max(1));
        }
    }
    let tail_start = horizon - horizon / 10;
    let tail_monotone = tv[tail_start..=horizon]
        .windows(2)
        .all(|w| w[1] <= w[0] + 1e-15);
    Ok(TruncatedConvergence {
        tv,
        first_below,
        horizon,
        tail_monotone,
    })
}

/// Exact law of the unbounded adaptive chain from `(1,1)`, indexed by `X̃`.
/// After `n` steps the support is `{0, ..., n}`, so the vector grows by one
/// entry per step. `observer(n, law)` sees `π_n`.
pub fn unbounded_ladder_law<G, O>(seq: &G, n_steps: usize, mut observer: O) -> Result<Vec<f64>>
where
    G: GrowthSequence + ?Sized,
    O: FnMut(usize, &[f64]),
{
    let mut law = vec![1.0];
    observer(0, &law);
    for n in 1..=n_steps {
        let a = seq.a(n)?;
        let mut next = vec![0.0; law.len() + 1];
        for (t, &p) in law.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let step = ladder_step_law_at(LadderState::from_tilde(t as u64), a);
            if t > 0 {
                next[t - 1] += p * step[0];
            }
            next[t] += p * step[1];
            next[t + 1] += p * step[2];
        }
        law = next;
        observer(n, &law);
    }
    Ok(law)
}

/// Per-replicate summary of a ladder run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub replicate: usize,
    pub seed: u64,
    pub final_x1: f64,
    pub max_x1: f64,
    /// Least-squares slope of `X_{n,1}` against `n` over the last half.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransienceSummary {
    pub adaptive: Vec<RunSummary>,
    pub control: Vec<RunSummary>,
}

/// Least-squares slope of `y` against its index offset by `x0`.
pub fn least_squares_slope(y: &[f64], x0: usize) -> f64 {
    let n = y.len() as f64;
    if y.len() < 2 {
        return 0.0;
    }
    let mx = x0 as f64 + (n - 1.0) / 2.0;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (k, v) in y.iter().enumerate() {
        let dx = (x0 + k) as f64 - mx;
        sxy += dx * (v - my);
        sxx += dx * dx;
    }
    sxy / sxx
}

/// Runs one replicate from `(1,1)` and returns `X_{n,1}` for `n = 0..=n_steps`.
/// `sequence = None` runs the fixed `α = (1/2, 1/2)` control.
pub fn ladder_x1_trace<G: GrowthSequence + Clone>(
    target: LadderTarget,
    sequence: Option<G>,
    n_steps: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let alpha0 = SelectionWeights::new(vec![0.5, 0.5], LADDER_EPSILON)?;
    let mut rng = rng_from_seed(seed);
    let mut trace = Vec::with_capacity(n_steps + 1);
    trace.push(1.0);
    match sequence {
        Some(seq) => {
            let mut s = GibbsSampler::new(&target, LadderRule { sequence: seq }, vec![1.0, 1.0], alpha0)?;
            for _ in 0..n_steps {
                s.step(&mut rng)?;
                trace.push(s.state()[0]);
            }
        }
        None => {
            let mut s = GibbsSampler::new(&target, Constant, vec![1.0, 1.0], alpha0)?;
            for _ in 0..n_steps {
                s.step(&mut rng)?;
                trace.push(s.state()[0]);
            }
        }
    }
    Ok(trace)
}

pub fn summarize_trace(replicate: usize, seed: u64, trace: &[f64]) -> RunSummary {
    let half = trace.len() / 2;
    RunSummary {
        replicate,
        seed,
        final_x1: *trace.last().unwrap(),
        max_x1: trace.iter().copied().fold(f64::MIN, f64::max),
        slope: least_squares_slope(&trace[half..], half),
    }
}

/// Seeds of the adaptive replicates are `derive_seed(base, r)`; the control
/// arm uses `derive_seed(base, n_runs + r)`.
pub fn transience_experiment(n_steps: usize, n_runs: usize, base_seed: u64) -> Result<TransienceSummary> {
    let schedule = Arc::new(Schedule::covering(n_steps));
    let run = |r: usize, adaptive: bool| -> Result<RunSummary> {
        let seed = derive_seed(base_seed, if adaptive { r } else { n_runs + r } as u64);
        let seq = adaptive.then(|| SharedSchedule(schedule.clone()));
        let trace = ladder_x1_trace(LadderTarget::unbounded(), seq, n_steps, seed)?;
        Ok(summarize_trace(r, seed, &trace))
    };
    let adaptive = (0..n_runs).into_par_iter().map(|r| run(r, true)).collect::<Result<Vec<_>>>()?;
    let control = (0..n_runs).into_par_iter().map(|r| run(r, false)).collect::<Result<Vec<_>>>()?;
    Ok(TransienceSummary { adaptive, control })
}

/// A cheaply clonable handle to a memoized [`Schedule`].
#[derive(Debug, Clone)]
pub struct SharedSchedule(pub Arc<Schedule>);

impl GrowthSequence for SharedSchedule {
    fn a(&self, n: usize) -> Result<f64> {
        self.0.a(n)
    }
}

/// Weights `α_n` chosen by the rule along a ladder trajectory, with
/// `α_0 = (1/2, 1/2)`; used to check the size of successive changes.
pub fn ladder_weight_history<G: GrowthSequence + ?Sized>(states: &[Vec<f64>], seq: &G) -> Result<Vec<[f64; 2]>> {
    let mut out = vec![[0.5, 0.5]];
    for (k, s) in states.iter().take(states.len().saturating_sub(1)).enumerate() {
        let x = LadderState::from_values(s)?;
        out.push(ladder_rule_at(x, seq.a(k + 1)?));
    }
    Ok(out)
}

/// Projects a rule output onto Y with the ladder floor (a no-op for
/// `a_n > 8.7`).
pub fn ladder_weights(x: LadderState, a: f64) -> Result<SelectionWeights> {
    make_selection_weights(&ladder_rule_at(x, a), LADDER_EPSILON)
}
