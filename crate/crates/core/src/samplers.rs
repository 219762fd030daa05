//! Seeded random scan Gibbs and Metropolis-within-Gibbs samplers, with and
//! without adaptation of the selection weights and proposal parameters.
//!
//! Every step consumes randomness in a fixed order: one uniform for the
//! coordinate, then the conditional or proposal draw, then (Metropolis
//! variants only) one acceptance uniform, drawn even when the move is
//! certain to be accepted. This keeps streams aligned across variants.

use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, SimRng};
use crate::target::{ContinuousProductTarget, FiniteProductTarget};
use crate::weights::{make_selection_weights, SelectionWeights};

/// A target that can redraw one coordinate from its full conditional.
pub trait GibbsTarget {
    fn dim(&self) -> usize;
    fn in_support(&self, x: &[f64]) -> bool;
    /// New value of coordinate `i` drawn from `π(· | x_{-i})`.
    fn sample_conditional<R: Rng + ?Sized>(&self, x: &[f64], i: usize, rng: &mut R) -> f64;
}

/// A target whose density is evaluable up to a constant.
pub trait DensityTarget {
    fn dim(&self) -> usize;
    /// Unnormalized density; zero outside the support.
    fn density(&self, x: &[f64]) -> f64;
}

/// Per-coordinate proposal kernels `Q_{x_{-i}, γ}` with one real parameter
/// per coordinate.
pub trait ProposalFamily {
    fn sample<R: Rng + ?Sized>(&self, x: &[f64], i: usize, gamma: f64, rng: &mut R) -> f64;
    /// `q_{x_{-i}, γ}(x_i, y)`.
    fn density(&self, x: &[f64], i: usize, gamma: f64, y: f64) -> f64;
    /// When true the proposal densities cancel in the acceptance ratio.
    fn is_symmetric(&self) -> bool {
        false
    }
}

impl GibbsTarget for FiniteProductTarget {
    fn dim(&self) -> usize {
        FiniteProductTarget::dim(self)
    }

    fn in_support(&self, x: &[f64]) -> bool {
        self.index_of_values(x).is_some()
    }

    fn sample_conditional<R: Rng + ?Sized>(&self, x: &[f64], i: usize, rng: &mut R) -> f64 {
        let k = self
            .index_of_values(x)
            .expect("current state lies in the support");
        let u: f64 = rng.random();
        let cond = self.conditional(k, i);
        let mut acc = 0.0;
        let mut pick = cond[cond.len() - 1].0;
        for &(s, p) in &cond {
            acc += p;
            if u < acc {
                pick = s;
                break;
            }
        }
        self.levels()[i][self.state_indices(pick)[i]]
    }
}

impl DensityTarget for FiniteProductTarget {
    fn dim(&self) -> usize {
        FiniteProductTarget::dim(self)
    }

    fn density(&self, x: &[f64]) -> f64 {
        self.index_of_values(x)
            .map(|k| self.unnormalized_mass(k))
            .unwrap_or(0.0)
    }
}

impl DensityTarget for ContinuousProductTarget {
    fn dim(&self) -> usize {
        ContinuousProductTarget::dim(self)
    }

    fn density(&self, x: &[f64]) -> f64 {
        ContinuousProductTarget::density(self, x)
    }
}

/// Gaussian random walk on each coordinate; `γ` is the proposal variance.
#[derive(Debug, Clone, Copy, Default)]
pub struct GaussianRandomWalk;

impl ProposalFamily for GaussianRandomWalk {
    fn sample<R: Rng + ?Sized>(&self, x: &[f64], i: usize, gamma: f64, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        x[i] + gamma.sqrt() * z
    }

    fn density(&self, x: &[f64], i: usize, gamma: f64, y: f64) -> f64 {
        let d = y - x[i];
        (-0.5 * d * d / gamma).exp() / (2.0 * std::f64::consts::PI * gamma).sqrt()
    }

    fn is_symmetric(&self) -> bool {
        true
    }
}

/// Fixed proposal matrices over each coordinate's level list; `γ` is ignored.
#[derive(Debug, Clone)]
pub struct FiniteProposal {
    levels: Vec<Vec<f64>>,
    matrices: Vec<Vec<Vec<f64>>>,
}

impl FiniteProposal {
    pub fn new(levels: Vec<Vec<f64>>, matrices: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if levels.len() != matrices.len() {
            return Err(Error::DimensionMismatch {
                expected: levels.len(),
                got: matrices.len(),
            });
        }
        for (l, m) in levels.iter().zip(&matrices) {
            if m.len() != l.len() || m.iter().any(|row| row.len() != l.len()) {
                return Err(Error::InvalidKernel("proposal shape does not match levels".into()));
            }
            for row in m {
                let s: f64 = row.iter().sum();
                if row.iter().any(|p| *p < 0.0) || (s - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidKernel("proposal row is not stochastic".into()));
                }
            }
        }
        Ok(Self { levels, matrices })
    }

    pub fn matrix(&self, i: usize) -> &[Vec<f64>] {
        &self.matrices[i]
    }

    fn level_of(&self, i: usize, v: f64) -> usize {
        self.levels[i]
            .iter()
            .position(|l| *l == v)
            .expect("value is a level of the coordinate")
    }
}

impl ProposalFamily for FiniteProposal {
    fn sample<R: Rng + ?Sized>(&self, x: &[f64], i: usize, _gamma: f64, rng: &mut R) -> f64 {
        let row = &self.matrices[i][self.level_of(i, x[i])];
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (l, p) in row.iter().enumerate() {
            acc += p;
            if u < acc && *p > 0.0 {
                return self.levels[i][l];
            }
        }
        let last = row.iter().rposition(|p| *p > 0.0).unwrap_or(0);
        self.levels[i][last]
    }

    fn density(&self, x: &[f64], i: usize, _gamma: f64, y: f64) -> f64 {
        match self.levels[i].iter().position(|l| *l == y) {
            Some(to) => self.matrices[i][self.level_of(i, x[i])][to],
            None => 0.0,
        }
    }

    fn is_symmetric(&self) -> bool {
        self.matrices.iter().all(|m| {
            (0..m.len()).all(|a| (0..m.len()).all(|b| m[a][b] == m[b][a]))
        })
    }
}

/// What an adaptation rule sees before step `n`: the weights and proposal
/// parameters used at step `n-1`, the state `X_{n-1}`, and the outcome of
/// step `n-1`. Full-history rules keep their own summaries.
#[derive(Debug, Clone, Copy)]
pub struct History<'a> {
    pub n: usize,
    pub alpha: &'a SelectionWeights,
    pub gamma: &'a [f64],
    pub state: &'a [f64],
    pub last_coordinate: Option<usize>,
    pub last_accepted: Option<bool>,
}

/// `R_n`: returns raw new weights (projected onto Y by the sampler) or
/// `None` to keep the current ones.
pub trait WeightRule {
    fn update(&mut self, h: &History<'_>) -> Result<Option<Vec<f64>>>;
}

/// `R'_n`: returns new proposal parameters or `None` to keep them.
pub trait ProposalRule {
    fn update(&mut self, h: &History<'_>) -> Result<Option<Vec<f64>>>;
}

impl<F> WeightRule for F
where
    F: FnMut(&History<'_>) -> Result<Option<Vec<f64>>>,
{
    fn update(&mut self, h: &History<'_>) -> Result<Option<Vec<f64>>> {
        self(h)
    }
}

/// Never changes anything.
#[derive(Debug, Clone, Copy, Default)]
pub struct Constant;

impl WeightRule for Constant {
    fn update(&mut self, _: &History<'_>) -> Result<Option<Vec<f64>>> {
        Ok(None)
    }
}

impl ProposalRule for Constant {
    fn update(&mut self, _: &History<'_>) -> Result<Option<Vec<f64>>> {
        Ok(None)
    }
}

/// Joint weight/proposal adaptation. Both updates see the same history
/// (that of step `n-1`), weights first.
pub trait Adaptation {
    fn weights(&mut self, h: &History<'_>) -> Result<Option<Vec<f64>>>;
    fn gamma(&mut self, h: &History<'_>) -> Result<Option<Vec<f64>>>;
}

/// Pairs an independent weight rule and proposal rule.
#[derive(Debug, Clone)]
pub struct Separate<W, P> {
    pub weights: W,
    pub proposals: P,
}

impl<W: WeightRule, P: ProposalRule> Adaptation for Separate<W, P> {
    fn weights(&mut self, h: &History<'_>) -> Result<Option<Vec<f64>>> {
        self.weights.update(h)
    }

    fn gamma(&mut self, h: &History<'_>) -> Result<Option<Vec<f64>>> {
        self.proposals.update(h)
    }
}

/// One completed step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub coordinate: usize,
    pub accepted: bool,
    /// Metropolis acceptance probability; 1 for Gibbs updates.
    pub acceptance_prob: f64,
}

fn check_finite(v: &[f64], step: usize) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteRule { step })
    }
}

/// Random scan Gibbs stepper with adaptive weights.
pub struct GibbsSampler<'t, T, W> {
    target: &'t T,
    rule: W,
    state: Vec<f64>,
    alpha: SelectionWeights,
    n: usize,
    last: Option<StepOutcome>,
}

impl<'t, T: GibbsTarget, W: WeightRule> GibbsSampler<'t, T, W> {
    pub fn new(target: &'t T, rule: W, x0: Vec<f64>, alpha0: SelectionWeights) -> Result<Self> {
        if x0.len() != target.dim() || alpha0.dim() != target.dim() {
            return Err(Error::DimensionMismatch {
                expected: target.dim(),
                got: if x0.len() != target.dim() { x0.len() } else { alpha0.dim() },
            });
        }
        if !target.in_support(&x0) {
            return Err(Error::OutsideSupport(crate::target::state_label(&x0)));
        }
        Ok(Self {
            target,
            rule,
            state: x0,
            alpha: alpha0,
            n: 0,
            last: None,
        })
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn alpha(&self) -> &SelectionWeights {
        &self.alpha
    }

    pub fn steps_done(&self) -> usize {
        self.n
    }

    pub fn rule(&self) -> &W {
        &self.rule
    }

    /// Update α, choose a coordinate, redraw it from its conditional.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<StepOutcome> {
        let n = self.n + 1;
        let update = {
            let h = History {
                n,
                alpha: &self.alpha,
                gamma: &[],
                state: &self.state,
                last_coordinate: self.last.map(|o| o.coordinate),
                last_accepted: self.last.map(|o| o.accepted),
            };
            self.rule.update(&h)?
        };
        if let Some(raw) = update {
            check_finite(&raw, n)?;
            self.alpha = make_selection_weights(&raw, self.alpha.epsilon())?;
        }
        let i = self.alpha.select(rng.random());
        self.state[i] = self.target.sample_conditional(&self.state, i, rng);
        let out = StepOutcome {
            coordinate: i,
            accepted: true,
            acceptance_prob: 1.0,
        };
        self.n = n;
        self.last = Some(out);
        Ok(out)
    }
}

/// Random scan Metropolis-within-Gibbs stepper with adaptive weights and
/// proposal parameters.
pub struct MwgSampler<'t, T, Q, A> {
    target: &'t T,
    proposals: &'t Q,
    adapt: A,
    state: Vec<f64>,
    density: f64,
    alpha: SelectionWeights,
    gamma: Vec<f64>,
    n: usize,
    last: Option<StepOutcome>,
}

impl<'t, T: DensityTarget, Q: ProposalFamily, A: Adaptation> MwgSampler<'t, T, Q, A> {
    pub fn new(
        target: &'t T,
        proposals: &'t Q,
        adapt: A,
        x0: Vec<f64>,
        alpha0: SelectionWeights,
        gamma0: Vec<f64>,
    ) -> Result<Self> {
        let d = target.dim();
        for got in [x0.len(), alpha0.dim(), gamma0.len()] {
            if got != d {
                return Err(Error::DimensionMismatch { expected: d, got });
            }
        }
        let density = target.density(&x0);
        if !(density > 0.0) {
            return Err(Error::ZeroDensity);
        }
        Ok(Self {
            target,
            proposals,
            adapt,
            state: x0,
            density,
            alpha: alpha0,
            gamma: gamma0,
            n: 0,
            last: None,
        })
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn alpha(&self) -> &SelectionWeights {
        &self.alpha
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn steps_done(&self) -> usize {
        self.n
    }

    pub fn adaptation(&self) -> &A {
        &self.adapt
    }

    pub fn adaptation_mut(&mut self) -> &mut A {
        &mut self.adapt
    }

    /// Update α and γ, choose a coordinate, propose, accept or reject.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<StepOutcome> {
        let n = self.n + 1;
        let (new_alpha, new_gamma) = {
            let h = History {
                n,
                alpha: &self.alpha,
                gamma: &self.gamma,
                state: &self.state,
                last_coordinate: self.last.map(|o| o.coordinate),
                last_accepted: self.last.map(|o| o.accepted),
            };
            (self.adapt.weights(&h)?, self.adapt.gamma(&h)?)
        };
        if let Some(raw) = new_alpha {
            check_finite(&raw, n)?;
            self.alpha = make_selection_weights(&raw, self.alpha.epsilon())?;
        }
        if let Some(g) = new_gamma {
            check_finite(&g, n)?;
            if g.len() != self.gamma.len() {
                return Err(Error::DimensionMismatch {
                    expected: self.gamma.len(),
                    got: g.len(),
                });
            }
            self.gamma = g;
        }

        let i = self.alpha.select(rng.random());
        let gamma = self.gamma[i];
        let y = self.proposals.sample(&self.state, i, gamma, rng);
        let u: f64 = rng.random();

        let old = self.state[i];
        self.state[i] = y;
        let proposed_density = self.target.density(&self.state);
        let prob = if proposed_density <= 0.0 {
            0.0
        } else if self.proposals.is_symmetric() {
            (proposed_density / self.density).min(1.0)
        } else {
            let q_back = self.proposals.density(&self.state, i, gamma, old);
            self.state[i] = old;
            let q_fwd = self.proposals.density(&self.state, i, gamma, y);
            self.state[i] = y;
            (proposed_density * q_back / (self.density * q_fwd)).min(1.0)
        };
        let accepted = u < prob;
        if accepted {
            self.density = proposed_density;
        } else {
            self.state[i] = old;
        }
        let out = StepOutcome {
            coordinate: i,
            accepted,
            acceptance_prob: prob,
        };
        self.n = n;
        self.last = Some(out);
        Ok(out)
    }
}

/// Record of a seeded run. `states`, `alphas` and `gammas` hold entries for
/// steps `0..=n`; `coordinates`, `accepted` and `acceptance_probs` hold one
/// entry per step `1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub seed: u64,
    pub states: Vec<Vec<f64>>,
    pub coordinates: Vec<usize>,
    pub accepted: Vec<bool>,
    pub acceptance_probs: Vec<f64>,
    pub alphas: Vec<Vec<f64>>,
    pub gammas: Option<Vec<Vec<f64>>>,
}

impl Trajectory {
    fn start(seed: u64, x0: &[f64], alpha0: &SelectionWeights, gamma0: Option<&[f64]>, n: usize) -> Self {
        let mut t = Self {
            seed,
            states: Vec::with_capacity(n + 1),
            coordinates: Vec::with_capacity(n),
            accepted: Vec::with_capacity(n),
            acceptance_probs: Vec::with_capacity(n),
            alphas: Vec::with_capacity(n + 1),
            gammas: gamma0.map(|_| Vec::with_capacity(n + 1)),
        };
        t.states.push(x0.to_vec());
        t.alphas.push(alpha0.as_slice().to_vec());
        if let (Some(g), Some(h)) = (t.gammas.as_mut(), gamma0) {
            g.push(h.to_vec());
        }
        t
    }

    fn push(&mut self, out: StepOutcome, state: &[f64], alpha: &SelectionWeights, gamma: Option<&[f64]>) {
        self.states.push(state.to_vec());
        self.coordinates.push(out.coordinate);
        self.accepted.push(out.accepted);
        self.acceptance_probs.push(out.acceptance_prob);
        self.alphas.push(alpha.as_slice().to_vec());
        if let (Some(g), Some(h)) = (self.gammas.as_mut(), gamma) {
            g.push(h.to_vec());
        }
    }

    pub fn n_steps(&self) -> usize {
        self.coordinates.len()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    /// Values of coordinate `i` (0-based) at steps `0..=n`.
    pub fn coordinate_trace(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[i]).collect()
    }

    /// CSV with columns `step, coordinate, accepted, x_1..x_d, alpha_1..alpha_d`
    /// and `gamma_1..gamma_d` when proposal parameters were recorded.
    /// Coordinates are 1-based; the step-0 row leaves coordinate and accepted
    /// empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        self.write_csv_every(out, 1)
    }

    /// Like [`Trajectory::write_csv`] but keeps only steps divisible by
    /// `every` (plus the last step). Thinned files are for plotting; they do
    /// not read back as trajectories.
    pub fn write_csv_every<W: Write>(&self, out: W, every: usize) -> Result<()> {
        let every = every.max(1);
        let last = self.states.len() - 1;
        let d = self.dim();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["step".to_string(), "coordinate".into(), "accepted".into()];
        header.extend((1..=d).map(|k| format!("x_{k}")));
        header.extend((1..=d).map(|k| format!("alpha_{k}")));
        if self.gammas.is_some() {
            header.extend((1..=d).map(|k| format!("gamma_{k}")));
        }
        w.write_record(&header)?;
        for step in (0..=last).filter(|s| s % every == 0 || *s == last) {
            let mut rec = vec![step.to_string()];
            if step == 0 {
                rec.push(String::new());
                rec.push(String::new());
            } else {
                rec.push((self.coordinates[step - 1] + 1).to_string());
                rec.push(u8::from(self.accepted[step - 1]).to_string());
            }
            rec.extend(self.states[step].iter().map(|v| v.to_string()));
            rec.extend(self.alphas[step].iter().map(|v| v.to_string()));
            if let Some(g) = &self.gammas {
                rec.extend(g[step].iter().map(|v| v.to_string()));
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    /// Parses the format written by [`Trajectory::write_csv`]. The seed is
    /// not part of the file and is set to 0; acceptance probabilities are not
    /// stored and are reconstructed as 1/0 from the accepted flags.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn(name.to_string()))
        };
        let step_col = col("step")?;
        let coord_col = col("coordinate")?;
        let acc_col = col("accepted")?;
        let prefixed = |p: &str| -> Vec<usize> {
            let mut k = 1;
            let mut cols = Vec::new();
            while let Some(c) = headers.iter().position(|h| h == format!("{p}_{k}")) {
                cols.push(c);
                k += 1;
            }
            cols
        };
        let xs = prefixed("x");
        let als = prefixed("alpha");
        let gs = prefixed("gamma");
        if xs.is_empty() {
            return Err(Error::MissingColumn("x_1".into()));
        }
        if als.len() != xs.len() {
            return Err(Error::MissingColumn(format!("alpha_{}", als.len() + 1)));
        }
        let num = |s: &str, what: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("cannot parse {what} value {s:?}")))
        };
        let mut t = Trajectory {
            seed: 0,
            states: Vec::new(),
            coordinates: Vec::new(),
            accepted: Vec::new(),
            acceptance_probs: Vec::new(),
            alphas: Vec::new(),
            gammas: if gs.is_empty() { None } else { Some(Vec::new()) },
        };
        for rec in r.records() {
            let rec = rec?;
            let step = num(&rec[step_col], "step")? as usize;
            if step != t.states.len() {
                return Err(Error::InvalidArgument(format!("step {step} out of order")));
            }
            if step > 0 {
                let c = num(&rec[coord_col], "coordinate")? as usize;
                if c == 0 || c > xs.len() {
                    return Err(Error::InvalidArgument(format!("coordinate {c} out of range")));
                }
                let a = num(&rec[acc_col], "accepted")? != 0.0;
                t.coordinates.push(c - 1);
                t.accepted.push(a);
                t.acceptance_probs.push(if a { 1.0 } else { 0.0 });
            }
            t.states.push(xs.iter().map(|&c| num(&rec[c], "x")).collect::<Result<_>>()?);
            t.alphas.push(als.iter().map(|&c| num(&rec[c], "alpha")).collect::<Result<_>>()?);
            if let Some(g) = t.gammas.as_mut() {
                g.push(gs.iter().map(|&c| num(&rec[c], "gamma")).collect::<Result<_>>()?);
            }
        }
        if t.states.is_empty() {
            return Err(Error::InvalidArgument("empty trajectory".into()));
        }
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(f))
    }
}

/// Random scan Gibbs sampler with fixed selection probabilities.
pub fn rsg_run<T: GibbsTarget>(
    target: &T,
    alpha: &SelectionWeights,
    x0: &[f64],
    n_steps: usize,
    seed: u64,
) -> Result<Trajectory> {
    adap_rsg_run(target, Constant, x0, alpha, n_steps, seed)
}

/// Adaptive random scan Gibbs sampler.
pub fn adap_rsg_run<T: GibbsTarget, W: WeightRule>(
    target: &T,
    rule: W,
    x0: &[f64],
    alpha0: &SelectionWeights,
    n_steps: usize,
    seed: u64,
) -> Result<Trajectory> {
    let mut rng = rng_from_seed(seed);
    let mut s = GibbsSampler::new(target, rule, x0.to_vec(), alpha0.clone())?;
    let mut t = Trajectory::start(seed, x0, alpha0, None, n_steps);
    for _ in 0..n_steps {
        let out = s.step(&mut rng)?;
        t.push(out, &s.state, &s.alpha, None);
    }
    Ok(t)
}

/// Adaptive random scan Metropolis-within-Gibbs with fixed proposal
/// parameters `gamma`.
#[allow(clippy::too_many_arguments)]
pub fn adap_rsmwg_run<T: DensityTarget, Q: ProposalFamily, W: WeightRule>(
    target: &T,
    proposals: &Q,
    gamma: &[f64],
    rule: W,
    x0: &[f64],
    alpha0: &SelectionWeights,
    n_steps: usize,
    seed: u64,
) -> Result<Trajectory> {
    let adapt = Separate {
        weights: rule,
        proposals: Constant,
    };
    let mut t = mwg_loop(target, proposals, adapt, x0, alpha0, gamma, n_steps, seed)?;
    t.gammas = None;
    Ok(t)
}

/// Adaptive random scan adaptive Metropolis-within-Gibbs.
#[allow(clippy::too_many_arguments)]
pub fn adap_rs_adap_mwg_run<T: DensityTarget, Q: ProposalFamily, A: Adaptation>(
    target: &T,
    proposals: &Q,
    adapt: A,
    x0: &[f64],
    alpha0: &SelectionWeights,
    gamma0: &[f64],
    n_steps: usize,
    seed: u64,
) -> Result<Trajectory> {
    mwg_loop(target, proposals, adapt, x0, alpha0, gamma0, n_steps, seed)
}

#[allow(clippy::too_many_arguments)]
fn mwg_loop<T: DensityTarget, Q: ProposalFamily, A: Adaptation>(
    target: &T,
    proposals: &Q,
    adapt: A,
    x0: &[f64],
    alpha0: &SelectionWeights,
    gamma0: &[f64],
    n_steps: usize,
    seed: u64,
) -> Result<Trajectory> {
    let mut rng: SimRng = rng_from_seed(seed);
    let mut s = MwgSampler::new(target, proposals, adapt, x0.to_vec(), alpha0.clone(), gamma0.to_vec())?;
    let mut t = Trajectory::start(seed, x0, alpha0, Some(gamma0), n_steps);
    for _ in 0..n_steps {
        let out = s.step(&mut rng)?;
        t.push(out, &s.state, &s.alpha, Some(&s.gamma));
    }
    Ok(t)
}
