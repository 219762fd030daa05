//! Exact transition matrices on finite spaces, exact evolution of the chain
//! law, and total-variation distances. Everything the samplers do at random is
//! computed here in closed form, so this layer is the reference for the
//! bound calculators and for sampler correctness tests.

use std::io::Write;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::target::{state_label, FiniteProductTarget};
use crate::weights::SelectionWeights;

/// Row-sum and normalization tolerance.
pub const STOCHASTIC_TOL: f64 = 1e-12;
/// Power-iteration stopping residual (L1).
pub const POWER_RESIDUAL: f64 = 1e-13;
/// Default power-iteration cap.
pub const POWER_ITERATION_CAP: usize = 1_000_000;

/// Ordered list of states shared by matrices and vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    states: Vec<Vec<f64>>,
}

impl StateSpace {
    pub fn new(states: Vec<Vec<f64>>) -> Result<Arc<Self>> {
        if states.is_empty() {
            return Err(Error::EmptyStateSpace);
        }
        Ok(Arc::new(Self { states }))
    }

    /// Unlabelled states `0, 1, ..., n-1`.
    pub fn indexed(n: usize) -> Result<Arc<Self>> {
        Self::new((0..n).map(|k| vec![k as f64]).collect())
    }

    pub fn of_target(target: &FiniteProductTarget) -> Arc<Self> {
        Arc::new(Self {
            states: target.all_state_values(),
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k]
    }

    pub fn labels(&self) -> Vec<String> {
        self.states.iter().map(|s| state_label(s)).collect()
    }
}

fn same_space(a: &Arc<StateSpace>, b: &Arc<StateSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Probability vector over a [`StateSpace`].
#[derive(Debug, Clone)]
pub struct DistributionVector {
    space: Arc<StateSpace>,
    probs: Vec<f64>,
}

impl DistributionVector {
    pub fn new(space: Arc<StateSpace>, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                got: probs.len(),
            });
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidArgument("negative or non-finite probability".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::InvalidArgument(format!("probabilities sum to {sum}")));
        }
        Ok(Self { space, probs })
    }

    pub fn point_mass(space: Arc<StateSpace>, k: usize) -> Result<Self> {
        if k >= space.len() {
            return Err(Error::InvalidArgument(format!("state index {k} out of range")));
        }
        let mut probs = vec![0.0; space.len()];
        probs[k] = 1.0;
        Ok(Self { space, probs })
    }

    pub fn stationary_of(target: &FiniteProductTarget) -> Self {
        Self {
            space: StateSpace::of_target(target),
            probs: target.pi().to_vec(),
        }
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.space.labels())?;
        w.write_record(self.probs.iter().map(|p| format!("{p:e}")))?;
        w.flush()?;
        Ok(())
    }
}

/// Row-stochastic matrix over a [`StateSpace`].
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    space: Arc<StateSpace>,
    matrix: DMatrix<f64>,
}

impl TransitionMatrix {
    pub fn new(space: Arc<StateSpace>, matrix: DMatrix<f64>) -> Result<Self> {
        let n = space.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: matrix.nrows(),
            });
        }
        for r in 0..n {
            let row = matrix.row(r);
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::InvalidKernel(format!("row {r} has a negative entry")));
            }
            let sum: f64 = row.sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::InvalidKernel(format!("row {r} sums to {sum}")));
            }
        }
        Ok(Self { space, matrix })
    }

    pub fn identity(space: Arc<StateSpace>) -> Self {
        let n = space.len();
        Self {
            space,
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn entry(&self, from: usize, to: usize) -> f64 {
        self.matrix[(from, to)]
    }

    pub fn row(&self, k: usize) -> Vec<f64> {
        self.matrix.row(k).iter().copied().collect()
    }

    /// `P^m`.
    pub fn power(&self, m: usize) -> TransitionMatrix {
        let n = self.len();
        let mut result = DMatrix::identity(n, n);
        let mut base = self.matrix.clone();
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Self {
            space: self.space.clone(),
            matrix: result,
        }
    }

    /// `self · other` (first `self`, then `other`).
    pub fn compose(&self, other: &TransitionMatrix) -> Result<TransitionMatrix> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::EnumerationMismatch);
        }
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// `(1 − δ) I + δ P`.
    pub fn lazy(&self, delta: f64) -> Result<TransitionMatrix> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidArgument(format!("laziness {delta} not in (0, 1]")));
        }
        let n = self.len();
        Ok(Self {
            space: self.space.clone(),
            matrix: DMatrix::identity(n, n) * (1.0 - delta) + &self.matrix * delta,
        })
    }

    /// `μ P`.
    pub fn push_forward(&self, mu: &DistributionVector) -> Result<DistributionVector> {
        if !same_space(&self.space, &mu.space) {
            return Err(Error::EnumerationMismatch);
        }
        let n = self.len();
        let mut out = vec![0.0; n];
        for (from, &p) in mu.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (to, o) in out.iter_mut().enumerate() {
                *o += p * self.matrix[(from, to)];
            }
        }
        Ok(DistributionVector {
            space: self.space.clone(),
            probs: out,
        })
    }

    /// `‖πP − π‖₁`.
    pub fn stationarity_residual(&self, pi: &DistributionVector) -> Result<f64> {
        let pushed = self.push_forward(pi)?;
        Ok(pushed
            .probs
            .iter()
            .zip(&pi.probs)
            .map(|(a, b)| (a - b).abs())
            .sum())
    }

    /// `max_{x,y} |π_x P(x,y) − π_y P(y,x)|`.
    pub fn detailed_balance_residual(&self, pi: &[f64]) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for x in 0..n {
            for y in (x + 1)..n {
                let flow = pi[x] * self.matrix[(x, y)] - pi[y] * self.matrix[(y, x)];
                worst = worst.max(flow.abs());
            }
        }
        worst
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let labels = self.space.labels();
        let mut header = vec!["state".to_string()];
        header.extend(labels.iter().cloned());
        w.write_record(&header)?;
        for (r, label) in labels.iter().enumerate() {
            let mut rec = vec![label.clone()];
            rec.extend(self.matrix.row(r).iter().map(|p| format!("{p:e}")));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Exact update of coordinate `i` by its full conditional (`P_i`).
pub fn coordinate_update_matrix(target: &FiniteProductTarget, i: usize) -> Result<TransitionMatrix> {
    if i >= target.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            got: i + 1,
        });
    }
    let n = target.len();
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n {
        for (s, p) in target.conditional(k, i) {
            m[(k, s)] += p;
        }
    }
    TransitionMatrix::new(StateSpace::of_target(target), m)
}

/// Random scan Gibbs kernel `P_α = Σ_i α_i P_i`.
pub fn gibbs_kernel_matrix(
    target: &FiniteProductTarget,
    alpha: &SelectionWeights,
) -> Result<TransitionMatrix> {
    gibbs_kernel_matrix_with(target, |_| Ok(alpha.clone()))
}

/// Gibbs kernel whose selection weights may depend on the current state;
/// row `x` uses `alpha_at(x)`. This is the exact one-step kernel of an
/// adaptive sampler whose weights are a function of `X_{n-1}`.
pub fn gibbs_kernel_matrix_with<F>(target: &FiniteProductTarget, mut alpha_at: F) -> Result<TransitionMatrix>
where
    F: FnMut(&[f64]) -> Result<SelectionWeights>,
{
    if target.is_empty() {
        return Err(Error::EmptyStateSpace);
    }
    let n = target.len();
    let d = target.dim();
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n {
        let alpha = alpha_at(&target.state_values(k))?;
        if alpha.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: alpha.dim(),
            });
        }
        for i in 0..d {
            let a = alpha.get(i);
            for (s, p) in target.conditional(k, i) {
                m[(k, s)] += a * p;
            }
        }
    }
    TransitionMatrix::new(StateSpace::of_target(target), m)
}

/// One Metropolis step on coordinate `i` with a proposal matrix over that
/// coordinate's levels. Proposals to non-admitted states are rejected.
pub fn metropolis_coordinate_matrix(
    target: &FiniteProductTarget,
    i: usize,
    proposal: &DMatrix<f64>,
) -> Result<TransitionMatrix> {
    let levels = target.levels().get(i).ok_or(Error::DimensionMismatch {
        expected: target.dim(),
        got: i + 1,
    })?;
    let l = levels.len();
    if proposal.nrows() != l || proposal.ncols() != l {
        return Err(Error::DimensionMismatch {
            expected: l,
            got: proposal.nrows(),
        });
    }
    for r in 0..l {
        let row = proposal.row(r);
        if row.iter().any(|p| *p < 0.0) || (row.sum() - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::InvalidKernel(format!("proposal row {r} is not stochastic")));
        }
    }
    let n = target.len();
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n {
        let here = target.unnormalized_mass(k);
        if !(here > 0.0) {
            return Err(Error::ZeroDensity);
        }
        let from = target.state_indices(k)[i];
        let mut stay = 1.0;
        for (to, s) in target.coordinate_neighbours(k, i) {
            if s == k {
                continue;
            }
            let q_fwd = proposal[(from, to)];
            if q_fwd == 0.0 {
                continue;
            }
            let q_back = proposal[(to, from)];
            let ratio = target.unnormalized_mass(s) * q_back / (here * q_fwd);
            let p = q_fwd * ratio.min(1.0);
            m[(k, s)] = p;
            stay -= p;
        }
        m[(k, k)] = stay.max(0.0);
    }
    TransitionMatrix::new(StateSpace::of_target(target), m)
}

/// Random scan Metropolis-within-Gibbs kernel `Σ_i α_i P_i^Metrop`.
pub fn mwg_kernel_matrix(
    target: &FiniteProductTarget,
    alpha: &SelectionWeights,
    proposals: &[DMatrix<f64>],
) -> Result<TransitionMatrix> {
    let d = target.dim();
    if alpha.dim() != d || proposals.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: alpha.dim().min(proposals.len()),
        });
    }
    let n = target.len();
    let mut m = DMatrix::zeros(n, n);
    for (i, q) in proposals.iter().enumerate() {
        let mi = metropolis_coordinate_matrix(target, i, q)?;
        m += mi.matrix * alpha.get(i);
    }
    TransitionMatrix::new(StateSpace::of_target(target), m)
}

/// Metropolis–Hastings kernel on an indexed space for target `pi` and
/// proposal `q`.
pub fn metropolis_kernel_matrix(pi: &[f64], q: &DMatrix<f64>) -> Result<TransitionMatrix> {
    let n = pi.len();
    if q.nrows() != n || q.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: q.nrows(),
        });
    }
    let mut m = DMatrix::zeros(n, n);
    for x in 0..n {
        if !(pi[x] > 0.0) {
            return Err(Error::ZeroDensity);
        }
        let mut stay = 1.0;
        for y in 0..n {
            if y == x || q[(x, y)] == 0.0 {
                continue;
            }
            let ratio = pi[y] * q[(y, x)] / (pi[x] * q[(x, y)]);
            let p = q[(x, y)] * ratio.min(1.0);
            m[(x, y)] = p;
            stay -= p;
        }
        m[(x, x)] = stay.max(0.0);
    }
    TransitionMatrix::new(StateSpace::indexed(n)?, m)
}

/// `(1/2) Σ |p_i − q_i|`.
pub fn tv_distance(p: &DistributionVector, q: &DistributionVector) -> Result<f64> {
    if !same_space(&p.space, &q.space) {
        return Err(Error::EnumerationMismatch);
    }
    Ok(tv_slices(&p.probs, &q.probs))
}

pub(crate) fn tv_slices(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// `sup_x ‖P1(x,·) − P2(x,·)‖_TV`.
pub fn kernel_tv_sup(p1: &TransitionMatrix, p2: &TransitionMatrix) -> Result<f64> {
    if !same_space(&p1.space, &p2.space) {
        return Err(Error::EnumerationMismatch);
    }
    Ok(matrix_tv_sup(&p1.matrix, &p2.matrix))
}

pub(crate) fn matrix_tv_sup(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (0..a.nrows())
        .map(|r| {
            0.5 * a
                .row(r)
                .iter()
                .zip(b.row(r).iter())
                .map(|(x, y)| (x - y).abs())
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// Streams `π_0, π_1, ..., π_n` to `observer`, where `π_k = π_{k-1} P_k` and
/// `P_k = kernel_at_step(k)`.
pub fn evolve_marginals<K, O>(
    init: &DistributionVector,
    mut kernel_at_step: K,
    n_steps: usize,
    mut observer: O,
) -> Result<DistributionVector>
where
    K: FnMut(usize) -> Result<Arc<TransitionMatrix>>,
    O: FnMut(usize, &DistributionVector),
{
    let mut current = init.clone();
    observer(0, &current);
    for n in 1..=n_steps {
        let kernel = kernel_at_step(n)?;
        current = kernel.push_forward(&current)?;
        observer(n, &current);
    }
    Ok(current)
}

/// Exact laws `π_0, ..., π_n` of a chain driven by `kernel_at_step`.
pub fn exact_marginal_evolution<K>(
    init: &DistributionVector,
    kernel_at_step: K,
    n_steps: usize,
) -> Result<Vec<DistributionVector>>
where
    K: FnMut(usize) -> Result<Arc<TransitionMatrix>>,
{
    let mut out = Vec::with_capacity(n_steps + 1);
    evolve_marginals(init, kernel_at_step, n_steps, |_, d| out.push(d.clone()))?;
    Ok(out)
}

/// Stationary vector by power iteration, falling back to a linear solve when
/// the iteration stalls (periodic chains).
pub fn stationary_distribution(p: &TransitionMatrix) -> Result<DistributionVector> {
    match stationary_by_power_iteration(p, POWER_ITERATION_CAP) {
        Ok(d) => Ok(d),
        Err(Error::NoConvergence { cap }) => {
            stationary_by_linear_solve(p).map_err(|_| Error::NoConvergence { cap })
        }
        Err(e) => Err(e),
    }
}

pub fn stationary_by_power_iteration(p: &TransitionMatrix, cap: usize) -> Result<DistributionVector> {
    let n = p.len();
    let pt = p.matrix.transpose();
    let mut v = DVector::from_element(n, 1.0 / n as f64);
    for _ in 0..cap {
        let next = &pt * &v;
        let sum = next.sum();
        let next = next / sum;
        let residual: f64 = (&next - &v).iter().map(|x| x.abs()).sum();
        v = next;
        if residual < POWER_RESIDUAL {
            return DistributionVector::new(p.space.clone(), normalized(v.iter().copied()));
        }
    }
    Err(Error::NoConvergence { cap })
}

/// Solves `(I − Pᵀ) π = 0` with one equation replaced by `Σ π = 1`.
pub fn stationary_by_linear_solve(p: &TransitionMatrix) -> Result<DistributionVector> {
    let n = p.len();
    let mut a = DMatrix::identity(n, n) - p.matrix.transpose();
    for c in 0..n {
        a[(n - 1, c)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::InvalidKernel("singular stationary system".into()))?;
    if x.iter().any(|v| *v < -1e-9) {
        return Err(Error::InvalidKernel("stationary solve produced negative mass".into()));
    }
    DistributionVector::new(p.space.clone(), normalized(x.iter().map(|v| v.max(0.0))))
}

fn normalized<I: Iterator<Item = f64>>(it: I) -> Vec<f64> {
    let v: Vec<f64> = it.collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::make_selection_weights;

    fn uniform_square() -> FiniteProductTarget {
        FiniteProductTarget::from_masses(vec![vec![0.0, 1.0], vec![0.0, 1.0]], vec![1.0; 4]).unwrap()
    }

    #[test]
    fn single_state_gives_identity() {
        let t = FiniteProductTarget::from_masses(vec![vec![3.0]], vec![2.0]).unwrap();
        let a = SelectionWeights::uniform(1, 1.0).unwrap();
        let p = gibbs_kernel_matrix(&t, &a).unwrap();
        assert_eq!(p.entry(0, 0), 1.0);
    }

    #[test]
    fn uniform_square_rows_by_enumeration() {
        let t = uniform_square();
        let a = SelectionWeights::uniform(2, 0.5).unwrap();
        let p = gibbs_kernel_matrix(&t, &a).unwrap();
        // from (0,0): coordinate 1 w.p. 1/2 then uniform over {(0,0),(1,0)};
        // coordinate 2 likewise over {(0,0),(0,1)}
        let expected = [0.5, 0.25, 0.25, 0.0];
        for (to, e) in expected.iter().enumerate() {
            assert!((p.entry(0, to) - e).abs() < 1e-15);
        }
        let pi = DistributionVector::stationary_of(&t);
        assert!(p.stationarity_residual(&pi).unwrap() < 1e-12);
    }

    #[test]
    fn identity_proposal_gives_identity_kernel() {
        let t = uniform_square();
        let a = SelectionWeights::uniform(2, 0.5).unwrap();
        let q = vec![DMatrix::identity(2, 2), DMatrix::identity(2, 2)];
        let p = mwg_kernel_matrix(&t, &a, &q).unwrap();
        assert_eq!(p.matrix(), &DMatrix::identity(4, 4));
    }

    #[test]
    fn symmetric_two_point_acceptance() {
        let t = FiniteProductTarget::from_masses(vec![vec![0.0, 1.0]], vec![3.0, 1.0]).unwrap();
        let a = SelectionWeights::uniform(1, 1.0).unwrap();
        let q = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        let p = mwg_kernel_matrix(&t, &a, &[q]).unwrap();
        assert!((p.entry(0, 1) - 0.5 * (1.0f64 / 3.0).min(1.0)).abs() < 1e-15);
        assert!((p.entry(1, 0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tv_examples() {
        let s = StateSpace::indexed(2).unwrap();
        let p = DistributionVector::new(s.clone(), vec![0.5, 0.5]).unwrap();
        let q = DistributionVector::new(s.clone(), vec![1.0, 0.0]).unwrap();
        let r = DistributionVector::new(s.clone(), vec![0.0, 1.0]).unwrap();
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(tv_distance(&q, &r).unwrap(), 1.0);
        assert_eq!(tv_distance(&p, &q).unwrap(), 0.5);
        let other = DistributionVector::new(StateSpace::indexed(3).unwrap(), vec![1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(tv_distance(&p, &other), Err(Error::EnumerationMismatch)));
    }

    #[test]
    fn kernel_tv_against_identity() {
        let s = StateSpace::indexed(2).unwrap();
        let flip = TransitionMatrix::new(s.clone(), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.5])).unwrap();
        let id = TransitionMatrix::identity(s);
        assert_eq!(kernel_tv_sup(&flip, &flip).unwrap(), 0.0);
        assert_eq!(kernel_tv_sup(&flip, &id).unwrap(), 1.0);
    }

    #[test]
    fn rejects_non_stochastic_rows() {
        let s = StateSpace::indexed(2).unwrap();
        let r = TransitionMatrix::new(s, DMatrix::from_row_slice(2, 2, &[0.5, 0.6, 0.5, 0.5]));
        assert!(matches!(r, Err(Error::InvalidKernel(_))));
    }

    #[test]
    fn identity_evolution_is_constant() {
        let s = StateSpace::indexed(3).unwrap();
        let init = DistributionVector::new(s.clone(), vec![0.2, 0.3, 0.5]).unwrap();
        let id = Arc::new(TransitionMatrix::identity(s));
        let laws = exact_marginal_evolution(&init, |_| Ok(id.clone()), 5).unwrap();
        assert_eq!(laws.len(), 6);
        for l in laws {
            assert_eq!(l.probs(), init.probs());
        }
    }

    #[test]
    fn two_state_contraction() {
        // P = [[1-a, a], [b, 1-b]] contracts TV by |1 - a - b| <= 1 - 2·min-entry
        let (a, b) = (0.3, 0.1);
        let s = StateSpace::indexed(2).unwrap();
        let p = Arc::new(
            TransitionMatrix::new(s.clone(), DMatrix::from_row_slice(2, 2, &[1.0 - a, a, b, 1.0 - b])).unwrap(),
        );
        let pi = DistributionVector::new(s.clone(), vec![b / (a + b), a / (a + b)]).unwrap();
        let init = DistributionVector::point_mass(s, 0).unwrap();
        let laws = exact_marginal_evolution(&init, |_| Ok(p.clone()), 40).unwrap();
        let rate: f64 = 1.0 - 2.0 * 0.1;
        for (n, l) in laws.iter().enumerate() {
            assert!(tv_distance(l, &pi).unwrap() <= rate.powi(n as i32) + 1e-15);
        }
    }

    #[test]
    fn stationary_examples() {
        let s = StateSpace::indexed(1).unwrap();
        let d = stationary_distribution(&TransitionMatrix::identity(s)).unwrap();
        assert_eq!(d.probs(), &[1.0]);

        let s = StateSpace::indexed(3).unwrap();
        let ds = DMatrix::from_row_slice(3, 3, &[0.2, 0.3, 0.5, 0.5, 0.2, 0.3, 0.3, 0.5, 0.2]);
        let d = stationary_distribution(&TransitionMatrix::new(s, ds).unwrap()).unwrap();
        for p in d.probs() {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_chain_falls_back_to_solve() {
        // period 2, stationary law (1/4, 1/2, 1/4)
        let s = StateSpace::indexed(3).unwrap();
        let m = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.5, 0.0, 0.5, 0.0, 1.0, 0.0]);
        let p = TransitionMatrix::new(s, m).unwrap();
        assert!(stationary_by_power_iteration(&p, 1000).is_err());
        let d = stationary_distribution(&p).unwrap();
        assert!((d.probs()[0] - 0.25).abs() < 1e-12);
        assert!((d.probs()[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn state_dependent_weights_per_row() {
        let t = uniform_square();
        let p = gibbs_kernel_matrix_with(&t, |x| {
            if x[0] == 0.0 {
                make_selection_weights(&[0.9, 0.1], 0.1)
            } else {
                make_selection_weights(&[0.1, 0.9], 0.1)
            }
        })
        .unwrap();
        // from (0,0) move to (1,0) needs coordinate 1: 0.9 · 0.5
        assert!((p.entry(0, 2) - 0.45).abs() < 1e-15);
        // from (1,0) move to (0,0) needs coordinate 1: 0.1 · 0.5
        assert!((p.entry(2, 0) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn csv_dump_has_tuple_labels() {
        let t = uniform_square();
        let a = SelectionWeights::uniform(2, 0.5).unwrap();
        let p = gibbs_kernel_matrix(&t, &a).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(header, "state,\"(0,0)\",\"(0,1)\",\"(1,0)\",\"(1,1)\"");
    }
}
