//! Closed-form convergence bounds for adaptive random scan samplers, and
//! minorization certificates found exactly on finite kernels.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernels::{
    coordinate_update_matrix, matrix_tv_sup, metropolis_kernel_matrix, tv_slices, DistributionVector,
    TransitionMatrix,
};
use crate::target::FiniteProductTarget;
use crate::weights::SelectionWeights;

/// Slack allowed when checking entrywise inequalities between computed
/// matrices.
pub const ENTRYWISE_TOL: f64 = 1e-12;

/// `P^m(x, ·) ≥ s μ(·)` for every `x`. A search that finds nothing returns
/// `s = 0` with a uniform `μ`; see [`MinorizationCertificate::is_trivial`].
#[derive(Debug, Clone)]
pub struct MinorizationCertificate {
    pub m: usize,
    pub s: f64,
    pub mu: DistributionVector,
}

impl MinorizationCertificate {
    pub fn new(m: usize, s: f64, mu: DistributionVector) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::InvalidArgument(format!("s = {s} is not in (0, 1]")));
        }
        Ok(Self { m, s, mu })
    }

    /// True when no minorization was found (`s = 0`).
    pub fn is_trivial(&self) -> bool {
        self.s <= 0.0
    }

    /// Largest violation `max_{x,y} (s μ(y) − P^m(x,y))`, clipped at 0.
    pub fn violation(&self, p: &TransitionMatrix) -> Result<f64> {
        if p.len() != self.mu.probs().len() {
            return Err(Error::EnumerationMismatch);
        }
        Ok(entrywise_violation(p.power(self.m).matrix(), self.s, self.mu.probs()))
    }

    pub fn holds_for(&self, p: &TransitionMatrix) -> Result<bool> {
        Ok(self.violation(p)? <= ENTRYWISE_TOL)
    }
}

pub(crate) fn entrywise_violation(pm: &DMatrix<f64>, s: f64, mu: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for x in 0..pm.nrows() {
        for (y, &m) in mu.iter().enumerate() {
            worst = worst.max(s * m - pm[(x, y)]);
        }
    }
    worst
}

/// Best certificate for a given `m`: `s = Σ_y min_x P^m(x,y)` and `μ`
/// proportional to the column minima.
pub fn minorization_search(p: &TransitionMatrix, m: usize) -> Result<MinorizationCertificate> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let pm = p.power(m);
    let n = p.len();
    let minima: Vec<f64> = (0..n)
        .map(|y| pm.matrix().column(y).iter().copied().fold(f64::INFINITY, f64::min).max(0.0))
        .collect();
    let s: f64 = minima.iter().sum();
    let (s, mu) = if s > 0.0 {
        (s.min(1.0), minima.iter().map(|v| v / s).collect())
    } else {
        (0.0, vec![1.0 / n as f64; n])
    };
    Ok(MinorizationCertificate {
        m,
        s,
        mu: DistributionVector::new(p.space().clone(), normalize(mu))?,
    })
}

fn normalize(v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

/// `(1 − (ε/(1−(d−1)ε))^m s)^{⌊n/m⌋}`: a TV bound valid for every `P_α`
/// with `α ∈ Y`, given a certificate for `P_β`.
pub fn uniform_ergodicity_bound(cert: &MinorizationCertificate, epsilon: f64, d: usize, n: usize) -> Result<f64> {
    uniform_ergodicity_bound_raw(cert.m, cert.s, epsilon, d, n)
}

pub fn uniform_ergodicity_bound_raw(m: usize, s: f64, epsilon: f64, d: usize, n: usize) -> Result<f64> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidArgument(format!("s = {s} is not in (0, 1]")));
    }
    if d == 0 || m == 0 {
        return Err(Error::InvalidArgument("d and m must be at least 1".into()));
    }
    let max = 1.0 / d as f64;
    if !(epsilon > 0.0 && epsilon <= max + 1e-15) {
        return Err(Error::InvalidEpsilon { epsilon, max });
    }
    let ratio = epsilon / (1.0 - (d as f64 - 1.0) * epsilon);
    let base = 1.0 - ratio.min(1.0).powi(m as i32) * s;
    Ok(base.max(0.0).powi((n / m) as i32))
}

/// `δ/(ε + δ)` with `δ = max_i |α_i − α'_i|`; bounds `sup_x ‖P_α(x,·) − P_α'(x,·)‖`.
pub fn tv_lipschitz_bound(alpha: &SelectionWeights, alpha_prime: &SelectionWeights, epsilon: f64) -> Result<f64> {
    let delta = alpha.sup_distance(alpha_prime)?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidEpsilon {
            epsilon,
            max: 1.0 / alpha.dim() as f64,
        });
    }
    Ok(delta / (epsilon + delta))
}

/// Ratios within this distance of an integer are taken as that integer
/// before flooring, so exact cases like `s = 1/2` are not lost to rounding.
const FLOOR_SNAP: f64 = 1e-9;

/// `m* = (⌊log(s/4)/log(1−s)⌋ + 2) m` and `s* = s²/8`: from `P^m ≥ s μ` for
/// a reversible chain, `P^{m*} ≥ s* π`.
pub fn strong_uniform_constants(m: usize, s: f64) -> Result<(usize, f64)> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidArgument(format!("s = {s} is not in (0, 1)")));
    }
    let ratio = (s / 4.0).ln() / (1.0 - s).ln();
    let nearest = ratio.round();
    let fl = if (ratio - nearest).abs() < FLOOR_SNAP {
        nearest
    } else {
        ratio.floor()
    };
    Ok(((fl as usize + 2) * m, s * s / 8.0))
}

/// Deterministic scan `P_1 P_2 ⋯ P_d`.
pub fn systematic_scan_kernel(target: &FiniteProductTarget) -> Result<TransitionMatrix> {
    let mut k = coordinate_update_matrix(target, 0)?;
    for i in 1..target.dim() {
        k = k.compose(&coordinate_update_matrix(target, i)?)?;
    }
    Ok(k)
}

/// From `(m, s, μ)` for the systematic scan, `(md, (1/d)^{md} s, μ)` for the
/// uniform random scan.
pub fn systematic_to_random_scan(cert: &MinorizationCertificate, d: usize) -> Result<MinorizationCertificate> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    let md = cert.m * d;
    Ok(MinorizationCertificate {
        m: md,
        s: (1.0 / d as f64).powi(md as i32) * cert.s,
        mu: cert.mu.clone(),
    })
}

/// Which hypothesis links proposal closeness to kernel closeness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProposalMode {
    /// Symmetric proposals: factor 2.
    Symmetric,
    /// `π(y)/π(x) ≤ K` everywhere: factor `4(K+1)`.
    Bounded(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProposalKernelComparison {
    /// `sup_x ‖P_1(x,·) − P_2(x,·)‖_TV` of the Metropolis kernels.
    pub lhs: f64,
    /// Factor times `sup_x ‖Q_1(x,·) − Q_2(x,·)‖_TV`.
    pub rhs: f64,
    pub holds: bool,
}

/// Computes both sides exactly. Hypotheses are checked and reported as
/// errors; the inequality itself is reported in `holds` rather than
/// asserted, since the bounded form can fail on finite spaces.
pub fn proposal_vs_kernel_tv(
    pi: &[f64],
    q1: &DMatrix<f64>,
    q2: &DMatrix<f64>,
    mode: ProposalMode,
) -> Result<ProposalKernelComparison> {
    let n = pi.len();
    for q in [q1, q2] {
        if q.nrows() != n || q.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: q.nrows(),
            });
        }
    }
    let factor = match mode {
        ProposalMode::Symmetric => {
            for q in [q1, q2] {
                if (q - q.transpose()).amax() > ENTRYWISE_TOL {
                    return Err(Error::Precondition("proposal is not symmetric".into()));
                }
            }
            2.0
        }
        ProposalMode::Bounded(k) => {
            let max = pi.iter().copied().fold(f64::MIN, f64::max);
            let min = pi.iter().copied().fold(f64::MAX, f64::min);
            if max / min > k * (1.0 + 1e-12) {
                return Err(Error::Precondition(format!(
                    "density ratio {} exceeds K = {k}",
                    max / min
                )));
            }
            4.0 * (k + 1.0)
        }
    };
    let p1 = metropolis_kernel_matrix(pi, q1)?;
    let p2 = metropolis_kernel_matrix(pi, q2)?;
    let lhs = matrix_tv_sup(p1.matrix(), p2.matrix());
    let rhs = factor * matrix_tv_sup(q1, q2);
    Ok(ProposalKernelComparison {
        lhs,
        rhs,
        holds: lhs <= rhs + ENTRYWISE_TOL,
    })
}

/// `max π(y)/π(x)`.
pub fn density_ratio_bound(pi: &[f64]) -> f64 {
    let max = pi.iter().copied().fold(f64::MIN, f64::max);
    let min = pi.iter().copied().fold(f64::MAX, f64::min);
    max / min
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricGap {
    /// `sup_j ‖Q_{n+1}(j,·) − Q_n(j,·)‖_TV`.
    pub proposal_gap: f64,
    /// `P_{n+1}(n, 0) − P_n(n, 0)`.
    pub kernel_gap: f64,
    /// Truncation point of the state space.
    pub k_max: usize,
}

/// Independence proposal `q_n(k) ∝ p^k` for `k ≠ n` and `∝ p^{2n}` at
/// `k = n`, normalized by `1/(1−p) − p^n + p^{2n}`, on `{0, ..., k_max}`.
pub fn geometric_proposal(p: f64, n: usize, k_max: usize) -> Vec<f64> {
    let pn = p.powi(n as i32);
    let z = 1.0 / (1.0 - p) - pn + pn * pn;
    (0..=k_max)
        .map(|k| if k == n { pn * pn / z } else { p.powi(k as i32) / z })
        .collect()
}

/// Smallest `K ≥ n + 1` whose geometric tail `p^{K+1}/(1−p)` is below 1e-12.
pub fn geometric_truncation(p: f64, n: usize) -> usize {
    let mut k = n + 1;
    while p.powi(k as i32 + 1) / (1.0 - p) >= 1e-12 {
        k += 1;
    }
    k
}

/// Proposals that change less and less while the Metropolis kernels they
/// induce for `π(k) = p^k (1−p)` stay a fixed distance apart.
pub fn geometric_counterexample_gap(p: f64, n: usize) -> Result<GeometricGap> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} is not in (0, 1)")));
    }
    let k_max = geometric_truncation(p, n);
    let qn = geometric_proposal(p, n, k_max);
    let qn1 = geometric_proposal(p, n + 1, k_max);
    // independence proposals: every row is the same, so the sup over j is
    // the distance between the two vectors
    let proposal_gap = tv_slices(&qn, &qn1);
    let pi = |k: usize| p.powi(k as i32) * (1.0 - p);
    let move_n_to_0 = |q: &[f64]| {
        let ratio = pi(0) * q[n] / (pi(n) * q[0]);
        q[0] * ratio.min(1.0)
    };
    Ok(GeometricGap {
        proposal_gap,
        kernel_gap: move_n_to_0(&qn1) - move_n_to_0(&qn),
        k_max,
    })
}
