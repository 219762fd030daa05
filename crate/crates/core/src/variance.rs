//! Asymptotic variance of reversible finite chains by spectral
//! decomposition, the lazy-chain and random-scan identities built on it, and
//! integrated autocorrelation time estimates for sampled traces.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};
use crate::kernels::{stationary_distribution, DistributionVector, TransitionMatrix};
use crate::weights::{make_selection_weights, SelectionWeights};

/// Detailed-balance tolerance for [`ReversibleChain`].
pub const REVERSIBILITY_TOL: f64 = 1e-10;
/// Minimum trace length accepted by [`iact_estimate`].
pub const MIN_TRACE_LEN: usize = 1000;

/// A kernel together with a stationary law it is reversible for.
#[derive(Debug, Clone)]
pub struct ReversibleChain {
    p: TransitionMatrix,
    pi: DistributionVector,
}

impl ReversibleChain {
    pub fn new(p: TransitionMatrix, pi: DistributionVector) -> Result<Self> {
        if pi.probs().len() != p.len() {
            return Err(Error::EnumerationMismatch);
        }
        if pi.probs().iter().any(|x| *x <= 0.0) {
            return Err(Error::InvalidArgument("stationary law must be strictly positive".into()));
        }
        let r = p.detailed_balance_residual(pi.probs());
        if r > REVERSIBILITY_TOL {
            return Err(Error::InvalidKernel(format!("detailed balance residual {r:e}")));
        }
        Ok(Self { p, pi })
    }

    /// Uses the kernel's own stationary law.
    pub fn from_kernel(p: TransitionMatrix) -> Result<Self> {
        let pi = stationary_distribution(&p)?;
        Self::new(p, pi)
    }

    pub fn kernel(&self) -> &TransitionMatrix {
        &self.p
    }

    pub fn pi(&self) -> &[f64] {
        self.pi.probs()
    }

    /// `(1 − δ) I + δ P` with the same stationary law.
    pub fn lazy(&self, delta: f64) -> Result<Self> {
        Ok(Self {
            p: self.p.lazy(delta)?,
            pi: self.pi.clone(),
        })
    }

    /// Eigendecomposition of `D^{1/2} P D^{-1/2}`, `D = diag(π)`.
    pub fn spectrum(&self) -> SpectralDecomposition {
        let pi = self.pi();
        let n = pi.len();
        let sq: Vec<f64> = pi.iter().map(|p| p.sqrt()).collect();
        let m = self.p.matrix();
        let mut s = DMatrix::from_fn(n, n, |x, y| sq[x] * m[(x, y)] / sq[y]);
        // remove rounding asymmetry before the symmetric solver
        s = (&s + s.transpose()) * 0.5;
        let eig = SymmetricEigen::new(s);
        SpectralDecomposition {
            eigenvalues: eig.eigenvalues.iter().map(|l| l.clamp(-1.0, 1.0)).collect(),
            vectors: eig.eigenvectors,
            sqrt_pi: sq,
        }
    }
}

/// Eigenvalues `λ_j` and orthonormal eigenvectors `u_j` of the symmetrized
/// kernel; `e_j = D^{-1/2} u_j` is then orthonormal in `L²(π)`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    vectors: DMatrix<f64>,
    sqrt_pi: Vec<f64>,
}

impl SpectralDecomposition {
    /// `w_j = ⟨h, e_j⟩_π² = (Σ_x √π_x h_x u_j(x))²`.
    pub fn weights(&self, h: &[f64]) -> Vec<f64> {
        let v = DVector::from_iterator(h.len(), h.iter().zip(&self.sqrt_pi).map(|(a, b)| a * b));
        (0..self.eigenvalues.len())
            .map(|j| {
                let c = self.vectors.column(j).dot(&v);
                c * c
            })
            .collect()
    }
}

/// `h − π h`.
pub fn center(h: &[f64], pi: &[f64]) -> Vec<f64> {
    let mean: f64 = h.iter().zip(pi).map(|(a, b)| a * b).sum();
    h.iter().map(|x| x - mean).collect()
}

/// `π h²`.
pub fn second_moment(h: &[f64], pi: &[f64]) -> f64 {
    h.iter().zip(pi).map(|(a, b)| a * a * b).sum()
}

/// `σ²_{h,P} = Σ_j w_j (1+λ_j)/(1−λ_j)` for `h` centered under `π`
/// (centered here if it is not).
pub fn spectral_asymptotic_variance(chain: &ReversibleChain, h: &[f64]) -> Result<f64> {
    let pi = chain.pi();
    if h.len() != pi.len() {
        return Err(Error::DimensionMismatch {
            expected: pi.len(),
            got: h.len(),
        });
    }
    let h = center(h, pi);
    let ph2 = second_moment(&h, pi);
    let spec = chain.spectrum();
    let w = spec.weights(&h);
    let tol = 1e-10 * ph2.max(f64::MIN_POSITIVE);
    let mut total = 0.0;
    for (l, w) in spec.eigenvalues.iter().zip(w) {
        if *l >= 1.0 - 1e-12 {
            if w > tol {
                return Err(Error::UnitEigenvalueWeight { weight: w });
            }
            continue;
        }
        total += w * (1.0 + l) / (1.0 - l);
    }
    Ok(total)
}

/// `π h² (1 + 2 Σ_{k=1}^{K} ρ_k)` from exact lagged covariances
/// `⟨h, P^k h⟩_π`; converges to the spectral value as `K` grows.
pub fn autocovariance_asymptotic_variance(chain: &ReversibleChain, h: &[f64], lags: usize) -> Result<f64> {
    let pi = chain.pi();
    if h.len() != pi.len() {
        return Err(Error::DimensionMismatch {
            expected: pi.len(),
            got: h.len(),
        });
    }
    let h = DVector::from_vec(center(h, pi));
    let m = chain.kernel().matrix();
    let mut ph = h.clone();
    let inner = |f: &DVector<f64>| -> f64 { (0..pi.len()).map(|x| pi[x] * h[x] * f[x]).sum() };
    let g0 = inner(&h);
    let mut sum = g0;
    for _ in 0..lags {
        ph = m * &ph;
        sum += 2.0 * inner(&ph);
    }
    Ok(sum)
}

/// `(1/δ) σ² + ((1−δ)/δ) π h²`: asymptotic variance of the lazy chain.
pub fn lazy_variance(sigma2: f64, delta: f64, pi_h2: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidArgument(format!("laziness {delta} not in (0, 1]")));
    }
    Ok(sigma2 / delta + (1.0 - delta) / delta * pi_h2)
}

/// `τ̃/α_i + (1−α_i)/α_i`: autocorrelation time of a coordinate refreshed
/// with probability `α_i` per step, given `τ̃` of the refresh kernel.
pub fn scan_autocorrelation_relation(tau_tilde: f64, alpha_i: f64) -> Result<f64> {
    if !(alpha_i > 0.0 && alpha_i <= 1.0) {
        return Err(Error::InvalidArgument(format!("selection probability {alpha_i} not in (0, 1]")));
    }
    Ok(tau_tilde / alpha_i + (1.0 - alpha_i) / alpha_i)
}

/// `Σ_i τ_i a_i² σ²_g / C_i²` for `f = a_0 + Σ a_i x_i` on a product target.
pub fn asvar_decomposition(tau: &[f64], a: &[f64], c: &[f64], sigma2_g: f64) -> Result<f64> {
    let d = tau.len();
    if a.len() != d || c.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: if a.len() != d { a.len() } else { c.len() },
        });
    }
    if c.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidArgument("scales must be positive".into()));
    }
    Ok((0..d).map(|i| tau[i] * a[i] * a[i] * sigma2_g / (c[i] * c[i])).sum())
}

/// `α_i ∝ (v_i a_i²)^{1/2}`, projected onto Y with floor `ε`.
pub fn optimal_selection_weights(a: &[f64], proposal_variances: &[f64], epsilon: f64) -> Result<SelectionWeights> {
    if a.len() != proposal_variances.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: proposal_variances.len(),
        });
    }
    let raw: Vec<f64> = a
        .iter()
        .zip(proposal_variances)
        .map(|(ai, v)| (v * ai * ai).sqrt())
        .collect();
    if raw.iter().any(|r| !r.is_finite()) {
        return Err(Error::InvalidWeights("negative or non-finite variance".into()));
    }
    make_selection_weights(&raw, epsilon)
}

/// `(Σ 1/C_i)² / (d Σ 1/C_i²)`: asymptotic-variance ratio of optimal to
/// uniform scanning when `τ̃` is the same for every coordinate and the
/// coordinate variances are `∝ 1/C_i²`.
pub fn optimal_to_uniform_ratio(c: &[f64]) -> f64 {
    let d = c.len() as f64;
    let s1: f64 = c.iter().map(|v| 1.0 / v).sum();
    let s2: f64 = c.iter().map(|v| 1.0 / (v * v)).sum();
    s1 * s1 / (d * s2)
}

/// Sample autocovariances `γ_0, ..., γ_{n−1}` (divisor `n`) via FFT.
pub fn autocovariances(trace: &[f64]) -> Vec<f64> {
    let n = trace.len();
    let mean = trace.iter().sum::<f64>() / n as f64;
    let size = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = trace
        .iter()
        .map(|x| Complex::new(x - mean, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let scale = (size * n) as f64;
    buf.iter().take(n).map(|c| c.re / scale).collect()
}

/// Integrated autocorrelation time `1 + 2 Σ ρ_k` by Geyer's initial
/// positive sequence: sums of adjacent lag pairs are accumulated until the
/// first nonpositive pair.
pub fn iact_estimate(trace: &[f64]) -> Result<f64> {
    if trace.len() < MIN_TRACE_LEN {
        return Err(Error::TraceTooShort {
            len: trace.len(),
            min: MIN_TRACE_LEN,
        });
    }
    let g = autocovariances(trace);
    let g0 = g[0];
    if !(g0 > 0.0) || g0 < 1e-300 {
        return Err(Error::ZeroVariance);
    }
    let mut sum = 0.0;
    let mut m = 0;
    while 2 * m + 1 < g.len() {
        let pair = g[2 * m] + g[2 * m + 1];
        if pair <= 0.0 {
            break;
        }
        sum += pair;
        m += 1;
    }
    Ok(((2.0 * sum - g0) / g0).max(1.0))
}

/// Sample variance (divisor `n`) times `τ̂`: estimated asymptotic variance
/// of the trace mean, per step.
pub fn asymptotic_variance_estimate(trace: &[f64]) -> Result<(f64, f64)> {
    let tau = iact_estimate(trace)?;
    let n = trace.len() as f64;
    let mean = trace.iter().sum::<f64>() / n;
    let var = trace.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Ok((tau, tau * var))
}
