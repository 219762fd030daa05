//! Coordinate-selection probabilities constrained to the floored simplex
//! `Y = [ε, 1]^d ∩ Δ_{d-1}`, and the mixture decomposition that relates two
//! points of `Y`.

use crate::error::{Error, Result};

/// Tolerance for simplex identities.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// A point of the floored simplex `Y` with floor `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionWeights {
    weights: Vec<f64>,
    epsilon: f64,
}

impl SelectionWeights {
    /// Validates `weights` as a member of `Y` without modifying it.
    pub fn new(weights: Vec<f64>, epsilon: f64) -> Result<Self> {
        let d = weights.len();
        check_epsilon(epsilon, d)?;
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidWeights("non-finite entry".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidWeights(format!("sum is {sum}, not 1")));
        }
        if let Some(w) = weights.iter().find(|&&w| w < epsilon - SIMPLEX_TOL) {
            return Err(Error::InvalidWeights(format!(
                "entry {w} below floor {epsilon}"
            )));
        }
        Ok(Self { weights, epsilon })
    }

    /// Uniform weights `(1/d, ..., 1/d)`.
    pub fn uniform(d: usize, epsilon: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidWeights("d must be at least 1".into()));
        }
        Self::new(vec![1.0 / d as f64; d], epsilon)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn get(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// `max_i |α_i − α'_i|`, the norm used for `|α − α'|` throughout.
    pub fn sup_distance(&self, other: &SelectionWeights) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Picks a coordinate by inverse CDF of a single uniform `u ∈ [0, 1)`.
    pub fn select(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        // u landed in the rounding gap above the last partial sum
        self.weights.len() - 1
    }
}

fn check_epsilon(epsilon: f64, d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidWeights("d must be at least 1".into()));
    }
    let max = 1.0 / d as f64;
    if !(epsilon > 0.0 && epsilon <= max + SIMPLEX_TOL) {
        return Err(Error::InvalidEpsilon { epsilon, max });
    }
    Ok(())
}

/// Normalizes `raw` and returns its Euclidean projection onto `Y`.
///
/// Inputs whose normalization already lies in `Y` come back unchanged. The
/// projection shifts every coordinate by a common threshold and clamps at the
/// floor, so the ordering of coordinates is preserved.
pub fn make_selection_weights(raw: &[f64], epsilon: f64) -> Result<SelectionWeights> {
    let d = raw.len();
    if d == 0 {
        return Err(Error::InvalidWeights("empty weight vector".into()));
    }
    if raw.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidWeights(
            "entries must be finite and nonnegative".into(),
        ));
    }
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidWeights("all entries are zero".into()));
    }
    check_epsilon(epsilon, d)?;
    let epsilon = epsilon.min(1.0 / d as f64);

    let normalized: Vec<f64> = raw.iter().map(|x| x / total).collect();
    if normalized.iter().all(|&w| w >= epsilon) {
        return Ok(SelectionWeights {
            weights: normalized,
            epsilon,
        });
    }
    Ok(SelectionWeights {
        weights: project_floored_simplex(&normalized, epsilon),
        epsilon,
    })
}

/// Projection of `v` onto `{w : w_i >= floor, Σ w_i = 1}`.
fn project_floored_simplex(v: &[f64], floor: f64) -> Vec<f64> {
    let d = v.len();
    let budget = 1.0 - d as f64 * floor;
    if budget <= 0.0 {
        return vec![1.0 / d as f64; d];
    }
    // Shift to the standard simplex of mass `budget` and apply the
    // sorted-threshold projection.
    let shifted: Vec<f64> = v.iter().map(|x| x - floor).collect();
    let mut sorted = shifted.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &value) in sorted.iter().enumerate() {
        cumsum += value;
        let candidate = (cumsum - budget) / (k + 1) as f64;
        if value - candidate > 0.0 {
            theta = candidate;
        }
    }
    shifted
        .iter()
        .map(|x| floor + (x - theta).max(0.0))
        .collect()
}

/// Decomposition `α' = r·α + (1 − r)·q`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureDecomposition {
    pub r: f64,
    pub q: Vec<f64>,
}

impl MixtureDecomposition {
    /// `‖α' − rα − (1 − r)q‖_∞`.
    pub fn residual(&self, alpha: &SelectionWeights, alpha_prime: &SelectionWeights) -> f64 {
        alpha
            .as_slice()
            .iter()
            .zip(alpha_prime.as_slice())
            .zip(&self.q)
            .map(|((a, ap), q)| (ap - self.r * a - (1.0 - self.r) * q).abs())
            .fold(0.0, f64::max)
    }
}

/// Writes `alpha_prime` as a mixture of `alpha` and a residual probability
/// vector, with `r = min_i α'_i / α_i`.
pub fn mixture_decomposition(
    alpha: &SelectionWeights,
    alpha_prime: &SelectionWeights,
) -> Result<MixtureDecomposition> {
    if alpha.dim() != alpha_prime.dim() {
        return Err(Error::DimensionMismatch {
            expected: alpha.dim(),
            got: alpha_prime.dim(),
        });
    }
    let r = alpha
        .as_slice()
        .iter()
        .zip(alpha_prime.as_slice())
        .map(|(a, ap)| ap / a)
        .fold(f64::INFINITY, f64::min)
        .min(1.0);
    if 1.0 - r <= SIMPLEX_TOL {
        return Ok(MixtureDecomposition {
            r: 1.0,
            q: alpha.as_slice().to_vec(),
        });
    }
    let q = alpha
        .as_slice()
        .iter()
        .zip(alpha_prime.as_slice())
        .map(|(a, ap)| ((ap - r * a) / (1.0 - r)).max(0.0))
        .collect();
    Ok(MixtureDecomposition { r, q })
}
