//! Target distributions: exact finite product-space targets (optionally with a
//! non-rectangular support) and continuous product-form targets built from a
//! scaled one-dimensional base density.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Formats a state as a tuple string, e.g. `(2,1)`.
pub fn state_label(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v}")).collect();
    format!("({})", parts.join(","))
}

/// A strictly positive distribution on an enumerable subset of
/// `X_1 × ... × X_d`, where each `X_i` is a finite list of levels.
#[derive(Clone)]
pub struct FiniteProductTarget {
    levels: Vec<Vec<f64>>,
    states: Vec<Vec<usize>>,
    mass: Vec<f64>,
    pi: Vec<f64>,
    index: HashMap<Vec<usize>, usize>,
}

impl fmt::Debug for FiniteProductTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteProductTarget")
            .field("levels", &self.levels)
            .field("states", &self.states.len())
            .finish()
    }
}

impl FiniteProductTarget {
    /// Enumerates the product of `levels` in lexicographic order (last
    /// coordinate fastest), keeps states admitted by `support`, and evaluates
    /// the unnormalized `mass` on each.
    pub fn new<M, S>(levels: Vec<Vec<f64>>, mass: M, support: Option<S>) -> Result<Self>
    where
        M: Fn(&[f64]) -> f64,
        S: Fn(&[f64]) -> bool,
    {
        if levels.is_empty() || levels.iter().any(Vec::is_empty) {
            return Err(Error::EmptyStateSpace);
        }
        let mut states = Vec::new();
        let mut masses = Vec::new();
        for idx in product_indices(&levels) {
            let values: Vec<f64> = idx.iter().enumerate().map(|(c, &k)| levels[c][k]).collect();
            if let Some(s) = &support {
                if !s(&values) {
                    continue;
                }
            }
            let m = mass(&values);
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::InvalidTarget(format!(
                    "mass {m} at admitted state {}",
                    state_label(&values)
                )));
            }
            states.push(idx);
            masses.push(m);
        }
        Self::assemble(levels, states, masses)
    }

    /// Rectangular target from a mass table in lexicographic order.
    pub fn from_masses(levels: Vec<Vec<f64>>, masses: Vec<f64>) -> Result<Self> {
        if levels.is_empty() || levels.iter().any(Vec::is_empty) {
            return Err(Error::EmptyStateSpace);
        }
        let states: Vec<Vec<usize>> = product_indices(&levels).collect();
        if states.len() != masses.len() {
            return Err(Error::DimensionMismatch {
                expected: states.len(),
                got: masses.len(),
            });
        }
        if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::InvalidTarget(format!("mass {m} is not positive")));
        }
        Self::assemble(levels, states, masses)
    }

    fn assemble(levels: Vec<Vec<f64>>, states: Vec<Vec<usize>>, mass: Vec<f64>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyStateSpace);
        }
        let total: f64 = mass.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidTarget(format!("total mass {total}")));
        }
        let pi = mass.iter().map(|m| m / total).collect();
        let index = states
            .iter()
            .enumerate()
            .map(|(k, s)| (s.clone(), k))
            .collect();
        Ok(Self {
            levels,
            states,
            mass,
            pi,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    /// Normalized stationary probabilities in enumeration order.
    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn unnormalized_mass(&self, k: usize) -> f64 {
        self.mass[k]
    }

    pub fn state_indices(&self, k: usize) -> &[usize] {
        &self.states[k]
    }

    pub fn state_values(&self, k: usize) -> Vec<f64> {
        self.states[k]
            .iter()
            .enumerate()
            .map(|(c, &l)| self.levels[c][l])
            .collect()
    }

    pub fn all_state_values(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|k| self.state_values(k)).collect()
    }

    pub fn index_of(&self, indices: &[usize]) -> Option<usize> {
        self.index.get(indices).copied()
    }

    /// Looks up a state by coordinate values (exact match against levels).
    pub fn index_of_values(&self, values: &[f64]) -> Option<usize> {
        if values.len() != self.dim() {
            return None;
        }
        let idx: Option<Vec<usize>> = values
            .iter()
            .enumerate()
            .map(|(c, v)| self.levels[c].iter().position(|l| l == v))
            .collect();
        idx.and_then(|i| self.index_of(&i))
    }

    /// Admitted states that agree with state `k` off coordinate `i`, as
    /// `(level index, state index)` pairs in level order. Includes `k`.
    pub fn coordinate_neighbours(&self, k: usize, i: usize) -> Vec<(usize, usize)> {
        let mut probe = self.states[k].clone();
        (0..self.levels[i].len())
            .filter_map(|l| {
                probe[i] = l;
                self.index_of(&probe).map(|s| (l, s))
            })
            .collect()
    }

    /// Full conditional `π(· | x_{-i})` at state `k`, as `(state index,
    /// probability)` pairs.
    pub fn conditional(&self, k: usize, i: usize) -> Vec<(usize, f64)> {
        let nb = self.coordinate_neighbours(k, i);
        let total: f64 = nb.iter().map(|&(_, s)| self.mass[s]).sum();
        nb.into_iter()
            .map(|(_, s)| (s, self.mass[s] / total))
            .collect()
    }

    pub fn label(&self, k: usize) -> String {
        state_label(&self.state_values(k))
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.len()).map(|k| self.label(k)).collect()
    }
}

fn product_indices(levels: &[Vec<f64>]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = levels.iter().map(Vec::len).product();
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; levels.len()];
        for c in (0..levels.len()).rev() {
            let n = levels[c].len();
            idx[c] = flat % n;
            flat /= n;
        }
        idx
    })
}

/// A one-dimensional density with compact support.
pub trait BaseDensity: Send + Sync {
    fn density(&self, z: f64) -> f64;
    fn support(&self) -> (f64, f64);
    fn name(&self) -> &'static str;
}

/// `g(z) = (3/4)(1 − z²)` on `[−1, 1]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Epanechnikov;

impl BaseDensity for Epanechnikov {
    fn density(&self, z: f64) -> f64 {
        if z.abs() <= 1.0 {
            0.75 * (1.0 - z * z)
        } else {
            0.0
        }
    }
    fn support(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }
    fn name(&self) -> &'static str {
        "epanechnikov"
    }
}

/// `g(z) = 1 − |z|` on `[−1, 1]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Triangular;

impl BaseDensity for Triangular {
    fn density(&self, z: f64) -> f64 {
        (1.0 - z.abs()).max(0.0)
    }
    fn support(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }
    fn name(&self) -> &'static str {
        "triangular"
    }
}

/// Looks up a base density by name.
pub fn base_density(name: &str) -> Result<Box<dyn BaseDensity>> {
    match name {
        "epanechnikov" => Ok(Box::new(Epanechnikov)),
        "triangular" => Ok(Box::new(Triangular)),
        other => Err(Error::InvalidTarget(format!("unknown base density {other}"))),
    }
}

const QUADRATURE_PANELS: usize = 20_000;

/// Composite Simpson rule on `[lo, hi]` with an even panel count.
pub fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
    let n = panels + panels % 2;
    let h = (hi - lo) / n as f64;
    let mut acc = f(lo) + f(hi);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + k as f64 * h);
    }
    acc * h / 3.0
}

/// `π(x) = ∏ C_i g(C_i x_i)` with the linear observable `f(x) = a_0 + Σ a_i x_i`.
pub struct ContinuousProductTarget {
    scales: Vec<f64>,
    base: Box<dyn BaseDensity>,
    base_variance: f64,
    a0: f64,
    a: Vec<f64>,
}

impl fmt::Debug for ContinuousProductTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuousProductTarget")
            .field("scales", &self.scales)
            .field("base", &self.base.name())
            .field("base_variance", &self.base_variance)
            .field("a0", &self.a0)
            .field("a", &self.a)
            .finish()
    }
}

impl ContinuousProductTarget {
    pub fn new(scales: Vec<f64>, base: Box<dyn BaseDensity>, a0: f64, a: Vec<f64>) -> Result<Self> {
        if scales.is_empty() {
            return Err(Error::EmptyStateSpace);
        }
        if scales.len() != a.len() {
            return Err(Error::DimensionMismatch {
                expected: scales.len(),
                got: a.len(),
            });
        }
        if scales.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::InvalidTarget("scales must be positive".into()));
        }
        let (lo, hi) = base.support();
        let mass = simpson(|z| base.density(z), lo, hi, QUADRATURE_PANELS);
        if (mass - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidTarget(format!(
                "base density integrates to {mass}"
            )));
        }
        let mean = simpson(|z| z * base.density(z), lo, hi, QUADRATURE_PANELS);
        let second = simpson(|z| z * z * base.density(z), lo, hi, QUADRATURE_PANELS);
        let base_variance = second - mean * mean;
        if !(base_variance.is_finite() && base_variance > 0.0) {
            return Err(Error::InvalidTarget(format!(
                "base variance {base_variance}"
            )));
        }
        Ok(Self {
            scales,
            base,
            base_variance,
            a0,
            a,
        })
    }

    pub fn dim(&self) -> usize {
        self.scales.len()
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn coefficients(&self) -> (f64, &[f64]) {
        (self.a0, &self.a)
    }

    /// `σ² = Var_g(Z)`.
    pub fn base_variance(&self) -> f64 {
        self.base_variance
    }

    pub fn base(&self) -> &dyn BaseDensity {
        self.base.as_ref()
    }

    /// Stationary variance of coordinate `i`: `σ² / C_i²`.
    pub fn coordinate_variance(&self, i: usize) -> f64 {
        self.base_variance / (self.scales[i] * self.scales[i])
    }

    pub fn marginal_density(&self, i: usize, xi: f64) -> f64 {
        let c = self.scales[i];
        c * self.base.density(c * xi)
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        x.iter()
            .enumerate()
            .map(|(i, &xi)| self.marginal_density(i, xi))
            .product()
    }

    pub fn observable(&self, x: &[f64]) -> f64 {
        self.a0 + self.a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>()
    }

    /// `Var_π f = Σ a_i² σ² / C_i²`.
    pub fn observable_variance(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.a[i] * self.a[i] * self.coordinate_variance(i))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_enumeration_and_lookup() {
        let t = FiniteProductTarget::from_masses(
            vec![vec![0.0, 1.0], vec![0.0, 1.0, 2.0]],
            vec![1.0; 6],
        )
        .unwrap();
        assert_eq!(t.len(), 6);
        assert_eq!(t.state_values(1), vec![0.0, 1.0]);
        assert_eq!(t.state_values(3), vec![1.0, 0.0]);
        assert_eq!(t.index_of_values(&[1.0, 2.0]), Some(5));
        assert_eq!(t.label(5), "(1,2)");
    }

    #[test]
    fn support_predicate_and_conditionals() {
        let levels = vec![(1..=3).map(f64::from).collect(), (1..=3).map(f64::from).collect()];
        let t = FiniteProductTarget::new(
            levels,
            |x: &[f64]| x[1].powi(-2),
            Some(|x: &[f64]| x[0] == x[1] || x[0] == x[1] + 1.0),
        )
        .unwrap();
        assert_eq!(t.len(), 5);
        // at (2,2) the second coordinate chooses between (2,1) and (2,2)
        let k = t.index_of_values(&[2.0, 2.0]).unwrap();
        let cond = t.conditional(k, 1);
        assert_eq!(cond.len(), 2);
        let p21 = cond
            .iter()
            .find(|(s, _)| *s == t.index_of_values(&[2.0, 1.0]).unwrap())
            .unwrap()
            .1;
        assert!((p21 - 0.8).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_mass() {
        let r = FiniteProductTarget::from_masses(vec![vec![0.0, 1.0]], vec![1.0, 0.0]);
        assert!(r.is_err());
        let r = FiniteProductTarget::from_masses(vec![vec![]], vec![]);
        assert!(matches!(r, Err(Error::EmptyStateSpace)));
    }

    #[test]
    fn base_densities_have_known_variances() {
        let t = ContinuousProductTarget::new(vec![1.0, 2.0], Box::new(Epanechnikov), 0.0, vec![1.0, 1.0])
            .unwrap();
        assert!((t.base_variance() - 0.2).abs() < 1e-10);
        assert!((t.coordinate_variance(1) - 0.05).abs() < 1e-10);
        let t = ContinuousProductTarget::new(vec![1.0], Box::new(Triangular), 0.0, vec![1.0]).unwrap();
        assert!((t.base_variance() - 1.0 / 6.0).abs() < 1e-10);
    }

    struct Unnormalized;
    impl BaseDensity for Unnormalized {
        fn density(&self, z: f64) -> f64 {
            if z.abs() <= 1.0 {
                1.0
            } else {
                0.0
            }
        }
        fn support(&self) -> (f64, f64) {
            (-1.0, 1.0)
        }
        fn name(&self) -> &'static str {
            "unnormalized"
        }
    }

    #[test]
    fn rejects_unnormalized_base() {
        let r = ContinuousProductTarget::new(vec![1.0], Box::new(Unnormalized), 0.0, vec![1.0]);
        assert!(r.is_err());
    }
}
