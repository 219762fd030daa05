//! Random instances for property checks: points of Y, finite product
//! targets, reversible and general ergodic chains, observables.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::Result;
use crate::kernels::{DistributionVector, StateSpace, TransitionMatrix};
use crate::target::FiniteProductTarget;
use crate::variance::{center, ReversibleChain};
use crate::weights::SelectionWeights;

/// Uniform point of the probability simplex.
pub fn random_simplex_point<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..d).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// Uniform point of `Y = {α ∈ Δ : α_i ≥ ε}`.
pub fn random_weights<R: Rng + ?Sized>(rng: &mut R, d: usize, epsilon: f64) -> Result<SelectionWeights> {
    let free = 1.0 - d as f64 * epsilon;
    let w = random_simplex_point(rng, d)
        .into_iter()
        .map(|x| epsilon + free * x)
        .collect::<Vec<_>>();
    let s: f64 = w.iter().sum();
    SelectionWeights::new(w.into_iter().map(|x| x / s).collect(), epsilon)
}

/// Rectangular target with `1..=d_max` coordinates, `2..=levels_max` levels
/// each, and masses uniform on `[0.05, 1]`.
pub fn random_product_target<R: Rng + ?Sized>(rng: &mut R, d_max: usize, levels_max: usize) -> Result<FiniteProductTarget> {
    let d = rng.random_range(1..=d_max);
    let levels: Vec<Vec<f64>> = (0..d)
        .map(|_| {
            let l = rng.random_range(2..=levels_max.max(2));
            (0..l).map(|v| v as f64).collect()
        })
        .collect();
    let n: usize = levels.iter().map(Vec::len).product();
    let masses = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    FiniteProductTarget::from_masses(levels, masses)
}

/// Reversible chain on `n` states from symmetric conductances `w_{xy}`:
/// `P(x,y) = w_{xy}/Σ_z w_{xz}`, `π_x ∝ Σ_z w_{xz}`. Off-diagonal
/// conductances are zeroed with probability `sparsity`, but the path
/// `0 − 1 − ... − (n−1)` and all self-loops are kept so the chain is
/// irreducible and aperiodic.
pub fn random_reversible_chain<R: Rng + ?Sized>(rng: &mut R, n: usize, sparsity: f64) -> Result<ReversibleChain> {
    let mut w = DMatrix::zeros(n, n);
    for x in 0..n {
        for y in x..n {
            let keep = y == x || y == x + 1 || rng.random::<f64>() >= sparsity;
            let v: f64 = if keep { rng.random_range(0.05..1.0) } else { 0.0 };
            w[(x, y)] = v;
            w[(y, x)] = v;
        }
    }
    let rows: Vec<f64> = (0..n).map(|x| w.row(x).sum()).collect();
    let total: f64 = rows.iter().sum();
    let p = DMatrix::from_fn(n, n, |x, y| w[(x, y)] / rows[x]);
    let space = StateSpace::indexed(n)?;
    let pi = DistributionVector::new(space.clone(), rows.iter().map(|r| r / total).collect())?;
    ReversibleChain::new(TransitionMatrix::new(space, p)?, pi)
}

/// Ergodic (not necessarily reversible) chain with strictly positive rows.
pub fn random_ergodic_chain<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<TransitionMatrix> {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| random_simplex_point(rng, n)).collect();
    TransitionMatrix::new(StateSpace::indexed(n)?, DMatrix::from_fn(n, n, |x, y| rows[x][y]))
}

/// Observable with standard normal-ish entries, centered under `pi`.
pub fn random_centered_observable<R: Rng + ?Sized>(rng: &mut R, pi: &[f64]) -> Vec<f64> {
    let h: Vec<f64> = pi.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
    center(&h, pi)
}
