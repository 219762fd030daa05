use adagibbs::fixtures::{random_centered_observable, random_reversible_chain, random_simplex_point};
use adagibbs::kernels::{
    gibbs_kernel_matrix, metropolis_kernel_matrix, mwg_kernel_matrix, DistributionVector, StateSpace,
};
use adagibbs::rng::rng_from_seed;
use adagibbs::target::FiniteProductTarget;
use adagibbs::variance::{
    autocovariance_asymptotic_variance, center, iact_estimate, lazy_variance, optimal_selection_weights,
    scan_autocorrelation_relation, second_moment, spectral_asymptotic_variance, ReversibleChain,
};
use adagibbs::SelectionWeights;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// `2⟨h, Z h⟩_π − ⟨h, h⟩_π` with the fundamental matrix `Z = (I − P + 1π)^{-1}`.
fn fundamental_matrix_variance(chain: &ReversibleChain, h: &[f64]) -> f64 {
    let pi = chain.pi();
    let n = pi.len();
    let p = chain.kernel().matrix();
    let a = DMatrix::from_fn(n, n, |x, y| if x == y { 1.0 } else { 0.0 } - p[(x, y)] + pi[y]);
    let z = a.try_inverse().unwrap();
    let zh: Vec<f64> = (0..n).map(|x| (0..n).map(|y| z[(x, y)] * h[y]).sum()).collect();
    let inner = |f: &[f64]| (0..n).map(|x| pi[x] * h[x] * f[x]).sum::<f64>();
    2.0 * inner(&zh) - inner(h)
}

#[test]
fn spectral_variance_matches_independent_formulas() {
    let mut rng = rng_from_seed(41);
    for _ in 0..50 {
        let chain = random_reversible_chain(&mut rng, 6, 0.3).unwrap();
        let h = random_centered_observable(&mut rng, chain.pi());
        let spectral = spectral_asymptotic_variance(&chain, &h).unwrap();
        let fundamental = fundamental_matrix_variance(&chain, &h);
        let lagged = autocovariance_asymptotic_variance(&chain, &h, 20_000).unwrap();
        assert!((spectral - fundamental).abs() <= 1e-8 * fundamental.max(1.0));
        assert!((spectral - lagged).abs() <= 1e-8 * lagged.max(1.0), "{spectral} vs {lagged}");
    }
}

#[test]
fn spectral_weights_satisfy_parseval() {
    let mut rng = rng_from_seed(42);
    for n in 2..10 {
        let chain = random_reversible_chain(&mut rng, n, 0.5).unwrap();
        let h = random_centered_observable(&mut rng, chain.pi());
        let w: f64 = chain.spectrum().weights(&h).iter().sum();
        assert!((w - second_moment(&h, chain.pi())).abs() < 1e-10);
    }
}

#[test]
fn lazy_chain_variance_identity_and_monotonicity() {
    let mut rng = rng_from_seed(43);
    for _ in 0..20 {
        let chain = random_reversible_chain(&mut rng, 5, 0.2).unwrap();
        let h = random_centered_observable(&mut rng, chain.pi());
        let sigma2 = spectral_asymptotic_variance(&chain, &h).unwrap();
        let ph2 = second_moment(&h, chain.pi());
        let mut prev = f64::INFINITY;
        for k in 1..=20 {
            let delta = k as f64 / 20.0;
            let direct = spectral_asymptotic_variance(&chain.lazy(delta).unwrap(), &h).unwrap();
            let identity = lazy_variance(sigma2, delta, ph2).unwrap();
            assert!((direct - identity).abs() <= 1e-9 * identity);
            assert!(identity < prev);
            prev = identity;
        }
    }
}

/// Product target with the given marginals, in row-major state order.
fn product_target(marginals: &[Vec<f64>]) -> FiniteProductTarget {
    let levels: Vec<Vec<f64>> = marginals.iter().map(|m| (0..m.len()).map(|v| v as f64).collect()).collect();
    let mut masses = vec![1.0];
    for m in marginals {
        masses = masses.iter().flat_map(|a| m.iter().map(move |b| a * b)).collect();
    }
    FiniteProductTarget::from_masses(levels, masses).unwrap()
}

fn coordinate_observable(target: &FiniteProductTarget, i: usize) -> Vec<f64> {
    (0..target.len()).map(|k| target.state_values(k)[i]).collect()
}

fn tau(chain: &ReversibleChain, h: &[f64]) -> f64 {
    spectral_asymptotic_variance(chain, h).unwrap() / second_moment(&center(h, chain.pi()), chain.pi())
}

#[test]
fn random_scan_gibbs_on_product_target_follows_scan_relation() {
    let mut rng = rng_from_seed(44);
    for _ in 0..20 {
        let marginals: Vec<Vec<f64>> = (0..3)
            .map(|_| {
                let l = rng.random_range(2..4);
                random_simplex_point(&mut rng, l)
            })
            .collect();
        let target = product_target(&marginals);
        let alpha = SelectionWeights::new(random_simplex_point(&mut rng, 3).iter().map(|w| 0.05 + 0.85 * w).collect(), 0.05)
            .unwrap();
        let chain = ReversibleChain::new(
            gibbs_kernel_matrix(&target, &alpha).unwrap(),
            DistributionVector::stationary_of(&target),
        )
        .unwrap();
        for i in 0..3 {
            let expected = scan_autocorrelation_relation(1.0, alpha.get(i)).unwrap();
            let got = tau(&chain, &coordinate_observable(&target, i));
            assert!((got - expected).abs() < 1e-8 * expected, "{got} vs {expected}");
        }
    }
}

#[test]
fn random_scan_mwg_on_product_target_follows_scan_relation() {
    let mut rng = rng_from_seed(45);
    for _ in 0..20 {
        let sizes = [3, 4];
        let marginals: Vec<Vec<f64>> = sizes.iter().map(|&l| random_simplex_point(&mut rng, l)).collect();
        let target = product_target(&marginals);
        let proposals: Vec<DMatrix<f64>> = sizes
            .iter()
            .map(|&l| {
                let rows: Vec<Vec<f64>> = (0..l).map(|_| random_simplex_point(&mut rng, l)).collect();
                DMatrix::from_fn(l, l, |a, b| rows[a][b])
            })
            .collect();
        let alpha = SelectionWeights::new(vec![0.3, 0.7], 0.1).unwrap();
        let chain = ReversibleChain::new(
            mwg_kernel_matrix(&target, &alpha, &proposals).unwrap(),
            DistributionVector::stationary_of(&target),
        )
        .unwrap();
        for i in 0..2 {
            let k = metropolis_kernel_matrix(&marginals[i], &proposals[i]).unwrap();
            let refresh = ReversibleChain::new(
                k,
                DistributionVector::new(StateSpace::indexed(sizes[i]).unwrap(), marginals[i].clone()).unwrap(),
            )
            .unwrap();
            let levels: Vec<f64> = (0..sizes[i]).map(|v| v as f64).collect();
            let tau_tilde = tau(&refresh, &levels);
            let expected = scan_autocorrelation_relation(tau_tilde, alpha.get(i)).unwrap();
            let got = tau(&chain, &coordinate_observable(&target, i));
            assert!((got - expected).abs() < 1e-8 * expected, "{got} vs {expected}");
        }
    }
}

#[test]
fn optimal_weights_minimize_weighted_inverse_sum() {
    // with τ_i ≈ τ̃/α_i, the variance of Σ a_i x_i is ∝ Σ a_i² v_i / α_i
    let a = [1.0, 2.0, 0.5];
    let v = [1.0, 0.3, 4.0];
    let objective = |w: &[f64]| (0..3).map(|i| a[i] * a[i] * v[i] / w[i]).sum::<f64>();
    let step = 0.001;
    let mut best = (f64::INFINITY, [0.0; 3]);
    for i in 1..1000 {
        for j in 1..(1000 - i) {
            let w = [i as f64 * step, j as f64 * step, 1.0 - (i + j) as f64 * step];
            let f = objective(&w);
            if f < best.0 {
                best = (f, w);
            }
        }
    }
    let opt = optimal_selection_weights(&a, &v, 0.01).unwrap();
    for i in 0..3 {
        assert!((opt.get(i) - best.1[i]).abs() < 2.0 * step, "{:?} vs {:?}", opt.as_slice(), best.1);
    }
    assert!(objective(opt.as_slice()) <= best.0 + 1e-12);
}

#[test]
fn iact_of_iid_and_ar1_traces() {
    let mut rng = rng_from_seed(46);
    let iid: Vec<f64> = (0..100_000).map(|_| rng.sample(StandardNormal)).collect();
    let t = iact_estimate(&iid).unwrap();
    assert!((t - 1.0).abs() < 0.15, "iid: {t}");

    let rho = 0.5;
    let mut x = 0.0;
    let ar: Vec<f64> = (0..100_000)
        .map(|_| {
            let e: f64 = rng.sample(StandardNormal);
            x = rho * x + e;
            x
        })
        .collect();
    let t = iact_estimate(&ar).unwrap();
    assert!((t - 3.0).abs() < 0.45, "ar(1): {t}");
}

#[test]
fn iact_of_simulated_chain_matches_spectral_value() {
    let mut rng = rng_from_seed(47);
    let chain = random_reversible_chain(&mut rng, 6, 0.4).unwrap();
    let h = random_centered_observable(&mut rng, chain.pi());
    let exact = tau(&chain, &h);
    let p = chain.kernel();
    let mut x = 0;
    let trace: Vec<f64> = (0..1_000_000)
        .map(|_| {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut next = p.len() - 1;
            for y in 0..p.len() {
                acc += p.entry(x, y);
                if u < acc {
                    next = y;
                    break;
                }
            }
            x = next;
            h[x]
        })
        .collect();
    let est = iact_estimate(&trace).unwrap();
    assert!((est / exact - 1.0).abs() < 0.15, "{est} vs {exact}");
}
