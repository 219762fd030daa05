use std::sync::Arc;

use adagibbs::kernels::{gibbs_kernel_matrix, mwg_kernel_matrix, DistributionVector, TransitionMatrix};
use adagibbs::ladder::{LadderRule, LadderTarget, Schedule, SharedSchedule, LADDER_EPSILON};
use adagibbs::rng::rng_from_seed;
use adagibbs::samplers::{adap_rsg_run, adap_rsmwg_run, rsg_run, Constant, FiniteProposal, Trajectory};
use adagibbs::target::FiniteProductTarget;
use adagibbs::variance::{spectral_asymptotic_variance, ReversibleChain};
use adagibbs::SelectionWeights;
use nalgebra::DMatrix;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn state_index(target: &FiniteProductTarget, x: &[f64]) -> usize {
    target.index_of_values(x).expect("state in support")
}

/// Occupation frequencies lie within 3 standard errors of `π`, with the
/// standard errors taken from the exact asymptotic variance of each
/// indicator under `p`.
fn assert_occupation_within_3se(target: &FiniteProductTarget, p: TransitionMatrix, t: &Trajectory) {
    let pi = target.pi().to_vec();
    let chain = ReversibleChain::new(p, DistributionVector::stationary_of(target)).unwrap();
    let n = t.n_steps() as f64;
    let mut counts = vec![0.0; pi.len()];
    for x in &t.states[1..] {
        counts[state_index(target, x)] += 1.0;
    }
    for k in 0..pi.len() {
        let h: Vec<f64> = (0..pi.len()).map(|y| if y == k { 1.0 - pi[k] } else { -pi[k] }).collect();
        let se = (spectral_asymptotic_variance(&chain, &h).unwrap() / n).sqrt();
        let freq = counts[k] / n;
        assert!((freq - pi[k]).abs() < 3.0 * se, "state {k}: {freq} vs {} (se {se})", pi[k]);
    }
}

/// Chi-square statistic of observed transition counts against `p`.
fn transition_chi_square(target: &FiniteProductTarget, p: &TransitionMatrix, t: &Trajectory) -> f64 {
    let n = target.len();
    let mut counts = DMatrix::<f64>::zeros(n, n);
    for w in t.states.windows(2) {
        counts[(state_index(target, &w[0]), state_index(target, &w[1]))] += 1.0;
    }
    let mut stat = 0.0;
    let mut df = 0.0;
    for x in 0..n {
        let total: f64 = counts.row(x).sum();
        let support: Vec<usize> = (0..n).filter(|&y| p.entry(x, y) > 0.0).collect();
        for &y in &support {
            let e = total * p.entry(x, y);
            stat += (counts[(x, y)] - e).powi(2) / e;
        }
        for y in 0..n {
            assert!(p.entry(x, y) > 0.0 || counts[(x, y)] == 0.0, "impossible move {x} -> {y}");
        }
        df += support.len() as f64 - 1.0;
    }
    1.0 - ChiSquared::new(df).unwrap().cdf(stat)
}

fn three_state_target() -> FiniteProductTarget {
    // non-rectangular support {(0,0), (0,1), (1,1)}
    FiniteProductTarget::new(
        vec![vec![0.0, 1.0], vec![0.0, 1.0]],
        |x: &[f64]| 1.0 + x[0] + 2.0 * x[1],
        Some(|x: &[f64]| x[0] <= x[1]),
    )
    .unwrap()
}

#[test]
fn rsg_occupation_matches_stationary_vector() {
    let target = three_state_target();
    assert_eq!(target.len(), 3);
    let alpha = SelectionWeights::new(vec![0.3, 0.7], 0.1).unwrap();
    let t = rsg_run(&target, &alpha, &[0.0, 0.0], 1_000_000, 21).unwrap();
    assert_occupation_within_3se(&target, gibbs_kernel_matrix(&target, &alpha).unwrap(), &t);
}

#[test]
fn rsg_transition_frequencies_pass_chi_square() {
    let target = FiniteProductTarget::from_masses(
        vec![vec![0.0, 1.0, 2.0], vec![0.0, 1.0]],
        vec![0.1, 0.3, 0.2, 0.15, 0.05, 0.2],
    )
    .unwrap();
    let alpha = SelectionWeights::new(vec![0.6, 0.4], 0.1).unwrap();
    let t = rsg_run(&target, &alpha, &[0.0, 0.0], 1_000_000, 22).unwrap();
    let p = gibbs_kernel_matrix(&target, &alpha).unwrap();
    let p_value = transition_chi_square(&target, &p, &t);
    assert!(p_value > 1e-3, "p = {p_value}");
}

#[test]
fn one_coordinate_rsg_draws_iid_from_pi() {
    let target = FiniteProductTarget::from_masses(vec![vec![1.0, 2.0, 3.0, 4.0]], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    let alpha = SelectionWeights::uniform(1, 1.0).unwrap();
    let t = rsg_run(&target, &alpha, &[1.0], 200_000, 23).unwrap();
    let mut counts = [0.0; 4];
    for x in &t.states[1..] {
        counts[x[0] as usize - 1] += 1.0;
    }
    let n = t.n_steps() as f64;
    let stat: f64 = (0..4)
        .map(|k| {
            let e = n * target.pi()[k];
            (counts[k] - e).powi(2) / e
        })
        .sum();
    assert!(1.0 - ChiSquared::new(3.0).unwrap().cdf(stat) > 1e-3);
}

#[test]
fn mwg_occupation_matches_stationary_vector() {
    let levels = vec![vec![0.0, 1.0, 2.0], vec![0.0, 1.0]];
    let target = FiniteProductTarget::from_masses(levels.clone(), vec![0.3, 0.1, 0.2, 0.05, 0.25, 0.1]).unwrap();
    let q1 = vec![vec![0.2, 0.5, 0.3], vec![0.4, 0.2, 0.4], vec![0.6, 0.3, 0.1]];
    let q2 = vec![vec![0.3, 0.7], vec![0.5, 0.5]];
    let proposals = FiniteProposal::new(levels, vec![q1.clone(), q2.clone()]).unwrap();
    let alpha = SelectionWeights::new(vec![0.45, 0.55], 0.1).unwrap();
    let t = adap_rsmwg_run(&target, &proposals, &[1.0, 1.0], Constant, &[0.0, 0.0], &alpha, 1_000_000, 24).unwrap();
    let m = |rows: &[Vec<f64>]| DMatrix::from_fn(rows.len(), rows.len(), |a, b| rows[a][b]);
    let p = mwg_kernel_matrix(&target, &alpha, &[m(&q1), m(&q2)]).unwrap();
    assert!(transition_chi_square(&target, &p, &t) > 1e-3);
    assert_occupation_within_3se(&target, p, &t);
}

#[test]
fn ladder_run_matches_hand_simulation() {
    let seed = 25;
    let schedule = SharedSchedule(Arc::new(Schedule::covering(100)));
    let alpha0 = SelectionWeights::new(vec![0.5, 0.5], LADDER_EPSILON).unwrap();
    let t = adap_rsg_run(
        &LadderTarget::unbounded(),
        LadderRule { sequence: schedule },
        &[1.0, 1.0],
        &alpha0,
        100,
        seed,
    )
    .unwrap();

    // straight-line replay: a_n = 10 for n <= 1000; one uniform picks the
    // coordinate, one uniform draws the conditional (ascending values)
    let mut rng = rng_from_seed(seed);
    let (mut i, mut j) = (1u64, 1u64);
    for n in 1..=100 {
        let first = if i == j { 0.5 + 0.4 } else { 0.5 - 0.4 };
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        if u < first {
            i = if v < 0.5 { j } else { j + 1 };
        } else if i > 1 {
            let (a, b) = ((i * i) as f64, ((i - 1) * (i - 1)) as f64);
            j = if v < a / (a + b) { i - 1 } else { i };
        }
        assert_eq!(t.states[n], vec![i as f64, j as f64], "step {n}");
        assert_eq!(t.coordinates[n - 1], if u < first { 0 } else { 1 });
    }
}

#[test]
fn ladder_weight_changes_respect_rule_bound() {
    let n = 100_000;
    let schedule = Arc::new(Schedule::covering(n));
    let alpha0 = SelectionWeights::new(vec![0.5, 0.5], LADDER_EPSILON).unwrap();
    let t = adap_rsg_run(
        &LadderTarget::unbounded(),
        LadderRule {
            sequence: SharedSchedule(schedule.clone()),
        },
        &[1.0, 1.0],
        &alpha0,
        n,
        26,
    )
    .unwrap();
    for k in 1..=n {
        let a_n = schedule.a(k).unwrap();
        let a_prev = schedule.a(k.max(2) - 1).unwrap();
        let gap = (t.alphas[k][0] - t.alphas[k - 1][0]).abs();
        let bound = 8.0 * (1.0 / a_n - 1.0 / a_prev).abs() + 16.0 / a_n;
        assert!(gap <= bound + 1e-15, "step {k}: {gap} > {bound}");
    }
}

#[test]
fn trajectory_csv_roundtrip_through_file() {
    let target = three_state_target();
    let alpha = SelectionWeights::new(vec![0.5, 0.5], 0.1).unwrap();
    let t = rsg_run(&target, &alpha, &[0.0, 1.0], 500, 27).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    t.save(&path).unwrap();
    let back = Trajectory::load(&path).unwrap();
    assert_eq!(back.states, t.states);
    assert_eq!(back.coordinates, t.coordinates);
    assert_eq!(back.alphas, t.alphas);
}
