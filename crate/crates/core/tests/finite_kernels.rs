use adagibbs::fixtures::{random_ergodic_chain, random_product_target, random_simplex_point, random_weights};
use adagibbs::kernels::{
    gibbs_kernel_matrix, kernel_tv_sup, metropolis_kernel_matrix, mwg_kernel_matrix, stationary_by_linear_solve,
    stationary_by_power_iteration, stationary_distribution, tv_distance, DistributionVector, StateSpace,
    TransitionMatrix, POWER_ITERATION_CAP,
};
use adagibbs::ladder::LadderTarget;
use adagibbs::rng::rng_from_seed;
use adagibbs::target::FiniteProductTarget;
use adagibbs::SelectionWeights;
use nalgebra::DMatrix;
use rand::Rng;

fn random_proposal<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| random_simplex_point(rng, n)).collect();
    DMatrix::from_fn(n, n, |a, b| rows[a][b])
}

fn pi_residual(p: &TransitionMatrix, pi: &[f64]) -> f64 {
    (0..pi.len())
        .map(|y| ((0..pi.len()).map(|x| pi[x] * p.entry(x, y)).sum::<f64>() - pi[y]).abs())
        .sum()
}

#[test]
fn truncated_ladder_rows_match_hand_enumeration() {
    let target = LadderTarget::truncated(3).unwrap().finite().unwrap();
    let alpha = SelectionWeights::new(vec![0.7, 0.3], 0.01).unwrap();
    let p = gibbs_kernel_matrix(&target, &alpha).unwrap();
    let at = |i: f64, j: f64| target.index_of_values(&[i, j]).unwrap();

    // (1,1): coordinate 1 goes to {1, 2} with probability 1/2 each; j given
    // i = 1 is pinned at 1.
    let x = at(1.0, 1.0);
    assert!((p.entry(x, at(2.0, 1.0)) - 0.35).abs() < 1e-15);
    assert!((p.entry(x, x) - 0.65).abs() < 1e-15);

    // (2,1): i given j = 1 is uniform on {1, 2}; j given i = 2 has masses
    // 1 and 1/4 on j = 1, 2.
    let x = at(2.0, 1.0);
    assert!((p.entry(x, at(1.0, 1.0)) - 0.35).abs() < 1e-15);
    assert!((p.entry(x, at(2.0, 2.0)) - 0.3 * 0.2).abs() < 1e-15);
    assert!((p.entry(x, x) - (0.35 + 0.3 * 0.8)).abs() < 1e-15);

    // (3,3): the truncation forbids (4,3), so coordinate 1 never moves.
    let x = at(3.0, 3.0);
    let to_32 = 0.3 * 9.0 / 13.0;
    assert!((p.entry(x, at(3.0, 2.0)) - to_32).abs() < 1e-15);
    assert!((p.entry(x, x) - (1.0 - to_32)).abs() < 1e-15);
}

#[test]
fn gibbs_kernels_are_reversible_and_stationary() {
    let mut rng = rng_from_seed(11);
    for _ in 0..100 {
        let target = random_product_target(&mut rng, 3, 4).unwrap();
        let alpha = random_weights(&mut rng, target.dim(), 0.1).unwrap();
        let p = gibbs_kernel_matrix(&target, &alpha).unwrap();
        assert!(pi_residual(&p, target.pi()) <= 1e-10);
        assert!(p.detailed_balance_residual(target.pi()) <= 1e-10);
    }
}

#[test]
fn mwg_kernel_on_random_three_by_three_target() {
    let mut rng = rng_from_seed(12);
    for _ in 0..50 {
        let levels = vec![vec![0.0, 1.0, 2.0]; 2];
        let masses = (0..9).map(|_| rng.random_range(0.05..1.0)).collect();
        let target = FiniteProductTarget::from_masses(levels, masses).unwrap();
        let alpha = random_weights(&mut rng, 2, 0.1).unwrap();
        let proposals = vec![random_proposal(&mut rng, 3), random_proposal(&mut rng, 3)];
        let p = mwg_kernel_matrix(&target, &alpha, &proposals).unwrap();
        for x in 0..9 {
            assert!((p.row(x).iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
        assert!(pi_residual(&p, target.pi()) <= 1e-12);
        assert!(p.detailed_balance_residual(target.pi()) <= 1e-12);
    }
}

#[test]
fn mwg_off_diagonal_entries_follow_acceptance_formula() {
    // brute force: α_i q(x_i → y_i) min(1, π(y) q(y_i → x_i) / (π(x) q(x_i → y_i)))
    let mut rng = rng_from_seed(13);
    let levels = vec![vec![0.0, 1.0, 2.0], vec![0.0, 1.0]];
    let masses: Vec<f64> = (0..6).map(|_| rng.random_range(0.05..1.0)).collect();
    let target = FiniteProductTarget::from_masses(levels.clone(), masses).unwrap();
    let alpha = SelectionWeights::new(vec![0.4, 0.6], 0.1).unwrap();
    let q = vec![random_proposal(&mut rng, 3), random_proposal(&mut rng, 2)];
    let p = mwg_kernel_matrix(&target, &alpha, &q).unwrap();
    let pi = target.pi();
    for x in 0..target.len() {
        let xi = target.state_indices(x).to_vec();
        for y in 0..target.len() {
            let yi = target.state_indices(y).to_vec();
            let differ: Vec<usize> = (0..2).filter(|&c| xi[c] != yi[c]).collect();
            if differ.len() != 1 {
                continue;
            }
            let c = differ[0];
            let fwd = q[c][(xi[c], yi[c])];
            let back = q[c][(yi[c], xi[c])];
            let expected = if fwd == 0.0 {
                0.0
            } else {
                alpha.get(c) * fwd * (pi[y] * back / (pi[x] * fwd)).min(1.0)
            };
            assert!((p.entry(x, y) - expected).abs() < 1e-15, "{x} -> {y}");
        }
    }
}

#[test]
fn tv_triangle_inequality_and_contraction() {
    let mut rng = rng_from_seed(14);
    for _ in 0..200 {
        let n = rng.random_range(2..8);
        let space = StateSpace::indexed(n).unwrap();
        let mut draw = || DistributionVector::new(space.clone(), random_simplex_point(&mut rng, n)).unwrap();
        let (a, b, c) = (draw(), draw(), draw());
        let ab = tv_distance(&a, &b).unwrap();
        let bc = tv_distance(&b, &c).unwrap();
        let ac = tv_distance(&a, &c).unwrap();
        assert!(ac <= ab + bc + 1e-15);
        let p = random_ergodic_chain(&mut rng, n).unwrap();
        let (pa, pb) = (p.push_forward(&a).unwrap(), p.push_forward(&b).unwrap());
        assert!(tv_distance(&pa, &pb).unwrap() <= ab + 1e-15);
    }
}

#[test]
fn kernel_tv_sup_matches_row_scan() {
    let mut rng = rng_from_seed(15);
    for _ in 0..50 {
        let n = rng.random_range(2..7);
        let p1 = random_ergodic_chain(&mut rng, n).unwrap();
        let p2 = random_ergodic_chain(&mut rng, n).unwrap();
        let mut worst: f64 = 0.0;
        for x in 0..n {
            let d: f64 = (0..n).map(|y| (p1.entry(x, y) - p2.entry(x, y)).abs()).sum::<f64>() / 2.0;
            worst = worst.max(d);
        }
        assert_eq!(kernel_tv_sup(&p1, &p2).unwrap(), worst);
    }
}

#[test]
fn stationary_vector_by_two_methods() {
    let mut rng = rng_from_seed(16);
    for _ in 0..20 {
        let p = random_ergodic_chain(&mut rng, 5).unwrap();
        let a = stationary_by_power_iteration(&p, POWER_ITERATION_CAP).unwrap();
        let b = stationary_by_linear_solve(&p).unwrap();
        for (u, v) in a.probs().iter().zip(b.probs()) {
            assert!((u - v).abs() <= 1e-10);
        }
        assert!(p.stationarity_residual(&stationary_distribution(&p).unwrap()).unwrap() <= 1e-12);
    }
}

#[test]
fn metropolis_kernel_targets_pi() {
    let mut rng = rng_from_seed(17);
    let pi = random_simplex_point(&mut rng, 6);
    let q = random_proposal(&mut rng, 6);
    let p = metropolis_kernel_matrix(&pi, &q).unwrap();
    assert!(pi_residual(&p, &pi) <= 1e-12);
    assert!(p.detailed_balance_residual(&pi) <= 1e-15);
}
