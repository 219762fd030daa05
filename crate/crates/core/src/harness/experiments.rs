use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::adaptation::{diminishing_monitor, ComponentwiseAdapter, Variant};
use crate::bounds::{
    geometric_counterexample_gap, minorization_search, strong_uniform_constants, tv_lipschitz_bound,
    uniform_ergodicity_bound, MinorizationCertificate,
};
use crate::error::{Error, Result};
use crate::fixtures::{random_centered_observable, random_product_target, random_reversible_chain, random_weights};
use crate::kernels::{gibbs_kernel_matrix, kernel_tv_sup, tv_slices, TransitionMatrix};
use crate::ladder::{
    summarize_trace, truncated_ladder_convergence, GrowthSequence, LadderRule, LadderTarget, PowerSequence,
    RunSummary, Schedule, SharedSchedule, LADDER_EPSILON,
};
use crate::rng::{derive_seed, rng_from_seed};
use crate::samplers::{adap_rsg_run, rsg_run, Constant, GaussianRandomWalk, MwgSampler, Separate, Trajectory};
use crate::target::{base_density, ContinuousProductTarget, FiniteProductTarget};
use crate::variance::{
    asymptotic_variance_estimate, lazy_variance as lazy_identity, optimal_to_uniform_ratio, second_moment,
    spectral_asymptotic_variance,
};
use crate::weights::{make_selection_weights, SelectionWeights};

use super::config::{
    BoundCheck, BoundsParams, CounterexampleParams, GeometricGapParams, LazyVarianceParams, OptimalScanParams,
    SequenceConfig, TruncatedLadderParams, VariantConfig,
};
use super::Outcome;

/// Slack for comparisons of exact quantities against bounds.
const EXACT_SLACK: f64 = 1e-12;

fn write_csv<I>(dir: &Path, name: &str, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(dir.join(name))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn lazy_variance(p: &LazyVarianceParams, seed: u64, dir: &Path) -> Result<Outcome> {
    let rows = (0..p.n_chains)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng_from_seed(derive_seed(seed, c as u64));
            let n = rng.random_range(2..=p.max_states);
            let sparsity = rng.random_range(0.0..0.7);
            let chain = random_reversible_chain(&mut rng, n, sparsity)?;
            let h = random_centered_observable(&mut rng, chain.pi());
            let sigma2 = spectral_asymptotic_variance(&chain, &h)?;
            let ph2 = second_moment(&h, chain.pi());
            p.deltas
                .iter()
                .map(|&delta| {
                    let direct = spectral_asymptotic_variance(&chain.lazy(delta)?, &h)?;
                    let identity = lazy_identity(sigma2, delta, ph2)?;
                    Ok((c, n, delta, direct, identity, (direct - identity).abs()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<_> = rows.into_iter().flatten().collect();
    let worst = rows.iter().map(|r| r.5).fold(0.0, f64::max);
    write_csv(
        dir,
        "lazy_variance.csv",
        &["chain", "states", "delta", "spectral_lazy", "identity", "residual"],
        rows.iter().map(|r| {
            vec![r.0.to_string(), r.1.to_string(), r.2.to_string(), r.3.to_string(), r.4.to_string(), r.5.to_string()]
        }),
    )?;
    let mut out = Outcome::default();
    out.file("lazy_variance.csv");
    out.check(
        "lazy-variance",
        worst <= p.tolerance,
        format!("max residual {worst:e} over {} cases (tolerance {:e})", rows.len(), p.tolerance),
    );
    Ok(out)
}

/// Smallest `m ≤ m_max` with a nontrivial certificate.
fn first_certificate(p: &TransitionMatrix, m_max: usize) -> Result<Option<MinorizationCertificate>> {
    for m in 1..=m_max {
        let c = minorization_search(p, m)?;
        if !c.is_trivial() {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

struct LipschitzRow {
    d: usize,
    states: usize,
    delta: f64,
    exact: f64,
    bound: f64,
}

struct UniformRow {
    d: usize,
    states: usize,
    m: usize,
    s: f64,
    worst_margin: f64,
    violations: usize,
}

struct StrongRow {
    states: usize,
    m: usize,
    s: f64,
    m_star: usize,
    s_star: f64,
    min_slack: f64,
}

pub(crate) fn bounds(p: &BoundsParams, seed: u64, dir: &Path) -> Result<Outcome> {
    let mut out = Outcome::default();
    let target_seeds = derive_seed(seed, 1);
    let targets: Vec<FiniteProductTarget> = (0..p.n_targets)
        .map(|t| random_product_target(&mut rng_from_seed(derive_seed(target_seeds, t as u64)), p.d_max, p.levels_max))
        .collect::<Result<_>>()?;

    if p.checks.contains(&BoundCheck::Lipschitz) {
        let stream = derive_seed(seed, 2);
        let rows = targets
            .par_iter()
            .enumerate()
            .map(|(t, target)| {
                let mut rng = rng_from_seed(derive_seed(stream, t as u64));
                let d = target.dim();
                let a = random_weights(&mut rng, d, p.epsilon)?;
                let b = random_weights(&mut rng, d, p.epsilon)?;
                let exact = kernel_tv_sup(&gibbs_kernel_matrix(target, &a)?, &gibbs_kernel_matrix(target, &b)?)?;
                Ok(LipschitzRow {
                    d,
                    states: target.len(),
                    delta: a.sup_distance(&b)?,
                    exact,
                    bound: tv_lipschitz_bound(&a, &b, p.epsilon)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let violations = rows.iter().filter(|r| r.exact > r.bound + EXACT_SLACK).count();
        write_csv(
            dir,
            "lipschitz.csv",
            &["target", "d", "states", "sup_weight_gap", "exact_tv", "bound"],
            rows.iter().enumerate().map(|(t, r)| {
                vec![t.to_string(), r.d.to_string(), r.states.to_string(), r.delta.to_string(), r.exact.to_string(), r.bound.to_string()]
            }),
        )?;
        out.file("lipschitz.csv");
        out.check(
            "tv-lipschitz",
            violations == 0,
            format!("{violations} violations over {} targets", rows.len()),
        );
    }

    if p.checks.contains(&BoundCheck::UniformErgodicity) {
        let stream = derive_seed(seed, 3);
        let rows = targets
            .par_iter()
            .enumerate()
            .map(|(t, target)| uniform_ergodicity_row(p, target, derive_seed(stream, t as u64)))
            .collect::<Result<Vec<_>>>()?;
        let violations: usize = rows.iter().map(|r| r.violations).sum();
        let uncertified = rows.iter().filter(|r| r.m == 0).count();
        write_csv(
            dir,
            "uniform.csv",
            &["target", "d", "states", "m", "s", "worst_margin", "violations"],
            rows.iter().enumerate().map(|(t, r)| {
                vec![
                    t.to_string(),
                    r.d.to_string(),
                    r.states.to_string(),
                    r.m.to_string(),
                    r.s.to_string(),
                    r.worst_margin.to_string(),
                    r.violations.to_string(),
                ]
            }),
        )?;
        out.file("uniform.csv");
        let worst = rows.iter().map(|r| r.worst_margin).fold(f64::NEG_INFINITY, f64::max);
        out.check(
            "uniform-ergodicity",
            violations == 0 && uncertified == 0,
            format!(
                "{violations} violations, {uncertified} targets without a certificate; largest exact − bound {worst:e}"
            ),
        );
    }

    if p.checks.contains(&BoundCheck::StrongUniform) {
        let stream = derive_seed(seed, 4);
        let rows = (0..p.n_chains)
            .into_par_iter()
            .map(|c| {
                let mut rng = rng_from_seed(derive_seed(stream, c as u64));
                let n = rng.random_range(2..=p.chain_states_max);
                let sparsity = rng.random_range(0.0..0.5);
                let chain = random_reversible_chain(&mut rng, n, sparsity)?;
                let cert = first_certificate(chain.kernel(), p.m_max)?
                    .ok_or_else(|| Error::Precondition(format!("chain {c} has no certificate with m <= {}", p.m_max)))?;
                // s = 1 only when every row is π already; any s < 1 certifies it too
                let s = cert.s.min(0.5);
                let (m_star, s_star) = strong_uniform_constants(cert.m, s)?;
                let pm = chain.kernel().power(m_star);
                let pi = chain.pi();
                let mut min_slack = f64::INFINITY;
                for x in 0..n {
                    for (y, py) in pi.iter().enumerate() {
                        min_slack = min_slack.min(pm.entry(x, y) - s_star * py);
                    }
                }
                Ok(StrongRow {
                    states: n,
                    m: cert.m,
                    s,
                    m_star,
                    s_star,
                    min_slack,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let violations = rows.iter().filter(|r| r.min_slack < -EXACT_SLACK).count();
        write_csv(
            dir,
            "strong.csv",
            &["chain", "states", "m", "s", "m_star", "s_star", "min_slack"],
            rows.iter().enumerate().map(|(c, r)| {
                vec![
                    c.to_string(),
                    r.states.to_string(),
                    r.m.to_string(),
                    r.s.to_string(),
                    r.m_star.to_string(),
                    r.s_star.to_string(),
                    r.min_slack.to_string(),
                ]
            }),
        )?;
        out.file("strong.csv");
        out.check(
            "strong-uniform",
            violations == 0,
            format!("{violations} violations over {} chains", rows.len()),
        );
    }
    Ok(out)
}

fn uniform_ergodicity_row(p: &BoundsParams, target: &FiniteProductTarget, seed: u64) -> Result<UniformRow> {
    let d = target.dim();
    let n = target.len();
    let beta = SelectionWeights::uniform(d, p.epsilon)?;
    let Some(cert) = first_certificate(&gibbs_kernel_matrix(target, &beta)?, p.m_max)? else {
        return Ok(UniformRow {
            d,
            states: n,
            m: 0,
            s: 0.0,
            worst_margin: f64::INFINITY,
            violations: 0,
        });
    };
    let bound: Vec<f64> = (0..=p.horizon)
        .map(|k| uniform_ergodicity_bound(&cert, p.epsilon, d, k))
        .collect::<Result<_>>()?;
    let pi = target.pi();
    let mut rng = rng_from_seed(seed);
    let mut worst_margin = f64::NEG_INFINITY;
    let mut violations = 0;
    for _ in 0..p.n_alpha {
        let alpha = random_weights(&mut rng, d, p.epsilon)?;
        let step = gibbs_kernel_matrix(target, &alpha)?;
        let mut pn = step.matrix().clone();
        for (k, b) in bound.iter().enumerate().skip(1) {
            if k > 1 {
                pn = &pn * step.matrix();
            }
            for x in 0..n {
                let row: Vec<f64> = pn.row(x).iter().copied().collect();
                let margin = tv_slices(&row, pi) - b;
                worst_margin = worst_margin.max(margin);
                if margin > EXACT_SLACK {
                    violations += 1;
                }
            }
        }
    }
    Ok(UniformRow {
        d,
        states: n,
        m: cert.m,
        s: cert.s,
        worst_margin,
        violations,
    })
}

pub(crate) fn counterexample(p: &CounterexampleParams, seed: u64, dir: &Path) -> Result<Outcome> {
    let schedule = Arc::new(Schedule::covering(p.n_steps));
    let alpha0 = SelectionWeights::new(vec![0.5, 0.5], LADDER_EPSILON)?;
    let target = LadderTarget::unbounded();
    let x0 = [1.0, 1.0];
    let mut out = Outcome::default();
    if p.trace_every > 0 {
        std::fs::create_dir_all(dir.join("traces"))?;
    }
    let run = |r: usize, adaptive: bool| -> Result<(RunSummary, Trajectory)> {
        let s = derive_seed(seed, if adaptive { r } else { p.n_runs + r } as u64);
        let t = if adaptive {
            let rule = LadderRule {
                sequence: SharedSchedule(schedule.clone()),
            };
            adap_rsg_run(&target, rule, &x0, &alpha0, p.n_steps, s)?
        } else {
            rsg_run(&target, &alpha0, &x0, p.n_steps, s)?
        };
        let summary = summarize_trace(r, s, &t.coordinate_trace(0));
        if p.trace_every > 0 {
            let arm = if adaptive { "adaptive" } else { "control" };
            let f = std::fs::File::create(dir.join(format!("traces/{arm}_{r:03}.csv")))?;
            t.write_csv_every(std::io::BufWriter::new(f), p.trace_every)?;
        }
        Ok((summary, t))
    };
    let mut arms = Vec::new();
    for adaptive in [true, false] {
        let runs = (0..p.n_runs)
            .into_par_iter()
            .map(|r| run(r, adaptive).map(|(s, t)| (s, (r == 0).then_some(t))))
            .collect::<Result<Vec<_>>>()?;
        let mut summaries = Vec::with_capacity(runs.len());
        for (s, t) in runs {
            if let Some(t) = t {
                let arm = if adaptive { "adaptive" } else { "control" };
                let every = p.trace_every.max(1);
                let last = t.n_steps();
                write_csv(
                    dir,
                    &format!("plot_{arm}.csv"),
                    &["step", "x_1"],
                    t.states
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| k % every == 0 || *k == last)
                        .map(|(k, x)| vec![k.to_string(), x[0].to_string()]),
                )?;
                out.file(format!("plot_{arm}.csv"));
            }
            summaries.push(s);
        }
        arms.push(summaries);
    }
    if p.trace_every > 0 {
        for arm in ["adaptive", "control"] {
            for r in 0..p.n_runs {
                out.file(format!("traces/{arm}_{r:03}.csv"));
            }
        }
    }
    let (adaptive, control) = (&arms[0], &arms[1]);
    write_csv(
        dir,
        "summary.csv",
        &["arm", "replicate", "seed", "final_x1", "max_x1", "slope"],
        [("adaptive", adaptive), ("control", control)].iter().flat_map(|(arm, runs)| {
            runs.iter().map(move |s| {
                vec![
                    arm.to_string(),
                    s.replicate.to_string(),
                    s.seed.to_string(),
                    s.final_x1.to_string(),
                    s.max_x1.to_string(),
                    s.slope.to_string(),
                ]
            })
        }),
    )?;
    out.file("summary.csv");
    let escaped = adaptive
        .iter()
        .filter(|s| s.final_x1 > p.adaptive_min_final && s.slope > 0.0)
        .count();
    let contained = control.iter().filter(|s| s.final_x1 <= p.control_max_final).count();
    out.check(
        "adaptive-transience",
        escaped >= p.min_passing,
        format!(
            "{escaped}/{} adaptive runs end above {} with positive slope (need {})",
            p.n_runs, p.adaptive_min_final, p.min_passing
        ),
    );
    out.check(
        "control-recurrence",
        contained >= p.min_passing,
        format!(
            "{contained}/{} control runs end at or below {} (need {})",
            p.n_runs, p.control_max_final, p.min_passing
        ),
    );
    Ok(out)
}

pub(crate) fn truncated_ladder(p: &TruncatedLadderParams, dir: &Path) -> Result<Outcome> {
    let seq: Box<dyn GrowthSequence> = match p.sequence {
        SequenceConfig::Schedule => Box::new(Schedule::covering(p.max_steps)),
        SequenceConfig::Power { a0, scale, power } => Box::new(PowerSequence::new(a0, scale, power)?),
    };
    let conv = truncated_ladder_convergence(p.truncation, seq.as_ref(), p.threshold, p.max_steps)?;
    write_csv(
        dir,
        "tv.csv",
        &["n", "tv"],
        conv.tv.iter().enumerate().map(|(n, v)| vec![n.to_string(), v.to_string()]),
    )?;
    let first = conv.first_below.map(|n| n.to_string()).unwrap_or_default();
    write_csv(
        dir,
        "summary.csv",
        &["truncation", "threshold", "first_below", "horizon", "final_tv", "tail_monotone"],
        [vec![
            p.truncation.to_string(),
            p.threshold.to_string(),
            first.clone(),
            conv.horizon.to_string(),
            conv.tv[conv.horizon].to_string(),
            conv.tail_monotone.to_string(),
        ]],
    )?;
    let mut out = Outcome::default();
    out.file("tv.csv");
    out.file("summary.csv");
    let detail = match conv.first_below {
        Some(n) => format!(
            "TV < {} first at n = {n}; horizon {}; final TV {:e}; tail monotone: {}",
            p.threshold, conv.horizon, conv.tv[conv.horizon], conv.tail_monotone
        ),
        None => format!(
            "TV never below {} within {} steps (final {:e})",
            p.threshold, p.max_steps, conv.tv[conv.horizon]
        ),
    };
    out.check("truncated-ladder", conv.first_below.is_some() && conv.tail_monotone, detail);
    Ok(out)
}

/// `f(X_n)` along a run with frozen weights and proposal variances.
fn frozen_observable_trace(
    target: &ContinuousProductTarget,
    alpha: &SelectionWeights,
    gamma: &[f64],
    x0: &[f64],
    n_steps: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let adapt = Separate {
        weights: Constant,
        proposals: Constant,
    };
    let mut s = MwgSampler::new(target, &GaussianRandomWalk, adapt, x0.to_vec(), alpha.clone(), gamma.to_vec())?;
    let mut rng = rng_from_seed(seed);
    let mut f = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        s.step(&mut rng)?;
        f.push(target.observable(s.state()));
    }
    Ok(f)
}

pub(crate) fn optimal_scan(p: &OptimalScanParams, seed: u64, dir: &Path) -> Result<Outcome> {
    let d = p.scales.len();
    let target = ContinuousProductTarget::new(p.scales.clone(), base_density(&p.base)?, p.a0, p.a.clone())?;
    let variant = match p.variant {
        VariantConfig::Hst => Variant::Hst,
        VariantConfig::Rr => Variant::Rr,
    };
    let alpha0 = SelectionWeights::uniform(d, p.epsilon)?;
    let gamma0 = vec![p.gamma0; d];
    let adapter = ComponentwiseAdapter::new(variant, p.a.clone(), alpha0.clone(), &gamma0)?;
    let x0 = vec![0.0; d];
    let mut sampler = MwgSampler::new(&target, &GaussianRandomWalk, adapter, x0, alpha0.clone(), gamma0)?;
    let mut rng = rng_from_seed(derive_seed(seed, 0));
    for _ in 0..p.adapt_steps {
        sampler.step(&mut rng)?;
    }
    let alpha = sampler.alpha().clone();
    let gamma = sampler.gamma().to_vec();
    let state = sampler.state().to_vec();
    let adapter = sampler.adaptation();

    // α*_i ∝ |a_i|/C_i: the adapted proposal variances scale like the
    // coordinate variances σ²/C_i²
    let star_raw: Vec<f64> = p.a.iter().zip(&p.scales).map(|(a, c)| a.abs() / c).collect();
    let alpha_star = make_selection_weights(&star_raw, p.epsilon)?;
    let weight_err = alpha.sup_distance(&alpha_star)?;

    let every = p.weight_record_every.max(1);
    let mut history: Vec<(usize, Vec<f64>)> = vec![(0, alpha0.as_slice().to_vec())];
    history.extend(adapter.weight_history.iter().cloned());
    let mut header = vec!["n".to_string()];
    header.extend((1..=d).map(|i| format!("alpha_{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(
        dir,
        "weights.csv",
        &header,
        history
            .iter()
            .filter(|(n, _)| n.saturating_sub(1) % every == 0)
            .map(|(n, w)| std::iter::once(n.to_string()).chain(w.iter().map(|v| v.to_string())).collect()),
    )?;
    let weight_vectors: Vec<Vec<f64>> = history.iter().map(|(_, w)| w.clone()).collect();
    let monitor = diminishing_monitor(&weight_vectors, None, 100.min(weight_vectors.len().max(1)))?;
    monitor.write_csv(std::fs::File::create(dir.join("monitor.csv"))?)?;

    let acceptance: Vec<Option<f64>> = (0..d).map(|i| adapter.recent_acceptance(i, p.last_batches)).collect();
    write_csv(
        dir,
        "acceptance.csv",
        &["coordinate", "batches", "mean_last_batches", "proposal_variance", "alpha", "alpha_star"],
        (0..d).map(|i| {
            vec![
                (i + 1).to_string(),
                adapter.batch_fractions[i].len().to_string(),
                acceptance[i].map(|v| v.to_string()).unwrap_or_default(),
                gamma[i].to_string(),
                alpha.get(i).to_string(),
                alpha_star.get(i).to_string(),
            ]
        }),
    )?;

    let uniform = SelectionWeights::uniform(d, p.epsilon)?;
    let arms = [(&alpha, derive_seed(seed, 1)), (&uniform, derive_seed(seed, 2))];
    let estimates = arms
        .par_iter()
        .map(|(a, s)| asymptotic_variance_estimate(&frozen_observable_trace(&target, a, &gamma, &state, p.eval_steps, *s)?))
        .collect::<Result<Vec<_>>>()?;
    let ratio = estimates[0].1 / estimates[1].1;
    // (Σ|a_i|/C_i)² / (d Σ a_i²/C_i²) as the plain ratio with effective scales C_i/|a_i|
    let effective: Vec<f64> = p.scales.iter().zip(&p.a).map(|(c, a)| c / a.abs()).collect();
    let closed_form = optimal_to_uniform_ratio(&effective);
    let limit = p.ratio_slack * closed_form;
    write_csv(
        dir,
        "summary.csv",
        &["arm", "iact", "asymptotic_variance"],
        [("adaptive", estimates[0]), ("uniform", estimates[1])]
            .iter()
            .map(|(arm, (tau, v))| vec![arm.to_string(), tau.to_string(), v.to_string()])
            .chain([
                vec!["ratio".into(), String::new(), ratio.to_string()],
                vec!["closed_form".into(), String::new(), closed_form.to_string()],
            ]),
    )?;

    let mut out = Outcome::default();
    for f in ["weights.csv", "monitor.csv", "acceptance.csv", "summary.csv"] {
        out.file(f);
    }
    out.check(
        "optimal-weights",
        weight_err < p.weight_tolerance,
        format!("sup |alpha - alpha*| = {weight_err:.4} (tolerance {})", p.weight_tolerance),
    );
    out.check(
        "variance-ratio",
        ratio <= limit,
        format!("adaptive/uniform = {ratio:.4}; limit {} x {closed_form:.4} = {limit:.4}", p.ratio_slack),
    );
    if variant == Variant::Rr {
        let [lo, hi] = p.acceptance_band;
        let inside = acceptance.iter().all(|a| a.is_some_and(|v| v >= lo && v <= hi));
        let shown: Vec<String> = acceptance
            .iter()
            .map(|a| a.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into()))
            .collect();
        out.check(
            "rr-acceptance",
            inside,
            format!("mean acceptance over last {} batches: [{}] (band [{lo}, {hi}])", p.last_batches, shown.join(", ")),
        );
    }
    Ok(out)
}

pub(crate) fn geometric_gap(p: &GeometricGapParams, dir: &Path) -> Result<Outcome> {
    let [n_lo, n_hi] = p.trend_range;
    let mut rows = Vec::new();
    let mut trend_ok = true;
    for &q in &p.trend_ps {
        let mut prev = f64::INFINITY;
        for n in n_lo..=n_hi {
            let g = geometric_counterexample_gap(q, n)?;
            let dist = (g.kernel_gap - (1.0 - q)).abs();
            trend_ok &= dist <= prev + 1e-15;
            prev = dist;
            rows.push(vec![q.to_string(), n.to_string(), g.proposal_gap.to_string(), g.kernel_gap.to_string(), (1.0 - q).to_string()]);
        }
    }
    write_csv(dir, "gaps.csv", &["p", "n", "proposal_gap", "kernel_gap", "limit"], rows)?;
    let proposal = geometric_counterexample_gap(p.p, p.proposal_n)?.proposal_gap;
    let kernel = geometric_counterexample_gap(p.p, p.kernel_n)?.kernel_gap;
    let [lo, hi] = p.kernel_band;
    let mut out = Outcome::default();
    out.file("gaps.csv");
    out.check(
        "proposal-gap",
        proposal < p.proposal_max,
        format!("sup proposal TV at n = {}: {proposal:e} (max {:e})", p.proposal_n, p.proposal_max),
    );
    out.check(
        "kernel-gap",
        (lo..=hi).contains(&kernel),
        format!("kernel gap at n = {}: {kernel:.12} (band [{lo}, {hi}])", p.kernel_n),
    );
    out.check(
        "kernel-gap-trend",
        trend_ok,
        format!("distance to 1 - p nonincreasing over n in [{n_lo}, {n_hi}] for p in {:?}", p.trend_ps),
    );
    Ok(out)
}
