//! Acceptance suite. Each test prints one `[PASS]`/`[FAIL]` line; run with
//! `cargo test -p eot-bench --test acceptance -- --nocapture` to see them.

use std::time::Instant;

use eot_bench::{
    exact_ot_small, fit_loglog_slope, mean_ops_by, run_batch_experiment, run_eps_experiment,
    run_scaling_experiment, write_csv, Accuracy, Algo, RunOptions,
};
use eot_core::io::PlanFile;
use eot_core::pdasmd::pdasmd_solve_observed;
use eot_core::semidual::{
    primal_from_dual, semidual_component_grad, semidual_component_value, semidual_full_grad, semidual_value,
};
use eot_core::{
    approximate_ot, approximate_ot_stochastic, marginal_residual, pdasmd_batch_solve, pdasmd_solve,
    round_to_feasible, transport_cost, CostMatrix, DualPoint, EntropicProblem, SimplexVector, SolverConfig,
    TransportPlan,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

fn report(id: u32, what: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("\n[{tag}] criterion {id}: {what} ({detail})");
}

fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> SimplexVector {
    SimplexVector::normalized((0..n).map(|_| rng.gen_range(0.05..1.0)).collect()).unwrap()
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> (CostMatrix, SimplexVector, SimplexVector) {
    let cost = CostMatrix::from_fn(n, |_, _| rng.gen_range(0.0..1.0)).unwrap();
    (cost, random_simplex(rng, n), random_simplex(rng, n))
}

fn random_problem(rng: &mut ChaCha8Rng, n: usize) -> EntropicProblem {
    let (cost, p, q) = random_instance(rng, n);
    let eta = rng.gen_range(0.05..2.0);
    EntropicProblem::new(cost, p, q, eta).unwrap()
}

fn random_dual(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DualPoint {
    DualPoint((0..n).map(|_| rng.gen_range(-scale..scale)).collect())
}

#[test]
fn criterion_1_eps_solutions() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut runs = 0;
    for n in [4, 9, 16] {
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 * n as u64 + seed);
            let (cost, p, q) = random_instance(&mut rng, n);
            let opt = exact_ot_small(&cost, &p, &q).unwrap();
            for rel in [0.5, 0.1] {
                let eps = rel * cost.max_abs();
                let cfg = SolverConfig { seed, ..SolverConfig::default() };
                let plans = [
                    ("pdasmd", approximate_ot(&cost, &p, &q, eps, &cfg).unwrap().plan),
                    ("stochastic", approximate_ot_stochastic(&cost, &p, &q, eps, seed).unwrap().plan),
                ];
                for (name, plan) in plans {
                    runs += 1;
                    let residual = marginal_residual(&plan, &p, &q).unwrap();
                    let value = transport_cost(&cost, &plan).unwrap();
                    if residual > 1e-9 || value > opt + eps {
                        failures.push(format!("{name} n={n} seed={seed} rel={rel}: res {residual:e}, gap {:e}", value - opt));
                    }
                }
            }
        }
    }
    let pass = failures.is_empty();
    report(
        1,
        "epsilon-solutions vs exact oracle",
        pass,
        &format!("{}/{runs} ok, {:.1}s", runs - failures.len(), start.elapsed().as_secs_f64()),
    );
    assert!(pass, "{failures:#?}");
}

fn n_slope(algo: Algo) -> f64 {
    let recs = run_scaling_experiment(&[4, 6, 8, 10], Accuracy::Relative(0.5), algo, &SEEDS, RunOptions::default()).unwrap();
    assert!(recs.iter().all(|r| r.converged));
    fit_loglog_slope(&mean_ops_by(&recs, |r| r.n as f64)).unwrap().slope
}

#[test]
fn criterion_2_scaling_in_n() {
    let linf = n_slope(Algo::PdasmdLInf);
    let pass = (1.6..=2.4).contains(&linf);
    report(2, "PDASMD-linf ops slope vs n in [1.6, 2.4]", pass, &format!("slope {linf:.3}"));
    assert!(pass, "linf slope {linf}");
}

#[test]
fn criterion_3_norm_separation() {
    let (linf, l2) = (n_slope(Algo::PdasmdLInf), n_slope(Algo::PdasmdL2));
    let pass = l2 - linf >= 0.2;
    report(
        3,
        "PDASMD-l2 slope exceeds PDASMD-linf slope by >= 0.2",
        pass,
        &format!("l2 {l2:.3} - linf {linf:.3} = {:.3}", l2 - linf),
    );
    assert!(pass, "l2 slope {l2} vs linf slope {linf}");
}

#[test]
fn criterion_4_batch_scaling() {
    let recs = run_batch_experiment(8, &[1, 2, 4, 8, 16], Accuracy::Relative(0.5), &SEEDS, RunOptions::default()).unwrap();
    assert!(recs.iter().all(|r| r.converged));
    let slope = fit_loglog_slope(&mean_ops_by(&recs, |r| r.batch as f64)).unwrap().slope;
    let pass = (0.3..=0.7).contains(&slope);
    report(4, "PDASMD-B ops slope vs B at n = 64 in [0.3, 0.7]", pass, &format!("slope {slope:.3}"));
    assert!(pass, "batch slope {slope}");
}

#[test]
fn criterion_5_eps_scaling() {
    let eps: Vec<_> = [0.8, 0.4, 0.2, 0.1].into_iter().map(Accuracy::Relative).collect();
    let recs = run_eps_experiment(6, &eps, &[Algo::StochasticSinkhorn, Algo::PdasmdLInf], &SEEDS, RunOptions::default())
        .unwrap();
    assert!(recs.iter().all(|r| r.converged));
    let slope = |algo| {
        let mine: Vec<_> = recs.iter().filter(|r| r.algo == algo).cloned().collect();
        fit_loglog_slope(&mean_ops_by(&mine, |r| 1.0 / r.eps)).unwrap().slope
    };
    let (ss, pd) = (slope(Algo::StochasticSinkhorn), slope(Algo::PdasmdLInf));
    let pass = (1.4..=2.6).contains(&ss) && (0.6..=1.4).contains(&pd);
    report(
        5,
        "ops slope vs 1/eps: stochastic Sinkhorn in [1.4, 2.6], PDASMD in [0.6, 1.4]",
        pass,
        &format!("stochastic {ss:.3}, pdasmd {pd:.3}"),
    );
    assert!(pass);
}

fn finite_difference_ok(rng: &mut ChaCha8Rng) -> bool {
    let n = rng.gen_range(2..9);
    let prob = random_problem(rng, n);
    let lambda = random_dual(rng, n, 2.0);
    let i = rng.gen_range(0..n);
    let h = 1e-6;
    let grad = semidual_component_grad(i, &lambda, &prob).unwrap();
    let full = semidual_full_grad(&lambda, &prob);
    let mut worst: f64 = 0.0;
    let scale = grad.iter().chain(&full).fold(1e-3f64, |m, g| m.max(g.abs()));
    for j in 0..n {
        let shifted = |d: f64| {
            let mut l = lambda.clone();
            l.0[j] += d;
            l
        };
        let fd = (semidual_component_value(i, &shifted(h), &prob).unwrap()
            - semidual_component_value(i, &shifted(-h), &prob).unwrap())
            / (2.0 * h);
        let fd_full = (semidual_value(&shifted(h), &prob) - semidual_value(&shifted(-h), &prob)) / (2.0 * h);
        worst = worst.max((fd - grad[j]).abs()).max((fd_full - full[j]).abs());
    }
    worst / scale <= 1e-5
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

#[test]
fn criterion_6_gradient_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let fd_ok = (0..200).filter(|_| finite_difference_ok(&mut rng)).count();

    let mut identity_err: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.gen_range(2..12);
        let prob = random_problem(&mut rng, n);
        let lambda = random_dual(&mut rng, n, 5.0);
        let cols = primal_from_dual(&lambda, &prob).col_sums();
        let grad = semidual_full_grad(&lambda, &prob);
        for ((c, q), g) in cols.iter().zip(prob.q().as_slice()).zip(&grad) {
            identity_err = identity_err.max((c - q - g).abs());
        }
    }

    let mut smooth_ok = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(2..10);
        let prob = random_problem(&mut rng, n);
        let (a, b) = (random_dual(&mut rng, n, 3.0), random_dual(&mut rng, n, 3.0));
        let i = rng.gen_range(0..n);
        let ga = semidual_component_grad(i, &a, &prob).unwrap();
        let gb = semidual_component_grad(i, &b, &prob).unwrap();
        let li = n as f64 * prob.p()[i] / prob.eta();
        let d_inf = a.0.iter().zip(&b.0).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let d_2 = a.0.iter().zip(&b.0).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let g_2 = ga.iter().zip(&gb).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        if l1(&ga, &gb) <= 5.0 * li * d_inf * (1.0 + 1e-12) && g_2 <= li * d_2 * (1.0 + 1e-12) {
            smooth_ok += 1;
        }
    }

    let mut tilt_ok = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..12);
        let scale = [0.01, 1.0, 10.0][rng.gen_range(0..3)];
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(1e-3..1.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-scale..scale)).collect();
        let sa: f64 = a.iter().sum();
        let tilted: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y.exp()).collect();
        let st: f64 = tilted.iter().sum();
        let lhs: f64 = a.iter().zip(&tilted).map(|(x, t)| (x / sa - t / st).abs()).sum();
        let b_inf = b.iter().fold(0.0f64, |m, y| m.max(y.abs()));
        if lhs <= 5.0 * b_inf + 1e-15 {
            tilt_ok += 1;
        }
    }

    let pass = fd_ok == 200 && identity_err <= 1e-10 && smooth_ok == 1000 && tilt_ok == 1000;
    report(
        6,
        "gradient, identity and smoothness suite",
        pass,
        &format!(
            "fd {fd_ok}/200, identity err {identity_err:.1e}, smoothness {smooth_ok}/1000, softmax tilt {tilt_ok}/1000, {:.1}s",
            start.elapsed().as_secs_f64()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_7_structural_equivalences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut identical = 0;
    for k in 0..5u64 {
        let n = rng.gen_range(3..10);
        let prob = random_problem(&mut rng, n);
        let cfg = SolverConfig { seed: 40 + k, max_epochs: Some(10), ..SolverConfig::default() };
        let plain = pdasmd_solve(&prob, &cfg).unwrap();
        let batch = pdasmd_batch_solve(&prob, &cfg).unwrap();
        let mut trace = Vec::new();
        let observed = pdasmd_solve_observed(&prob, &cfg, &mut |s| trace.push((s.y.to_vec(), s.z.to_vec()))).unwrap();
        let bits = |r: &eot_core::SolveResult| r.plan.as_slice().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        if plain.iterations == 10 && plain == batch && bits(&plain) == bits(&batch) && observed == plain && trace.len() == 10 {
            identical += 1;
        }
    }

    let mut rounding_ok = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..9);
        let mass = rng.gen_range(0.1..2.0);
        let mut entries: Vec<f64> = (0..n * n).map(|_| rng.gen_range(0.0..1.0)).collect();
        if rng.gen_bool(0.2) {
            let zero_row = rng.gen_range(0..n);
            entries[zero_row * n..(zero_row + 1) * n].fill(0.0);
        }
        let total: f64 = entries.iter().sum::<f64>().max(1e-300);
        entries.iter_mut().for_each(|x| *x *= mass / total);
        let x = TransportPlan::square(n, entries).unwrap();
        let (p, q) = (random_simplex(&mut rng, n), random_simplex(&mut rng, n));
        let r = round_to_feasible(&x, &p, &q).unwrap();
        let before = marginal_residual(&x, &p, &q).unwrap();
        let after = marginal_residual(&r, &p, &q).unwrap();
        let moved = l1(r.as_slice(), x.as_slice());
        if after <= 1e-10 && r.as_slice().iter().all(|&v| v >= 0.0) && moved <= 2.0 * before + 1e-12 {
            rounding_ok += 1;
        }
    }
    let pass = identical == 5 && rounding_ok == 1000;
    report(
        7,
        "B = 1 matches plain PDASMD; rounding feasibility and l1 bound",
        pass,
        &format!("{identical}/5 bit-identical, rounding {rounding_ok}/1000"),
    );
    assert!(pass);
}

#[test]
fn criterion_8_determinism() {
    let csv = |jobs| {
        let opts = RunOptions { jobs, wall_clock: false };
        let mut recs = run_scaling_experiment(&[3, 4], Accuracy::Relative(0.5), Algo::PdasmdLInf, &[1, 2], opts).unwrap();
        recs.extend(run_batch_experiment(3, &[1, 3], Accuracy::Relative(0.5), &[1, 2], opts).unwrap());
        recs.extend(
            run_eps_experiment(3, &[Accuracy::Relative(0.5)], &[Algo::Sinkhorn, Algo::StochasticSinkhorn], &[1], opts)
                .unwrap(),
        );
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        buf
    };
    let tables_equal = csv(1) == csv(1) && csv(1) == csv(3);

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (cost, p, q) = random_instance(&mut rng, 6);
    let plan_json = || {
        let cfg = SolverConfig { seed: 7, ..SolverConfig::default() };
        PlanFile::from_plan(&approximate_ot(&cost, &p, &q, 0.1, &cfg).unwrap().plan).to_json()
    };
    let plans_equal = plan_json() == plan_json();
    let pass = tables_equal && plans_equal;
    report(
        8,
        "repeated runs give byte-identical outputs",
        pass,
        &format!("csv identical: {tables_equal}, plan json identical: {plans_equal}"),
    );
    assert!(pass);
}
