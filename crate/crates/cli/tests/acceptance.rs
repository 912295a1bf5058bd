//! The twelve acceptance criteria. Each prints one PASS/FAIL line with its
//! runtime; the test fails if any criterion does.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use ordlab::dist::{shannon_entropy, Dist, ExactDist, ScoreVector};
use ordlab::domain::{
    bisection_run, compact_elements, eval_poly, order_from_opens_check, way_below_matrix, FiniteDcpo,
};
use ordlab::fluct::{
    bootstrap_ci, crooks_check, energy_family_from_chain, exact_work_distribution, jarzynski_exact, metropolis_matrix,
    simulate, Direction, MarkovChainSpec, Matrix, Protocol, Statistic,
};
use ordlab::majorization::second_laws::{entropy, top_sum};
use ordlab::majorization::{
    check_second_laws_family, compare, d_majorization_leq, d_majorization_oracle, majorized_by, stern_brocot,
    strict_monotone_family, Clause, Order, OrderVerdict,
};
use ordlab::maxent::{maximal_on_segment, solve_maxent, LinearConstraint, DEFAULT_TOL};
use ordlab::poset::{
    all_small_posets, antichain, chain, dm_dimension, is_conditionally_connected, is_strict_monotone_multi_utility,
    reciprocal_poset, reciprocal_utilities, sign_modulus_poset, standard_example, thermo_representation, Dimension,
    RealFamily,
};
use ordlab::scalar::ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_dist(rng: &mut ChaCha8Rng, n: usize, floor: f64) -> Dist {
    let w: Vec<f64> = (0..n).map(|_| floor + rng.random::<f64>()).collect();
    let s: f64 = w.iter().sum();
    Dist::new(w.iter().map(|x| x / s).collect()).unwrap()
}

fn random_exact(rng: &mut ChaCha8Rng, n: usize, min_weight: i64) -> ExactDist {
    let w: Vec<i64> = (0..n).map(|_| rng.random_range(min_weight..=9)).collect();
    let total: i64 = w.iter().sum::<i64>().max(1);
    if w.iter().all(|&x| x == 0) {
        return ExactDist::uniform(n);
    }
    ExactDist::new(w.iter().map(|&x| ratio(x, total)).collect()).unwrap()
}

/// Column-stochastic with strictly positive entries.
fn random_positive_matrix(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let cols: Vec<Vec<f64>> = (0..n).map(|_| random_dist(rng, n, 0.05).into_vec()).collect();
    (0..n).map(|x| (0..n).map(|y| cols[y][x]).collect()).collect()
}

/// Symmetric proposal `a I + (1 - a) J / n`.
fn symmetric_proposal(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let a = rng.random_range(0.0..0.5);
    (0..n).map(|x| (0..n).map(|y| (1.0 - a) / n as f64 + if x == y { a } else { 0.0 }).collect()).collect()
}

/// Metropolis chain with `p_1 = p_0` and detailed balance at every step.
fn metropolis_chain(rng: &mut ChaCha8Rng) -> MarkovChainSpec {
    let n = rng.random_range(2..=4);
    let steps = rng.random_range(1..=4);
    let prop = symmetric_proposal(rng, n);
    let p0 = random_dist(rng, n, 0.1);
    let mut mats = vec![metropolis_matrix(&p0, &prop).unwrap()];
    for _ in 1..steps {
        mats.push(metropolis_matrix(&random_dist(rng, n, 0.1), &prop).unwrap());
    }
    MarkovChainSpec::new(p0, mats).unwrap()
}

fn jarzynski_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(1..=4);
        let steps = rng.random_range(1..=5);
        let p0 = random_dist(&mut rng, n, 0.05);
        let mats = (0..steps).map(|_| random_positive_matrix(&mut rng, n)).collect();
        let spec = MarkovChainSpec::new(p0, mats).unwrap();
        let beta = rng.random_range(0.2..3.0);
        let e = energy_family_from_chain(&spec, beta).unwrap();
        worst = worst.max((jarzynski_exact(&spec, &e).unwrap() - 1.0).abs());
    }
    check(worst <= 1e-10, format!("200 chains, max |<e^(-beta(W-dF))> - 1| = {worst:.2e}"))
}

fn crooks_exactness() -> Outcome {
    let half = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
    let m = vec![vec![2.0 / 3.0, 2.0 / 3.0], vec![1.0 / 3.0, 1.0 / 3.0]];
    let hand = MarkovChainSpec::new(Dist::uniform(2), vec![half, m]).unwrap();
    let e = energy_family_from_chain(&hand, 1.0).unwrap();
    let hand_gap = crooks_check(&hand, &e).unwrap().max_gap;
    let bwd = exact_work_distribution(&hand, &e, Direction::Backward).unwrap();
    let support_ok = (bwd.prob_at((4.0f64 / 3.0).ln(), 1e-9) - 2.0 / 3.0).abs() < 1e-12
        && (bwd.prob_at((2.0f64 / 3.0).ln(), 1e-9) - 1.0 / 3.0).abs() < 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let spec = metropolis_chain(&mut rng);
        let beta = rng.random_range(0.3..2.5);
        let e = energy_family_from_chain(&spec, beta).unwrap();
        worst = worst.max(crooks_check(&spec, &e).unwrap().max_gap);
    }
    check(
        hand_gap <= 1e-10 && support_ok && worst <= 1e-10,
        format!("hand example gap {hand_gap:.2e}, backward support ok = {support_ok}; 100 Metropolis chains, max gap {worst:.2e}"),
    )
}

fn simulation_calibration() -> Outcome {
    let protocol = Protocol::default();
    let stat = Statistic::MeanExpNeg { beta: protocol.beta };
    let (mut covered, mut width) = (0, 0.0);
    for seed in 0..100u64 {
        let run = simulate(&protocol, 20, seed).unwrap();
        let (lo, hi) = bootstrap_ci(&run.dissipated(), 1000, 0.99, stat, seed).unwrap();
        covered += (lo <= 1.0 && 1.0 <= hi) as usize;
        width += hi - lo;
    }
    let mean_width = width / 100.0;
    // reference interval (0.48, 1.64) has width 1.16
    let same_order = (0.116..=11.6).contains(&mean_width);
    check(
        covered >= 95 && same_order,
        format!("99% CI covers 1 in {covered}/100 runs, mean width {mean_width:.3} (reference 1.16)"),
    )
}

fn maxent_counterexample() -> Outcome {
    let e = ScoreVector::new(vec![1.0, -1.0, 0.0]).unwrap();
    let p = Dist::new(vec![0.5, 0.25, 0.25]).unwrap();
    let q = Dist::new(vec![0.45, 0.20, 0.35]).unwrap();
    let scan = maximal_on_segment(&e, 0.25, 3001).unwrap();
    let dominators = scan
        .samples
        .iter()
        .filter(|s| compare(&p, s, &Order::Uncertainty).unwrap() == OrderVerdict::StrictlyLess)
        .count();
    let (hp, hq) = (shannon_entropy(&p), shannon_entropy(&q));
    let in_b = (e.expectation(&q) - 0.25).abs() < 1e-12;
    check(
        dominators == 0 && in_b && (hp - 1.039721).abs() < 1e-6 && (hq - 1.048654).abs() < 1e-6 && hp < hq,
        format!("{dominators} dominators of p on 3001 points; H(p) = {hp:.6} < H(q) = {hq:.6}"),
    )
}

fn maximal_set_truncation() -> Outcome {
    let e = ScoreVector::new(vec![1.0, -1.0, 0.0]).unwrap();
    let scan = maximal_on_segment(&e, 0.25, 3001).unwrap();
    // p_λ = (5 - λ, 3 - λ, 2λ) / 8, so λ = 4 p_2
    let lambdas: Vec<f64> = scan.maximal.iter().map(|&i| 4.0 * scan.samples[i].probs()[2]).collect();
    let lo = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    check((lo - 1.0).abs() < 1e-3 && (hi - 5.0 / 3.0).abs() < 1e-3, format!("maximal λ in [{lo:.4}, {hi:.4}]"))
}

fn maxent_solver() -> Outcome {
    let c = LinearConstraint { energy: ScoreVector::new(vec![1.0, -1.0, 0.0]).unwrap(), target: 0.25 };
    let sol = solve_maxent(&c, DEFAULT_TOL).unwrap();
    let want = [0.46624, 0.21624, 0.31752];
    let p_ok = sol.dist.probs().iter().zip(want).all(|(a, b)| (a - b).abs() <= 1e-5);
    let lambda = 5.0 - 8.0 * sol.dist.probs()[0];
    check(
        (sol.beta + 0.38415).abs() <= 1e-4
            && p_ok
            && (lambda - 1.27007).abs() < 1e-4
            && (1.0..=5.0 / 3.0).contains(&lambda),
        format!("beta = {:.5}, p* = {:?}, λ(p*) = {lambda:.5}", sol.beta, sol.dist.probs()),
    )
}

fn majorization_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut disagreements = 0;
    for _ in 0..500 {
        let n = rng.random_range(1..=4);
        let p = random_exact(&mut rng, n, 0);
        let q = random_exact(&mut rng, n, 0);
        let d = random_exact(&mut rng, n, 1);
        if d_majorization_leq(&p, &q, &d).unwrap() != d_majorization_oracle(&p, &q, &d).unwrap() {
            disagreements += 1;
        }
    }
    let mut uniform_mismatch = 0;
    for _ in 0..200 {
        let n = rng.random_range(1..=4);
        let p = random_exact(&mut rng, n, 0);
        let q = random_exact(&mut rng, n, 0);
        if d_majorization_leq(&p, &q, &ExactDist::uniform(n)).unwrap() != majorized_by(&p, &q).unwrap() {
            uniform_mismatch += 1;
        }
    }
    check(
        disagreements == 0 && uniform_mismatch == 0,
        format!("{disagreements} disagreements on 500 instances, {uniform_mismatch} uniform-d mismatches on 200"),
    )
}

fn dim_of(p: &ordlab::poset::FinitePreorder) -> Option<usize> {
    match dm_dimension(p, 4).unwrap() {
        Dimension::Known { dim, .. } => Some(dim),
        Dimension::Unknown { .. } => None,
    }
}

fn dimension_brute_force() -> Outcome {
    let chains_ok = (1..=8).all(|k| dim_of(&chain(k)) == Some(1));
    let anti = dim_of(&antichain(3));
    let s3 = dim_of(&standard_example(3));
    let fig = dim_of(&sign_modulus_poset());
    let recip = dim_of(&reciprocal_poset());
    let fam = RealFamily::new(reciprocal_utilities().to_vec()).unwrap();
    let strict = is_strict_monotone_multi_utility(&reciprocal_poset(), &fam).unwrap();
    check(
        chains_ok && anti == Some(2) && s3 == Some(3) && fig == Some(2) && recip == Some(2) && strict,
        format!("chains 1..8 -> 1: {chains_ok}; antichain_3 {anti:?}; S_3 {s3:?}; six-point posets {fig:?}, {recip:?}; {{u1, u2}} strict multi-utility: {strict}"),
    )
}

fn second_laws_falsifier() -> Outcome {
    let witness = vec![(Dist::new(vec![0.5, 0.25, 0.25]).unwrap(), Dist::new(vec![0.5, 0.5, 0.0]).unwrap())];
    let tops = check_second_laws_family(&[top_sum(1), top_sum(2)], &witness, &Order::Majorization).unwrap();
    let rejected = tops.violations.first().is_some_and(|v| v.clause == Clause::Strict && v.member == Some(0));

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pairs = Vec::new();
    while pairs.len() < 500 {
        let p = random_dist(&mut rng, 3, 0.0);
        let q = random_dist(&mut rng, 3, 0.0);
        if compare(&p, &q, &Order::Uncertainty).unwrap() != OrderVerdict::Incomparable {
            pairs.push((p, q));
        }
    }
    let fam = strict_monotone_family(3, &stern_brocot(20));
    let corrected = check_second_laws_family(&fam, &pairs, &Order::Uncertainty).unwrap();
    let pairs2: Vec<(Dist, Dist)> =
        (0..500).map(|_| (random_dist(&mut rng, 2, 0.0), random_dist(&mut rng, 2, 0.0))).collect();
    let h = check_second_laws_family(&[entropy()], &pairs2, &Order::Uncertainty).unwrap();
    check(
        rejected && corrected.passes() && h.passes(),
        format!(
            "top sums rejected on the witness: {rejected}; corrected family ({} members) violations on 500 pairs: {}; H alone (n = 2) violations: {}",
            fam.len(),
            corrected.violations.len(),
            h.violations.len()
        ),
    )
}

fn bisection() -> Outcome {
    let coeffs = vec![ratio(-2, 1), ratio(0, 1), ratio(1, 1)];
    let eps = ratio(1, 1 << 20);
    let run = bisection_run(&coeffs, &ratio(1, 1), &ratio(2, 1), &eps).unwrap();
    let widths_ok = run.intervals.iter().enumerate().all(|(k, i)| i.width() == ratio(1, 1i64 << k));
    let last = run.last();
    let brackets = eval_poly(&coeffs, last.lo()) < ratio(0, 1) && eval_poly(&coeffs, last.hi()) > ratio(0, 1);
    check(
        run.halvings() == 20 && widths_ok && brackets && !run.exact_root,
        format!("{} halvings, widths 2^-k: {widths_ok}, final {last} brackets sqrt 2: {brackets}", run.halvings()),
    )
}

fn domain_coherence() -> Outcome {
    let posets = all_small_posets();
    let mut failures = Vec::new();
    for (i, p) in posets.iter().enumerate() {
        let d = FiniteDcpo::new(p.clone()).unwrap();
        let n = d.n();
        let wb = way_below_matrix(&d);
        let wb_is_leq = (0..n).all(|x| (0..n).all(|y| wb[x][y] == p.leq(x, y)));
        let all_compact = compact_elements(&d) == (0..n).collect::<Vec<_>>();
        let thermo_ok = thermo_representation(p).is_none() || is_conditionally_connected(p);
        if !(order_from_opens_check(&d) && wb_is_leq && all_compact && thermo_ok) {
            failures.push(i);
        }
    }
    check(failures.is_empty(), format!("{} posets on <= 4 elements, failures {failures:?}", posets.len()))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    common::write_fixtures(dir.path());
    let matrix = common::smoke_matrix(dir.path());
    let mut mismatches = Vec::new();
    for a in &matrix {
        let first = common::run_cli(a, &[]);
        let second = common::run_cli(a, &[]);
        let other_jobs = common::run_cli(a, &[("ORDLAB_JOBS", "3")]);
        if first != second || first != other_jobs {
            mismatches.push(a.join(" "));
        }
    }
    check(
        mismatches.is_empty(),
        format!(
            "{} invocations, each run three times (the third with ORDLAB_JOBS=3); mismatches {mismatches:?}",
            matrix.len()
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 12] = [
        ("Jarzynski exactness", jarzynski_exactness, 10),
        ("Crooks exactness", crooks_exactness, 10),
        ("Simulation-pipeline calibration", simulation_calibration, 0),
        ("Maxent counterexample", maxent_counterexample, 1),
        ("Uncountable-maximal-set truncation", maximal_set_truncation, 1),
        ("Maxent solver", maxent_solver, 0),
        ("Majorization oracle equivalence", majorization_oracle, 0),
        ("Dimension brute force", dimension_brute_force, 60),
        ("Second-laws falsifier", second_laws_falsifier, 0),
        ("Bisection", bisection, 0),
        ("Domain coherence sweep", domain_coherence, 30),
        ("Determinism", determinism, 0),
    ];
    let mut failed = Vec::new();
    for (k, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let over = *budget > 0 && elapsed > Duration::from_secs(*budget);
        let (ok, detail) = match outcome {
            Ok(d) if over => (false, format!("{d}; over the {budget} s budget")),
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        let budget_note = if *budget > 0 { format!(", budget {budget} s") } else { String::new() };
        println!(
            "[{}] {:>2}. {name}: {detail} ({:.2} s{budget_note})",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            elapsed.as_secs_f64()
        );
        if !ok {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
