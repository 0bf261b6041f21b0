//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints its PASS/FAIL line; exits nonzero if any fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use warpheat::barriers::{prop43_window, time_envelope, Barrier, ExpBarrier};
use warpheat::evolution::{
    blowup_criterion, bump, compare_with_envelope, exhaustion_solve, scaled_barrier, solve_on_ball,
    EvolutionControls, Verdict,
};
use warpheat::experiments::{preset, run_sweep};
use warpheat::forcing::ForcingH;
use warpheat::radial::RadialGrid;
use warpheat::spectral::dirichlet_lambda1;
use warpheat::ModelManifold;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn eigen_calibration() -> Outcome {
    let h = dirichlet_lambda1(&ModelManifold::hyperbolic(3, 1.0).unwrap(), 40.0, 4000).unwrap().lambda1;
    let e = dirichlet_lambda1(&ModelManifold::euclidean(3).unwrap(), 1.0, 2000).unwrap().lambda1;
    let rel = (e / (PI * PI) - 1.0).abs();
    outcome(
        (1.0..=1.01).contains(&h) && rel < 1e-3,
        format!("hyperbolic R=40: {h:.6} in [1, 1.01]; euclidean R=1: {e:.6} vs pi^2 (rel {rel:.2e})"),
    )
}

fn barrier_residuals() -> Outcome {
    let cases = common::barrier_suite();
    let failed: Vec<&str> = cases
        .iter()
        .filter(|c| !c.check.pass || c.outer_violation.is_some_and(|v| v > 0.0))
        .map(|c| c.label.as_str())
        .collect();
    let worst = cases.iter().map(|c| c.check.max_residual).fold(f64::NEG_INFINITY, f64::max);
    let control = common::barrier_negative_control();
    outcome(
        failed.is_empty() && !control.pass,
        format!(
            "{} draws over 5 constructors, worst residual {worst:.2e}, failures {failed:?}; negative control fails: {}",
            cases.len(),
            !control.pass
        ),
    )
}

fn vieta() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 100, failure_persistence: None, ..Config::default() });
    let strategy = (2usize..12, 0.05f64..5.0, 1e-6f64..1.0);
    let worst = std::cell::Cell::new(0.0f64);
    let draws = runner.run(&strategy, |(n, k, frac)| {
        let s = (n - 1) as f64 * k;
        let lambda = frac * s * s / 4.0;
        let (lo, hi) = prop43_window(n, k, lambda).unwrap();
        let e = ((lo + hi - s).abs() / s.max(1.0)).max((lo * hi - lambda).abs() / lambda.max(1.0));
        worst.set(worst.get().max(e));
        prop_assert!(e <= 1e-12);
        Ok(())
    });
    let collapse = [(3usize, 1.0), (5, 0.3), (8, 2.5)].iter().all(|&(n, k)| {
        let cap = ((n - 1) as f64 * k).powi(2) / 4.0;
        let (lo, hi) = prop43_window(n, k, cap).unwrap();
        (hi - lo).abs() <= 1e-15 * hi
    });
    outcome(
        draws.is_ok() && collapse,
        format!("100 draws, worst relative Vieta error {:.2e}; window collapses at the McKean value: {collapse}", worst.get()),
    )
}

fn xi_oracle() -> Outcome {
    let cases = common::forcing_cases();
    let (lambda, p, sup) = (1.0, 2.0, 1.0);
    let mut worst: f64 = 0.0;
    for (forcing, h) in &cases {
        let env = time_envelope(*forcing, lambda, p, sup).unwrap();
        let c = 0.9 * env.c_tilde_max().unwrap();
        let w = c * sup;
        let ode = common::rk4(|t, xi| w * h(t) * (-lambda * t).exp() * xi * xi, 1.0, 20.0, 40_000);
        for (t, xi) in ode {
            worst = worst.max((env.xi(c, t) - xi).abs());
        }
    }
    let mut classifier_ok = true;
    for sigma in [0.5f64, 1.0, 2.0] {
        for p in [1.25, 1.5, 2.5, 3.5] {
            let rate = (p - 1.0) - sigma;
            let env = time_envelope(ForcingH::exponential(sigma).unwrap(), 1.0, p, 1.0).unwrap();
            classifier_ok &= env.is_finite() == (rate > 0.0);
        }
    }
    outcome(
        worst < 1e-8 && classifier_ok,
        format!("sup |xi - RK4| on [0, 20] over 3 forcings: {worst:.2e}; finiteness classifier agrees: {classifier_ok}"),
    )
}

fn comparison_sandwich() -> Outcome {
    let m = ModelManifold::hyperbolic(3, 1.0).unwrap();
    let (lambda, p) = (1.0, 2.0);
    let (beta, _) = prop43_window(3, 1.0, lambda).unwrap();
    let barrier = Barrier::Exp(ExpBarrier::new(1.0, beta).unwrap());
    let sup = barrier.sup_norm(&RadialGrid::with_spacing(10.0, 0.02).unwrap());
    let env = time_envelope(ForcingH::One, lambda, p, sup).unwrap();
    let c = 0.5 * env.c_tilde_max().unwrap();
    let controls = EvolutionControls { t_end: 50.0, ..EvolutionControls::default() };
    let init = |g: &RadialGrid| scaled_barrier(&barrier, c, g);
    let rep = exhaustion_solve(&m, &[10.0, 20.0, 40.0], 0.02, &init, ForcingH::One, p, &controls).unwrap();
    let checks: Vec<_> = rep.outcomes.iter().map(|o| compare_with_envelope(o, &barrier, &env, c, None)).collect();
    let all_global = rep.outcomes.iter().all(|o| o.verdict == Verdict::GlobalUpToHorizon);
    let envelope_ok = checks.iter().all(|c| c.pass);
    let worst = checks.iter().map(|c| c.max_violation).fold(f64::NEG_INFINITY, f64::max);
    outcome(
        all_global && envelope_ok && rep.monotone() && rep.gaps_decreasing(),
        format!(
            "R = 10, 20, 40: envelope pass {envelope_ok} (max u - bound {worst:.2e}, tol {:.2e}); \
             monotone {} (violations {:?}); gaps {:?} decreasing {}",
            checks[0].tolerance,
            rep.monotone(),
            rep.monotonicity_violations.iter().map(|v| format!("{v:.1e}")).collect::<Vec<_>>(),
            rep.gaps.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>(),
            rep.gaps_decreasing()
        ),
    )
}

fn fujita() -> Outcome {
    let m = ModelManifold::euclidean(3).unwrap();
    let grid = RadialGrid::with_spacing(20.0, 0.02).unwrap();
    let controls = EvolutionControls { t_end: 50.0, ..EvolutionControls::default() };
    let hot = solve_on_ball(&m, &bump(1.0, 5.0, &grid).unwrap(), ForcingH::One, 1.5, &controls).unwrap();
    let cold = solve_on_ball(&m, &bump(1e-2, 5.0, &grid).unwrap(), ForcingH::One, 2.5, &controls).unwrap();
    let final_sup = cold.history.last().unwrap().sup_norm;
    let decays = cold.verdict == Verdict::GlobalUpToHorizon && final_sup < cold.initial_sup();
    outcome(
        matches!(hot.verdict, Verdict::BlowUp(_)) && decays,
        format!(
            "p = 1.5, unit bump: {}; p = 2.5, amplitude 1e-2: {} with sup {:.2e} -> {final_sup:.2e}",
            hot.verdict,
            cold.verdict,
            cold.initial_sup()
        ),
    )
}

fn exponential_threshold() -> Outcome {
    let cfg = preset("exp-forcing-hyperbolic").unwrap();
    let start = Instant::now();
    let cells = run_sweep(&cfg).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let low_blow = cells.iter().filter(|c| c.p <= 1.8 + 1e-9).all(|c| matches!(c.verdict, Verdict::BlowUp(_)));
    let high_cert = cells.iter().filter(|c| c.p >= 2.2 - 1e-9).all(|c| c.category() == "global-certified");
    let transition: Vec<String> = cells
        .iter()
        .filter(|c| c.p > 1.8 + 1e-9 && c.p < 2.2 - 1e-9)
        .map(|c| format!("p={}:{}", c.p, c.category()))
        .collect();
    outcome(
        low_blow && high_cert && secs <= 600.0,
        format!(
            "{} cells in {secs:.1} s; blow-up for p <= 1.8: {low_blow}; certified for p >= 2.2: {high_cert}; \
             {} transition cells {transition:?}",
            cells.len(),
            transition.len()
        ),
    )
}

fn discretization_order() -> Outcome {
    let results = common::richardson_errors(4.0);
    let orders: Vec<f64> = results
        .iter()
        .flat_map(|(_, e)| e.windows(2).map(|w| (w[0] / w[1]).log2()).collect::<Vec<_>>())
        .collect();
    let (lo, hi) = orders.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &o| (a.min(o), b.max(o)));
    outcome(
        orders.iter().all(|o| (o - 2.0).abs() <= 0.5),
        format!("{} (manifold, function) pairs, observed orders in [{lo:.3}, {hi:.3}]", results.len()),
    )
}

fn criterion_cases() -> Outcome {
    let exp = |s: f64| ForcingH::exponential(s).unwrap();
    let pow = |q: f64| ForcingH::power_law(q).unwrap();
    // (forcing, p, λ₁, ε, expected): only exponential forcing with
    // σ/(p-1) > λ₁ + ε drives the blow-up argument.
    let cases = [
        (ForcingH::One, 1.5, 1.0, 0.1, false),
        (ForcingH::One, 3.0, 1.0, 0.1, false),
        (ForcingH::One, 1.01, 0.25, 0.01, false),
        (pow(1.0), 1.5, 1.0, 0.1, false),
        (pow(5.0), 1.1, 1.0, 0.5, false),
        (pow(0.5), 3.0, 0.5, 0.1, false),
        (exp(2.0), 1.5, 1.0, 0.5, true),
        (exp(1.0), 3.0, 1.0, 0.1, false),
        (exp(1.0), 1.9, 1.0, 0.1, true),
    ];
    let mismatches: Vec<usize> = cases
        .iter()
        .enumerate()
        .filter(|(_, &(h, p, l, e, want))| blowup_criterion(h, p, l, e).unwrap() != want)
        .map(|(i, _)| i)
        .collect();
    // Both sides of p = 1 + σ/λ₁ = 2: some ε works just below, none just above.
    let below = blowup_criterion(exp(1.0), 1.99, 1.0, 1e-3).unwrap();
    let above = [0.5, 0.1, 1e-3, 1e-9].iter().all(|&e| !blowup_criterion(exp(1.0), 2.01, 1.0, e).unwrap());
    outcome(
        mismatches.is_empty() && below && above,
        format!("9 cases, mismatches {mismatches:?}; p = 1.99 true: {below}; p = 2.01 false for all eps: {above}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("eigenvalue calibration", eigen_calibration),
        ("barrier residual suite", barrier_residuals),
        ("Vieta and window algebra", vieta),
        ("xi oracle", xi_oracle),
        ("comparison sandwich", comparison_sandwich),
        ("Fujita dichotomy", fujita),
        ("exponential-forcing threshold", exponential_threshold),
        ("discretization order", discretization_order),
        ("blow-up criterion cases", criterion_cases),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        failures += usize::from(!o.pass);
        println!(
            "{} [{}] {name} ({:.1} s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
