//! Acceptance suite. Runs every criterion at its stated tolerance and prints
//! one PASS/FAIL line each; exits nonzero if any fails.
//!
//! `ACCEPTANCE_ONLY=1,7` restricts the run to the listed criteria.

use std::io::Write;
use std::time::Instant;

use maxwell_ball::besselpoly::{g_oracle, log_derivative_gap, BesselError};
use maxwell_ball::fields::ModeField;
use maxwell_ball::scalar::parse_rational;
use maxwell_ball::spectrum::{
    cross_construction_mismatches, eigenvalue, exceptional_count, localization_check,
    reciprocal_symmetry_check, spectrum_table, uniform_grid, uniqueness_check, weyl_residual,
    SpectrumTable,
};
use maxwell_ball::{BigRational, GammaParam};
use maxwell_ball_cli::verify::{envelope_ratio, field_residuals, sample_negative_rationals, ENVELOPE_ORDERS};
use num_traits::Signed;

struct Outcome {
    passed: bool,
    summary: String,
}

fn outcome(passed: bool, summary: String) -> Outcome {
    Outcome { passed, summary }
}

fn gp(text: &str) -> GammaParam {
    GammaParam::parse(text).expect("valid gamma")
}

fn eps() -> BigRational {
    parse_rational("1e-30").unwrap()
}

fn table(gamma: &str, n_max: usize) -> SpectrumTable {
    spectrum_table(&gp(gamma), n_max, &eps()).expect("table certifies")
}

fn exact_root() -> Outcome {
    let start = Instant::now();
    let mode = eigenvalue(1, &gp("2"), &eps()).expect("mode certifies");
    let secs = start.elapsed().as_secs_f64();
    // positive root of 4w² - 2w - 1
    let w = (2.0 + (4.0f64 + 16.0).sqrt()) / 8.0;
    let oracle = -1.0 / (2.0 * w);
    let err = (mode.lambda_mid_f64() - oracle).abs();
    let closed = -2.0 / (1.0 + 5f64.sqrt());
    outcome(
        err <= 1e-12 && (oracle - closed).abs() < 1e-15 && secs <= 1.0,
        format!("λ₁ = {:.15}, |λ₁ - oracle| = {err:.1e}, {secs:.3} s", mode.lambda_mid_f64()),
    )
}

fn uniqueness() -> Outcome {
    let mut parts = Vec::new();
    let mut failures = 0;
    for g in ["3/2", "2", "3", "5"] {
        let start = Instant::now();
        let recs = uniqueness_check(&gp(g), 1..=500, 500).expect("counts computed");
        let bad: Vec<usize> = recs.iter().filter(|r| !r.passed()).map(|r| r.n).collect();
        failures += bad.len();
        parts.push(format!("γ={g}: {} failures ({:.0} s)", bad.len(), start.elapsed().as_secs_f64()));
    }
    outcome(failures == 0, format!("Descartes and Sturm for n <= 500; {}", parts.join(", ")))
}

fn cross_construction() -> Outcome {
    let mut total = 0;
    let mut parts = Vec::new();
    for g in ["3/2", "2", "5"] {
        let bad = cross_construction_mismatches(&gp(g), 300);
        total += bad.len();
        parts.push(format!("γ={g}: {}", bad.len()));
    }
    outcome(total == 0, format!("mismatching orders for n <= 300: {}", parts.join(", ")))
}

fn monotone_chain(tables: &[(&str, SpectrumTable)]) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (g, t) in tables {
        let v = t.monotonicity_violation();
        ok &= v.is_none() && t.modes.len() == 500;
        parts.push(format!("γ={g}: {}", v.map_or("none".to_string(), |n| format!("violation at n={n}"))));
    }
    outcome(ok, format!("disjoint decreasing intervals for n <= 500; {}", parts.join(", ")))
}

fn oracle_consistency(t: &SpectrumTable) -> Outcome {
    let gp = &t.gamma_param;
    let tol = 1e-8 * (1.0 + gp.gamma0_f64());
    let (mut worst, mut used, mut skipped) = (0.0f64, 0, 0);
    let mut other_error = None;
    for mode in t.modes.iter().take(100) {
        match g_oracle(mode.n, mode.lambda_mid_f64(), gp) {
            Ok(g) => {
                worst = worst.max(g.abs());
                used += 1;
            }
            Err(BesselError::OverflowAtLargeN { .. }) => skipped += 1,
            Err(e) => other_error = Some(format!("n={}: {e}", mode.n)),
        }
    }
    outcome(
        worst <= tol && other_error.is_none(),
        format!(
            "max |g_n(λ_n)| = {worst:.2e} <= {tol:.1e} over {used} orders, {skipped} out of float range{}",
            other_error.map(|e| format!("; {e}")).unwrap_or_default()
        ),
    )
}

fn localization(t: &SpectrumTable) -> Outcome {
    let rep = localization_check(t);
    let lower = rep.window_max(10, 250).unwrap_or(f64::NAN);
    let upper = rep.window_max(250, 500).unwrap_or(f64::NAN);
    outcome(
        upper <= 2.0 * lower,
        format!(
            "max gap on [250,500] = {upper:.6}, on [10,250] = {lower:.6}; empirical a(γ) = {:.6} at n = {}",
            rep.max_gap, rep.argmax_n
        ),
    )
}

fn weyl() -> Outcome {
    let start = Instant::now();
    let t = table("2", 800);
    let grid = uniform_grid(50.0, 450.0, 81);
    let rep = match weyl_residual(&t, &grid) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let secs = start.elapsed().as_secs_f64();
    let s = &rep.summary;
    let fit_ok = (2.85..=3.15).contains(&s.fitted_leading);
    outcome(
        fit_ok && s.no_growth() && secs <= 600.0,
        format!(
            "reach {:.1}; fitted leading {:.5}; max|N-3r²|/r lower half {:.4}, upper half {:.4}; {secs:.0} s",
            t.certified_radius(),
            s.fitted_leading,
            s.lower_half_max,
            s.upper_half_max
        ),
    )
}

fn exceptional() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for g in ["3/2", "2", "3", "5", "1/2", "2/3"] {
        match exceptional_count(&table(g, 40)) {
            Ok(k) => {
                ok &= k <= 1;
                parts.push(format!("γ={g}: {k}"));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("γ={g}: {e}"));
            }
        }
    }
    outcome(ok, format!("eigenvalues above -c0: {}", parts.join(", ")))
}

fn reciprocal() -> Outcome {
    let same = reciprocal_symmetry_check(&parse_rational("2").unwrap(), 50, &eps()).unwrap_or(false);
    outcome(same, format!("γ = 2 and γ = 1/2 enclosures identical for n <= 50: {same}"))
}

fn positivity() -> Outcome {
    let samples = sample_negative_rationals(200);
    let mut bad = 0;
    for n in 1..=50 {
        for lam in &samples {
            match log_derivative_gap(n, lam) {
                Ok(v) if v.is_positive() => {}
                _ => bad += 1,
            }
        }
    }
    outcome(bad == 0, format!("{bad} nonpositive exact signs out of {}", 50 * samples.len()))
}

fn envelope() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in ENVELOPE_ORDERS {
        match envelope_ratio(n) {
            Ok(r) => {
                ok &= r <= 3.0;
                parts.push(format!("n={n}: {r:.3}"));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("n={n}: {e}"));
            }
        }
    }
    outcome(ok, format!("max err·|λ| over value at λ = -80: {}", parts.join(", ")))
}

fn field_residual_check(t: &SpectrumTable) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, m) in [(1usize, 0i64), (2, 1), (3, -2)] {
        let mode = ModeField::from_mode(&t.modes[n - 1], m, &t.gamma_param).expect("valid mode");
        match field_residuals(&mode, 1e-4) {
            Ok(r) => {
                ok &= r.boundary <= 1e-8 && r.maxwell <= 1e-5 && (3.0..=5.0).contains(&r.order_ratio);
                parts.push(format!(
                    "({n},{m}): boundary {:.1e}, curl {:.1e}, ratio {:.3}",
                    r.boundary, r.maxwell, r.order_ratio
                ));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("({n},{m}): {e}"));
            }
        }
    }
    outcome(ok, parts.join("; "))
}

fn main() {
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let wanted = |k: usize| only.as_ref().is_none_or(|v| v.contains(&k));
    let needs_tables = [4, 5, 6, 12].iter().any(|&k| wanted(k));
    let tables: Vec<(&str, SpectrumTable)> = if needs_tables {
        ["2", "3/2", "3", "5"].into_iter().map(|g| (g, table(g, 500))).collect()
    } else {
        Vec::new()
    };
    let gamma_two = || &tables[0].1;

    let mut failed = Vec::new();
    let mut report = |k: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        if !wanted(k) {
            return;
        }
        let start = Instant::now();
        let o = f();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] {k:>2} {name}: {} [{:.1} s]",
            o.summary,
            start.elapsed().as_secs_f64()
        );
        std::io::stdout().flush().ok();
        if !o.passed {
            failed.push(k);
        }
    };

    report(1, "exact root reproduction", &mut exact_root);
    report(3, "cross-construction equality", &mut cross_construction);
    report(4, "monotone chain", &mut || monotone_chain(&tables));
    report(5, "oracle consistency", &mut || oracle_consistency(gamma_two()));
    report(6, "localization", &mut || localization(gamma_two()));
    report(7, "Weyl law", &mut weyl);
    report(8, "exceptional bound", &mut exceptional);
    report(9, "reciprocal symmetry", &mut reciprocal);
    report(10, "log-derivative gap positivity", &mut positivity);
    report(11, "approximation envelope", &mut envelope);
    report(12, "field residuals", &mut || field_residual_check(gamma_two()));
    report(2, "uniqueness certification", &mut uniqueness);

    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
