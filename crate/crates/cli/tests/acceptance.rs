//! Exit-gate checks. Runs without the libtest harness so every criterion
//! prints its verdict line; the process fails if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use siac_core::filter::{integrate_kernel, relative_reproduction_residuals};
use siac_core::quadrature::GaussLegendre;
use siac_core::{
    build_kernel, build_matrix_divdiff, build_matrix_single_knots, build_matrix_uniform,
    coefficient_table, convolve_field, divided_difference, divided_difference_expansion,
    symmetric_knots, BSpline, KnotSequence, PiecewiseField, Polynomial, Rational, Scalar,
    ScaledKernel, SiacKernel, TableMode,
};

const SEED: u64 = 0x51AC;

struct Check {
    name: &'static str,
    ok: bool,
    detail: String,
}

impl Check {
    fn new(name: &'static str, ok: bool, detail: impl Into<String>) -> Self {
        Check {
            name,
            ok,
            detail: detail.into(),
        }
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn report(id: usize, title: &str, checks: Vec<Check>) -> bool {
    let ok = checks.iter().all(|c| c.ok);
    println!("criterion {id} {title}: {}", verdict(ok));
    for c in &checks {
        println!("    {} {}: {}", verdict(c.ok), c.name, c.detail);
    }
    ok
}

/// `n` strictly increasing knots with spacings drawn from `[0.4, 1.6]`, centred
/// within `±1` of the origin like a perturbed symmetric layout.
fn random_knots(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut t = 0.0;
    let mut knots: Vec<f64> = (0..n)
        .map(|_| {
            let v = t;
            t += rng.gen_range(0.4..1.6);
            v
        })
        .collect();
    let shift = 0.5 * knots[n - 1] + rng.gen_range(-1.0..1.0);
    knots.iter_mut().for_each(|x| *x -= shift);
    knots
}

/// Strictly increasing rationals with spacings in `{2/4, 3/4, ..., 7/4}`, centred
/// within `±1` of the origin.
fn random_rational_knots(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    let mut t = Rational::zero();
    let mut knots: Vec<Rational> = (0..n)
        .map(|_| {
            let v = t.clone();
            t = t.clone() + Rational::from_ratio(rng.gen_range(2..8), 4);
            v
        })
        .collect();
    let shift = knots[n - 1].clone() / Rational::from_integer(2)
        + Rational::from_ratio(rng.gen_range(-4..5), 4);
    knots
        .iter_mut()
        .for_each(|x| *x = x.clone() - shift.clone());
    knots
}

fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        / scale
}

fn paper_tables() -> Vec<(usize, &'static str)> {
    vec![
        (1, "[-1, 14, -1]/12"),
        (2, "[-37, 388, -2622, 388, -37]/1920"),
        (3, "[-82, 933, -5514, 24446, -5514, 933, -82]/15120"),
        (
            4,
            "[-153617, 1983016, -12615836, 54427672, -180179750, 54427672, -12615836, 1983016, -153617]/92897280",
        ),
        (5, "[-4201, 61546, -437073, 2034000, -7077894, 18830604, -7077894, 2034000, -437073, 61546, -4201]/7983360"),
    ]
}

fn golden_tables() -> bool {
    let bin = env!("CARGO_BIN_EXE_siac");
    let mut checks = Vec::new();
    let mut elapsed = Duration::ZERO;
    for (d, expected) in paper_tables() {
        let start = Instant::now();
        let out = Command::new(bin)
            .args(["table", "-d", &d.to_string(), "--paper-verbatim"])
            .output()
            .expect("run siac");
        elapsed += start.elapsed();
        let got = String::from_utf8_lossy(&out.stdout).trim().to_string();
        let ok = out.status.success() && got == expected;
        checks.push(Check::new("table", ok, format!("d={d} {got}")));
    }
    checks.push(Check::new(
        "runtime",
        elapsed < Duration::from_secs(1),
        format!("{:.3}s total (limit 1s)", elapsed.as_secs_f64()),
    ));
    report(1, "golden tables", checks)
}

fn sign_consistency() -> bool {
    let mut checks = Vec::new();
    for d in 1..=5 {
        let paper = coefficient_table(d, TableMode::PaperVerbatim).unwrap();
        let corrected = coefficient_table(d, TableMode::SignCorrected).unwrap();
        let negated: Vec<_> = paper.numerators.iter().map(|n| -n).collect();
        let relation_ok = paper.denominator == corrected.denominator
            && if d % 2 == 0 {
                corrected.numerators == negated
            } else {
                corrected.numerators == paper.numerators
            };
        let kernel = build_kernel(&symmetric_knots::<Rational>(d), d).unwrap();
        let sum: Rational = kernel.raw_coefficients().iter().cloned().sum();
        let relation = if d % 2 == 0 { "negated" } else { "equal" };
        checks.push(Check::new(
            "divided-difference path",
            relation_ok && sum == Rational::one(),
            format!("d={d} {relation} relative to printed, coefficient sum {sum}"),
        ));
    }
    report(2, "sign consistency", checks)
}

fn matrix_equivalence() -> bool {
    let mut checks = Vec::new();
    for d in 1..=5 {
        let uniform = build_matrix_uniform::<Rational>(d);
        let divdiff = build_matrix_divdiff(&symmetric_knots::<Rational>(d), d).unwrap();
        let sign = Rational::from_integer(if d % 2 == 0 { -1 } else { 1 });
        let ok = uniform == divdiff.scaled(&sign);
        checks.push(Check::new(
            "uniform closed form",
            ok,
            format!("d={d} equals (-1)^(d+1) x divided differences"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for d in 1..=4 {
        for _ in 0..50 {
            let knots = KnotSequence::new(random_knots(&mut rng, 3 * d + 2)).unwrap();
            let a = build_matrix_single_knots(&knots, d).unwrap();
            let b = build_matrix_divdiff(&knots, d).unwrap();
            for (ra, rb) in a.rows().iter().zip(b.rows()) {
                worst = worst.max(max_rel_diff(ra, rb));
            }
        }
    }
    checks.push(Check::new(
        "single-knot expansion",
        worst <= 1e-12,
        format!(
            "max row-relative difference {worst:.2e} over 50 knot sets per d=1..4 (limit 1e-12)"
        ),
    ));
    report(3, "constraint matrix equivalence", checks)
}

fn reproduction() -> bool {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut checks = Vec::new();
    for d in 1..=4 {
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let knots = KnotSequence::new(random_knots(&mut rng, 3 * d + 2)).unwrap();
            let kernel = build_kernel(&knots, d).unwrap();
            let (lo, hi) = kernel.support();
            let third = (hi - lo) / 3.0;
            let xs: Vec<f64> = (0..100)
                .map(|i| lo + third + third * i as f64 / 99.0)
                .collect();
            for row in relative_reproduction_residuals(&kernel, 2 * d, &xs) {
                worst = row.iter().fold(worst, |m, &r| m.max(r));
            }
        }
        checks.push(Check::new(
            "residual",
            worst <= 1e-8,
            format!(
                "d={d} max relative residual {worst:.2e} for delta <= {} (limit 1e-8)",
                2 * d
            ),
        ));
    }
    let elapsed = start.elapsed();
    checks.push(Check::new(
        "runtime",
        elapsed < Duration::from_secs(30),
        format!("{:.2}s (limit 30s)", elapsed.as_secs_f64()),
    ));
    report(4, "polynomial reproduction", checks)
}

fn oracles() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut checks = Vec::new();

    let mut worst_eval = 0.0f64;
    let mut worst_moment = 0.0f64;
    let mut splines = 0;
    for d in 0..=5 {
        for _ in 0..5 {
            let spline =
                BSpline::new(d, KnotSequence::new(random_knots(&mut rng, d + 2)).unwrap()).unwrap();
            splines += 1;
            let (&a, &b) = spline.support();
            let pad = 0.05 * (b - a);
            for i in 0..1000 {
                let x = a - pad + (b - a + 2.0 * pad) * i as f64 / 999.0;
                worst_eval = worst_eval
                    .max((spline.eval_via_divdiff(&x) - spline.eval_via_recurrence(&x)).abs());
            }
            let rule = GaussLegendre::new(2 * d + 2);
            for delta in 0..=2 * d + 2 {
                for x in [a, 0.5 * (a + b), b + 0.3, a - 1.1] {
                    let closed = spline.monomial_moment(delta, &x);
                    let quad = rule.integrate_piecewise(spline.knots().as_slice(), |t| {
                        spline.eval_via_recurrence(&t) * (t - x).powi(delta as i32)
                    });
                    worst_moment = worst_moment.max((closed - quad).abs() / quad.abs().max(1.0));
                }
            }
        }
    }
    checks.push(Check::new(
        "evaluation vs recurrence",
        worst_eval <= 1e-12,
        format!("max difference {worst_eval:.2e} at 1000 points on each of {splines} splines (limit 1e-12)"),
    ));
    checks.push(Check::new(
        "moments vs quadrature",
        worst_moment <= 1e-10,
        format!("max relative difference {worst_moment:.2e} (limit 1e-10)"),
    ));

    let mut agree = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..8);
        let knots = KnotSequence::strictly_increasing(random_rational_knots(&mut rng, n)).unwrap();
        let deg = rng.gen_range(0..n + 3);
        let coefficients: Vec<Rational> = (0..=deg)
            .map(|_| Rational::from_ratio(rng.gen_range(-20..21), rng.gen_range(1..6)))
            .collect();
        let h = Polynomial::new(coefficients);
        let values: Vec<Rational> = knots.as_slice().iter().map(|t| h.eval(t)).collect();
        if divided_difference(&knots, &h).unwrap()
            == divided_difference_expansion(&knots, &values).unwrap()
        {
            agree += 1;
        }
    }
    checks.push(Check::new(
        "recursion vs expansion",
        agree == 100,
        format!("{agree}/100 exact rational cases equal"),
    ));
    report(5, "oracle suites", checks)
}

fn invariance() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut checks = Vec::new();

    let mut worst_affine = 0.0f64;
    let mut worst_dilation = 0.0f64;
    let mut worst_covariance = 0.0f64;
    for d in 1..=4 {
        for _ in 0..10 {
            let t = random_knots(&mut rng, 3 * d + 2);
            let a = rng.gen_range(0.1..10.0);
            let b = rng.gen_range(-5.0..5.0);
            let base = build_kernel(&KnotSequence::new(t.clone()).unwrap(), d).unwrap();
            let mapped_knots: Vec<f64> = t.iter().map(|x| a * x + b).collect();
            let mapped = build_kernel(&KnotSequence::new(mapped_knots).unwrap(), d).unwrap();
            let dilated_knots: Vec<f64> = t.iter().map(|x| a * x).collect();
            let dilated = build_kernel(&KnotSequence::new(dilated_knots).unwrap(), d).unwrap();
            worst_affine = worst_affine.max(max_rel_diff(
                mapped.raw_coefficients(),
                base.raw_coefficients(),
            ));
            worst_dilation = worst_dilation.max(max_rel_diff(
                dilated.raw_coefficients(),
                base.raw_coefficients(),
            ));
            let (lo, hi) = base.support();
            let peak = (0..=400)
                .map(|i| base.eval(&(lo + (hi - lo) * i as f64 / 400.0)).abs())
                .fold(0.0f64, f64::max);
            for i in 0..=400 {
                let u = lo + (hi - lo) * i as f64 / 400.0;
                let lhs = a * dilated.eval(&(a * u));
                worst_covariance = worst_covariance.max((lhs - base.eval(&u)).abs() / peak);
            }
        }
    }
    checks.push(Check::new(
        "raw coefficients under x -> ax+b",
        worst_affine <= 1e-9,
        format!("max relative change {worst_affine:.2e}, a in [0.1,10], b in [-5,5] (limit 1e-9)"),
    ));
    let base = build_kernel(&symmetric_knots::<Rational>(1), 1).unwrap();
    let shifted_knots = symmetric_knots::<Rational>(1)
        .map(|t| t.clone() + Rational::one())
        .unwrap();
    let shifted = build_kernel(&shifted_knots, 1).unwrap();
    let show = |c: &[Rational]| {
        c.iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    checks.push(Check::new(
        "raw coefficients under x -> x+1, exact",
        base.raw_coefficients() == shifted.raw_coefficients(),
        format!(
            "d=1 [{}] -> [{}]",
            show(base.raw_coefficients()),
            show(shifted.raw_coefficients())
        ),
    ));
    checks.push(Check::new(
        "raw coefficients under x -> ax",
        worst_dilation <= 1e-9,
        format!("max relative change {worst_dilation:.2e} (limit 1e-9)"),
    ));
    checks.push(Check::new(
        "kernel under x -> ax: a K'(au) = K(u)",
        worst_covariance <= 1e-9,
        format!("max difference relative to peak {worst_covariance:.2e} (limit 1e-9)"),
    ));

    let mut symmetric_ok = true;
    let mut worst_integral = 0.0f64;
    for d in 0..=5 {
        let kernel = build_kernel(&symmetric_knots::<Rational>(d), d).unwrap();
        let c = kernel.raw_coefficients();
        symmetric_ok &= c.iter().eq(c.iter().rev());
        worst_integral = worst_integral.max((integrate_kernel(&kernel.to_f64()) - 1.0).abs());
    }
    checks.push(Check::new(
        "symmetric knots give palindromic coefficients",
        symmetric_ok,
        "exact, d=0..5",
    ));

    let mut sums_ok = true;
    for d in 1..=4 {
        for _ in 0..10 {
            let knots = KnotSequence::new(random_rational_knots(&mut rng, 3 * d + 2)).unwrap();
            let kernel: SiacKernel<Rational> = build_kernel(&knots, d).unwrap();
            sums_ok &=
                kernel.raw_coefficients().iter().cloned().sum::<Rational>() == Rational::one();
            worst_integral = worst_integral.max((integrate_kernel(&kernel.to_f64()) - 1.0).abs());
            let float = build_kernel(
                &KnotSequence::new(random_knots(&mut rng, 3 * d + 2)).unwrap(),
                d,
            )
            .unwrap();
            worst_integral = worst_integral.max((integrate_kernel(&float) - 1.0).abs());
        }
    }
    checks.push(Check::new(
        "integral of K by quadrature",
        worst_integral <= 1e-12,
        format!("max |integral - 1| {worst_integral:.2e} on symmetric and 80 random knot sets (limit 1e-12)"),
    ));
    checks.push(Check::new(
        "sum of raw coefficients",
        sums_ok,
        "exactly 1 on 40 random rational knot sets",
    ));
    report(6, "invariance", checks)
}

fn end_to_end_filter() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut checks = Vec::new();

    let mut breaks = vec![-1.0];
    let widths: Vec<f64> = (0..16).map(|_| rng.gen_range(0.5..1.5)).collect();
    let total: f64 = widths.iter().sum();
    for w in &widths {
        breaks.push(breaks.last().unwrap() + 2.0 * w / total);
    }
    *breaks.last_mut().unwrap() = 1.0;
    for d in 1..=3 {
        let coefficients: Vec<f64> = (0..=2 * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p = Polynomial::new(coefficients);
        let field = PiecewiseField::project(breaks.clone(), 2 * d, |x| p.eval(&x)).unwrap();
        let h = field.mean_cell_width();
        let kernel =
            ScaledKernel::new(build_kernel(&symmetric_knots::<f64>(d), d).unwrap(), h).unwrap();
        let (ka, kb) = kernel.support();
        let (lo, hi) = (-1.0 + kb + 1e-9, 1.0 + ka - 1e-9);
        let xs: Vec<f64> = (0..50)
            .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / 50.0)
            .collect();
        let values = convolve_field(&kernel, &field, &xs).unwrap();
        let worst = xs
            .iter()
            .zip(&values)
            .fold(0.0f64, |m, (x, v)| m.max((v - p.eval(x)).abs()));
        checks.push(Check::new(
            "degree-2d polynomial",
            worst <= 1e-9,
            format!("d={d} max error {worst:.2e} at 50 points on [{lo:.3}, {hi:.3}] (limit 1e-9)"),
        ));
    }

    let step_breaks: Vec<f64> = (0..=16).map(|i| -1.0 + i as f64 / 8.0).collect();
    let step = PiecewiseField::new(
        step_breaks.clone(),
        step_breaks
            .windows(2)
            .map(|w| vec![if w[0] >= 0.0 { 1.0 } else { 0.0 }])
            .collect(),
    )
    .unwrap();
    let kernel = ScaledKernel::new(
        build_kernel(&symmetric_knots::<f64>(2), 2).unwrap(),
        step.mean_cell_width(),
    )
    .unwrap();
    let max_jump = |n: usize| {
        let xs: Vec<f64> = (0..n).map(|i| -0.5 + i as f64 / (n - 1) as f64).collect();
        let v = convolve_field(&kernel, &step, &xs).unwrap();
        v.windows(2).fold(0.0f64, |m, w| m.max((w[1] - w[0]).abs()))
    };
    let (coarse, fine) = (max_jump(200), max_jump(800));
    checks.push(Check::new(
        "step smoothing",
        coarse >= 4.0 * fine,
        format!("max adjacent jump {coarse:.4e} -> {fine:.4e} from 200 to 800 samples, ratio {:.3} (needs >= 4)", coarse / fine),
    ));
    report(7, "end-to-end filter", checks)
}

fn main() -> ExitCode {
    let results = [
        golden_tables(),
        sign_consistency(),
        matrix_equivalence(),
        reproduction(),
        oracles(),
        invariance(),
        end_to_end_filter(),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
