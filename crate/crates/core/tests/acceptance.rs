//! Acceptance suite: one line per criterion with its verdict, runtime and a
//! short detail. Criterion 10 re-runs 1 through 9 and compares the JSON
//! reports byte for byte.

use std::f64::consts::PI;
use std::time::Instant;

use pizzetti::algebra::{DiffOp, MultiPoly, RationalFn, SquareMatrix};
use pizzetti::means::{
    mean_exact_poly, mean_value_check, pizzetti_residual, rot_avg_mean, rot_avg_series, BaseKind, MeasureSpec,
};
use pizzetti::moments::{
    check_generalised_moment, gamma, kernel_moment_integral, mittag_leffler, moment_order_bounds, moment_product,
    moment_quotient, moment_subsequence, KernelFn, KernelQuadConfig, MomentFn,
};
use pizzetti::series::{formal_solution_rational, gevrey_estimate, specialise};
use pizzetti::summability::{
    convergence_verdict, diagonal_growth, pws_check, quasi_diagonal_growth, summability_verdict, symbol_eval,
    SummabilityConfig,
};
use pizzetti::{Complex64, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
    report: Value,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize, max_degree: u32, terms: usize) -> MultiPoly {
    let mut out = Vec::with_capacity(terms + 1);
    // Always include a top-degree term so the degree bound is exercised.
    for i in 0..=terms {
        let d = if i == 0 { max_degree } else { rng.gen_range(0..=max_degree) };
        let mut exp = vec![0u32; n];
        for _ in 0..d {
            exp[rng.gen_range(0..n)] += 1;
        }
        out.push((exp, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
    }
    MultiPoly::from_terms(n, out).expect("consistent dimensions")
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<Complex64> {
    let scale = radius / (n as f64).sqrt();
    (0..n)
        .map(|_| Complex64::from_polar(scale * rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0 * PI)))
        .collect()
}

/// Five `z` points in a radius-0.5 ball (the first is the origin) and five
/// `t` points with `|t| ≤ 2`.
fn grids(rng: &mut ChaCha8Rng, n: usize) -> (Vec<Vec<Complex64>>, Vec<Complex64>) {
    let mut zs = vec![vec![c(0.0, 0.0); n]];
    zs.extend((0..4).map(|_| random_point(rng, n, 0.5)));
    let ts = vec![c(0.3, 0.0), c(0.0, 0.9), c(-1.2, 0.5), c(1.0, -1.0), c(2.0, 0.0)];
    (zs, ts)
}

fn criterion_1() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for n in 1..=3usize {
        let p = DiffOp::laplacian(n);
        for (measure, m) in [
            (MeasureSpec::ball(n), MomentFn::pizzetti_ball(n as u32)),
            (MeasureSpec::sphere(n), MomentFn::pizzetti_sphere(n as u32)),
        ] {
            let mut local = 0.0f64;
            for _ in 0..20 {
                let phi = random_poly(&mut rng, n, 8, 6);
                let (zs, ts) = grids(&mut rng, n);
                local = local.max(pizzetti_residual(&measure, &p, &m, &phi, &zs, &ts, 4)?);
            }
            worst = worst.max(local);
            rows.push(json!({"n": n, "measure": measure, "residual": local}));
        }
    }
    Ok(Outcome {
        pass: worst <= 1e-10,
        detail: format!("max residual {worst:.2e} (≤ 1e-10), 120 polynomials"),
        report: json!({"cases": rows, "max_residual": worst}),
    })
}

fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> SquareMatrix {
    let b: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| b[i][k] * b[j][k]).sum::<f64>() + if i == j { 0.5 } else { 0.0 })
                .collect()
        })
        .collect();
    SquareMatrix::from_real(&rows).expect("square")
}

fn criterion_2() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for n in [2usize, 3] {
        for _ in 0..5 {
            let a = random_spd(&mut rng, n);
            let p = DiffOp::second_order(&a)?;
            for (base, m) in [
                (BaseKind::Ball, MomentFn::pizzetti_ball(n as u32)),
                (BaseKind::Sphere, MomentFn::pizzetti_sphere(n as u32)),
            ] {
                let measure = MeasureSpec::elliptic(&a, base)?;
                let phi = random_poly(&mut rng, n, 6, 6);
                let (zs, ts) = grids(&mut rng, n);
                let r = pizzetti_residual(&measure, &p, &m, &phi, &zs, &ts, 3)?;
                worst = worst.max(r);
                rows.push(json!({"n": n, "a": a, "base": base, "residual": r}));
            }
        }
    }
    Ok(Outcome {
        pass: worst <= 1e-10,
        detail: format!("max residual {worst:.2e} (≤ 1e-10), 10 SPD matrices × ball/sphere"),
        report: json!({"cases": rows, "max_residual": worst}),
    })
}

fn criterion_3() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut worst = 0.0f64;
    for n in [2usize, 3] {
        let p = DiffOp::wave(n);
        let measure = MeasureSpec::wave(n, BaseKind::Ball);
        let m = MomentFn::pizzetti_ball(n as u32);
        for _ in 0..10 {
            let phi = random_poly(&mut rng, n, 6, 6);
            let (zs, ts) = grids(&mut rng, n);
            worst = worst.max(pizzetti_residual(&measure, &p, &m, &phi, &zs, &ts, 3)?);
        }
    }
    let harmonic = MultiPoly::from_real_terms(2, &[(&[2, 0], 1.0), (&[0, 2], 1.0)]);
    let (zs, ts) = grids(&mut rng, 2);
    let mvp = mean_value_check(&DiffOp::wave(2), &harmonic, &MeasureSpec::wave(2, BaseKind::Ball), &zs, &ts)?;
    Ok(Outcome {
        pass: worst <= 1e-10 && mvp,
        detail: format!("max residual {worst:.2e} (≤ 1e-10); mean-value property for z1²+z2²: {mvp}"),
        report: json!({"max_residual": worst, "mean_value_property": mvp}),
    })
}

fn criterion_4() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut worst = 0.0f64;
    for s in [2u32, 3] {
        for n in [1usize, 2, 3] {
            let q = DiffOp::laplacian(n);
            for (measure, m) in [
                (MeasureSpec::ball(n), MomentFn::pizzetti_ball(n as u32)),
                (MeasureSpec::sphere(n), MomentFn::pizzetti_sphere(n as u32)),
            ] {
                for _ in 0..3 {
                    let phi = random_poly(&mut rng, n, 8, 5);
                    let (zs, ts) = grids(&mut rng, n);
                    for z in &zs {
                        for &t in &ts {
                            let mean = rot_avg_mean(|tau| mean_exact_poly(&measure, &phi, z, tau), s, 2, t)?;
                            let series = rot_avg_series(&q, &phi, &m, s, z, t, 4)?;
                            worst = worst.max((mean - series).norm());
                        }
                    }
                }
            }
        }
    }
    let phi = MultiPoly::from_real_terms(2, &[(&[4, 0], 1.0), (&[2, 2], 2.0), (&[0, 4], 1.0)]);
    let origin = [c(0.0, 0.0); 2];
    let mut example = 0.0f64;
    for t in [c(0.5, 0.0), c(1.0, 0.0), c(0.3, 0.7), c(-1.5, 0.2)] {
        let v = rot_avg_mean(|tau| mean_exact_poly(&MeasureSpec::ball(2), &phi, &origin, tau), 2, 2, t)?;
        example = example.max((v - t.powu(4) / 3.0).norm());
    }
    Ok(Outcome {
        pass: worst <= 1e-10 && example <= 1e-12,
        detail: format!("series residual {worst:.2e} (≤ 1e-10); (z1²+z2²)² vs t⁴/3: {example:.2e} (≤ 1e-12)"),
        report: json!({"max_residual": worst, "example_error": example}),
    })
}

fn heat_inputs() -> (DiffOp, RationalFn, MeasureSpec, MomentFn) {
    (
        DiffOp::laplacian(1),
        RationalFn::geometric(1, 0),
        MeasureSpec::sphere(1),
        MomentFn::pizzetti_sphere(1),
    )
}

fn criterion_5() -> Result<Outcome> {
    let (p, phi, mu, m) = heat_inputs();
    let mut cfg = SummabilityConfig::default();
    cfg.sector.r_max = 50.0;
    cfg.z_points = 5;
    let mut pass = true;
    let mut labels = Vec::new();
    let mut verdicts = Vec::new();
    for (d, expected) in [(PI / 2.0, true), (PI, true), (1.5 * PI, true), (0.0, false)] {
        let v = summability_verdict(&p, &phi, &mu, &m, d, &cfg)?;
        pass &= v.summable == expected;
        labels.push(format!("d={d:.3}: {}", if v.summable { "summable" } else { "not summable" }));
        verdicts.push(v);
    }
    Ok(Outcome {
        pass,
        detail: labels.join(", "),
        report: serde_json::to_value(&verdicts).expect("serialisable"),
    })
}

fn criterion_6() -> Result<Outcome> {
    let cfg = SummabilityConfig::default();
    let mut inv_fact = 1.0;
    let terms: Vec<(Vec<u32>, Complex64)> = (0..=40u32)
        .map(|k| {
            if k > 0 {
                inv_fact /= k as f64;
            }
            (vec![k], c(inv_fact, 0.0))
        })
        .collect();
    let exp40 = RationalFn::from_poly(MultiPoly::from_terms(1, terms)?);
    let (p, _, mu, m) = heat_inputs();
    let v = convergence_verdict(&p, &exp40, &mu, &m, &cfg)?;
    let poly = RationalFn::from_poly(MultiPoly::from_real_terms(2, &[(&[2, 2], 1.0), (&[1, 0], -3.0), (&[0, 0], 2.0)]));
    let w = convergence_verdict(&DiffOp::laplacian(2), &poly, &MeasureSpec::ball(2), &MomentFn::pizzetti_ball(2), &cfg)?;
    Ok(Outcome {
        pass: v.convergent && v.k_hat <= 1.2 && w.convergent,
        detail: format!(
            "truncated exp: convergent={} k_hat={:.3} (≤ 1.2); polynomial: convergent={}",
            v.convergent, v.k_hat, w.convergent
        ),
        report: json!({"truncated_exp": v, "polynomial": w}),
    })
}

fn criterion_7() -> Result<Outcome> {
    let r_grid: Vec<f64> = (5..=40).map(f64::from).collect();
    let xi = |k: u32| DiffOp::new(MultiPoly::from_real_terms(1, &[(&[k], 1.0)]));
    let stride = |k: u32| moment_subsequence(MomentFn::gamma_s(1.0), k);
    let cubic = diagonal_growth(&xi(3)?, &stride(3)?, &r_grid)?;
    let cubic_ok = cubic.exponential && (0.9..=1.1).contains(&cubic.ray.b_hat) && cubic.ray.residual < 0.05;

    let (p2, m2) = (xi(2)?, stride(2)?);
    let mut grid = Vec::new();
    for a in -20..=20 {
        for b in -20..=20 {
            let z = c(a as f64 * 0.5, b as f64 * 0.5);
            if z.norm() <= 10.0 {
                grid.push(vec![z]);
            }
        }
    }
    let mut cos_err = 0.0f64;
    for z in &grid {
        let f = symbol_eval(&p2, &m2, z, 100_000, 1e-14)?;
        cos_err = cos_err.max((f - z[0].cos()).norm());
    }
    let pws = pws_check(|z| symbol_eval(&p2, &m2, z, 100_000, 1e-14), &grid, 2.0, 0, 1.0)?;

    let q = DiffOp::quasi_homogeneous(MultiPoly::from_real_terms(2, &[(&[1, 1], 1.0)]), vec![2, 1])?;
    let quasi = quasi_diagonal_growth(&q, &MomentFn::gamma_s(3.0), &r_grid)?;
    Ok(Outcome {
        pass: cubic_ok && cos_err <= 1e-10 && pws.holds && quasi.exponential,
        detail: format!(
            "ξ³: b_hat={:.4} residual={:.1e}; cos max error {cos_err:.1e}; PWS max ratio {:.3}; quasi exponential={}",
            cubic.ray.b_hat, cubic.ray.residual, pws.max_ratio, quasi.exponential
        ),
        report: json!({"cubic": cubic, "cos_error": cos_err, "pws": pws, "quasi": quasi}),
    })
}

fn criterion_8() -> Result<Outcome> {
    let g = MomentFn::gamma_s;
    let product = moment_order_bounds(&moment_product(g(1.0), g(1.0)), 2.0, 30)?;
    let quotient = moment_order_bounds(&moment_quotient(g(2.0), g(1.0))?, 1.0, 30)?;
    let mismatch = moment_order_bounds(&g(3.0), 2.0, 30)?;
    let bounds_ok = product.is_bounded() && quotient.is_bounded() && !mismatch.is_bounded();

    let stride2 = moment_subsequence(g(1.0), 2)?;
    let relation = check_generalised_moment(&MomentFn::pizzetti_sphere(3), &stride2, &[1], &[1, 2], 1.0, 20)?;

    let grid = [0.5, 1.0, 2.0];
    let cfg = KernelQuadConfig::default();
    let mut kernel_err = 0.0f64;
    for a in grid {
        for b in grid {
            for k in grid {
                let e = KernelFn::new(a, b, k)?;
                for u in [0.0, 0.5, 1.0, 2.0, 5.0] {
                    let exact = a * gamma(b + u / k);
                    let est = kernel_moment_integral(&e, u, &cfg)?;
                    kernel_err = kernel_err.max((est.value - exact).abs() / exact);
                }
            }
        }
    }

    let mut ml_err = 0.0f64;
    for i in 0..=100 {
        let x = -5.0 + 0.1 * i as f64;
        let v = mittag_leffler(1.0, c(x, 0.0), 1e-16)?;
        ml_err = ml_err.max((v.re - x.exp()).abs() / x.exp());
    }
    Ok(Outcome {
        pass: bounds_ok && relation.holds && kernel_err <= 1e-8 && ml_err <= 1e-10,
        detail: format!(
            "order bounds {bounds_ok}; m_S(3) relation deviation {:.1e}; kernel {kernel_err:.1e} (≤ 1e-8); Mittag-Leffler {ml_err:.1e} (≤ 1e-10)",
            relation.max_rel_deviation
        ),
        report: json!({
            "product": product, "quotient": quotient, "mismatch": mismatch,
            "relation": relation, "kernel_error": kernel_err, "mittag_leffler_error": ml_err,
        }),
    })
}

fn criterion_9() -> Result<Outcome> {
    let mut pass = true;
    let mut rows = Vec::new();
    let mut detail = Vec::new();
    for p in [2u32, 3] {
        let op = DiffOp::new(MultiPoly::from_real_terms(1, &[(&[p], 1.0)]))?;
        let series = formal_solution_rational(&op, &RationalFn::geometric(1, 0), 40)?;
        let at0 = specialise(&series, &[c(0.0, 0.0)])?;
        let est = gevrey_estimate(&at0, 2, 40)?;
        let ok = (est.s_hat - (p as f64 - 1.0)).abs() <= 0.15;
        pass &= ok;
        detail.push(format!("p={p}: s_hat={:.4}", est.s_hat));
        rows.push(json!({"p": p, "estimate": est}));
    }
    Ok(Outcome {
        pass,
        detail: detail.join(", ") + " (target p−1 ± 0.15)",
        report: json!(rows),
    })
}

type Criterion = fn() -> Result<Outcome>;

const CRITERIA: [(&str, f64, Criterion); 9] = [
    ("Pizzetti identities, ball and sphere", 10.0, criterion_1),
    ("elliptic reduction", 10.0, criterion_2),
    ("wave means", 5.0, criterion_3),
    ("rotation-averaged means", 5.0, criterion_4),
    ("heat summability benchmark", 20.0, criterion_5),
    ("convergence benchmark", 20.0, criterion_6),
    ("impossibility demo for p > 2", 10.0, criterion_7),
    ("moment algebra", 5.0, criterion_8),
    ("Gevrey estimation", 5.0, criterion_9),
];

fn main() {
    let mut failures = 0;
    let mut first_reports = Vec::new();
    for (i, (name, budget, run)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (pass, detail, report) = match outcome {
            Ok(o) => (o.pass && secs < *budget, o.detail, Some(o.report)),
            Err(e) => (false, format!("error: {e}"), None),
        };
        failures += usize::from(!pass);
        println!(
            "[{}] criterion {:>2}: {name} ({secs:.2} s, budget {budget} s): {detail}",
            if pass { "PASS" } else { "FAIL" },
            i + 1
        );
        first_reports.push(report.map(|r| serde_json::to_string(&r).expect("serialisable")));
    }

    let start = Instant::now();
    let mut differing = Vec::new();
    for (i, (_, _, run)) in CRITERIA.iter().enumerate() {
        let again = run().ok().map(|o| serde_json::to_string(&o.report).expect("serialisable"));
        if again.is_none() || again != first_reports[i] {
            differing.push(i + 1);
        }
    }
    let pass = differing.is_empty();
    failures += usize::from(!pass);
    println!(
        "[{}] criterion 10: determinism ({:.2} s): {}",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64(),
        if pass {
            "criteria 1-9 reproduce byte-identical reports".to_string()
        } else {
            format!("reports differ for criteria {differing:?}")
        }
    );

    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}
