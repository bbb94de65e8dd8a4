//! One function per experiment kind. Each returns scalars, tables and the
//! outcome of every assertion it knows how to evaluate.

use std::f64::consts::PI;
use std::sync::Arc;

use anyhow::Result;
use linresp::examples::{
    affine_contraction_ratio, affine_holder_experiment, affine_map, affine_second_derivative_check,
    composition_map, composition_second_derivative_check, constraint_suite, series_oracle,
    AffineForcing, AffineMapConfig, CompositionMapConfig, SecondDerivativeReport,
};
use linresp::fit::fit_linear;
use linresp::fixed_point::{
    implicit_derivative, solve_fixed_point, sup_norm, taylor_residual_scan, ParametrizedMap,
    SolveOptions, TaylorResidualReport,
};
use linresp::function_spaces::{cr_value, nodes, GridFunction};
use linresp::transfer::{
    decay_sequence, eigenfunction_fd, holder_scan_operator, lambda_derivative,
    lambda_derivative_fd, linear_response, pressure_s_derivative, Profile, TransferProblem,
    TrigMapFamily, TrigSeries, Weight, WeightBase,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, Kind, MapSpec, TaylorTarget, WeightKind};
use crate::emit::{Cell, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub scalars: Vec<(String, f64)>,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
}

impl Outcome {
    fn scalar(&mut self, name: &str, v: f64) {
        self.scalars.push((name.to_string(), v));
    }

    fn check(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(Check {
            name,
            passed,
            detail,
        });
    }
}

pub const DEFAULT_DELTAS: [f64; 9] = [
    0.0625,
    0.03125,
    0.015625,
    0.0078125,
    0.00390625,
    0.001953125,
    0.0009765625,
    0.00048828125,
    0.000244140625,
];

pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.kind {
        Kind::Solve => solve(cfg),
        Kind::Spectrum => spectrum(cfg),
        Kind::Response => response(cfg),
        Kind::HoelderScan => hoelder_scan(cfg),
        Kind::TaylorCheck => taylor_check(cfg),
        Kind::PressureCheck => pressure_check(cfg),
        Kind::ExampleComposition => example_composition(cfg),
        Kind::ExampleAffine => example_affine(cfg),
    }
}

pub fn problem(cfg: &ExperimentConfig) -> Result<TransferProblem> {
    let map = match &cfg.map {
        MapSpec::PerturbedDoubling => TrigMapFamily::perturbed_doubling(),
        MapSpec::Linear { degree, params } => TrigMapFamily::new(
            *degree,
            TrigSeries::default(),
            vec![(Profile::Linear, TrigSeries::default()); *params],
        )?,
        MapSpec::Kink {
            exponent,
            amplitude,
        } => TrigMapFamily::new(
            2,
            TrigSeries::default(),
            vec![(
                Profile::Power(*exponent),
                TrigSeries::new(0.0, Vec::new(), vec![amplitude / (2.0 * PI)]),
            )],
        )?,
    };
    let w = &cfg.weight;
    let weight = match w.kind {
        WeightKind::Geometric => Weight::geometric(),
        WeightKind::Constant => Weight::constant(w.value.unwrap_or_default()),
        WeightKind::Trig => Weight::from_base(WeightBase::Trig(TrigSeries::new(
            w.a0.unwrap_or_default(),
            w.cos.clone(),
            w.sin.clone(),
        ))),
    }
    .with_log_scale(w.log_scale.clone());
    let mut p = TransferProblem::new(Arc::new(map), weight, cfg.resolution)?;
    p.tol = cfg.tolerances.power;
    Ok(p)
}

pub fn base_point(cfg: &ExperimentConfig, dim: usize) -> Vec<f64> {
    cfg.params.u0.clone().unwrap_or_else(|| vec![0.0; dim])
}

fn direction(cfg: &ExperimentConfig, dim: usize) -> Vec<f64> {
    cfg.params.h.clone().unwrap_or_else(|| vec![1.0; dim])
}

fn deltas(cfg: &ExperimentConfig) -> Vec<f64> {
    cfg.params
        .deltas
        .clone()
        .unwrap_or_else(|| DEFAULT_DELTAS.to_vec())
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Seeded trigonometric polynomial of degree 3 with coefficients in [−1, 1].
fn random_trig(n: usize, rng: &mut ChaCha8Rng) -> Result<GridFunction> {
    let a0: f64 = rng.gen_range(-1.0..1.0);
    let c: Vec<(f64, f64)> = (0..3)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Ok(GridFunction::from_fn(n, |x| {
        a0 + c
            .iter()
            .enumerate()
            .map(|(k, (a, b))| {
                let w = 2.0 * PI * (k + 1) as f64 * x;
                a * w.cos() + b * w.sin()
            })
            .sum::<f64>()
    })?)
}

fn solve(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = problem(cfg)?;
    let u0 = base_point(cfg, p.param_dim());
    let data = p.reference_data(&u0)?;
    let nm = p.normalized_map(data.ell.clone())?;
    let res = solve_fixed_point(&nm, &u0, &vec![1.0; p.n], cfg.tolerances.solve, 10_000)?;
    let gap = sup_norm(&diff(&res.phi_star, data.phi.samples()));

    let mut out = Outcome::default();
    out.scalar("iterations", res.iterations as f64);
    out.scalar("residual", res.residual);
    out.scalar("contraction_estimate", res.contraction_estimate);
    out.scalar("power_gap", gap);
    let mut t = Table::new("fixed-point", &["node", "phi_solver", "phi_power"]).with_plot(
        0,
        &[1, 2],
        false,
    );
    for (i, x) in nodes(p.n).into_iter().enumerate() {
        t.push(vec![
            x.into(),
            res.phi_star[i].into(),
            data.phi.samples()[i].into(),
        ]);
    }
    out.tables.push(t);
    out.check(
        "converged",
        res.residual <= cfg.tolerances.solve,
        format!(
            "residual {:.3e} after {} iterations",
            res.residual, res.iterations
        ),
    );
    out.check(
        "power-agreement",
        gap < cfg.tolerances.analytic,
        format!("sup gap {gap:.3e}"),
    );
    Ok(out)
}

fn spectrum(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = problem(cfg)?;
    let u0 = base_point(cfg, p.param_dim());
    let data = p.reference_data(&u0)?;
    let tol = cfg.tolerances.analytic;
    let mut out = Outcome::default();
    out.scalar("lambda", data.lambda);
    out.scalar("sigma_estimate", data.sigma_estimate);
    out.scalar("iterations", data.iterations as f64);

    let mut eig = Table::new("eigendata", &["node", "phi", "ell_weight"]).with_plot(0, &[1], false);
    for (i, x) in nodes(p.n).into_iter().enumerate() {
        eig.push(vec![
            x.into(),
            data.phi.samples()[i].into(),
            data.ell.weights()[i].into(),
        ]);
    }
    out.tables.push(eig);

    let steps = cfg.params.steps.unwrap_or(30);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let test = random_trig(p.n, &mut rng)?;
    let seq = decay_sequence(&data, test.samples(), steps, sup_norm)?;
    let mut decay = Table::new("decay", &["n", "norm"]).with_plot(0, &[1], false);
    for (i, v) in seq.iter().enumerate() {
        decay.push(vec![(i + 1).into(), (*v).into()]);
    }
    out.tables.push(decay);
    if seq.iter().all(|v| *v > 0.0) {
        let ns: Vec<f64> = (1..=steps).map(|n| n as f64).collect();
        let logs: Vec<f64> = seq.iter().map(|v| v.ln()).collect();
        let fit = fit_linear(&ns, &logs)?;
        let sigma = fit.slope.exp();
        out.scalar("sigma_fit", sigma);
        out.scalar("sigma_r_squared", fit.r_squared);
        out.check(
            "decay",
            sigma < 0.9 && fit.r_squared > 0.99,
            format!("sigma {sigma:.4}, R^2 {:.6}", fit.r_squared),
        );
    } else {
        out.check("decay", false, "decay sequence reaches exact zero".into());
    }

    let phi_dev = data
        .phi
        .samples()
        .iter()
        .map(|v| (v - 1.0).abs())
        .fold(0.0, f64::max);
    let leb = 1.0 / p.n as f64;
    let ell_dev = data
        .ell
        .weights()
        .iter()
        .map(|w| (w - leb).abs())
        .fold(0.0, f64::max);
    out.scalar("phi_deviation_from_one", phi_dev);
    out.scalar("ell_deviation_from_lebesgue", ell_dev);
    out.check(
        "analytic",
        (data.lambda - 1.0).abs() < tol && phi_dev < tol && ell_dev < tol,
        format!(
            "|lambda-1| {:.3e}, |phi-1| {phi_dev:.3e}, |ell-Leb| {ell_dev:.3e}",
            (data.lambda - 1.0).abs()
        ),
    );
    match cfg.params.expected_lambda {
        Some(e) => out.check(
            "lambda",
            (data.lambda - e).abs() < tol,
            format!("lambda {:.15} vs {e}", data.lambda),
        ),
        None => out.check("lambda", false, "params.expected-lambda not set".into()),
    }
    let min_phi = data
        .phi
        .samples()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let min_ell = data
        .ell
        .weights()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    out.check(
        "positivity",
        min_phi > 0.0 && min_ell >= -1e-12,
        format!("min phi {min_phi:.3e}, min ell {min_ell:.3e}"),
    );
    Ok(out)
}

fn response(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = problem(cfg)?;
    let dim = p.param_dim();
    let u0 = base_point(cfg, dim);
    let h = direction(cfg, dim);
    let step = cfg.params.fd_step.unwrap_or(1e-4);
    let tol = &cfg.tolerances;
    let r = linear_response(&p, &u0, &h)?;
    let fd = eigenfunction_fd(&p, &r.data, &u0, &h, step)?;
    let resp = r.response.samples();
    let gap = diff(resp, &fd);
    let (abs_err, fd_norm) = (sup_norm(&gap), sup_norm(&fd));
    let rel_err = if fd_norm > 0.0 {
        abs_err / fd_norm
    } else {
        abs_err
    };

    let nm = p.normalized_map(r.data.ell.clone())?;
    let phi0 = r.data.phi.samples();
    let z = implicit_derivative(&nm.p_operator(&u0, phi0)?, &nm.q_operator(&u0, phi0)?, &h)?;
    let route_gap = sup_norm(&diff(&z, resp));

    let dl = lambda_derivative(&p, &u0, &h)?;
    let dl_fd = lambda_derivative_fd(&p, &u0, &h, step)?;
    let dl_rel = (dl - dl_fd).abs() / dl_fd.abs().max(f64::MIN_POSITIVE);

    let mut out = Outcome::default();
    out.scalar("lambda", r.data.lambda);
    out.scalar("response_sup", sup_norm(resp));
    out.scalar("fd_sup", fd_norm);
    out.scalar("max_abs_diff", abs_err);
    out.scalar("relative_error", rel_err);
    out.scalar("route_gap", route_gap);
    out.scalar("lambda_derivative", dl);
    out.scalar("lambda_derivative_fd", dl_fd);
    out.scalar("lambda_derivative_relative_error", dl_rel);
    out.scalar("min_singular_value", r.solve.min_singular_value);

    let mut t = Table::new("response", &["node", "response", "fd", "abs_diff"]).with_plot(
        0,
        &[1, 2],
        false,
    );
    for (i, x) in nodes(p.n).into_iter().enumerate() {
        t.push(vec![
            x.into(),
            resp[i].into(),
            fd[i].into(),
            gap[i].abs().into(),
        ]);
    }
    out.tables.push(t);

    // a vanishing difference quotient is compared absolutely
    let fd_ok = if fd_norm > tol.analytic {
        rel_err < tol.response
    } else {
        abs_err < tol.analytic
    };
    out.check(
        "fd-agreement",
        fd_ok,
        format!("max diff {abs_err:.3e}, ||fd|| {fd_norm:.3e}, relative {rel_err:.3e}"),
    );
    out.check(
        "route-equivalence",
        route_gap < tol.route,
        format!("node-wise gap {route_gap:.3e}"),
    );
    out.check(
        "lambda-derivative",
        dl_rel < tol.lambda || (dl - dl_fd).abs() < tol.analytic,
        format!("engine {dl:.12e}, fd {dl_fd:.12e}, relative {dl_rel:.3e}"),
    );
    match cfg.params.expected_lambda_derivative {
        Some(e) => out.check(
            "lambda-expected",
            (dl - e).abs() < tol.analytic,
            format!("engine {dl:.15} vs {e}"),
        ),
        None => out.check(
            "lambda-expected",
            false,
            "params.expected-lambda-derivative not set".into(),
        ),
    }
    Ok(out)
}

fn hoelder_scan(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = problem(cfg)?;
    let dim = p.param_dim();
    let u0 = base_point(cfg, dim);
    let dirs: Vec<Vec<f64>> = match &cfg.params.h {
        Some(h) => vec![h.clone()],
        None => (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect(),
    };
    let (alpha, beta) = (
        cfg.params.alpha.unwrap_or(0.9),
        cfg.params.beta.unwrap_or(0.1),
    );
    let rep = holder_scan_operator(&p, &u0, &dirs, &deltas(cfg), alpha, beta)?;
    let mut out = Outcome::default();
    out.scalar("gamma", rep.gamma);
    out.scalar("min_slope", rep.min_slope());
    let mut t = Table::new(
        "scan",
        &[
            "direction",
            "delta",
            "operator_difference",
            "eigenfunction_difference",
        ],
    )
    .with_plot(1, &[2, 3], true);
    for r in &rep.rows {
        t.push(vec![
            r.direction.into(),
            r.delta.into(),
            r.operator_difference.into(),
            r.eigenfunction_difference.into(),
        ]);
    }
    out.tables.push(t);
    let mut fits = Table::new(
        "fits",
        &["direction", "operator_slope", "eigenfunction_slope"],
    );
    for (i, (a, b)) in rep
        .operator_fits
        .iter()
        .zip(&rep.eigenfunction_fits)
        .enumerate()
    {
        fits.push(vec![i.into(), a.slope().into(), b.slope().into()]);
    }
    out.tables.push(fits);
    let slack = cfg.tolerances.slack;
    out.check(
        "exponent",
        rep.passes(slack),
        format!(
            "min slope {:.4} vs gamma {:.4} - {slack}",
            rep.min_slope(),
            rep.gamma
        ),
    );
    match cfg.params.expected_exponent {
        Some(e) => {
            let slopes: Vec<f64> = rep
                .operator_fits
                .iter()
                .chain(&rep.eigenfunction_fits)
                .map(|f| f.slope())
                .collect();
            let worst = slopes.iter().map(|s| (s - e).abs()).fold(0.0, f64::max);
            out.check(
                "forced-exponent",
                worst < slack,
                format!("slopes {slopes:.4?} vs {e}"),
            );
        }
        None => out.check(
            "forced-exponent",
            false,
            "params.expected-exponent not set".into(),
        ),
    }
    Ok(out)
}

fn taylor_table(rep: &TaylorResidualReport) -> Table {
    let mut t = Table::new(
        "taylor",
        &[
            "delta",
            "h_norm",
            "z_norm",
            "residual_norm",
            "normalized_residual",
        ],
    )
    .with_plot(1, &[3], true);
    for r in &rep.rows {
        t.push(vec![
            r.delta.into(),
            r.h_norm.into(),
            r.z_norm.into(),
            r.residual_norm.into(),
            r.normalized_residual.into(),
        ]);
    }
    t
}

fn taylor_check(cfg: &ExperimentConfig) -> Result<Outcome> {
    let opts = SolveOptions {
        tol: 1e-14,
        max_iter: 10_000,
    };
    let ds = deltas(cfg);
    let (rep, default_order) = match cfg.params.target.unwrap_or_default() {
        TaylorTarget::Transfer => {
            let p = problem(cfg)?;
            let dim = p.param_dim();
            let u0 = base_point(cfg, dim);
            let h = direction(cfg, dim);
            let (alpha, beta) = (
                cfg.params.alpha.unwrap_or(0.9),
                cfg.params.beta.unwrap_or(0.3),
            );
            let data = p.reference_data(&u0)?;
            let nm = p.normalized_map(data.ell.clone())?;
            let phi = data.phi.samples();
            let budget = 4 * p.n;
            let coarse = move |v: &[f64]| {
                GridFunction::new(v.to_vec())
                    .and_then(|f| cr_value(&f, beta, budget))
                    .unwrap_or(f64::NAN)
            };
            let rep = taylor_residual_scan(
                &nm,
                &u0,
                phi,
                &nm.p_operator(&u0, phi)?,
                &nm.q_operator(&u0, phi)?,
                &h,
                &ds,
                &coarse,
                opts,
            )?;
            (rep, 1.0 + (alpha - beta) - 0.15)
        }
        TaylorTarget::Composition => {
            let map = composition_map(composition_config(cfg))?;
            let u0 = map.sample(|t| 0.05 * t.cos());
            let h = map.sample(|t| 0.5 * t);
            let phi0 = solve_fixed_point(&map, &u0, &vec![0.0; u0.len()], opts.tol, opts.max_iter)?
                .phi_star;
            let rep = taylor_residual_scan(
                &map,
                &u0,
                &phi0,
                &map.p_operator(&u0, &phi0)?,
                &map.q_operator(&u0, &phi0)?,
                &h,
                &ds,
                &sup_norm,
                opts,
            )?;
            (rep, 1.9)
        }
    };
    let min_order = cfg.params.min_order.unwrap_or(default_order);
    let mut out = Outcome::default();
    out.scalar("fitted_order", rep.fitted_order.unwrap_or(f64::INFINITY));
    out.scalar(
        "fitted_order_z",
        rep.fitted_order_z.unwrap_or(f64::INFINITY),
    );
    out.scalar("min_order", min_order);
    out.tables.push(taylor_table(&rep));
    // an identically vanishing remainder is an exact development
    let order = rep.fitted_order.unwrap_or(f64::INFINITY);
    out.check(
        "order",
        order >= min_order,
        format!("fitted order {order:.4} vs {min_order:.4}"),
    );
    Ok(out)
}

fn pressure_check(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = problem(cfg)?;
    let u0 = base_point(cfg, p.param_dim());
    let count = cfg.params.observables.unwrap_or(5);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut t = Table::new(
        "pressure",
        &["observable", "derivative", "measure", "relative_error"],
    );
    let mut worst: f64 = 0.0;
    for i in 0..count {
        let a = random_trig(p.n, &mut rng)?;
        let c = pressure_s_derivative(&p, &u0, &a)?;
        worst = worst.max(c.relative_error);
        t.push(vec![
            i.into(),
            c.derivative.into(),
            c.measure.into(),
            c.relative_error.into(),
        ]);
    }
    let mut out = Outcome::default();
    out.scalar("max_relative_error", worst);
    out.tables.push(t);
    out.check(
        "identity",
        count > 0 && worst < cfg.tolerances.pressure,
        format!("{count} observables, max relative error {worst:.3e}"),
    );
    Ok(out)
}

fn composition_config(cfg: &ExperimentConfig) -> CompositionMapConfig {
    let d = CompositionMapConfig::default();
    CompositionMapConfig {
        r: cfg.params.r.unwrap_or(d.r),
        r_prime: cfg.params.r_prime.unwrap_or(d.r_prime),
        m: cfg.params.m.unwrap_or(d.m),
    }
}

fn second_derivative_table(rep: &SecondDerivativeReport) -> Table {
    let mut t = Table::new(
        "second-derivative",
        &[
            "base",
            "direction",
            "engine_norm",
            "fd_norm",
            "abs_error",
            "relative_error",
        ],
    );
    for r in &rep.rows {
        t.push(vec![
            Cell::from(r.base.as_str()),
            Cell::from(r.direction.as_str()),
            r.engine_norm.into(),
            r.fd_norm.into(),
            r.abs_error.into(),
            r.relative_error.into(),
        ]);
    }
    t
}

fn example_composition(cfg: &ExperimentConfig) -> Result<Outcome> {
    let map = composition_map(composition_config(cfg))?;
    let mut out = Outcome::default();

    let zero = vec![0.0; map.state_dim()];
    let c = 0.1;
    let phi_c = solve_fixed_point(&map, &map.sample(|_| c), &zero, 1e-14, 10_000)?.phi_star;
    let phi_0 = solve_fixed_point(&map, &zero, &zero, 1e-14, 10_000)?.phi_star;
    let oracle_gap = phi_c
        .iter()
        .map(|v| (v - 2.0 * c).abs())
        .fold(sup_norm(&phi_0), f64::max);
    out.scalar("oracle_gap", oracle_gap);
    out.check(
        "fixed-point-oracles",
        oracle_gap < 1e-12,
        format!(
            "u = 0 -> 0 and u = {c} -> {}: max gap {oracle_gap:.3e}",
            2.0 * c
        ),
    );

    let count = cfg.params.samples.unwrap_or(100);
    let suite = constraint_suite(&map, count, cfg.seed)?;
    out.scalar("max_ball_norm", suite.max_ball_norm());
    out.scalar("max_contraction_ratio", suite.max_contraction_ratio());
    out.scalar("max_q_norm", suite.max_q_norm());
    let mut t = Table::new(
        "constraints",
        &["sample", "ball_norm", "contraction_ratio", "q_norm"],
    );
    for (i, s) in suite.samples.iter().enumerate() {
        t.push(vec![
            i.into(),
            s.ball_norm.into(),
            s.contraction_ratio.into(),
            s.q_norm.into(),
        ]);
    }
    out.tables.push(t);
    out.check(
        "constraints",
        suite.passes(),
        format!(
            "ball {:.4} <= {}, contraction {:.4} <= {} + 0.01, Q {:.4} <= {}",
            suite.max_ball_norm(),
            suite.radius,
            suite.max_contraction_ratio(),
            suite.contraction_bound,
            suite.max_q_norm(),
            suite.q_bound
        ),
    );

    let rep = composition_second_derivative_check(&map)?;
    out.scalar(
        "second_derivative_max_relative_error",
        rep.max_relative_error(),
    );
    out.tables.push(second_derivative_table(&rep));
    out.check(
        "second-derivative",
        rep.passes(1e-3, 1e-6),
        format!("max relative error {:.3e}", rep.max_relative_error()),
    );
    Ok(out)
}

fn example_affine(cfg: &ExperimentConfig) -> Result<Outcome> {
    let d = AffineMapConfig::default();
    let amplitude = cfg.params.amplitude.unwrap_or(0.2);
    let base = AffineMapConfig {
        forcing: AffineForcing::Lipschitz { amplitude },
        epsilon: cfg.params.epsilon.unwrap_or(d.epsilon),
        alpha: cfg.params.alpha.unwrap_or(d.alpha),
        m: cfg.params.m.unwrap_or(d.m),
    };
    let holder_cfg = AffineMapConfig {
        forcing: AffineForcing::Holder { amplitude },
        ..base
    };
    let mut out = Outcome::default();

    let mut oracle_gap: f64 = 0.0;
    for c in [base, holder_cfg] {
        let map = affine_map(c)?;
        for u in [-0.5 * c.epsilon, 0.0, 0.5 * c.epsilon] {
            let phi = solve_fixed_point(&map, &[u], &vec![0.0; c.m], 1e-15, 10_000)?.phi_star;
            for (t, v) in map.grid().nodes().iter().zip(&phi) {
                oracle_gap = oracle_gap.max((v - series_oracle(&c, *t, u)).abs());
            }
        }
    }
    out.scalar("series_oracle_gap", oracle_gap);
    out.check(
        "series-oracle",
        oracle_gap < 1e-14,
        format!("max gap {oracle_gap:.3e}"),
    );

    let map = affine_map(base)?;
    let ts = map.grid().nodes().to_vec();
    let mut worst: f64 = 0.0;
    for k in 1..=5 {
        let kf = k as f64;
        let phi: Vec<f64> = ts.iter().map(|t| (kf * t).sin() + 0.3 * t * t).collect();
        let psi: Vec<f64> = ts.iter().map(|t| 0.2 * (kf * t + 1.0).cos()).collect();
        let u = base.epsilon * (kf / 5.0 - 0.5);
        worst = worst.max(affine_contraction_ratio(&map, u, &phi, &psi)?);
    }
    let bound = 2f64.powf(-1.0 - base.alpha);
    out.scalar("contraction_ratio", worst);
    out.check(
        "contraction",
        worst <= bound + 0.01,
        format!("seminorm ratio {worst:.4} vs 2^(-1-alpha) = {bound:.4}"),
    );

    let ds: Vec<f64> = cfg
        .params
        .deltas
        .clone()
        .unwrap_or_else(|| (4..=14).map(|k| 2f64.powi(-k)).collect());
    let mut t = Table::new("holder", &["forcing", "delta", "distance"]);
    let holder = affine_holder_experiment(holder_cfg, &ds)?;
    let lip = affine_holder_experiment(base, &ds)?;
    for (name, e) in [("holder", &holder), ("lipschitz", &lip)] {
        for r in &e.rows {
            t.push(vec![name.into(), r.delta.into(), r.distance.into()]);
        }
    }
    out.tables.push(t);
    out.scalar("holder_slope", holder.slope());
    out.scalar("lipschitz_slope", lip.slope());
    let slack = cfg.tolerances.slack;
    out.check(
        "holder-slope",
        (holder.slope() - base.alpha).abs() < slack,
        format!(
            "slope {:.4} vs alpha {} +- {slack}",
            holder.slope(),
            base.alpha
        ),
    );
    out.check(
        "lipschitz-slope",
        lip.slope() >= 0.95,
        format!("slope {:.4} vs 0.95", lip.slope()),
    );

    let rep = affine_second_derivative_check(&map)?;
    out.scalar(
        "second_derivative_max_relative_error",
        rep.max_relative_error(),
    );
    out.tables.push(second_derivative_table(&rep));
    out.check(
        "second-derivative",
        rep.passes(1e-3, 1e-6),
        format!("max relative error {:.3e}", rep.max_relative_error()),
    );
    Ok(out)
}
