//! Dispatch from a resolved config to the module operations.

use crate::catalog::Kind;
use crate::config::ExperimentConfig;
use crate::output::OutputDir;
use crate::report::{Check, ExperimentOutcome, ExperimentReport, Table};
use crate::{numerical, CliError, Result};
use counterexamples as cx;
use dynamics::{attractor_sample, integrate, random_in_ball, SampleSpec, Trajectory};
use manifold::{
    build_manifold, cone_check, tracking_verify, BvpOptions, GridSpec, Interpolation, LpOptions, ManifoldGraph, MethodOptions,
};
use models::{saturated_rde_model, BlockRotation, HopfCycle, Model};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reduction::{box_counting_dim, injective_fraction, mane_experiment, median_exponent, PointCloud};
use serde_json::{json, Value};
use spectral_core::Spectrum;
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

/// What one experiment produced before anything is written.
struct Produced {
    checks: Vec<Check>,
    result: Value,
    tables: Vec<Table>,
    /// other files, `(name, bytes)`
    extra: Vec<(String, Vec<u8>)>,
}

fn num(x: f64) -> String {
    x.to_string()
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("module reports serialise")
}

fn linear_spectrum(m: usize) -> Result<Spectrum> {
    Spectrum::new((1..=m).map(|n| n as f64).collect(), "λ_n = n").map_err(numerical)
}

/// The cut-off cubic reaction-diffusion model.
pub fn rde_model(c: &ExperimentConfig) -> Result<Model> {
    saturated_rde_model(c.modes.unwrap(), c.kappa.unwrap(), c.cutoff.unwrap()).map_err(numerical)
}

/// Snapshots of the planar Hopf oscillator slaved into `modes` dimensions,
/// taken on its limit cycle `r = 1`.
pub fn hopf_cloud(modes: usize, points: usize, dt: f64, seed: u64) -> Result<Vec<Vec<f64>>> {
    let spec = linear_spectrum(modes)?;
    let f = HopfCycle::new(&spec, 1.0, 1.0, 0.5).map_err(numerical)?;
    let model = Model::new(spec, Arc::new(f)).map_err(numerical)?;
    let n_traj = points.clamp(1, 10);
    let keep = points.div_ceil(n_traj);
    let spec = SampleSpec { n_traj, burn_in: 20.0, keep, spacing: 0.3, dt, radius: 2.0 };
    let mut pts = attractor_sample(&model, &spec, seed).map_err(numerical)?;
    pts.truncate(points);
    Ok(pts)
}

fn graph_for(model: &Model, c: &ExperimentConfig, opts: MethodOptions) -> Result<ManifoldGraph> {
    let (n, p, e) = (c.cut.unwrap(), c.points.unwrap(), c.extent.unwrap());
    let grid = GridSpec::new(vec![-e; n], vec![e; n], vec![p; n]).map_err(numerical)?;
    let interp = if p >= 4 { Interpolation::Cubic } else { Interpolation::Multilinear };
    build_manifold(model, n, &grid, &opts, interp).map_err(numerical)
}

fn gap_find(c: &ExperimentConfig) -> Result<Produced> {
    let spec = match c.spectrum.as_deref().unwrap() {
        "torus2d" => models::spectrum_torus2d(c.lmax.unwrap()),
        "torus3d" => models::spectrum_torus3d(c.lmax.unwrap()),
        "interval" => models::spectrum_interval(c.modes.unwrap(), 1.0, 0.0),
        _ => models::spectrum_sphere2(c.modes.unwrap()),
    }
    .map_err(numerical)?;
    let l = c.l.unwrap();
    let gaps = gap_analysis::find_gaps(&spec, l, c.beta.unwrap(), c.count.unwrap()).map_err(numerical)?;
    let mut t = Table::new("gaps", &["n", "lambda_n", "lambda_n1", "gap", "ratio"]);
    for g in &gaps {
        t.push([g.n.to_string(), num(g.lambda_n), num(g.lambda_n1), num(g.gap), num(g.ratio)]);
    }
    let cuts: Vec<usize> = gaps.iter().map(|g| g.n).collect();
    Ok(Produced {
        checks: vec![Check::at_least("qualifying cuts", cuts.len() as f64, 1.0)],
        result: json!({ "eigenvalues": spec.len(), "max_level_gap": gap_analysis::max_level_gap(&spec), "cuts": cuts }),
        tables: vec![t],
        extra: vec![],
    })
}

fn shell_search(c: &ExperimentConfig) -> Result<Produced> {
    let (k, rho, nmax) = (c.k.unwrap(), c.rho.unwrap(), c.nmax.unwrap());
    let hits = gap_analysis::shell_search(k, rho, nmax);
    let mut t = Table::new("shells", &["n", "points"]);
    for &n in &hits {
        t.push([n.to_string(), gap_analysis::shell_points(n as f64 + 0.5, k).len().to_string()]);
    }
    Ok(Produced {
        checks: vec![Check::at_least("qualifying N", hits.len() as f64, 1.0)],
        result: json!({ "hits": hits }),
        tables: vec![t],
        extra: vec![],
    })
}

fn manifold_build(c: &ExperimentConfig) -> Result<Produced> {
    let model = rde_model(c)?;
    let n = c.cut.unwrap();
    let gap = gap_analysis::gap_condition(&model.spectrum, n, model.lipschitz()).map_err(numerical)?;
    let (dt, tol) = (c.dt.unwrap(), c.tol.unwrap());
    let lp = c.method.as_deref() == Some("lp");
    let opts = if lp {
        MethodOptions::Lp(LpOptions { dt, tol, ..LpOptions::default() })
    } else {
        MethodOptions::Bvp(BvpOptions { dt, tol, ..BvpOptions::default() })
    };
    let g = graph_for(&model, c, opts)?;
    let mut checks = vec![Check::at_least("gap ratio over L", gap.ratio, gap.l)];
    if lp {
        let worst = g.log.iter().filter_map(|p| p.max_ratio).fold(0.0, f64::max);
        checks.push(Check::at_most("contraction ratio", worst, gap.l / gap.theta + 0.05));
    }
    let last = g.log.iter().map(|p| p.last_diff).fold(0.0, f64::max);
    checks.push(Check::at_most("final iterate difference", last, tol));
    let mut head: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    head.extend((n + 1..=g.modes).map(|i| format!("phi{i}")));
    let head: Vec<&str> = head.iter().map(String::as_str).collect();
    let mut t = Table::new("graph", &head);
    for (x, v) in g.nodes().iter().zip(&g.values) {
        t.push(x.iter().chain(v).map(|a| num(*a)));
    }
    let js = g.to_json().map_err(numerical)?.into_bytes();
    Ok(Produced {
        checks,
        result: json!({
            "gap": gap,
            "lipschitz_est": g.lipschitz_est,
            "max_value_norm": g.max_value_norm(),
            "nodes": g.values.len(),
        }),
        tables: vec![t],
        extra: vec![("manifold.json".into(), js)],
    })
}

fn track_verify(c: &ExperimentConfig) -> Result<Produced> {
    let model = rde_model(c)?;
    let n = c.cut.unwrap();
    let g = graph_for(&model, c, MethodOptions::Lp(LpOptions::default()))?;
    let lam_n = model.spectrum.values()[n - 1];
    let reach = 0.7 * c.extent.unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed.unwrap());
    let mut t = Table::new("tracking", &["start", "x1", "kick", "rate", "quad_coeff", "r2"]);
    let (mut min_rate, mut max_quad) = (f64::INFINITY, 0.0f64);
    let mut rates = Vec::new();
    for i in 0..c.starts.unwrap() {
        let mut x = vec![0.0; n];
        x[0] = rng.random_range(-reach..=reach);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let kick = sign * c.kick.unwrap() * rng.random_range(0.5..=1.0);
        let mut u0 = g.lift(&x).map_err(numerical)?;
        u0[n] += kick;
        let r = tracking_verify(&model, &g, &u0, c.horizon.unwrap(), c.dt.unwrap(), 0.0).map_err(numerical)?;
        min_rate = min_rate.min(r.rate);
        max_quad = max_quad.max(r.quad_coeff.abs());
        rates.push(r.rate);
        t.push([i.to_string(), num(x[0]), num(kick), num(r.rate), num(r.quad_coeff), num(r.r2)]);
    }
    Ok(Produced {
        checks: vec![
            Check::at_least("smallest tracking rate", min_rate, 0.8 * lam_n),
            Check::at_most("largest |quadratic coefficient|", max_quad, 0.05),
        ],
        result: json!({ "lambda_n": lam_n, "rates": rates }),
        tables: vec![t],
        extra: vec![],
    })
}

fn run_pairs(model: &Model, starts: &[(Vec<f64>, Vec<f64>)], horizon: f64, dt: f64) -> Result<Vec<(Trajectory, Trajectory)>> {
    use rayon::prelude::*;
    starts
        .par_iter()
        .map(|(a, b)| Ok((integrate(model, a, horizon, dt)?, integrate(model, b, horizon, dt)?)))
        .collect::<std::result::Result<_, dynamics::DynamicsError>>()
        .map_err(numerical)
}

fn cone(c: &ExperimentConfig) -> Result<Produced> {
    let (n, m) = (c.cut.unwrap(), c.modes.unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed.unwrap());
    let ball = c.ball.unwrap();
    let count = c.starts.unwrap();
    let rde = c.model.as_deref() == Some("rde");
    let (model, starts) = if rde {
        let model = rde_model(c)?;
        let s: Vec<_> = (0..count).map(|_| (random_in_ball(&mut rng, m, ball), random_in_ball(&mut rng, m, ball))).collect();
        (model, s)
    } else {
        let spec = Spectrum::new((1..=m).map(|k| (k * k) as f64).collect(), "λ_k = k²").map_err(numerical)?;
        let f = BlockRotation::new(m, n, c.strength.unwrap()).map_err(numerical)?;
        let model = Model::new(spec, Arc::new(f)).map_err(numerical)?;
        // differences in the rotated (e_N, e_{N+1}) plane, started inside the cone
        let s: Vec<_> = (0..count)
            .map(|k| {
                let a = random_in_ball(&mut rng, m, ball);
                let phi = -std::f64::consts::FRAC_PI_4 + std::f64::consts::FRAC_PI_2 * k as f64 / (count.max(2) - 1) as f64;
                let mut b = a.clone();
                b[n - 1] += phi.cos();
                b[n] += phi.sin();
                (a, b)
            })
            .collect();
        (model, s)
    };
    let pairs = run_pairs(&model, &starts, c.horizon.unwrap(), c.dt.unwrap())?;
    let r = cone_check(&model, &pairs, n).map_err(numerical)?;
    let gap = gap_analysis::gap_condition(&model.spectrum, n, model.lipschitz()).map_err(numerical)?;
    let check = if rde {
        Check::at_most("violating pairs", r.violating_pairs as f64, 0.0)
    } else {
        Check::at_least("invariance violations detected", r.invariance_violations as f64, 1.0)
    };
    let mut t = Table::new("cone", &["pairs", "mu", "worst_slack", "inequality_violations", "invariance_violations"]);
    t.push([
        r.pairs.to_string(),
        num(r.mu),
        num(r.worst_slack),
        r.inequality_violations.to_string(),
        r.invariance_violations.to_string(),
    ]);
    Ok(Produced { checks: vec![check], result: json!({ "gap": gap, "cone": r }), tables: vec![t], extra: vec![] })
}

fn dimension(c: &ExperimentConfig) -> Result<Produced> {
    let p = c.points.unwrap();
    let cloud = match c.set.as_deref().unwrap() {
        "square" => reduction::square_cloud((p as f64).sqrt().round().max(2.0) as usize),
        "segment" => reduction::segment_cloud(p, 2),
        _ => PointCloud::new(hopf_cloud(c.modes.unwrap(), p, c.dt.unwrap(), c.seed.unwrap())?),
    }
    .map_err(numerical)?;
    let r = box_counting_dim(&cloud, c.lo.unwrap(), c.hi.unwrap(), c.radii.unwrap()).map_err(numerical)?;
    let mut t = Table::new("boxes", &["eps", "count"]);
    for (e, k) in &r.counts {
        t.push([num(*e), k.to_string()]);
    }
    Ok(Produced {
        checks: vec![Check::within("box-counting dimension", r.dim, c.expect.unwrap(), c.tol.unwrap())],
        result: json!({ "points": cloud.len(), "box": r }),
        tables: vec![t],
        extra: vec![],
    })
}

fn mane(c: &ExperimentConfig) -> Result<Produced> {
    let pts = hopf_cloud(c.modes.unwrap(), c.points.unwrap(), c.dt.unwrap(), c.seed.unwrap())?;
    let cloud = PointCloud::new(pts).map_err(numerical)?;
    let s0 = c.seed.unwrap();
    let seeds: Vec<u64> = (0..c.trials.unwrap() as u64).map(|i| s0.wrapping_add(i)).collect();
    let runs = mane_experiment(&cloud, c.rank.unwrap(), &seeds).map_err(numerical)?;
    let mut t = Table::new("projections", &["seed", "margin", "exponent", "constant", "r2"]);
    for r in &runs {
        t.push([r.seed.to_string(), num(r.margin), num(r.holder.exponent), num(r.holder.constant), num(r.holder.r2)]);
    }
    let frac = injective_fraction(&runs);
    let med = median_exponent(&runs);
    Ok(Produced {
        checks: vec![Check::at_least("injective fraction", frac, 0.95), Check::at_least("median Hölder exponent", med, 0.8)],
        result: json!({ "points": cloud.len(), "injective_fraction": frac, "median_exponent": med }),
        tables: vec![t],
        extra: vec![],
    })
}

fn counterexample(c: &ExperimentConfig) -> Result<Produced> {
    let spec = linear_spectrum(c.modes.unwrap())?;
    match c.which.as_deref().unwrap() {
        "floquet" => {
            let op = cx::build_periodic_operator(&spec, cx::OperatorParams::new(c.t.unwrap(), c.l.unwrap())).map_err(numerical)?;
            let rep = cx::poincare_map(&op, c.steps.unwrap()).map_err(numerical)?;
            let tol = c.tol.unwrap();
            let mut t = Table::new("multipliers", &["source", "target", "measured", "predicted", "rel_error", "residual"]);
            for k in &rep.checks {
                t.push([k.source.to_string(), k.target.to_string(), num(k.measured), num(k.predicted), num(k.rel_error), num(k.residual)]);
            }
            Ok(Produced {
                checks: vec![
                    Check::at_most("multiplier relative error", rep.max_rel_error, tol),
                    Check::at_most("off-target residual", rep.max_residual, tol),
                ],
                result: to_value(&rep),
                tables: vec![t],
                extra: vec![],
            })
        }
        "c1" => {
            let l = c.l.unwrap();
            let s = cx::c1_obstruction_spectra(&spec, l).map_err(numerical)?;
            let mut t = Table::new("eigenvalues", &["equilibrium", "re", "im"]);
            for (name, v) in [("minus", &s.minus), ("plus", &s.plus)] {
                for e in v {
                    t.push([name.to_string(), num(e.re), num(e.im)]);
                }
            }
            Ok(Produced {
                checks: vec![
                    Check::at_most("real eigenvalues at u-", s.minus_real as f64, 0.0),
                    Check::within("real eigenvalues at u+", s.plus_real as f64, 1.0, 0.0),
                    Check::within("unstable eigenvalue", s.unstable, l - spec.values()[0], 1e-12),
                ],
                result: to_value(&s),
                tables: vec![t],
                extra: vec![],
            })
        }
        _ => {
            let p = cx::SegmentsParams::standard(spec.len());
            let a = cx::segments_attractor(&spec, &p).map_err(numerical)?;
            let rel = a.endpoint_errors.iter().zip(&a.lengths).map(|(e, l)| e / l.max(1e-3)).fold(0.0, f64::max);
            let mut t = Table::new("segments", &["n", "phase", "length", "endpoint_error"]);
            for i in 0..a.lengths.len() {
                t.push([(i + 1).to_string(), num(a.phases[i]), num(a.lengths[i]), num(a.endpoint_errors[i])]);
            }
            let mut cl = Table::new("segments-cloud", &(1..=spec.len()).map(|i| format!("w{i}")).collect::<Vec<_>>().iter().map(String::as_str).collect::<Vec<_>>());
            for w in &a.cloud {
                cl.push(w.iter().map(|v| num(*v)));
            }
            Ok(Produced {
                checks: vec![Check::at_most("relative endpoint error", rel, c.tol.unwrap())],
                result: json!({ "phases": a.phases, "lengths": a.lengths, "endpoint_errors": a.endpoint_errors }),
                tables: vec![t, cl],
                extra: vec![],
            })
        }
    }
}

fn dispatch(kind: Kind, c: &ExperimentConfig) -> Result<Produced> {
    match kind {
        Kind::GapFind => gap_find(c),
        Kind::ShellSearch => shell_search(c),
        Kind::ManifoldBuild => manifold_build(c),
        Kind::TrackVerify => track_verify(c),
        Kind::ConeCheck => cone(c),
        Kind::DimensionEstimate => dimension(c),
        Kind::ManeProject => mane(c),
        Kind::CounterexampleRun => counterexample(c),
    }
}

/// Runs one resolved config; returns its outcome and the data files to write.
pub fn run_one(kind: Kind, config: &ExperimentConfig, prefix: &str) -> Result<(ExperimentOutcome, Vec<(String, Vec<u8>)>)> {
    let start = Instant::now();
    let p = dispatch(kind, config)?;
    if p.checks.iter().any(|c| c.measured.is_nan()) {
        return Err(CliError::Numerical(format!("{kind}: a check measured NaN")));
    }
    let mut files = Vec::new();
    for t in &p.tables {
        files.push((format!("{prefix}{}.csv", t.name), t.to_csv()?));
    }
    for (name, bytes) in p.extra {
        files.push((format!("{prefix}{name}"), bytes));
    }
    let passed = p.checks.iter().all(|c| c.passed);
    let outcome = ExperimentOutcome {
        kind: kind.name().to_string(),
        config: config.clone(),
        checks: p.checks,
        passed,
        result: p.result,
        files: files.iter().map(|(n, _)| n.clone()).collect(),
        runtime_s: start.elapsed().as_secs_f64(),
    };
    Ok((outcome, files))
}

/// Validates every config, runs them in order and writes data files and
/// `report.json` under `out` (per-config `out` keys take precedence for data).
/// Nothing is written if a validation fails or a target exists without force.
pub fn run(configs: Vec<ExperimentConfig>, out: Option<&OutputDir>) -> Result<ExperimentReport> {
    let start = Instant::now();
    let resolved: Vec<(Kind, ExperimentConfig)> = configs.into_iter().map(|c| c.resolve()).collect::<Result<_>>()?;
    let single = resolved.len() == 1;
    let mut planned = Vec::new();
    for (i, (kind, c)) in resolved.iter().enumerate() {
        let prefix = if single { format!("{kind}-") } else { format!("{i:02}-{kind}-") };
        let dir = match (&c.out, out) {
            (Some(d), o) => Some(OutputDir::new(d, o.is_some_and(|o| o.force))),
            (None, Some(o)) => Some(o.clone()),
            (None, None) => None,
        };
        planned.push((prefix, dir));
    }
    if let Some(o) = out {
        o.claim(&["report.json".to_string()])?;
    }
    let mut outcomes = Vec::new();
    let mut writes = Vec::new();
    for ((kind, c), (prefix, dir)) in resolved.iter().zip(planned) {
        let (mut outcome, files) = run_one(*kind, c, &prefix)?;
        if let Some(d) = dir {
            let names: Vec<String> = files.iter().map(|(n, _)| n.clone()).collect();
            d.claim(&names)?;
            outcome.files = names.iter().map(|n| d.path(n).display().to_string()).collect();
            writes.push((d, files));
        } else {
            outcome.files.clear();
        }
        outcomes.push(outcome);
    }
    for (d, files) in writes {
        for (name, bytes) in files {
            d.write(&name, &bytes)?;
        }
    }
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let report = ExperimentReport::new(outcomes, now, start.elapsed().as_secs_f64());
    if let Some(o) = out {
        o.write("report.json", report.to_json().as_bytes())?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml(text).unwrap()
    }

    #[test]
    fn empty_list_gives_an_empty_passing_report() {
        let r = run(vec![], None).unwrap();
        assert!(r.experiments.is_empty() && r.passed);
    }

    #[test]
    fn validation_happens_before_running() {
        let e = run(vec![cfg("kind = \"gap-find\""), cfg("kind = \"gap-find\"\nL = -1")], None).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn gap_find_on_the_interval() {
        // λ_n = n², gap 2n + 1 > 6 from n = 3
        let r = run(vec![cfg("kind = \"gap-find\"\nspectrum = \"interval\"\nmodes = 10\ncount = 3")], None).unwrap();
        assert_eq!(r.experiments[0].result["cuts"], json!([3, 4, 5]));
        assert!(r.passed);
    }

    #[test]
    fn c1_spectra_checks_pass() {
        let r = run(vec![cfg("kind = \"counterexample-run\"\nwhich = \"c1\"")], None).unwrap();
        assert!(r.passed, "{:?}", r.experiments[0].checks);
    }

    #[test]
    fn hopf_cloud_sits_on_the_unit_circle() {
        let pts = hopf_cloud(6, 50, 1e-3, 1).unwrap();
        assert_eq!(pts.len(), 50);
        for p in &pts {
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-3);
        }
    }
}
