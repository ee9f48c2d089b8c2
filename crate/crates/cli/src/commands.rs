//! Subcommand implementations.

use crate::manifest::{resolve_out_dir, Run};
use crate::{Cli, Command};
use patternfront_core::error::{Error, Result};
use patternfront_core::front::FrontProfile;
use patternfront_core::output::{fmt_f64, CsvTable};
use patternfront_core::params::{parse_config, ModelParams};
use patternfront_core::pde::{self, Scheme, SimConfig};
use patternfront_core::periodic;
use patternfront_core::reduced::{self, ShootOptions, ShootOutcome};
use patternfront_core::spectral;
use serde::Serialize;
use std::path::PathBuf;

pub fn run(cli: Cli) -> Result<()> {
    let config_path = cli.config.as_ref().ok_or(Error::Config {
        line: 0,
        msg: "--config PATH is required".to_string(),
    })?;
    let config_text = std::fs::read_to_string(config_path).map_err(|e| Error::Config {
        line: 0,
        msg: format!("cannot read {}: {e}", config_path.display()),
    })?;
    let params = parse_config(&config_text)?;
    let out_dir = resolve_out_dir(&cli.out);
    let threads = cli.threads.max(1);

    match cli.cmd {
        Command::Spectrum {
            n_max,
            eps_list,
            extended,
            cu,
            cv,
            c,
        } => cmd_spectrum(
            out_dir,
            params,
            &config_text,
            n_max,
            eps_list,
            extended,
            (cu, cv, c),
            threads,
        ),
        Command::Periodic {
            n_modes,
            tol,
            samples,
        } => cmd_periodic(out_dir, params, &config_text, n_modes, tol, samples),
        Command::Reduced { gamma_list, delta } => {
            cmd_reduced(out_dir, params, &config_text, gamma_list, delta, threads)
        }
        Command::Front {
            gamma_list,
            delta,
            n_grid,
            n_periods,
            simulate,
            dt,
            t_end,
        } => cmd_front(
            out_dir,
            params,
            &config_text,
            gamma_list,
            delta,
            n_grid,
            n_periods,
            simulate,
            dt,
            t_end,
            threads,
        ),
        Command::Simulate {
            n_grid,
            n_periods,
            dt,
            t_end,
            scheme,
            perturb,
            record_every,
        } => cmd_simulate(
            out_dir,
            params,
            &config_text,
            n_grid,
            n_periods,
            dt,
            t_end,
            &scheme,
            perturb,
            cli.seed,
            record_every,
        ),
        Command::Validate { eps_list, n_grid } => {
            cmd_validate(out_dir, params, &config_text, eps_list, n_grid)
        }
    }
}

/// Order-preserving fan-out of a sweep across at most `threads` workers.
fn fan_out<T, R, F>(items: Vec<T>, threads: usize, f: F) -> Vec<Result<R>>
where
    T: Send,
    R: Send,
    F: Fn(T) -> Result<R> + Sync,
{
    if threads <= 1 || items.len() <= 1 {
        return items.into_iter().map(&f).collect();
    }
    let mut results: Vec<Option<Result<R>>> = items.iter().map(|_| None).collect();
    let jobs: Vec<(usize, T)> = items.into_iter().enumerate().collect();
    let queue = std::sync::Mutex::new(jobs);
    let slots = std::sync::Mutex::new(&mut results);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let job = queue.lock().unwrap().pop();
                let Some((idx, item)) = job else { break };
                let r = f(item);
                slots.lock().unwrap()[idx] = Some(r);
            });
        }
    });
    results.into_iter().map(|r| r.expect("job completed")).collect()
}

fn csv_base(run: &Run, header: &[&str]) -> CsvTable {
    let mut t = CsvTable::new(header);
    t.meta("config_digest", run.digest.clone());
    t.meta("tool_version", env!("CARGO_PKG_VERSION"));
    t
}

fn eps_tag(eps: f64) -> String {
    format!("{eps:e}").replace(['.', '+'], "_")
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct GapSummary {
    eps: f64,
    n_max: i64,
    n_central: Option<usize>,
    max_central_re: Option<f64>,
    min_hyperbolic_re: Option<f64>,
    ratio: Option<f64>,
    threshold: Option<f64>,
    /// Set at ε = 0, where every eigenvalue sits on the imaginary axis and
    /// no gap classification exists.
    all_imaginary: bool,
    /// Set when the O(ε)/O(ε^{1/2}) ordering does not hold at this ε (the
    /// gap closes for ε too large); the eigenvalue CSV is still written.
    classification_error: Option<String>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_spectrum(
    out_dir: PathBuf,
    params: ModelParams,
    config_text: &str,
    n_max: i64,
    eps_list: Vec<f64>,
    extended: bool,
    (cu, cv, c): (f64, f64, f64),
    threads: usize,
) -> Result<()> {
    let mut run = Run::new("spectrum", out_dir, params, config_text)?;
    let eps_list = if eps_list.is_empty() {
        vec![params.eps]
    } else {
        eps_list
    };

    struct EpsOutput {
        eps: f64,
        table_rows: Vec<Vec<String>>,
        summary: GapSummary,
    }

    let worker = |eps: f64| -> Result<EpsOutput> {
        let p = ModelParams::with_detuning(
            params.alpha0,
            params.c0,
            params.gamma,
            eps,
            params.q0,
            params.x0,
        )?;
        let mut slices = Vec::new();
        for n in -n_max..=n_max {
            slices.push(spectral::full_slice(n, &p)?);
        }
        // At ε = 0 there is nothing to classify (all on-axis); at large ε
        // the gap may genuinely close; record that instead of aborting
        // (the flags keep their per-threshold values either way).
        let mut classification_error = None;
        let classification = if eps > 0.0 {
            match spectral::classify_central(&mut slices, eps) {
                Ok(r) => Some(r),
                Err(Error::Numerical(msg)) => {
                    classification_error = Some(msg);
                    None
                }
                Err(other) => return Err(other),
            }
        } else {
            for s in slices.iter_mut() {
                s.central_flags = vec![false; 6];
            }
            None
        };
        let mut rows = Vec::new();
        for s in &slices {
            let all: Vec<(&str, usize, &patternfront_core::linalg::C64, &patternfront_core::linalg::C64)> =
                s.exact_sh
                    .iter()
                    .zip(&s.asym_sh)
                    .enumerate()
                    .map(|(i, (e, a))| ("sh", i, e, a))
                    .chain(
                        s.exact_con
                            .iter()
                            .zip(&s.asym_con)
                            .enumerate()
                            .map(|(i, (e, a))| ("con", i, e, a)),
                    )
                    .collect();
            for (idx, (block, branch, exact, asym)) in all.into_iter().enumerate() {
                let central = s.central_flags.get(idx).copied().unwrap_or(false);
                rows.push(vec![
                    s.n.to_string(),
                    block.to_string(),
                    branch.to_string(),
                    fmt_f64(exact.re),
                    fmt_f64(exact.im),
                    fmt_f64(asym.re),
                    fmt_f64(asym.im),
                    (central as u8).to_string(),
                ]);
            }
        }
        let summary = match &classification {
            Some(r) => GapSummary {
                eps,
                n_max,
                n_central: Some(r.n_central),
                max_central_re: Some(r.max_central_re),
                min_hyperbolic_re: Some(r.min_hyperbolic_re),
                ratio: Some(r.ratio),
                threshold: Some(r.threshold),
                all_imaginary: false,
                classification_error: None,
            },
            None => GapSummary {
                eps,
                n_max,
                n_central: None,
                max_central_re: None,
                min_hyperbolic_re: None,
                ratio: None,
                threshold: None,
                all_imaginary: eps == 0.0,
                classification_error,
            },
        };
        Ok(EpsOutput {
            eps,
            table_rows: rows,
            summary,
        })
    };

    let results = fan_out(eps_list, threads, worker);
    let mut summaries = Vec::new();
    for result in results {
        let output = result?;
        let mut table = csv_base(
            &run,
            &[
                "n", "block", "branch", "re_exact", "im_exact", "re_asym", "im_asym", "central",
            ],
        );
        table.meta("eps", fmt_f64(output.eps));
        for row in output.table_rows {
            table.push_row(row);
        }
        let path = run.path(&format!("spectrum-eps{}.csv", eps_tag(output.eps)));
        table.write_to(&path)?;
        summaries.push(output.summary);
    }
    #[derive(Serialize)]
    struct GapFile {
        summaries: Vec<GapSummary>,
    }
    run.write_json("gap-summary.json", &GapFile { summaries })?;

    if extended {
        let mut table = csv_base(&run, &["n", "block", "branch", "re", "im"]);
        table.meta("cu", fmt_f64(cu));
        table.meta("cv", fmt_f64(cv));
        table.meta("c", fmt_f64(c));
        for n in -n_max..=n_max {
            let (sh, con) = spectral::extended_model_spectrum(n, &params, cu, cv, c)?;
            for (branch, z) in sh.iter().enumerate() {
                table.push_row(vec![
                    n.to_string(),
                    "sh".to_string(),
                    branch.to_string(),
                    fmt_f64(z.re),
                    fmt_f64(z.im),
                ]);
            }
            for (branch, z) in con.iter().enumerate() {
                table.push_row(vec![
                    n.to_string(),
                    "con".to_string(),
                    branch.to_string(),
                    fmt_f64(z.re),
                    fmt_f64(z.im),
                ]);
            }
        }
        let path = run.path("spectrum-extended.csv");
        table.write_to(&path)?;
        let (on_axis, gap) = spectral::extended_spectrum_gap(&params, cu, cv, c, n_max, 1e-6)?;
        #[derive(Serialize)]
        struct ExtendedSummary {
            cu: f64,
            cv: f64,
            c: f64,
            n_max: i64,
            on_axis: usize,
            min_offaxis_re: f64,
        }
        run.write_json(
            "spectrum-extended-summary.json",
            &ExtendedSummary {
                cu,
                cv,
                c,
                n_max,
                on_axis,
                min_offaxis_re: gap,
            },
        )?;
    }

    run.finish()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// periodic
// ---------------------------------------------------------------------------

fn cmd_periodic(
    out_dir: PathBuf,
    params: ModelParams,
    config_text: &str,
    n_modes: usize,
    tol: f64,
    samples: usize,
) -> Result<()> {
    let mut run = Run::new("periodic", out_dir, params, config_text)?;
    let start = periodic::leading_order_with_modes(&params, n_modes)?;
    let refined = periodic::newton_refine(&start, tol, 50)?;

    #[derive(Serialize)]
    struct CoeffDump {
        params: ModelParams,
        n_modes: usize,
        residual_norm: Option<f64>,
        fundamental_amplitude: f64,
        u_coeffs: Vec<[f64; 2]>,
        v_coeffs: Vec<[f64; 2]>,
    }
    run.write_json(
        "periodic-coefficients.json",
        &CoeffDump {
            params,
            n_modes: refined.n_modes,
            residual_norm: refined.residual_norm,
            fundamental_amplitude: refined.fundamental_amplitude(),
            u_coeffs: refined.u_coeffs.iter().map(|c| [c.re, c.im]).collect(),
            v_coeffs: refined.v_coeffs.iter().map(|c| [c.re, c.im]).collect(),
        },
    )?;

    let mut table = csv_base(&run, &["x", "u_per", "v_per"]);
    let period = std::f64::consts::TAU / params.kc;
    for j in 0..samples {
        let x = j as f64 * period / samples as f64;
        table.push_row(vec![
            fmt_f64(x),
            fmt_f64(refined.eval_u(x)),
            fmt_f64(refined.eval_v(x)),
        ]);
    }
    let path = run.path("periodic-profile.csv");
    table.write_to(&path)?;
    run.finish()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// reduced / front
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct FixedPointDump {
    kind: String,
    state: [f64; 5],
    eigenvalues: Vec<[f64; 2]>,
    unstable_dir: Option<[f64; 5]>,
}

fn fixed_point_dump(info: &reduced::FixedPointInfo) -> FixedPointDump {
    FixedPointDump {
        kind: format!("{:?}", info.kind).to_lowercase(),
        state: info.state.to_array(),
        eigenvalues: info.eigenvalues.iter().map(|l| [l.re, l.im]).collect(),
        unstable_dir: info.unstable_dir,
    }
}

fn trajectory_table(
    run: &Run,
    params: &ModelParams,
    result: &reduced::ShootResult,
) -> CsvTable {
    let mut table = csv_base(run, &["xi", "re_a", "im_a", "re_b", "im_b", "w0", "h"]);
    table.meta("gamma", fmt_f64(params.gamma));
    table.meta("outcome", format!("{:?}", result.outcome));
    for (xi, s) in &result.trajectory {
        table.push_row(vec![
            fmt_f64(*xi),
            fmt_f64(s.a.re),
            fmt_f64(s.a.im),
            fmt_f64(s.b.re),
            fmt_f64(s.b.im),
            fmt_f64(s.w0),
            fmt_f64(reduced::lyapunov_h(s.a, s.b, params)),
        ]);
    }
    table
}

fn with_gamma(params: &ModelParams, gamma: f64) -> Result<ModelParams> {
    ModelParams::with_detuning(
        params.alpha0,
        params.c0,
        gamma,
        params.eps,
        params.q0,
        params.x0,
    )
}

fn cmd_reduced(
    out_dir: PathBuf,
    params: ModelParams,
    config_text: &str,
    gamma_list: Vec<f64>,
    delta: f64,
    threads: usize,
) -> Result<()> {
    params.require_front_regime()?;
    let mut run = Run::new("reduced", out_dir, params, config_text)?;
    let gammas = if gamma_list.is_empty() {
        vec![params.gamma]
    } else {
        gamma_list
    };

    let worker = |gamma: f64| -> Result<(f64, Vec<FixedPointDump>, reduced::ShootResult)> {
        let p = with_gamma(&params, gamma)?;
        let fps = reduced::fixed_points(&p)?;
        let shot = reduced::shoot_heteroclinic(&p, delta, &ShootOptions::default())?;
        Ok((gamma, fps.iter().map(fixed_point_dump).collect(), shot))
    };
    let results = fan_out(gammas, threads, worker);

    #[derive(Serialize)]
    struct GammaReport {
        gamma: f64,
        outcome: String,
        terminal_norm: f64,
        fixed_points: Vec<FixedPointDump>,
    }
    let mut reports = Vec::new();
    for result in results {
        let (gamma, fps, shot) = result?;
        let p = with_gamma(&params, gamma)?;
        let table = trajectory_table(&run, &p, &shot);
        let path = run.path(&format!("reduced-trajectory-gamma{}.csv", eps_tag(gamma)));
        table.write_to(&path)?;
        reports.push(GammaReport {
            gamma,
            outcome: format!("{:?}", shot.outcome),
            terminal_norm: shot.terminal_norm,
            fixed_points: fps,
        });
    }
    #[derive(Serialize)]
    struct SweepFile {
        delta: f64,
        reports: Vec<GammaReport>,
    }
    run.write_json("reduced-sweep.json", &SweepFile { delta, reports })?;
    run.finish()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_front(
    out_dir: PathBuf,
    params: ModelParams,
    config_text: &str,
    gamma_list: Vec<f64>,
    delta: f64,
    n_grid: usize,
    n_periods: usize,
    simulate: bool,
    dt: f64,
    t_end: f64,
    threads: usize,
) -> Result<()> {
    params.require_front_regime()?;
    let mut run = Run::new("front", out_dir, params, config_text)?;
    let gammas = if gamma_list.is_empty() {
        vec![params.gamma]
    } else {
        gamma_list
    };

    struct FrontOutput {
        gamma: f64,
        shot: reduced::ShootResult,
        fields_csv: CsvTable,
        assembled_mean_v: f64,
        diagnostics: Option<pde::Diagnostics>,
    }

    let worker = |gamma: f64| -> Result<FrontOutput> {
        let p = with_gamma(&params, gamma)?;
        let shot = reduced::shoot_heteroclinic(&p, delta, &ShootOptions::default())?;
        if shot.outcome != ShootOutcome::Success {
            return Err(Error::numerical(format!(
                "shooting failed at gamma = {gamma}: {:?} (terminal norm {:.3e})",
                shot.outcome, shot.terminal_norm
            )));
        }
        let grid = patternfront_core::make_grid(n_grid, n_periods, &p)?;
        let y_interface = p.eps * grid.grid.length() / 3.0;
        let profile =
            FrontProfile::from_trajectory_centered(&shot.trajectory, &p, y_interface)?;
        let fields = patternfront_core::front::assemble_front(&profile, &p, 0.0, &grid)?;
        let assembled_mean_v = fields.mean_v();
        let u = fields.u();
        let v = fields.v();
        let mut fields_csv = CsvTable::new(&["x", "u_f", "v_f"]);
        for (j, x) in fields.grid.x().enumerate() {
            fields_csv.push_row(vec![fmt_f64(x), fmt_f64(u[j]), fmt_f64(v[j])]);
        }
        let diagnostics = if simulate {
            let mut cfg = SimConfig::new(dt, t_end);
            cfg.record_every = 20;
            Some(pde::run_front_experiment(
                &p,
                &cfg,
                &shot.trajectory,
                n_grid,
                n_periods,
            )?)
        } else {
            None
        };
        Ok(FrontOutput {
            gamma,
            shot,
            fields_csv,
            assembled_mean_v,
            diagnostics,
        })
    };

    let results = fan_out(gammas, threads, worker);
    #[derive(Serialize)]
    struct FrontSummary {
        gamma: f64,
        terminal_norm: f64,
        /// Mean of the assembled v_f (reported; tends to 0 as the domain
        /// grows symmetric around the interface).
        assembled_mean_v: f64,
        fitted_speed: Option<f64>,
        expected_speed: f64,
        mean_v_drift: Option<f64>,
        amplitude_behind: Option<f64>,
        reconstruction_distance: Option<f64>,
    }
    let mut summaries = Vec::new();
    for result in results {
        let output = result?;
        let p = with_gamma(&params, output.gamma)?;
        let tag = eps_tag(output.gamma);
        trajectory_table(&run, &p, &output.shot)
            .write_to(&run.path(&format!("front-trajectory-gamma{tag}.csv")))?;
        let mut fields_csv = output.fields_csv;
        fields_csv.preamble.insert(
            0,
            ("tool_version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        );
        fields_csv
            .preamble
            .insert(0, ("config_digest".to_string(), run.digest.clone()));
        fields_csv.write_to(&run.path(&format!("front-fields-gamma{tag}.csv")))?;
        let mut summary = FrontSummary {
            gamma: output.gamma,
            terminal_norm: output.shot.terminal_norm,
            assembled_mean_v: output.assembled_mean_v,
            fitted_speed: None,
            expected_speed: p.eps * p.c0,
            mean_v_drift: None,
            amplitude_behind: None,
            reconstruction_distance: None,
        };
        if let Some(diag) = output.diagnostics {
            let mut table = csv_base(&run, &["t", "mean_v", "sup_u", "l2_u", "front_pos"]);
            for i in 0..diag.times.len() {
                table.push_row(vec![
                    fmt_f64(diag.times[i]),
                    fmt_f64(diag.mean_v[i]),
                    fmt_f64(diag.sup_u[i]),
                    fmt_f64(diag.l2_u[i]),
                    diag.front_pos[i].map(fmt_f64).unwrap_or_default(),
                ]);
            }
            table.write_to(&run.path(&format!("front-diagnostics-gamma{tag}.csv")))?;
            summary.fitted_speed = diag.fitted_speed;
            summary.mean_v_drift = Some(diag.mean_v_drift);
            summary.amplitude_behind = diag.amplitude_behind;
            summary.reconstruction_distance = diag.reconstruction_distance;
        }
        summaries.push(summary);
    }
    #[derive(Serialize)]
    struct FrontFile {
        delta: f64,
        summaries: Vec<FrontSummary>,
    }
    run.write_json("front-summary.json", &FrontFile { delta, summaries })?;
    run.finish()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn parse_scheme(name: &str) -> Result<Scheme> {
    match name {
        "imex1" => Ok(Scheme::Imex1),
        "imex2" => Ok(Scheme::Imex2),
        "etdrk" => Ok(Scheme::EtdRk),
        other => Err(Error::domain(format!(
            "unknown scheme `{other}` (expected imex1 | imex2 | etdrk)"
        ))),
    }
}

/// Smooth seeded perturbation: a handful of low-wavenumber cosines with
/// xorshift-drawn amplitudes and phases.
fn seeded_perturbation(grid: &patternfront_core::Grid, amp: f64, seed: u64) -> Vec<f64> {
    let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).max(1);
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state as f64 / u64::MAX as f64) - 0.5
    };
    let length = grid.length();
    let modes: Vec<(f64, f64, f64)> = (1..=6)
        .map(|m| {
            (
                m as f64 * std::f64::consts::TAU / length,
                next(),
                next() * std::f64::consts::TAU,
            )
        })
        .collect();
    grid.x()
        .map(|x| {
            amp * modes
                .iter()
                .map(|(k, a, phase)| a * (k * x + phase).cos())
                .sum::<f64>()
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    out_dir: PathBuf,
    params: ModelParams,
    config_text: &str,
    n_grid: usize,
    n_periods: usize,
    dt: f64,
    t_end: f64,
    scheme: &str,
    perturb: Option<f64>,
    seed: Option<u64>,
    record_every: usize,
) -> Result<()> {
    let mut run = Run::new("simulate", out_dir, params, config_text)?;
    let mut cfg = SimConfig::new(dt, t_end);
    cfg.scheme = parse_scheme(scheme)?;
    cfg.record_every = record_every;
    cfg.validate()?;

    let state = periodic::newton_refine(&periodic::leading_order(&params)?, 1e-12, 50)?;
    let mut fields = pde::embed_periodic(&state, n_grid, n_periods)?;
    if let Some(amp) = perturb {
        let noise = seeded_perturbation(&fields.grid, amp, seed.unwrap_or(1));
        let u: Vec<f64> = fields.u().iter().zip(&noise).map(|(a, b)| a + b).collect();
        fields.set_u(&u);
    }

    let u0 = fields.u();
    let mut stepper = pde::FullStepper::new(&params, &cfg, &fields.grid)?;
    let mut table = csv_base(&run, &["t", "mean_v", "sup_u", "movement"]);
    let movement = |f: &patternfront_core::FieldPair, reference: &[f64]| {
        f.u()
            .iter()
            .zip(reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max)
    };
    table.push_row(vec![
        fmt_f64(0.0),
        fmt_f64(fields.mean_v()),
        fmt_f64(fields.sup_norm_u()),
        fmt_f64(0.0),
    ]);
    let n_steps = cfg.n_steps();
    for step in 1..=n_steps {
        stepper.step(&mut fields)?;
        if step % cfg.record_every == 0 || step == n_steps {
            table.push_row(vec![
                fmt_f64(stepper.time),
                fmt_f64(fields.mean_v()),
                fmt_f64(fields.sup_norm_u()),
                fmt_f64(movement(&fields, &u0)),
            ]);
        }
    }
    table.write_to(&run.path("simulate-diagnostics.csv"))?;

    // Final snapshot with a JSON sidecar header.
    let mut snap = csv_base(&run, &["x", "u", "v"]);
    let u = fields.u();
    let v = fields.v();
    for (j, x) in fields.grid.x().enumerate() {
        snap.push_row(vec![fmt_f64(x), fmt_f64(u[j]), fmt_f64(v[j])]);
    }
    snap.write_to(&run.path("simulate-snapshot.csv"))?;
    #[derive(Serialize)]
    struct SnapshotHeader {
        params: ModelParams,
        n_grid: usize,
        length: f64,
        time: f64,
        scheme: Scheme,
        perturb: Option<f64>,
        seed: Option<u64>,
    }
    run.write_json(
        "simulate-snapshot.json",
        &SnapshotHeader {
            params,
            n_grid,
            length: fields.grid.length(),
            time: stepper.time,
            scheme: cfg.scheme,
            perturb,
            seed,
        },
    )?;
    run.finish()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

fn cmd_validate(
    out_dir: PathBuf,
    params: ModelParams,
    config_text: &str,
    eps_list: Vec<f64>,
    n_grid: usize,
) -> Result<()> {
    let mut run = Run::new("validate", out_dir, params, config_text)?;

    // Conservation: generic data, 5000 steps.
    let mut fields = patternfront_core::make_grid(512, 8, &params)?;
    let u: Vec<f64> = fields.grid.x().map(|x| 0.1 * x.cos() + 0.02 * (3.0 * x).sin()).collect();
    let v: Vec<f64> = fields.grid.x().map(|x| 0.05 + 0.03 * (2.0 * x).cos()).collect();
    fields.set_u(&u);
    fields.set_v(&v);
    let mean0 = fields.mean_v();
    let cfg = SimConfig::new(0.02, 100.0);
    let mut stepper = pde::FullStepper::new(&params, &cfg, &fields.grid)?;
    let mut drift = 0.0f64;
    for _ in 0..5000 {
        stepper.step(&mut fields)?;
        drift = drift.max((fields.mean_v() - mean0).abs());
    }
    let conservation_ok = drift <= 1e-10;
    println!("validate: conservation drift {drift:.3e} -> {}", verdict(conservation_ok));

    // Stationarity of the refined periodic state over t = 50.
    let state = periodic::newton_refine(&periodic::leading_order(&params)?, 1e-12, 50)?;
    let mut fields = pde::embed_periodic(&state, 256, 4)?;
    let u0 = fields.u();
    let cfg = SimConfig::new(0.01, 50.0);
    let mut stepper = pde::FullStepper::new(&params, &cfg, &fields.grid)?;
    for _ in 0..cfg.n_steps() {
        stepper.step(&mut fields)?;
    }
    let moved = fields
        .u()
        .iter()
        .zip(&u0)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let stationarity_ok = moved <= 1e-8;
    println!("validate: stationarity movement {moved:.3e} -> {}", verdict(stationarity_ok));

    // Ansatz residual order.
    let opts = ShootOptions {
        integrator: patternfront_core::ode::IntegratorOptions {
            max_step: 0.05,
            ..Default::default()
        },
        ..Default::default()
    };
    let shot = reduced::shoot_heteroclinic(&params, 1e-6, &opts)?;
    let residual = pde::ansatz_residual(&params, &shot.trajectory, &eps_list, n_grid)?;
    let residual_ok = residual.slope_u >= 2.0;
    println!(
        "validate: ansatz residual slope {:.3} -> {}",
        residual.slope_u,
        verdict(residual_ok)
    );

    #[derive(Serialize)]
    struct ValidateReport {
        conservation_drift: f64,
        conservation_ok: bool,
        stationarity_movement: f64,
        stationarity_ok: bool,
        residual_slope_u: f64,
        residual_ok: bool,
        residual_samples: Vec<pde::ResidualSample>,
    }
    run.write_json(
        "validate-report.json",
        &ValidateReport {
            conservation_drift: drift,
            conservation_ok,
            stationarity_movement: moved,
            stationarity_ok,
            residual_slope_u: residual.slope_u,
            residual_ok,
            residual_samples: residual.samples.clone(),
        },
    )?;
    run.finish()?;

    if conservation_ok && stationarity_ok && residual_ok {
        Ok(())
    } else {
        Err(Error::numerical(
            "validation checks failed (see validate-report.json)".to_string(),
        ))
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}
