//! Subcommand implementations.

use std::path::Path;

use num_complex::Complex64;
use serde_json::json;

use mqcoh::analysis;
use mqcoh::dynamics::{evolve as evolve_state, SectorSystem, DENSE_QUBIT_CAP};
use mqcoh::pipeline::{self, PaperRunConfig};
use mqcoh::restore::{self, OptimizeOptions};
use mqcoh::state::coherence::decompose;
use mqcoh::state::density::PSD_FLOOR;
use mqcoh::transfer::{self, ChainLayout, MaxOrderAlpha};
use mqcoh::DensityMatrix;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// Nine significant digits, locale-free.
fn fmt9(x: f64) -> String {
    format!("{x:.8e}")
}

fn write_out(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            if content.ends_with('\n') {
                print!("{content}");
            } else {
                println!("{content}");
            }
            Ok(())
        }
    }
}

fn load_state(path: &Path) -> Result<DensityMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Validation(format!(
            "state file {} line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

pub fn analyze(state: &Path, out: Option<&Path>, csv: bool) -> Result<i32> {
    let rho = load_state(state)?;
    let d = decompose(&rho);
    let n = rho.qubit_count() as i32;
    let min_eig = rho.min_eigenvalue()?;
    let content = if csv {
        let mut s = String::from("order,intensity\n");
        for order in -n..=n {
            s.push_str(&format!("{order},{}\n", fmt9(d.intensity(order).unwrap())));
        }
        s
    } else {
        let intensities: serde_json::Map<String, serde_json::Value> = (-n..=n)
            .map(|order| (order.to_string(), json!(d.intensity(order).unwrap())))
            .collect();
        serde_json::to_string_pretty(&json!({
            "n_qubits": rho.qubit_count(),
            "intensities": intensities,
            "total_intensity": d.total_intensity(),
            "purity": rho.purity(),
            "hermiticity_residual": rho.hermiticity_residual(),
            "min_eigenvalue": min_eig,
            "physical": min_eig >= PSD_FLOOR && rho.is_physical(),
        }))
        .expect("serializable report")
    };
    write_out(out, &content)?;
    Ok(0)
}

pub fn table1(out: Option<&Path>, csv: bool) -> Result<i32> {
    let content = if csv {
        analysis::table1_csv()
    } else {
        let rows: Vec<_> = analysis::table1()
            .into_iter()
            .map(|r| {
                json!({
                    "N": r.qubits,
                    "n": r.order,
                    "N_n": r.rank_bound,
                    "two_I_max": { "num": r.max_intensity.num, "den": r.max_intensity.den },
                })
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("serializable table")
    };
    write_out(out, &content)?;
    Ok(0)
}

pub fn evolve(state: &Path, t: f64, config: &RunConfig, out: Option<&Path>) -> Result<i32> {
    let rho = load_state(state)?;
    let sys = SectorSystem::new(rho.qubit_count(), config.d)?;
    let evolved = evolve_state(&rho, &sys.propagators(t)?)?;
    let content = serde_json::to_string(&evolved).expect("serializable state");
    write_out(out, &content)?;
    Ok(0)
}

fn build_system(config: &RunConfig, l_max: usize) -> Result<SectorSystem> {
    Ok(if config.n <= DENSE_QUBIT_CAP {
        SectorSystem::new(config.n, config.d)?
    } else {
        SectorSystem::truncated(config.n, config.d, l_max)?
    })
}

/// Registration time: the configured `t`, or the optimum located on the
/// configured range. Returns (time, was_optimized).
fn registration_time(
    config: &RunConfig,
    sys: &SectorSystem,
    layout: &ChainLayout,
    l_max: usize,
) -> Result<(f64, bool)> {
    match config.t {
        Some(t) => Ok((t, false)),
        None => {
            let (t_star, _) = transfer::find_optimal_time(
                sys,
                layout,
                (config.t_min, config.t_max),
                config.grid_points,
                l_max,
            )?;
            Ok((t_star, true))
        }
    }
}

pub fn transfer_map(config: &RunConfig, out: Option<&Path>) -> Result<i32> {
    let layout = ChainLayout::new(config.n, config.m, config.b)?;
    let l_max = config
        .l_max
        .unwrap_or_else(|| layout.auto_l_max(config.tail_tol));
    let sys = build_system(config, l_max)?;
    let l_max = l_max.min(sys.max_excitation());
    let (t, optimized) = registration_time(config, &sys, &layout, l_max)?;
    let map = transfer::extract_transfer_map(&sys, &layout, t, l_max)?;
    let mut value = map.to_json();
    value["t_source"] = json!(if optimized { "optimized" } else { "config" });
    value["Dt"] = json!(t * config.d);
    write_out(
        out,
        &serde_json::to_string_pretty(&value).expect("serializable map"),
    )?;
    Ok(0)
}

pub fn restore(config: &RunConfig, out: Option<&Path>) -> Result<i32> {
    let layout = ChainLayout::new(config.n, config.m, config.b)?;
    let l_max = config
        .l_max
        .unwrap_or_else(|| layout.auto_l_max(config.tail_tol));
    let sys = build_system(config, l_max)?;
    let l_max = l_max.min(sys.max_excitation());
    let (t, _) = registration_time(config, &sys, &layout, l_max)?;
    let map = transfer::extract_transfer_map(&sys, &layout, t, l_max)?;
    let result = restore::optimize_phases(
        &map,
        &[(2, 3)],
        OptimizeOptions {
            starts: config.optimizer_starts,
            seed: config.seed,
            ..OptimizeOptions::default()
        },
    )?;
    let u = restore::build_unitary_2q(&result.phases);
    let restored = map.conjugated(&u)?;
    let m1 = restored.combined_order1()?;
    let alpha = |i: usize, j: usize| json!([m1[[i, j]].re, m1[[i, j]].im]);
    let value = json!({
        "t": t,
        "Dt": t * config.d,
        "phi": result.phases.phi,
        "residual": result.residual,
        "converged": result.converged,
        "alphas": {
            "alpha_12": alpha(0, 1),
            "alpha_13": alpha(0, 2),
            "alpha_24": alpha(1, 3),
            "alpha_34": alpha(2, 3),
        },
    });
    write_out(
        out,
        &serde_json::to_string_pretty(&value).expect("serializable result"),
    )?;
    Ok(0)
}

pub fn paper_run(config: &RunConfig, out: Option<&Path>) -> Result<i32> {
    let run_config = PaperRunConfig {
        qubit_count: config.n,
        block_size: config.m,
        coupling: config.d,
        inverse_temperature: config.b,
        t_min: config.t_min,
        t_max: config.t_max,
        grid_points: config.grid_points,
        l_max: config.l_max,
        tail_tol: config.tail_tol,
        optimizer_starts: config.optimizer_starts,
        seed: config.seed,
        sender_amplitude: config.sender_a,
    };
    let report = pipeline::paper_run(&run_config)?;

    println!(
        "published-run reproduction (N={}, b={})",
        config.n, config.b
    );
    println!(
        "  l_max = {}, neglected thermal weight {:.3e}",
        report.l_max, report.neglected_weight
    );
    println!(
        "  Dt* = {:.6}, |alpha_max_order| = {:.6}",
        report.t_star * config.d,
        report.alpha_max_order_abs
    );
    println!(
        "  phi = [{}]",
        report
            .phases
            .iter()
            .map(|p| format!("{p:.5}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!("  optimizer residual {:.3e}", report.optimizer_residual);
    println!(
        "  {:<24} {:>14} {:>14} {:>10} {:>6}",
        "check", "value", "reference", "tol", "state"
    );
    for c in &report.checks {
        println!(
            "  {:<24} {:>14.7} {:>14.7} {:>10.1e} {:>6}",
            c.name,
            c.value,
            c.reference,
            c.tolerance,
            if c.pass { "ok" } else { "FAIL" }
        );
    }

    if let Some(path) = out {
        let text = serde_json::to_string_pretty(&report).expect("serializable report");
        std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }

    if report.pass {
        println!("overall: PASS");
        Ok(0)
    } else {
        Err(CliError::Tolerance("published-run checks failed".into()))
    }
}

pub fn scan(config: &RunConfig, out: Option<&Path>) -> Result<i32> {
    let layout = ChainLayout::new(config.n, config.m, config.b)?;
    let l_max = config
        .l_max
        .unwrap_or_else(|| layout.auto_l_max(config.tail_tol));
    let sys = build_system(config, l_max)?;
    let l_max = l_max.min(sys.max_excitation());
    let eval = MaxOrderAlpha::build(&sys, &layout, l_max)?;
    let c14 = Complex64::new(config.sender_c14[0], config.sender_c14[1]);
    let c14_sq = c14.norm_sqr();

    let mut content = String::from("Dt,abs_alpha_14_14,I2R\n");
    let step = (config.t_max - config.t_min) / (config.grid_points - 1) as f64;
    for k in 0..config.grid_points {
        let t = config.t_min + step * k as f64;
        let a = eval.eval(t).norm();
        content.push_str(&format!(
            "{},{},{}\n",
            fmt9(t * config.d),
            fmt9(a),
            fmt9(a * a * c14_sq)
        ));
    }
    write_out(out, &content)?;
    Ok(0)
}
