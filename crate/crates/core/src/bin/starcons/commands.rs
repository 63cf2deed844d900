use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use starcons::experiments::{self, QuantizedSetup};
use starcons::optimality::{minimize_slem_with, slackness_residuals, write_curve_csv, OptimizeConfig};
use starcons::simulate::{monte_carlo, QuantizerSpec, SimulationConfig, TrialStats};
use starcons::spectral::{self, char_kcs, char_symmetric, eig_symmetric, slem, slem_closed_form};
use starcons::topology::build;
use starcons::verify::{self, Suite};
use starcons::weights::fmt_full;
use starcons::{Error, Result, Topology, Weighting};

use crate::args::*;

/// Runs `f` against `path`, or stdout when absent.
fn emit(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn json<T: serde::Serialize>(value: &T, out: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

pub fn slem_cmd(a: &SlemArgs) -> Result<ExitCode> {
    let t = a.topo.topology()?;
    let eigen = || -> Result<f64> {
        let g = build(&t)?;
        slem(&Weighting::from(a.weighting).matrix_for_graph(&g, &t)?)
    };
    if a.check {
        let cf = slem_closed_form(&t)?.slem;
        let ev = eigen()?;
        eprintln!("closed form {cf}, eigensolve {ev}, difference {:.3e}", (cf - ev).abs());
        emit(a.out.as_deref(), |o| {
            writeln!(o, "closed_form,eigen,difference")?;
            writeln!(o, "{},{},{}", fmt_full(cf), fmt_full(ev), fmt_full((cf - ev).abs()))?;
            Ok(())
        })?;
        return Ok(ExitCode::SUCCESS);
    }
    let value = match a.method {
        SlemMethod::ClosedForm => {
            let c = slem_closed_form(&t)?;
            if !c.optimality_guaranteed {
                eprintln!("warning: closed form not guaranteed optimal here (single branch, or k past its boundary)");
            }
            c.slem
        }
        SlemMethod::Eigen => eigen()?,
    };
    emit(a.out.as_deref(), |o| Ok(writeln!(o, "{value}")?))?;
    Ok(ExitCode::SUCCESS)
}

pub fn table_cmd(a: &TableArgs) -> Result<ExitCode> {
    match a.id {
        1 => {
            let t = experiments::k_max_table()?;
            let bad = t.mismatches();
            eprintln!("k_max grid: {} of 80 cells differ from the reference", bad.len());
            emit(a.out.as_deref(), |o| match a.format {
                Format::Csv => t.write_csv(o),
                Format::Json => json(&t, o),
            })?;
        }
        2 => {
            let rows = experiments::slem_comparison()?;
            let worst = rows.iter().map(|r| (r.closed_form - r.reference).abs()).fold(0.0, f64::max);
            eprintln!("SLEM comparison: max deviation from reference {worst:.2e}");
            emit(a.out.as_deref(), |o| match a.format {
                Format::Csv => experiments::write_slem_comparison_csv(&rows, o),
                Format::Json => json(&rows, o),
            })?;
        }
        id => {
            let setup = QuantizedSetup::from_table_id(id)?;
            let weightings: Vec<Weighting> = if a.weighting.is_empty() {
                Weighting::ALL.to_vec()
            } else {
                a.weighting.iter().map(|&w| w.into()).collect()
            };
            let rows = experiments::quantized_table(setup, &a.bits, &weightings, a.trials, a.seed, a.max_iters)?;
            for r in &rows {
                eprintln!(
                    "{:>2} bits {:<13} psi {:>6.2} eta {}",
                    r.bits,
                    r.weighting.name(),
                    r.stats.psi,
                    r.stats.eta.map_or("-".into(), |e| format!("{e:.2}"))
                );
            }
            emit(a.out.as_deref(), |o| match a.format {
                Format::Csv => experiments::write_quantized_csv(&rows, o),
                Format::Json => json(&rows, o),
            })?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn fig_cmd(a: &FigArgs) -> Result<ExitCode> {
    match a.id {
        2 => {
            let kmax = experiments::kcs_curve_k_max()?;
            if a.k_max_only {
                emit(a.out.as_deref(), |o| Ok(writeln!(o, "{kmax}")?))?;
                return Ok(ExitCode::SUCCESS);
            }
            let curve = experiments::kcs_curve(a.k_end)?;
            let argmin = starcons::optimality::curve_argmin(&curve);
            eprintln!("k_max {kmax}, curve minimum at k = {}", argmin.map_or("-".into(), |k| k.to_string()));
            emit(a.out.as_deref(), |o| write_curve_csv(&curve, o))?;
        }
        4 => {
            let (uniform, prob) = experiments::quantized_trajectories(a.seed, a.steps)?;
            let prefix = a.out.clone().unwrap_or_else(|| PathBuf::from("fig4"));
            let name = |suffix: &str| {
                let mut s = prefix.clone().into_os_string();
                s.push(suffix);
                PathBuf::from(s)
            };
            let show = |c: Option<usize>| c.map_or("no consensus".to_string(), |t| format!("consensus at t = {t}"));
            uniform.write_csv(BufWriter::new(File::create(name("_uniform.csv"))?))?;
            prob.write_csv(BufWriter::new(File::create(name("_probabilistic.csv"))?))?;
            eprintln!("uniform: {}; probabilistic: {}", show(uniform.consensus_at), show(prob.consensus_at));
        }
        id => return Err(Error::ParameterBounds(format!("no figure {id}; choose 2 or 4"))),
    }
    Ok(ExitCode::SUCCESS)
}

pub fn verify_cmd(a: &VerifyArgs) -> Result<ExitCode> {
    let suites: Vec<Suite> = if a.suite == "all" { Suite::ALL.to_vec() } else { vec![a.suite.parse()?] };
    let mut reports = Vec::new();
    let mut ok = true;
    for s in suites {
        let r = verify::run(s)?;
        let failed: Vec<_> = r.failures().collect();
        eprintln!(
            "{s}: {} ({} cases, {} failed)",
            if failed.is_empty() { "pass" } else { "FAIL" },
            r.cases.len(),
            failed.len()
        );
        for c in &failed {
            eprintln!("  {}: {}", c.name, c.detail);
        }
        ok &= r.passed();
        reports.push(r);
    }
    emit(a.out.as_deref(), |o| json(&reports, o))?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

pub fn graph_cmd(a: &GraphArgs) -> Result<ExitCode> {
    let g = build(&a.topo.topology()?)?;
    eprintln!("{} nodes, {} edges", g.node_count(), g.edge_count());
    emit(a.out.as_deref(), |o| g.write_csv(o))?;
    Ok(ExitCode::SUCCESS)
}

fn weight_matrix(a: &WeightsArgs) -> Result<(Topology, starcons::Graph, starcons::WeightMatrix)> {
    let t = a.topo.topology()?;
    let g = build(&t)?;
    let w = Weighting::from(a.weighting).matrix_for_graph(&g, &t)?;
    Ok((t, g, w))
}

pub fn weights_cmd(a: &WeightsArgs) -> Result<ExitCode> {
    let (_, g, w) = weight_matrix(a)?;
    if w.has_negative_diagonal() {
        eprintln!("note: some self-weights are negative");
    }
    emit(a.out.as_deref(), |o| match a.format {
        WeightsFormat::Csv => w.write_weights_csv(&g, o),
        WeightsFormat::Json => json(&w.weights_json(&g), o),
        WeightsFormat::Dense => w.write_dense_csv(o),
    })?;
    Ok(ExitCode::SUCCESS)
}

pub fn spectrum_cmd(a: &WeightsArgs) -> Result<ExitCode> {
    let (_, _, w) = weight_matrix(a)?;
    let s = eig_symmetric(w.as_dense())?;
    eprintln!("SLEM {}", spectral::slem_of_spectrum(&s));
    emit(a.out.as_deref(), |o| s.write_csv(o))?;
    Ok(ExitCode::SUCCESS)
}

pub fn charfn_cmd(a: &CharfnArgs) -> Result<ExitCode> {
    if a.m < 1 || a.n < 1 || a.k < 1 || a.points < 1 {
        return Err(Error::ParameterBounds("m, n, k and points must be at least 1".into()));
    }
    let (m, n, k) = (a.m, a.n, a.k);
    emit(a.out.as_deref(), |o| match a.family {
        CharFamily::SymmetricStar => spectral::write_characteristic_csv(|t| char_symmetric(m, n, t), a.points, o),
        CharFamily::KcsStar => spectral::write_characteristic_csv(|t| char_kcs(m, n, k, t), a.points, o),
    })?;
    Ok(ExitCode::SUCCESS)
}

fn write_stats_csv(cfg: &SimulationConfig, s: &TrialStats, o: &mut dyn Write) -> Result<()> {
    let opt = |x: Option<f64>| x.map(fmt_full).unwrap_or_default();
    writeln!(o, "bits,weighting,scheme,psi,eta,mu,rho,trials,consensus_trials,seed")?;
    writeln!(
        o,
        "{},{},{},{},{},{},{},{},{},{}",
        cfg.bits,
        cfg.weighting,
        cfg.scheme,
        fmt_full(s.psi),
        opt(s.eta),
        opt(s.mu),
        opt(s.rho),
        s.trials,
        s.consensus_trials,
        s.seed
    )?;
    Ok(())
}

pub fn simulate_cmd(a: &SimulateArgs) -> Result<ExitCode> {
    let cfg = match &a.config {
        Some(p) => serde_json::from_reader::<_, SimulationConfig>(File::open(p)?)?,
        None => SimulationConfig {
            topology: a.topo.topology()?,
            weighting: a.weighting.into(),
            bits: a.bits,
            scheme: a.scheme.into(),
            trials: a.trials,
            seed: a.seed,
            max_iters: a.max_iters,
        },
    };
    let spec = QuantizerSpec::new(cfg.bits, cfg.scheme)?;
    let stats = monte_carlo(&cfg.topology, cfg.weighting, &spec, cfg.trials, cfg.seed, cfg.max_iters)?;
    eprintln!("psi {:.2}%, eta {}", stats.psi, stats.eta.map_or("-".into(), |e| format!("{e:.2}")));
    emit(a.out.as_deref(), |o| match a.format {
        Format::Csv => write_stats_csv(&cfg, &stats, o),
        Format::Json => json(&serde_json::json!({ "config": cfg, "stats": stats }), o),
    })?;
    Ok(ExitCode::SUCCESS)
}

pub fn optimize_cmd(a: &OptimizeArgs) -> Result<ExitCode> {
    let t = a.topo.topology()?;
    let g = build(&t)?;
    let classes = if a.untied { None } else { g.strata().map(<[usize]>::to_vec) };
    let cfg = OptimizeConfig { classes, max_iters: a.max_iters, ..Default::default() };
    let r = minimize_slem_with(&g, &cfg)?;
    let closed = slem_closed_form(&t).ok().map(|c| c.slem);
    eprintln!(
        "SLEM {} after {} iterations ({}){}",
        r.slem,
        r.iterations,
        if r.converged { "stalled" } else { "iteration cap" },
        closed.map_or(String::new(), |c| format!("; closed form {c}"))
    );
    if let Some(h) = &a.history {
        r.write_history_csv(BufWriter::new(File::create(h)?))?;
    }
    let summary = serde_json::json!({
        "slem": r.slem,
        "closed_form_slem": closed,
        "iterations": r.iterations,
        "converged": r.converged,
        "class_weights": r.class_weights,
        "edge_weights": r.weights,
    });
    emit(a.out.as_deref(), |o| json(&summary, o))?;
    Ok(ExitCode::SUCCESS)
}

pub fn slackness_cmd(a: &SlacknessArgs) -> Result<ExitCode> {
    let r = slackness_residuals(a.m, a.n)?;
    let residuals: serde_json::Map<String, serde_json::Value> =
        r.residuals.named().iter().map(|&(k, v)| (k.to_string(), v.into())).collect();
    eprintln!("max residual {:.3e}", r.residuals.max());
    let report = serde_json::json!({
        "m": r.m,
        "n": r.n,
        "theta": r.theta,
        "s": r.s,
        "weights": r.weights,
        "a_coords": r.a_coords,
        "b_coords": r.b_coords,
        "residuals": residuals,
        "unit_last_coefficient": r.unit_last_coefficient,
    });
    emit(a.out.as_deref(), |o| json(&report, o))?;
    Ok(ExitCode::SUCCESS)
}

pub fn kmax_cmd(a: &KmaxArgs) -> Result<ExitCode> {
    let k = spectral::k_max(a.m, a.n)?;
    println!("{k}");
    Ok(ExitCode::SUCCESS)
}
