use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, Format};
use super::output::{
    inventory, num, sha256_bytes, write_csv, write_json, write_matrix, OutputFile,
};
use crate::greens::{decay_fit, greens, verify_ldt_bounds, DecayFit, GoodnessVerdict};
use crate::msa::{
    bad_set_estimate, inductive_scale_verify, write_bad_cells, BadSetReport, InductionReport,
    ScaleLadder,
};
use crate::operator::{assemble_h, LatticeInterval};
use crate::spectrum::{eigensolve_robust, lyapunov, EigenReport, LyapunovEstimate};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Greens,
    Badset,
    Msa,
    Spectrum,
    Lyapunov,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// Written next to the outputs; the only file that varies between runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub config_sha256: String,
    pub config: ExperimentConfig,
    pub workers: usize,
    pub wall_seconds: f64,
    pub stages: Vec<StageTiming>,
    pub outputs: Vec<OutputFile>,
}

pub const MANIFEST: &str = "manifest.json";

/// Summary of a Green's function run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreensReport {
    pub interval: LatticeInterval,
    pub energy: f64,
    pub operator_norm: f64,
    pub hs_norm: f64,
    pub condition_estimate: f64,
    /// `max |(H G − I)_{ij}|`.
    pub residual: f64,
    /// Scale `N` used for the large-deviation bounds, `(|Λ| − 1)/2`.
    pub scale: f64,
    pub verdict: GoodnessVerdict,
    pub decay_fit: Option<DecayFit>,
    pub decay_fit_error: Option<String>,
}

struct Recorder {
    stages: Vec<StageTiming>,
    files: Vec<PathBuf>,
}

impl Recorder {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let out = f()?;
        self.stages.push(StageTiming {
            stage: stage.into(),
            seconds: t.elapsed().as_secs_f64(),
        });
        Ok(out)
    }
}

/// Runs one subcommand and writes its outputs plus `manifest.json` to
/// `out_dir`. A lemma falsification is reported as [`Error::Falsified`]
/// after every output has been written.
pub fn execute(
    command: Command,
    config: &ExperimentConfig,
    out_dir: &Path,
    workers: usize,
) -> Result<RunManifest> {
    let start = Instant::now();
    std::fs::create_dir_all(out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    let mut rec = Recorder {
        stages: Vec::new(),
        files: Vec::new(),
    };
    let outcome = pool.install(|| match command {
        Command::Greens => run_greens(config, out_dir, &mut rec),
        Command::Badset => run_badset(config, out_dir, &mut rec),
        Command::Msa => run_msa(config, out_dir, &mut rec),
        Command::Spectrum => run_spectrum(config, out_dir, &mut rec),
        Command::Lyapunov => run_lyapunov(config, out_dir, &mut rec),
    });
    let falsified = match outcome {
        Ok(()) => None,
        Err(Error::Falsified(msg)) => Some(msg),
        Err(e) => return Err(e),
    };
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command,
        config_sha256: sha256_bytes(config.to_toml().as_bytes()),
        config: config.clone(),
        workers,
        wall_seconds: start.elapsed().as_secs_f64(),
        stages: rec.stages,
        outputs: inventory(out_dir, &rec.files)?,
    };
    write_json(&out_dir.join(MANIFEST), &manifest)?;
    match falsified {
        Some(msg) => Err(Error::Falsified(msg)),
        None => Ok(manifest),
    }
}

/// The report [`execute`] writes for `greens`, computed in-process.
pub fn greens_report(
    config: &ExperimentConfig,
) -> Result<(GreensReport, crate::greens::GreensMatrix)> {
    let p = config.parameters()?;
    let interval = config.interval()?;
    let g = greens(&p, interval)?;
    let scale = (interval.size() - 1) as f64 / 2.0;
    let ex = &config.run.exponents;
    let (fit, fit_err) = match decay_fit(&g) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let report = GreensReport {
        interval,
        energy: p.energy,
        operator_norm: g.operator_norm,
        hs_norm: g.hs_norm,
        condition_estimate: g.condition_estimate,
        residual: g.residual(&assemble_h(&p, interval)),
        scale,
        verdict: verify_ldt_bounds(&g, scale, ex.b, ex.gamma),
        decay_fit: fit,
        decay_fit_error: fit_err,
    };
    Ok((report, g))
}

fn run_greens(config: &ExperimentConfig, dir: &Path, rec: &mut Recorder) -> Result<()> {
    let (report, g) = rec.time("greens", || greens_report(config))?;
    if config.output.wants(Format::Csv) {
        write_matrix(&dir.join("greens.csv"), g.size(), g.size(), |i, j| {
            g.entries[(i, j)]
        })?;
        rec.files.push("greens.csv".into());
    }
    if config.output.wants(Format::Json) {
        write_json(&dir.join("greens_report.json"), &report)?;
        rec.files.push("greens_report.json".into());
    }
    Ok(())
}

/// Bad-set reports for every configured energy and scale, energy outer.
pub fn badset_reports(config: &ExperimentConfig) -> Result<Vec<BadSetReport>> {
    let p = config.parameters()?;
    let mut out = Vec::new();
    for e in config.energies() {
        for &n in &config.run.scales {
            out.push(bad_set_estimate(
                &p.with_energy(e),
                n,
                config.sampler(),
                &config.run.exponents,
            )?);
        }
    }
    Ok(out)
}

fn run_badset(config: &ExperimentConfig, dir: &Path, rec: &mut Recorder) -> Result<()> {
    let reports = rec.time("badset", || badset_reports(config))?;
    if config.output.wants(Format::Csv) {
        let cells: Vec<_> = reports
            .iter()
            .flat_map(|r| r.bad_cells.iter().copied())
            .collect();
        write_bad_cells(&dir.join("bad_cells.csv"), &cells)?;
        write_csv(
            &dir.join("bad_fraction.csv"),
            &[
                "N",
                "E",
                "samples",
                "bad_count",
                "bad_fraction",
                "std_error",
                "threshold",
            ],
            reports.iter().map(|r| {
                vec![
                    r.scale.to_string(),
                    num(r.energy),
                    r.samples.to_string(),
                    r.bad_count.to_string(),
                    num(r.bad_fraction),
                    num(r.std_error),
                    num(r.threshold),
                ]
            }),
        )?;
        rec.files
            .extend(["bad_cells.csv".into(), "bad_fraction.csv".into()]);
    }
    if config.output.wants(Format::Json) {
        write_json(&dir.join("badset_report.json"), &reports)?;
        rec.files.push("badset_report.json".into());
    }
    Ok(())
}

/// Ladder verification for every configured energy.
pub fn msa_reports(config: &ExperimentConfig) -> Result<Vec<InductionReport>> {
    let p = config.parameters()?;
    let ladder = ScaleLadder::new(config.run.scales.clone(), config.run.exponents)?;
    config
        .energies()
        .into_iter()
        .map(|e| {
            inductive_scale_verify(
                &ladder,
                &p.with_energy(e),
                config.sampler(),
                config.run.budget,
            )
        })
        .collect()
}

fn run_msa(config: &ExperimentConfig, dir: &Path, rec: &mut Recorder) -> Result<()> {
    let reports = rec.time("msa", || msa_reports(config))?;
    if config.output.wants(Format::Csv) {
        let rows = reports.iter().flat_map(|r| {
            std::iter::once(vec![
                num(r.base.energy),
                r.base.scale.to_string(),
                String::new(),
                num(r.base.bad_fraction),
                num(r.base.threshold),
                String::new(),
                String::new(),
            ])
            .chain(r.steps.iter().map(|s| {
                vec![
                    num(s.bad_set.energy),
                    s.scale.to_string(),
                    s.sub_size.to_string(),
                    num(s.bad_set.bad_fraction),
                    num(s.bad_set.threshold),
                    s.pasted.to_string(),
                    s.pasting_failures.to_string(),
                ]
            }))
        });
        write_csv(
            &dir.join("msa_scales.csv"),
            &[
                "E",
                "N",
                "M0",
                "bad_fraction",
                "threshold",
                "pasted",
                "pasting_failures",
            ],
            rows,
        )?;
        rec.files.push("msa_scales.csv".into());
    }
    if config.output.wants(Format::Json) {
        write_json(&dir.join("msa_report.json"), &reports)?;
        rec.files.push("msa_report.json".into());
    }
    let failures: usize = reports.iter().map(|r| r.pasting_failures()).sum();
    if failures > 0 {
        return Err(Error::Falsified(format!(
            "pasted bounds failed at {failures} phase(s) whose sub-interval hypotheses held"
        )));
    }
    Ok(())
}

/// Eigen-decomposition plus Lyapunov exponents at every eigenvalue when
/// `run.match_lyapunov` is set.
pub fn spectrum_report(config: &ExperimentConfig) -> Result<(EigenReport, Option<Vec<f64>>)> {
    let p = config.parameters()?;
    let report = eigensolve_robust(&p, config.interval()?, config.run.weight_floor)?;
    let lyap = if config.run.match_lyapunov {
        let steps = config.run.lyapunov_steps;
        Some(
            report
                .eigenvalues
                .par_iter()
                .map(|&e| lyapunov(&p, e, steps).map(|l| l.exponent))
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    Ok((report, lyap))
}

fn run_spectrum(config: &ExperimentConfig, dir: &Path, rec: &mut Recorder) -> Result<()> {
    let (report, lyap) = rec.time("spectrum", || spectrum_report(config))?;
    if config.output.wants(Format::Csv) {
        let rows = report.diagnostics.iter().enumerate().map(|(k, d)| {
            let g = lyap.as_ref().map(|l| l[k]);
            let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
            vec![
                k.to_string(),
                num(d.eigenvalue),
                num(d.ipr),
                d.center.to_string(),
                opt(d.decay.map(|f| f.rate)),
                opt(d.decay.map(|f| f.r_squared)),
                d.decay.map(|f| f.reliable.to_string()).unwrap_or_default(),
                opt(g),
                opt(d.decay.zip(g).map(|(f, g)| f.rate / g)),
            ]
        });
        write_csv(
            &dir.join("eigen_decay.csv"),
            &[
                "index",
                "eigenvalue",
                "ipr",
                "center",
                "rate",
                "r_squared",
                "reliable",
                "lyapunov",
                "rate_over_lyapunov",
            ],
            rows,
        )?;
        rec.files.push("eigen_decay.csv".into());
    }
    if config.output.wants(Format::Json) {
        write_json(&dir.join("spectrum_report.json"), &report)?;
        rec.files.push("spectrum_report.json".into());
    }
    Ok(())
}

/// `γ(E)` over the configured energies.
pub fn lyapunov_sweep(config: &ExperimentConfig) -> Result<Vec<LyapunovEstimate>> {
    let p = config.parameters()?;
    let steps = config.run.lyapunov_steps;
    config
        .energies()
        .par_iter()
        .map(|&e| lyapunov(&p, e, steps))
        .collect()
}

fn run_lyapunov(config: &ExperimentConfig, dir: &Path, rec: &mut Recorder) -> Result<()> {
    let sweep = rec.time("lyapunov", || lyapunov_sweep(config))?;
    if config.output.wants(Format::Csv) {
        write_csv(
            &dir.join("lyapunov.csv"),
            &["E", "gamma", "steps", "renormalizations"],
            sweep.iter().map(|l| {
                vec![
                    num(l.energy),
                    num(l.exponent),
                    l.steps.to_string(),
                    l.renormalizations.to_string(),
                ]
            }),
        )?;
        rec.files.push("lyapunov.csv".into());
    }
    if config.output.wants(Format::Json) {
        write_json(&dir.join("lyapunov.json"), &sweep)?;
        rec.files.push("lyapunov.json".into());
    }
    Ok(())
}
