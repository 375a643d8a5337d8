//! Scenario files and the `lienard` command line.
//!
//! A scenario is a JSON document holding the system definition and the
//! parameters of every stage. Each subcommand writes `<subcommand>.json`
//! and `<subcommand>.csv` into the output directory, plus the fully
//! defaulted scenario as `scenario.json`. Failures write `diagnostics.json`
//! and exit with 2 (bad input) or 3 (numerical failure).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::certificate::{certify, compute_constants};
use crate::cycle::{find_limit_cycle, orbit_geometry, PeriodicOrbit};
use crate::error::{Error, Result};
use crate::floquet::FloquetData;
use crate::loud::{bifurcation_function, find_simple_zeros};
use crate::model::{hypothesis_check, LienardSystem, ScalarFunction, SystemSpec};
use crate::moser::{nonexistence_scan, MoserSystem, ScanOptions};
use crate::ode::Tolerances;
use crate::perturbed::{solve_perturbed, sweep_epsilon};
use crate::report::{fmt_num, write_atomic, write_json, CsvTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const DIAGNOSTICS_FILE: &str = "diagnostics.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CycleConfig {
    pub a_guess: f64,
    /// Rows in the exported orbit table.
    pub orbit_samples: usize,
}

impl Default for CycleConfig {
    fn default() -> Self {
        Self {
            a_guess: 2.0,
            orbit_samples: 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertificateConfig {
    pub r: f64,
    pub epsilon: f64,
    pub h: f64,
    pub phi: f64,
    /// Defaults to the cycle period.
    pub tau: Option<f64>,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        Self {
            r: 3.0,
            epsilon: 0.0,
            h: 0.0,
            phi: 0.0,
            tau: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbConfig {
    pub epsilon: f64,
    pub phis: Vec<f64>,
    /// Defaults to the cycle period.
    pub tau_guess: Option<f64>,
    pub h_guess: f64,
}

impl Default for PerturbConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            phis: vec![0.0],
            tau_guess: None,
            h_guess: 0.0,
        }
    }
}

/// Either an explicit `epsilons` list or the range `start, start + step, ..., <= stop`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub epsilons: Option<Vec<f64>>,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub phi: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            epsilons: None,
            start: 0.0,
            stop: 0.2,
            step: 0.01,
            phi: 0.0,
        }
    }
}

impl SweepConfig {
    pub fn grid(&self) -> Result<Vec<f64>> {
        if let Some(e) = &self.epsilons {
            return Ok(e.clone());
        }
        if !(self.step > 0.0) || !(self.stop >= self.start) {
            return Err(Error::Config(format!(
                "sweep range needs step > 0 and stop >= start, got start {} stop {} step {}",
                self.start, self.stop, self.step
            )));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|k| self.start + k as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoudConfig {
    /// Forcing as a function of the phase `t / tau0` in `[0, 1)`.
    pub forcing: ScalarFunction,
    pub n_samples: usize,
}

impl Default for LoudConfig {
    fn default() -> Self {
        Self {
            forcing: ScalarFunction::catalog("cos_phase", &[1.0, 1.0, 0.0]).expect("catalog entry"),
            n_samples: 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MoserConfig {
    pub epsilon: f64,
    pub n_trajectories: usize,
    pub t_final: f64,
    /// Half-width of the start box; defaults to `epsilon`.
    pub box_size: Option<f64>,
    pub tolerances: Tolerances,
}

impl Default for MoserConfig {
    fn default() -> Self {
        let scan = ScanOptions::default();
        Self {
            epsilon: 0.2,
            n_trajectories: scan.n_trajectories,
            t_final: scan.t_final,
            box_size: None,
            tolerances: scan.tol,
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub system: SystemSpec,
    #[serde(default)]
    pub cycle: CycleConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub certificate: CertificateConfig,
    #[serde(default)]
    pub perturb: PerturbConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub loud: LoudConfig,
    #[serde(default)]
    pub moser: MoserConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.system.build()?;
        self.tolerances.validate()?;
        self.moser.tolerances.validate()?;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("cycle.a_guess", self.cycle.a_guess)?;
        positive("certificate.r", self.certificate.r)?;
        positive("moser.t_final", self.moser.t_final)?;
        if let Some(b) = self.moser.box_size {
            positive("moser.box_size", b)?;
        }
        if self.perturb.phis.is_empty() {
            return Err(Error::Config("perturb.phis must not be empty".into()));
        }
        let grid = self.sweep.grid()?;
        if grid.first() != Some(&0.0) || grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("sweep grid must start at 0 and increase strictly".into()));
        }
        if self.loud.n_samples < 256 {
            return Err(Error::Config(format!(
                "loud.n_samples must be >= 256, got {}",
                self.loud.n_samples
            )));
        }
        MoserSystem::new(self.moser.epsilon).map_err(|e| Error::Config(format!("moser.{e}")))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Shoot for the limit cycle and check the standing hypotheses.
    FindCycle,
    /// Fundamental matrix, multipliers and Jacobi matrix along the cycle.
    Floquet,
    /// Estimate constants and the existence certificate.
    Certify,
    /// Periodic solutions of the forced system for each configured phase.
    Perturb,
    /// Continuation in epsilon until the first failure.
    Sweep,
    /// Bifurcation function of a time-periodic forcing and its zeros.
    Loud,
    /// Lyapunov scan of Moser's example.
    Moser,
    /// Every stage above, in order.
    Pipeline,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::FindCycle => "find-cycle",
            Command::Floquet => "floquet",
            Command::Certify => "certify",
            Command::Perturb => "perturb",
            Command::Sweep => "sweep",
            Command::Loud => "loud",
            Command::Moser => "moser",
            Command::Pipeline => "pipeline",
        }
    }

    /// Library module that does the work of a single stage.
    pub fn module(self) -> &'static str {
        match self {
            Command::FindCycle => "cycle",
            Command::Floquet => "floquet",
            Command::Certify => "certificate",
            Command::Perturb | Command::Sweep => "perturbed",
            Command::Loud => "loud",
            Command::Moser => "moser",
            Command::Pipeline => "cli",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "lienard",
    version,
    about = "Limit cycles and periodic perturbations of Liénard oscillators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario JSON file.
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Output directory (overrides the scenario's `output_dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub rtol: Option<f64>,
    #[arg(long, global = true)]
    pub atol: Option<f64>,
}

/// Lazily computed shared state of one run.
struct Run {
    scenario: Scenario,
    out: PathBuf,
    system: LienardSystem,
    orbit: Option<PeriodicOrbit>,
    floquet: Option<FloquetData>,
    /// Stage currently running, for diagnostics.
    current: Command,
}

impl Run {
    fn tol(&self) -> Tolerances {
        self.scenario.tolerances
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn orbit(&mut self) -> Result<&PeriodicOrbit> {
        if self.orbit.is_none() {
            let sys = self.system.unperturbed();
            self.orbit = Some(find_limit_cycle(&sys, self.scenario.cycle.a_guess, self.tol())?);
        }
        Ok(self.orbit.as_ref().unwrap())
    }

    fn floquet(&mut self) -> Result<(&PeriodicOrbit, &FloquetData)> {
        if self.floquet.is_none() {
            let tol = self.tol();
            let sys = self.system.unperturbed();
            let orbit = self.orbit()?;
            let fd = FloquetData::compute(&sys, orbit, tol)?;
            self.floquet = Some(fd);
        }
        Ok((self.orbit.as_ref().unwrap(), self.floquet.as_ref().unwrap()))
    }

    fn emit(&self, stage: Command, json: &serde_json::Value, csv: &CsvTable) -> Result<()> {
        write_json(&self.path(&format!("{}.json", stage.name())), json)?;
        csv.write(&self.path(&format!("{}.csv", stage.name())))
    }

    fn forced_system(&self) -> Result<LienardSystem> {
        if self.system.perturbation().is_none() {
            return Err(Error::Config("system.perturbation is required for this stage".into()));
        }
        Ok(self.system.clone())
    }

    fn find_cycle(&mut self) -> Result<()> {
        let r = self.scenario.certificate.r;
        let samples = self.scenario.cycle.orbit_samples;
        let hypotheses = hypothesis_check(&self.system, r)?;
        let orbit = self.orbit()?.clone();
        let json = json!({
            "parameters": {"a_guess": self.scenario.cycle.a_guess, "tolerances": self.tol(), "probe_radius": r},
            "a": orbit.a,
            "tau0": orbit.tau0,
            "closure_residual": orbit.closure_residual,
            "max_radius": orbit.max_radius,
            "newton_iterations": orbit.newton_iterations,
            "return_map_derivative": orbit.return_map_derivative,
            "hypotheses": hypotheses,
        });
        self.emit(Command::FindCycle, &json, &orbit.to_csv(samples))
    }

    fn floquet_stage(&mut self) -> Result<()> {
        let tol = self.tol();
        let (_, fd) = self.floquet()?;
        let mut json = serde_json::to_value(fd.report()).expect("serialisable");
        json["parameters"] = json!({"tolerances": tol});
        let mut csv = CsvTable::new(&["t", "Y11", "Y12", "Y21", "Y22", "detY", "W"]);
        for (t, y, w) in fd.fundamental.path() {
            let [a, b, c, d] = y.to_flat();
            csv.push_numbers(&[t, a, b, c, d, y.det(), w]);
        }
        self.emit(Command::Floquet, &json, &csv)
    }

    fn certify_stage(&mut self) -> Result<()> {
        let cfg = self.scenario.certificate.clone();
        let sys = self.system.clone();
        let (orbit, fd) = self.floquet()?;
        orbit_geometry(orbit, cfg.r)?;
        let constants = compute_constants(&sys, orbit, fd, cfg.r)?;
        let tau = cfg.tau.unwrap_or(orbit.tau0);
        let cert = certify(&constants, cfg.epsilon, cfg.h, tau, cfg.phi, fd.multipliers.stable);
        let mut json = serde_json::to_value(&cert).expect("serialisable");
        json["parameters"] = serde_json::to_value(&cfg).expect("serialisable");
        self.emit(Command::Certify, &json, &cert.to_csv())
    }

    fn perturb_stage(&mut self) -> Result<()> {
        let cfg = self.scenario.perturb.clone();
        let tol = self.tol();
        let sys = self.forced_system()?;
        let (orbit, fd) = self.floquet()?;
        let tau_guess = cfg.tau_guess.unwrap_or(orbit.tau0);
        let results: Vec<_> = cfg
            .phis
            .par_iter()
            .map(|&phi| {
                (
                    phi,
                    solve_perturbed(&sys, orbit, fd, cfg.epsilon, phi, tau_guess, cfg.h_guess, tol),
                )
            })
            .collect();
        let mut csv = CsvTable::new(&["epsilon", "phi", "tau", "h", "residual", "iterations", "status"]);
        let mut rows = Vec::new();
        let mut first_error = None;
        for (phi, r) in results {
            match r {
                Ok(s) => {
                    csv.push_cells(vec![
                        fmt_num(s.epsilon),
                        fmt_num(phi),
                        fmt_num(s.tau),
                        fmt_num(s.h),
                        fmt_num(s.residual),
                        s.newton_iterations.to_string(),
                        "converged".into(),
                    ]);
                    rows.push(json!({"phi": phi, "tau": s.tau, "h": s.h, "residual": s.residual,
                        "iterations": s.newton_iterations, "status": "converged"}));
                }
                Err(e) => {
                    let nan = fmt_num(f64::NAN);
                    csv.push_cells(vec![
                        fmt_num(cfg.epsilon),
                        fmt_num(phi),
                        nan.clone(),
                        nan.clone(),
                        nan,
                        "0".into(),
                        e.name().into(),
                    ]);
                    rows.push(json!({"phi": phi, "status": e.name(), "message": e.to_string()}));
                    first_error.get_or_insert(e);
                }
            }
        }
        let json = json!({
            "parameters": {"epsilon": cfg.epsilon, "phis": cfg.phis, "tau_guess": tau_guess,
                "h_guess": cfg.h_guess, "tolerances": tol},
            "tau0": orbit.tau0,
            "a": orbit.a,
            "solutions": rows,
        });
        self.emit(Command::Perturb, &json, &csv)?;
        first_error.map_or(Ok(()), Err)
    }

    fn sweep_stage(&mut self) -> Result<()> {
        let cfg = self.scenario.sweep.clone();
        let grid = cfg.grid()?;
        let tol = self.tol();
        let sys = self.forced_system()?;
        let (orbit, fd) = self.floquet()?;
        let table = sweep_epsilon(&sys, orbit, fd, &grid, cfg.phi, tol)?;
        let mut json = serde_json::to_value(&table).expect("serialisable");
        json["parameters"] = json!({"grid": grid, "phi": cfg.phi, "tolerances": tol});
        self.emit(Command::Sweep, &json, &table.to_csv())
    }

    fn loud_stage(&mut self) -> Result<()> {
        let cfg = self.scenario.loud.clone();
        let orbit = self.orbit()?;
        let e = cfg.forcing.rescaled(1.0 / orbit.tau0);
        let bf = bifurcation_function(orbit, &e, cfg.n_samples)?;
        let zeros = find_simple_zeros(&bf);
        let json = json!({
            "parameters": {"forcing": cfg.forcing, "n_samples": bf.values.len()},
            "tau0": bf.tau0,
            "mean": bf.mean(),
            "period_mismatch": bf.period_mismatch(),
            "max_abs": bf.max_abs(),
            "zeros": zeros,
        });
        self.emit(Command::Loud, &json, &bf.to_csv())
    }

    fn moser_stage(&mut self) -> Result<()> {
        let cfg = self.scenario.moser.clone();
        let sys = MoserSystem::new(cfg.epsilon)?;
        let opts = ScanOptions {
            n_trajectories: cfg.n_trajectories,
            t_final: cfg.t_final,
            box_size: cfg.box_size,
            seed: self.scenario.seed,
            tol: cfg.tolerances,
        };
        let construction = sys.verify_construction(10_000, self.scenario.seed);
        let report = nonexistence_scan(&sys, &opts)?;
        let mut csv = CsvTable::new(&[
            "x0",
            "y0",
            "V_initial",
            "V_final",
            "max_upstep",
            "quadrant_time",
            "rate_gap",
            "strict_decay",
        ]);
        for r in &report.trajectories {
            let mut cells: Vec<String> = [
                r.start[0],
                r.start[1],
                r.v_initial,
                r.v_final,
                r.max_upstep,
                r.quadrant_time,
                r.rate_gap,
            ]
            .iter()
            .map(|&x| fmt_num(x))
            .collect();
            cells.push(r.strict_decay.to_string());
            csv.push_cells(cells);
        }
        let json = json!({"parameters": opts, "construction": construction, "scan": report});
        self.emit(Command::Moser, &json, &csv)
    }

    fn stage(&mut self, cmd: Command) -> Result<()> {
        self.current = cmd;
        match cmd {
            Command::FindCycle => self.find_cycle(),
            Command::Floquet => self.floquet_stage(),
            Command::Certify => self.certify_stage(),
            Command::Perturb => self.perturb_stage(),
            Command::Sweep => self.sweep_stage(),
            Command::Loud => self.loud_stage(),
            Command::Moser => self.moser_stage(),
            Command::Pipeline => {
                for c in [
                    Command::FindCycle,
                    Command::Floquet,
                    Command::Certify,
                    Command::Perturb,
                    Command::Sweep,
                    Command::Loud,
                    Command::Moser,
                ] {
                    self.stage(c)?;
                }
                Ok(())
            }
        }
    }
}

fn resolve(cli: &Cli) -> Result<(Scenario, PathBuf)> {
    let path = cli
        .scenario
        .as_ref()
        .ok_or_else(|| Error::Config("--scenario <path> is required".into()))?;
    let mut scenario = Scenario::load(path)?;
    if let Some(rtol) = cli.rtol {
        scenario.tolerances.rtol = rtol;
    }
    if let Some(atol) = cli.atol {
        scenario.tolerances.atol = atol;
    }
    scenario.tolerances.validate()?;
    if let Some(out) = &cli.out {
        scenario.output_dir = out.clone();
    }
    let out = scenario.output_dir.clone();
    Ok((scenario, out))
}

fn execute(cli: &Cli, scenario: Scenario, out: PathBuf) -> std::result::Result<(), (Error, Command)> {
    let setup = |e: Error| (e, cli.command);
    let stale = out.join(DIAGNOSTICS_FILE);
    if stale.exists() {
        std::fs::remove_file(&stale).map_err(|e| setup(e.into()))?;
    }
    write_json(&out.join("scenario.json"), &scenario).map_err(setup)?;
    let system = scenario.system.build().map_err(setup)?;
    if let Some(jobs) = cli.jobs {
        // only the first call in a process can size the global pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    let mut run = Run {
        scenario,
        out,
        system,
        orbit: None,
        floquet: None,
        current: cli.command,
    };
    run.stage(cli.command).map_err(|e| (e, run.current))
}

/// Run one subcommand; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let (result, out) = match resolve(cli) {
        Ok((scenario, out)) => (execute(cli, scenario, out.clone()), out),
        Err(e) => (
            Err((e, cli.command)),
            cli.out.clone().unwrap_or_else(default_output_dir),
        ),
    };
    let Err((e, stage)) = result else {
        return EXIT_OK;
    };
    let code = if e.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_NUMERICAL
    };
    let diag = json!({
        "status": "error",
        "subcommand": cli.command.name(),
        "stage": stage.name(),
        "module": stage.module(),
        "exit_code": code,
        "error": e.name(),
        "message": e.to_string(),
    });
    let text = serde_json::to_string_pretty(&diag).expect("serialisable") + "\n";
    if write_atomic(&out.join(DIAGNOSTICS_FILE), text.as_bytes()).is_err() {
        eprintln!("could not write diagnostics to {}", out.display());
    }
    eprintln!("error [{}]: {e}", e.name());
    code
}

/// Parse arguments and run. Argument errors exit with 2.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
