//! Command-line front end: gen, simulate, sweep, optimize, report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::constraints::{check_responses, CodeLimits, Quantity, Responses, Strategy};
use crate::defaults;
use crate::design::{batch_generate, ParameterGrid};
use crate::error::{Error, Result};
use crate::exec::available_workers;
use crate::fem::loads::LoadFile;
use crate::fem::{RotationMeasure, Support};
use crate::ga::{evolve, parameter_deviation_report, FemEvaluator, GaConfig, GaRun, Problem};
use crate::io::{read_json, write_atomic, write_json};
use crate::manifest::RunManifest;
use crate::mesh::generate_mesh;
use crate::model::JacketParams;
use crate::report::{
    compare, fitness_csv, load, AttemptSummary, FitnessPoint, OptimizationSummary, SimulationRecord,
};
use crate::scenario::{Scenario, ScenarioInputs, DEFAULT_CHAR_SIZE};
use crate::soil::SoilProfile;
use crate::sweeps::{
    estimate_changes, fit_gradients, mass_delta, run_sweep, CombinationFile, Selection, SweepKind,
    SweepSpec, SweepTable,
};
use crate::wave::{CsTable, WaveFile};

#[derive(Debug, Parser)]
#[command(name = "jacketopt", version, about = "Analysis and sizing optimisation of offshore wind jackets")]
pub struct Cli {
    /// RNG seed (optimize); recorded in every manifest.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for batched solves [default: all cores].
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output file (gen, simulate) or directory (sweep, optimize, report).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mesh a jacket, or write a batch of models from design vectors.
    Gen(GenArgs),
    /// Solve one model and write result.json.
    Simulate(SimulateArgs),
    /// One-parameter sweeps, gradients and combination estimates.
    Sweep(SweepArgs),
    /// Genetic-algorithm mass minimisation.
    Optimize(OptimizeArgs),
    /// Comparison tables from result.json / summary.json files.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Geometry file (*.jct.json).
    #[arg(long)]
    pub model: PathBuf,
    /// Section file (*.sec.json).
    #[arg(long)]
    pub sections: PathBuf,
    /// Material file [default: S355].
    #[arg(long)]
    pub material: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnvArgs {
    /// Wave file [default: shipped].
    #[arg(long)]
    pub waves: Option<PathBuf>,
    /// Load case file [default: shipped].
    #[arg(long)]
    pub loads: Option<PathBuf>,
    /// Soil profile [default: shipped illustrative profile].
    #[arg(long)]
    pub soil: Option<PathBuf>,
    /// Optional drag/inertia coefficient bands.
    #[arg(long)]
    pub cs_table: Option<PathBuf>,
    #[arg(long, default_value = "HWL")]
    pub water_level: String,
    /// spring | fixed
    #[arg(long, default_value = "spring")]
    pub support: Support,
    #[arg(long, default_value = "ULS")]
    pub combination: String,
    #[arg(long, default_value_t = DEFAULT_CHAR_SIZE)]
    pub char_size: f64,
    /// tilt | twist
    #[arg(long, default_value = "tilt", value_parser = parse_rotation)]
    pub rotation: RotationMeasure,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = DEFAULT_CHAR_SIZE)]
    pub char_size: f64,
    /// JSON array of {label: value} design vectors; writes one model pair
    /// per vector instead of a mesh.
    #[arg(long)]
    pub batch: Option<PathBuf>,
    /// Optimiser settings holding the parameter grid [default: shipped].
    #[arg(long)]
    pub ga: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub env: EnvArgs,
    /// Keep nodal displacements and element stresses in result.json.
    #[arg(long)]
    pub fields: bool,
    /// Model name in reports [default: model file stem].
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub env: EnvArgs,
    /// PL, BW, BD, BT, LD, LT or all.
    #[arg(long)]
    pub kind: String,
    /// First PL/BW value in mm [default: 1400 for PL, 22500 for BW].
    #[arg(long)]
    pub from: Option<f64>,
    /// Last PL/BW value in mm [default: 5900 for PL, 40000 for BW].
    #[arg(long)]
    pub to: Option<f64>,
    /// Increment in mm [default: 500 for PL, 2500 for BW].
    #[arg(long)]
    pub step: Option<f64>,
    /// Combination sets for BD/BT/LD/LT [default: shipped].
    #[arg(long)]
    pub combinations: Option<PathBuf>,
    /// Selection of one point per kind plus overrides; estimates and
    /// simulates the combined design.
    #[arg(long)]
    pub select: Option<PathBuf>,
    /// Strategy used to check the selected design.
    #[arg(long, default_value = "1")]
    pub strategy: Strategy,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub env: EnvArgs,
    /// Optimiser settings and grid [default: shipped].
    #[arg(long)]
    pub ga: Option<PathBuf>,
    #[arg(long)]
    pub strategy: Option<Strategy>,
    #[arg(long)]
    pub attempts: Option<usize>,
    /// Population size override.
    #[arg(long)]
    pub pop: Option<usize>,
    /// Generation cap override.
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// result.json and summary.json files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value = "3")]
    pub strategy: Strategy,
    /// result.json of the original design (strategies 1 and 2).
    #[arg(long)]
    pub baseline: Option<PathBuf>,
}

fn parse_rotation(s: &str) -> std::result::Result<RotationMeasure, String> {
    match s {
        "tilt" => Ok(RotationMeasure::Tilt),
        "twist" => Ok(RotationMeasure::Twist),
        _ => Err(format!("`{s}` is not tilt or twist")),
    }
}

/// Parse `argv` (program name first), run, and return the exit status:
/// 0 success, 1 user error, 2 numerical failure.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let command: Vec<String> = argv
        .iter()
        .map(|s| s.to_string_lossy().into_owned())
        .collect();
    match dispatch(cli, command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(cli: Cli, command: Vec<String>) -> Result<()> {
    let workers = match cli.workers {
        Some(0) => return Err(Error::invalid("workers", "must be at least 1")),
        Some(n) => n,
        None => available_workers(),
    };
    let ctx = Ctx {
        seed: cli.seed,
        workers,
        out: cli.out,
        manifest: RunManifest::start(command, cli.seed, workers),
    };
    match cli.command {
        Command::Gen(a) => gen(ctx, a),
        Command::Simulate(a) => simulate(ctx, a),
        Command::Sweep(a) => sweep(ctx, a),
        Command::Optimize(a) => optimize(ctx, a),
        Command::Report(a) => report(ctx, a),
    }
}

struct Ctx {
    seed: Option<u64>,
    workers: usize,
    out: Option<PathBuf>,
    manifest: RunManifest,
}

impl Ctx {
    fn out_file(&self, default: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(default))
    }

    fn out_dir(&self, default: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(default))
    }

    fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        write_atomic(path, bytes)?;
        self.manifest.output(path);
        Ok(())
    }

    fn write_json<T: serde::Serialize>(&mut self, path: &Path, v: &T) -> Result<()> {
        write_json(path, v)?;
        self.manifest.output(path);
        Ok(())
    }

    /// Read an optional input file, falling back to shipped data; both are
    /// digested into the manifest.
    fn input<T: serde::de::DeserializeOwned>(
        &mut self,
        path: Option<&Path>,
        builtin: (&str, &str),
    ) -> Result<T> {
        match path {
            Some(p) => {
                self.manifest.input_file(p)?;
                read_json(p)
            }
            None => {
                self.manifest.input_builtin(builtin.0, builtin.1);
                Ok(serde_json::from_str(builtin.1).expect("shipped data parses"))
            }
        }
    }

    fn model(&mut self, a: &ModelArgs) -> Result<JacketParams> {
        self.manifest.input_file(&a.model)?;
        self.manifest.input_file(&a.sections)?;
        if let Some(m) = &a.material {
            self.manifest.input_file(m)?;
        }
        JacketParams::from_files(&a.model, &a.sections, a.material.as_deref())
    }

    fn scenario(&mut self, a: &EnvArgs) -> Result<Scenario> {
        let waves: WaveFile = self.input(a.waves.as_deref(), ("waves.json", defaults::WAVES_JSON))?;
        let loads: LoadFile = self.input(a.loads.as_deref(), ("loads.json", defaults::LOADS_JSON))?;
        let soil: Option<SoilProfile> = match a.support {
            Support::Spring => Some(self.input(a.soil.as_deref(), ("soil.json", defaults::SOIL_JSON))?),
            Support::Fixed => None,
        };
        let cs_table = match &a.cs_table {
            Some(p) => {
                self.manifest.input_file(p)?;
                Some(CsTable::from_file(p)?)
            }
            None => None,
        };
        ScenarioInputs {
            waves,
            loads,
            soil,
            cs_table,
            combination: a.combination.clone(),
            water_level: a.water_level.clone(),
            support: a.support,
            char_size: a.char_size,
        }
        .build()
    }

    fn ga_config(&mut self, path: Option<&Path>) -> Result<GaConfig> {
        let cfg: GaConfig = self.input(path, ("ga.json", defaults::GA_JSON))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn finish(self, path: &Path) -> Result<()> {
        self.manifest.finish(path)
    }
}

/// `<dir>/<stem>.manifest.json` beside a single output file.
fn manifest_beside(file: &Path) -> PathBuf {
    let stem = file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    file.with_file_name(format!("{stem}.manifest.json"))
}

fn stem_label(path: &Path) -> String {
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.split('.').next().unwrap_or("model").to_string()
}

fn gen(mut ctx: Ctx, a: GenArgs) -> Result<()> {
    let base = ctx.model(&a.model)?;
    match &a.batch {
        None => {
            let mesh = generate_mesh(&base, a.char_size)?;
            let out = ctx.out_file("mesh.json");
            ctx.write(&out, mesh.to_json().as_bytes())?;
            ctx.finish(&manifest_beside(&out))
        }
        Some(batch) => {
            let cfg = ctx.ga_config(a.ga.as_deref())?;
            ctx.manifest.input_file(batch)?;
            let maps: Vec<BTreeMap<String, f64>> = read_json(batch)?;
            let vectors = maps
                .iter()
                .map(|m| vector_from_map(&cfg.grid, m))
                .collect::<Result<Vec<_>>>()?;
            let models = batch_generate(&cfg.grid, &vectors, &base)?;
            let dir = ctx.out_dir("models");
            for (k, p) in models.iter().enumerate() {
                let jct = dir.join(format!("model-{k:03}.jct.json"));
                let sec = dir.join(format!("model-{k:03}.sec.json"));
                ctx.write(&jct, format!("{}\n", p.geometry_json()).as_bytes())?;
                ctx.write(&sec, format!("{}\n", p.sections_json()).as_bytes())?;
            }
            ctx.finish(&dir.join("manifest.json"))
        }
    }
}

fn vector_from_map(grid: &ParameterGrid, m: &BTreeMap<String, f64>) -> Result<Vec<f64>> {
    if let Some(extra) = m.keys().find(|k| grid.position(k).is_none()) {
        return Err(Error::invalid(extra.clone(), "not a grid parameter"));
    }
    grid.params
        .iter()
        .map(|p| {
            m.get(&p.label)
                .copied()
                .ok_or_else(|| Error::invalid(p.label.clone(), "missing from design vector"))
        })
        .collect()
}

fn simulate(mut ctx: Ctx, a: SimulateArgs) -> Result<()> {
    let params = ctx.model(&a.model)?;
    let scenario = ctx.scenario(&a.env)?;
    let result = if a.fields {
        scenario.simulate(&params)?
    } else {
        scenario.evaluate(&params)?
    };
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let record = SimulationRecord {
        label: a.label.unwrap_or_else(|| stem_label(&a.model.model)),
        support: a.env.support,
        water_level: a.env.water_level.clone(),
        combination: a.env.combination.clone(),
        char_size: a.env.char_size,
        rotation: a.env.rotation,
        result,
    };
    let out = ctx.out_file("result.json");
    ctx.write_json(&out, &record)?;
    ctx.finish(&manifest_beside(&out))
}

/// Default range of a scalar sweep.
fn default_range(kind: SweepKind) -> (f64, f64, f64) {
    match kind {
        SweepKind::PL => (1400.0, 5900.0, 500.0),
        _ => (22500.0, 40000.0, 2500.0),
    }
}

fn sweep_csv(tables: &[SweepTable], rotation: RotationMeasure) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "kind",
        "point",
        "value",
        "baseline",
        "mass_t",
        "max_stress_mpa",
        "u_max_mm",
        "u_top_mm",
        "u_mudline_mm",
        "phi_top_deg",
        "phi_mudline_deg",
        "status",
    ])
    .expect("in-memory write");
    for t in tables {
        for r in &t.rows {
            let mut rec = vec![
                t.kind.name().to_string(),
                r.label.clone(),
                r.value.map(|v| v.to_string()).unwrap_or_default(),
                r.is_baseline.to_string(),
                r.mass_t.map(|m| m.to_string()).unwrap_or_default(),
            ];
            match &r.result {
                Some(s) => rec.extend(
                    [
                        s.max_stress_mpa,
                        s.u_overall_mm,
                        s.u_top_mm,
                        s.u_mudline_mm,
                        s.phi_top(rotation),
                        s.phi_mudline(rotation),
                    ]
                    .iter()
                    .map(|v| v.to_string()),
                ),
                None => rec.extend(std::iter::repeat_n(String::new(), 6)),
            }
            rec.push(r.status.clone());
            w.write_record(&rec).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
}

fn sweep(mut ctx: Ctx, a: SweepArgs) -> Result<()> {
    let base = ctx.model(&a.model)?;
    let scenario = ctx.scenario(&a.env)?;
    let combos: CombinationFile = ctx.input(
        a.combinations.as_deref(),
        ("combinations.json", defaults::COMBINATIONS_JSON),
    )?;
    let selection = match &a.select {
        Some(p) => {
            ctx.manifest.input_file(p)?;
            Some(Selection::from_file(p)?)
        }
        None => None,
    };
    let kinds: Vec<SweepKind> = if a.kind == "all" {
        SweepKind::ALL.to_vec()
    } else {
        vec![a.kind.parse()?]
    };
    if kinds.len() > 1 && (a.from.is_some() || a.to.is_some() || a.step.is_some()) {
        return Err(Error::invalid("from/to/step", "apply to a single PL or BW sweep"));
    }
    let specs = kinds
        .iter()
        .map(|&k| {
            if k.is_scalar() {
                let (f, t, s) = default_range(k);
                SweepSpec::range(k, a.from.unwrap_or(f), a.to.unwrap_or(t), a.step.unwrap_or(s))
            } else {
                SweepSpec::combinations(k, &combos)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let tables = specs
        .iter()
        .map(|s| run_sweep(&base, s, &scenario, ctx.workers))
        .collect::<Result<Vec<_>>>()?;
    let gradients = fit_gradients(&tables, a.env.rotation);

    let dir = ctx.out_dir("sweep");
    ctx.write(&dir.join("sweep.csv"), sweep_csv(&tables, a.env.rotation).as_bytes())?;
    ctx.write_json(&dir.join("gradients.json"), &gradients)?;

    if let Some(sel) = selection {
        let points = sel.points(&combos)?;
        let deltas = points
            .iter()
            .map(|(k, p)| Ok((*k, mass_delta(&base, *k, p)?)))
            .collect::<Result<Vec<_>>>()?;
        let (fitted, not_estimated): (Vec<_>, Vec<_>) =
            deltas.iter().partition(|(k, _)| gradients.get(*k).is_some());
        let estimate = estimate_changes(&gradients, &fitted)?;
        let selected = sel.apply(&base, &combos)?;
        let b = scenario.evaluate(&base)?;
        let s = scenario.evaluate(&selected)?;
        let br = Responses::from_result(&b, a.env.rotation);
        let sr = Responses::from_result(&s, a.env.rotation);
        let check = check_responses(&sr, a.strategy, Some(&br), &CodeLimits::default())?;
        let doc = serde_json::json!({
            "selection": sel,
            "mass_deltas_t": deltas.iter().map(|(k, d)| (k.name(), *d)).collect::<BTreeMap<_, _>>(),
            "estimated_change": estimate,
            "not_estimated": not_estimated.iter().map(|(k, _)| k.name()).collect::<Vec<_>>(),
            "baseline": { "mass_t": base.mass_tonnes(), "responses": br, "u_max_mm": b.u_overall_mm },
            "simulated": { "mass_t": selected.mass_tonnes(), "responses": sr, "u_max_mm": s.u_overall_mm },
            "check": check,
        });
        ctx.write_json(&dir.join("estimate.json"), &doc)?;
        ctx.write(&dir.join("selected.jct.json"), format!("{}\n", selected.geometry_json()).as_bytes())?;
        ctx.write(&dir.join("selected.sec.json"), format!("{}\n", selected.sections_json()).as_bytes())?;
    }
    ctx.finish(&dir.join("manifest.json"))
}

fn history_csv(run: &GaRun) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head: Vec<String> = [
        "generation",
        "best_fitness",
        "mean_fitness",
        "best_mass_t",
        "best_failed",
        "evaluations",
        "feasible",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let quantities: Vec<Quantity> = run
        .history
        .iter()
        .find_map(|h| h.best_check.as_ref())
        .map(|c| c.constraints.iter().map(|k| k.quantity).collect())
        .unwrap_or_default();
    head.extend(quantities.iter().map(|q| format!("margin_{}", q.name())));
    w.write_record(&head).expect("in-memory write");
    for h in &run.history {
        let mut rec = vec![
            h.generation.to_string(),
            h.best_fitness.to_string(),
            h.mean_fitness.to_string(),
            h.best_mass_t.to_string(),
            h.best_failed.to_string(),
            h.evaluations.to_string(),
            h.best_check.as_ref().is_some_and(|c| c.feasible).to_string(),
        ];
        for q in &quantities {
            rec.push(
                h.best_check
                    .as_ref()
                    .and_then(|c| c.constraints.iter().find(|k| k.quantity == *q))
                    .map(|k| k.margin.to_string())
                    .unwrap_or_default(),
            );
        }
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
}

fn deviations_csv(report: &crate::ga::DeviationReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head = vec!["generation".to_string()];
    head.extend(report.labels.iter().cloned());
    w.write_record(&head).expect("in-memory write");
    for (g, row) in report.traces.iter().enumerate() {
        let mut rec = vec![g.to_string()];
        rec.extend(row.iter().map(|s| s.map(|v| v.to_string()).unwrap_or_default()));
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
}

fn optimize(mut ctx: Ctx, a: OptimizeArgs) -> Result<()> {
    let base = ctx.model(&a.model)?;
    let scenario = ctx.scenario(&a.env)?;
    let mut cfg = ctx.ga_config(a.ga.as_deref())?;
    if let Some(s) = a.strategy {
        cfg.strategy = s;
    }
    if let Some(n) = a.attempts {
        cfg.attempts = n;
    }
    if let Some(n) = a.pop {
        cfg.n_pop = n;
    }
    if let Some(n) = a.generations {
        cfg.max_generations = n;
    }
    if let Some(s) = ctx.seed {
        cfg.seed = s;
    }
    cfg.rotation = a.env.rotation;
    cfg.validate()?;

    let baseline = scenario.evaluate(&base)?;
    let base_resp = Responses::from_result(&baseline, cfg.rotation);
    let x0_values = cfg.grid.values_of(&base)?;
    let evaluator = FemEvaluator::new(cfg.grid.clone(), base.clone(), scenario, cfg.rotation)?;
    let problem = Problem {
        evaluator: &evaluator,
        baseline: Some(base_resp),
        injected: Some(evaluator.baseline_chromosome()?),
    };
    let label = a
        .label
        .unwrap_or_else(|| format!("GA-st{}", cfg.strategy.number()));
    let dir = ctx.out_dir("run");
    let base_mass = base.mass_tonnes();

    let mut attempts = Vec::new();
    for k in 0..cfg.attempts {
        let seed = cfg.attempt_seed(k);
        let run = evolve(&cfg, &problem, seed, ctx.workers)?;
        let sub = if cfg.attempts == 1 {
            dir.clone()
        } else {
            dir.join(format!("attempt-{}", k + 1))
        };
        let best = evaluator.model(&run.best)?;
        let dev = parameter_deviation_report(&run.history, &cfg.grid, &x0_values)?;
        ctx.write(&sub.join("ga_history.csv"), history_csv(&run).as_bytes())?;
        ctx.write(&sub.join("deviations.csv"), deviations_csv(&dev).as_bytes())?;
        ctx.write(&sub.join("best.jct.json"), format!("{}\n", best.geometry_json()).as_bytes())?;
        ctx.write(&sub.join("best.sec.json"), format!("{}\n", best.sections_json()).as_bytes())?;
        let mass_t = run.best_evaluation.mass_t;
        attempts.push(AttemptSummary {
            attempt: k + 1,
            seed,
            generations: run.history.len(),
            stop: run.stop,
            evaluations: run.evaluations,
            best_fitness: run.best_fitness,
            mass_t,
            mass_reduction_pct: 100.0 * (base_mass - mass_t) / base_mass,
            responses: run.best_evaluation.responses,
            feasible: run.best_check.as_ref().is_some_and(|c| c.feasible),
            check: run.best_check.clone(),
            values: cfg.grid.named(&run.best_values),
            flagged: dev
                .labels
                .iter()
                .zip(&dev.flagged)
                .filter(|(_, &f)| f)
                .map(|(l, _)| l.clone())
                .collect(),
            fitness: run
                .history
                .iter()
                .map(|h| FitnessPoint {
                    generation: h.generation,
                    best: h.best_fitness,
                    mean: h.mean_fitness,
                })
                .collect(),
        });
    }
    let summary = OptimizationSummary {
        label,
        strategy: cfg.strategy,
        rotation: cfg.rotation,
        baseline_mass_t: base_mass,
        baseline: base_resp,
        best_attempt: OptimizationSummary::pick_best(&attempts),
        attempts,
    };
    ctx.write_json(&dir.join("summary.json"), &summary)?;
    ctx.finish(&dir.join("manifest.json"))
}

fn report(mut ctx: Ctx, a: ReportArgs) -> Result<()> {
    let mut rows = Vec::new();
    let mut curves = Vec::new();
    for p in &a.inputs {
        ctx.manifest.input_file(p)?;
        let l = load(p)?;
        rows.extend(l.rows);
        curves.extend(l.curves);
    }
    let baseline = match &a.baseline {
        Some(p) => {
            ctx.manifest.input_file(p)?;
            let l = load(p)?;
            let first = l.rows.into_iter().next().ok_or_else(|| {
                Error::invalid("baseline", format!("{} holds no result", p.display()))
            })?;
            Some(first.responses)
        }
        None => None,
    };
    let table = compare(rows, a.strategy, baseline.as_ref(), &CodeLimits::default())?;
    let dir = ctx.out_dir("report");
    ctx.write(&dir.join("report.csv"), table.to_csv().as_bytes())?;
    ctx.write(&dir.join("report.md"), table.to_markdown().as_bytes())?;
    ctx.write(&dir.join("margins.csv"), table.margins_csv().as_bytes())?;
    if !curves.is_empty() {
        ctx.write(&dir.join("fitness.csv"), fitness_csv(&curves).as_bytes())?;
    }
    ctx.finish(&dir.join("manifest.json"))
}
