//! Genetic algorithm over the discrete section grid: binary tournament,
//! uniform crossover, rank-based adaptive mutation, 1-elitism and a static
//! penalty on constraint violations.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constraints::{check_responses, CodeLimits, Responses, Strategy, StrategyCheck};
use crate::design::{DesignVector, GridParam, ParameterGrid};
use crate::error::{Error, Result};
use crate::exec;
use crate::fem::RotationMeasure;
use crate::model::JacketParams;
use crate::scenario::Scenario;

/// Which end of the fitness ranking gets rank 1 in the mutation schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RankDirection {
    /// Rank 1 is the worst chromosome, which mutates most.
    #[default]
    WorstFirst,
    BestFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyMode {
    /// Violations in their own units (MPa, mm, degrees).
    #[default]
    Literal,
    /// Violations divided by their limits.
    Normalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub n_pop: usize,
    pub p_crossover: f64,
    pub p_mutation_max: f64,
    pub penalty: f64,
    #[serde(default)]
    pub penalty_mode: PenaltyMode,
    pub stall_generations: usize,
    pub max_generations: usize,
    pub seed: u64,
    pub workers: usize,
    pub strategy: Strategy,
    #[serde(default = "one")]
    pub attempts: usize,
    #[serde(default)]
    pub rank_direction: RankDirection,
    #[serde(default)]
    pub rotation: RotationMeasure,
    #[serde(default)]
    pub limits: CodeLimits,
    pub grid: ParameterGrid,
}

fn one() -> usize {
    1
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, reason: &str| Err(Error::invalid(name, reason));
        if self.n_pop < 2 {
            return bad("n_pop", "population needs at least two chromosomes");
        }
        if !(0.0..=1.0).contains(&self.p_crossover) {
            return bad("p_crossover", "must lie in [0, 1]");
        }
        if !(self.p_mutation_max > 0.0 && self.p_mutation_max <= 1.0) {
            return bad("p_mutation_max", "must lie in (0, 1]");
        }
        if self.stall_generations < 1 {
            return bad("stall_generations", "must be at least 1");
        }
        if self.max_generations < 1 {
            return bad("max_generations", "must be at least 1");
        }
        if !(self.penalty >= 0.0) {
            return bad("penalty", "must be non-negative");
        }
        if self.attempts < 1 {
            return bad("attempts", "must be at least 1");
        }
        self.grid.validate()?;
        if self.grid.is_empty() {
            return bad("grid", "no parameters");
        }
        Ok(())
    }

    /// Seed of attempt `k` (0-based).
    pub fn attempt_seed(&self, k: usize) -> u64 {
        self.seed.wrapping_add(k as u64)
    }
}

/// Linear rank schedule: P_m_max at rank 1 down to 0 at rank nPop.
pub fn rank_mutation_probability(rank: usize, n_pop: usize, p_max: f64) -> f64 {
    assert!(rank >= 1 && rank <= n_pop.max(1), "rank {rank} outside 1..={n_pop}");
    if n_pop <= 1 {
        return p_max;
    }
    p_max * (1.0 - (rank - 1) as f64 / (n_pop - 1) as f64)
}

/// Outcome of evaluating one chromosome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub mass_t: f64,
    pub responses: Option<Responses>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

pub trait Evaluator: Sync {
    fn grid(&self) -> &ParameterGrid;

    fn evaluate(&self, x: &DesignVector) -> Evaluation;

    /// Mass of the heaviest design on the grid; scales the sentinel
    /// fitness of failed evaluations.
    fn mass_upper_bound(&self) -> f64;
}

/// Designs evaluated by a full simulation.
pub struct FemEvaluator {
    pub grid: ParameterGrid,
    pub baseline: JacketParams,
    pub scenario: Scenario,
    pub rotation: RotationMeasure,
}

impl FemEvaluator {
    pub fn new(
        grid: ParameterGrid,
        baseline: JacketParams,
        scenario: Scenario,
        rotation: RotationMeasure,
    ) -> Result<Self> {
        grid.check_targets(&baseline)?;
        Ok(FemEvaluator {
            grid,
            baseline,
            scenario,
            rotation,
        })
    }

    pub fn model(&self, x: &DesignVector) -> Result<JacketParams> {
        self.grid.model(&self.baseline, x)
    }

    /// The baseline snapped to the nearest grid point of every parameter.
    pub fn baseline_chromosome(&self) -> Result<DesignVector> {
        Ok(self.grid.snap(&self.grid.values_of(&self.baseline)?))
    }
}

impl Evaluator for FemEvaluator {
    fn grid(&self) -> &ParameterGrid {
        &self.grid
    }

    fn evaluate(&self, x: &DesignVector) -> Evaluation {
        let p = match self.model(x) {
            Ok(p) => p,
            Err(e) => {
                return Evaluation {
                    mass_t: 0.0,
                    responses: None,
                    failure: Some(e.to_string()),
                }
            }
        };
        let mass_t = p.mass_tonnes();
        match self.scenario.evaluate(&p) {
            Ok(r) => Evaluation {
                mass_t,
                responses: Some(Responses::from_result(&r, self.rotation)),
                failure: None,
            },
            Err(e) => Evaluation {
                mass_t,
                responses: None,
                failure: Some(e.to_string()),
            },
        }
    }

    fn mass_upper_bound(&self) -> f64 {
        let top = DesignVector(self.grid.params.iter().map(|p| p.count() - 1).collect());
        self.model(&top)
            .map(|p| p.mass_tonnes())
            .unwrap_or_else(|_| self.baseline.mass_tonnes())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fitness {
    pub value: f64,
    /// Σ gᵢ in the units used by the penalty.
    pub violation: f64,
    pub failed: bool,
}

/// Penalised fitness m + Σ c·gᵢ of an evaluated chromosome.
pub fn fitness(
    eval: &Evaluation,
    strategy: Strategy,
    baseline: Option<&Responses>,
    limits: &CodeLimits,
    penalty: f64,
    mode: PenaltyMode,
    sentinel: f64,
) -> Result<Fitness> {
    let Some(r) = &eval.responses else {
        return Ok(Fitness {
            value: sentinel,
            violation: f64::INFINITY,
            failed: true,
        });
    };
    let check = check_responses(r, strategy, baseline, limits)?;
    let violation: f64 = check
        .constraints
        .iter()
        .map(|c| match mode {
            PenaltyMode::Literal => c.violation(),
            PenaltyMode::Normalized if c.limit != 0.0 => c.violation() / c.limit.abs(),
            PenaltyMode::Normalized => c.violation(),
        })
        .sum();
    Ok(Fitness {
        value: eval.mass_t + penalty * violation,
        violation,
        failed: false,
    })
}

/// Best chromosome of one generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best: DesignVector,
    pub best_values: Vec<f64>,
    pub best_mass_t: f64,
    pub best_failed: bool,
    /// Strict verdicts and margins of the best; absent if its solve failed.
    pub best_check: Option<StrategyCheck>,
    /// Distinct chromosomes evaluated so far.
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Stall,
    GenerationCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaRun {
    pub seed: u64,
    pub strategy: Strategy,
    pub history: Vec<GenerationRecord>,
    pub best: DesignVector,
    pub best_values: Vec<f64>,
    pub best_fitness: f64,
    pub best_evaluation: Evaluation,
    pub best_check: Option<StrategyCheck>,
    pub stop: StopReason,
    pub evaluations: usize,
    pub sentinel: f64,
}

/// Everything `evolve` needs besides the settings.
pub struct Problem<'a> {
    pub evaluator: &'a dyn Evaluator,
    /// Responses of X₀ for strategies that compare against it.
    pub baseline: Option<Responses>,
    /// Chromosome placed at index 0 of the initial population.
    pub injected: Option<DesignVector>,
}

struct Breeder<'a> {
    grid: &'a ParameterGrid,
    cfg: &'a GaConfig,
    rng: ChaCha8Rng,
}

impl Breeder<'_> {
    fn random(&mut self) -> DesignVector {
        let p = &self.grid.params;
        DesignVector(p.iter().map(|g| self.rng.random_range(0..g.count())).collect())
    }

    fn tournament(&mut self, position: &[usize]) -> usize {
        let n = position.len();
        let a = self.rng.random_range(0..n);
        let b = self.rng.random_range(0..n);
        if position[a] <= position[b] {
            a
        } else {
            b
        }
    }

    fn crossover(&mut self, a: &mut DesignVector, b: &mut DesignVector) {
        if self.rng.random_bool(self.cfg.p_crossover) {
            for (x, y) in a.0.iter_mut().zip(b.0.iter_mut()) {
                if self.rng.random_bool(0.5) {
                    std::mem::swap(x, y);
                }
            }
        }
    }

    fn mutate(&mut self, x: &mut DesignVector, p_m: f64) {
        for (gene, g) in x.0.iter_mut().zip(&self.grid.params) {
            if self.rng.random_bool(p_m) {
                *gene = self.rng.random_range(0..g.count());
            }
        }
    }

    fn rank(&self, position: usize) -> usize {
        match self.cfg.rank_direction {
            RankDirection::WorstFirst => self.cfg.n_pop - position,
            RankDirection::BestFirst => position + 1,
        }
    }
}

/// One seeded GA run. Genetic operators consume a single RNG stream in a
/// sequential phase; evaluations are dispatched to `workers` threads and
/// joined by chromosome index, so the worker count does not affect results.
pub fn evolve(cfg: &GaConfig, problem: &Problem, seed: u64, workers: usize) -> Result<GaRun> {
    cfg.validate()?;
    let grid = problem.evaluator.grid();
    if cfg.strategy.needs_baseline() && problem.baseline.is_none() {
        return Err(Error::Config(format!(
            "strategy {} needs baseline responses",
            cfg.strategy.number()
        )));
    }
    let n = cfg.n_pop;
    let sentinel = 10.0 * problem.evaluator.mass_upper_bound();
    let mut br = Breeder {
        grid,
        cfg,
        rng: ChaCha8Rng::seed_from_u64(seed),
    };

    let mut pop: Vec<DesignVector> = Vec::with_capacity(n);
    if let Some(x) = &problem.injected {
        if x.0.len() != grid.len() || x.0.iter().zip(&grid.params).any(|(&i, g)| i >= g.count()) {
            return Err(Error::invalid("injected chromosome", "does not match the grid"));
        }
        pop.push(x.clone());
    }
    while pop.len() < n {
        pop.push(br.random());
    }

    let mut cache: HashMap<DesignVector, Evaluation> = HashMap::new();
    let mut history: Vec<GenerationRecord> = Vec::new();
    let mut stall = 0;
    let stop;
    loop {
        let mut todo: Vec<DesignVector> = Vec::new();
        for x in &pop {
            if !cache.contains_key(x) && !todo.contains(x) {
                todo.push(x.clone());
            }
        }
        let fresh = exec::map_indexed(&todo, workers, |_, x| problem.evaluator.evaluate(x));
        cache.extend(todo.into_iter().zip(fresh));

        let fits: Vec<Fitness> = pop
            .iter()
            .map(|x| {
                fitness(
                    &cache[x],
                    cfg.strategy,
                    problem.baseline.as_ref(),
                    &cfg.limits,
                    cfg.penalty,
                    cfg.penalty_mode,
                    sentinel,
                )
            })
            .collect::<Result<_>>()?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| fits[a].value.total_cmp(&fits[b].value).then(a.cmp(&b)));
        let mut position = vec![0; n];
        for (k, &i) in order.iter().enumerate() {
            position[i] = k;
        }
        let best = order[0];
        let eval = &cache[&pop[best]];
        let check = match &eval.responses {
            Some(r) => Some(check_responses(
                r,
                cfg.strategy,
                problem.baseline.as_ref(),
                &cfg.limits,
            )?),
            None => None,
        };
        let best_fitness = fits[best].value;
        if let Some(prev) = history.last() {
            if prev.best_fitness == best_fitness {
                stall += 1;
            } else {
                stall = 0;
            }
        }
        history.push(GenerationRecord {
            generation: history.len(),
            best_fitness,
            mean_fitness: fits.iter().map(|f| f.value).sum::<f64>() / n as f64,
            best: pop[best].clone(),
            best_values: grid.decode(&pop[best]),
            best_mass_t: eval.mass_t,
            best_failed: fits[best].failed,
            best_check: check,
            evaluations: cache.len(),
        });
        if stall >= cfg.stall_generations {
            stop = StopReason::Stall;
            break;
        }
        if history.len() >= cfg.max_generations {
            stop = StopReason::GenerationCap;
            break;
        }

        let mut next = vec![pop[best].clone()];
        while next.len() < n {
            let i = br.tournament(&position);
            let j = br.tournament(&position);
            let (mut a, mut b) = (pop[i].clone(), pop[j].clone());
            br.crossover(&mut a, &mut b);
            let pa = rank_mutation_probability(br.rank(position[i]), n, cfg.p_mutation_max);
            let pb = rank_mutation_probability(br.rank(position[j]), n, cfg.p_mutation_max);
            br.mutate(&mut a, pa);
            br.mutate(&mut b, pb);
            next.push(a);
            if next.len() < n {
                next.push(b);
            }
        }
        pop = next;
    }

    let last = history.last().expect("at least one generation");
    Ok(GaRun {
        seed,
        strategy: cfg.strategy,
        best: last.best.clone(),
        best_values: last.best_values.clone(),
        best_fitness: last.best_fitness,
        best_evaluation: cache[&last.best].clone(),
        best_check: last.best_check.clone(),
        stop,
        evaluations: cache.len(),
        sentinel,
        history,
    })
}

/// σᵢ = (Xᵢ − Xᵢ,₀)/Xᵢ,₀, undefined for a zero baseline value.
pub fn sigma(x: f64, x0: f64) -> Option<f64> {
    (x0 != 0.0).then(|| (x - x0) / x0)
}

/// Threshold on |σᵢ| above which a parameter change is flagged.
pub const SIGMA_FLAG: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub labels: Vec<String>,
    pub baseline: Vec<f64>,
    /// Per generation, per parameter.
    pub traces: Vec<Vec<Option<f64>>>,
    pub last: Vec<Option<f64>>,
    pub flagged: Vec<bool>,
}

pub fn parameter_deviation_report(
    history: &[GenerationRecord],
    grid: &ParameterGrid,
    baseline: &[f64],
) -> Result<DeviationReport> {
    if history.is_empty() {
        return Err(Error::invalid("history", "no generations recorded"));
    }
    let traces: Vec<Vec<Option<f64>>> = history
        .iter()
        .map(|h| {
            h.best_values
                .iter()
                .zip(baseline)
                .map(|(&x, &x0)| sigma(x, x0))
                .collect()
        })
        .collect();
    let last = traces.last().cloned().unwrap_or_default();
    let flagged = last
        .iter()
        .map(|s| s.is_some_and(|s| s.abs() >= SIGMA_FLAG - 1e-12))
        .collect();
    Ok(DeviationReport {
        labels: grid.labels().iter().map(|s| s.to_string()).collect(),
        baseline: baseline.to_vec(),
        traces,
        last,
        flagged,
    })
}

/// Six-parameter surrogate with analytic mass Σ wᵢxᵢ and a single
/// stress-like response Σ aᵢ/xᵢ, small enough to enumerate.
pub struct ToyProblem {
    pub grid: ParameterGrid,
    pub weights: [f64; 6],
    pub coeffs: [f64; 6],
}

impl Default for ToyProblem {
    fn default() -> Self {
        let grid = ParameterGrid {
            params: ["A", "B", "C", "D", "E", "F"]
                .iter()
                .map(|g| GridParam::new(&format!("{g}-t"), 1.0, 6.0, 1.0))
                .collect(),
        };
        ToyProblem {
            grid,
            weights: [1.0, 1.3, 0.7, 1.9, 1.1, 1.6],
            coeffs: [6.0, 4.0, 9.0, 3.0, 5.0, 7.0],
        }
    }
}

impl ToyProblem {
    pub const STRESS_LIMIT: f64 = 10.0;

    pub fn limits() -> CodeLimits {
        CodeLimits {
            stress_mpa: Self::STRESS_LIMIT,
            u_top_mm: 1.0,
            phi_top_deg: 1.0,
            phi_mudline_deg: 1.0,
        }
    }

    fn values(&self, x: &DesignVector) -> Vec<f64> {
        self.grid.decode(x)
    }

    pub fn mass(&self, x: &DesignVector) -> f64 {
        self.values(x).iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    pub fn stress(&self, x: &DesignVector) -> f64 {
        self.values(x).iter().zip(&self.coeffs).map(|(v, a)| a / v).sum()
    }

    /// Lightest chromosome meeting the stress limit, by enumeration.
    pub fn exhaustive_optimum(&self) -> (DesignVector, f64) {
        let counts: Vec<usize> = self.grid.params.iter().map(|p| p.count()).collect();
        let mut idx = vec![0usize; counts.len()];
        let mut best: Option<(DesignVector, f64)> = None;
        loop {
            let x = DesignVector(idx.clone());
            if self.stress(&x) < Self::STRESS_LIMIT {
                let m = self.mass(&x);
                if best.as_ref().is_none_or(|(_, b)| m < *b) {
                    best = Some((x, m));
                }
            }
            let mut k = 0;
            loop {
                if k == idx.len() {
                    return best.expect("some chromosome is feasible");
                }
                idx[k] += 1;
                if idx[k] < counts[k] {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

impl Evaluator for ToyProblem {
    fn grid(&self) -> &ParameterGrid {
        &self.grid
    }

    fn evaluate(&self, x: &DesignVector) -> Evaluation {
        Evaluation {
            mass_t: self.mass(x),
            responses: Some(Responses {
                stress_mpa: self.stress(x),
                u_top_mm: 0.0,
                u_mudline_mm: 0.0,
                phi_top_deg: 0.0,
                phi_mudline_deg: 0.0,
            }),
            failure: None,
        }
    }

    fn mass_upper_bound(&self) -> f64 {
        let top = DesignVector(self.grid.params.iter().map(|p| p.count() - 1).collect());
        self.mass(&top)
    }
}

/// GA settings for the toy surrogate.
pub fn toy_config(seed: u64) -> GaConfig {
    GaConfig {
        note: None,
        n_pop: 60,
        p_crossover: 0.4,
        p_mutation_max: 0.8,
        penalty: 1e5,
        penalty_mode: PenaltyMode::Literal,
        stall_generations: 60,
        max_generations: 300,
        seed,
        workers: 1,
        strategy: Strategy::CodeLimits,
        attempts: 1,
        rank_direction: RankDirection::WorstFirst,
        rotation: RotationMeasure::Tilt,
        limits: ToyProblem::limits(),
        grid: ToyProblem::default().grid,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(seed: u64, workers: usize) -> GaRun {
        let toy = ToyProblem::default();
        let problem = Problem {
            evaluator: &toy,
            baseline: None,
            injected: None,
        };
        evolve(&toy_config(seed), &problem, seed, workers).unwrap()
    }

    #[test]
    fn mutation_schedule_endpoints() {
        assert_eq!(rank_mutation_probability(1, 60, 0.8), 0.8);
        assert_eq!(rank_mutation_probability(60, 60, 0.8), 0.0);
        approx::assert_relative_eq!(
            rank_mutation_probability(30, 60, 0.8),
            0.8 * (1.0 - 29.0 / 59.0),
            max_relative = 1e-15
        );
        assert_eq!(rank_mutation_probability(1, 1, 0.5), 0.5);
    }

    #[test]
    #[should_panic]
    fn mutation_schedule_rank_out_of_range() {
        rank_mutation_probability(61, 60, 0.8);
    }

    #[test]
    fn penalised_fitness() {
        let eval = Evaluation {
            mass_t: 1500.0,
            responses: Some(Responses {
                stress_mpa: 360.0,
                u_top_mm: 100.0,
                u_mudline_mm: 20.0,
                phi_top_deg: 0.4,
                phi_mudline_deg: 0.1,
            }),
            failure: None,
        };
        let lim = CodeLimits::default();
        let f = fitness(&eval, Strategy::CodeLimits, None, &lim, 1e5, PenaltyMode::Literal, 1e9)
            .unwrap();
        let g = (360.0 - 355.0) + (0.4 - 0.3819);
        approx::assert_relative_eq!(f.violation, g, max_relative = 1e-12);
        approx::assert_relative_eq!(f.value, 1500.0 + 1e5 * g, max_relative = 1e-12);

        let f = fitness(&eval, Strategy::CodeLimits, None, &lim, 1e5, PenaltyMode::Normalized, 1e9)
            .unwrap();
        let g = 5.0 / 355.0 + (0.4 - 0.3819) / 0.3819;
        approx::assert_relative_eq!(f.violation, g, max_relative = 1e-12);

        let failed = Evaluation {
            mass_t: 1.0,
            responses: None,
            failure: Some("x".into()),
        };
        let f = fitness(&failed, Strategy::CodeLimits, None, &lim, 1e5, PenaltyMode::Literal, 7.0)
            .unwrap();
        assert!(f.failed);
        assert_eq!(f.value, 7.0);
    }

    #[test]
    fn feasible_design_has_bare_mass() {
        let toy = ToyProblem::default();
        let x = DesignVector(vec![5; 6]);
        let e = toy.evaluate(&x);
        let f = fitness(&e, Strategy::CodeLimits, None, &ToyProblem::limits(), 1e5, PenaltyMode::Literal, 1e9)
            .unwrap();
        assert_eq!(f.violation, 0.0);
        assert_eq!(f.value, toy.mass(&x));
    }

    #[test]
    fn same_seed_same_run() {
        let a = run(3, 1);
        let b = run(3, 1);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn worker_count_does_not_change_run() {
        let a = run(11, 1);
        let b = run(11, 4);
        assert_eq!(a, b);
    }

    #[test]
    fn elitism_keeps_best_fitness_monotone() {
        let r = run(5, 1);
        for w in r.history.windows(2) {
            assert!(w[1].best_fitness <= w[0].best_fitness);
        }
        assert_eq!(r.best_fitness, r.history.last().unwrap().best_fitness);
    }

    #[test]
    fn stall_and_cap_stop_rules() {
        let toy = ToyProblem::default();
        let problem = Problem {
            evaluator: &toy,
            baseline: None,
            injected: None,
        };
        let mut cfg = toy_config(1);
        cfg.max_generations = 3;
        let r = evolve(&cfg, &problem, 1, 1).unwrap();
        assert_eq!(r.history.len(), 3);
        assert_eq!(r.stop, StopReason::GenerationCap);

        let r = run(1, 1);
        assert_eq!(r.stop, StopReason::Stall);
        let tail = &r.history[r.history.len() - 61..];
        assert!(tail.iter().all(|h| h.best_fitness == tail[0].best_fitness));
    }

    #[test]
    fn injected_chromosome_is_evaluated_first() {
        let toy = ToyProblem::default();
        let (opt, mass) = toy.exhaustive_optimum();
        let problem = Problem {
            evaluator: &toy,
            baseline: None,
            injected: Some(opt.clone()),
        };
        let r = evolve(&toy_config(2), &problem, 2, 1).unwrap();
        assert_eq!(r.history[0].best, opt);
        assert_eq!(r.best_fitness, mass);

        let bad = Problem {
            evaluator: &toy,
            baseline: None,
            injected: Some(DesignVector(vec![9; 6])),
        };
        assert!(evolve(&toy_config(2), &bad, 2, 1).is_err());
    }

    #[test]
    fn baseline_required_for_relative_strategies() {
        let toy = ToyProblem::default();
        let problem = Problem {
            evaluator: &toy,
            baseline: None,
            injected: None,
        };
        let mut cfg = toy_config(1);
        cfg.strategy = Strategy::BelowBaseline;
        assert!(matches!(evolve(&cfg, &problem, 1, 1), Err(Error::Config(_))));
    }

    #[test]
    fn toy_optimum_is_found() {
        let toy = ToyProblem::default();
        let (opt, mass) = toy.exhaustive_optimum();
        let hits = (0..10).filter(|&s| run(s, 1).best == opt).count();
        assert!(hits >= 9, "{hits}/10 seeds reached the optimum of mass {mass}");
    }

    #[test]
    fn deviation_flags() {
        let grid = ParameterGrid {
            params: vec![GridParam::new("A-t", 10.0, 100.0, 10.0), GridParam::new("B-t", 10.0, 100.0, 10.0)],
        };
        let rec = |v: Vec<f64>| GenerationRecord {
            generation: 0,
            best_fitness: 0.0,
            mean_fitness: 0.0,
            best: DesignVector(vec![0, 0]),
            best_values: v,
            best_mass_t: 0.0,
            best_failed: false,
            best_check: None,
            evaluations: 0,
        };
        let d = parameter_deviation_report(&[rec(vec![50.0, 50.0]), rec(vec![70.0, 40.0])], &grid, &[50.0, 50.0])
            .unwrap();
        assert_eq!(d.traces[0], vec![Some(0.0), Some(0.0)]);
        approx::assert_relative_eq!(d.last[0].unwrap(), 0.4, max_relative = 1e-12);
        assert_eq!(d.flagged, vec![true, false]);
        assert_eq!(sigma(1.0, 0.0), None);
        assert!(parameter_deviation_report(&[], &grid, &[50.0, 50.0]).is_err());
    }

    #[test]
    fn shipped_config_is_valid() {
        let cfg = crate::defaults::ga_config();
        cfg.validate().unwrap();
        assert_eq!(cfg.grid.len(), 48);
        cfg.grid.check_targets(&crate::defaults::original_params()).unwrap();
    }
}
