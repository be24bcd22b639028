use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::crowding::{crowding_distance, dcd_trim};
use super::hypervolume::hypervolume;
use super::operators::{polynomial_mutation, sbx_crossover};
use super::sort::{dominates, fast_non_dominated_sort};

/// A box-bounded minimization problem.
///
/// `evaluate` must be a pure function; it is called concurrently.
pub trait Problem: Sync {
    fn bounds(&self) -> Vec<(f64, f64)>;
    fn num_objectives(&self) -> usize;
    fn evaluate(&self, genotype: &[f64]) -> Vec<f64>;
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct GAParams {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_probability: f64,
    /// Defaults to one over the number of genes.
    pub mutation_probability_per_gene: Option<f64>,
    pub eta_c: f64,
    pub eta_m: f64,
    pub seed: u64,
    /// Fixed hypervolume reference point; derived from the initial
    /// population when absent.
    pub reference_point: Option<Vec<f64>>,
}

impl Default for GAParams {
    fn default() -> Self {
        Self {
            population_size: 40,
            generations: 100,
            crossover_probability: 0.9,
            mutation_probability_per_gene: None,
            eta_c: 20.0,
            eta_m: 20.0,
            seed: 42,
            reference_point: None,
        }
    }
}

impl GAParams {
    pub fn check(&self) -> Result<(), EngineError> {
        let fail = |msg: &'static str| Err(EngineError::InvalidParams(msg));
        if self.population_size < 4 || !self.population_size.is_multiple_of(2) {
            return fail("population_size must be even and at least 4");
        }
        if !(0.0..=1.0).contains(&self.crossover_probability) {
            return fail("crossover_probability must lie in [0, 1]");
        }
        if let Some(p) = self.mutation_probability_per_gene {
            if !(0.0..=1.0).contains(&p) {
                return fail("mutation_probability_per_gene must lie in [0, 1]");
            }
        }
        if !(self.eta_c > 0.0) || !(self.eta_m > 0.0) {
            return fail("eta_c and eta_m must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error("invalid GA parameters: {0}")]
    InvalidParams(&'static str),
    #[error("problem has no decision variables or objectives")]
    EmptyProblem,
    #[error("evaluator returned a non-finite objective for genotype {0:?}")]
    NonFinite(Vec<f64>),
    #[error("evaluator returned {got} objectives, expected {expected}")]
    ObjectiveCount { expected: usize, got: usize },
    #[error("reference point has {got} coordinates, expected {expected}")]
    ReferencePoint { expected: usize, got: usize },
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct Individual {
    pub genotype: Vec<f64>,
    pub objectives: Vec<f64>,
    /// Front index after non-dominated sorting.
    pub rank: usize,
    /// Crowding distance within its front, on front-normalized objectives.
    pub diversity: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    /// Size of the population's first front.
    pub front0_size: usize,
    /// Hypervolume of the archive against the fixed reference point.
    pub hypervolume: f64,
    /// Per-objective minimum over the archive.
    pub best: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionResult {
    /// Every non-dominated objective vector found during the run, one
    /// individual each, sorted by objectives.
    pub front: Vec<Individual>,
    /// Final population.
    pub population: Vec<Individual>,
    pub history: Vec<GenerationStats>,
    pub reference_point: Vec<f64>,
    pub evaluations: usize,
}

impl EvolutionResult {
    /// Members of the final population's first front.
    pub fn population_front(&self) -> Vec<&Individual> {
        self.population.iter().filter(|i| i.rank == 0).collect()
    }
}

/// Non-dominated set with unique objective vectors, in insertion order.
#[derive(Default)]
struct Archive {
    members: Vec<Individual>,
}

impl Archive {
    fn offer(&mut self, ind: &Individual) {
        if self
            .members
            .iter()
            .any(|m| m.objectives == ind.objectives || dominates(&m.objectives, &ind.objectives))
        {
            return;
        }
        self.members.retain(|m| !dominates(&ind.objectives, &m.objectives));
        self.members.push(ind.clone());
    }

    fn objectives(&self) -> Vec<&[f64]> {
        self.members.iter().map(|m| m.objectives.as_slice()).collect()
    }
}

fn evaluate_all<P: Problem + ?Sized>(
    problem: &P,
    genotypes: Vec<Vec<f64>>,
    n_obj: usize,
) -> Result<Vec<Individual>, EngineError> {
    let objectives: Vec<Vec<f64>> = genotypes.par_iter().map(|g| problem.evaluate(g)).collect();
    genotypes
        .into_iter()
        .zip(objectives)
        .map(|(genotype, objectives)| {
            if objectives.len() != n_obj {
                return Err(EngineError::ObjectiveCount { expected: n_obj, got: objectives.len() });
            }
            if objectives.iter().any(|v| !v.is_finite()) {
                return Err(EngineError::NonFinite(genotype));
            }
            Ok(Individual { genotype, objectives, rank: 0, diversity: 0.0 })
        })
        .collect()
}

/// Objectives rescaled to [0, 1] over the given members.
fn normalized(members: &[&Individual]) -> Vec<Vec<f64>> {
    let r = members.first().map_or(0, |m| m.objectives.len());
    let mut lo = vec![f64::INFINITY; r];
    let mut hi = vec![f64::NEG_INFINITY; r];
    for m in members {
        for k in 0..r {
            lo[k] = lo[k].min(m.objectives[k]);
            hi[k] = hi[k].max(m.objectives[k]);
        }
    }
    members
        .iter()
        .map(|m| {
            (0..r)
                .map(|k| {
                    let range = hi[k] - lo[k];
                    if range > 0.0 {
                        (m.objectives[k] - lo[k]) / range
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

fn assign_rank_and_diversity(pop: &mut [Individual]) {
    let objectives: Vec<&[f64]> = pop.iter().map(|i| i.objectives.as_slice()).collect();
    let fronts = fast_non_dominated_sort(&objectives);
    for (rank, front) in fronts.iter().enumerate() {
        let members: Vec<&Individual> = front.iter().map(|&i| &pop[i]).collect();
        let cd = crowding_distance(&normalized(&members));
        for (&i, d) in front.iter().zip(cd) {
            pop[i].rank = rank;
            pop[i].diversity = d;
        }
    }
}

/// Fills the next population front by front, trimming the split front with
/// the dynamic crowding distance.
fn select_survivors(merged: Vec<Individual>, size: usize) -> Vec<Individual> {
    let objectives: Vec<&[f64]> = merged.iter().map(|i| i.objectives.as_slice()).collect();
    let fronts = fast_non_dominated_sort(&objectives);
    let mut chosen: Vec<usize> = Vec::with_capacity(size);
    for front in fronts {
        let room = size - chosen.len();
        if room == 0 {
            break;
        }
        if front.len() <= room {
            chosen.extend(front);
            continue;
        }
        let members: Vec<&Individual> = front.iter().map(|&i| &merged[i]).collect();
        let scaled = normalized(&members);
        if room >= 2 {
            let kept = dcd_trim(&scaled, room).expect("room >= 2");
            chosen.extend(kept.into_iter().map(|p| front[p]));
        } else {
            let cd = crowding_distance(&scaled);
            let mut best = 0;
            for (p, &d) in cd.iter().enumerate() {
                if d > cd[best] {
                    best = p;
                }
            }
            chosen.push(front[best]);
        }
        break;
    }
    chosen.sort_unstable();
    let mut slots: Vec<Option<Individual>> = merged.into_iter().map(Some).collect();
    let mut next: Vec<Individual> =
        chosen.into_iter().map(|i| slots[i].take().expect("chosen once")).collect();
    assign_rank_and_diversity(&mut next);
    next
}

/// Binary tournament on (rank, diversity); ties go to the lower index.
fn tournament(pop: &[Individual], rng: &mut ChaCha8Rng) -> usize {
    let a = rng.random_range(0..pop.len());
    let b = rng.random_range(0..pop.len());
    let (x, y) = (&pop[a], &pop[b]);
    let a_wins = x.rank < y.rank
        || (x.rank == y.rank && (x.diversity > y.diversity || (x.diversity == y.diversity && a <= b)));
    if a_wins {
        a
    } else {
        b
    }
}

fn derived_reference(pop: &[Individual], r: usize) -> Vec<f64> {
    (0..r)
        .map(|k| {
            let lo = pop.iter().map(|i| i.objectives[k]).fold(f64::INFINITY, f64::min);
            let hi = pop.iter().map(|i| i.objectives[k]).fold(f64::NEG_INFINITY, f64::max);
            let range = hi - lo;
            let margin = if range > 0.0 { 0.1 * range } else { hi.abs().max(1.0) };
            hi + margin
        })
        .collect()
}

fn stats(generation: usize, pop: &[Individual], archive: &Archive, reference: &[f64]) -> GenerationStats {
    let objectives = archive.objectives();
    let r = reference.len();
    GenerationStats {
        generation,
        front0_size: pop.iter().filter(|i| i.rank == 0).count(),
        hypervolume: hypervolume(&objectives, reference),
        best: (0..r).map(|k| objectives.iter().map(|o| o[k]).fold(f64::INFINITY, f64::min)).collect(),
    }
}

/// Runs the elitist generational loop.
///
/// All random draws come from one seeded generator consumed sequentially,
/// and evaluation results are assembled in population order, so the result
/// does not depend on how many threads evaluate in parallel.
pub fn evolve<P: Problem + ?Sized>(problem: &P, params: &GAParams) -> Result<EvolutionResult, EngineError> {
    params.check()?;
    let bounds = problem.bounds();
    let n = bounds.len();
    let r = problem.num_objectives();
    if n == 0 || r == 0 {
        return Err(EngineError::EmptyProblem);
    }
    if let Some(reference) = &params.reference_point {
        if reference.len() != r {
            return Err(EngineError::ReferencePoint { expected: r, got: reference.len() });
        }
    }
    let pm = params.mutation_probability_per_gene.unwrap_or(1.0 / n as f64);
    let size = params.population_size;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let initial: Vec<Vec<f64>> = (0..size)
        .map(|_| bounds.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>()).collect())
        .collect();
    let mut pop = evaluate_all(problem, initial, r)?;
    let mut evaluations = pop.len();
    assign_rank_and_diversity(&mut pop);

    let reference = params.reference_point.clone().unwrap_or_else(|| derived_reference(&pop, r));
    let mut archive = Archive::default();
    pop.iter().for_each(|i| archive.offer(i));
    let mut history = vec![stats(0, &pop, &archive, &reference)];

    for generation in 1..=params.generations {
        let mut offspring: Vec<Vec<f64>> = Vec::with_capacity(size);
        while offspring.len() < size {
            let p1 = &pop[tournament(&pop, &mut rng)].genotype;
            let p2 = &pop[tournament(&pop, &mut rng)].genotype;
            let (c1, c2) = if rng.random::<f64>() < params.crossover_probability {
                let draws: Vec<f64> = (0..n).map(|_| rng.random()).collect();
                sbx_crossover(p1, p2, params.eta_c, &draws, &bounds)
            } else {
                (p1.clone(), p2.clone())
            };
            for child in [c1, c2] {
                let draws: Vec<f64> =
                    (0..n).map(|_| if rng.random::<f64>() < pm { rng.random() } else { 0.5 }).collect();
                offspring.push(polynomial_mutation(&child, &bounds, params.eta_m, &draws));
            }
        }
        let children = evaluate_all(problem, offspring, r)?;
        evaluations += children.len();
        children.iter().for_each(|c| archive.offer(c));

        let mut merged = std::mem::take(&mut pop);
        merged.extend(children);
        pop = select_survivors(merged, size);
        history.push(stats(generation, &pop, &archive, &reference));
    }

    let mut front = archive.members;
    front.sort_by(|a, b| {
        a.objectives
            .iter()
            .zip(&b.objectives)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    for ind in &mut front {
        ind.rank = 0;
    }
    let scaled = normalized(&front.iter().collect::<Vec<_>>());
    for (ind, d) in front.iter_mut().zip(crowding_distance(&scaled)) {
        ind.diversity = d;
    }

    Ok(EvolutionResult { front, population: pop, history, reference_point: reference, evaluations })
}
