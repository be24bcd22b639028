//! Problem-agnostic elitist multi-objective GA (NSGA-II with dynamic
//! crowding distance). Every objective is minimized.

mod crowding;
mod evolve;
mod hypervolume;
mod operators;
mod sort;

pub use crowding::{crowding_distance, dcd_from_parts, dcd_trim, dynamic_crowding_distance, TrimError};
pub use evolve::{evolve, EngineError, EvolutionResult, GAParams, GenerationStats, Individual, Problem};
pub use hypervolume::hypervolume;
pub use operators::{mutation_delta, polynomial_mutation, sbx_beta, sbx_children, sbx_crossover};
pub use sort::{dominates, fast_non_dominated_sort, non_dominated_indices};
