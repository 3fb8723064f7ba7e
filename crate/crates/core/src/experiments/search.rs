use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::banding::{EdgeClass, UnitLabeling};
use crate::mesh::PolyMesh;
use crate::trees::{sample_cut_tree_with, wilson_weighted, ConnectionTree, CutTree, EdgeGraph, Sampler};
use crate::unfold::{has_overlap, Unfolder};

use super::monte_carlo::trial_seed;

/// Relative weight of spoke edges in the band-aware sampler.
pub const SPOKE_WEIGHT: f64 = 4.0;

/// Minimum number of cut spokes per unit accepted by the band-aware sampler.
const MIN_CUT_SPOKES: usize = 2;

const BATCH: u64 = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Uniform random cut trees.
    #[default]
    Random,
    /// Spoke-weighted cut trees, rejecting any with a unit that has fewer
    /// than two cut spokes.
    BandAware,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_trials: u64,
    pub max_time: Option<Duration>,
}

impl SearchBudget {
    pub fn trials(max_trials: u64) -> Self {
        SearchBudget { max_trials, max_time: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchHit {
    /// Index of the successful trial.
    pub trial: u64,
    /// Seed of the successful trial's sampler.
    pub seed: u64,
    pub tree: ConnectionTree,
    /// Trials spent, including the hit.
    pub trials_used: u64,
}

/// Looks for a connection tree whose unfolding does not overlap. Trials run
/// in parallel batches; the hit with the smallest trial index in the first
/// successful batch is returned, so the result is deterministic when only
/// the trial budget applies.
pub fn search_nonoverlapping(
    mesh: &PolyMesh,
    labeling: &UnitLabeling,
    budget: SearchBudget,
    seed: u64,
    strategy: Strategy,
) -> Option<SearchHit> {
    let graph = EdgeGraph::primal(mesh);
    let unfolder = Unfolder::new(mesh);
    let weights = spoke_weights(labeling);
    let start = Instant::now();
    let mut next = 0;
    while next < budget.max_trials {
        if budget.max_time.is_some_and(|t| start.elapsed() >= t) {
            return None;
        }
        let end = (next + BATCH).min(budget.max_trials);
        let hit = (next..end).into_par_iter().find_map_first(|i| {
            let s = trial_seed(seed, i);
            let tree = match strategy {
                Strategy::Random => sample_cut_tree_with(&graph, s, Sampler::Wilson),
                Strategy::BandAware => {
                    let edges = wilson_weighted(&graph, &weights, &mut ChaCha8Rng::seed_from_u64(s));
                    let tree = CutTree::from_sampled(&graph, edges);
                    if !enough_cut_spokes(&tree, labeling) {
                        return None;
                    }
                    tree
                }
            }
            .complement();
            let layout = unfolder.unfold(&tree, 0).ok()?;
            (!has_overlap(&layout)).then_some((i, s, tree))
        });
        if let Some((trial, seed, tree)) = hit {
            return Some(SearchHit { trial, seed, tree, trials_used: trial + 1 });
        }
        next = end;
    }
    None
}

fn spoke_weights(labeling: &UnitLabeling) -> Vec<f64> {
    labeling.edge_class.iter().map(|c| if matches!(c, EdgeClass::Spoke { .. }) { SPOKE_WEIGHT } else { 1.0 }).collect()
}

fn enough_cut_spokes(tree: &CutTree, labeling: &UnitLabeling) -> bool {
    labeling.units.iter().all(|u| u.spokes.iter().filter(|&&e| tree.is_cut(e)).count() >= MIN_CUT_SPOKES)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banding::{banded_tetrahedron, BandParams};

    #[test]
    fn random_search_on_tetrahedron_finds_a_net() {
        let (mesh, labeling) = banded_tetrahedron(BandParams::default()).unwrap();
        let hit = search_nonoverlapping(&mesh, &labeling, SearchBudget::trials(1000), 3, Strategy::Random)
            .expect("about one tree in ten works");
        let layout = crate::unfold::unfold(&mesh, &hit.tree, 0).unwrap();
        assert!(!has_overlap(&layout));
        let again = search_nonoverlapping(&mesh, &labeling, SearchBudget::trials(1000), 3, Strategy::Random);
        assert_eq!(again, Some(hit));
    }

    #[test]
    fn empty_budget_finds_nothing() {
        let (mesh, labeling) = banded_tetrahedron(BandParams::default()).unwrap();
        assert!(search_nonoverlapping(&mesh, &labeling, SearchBudget::trials(0), 3, Strategy::BandAware).is_none());
    }
}
