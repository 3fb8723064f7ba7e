use std::ops::Range;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::banding::{BandParams, UnitLabeling};
use crate::mesh::PolyMesh;
use crate::trees::{detect_band_unit, detect_overlap_pattern, sample_cut_tree_with, EdgeGraph, Sampler};
use crate::unfold::{faces_overlap, has_overlap, Unfolder};

/// Seed of trial `index`: the first word of ChaCha8 stream `index` keyed by
/// the master seed.
pub fn trial_seed(master_seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng.next_u64()
}

/// Aggregated counters over a set of trials.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialStats {
    pub trials: u64,
    pub overlapping: u64,
    /// Trials times units.
    pub unit_observations: u64,
    pub band_unit_events: u64,
    /// Band units whose seven faces overlap each other.
    pub local_given_unit_events: u64,
    /// Units in a Hexagon-Overlap pattern.
    pub pattern_events: u64,
    /// Pattern units without a unit-local overlap; always zero when the
    /// combinatorial detector agrees with the geometry.
    pub detector_violations: u64,
    /// Tree seeds of the non-overlapping trials, ascending.
    pub non_overlapping_examples: Vec<u64>,
}

impl TrialStats {
    /// Commutative and associative.
    pub fn merge(mut self, other: TrialStats) -> TrialStats {
        self.trials += other.trials;
        self.overlapping += other.overlapping;
        self.unit_observations += other.unit_observations;
        self.band_unit_events += other.band_unit_events;
        self.local_given_unit_events += other.local_given_unit_events;
        self.pattern_events += other.pattern_events;
        self.detector_violations += other.detector_violations;
        self.non_overlapping_examples.extend(other.non_overlapping_examples);
        self.non_overlapping_examples.sort_unstable();
        self
    }

    pub fn f_overlap(&self) -> f64 {
        ratio(self.overlapping, self.trials)
    }

    pub fn f_nonoverlap(&self) -> f64 {
        ratio(self.trials - self.overlapping, self.trials)
    }

    pub fn f_band_unit(&self) -> f64 {
        ratio(self.band_unit_events, self.unit_observations)
    }

    pub fn f_local_given_unit(&self) -> f64 {
        ratio(self.local_given_unit_events, self.band_unit_events)
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Immutable per-mesh data shared by all trials.
pub struct TrialContext<'a> {
    pub labeling: &'a UnitLabeling,
    pub graph: EdgeGraph,
    pub unfolder: Unfolder,
}

impl<'a> TrialContext<'a> {
    pub fn new(mesh: &PolyMesh, labeling: &'a UnitLabeling) -> Self {
        TrialContext { labeling, graph: EdgeGraph::primal(mesh), unfolder: Unfolder::new(mesh) }
    }

    fn trial(&self, seed: u64, sampler: Sampler) -> TrialStats {
        let tree = sample_cut_tree_with(&self.graph, seed, sampler).complement();
        let layout = self.unfolder.unfold(&tree, 0).expect("complement of a cut tree spans the faces");
        let overlapping = has_overlap(&layout);
        let mut stats = TrialStats {
            trials: 1,
            overlapping: overlapping as u64,
            unit_observations: self.labeling.num_units() as u64,
            ..TrialStats::default()
        };
        for (k, unit) in self.labeling.units.iter().enumerate() {
            if !detect_band_unit(&tree, self.labeling, k) {
                continue;
            }
            stats.band_unit_events += 1;
            let local = faces_overlap(&layout, &unit.faces());
            stats.local_given_unit_events += local as u64;
            if detect_overlap_pattern(&tree, self.labeling, k).is_some() {
                stats.pattern_events += 1;
                stats.detector_violations += !local as u64;
            }
        }
        if !overlapping {
            stats.non_overlapping_examples.push(seed);
        }
        stats
    }
}

/// Runs `n_trials` trials in parallel. The result depends only on the
/// arguments, not on scheduling.
pub fn monte_carlo(
    mesh: &PolyMesh,
    labeling: &UnitLabeling,
    n_trials: u64,
    master_seed: u64,
    sampler: Sampler,
) -> TrialStats {
    monte_carlo_range(&TrialContext::new(mesh, labeling), 0..n_trials, master_seed, sampler)
}

/// Trials with the given indices; disjoint ranges merge to the stats of their union.
pub fn monte_carlo_range(ctx: &TrialContext<'_>, trials: Range<u64>, master_seed: u64, sampler: Sampler) -> TrialStats {
    trials
        .into_par_iter()
        .fold(TrialStats::default, |acc, i| acc.merge(ctx.trial(trial_seed(master_seed, i), sampler)))
        .reduce(TrialStats::default, TrialStats::merge)
}

/// One output row: configuration plus the measured frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Dome level, or `tetra` for the banded tetrahedron.
    pub level: String,
    pub trials: u64,
    pub seed: u64,
    pub sampler: Sampler,
    pub t: f64,
    pub mu: f64,
    pub f_overlap: f64,
    pub f_band_unit: f64,
    pub f_local_given_unit: f64,
    pub n_nonoverlap: u64,
}

impl RunRecord {
    pub fn new(level: String, seed: u64, sampler: Sampler, params: BandParams, stats: &TrialStats) -> Self {
        RunRecord {
            level,
            trials: stats.trials,
            seed,
            sampler,
            t: params.inset,
            mu: params.lift,
            f_overlap: stats.f_overlap(),
            f_band_unit: stats.f_band_unit(),
            f_local_given_unit: stats.f_local_given_unit(),
            n_nonoverlap: stats.trials - stats.overlapping,
        }
    }
}
