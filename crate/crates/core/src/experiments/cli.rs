use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use crate::banding::{banded_dome, banded_tetrahedron, build_cluster_graph, BandParams, UnitLabeling};
use crate::io::{save_labeling, save_off};
use crate::mesh::{validate, MeshLevel, PolyMesh};
use crate::trees::{sample_cut_tree_with, ConnectionTree, EdgeGraph, Sampler};
use crate::unfold::{detect_overlap_classified, render_svg, unfold, verify_hexagon_overlap_property_with, Unfolder};

use super::{
    compute_bounds, format_sci, monte_carlo, search_nonoverlapping, verify_counts, RunRecord, SearchBudget, Strategy,
};

#[derive(Debug, Parser)]
#[command(name = "bandfold", version, about = "Banded geodesic domes and their random edge unfoldings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Subdivision level L of the dome.
    #[arg(long, global = true, default_value_t = 0)]
    level: u32,
    /// Master seed.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Trial count for `sample`, trial budget for `search`.
    #[arg(long, global = true, default_value_t = 10_000)]
    trials: u64,
    /// Band parameters as `t,mu`.
    #[arg(long, global = true)]
    params: Option<BandParams>,
    #[arg(long, global = true, value_enum, default_value_t)]
    sampler: Sampler,
    /// Output directory for files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Format of the `sample` result file.
    #[arg(long, global = true, value_enum, default_value_t)]
    format: Format,
    /// Base surface for `build`, `verify-property`, `sample`, `search` and `render`.
    #[arg(long, global = true, value_enum, default_value_t)]
    base: Base,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
enum Base {
    #[default]
    Dome,
    Tetra,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the banded surface and write it as OFF plus a labeling side-car.
    Build,
    /// Check the face, edge, vertex and hexagon counts of P_L.
    VerifyCounts,
    /// Check that every overlap pattern of every unit overlaps.
    VerifyProperty,
    /// Count the internal dual edges of a 16-unit cluster (needs level >= 2).
    ClusterCount {
        /// Any unit of the cluster.
        #[arg(long, default_value_t = 0)]
        anchor: usize,
    },
    /// Monte Carlo over random cut trees.
    Sample,
    /// Look for a non-overlapping unfolding.
    Search {
        #[arg(long, value_enum, default_value_t = Strategy::BandAware)]
        strategy: Strategy,
        /// Wall-clock budget in seconds, on top of the trial budget.
        #[arg(long)]
        max_seconds: Option<u64>,
    },
    /// Evaluate the probability bounds for level L.
    Bounds {
        #[arg(long, default_value_t = 0.7)]
        p_unit: f64,
        #[arg(long, default_value_t = 0.5)]
        p_loc: f64,
    },
    /// Unfold one tree and write it as SVG.
    Render {
        /// Tree JSON to unfold; a tree is sampled from `--seed` otherwise.
        #[arg(long)]
        tree: Option<PathBuf>,
    },
}

/// Failed checks exit with 1, as do runtime errors; usage errors exit with 2.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    let params = cli.params.unwrap_or_default();
    match &cli.command {
        Command::Build => {
            let (mesh, labeling) = build(cli, params)?;
            let out = out_dir(cli)?;
            let stem = base_label(cli);
            save_off(&mesh, &out.join(format!("{stem}.off")))?;
            save_labeling(&labeling, &out.join(format!("{stem}.labels.json")))?;
            let report = validate(&mesh);
            println!(
                "{stem}: F={} E={} V={} H={} convex={}",
                mesh.num_faces(),
                mesh.num_edges(),
                mesh.num_vertices(),
                labeling.num_units(),
                report.convex
            );
            Ok(report.all_ok())
        }
        Command::VerifyCounts => {
            let r = verify_counts(cli.level, params)?;
            let (f, e, v, h) = r.built;
            println!("L={} F={f} E={e} V={v} H={h}", r.level);
            let (ef, ee, ev, eh) = r.expected;
            println!("expected F={ef} E={ee} V={ev} H={eh}");
            println!("note: V = 160*4^L gives {}; Euler's relation needs the extra 2", r.vertex_formula_without_two);
            println!("{}", if r.ok() { "counts match" } else { "COUNT MISMATCH" });
            Ok(r.ok())
        }
        Command::VerifyProperty => {
            let (mesh, labeling) = build(cli, params)?;
            let unfolder = Unfolder::new(&mesh);
            let mut all = true;
            for unit in 0..labeling.num_units() {
                let hits =
                    verify_hexagon_overlap_property_with(&unfolder, &labeling, unit).iter().filter(|&&b| b).count();
                println!("unit {unit}: {hits}/36 patterns overlap");
                all &= hits == 36;
            }
            if all {
                println!("36/36 patterns overlap in all {} units", labeling.num_units());
            }
            Ok(all)
        }
        Command::ClusterCount { anchor } => {
            let (mesh, labeling) = banded_dome(MeshLevel(cli.level), params)?;
            let c = build_cluster_graph(&mesh, &labeling, *anchor)?;
            println!("{}", c.internal_dual_edges.len());
            println!("boundary crossings: {}", c.boundary_crossings.len());
            println!("central unit: {}", c.central_unit);
            Ok(c.internal_dual_edges.len() == 228 && c.boundary_crossings.len() == 24)
        }
        Command::Sample => {
            let (mesh, labeling) = build(cli, params)?;
            let stats = monte_carlo(&mesh, &labeling, cli.trials, cli.seed, cli.sampler);
            let record = RunRecord::new(base_label(cli), cli.seed, cli.sampler, params, &stats);
            println!(
                "trials={} overlapping={} f_overlap={:.6} f_band_unit={:.4} f_local_given_unit={:.4} n_nonoverlap={}",
                stats.trials,
                stats.overlapping,
                record.f_overlap,
                record.f_band_unit,
                record.f_local_given_unit,
                record.n_nonoverlap
            );
            let h = labeling.num_units() as i32;
            let predicted = 1.0 - (1.0 - record.f_band_unit * record.f_local_given_unit).powi(h);
            println!("predicted overlap 1-(1-f_band_unit*f_local_given_unit)^{h} = {predicted:.6}");
            if stats.detector_violations > 0 {
                println!("DETECTOR VIOLATIONS: {}", stats.detector_violations);
            }
            if let Some(out) = &cli.out {
                fs::create_dir_all(out)?;
                match cli.format {
                    Format::Json => {
                        let doc = serde_json::json!({ "record": record, "stats": stats });
                        fs::write(out.join("sample.json"), serde_json::to_string_pretty(&doc)?)?;
                    }
                    Format::Csv => {
                        let mut w = csv::Writer::from_path(out.join("sample.csv"))?;
                        w.serialize(&record)?;
                        w.flush()?;
                    }
                }
            }
            Ok(stats.detector_violations == 0)
        }
        Command::Search { strategy, max_seconds } => {
            let (mesh, labeling) = build(cli, params)?;
            let budget = SearchBudget { max_trials: cli.trials, max_time: max_seconds.map(Duration::from_secs) };
            let Some(hit) = search_nonoverlapping(&mesh, &labeling, budget, cli.seed, *strategy) else {
                println!("no non-overlapping unfolding within budget");
                return Ok(false);
            };
            println!("found at trial {} (tree seed {})", hit.trial, hit.seed);
            let out = out_dir(cli)?;
            fs::write(out.join("search.tree.json"), hit.tree.to_json())?;
            write_render(&mesh, &labeling, &hit.tree, &out.join("search.svg"))?;
            Ok(true)
        }
        Command::Bounds { p_unit, p_loc } => {
            if !(0.0..=1.0).contains(p_unit) || !(0.0..=1.0).contains(p_loc) {
                bail!("probabilities must lie in [0, 1]");
            }
            let r = compute_bounds(cli.level, *p_unit, *p_loc);
            println!("L={} H={} clusters={}", r.level, r.hexagons, r.clusters);
            println!("rho >= 36/2^228 = {}", format_sci(&r.rho_lower, 6));
            println!(
                "(1-rho)^{} = 1 - {:.6e} (log10 = {:.6e})",
                r.clusters, r.global_bound_deficit, r.global_bound_log10
            );
            println!("heuristic 1-(1-{}*{})^{} = {:.6}", r.p_unit, r.p_loc, r.hexagons, r.heuristic_overlap);
            println!("fixed fraction 3/2^17 = {}", format_sci(&r.fixed_fraction, 6));
            if let Some(out) = &cli.out {
                fs::create_dir_all(out)?;
                fs::write(out.join("bounds.json"), serde_json::to_string_pretty(&r)?)?;
            }
            Ok(true)
        }
        Command::Render { tree } => {
            let (mesh, labeling) = build(cli, params)?;
            let tree = match tree {
                Some(path) => {
                    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    ConnectionTree::from_json(&mesh, &text)?
                }
                None => sample_cut_tree_with(&EdgeGraph::primal(&mesh), cli.seed, cli.sampler).complement(),
            };
            let out = out_dir(cli)?;
            let overlapping = write_render(&mesh, &labeling, &tree, &out.join("render.svg"))?;
            println!("overlapping={overlapping}");
            Ok(true)
        }
    }
}

fn build(cli: &Cli, params: BandParams) -> Result<(PolyMesh, UnitLabeling)> {
    Ok(match cli.base {
        Base::Dome => banded_dome(MeshLevel(cli.level), params)?,
        Base::Tetra => banded_tetrahedron(params)?,
    })
}

fn base_label(cli: &Cli) -> String {
    match cli.base {
        Base::Dome => format!("p{}", cli.level),
        Base::Tetra => "tetra".into(),
    }
}

fn out_dir(cli: &Cli) -> Result<PathBuf> {
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    Ok(out)
}

fn write_render(mesh: &PolyMesh, labeling: &UnitLabeling, tree: &ConnectionTree, path: &Path) -> Result<bool> {
    let layout = unfold(mesh, tree, 0)?;
    let report = detect_overlap_classified(&layout, labeling);
    render_svg(&layout, &report, Some(labeling), path)?;
    Ok(report.overlapping)
}
