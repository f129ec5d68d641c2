//! `certipose` command-line front end.
//!
//! ```text
//! certipose targets
//! certipose render --pose 0,0,95,2,-1,3 --noise 0.01 --out imgs
//! certipose precompute --store store/
//! certipose estimate --image imgs/render_000.pbm --store store/ --truth 0,0,95,2,-1,3
//! certipose experiment --config desk.toml --seed 7
//! certipose denoise --image noisy.pbm --output clean.pbm
//! ```
//!
//! Exit codes: 0 success, 1 other failure, 2 configuration error, 3 store
//! mismatch, 4 containment failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use certipose::estimator::CertifiedPoseEstimate;
use certipose::geometry::{render_with_edges, BinaryImage, Pose, BUILTIN_NAMES};
use certipose::harness::{
    resolve_target, run_experiment, sample_scene, write_csv, ExperimentConfig,
};
use certipose::partition::partition;
use certipose::store::{precompute_store, CandidateStore};
use certipose::{Error, Result};

const EXIT_OTHER: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_STORE: u8 = 3;
const EXIT_CONTAINMENT: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "certipose",
    version,
    about = "Certified camera pose estimates from binary images"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Experiment configuration (TOML, or JSON by extension).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Noise budget as a fraction of the pixel count, e.g. 0.01.
    #[arg(long, global = true)]
    noise: Option<f64>,
    /// Caps the worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Candidate store directory.
    #[arg(long, global = true, env = "CERTIPOSE_STORE")]
    store: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the configured target (built-in name or JSON file).
    #[arg(long, global = true)]
    target: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the built-in targets.
    Targets {
        /// Also write each target as JSON into the output directory.
        #[arg(long)]
        export: bool,
    },
    /// Render images for given poses or for poses sampled from the space.
    Render {
        /// Pose `x,y,z,rx,ry,rz` with angles in degrees; repeatable.
        #[arg(long, value_parser = parse_pose_degrees, allow_hyphen_values = true)]
        pose: Vec<Pose>,
        /// Number of sampled poses when no `--pose` is given.
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Partition the pose space and write the accepted boxes as JSON.
    Partition,
    /// Partition the pose space and save the candidate store.
    Precompute,
    /// Estimate the pose set of one image from a store.
    Estimate {
        /// Observed image (PBM).
        #[arg(long)]
        image: PathBuf,
        /// Ground-truth pose `x,y,z,rx,ry,rz` (degrees); exit 4 if the
        /// estimate misses it.
        #[arg(long, value_parser = parse_pose_degrees, allow_hyphen_values = true)]
        truth: Option<Pose>,
        /// Write the vertex enclosure boxes of the surviving candidates.
        #[arg(long)]
        emit_overlay: bool,
    },
    /// Sample scenes, estimate each one and write a CSV table.
    Experiment {
        /// Overrides the configured number of scenes.
        #[arg(long)]
        samples: Option<usize>,
        /// Remove isolated on-pixels before estimating.
        #[arg(long)]
        denoise: bool,
    },
    /// Remove isolated on-pixels until nothing changes.
    Denoise {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
}

fn parse_pose_degrees(s: &str) -> std::result::Result<Pose, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    let p: [f64; 6] = v
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 6 values, got {}", v.len()))?;
    Ok(Pose::from_array([
        p[0],
        p[1],
        p[2],
        p[3].to_radians(),
        p[4].to_radians(),
        p[5].to_radians(),
    ]))
}

fn pose_degrees(p: &Pose) -> [f64; 6] {
    let a = p.to_array();
    [
        a[0],
        a[1],
        a[2],
        a[3].to_degrees(),
        a[4].to_degrees(),
        a[5].to_degrees(),
    ]
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) | Error::InvalidCamera(_) | Error::InvalidPolygon(_) => {
                    EXIT_CONFIG
                }
                Error::StoreMismatch(_) | Error::StoreCorrupt(_) => EXIT_STORE,
                _ => EXIT_OTHER,
            })
        }
    }
}

fn load_config(g: &Global) -> Result<ExperimentConfig> {
    let mut cfg = match &g.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(n) = g.noise {
        cfg.noise = n;
    }
    if let Some(o) = &g.out {
        cfg.out = o.clone();
    }
    if let Some(t) = &g.target {
        cfg.target = t.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn require_store(g: &Global) -> Result<&Path> {
    g.store
        .as_deref()
        .ok_or_else(|| Error::Config("no store: pass --store or set CERTIPOSE_STORE".into()))
}

fn write_json(path: &Path, v: &serde_json::Value) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, serde_json::to_vec_pretty(v)?)?;
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    let g = &cli.global;
    let cfg = load_config(g)?;
    match cli.cmd {
        Command::Targets { export } => {
            for name in BUILTIN_NAMES {
                let t = resolve_target(name)?;
                println!(
                    "{name}\tpolygons={}\tvertices={}\tfingerprint={}",
                    t.polygons().len(),
                    t.vertex_count(),
                    &t.fingerprint()[..12]
                );
                if export {
                    std::fs::create_dir_all(&cfg.out)?;
                    std::fs::write(cfg.out.join(format!("{name}.json")), t.to_json())?;
                }
            }
            Ok(0)
        }
        Command::Render { pose, count } => {
            let target = cfg.load_target()?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let budget = cfg.noise_budget();
            let mut images = Vec::new();
            if pose.is_empty() {
                let space = cfg.space()?;
                for _ in 0..count {
                    let s =
                        sample_scene(&target, &cfg.camera, &space, budget, cfg.margin, &mut rng)?;
                    images.push((s.pose, s.observed));
                }
            } else {
                for p in pose {
                    let (clean, edges) = render_with_edges(&target, &cfg.camera, &p)?;
                    let img = if budget > 0 {
                        clean.apply_noise(budget, &mut rng, &edges)
                    } else {
                        clean
                    };
                    images.push((p, img));
                }
            }
            std::fs::create_dir_all(&cfg.out)?;
            let mut index = Vec::new();
            for (i, (p, img)) in images.iter().enumerate() {
                let file = format!("render_{i:03}.pbm");
                img.save_pbm(&cfg.out.join(&file), true)?;
                index.push(json!({ "file": file, "poseDegrees": pose_degrees(p) }));
                println!("{}", cfg.out.join(&file).display());
            }
            write_json(
                &cfg.out.join("renders.json"),
                &json!({
                    "target": target.name(),
                    "seed": cfg.seed,
                    "noiseBudget": budget,
                    "images": index,
                }),
            )?;
            Ok(0)
        }
        Command::Partition => {
            let target = cfg.load_target()?;
            let part = partition(&target, &cfg.camera, &cfg.space()?, &cfg.partition)?;
            let leaves: Vec<_> = part
                .leaves
                .iter()
                .map(|l| {
                    let b = l.artifacts.pose.bounds();
                    json!({
                        "lo": b.lo(),
                        "hi": b.hi(),
                        "depth": l.depth,
                        "depthCapped": l.depth_capped,
                        "errorRatio": l.artifacts.error_ratio,
                    })
                })
                .collect();
            let capped = part.leaves.iter().filter(|l| l.depth_capped).count();
            println!(
                "{} candidates ({capped} depth-capped), {} invisible boxes dropped, {} depth-crossing boxes dropped",
                part.leaves.len(),
                part.discarded_invisible,
                part.discarded_depth
            );
            write_json(
                &cfg.out.join("partition.json"),
                &json!({
                    "target": target.name(),
                    "partition": cfg.partition,
                    "discardedInvisible": part.discarded_invisible,
                    "discardedDepth": part.discarded_depth,
                    "leaves": leaves,
                }),
            )?;
            Ok(0)
        }
        Command::Precompute => {
            let dir = require_store(g)?;
            let target = cfg.load_target()?;
            let t0 = std::time::Instant::now();
            let store = precompute_store(&target, &cfg.camera, &cfg.space()?, &cfg.partition)?;
            store.save(dir)?;
            println!(
                "{} candidates for '{}' written to {} in {:.2} s",
                store.len(),
                target.name(),
                dir.display(),
                t0.elapsed().as_secs_f64()
            );
            Ok(0)
        }
        Command::Estimate {
            image,
            truth,
            emit_overlay,
        } => {
            let dir = require_store(g)?;
            let target = cfg.load_target()?;
            let store = CandidateStore::load(dir)?;
            let obs = BinaryImage::load_pbm(&image)?;
            let est = certipose::estimator::estimate(
                &obs,
                &store,
                &cfg.camera,
                &target,
                &cfg.estimator(),
            )?;
            let mut out = est.to_json();
            out["seed"] = json!(cfg.seed);
            out["noiseBudget"] = json!(cfg.noise_budget());
            let contained = truth.map(|p| est.contains(&p));
            if let Some(c) = contained {
                out["truthContained"] = json!(c);
            }
            write_json(&cfg.out.join("estimate.json"), &out)?;
            if emit_overlay {
                write_json(&cfg.out.join("overlay.json"), &overlay(&est, &store))?;
            }
            let s = &est.summary;
            println!(
                "{}/{} candidates after filter, normVolFilter={:.3e}, normVolOurs={:.3e}",
                s.candidates_after_filter, s.candidates, s.norm_vol_filter, s.norm_vol_ours
            );
            if contained == Some(false) {
                eprintln!("error: the true pose is not in the estimate");
                return Ok(EXIT_CONTAINMENT);
            }
            Ok(0)
        }
        Command::Experiment { samples, denoise } => {
            let mut cfg = cfg;
            if let Some(n) = samples {
                cfg.samples = n;
            }
            cfg.denoise |= denoise;
            let target = cfg.load_target()?;
            let store = match &g.store {
                Some(dir) if dir.join(certipose::store::MANIFEST_FILE).exists() => {
                    CandidateStore::load(dir)?
                }
                other => {
                    let s = precompute_store(&target, &cfg.camera, &cfg.space()?, &cfg.partition)?;
                    if let Some(dir) = other {
                        s.save(dir)?;
                    }
                    s
                }
            };
            let rows = run_experiment(&cfg, &target, &store)?;
            std::fs::create_dir_all(&cfg.out)?;
            write_csv(
                &rows,
                std::fs::File::create(cfg.out.join("experiment.csv"))?,
            )?;
            let mut meta = serde_json::to_value(&cfg)?;
            meta["noiseBudget"] = json!(cfg.noise_budget());
            meta["candidates"] = json!(store.len());
            if cfg.denoise {
                meta["denoiseMethod"] = json!("isolated on-pixel removal to fixpoint");
            }
            write_json(&cfg.out.join("experiment.json"), &meta)?;
            let contained = rows.iter().filter(|r| r.contained).count();
            let mean = |f: fn(&certipose::harness::ExperimentRow) -> f64| {
                rows.iter().map(f).sum::<f64>() / rows.len().max(1) as f64
            };
            println!(
                "contained {contained}/{}, mean normVolFilter={:.3e}, mean normVolOurs={:.3e}",
                rows.len(),
                mean(|r| r.norm_vol_filter),
                mean(|r| r.norm_vol_ours)
            );
            if contained < rows.len() {
                eprintln!(
                    "error: {} scenes missed the true pose",
                    rows.len() - contained
                );
                return Ok(EXIT_CONTAINMENT);
            }
            Ok(0)
        }
        Command::Denoise { image, output } => {
            let img = BinaryImage::load_pbm(&image)?;
            let clean = img.denoise();
            clean.save_pbm(&output, true)?;
            println!("removed {} isolated pixels", img.count_and_not(&clean));
            Ok(0)
        }
    }
}

fn overlay(est: &CertifiedPoseEstimate, store: &CandidateStore) -> serde_json::Value {
    let cands: Vec<_> = est
        .pieces
        .iter()
        .map(|p| {
            let art = &store.candidates[p.candidate_index];
            let boxes: Vec<Vec<_>> = art
                .vertices
                .iter()
                .map(|poly| {
                    poly.iter()
                        .map(|v| json!({ "lo": v.hull.lo(), "hi": v.hull.hi() }))
                        .collect()
                })
                .collect();
            json!({
                "candidateIndex": p.candidate_index,
                "feasible": p.feasible,
                "vertexBoxes": boxes,
            })
        })
        .collect();
    json!({ "pixelConvention": "1-based centers, square [q-1/2, q+1/2]", "candidates": cands })
}
