//! Command-line entry point: super-resolution, reconstruction,
//! evaluation, and the LR/BC/EXT/HR comparison experiment.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/format error, 3 internal
//! failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use srmvs::error::Error;
use srmvs::eval::evaluate;
use srmvs::io::{load_dataset, read_ply, save_dataset, write_depth_map, write_ply};
use srmvs::pipeline::{
    reconstruct, run_experiment, ExperimentScene, PipelineConfig, ReconstructOptions,
};
use srmvs::sisr::{ingest_external_sr, super_resolve_set, ScaleSpec, SequenceSet, SetLabel};
use srmvs::synth::{make_lr_hr_pair, scene_by_name, standard_scenes};

#[derive(Parser)]
#[command(name = "srmvs", version, about = "Super-resolution-aware multi-view stereo pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Configuration file (flat `key = value`, `#` comments).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run seed; overrides the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for per-view depth estimation (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Super-resolution scale factor, e.g. `2` or `1/2`; overrides the
    /// config file.
    #[arg(long)]
    scale: Option<String>,
    /// Textureless processing path: auto, on, or off.
    #[arg(long)]
    textureless: Option<String>,
    /// Output directory; overrides the config file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Super-resolve a dataset's images (bicubic, or ingest externally
    /// super-resolved images) and scale its cameras to match.
    Sr {
        #[command(flatten)]
        common: CommonOpts,
        /// Input dataset directory.
        #[arg(long = "in")]
        input: PathBuf,
        /// Directory of externally super-resolved images (one per view);
        /// used instead of bicubic interpolation when given.
        #[arg(long)]
        external_dir: Option<PathBuf>,
    },
    /// Reconstruct a dense point cloud from a posed dataset.
    Reconstruct {
        #[command(flatten)]
        common: CommonOpts,
        /// Input dataset directory.
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Score a reconstructed cloud against a ground-truth cloud.
    Evaluate {
        #[command(flatten)]
        common: CommonOpts,
        /// Reconstructed point cloud (PLY).
        #[arg(long)]
        rec: PathBuf,
        /// Ground-truth point cloud (PLY).
        #[arg(long)]
        gt: PathBuf,
    },
    /// Run the full comparison: reconstruct from low-resolution images,
    /// their bicubic super-resolution, optional external super-resolution,
    /// and the high-resolution reference, scoring every arm against the
    /// same ground truth.
    Experiment {
        #[command(flatten)]
        common: CommonOpts,
        /// Comma-separated synthetic scene names (default: all standard
        /// scenes). Mutually exclusive with --in.
        #[arg(long, conflicts_with = "input")]
        scenes: Option<String>,
        /// Dataset directory used as the low-resolution arm; needs
        /// gt/cloud.ply and omits the HR arm.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Directory with per-scene subdirectories of externally
        /// super-resolved images; adds the EXT arm.
        #[arg(long)]
        external_dir: Option<PathBuf>,
    },
}

/// Config + CLI-flag merge: flags win over file values.
struct Run {
    cfg: PipelineConfig,
    opts: ReconstructOptions,
    out: PathBuf,
}

fn resolve(common: &CommonOpts) -> Result<Run, Error> {
    let mut cfg = match &common.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(scale) = &common.scale {
        cfg.scale = ScaleSpec::parse(scale)?;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(mode) = &common.textureless {
        cfg.textureless = mode.parse()?;
    }
    if let Some(out) = &common.out {
        cfg.out_dir = out.display().to_string();
    }
    cfg.validate()?;
    let opts = ReconstructOptions {
        seed: cfg.seed,
        jobs: common.jobs,
        textureless: cfg.textureless,
        sr_factor: 1.0,
    };
    let out = PathBuf::from(&cfg.out_dir);
    Ok(Run { cfg, opts, out })
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn cmd_sr(common: &CommonOpts, input: &Path, external_dir: Option<&Path>) -> Result<(), Error> {
    let run = resolve(common)?;
    let (dataset, warnings) = load_dataset(input)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let set = SequenceSet::new(SetLabel::Lr, dataset.views)?;
    let upscaled = match external_dir {
        Some(dir) => {
            let outcome = ingest_external_sr(&set, dir, run.cfg.scale)?;
            for w in outcome.warnings {
                eprintln!("warning: {w}");
            }
            outcome.set
        }
        None => super_resolve_set(&set, run.cfg.scale)?,
    };
    ensure_dir(&run.out)?;
    save_dataset(&run.out, &upscaled.views, None, None)?;
    println!(
        "{} views super-resolved by {} ({}) -> {}",
        upscaled.views.len(),
        run.cfg.scale,
        upscaled.label,
        run.out.display()
    );
    Ok(())
}

fn cmd_reconstruct(common: &CommonOpts, input: &Path) -> Result<(), Error> {
    let mut run = resolve(common)?;
    // The scale flag declares the input's super-resolution factor, which
    // only drives the textureless-path adaptation; an input that was
    // never super-resolved uses 1.
    run.opts.sr_factor = match &common.scale {
        Some(_) => run.cfg.scale.factor(),
        None => 1.0,
    };
    let (dataset, warnings) = load_dataset(input)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let rec = reconstruct(&dataset.views, &run.cfg, &run.opts)?;
    ensure_dir(&run.out)?;
    write_ply(&run.out.join("cloud.ply"), &rec.cloud)?;
    let depth_dir = run.out.join("depth");
    ensure_dir(&depth_dir)?;
    for (v, m) in dataset.views.iter().zip(&rec.depth_maps) {
        write_depth_map(&depth_dir.join(format!("{}.dm", v.name)), m)?;
    }
    println!(
        "{} points from {} views (textureless path: {}, masked {:.1}%) -> {}",
        rec.cloud.len(),
        dataset.views.len(),
        rec.textureless,
        100.0 * rec.masked_fraction,
        run.out.display()
    );
    Ok(())
}

fn cmd_evaluate(common: &CommonOpts, rec_path: &Path, gt_path: &Path) -> Result<(), Error> {
    let run = resolve(common)?;
    let rec = read_ply(rec_path)?;
    let gt = read_ply(gt_path)?;
    let mut table = evaluate(&rec, &gt, &run.cfg.tolerances_cm)?;
    table.scene = rec_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    table.model = "rec".into();
    print!("{}", table.to_text());
    ensure_dir(&run.out)?;
    write_text(&run.out.join("scores.csv"), &table.to_csv())?;
    Ok(())
}

fn cmd_experiment(
    common: &CommonOpts,
    scenes: Option<&str>,
    input: Option<&Path>,
    external_dir: Option<&Path>,
) -> Result<(), Error> {
    let run = resolve(common)?;
    let mut inputs: Vec<ExperimentScene> = Vec::new();
    if let Some(dir) = input {
        let (dataset, warnings) = load_dataset(dir)?;
        for w in warnings {
            eprintln!("warning: {w}");
        }
        let gt_cloud = dataset.gt_cloud.ok_or_else(|| {
            Error::NotFound(format!("{}/gt/cloud.ply (required to score arms)", dir.display()))
        })?;
        let name = dir
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into());
        inputs.push(ExperimentScene {
            name,
            lr: SequenceSet::new(SetLabel::Lr, dataset.views)?,
            hr: None,
            gt_cloud,
        });
    } else {
        let specs = match scenes {
            Some(list) => list
                .split(',')
                .map(|n| {
                    scene_by_name(n.trim())
                        .ok_or_else(|| Error::NotFound(format!("scene {:?}", n.trim())))
                })
                .collect::<Result<Vec<_>, _>>()?,
            None => standard_scenes(),
        };
        for spec in specs {
            let (lr, hr, gt) = make_lr_hr_pair(&spec, run.cfg.scale)?;
            inputs.push(ExperimentScene {
                name: spec.name.clone(),
                lr,
                hr: Some(hr),
                gt_cloud: gt.cloud,
            });
        }
    }

    let report = run_experiment(&inputs, &run.cfg, &run.opts, external_dir)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    ensure_dir(&run.out)?;
    write_text(&run.out.join("report.csv"), &report.to_csv())?;
    write_text(&run.out.join("report.txt"), &report.to_text())?;
    for (scene, arm, cloud) in &report.clouds {
        write_ply(&run.out.join(format!("{scene}_{arm}.ply")), cloud)?;
    }
    // Timings go to standard output only, never into the report files.
    for (scene, arm, secs) in &report.timings {
        println!("timing {scene} {arm}: {secs:.2}s");
    }
    print!("{}", report.to_text());
    Ok(())
}

fn run() -> Result<(), Error> {
    let cli = Cli::try_parse().unwrap_or_else(|e| {
        // clap uses exit code 2 for usage errors; this tool reserves 2
        // for data errors and reports usage problems as 1.
        let code = if e.use_stderr() { 1 } else { 0 };
        let _ = e.print();
        std::process::exit(code);
    });
    match &cli.command {
        Command::Sr {
            common,
            input,
            external_dir,
        } => cmd_sr(common, input, external_dir.as_deref()),
        Command::Reconstruct { common, input } => cmd_reconstruct(common, input),
        Command::Evaluate { common, rec, gt } => cmd_evaluate(common, rec, gt),
        Command::Experiment {
            common,
            scenes,
            input,
            external_dir,
        } => cmd_experiment(common, scenes.as_deref(), input.as_deref(), external_dir.as_deref()),
    }
}

fn main() -> ExitCode {
    match std::panic::catch_unwind(run) {
        Ok(Ok(())) => ExitCode::from(0),
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::InvalidArgument(_) => 1,
                Error::NotFound(_) | Error::Format { .. } | Error::Validation(_) | Error::Io { .. } => 2,
            };
            ExitCode::from(code)
        }
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(3)
        }
    }
}
