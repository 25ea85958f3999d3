//! End-to-end orchestration: configuration, reconstruction of a posed
//! image set into a point cloud, and the LR/BC/EXT/HR comparison
//! experiment.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::{aggregate, evaluate, improvement_report, ScoreTable, DEFAULT_TOLERANCES_CM};
use crate::fusion::{filter_depth_maps, fuse, FusionConfig, PointCloud};
use crate::geometry::{undistort_view, View};
use crate::patchmatch::{adapt_textureless, estimate_depth_map, DepthMap, PatchMatchConfig};
use crate::sisr::{ingest_external_sr, super_resolve_set, ScaleSpec, SequenceSet};
use crate::speckle::{speckle_filter, SpeckleConfig};

/// Whether to run the textureless-scene processing path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TexturelessMode {
    #[default]
    Auto,
    On,
    Off,
}

impl FromStr for TexturelessMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "on" => Ok(Self::On),
            "off" => Ok(Self::Off),
            other => Err(Error::invalid(format!(
                "textureless mode {other:?} (want auto, on, or off)"
            ))),
        }
    }
}

impl fmt::Display for TexturelessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Auto => "auto",
            Self::On => "on",
            Self::Off => "off",
        })
    }
}

/// All tunable parameters, loadable from a flat `key = value` file with
/// dotted key names and `#` comments. Unknown keys are an error; missing
/// keys keep their defaults. Run seeds come from the command line, not
/// the file.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub scale: ScaleSpec,
    pub patchmatch: PatchMatchConfig,
    pub speckle: SpeckleConfig,
    pub fusion: FusionConfig,
    /// Mean per-view intensity standard deviation below which a set is
    /// auto-classified as textureless.
    pub texture_std_threshold: f64,
    /// Accepted angular baseline between optical axes when picking
    /// source views, in degrees.
    pub min_baseline_deg: f64,
    pub max_baseline_deg: f64,
    pub tolerances_cm: Vec<f64>,
    /// Defaults for run-level settings; the matching command-line flags
    /// override these.
    pub seed: u64,
    pub textureless: TexturelessMode,
    pub out_dir: String,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            scale: ScaleSpec::default(),
            patchmatch: PatchMatchConfig::default(),
            speckle: SpeckleConfig::default(),
            fusion: FusionConfig::default(),
            texture_std_threshold: 0.02,
            min_baseline_deg: 5.0,
            max_baseline_deg: 45.0,
            tolerances_cm: DEFAULT_TOLERANCES_CM.to_vec(),
            seed: 0,
            textureless: TexturelessMode::Auto,
            out_dir: "out".to_string(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.patchmatch.validate()?;
        self.speckle.validate()?;
        self.fusion.validate()?;
        if !(self.texture_std_threshold > 0.0) {
            return Err(Error::invalid("texture_std_threshold must be positive"));
        }
        if !(0.0 <= self.min_baseline_deg && self.min_baseline_deg < self.max_baseline_deg) {
            return Err(Error::invalid("baseline range must satisfy 0 <= min < max"));
        }
        if self.tolerances_cm.is_empty()
            || self.tolerances_cm[0] <= 0.0
            || self.tolerances_cm.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::invalid(
                "tolerances_cm must be positive and strictly increasing",
            ));
        }
        Ok(())
    }

    /// Serializes every file-settable key; `parse` reads this back.
    pub fn serialize(&self) -> String {
        let pm = &self.patchmatch;
        let tol = self
            .tolerances_cm
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "scale = {}\n\
             patchmatch.window_radius = {}\n\
             patchmatch.min_ncc = {}\n\
             patchmatch.iterations = {}\n\
             patchmatch.depth_min = {}\n\
             patchmatch.depth_max = {}\n\
             patchmatch.perturbation_halving = {}\n\
             patchmatch.source_views_per_pixel = {}\n\
             patchmatch.sigma_color = {}\n\
             speckle.max_depth_range = {}\n\
             speckle.max_speckle_fraction = {}\n\
             fusion.min_consistent_views = {}\n\
             fusion.max_reprojection_error = {}\n\
             fusion.max_relative_depth_diff = {}\n\
             fusion.max_normal_angle_deg = {}\n\
             texture.std_threshold = {}\n\
             views.min_baseline_deg = {}\n\
             views.max_baseline_deg = {}\n\
             eval.tolerances_cm = {}\n\
             seed = {}\n\
             textureless = {}\n\
             out = {}\n",
            self.scale,
            pm.window_radius,
            pm.min_ncc,
            pm.iterations,
            pm.depth_min,
            pm.depth_max,
            pm.perturbation_halving,
            pm.source_views_per_pixel,
            pm.sigma_color,
            self.speckle.max_depth_range,
            self.speckle.max_speckle_fraction,
            self.fusion.min_consistent_views,
            self.fusion.max_reprojection_error,
            self.fusion.max_relative_depth_diff,
            self.fusion.max_normal_angle_deg,
            self.texture_std_threshold,
            self.min_baseline_deg,
            self.max_baseline_deg,
            tol,
            self.seed,
            self.textureless,
            self.out_dir,
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut problems = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                problems.push(format!("line {}: expected `key = value`", no + 1));
                continue;
            };
            let key = key.trim();
            let value = value.trim();
            let mut bad = |what: &str| problems.push(format!("line {}: bad {what} {value:?}", no + 1));
            macro_rules! num {
                ($slot:expr, $ty:ty) => {
                    match value.parse::<$ty>() {
                        Ok(v) => $slot = v,
                        Err(_) => bad(key),
                    }
                };
            }
            match key {
                "scale" => match ScaleSpec::parse(value) {
                    Ok(s) => cfg.scale = s,
                    Err(_) => bad("scale"),
                },
                "patchmatch.window_radius" => num!(cfg.patchmatch.window_radius, usize),
                "patchmatch.min_ncc" => num!(cfg.patchmatch.min_ncc, f64),
                "patchmatch.iterations" => num!(cfg.patchmatch.iterations, usize),
                "patchmatch.depth_min" => num!(cfg.patchmatch.depth_min, f64),
                "patchmatch.depth_max" => num!(cfg.patchmatch.depth_max, f64),
                "patchmatch.perturbation_halving" => num!(cfg.patchmatch.perturbation_halving, usize),
                "patchmatch.source_views_per_pixel" => num!(cfg.patchmatch.source_views_per_pixel, usize),
                "patchmatch.sigma_color" => num!(cfg.patchmatch.sigma_color, f64),
                "speckle.max_depth_range" => num!(cfg.speckle.max_depth_range, f64),
                "speckle.max_speckle_fraction" => num!(cfg.speckle.max_speckle_fraction, f64),
                "fusion.min_consistent_views" => num!(cfg.fusion.min_consistent_views, usize),
                "fusion.max_reprojection_error" => num!(cfg.fusion.max_reprojection_error, f64),
                "fusion.max_relative_depth_diff" => num!(cfg.fusion.max_relative_depth_diff, f64),
                "fusion.max_normal_angle_deg" => num!(cfg.fusion.max_normal_angle_deg, f64),
                "texture.std_threshold" => num!(cfg.texture_std_threshold, f64),
                "views.min_baseline_deg" => num!(cfg.min_baseline_deg, f64),
                "views.max_baseline_deg" => num!(cfg.max_baseline_deg, f64),
                "eval.tolerances_cm" => {
                    match value
                        .split(',')
                        .map(|t| t.trim().parse::<f64>())
                        .collect::<std::result::Result<Vec<f64>, _>>()
                    {
                        Ok(v) => cfg.tolerances_cm = v,
                        Err(_) => bad("tolerance list"),
                    }
                }
                "seed" => num!(cfg.seed, u64),
                "textureless" => match value.parse::<TexturelessMode>() {
                    Ok(m) => cfg.textureless = m,
                    Err(_) => bad("textureless mode"),
                },
                "out" => cfg.out_dir = value.to_string(),
                other => problems.push(format!("line {}: unknown key {other:?}", no + 1)),
            }
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Validation(p) => Error::Validation(
                p.into_iter().map(|m| format!("{}: {m}", path.display())).collect(),
            ),
            other => other,
        })
    }
}

/// Mean per-view intensity standard deviation; the auto textureless
/// heuristic compares this against `texture_std_threshold`.
pub fn mean_intensity_std(views: &[View]) -> f64 {
    if views.is_empty() {
        return 0.0;
    }
    let mut acc = 0.0;
    for v in views {
        let data = v.image.data();
        let n = data.len() as f64;
        let mean = data.iter().sum::<f64>() / n;
        let var = data.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        acc += var.sqrt();
    }
    acc / views.len() as f64
}

fn resolve_textureless(mode: TexturelessMode, views: &[View], threshold: f64) -> bool {
    match mode {
        TexturelessMode::On => true,
        TexturelessMode::Off => false,
        TexturelessMode::Auto => mean_intensity_std(views) < threshold,
    }
}

/// Source views for reference `ref_idx` whose optical-axis angle lies in
/// `[min_deg, max_deg]`. Falls back to the views closest to that range
/// (never empty for >= 2 views).
pub fn select_source_views(
    views: &[View],
    ref_idx: usize,
    min_deg: f64,
    max_deg: f64,
) -> Vec<usize> {
    let axis = |i: usize| views[i].pose.rotation().row(2).transpose();
    let ref_axis = axis(ref_idx);
    let angles: Vec<(usize, f64)> = (0..views.len())
        .filter(|&j| j != ref_idx)
        .map(|j| {
            let c = ref_axis.dot(&axis(j)).clamp(-1.0, 1.0);
            (j, c.acos().to_degrees())
        })
        .collect();
    let eligible: Vec<usize> = angles
        .iter()
        .filter(|(_, a)| (min_deg..=max_deg).contains(a))
        .map(|(j, _)| *j)
        .collect();
    if !eligible.is_empty() {
        return eligible;
    }
    // Fallback: the single view closest to the accepted range.
    angles
        .iter()
        .min_by(|(_, a), (_, b)| {
            let da = (min_deg - a).max(a - max_deg).max(0.0);
            let db = (min_deg - b).max(b - max_deg).max(0.0);
            da.total_cmp(&db)
        })
        .map(|(j, _)| vec![*j])
        .unwrap_or_default()
}

#[derive(Debug, Clone, Copy)]
pub struct ReconstructOptions {
    pub seed: u64,
    /// Worker threads for the per-view parallel stage (0 = rayon default).
    pub jobs: usize,
    pub textureless: TexturelessMode,
    /// Super-resolution factor of the input set relative to its capture
    /// resolution (1.0 when the set was not super-resolved).
    pub sr_factor: f64,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            jobs: 0,
            textureless: TexturelessMode::Auto,
            sr_factor: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub cloud: PointCloud,
    /// Final per-view depth maps (after speckle filtering when active).
    pub depth_maps: Vec<DepthMap>,
    pub textureless: bool,
    /// Fraction of pixels rejected by photoconsistency masking, over all
    /// views, before speckle filtering.
    pub masked_fraction: f64,
}

/// Full reconstruction of a posed image set: undistortion, per-view
/// depth estimation (parallel across views, per-view seed = run seed +
/// view index), speckle filtering on the textureless path, and fusion.
pub fn reconstruct(views: &[View], cfg: &PipelineConfig, opts: &ReconstructOptions) -> Result<Reconstruction> {
    cfg.validate()?;
    if views.len() < 2 {
        return Err(Error::invalid("reconstruction needs at least two views"));
    }
    if !(opts.sr_factor > 0.0) {
        return Err(Error::invalid("sr_factor must be positive"));
    }
    let undistorted: Vec<View> = views.iter().map(undistort_view).collect();
    let textureless = resolve_textureless(opts.textureless, &undistorted, cfg.texture_std_threshold);
    let pm_cfg = if textureless {
        adapt_textureless(&cfg.patchmatch, opts.sr_factor)
    } else {
        cfg.patchmatch.clone()
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let maps: Vec<DepthMap> = pool.install(|| {
        (0..undistorted.len())
            .into_par_iter()
            .map(|i| {
                let src_idx = select_source_views(&undistorted, i, cfg.min_baseline_deg, cfg.max_baseline_deg);
                let sources: Vec<View> = src_idx.iter().map(|&j| undistorted[j].clone()).collect();
                let mut c = pm_cfg.clone();
                c.rng_seed = opts.seed.wrapping_add(i as u64);
                estimate_depth_map(&undistorted[i], &sources, &c)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let total_px: usize = maps.iter().map(|m| m.depth.len()).sum();
    let masked: usize = maps.iter().map(|m| m.depth.len() - m.valid_count()).sum();
    let masked_fraction = masked as f64 / total_px.max(1) as f64;

    let maps = if textureless {
        maps.iter().map(|m| speckle_filter(m, &cfg.speckle)).collect()
    } else {
        maps
    };
    // Drop pixels no other view confirms before fusing.
    let maps = filter_depth_maps(&maps, &undistorted, cfg.fusion.max_relative_depth_diff, 1)?;
    let cloud = fuse(&maps, &undistorted, &cfg.fusion)?;
    Ok(Reconstruction {
        cloud,
        depth_maps: maps,
        textureless,
        masked_fraction,
    })
}

/// One experiment input: the low-resolution capture, the high-resolution
/// reference capture, and the shared ground-truth cloud.
#[derive(Debug, Clone)]
pub struct ExperimentScene {
    pub name: String,
    pub lr: SequenceSet,
    /// High-resolution reference capture; omitted when the input is a
    /// dataset with no HR imagery (drops the HR arm).
    pub hr: Option<SequenceSet>,
    pub gt_cloud: PointCloud,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    /// Per-scene, per-arm score tables (scene and model fields set).
    pub tables: Vec<ScoreTable>,
    /// Per-arm aggregates over scenes (scene = "aggregate").
    pub aggregates: Vec<ScoreTable>,
    pub warnings: Vec<String>,
    /// Wall-clock seconds per (scene, arm); informational only and never
    /// written into report files.
    pub timings: Vec<(String, String, f64)>,
    /// Reconstructed cloud per (scene, arm), in table order.
    pub clouds: Vec<(String, String, PointCloud)>,
}

impl ExperimentReport {
    pub fn arm_labels(&self) -> Vec<String> {
        let mut labels = Vec::new();
        for t in &self.tables {
            if !labels.contains(&t.model) {
                labels.push(t.model.clone());
            }
        }
        labels
    }

    /// Combined CSV: per-scene rows followed by per-arm aggregates.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("scene,model,tau_cm,accuracy,completeness,f1\n");
        for t in self.tables.iter().chain(&self.aggregates) {
            for r in &t.rows {
                s.push_str(&format!(
                    "{},{},{:.4},{:.4},{:.4},{:.4}\n",
                    t.scene, t.model, r.tau_cm, r.accuracy, r.completeness, r.f1
                ));
            }
        }
        s
    }

    /// Human-readable report: every table plus baseline-versus-upsampled
    /// improvement summaries.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in self.tables.iter().chain(&self.aggregates) {
            s.push_str(&t.to_text());
            s.push('\n');
        }
        let find = |label: &str| self.aggregates.iter().find(|t| t.model == label);
        if let (Some(lr), Some(bc)) = (find("LR"), find("BC")) {
            if let Ok(rep) = improvement_report(lr, bc) {
                s.push_str("BC minus LR (aggregate):\n");
                for (i, tau) in rep.tau_cm.iter().enumerate() {
                    s.push_str(&format!(
                        "  tau {tau} cm: accuracy {:+.4}, completeness {:+.4}, F1 {:+.4}\n",
                        rep.d_accuracy[i], rep.d_completeness[i], rep.d_f1[i]
                    ));
                }
                s.push_str(&format!(
                    "  mean: accuracy {:+.4}, completeness {:+.4}, F1 {:+.4}\n",
                    rep.mean_d_accuracy, rep.mean_d_completeness, rep.mean_d_f1
                ));
            }
        }
        s
    }
}

/// Runs the comparison experiment: for every scene, reconstructs from the
/// low-resolution images (LR), from their bicubic super-resolution (BC),
/// optionally from externally super-resolved images (EXT), and from the
/// high-resolution reference (HR), scoring each against the shared
/// ground truth.
pub fn run_experiment(
    scenes: &[ExperimentScene],
    cfg: &PipelineConfig,
    opts: &ReconstructOptions,
    external_dir: Option<&Path>,
) -> Result<ExperimentReport> {
    cfg.validate()?;
    if scenes.is_empty() {
        return Err(Error::invalid("experiment needs at least one scene"));
    }
    let mut tables = Vec::new();
    let mut warnings = Vec::new();
    let mut timings = Vec::new();
    let mut clouds = Vec::new();

    for scene in scenes {
        let mut arms: Vec<(String, SequenceSet, f64)> = Vec::new();
        arms.push(("LR".into(), scene.lr.clone(), 1.0));
        let bc = super_resolve_set(&scene.lr, cfg.scale)?;
        arms.push(("BC".into(), bc, cfg.scale.factor()));
        if let Some(dir) = external_dir {
            let scene_dir = dir.join(&scene.name);
            let outcome = ingest_external_sr(&scene.lr, &scene_dir, cfg.scale)?;
            warnings.extend(outcome.warnings.into_iter().map(|w| format!("{}: {w}", scene.name)));
            arms.push(("EXT".into(), outcome.set, cfg.scale.factor()));
        }
        if let Some(hr) = &scene.hr {
            arms.push(("HR".into(), hr.clone(), 1.0));
        }

        for (label, set, sr_factor) in arms {
            let t0 = Instant::now();
            let rec = reconstruct(&set.views, cfg, &ReconstructOptions { sr_factor, ..*opts })?;
            let mut table = evaluate(&rec.cloud, &scene.gt_cloud, &cfg.tolerances_cm)?;
            table.scene = scene.name.clone();
            table.model = label.clone();
            tables.push(table);
            timings.push((scene.name.clone(), label.clone(), t0.elapsed().as_secs_f64()));
            clouds.push((scene.name.clone(), label, rec.cloud));
        }
    }

    let mut report = ExperimentReport {
        tables,
        aggregates: Vec::new(),
        warnings,
        timings,
        clouds,
    };
    for label in report.arm_labels() {
        let per_scene: Vec<ScoreTable> = report
            .tables
            .iter()
            .filter(|t| t.model == label)
            .cloned()
            .collect();
        report.aggregates.push(aggregate(&per_scene)?);
    }
    Ok(report)
}
