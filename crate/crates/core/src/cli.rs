//! Command-line front end: `sprites extract`, `synth`, `eval`, `measure`.
//!
//! Directory-producing commands build into a temporary sibling directory
//! and rename into place on success, so a failed run never leaves a
//! partially overwritten output tree. Every run records its fully resolved
//! configuration and tool version in a `run-config.json`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use image::RgbaImage;

use crate::annotations::parse_coco;
use crate::compositor::{
    color_code, extract_sprites, generate_dataset, Manifest, SynthConfig, TOOL_VERSION,
};
use crate::error::{Error, Result};
use crate::mask::{connected_components, fill_polygons, BinaryMask, Connectivity};
use crate::metrics::{evaluate_dataset, format_report_table, EvalOptions, PredictionRecord};
use crate::morphometry::{calibrate, csv_report, measure_instance, CoinStat, MorphometryRecord};

#[derive(Parser)]
#[command(name = "seedkit", version, about = "Synthetic seed dataset generation, annotation, evaluation, and morphometry")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sprite operations.
    Sprites {
        #[command(subcommand)]
        command: SpritesCommand,
    },
    /// Generate a synthetic dataset with instance masks and annotations.
    Synth(SynthArgs),
    /// Evaluate detector predictions against COCO ground truth.
    Eval(EvalArgs),
    /// Coin-calibrated morphometry over instance masks.
    Measure(MeasureArgs),
}

#[derive(Subcommand)]
enum SpritesCommand {
    /// Extract tight-cropped sprites from alpha-matted captures.
    Extract(ExtractArgs),
}

#[derive(Args)]
struct ExtractArgs {
    /// Directory of RGBA PNG captures.
    #[arg(long)]
    input: PathBuf,
    /// Output directory for sprite PNGs.
    #[arg(long)]
    output: PathBuf,
    /// Foreground alpha threshold (0-255).
    #[arg(long, default_value_t = 128)]
    alpha_threshold: u8,
    /// Minimum sprite area in pixels.
    #[arg(long, default_value_t = 16)]
    min_area: usize,
    /// Class label stored on extracted sprites.
    #[arg(long, default_value = "seed")]
    class: String,
}

#[derive(Args)]
struct SynthArgs {
    /// TOML config file with SynthConfig keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sprite directory (flat, or one subdirectory per class).
    #[arg(long)]
    sprites: PathBuf,
    /// Background PNG directory.
    #[arg(long)]
    backgrounds: PathBuf,
    /// Output dataset directory.
    #[arg(long)]
    out: PathBuf,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker count; output is identical for any value.
    #[arg(long)]
    jobs: Option<usize>,
    /// Images per class override.
    #[arg(long)]
    images_per_class: Option<u32>,
}

#[derive(Args)]
struct EvalArgs {
    /// Ground-truth COCO JSON.
    #[arg(long)]
    gt: PathBuf,
    /// Predictions JSON (COCO results array).
    #[arg(long)]
    pred: PathBuf,
    /// IoU kind for AP columns.
    #[arg(long, value_enum, default_value_t = IouArg::Mask)]
    iou: IouArg,
    /// Upper bound of the AP threshold ladder.
    #[arg(long, default_value_t = 0.95)]
    ap_max: f64,
    /// Drop detections scoring below this.
    #[arg(long)]
    score_threshold: Option<f64>,
    /// Output report JSON path.
    #[arg(long)]
    report: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum IouArg {
    Bbox,
    Mask,
}

#[derive(Args)]
struct MeasureArgs {
    /// Synth output directory (manifest.json + masks/). Mutually exclusive
    /// with --coco.
    #[arg(long, conflicts_with = "coco")]
    masks: Option<PathBuf>,
    /// COCO JSON with polygon segmentations.
    #[arg(long)]
    coco: Option<PathBuf>,
    /// Directory of coin mask PNGs for calibration.
    #[arg(long)]
    coins: PathBuf,
    /// Statistic of the coin pixel areas anchoring the scale.
    #[arg(long, value_enum, default_value_t = CoinStatArg::Median)]
    coin_stat: CoinStatArg,
    /// Measure only instances of this class.
    #[arg(long)]
    class_filter: Option<String>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoinStatArg {
    Median,
    Mean,
}

/// Parses `argv` and runs the selected subcommand. Returns the process
/// exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through this path with exit code 0
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sprites {
            command: SpritesCommand::Extract(args),
        } => cmd_extract(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Measure(args) => cmd_measure(args),
    }
}

fn write_run_config(dir: &Path, command: &str, options: serde_json::Value) -> Result<()> {
    let doc = serde_json::json!({
        "tool_version": TOOL_VERSION,
        "command": command,
        "options": options,
    });
    let path = dir.join("run-config.json");
    fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).map_err(|e| Error::io(path, e))
}

/// Runs `build` against a temporary sibling of `out`, then swaps it into
/// place. On error the existing `out` is untouched.
fn build_into(out: &Path, build: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
    let file_name = out
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("bad output path {}", out.display())))?;
    let tmp = out.with_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    if tmp.exists() {
        fs::remove_dir_all(&tmp).map_err(|e| Error::io(&tmp, e))?;
    }
    fs::create_dir_all(&tmp).map_err(|e| Error::io(&tmp, e))?;
    match build(&tmp) {
        Ok(()) => {
            if out.exists() {
                fs::remove_dir_all(out).map_err(|e| Error::io(out, e))?;
            }
            fs::rename(&tmp, out).map_err(|e| Error::io(out, e))
        }
        Err(e) => {
            let _ = fs::remove_dir_all(&tmp);
            Err(e)
        }
    }
}

fn cmd_extract(args: ExtractArgs) -> Result<()> {
    let inputs = png_files(&args.input)?;
    if inputs.is_empty() {
        return Err(Error::EmptyInput("no PNG files in the input directory"));
    }
    build_into(&args.output, |out| {
        let mut total = 0usize;
        for path in &inputs {
            let img = load_rgba(path)?;
            let stem = path.file_stem().unwrap().to_string_lossy();
            let sprites = extract_sprites(&img, args.alpha_threshold, args.min_area, &args.class, &stem);
            for (i, sprite) in sprites.iter().enumerate() {
                let dest = out.join(format!("{stem}_{i:03}.png"));
                sprite.pixels.save(&dest).map_err(|e| Error::Image {
                    path: dest.clone(),
                    source: e,
                })?;
                total += 1;
            }
        }
        println!("extracted {total} sprites from {} captures", inputs.len());
        write_run_config(
            out,
            "sprites extract",
            serde_json::json!({
                "input": args.input,
                "alpha_threshold": args.alpha_threshold,
                "min_area": args.min_area,
                "class": args.class,
            }),
        )
    })
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let mut config: SynthConfig = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            toml::from_str(&text).map_err(|e| Error::InvalidConfig {
                field: "config",
                reason: e.to_string(),
            })?
        }
        None => SynthConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(n) = args.images_per_class {
        config.images_per_class = n;
    }
    config.validate()?;

    build_into(&args.out, |out| {
        let manifest = generate_dataset(&config, &args.sprites, &args.backgrounds, out, args.jobs)?;
        println!(
            "generated {} images across {} classes",
            manifest.images.len(),
            manifest.categories.len()
        );
        write_run_config(
            out,
            "synth",
            serde_json::json!({
                "config": config,
                "sprites": args.sprites,
                "backgrounds": args.backgrounds,
                "jobs_note": "output independent of --jobs",
            }),
        )
    })
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let gt_bytes = fs::read(&args.gt).map_err(|e| Error::io(&args.gt, e))?;
    let gt = parse_coco(&gt_bytes)?;
    let pred_bytes = fs::read(&args.pred).map_err(|e| Error::io(&args.pred, e))?;
    let predictions: Vec<PredictionRecord> =
        serde_json::from_slice(&pred_bytes).map_err(|e| Error::Json {
            path: args.pred.clone(),
            source: e,
        })?;
    let options = EvalOptions {
        ap_iou: match args.iou {
            IouArg::Bbox => "bbox".into(),
            IouArg::Mask => "mask".into(),
        },
        ap_max: args.ap_max,
        score_threshold: args.score_threshold,
    };
    let report = evaluate_dataset(&gt, &predictions, &options)?;
    let json = serde_json::to_string_pretty(&report).unwrap();
    fs::write(&args.report, json).map_err(|e| Error::io(&args.report, e))?;
    print!("{}", format_report_table(&report));

    let sidecar = sidecar_run_config(&args.report);
    let doc = serde_json::json!({
        "tool_version": TOOL_VERSION,
        "command": "eval",
        "options": options,
        "gt": args.gt,
        "pred": args.pred,
    });
    fs::write(&sidecar, serde_json::to_string_pretty(&doc).unwrap())
        .map_err(|e| Error::io(sidecar, e))?;
    Ok(())
}

fn sidecar_run_config(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".into());
    output.with_file_name(format!("{stem}.run-config.json"))
}

fn cmd_measure(args: MeasureArgs) -> Result<()> {
    let stat = match args.coin_stat {
        CoinStatArg::Median => CoinStat::Median,
        CoinStatArg::Mean => CoinStat::Mean,
    };
    let coin_masks = load_coin_masks(&args.coins)?;
    let calibration = calibrate(&coin_masks, stat)?;

    let per_image = match (&args.masks, &args.coco) {
        (Some(dataset_dir), None) => measure_from_manifest(dataset_dir, &calibration, args.class_filter.as_deref())?,
        (None, Some(coco_path)) => measure_from_coco(coco_path, &calibration, args.class_filter.as_deref())?,
        _ => {
            return Err(Error::InvalidArgument(
                "exactly one of --masks or --coco is required".into(),
            ))
        }
    };

    let csv = csv_report(&per_image, &calibration);
    fs::write(&args.out, csv).map_err(|e| Error::io(&args.out, e))?;
    let total: usize = per_image.iter().map(|(_, r)| r.len()).sum();
    println!(
        "measured {total} instances over {} images (coin_px = {})",
        per_image.len(),
        calibration.coin_px
    );

    let sidecar = sidecar_run_config(&args.out);
    let doc = serde_json::json!({
        "tool_version": TOOL_VERSION,
        "command": "measure",
        "coin_stat": stat,
        "class_filter": args.class_filter,
        "coins": args.coins,
        "calibration": calibration,
    });
    fs::write(&sidecar, serde_json::to_string_pretty(&doc).unwrap())
        .map_err(|e| Error::io(sidecar, e))?;
    Ok(())
}

/// Each distinct non-black color in each coin PNG contributes one coin per
/// 8-connected component, so both unique-color masks and plain binary
/// masks with separated pennies work.
fn load_coin_masks(dir: &Path) -> Result<Vec<BinaryMask>> {
    let files = png_files(dir)?;
    if files.is_empty() {
        return Err(Error::EmptyInput("no coin mask PNGs found"));
    }
    let mut coins = Vec::new();
    for path in files {
        let img = image::open(&path)
            .map_err(|e| Error::Image {
                path: path.clone(),
                source: e,
            })?
            .to_rgb8();
        let mut colors: BTreeMap<u32, ()> = BTreeMap::new();
        for p in img.pixels() {
            let c = color_code(p);
            if c != 0 {
                colors.insert(c, ());
            }
        }
        for &color in colors.keys() {
            let region = BinaryMask::from_fn(img.width(), img.height(), |x, y| {
                color_code(img.get_pixel(x, y)) == color
            });
            for comp in connected_components(&region, Connectivity::Eight) {
                let mut coin = BinaryMask::new(img.width(), img.height());
                for &(x, y) in &comp.pixels {
                    coin.set(x, y, true);
                }
                coins.push(coin);
            }
        }
    }
    Ok(coins)
}

type PerImageRecords = Vec<(String, Vec<MorphometryRecord>)>;

fn measure_from_manifest(
    dataset_dir: &Path,
    calibration: &crate::morphometry::Calibration,
    class_filter: Option<&str>,
) -> Result<PerImageRecords> {
    let manifest_path = dataset_dir.join("manifest.json");
    let bytes = fs::read(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: Manifest = serde_json::from_slice(&bytes).map_err(|e| Error::Json {
        path: manifest_path,
        source: e,
    })?;
    let mut per_image = Vec::new();
    for entry in &manifest.images {
        let mask_path = dataset_dir.join(&entry.mask);
        let mask_img = image::open(&mask_path)
            .map_err(|e| Error::Image {
                path: mask_path.clone(),
                source: e,
            })?
            .to_rgb8();
        let mut records = Vec::new();
        for record in &entry.records {
            if let Some(filter) = class_filter {
                if record.class_label != filter {
                    continue;
                }
            }
            let region = BinaryMask::from_fn(mask_img.width(), mask_img.height(), |x, y| {
                color_code(mask_img.get_pixel(x, y)) == record.color
            });
            records.push(measure_instance(
                &region,
                calibration,
                record.instance_id,
                &record.class_label,
            )?);
        }
        per_image.push((entry.mask.clone(), records));
    }
    Ok(per_image)
}

fn measure_from_coco(
    coco_path: &Path,
    calibration: &crate::morphometry::Calibration,
    class_filter: Option<&str>,
) -> Result<PerImageRecords> {
    let bytes = fs::read(coco_path).map_err(|e| Error::io(coco_path, e))?;
    let doc = parse_coco(&bytes)?;
    let names: BTreeMap<u32, &str> = doc
        .categories
        .iter()
        .map(|c| (c.id, c.name.as_str()))
        .collect();
    let mut per_image = Vec::new();
    for img in &doc.images {
        let mut records = Vec::new();
        for ann in doc.annotations.iter().filter(|a| a.image_id == img.id) {
            let class = names.get(&ann.category_id).copied().unwrap_or("unknown");
            if let Some(filter) = class_filter {
                if class != filter {
                    continue;
                }
            }
            let polys: Vec<crate::Polygon> = ann
                .segmentation
                .iter()
                .map(|coords| {
                    crate::Polygon::new(
                        coords
                            .chunks_exact(2)
                            .map(|c| crate::Point::new(c[0], c[1]))
                            .collect(),
                    )
                })
                .collect();
            if polys.is_empty() {
                return Err(Error::Annotation(format!(
                    "annotation {} has no segmentation; measurement needs polygons",
                    ann.id
                )));
            }
            let mask = fill_polygons(&polys, img.width, img.height);
            records.push(measure_instance(
                &mask,
                calibration,
                ann.id as u32,
                class,
            )?);
        }
        per_image.push((img.file_name.clone(), records));
    }
    Ok(per_image)
}

fn png_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file()
            && path
                .extension()
                .map(|e| e.eq_ignore_ascii_case("png"))
                .unwrap_or(false)
        {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn load_rgba(path: &Path) -> Result<RgbaImage> {
    Ok(image::open(path)
        .map_err(|e| Error::Image {
            path: path.to_path_buf(),
            source: e,
        })?
        .to_rgba8())
}
