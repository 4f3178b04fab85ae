use std::fs;
use std::path::{Path, PathBuf};

use image::imageops::FilterType;
use image::{DynamicImage, RgbImage};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::SynthConfig;
use super::scene::{plan_scene, render_scene, InstanceRecord};
use super::sprite::{sprite_from_image, Sprite};
use crate::annotations::{
    instances_from_mask, write_coco, write_yolo, CocoAnnotation, CocoCategory, CocoDocument,
    CocoImage,
};
use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Per-class sprite pool loaded from disk.
pub struct SpritePool {
    pub classes: Vec<String>,
    /// `sprites[c]` holds the sprites of `classes[c]`.
    pub sprites: Vec<Vec<Sprite>>,
}

/// Loads sprite PNGs. A directory of subdirectories is treated as one
/// class per subdirectory; a flat directory of PNGs is a single class
/// named after the directory.
pub fn load_sprite_pool(dir: &Path, alpha_threshold: u8) -> Result<SpritePool> {
    let mut subdirs: Vec<PathBuf> = list_dir(dir)?
        .into_iter()
        .filter(|p| p.is_dir())
        .collect();
    subdirs.sort();

    let mut classes = Vec::new();
    let mut sprites = Vec::new();
    let class_dirs: Vec<(String, PathBuf)> = if subdirs.is_empty() {
        let name = dir
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "object".to_string());
        vec![(name, dir.to_path_buf())]
    } else {
        subdirs
            .into_iter()
            .map(|p| {
                let name = p.file_name().unwrap().to_string_lossy().into_owned();
                (name, p)
            })
            .collect()
    };

    for (name, class_dir) in class_dirs {
        let mut pool = Vec::new();
        for path in png_files(&class_dir)? {
            let img = load_rgba(&path)?;
            let source_id = path.file_stem().unwrap().to_string_lossy().into_owned();
            pool.push(sprite_from_image(&img, alpha_threshold, &name, &source_id)?);
        }
        if pool.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "sprite class directory {} contains no PNG files",
                class_dir.display()
            )));
        }
        classes.push(name);
        sprites.push(pool);
    }
    if classes.is_empty() {
        return Err(Error::EmptyInput("no sprite classes found"));
    }
    Ok(SpritePool { classes, sprites })
}

/// Loads backgrounds and normalizes each to the canvas size: larger images
/// are scaled to cover then center-cropped; smaller ones are rejected.
pub fn load_backgrounds(dir: &Path, canvas: (u32, u32)) -> Result<Vec<RgbImage>> {
    let files = png_files(dir)?;
    if files.is_empty() {
        return Err(Error::EmptyInput("no background PNG files found"));
    }
    files
        .iter()
        .map(|path| {
            let img = image::open(path)
                .map_err(|e| Error::Image {
                    path: path.clone(),
                    source: e,
                })?
                .to_rgb8();
            prepare_background(img, canvas, path)
        })
        .collect()
}

fn prepare_background(img: RgbImage, (cw, ch): (u32, u32), path: &Path) -> Result<RgbImage> {
    let (w, h) = (img.width(), img.height());
    if w == cw && h == ch {
        return Ok(img);
    }
    if w < cw || h < ch {
        return Err(Error::BackgroundTooSmall {
            path: path.to_path_buf(),
            w,
            h,
            canvas_w: cw,
            canvas_h: ch,
        });
    }
    // scale to cover, then center-crop
    let factor = (cw as f64 / w as f64).max(ch as f64 / h as f64);
    let sw = ((w as f64 * factor).round() as u32).max(cw);
    let sh = ((h as f64 * factor).round() as u32).max(ch);
    let scaled = DynamicImage::ImageRgb8(img)
        .resize_exact(sw, sh, FilterType::Triangle)
        .to_rgb8();
    let x0 = (sw - cw) / 2;
    let y0 = (sh - ch) / 2;
    Ok(image::imageops::crop_imm(&scaled, x0, y0, cw, ch).to_image())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestCategory {
    pub name: String,
    /// COCO category id (1-based).
    pub coco_id: u32,
    /// YOLO class id (0-based).
    pub yolo_id: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestImage {
    pub index: u32,
    pub class: String,
    pub image: String,
    pub mask: String,
    pub labels: String,
    pub records: Vec<InstanceRecord>,
}

/// `manifest.json` contents: the resolved config plus per-image ground
/// truth records.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub config: SynthConfig,
    pub categories: Vec<ManifestCategory>,
    pub images: Vec<ManifestImage>,
}

/// Generates the full dataset under `out_dir`: `images/NNNNN.png`,
/// `masks/NNNNN.png`, `labels/NNNNN.txt`, `coco.json`, `manifest.json`.
/// Output bytes are a pure function of the config and input files,
/// independent of `jobs`.
pub fn generate_dataset(
    config: &SynthConfig,
    sprite_dir: &Path,
    background_dir: &Path,
    out_dir: &Path,
    jobs: Option<usize>,
) -> Result<Manifest> {
    config.validate()?;
    let pool = load_sprite_pool(sprite_dir, config.alpha_threshold)?;
    let backgrounds = load_backgrounds(background_dir, config.canvas_size)?;

    for sub in ["images", "masks", "labels"] {
        fs::create_dir_all(out_dir.join(sub)).map_err(|e| Error::io(out_dir.join(sub), e))?;
    }

    let total = pool.classes.len() as u32 * config.images_per_class;
    let indices: Vec<u32> = (0..total).collect();

    let run = |indices: &[u32]| -> Result<Vec<(ManifestImage, CocoImage, Vec<CocoAnnotation>)>> {
        indices
            .par_iter()
            .map(|&index| render_one(config, &pool, &backgrounds, out_dir, index))
            .collect()
    };
    let mut per_image = match jobs {
        Some(n) => {
            let threadpool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            threadpool.install(|| run(&indices))?
        }
        None => run(&indices)?,
    };
    per_image.sort_by_key(|(m, _, _)| m.index);

    // sequential annotation ids in image order
    let mut next_ann_id = 1u64;
    let mut coco_images = Vec::new();
    let mut coco_annotations = Vec::new();
    let mut manifest_images = Vec::new();
    for (manifest_image, coco_image, anns) in per_image {
        coco_images.push(coco_image);
        for mut ann in anns {
            ann.id = next_ann_id;
            next_ann_id += 1;
            coco_annotations.push(ann);
        }
        manifest_images.push(manifest_image);
    }

    let categories: Vec<ManifestCategory> = pool
        .classes
        .iter()
        .enumerate()
        .map(|(i, name)| ManifestCategory {
            name: name.clone(),
            coco_id: i as u32 + 1,
            yolo_id: i as u32,
        })
        .collect();

    let coco = CocoDocument {
        images: coco_images,
        annotations: coco_annotations,
        categories: categories
            .iter()
            .map(|c| CocoCategory {
                id: c.coco_id,
                name: c.name.clone(),
            })
            .collect(),
    };
    write_text(&out_dir.join("coco.json"), &write_coco(&coco)?)?;

    let manifest = Manifest {
        tool_version: TOOL_VERSION.to_string(),
        config: config.clone(),
        categories,
        images: manifest_images,
    };
    let manifest_json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Annotation(e.to_string()))?;
    write_text(&out_dir.join("manifest.json"), &manifest_json)?;

    Ok(manifest)
}

fn render_one(
    config: &SynthConfig,
    pool: &SpritePool,
    backgrounds: &[RgbImage],
    out_dir: &Path,
    index: u32,
) -> Result<(ManifestImage, CocoImage, Vec<CocoAnnotation>)> {
    let class_index = (index / config.images_per_class) as usize;
    let class = &pool.classes[class_index];
    let sprites = &pool.sprites[class_index];
    let background = &backgrounds[index as usize % backgrounds.len()];

    let plan = plan_scene(config, sprites, index as u64)?;
    let labeled = render_scene(&plan, sprites, background, config)?;
    let geometry = instances_from_mask(&labeled.instance_mask, &labeled.records)?;

    let stem = format!("{index:05}");
    let image_rel = format!("images/{stem}.png");
    let mask_rel = format!("masks/{stem}.png");
    let labels_rel = format!("labels/{stem}.txt");

    save_rgb(&labeled.composite, &out_dir.join(&image_rel))?;
    save_rgb(&labeled.instance_mask, &out_dir.join(&mask_rel))?;

    let yolo_boxes: Vec<(u32, crate::Box2)> = geometry
        .iter()
        .map(|g| (class_index as u32, g.bbox))
        .collect();
    write_text(
        &out_dir.join(&labels_rel),
        &write_yolo(&yolo_boxes, config.canvas_size)?,
    )?;

    let coco_image = CocoImage {
        id: index as u64 + 1,
        file_name: image_rel.clone(),
        width: config.canvas_size.0,
        height: config.canvas_size.1,
    };
    let annotations = geometry
        .iter()
        .map(|g| CocoAnnotation {
            id: 0, // assigned globally after ordering
            image_id: index as u64 + 1,
            category_id: class_index as u32 + 1,
            segmentation: g
                .polygons
                .iter()
                .map(|poly| {
                    poly.vertices
                        .iter()
                        .flat_map(|p| [p.x, p.y])
                        .collect::<Vec<f64>>()
                })
                .collect(),
            area: g.pixel_area as f64,
            bbox: [g.bbox.x, g.bbox.y, g.bbox.w, g.bbox.h],
            iscrowd: 0,
        })
        .collect();

    Ok((
        ManifestImage {
            index,
            class: class.clone(),
            image: image_rel,
            mask: mask_rel,
            labels: labels_rel,
            records: labeled.records,
        },
        coco_image,
        annotations,
    ))
}

fn list_dir(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = Vec::new();
    for entry in entries {
        out.push(entry.map_err(|e| Error::io(dir, e))?.path());
    }
    out.sort();
    Ok(out)
}

fn png_files(dir: &Path) -> Result<Vec<PathBuf>> {
    Ok(list_dir(dir)?
        .into_iter()
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .map(|e| e.eq_ignore_ascii_case("png"))
                    .unwrap_or(false)
        })
        .collect())
}

fn load_rgba(path: &Path) -> Result<image::RgbaImage> {
    Ok(image::open(path)
        .map_err(|e| Error::Image {
            path: path.to_path_buf(),
            source: e,
        })?
        .to_rgba8())
}

fn save_rgb(img: &RgbImage, path: &Path) -> Result<()> {
    img.save(path).map_err(|e| Error::Image {
        path: path.to_path_buf(),
        source: e,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
