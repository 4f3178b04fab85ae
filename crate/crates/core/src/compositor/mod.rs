//! Domain-randomized scene synthesis: sprite extraction from alpha-matted
//! captures, randomized placement with scale/rotation/brightness
//! augmentation, and paired composite/instance-mask rendering.
//!
//! Each image's randomness comes from its own stream keyed on
//! `(master_seed, image_index)`, so generation parallelizes without
//! affecting output. Later placements occlude earlier ones; ground truth
//! covers visible pixels only, and fully occluded instances are removed.

mod config;
mod dataset;
mod scene;
mod sprite;

pub use config::SynthConfig;
pub use dataset::{
    generate_dataset, load_backgrounds, load_sprite_pool, Manifest, ManifestCategory,
    ManifestImage, SpritePool, TOOL_VERSION,
};
pub use scene::{
    color_code, instance_color, plan_scene, render_scene, InstanceRecord, LabeledImage, Placement,
};
pub use sprite::{
    extract_sprites, sprite_from_image, transform_sprite, transformed_extent, Sprite,
    DEFAULT_ALPHA_THRESHOLD,
};
