use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scene-synthesis parameters. Serialized as flat TOML/JSON keys; every
/// field has a default so partial config files work.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    /// Output canvas (width, height) in pixels.
    pub canvas_size: (u32, u32),
    /// Composite/mask pairs generated per class.
    pub images_per_class: u32,
    /// Inclusive range of object count per image.
    pub count_range: (u32, u32),
    /// Uniform sprite scale multiplier range.
    pub scale_range: (f64, f64),
    /// Uniform rotation range in degrees, sampled in [lo, hi).
    pub rotation_range: (f64, f64),
    /// Uniform RGB brightness multiplier range.
    pub brightness_range: (f64, f64),
    /// Instances whose visible fraction falls below this are dropped from
    /// the ground truth (0 drops only fully occluded instances).
    pub min_visible_fraction: f64,
    /// Position rejection-sampling budget per placement.
    pub max_place_retries: u32,
    /// Master seed; every image derives its own stream from it.
    pub master_seed: u64,
    /// Alpha threshold for sprite footprints when loading sprite files.
    pub alpha_threshold: u8,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            canvas_size: (768, 768),
            images_per_class: 275,
            count_range: (450, 600),
            scale_range: (0.7, 1.3),
            rotation_range: (0.0, 360.0),
            brightness_range: (0.8, 1.2),
            min_visible_fraction: 0.0,
            max_place_retries: 100,
            master_seed: 0,
            alpha_threshold: 128,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let field_err = |field: &'static str, reason: String| Err(Error::InvalidConfig { field, reason });
        if self.canvas_size.0 == 0 || self.canvas_size.1 == 0 {
            return field_err("canvas_size", format!("must be positive, got {:?}", self.canvas_size));
        }
        if self.count_range.0 > self.count_range.1 {
            return field_err("count_range", format!("min > max: {:?}", self.count_range));
        }
        if !(self.scale_range.0 > 0.0 && self.scale_range.0 <= self.scale_range.1) {
            return field_err("scale_range", format!("need 0 < lo <= hi, got {:?}", self.scale_range));
        }
        if self.rotation_range.0 > self.rotation_range.1 {
            return field_err("rotation_range", format!("lo > hi: {:?}", self.rotation_range));
        }
        if !(self.brightness_range.0 >= 0.0 && self.brightness_range.0 <= self.brightness_range.1) {
            return field_err("brightness_range", format!("need 0 <= lo <= hi, got {:?}", self.brightness_range));
        }
        if !(0.0..=1.0).contains(&self.min_visible_fraction) {
            return field_err("min_visible_fraction", format!("must be in [0,1], got {}", self.min_visible_fraction));
        }
        Ok(())
    }
}
