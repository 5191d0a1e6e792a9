//! Post-processing filters for sensor-layer hardware corner cases, applied
//! to captured camera frames stored as binary portable pixmaps (P6).

use std::collections::BTreeSet;
use std::io::Cursor;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder, ImageFormat};
pub use image::{Rgb, RgbImage};
use thiserror::Error;

pub const DIRECTIVE_HEADER: &str = "DEADPIXELS/1";
pub const BLACK: [u8; 3] = [0, 0, 0];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EffectError {
    #[error("mask is {mask_w}x{mask_h} but the image is {image_w}x{image_h}")]
    DimensionMismatch {
        mask_w: u32,
        mask_h: u32,
        image_w: u32,
        image_h: u32,
    },
    #[error("gain must be finite and greater than 1, got {0}")]
    BadGain(f64),
    #[error("dead-pixel mask must contain at least one pixel")]
    EmptyMask,
    #[error("pixel ({x}, {y}) lies outside {width}x{height}")]
    OutOfBounds { x: u32, y: u32, width: u32, height: u32 },
    #[error("directive line {line}: {detail}")]
    Directive { line: usize, detail: String },
    #[error("image: {0}")]
    Image(String),
}

/// Dead pixels of a sensor, stuck at `fill` (black unless stated otherwise).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelMask {
    width: u32,
    height: u32,
    dead: BTreeSet<(u32, u32)>,
    fill: [u8; 3],
}

impl PixelMask {
    pub fn new(
        width: u32,
        height: u32,
        pixels: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self, EffectError> {
        let dead: BTreeSet<(u32, u32)> = pixels.into_iter().collect();
        if dead.is_empty() {
            return Err(EffectError::EmptyMask);
        }
        if let Some(&(x, y)) = dead.iter().find(|(x, y)| *x >= width || *y >= height) {
            return Err(EffectError::OutOfBounds { x, y, width, height });
        }
        Ok(PixelMask {
            width,
            height,
            dead,
            fill: BLACK,
        })
    }

    pub fn with_fill(mut self, fill: [u8; 3]) -> Self {
        self.fill = fill;
        self
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn fill(&self) -> [u8; 3] {
        self.fill
    }

    pub fn dead_pixels(&self) -> &BTreeSet<(u32, u32)> {
        &self.dead
    }

    pub fn len(&self) -> usize {
        self.dead.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dead.is_empty()
    }

    /// Parses a mask directive:
    ///
    /// ```text
    /// DEADPIXELS/1
    /// size <width> <height>
    /// fill <r> <g> <b>        (optional, default 0 0 0)
    /// px <x> <y>              (one per dead pixel)
    /// ```
    ///
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse_directive(text: &str) -> Result<Self, EffectError> {
        let err = |line: usize, detail: &str| EffectError::Directive {
            line,
            detail: detail.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some((_, DIRECTIVE_HEADER)) => {}
            Some((n, _)) => return Err(err(n, "expected DEADPIXELS/1 header")),
            None => return Err(err(1, "empty directive")),
        }
        let mut size = None;
        let mut fill = BLACK;
        let mut pixels = Vec::new();
        for (n, line) in lines {
            let mut parts = line.split_whitespace();
            let keyword = parts.next().unwrap_or_default();
            let args: Vec<&str> = parts.collect();
            match (keyword, args.len()) {
                ("size", 2) => {
                    let w = args[0].parse().map_err(|_| err(n, "bad width"))?;
                    let h = args[1].parse().map_err(|_| err(n, "bad height"))?;
                    size = Some((w, h));
                }
                ("fill", 3) => {
                    for (slot, a) in fill.iter_mut().zip(&args) {
                        *slot = a.parse().map_err(|_| err(n, "fill channels are 0-255"))?;
                    }
                }
                ("px", 2) => {
                    let x = args[0].parse().map_err(|_| err(n, "bad x"))?;
                    let y = args[1].parse().map_err(|_| err(n, "bad y"))?;
                    pixels.push((x, y));
                }
                _ => return Err(err(n, &format!("unrecognized line {line:?}"))),
            }
        }
        let (w, h) = size.ok_or_else(|| err(1, "missing size line"))?;
        Ok(PixelMask::new(w, h, pixels)?.with_fill(fill))
    }

    pub fn to_directive(&self) -> String {
        let mut out = format!(
            "{DIRECTIVE_HEADER}\nsize {} {}\nfill {} {} {}\n",
            self.width, self.height, self.fill[0], self.fill[1], self.fill[2]
        );
        for (x, y) in &self.dead {
            out.push_str(&format!("px {x} {y}\n"));
        }
        out
    }
}

/// Sets every masked pixel to the mask's fill value.
pub fn apply_dead_pixels(image: &RgbImage, mask: &PixelMask) -> Result<RgbImage, EffectError> {
    if image.dimensions() != (mask.width, mask.height) {
        return Err(EffectError::DimensionMismatch {
            mask_w: mask.width,
            mask_h: mask.height,
            image_w: image.width(),
            image_h: image.height(),
        });
    }
    let mut out = image.clone();
    for &(x, y) in &mask.dead {
        out.put_pixel(x, y, image::Rgb(mask.fill));
    }
    Ok(out)
}

/// Scales every channel by `gain`, rounding half away from zero and
/// clamping at `clamp`. With `clamp` = 255 no channel ever decreases.
pub fn apply_overexposure(image: &RgbImage, gain: f64, clamp: u8) -> Result<RgbImage, EffectError> {
    if !(gain.is_finite() && gain > 1.0) {
        return Err(EffectError::BadGain(gain));
    }
    let mut out = image.clone();
    for v in out.iter_mut() {
        *v = (f64::from(*v) * gain).round().min(f64::from(clamp)) as u8;
    }
    Ok(out)
}

pub fn read_ppm(bytes: &[u8]) -> Result<RgbImage, EffectError> {
    image::load_from_memory_with_format(bytes, ImageFormat::Pnm)
        .map(|i| i.to_rgb8())
        .map_err(|e| EffectError::Image(e.to_string()))
}

pub fn write_ppm(image: &RgbImage) -> Result<Vec<u8>, EffectError> {
    let mut buf = Cursor::new(Vec::new());
    PnmEncoder::new(&mut buf)
        .with_subtype(PnmSubtype::Pixmap(SampleEncoding::Binary))
        .write_image(
            image.as_raw(),
            image.width(),
            image.height(),
            ExtendedColorType::Rgb8,
        )
        .map_err(|e| EffectError::Image(e.to_string()))?;
    Ok(buf.into_inner())
}
