//! Intensity normalization, resizing and tiling into uniform 8-bit rasters.
//!
//! Every quantization step rounds half away from zero.

mod io;
mod patches;
mod resize;
mod window;

use thiserror::Error;

pub use io::{load_raster, preprocess_file, save_png, Pipeline};
pub use patches::{extract_patches, patch_stride, Patch};
pub use resize::{resize_center_crop, resized_dims, DEFAULT_TARGET};
pub use window::{
    percentile, percentile_clip_rescale, window_hu, PercentileSpec, Rescaled, WindowSpec,
};

use crate::dataio::DataError;

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("expected a single-channel array, got {0} channels")]
    MultiChannelInput(u8),
    #[error("input array is empty")]
    EmptyArray,
    #[error("input contains non-finite values")]
    NonFiniteInput,
    #[error("patch {patch} does not fit a {width}×{height} image")]
    PatchTooLarge { patch: u32, width: u32, height: u32 },
    #[error("invalid parameter: {0}")]
    InvalidSpec(String),
    #[error("image codec error for {path}: {message}")]
    Codec { path: String, message: String },
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Non-fatal conditions noticed while normalizing.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub enum PreprocessWarning {
    /// Lower and upper clip bounds coincided; the output is all zeros.
    DegenerateRange { value: f64 },
}

/// Row-major interleaved 8-bit image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: u32,
    height: u32,
    channels: u8,
    pixels: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: u32, height: u32, channels: u8, pixels: Vec<u8>) -> Result<Self, PreprocessError> {
        if channels != 1 && channels != 3 {
            return Err(PreprocessError::InvalidSpec(format!(
                "channels must be 1 or 3, got {channels}"
            )));
        }
        let expected = width as usize * height as usize * channels as usize;
        if pixels.len() != expected {
            return Err(PreprocessError::InvalidSpec(format!(
                "{width}×{height}×{channels} needs {expected} bytes, got {}",
                pixels.len()
            )));
        }
        Ok(RasterImage {
            width,
            height,
            channels,
            pixels,
        })
    }

    pub fn filled(width: u32, height: u32, channels: u8, value: u8) -> Self {
        Self::new(
            width,
            height,
            channels,
            vec![value; width as usize * height as usize * channels as usize],
        )
        .expect("valid dimensions")
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    /// Bytes per row.
    pub fn stride(&self) -> usize {
        self.width as usize * self.channels as usize
    }

    pub fn row(&self, y: u32) -> &[u8] {
        let s = self.stride();
        &self.pixels[y as usize * s..(y as usize + 1) * s]
    }

    /// Copies out a `w × h` window with top-left corner `(x, y)`.
    pub fn crop(&self, x: u32, y: u32, w: u32, h: u32) -> RasterImage {
        assert!(x + w <= self.width && y + h <= self.height, "crop out of bounds");
        let c = self.channels as usize;
        let mut out = Vec::with_capacity(w as usize * h as usize * c);
        for row in y..y + h {
            let r = self.row(row);
            out.extend_from_slice(&r[x as usize * c..(x + w) as usize * c]);
        }
        RasterImage::new(w, h, self.channels, out).expect("crop dimensions are consistent")
    }
}

/// Rounds half away from zero and saturates into `0..=255`.
#[inline]
pub(crate) fn quantize(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}
