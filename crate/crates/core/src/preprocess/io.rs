use std::path::Path;

use image::{DynamicImage, ImageBuffer, Luma, Rgb};

use super::{
    percentile_clip_rescale, resize_center_crop, window_hu, PercentileSpec, PreprocessError,
    PreprocessWarning, RasterImage, WindowSpec,
};
use crate::dataio::{read_raw, ImageType};

fn codec_err(path: &Path, e: impl std::fmt::Display) -> PreprocessError {
    PreprocessError::Codec {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Decodes a PNG/JPEG. Grayscale sources stay single-channel; everything else
/// is converted to RGB (alpha dropped).
pub fn load_raster(path: impl AsRef<Path>) -> Result<RasterImage, PreprocessError> {
    let path = path.as_ref();
    let img = image::open(path).map_err(|e| codec_err(path, e))?;
    let (w, h) = (img.width(), img.height());
    match img {
        DynamicImage::ImageLuma8(buf) => RasterImage::new(w, h, 1, buf.into_raw()),
        DynamicImage::ImageLuma16(_) | DynamicImage::ImageLumaA8(_) | DynamicImage::ImageLumaA16(_) => {
            RasterImage::new(w, h, 1, img.to_luma8().into_raw())
        }
        other => RasterImage::new(w, h, 3, other.to_rgb8().into_raw()),
    }
}

pub fn save_png(img: &RasterImage, path: impl AsRef<Path>) -> Result<(), PreprocessError> {
    let path = path.as_ref();
    let (w, h) = (img.width(), img.height());
    let pixels = img.pixels().to_vec();
    let result = if img.channels() == 1 {
        ImageBuffer::<Luma<u8>, _>::from_raw(w, h, pixels)
            .expect("buffer size checked")
            .save_with_format(path, image::ImageFormat::Png)
    } else {
        ImageBuffer::<Rgb<u8>, _>::from_raw(w, h, pixels)
            .expect("buffer size checked")
            .save_with_format(path, image::ImageFormat::Png)
    };
    result.map_err(|e| codec_err(path, e))
}

/// Per-image normalization settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pipeline {
    pub window: WindowSpec,
    pub percentile: PercentileSpec,
    pub target: u32,
}

impl Default for Pipeline {
    fn default() -> Self {
        Pipeline {
            window: WindowSpec::default(),
            percentile: PercentileSpec::default(),
            target: super::DEFAULT_TARGET,
        }
    }
}

/// Normalizes one source file into a `target × target` raster.
///
/// `RAW1` files are windowed when the record is CT and percentile-clipped
/// otherwise (MRI, mammography); decoded 8-bit images go straight to the
/// resize step.
pub fn preprocess_file(
    path: impl AsRef<Path>,
    image_type: ImageType,
    pipeline: &Pipeline,
) -> Result<(RasterImage, Vec<PreprocessWarning>), PreprocessError> {
    let path = path.as_ref();
    let is_raw = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("raw"));
    let (img, warnings) = if is_raw {
        let raw = read_raw(path)?;
        if image_type == ImageType::ComputedTomography {
            (window_hu(&raw, pipeline.window)?, Vec::new())
        } else {
            let r = percentile_clip_rescale(&raw, pipeline.percentile)?;
            (r.image, r.warnings)
        }
    } else {
        (load_raster(path)?, Vec::new())
    };
    Ok((resize_center_crop(&img, pipeline.target), warnings))
}
