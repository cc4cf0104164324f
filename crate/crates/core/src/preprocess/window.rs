use super::{quantize, PreprocessError, PreprocessWarning, RasterImage};
use crate::dataio::RawIntensityArray;

/// CT display window in Hounsfield units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub width: f64,
    pub level: f64,
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec {
            width: 700.0,
            level: 100.0,
        }
    }
}

impl WindowSpec {
    pub fn new(width: f64, level: f64) -> Result<Self, PreprocessError> {
        if !(width > 0.0 && width.is_finite() && level.is_finite()) {
            return Err(PreprocessError::InvalidSpec(format!(
                "window width must be positive, got {width}"
            )));
        }
        Ok(WindowSpec { width, level })
    }

    /// Maps one intensity into `0..=255`.
    #[inline]
    pub fn apply(&self, x: f64) -> u8 {
        let lo = self.level - self.width / 2.0;
        let hi = self.level + self.width / 2.0;
        quantize((x.clamp(lo, hi) - lo) / self.width * 255.0)
    }
}

/// Percentile clip bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PercentileSpec {
    pub lo: f64,
    pub hi: f64,
}

impl Default for PercentileSpec {
    fn default() -> Self {
        PercentileSpec { lo: 0.5, hi: 99.5 }
    }
}

impl PercentileSpec {
    pub fn new(lo: f64, hi: f64) -> Result<Self, PreprocessError> {
        if !(0.0..100.0).contains(&lo) || !(hi > 0.0 && hi <= 100.0) || lo >= hi {
            return Err(PreprocessError::InvalidSpec(format!(
                "percentiles need 0 <= lo < hi <= 100, got ({lo}, {hi})"
            )));
        }
        Ok(PercentileSpec { lo, hi })
    }
}

/// Result of a percentile rescale.
#[derive(Debug, Clone, PartialEq)]
pub struct Rescaled {
    pub image: RasterImage,
    pub warnings: Vec<PreprocessWarning>,
}

/// Applies the window to a single-channel raw array.
pub fn window_hu(raw: &RawIntensityArray, spec: WindowSpec) -> Result<RasterImage, PreprocessError> {
    if raw.channels() != 1 {
        return Err(PreprocessError::MultiChannelInput(raw.channels()));
    }
    let pixels = raw.values().to_f64().into_iter().map(|x| spec.apply(x)).collect();
    RasterImage::new(raw.width(), raw.height(), 1, pixels)
}

/// Linear-interpolation percentile (`p` in `0..=100`) of ascending `sorted`.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p / 100.0;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Clips to the `lo`/`hi` percentiles (pooled over all channels) and
/// stretches the clipped range onto `0..=255`.
pub fn percentile_clip_rescale(
    raw: &RawIntensityArray,
    spec: PercentileSpec,
) -> Result<Rescaled, PreprocessError> {
    let values = raw.values().to_f64();
    if values.is_empty() {
        return Err(PreprocessError::EmptyArray);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(PreprocessError::NonFiniteInput);
    }
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let a = percentile(&sorted, spec.lo);
    let b = percentile(&sorted, spec.hi);

    let mut warnings = Vec::new();
    let pixels = if a == b {
        warnings.push(PreprocessWarning::DegenerateRange { value: a });
        vec![0u8; values.len()]
    } else {
        let span = b - a;
        values
            .iter()
            .map(|&x| quantize((x.clamp(a, b) - a) / span * 255.0))
            .collect()
    };
    Ok(Rescaled {
        image: RasterImage::new(raw.width(), raw.height(), raw.channels(), pixels)?,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::dataio::RawValues;

    fn raw_i16(values: Vec<i16>) -> RawIntensityArray {
        RawIntensityArray::new(values.len() as u32, 1, 1, RawValues::I16(values)).unwrap()
    }

    fn raw_f32(values: Vec<f32>) -> RawIntensityArray {
        RawIntensityArray::new(values.len() as u32, 1, 1, RawValues::F32(values)).unwrap()
    }

    #[test]
    fn default_window_endpoints_and_center() {
        let img = window_hu(&raw_i16(vec![-250, 450, 100, -1000, 3000]), WindowSpec::default())
            .unwrap();
        assert_eq!(img.pixels(), &[0, 255, 128, 0, 255]);
    }

    #[test]
    fn window_rejects_rgb() {
        let raw = RawIntensityArray::new(1, 1, 3, RawValues::I16(vec![0, 0, 0])).unwrap();
        assert!(matches!(
            window_hu(&raw, WindowSpec::default()),
            Err(PreprocessError::MultiChannelInput(3))
        ));
        assert!(WindowSpec::new(0.0, 10.0).is_err());
    }

    #[test]
    fn percentile_matches_linear_interpolation() {
        let sorted: Vec<f64> = (0..=1000).map(f64::from).collect();
        assert_eq!(percentile(&sorted, 0.5), 5.0);
        assert_eq!(percentile(&sorted, 99.5), 995.0);
        assert_eq!(percentile(&[1.0, 2.0, 3.0, 4.0], 50.0), 2.5);
    }

    #[test]
    fn ramp_spans_full_range() {
        let raw = raw_f32((0..=1000).map(|v| v as f32).collect());
        let out = percentile_clip_rescale(&raw, PercentileSpec::default()).unwrap();
        assert_eq!(*out.image.pixels().iter().min().unwrap(), 0);
        assert_eq!(*out.image.pixels().iter().max().unwrap(), 255);
        assert!(out.warnings.is_empty());
        // 5 and 995 are the clip bounds; 500 maps to the midpoint 127.5 → 128.
        assert_eq!(out.image.pixels()[500], 128);
    }

    #[test]
    fn constant_array_is_zero_with_warning() {
        let out = percentile_clip_rescale(&raw_i16(vec![7; 16]), PercentileSpec::default()).unwrap();
        assert!(out.image.pixels().iter().all(|&p| p == 0));
        assert_eq!(out.warnings, vec![PreprocessWarning::DegenerateRange { value: 7.0 }]);
    }

    #[test]
    fn two_valued_array_hits_both_endpoints() {
        let out = percentile_clip_rescale(&raw_i16(vec![-3, 9, 9, -3, 9]), PercentileSpec::default())
            .unwrap();
        assert_eq!(out.image.pixels(), &[0, 255, 255, 0, 255]);
    }

    #[test]
    fn empty_array_errors() {
        let raw = RawIntensityArray::new(0, 0, 1, RawValues::U16(vec![])).unwrap();
        assert!(matches!(
            percentile_clip_rescale(&raw, PercentileSpec::default()),
            Err(PreprocessError::EmptyArray)
        ));
    }

    proptest! {
        #[test]
        fn window_is_monotone(a in -5000.0f64..5000.0, b in -5000.0f64..5000.0) {
            let spec = WindowSpec::default();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(spec.apply(lo) <= spec.apply(hi));
        }

        #[test]
        fn percentile_rescale_ignores_increasing_affine_maps(
            values in proptest::collection::vec(-2000i32..2000, 2..200),
            scale_pow in -3i32..4,
            shift in -64i32..64,
        ) {
            let scale = 2f64.powi(scale_pow);
            let base = raw_f32(values.iter().map(|&v| v as f32).collect());
            let moved = raw_f32(values.iter().map(|&v| (v as f64 * scale + shift as f64) as f32).collect());
            let spec = PercentileSpec::default();
            let a = percentile_clip_rescale(&base, spec).unwrap();
            let b = percentile_clip_rescale(&moved, spec).unwrap();
            prop_assert_eq!(a.image, b.image);
        }
    }
}
