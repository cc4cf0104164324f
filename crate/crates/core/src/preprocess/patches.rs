use super::{PreprocessError, RasterImage};

/// A tile cut from a larger image, with its top-left origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub x: u32,
    pub y: u32,
    pub image: RasterImage,
}

/// Grid step for `patch`-sized tiles overlapping by at most `max_overlap`.
pub fn patch_stride(patch: u32, max_overlap: f64) -> u32 {
    (((1.0 - max_overlap) * patch as f64).ceil() as u32).clamp(1, patch)
}

/// Tiles `img` on a grid anchored at `(0, 0)`. Tiles that would run past the
/// right or bottom edge are dropped, so neighbours never overlap by more than
/// `max_overlap · patch` pixels. Output is row-major by origin.
pub fn extract_patches(
    img: &RasterImage,
    patch: u32,
    max_overlap: f64,
) -> Result<Vec<Patch>, PreprocessError> {
    if !(0.0..1.0).contains(&max_overlap) {
        return Err(PreprocessError::InvalidSpec(format!(
            "max_overlap must be in [0, 1), got {max_overlap}"
        )));
    }
    if patch == 0 || patch > img.width().min(img.height()) {
        return Err(PreprocessError::PatchTooLarge {
            patch,
            width: img.width(),
            height: img.height(),
        });
    }
    let stride = patch_stride(patch, max_overlap) as usize;
    let origins = |extent: u32| (0..=extent - patch).step_by(stride);
    Ok(origins(img.height())
        .flat_map(|y| origins(img.width()).map(move |x| (x, y)))
        .map(|(x, y)| Patch {
            x,
            y,
            image: img.crop(x, y, patch, patch),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn origins(p: &[Patch]) -> Vec<(u32, u32)> {
        p.iter().map(|p| (p.x, p.y)).collect()
    }

    /// Every grid origin `k·stride` whose tile fits, by exhaustive scan.
    fn grid_oracle(w: u32, h: u32, patch: u32, stride: u32) -> Vec<(u32, u32)> {
        let fits = |e: u32| (0..e).filter(|o| o % stride == 0 && o + patch <= e).collect::<Vec<_>>();
        let (xs, ys) = (fits(w), fits(h));
        ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect()
    }

    #[test]
    fn square_slide_yields_four_tiles() {
        assert_eq!(patch_stride(512, 0.10), 461);
        let img = RasterImage::filled(1024, 1024, 3, 0);
        let p = extract_patches(&img, 512, 0.10).unwrap();
        assert_eq!(origins(&p), grid_oracle(1024, 1024, 512, 461));
        assert_eq!(origins(&p), [(0, 0), (461, 0), (0, 461), (461, 461)]);
        // 51 px shared between neighbours: 9.96% of the patch side.
        assert!((512 - 461) as f64 <= 0.10 * 512.0);
    }

    #[test]
    fn narrow_slide_yields_one_tile() {
        let img = RasterImage::filled(700, 512, 1, 0);
        assert_eq!(origins(&extract_patches(&img, 512, 0.10).unwrap()), [(0, 0)]);
    }

    #[test]
    fn oversized_patch_is_rejected() {
        let img = RasterImage::filled(256, 256, 1, 0);
        assert!(matches!(
            extract_patches(&img, 512, 0.10),
            Err(PreprocessError::PatchTooLarge { patch: 512, .. })
        ));
    }

    #[test]
    fn patch_content_matches_source() {
        let pixels: Vec<u8> = (0..16 * 16).map(|i| i as u8).collect();
        let img = RasterImage::new(16, 16, 1, pixels).unwrap();
        let p = extract_patches(&img, 8, 0.0).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p[3].image.pixels()[0], (8 * 16 + 8) as u8);
    }

    proptest! {
        #[test]
        fn tiles_fit_and_respect_overlap(
            w in 1u32..400, h in 1u32..400, patch in 1u32..200, overlap in 0.0f64..0.95,
        ) {
            prop_assume!(patch <= w.min(h));
            let img = RasterImage::filled(w, h, 1, 0);
            let tiles = extract_patches(&img, patch, overlap).unwrap();
            let stride = patch_stride(patch, overlap);
            prop_assert_eq!(origins(&tiles), grid_oracle(w, h, patch, stride));
            for t in &tiles {
                prop_assert!(t.x + patch <= w && t.y + patch <= h);
            }
            for pair in tiles.windows(2) {
                if pair[0].y == pair[1].y {
                    let shared = (pair[0].x + patch).saturating_sub(pair[1].x);
                    prop_assert!(shared as f64 <= overlap * patch as f64 + 1e-9);
                }
            }
            prop_assert!((patch - stride) as f64 <= overlap * patch as f64 + 1e-9);
        }
    }
}
