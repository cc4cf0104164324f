use super::{quantize, RasterImage};

pub const DEFAULT_TARGET: u32 = 512;

/// Size after scaling the shorter side to `target`; the longer side keeps the
/// aspect ratio, rounded to nearest and never below `target`.
pub fn resized_dims(width: u32, height: u32, target: u32) -> (u32, u32) {
    let scale_long = |long: u32, short: u32| -> u32 {
        let (l, s, t) = (long as u64, short as u64, target as u64);
        (((2 * l * t + s) / (2 * s)) as u32).max(target)
    };
    if width <= height {
        (target, scale_long(height, width))
    } else {
        (scale_long(width, height), target)
    }
}

/// Half-pixel-centered source coordinate and blend weights along one axis.
fn axis_taps(src: u32, dst: u32, offset: u32, count: u32) -> Vec<(usize, usize, f64)> {
    let ratio = src as f64 / dst as f64;
    let max = (src - 1) as f64;
    (offset..offset + count)
        .map(|d| {
            let s = ((d as f64 + 0.5) * ratio - 0.5).clamp(0.0, max);
            let i0 = s.floor() as usize;
            let i1 = (i0 + 1).min(src as usize - 1);
            (i0, i1, s - i0 as f64)
        })
        .collect()
}

/// Bilinear resize so the shorter side equals `target`, then a centered
/// `target × target` crop. Only the cropped window is interpolated.
pub fn resize_center_crop(img: &RasterImage, target: u32) -> RasterImage {
    assert!(img.width() >= 1 && img.height() >= 1 && target >= 1);
    let (rw, rh) = resized_dims(img.width(), img.height(), target);
    let ox = (rw - target) / 2;
    let oy = (rh - target) / 2;

    let xs = axis_taps(img.width(), rw, ox, target);
    let ys = axis_taps(img.height(), rh, oy, target);
    let c = img.channels() as usize;
    let mut out = Vec::with_capacity(target as usize * target as usize * c);
    for &(y0, y1, fy) in &ys {
        let r0 = img.row(y0 as u32);
        let r1 = img.row(y1 as u32);
        for &(x0, x1, fx) in &xs {
            for ch in 0..c {
                let p = |r: &[u8], x: usize| r[x * c + ch] as f64;
                let top = p(r0, x0) + (p(r0, x1) - p(r0, x0)) * fx;
                let bottom = p(r1, x0) + (p(r1, x1) - p(r1, x0)) * fx;
                out.push(quantize(top + (bottom - top) * fy));
            }
        }
    }
    RasterImage::new(target, target, img.channels(), out).expect("output is target × target")
}
