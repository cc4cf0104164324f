//! Regenerates `tests/fixtures/toy`: 45 training images and 15 synthetic
//! images over three specialties, five of the synthetic ones planted copies.
//!
//! ```text
//! cargo run -p synthaudit-cli --example toy_fixture [OUT_DIR]
//! ```

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use synthaudit::dataio::{write_embeddings, write_manifest, write_raw, RawIntensityArray, RawValues};
use synthaudit::preprocess::save_png;
use synthaudit::stats::{write_predictions, ScoredPredictions};
use synthaudit::{EmbeddingMatrix, ImageRecord, ImageType, Manifest, RasterImage, Specialty};

const DIM: usize = 32;
const PER_SPECIALTY: usize = 15;

struct Kind {
    specialty: Specialty,
    image_type: ImageType,
    labels: &'static [&'static str],
    width: u32,
    height: u32,
    channels: u8,
}

const KINDS: [Kind; 3] = [
    Kind {
        specialty: Specialty::Dermatology,
        image_type: ImageType::Dermoscopy,
        labels: &["melanoma", "nevus", "keratosis"],
        width: 80,
        height: 64,
        channels: 3,
    },
    Kind {
        specialty: Specialty::Radiology,
        image_type: ImageType::ComputedTomography,
        labels: &["nodule", "effusion", "normal"],
        width: 72,
        height: 72,
        channels: 1,
    },
    Kind {
        specialty: Specialty::Pathology,
        image_type: ImageType::Microscopy,
        labels: &["tumor", "stroma", "normal"],
        width: 64,
        height: 88,
        channels: 3,
    },
];

/// A source image: 8-bit pixels, or Hounsfield units for CT.
#[derive(Clone)]
enum Source {
    Pixels(RasterImage),
    Hu { width: u32, height: u32, values: Vec<i16> },
}

/// Gaussian blobs over a noisy background, in `[0, 1]`.
fn field(rng: &mut ChaCha8Rng, w: u32, h: u32, channels: u8) -> Vec<f64> {
    let blobs: Vec<(f64, f64, f64, [f64; 3])> = (0..6)
        .map(|_| {
            (
                rng.random_range(0.0..w as f64),
                rng.random_range(0.0..h as f64),
                rng.random_range(4.0..14.0),
                [rng.random(), rng.random(), rng.random()],
            )
        })
        .collect();
    let mut out = Vec::with_capacity((w * h) as usize * channels as usize);
    for y in 0..h {
        for x in 0..w {
            for c in 0..channels as usize {
                let mut v = 0.15 + 0.1 * rng.random::<f64>();
                for (bx, by, r, amp) in &blobs {
                    let d2 = (x as f64 - bx).powi(2) + (y as f64 - by).powi(2);
                    v += amp[c] * (-d2 / (2.0 * r * r)).exp();
                }
                out.push(v.clamp(0.0, 1.0));
            }
        }
    }
    out
}

fn make_source(rng: &mut ChaCha8Rng, kind: &Kind) -> Source {
    let f = field(rng, kind.width, kind.height, kind.channels);
    if kind.image_type == ImageType::ComputedTomography {
        Source::Hu {
            width: kind.width,
            height: kind.height,
            values: f.iter().map(|v| (v * 900.0 - 300.0).round() as i16).collect(),
        }
    } else {
        let px = f.iter().map(|v| (v * 255.0).round() as u8).collect();
        Source::Pixels(RasterImage::new(kind.width, kind.height, kind.channels, px).unwrap())
    }
}

/// Shifts every sample by `delta` display levels (HU for CT).
fn shifted(src: &Source, delta: i32) -> Source {
    match src {
        Source::Pixels(img) => {
            let px = img.pixels().iter().map(|&p| (p as i32 + delta).clamp(0, 255) as u8).collect();
            Source::Pixels(RasterImage::new(img.width(), img.height(), img.channels(), px).unwrap())
        }
        Source::Hu { width, height, values } => Source::Hu {
            width: *width,
            height: *height,
            values: values.iter().map(|&v| v + delta as i16).collect(),
        },
    }
}

/// Inverts the top-left quarter, leaving the rest identical.
fn with_inverted_corner(src: &Source) -> Source {
    match src {
        Source::Pixels(img) => {
            let mut out = img.clone();
            let (w, h, c) = (img.width(), img.height(), img.channels() as u32);
            for y in 0..h / 2 {
                for x in 0..w / 2 {
                    for ch in 0..c {
                        let i = ((y * w + x) * c + ch) as usize;
                        out.pixels_mut()[i] = 255 - img.pixels()[i];
                    }
                }
            }
            Source::Pixels(out)
        }
        Source::Hu { width, height, values } => {
            let mut v = values.clone();
            for y in 0..height / 2 {
                for x in 0..width / 2 {
                    let i = (y * width + x) as usize;
                    v[i] = 300 - v[i];
                }
            }
            Source::Hu { width: *width, height: *height, values: v }
        }
    }
}

fn write_source(src: &Source, dir: &Path, id: &str) -> PathBuf {
    match src {
        Source::Pixels(img) => {
            let rel = PathBuf::from(format!("sources/{id}.png"));
            save_png(img, dir.join(&rel)).unwrap();
            rel
        }
        Source::Hu { width, height, values } => {
            let rel = PathBuf::from(format!("sources/{id}.raw"));
            let raw = RawIntensityArray::new(*width, *height, 1, RawValues::I16(values.clone())).unwrap();
            write_raw(&raw, dir.join(&rel)).unwrap();
            rel
        }
    }
}

fn unit(rng: &mut ChaCha8Rng) -> Vec<f32> {
    let v: Vec<f64> = (0..DIM).map(|_| rng.random::<f64>() - 0.5).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| (x / n) as f32).collect()
}

fn nudge(rng: &mut ChaCha8Rng, v: &[f32], eps: f64) -> Vec<f32> {
    v.iter().map(|&x| (x as f64 + eps * (rng.random::<f64>() - 0.5)) as f32).collect()
}

/// Class scores for `n` examples; `skill` sets how far positives sit above
/// negatives.
fn predictions(rng: &mut ChaCha8Rng, labels: &[bool], classes: &[String], skill: f64) -> ScoredPredictions {
    let n = labels.len() / classes.len();
    let scores = labels
        .iter()
        .map(|&l| if l { skill } else { 0.0 } + rng.random::<f64>())
        .map(|s| (s * 1e6).round() / 1e6)
        .collect();
    ScoredPredictions::new((0..n).map(|i| format!("t{i:03}")).collect(), classes.to_vec(), scores, labels.to_vec()).unwrap()
}

fn main() {
    let out: PathBuf = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/toy"));
    std::fs::create_dir_all(out.join("sources")).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    let mut records = Vec::new();
    let (mut real_ids, mut real_vecs) = (Vec::new(), Vec::new());
    let (mut syn_ids, mut syn_vecs) = (Vec::new(), Vec::new());
    let mut planted = Vec::new();

    for (k, kind) in KINDS.iter().enumerate() {
        let mut sources = Vec::new();
        for i in 0..PER_SPECIALTY {
            let id = format!("real_{}_{i:02}", kind.specialty);
            let src = make_source(&mut rng, kind);
            let path = write_source(&src, &out, &id);
            records.push(ImageRecord {
                id: id.clone(),
                image_path: path,
                specialty: kind.specialty,
                image_type: kind.image_type,
                labels: vec![kind.labels[i % 3].to_string()],
                patient_id: Some(format!("p_{}_{:02}", kind.specialty, i / 2)),
                prompt: None,
                split: None,
            });
            let v = unit(&mut rng);
            real_ids.push(id.clone());
            real_vecs.push(v.clone());
            sources.push((id, src, v));
        }

        // Five synthetic images per specialty. Planted copies: exact copies
        // in every specialty, plus a shifted copy in the first two. The
        // inverted-corner image shares its source's embedding but differs
        // strongly in one patch.
        for j in 0..5 {
            let id = format!("syn_{}_{j:02}", kind.specialty);
            let (src, v, plant): (Source, Vec<f32>, Option<&str>) = match (k, j) {
                (_, 0) => {
                    let (rid, s, v) = &sources[3];
                    (s.clone(), nudge(&mut rng, v, 1e-3), Some(rid))
                }
                (0, 1) => {
                    let (rid, s, v) = &sources[7];
                    (shifted(s, 3), nudge(&mut rng, v, 1e-3), Some(rid))
                }
                (1, 1) => {
                    let (rid, s, v) = &sources[7];
                    (shifted(s, 25), nudge(&mut rng, v, 1e-3), Some(rid))
                }
                (_, 2) => {
                    let (_, s, v) = &sources[11];
                    (with_inverted_corner(s), nudge(&mut rng, v, 1e-3), None)
                }
                _ => (make_source(&mut rng, kind), unit(&mut rng), None),
            };
            if let Some(rid) = plant {
                planted.push((id.clone(), rid.to_string()));
            }
            let path = write_source(&src, &out, &id);
            records.push(ImageRecord {
                id: id.clone(),
                image_path: path,
                specialty: kind.specialty,
                image_type: kind.image_type,
                labels: vec![kind.labels[j % 3].to_string()],
                patient_id: None,
                prompt: None,
                split: None,
            });
            syn_ids.push(id);
            syn_vecs.push(v);
        }
    }

    write_manifest(&Manifest::from_records(records).unwrap(), out.join("manifest.jsonl")).unwrap();
    write_embeddings(&EmbeddingMatrix::from_rows(real_ids, &real_vecs).unwrap(), out.join("real.emb")).unwrap();
    write_embeddings(&EmbeddingMatrix::from_rows(syn_ids, &syn_vecs).unwrap(), out.join("synthetic.emb")).unwrap();

    let mut w = csv::Writer::from_path(out.join("planted.csv")).unwrap();
    w.write_record(["synthetic_id", "real_id"]).unwrap();
    for (s, r) in &planted {
        w.write_record([s, r]).unwrap();
    }
    w.flush().unwrap();

    // Three classifiers on one shared test set.
    let classes: Vec<String> = ["melanoma", "nevus", "keratosis"].iter().map(|s| s.to_string()).collect();
    let n = 150;
    let labels: Vec<bool> = (0..n * 3).map(|j| (j / 3) % 3 == j % 3).collect();
    for (name, skill) in [("real_2k", 0.9), ("real_1k", 0.6), ("mixed_1k_1k", 0.8)] {
        let p = predictions(&mut rng, &labels, &classes, skill);
        write_predictions(&p, out.join(format!("preds_{name}.csv"))).unwrap();
    }

    let mut w = csv::Writer::from_path(out.join("responses.csv")).unwrap();
    w.write_record(["reader_id", "item_id", "true_class", "chosen_class", "confidence", "is_synthetic"]).unwrap();
    for reader in 0..3 {
        let skill = [0.8, 0.84, 0.87][reader];
        for item in 0..50 {
            let truth = classes[item % 3].as_str();
            let chosen = if rng.random_bool(skill) { truth } else { classes[(item + 1) % 3].as_str() };
            let conf: u8 = rng.random_range(1..=5);
            w.write_record([
                format!("r{reader}"),
                format!("item{item:02}"),
                truth.to_string(),
                chosen.to_string(),
                conf.to_string(),
                (item % 2 == 1).to_string(),
            ])
            .unwrap();
        }
    }
    w.flush().unwrap();
    println!("wrote fixture to {} ({} planted copies)", out.display(), planted.len());
}
