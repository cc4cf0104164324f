use rayon::prelude::*;
use serde_json::json;
use synthaudit::dataio::{build_prompt, split_dataset, write_manifest, SplitRatios};
use synthaudit::preprocess::{
    extract_patches, load_raster, preprocess_file, resize_center_crop, save_png, PercentileSpec,
    Pipeline, PreprocessWarning, WindowSpec,
};
use synthaudit::{ImageRecord, ImageType, Manifest, RasterImage};

use super::{create_dir, load_manifest, resolve};
use crate::args::{PreprocessArgs, PromptArgs, SplitArgs};
use crate::{progress, CliError, CliResult};

/// Outputs of one source record: `(id suffix, raster)` plus warnings.
type Normalized = (Vec<(Option<(u32, u32)>, RasterImage)>, Vec<PreprocessWarning>);

pub fn preprocess(a: PreprocessArgs) -> CliResult {
    let manifest = load_manifest(&a.manifest)?;
    let usage = |e: synthaudit::preprocess::PreprocessError| CliError::Usage(e.to_string());
    let pipeline = Pipeline {
        window: WindowSpec::new(a.window_width, a.window_level).map_err(usage)?,
        percentile: PercentileSpec::new(a.pct_lo, a.pct_hi).map_err(usage)?,
        target: a.target,
    };
    if a.target == 0 {
        return Err(CliError::Usage("--target must be positive".into()));
    }
    if !(0.0..1.0).contains(&a.max_overlap) {
        return Err(CliError::Usage("--max-overlap must lie in [0, 1)".into()));
    }
    create_dir(&a.out_dir)?;

    let normalize = |r: &ImageRecord| -> CliResult<Normalized> {
        let src = resolve(&a.manifest, &r.image_path);
        match a.tile_size {
            Some(tile) if r.image_type == ImageType::Microscopy => {
                let slide = load_raster(&src)?;
                let tiles = extract_patches(&slide, tile, a.max_overlap)?
                    .into_iter()
                    .map(|p| (Some((p.x, p.y)), resize_center_crop(&p.image, a.target)))
                    .collect();
                Ok((tiles, Vec::new()))
            }
            _ => {
                let (img, warnings) = preprocess_file(&src, r.image_type, &pipeline)?;
                Ok((vec![(None, img)], warnings))
            }
        }
    };

    let results: Vec<CliResult<Vec<ImageRecord>>> = synthaudit::pool::install(a.workers.workers, || {
        manifest
            .records
            .par_iter()
            .map(|r| {
                let (outputs, warnings) = normalize(r)?;
                for w in warnings {
                    progress("preprocess.warning", json!({ "id": r.id, "warning": w }));
                }
                outputs
                    .into_iter()
                    .map(|(origin, img)| {
                        let id = match origin {
                            Some((x, y)) => format!("{}_{x}_{y}", r.id),
                            None => r.id.clone(),
                        };
                        let out = a.out_dir.join(format!("{id}.png"));
                        save_png(&img, &out)?;
                        Ok(ImageRecord {
                            id,
                            image_path: out,
                            ..r.clone()
                        })
                    })
                    .collect()
            })
            .collect()
    })
    .map_err(|e| CliError::Usage(e.to_string()))?;

    let mut records = Vec::new();
    for r in results {
        records.extend(r?);
    }
    progress(
        "preprocess.done",
        json!({ "inputs": manifest.len(), "outputs": records.len(), "target": a.target }),
    );
    if let Some(out) = &a.out_manifest {
        write_manifest(&Manifest::from_records(records)?, out)?;
    }
    Ok(())
}

pub fn split(a: SplitArgs) -> CliResult {
    let manifest = load_manifest(&a.manifest)?;
    let ratios = SplitRatios::new(a.train, a.val, a.test).map_err(|e| CliError::Usage(e.to_string()))?;
    let out = split_dataset(&manifest, ratios, a.seed)?;
    let count = |s| out.records.iter().filter(|r| r.split == Some(s)).count();
    progress(
        "split.done",
        json!({
            "train": count(synthaudit::Split::Train),
            "val": count(synthaudit::Split::Val),
            "test": count(synthaudit::Split::Test),
            "seed": a.seed,
        }),
    );
    write_manifest(&out, &a.out)?;
    Ok(())
}

pub fn prompt(a: PromptArgs) -> CliResult {
    let mut manifest = load_manifest(&a.manifest)?;
    for r in &mut manifest.records {
        r.prompt = Some(build_prompt(r, &a.template)?);
    }
    write_manifest(&manifest, &a.out)?;
    progress("prompt.done", json!({ "records": manifest.len() }));
    Ok(())
}

