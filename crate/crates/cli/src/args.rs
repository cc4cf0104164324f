use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub const DEFAULT_SEED: u64 = 17;

#[derive(Debug, Parser)]
#[command(
    name = "synthaudit",
    version,
    about = "Memorization audit and evaluation statistics for synthetic image datasets",
    args_override_self = true,
    propagate_version = true
)]
pub struct Cli {
    /// key = value file supplying default flag values; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize source images into square 8-bit PNGs.
    Preprocess(PreprocessArgs),
    /// Assign patient-level train/val/test splits.
    Split(SplitArgs),
    /// Fill the prompt field from a label template.
    Prompt(PromptArgs),
    /// Exact cosine nearest-neighbor search between embedding files.
    NnSearch(NnSearchArgs),
    /// Score retrieved pairs with the patch distance and flag copies.
    Audit(AuditArgs),
    /// Per-group distance table from an audit.csv.
    Summarize(SummarizeArgs),
    /// One-sided signed-rank test of a CSV column against a null median.
    Wilcoxon(WilcoxonArgs),
    /// ROC curves and AUROC for prediction files.
    Roc(RocArgs),
    /// Bootstrap interval of the macro-AUROC difference of two models.
    BootstrapDiff(BootstrapArgs),
    /// Fréchet distance between two feature files.
    Fid(FidArgs),
    /// Rank candidate feature files by FID against a reference.
    Rank(RankArgs),
    /// Accuracy and confidence from reader-study responses.
    ReaderStudy(ReaderArgs),
    /// Assemble report.json, summary.csv and ROC figures.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Workers {
    /// Worker threads; 0 uses every core. Results never depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    /// Manifest written with image_path pointing at the outputs.
    #[arg(long)]
    pub out_manifest: Option<PathBuf>,
    #[arg(long, default_value_t = 512)]
    pub target: u32,
    #[arg(long, default_value_t = 700.0)]
    pub window_width: f64,
    #[arg(long, default_value_t = 100.0)]
    pub window_level: f64,
    #[arg(long, default_value_t = 0.5)]
    pub pct_lo: f64,
    #[arg(long, default_value_t = 99.5)]
    pub pct_hi: f64,
    /// Tile microscopy records into patches of this side instead of resizing
    /// the whole slide.
    #[arg(long)]
    pub tile_size: Option<u32>,
    #[arg(long, default_value_t = 0.1)]
    pub max_overlap: f64,
    #[command(flatten)]
    pub workers: Workers,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.8)]
    pub train: f64,
    #[arg(long, default_value_t = 0.1)]
    pub val: f64,
    #[arg(long, default_value_t = 0.1)]
    pub test: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PromptArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Text with `{…}` slots, e.g. "A dermoscopy image of {labels}".
    #[arg(long)]
    pub template: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct NnSearchArgs {
    #[arg(long)]
    pub queries: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    /// Needed with --match; must list every query and corpus id.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Comma-separated record fields a neighbor must share.
    #[arg(long = "match", value_delimiter = ',', value_name = "FIELDS")]
    pub match_fields: Vec<String>,
    #[arg(long, default_value_t = 1)]
    pub topk: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub workers: Workers,
}

#[derive(Debug, Args)]
pub struct GroupArgs {
    /// Manifest used to group pairs.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Record field of the real image that names a pair's group.
    #[arg(long, default_value = "specialty")]
    pub group_by: String,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub pairs: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub synthetic_dir: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub real_dir: PathBuf,
    #[arg(long, default_value_t = 0.15)]
    pub threshold: f64,
    #[arg(long, num_args = 2, value_names = ["AUDIT_CSV", "REPORT_JSON"])]
    pub out: Vec<PathBuf>,
    #[command(flatten)]
    pub group: GroupArgs,
    /// PNG sheet of flagged pairs, synthetic left.
    #[arg(long)]
    pub contact_sheet: Option<PathBuf>,
    #[command(flatten)]
    pub workers: Workers,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    #[arg(long)]
    pub audit: PathBuf,
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long, default_value_t = 0.15)]
    pub threshold: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct WilcoxonArgs {
    #[arg(long)]
    pub values: PathBuf,
    #[arg(long, default_value = "distance")]
    pub column: String,
    #[arg(long, default_value_t = 0.15)]
    pub mu0: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RocArgs {
    /// Prediction CSV; repeat to overlay models.
    #[arg(long, required = true)]
    pub preds: Vec<PathBuf>,
    #[arg(long)]
    pub out_curves: Option<PathBuf>,
    #[arg(long)]
    pub out_svg: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = 2000)]
    pub resamples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub workers: Workers,
}

#[derive(Debug, Args)]
pub struct FidArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long)]
    pub reference: PathBuf,
    /// Directory of `.emb` files, one per checkpoint.
    #[arg(long, value_name = "DIR")]
    pub candidates: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub workers: Workers,
}

#[derive(Debug, Args)]
pub struct ReaderArgs {
    #[arg(long)]
    pub responses: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Per-reader table.
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub audit: PathBuf,
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long, default_value_t = 0.15)]
    pub threshold: f64,
    /// Null median of the signed-rank test on distances.
    #[arg(long, default_value_t = 0.15)]
    pub mu0: f64,
    /// Interval JSON from bootstrap-diff; repeatable.
    #[arg(long)]
    pub ci: Vec<PathBuf>,
    /// Prediction CSV drawn into the ROC figure; repeatable.
    #[arg(long)]
    pub roc: Vec<PathBuf>,
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
}
