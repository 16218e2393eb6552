//! Command-line front end: six subcommands chained through files in the
//! output directory.
//!
//! ```text
//! ingest     dump.xml[.gz|.bz2]  →  histories.jsonl
//! features   histories.jsonl    →  features.csv
//! cluster    features.csv       →  clustering.json, dendrogram.csv, dendrogram.newick
//! interpret  clustering.json (+ features.csv)  →  interpret.json
//! report     all of the above   →  report.json, report.md [, *.svg]
//! synth      spec.toml          →  histories.jsonl, labels.csv
//! ```
//!
//! Settings resolve as flag > `--config` file > built-in default. Exit codes:
//! 1 for usage errors, 2 for parse/validation errors, 3 for I/O errors.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::cluster::{pam, select_k, silhouette, ward_cluster, within_ss, DistanceMatrix};
use crate::config::{load_config, load_synth_spec, KRange, PipelineConfig};
use crate::dump::{
    aggregate_histories, decompress, load_bot_list, open_dump, parse_dump, ContributorHistory,
    ContributorKey, IngestConfig,
};
use crate::features::{compute_features, filter_contributors, standardize};
use crate::interpret::label_clusters;
use crate::io::{
    dendrogram_csv, dendrogram_newick, read_clustering, read_features, read_histories,
    read_interpret, write_clustering, write_features, write_histories, write_interpret,
    write_labels, ClusteringFile, FeatureRow, InterpretFile, CLUSTERING_SCHEMA, INTERPRET_SCHEMA,
};
use crate::report::{build_report, render_svgs, write_markdown, write_report};
use crate::stats::{pca_fit, pca_project};
use crate::synth::{generate_cohort, SynthSpec};
use crate::{Error, Result};

pub const HISTORIES_FILE: &str = "histories.jsonl";
pub const FEATURES_FILE: &str = "features.csv";
pub const CLUSTERING_FILE: &str = "clustering.json";
pub const DENDROGRAM_CSV_FILE: &str = "dendrogram.csv";
pub const DENDROGRAM_NEWICK_FILE: &str = "dendrogram.newick";
pub const INTERPRET_FILE: &str = "interpret.json";
pub const LABELS_FILE: &str = "labels.csv";
pub const REPORT_JSON_FILE: &str = "report.json";
pub const REPORT_MD_FILE: &str = "report.md";

/// How many principal components the interpret stage keeps for projections.
const PROJECTION_DIMS: usize = 3;

const SCHEMA_NOTES: &str = "\
artifact formats (all self-describing, written into --out-dir):
  histories.jsonl    header {\"schema\":\"wikiprofiles/histories\",\"version\":1},
                     then one JSON record per contributor (monthly counts,
                     first/last edit, distinct articles, bot flag)
  features.csv       '# wikiprofiles/features v1' comment line, then
                     contributor,ratio,mean_gap,max_gap,num_cons,mean_month,sd,
                     n_articles,total_edits
  labels.csv         '# wikiprofiles/labels v1' comment line, then
                     contributor,archetype
  clustering.json    schema wikiprofiles/clustering v1: k, medoids, assignment,
                     avg_silhouette, within_ss, per-k validation table
  dendrogram.csv     step,left,right,height,size (Ward merges; squared units)
  dendrogram.newick  the same tree as an ultrametric Newick string
  interpret.json     schema wikiprofiles/interpret v1: cluster profiles with
                     archetype labels, PCA model, projections
  report.json / .md  schema wikiprofiles/report v1: the assembled report";

#[derive(Debug, Parser)]
#[command(
    name = "wikiprofiles",
    version,
    about = "Edit-timing profiles of MediaWiki contributors: ingest, feature \
             extraction, clustering, interpretation, reporting",
    after_long_help = SCHEMA_NOTES
)]
struct Cli {
    /// TOML config file; command-line flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory stage artifacts are written to and read from.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    /// Worker threads. Outputs are byte-identical at any setting.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a pages-meta-history dump into per-contributor histories.
    Ingest(IngestArgs),
    /// Filter contributors and compute the six edit-timing features.
    Features(FeaturesArgs),
    /// Cluster the feature table: Ward survey, PAM partition, model selection.
    Cluster(ClusterArgs),
    /// Label clusters and attach PCA + ANOVA/Tukey diagnostics.
    Interpret(InterpretArgs),
    /// Assemble the final JSON + Markdown report (optionally with SVG plots).
    Report(ReportArgs),
    /// Generate a labeled synthetic cohort instead of ingesting a dump.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// Dump file (plain, gzip, or bzip2 XML); `-` reads standard input.
    #[arg(value_name = "DUMP")]
    input: Option<PathBuf>,

    /// Compression of the input: auto, plain, gzip, or bzip2.
    #[arg(long, value_name = "KIND")]
    compression: Option<String>,

    /// Namespaces to keep, comma-separated (e.g. `0` for articles only).
    #[arg(long, value_name = "IDS", value_delimiter = ',')]
    namespaces: Option<Vec<i32>>,

    /// File of bot usernames, one per line (`#` comments allowed).
    #[arg(long, value_name = "PATH")]
    bot_list: Option<PathBuf>,

    /// Generate a synthetic cohort from this spec instead of parsing a dump.
    #[arg(long, value_name = "SPEC", conflicts_with = "input")]
    synthetic: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FeaturesArgs {
    /// Histories file (default: <out-dir>/histories.jsonl).
    #[arg(value_name = "HISTORIES")]
    input: Option<PathBuf>,

    /// Keep contributors with strictly more than this many edits.
    #[arg(long, value_name = "N")]
    min_edits: Option<u64>,
}

#[derive(Debug, Args)]
struct ClusterArgs {
    /// Feature table (default: <out-dir>/features.csv).
    #[arg(value_name = "FEATURES")]
    input: Option<PathBuf>,

    /// Cluster counts to scan, `MIN..MAX` inclusive or a single `K`.
    #[arg(long, value_name = "RANGE")]
    k_range: Option<KRange>,
}

#[derive(Debug, Args)]
struct InterpretArgs {
    /// Clustering file (default: <out-dir>/clustering.json).
    #[arg(value_name = "CLUSTERING")]
    input: Option<PathBuf>,

    /// Feature table the clustering was computed from.
    #[arg(long, value_name = "PATH")]
    features: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Also write SVG plots (PCA scatters, validation curves, boxplots).
    #[arg(long)]
    svg: bool,

    /// Feature table (default: <out-dir>/features.csv).
    #[arg(long, value_name = "PATH")]
    features: Option<PathBuf>,

    /// Clustering file (default: <out-dir>/clustering.json).
    #[arg(long, value_name = "PATH")]
    clustering: Option<PathBuf>,

    /// Interpretation file (default: <out-dir>/interpret.json).
    #[arg(long, value_name = "PATH")]
    interpret: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Cohort spec in TOML (default: the built-in four-archetype cohort;
    /// see configs/synth_default.toml for the equivalent file).
    #[arg(value_name = "SPEC")]
    spec: Option<PathBuf>,

    /// Override the spec's random seed.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
}

/// Parse arguments, run the selected stage, and map errors to exit codes.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            i32::from(e.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let mut config = PipelineConfig::default();
    let mut file_seed = None;
    if let Some(path) = &cli.config {
        let file = load_config(path)?;
        file_seed = file.seed;
        config = config.merge_file(file);
    }
    if let Some(out_dir) = cli.out_dir {
        config.out_dir = out_dir;
    }
    if let Some(threads) = cli.threads {
        config.threads = Some(threads);
    }
    if let Some(threads) = config.threads {
        // Ignore the error from configuring twice (tests call run() repeatedly
        // in one process); the pool size only affects speed, never output.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    std::fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;

    match cli.command {
        Command::Ingest(args) => cmd_ingest(args, config),
        Command::Features(args) => cmd_features(args, config),
        Command::Cluster(args) => cmd_cluster(args, config),
        Command::Interpret(args) => cmd_interpret(args, config),
        Command::Report(args) => cmd_report(args, config),
        Command::Synth(args) => cmd_synth(args.spec.as_deref(), args.seed.or(file_seed), &config),
    }
}

fn cmd_ingest(args: IngestArgs, mut config: PipelineConfig) -> Result<()> {
    if let Some(compression) = &args.compression {
        config.compression = compression.parse()?;
    }
    if let Some(namespaces) = args.namespaces {
        config.namespaces = Some(namespaces);
    }
    if let Some(bot_list) = args.bot_list {
        config.bot_list = Some(bot_list);
    }
    config.validate()?;

    if let Some(spec) = &args.synthetic {
        return cmd_synth(Some(spec), None, &config);
    }

    let input = args
        .input
        .or(config.input)
        .ok_or_else(|| Error::Invalid("no dump file given (pass a path or `-`)".into()))?;
    let bots = match &config.bot_list {
        Some(path) => load_bot_list(path)?,
        None => BTreeSet::new(),
    };
    let ingest = IngestConfig {
        namespaces: config.namespaces.map(|ns| ns.into_iter().collect()),
        bot_list: bots,
    };

    let reader: Box<dyn BufRead + Send> = if input == Path::new("-") {
        decompress(std::io::BufReader::new(std::io::stdin()), config.compression)
            .map_err(|e| Error::io("<stdin>", e))?
    } else {
        open_dump(&input, config.compression)?
    };

    let mut parser = parse_dump(reader, ingest);
    let mut failure = None;
    let histories = aggregate_histories(parser.by_ref().map_while(|event| match event {
        Ok(event) => Some(event),
        Err(e) => {
            failure = Some(e);
            None
        }
    }));
    if let Some(e) = failure {
        return Err(e);
    }
    let stats = parser.stats();

    let path = config.out_dir.join(HISTORIES_FILE);
    write_histories(&path, &histories)?;
    println!(
        "{} pages, {} revisions kept ({} skipped, {} filtered by namespace), {} contributors",
        stats.pages,
        stats.revisions,
        stats.skipped_total(),
        stats.filtered_namespace,
        histories.len()
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_features(args: FeaturesArgs, mut config: PipelineConfig) -> Result<()> {
    if let Some(min_edits) = args.min_edits {
        config.min_edits = min_edits;
    }
    config.validate()?;

    let input = args
        .input
        .unwrap_or_else(|| config.out_dir.join(HISTORIES_FILE));
    let histories = read_histories(&input)?;
    let kept = filter_contributors(&histories, config.min_edits);

    let rows = feature_rows(&kept)?;
    let path = config.out_dir.join(FEATURES_FILE);
    write_features(&path, &rows)?;
    println!(
        "kept {} of {} contributors (> {} edits, ≥ 2 active months, registered, non-bot)",
        rows.len(),
        histories.len(),
        config.min_edits
    );
    println!("wrote {}", path.display());
    Ok(())
}

/// Compute feature rows in parallel, preserving the map's canonical order.
fn feature_rows(kept: &BTreeMap<ContributorKey, ContributorHistory>) -> Result<Vec<FeatureRow>> {
    use rayon::prelude::*;
    let histories: Vec<&ContributorHistory> = kept.values().collect();
    histories
        .par_iter()
        .map(|h| {
            Ok(FeatureRow {
                key: h.key(),
                features: compute_features(h)?,
                n_articles: h.distinct_articles,
                total_edits: h.total_edits(),
            })
        })
        .collect()
}

fn cmd_cluster(args: ClusterArgs, mut config: PipelineConfig) -> Result<()> {
    if let Some(k_range) = args.k_range {
        config.k_range = k_range;
    }
    config.validate()?;

    let input = args
        .input
        .unwrap_or_else(|| config.out_dir.join(FEATURES_FILE));
    let rows = read_features(&input)?;
    let vectors: Vec<_> = rows.iter().map(|r| r.features.clone()).collect();
    let matrix = standardize(&vectors)?;
    let dist = DistanceMatrix::from_rows(&matrix);

    let dendrogram = ward_cluster(&dist);
    let selection = select_k(&matrix, &dist, config.k_range.min, config.k_range.max)?;
    let partition = pam(&dist, selection.k)?;
    let scores = silhouette(&dist, &partition.assignment)?;
    let clustering = ClusteringFile {
        schema: CLUSTERING_SCHEMA.into(),
        version: 1,
        k: selection.k,
        medoids: partition.medoids,
        assignment: partition.assignment.clone(),
        avg_silhouette: scores.iter().sum::<f64>() / scores.len() as f64,
        within_ss: within_ss(&matrix, &partition.assignment)?,
        validation: selection.diagnostics,
        contributors: rows.iter().map(|r| r.key.to_string()).collect(),
    };

    let clustering_path = config.out_dir.join(CLUSTERING_FILE);
    write_clustering(&clustering_path, &clustering)?;
    let csv_path = config.out_dir.join(DENDROGRAM_CSV_FILE);
    crate::io::write_bytes(&csv_path, dendrogram_csv(&dendrogram).as_bytes())?;
    let newick_path = config.out_dir.join(DENDROGRAM_NEWICK_FILE);
    crate::io::write_bytes(
        &newick_path,
        dendrogram_newick(&dendrogram, &clustering.contributors).as_bytes(),
    )?;

    println!(
        "selected k = {} over {} (avg silhouette {:.4}, within-SS {:.4})",
        clustering.k, config.k_range, clustering.avg_silhouette, clustering.within_ss
    );
    for path in [&clustering_path, &csv_path, &newick_path] {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_interpret(args: InterpretArgs, config: PipelineConfig) -> Result<()> {
    config.validate()?;
    let clustering_path = args
        .input
        .unwrap_or_else(|| config.out_dir.join(CLUSTERING_FILE));
    let features_path = args
        .features
        .unwrap_or_else(|| config.out_dir.join(FEATURES_FILE));
    let clustering = read_clustering(&clustering_path)?;
    let rows = read_features(&features_path)?;
    check_same_cohort(&rows, &clustering)?;

    let vectors: Vec<_> = rows.iter().map(|r| r.features.clone()).collect();
    let profile = label_clusters(&vectors, &clustering.assignment)?;
    let matrix = standardize(&vectors)?;
    let pca = pca_fit(&matrix)?;
    let dims = PROJECTION_DIMS.min(pca.eigenvalues.len());
    let projections = pca_project(&pca, &matrix, dims)?;

    let file = InterpretFile {
        schema: INTERPRET_SCHEMA.into(),
        version: 1,
        profile,
        pca,
        projections,
    };
    let path = config.out_dir.join(INTERPRET_FILE);
    write_interpret(&path, &file)?;

    match file.profile.clusters.iter().find_map(|c| c.label) {
        Some(_) => {
            let labels: Vec<String> = file
                .profile
                .clusters
                .iter()
                .map(|c| {
                    format!(
                        "{} = {} ({})",
                        c.id,
                        c.label.map_or("?".into(), |l| l.to_string()),
                        c.size
                    )
                })
                .collect();
            println!("labels: {}", labels.join(", "));
        }
        None => println!(
            "descriptive profile only (archetype names apply to k = 4, got k = {})",
            file.profile.k
        ),
    }
    println!("wrote {}", path.display());
    Ok(())
}

/// The cluster and interpret stages must describe the feature table they are
/// given, row for row.
fn check_same_cohort(rows: &[FeatureRow], clustering: &ClusteringFile) -> Result<()> {
    if rows.len() != clustering.contributors.len() {
        return Err(Error::Invalid(format!(
            "feature table has {} rows but the clustering describes {}",
            rows.len(),
            clustering.contributors.len()
        )));
    }
    for (row, name) in rows.iter().zip(&clustering.contributors) {
        let key = row.key.to_string();
        if key != *name {
            return Err(Error::Invalid(format!(
                "feature table and clustering disagree: {key} vs {name}"
            )));
        }
    }
    Ok(())
}

fn cmd_report(args: ReportArgs, config: PipelineConfig) -> Result<()> {
    config.validate()?;
    let features_path = args
        .features
        .unwrap_or_else(|| config.out_dir.join(FEATURES_FILE));
    let clustering_path = args
        .clustering
        .unwrap_or_else(|| config.out_dir.join(CLUSTERING_FILE));
    let interpret_path = args
        .interpret
        .unwrap_or_else(|| config.out_dir.join(INTERPRET_FILE));

    let rows = read_features(&features_path)?;
    let clustering = read_clustering(&clustering_path)?;
    let interpret = read_interpret(&interpret_path)?;
    let report = build_report(&rows, &clustering, &interpret)?;

    let json_path = config.out_dir.join(REPORT_JSON_FILE);
    write_report(&json_path, &report)?;
    let md_path = config.out_dir.join(REPORT_MD_FILE);
    write_markdown(&md_path, &report)?;
    println!("wrote {}", json_path.display());
    println!("wrote {}", md_path.display());

    if args.svg {
        for (name, svg) in render_svgs(&report, &interpret, &clustering) {
            let path = config.out_dir.join(name);
            crate::io::write_bytes(&path, svg.as_bytes())?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn cmd_synth(spec: Option<&Path>, seed: Option<u64>, config: &PipelineConfig) -> Result<()> {
    let mut spec = match spec {
        Some(path) => load_synth_spec(path)?,
        None => SynthSpec::default(),
    };
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    let cohort = generate_cohort(&spec)?;

    let histories: BTreeMap<ContributorKey, ContributorHistory> = cohort
        .members
        .iter()
        .map(|m| (m.history.key(), m.history.clone()))
        .collect();
    let labels: Vec<_> = cohort
        .members
        .iter()
        .map(|m| (m.history.key(), m.label))
        .collect();

    let histories_path = config.out_dir.join(HISTORIES_FILE);
    write_histories(&histories_path, &histories)?;
    let labels_path = config.out_dir.join(LABELS_FILE);
    write_labels(&labels_path, &labels)?;

    println!(
        "generated {} contributors (seed {})",
        cohort.members.len(),
        spec.seed
    );
    println!("wrote {}", histories_path.display());
    println!("wrote {}", labels_path.display());
    Ok(())
}
