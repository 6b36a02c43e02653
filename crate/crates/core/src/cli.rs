//! Command-line front end. [`run`] returns the process exit code: 0 on
//! success, 1 on a usage error, 2 on a data error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::classifier::{
    evaluate, grid_search, param_grid, roc_select, train, Classifier, PerformancePoint, RocPolicy,
    SelectionPolicy,
};
use crate::dataset::{split_indices, IngestOptions, RawTable, SchemaFile, SplitSpec, TransactionSet};
use crate::error::Error;
use crate::mining::{mine, MiningParams};
use crate::report::{export_table, export_tree, read_points, round_half_away};
use crate::synth::{generate, PlantSpecFile};

pub const THREADS_ENV: &str = "RARE_RULES_THREADS";

#[derive(Parser, Debug)]
#[command(name = "rare-rules", version, about = "Risk-pattern classifiers for rare positive classes")]
struct Cli {
    /// JSON file mirroring the command-line flags; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random choice (splits, synthetic data).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Infer a schema (attribute levels in first-appearance order) from CSV.
    Schema {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        class_column: String,
        #[arg(long)]
        positive_label: String,
        /// Treat blank cells as this level instead of rejecting them.
        #[arg(long)]
        missing_level: Option<String>,
    },
    /// Write train/validation/test CSV partitions.
    Split {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
    },
    /// Mine class association rules.
    Mine {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Add rates and relative risk to each rule line.
        #[arg(long)]
        metrics: bool,
    },
    /// Mine, prune and select representative patterns.
    Train {
        #[command(flatten)]
        inputs: TrainInputs,
        #[arg(long)]
        schema: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        selection: SelectionArgs,
    },
    /// Confusion counts and rates of a classifier on a dataset.
    Evaluate {
        #[arg(long)]
        classifier: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        schema: PathBuf,
    },
    /// Sweep a parameter grid and select a point in ROC space.
    Grid {
        #[command(flatten)]
        inputs: TrainInputs,
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long)]
        schema: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        selection: SelectionArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [0.09, 0.10, 0.15])]
        loc_supp_grid: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [3.0, 4.0, 5.0])]
        conf_grid: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [3, 4])]
        max_lhs_grid: Vec<usize>,
        /// Existing performance points (CSV) to select from.
        #[arg(long)]
        points: Option<PathBuf>,
        /// Only run ROC selection over `--points`.
        #[arg(long, requires = "points")]
        select_only: bool,
        #[arg(long, value_enum)]
        roc_policy: Option<RocPolicyArg>,
    },
    /// Render a classifier as a Graphviz tree.
    ExportTree {
        #[arg(long)]
        classifier: PathBuf,
    },
    /// Generate a dataset with planted risk patterns.
    Synth {
        #[arg(long)]
        spec: PathBuf,
    },
}

#[derive(Args, Debug, Default)]
struct ParamArgs {
    #[arg(long)]
    min_local_support: Option<f64>,
    #[arg(long)]
    min_conf_ratio: Option<f64>,
    #[arg(long)]
    max_length: Option<usize>,
    #[arg(long)]
    rr_threshold: Option<f64>,
    /// Count margin of the nested-pattern test.
    #[arg(long)]
    k: Option<u64>,
}

#[derive(Args, Debug, Default)]
struct SplitArgs {
    /// Train, validation and test fractions.
    #[arg(long, value_delimiter = ',')]
    split: Option<Vec<f64>>,
    #[arg(long)]
    no_stratify: bool,
}

#[derive(Args, Debug, Default)]
struct SelectionArgs {
    /// Let every positive validation record add its best unretained pattern.
    #[arg(long)]
    per_record: bool,
}

#[derive(Args, Debug, Default)]
struct TrainInputs {
    /// Full dataset, split with `--split` and `--seed`.
    #[arg(long, conflicts_with_all = ["train", "validation"])]
    data: Option<PathBuf>,
    #[arg(long, requires = "validation")]
    train: Option<PathBuf>,
    #[arg(long, requires = "train")]
    validation: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum RocPolicyArg {
    MaxMin,
    Youden,
    NearestCorner,
}

impl From<RocPolicyArg> for RocPolicy {
    fn from(p: RocPolicyArg) -> Self {
        match p {
            RocPolicyArg::MaxMin => RocPolicy::MaxMin,
            RocPolicyArg::Youden => RocPolicy::Youden,
            RocPolicyArg::NearestCorner => RocPolicy::NearestCorner,
        }
    }
}

/// Run configuration file. Every field is optional and overridden by the
/// matching flag.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub min_local_support: Option<f64>,
    pub min_conf_ratio: Option<f64>,
    pub max_length: Option<usize>,
    pub rr_threshold: Option<f64>,
    pub k: Option<u64>,
    pub seed: Option<u64>,
    pub split: Option<[f64; 3]>,
    pub stratified: Option<bool>,
    pub selection: Option<SelectionPolicy>,
    pub roc_policy: Option<RocPolicy>,
    pub threads: Option<usize>,
}

/// Inputs and settings that determine a command's outputs.
#[derive(Clone, Debug, Serialize)]
struct Provenance {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<MiningParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    split: Option<SplitSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    selection: Option<SelectionPolicy>,
    inputs: IndexMap<String, String>,
    fingerprints: IndexMap<String, String>,
}

impl Provenance {
    fn new(command: &'static str) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            params: None,
            seed: None,
            split: None,
            selection: None,
            inputs: IndexMap::new(),
            fingerprints: IndexMap::new(),
        }
    }

    fn input(&mut self, role: &str, path: &Path) {
        self.inputs.insert(role.to_owned(), path.display().to_string());
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data { input: String, source: Error },
}

type CliResult<T> = std::result::Result<T, CliError>;

trait Context<T> {
    fn at(self, input: impl AsRef<Path>) -> CliResult<T>;
}

impl<T, E: Into<Error>> Context<T> for std::result::Result<T, E> {
    fn at(self, input: impl AsRef<Path>) -> CliResult<T> {
        self.map_err(|e| CliError::Data {
            input: input.as_ref().display().to_string(),
            source: e.into(),
        })
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("rare-rules: usage error: {msg}");
            1
        }
        Err(CliError::Data { input, source }) => {
            eprintln!("rare-rules: error: {input}: {source}");
            2
        }
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    let config = match &cli.config {
        Some(path) => {
            let file = File::open(path).at(path)?;
            serde_json::from_reader(BufReader::new(file)).at(path)?
        }
        None => RunConfig::default(),
    };
    configure_threads(config.threads);
    let ctx = Ctx {
        seed: cli.seed.or(config.seed).unwrap_or(0),
        out: cli.out,
        config,
    };
    match cli.command {
        Command::Schema {
            data,
            class_column,
            positive_label,
            missing_level,
        } => cmd_schema(&ctx, &data, class_column, positive_label, missing_level),
        Command::Split { data, schema, split } => cmd_split(&ctx, &data, &schema, &split),
        Command::Mine {
            data,
            schema,
            params,
            metrics,
        } => cmd_mine(&ctx, &data, &schema, &params, metrics),
        Command::Train {
            inputs,
            schema,
            params,
            split,
            selection,
        } => cmd_train(&ctx, &inputs, &schema, &params, &split, &selection),
        Command::Evaluate {
            classifier,
            data,
            schema,
        } => cmd_evaluate(&ctx, &classifier, &data, &schema),
        Command::Grid {
            inputs,
            test,
            schema,
            params,
            split,
            selection,
            loc_supp_grid,
            conf_grid,
            max_lhs_grid,
            points,
            select_only,
            roc_policy,
        } => {
            let policy = roc_policy
                .map(RocPolicy::from)
                .or(ctx.config.roc_policy)
                .unwrap_or_default();
            if select_only {
                let points = points.expect("clap enforces --points");
                return cmd_select(&points, policy);
            }
            let schema = schema.ok_or_else(|| CliError::Usage("grid needs --schema".into()))?;
            let grid = param_grid(
                &loc_supp_grid,
                &conf_grid,
                &max_lhs_grid,
                &ctx.params(&params),
            );
            cmd_grid(&ctx, &inputs, test.as_deref(), &schema, &split, &selection, &grid, policy)
        }
        Command::ExportTree { classifier } => cmd_export_tree(&ctx, &classifier),
        Command::Synth { spec } => cmd_synth(&ctx, &spec, cli.seed),
    }
}

fn configure_threads(from_config: Option<usize>) {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .or(from_config)
        .filter(|&t| t > 0);
    if let Some(t) = threads {
        // Fails harmlessly if the global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
}

struct Ctx {
    seed: u64,
    out: Option<PathBuf>,
    config: RunConfig,
}

impl Ctx {
    fn params(&self, a: &ParamArgs) -> MiningParams {
        let d = MiningParams::default();
        let c = &self.config;
        MiningParams {
            min_local_support: a
                .min_local_support
                .or(c.min_local_support)
                .unwrap_or(d.min_local_support),
            min_conf_ratio: a.min_conf_ratio.or(c.min_conf_ratio).unwrap_or(d.min_conf_ratio),
            max_length: a.max_length.or(c.max_length).unwrap_or(d.max_length),
            rr_threshold: a.rr_threshold.or(c.rr_threshold).unwrap_or(d.rr_threshold),
            test_margin: a.k.or(c.k).unwrap_or(d.test_margin),
        }
    }

    fn split(&self, a: &SplitArgs) -> CliResult<SplitSpec> {
        let d = SplitSpec::default();
        let fractions = match (&a.split, self.config.split) {
            (Some(v), _) => <[f64; 3]>::try_from(v.as_slice()).map_err(|_| {
                CliError::Usage(format!("--split takes 3 fractions, got {}", v.len()))
            })?,
            (None, Some(f)) => f,
            (None, None) => d.fractions(),
        };
        let stratified = !a.no_stratify && self.config.stratified.unwrap_or(d.stratified);
        SplitSpec::new(fractions, self.seed, stratified).map_err(|e| CliError::Usage(e.to_string()))
    }

    fn selection(&self, a: &SelectionArgs) -> SelectionPolicy {
        if a.per_record {
            SelectionPolicy::PerRecord
        } else {
            self.config.selection.unwrap_or_default()
        }
    }

    fn out_dir(&self) -> CliResult<&Path> {
        let dir = self
            .out
            .as_deref()
            .ok_or_else(|| CliError::Usage("this command needs --out <DIR>".into()))?;
        fs::create_dir_all(dir).at(dir)?;
        Ok(dir)
    }

    /// Writes under `--out`, or to stdout when no directory was given.
    fn emit(&self, name: &str, f: impl FnOnce(&mut dyn Write) -> crate::Result<()>) -> CliResult<()> {
        match &self.out {
            Some(_) => {
                let path = self.out_dir()?.join(name);
                write_file(&path, f)
            }
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                f(&mut lock).at("<stdout>")
            }
        }
    }
}

fn write_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> crate::Result<()>) -> CliResult<()> {
    let file = File::create(path).at(path)?;
    let mut w = BufWriter::new(file);
    f(&mut w).at(path)?;
    w.flush().at(path)
}

fn write_provenance(dir: &Path, prov: &Provenance) -> CliResult<()> {
    write_file(&dir.join("provenance.json"), |w| {
        serde_json::to_writer_pretty(&mut *w, prov)?;
        writeln!(w)?;
        Ok(())
    })
}

fn read_schema(path: &Path) -> CliResult<SchemaFile> {
    let file = File::open(path).at(path)?;
    SchemaFile::read(BufReader::new(file)).at(path)
}

fn read_table(path: &Path) -> CliResult<RawTable> {
    let file = File::open(path).at(path)?;
    RawTable::read(BufReader::new(file)).at(path)
}

fn load(path: &Path, schema: &SchemaFile) -> CliResult<TransactionSet> {
    read_table(path)?
        .encode(
            &schema.attributes,
            &schema.class_column,
            &schema.positive_label,
            &schema.ingest_options(),
        )
        .at(path)
}

fn cmd_schema(
    ctx: &Ctx,
    data: &Path,
    class_column: String,
    positive_label: String,
    missing_level: Option<String>,
) -> CliResult<()> {
    let opts = IngestOptions {
        missing_level: missing_level.clone(),
    };
    let table = read_table(data)?;
    let attributes = table.infer_schema(&class_column, &opts).at(data)?;
    if !table
        .rows
        .iter()
        .any(|r| r[table.column(&class_column).expect("checked by infer_schema")] == positive_label)
    {
        log::warn!("positive label `{positive_label}` never occurs in {}", data.display());
    }
    let file = SchemaFile {
        class_column,
        positive_label,
        missing_level,
        attributes,
    };
    ctx.emit("schema.json", |w| file.write(w))
}

fn cmd_split(ctx: &Ctx, data: &Path, schema_path: &Path, split: &SplitArgs) -> CliResult<()> {
    let spec = ctx.split(split)?;
    let schema = read_schema(schema_path)?;
    let table = read_table(data)?;
    let ts = table
        .encode(
            &schema.attributes,
            &schema.class_column,
            &schema.positive_label,
            &schema.ingest_options(),
        )
        .at(data)?;
    let parts = split_indices(&ts, &spec).at(data)?;
    let dir = ctx.out_dir()?;
    let mut prov = Provenance::new("split");
    prov.seed = Some(ctx.seed);
    prov.split = Some(spec);
    prov.input("data", data);
    prov.input("schema", schema_path);
    prov.fingerprints.insert("data".into(), ts.fingerprint());
    for (name, rows) in ["train", "validation", "test"].iter().zip(&parts) {
        write_file(&dir.join(format!("{name}.csv")), |w| table.write(w, rows))?;
        prov.fingerprints
            .insert((*name).into(), ts.subset(rows).fingerprint());
    }
    write_provenance(dir, &prov)
}

fn cmd_mine(
    ctx: &Ctx,
    data: &Path,
    schema_path: &Path,
    params: &ParamArgs,
    with_metrics: bool,
) -> CliResult<()> {
    let params = ctx.params(params);
    let schema = read_schema(schema_path)?;
    let ts = load(data, &schema)?;
    let rules = mine(&ts, &params).at(data)?;
    log::info!("mined {} rules", rules.len());
    ctx.emit("rules.jsonl", |w| rules.write_jsonl(w, &schema.attributes, with_metrics))?;
    if let Some(dir) = &ctx.out {
        let mut prov = Provenance::new("mine");
        prov.params = Some(params);
        prov.input("data", data);
        prov.input("schema", schema_path);
        prov.fingerprints.insert("data".into(), ts.fingerprint());
        write_provenance(dir, &prov)?;
    }
    Ok(())
}

/// Training and validation sets, either read directly or split from one
/// file.
fn training_sets(
    ctx: &Ctx,
    inputs: &TrainInputs,
    schema: &SchemaFile,
    split: &SplitArgs,
    prov: &mut Provenance,
) -> CliResult<(TransactionSet, TransactionSet, Option<TransactionSet>)> {
    match (&inputs.data, &inputs.train, &inputs.validation) {
        (Some(data), _, _) => {
            let spec = ctx.split(split)?;
            let ts = load(data, schema)?;
            let [a, b, c] = split_indices(&ts, &spec).at(data)?;
            prov.seed = Some(ctx.seed);
            prov.split = Some(spec);
            prov.input("data", data);
            prov.fingerprints.insert("data".into(), ts.fingerprint());
            Ok((ts.subset(&a), ts.subset(&b), Some(ts.subset(&c))))
        }
        (None, Some(train), Some(validation)) => {
            prov.input("train", train);
            prov.input("validation", validation);
            Ok((load(train, schema)?, load(validation, schema)?, None))
        }
        _ => Err(CliError::Usage(
            "give either --data or both --train and --validation".into(),
        )),
    }
}

fn cmd_train(
    ctx: &Ctx,
    inputs: &TrainInputs,
    schema_path: &Path,
    params: &ParamArgs,
    split: &SplitArgs,
    selection: &SelectionArgs,
) -> CliResult<()> {
    let params = ctx.params(params);
    let policy = ctx.selection(selection);
    let schema = read_schema(schema_path)?;
    let mut prov = Provenance::new("train");
    prov.params = Some(params);
    prov.selection = Some(policy);
    prov.input("schema", schema_path);
    let (train_set, validation, _) = training_sets(ctx, inputs, &schema, split, &mut prov)?;
    let train_name = inputs.train.as_deref().or(inputs.data.as_deref()).expect("one input");
    let model = train(&train_set, &validation, &params, policy).at(train_name)?;
    prov.fingerprints.insert("train".into(), train_set.fingerprint());
    prov.fingerprints.insert("validation".into(), validation.fingerprint());

    let dir = ctx.out_dir()?;
    write_file(&dir.join("rules.jsonl"), |w| {
        model.rules.write_jsonl(w, &schema.attributes, false)
    })?;
    write_file(&dir.join("audit.jsonl"), |w| {
        model.family.write_audit(w, &schema.attributes)
    })?;
    write_file(&dir.join("classifier.json"), |w| model.classifier.write_json(w))?;
    write_provenance(dir, &prov)?;
    println!(
        "{} rules mined, {} risk patterns after pruning, {} in the classifier",
        model.rules.len(),
        model.family.len(),
        model.classifier.len()
    );
    for p in &model.classifier.patterns {
        println!(
            "  {}  RR={:.2}",
            schema.attributes.describe(&p.itemset),
            p.validated_rr
        );
    }
    Ok(())
}

fn read_classifier(path: &Path) -> CliResult<Classifier> {
    let file = File::open(path).at(path)?;
    Classifier::read_json(BufReader::new(file)).at(path)
}

fn print_point(p: &PerformancePoint) {
    println!(
        "sensitivity={} specificity={} classification_error={}",
        round_half_away(p.sensitivity, 3),
        round_half_away(p.specificity, 3),
        round_half_away(p.global_error, 3)
    );
}

fn cmd_evaluate(ctx: &Ctx, classifier_path: &Path, data: &Path, schema_path: &Path) -> CliResult<()> {
    let c = read_classifier(classifier_path)?;
    let schema = read_schema(schema_path)?;
    if schema.attributes != c.schema {
        return Err(CliError::Data {
            input: schema_path.display().to_string(),
            source: Error::SchemaMismatch(format!(
                "schema {} does not match the classifier's schema {}",
                schema.attributes.fingerprint(),
                c.schema.fingerprint()
            )),
        });
    }
    let test = load(data, &schema)?;
    let (cm, mut point) = evaluate(&c, &test).at(data)?;
    point.label = data
        .file_stem()
        .map_or_else(|| "test".into(), |s| s.to_string_lossy().into_owned());
    println!("tp={} fn={} fp={} tn={}", cm.tp, cm.fn_, cm.fp, cm.tn);
    print_point(&point);
    if let Some(dir) = &ctx.out {
        fs::create_dir_all(dir).at(dir)?;
        write_file(&dir.join("evaluation.csv"), |w| {
            w.write_all(export_table(std::slice::from_ref(&point)).as_bytes())?;
            Ok(())
        })?;
        let mut prov = Provenance::new("evaluate");
        prov.params = Some(c.params);
        prov.input("classifier", classifier_path);
        prov.input("data", data);
        prov.input("schema", schema_path);
        prov.fingerprints.insert("data".into(), test.fingerprint());
        write_provenance(dir, &prov)?;
    }
    Ok(())
}

fn cmd_select(points_path: &Path, policy: RocPolicy) -> CliResult<()> {
    let file = File::open(points_path).at(points_path)?;
    let points = read_points(BufReader::new(file)).at(points_path)?;
    let (i, p) = roc_select(&points, policy).ok_or_else(|| CliError::Data {
        input: points_path.display().to_string(),
        source: Error::Malformed("no performance points".into()),
    })?;
    println!("selected index {} (label {})", i + 1, p.label);
    print_point(p);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_grid(
    ctx: &Ctx,
    inputs: &TrainInputs,
    test_path: Option<&Path>,
    schema_path: &Path,
    split: &SplitArgs,
    selection: &SelectionArgs,
    grid: &[MiningParams],
    roc_policy: RocPolicy,
) -> CliResult<()> {
    let policy = ctx.selection(selection);
    let schema = read_schema(schema_path)?;
    let mut prov = Provenance::new("grid");
    prov.selection = Some(policy);
    prov.input("schema", schema_path);
    let (train_set, validation, split_test) = training_sets(ctx, inputs, &schema, split, &mut prov)?;
    let test = match (split_test, test_path) {
        (Some(t), None) => t,
        (None, Some(path)) => {
            prov.input("test", path);
            load(path, &schema)?
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("--test cannot be combined with --data".into()))
        }
        (None, None) => return Err(CliError::Usage("grid needs --test with --train".into())),
    };
    for (name, ts) in [("train", &train_set), ("validation", &validation), ("test", &test)] {
        prov.fingerprints.insert(name.into(), ts.fingerprint());
    }

    let results = grid_search(&train_set, &validation, &test, grid, policy);
    let mut points = Vec::new();
    let mut numbers = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(eval) => {
                points.push(eval.point);
                numbers.push(i + 1);
            }
            Err(e) => eprintln!("rare-rules: grid point {}: {e}", i + 1),
        }
    }
    let dir = ctx.out_dir()?;
    write_file(&dir.join("grid.csv"), |w| {
        w.write_all(export_table(&points).as_bytes())?;
        Ok(())
    })?;
    write_provenance(dir, &prov)?;
    let (i, p) = roc_select(&points, roc_policy).ok_or_else(|| CliError::Data {
        input: schema_path.display().to_string(),
        source: Error::Malformed("every grid point failed".into()),
    })?;
    println!("selected index {} (label {})", numbers[i], p.label);
    print_point(p);
    Ok(())
}

fn cmd_export_tree(ctx: &Ctx, classifier_path: &Path) -> CliResult<()> {
    let c = read_classifier(classifier_path)?;
    let dot = export_tree(&c).at(classifier_path)?;
    ctx.emit("tree.dot", |w| {
        w.write_all(dot.as_bytes())?;
        Ok(())
    })
}

fn cmd_synth(ctx: &Ctx, spec_path: &Path, seed_flag: Option<u64>) -> CliResult<()> {
    let file = File::open(spec_path).at(spec_path)?;
    let mut spec_file = PlantSpecFile::read(BufReader::new(file)).at(spec_path)?;
    if let Some(seed) = seed_flag.or(ctx.config.seed) {
        spec_file.noise_seed = seed;
    }
    let spec = spec_file.to_spec().at(spec_path)?;
    let (ts, truth) = generate(&spec).at(spec_path)?;
    let dir = ctx.out_dir()?;
    write_file(&dir.join("data.csv"), |w| {
        ts.write_csv(
            w,
            &spec_file.class_column,
            &spec_file.positive_label,
            &spec_file.negative_label,
        )
    })?;
    write_file(&dir.join("schema.json"), |w| spec_file.schema_file().write(w))?;
    write_file(&dir.join("ground_truth.json"), |w| truth.write_json(w, &spec.schema))?;
    let mut prov = Provenance::new("synth");
    prov.seed = Some(spec.noise_seed);
    prov.input("spec", spec_path);
    prov.fingerprints.insert("data".into(), ts.fingerprint());
    write_provenance(dir, &prov)?;
    println!(
        "{} records, {} positive, {} planted patterns",
        truth.n,
        truth.n_pos,
        truth.patterns.len()
    );
    Ok(())
}
