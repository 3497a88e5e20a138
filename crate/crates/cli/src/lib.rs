//! Command-line front end for `corefud-core`: scoring, format conversion,
//! output cleaning, statistics, analyses and split sampling.

pub mod commands;
pub mod error;
pub mod io;
pub mod manifest;
pub mod render;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use corefud_core::analysis::{CurveConfig, EntityFilter, FactorLevel, RangeSortKey, DEFAULT_CAP_WORDS};
use corefud_core::formats::CleanerConfig;
use corefud_core::{MatchRegime, ScoreConfig, SingletonMode};

use crate::error::{CliError, Result};
use crate::manifest::{Dataset, Manifest};

#[derive(Parser, Debug)]
#[command(name = "corefud", version, about = "Coreference evaluation and data tools for CorefUD CoNLL-U files")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Score predictions against gold files
    Score {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        scoring: ScoringArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Convert between CoNLL-U, plaintext and JSON
    Convert {
        direction: Direction,
        #[arg(long)]
        input: PathBuf,
        /// CoNLL-U file supplying tokens and trees (from-text, from-json)
        #[arg(long)]
        skeleton: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Repair generated plaintext against the reference documents
    Clean {
        /// CoNLL-U reference
        #[arg(long)]
        reference: PathBuf,
        /// Generated plaintext, one document per line
        #[arg(long)]
        noisy: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Also write the reconstructed CoNLL-U here
        #[arg(long)]
        conllu: Option<PathBuf>,
        #[arg(long)]
        max_cost_ratio: Option<f64>,
    },
    /// Corpus statistics (documents, words, entities, mentions)
    Stats {
        #[command(flatten)]
        data: DataArgs,
        /// Which entities to describe
        #[arg(long, value_enum, default_value_t = StatsFilter::Exclude)]
        singletons: StatsFilter,
        /// Describe the prediction files of a manifest instead of gold
        #[arg(long)]
        pred_side: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Analyses of system behaviour
    Analyze {
        #[command(subcommand)]
        kind: Analysis,
    },
    /// Cap splits by sampling whole documents
    Sample {
        #[command(flatten)]
        data: DataArgs,
        /// Output file (single input mode)
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        cap_words: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Leave the input untouched (single input mode)
        #[arg(long)]
        exempt: bool,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Subcommand, Debug)]
pub enum Analysis {
    /// CoNLL F1 over documents sorted by entity range, in token windows
    LongRange {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        scoring: ScoringArgs,
        #[arg(long)]
        window_tokens: Option<u64>,
        #[arg(long)]
        min_p95: Option<u64>,
        #[arg(long, value_enum, default_value_t = SortKey::P95)]
        sort_key: SortKey,
        #[command(flatten)]
        run: RunArgs,
    },
    /// CoNLL F1 restricted to heads of given UPOS tags
    Upos {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        scoring: ScoringArgs,
        #[arg(long, value_enum, default_value_t = Level::Entity)]
        level: Level,
        #[arg(long, value_delimiter = ',', default_value = "NOUN,PRON,PROPN,DET,ADJ,VERB,ADV,NUM")]
        tags: Vec<String>,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Direction {
    ToText,
    FromText,
    ToJson,
    FromJson,
    /// Strip empty nodes and coreference, as given to systems
    ToInput,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum StatsFilter {
    Exclude,
    Include,
    Only,
}

impl From<StatsFilter> for EntityFilter {
    fn from(f: StatsFilter) -> Self {
        match f {
            StatsFilter::Exclude => EntityFilter::NonSingletons,
            StatsFilter::Include => EntityFilter::All,
            StatsFilter::Only => EntityFilter::Singletons,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SortKey {
    P95,
    MaxGap,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Level {
    Entity,
    Mention,
}

/// Either one gold/pred pair or a manifest of datasets.
#[derive(Args, Debug, Default)]
pub struct DataArgs {
    #[arg(long, conflicts_with = "manifest")]
    pub gold: Option<PathBuf>,
    #[arg(long, conflicts_with = "manifest")]
    pub pred: Option<PathBuf>,
    /// Single input file (stats, sample)
    #[arg(long, conflicts_with_all = ["manifest", "gold"])]
    pub input: Option<PathBuf>,
    /// Dataset name used in reports for single-pair runs
    #[arg(long, default_value = "data")]
    pub name: String,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct ScoringArgs {
    #[arg(long)]
    pub regime: Option<MatchRegime>,
    #[arg(long)]
    pub singletons: Option<SingletonMode>,
}

#[derive(Args, Debug, Default)]
pub struct RunArgs {
    /// Parallel datasets
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Settings after merging defaults, manifest globals and flags (flags win).
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub score: ScoreConfig,
    pub seed: u64,
    pub cap_words: u64,
    pub curve: CurveConfig,
    pub cleaner: CleanerConfig,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            score: ScoreConfig::default(),
            seed: 0,
            cap_words: DEFAULT_CAP_WORDS,
            curve: CurveConfig::default(),
            cleaner: CleanerConfig::default(),
        }
    }
}

fn setting<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v.parse().map(Some).map_err(|_| CliError::Config(format!("manifest setting {key}: bad value {v:?}"))),
    }
}

impl Settings {
    pub fn from_manifest(map: &BTreeMap<String, String>) -> Result<Settings> {
        let mut s = Settings::default();
        if let Some(r) = setting(map, "regime")? {
            s.score.regime = r;
        }
        if let Some(m) = setting(map, "singletons")? {
            s.score.singletons = m;
        }
        if let Some(v) = setting(map, "zero_parent_weight")? {
            s.score.zero_weights.parent = v;
        }
        if let Some(v) = setting(map, "zero_label_bonus")? {
            s.score.zero_weights.label_bonus = v;
        }
        if !s.score.zero_weights.is_valid() {
            return Err(CliError::Config("zero weights must be finite and non-negative".into()));
        }
        if let Some(v) = setting(map, "seed")? {
            s.seed = v;
        }
        if let Some(v) = setting(map, "cap_words")? {
            s.cap_words = v;
        }
        if let Some(v) = setting(map, "window_tokens")? {
            s.curve.window_tokens = v;
        }
        if let Some(v) = setting(map, "min_p95")? {
            s.curve.min_p95 = v;
        }
        if let Some(v) = setting(map, "max_cost_ratio")? {
            s.cleaner.max_cost_ratio = v;
        }
        Ok(s)
    }

    fn apply_scoring(&mut self, args: &ScoringArgs) {
        if let Some(r) = args.regime {
            self.score.regime = r;
        }
        if let Some(m) = args.singletons {
            self.score.singletons = m;
        }
    }
}

/// Datasets named by the arguments, plus the manifest settings.
pub fn datasets(data: &DataArgs, need_pred: bool) -> Result<(Vec<Dataset>, Settings)> {
    let (datasets, settings) = match &data.manifest {
        Some(path) => {
            let Manifest { settings, datasets } = manifest::load(path)?;
            if datasets.is_empty() {
                return Err(CliError::Config(format!("{}: no datasets", path.display())));
            }
            (datasets, Settings::from_manifest(&settings)?)
        }
        None => {
            let gold = data.gold.clone().or_else(|| data.input.clone()).ok_or_else(|| {
                CliError::Config("give --manifest, or --gold/--pred (--input for single-file commands)".into())
            })?;
            let dataset = Dataset { name: data.name.clone(), gold, pred: data.pred.clone(), exempt: false };
            (vec![dataset], Settings::default())
        }
    };
    if need_pred {
        if let Some(d) = datasets.iter().find(|d| d.pred.is_none()) {
            return Err(CliError::Config(format!("dataset {:?} has no prediction file", d.name)));
        }
    }
    io::check_inputs(datasets.iter().flat_map(|d| std::iter::once(&d.gold).chain(d.pred.as_ref())))?;
    Ok((datasets, settings))
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {jobs} worker threads: {e}")))
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Score { data, scoring, run } => {
            let (sets, mut settings) = datasets(&data, true)?;
            settings.apply_scoring(&scoring);
            let pool = pool(run.jobs)?;
            commands::score(&sets, &settings, &pool, run.out.as_deref())
        }
        Command::Convert { direction, input, skeleton, output } => {
            commands::convert(direction, &input, skeleton.as_deref(), &output)
        }
        Command::Clean { reference, noisy, output, conllu, max_cost_ratio } => {
            let mut config = CleanerConfig::default();
            if let Some(r) = max_cost_ratio {
                if !(r >= 0.0 && r.is_finite()) {
                    return Err(CliError::Config("--max-cost-ratio must be a non-negative number".into()));
                }
                config.max_cost_ratio = r;
            }
            commands::clean(&reference, &noisy, &output, conllu.as_deref(), &config)
        }
        Command::Stats { data, singletons, pred_side, run } => {
            let (sets, _) = datasets(&data, pred_side)?;
            let pool = pool(run.jobs)?;
            commands::stats(&sets, singletons.into(), pred_side, &pool, run.out.as_deref())
        }
        Command::Analyze { kind: Analysis::LongRange { data, scoring, window_tokens, min_p95, sort_key, run } } => {
            let (sets, mut settings) = datasets(&data, true)?;
            settings.apply_scoring(&scoring);
            if let Some(w) = window_tokens {
                settings.curve.window_tokens = w;
            }
            if let Some(m) = min_p95 {
                settings.curve.min_p95 = m;
            }
            settings.curve.sort_key = match sort_key {
                SortKey::P95 => RangeSortKey::P95,
                SortKey::MaxGap => RangeSortKey::MaxAdjacentGap,
            };
            let pool = pool(run.jobs)?;
            commands::long_range(&sets, &settings, &pool, run.out.as_deref())
        }
        Command::Analyze { kind: Analysis::Upos { data, scoring, level, tags, run } } => {
            let (sets, mut settings) = datasets(&data, true)?;
            settings.apply_scoring(&scoring);
            let level = match level {
                Level::Entity => FactorLevel::Entity,
                Level::Mention => FactorLevel::Mention,
            };
            let pool = pool(run.jobs)?;
            commands::upos(&sets, &settings, level, &tags, &pool, run.out.as_deref())
        }
        Command::Sample { data, output, cap_words, seed, exempt, run } => {
            let (mut sets, mut settings) = datasets(&data, false)?;
            if let Some(c) = cap_words {
                settings.cap_words = c;
            }
            if let Some(s) = seed {
                settings.seed = s;
            }
            let targets = match (&data.manifest, output, &run.out) {
                (None, Some(out), _) => {
                    sets[0].exempt = exempt;
                    vec![out]
                }
                (Some(_), _, Some(dir)) => {
                    io::prepare_out_dir(dir)?;
                    sets.iter().map(|d| dir.join(format!("{}.conllu", d.name))).collect()
                }
                _ => return Err(CliError::Config("sample needs --output (single input) or --manifest with --out".into())),
            };
            commands::sample(&sets, &targets, &settings)
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { error::EXIT_CONFIG } else { error::EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => error::EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
