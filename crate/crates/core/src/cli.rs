//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource
//! limit (enumeration cap or coefficient overflow).

use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cache::{character_key, CharacterCache, CACHE_DIR_ENV};
use crate::combinatorics::{
    degree, enumerate_admissible_capped, weight, LevelComposition, DEFAULT_OUTPUT_CAP,
};
use crate::error::Error;
use crate::exactness::{ExactnessLab, ExactnessReport};
use crate::lemmas::run_lemma_suite_capped;
use crate::qseries::Character;
use crate::recurrence::{
    compute_character_capped, verify_recurrence_for, CoefficientSolver, OracleTable,
    VerificationReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "fs-characters",
    version,
    about = "Admissible configurations, characters and exact sequences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List admissible configurations as JSON lines.
    Enumerate(EnumerateArgs),
    /// Character of one composition.
    Character(CharacterArgs),
    /// Character of one composition via the coefficient solver.
    Solve(SolveArgs),
    /// Check the character recurrence system.
    VerifyRecurrence(RecurrenceArgs),
    /// Check exactness of the sequences grade by grade.
    VerifyExactness(ExactnessArgs),
    /// Run the region property suite.
    Lemmas(LemmaArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Enum,
    Solve,
    Both,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Rank ℓ.
    #[arg(long = "ell")]
    pub ell: Option<usize>,
    /// Level k.
    #[arg(long = "k")]
    pub level: Option<u32>,
    /// Composition k0,k1,...,kℓ.
    #[arg(long = "K", value_delimiter = ',')]
    pub composition: Option<Vec<u32>>,
    /// Maximum number of configurations a single enumeration may produce.
    #[arg(long, default_value_t = DEFAULT_OUTPUT_CAP)]
    pub cap: usize,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub max_degree: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CharacterArgs {
    #[command(flatten)]
    pub common: Common,
    /// Truncation order.
    #[arg(long = "M")]
    pub order: u32,
    #[arg(long, value_enum, default_value_t = Method::Enum)]
    pub method: Method,
    /// Cache directory; falls back to $FS_CHARACTERS_CACHE_DIR, none if unset.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "M")]
    pub order: u32,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RecurrenceArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "M")]
    pub order: u32,
}

#[derive(Debug, Args)]
pub struct ExactnessArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub max_degree: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct LemmaArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub max_degree: u64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// The instance a command runs on: rank, level and optionally one composition.
struct Instance {
    ell: usize,
    level: u32,
    composition: Option<LevelComposition>,
}

impl Common {
    fn instance(&self) -> std::result::Result<Instance, Failure> {
        let composition = match &self.composition {
            Some(parts) => Some(
                LevelComposition::new(parts.clone())
                    .map_err(|e| Failure::Usage(format!("--K: {e}")))?,
            ),
            None => None,
        };
        let ell = match (self.ell, &composition) {
            (Some(0), _) => return Err(Failure::Usage("--ell must be at least 1".into())),
            (Some(ell), Some(k)) if k.rank() != ell => {
                return Err(Failure::Usage(format!(
                    "--K has {} parts but --ell {ell} needs {}",
                    k.rank() + 1,
                    ell + 1
                )))
            }
            (Some(ell), _) => ell,
            (None, Some(k)) => k.rank(),
            (None, None) => return Err(Failure::Usage("either --ell or --K is required".into())),
        };
        let level = match (self.level, &composition) {
            (Some(l), Some(k)) if k.level() != l => {
                return Err(Failure::Usage(format!(
                    "--K sums to {} but --k is {l}",
                    k.level()
                )))
            }
            (Some(l), _) => l,
            (None, Some(k)) => k.level(),
            (None, None) => return Err(Failure::Usage("either --k or --K is required".into())),
        };
        Ok(Instance {
            ell,
            level,
            composition,
        })
    }

    fn required_composition(&self) -> std::result::Result<LevelComposition, Failure> {
        self.instance()?
            .composition
            .ok_or_else(|| Failure::Usage("--K is required".into()))
    }
}

impl Instance {
    fn compositions(&self) -> Result<Vec<LevelComposition>, Failure> {
        match &self.composition {
            Some(k) => Ok(vec![k.clone()]),
            None => Ok(LevelComposition::all(self.ell, self.level)?),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns its exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let result = match &cli.command {
        Command::Enumerate(a) => cmd_enumerate(a, out),
        Command::Character(a) => {
            cmd_character(&a.common, a.order, a.method, a.cache_dir.clone(), out, err)
        }
        Command::Solve(a) => cmd_character(
            &a.common,
            a.order,
            Method::Solve,
            a.cache_dir.clone(),
            out,
            err,
        ),
        Command::VerifyRecurrence(a) => cmd_verify_recurrence(a, out),
        Command::VerifyExactness(a) => cmd_verify_exactness(a, out),
        Command::Lemmas(a) => cmd_lemmas(a, out),
    };
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(code), Ok(())) => code,
        (Ok(_), Err(e)) | (Err(Failure::Io(e)), _) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAIL
        }
        (Err(Failure::Usage(msg)), _) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        (Err(Failure::Lib(e)), _) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::ResourceLimit { .. } | Error::Overflow => EXIT_RESOURCE,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)
}

#[derive(Serialize)]
struct ConfigurationRecord<'a> {
    entries: &'a crate::Configuration,
    degree: u64,
    weight: crate::WeightVector,
}

fn cmd_enumerate(a: &EnumerateArgs, out: &mut dyn Write) -> CmdResult {
    let k = a.common.required_composition()?;
    let rank = k.rank();
    let configs = enumerate_admissible_capped(&k, a.max_degree, a.common.cap)?;
    if a.format == Format::Csv {
        writeln!(out, "entries,degree,weight")?;
    }
    for cfg in &configs {
        let rec = ConfigurationRecord {
            entries: cfg,
            degree: degree(cfg, rank),
            weight: weight(cfg, rank),
        };
        match a.format {
            Format::Json => write_json(out, &rec)?,
            Format::Csv => {
                let join = |v: Vec<String>| v.join(";");
                writeln!(
                    out,
                    "{},{},{}",
                    join(cfg.entries().iter().map(u32::to_string).collect()),
                    rec.degree,
                    join(rec.weight.components().iter().map(i64::to_string).collect())
                )?
            }
        }
    }
    Ok(EXIT_OK)
}

fn character_json(
    k: &LevelComposition,
    order: u32,
    method: Method,
    cap: usize,
    cache: Option<&CharacterCache>,
    err: &mut dyn Write,
) -> Result<String, Failure> {
    let label = match method {
        Method::Solve => "solve",
        _ => "enum",
    };
    let key = character_key(k.rank(), k.level(), k.parts(), order, label);
    if let Some(cache) = cache {
        if let Some(payload) = cache.load(&key) {
            writeln!(err, "cache hit: {}", cache.path_for(&key).display())?;
            return Ok(payload);
        }
    }
    let ch: Character = match method {
        Method::Solve => CoefficientSolver::new(order).character(k)?,
        _ => compute_character_capped(k, order, cap)?,
    };
    let payload = serde_json::to_string(&ch).map_err(io::Error::from)?;
    if let Some(cache) = cache {
        cache.store(&key, &payload)?;
        writeln!(err, "cache store: {}", cache.path_for(&key).display())?;
    }
    Ok(payload)
}

fn cmd_character(
    common: &Common,
    order: u32,
    method: Method,
    cache_dir: Option<PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let k = common.required_composition()?;
    let cache = cache_dir
        .or_else(|| std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from))
        .map(CharacterCache::new);
    match method {
        Method::Enum | Method::Solve => {
            let payload = character_json(&k, order, method, common.cap, cache.as_ref(), err)?;
            writeln!(out, "{payload}")?;
            Ok(EXIT_OK)
        }
        Method::Both => {
            let by_enum = character_json(&k, order, Method::Enum, common.cap, cache.as_ref(), err)?;
            let by_solve =
                character_json(&k, order, Method::Solve, common.cap, cache.as_ref(), err)?;
            let matched = by_enum == by_solve;
            let verdict = if matched { "match" } else { "mismatch" };
            writeln!(
                out,
                "{{\"method\":\"both\",\"verdict\":\"{verdict}\",\"enum\":{by_enum},\"solve\":{by_solve}}}"
            )?;
            Ok(if matched { EXIT_OK } else { EXIT_FAIL })
        }
    }
}

fn cmd_verify_recurrence(a: &RecurrenceArgs, out: &mut dyn Write) -> CmdResult {
    let inst = a.common.instance()?;
    let mut oracle = OracleTable::with_cap(a.order, a.common.cap);
    let mut outcomes = Vec::new();
    for k in inst.compositions()? {
        outcomes.push(verify_recurrence_for(&k, a.order, &mut |c| {
            oracle.character(c).cloned()
        })?);
    }
    let report = VerificationReport {
        ell: inst.ell,
        k: inst.level,
        order: a.order,
        all_pass: outcomes.iter().all(|o| o.pass),
        compositions: outcomes,
    };
    write_json(out, &report)?;
    Ok(if report.all_pass { EXIT_OK } else { EXIT_FAIL })
}

#[derive(Serialize)]
struct ExactnessSummary {
    ell: usize,
    k: u32,
    max_degree: u64,
    all_pass: bool,
    sequences: Vec<ExactnessReport>,
}

fn cmd_verify_exactness(a: &ExactnessArgs, out: &mut dyn Write) -> CmdResult {
    let inst = a.common.instance()?;
    let sequences = inst
        .compositions()?
        .iter()
        .map(|k| ExactnessLab::with_cap(k, a.max_degree, a.common.cap)?.report())
        .collect::<crate::Result<Vec<_>>>()?;
    let summary = ExactnessSummary {
        ell: inst.ell,
        k: inst.level,
        max_degree: a.max_degree,
        all_pass: sequences.iter().all(|s| s.all_pass),
        sequences,
    };
    match a.format {
        Format::Json => write_json(out, &summary)?,
        Format::Csv => {
            writeln!(out, "{}", ExactnessReport::CSV_HEADER)?;
            for s in &summary.sequences {
                for row in s.csv_rows() {
                    writeln!(out, "{row}")?;
                }
            }
        }
    }
    Ok(if summary.all_pass { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_lemmas(a: &LemmaArgs, out: &mut dyn Write) -> CmdResult {
    let inst = a.common.instance()?;
    if inst.composition.is_some() {
        return Err(Failure::Usage(
            "lemmas runs over all compositions; drop --K".into(),
        ));
    }
    let report = run_lemma_suite_capped(inst.ell, inst.level, a.max_degree, a.common.cap)?;
    write_json(out, &report)?;
    Ok(if report.all_pass { EXIT_OK } else { EXIT_FAIL })
}
