//! Command implementations behind the `quadsplit` binary.
//!
//! Every command is a plain function returning a serializable result, so the
//! binary only parses arguments, dispatches and maps errors to exit codes
//! (0 success, 1 verification failure, 2 usage error).

mod report;
mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use report::{catalog, catalog_entries, AnalysisReport, CatalogEntry, SequenceRow};
pub use verify::{verify, Check, Level, VerifyReport};

use crate::melnikov::{
    find_zeros, max_splitting, transversality, MelnikovError, MelnikovModel, PhaseSpec,
    ZeroReport,
};
use crate::quadfield::{PeriodicCF, QuadError};
use crate::resonance::{IntVec2, ResonanceAnalysis, ResonanceError};
use crate::splitting::{
    asymptotic_estimates, dominant_harmonics, profile, CandidateOptions, CandidateSet, Mode,
    ProfileConfig, Source, SplittingError, SplittingProfile,
};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "QUADSPLIT_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Resonance(#[from] ResonanceError),
    #[error(transparent)]
    Splitting(#[from] SplittingError),
    #[error(transparent)]
    Melnikov(#[from] MelnikovError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<QuadError> for CliError {
    fn from(e: QuadError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Splitting(SplittingError::NonPositive { .. })
            | CliError::Splitting(SplittingError::BadRange { .. })
            | CliError::Splitting(SplittingError::TooFewSamples { .. })
            | CliError::Melnikov(MelnikovError::NonPositive { .. })
            | CliError::Melnikov(MelnikovError::BadPhases(_)) => 2,
            _ => 1,
        }
    }
}

pub fn parse_word(word: &str) -> Result<PeriodicCF, CliError> {
    word.parse()
        .map_err(|e: QuadError| CliError::Usage(format!("bad word {word:?}: {e}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Options shared by the data-producing commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub rho: f64,
    pub eps_lo: f64,
    pub eps_hi: f64,
    pub samples: usize,
    pub mode: Mode,
    /// `μ = ε^p`.
    pub p: f64,
    pub phases: PhaseSpec,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            rho: 1.0,
            eps_lo: 1e-8,
            eps_hi: 1e-4,
            samples: 400,
            mode: Mode::Exact,
            p: 4.0,
            phases: PhaseSpec::Zero,
            format: Format::Csv,
            out: None,
        }
    }
}

impl RunConfig {
    /// The first-order description needs `μ = ε^p` with `p > 3`.
    pub fn p_warning(&self) -> bool {
        self.p <= 3.0
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub word: String,
    pub rho: f64,
    pub mode: Mode,
    pub phases: PhaseSpec,
}

impl Metadata {
    fn new(word: &str, cfg: &RunConfig) -> Self {
        Metadata {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            word: word.to_string(),
            rho: cfg.rho,
            mode: cfg.mode,
            phases: cfg.phases,
        }
    }
}

pub fn cmd_numbers() -> Vec<CatalogEntry> {
    catalog_entries()
}

pub fn cmd_analyze(word: &str, rho: f64) -> Result<AnalysisReport, CliError> {
    let cf = parse_word(word)?;
    let analysis = ResonanceAnalysis::new(&cf)?;
    let report = AnalysisReport::new(&analysis, rho)?;
    if !report.eigen_identity {
        return Err(CliError::Verification(format!(
            "eigen-identity of U fails for [{word}]"
        )));
    }
    Ok(report)
}

/// One curve `g_k` of the primary or main secondary family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyCurve {
    pub family: String,
    pub k: IntVec2,
    pub source: Source,
    pub gamma_tilde: f64,
    pub eps_peak: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProfileDocument {
    pub meta: Metadata,
    pub profile: SplittingProfile,
    pub curves: Vec<FamilyCurve>,
}

pub fn cmd_profile(word: &str, cfg: &RunConfig) -> Result<ProfileDocument, CliError> {
    let cf = parse_word(word)?;
    let analysis = ResonanceAnalysis::new(&cf)?;
    let pcfg = ProfileConfig {
        eps_lo: cfg.eps_lo,
        eps_hi: cfg.eps_hi,
        samples: cfg.samples,
        mode: cfg.mode,
        rho: cfg.rho,
    };
    let prof = profile(&analysis, &pcfg)?;
    let set = CandidateSet::build(
        &analysis,
        cfg.eps_lo,
        cfg.eps_hi,
        CandidateOptions {
            threshold: prof.threshold,
            rho: cfg.rho,
            mode: cfg.mode,
        },
    )?;
    let curves = set
        .entries
        .iter()
        .filter_map(|e| {
            let name = match e.source {
                Source::Sequence { j, .. } if j == analysis.j0 => "primary",
                Source::Sequence { j, .. } if j == analysis.j1 => "main-secondary",
                _ => return None,
            };
            Some(FamilyCurve {
                family: name.to_string(),
                k: e.k.clone(),
                source: e.source,
                gamma_tilde: e.gamma_tilde,
                eps_peak: e.eps_peak,
            })
        })
        .collect();
    Ok(ProfileDocument {
        meta: Metadata::new(&cf.word(), cfg),
        profile: prof,
        curves,
    })
}

impl ProfileDocument {
    /// Long-format samples of every family curve, `eps,family,j,n,k1,k2,g`.
    pub fn write_curves_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# word: {}", self.meta.word)?;
        writeln!(w, "# mode: {}", self.meta.mode)?;
        writeln!(w, "# rho: {:.11e}", self.meta.rho)?;
        writeln!(w, "eps,family,j,n,k1,k2,g")?;
        for c in &self.curves {
            let Source::Sequence { j, n } = c.source else {
                continue;
            };
            let entry = crate::splitting::HarmonicEntry::from_peak(
                c.k.clone(),
                c.gamma_tilde,
                c.eps_peak.ln(),
                c.source,
            );
            for s in &self.profile.samples {
                writeln!(
                    w,
                    "{:.11e},{},{},{},{},{},{:.11e}",
                    s.eps,
                    c.family,
                    j,
                    n,
                    c.k.k1,
                    c.k.k2,
                    entry.g_ln(s.ln_eps)
                )?;
            }
        }
        Ok(())
    }

    fn write_profile_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# tool: {} {}", self.meta.tool, self.meta.version)?;
        self.profile.write_csv(w)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MelnikovReport {
    pub meta: Metadata,
    pub eps: f64,
    pub mu: f64,
    pub p: f64,
    /// `p ≤ 3`: outside the range where the first-order term dominates.
    pub p_warning: bool,
    #[serde(rename = "C0")]
    pub c0: f64,
    pub h1: f64,
    pub h2: f64,
    pub s1: IntVec2,
    pub s2: IntVec2,
    pub flagged: bool,
    pub harmonics: usize,
    pub log_scale: f64,
    pub beta_ref: f64,
    pub zeros: ZeroReport,
    pub nondegenerate: bool,
    pub ln_m_star: f64,
    pub ln_max_splitting: f64,
    /// `ln(μ/√ε) − C₀h₁ε^{-1/4}` and `ln(με^{1/4}) − C₀h₂ε^{-1/4}`.
    pub predicted_ln_max: f64,
    pub predicted_ln_m_star: f64,
    /// `E₁ = −ε^{1/4}[ln max − ln(μ/√ε)]/C₀`.
    pub e1: f64,
    /// `E₂ = −ε^{1/4}[ln m* − ln(με^{1/4})]/C₀`.
    pub e2: f64,
    pub rel_dev_e1: f64,
    pub rel_dev_e2: f64,
}

pub fn cmd_melnikov(
    word: &str,
    eps: f64,
    cfg: &RunConfig,
    force: bool,
) -> Result<MelnikovReport, CliError> {
    let cf = parse_word(word)?;
    let analysis = ResonanceAnalysis::new(&cf)?;
    melnikov_report(&analysis, eps, cfg, force)
}

pub fn melnikov_report(
    analysis: &ResonanceAnalysis,
    eps: f64,
    cfg: &RunConfig,
    force: bool,
) -> Result<MelnikovReport, CliError> {
    let set = CandidateSet::build(
        analysis,
        eps,
        eps,
        CandidateOptions {
            threshold: 8.0,
            rho: cfg.rho,
            mode: Mode::Exact,
        },
    )?;
    let dom = dominant_harmonics(&set, eps.ln())?;
    if dom.flagged && !force {
        return Err(CliError::Usage(format!(
            "eps = {eps:e} lies near a transition (h1 = {}, h2 = {}, next = {}); pass --force to run anyway",
            dom.h1, dom.h2, dom.h3
        )));
    }
    if cfg.p_warning() {
        log::warn!("p = {} <= 3: first-order terms need not dominate", cfg.p);
    }
    let model = MelnikovModel::build_power(analysis, eps, cfg.p, cfg.rho, cfg.phases)?;
    let zeros = find_zeros(&model);
    if !zeros.is_nondegenerate() {
        log::warn!(
            "degenerate or near-transition zero set: {} zeros, index sum {}",
            zeros.zeros.len(),
            zeros.index_sum
        );
    }
    let tr = transversality(&model, &zeros);
    let ms = max_splitting(&model);
    let c0 = set.constants.c0;
    let (pred_max, pred_m) = asymptotic_estimates(eps, model.mu, c0, dom.h1, dom.h2)?;
    let q = eps.powf(0.25);
    let ln_mu = model.ln_mu();
    let e1 = -q * (ms.ln_max - (ln_mu - 0.5 * eps.ln())) / c0;
    let e2 = -q * (tr.ln_m_star - (ln_mu + 0.25 * eps.ln())) / c0;
    Ok(MelnikovReport {
        meta: Metadata::new(&analysis.cf.word(), cfg),
        eps,
        mu: model.mu,
        p: cfg.p,
        p_warning: cfg.p_warning(),
        c0,
        h1: dom.h1,
        h2: dom.h2,
        s1: set.entries[dom.s1].k.clone(),
        s2: set.entries[dom.s2].k.clone(),
        flagged: dom.flagged,
        harmonics: model.harmonics.len(),
        log_scale: model.log_scale,
        beta_ref: model.beta_ref,
        nondegenerate: zeros.is_nondegenerate(),
        zeros,
        ln_m_star: tr.ln_m_star,
        ln_max_splitting: ms.ln_max,
        predicted_ln_max: pred_max,
        predicted_ln_m_star: pred_m,
        e1,
        e2,
        rel_dev_e1: (e1 - dom.h1) / dom.h1,
        rel_dev_e2: (e2 - dom.h2) / dom.h2,
    })
}

fn file_stem(word: &str) -> String {
    word.replace(',', "-")
}

/// `out` when given, otherwise `name` inside `$QUADSPLIT_OUT_DIR` (or the
/// working directory).
pub fn output_path(out: Option<&Path>, name: &str) -> PathBuf {
    match out {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."))
            .join(name),
    }
}

fn create(path: &Path) -> Result<io::BufWriter<fs::File>, CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err)?;
    }
    fs::File::create(path).map(io::BufWriter::new).map_err(io_err)
}

fn finish(path: &Path, mut w: io::BufWriter<fs::File>, r: io::Result<()>) -> Result<(), CliError> {
    r.and_then(|_| w.flush()).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = create(path)?;
    let r = serde_json::to_writer_pretty(&mut w, value)
        .map_err(io::Error::from)
        .and_then(|_| writeln!(w));
    finish(path, w, r)
}

/// Writes the profile; CSV output goes to two files, the envelopes and the
/// family curves (`<stem>_curves.csv`).
pub fn write_profile(doc: &ProfileDocument, cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let stem = format!("profile_{}_{}", file_stem(&doc.meta.word), doc.meta.mode);
    match cfg.format {
        Format::Json => {
            let path = output_path(cfg.out.as_deref(), &format!("{stem}.json"));
            write_json(&path, doc)?;
            Ok(vec![path])
        }
        Format::Csv => {
            let path = output_path(cfg.out.as_deref(), &format!("{stem}.csv"));
            let mut w = create(&path)?;
            let r = doc.write_profile_csv(&mut w);
            finish(&path, w, r)?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or(stem);
            let curves = path.with_file_name(format!("{name}_curves.csv"));
            let mut w = create(&curves)?;
            let r = doc.write_curves_csv(&mut w);
            finish(&curves, w, r)?;
            Ok(vec![path, curves])
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "quadsplit",
    version,
    about = "Resonances and splitting exponents for quadratic frequency ratios"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the 24 catalog numbers.
    Numbers,
    /// Resonance analysis of one continued fraction, as JSON on stdout.
    Analyze {
        /// Period of the continued fraction, e.g. "1,2".
        word: String,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
    },
    /// Sample h1, h2 and the dominant harmonics on a log grid.
    Profile {
        word: String,
        #[arg(long, default_value_t = 1e-8)]
        eps_lo: f64,
        #[arg(long, default_value_t = 1e-4)]
        eps_hi: f64,
        #[arg(long, default_value_t = 400)]
        samples: usize,
        #[arg(long, default_value = "exact")]
        mode: Mode,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Output file; defaults to a name inside $QUADSPLIT_OUT_DIR.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zeros, transversality and maximal splitting of the Melnikov potential.
    Melnikov {
        word: String,
        #[arg(long)]
        eps: f64,
        /// Exponent in mu = eps^p.
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        /// "zero" or "seed:N".
        #[arg(long, default_value = "zero")]
        phases: PhaseSpec,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run even when eps lies near a transition.
        #[arg(long)]
        force: bool,
    },
    /// Run the oracle checks on one word or on the whole catalog ("all").
    Verify {
        word: String,
        #[arg(long, value_enum, default_value = "quick")]
        level: Level,
    },
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Writes to stdout; a closed pipe ends output silently.
fn emit(text: &str) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    emit(&(serde_json::to_string_pretty(value)? + "\n"))
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Numbers => {
            let mut text = format!("{:<6} {:>20}  {:<28} {:>4}\n", "word", "omega", "surd", "D");
            for e in cmd_numbers() {
                text += &format!(
                    "{:<6} {:>20.16}  {:<28} {:>4}\n",
                    e.word, e.omega, e.omega_surd, e.d
                );
            }
            emit(&text)
        }
        Command::Analyze { word, rho } => print_json(&cmd_analyze(&word, rho)?),
        Command::Profile {
            word,
            eps_lo,
            eps_hi,
            samples,
            mode,
            rho,
            format,
            out,
        } => {
            let cfg = RunConfig {
                rho,
                eps_lo,
                eps_hi,
                samples,
                mode,
                format,
                out,
                ..RunConfig::default()
            };
            let doc = cmd_profile(&word, &cfg)?;
            let paths = write_profile(&doc, &cfg)?;
            let listing: String = paths.iter().map(|p| format!("{}\n", p.display())).collect();
            emit(&listing)
        }
        Command::Melnikov {
            word,
            eps,
            p,
            rho,
            phases,
            out,
            force,
        } => {
            let cfg = RunConfig {
                rho,
                p,
                phases,
                format: Format::Json,
                out,
                ..RunConfig::default()
            };
            let report = cmd_melnikov(&word, eps, &cfg, force)?;
            let name = format!("melnikov_{}_{:e}.json", file_stem(&word), eps);
            let path = output_path(cfg.out.as_deref(), &name);
            write_json(&path, &report)?;
            emit(&format!("{}\n", path.display()))
        }
        Command::Verify { word, level } => {
            let words = if word == "all" {
                catalog()
            } else {
                vec![parse_word(&word)?]
            };
            let report = verify(&words, level)?;
            print_json(&report)?;
            if report.passed {
                Ok(())
            } else {
                let failed: Vec<String> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| format!("[{}] {}", c.word, c.name))
                    .collect();
                Err(CliError::Verification(failed.join(", ")))
            }
        }
    }
}
