use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use lrc_core::analysis::{
    self, certify_into, compare, record_of, MatchStatus, TableFamily, TableOptions, Theorem,
    DEFAULT_BUDGET,
};
use lrc_core::construct::{self, Construction, ConstructionSpec};
use lrc_core::error::Error;
use lrc_core::gf::Elem;
use lrc_core::locality::{self, InterpBasis, RecoveryStructure};
use lrc_core::LinearCode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "lrc",
    version,
    about = "Build, certify and analyse locally recoverable codes"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a code from a TOML spec; writes the code and a .lrcs sidecar.
    Build {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the parameters of a spec (closed form for params_only).
    Params {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check every recovery set of a built code.
    Certify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Monte-Carlo erasure and repair rounds.
    Repair {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Pattern::Single)]
        pattern: Pattern,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Minimum distance of a built code or of a spec.
    Distance {
        #[arg(
            long = "in",
            conflicts_with = "config",
            required_unless_present = "config"
        )]
        input: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reproduce a parameter table as CSV.
    Table {
        #[arg(long)]
        family: String,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Annotate rows against the embedded reference lists.
        #[arg(long)]
        compare: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Pattern {
    /// One random position.
    Single,
    /// A position together with its smallest recovery set.
    Fiber,
    /// A position and one symbol of each of its recovery sets.
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exhaustive,
    Random,
}

enum Failure {
    Build(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Build(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Build(format!("IoError: {e}"))
    }
}

type CmdResult = Result<(), Failure>;

fn sidecar_path(p: &Path) -> PathBuf {
    p.with_extension("lrcs")
}

fn read_spec(path: &Path) -> Result<ConstructionSpec, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Build(format!("ConfigError: {}: {e}", path.display())))?;
    Ok(ConstructionSpec::from_toml(&text)?)
}

/// A code file with its sidecar. When every set is a zero-sum parity the file
/// holds the parity-check code and the LRC is its dual.
struct Loaded {
    code: LinearCode,
    structure: RecoveryStructure,
    dual_view: bool,
}

impl Loaded {
    fn read(path: &Path) -> Result<Loaded, Failure> {
        let bytes = fs::read(path)
            .map_err(|e| Failure::Build(format!("FormatError: {}: {e}", path.display())))?;
        let code = LinearCode::from_bytes(&bytes)?;
        let side = sidecar_path(path);
        let structure = RecoveryStructure::from_bytes(&fs::read(&side).map_err(|e| {
            Failure::Build(format!("FormatError: sidecar {}: {e}", side.display()))
        })?)?;
        if structure.n() != code.n() {
            return Err(Error::FormatError(format!(
                "sidecar covers {} positions, code has {}",
                structure.n(),
                code.n()
            ))
            .into());
        }
        let mut sets = structure.sets.iter().flatten().peekable();
        let dual_view = sets.peek().is_some() && sets.all(|s| s.basis == InterpBasis::ZeroSum);
        Ok(Loaded {
            code,
            structure,
            dual_view,
        })
    }

    fn k(&self) -> usize {
        if self.dual_view {
            self.code.n() - self.code.k()
        } else {
            self.code.k()
        }
    }

    fn codeword(&self, rng: &mut ChaCha8Rng) -> Vec<Elem> {
        if self.dual_view {
            self.code.random_dual_codeword(rng)
        } else {
            self.code.random_codeword(rng)
        }
    }
}

fn cmd_build(config: &Path, out: &Path) -> CmdResult {
    let spec = read_spec(config)?;
    let built = construct::build(&spec)?;
    fs::write(out, built.code.to_bytes())?;
    fs::write(sidecar_path(out), built.structure.to_bytes())?;
    info!("wrote {} and its sidecar", out.display());
    println!("{}", record_of(&kind_name(&spec), &built));
    Ok(())
}

fn kind_name(spec: &ConstructionSpec) -> String {
    toml::Value::try_from(spec.construction)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_else(|| format!("{:?}", spec.construction))
}

fn cmd_params(config: &Path) -> CmdResult {
    let spec = read_spec(config)?;
    let rec = if spec.construction == Construction::ParamsOnly {
        let which: Theorem = spec.which.as_deref().unwrap_or_default().parse()?;
        analysis::theorem_params(
            which,
            spec.q.unwrap(),
            spec.alpha.unwrap_or(0) as u64,
            spec.ell_g,
        )?
    } else {
        let built = construct::build(&spec)?;
        let mut rec = record_of(&kind_name(&spec), &built);
        if !certify_into(&built, &mut rec) {
            println!("{rec}");
            return Err(Failure::Check(
                "recovery structure failed certification".into(),
            ));
        }
        rec
    };
    println!("{rec}");
    Ok(())
}

fn cmd_certify(input: &Path) -> CmdResult {
    let l = Loaded::read(input)?;
    let report = if l.dual_view {
        locality::certify_structure_dual(&l.code, &l.structure)
    } else {
        locality::certify_structure(&l.code, &l.structure)
    };
    let loc: Vec<String> = l
        .structure
        .localities()
        .iter()
        .map(|r| r.to_string())
        .collect();
    println!(
        "n {} k {}{}: {} sets checked, availability {}, localities {{{}}}",
        l.code.n(),
        l.k(),
        if l.dual_view { " (dual view)" } else { "" },
        report.sets_checked,
        report.min_availability(),
        loc.join(",")
    );
    if !report.structural_faults.is_empty() {
        println!(
            "disjointness failure at {} positions, first {:?}",
            report.structural_faults.len(),
            &report.structural_faults[..report.structural_faults.len().min(10)]
        );
    }
    for (j, i) in report.failures.iter().take(10) {
        println!("position {j}: set {i} does not determine the symbol");
    }
    if report.all_certified() {
        println!("all certified");
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "{} failed sets, {} structural faults",
            report.failures.len(),
            report.structural_faults.len()
        )))
    }
}

fn cmd_repair(input: &Path, trials: usize, pattern: Pattern, seed: u64) -> CmdResult {
    let l = Loaded::read(input)?;
    let f = &l.code.field;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut ok, mut failed, mut uncovered) = (0usize, 0usize, 0usize);
    let mut reads: BTreeMap<usize, usize> = BTreeMap::new();
    for _ in 0..trials {
        let c = l.codeword(&mut rng);
        let j = rng.gen_range(0..l.code.n());
        let sets = &l.structure.sets[j];
        let mut w: Vec<Option<Elem>> = c.iter().map(|&x| Some(x)).collect();
        w[j] = None;
        let covered = match pattern {
            Pattern::Single => !sets.is_empty(),
            Pattern::Fiber => {
                if let Some(small) = sets.iter().min_by_key(|s| s.positions.len()) {
                    for &p in &small.positions {
                        w[p] = None;
                    }
                }
                locality::availability(&l.structure)[j] >= 2
            }
            Pattern::All => {
                for s in sets {
                    if let Some(&p) = s.positions.first() {
                        w[p] = None;
                    }
                }
                false
            }
        };
        match locality::repair(f, &l.structure, &w, j) {
            Ok(v) if v == c[j] => {
                ok += 1;
                let used = sets
                    .iter()
                    .filter(|s| s.positions.iter().all(|&p| w[p].is_some()))
                    .map(|s| s.positions.len())
                    .min()
                    .unwrap_or(0);
                *reads.entry(used).or_default() += 1;
            }
            Ok(_) if covered => failed += 1,
            Err(_) if covered => failed += 1,
            _ => uncovered += 1,
        }
    }
    println!(
        "{trials} trials: {ok} repaired ({:.2}%), {failed} failed, {uncovered} unrecoverable outside the structure",
        100.0 * ok as f64 / trials.max(1) as f64
    );
    for (r, count) in &reads {
        println!("  read {r} symbols: {count}");
    }
    if failed > 0 {
        Err(Failure::Check(format!(
            "{failed} covered erasures not repaired"
        )))
    } else {
        Ok(())
    }
}

fn cmd_distance(
    input: Option<&Path>,
    config: Option<&Path>,
    method: Option<MethodArg>,
    budget: u128,
    trials: usize,
    seed: u64,
) -> CmdResult {
    let (code, designed) = match (input, config) {
        (Some(p), _) => {
            let l = Loaded::read(p)?;
            let code = if l.dual_view { l.code.dual() } else { l.code };
            (code, None)
        }
        (None, Some(c)) => {
            let b = construct::build(&read_spec(c)?)?;
            let code = if b.dual_view { b.code.dual() } else { b.code };
            (code, b.designed)
        }
        (None, None) => unreachable!("clap requires --in or --config"),
    };
    let report = match method {
        Some(MethodArg::Exhaustive) => analysis::min_distance_exhaustive(&code, budget, designed)?,
        Some(MethodArg::Random) => analysis::min_weight_search(&code, trials, seed, designed),
        None => analysis::distance(&code, designed, budget, trials, seed),
    };
    let show = |v: Option<String>| v.unwrap_or_else(|| "-".into());
    println!(
        "[{}, {}] method {} exact {} designed {} upper {}",
        code.n(),
        code.k(),
        report.method,
        show(report.exact.map(|d| d.to_string())),
        show(report.lower_bound.map(|d| d.to_string())),
        show(report.upper_bound.map(|d| d.to_string())),
    );
    if let Some(v) = report.violation() {
        return Err(Failure::Check(format!("VIOLATION: {v}")));
    }
    Ok(())
}

fn cmd_table(
    family: &str,
    out: Option<&Path>,
    with_compare: bool,
    opts: &TableOptions,
) -> CmdResult {
    let family: TableFamily = family.parse()?;
    let rows = analysis::table_report(family, opts)?;
    let rows = if with_compare {
        let cmp = compare(family, &rows);
        let count = |s: MatchStatus| cmp.iter().filter(|(_, st, _)| *st == s).count();
        eprintln!(
            "{} reference rows: {} match, {} mismatch, {} missing",
            cmp.len(),
            count(MatchStatus::Match),
            count(MatchStatus::Mismatch),
            count(MatchStatus::Missing)
        );
        cmp.into_iter().map(|(_, _, rec)| rec).collect()
    } else {
        rows
    };
    match out {
        Some(p) => analysis::write_csv(fs::File::create(p)?, &rows)?,
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            analysis::write_csv(&mut lock, &rows)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.cmd {
        Cmd::Build { config, out } => cmd_build(&config, &out),
        Cmd::Params { config } => cmd_params(&config),
        Cmd::Certify { input } => cmd_certify(&input),
        Cmd::Repair {
            input,
            trials,
            pattern,
            seed,
        } => cmd_repair(&input, trials, pattern, seed),
        Cmd::Distance {
            input,
            config,
            method,
            budget,
            trials,
            seed,
        } => cmd_distance(
            input.as_deref(),
            config.as_deref(),
            method,
            budget,
            trials,
            seed,
        ),
        Cmd::Table {
            family,
            out,
            compare,
            budget,
            trials,
            seed,
        } => {
            let opts = TableOptions {
                budget,
                trials,
                seed,
                ..TableOptions::default()
            };
            cmd_table(&family, out.as_deref(), compare, &opts)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Build(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("failure: {msg}");
            ExitCode::from(3)
        }
    }
}
