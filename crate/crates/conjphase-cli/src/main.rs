//! Command-line front end for phaseless signal recovery.
//!
//! Signals, measurement graphs, and phaseless data travel as JSON files;
//! sampled values export as CSV. Subcommands compose into pipelines:
//!
//! ```text
//! conjphase gen --kind vector --len 8 --ensure-noncollinear --out f.json
//! conjphase measure f.json --scheme adjacent12 --out data.json
//! conjphase recover data.json --out fhat.json
//! conjphase compare f.json fhat.json
//! ```
//!
//! Schemes are written `adjacent12`, `sign`, `two-ref:K,L`, `graph:FILE`
//! (a measurement-graph JSON file), or `stft:FILE` (a window JSON file).
//!
//! Exit codes separate failure classes: `0` success, `1` comparison or
//! sweep outside tolerance, `2` malformed input, `3` violated
//! recoverability hypothesis (collinearity, uncovered vertices,
//! disconnected triangle graph), `4` magnitudes no signal can produce,
//! `5` numerical breakdown. All randomness is seeded: equal flags give
//! byte-identical outputs.

mod demos;
mod io;
mod sample;
mod sweep;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use conjphase::error::{Error, Result};
use conjphase::formats::{
    measurement_from_json, measurement_to_json, signal_from_json, signal_to_json, MeasurementFile,
    Signal,
};
use conjphase::graph::{circulant_graph, two_reference_graph, SimpleGraph};
use conjphase::recover::SchemeKind;
use conjphase::scheme::{SchemeSpec, StrategyRegistry};
use conjphase::spaces::{si_sample_half_integer, Generator, PwSignal, SiSignal};
use conjphase::stft::Window;
use conjphase::vector::{dist_conj, ComplexVector, EquivalenceBranch};
use conjphase::DEFAULT_TOL;
use num_complex::Complex64;
use serde::Serialize;

use crate::sample::{
    min_adjacent_margin, noncollinear_vector, random_real_vector, random_vector, rng_for,
    MARGIN_FLOOR,
};

#[derive(Parser)]
#[command(
    name = "conjphase",
    version,
    about = "Recover complex signals from absolute and relative magnitudes"
)]
struct Cli {
    /// Recovery tolerance; must be positive.
    #[arg(long, global = true, env = "CONJPHASE_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,

    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Directory output files land in.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    /// Row encoding for export (default csv there); other commands are JSON.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

/// Row encoding for exported samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// One JSON array of row objects.
    Json,
    /// Comma-separated rows with a header line.
    Csv,
}

/// Signal family for `gen`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    /// Plain indexed coefficient vector.
    Vector,
    /// Band-limited signal sampled on its critical grid.
    Pw,
    /// Shift-invariant-space signal with a compactly supported generator.
    Si,
}

/// Graph family for `gen-graph`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Cycle with chords at the given offsets.
    Circulant,
    /// Every vertex tied to two fixed references.
    TwoReference,
}

/// Conversion target for `convert`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    /// Signal as a plain sample/coefficient vector.
    Vector,
    /// Measurement data as its induced simple graph.
    Graph,
}

#[derive(Subcommand)]
enum Command {
    /// Draw or assemble a signal and write it as JSON.
    Gen {
        /// Signal family.
        #[arg(long, value_enum, default_value_t = Kind::Vector)]
        kind: Kind,
        /// Number of random coefficients.
        #[arg(long)]
        len: Option<usize>,
        /// Logical index of the first coefficient.
        #[arg(long, default_value_t = 0)]
        index_offset: i64,
        /// Bandwidth of a pw signal.
        #[arg(long, default_value_t = 0.5)]
        bandwidth: f64,
        /// Leftmost grid point of a pw signal.
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        /// Generator of an si signal: hat | bspline:ORDER.
        #[arg(long, default_value = "hat")]
        generator: String,
        /// Explicit coefficients as space-separated RE,IM pairs (overrides --len).
        #[arg(long, num_args = 1.., value_name = "RE,IM")]
        coeffs: Vec<String>,
        /// Draw real coefficients bounded away from zero.
        #[arg(long)]
        real: bool,
        /// Resample until every adjacent pair clears the non-collinearity margin.
        #[arg(long)]
        ensure_noncollinear: bool,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
    },

    /// Build a measurement graph and write it as JSON.
    GenGraph {
        /// Graph family.
        #[arg(long, value_enum)]
        family: Family,
        /// Vertex count.
        #[arg(long)]
        n: u32,
        /// Circulant chord offsets, comma separated.
        #[arg(long, default_value = "1,2")]
        offsets: String,
        /// Reference pair K,L of a two-reference graph (default middle pair).
        #[arg(long)]
        refs: Option<String>,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
    },

    /// Produce phaseless data for a signal under a scheme.
    Measure {
        /// Signal file.
        signal: PathBuf,
        /// Measurement scheme.
        #[arg(long)]
        scheme: String,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
    },

    /// Reconstruct a signal class representative from phaseless data.
    Recover {
        /// Measurement data file.
        data: PathBuf,
        /// Scheme override; inferred from the data when omitted.
        #[arg(long)]
        scheme: Option<String>,
        /// Output signal file.
        #[arg(long)]
        out: PathBuf,
        /// Optional diagnostics file.
        #[arg(long)]
        report: Option<PathBuf>,
    },

    /// Class distance between two signals of the same kind and grid.
    Compare {
        /// First signal file.
        a: PathBuf,
        /// Second signal file.
        b: PathBuf,
    },

    /// Re-express a signal or measurement in another form.
    Convert {
        /// Input file (signal, or measurement data for --to graph).
        input: PathBuf,
        /// Conversion target.
        #[arg(long, value_enum)]
        to: Target,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
    },

    /// Sampled values of a signal as rows of x, re, im, |value|^2.
    Export {
        /// Signal file.
        signal: PathBuf,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
        /// First sample location (pw/si signals).
        #[arg(long)]
        from: Option<f64>,
        /// Last sample location (pw/si signals).
        #[arg(long)]
        to: Option<f64>,
        /// Sample spacing (pw/si signals).
        #[arg(long)]
        step: Option<f64>,
    },

    /// Run a built-in demonstration end to end.
    Demo {
        /// counterexample | circulant | two-ref
        name: String,
    },

    /// Seeded random measure -> recover -> compare trials across schemes.
    Sweep {
        /// Number of independent trials.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Comma-separated case names (default: all cases).
        #[arg(long)]
        cases: Option<String>,
        /// Smallest random signal length.
        #[arg(long, default_value_t = 4)]
        min_len: usize,
        /// Largest random signal length.
        #[arg(long, default_value_t = 64)]
        max_len: usize,
    },
}

/// Options every subcommand shares, resolved and validated once.
struct RunConfig {
    seed: u64,
    tolerance: f64,
    output_dir: PathBuf,
    format: Option<Format>,
}

impl RunConfig {
    fn resolve(cli: &Cli) -> Result<Self> {
        if !(cli.tol.is_finite() && cli.tol > 0.0) {
            return Err(Error::invalid(format!("tolerance {} must be positive", cli.tol)));
        }
        Ok(RunConfig {
            seed: cli.seed,
            tolerance: cli.tol,
            output_dir: cli.out_dir.clone(),
            format: cli.format,
        })
    }

    /// Resolves an output path against the output directory.
    fn out_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.output_dir.join(p)
        }
    }

    /// Errors when `--format csv` reaches a JSON-only command.
    fn require_json(&self) -> Result<()> {
        if self.format == Some(Format::Csv) {
            return Err(Error::invalid("--format csv applies only to export"));
        }
        Ok(())
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    };
    std::process::exit(code);
}

/// Maps every error class onto its process exit code.
fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Invalid(_) | Error::BandwidthMismatch { .. } => 2,
        Error::HypothesisFailed(_)
        | Error::NoNoncollinearEdge
        | Error::ReferenceCollinear { .. }
        | Error::AdjacentCollinear { .. }
        | Error::ZeroSample(_) => 3,
        Error::InfeasibleMagnitudes(_) => 4,
        Error::NumericallySingular { .. } | Error::IllConditioned { .. } => 5,
    }
}

fn run(cli: Cli) -> Result<i32> {
    let cfg = RunConfig::resolve(&cli)?;
    match cli.command {
        Command::Gen {
            kind,
            len,
            index_offset,
            bandwidth,
            x0,
            generator,
            coeffs,
            real,
            ensure_noncollinear,
            out,
        } => {
            cfg.require_json()?;
            let values = gen_coeffs(&cfg, len, index_offset, &coeffs, real, ensure_noncollinear)?;
            let signal = match kind {
                Kind::Vector => Signal::Vector(values),
                Kind::Pw => Signal::Pw(PwSignal::new(bandwidth, x0, values)?),
                Kind::Si => Signal::Si(SiSignal::new(parse_generator(&generator)?, values)),
            };
            let path = cfg.out_path(&out);
            io::write_text(&path, &io::json_line(signal_to_json(&signal)))?;
            println!("wrote {}", path.display());
            Ok(0)
        }

        Command::GenGraph { family, n, offsets, refs, out } => {
            cfg.require_json()?;
            let g = match family {
                Family::Circulant => {
                    let offsets = parse_u32_list(&offsets)?;
                    circulant_graph(n, &offsets)
                }
                Family::TwoReference => {
                    let (k, l) = match refs {
                        Some(text) => parse_index_pair(&text)?,
                        None => (i64::from(n) / 2, i64::from(n) / 2 + 1),
                    };
                    two_reference_graph(n, k, l)?
                }
            };
            let path = cfg.out_path(&out);
            let json = serde_json::to_string(&g).map_err(|e| Error::invalid(e.to_string()))?;
            io::write_text(&path, &io::json_line(json))?;
            println!("wrote {}", path.display());
            Ok(0)
        }

        Command::Measure { signal, scheme, out } => {
            cfg.require_json()?;
            let truth = signal_from_json(&io::read_text(&signal)?)?;
            let spec = parse_scheme(&scheme)?;
            let truth = trim_for(&spec, truth);
            let registry = StrategyRegistry::with_builtins();
            let strategy = registry.get(spec.strategy_name()).expect("builtin strategy");
            let data = strategy.measure(&truth, &spec)?;
            let path = cfg.out_path(&out);
            io::write_text(&path, &io::json_line(measurement_to_json(&data)))?;
            println!("wrote {}", path.display());
            Ok(0)
        }

        Command::Recover { data, scheme, out, report } => {
            cfg.require_json()?;
            let measured = measurement_from_json(&io::read_text(&data)?)?;
            let spec = match scheme {
                Some(text) => parse_scheme(&text)?,
                None => infer_spec(&measured),
            };
            let registry = StrategyRegistry::with_builtins();
            let strategy = registry.get(spec.strategy_name()).expect("builtin strategy");
            let (signal, diagnostics) = strategy.recover(&measured, &spec, cfg.tolerance)?;
            let path = cfg.out_path(&out);
            io::write_text(&path, &io::json_line(signal_to_json(&signal)))?;
            println!("wrote {}", path.display());
            if let Some(report) = report {
                let path = cfg.out_path(&report);
                let json =
                    serde_json::to_string(&diagnostics).map_err(|e| Error::invalid(e.to_string()))?;
                io::write_text(&path, &io::json_line(json))?;
                println!("wrote {}", path.display());
            }
            Ok(0)
        }

        Command::Compare { a, b } => {
            cfg.require_json()?;
            let a = signal_from_json(&io::read_text(&a)?)?;
            let b = signal_from_json(&io::read_text(&b)?)?;
            let outcome = compare_signals(&a, &b, cfg.tolerance)?;
            let json =
                serde_json::to_string(&outcome).map_err(|e| Error::invalid(e.to_string()))?;
            print!("{}", io::json_line(json));
            Ok(if outcome.equivalent { 0 } else { 1 })
        }

        Command::Convert { input, to, out } => {
            cfg.require_json()?;
            let text = io::read_text(&input)?;
            let json = match to {
                Target::Vector => {
                    let signal = signal_from_json(&text)?;
                    let vector = match signal {
                        Signal::Vector(v) => v,
                        Signal::Pw(f) => f.coeffs().clone(),
                        Signal::Si(s) => si_sample_half_integer(&s),
                    };
                    signal_to_json(&Signal::Vector(vector))
                }
                Target::Graph => match measurement_from_json(&text)? {
                    MeasurementFile::Graph(m) => serde_json::to_string(&m.induced_graph())
                        .map_err(|e| Error::invalid(e.to_string()))?,
                    MeasurementFile::Structured(_) => {
                        return Err(Error::invalid(
                            "structured samples induce no graph; pass graph measurement data",
                        ))
                    }
                },
            };
            let path = cfg.out_path(&out);
            io::write_text(&path, &io::json_line(json))?;
            println!("wrote {}", path.display());
            Ok(0)
        }

        Command::Export { signal, out, from, to, step } => {
            let truth = signal_from_json(&io::read_text(&signal)?)?;
            let rows = export_rows(&truth, from, to, step)?;
            let path = cfg.out_path(&out);
            match cfg.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut text = String::from("x,re,im,abs_sq\n");
                    for r in &rows {
                        text.push_str(&format!(
                            "{},{},{},{}\n",
                            io::csv_number(r.x),
                            io::csv_number(r.re),
                            io::csv_number(r.im),
                            io::csv_number(r.abs_sq)
                        ));
                    }
                    io::write_text(&path, &text)?;
                }
                Format::Json => {
                    let json =
                        serde_json::to_string(&rows).map_err(|e| Error::invalid(e.to_string()))?;
                    io::write_text(&path, &io::json_line(json))?;
                }
            }
            println!("wrote {} ({} rows)", path.display(), rows.len());
            Ok(0)
        }

        Command::Demo { name } => {
            cfg.require_json()?;
            let out_dir = cfg.output_dir.join(&name);
            match name.as_str() {
                "counterexample" => demos::run_counterexample(&out_dir, cfg.tolerance)?,
                "circulant" => demos::run_circulant(&out_dir, cfg.tolerance)?,
                "two-ref" => demos::run_two_ref(&out_dir, cfg.tolerance)?,
                other => {
                    return Err(Error::invalid(format!(
                        "unknown demo {other:?}; available: counterexample, circulant, two-ref"
                    )))
                }
            }
            Ok(0)
        }

        Command::Sweep { trials, cases, min_len, max_len } => {
            cfg.require_json()?;
            if trials == 0 {
                return Err(Error::invalid("--trials must be at least 1"));
            }
            if min_len == 0 || min_len > max_len {
                return Err(Error::invalid(format!(
                    "length range [{min_len}, {max_len}] must satisfy 1 <= min <= max"
                )));
            }
            let cases = parse_cases(cases.as_deref())?;
            let summary = sweep::run(&sweep::SweepConfig {
                trials,
                seed: cfg.seed,
                cases,
                min_len,
                max_len,
                tol: cfg.tolerance,
            })?;
            let json =
                serde_json::to_string(&summary).map_err(|e| Error::invalid(e.to_string()))?;
            print!("{}", io::json_line(json));
            Ok(if summary.failures() == 0 { 0 } else { 1 })
        }
    }
}

/// Builds the coefficient vector for `gen` from flags.
fn gen_coeffs(
    cfg: &RunConfig,
    len: Option<usize>,
    index_offset: i64,
    coeffs: &[String],
    real: bool,
    ensure_noncollinear: bool,
) -> Result<ComplexVector> {
    if !coeffs.is_empty() {
        let v = parse_coeff_pairs(coeffs, index_offset)?;
        if real && v.iter().any(|(_, z)| z.im != 0.0) {
            return Err(Error::invalid("--real conflicts with complex --coeffs entries"));
        }
        if ensure_noncollinear && min_adjacent_margin(&v) <= MARGIN_FLOOR {
            return Err(Error::invalid(format!(
                "supplied coefficients have an adjacent pair below the {MARGIN_FLOOR:e} \
                 non-collinearity margin"
            )));
        }
        return Ok(v);
    }
    let len = len.ok_or_else(|| Error::invalid("pass --len or --coeffs"))?;
    if len == 0 {
        return Err(Error::invalid("--len must be at least 1"));
    }
    if real && ensure_noncollinear {
        return Err(Error::invalid(
            "real draws are collinear by construction; drop --ensure-noncollinear",
        ));
    }
    let mut rng = rng_for(cfg.seed);
    if real {
        Ok(random_real_vector(&mut rng, index_offset, len))
    } else if ensure_noncollinear {
        noncollinear_vector(&mut rng, index_offset, len)
    } else {
        Ok(random_vector(&mut rng, index_offset, len))
    }
}

/// Parses space-separated `RE,IM` pairs (a lone `RE` means imaginary part 0).
fn parse_coeff_pairs(items: &[String], index_offset: i64) -> Result<ComplexVector> {
    let mut values = Vec::with_capacity(items.len());
    for item in items {
        let z = match item.split_once(',') {
            Some((re, im)) => Complex64::new(parse_f64(re)?, parse_f64(im)?),
            None => Complex64::new(parse_f64(item)?, 0.0),
        };
        values.push(z);
    }
    Ok(ComplexVector::new(index_offset, values))
}

fn parse_f64(text: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| Error::invalid(format!("expected a number, got {text:?}")))
}

fn parse_i64(text: &str) -> Result<i64> {
    text.trim()
        .parse::<i64>()
        .map_err(|_| Error::invalid(format!("expected an integer, got {text:?}")))
}

/// Parses `K,L` into a reference pair.
fn parse_index_pair(text: &str) -> Result<(i64, i64)> {
    let (k, l) = text
        .split_once(',')
        .ok_or_else(|| Error::invalid(format!("expected K,L, got {text:?}")))?;
    Ok((parse_i64(k)?, parse_i64(l)?))
}

fn parse_u32_list(text: &str) -> Result<Vec<u32>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| Error::invalid(format!("expected an offset, got {s:?}")))
        })
        .collect()
}

/// Parses `hat` or `bspline:ORDER`.
fn parse_generator(text: &str) -> Result<Generator> {
    if text == "hat" {
        return Ok(Generator::Hat);
    }
    if let Some(order) = text.strip_prefix("bspline:") {
        let order = order
            .parse::<u32>()
            .map_err(|_| Error::invalid(format!("expected bspline:ORDER, got {text:?}")))?;
        return Ok(Generator::BSpline(order));
    }
    Err(Error::invalid(format!("unknown generator {text:?}; expected hat | bspline:ORDER")))
}

/// Parses a scheme flag: `adjacent12`, `sign`, `two-ref:K,L`, `graph:FILE`,
/// or `stft:FILE`.
fn parse_scheme(text: &str) -> Result<SchemeSpec> {
    match text {
        "adjacent12" => return Ok(SchemeSpec::Adjacent12),
        "sign" => return Ok(SchemeSpec::Sign),
        _ => {}
    }
    if let Some(rest) = text.strip_prefix("two-ref:").or_else(|| text.strip_prefix("two-reference:"))
    {
        let (k, l) = parse_index_pair(rest)?;
        return Ok(SchemeSpec::TwoReference { refs: [k, l] });
    }
    if let Some(file) = text.strip_prefix("graph:") {
        let json = io::read_text(Path::new(file))?;
        let g: SimpleGraph = serde_json::from_str(&json)
            .map_err(|e| Error::invalid(format!("graph file {file}: {e}")))?;
        return Ok(SchemeSpec::Graph { graph: Some(g) });
    }
    if let Some(file) = text.strip_prefix("stft:") {
        let json = io::read_text(Path::new(file))?;
        let window: Window = serde_json::from_str(&json)
            .map_err(|e| Error::invalid(format!("window file {file}: {e}")))?;
        return Ok(SchemeSpec::Stft { window });
    }
    Err(Error::invalid(format!(
        "unknown scheme {text:?}; expected adjacent12 | sign | two-ref:K,L | graph:FILE | stft:FILE"
    )))
}

/// Scheme implied by a measurement file when no override is given.
fn infer_spec(data: &MeasurementFile) -> SchemeSpec {
    match data {
        MeasurementFile::Graph(_) => SchemeSpec::Graph { graph: None },
        MeasurementFile::Structured(f) => match f.scheme {
            SchemeKind::Adjacent12 => SchemeSpec::Adjacent12,
            SchemeKind::TwoReference([k, l]) => SchemeSpec::TwoReference { refs: [k, l] },
            SchemeKind::Sign => SchemeSpec::Sign,
        },
    }
}

/// Drops leading and trailing zero entries before adjacent-pair measurement,
/// where a zero boundary sample would stall the recursion for no reason.
fn trim_for(spec: &SchemeSpec, signal: Signal) -> Signal {
    if matches!(spec, SchemeSpec::Adjacent12) {
        if let Signal::Vector(v) = &signal {
            return Signal::Vector(v.support_trimmed());
        }
    }
    signal
}

/// What `compare` prints.
#[derive(Serialize)]
struct CompareOutcome {
    dist_conj: f64,
    relative: f64,
    branch: EquivalenceBranch,
    equivalent: bool,
}

/// Class distance between signals of matching kind and grid.
fn compare_signals(a: &Signal, b: &Signal, tol: f64) -> Result<CompareOutcome> {
    match (a, b) {
        (Signal::Pw(x), Signal::Pw(y)) => {
            if x.bandwidth() != y.bandwidth() || x.x0() != y.x0() {
                return Err(Error::invalid(format!(
                    "grid mismatch: (B = {}, x0 = {}) vs (B = {}, x0 = {})",
                    x.bandwidth(),
                    x.x0(),
                    y.bandwidth(),
                    y.x0()
                )));
            }
        }
        (Signal::Si(x), Signal::Si(y)) => {
            if x.generator() != y.generator() {
                return Err(Error::invalid("generator mismatch between si signals"));
            }
        }
        (Signal::Vector(_), Signal::Vector(_)) => {}
        _ => {
            return Err(Error::invalid(format!(
                "kind mismatch: {} vs {}",
                a.kind_name(),
                b.kind_name()
            )))
        }
    }
    let (d, branch) = dist_conj(a.coeff_vector(), b.coeff_vector());
    let scale = a.coeff_vector().norm().max(b.coeff_vector().norm());
    let relative = d / scale.max(f64::MIN_POSITIVE);
    let equivalent = d <= tol * scale.max(1.0);
    Ok(CompareOutcome { dist_conj: d, relative, branch, equivalent })
}

/// One exported sample.
#[derive(Serialize)]
struct ExportRow {
    x: f64,
    re: f64,
    im: f64,
    abs_sq: f64,
}

fn row(x: f64, z: Complex64) -> ExportRow {
    ExportRow { x, re: z.re, im: z.im, abs_sq: z.norm_sqr() }
}

/// Samples a signal for export: vectors by index, pw/si on the given range.
fn export_rows(
    signal: &Signal,
    from: Option<f64>,
    to: Option<f64>,
    step: Option<f64>,
) -> Result<Vec<ExportRow>> {
    if let Signal::Vector(v) = signal {
        return Ok(v.iter().map(|(n, z)| row(n as f64, z)).collect());
    }
    let (from, to, step) = match (from, to, step) {
        (Some(f), Some(t), Some(s)) => (f, t, s),
        _ => {
            return Err(Error::invalid(
                "pw/si export needs --from, --to, and --step",
            ))
        }
    };
    if !(step.is_finite() && step > 0.0) || !from.is_finite() || !to.is_finite() || to < from {
        return Err(Error::invalid(format!(
            "bad sample range: from {from}, to {to}, step {step}"
        )));
    }
    let count = ((to - from) / step + 1e-9).floor() as i64;
    let eval = |x: f64| match signal {
        Signal::Pw(f) => f.eval(x),
        Signal::Si(s) => s.eval(x),
        Signal::Vector(_) => unreachable!("handled above"),
    };
    Ok((0..=count).map(|k| {
        let x = from + k as f64 * step;
        row(x, eval(x))
    }).collect())
}

/// Splits a `--cases` list and validates every name.
fn parse_cases(text: Option<&str>) -> Result<Vec<String>> {
    let names: Vec<String> = match text {
        None => sweep::CASES.iter().map(|s| s.to_string()).collect(),
        Some(list) => list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect(),
    };
    if names.is_empty() {
        return Err(Error::invalid("--cases lists no case"));
    }
    for name in &names {
        if !sweep::CASES.contains(&name.as_str()) {
            return Err(Error::invalid(format!(
                "unknown case {name:?}; available: {}",
                sweep::CASES.join(", ")
            )));
        }
    }
    Ok(names)
}
