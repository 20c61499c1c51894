//! Named recovery strategies behind one dispatch surface.
//!
//! Every measurement scheme in this crate — adjacent12, two-reference,
//! sign, graph, and the windowed (stft) scheme — implements the
//! [`RecoveryStrategy`] trait: measure a signal into a serializable file,
//! and recover a class representative back out of one. A
//! [`StrategyRegistry`] holds the strategies by name so callers select them
//! at runtime from configuration; [`SchemeSpec`] carries the per-scheme
//! parameters (reference indices, measurement graph, window).
//!
//! Structured strategies lift their result back into the signal's domain:
//! data annotated with a band-limited grid comes back as a `pw` signal,
//! data annotated with a shift-invariant sampling as a refitted `si`
//! signal, and bare data as a plain vector.
//!
//! ## Example
//!
//! ```
//! use conjphase::scheme::{SchemeSpec, StrategyRegistry};
//! use conjphase::formats::Signal;
//! use conjphase::vector::{dist_conj, ComplexVector};
//! use num_complex::Complex64;
//!
//! let registry = StrategyRegistry::with_builtins();
//! let spec = SchemeSpec::Adjacent12;
//! let strategy = registry.get(spec.strategy_name()).unwrap();
//!
//! let f = ComplexVector::new(0, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]);
//! let data = strategy.measure(&Signal::Vector(f.clone()), &spec).unwrap();
//! let (recovered, _report) = strategy.recover(&data, &spec, conjphase::DEFAULT_TOL).unwrap();
//! let (d, _) = dist_conj(recovered.coeff_vector(), &f);
//! assert!(d < 1e-12);
//! ```

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::formats::{GridMeta, MeasurementFile, SiMeta, Signal, StructuredFile};
use crate::graph::{propagate_recover, SimpleGraph};
use crate::measure::measure;
use crate::recover::{
    recover_adjacent, recover_signs, recover_two_reference, RecoveryReport, StructuredSamples,
};
use crate::spaces::{fit_si_coefficients, si_sample_half_integer, PwSignal};
use crate::stft::{stft_measure, stft_recover, Window};
use crate::vector::ComplexVector;

/// Runtime parameters selecting and configuring a recovery scheme.
#[derive(Debug, Clone, PartialEq)]
pub enum SchemeSpec {
    /// Differences to offsets +1 and +2.
    Adjacent12,
    /// Differences to two fixed reference indices.
    TwoReference {
        /// The reference indices `[k, l]`.
        refs: [i64; 2],
    },
    /// Next-neighbor differences of a real nonvanishing vector.
    Sign,
    /// Magnitudes on the vertices and edges of a measurement graph. The
    /// graph is required to measure; recovery reads it off the data.
    Graph {
        /// Measurement graph (None when only recovering).
        graph: Option<SimpleGraph>,
    },
    /// Windowed correlation magnitudes of a band-limited signal.
    Stft {
        /// The correlation window.
        window: Window,
    },
}

impl SchemeSpec {
    /// Registry name of the strategy that understands this spec.
    pub fn strategy_name(&self) -> &'static str {
        match self {
            SchemeSpec::Adjacent12 => "adjacent12",
            SchemeSpec::TwoReference { .. } => "two-reference",
            SchemeSpec::Sign => "sign",
            SchemeSpec::Graph { .. } => "graph",
            SchemeSpec::Stft { .. } => "stft",
        }
    }
}

/// A named, self-contained measurement-and-recovery scheme.
pub trait RecoveryStrategy: Send + Sync {
    /// Registry name.
    fn name(&self) -> &'static str;

    /// One-line description for listings.
    fn description(&self) -> &'static str;

    /// Measures a signal into a serializable measurement file.
    fn measure(&self, signal: &Signal, spec: &SchemeSpec) -> Result<MeasurementFile>;

    /// Recovers a class representative from a measurement file.
    fn recover(
        &self,
        data: &MeasurementFile,
        spec: &SchemeSpec,
        tol: f64,
    ) -> Result<(Signal, RecoveryReport)>;
}

/// Strategies held by name for runtime selection.
pub struct StrategyRegistry {
    strategies: HashMap<String, Box<dyn RecoveryStrategy>>,
}

impl StrategyRegistry {
    /// An empty registry.
    pub fn new() -> Self {
        StrategyRegistry { strategies: HashMap::new() }
    }

    /// A registry holding every built-in strategy.
    pub fn with_builtins() -> Self {
        let mut r = StrategyRegistry::new();
        r.register(Box::new(Adjacent12Strategy));
        r.register(Box::new(TwoReferenceStrategy));
        r.register(Box::new(SignStrategy));
        r.register(Box::new(GraphStrategy));
        r.register(Box::new(StftStrategy));
        r
    }

    /// Adds (or replaces) a strategy under its own name.
    pub fn register(&mut self, strategy: Box<dyn RecoveryStrategy>) {
        self.strategies.insert(strategy.name().to_string(), strategy);
    }

    /// Looks a strategy up by name.
    pub fn get(&self, name: &str) -> Option<&dyn RecoveryStrategy> {
        self.strategies.get(name).map(|b| b.as_ref())
    }

    /// Registered names, sorted.
    pub fn names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.strategies.keys().map(|s| s.as_str()).collect();
        names.sort_unstable();
        names
    }
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

/// The sample vector a structured scheme reads off a signal, plus the
/// annotations recovery needs to lift the samples back into the domain.
fn sampled_form(signal: &Signal) -> (ComplexVector, Option<GridMeta>, Option<SiMeta>) {
    match signal {
        Signal::Vector(v) => (v.clone(), None, None),
        Signal::Pw(s) => (
            s.coeffs().clone(),
            Some(GridMeta { bandwidth: s.bandwidth(), x0: s.x0() }),
            None,
        ),
        Signal::Si(s) => {
            let meta = SiMeta {
                generator: s.generator(),
                coeff_offset: s.coeffs().index_offset(),
                coeff_len: s.coeffs().len(),
            };
            (si_sample_half_integer(s), None, Some(meta))
        }
    }
}

fn annotated(samples: StructuredSamples, grid: Option<GridMeta>, si: Option<SiMeta>) -> StructuredFile {
    let mut file = StructuredFile::new(samples);
    file.grid = grid;
    file.si = si;
    file
}

/// Lifts recovered samples back into the domain the annotations describe.
fn lift(
    samples: ComplexVector,
    file: &StructuredFile,
    report: &mut RecoveryReport,
    tol: f64,
) -> Result<Signal> {
    if let Some(grid) = file.grid {
        return Ok(Signal::Pw(PwSignal::new(grid.bandwidth, grid.x0, samples)?));
    }
    if let Some(si) = file.si {
        let (signal, fit_residual, sigma_min) =
            fit_si_coefficients(&samples, si.generator, si.coeff_offset, si.coeff_len, tol)?;
        report.deconvolution_residual = Some(fit_residual);
        report.smallest_singular_value = Some(sigma_min);
        return Ok(Signal::Si(signal));
    }
    Ok(Signal::Vector(samples))
}

fn structured_data<'a>(
    data: &'a MeasurementFile,
    expected: &str,
) -> Result<&'a StructuredFile> {
    match data {
        MeasurementFile::Structured(file) => Ok(file),
        MeasurementFile::Graph(_) => Err(Error::invalid(format!(
            "the {expected} strategy reads structured measurement files, not graph measurements"
        ))),
    }
}

/// Adjacent-differences scheme (offsets +1 and +2).
struct Adjacent12Strategy;

impl RecoveryStrategy for Adjacent12Strategy {
    fn name(&self) -> &'static str {
        "adjacent12"
    }

    fn description(&self) -> &'static str {
        "sample moduli plus differences to the next and next-but-one sample"
    }

    fn measure(&self, signal: &Signal, spec: &SchemeSpec) -> Result<MeasurementFile> {
        let SchemeSpec::Adjacent12 = spec else {
            return Err(Error::invalid("adjacent12 takes no extra parameters"));
        };
        let (samples, grid, si) = sampled_form(signal);
        Ok(MeasurementFile::Structured(annotated(
            StructuredSamples::measure_adjacent12(&samples),
            grid,
            si,
        )))
    }

    fn recover(
        &self,
        data: &MeasurementFile,
        _spec: &SchemeSpec,
        tol: f64,
    ) -> Result<(Signal, RecoveryReport)> {
        let file = structured_data(data, self.name())?;
        let (samples, mut report) = recover_adjacent(&file.samples(), tol)?;
        let signal = lift(samples, file, &mut report, tol)?;
        Ok((signal, report))
    }
}

/// Two fixed reference samples scheme.
struct TwoReferenceStrategy;

impl RecoveryStrategy for TwoReferenceStrategy {
    fn name(&self) -> &'static str {
        "two-reference"
    }

    fn description(&self) -> &'static str {
        "sample moduli plus differences to two fixed reference samples"
    }

    fn measure(&self, signal: &Signal, spec: &SchemeSpec) -> Result<MeasurementFile> {
        let SchemeSpec::TwoReference { refs: [k, l] } = spec else {
            return Err(Error::invalid("two-reference needs its reference indices"));
        };
        let (samples, grid, si) = sampled_form(signal);
        Ok(MeasurementFile::Structured(annotated(
            StructuredSamples::measure_two_reference(&samples, *k, *l)?,
            grid,
            si,
        )))
    }

    fn recover(
        &self,
        data: &MeasurementFile,
        _spec: &SchemeSpec,
        tol: f64,
    ) -> Result<(Signal, RecoveryReport)> {
        let file = structured_data(data, self.name())?;
        let (samples, mut report) = recover_two_reference(&file.samples(), tol)?;
        let signal = lift(samples, file, &mut report, tol)?;
        Ok((signal, report))
    }
}

/// Real sign-propagation scheme.
struct SignStrategy;

impl RecoveryStrategy for SignStrategy {
    fn name(&self) -> &'static str {
        "sign"
    }

    fn description(&self) -> &'static str {
        "sample moduli plus next-neighbor differences of a real nonvanishing vector"
    }

    fn measure(&self, signal: &Signal, spec: &SchemeSpec) -> Result<MeasurementFile> {
        let SchemeSpec::Sign = spec else {
            return Err(Error::invalid("sign takes no extra parameters"));
        };
        let (samples, grid, si) = sampled_form(signal);
        Ok(MeasurementFile::Structured(annotated(
            StructuredSamples::measure_signs(&samples),
            grid,
            si,
        )))
    }

    fn recover(
        &self,
        data: &MeasurementFile,
        _spec: &SchemeSpec,
        tol: f64,
    ) -> Result<(Signal, RecoveryReport)> {
        let file = structured_data(data, self.name())?;
        let (samples, mut report) = recover_signs(&file.samples(), tol)?;
        let signal = lift(samples, file, &mut report, tol)?;
        Ok((signal, report))
    }
}

/// Graph measurement scheme with triangle-graph propagation.
struct GraphStrategy;

impl RecoveryStrategy for GraphStrategy {
    fn name(&self) -> &'static str {
        "graph"
    }

    fn description(&self) -> &'static str {
        "vertex and edge moduli on a measurement graph, with phase propagation over its 3-cliques"
    }

    fn measure(&self, signal: &Signal, spec: &SchemeSpec) -> Result<MeasurementFile> {
        let SchemeSpec::Graph { graph: Some(graph) } = spec else {
            return Err(Error::invalid("graph measurements need the measurement graph"));
        };
        Ok(MeasurementFile::Graph(measure(signal.coeff_vector(), graph)))
    }

    fn recover(
        &self,
        data: &MeasurementFile,
        _spec: &SchemeSpec,
        tol: f64,
    ) -> Result<(Signal, RecoveryReport)> {
        let MeasurementFile::Graph(m) = data else {
            return Err(Error::invalid(
                "the graph strategy reads graph measurement files, not structured data",
            ));
        };
        let (samples, report) = propagate_recover(&m.induced_graph(), m, tol)?;
        Ok((Signal::Vector(samples), report))
    }
}

/// Windowed correlation scheme for band-limited signals.
struct StftStrategy;

impl RecoveryStrategy for StftStrategy {
    fn name(&self) -> &'static str {
        "stft"
    }

    fn description(&self) -> &'static str {
        "windowed correlation moduli of a band-limited signal, inverted by recursion plus deconvolution"
    }

    fn measure(&self, signal: &Signal, spec: &SchemeSpec) -> Result<MeasurementFile> {
        let SchemeSpec::Stft { window } = spec else {
            return Err(Error::invalid("stft measurements need the window"));
        };
        let Signal::Pw(f) = signal else {
            return Err(Error::invalid("stft measurements need a band-limited signal"));
        };
        let data = stft_measure(f, window)?;
        Ok(MeasurementFile::Structured(annotated(
            data,
            Some(GridMeta { bandwidth: f.bandwidth(), x0: f.x0() }),
            None,
        )))
    }

    fn recover(
        &self,
        data: &MeasurementFile,
        spec: &SchemeSpec,
        tol: f64,
    ) -> Result<(Signal, RecoveryReport)> {
        let SchemeSpec::Stft { window } = spec else {
            return Err(Error::invalid("stft recovery needs the window"));
        };
        let file = structured_data(data, self.name())?;
        let x0 = match file.grid {
            Some(grid) => {
                if grid.bandwidth != window.bandwidth() {
                    return Err(Error::BandwidthMismatch {
                        signal: grid.bandwidth,
                        window: window.bandwidth(),
                    });
                }
                grid.x0
            }
            None => 0.0,
        };
        let (signal, report) = stft_recover(&file.samples(), window, x0, tol)?;
        Ok((Signal::Pw(signal), report))
    }
}
