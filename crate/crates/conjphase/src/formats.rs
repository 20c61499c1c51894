//! JSON wire formats for signals and measurement files.
//!
//! Signals travel as a `"kind"`-tagged object (`"pw"`, `"si"`, or
//! `"vector"`) with complex entries written as `[re, im]` pairs.
//! Measurement files come in two shapes, told apart by sniffing:
//!
//! - structured files carry a `"scheme"` tag plus the `abs`/`rel1`/`rel2`
//!   arrays, optionally annotated with the sampling grid (`"grid"` for
//!   band-limited signals, `"si"` for shift-invariant ones) so recovery can
//!   rebuild a continuous-domain signal;
//! - graph files are a plain measurement set, `{"vertices": {...},
//!   "edges": [...]}` — the measured pairs themselves define the graph.
//!
//! All writers emit deterministic output: struct fields keep declaration
//! order and maps are sorted.
//!
//! ## Example
//!
//! ```
//! use conjphase::formats::{signal_from_json, signal_to_json, Signal};
//!
//! let json = r#"{"kind":"vector","index_offset":0,"values":[[1.0,0.0],[0.0,1.0]]}"#;
//! let signal = signal_from_json(json).unwrap();
//! assert!(matches!(signal, Signal::Vector(_)));
//! assert_eq!(signal_to_json(&signal), json);
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::MeasurementSet;
use crate::recover::{SchemeKind, StructuredSamples};
use crate::spaces::{Generator, PwSignal, SiSignal};
use crate::vector::ComplexVector;

/// A signal in any of the supported domains.
#[derive(Debug, Clone, PartialEq)]
pub enum Signal {
    /// Band-limited signal with grid metadata.
    Pw(PwSignal),
    /// Shift-invariant expansion over a named generator.
    Si(SiSignal),
    /// Plain finite complex vector (graph signals, recovered samples).
    Vector(ComplexVector),
}

impl Signal {
    /// Wire-format tag of this signal's kind.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Signal::Pw(_) => "pw",
            Signal::Si(_) => "si",
            Signal::Vector(_) => "vector",
        }
    }

    /// The finite coefficient window that represents the signal — the
    /// payload that magnitude measurements and class comparisons act on.
    pub fn coeff_vector(&self) -> &ComplexVector {
        match self {
            Signal::Pw(s) => s.coeffs(),
            Signal::Si(s) => s.coeffs(),
            Signal::Vector(v) => v,
        }
    }
}

fn pairs_from_vector(v: &ComplexVector) -> Vec<(f64, f64)> {
    v.values().iter().map(|z| (z.re, z.im)).collect()
}

fn vector_from_pairs(index_offset: i64, pairs: Vec<(f64, f64)>) -> Result<ComplexVector> {
    for (p, &(re, im)) in pairs.iter().enumerate() {
        if !(re.is_finite() && im.is_finite()) {
            return Err(Error::invalid(format!("entry {p} = ({re}, {im}) is not finite")));
        }
    }
    Ok(ComplexVector::new(
        index_offset,
        pairs.into_iter().map(|(re, im)| Complex64::new(re, im)).collect(),
    ))
}

/// Serialized form of a [`Signal`], tagged by `"kind"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SignalFile {
    /// `{"kind":"pw","B":…,"x0":…,"index_offset":…,"coeffs":[[re,im],…]}`
    Pw {
        #[serde(rename = "B")]
        bandwidth: f64,
        x0: f64,
        index_offset: i64,
        coeffs: Vec<(f64, f64)>,
    },
    /// `{"kind":"si","generator":…,"index_offset":…,"coeffs":[[re,im],…]}`
    Si { generator: Generator, index_offset: i64, coeffs: Vec<(f64, f64)> },
    /// `{"kind":"vector","index_offset":…,"values":[[re,im],…]}`
    Vector { index_offset: i64, values: Vec<(f64, f64)> },
}

impl SignalFile {
    /// Captures a domain signal for serialization.
    pub fn from_signal(s: &Signal) -> Self {
        match s {
            Signal::Pw(s) => SignalFile::Pw {
                bandwidth: s.bandwidth(),
                x0: s.x0(),
                index_offset: s.coeffs().index_offset(),
                coeffs: pairs_from_vector(s.coeffs()),
            },
            Signal::Si(s) => SignalFile::Si {
                generator: s.generator(),
                index_offset: s.coeffs().index_offset(),
                coeffs: pairs_from_vector(s.coeffs()),
            },
            Signal::Vector(v) => SignalFile::Vector {
                index_offset: v.index_offset(),
                values: pairs_from_vector(v),
            },
        }
    }

    /// Validates and rebuilds the domain signal.
    pub fn into_signal(self) -> Result<Signal> {
        match self {
            SignalFile::Pw { bandwidth, x0, index_offset, coeffs } => Ok(Signal::Pw(
                PwSignal::new(bandwidth, x0, vector_from_pairs(index_offset, coeffs)?)?,
            )),
            SignalFile::Si { generator, index_offset, coeffs } => Ok(Signal::Si(SiSignal::new(
                generator,
                vector_from_pairs(index_offset, coeffs)?,
            ))),
            SignalFile::Vector { index_offset, values } => {
                Ok(Signal::Vector(vector_from_pairs(index_offset, values)?))
            }
        }
    }
}

/// Serializes a signal to its JSON wire form.
pub fn signal_to_json(s: &Signal) -> String {
    serde_json::to_string(&SignalFile::from_signal(s)).expect("signal wire form serializes")
}

/// Parses and validates a signal from its JSON wire form.
pub fn signal_from_json(json: &str) -> Result<Signal> {
    let file: SignalFile =
        serde_json::from_str(json).map_err(|e| Error::invalid(format!("signal file: {e}")))?;
    file.into_signal()
}

/// Sampling-grid annotation of band-limited structured measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    /// Band parameter of the sampled signal.
    #[serde(rename = "B")]
    pub bandwidth: f64,
    /// Grid origin.
    pub x0: f64,
}

/// Sampling annotation of shift-invariant structured measurements: sample
/// ids are half-integer points `j/2`, and recovery refits this coefficient
/// window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiMeta {
    /// Generator of the space.
    pub generator: Generator,
    /// First coefficient index of the window to refit.
    pub coeff_offset: i64,
    /// Number of coefficients in the window.
    pub coeff_len: usize,
}

/// A structured measurement file: scheme data plus optional grid
/// annotations for rebuilding a continuous-domain signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredFile {
    /// Scheme that produced the data.
    pub scheme: SchemeKind,
    /// Index of the first sample.
    pub index_offset: i64,
    /// Sample moduli.
    pub abs: Vec<f64>,
    /// First difference-modulus array.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rel1: Vec<f64>,
    /// Second difference-modulus array.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rel2: Vec<f64>,
    /// Band-limited sampling grid, when the samples came from one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridMeta>,
    /// Shift-invariant sampling annotation, when the samples came from one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub si: Option<SiMeta>,
}

impl StructuredFile {
    /// Wraps plain scheme data with no grid annotation.
    pub fn new(samples: StructuredSamples) -> Self {
        StructuredFile {
            scheme: samples.scheme,
            index_offset: samples.index_offset,
            abs: samples.abs,
            rel1: samples.rel1,
            rel2: samples.rel2,
            grid: None,
            si: None,
        }
    }

    /// The scheme data, detached from annotations.
    pub fn samples(&self) -> StructuredSamples {
        StructuredSamples {
            scheme: self.scheme,
            index_offset: self.index_offset,
            abs: self.abs.clone(),
            rel1: self.rel1.clone(),
            rel2: self.rel2.clone(),
        }
    }
}

/// A measurement file of either shape.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasurementFile {
    /// Structured scheme data (`"scheme"`-tagged).
    Structured(StructuredFile),
    /// Graph measurements; the measured pairs define the graph.
    Graph(MeasurementSet),
}

/// Serializes a measurement file.
pub fn measurement_to_json(m: &MeasurementFile) -> String {
    match m {
        MeasurementFile::Structured(s) => {
            serde_json::to_string(s).expect("structured wire form serializes")
        }
        MeasurementFile::Graph(g) => serde_json::to_string(g).expect("graph wire form serializes"),
    }
}

/// Parses a measurement file, telling the two shapes apart by their keys
/// and validating shapes and magnitudes.
pub fn measurement_from_json(json: &str) -> Result<MeasurementFile> {
    let value: serde_json::Value =
        serde_json::from_str(json).map_err(|e| Error::invalid(format!("measurement file: {e}")))?;
    let Some(object) = value.as_object() else {
        return Err(Error::invalid("measurement file must be a JSON object"));
    };
    if object.contains_key("scheme") {
        let file: StructuredFile = serde_json::from_value(value)
            .map_err(|e| Error::invalid(format!("structured measurement file: {e}")))?;
        file.samples().validate()?;
        Ok(MeasurementFile::Structured(file))
    } else if object.contains_key("vertices") {
        let set: MeasurementSet = serde_json::from_value(value)
            .map_err(|e| Error::invalid(format!("graph measurement file: {e}")))?;
        Ok(MeasurementFile::Graph(set))
    } else {
        Err(Error::invalid(
            "measurement file needs a \"scheme\" tag (structured) or \"vertices\" (graph)",
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::circulant_graph;
    use crate::measure::measure;
    use crate::spaces::counterexample_pair;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn signal_wire_round_trips_every_kind() {
        let pw = Signal::Pw(
            PwSignal::new(0.5, 0.25, ComplexVector::new(-1, vec![cx(1.0, 2.0), cx(0.0, -1.0)]))
                .unwrap(),
        );
        let json = signal_to_json(&pw);
        assert_eq!(
            json,
            r#"{"kind":"pw","B":0.5,"x0":0.25,"index_offset":-1,"coeffs":[[1.0,2.0],[0.0,-1.0]]}"#
        );
        assert_eq!(signal_from_json(&json).unwrap(), pw);

        let (f, _) = counterexample_pair();
        let si = Signal::Si(f);
        let json = signal_to_json(&si);
        assert_eq!(
            json,
            r#"{"kind":"si","generator":"hat","index_offset":0,"coeffs":[[1.0,0.0],[0.0,1.0],[1.0,0.0]]}"#
        );
        assert_eq!(signal_from_json(&json).unwrap(), si);

        let vec = Signal::Vector(ComplexVector::new(3, vec![cx(0.5, -0.5)]));
        let json = signal_to_json(&vec);
        assert_eq!(json, r#"{"kind":"vector","index_offset":3,"values":[[0.5,-0.5]]}"#);
        assert_eq!(signal_from_json(&json).unwrap(), vec);
    }

    #[test]
    fn signal_wire_rejects_invalid_payloads() {
        // Zero bandwidth never validates.
        let bad = r#"{"kind":"pw","B":0.0,"x0":0.0,"index_offset":0,"coeffs":[[1.0,0.0]]}"#;
        assert!(signal_from_json(bad).is_err());
        // Unknown kinds are parse errors.
        assert!(signal_from_json(r#"{"kind":"mystery","values":[]}"#).is_err());
        assert!(signal_from_json("[]").is_err());
    }

    #[test]
    fn structured_wire_keeps_annotations() {
        let f = ComplexVector::new(0, vec![cx(1.0, 0.0), cx(0.0, 1.0), cx(-1.0, 0.0)]);
        let mut file = StructuredFile::new(StructuredSamples::measure_adjacent12(&f));
        file.grid = Some(GridMeta { bandwidth: 0.5, x0: 0.0 });
        let json = measurement_to_json(&MeasurementFile::Structured(file.clone()));
        assert!(json.starts_with(r#"{"scheme":"adjacent12","index_offset":0,"abs":"#));
        assert!(json.ends_with(r#""grid":{"B":0.5,"x0":0.0}}"#));
        match measurement_from_json(&json).unwrap() {
            MeasurementFile::Structured(back) => {
                assert_eq!(back, file);
                assert_eq!(back.samples(), StructuredSamples::measure_adjacent12(&f));
            }
            other => panic!("mis-sniffed {other:?}"),
        }
    }

    #[test]
    fn graph_measurements_sniff_and_induce_their_graph() {
        let g = circulant_graph(4, &[1]);
        let f = ComplexVector::new(0, vec![cx(1.0, 0.0), cx(0.0, 1.0), cx(-1.0, 0.0), cx(0.5, 0.5)]);
        let m = measure(&f, &g);
        let json = measurement_to_json(&MeasurementFile::Graph(m.clone()));
        match measurement_from_json(&json).unwrap() {
            MeasurementFile::Graph(back) => {
                assert_eq!(back, m);
                assert_eq!(back.induced_graph(), g);
            }
            other => panic!("mis-sniffed {other:?}"),
        }
    }

    #[test]
    fn measurement_sniffing_rejects_unknown_shapes() {
        assert!(measurement_from_json(r#"{"edges":[]}"#).is_err());
        assert!(measurement_from_json("3").is_err());
        // A structured file with mismatched array shapes fails validation.
        let bad = r#"{"scheme":"adjacent12","index_offset":0,"abs":[1.0,1.0],"rel1":[],"rel2":[]}"#;
        assert!(measurement_from_json(bad).is_err());
    }
}
