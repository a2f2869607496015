//! JSON report model. Exact numbers are strings such as `"-10/7"`, indices
//! are 1-based and every collection has a fixed order, so equal inputs give
//! byte-identical output.

use serde::{Deserialize, Serialize};

use crate::grading::{GradingMatch, SemiQhDecomposition, Sign};
use crate::invsearch::{
    DegreeResult, Exactness, InvariantBasis, NonlinearResult, QuotientStatus, ScanKind, ScanReport,
};
use crate::kovalevskaya::{Balance, BalanceOrigin, KovalevskayaData};
use crate::oracle::OracleReport;
use crate::poly::{Scalar, VectorField};
use crate::resonance::{DegreeWindow, ResonanceSolution, WindowStatus};
use crate::spectrum::Exponent;
use crate::tensor::{TensorField, TensorType};

pub const SCHEMA_VERSION: &str = "kova-report/1";

/// A scalar: exact values as fraction strings, floats as numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Exact(String),
    Float(f64),
}

impl From<&Scalar> for Value {
    fn from(s: &Scalar) -> Self {
        match s {
            Scalar::Exact(_) => Value::Exact(s.to_string()),
            Scalar::Float(v) => Value::Float(*v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExponentValue {
    Exact(String),
    Approx { re: f64, im: f64 },
}

impl From<&Exponent> for ExponentValue {
    fn from(e: &Exponent) -> Self {
        match e {
            Exponent::Exact(_) => ExponentValue::Exact(e.to_string()),
            Exponent::Approx(z) => ExponentValue::Approx { re: z.re, im: z.im },
        }
    }
}

fn values(v: &[Scalar]) -> Vec<Value> {
    v.iter().map(Value::from).collect()
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub path: Option<String>,
    pub variables: Vec<String>,
    pub mode: String,
    /// Pretty-printed system after parsing.
    pub system: String,
    /// Instantiated right-hand sides.
    pub field: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rank: f64,
    pub resonance: f64,
    pub balance: f64,
    pub balance_dedup: f64,
    pub oracle_invariant: f64,
    pub oracle_non_invariant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptionsEcho {
    pub k_max: u32,
    pub s_max: u32,
    pub m_max: u32,
    pub seed: u64,
    pub quotient_trivial: bool,
    pub degrees: Vec<i64>,
    pub types: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradingReport {
    pub weights: Vec<u32>,
    pub degree: u32,
    pub sign: Sign,
    pub cut_terms: usize,
}

impl From<&GradingMatch> for GradingReport {
    fn from(g: &GradingMatch) -> Self {
        GradingReport {
            weights: g.grading.weights.clone(),
            degree: g.grading.degree,
            sign: g.sign,
            cut_terms: g.cut_terms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceReport {
    pub degree: i64,
    pub field: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub weights: Vec<u32>,
    pub degree: u32,
    pub sign: Sign,
    pub cut: Vec<String>,
    pub rest: Vec<SliceReport>,
}

pub fn field_lines(f: &VectorField, names: &[String]) -> Vec<String> {
    f.components()
        .iter()
        .map(|p| p.format_with(names))
        .collect()
}

impl DecompositionReport {
    pub fn new(d: &SemiQhDecomposition, names: &[String]) -> Self {
        DecompositionReport {
            weights: d.grading.weights.clone(),
            degree: d.grading.degree,
            sign: d.sign,
            cut: field_lines(&d.cut, names),
            rest: d
                .rest
                .iter()
                .map(|(k, f)| SliceReport {
                    degree: *k,
                    field: field_lines(f, names),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub c: Vec<Value>,
    pub origin: BalanceOrigin,
    pub exact: bool,
    pub residual: f64,
}

impl From<&Balance> for BalanceReport {
    fn from(b: &Balance) -> Self {
        BalanceReport {
            c: values(&b.c),
            origin: b.origin,
            exact: b.is_exact(),
            residual: b.residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KovalevskayaReport {
    /// 1-based index into `balances`.
    pub balance: usize,
    pub matrix: Vec<Vec<Value>>,
    pub exponents: Vec<ExponentValue>,
    pub exact_spectrum: bool,
    /// `Sc`, an eigenvector for the exponent `-1`.
    pub minus_one_witness: Option<Vec<Value>>,
}

impl KovalevskayaReport {
    pub fn new(balance: usize, k: &KovalevskayaData) -> Self {
        KovalevskayaReport {
            balance,
            matrix: k.k.iter().map(|r| values(r)).collect(),
            exponents: k.exponents.iter().map(ExponentValue::from).collect(),
            exact_spectrum: k.spectrum_is_exact(),
            minus_one_witness: k.minus_one_witness.as_deref().map(values),
        }
    }
}

/// One solution of a resonance condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub k: Vec<u32>,
    pub upper: Vec<usize>,
    pub lower: Vec<usize>,
    pub l: Option<i64>,
    /// `"0"` for an exact check, else the float defect.
    pub residual: String,
    pub tautological: bool,
}

impl From<&ResonanceSolution> for Certificate {
    fn from(r: &ResonanceSolution) -> Self {
        Certificate {
            k: r.k.clone(),
            upper: one_based(&r.upper),
            lower: one_based(&r.lower),
            l: r.l,
            residual: r.residual.to_string(),
            tautological: r.tautological,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowReport {
    pub lower: i64,
    pub upper: i64,
    pub degrees: Vec<i64>,
    pub status: WindowStatus,
    pub description: String,
}

impl From<&DegreeWindow> for WindowReport {
    fn from(w: &DegreeWindow) -> Self {
        WindowReport {
            lower: w.lower,
            upper: w.upper,
            degrees: w.degrees.clone(),
            status: w.status,
            description: w.describe(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub index: Vec<usize>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorReport {
    #[serde(rename = "type")]
    pub ttype: [usize; 2],
    pub text: String,
    pub components: Vec<ComponentReport>,
}

impl TensorReport {
    pub fn new(t: &TensorField, names: &[String]) -> Self {
        TensorReport {
            ttype: type_pair(t.ttype()),
            text: t.format_with(names),
            components: t
                .components()
                .iter()
                .map(|(idx, p)| ComponentReport {
                    index: one_based(idx),
                    value: p.format_with(names),
                })
                .collect(),
        }
    }
}

fn type_pair(t: TensorType) -> [usize; 2] {
    [t.p, t.q]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisReport {
    pub dimension: usize,
    pub raw_dimension: usize,
    pub trivial_dimension: usize,
    pub quotient: QuotientStatus,
    pub exact: bool,
    pub rank_tolerance: Option<f64>,
    pub conjectural: bool,
    pub tensors: Vec<TensorReport>,
}

impl BasisReport {
    pub fn new(b: &InvariantBasis, names: &[String]) -> Self {
        let rank_tolerance = match b.exactness {
            Exactness::Exact => None,
            Exactness::Float { rank_tolerance } => Some(rank_tolerance),
        };
        BasisReport {
            dimension: b.dimension,
            raw_dimension: b.raw_dimension,
            trivial_dimension: b.trivial_dimension,
            quotient: b.quotient,
            exact: rank_tolerance.is_none(),
            rank_tolerance,
            conjectural: b.conjectural,
            tensors: b
                .basis
                .iter()
                .map(|t| TensorReport::new(t, names))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub degree: i64,
    pub in_window: bool,
    pub certificates: Vec<Certificate>,
    pub basis: BasisReport,
}

impl DegreeReport {
    pub fn new(r: &DegreeResult, names: &[String]) -> Self {
        DegreeReport {
            degree: r.degree,
            in_window: r.in_window,
            certificates: r.resonances.iter().map(Certificate::from).collect(),
            basis: BasisReport::new(&r.basis, names),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearReport {
    pub max_degree: u32,
    pub lowest_grades: Vec<u32>,
    pub basis: BasisReport,
}

impl NonlinearReport {
    pub fn new(r: &NonlinearResult, names: &[String]) -> Self {
        NonlinearReport {
            max_degree: r.max_degree,
            lowest_grades: r.lowest_grades.clone(),
            basis: BasisReport::new(&r.basis, names),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanJson {
    #[serde(rename = "type")]
    pub ttype: [usize; 2],
    pub kind: ScanKind,
    /// 1-based balance the spectrum belongs to (graded scans).
    pub balance: Option<usize>,
    pub spectrum: Vec<ExponentValue>,
    pub window: WindowReport,
    pub results: Vec<DegreeReport>,
    pub nonlinear: Option<NonlinearReport>,
}

impl ScanJson {
    pub fn new(s: &ScanReport, balance: Option<usize>, names: &[String]) -> Self {
        ScanJson {
            ttype: type_pair(s.ttype),
            kind: s.kind,
            balance,
            spectrum: s.spectrum.iter().map(ExponentValue::from).collect(),
            window: WindowReport::from(&s.window),
            results: s
                .results
                .iter()
                .map(|r| DegreeReport::new(r, names))
                .collect(),
            nonlinear: s.nonlinear.as_ref().map(|n| NonlinearReport::new(n, names)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateGroup {
    pub degree: i64,
    pub certificates: Vec<Certificate>,
}

/// Resonance certificates without an invariant search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    #[serde(rename = "type")]
    pub ttype: [usize; 2],
    pub kind: ScanKind,
    pub balance: Option<usize>,
    pub spectrum: Vec<ExponentValue>,
    pub window: WindowReport,
    pub groups: Vec<CertificateGroup>,
}

impl ResonanceReport {
    pub fn new(
        ttype: TensorType,
        kind: ScanKind,
        balance: Option<usize>,
        spectrum: &[Exponent],
        window: &DegreeWindow,
        groups: Vec<(i64, Vec<ResonanceSolution>)>,
    ) -> Self {
        ResonanceReport {
            ttype: type_pair(ttype),
            kind,
            balance,
            spectrum: spectrum.iter().map(ExponentValue::from).collect(),
            window: WindowReport::from(window),
            groups: groups
                .into_iter()
                .map(|(degree, sols)| CertificateGroup {
                    degree,
                    certificates: sols.iter().map(Certificate::from).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub tensor: TensorReport,
    /// `L_F T = 0` checked symbolically.
    pub symbolic_invariant: bool,
    pub lie_derivative: TensorReport,
    pub oracle: OracleReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub tool_version: String,
    pub command: String,
    pub input: InputEcho,
    pub tolerances: Tolerances,
    pub options: OptionsEcho,
    pub gradings: Vec<GradingReport>,
    pub decomposition: Option<DecompositionReport>,
    pub balances: Vec<BalanceReport>,
    pub kovalevskaya: Vec<KovalevskayaReport>,
    pub resonances: Vec<ResonanceReport>,
    pub scans: Vec<ScanJson>,
    pub verify: Option<VerifyReport>,
    pub messages: Vec<String>,
}

impl Report {
    pub fn new(
        command: &str,
        input: InputEcho,
        tolerances: Tolerances,
        options: OptionsEcho,
    ) -> Self {
        Report {
            schema_version: SCHEMA_VERSION.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            input,
            tolerances,
            options,
            gradings: Vec::new(),
            decomposition: None,
            balances: Vec::new(),
            kovalevskaya: Vec::new(),
            resonances: Vec::new(),
            scans: Vec::new(),
            verify: None,
            messages: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
