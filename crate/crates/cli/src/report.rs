//! Report structures and their JSON and CSV forms.

use majorate::entropy::ExtendedAlpha;
use majorate::exponents::ExponentPoint;
use majorate::oracle::{Level, MajorizationVerdict};
use majorate::rate::{Argmin, ChainReport, ChainStatus, RateResult, RateStatus};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::format::{alpha, real, Alpha, Real};

/// A report with a flat tabular form.
pub trait Table {
    fn header(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
}

pub fn to_csv(table: &dyn Table) -> Result<String, csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(table.header())?;
    for row in table.rows() {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
pub struct EntropyValue {
    pub alpha: Alpha,
    pub renyi: Real,
}

#[derive(Serialize)]
pub struct EntropyReport {
    pub name: Option<String>,
    pub support: usize,
    pub values: Vec<EntropyValue>,
}

impl Table for EntropyReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["alpha", "renyi"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.values
            .iter()
            .map(|v| vec![alpha(v.alpha.0), real(v.renyi.0)])
            .collect()
    }
}

/// The minimisers: the string `"all"` or a list of orders.
pub struct ArgminJson<'a>(&'a Argmin);

impl Serialize for ArgminJson<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Argmin::Everywhere => serializer.serialize_str("all"),
            Argmin::Points(points) => {
                let mut seq = serializer.serialize_seq(Some(points.len()))?;
                for &p in points {
                    seq.serialize_element(&Alpha(p))?;
                }
                seq.end()
            }
        }
    }
}

#[derive(Serialize)]
pub struct RatioSample {
    pub alpha: Alpha,
    pub ratio: Real,
}

#[derive(Serialize)]
pub struct RateReport<'a> {
    pub rate: Real,
    pub argmin_alphas: ArgminJson<'a>,
    pub status: &'static str,
    pub samples: Vec<RatioSample>,
}

impl<'a> RateReport<'a> {
    pub fn new(result: &'a RateResult) -> Self {
        Self {
            rate: Real(result.rate),
            argmin_alphas: ArgminJson(&result.argmin),
            status: match result.status {
                RateStatus::ExactSpecialCase => "exact_special_case",
                RateStatus::GridRefined => "grid_refined",
            },
            samples: result
                .samples
                .iter()
                .map(|&(a, r)| RatioSample {
                    alpha: Alpha(a),
                    ratio: Real(r),
                })
                .collect(),
        }
    }
}

impl Table for RateReport<'_> {
    fn header(&self) -> Vec<&'static str> {
        vec!["alpha", "ratio"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.samples
            .iter()
            .map(|s| vec![alpha(s.alpha.0), real(s.ratio.0)])
            .collect()
    }
}

#[derive(Serialize)]
pub struct PointRow {
    #[serde(rename = "V")]
    pub value: Real,
    pub alpha: Real,
    #[serde(rename = "M")]
    pub mass: Real,
    #[serde(rename = "M_star")]
    pub mass_star: Real,
    #[serde(rename = "S")]
    pub size: Real,
    #[serde(rename = "S_star")]
    pub size_star: Real,
}

impl From<&ExponentPoint> for PointRow {
    fn from(p: &ExponentPoint) -> Self {
        Self {
            value: Real(p.value),
            alpha: Real(p.alpha.to_f64()),
            mass: Real(p.mass),
            mass_star: Real(p.mass_star),
            size: Real(p.size),
            size_star: Real(p.size_star),
        }
    }
}

#[derive(Serialize)]
pub struct CurveReport {
    pub points: Vec<PointRow>,
}

impl Table for CurveReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["V", "alpha", "M", "M_star", "S", "S_star"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .map(|p| {
                [p.value, p.alpha, p.mass, p.mass_star, p.size, p.size_star]
                    .iter()
                    .map(|x| real(x.0))
                    .collect()
            })
            .collect()
    }
}

#[derive(Serialize)]
pub struct VerdictReport {
    pub holds: bool,
    #[serde(rename = "witness_N")]
    pub witness: Option<String>,
    pub margin: Real,
    pub n: u32,
    pub m: u32,
}

impl VerdictReport {
    pub fn new(v: &MajorizationVerdict, n: u32, m: u32) -> Self {
        Self {
            holds: v.holds,
            witness: v.witness.as_ref().map(|w| w.to_string()),
            margin: Real(v.margin),
            n,
            m,
        }
    }
}

impl Table for VerdictReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["holds", "witness_N", "margin", "n", "m"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.holds.to_string(),
            self.witness.clone().unwrap_or_default(),
            real(self.margin.0),
            self.n.to_string(),
            self.m.to_string(),
        ]]
    }
}

#[derive(Serialize)]
pub struct VerifyRow {
    #[serde(rename = "V")]
    pub value: Real,
    pub alpha: Real,
    #[serde(rename = "M")]
    pub mass: Real,
    #[serde(rename = "M_hat")]
    pub mass_hat: Real,
    #[serde(rename = "M_star")]
    pub mass_star: Real,
    #[serde(rename = "M_star_hat")]
    pub mass_star_hat: Real,
    #[serde(rename = "S")]
    pub size: Real,
    #[serde(rename = "S_hat")]
    pub size_hat: Real,
    #[serde(rename = "S_star")]
    pub size_star: Real,
    #[serde(rename = "S_star_hat")]
    pub size_star_hat: Real,
}

impl VerifyRow {
    fn values(&self) -> [f64; 10] {
        [
            self.value.0,
            self.alpha.0,
            self.mass.0,
            self.mass_hat.0,
            self.mass_star.0,
            self.mass_star_hat.0,
            self.size.0,
            self.size_hat.0,
            self.size_star.0,
            self.size_star_hat.0,
        ]
    }
}

#[derive(Serialize)]
pub struct Deviations {
    #[serde(rename = "M")]
    pub mass: Real,
    #[serde(rename = "M_star")]
    pub mass_star: Real,
    #[serde(rename = "S")]
    pub size: Real,
    #[serde(rename = "S_star")]
    pub size_star: Real,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub n: u32,
    pub rows: Vec<VerifyRow>,
    pub max_deviation: Deviations,
}

impl VerifyReport {
    pub fn new(n: u32, rows: Vec<VerifyRow>) -> Self {
        let max = |f: fn(&VerifyRow) -> f64| Real(rows.iter().map(f).fold(0.0, f64::max));
        let max_deviation = Deviations {
            mass: max(|r| (r.mass.0 - r.mass_hat.0).abs()),
            mass_star: max(|r| (r.mass_star.0 - r.mass_star_hat.0).abs()),
            size: max(|r| (r.size.0 - r.size_hat.0).abs()),
            size_star: max(|r| (r.size_star.0 - r.size_star_hat.0).abs()),
        };
        Self {
            n,
            rows,
            max_deviation,
        }
    }
}

impl Table for VerifyReport {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "V",
            "alpha",
            "M",
            "M_hat",
            "M_star",
            "M_star_hat",
            "S",
            "S_hat",
            "S_star",
            "S_star_hat",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| r.values().iter().map(|&x| real(x)).collect())
            .collect()
    }
}

pub fn verify_row(point: &ExponentPoint, hat: &majorate::oracle::EmpiricalExponents) -> VerifyRow {
    VerifyRow {
        value: Real(point.value),
        alpha: Real(point.alpha.to_f64()),
        mass: Real(point.mass),
        mass_hat: Real(hat.mass),
        mass_star: Real(point.mass_star),
        mass_star_hat: Real(hat.mass_star),
        size: Real(point.size),
        size_hat: Real(hat.size),
        size_star: Real(point.size_star),
        size_star_hat: Real(hat.size_star),
    }
}

#[derive(Serialize)]
pub struct ChainJson {
    pub strict_everywhere: bool,
    pub first_n: Option<u32>,
    pub necessary_ok: bool,
    pub holds: Vec<bool>,
    pub status: &'static str,
}

impl From<&ChainReport> for ChainJson {
    fn from(c: &ChainReport) -> Self {
        Self {
            strict_everywhere: c.strict_everywhere,
            first_n: c.first_n,
            necessary_ok: c.necessary_ok,
            holds: c.holds.clone(),
            status: match c.status {
                ChainStatus::Consistent => "consistent",
                ChainStatus::Inconclusive => "inconclusive",
                ChainStatus::Violation => "violation",
            },
        }
    }
}

impl Table for ChainJson {
    fn header(&self) -> Vec<&'static str> {
        vec!["n", "holds"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.holds
            .iter()
            .enumerate()
            .map(|(i, h)| vec![(i + 1).to_string(), h.to_string()])
            .collect()
    }
}

#[derive(Serialize)]
pub struct LevelRow {
    pub log_value: Real,
    pub count: String,
    pub level_mass: Real,
}

#[derive(Serialize)]
pub struct StaircaseReport {
    pub n: u32,
    pub source_d: usize,
    pub levels: Vec<LevelRow>,
}

impl StaircaseReport {
    pub fn new(n: u32, source_d: usize, levels: &[Level]) -> Self {
        Self {
            n,
            source_d,
            levels: levels
                .iter()
                .map(|l| LevelRow {
                    log_value: Real(l.log_value),
                    count: l.count.to_string(),
                    level_mass: Real(l.mass),
                })
                .collect(),
        }
    }
}

impl Table for StaircaseReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["log_value", "count", "level_mass"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.levels
            .iter()
            .map(|l| vec![real(l.log_value.0), l.count.clone(), real(l.level_mass.0)])
            .collect()
    }
}

/// The degenerate curve of a uniform distribution: a single value.
pub fn uniform_point(d: usize) -> ExponentPoint {
    let log_d = (d as f64).log2();
    ExponentPoint {
        value: -log_d,
        alpha: ExtendedAlpha::Finite(f64::NAN),
        mass: 0.0,
        mass_star: 0.0,
        size: log_d,
        size_star: log_d,
    }
}
