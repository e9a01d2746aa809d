//! JSON documents for measures, functions, operators, quotients, metric
//! spaces and fields on `A(Γ)`.
//!
//! Scalars are written as strings `"p/q"` (or `"p"` for integers). On input,
//! JSON integers and decimal literals are also accepted and read exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use compensa_core::agamma::{FiniteField, Site};
use compensa_core::cantor::DyadicMeasure;
use compensa_core::closeness::MetricSpaceSample;
use compensa_core::measure::{AtomicMeasure, GridFunction};
use compensa_core::operator::OperatorTable;
use compensa_core::quotient::QuotientSpec;
use compensa_core::scalar::Rational;
use num_bigint::BigInt;
use serde::de::{self, DeserializeOwned, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A malformed or invalid document.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid number {0:?}")]
    Number(String),
    #[error("invalid document: {0}")]
    Invalid(#[from] compensa_core::error::Error),
}

pub type Result<T, E = FormatError> = std::result::Result<T, E>;

/// Reads `"p/q"`, `"p"` or a decimal literal such as `"-0.125"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || FormatError::Number(s.to_string());
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (negative, body) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let all_digits = |x: &str| x.chars().all(|c| c.is_ascii_digit());
    if int.is_empty() && frac.is_empty() || !all_digits(int) || !all_digits(frac) {
        return Err(bad());
    }
    let n = BigInt::from_str(&format!("{int}{frac}")).map_err(|_| bad())?;
    let n = if negative { -n } else { n };
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        Rational::from_integer(n * ten.pow(scale as u32))
    } else {
        Rational::new(n, ten.pow(scale.unsigned_abs()))
    })
}

/// A rational read from a string or JSON number and written as `"p/q"`.
#[derive(Clone, Debug, PartialEq)]
pub struct Num(pub Rational);

impl Serialize for Num {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        s.collect_str(&self.0)
    }
}

struct NumVisitor;

impl Visitor<'_> for NumVisitor {
    type Value = Num;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational as \"p/q\", an integer, or a decimal")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Num, E> {
        parse_rational(v).map(Num).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Num, E> {
        Ok(Num(Rational::from_integer(v.into())))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Num, E> {
        Ok(Num(Rational::from_integer(v.into())))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Num, E> {
        if !v.is_finite() {
            return Err(E::custom("non-finite number"));
        }
        parse_rational(&format!("{v:e}")).map(Num).map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Num, D::Error> {
        d.deserialize_any(NumVisitor)
    }
}

fn nums(v: &[Rational]) -> Vec<Num> {
    v.iter().cloned().map(Num).collect()
}

fn rationals(v: Vec<Num>) -> Vec<Rational> {
    v.into_iter().map(|n| n.0).collect()
}

/// A measure document: `{"type":"atomic",…}` or `{"type":"dyadic",…}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MeasureDoc {
    Atomic { points: Vec<String>, weights: Vec<Num> },
    Dyadic { depth: usize, leaves: Vec<Num> },
}

/// A parsed measure.
#[derive(Clone, Debug, PartialEq)]
pub enum Measure {
    Atomic(AtomicMeasure),
    Dyadic(DyadicMeasure),
}

impl Measure {
    pub fn to_atomic(&self) -> AtomicMeasure {
        match self {
            Measure::Atomic(m) => m.clone(),
            Measure::Dyadic(m) => m.to_atomic(),
        }
    }
}

impl MeasureDoc {
    pub fn parse(self) -> Result<Measure> {
        Ok(match self {
            MeasureDoc::Atomic { points, weights } => {
                Measure::Atomic(AtomicMeasure::new(points, rationals(weights))?)
            }
            MeasureDoc::Dyadic { depth, leaves } => {
                Measure::Dyadic(DyadicMeasure::new(depth, rationals(leaves))?)
            }
        })
    }
}

impl From<&AtomicMeasure> for MeasureDoc {
    fn from(m: &AtomicMeasure) -> Self {
        MeasureDoc::Atomic {
            points: m.points().to_vec(),
            weights: nums(m.weights()),
        }
    }
}

impl From<&DyadicMeasure> for MeasureDoc {
    fn from(m: &DyadicMeasure) -> Self {
        MeasureDoc::Dyadic {
            depth: m.depth(),
            leaves: nums(m.leaves()),
        }
    }
}

impl From<&Measure> for MeasureDoc {
    fn from(m: &Measure) -> Self {
        match m {
            Measure::Atomic(m) => m.into(),
            Measure::Dyadic(m) => m.into(),
        }
    }
}

/// `{"points":[…],"values":[…]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionDoc {
    pub points: Vec<String>,
    pub values: Vec<Num>,
}

impl FunctionDoc {
    pub fn parse(self) -> Result<GridFunction> {
        Ok(GridFunction::new(self.points, rationals(self.values))?)
    }
}

impl From<&GridFunction> for FunctionDoc {
    fn from(f: &GridFunction) -> Self {
        FunctionDoc {
            points: f.points().to_vec(),
            values: nums(f.values()),
        }
    }
}

/// `{"points":[…],"rows":[[…],…]}`; row `t` lists the weights of `T*(δ_t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDoc {
    pub points: Vec<String>,
    pub rows: Vec<Vec<Num>>,
}

impl OperatorDoc {
    pub fn parse(self) -> Result<OperatorTable> {
        let rows = self.rows.into_iter().map(rationals).collect();
        Ok(OperatorTable::new(self.points, rows)?)
    }
}

impl From<&OperatorTable> for OperatorDoc {
    fn from(t: &OperatorTable) -> Self {
        OperatorDoc {
            points: t.points().to_vec(),
            rows: t.rows().iter().map(|r| nums(r.weights())).collect(),
        }
    }
}

/// `{"phi":{"a":"x",…},"weights":{"x":{"a":"1/2",…},…}}`. Source and
/// target points are taken in sorted order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuotientDoc {
    pub phi: BTreeMap<String, String>,
    pub weights: BTreeMap<String, BTreeMap<String, Num>>,
}

impl QuotientDoc {
    /// The spec as written; use [`QuotientSpec::ensure_valid`] to require a
    /// regular averaging operator.
    pub fn parse(self) -> Result<QuotientSpec> {
        let weights = self
            .weights
            .into_iter()
            .map(|(l, row)| (l, row.into_iter().map(|(t, w)| (t, w.0)).collect()))
            .collect();
        Ok(QuotientSpec::from_maps(&self.phi, &weights)?)
    }
}

impl From<&QuotientSpec> for QuotientDoc {
    fn from(q: &QuotientSpec) -> Self {
        let phi = q
            .source()
            .iter()
            .zip(q.phi())
            .map(|(t, &l)| (t.clone(), q.target()[l].clone()))
            .collect();
        let mut weights: BTreeMap<String, BTreeMap<String, Num>> = BTreeMap::new();
        for (l, t, w) in q.weight_entries() {
            weights.entry(l.clone()).or_default().insert(t.clone(), Num(w.clone()));
        }
        QuotientDoc { phi, weights }
    }
}

/// `{"atoms":{"g1":"1","inf":"-1/2"}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomsDoc {
    pub atoms: BTreeMap<String, Num>,
}

impl AtomsDoc {
    fn parse(self) -> Result<AtomicMeasure<Rational, Site>> {
        let pairs = self
            .atoms
            .into_iter()
            .map(|(s, w)| Ok((s.parse::<Site>()?, w.0)))
            .collect::<Result<Vec<_>>>()?;
        let mut sites: Vec<Site> = pairs.iter().map(|p| p.0).collect();
        sites.sort();
        if let Some(w) = sites.windows(2).find(|w| w[0] == w[1]) {
            return Err(compensa_core::error::Error::DuplicatePoint(w[0].to_string()).into());
        }
        Ok(AtomicMeasure::from_pairs(pairs)?)
    }
}

impl From<&AtomicMeasure<Rational, Site>> for AtomsDoc {
    fn from(m: &AtomicMeasure<Rational, Site>) -> Self {
        AtomsDoc {
            atoms: m.iter().map(|(s, w)| (s.to_string(), Num(w.clone()))).collect(),
        }
    }
}

/// A tail-constant field on `A(Γ)`: `{"f_infinity":{…},"exceptions":{"5":{…}}}`
/// with an optional `"window"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDoc {
    pub f_infinity: AtomsDoc,
    #[serde(default)]
    pub exceptions: BTreeMap<String, AtomsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<u64>,
}

impl FieldDoc {
    pub fn parse(self) -> Result<FiniteField> {
        let f_inf = self.f_infinity.parse()?;
        let exceptions = self
            .exceptions
            .into_iter()
            .map(|(t, m)| {
                let t = t
                    .strip_prefix('g')
                    .unwrap_or(&t)
                    .parse::<u64>()
                    .map_err(|_| FormatError::Number(t.clone()))?;
                Ok((t, m.parse()?))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(FiniteField::new(f_inf, exceptions, self.window)?)
    }
}

impl From<&FiniteField> for FieldDoc {
    fn from(f: &FiniteField) -> Self {
        FieldDoc {
            f_infinity: f.f_infinity().into(),
            exceptions: f
                .exceptions()
                .iter()
                .map(|(t, m)| (t.to_string(), m.into()))
                .collect(),
            window: Some(f.window()),
        }
    }
}

/// A finite metric space, either as a full distance matrix
/// `{"points":[…],"distances":[[…],…]}` or as points of the line
/// `{"points":[…],"coordinates":[…]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<Vec<Num>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<Vec<Num>>,
}

impl SpaceDoc {
    pub fn parse(self) -> Result<MetricSpaceSample> {
        match (self.distances, self.coordinates) {
            (Some(d), None) => Ok(MetricSpaceSample::from_matrix(
                self.points,
                d.into_iter().map(rationals).collect(),
            )?),
            (None, Some(c)) => {
                if c.len() != self.points.len() {
                    return Err(compensa_core::error::Error::LengthMismatch {
                        expected: self.points.len(),
                        found: c.len(),
                    }
                    .into());
                }
                Ok(MetricSpaceSample::on_line(self.points.into_iter().zip(rationals(c)).collect())?)
            }
            _ => Err(FormatError::Number(
                "a space needs exactly one of \"distances\" and \"coordinates\"".into(),
            )),
        }
    }
}

impl From<&MetricSpaceSample> for SpaceDoc {
    fn from(m: &MetricSpaceSample) -> Self {
        let p = m.points();
        let distances = p
            .iter()
            .map(|a| p.iter().map(|b| Num(m.distance(a, b).expect("own points"))).collect())
            .collect();
        SpaceDoc {
            points: p.to_vec(),
            distances: Some(distances),
            coordinates: None,
        }
    }
}

/// `[["x","y","z"],…]`.
pub type TriplesDoc = Vec<[String; 3]>;

/// Reads `arg` as inline JSON when it starts with `{` or `[`, and as a file
/// path otherwise.
pub fn read_json<T: DeserializeOwned>(arg: &str) -> Result<T> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(serde_json::from_str(trimmed)?);
    }
    let text = std::fs::read_to_string(Path::new(arg)).map_err(|source| FormatError::Io {
        path: arg.to_string(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn parse_measure(arg: &str) -> Result<Measure> {
    read_json::<MeasureDoc>(arg)?.parse()
}

pub fn parse_function(arg: &str) -> Result<GridFunction> {
    read_json::<FunctionDoc>(arg)?.parse()
}

pub fn parse_operator(arg: &str) -> Result<OperatorTable> {
    read_json::<OperatorDoc>(arg)?.parse()
}

pub fn parse_quotient(arg: &str) -> Result<QuotientSpec> {
    read_json::<QuotientDoc>(arg)?.parse()
}

pub fn parse_field(arg: &str) -> Result<FiniteField> {
    read_json::<FieldDoc>(arg)?.parse()
}

pub fn parse_space(arg: &str) -> Result<MetricSpaceSample> {
    read_json::<SpaceDoc>(arg)?.parse()
}

pub fn parse_triples(arg: &str) -> Result<Vec<(String, String, String)>> {
    Ok(read_json::<TriplesDoc>(arg)?
        .into_iter()
        .map(|[x, y, z]| (x, y, z))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use compensa_core::scalar::ratio;

    #[test]
    fn rationals_parse() {
        assert_eq!(parse_rational("-3/6").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), ratio(7, 1));
        assert_eq!(parse_rational("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse_rational("-.5").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational("2.5e-1").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("1e3").unwrap(), ratio(1000, 1));
        for bad in ["1/0", "", "a", "1/2/3", ".", "1.2.3", "1/x"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn numbers_in_json() {
        let doc: MeasureDoc =
            serde_json::from_str(r#"{"type":"atomic","points":["a","b"],"weights":[1,0.5]}"#).unwrap();
        let m = doc.parse().unwrap().to_atomic();
        assert_eq!(m.weights(), &[ratio(1, 1), ratio(1, 2)]);
    }

    #[test]
    fn dyadic_document() {
        let m = parse_measure(r#"{"type":"dyadic","depth":2,"leaves":["2/5","-1/10","-3/10","1/5"]}"#).unwrap();
        assert!(matches!(m, Measure::Dyadic(_)));
        let short = parse_measure(r#"{"type":"dyadic","depth":2,"leaves":["1","2","3"]}"#);
        assert!(matches!(short, Err(FormatError::Invalid(_))));
        let zero = parse_measure(r#"{"type":"atomic","points":["a"],"weights":["1/0"]}"#);
        assert!(matches!(zero, Err(FormatError::Json(_))));
    }

    #[test]
    fn field_document() {
        let f = parse_field(r#"{"f_infinity":{"atoms":{"g1":"1","inf":"-1/2"}},"exceptions":{"5":{"atoms":{"g2":"1"}}}}"#).unwrap();
        assert_eq!(f.window(), 6);
        assert_eq!(f.value_at(Site::Gamma(5)).mass_at(&Site::Gamma(2)), ratio(1, 1));
        let outside = parse_field(r#"{"f_infinity":{"atoms":{"g9":"1"}},"window":4}"#);
        assert!(outside.is_err());
    }

    #[test]
    fn quotient_document() {
        let q = parse_quotient(r#"{"phi":{"a":"x","b":"x"},"weights":{"x":{"a":"1/2","b":"1/2"}}}"#).unwrap();
        assert!(q.ensure_valid().is_ok());
        assert_eq!(QuotientDoc::from(&q).parse().unwrap(), q);
    }
}
