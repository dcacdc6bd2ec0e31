//! Instance files: JSON with string-encoded rationals.

use std::cell::Cell;
use std::fmt;
use std::path::Path;

use convreg::polyhedron::{HPolyhedron, Row};
use convreg::rational::{parse_rat, RVec, Rat};
use convreg::set::{Ball, Collection, ConvexSet, GeneratedCone};
use convreg::{GeomError, Mode, NormContext, NormKind};
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const DEFAULT_SAMPLES: usize = 10_000;

thread_local! {
    /// Space dimension every vector is checked against while deserializing.
    static EXPECTED_DIM: Cell<Option<usize>> = const { Cell::new(None) };
}

struct DimGuard;

impl DimGuard {
    fn set(dim: usize) -> Self {
        EXPECTED_DIM.with(|d| d.set(Some(dim)));
        DimGuard
    }
}

impl Drop for DimGuard {
    fn drop(&mut self) {
        EXPECTED_DIM.with(|d| d.set(None));
    }
}

fn expected_dim() -> Option<usize> {
    EXPECTED_DIM.with(Cell::get)
}

/// A rational written as `"p/q"`, an integer or a decimal string.
#[derive(Clone, Debug, PartialEq)]
pub struct Rational(pub Rat);

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map(Rational).map_err(D::Error::custom)
    }
}

/// A vector of the instance's space dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector(pub RVec);

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|x| x.to_string()))
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<Rational> = Vec::deserialize(d)?;
        if let Some(n) = expected_dim() {
            if v.len() != n {
                return Err(D::Error::custom(format!(
                    "expected {n} coordinates, found {}",
                    v.len()
                )));
            }
        }
        Ok(Vector(v.into_iter().map(|r| r.0).collect()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowSpec {
    pub a: Vector,
    pub b: Rational,
    #[serde(default)]
    pub eq: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SetKind {
    Hpoly,
    Ball,
    Cone,
    ShrinkingIntervals,
}

/// Flat descriptor; a tagged enum would buffer its content and lose field
/// paths and line numbers in diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSet {
    #[serde(rename = "type")]
    kind: SetKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rows: Option<Vec<RowSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    center: Option<Vector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generators: Option<Vec<Vector>>,
}

impl SetKind {
    fn name(self) -> &'static str {
        match self {
            SetKind::Hpoly => "hpoly",
            SetKind::Ball => "ball",
            SetKind::Cone => "cone",
            SetKind::ShrinkingIntervals => "shrinking_intervals",
        }
    }
}

impl RawSet {
    fn new(kind: SetKind) -> Self {
        RawSet {
            kind,
            rows: None,
            center: None,
            radius: None,
            generators: None,
        }
    }

    fn check_fields(&self) -> Result<(), String> {
        let allowed: &[&str] = match self.kind {
            SetKind::Hpoly => &["rows"],
            SetKind::Ball => &["center", "radius"],
            SetKind::Cone => &["generators"],
            SetKind::ShrinkingIntervals => &[],
        };
        let present = [
            ("rows", self.rows.is_some()),
            ("center", self.center.is_some()),
            ("radius", self.radius.is_some()),
            ("generators", self.generators.is_some()),
        ];
        for (name, is_set) in present {
            if is_set && !allowed.contains(&name) {
                return Err(format!(
                    "field `{name}` does not belong to a {} set",
                    self.kind.name()
                ));
            }
            if !is_set && allowed.contains(&name) {
                return Err(format!("missing field `{name}`"));
            }
        }
        Ok(())
    }
}

/// A set descriptor, validated into a [`ConvexSet`] while parsing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSet", into = "RawSet")]
pub struct SetSpec(pub ConvexSet);

impl TryFrom<RawSet> for SetSpec {
    type Error = String;

    fn try_from(raw: RawSet) -> Result<Self, String> {
        raw.check_fields()?;
        let dim = expected_dim().unwrap_or(1);
        let set = match raw.kind {
            SetKind::Hpoly => {
                let rows = raw
                    .rows
                    .unwrap()
                    .into_iter()
                    .map(|r| Row {
                        a: r.a.0,
                        b: r.b.0,
                        eq: r.eq,
                    })
                    .collect();
                ConvexSet::HPoly(HPolyhedron::new(dim, rows).map_err(|e| e.to_string())?)
            }
            SetKind::Ball => {
                let radius = raw.radius.unwrap().0;
                if radius <= Rat::zero() {
                    return Err(format!("ball radius must be positive, found {radius}"));
                }
                ConvexSet::Ball(
                    Ball::new(raw.center.unwrap().0, radius).map_err(|e| e.to_string())?,
                )
            }
            SetKind::Cone => {
                let gens = raw.generators.unwrap().into_iter().map(|g| g.0).collect();
                ConvexSet::Cone(GeneratedCone::new(dim, gens).map_err(|e| e.to_string())?)
            }
            SetKind::ShrinkingIntervals => {
                if dim != 1 {
                    return Err(format!(
                        "shrinking_intervals lives in dimension 1, not {dim}"
                    ));
                }
                ConvexSet::ShrinkingIntervals
            }
        };
        Ok(SetSpec(set))
    }
}

impl From<SetSpec> for RawSet {
    fn from(s: SetSpec) -> RawSet {
        let hpoly = |h: HPolyhedron| RawSet {
            rows: Some(
                h.rows()
                    .iter()
                    .map(|r| RowSpec {
                        a: Vector(r.a.clone()),
                        b: Rational(r.b.clone()),
                        eq: r.eq,
                    })
                    .collect(),
            ),
            ..RawSet::new(SetKind::Hpoly)
        };
        match s.0 {
            ConvexSet::HPoly(h) => hpoly(h),
            ConvexSet::VPoly(v) => hpoly(v.to_h()),
            ConvexSet::Cone(k) => RawSet {
                generators: Some(k.generators().iter().cloned().map(Vector).collect()),
                ..RawSet::new(SetKind::Cone)
            },
            ConvexSet::Ball(b) => RawSet {
                center: Some(Vector(b.center().to_vec())),
                radius: Some(Rational(b.radius().clone())),
                ..RawSet::new(SetKind::Ball)
            },
            ConvexSet::ShrinkingIntervals => RawSet::new(SetKind::ShrinkingIntervals),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormSpec {
    #[serde(with = "kind_str")]
    pub kind: NormKind,
    #[serde(with = "mode_str")]
    pub mode: Mode,
    /// Defaults to `0` in exact mode and `1/1000000` in float mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<Rational>,
}

mod kind_str {
    use super::*;

    pub fn serialize<S: Serializer>(k: &NormKind, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(k.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<NormKind, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

mod mode_str {
    use super::*;

    pub fn serialize<S: Serializer>(m: &Mode, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(m.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mode, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub space_dim: usize,
    pub norm: NormSpec,
    pub sets: Vec<SetSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points_of_interest: Vec<Vector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intersection_override: Option<SetSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Deserialize)]
struct DimProbe {
    space_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InstanceError {
    /// Unreadable, malformed or invalid input.
    Invalid(String),
    /// The sets have no common point.
    Empty(String),
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceError::Invalid(m) | InstanceError::Empty(m) => f.write_str(m),
        }
    }
}

/// A parsed and validated instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub name: String,
    pub file: InstanceFile,
    pub collection: Collection,
}

fn path_error(e: serde_path_to_error::Error<serde_json::Error>) -> InstanceError {
    let inner = e.inner();
    let path = e.path().to_string();
    let field = if path == "." {
        "(document)".to_string()
    } else {
        path
    };
    InstanceError::Invalid(format!(
        "line {}, field {field}: {}",
        inner.line(),
        message(inner)
    ))
}

/// The error text without serde_json's trailing position.
fn message(e: &serde_json::Error) -> String {
    let full = e.to_string();
    let suffix = format!(" at line {} column {}", e.line(), e.column());
    full.strip_suffix(&suffix)
        .map_or(full.clone(), str::to_string)
}

fn deserialize<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, InstanceError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(path_error)?;
    de.end().map_err(|e| {
        InstanceError::Invalid(format!(
            "line {}, field (document): {}",
            e.line(),
            message(&e)
        ))
    })?;
    Ok(value)
}

/// 1-based line of the first occurrence of `"key"`, or 1.
fn line_of(text: &str, key: &str) -> usize {
    text.find(&format!("\"{key}\""))
        .map_or(1, |i| text[..i].matches('\n').count() + 1)
}

impl InstanceFile {
    /// Parses and checks every vector against `space_dim`.
    pub fn parse(text: &str) -> Result<InstanceFile, InstanceError> {
        let probe: DimProbe = deserialize(text)?;
        if probe.space_dim == 0 {
            return Err(InstanceError::Invalid(format!(
                "line {}, field space_dim: must be positive",
                line_of(text, "space_dim")
            )));
        }
        let _guard = DimGuard::set(probe.space_dim);
        let file: InstanceFile = deserialize(text)?;
        if file.sets.is_empty() {
            return Err(InstanceError::Invalid(format!(
                "line {}, field sets: no sets given",
                line_of(text, "sets")
            )));
        }
        if file.norm.tol.as_ref().is_some_and(|t| t.0 < Rat::zero()) {
            return Err(InstanceError::Invalid(format!(
                "line {}, field norm.tol: must be nonnegative",
                line_of(text, "tol")
            )));
        }
        Ok(file)
    }

    pub fn norm_context(&self) -> NormContext {
        let base = match self.norm.mode {
            Mode::Exact => NormContext::exact(self.norm.kind),
            Mode::Float => NormContext::float(self.norm.kind),
        };
        match &self.norm.tol {
            Some(t) => NormContext {
                tol: t.0.clone(),
                ..base
            },
            None => base,
        }
    }

    /// Builds the collection. `text` locates fields in diagnostics.
    pub fn to_collection(&self, text: &str) -> Result<Collection, InstanceError> {
        let sets = self.sets.iter().map(|s| s.0.clone()).collect();
        let over = self.intersection_override.as_ref().map(|s| s.0.clone());
        Collection::new(self.space_dim, self.norm_context(), sets, over).map_err(|e| match e {
            GeomError::Empty(m) => InstanceError::Empty(format!("empty intersection: {m}")),
            other => {
                let field = if self.intersection_override.is_some() {
                    "intersection_override"
                } else {
                    "sets"
                };
                InstanceError::Invalid(format!(
                    "line {}, field {field}: {other}",
                    line_of(text, field)
                ))
            }
        })
    }

    /// The file describing `c` with the given run parameters.
    pub fn from_collection(
        c: &Collection,
        points: &[RVec],
        seed: u64,
        samples: usize,
    ) -> InstanceFile {
        let norm = c.norm();
        InstanceFile {
            space_dim: c.dim(),
            norm: NormSpec {
                kind: norm.kind,
                mode: norm.mode,
                tol: Some(Rational(norm.tol.clone())),
            },
            sets: c.sets().iter().cloned().map(SetSpec).collect(),
            points_of_interest: points.iter().cloned().map(Vector).collect(),
            intersection_override: c.intersection_override().cloned().map(SetSpec),
            seed,
            samples,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance files serialize");
        s.push('\n');
        s
    }
}

impl Instance {
    pub fn parse(name: &str, text: &str) -> Result<Instance, InstanceError> {
        let file = InstanceFile::parse(text)?;
        let collection = file.to_collection(text)?;
        Ok(Instance {
            name: name.to_string(),
            file,
            collection,
        })
    }

    /// Reads `path`; the instance is named after the file stem.
    pub fn load(path: &Path) -> Result<Instance, InstanceError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InstanceError::Invalid(format!("cannot read {}: {e}", path.display())))?;
        let name = path
            .file_stem()
            .map_or_else(|| "instance".into(), |s| s.to_string_lossy().into_owned());
        Instance::parse(&name, &text)
    }

    pub fn points(&self) -> Vec<RVec> {
        self.file
            .points_of_interest
            .iter()
            .map(|v| v.0.clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use convreg::rational::rvec;

    const RIGHT_ANGLE: &str = r#"{
  "space_dim": 2,
  "norm": {"kind": "linf", "mode": "exact"},
  "sets": [
    {"type": "hpoly", "rows": [{"a": ["1", "0"], "b": "0"}]},
    {"type": "hpoly", "rows": [{"a": ["0", "1"], "b": "0", "eq": false}]}
  ],
  "seed": 7
}"#;

    #[test]
    fn right_angle_parses() {
        let inst = Instance::parse("ra", RIGHT_ANGLE).unwrap();
        assert_eq!(inst.collection.sets().len(), 2);
        assert_eq!(inst.collection.norm(), &NormContext::exact(NormKind::Linf));
        assert_eq!(inst.file.seed, 7);
        assert_eq!(inst.file.samples, DEFAULT_SAMPLES);
    }

    #[test]
    fn serialization_round_trips() {
        let inst = Instance::parse("ra", RIGHT_ANGLE).unwrap();
        let text = inst.file.to_json();
        let again = Instance::parse("ra", &text).unwrap();
        assert_eq!(again.collection, inst.collection);
        assert_eq!(again.file.to_json(), text);
    }

    #[test]
    fn zero_denominator_names_line_and_field() {
        let text = RIGHT_ANGLE.replace(r#""b": "0", "eq""#, r#""b": "1/0", "eq""#);
        let err = Instance::parse("ra", &text).unwrap_err().to_string();
        assert!(err.contains("line 6"), "{err}");
        assert!(err.contains("sets[1].rows[0].b"), "{err}");
        assert!(err.contains("zero denominator"), "{err}");
    }

    #[test]
    fn mixed_dimensions_are_rejected() {
        let text = RIGHT_ANGLE.replace(r#"["0", "1"]"#, r#"["0", "1", "0"]"#);
        let err = Instance::parse("ra", &text).unwrap_err().to_string();
        assert!(err.contains("sets[1].rows[0].a"), "{err}");
        assert!(err.contains("expected 2 coordinates, found 3"), "{err}");
    }

    #[test]
    fn empty_intersections_are_distinguished() {
        let text = RIGHT_ANGLE
            .replace(r#""b": "0", "eq""#, r#""b": "-1", "eq""#)
            .replace(
                r#"{"a": ["1", "0"], "b": "0"}"#,
                r#"{"a": ["0", "-1"], "b": "-1"}"#,
            );
        assert!(matches!(
            Instance::parse("ra", &text),
            Err(InstanceError::Empty(_))
        ));
    }

    #[test]
    fn unknown_fields_and_kinds_are_rejected() {
        let err = Instance::parse("ra", &RIGHT_ANGLE.replace("\"seed\"", "\"sead\""))
            .unwrap_err()
            .to_string();
        assert!(err.contains("sead"), "{err}");
        let err = Instance::parse("ra", &RIGHT_ANGLE.replace("linf", "l3"))
            .unwrap_err()
            .to_string();
        assert!(err.contains("norm.kind"), "{err}");
    }

    #[test]
    fn balls_cones_and_families_round_trip() {
        let text = r#"{
  "space_dim": 2,
  "norm": {"kind": "l2", "mode": "float", "tol": "1/1000"},
  "sets": [
    {"type": "ball", "center": ["0", "1"], "radius": "1"},
    {"type": "cone", "generators": [["2", "0"], ["0", "-1/2"]]}
  ],
  "points_of_interest": [["0", "0"]],
  "intersection_override": {"type": "hpoly", "rows": [{"a": ["1", "0"], "b": "0", "eq": true}, {"a": ["0", "1"], "b": "0", "eq": true}]}
}"#;
        let inst = Instance::parse("b", text).unwrap();
        assert_eq!(inst.points(), vec![rvec(&[0, 0])]);
        let again = Instance::parse("b", &inst.file.to_json()).unwrap();
        assert_eq!(again.collection, inst.collection);
        let fam = r#"{"space_dim": 1, "norm": {"kind": "l2", "mode": "float"}, "sets": [{"type": "shrinking_intervals"}]}"#;
        let inst = Instance::parse("f", fam).unwrap();
        assert!(inst.collection.has_family());
        let bad = fam.replace("\"space_dim\": 1", "\"space_dim\": 2");
        assert!(Instance::parse("f", &bad)
            .unwrap_err()
            .to_string()
            .contains("dimension 1"));
        let neg = text.replace(r#""radius": "1""#, r#""radius": "-1""#);
        assert!(Instance::parse("b", &neg)
            .unwrap_err()
            .to_string()
            .contains("radius"));
    }
}
