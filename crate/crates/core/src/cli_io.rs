//! Scenario files, command dispatch and deterministic JSON reports.
//!
//! Every number in a report is an exact rational rendered as `"p/q"`. Objects are emitted with
//! sorted keys, so identical inputs produce identical bytes. Decimal renderings appear only in
//! plot-data exports, which are for display.

use std::fmt;
use std::path::Path;

use menuex_geometry::scalar::{format_scalar, parse_scalar, to_f64, unit_vec, zero_vec};
use menuex_geometry::{rank, Scalar, Vector};
use num_traits::Signed;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::applications::{
    delegation_classify, dominance_check, expected_principal_utility, genericity_experiment, monopoly_nudge,
    monopoly_pricing_analysis, veto_undominated, DelegationKind, ExperimentPreset, PricingAnalysis, TypeSample,
};
use crate::error::{CoreError, Result};
use crate::exhaustiveness::{is_exhaustive, ExhaustivenessCase, ExhaustivenessReport, FailureWitness};
use crate::extremality::{
    build_deformation_system, def_polytope_cross_check, deformation_dimension, extract_decomposition_at,
    is_extreme_finite, max_step, DecompositionCertificate, ExtremalityVerdict, ProbeKind,
};
use crate::model::{
    extend_menu, validate_scenario, ConeSpec, ExtendedMenu, Menu, Objective, RawScenario, Scenario, SpaceSpec,
};
use crate::perturbation::{perturb_to_extreme, within, PerturbationResult};
use crate::planar::{
    classify_2d, partition_boundary, BoundaryNode, ChainCase, PlanarVerdict, PlanarWitness, VertexClass,
};

/// An exact rational in a scenario file: a `"p/q"` string or an integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rational(pub Scalar);

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_scalar(&self.0))
    }
}

struct RationalVisitor;

impl Visitor<'_> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational as a \"p/q\" string or an integer")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
        Ok(Rational(Scalar::from_integer(v.into())))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rational, E> {
        Ok(Rational(Scalar::from_integer(v.into())))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Rational, E> {
        Err(E::custom(format!("decimal {v} is not exact; write it as a \"p/q\" string")))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
        parse_scalar(v).map(Rational).map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        deserializer.deserialize_any(RationalVisitor)
    }
}

fn to_vec(v: &[Rational]) -> Vector {
    v.iter().map(|r| r.0.clone()).collect()
}

fn from_vec(v: &[Scalar]) -> Vec<Rational> {
    v.iter().cloned().map(Rational).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceFile {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

/// Either a preset (`simplex` or `cube` with `d`, `monopoly` with `m` and `kappa`) or an explicit
/// list of halfspaces `normal · z <= offset`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfspaces: Option<Vec<HalfspaceFile>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaysFile {
    pub rays: Vec<Vec<Rational>>,
}

/// `"unrestricted"`, `"monopoly"`, or `{"rays": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConeFile {
    Named(String),
    Rays(RaysFile),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRowFile {
    #[serde(rename = "type")]
    pub theta: Vec<Rational>,
    pub value: Vec<Rational>,
}

/// `{"constant": [...]}` or `{"table": [{"type": [...], "value": [...]}, ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum ObjectiveFile {
    Constant(Vec<Rational>),
    Table(Vec<TableRowFile>),
}

/// The on-disk scenario format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub space: SpaceFile,
    pub cone: ConeFile,
    pub menu: Vec<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub veto: Option<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveFile>,
}

fn space_spec(s: &SpaceFile) -> Result<SpaceSpec> {
    let unused = |name: &str, present: bool| {
        if present {
            Err(CoreError::parse(format!("space.{name}"), "not applicable to this space"))
        } else {
            Ok(())
        }
    };
    match (&s.preset, &s.halfspaces) {
        (Some(_), Some(_)) => Err(CoreError::parse("space", "give either a preset or halfspaces, not both")),
        (None, None) => Err(CoreError::parse("space", "a preset or a halfspace list is required")),
        (None, Some(hs)) => {
            unused("d", s.d.is_some())?;
            unused("m", s.m.is_some())?;
            unused("kappa", s.kappa.is_some())?;
            Ok(SpaceSpec::Halfspaces {
                normals: hs.iter().map(|h| to_vec(&h.normal)).collect(),
                offsets: hs.iter().map(|h| h.offset.0.clone()).collect(),
            })
        }
        (Some(p), None) => {
            let need_d = || s.d.ok_or_else(|| CoreError::parse("space.d", "required by this preset"));
            match p.as_str() {
                "simplex" | "cube" => {
                    unused("m", s.m.is_some())?;
                    unused("kappa", s.kappa.is_some())?;
                    let d = need_d()?;
                    Ok(if p == "simplex" { SpaceSpec::Simplex { d } } else { SpaceSpec::Cube { d } })
                }
                "monopoly" => {
                    unused("d", s.d.is_some())?;
                    let m = s.m.ok_or_else(|| CoreError::parse("space.m", "required by the monopoly preset"))?;
                    let kappa = s.kappa.as_ref().map(|k| k.0.clone()).unwrap_or_else(|| Scalar::from_integer(1.into()));
                    if !kappa.is_positive() {
                        return Err(CoreError::parse("space.kappa", "must be positive"));
                    }
                    Ok(SpaceSpec::Monopoly { m, kappa })
                }
                other => Err(CoreError::parse("space.preset", format!("unknown preset {other:?}"))),
            }
        }
    }
}

fn cone_spec(c: &ConeFile) -> Result<ConeSpec> {
    match c {
        ConeFile::Named(n) if n == "unrestricted" => Ok(ConeSpec::Unrestricted),
        ConeFile::Named(n) if n == "monopoly" => Ok(ConeSpec::Monopoly),
        ConeFile::Named(n) => Err(CoreError::parse("cone", format!("unknown cone {n:?}"))),
        ConeFile::Rays(r) => Ok(ConeSpec::Rays(r.rays.iter().map(|x| to_vec(x)).collect())),
    }
}

/// Converts and validates a parsed file.
pub fn scenario_from_file(file: &ScenarioFile) -> Result<Scenario> {
    let objective = file.objective.as_ref().map(|o| match o {
        ObjectiveFile::Constant(v) => Objective::Constant(to_vec(v)),
        ObjectiveFile::Table(rows) => {
            Objective::Table(rows.iter().map(|r| (to_vec(&r.theta), to_vec(&r.value))).collect())
        }
    });
    let raw = RawScenario {
        label: file.label.clone().unwrap_or_else(|| "scenario".into()),
        space: space_spec(&file.space)?,
        cone: cone_spec(&file.cone)?,
        menu: file.menu.iter().map(|p| to_vec(p)).collect(),
        veto: file.veto.as_ref().map(|v| to_vec(v)),
        objective,
    };
    validate_scenario(&raw)
}

fn json_error(e: serde_json::Error) -> CoreError {
    CoreError::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
}

/// Parses and validates a scenario from JSON text.
pub fn parse_scenario_str(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(json_error)?;
    scenario_from_file(&file)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CoreError::Io { path: path.display().to_string(), message: e.to_string() })
}

/// Reads, parses and validates a scenario file.
pub fn parse_scenario(path: &Path) -> Result<Scenario> {
    parse_scenario_str(&read(path)?)
}

/// The canonical file form of a scenario: explicit facets, cone rays unless unrestricted.
pub fn emit_scenario(s: &Scenario) -> ScenarioFile {
    let halfspaces = s
        .space
        .facets()
        .iter()
        .map(|h| HalfspaceFile { normal: from_vec(h.normal()), offset: Rational(h.offset().clone()) })
        .collect();
    let cone = if s.cone.is_unrestricted() {
        ConeFile::Named("unrestricted".into())
    } else {
        ConeFile::Rays(RaysFile { rays: s.cone.rays().iter().map(|r| from_vec(r)).collect() })
    };
    let objective = s.objective.as_ref().map(|o| match o {
        Objective::Constant(v) => ObjectiveFile::Constant(from_vec(v)),
        Objective::Table(rows) => ObjectiveFile::Table(
            rows.iter().map(|(t, v)| TableRowFile { theta: from_vec(t), value: from_vec(v) }).collect(),
        ),
    });
    ScenarioFile {
        label: Some(s.label.clone()),
        space: SpaceFile { halfspaces: Some(halfspaces), ..SpaceFile::default() },
        cone,
        menu: s.menu.items.iter().map(|p| from_vec(p)).collect(),
        veto: s.space.veto().map(|v| from_vec(v)),
        objective,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightedTypeFile {
    #[serde(rename = "type")]
    theta: Vec<Rational>,
    weight: Rational,
}

/// `{"types": [{"type": [...], "weight": "p/q"}, ...]}` or `{"uniform": [[...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleFile {
    #[serde(default)]
    types: Option<Vec<WeightedTypeFile>>,
    #[serde(default)]
    uniform: Option<Vec<Vec<Rational>>>,
}

/// Parses a type sample from JSON text.
pub fn parse_sample_str(text: &str) -> Result<TypeSample> {
    let file: SampleFile = serde_json::from_str(text).map_err(json_error)?;
    match (file.types, file.uniform) {
        (Some(t), None) => TypeSample::new(t.iter().map(|w| (to_vec(&w.theta), w.weight.0.clone())).collect()),
        (None, Some(u)) => TypeSample::uniform(u.iter().map(|t| to_vec(t)).collect()),
        _ => Err(CoreError::parse("sample", "give exactly one of \"types\" or \"uniform\"")),
    }
}

pub fn parse_sample(path: &Path) -> Result<TypeSample> {
    parse_sample_str(&read(path)?)
}

/// A command report: a JSON object with sorted keys.
#[derive(Clone, Debug, PartialEq)]
pub struct Report(pub Value);

impl Report {
    /// Pretty-printed JSON followed by a newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.0).expect("report values are always serializable");
        s.push('\n');
        s
    }
}

/// Step rule for decomposition certificates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepRule {
    /// Half the largest admissible step; both summands keep the combinatorics of `M`.
    Half,
    /// The largest admissible step; summands may lose edges.
    Max,
}

/// A command run against one scenario.
#[derive(Clone, Debug)]
pub enum Command {
    Analyze,
    Decompose { step: StepRule },
    Perturb { delta: Scalar, seed: u64 },
    Classify2d,
    Delegation,
    Monopoly { nudge: Option<(Scalar, Scalar)> },
    Veto,
    Evaluate { sample: TypeSample, compare: Option<Box<Scenario>> },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Decompose { .. } => "decompose",
            Command::Perturb { .. } => "perturb",
            Command::Classify2d => "classify2d",
            Command::Delegation => "delegation",
            Command::Monopoly { .. } => "monopoly",
            Command::Veto => "veto",
            Command::Evaluate { .. } => "evaluate",
        }
    }
}

fn q(s: &Scalar) -> Value {
    Value::String(format_scalar(s))
}

fn qv(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(q).collect())
}

fn qvv(vs: &[Vector]) -> Value {
    Value::Array(vs.iter().map(|v| qv(v)).collect())
}

fn object(pairs: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

fn scenario_json(s: &Scenario) -> Value {
    serde_json::to_value(emit_scenario(s)).expect("scenario files are always serializable")
}

fn extended_menu_json(m: &ExtendedMenu) -> Value {
    object(vec![
        ("vertices", qvv(m.vertices())),
        ("edges", json!(m.edges().iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>())),
        ("polar_rays", qvv(m.polar_rays())),
        ("incidences", json!(m.incidences())),
        ("binding", json!(m.binding())),
        ("absorbed_items", json!(m.absorbed().len())),
        ("bounded", json!(m.poly().is_bounded())),
    ])
}

fn exhaustiveness_json(r: &ExhaustivenessReport) -> Value {
    let case = match r.case {
        ExhaustivenessCase::SingletonAtVertex => "singleton_at_vertex",
        ExhaustivenessCase::SpanningAndEmptyIntersection => "spanning_and_empty_intersection",
        ExhaustivenessCase::Failure => "failure",
    };
    let witness = match &r.witness {
        None => Value::Null,
        Some(FailureWitness::Translation(t)) => object(vec![("translation", qv(t))]),
        Some(FailureWitness::DilationCenter(c)) => object(vec![("dilation_center", qv(c))]),
    };
    object(vec![("exhaustive", json!(r.exhaustive)), ("case", json!(case)), ("witness", witness)])
}

fn certificate_json(cert: &DecompositionCertificate, s: &Scenario) -> Result<Value> {
    let count = |k: ProbeKind| cert.probes.iter().filter(|p| p.kind == k).count();
    let summand = |items: &[Vector]| -> Result<Value> {
        let m = extend_menu(&Menu::new(items.to_vec()), &s.cone, &s.space)?;
        Ok(object(vec![("items", qvv(items)), ("vertices", qvv(m.vertices()))]))
    };
    Ok(object(vec![
        ("epsilon", q(&cert.epsilon)),
        ("psi", qvv(&cert.direction.psi)),
        ("mu", qv(&cert.direction.mu)),
        ("summand_plus", summand(&cert.menu_plus)?),
        ("summand_minus", summand(&cert.menu_minus)?),
        (
            "support_checks",
            object(vec![
                ("facet_normal", json!(count(ProbeKind::FacetNormal))),
                ("edge_normal", json!(count(ProbeKind::EdgeNormal))),
                ("random", json!(count(ProbeKind::Random))),
            ]),
        ),
        ("verified", json!(true)),
    ]))
}

/// The decomposition for a non-extreme verdict at the requested step, verified on construction.
pub fn decomposition(
    s: &Scenario,
    m: &ExtendedMenu,
    dir: &crate::extremality::Direction,
    step: StepRule,
) -> Result<DecompositionCertificate> {
    let top = max_step(m, &s.space, dir);
    let eps = match step {
        StepRule::Half => top / Scalar::from_integer(2.into()),
        StepRule::Max => top,
    };
    extract_decomposition_at(m, &s.space, &s.cone, dir, &eps)
}

fn extremality_json(s: &Scenario, m: &ExtendedMenu, step: StepRule) -> Result<Value> {
    let verdict = is_extreme_finite(m, &s.space)?;
    let lifted = def_polytope_cross_check(m, &s.space)?;
    if lifted != verdict.is_extreme() {
        return Err(CoreError::Internal("the rank oracle and the lifted deformation oracle disagree".into()));
    }
    let sys = build_deformation_system(m, &s.space);
    let mut pairs = vec![
        ("extreme", json!(verdict.is_extreme())),
        ("deformation_dimension", json!(deformation_dimension(m, &s.space))),
        ("oracles_agree", json!(true)),
    ];
    match &verdict {
        ExtremalityVerdict::Extreme => {
            pairs.push(("message", json!("extreme: no decomposition exists")));
            pairs.push((
                "certificate",
                object(vec![
                    ("kind", json!("trivial_nullspace")),
                    ("columns", json!(sys.ncols)),
                    ("rank", json!(rank(&sys.matrix))),
                ]),
            ));
        }
        ExtremalityVerdict::NotExtreme(dir) => {
            let cert = decomposition(s, m, dir, step)?;
            pairs.push(("certificate", certificate_json(&cert, s)?));
        }
    }
    Ok(object(pairs))
}

fn class_name(c: VertexClass) -> &'static str {
    match c {
        VertexClass::V => "V",
        VertexClass::I => "I",
        VertexClass::B1 => "B1",
        VertexClass::B2 => "B2",
    }
}

fn node_json(n: &BoundaryNode) -> Value {
    match n {
        BoundaryNode::Sentinel => json!("*"),
        BoundaryNode::Vertex(i) => json!(i),
    }
}

fn planar_json(s: &Scenario, m: &ExtendedMenu) -> Result<Value> {
    let verdict = classify_2d(m, &s.space, s.cone.is_unrestricted())?;
    let rank_verdict = is_extreme_finite(m, &s.space)?.is_extreme();
    if rank_verdict != verdict.is_extreme() {
        return Err(CoreError::Internal("the planar classifier and the rank oracle disagree".into()));
    }
    let mut pairs = vec![("extreme", json!(verdict.is_extreme())), ("rank_oracle_agrees", json!(true))];
    if m.vertices().len() > 2 {
        let p = partition_boundary(m, &s.space)?;
        pairs.push(("order", Value::Array(p.order.iter().map(node_json).collect())));
        pairs.push(("classes", json!(p.classes.iter().map(|&c| class_name(c)).collect::<Vec<_>>())));
        pairs.push(("cyclic", json!(p.cyclic)));
    }
    let witness = match &verdict {
        PlanarVerdict::Extreme => Value::Null,
        PlanarVerdict::NotExtreme(PlanarWitness::NotExhaustive(r)) => {
            object(vec![("not_exhaustive", exhaustiveness_json(r))])
        }
        PlanarVerdict::NotExtreme(PlanarWitness::Chain(c)) => {
            let case = match &c.case {
                ChainCase::Endpoints => object(vec![("kind", json!("endpoints"))]),
                ChainCase::SymmetricCycle { sin2_alpha, sin2_beta, product } => object(vec![
                    ("kind", json!("symmetric_cycle")),
                    ("sin2_alpha", qv(sin2_alpha)),
                    ("sin2_beta", qv(sin2_beta)),
                    ("product", q(product)),
                ]),
            };
            object(vec![("chain", Value::Array(c.nodes.iter().map(node_json).collect())), ("case", case)])
        }
    };
    pairs.push(("witness", witness));
    Ok(object(pairs))
}

fn pricing_json(a: &PricingAnalysis) -> Value {
    object(vec![
        ("gradients", qvv(&a.gradients)),
        ("margin", q(&a.margin)),
        ("undominated_sufficient", json!(a.undominated_sufficient)),
        ("verdict", json!(if a.undominated_sufficient { "undominated" } else { "inconclusive" })),
    ])
}

fn perturbation_json(r: &PerturbationResult, s: &Scenario) -> Value {
    let all_within = r.menu.iter().zip(&r.original).all(|(p, o)| within(p, o, &r.delta));
    object(vec![
        ("menu", qvv(&r.menu)),
        ("original", qvv(&r.original)),
        ("displacements", qvv(&r.moved)),
        ("core", json!(r.core)),
        ("general_position", json!(r.general_position.general)),
        ("exhaustiveness", exhaustiveness_json(&r.exhaustiveness)),
        ("extreme", json!(r.extreme)),
        ("delta", q(&r.delta)),
        ("max_displacement_sq", q(&r.max_displacement_sq())),
        ("within_delta", json!(all_within)),
        ("attempts", json!(r.attempts)),
        ("unchanged", json!(r.unchanged)),
        ("label", json!(format!("{}-perturbed", s.label))),
    ])
}

fn require_objective(s: &Scenario) -> Result<&Objective> {
    s.objective.as_ref().ok_or_else(|| CoreError::Precondition("the scenario has no objective".into()))
}

/// Runs one command and builds its report.
pub fn run_command(cmd: &Command, s: &Scenario) -> Result<Report> {
    let m = s.extended_menu()?;
    let mut pairs = vec![("command", json!(cmd.name())), ("scenario", scenario_json(s))];
    match cmd {
        Command::Analyze => {
            pairs.push(("extended_menu", extended_menu_json(&m)));
            let exh = is_exhaustive(&m, &s.space)?;
            let ext = extremality_json(s, &m, StepRule::Half)?;
            if ext["extreme"] == json!(true) && !exh.exhaustive {
                return Err(CoreError::Internal("an extreme menu was classified as not exhaustive".into()));
            }
            pairs.push(("exhaustiveness", exhaustiveness_json(&exh)));
            pairs.push(("extremality", ext));
            if s.dim() == 2 {
                pairs.push(("planar", planar_json(s, &m)?));
            }
        }
        Command::Decompose { step } => {
            pairs.push(("extended_menu", extended_menu_json(&m)));
            pairs.push((
                "step",
                json!(match step {
                    StepRule::Half => "half",
                    StepRule::Max => "max",
                }),
            ));
            pairs.push(("extremality", extremality_json(s, &m, *step)?));
        }
        Command::Perturb { delta, seed } => {
            let r = perturb_to_extreme(&s.menu, &s.space, &s.cone, delta, *seed)?;
            pairs.push(("seed", json!(seed)));
            pairs.push(("perturbation", perturbation_json(&r, s)));
        }
        Command::Classify2d => {
            if s.dim() != 2 {
                return Err(CoreError::NotPlanar(s.dim()));
            }
            pairs.push(("extended_menu", extended_menu_json(&m)));
            pairs.push(("planar", planar_json(s, &m)?));
        }
        Command::Delegation => {
            let r = delegation_classify(s)?;
            let kind = match r.kind {
                DelegationKind::Dictates => "dictates",
                DelegationKind::GrantsStrike => "grants_strike",
                DelegationKind::Neither => "neither",
            };
            pairs.push((
                "delegation",
                object(vec![
                    ("kind", json!(kind)),
                    ("menu_size", json!(r.menu_size)),
                    ("extreme", json!(r.extreme)),
                    ("exhaustive", json!(r.exhaustive)),
                ]),
            ));
        }
        Command::Monopoly { nudge } => {
            pairs.push(("pricing", pricing_json(&monopoly_pricing_analysis(s)?)));
            if let Some((eps, delta)) = nudge {
                let n = monopoly_nudge(s, eps, delta)?;
                pairs.push((
                    "nudge",
                    object(vec![
                        ("epsilon", q(eps)),
                        ("delta", q(delta)),
                        ("menu", qvv(&n.scenario.menu.items)),
                        ("pricing", pricing_json(&n.analysis)),
                        ("max_displacement", q(&n.max_displacement)),
                        ("bound", q(&n.bound)),
                    ]),
                ));
            }
        }
        Command::Veto => {
            let r = veto_undominated(s)?;
            let d = s.dim();
            let mut improved = s.menu.items.clone();
            for p in [zero_vec(d), unit_vec(d, r.favorite)] {
                if !improved.contains(&p) {
                    improved.push(p);
                }
            }
            pairs.push((
                "veto",
                object(vec![
                    ("undominated", json!(r.undominated)),
                    ("favorite", json!(r.favorite)),
                    ("favorite_allocation", qv(&unit_vec(d, r.favorite))),
                    ("candidate_improvement", if r.undominated { Value::Null } else { qvv(&improved) }),
                ]),
            ));
        }
        Command::Evaluate { sample, compare } => {
            let obj = require_objective(s)?;
            let value = expected_principal_utility(&s.menu, obj, &s.cone, sample)?;
            let mut eval = vec![("expected_utility", q(&value)), ("sample_size", json!(sample.types.len()))];
            if let Some(other) = compare {
                if other.space != s.space || other.cone != s.cone {
                    return Err(CoreError::Precondition(
                        "compared scenarios must share the allocation space and type cone".into(),
                    ));
                }
                let other_value = expected_principal_utility(&other.menu, obj, &s.cone, sample)?;
                let r = dominance_check(&s.menu, &other.menu, obj, &s.cone, sample)?;
                eval.push((
                    "comparison",
                    object(vec![
                        ("label", json!(other.label)),
                        ("expected_utility", q(&other_value)),
                        ("second_dominates", json!(r.second_dominates)),
                        ("counterexamples", json!(r.counterexamples)),
                        ("strict_gains", json!(r.strict_gains)),
                        ("note", json!("sample-level check: a necessary condition for domination only")),
                    ]),
                ));
            }
            pairs.push(("evaluation", object(eval)));
        }
    }
    Ok(Report(object(pairs)))
}

/// Runs the genericity experiment and reports its summary.
pub fn run_experiment(
    preset: ExperimentPreset,
    d: usize,
    k: usize,
    samples: usize,
    seed: u64,
    general_position: bool,
) -> Result<Report> {
    let r = genericity_experiment(preset, d, k, samples, seed, general_position)?;
    let name = match preset {
        ExperimentPreset::Simplex => "simplex",
        ExperimentPreset::Cube => "cube",
        ExperimentPreset::Strike2d => "strike2d",
    };
    let fraction = if r.generated == 0 {
        Value::Null
    } else {
        q(&Scalar::new((r.extreme as i64).into(), (r.generated as i64).into()))
    };
    Ok(Report(object(vec![
        ("command", json!("experiment")),
        ("preset", json!(name)),
        ("d", json!(r.d)),
        ("k", json!(r.k)),
        ("samples", json!(r.samples)),
        ("seed", json!(r.seed)),
        ("general_position", json!(general_position)),
        ("generated", json!(r.generated)),
        ("exhaustive", json!(r.exhaustive)),
        ("extreme", json!(r.extreme)),
        ("extreme_fraction", fraction),
        ("mean_deformation_dimension", q(&r.mean_deformation_dimension)),
    ])))
}

fn decimal(s: &Scalar) -> String {
    format!("{:.6}", to_f64(s))
}

/// Comma-separated decimal rows `set,x,y[,z]` for plotting: the vertices of `A`, the menu, `ext M`,
/// the polar rays and, when `M` decomposes, the vertices of both summands.
pub fn plot_rows(s: &Scenario, step: StepRule) -> Result<String> {
    let d = s.dim();
    if !(2..=3).contains(&d) {
        return Err(CoreError::Unsupported(format!("plot data needs d in {{2, 3}}, scenario has d = {d}")));
    }
    let m = s.extended_menu()?;
    let axes = ["x", "y", "z"];
    let mut out = String::from("# decimal values for display only; exact values are in the JSON report\n");
    out.push_str(&format!("set,{}\n", axes[..d].join(",")));
    let mut emit = |set: &str, pts: &[Vector]| {
        for p in pts {
            let cols: Vec<String> = p.iter().map(decimal).collect();
            out.push_str(&format!("{set},{}\n", cols.join(",")));
        }
    };
    emit("space_vertex", s.space.vertices());
    emit("menu_item", &s.menu.items);
    emit("menu_vertex", m.vertices());
    emit("polar_ray", m.polar_rays());
    if let ExtremalityVerdict::NotExtreme(dir) = is_extreme_finite(&m, &s.space)? {
        let cert = decomposition(s, &m, &dir, step)?;
        let plus = extend_menu(&Menu::new(cert.menu_plus.clone()), &s.cone, &s.space)?;
        let minus = extend_menu(&Menu::new(cert.menu_minus.clone()), &s.cone, &s.space)?;
        emit("summand_plus_vertex", plus.vertices());
        emit("summand_minus_vertex", minus.vertices());
    }
    Ok(out)
}

/// Writes the plot rows to `path` and reports what was written.
pub fn export_plotdata(s: &Scenario, step: StepRule, path: &Path) -> Result<Report> {
    let rows = plot_rows(s, step)?;
    std::fs::write(path, &rows)
        .map_err(|e| CoreError::Io { path: path.display().to_string(), message: e.to_string() })?;
    let count = rows.lines().filter(|l| !l.starts_with('#')).count() - 1;
    Ok(Report(object(vec![
        ("command", json!("plotdata")),
        ("scenario", scenario_json(s)),
        ("path", json!(path.display().to_string())),
        ("rows", json!(count)),
    ])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::golden_corpus;
    use menuex_geometry::scalar::ratio;
    use num_traits::Zero;

    const SIMPLEX: &str = r#"{"space": {"preset": "simplex", "d": 2}, "cone": "unrestricted",
        "menu": [["0", "1/2"], ["1/2", 0], ["1/2", "1/2"]]}"#;

    #[test]
    fn parses_presets() {
        let s = parse_scenario_str(SIMPLEX).unwrap();
        assert_eq!(s.menu.items.len(), 3);
        let mono = r#"{"space": {"preset": "monopoly", "m": 2, "kappa": 2}, "cone": "monopoly",
            "menu": [[0, 0, 0], [1, 1, "3/2"]], "veto": [0, 0, 0]}"#;
        let s = parse_scenario_str(mono).unwrap();
        assert_eq!(s.space.veto(), Some(&vec![Scalar::zero(); 3]));
    }

    #[test]
    fn rejects_bad_input() {
        let zero_den = SIMPLEX.replace("\"1/2\", 0", "\"1/0\", 0");
        assert!(matches!(parse_scenario_str(&zero_den), Err(CoreError::Parse { .. })));
        let unknown = SIMPLEX.replace("\"cone\"", "\"colour\": 1, \"cone\"");
        assert!(matches!(parse_scenario_str(&unknown), Err(CoreError::Parse { .. })));
        let preset = SIMPLEX.replace("simplex", "sphere");
        assert!(matches!(parse_scenario_str(&preset), Err(CoreError::Parse { field, .. }) if field == "space.preset"));
        let dim = SIMPLEX.replace("[\"1/2\", \"1/2\"]", "[\"1/2\", \"1/2\", 0]");
        assert!(matches!(parse_scenario_str(&dim), Err(CoreError::DimensionMismatch { .. })));
        let float = SIMPLEX.replace("\"1/2\", 0", "0.5, 0");
        assert!(matches!(parse_scenario_str(&float), Err(CoreError::Parse { .. })));
    }

    #[test]
    fn corpus_round_trips() {
        for c in golden_corpus().unwrap() {
            let text = serde_json::to_string(&emit_scenario(&c.scenario)).unwrap();
            assert_eq!(parse_scenario_str(&text).unwrap(), c.scenario, "{}", c.scenario.label);
        }
    }

    #[test]
    fn analyze_is_deterministic() {
        let s = parse_scenario_str(SIMPLEX).unwrap();
        let a = run_command(&Command::Analyze, &s).unwrap().to_json();
        let b = run_command(&Command::Analyze, &s).unwrap().to_json();
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["extremality"]["extreme"], json!(true));
        assert_eq!(v["planar"]["extreme"], json!(true));
    }

    #[test]
    fn classify2d_rejects_three_dimensions() {
        let s = crate::corpus::pyramid().unwrap();
        assert_eq!(run_command(&Command::Classify2d, &s).unwrap_err(), CoreError::NotPlanar(3));
        assert!(plot_rows(&crate::corpus::pyramid().unwrap(), StepRule::Half).is_ok());
    }

    #[test]
    fn samples_parse() {
        let t = parse_sample_str(r#"{"uniform": [[1, -1], ["1/2", -1]]}"#).unwrap();
        assert_eq!(t.types[0].1, ratio(1, 2));
        assert!(parse_sample_str(r#"{"types": [{"type": [1, -1], "weight": "1/3"}]}"#).is_err());
    }
}
