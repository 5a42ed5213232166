//! JSON formats and command implementations behind the `qtrans` binary.
//!
//! Every command returns a `serde_json::Value` built from structs with a
//! fixed field order, so identical inputs print byte-identical output.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use qtrans_core::arith::{format_rational, parse_rational};
use qtrans_core::fq_oracle::{self, DimEstimate};
use qtrans_core::groebner::{self, krull_dimension};
use qtrans_core::morphism::{self, QtReport};
use qtrans_core::padic::{self, IntegerPolyMap, LevelMeasure, QuotientWindow};
use qtrans_core::stratify::{self, AuditReport, LocallyClosed, PieceStatus, Poset, StratDatum};
use qtrans_core::{Error, Ideal, MonomialOrder, PolyRing, Polynomial, PolynomialMorphism, Rational};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Io(String),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 2 input error, 3 resource limit, 4 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::ResourceLimit(_) | Error::BudgetExceeded { .. }) => 3,
            CliError::Core(Error::DecompositionMismatch(_)) => 4,
            _ => 2,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Json(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn rationals(xs: &[Rational]) -> Vec<String> {
    xs.iter().map(format_rational).collect()
}

fn polys(xs: &[Polynomial]) -> Vec<String> {
    xs.iter().map(|p| p.to_string()).collect()
}

/// Nonzero generators in first-seen order, without repeats.
fn distinct_polys(xs: &[Polynomial]) -> Vec<String> {
    let mut seen = std::collections::BTreeSet::new();
    xs.iter().filter(|p| !p.is_zero()).map(|p| p.to_string()).filter(|s| seen.insert(s.clone())).collect()
}

pub fn parse_rational_list(text: &str) -> CliResult<Vec<Rational>> {
    text.split(',').map(|s| parse_rational(s.trim()).map_err(CliError::from)).collect()
}

pub fn parse_u64_list(text: &str) -> CliResult<Vec<u64>> {
    text.split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|_| CliError::Usage(format!("not a non-negative integer: {s:?}"))))
        .collect()
}

pub fn parse_order(text: &str) -> CliResult<MonomialOrder> {
    match text {
        "lex" => Ok(MonomialOrder::Lex),
        "grevlex" => Ok(MonomialOrder::Grevlex),
        other => Err(CliError::Usage(format!("unknown order {other:?}; expected lex or grevlex"))),
    }
}

// ---------------------------------------------------------------------------
// Morphisms and ideals

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorphismJson {
    pub source_vars: Vec<String>,
    pub components: Vec<String>,
}

impl MorphismJson {
    pub fn to_morphism(&self) -> CliResult<PolynomialMorphism> {
        if self.components.is_empty() {
            return Err(CliError::Usage("a morphism needs at least one component".into()));
        }
        Ok(PolynomialMorphism::parse(&self.source_vars, &self.components)?)
    }

    pub fn to_integer_map(&self) -> CliResult<IntegerPolyMap> {
        Ok(IntegerPolyMap::parse(&self.source_vars, &self.components)?)
    }

    pub fn from_morphism(phi: &PolynomialMorphism) -> Self {
        MorphismJson { source_vars: phi.ring().names().to_vec(), components: polys(phi.components()) }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdealJson {
    pub vars: Vec<String>,
    pub generators: Vec<String>,
}

impl IdealJson {
    pub fn to_ideal(&self) -> CliResult<Ideal> {
        let ring = PolyRing::new(&self.vars)?;
        Ok(Ideal::parse(&ring, &self.generators)?)
    }

    pub fn from_ideal(ideal: &Ideal) -> Self {
        IdealJson { vars: ideal.ring().names().to_vec(), generators: polys(ideal.gens()) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QtReportJson {
    pub fiber: Vec<String>,
    pub fiber_dimension: i64,
    pub source_dimension: usize,
    pub verdict: String,
}

impl From<&QtReport> for QtReportJson {
    fn from(r: &QtReport) -> Self {
        QtReportJson {
            fiber: rationals(&r.fiber),
            fiber_dimension: r.fiber_dimension,
            source_dimension: r.source_dimension,
            verdict: r.verdict.as_str().to_string(),
        }
    }
}

// ---------------------------------------------------------------------------
// Stratifications

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosetJson {
    pub elements: Vec<String>,
    /// `[a, b]` meaning `a ≤ b`.
    pub pairs: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PieceJson {
    pub closed: Vec<String>,
    pub excluded: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StratDatumJson {
    pub vars: Vec<String>,
    #[serde(default)]
    pub ambient: Option<PieceJson>,
    pub poset: PosetJson,
    pub pieces: BTreeMap<String, PieceJson>,
}

fn piece_json(p: &LocallyClosed) -> PieceJson {
    let excluded = if p.excluded.is_unit().unwrap_or(false) { Vec::new() } else { distinct_polys(p.excluded.gens()) };
    PieceJson { closed: distinct_polys(p.closed.gens()), excluded }
}

fn piece_from_json(ring: &Arc<PolyRing>, p: &PieceJson) -> CliResult<LocallyClosed> {
    let closed = Ideal::parse(ring, &p.closed)?;
    let excluded = if p.excluded.is_empty() { Ideal::unit(ring) } else { Ideal::parse(ring, &p.excluded)? };
    Ok(LocallyClosed::new(closed, excluded)?)
}

impl StratDatumJson {
    pub fn from_datum(d: &StratDatum) -> Self {
        let labels = d.poset.labels();
        let pairs = d.poset.covers().into_iter().map(|(a, b)| (labels[a].clone(), labels[b].clone())).collect();
        let pieces = labels.iter().cloned().zip(d.pieces.iter().map(piece_json)).collect();
        StratDatumJson {
            vars: d.ring().names().to_vec(),
            ambient: Some(piece_json(&d.ambient)),
            poset: PosetJson { elements: labels.to_vec(), pairs },
            pieces,
        }
    }

    pub fn to_datum(&self) -> CliResult<StratDatum> {
        let ring = PolyRing::new(&self.vars)?;
        let poset = Poset::from_labeled_pairs(self.poset.elements.clone(), &self.poset.pairs)?;
        let mut pieces = Vec::new();
        for label in &self.poset.elements {
            let p = self.pieces.get(label).ok_or_else(|| CliError::Usage(format!("no piece for label {label:?}")))?;
            pieces.push(piece_from_json(&ring, p)?);
        }
        if self.pieces.len() != pieces.len() {
            return Err(CliError::Usage("pieces and poset elements differ".into()));
        }
        let ambient = match &self.ambient {
            Some(a) => piece_from_json(&ring, a)?,
            None => LocallyClosed::whole(&ring),
        };
        Ok(StratDatum::new(ambient, poset, pieces)?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PieceAuditJson {
    pub label: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub codim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditJson {
    pub fiber: Vec<String>,
    pub fiber_dimension: i64,
    #[serde(rename = "verticallyExtendable")]
    pub vertically_extendable: Option<bool>,
    pub coarse: Option<bool>,
    #[serde(rename = "strongThom")]
    pub strong_thom: Option<bool>,
    pub pieces: Vec<PieceAuditJson>,
}

impl From<&AuditReport> for AuditJson {
    fn from(a: &AuditReport) -> Self {
        let pieces = a
            .pieces
            .iter()
            .map(|(label, st)| {
                let (status, codim, reason) = match st {
                    PieceStatus::Empty => ("empty", None, None),
                    PieceStatus::Audited { codim } => ("audited", Some(*codim), None),
                    PieceStatus::Unaudited(r) => ("unaudited", None, Some(r.clone())),
                };
                PieceAuditJson { label: label.clone(), status: status.into(), codim, reason }
            })
            .collect();
        AuditJson {
            fiber: rationals(&a.fiber),
            fiber_dimension: a.fiber_dimension,
            vertically_extendable: a.vertically_extendable,
            coarse: a.coarse,
            strong_thom: a.strong_thom,
            pieces,
        }
    }
}

// ---------------------------------------------------------------------------
// Measures

/// A measure file: explicit coset values or a recipe.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureInput {
    Values(MeasureJson),
    Recipe(Recipe),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureJson {
    pub p: u64,
    pub k: u32,
    pub d: usize,
    /// Coset tuple `"x1,x2"` to rational string.
    pub values: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "recipe", rename_all = "snake_case")]
pub enum Recipe {
    /// `mass`-weighted uniform measure on `center + p^scale Z_p^d`.
    HaarBall { p: u64, k: u32, d: usize, center: Vec<i64>, scale: u32, mass: String },
    /// `(x, xy)_*` of the normalized Haar measure on `p^n Z_p^2`.
    MuN { p: u64, n: u32, k: u32 },
    /// `μ_n * μ_n`.
    MuNSquared { p: u64, n: u32, k: u32 },
    /// `(x + z, xy + zw)_*` of the normalized Haar measure on `p^n Z_p^4`.
    PsiBall { p: u64, n: u32, k: u32 },
    /// `(x, xy)_*` of the normalized Haar measure on `(0, y0) + p^scale Z_p^2`.
    DirectionBall { p: u64, k: u32, scale: u32, y0: i64 },
}

/// Overrides applied to recipes from `--prime` / `--level`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeasureOverrides {
    pub prime: Option<u64>,
    pub level: Option<u32>,
}

impl MeasureInput {
    pub fn build(&self, ov: MeasureOverrides) -> CliResult<LevelMeasure> {
        match self {
            MeasureInput::Values(m) => {
                if ov.prime.is_some_and(|p| p != m.p) || ov.level.is_some_and(|k| k != m.k) {
                    return Err(CliError::Usage("--prime/--level disagree with the explicit measure".into()));
                }
                m.to_measure()
            }
            MeasureInput::Recipe(r) => r.build(ov),
        }
    }
}

impl Recipe {
    pub fn build(&self, ov: MeasureOverrides) -> CliResult<LevelMeasure> {
        let pick = |p: u64, k: u32| (ov.prime.unwrap_or(p), ov.level.unwrap_or(k));
        Ok(match self {
            Recipe::HaarBall { p, k, d, center, scale, mass } => {
                let (p, k) = pick(*p, *k);
                padic::haar_ball(p, k, *d, center, *scale, parse_rational(mass)?)?
            }
            Recipe::MuN { p, n, k } => {
                let (p, k) = pick(*p, *k);
                padic::mu_n(p, *n, k)?
            }
            Recipe::MuNSquared { p, n, k } => {
                let (p, k) = pick(*p, *k);
                let m = padic::mu_n(p, *n, k)?;
                padic::convolve(&m, &m)?
            }
            Recipe::PsiBall { p, n, k } => {
                let (p, k) = pick(*p, *k);
                padic::psi_ball_pushforward(p, *n, k)?
            }
            Recipe::DirectionBall { p, k, scale, y0 } => {
                let (p, k) = pick(*p, *k);
                padic::direction_ball(p, k, *scale, *y0)?
            }
        })
    }
}

impl MeasureJson {
    pub fn from_measure(m: &LevelMeasure) -> Self {
        let w = m.window();
        let values = m.values().iter().map(|(x, v)| (padic::format_point(x), format_rational(v))).collect();
        MeasureJson { p: w.p, k: w.k, d: w.d, values }
    }

    pub fn to_measure(&self) -> CliResult<LevelMeasure> {
        let window = QuotientWindow::new(self.p, self.k, self.d)?;
        let mut vals = Vec::with_capacity(self.values.len());
        for (x, v) in &self.values {
            vals.push((padic::parse_point(x)?, parse_rational(v)?));
        }
        Ok(LevelMeasure::from_values(window, vals)?)
    }
}

/// A list of measures for `germrank` / `supportgerms`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureFamily {
    pub measures: Vec<MeasureInput>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FourierEntry {
    pub dual: String,
    pub coefficients: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rational: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FourierJson {
    pub p: u64,
    pub k: u32,
    pub d: usize,
    pub points: Vec<FourierEntry>,
}

// ---------------------------------------------------------------------------
// Commands

pub fn cmd_qtcheck(m: &MorphismJson, fiber: Option<&[Rational]>, generic: bool) -> CliResult<Value> {
    let phi = m.to_morphism()?;
    #[derive(Serialize)]
    struct Generic {
        source_dimension: usize,
        generic_fiber_dimension: i64,
        verdict: String,
    }
    let mut out = serde_json::Map::new();
    if let Some(y) = fiber {
        let rep = morphism::qt_check_at(&phi, y)?;
        let v = serde_json::to_value(QtReportJson::from(&rep))?;
        if !generic {
            return Ok(v);
        }
        out.insert("fiber_report".into(), v);
    }
    if generic || fiber.is_none() {
        let d = morphism::generic_fiber_dimension(&phi)?;
        let n = phi.source_dim();
        let verdict = if d <= n as i64 { "quasi_transitive_at_fiber" } else { "not_quasi_transitive_at_fiber" };
        let g = Generic { source_dimension: n, generic_fiber_dimension: d, verdict: verdict.into() };
        if fiber.is_none() {
            return Ok(serde_json::to_value(g)?);
        }
        out.insert("generic".into(), serde_json::to_value(g)?);
    }
    Ok(Value::Object(out))
}

pub fn cmd_kernel(m: &MorphismJson) -> CliResult<Value> {
    let phi = m.to_morphism()?;
    let fields = morphism::kernel_vector_fields(&phi)?;
    #[derive(Serialize)]
    struct Out {
        source_vars: Vec<String>,
        fields: Vec<Vec<String>>,
    }
    let fields = fields.generators().iter().map(|v| polys(v)).collect();
    Ok(serde_json::to_value(Out { source_vars: phi.ring().names().to_vec(), fields })?)
}

pub fn cmd_bphi(m: &MorphismJson) -> CliResult<Value> {
    let phi = m.to_morphism()?;
    let b = morphism::b_phi_ideal(&phi)?;
    let dim = krull_dimension(b.ideal())?;
    #[derive(Serialize)]
    struct Out {
        #[serde(flatten)]
        ideal: IdealJson,
        dimension: i64,
    }
    Ok(serde_json::to_value(Out { ideal: IdealJson::from_ideal(b.ideal()), dimension: dim })?)
}

pub fn cmd_conormal(i: &IdealJson, codim: usize) -> CliResult<Value> {
    let ideal = i.to_ideal()?;
    let c = morphism::conormal_ideal(&ideal, codim)?;
    Ok(serde_json::to_value(IdealJson::from_ideal(&c.canonical()?))?)
}

pub fn cmd_dim(i: &IdealJson) -> CliResult<Value> {
    let ideal = i.to_ideal()?;
    #[derive(Serialize)]
    struct Out {
        dimension: i64,
    }
    Ok(serde_json::to_value(Out { dimension: krull_dimension(&ideal)? })?)
}

pub fn cmd_gb(i: &IdealJson, order: &MonomialOrder) -> CliResult<Value> {
    let ideal = i.to_ideal()?;
    let gb = groebner::groebner_basis(&ideal, order)?;
    #[derive(Serialize)]
    struct Out {
        vars: Vec<String>,
        order: String,
        basis: Vec<String>,
    }
    Ok(serde_json::to_value(Out {
        vars: i.vars.clone(),
        order: order.name().to_string(),
        basis: polys(gb.polynomials()),
    })?)
}

/// `stratify` accepts either a map to the line (functorial stratification)
/// or an existing stratification (validation only).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum StratifyInput {
    Morphism(MorphismJson),
    Datum(StratDatumJson),
}

pub fn cmd_stratify(input: &StratifyInput, audit_fiber: Option<&[Rational]>) -> CliResult<Value> {
    #[derive(Serialize)]
    struct Validation {
        valid: bool,
        disjoint: bool,
        covering: bool,
        continuous: bool,
        inside_ambient: bool,
        violations: Vec<String>,
    }
    let validation = |d: &StratDatum| -> CliResult<Validation> {
        let r = stratify::validate_stratification(d)?;
        Ok(Validation {
            valid: r.is_valid(),
            disjoint: r.disjoint,
            covering: r.covering,
            continuous: r.continuous,
            inside_ambient: r.inside_ambient,
            violations: r.violations,
        })
    };
    match input {
        StratifyInput::Datum(dj) => {
            if audit_fiber.is_some() {
                return Err(CliError::Usage("--audit-fiber needs a map, not a stratification".into()));
            }
            let d = dj.to_datum()?;
            Ok(serde_json::to_value(validation(&d)?)?)
        }
        StratifyInput::Morphism(mj) => {
            let phi = mj.to_morphism()?;
            if phi.target_dim() != 1 {
                return Err(CliError::Core(Error::PresentationUnsupported("stratify needs a map to the line".into())));
            }
            let sm = stratify::functorial_stratify(&phi)?;
            let reg = stratify::regularity_audit(&sm)?;
            #[derive(Serialize)]
            struct Regularity {
                regular: bool,
                maps_into: bool,
                monotone: bool,
                smooth: Vec<bool>,
                submersive: Vec<bool>,
            }
            #[derive(Serialize)]
            struct Out {
                map: MorphismJson,
                source: StratDatumJson,
                target: StratDatumJson,
                alpha: BTreeMap<String, String>,
                source_validation: Validation,
                target_validation: Validation,
                regularity: Regularity,
                #[serde(skip_serializing_if = "Option::is_none")]
                audit: Option<AuditJson>,
            }
            let src_labels = sm.source.poset.labels();
            let tgt_labels = sm.target.poset.labels();
            let alpha = sm.alpha.iter().enumerate().map(|(i, &j)| (src_labels[i].clone(), tgt_labels[j].clone())).collect();
            let audit = match audit_fiber {
                Some(y) => Some(AuditJson::from(&stratify::coarse_and_vertical_audit(&phi, &sm.source, y)?)),
                None => None,
            };
            Ok(serde_json::to_value(Out {
                map: MorphismJson::from_morphism(&phi),
                source: StratDatumJson::from_datum(&sm.source),
                target: StratDatumJson::from_datum(&sm.target),
                alpha,
                source_validation: validation(&sm.source)?,
                target_validation: validation(&sm.target)?,
                regularity: Regularity {
                    regular: reg.is_regular(),
                    maps_into: reg.maps_into,
                    monotone: reg.monotone,
                    smooth: reg.smooth.clone(),
                    submersive: reg.submersive.clone(),
                },
                audit,
            })?)
        }
    }
}

pub fn cmd_push(mu: &MeasureInput, map: &MorphismJson, ov: MeasureOverrides, restrict: Option<u32>) -> CliResult<Value> {
    let m = mu.build(ov)?;
    let f = map.to_integer_map()?;
    let mut out = padic::pushforward(&m, &f)?;
    if let Some(n) = restrict {
        out = padic::restrict(&out, n)?;
    }
    Ok(serde_json::to_value(MeasureJson::from_measure(&out))?)
}

pub fn cmd_fourier(mu: &MeasureInput, ov: MeasureOverrides, restrict: Option<u32>) -> CliResult<Value> {
    let mut m = mu.build(ov)?;
    if let Some(n) = restrict {
        m = padic::restrict(&m, n)?;
    }
    let w = m.window().clone();
    let points = padic::fourier(&m)?
        .into_iter()
        .map(|(j, c)| FourierEntry {
            dual: padic::format_point(&j),
            coefficients: rationals(c.coeffs()),
            rational: c.as_rational().ok().map(|r| format_rational(&r)),
        })
        .collect();
    Ok(serde_json::to_value(FourierJson { p: w.p, k: w.k, d: w.d, points })?)
}

fn build_family(f: &MeasureFamily, ov: MeasureOverrides) -> CliResult<Vec<LevelMeasure>> {
    f.measures.iter().map(|m| m.build(ov)).collect()
}

pub fn cmd_germrank(f: &MeasureFamily, ov: MeasureOverrides, restrict: u32) -> CliResult<Value> {
    let ms = build_family(f, ov)?;
    #[derive(Serialize)]
    struct Out {
        restrict: u32,
        measures: usize,
        germ_rank: usize,
    }
    Ok(serde_json::to_value(Out { restrict, measures: ms.len(), germ_rank: padic::germ_rank(&ms, restrict)? })?)
}

pub fn cmd_supportgerms(f: &MeasureFamily, ov: MeasureOverrides, restrict: u32) -> CliResult<Value> {
    let ms = build_family(f, ov)?;
    #[derive(Serialize)]
    struct Out {
        restrict: u32,
        measures: usize,
        support_germs: usize,
    }
    Ok(serde_json::to_value(Out { restrict, measures: ms.len(), support_germs: padic::support_germs(&ms, restrict)? })?)
}

pub fn cmd_oracle_dim(i: &IdealJson, primes: &[u64], budget: u64) -> CliResult<Value> {
    let ideal = i.to_ideal()?;
    let est = fq_oracle::estimate_dimension(&ideal, primes, budget)?;
    Ok(serde_json::to_value(DimEstimateJson::from(&est))?)
}

#[derive(Debug, Clone, Serialize)]
pub struct CountJson {
    pub prime: u64,
    pub count: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DimEstimateJson {
    pub estimate: i64,
    pub slope: Option<f64>,
    pub consistent: bool,
    pub counts: Vec<CountJson>,
    pub skipped: Vec<u64>,
}

impl From<&DimEstimate> for DimEstimateJson {
    fn from(e: &DimEstimate) -> Self {
        DimEstimateJson {
            estimate: e.estimate,
            slope: e.slope.map(|s| (s * 1e6).round() / 1e6),
            consistent: e.consistent,
            counts: e.counts.iter().map(|c| CountJson { prime: c.prime, count: c.count }).collect(),
            skipped: e.skipped.clone(),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}
