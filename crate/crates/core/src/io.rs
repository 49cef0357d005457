//! JSON instance files, stream-order resolution and run reports.
//!
//! Weights are decimal strings (`"1.25"`) or fractions (`"5/4"`) in instance
//! files and `"num/den"` strings in reports, each paired with an `*_approx`
//! float for readability. Every JSON object is emitted with sorted keys.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::instance::{check_permutation, Element, Instance};
use crate::matroid::{ElementId, ElementSet, Matroid};
use crate::oracles::{approximation_ratio, ApproxRatio};
use crate::scalar::Scalar;
use crate::streaming::{
    memory_bound, run_exact, run_streaming, run_streaming_k, MemoryBound, StreamParams, StreamReport, YBound,
};
use crate::submodular::{run_submodular, Objective, SubmodularParams};
use crate::Rational;

/// Parses `"-12.5e-1"`-style decimals and `"n/d"` fractions exactly.
pub fn parse_rational(text: &str) -> std::result::Result<Rational, String> {
    let bad = || format!("{text:?} is not a decimal or n/d fraction");
    if let Some((n, d)) = text.split_once('/') {
        let n = parse_int(n).ok_or_else(bad)?;
        let d = parse_int(d).ok_or_else(bad)?;
        if !d.is_positive() {
            return Err(format!("{text:?} has a non-positive denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(p) => (&text[..p], text[p + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if int_part.len() + frac_part.len() == 0 || !all_digits(int_part) || !all_digits(frac_part) {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::parse_bytes(joined.as_bytes(), 10).ok_or_else(bad)?);
    let shift = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, shift.unsigned_abs() as usize);
    }
    Ok(if negative { -value } else { value })
}

fn parse_int(text: &str) -> Option<BigInt> {
    let digits = text.strip_prefix('-').unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::parse_bytes(text.as_bytes(), 10)
}

/// Canonical file form: a plain decimal when the expansion terminates,
/// otherwise `n/d`.
pub fn format_decimal(value: &Rational) -> String {
    if value.is_integer() {
        return value.numer().to_string();
    }
    let mut rest = value.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&rest % &two).is_zero() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return ratio_string(value);
    }
    let places = twos.max(fives);
    let scaled = value * Rational::from_integer(num_traits::pow(BigInt::from(10), places));
    let digits = scaled.numer().abs().to_string();
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = padded.split_at(padded.len() - places);
    let sign = if value.is_negative() { "-" } else { "" };
    format!("{sign}{int_part}.{frac_part}")
}

/// Always `num/den`, including integers (`"3/1"`).
pub fn ratio_string(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

struct Dec(Rational);

impl<'de> Deserialize<'de> for Dec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct DecVisitor;

        impl Visitor<'_> for DecVisitor {
            type Value = Dec;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a decimal string such as \"1.25\" or a fraction such as \"5/4\"")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Dec, E> {
                parse_rational(v).map(Dec).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Dec, E> {
                Ok(Dec(Rational::from_integer(v.into())))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Dec, E> {
                Ok(Dec(Rational::from_integer(v.into())))
            }
        }

        d.deserialize_any(DecVisitor)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    #[serde(default)]
    meta: BTreeMap<String, Value>,
    elements: Vec<ElementFile>,
    matroids: Vec<MatroidFile>,
    #[serde(default)]
    objective: Option<ObjectiveFile>,
    #[serde(default)]
    stream_order: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementFile {
    id: String,
    weight: Dec,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum MatroidFile {
    Partition {
        blocks: Vec<Vec<String>>,
        capacities: Vec<usize>,
    },
    Uniform {
        k: usize,
    },
    Graphic {
        vertices: usize,
        edges: BTreeMap<String, (usize, usize)>,
    },
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum ObjectiveFile {
    Linear,
    Coverage {
        sets: BTreeMap<String, Vec<String>>,
        item_weights: BTreeMap<String, Dec>,
    },
    Cut {
        vertices: usize,
        #[serde(default)]
        toggles: BTreeMap<String, Vec<usize>>,
        edge_weights: Vec<(usize, usize, Dec)>,
    },
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for segment in path.iter() {
        out.push('/');
        match segment {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

fn at(path: impl Into<String>) -> impl FnOnce(Error) -> Error {
    let path = path.into();
    move |e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(path, other.to_string()),
    }
}

/// Parses and validates an instance file. Every failure is a parse error
/// carrying the JSON pointer of the offending value.
pub fn parse_instance(bytes: &[u8]) -> Result<Instance<Rational>> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let file: InstanceFile = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| Error::parse(pointer(e.path()), e.inner().to_string()))?;
    de.end().map_err(|e| Error::parse("", e.to_string()))?;
    build_instance(file)
}

fn build_instance(file: InstanceFile) -> Result<Instance<Rational>> {
    let n = file.elements.len();
    let mut index = HashMap::new();
    let mut elements = Vec::with_capacity(n);
    for (i, e) in file.elements.into_iter().enumerate() {
        if index.insert(e.id.clone(), i).is_some() {
            return Err(Error::parse(
                format!("/elements/{i}/id"),
                format!("duplicate element id {:?}", e.id),
            ));
        }
        if e.weight.0.is_negative() {
            return Err(Error::parse(
                format!("/elements/{i}/weight"),
                "weight must be non-negative",
            ));
        }
        elements.push(Element {
            id: e.id,
            weight: e.weight.0,
        });
    }
    let lookup = |id: &str, path: String| -> Result<ElementId> {
        index
            .get(id)
            .copied()
            .ok_or_else(|| Error::parse(path, format!("unknown element id {id:?}")))
    };
    if file.matroids.is_empty() {
        return Err(Error::parse("/matroids", "an instance needs at least one matroid"));
    }
    let mut matroids = Vec::with_capacity(file.matroids.len());
    for (m, desc) in file.matroids.into_iter().enumerate() {
        let matroid = match desc {
            MatroidFile::Partition { blocks, capacities } => {
                let mut resolved = Vec::with_capacity(blocks.len());
                for (b, block) in blocks.iter().enumerate() {
                    let ids = block
                        .iter()
                        .enumerate()
                        .map(|(j, id)| lookup(id, format!("/matroids/{m}/blocks/{b}/{j}")))
                        .collect::<Result<Vec<_>>>()?;
                    resolved.push(ids);
                }
                Matroid::partition(n, resolved, capacities).map_err(at(format!("/matroids/{m}")))?
            }
            MatroidFile::Uniform { k } => Matroid::uniform(n, k),
            MatroidFile::Graphic { vertices, edges } => {
                let mut ends = vec![None; n];
                for (id, uv) in &edges {
                    let e = lookup(id, format!("/matroids/{m}/edges/{id}"))?;
                    ends[e] = Some(*uv);
                }
                let ends = ends
                    .into_iter()
                    .enumerate()
                    .map(|(e, uv)| {
                        uv.ok_or_else(|| {
                            Error::parse(
                                format!("/matroids/{m}/edges"),
                                format!("element {:?} has no edge", elements[e].id),
                            )
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Matroid::graphic(vertices, ends).map_err(at(format!("/matroids/{m}")))?
            }
        };
        matroids.push(matroid);
    }
    let objective = match file.objective {
        None | Some(ObjectiveFile::Linear) => Objective::Linear(elements.iter().map(|e| e.weight.clone()).collect()),
        Some(ObjectiveFile::Coverage { sets, item_weights }) => {
            let item_names: Vec<String> = item_weights.keys().cloned().collect();
            let item_index: HashMap<&str, usize> =
                item_names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
            let mut resolved = vec![Vec::new(); n];
            for (id, items) in &sets {
                let e = lookup(id, format!("/objective/sets/{id}"))?;
                let mut list = items
                    .iter()
                    .enumerate()
                    .map(|(j, item)| {
                        item_index.get(item.as_str()).copied().ok_or_else(|| {
                            Error::parse(format!("/objective/sets/{id}/{j}"), format!("unknown item {item:?}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                list.sort_unstable();
                list.dedup();
                resolved[e] = list;
            }
            Objective::Coverage {
                sets: resolved,
                item_names,
                item_weights: item_weights.into_values().map(|d| d.0).collect(),
            }
        }
        Some(ObjectiveFile::Cut {
            vertices,
            toggles,
            edge_weights,
        }) => {
            let mut resolved = vec![Vec::new(); n];
            for (id, vs) in &toggles {
                let e = lookup(id, format!("/objective/toggles/{id}"))?;
                let mut vs = vs.clone();
                vs.sort_unstable();
                vs.dedup();
                resolved[e] = vs;
            }
            Objective::Cut {
                vertices,
                toggles: resolved,
                edges: edge_weights.into_iter().map(|(u, v, w)| (u, v, w.0)).collect(),
            }
        }
    };
    let stream_order = match file.stream_order {
        None => None,
        Some(ids) => {
            let order = ids
                .iter()
                .enumerate()
                .map(|(j, id)| lookup(id, format!("/stream_order/{j}")))
                .collect::<Result<Vec<_>>>()?;
            check_permutation(&order, n).map_err(at("/stream_order"))?;
            Some(order)
        }
    };
    let inst = Instance {
        elements,
        matroids,
        objective,
        stream_order,
        meta: file.meta,
    };
    inst.validate().map_err(at("/objective"))?;
    Ok(inst)
}

/// The canonical instance-file form; parsing it gives back an equal instance.
pub fn instance_to_json(inst: &Instance<Rational>) -> Value {
    let name = |e: ElementId| Value::String(inst.name(e).to_string());
    let names = |ids: &[ElementId]| Value::Array(ids.iter().map(|&e| name(e)).collect());
    let elements: Vec<Value> = inst
        .elements
        .iter()
        .map(|e| json!({"id": e.id, "weight": format_decimal(&e.weight)}))
        .collect();
    let matroids: Vec<Value> = inst
        .matroids
        .iter()
        .map(|m| {
            if let Some((blocks, caps)) = m.as_partition() {
                let blocks: Vec<Value> = blocks.iter().map(|b| names(b)).collect();
                json!({"type": "partition", "blocks": blocks, "capacities": caps})
            } else if let Some(k) = m.as_uniform() {
                json!({"type": "uniform", "k": k})
            } else {
                let (vertices, edges) = m.as_graphic().expect("three matroid kinds");
                let edges: Map<String, Value> = edges
                    .iter()
                    .enumerate()
                    .map(|(e, (u, v))| (inst.name(e).to_string(), json!([u, v])))
                    .collect();
                json!({"type": "graphic", "vertices": vertices, "edges": edges})
            }
        })
        .collect();
    let objective = match &inst.objective {
        Objective::Linear(_) => json!({"type": "linear"}),
        Objective::Coverage {
            sets,
            item_names,
            item_weights,
        } => {
            let sets: Map<String, Value> = sets
                .iter()
                .enumerate()
                .map(|(e, items)| {
                    let items: Vec<Value> = items.iter().map(|&i| Value::String(item_names[i].clone())).collect();
                    (inst.name(e).to_string(), Value::Array(items))
                })
                .collect();
            let weights: Map<String, Value> = item_names
                .iter()
                .zip(item_weights)
                .map(|(name, w)| (name.clone(), Value::String(format_decimal(w))))
                .collect();
            json!({"type": "coverage", "sets": sets, "item_weights": weights})
        }
        Objective::Cut {
            vertices,
            toggles,
            edges,
        } => {
            let toggles: Map<String, Value> = toggles
                .iter()
                .enumerate()
                .map(|(e, vs)| (inst.name(e).to_string(), json!(vs)))
                .collect();
            let edges: Vec<Value> = edges.iter().map(|(u, v, w)| json!([u, v, format_decimal(w)])).collect();
            json!({"type": "cut", "vertices": vertices, "toggles": toggles, "edge_weights": edges})
        }
    };
    let mut out = Map::new();
    out.insert("meta".into(), Value::Object(inst.meta.clone().into_iter().collect()));
    out.insert("elements".into(), Value::Array(elements));
    out.insert("matroids".into(), Value::Array(matroids));
    out.insert("objective".into(), objective);
    if let Some(order) = &inst.stream_order {
        out.insert("stream_order".into(), names(order));
    }
    Value::Object(out)
}

/// Pretty-printed JSON with sorted keys and a trailing newline.
pub fn to_canonical_bytes(value: &Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(&sort_keys(value)).expect("JSON values always serialize");
    bytes.push(b'\n');
    bytes
}

fn sort_keys(value: &Value) -> Value {
    match value {
        Value::Object(map) => {
            let sorted: BTreeMap<&String, Value> = map.iter().map(|(k, v)| (k, sort_keys(v))).collect();
            Value::Object(sorted.into_iter().map(|(k, v)| (k.clone(), v)).collect())
        }
        Value::Array(items) => Value::Array(items.iter().map(sort_keys).collect()),
        other => other.clone(),
    }
}

/// How to order the stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderMode {
    /// The instance's `stream_order`, or element-list order.
    File,
    Reverse,
    /// Seeded Fisher–Yates shuffle of the file order.
    Shuffle(u64),
}

impl FromStr for OrderMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "file" => Ok(OrderMode::File),
            "reverse" => Ok(OrderMode::Reverse),
            _ => s
                .strip_prefix("shuffle:")
                .and_then(|seed| seed.parse().ok())
                .map(OrderMode::Shuffle)
                .ok_or_else(|| Error::Parameter(format!("order must be file, reverse or shuffle:<seed>, got {s:?}"))),
        }
    }
}

impl fmt::Display for OrderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderMode::File => f.write_str("file"),
            OrderMode::Reverse => f.write_str("reverse"),
            OrderMode::Shuffle(seed) => write!(f, "shuffle:{seed}"),
        }
    }
}

pub fn resolve_order<S: Scalar>(inst: &Instance<S>, mode: OrderMode) -> Vec<ElementId> {
    let mut order = inst.file_order();
    match mode {
        OrderMode::File => {}
        OrderMode::Reverse => order.reverse(),
        OrderMode::Shuffle(seed) => order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed)),
    }
    order
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Exact,
    Streaming,
    StreamingK,
    Submodular,
}

impl Algorithm {
    pub fn tag(&self) -> &'static str {
        match self {
            Algorithm::Exact => "exact",
            Algorithm::Streaming => "streaming",
            Algorithm::StreamingK => "streaming_k",
            Algorithm::Submodular => "submodular",
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Algorithm::Exact),
            "streaming" => Ok(Algorithm::Streaming),
            "streaming-k" | "streaming_k" => Ok(Algorithm::StreamingK),
            "submodular" => Ok(Algorithm::Submodular),
            _ => Err(Error::Parameter(format!(
                "algorithm must be exact, streaming, streaming-k or submodular, got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunParams {
    Exact,
    Stream(StreamParams<Rational>),
    Submodular(SubmodularParams<Rational>),
}

/// Raw textual parameters as given on a command line or in a bench manifest.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamArgs {
    pub epsilon: Option<String>,
    pub alpha: Option<String>,
    pub y: Option<String>,
    pub q: Option<String>,
    pub delta: Option<String>,
    pub seed: Option<u64>,
}

/// Named alpha values accepted wherever a rational is expected.
pub fn parse_param(name: &str, text: &str) -> Result<Rational> {
    match text {
        "1+1/sqrt2" => Ok(crate::submodular::monotone_alpha()),
        "1+sqrt3/2" => Ok(crate::submodular::non_monotone_alpha()),
        _ => parse_rational(text).map_err(|e| Error::Parameter(format!("--{name}: {e}"))),
    }
}

fn parse_y(text: &str) -> Result<YBound<Rational>> {
    match text {
        "inf" | "infinity" => Ok(YBound::Infinite),
        _ => parse_param("y", text).map(YBound::Finite),
    }
}

impl ParamArgs {
    /// Resolves the parameters of `algorithm`. `--epsilon` alone selects the
    /// default schedule `alpha = 1 + eps`, `y = min rank / eps^2`.
    pub fn resolve(&self, inst: &Instance<Rational>, algorithm: Algorithm) -> Result<RunParams> {
        let get = |name: &str, v: &Option<String>| v.as_deref().map(|t| parse_param(name, t)).transpose();
        let epsilon = get("epsilon", &self.epsilon)?;
        let alpha = get("alpha", &self.alpha)?;
        let y = self.y.as_deref().map(parse_y).transpose()?;
        let q = get("q", &self.q)?;
        let delta = get("delta", &self.delta)?;
        let reject = |present: bool, what: &str| -> Result<()> {
            if present {
                Err(Error::Parameter(format!(
                    "{what} does not apply to the {} algorithm",
                    algorithm.tag()
                )))
            } else {
                Ok(())
            }
        };
        match algorithm {
            Algorithm::Exact => {
                reject(
                    epsilon.is_some() || alpha.is_some() || y.is_some(),
                    "--epsilon/--alpha/--y",
                )?;
                reject(
                    q.is_some() || delta.is_some() || self.seed.is_some(),
                    "--q/--delta/--seed",
                )?;
                Ok(RunParams::Exact)
            }
            Algorithm::Streaming | Algorithm::StreamingK => {
                reject(
                    q.is_some() || delta.is_some() || self.seed.is_some(),
                    "--q/--delta/--seed",
                )?;
                let params = match (epsilon, alpha) {
                    (Some(_), Some(_)) => {
                        return Err(Error::Parameter("give either --epsilon or --alpha, not both".into()))
                    }
                    (Some(eps), None) => {
                        let mut p = StreamParams::from_epsilon(eps, &inst.ranks())?;
                        if let Some(y) = y {
                            p.y = y;
                        }
                        p
                    }
                    (None, Some(alpha)) => StreamParams::new(alpha, y.unwrap_or(YBound::Infinite)),
                    (None, None) => return Err(Error::Parameter("streaming runs need --epsilon or --alpha".into())),
                };
                params.validate()?;
                Ok(RunParams::Stream(params))
            }
            Algorithm::Submodular => {
                let alpha = match (epsilon, alpha) {
                    (Some(_), Some(_)) => {
                        return Err(Error::Parameter("give either --epsilon or --alpha, not both".into()))
                    }
                    (Some(eps), None) => Rational::one() + eps,
                    (None, Some(alpha)) => alpha,
                    (None, None) => return Err(Error::Parameter("submodular runs need --epsilon or --alpha".into())),
                };
                let delta = delta.ok_or_else(|| Error::Parameter("submodular runs need --delta".into()))?;
                let mut params = SubmodularParams::with_delta(
                    alpha,
                    q.unwrap_or_else(Rational::one),
                    delta,
                    &inst.ranks(),
                    self.seed.unwrap_or(0),
                );
                if let Some(y) = y {
                    params.y = y;
                }
                Ok(RunParams::Submodular(params))
            }
        }
    }
}

/// Dispatches one run.
pub fn run_algorithm(
    inst: &Instance<Rational>,
    algorithm: Algorithm,
    order: &[ElementId],
    params: &RunParams,
) -> Result<StreamReport<Rational>> {
    match (algorithm, params) {
        (Algorithm::Exact, RunParams::Exact) => run_exact(inst, order),
        (Algorithm::Streaming, RunParams::Stream(p)) => run_streaming(inst, order, p),
        (Algorithm::StreamingK, RunParams::Stream(p)) => run_streaming_k(inst, order, p),
        (Algorithm::Submodular, RunParams::Submodular(p)) => run_submodular(inst, order, p),
        _ => Err(Error::Parameter(format!(
            "parameters do not match the {} algorithm",
            algorithm.tag()
        ))),
    }
}

/// A finished run plus everything needed to describe it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub algorithm: Algorithm,
    pub fixture: String,
    pub order: OrderMode,
    pub params: RunParams,
    pub element_ids: Vec<String>,
    pub stream: StreamReport<Rational>,
    pub opt: Option<(ElementSet, Rational)>,
    pub wall_time: Option<Duration>,
}

impl RunReport {
    /// Runs `algorithm` on `inst` and wraps the outcome. The fixture name is
    /// `meta.name` when present.
    pub fn execute(
        inst: &Instance<Rational>,
        algorithm: Algorithm,
        order: OrderMode,
        params: RunParams,
        fallback_name: &str,
    ) -> Result<Self> {
        let stream = run_algorithm(inst, algorithm, &resolve_order(inst, order), &params)?;
        let fixture = inst
            .meta
            .get("name")
            .and_then(Value::as_str)
            .unwrap_or(fallback_name)
            .to_string();
        Ok(RunReport {
            algorithm,
            fixture,
            order,
            params,
            element_ids: inst.elements.iter().map(|e| e.id.clone()).collect(),
            stream,
            opt: None,
            wall_time: None,
        })
    }

    /// Records the optimum and the achieved ratio against it.
    pub fn with_opt(mut self, opt: (ElementSet, Rational)) -> Self {
        self.stream.ratio_vs_opt = Some(approximation_ratio(&opt.1, &self.stream.objective_value));
        self.opt = Some(opt);
        self
    }

    pub fn certified(&self) -> bool {
        self.stream.certified
    }
}

fn rational_fields(out: &mut Map<String, Value>, key: &str, value: &Rational) {
    out.insert(key.to_string(), Value::String(ratio_string(value)));
    out.insert(format!("{key}_approx"), json!(value.approx_f64()));
}

fn rational_value(value: &Rational) -> Value {
    json!({"exact": ratio_string(value), "approx": value.approx_f64()})
}

fn y_value(y: &YBound<Rational>) -> Value {
    match y {
        YBound::Finite(y) => rational_value(y),
        YBound::Infinite => Value::String("inf".into()),
    }
}

fn params_json(params: &RunParams) -> Value {
    match params {
        RunParams::Exact => json!({"alpha": rational_value(&Rational::one()), "y": "inf"}),
        RunParams::Stream(p) => json!({
            "alpha": rational_value(&p.alpha),
            "y": y_value(&p.y),
            "epsilon": p.epsilon.as_ref().map(rational_value),
        }),
        RunParams::Submodular(p) => json!({
            "alpha": rational_value(&p.alpha),
            "y": y_value(&p.y),
            "q": rational_value(&p.q),
            "delta": rational_value(&p.delta),
            "seed": p.seed,
            "guarantee_mode": p.guarantee_mode(),
        }),
    }
}

/// The part of a report that depends only on what the run computed, not on
/// which entry point produced it.
pub fn result_json(stream: &StreamReport<Rational>, ids: &[String]) -> Value {
    let name = |e: ElementId| Value::String(ids[e].clone());
    let state = &stream.final_state;
    let stack: Vec<Value> = state
        .entries()
        .map(|x| {
            let mut entry = Map::new();
            entry.insert("id".into(), name(x.element));
            entry.insert("arrival".into(), json!(x.arrival));
            rational_fields(&mut entry, "weight", &x.weight);
            rational_fields(&mut entry, "g", &x.gain);
            entry.insert(
                "w".into(),
                Value::Array(x.w.iter().map(|w| Value::String(ratio_string(w))).collect()),
            );
            Value::Object(entry)
        })
        .collect();
    let t: Vec<Value> = (0..state.k())
        .map(|i| {
            let mut members = state.t(i).to_vec();
            members.sort_unstable();
            Value::Array(members.into_iter().map(name).collect())
        })
        .collect();
    let mut out = Map::new();
    out.insert("stack".into(), Value::Array(stack));
    out.insert("t".into(), Value::Array(t));
    out.insert(
        "solution".into(),
        Value::Array(stream.solution.iter().map(|&e| name(e)).collect()),
    );
    out.insert(
        "solution_kind".into(),
        Value::String(if stream.certified { "kernel" } else { "heuristic" }.into()),
    );
    rational_fields(&mut out, "solution_weight", &stream.solution_weight);
    rational_fields(&mut out, "objective_value", &stream.objective_value);
    rational_fields(&mut out, "g_alive", &stream.g_alive);
    rational_fields(&mut out, "g_all", &stream.g_all);
    out.insert("peak_stack".into(), json!(stream.peak_stack));
    out.insert(
        "memory_bound".into(),
        match stream.memory_bound {
            MemoryBound::Bounded(b) => json!(b),
            MemoryBound::Unbounded => Value::String("unbounded".into()),
        },
    );
    out.insert("selected_count".into(), json!(state.stats.selected_count));
    out.insert("deleted_count".into(), json!(state.stats.deleted_count));
    out.insert("skipped".into(), json!(stream.skipped));
    Value::Object(out)
}

pub fn report_json(report: &RunReport) -> Value {
    let mut out = Map::new();
    out.insert("algorithm".into(), Value::String(report.algorithm.tag().into()));
    out.insert("fixture".into(), Value::String(report.fixture.clone()));
    out.insert("order".into(), Value::String(report.order.to_string()));
    out.insert("params".into(), params_json(&report.params));
    out.insert("seed".into(), json!(report.stream.seed));
    out.insert("solution_certified".into(), json!(report.stream.certified));
    out.insert("result".into(), result_json(&report.stream, &report.element_ids));
    if let Some((set, weight)) = &report.opt {
        let mut opt = Map::new();
        opt.insert(
            "solution".into(),
            Value::Array(
                set.iter()
                    .map(|&e| Value::String(report.element_ids[e].clone()))
                    .collect(),
            ),
        );
        rational_fields(&mut opt, "weight", weight);
        match &report.stream.ratio_vs_opt {
            Some(ApproxRatio::Finite(r)) => rational_fields(&mut opt, "ratio", r),
            _ => {
                opt.insert("ratio".into(), Value::String("inf".into()));
            }
        }
        out.insert("opt".into(), Value::Object(opt));
    }
    if let Some(t) = report.wall_time {
        out.insert("wall_time_ms".into(), json!(t.as_secs_f64() * 1e3));
    }
    Value::Object(out)
}

/// Canonical report bytes. Identical runs give identical bytes unless a wall
/// time was recorded.
pub fn emit_report(report: &RunReport) -> Vec<u8> {
    to_canonical_bytes(&report_json(report))
}

/// Memory bound of an instance under streaming parameters.
pub fn instance_memory_bound(inst: &Instance<Rational>, params: &StreamParams<Rational>) -> MemoryBound {
    memory_bound(&inst.ranks(), params)
}
