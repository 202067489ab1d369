//! TOML file formats for instances, profiles and dynamics scripts.
//!
//! Instance:
//!
//! ```toml
//! version = 1
//! locations = ["x", "y"]
//! millers = 2            # or a list of weights: [1, 3]
//!
//! [[bakers]]
//! name = "b0"            # optional
//! range = ["x", "y"]
//! weight = 1             # optional, defaults to 1
//! ```
//!
//! Profile: `bakers = ["x", ...]` (one entry per baker, by index) and
//! `millers = ["y", ...]`. Script: `[[moves]]` tables with `kind`, `from`,
//! `to` and an optional `weight` selecting which agent moves.

use std::fmt::Write as _;
use std::ops::Range;

use bmgame_core::dynamics::{AgentKind, DynamicsTrace, ScriptedMove, WeightedInstance};
use bmgame_core::{Instance, StrategyProfile};
use serde::{Deserialize, Serialize};
use toml::Spanned;

pub const FORMAT_VERSION: i64 = 1;

/// A malformed or inconsistent document. `field` is a path such as
/// `bakers[2].range[0]`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}{field}: {message}", line.map(|l| format!("line {l}, ")).unwrap_or_default())]
pub struct ParseError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

struct Doc<'a>(&'a str);

impl Doc<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        self.0[..span.start.min(self.0.len())].matches('\n').count() + 1
    }

    fn err<T>(
        &self,
        span: Range<usize>,
        field: impl Into<String>,
        message: impl Into<String>,
    ) -> Result<T, ParseError> {
        Err(ParseError { line: Some(self.line(span)), field: field.into(), message: message.into() })
    }

    fn decode<T: serde::de::DeserializeOwned>(&self) -> Result<T, ParseError> {
        toml::from_str(self.0).map_err(|e| ParseError {
            line: e.span().map(|s| self.line(s)),
            field: "document".into(),
            message: e.message().to_string(),
        })
    }

    fn location(&self, instance: &Instance, name: &Spanned<String>, field: String) -> Result<usize, ParseError> {
        match instance.location_index(name.get_ref()) {
            Some(l) => Ok(l),
            None => self.err(name.span(), field, format!("unknown location {:?}", name.get_ref())),
        }
    }

    fn weight(&self, weight: &Spanned<i64>, field: String) -> Result<u64, ParseError> {
        match u64::try_from(*weight.get_ref()) {
            Ok(w) if w > 0 => Ok(w),
            _ => self.err(weight.span(), field, format!("weight must be positive, got {}", weight.get_ref())),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    version: Spanned<i64>,
    locations: Spanned<Vec<Spanned<String>>>,
    millers: Spanned<RawMillers>,
    #[serde(default)]
    bakers: Vec<Spanned<RawBaker>>,
}

#[derive(Deserialize, Serialize)]
#[serde(untagged)]
enum RawMillers {
    Count(i64),
    Weights(Vec<i64>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBaker {
    #[allow(dead_code)]
    name: Option<String>,
    range: Spanned<Vec<Spanned<String>>>,
    weight: Option<Spanned<i64>>,
}

/// A parsed instance. Weights are kept only if some weight differs from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedInstance {
    Unweighted(Instance),
    Weighted(WeightedInstance),
}

impl ParsedInstance {
    pub fn instance(&self) -> &Instance {
        match self {
            ParsedInstance::Unweighted(i) => i,
            ParsedInstance::Weighted(w) => w.instance(),
        }
    }

    pub fn to_weighted(&self) -> WeightedInstance {
        match self {
            ParsedInstance::Unweighted(i) => WeightedInstance::unweighted(i.clone()),
            ParsedInstance::Weighted(w) => w.clone(),
        }
    }

    pub fn is_weighted(&self) -> bool {
        matches!(self, ParsedInstance::Weighted(_))
    }

    fn canonical(weighted: WeightedInstance) -> Self {
        if weighted.is_unit() {
            ParsedInstance::Unweighted(weighted.into_instance())
        } else {
            ParsedInstance::Weighted(weighted)
        }
    }
}

impl From<Instance> for ParsedInstance {
    fn from(instance: Instance) -> Self {
        ParsedInstance::Unweighted(instance)
    }
}

impl From<WeightedInstance> for ParsedInstance {
    fn from(weighted: WeightedInstance) -> Self {
        ParsedInstance::canonical(weighted)
    }
}

pub fn parse_instance(document: &str) -> Result<ParsedInstance, ParseError> {
    let doc = Doc(document);
    let raw: RawInstance = doc.decode()?;
    if *raw.version.get_ref() != FORMAT_VERSION {
        return doc.err(raw.version.span(), "version", format!("unsupported version {}", raw.version.get_ref()));
    }
    if raw.locations.get_ref().is_empty() {
        return doc.err(raw.locations.span(), "locations", "no locations");
    }
    let mut names: Vec<String> = Vec::new();
    for (i, name) in raw.locations.get_ref().iter().enumerate() {
        if names.contains(name.get_ref()) {
            return doc.err(name.span(), format!("locations[{i}]"), format!("duplicate location {:?}", name.get_ref()));
        }
        names.push(name.get_ref().clone());
    }

    let miller_weights = match raw.millers.get_ref() {
        RawMillers::Count(n) => match usize::try_from(*n) {
            Ok(n) if n > 0 => vec![1; n],
            _ => return doc.err(raw.millers.span(), "millers", format!("miller count must be positive, got {n}")),
        },
        RawMillers::Weights(ws) => {
            if ws.is_empty() {
                return doc.err(raw.millers.span(), "millers", "no millers");
            }
            let mut out = Vec::with_capacity(ws.len());
            for (i, &w) in ws.iter().enumerate() {
                out.push(doc.weight(&Spanned::new(raw.millers.span(), w), format!("millers[{i}]"))?);
            }
            out
        }
    };

    if raw.bakers.is_empty() {
        return doc.err(0..0, "bakers", "no bakers");
    }
    let placeholder = Instance::new(names.clone(), 1, vec![vec![0]]).expect("nonempty locations");
    let mut ranges = Vec::with_capacity(raw.bakers.len());
    let mut baker_weights = Vec::with_capacity(raw.bakers.len());
    for (b, baker) in raw.bakers.iter().enumerate() {
        let baker = baker.get_ref();
        if baker.range.get_ref().is_empty() {
            return doc.err(baker.range.span(), format!("bakers[{b}].range"), "empty range");
        }
        let mut range = Vec::new();
        for (j, name) in baker.range.get_ref().iter().enumerate() {
            range.push(doc.location(&placeholder, name, format!("bakers[{b}].range[{j}]"))?);
        }
        ranges.push(range);
        baker_weights.push(match &baker.weight {
            Some(w) => doc.weight(w, format!("bakers[{b}].weight"))?,
            None => 1,
        });
    }

    let instance = Instance::new(names, miller_weights.len(), ranges).map_err(|e| ParseError {
        line: None,
        field: "document".into(),
        message: e.to_string(),
    })?;
    let weighted = WeightedInstance::new(instance, baker_weights, miller_weights).map_err(|e| ParseError {
        line: None,
        field: "document".into(),
        message: e.to_string(),
    })?;
    Ok(ParsedInstance::canonical(weighted))
}

#[derive(Serialize)]
struct OutInstance<'a> {
    version: i64,
    locations: &'a [String],
    millers: RawMillers,
    bakers: Vec<OutBaker>,
}

#[derive(Serialize)]
struct OutBaker {
    range: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight: Option<u64>,
}

pub fn serialize_instance(parsed: &ParsedInstance) -> String {
    let weighted = parsed.to_weighted();
    let instance = weighted.instance();
    let unit = weighted.is_unit();
    let millers = if unit || weighted.miller_weights().iter().all(|&w| w == 1) {
        RawMillers::Count(instance.num_millers() as i64)
    } else {
        RawMillers::Weights(weighted.miller_weights().iter().map(|&w| w as i64).collect())
    };
    let bakers = (0..instance.num_bakers())
        .map(|b| OutBaker {
            range: instance.range(b).iter().map(|&l| instance.location_name(l).to_string()).collect(),
            weight: Some(weighted.baker_weights()[b]).filter(|&w| w != 1),
        })
        .collect();
    let out = OutInstance { version: FORMAT_VERSION, locations: instance.locations(), millers, bakers };
    toml::to_string(&out).expect("instance serializes")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    bakers: Spanned<Vec<Spanned<String>>>,
    millers: Spanned<Vec<Spanned<String>>>,
}

pub fn parse_profile(document: &str, instance: &Instance) -> Result<StrategyProfile, ParseError> {
    let doc = Doc(document);
    let raw: RawProfile = doc.decode()?;
    for (field, list, expected) in
        [("bakers", &raw.bakers, instance.num_bakers()), ("millers", &raw.millers, instance.num_millers())]
    {
        if list.get_ref().len() != expected {
            return doc.err(list.span(), field, format!("expected {expected} entries, got {}", list.get_ref().len()));
        }
    }
    let mut bakers = Vec::with_capacity(instance.num_bakers());
    for (b, name) in raw.bakers.get_ref().iter().enumerate() {
        let l = doc.location(instance, name, format!("bakers[{b}]"))?;
        if !instance.can_use(b, l) {
            return doc.err(
                name.span(),
                format!("bakers[{b}]"),
                format!("{:?} is outside baker {b}'s range", name.get_ref()),
            );
        }
        bakers.push(l);
    }
    let mut millers = Vec::with_capacity(instance.num_millers());
    for (m, name) in raw.millers.get_ref().iter().enumerate() {
        millers.push(doc.location(instance, name, format!("millers[{m}]"))?);
    }
    Ok(StrategyProfile::new(bakers, millers))
}

#[derive(Serialize)]
struct OutProfile {
    bakers: Vec<String>,
    millers: Vec<String>,
}

pub fn serialize_profile(instance: &Instance, profile: &StrategyProfile) -> String {
    let names = |ls: &[usize]| ls.iter().map(|&l| instance.location_name(l).to_string()).collect();
    toml::to_string(&OutProfile { bakers: names(&profile.bakers), millers: names(&profile.millers) })
        .expect("profile serializes")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScript {
    moves: Vec<RawMove>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMove {
    kind: Spanned<String>,
    from: Spanned<String>,
    to: Spanned<String>,
    weight: Option<Spanned<i64>>,
}

pub fn parse_script(document: &str, instance: &Instance) -> Result<Vec<ScriptedMove>, ParseError> {
    let doc = Doc(document);
    let raw: RawScript = doc.decode()?;
    raw.moves
        .iter()
        .enumerate()
        .map(|(i, mv)| {
            let kind = match mv.kind.get_ref().as_str() {
                "baker" => AgentKind::Baker,
                "miller" => AgentKind::Miller,
                other => {
                    return doc.err(
                        mv.kind.span(),
                        format!("moves[{i}].kind"),
                        format!("expected baker or miller, got {other:?}"),
                    )
                }
            };
            Ok(ScriptedMove {
                kind,
                from: doc.location(instance, &mv.from, format!("moves[{i}].from"))?,
                to: doc.location(instance, &mv.to, format!("moves[{i}].to"))?,
                weight: mv.weight.as_ref().map(|w| doc.weight(w, format!("moves[{i}].weight"))).transpose()?,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct OutScript {
    moves: Vec<OutMove>,
}

#[derive(Serialize)]
struct OutMove {
    kind: &'static str,
    from: String,
    to: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight: Option<u64>,
}

pub fn serialize_script(instance: &Instance, script: &[ScriptedMove]) -> String {
    let moves = script
        .iter()
        .map(|m| OutMove {
            kind: m.kind.name(),
            from: instance.location_name(m.from).to_string(),
            to: instance.location_name(m.to).to_string(),
            weight: m.weight,
        })
        .collect();
    toml::to_string(&OutScript { moves }).expect("script serializes")
}

/// One line per move: `kind id from to u_before u_after`.
pub fn format_trace(instance: &Instance, trace: &DynamicsTrace) -> String {
    let mut out = String::new();
    for mv in &trace.moves {
        writeln!(
            out,
            "{} {} {} {} {} {}",
            mv.kind.name(),
            mv.agent,
            instance.location_name(mv.from),
            instance.location_name(mv.to),
            mv.before,
            mv.after
        )
        .expect("write to string");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use bmgame_core::reductions::{fig7_script, gen_paper_figure};

    const FIG2: &str = r#"
version = 1
locations = ["x", "y"]
millers = 2

[[bakers]]
range = ["x"]

[[bakers]]
range = ["x"]

[[bakers]]
name = "b"
range = ["x", "y"]

[[bakers]]
range = ["y"]
"#;

    #[test]
    fn parses_fig2() {
        let parsed = parse_instance(FIG2).unwrap();
        assert!(!parsed.is_weighted());
        assert_eq!(parsed.instance(), &gen_paper_figure("fig2").unwrap().instance);
    }

    #[test]
    fn unknown_location_names_the_offender() {
        let doc = FIG2.replace(r#"range = ["y"]"#, r#"range = ["w"]"#);
        let err = parse_instance(&doc).unwrap_err();
        assert_eq!(err.field, "bakers[3].range[0]");
        assert_eq!(err.line, Some(17));
        assert!(err.to_string().contains("\"w\""), "{err}");
    }

    #[test]
    fn rejects_bad_documents() {
        let cases = [
            (FIG2.replace("version = 1", "version = 2"), "version"),
            (
                FIG2.replace(
                    r#"["x", "y"]
millers"#,
                    r#"["x", "x"]
millers"#,
                ),
                "locations[1]",
            ),
            (FIG2.replace("millers = 2", "millers = 0"), "millers"),
            (FIG2.replace("millers = 2", "millers = [1, -1]"), "millers[1]"),
            (FIG2.replace(r#"range = ["y"]"#, "range = []"), "bakers[3].range"),
            (FIG2.replace(r#"range = ["y"]"#, "range = [\"y\"]\nweight = 0"), "bakers[3].weight"),
            (FIG2.replace("millers = 2", "millers = \"two\""), "document"),
        ];
        for (doc, field) in cases {
            let err = parse_instance(&doc).unwrap_err();
            assert_eq!(err.field, field, "{err}");
        }
    }

    #[test]
    fn unit_weights_canonicalize() {
        let doc = FIG2.replace("millers = 2", "millers = [1, 1]").replace(r#"name = "b""#, "weight = 1");
        assert_eq!(parse_instance(&doc).unwrap(), parse_instance(FIG2).unwrap());
    }

    #[test]
    fn weighted_round_trip() {
        let fig = gen_paper_figure("fig7").unwrap();
        let parsed = ParsedInstance::from(fig.weighted().unwrap());
        assert!(parsed.is_weighted());
        assert_eq!(parse_instance(&serialize_instance(&parsed)).unwrap(), parsed);
    }

    #[test]
    fn profile_and_script_round_trip() {
        let fig = gen_paper_figure("fig7").unwrap();
        let start = &fig.profiles[0].1;
        let text = serialize_profile(&fig.instance, start);
        assert_eq!(&parse_profile(&text, &fig.instance).unwrap(), start);
        let script = fig7_script();
        assert_eq!(parse_script(&serialize_script(&fig.instance, &script), &fig.instance).unwrap(), script);
    }

    #[test]
    fn profile_errors() {
        let fig = gen_paper_figure("fig2").unwrap();
        let bad_range = "bakers = [\"x\", \"x\", \"x\", \"x\"]\nmillers = [\"x\", \"y\"]\n";
        assert_eq!(parse_profile(bad_range, &fig.instance).unwrap_err().field, "bakers[3]");
        let short = "bakers = [\"x\"]\nmillers = [\"x\", \"y\"]\n";
        assert_eq!(parse_profile(short, &fig.instance).unwrap_err().field, "bakers");
    }
}
