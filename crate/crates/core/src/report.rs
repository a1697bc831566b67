//! Run configuration, the end-to-end pipeline and deterministic report rendering.
//!
//! Reports are `serde_json` values whose objects are key-sorted maps, so serialization is
//! byte-stable. Scalars are emitted as reduced `p/q` strings and chart elements in the
//! syntax accepted by [`crate::syntax::parse_element`].

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::algebra::{TruncatedAlgebra, Word};
use crate::chart::{ChartElement, ChartId, Curve, CurveParams, Inclusion};
use crate::cohomology::{hochschild_dims, CohomologyClass, CoverDiagram};
use crate::deformation::{
    build_exponential_family, build_tangent_family, check_deformation, compute_hull, cup_products,
    tangent_representatives, DeformationCheck, DeformationData, ObstructionClass,
};
use crate::diffop::format_op;
use crate::error::{DeformError, Result};
use crate::ext::TruncationPolicy;
use crate::reference;
use crate::scalar::{canonical, parse_rational, Scalar};
use crate::syntax::format_element;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Ext,
    Cohomology,
    Cup,
    Hull,
    VerifyFamily,
    CheckDeformation,
    Run,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ext => "ext",
            Command::Cohomology => "cohomology",
            Command::Cup => "cup",
            Command::Hull => "hull",
            Command::VerifyFamily => "verify-family",
            Command::CheckDeformation => "check-deformation",
            Command::Run => "run",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub a: Scalar,
    pub b: Scalar,
    pub order: usize,
    pub policy: TruncationPolicy,
    pub check_bound: usize,
    pub format: Format,
    pub command: Command,
    pub timings: bool,
}

impl RunConfig {
    pub fn new(a: Scalar, b: Scalar) -> Self {
        RunConfig {
            a,
            b,
            order: 6,
            policy: TruncationPolicy::default(),
            check_bound: 10,
            format: Format::Json,
            command: Command::Run,
            timings: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 1 {
            return Err(DeformError::Config("order must be at least 1".into()));
        }
        let p = &self.policy;
        if p.start == 0 || p.step == 0 || p.cap == 0 || p.window == 0 {
            return Err(DeformError::Config(
                "degree caps and windows must be positive".into(),
            ));
        }
        if p.start > p.cap {
            return Err(DeformError::Config(format!(
                "stabilization start {} exceeds cap {}",
                p.start, p.cap
            )));
        }
        Ok(())
    }
}

/// A rendered pipeline result.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    value: Value,
}

impl Report {
    pub fn value(&self) -> &Value {
        &self.value
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.value).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        render_text(&self.value)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }
}

/// One `path = value` line per leaf; arrays of scalars stay on one line.
pub fn render_text(value: &Value) -> String {
    fn leaf(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
    fn walk(path: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                for (k, child) in map {
                    let p = if path.is_empty() {
                        k.clone()
                    } else {
                        format!("{path}.{k}")
                    };
                    walk(&p, child, out);
                }
            }
            Value::Array(items) if items.iter().any(|i| i.is_object() || i.is_array()) => {
                for (i, child) in items.iter().enumerate() {
                    walk(&format!("{path}[{i}]"), child, out);
                }
            }
            Value::Array(items) => {
                let parts: Vec<String> = items.iter().map(leaf).collect();
                let _ = writeln!(out, "{path} = [{}]", parts.join(", "));
            }
            other => {
                let _ = writeln!(out, "{path} = {}", leaf(other));
            }
        }
    }
    let mut out = String::new();
    walk("", value, &mut out);
    out
}

fn scalar(q: &Scalar) -> Value {
    Value::String(canonical(q))
}

fn element(e: &ChartElement) -> Value {
    Value::String(format_element(e))
}

fn by_chart(components: &[ChartElement]) -> Value {
    let map: Map<String, Value> = ChartId::ALL
        .iter()
        .zip(components)
        .map(|(c, e)| (c.to_string(), element(e)))
        .collect();
    Value::Object(map)
}

fn by_inclusion(components: &[ChartElement]) -> Value {
    let map: Map<String, Value> = Inclusion::NONTRIVIAL
        .iter()
        .zip(components)
        .map(|(i, e)| (i.to_string(), element(e)))
        .collect();
    Value::Object(map)
}

fn params_section(p: &CurveParams) -> Value {
    json!({
        "a": scalar(&p.a),
        "b": scalar(&p.b),
        "delta": scalar(&p.delta),
        "regime": p.regime().label(),
    })
}

fn ext_section(diagram: &CoverDiagram) -> Result<Value> {
    let curve = diagram.curve();
    let mut map = Map::new();
    for space in diagram.spaces() {
        let reference = reference::ext_basis(curve, space.pair());
        map.insert(
            space.pair().to_string(),
            json!({
                "dim": space.dim(),
                "basis": space.basis().iter().map(element).collect::<Vec<_>>(),
                "stabilization_degree": space.stabilization_degree(),
                "reference_basis": reference.iter().map(element).collect::<Vec<_>>(),
                "reference_is_basis": space.is_basis(&reference)?,
            }),
        );
    }
    map.insert("dims".into(), json!(diagram.dims()));
    Ok(Value::Object(map))
}

fn cohomology_section(diagram: &CoverDiagram) -> Result<Value> {
    let curve = diagram.curve();
    let complex = diagram.complex();
    let xi1 = diagram.class0(reference::xi1(curve))?;
    let xi2 = diagram.class0(reference::xi2(curve))?;
    let omega = diagram.class1(reference::omega(curve))?;
    let h1 = diagram.h1()?;
    let reps = tangent_representatives(diagram)?;
    let h0: Vec<Value> = diagram
        .h0()
        .iter()
        .map(|c| by_chart(&c.components))
        .collect();
    let class0 = |c: &CohomologyClass| {
        json!({
            "components": by_chart(&c.components),
            "cocycle": diagram.is_cocycle(c),
            "nontrivial": !c.coordinates.iter().all(|k| k.is_zero()),
        })
    };
    let omega_coords = diagram.h1_coordinates(&h1, &omega.components[3], &omega.components[4])?;
    Ok(json!({
        "hh_dims": hochschild_dims(complex),
        "resolving_dims": complex.dims,
        "rank_d0": complex.d0.rank(),
        "h0_basis": h0,
        "xi1": class0(&xi1),
        "xi2": class0(&xi2),
        "omega": {
            "components": by_inclusion(&omega.components[3..]),
            "cocycle": diagram.is_cocycle(&omega),
            "nontrivial": !diagram.is_trivial(&omega),
            "h1_coordinates": omega_coords.iter().map(scalar).collect::<Vec<_>>(),
        },
        "tau": {
            "t1": by_inclusion(&reps[0].tau),
            "t2": by_inclusion(&reps[1].tau),
        },
    }))
}

fn cup_section(cups: &ObstructionClass) -> Value {
    let coefficients: Map<String, Value> = cups
        .coefficients
        .iter()
        .map(|(w, c)| (w.to_string(), Value::Array(c.iter().map(scalar).collect())))
        .collect();
    json!({
        "coefficients": coefficients,
        "scalar": scalar(&cups.coefficient(&Word::new(&[1, 2]))),
        "antisymmetric": cups.is_antisymmetric(),
        "nonzero": !cups.is_zero(),
    })
}

fn family_section(data: &DeformationData) -> Value {
    let algebra = data.algebra();
    let mut psi = Map::new();
    let mut tau = Map::new();
    for (l, rep) in data.reps().iter().enumerate() {
        let name = Word::generator(l as u8 + 1).to_string();
        psi.insert(name.clone(), by_chart(&rep.xi));
        tau.insert(name, by_inclusion(&rep.tau));
    }
    let mut restrictions = Map::new();
    for incl in Inclusion::NONTRIVIAL {
        let g = data.restriction(incl);
        let terms: Map<String, Value> = g
            .terms()
            .iter()
            .map(|(w, e)| (w.to_string(), element(e)))
            .collect();
        restrictions.insert(incl.to_string(), Value::Object(terms));
    }
    json!({
        "algebra": algebra_value(algebra),
        "exponential_order": algebra.order,
        "psi": psi,
        "tau": tau,
        "restrictions": restrictions,
        "residue_classical": data.residue_is_classical(),
    })
}

fn algebra_value(algebra: TruncatedAlgebra) -> Value {
    json!({
        "generators": algebra.generators,
        "order": algebra.order,
        "relation": algebra.relation.label(),
    })
}

fn check_section(data: &DeformationData, check: &DeformationCheck) -> Value {
    let violations: Vec<Value> = check
        .violations
        .iter()
        .map(|v| {
            let defect: Map<String, Value> = v
                .defect
                .iter()
                .map(|(w, p)| (w.to_string(), Value::String(format_op(p))))
                .collect();
            json!({
                "condition": v.condition,
                "location": v.location,
                "generator": v.generator,
                "failing_monomials": v.failing_monomials,
                "defect": defect,
            })
        })
        .collect();
    json!({
        "algebra": algebra_value(data.algebra()),
        "degree_bound": check.degree_bound,
        "ok": check.is_ok(),
        "violations": violations,
    })
}

struct Timer {
    enabled: bool,
    entries: Map<String, Value>,
    last: Instant,
}

impl Timer {
    fn new(enabled: bool) -> Self {
        Timer {
            enabled,
            entries: Map::new(),
            last: Instant::now(),
        }
    }

    fn lap(&mut self, name: &str) {
        if self.enabled {
            let now = Instant::now();
            let ms = now.duration_since(self.last).as_millis() as u64;
            self.entries.insert(format!("{name}_ms"), json!(ms));
            self.last = now;
        }
    }
}

/// Runs the stages needed by `config.command` and assembles the report.
pub fn run_pipeline(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let params = CurveParams::new(config.a.clone(), config.b.clone())?;
    let curve = Curve::new(params.clone());
    let mut timer = Timer::new(config.timings);
    let mut root = Map::new();
    root.insert("command".into(), json!(config.command.name()));
    root.insert("params".into(), params_section(&params));

    let diagram = CoverDiagram::build(&curve, config.policy)?;
    timer.lap("ext");
    let cmd = config.command;
    if matches!(cmd, Command::Ext | Command::Run) {
        root.insert("ext1".into(), ext_section(&diagram)?);
    }
    if matches!(cmd, Command::Cohomology | Command::Run) {
        root.insert("cohomology".into(), cohomology_section(&diagram)?);
        timer.lap("cohomology");
    }
    if matches!(cmd, Command::Cup) {
        let h1 = diagram.h1()?;
        let reps = tangent_representatives(&diagram)?;
        root.insert(
            "cup".into(),
            cup_section(&cup_products(&diagram, &h1, &reps)?),
        );
        timer.lap("cup");
    }
    if matches!(cmd, Command::Hull | Command::Run) {
        let hull = compute_hull(&curve, config.policy, config.order, config.check_bound)?;
        timer.lap("hull");
        let certified: Vec<Value> = hull
            .certified_orders
            .iter()
            .map(|(n, ok)| json!({"order": n, "passed": ok}))
            .collect();
        let p = &hull.presentation;
        root.insert(
            "hull".into(),
            json!({
                "generators": p.generators,
                "relations": p.relations.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                "order_verified": p.order_verified,
                "certified_orders": certified,
                "commutativity": {
                    "words_per_degree": hull.witness.words_per_degree,
                    "bijective": hull.witness.bijective,
                },
            }),
        );
        if cmd == Command::Run {
            root.insert("cup".into(), cup_section(&hull.cups));
            root.insert("family".into(), family_section(&hull.family));
        }
    }
    if matches!(cmd, Command::VerifyFamily) {
        let reps = tangent_representatives(&diagram)?;
        let data = build_exponential_family(&curve, &reps, config.order);
        let check = check_deformation(&data, config.check_bound);
        timer.lap("check");
        root.insert("family".into(), family_section(&data));
        root.insert("check".into(), check_section(&data, &check));
    }
    if matches!(cmd, Command::CheckDeformation) {
        let reps = tangent_representatives(&diagram)?;
        let mut checks = Map::new();
        let tangent = build_tangent_family(&curve, &reps);
        let free = DeformationData::exponential(&curve, &reps, TruncatedAlgebra::free(2, 2));
        let comm = build_exponential_family(&curve, &reps, config.order);
        for (name, data) in [("tangent", tangent), ("free", free), ("commutator", comm)] {
            let check = check_deformation(&data, config.check_bound);
            checks.insert(name.into(), check_section(&data, &check));
        }
        timer.lap("check");
        root.insert("checks".into(), Value::Object(checks));
    }
    if config.timings {
        root.insert("timings".into(), Value::Object(timer.entries));
    }
    Ok(Report {
        value: Value::Object(root),
    })
}

/// One line of a corpus file and its outcome.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub line: usize,
    pub input: String,
    pub outcome: Result<Report>,
}

fn parse_corpus_line(line: &str, base: &RunConfig) -> Result<RunConfig> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let bad = |reason: &str| DeformError::Parse {
        input: line.to_string(),
        reason: reason.to_string(),
    };
    if fields.len() != 3 {
        return Err(bad("expected `a b N`"));
    }
    let order = fields[2]
        .parse::<usize>()
        .map_err(|_| bad("order is not a natural number"))?;
    Ok(RunConfig {
        a: parse_rational(fields[0])?,
        b: parse_rational(fields[1])?,
        order,
        ..base.clone()
    })
}

/// Runs every non-blank line of `text` in parallel; results keep input order.
pub fn run_corpus_text(text: &str, base: &RunConfig) -> Vec<CorpusEntry> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    lines
        .par_iter()
        .map(|&(line, input)| CorpusEntry {
            line,
            input: input.to_string(),
            outcome: parse_corpus_line(input, base).and_then(|c| run_pipeline(&c)),
        })
        .collect()
}

pub fn run_corpus(path: &Path, base: &RunConfig) -> Result<Vec<CorpusEntry>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DeformError::Io(format!("{}: {e}", path.display())))?;
    Ok(run_corpus_text(&text, base))
}

pub fn error_value(e: &DeformError) -> Value {
    json!({"code": e.code(), "message": e.to_string()})
}

pub fn corpus_report(entries: &[CorpusEntry]) -> Report {
    let items: Vec<Value> = entries
        .iter()
        .map(|e| match &e.outcome {
            Ok(r) => json!({"line": e.line, "input": e.input, "status": "ok", "report": r.value}),
            Err(err) => json!({"line": e.line, "input": e.input, "status": "error", "error": error_value(err)}),
        })
        .collect();
    Report {
        value: json!({ "entries": items }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use crate::syntax::parse_element;

    fn config(a: i64, b: i64, command: Command) -> RunConfig {
        RunConfig {
            command,
            order: 3,
            check_bound: 4,
            ..RunConfig::new(int(a), int(b))
        }
    }

    #[test]
    fn params_and_regime() {
        let r = run_pipeline(&config(1, 1, Command::Ext)).unwrap();
        assert_eq!(r.value()["params"]["delta"], "31/1");
        assert_eq!(r.value()["params"]["regime"], "a_nonzero");
        assert_eq!(r.value()["ext1"]["dims"], json!([4, 2, 5, 5, 5]));
        let r = run_pipeline(&config(0, 1, Command::Hull)).unwrap();
        assert_eq!(r.value()["params"]["regime"], "a_zero");
        assert_eq!(r.value()["hull"]["relations"], json!(["t1*t2 - t2*t1"]));
    }

    #[test]
    fn singular_and_invalid_configs() {
        let e = run_pipeline(&config(0, 0, Command::Ext)).unwrap_err();
        assert!(matches!(e, DeformError::SingularCurve { .. }));
        assert_eq!(e.exit_code(), 2);
        let mut c = config(1, 1, Command::Ext);
        c.order = 0;
        assert!(matches!(run_pipeline(&c), Err(DeformError::Config(_))));
        let mut c = config(1, 1, Command::Ext);
        c.policy.cap = 6;
        assert!(matches!(run_pipeline(&c), Err(DeformError::Config(_))));
        let mut c = config(1, 1, Command::Ext);
        c.policy.cap = 10;
        let e = run_pipeline(&c).unwrap_err();
        assert!(matches!(e, DeformError::StabilizationFailure { .. }));
        assert_eq!(e.exit_code(), 3);
    }

    fn strings_under(v: &Value, chart: Option<ChartId>, out: &mut Vec<(ChartId, String)>) {
        if let Value::Object(map) = v {
            for (k, child) in map {
                let here = match k.as_str() {
                    "U1" | "U1>=U1" => Some(ChartId::U1),
                    "U2" | "U2>=U2" => Some(ChartId::U2),
                    "U3" | "U3>=U3" | "U1>=U3" | "U2>=U3" => Some(ChartId::U3),
                    _ => chart,
                };
                strings_under(child, here, out);
            }
        } else if let (Value::String(s), Some(c)) = (v, chart) {
            out.push((c, s.clone()));
        } else if let Value::Array(items) = v {
            for i in items {
                strings_under(i, chart, out);
            }
        }
    }

    #[test]
    fn chart_strings_reparse() {
        let r = run_pipeline(&config(1, 1, Command::Run)).unwrap();
        let curve = Curve::from_ab(int(1), int(1)).unwrap();
        let mut found = Vec::new();
        for section in ["ext1", "cohomology", "family"] {
            strings_under(&r.value()[section], None, &mut found);
        }
        assert!(found.len() > 40);
        for (chart, s) in found {
            let e = parse_element(&curve, chart, &s).unwrap();
            assert_eq!(format_element(&e), s);
        }
    }

    #[test]
    fn text_rendering() {
        let v = json!({"b": {"x": [1, 2]}, "a": "1/2", "c": [{"d": true}]});
        assert_eq!(render_text(&v), "a = 1/2\nb.x = [1, 2]\nc[0].d = true\n");
    }

    #[test]
    fn corpus_isolates_errors() {
        let base = config(0, 0, Command::Cohomology);
        let entries = run_corpus_text("1 1 2\n\n0 0 2\nnonsense\n0 1 2\n", &base);
        assert_eq!(entries.len(), 4);
        assert_eq!(
            entries[0].outcome.as_ref().unwrap().value()["cohomology"]["hh_dims"],
            json!([1, 2, 1])
        );
        assert!(matches!(
            entries[1].outcome,
            Err(DeformError::SingularCurve { .. })
        ));
        assert!(matches!(entries[2].outcome, Err(DeformError::Parse { .. })));
        assert!(entries[3].outcome.is_ok());
        assert!(run_corpus_text("", &base).is_empty());
    }
}
