//! Command dispatch.

use std::path::{Path, PathBuf};

use ea_core::classify::{
    central_elements, classify, is_central, is_orthoalgebra, is_principal, is_sharp,
    orthoalgebraic_skeleton, sharp_closure_check, sharp_elements, ClassificationReport, Flag,
    SubAlgebra,
};
use ea_core::compat::{
    are_compatible, are_strongly_compatible, blocks, commutant, maximal_boolean_subortho,
    CompatContext, Decomposition,
};
use ea_core::observables::{
    is_question, make_observable, observable_from_resolution, parse_rational, random_observable,
    range, spectral_resolution, uniqueness_check, verify_range_boolean, ObservableError,
    SimpleObservable, SpectralResolution,
};
use ea_core::states::{
    check_full_implies_orthoalgebra, clan_embedding, is_full, is_order_determining, state_polytope,
};
use ea_core::sweep::{sweep, Finding, SweepOptions};
use ea_core::{EffectAlgebra, Element, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::dot::hasse_dot;
use crate::dsl::{self, describe_violation, DslError};
use crate::report::Report;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or an unreadable document: exit code 2.
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {error}")]
    Document { path: String, error: DslError },
    /// The input is fine but a required hypothesis fails: exit code 1.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Document { error: DslError::Validation { .. }, .. } => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub budget: u64,
    pub max_size: usize,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            budget: ea_core::compat::DEFAULT_BUDGET,
            max_size: 6,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObservableAction {
    Build,
    Roundtrip,
    Question,
    Range,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Validate(PathBuf),
    Classify(PathBuf),
    Sharp(PathBuf),
    Skeleton(PathBuf),
    Blocks(PathBuf),
    BooleanCover(PathBuf),
    Compat { file: PathBuf, a: String, b: String },
    Commutant { file: PathBuf, a: String },
    Observable {
        action: ObservableAction,
        file: PathBuf,
        /// `value:label` pairs; random when absent.
        atoms: Option<String>,
        count: usize,
    },
    ResolutionCheck { file: PathBuf, jumps: String },
    States(PathBuf),
    Clan(PathBuf),
    Sweep,
    Dot(PathBuf),
}

fn read(path: &Path) -> Result<String, CliError> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
            .map_err(|err| CliError::Usage(format!("stdin: {err}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|err| CliError::Usage(format!("{}: {err}", path.display())))
}

fn load(path: &Path) -> Result<(Option<String>, EffectAlgebra), CliError> {
    let text = read(path)?;
    let (doc, e) = dsl::parse(&text).map_err(|error| CliError::Document {
        path: path.display().to_string(),
        error,
    })?;
    Ok((doc.name, e))
}

fn element(e: &EffectAlgebra, label: &str) -> Result<Element, CliError> {
    e.find(label).ok_or_else(|| CliError::Usage(format!("unknown element `{label}`")))
}

fn labels(e: &EffectAlgebra, items: impl IntoIterator<Item = Element>) -> Value {
    Value::from(items.into_iter().map(|a| e.label(a).to_string()).collect::<Vec<_>>())
}

fn sub(e: &EffectAlgebra, s: &SubAlgebra) -> Value {
    labels(e, s.elements())
}

fn q(t: &Rational) -> String {
    ea_core::observables::format_rational(t)
}

fn decomposition(e: &EffectAlgebra, d: Option<Decomposition>) -> Value {
    d.map_or(Value::Null, |d| {
        json!({"a1": e.label(d.a1), "b1": e.label(d.b1), "c": e.label(d.c)})
    })
}

fn failed(err: impl std::fmt::Display) -> CliError {
    CliError::Failed(err.to_string())
}

/// Parses `value:label` pairs separated by whitespace.
fn parse_pairs(e: &EffectAlgebra, text: &str) -> Result<Vec<(Rational, Element)>, CliError> {
    text.split_whitespace()
        .map(|item| {
            let (t, label) = item
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("expected value:label, found `{item}`")))?;
            let t = parse_rational(t).ok_or_else(|| CliError::Usage(format!("bad value `{t}`")))?;
            Ok((t, element(e, label)?))
        })
        .collect()
}

fn observable_json(e: &EffectAlgebra, x: &SimpleObservable) -> Value {
    let sr = spectral_resolution(e, x);
    json!({
        "atoms": x.atoms().iter().map(|(t, a)| format!("{} : {}", q(t), e.label(*a))).collect::<Vec<_>>(),
        "spectrum": x.spectrum().iter().map(q).collect::<Vec<_>>(),
        "norm": q(&x.norm()),
        "resolution": sr.jumps().iter().map(|(t, c)| format!("{} : {}", q(t), e.label(*c))).collect::<Vec<_>>(),
    })
}

fn observables(
    e: &EffectAlgebra,
    atoms: &Option<String>,
    count: usize,
    seed: u64,
) -> Result<Vec<SimpleObservable>, CliError> {
    if let Some(text) = atoms {
        let pairs = parse_pairs(e, text)?;
        return Ok(vec![make_observable(e, pairs).map_err(|err| CliError::Usage(err.to_string()))?]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<Rational> = (0..e.size() as i64).map(|k| Rational::from_integer(k.into())).collect();
    Ok((0..count).map(|_| random_observable(e, &mut rng, &values)).collect())
}

fn finding(f: &Option<Finding>) -> Value {
    f.as_ref().map_or(Value::Null, |f| {
        json!({"algebra": f.algebra, "size": f.size, "sums": f.table, "elements": f.elements})
    })
}

fn classification(e: &EffectAlgebra, r: &ClassificationReport) -> (Value, Value) {
    let mut flags = Map::new();
    let mut witnesses = Map::new();
    for flag in Flag::ALL {
        flags.insert(flag.name().into(), r.get(flag).into());
        if let Some(w) = r.witness(flag) {
            witnesses.insert(flag.name().into(), labels(e, w.iter().copied()));
        }
    }
    (flags.into(), witnesses.into())
}

pub fn run(command: &Command, options: &Options) -> Result<Report, CliError> {
    match command {
        Command::Validate(path) => {
            let text = read(path)?;
            let mut report = Report::new("validate");
            match dsl::parse(&text) {
                Ok((doc, e)) => {
                    report
                        .set("valid", true)
                        .set("size", e.size())
                        .set("name", doc.name.map_or(Value::Null, Value::from))
                        .set("elements", labels(&e, e.elements()));
                }
                Err(DslError::Validation { report: v, labels }) => {
                    report.set("valid", false).set(
                        "violations",
                        v.violations.iter().map(|x| describe_violation(x, &labels)).collect::<Vec<_>>(),
                    );
                    report.fail();
                }
                Err(error) => {
                    return Err(CliError::Document { path: path.display().to_string(), error })
                }
            }
            Ok(report)
        }
        Command::Classify(path) => {
            let (_, e) = load(path)?;
            let r = classify(&e);
            let (flags, witnesses) = classification(&e, &r);
            let broken: Vec<String> = r
                .broken_implications()
                .iter()
                .map(|(p, c)| format!("{p} without {c}"))
                .collect();
            let mut report = Report::new("classify")
                .with("size", e.size())
                .with("flags", flags)
                .with("witnesses", witnesses)
                .with("broken_implications", broken.clone());
            if !broken.is_empty() {
                report.fail();
            }
            Ok(report)
        }
        Command::Sharp(path) => {
            let (_, e) = load(path)?;
            let mut report = Report::new("sharp");
            match sharp_elements(&e) {
                Ok(sh) => {
                    report.set("sharp", sub(&e, &sh)).set("closed", sh.is_closed());
                }
                Err(err) => {
                    report
                        .set("sharp", labels(&e, e.elements().filter(|&a| is_sharp(&e, a))))
                        .set("error", err.to_string());
                    report.fail();
                }
            }
            let closure = sharp_closure_check(&e);
            report.set(
                "closure_witness",
                closure.witness().map_or(Value::Null, |w| labels(&e, w.iter().copied())),
            );
            report.set("principal", labels(&e, e.elements().filter(|&a| is_principal(&e, a))));
            match central_elements(&e) {
                Ok(c) => report.set("central", sub(&e, &c)),
                Err(err) => {
                    report.fail();
                    report
                        .set("central", labels(&e, e.elements().filter(|&a| is_central(&e, a))))
                        .set("central_error", err.to_string())
                }
            };
            Ok(report)
        }
        Command::Skeleton(path) => {
            let (_, e) = load(path)?;
            let s = orthoalgebraic_skeleton(&e).map_err(failed)?;
            Ok(Report::new("skeleton").with("elements", sub(&e, &s)).with("size", s.len()))
        }
        Command::Blocks(path) => {
            let (_, e) = load(path)?;
            let bl = blocks(&e, options.budget).map_err(failed)?;
            Ok(Report::new("blocks")
                .with("count", bl.len())
                .with("blocks", bl.iter().map(|b| sub(&e, b)).collect::<Vec<_>>()))
        }
        Command::BooleanCover(path) => {
            let (_, e) = load(path)?;
            let mb = maximal_boolean_subortho(&e).map_err(failed)?;
            Ok(Report::new("boolean-cover")
                .with("count", mb.len())
                .with("subalgebras", mb.iter().map(|b| sub(&e, b)).collect::<Vec<_>>()))
        }
        Command::Compat { file, a, b } => {
            let (_, e) = load(file)?;
            let (x, y) = (element(&e, a)?, element(&e, b)?);
            let mut report = Report::new("compat")
                .with("a", e.label(x))
                .with("b", e.label(y))
                .with("compatible", decomposition(&e, are_compatible(&e, x, y)))
                .with("strongly_compatible", decomposition(&e, are_strongly_compatible(&e, x, y)));
            match CompatContext::new(&e, options.budget) {
                Ok(ctx) => {
                    let r = ctx.evaluate(x, y);
                    report.set(
                        "equivalences",
                        json!({
                            "strongly_compatible": r.strongly_compatible,
                            "compatible": r.compatible,
                            "in_observable_range": r.in_observable_range,
                            "in_boolean_subalgebra": r.in_boolean_subalgebra,
                            "sum_is_join": r.sum_is_join,
                            "agree": r.agrees(),
                        }),
                    );
                    if !r.agrees() || r.sum_is_join == Some(false) {
                        report.fail();
                    }
                }
                Err(err) => {
                    report.set("equivalences", Value::Null).set("note", err.to_string());
                }
            }
            Ok(report)
        }
        Command::Commutant { file, a } => {
            let (_, e) = load(file)?;
            let x = element(&e, a)?;
            let c = commutant(&e, x).map_err(failed)?;
            Ok(Report::new("commutant").with("a", e.label(x)).with("elements", sub(&e, &c)))
        }
        Command::Observable { action, file, atoms, count } => {
            let (_, e) = load(file)?;
            let xs = observables(&e, atoms, *count, options.seed)?;
            let mut report = Report::new(match action {
                ObservableAction::Build => "observable build",
                ObservableAction::Roundtrip => "observable roundtrip",
                ObservableAction::Question => "observable question",
                ObservableAction::Range => "observable range",
            });
            let mut items = Vec::new();
            for x in &xs {
                let mut item = observable_json(&e, x);
                let obj = item.as_object_mut().expect("object");
                match action {
                    ObservableAction::Build => {}
                    ObservableAction::Roundtrip => {
                        let sr = spectral_resolution(&e, x);
                        let back = observable_from_resolution(&e, &sr);
                        let ok = back.as_ref() == Ok(x) && uniqueness_check(&e, &sr);
                        obj.insert("round_trip".into(), ok.into());
                        if !ok {
                            report.fail();
                        }
                    }
                    ObservableAction::Question => match is_question(&e, x) {
                        Ok(v) => {
                            obj.insert("is_question".into(), v.into());
                        }
                        Err(err) => {
                            obj.insert("error".into(), err.to_string().into());
                            report.fail();
                        }
                    },
                    ObservableAction::Range => {
                        let r = range(&e, x);
                        obj.insert("range".into(), sub(&e, &r));
                        let boolean = match verify_range_boolean(&e, x) {
                            Ok(v) => {
                                if !v {
                                    report.fail();
                                }
                                Value::from(v)
                            }
                            Err(ObservableError::NotOrthoalgebra(_)) => Value::Null,
                            Err(err) => return Err(failed(err)),
                        };
                        obj.insert("range_is_boolean".into(), boolean);
                    }
                }
                items.push(item);
            }
            report.set("count", items.len());
            report.set("observables", items);
            Ok(report)
        }
        Command::ResolutionCheck { file, jumps } => {
            let (_, e) = load(file)?;
            let pairs = parse_pairs(&e, jumps)?;
            let mut report = Report::new("resolution check");
            match SpectralResolution::new(&e, pairs) {
                Ok(sr) => {
                    let x = observable_from_resolution(&e, &sr).map_err(failed)?;
                    let unique = uniqueness_check(&e, &sr);
                    report
                        .set("valid", true)
                        .set("observable", observable_json(&e, &x))
                        .set("unique", unique);
                    if !unique {
                        report.fail();
                    }
                }
                Err(err) => {
                    report.set("valid", false).set("error", err.to_string());
                    report.fail();
                }
            }
            Ok(report)
        }
        Command::States(path) => {
            let (_, e) = load(path)?;
            let p = state_polytope(&e);
            let s = &p.extreme_states;
            let od = is_order_determining(&e, s);
            let full = is_full(&e, s);
            let implication = check_full_implies_orthoalgebra(&e);
            let mut report = Report::new("states")
                .with("dimension", p.dimension.map_or(Value::Null, Value::from))
                .with("extreme_states", s.states.iter().map(|st| st.display(&e)).collect::<Vec<_>>())
                .with("order_determining", od.holds())
                .with("order_witness", od.witness().map_or(Value::Null, |w| labels(&e, w.iter().copied())))
                .with("full", full.holds())
                .with("full_witness", full.witness().map_or(Value::Null, |w| labels(&e, w.iter().copied())))
                .with("orthoalgebra", is_orthoalgebra(&e).holds())
                .with("full_implies_orthoalgebra", implication);
            if !implication {
                report.fail();
            }
            Ok(report)
        }
        Command::Clan(path) => {
            let (_, e) = load(path)?;
            let s = state_polytope(&e).extreme_states;
            let clan = clan_embedding(&e, &s).map_err(failed)?;
            let od = is_order_determining(&e, &s).holds();
            let mut table = Map::new();
            for a in e.elements() {
                let row: Vec<String> = clan.functions[a.0].iter().map(q).collect();
                table.insert(e.label(a).to_string(), row.into());
            }
            let mut report = Report::new("clan")
                .with("states", s.len())
                .with("functions", table)
                .with("injective", clan.is_injective)
                .with("order_isomorphism", clan.is_iso_onto_image)
                .with("order_determining", od)
                .with("clan_axioms", clan.clan_axioms_hold);
            if clan.is_iso_onto_image != od || (od && !clan.clan_axioms_hold) {
                report.fail();
            }
            Ok(report)
        }
        Command::Sweep => {
            let r = sweep(&SweepOptions {
                max_size: options.max_size,
                budget: options.budget,
                ..SweepOptions::default()
            })
            .map_err(|err| CliError::Usage(err.to_string()))?;
            let by_size: Map<String, Value> =
                r.count_by_size.iter().map(|(k, v)| (k.to_string(), (*v).into())).collect();
            let violations: Vec<Value> = r
                .violations
                .iter()
                .map(|v| json!({"property": v.property, "algebra": v.algebra, "detail": v.detail}))
                .collect();
            let mut report = Report::new("sweep")
                .with("max_size", options.max_size)
                .with("algebras", r.algebras)
                .with("count_by_size", by_size)
                .with("flag_counts", serde_json::to_value(&r.flag_counts).expect("map"))
                .with("checked", serde_json::to_value(&r.checked).expect("map"))
                .with("violations", violations)
                .with("compatible_not_strongly", finding(&r.compatible_not_strongly))
                .with("first_non_homogeneous", finding(&r.non_homogeneous));
            if !r.violations.is_empty() {
                report.fail();
            }
            Ok(report)
        }
        Command::Dot(path) => {
            let (name, e) = load(path)?;
            let name = name.unwrap_or_else(|| {
                path.file_stem().map_or("algebra".into(), |s| s.to_string_lossy().into_owned())
            });
            let mut report = Report::new("dot").with("dot", hasse_dot(&e, &name));
            report.raw = Some(hasse_dot(&e, &name));
            Ok(report)
        }
    }
}
