//! The `.ea` document format.
//!
//! ```text
//! # four-element Boolean algebra
//! name square
//! elements 0 a a' 1
//! a + a' = 1
//! ```
//!
//! Statements end at a newline or `;`, and `#` starts a comment. A document
//! either declares `elements` and sum triples (an optional leading `sum`
//! keyword is accepted) or holds a single `generate <spec>` statement.
//! Sums with 0 are implied.

use std::collections::BTreeMap;
use std::fmt;

use ea_core::algebra::Violation;
use ea_core::{generate, validate, EffectAlgebra, GeneratorSpec, RawTable, ValidationReport};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraDocument {
    pub name: Option<String>,
    pub body: Body,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    Explicit {
        elements: Vec<String>,
        sums: Vec<(String, String, String)>,
    },
    Generate(GeneratorSpec),
}

/// Where an error occurred: 1-based line and column, and the 1-based
/// index of the offending token within its statement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
    pub token: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {} (token {})", self.line, self.column, self.token)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("syntax error at {at}: {message}")]
    Syntax { at: Position, message: String },
    #[error("unknown label `{label}` at {at}")]
    UnknownLabel { at: Position, label: String },
    #[error("error at {at}: {message}")]
    Semantic { at: Position, message: String },
    #[error("{report}")]
    Validation {
        report: ValidationReport,
        /// Labels of the rejected table, to name witnesses.
        labels: Vec<String>,
    },
}

impl DslError {
    pub fn position(&self) -> Option<Position> {
        match self {
            DslError::Syntax { at, .. }
            | DslError::UnknownLabel { at, .. }
            | DslError::Semantic { at, .. } => Some(*at),
            DslError::Validation { .. } => None,
        }
    }
}

/// Renders a validation violation with element labels.
pub fn describe_violation(v: &Violation, labels: &[String]) -> String {
    let name = |i: usize| labels.get(i).map_or_else(|| i.to_string(), Clone::clone);
    match v {
        Violation::AxiomViolation { axiom, witness } => {
            let w: Vec<String> = witness.iter().map(|e| name(e.0)).collect();
            format!("{axiom} at ({})", w.join(", "))
        }
        Violation::NonPoset { a, b } => {
            format!("order not antisymmetric: {} <= {} <= {}", name(a.0), name(b.0), name(a.0))
        }
    }
}

#[derive(Clone, Debug)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

impl Token<'_> {
    fn at(&self, line: usize, index: usize) -> Position {
        Position { line, column: self.column, token: index + 1 }
    }
}

fn tokenize(line: &str, offset: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let col = |byte: usize| line[..byte].chars().count() + offset + 1;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() || ch == '+' || ch == '=' {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], column: col(s) });
            }
            if !ch.is_whitespace() {
                out.push(Token { text: &line[i..i + 1], column: col(i) });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: col(s) });
    }
    out
}

/// One statement: its line and tokens.
struct Statement<'a> {
    line: usize,
    tokens: Vec<Token<'a>>,
    /// Raw text after the keyword, for `generate` and `name`.
    rest: &'a str,
}

fn statements(text: &str) -> Vec<Statement<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let code = raw.split_once('#').map_or(raw, |(c, _)| c);
        let mut offset = 0;
        for part in code.split(';') {
            let column_offset = code[..offset].chars().count();
            let tokens = tokenize(part, column_offset);
            offset += part.len() + 1;
            if tokens.is_empty() {
                continue;
            }
            let first = tokens[0].text;
            let rest = part.trim_start()[first.len()..].trim();
            out.push(Statement { line: i + 1, tokens, rest });
        }
    }
    out
}

fn is_label(s: &str) -> bool {
    s != "+" && s != "="
}

/// Parses a document without building the algebra.
pub fn parse_document(text: &str) -> Result<AlgebraDocument, DslError> {
    let mut name = None;
    let mut elements: Option<(Vec<String>, Position)> = None;
    let mut sums: Vec<((String, String, String), [Position; 3])> = Vec::new();
    let mut generator: Option<(GeneratorSpec, Position)> = None;

    for st in statements(text) {
        let line = st.line;
        let t = &st.tokens;
        let head = &t[0];
        match head.text {
            "name" => {
                if st.rest.is_empty() {
                    return Err(DslError::Syntax { at: head.at(line, 0), message: "expected a name".into() });
                }
                name = Some(st.rest.to_string());
            }
            "elements" => {
                if elements.is_some() {
                    return Err(DslError::Semantic {
                        at: head.at(line, 0),
                        message: "elements declared twice".into(),
                    });
                }
                let mut labels: Vec<String> = Vec::new();
                for (i, tok) in t.iter().enumerate().skip(1) {
                    if !is_label(tok.text) {
                        return Err(DslError::Syntax {
                            at: tok.at(line, i),
                            message: format!("expected a label, found `{}`", tok.text),
                        });
                    }
                    if labels.iter().any(|l| l == tok.text) {
                        return Err(DslError::Semantic {
                            at: tok.at(line, i),
                            message: format!("label `{}` declared twice", tok.text),
                        });
                    }
                    labels.push(tok.text.to_string());
                }
                for required in ["0", "1"] {
                    if !labels.iter().any(|l| l == required) {
                        return Err(DslError::Semantic {
                            at: head.at(line, 0),
                            message: format!("elements must include `{required}`"),
                        });
                    }
                }
                elements = Some((labels, head.at(line, 0)));
            }
            "generate" => {
                let spec = GeneratorSpec::parse(st.rest).map_err(|err| DslError::Semantic {
                    at: t.get(1).unwrap_or(head).at(line, usize::from(t.len() > 1)),
                    message: err.to_string(),
                })?;
                if generator.is_some() {
                    return Err(DslError::Semantic {
                        at: head.at(line, 0),
                        message: "more than one generate statement".into(),
                    });
                }
                generator = Some((spec, head.at(line, 0)));
            }
            _ => {
                let skip = usize::from(head.text == "sum");
                let body = &t[skip..];
                let expected = ["label", "+", "label", "=", "label"];
                for (k, want) in expected.iter().enumerate() {
                    let Some(tok) = body.get(k) else {
                        let last = body.last().unwrap_or(head);
                        let at = Position {
                            line,
                            column: last.column + last.text.chars().count(),
                            token: skip + k + 1,
                        };
                        return Err(DslError::Syntax {
                            at,
                            message: format!("expected {}, found end of statement", describe(want)),
                        });
                    };
                    let ok = if *want == "label" { is_label(tok.text) } else { tok.text == *want };
                    if !ok {
                        let message = if k == 0 && skip == 0 {
                            format!("expected a statement, found `{}`", tok.text)
                        } else {
                            format!("expected {}, found `{}`", describe(want), tok.text)
                        };
                        return Err(DslError::Syntax { at: tok.at(line, skip + k), message });
                    }
                }
                if let Some(tok) = body.get(5) {
                    return Err(DslError::Syntax {
                        at: tok.at(line, skip + 5),
                        message: format!("unexpected `{}` after sum", tok.text),
                    });
                }
                let pos = [0, 2, 4].map(|k| body[k].at(line, skip + k));
                sums.push((
                    (body[0].text.to_string(), body[2].text.to_string(), body[4].text.to_string()),
                    pos,
                ));
            }
        }
    }

    let body = match (generator, elements) {
        (Some((spec, at)), None) => {
            if let Some((_, pos)) = sums.first() {
                return Err(DslError::Semantic {
                    at: pos[0],
                    message: "sums cannot be combined with generate".into(),
                });
            }
            let _ = at;
            Body::Generate(spec)
        }
        (Some((_, at)), Some(_)) => {
            return Err(DslError::Semantic {
                at,
                message: "generate cannot be combined with elements".into(),
            })
        }
        (None, Some((labels, _))) => {
            let mut seen: BTreeMap<(&str, &str), &str> = BTreeMap::new();
            for (triple, pos) in &sums {
                for (label, at) in [&triple.0, &triple.1, &triple.2].into_iter().zip(pos) {
                    if !labels.contains(label) {
                        return Err(DslError::UnknownLabel { at: *at, label: label.clone() });
                    }
                }
                let (a, b, c) = (triple.0.as_str(), triple.1.as_str(), triple.2.as_str());
                let key = if a <= b { (a, b) } else { (b, a) };
                let implied = if a == "0" { Some(b) } else if b == "0" { Some(a) } else { None };
                match seen.get(&key).copied().or(implied) {
                    Some(old) if old != c => {
                        return Err(DslError::Semantic {
                            at: pos[2],
                            message: format!("{a} + {b} is already {old}, cannot also be {c}"),
                        })
                    }
                    _ => {
                        seen.insert(key, c);
                    }
                }
            }
            Body::Explicit {
                elements: labels,
                sums: sums.into_iter().map(|(t, _)| t).collect(),
            }
        }
        (None, None) => {
            let at = sums.first().map_or(Position { line: 1, column: 1, token: 1 }, |(_, p)| p[0]);
            return Err(DslError::Semantic {
                at,
                message: "document declares neither elements nor a generator".into(),
            });
        }
    };
    Ok(AlgebraDocument { name, body })
}

fn describe(want: &str) -> String {
    if want == "label" {
        "a label".to_string()
    } else {
        format!("`{want}`")
    }
}

/// Builds and validates the algebra a document describes.
pub fn build(doc: &AlgebraDocument) -> Result<EffectAlgebra, DslError> {
    match &doc.body {
        Body::Generate(spec) => generate(spec).map_err(|err| match err {
            ea_core::catalog::CatalogError::Validation(report) => DslError::Validation { report, labels: Vec::new() },
            other => DslError::Semantic {
                at: Position { line: 1, column: 1, token: 1 },
                message: other.to_string(),
            },
        }),
        Body::Explicit { elements, sums } => {
            let index = |l: &str| elements.iter().position(|x| x == l).expect("labels resolved");
            let mut raw = RawTable::with_zero_sums(elements.len(), index("0"), index("1"));
            raw.set_labels(elements.clone());
            for (a, b, c) in sums {
                raw.set_symmetric(index(a), index(b), index(c));
            }
            validate(&raw).map_err(|report| DslError::Validation { report, labels: elements.clone() })
        }
    }
}

/// Parses and builds in one step.
pub fn parse(text: &str) -> Result<(AlgebraDocument, EffectAlgebra), DslError> {
    let doc = parse_document(text)?;
    let e = build(&doc)?;
    Ok((doc, e))
}

/// Canonical text of a document: `name`, then `elements` and one sum per
/// line, or the single `generate` line.
pub fn serialize(doc: &AlgebraDocument) -> String {
    let mut out = String::new();
    if let Some(name) = &doc.name {
        out.push_str(&format!("name {name}\n"));
    }
    match &doc.body {
        Body::Generate(spec) => out.push_str(&format!("generate {spec}\n")),
        Body::Explicit { elements, sums } => {
            out.push_str(&format!("elements {}\n", elements.join(" ")));
            for (a, b, c) in sums {
                out.push_str(&format!("{a} + {b} = {c}\n"));
            }
        }
    }
    out
}

/// An explicit document listing every sum `a + b` with `a ≤ b` in carrier
/// order and neither summand 0.
pub fn document_of(e: &EffectAlgebra, name: Option<String>) -> AlgebraDocument {
    let mut sums = Vec::new();
    for a in e.elements().filter(|&a| a != e.zero()) {
        for b in e.elements().skip(a.0).filter(|&b| b != e.zero()) {
            if let Some(c) = e.sum(a, b) {
                sums.push((e.label(a).to_string(), e.label(b).to_string(), e.label(c).to_string()));
            }
        }
    }
    AlgebraDocument {
        name,
        body: Body::Explicit { elements: e.labels().to_vec(), sums },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_line_boolean() {
        let (_, e) = parse("elements 0 a a' 1 ; a + a' = 1").unwrap();
        assert_eq!(e.size(), 4);
        let a = e.find("a").unwrap();
        assert_eq!(e.complement(a), e.find("a'").unwrap());
    }

    #[test]
    fn generator_document() {
        let (doc, e) = parse("# chain\ngenerate mvchain 4\n").unwrap();
        assert_eq!(e.size(), 5);
        assert_eq!(serialize(&doc), "generate mvchain 4\n");
    }

    #[test]
    fn missing_label_is_token_three() {
        let err = parse_document("elements 0 a 1\na + = 1").unwrap_err();
        match err {
            DslError::Syntax { at, .. } => {
                assert_eq!(at, Position { line: 2, column: 5, token: 3 });
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_label_position() {
        let err = parse_document("elements 0 a 1\nsum a + b = 1").unwrap_err();
        assert_eq!(
            err,
            DslError::UnknownLabel {
                at: Position { line: 2, column: 9, token: 4 },
                label: "b".into()
            }
        );
    }

    #[test]
    fn validation_failure_names_labels() {
        let err = parse("elements 0 a b 1\na + a = 1").unwrap_err();
        let DslError::Validation { report, labels } = err else { panic!() };
        let text: Vec<String> = report.violations.iter().map(|v| describe_violation(v, &labels)).collect();
        assert!(text.iter().any(|t| t.starts_with("unique-complement")), "{text:?}");
    }

    #[test]
    fn conflicting_sums() {
        let err = parse("elements 0 a b 1\na + a = b\na + a = 1").unwrap_err();
        assert!(matches!(err, DslError::Semantic { .. }), "{err:?}");
    }

    #[test]
    fn explicit_round_trip() {
        let text = "name square\nelements 0 a a' 1\na + a' = 1\n";
        let doc = parse_document(text).unwrap();
        assert_eq!(serialize(&doc), text);
        let e = build(&doc).unwrap();
        let again = document_of(&e, Some("square".into()));
        assert_eq!(serialize(&again), text);
    }
}
