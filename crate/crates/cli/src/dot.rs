//! Hasse diagrams in Graphviz DOT.

use ea_core::classify::is_sharp;
use ea_core::{EffectAlgebra, Element};

/// Pairs `(a, b)` with `b` covering `a`.
pub fn covers(e: &EffectAlgebra) -> Vec<(Element, Element)> {
    let mut out = Vec::new();
    for a in e.elements() {
        for b in e.elements() {
            if a == b || !e.leq(a, b) {
                continue;
            }
            let between = e
                .elements()
                .any(|c| c != a && c != b && e.leq(a, c) && e.leq(c, b));
            if !between {
                out.push((a, b));
            }
        }
    }
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// The Hasse diagram of `≤`, bottom to top. Sharp elements are drawn as
/// filled boxes.
pub fn hasse_dot(e: &EffectAlgebra, name: &str) -> String {
    let mut out = format!("digraph {} {{\n  rankdir=BT;\n  node [shape=ellipse];\n", quote(name));
    for a in e.elements() {
        let style = if is_sharp(e, a) { ", shape=box, style=filled, fillcolor=lightgray" } else { "" };
        out.push_str(&format!("  n{} [label={}{style}];\n", a.0, quote(e.label(a))));
    }
    for (a, b) in covers(e) {
        out.push_str(&format!("  n{} -> n{};\n", a.0, b.0));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ea_core::{generate, GeneratorSpec};

    #[test]
    fn chain_diagram() {
        let e = generate(&GeneratorSpec::parse("mvchain 2").unwrap()).unwrap();
        assert_eq!(
            hasse_dot(&e, "c2"),
            "digraph \"c2\" {\n  rankdir=BT;\n  node [shape=ellipse];\n  \
             n0 [label=\"0\", shape=box, style=filled, fillcolor=lightgray];\n  \
             n1 [label=\"1/2\"];\n  \
             n2 [label=\"1\", shape=box, style=filled, fillcolor=lightgray];\n  \
             n0 -> n1;\n  n1 -> n2;\n}\n"
        );
    }

    #[test]
    fn boolean_square_has_four_covers() {
        let e = generate(&GeneratorSpec::parse("boolean 2").unwrap()).unwrap();
        assert_eq!(covers(&e).len(), 4);
    }
}
