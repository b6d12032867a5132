use std::fmt::Write as _;

use super::{AggregationKind, Direction, ElementKind, Modifier, UmlElement, UmlModel};

/// Serializes a model to the XMI 2.1 subset read by [`super::parse_xmi`].
///
/// Owned elements are nested under their owner; stereotypes are written with
/// the `stereotype` attribute.
pub fn write_xmi(model: &UmlModel) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<xmi:XMI xmi:version=\"2.1\" xmlns:xmi=\"http://schema.omg.org/spec/XMI/2.1\" xmlns:uml=\"http://www.omg.org/spec/UML/20090901\">\n");
    out.push_str("<uml:Model xmi:type=\"uml:Model\" xmi:id=\"_model\" name=\"model\">\n");
    for el in model.elements().iter().filter(|e| e.owner.is_none()) {
        write_element(model, el, "packagedElement", 1, &mut out);
    }
    out.push_str("</uml:Model>\n</xmi:XMI>\n");
    out
}

fn escape(value: &str) -> String {
    let mut s = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '&' => s.push_str("&amp;"),
            '<' => s.push_str("&lt;"),
            '>' => s.push_str("&gt;"),
            '"' => s.push_str("&quot;"),
            '\'' => s.push_str("&apos;"),
            _ => s.push(c),
        }
    }
    s
}

fn attr(out: &mut String, name: &str, value: &str) {
    let _ = write!(out, " {name}=\"{}\"", escape(value));
}

fn write_element(model: &UmlModel, el: &UmlElement, tag: &str, depth: usize, out: &mut String) {
    let indent = "  ".repeat(depth);
    let _ = write!(out, "{indent}<{tag}");
    attr(out, "xmi:type", &format!("uml:{}", el.kind.xmi_type()));
    attr(out, "xmi:id", &el.xmi_id);
    if !el.kind.is_relationship() || el.kind == ElementKind::Association {
        attr(out, "name", &el.name);
    }
    if let Some(v) = el.visibility {
        attr(out, "visibility", v.as_xmi());
    }
    for (m, name) in [
        (Modifier::Static, "isStatic"),
        (Modifier::Final, "isLeaf"),
        (Modifier::Abstract, "isAbstract"),
    ] {
        if el.modifiers.contains(&m) {
            attr(out, name, "true");
        }
    }
    if !el.stereotypes.is_empty() {
        let list: Vec<&str> = el.stereotypes.iter().map(String::as_str).collect();
        attr(out, "stereotype", &list.join(" "));
    }
    if let Some(t) = &el.type_ref {
        attr(out, "type", t);
    }
    if el.kind == ElementKind::Parameter {
        let dir = match el.direction {
            Some(Direction::Return) => "return",
            _ => "in",
        };
        attr(out, "direction", dir);
    }
    match el.kind {
        ElementKind::Generalization => {
            if let Some(t) = &el.target_ref {
                attr(out, "general", t);
            }
        }
        ElementKind::InterfaceRealization | ElementKind::Dependency => {
            if let Some(s) = &el.source_ref {
                attr(out, "client", s);
            }
            if let Some(t) = &el.target_ref {
                attr(out, "supplier", t);
            }
        }
        _ => {}
    }

    let children: Vec<&UmlElement> = model.owned_by(&el.xmi_id).collect();
    let has_ends = el.kind == ElementKind::Association && el.source_ref.is_some();
    if children.is_empty() && !has_ends {
        out.push_str("/>\n");
        return;
    }
    out.push_str(">\n");
    if has_ends {
        let agg = el.aggregation.unwrap_or_default();
        for (i, end) in [&el.source_ref, &el.target_ref].into_iter().enumerate() {
            let Some(end) = end else { continue };
            let _ = write!(out, "{indent}  <ownedEnd");
            attr(out, "xmi:type", "uml:Property");
            attr(out, "xmi:id", &format!("{}_end{i}", el.xmi_id));
            attr(out, "type", end);
            if i == 0 && agg != AggregationKind::None {
                attr(out, "aggregation", agg.as_xmi());
            }
            out.push_str("/>\n");
        }
    }
    for child in children {
        let tag = match child.kind {
            ElementKind::Operation => "ownedOperation",
            ElementKind::Attribute => "ownedAttribute",
            ElementKind::Parameter => "ownedParameter",
            ElementKind::Generalization => "generalization",
            ElementKind::InterfaceRealization => "interfaceRealization",
            _ => "packagedElement",
        };
        write_element(model, child, tag, depth + 1, out);
    }
    let _ = writeln!(out, "{indent}</{tag}>");
}
