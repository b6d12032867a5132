use std::collections::HashSet;

use roxmltree::{Document, Node};

use super::{
    AggregationKind, Diagnostics, Direction, ElementKind, Modifier, UmlElement, UmlModel,
    Visibility, XmiError,
};

/// Parses an XMI 2.x document into a [`UmlModel`].
///
/// Elements are recognised by their `xmi:type`. Unsupported typed elements are
/// skipped (and counted in [`UmlModel::diagnostics`]) but their children are
/// still visited, so classes inside packages are found. Stereotypes come from
/// profile applications (`base_*` attributes) or a plain `stereotype` attribute.
pub fn parse_xmi(document: &[u8]) -> Result<UmlModel, XmiError> {
    let text = std::str::from_utf8(document)?;
    let doc = Document::parse(text).map_err(|e| {
        let pos = e.pos();
        XmiError::Xml {
            line: pos.row,
            column: pos.col,
            message: e.to_string(),
        }
    })?;
    check_version(doc.root_element())?;

    let all_ids: HashSet<&str> = doc
        .descendants()
        .filter_map(|n| xmi_attr(n, "id"))
        .collect();

    let mut walker = Walker::default();
    walker.visit_children(doc.root_element(), None);

    let Walker {
        mut elements,
        stereotype_apps,
        mut diagnostics,
        ..
    } = walker;

    let known: HashSet<String> = elements.iter().map(|e| e.xmi_id.clone()).collect();
    let mut pending_error = None;
    for el in elements.iter_mut() {
        let refs = [
            &mut el.type_ref,
            &mut el.source_ref,
            &mut el.target_ref,
            &mut el.return_type_ref,
        ];
        for slot in refs {
            let Some(id) = slot.as_deref() else { continue };
            if known.contains(id) {
                continue;
            }
            if all_ids.contains(id) {
                diagnostics.external_refs += 1;
                *slot = None;
            } else if pending_error.is_none() {
                pending_error = Some(XmiError::DanglingReference {
                    id: id.to_string(),
                    from: el.xmi_id.clone(),
                });
            }
        }
    }
    if let Some(err) = pending_error {
        return Err(err);
    }

    for (stereotype, base) in stereotype_apps {
        match elements.iter_mut().find(|e| e.xmi_id == base) {
            Some(el) => {
                el.stereotypes.insert(stereotype);
            }
            None if all_ids.contains(base.as_str()) => diagnostics.external_refs += 1,
            None => {
                return Err(XmiError::DanglingReference {
                    id: base,
                    from: format!("stereotype application `{stereotype}`"),
                })
            }
        }
    }

    let mut model = UmlModel::from_elements(elements)?;
    model.diagnostics = diagnostics;
    Ok(model)
}

fn check_version(root: Node) -> Result<(), XmiError> {
    for attr in root.attributes() {
        if attr.name() == "xmi.version" {
            return Err(XmiError::UnsupportedFormat(format!(
                "XMI {} (only XMI 2.x is supported)",
                attr.value()
            )));
        }
        if attr.name() == "version" && is_xmi_ns(attr.namespace()) && !attr.value().starts_with('2')
        {
            return Err(XmiError::UnsupportedFormat(format!(
                "XMI {} (only XMI 2.x is supported)",
                attr.value()
            )));
        }
    }
    if root.tag_name().name() == "XMI" && root.tag_name().namespace().is_none() {
        return Err(XmiError::UnsupportedFormat(
            "un-namespaced <XMI> root (XMI 1.x)".to_string(),
        ));
    }
    Ok(())
}

fn is_xmi_ns(ns: Option<&str>) -> bool {
    ns.is_some_and(|ns| ns.contains("XMI"))
}

/// Attribute in the XMI namespace, e.g. `xmi:id`.
fn xmi_attr<'a>(node: Node<'a, '_>, local: &str) -> Option<&'a str> {
    node.attributes()
        .find(|a| a.name() == local && is_xmi_ns(a.namespace()))
        .map(|a| a.value())
}

/// Un-namespaced attribute.
fn plain_attr<'a>(node: Node<'a, '_>, local: &str) -> Option<&'a str> {
    node.attributes()
        .find(|a| a.name() == local && a.namespace().is_none())
        .map(|a| a.value())
}

fn is_true(node: Node, local: &str) -> bool {
    plain_attr(node, local).is_some_and(|v| v.trim() == "true")
}

/// Reads an id reference held either as an attribute or as a child element
/// carrying `xmi:idref`. Child elements with only `href` point outside the
/// document and yield `None`.
fn id_ref(node: Node, local: &str) -> Option<String> {
    if let Some(v) = plain_attr(node, local) {
        return v.split_whitespace().next().map(str::to_string);
    }
    node.children()
        .filter(|c| c.is_element() && c.tag_name().name() == local)
        .find_map(|c| xmi_attr(c, "idref"))
        .map(str::to_string)
}

#[derive(Default)]
struct Walker {
    elements: Vec<UmlElement>,
    stereotype_apps: Vec<(String, String)>,
    diagnostics: Diagnostics,
    anon_ids: usize,
}

impl Walker {
    fn visit_children(&mut self, node: Node, ctx: Option<usize>) {
        for child in node.children().filter(Node::is_element) {
            self.visit(child, ctx);
        }
    }

    fn skip(&mut self, label: &str) {
        *self.diagnostics.skipped.entry(label.to_string()).or_default() += 1;
    }

    fn ctx_kind(&self, ctx: Option<usize>) -> Option<ElementKind> {
        ctx.map(|i| self.elements[i].kind)
    }

    fn visit(&mut self, node: Node, ctx: Option<usize>) {
        if let Some(base) = node
            .attributes()
            .find(|a| a.name().starts_with("base_") && a.namespace().is_none())
        {
            let name = node.tag_name().name().to_ascii_lowercase();
            self.stereotype_apps.push((name, base.value().to_string()));
            return;
        }

        let Some(xmi_type) = xmi_attr(node, "type") else {
            // untyped wrappers (uml:Model, nested reference elements) are transparent
            self.visit_children(node, ctx);
            return;
        };
        let type_name = xmi_type.rsplit(':').next().unwrap_or(xmi_type);
        let parent_kind = self.ctx_kind(ctx);

        let kind = match (type_name, parent_kind) {
            ("Class", _) => ElementKind::Class,
            ("Interface", _) => ElementKind::Interface,
            ("Association", _) => ElementKind::Association,
            ("Dependency", _) => ElementKind::Dependency,
            ("Operation", Some(k)) if k.is_classifier() => ElementKind::Operation,
            ("Property", Some(k)) if k.is_classifier() => ElementKind::Attribute,
            ("Property", Some(ElementKind::Association)) => {
                self.association_end(node, ctx.unwrap());
                return;
            }
            ("Parameter", Some(ElementKind::Operation)) => ElementKind::Parameter,
            ("Generalization", Some(k)) if k.is_classifier() => ElementKind::Generalization,
            ("InterfaceRealization", Some(k)) if k.is_classifier() => {
                ElementKind::InterfaceRealization
            }
            ("Model", _) => {
                self.visit_children(node, ctx);
                return;
            }
            ("Operation" | "Property" | "Parameter" | "Generalization" | "InterfaceRealization", _) => {
                self.skip(&format!("{type_name} (misplaced)"));
                return;
            }
            _ => {
                self.skip(type_name);
                self.visit_children(node, ctx);
                return;
            }
        };

        let xmi_id = match xmi_attr(node, "id") {
            Some(id) => id.to_string(),
            None => {
                self.anon_ids += 1;
                format!("_anon{}", self.anon_ids)
            }
        };
        let mut el = UmlElement::new(xmi_id, kind, plain_attr(node, "name").unwrap_or("").trim());
        el.visibility = plain_attr(node, "visibility").and_then(Visibility::from_xmi);
        if is_true(node, "isStatic") {
            el.modifiers.insert(Modifier::Static);
        }
        if is_true(node, "isLeaf") || is_true(node, "isFinal") || is_true(node, "isReadOnly") {
            el.modifiers.insert(Modifier::Final);
        }
        if is_true(node, "isAbstract") {
            el.modifiers.insert(Modifier::Abstract);
        }
        if let Some(list) = plain_attr(node, "stereotype") {
            el.stereotypes.extend(
                list.split(|c: char| c == ',' || c == ';' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(str::to_ascii_lowercase),
            );
        }
        let owner_id = ctx.map(|i| self.elements[i].xmi_id.clone());

        match kind {
            ElementKind::Operation | ElementKind::Attribute => {
                el.owner = owner_id;
                el.type_ref = id_ref(node, "type");
            }
            ElementKind::Parameter => {
                el.owner = owner_id;
                el.type_ref = id_ref(node, "type");
                let dir = plain_attr(node, "direction").unwrap_or("in");
                el.direction = Some(if dir == "return" {
                    Direction::Return
                } else {
                    Direction::In
                });
                if dir == "return" {
                    let op = ctx.unwrap();
                    self.elements[op].return_type_ref = el.type_ref.clone();
                }
            }
            ElementKind::Generalization => {
                el.source_ref = owner_id.clone();
                el.owner = owner_id;
                el.target_ref = id_ref(node, "general");
            }
            ElementKind::InterfaceRealization => {
                el.source_ref = id_ref(node, "client").or_else(|| owner_id.clone());
                el.owner = owner_id;
                el.target_ref = id_ref(node, "supplier").or_else(|| id_ref(node, "contract"));
            }
            ElementKind::Dependency => {
                el.source_ref = id_ref(node, "client");
                el.target_ref = id_ref(node, "supplier");
            }
            ElementKind::Association => {
                el.aggregation = Some(AggregationKind::None);
            }
            ElementKind::Class | ElementKind::Interface => {}
        }

        self.elements.push(el);
        let idx = self.elements.len() - 1;
        self.visit_children(node, Some(idx));
        if kind == ElementKind::Association && self.elements[idx].target_ref.is_none() {
            self.skip("Association (fewer than two ends)");
        }
    }

    /// First typed end becomes the source, the second the target.
    fn association_end(&mut self, node: Node, assoc: usize) {
        let ty = id_ref(node, "type");
        let agg = plain_attr(node, "aggregation").map(AggregationKind::from_xmi);
        let el = &mut self.elements[assoc];
        if let Some(agg) = agg.filter(|a| *a != AggregationKind::None) {
            el.aggregation = Some(agg);
        }
        if el.source_ref.is_none() {
            el.source_ref = ty;
        } else if el.target_ref.is_none() {
            el.target_ref = ty;
        }
    }
}
