//! Query construction from resolved components and relationship items.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::ontology;
use crate::resolver::{Component, RelationshipItem, ResolverConfig};
use crate::uml::{Modifier, Visibility};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum QueryGenError {
    #[error("duplicate variable name `?{0}`")]
    DuplicateVar(String),
}

/// A generated query together with the components and relationships it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparqlQuery {
    pub query_text: String,
    pub components: Vec<Component>,
    pub relationships: Vec<RelationshipItem>,
    pub filters: Vec<(String, String)>,
    pub limit: Option<u64>,
}

impl SparqlQuery {
    /// Re-renders the text with a trailing `LIMIT`.
    pub fn with_limit(mut self, limit: Option<u64>) -> Self {
        self.limit = limit;
        self.query_text = render_text(&self.components, &self.relationships, &self.filters, limit);
        self
    }

    pub fn selected(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| c.selected)
    }
}

fn visibility_local(v: Visibility) -> &'static str {
    match v {
        Visibility::Public => ontology::PUBLIC,
        Visibility::Private => ontology::PRIVATE,
        Visibility::Protected => ontology::PROTECTED,
    }
}

fn modifier_local(m: Modifier) -> &'static str {
    match m {
        Modifier::Static => ontology::STATIC,
        Modifier::Final => ontology::FINAL,
        Modifier::Abstract => ontology::ABSTRACT,
    }
}

/// Builds the query text: `SELECT` over selected components, then in `WHERE`
/// one type triple per selected component followed by its modifiers, one
/// triple per relationship item, and pairwise `FILTER(!=)` for selected
/// components of the same kind.
pub fn build_query(
    components: &[Component],
    relationships: &[RelationshipItem],
    config: &ResolverConfig,
) -> Result<SparqlQuery, QueryGenError> {
    let mut seen = HashSet::new();
    for c in components {
        if !seen.insert(c.var_name.as_str()) {
            return Err(QueryGenError::DuplicateVar(c.var_name.clone()));
        }
    }

    let components: Vec<Component> = components
        .iter()
        .cloned()
        .map(|mut c| {
            if config.suppress_visibility {
                c.visibility = None;
            }
            c
        })
        .collect();

    let mut filters = Vec::new();
    if config.emit_distinct_filters {
        let selected: Vec<&Component> = components.iter().filter(|c| c.selected).collect();
        for (i, a) in selected.iter().enumerate() {
            for b in &selected[i + 1..] {
                if a.kind == b.kind {
                    filters.push((a.var_name.clone(), b.var_name.clone()));
                }
            }
        }
    }

    let query_text = render_text(&components, relationships, &filters, None);
    Ok(SparqlQuery {
        query_text,
        components,
        relationships: relationships.to_vec(),
        filters,
        limit: None,
    })
}

fn render_text(
    components: &[Component],
    relationships: &[RelationshipItem],
    filters: &[(String, String)],
    limit: Option<u64>,
) -> String {
    let mut out = String::new();
    out.push_str(ontology::PREFIX_DECL);
    out.push_str("\n\nSELECT ");
    let vars: Vec<String> = components
        .iter()
        .filter(|c| c.selected)
        .map(|c| format!("?{}", c.var_name))
        .collect();
    out.push_str(&vars.join(" "));
    out.push_str("\nWHERE {\n");
    for c in components.iter().filter(|c| c.selected) {
        let _ = writeln!(out, "?{}  a woc:{} .", c.var_name, c.kind.woc_local());
        if let Some(v) = c.visibility {
            let _ = writeln!(out, "?{} woc:{} woc:{} .", c.var_name, ontology::HAS_MODIFIER, visibility_local(v));
        }
        for m in &c.modifiers {
            let _ = writeln!(out, "?{} woc:{} woc:{} .", c.var_name, ontology::HAS_MODIFIER, modifier_local(*m));
        }
    }
    for r in relationships {
        let _ = writeln!(
            out,
            "?{} woc:{} ?{} .",
            r.from_item.var_name,
            r.relationship_type.predicate(),
            r.to_item.var_name
        );
    }
    for (a, b) in filters {
        let _ = writeln!(out, "FILTER(?{a} != ?{b})");
    }
    out.push_str("}\n");
    if let Some(n) = limit {
        let _ = writeln!(out, "LIMIT {n}");
    }
    out
}

/// Query text as saved to `.rq` files.
pub fn render(query: &SparqlQuery) -> String {
    query.query_text.clone()
}
