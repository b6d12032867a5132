//! Constant dictionary for the Web of Code (`woc:`) vocabulary.
//!
//! Query construction and fact emission both read their keywords from here,
//! so the two sides cannot drift apart.

pub const WOC_NS: &str = "http://rdf.webofcode.org/woc/";
pub const WOC_PREFIX: &str = "woc";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

/// `PREFIX` line that opens every generated query.
pub const PREFIX_DECL: &str = "PREFIX woc: <http://rdf.webofcode.org/woc/>";

// entities
pub const CLASS: &str = "Class";
pub const INTERFACE: &str = "Interface";
pub const METHOD: &str = "Method";
pub const CONSTRUCTOR: &str = "Constructor";
pub const FIELD: &str = "Field";
pub const PARAMETER: &str = "Parameter";

// modifiers
pub const PUBLIC: &str = "Public";
pub const PRIVATE: &str = "Private";
pub const PROTECTED: &str = "Protected";
pub const STATIC: &str = "Static";
pub const FINAL: &str = "Final";
pub const ABSTRACT: &str = "Abstract";

// relations
pub const HAS_MODIFIER: &str = "hasModifier";
pub const HAS_METHOD: &str = "hasMethod";
pub const HAS_CONSTRUCTOR: &str = "hasConstructor";
pub const HAS_FIELD: &str = "hasField";
pub const HAS_PARAMETER: &str = "hasParameter";
pub const HAS_TYPE: &str = "hasType";
pub const HAS_RETURN_TYPE: &str = "hasReturnType";
pub const EXTENDS: &str = "extends";
pub const IMPLEMENTS: &str = "implements";
pub const REFERENCES: &str = "references";
pub const OVERRIDES: &str = "overrides";

/// Full IRI of a `woc:` local name.
pub fn iri(local: &str) -> String {
    format!("{WOC_NS}{local}")
}

/// Local part of an IRI inside the `woc:` namespace.
pub fn local_name(iri: &str) -> Option<&str> {
    iri.strip_prefix(WOC_NS)
}
