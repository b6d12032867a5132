//! UML class-diagram model read from XMI 2.x.

mod parse;
mod write;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

pub use parse::parse_xmi;
pub use write::write_xmi;

#[derive(Debug, thiserror::Error)]
pub enum XmiError {
    #[error("input is not valid UTF-8: {0}")]
    Encoding(#[from] std::str::Utf8Error),
    #[error("malformed XML at {line}:{column}: {message}")]
    Xml {
        line: u32,
        column: u32,
        message: String,
    },
    #[error("unsupported XMI format: {0}")]
    UnsupportedFormat(String),
    #[error("dangling reference to `{id}` from element `{from}`")]
    DanglingReference { id: String, from: String },
    #[error("invalid model structure: {0}")]
    InvalidStructure(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKind {
    Class,
    Interface,
    Operation,
    Attribute,
    Parameter,
    Generalization,
    InterfaceRealization,
    Association,
    Dependency,
}

impl ElementKind {
    pub fn is_classifier(self) -> bool {
        matches!(self, ElementKind::Class | ElementKind::Interface)
    }

    pub fn is_relationship(self) -> bool {
        matches!(
            self,
            ElementKind::Generalization
                | ElementKind::InterfaceRealization
                | ElementKind::Association
                | ElementKind::Dependency
        )
    }

    /// `xmi:type` local name used in serialized documents.
    pub fn xmi_type(self) -> &'static str {
        match self {
            ElementKind::Class => "Class",
            ElementKind::Interface => "Interface",
            ElementKind::Operation => "Operation",
            ElementKind::Attribute => "Property",
            ElementKind::Parameter => "Parameter",
            ElementKind::Generalization => "Generalization",
            ElementKind::InterfaceRealization => "InterfaceRealization",
            ElementKind::Association => "Association",
            ElementKind::Dependency => "Dependency",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Visibility {
    Public,
    Private,
    Protected,
}

impl Visibility {
    pub fn from_xmi(value: &str) -> Option<Self> {
        match value.trim().to_ascii_lowercase().as_str() {
            "public" => Some(Visibility::Public),
            "private" => Some(Visibility::Private),
            "protected" => Some(Visibility::Protected),
            _ => None,
        }
    }

    pub fn as_xmi(self) -> &'static str {
        match self {
            Visibility::Public => "public",
            Visibility::Private => "private",
            Visibility::Protected => "protected",
        }
    }
}

/// Non-access modifiers. The derived order is the order modifier triples are emitted in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modifier {
    Static,
    Final,
    Abstract,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    In,
    Return,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum AggregationKind {
    #[default]
    None,
    Shared,
    Composite,
}

impl AggregationKind {
    pub fn from_xmi(value: &str) -> Self {
        match value {
            "shared" => AggregationKind::Shared,
            "composite" => AggregationKind::Composite,
            _ => AggregationKind::None,
        }
    }

    pub fn as_xmi(self) -> &'static str {
        match self {
            AggregationKind::None => "none",
            AggregationKind::Shared => "shared",
            AggregationKind::Composite => "composite",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UmlElement {
    pub xmi_id: String,
    pub running_id: u32,
    pub kind: ElementKind,
    pub name: String,
    pub visibility: Option<Visibility>,
    pub modifiers: BTreeSet<Modifier>,
    /// Lower-cased stereotype names.
    pub stereotypes: BTreeSet<String>,
    pub owner: Option<String>,
    pub type_ref: Option<String>,
    pub source_ref: Option<String>,
    pub target_ref: Option<String>,
    pub return_type_ref: Option<String>,
    pub direction: Option<Direction>,
    pub aggregation: Option<AggregationKind>,
}

impl UmlElement {
    pub fn new(xmi_id: impl Into<String>, kind: ElementKind, name: impl Into<String>) -> Self {
        let name = name.into();
        UmlElement {
            xmi_id: xmi_id.into(),
            running_id: 0,
            kind,
            name: if name.is_empty() { ANON.to_string() } else { name },
            visibility: None,
            modifiers: BTreeSet::new(),
            stereotypes: BTreeSet::new(),
            owner: None,
            type_ref: None,
            source_ref: None,
            target_ref: None,
            return_type_ref: None,
            direction: None,
            aggregation: None,
        }
    }

    pub fn has_stereotype(&self, name: &str) -> bool {
        self.stereotypes.contains(name)
    }
}

/// Name given to elements that carry none.
pub const ANON: &str = "Anon";

/// Counts of XMI elements the parser did not turn into model elements.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub skipped: BTreeMap<String, usize>,
    /// References to document elements outside the supported subset (dropped).
    pub external_refs: usize,
}

impl Diagnostics {
    pub fn skipped_total(&self) -> usize {
        self.skipped.values().sum()
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "skipped {} element(s)", self.skipped_total())?;
        if !self.skipped.is_empty() {
            let parts: Vec<String> = self
                .skipped
                .iter()
                .map(|(k, n)| format!("{k}={n}"))
                .collect();
            write!(f, " [{}]", parts.join(", "))?;
        }
        write!(f, "; {} external reference(s) dropped", self.external_refs)
    }
}

#[derive(Debug, Clone, Default)]
pub struct UmlModel {
    elements: Vec<UmlElement>,
    id_index: HashMap<String, usize>,
    pub diagnostics: Diagnostics,
}

impl UmlModel {
    /// Builds a model from elements in document order, assigning running ids 1..n.
    pub fn from_elements(mut elements: Vec<UmlElement>) -> Result<Self, XmiError> {
        let mut id_index = HashMap::with_capacity(elements.len());
        for (i, el) in elements.iter_mut().enumerate() {
            el.running_id = (i + 1) as u32;
            id_index.insert(el.xmi_id.clone(), i);
        }
        let model = UmlModel {
            elements,
            id_index,
            diagnostics: Diagnostics::default(),
        };
        model.check_references()?;
        Ok(model)
    }

    fn check_references(&self) -> Result<(), XmiError> {
        for el in &self.elements {
            let owner_kind = el.owner.as_deref().and_then(|o| self.get(o)).map(|o| o.kind);
            let owner_ok = match el.kind {
                ElementKind::Attribute | ElementKind::Operation => {
                    owner_kind.is_some_and(ElementKind::is_classifier)
                }
                ElementKind::Parameter => owner_kind == Some(ElementKind::Operation),
                _ => true,
            };
            if !owner_ok && el.owner.as_deref().is_none_or(|o| self.id_index.contains_key(o)) {
                return Err(XmiError::InvalidStructure(format!(
                    "{:?} `{}` has no valid owner",
                    el.kind, el.xmi_id
                )));
            }
            let refs = [
                &el.owner,
                &el.type_ref,
                &el.source_ref,
                &el.target_ref,
                &el.return_type_ref,
            ];
            for id in refs.into_iter().flatten() {
                if !self.id_index.contains_key(id) {
                    return Err(XmiError::DanglingReference {
                        id: id.clone(),
                        from: el.xmi_id.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn elements(&self) -> &[UmlElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn get(&self, xmi_id: &str) -> Option<&UmlElement> {
        self.id_index.get(xmi_id).map(|&i| &self.elements[i])
    }

    pub fn count(&self, kind: ElementKind) -> usize {
        self.elements.iter().filter(|e| e.kind == kind).count()
    }

    /// Elements owned by `owner_id`, in document order.
    pub fn owned_by<'a>(&'a self, owner_id: &'a str) -> impl Iterator<Item = &'a UmlElement> + 'a {
        self.elements
            .iter()
            .filter(move |e| e.owner.as_deref() == Some(owner_id))
    }
}
