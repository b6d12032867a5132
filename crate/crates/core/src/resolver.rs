//! Turns a [`UmlModel`] into query nodes ([`Component`]) and edges
//! ([`RelationshipItem`]).

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::ontology;
use crate::uml::{AggregationKind, Direction, ElementKind, Modifier, UmlElement, UmlModel, Visibility};

/// Operation stereotypes understood by the resolver (compared lower-cased).
pub mod stereotypes {
    pub const CONSTRUCTOR: &str = "constructor";
    pub const CREATE: &str = "create";
    pub const OVERRIDE: &str = "override";
    /// Marks the operation through which its classifier touches other elements;
    /// classifier-level references are emitted from it instead.
    pub const INTERACTION: &str = "interaction";
    pub const GETTER: &str = "getter";
    pub const SETTER: &str = "setter";
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ResolveError {
    #[error("method `{method}` is stereotyped override but no parent declares a method of that name")]
    NoOverriddenMethod { method: String },
    #[error("method `{method}` overrides ambiguously: {candidates} parent methods share its name")]
    AmbiguousOverride { method: String, candidates: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentKind {
    Class,
    Interface,
    Method,
    Constructor,
    Field,
    Parameter,
}

impl ComponentKind {
    pub fn woc_local(self) -> &'static str {
        match self {
            ComponentKind::Class => ontology::CLASS,
            ComponentKind::Interface => ontology::INTERFACE,
            ComponentKind::Method => ontology::METHOD,
            ComponentKind::Constructor => ontology::CONSTRUCTOR,
            ComponentKind::Field => ontology::FIELD,
            ComponentKind::Parameter => ontology::PARAMETER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Component {
    pub var_name: String,
    pub kind: ComponentKind,
    pub visibility: Option<Visibility>,
    pub modifiers: BTreeSet<Modifier>,
    pub running_id: u32,
    /// Whether the component is projected in `SELECT`.
    pub selected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationshipKind {
    Extends,
    Implements,
    References,
    HasMethod,
    HasConstructor,
    HasField,
    HasParameter,
    HasType,
    HasReturnType,
    Overrides,
}

impl RelationshipKind {
    pub const ALL: [RelationshipKind; 10] = [
        RelationshipKind::Extends,
        RelationshipKind::Implements,
        RelationshipKind::References,
        RelationshipKind::HasMethod,
        RelationshipKind::HasConstructor,
        RelationshipKind::HasField,
        RelationshipKind::HasParameter,
        RelationshipKind::HasType,
        RelationshipKind::HasReturnType,
        RelationshipKind::Overrides,
    ];

    /// `woc:` predicate local name.
    pub fn predicate(self) -> &'static str {
        match self {
            RelationshipKind::Extends => ontology::EXTENDS,
            RelationshipKind::Implements => ontology::IMPLEMENTS,
            RelationshipKind::References => ontology::REFERENCES,
            RelationshipKind::HasMethod => ontology::HAS_METHOD,
            RelationshipKind::HasConstructor => ontology::HAS_CONSTRUCTOR,
            RelationshipKind::HasField => ontology::HAS_FIELD,
            RelationshipKind::HasParameter => ontology::HAS_PARAMETER,
            RelationshipKind::HasType => ontology::HAS_TYPE,
            RelationshipKind::HasReturnType => ontology::HAS_RETURN_TYPE,
            RelationshipKind::Overrides => ontology::OVERRIDES,
        }
    }
}

impl fmt::Display for RelationshipKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "woc:{}", self.predicate())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationshipItem {
    pub from_item: Component,
    pub relationship_type: RelationshipKind,
    pub to_item: Component,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolverConfig {
    pub suppress_visibility: bool,
    pub parse_stereotypes: bool,
    pub emit_distinct_filters: bool,
}

impl Default for ResolverConfig {
    fn default() -> Self {
        ResolverConfig {
            suppress_visibility: false,
            parse_stereotypes: false,
            emit_distinct_filters: true,
        }
    }
}

/// Strips characters outside `[A-Za-z0-9_]`, prefixes `E` when the rest does
/// not start with a letter and appends the running id.
pub fn unique_var_name(base_name: &str, running_id: u32) -> String {
    let mut name: String = base_name
        .chars()
        .filter(|c| c.is_ascii_alphanumeric() || *c == '_')
        .collect();
    if !name.starts_with(|c: char| c.is_ascii_alphabetic()) {
        name.insert(0, 'E');
    }
    name.push_str(&running_id.to_string());
    name
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Resolution {
    pub components: Vec<Component>,
    pub relationships: Vec<RelationshipItem>,
}

/// Resolves every supported element of `model` into components and relationship items.
pub fn resolve(model: &UmlModel, config: &ResolverConfig) -> Result<Resolution, ResolveError> {
    Resolver::new(model, config).run()
}

struct Resolver<'a> {
    model: &'a UmlModel,
    config: &'a ResolverConfig,
    components: Vec<Component>,
    by_id: HashMap<&'a str, usize>,
    names: HashSet<String>,
    relationships: Vec<RelationshipItem>,
}

impl<'a> Resolver<'a> {
    fn new(model: &'a UmlModel, config: &'a ResolverConfig) -> Self {
        Resolver {
            model,
            config,
            components: Vec::new(),
            by_id: HashMap::new(),
            names: HashSet::new(),
            relationships: Vec::new(),
        }
    }

    fn is_constructor(&self, el: &UmlElement) -> bool {
        self.config.parse_stereotypes
            && (el.has_stereotype(stereotypes::CONSTRUCTOR) || el.has_stereotype(stereotypes::CREATE))
    }

    fn push_component(
        &mut self,
        name: &str,
        running_id: u32,
        kind: ComponentKind,
        el: Option<&UmlElement>,
        selected: bool,
    ) -> usize {
        let mut var_name = unique_var_name(name, running_id);
        if self.names.contains(&var_name) {
            // "Foo1"+2 and "Foo"+12 collide; keep the running id as suffix
            var_name = format!("{}_{}", &var_name[..var_name.len() - running_id.to_string().len()], running_id);
        }
        self.names.insert(var_name.clone());
        let (visibility, mut modifiers) = match el {
            Some(el) => (el.visibility, el.modifiers.clone()),
            None => (None, BTreeSet::new()),
        };
        if kind == ComponentKind::Interface || kind == ComponentKind::Parameter {
            modifiers.remove(&Modifier::Abstract);
        }
        self.components.push(Component {
            var_name,
            kind,
            visibility: if self.config.suppress_visibility { None } else { visibility },
            modifiers,
            running_id,
            selected,
        });
        self.components.len() - 1
    }

    fn component_for(&self, xmi_id: Option<&str>) -> Option<usize> {
        xmi_id.and_then(|id| self.by_id.get(id).copied())
    }

    fn classifier_component(&self, xmi_id: Option<&str>) -> Option<usize> {
        let idx = self.component_for(xmi_id)?;
        matches!(
            self.components[idx].kind,
            ComponentKind::Class | ComponentKind::Interface
        )
        .then_some(idx)
    }

    fn relate(&mut self, from: usize, kind: RelationshipKind, to: usize) {
        self.relationships.push(RelationshipItem {
            from_item: self.components[from].clone(),
            relationship_type: kind,
            to_item: self.components[to].clone(),
        });
    }

    fn run(mut self) -> Result<Resolution, ResolveError> {
        let model = self.model;
        for el in model.elements() {
            let kind = match el.kind {
                ElementKind::Class => ComponentKind::Class,
                ElementKind::Interface => ComponentKind::Interface,
                ElementKind::Attribute => ComponentKind::Field,
                ElementKind::Operation if self.is_constructor(el) => ComponentKind::Constructor,
                ElementKind::Operation => ComponentKind::Method,
                ElementKind::Parameter if el.direction != Some(Direction::Return) => {
                    ComponentKind::Parameter
                }
                _ => continue,
            };
            let selected = kind != ComponentKind::Parameter;
            let idx = self.push_component(&el.name, el.running_id, kind, Some(el), selected);
            self.by_id.insert(el.xmi_id.as_str(), idx);
        }

        for el in model.elements() {
            match el.kind {
                ElementKind::Operation => self.resolve_operation(el)?,
                ElementKind::Attribute => {
                    let field = self.by_id[el.xmi_id.as_str()];
                    if let Some(owner) = self.classifier_component(el.owner.as_deref()) {
                        self.relate(owner, RelationshipKind::HasField, field);
                    }
                    if let Some(ty) = self.classifier_component(el.type_ref.as_deref()) {
                        self.relate(field, RelationshipKind::HasType, ty);
                    }
                }
                ElementKind::Parameter => {
                    let Some(&param) = self.by_id.get(el.xmi_id.as_str()) else {
                        continue;
                    };
                    if let Some(op) = self.component_for(el.owner.as_deref()) {
                        self.relate(op, RelationshipKind::HasParameter, param);
                    }
                    if let Some(ty) = self.classifier_component(el.type_ref.as_deref()) {
                        self.relate(param, RelationshipKind::HasType, ty);
                    }
                }
                ElementKind::Generalization => {
                    self.resolve_edge(el, RelationshipKind::Extends);
                }
                ElementKind::InterfaceRealization => {
                    self.resolve_edge(el, RelationshipKind::Implements);
                }
                ElementKind::Association
                    if el.aggregation.unwrap_or_default() != AggregationKind::None =>
                {
                    self.resolve_aggregation(el);
                }
                ElementKind::Association | ElementKind::Dependency => self.resolve_reference(el),
                ElementKind::Class | ElementKind::Interface => {}
            }
        }

        Ok(Resolution {
            components: self.components,
            relationships: self.relationships,
        })
    }

    fn resolve_operation(&mut self, el: &UmlElement) -> Result<(), ResolveError> {
        let op = self.by_id[el.xmi_id.as_str()];
        let ownership = if self.components[op].kind == ComponentKind::Constructor {
            RelationshipKind::HasConstructor
        } else {
            RelationshipKind::HasMethod
        };
        if let Some(owner) = self.classifier_component(el.owner.as_deref()) {
            self.relate(owner, ownership, op);
        }
        if let Some(ty) = self.classifier_component(el.return_type_ref.as_deref()) {
            self.relate(op, RelationshipKind::HasReturnType, ty);
        }
        if self.config.parse_stereotypes && el.has_stereotype(stereotypes::OVERRIDE) {
            let parent = self.overridden_method(el)?;
            self.relate(op, RelationshipKind::Overrides, parent);
        }
        Ok(())
    }

    /// Nearest ancestor operation with the same name; ancestors are searched
    /// breadth-first over generalizations and interface realizations.
    fn overridden_method(&self, el: &UmlElement) -> Result<usize, ResolveError> {
        let model = self.model;
        let Some(owner) = el.owner.as_deref() else {
            return Err(ResolveError::NoOverriddenMethod {
                method: el.name.clone(),
            });
        };
        let parents_of = |id: &str| -> Vec<&'a str> {
            model
                .elements()
                .iter()
                .filter(|e| {
                    matches!(
                        e.kind,
                        ElementKind::Generalization | ElementKind::InterfaceRealization
                    ) && e.source_ref.as_deref() == Some(id)
                })
                .filter_map(|e| e.target_ref.as_deref())
                .collect()
        };
        let mut seen: HashSet<&str> = HashSet::from([owner]);
        let mut level: VecDeque<&str> = parents_of(owner).into();
        while !level.is_empty() {
            let mut candidates = Vec::new();
            let mut next = VecDeque::new();
            for cls in level.drain(..) {
                if !seen.insert(cls) {
                    continue;
                }
                candidates.extend(
                    model
                        .owned_by(cls)
                        .filter(|m| m.kind == ElementKind::Operation && m.name == el.name)
                        .filter_map(|m| self.by_id.get(m.xmi_id.as_str()).copied()),
                );
                next.extend(parents_of(cls));
            }
            match candidates.len() {
                0 => level = next,
                1 => return Ok(candidates[0]),
                n => {
                    return Err(ResolveError::AmbiguousOverride {
                        method: el.name.clone(),
                        candidates: n,
                    })
                }
            }
        }
        Err(ResolveError::NoOverriddenMethod {
            method: el.name.clone(),
        })
    }

    fn resolve_edge(&mut self, el: &UmlElement, kind: RelationshipKind) {
        let from = self.classifier_component(el.source_ref.as_deref());
        let to = self.classifier_component(el.target_ref.as_deref());
        if let (Some(from), Some(to)) = (from, to) {
            self.relate(from, kind, to);
        }
    }

    fn resolve_reference(&mut self, el: &UmlElement) {
        let (Some(from), Some(to)) = (
            self.component_for(el.source_ref.as_deref()),
            self.component_for(el.target_ref.as_deref()),
        ) else {
            return;
        };
        let mut sources = Vec::new();
        if self.config.parse_stereotypes {
            if let Some(src) = el.source_ref.as_deref() {
                sources.extend(
                    self.model
                        .owned_by(src)
                        .filter(|m| {
                            m.kind == ElementKind::Operation
                                && m.has_stereotype(stereotypes::INTERACTION)
                        })
                        .filter_map(|m| self.by_id.get(m.xmi_id.as_str()).copied()),
                );
            }
        }
        if sources.is_empty() {
            sources.push(from);
        }
        for src in sources {
            self.relate(src, RelationshipKind::References, to);
        }
    }

    /// Shared and composite associations become a field on the source typed by the target.
    fn resolve_aggregation(&mut self, el: &UmlElement) {
        let (Some(whole), Some(part)) = (
            self.classifier_component(el.source_ref.as_deref()),
            self.classifier_component(el.target_ref.as_deref()),
        ) else {
            return;
        };
        let name = if el.name == crate::uml::ANON {
            "field".to_string()
        } else {
            el.name.clone()
        };
        let field = self.push_component(&name, el.running_id, ComponentKind::Field, None, false);
        self.relate(whole, RelationshipKind::HasField, field);
        self.relate(field, RelationshipKind::HasType, part);
    }
}
