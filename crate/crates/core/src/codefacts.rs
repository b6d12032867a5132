//! `woc:` facts from a JSON code description.
//!
//! ```json
//! { "types": [
//!   { "name": "Shape", "kind": "interface", "visibility": "public",
//!     "methods": [ { "name": "area", "visibility": "public", "modifiers": ["abstract"], "returns": "double" } ] },
//!   { "name": "Circle", "kind": "class", "visibility": "public", "implements": ["Shape"],
//!     "fields": [ { "name": "r", "type": "double", "visibility": "private" } ],
//!     "constructors": [ { "visibility": "public", "parameters": [ { "name": "r", "type": "double" } ] } ],
//!     "methods": [ { "name": "area", "visibility": "public", "returns": "double",
//!                    "overrides": "area", "references": ["Circle.<init>", "Math"] } ] } ] }
//! ```
//!
//! IRIs are formed from the base IRI:
//!
//! | entity      | IRI                          |
//! |-------------|------------------------------|
//! | type        | `base` + `Name`              |
//! | field       | `base` + `Name.field`        |
//! | method      | `base` + `Name.m(T1,T2)`     |
//! | constructor | `base` + `Name/ctor(T1,T2)`  |
//! | parameter   | owner IRI + `/` + name       |
//! | undeclared  | `base` + `external/` + name  |
//!
//! A reference is a type name, `Type.member` (every overload of a method, or
//! a field) or `Type.<init>` (every constructor). `overrides` names a method
//! of some supertype, either bare or as `Type.method`. A missing `returns` or
//! `"void"` emits no return type.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::ontology::{self as woc, RDF_TYPE};
use crate::rdf::{Term, Triple};

#[derive(Debug, thiserror::Error)]
pub enum FactsError {
    #[error("invalid description: {0}")]
    Json(#[from] serde_json::Error),
    #[error("duplicate type `{0}`")]
    DuplicateType(String),
    #[error("duplicate member `{0}`")]
    DuplicateMember(String),
    #[error("`{from}` references unknown `{name}`")]
    UnresolvedReference { from: String, name: String },
    #[error("`{method}` overrides `{name}`, which no supertype declares")]
    NoOverriddenMethod { method: String, name: String },
    #[error("`{method}` overrides `{name}`, which matches several methods: {candidates:?}")]
    AmbiguousOverride {
        method: String,
        name: String,
        candidates: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeKind {
    Class,
    Interface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Public,
    Private,
    Protected,
    #[default]
    Package,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modifier {
    Static,
    Final,
    Abstract,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeDescription {
    #[serde(default)]
    pub types: Vec<TypeDesc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeDesc {
    pub name: String,
    pub kind: TypeKind,
    #[serde(default)]
    pub visibility: Visibility,
    #[serde(default)]
    pub modifiers: BTreeSet<Modifier>,
    #[serde(default)]
    pub extends: Option<String>,
    #[serde(default)]
    pub implements: Vec<String>,
    #[serde(default)]
    pub fields: Vec<FieldDesc>,
    #[serde(default)]
    pub constructors: Vec<ConstructorDesc>,
    #[serde(default)]
    pub methods: Vec<MethodDesc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDesc {
    pub name: String,
    #[serde(rename = "type", default)]
    pub type_name: Option<String>,
    #[serde(default)]
    pub visibility: Visibility,
    #[serde(default)]
    pub modifiers: BTreeSet<Modifier>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamDesc {
    pub name: String,
    #[serde(rename = "type")]
    pub type_name: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructorDesc {
    #[serde(default)]
    pub visibility: Visibility,
    #[serde(default)]
    pub parameters: Vec<ParamDesc>,
    #[serde(default)]
    pub references: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodDesc {
    pub name: String,
    #[serde(default)]
    pub visibility: Visibility,
    #[serde(default)]
    pub modifiers: BTreeSet<Modifier>,
    #[serde(default)]
    pub returns: Option<String>,
    #[serde(default)]
    pub parameters: Vec<ParamDesc>,
    #[serde(default)]
    pub references: Vec<String>,
    #[serde(default)]
    pub overrides: Option<String>,
}

pub fn parse_description(text: &str) -> Result<CodeDescription, FactsError> {
    Ok(serde_json::from_str(text)?)
}

/// Facts as an N-Triples document, one triple per line.
pub fn emit_facts(desc: &CodeDescription, base_iri: &str) -> Result<String, FactsError> {
    Ok(emit_triples(desc, base_iri)?
        .iter()
        .map(|t| format!("{t}\n"))
        .collect())
}

fn encode(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if c <= ' ' || "<>\"{}|^`\\%".contains(c) {
            let mut buf = [0; 4];
            for b in c.encode_utf8(&mut buf).bytes() {
                out.push_str(&format!("%{b:02X}"));
            }
        } else {
            out.push(c);
        }
    }
    out
}

struct Index<'a> {
    base: &'a str,
    types: HashMap<&'a str, &'a TypeDesc>,
}

impl<'a> Index<'a> {
    fn type_iri(&self, name: &str) -> String {
        if self.types.contains_key(name) {
            format!("{}{}", self.base, encode(name))
        } else {
            format!("{}external/{}", self.base, encode(name))
        }
    }

    fn signature(params: &[ParamDesc]) -> String {
        let types: Vec<String> = params.iter().map(|p| encode(&p.type_name)).collect();
        format!("({})", types.join(","))
    }

    fn method_iri(&self, owner: &str, m: &MethodDesc) -> String {
        format!("{}.{}{}", self.type_iri(owner), encode(&m.name), Self::signature(&m.parameters))
    }

    fn ctor_iri(&self, owner: &str, c: &ConstructorDesc) -> String {
        format!("{}/ctor{}", self.type_iri(owner), Self::signature(&c.parameters))
    }

    fn field_iri(&self, owner: &str, f: &FieldDesc) -> String {
        format!("{}.{}", self.type_iri(owner), encode(&f.name))
    }

    fn resolve_reference(&self, from: &str, name: &str) -> Result<Vec<String>, FactsError> {
        let unresolved = || FactsError::UnresolvedReference {
            from: from.to_string(),
            name: name.to_string(),
        };
        let Some((ty, member)) = name.split_once('.') else {
            return Ok(vec![self.type_iri(name)]);
        };
        let Some(t) = self.types.get(ty) else {
            return Ok(vec![format!("{}external/{}", self.base, encode(name))]);
        };
        let iris: Vec<String> = if member == "<init>" {
            t.constructors.iter().map(|c| self.ctor_iri(ty, c)).collect()
        } else {
            let methods: Vec<String> = t
                .methods
                .iter()
                .filter(|m| m.name == member)
                .map(|m| self.method_iri(ty, m))
                .collect();
            if methods.is_empty() {
                t.fields
                    .iter()
                    .filter(|f| f.name == member)
                    .map(|f| self.field_iri(ty, f))
                    .collect()
            } else {
                methods
            }
        };
        if iris.is_empty() {
            Err(unresolved())
        } else {
            Ok(iris)
        }
    }

    /// Nearest supertypes first.
    fn ancestors(&self, name: &str) -> Vec<&'a TypeDesc> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([name]);
        while let Some(n) = queue.pop_front() {
            let Some(t) = self.types.get(n) else { continue };
            for sup in t.extends.iter().chain(&t.implements) {
                if seen.insert(sup.as_str()) {
                    if let Some(s) = self.types.get(sup.as_str()) {
                        out.push(*s);
                        queue.push_back(sup);
                    }
                }
            }
        }
        out
    }

    fn resolve_override(&self, owner: &str, m: &MethodDesc, target: &str) -> Result<String, FactsError> {
        let method = format!("{owner}.{}", m.name);
        let (scope, name): (Vec<&TypeDesc>, &str) = match target.split_once('.') {
            Some((ty, name)) => (self.types.get(ty).into_iter().copied().collect(), name),
            None => (self.ancestors(owner), target),
        };
        for t in scope {
            let found: Vec<&MethodDesc> = t.methods.iter().filter(|x| x.name == name).collect();
            let pick = match found.as_slice() {
                [] => continue,
                [one] => *one,
                many => {
                    let same: Vec<&&MethodDesc> = many
                        .iter()
                        .filter(|x| Self::signature(&x.parameters) == Self::signature(&m.parameters))
                        .collect();
                    match same.as_slice() {
                        [one] => **one,
                        _ => {
                            return Err(FactsError::AmbiguousOverride {
                                method,
                                name: target.to_string(),
                                candidates: many.iter().map(|x| self.method_iri(&t.name, x)).collect(),
                            })
                        }
                    }
                }
            };
            return Ok(self.method_iri(&t.name, pick));
        }
        Err(FactsError::NoOverriddenMethod {
            method,
            name: target.to_string(),
        })
    }
}

struct Out {
    triples: Vec<Triple>,
    subjects: HashSet<String>,
}

impl Out {
    fn add(&mut self, s: &str, p: &str, o: Term) {
        self.triples.push(Triple::new(Term::iri(s), Term::iri(woc::iri(p)), o));
    }

    fn typed(&mut self, s: &str, class: &str) {
        self.triples
            .push(Triple::new(Term::iri(s), Term::iri(RDF_TYPE), Term::woc(class)));
    }

    fn entity(&mut self, iri: &str, class: &str) -> Result<(), FactsError> {
        if !self.subjects.insert(iri.to_string()) {
            return Err(FactsError::DuplicateMember(iri.to_string()));
        }
        self.typed(iri, class);
        Ok(())
    }

    fn modifiers(&mut self, s: &str, vis: Visibility, mods: &BTreeSet<Modifier>) {
        let v = match vis {
            Visibility::Public => Some(woc::PUBLIC),
            Visibility::Private => Some(woc::PRIVATE),
            Visibility::Protected => Some(woc::PROTECTED),
            Visibility::Package => None,
        };
        for m in v.into_iter().chain(mods.iter().map(|m| match m {
            Modifier::Static => woc::STATIC,
            Modifier::Final => woc::FINAL,
            Modifier::Abstract => woc::ABSTRACT,
        })) {
            self.add(s, woc::HAS_MODIFIER, Term::woc(m));
        }
    }

    fn parameters(&mut self, idx: &Index, owner: &str, params: &[ParamDesc]) -> Result<(), FactsError> {
        for p in params {
            let iri = format!("{owner}/{}", encode(&p.name));
            self.add(owner, woc::HAS_PARAMETER, Term::iri(&iri));
            self.entity(&iri, woc::PARAMETER)?;
            self.add(&iri, woc::HAS_TYPE, Term::iri(idx.type_iri(&p.type_name)));
        }
        Ok(())
    }

    fn references(&mut self, idx: &Index, from: &str, iri: &str, refs: &[String]) -> Result<(), FactsError> {
        for r in refs {
            for target in idx.resolve_reference(from, r)? {
                self.add(iri, woc::REFERENCES, Term::iri(target));
            }
        }
        Ok(())
    }
}

/// Facts in emission order: each type, then its fields, constructors and
/// methods, in document order. Duplicate triples are dropped.
pub fn emit_triples(desc: &CodeDescription, base_iri: &str) -> Result<Vec<Triple>, FactsError> {
    let mut types = HashMap::new();
    for t in &desc.types {
        if types.insert(t.name.as_str(), t).is_some() {
            return Err(FactsError::DuplicateType(t.name.clone()));
        }
    }
    let idx = Index { base: base_iri, types };
    let mut out = Out {
        triples: Vec::new(),
        subjects: HashSet::new(),
    };

    for t in &desc.types {
        let ti = idx.type_iri(&t.name);
        out.entity(
            &ti,
            match t.kind {
                TypeKind::Class => woc::CLASS,
                TypeKind::Interface => woc::INTERFACE,
            },
        )?;
        out.modifiers(&ti, t.visibility, &t.modifiers);
        if let Some(sup) = &t.extends {
            out.add(&ti, woc::EXTENDS, Term::iri(idx.type_iri(sup)));
        }
        for i in &t.implements {
            out.add(&ti, woc::IMPLEMENTS, Term::iri(idx.type_iri(i)));
        }

        for f in &t.fields {
            let fi = idx.field_iri(&t.name, f);
            out.add(&ti, woc::HAS_FIELD, Term::iri(&fi));
            out.entity(&fi, woc::FIELD)?;
            out.modifiers(&fi, f.visibility, &f.modifiers);
            if let Some(ty) = &f.type_name {
                out.add(&fi, woc::HAS_TYPE, Term::iri(idx.type_iri(ty)));
            }
        }

        for c in &t.constructors {
            let ci = idx.ctor_iri(&t.name, c);
            out.add(&ti, woc::HAS_CONSTRUCTOR, Term::iri(&ci));
            out.entity(&ci, woc::CONSTRUCTOR)?;
            out.modifiers(&ci, c.visibility, &BTreeSet::new());
            out.parameters(&idx, &ci, &c.parameters)?;
            out.references(&idx, &format!("{}.<init>", t.name), &ci, &c.references)?;
        }

        for m in &t.methods {
            let mi = idx.method_iri(&t.name, m);
            out.add(&ti, woc::HAS_METHOD, Term::iri(&mi));
            out.entity(&mi, woc::METHOD)?;
            out.modifiers(&mi, m.visibility, &m.modifiers);
            if let Some(r) = m.returns.as_deref().filter(|r| *r != "void") {
                out.add(&mi, woc::HAS_RETURN_TYPE, Term::iri(idx.type_iri(r)));
            }
            out.parameters(&idx, &mi, &m.parameters)?;
            out.references(&idx, &format!("{}.{}", t.name, m.name), &mi, &m.references)?;
            if let Some(target) = &m.overrides {
                let parent = idx.resolve_override(&t.name, m, target)?;
                out.add(&mi, woc::OVERRIDES, Term::iri(parent));
            }
        }
    }

    let mut seen = HashSet::new();
    out.triples.retain(|t| seen.insert(t.clone()));
    Ok(out.triples)
}
