//! Design-pattern mining over RDF code facts.
//!
//! The pipeline reads a UML class diagram from XMI ([`uml`]), resolves it into
//! query nodes and edges ([`resolver`]), renders a SPARQL query
//! ([`querygen`]) and evaluates it over `woc:` code facts ([`rdf`],
//! [`sparql`]). [`codefacts`] emits such facts from a compact code
//! description and [`harness`] scores mining results against ground truth.

pub mod batch;
pub mod codefacts;
pub mod harness;
pub mod ontology;
pub mod querygen;
pub mod rdf;
pub mod resolver;
pub mod sparql;
pub mod uml;

use resolver::ResolverConfig;

#[derive(Debug, thiserror::Error)]
pub enum GenerateError {
    #[error(transparent)]
    Xmi(#[from] uml::XmiError),
    #[error(transparent)]
    Resolve(#[from] resolver::ResolveError),
    #[error(transparent)]
    Query(#[from] querygen::QueryGenError),
}

/// XMI bytes to a generated query.
pub fn generate_query(xmi: &[u8], config: &ResolverConfig) -> Result<querygen::SparqlQuery, GenerateError> {
    let model = uml::parse_xmi(xmi)?;
    let resolution = resolver::resolve(&model, config)?;
    Ok(querygen::build_query(
        &resolution.components,
        &resolution.relationships,
        config,
    )?)
}
