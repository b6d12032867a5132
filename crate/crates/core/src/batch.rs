//! Several queries against one store.
//!
//! Each query is still evaluated sequentially; with the `parallel` feature the
//! queries themselves are spread over the rayon pool.

use crate::rdf::TripleStore;
use crate::sparql::{evaluate, QueryIr, ResultSet};

/// Evaluates every query, returning results in input order.
pub fn evaluate_batch(store: &TripleStore, queries: &[QueryIr]) -> Vec<ResultSet> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        queries.par_iter().map(|q| evaluate(store, q)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        evaluate_batch_sequential(store, queries)
    }
}

pub fn evaluate_batch_sequential(store: &TripleStore, queries: &[QueryIr]) -> Vec<ResultSet> {
    queries.iter().map(|q| evaluate(store, q)).collect()
}
