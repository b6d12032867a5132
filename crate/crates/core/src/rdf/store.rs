use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use super::{Term, Triple};

pub type TermId = u32;

/// Which sorted permutation serves a lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndexKind {
    Spo,
    Pos,
    Osp,
    /// No position bound; every triple is visited.
    FullScan,
}

impl IndexKind {
    /// Index whose sort order covers the bound positions as a prefix.
    pub fn for_mask(s: bool, p: bool, o: bool) -> IndexKind {
        match (s, p, o) {
            (false, false, false) => IndexKind::FullScan,
            (true, _, false) | (true, true, true) => IndexKind::Spo,
            (false, true, _) => IndexKind::Pos,
            (_, false, true) => IndexKind::Osp,
        }
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IndexKind::Spo => "SPO",
            IndexKind::Pos => "POS",
            IndexKind::Osp => "OSP",
            IndexKind::FullScan => "full-scan",
        })
    }
}

/// Immutable, interned set of triples with SPO, POS and OSP indexes.
///
/// Each index holds the same triples with their ids permuted into the index
/// order, sorted lexicographically.
#[derive(Debug, Clone, Default)]
pub struct TripleStore {
    terms: Vec<Term>,
    ids: HashMap<Term, TermId>,
    spo: Vec<[TermId; 3]>,
    pos: Vec<[TermId; 3]>,
    osp: Vec<[TermId; 3]>,
}

impl TripleStore {
    pub fn from_triples<I: IntoIterator<Item = Triple>>(triples: I) -> Self {
        let mut store = TripleStore::default();
        for t in triples {
            let ids = [store.intern(t.s), store.intern(t.p), store.intern(t.o)];
            store.spo.push(ids);
        }
        store.spo.sort_unstable();
        store.spo.dedup();
        store.pos = store.spo.iter().map(|&[s, p, o]| [p, o, s]).collect();
        store.pos.sort_unstable();
        store.osp = store.spo.iter().map(|&[s, p, o]| [o, s, p]).collect();
        store.osp.sort_unstable();
        store
    }

    fn intern(&mut self, term: Term) -> TermId {
        if let Some(&id) = self.ids.get(&term) {
            return id;
        }
        let id = self.terms.len() as TermId;
        self.terms.push(term.clone());
        self.ids.insert(term, id);
        id
    }

    /// Number of distinct triples.
    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn id_of(&self, term: &Term) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> &Term {
        &self.terms[id as usize]
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    fn index(&self, kind: IndexKind) -> &[[TermId; 3]] {
        match kind {
            IndexKind::Spo | IndexKind::FullScan => &self.spo,
            IndexKind::Pos => &self.pos,
            IndexKind::Osp => &self.osp,
        }
    }

    fn lookup(&self, s: Option<TermId>, p: Option<TermId>, o: Option<TermId>) -> (IndexKind, Range<usize>) {
        let kind = IndexKind::for_mask(s.is_some(), p.is_some(), o.is_some());
        let key: Vec<TermId> = match kind {
            IndexKind::FullScan => vec![],
            IndexKind::Spo => [s, p, o].into_iter().map_while(|x| x).collect(),
            IndexKind::Pos => [p, o, s].into_iter().map_while(|x| x).collect(),
            IndexKind::Osp => [o, s, p].into_iter().map_while(|x| x).collect(),
        };
        let idx = self.index(kind);
        let n = key.len();
        let lo = idx.partition_point(|t| t[..n] < key[..]);
        let hi = lo + idx[lo..].partition_point(|t| t[..n] == key[..]);
        (kind, lo..hi)
    }

    /// Id triples `[s, p, o]` matching every bound position.
    pub fn match_ids(
        &self,
        s: Option<TermId>,
        p: Option<TermId>,
        o: Option<TermId>,
    ) -> impl Iterator<Item = [TermId; 3]> + '_ {
        let (kind, range) = self.lookup(s, p, o);
        self.index(kind)[range].iter().map(move |&t| match kind {
            IndexKind::Spo | IndexKind::FullScan => t,
            IndexKind::Pos => [t[2], t[0], t[1]],
            IndexKind::Osp => [t[1], t[2], t[0]],
        })
    }

    /// Number of triples matching the bound positions (exact, via binary search).
    pub fn count_ids(&self, s: Option<TermId>, p: Option<TermId>, o: Option<TermId>) -> usize {
        self.lookup(s, p, o).1.len()
    }

    /// Triples matching all bound terms. `(None, None, None)` yields the whole store.
    pub fn match_triples<'a>(
        &'a self,
        s: Option<&Term>,
        p: Option<&Term>,
        o: Option<&Term>,
    ) -> Box<dyn Iterator<Item = Triple> + 'a> {
        let resolve = |t: Option<&Term>| match t {
            None => Some(None),
            Some(t) => self.id_of(t).map(Some),
        };
        match (resolve(s), resolve(p), resolve(o)) {
            (Some(s), Some(p), Some(o)) => Box::new(self.match_ids(s, p, o).map(|t| self.triple(t))),
            // a bound term absent from the store matches nothing
            _ => Box::new(std::iter::empty()),
        }
    }

    pub fn triple(&self, [s, p, o]: [TermId; 3]) -> Triple {
        Triple::new(self.term(s).clone(), self.term(p).clone(), self.term(o).clone())
    }

    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo.iter().map(|&t| self.triple(t))
    }

    /// Number of distinct terms used in subject, predicate and object position.
    pub fn distinct_per_position(&self) -> [usize; 3] {
        let distinct = |idx: &[[TermId; 3]]| {
            let mut n = 0;
            let mut last = None;
            for t in idx {
                if last != Some(t[0]) {
                    n += 1;
                    last = Some(t[0]);
                }
            }
            n
        };
        [distinct(&self.spo), distinct(&self.pos), distinct(&self.osp)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(s: &str, p: &str, o: &str) -> Triple {
        Triple::new(Term::iri(s), Term::iri(p), Term::iri(o))
    }

    fn sample() -> TripleStore {
        TripleStore::from_triples([t("urn:a", "urn:extends", "urn:b")])
    }

    #[test]
    fn predicate_lookup() {
        let store = sample();
        let hits: Vec<Triple> = store.match_triples(None, Some(&Term::iri("urn:extends")), None).collect();
        assert_eq!(hits, vec![t("urn:a", "urn:extends", "urn:b")]);
    }

    #[test]
    fn fully_bound_lookup() {
        let store = sample();
        let (a, e, b) = (Term::iri("urn:a"), Term::iri("urn:extends"), Term::iri("urn:b"));
        assert_eq!(store.match_triples(Some(&a), Some(&e), Some(&b)).count(), 1);
        assert_eq!(store.match_triples(Some(&b), Some(&e), Some(&a)).count(), 0);
        assert_eq!(store.match_triples(Some(&Term::iri("urn:zz")), None, None).count(), 0);
    }

    #[test]
    fn index_choice() {
        assert_eq!(IndexKind::for_mask(false, false, false), IndexKind::FullScan);
        assert_eq!(IndexKind::for_mask(true, false, false), IndexKind::Spo);
        assert_eq!(IndexKind::for_mask(true, true, false), IndexKind::Spo);
        assert_eq!(IndexKind::for_mask(true, true, true), IndexKind::Spo);
        assert_eq!(IndexKind::for_mask(false, true, false), IndexKind::Pos);
        assert_eq!(IndexKind::for_mask(false, true, true), IndexKind::Pos);
        assert_eq!(IndexKind::for_mask(false, false, true), IndexKind::Osp);
        assert_eq!(IndexKind::for_mask(true, false, true), IndexKind::Osp);
    }

    fn arb_triples() -> impl Strategy<Value = Vec<(u8, u8, u8)>> {
        prop::collection::vec((0u8..12, 0u8..4, 0u8..12), 0..1000)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn match_agrees_with_linear_scan(raw in arb_triples(), mask in (any::<bool>(), any::<bool>(), any::<bool>()), probe in (0u8..12, 0u8..4, 0u8..12)) {
            let triples: Vec<Triple> = raw
                .iter()
                .map(|&(s, p, o)| t(&format!("urn:n{s}"), &format!("urn:p{p}"), &format!("urn:n{o}")))
                .collect();
            let store = TripleStore::from_triples(triples.clone());
            let s = mask.0.then(|| Term::iri(format!("urn:n{}", probe.0)));
            let p = mask.1.then(|| Term::iri(format!("urn:p{}", probe.1)));
            let o = mask.2.then(|| Term::iri(format!("urn:n{}", probe.2)));

            let mut expected: Vec<Triple> = triples
                .into_iter()
                .filter(|x| s.as_ref().is_none_or(|s| &x.s == s)
                    && p.as_ref().is_none_or(|p| &x.p == p)
                    && o.as_ref().is_none_or(|o| &x.o == o))
                .collect();
            expected.sort();
            expected.dedup();
            let mut got: Vec<Triple> = store.match_triples(s.as_ref(), p.as_ref(), o.as_ref()).collect();
            got.sort();
            prop_assert_eq!(got, expected);
        }

        #[test]
        fn interning_round_trips(raw in arb_triples()) {
            let store = TripleStore::from_triples(raw.iter().map(|&(s, p, o)| {
                t(&format!("urn:n{s}"), &format!("urn:p{p}"), &format!("urn:n{o}"))
            }));
            for id in 0..store.term_count() as TermId {
                prop_assert_eq!(store.id_of(store.term(id)), Some(id));
            }
            let mut a: Vec<_> = store.spo.clone();
            let mut b: Vec<_> = store.pos.iter().map(|&[p, o, s]| [s, p, o]).collect();
            let mut c: Vec<_> = store.osp.iter().map(|&[o, s, p]| [s, p, o]).collect();
            a.sort(); b.sort(); c.sort();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(&a, &c);
        }
    }
}
