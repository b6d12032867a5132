use std::collections::HashSet;
use std::fmt;
use std::time::Instant;

use super::{PatternTerm, QueryIr, ResultSet, TriplePattern};
use crate::rdf::{IndexKind, TermId, TripleStore};

/// One step of a join order.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanStep {
    /// Index of the pattern in the query.
    pub pattern: usize,
    pub triple: TriplePattern,
    pub index: IndexKind,
    /// Estimated matches per incoming binding.
    pub estimate: f64,
    /// `estimate` relative to the store size.
    pub selectivity: f64,
}

impl PlanStep {
    pub fn full_scan(&self) -> bool {
        self.index == IndexKind::FullScan
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
}

impl Plan {
    pub fn order(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.pattern).collect()
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(
                f,
                "{:>2}. #{:<3} {:<10} est {:>8.2}  sel {:.4}  {}",
                i + 1,
                s.pattern,
                s.index.to_string(),
                s.estimate,
                s.selectivity,
                s.triple
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum Slot {
    /// Constant; `None` when the term never occurs in the store.
    Const(Option<TermId>),
    Var(usize),
}

struct Compiled {
    vars: Vec<String>,
    patterns: Vec<[Slot; 3]>,
}

fn compile(store: &TripleStore, query: &QueryIr) -> Compiled {
    let vars = query.pattern_vars();
    let slot = |t: &PatternTerm| match t {
        PatternTerm::Var(v) => Slot::Var(vars.iter().position(|x| x == v).unwrap()),
        PatternTerm::Const(c) => Slot::Const(store.id_of(c)),
    };
    let patterns = query
        .patterns
        .iter()
        .map(|p| [slot(&p.s), slot(&p.p), slot(&p.o)])
        .collect();
    Compiled { vars, patterns }
}

fn estimate(store: &TripleStore, distinct: [usize; 3], pat: &[Slot; 3], bound: &[bool]) -> f64 {
    let mut key = [None; 3];
    for (k, s) in key.iter_mut().zip(pat) {
        if let Slot::Const(c) = s {
            match c {
                Some(id) => *k = Some(*id),
                None => return 0.0,
            }
        }
    }
    let mut est = store.count_ids(key[0], key[1], key[2]) as f64;
    for (i, s) in pat.iter().enumerate() {
        if let Slot::Var(v) = s {
            if bound[*v] && distinct[i] > 0 {
                est /= distinct[i] as f64;
            }
        }
    }
    est
}

fn bound_mask(pat: &[Slot; 3], bound: &[bool]) -> [bool; 3] {
    pat.map(|s| match s {
        Slot::Const(_) => true,
        Slot::Var(v) => bound[v],
    })
}

fn make_plan(store: &TripleStore, query: &QueryIr, c: &Compiled, order: Option<&[usize]>) -> Plan {
    let distinct = store.distinct_per_position();
    let total = store.len().max(1) as f64;
    let mut bound = vec![false; c.vars.len()];
    let mut remaining: Vec<usize> = (0..c.patterns.len()).collect();
    let mut steps = Vec::new();
    let mut forced = order.map(|o| o.iter().copied());
    while !remaining.is_empty() {
        let pick = match forced.as_mut() {
            Some(it) => it.next().expect("order covers every pattern"),
            None => {
                let connected = |i: usize| {
                    c.patterns[i]
                        .iter()
                        .any(|s| matches!(s, Slot::Var(v) if bound[*v]))
                };
                *remaining
                    .iter()
                    .min_by(|&&a, &&b| {
                        let ea = estimate(store, distinct, &c.patterns[a], &bound);
                        let eb = estimate(store, distinct, &c.patterns[b], &bound);
                        ea.total_cmp(&eb)
                            .then(connected(b).cmp(&connected(a)))
                            .then(a.cmp(&b))
                    })
                    .unwrap()
            }
        };
        remaining.retain(|&i| i != pick);
        let pat = &c.patterns[pick];
        let est = estimate(store, distinct, pat, &bound);
        let [s, p, o] = bound_mask(pat, &bound);
        steps.push(PlanStep {
            pattern: pick,
            triple: query.patterns[pick].clone(),
            index: IndexKind::for_mask(s, p, o),
            estimate: est,
            selectivity: est / total,
        });
        for sl in pat {
            if let Slot::Var(v) = sl {
                bound[*v] = true;
            }
        }
    }
    Plan { steps }
}

/// Greedy join order: cheapest estimated pattern first, preferring patterns
/// connected to already bound variables on ties.
pub fn plan(store: &TripleStore, query: &QueryIr) -> Plan {
    let c = compile(store, query);
    make_plan(store, query, &c, None)
}

/// Evaluates with the greedy plan.
pub fn evaluate(store: &TripleStore, query: &QueryIr) -> ResultSet {
    run(store, query, None)
}

/// Evaluates joining patterns in the given order (a permutation of pattern
/// indexes). Yields the same rows as [`evaluate`], possibly ordered
/// differently.
pub fn evaluate_in_order(store: &TripleStore, query: &QueryIr, order: &[usize]) -> ResultSet {
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    assert!(
        sorted.iter().copied().eq(0..query.patterns.len()),
        "order must be a permutation of the pattern indexes"
    );
    run(store, query, Some(order))
}

struct Exec<'a> {
    store: &'a TripleStore,
    steps: Vec<[Slot; 3]>,
    /// Filters checked after each step, as pairs of variable slots.
    filters_at: Vec<Vec<(usize, usize)>>,
    select: Vec<usize>,
    distinct: bool,
    limit: Option<usize>,
    seen: HashSet<Vec<TermId>>,
    rows: Vec<Vec<TermId>>,
}

impl Exec<'_> {
    /// Returns false once the limit is reached.
    fn search(&mut self, depth: usize, binding: &mut Vec<Option<TermId>>) -> bool {
        if depth == self.steps.len() {
            let row: Vec<TermId> = self.select.iter().map(|&v| binding[v].unwrap()).collect();
            if self.distinct && !self.seen.insert(row.clone()) {
                return true;
            }
            self.rows.push(row);
            return self.limit.is_none_or(|l| self.rows.len() < l);
        }
        let pat = self.steps[depth];
        let mut key = [None; 3];
        for (k, s) in key.iter_mut().zip(&pat) {
            *k = match *s {
                Slot::Const(Some(id)) => Some(id),
                Slot::Const(None) => return true,
                Slot::Var(v) => binding[v],
            };
        }
        let store = self.store;
        for t in store.match_ids(key[0], key[1], key[2]) {
            let mut newly = Vec::new();
            let mut ok = true;
            for (i, s) in pat.iter().enumerate() {
                if let Slot::Var(v) = *s {
                    match binding[v] {
                        Some(id) if id != t[i] => {
                            ok = false;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            binding[v] = Some(t[i]);
                            newly.push(v);
                        }
                    }
                }
            }
            if ok {
                ok = self.filters_at[depth]
                    .iter()
                    .all(|&(a, b)| binding[a] != binding[b]);
            }
            let go_on = !ok || self.search(depth + 1, binding);
            for v in newly {
                binding[v] = None;
            }
            if !go_on {
                return false;
            }
        }
        true
    }
}

fn run(store: &TripleStore, query: &QueryIr, order: Option<&[usize]>) -> ResultSet {
    let start = Instant::now();
    let c = compile(store, query);
    let plan = make_plan(store, query, &c, order);
    let steps: Vec<[Slot; 3]> = plan.steps.iter().map(|s| c.patterns[s.pattern]).collect();

    // step at which each variable is first bound
    let mut first = vec![usize::MAX; c.vars.len()];
    for (i, pat) in steps.iter().enumerate() {
        for s in pat {
            if let Slot::Var(v) = *s {
                first[v] = first[v].min(i);
            }
        }
    }
    let slot_of = |name: &str| c.vars.iter().position(|x| x == name).unwrap();
    let mut filters_at = vec![Vec::new(); steps.len()];
    for (a, b) in &query.filters {
        let (a, b) = (slot_of(a), slot_of(b));
        filters_at[first[a].max(first[b])].push((a, b));
    }

    let mut exec = Exec {
        store,
        select: query.select_vars.iter().map(|v| slot_of(v)).collect(),
        steps,
        filters_at,
        distinct: query.distinct,
        limit: query.limit.map(|l| l.min(usize::MAX as u64) as usize),
        seen: HashSet::new(),
        rows: Vec::new(),
    };
    let mut binding = vec![None; c.vars.len()];
    if !exec.steps.is_empty() {
        exec.search(0, &mut binding);
    }
    let rows = exec
        .rows
        .into_iter()
        .map(|r| r.into_iter().map(|id| store.term(id).clone()).collect())
        .collect();
    ResultSet {
        header: query.select_vars.clone(),
        rows,
        elapsed: start.elapsed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{parse_ntriples, Term};
    use crate::sparql::parse_query;

    const WOC: &str = "http://rdf.webofcode.org/woc/";

    fn store(body: &str) -> TripleStore {
        let text = body.replace("woc:", WOC);
        parse_ntriples(&[("t.nt", text)]).unwrap()
    }

    fn q(text: &str) -> QueryIr {
        parse_query(&format!("PREFIX woc: <{WOC}>\n{text}")).unwrap()
    }

    fn names(rs: &ResultSet) -> Vec<Vec<String>> {
        rs.rows
            .iter()
            .map(|r| r.iter().map(|t| t.as_iri().unwrap().rsplit('/').next().unwrap().to_string()).collect())
            .collect()
    }

    const FACTS: &str = "\
<urn:x/A> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <woc:Class> .
<urn:x/B> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <woc:Class> .
<urn:x/A> <woc:hasMethod> <urn:x/m1> .
<urn:x/A> <woc:hasMethod> <urn:x/m2> .
<urn:x/B> <woc:hasMethod> <urn:x/m3> .
<urn:x/m1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <woc:Method> .
<urn:x/m2> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <woc:Method> .
<urn:x/m3> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <woc:Method> .
<urn:x/B> <woc:extends> <urn:x/A> .
";

    #[test]
    fn class_method_join() {
        let s = store(FACTS);
        let rs = evaluate(&s, &q("SELECT ?c ?m WHERE { ?c a woc:Class . ?m a woc:Method . ?c woc:hasMethod ?m . }"));
        let mut got = names(&rs);
        got.sort();
        assert_eq!(got, [["A", "m1"], ["A", "m2"], ["B", "m3"]]);
    }

    #[test]
    fn inequality_filter() {
        let s = store(FACTS);
        let ir = q("SELECT ?c ?a ?b WHERE { ?c woc:hasMethod ?a . ?c woc:hasMethod ?b . FILTER(?a != ?b) }");
        assert_eq!(evaluate(&s, &ir).rows.len(), 2);
    }

    #[test]
    fn distinct_and_limit() {
        let s = store(FACTS);
        let bag = evaluate(&s, &q("SELECT ?c WHERE { ?c woc:hasMethod ?m }"));
        assert_eq!(bag.rows.len(), 3);
        let set = evaluate(&s, &q("SELECT DISTINCT ?c WHERE { ?c woc:hasMethod ?m }"));
        assert_eq!(set.rows.len(), 2);
        let lim = evaluate(&s, &q("SELECT ?c ?m WHERE { ?c woc:hasMethod ?m } LIMIT 2"));
        assert_eq!(lim.rows.len(), 2);
    }

    #[test]
    fn unknown_constant_gives_no_rows() {
        let s = store(FACTS);
        let rs = evaluate(&s, &q("SELECT ?c WHERE { ?c a woc:Interface }"));
        assert!(rs.rows.is_empty());
        assert_eq!(rs.header, ["c"]);
    }

    #[test]
    fn repeated_variable_in_pattern() {
        let s = store("<urn:a> <urn:p> <urn:a> .\n<urn:a> <urn:p> <urn:b> .\n");
        let rs = evaluate(&s, &parse_query("SELECT ?x WHERE { ?x <urn:p> ?x }").unwrap());
        assert_eq!(rs.rows, [[Term::iri("urn:a")]]);
    }

    #[test]
    fn plan_starts_selective_and_avoids_full_scan() {
        let s = store(FACTS);
        let ir = q("SELECT ?c ?d WHERE { ?c woc:hasMethod ?m . ?c woc:extends ?d . }");
        let p = plan(&s, &ir);
        assert_eq!(p.order(), [1, 0]);
        assert!(p.steps.iter().all(|s| !s.full_scan()));
        assert_eq!(p.steps[1].index, IndexKind::Spo);
        assert!(p.to_string().contains("SPO"));
    }

    #[test]
    fn all_orders_agree() {
        let s = store(FACTS);
        let ir = q("SELECT ?c ?m ?d WHERE { ?c a woc:Class . ?c woc:hasMethod ?m . ?c woc:extends ?d . }");
        let mut base = evaluate(&s, &ir).rows;
        base.sort();
        for order in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let mut rows = evaluate_in_order(&s, &ir, &order).rows;
            rows.sort();
            assert_eq!(rows, base, "{order:?}");
        }
    }
}
