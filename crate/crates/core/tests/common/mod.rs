#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use umlmine::querygen::SparqlQuery;
use umlmine::rdf::{parse_ntriples, Term, Triple, TripleStore};
use umlmine::resolver::ResolverConfig;
use umlmine::sparql::{parse_query, PatternTerm, QueryIr, TriplePattern};

pub const CORPUS_BASE: &str = "http://example.org/corpus/";

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn store(names: &[&str]) -> TripleStore {
    let docs: Vec<(String, String)> = names.iter().map(|n| (n.to_string(), read_fixture(n))).collect();
    parse_ntriples(&docs).unwrap()
}

/// Every `.nt` file among the fixtures.
pub fn fixture_stores() -> Vec<(String, TripleStore)> {
    let mut names: Vec<String> = std::fs::read_dir(fixture(""))
        .unwrap()
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.ends_with(".nt"))
        .collect();
    names.sort();
    names.into_iter().map(|n| (n.clone(), store(&[&n]))).collect()
}

pub fn config(stereotypes: bool, suppress_visibility: bool, filters: bool) -> ResolverConfig {
    ResolverConfig {
        suppress_visibility,
        parse_stereotypes: stereotypes,
        emit_distinct_filters: filters,
    }
}

pub fn generate(xmi: &str, cfg: &ResolverConfig) -> SparqlQuery {
    umlmine::generate_query(read_fixture(xmi).as_bytes(), cfg).unwrap()
}

pub fn strip_digits(v: &str) -> &str {
    v.trim_end_matches(|c: char| c.is_ascii_digit())
}

fn rename(p: &TriplePattern, map: &BTreeMap<String, String>) -> TriplePattern {
    let r = |t: &PatternTerm| match t {
        PatternTerm::Var(v) => PatternTerm::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
        c => c.clone(),
    };
    TriplePattern::new(r(&p.s), r(&p.p), r(&p.o))
}

fn sorted_patterns(ps: &[TriplePattern]) -> Vec<String> {
    let mut v: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
    v.sort();
    v
}

/// Checks that two queries have the same select variables and triple-pattern
/// multiset up to a renaming of variables that only changes trailing digits.
/// FILTERs are ignored.
pub fn same_modulo_ids(generated: &str, reference: &str) -> Result<(), String> {
    let g = parse_query(generated).map_err(|e| format!("generated: {e}"))?;
    let r = parse_query(reference).map_err(|e| format!("reference: {e}"))?;
    if g.patterns.len() != r.patterns.len() {
        return Err(format!("{} patterns vs {}", g.patterns.len(), r.patterns.len()));
    }
    if g.select_vars.len() != r.select_vars.len() {
        return Err(format!("{} select vars vs {}", g.select_vars.len(), r.select_vars.len()));
    }
    let gvars = g.pattern_vars();
    let rvars = r.pattern_vars();
    let target = sorted_patterns(&r.patterns);
    let mut map = BTreeMap::new();
    let mut used = HashSet::new();
    if assign(0, &gvars, &rvars, &mut map, &mut used, &g, &r, &target) {
        Ok(())
    } else {
        let got = sorted_patterns(&g.patterns);
        let stripped = |v: Vec<String>| -> Vec<String> {
            v.iter()
                .map(|s| {
                    s.split(' ')
                        .map(|w| if w.starts_with('?') { strip_digits(w) } else { w })
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect()
        };
        let (mut a, mut b) = (stripped(got), stripped(target));
        a.sort();
        b.sort();
        let only_g: Vec<&String> = a.iter().filter(|x| !b.contains(x)).collect();
        let only_r: Vec<&String> = b.iter().filter(|x| !a.contains(x)).collect();
        Err(format!("no variable renaming matches; only generated: {only_g:?}; only reference: {only_r:?}"))
    }
}

#[allow(clippy::too_many_arguments)]
fn assign(
    i: usize,
    gvars: &[String],
    rvars: &[String],
    map: &mut BTreeMap<String, String>,
    used: &mut HashSet<String>,
    g: &QueryIr,
    r: &QueryIr,
    target: &[String],
) -> bool {
    if i == gvars.len() {
        let renamed: Vec<TriplePattern> = g.patterns.iter().map(|p| rename(p, map)).collect();
        let mut sel: Vec<&String> = g.select_vars.iter().map(|v| &map[v]).collect();
        let mut rsel: Vec<&String> = r.select_vars.iter().collect();
        sel.sort();
        rsel.sort();
        return sorted_patterns(&renamed) == target && sel == rsel;
    }
    let gv = &gvars[i];
    for rv in rvars {
        if used.contains(rv) || strip_digits(rv) != strip_digits(gv) {
            continue;
        }
        map.insert(gv.clone(), rv.clone());
        used.insert(rv.clone());
        if assign(i + 1, gvars, rvars, map, used, g, r, target) {
            return true;
        }
        used.remove(rv);
        map.remove(gv);
    }
    false
}

/// Rows of every assignment of pattern variables to store terms that
/// satisfies all patterns and filters, projected to the select variables.
///
/// Variables are assigned one at a time; a pattern or filter is checked as
/// soon as all its variables have values.
pub fn brute_force(triples: &[Triple], q: &QueryIr) -> Vec<Vec<Term>> {
    let facts: HashSet<(&Term, &Term, &Term)> = triples.iter().map(|t| (&t.s, &t.p, &t.o)).collect();
    let mut domain: Vec<&Term> = triples.iter().flat_map(|t| [&t.s, &t.p, &t.o]).collect();
    domain.sort();
    domain.dedup();
    let vars = q.pattern_vars();
    let slot = |v: &str| vars.iter().position(|x| x == v).unwrap();
    enum Pos<'a> {
        Var(usize),
        Const(&'a Term),
    }
    let pats: Vec<[Pos; 3]> = q
        .patterns
        .iter()
        .map(|p| {
            [&p.s, &p.p, &p.o].map(|t| match t {
                PatternTerm::Var(v) => Pos::Var(slot(v)),
                PatternTerm::Const(c) => Pos::Const(c),
            })
        })
        .collect();
    let last_var = |ps: &[Pos]| ps.iter().filter_map(|p| match p { Pos::Var(v) => Some(*v), _ => None }).max();
    // checks that become decidable once variable k is assigned
    let mut pat_at: Vec<Vec<usize>> = vec![Vec::new(); vars.len()];
    let mut const_only = Vec::new();
    for (i, p) in pats.iter().enumerate() {
        match last_var(p) {
            Some(k) => pat_at[k].push(i),
            None => const_only.push(i),
        }
    }
    let mut filt_at: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vars.len()];
    for (a, b) in &q.filters {
        let (a, b) = (slot(a), slot(b));
        filt_at[a.max(b)].push((a, b));
    }
    let holds = |p: &[Pos; 3], asg: &[usize]| {
        fn v<'t>(x: &Pos<'t>, domain: &[&'t Term], asg: &[usize]) -> &'t Term {
            match x {
                Pos::Var(k) => domain[asg[*k]],
                Pos::Const(c) => c,
            }
        }
        facts.contains(&(v(&p[0], &domain, asg), v(&p[1], &domain, asg), v(&p[2], &domain, asg)))
    };
    let mut rows = Vec::new();
    if const_only.iter().all(|&i| holds(&pats[i], &[])) && !domain.is_empty() {
        let mut asg = vec![0usize; vars.len()];
        let select: Vec<usize> = q.select_vars.iter().map(|v| slot(v)).collect();
        fn go(
            k: usize,
            asg: &mut Vec<usize>,
            n: usize,
            ok: &dyn Fn(usize, &[usize]) -> bool,
            emit: &mut dyn FnMut(&[usize]),
        ) {
            if k == asg.len() {
                emit(asg);
                return;
            }
            for d in 0..n {
                asg[k] = d;
                if ok(k, asg) {
                    go(k + 1, asg, n, ok, emit);
                }
            }
        }
        let ok = |k: usize, asg: &[usize]| {
            pat_at[k].iter().all(|&i| holds(&pats[i], asg))
                && filt_at[k].iter().all(|&(a, b)| domain[asg[a]] != domain[asg[b]])
        };
        go(0, &mut asg, domain.len(), &ok, &mut |asg| {
            rows.push(select.iter().map(|&k| domain[asg[k]].clone()).collect());
        });
    }
    if q.distinct {
        rows.sort();
        rows.dedup();
    }
    rows
}

/// Random store of at most `max_triples` triples over small term pools.
pub fn random_triples(rng: &mut ChaCha8Rng, max_triples: usize) -> Vec<Triple> {
    let n = rng.random_range(max_triples / 3..=max_triples);
    (0..n)
        .map(|_| {
            let o = if rng.random_bool(0.1) {
                Term::literal(format!("v{}", rng.random_range(0..2)))
            } else {
                node(rng)
            };
            Triple::new(node(rng), pred(rng), o)
        })
        .collect()
}

fn node(rng: &mut ChaCha8Rng) -> Term {
    Term::iri(format!("urn:n{}", rng.random_range(0..5)))
}

fn pred(rng: &mut ChaCha8Rng) -> Term {
    Term::iri(format!("urn:p{}", rng.random_range(0..3)))
}

const VARS: [&str; 5] = ["a", "b", "c", "d", "e"];

/// Random query: 1 to `max_patterns` patterns, at most `max_filters` filters.
pub fn random_query(rng: &mut ChaCha8Rng, max_patterns: usize, max_filters: usize) -> QueryIr {
    let n = rng.random_range(1..=max_patterns);
    // fewer distinct variables make joins, and therefore rows, more likely
    let pool = &VARS[..rng.random_range(1..=VARS.len())];
    let term = |rng: &mut ChaCha8Rng, pos: usize| -> PatternTerm {
        if rng.random_bool(0.75) {
            PatternTerm::Var(pool.choose(rng).unwrap().to_string())
        } else {
            PatternTerm::Const(match pos {
                1 => pred(rng),
                // occasionally a term that never occurs in the store
                _ if rng.random_bool(0.05) => Term::iri("urn:absent"),
                2 if rng.random_bool(0.1) => Term::literal("v0"),
                _ => node(rng),
            })
        }
    };
    let mut patterns = Vec::new();
    for _ in 0..n {
        let s = term(rng, 0);
        let p = if rng.random_bool(0.8) {
            PatternTerm::Const(pred(rng))
        } else {
            term(rng, 1)
        };
        let o = term(rng, 2);
        patterns.push(TriplePattern::new(s, p, o));
    }
    let mut q = QueryIr {
        patterns,
        distinct: rng.random_bool(0.3),
        ..Default::default()
    };
    let vars = q.pattern_vars();
    if vars.is_empty() {
        q.patterns[0].s = PatternTerm::Var("a".into());
    }
    let vars = q.pattern_vars();
    q.select_vars = vars.iter().filter(|_| rng.random_bool(0.7)).cloned().collect();
    if q.select_vars.is_empty() {
        q.select_vars.push(vars[0].clone());
    }
    if vars.len() >= 2 {
        for _ in 0..rng.random_range(0..=max_filters) {
            let a = vars.choose(rng).unwrap().clone();
            let b = vars.choose(rng).unwrap().clone();
            if a != b {
                q.filters.push((a, b));
            }
        }
    }
    q.validate().unwrap();
    q
}

pub fn sorted(mut rows: Vec<Vec<Term>>) -> Vec<Vec<Term>> {
    rows.sort();
    rows
}
