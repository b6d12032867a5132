use super::{PatternTerm, QueryError, QueryIr, TriplePattern};
use crate::ontology::RDF_TYPE;
use crate::rdf::Term;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Var(String),
    Iri(String),
    PName(String, String),
    Literal(String, Option<String>, Option<LitType>),
    Int(u64),
    Punct(char),
    Op(String),
}

#[derive(Debug, Clone, PartialEq)]
enum LitType {
    Iri(String),
    PName(String, String),
}

/// Parses the supported SPARQL subset into a [`QueryIr`].
///
/// Accepts predicate-object (`;`) and object (`,`) list shorthand, the `a`
/// keyword, `SELECT *` and `#` comments. Anything else recognisable as SPARQL
/// (`OPTIONAL`, `UNION`, general `FILTER` expressions, ...) is reported as
/// [`QueryError::Unsupported`].
pub fn parse_query(text: &str) -> Result<QueryIr, QueryError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        ir: QueryIr::default(),
        select_all: false,
    };
    p.query()?;
    let mut ir = p.ir;
    if p.select_all {
        ir.select_vars = ir.pattern_vars();
    }
    ir.validate()?;
    Ok(ir)
}

const UNSUPPORTED_KEYWORDS: &[&str] = &[
    "OPTIONAL", "UNION", "GRAPH", "BIND", "VALUES", "MINUS", "SERVICE", "ORDER", "GROUP",
    "HAVING", "OFFSET", "BASE", "CONSTRUCT", "ASK", "DESCRIBE", "REDUCED", "FROM", "EXISTS",
    "NOT",
];

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, QueryError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let err = |line: usize, message: String| QueryError::Syntax { line, message };
    let is_name = |c: char| c.is_alphanumeric() || c == '_' || c == '-';
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '?' | '$' => {
                let start = i + 1;
                i = start;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                if i == start {
                    return Err(err(line, "empty variable name".into()));
                }
                out.push((Tok::Var(chars[start..i].iter().collect()), line));
            }
            '<' => {
                // IRIREF when it closes before any whitespace; otherwise an operator
                let close = chars[i + 1..]
                    .iter()
                    .position(|&c| c == '>' || c.is_whitespace() || c == '<');
                match close {
                    Some(n) if chars[i + 1 + n] == '>' => {
                        out.push((Tok::Iri(chars[i + 1..i + 1 + n].iter().collect()), line));
                        i += n + 2;
                    }
                    _ => {
                        let op = if chars.get(i + 1) == Some(&'=') { "<=" } else { "<" };
                        out.push((Tok::Op(op.into()), line));
                        i += op.len();
                    }
                }
            }
            '"' | '\'' => {
                let quote = c;
                i += 1;
                let mut lex = String::new();
                loop {
                    match chars.get(i) {
                        None | Some('\n') => return Err(err(line, "unterminated string".into())),
                        Some(&q) if q == quote => {
                            i += 1;
                            break;
                        }
                        Some('\\') => {
                            let e = chars.get(i + 1).copied().unwrap_or(' ');
                            lex.push(match e {
                                't' => '\t',
                                'n' => '\n',
                                'r' => '\r',
                                'b' => '\u{8}',
                                'f' => '\u{c}',
                                '"' | '\'' | '\\' => e,
                                _ => return Err(err(line, format!("invalid escape `\\{e}`"))),
                            });
                            i += 2;
                        }
                        Some(&ch) => {
                            lex.push(ch);
                            i += 1;
                        }
                    }
                }
                let mut lang = None;
                let mut dt = None;
                if chars.get(i) == Some(&'@') {
                    let start = i + 1;
                    i = start;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '-') {
                        i += 1;
                    }
                    lang = Some(chars[start..i].iter().collect());
                } else if chars.get(i) == Some(&'^') && chars.get(i + 1) == Some(&'^') {
                    i += 2;
                    if chars.get(i) == Some(&'<') {
                        let n = chars[i + 1..]
                            .iter()
                            .position(|&c| c == '>')
                            .ok_or_else(|| err(line, "unterminated datatype IRI".into()))?;
                        dt = Some(LitType::Iri(chars[i + 1..i + 1 + n].iter().collect()));
                        i += n + 2;
                    } else {
                        let start = i;
                        while i < chars.len() && (is_name(chars[i]) || chars[i] == ':') {
                            i += 1;
                        }
                        let word: String = chars[start..i].iter().collect();
                        let (pfx, local) = word
                            .split_once(':')
                            .ok_or_else(|| err(line, "expected datatype after `^^`".into()))?;
                        dt = Some(LitType::PName(pfx.into(), local.into()));
                    }
                }
                out.push((Tok::Literal(lex, lang, dt), line));
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s
                    .parse()
                    .map_err(|_| err(line, format!("integer out of range: {s}")))?;
                out.push((Tok::Int(n), line));
            }
            c if c.is_alphabetic() || c == '_' || c == ':' => {
                let start = i;
                while i < chars.len() && (is_name(chars[i]) || chars[i] == ':' || chars[i] == '.') {
                    i += 1;
                }
                // a trailing '.' ends the triple, not the name
                while i > start && chars[i - 1] == '.' {
                    i -= 1;
                }
                let word: String = chars[start..i].iter().collect();
                match word.split_once(':') {
                    Some((pfx, local)) => out.push((Tok::PName(pfx.into(), local.into()), line)),
                    None => out.push((Tok::Word(word), line)),
                }
            }
            '!' | '=' | '>' | '&' | '|' => {
                let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
                let op = match two.as_str() {
                    "!=" | ">=" | "&&" | "||" => two,
                    _ => c.to_string(),
                };
                i += op.chars().count();
                out.push((Tok::Op(op), line));
            }
            '{' | '}' | '(' | ')' | '[' | ']' | '.' | ';' | ',' | '*' => {
                out.push((Tok::Punct(c), line));
                i += 1;
            }
            other => return Err(err(line, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    ir: QueryIr,
    select_all: bool,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map_or(1, |(_, l)| *l)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn syntax(&self, message: impl Into<String>) -> QueryError {
        QueryError::Syntax {
            line: self.line(),
            message: message.into(),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw))
    }

    fn expect_punct(&mut self, c: char) -> Result<(), QueryError> {
        match self.bump() {
            Some(Tok::Punct(x)) if x == c => Ok(()),
            other => Err(self.syntax(format!("expected `{c}`, found {}", describe(other.as_ref())))),
        }
    }

    fn check_unsupported(&self) -> Result<(), QueryError> {
        if let Some(Tok::Word(w)) = self.peek() {
            let upper = w.to_ascii_uppercase();
            if UNSUPPORTED_KEYWORDS.contains(&upper.as_str()) {
                return Err(QueryError::Unsupported(upper));
            }
        }
        Ok(())
    }

    fn query(&mut self) -> Result<(), QueryError> {
        loop {
            self.check_unsupported()?;
            if !self.is_keyword("PREFIX") {
                break;
            }
            self.bump();
            let (pfx, local) = match self.bump() {
                Some(Tok::PName(p, l)) => (p, l),
                other => return Err(self.syntax(format!("expected prefix name, found {}", describe(other.as_ref())))),
            };
            if !local.is_empty() {
                return Err(self.syntax("prefix declaration must end with `:`"));
            }
            let iri = match self.bump() {
                Some(Tok::Iri(i)) => i,
                other => return Err(self.syntax(format!("expected IRI, found {}", describe(other.as_ref())))),
            };
            self.ir.prefixes.insert(pfx, iri);
        }

        self.check_unsupported()?;
        if !self.is_keyword("SELECT") {
            return Err(self.syntax("expected SELECT"));
        }
        self.bump();
        self.check_unsupported()?;
        if self.is_keyword("DISTINCT") {
            self.bump();
            self.ir.distinct = true;
        }
        if self.peek() == Some(&Tok::Punct('*')) {
            self.bump();
            self.select_all = true;
        } else {
            while let Some(Tok::Var(v)) = self.peek() {
                let v = v.clone();
                self.bump();
                if !self.ir.select_vars.contains(&v) {
                    self.ir.select_vars.push(v);
                }
            }
            if let Some(Tok::Punct('(')) = self.peek() {
                return Err(QueryError::Unsupported("SELECT expression".into()));
            }
        }

        self.check_unsupported()?;
        if self.is_keyword("WHERE") {
            self.bump();
        }
        self.expect_punct('{')?;
        self.group()?;

        while self.peek().is_some() {
            self.check_unsupported()?;
            if self.is_keyword("LIMIT") {
                self.bump();
                match self.bump() {
                    Some(Tok::Int(n)) if n > 0 => self.ir.limit = Some(n),
                    Some(Tok::Int(_)) => return Err(self.syntax("LIMIT must be positive")),
                    other => return Err(self.syntax(format!("expected integer after LIMIT, found {}", describe(other.as_ref())))),
                }
            } else {
                let t = self.bump();
                return Err(self.syntax(format!("unexpected {} after WHERE block", describe(t.as_ref()))));
            }
        }
        Ok(())
    }

    fn group(&mut self) -> Result<(), QueryError> {
        loop {
            self.check_unsupported()?;
            match self.peek() {
                None => return Err(self.syntax("unterminated WHERE block")),
                Some(Tok::Punct('}')) => {
                    self.bump();
                    return Ok(());
                }
                Some(Tok::Punct('{')) => return Err(QueryError::Unsupported("nested group pattern".into())),
                Some(Tok::Punct('.')) => {
                    self.bump();
                }
                Some(Tok::Word(w)) if w.eq_ignore_ascii_case("FILTER") => {
                    self.bump();
                    self.filter()?;
                }
                _ => self.triples()?,
            }
        }
    }

    fn filter(&mut self) -> Result<(), QueryError> {
        if self.peek() != Some(&Tok::Punct('(')) {
            return Err(QueryError::Unsupported("FILTER function call".into()));
        }
        self.bump();
        let start = self.pos;
        let mut depth = 1;
        while depth > 0 {
            match self.bump() {
                Some(Tok::Punct('(')) => depth += 1,
                Some(Tok::Punct(')')) => depth -= 1,
                Some(_) => {}
                None => return Err(self.syntax("unterminated FILTER")),
            }
        }
        let body: Vec<Tok> = self.toks[start..self.pos - 1].iter().map(|(t, _)| t.clone()).collect();
        match body.as_slice() {
            [Tok::Var(a), Tok::Op(op), Tok::Var(b)] if op == "!=" => {
                self.ir.filters.push((a.clone(), b.clone()));
                Ok(())
            }
            _ if body.iter().any(|t| matches!(t, Tok::Literal(..) | Tok::Int(_))) => {
                Err(QueryError::Unsupported("literal in FILTER".into()))
            }
            _ => Err(QueryError::Unsupported(
                "FILTER expression other than ?a != ?b".into(),
            )),
        }
    }

    fn triples(&mut self) -> Result<(), QueryError> {
        let subject = self.term(false)?;
        loop {
            let verb = self.verb()?;
            loop {
                let object = self.term(true)?;
                self.ir
                    .patterns
                    .push(TriplePattern::new(subject.clone(), verb.clone(), object));
                if self.peek() == Some(&Tok::Punct(',')) {
                    self.bump();
                } else {
                    break;
                }
            }
            if self.peek() == Some(&Tok::Punct(';')) {
                while self.peek() == Some(&Tok::Punct(';')) {
                    self.bump();
                }
                if matches!(self.peek(), Some(Tok::Punct('.' | '}'))) {
                    break;
                }
            } else {
                break;
            }
        }
        self.check_unsupported()?;
        match self.peek() {
            Some(Tok::Punct('.')) => {
                self.bump();
                Ok(())
            }
            Some(Tok::Punct('}')) => Ok(()),
            Some(Tok::Word(w)) if w.eq_ignore_ascii_case("FILTER") => Ok(()),
            other => Err(self.syntax(format!("expected `.` after triple, found {}", describe(other)))),
        }
    }

    fn verb(&mut self) -> Result<PatternTerm, QueryError> {
        if matches!(self.peek(), Some(Tok::Word(w)) if w == "a") {
            self.bump();
            return Ok(PatternTerm::Const(Term::iri(RDF_TYPE)));
        }
        if matches!(self.peek(), Some(Tok::Op(op)) if op == "^" || op == "|" || op == "/") {
            return Err(QueryError::Unsupported("property path".into()));
        }
        let t = self.term(false)?;
        if matches!(t, PatternTerm::Const(ref c) if c.is_literal()) {
            return Err(self.syntax("literal in predicate position"));
        }
        Ok(t)
    }

    fn term(&mut self, allow_literal: bool) -> Result<PatternTerm, QueryError> {
        self.check_unsupported()?;
        match self.bump() {
            Some(Tok::Var(v)) => Ok(PatternTerm::Var(v)),
            Some(Tok::Iri(i)) => Ok(PatternTerm::Const(Term::Iri(i))),
            Some(Tok::PName(p, l)) => Ok(PatternTerm::Const(Term::Iri(self.expand(&p, &l)?))),
            Some(Tok::Literal(lex, lang, dt)) if allow_literal => {
                let datatype = match dt {
                    None => None,
                    Some(LitType::Iri(i)) => Some(i),
                    Some(LitType::PName(p, l)) => Some(self.expand(&p, &l)?),
                };
                Ok(PatternTerm::Const(Term::Literal {
                    lexical: lex,
                    datatype,
                    language: lang,
                }))
            }
            Some(Tok::Literal(..)) => Err(QueryError::LiteralSubject),
            Some(Tok::Punct('[')) => Err(QueryError::Unsupported("blank node property list".into())),
            other => Err(self.syntax(format!("expected term, found {}", describe(other.as_ref())))),
        }
    }

    fn expand(&self, prefix: &str, local: &str) -> Result<String, QueryError> {
        self.ir
            .prefixes
            .get(prefix)
            .map(|base| format!("{base}{local}"))
            .ok_or_else(|| QueryError::UnknownPrefix(prefix.to_string()))
    }
}

fn describe(t: Option<&Tok>) -> String {
    match t {
        None => "end of input".into(),
        Some(Tok::Word(w)) => format!("`{w}`"),
        Some(Tok::Var(v)) => format!("`?{v}`"),
        Some(Tok::Iri(i)) => format!("`<{i}>`"),
        Some(Tok::PName(p, l)) => format!("`{p}:{l}`"),
        Some(Tok::Literal(l, ..)) => format!("literal \"{l}\""),
        Some(Tok::Int(n)) => format!("`{n}`"),
        Some(Tok::Punct(c)) => format!("`{c}`"),
        Some(Tok::Op(o)) => format!("`{o}`"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology;

    const TWO: &str = "PREFIX woc: <http://rdf.webofcode.org/woc/>\nSELECT ?ClassA ?OperationA\nWHERE {\n\
                       ?ClassA  a woc:Class .\n?OperationA  a woc:Method .\n?ClassA woc:hasMethod ?OperationA .\n}";

    #[test]
    fn two_component_listing() {
        let ir = parse_query(TWO).unwrap();
        assert_eq!(ir.select_vars, ["ClassA", "OperationA"]);
        assert_eq!(ir.patterns.len(), 3);
        assert_eq!(ir.patterns[0].p, PatternTerm::Const(Term::iri(RDF_TYPE)));
        assert_eq!(ir.patterns[0].o, PatternTerm::Const(Term::woc("Class")));
        assert_eq!(ir.patterns[2].p, PatternTerm::Const(Term::iri(ontology::iri("hasMethod"))));
        assert_eq!(ir.limit, None);
    }

    #[test]
    fn limit() {
        let ir = parse_query("PREFIX woc: <http://rdf.webofcode.org/woc/>\nSELECT ?x WHERE { ?x a woc:Class . } LIMIT 10").unwrap();
        assert_eq!(ir.limit, Some(10));
        assert!(matches!(
            parse_query("SELECT ?x WHERE { ?x ?p ?o } LIMIT 0"),
            Err(QueryError::Syntax { .. })
        ));
    }

    #[test]
    fn filter_pair() {
        let ir = parse_query("SELECT ?m1 ?m2 WHERE { ?c <urn:m> ?m1 . ?c <urn:m> ?m2 . FILTER(?m1 != ?m2) }").unwrap();
        assert_eq!(ir.filters, [("m1".to_string(), "m2".to_string())]);
    }

    #[test]
    fn shorthand_lists() {
        let q = "PREFIX woc: <http://rdf.webofcode.org/woc/>
                 SELECT DISTINCT ?s WHERE {
                   ?s a woc:Class ; woc:hasModifier woc:Public , woc:Final ;
                      woc:hasMethod ?m .
                   ?m a woc:Method ;
                 }";
        let ir = parse_query(q).unwrap();
        assert!(ir.distinct);
        assert_eq!(ir.patterns.len(), 5);
        assert!(ir.patterns[..4].iter().all(|p| p.s == PatternTerm::Var("s".into())));
        assert_eq!(ir.patterns[2].o, PatternTerm::Const(Term::woc("Final")));
    }

    #[test]
    fn select_star_and_comments() {
        let ir = parse_query("SELECT * # all\nWHERE { ?a <urn:p> ?b . ?b <urn:q> ?c }").unwrap();
        assert_eq!(ir.select_vars, ["a", "b", "c"]);
    }

    #[test]
    fn unknown_prefix() {
        assert_eq!(
            parse_query("SELECT ?x WHERE { ?x a foo:Bar }"),
            Err(QueryError::UnknownPrefix("foo".into()))
        );
    }

    #[test]
    fn unsupported_constructs_are_named() {
        let cases = [
            ("SELECT ?x WHERE { ?x <urn:p> ?y OPTIONAL { ?y <urn:q> ?z } }", "OPTIONAL"),
            ("SELECT ?x WHERE { { ?x <urn:p> ?y } UNION { ?x <urn:q> ?y } }", "nested group pattern"),
            ("SELECT ?x WHERE { ?x <urn:p> ?y . FILTER(?y != \"a\") }", "literal in FILTER"),
            ("SELECT ?x WHERE { ?x <urn:p> ?y . FILTER(?x = ?y) }", "FILTER expression other than ?a != ?b"),
            ("SELECT ?x WHERE { ?x <urn:p> ?y } ORDER BY ?x", "ORDER"),
            ("SELECT ?x WHERE { ?x <urn:p> ?y . FILTER regex(?y, \"a\") }", "FILTER function call"),
        ];
        for (q, name) in cases {
            assert_eq!(parse_query(q), Err(QueryError::Unsupported(name.into())), "{q}");
        }
    }

    #[test]
    fn variables_must_occur_in_patterns() {
        assert_eq!(
            parse_query("SELECT ?z WHERE { ?x <urn:p> ?y }"),
            Err(QueryError::UnboundVariable("z".into()))
        );
        assert_eq!(
            parse_query("SELECT ?x WHERE { ?x <urn:p> ?y . FILTER(?x != ?q) }"),
            Err(QueryError::UnboundVariable("q".into()))
        );
    }

    #[test]
    fn literal_objects() {
        let ir = parse_query("SELECT ?x WHERE { ?x <urn:name> \"Smith\"@en }").unwrap();
        assert_eq!(
            ir.patterns[0].o,
            PatternTerm::Const(Term::Literal {
                lexical: "Smith".into(),
                datatype: None,
                language: Some("en".into())
            })
        );
        assert_eq!(
            parse_query("SELECT ?x WHERE { \"a\" <urn:p> ?x }"),
            Err(QueryError::LiteralSubject)
        );
    }

    #[test]
    fn degenerate_empty_query() {
        let ir = parse_query("PREFIX woc: <http://rdf.webofcode.org/woc/>\n\nSELECT \nWHERE {\n}\n").unwrap();
        assert!(ir.select_vars.is_empty() && ir.patterns.is_empty());
    }
}
