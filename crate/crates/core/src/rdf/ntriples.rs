use super::{is_absolute_iri, Term, Triple, TripleStore};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum NtError {
    #[error("{document}:{line}: {message}")]
    Syntax {
        document: String,
        line: usize,
        message: String,
    },
    #[error("{document}:{line}: relative IRI <{iri}>")]
    RelativeIri {
        document: String,
        line: usize,
        iri: String,
    },
    #[error("{document}: not valid UTF-8")]
    Encoding { document: String },
}

/// Loads N-Triples documents into one deduplicated store.
///
/// Blank node labels are scoped per document: `_:b` in the second document is
/// stored as `_:d1_b`.
pub fn parse_ntriples<N: AsRef<str>, B: AsRef<[u8]>>(
    documents: &[(N, B)],
) -> Result<TripleStore, NtError> {
    let mut triples = Vec::new();
    for (i, (name, bytes)) in documents.iter().enumerate() {
        let name = name.as_ref();
        let text = std::str::from_utf8(bytes.as_ref()).map_err(|_| NtError::Encoding {
            document: name.to_string(),
        })?;
        let scope = format!("d{i}_");
        for mut t in parse_document(name, text)? {
            scope_blank(&mut t.s, &scope);
            scope_blank(&mut t.o, &scope);
            triples.push(t);
        }
    }
    Ok(TripleStore::from_triples(triples))
}

fn scope_blank(term: &mut Term, scope: &str) {
    if let Term::Blank(label) = term {
        label.insert_str(0, scope);
    }
}

/// Parses one N-Triples document; blank labels are kept as written.
pub fn parse_document(name: &str, text: &str) -> Result<Vec<Triple>, NtError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let mut cur = Cursor::new(line);
        let err = |message: String| NtError::Syntax {
            document: name.to_string(),
            line: i + 1,
            message,
        };
        cur.skip_ws();
        if cur.at_end() || cur.peek() == Some('#') {
            continue;
        }
        let s = cur.subject().map_err(err)?;
        cur.skip_ws();
        let p = cur.iri().map_err(err)?;
        cur.skip_ws();
        let o = cur.object().map_err(err)?;
        cur.skip_ws();
        if cur.next() != Some('.') {
            return Err(err("expected `.` after object".into()));
        }
        cur.skip_ws();
        if !cur.at_end() && cur.peek() != Some('#') {
            return Err(err(format!("unexpected trailing text `{}`", cur.rest())));
        }
        for term in [&s, &p, &o] {
            if let Term::Iri(iri) = term {
                if !is_absolute_iri(iri) {
                    return Err(NtError::RelativeIri {
                        document: name.to_string(),
                        line: i + 1,
                        iri: iri.clone(),
                    });
                }
            }
        }
        out.push(Triple::new(s, p, o));
    }
    Ok(out)
}

struct Cursor<'a> {
    line: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(line: &'a str) -> Self {
        Cursor { line, pos: 0 }
    }

    fn peek(&self) -> Option<char> {
        self.line[self.pos..].chars().next()
    }

    fn next(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.line.len()
    }

    fn rest(&self) -> &'a str {
        &self.line[self.pos..]
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.next();
        }
    }

    fn subject(&mut self) -> Result<Term, String> {
        match self.peek() {
            Some('<') => self.iri(),
            Some('_') => self.blank(),
            Some(c) => Err(format!("subject must be an IRI or blank node, found `{c}`")),
            None => Err("missing subject".into()),
        }
    }

    fn object(&mut self) -> Result<Term, String> {
        match self.peek() {
            Some('<') => self.iri(),
            Some('_') => self.blank(),
            Some('"') => self.literal(),
            Some(c) => Err(format!("unexpected `{c}` in object position")),
            None => Err("missing object".into()),
        }
    }

    fn iri(&mut self) -> Result<Term, String> {
        if self.next() != Some('<') {
            return Err("expected `<`".into());
        }
        let mut iri = String::new();
        loop {
            match self.next() {
                Some('>') => return Ok(Term::Iri(iri)),
                Some('\\') => iri.push(self.unicode_escape()?),
                Some(c) if c <= ' ' || "<\"{}|^`".contains(c) => {
                    return Err(format!("invalid character {c:?} in IRI"))
                }
                Some(c) => iri.push(c),
                None => return Err("unterminated IRI".into()),
            }
        }
    }

    fn unicode_escape(&mut self) -> Result<char, String> {
        let len = match self.next() {
            Some('u') => 4,
            Some('U') => 8,
            other => return Err(format!("invalid escape {other:?}")),
        };
        let hex: String = (0..len).filter_map(|_| self.next()).collect();
        u32::from_str_radix(&hex, 16)
            .ok()
            .filter(|_| hex.len() == len)
            .and_then(char::from_u32)
            .ok_or_else(|| format!("invalid unicode escape `{hex}`"))
    }

    fn blank(&mut self) -> Result<Term, String> {
        if self.next() != Some('_') || self.next() != Some(':') {
            return Err("expected `_:`".into());
        }
        let rest = self.rest();
        let mut len = rest
            .find(|c: char| !(c.is_alphanumeric() || matches!(c, '_' | '-' | '.')))
            .unwrap_or(rest.len());
        // a trailing '.' terminates the statement rather than the label
        while rest[..len].ends_with('.') {
            len -= 1;
        }
        if len == 0 {
            return Err("empty blank node label".into());
        }
        let label = rest[..len].to_string();
        self.pos += len;
        Ok(Term::Blank(label))
    }

    fn literal(&mut self) -> Result<Term, String> {
        self.next();
        let mut lexical = String::new();
        loop {
            match self.next() {
                Some('"') => break,
                Some('\\') => match self.peek() {
                    Some('u' | 'U') => lexical.push(self.unicode_escape()?),
                    Some(c) => {
                        self.next();
                        lexical.push(match c {
                            't' => '\t',
                            'b' => '\u{8}',
                            'n' => '\n',
                            'r' => '\r',
                            'f' => '\u{c}',
                            '"' => '"',
                            '\'' => '\'',
                            '\\' => '\\',
                            other => return Err(format!("invalid escape `\\{other}`")),
                        });
                    }
                    None => return Err("unterminated literal".into()),
                },
                Some(c) => lexical.push(c),
                None => return Err("unterminated literal".into()),
            }
        }
        let mut datatype = None;
        let mut language = None;
        match self.peek() {
            Some('@') => {
                self.next();
                let mut tag = String::new();
                while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '-') {
                    tag.push(c);
                    self.next();
                }
                if !tag.starts_with(|c: char| c.is_ascii_alphabetic()) {
                    return Err("invalid language tag".into());
                }
                language = Some(tag);
            }
            Some('^') => {
                self.next();
                if self.next() != Some('^') {
                    return Err("expected `^^`".into());
                }
                match self.iri()? {
                    Term::Iri(dt) => datatype = Some(dt),
                    _ => unreachable!(),
                }
            }
            _ => {}
        }
        Ok(Term::Literal {
            lexical,
            datatype,
            language,
        })
    }
}
