use std::time::Duration;

use crate::ontology;
use crate::rdf::{parse_document, Term};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ResultsError {
    #[error("empty results table")]
    Empty,
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },
}

/// Rows of bound terms in the order of `header`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultSet {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Term>>,
    pub elapsed: Duration,
}

impl ResultSet {
    pub fn elapsed_ms(&self) -> f64 {
        self.elapsed.as_secs_f64() * 1000.0
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, var: &str) -> Option<usize> {
        self.header.iter().position(|h| h == var)
    }

    /// Header line of variable names, then one line per row, cells separated by ` | `.
    pub fn to_table(&self) -> String {
        let mut out = self.header.join(" | ");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Term::to_compact).collect();
            out.push_str(&cells.join(" | "));
            out.push('\n');
        }
        out
    }

    /// Reads back the output of [`ResultSet::to_table`].
    pub fn parse_table(text: &str) -> Result<ResultSet, ResultsError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(ResultsError::Empty)?;
        let header: Vec<String> = header
            .split('|')
            .map(|h| h.trim().trim_start_matches('?').to_string())
            .filter(|h| !h.is_empty())
            .collect();
        let mut rows = Vec::new();
        for (i, line) in lines {
            let err = |message: String| ResultsError::Row { line: i + 1, message };
            let row = parse_row(line.trim()).map_err(err)?;
            if row.len() != header.len() {
                return Err(err(format!("expected {} cells, found {}", header.len(), row.len())));
            }
            rows.push(row);
        }
        Ok(ResultSet {
            header,
            rows,
            elapsed: Duration::ZERO,
        })
    }
}

fn parse_row(mut rest: &str) -> Result<Vec<Term>, String> {
    let mut out = Vec::new();
    loop {
        let (term, len) = parse_cell(rest)?;
        out.push(term);
        rest = rest[len..].trim_start();
        if rest.is_empty() {
            return Ok(out);
        }
        rest = rest
            .strip_prefix('|')
            .ok_or_else(|| format!("expected `|` before `{rest}`"))?
            .trim_start();
    }
}

fn parse_cell(s: &str) -> Result<(Term, usize), String> {
    let end_plain = s.find(|c: char| c.is_whitespace() || c == '|').unwrap_or(s.len());
    if let Some(local) = s[..end_plain].strip_prefix("woc:") {
        return Ok((Term::iri(ontology::iri(local)), end_plain));
    }
    let len = if s.starts_with('<') {
        s.find('>').map(|i| i + 1).ok_or("unterminated IRI")?
    } else if s.starts_with("_:") {
        end_plain
    } else if let Some(rest) = s.strip_prefix('"') {
        let mut escaped = false;
        let close = rest
            .char_indices()
            .find(|&(_, c)| {
                let hit = c == '"' && !escaped;
                escaped = c == '\\' && !escaped;
                hit
            })
            .map(|(i, _)| i + 2)
            .ok_or("unterminated literal")?;
        close + s[close..].find(|c: char| c.is_whitespace() || c == '|').unwrap_or(s.len() - close)
    } else {
        return Err(format!("unrecognised term `{}`", &s[..end_plain]));
    };
    let line = format!("_:s <urn:p> {} .", &s[..len]);
    let term = parse_document("cell", &line)
        .map_err(|e| e.to_string())?
        .pop()
        .expect("one triple")
        .o;
    Ok((term, len))
}
