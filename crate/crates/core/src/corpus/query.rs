//! Boolean search queries in the Twitter v2 search dialect.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! or    := and ("OR" and)*
//! and   := unary ("AND"? unary)*        adjacency is AND
//! unary := ("-" | "NOT") unary | primary
//! primary := "(" or ")" | "\"phrase\"" | @handle | lang:xx | is:retweet | -is:retweet | word
//! ```
//!
//! Keywords are case-insensitive. `-is-retweet` is accepted as a spelling of
//! `-is:retweet`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::record::TweetRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryNode {
    Term(String),
    Mention(String),
    And(Vec<QueryNode>),
    Or(Vec<QueryNode>),
    Not(Box<QueryNode>),
    LangFilter(String),
    RetweetExclusion,
}

/// A parsed query. Construct with [`parse_query`] or `str::parse`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    root: QueryNode,
}

pub fn parse_query(source: &str) -> Result<Query> {
    let tokens = lex(source)?;
    if tokens.is_empty() {
        return Err(syntax(0, "empty query"));
    }
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        source_len: source.len(),
    };
    let root = parser.or_expr()?;
    if let Some(tok) = parser.peek() {
        let message = match tok.kind {
            TokKind::RParen => "unbalanced parenthesis",
            _ => "unexpected token",
        };
        return Err(syntax(tok.offset, message));
    }
    Ok(Query { root })
}

impl std::str::FromStr for Query {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_query(s)
    }
}

impl Query {
    pub fn root(&self) -> &QueryNode {
        &self.root
    }

    /// Canonical text form. Parsing the output yields the same tree.
    pub fn render(&self) -> String {
        let mut out = String::new();
        render_node(&self.root, &mut out);
        out
    }

    /// Evaluates the query against a record. Total over any UTF-8 text.
    pub fn matches(&self, record: &TweetRecord) -> bool {
        let ctx = MatchContext::new(&record.text, &record.lang, record.is_retweet);
        ctx.eval(&self.root)
    }

    /// Same as [`Query::matches`] but over loose fields, for callers that have
    /// not built a [`TweetRecord`] yet.
    pub fn matches_fields(&self, text: &str, lang: &str, is_retweet: bool) -> bool {
        MatchContext::new(text, lang, is_retweet).eval(&self.root)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Serialize for Query {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for Query {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_query(&text).map_err(serde::de::Error::custom)
    }
}

fn syntax(offset: usize, message: &str) -> Error {
    Error::QuerySyntax {
        offset,
        message: message.to_owned(),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    LParen,
    RParen,
    Or,
    And,
    Not,
    Minus,
    Atom(QueryNode),
}

#[derive(Debug, Clone)]
struct Tok {
    kind: TokKind,
    offset: usize,
}

fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | '"')
}

fn lex(source: &str) -> Result<Vec<Tok>> {
    let mut tokens = Vec::new();
    let mut chars = source.char_indices().peekable();
    while let Some(&(offset, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        match c {
            '(' => {
                chars.next();
                tokens.push(Tok {
                    kind: TokKind::LParen,
                    offset,
                });
            }
            ')' => {
                chars.next();
                tokens.push(Tok {
                    kind: TokKind::RParen,
                    offset,
                });
            }
            '"' => {
                chars.next();
                let start = offset + 1;
                let mut end = None;
                for (i, ch) in chars.by_ref() {
                    if ch == '"' {
                        end = Some(i);
                        break;
                    }
                }
                let end = end.ok_or_else(|| syntax(offset, "unterminated phrase"))?;
                let phrase = source[start..end].split_whitespace().collect::<Vec<_>>().join(" ");
                if phrase.is_empty() {
                    return Err(syntax(offset, "empty operand"));
                }
                tokens.push(Tok {
                    kind: TokKind::Atom(QueryNode::Term(phrase.to_lowercase())),
                    offset,
                });
            }
            '-' => {
                let mut end = offset;
                let mut probe = chars.clone();
                while let Some(&(i, ch)) = probe.peek() {
                    if !is_word_char(ch) {
                        break;
                    }
                    end = i + ch.len_utf8();
                    probe.next();
                }
                let word = &source[offset..end];
                if word.eq_ignore_ascii_case("-is:retweet") || word.eq_ignore_ascii_case("-is-retweet") {
                    chars = probe;
                    tokens.push(Tok {
                        kind: TokKind::Atom(QueryNode::RetweetExclusion),
                        offset,
                    });
                } else {
                    chars.next();
                    tokens.push(Tok {
                        kind: TokKind::Minus,
                        offset,
                    });
                }
            }
            _ => {
                let mut end = offset;
                while let Some(&(i, ch)) = chars.peek() {
                    if !is_word_char(ch) {
                        break;
                    }
                    end = i + ch.len_utf8();
                    chars.next();
                }
                tokens.push(word_token(&source[offset..end], offset)?);
            }
        }
    }
    Ok(tokens)
}

fn word_token(word: &str, offset: usize) -> Result<Tok> {
    let kind = if word.eq_ignore_ascii_case("or") {
        TokKind::Or
    } else if word.eq_ignore_ascii_case("and") {
        TokKind::And
    } else if word.eq_ignore_ascii_case("not") {
        TokKind::Not
    } else if word.eq_ignore_ascii_case("is:retweet") {
        TokKind::Atom(QueryNode::Not(Box::new(QueryNode::RetweetExclusion)))
    } else if let Some(handle) = word.strip_prefix('@') {
        if handle.is_empty() {
            return Err(syntax(offset, "empty operand"));
        }
        TokKind::Atom(QueryNode::Mention(handle.to_lowercase()))
    } else if word.len() >= 5 && word[..5].eq_ignore_ascii_case("lang:") {
        let code = &word[5..];
        if code.is_empty() {
            return Err(syntax(offset, "empty operand"));
        }
        TokKind::Atom(QueryNode::LangFilter(code.to_lowercase()))
    } else {
        TokKind::Atom(QueryNode::Term(word.to_lowercase()))
    };
    Ok(Tok { kind, offset })
}

struct Parser<'a> {
    tokens: &'a [Tok],
    pos: usize,
    source_len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&Tok> {
        let tok = self.tokens.get(self.pos);
        self.pos += 1;
        tok
    }

    fn starts_unary(tok: &Tok) -> bool {
        matches!(
            tok.kind,
            TokKind::LParen | TokKind::Minus | TokKind::Not | TokKind::Atom(_)
        )
    }

    fn or_expr(&mut self) -> Result<QueryNode> {
        let mut children = vec![self.and_expr()?];
        while let Some(tok) = self.peek() {
            if tok.kind != TokKind::Or {
                break;
            }
            let op_offset = tok.offset;
            self.pos += 1;
            match self.peek() {
                Some(t) if Self::starts_unary(t) => children.push(self.and_expr()?),
                Some(t) if matches!(t.kind, TokKind::Or | TokKind::And) => {
                    return Err(syntax(t.offset, "unexpected operator"))
                }
                _ => return Err(syntax(op_offset, "dangling operator")),
            }
        }
        Ok(flatten(children, false))
    }

    fn and_expr(&mut self) -> Result<QueryNode> {
        let mut children = Vec::new();
        match self.peek() {
            Some(t) if Self::starts_unary(t) => children.push(self.unary()?),
            Some(t) if matches!(t.kind, TokKind::Or | TokKind::And) => {
                return Err(syntax(t.offset, "dangling operator"))
            }
            Some(t) if t.kind == TokKind::RParen => {
                return Err(syntax(t.offset, "empty operand"))
            }
            _ => return Err(syntax(self.source_len, "empty operand")),
        }
        while let Some(tok) = self.peek() {
            if tok.kind == TokKind::And {
                let op_offset = tok.offset;
                self.pos += 1;
                match self.peek() {
                    Some(t) if Self::starts_unary(t) => children.push(self.unary()?),
                    Some(t) if matches!(t.kind, TokKind::Or | TokKind::And) => {
                        return Err(syntax(t.offset, "unexpected operator"))
                    }
                    _ => return Err(syntax(op_offset, "dangling operator")),
                }
            } else if Self::starts_unary(tok) {
                children.push(self.unary()?);
            } else {
                break;
            }
        }
        Ok(flatten(children, true))
    }

    fn unary(&mut self) -> Result<QueryNode> {
        let tok = self.next().cloned().expect("caller checked");
        match tok.kind {
            TokKind::Minus | TokKind::Not => match self.peek() {
                Some(t) if Self::starts_unary(t) => Ok(QueryNode::Not(Box::new(self.unary()?))),
                _ => Err(syntax(tok.offset, "empty operand")),
            },
            TokKind::LParen => {
                if matches!(self.peek(), Some(t) if t.kind == TokKind::RParen) {
                    return Err(syntax(tok.offset, "empty group"));
                }
                if self.peek().is_none() {
                    return Err(syntax(tok.offset, "unbalanced parenthesis"));
                }
                let inner = self.or_expr()?;
                match self.next() {
                    Some(t) if t.kind == TokKind::RParen => Ok(inner),
                    _ => Err(syntax(tok.offset, "unbalanced parenthesis")),
                }
            }
            TokKind::Atom(node) => Ok(node),
            TokKind::RParen | TokKind::Or | TokKind::And => unreachable!("not a unary start"),
        }
    }
}

fn flatten(children: Vec<QueryNode>, is_and: bool) -> QueryNode {
    let mut flat = Vec::with_capacity(children.len());
    for child in children {
        match child {
            QueryNode::And(inner) if is_and => flat.extend(inner),
            QueryNode::Or(inner) if !is_and => flat.extend(inner),
            other => flat.push(other),
        }
    }
    if flat.len() == 1 {
        flat.pop().unwrap()
    } else if is_and {
        QueryNode::And(flat)
    } else {
        QueryNode::Or(flat)
    }
}

fn term_is_bare(term: &str) -> bool {
    !term.is_empty()
        && term.chars().all(is_word_char)
        && !term.starts_with(['-', '@'])
        && !["or", "and", "not", "is:retweet"].contains(&term)
        && !term.starts_with("lang:")
}

fn render_node(node: &QueryNode, out: &mut String) {
    match node {
        QueryNode::Term(t) if term_is_bare(t) => out.push_str(t),
        QueryNode::Term(t) => {
            out.push('"');
            out.push_str(t);
            out.push('"');
        }
        QueryNode::Mention(h) => {
            out.push('@');
            out.push_str(h);
        }
        QueryNode::LangFilter(code) => {
            out.push_str("lang:");
            out.push_str(code);
        }
        QueryNode::RetweetExclusion => out.push_str("-is:retweet"),
        QueryNode::Not(inner) => match inner.as_ref() {
            QueryNode::RetweetExclusion => out.push_str("is:retweet"),
            QueryNode::Term(_) | QueryNode::Mention(_) | QueryNode::LangFilter(_) => {
                out.push('-');
                render_node(inner, out);
            }
            _ => {
                out.push_str("-(");
                render_node(inner, out);
                out.push(')');
            }
        },
        QueryNode::And(children) => {
            for (i, child) in children.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                if matches!(child, QueryNode::Or(_)) {
                    out.push('(');
                    render_node(child, out);
                    out.push(')');
                } else {
                    render_node(child, out);
                }
            }
        }
        QueryNode::Or(children) => {
            for (i, child) in children.iter().enumerate() {
                if i > 0 {
                    out.push_str(" OR ");
                }
                render_node(child, out);
            }
        }
    }
}

/// Lowercased alphanumeric runs; everything else delimits.
fn word_tokens(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_owned)
        .collect()
}

struct MatchContext<'a> {
    lower: String,
    tokens: Vec<String>,
    lang: &'a str,
    is_retweet: bool,
}

impl<'a> MatchContext<'a> {
    fn new(text: &str, lang: &'a str, is_retweet: bool) -> Self {
        MatchContext {
            lower: text.to_lowercase(),
            tokens: word_tokens(text),
            lang,
            is_retweet,
        }
    }

    fn eval(&self, node: &QueryNode) -> bool {
        match node {
            QueryNode::Term(term) => self.has_phrase(term),
            QueryNode::Mention(handle) => self.has_mention(handle),
            QueryNode::LangFilter(code) => self.lang.eq_ignore_ascii_case(code),
            QueryNode::RetweetExclusion => !self.is_retweet,
            QueryNode::Not(inner) => !self.eval(inner),
            QueryNode::And(children) => children.iter().all(|c| self.eval(c)),
            QueryNode::Or(children) => children.iter().any(|c| self.eval(c)),
        }
    }

    fn has_phrase(&self, term: &str) -> bool {
        let needle = word_tokens(term);
        if needle.is_empty() || needle.len() > self.tokens.len() {
            return false;
        }
        self.tokens.windows(needle.len()).any(|w| w == needle.as_slice())
    }

    fn has_mention(&self, handle: &str) -> bool {
        let is_handle_char = |c: char| c.is_alphanumeric() || c == '_';
        let pattern = format!("@{handle}");
        self.lower.match_indices(&pattern).any(|(start, m)| {
            let before_ok = self.lower[..start]
                .chars()
                .next_back()
                .is_none_or(|c| !is_handle_char(c));
            let after_ok = self.lower[start + m.len()..]
                .chars()
                .next()
                .is_none_or(|c| !is_handle_char(c));
            before_ok && after_ok
        })
    }
}
