//! Lexer and recursive-descent parser for the predicate DSL.
//!
//! ```text
//! expr  := or ; or := and ("or" and)* ; and := unary ("and" unary)*
//! unary := "not" unary | "(" expr ")" | atom
//! ```
//! Empty input parses to `true`.

use crate::graph::{DegreeMode, PropertyValue};

use super::regex::parse_type_regex_at;
use super::{
    CmpOp, Formula, NodeAtom, NodePredicate, PathAtom, PathPredicate, PredicateError, Quantifier,
    WalkEnd,
};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Num(PropertyValue),
    LParen,
    RParen,
    Cmp(CmpOp),
    Matches,
    /// Regex body and the offset of its first character.
    Regex(String, usize),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn syntax(position: usize, message: impl Into<String>) -> PredicateError {
    PredicateError::Syntax {
        position,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>, PredicateError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'=' if bytes.get(i + 1) == Some(&b'~') => {
                i += 2;
                Tok::Matches
            }
            b'=' => {
                i += 1;
                Tok::Cmp(CmpOp::Eq)
            }
            b'!' if bytes.get(i + 1) == Some(&b'=') => {
                i += 2;
                Tok::Cmp(CmpOp::Ne)
            }
            b'<' | b'>' => {
                let eq = bytes.get(i + 1) == Some(&b'=');
                i += if eq { 2 } else { 1 };
                Tok::Cmp(match (c, eq) {
                    (b'<', false) => CmpOp::Lt,
                    (b'<', true) => CmpOp::Le,
                    (_, false) => CmpOp::Gt,
                    (_, true) => CmpOp::Ge,
                })
            }
            b'"' => {
                i += 1;
                while i < bytes.len() && bytes[i] != b'"' {
                    if bytes[i] == b'\\' {
                        i += 1;
                    }
                    i += 1;
                }
                if i >= bytes.len() {
                    return Err(syntax(start, "unterminated string"));
                }
                i += 1;
                let s: String = serde_json::from_str(&text[start..i])
                    .map_err(|e| syntax(start, format!("bad string literal: {e}")))?;
                Tok::Str(s)
            }
            b'/' => {
                i += 1;
                let body_start = i;
                let mut in_quote = false;
                while i < bytes.len() && (in_quote || bytes[i] != b'/') {
                    match bytes[i] {
                        b'"' => in_quote = !in_quote,
                        b'\\' if in_quote => i += 1,
                        _ => {}
                    }
                    i += 1;
                }
                if i >= bytes.len() {
                    return Err(syntax(start, "unterminated regex"));
                }
                let body = text[body_start..i].to_string();
                i += 1;
                Tok::Regex(body, body_start)
            }
            b'-' | b'0'..=b'9' => {
                if c == b'-' && !bytes.get(i + 1).is_some_and(u8::is_ascii_digit) {
                    return Err(syntax(start, "expected a digit after `-`"));
                }
                i += 1;
                let mut real = false;
                while i < bytes.len() {
                    match bytes[i] {
                        b'0'..=b'9' => i += 1,
                        b'.' if !real => {
                            real = true;
                            i += 1;
                        }
                        b'e' | b'E' => {
                            real = true;
                            i += 1;
                            if matches!(bytes.get(i), Some(b'+') | Some(b'-')) {
                                i += 1;
                            }
                        }
                        _ => break,
                    }
                }
                let lit = &text[start..i];
                let value = if real {
                    lit.parse::<f64>()
                        .ok()
                        .filter(|r| r.is_finite())
                        .map(PropertyValue::Real)
                } else {
                    lit.parse::<i64>().ok().map(PropertyValue::Int)
                };
                Tok::Num(value.ok_or_else(|| syntax(start, format!("bad number `{lit}`")))?)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                Tok::Ident(text[start..i].to_string())
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character `{ch}`")));
            }
        };
        out.push(Token { tok, pos: start });
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, PredicateError> {
        Ok(Parser {
            tokens: lex(text)?,
            pos: 0,
            end: text.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), PredicateError> {
        if self.is_keyword(kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(syntax(self.offset(), format!("expected `{kw}`")))
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), PredicateError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(syntax(self.offset(), format!("expected {what}")))
        }
    }

    fn cmp(&mut self) -> Result<CmpOp, PredicateError> {
        match self.peek() {
            Some(Tok::Cmp(op)) => {
                let op = *op;
                self.pos += 1;
                Ok(op)
            }
            _ => Err(syntax(self.offset(), "expected a comparison operator")),
        }
    }

    fn literal(&mut self) -> Result<PropertyValue, PredicateError> {
        let at = self.offset();
        match self.next() {
            Some(Tok::Str(s)) => Ok(PropertyValue::Text(s)),
            Some(Tok::Num(v)) => Ok(v),
            Some(Tok::Ident(s)) if s == "true" => Ok(PropertyValue::Bool(true)),
            Some(Tok::Ident(s)) if s == "false" => Ok(PropertyValue::Bool(false)),
            _ => Err(syntax(at, "expected a literal")),
        }
    }

    fn integer(&mut self, what: &str) -> Result<i64, PredicateError> {
        let at = self.offset();
        match self.literal()? {
            PropertyValue::Int(i) => Ok(i),
            other => Err(PredicateError::TypeMismatch {
                position: at,
                message: format!("{what} compares with integers, found {}", other.kind()),
            }),
        }
    }

    fn formula<A>(
        &mut self,
        atom: fn(&mut Parser) -> Result<A, PredicateError>,
    ) -> Result<Formula<A>, PredicateError> {
        if self.tokens.is_empty() {
            return Ok(Formula::True);
        }
        let f = self.or(atom)?;
        if self.pos < self.tokens.len() {
            return Err(syntax(self.offset(), "unexpected trailing input"));
        }
        Ok(f)
    }

    fn or<A>(
        &mut self,
        atom: fn(&mut Parser) -> Result<A, PredicateError>,
    ) -> Result<Formula<A>, PredicateError> {
        let mut items = vec![self.and(atom)?];
        while self.is_keyword("or") {
            self.pos += 1;
            items.push(self.and(atom)?);
        }
        Ok(if items.len() == 1 {
            items.pop().expect("one item")
        } else {
            Formula::Or(items)
        })
    }

    fn and<A>(
        &mut self,
        atom: fn(&mut Parser) -> Result<A, PredicateError>,
    ) -> Result<Formula<A>, PredicateError> {
        let mut items = vec![self.unary(atom)?];
        while self.is_keyword("and") {
            self.pos += 1;
            items.push(self.unary(atom)?);
        }
        Ok(if items.len() == 1 {
            items.pop().expect("one item")
        } else {
            Formula::And(items)
        })
    }

    fn unary<A>(
        &mut self,
        atom: fn(&mut Parser) -> Result<A, PredicateError>,
    ) -> Result<Formula<A>, PredicateError> {
        if self.is_keyword("not") {
            self.pos += 1;
            return Ok(Formula::Not(Box::new(self.unary(atom)?)));
        }
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let inner = self.or(atom)?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(inner);
        }
        if self.is_keyword("true") {
            self.pos += 1;
            return Ok(Formula::True);
        }
        if self.is_keyword("false") {
            self.pos += 1;
            return Ok(Formula::False);
        }
        if self.peek().is_none() {
            return Err(syntax(self.offset(), "unexpected end of input"));
        }
        Ok(Formula::Atom(atom(self)?))
    }

    /// `"in" "S"` or `"not" "in" "S"`; returns whether it was negated.
    fn membership(&mut self) -> Result<bool, PredicateError> {
        let negated = if self.is_keyword("not") {
            self.pos += 1;
            true
        } else {
            false
        };
        self.expect_keyword("in")?;
        self.expect_keyword("S")?;
        Ok(negated)
    }
}

fn node_atom(p: &mut Parser) -> Result<NodeAtom, PredicateError> {
    let at = p.offset();
    let name = match p.next() {
        Some(Tok::Ident(s)) => s,
        _ => return Err(syntax(at, "expected a predicate")),
    };
    if name == "v" {
        let negated = p.membership()?;
        return Ok(NodeAtom::InS { negated });
    }
    if p.peek() != Some(&Tok::LParen) {
        return Err(PredicateError::UnknownFunction { name, position: at });
    }
    p.pos += 1;
    p.expect_keyword("v")?;
    p.expect(Tok::RParen, "`)`")?;
    let builtin = match name.as_str() {
        "reachable_from_S" => Some(NodeAtom::ReachableFromS),
        "reaches_S" => Some(NodeAtom::ReachesS),
        _ => None,
    };
    if let Some(atom) = builtin {
        return Ok(atom);
    }
    if !matches!(p.peek(), Some(Tok::Cmp(_))) {
        return Err(PredicateError::UnknownFunction { name, position: at });
    }
    let op = p.cmp()?;
    let mode = match name.as_str() {
        "deg" => Some(DegreeMode::All),
        "deg_out" => Some(DegreeMode::Out),
        "deg_in" => Some(DegreeMode::In),
        _ => None,
    };
    match mode {
        Some(mode) => Ok(NodeAtom::Degree {
            mode,
            op,
            value: p.integer(&name)?,
        }),
        None => Ok(NodeAtom::Property {
            key: name,
            op,
            value: p.literal()?,
        }),
    }
}

fn path_atom(p: &mut Parser) -> Result<PathAtom, PredicateError> {
    let at = p.offset();
    let name = match p.next() {
        Some(Tok::Ident(s)) => s,
        _ => return Err(syntax(at, "expected a predicate")),
    };
    match name.as_str() {
        "types" => {
            p.expect(Tok::Matches, "`=~`")?;
            let rat = p.offset();
            match p.next() {
                Some(Tok::Regex(body, offset)) => {
                    Ok(PathAtom::Types(parse_type_regex_at(&body, offset)?))
                }
                _ => Err(syntax(rat, "expected /regex/")),
            }
        }
        "len" => {
            let op = p.cmp()?;
            Ok(PathAtom::Len {
                op,
                value: p.integer("len")?,
            })
        }
        "src" | "dst" => {
            let end = if name == "src" {
                WalkEnd::Src
            } else {
                WalkEnd::Dst
            };
            let negated = p.membership()?;
            Ok(PathAtom::Endpoint { end, negated })
        }
        "all" | "any" => {
            let quantifier = if name == "all" {
                Quantifier::All
            } else {
                Quantifier::Any
            };
            let kat = p.offset();
            let key = match p.next() {
                Some(Tok::Ident(k)) => k,
                _ => return Err(syntax(kat, "expected a property key")),
            };
            let op = p.cmp()?;
            Ok(PathAtom::Quantified {
                quantifier,
                key,
                op,
                value: p.literal()?,
            })
        }
        _ => Err(PredicateError::UnknownFunction { name, position: at }),
    }
}

pub fn parse_node_predicate(text: &str) -> Result<NodePredicate, PredicateError> {
    Parser::new(text)?.formula(node_atom)
}

pub fn parse_path_predicate(text: &str) -> Result<PathPredicate, PredicateError> {
    Parser::new(text)?.formula(path_atom)
}
