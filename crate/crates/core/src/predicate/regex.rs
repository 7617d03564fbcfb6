//! Regular expressions over sequences of edge types.
//!
//! Symbols are whole type names (`FRIENDS`, `DEVOTED_TO`), so juxtaposition
//! needs whitespace or grouping: `/A B/` is `A` followed by `B`. `.` matches
//! any single edge, including one without a type.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use super::PredicateError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeRegex {
    Symbol(String),
    Any,
    Concat(Vec<TypeRegex>),
    Alt(Vec<TypeRegex>),
    Star(Box<TypeRegex>),
    Plus(Box<TypeRegex>),
    Optional(Box<TypeRegex>),
}

impl TypeRegex {
    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            TypeRegex::Symbol(_) | TypeRegex::Any => 1,
            TypeRegex::Concat(xs) | TypeRegex::Alt(xs) => {
                1 + xs.iter().map(Self::size).sum::<usize>()
            }
            TypeRegex::Star(x) | TypeRegex::Plus(x) | TypeRegex::Optional(x) => 1 + x.size(),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            TypeRegex::Symbol(s) => {
                if is_type_ident(s) {
                    f.write_str(s)
                } else {
                    let quoted = serde_json::to_string(s).map_err(|_| fmt::Error)?;
                    f.write_str(&quoted)
                }
            }
            TypeRegex::Any => f.write_str("."),
            TypeRegex::Alt(xs) => {
                if prec > 0 {
                    f.write_str("(")?;
                }
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    x.fmt_prec(f, 1)?;
                }
                if prec > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            TypeRegex::Concat(xs) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    x.fmt_prec(f, 2)?;
                }
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            TypeRegex::Star(x) | TypeRegex::Plus(x) | TypeRegex::Optional(x) => {
                x.fmt_prec(f, 3)?;
                f.write_str(match self {
                    TypeRegex::Star(_) => "*",
                    TypeRegex::Plus(_) => "+",
                    _ => "?",
                })
            }
        }
    }
}

impl fmt::Display for TypeRegex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

fn is_type_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses the text between the slashes. `offset` shifts reported positions.
pub fn parse_type_regex(text: &str) -> Result<TypeRegex, PredicateError> {
    parse_type_regex_at(text, 0)
}

pub(crate) fn parse_type_regex_at(text: &str, offset: usize) -> Result<TypeRegex, PredicateError> {
    let mut p = RegexParser {
        src: text.as_bytes(),
        text,
        pos: 0,
        offset,
    };
    let re = p.alternation()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(re)
}

struct RegexParser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
    offset: usize,
}

impl RegexParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error(&self, message: String) -> PredicateError {
        PredicateError::Syntax {
            position: self.offset + self.pos,
            message,
        }
    }

    fn alternation(&mut self) -> Result<TypeRegex, PredicateError> {
        let mut branches = vec![self.concatenation()?];
        while self.peek() == Some(b'|') {
            self.pos += 1;
            branches.push(self.concatenation()?);
        }
        Ok(if branches.len() == 1 {
            branches.pop().expect("one branch")
        } else {
            TypeRegex::Alt(branches)
        })
    }

    fn concatenation(&mut self) -> Result<TypeRegex, PredicateError> {
        let mut items = Vec::new();
        while let Some(c) = self.peek() {
            if c == b'|' || c == b')' {
                break;
            }
            items.push(self.postfix()?);
        }
        match items.len() {
            0 => Err(PredicateError::EmptyAlphabetToken {
                position: self.offset + self.pos,
            }),
            1 => Ok(items.pop().expect("one item")),
            _ => Ok(TypeRegex::Concat(items)),
        }
    }

    fn postfix(&mut self) -> Result<TypeRegex, PredicateError> {
        let mut re = self.primary()?;
        // postfix operators bind tightly, no whitespace allowed before them
        while let Some(&c) = self.src.get(self.pos) {
            re = match c {
                b'*' => TypeRegex::Star(Box::new(re)),
                b'+' => TypeRegex::Plus(Box::new(re)),
                b'?' => TypeRegex::Optional(Box::new(re)),
                _ => break,
            };
            self.pos += 1;
        }
        Ok(re)
    }

    fn primary(&mut self) -> Result<TypeRegex, PredicateError> {
        let start = self.pos;
        match self.peek() {
            Some(b'.') => {
                self.pos += 1;
                Ok(TypeRegex::Any)
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.alternation()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'"') => {
                let begin = self.pos;
                self.pos += 1;
                while self.pos < self.src.len() && self.src[self.pos] != b'"' {
                    if self.src[self.pos] == b'\\' {
                        self.pos += 1;
                    }
                    self.pos += 1;
                }
                if self.pos >= self.src.len() {
                    return Err(self.error("unterminated quoted type".into()));
                }
                self.pos += 1;
                let lit: String = serde_json::from_str(&self.text[begin..self.pos])
                    .map_err(|e| self.error(format!("bad quoted type: {e}")))?;
                if lit.is_empty() {
                    return Err(PredicateError::EmptyAlphabetToken {
                        position: self.offset + begin,
                    });
                }
                Ok(TypeRegex::Symbol(lit))
            }
            Some(c) if c.is_ascii_alphanumeric() || c == b'_' => {
                let begin = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                Ok(TypeRegex::Symbol(self.text[begin..self.pos].to_string()))
            }
            Some(c) => Err(self.error(format!("unexpected `{}`", c as char))),
            None => {
                self.pos = start;
                Err(self.error("unexpected end of regex".into()))
            }
        }
    }
}

/// Transition label of an automaton.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Type(String),
    Any,
}

impl Label {
    pub fn matches(&self, symbol: Option<&str>) -> bool {
        match self {
            Label::Any => true,
            Label::Type(t) => symbol == Some(t.as_str()),
        }
    }

    fn meet(&self, other: &Label) -> Option<Label> {
        match (self, other) {
            (Label::Any, l) | (l, Label::Any) => Some(l.clone()),
            (Label::Type(a), Label::Type(b)) if a == b => Some(self.clone()),
            _ => None,
        }
    }
}

/// Epsilon-free automaton over edge types. State 0 is the start state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeNfa {
    transitions: Vec<Vec<(Label, usize)>>,
    accepting: Vec<bool>,
}

impl TypeNfa {
    /// Thompson construction followed by epsilon elimination; only states
    /// reachable from the start survive.
    pub fn compile(re: &TypeRegex) -> TypeNfa {
        let mut t = Thompson::default();
        let (start, end) = t.build(re);
        t.eliminate_epsilons(start, end)
    }

    /// Accepts every non-empty and empty sequence.
    pub fn universal() -> TypeNfa {
        TypeNfa {
            transitions: vec![vec![(Label::Any, 0)]],
            accepting: vec![true],
        }
    }

    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn start(&self) -> usize {
        0
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    pub fn transitions(&self, state: usize) -> &[(Label, usize)] {
        &self.transitions[state]
    }

    /// Successor states on one symbol; `None` is an edge without a type.
    pub fn successors<'a>(
        &'a self,
        state: usize,
        symbol: Option<&'a str>,
    ) -> impl Iterator<Item = usize> + 'a {
        self.transitions[state]
            .iter()
            .filter(move |(l, _)| l.matches(symbol))
            .map(|(_, s)| *s)
    }

    /// State-set simulation.
    pub fn accepts<S: AsRef<str>>(&self, seq: &[S]) -> bool {
        let mut current = BTreeSet::from([0usize]);
        for sym in seq {
            current = current
                .iter()
                .flat_map(|&s| self.successors(s, Some(sym.as_ref())))
                .collect();
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|&s| self.accepting[s])
    }

    /// Product automaton accepting the intersection of both languages.
    pub fn intersect(&self, other: &TypeNfa) -> TypeNfa {
        let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut order = vec![(0, 0)];
        index.insert((0, 0), 0);
        let mut transitions = Vec::new();
        let mut queue = VecDeque::from([(0usize, 0usize)]);
        while let Some((p, q)) = queue.pop_front() {
            let mut out = Vec::new();
            for (la, pa) in &self.transitions[p] {
                for (lb, qb) in &other.transitions[q] {
                    if let Some(l) = la.meet(lb) {
                        let key = (*pa, *qb);
                        let id = *index.entry(key).or_insert_with(|| {
                            order.push(key);
                            queue.push_back(key);
                            order.len() - 1
                        });
                        out.push((l, id));
                    }
                }
            }
            out.sort();
            out.dedup();
            transitions.push(out);
        }
        let accepting = order
            .iter()
            .map(|&(p, q)| self.accepting[p] && other.accepting[q])
            .collect();
        TypeNfa {
            transitions,
            accepting,
        }
    }
}

/// Compiles the regex and runs it on a type sequence.
pub fn regex_accepts<S: AsRef<str>>(nfa: &TypeNfa, types: &[S]) -> bool {
    nfa.accepts(types)
}

#[derive(Default)]
struct Thompson {
    // None labels are epsilon moves
    moves: Vec<Vec<(Option<Label>, usize)>>,
}

impl Thompson {
    fn state(&mut self) -> usize {
        self.moves.push(Vec::new());
        self.moves.len() - 1
    }

    fn edge(&mut self, from: usize, label: Option<Label>, to: usize) {
        self.moves[from].push((label, to));
    }

    fn build(&mut self, re: &TypeRegex) -> (usize, usize) {
        match re {
            TypeRegex::Symbol(s) => {
                let (a, b) = (self.state(), self.state());
                self.edge(a, Some(Label::Type(s.clone())), b);
                (a, b)
            }
            TypeRegex::Any => {
                let (a, b) = (self.state(), self.state());
                self.edge(a, Some(Label::Any), b);
                (a, b)
            }
            TypeRegex::Concat(xs) => {
                let mut frags = xs.iter().map(|x| self.build(x)).collect::<Vec<_>>();
                for i in 1..frags.len() {
                    let (prev_end, next_start) = (frags[i - 1].1, frags[i].0);
                    self.edge(prev_end, None, next_start);
                }
                let first = frags.first().expect("non-empty concat").0;
                let last = frags.pop().expect("non-empty concat").1;
                (first, last)
            }
            TypeRegex::Alt(xs) => {
                let (a, b) = (self.state(), self.state());
                for x in xs {
                    let (s, e) = self.build(x);
                    self.edge(a, None, s);
                    self.edge(e, None, b);
                }
                (a, b)
            }
            TypeRegex::Star(x) | TypeRegex::Plus(x) | TypeRegex::Optional(x) => {
                let (a, b) = (self.state(), self.state());
                let (s, e) = self.build(x);
                self.edge(a, None, s);
                self.edge(e, None, b);
                if !matches!(re, TypeRegex::Plus(_)) {
                    self.edge(a, None, b);
                }
                if !matches!(re, TypeRegex::Optional(_)) {
                    self.edge(e, None, s);
                }
                (a, b)
            }
        }
    }

    fn closure(&self, s: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([s]);
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for (l, v) in &self.moves[u] {
                if l.is_none() && seen.insert(*v) {
                    stack.push(*v);
                }
            }
        }
        seen
    }

    fn eliminate_epsilons(&self, start: usize, accept: usize) -> TypeNfa {
        let mut index: BTreeMap<usize, usize> = BTreeMap::from([(start, 0)]);
        let mut order = vec![start];
        let mut queue = VecDeque::from([start]);
        let mut transitions = Vec::new();
        let mut accepting = Vec::new();
        while let Some(p) = queue.pop_front() {
            let cl = self.closure(p);
            accepting.push(cl.contains(&accept));
            let mut out = Vec::new();
            for q in cl {
                for (l, r) in &self.moves[q] {
                    if let Some(l) = l {
                        let id = *index.entry(*r).or_insert_with(|| {
                            order.push(*r);
                            queue.push_back(*r);
                            order.len() - 1
                        });
                        out.push((l.clone(), id));
                    }
                }
            }
            out.sort();
            out.dedup();
            transitions.push(out);
        }
        TypeNfa {
            transitions,
            accepting,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nfa(text: &str) -> TypeNfa {
        TypeNfa::compile(&parse_type_regex(text).unwrap())
    }

    #[test]
    fn alternation_plus() {
        let n = nfa("(FRIENDS|TEACHES)+");
        assert!(n.accepts(&["FRIENDS", "TEACHES", "FRIENDS"]));
        assert!(n.accepts(&["TEACHES"]));
        assert!(!n.accepts::<&str>(&[]));
        assert!(!n.accepts(&["FROM"]));
    }

    #[test]
    fn concatenation_length() {
        let n = nfa("A B");
        assert!(!n.accepts(&["A"]));
        assert!(n.accepts(&["A", "B"]));
    }

    #[test]
    fn universal_dot_star() {
        let n = nfa(".*");
        assert!(n.accepts::<&str>(&[]));
        assert!(n.accepts(&["X", "Y", "Z"]));
    }

    #[test]
    fn state_counts_are_small() {
        assert_eq!(nfa("A").state_count(), 2);
        assert_eq!(nfa("A*").state_count(), 2);
        assert_eq!(nfa("A B").state_count(), 3);
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(
            parse_type_regex(""),
            Err(PredicateError::EmptyAlphabetToken { .. })
        ));
        assert!(matches!(
            parse_type_regex("(A|)"),
            Err(PredicateError::EmptyAlphabetToken { .. })
        ));
        assert!(matches!(
            parse_type_regex("(A"),
            Err(PredicateError::Syntax { .. })
        ));
        assert!(matches!(
            parse_type_regex("A)"),
            Err(PredicateError::Syntax { .. })
        ));
        assert!(matches!(
            parse_type_regex("*"),
            Err(PredicateError::Syntax { .. })
        ));
    }

    #[test]
    fn display_round_trip() {
        for text in [
            "(FRIENDS|TEACHES)+",
            "A B|C*",
            "(A B)?",
            ".",
            "\"HAS PART\" A",
            "((A|B) C)*",
        ] {
            let re = parse_type_regex(text).unwrap();
            let printed = re.to_string();
            assert_eq!(
                parse_type_regex(&printed).unwrap(),
                re,
                "{text} -> {printed}"
            );
        }
    }

    #[test]
    fn intersection() {
        let both = nfa("A+ B?").intersect(&nfa(". B"));
        assert!(both.accepts(&["A", "B"]));
        assert!(!both.accepts(&["A", "A"]));
        assert!(!both.accepts(&["A"]));
    }
}
