//! Brzozowski derivatives of type regexes.
//!
//! Used by the bounded walk search as a residual language per regex atom.
//! Smart constructors keep terms in a normal form (associative concatenation,
//! sorted and deduplicated alternation) so the set of derivatives is finite.

use std::collections::HashMap;

use super::regex::TypeRegex;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Residual {
    Empty,
    Eps,
    Sym(String),
    Any,
    Cat(Box<Residual>, Box<Residual>),
    Alt(Vec<Residual>),
    Star(Box<Residual>),
}

impl Residual {
    pub fn from_regex(re: &TypeRegex) -> Residual {
        match re {
            TypeRegex::Symbol(s) => Residual::Sym(s.clone()),
            TypeRegex::Any => Residual::Any,
            TypeRegex::Concat(xs) => xs
                .iter()
                .rev()
                .fold(Residual::Eps, |acc, x| cat(Residual::from_regex(x), acc)),
            TypeRegex::Alt(xs) => alt(xs.iter().map(Residual::from_regex).collect()),
            TypeRegex::Star(x) => star(Residual::from_regex(x)),
            TypeRegex::Plus(x) => {
                let r = Residual::from_regex(x);
                cat(r.clone(), star(r))
            }
            TypeRegex::Optional(x) => alt(vec![Residual::from_regex(x), Residual::Eps]),
        }
    }

    pub fn nullable(&self) -> bool {
        match self {
            Residual::Empty | Residual::Sym(_) | Residual::Any => false,
            Residual::Eps | Residual::Star(_) => true,
            Residual::Cat(a, b) => a.nullable() && b.nullable(),
            Residual::Alt(xs) => xs.iter().any(Residual::nullable),
        }
    }

    pub fn derive(&self, symbol: Option<&str>) -> Residual {
        match self {
            Residual::Empty | Residual::Eps => Residual::Empty,
            Residual::Sym(s) => {
                if symbol == Some(s.as_str()) {
                    Residual::Eps
                } else {
                    Residual::Empty
                }
            }
            Residual::Any => Residual::Eps,
            Residual::Cat(a, b) => {
                let left = cat(a.derive(symbol), (**b).clone());
                if a.nullable() {
                    alt(vec![left, b.derive(symbol)])
                } else {
                    left
                }
            }
            Residual::Alt(xs) => alt(xs.iter().map(|x| x.derive(symbol)).collect()),
            Residual::Star(x) => cat(x.derive(symbol), self.clone()),
        }
    }
}

fn cat(a: Residual, b: Residual) -> Residual {
    match (a, b) {
        (Residual::Empty, _) | (_, Residual::Empty) => Residual::Empty,
        (Residual::Eps, x) | (x, Residual::Eps) => x,
        (Residual::Cat(a1, a2), b) => cat(*a1, cat(*a2, b)),
        (a, b) => Residual::Cat(Box::new(a), Box::new(b)),
    }
}

fn alt(items: Vec<Residual>) -> Residual {
    let mut flat = Vec::new();
    for item in items {
        match item {
            Residual::Empty => {}
            Residual::Alt(xs) => flat.extend(xs),
            x => flat.push(x),
        }
    }
    flat.sort();
    flat.dedup();
    match flat.len() {
        0 => Residual::Empty,
        1 => flat.pop().expect("one item"),
        _ => Residual::Alt(flat),
    }
}

fn star(r: Residual) -> Residual {
    match r {
        Residual::Empty | Residual::Eps => Residual::Eps,
        s @ Residual::Star(_) => s,
        r => Residual::Star(Box::new(r)),
    }
}

/// Interns residuals and memoizes derivative steps.
#[derive(Debug, Default)]
pub(crate) struct ResidualTable {
    terms: Vec<Residual>,
    index: HashMap<Residual, usize>,
    steps: HashMap<(usize, Option<String>), usize>,
}

impl ResidualTable {
    pub fn intern(&mut self, r: Residual) -> usize {
        if let Some(&id) = self.index.get(&r) {
            return id;
        }
        self.terms.push(r.clone());
        self.index.insert(r, self.terms.len() - 1);
        self.terms.len() - 1
    }

    pub fn get(&self, id: usize) -> &Residual {
        &self.terms[id]
    }

    pub fn step(&mut self, id: usize, symbol: Option<&str>) -> usize {
        let key = (id, symbol.map(str::to_string));
        if let Some(&next) = self.steps.get(&key) {
            return next;
        }
        let next = self.terms[id].derive(symbol);
        let next = self.intern(next);
        self.steps.insert(key, next);
        next
    }
}
