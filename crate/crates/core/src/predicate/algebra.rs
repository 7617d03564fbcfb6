use super::{Atom, Formula};

/// Flattens and sorts conjunctions and disjunctions, removes units and
/// absorbers, deduplicates, and pushes negation into atoms that have a dual.
pub fn normalize<A: Atom>(f: &Formula<A>) -> Formula<A> {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(x) => match normalize(x) {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            Formula::Atom(a) => match a.negated() {
                Some(b) => Formula::Atom(b),
                None => Formula::Not(Box::new(Formula::Atom(a))),
            },
            other => Formula::Not(Box::new(other)),
        },
        Formula::And(xs) => junction(xs, true),
        Formula::Or(xs) => junction(xs, false),
    }
}

fn junction<A: Atom>(xs: &[Formula<A>], is_and: bool) -> Formula<A> {
    let mut items: Vec<(String, Formula<A>)> = Vec::new();
    let push = |x: Formula<A>, items: &mut Vec<(String, Formula<A>)>| {
        let key = x.to_string();
        if !items.iter().any(|(k, _)| *k == key) {
            items.push((key, x));
        }
    };
    for x in xs {
        match (normalize(x), is_and) {
            (Formula::True, true) | (Formula::False, false) => {}
            (Formula::False, true) => return Formula::False,
            (Formula::True, false) => return Formula::True,
            (Formula::And(inner), true) | (Formula::Or(inner), false) => {
                for y in inner {
                    push(y, &mut items);
                }
            }
            (other, _) => push(other, &mut items),
        }
    }
    items.sort_by(|a, b| a.0.cmp(&b.0));
    let mut items: Vec<Formula<A>> = items.into_iter().map(|(_, x)| x).collect();
    match items.len() {
        0 if is_and => Formula::True,
        0 => Formula::False,
        1 => items.pop().expect("one item"),
        _ if is_and => Formula::And(items),
        _ => Formula::Or(items),
    }
}

pub fn conjoin<A: Atom>(p: &Formula<A>, q: &Formula<A>) -> Formula<A> {
    normalize(&Formula::And(vec![p.clone(), q.clone()]))
}

pub fn syntactic_equiv<A: Atom>(p: &Formula<A>, q: &Formula<A>) -> bool {
    normalize(p) == normalize(q)
}

/// Sound but incomplete: `p` implies `q` when the conjuncts of `q` are among
/// those of `p` after normalization.
pub fn syntactic_implies<A: Atom>(p: &Formula<A>, q: &Formula<A>) -> bool {
    let (p, q) = (normalize(p), normalize(q));
    match (&p, &q) {
        (Formula::False, _) | (_, Formula::True) => true,
        _ => {
            let ps = conjuncts(&p);
            conjuncts(&q).iter().all(|c| ps.contains(c))
        }
    }
}

fn conjuncts<A>(f: &Formula<A>) -> Vec<&Formula<A>> {
    match f {
        Formula::And(xs) => xs.iter().collect(),
        other => vec![other],
    }
}
