//! Deterministic fresh identifiers for copied elements.

/// `base'` if free, otherwise `base'2`, `base'3`, ... until `taken` says no.
pub fn fresh_id(base: &str, taken: impl Fn(&str) -> bool) -> String {
    let first = format!("{base}'");
    if !taken(&first) {
        return first;
    }
    (2..)
        .map(|k| format!("{base}'{k}"))
        .find(|c| !taken(c))
        .expect("unbounded counter")
}

/// `prefix1`, `prefix2`, ... whichever is first free.
pub fn numbered_id(prefix: &str, taken: impl Fn(&str) -> bool) -> String {
    (1..)
        .map(|k| format!("{prefix}{k}"))
        .find(|c| !taken(c))
        .expect("unbounded counter")
}
