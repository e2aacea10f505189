use std::borrow::Borrow;
use std::fmt;
use std::sync::Arc;

/// Tokens that can never name a channel.
pub const RESERVED: &[&str] = &["tau", "_"];

/// A channel name. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chan(Arc<str>);

impl Chan {
    /// Builds a channel, returning `None` when `name` is not an identifier
    /// of the form `[a-zA-Z][a-zA-Z0-9_]*` or is a reserved token.
    pub fn new(name: &str) -> Option<Chan> {
        if is_identifier(name) && !RESERVED.contains(&name) {
            Some(Chan(Arc::from(name)))
        } else {
            None
        }
    }

    /// Builds a channel without validation. Panics on invalid names.
    pub fn from_static(name: &str) -> Chan {
        Chan::new(name).unwrap_or_else(|| panic!("invalid channel name {name:?}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Chan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Chan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Borrow<str> for Chan {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Shorthand used all over the tests and examples.
pub fn ch(name: &str) -> Chan {
    Chan::from_static(name)
}

/// Picks the first name `base0, base1, ...` rejected by `taken`.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> Chan {
    (0..)
        .map(|i| format!("{base}{i}"))
        .find(|candidate| !taken(candidate))
        .map(|s| Chan::from_static(&s))
        .expect("unbounded candidate sequence")
}
