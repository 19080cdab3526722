use crate::error::{Error, Result};

/// Name-keyed table of strategy constructors.
///
/// `C` is normally a plain `fn` pointer that builds a boxed trait object from
/// some context; lookups are by exact name.
#[derive(Debug, Clone)]
pub struct Registry<C> {
    kind: &'static str,
    entries: Vec<(&'static str, C)>,
}

impl<C: Copy> Registry<C> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: Vec::new(),
        }
    }

    /// Adds `name`, replacing any earlier entry with the same name.
    pub fn register(mut self, name: &'static str, ctor: C) -> Self {
        self.entries.retain(|(n, _)| *n != name);
        self.entries.push((name, ctor));
        self
    }

    pub fn get(&self, name: &str) -> Result<C> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, c)| *c)
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_and_replace() {
        let r = Registry::<fn() -> i32>::new("thing").register("a", || 1).register("b", || 2).register("a", || 3);
        assert_eq!(r.get("a").unwrap()(), 3);
        assert_eq!(r.names(), vec!["b", "a"]);
        match r.get("zzz") {
            Err(Error::UnknownStrategy { kind, available, .. }) => {
                assert_eq!(kind, "thing");
                assert_eq!(available, "b, a");
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
