//! Name-keyed registries of interchangeable strategies.
//!
//! A registry maps a name to a builder that constructs the strategy from a
//! [`ParamMap`]. Built-in registries are provided by the modules that own the
//! strategy traits; callers may register additional entries.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::params::ParamMap;

pub type Builder<T> = fn(&ParamMap) -> Result<T>;

struct Entry<T> {
    description: &'static str,
    build: Builder<T>,
}

pub struct Registry<T> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Entry<T>>,
}

impl<T> fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("kind", &self.kind)
            .field("names", &self.names())
            .finish()
    }
}

impl<T> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: BTreeMap::new(),
        }
    }

    /// Adds or replaces the builder registered under `name`.
    pub fn register(&mut self, name: &'static str, description: &'static str, build: Builder<T>) -> &mut Self {
        self.entries.insert(name, Entry { description, build });
        self
    }

    pub fn build(&self, name: &str, params: &ParamMap) -> Result<T> {
        let entry = self.entries.get(name).ok_or_else(|| Error::UnknownStrategy {
            kind: self.kind,
            name: name.to_string(),
            known: self.names().join(", "),
        })?;
        (entry.build)(params)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    /// `(name, description)` pairs in name order.
    pub fn describe(&self) -> Vec<(&'static str, &'static str)> {
        self.entries.iter().map(|(n, e)| (*n, e.description)).collect()
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }
}
