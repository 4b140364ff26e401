//! Finite point sets and symmetric storage indexed by unordered pairs.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered, duplicate-free list of point labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Carrier {
    labels: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Carrier {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() || label.contains('|') {
                return Err(Error::Malformed(format!(
                    "point label {label:?} must be nonempty and must not contain `|`"
                )));
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::Malformed(format!("duplicate point label {label:?}")));
            }
        }
        Ok(Carrier { labels, index })
    }

    /// `p0, p1, …, p{n-1}`.
    pub fn numbered(n: usize) -> Self {
        Carrier::new((0..n).map(|i| format!("p{i}"))).expect("distinct labels")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownPoint(label.to_owned()))
    }

    /// Key of an unordered pair: both labels sorted lexicographically, joined by `|`.
    pub fn pair_key(&self, i: usize, j: usize) -> String {
        let (a, b) = (self.label(i), self.label(j));
        if a <= b {
            format!("{a}|{b}")
        } else {
            format!("{b}|{a}")
        }
    }

    /// Key of an ordered pair: `a|>b`.
    pub fn ordered_key(&self, i: usize, j: usize) -> String {
        format!("{}|>{}", self.label(i), self.label(j))
    }

    /// Resolves an unordered-pair key, which must be in canonical order.
    pub fn parse_pair_key(&self, key: &str) -> Result<(usize, usize)> {
        let (a, b) = key
            .split_once('|')
            .ok_or_else(|| Error::Malformed(format!("pair key {key:?} is not of the form `a|b`")))?;
        if a >= b {
            return Err(Error::Malformed(format!(
                "pair key {key:?} must name two distinct points in lexicographic order"
            )));
        }
        Ok((self.index_of(a)?, self.index_of(b)?))
    }

    pub fn parse_ordered_key(&self, key: &str) -> Result<(usize, usize)> {
        let (a, b) = key
            .split_once("|>")
            .ok_or_else(|| Error::Malformed(format!("ordered key {key:?} is not of the form `a|>b`")))?;
        Ok((self.index_of(a)?, self.index_of(b)?))
    }

    /// All unordered pairs `(i, j)` with `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.len();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
    }
}

impl TryFrom<Vec<String>> for Carrier {
    type Error = Error;

    fn try_from(labels: Vec<String>) -> Result<Self> {
        Carrier::new(labels)
    }
}

impl From<Carrier> for Vec<String> {
    fn from(c: Carrier) -> Self {
        c.labels
    }
}

/// Values attached to the unordered pairs `{i, j}`, `i ≠ j`, of an `n`-point set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairMap<T> {
    n: usize,
    entries: Vec<T>,
}

impl<T> PairMap<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                entries.push(f(i, j));
            }
        }
        PairMap { n, entries }
    }

    pub fn try_from_fn<E>(n: usize, mut f: impl FnMut(usize, usize) -> Result<T, E>) -> Result<Self, E> {
        let mut entries = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                entries.push(f(i, j)?);
            }
        }
        Ok(PairMap { n, entries })
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        debug_assert!(i != j && j < self.n);
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[self.slot(i, j)]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        let s = self.slot(i, j);
        &mut self.entries[s]
    }

    pub fn values(&self) -> impl Iterator<Item = &T> {
        self.entries.iter()
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> PairMap<U> {
        PairMap {
            n: self.n,
            entries: self.entries.iter().map(&mut f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_storage_is_symmetric() {
        let m = PairMap::from_fn(5, |i, j| (i, j));
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert_eq!(*m.get(i, j), (i.min(j), i.max(j)));
                }
            }
        }
    }

    #[test]
    fn keys() {
        let c = Carrier::new(["y", "x"]).unwrap();
        assert_eq!(c.pair_key(0, 1), "x|y");
        assert_eq!(c.ordered_key(0, 1), "y|>x");
        assert_eq!(c.parse_pair_key("x|y").unwrap(), (1, 0));
        assert!(c.parse_pair_key("y|x").is_err());
        assert!(c.parse_pair_key("x|z").is_err());
        assert_eq!(c.parse_ordered_key("x|>y").unwrap(), (1, 0));
    }

    #[test]
    fn rejects_bad_labels() {
        assert!(Carrier::new(["a", "a"]).is_err());
        assert!(Carrier::new(["a|b"]).is_err());
        assert!(Carrier::new([""]).is_err());
        assert!(serde_json::from_str::<Carrier>(r#"["a","a"]"#).is_err());
    }
}
