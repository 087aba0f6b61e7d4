//! Named qubit registers.
//!
//! A register is the ordered list of spatial-mode labels (`a1`, `a2`, `b1`, ...)
//! that a state is written over. Position 0 is the leftmost tensor factor of
//! the ket and the most significant bit of a basis index.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl Register {
    pub fn from_labels<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::LabelCollision(label.clone()));
            }
        }
        Ok(Self { labels, index })
    }

    pub fn empty() -> Self {
        Self {
            labels: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Bit mask selecting `label` inside a basis index.
    pub fn mask_of(&self, label: &str) -> Result<usize> {
        let pos = self.index_of(label)?;
        Ok(1 << (self.n_qubits() - 1 - pos))
    }

    /// Labels `prefix1..prefixN` present in this register, in numeric order.
    pub fn group(&self, prefix: &str) -> Vec<String> {
        let mut found: Vec<(usize, String)> = self
            .labels
            .iter()
            .filter_map(|l| {
                let rest = l.strip_prefix(prefix)?;
                let k: usize = rest.parse().ok()?;
                Some((k, l.clone()))
            })
            .collect();
        found.sort();
        found.into_iter().map(|(_, l)| l).collect()
    }

    /// Concatenation `self ⊗ other`.
    pub fn concat(&self, other: &Register) -> Result<Register> {
        for label in &other.labels {
            if self.contains(label) {
                return Err(Error::LabelCollision(label.clone()));
            }
        }
        Register::from_labels(self.labels.iter().chain(other.labels.iter()).cloned())
    }

    pub fn without(&self, drop: &[&str]) -> Result<Register> {
        for l in drop {
            self.index_of(l)?;
        }
        Register::from_labels(
            self.labels
                .iter()
                .filter(|l| !drop.contains(&l.as_str()))
                .cloned(),
        )
    }

    pub fn renamed<F: Fn(&str) -> String>(&self, f: F) -> Result<Register> {
        Register::from_labels(self.labels.iter().map(|l| f(l)))
    }
}

impl fmt::Display for Register {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.labels.join(","))
    }
}

/// Builds `prefix1..prefixN` for every `(prefix, N)` group, in order.
pub fn make_register(groups: &[(&str, usize)]) -> Result<Register> {
    let mut seen: Vec<&str> = Vec::new();
    let mut labels = Vec::new();
    for &(prefix, count) in groups {
        if seen.contains(&prefix) {
            return Err(Error::DuplicatePrefix(prefix.to_string()));
        }
        let valid_prefix = !prefix.is_empty() && !prefix.ends_with(|c: char| c.is_ascii_digit());
        if count == 0 || !valid_prefix {
            return Err(Error::InvalidGroup {
                prefix: prefix.to_string(),
                count,
            });
        }
        seen.push(prefix);
        labels.extend((1..=count).map(|k| format!("{prefix}{k}")));
    }
    Register::from_labels(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_groups() {
        let r = make_register(&[("a", 2), ("b", 2)]).unwrap();
        assert_eq!(r.labels(), ["a1", "a2", "b1", "b2"]);
        assert_eq!(r.n_qubits(), 4);
        assert_eq!(r.index_of("b1").unwrap(), 2);
        assert_eq!(r.mask_of("a1").unwrap(), 0b1000);
        assert_eq!(r.mask_of("b2").unwrap(), 0b0001);
    }

    #[test]
    fn four_groups_of_three() {
        let r = make_register(&[("a", 3), ("b", 3), ("c", 3), ("d", 3)]).unwrap();
        assert_eq!(r.n_qubits(), 12);
        for (i, l) in r.labels().iter().enumerate() {
            assert_eq!(r.index_of(l).unwrap(), i);
        }
        assert_eq!(r.group("c"), ["c1", "c2", "c3"]);
    }

    #[test]
    fn duplicate_prefix_rejected() {
        assert!(matches!(
            make_register(&[("a", 2), ("a", 2)]),
            Err(Error::DuplicatePrefix(_))
        ));
    }

    #[test]
    fn zero_count_rejected() {
        assert!(make_register(&[("a", 0)]).is_err());
    }

    #[test]
    fn group_orders_numerically() {
        let r = make_register(&[("a", 11)]).unwrap();
        let g = r.group("a");
        assert_eq!(g[1], "a2");
        assert_eq!(g[10], "a11");
    }

    #[test]
    fn concat_rejects_collision() {
        let a = make_register(&[("a", 1)]).unwrap();
        assert!(matches!(a.concat(&a), Err(Error::LabelCollision(_))));
    }
}
