//! Symmetric generating alphabets and words over them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A symmetric generating multiset: `d` labels with an involution pairing each
/// label with its inverse. Fixed points of the pairing are involutive
/// generators (`s = s⁻¹`) and occupy a single edge-slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenSet {
    labels: Vec<String>,
    inv: Vec<usize>,
}

impl GenSet {
    pub fn new(labels: Vec<String>, inv: Vec<usize>) -> Result<Self> {
        let d = labels.len();
        if d == 0 {
            return Err(Error::InvalidGenSet("at least one label is required".into()));
        }
        if inv.len() != d {
            return Err(Error::InvalidGenSet(format!(
                "{} labels but {} inverse entries",
                d,
                inv.len()
            )));
        }
        for (i, name) in labels.iter().enumerate() {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(Error::InvalidGenSet(format!("label {i} has an empty or blank-containing name")));
            }
            if labels[..i].contains(name) {
                return Err(Error::InvalidGenSet(format!("duplicate label name {name}")));
            }
        }
        for (i, &j) in inv.iter().enumerate() {
            if j >= d {
                return Err(Error::InvalidGenSet(format!("inverse of label {i} out of range")));
            }
            if inv[j] != i {
                return Err(Error::InvalidGenSet(format!("inverse map is not an involution at label {i}")));
            }
        }
        Ok(GenSet { labels, inv })
    }

    /// Free basis of rank `m`: labels `a, A, b, B, ...` with `A = a⁻¹`.
    pub fn free(m: usize) -> Self {
        let mut labels = Vec::with_capacity(2 * m);
        let mut inv = Vec::with_capacity(2 * m);
        for k in 0..m {
            let (lo, hi) = if k < 26 {
                let c = (b'a' + k as u8) as char;
                (c.to_string(), c.to_ascii_uppercase().to_string())
            } else {
                (format!("x{k}"), format!("X{k}"))
            };
            labels.push(lo);
            labels.push(hi);
            inv.push(2 * k + 1);
            inv.push(2 * k);
        }
        GenSet { labels, inv }
    }

    /// Free basis with explicit names; inverses are the uppercased names.
    pub fn free_named(names: &[&str]) -> Result<Self> {
        let mut labels = Vec::new();
        let mut inv = Vec::new();
        for (k, n) in names.iter().enumerate() {
            labels.push(n.to_string());
            labels.push(n.to_uppercase());
            inv.push(2 * k + 1);
            inv.push(2 * k);
        }
        GenSet::new(labels, inv)
    }

    /// Involutive generators only.
    pub fn involutions(names: &[&str]) -> Result<Self> {
        GenSet::new(names.iter().map(|s| s.to_string()).collect(), (0..names.len()).collect())
    }

    pub fn degree(&self) -> usize {
        self.labels.len()
    }

    pub fn name(&self, label: usize) -> &str {
        &self.labels[label]
    }

    pub fn names(&self) -> &[String] {
        &self.labels
    }

    pub fn inv(&self, label: usize) -> usize {
        self.inv[label]
    }

    pub fn inverse_map(&self) -> &[usize] {
        &self.inv
    }

    pub fn is_involutive(&self, label: usize) -> bool {
        self.inv[label] == label
    }

    /// True when no generator is its own inverse.
    pub fn is_free(&self) -> bool {
        (0..self.degree()).all(|l| !self.is_involutive(l))
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|n| n == name)
    }

    /// Parses a word such as `a^2 b`, `abA`, `a^-1*b` or `1` (the empty word).
    /// Names are matched greedily by longest label name.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut letters = Vec::new();
        let bytes = text.as_bytes();
        let mut pos = 0;
        while pos < bytes.len() {
            let c = bytes[pos] as char;
            if c.is_whitespace() || c == '*' || c == '.' {
                pos += 1;
                continue;
            }
            let rest = &text[pos..];
            let best = self
                .labels
                .iter()
                .enumerate()
                .filter(|(_, n)| rest.starts_with(n.as_str()))
                .max_by_key(|(_, n)| n.len());
            let (label, len) = match best {
                Some((l, n)) => (l, n.len()),
                None if c == '1' => {
                    pos += 1;
                    continue;
                }
                None => return Err(Error::InvalidWord(format!("unknown generator at `{rest}`"))),
            };
            pos += len;
            let mut exponent: i64 = 1;
            if pos < bytes.len() && bytes[pos] == b'^' {
                pos += 1;
                let start = pos;
                if pos < bytes.len() && bytes[pos] == b'-' {
                    pos += 1;
                }
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                exponent = text[start..pos]
                    .parse()
                    .map_err(|_| Error::InvalidWord(format!("bad exponent in `{text}`")))?;
            }
            let letter = if exponent < 0 { self.inv(label) } else { label };
            for _ in 0..exponent.unsigned_abs() {
                letters.push(letter);
            }
        }
        Ok(Word::new(letters))
    }
}

/// A word over a [`GenSet`], stored as label indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check(&self, gens: &GenSet) -> Result<()> {
        match self.0.iter().find(|&&l| l >= gens.degree()) {
            Some(l) => Err(Error::InvalidWord(format!("label index {l} out of range"))),
            None => Ok(()),
        }
    }

    /// Free reduction: cancels adjacent `x x⁻¹` pairs until none remain.
    pub fn reduce(&self, gens: &GenSet) -> Word {
        let mut out: Vec<usize> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            match out.last() {
                Some(&prev) if gens.inv(prev) == l => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        Word(out)
    }

    pub fn is_reduced(&self, gens: &GenSet) -> bool {
        self.0.windows(2).all(|p| gens.inv(p[0]) != p[1])
    }

    pub fn inverse(&self, gens: &GenSet) -> Word {
        Word(self.0.iter().rev().map(|&l| gens.inv(l)).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Cyclic rotation left by `k`.
    pub fn rotate(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return self.clone();
        }
        let mut v = self.0.clone();
        v.rotate_left(k % self.0.len());
        Word(v)
    }

    pub fn display<'a>(&'a self, gens: &'a GenSet) -> WordDisplay<'a> {
        WordDisplay { word: self, gens }
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    gens: &'a GenSet,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "1");
        }
        for (i, &l) in self.word.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", self.gens.name(l))?;
        }
        Ok(())
    }
}

/// All freely reduced words of length exactly `len`, in lexicographic label order.
pub fn reduced_words(gens: &GenSet, len: usize) -> Vec<Word> {
    fn extend(gens: &GenSet, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Word>) {
        if cur.len() == len {
            out.push(Word(cur.clone()));
            return;
        }
        for l in 0..gens.degree() {
            if let Some(&prev) = cur.last() {
                if gens.inv(prev) == l {
                    continue;
                }
            }
            cur.push(l);
            extend(gens, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    extend(gens, len, &mut Vec::with_capacity(len), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_examples() {
        let g = GenSet::free(2);
        let a = 0;
        let a_inv = 1;
        let b = 2;
        let b_inv = 3;
        assert_eq!(Word::new(vec![a, a_inv]).reduce(&g), Word::empty());
        assert_eq!(Word::new(vec![a, b, b_inv, a]).reduce(&g), Word::new(vec![a, a]));
        assert_eq!(Word::empty().reduce(&g), Word::empty());
        // Nested cancellation collapses completely.
        assert_eq!(Word::new(vec![a, b, b_inv, a_inv]).reduce(&g), Word::empty());
    }

    #[test]
    fn involutive_letters_cancel_with_themselves() {
        let g = GenSet::involutions(&["x", "y"]).unwrap();
        assert_eq!(Word::new(vec![0, 0, 1]).reduce(&g), Word::new(vec![1]));
    }

    #[test]
    fn genset_validation() {
        assert!(GenSet::new(vec![], vec![]).is_err());
        assert!(GenSet::new(vec!["a".into(), "b".into()], vec![1, 1]).is_err());
        assert!(GenSet::new(vec!["a".into(), "a".into()], vec![1, 0]).is_err());
        assert!(GenSet::new(vec!["a b".into()], vec![0]).is_err());
        let g = GenSet::new(vec!["a".into(), "A".into(), "m".into()], vec![1, 0, 2]).unwrap();
        assert!(g.is_involutive(2));
        assert!(!g.is_free());
    }

    #[test]
    fn parse_word_syntax() {
        let g = GenSet::free(2);
        assert_eq!(g.parse_word("a^2").unwrap(), Word::new(vec![0, 0]));
        assert_eq!(g.parse_word("ab").unwrap(), Word::new(vec![0, 2]));
        assert_eq!(g.parse_word("a^-1 * B").unwrap(), Word::new(vec![1, 3]));
        assert_eq!(g.parse_word("b^-2").unwrap(), Word::new(vec![3, 3]));
        assert_eq!(g.parse_word("1").unwrap(), Word::empty());
        assert!(g.parse_word("c").is_err());
    }

    #[test]
    fn reduced_word_counts() {
        let g = GenSet::free(2);
        assert_eq!(reduced_words(&g, 0).len(), 1);
        assert_eq!(reduced_words(&g, 1).len(), 4);
        assert_eq!(reduced_words(&g, 3).len(), 36);
        assert!(reduced_words(&g, 4).iter().all(|w| w.is_reduced(&g)));
    }
}
