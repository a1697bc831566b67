//! Truncated free and commutator-quotient algebras `k<t_1..t_r> / (words of length > N)`.

use std::cmp::Ordering;
use std::fmt;

/// A word in the generators, stored as 1-based generator indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: &[u8]) -> Self {
        assert!(letters.iter().all(|&l| l >= 1), "generators are 1-based");
        Word(letters.to_vec())
    }

    pub fn generator(i: u8) -> Self {
        Word::new(&[i])
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn is_sorted(&self) -> bool {
        self.0.windows(2).all(|p| p[0] <= p[1])
    }

    /// Exponent vector of the commutative monomial this word maps to.
    pub fn exponents(&self, generators: usize) -> Vec<usize> {
        let mut e = vec![0; generators];
        for &l in &self.0 {
            e[l as usize - 1] += 1;
        }
        e
    }
}

/// Length first, then lexicographic.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(|l| format!("t{l}")).collect();
        f.write_str(&parts.join("*"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Free,
    /// `t_j t_i -> t_i t_j` for `i < j`.
    Commutator,
}

impl Relation {
    pub fn label(self) -> &'static str {
        match self {
            Relation::Free => "free",
            Relation::Commutator => "commutator",
        }
    }
}

/// Words of length `> order` vanish; the augmentation ideal satisfies `I^(order+1) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedAlgebra {
    pub generators: usize,
    pub order: usize,
    pub relation: Relation,
}

impl TruncatedAlgebra {
    pub fn new(generators: usize, order: usize, relation: Relation) -> Self {
        assert!((1..=255).contains(&generators));
        TruncatedAlgebra {
            generators,
            order,
            relation,
        }
    }

    pub fn free(generators: usize, order: usize) -> Self {
        Self::new(generators, order, Relation::Free)
    }

    pub fn commutative(generators: usize, order: usize) -> Self {
        Self::new(generators, order, Relation::Commutator)
    }

    pub fn with_order(self, order: usize) -> Self {
        TruncatedAlgebra { order, ..self }
    }

    /// Normal form of a word, `None` if it vanishes.
    pub fn normalize(&self, w: Word) -> Option<Word> {
        if w.len() > self.order {
            return None;
        }
        match self.relation {
            Relation::Free => Some(w),
            Relation::Commutator => {
                let mut v = w.0;
                v.sort_unstable();
                Some(Word(v))
            }
        }
    }

    pub fn mul(&self, u: &Word, v: &Word) -> Option<Word> {
        if u.len() + v.len() > self.order {
            return None;
        }
        self.normalize(u.concat(v))
    }

    /// Deterministic basis: length-graded, lexicographic within a length.
    pub fn basis(&self) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..self.order {
            let mut next = Vec::new();
            for w in &layer {
                let start = match (self.relation, w.0.last()) {
                    (Relation::Commutator, Some(&l)) => l,
                    _ => 1,
                };
                for g in start..=self.generators as u8 {
                    let mut v = w.0.clone();
                    v.push(g);
                    next.push(Word(v));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out.sort();
        out
    }

    /// Basis words of exactly length `n`.
    pub fn words_of_length(&self, n: usize) -> Vec<Word> {
        self.basis().into_iter().filter(|w| w.len() == n).collect()
    }
}

/// One rewriting step `t_j t_i -> t_i t_j` (`i < j`) at position `pos`, if applicable.
pub fn rewrite_at(w: &Word, pos: usize) -> Option<Word> {
    let l = &w.0;
    if pos + 1 < l.len() && l[pos] > l[pos + 1] {
        let mut v = l.clone();
        v.swap(pos, pos + 1);
        Some(Word(v))
    } else {
        None
    }
}
