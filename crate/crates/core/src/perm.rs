//! Permutations of `1..=n` in one-line form.

use std::fmt;

use crate::error::{Error, Result};
use crate::symbols::{Label, MAX_LABEL};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    // images[i - 1] is the image of i
    images: Vec<Label>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_LABEL);
        Permutation { images: (1..=n).map(|i| i as Label).collect() }
    }

    /// From the one-line form `[sigma(1), ..., sigma(n)]`.
    pub fn from_images(images: Vec<Label>) -> Result<Self> {
        let n = images.len();
        if n > MAX_LABEL {
            return Err(Error::LevelTooLarge(n));
        }
        let mut seen = vec![false; n + 1];
        for &x in &images {
            if x == 0 || x as usize > n {
                return Err(Error::LabelOutOfRange { label: x as u32, n });
            }
            if std::mem::replace(&mut seen[x as usize], true) {
                return Err(Error::NotInjective(x));
            }
        }
        Ok(Permutation { images })
    }

    /// The transposition of `a` and `b` on `1..=n`.
    pub fn transposition(n: usize, a: Label, b: Label) -> Result<Self> {
        for x in [a, b] {
            if x == 0 || x as usize > n {
                return Err(Error::LabelOutOfRange { label: x as u32, n });
            }
        }
        let mut p = Self::identity(n);
        p.images.swap(a as usize - 1, b as usize - 1);
        Ok(p)
    }

    /// Parses cycle notation such as `(1 4 2)(3 5)`, or `()` / `id` for the
    /// identity, on `1..=n`.
    pub fn parse_cycles(text: &str, n: usize) -> Result<Self> {
        let err = |d: &str| Error::Parse { what: "permutation", detail: d.to_string() };
        let text = text.trim();
        let mut p = Self::identity(n);
        if text.is_empty() || text == "id" {
            return Ok(p);
        }
        let mut seen = vec![false; n + 1];
        let mut rest = text;
        while !rest.is_empty() {
            let inner = rest.strip_prefix('(').ok_or_else(|| err(text))?;
            let close = inner.find(')').ok_or_else(|| err(text))?;
            let cycle: Vec<Label> = inner[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    let v: u32 = t.parse().map_err(|_| err(t))?;
                    if v == 0 || v as usize > n {
                        return Err(Error::LabelOutOfRange { label: v, n });
                    }
                    Ok(v as Label)
                })
                .collect::<Result<_>>()?;
            for &x in &cycle {
                if std::mem::replace(&mut seen[x as usize], true) {
                    return Err(Error::DuplicateLabel(x));
                }
            }
            for (i, &x) in cycle.iter().enumerate() {
                p.images[x as usize - 1] = cycle[(i + 1) % cycle.len()];
            }
            rest = inner[close + 1..].trim_start();
        }
        Ok(p)
    }

    /// Every permutation of `1..=n`, in lexicographic order of one-line form.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut cur: Vec<Label> = (1..=n).map(|i| i as Label).collect();
        let mut out = vec![Permutation { images: cur.clone() }];
        loop {
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                return out;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
            out.push(Permutation { images: cur.clone() });
        }
    }

    /// The same permutation on `1..=m` (`m >= n`), fixing `n+1..=m`.
    pub fn extend(&self, m: usize) -> Permutation {
        let mut images = self.images.clone();
        images.extend((self.len() + 1..=m).map(|i| i as Label));
        Permutation { images }
    }

    /// Uniformly random permutation of `1..=n`.
    pub fn random<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        use rand::seq::SliceRandom;
        let mut p = Self::identity(n);
        p.images.shuffle(rng);
        p
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[Label] {
        &self.images
    }

    /// Image of `x`; labels beyond `n` are fixed.
    pub fn apply(&self, x: Label) -> Label {
        match self.images.get((x as usize).wrapping_sub(1)) {
            Some(&y) => y,
            None => x,
        }
    }

    /// `self o other` (apply `other` first).
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let n = self.len().max(other.len());
        Permutation { images: (1..=n).map(|i| self.apply(other.apply(i as Label))).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize - 1] = (i + 1) as Label;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| x as usize == i + 1)
    }

    pub fn sign(&self) -> i64 {
        let mut seen = vec![false; self.len()];
        let mut even_cycles = 0;
        for start in 0..self.len() {
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i] as usize - 1;
                len += 1;
            }
            if len > 0 && len % 2 == 0 {
                even_cycles += 1;
            }
        }
        if even_cycles % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Nontrivial cycles, each starting at its least element.
    pub fn cycles(&self) -> Vec<Vec<Label>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] || self.images[start] as usize == start + 1 {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push((i + 1) as Label);
                i = self.images[i] as usize - 1;
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.images)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycles_round_trip() {
        let p = Permutation::parse_cycles("(1 4 2)(3 5)", 5).unwrap();
        assert_eq!(p.images(), &[4, 1, 5, 2, 3]);
        assert_eq!(p.to_string(), "(1 4 2)(3 5)");
        assert_eq!(Permutation::parse_cycles("()", 3).unwrap(), Permutation::identity(3));
        assert!(Permutation::parse_cycles("(1 1)", 3).is_err());
        assert!(Permutation::parse_cycles("(1 4)", 3).is_err());
    }

    #[test]
    fn compose_and_inverse() {
        let p = Permutation::from_images(vec![2, 3, 1]).unwrap();
        let q = Permutation::transposition(3, 1, 2).unwrap();
        // (p o q)(1) = p(2) = 3
        assert_eq!(p.compose(&q).apply(1), 3);
        assert!(p.compose(&p.inverse()).is_identity());
        assert_eq!(p.sign(), 1);
        assert_eq!(q.sign(), -1);
    }

    #[test]
    fn enumerate_all() {
        let all = Permutation::all(4);
        assert_eq!(all.len(), 24);
        let distinct: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 24);
        assert_eq!(Permutation::all(1).len(), 1);
    }

    #[test]
    fn bad_images() {
        assert!(Permutation::from_images(vec![1, 1]).is_err());
        assert!(Permutation::from_images(vec![1, 3]).is_err());
    }
}
