//! Permutations on `0..n`, stored as the image vector.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("image vector {0:?} is not a permutation")]
    NotAPermutation(Vec<usize>),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "perm{:?}", self.0)
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(PermError::NotAPermutation(images));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Composite "apply `self` first, then `other`".
    pub fn then(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation(self.0.iter().map(|&i| other.apply(i)).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Permutation(inv)
    }

    /// All permutations of `0..n` in a fixed deterministic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut items: Vec<usize> = (0..n).collect();
        heap_permute(&mut items, n, &mut out);
        out
    }

    /// Adjacent transposition (l, l+1), 0-indexed l.
    pub fn adjacent_transposition(n: usize, l: usize) -> Permutation {
        assert!(l + 1 < n);
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(l, l + 1);
        Permutation(images)
    }

    /// Swap the values at positions `a` and `b` of the image vector.
    pub fn swap_positions(&self, a: usize, b: usize) -> Permutation {
        let mut images = self.0.clone();
        images.swap(a, b);
        Permutation(images)
    }

    /// The permutation of `sum(widths)` letters that rearranges contiguous
    /// blocks of the given widths the way `self` rearranges single letters.
    /// Block `b` (with offset by the original layout) moves to where `self`
    /// sends position... concretely: if `self.apply(i) = j`, the i-th block of
    /// the source layout lands at the j-th block slot of the target layout.
    pub fn block_expand(&self, widths: &[usize]) -> Permutation {
        assert_eq!(self.len(), widths.len());
        let total: usize = widths.iter().sum();
        let mut src_offsets = Vec::with_capacity(widths.len());
        let mut acc = 0;
        for &w in widths {
            src_offsets.push(acc);
            acc += w;
        }
        // target layout: block order self^{-1}(0), self^{-1}(1), ...
        let inv = self.inverse();
        let mut tgt_offsets = vec![0; widths.len()];
        let mut acc = 0;
        for j in 0..widths.len() {
            let b = inv.apply(j);
            tgt_offsets[b] = acc;
            acc += widths[b];
        }
        let mut images = vec![0; total];
        for (b, &w) in widths.iter().enumerate() {
            for k in 0..w {
                images[src_offsets[b] + k] = tgt_offsets[b] + k;
            }
        }
        Permutation(images)
    }
}

fn heap_permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Permutation>) {
    if k <= 1 {
        out.push(Permutation(items.clone()));
        return;
    }
    for i in 0..k {
        heap_permute(items, k - 1, out);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_all_permutations() {
        assert_eq!(Permutation::all(0).len(), 1);
        assert_eq!(Permutation::all(3).len(), 6);
        let mut seen = Permutation::all(3);
        seen.dedup();
        assert_eq!(seen.len(), 6);
    }

    #[test]
    fn compose_and_invert() {
        let a = Permutation::from_images(vec![1, 2, 0]).unwrap();
        let b = Permutation::from_images(vec![2, 0, 1]).unwrap();
        assert!(a.then(&a.inverse()).is_identity());
        let c = a.then(&b);
        assert_eq!(c.apply(0), b.apply(a.apply(0)));
    }

    #[test]
    fn rejects_non_permutation() {
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(Permutation::from_images(vec![0, 2]).is_err());
    }

    #[test]
    fn block_expansion() {
        // swap two blocks of widths 2 and 1
        let swap = Permutation::from_images(vec![1, 0]).unwrap();
        let expanded = swap.block_expand(&[2, 1]);
        // source: [a b | c]; target: [c | a b]
        assert_eq!(expanded.images(), &[1, 2, 0]);
        let id = Permutation::identity(3).block_expand(&[1, 2, 0]);
        assert!(id.is_identity());
    }
}
