//! Colored braids: signed generator words with endpoint bookkeeping, standing
//! in for homotopy classes of paths between configurations of sub-squares.
//!
//! Words do not get normalized: equality of homotopy classes is never decided
//! here. Downstream code only ever evaluates words in matrix representations,
//! where exact equality is decidable.
//!
//! Braid words read left to right: the first letter is the first crossing.
//! Positions are counted bottom to top; generator `l` (1-indexed) crosses the
//! strands at positions `l` and `l+1`, and a positive sign is the
//! counter-clockwise rotation of the two strands.

use crate::cubes::{rat, LinearEmbedding, Rat};
use crate::perm::Permutation;
use crate::scalar::rat_sign;
use num::Zero;
use std::fmt;
use thiserror::Error;

/// Global crossing-sign convention. `Ccw` makes the counter-clockwise
/// elementary rotation the positive generator; `Cw` flips every sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Ccw,
    Cw,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BraidError {
    #[error("generator {l} out of range for {n} strands")]
    GeneratorOutOfRange { l: usize, n: usize },
    #[error("endpoint mismatch: first braid ends at {first:?}, second starts at {second:?}")]
    EndpointMismatch { first: Vec<usize>, second: Vec<usize> },
    #[error("strand count mismatch: {0} vs {1}")]
    StrandMismatch(usize, usize),
    #[error("width list has length {got}, expected {expected}")]
    WidthMismatch { expected: usize, got: usize },
}

/// Strands `i` and `j` cross while sharing an x-coordinate, or meet a third
/// strand at the same instant; the linear motion cannot be read as a braid.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("degenerate motion: strands {i} and {j} cannot be crossed unambiguously")]
pub struct DegenerateMotion {
    pub i: usize,
    pub j: usize,
}

/// A braid word together with the strand labels at both endpoints.
/// `source_order[k]` is the label of the strand occupying position `k`
/// (bottom to top) before the word, `target_order[k]` after.
#[derive(Clone, PartialEq, Eq)]
pub struct ColoredBraid {
    strands: usize,
    word: Vec<i32>,
    source_order: Permutation,
    target_order: Permutation,
}

impl fmt::Debug for ColoredBraid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ColoredBraid(n={}, word={:?}, {:?} -> {:?})",
            self.strands, self.word, self.source_order, self.target_order
        )
    }
}

impl ColoredBraid {
    /// Builds a braid, computing the target order from the word.
    pub fn new(strands: usize, word: Vec<i32>, source_order: Permutation) -> Result<Self, BraidError> {
        assert_eq!(source_order.len(), strands);
        for &g in &word {
            let l = g.unsigned_abs() as usize;
            if g == 0 || l >= strands {
                return Err(BraidError::GeneratorOutOfRange { l, n: strands });
            }
        }
        let target_order = apply_word(&source_order, &word);
        Ok(ColoredBraid {
            strands,
            word,
            source_order,
            target_order,
        })
    }

    pub fn empty(strands: usize, order: Permutation) -> Self {
        assert_eq!(order.len(), strands);
        ColoredBraid {
            strands,
            word: vec![],
            source_order: order.clone(),
            target_order: order,
        }
    }

    /// The l-th elementary braiding (1-indexed l), a single positive crossing
    /// at positions l, l+1 starting from the given order.
    pub fn elementary(n: usize, l: usize, at: Permutation) -> Result<Self, BraidError> {
        if l == 0 || l >= n {
            return Err(BraidError::GeneratorOutOfRange { l, n });
        }
        ColoredBraid::new(n, vec![l as i32], at)
    }

    pub fn strand_count(&self) -> usize {
        self.strands
    }

    pub fn word(&self) -> &[i32] {
        &self.word
    }

    pub fn source_order(&self) -> &Permutation {
        &self.source_order
    }

    pub fn target_order(&self) -> &Permutation {
        &self.target_order
    }

    /// Path composition: `self` first, then `second`.
    pub fn compose_paths(&self, second: &ColoredBraid) -> Result<ColoredBraid, BraidError> {
        if self.strands != second.strands {
            return Err(BraidError::StrandMismatch(self.strands, second.strands));
        }
        if self.target_order != second.source_order {
            return Err(BraidError::EndpointMismatch {
                first: self.target_order.images().to_vec(),
                second: second.source_order.images().to_vec(),
            });
        }
        let mut word = self.word.clone();
        word.extend_from_slice(&second.word);
        Ok(ColoredBraid {
            strands: self.strands,
            word,
            source_order: self.source_order.clone(),
            target_order: second.target_order.clone(),
        })
    }

    /// Reversed word with flipped signs; endpoint orders swap.
    pub fn inverse(&self) -> ColoredBraid {
        let word = self.word.iter().rev().map(|g| -g).collect();
        ColoredBraid {
            strands: self.strands,
            word,
            source_order: self.target_order.clone(),
            target_order: self.source_order.clone(),
        }
    }

    /// Relabels strands through `sigma`: the word is unchanged, endpoint
    /// orders are rewritten with label `s` becoming `sigma^{-1}(s)`.
    pub fn act_permutation(&self, sigma: &Permutation) -> ColoredBraid {
        assert_eq!(sigma.len(), self.strands);
        let inv = sigma.inverse();
        let relabel = |p: &Permutation| {
            Permutation::from_images(p.images().iter().map(|&s| inv.apply(s)).collect())
                .expect("relabeling a permutation stays a permutation")
        };
        ColoredBraid {
            strands: self.strands,
            word: self.word.clone(),
            source_order: relabel(&self.source_order),
            target_order: relabel(&self.target_order),
        }
    }

    /// Cables strand `s` into `widths[s]` parallel strands. Each crossing
    /// becomes the block crossing of the two adjacent bundles; zero-width
    /// strands are deleted.
    pub fn cable(&self, widths: &[usize]) -> Result<ColoredBraid, BraidError> {
        if widths.len() != self.strands {
            return Err(BraidError::WidthMismatch {
                expected: self.strands,
                got: widths.len(),
            });
        }
        let total: usize = widths.iter().sum();
        // composite labels: slot s owns the contiguous range starting at offsets[s]
        let mut offsets = vec![0usize; self.strands];
        let mut acc = 0;
        for s in 0..self.strands {
            offsets[s] = acc;
            acc += widths[s];
        }
        let expand = |p: &Permutation| {
            let mut images = Vec::with_capacity(total);
            for &s in p.images() {
                for k in 0..widths[s] {
                    images.push(offsets[s] + k);
                }
            }
            Permutation::from_images(images).expect("blockwise expansion is a permutation")
        };
        let source = expand(&self.source_order);
        let target = expand(&self.target_order);

        let mut order: Vec<usize> = self.source_order.images().to_vec();
        let mut word = Vec::new();
        for &g in &self.word {
            let p = g.unsigned_abs() as usize - 1;
            let a = widths[order[p]];
            let b = widths[order[p + 1]];
            let base: usize = order[..p].iter().map(|&s| widths[s]).sum();
            if g > 0 {
                emit_positive_block(&mut word, base, a, b);
            } else {
                let mut pos = Vec::new();
                emit_positive_block(&mut pos, base, b, a);
                word.extend(pos.iter().rev().map(|w| -w));
            }
            order.swap(p, p + 1);
        }
        let braid = ColoredBraid {
            strands: total,
            word,
            source_order: source,
            target_order: target,
        };
        debug_assert_eq!(apply_word(&braid.source_order, &braid.word), braid.target_order);
        Ok(braid)
    }
}

/// Positive block crossing of bundles of widths `a` (below) and `b` (above),
/// starting at 0-indexed position `base`: the lower bundle passes over the
/// upper one, preserving internal orders.
fn emit_positive_block(word: &mut Vec<i32>, base: usize, a: usize, b: usize) {
    for i in (1..=a).rev() {
        for j in 0..b {
            word.push((base + i + j) as i32);
        }
    }
}

/// The permutation of positions induced by a word: position `k` before the
/// word maps to the position the same strand occupies after it.
pub fn underlying_permutation(strands: usize, word: &[i32]) -> Permutation {
    let mut images: Vec<usize> = (0..strands).collect();
    // images[k] = current position of the strand that started at position k
    for &g in word {
        let p = g.unsigned_abs() as usize - 1;
        for v in images.iter_mut() {
            if *v == p {
                *v = p + 1;
            } else if *v == p + 1 {
                *v = p;
            }
        }
    }
    Permutation::from_images(images).expect("tracking positions yields a permutation")
}

fn apply_word(source: &Permutation, word: &[i32]) -> Permutation {
    let mut order = source.images().to_vec();
    for &g in word {
        let p = g.unsigned_abs() as usize - 1;
        order.swap(p, p + 1);
    }
    Permutation::from_images(order).expect("swapping entries preserves permutations")
}

#[derive(Clone, Debug)]
struct CrossingEvent {
    time: Rat,
    i: usize,
    j: usize,
}

/// Computes the braid of the linear motion of slot centers from their
/// positions in `embedding` to the canonical stacked configuration, where
/// slot `i` ends at height `(i+1)/(n+1)` with its x-coordinate unchanged.
///
/// A vertical embedding is already straight and yields the empty braid at its
/// own component. For other inputs the source order is the canonical slot
/// labeling by increasing center height (ties broken by x, then slot index)
/// and the target order is the identity.
///
/// `perturb` shifts the center of slot `i` by `((i+1) * eps, 0)` before the
/// motion, which resolves equal-x degeneracies deterministically.
pub fn straighten(
    embedding: &LinearEmbedding,
    orientation: Orientation,
    perturb: Option<&Rat>,
) -> Result<ColoredBraid, DegenerateMotion> {
    let n = embedding.arity();
    if embedding.is_vertical() {
        return Ok(ColoredBraid::empty(n, embedding.vertical_order()));
    }

    let mut centers = embedding.centers();
    if let Some(eps) = perturb {
        for (i, c) in centers.iter_mut().enumerate() {
            c.0 += rat(i as i64 + 1, 1) * eps;
        }
    }
    let heights: Vec<Rat> = (0..n).map(|i| rat(i as i64 + 1, n as i64 + 1)).collect();

    // canonical start order: (y, x, slot) lexicographic
    let mut start: Vec<usize> = (0..n).collect();
    start.sort_by(|&a, &b| {
        centers[a]
            .1
            .cmp(&centers[b].1)
            .then(centers[a].0.cmp(&centers[b].0))
            .then(a.cmp(&b))
    });
    let source_order = Permutation::from_images(start.clone()).unwrap();

    // strictly positive crossing times
    let mut events: Vec<CrossingEvent> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let f0 = &centers[i].1 - &centers[j].1;
            let f1 = &heights[i] - &heights[j];
            if f0.is_zero() {
                continue; // resolved at time zero, handled below
            }
            if rat_sign(&f0) != rat_sign(&f1) {
                let t = -&f0 / (&f1 - &f0);
                if centers[i].0 == centers[j].0 {
                    return Err(DegenerateMotion { i, j });
                }
                events.push(CrossingEvent { time: t, i, j });
            }
        }
    }
    // shared-strand simultaneous crossings cannot be serialized
    for a in 0..events.len() {
        for b in (a + 1)..events.len() {
            let (ea, eb) = (&events[a], &events[b]);
            if ea.time == eb.time && (ea.i == eb.i || ea.i == eb.j || ea.j == eb.i || ea.j == eb.j) {
                return Err(DegenerateMotion { i: ea.i, j: ea.j });
            }
        }
    }
    events.sort_by(|a, b| a.time.cmp(&b.time).then(a.i.cmp(&b.i)).then(a.j.cmp(&b.j)));

    let mut order = start;
    let mut word: Vec<i32> = Vec::new();
    let mut emit = |order: &mut Vec<usize>, i: usize, j: usize| -> Result<(), DegenerateMotion> {
        let pi = order.iter().position(|&s| s == i).unwrap();
        let pj = order.iter().position(|&s| s == j).unwrap();
        let (lo, hi) = if pi < pj { (pi, pj) } else { (pj, pi) };
        if hi - lo != 1 {
            return Err(DegenerateMotion { i, j });
        }
        // descending strand is the one above before the swap
        let above = order[hi];
        let below = order[lo];
        if centers[above].0 == centers[below].0 {
            return Err(DegenerateMotion { i, j });
        }
        let ccw = centers[above].0 < centers[below].0;
        let positive = match orientation {
            Orientation::Ccw => ccw,
            Orientation::Cw => !ccw,
        };
        word.push(if positive { (lo + 1) as i32 } else { -((lo + 1) as i32) });
        order.swap(lo, hi);
        Ok(())
    };

    // ties in y at time zero resolve instantaneously towards target order
    loop {
        let mut swapped = false;
        for p in 0..n.saturating_sub(1) {
            let (u, v) = (order[p], order[p + 1]);
            if centers[u].1 == centers[v].1 && heights[u] > heights[v] {
                emit(&mut order, u, v)?;
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    for ev in &events {
        emit(&mut order, ev.i, ev.j)?;
    }
    debug_assert!(order.iter().enumerate().all(|(k, &s)| k == s));

    Ok(ColoredBraid {
        strands: n,
        word,
        source_order,
        target_order: Permutation::identity(n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubes::Square;

    fn emb(centers: &[(i64, i64, i64, i64)]) -> LinearEmbedding {
        // centers given as (xn, xd, yn, yd); tiny squares around each center
        let scale = rat(1, 100);
        let half = rat(1, 200);
        LinearEmbedding::new(
            centers
                .iter()
                .map(|&(xn, xd, yn, yd)| {
                    Square::new(scale.clone(), rat(xn, xd) - &half, rat(yn, yd) - &half)
                })
                .collect(),
        )
    }

    #[test]
    fn elementary_examples() {
        let b = ColoredBraid::elementary(2, 1, Permutation::identity(2)).unwrap();
        assert_eq!(b.word(), &[1]);
        assert_eq!(b.target_order().images(), &[1, 0]);
        let b = ColoredBraid::elementary(3, 2, Permutation::identity(3)).unwrap();
        assert_eq!(b.word(), &[2]);
        assert_eq!(b.target_order().images(), &[0, 2, 1]);
        assert!(ColoredBraid::elementary(2, 2, Permutation::identity(2)).is_err());
    }

    #[test]
    fn compose_unit_and_relator() {
        let id2 = Permutation::identity(2);
        let e = ColoredBraid::empty(2, id2.clone());
        let b = ColoredBraid::elementary(2, 1, id2.clone()).unwrap();
        assert_eq!(e.compose_paths(&b).unwrap(), b);
        let bb = b.compose_paths(&b.inverse()).unwrap();
        assert_eq!(bb.word(), &[1, -1]);
        assert!(bb.target_order().is_identity());
        let twist = b
            .compose_paths(&ColoredBraid::elementary(2, 1, b.target_order().clone()).unwrap())
            .unwrap();
        assert_eq!(twist.word(), &[1, 1]);
        assert!(twist.target_order().is_identity());
    }

    #[test]
    fn endpoint_mismatch_rejected() {
        let id2 = Permutation::identity(2);
        let b = ColoredBraid::elementary(2, 1, id2.clone()).unwrap();
        assert!(b.compose_paths(&b).is_err());
    }

    #[test]
    fn cable_trivial_widths() {
        let b = ColoredBraid::new(3, vec![1, -2], Permutation::identity(3)).unwrap();
        let c = b.cable(&[1, 1, 1]).unwrap();
        assert_eq!(c.word(), b.word());
        assert_eq!(c.source_order(), b.source_order());
    }

    #[test]
    fn cable_block_crossing() {
        let b = ColoredBraid::elementary(2, 1, Permutation::identity(2)).unwrap();
        let c = b.cable(&[2, 1]).unwrap();
        assert_eq!(c.strand_count(), 3);
        assert_eq!(c.word(), &[2, 1]);
        assert_eq!(c.source_order().images(), &[0, 1, 2]);
        assert_eq!(c.target_order().images(), &[2, 0, 1]);
    }

    #[test]
    fn cable_empty_word() {
        let b = ColoredBraid::empty(2, Permutation::identity(2));
        let c = b.cable(&[3, 2]).unwrap();
        assert!(c.word().is_empty());
        assert_eq!(c.strand_count(), 5);
    }

    #[test]
    fn cable_zero_width_deletes() {
        let b = ColoredBraid::elementary(2, 1, Permutation::identity(2)).unwrap();
        let c = b.cable(&[0, 2]).unwrap();
        assert_eq!(c.strand_count(), 2);
        assert!(c.word().is_empty());
    }

    #[test]
    fn cable_respects_composition() {
        let id3 = Permutation::identity(3);
        let u = ColoredBraid::new(3, vec![1, 2], id3.clone()).unwrap();
        let v = ColoredBraid::new(3, vec![-1], u.target_order().clone()).unwrap();
        let widths = [2, 1, 2];
        let both = u.compose_paths(&v).unwrap().cable(&widths).unwrap();
        let separate = u
            .cable(&widths)
            .unwrap()
            .compose_paths(&v.cable(&widths).unwrap())
            .unwrap();
        assert_eq!(both, separate);
    }

    #[test]
    fn underlying_permutation_tracks_word() {
        let p = underlying_permutation(3, &[1, 2]);
        // strand at position 0 ends at position 2
        assert_eq!(p.images(), &[2, 0, 1]);
        assert!(underlying_permutation(2, &[1, -1]).is_identity());
    }

    #[test]
    fn straighten_vertical_is_empty() {
        let e = LinearEmbedding::canonical_vertical(3);
        let b = straighten(&e, Orientation::Ccw, None).unwrap();
        assert!(b.word().is_empty());
        assert!(b.source_order().is_identity());
    }

    #[test]
    fn straighten_same_height_tie() {
        let e = emb(&[(1, 4, 1, 2), (3, 4, 1, 2)]);
        let b = straighten(&e, Orientation::Ccw, None).unwrap();
        assert!(b.word().is_empty());
        assert!(b.source_order().is_identity());
        assert!(b.target_order().is_identity());
    }

    #[test]
    fn straighten_single_crossing() {
        // y-projections overlap (non-vertical); slot 0 starts above slot 1
        // and ends below it, crossing once while slot 0 sits at smaller x.
        let quarter = rat(1, 4);
        let e = LinearEmbedding::new(vec![
            Square::new(quarter.clone(), rat(1, 8), rat(7, 16)),
            Square::new(quarter.clone(), rat(5, 8), rat(5, 16)),
        ]);
        assert_eq!(e.validate(), Ok(()));
        assert!(!e.is_vertical());
        let b = straighten(&e, Orientation::Ccw, None).unwrap();
        assert_eq!(b.source_order().images(), &[1, 0]);
        assert_eq!(b.word(), &[1]);
        assert!(b.target_order().is_identity());
        let cw = straighten(&e, Orientation::Cw, None).unwrap();
        assert_eq!(cw.word(), &[-1]);
    }

    #[test]
    fn straighten_degenerate_and_perturb() {
        // slots 0 and 1 stacked at the same x and due to swap; slot 2 ties
        // slot 0 in height so the embedding is not vertical.
        let e = emb(&[(1, 2, 3, 4), (1, 2, 1, 4), (7, 8, 3, 4)]);
        assert_eq!(e.validate(), Ok(()));
        assert!(!e.is_vertical());
        let err = straighten(&e, Orientation::Ccw, None).unwrap_err();
        assert_eq!(err, DegenerateMotion { i: 0, j: 1 });
        let eps = rat(1, 1000);
        let b1 = straighten(&e, Orientation::Ccw, Some(&eps)).unwrap();
        let b2 = straighten(&e, Orientation::Ccw, Some(&eps)).unwrap();
        assert_eq!(b1, b2);
        assert_eq!(b1.word(), &[1]);
    }

    #[test]
    fn straighten_source_relabels_under_permutation() {
        // y-tie between slots 0 and 1 keeps the embedding non-vertical
        let e = emb(&[(1, 8, 1, 4), (3, 8, 1, 4), (6, 8, 5, 8)]);
        assert!(!e.is_vertical());
        let sigma = Permutation::from_images(vec![2, 0, 1]).unwrap();
        let b = straighten(&e, Orientation::Ccw, None).unwrap();
        let bs = straighten(&e.act_permutation(&sigma), Orientation::Ccw, None).unwrap();
        let inv = sigma.inverse();
        let relabeled: Vec<usize> = b.source_order().images().iter().map(|&s| inv.apply(s)).collect();
        assert_eq!(bs.source_order().images(), relabeled.as_slice());
    }
}
