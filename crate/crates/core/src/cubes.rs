//! Exact arithmetic for nested families of sub-squares of the open unit
//! square: construction, validation, operadic composition, the symmetric
//! group action, and the verticality predicate.
//!
//! All coordinates are exact rationals, so disjointness and verticality are
//! decidable predicates with no tolerance.

use crate::perm::Permutation;
use crate::scalar::rat_sign;
use num::{BigInt, BigRational, One, Zero};
use std::fmt;
use thiserror::Error;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A unary affine embedding z -> a*z + (x + iy) of the unit square into
/// itself, stored by its scale and offset.
#[derive(Clone, PartialEq, Eq)]
pub struct Square {
    pub scale: Rat,
    pub x: Rat,
    pub y: Rat,
}

impl fmt::Debug for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Square(a={}, b=({}, {}))", self.scale, self.x, self.y)
    }
}

impl Square {
    pub fn new(scale: Rat, x: Rat, y: Rat) -> Self {
        Square { scale, x, y }
    }

    pub fn unit() -> Self {
        Square::new(Rat::one(), Rat::zero(), Rat::zero())
    }

    pub fn center(&self) -> (Rat, Rat) {
        let half = &self.scale / rat(2, 1);
        (&self.x + &half, &self.y + &half)
    }

    /// Closed image interval on the given axis.
    fn interval(&self, vertical: bool) -> (Rat, Rat) {
        let lo = if vertical { self.y.clone() } else { self.x.clone() };
        let hi = &lo + &self.scale;
        (lo, hi)
    }

    /// Composite z -> self(inner(z)).
    pub fn compose(&self, inner: &Square) -> Square {
        Square {
            scale: &self.scale * &inner.scale,
            x: &self.scale * &inner.x + &self.x,
            y: &self.scale * &inner.y + &self.y,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CubeViolation {
    #[error("square {slot}: scale must be positive")]
    ScaleNotPositive { slot: usize },
    #[error("square {slot}: closed image leaves the unit square")]
    OutsideUnitSquare { slot: usize },
    #[error("squares {i} and {j}: closed images intersect")]
    Overlap { i: usize, j: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComposeError {
    #[error("arity mismatch: outer expects {expected} inner embeddings, got {got}")]
    ArityMismatch { expected: usize, got: usize },
}

/// An element of the n-th space of the little-2-cubes operad: an ordered list
/// of n sub-squares with pairwise disjoint closed images. Arity 0 encodes the
/// trivial embedding.
#[derive(Clone, PartialEq, Eq)]
pub struct LinearEmbedding {
    squares: Vec<Square>,
}

impl fmt::Debug for LinearEmbedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearEmbedding{:?}", self.squares)
    }
}

impl LinearEmbedding {
    /// Wrap squares without validating; call [`LinearEmbedding::validate`]
    /// to obtain a verdict.
    pub fn new(squares: Vec<Square>) -> Self {
        LinearEmbedding { squares }
    }

    /// The trivial embedding of arity 0.
    pub fn trivial() -> Self {
        LinearEmbedding { squares: vec![] }
    }

    /// The identity unary embedding.
    pub fn identity() -> Self {
        LinearEmbedding {
            squares: vec![Square::unit()],
        }
    }

    pub fn arity(&self) -> usize {
        self.squares.len()
    }

    pub fn squares(&self) -> &[Square] {
        &self.squares
    }

    pub fn square(&self, slot: usize) -> &Square {
        &self.squares[slot]
    }

    /// Total verdict: every invariant, reporting the first violation.
    pub fn validate(&self) -> Result<(), CubeViolation> {
        let one = Rat::one();
        for (slot, s) in self.squares.iter().enumerate() {
            if s.scale <= Rat::zero() {
                return Err(CubeViolation::ScaleNotPositive { slot });
            }
            if s.x < Rat::zero() || &s.x + &s.scale > one || s.y < Rat::zero() || &s.y + &s.scale > one {
                return Err(CubeViolation::OutsideUnitSquare { slot });
            }
        }
        for i in 0..self.squares.len() {
            for j in (i + 1)..self.squares.len() {
                if closed_intervals_meet(&self.squares[i].interval(false), &self.squares[j].interval(false))
                    && closed_intervals_meet(&self.squares[i].interval(true), &self.squares[j].interval(true))
                {
                    return Err(CubeViolation::Overlap { i, j });
                }
            }
        }
        Ok(())
    }

    /// Operadic composition: slot l of `self` receives `inners[l]`. Arity-0
    /// inners delete their slot.
    pub fn compose(&self, inners: &[LinearEmbedding]) -> Result<LinearEmbedding, ComposeError> {
        if inners.len() != self.arity() {
            return Err(ComposeError::ArityMismatch {
                expected: self.arity(),
                got: inners.len(),
            });
        }
        let mut squares = Vec::new();
        for (outer, inner) in self.squares.iter().zip(inners) {
            for s in &inner.squares {
                squares.push(outer.compose(s));
            }
        }
        Ok(LinearEmbedding { squares })
    }

    /// Right action: slot i of the result holds square sigma(i) of the input.
    pub fn act_permutation(&self, sigma: &Permutation) -> LinearEmbedding {
        assert_eq!(sigma.len(), self.arity());
        let squares = (0..self.arity())
            .map(|i| self.squares[sigma.apply(i)].clone())
            .collect();
        LinearEmbedding { squares }
    }

    /// True iff the open vertical-axis projections of the images are pairwise
    /// disjoint.
    pub fn is_vertical(&self) -> bool {
        let n = self.arity();
        for i in 0..n {
            for j in (i + 1)..n {
                let (alo, ahi) = self.squares[i].interval(true);
                let (blo, bhi) = self.squares[j].interval(true);
                // open intervals (alo,ahi), (blo,bhi) meet iff alo < bhi and blo < ahi
                if alo < bhi && blo < ahi {
                    return false;
                }
            }
        }
        true
    }

    /// Canonical labeling of slots: sorted by increasing center y, ties broken
    /// by increasing center x, then by slot index. Position k of the result
    /// holds the slot with the k-th lowest center.
    pub fn vertical_order(&self) -> Permutation {
        let mut slots: Vec<usize> = (0..self.arity()).collect();
        let centers: Vec<(Rat, Rat)> = self.squares.iter().map(|s| s.center()).collect();
        slots.sort_by(|&a, &b| {
            centers[a]
                .1
                .cmp(&centers[b].1)
                .then(centers[a].0.cmp(&centers[b].0))
                .then(a.cmp(&b))
        });
        Permutation::from_images(slots).expect("sort of distinct slots is a permutation")
    }

    /// Slot centers as exact points.
    pub fn centers(&self) -> Vec<(Rat, Rat)> {
        self.squares.iter().map(|s| s.center()).collect()
    }

    /// The stacked vertical embedding used as the canonical chart at each
    /// arity: slot i occupies the i-th horizontal band of the unit square.
    pub fn canonical_vertical(n: usize) -> LinearEmbedding {
        if n == 0 {
            return LinearEmbedding::trivial();
        }
        let scale = rat(1, 2 * n as i64);
        let squares = (0..n)
            .map(|i| {
                let y = rat(i as i64, n as i64) + rat(1, 4 * n as i64);
                Square::new(scale.clone(), rat(1, 4), y)
            })
            .collect();
        LinearEmbedding { squares }
    }
}

fn closed_intervals_meet(a: &(Rat, Rat), b: &(Rat, Rat)) -> bool {
    // [a0,a1] and [b0,b1] meet iff a0 <= b1 and b0 <= a1
    a.0 <= b.1 && b.0 <= a.1
}

/// The block permutation induced by permuting slots of widths `widths[i]`
/// (indexed before the action) by `sigma`: composing a permuted outer with
/// permuted inners equals this relabeling of the unpermuted composite.
pub fn block_permutation(sigma: &Permutation, widths: &[usize]) -> Permutation {
    assert_eq!(sigma.len(), widths.len());
    // Composite of phi^sigma with (psi_{sigma(0)},...): block k of the result
    // is the sigma(k)-th block of the plain composite.
    let n = sigma.len();
    let mut offsets = vec![0usize; n];
    let mut acc = 0;
    for i in 0..n {
        offsets[i] = acc;
        acc += widths[i];
    }
    let total = acc;
    let mut images = Vec::with_capacity(total);
    for k in 0..n {
        let b = sigma.apply(k);
        for j in 0..widths[b] {
            images.push(offsets[b] + j);
        }
    }
    debug_assert_eq!(images.len(), total);
    Permutation::from_images(images).expect("block images form a permutation")
}

pub fn sign_of(r: &Rat) -> i32 {
    rat_sign(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(a: (i64, i64), x: (i64, i64), y: (i64, i64)) -> Square {
        Square::new(rat(a.0, a.1), rat(x.0, x.1), rat(y.0, y.1))
    }

    #[test]
    fn validate_identity_ok() {
        assert_eq!(LinearEmbedding::identity().validate(), Ok(()));
    }

    #[test]
    fn validate_corner_touch_is_violation() {
        // closed images share the corner (1/2, 1/2)
        let e = LinearEmbedding::new(vec![
            sq((1, 2), (0, 1), (0, 1)),
            sq((1, 2), (1, 2), (1, 2)),
        ]);
        assert_eq!(e.validate(), Err(CubeViolation::Overlap { i: 0, j: 1 }));
    }

    #[test]
    fn validate_separated_ok() {
        let e = LinearEmbedding::new(vec![
            sq((1, 4), (0, 1), (0, 1)),
            sq((1, 4), (1, 2), (1, 2)),
        ]);
        assert_eq!(e.validate(), Ok(()));
    }

    #[test]
    fn validate_catches_bad_scale_and_bounds() {
        let e = LinearEmbedding::new(vec![sq((-1, 2), (0, 1), (0, 1))]);
        assert_eq!(e.validate(), Err(CubeViolation::ScaleNotPositive { slot: 0 }));
        let e = LinearEmbedding::new(vec![sq((1, 2), (3, 4), (0, 1))]);
        assert_eq!(e.validate(), Err(CubeViolation::OutsideUnitSquare { slot: 0 }));
    }

    #[test]
    fn compose_unit_laws() {
        let psi = LinearEmbedding::new(vec![
            sq((1, 4), (0, 1), (0, 1)),
            sq((1, 4), (1, 2), (1, 2)),
        ]);
        let id = LinearEmbedding::identity();
        assert_eq!(id.compose(&[psi.clone()]).unwrap(), psi);
        let units: Vec<_> = (0..psi.arity()).map(|_| LinearEmbedding::identity()).collect();
        assert_eq!(psi.compose(&units).unwrap(), psi);
    }

    #[test]
    fn compose_affine_arithmetic() {
        let outer = LinearEmbedding::new(vec![sq((1, 2), (1, 4), (1, 4))]);
        let inner = LinearEmbedding::new(vec![sq((1, 2), (0, 1), (0, 1))]);
        let composite = outer.compose(&[inner]).unwrap();
        assert_eq!(
            composite.square(0),
            &sq((1, 4), (1, 4), (1, 4))
        );
    }

    #[test]
    fn compose_trivial_slot_deletes() {
        let outer = LinearEmbedding::new(vec![
            sq((1, 4), (0, 1), (0, 1)),
            sq((1, 4), (1, 2), (1, 2)),
        ]);
        let psi = LinearEmbedding::new(vec![sq((1, 2), (1, 4), (1, 4))]);
        let composite = outer
            .compose(&[psi.clone(), LinearEmbedding::trivial()])
            .unwrap();
        assert_eq!(composite.arity(), 1);
        assert_eq!(composite.square(0), &outer.square(0).compose(psi.square(0)));
    }

    #[test]
    fn compose_arity_mismatch() {
        let outer = LinearEmbedding::canonical_vertical(2);
        assert_eq!(
            outer.compose(&[LinearEmbedding::identity()]),
            Err(ComposeError::ArityMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn permutation_action_examples() {
        let e = LinearEmbedding::new(vec![
            sq((1, 4), (0, 1), (0, 1)),
            sq((1, 4), (1, 2), (1, 2)),
        ]);
        assert_eq!(e.act_permutation(&Permutation::identity(2)), e);
        let swapped = e.act_permutation(&Permutation::from_images(vec![1, 0]).unwrap());
        assert_eq!(swapped.square(0), e.square(1));
        assert_eq!(swapped.square(1), e.square(0));
    }

    #[test]
    fn verticality_examples() {
        // y-intervals (0,1/4) and (1/2,3/4)
        let v = LinearEmbedding::new(vec![
            sq((1, 4), (0, 1), (0, 1)),
            sq((1, 4), (0, 1), (1, 2)),
        ]);
        assert!(v.is_vertical());
        // same y, different x
        let h = LinearEmbedding::new(vec![
            sq((1, 4), (0, 1), (0, 1)),
            sq((1, 4), (1, 2), (0, 1)),
        ]);
        assert!(!h.is_vertical());
        assert!(LinearEmbedding::identity().is_vertical());
        assert!(LinearEmbedding::trivial().is_vertical());
    }

    #[test]
    fn vertical_order_tie_breaks() {
        // same y: order by x
        let e = LinearEmbedding::new(vec![
            sq((1, 4), (1, 2), (0, 1)),
            sq((1, 4), (0, 1), (0, 1)),
        ]);
        assert_eq!(e.vertical_order().images(), &[1, 0]);
    }

    #[test]
    fn canonical_vertical_is_valid_and_vertical() {
        for n in 0..5 {
            let e = LinearEmbedding::canonical_vertical(n);
            assert_eq!(e.arity(), n);
            assert_eq!(e.validate(), Ok(()));
            assert!(e.is_vertical());
            assert!(e.vertical_order().is_identity());
        }
    }
}
