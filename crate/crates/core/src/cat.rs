//! The braided-category engine at matrix level: Yang-Baxter operators on
//! finite-rank free modules, braid-group representations on tensor powers,
//! and the reading order of tensor functors attached to vertical embeddings.

use crate::braids::ColoredBraid;
use crate::cubes::LinearEmbedding;
use crate::matrix::Matrix;
use crate::perm::Permutation;
use crate::scalar::FieldTag;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatError {
    #[error("braiding must be {expected}x{expected} for rank {rank}, got {rows}x{cols}")]
    DimensionMismatch {
        rank: usize,
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("braiding matrix is not invertible")]
    NotInvertible,
    #[error(
        "Yang-Baxter equation fails at entry ({row}, {col}): lhs = {lhs}, rhs = {rhs}"
    )]
    YangBaxterFailure {
        row: usize,
        col: usize,
        lhs: String,
        rhs: String,
    },
    #[error("tensor reading order requires a vertical embedding; straighten first")]
    VerticalRequired,
}

/// Checks invertibility and the braid form of the Yang-Baxter equation,
///     (id (x) R)(R (x) id)(id (x) R) = (R (x) id)(id (x) R)(R (x) id),
/// by exact evaluation on V (x) V (x) V.
pub fn check_yang_baxter(r: &Matrix, rank: usize) -> Result<(), CatError> {
    let d = rank * rank;
    if r.rows() != d || r.cols() != d {
        return Err(CatError::DimensionMismatch {
            rank,
            expected: d,
            rows: r.rows(),
            cols: r.cols(),
        });
    }
    if r.inverse().is_none() {
        return Err(CatError::NotInvertible);
    }
    let id = Matrix::identity(rank, r.field());
    let r12 = r.kron(&id);
    let r23 = id.kron(r);
    let lhs = r23.mul(&r12).mul(&r23);
    let rhs = r12.mul(&r23).mul(&r12);
    if let Some((row, col)) = lhs.first_difference(&rhs) {
        return Err(CatError::YangBaxterFailure {
            row,
            col,
            lhs: lhs.at(row, col).to_string(),
            rhs: rhs.at(row, col).to_string(),
        });
    }
    Ok(())
}

/// A finite-rank free module with an invertible Yang-Baxter operator on its
/// tensor square. With `koszul_sign` on, braid generators act through -R.
#[derive(Clone, PartialEq, Eq)]
pub struct BraidedObject {
    rank: usize,
    braiding: Matrix,
    koszul_sign: bool,
}

impl fmt::Debug for BraidedObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BraidedObject(rank={}, field={}, koszul={})",
            self.rank,
            self.braiding.field(),
            self.koszul_sign
        )
    }
}

impl BraidedObject {
    pub fn new(rank: usize, braiding: Matrix, koszul_sign: bool) -> Result<Self, CatError> {
        check_yang_baxter(&braiding, rank)?;
        Ok(BraidedObject {
            rank,
            braiding,
            koszul_sign,
        })
    }

    /// Skips the Yang-Baxter certificate. Used to load files before
    /// verification and to build known-bad systems in tests.
    pub fn new_unchecked(rank: usize, braiding: Matrix, koszul_sign: bool) -> Self {
        BraidedObject {
            rank,
            braiding,
            koszul_sign,
        }
    }

    /// The rank-2 tensor swap, the simplest symmetric braiding.
    pub fn flip(rank: usize, field: FieldTag, koszul_sign: bool) -> Self {
        let d = rank * rank;
        let mut m = Matrix::zeros(d, d, field);
        for i in 0..rank {
            for j in 0..rank {
                m.set(j * rank + i, i * rank + j, field.one());
            }
        }
        BraidedObject {
            rank,
            braiding: m,
            koszul_sign,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn braiding(&self) -> &Matrix {
        &self.braiding
    }

    pub fn koszul_sign(&self) -> bool {
        self.koszul_sign
    }

    pub fn field(&self) -> FieldTag {
        self.braiding.field()
    }

    /// The operator braid generators act through: -R with the Koszul sign on.
    pub fn generator_action(&self) -> Matrix {
        if self.koszul_sign {
            let minus_one = self.field().from_i64(-1);
            self.braiding.scale(&minus_one)
        } else {
            self.braiding.clone()
        }
    }

    /// Evaluator for braid words on the n-th tensor power.
    pub fn rep(&self, n: usize) -> Rep {
        Rep::new(self.clone(), n)
    }
}

/// A representation handle: evaluates braid words on V^{(x) n}. Generator
/// matrices are built once per strand count.
pub struct Rep {
    obj: BraidedObject,
    n: usize,
    dim: usize,
    positive: Vec<Matrix>,
    negative: Vec<Matrix>,
}

impl Rep {
    fn new(obj: BraidedObject, n: usize) -> Self {
        let r = obj.rank();
        let dim = r.checked_pow(n as u32).expect("tensor power dimension overflow");
        let action = obj.generator_action();
        let action_inv = action
            .inverse()
            .expect("braiding invertibility was certified");
        let field = obj.field();
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for l in 1..n {
            let left = Matrix::identity(r.pow((l - 1) as u32), field);
            let right = Matrix::identity(r.pow((n - l - 1) as u32), field);
            positive.push(left.kron(&action).kron(&right));
            negative.push(left.kron(&action_inv).kron(&right));
        }
        Rep {
            obj,
            n,
            dim,
            positive,
            negative,
        }
    }

    pub fn strand_count(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn object(&self) -> &BraidedObject {
        &self.obj
    }

    pub fn generator(&self, g: i32) -> &Matrix {
        let l = g.unsigned_abs() as usize;
        assert!(g != 0 && l < self.n, "generator {} out of range for {} strands", g, self.n);
        if g > 0 {
            &self.positive[l - 1]
        } else {
            &self.negative[l - 1]
        }
    }

    /// Product of generator matrices in word order; the empty word is the
    /// identity.
    pub fn eval_word(&self, word: &[i32]) -> Matrix {
        let mut acc = Matrix::identity(self.dim, self.obj.field());
        for &g in word {
            acc = acc.then(self.generator(g));
        }
        acc
    }
}

/// Evaluates a colored braid in the representation on V^{(x) n}.
pub fn eval_braid(obj: &BraidedObject, braid: &ColoredBraid) -> Matrix {
    obj.rep(braid.strand_count()).eval_word(braid.word())
}

/// The reading order of tensor slots for a vertical embedding: increasing
/// height maps to left-to-right factor positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorOrder {
    pub arity: usize,
    pub rank: usize,
    /// position k (leftmost factor first) holds slot `order[k]`
    pub order: Permutation,
}

pub fn tensor_phi(obj: &BraidedObject, phi: &LinearEmbedding) -> Result<TensorOrder, CatError> {
    if !phi.is_vertical() {
        return Err(CatError::VerticalRequired);
    }
    Ok(TensorOrder {
        arity: phi.arity(),
        rank: obj.rank(),
        order: phi.vertical_order(),
    })
}

/// Braiding of a block of `a` strands over a block of `b` strands, built by
/// the hexagon recursion rather than through word cabling. Used as an
/// independent route in tests of cabling compatibility.
pub fn block_braiding(obj: &BraidedObject, a: usize, b: usize) -> Matrix {
    let r = obj.rank();
    let field = obj.field();
    let dim = r.pow((a + b) as u32);
    if a == 0 || b == 0 {
        return Matrix::identity(dim, field);
    }
    if a == 1 && b == 1 {
        return obj.generator_action();
    }
    if b > 1 {
        // c_{A, B' (x) B''} = (c_{A,B'} (x) id) then (id (x) c_{A,B''})
        let first = block_braiding(obj, a, b - 1).kron(&Matrix::identity(r, field));
        let second = Matrix::identity(r.pow((b - 1) as u32), field).kron(&block_braiding(obj, a, 1));
        first.then(&second)
    } else {
        // c_{A' (x) A'', B} = (id (x) c_{A'',B}) then (c_{A',B} (x) id)
        let first = Matrix::identity(r.pow((a - 1) as u32), field).kron(&block_braiding(obj, 1, b));
        let second = block_braiding(obj, a - 1, b).kron(&Matrix::identity(r, field));
        first.then(&second)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braids::straighten;
    use crate::braids::Orientation;
    use crate::perm::Permutation;

    fn q() -> FieldTag {
        FieldTag::Q
    }

    #[test]
    fn yb_holds_for_flip_and_identity() {
        let flip = BraidedObject::flip(2, q(), false);
        assert_eq!(check_yang_baxter(flip.braiding(), 2), Ok(()));
        let id = Matrix::identity(4, q());
        assert_eq!(check_yang_baxter(&id, 2), Ok(()));
    }

    #[test]
    fn yb_counterexample_reported() {
        // the flip with an extra off-diagonal entry is invertible but fails
        // the equation; scaling a diagonal entry would not (diagonal-twisted
        // flips remain solutions)
        let mut bad = BraidedObject::flip(2, q(), false).braiding().clone();
        bad.set(0, 1, q().from_i64(1));
        match check_yang_baxter(&bad, 2) {
            Err(CatError::YangBaxterFailure { .. }) => {}
            other => panic!("expected a Yang-Baxter counterexample, got {:?}", other),
        }
        let mut scaled = BraidedObject::flip(2, q(), false).braiding().clone();
        scaled.set(0, 0, q().from_i64(2));
        assert_eq!(check_yang_baxter(&scaled, 2), Ok(()));
    }

    #[test]
    fn yb_dimension_and_invertibility() {
        let m = Matrix::zeros(3, 4, q());
        assert!(matches!(
            check_yang_baxter(&m, 2),
            Err(CatError::DimensionMismatch { .. })
        ));
        let z = Matrix::zeros(4, 4, q());
        assert_eq!(check_yang_baxter(&z, 2), Err(CatError::NotInvertible));
    }

    #[test]
    fn rho_small_strand_counts() {
        let obj = BraidedObject::flip(2, q(), false);
        assert!(obj.rep(0).eval_word(&[]).is_identity());
        assert_eq!(obj.rep(0).dim(), 1);
        assert!(obj.rep(1).eval_word(&[]).is_identity());
        assert_eq!(obj.rep(1).dim(), 2);
    }

    #[test]
    fn rho_flip_and_koszul_sign() {
        let obj = BraidedObject::flip(2, q(), false);
        assert_eq!(&obj.rep(2).eval_word(&[1]), obj.braiding());
        let odd = BraidedObject::flip(2, q(), true);
        let minus_flip = obj.braiding().scale(&q().from_i64(-1));
        assert_eq!(odd.rep(2).eval_word(&[1]), minus_flip);
    }

    #[test]
    fn eval_is_functorial_and_inverse_cancels() {
        let obj = BraidedObject::flip(2, q(), true);
        let rep = obj.rep(3);
        let u = [1, 2, -1];
        let v = [2, 2, 1];
        let mut uv = u.to_vec();
        uv.extend_from_slice(&v);
        assert_eq!(rep.eval_word(&uv), rep.eval_word(&u).then(&rep.eval_word(&v)));
        let mut rel = u.to_vec();
        rel.extend(u.iter().rev().map(|g| -g));
        assert!(rep.eval_word(&rel).is_identity());
    }

    #[test]
    fn braid_relations_for_flip() {
        for koszul in [false, true] {
            let obj = BraidedObject::flip(2, q(), koszul);
            let rep = obj.rep(3);
            assert_eq!(rep.eval_word(&[1, 2, 1]), rep.eval_word(&[2, 1, 2]));
            let rep4 = obj.rep(4);
            assert_eq!(rep4.eval_word(&[1, 3]), rep4.eval_word(&[3, 1]));
        }
    }

    #[test]
    fn cabling_matches_block_braiding() {
        let obj = BraidedObject::flip(2, q(), true);
        let b = ColoredBraid::elementary(2, 1, Permutation::identity(2)).unwrap();
        let cabled = b.cable(&[2, 1]).unwrap();
        let via_word = eval_braid(&obj, &cabled);
        let via_blocks = block_braiding(&obj, 2, 1);
        assert_eq!(via_word, via_blocks);
    }

    #[test]
    fn eval_unchanged_by_relabeling() {
        let obj = BraidedObject::flip(2, q(), false);
        let b = ColoredBraid::new(3, vec![1, -2, 1], Permutation::identity(3)).unwrap();
        let sigma = Permutation::from_images(vec![2, 0, 1]).unwrap();
        assert_eq!(eval_braid(&obj, &b), eval_braid(&obj, &b.act_permutation(&sigma)));
    }

    #[test]
    fn tensor_phi_requires_vertical() {
        let obj = BraidedObject::flip(2, q(), false);
        let v = LinearEmbedding::canonical_vertical(3);
        let t = tensor_phi(&obj, &v).unwrap();
        assert!(t.order.is_identity());
        // a horizontal pair is not vertical
        let h = LinearEmbedding::new(vec![
            crate::cubes::Square::new(crate::cubes::rat(1, 4), crate::cubes::rat(0, 1), crate::cubes::rat(0, 1)),
            crate::cubes::Square::new(crate::cubes::rat(1, 4), crate::cubes::rat(1, 2), crate::cubes::rat(0, 1)),
        ]);
        assert_eq!(tensor_phi(&obj, &h), Err(CatError::VerticalRequired));
        let s = straighten(&h, Orientation::Ccw, None).unwrap();
        assert!(tensor_phi(&obj, &LinearEmbedding::canonical_vertical(s.strand_count())).is_ok());
    }
}
