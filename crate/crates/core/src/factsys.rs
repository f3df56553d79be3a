//! Factorized local systems on configuration spaces, at depth-truncated
//! matrix level.
//!
//! A system stores a braided object (the degree-1 fiber and its Yang-Baxter
//! operator) together with one invertible gauge matrix per degree. Everything
//! else is derived: the fiber at degree n is the braid representation on the
//! n-th tensor power, charts are trivialized implicitly, and the isomorphism
//! attached to an embedding and a degree assignment is assembled from the
//! gauge at a straightened chart and transported back along the straightening
//! braid. Degenerate straightening inside derived computations retries with
//! the deterministic perturbation 1/1000 so that measure-zero inputs do not
//! fail; the public straightening entry point stays strict.

use crate::braids::{straighten, ColoredBraid, DegenerateMotion, Orientation};
use crate::cat::{BraidedObject, CatError};
use crate::cubes::{rat, LinearEmbedding};
use crate::matrix::Matrix;
use crate::perm::Permutation;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MuError {
    #[error("total degree {total} exceeds system depth {depth}")]
    DepthExceeded { total: usize, depth: usize },
    #[error("degree list has length {got}, embedding has arity {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("gauge matrix at degree {degree} is not invertible")]
    GaugeNotInvertible { degree: usize },
    #[error(transparent)]
    Degenerate(#[from] DegenerateMotion),
    #[error("braid has {got} strands, embedding has arity {expected}")]
    BraidMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error)]
pub enum ExtendError {
    #[error("vertical datum at degree {degree} must be a {expected}x{expected} matrix")]
    BadShape { degree: usize, expected: usize },
    #[error("axiom (a): vertical datum at degree {degree} is not invertible")]
    NotInvertible { degree: usize },
    #[error(
        "axiom (b): monodromy-braiding square fails for the elementary braiding at two strands, entry ({row}, {col})"
    )]
    BraidingSquare { row: usize, col: usize },
    #[error(transparent)]
    Object(#[from] CatError),
}

#[derive(Debug, Error)]
pub enum LiftError {
    #[error("degree-1 component must be {rank}x{rank}, got {rows}x{cols}")]
    RankMismatch {
        rank: usize,
        rows: usize,
        cols: usize,
    },
    #[error("source depth {source_depth} differs from target depth {target_depth}")]
    DepthMismatch {
        source_depth: usize,
        target_depth: usize,
    },
    #[error(transparent)]
    Mu(#[from] MuError),
}

/// The configuration-space model of a factorized system, truncated at
/// `depth`: a braided object plus one gauge matrix per degree.
#[derive(Clone, PartialEq)]
pub struct FactorizedSystem {
    obj: BraidedObject,
    depth: usize,
    gauge: Vec<Matrix>, // gauge[k] sits at degree k + 1
    unit: Matrix,       // 1x1 isomorphism at the trivial embedding
}

impl std::fmt::Debug for FactorizedSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FactorizedSystem(depth={}, obj={:?})", self.depth, self.obj)
    }
}

impl FactorizedSystem {
    /// The canonical system of a braided object: all gauge matrices are
    /// identities, so every isomorphism in canonical charts is the identity.
    pub fn from_object(obj: BraidedObject, depth: usize) -> Result<Self, CatError> {
        let checked = BraidedObject::new(obj.rank(), obj.braiding().clone(), obj.koszul_sign())?;
        Ok(Self::from_parts_unchecked(checked, depth, None, None))
    }

    /// Assembles a system from raw parts without certifying the Yang-Baxter
    /// equation or gauge invertibility; verification reports any defects.
    pub fn from_parts_unchecked(
        obj: BraidedObject,
        depth: usize,
        gauge: Option<Vec<Matrix>>,
        unit: Option<Matrix>,
    ) -> Self {
        let field = obj.field();
        let gauge = gauge.unwrap_or_else(|| {
            (1..=depth)
                .map(|k| Matrix::identity(obj.rank().pow(k as u32), field))
                .collect()
        });
        assert_eq!(gauge.len(), depth, "one gauge matrix per degree 1..=depth");
        let unit = unit.unwrap_or_else(|| Matrix::identity(1, field));
        FactorizedSystem {
            obj,
            depth,
            gauge,
            unit,
        }
    }

    pub fn object(&self) -> &BraidedObject {
        &self.obj
    }

    /// The degree-1 data; exact left inverse of [`FactorizedSystem::from_object`].
    pub fn rho1(&self) -> &BraidedObject {
        &self.obj
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn unit(&self) -> &Matrix {
        &self.unit
    }

    pub fn gauge_list(&self) -> &[Matrix] {
        &self.gauge
    }

    /// Gauge at a degree; degree 0 is the unit isomorphism.
    pub fn gauge(&self, degree: usize) -> &Matrix {
        if degree == 0 {
            &self.unit
        } else {
            &self.gauge[degree - 1]
        }
    }

    /// Drops gauge data above degree `d`.
    pub fn truncate(&self, d: usize) -> Result<FactorizedSystem, MuError> {
        if d > self.depth {
            return Err(MuError::DepthExceeded {
                total: d,
                depth: self.depth,
            });
        }
        Ok(FactorizedSystem {
            obj: self.obj.clone(),
            depth: d,
            gauge: self.gauge[..d].to_vec(),
            unit: self.unit.clone(),
        })
    }

    /// Vertical assembly: the isomorphism at a straightened chart whose
    /// strand degrees, read bottom to top, are `widths`.
    fn vertical_assembly(&self, widths: &[usize]) -> Result<Matrix, MuError> {
        let total: usize = widths.iter().sum();
        if total > self.depth {
            return Err(MuError::DepthExceeded {
                total,
                depth: self.depth,
            });
        }
        let field = self.obj.field();
        let mut inv_factors = Vec::with_capacity(widths.len());
        for &w in widths {
            let inv = self
                .gauge(w)
                .inverse()
                .ok_or(MuError::GaugeNotInvertible { degree: w })?;
            inv_factors.push(inv);
        }
        let refs: Vec<&Matrix> = inv_factors.iter().collect();
        let kron_inv = Matrix::kron_all(field, &refs);
        Ok(kron_inv.then(self.gauge(total)))
    }

    /// The matrix of the factorization isomorphism at `phi` with degree
    /// assignment `alpha`, in canonical trivializations.
    pub fn mu(&self, phi: &LinearEmbedding, alpha: &[usize]) -> Result<Matrix, MuError> {
        let braid = self.straighten_for_mu(phi)?;
        self.mu_along(phi, alpha, &braid)
    }

    /// Same as [`FactorizedSystem::mu`] but along a caller-provided
    /// straightening path for `phi`. Any path with the same endpoints gives
    /// the same matrix on a consistent system; this is how path independence
    /// is tested.
    pub fn mu_along(
        &self,
        phi: &LinearEmbedding,
        alpha: &[usize],
        braid: &ColoredBraid,
    ) -> Result<Matrix, MuError> {
        let n = phi.arity();
        if alpha.len() != n {
            return Err(MuError::ArityMismatch {
                expected: n,
                got: alpha.len(),
            });
        }
        if braid.strand_count() != n {
            return Err(MuError::BraidMismatch {
                expected: n,
                got: braid.strand_count(),
            });
        }
        let total: usize = alpha.iter().sum();
        if total > self.depth {
            return Err(MuError::DepthExceeded {
                total,
                depth: self.depth,
            });
        }
        // strand degrees at the straightened end, read by position
        let target_widths: Vec<usize> = braid
            .target_order()
            .images()
            .iter()
            .map(|&s| alpha[s])
            .collect();
        let assembly = self.vertical_assembly(&target_widths)?;
        let cabled = braid.cable(alpha).expect("width list matches strand count");
        let rep = self.obj.rep(total);
        let transport = rep.eval_word(cabled.word());
        let transport_back = rep.eval_word(cabled.inverse().word());
        Ok(transport.then(&assembly).then(&transport_back))
    }

    /// Straightening with the automatic deterministic fallback used inside
    /// derived computations.
    pub(crate) fn straighten_for_mu(
        &self,
        phi: &LinearEmbedding,
    ) -> Result<ColoredBraid, MuError> {
        match straighten(phi, Orientation::Ccw, None) {
            Ok(b) => Ok(b),
            Err(first) => {
                log::debug!(
                    "degenerate straightening ({}, {}); retrying with perturbation 1/1000",
                    first.i,
                    first.j
                );
                let eps = rat(1, 1000);
                straighten(phi, Orientation::Ccw, Some(&eps)).map_err(MuError::from)
            }
        }
    }

    /// Twists the system by an automorphism family: `family[k-1]` acts on the
    /// degree-k fiber. The degree-k gauge becomes
    /// `(family[0]^{-1})^{(x) k} * m_k * family[k-1]`.
    pub fn gauge_twist(&self, family: &[Matrix]) -> Result<FactorizedSystem, MuError> {
        assert_eq!(family.len(), self.depth, "one twist matrix per degree");
        let field = self.obj.field();
        let v1_inv = family[0]
            .inverse()
            .ok_or(MuError::GaugeNotInvertible { degree: 1 })?;
        let mut gauge = Vec::with_capacity(self.depth);
        for k in 1..=self.depth {
            let mut left = Matrix::identity(1, field);
            for _ in 0..k {
                left = left.kron(&v1_inv);
            }
            gauge.push(left.then(self.gauge(k)).then(&family[k - 1]));
        }
        Ok(FactorizedSystem {
            obj: self.obj.clone(),
            depth: self.depth,
            gauge,
            unit: self.unit.clone(),
        })
    }

    /// Twist by the tensor powers of a single degree-1 automorphism.
    pub fn gauge_twist_pointwise(&self, v: &Matrix) -> Result<FactorizedSystem, MuError> {
        let mut family = Vec::with_capacity(self.depth);
        let mut acc = v.clone();
        for _ in 1..=self.depth {
            family.push(acc.clone());
            acc = acc.kron(v);
        }
        self.gauge_twist(&family)
    }
}

/// Extends vertical gauge data to a full system. The preconditions checked
/// are the vertical axioms on shapes and invertibility plus the single
/// monodromy-braiding square at two strands; a datum failing that square is
/// rejected naming axiom (b).
pub fn extend_vertical_braided(
    obj: BraidedObject,
    vertical_data: Vec<Matrix>,
    depth: usize,
) -> Result<FactorizedSystem, ExtendError> {
    let checked = BraidedObject::new(obj.rank(), obj.braiding().clone(), obj.koszul_sign())?;
    assert_eq!(vertical_data.len(), depth, "one vertical datum per degree");
    for (i, m) in vertical_data.iter().enumerate() {
        let degree = i + 1;
        let expected = checked.rank().pow(degree as u32);
        if m.rows() != expected || m.cols() != expected {
            return Err(ExtendError::BadShape { degree, expected });
        }
        if m.inverse().is_none() {
            return Err(ExtendError::NotInvertible { degree });
        }
    }
    let system =
        FactorizedSystem::from_parts_unchecked(checked, depth, Some(vertical_data), None);
    if depth >= 2 {
        let assembly = system
            .vertical_assembly(&[1, 1])
            .expect("invertibility was just checked");
        let action = system.obj.generator_action();
        let lhs = action.then(&assembly);
        let rhs = assembly.then(&action);
        if let Some((row, col)) = lhs.first_difference(&rhs) {
            return Err(ExtendError::BraidingSquare { row, col });
        }
    }
    Ok(system)
}

/// A morphism of factorized systems: one matrix per degree, with the
/// degree-0 component implicitly the identity.
#[derive(Clone, Debug)]
pub struct SystemMorphism {
    pub source: FactorizedSystem,
    pub target: FactorizedSystem,
    /// components[k] maps the degree-(k+1) fiber of `source` to `target`'s
    pub components: Vec<Matrix>,
}

impl SystemMorphism {
    pub fn component(&self, degree: usize) -> &Matrix {
        &self.components[degree - 1]
    }

    pub fn depth(&self) -> usize {
        self.components.len()
    }

    pub fn truncate(&self, d: usize) -> Result<SystemMorphism, MuError> {
        Ok(SystemMorphism {
            source: self.source.truncate(d)?,
            target: self.target.truncate(d)?,
            components: self.components[..d].to_vec(),
        })
    }
}

/// Lifts a degree-1 map to all degrees through the gauge-assembled vertical
/// isomorphisms of source and target.
pub fn lift_morphism(
    f1: &Matrix,
    source: &FactorizedSystem,
    target: &FactorizedSystem,
) -> Result<SystemMorphism, LiftError> {
    let rank = source.object().rank();
    if f1.rows() != rank || f1.cols() != target.object().rank() {
        return Err(LiftError::RankMismatch {
            rank,
            rows: f1.rows(),
            cols: f1.cols(),
        });
    }
    if source.depth() != target.depth() {
        return Err(LiftError::DepthMismatch {
            source_depth: source.depth(),
            target_depth: target.depth(),
        });
    }
    let field = source.object().field();
    let mut components = Vec::with_capacity(source.depth());
    let mut power = Matrix::identity(1, field);
    for k in 1..=source.depth() {
        power = power.kron(f1);
        let src_assembly = source.vertical_assembly(&vec![1; k])?;
        let tgt_assembly = target.vertical_assembly(&vec![1; k])?;
        let src_inv = src_assembly
            .inverse()
            .ok_or(MuError::GaugeNotInvertible { degree: k })?;
        components.push(src_inv.then(&power).then(&tgt_assembly));
    }
    Ok(SystemMorphism {
        source: source.clone(),
        target: target.clone(),
        components,
    })
}

/// Reading order of slot degrees for an embedding: bottom to top by the
/// canonical slot labeling.
pub fn reading_widths(phi: &LinearEmbedding, alpha: &[usize]) -> Vec<usize> {
    phi.vertical_order()
        .images()
        .iter()
        .map(|&s| alpha[s])
        .collect()
}

/// Kronecker product of per-slot matrices in the reading order of `phi`.
pub fn reading_kron(phi: &LinearEmbedding, factors: &[Matrix]) -> Matrix {
    assert_eq!(factors.len(), phi.arity());
    let field = if factors.is_empty() {
        crate::scalar::FieldTag::Q
    } else {
        factors[0].field()
    };
    let order = phi.vertical_order();
    let ordered: Vec<&Matrix> = order.images().iter().map(|&s| &factors[s]).collect();
    Matrix::kron_all(field, &ordered)
}

/// Relabel a degree assignment through a permutation action on slots:
/// slot `i` of the permuted embedding carries the degree of slot `sigma(i)`.
pub fn permuted_alpha(alpha: &[usize], sigma: &Permutation) -> Vec<usize> {
    (0..alpha.len()).map(|i| alpha[sigma.apply(i)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cat::BraidedObject;
    use crate::cubes::Square;
    use crate::scalar::FieldTag;

    fn q() -> FieldTag {
        FieldTag::Q
    }

    fn canonical(depth: usize) -> FactorizedSystem {
        FactorizedSystem::from_object(BraidedObject::flip(2, q(), true), depth).unwrap()
    }

    fn crossing_pair() -> LinearEmbedding {
        let quarter = rat(1, 4);
        LinearEmbedding::new(vec![
            Square::new(quarter.clone(), rat(1, 8), rat(7, 16)),
            Square::new(quarter.clone(), rat(5, 8), rat(5, 16)),
        ])
    }

    #[test]
    fn rho1_round_trip() {
        let obj = BraidedObject::flip(2, q(), false);
        let sys = FactorizedSystem::from_object(obj.clone(), 3).unwrap();
        assert_eq!(sys.rho1(), &obj);
    }

    #[test]
    fn canonical_mu_is_identity_on_vertical_charts() {
        let sys = canonical(3);
        for n in 0..=3 {
            let phi = LinearEmbedding::canonical_vertical(n);
            let m = sys.mu(&phi, &vec![1; n]).unwrap();
            assert!(m.is_identity(), "degree {}", n);
        }
    }

    #[test]
    fn canonical_mu_is_identity_at_crossing_chart() {
        let sys = canonical(2);
        let m = sys.mu(&crossing_pair(), &[1, 1]).unwrap();
        assert!(m.is_identity());
    }

    #[test]
    fn gauge_insertion_at_two_strands() {
        let obj = BraidedObject::flip(2, q(), true);
        let two = q().from_i64(2);
        let gauge = vec![
            Matrix::identity(2, q()),
            Matrix::identity(4, q()).scale(&two),
        ];
        let sys = FactorizedSystem::from_parts_unchecked(obj, 2, Some(gauge), None);
        let phi = LinearEmbedding::canonical_vertical(2);
        let m = sys.mu(&phi, &[1, 1]).unwrap();
        assert_eq!(m, Matrix::identity(4, q()).scale(&two));
    }

    #[test]
    fn scalar_gauge_reaches_non_vertical_charts() {
        let obj = BraidedObject::flip(2, q(), true);
        let three = q().from_i64(3);
        let gauge = vec![
            Matrix::identity(2, q()),
            Matrix::identity(4, q()).scale(&three),
        ];
        let sys = FactorizedSystem::from_parts_unchecked(obj, 2, Some(gauge), None);
        let m = sys.mu(&crossing_pair(), &[1, 1]).unwrap();
        assert_eq!(m, Matrix::identity(4, q()).scale(&three));
    }

    #[test]
    fn mu_depth_guard() {
        let sys = canonical(2);
        let phi = LinearEmbedding::canonical_vertical(3);
        assert!(matches!(
            sys.mu(&phi, &[1, 1, 1]),
            Err(MuError::DepthExceeded { total: 3, depth: 2 })
        ));
    }

    #[test]
    fn mu_path_independence_under_relators() {
        let sys = canonical(3);
        let phi = crossing_pair();
        let base = sys.straighten_for_mu(&phi).unwrap();
        let direct = sys.mu(&phi, &[1, 1]).unwrap();
        for pad in [vec![1, -1], vec![-1, 1]] {
            let mut word = pad;
            word.extend_from_slice(base.word());
            let padded =
                ColoredBraid::new(2, word, base.source_order().clone()).unwrap();
            let via = sys.mu_along(&phi, &[1, 1], &padded).unwrap();
            assert_eq!(via, direct);
        }
    }

    #[test]
    fn extend_identity_data_gives_canonical() {
        let obj = BraidedObject::flip(2, q(), true);
        let data = vec![Matrix::identity(2, q()), Matrix::identity(4, q())];
        let sys = extend_vertical_braided(obj.clone(), data, 2).unwrap();
        assert_eq!(sys, FactorizedSystem::from_object(obj, 2).unwrap());
    }

    #[test]
    fn extend_rejects_non_commuting_gauge() {
        let obj = BraidedObject::flip(2, q(), false);
        // upper-triangular bump does not commute with the flip
        let mut m2 = Matrix::identity(4, q());
        m2.set(0, 1, q().from_i64(1));
        let data = vec![Matrix::identity(2, q()), m2];
        match extend_vertical_braided(obj, data, 2) {
            Err(ExtendError::BraidingSquare { .. }) => {}
            other => panic!("expected the braiding square to fail, got {:?}", other),
        }
    }

    #[test]
    fn extend_accepts_scalar_gauge() {
        let obj = BraidedObject::flip(2, q(), true);
        let c = q().from_i64(5);
        let data = vec![
            Matrix::identity(2, q()),
            Matrix::identity(4, q()).scale(&c),
        ];
        let sys = extend_vertical_braided(obj, data, 2).unwrap();
        let m = sys.mu(&crossing_pair(), &[1, 1]).unwrap();
        assert_eq!(m, Matrix::identity(4, q()).scale(&c));
    }

    #[test]
    fn lift_scalar_morphism_has_power_components() {
        let sys = canonical(3);
        let f1 = Matrix::identity(2, q()).scale(&q().from_i64(2));
        let m = lift_morphism(&f1, &sys, &sys).unwrap();
        for k in 1..=3 {
            let expected = Matrix::identity(1 << k, q()).scale(&q().from_i64(1 << k));
            assert_eq!(m.component(k), &expected, "degree {}", k);
        }
        let id = lift_morphism(&Matrix::identity(2, q()), &sys, &sys).unwrap();
        for k in 1..=3 {
            assert!(id.component(k).is_identity());
        }
    }

    #[test]
    fn lift_rejects_rank_mismatch() {
        let sys = canonical(2);
        let bad = Matrix::identity(3, q());
        assert!(matches!(
            lift_morphism(&bad, &sys, &sys),
            Err(LiftError::RankMismatch { .. })
        ));
    }

    #[test]
    fn truncate_commutes_with_lift() {
        let sys = canonical(3);
        let f1 = Matrix::from_i64_rows(q(), &[&[1, 1], &[0, 1]]);
        let lifted = lift_morphism(&f1, &sys, &sys).unwrap();
        let t = sys.truncate(2).unwrap();
        let lifted_then_truncated = lifted.truncate(2).unwrap();
        let truncated_then_lifted = lift_morphism(&f1, &t, &t).unwrap();
        assert_eq!(
            lifted_then_truncated.components, truncated_then_lifted.components
        );
    }

    #[test]
    fn pointwise_twist_matches_family_twist() {
        let obj = BraidedObject::flip(2, q(), true);
        // 2*id + flip: a non-scalar gauge in the commutant of the flip action
        let flip = BraidedObject::flip(2, q(), false).braiding().clone();
        let m2 = Matrix::identity(4, q()).scale(&q().from_i64(2)).add(&flip);
        let sys = FactorizedSystem::from_parts_unchecked(
            obj,
            2,
            Some(vec![Matrix::identity(2, q()), m2]),
            None,
        );
        let v = Matrix::from_i64_rows(q(), &[&[1, 2], &[1, 3]]);
        let family = vec![v.clone(), v.kron(&v)];
        assert_eq!(
            sys.gauge_twist(&family).unwrap(),
            sys.gauge_twist_pointwise(&v).unwrap()
        );
    }
}
