//! The factorization-axiom verifier.
//!
//! The axioms quantify over a continuum of embeddings and paths; the verifier
//! instead runs exact matrix identities over a fixed deterministic family:
//! the canonical stacked embeddings at every arity, their permutations at
//! small arity, one seeded pseudo-random non-vertical embedding per arity,
//! and two-level nested compositions. Checks are grouped (a), (b), (c) and
//! run in that order; the report carries the first violated identity.
//!
//! Check (a) compares an isomorphism computed at a composite chart against
//! the assembly from its pieces, which routes the two sides through different
//! straightening braids and different gauge insertions. Check (b) covers the
//! braid relations of the representation (the decidable form of homotopy
//! invariance), the elementary-braiding squares between adjacent vertical
//! charts, and the invariance of derived isomorphisms under relator-padded
//! straightening paths. Check (c) compares each chart against its permuted
//! relabelings.

use crate::braids::{straighten, ColoredBraid, Orientation};
use crate::cat::BraidedObject;
use crate::cubes::{rat, LinearEmbedding, Square};
use crate::factsys::{permuted_alpha, reading_kron, FactorizedSystem, MuError, SystemMorphism};
use crate::io::embedding_to_value;
use crate::matrix::Matrix;
use crate::par::{run_indexed, ExecMode};
use crate::perm::Permutation;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// Which defining condition a violation is attributed to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    /// compatibility with operadic composition
    A,
    /// monodromy-braiding compatibility
    B,
    /// symmetric equivariance
    C,
    /// the defining square of a system morphism
    Morphism,
}

impl Axiom {
    pub fn label(&self) -> &'static str {
        match self {
            Axiom::A => "a",
            Axiom::B => "b",
            Axiom::C => "c",
            Axiom::Morphism => "morphism",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub axiom: Axiom,
    pub degree: usize,
    pub embedding: Option<Value>,
    pub braid: Option<Vec<i32>>,
    pub entry: Option<(usize, usize)>,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub note: String,
}

impl Violation {
    pub fn to_value(&self) -> Value {
        json!({
            "axiom": self.axiom.label(),
            "degree": self.degree,
            "embedding": self.embedding,
            "braid": self.braid,
            "entry": self.entry.map(|(r, c)| json!([r, c])),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "note": self.note,
        })
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    pub seed: u64,
    pub checks_run: usize,
}

impl VerifyReport {
    pub fn to_value(&self) -> Value {
        json!({
            "status": if self.ok { "ok" } else { "violation" },
            "seed": self.seed,
            "checks": self.checks_run,
            "violations": self.violations.iter().map(Violation::to_value).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub depth_cap: usize,
    pub seed: u64,
    pub mode: ExecMode,
}

impl VerifyOptions {
    pub fn new(depth_cap: usize) -> Self {
        VerifyOptions {
            depth_cap,
            seed: 0,
            mode: ExecMode::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_mode(mut self, mode: ExecMode) -> Self {
        self.mode = mode;
        self
    }
}

/// Provider of derived factorization isomorphisms. Systems implement this;
/// tests may wrap a system to emulate corrupted stored data.
pub trait MuSource: Send + Sync {
    fn object(&self) -> &BraidedObject;
    fn depth(&self) -> usize;
    fn mu(&self, phi: &LinearEmbedding, alpha: &[usize]) -> Result<Matrix, MuError>;
    fn mu_along(
        &self,
        phi: &LinearEmbedding,
        alpha: &[usize],
        braid: &ColoredBraid,
    ) -> Result<Matrix, MuError>;
    /// Structural defects that preclude running the identity checks.
    fn precheck(&self) -> Option<Violation> {
        None
    }
}

impl MuSource for FactorizedSystem {
    fn object(&self) -> &BraidedObject {
        self.object()
    }

    fn depth(&self) -> usize {
        self.depth()
    }

    fn mu(&self, phi: &LinearEmbedding, alpha: &[usize]) -> Result<Matrix, MuError> {
        FactorizedSystem::mu(self, phi, alpha)
    }

    fn mu_along(
        &self,
        phi: &LinearEmbedding,
        alpha: &[usize],
        braid: &ColoredBraid,
    ) -> Result<Matrix, MuError> {
        FactorizedSystem::mu_along(self, phi, alpha, braid)
    }

    fn precheck(&self) -> Option<Violation> {
        if self.object().generator_action().inverse().is_none() {
            return Some(Violation {
                axiom: Axiom::B,
                degree: 2,
                embedding: None,
                braid: None,
                entry: None,
                lhs: None,
                rhs: None,
                note: "braiding matrix is not invertible".into(),
            });
        }
        for k in 1..=self.depth() {
            let m = self.gauge(k);
            let expected = self.object().rank().pow(k as u32);
            if m.rows() != expected || m.cols() != expected || m.inverse().is_none() {
                return Some(Violation {
                    axiom: Axiom::A,
                    degree: k,
                    embedding: None,
                    braid: None,
                    entry: None,
                    lhs: None,
                    rhs: None,
                    note: format!("gauge at degree {k} is not an invertible {expected}x{expected} matrix"),
                });
            }
        }
        if self.unit().rows() != 1 || self.unit().cols() != 1 || self.unit().inverse().is_none() {
            return Some(Violation {
                axiom: Axiom::A,
                degree: 0,
                embedding: None,
                braid: None,
                entry: None,
                lhs: None,
                rhs: None,
                note: "unit isomorphism must be an invertible 1x1 matrix".into(),
            });
        }
        None
    }
}

/// A deterministic non-vertical embedding with at least one straightening
/// crossing: shuffled horizontal bands with jittered heights around 1/2.
pub fn generic_nonvertical(n: usize, seed: u64) -> LinearEmbedding {
    assert!(n >= 2, "a generic non-vertical embedding needs arity >= 2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E3779B97F4A7C15));
    let scale = rat(1, 4 * (n as i64 + 1));
    let half = &scale / rat(2, 1);
    loop {
        let mut bands: Vec<i64> = (0..n as i64).collect();
        bands.shuffle(&mut rng);
        let squares: Vec<Square> = (0..n)
            .map(|i| {
                let xc = rat(2 * bands[i] + 1, 2 * (n as i64 + 1));
                let delta: i64 = rng.gen_range(-1..=1);
                let yc = rat(1, 2) + rat(delta, 1) * &half;
                Square::new(scale.clone(), xc - &half, yc - &half)
            })
            .collect();
        let e = LinearEmbedding::new(squares);
        if e.validate().is_ok() && !e.is_vertical() {
            if let Ok(b) = straighten(&e, Orientation::Ccw, None) {
                if !b.word().is_empty() {
                    return e;
                }
            }
        }
    }
}

struct Job<'a> {
    run: Box<dyn Fn() -> Option<Violation> + Send + Sync + 'a>,
}

fn violation_from_error(axiom: Axiom, degree: usize, embedding: Option<&LinearEmbedding>, err: &MuError) -> Violation {
    Violation {
        axiom,
        degree,
        embedding: embedding.map(embedding_to_value),
        braid: None,
        entry: None,
        lhs: None,
        rhs: None,
        note: err.to_string(),
    }
}

#[allow(clippy::too_many_arguments)]
fn compare(
    axiom: Axiom,
    degree: usize,
    embedding: Option<&LinearEmbedding>,
    braid: Option<&[i32]>,
    note: &str,
    lhs: &Matrix,
    rhs: &Matrix,
) -> Option<Violation> {
    let entry = lhs.first_difference(rhs)?;
    let in_range = entry.0 < lhs.rows() && entry.1 < lhs.cols() && entry.0 < rhs.rows() && entry.1 < rhs.cols();
    Some(Violation {
        axiom,
        degree,
        embedding: embedding.map(embedding_to_value),
        braid: braid.map(|w| w.to_vec()),
        entry: Some(entry),
        lhs: in_range.then(|| lhs.at(entry.0, entry.1).to_string()),
        rhs: in_range.then(|| rhs.at(entry.0, entry.1).to_string()),
        note: note.to_string(),
    })
}

/// Degree assignments exercised at a chart of arity `n` within `cap`.
fn alpha_variants(n: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n <= cap {
        out.push(vec![1; n]);
    }
    if n >= 1 && n + 1 <= cap {
        let mut grouped = vec![1; n];
        grouped[0] = 2;
        out.push(grouped);
    }
    if n >= 2 && n - 1 <= cap {
        let mut with_zero = vec![1; n];
        with_zero[0] = 0;
        out.push(with_zero);
    }
    out
}

/// Runs the axiom checks against a provider; see the module docs for the
/// family and the grouping.
pub fn verify_factorization<S: MuSource + ?Sized>(source: &S, opts: &VerifyOptions) -> VerifyReport {
    let cap = opts.depth_cap.min(source.depth());
    let mut checks_run = 0;

    if let Some(v) = source.precheck() {
        return VerifyReport {
            ok: false,
            violations: vec![v],
            seed: opts.seed,
            checks_run,
        };
    }

    let canonical: Vec<LinearEmbedding> = (0..=cap).map(LinearEmbedding::canonical_vertical).collect();
    let generic: Vec<Option<LinearEmbedding>> = (0..=cap)
        .map(|n| (n >= 2).then(|| generic_nonvertical(n, opts.seed)))
        .collect();

    let mut jobs: Vec<Job> = Vec::new();

    // ---- axiom (a): compatibility with operadic composition ------------
    let trivial = LinearEmbedding::trivial();
    let identity = LinearEmbedding::identity();
    let mut composites: Vec<(LinearEmbedding, Vec<LinearEmbedding>)> = Vec::new();
    if cap >= 2 {
        composites.push((canonical[1].clone(), vec![canonical[2].clone()]));
        composites.push((canonical[2].clone(), vec![canonical[1].clone(), canonical[1].clone()]));
        composites.push((canonical[2].clone(), vec![identity.clone(), trivial.clone()]));
        if let Some(g2) = &generic[2] {
            composites.push((canonical[1].clone(), vec![g2.clone()]));
            composites.push((canonical[2].clone(), vec![g2.clone(), trivial.clone()]));
        }
    }
    if cap >= 3 {
        let swap = Permutation::from_images(vec![1, 0]).unwrap();
        if let Some(g2) = &generic[2] {
            composites.push((canonical[2].clone(), vec![g2.clone(), canonical[1].clone()]));
            composites.push((canonical[2].act_permutation(&swap), vec![canonical[1].clone(), g2.clone()]));
        }
        composites.push((canonical[2].clone(), vec![canonical[1].clone(), canonical[2].clone()]));
        composites.push((
            canonical[3].clone(),
            vec![canonical[1].clone(), trivial.clone(), canonical[2].clone()],
        ));
    }

    for (outer, inners) in composites {
        let widths: Vec<usize> = inners.iter().map(|e| e.arity()).collect();
        let m: usize = widths.iter().sum();
        for theta in alpha_variants(m, cap) {
            let outer = outer.clone();
            let inners = inners.clone();
            let widths = widths.clone();
            jobs.push(Job {
                run: Box::new(move || {
                    let eta = outer.compose(&inners).expect("catalogue arities match");
                    let total: usize = theta.iter().sum();
                    let lhs = match source.mu(&eta, &theta) {
                        Ok(m) => m,
                        Err(e) => return Some(violation_from_error(Axiom::A, total, Some(&eta), &e)),
                    };
                    let mut offset = 0;
                    let mut block_sums = Vec::with_capacity(widths.len());
                    let mut inner_mats = Vec::with_capacity(widths.len());
                    for (l, w) in widths.iter().enumerate() {
                        let beta = &theta[offset..offset + w];
                        offset += w;
                        block_sums.push(beta.iter().sum::<usize>());
                        match source.mu(&inners[l], beta) {
                            Ok(m) => inner_mats.push(m),
                            Err(e) => {
                                return Some(violation_from_error(Axiom::A, total, Some(&inners[l]), &e))
                            }
                        }
                    }
                    let mu_outer = match source.mu(&outer, &block_sums) {
                        Ok(m) => m,
                        Err(e) => return Some(violation_from_error(Axiom::A, total, Some(&outer), &e)),
                    };
                    let rhs = reading_kron(&outer, &inner_mats).then(&mu_outer);
                    compare(
                        Axiom::A,
                        total,
                        Some(&eta),
                        None,
                        "composite chart disagrees with the assembly from its pieces",
                        &lhs,
                        &rhs,
                    )
                }),
            });
        }
    }

    // ---- axiom (b): monodromy-braiding compatibility --------------------
    // braid relations: the decidable form of homotopy invariance
    for m in 2..=cap {
        let rep_obj = source.object().clone();
        for l in 1..m {
            if l + 1 < m {
                let obj = rep_obj.clone();
                jobs.push(Job {
                    run: Box::new(move || {
                        let rep = obj.rep(m);
                        let lhs = rep.eval_word(&[l as i32, (l + 1) as i32, l as i32]);
                        let rhs = rep.eval_word(&[(l + 1) as i32, l as i32, (l + 1) as i32]);
                        compare(
                            Axiom::B,
                            m,
                            None,
                            Some(&[l as i32, (l + 1) as i32, l as i32]),
                            "adjacent braid relation fails",
                            &lhs,
                            &rhs,
                        )
                    }),
                });
            }
            for k in (l + 2)..m {
                let obj = rep_obj.clone();
                jobs.push(Job {
                    run: Box::new(move || {
                        let rep = obj.rep(m);
                        let lhs = rep.eval_word(&[l as i32, k as i32]);
                        let rhs = rep.eval_word(&[k as i32, l as i32]);
                        compare(
                            Axiom::B,
                            m,
                            None,
                            Some(&[l as i32, k as i32]),
                            "distant generators fail to commute",
                            &lhs,
                            &rhs,
                        )
                    }),
                });
            }
        }
    }

    // elementary-braiding squares between adjacent vertical charts
    let mut elementary_cases: Vec<(LinearEmbedding, usize)> = Vec::new();
    if cap >= 2 {
        elementary_cases.push((canonical[2].clone(), 1));
    }
    if cap >= 3 {
        elementary_cases.push((canonical[3].clone(), 1));
        elementary_cases.push((canonical[3].clone(), 2));
    }
    for (phi, l) in elementary_cases {
        let n = phi.arity();
        for alpha in alpha_variants(n, cap) {
            let phi = phi.clone();
            jobs.push(Job {
                run: Box::new(move || {
                    let total: usize = alpha.iter().sum();
                    let gamma = ColoredBraid::elementary(n, l, Permutation::identity(n))
                        .expect("catalogue generators in range");
                    let transposition = Permutation::adjacent_transposition(n, l - 1);
                    let psi = phi.act_permutation(&transposition);
                    let mu_phi = match source.mu(&phi, &alpha) {
                        Ok(m) => m,
                        Err(e) => return Some(violation_from_error(Axiom::B, total, Some(&phi), &e)),
                    };
                    let mu_psi = match source.mu(&psi, &alpha) {
                        Ok(m) => m,
                        Err(e) => return Some(violation_from_error(Axiom::B, total, Some(&psi), &e)),
                    };
                    let cabled = gamma.cable(&alpha).expect("widths match strands");
                    let rep = source.object().rep(total);
                    let transport = rep.eval_word(cabled.word());
                    let lhs = transport.then(&mu_psi);
                    let rhs = mu_phi.then(&transport);
                    compare(
                        Axiom::B,
                        total,
                        Some(&phi),
                        Some(cabled.word()),
                        "elementary braiding square fails between adjacent vertical charts",
                        &lhs,
                        &rhs,
                    )
                }),
            });
        }
    }

    // straightening-path independence under relator padding
    for n in 2..=cap {
        let Some(g) = generic[n].clone() else { continue };
        for alpha in alpha_variants(n, cap) {
            for l in 1..n {
                let g = g.clone();
                let alpha = alpha.clone();
                jobs.push(Job {
                    run: Box::new(move || {
                        let total: usize = alpha.iter().sum();
                        let base = match straighten(&g, Orientation::Ccw, None) {
                            Ok(b) => b,
                            Err(e) => {
                                return Some(violation_from_error(
                                    Axiom::B,
                                    total,
                                    Some(&g),
                                    &MuError::from(e),
                                ))
                            }
                        };
                        let direct = match source.mu(&g, &alpha) {
                            Ok(m) => m,
                            Err(e) => return Some(violation_from_error(Axiom::B, total, Some(&g), &e)),
                        };
                        let mut word = vec![l as i32, -(l as i32)];
                        word.extend_from_slice(base.word());
                        word.push(-(l as i32));
                        word.push(l as i32);
                        let padded = ColoredBraid::new(n, word, base.source_order().clone())
                            .expect("padded word stays in range");
                        let via = match source.mu_along(&g, &alpha, &padded) {
                            Ok(m) => m,
                            Err(e) => return Some(violation_from_error(Axiom::B, total, Some(&g), &e)),
                        };
                        compare(
                            Axiom::B,
                            total,
                            Some(&g),
                            Some(padded.word()),
                            "derived isomorphism depends on the straightening path",
                            &direct,
                            &via,
                        )
                    }),
                });
            }
        }
    }

    // ---- axiom (c): symmetric equivariance ------------------------------
    for n in 2..=cap.min(3) {
        let mut charts: Vec<LinearEmbedding> = vec![canonical[n].clone()];
        if let Some(g) = &generic[n] {
            charts.push(g.clone());
        }
        for phi in charts {
            for sigma in Permutation::all(n) {
                if sigma.is_identity() {
                    continue;
                }
                for alpha in alpha_variants(n, cap) {
                    let phi = phi.clone();
                    let sigma = sigma.clone();
                    jobs.push(Job {
                        run: Box::new(move || {
                            let total: usize = alpha.iter().sum();
                            let permuted = phi.act_permutation(&sigma);
                            let relabeled = permuted_alpha(&alpha, &sigma);
                            let lhs = match source.mu(&permuted, &relabeled) {
                                Ok(m) => m,
                                Err(e) => {
                                    return Some(violation_from_error(Axiom::C, total, Some(&permuted), &e))
                                }
                            };
                            let rhs = match source.mu(&phi, &alpha) {
                                Ok(m) => m,
                                Err(e) => return Some(violation_from_error(Axiom::C, total, Some(&phi), &e)),
                            };
                            compare(
                                Axiom::C,
                                total,
                                Some(&permuted),
                                None,
                                "permuted chart disagrees with its relabeling",
                                &lhs,
                                &rhs,
                            )
                        }),
                    });
                }
            }
        }
    }

    checks_run = jobs.len();
    let results = run_indexed(jobs.len(), opts.mode, |i| (jobs[i].run)());
    let violations: Vec<Violation> = results.into_iter().flatten().take(1).collect();
    VerifyReport {
        ok: violations.is_empty(),
        violations,
        seed: opts.seed,
        checks_run,
    }
}

/// Checks the defining squares of a system morphism over the same chart
/// family as [`verify_factorization`].
pub fn verify_morphism(morphism: &SystemMorphism, opts: &VerifyOptions) -> VerifyReport {
    let cap = opts
        .depth_cap
        .min(morphism.depth())
        .min(morphism.source.depth())
        .min(morphism.target.depth());
    let field = morphism.source.object().field();

    let mut charts: Vec<LinearEmbedding> = (0..=cap).map(LinearEmbedding::canonical_vertical).collect();
    for n in 2..=cap {
        charts.push(generic_nonvertical(n, opts.seed));
    }
    for n in 2..=cap.min(3) {
        for sigma in Permutation::all(n) {
            if !sigma.is_identity() {
                charts.push(LinearEmbedding::canonical_vertical(n).act_permutation(&sigma));
            }
        }
    }

    let component = |degree: usize| -> Matrix {
        if degree == 0 {
            Matrix::identity(1, field)
        } else {
            morphism.component(degree).clone()
        }
    };

    let mut jobs: Vec<Job> = Vec::new();
    for phi in charts {
        let n = phi.arity();
        for alpha in alpha_variants(n, cap) {
            let phi = phi.clone();
            let component = &component;
            let morphism = &morphism;
            jobs.push(Job {
                run: Box::new(move || {
                    let total: usize = alpha.iter().sum();
                    let mu_src = match morphism.source.mu(&phi, &alpha) {
                        Ok(m) => m,
                        Err(e) => {
                            return Some(violation_from_error(Axiom::Morphism, total, Some(&phi), &e))
                        }
                    };
                    let mu_tgt = match morphism.target.mu(&phi, &alpha) {
                        Ok(m) => m,
                        Err(e) => {
                            return Some(violation_from_error(Axiom::Morphism, total, Some(&phi), &e))
                        }
                    };
                    let factors: Vec<Matrix> = alpha.iter().map(|&a| component(a)).collect();
                    let lhs = mu_src.then(&component(total));
                    let rhs = reading_kron(&phi, &factors).then(&mu_tgt);
                    compare(
                        Axiom::Morphism,
                        total,
                        Some(&phi),
                        None,
                        "morphism square fails",
                        &lhs,
                        &rhs,
                    )
                }),
            });
        }
    }

    let checks_run = jobs.len();
    let results = run_indexed(jobs.len(), opts.mode, |i| (jobs[i].run)());
    let violations: Vec<Violation> = results.into_iter().flatten().take(1).collect();
    VerifyReport {
        ok: violations.is_empty(),
        violations,
        seed: opts.seed,
        checks_run,
    }
}
