//! Towers of depth-truncated systems with transition isomorphisms, and the
//! explicit assembly of a full-depth system from a verified tower.

use crate::factsys::{FactorizedSystem, MuError, SystemMorphism};
use crate::matrix::Matrix;
use crate::verify::{verify_factorization, verify_morphism, Axiom, VerifyOptions, VerifyReport, Violation};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TowerError {
    #[error("tower rejected: {0}")]
    Invalid(String),
    #[error(transparent)]
    Mu(#[from] MuError),
}

/// Levels indexed by depth `0..=height`, with per-degree transition matrices
/// from the truncation of a higher level to each lower level.
#[derive(Clone, Debug)]
pub struct ProjectiveSystem {
    levels: Vec<FactorizedSystem>,
    /// `(d, e)` with `d < e` maps to one matrix per degree `1..=d`
    transitions: BTreeMap<(usize, usize), Vec<Matrix>>,
}

impl ProjectiveSystem {
    pub fn from_parts(
        levels: Vec<FactorizedSystem>,
        transitions: BTreeMap<(usize, usize), Vec<Matrix>>,
    ) -> Result<Self, String> {
        if levels.is_empty() {
            return Err("a tower needs at least the depth-0 level".into());
        }
        for (d, level) in levels.iter().enumerate() {
            if level.depth() != d {
                return Err(format!("level {d} has depth {}", level.depth()));
            }
        }
        let height = levels.len() - 1;
        for (&(d, e), mats) in &transitions {
            if d >= e || e > height {
                return Err(format!("invalid transition indices ({d}, {e})"));
            }
            if mats.len() != d {
                return Err(format!(
                    "transition ({d}, {e}) needs one matrix per degree 1..={d}, got {}",
                    mats.len()
                ));
            }
        }
        Ok(ProjectiveSystem {
            levels,
            transitions,
        })
    }

    /// The tower of truncations of a single system; all transitions are
    /// identities.
    pub fn tower_of(system: &FactorizedSystem) -> Self {
        let height = system.depth();
        let levels: Vec<FactorizedSystem> = (0..=height)
            .map(|d| system.truncate(d).expect("d <= depth"))
            .collect();
        let rank = system.object().rank();
        let field = system.object().field();
        let mut transitions = BTreeMap::new();
        for d in 0..=height {
            for e in (d + 1)..=height {
                let mats = (1..=d)
                    .map(|k| Matrix::identity(rank.pow(k as u32), field))
                    .collect();
                transitions.insert((d, e), mats);
            }
        }
        ProjectiveSystem {
            levels,
            transitions,
        }
    }

    pub fn height(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[FactorizedSystem] {
        &self.levels
    }

    pub fn level(&self, d: usize) -> &FactorizedSystem {
        &self.levels[d]
    }

    pub fn transition_entries(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<Matrix>)> {
        self.transitions.iter()
    }

    /// Per-degree matrices of the transition from level `e` truncated to `d`;
    /// the diagonal is the identity family.
    pub fn transition(&self, d: usize, e: usize) -> Option<Vec<Matrix>> {
        if d == e {
            let rank = self.levels[0].object().rank();
            let field = self.levels[0].object().field();
            return Some(
                (1..=d)
                    .map(|k| Matrix::identity(rank.pow(k as u32), field))
                    .collect(),
            );
        }
        self.transitions.get(&(d, e)).cloned()
    }

    fn transition_morphism(&self, d: usize, e: usize) -> Result<SystemMorphism, TowerError> {
        let mats = self
            .transition(d, e)
            .ok_or_else(|| TowerError::Invalid(format!("missing transition ({d}, {e})")))?;
        Ok(SystemMorphism {
            source: self.levels[e].truncate(d)?,
            target: self.levels[d].clone(),
            components: mats,
        })
    }
}

/// Checks the tower invariants: each level passes factorization verification
/// at its own depth, transitions are invertible morphisms of truncations, and
/// the cocycle identity holds exactly.
pub fn verify_tower(tower: &ProjectiveSystem, opts: &VerifyOptions) -> VerifyReport {
    let height = tower.height();
    let mut checks_run = 0;

    let fail = |violations: Vec<Violation>, checks_run: usize| VerifyReport {
        ok: false,
        violations,
        seed: opts.seed,
        checks_run,
    };

    for d in 0..=height {
        let level_opts = VerifyOptions {
            depth_cap: d,
            seed: opts.seed,
            mode: opts.mode,
        };
        let report = verify_factorization(tower.level(d), &level_opts);
        checks_run += report.checks_run;
        if !report.ok {
            let mut violations = report.violations;
            for v in &mut violations {
                v.note = format!("level {d}: {}", v.note);
            }
            return fail(violations, checks_run);
        }
    }

    for d in 0..=height {
        for e in (d + 1)..=height {
            let morphism = match tower.transition_morphism(d, e) {
                Ok(m) => m,
                Err(err) => {
                    return fail(
                        vec![structural(format!("transition ({d}, {e}): {err}"))],
                        checks_run,
                    )
                }
            };
            for (k, mat) in morphism.components.iter().enumerate() {
                if mat.inverse().is_none() {
                    return fail(
                        vec![structural(format!(
                            "transition ({d}, {e}) is singular at degree {}",
                            k + 1
                        ))],
                        checks_run,
                    );
                }
            }
            let report = verify_morphism(&morphism, &VerifyOptions {
                depth_cap: d,
                seed: opts.seed,
                mode: opts.mode,
            });
            checks_run += report.checks_run;
            if !report.ok {
                let mut violations = report.violations;
                for v in &mut violations {
                    v.note = format!("transition ({d}, {e}): {}", v.note);
                }
                return fail(violations, checks_run);
            }
        }
    }

    // cocycle: transition(d,f) = transition(e,f) truncated, then transition(d,e)
    for d in 0..=height {
        for e in d..=height {
            for f in e..=height {
                let (Some(de), Some(ef), Some(df)) = (
                    tower.transition(d, e),
                    tower.transition(e, f),
                    tower.transition(d, f),
                ) else {
                    return fail(vec![structural("missing transition".into())], checks_run);
                };
                checks_run += d;
                for k in 1..=d {
                    let lhs = ef[k - 1].then(&de[k - 1]);
                    if lhs != df[k - 1] {
                        return fail(
                            vec![structural(format!(
                                "cocycle fails for ({d}, {e}, {f}) at degree {k}"
                            ))],
                            checks_run,
                        );
                    }
                }
            }
        }
    }

    VerifyReport {
        ok: true,
        violations: vec![],
        seed: opts.seed,
        checks_run,
    }
}

fn structural(note: String) -> Violation {
    Violation {
        axiom: Axiom::A,
        degree: 0,
        embedding: None,
        braid: None,
        entry: None,
        lhs: None,
        rhs: None,
        note,
    }
}

/// Assembles the depth-`height` system whose degree-d data are the top-degree
/// data of level d, with gauge corrected through the degree-1 restrictions of
/// the transitions. Rejects towers that fail [`verify_tower`].
pub fn assemble(tower: &ProjectiveSystem, opts: &VerifyOptions) -> Result<FactorizedSystem, TowerError> {
    let report = verify_tower(tower, opts);
    if !report.ok {
        return Err(TowerError::Invalid(
            report
                .violations
                .first()
                .map(|v| v.note.clone())
                .unwrap_or_else(|| "verification failed".into()),
        ));
    }
    let height = tower.height();
    if height == 0 {
        return Ok(tower.level(0).clone());
    }
    let base = tower.level(1);
    let field = base.object().field();
    let m1 = base.gauge(1).clone();
    let mut gauge = vec![m1.clone()];
    for k in 2..=height {
        let level = tower.level(k);
        // top-degree assembly of level k
        let mut inv_factors = Vec::with_capacity(k);
        for _ in 0..k {
            inv_factors.push(
                level
                    .gauge(1)
                    .inverse()
                    .ok_or_else(|| TowerError::Invalid("singular degree-1 gauge".into()))?,
            );
        }
        let refs: Vec<&Matrix> = inv_factors.iter().collect();
        let top_assembly = Matrix::kron_all(field, &refs).then(level.gauge(k));
        // degree-1 restriction of the transition from level k to level 1
        let t1 = tower
            .transition(1, k)
            .and_then(|m| m.into_iter().next())
            .ok_or_else(|| TowerError::Invalid(format!("missing transition (1, {k})")))?;
        let t1_inv = t1
            .inverse()
            .ok_or_else(|| TowerError::Invalid("singular transition".into()))?;
        let corrected = m1.then(&t1_inv);
        let mut left = Matrix::identity(1, field);
        for _ in 0..k {
            left = left.kron(&corrected);
        }
        gauge.push(left.then(&top_assembly));
    }
    Ok(FactorizedSystem::from_parts_unchecked(
        base.object().clone(),
        height,
        Some(gauge),
        Some(tower.level(0).unit().clone()),
    ))
}

/// Checks that per-level morphisms commute with the transitions of both
/// towers, degree by degree.
pub fn morphism_of_towers(
    source: &ProjectiveSystem,
    target: &ProjectiveSystem,
    components: &[SystemMorphism],
) -> Result<(), TowerError> {
    let height = source.height();
    if target.height() != height || components.len() != height + 1 {
        return Err(TowerError::Invalid(
            "towers and component list must share one height".into(),
        ));
    }
    for (d, comp) in components.iter().enumerate() {
        if comp.depth() != d {
            return Err(TowerError::Invalid(format!(
                "component at level {d} must have depth {d}"
            )));
        }
    }
    for d in 0..=height {
        for e in d..=height {
            let src = source
                .transition(d, e)
                .ok_or_else(|| TowerError::Invalid(format!("missing source transition ({d}, {e})")))?;
            let tgt = target
                .transition(d, e)
                .ok_or_else(|| TowerError::Invalid(format!("missing target transition ({d}, {e})")))?;
            for k in 1..=d {
                let lhs = components[e].component(k).then(&tgt[k - 1]);
                let rhs = src[k - 1].then(components[d].component(k));
                if lhs != rhs {
                    return Err(TowerError::Invalid(format!(
                        "tower morphism square fails for ({d}, {e}) at degree {k}"
                    )));
                }
            }
        }
    }
    Ok(())
}
