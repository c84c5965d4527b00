//! Classification pipeline and deformation verification.
//!
//! `classify` assembles the cocycle system, solves it exactly, subtracts the
//! coboundary image, and emits representatives spanning a complement; the
//! quotient dimension is computed as dim(cocycles) - dim(coboundaries),
//! never by counting chosen vectors. Every representative is then fed back
//! through `verify_deformation`, which substitutes the numeric values into
//! the deformed commutator identities, the D-derivative property, and
//! skew-symmetry, all exactly.

use crate::algebra::{validate_algebra, AlgebraError, AlgebraSpec};
use crate::coboundary::{coboundary_image, CoboundaryError};
use crate::cocycle::{assemble_system, commutator_residual_on, mode_window, self_skew_rows};
use crate::deform::{DefEngine, DefTable};
use crate::linalg::{complement_basis, quotient_dim, LinalgError};
use crate::pbw::GeneratorId;
use crate::scalar::BaseScalar;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("algebra validation failed: {0}")]
    ValidationFailure(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Coboundary(#[from] CoboundaryError),
    #[error("internal invariant breach: {0}")]
    Internal(String),
}

impl From<LinalgError> for ClassifyError {
    fn from(e: LinalgError) -> Self {
        // a coboundary outside the cocycle space is an engine bug
        ClassifyError::Internal(e.to_string())
    }
}

/// One emitted deformation representative: exact values for every unknown.
#[derive(Clone, Debug)]
pub struct Representative {
    pub assignment: Vec<BaseScalar>,
}

#[derive(Clone, Debug)]
pub struct CohomologyResult {
    pub dim_h2: usize,
    pub cocycle_dim: usize,
    pub coboundary_dim: usize,
    pub representatives: Vec<Representative>,
    pub diagnostics: Vec<String>,
}

/// Options for `classify`.
#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    /// parallelism hint for constraint generation
    pub jobs: usize,
    /// verification cap override (default: max pair weight + 2)
    pub verify_cap: Option<u32>,
    /// skip the per-representative verification pass
    pub skip_verify: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            jobs: 1,
            verify_cap: None,
            skip_verify: false,
        }
    }
}

pub fn classify(spec: &AlgebraSpec) -> Result<CohomologyResult, ClassifyError> {
    classify_with(spec, &ClassifyOptions::default())
}

pub fn classify_with(
    spec: &AlgebraSpec,
    opts: &ClassifyOptions,
) -> Result<CohomologyResult, ClassifyError> {
    let report = validate_algebra(spec, crate::algebra::default_validation_cap(spec))?;
    if !report.is_clean() {
        return Err(ClassifyError::ValidationFailure(
            report
                .violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    let mut diagnostics = Vec::new();
    let sys = assemble_system(spec, opts.jobs)?;
    let cocycles = sys.nullspace();
    let table = DefTable::new(spec);
    let coboundaries = coboundary_image(spec, &table)?;
    for v in &coboundaries {
        if !sys.annihilated_by(v) {
            return Err(ClassifyError::Internal(
                "coboundary vector violates a cocycle row".into(),
            ));
        }
    }
    let ncols = table.unknowns.count();
    let dim_h2 = quotient_dim(&cocycles, &coboundaries, ncols)?;
    let reps = complement_basis(&cocycles, &coboundaries, ncols);
    if reps.len() != dim_h2 {
        return Err(ClassifyError::Internal(format!(
            "complement basis size {} does not match quotient dimension {}",
            reps.len(),
            dim_h2
        )));
    }
    diagnostics.push(format!(
        "system: {} rows, {} unknowns, max poly degree {}",
        sys.rows.len(),
        ncols,
        sys.matrix().max_degree()
    ));
    let representatives: Vec<Representative> = reps
        .into_iter()
        .map(|assignment| Representative { assignment })
        .collect();
    if !opts.skip_verify {
        let cap = opts.verify_cap.unwrap_or_else(|| max_pair_weight(spec) + 2);
        for (t, rep) in representatives.iter().enumerate() {
            let vr = verify_deformation(spec, &rep.assignment, cap)?;
            if vr.is_clean() {
                diagnostics.push(format!(
                    "representative {t}: verified against the deformed identities at cap {cap}"
                ));
            } else {
                return Err(ClassifyError::Internal(format!(
                    "representative {t} fails verification: {}",
                    vr.entries.join("; ")
                )));
            }
        }
    }
    Ok(CohomologyResult {
        dim_h2,
        cocycle_dim: cocycles.len(),
        coboundary_dim: coboundaries.len(),
        representatives,
        diagnostics,
    })
}

pub fn max_pair_weight(spec: &AlgebraSpec) -> u32 {
    let r = spec.rank() as u16;
    let mut m = 0;
    for i in 0..r {
        for j in i..r {
            m = m.max(spec.weight_of(GeneratorId(i)) + spec.weight_of(GeneratorId(j)));
        }
    }
    m
}

/// Report of a verification run; entries name the violated identities.
#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub entries: Vec<String>,
    pub checks: usize,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Checks a numeric unknown assignment against the deformed structure:
/// self-skew rows, the D-derivative identity on generator pairs, and the
/// deformed commutator identity sampled over generator actors, PBW targets
/// of weight <= cap (length <= 2, plus all generators), and the
/// grading-nontrivial mode window extended two slots into the negatives.
pub fn verify_deformation(
    spec: &AlgebraSpec,
    assignment: &[BaseScalar],
    cap: u32,
) -> Result<VerifyReport, ClassifyError> {
    let table = DefTable::new(spec);
    if assignment.len() != table.unknowns.count() {
        return Err(ClassifyError::Internal(format!(
            "assignment length {} does not match unknown count {}",
            assignment.len(),
            table.unknowns.count()
        )));
    }
    let def = DefEngine::new(&table);
    let mut report = VerifyReport::default();
    let r = spec.rank() as u16;
    // skew self-consistency rows at the assignment
    for i in 0..r {
        for (origin, residual) in self_skew_rows(&def, GeneratorId(i))? {
            report.checks += 1;
            if !residual.substitute(assignment).is_zero() {
                report.entries.push(origin);
            }
        }
    }
    // D-derivative identity on generator pairs across all slots
    for i in 0..r {
        for j in 0..r {
            let (gi, gj) = (GeneratorId(i), GeneratorId(j));
            let target = spec.gen_state(gj);
            let dv = def.eng.translate(&target)?;
            let top = (spec.weight_of(gi) + spec.weight_of(gj)) as i64;
            for m in -2..=top {
                let lhs = {
                    let a = def.def_gen_mode(gi, m, &target)?;
                    let mut d = def.eng.translate(&a)?;
                    let b = def.def_gen_mode(gi, m, &dv)?;
                    d.sub_state(&b);
                    d
                };
                let rhs = def
                    .def_gen_mode(gi, m - 1, &target)?
                    .scale(&BaseScalar::from_int(-m));
                let mut diff = lhs;
                diff.sub_state(&rhs);
                report.checks += 1;
                if !diff.substitute(assignment).is_zero() {
                    report
                        .entries
                        .push(format!("d-derivative(i={i}, j={j}, m={m})"));
                }
            }
        }
    }
    // deformed commutator identity on sampled targets
    let mut targets = Vec::new();
    for k in 0..r {
        targets.push((format!("a{k}"), spec.gen_state(GeneratorId(k))));
    }
    for w in 1..=cap {
        for mono in spec.basis(w) {
            if mono.len() > 2 || (mono.len() == 1 && mono.factors()[0].1 == 1) {
                continue;
            }
            let name = mono.render(&spec.gen_names());
            targets.push((
                name,
                crate::pbw::State::monomial(mono, BaseScalar::one()),
            ));
        }
    }
    for i in 0..r {
        for j in 0..r {
            let (gi, gj) = (GeneratorId(i), GeneratorId(j));
            for (tname, target) in &targets {
                let wt = target.max_weight().unwrap_or(0) as i64;
                let window = (spec.weight_of(gi) + spec.weight_of(gj)) as i64 + wt - 2;
                for m in -2..=window {
                    for n in -2..=(window - m.max(0)) {
                        let residual =
                            commutator_residual_on(&def, gi, gj, m, n, target)?;
                        report.checks += 1;
                        if !residual.substitute(assignment).is_zero() {
                            report.entries.push(format!(
                                "commutator(i={i}, j={j}, target={tname}, m={m}, n={n})"
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}
