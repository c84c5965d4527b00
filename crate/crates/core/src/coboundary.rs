//! The coboundary subspace.
//!
//! A trivial deformation comes from a weight-preserving linear map
//! `phi: V -> V` with `phi(|0>) = 0` that commutes with D, through
//! `Y_phi(u, x)v = Y(phi u, x)v - phi(Y(u, x)v) + Y(u, x)phi(v)`.
//! Only the values of phi on weights 1..W_max matter for the singular data
//! on generator pairs, where W_max = max(wt_i + wt_j - 1) over pairs, so phi
//! is parametrized by one unknown per (source basis monomial, target basis
//! monomial) of each weight, constrained by `phi(Dv) = D phi(v)`. Because D
//! is injective off the vacuum, any solution of the finite constraint system
//! extends to a D-commuting map on all of V, so the finite window loses
//! nothing; that injectivity is checked, not assumed.

use crate::algebra::{AlgebraError, AlgebraSpec, Engine};
use crate::deform::DefTable;
use crate::linalg::{echelon_basis, ExactMatrix};
use crate::pbw::{GeneratorId, PbwMonomial, State};
use crate::scalar::BaseScalar;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoboundaryError {
    #[error("translation operator not injective at weight {0}; the finite phi window would undercount coboundaries")]
    DInjectivityFailure(u32),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// The finite phi window: bases of the graded pieces 1..=w_max and the
/// offsets of the per-weight unknown blocks.
pub struct PhiParametrization {
    pub w_max: u32,
    pub bases: Vec<Vec<PbwMonomial>>,
    offsets: Vec<usize>,
    total: usize,
}

impl PhiParametrization {
    pub fn build(spec: &AlgebraSpec) -> Self {
        let r = spec.rank() as u16;
        let mut w_max = 0;
        for i in 0..r {
            for j in i..r {
                w_max = w_max
                    .max(spec.weight_of(GeneratorId(i)) + spec.weight_of(GeneratorId(j)) - 1);
            }
        }
        let mut bases = Vec::new();
        let mut offsets = Vec::new();
        let mut total = 0usize;
        for w in 1..=w_max {
            let basis = spec.basis(w);
            offsets.push(total);
            total += basis.len() * basis.len();
            bases.push(basis);
        }
        PhiParametrization {
            w_max,
            bases,
            offsets,
            total,
        }
    }

    pub fn unknown_count(&self) -> usize {
        self.total
    }

    pub fn basis_at(&self, w: u32) -> &[PbwMonomial] {
        &self.bases[(w - 1) as usize]
    }

    /// Column index of the unknown `phi(src)[dst]` at weight w.
    pub fn col(&self, w: u32, src: usize, dst: usize) -> usize {
        let dim = self.bases[(w - 1) as usize].len();
        self.offsets[(w - 1) as usize] + src * dim + dst
    }
}

/// A concrete phi assignment: per weight, the matrix of phi on the basis.
#[derive(Clone, Debug)]
pub struct PhiMap {
    pub w_max: u32,
    /// values[w-1][src][dst]
    pub values: Vec<Vec<Vec<BaseScalar>>>,
}

impl PhiMap {
    fn from_vector(par: &PhiParametrization, v: &[BaseScalar]) -> Self {
        let mut values = Vec::new();
        for w in 1..=par.w_max {
            let dim = par.basis_at(w).len();
            let mut mat = vec![vec![BaseScalar::zero(); dim]; dim];
            #[allow(clippy::needless_range_loop)]
            for src in 0..dim {
                for dst in 0..dim {
                    mat[src][dst] = v[par.col(w, src, dst)].clone();
                }
            }
            values.push(mat);
        }
        PhiMap {
            w_max: par.w_max,
            values,
        }
    }

    /// Applies phi to a state supported in weights 0..=w_max; the vacuum
    /// component maps to zero.
    pub fn apply(&self, par: &PhiParametrization, s: &State<BaseScalar>) -> State<BaseScalar> {
        let mut out = State::zero();
        for (mono, c) in s.iter() {
            let w = mono.weight();
            if w == 0 || w > self.w_max {
                continue;
            }
            let basis = par.basis_at(w);
            let src = basis
                .iter()
                .position(|b| b == mono)
                .expect("state monomial within the phi window");
            for (dst, b) in basis.iter().enumerate() {
                let k = &self.values[(w - 1) as usize][src][dst];
                if !k.is_zero() {
                    out.add_monomial(b.clone(), c.mul(k));
                }
            }
        }
        out
    }
}

/// Verifies D-injectivity on weights 1..=w_max and returns the constraint
/// system `phi(Dv) = D phi(v)` over the phi unknowns.
pub fn phi_constraints(
    spec: &AlgebraSpec,
    par: &PhiParametrization,
) -> Result<ExactMatrix, CoboundaryError> {
    let eng = Engine::new(spec);
    for w in 1..=par.w_max {
        let src_basis = spec.basis(w);
        let dst_basis = spec.basis(w + 1);
        let mut m = ExactMatrix::new(dst_basis.len());
        for b in &src_basis {
            let d = eng.translate_monomial(b)?;
            let row: Vec<BaseScalar> = dst_basis.iter().map(|t| d.coeff(t)).collect();
            m.push_dense(&row);
        }
        if m.rank() < src_basis.len() {
            return Err(CoboundaryError::DInjectivityFailure(w));
        }
    }
    // rows of phi(Dv) - D phi(v) = 0, coordinatized over weight w+1 targets
    let mut sys = ExactMatrix::new(par.unknown_count());
    for w in 1..par.w_max {
        let src_basis = par.basis_at(w).to_vec();
        let up_basis = par.basis_at(w + 1).to_vec();
        for (src, b) in src_basis.iter().enumerate() {
            let db = eng.translate_monomial(b)?;
            for (t, target) in up_basis.iter().enumerate() {
                let mut row = vec![BaseScalar::zero(); par.unknown_count()];
                // phi(Dv) coordinate at `target`
                for (mu, c) in db.iter() {
                    let src_up = up_basis
                        .iter()
                        .position(|x| x == mu)
                        .expect("derivative stays in the window");
                    let col = par.col(w + 1, src_up, t);
                    row[col] = row[col].add(c);
                }
                // minus (D phi(v)) coordinate at `target`
                for (dst, bdst) in src_basis.iter().enumerate() {
                    let dd = eng.translate_monomial(bdst)?;
                    let coef = dd.coeff(target);
                    if !coef.is_zero() {
                        let col = par.col(w, src, dst);
                        row[col] = row[col].sub(&coef);
                    }
                }
                sys.push_dense(&row);
            }
        }
    }
    Ok(sys)
}

/// Basis of admissible phi maps (D-commuting, weight-preserving, vanishing
/// on the vacuum), as concrete assignments.
pub fn phi_space(
    spec: &AlgebraSpec,
    par: &PhiParametrization,
) -> Result<Vec<PhiMap>, CoboundaryError> {
    let sys = phi_constraints(spec, par)?;
    Ok(sys
        .nullspace()
        .iter()
        .map(|v| PhiMap::from_vector(par, v))
        .collect())
}

/// The coboundary data of one phi in unknown-registry coordinates: for each
/// pair i <= j and slot m, the coefficients of
/// `(phi u)_m v - phi(u_m v) + u_m (phi v)`.
pub fn coboundary_data(
    spec: &AlgebraSpec,
    table: &DefTable,
    par: &PhiParametrization,
    phi: &PhiMap,
) -> Result<Vec<BaseScalar>, CoboundaryError> {
    let eng = Engine::new(spec);
    let mut out = vec![BaseScalar::zero(); table.unknowns.count()];
    let r = spec.rank() as u16;
    for i in 0..r {
        for j in i..r {
            let (gi, gj) = (GeneratorId(i), GeneratorId(j));
            let u = spec.gen_state(gi);
            let v = spec.gen_state(gj);
            let phi_u = phi.apply(par, &u);
            let phi_v = phi.apply(par, &v);
            let top = spec.weight_of(gi) + spec.weight_of(gj) - 1;
            for m in 0..=top {
                let mut data = eng.state_mode(&phi_u, m as i64, &v)?;
                let um_v = eng.gen_mode(gi, m as i64, &v)?;
                data.sub_state(&phi.apply(par, &um_v));
                data.add_state(&eng.gen_mode(gi, m as i64, &phi_v)?);
                if data.is_zero() {
                    continue;
                }
                let (start, basis) = table.unknowns.slot_ids(i, j, m).expect("slot exists");
                for (t, b) in basis.iter().enumerate() {
                    let c = data.coeff(b);
                    if !c.is_zero() {
                        out[start + t] = out[start + t].add(&c);
                        data.add_monomial(b.clone(), c.neg());
                    }
                }
                assert!(
                    data.is_zero(),
                    "coboundary slot value escaped the graded basis"
                );
            }
        }
    }
    Ok(out)
}

/// Echelon basis of the coboundary image inside the unknown space.
pub fn coboundary_image(
    spec: &AlgebraSpec,
    table: &DefTable,
) -> Result<Vec<Vec<BaseScalar>>, CoboundaryError> {
    let par = PhiParametrization::build(spec);
    let phis = phi_space(spec, &par)?;
    let mut vectors = Vec::new();
    for phi in &phis {
        vectors.push(coboundary_data(spec, table, &par, phi)?);
    }
    Ok(echelon_basis(&vectors, table.unknowns.count()))
}
