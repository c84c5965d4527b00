//! Exact sparse linear algebra over the coefficient field.
//!
//! Plain fraction-arithmetic Gauss-Jordan with deterministic pivoting (first
//! nonzero entry by fixed column order), so echelon forms, ranks, nullspace
//! bases and quotient dimensions are reproducible across runs. Over a
//! rational-function field the pivot test is exact nonzeroness, never a
//! numeric heuristic. A degree watchdog records the largest polynomial seen
//! so blow-up would be visible in diagnostics long before it hurts.

use crate::scalar::BaseScalar;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("subspace check failed: vector outside the ambient span")]
    NotASubspace,
}

/// Sparse row: strictly increasing column indices, canonical nonzero entries.
pub type SparseRow = Vec<(usize, BaseScalar)>;

#[derive(Clone, Debug, Default)]
pub struct ExactMatrix {
    pub ncols: usize,
    pub rows: Vec<SparseRow>,
}

impl ExactMatrix {
    pub fn new(ncols: usize) -> Self {
        ExactMatrix {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn push_dense(&mut self, row: &[BaseScalar]) {
        assert_eq!(row.len(), self.ncols);
        let sparse: SparseRow = row
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i, v.clone()))
            .collect();
        if !sparse.is_empty() {
            self.rows.push(sparse);
        }
    }

    pub fn push_sparse(&mut self, row: SparseRow) {
        if !row.is_empty() {
            self.rows.push(row);
        }
    }

    /// Reduced row echelon form; returns the pivot column of each row.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next_row = 0usize;
        for col in 0..self.ncols {
            let Some(r) = (next_row..self.rows.len())
                .find(|&r| row_coeff(&self.rows[r], col).is_some())
            else {
                continue;
            };
            self.rows.swap(next_row, r);
            let inv = row_coeff(&self.rows[next_row], col)
                .unwrap()
                .inv()
                .expect("pivot is nonzero");
            self.rows[next_row] = scale_row(&self.rows[next_row], &inv);
            let pivot_row = self.rows[next_row].clone();
            for r in 0..self.rows.len() {
                if r == next_row {
                    continue;
                }
                if let Some(c) = row_coeff(&self.rows[r], col) {
                    let f = c.neg();
                    self.rows[r] = add_scaled_row(&self.rows[r], &pivot_row, &f);
                }
            }
            pivots.push(col);
            next_row += 1;
            if next_row == self.rows.len() {
                break;
            }
        }
        self.rows.retain(|r| !r.is_empty());
        self.rows.sort_by_key(|r| r[0].0);
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Exact nullspace basis. With pivot columns `p` and free columns `f`,
    /// basis vector for each free column puts 1 there and back-substitutes
    /// the pivots; the result is in reduced echelon form with deterministic
    /// order (ascending free column).
    pub fn nullspace(&self) -> Vec<Vec<BaseScalar>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let is_pivot = |c: usize| pivots.binary_search(&c).is_ok();
        let mut basis = Vec::new();
        for free in 0..self.ncols {
            if is_pivot(free) {
                continue;
            }
            let mut v = vec![BaseScalar::zero(); self.ncols];
            v[free] = BaseScalar::one();
            for (prow, &pcol) in m.rows.iter().zip(pivots.iter()) {
                if let Some(c) = row_coeff(prow, free) {
                    v[pcol] = c.neg();
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Largest polynomial degree appearing in the matrix (the watchdog).
    pub fn max_degree(&self) -> usize {
        self.rows
            .iter()
            .flat_map(|r| r.iter())
            .map(|(_, v)| match v {
                BaseScalar::Rat(_) => 0,
                BaseScalar::Fun(f) => f.num.degree().max(f.den.degree()),
            })
            .max()
            .unwrap_or(0)
    }
}

fn row_coeff(row: &SparseRow, col: usize) -> Option<&BaseScalar> {
    row.binary_search_by_key(&col, |&(c, _)| c)
        .ok()
        .map(|i| &row[i].1)
}

fn scale_row(row: &SparseRow, k: &BaseScalar) -> SparseRow {
    row.iter()
        .map(|(c, v)| (*c, v.mul(k)))
        .filter(|(_, v)| !v.is_zero())
        .collect()
}

/// row + k * other, merging sorted sparse rows.
fn add_scaled_row(row: &SparseRow, other: &SparseRow, k: &BaseScalar) -> SparseRow {
    let mut out = SparseRow::with_capacity(row.len() + other.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < row.len() || j < other.len() {
        match (row.get(i), other.get(j)) {
            (Some(&(ca, ref va)), Some(&(cb, ref vb))) => {
                if ca < cb {
                    out.push((ca, va.clone()));
                    i += 1;
                } else if cb < ca {
                    let v = vb.mul(k);
                    if !v.is_zero() {
                        out.push((cb, v));
                    }
                    j += 1;
                } else {
                    let v = va.add(&vb.mul(k));
                    if !v.is_zero() {
                        out.push((ca, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
            (Some(&(ca, ref va)), None) => {
                out.push((ca, va.clone()));
                i += 1;
            }
            (None, Some(&(cb, ref vb))) => {
                let v = vb.mul(k);
                if !v.is_zero() {
                    out.push((cb, v));
                }
                j += 1;
            }
            (None, None) => break,
        }
    }
    out
}

/// Echelon basis of the span of the given (dense) vectors.
pub fn echelon_basis(vectors: &[Vec<BaseScalar>], ncols: usize) -> Vec<Vec<BaseScalar>> {
    let mut m = ExactMatrix::new(ncols);
    for v in vectors {
        m.push_dense(v);
    }
    m.rref();
    m.rows.iter().map(|r| densify(r, ncols)).collect()
}

pub fn densify(row: &SparseRow, ncols: usize) -> Vec<BaseScalar> {
    let mut v = vec![BaseScalar::zero(); ncols];
    for (c, val) in row {
        v[*c] = val.clone();
    }
    v
}

/// Reduces `v` against echelon rows (each with leading 1); returns the
/// remainder.
pub fn reduce_against(v: &[BaseScalar], rows: &[Vec<BaseScalar>]) -> Vec<BaseScalar> {
    let mut out = v.to_vec();
    for row in rows {
        let Some(lead) = row.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        if out[lead].is_zero() {
            continue;
        }
        let f = out[lead].div(&row[lead]).expect("leading entry nonzero");
        for (o, r) in out.iter_mut().zip(row.iter()) {
            *o = o.sub(&r.mul(&f));
        }
    }
    out
}

/// dim(space) - dim(subspace); errors unless subspace is contained in space.
pub fn quotient_dim(
    space: &[Vec<BaseScalar>],
    subspace: &[Vec<BaseScalar>],
    ncols: usize,
) -> Result<usize, LinalgError> {
    let space_ech = echelon_basis(space, ncols);
    let sub_ech = echelon_basis(subspace, ncols);
    for v in &sub_ech {
        let rem = reduce_against(v, &space_ech);
        if rem.iter().any(|x| !x.is_zero()) {
            return Err(LinalgError::NotASubspace);
        }
    }
    Ok(space_ech.len() - sub_ech.len())
}

/// Deterministic complement: members of `space` surviving reduction against
/// `subspace`, reduced to an echelon family (representatives of the
/// quotient).
pub fn complement_basis(
    space: &[Vec<BaseScalar>],
    subspace: &[Vec<BaseScalar>],
    ncols: usize,
) -> Vec<Vec<BaseScalar>> {
    let sub_ech = echelon_basis(subspace, ncols);
    let mut chosen: Vec<Vec<BaseScalar>> = Vec::new();
    for v in space {
        let mut rem = reduce_against(v, &sub_ech);
        rem = reduce_against(&rem, &chosen);
        if let Some(lead) = rem.iter().position(|x| !x.is_zero()) {
            let inv = rem[lead].inv().expect("nonzero");
            for x in rem.iter_mut() {
                *x = x.mul(&inv);
            }
            chosen.push(rem);
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_int;

    fn s(n: i64) -> BaseScalar {
        BaseScalar::from_int(n)
    }

    #[test]
    fn nullspace_of_identity_is_empty() {
        let mut m = ExactMatrix::new(3);
        for i in 0..3 {
            let mut row = vec![s(0), s(0), s(0)];
            row[i] = s(1);
            m.push_dense(&row);
        }
        assert!(m.nullspace().is_empty());
    }

    #[test]
    fn nullspace_of_zero_matrix_is_standard_basis() {
        let m = ExactMatrix::new(4);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 4);
        for (i, v) in ns.iter().enumerate() {
            for (j, x) in v.iter().enumerate() {
                assert_eq!(*x, if i == j { s(1) } else { s(0) });
            }
        }
    }

    #[test]
    fn nullspace_over_function_field() {
        // single row (l, 0, -l) over Q(l): nullspace dim 2
        let l = BaseScalar::param("l");
        let mut m = ExactMatrix::new(3);
        m.push_dense(&[l.clone(), s(0), l.neg()]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        // each basis vector annihilates the row
        for v in &ns {
            let dot = v[0].mul(&l).add(&v[2].mul(&l.neg()));
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn quotient_dimensions() {
        let e1 = vec![s(1), s(0), s(0)];
        let e2 = vec![s(0), s(1), s(0)];
        let space = vec![e1.clone(), e2.clone()];
        assert_eq!(quotient_dim(&space, &space, 3).unwrap(), 0);
        assert_eq!(quotient_dim(&space, &[], 3).unwrap(), 2);
        assert_eq!(quotient_dim(&space, &[e1.clone()], 3).unwrap(), 1);
        let outside = vec![s(0), s(0), s(1)];
        assert_eq!(
            quotient_dim(&space, &[outside], 3),
            Err(LinalgError::NotASubspace)
        );
    }

    #[test]
    fn rank_plus_nullity() {
        let mut m = ExactMatrix::new(4);
        m.push_dense(&[s(1), s(2), s(0), s(1)]);
        m.push_dense(&[s(2), s(4), s(1), s(0)]);
        m.push_dense(&[s(3), s(6), s(1), s(1)]);
        assert_eq!(m.rank() + m.nullspace().len(), 4);
    }

    #[test]
    fn specialize_commutes_with_nullspace() {
        // nullspace over Q(l), then specialize at l = 2, matches the
        // nullspace of the specialized matrix
        let l = BaseScalar::param("l");
        let rows: Vec<Vec<BaseScalar>> = vec![
            vec![l.clone(), s(1), s(0)],
            vec![s(0), l.clone(), l.neg()],
        ];
        let mut m = ExactMatrix::new(3);
        for r in &rows {
            m.push_dense(r);
        }
        let ns = m.nullspace();
        let at = rat_int(2);
        let mut m2 = ExactMatrix::new(3);
        for r in &rows {
            let spec: Vec<BaseScalar> = r
                .iter()
                .map(|v| BaseScalar::from_rat(v.specialize(&at).unwrap()))
                .collect();
            m2.push_dense(&spec);
        }
        let ns2 = m2.nullspace();
        assert_eq!(ns.len(), ns2.len());
        let ns_spec: Vec<Vec<BaseScalar>> = ns
            .iter()
            .map(|v| {
                v.iter()
                    .map(|x| BaseScalar::from_rat(x.specialize(&at).unwrap()))
                    .collect()
            })
            .collect();
        assert_eq!(echelon_basis(&ns_spec, 3), echelon_basis(&ns2, 3));
    }
}
