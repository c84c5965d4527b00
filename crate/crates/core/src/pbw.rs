//! Canonical PBW monomials and sparse graded state vectors.
//!
//! A monomial is an ordered word of creation modes applied to the vacuum:
//! generator indices nondecreasing along the word, and depths nonincreasing
//! within a run of equal generators. The weight is cached at construction.
//! States are sparse maps from monomials to coefficients; coefficients are
//! either exact scalars or linear forms in the deformation unknowns, chosen
//! through the [`Coeff`] trait so the same mode calculus serves both.

use crate::scalar::{BaseScalar, LinearForm};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeneratorId(pub u16);

/// One creation factor: the mode `gen_{-depth}` with depth >= 1.
pub type Factor = (GeneratorId, u32);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PbwError {
    #[error("factor sequence is not canonicalizable without commutators")]
    NotCanonicalizable,
    #[error("depth must be positive")]
    ZeroDepth,
}

/// Canonical basis word `g1(-d1) g2(-d2) ... |0>`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PbwMonomial {
    factors: Vec<Factor>,
    weight: u32,
}

impl PbwMonomial {
    pub fn vacuum() -> Self {
        PbwMonomial {
            factors: vec![],
            weight: 0,
        }
    }

    /// Builds from factors already in canonical order; panics otherwise.
    pub fn from_canonical(factors: Vec<Factor>, gen_weights: &[u32]) -> Self {
        assert!(
            is_canonical(&factors),
            "factors not in canonical order: {:?}",
            factors
        );
        let weight = factors
            .iter()
            .map(|&(g, d)| gen_weights[g.0 as usize] + d - 1)
            .sum();
        PbwMonomial { factors, weight }
    }

    /// Sorts a free factor sequence into canonical order. Legal only when no
    /// two factors that actually fail to commute must cross; the caller
    /// supplies that knowledge through `commutes`.
    pub fn canonicalize_free(
        factors: Vec<Factor>,
        gen_weights: &[u32],
        commutes: impl Fn(Factor, Factor) -> bool,
    ) -> Result<Self, PbwError> {
        if factors.iter().any(|&(_, d)| d == 0) {
            return Err(PbwError::ZeroDepth);
        }
        let mut fs = factors;
        // insertion sort; every adjacent transposition must commute
        for i in 1..fs.len() {
            let mut j = i;
            while j > 0 && factor_key(fs[j - 1]) > factor_key(fs[j]) {
                if !commutes(fs[j - 1], fs[j]) {
                    return Err(PbwError::NotCanonicalizable);
                }
                fs.swap(j - 1, j);
                j -= 1;
            }
        }
        Ok(PbwMonomial::from_canonical(fs, gen_weights))
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_vacuum(&self) -> bool {
        self.factors.is_empty()
    }

    /// Total generator weight of the word (the standard filtration degree).
    pub fn filtration(&self, gen_weights: &[u32]) -> u32 {
        self.factors
            .iter()
            .map(|&(g, _)| gen_weights[g.0 as usize])
            .sum()
    }

    /// Splits off the leading factor; the remainder of a canonical word is
    /// canonical.
    pub fn split_head(&self, gen_weights: &[u32]) -> Option<(Factor, PbwMonomial)> {
        let (&head, rest) = self.factors.split_first()?;
        let (g, d) = head;
        let rest_weight = self.weight - (gen_weights[g.0 as usize] + d - 1);
        Some((
            head,
            PbwMonomial {
                factors: rest.to_vec(),
                weight: rest_weight,
            },
        ))
    }

    /// True when prepending `(g, depth)` keeps the word canonical.
    pub fn can_prepend(&self, g: GeneratorId, depth: u32) -> bool {
        match self.factors.first() {
            None => true,
            Some(&(h, k)) => g < h || (g == h && depth >= k),
        }
    }

    /// Prepends a factor assumed canonical-compatible.
    pub fn prepend(&self, g: GeneratorId, depth: u32, gen_weights: &[u32]) -> PbwMonomial {
        debug_assert!(self.can_prepend(g, depth));
        let mut factors = Vec::with_capacity(self.factors.len() + 1);
        factors.push((g, depth));
        factors.extend_from_slice(&self.factors);
        PbwMonomial {
            factors,
            weight: self.weight + gen_weights[g.0 as usize] + depth - 1,
        }
    }

    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        for &(g, d) in &self.factors {
            out.push_str(&names[g.0 as usize]);
            out.push_str(&format!("(-{})", d));
        }
        out.push_str("|0>");
        out
    }
}

fn factor_key(f: Factor) -> (GeneratorId, i64) {
    // canonical order: generator ascending, depth nonincreasing within a run
    (f.0, -(f.1 as i64))
}

fn is_canonical(factors: &[Factor]) -> bool {
    factors.windows(2).all(|w| factor_key(w[0]) <= factor_key(w[1]))
}

/// Coefficient ring interface shared by exact scalars and linear forms.
/// Structural constants of the calculus are always `BaseScalar`s, which act
/// on coefficients through `scaled`.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, rhs: &Self);
    fn scaled(&self, k: &BaseScalar) -> Self;
    fn negated(&self) -> Self;
}

impl Coeff for BaseScalar {
    fn zero() -> Self {
        BaseScalar::zero()
    }
    fn is_zero(&self) -> bool {
        BaseScalar::is_zero(self)
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self = self.add(rhs);
    }
    fn scaled(&self, k: &BaseScalar) -> Self {
        self.mul(k)
    }
    fn negated(&self) -> Self {
        self.neg()
    }
}

impl Coeff for LinearForm {
    fn zero() -> Self {
        LinearForm::zero()
    }
    fn is_zero(&self) -> bool {
        LinearForm::is_zero(self)
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        self.add_assign_form(rhs);
    }
    fn scaled(&self, k: &BaseScalar) -> Self {
        self.scale(k)
    }
    fn negated(&self) -> Self {
        self.neg()
    }
}

/// Sparse linear combination of canonical monomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State<C: Coeff> {
    terms: BTreeMap<PbwMonomial, C>,
}

impl<C: Coeff> Default for State<C> {
    fn default() -> Self {
        State {
            terms: BTreeMap::new(),
        }
    }
}

impl<C: Coeff> State<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(m: PbwMonomial, c: C) -> Self {
        let mut s = Self::zero();
        s.add_monomial(m, c);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PbwMonomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &PbwMonomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_monomial(&mut self, m: PbwMonomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(&c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_state(&mut self, other: &State<C>) {
        for (m, c) in &other.terms {
            self.add_monomial(m.clone(), c.clone());
        }
    }

    /// Adds `k * other` into self.
    pub fn add_scaled(&mut self, other: &State<C>, k: &BaseScalar) {
        if k.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_monomial(m.clone(), c.scaled(k));
        }
    }

    pub fn sub_state(&mut self, other: &State<C>) {
        for (m, c) in &other.terms {
            self.add_monomial(m.clone(), c.negated());
        }
    }

    pub fn scale(&self, k: &BaseScalar) -> State<C> {
        let mut out = State::zero();
        out.add_scaled(self, k);
        out
    }

    pub fn negated(&self) -> State<C> {
        let mut out = State::zero();
        out.sub_state(self);
        out
    }

    /// Largest monomial weight present, or None when zero.
    pub fn max_weight(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.weight()).max()
    }

    /// The common weight if the state is homogeneous (zero state included).
    pub fn homogeneous_weight(&self) -> Option<u32> {
        let mut it = self.terms.keys();
        let w = it.next()?.weight();
        if it.all(|m| m.weight() == w) {
            Some(w)
        } else {
            None
        }
    }

    pub fn render(&self, names: &[String], coeff_str: impl Fn(&C) -> Option<String>) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            match coeff_str(c) {
                None => parts.push(m.render(names)),
                Some(cs) => parts.push(format!("{}*{}", cs, m.render(names))),
            }
        }
        parts.join(" + ")
    }
}

impl State<LinearForm> {
    /// Evaluates every linear-form coefficient at an unknown assignment.
    pub fn substitute(&self, assignment: &[BaseScalar]) -> State<BaseScalar> {
        let mut out = State::zero();
        for (m, f) in self.iter() {
            out.add_monomial(m.clone(), f.substitute(assignment));
        }
        out
    }

    /// Lifts scalar coefficients into linear forms scaled by `form`.
    pub fn from_scalar_state(s: &State<BaseScalar>, form: &LinearForm) -> State<LinearForm> {
        let mut out = State::zero();
        for (m, c) in s.iter() {
            out.add_monomial(m.clone(), form.scale(c));
        }
        out
    }
}

/// All canonical monomials of the given weight, ascending lexicographic order.
pub fn enumerate_basis(gen_weights: &[u32], weight: u32) -> Vec<PbwMonomial> {
    let mut out = Vec::new();
    let mut current: Vec<Factor> = Vec::new();
    rec(gen_weights, 0, u32::MAX, weight, &mut current, &mut out);
    out.sort();
    return out;

    fn rec(
        gen_weights: &[u32],
        gen: usize,
        max_depth: u32,
        remaining: u32,
        current: &mut Vec<Factor>,
        out: &mut Vec<PbwMonomial>,
    ) {
        if remaining == 0 {
            let factors = current.clone();
            let weight: u32 = factors
                .iter()
                .map(|&(g, d)| gen_weights[g.0 as usize] + d - 1)
                .sum();
            out.push(PbwMonomial { factors, weight });
            return;
        }
        if gen >= gen_weights.len() {
            return;
        }
        // skip to the next generator
        rec(gen_weights, gen + 1, u32::MAX, remaining, current, out);
        // or place one more factor of this generator, depth <= max_depth
        let w = gen_weights[gen];
        let mut d = 1u32;
        while d <= max_depth && w + d - 1 <= remaining {
            current.push((GeneratorId(gen as u16), d));
            // within a run depths are nonincreasing, so the factors of one
            // generator are emitted in increasing depth and reversed
            rec_inner(gen_weights, gen, d, remaining - (w + d - 1), current, out);
            current.pop();
            d += 1;
        }
    }

    // identical to rec but keeps extending the same generator run first
    fn rec_inner(
        gen_weights: &[u32],
        gen: usize,
        max_depth: u32,
        remaining: u32,
        current: &mut Vec<Factor>,
        out: &mut Vec<PbwMonomial>,
    ) {
        rec(gen_weights, gen + 1, u32::MAX, remaining, current, out);
        if remaining == 0 {
            return;
        }
        let w = gen_weights[gen];
        let mut d = 1u32;
        while d <= max_depth && w + d - 1 <= remaining {
            current.push((GeneratorId(gen as u16), d));
            rec_inner(gen_weights, gen, d, remaining - (w + d - 1), current, out);
            current.pop();
            d += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(factors: &[(u16, u32)], weights: &[u32]) -> PbwMonomial {
        PbwMonomial::from_canonical(
            factors.iter().map(|&(g, d)| (GeneratorId(g), d)).collect(),
            weights,
        )
    }

    #[test]
    fn weights() {
        // Heisenberg (weight-1 generators): e1(-3)e1(-1)|0> has weight 4
        let h = [1u32, 1, 1];
        assert_eq!(mono(&[(0, 3), (0, 1)], &h).weight(), 4);
        // Virasoro: w(-1)|0> has weight 2
        let v = [2u32];
        assert_eq!(mono(&[(0, 1)], &v).weight(), 2);
        assert_eq!(PbwMonomial::vacuum().weight(), 0);
    }

    #[test]
    fn basis_enumeration_virasoro() {
        let v = [2u32];
        let b4 = enumerate_basis(&v, 4);
        assert_eq!(b4.len(), 2); // w(-3)|0>, w(-1)w(-1)|0>
        assert_eq!(b4[0], mono(&[(0, 1), (0, 1)], &v));
        assert_eq!(b4[1], mono(&[(0, 3)], &v));
        assert_eq!(enumerate_basis(&v, 6).len(), 4); // 6, 4+2, 3+3, 2+2+2
        assert_eq!(enumerate_basis(&v, 0), vec![PbwMonomial::vacuum()]);
        assert!(enumerate_basis(&v, 1).is_empty());
    }

    #[test]
    fn canonical_rejects_unordered_depths() {
        let v = [2u32];
        // Virasoro w(-1), w(-2) in that order: same generator, depth order
        // violated, and the factors do not commute
        let r = PbwMonomial::canonicalize_free(
            vec![(GeneratorId(0), 1), (GeneratorId(0), 2)],
            &v,
            |_, _| false,
        );
        assert_eq!(r, Err(PbwError::NotCanonicalizable));
        // already sorted input is the identity
        let ok = PbwMonomial::canonicalize_free(
            vec![(GeneratorId(0), 2), (GeneratorId(0), 1)],
            &v,
            |_, _| false,
        )
        .unwrap();
        assert_eq!(ok, mono(&[(0, 2), (0, 1)], &v));
    }

    #[test]
    fn canonicalize_commuting_factors() {
        let h = [1u32, 1];
        // Heisenberg e2(-1), e1(-1): distinct generators that commute here
        let r = PbwMonomial::canonicalize_free(
            vec![(GeneratorId(1), 1), (GeneratorId(0), 1)],
            &h,
            |_, _| true,
        )
        .unwrap();
        assert_eq!(r, mono(&[(0, 1), (1, 1)], &h));
    }

    #[test]
    fn render_monomials() {
        let names = vec!["a".to_string(), "b".to_string()];
        let h = [1u32, 1];
        assert_eq!(mono(&[(0, 3), (1, 1)], &h).render(&names), "a(-3)b(-1)|0>");
        assert_eq!(PbwMonomial::vacuum().render(&names), "|0>");
    }
}
