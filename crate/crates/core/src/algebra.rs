//! The undeformed vertex-algebra engine.
//!
//! An algebra is presented by its generators (positive weights, assumed to
//! generate freely) and the finite singular OPE data `g_a h` for generator
//! pairs with `i <= j`; the opposite order is derived once from skew-symmetry
//! at load time. Mode application reduces any `g_n v` to canonical PBW form
//! with the commutator rule
//!
//! `[g_m, h_{-k}] = sum_a C(m, a) (g_a h)_{m-k-a}`
//!
//! and modes of composite states come from the standard iterate expansion.
//! All reductions strictly lower the generator-weight filtration, which is
//! what terminates the recursion; a step budget guards against malformed
//! tables that fail to do so.

use crate::pbw::{enumerate_basis, Coeff, GeneratorId, PbwMonomial, State};
use crate::scalar::{gen_binomial, BaseScalar};
use num_traits::Zero;
use std::cell::{Cell, RefCell};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("generator `{0}` must have positive weight")]
    NonPositiveWeight(String),
    #[error("OPE entry ({0}, {1}, {2}) must have i <= j")]
    EntryOrder(usize, usize, u32),
    #[error("OPE entry ({0}, {1}, {2}) exceeds the grading bound")]
    EntryAboveBound(usize, usize, u32),
    #[error("OPE entry ({0}, {1}, {2}) is not homogeneous of weight {3}")]
    EntryWeight(usize, usize, u32, i64),
    #[error("generator index {0} out of range")]
    BadGenerator(usize),
    #[error("reduction budget exceeded (malformed OPE table?)")]
    RecursionBudgetExceeded,
    #[error("scalar parameter `{0}` does not match the algebra field")]
    FieldParam(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gen {
    pub name: String,
    pub weight: u32,
}

/// Coefficient-field descriptor: plain rationals or one named parameter.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FieldDesc {
    pub param: Option<Arc<str>>,
}

impl FieldDesc {
    pub fn rational() -> Self {
        FieldDesc { param: None }
    }
    pub fn with_param(name: &str) -> Self {
        FieldDesc {
            param: Some(Arc::from(name)),
        }
    }
}

/// The finite singular OPE data, stored for i <= j only.
#[derive(Clone, Debug, Default)]
pub struct OpeTable {
    entries: BTreeMap<(u16, u16, u32), State<BaseScalar>>,
}

impl OpeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, i: u16, j: u16, alpha: u32, value: State<BaseScalar>) {
        if !value.is_zero() {
            self.entries.insert((i, j, alpha), value);
        }
    }

    pub fn get(&self, i: u16, j: u16, alpha: u32) -> Option<&State<BaseScalar>> {
        self.entries.get(&(i, j, alpha))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u16, u16, u32), &State<BaseScalar>)> {
        self.entries.iter()
    }
}

#[derive(Clone, Debug)]
pub struct AlgebraSpec {
    pub field: FieldDesc,
    pub gens: Vec<Gen>,
    /// user-declared entries, i <= j
    ope: OpeTable,
    /// all ordered pairs, opposite order derived via skew-symmetry
    full: OpeTable,
    gen_weights: Vec<u32>,
    /// pairs (i, j) with i > j whose derived entries are available
    derived_pairs: std::collections::HashSet<(u16, u16)>,
}

impl AlgebraSpec {
    pub fn new(field: FieldDesc, gens: Vec<Gen>, ope: OpeTable) -> Result<Self, AlgebraError> {
        let mut seen = std::collections::HashSet::new();
        for g in &gens {
            if g.weight == 0 {
                return Err(AlgebraError::NonPositiveWeight(g.name.clone()));
            }
            if !seen.insert(g.name.clone()) {
                return Err(AlgebraError::DuplicateGenerator(g.name.clone()));
            }
        }
        let gen_weights: Vec<u32> = gens.iter().map(|g| g.weight).collect();
        let r = gens.len();
        for (&(i, j, alpha), v) in ope.iter() {
            let (i, j) = (i as usize, j as usize);
            if i >= r || j >= r {
                return Err(AlgebraError::BadGenerator(i.max(j)));
            }
            if i > j {
                return Err(AlgebraError::EntryOrder(i, j, alpha));
            }
            let bound = gen_weights[i] + gen_weights[j];
            if alpha >= bound {
                return Err(AlgebraError::EntryAboveBound(i, j, alpha));
            }
            let expect = bound as i64 - alpha as i64 - 1;
            if v.homogeneous_weight().map(|w| w as i64) != Some(expect) {
                return Err(AlgebraError::EntryWeight(i, j, alpha, expect));
            }
            if let Some(p) = scalar_param_of(v) {
                match &field.param {
                    Some(fp) if **fp == *p => {}
                    _ => return Err(AlgebraError::FieldParam(p)),
                }
            }
        }
        // Derive the opposite order: h_a g = sum_b (-1)^(a+b+1) D^b/b! (g_{a+b} h).
        // D on a word needs commutators, and every commutator pair touched by
        // the reduction of a state of weight < wt_i + wt_j has strictly
        // smaller weight-sum, so deriving pairs in increasing weight-sum
        // order only ever consults entries that already exist.
        let mut spec = AlgebraSpec {
            field,
            gens,
            full: ope.clone(),
            ope,
            gen_weights,
            derived_pairs: std::collections::HashSet::new(),
        };
        let mut pairs: Vec<(u16, u16)> = Vec::new();
        for i in 0..r as u16 {
            for j in 0..i {
                pairs.push((i, j));
            }
        }
        pairs.sort_by_key(|&(i, j)| {
            (
                spec.gen_weights[i as usize] + spec.gen_weights[j as usize],
                i,
                j,
            )
        });
        for (i, j) in pairs {
            let bound = spec.gen_weights[i as usize] + spec.gen_weights[j as usize];
            let mut new_entries = Vec::new();
            {
                let eng = Engine::new(&spec);
                for alpha in 0..bound {
                    let mut acc: State<BaseScalar> = State::zero();
                    for beta in 0..=(bound - 1 - alpha) {
                        if let Some(e) = spec.ope.get(j, i, alpha + beta) {
                            let sign = if (alpha + beta + 1) % 2 == 0 { 1 } else { -1 };
                            acc.add_scaled(
                                &eng.d_pow_over_factorial(e, beta)?,
                                &BaseScalar::from_int(sign),
                            );
                        }
                    }
                    new_entries.push((alpha, acc));
                }
            }
            for (alpha, st) in new_entries {
                spec.full.set(i, j, alpha, st);
            }
            spec.derived_pairs.insert((i, j));
        }
        Ok(spec)
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn gen_weights(&self) -> &[u32] {
        &self.gen_weights
    }

    pub fn weight_of(&self, g: GeneratorId) -> u32 {
        self.gen_weights[g.0 as usize]
    }

    pub fn max_weight(&self) -> u32 {
        self.gen_weights.iter().copied().max().unwrap_or(0)
    }

    pub fn gen_names(&self) -> Vec<String> {
        self.gens.iter().map(|g| g.name.clone()).collect()
    }

    pub fn gen_by_name(&self, name: &str) -> Option<GeneratorId> {
        self.gens
            .iter()
            .position(|g| g.name == name)
            .map(|i| GeneratorId(i as u16))
    }

    /// Declared entries only (i <= j), for rendering.
    pub fn declared_ope(&self) -> &OpeTable {
        &self.ope
    }

    /// OPE entry for any ordered pair; zero state when absent.
    pub fn ope_entry(&self, i: GeneratorId, j: GeneratorId, alpha: u32) -> State<BaseScalar> {
        self.full
            .get(i.0, j.0, alpha)
            .cloned()
            .unwrap_or_else(State::zero)
    }

    pub fn ope_entry_ref(&self, i: GeneratorId, j: GeneratorId, alpha: u32) -> Option<&State<BaseScalar>> {
        debug_assert!(
            i.0 <= j.0 || self.derived_pairs.contains(&(i.0, j.0)),
            "opposite-order entry ({}, {}) consulted before derivation",
            i.0,
            j.0
        );
        self.full.get(i.0, j.0, alpha)
    }

    /// The generator as a length-one state.
    pub fn gen_state(&self, g: GeneratorId) -> State<BaseScalar> {
        State::monomial(
            PbwMonomial::from_canonical(vec![(g, 1)], &self.gen_weights),
            BaseScalar::one(),
        )
    }

    pub fn vacuum_state(&self) -> State<BaseScalar> {
        State::monomial(PbwMonomial::vacuum(), BaseScalar::one())
    }

    pub fn basis(&self, weight: u32) -> Vec<PbwMonomial> {
        enumerate_basis(&self.gen_weights, weight)
    }

    pub fn render_state<C: Coeff>(
        &self,
        s: &State<C>,
        coeff_str: impl Fn(&C) -> Option<String>,
    ) -> String {
        s.render(&self.gen_names(), coeff_str)
    }

    pub fn render_scalar_state(&self, s: &State<BaseScalar>) -> String {
        self.render_state(s, |c| {
            if c.is_one() {
                None
            } else {
                Some(c.render_factor())
            }
        })
    }
}

fn scalar_param_of(v: &State<BaseScalar>) -> Option<String> {
    for (_, c) in v.iter() {
        if let Some(p) = c.param_name() {
            return Some(p.to_string());
        }
    }
    None
}

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Mode-application engine with a per-instance memo table and step budget.
/// Single-threaded by design; workers build their own.
pub struct Engine<'a> {
    pub spec: &'a AlgebraSpec,
    memo: RefCell<HashMap<(u16, i64, PbwMonomial), State<BaseScalar>>>,
    d_memo: RefCell<HashMap<PbwMonomial, State<BaseScalar>>>,
    steps: Cell<u64>,
    budget: u64,
}

impl<'a> Engine<'a> {
    pub fn new(spec: &'a AlgebraSpec) -> Self {
        Engine {
            spec,
            memo: RefCell::new(HashMap::new()),
            d_memo: RefCell::new(HashMap::new()),
            steps: Cell::new(0),
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(spec: &'a AlgebraSpec, budget: u64) -> Self {
        Engine {
            budget,
            ..Engine::new(spec)
        }
    }

    fn step(&self) -> Result<(), AlgebraError> {
        let s = self.steps.get() + 1;
        self.steps.set(s);
        if s > self.budget {
            Err(AlgebraError::RecursionBudgetExceeded)
        } else {
            Ok(())
        }
    }

    /// `g_n v` for a whole state.
    pub fn gen_mode<C: Coeff>(
        &self,
        g: GeneratorId,
        n: i64,
        v: &State<C>,
    ) -> Result<State<C>, AlgebraError> {
        let mut out = State::zero();
        for (m, c) in v.iter() {
            let part = self.gen_mode_monomial(g, n, m)?;
            for (pm, pc) in part.iter() {
                out.add_monomial(pm.clone(), c.scaled(pc));
            }
        }
        Ok(out)
    }

    /// `g_n` applied to a single canonical monomial, memoized.
    pub fn gen_mode_monomial(
        &self,
        g: GeneratorId,
        n: i64,
        m: &PbwMonomial,
    ) -> Result<State<BaseScalar>, AlgebraError> {
        // grading: wt(g) - n - 1 + wt(m) < 0 forces zero
        let out_weight = self.spec.weight_of(g) as i64 - n - 1 + m.weight() as i64;
        if out_weight < 0 {
            return Ok(State::zero());
        }
        let key = (g.0, n, m.clone());
        if let Some(hit) = self.memo.borrow().get(&key) {
            return Ok(hit.clone());
        }
        self.step()?;
        let result = self.gen_mode_monomial_uncached(g, n, m)?;
        self.memo.borrow_mut().insert(key, result.clone());
        Ok(result)
    }

    fn gen_mode_monomial_uncached(
        &self,
        g: GeneratorId,
        n: i64,
        m: &PbwMonomial,
    ) -> Result<State<BaseScalar>, AlgebraError> {
        let weights = self.spec.gen_weights();
        if m.is_vacuum() {
            if n >= 0 {
                return Ok(State::zero());
            }
            let depth = (-n) as u32;
            return Ok(State::monomial(
                PbwMonomial::vacuum().prepend(g, depth, weights),
                BaseScalar::one(),
            ));
        }
        if n < 0 {
            let depth = (-n) as u32;
            if m.can_prepend(g, depth) {
                return Ok(State::monomial(m.prepend(g, depth, weights), BaseScalar::one()));
            }
        }
        // commute past the head: g_n (h_-k rest) =
        //   h_-k (g_n rest) + sum_a C(n, a) (g_a h)_{n-k-a} rest
        let ((h, k), rest) = m.split_head(weights).expect("nonvacuum");
        let inner = self.gen_mode_monomial(g, n, &rest)?;
        let mut out = self.gen_mode(h, -(k as i64), &inner)?;
        let amax = self.spec.weight_of(g) + self.spec.weight_of(h);
        for alpha in 0..amax {
            if n >= 0 && alpha as i64 > n {
                break;
            }
            let b = gen_binomial(n, alpha);
            if b.is_zero() {
                continue;
            }
            if let Some(entry) = self.spec.ope_entry_ref(g, h, alpha) {
                let rest_state = State::monomial(rest.clone(), BaseScalar::one());
                let part = self.state_mode(entry, n - k as i64 - alpha as i64, &rest_state)?;
                out.add_scaled(&part, &BaseScalar::from_rat(b));
            }
        }
        Ok(out)
    }

    /// The translation operator: `D|0> = 0` and
    /// `D(g(-k) v) = k g(-k-1) v + g(-k) Dv`. The first term is always a
    /// canonical prepend; the recursive term reduces through the commutator
    /// rule when the deeper word no longer accepts the head.
    pub fn translate<C: Coeff>(&self, v: &State<C>) -> Result<State<C>, AlgebraError> {
        let mut out = State::zero();
        for (m, c) in v.iter() {
            let part = self.translate_monomial(m)?;
            for (pm, pc) in part.iter() {
                out.add_monomial(pm.clone(), c.scaled(pc));
            }
        }
        Ok(out)
    }

    pub fn translate_monomial(&self, m: &PbwMonomial) -> Result<State<BaseScalar>, AlgebraError> {
        let weights = self.spec.gen_weights();
        let Some(((g, k), rest)) = m.split_head(weights) else {
            return Ok(State::zero());
        };
        if let Some(hit) = self.d_memo.borrow().get(m) {
            return Ok(hit.clone());
        }
        // depth k+1 always prepends canonically ahead of the old head
        let mut out = State::monomial(
            rest.prepend(g, k + 1, weights),
            BaseScalar::from_int(k as i64),
        );
        let inner = self.translate_monomial(&rest)?;
        out.add_state(&self.gen_mode(g, -(k as i64), &inner)?);
        self.d_memo.borrow_mut().insert(m.clone(), out.clone());
        Ok(out)
    }

    /// `D^k / k!` applied to a state.
    pub fn d_pow_over_factorial<C: Coeff>(
        &self,
        v: &State<C>,
        k: u32,
    ) -> Result<State<C>, AlgebraError> {
        let mut s = v.clone();
        for t in 1..=k {
            s = self.translate(&s)?.scale(&BaseScalar::ratio(1, t as i64));
        }
        Ok(s)
    }

    /// `u_n v` where `u` is an arbitrary state with exact coefficients.
    pub fn state_mode<C: Coeff>(
        &self,
        u: &State<BaseScalar>,
        n: i64,
        v: &State<C>,
    ) -> Result<State<C>, AlgebraError> {
        let mut out = State::zero();
        for (m, c) in u.iter() {
            let part = self.monomial_mode(m, n, v)?;
            out.add_scaled(&part, c);
        }
        Ok(out)
    }

    /// `u_n v` where `u` carries linear-form coefficients and `v` is exact.
    pub fn form_state_mode(
        &self,
        u: &State<crate::scalar::LinearForm>,
        n: i64,
        v: &State<BaseScalar>,
    ) -> Result<State<crate::scalar::LinearForm>, AlgebraError> {
        let mut out = State::zero();
        for (m, f) in u.iter() {
            let part: State<BaseScalar> = self.monomial_mode(m, n, v)?;
            for (pm, pc) in part.iter() {
                out.add_monomial(pm.clone(), f.scale(pc));
            }
        }
        Ok(out)
    }

    /// Mode of a single canonical monomial acting on a state: the vacuum is
    /// the identity at n = -1, and a word `g_{-p} u'` expands by the iterate
    /// formula
    /// `(g_{-p} u')_n = sum_i C(-p,i)(-1)^i [ g_{-p-i} u'_{n+i}
    ///                                        - (-1)^p u'_{n-p-i} g_i ]`.
    pub fn monomial_mode<C: Coeff>(
        &self,
        u: &PbwMonomial,
        n: i64,
        v: &State<C>,
    ) -> Result<State<C>, AlgebraError> {
        if v.is_zero() {
            return Ok(State::zero());
        }
        if u.is_vacuum() {
            return Ok(if n == -1 { v.clone() } else { State::zero() });
        }
        let out_weight = u.weight() as i64 - n - 1 + v.max_weight().unwrap_or(0) as i64;
        if out_weight < 0 {
            return Ok(State::zero());
        }
        self.step()?;
        let weights = self.spec.gen_weights();
        let ((g, p), rest) = u.split_head(weights).expect("nonvacuum");
        if rest.is_vacuum() && p == 1 {
            return self.gen_mode(g, n, v);
        }
        let vmax = v.max_weight().unwrap_or(0) as i64;
        let bound_a = rest.weight() as i64 + vmax - n - 1;
        let bound_b = self.spec.weight_of(g) as i64 + vmax - 1;
        let imax = bound_a.max(bound_b);
        let mut out: State<C> = State::zero();
        let mut i = 0i64;
        while i <= imax {
            let coef = gen_binomial(-(p as i64), i as u32)
                * if i % 2 == 0 {
                    crate::scalar::rat_int(1)
                } else {
                    crate::scalar::rat_int(-1)
                };
            // g_{-p-i} (rest_{n+i} v)
            let inner1 = self.monomial_mode(&rest, n + i, v)?;
            let t1 = self.gen_mode(g, -(p as i64) - i, &inner1)?;
            out.add_scaled(&t1, &BaseScalar::from_rat(coef.clone()));
            // -(-1)^p rest_{n-p-i} (g_i v)
            let inner2 = self.gen_mode(g, i, v)?;
            let t2 = self.monomial_mode(&rest, n - p as i64 - i, &inner2)?;
            let sign = if p % 2 == 0 { -1 } else { 1 };
            out.add_scaled(&t2, &BaseScalar::from_rat(coef * crate::scalar::rat_int(sign)));
            i += 1;
        }
        #[cfg(debug_assertions)]
        for extra in 1..=2 {
            let i = imax + extra;
            let z1 = self.monomial_mode(&rest, n + i, v)?;
            let z2 = self.gen_mode(g, i, v)?;
            debug_assert!(
                z1.is_zero() && z2.is_zero(),
                "iterate truncation bound too small"
            );
        }
        Ok(out)
    }
}

/// A single violated identity found by [`validate_algebra`].
#[derive(Clone, Debug)]
pub enum Violation {
    /// skew self-consistency of a diagonal entry failed at this mode index
    SkewSelf { i: u16, alpha: u32, detail: String },
    /// generator-level commutator identity failed
    Commutator {
        i: u16,
        j: u16,
        k: u16,
        m: i64,
        n: i64,
        detail: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SkewSelf { i, alpha, detail } => {
                write!(f, "skew self-consistency (i={i}, alpha={alpha}): {detail}")
            }
            Violation::Commutator { i, j, k, m, n, detail } => write!(
                f,
                "commutator identity (i={i}, j={j}, k={k}, m={m}, n={n}): {detail}"
            ),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the t^0 consistency of the table: skew self-consistency of the
/// diagonal entries and the generator-level commutator identity
/// `[u_m, v_n] w = sum_a C(m,a) (u_a v)_{m+n-a} w` for all triples within the
/// mode window `m + n <= cap`.
pub fn validate_algebra(spec: &AlgebraSpec, cap: u32) -> Result<ValidationReport, AlgebraError> {
    let eng = Engine::new(spec);
    let mut report = ValidationReport::default();
    let r = spec.rank() as u16;
    // skew self-consistency: g_a g = sum_b (-1)^{a+b+1} D^b/b! (g_{a+b} g)
    for i in 0..r {
        let gi = GeneratorId(i);
        let bound = 2 * spec.weight_of(gi);
        for alpha in 0..bound {
            let stored = spec.ope_entry(gi, gi, alpha);
            let mut derived: State<BaseScalar> = State::zero();
            for beta in 0..=(bound - 1 - alpha) {
                if let Some(e) = spec.ope_entry_ref(gi, gi, alpha + beta) {
                    let sign = if (alpha + beta + 1) % 2 == 0 { 1 } else { -1 };
                    derived.add_scaled(
                        &eng.d_pow_over_factorial(e, beta)?,
                        &BaseScalar::from_int(sign),
                    );
                }
            }
            let mut diff = stored;
            diff.sub_state(&derived);
            if !diff.is_zero() {
                report.violations.push(Violation::SkewSelf {
                    i,
                    alpha,
                    detail: spec.render_scalar_state(&diff),
                });
            }
        }
    }
    // commutator identity on generator targets
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                let (gi, gj, gk) = (GeneratorId(i), GeneratorId(j), GeneratorId(k));
                let target = spec.gen_state(gk);
                for m in 0..=cap as i64 {
                    for n in 0..=(cap as i64 - m) {
                        let lhs1 = eng.gen_mode(gi, m, &eng.gen_mode(gj, n, &target)?)?;
                        let lhs2 = eng.gen_mode(gj, n, &eng.gen_mode(gi, m, &target)?)?;
                        let mut lhs = lhs1;
                        lhs.sub_state(&lhs2);
                        let amax = (spec.weight_of(gi) + spec.weight_of(gj)).min(m as u32 + 1);
                        let mut rhs: State<BaseScalar> = State::zero();
                        for alpha in 0..amax {
                            let b = gen_binomial(m, alpha);
                            if b.is_zero() {
                                continue;
                            }
                            if let Some(e) = spec.ope_entry_ref(gi, gj, alpha) {
                                let part =
                                    eng.state_mode(e, m + n - alpha as i64, &target)?;
                                rhs.add_scaled(&part, &BaseScalar::from_rat(b));
                            }
                        }
                        lhs.sub_state(&rhs);
                        if !lhs.is_zero() {
                            report.violations.push(Violation::Commutator {
                                i,
                                j,
                                k,
                                m,
                                n,
                                detail: spec.render_scalar_state(&lhs),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Default validation cap: the full grading-nontrivial window over triples.
pub fn default_validation_cap(spec: &AlgebraSpec) -> u32 {
    (3 * spec.max_weight()).saturating_sub(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::{heisenberg, virasoro, Param};
    use crate::scalar::rat_int;

    fn vmono(spec: &AlgebraSpec, factors: &[(u16, u32)]) -> PbwMonomial {
        PbwMonomial::from_canonical(
            factors.iter().map(|&(g, d)| (GeneratorId(g), d)).collect(),
            spec.gen_weights(),
        )
    }

    #[test]
    fn virasoro_gen_modes() {
        let spec = virasoro(Param::Symbolic("c".into()));
        let eng = Engine::new(&spec);
        let w = GeneratorId(0);
        // w_1 (w(-1)|0>) = 2 w(-1)|0>
        let out = eng.gen_mode(w, 1, &spec.gen_state(w)).unwrap();
        assert_eq!(out, spec.gen_state(w).scale(&BaseScalar::from_int(2)));
        // w_-1 (w(-2)|0>) = w(-2)w(-1)|0> + w(-4)|0>
        let dw = State::monomial(vmono(&spec, &[(0, 2)]), BaseScalar::one());
        let out = eng.gen_mode(w, -1, &dw).unwrap();
        assert_eq!(out.coeff(&vmono(&spec, &[(0, 2), (0, 1)])), BaseScalar::one());
        assert_eq!(out.coeff(&vmono(&spec, &[(0, 4)])), BaseScalar::one());
        assert_eq!(out.len(), 2);
        // grading: weight of every output term is wt(g) - n - 1 + wt(v)
        assert_eq!(out.homogeneous_weight(), Some(2 + 1 - 1 + 3));
    }

    #[test]
    fn heisenberg_modes_and_state_modes() {
        let spec = heisenberg(2, Param::Symbolic("l".into())).unwrap();
        let eng = Engine::new(&spec);
        let (e1, e2) = (GeneratorId(0), GeneratorId(1));
        // orthogonal generators annihilate: e1_1 e2 = 0
        assert!(eng.gen_mode(e1, 1, &spec.gen_state(e2)).unwrap().is_zero());
        // vacuum acts as the identity at n = -1 and as zero otherwise
        let v = spec.gen_state(e1);
        assert_eq!(
            eng.monomial_mode(&PbwMonomial::vacuum(), -1, &v).unwrap(),
            v
        );
        assert!(eng
            .monomial_mode(&PbwMonomial::vacuum(), 0, &v)
            .unwrap()
            .is_zero());
        // (e1(-1)e2(-1)|0>)_1 e1 = l e2(-1)|0>
        let actor = State::monomial(vmono(&spec, &[(0, 1), (1, 1)]), BaseScalar::one());
        let out = eng.state_mode(&actor, 1, &spec.gen_state(e1)).unwrap();
        assert_eq!(out, spec.gen_state(e2).scale(&BaseScalar::param("l")));
    }

    #[test]
    fn translation_needs_commutators() {
        let spec = virasoro(Param::Value(rat_int(0)));
        let eng = Engine::new(&spec);
        // D(w(-1)|0>) = w(-2)|0>
        let d = eng.translate(&spec.gen_state(GeneratorId(0))).unwrap();
        assert_eq!(
            d,
            State::monomial(vmono(&spec, &[(0, 2)]), BaseScalar::one())
        );
        // D(w(-1)w(-1)|0>) = 2 w(-2)w(-1)|0> + w(-4)|0>
        let q = State::monomial(vmono(&spec, &[(0, 1), (0, 1)]), BaseScalar::one());
        let d = eng.translate(&q).unwrap();
        assert_eq!(d.coeff(&vmono(&spec, &[(0, 2), (0, 1)])), BaseScalar::from_int(2));
        assert_eq!(d.coeff(&vmono(&spec, &[(0, 4)])), BaseScalar::one());
        // D(w(-2)w(-2)|0>) = 4 w(-3)w(-2)|0> + 2 w(-6)|0>
        let q = State::monomial(vmono(&spec, &[(0, 2), (0, 2)]), BaseScalar::one());
        let d = eng.translate(&q).unwrap();
        assert_eq!(d.coeff(&vmono(&spec, &[(0, 3), (0, 2)])), BaseScalar::from_int(4));
        assert_eq!(d.coeff(&vmono(&spec, &[(0, 6)])), BaseScalar::from_int(2));
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn leibniz_on_commuting_factors() {
        let spec = heisenberg(2, Param::Value(rat_int(1))).unwrap();
        let eng = Engine::new(&spec);
        // D(e1(-2)e2(-1)|0>) = 2 e1(-3)e2(-1)|0> + e1(-2)e2(-2)|0>
        let s = State::monomial(vmono(&spec, &[(0, 2), (1, 1)]), BaseScalar::one());
        let d = eng.translate(&s).unwrap();
        assert_eq!(d.coeff(&vmono(&spec, &[(0, 3), (1, 1)])), BaseScalar::from_int(2));
        assert_eq!(d.coeff(&vmono(&spec, &[(0, 2), (1, 2)])), BaseScalar::one());
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn corrupted_table_reported() {
        // inject w_1 w = 3 w instead of 2 w
        let mut ope = OpeTable::new();
        let weights = [2u32];
        let m = |f: &[(u16, u32)]| {
            PbwMonomial::from_canonical(
                f.iter().map(|&(g, d)| (GeneratorId(g), d)).collect(),
                &weights[..],
            )
        };
        ope.set(0, 0, 0, State::monomial(m(&[(0, 2)]), BaseScalar::one()));
        ope.set(0, 0, 1, State::monomial(m(&[(0, 1)]), BaseScalar::from_int(3)));
        ope.set(
            0,
            0,
            3,
            State::monomial(PbwMonomial::vacuum(), BaseScalar::ratio(1, 2)),
        );
        let spec = AlgebraSpec::new(
            FieldDesc::rational(),
            vec![Gen {
                name: "w".into(),
                weight: 2,
            }],
            ope,
        )
        .unwrap();
        let report = validate_algebra(&spec, 4).unwrap();
        assert!(!report.is_clean());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Commutator { .. })));
    }

    #[test]
    fn filtration_discipline() {
        // nonnegative modes land in E_{m+n-1}: filtration of every output
        // monomial is at most filt(g) + filt(v) - 1
        let spec = virasoro(Param::Symbolic("c".into()));
        let eng = Engine::new(&spec);
        let w = GeneratorId(0);
        for weight in 2..=8u32 {
            for m in spec.basis(weight) {
                let filt_in = m.filtration(spec.gen_weights());
                let v = State::monomial(m, BaseScalar::one());
                for n in 0..=4i64 {
                    let out = eng.gen_mode(w, n, &v).unwrap();
                    for (om, _) in out.iter() {
                        assert!(
                            om.filtration(spec.gen_weights()) <= filt_in + 2 - 1,
                            "filtration grew: n={n}"
                        );
                    }
                }
            }
        }
    }
}
