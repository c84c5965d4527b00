//! Homogeneous linear forms over deformation unknowns.
//!
//! Every quantity built from the first-order part of a deformed vertex
//! operator is linear in the unknown registry, so coefficients carry a sparse
//! `UnknownId -> BaseScalar` map with no constant term. The missing constant
//! slot is deliberate: the zero deformation must map to the zero form, which
//! makes every generated constraint homogeneous by construction.

use super::BaseScalar;
use std::collections::BTreeMap;
use std::fmt;

/// Index into the deformation-unknown registry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnknownId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LinearForm {
    terms: BTreeMap<UnknownId, BaseScalar>,
}

impl LinearForm {
    pub fn zero() -> Self {
        LinearForm::default()
    }

    pub fn unknown(id: UnknownId) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(id, BaseScalar::one());
        LinearForm { terms }
    }

    pub fn term(id: UnknownId, coeff: BaseScalar) -> Self {
        let mut f = LinearForm::zero();
        f.add_term(id, coeff);
        f
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

    pub fn iter(&self) -> impl Iterator<Item = (&UnknownId, &BaseScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, id: UnknownId) -> BaseScalar {
        self.terms.get(&id).cloned().unwrap_or_else(BaseScalar::zero)
    }

    pub fn add_term(&mut self, id: UnknownId, coeff: BaseScalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(id) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&coeff);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add_assign_form(&mut self, other: &LinearForm) {
        for (id, c) in &other.terms {
            self.add_term(*id, c.clone());
        }
    }

    pub fn sub_form(&self, other: &LinearForm) -> LinearForm {
        let mut out = self.clone();
        for (id, c) in &other.terms {
            out.add_term(*id, c.neg());
        }
        out
    }

    pub fn scale(&self, k: &BaseScalar) -> LinearForm {
        if k.is_zero() {
            return LinearForm::zero();
        }
        let mut out = LinearForm::zero();
        for (id, c) in &self.terms {
            out.add_term(*id, c.mul(k));
        }
        out
    }

    pub fn neg(&self) -> LinearForm {
        let mut out = LinearForm::zero();
        for (id, c) in &self.terms {
            out.add_term(*id, c.neg());
        }
        out
    }

    /// Evaluates the form at a full unknown assignment.
    pub fn substitute(&self, assignment: &[BaseScalar]) -> BaseScalar {
        let mut acc = BaseScalar::zero();
        for (id, c) in &self.terms {
            acc = acc.add(&c.mul(&assignment[id.0 as usize]));
        }
        acc
    }

    pub fn render(&self, name_of: impl Fn(UnknownId) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (id, c) in &self.terms {
            if c.is_one() {
                parts.push(name_of(*id));
            } else {
                parts.push(format!("{}*{}", c.render_factor(), name_of(*id)));
            }
        }
        parts.join(" + ")
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(|id| format!("u{}", id.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_then_add_equals_add_then_scale() {
        let a = LinearForm::term(UnknownId(0), BaseScalar::from_int(2));
        let b = LinearForm::term(UnknownId(1), BaseScalar::ratio(1, 3));
        let k = BaseScalar::ratio(-7, 2);

        let mut left = a.scale(&k);
        left.add_assign_form(&b.scale(&k));

        let mut sum = a.clone();
        sum.add_assign_form(&b);
        let right = sum.scale(&k);

        assert_eq!(left, right);
    }

    #[test]
    fn cancellation_drops_entries() {
        let mut f = LinearForm::unknown(UnknownId(3));
        f.add_term(UnknownId(3), BaseScalar::from_int(-1));
        assert!(f.is_zero());
    }

    #[test]
    fn substitute_evaluates() {
        let mut f = LinearForm::term(UnknownId(0), BaseScalar::from_int(2));
        f.add_term(UnknownId(1), BaseScalar::from_int(-1));
        let val = f.substitute(&[BaseScalar::ratio(1, 2), BaseScalar::one()]);
        assert!(val.is_zero());
    }
}
