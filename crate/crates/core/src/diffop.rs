//! Differential operators `Σ a_j ∂^j` (coefficients on the left) over one chart.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::chart::{ChartElement, ChartId, Curve, Inclusion};
use crate::error::{DeformError, Result};
use crate::scalar::Scalar;
use crate::syntax::format_element;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiffOp {
    chart: ChartId,
    terms: BTreeMap<u32, ChartElement>,
}

fn binomial(n: u32, k: u32) -> Scalar {
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Scalar::from_integer(acc)
}

impl DiffOp {
    pub fn zero(chart: ChartId) -> Self {
        DiffOp {
            chart,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(chart: ChartId) -> Self {
        Self::multiplication(ChartElement::one(chart))
    }

    /// The distinguished derivation of the chart as an order-one operator.
    pub fn derivation(chart: ChartId) -> Self {
        Self::zero(chart).with_term(1, ChartElement::one(chart))
    }

    pub fn multiplication(u: ChartElement) -> Self {
        Self::zero(u.chart()).with_term(0, u)
    }

    /// Adds `coeff ∂^order`.
    pub fn with_term(mut self, order: u32, coeff: ChartElement) -> Self {
        self.add_term(order, &coeff);
        self
    }

    fn add_term(&mut self, order: u32, coeff: &ChartElement) {
        assert_eq!(coeff.chart(), self.chart, "chart mismatch in operator term");
        if coeff.is_zero() {
            return;
        }
        let slot = self
            .terms
            .entry(order)
            .or_insert_with(|| ChartElement::zero(coeff.chart()));
        slot.add_assign_ref(coeff);
        if slot.is_zero() {
            self.terms.remove(&order);
        }
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn terms(&self) -> &BTreeMap<u32, ChartElement> {
        &self.terms
    }

    pub fn coefficient(&self, order: u32) -> ChartElement {
        self.terms
            .get(&order)
            .cloned()
            .unwrap_or_else(|| ChartElement::zero(self.chart))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest power of `∂` with nonzero coefficient; `None` for the zero operator.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero(self.chart);
        if !c.is_zero() {
            for (j, a) in &self.terms {
                out.terms.insert(*j, a.scale(c));
            }
        }
        out
    }

    pub fn add(&self, other: &DiffOp) -> Result<DiffOp> {
        self.check(other.chart)?;
        let mut out = self.clone();
        out.add_assign(other);
        Ok(out)
    }

    pub(crate) fn add_assign(&mut self, other: &DiffOp) {
        for (j, a) in &other.terms {
            self.add_term(*j, a);
        }
    }

    pub(crate) fn add_scaled(&mut self, other: &DiffOp, c: &Scalar) {
        for (j, a) in &other.terms {
            self.add_term(*j, &a.scale(c));
        }
    }

    pub fn sub(&self, other: &DiffOp) -> Result<DiffOp> {
        self.check(other.chart)?;
        let mut out = self.clone();
        out.add_scaled(other, &-Scalar::from_integer(1.into()));
        Ok(out)
    }

    fn check(&self, chart: ChartId) -> Result<()> {
        if self.chart != chart {
            return Err(DeformError::ChartMismatch {
                expected: self.chart,
                found: chart,
            });
        }
        Ok(())
    }
}

impl Curve {
    /// `P(u) = Σ a_j ∂^j(u)`.
    pub fn op_apply(&self, p: &DiffOp, u: &ChartElement) -> Result<ChartElement> {
        p.check(u.chart())?;
        Ok(self.op_apply_unchecked(p, u))
    }

    pub(crate) fn op_apply_unchecked(&self, p: &DiffOp, u: &ChartElement) -> ChartElement {
        let mut out = ChartElement::zero(u.chart());
        let mut derived = u.clone();
        let mut level = 0;
        for (j, a) in &p.terms {
            while level < *j {
                derived = self.derive(&derived);
                level += 1;
            }
            out.add_assign_ref(&self.mul_unchecked(a, &derived));
        }
        out
    }

    /// Normal form of `P ∘ Q`, using `∂^j b = Σ_l C(j,l) ∂^l(b) ∂^(j-l)`.
    pub fn op_compose(&self, p: &DiffOp, q: &DiffOp) -> Result<DiffOp> {
        p.check(q.chart)?;
        Ok(self.op_compose_unchecked(p, q))
    }

    pub(crate) fn op_compose_unchecked(&self, p: &DiffOp, q: &DiffOp) -> DiffOp {
        let mut out = DiffOp::zero(p.chart);
        let max_j = p.order().unwrap_or(0);
        for (k, b) in &q.terms {
            // ∂^l(b) for l = 0..=max_j
            let mut derivs = Vec::with_capacity(max_j as usize + 1);
            derivs.push(b.clone());
            for l in 1..=max_j {
                let next = self.derive(&derivs[l as usize - 1]);
                derivs.push(next);
            }
            for (j, a) in &p.terms {
                for l in 0..=*j {
                    let d = &derivs[l as usize];
                    if d.is_zero() {
                        continue;
                    }
                    let coeff = self.mul_unchecked(a, d).scale(&binomial(*j, l));
                    out.add_term(j - l + k, &coeff);
                }
            }
        }
        out
    }

    /// Restricts the coefficients; `∂_1` and `∂_2` both restrict to `∂_3`.
    pub fn restrict_op(&self, p: &DiffOp, incl: Inclusion) -> Result<DiffOp> {
        p.check(incl.source)?;
        Ok(self.restrict_op_unchecked(p, incl))
    }

    pub(crate) fn restrict_op_unchecked(&self, p: &DiffOp, incl: Inclusion) -> DiffOp {
        let mut out = DiffOp::zero(incl.target);
        for (j, a) in &p.terms {
            out.add_term(*j, &self.restrict_unchecked(a, incl));
        }
        out
    }

    /// `[P, u] = P∘u - u∘P`.
    pub fn commutator_with(&self, p: &DiffOp, u: &ChartElement) -> DiffOp {
        let m = DiffOp::multiplication(u.clone());
        let mut out = self.op_compose_unchecked(p, &m);
        out.add_scaled(
            &self.op_compose_unchecked(&m, p),
            &-Scalar::from_integer(1.into()),
        );
        out
    }
}

/// `(c_j)*d^j + ...`, highest order first.
pub fn format_op(p: &DiffOp) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (j, a)) in p.terms.iter().rev().enumerate() {
        if k > 0 {
            out.push_str(" + ");
        }
        let _ = write!(out, "({})*d^{}", format_element(a), j);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{monomial_box, MonomialOrder};
    use crate::scalar::int;

    fn curve(a: i64, b: i64) -> Curve {
        Curve::from_ab(int(a), int(b)).unwrap()
    }

    #[test]
    fn apply_examples() {
        let c = curve(2, 3);
        let y = c.monomial(ChartId::U2, 0, 1).unwrap();
        let d2 = DiffOp::derivation(ChartId::U2);
        assert_eq!(
            c.op_apply(&d2, &y).unwrap(),
            c.element(ChartId::U2, &[(2, 0, int(-3)), (0, 0, int(-2))])
                .unwrap()
        );
        let id = DiffOp::identity(ChartId::U2);
        assert_eq!(c.op_apply(&id, &y).unwrap(), y);

        // (x ∂1)(z) = x(3x^2 + a z^2) = 3x^3 + a x z^2
        let x1 = c.monomial(ChartId::U1, 1, 0).unwrap();
        let z1 = c.monomial(ChartId::U1, 0, 1).unwrap();
        let p = DiffOp::zero(ChartId::U1).with_term(1, x1);
        let expect = c
            .element(ChartId::U1, &[(3, 0, int(3)), (1, 2, int(2))])
            .unwrap();
        assert_eq!(c.op_apply(&p, &z1).unwrap(), expect);
        assert_eq!(
            expect,
            c.element(
                ChartId::U1,
                &[(0, 1, int(3)), (1, 2, int(-6 + 2)), (0, 3, int(-9))]
            )
            .unwrap()
        );
        assert!(c.op_apply(&p, &y).is_err());
    }

    #[test]
    fn compose_examples() {
        let c = curve(1, 1);
        let d2 = DiffOp::derivation(ChartId::U2);
        let x = DiffOp::multiplication(c.monomial(ChartId::U2, 1, 0).unwrap());
        let comm = c
            .op_compose(&d2, &x)
            .unwrap()
            .sub(&c.op_compose(&x, &d2).unwrap())
            .unwrap();
        let expect = DiffOp::multiplication(c.element(ChartId::U2, &[(0, 1, int(-2))]).unwrap());
        assert_eq!(comm, expect);
        for m in monomial_box(ChartId::U2, 4, MonomialOrder::GradedLex) {
            let u = c.monomial(ChartId::U2, m.x, m.w).unwrap();
            assert_eq!(
                c.op_apply(&comm, &u).unwrap(),
                c.mul(&expect.coefficient(0), &u).unwrap()
            );
        }

        let d1 = DiffOp::derivation(ChartId::U1);
        let id1 = DiffOp::identity(ChartId::U1);
        assert_eq!(c.op_compose(&d1, &id1).unwrap(), d1);
        let dd = c.op_compose(&d1, &d1).unwrap();
        assert_eq!(
            dd,
            DiffOp::zero(ChartId::U1).with_term(2, ChartElement::one(ChartId::U1))
        );
    }

    #[test]
    fn restrict_examples() {
        let c = curve(1, 1);
        let d1 = DiffOp::derivation(ChartId::U1);
        assert_eq!(
            c.restrict_op(&d1, Inclusion::U1_U3).unwrap(),
            DiffOp::derivation(ChartId::U3)
        );
        let z1 = c.monomial(ChartId::U1, 0, 1).unwrap();
        let zd = DiffOp::zero(ChartId::U1).with_term(1, z1);
        assert_eq!(
            c.restrict_op(&zd, Inclusion::U1_U3).unwrap(),
            DiffOp::zero(ChartId::U3).with_term(1, c.inverse_y())
        );
        assert_eq!(
            c.restrict_op(&DiffOp::identity(ChartId::U2), Inclusion::U2_U3)
                .unwrap(),
            DiffOp::identity(ChartId::U3)
        );
        assert!(c.restrict_op(&zd, Inclusion::U2_U3).is_err());
    }

    #[test]
    fn formats_operators() {
        let c = curve(1, 1);
        let p =
            DiffOp::derivation(ChartId::U3).with_term(0, c.monomial(ChartId::U3, 2, -1).unwrap());
        assert_eq!(format_op(&p), "(1)*d^1 + (x^2*y^-1)*d^0");
        assert_eq!(format_op(&DiffOp::zero(ChartId::U3)), "0");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), int(10));
        assert_eq!(binomial(4, 0), int(1));
        assert_eq!(binomial(6, 6), int(1));
    }
}
