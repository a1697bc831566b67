//! Deformations of `O_X` over truncated algebras and the obstruction calculus.
//!
//! A deformation over `T` is given on each chart by the image `L(U)(∂) = ∂ ⊗ 1 + Σ ξ_l(U) ⊗ t_l`
//! of the derivation (functions act by plain multiplication) and on each inclusion
//! `U ⊇ U3` by a restriction map `m ⊗ 1 ↦ g · m|U3`, where `g ∈ A3 ⊗ T`. For the exponential
//! family `g = exp(Σ τ_l ⊗ t_l)` truncated at the order of `T`.
//!
//! Operators act on `A ⊗ T` by `(P ⊗ w)(m ⊗ v) = P(m) ⊗ wv`, so they are right `T`-linear and
//! compose by `(P ⊗ w)(Q ⊗ v) = PQ ⊗ wv`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::{Relation, TruncatedAlgebra, Word};
use crate::chart::{monomial_box, ChartElement, ChartId, Curve, Inclusion, MonomialOrder};
use crate::cohomology::{lift_to_cochain, CochainRep, CoverDiagram, H1Quotient};
use crate::diffop::{format_op, DiffOp};
use crate::error::{DeformError, Result};
use crate::ext::TruncationPolicy;
use crate::reference;
use crate::scalar::{int, Scalar};

/// An element of `A ⊗ T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorElement {
    chart: ChartId,
    terms: BTreeMap<Word, ChartElement>,
}

impl TensorElement {
    pub fn zero(chart: ChartId) -> Self {
        TensorElement {
            chart,
            terms: BTreeMap::new(),
        }
    }

    /// `m ⊗ 1`.
    pub fn pure(m: ChartElement) -> Self {
        let mut t = Self::zero(m.chart());
        t.add(Word::empty(), &m);
        t
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn terms(&self) -> &BTreeMap<Word, ChartElement> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &Word) -> ChartElement {
        self.terms
            .get(w)
            .cloned()
            .unwrap_or_else(|| ChartElement::zero(self.chart))
    }

    pub fn add(&mut self, w: Word, m: &ChartElement) {
        if m.is_zero() {
            return;
        }
        let slot = self
            .terms
            .entry(w.clone())
            .or_insert_with(|| ChartElement::zero(m.chart()));
        slot.add_assign_ref(m);
        if slot.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        for (w, m) in &other.terms {
            out.add(w.clone(), &-m);
        }
        out
    }

    fn scale(&self, c: &Scalar) -> TensorElement {
        let mut out = Self::zero(self.chart);
        for (w, m) in &self.terms {
            out.add(w.clone(), &m.scale(c));
        }
        out
    }
}

/// A finite sum `Σ P_w ⊗ w` of differential operators with algebra words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeformedOperator {
    chart: ChartId,
    terms: BTreeMap<Word, DiffOp>,
}

impl DeformedOperator {
    pub fn zero(chart: ChartId) -> Self {
        DeformedOperator {
            chart,
            terms: BTreeMap::new(),
        }
    }

    /// `P ⊗ 1`.
    pub fn classical(p: DiffOp) -> Self {
        let mut out = Self::zero(p.chart());
        out.add(Word::empty(), &p);
        out
    }

    /// Multiplication by `g ∈ A ⊗ T`.
    pub fn multiplication(g: &TensorElement) -> Self {
        let mut out = Self::zero(g.chart);
        for (w, m) in &g.terms {
            out.add(w.clone(), &DiffOp::multiplication(m.clone()));
        }
        out
    }

    pub fn add(&mut self, w: Word, p: &DiffOp) {
        if p.is_zero() {
            return;
        }
        let slot = self
            .terms
            .entry(w.clone())
            .or_insert_with(|| DiffOp::zero(p.chart()));
        slot.add_assign(p);
        if slot.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn sub(&self, other: &DeformedOperator) -> DeformedOperator {
        let mut out = self.clone();
        let minus = -Scalar::one();
        for (w, p) in &other.terms {
            out.add(w.clone(), &p.scale(&minus));
        }
        out
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn terms(&self) -> &BTreeMap<Word, DiffOp> {
        &self.terms
    }

    pub fn coefficient(&self, w: &Word) -> DiffOp {
        self.terms
            .get(w)
            .cloned()
            .unwrap_or_else(|| DiffOp::zero(self.chart))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The classical operator obtained by setting every `t_l` to zero.
    pub fn residue(&self) -> DiffOp {
        self.coefficient(&Word::empty())
    }
}

/// Arithmetic on `A ⊗ T` and its operators for one curve and one truncated algebra.
#[derive(Debug, Clone, Copy)]
struct Ops<'a> {
    curve: &'a Curve,
    algebra: TruncatedAlgebra,
}

impl Ops<'_> {
    fn compose(&self, p: &DeformedOperator, q: &DeformedOperator) -> DeformedOperator {
        let mut out = DeformedOperator::zero(p.chart);
        for (w, pw) in &p.terms {
            for (v, qv) in &q.terms {
                if let Some(wv) = self.algebra.mul(w, v) {
                    out.add(wv, &self.curve.op_compose_unchecked(pw, qv));
                }
            }
        }
        out
    }

    fn apply(&self, p: &DeformedOperator, m: &TensorElement) -> TensorElement {
        let mut out = TensorElement::zero(m.chart);
        for (w, pw) in &p.terms {
            for (v, mv) in &m.terms {
                if let Some(wv) = self.algebra.mul(w, v) {
                    out.add(wv, &self.curve.op_apply_unchecked(pw, mv));
                }
            }
        }
        out
    }

    fn mul(&self, u: &TensorElement, v: &TensorElement) -> TensorElement {
        let mut out = TensorElement::zero(u.chart);
        for (w1, a) in &u.terms {
            for (w2, b) in &v.terms {
                if let Some(w) = self.algebra.mul(w1, w2) {
                    out.add(w, &self.curve.mul_unchecked(a, b));
                }
            }
        }
        out
    }

    /// `m ⊗ v ↦ Σ_w g_w · m|V ⊗ wv`.
    fn restrict_with(
        &self,
        g: &TensorElement,
        incl: Inclusion,
        m: &TensorElement,
    ) -> TensorElement {
        let mut out = TensorElement::zero(incl.target);
        for (v, mv) in &m.terms {
            let restricted = self.curve.restrict_unchecked(mv, incl);
            for (w, gw) in &g.terms {
                if let Some(wv) = self.algebra.mul(w, v) {
                    out.add(wv, &self.curve.mul_unchecked(gw, &restricted));
                }
            }
        }
        out
    }

    /// `Σ_{n <= order} X^n / n!`.
    fn exp(&self, x: &TensorElement) -> TensorElement {
        let mut out = TensorElement::pure(ChartElement::one(x.chart));
        let mut power = out.clone();
        let mut factorial = Scalar::one();
        for n in 1..=self.algebra.order {
            power = self.mul(&power, x);
            if power.is_zero() {
                break;
            }
            factorial *= int(n as i64);
            let term = power.scale(&factorial.recip());
            for (w, m) in &term.terms {
                out.add(w.clone(), m);
            }
        }
        out
    }
}

/// Deformed module structure per chart and deformed restriction maps per inclusion.
#[derive(Debug, Clone)]
pub struct DeformationData {
    curve: Curve,
    algebra: TruncatedAlgebra,
    reps: Vec<CochainRep>,
    derivation_images: Vec<DeformedOperator>,
    restrictions: Vec<(Inclusion, TensorElement)>,
}

impl DeformationData {
    /// Restriction maps `exp(Σ τ_l ⊗ t_l)` truncated at the order of `algebra`; the derivation
    /// of each chart goes to `∂ ⊗ 1 + Σ ξ_l ⊗ t_l`.
    pub fn exponential(curve: &Curve, reps: &[CochainRep], algebra: TruncatedAlgebra) -> Self {
        assert_eq!(
            reps.len(),
            algebra.generators,
            "one representative per generator"
        );
        let ops = Ops { curve, algebra };
        let derivation_images = ChartId::ALL
            .iter()
            .map(|&chart| {
                let mut op = DeformedOperator::classical(DiffOp::derivation(chart));
                for (l, rep) in reps.iter().enumerate() {
                    if let Some(w) = algebra.normalize(Word::generator(l as u8 + 1)) {
                        op.add(w, &DiffOp::multiplication(rep.xi[chart.index()].clone()));
                    }
                }
                op
            })
            .collect();
        let restrictions = Inclusion::NONTRIVIAL
            .iter()
            .map(|&incl| {
                let mut x = TensorElement::zero(ChartId::U3);
                for (l, rep) in reps.iter().enumerate() {
                    if let Some(w) = algebra.normalize(Word::generator(l as u8 + 1)) {
                        x.add(w, rep.tau_on(incl));
                    }
                }
                (incl, ops.exp(&x))
            })
            .collect();
        DeformationData {
            curve: curve.clone(),
            algebra,
            reps: reps.to_vec(),
            derivation_images,
            restrictions,
        }
    }

    /// The same data with every word renormalized in another algebra.
    pub fn over(&self, algebra: TruncatedAlgebra) -> Self {
        assert_eq!(algebra.generators, self.algebra.generators);
        let renorm_op = |op: &DeformedOperator| {
            let mut out = DeformedOperator::zero(op.chart);
            for (w, p) in &op.terms {
                if let Some(w2) = algebra.normalize(w.clone()) {
                    out.add(w2, p);
                }
            }
            out
        };
        let renorm_t = |t: &TensorElement| {
            let mut out = TensorElement::zero(t.chart);
            for (w, m) in &t.terms {
                if let Some(w2) = algebra.normalize(w.clone()) {
                    out.add(w2, m);
                }
            }
            out
        };
        DeformationData {
            curve: self.curve.clone(),
            algebra,
            reps: self.reps.clone(),
            derivation_images: self.derivation_images.iter().map(renorm_op).collect(),
            restrictions: self
                .restrictions
                .iter()
                .map(|(i, g)| (*i, renorm_t(g)))
                .collect(),
        }
    }

    fn ops(&self) -> Ops<'_> {
        Ops {
            curve: &self.curve,
            algebra: self.algebra,
        }
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn algebra(&self) -> TruncatedAlgebra {
        self.algebra
    }

    pub fn reps(&self) -> &[CochainRep] {
        &self.reps
    }

    /// `L(U)(∂_U)`.
    pub fn derivation_image(&self, chart: ChartId) -> &DeformedOperator {
        &self.derivation_images[chart.index()]
    }

    /// `L(U)(a) = a ⊗ 1` for functions.
    pub fn function_image(&self, a: &ChartElement) -> DeformedOperator {
        DeformedOperator::classical(DiffOp::multiplication(a.clone()))
    }

    /// `L(U)(P)` for any operator `P = Σ a_j ∂^j`, extended multiplicatively.
    pub fn image(&self, p: &DiffOp) -> DeformedOperator {
        let ops = self.ops();
        let chart = p.chart();
        let d = self.derivation_image(chart);
        let mut out = DeformedOperator::zero(chart);
        let mut power = DeformedOperator::classical(DiffOp::identity(chart));
        let mut level = 0;
        for (j, a) in p.terms() {
            while level < *j {
                power = ops.compose(&power, d);
                level += 1;
            }
            let term = ops.compose(&self.function_image(a), &power);
            for (w, q) in &term.terms {
                out.add(w.clone(), q);
            }
        }
        out
    }

    /// The multiplier `g` of `L(U,V)`; identities for identity inclusions.
    pub fn restriction(&self, incl: Inclusion) -> TensorElement {
        if incl.is_identity() {
            return TensorElement::pure(ChartElement::one(incl.target));
        }
        self.restrictions
            .iter()
            .find(|(i, _)| *i == incl)
            .map(|(_, g)| g.clone())
            .expect("nontrivial inclusions carry a restriction map")
    }

    /// Whether setting every `t_l` to zero gives back the classical structure.
    pub fn residue_is_classical(&self) -> bool {
        ChartId::ALL.iter().all(|&c| {
            let d = self.derivation_image(c);
            d.residue() == DiffOp::derivation(c)
        }) && self
            .restrictions
            .iter()
            .all(|(_, g)| g.coefficient(&Word::empty()) == ChartElement::one(ChartId::U3))
    }
}

/// First-order family over `k<t1, .., tr>/(t)^2`.
pub fn build_tangent_family(curve: &Curve, reps: &[CochainRep]) -> DeformationData {
    DeformationData::exponential(curve, reps, TruncatedAlgebra::free(reps.len(), 1))
}

/// Exponential family over the commutative truncation `k[t1, .., tr]/(t)^(n+1)`.
pub fn build_exponential_family(curve: &Curve, reps: &[CochainRep], n: usize) -> DeformationData {
    DeformationData::exponential(curve, reps, TruncatedAlgebra::commutative(reps.len(), n))
}

/// One failing identity among the three conditions on `(L(U), L(U,V))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// 1: `L(U)` is an algebra map; 2: restrictions are `D`-linear; 3: restrictions compose.
    pub condition: u8,
    pub location: String,
    pub generator: String,
    /// Defect operator, by algebra word.
    pub defect: BTreeMap<Word, DiffOp>,
    /// How many monomials of the test box see a nonzero defect.
    pub failing_monomials: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "condition ({}) at {} for {}:",
            self.condition, self.location, self.generator
        )?;
        for (w, p) in &self.defect {
            write!(f, " [{w}] {}", format_op(p))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeformationCheck {
    pub violations: Vec<Violation>,
    pub degree_bound: usize,
}

impl DeformationCheck {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn for_condition(&self, condition: u8) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(move |v| v.condition == condition)
    }
}

/// Verifies the three conditions on generators, symbolically and on every monomial of
/// degree `<= degree_bound` in the source chart.
pub fn check_deformation(data: &DeformationData, degree_bound: usize) -> DeformationCheck {
    let ops = data.ops();
    let curve = &data.curve;
    let mut violations = Vec::new();

    let mut record = |condition: u8,
                      location: String,
                      generator: String,
                      defect: DeformedOperator,
                      failing: usize| {
        if !defect.is_zero() || failing > 0 {
            violations.push(Violation {
                condition,
                location,
                generator,
                defect: defect.terms,
                failing_monomials: failing,
            });
        }
    };

    let test_box = |chart: ChartId| -> Vec<TensorElement> {
        monomial_box(chart, degree_bound, MonomialOrder::GradedLex)
            .into_iter()
            .map(|m| TensorElement::pure(ChartElement::monomial(chart, m, Scalar::one())))
            .collect()
    };

    // (1) L(U) respects the relations [∂, a] = ∂(a) and [a, b] = 0 of D(U)
    for chart in ChartId::ALL {
        let d = data.derivation_image(chart);
        let gens = curve.coordinate_generators(chart);
        let samples = test_box(chart);
        for (name, a) in &gens {
            let la = data.function_image(a);
            let lda = data.image(&DiffOp::multiplication(curve.derive(a)));
            let symbolic = ops.compose(d, &la).sub(&ops.compose(&la, d)).sub(&lda);
            let failing = samples
                .par_iter()
                .filter(|m| {
                    let lhs = ops
                        .apply(d, &ops.apply(&la, m))
                        .sub(&ops.apply(&la, &ops.apply(d, m)));
                    !lhs.sub(&ops.apply(&lda, m)).is_zero()
                })
                .count();
            record(
                1,
                chart.to_string(),
                format!("[d, {name}]"),
                symbolic,
                failing,
            );
        }
        for (i, (n1, a)) in gens.iter().enumerate() {
            for (n2, b) in gens.iter().skip(i + 1) {
                let la = data.function_image(a);
                let lb = data.function_image(b);
                let symbolic = ops.compose(&la, &lb).sub(&ops.compose(&lb, &la));
                let failing = samples
                    .par_iter()
                    .filter(|m| {
                        !ops.apply(&la, &ops.apply(&lb, m))
                            .sub(&ops.apply(&lb, &ops.apply(&la, m)))
                            .is_zero()
                    })
                    .count();
                record(
                    1,
                    chart.to_string(),
                    format!("[{n1}, {n2}]"),
                    symbolic,
                    failing,
                );
            }
        }
    }

    // (2) L(U,V) ∘ L(U)(P) = L(V)(P|V) ∘ L(U,V)
    for incl in Inclusion::NONTRIVIAL {
        let g = data.restriction(incl);
        let g_op = DeformedOperator::multiplication(&g);
        let mut gens: Vec<(String, DiffOp)> = vec![("d".into(), DiffOp::derivation(incl.source))];
        gens.extend(
            curve
                .coordinate_generators(incl.source)
                .into_iter()
                .map(|(n, a)| (n.to_string(), DiffOp::multiplication(a))),
        );
        let samples = test_box(incl.source);
        for (name, p) in gens {
            let lp = data.image(&p);
            let lp_restricted = data.image(&curve.restrict_op_unchecked(&p, incl));
            let mut lhs = DeformedOperator::zero(incl.target);
            for (w, gw) in &g.terms {
                for (v, pv) in &lp.terms {
                    if let Some(wv) = data.algebra.mul(w, v) {
                        let rp = curve.restrict_op_unchecked(pv, incl);
                        lhs.add(
                            wv,
                            &curve.op_compose_unchecked(&DiffOp::multiplication(gw.clone()), &rp),
                        );
                    }
                }
            }
            let symbolic = lhs.sub(&ops.compose(&lp_restricted, &g_op));
            let failing = samples
                .par_iter()
                .filter(|m| {
                    let l = ops.restrict_with(&g, incl, &ops.apply(&lp, m));
                    let r = ops.apply(&lp_restricted, &ops.restrict_with(&g, incl, m));
                    !l.sub(&r).is_zero()
                })
                .count();
            record(2, incl.to_string(), name, symbolic, failing);
        }
    }

    // (3) L(V,W) ∘ L(U,V) = L(U,W) along every chain U ⊇ V ⊇ W
    for first in Inclusion::ALL {
        for second in Inclusion::ALL.iter().filter(|i| i.source == first.target) {
            let outer = Inclusion::new(first.source, second.target).expect("chains compose");
            let g1 = data.restriction(first);
            let g2 = data.restriction(*second);
            let g = data.restriction(outer);
            let mut composed = TensorElement::zero(second.target);
            for (w, a) in &g2.terms {
                for (v, b) in &g1.terms {
                    if let Some(wv) = data.algebra.mul(w, v) {
                        let rb = curve.restrict_unchecked(b, *second);
                        composed.add(wv, &curve.mul_unchecked(a, &rb));
                    }
                }
            }
            let symbolic = DeformedOperator::multiplication(&composed.sub(&g));
            let failing = test_box(first.source)
                .par_iter()
                .filter(|m| {
                    let two_step =
                        ops.restrict_with(&g2, *second, &ops.restrict_with(&g1, first, m));
                    !two_step.sub(&ops.restrict_with(&g, outer, m)).is_zero()
                })
                .count();
            record(
                3,
                format!("{}>={}>={}", first.source, first.target, second.target),
                "restriction".into(),
                symbolic,
                failing,
            );
        }
    }

    DeformationCheck {
        violations,
        degree_bound,
    }
}

/// Obstruction of the naive lift of the order-two family: for each word `t_i t_j`, its
/// coordinates in `HH^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionClass {
    pub coefficients: BTreeMap<Word, Vec<Scalar>>,
}

impl ObstructionClass {
    /// First `HH^2` coordinate of the coefficient of `w` (the only one when `HH^2 = k`).
    pub fn coefficient(&self, w: &Word) -> Scalar {
        self.coefficients
            .get(w)
            .and_then(|c| c.first().cloned())
            .unwrap_or_else(Scalar::zero)
    }

    /// `c(t_i t_j) = -c(t_j t_i)` and `c(t_i t_i) = 0`.
    pub fn is_antisymmetric(&self) -> bool {
        self.coefficients.iter().all(|(w, c)| {
            let l = w.letters();
            let swapped = Word::new(&[l[1], l[0]]);
            let other = self.coefficients.get(&swapped).cloned().unwrap_or_default();
            c.iter().zip(other.iter()).all(|(x, y)| (x + y).is_zero())
                && (l[0] != l[1] || c.iter().all(Zero::is_zero))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.values().flatten().all(Zero::is_zero)
    }
}

/// Lifts the order-two family to the free algebra with `I^3 = 0` via the exponential section
/// and reads the cup products off the defect of condition (2) at `∂`.
pub fn cup_products(
    diagram: &CoverDiagram,
    h1: &H1Quotient,
    reps: &[CochainRep],
) -> Result<ObstructionClass> {
    let curve = diagram.curve();
    let algebra = TruncatedAlgebra::free(reps.len(), 2);
    let data = DeformationData::exponential(curve, reps, algebra);
    let check = check_deformation(&data, 0);
    if let Some(v) = check.for_condition(1).chain(check.for_condition(3)).next() {
        return Err(DeformError::UnexpectedDefect(v.to_string()));
    }
    let mut per_inclusion = Vec::new();
    for incl in Inclusion::NONTRIVIAL {
        let defect = check
            .for_condition(2)
            .find(|v| v.location == incl.to_string() && v.generator == "d")
            .map(|v| v.defect.clone())
            .unwrap_or_default();
        if let Some(v) = check
            .for_condition(2)
            .find(|v| v.location == incl.to_string() && v.generator != "d")
        {
            return Err(DeformError::UnexpectedDefect(v.to_string()));
        }
        per_inclusion.push(defect);
    }
    let mut coefficients = BTreeMap::new();
    for w in algebra.basis() {
        let mut parts = Vec::new();
        for defect in &per_inclusion {
            let op = defect
                .get(&w)
                .cloned()
                .unwrap_or_else(|| DiffOp::zero(ChartId::U3));
            if w.len() < 2 && !op.is_zero() {
                return Err(DeformError::UnexpectedDefect(format!(
                    "defect in degree {} at {w}: representatives are not cocycles",
                    w.len()
                )));
            }
            if op.order().unwrap_or(0) > 0 {
                return Err(DeformError::UnexpectedDefect(format!(
                    "defect at {w} is not a multiplication operator: {}",
                    format_op(&op)
                )));
            }
            parts.push(op.coefficient(0));
        }
        if w.len() == 2 {
            coefficients.insert(w, diagram.h1_coordinates(h1, &parts[0], &parts[1])?);
        }
    }
    Ok(ObstructionClass { coefficients })
}

/// A relation `Σ c_w w` among the generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcPolynomial(pub BTreeMap<Word, Scalar>);

impl fmt::Display for NcPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (k, (w, c)) in self.0.iter().enumerate() {
            let neg = c < &Scalar::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if !abs.is_one() {
                write!(f, "{}*", crate::scalar::compact(&abs))?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HullPresentation {
    pub generators: Vec<String>,
    pub relations: Vec<NcPolynomial>,
    pub order_verified: usize,
}

/// Sorted words of the certified algebra against commutative monomials `t1^i t2^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutativityWitness {
    pub words_per_degree: Vec<usize>,
    pub monomials: Vec<Vec<usize>>,
    pub bijective: bool,
}

#[derive(Debug, Clone)]
pub struct HullComputation {
    pub presentation: HullPresentation,
    pub cups: ObstructionClass,
    pub family: DeformationData,
    /// `(n, passed)` for the family over `H_n = H / I^n`.
    pub certified_orders: Vec<(usize, bool)>,
    pub witness: CommutativityWitness,
}

/// The two tangent representatives built from the listed `ξ1, ξ2`.
pub fn tangent_representatives(diagram: &CoverDiagram) -> Result<[CochainRep; 2]> {
    let curve = diagram.curve();
    let mut reps = Vec::new();
    for xi in [reference::xi1(curve), reference::xi2(curve)] {
        let class = diagram.class0(xi)?;
        if !diagram.is_cocycle(&class) {
            return Err(DeformError::NotACocycle(Inclusion::U1_U3));
        }
        reps.push(lift_to_cochain(diagram, &class)?);
    }
    let [a, b]: [CochainRep; 2] = reps.try_into().expect("two representatives");
    Ok([a, b])
}

/// Quadratic relations from the cup products: one per `HH^2` coordinate, scaled so that the
/// first nonzero coefficient is one.
pub fn quadratic_relations(cups: &ObstructionClass) -> Vec<NcPolynomial> {
    let dim = cups.coefficients.values().map(Vec::len).max().unwrap_or(0);
    (0..dim)
        .filter_map(|k| {
            let terms: BTreeMap<Word, Scalar> = cups
                .coefficients
                .iter()
                .filter(|(_, c)| !c[k].is_zero())
                .map(|(w, c)| (w.clone(), c[k].clone()))
                .collect();
            let lead = terms.values().next()?.clone();
            Some(NcPolynomial(
                terms.into_iter().map(|(w, c)| (w, c / &lead)).collect(),
            ))
        })
        .collect()
}

fn commutator(i: u8, j: u8) -> NcPolynomial {
    NcPolynomial(BTreeMap::from([
        (Word::new(&[i, j]), int(1)),
        (Word::new(&[j, i]), int(-1)),
    ]))
}

/// Hull modulo `I^order` and its versal family, certified order by order.
pub fn compute_hull(
    curve: &Curve,
    policy: TruncationPolicy,
    order: usize,
    degree_bound: usize,
) -> Result<HullComputation> {
    if order < 2 {
        return Err(DeformError::Config(format!(
            "hull order must be at least 2, got {order}"
        )));
    }
    let diagram = CoverDiagram::build(curve, policy)?;
    let h1 = diagram.h1()?;
    let reps = tangent_representatives(&diagram)?;
    let cups = cup_products(&diagram, &h1, &reps)?;
    let quadratic = quadratic_relations(&cups);

    let relation = if quadratic.is_empty() {
        Relation::Free
    } else if quadratic == vec![commutator(1, 2)] {
        Relation::Commutator
    } else {
        let shown: Vec<String> = quadratic.iter().map(|r| r.to_string()).collect();
        return Err(DeformError::HullCertificationFailure {
            order: 3,
            detail: format!("no explicit family for relations {}", shown.join(", ")),
        });
    };

    let mut certified_orders = Vec::new();
    let mut family = None;
    for n in 2..=order {
        let algebra = TruncatedAlgebra::new(2, n, relation);
        let data = DeformationData::exponential(curve, &reps, algebra);
        let check = check_deformation(&data, degree_bound);
        certified_orders.push((n, check.is_ok()));
        if let Some(v) = check.violations.first() {
            return Err(DeformError::HullCertificationFailure {
                order: n,
                detail: v.to_string(),
            });
        }
        family = Some(data);
    }
    let family = family.expect("at least one order is certified");

    let relations = if order >= 3 { quadratic } else { Vec::new() };
    let witness = commutativity_witness(family.algebra());
    Ok(HullComputation {
        presentation: HullPresentation {
            generators: vec!["t1".into(), "t2".into()],
            relations,
            order_verified: order,
        },
        cups,
        family,
        certified_orders,
        witness,
    })
}

/// Compares the word basis of `algebra` with the commutative monomials of the same degrees.
pub fn commutativity_witness(algebra: TruncatedAlgebra) -> CommutativityWitness {
    let basis = algebra.basis();
    let words_per_degree = (0..=algebra.order)
        .map(|n| basis.iter().filter(|w| w.len() == n).count())
        .collect();
    let monomials: Vec<Vec<usize>> = basis
        .iter()
        .map(|w| w.exponents(algebra.generators))
        .collect();
    let distinct: std::collections::BTreeSet<&Vec<usize>> = monomials.iter().collect();
    let expected: usize = (0..=algebra.order)
        .map(|n| binomial_count(n + algebra.generators - 1, algebra.generators - 1))
        .sum();
    CommutativityWitness {
        words_per_degree,
        bijective: distinct.len() == monomials.len() && monomials.len() == expected,
        monomials,
    }
}

fn binomial_count(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(a: i64, b: i64) -> (CoverDiagram, H1Quotient, [CochainRep; 2]) {
        let c = Curve::from_ab(int(a), int(b)).unwrap();
        let d = CoverDiagram::build(&c, TruncationPolicy::default()).unwrap();
        let h1 = d.h1().unwrap();
        let reps = tangent_representatives(&d).unwrap();
        (d, h1, reps)
    }

    #[test]
    fn tangent_family_is_a_deformation() {
        for (a, b) in [(1, 1), (0, 1), (-1, 2)] {
            let (d, _, reps) = setup(a, b);
            let data = DeformationData::exponential(d.curve(), &reps, TruncatedAlgebra::free(2, 1));
            assert!(data.residue_is_classical());
            let check = check_deformation(&data, 6);
            assert!(check.is_ok(), "{:?}", check.violations);
        }
    }

    #[test]
    fn tangent_family_shape() {
        let (d, _, reps) = setup(1, 1);
        let data = DeformationData::exponential(d.curve(), &reps, TruncatedAlgebra::free(2, 1));
        let l2 = data.derivation_image(ChartId::U2);
        assert_eq!(l2.residue(), DiffOp::derivation(ChartId::U2));
        assert_eq!(
            l2.coefficient(&Word::generator(1)),
            DiffOp::identity(ChartId::U2)
        );
        let y2 = d
            .curve()
            .monomial(ChartId::U2, 0, 2)
            .unwrap()
            .scale(&int(15));
        assert_eq!(
            l2.coefficient(&Word::generator(2)),
            DiffOp::multiplication(y2)
        );
        let g = data.restriction(Inclusion::U2_U3);
        assert_eq!(
            g.coefficient(&Word::empty()),
            ChartElement::one(ChartId::U3)
        );
        assert_eq!(
            &g.coefficient(&Word::generator(2)),
            reps[1].tau_on(Inclusion::U2_U3)
        );
        assert!(g.coefficient(&Word::generator(1)).is_zero());
    }

    #[test]
    fn exponential_truncations() {
        let (d, _, reps) = setup(0, 1);
        let c = d.curve();
        let second = DeformationData::exponential(c, &reps, TruncatedAlgebra::commutative(2, 2));
        let g = second.restriction(Inclusion::U1_U3);
        let tau = reps[0].tau_on(Inclusion::U1_U3).clone();
        assert!(tau.is_zero());
        let tau2 = reps[1].tau_on(Inclusion::U1_U3);
        let half_square = c.mul(tau2, tau2).unwrap().scale(&crate::scalar::frac(1, 2));
        assert_eq!(g.coefficient(&Word::new(&[2, 2])), half_square);
        assert!(
            second
                .restriction(Inclusion::U2_U3)
                .coefficient(&Word::new(&[2, 2]))
                .is_zero()
                == reps[1].tau_on(Inclusion::U2_U3).is_zero()
        );
    }

    #[test]
    fn cup_products_are_antisymmetric() {
        for (a, b) in [(1, 1), (0, 1)] {
            let (d, h1, reps) = setup(a, b);
            let cups = cup_products(&d, &h1, &reps).unwrap();
            assert!(cups.is_antisymmetric());
            let c12 = cups.coefficient(&Word::new(&[1, 2]));
            assert!(!c12.is_zero());
            assert_eq!(c12, -cups.coefficient(&Word::new(&[2, 1])));
            assert!(cups.coefficient(&Word::new(&[1, 1])).is_zero());
            assert!(cups.coefficient(&Word::new(&[2, 2])).is_zero());

            let diag = cup_products(&d, &h1, &[reps[0].clone(), reps[0].clone()]).unwrap();
            assert!(diag.is_zero());
        }
    }

    #[test]
    fn free_lift_fails_exactly_on_commutator() {
        for (a, b) in [(1, 1), (0, 1)] {
            let (d, _, reps) = setup(a, b);
            let data = DeformationData::exponential(d.curve(), &reps, TruncatedAlgebra::free(2, 2));
            let check = check_deformation(&data, 8);
            assert!(!check.is_ok());
            assert!(check
                .violations
                .iter()
                .all(|v| v.condition == 2 && v.generator == "d"));
            for v in &check.violations {
                let words: Vec<&Word> = v.defect.keys().collect();
                assert_eq!(words, vec![&Word::new(&[1, 2]), &Word::new(&[2, 1])]);
                let c12 = &v.defect[&Word::new(&[1, 2])];
                assert_eq!(c12.scale(&int(-1)), v.defect[&Word::new(&[2, 1])]);
                assert!(v.failing_monomials > 0);
            }
            let comm = data.over(TruncatedAlgebra::commutative(2, 2));
            assert!(check_deformation(&comm, 8).is_ok());
        }
    }

    #[test]
    fn hull_relation() {
        for (a, b) in [(1, 1), (0, 1)] {
            let c = Curve::from_ab(int(a), int(b)).unwrap();
            let hull = compute_hull(&c, TruncationPolicy::default(), 4, 6).unwrap();
            assert_eq!(hull.presentation.relations.len(), 1);
            assert_eq!(hull.presentation.relations[0].to_string(), "t1*t2 - t2*t1");
            assert!(hull.witness.bijective);
            let h2 = compute_hull(&c, TruncationPolicy::default(), 2, 6).unwrap();
            assert!(h2.presentation.relations.is_empty());
            assert_eq!(hull.cups.coefficient(&Word::new(&[1, 2])), int(1));
        }
    }

    #[test]
    fn witness_counts() {
        let w = commutativity_witness(TruncatedAlgebra::commutative(2, 3));
        assert_eq!(w.words_per_degree, vec![1, 2, 3, 4]);
        assert!(w.bijective);
        assert!(!commutativity_witness(TruncatedAlgebra::free(2, 2)).bijective);
    }
}
