//! The three affine chart rings of the Weierstrass curve `y^2 z = x^3 + a x z^2 + b z^3`.
//!
//! * `U1 = D+(y)`: `A1 = k[x,z]/(z - x^3 - a x z^2 - b z^3)`, normal forms `x^i z^j` with `i <= 2`.
//! * `U2 = D+(z)`: `A2 = k[x,y]/(y^2 - x^3 - a x - b)`, normal forms `x^i y^j` with `j <= 1`.
//! * `U3 = U1 ∩ U2`: `A3 = k[x,y,1/y]/(y^2 - x^3 - a x - b)`, normal forms `x^i y^j` with
//!   `i <= 2` and `j` any integer.
//!
//! Each ring carries its distinguished derivation generating the module of
//! k-derivations. On `U1` it is `(1 - 2axz - 3bz^2) d/dx + (3x^2 + az^2) d/dz`; on `U2`
//! and `U3` it is `-2y d/dx - (3x^2 + a) d/dy`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{DeformError, Result};
use crate::scalar::{self, int, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChartId {
    U1,
    U2,
    U3,
}

impl ChartId {
    pub const ALL: [ChartId; 3] = [ChartId::U1, ChartId::U2, ChartId::U3];

    /// Names of the two coordinate variables.
    pub fn vars(self) -> (char, char) {
        match self {
            ChartId::U1 => ('x', 'z'),
            ChartId::U2 | ChartId::U3 => ('x', 'y'),
        }
    }

    pub fn index(self) -> usize {
        match self {
            ChartId::U1 => 0,
            ChartId::U2 => 1,
            ChartId::U3 => 2,
        }
    }

    /// Total degree used for truncation; the `y` exponent counts with its absolute value on `U3`.
    pub fn degree(self, m: Mono) -> i64 {
        match self {
            ChartId::U3 => m.x + m.w.abs(),
            _ => m.x + m.w,
        }
    }

    pub fn is_normal(self, m: Mono) -> bool {
        match self {
            ChartId::U1 => (0..=2).contains(&m.x) && m.w >= 0,
            ChartId::U2 => m.x >= 0 && (0..=1).contains(&m.w),
            ChartId::U3 => (0..=2).contains(&m.x),
        }
    }
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ChartId::U1 => "U1",
            ChartId::U2 => "U2",
            ChartId::U3 => "U3",
        };
        f.write_str(s)
    }
}

/// An inclusion `source ⊇ target` in the cover `{U1, U2, U3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Inclusion {
    pub source: ChartId,
    pub target: ChartId,
}

impl Inclusion {
    /// The five inclusions in the order `U1⊇U1, U2⊇U2, U3⊇U3, U1⊇U3, U2⊇U3`.
    pub const ALL: [Inclusion; 5] = [
        Inclusion::identity(ChartId::U1),
        Inclusion::identity(ChartId::U2),
        Inclusion::identity(ChartId::U3),
        Inclusion::U1_U3,
        Inclusion::U2_U3,
    ];
    pub const NONTRIVIAL: [Inclusion; 2] = [Inclusion::U1_U3, Inclusion::U2_U3];
    pub const U1_U3: Inclusion = Inclusion {
        source: ChartId::U1,
        target: ChartId::U3,
    };
    pub const U2_U3: Inclusion = Inclusion {
        source: ChartId::U2,
        target: ChartId::U3,
    };

    pub fn new(source: ChartId, target: ChartId) -> Result<Self> {
        let ok = source == target || target == ChartId::U3;
        if ok {
            Ok(Inclusion { source, target })
        } else {
            Err(DeformError::InvalidInclusion {
                from: target,
                to: source,
            })
        }
    }

    pub const fn identity(chart: ChartId) -> Self {
        Inclusion {
            source: chart,
            target: chart,
        }
    }

    pub fn is_identity(self) -> bool {
        self.source == self.target
    }
}

impl fmt::Display for Inclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}>={}", self.source, self.target)
    }
}

/// Exponent pair `(x, w)` where `w` is the `z` exponent on `U1` and the `y` exponent otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono {
    pub x: i64,
    pub w: i64,
}

impl Mono {
    pub const ONE: Mono = Mono { x: 0, w: 0 };

    pub const fn new(x: i64, w: i64) -> Self {
        Mono { x, w }
    }
}

/// Deterministic total orders on normal-form monomials. Both are graded, so a degree box is
/// always an initial segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MonomialOrder {
    /// Degree, then `x` exponent, then the second exponent.
    #[default]
    GradedLex,
    /// Degree, then the second exponent, then `x`.
    GradedColex,
}

impl MonomialOrder {
    pub fn key(self, chart: ChartId, m: Mono) -> (i64, i64, i64) {
        let d = chart.degree(m);
        match self {
            MonomialOrder::GradedLex => (d, m.x, m.w),
            MonomialOrder::GradedColex => (d, m.w, m.x),
        }
    }
}

/// Which of the two qualitatively different shapes of the computation applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    ANonzero,
    AZero,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::ANonzero => "a_nonzero",
            Regime::AZero => "a_zero",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveParams {
    pub a: Scalar,
    pub b: Scalar,
    pub delta: Scalar,
}

impl CurveParams {
    /// Rejects singular curves (`4a^3 + 27b^2 = 0`).
    pub fn new(a: Scalar, b: Scalar) -> Result<Self> {
        let delta = int(4) * &a * &a * &a + int(27) * &b * &b;
        if delta.is_zero() {
            return Err(DeformError::SingularCurve {
                a: scalar::compact(&a),
                b: scalar::compact(&b),
            });
        }
        Ok(CurveParams { a, b, delta })
    }

    pub fn regime(&self) -> Regime {
        if self.a.is_zero() {
            Regime::AZero
        } else {
            Regime::ANonzero
        }
    }
}

/// An element of one chart ring, in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChartElement {
    chart: ChartId,
    terms: BTreeMap<Mono, Scalar>,
}

impl ChartElement {
    pub fn zero(chart: ChartId) -> Self {
        ChartElement {
            chart,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(chart: ChartId, c: Scalar) -> Self {
        Self::monomial(chart, Mono::ONE, c)
    }

    pub fn one(chart: ChartId) -> Self {
        Self::constant(chart, Scalar::one())
    }

    /// A single normal-form monomial. Panics if `m` is not normal for `chart`.
    pub fn monomial(chart: ChartId, m: Mono, c: Scalar) -> Self {
        assert!(
            chart.is_normal(m),
            "{m:?} is not a normal monomial on {chart}"
        );
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        ChartElement { chart, terms }
    }

    pub(crate) fn from_normal_terms(chart: ChartId, terms: BTreeMap<Mono, Scalar>) -> Self {
        debug_assert!(terms
            .iter()
            .all(|(m, c)| chart.is_normal(*m) && !c.is_zero()));
        ChartElement { chart, terms }
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn terms(&self) -> &BTreeMap<Mono, Scalar> {
        &self.terms
    }

    pub fn coefficient(&self, m: Mono) -> Scalar {
        self.terms.get(&m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest degree of a stored monomial, `0` for the zero element.
    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|m| self.chart.degree(*m))
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.chart);
        }
        ChartElement {
            chart: self.chart,
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &ChartElement, c: &Scalar) {
        assert_eq!(self.chart, other.chart, "chart mismatch in addition");
        for (m, v) in &other.terms {
            add_term(&mut self.terms, *m, v * c);
        }
    }

    pub(crate) fn add_assign_ref(&mut self, other: &ChartElement) {
        assert_eq!(self.chart, other.chart, "chart mismatch in addition");
        for (m, v) in &other.terms {
            add_term(&mut self.terms, *m, v.clone());
        }
    }

    fn check_same_chart(&self, other: &ChartElement) -> Result<()> {
        if self.chart != other.chart {
            return Err(DeformError::ChartMismatch {
                expected: self.chart,
                found: other.chart,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &ChartElement) -> Result<ChartElement> {
        self.check_same_chart(other)?;
        let mut out = self.clone();
        out.add_assign_ref(other);
        Ok(out)
    }
}

pub(crate) fn add_term(terms: &mut BTreeMap<Mono, Scalar>, m: Mono, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match terms.entry(m) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

impl Add for &ChartElement {
    type Output = ChartElement;
    fn add(self, rhs: &ChartElement) -> ChartElement {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &ChartElement {
    type Output = ChartElement;
    fn sub(self, rhs: &ChartElement) -> ChartElement {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Scalar::one());
        out
    }
}

impl Neg for &ChartElement {
    type Output = ChartElement;
    fn neg(self) -> ChartElement {
        self.scale(&-Scalar::one())
    }
}

/// Ring operations on the charts of one fixed smooth curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curve {
    params: CurveParams,
}

impl Curve {
    pub fn new(params: CurveParams) -> Self {
        Curve { params }
    }

    pub fn from_ab(a: Scalar, b: Scalar) -> Result<Self> {
        Ok(Curve::new(CurveParams::new(a, b)?))
    }

    pub fn params(&self) -> &CurveParams {
        &self.params
    }

    pub fn a(&self) -> &Scalar {
        &self.params.a
    }

    pub fn b(&self) -> &Scalar {
        &self.params.b
    }

    /// Brings raw exponent/coefficient data into the chart's normal form.
    pub fn chart_reduce<I>(&self, chart: ChartId, raw: I) -> Result<ChartElement>
    where
        I: IntoIterator<Item = (Mono, Scalar)>,
    {
        let (vx, vw) = chart.vars();
        let raw: Vec<(Mono, Scalar)> = raw.into_iter().collect();
        for (m, _) in &raw {
            if m.x < 0 {
                return Err(DeformError::NegativeExponent {
                    chart,
                    var: vx,
                    exponent: m.x,
                });
            }
            if m.w < 0 && chart != ChartId::U3 {
                return Err(DeformError::NegativeExponent {
                    chart,
                    var: vw,
                    exponent: m.w,
                });
            }
        }
        Ok(self.reduce_unchecked(chart, raw))
    }

    /// Normal form of terms whose exponents are already known to be admissible.
    pub(crate) fn reduce_unchecked<I>(&self, chart: ChartId, raw: I) -> ChartElement
    where
        I: IntoIterator<Item = (Mono, Scalar)>,
    {
        let a = &self.params.a;
        let b = &self.params.b;
        let mut out = BTreeMap::new();
        let mut pending: BTreeMap<Mono, Scalar> = BTreeMap::new();
        for (m, c) in raw {
            if chart.is_normal(m) {
                add_term(&mut out, m, c);
            } else {
                add_term(&mut pending, m, c);
            }
        }
        while let Some((m, c)) = pending.pop_last() {
            let expansion: [(Mono, Scalar); 3] = match chart {
                // x^3 = z - a x z^2 - b z^3
                ChartId::U1 => [
                    (Mono::new(m.x - 3, m.w + 1), c.clone()),
                    (Mono::new(m.x - 2, m.w + 2), -(a * &c)),
                    (Mono::new(m.x - 3, m.w + 3), -(b * &c)),
                ],
                // y^2 = x^3 + a x + b
                ChartId::U2 => [
                    (Mono::new(m.x + 3, m.w - 2), c.clone()),
                    (Mono::new(m.x + 1, m.w - 2), a * &c),
                    (Mono::new(m.x, m.w - 2), b * &c),
                ],
                // x^3 = y^2 - a x - b
                ChartId::U3 => [
                    (Mono::new(m.x - 3, m.w + 2), c.clone()),
                    (Mono::new(m.x - 2, m.w), -(a * &c)),
                    (Mono::new(m.x - 3, m.w), -(b * &c)),
                ],
            };
            for (m2, c2) in expansion {
                if chart.is_normal(m2) {
                    add_term(&mut out, m2, c2);
                } else {
                    add_term(&mut pending, m2, c2);
                }
            }
        }
        ChartElement::from_normal_terms(chart, out)
    }

    /// Builds an element from `(x exponent, second exponent, coefficient)` triples.
    pub fn element(&self, chart: ChartId, raw: &[(i64, i64, Scalar)]) -> Result<ChartElement> {
        self.chart_reduce(
            chart,
            raw.iter().map(|(x, w, c)| (Mono::new(*x, *w), c.clone())),
        )
    }

    pub fn monomial(&self, chart: ChartId, x: i64, w: i64) -> Result<ChartElement> {
        self.chart_reduce(chart, [(Mono::new(x, w), Scalar::one())])
    }

    pub fn mul(&self, u: &ChartElement, v: &ChartElement) -> Result<ChartElement> {
        u.check_same_chart(v)?;
        Ok(self.mul_unchecked(u, v))
    }

    pub(crate) fn mul_unchecked(&self, u: &ChartElement, v: &ChartElement) -> ChartElement {
        let mut raw = BTreeMap::new();
        for (mu, cu) in &u.terms {
            for (mv, cv) in &v.terms {
                add_term(&mut raw, Mono::new(mu.x + mv.x, mu.w + mv.w), cu * cv);
            }
        }
        self.reduce_unchecked(u.chart, raw)
    }

    pub fn pow(&self, u: &ChartElement, n: u32) -> ChartElement {
        let mut acc = ChartElement::one(u.chart);
        for _ in 0..n {
            acc = self.mul_unchecked(&acc, u);
        }
        acc
    }

    /// Restriction homomorphism along `incl`: on `U1 ⊇ U3`, `x ↦ x/y`, `z ↦ 1/y`; on
    /// `U2 ⊇ U3` the localization map.
    pub fn restrict(&self, u: &ChartElement, incl: Inclusion) -> Result<ChartElement> {
        if u.chart != incl.source {
            return Err(DeformError::ChartMismatch {
                expected: incl.source,
                found: u.chart,
            });
        }
        Ok(self.restrict_unchecked(u, incl))
    }

    pub(crate) fn restrict_unchecked(&self, u: &ChartElement, incl: Inclusion) -> ChartElement {
        if incl.is_identity() {
            return u.clone();
        }
        let image = u.terms.iter().map(|(m, c)| {
            let m3 = match incl.source {
                ChartId::U1 => Mono::new(m.x, -m.x - m.w),
                _ => *m,
            };
            (m3, c.clone())
        });
        self.reduce_unchecked(incl.target, image)
    }

    /// The distinguished derivation of the chart, applied to `u`.
    pub fn apply_derivation(&self, chart: ChartId, u: &ChartElement) -> Result<ChartElement> {
        if u.chart != chart {
            return Err(DeformError::ChartMismatch {
                expected: chart,
                found: u.chart,
            });
        }
        Ok(self.derive(u))
    }

    pub fn derive(&self, u: &ChartElement) -> ChartElement {
        let mut raw = BTreeMap::new();
        for (m, c) in &u.terms {
            self.derive_monomial_raw(u.chart, *m, c, &mut raw);
        }
        self.reduce_unchecked(u.chart, raw)
    }

    fn derive_monomial_raw(
        &self,
        chart: ChartId,
        m: Mono,
        c: &Scalar,
        raw: &mut BTreeMap<Mono, Scalar>,
    ) {
        let a = &self.params.a;
        let b = &self.params.b;
        let (i, j) = (m.x, m.w);
        let ci = c * int(i);
        let cj = c * int(j);
        match chart {
            ChartId::U1 => {
                // i x^(i-1) z^j (1 - 2axz - 3bz^2) + j x^i z^(j-1) (3x^2 + az^2)
                if i != 0 {
                    add_term(raw, Mono::new(i - 1, j), ci.clone());
                    add_term(raw, Mono::new(i, j + 1), -(int(2) * a * &ci));
                    add_term(raw, Mono::new(i - 1, j + 2), -(int(3) * b * &ci));
                }
                if j != 0 {
                    add_term(raw, Mono::new(i + 2, j - 1), int(3) * &cj);
                    add_term(raw, Mono::new(i, j + 1), a * &cj);
                }
            }
            ChartId::U2 | ChartId::U3 => {
                // -2 i x^(i-1) y^(j+1) - j x^i y^(j-1) (3x^2 + a)
                if i != 0 {
                    add_term(raw, Mono::new(i - 1, j + 1), -(int(2) * &ci));
                }
                if j != 0 {
                    add_term(raw, Mono::new(i + 2, j - 1), -(int(3) * &cj));
                    add_term(raw, Mono::new(i, j - 1), -(a * &cj));
                }
            }
        }
    }

    /// `y^-1` on `U3`.
    pub fn inverse_y(&self) -> ChartElement {
        ChartElement::monomial(ChartId::U3, Mono::new(0, -1), Scalar::one())
    }

    /// The defining relation of the chart, as a polynomial before reduction.
    pub fn chart_relation_terms(&self, chart: ChartId) -> Vec<(Mono, Scalar)> {
        let a = self.params.a.clone();
        let b = self.params.b.clone();
        match chart {
            // z - x^3 - a x z^2 - b z^3
            ChartId::U1 => vec![
                (Mono::new(0, 1), int(1)),
                (Mono::new(3, 0), int(-1)),
                (Mono::new(1, 2), -a),
                (Mono::new(0, 3), -b),
            ],
            // y^2 - x^3 - a x - b
            ChartId::U2 | ChartId::U3 => vec![
                (Mono::new(0, 2), int(1)),
                (Mono::new(3, 0), int(-1)),
                (Mono::new(1, 0), -a),
                (Mono::new(0, 0), -b),
            ],
        }
    }

    /// Coordinate generators of the chart ring as an algebra: `x, z` on `U1`, `x, y` on `U2`,
    /// `x, y, 1/y` on `U3`.
    pub fn coordinate_generators(&self, chart: ChartId) -> Vec<(&'static str, ChartElement)> {
        let mono = |x, w| ChartElement::monomial(chart, Mono::new(x, w), Scalar::one());
        match chart {
            ChartId::U1 => vec![("x", mono(1, 0)), ("z", mono(0, 1))],
            ChartId::U2 => vec![("x", mono(1, 0)), ("y", mono(0, 1))],
            ChartId::U3 => vec![("x", mono(1, 0)), ("y", mono(0, 1)), ("y^-1", mono(0, -1))],
        }
    }
}

/// All normal-form monomials of degree at most `d`, sorted by `order`.
pub fn monomial_box(chart: ChartId, d: usize, order: MonomialOrder) -> Vec<Mono> {
    let d = d as i64;
    let mut out = Vec::new();
    match chart {
        ChartId::U1 => {
            for x in 0..=2.min(d) {
                for w in 0..=(d - x) {
                    out.push(Mono::new(x, w));
                }
            }
        }
        ChartId::U2 => {
            for w in 0..=1.min(d) {
                for x in 0..=(d - w) {
                    out.push(Mono::new(x, w));
                }
            }
        }
        ChartId::U3 => {
            for x in 0..=2.min(d) {
                let r = d - x;
                for w in -r..=r {
                    out.push(Mono::new(x, w));
                }
            }
        }
    }
    out.sort_by_key(|m| order.key(chart, *m));
    out
}
