//! `Ext^1_{D_i}(A_i, A_j) = coker(∂ : A_j -> A_j)`, from the free resolution
//! `0 <- A_i <- D_i <-(·∂)- D_i <- 0`.
//!
//! The cokernel is computed by truncated linear algebra. The image of `∂` on the monomials of
//! degree `<= d + margin` is brought into echelon form with the *largest* monomial (in a graded
//! order) as pivot. Rows whose pivot lies in the degree-`d` box then span the image inside that
//! box, and the non-pivot monomials of the box are the greedy least basis of the cokernel.
//! Every row remembers the combination of monomials it is the derivative of, so each
//! reduction comes with an explicit preimage certificate.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::chart::{monomial_box, ChartElement, ChartId, Curve, Inclusion, Mono, MonomialOrder};
use crate::error::{DeformError, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// How the truncation window grows while searching for a stable cokernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationPolicy {
    pub start: usize,
    pub step: usize,
    pub cap: usize,
    /// Consecutive increments over which the basis must stay unchanged.
    pub window: usize,
    /// Extra degrees of image rows kept beyond the accepted window.
    pub margin: usize,
    pub order: MonomialOrder,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            start: 8,
            step: 2,
            cap: 40,
            window: 2,
            margin: 4,
            order: MonomialOrder::GradedLex,
        }
    }
}

impl TruncationPolicy {
    /// Same policy with a wider margin.
    pub fn widened(self, extra: usize) -> Self {
        TruncationPolicy {
            margin: self.margin + extra,
            ..self
        }
    }

    pub fn with_order(self, order: MonomialOrder) -> Self {
        TruncationPolicy { order, ..self }
    }
}

type Key = (i64, i64, i64);
type SparseVec = BTreeMap<Key, Scalar>;

fn axpy(target: &mut SparseVec, src: &SparseVec, factor: &Scalar) {
    for (k, v) in src {
        let e = target.entry(*k).or_insert_with(Scalar::zero);
        *e += v * factor;
        if e.is_zero() {
            target.remove(k);
        }
    }
}

#[derive(Debug, Clone)]
struct EchelonRow {
    /// Leading coefficient normalized to one.
    image: SparseVec,
    preimage: SparseVec,
}

/// Echelon form of `∂` on a truncation window.
#[derive(Debug, Clone)]
struct Reducer {
    chart: ChartId,
    order: MonomialOrder,
    degree: usize,
    pivots: BTreeMap<Key, EchelonRow>,
    basis: Vec<Mono>,
}

struct Reduction {
    remainder: SparseVec,
    preimage: SparseVec,
}

impl Reducer {
    fn build(
        curve: &Curve,
        chart: ChartId,
        degree: usize,
        margin: usize,
        order: MonomialOrder,
    ) -> Self {
        let mut pivots: BTreeMap<Key, EchelonRow> = BTreeMap::new();
        for p in monomial_box(chart, degree + margin, order) {
            let dp = curve.derive(&ChartElement::monomial(chart, p, Scalar::one()));
            let mut image: SparseVec = dp
                .terms()
                .iter()
                .map(|(m, c)| (order.key(chart, *m), c.clone()))
                .collect();
            let mut preimage: SparseVec = BTreeMap::from([(order.key(chart, p), Scalar::one())]);
            while let Some((&lead, lc)) = image.last_key_value() {
                match pivots.get(&lead) {
                    Some(row) => {
                        let f = -lc.clone();
                        axpy(&mut image, &row.image, &f);
                        axpy(&mut preimage, &row.preimage, &f);
                    }
                    None => {
                        let inv = lc.recip();
                        for v in image.values_mut() {
                            *v *= &inv;
                        }
                        for v in preimage.values_mut() {
                            *v *= &inv;
                        }
                        pivots.insert(lead, EchelonRow { image, preimage });
                        break;
                    }
                }
            }
        }
        let basis = monomial_box(chart, degree, order)
            .into_iter()
            .filter(|m| !pivots.contains_key(&order.key(chart, *m)))
            .collect();
        Reducer {
            chart,
            order,
            degree,
            pivots,
            basis,
        }
    }

    fn to_vec(&self, g: &ChartElement) -> SparseVec {
        g.terms()
            .iter()
            .map(|(m, c)| (self.order.key(self.chart, *m), c.clone()))
            .collect()
    }

    fn mono(&self, key: Key) -> Mono {
        match self.order {
            MonomialOrder::GradedLex => Mono::new(key.1, key.2),
            MonomialOrder::GradedColex => Mono::new(key.2, key.1),
        }
    }

    /// `None` if `g` reaches beyond the window.
    fn reduce(&self, g: &ChartElement) -> Option<Reduction> {
        let mut work = self.to_vec(g);
        let mut remainder = SparseVec::new();
        let mut preimage = SparseVec::new();
        while let Some((lead, c)) = work.pop_last() {
            match self.pivots.get(&lead) {
                Some(row) => {
                    work.insert(lead, c.clone());
                    axpy(&mut work, &row.image, &-c.clone());
                    axpy(&mut preimage, &row.preimage, &c);
                }
                None if lead.0 <= self.degree as i64 => {
                    remainder.insert(lead, c);
                }
                None => return None,
            }
        }
        Some(Reduction {
            remainder,
            preimage,
        })
    }

    fn element(&self, v: &SparseVec) -> ChartElement {
        ChartElement::from_normal_terms(
            self.chart,
            v.iter().map(|(k, c)| (self.mono(*k), c.clone())).collect(),
        )
    }
}

/// Coordinates with respect to the basis of an [`Ext1Space`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coordinates(pub Vec<Scalar>);

impl Coordinates {
    pub fn zero(dim: usize) -> Self {
        Coordinates(vec![Scalar::zero(); dim])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
}

/// A finite-dimensional `Ext^1` for one inclusion `U_i ⊇ U_j`, realised as the cokernel of
/// the derivation on `A_j`.
#[derive(Debug, Clone)]
pub struct Ext1Space {
    pair: Inclusion,
    curve: Curve,
    policy: TruncationPolicy,
    stabilization_degree: usize,
    reducer: Reducer,
}

impl Ext1Space {
    /// Stabilized cokernel computation for `pair`.
    pub fn compute(curve: &Curve, pair: Inclusion, policy: TruncationPolicy) -> Result<Self> {
        let chart = pair.target;
        let mut window: Vec<(usize, Reducer)> = Vec::new();
        let mut d = policy.start;
        while d <= policy.cap {
            let r = Reducer::build(curve, chart, d, policy.margin, policy.order);
            window.push((d, r));
            if window.len() > policy.window + 1 {
                window.remove(0);
            }
            if window.len() == policy.window + 1
                && window.iter().all(|(_, r)| r.basis == window[0].1.basis)
            {
                let stabilization_degree = window[0].0;
                let reducer = window.pop().unwrap().1;
                return Ok(Ext1Space {
                    pair,
                    curve: curve.clone(),
                    policy,
                    stabilization_degree,
                    reducer,
                });
            }
            d += policy.step.max(1);
        }
        Err(DeformError::StabilizationFailure {
            chart,
            cap: policy.cap,
        })
    }

    /// The same cokernel, relabelled for another inclusion with the same target chart.
    pub fn relabel(&self, pair: Inclusion) -> Self {
        assert_eq!(pair.target, self.pair.target);
        Ext1Space {
            pair,
            ..self.clone()
        }
    }

    pub fn pair(&self) -> Inclusion {
        self.pair
    }

    pub fn chart(&self) -> ChartId {
        self.pair.target
    }

    pub fn dim(&self) -> usize {
        self.reducer.basis.len()
    }

    pub fn stabilization_degree(&self) -> usize {
        self.stabilization_degree
    }

    pub fn policy(&self) -> TruncationPolicy {
        self.policy
    }

    pub fn basis_monomials(&self) -> &[Mono] {
        &self.reducer.basis
    }

    pub fn basis(&self) -> Vec<ChartElement> {
        self.reducer
            .basis
            .iter()
            .map(|m| ChartElement::monomial(self.chart(), *m, Scalar::one()))
            .collect()
    }

    /// The combination `Σ c_k e_k` of basis elements.
    pub fn element(&self, coords: &Coordinates) -> ChartElement {
        let mut out = ChartElement::zero(self.chart());
        for (m, c) in self.reducer.basis.iter().zip(&coords.0) {
            out.add_scaled(&ChartElement::monomial(self.chart(), *m, Scalar::one()), c);
        }
        out
    }

    fn reduction(&self, g: &ChartElement) -> Result<(Reduction, std::borrow::Cow<'_, Reducer>)> {
        if g.chart() != self.chart() {
            return Err(DeformError::ChartMismatch {
                expected: self.chart(),
                found: g.chart(),
            });
        }
        if let Some(r) = self.reducer.reduce(g) {
            return Ok((r, std::borrow::Cow::Borrowed(&self.reducer)));
        }
        let needed = g.degree().max(0) as usize;
        if needed > self.policy.cap {
            return Err(DeformError::StabilizationFailure {
                chart: self.chart(),
                cap: self.policy.cap,
            });
        }
        let wide = Reducer::build(
            &self.curve,
            self.chart(),
            needed,
            self.policy.margin,
            self.policy.order,
        );
        if wide.basis != self.reducer.basis {
            return Err(DeformError::StabilizationFailure {
                chart: self.chart(),
                cap: needed,
            });
        }
        let r = wide
            .reduce(g)
            .expect("window covers the degree of the element");
        Ok((r, std::borrow::Cow::Owned(wide)))
    }

    /// Coordinates of the class of `g`; `g - Σ c_k e_k` lies in the image of `∂`.
    pub fn reduce(&self, g: &ChartElement) -> Result<Coordinates> {
        let (r, reducer) = self.reduction(g)?;
        let coords = reducer
            .basis
            .iter()
            .map(|m| {
                r.remainder
                    .get(&self.reducer.order.key(self.chart(), *m))
                    .cloned()
                    .unwrap_or_else(Scalar::zero)
            })
            .collect();
        Ok(Coordinates(coords))
    }

    /// A `p` with `∂(p) = g`, or `None` when the class of `g` is nonzero.
    pub fn derivation_preimage(&self, g: &ChartElement) -> Result<Option<ChartElement>> {
        let (r, reducer) = self.reduction(g)?;
        if !r.remainder.is_empty() {
            return Ok(None);
        }
        let p = reducer.element(&r.preimage);
        assert_eq!(&self.curve.derive(&p), g, "preimage certificate failed");
        Ok(Some(p))
    }

    /// Matrix whose columns are the coordinates of `elems`.
    pub fn coordinate_matrix(&self, elems: &[ChartElement]) -> Result<Matrix> {
        let cols = elems
            .iter()
            .map(|e| self.reduce(e).map(|c| c.0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_columns(self.dim(), &cols))
    }

    /// Whether the classes of `elems` form a basis.
    pub fn is_basis(&self, elems: &[ChartElement]) -> Result<bool> {
        Ok(elems.len() == self.dim() && self.coordinate_matrix(elems)?.rank() == self.dim())
    }

    /// Coordinates of the class of `g` with respect to the classes of `elems`, which must
    /// form a basis. Independent of the monomial order and truncation used internally.
    pub fn coordinates_in(
        &self,
        elems: &[ChartElement],
        g: &ChartElement,
    ) -> Result<Option<Vec<Scalar>>> {
        let m = self.coordinate_matrix(elems)?;
        Ok(m.solve(&self.reduce(g)?.0))
    }
}

/// The map `Ext^1(src) -> Ext^1(tgt)` induced by restriction along `incl`.
pub fn induced_map(
    curve: &Curve,
    src: &Ext1Space,
    tgt: &Ext1Space,
    incl: Inclusion,
) -> Result<Matrix> {
    if src.chart() != incl.source {
        return Err(DeformError::ChartMismatch {
            expected: incl.source,
            found: src.chart(),
        });
    }
    if tgt.chart() != incl.target {
        return Err(DeformError::ChartMismatch {
            expected: incl.target,
            found: tgt.chart(),
        });
    }
    let images = src
        .basis()
        .iter()
        .map(|e| curve.restrict(e, incl))
        .collect::<Result<Vec<_>>>()?;
    tgt.coordinate_matrix(&images)
}
