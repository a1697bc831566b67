//! Cohomology of the functor `Ext^1(O_X, O_X)` on the cover category, computed with the
//! normalized resolving complex.
//!
//! Degree-0 cochains are triples `(h1, h2, h3)`, one class per chart. Degree-1 cochains
//! carry five components indexed by `U1⊇U1, U2⊇U2, U3⊇U3, U1⊇U3, U2⊇U3`; the three identity
//! components are always zero. The differential is `d0(h) = (h1|U3 - h3, h2|U3 - h3)`.
//!
//! Because `Ext^q` vanishes for `q >= 2` and `Hom = k`, the spectral sequence collapses:
//! `HH^0 = k` and `HH^n = H^{n-1}(cover, Ext^1)` for `n >= 1`.

use num_traits::Zero;

use crate::chart::{ChartElement, ChartId, Curve, Inclusion};
use crate::error::{DeformError, Result};
use crate::ext::{induced_map, Coordinates, Ext1Space, TruncationPolicy};
use crate::linalg::Matrix;
use crate::reference;
use crate::scalar::Scalar;

/// The linear part of the resolving complex in degrees 0 and 1, detached from any curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvingComplex {
    /// `dim Ext^1` over `U1⊇U1, U2⊇U2, U3⊇U3, U1⊇U3, U2⊇U3`.
    pub dims: [usize; 5],
    /// `d0 : C^0 -> C^1` on the nontrivial components.
    pub d0: Matrix,
}

impl ResolvingComplex {
    /// Assembles `d0` from the two restriction-induced maps. The maps from `U3⊇U3` into
    /// the `U3` column are identities.
    pub fn from_maps(dims: [usize; 5], m13: &Matrix, m23: &Matrix) -> Self {
        let [n1, n2, n3, n13, n23] = dims;
        assert_eq!(n13, n3);
        assert_eq!(n23, n3);
        let mut d0 = Matrix::zeros(n13 + n23, n1 + n2 + n3);
        for i in 0..n13 {
            for j in 0..n1 {
                d0.set(i, j, m13.get(i, j).clone());
            }
            d0.set(i, n1 + n2 + i, Scalar::from_integer((-1).into()));
        }
        for i in 0..n23 {
            for j in 0..n2 {
                d0.set(n13 + i, n1 + j, m23.get(i, j).clone());
            }
            d0.set(n13 + i, n1 + n2 + i, Scalar::from_integer((-1).into()));
        }
        ResolvingComplex { dims, d0 }
    }

    pub fn c0_dim(&self) -> usize {
        self.dims[0] + self.dims[1] + self.dims[2]
    }

    pub fn c1_dim(&self) -> usize {
        self.dims[3] + self.dims[4]
    }

    /// Basis of `H^0 = ker d0`.
    pub fn h0(&self) -> Vec<Vec<Scalar>> {
        if self.c0_dim() == 0 {
            return Vec::new();
        }
        if self.c1_dim() == 0 {
            let id = Matrix::identity(self.c0_dim());
            return (0..id.rows()).map(|i| id.row(i).to_vec()).collect();
        }
        self.d0.kernel()
    }

    pub fn h1_dim(&self) -> usize {
        if self.c0_dim() == 0 || self.c1_dim() == 0 {
            return self.c1_dim();
        }
        self.c1_dim() - self.d0.rank()
    }

    pub fn is_coboundary(&self, v: &[Scalar]) -> bool {
        if v.iter().all(Zero::is_zero) {
            return true;
        }
        self.c0_dim() > 0 && self.d0.solve(v).is_some()
    }
}

/// A class in `H^0` (three components) or `H^1` (five components) of the cover complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyClass {
    pub degree: usize,
    /// Representative chart elements, one per component.
    pub components: Vec<ChartElement>,
    /// The same components in `Ext^1` coordinates.
    pub coordinates: Vec<Coordinates>,
}

/// The degree-1 quotient `C^1 / im d0` with a chosen basis of representatives.
#[derive(Debug, Clone)]
pub struct H1Quotient {
    /// Independent image columns of `d0` followed by a complement.
    frame: Matrix,
    image_rank: usize,
    /// Change of basis from complement coordinates to the coordinates of `reps`.
    normalization: Matrix,
    pub reps: Vec<CohomologyClass>,
}

impl H1Quotient {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Coordinates of a degree-1 cochain (nontrivial components, stacked) in the basis `reps`.
    pub fn coordinates(&self, v: &[Scalar]) -> Vec<Scalar> {
        let x = self.frame.solve(v).expect("frame is invertible");
        let raw: Vec<Scalar> = x[self.image_rank..].to_vec();
        self.normalization.mul_vec(&raw)
    }
}

/// The diagram of `Ext^1` spaces over the cover, with its restriction-induced maps.
#[derive(Debug, Clone)]
pub struct CoverDiagram {
    curve: Curve,
    spaces: Vec<Ext1Space>,
    m13: Matrix,
    m23: Matrix,
    complex: ResolvingComplex,
}

impl CoverDiagram {
    pub fn build(curve: &Curve, policy: TruncationPolicy) -> Result<Self> {
        let (e1, (e2, e3)) = rayon::join(
            || Ext1Space::compute(curve, Inclusion::identity(ChartId::U1), policy),
            || {
                rayon::join(
                    || Ext1Space::compute(curve, Inclusion::identity(ChartId::U2), policy),
                    || Ext1Space::compute(curve, Inclusion::identity(ChartId::U3), policy),
                )
            },
        );
        let (e1, e2, e3) = (e1?, e2?, e3?);
        let e13 = e3.relabel(Inclusion::U1_U3);
        let e23 = e3.relabel(Inclusion::U2_U3);
        let m13 = induced_map(curve, &e1, &e13, Inclusion::U1_U3)?;
        let m23 = induced_map(curve, &e2, &e23, Inclusion::U2_U3)?;
        let spaces = vec![e1, e2, e3, e13, e23];
        let dims = [0, 1, 2, 3, 4].map(|k| spaces[k].dim());
        let complex = ResolvingComplex::from_maps(dims, &m13, &m23);
        Ok(CoverDiagram {
            curve: curve.clone(),
            spaces,
            m13,
            m23,
            complex,
        })
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    /// Spaces in the order `U1⊇U1, U2⊇U2, U3⊇U3, U1⊇U3, U2⊇U3`.
    pub fn spaces(&self) -> &[Ext1Space] {
        &self.spaces
    }

    pub fn space(&self, pair: Inclusion) -> &Ext1Space {
        self.spaces
            .iter()
            .find(|e| e.pair() == pair)
            .expect("every inclusion of the cover has a space")
    }

    pub fn dims(&self) -> [usize; 5] {
        self.complex.dims
    }

    /// Induced map `Ext^1(A_i, A_i) -> Ext^1(A_i, A_3)` for a nontrivial inclusion.
    pub fn map(&self, incl: Inclusion) -> &Matrix {
        match incl {
            Inclusion::U1_U3 => &self.m13,
            Inclusion::U2_U3 => &self.m23,
            _ => panic!("no stored map for {incl}"),
        }
    }

    pub fn complex(&self) -> &ResolvingComplex {
        &self.complex
    }

    fn split0(&self, v: &[Scalar]) -> Vec<Coordinates> {
        let [n1, n2, _, _, _] = self.complex.dims;
        vec![
            Coordinates(v[..n1].to_vec()),
            Coordinates(v[n1..n1 + n2].to_vec()),
            Coordinates(v[n1 + n2..].to_vec()),
        ]
    }

    /// Degree-0 cochain from chart representatives.
    pub fn class0(&self, components: [ChartElement; 3]) -> Result<CohomologyClass> {
        let coordinates = components
            .iter()
            .zip(&self.spaces[..3])
            .map(|(c, e)| e.reduce(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(CohomologyClass {
            degree: 0,
            components: components.to_vec(),
            coordinates,
        })
    }

    /// Degree-1 cochain from its five components; the identity components must vanish.
    pub fn class1(&self, components: [ChartElement; 5]) -> Result<CohomologyClass> {
        for (k, c) in components.iter().enumerate().take(3) {
            if !c.is_zero() {
                return Err(DeformError::NotACocycle(Inclusion::ALL[k]));
            }
        }
        let coordinates = components
            .iter()
            .zip(&self.spaces)
            .map(|(c, e)| e.reduce(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(CohomologyClass {
            degree: 1,
            components: components.to_vec(),
            coordinates,
        })
    }

    fn stacked(class: &CohomologyClass) -> Vec<Scalar> {
        let parts: &[Coordinates] = if class.degree == 0 {
            &class.coordinates
        } else {
            &class.coordinates[3..]
        };
        parts.iter().flat_map(|c| c.0.iter().cloned()).collect()
    }

    /// `d0` applied to a degree-0 cochain.
    pub fn d0(&self, class: &CohomologyClass) -> Vec<Scalar> {
        assert_eq!(class.degree, 0);
        self.complex.d0.mul_vec(&Self::stacked(class))
    }

    pub fn is_cocycle(&self, class: &CohomologyClass) -> bool {
        match class.degree {
            0 => self.d0(class).iter().all(Zero::is_zero),
            // no nondegenerate 2-chains: every normalized 1-cochain is a cocycle
            _ => class.coordinates[..3].iter().all(Coordinates::is_zero),
        }
    }

    /// Whether a cocycle represents the zero class.
    pub fn is_trivial(&self, class: &CohomologyClass) -> bool {
        match class.degree {
            0 => Self::stacked(class).iter().all(Zero::is_zero),
            _ => self.complex.is_coboundary(&Self::stacked(class)),
        }
    }

    /// Basis of `H^0`: triples `(h1, h2, h3)` with `h1|U3 = h3 = h2|U3`.
    pub fn h0(&self) -> Vec<CohomologyClass> {
        self.complex
            .h0()
            .into_iter()
            .map(|v| {
                let coordinates = self.split0(&v);
                let components = coordinates
                    .iter()
                    .zip(&self.spaces[..3])
                    .map(|(c, e)| e.element(c))
                    .collect();
                CohomologyClass {
                    degree: 0,
                    components,
                    coordinates,
                }
            })
            .collect()
    }

    /// `H^1 = (Ext^1(A1,A3) ⊕ Ext^1(A2,A3)) / im d0`. When one-dimensional and the listed
    /// `ω` is nonzero in it, `ω` is the representative.
    pub fn h1(&self) -> Result<H1Quotient> {
        let n = self.complex.c1_dim();
        let d0 = &self.complex.d0;
        let mut columns: Vec<Vec<Scalar>> = Vec::new();
        if self.complex.c0_dim() > 0 {
            let (_, pivots) = d0.rref();
            columns.extend(pivots.iter().map(|&j| d0.column(j)));
        }
        let image_rank = columns.len();
        let mut complement = Vec::new();
        for k in 0..n {
            let mut unit = vec![Scalar::zero(); n];
            unit[k] = Scalar::from_integer(1.into());
            let mut trial = columns.clone();
            trial.push(unit.clone());
            if Matrix::from_columns(n, &trial).rank() == trial.len() {
                columns.push(unit);
                complement.push(k);
            }
        }
        let frame = Matrix::from_columns(n, &columns);
        let dim = complement.len();
        let mut reps: Vec<CohomologyClass> = complement
            .iter()
            .map(|&k| {
                let mut v = vec![Scalar::zero(); n];
                v[k] = Scalar::from_integer(1.into());
                self.class1_from_stacked(&v)
            })
            .collect();
        let mut quotient = H1Quotient {
            frame,
            image_rank,
            normalization: Matrix::identity(dim),
            reps: Vec::new(),
        };
        if dim == 1 {
            let omega = self.class1(reference::omega(&self.curve))?;
            let c = quotient.coordinates(&Self::stacked(&omega))[0].clone();
            if !c.is_zero() {
                quotient.normalization = Matrix::from_rows(vec![vec![c.recip()]]);
                reps = vec![omega];
            }
        }
        quotient.reps = reps;
        Ok(quotient)
    }

    fn class1_from_stacked(&self, v: &[Scalar]) -> CohomologyClass {
        let n13 = self.complex.dims[3];
        let mut coordinates: Vec<Coordinates> = (0..3)
            .map(|k| Coordinates::zero(self.complex.dims[k]))
            .collect();
        coordinates.push(Coordinates(v[..n13].to_vec()));
        coordinates.push(Coordinates(v[n13..].to_vec()));
        let components = coordinates
            .iter()
            .zip(&self.spaces)
            .map(|(c, e)| e.element(c))
            .collect();
        CohomologyClass {
            degree: 1,
            components,
            coordinates,
        }
    }

    /// `H^1` coordinates of the degree-1 cochain with the given components on
    /// `U1⊇U3` and `U2⊇U3`.
    pub fn h1_coordinates(
        &self,
        h1: &H1Quotient,
        on_13: &ChartElement,
        on_23: &ChartElement,
    ) -> Result<Vec<Scalar>> {
        let mut v = self.space(Inclusion::U1_U3).reduce(on_13)?.0;
        v.extend(self.space(Inclusion::U2_U3).reduce(on_23)?.0);
        Ok(h1.coordinates(&v))
    }
}

/// `(dim HH^0, dim HH^1, dim HH^2)`; all higher groups vanish.
pub fn hochschild_dims(complex: &ResolvingComplex) -> [usize; 3] {
    [1, complex.h0().len(), complex.h1_dim()]
}

/// The pair `(ψ, τ)` representing a class of `HH^1`: `ψ(U_i)` sends `∂_i` to multiplication
/// by `xi[i]` and kills functions, `τ(U_i ⊇ U3)` is multiplication by `tau[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CochainRep {
    pub xi: [ChartElement; 3],
    /// On `U1⊇U3` and `U2⊇U3`.
    pub tau: [ChartElement; 2],
}

impl CochainRep {
    pub fn tau_on(&self, incl: Inclusion) -> &ChartElement {
        match incl {
            Inclusion::U1_U3 => &self.tau[0],
            Inclusion::U2_U3 => &self.tau[1],
            _ => panic!("τ lives on nontrivial inclusions, not {incl}"),
        }
    }

    /// Checks `∂3(τ(U ⊇ U3)) = ξ(U)|U3 - ξ(U3)` on both inclusions.
    pub fn verify(&self, curve: &Curve) -> Result<()> {
        for (k, incl) in Inclusion::NONTRIVIAL.into_iter().enumerate() {
            let lhs = curve.derive(&self.tau[k]);
            let rhs = &curve.restrict(&self.xi[incl.source.index()], incl)? - &self.xi[2];
            if lhs != rhs {
                return Err(DeformError::NotACocycle(incl));
            }
        }
        Ok(())
    }
}

/// Chooses `τ` as a preimage under `∂3` of the restriction defect of `ξ`.
pub fn lift_to_cochain(diagram: &CoverDiagram, xi: &CohomologyClass) -> Result<CochainRep> {
    assert_eq!(xi.degree, 0, "only degree-0 classes lift to (ψ, τ)");
    let curve = diagram.curve();
    let e3 = diagram.space(Inclusion::identity(ChartId::U3));
    let mut tau = Vec::new();
    for incl in Inclusion::NONTRIVIAL {
        let defect =
            &curve.restrict(&xi.components[incl.source.index()], incl)? - &xi.components[2];
        let p = e3
            .derivation_preimage(&defect)?
            .ok_or(DeformError::NotInImage { chart: ChartId::U3 })?;
        tau.push(p);
    }
    let rep = CochainRep {
        xi: [
            xi.components[0].clone(),
            xi.components[1].clone(),
            xi.components[2].clone(),
        ],
        tau: [tau[0].clone(), tau[1].clone()],
    };
    rep.verify(curve)?;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::MonomialOrder;
    use crate::scalar::int;

    fn diagram(a: i64, b: i64) -> CoverDiagram {
        let c = Curve::from_ab(int(a), int(b)).unwrap();
        CoverDiagram::build(&c, TruncationPolicy::default()).unwrap()
    }

    #[test]
    fn dims_both_regimes() {
        for (a, b) in [(1, 1), (0, 1)] {
            let d = diagram(a, b);
            assert_eq!(d.dims(), [4, 2, 5, 5, 5]);
            assert_eq!(hochschild_dims(d.complex()), [1, 2, 1]);
            assert_eq!(d.complex().d0.rank(), 9);
            assert_eq!(d.complex().c1_dim() - d.complex().d0.rank(), 1);
        }
    }

    #[test]
    fn zero_complex() {
        let z = ResolvingComplex::from_maps([0; 5], &Matrix::zeros(0, 0), &Matrix::zeros(0, 0));
        assert_eq!(hochschild_dims(&z), [1, 0, 0]);
        assert!(z.h0().is_empty());
    }

    #[test]
    fn identity_maps_are_identities() {
        let d = diagram(1, 1);
        let e3 = d.space(Inclusion::identity(ChartId::U3));
        let m = induced_map(d.curve(), e3, e3, Inclusion::identity(ChartId::U3)).unwrap();
        assert_eq!(m, Matrix::identity(5));
    }

    #[test]
    fn published_classes_are_cocycles() {
        for (a, b) in [(1, 1), (0, 1), (-2, 3)] {
            let d = diagram(a, b);
            let c = d.curve();
            let x1 = d.class0(reference::xi1(c)).unwrap();
            let x2 = d.class0(reference::xi2(c)).unwrap();
            assert!(d.is_cocycle(&x1) && d.is_cocycle(&x2));
            assert!(!d.is_trivial(&x1) && !d.is_trivial(&x2));
            // together they span H^0
            let h0 = d.h0();
            assert_eq!(h0.len(), 2);
            let mut rows: Vec<Vec<Scalar>> = [&x1, &x2]
                .iter()
                .map(|k| CoverDiagram::stacked(k))
                .collect();
            assert_eq!(Matrix::from_rows(rows.clone()).rank(), 2);
            rows.extend(h0.iter().map(CoverDiagram::stacked));
            assert_eq!(Matrix::from_rows(rows).rank(), 2);

            let omega = d.class1(reference::omega(c)).unwrap();
            assert!(d.is_cocycle(&omega));
            assert!(!d.is_trivial(&omega));
            let h1 = d.h1().unwrap();
            assert_eq!(h1.dim(), 1);
            assert_eq!(h1.reps[0], omega);
            assert_eq!(
                d.h1_coordinates(&h1, &omega.components[3], &omega.components[4])
                    .unwrap(),
                vec![int(1)]
            );
        }
    }

    #[test]
    fn dims_independent_of_monomial_order() {
        let c = Curve::from_ab(int(1), int(1)).unwrap();
        let policy = TruncationPolicy::default().with_order(MonomialOrder::GradedColex);
        let d = CoverDiagram::build(&c, policy).unwrap();
        assert_eq!(hochschild_dims(d.complex()), [1, 2, 1]);
    }

    #[test]
    fn lifts_satisfy_cocycle_condition() {
        let d = diagram(1, 1);
        let c = d.curve();
        let r1 = lift_to_cochain(&d, &d.class0(reference::xi1(c)).unwrap()).unwrap();
        assert!(r1.tau.iter().all(ChartElement::is_zero));
        let r2 = lift_to_cochain(&d, &d.class0(reference::xi2(c)).unwrap()).unwrap();
        assert!(r2.tau[0].is_zero());
        // differs from the listed τ2 by a constant at most
        let diff = &r2.tau[1] - &reference::tau2(c)[1];
        assert!(c.derive(&diff).is_zero());

        let d0 = diagram(0, 1);
        let c0 = d0.curve();
        let r = lift_to_cochain(&d0, &d0.class0(reference::xi2(c0)).unwrap()).unwrap();
        let listed = CochainRep {
            xi: reference::xi2(c0),
            tau: reference::tau2(c0),
        };
        listed.verify(c0).unwrap();
        r.verify(c0).unwrap();
        for h in d0.h0() {
            lift_to_cochain(&d0, &h).unwrap().verify(c0).unwrap();
        }
    }

    #[test]
    fn non_cocycle_is_rejected() {
        let d = diagram(1, 1);
        let bad = d
            .class0([
                ChartElement::one(ChartId::U1),
                ChartElement::zero(ChartId::U2),
                ChartElement::one(ChartId::U3),
            ])
            .unwrap();
        assert!(!d.is_cocycle(&bad));
        assert!(matches!(
            lift_to_cochain(&d, &bad),
            Err(DeformError::NotInImage { .. })
        ));
    }
}
