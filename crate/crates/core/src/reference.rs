//! Published representatives for the Weierstrass family: `Ext^1` bases, the tangent classes
//! `ξ1, ξ2`, the obstruction class `ω`, and the multiplication operators `τ2`. They are
//! checked against the computed spaces, never fed back in as expected output of the
//! linear algebra.

use num_traits::Zero;

use crate::chart::{ChartElement, ChartId, Curve, Inclusion, Regime};
use crate::scalar::{int, Scalar};

fn el(curve: &Curve, chart: ChartId, raw: &[(i64, i64, Scalar)]) -> ChartElement {
    curve
        .element(chart, raw)
        .expect("reference data uses admissible exponents")
}

/// Listed `Ext^1` basis monomials for the inclusion `pair`.
pub fn ext_basis(curve: &Curve, pair: Inclusion) -> Vec<ChartElement> {
    let chart = pair.target;
    let exps: &[(i64, i64)] = match (curve.params().regime(), chart) {
        (Regime::ANonzero, ChartId::U1) => &[(0, 0), (0, 1), (0, 2), (0, 3)],
        (Regime::ANonzero, ChartId::U2) => &[(0, 0), (0, 2)],
        (Regime::ANonzero, ChartId::U3) => &[(2, -1), (0, 0), (0, -1), (0, -2), (0, -3)],
        (Regime::AZero, ChartId::U1) => &[(0, 0), (0, 1), (1, 0), (1, 1)],
        (Regime::AZero, ChartId::U2) => &[(0, 0), (1, 0)],
        (Regime::AZero, ChartId::U3) => &[(2, -1), (0, 0), (0, -1), (1, 0), (1, -1)],
    };
    exps.iter()
        .map(|&(x, w)| el(curve, chart, &[(x, w, int(1))]))
        .collect()
}

/// `ξ1 = (1, 1, 1)`.
pub fn xi1(_curve: &Curve) -> [ChartElement; 3] {
    ChartId::ALL.map(ChartElement::one)
}

/// `ξ2 = (Δz², 15y², Δy⁻²)` for `a ≠ 0`, `(-3b·xz, x, x)` for `a = 0`.
pub fn xi2(curve: &Curve) -> [ChartElement; 3] {
    let delta = curve.params().delta.clone();
    let b = curve.b().clone();
    match curve.params().regime() {
        Regime::ANonzero => [
            el(curve, ChartId::U1, &[(0, 2, delta.clone())]),
            el(curve, ChartId::U2, &[(0, 2, int(15))]),
            el(curve, ChartId::U3, &[(0, -2, delta)]),
        ],
        Regime::AZero => [
            el(curve, ChartId::U1, &[(1, 1, int(-3) * b)]),
            el(curve, ChartId::U2, &[(1, 0, int(1))]),
            el(curve, ChartId::U3, &[(1, 0, int(1))]),
        ],
    }
}

/// The five components of `ω` over `U1⊇U1, U2⊇U2, U3⊇U3, U1⊇U3, U2⊇U3`.
pub fn omega(curve: &Curve) -> [ChartElement; 5] {
    let last = match curve.params().regime() {
        Regime::ANonzero => el(curve, ChartId::U3, &[(2, -1, int(6) * curve.a())]),
        Regime::AZero => el(curve, ChartId::U3, &[(2, -1, int(1))]),
    };
    [
        ChartElement::zero(ChartId::U1),
        ChartElement::zero(ChartId::U2),
        ChartElement::zero(ChartId::U3),
        ChartElement::zero(ChartId::U3),
        last,
    ]
}

/// `τ2` on `U1⊇U3` and `U2⊇U3`.
pub fn tau2(curve: &Curve) -> [ChartElement; 2] {
    let a = curve.a().clone();
    let b = curve.b().clone();
    match curve.params().regime() {
        Regime::ANonzero => [
            ChartElement::zero(ChartId::U3),
            el(
                curve,
                ChartId::U3,
                &[
                    (0, -1, int(-4) * &a * &a),
                    (1, 1, int(-3)),
                    (1, -1, int(9) * &b),
                    (2, -1, int(-6) * &a),
                ],
            ),
        ],
        Regime::AZero => [
            el(curve, ChartId::U3, &[(2, -1, int(1))]),
            ChartElement::zero(ChartId::U3),
        ],
    }
}

/// The identity the `Ext^1(A3, A3)` maps are described with: `15y² - Δy⁻²` for `a ≠ 0`,
/// `x + 3b·xy⁻²` for `a = 0`. Both are exact.
pub fn vanishing_identity(curve: &Curve) -> ChartElement {
    match curve.params().regime() {
        Regime::ANonzero => el(
            curve,
            ChartId::U3,
            &[(0, 2, int(15)), (0, -2, -curve.params().delta.clone())],
        ),
        Regime::AZero => {
            let mut raw = vec![(1, 0, int(1))];
            let c = int(3) * curve.b();
            if !c.is_zero() {
                raw.push((1, -2, c));
            }
            el(curve, ChartId::U3, &raw)
        }
    }
}
