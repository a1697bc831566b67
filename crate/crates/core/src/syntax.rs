//! Textual syntax for chart elements: `-4*x^2*y^-1 + 3/2*x*z + 1`.

use std::collections::BTreeMap;

use num_traits::{One, Signed};

use crate::chart::{add_term, ChartElement, ChartId, Curve, Mono, MonomialOrder};
use crate::error::{DeformError, Result};
use crate::scalar::{self, parse_rational, Scalar};

fn monomial_string(chart: ChartId, m: Mono) -> String {
    let (vx, vw) = chart.vars();
    let mut factors = Vec::new();
    for (v, e) in [(vx, m.x), (vw, m.w)] {
        match e {
            0 => {}
            1 => factors.push(v.to_string()),
            _ => factors.push(format!("{v}^{e}")),
        }
    }
    factors.join("*")
}

/// Renders an element, largest monomial first. The output re-parses to the same element.
pub fn format_element(u: &ChartElement) -> String {
    if u.is_zero() {
        return "0".to_string();
    }
    let chart = u.chart();
    let mut terms: Vec<(&Mono, &Scalar)> = u.terms().iter().collect();
    terms.sort_by_key(|(m, _)| std::cmp::Reverse(MonomialOrder::GradedLex.key(chart, **m)));
    let mut out = String::new();
    for (k, (m, c)) in terms.into_iter().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = monomial_string(chart, *m);
        if mono.is_empty() {
            out.push_str(&scalar::compact(&abs));
        } else if abs.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&scalar::compact(&abs));
            out.push('*');
            out.push_str(&mono);
        }
    }
    out
}

fn parse_error(input: &str, reason: impl Into<String>) -> DeformError {
    DeformError::Parse {
        input: input.to_string(),
        reason: reason.into(),
    }
}

/// Splits a sum into signed terms. A `-` directly after `^` belongs to an exponent.
fn split_terms(input: &str) -> Result<Vec<(bool, String)>> {
    let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(parse_error(input, "empty expression"));
    }
    let mut terms = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    let mut prev: Option<char> = None;
    for ch in compact.chars() {
        let is_sign = (ch == '+' || ch == '-') && prev != Some('^');
        if is_sign {
            if !current.is_empty() {
                terms.push((negative, std::mem::take(&mut current)));
                negative = ch == '-';
            } else if prev.is_none() {
                negative = ch == '-';
            } else {
                return Err(parse_error(input, "dangling sign"));
            }
        } else {
            current.push(ch);
        }
        prev = Some(ch);
    }
    if current.is_empty() {
        return Err(parse_error(input, "trailing sign"));
    }
    terms.push((negative, current));
    Ok(terms)
}

/// Parses the chart syntax and reduces the result to normal form.
pub fn parse_element(curve: &Curve, chart: ChartId, input: &str) -> Result<ChartElement> {
    let (vx, vw) = chart.vars();
    let mut raw: BTreeMap<Mono, Scalar> = BTreeMap::new();
    for (negative, term) in split_terms(input)? {
        let mut coeff = Scalar::one();
        let (mut ex, mut ew) = (0i64, 0i64);
        for factor in term.split('*') {
            if factor.is_empty() {
                return Err(parse_error(input, "empty factor"));
            }
            let first = factor.chars().next().unwrap();
            if first.is_ascii_alphabetic() {
                let (var, exp) = match factor.split_once('^') {
                    Some((v, e)) => (
                        v,
                        e.parse::<i64>().map_err(|_| {
                            parse_error(input, format!("bad exponent in `{factor}`"))
                        })?,
                    ),
                    None => (factor, 1),
                };
                let var = match var {
                    v if v.len() == 1 => v.chars().next().unwrap(),
                    _ => return Err(parse_error(input, format!("unknown variable `{var}`"))),
                };
                if var == vx {
                    ex += exp;
                } else if var == vw {
                    ew += exp;
                } else {
                    return Err(parse_error(
                        input,
                        format!("variable `{var}` does not belong to chart {chart}"),
                    ));
                }
            } else {
                coeff *= parse_rational(factor)?;
            }
        }
        if negative {
            coeff = -coeff;
        }
        add_term(&mut raw, Mono::new(ex, ew), coeff);
    }
    curve.chart_reduce(chart, raw)
}
