//! The threshold densities `γ₂` and `c₂`.
//!
//! * `γ₂ = 1 / (2x(1-x))` where `x ∈ (0,1)` solves `exp(-(1-x)/(2x)) = x`;
//! * `c₂ = -ln y / (1-y)²` where `y ∈ (0,1)` solves `3(1-y) + (1+2y) ln y = 0`.
//!
//! Both auxiliary equations also vanish at 1, so the root is located by a
//! coarse scan of `[0.01, 0.99]` that must find exactly one sign change,
//! then bisected to a bracket narrower than `1e-13`.

use serde::Serialize;

use crate::error::{Error, Result};

const SCAN_STEP: f64 = 0.01;
const BRACKET_WIDTH: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdConstant {
    pub name: &'static str,
    pub inner_root: f64,
    pub value: f64,
    pub residual: f64,
    pub bracket: [f64; 2],
}

pub fn gamma2_equation(x: f64) -> f64 {
    (-(1.0 - x) / (2.0 * x)).exp() - x
}

pub fn gamma2_from_root(x: f64) -> f64 {
    1.0 / (2.0 * x * (1.0 - x))
}

pub fn c2_equation(y: f64) -> f64 {
    3.0 * (1.0 - y) + (1.0 + 2.0 * y) * y.ln()
}

pub fn c2_from_root(y: f64) -> f64 {
    -y.ln() / ((1.0 - y) * (1.0 - y))
}

pub fn solve_gamma2() -> Result<ThresholdConstant> {
    let deriv = |x: f64| (-(1.0 - x) / (2.0 * x)).exp() / (2.0 * x * x) - 1.0;
    solve("gamma2", gamma2_equation, deriv, gamma2_from_root)
}

pub fn solve_c2() -> Result<ThresholdConstant> {
    let deriv = |y: f64| -3.0 + 2.0 * y.ln() + (1.0 + 2.0 * y) / y;
    solve("c2", c2_equation, deriv, c2_from_root)
}

fn solve(
    name: &'static str,
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    value_of: impl Fn(f64) -> f64,
) -> Result<ThresholdConstant> {
    let [mut lo, mut hi] = scan_for_sign_change(&f)?;
    let mut f_lo = f(lo);
    while hi - lo >= BRACKET_WIDTH {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let mut root = 0.5 * (lo + hi);
    // one Newton step, kept only if it stays in the bracket and improves
    let polished = root - f(root) / df(root);
    if (lo..=hi).contains(&polished) && f(polished).abs() < f(root).abs() {
        root = polished;
    }
    Ok(ThresholdConstant {
        name,
        inner_root: root,
        value: value_of(root),
        residual: f(root).abs(),
        bracket: [lo, hi],
    })
}

fn scan_for_sign_change(f: &impl Fn(f64) -> f64) -> Result<[f64; 2]> {
    let steps = ((0.99 - 0.01) / SCAN_STEP).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| 0.01 + i as f64 * SCAN_STEP).collect();
    let changes: Vec<[f64; 2]> = grid
        .windows(2)
        .filter(|w| (f(w[0]) < 0.0) != (f(w[1]) < 0.0))
        .map(|w| [w[0], w[1]])
        .collect();
    match changes.as_slice() {
        [one] => Ok(*one),
        _ => Err(Error::Solver(format!(
            "expected one sign change on [0.01, 0.99], found {}",
            changes.len()
        ))),
    }
}
