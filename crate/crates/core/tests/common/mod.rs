#![allow(dead_code)]

use std::sync::Arc;

use holonomy_lab::gaugefield::{Couplings, GaugeField, Ramp};
use holonomy_lab::liealg::GeneratorSet;

/// Non-uniform SU(2) field with genuinely non-commuting colors:
/// `A¹ = f(t) a1 (1 - y, 0, 0)`, `A² = f(t) a2 (0, 1 + x, 0)`.
pub fn sheared_su2(a1: f64, a2: f64, ramp: Ramp, g: f64) -> GaugeField {
    let group = Arc::new(GeneratorSet::su(2).unwrap());
    GaugeField::from_fn(group, "sheared_su2", move |p| {
        let f = ramp.value(p.t);
        let mut a = vec![[0.0; 4]; 3];
        a[0][1] = f * a1 * (1.0 - p.y);
        a[1][2] = f * a2 * (1.0 + p.x);
        a
    })
    .with_derivative(move |p| {
        let (f, df) = (ramp.value(p.t), ramp.rate(p.t));
        let mut d = vec![[[0.0; 4]; 4]; 3];
        d[0][0][1] = df * a1 * (1.0 - p.y);
        d[0][2][1] = -f * a1;
        d[1][0][2] = df * a2 * (1.0 + p.x);
        d[1][1][2] = f * a2;
        d
    })
    .with_couplings(Couplings { g, e: 1.0 })
}

/// Levi-Civita symbol on `{0, 1, 2}`.
pub fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
