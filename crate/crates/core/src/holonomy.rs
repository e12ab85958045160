//! Path-ordered exponentials around discretized loops and their low-order
//! expansion terms.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::gaugefield::GaugeField;
use crate::geometry::{line_integral, SpacetimePath};
use crate::liealg::{matrix_exp, CMatrix, DEFAULT_EXP_TOL};
use crate::numeric::ordered_map;

/// Segments multiplied together per parallel block.
const BLOCK: usize = 64;

/// Exponent convention for a single step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `exp(i g A_μ T_a Δx^μ)`: unitary for Hermitian generators.
    #[default]
    Unitary,
    /// `exp(g A_μ T_a Δx^μ)` without the imaginary unit.
    PaperLiteral,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Unitary => "unitary",
            Mode::PaperLiteral => "paper_literal",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "unitary" => Ok(Mode::Unitary),
            "paper_literal" => Ok(Mode::PaperLiteral),
            other => Err(LabError::invalid("mode", format!("expected unitary or paper_literal, got `{other}`"))),
        }
    }

    fn unit(self) -> Complex64 {
        match self {
            Mode::Unitary => Complex64::i(),
            Mode::PaperLiteral => Complex64::new(1.0, 0.0),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct HolonomyResult {
    /// Ordered product of the step exponentials.
    pub w: CMatrix,
    /// `∮ A[a]_μ dx^μ` per color.
    pub first_order: Vec<f64>,
    /// `u·g·Σ_a T_a ∮A[a]`, with `u = i` in unitary mode.
    pub first_order_matrix: CMatrix,
    /// Ordered double sum, present when requested.
    pub second_order: Option<CMatrix>,
    pub steps: usize,
    pub mode: Mode,
}

impl HolonomyResult {
    /// `max |(W†W - I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.w.nrows();
        let d = self.w.adjoint() * &self.w - CMatrix::identity(n, n);
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        self.w.trace()
    }
}

/// Per-segment exponents `X_k = u·g·Σ_a T_a A[a]_μ(mid) Δx^μ`.
fn step_exponents(fld: &GaugeField, path: &SpacetimePath, mode: Mode) -> Result<Vec<CMatrix>> {
    path.ensure_closed()?;
    let segs = path.segments();
    let group = fld.group();
    let n = group.rank();
    let scale = mode.unit() * fld.phase_coupling();
    let out = ordered_map(segs.len(), |k| -> Result<CMatrix> {
        let s = &segs[k];
        let a = fld.potential(&s.mid)?;
        let mut x = CMatrix::zeros(n, n);
        for (color, row) in a.iter().enumerate() {
            let coeff: f64 = row.iter().zip(&s.delta).map(|(v, d)| v * d).sum();
            if coeff != 0.0 {
                x += group.generator(color) * (scale * coeff);
            }
        }
        Ok(x)
    });
    out.into_iter().collect()
}

/// `Π_k exp(X_k)` with later factors on the left. Blocks of consecutive
/// factors are reduced in parallel and combined in fixed order.
fn ordered_product(exps: &[CMatrix], n: usize) -> Result<CMatrix> {
    let blocks: Vec<Result<CMatrix>> = exps
        .par_chunks(BLOCK)
        .map(|chunk| {
            let mut acc = CMatrix::identity(n, n);
            for x in chunk {
                acc = matrix_exp(x, DEFAULT_EXP_TOL)? * acc;
            }
            Ok(acc)
        })
        .collect();
    let mut w = CMatrix::identity(n, n);
    for b in blocks {
        w = b? * w;
    }
    if w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(LabError::NonFinite("ordered product".into()));
    }
    Ok(w)
}

fn first_order_matrix(fld: &GaugeField, coeffs: &[f64], mode: Mode) -> CMatrix {
    let group = fld.group();
    let n = group.rank();
    let scale = mode.unit() * fld.phase_coupling();
    let mut m = CMatrix::zeros(n, n);
    for (color, c) in coeffs.iter().enumerate() {
        m += group.generator(color) * (scale * *c);
    }
    m
}

/// `Σ_{j<k} X_k X_j + ½ Σ_k X_k²`: the second-order part of the ordered
/// product. The diagonal half-term is the equal-parameter slice of the
/// ordered double integral.
fn second_order_sum(exps: &[CMatrix], n: usize) -> CMatrix {
    let mut prefix = CMatrix::zeros(n, n);
    let mut acc = CMatrix::zeros(n, n);
    let half = Complex64::new(0.5, 0.0);
    for x in exps {
        acc += x * (&prefix + x * half);
        prefix += x;
    }
    acc
}

/// Ordered product of step exponentials around a closed path.
pub fn wilson_loop(fld: &GaugeField, path: &SpacetimePath, mode: Mode) -> Result<HolonomyResult> {
    let exps = step_exponents(fld, path, mode)?;
    let n = fld.group().rank();
    let w = ordered_product(&exps, n)?;
    let first_order = line_integral(fld, path)?;
    Ok(HolonomyResult {
        w,
        first_order_matrix: first_order_matrix(fld, &first_order, mode),
        first_order,
        second_order: None,
        steps: exps.len(),
        mode,
    })
}

/// Wilson loop together with its expansion to `order` (1 or 2).
pub fn expansion_terms(fld: &GaugeField, path: &SpacetimePath, order: usize, mode: Mode) -> Result<HolonomyResult> {
    if !(1..=2).contains(&order) {
        return Err(LabError::UnsupportedOrder(order));
    }
    let exps = step_exponents(fld, path, mode)?;
    let n = fld.group().rank();
    let w = ordered_product(&exps, n)?;
    let first_order = line_integral(fld, path)?;
    Ok(HolonomyResult {
        w,
        first_order_matrix: first_order_matrix(fld, &first_order, mode),
        first_order,
        second_order: (order == 2).then(|| second_order_sum(&exps, n)),
        steps: exps.len(),
        mode,
    })
}

/// `e ∮ (A⁰dt - A·dx)`. Since the potential is stored as the 1-form
/// `(-A⁰, A)`, this is `-e` times the line integral.
pub fn abelian_phase(fld: &GaugeField, path: &SpacetimePath) -> Result<f64> {
    if !fld.group().is_abelian() {
        return Err(LabError::NonAbelianField);
    }
    path.ensure_closed()?;
    Ok(-fld.couplings().e * line_integral(fld, path)?[0])
}

/// Largest entry modulus of `a - b`.
pub fn matrix_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaugefield::{build_field, zero_field, Couplings, FieldConfig, GaugeFunction, Ramp, SpacetimePoint};
    use crate::geometry::{build_loop, Circle, LoopKind, Plane};
    use crate::liealg::GeneratorSet;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn su2() -> Arc<GeneratorSet> {
        Arc::new(GeneratorSet::su(2).unwrap())
    }

    fn circle(r: f64) -> Circle {
        Circle::new([0.0; 3], r, Plane::Xy)
    }

    fn two_color(group: Arc<GeneratorSet>) -> GaugeField {
        build_field(
            &FieldConfig::two_color(0.5, 0.8, Ramp::Smoothstep { t0: 0.0, t1: 1.0 }),
            group,
            Couplings { g: 1.1, e: 1.0 },
        )
        .unwrap()
    }

    fn two_time(steps: usize) -> SpacetimePath {
        build_loop(LoopKind::TwoTime { circle: circle(1.0), t0: 0.0, t1: 1.0 }, steps).unwrap()
    }

    #[test]
    fn zero_field_gives_identity() {
        let fld = zero_field(su2());
        let r = expansion_terms(&fld, &two_time(16), 2, Mode::Unitary).unwrap();
        assert_eq!(r.w, CMatrix::identity(2, 2));
        assert_eq!(r.first_order_matrix, CMatrix::zeros(2, 2));
        assert_eq!(r.second_order.unwrap(), CMatrix::zeros(2, 2));
    }

    #[test]
    fn open_path_rejected() {
        let fld = zero_field(su2());
        let p = SpacetimePath::straight(SpacetimePoint::default(), SpacetimePoint::new(1.0, 0.0, 0.0, 0.0), 4);
        assert!(matches!(wilson_loop(&fld, &p, Mode::Unitary), Err(LabError::OpenPath(_))));
    }

    #[test]
    fn order_three_unsupported() {
        let fld = zero_field(su2());
        assert!(matches!(
            expansion_terms(&fld, &two_time(4), 3, Mode::Unitary),
            Err(LabError::UnsupportedOrder(3))
        ));
    }

    #[test]
    fn unitary_for_su3_two_color() {
        let fld = two_color(Arc::new(GeneratorSet::su(3).unwrap()));
        let r = wilson_loop(&fld, &two_time(64), Mode::Unitary).unwrap();
        assert!(r.unitarity_defect() < 1e-10);
    }

    #[test]
    fn paper_literal_is_not_unitary() {
        let fld = two_color(su2());
        let r = wilson_loop(&fld, &two_time(64), Mode::PaperLiteral).unwrap();
        assert!(r.unitarity_defect() > 1e-3);
    }

    #[test]
    fn first_order_matches_line_integral() {
        let fld = two_color(su2());
        let path = two_time(32);
        let r = wilson_loop(&fld, &path, Mode::Unitary).unwrap();
        let i = line_integral(&fld, &path).unwrap();
        for (a, b) in r.first_order.iter().zip(&i) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn reversed_loop_gives_inverse() {
        let fld = two_color(su2());
        let path = two_time(48);
        let fwd = wilson_loop(&fld, &path, Mode::Unitary).unwrap().w;
        let back = wilson_loop(&fld, &path.reversed(), Mode::Unitary).unwrap().w;
        assert!(matrix_distance(&(back * &fwd), &CMatrix::identity(2, 2)) < 1e-10);
    }

    #[test]
    fn concatenation_multiplies() {
        let fld = build_field(
            &FieldConfig::embedded_solenoid(0.8, 0.5, Ramp::Constant, vec![0.6, 0.8, 0.0]),
            su2(),
            Couplings::default(),
        )
        .unwrap();
        let l1 = build_loop(LoopKind::Circle { circle: circle(1.0), time: 0.2 }, 64).unwrap();
        // second loop through (1, 0, 0) around (2, 0, 0)
        let l2 = SpacetimePath::from_fn("shifted", 64, |s| {
            let th = PI + 2.0 * PI * s;
            SpacetimePoint::new(0.2, 2.0 + th.cos(), th.sin(), 0.0)
        });
        let w1 = wilson_loop(&fld, &l1, Mode::Unitary).unwrap().w;
        let w2 = wilson_loop(&fld, &l2, Mode::Unitary).unwrap().w;
        let w12 = wilson_loop(&fld, &l1.then(&l2), Mode::Unitary).unwrap().w;
        assert!(matrix_distance(&w12, &(w2 * w1)) < 1e-12);
    }

    #[test]
    fn abelian_loop_is_exponential_of_flux() {
        let fld = build_field(
            &FieldConfig::abelian_solenoid(0.7, 1.0, Ramp::Constant),
            Arc::new(GeneratorSet::u1()),
            Couplings { g: 1.0, e: 1.3 },
        )
        .unwrap();
        let mut errs = vec![];
        for n in [256, 512] {
            let path = build_loop(LoopKind::Circle { circle: circle(2.0), time: 0.0 }, n).unwrap();
            let w = wilson_loop(&fld, &path, Mode::Unitary).unwrap().w[(0, 0)];
            errs.push((w - Complex64::from_polar(1.0, 1.3 * 0.7)).norm());
        }
        assert!(errs[0] < 1e-4);
        assert!((errs[0] / errs[1] - 4.0).abs() < 0.05);
    }

    #[test]
    fn embedded_loop_is_exponential_of_t3() {
        let g = 1.4;
        let flux = 0.9;
        let fld = build_field(
            &FieldConfig::embedded_solenoid(flux, 1.0, Ramp::Constant, vec![0.0, 0.0, 1.0]),
            su2(),
            Couplings { g, e: 1.0 },
        )
        .unwrap();
        let path = build_loop(LoopKind::Circle { circle: circle(2.0), time: 0.0 }, 2048).unwrap();
        let w = wilson_loop(&fld, &path, Mode::Unitary).unwrap().w;
        let half = 0.5 * g * flux;
        let expect = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::from_polar(1.0, half),
            Complex64::from_polar(1.0, -half),
        ]));
        assert!(matrix_distance(&w, &expect) < 1e-6);
    }

    #[test]
    fn expansion_remainder_is_third_order() {
        let base = two_color(su2());
        let path = two_time(64);
        let rem = |lam: f64| {
            let r = expansion_terms(&base.scaled(lam), &path, 2, Mode::Unitary).unwrap();
            let n = 2;
            let approx = CMatrix::identity(n, n) + &r.first_order_matrix + r.second_order.unwrap();
            matrix_distance(&r.w, &approx)
        };
        let ratio = rem(0.1) / rem(0.05);
        assert!((ratio - 8.0).abs() < 0.2, "{ratio}");
    }

    #[test]
    fn abelian_second_order_is_half_square() {
        let fld = build_field(
            &FieldConfig::abelian_solenoid(1.0, 1.0, Ramp::Linear { t0: 0.0, t1: 1.0 }),
            Arc::new(GeneratorSet::u1()),
            Couplings::default(),
        )
        .unwrap();
        let path = build_loop(LoopKind::TwoTime { circle: circle(1.5), t0: 0.0, t1: 1.0 }, 128).unwrap();
        let r = expansion_terms(&fld, &path, 2, Mode::Unitary).unwrap();
        let f = &r.first_order_matrix;
        let half_sq = f * f * Complex64::new(0.5, 0.0);
        assert!(matrix_distance(&r.second_order.unwrap(), &half_sq) < 1e-12);
    }

    #[test]
    fn abelian_phase_examples() {
        let u1 = Arc::new(GeneratorSet::u1());
        let stat = build_field(&FieldConfig::abelian_solenoid(1.0, 1.0, Ramp::Constant), u1.clone(), Couplings::default())
            .unwrap();
        let ccw = build_loop(LoopKind::Circle { circle: circle(2.0), time: 0.0 }, 8192).unwrap();
        let p = abelian_phase(&stat, &ccw).unwrap();
        assert!((p.abs() - 1.0).abs() < 1e-6);
        assert!((abelian_phase(&stat, &ccw.reversed()).unwrap() + p).abs() < 1e-14);

        let pure = build_field(&FieldConfig::pure_gauge(GaugeFunction::SinCos, 0.7), u1.clone(), Couplings::default())
            .unwrap();
        assert!(abelian_phase(&pure, &ccw).unwrap().abs() < 1e-10);

        let ramped = build_field(
            &FieldConfig::abelian_solenoid(1.0, 1.0, Ramp::Linear { t0: 0.0, t1: 1.0 }),
            u1,
            Couplings { g: 1.0, e: 2.0 },
        )
        .unwrap();
        let tt = build_loop(LoopKind::TwoTime { circle: circle(2.0), t0: 0.0, t1: 1.0 }, 8192).unwrap();
        assert!((abelian_phase(&ramped, &tt).unwrap().abs() - 2.0).abs() < 1e-6);

        assert!(matches!(abelian_phase(&two_color(su2()), &ccw), Err(LabError::NonAbelianField)));
    }

    #[test]
    fn mode_names_round_trip() {
        for m in [Mode::Unitary, Mode::PaperLiteral] {
            assert_eq!(Mode::parse(m.name()).unwrap(), m);
        }
        assert!(Mode::parse("hermitian").is_err());
    }
}
