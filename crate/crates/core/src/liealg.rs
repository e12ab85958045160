//! su(N) generator bases, structure constants, the adjoint representation and
//! the matrix exponential used by the path-ordered products.
//!
//! Generators follow the generalized Gell-Mann construction normalized to
//! `tr(T_a T_b) = δ_ab / 2`, so that `[T_a, T_b] = i C_abc T_c` with
//! `C_abc = ε_abc` for SU(2) and the textbook `f_abc` for SU(3).
//! U(1) is carried as a degenerate basis with the single generator `1` and a
//! vanishing structure tensor, so every downstream routine treats both cases
//! through the same code path.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{LabError, Result};

/// Dense complex matrix used for generators and holonomies.
pub type CMatrix = DMatrix<Complex64>;

/// Default upper bound on N for [`GeneratorSet::su`].
pub const DEFAULT_MAX_RANK: usize = 8;

/// Default truncation tolerance for [`matrix_exp`].
pub const DEFAULT_EXP_TOL: f64 = 1e-13;

const INVARIANT_TOL: f64 = 1e-12;
const CLOSURE_TOL: f64 = 1e-10;

/// Lie-algebra basis together with its structure constants.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    n: usize,
    abelian: bool,
    generators: Vec<CMatrix>,
    structure: Vec<f64>,
}

/// Numerical defects of the basis invariants; all should be ~1e-15.
#[derive(Debug, Clone, Copy, Default)]
pub struct InvariantDefects {
    pub hermiticity: f64,
    pub trace: f64,
    pub normalization: f64,
    pub antisymmetry: f64,
    pub closure: f64,
}

impl InvariantDefects {
    pub fn max(&self) -> f64 {
        [
            self.hermiticity,
            self.trace,
            self.normalization,
            self.antisymmetry,
            self.closure,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl GeneratorSet {
    /// su(N) basis with the default rank guardrail.
    pub fn su(n: usize) -> Result<Self> {
        Self::su_with_limit(n, DEFAULT_MAX_RANK)
    }

    pub fn su_with_limit(n: usize, max_rank: usize) -> Result<Self> {
        if n < 2 {
            return Err(LabError::RankTooSmall(n));
        }
        if n > max_rank {
            return Err(LabError::RankTooLarge {
                requested: n,
                limit: max_rank,
            });
        }
        let generators = gell_mann_basis(n);
        let mut set = GeneratorSet {
            n,
            abelian: false,
            generators,
            structure: Vec::new(),
        };
        set.structure = structure_constants(&set)?;
        Ok(set)
    }

    /// The Abelian basis: one 1×1 generator equal to 1, all structure constants zero.
    pub fn u1() -> Self {
        GeneratorSet {
            n: 1,
            abelian: true,
            generators: vec![CMatrix::identity(1, 1)],
            structure: vec![0.0],
        }
    }

    /// N of SU(N); 1 for U(1).
    pub fn rank(&self) -> usize {
        self.n
    }

    /// Number of generators (colors).
    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn generator(&self, a: usize) -> &CMatrix {
        &self.generators[a]
    }

    /// `C[a][b][c]` (0-based indices).
    #[inline]
    pub fn c(&self, a: usize, b: usize, c: usize) -> f64 {
        let d = self.dim();
        self.structure[(a * d + b) * d + c]
    }

    /// Dense `dim³` structure tensor in row-major `[a][b][c]` order.
    pub fn structure_tensor(&self) -> &[f64] {
        &self.structure
    }

    pub fn label(&self) -> String {
        if self.abelian {
            "U(1)".to_string()
        } else {
            format!("SU({})", self.n)
        }
    }

    /// Evaluates every type invariant and returns the worst defect of each kind.
    pub fn invariant_defects(&self) -> InvariantDefects {
        let mut out = InvariantDefects::default();
        if self.abelian {
            return out;
        }
        let d = self.dim();
        for (a, ta) in self.generators.iter().enumerate() {
            out.hermiticity = out.hermiticity.max(max_abs(&(ta - ta.adjoint())));
            out.trace = out.trace.max(ta.trace().norm());
            for (b, tb) in self.generators.iter().enumerate() {
                let expect = if a == b { 0.5 } else { 0.0 };
                let tr = (ta * tb).trace();
                out.normalization = out.normalization.max((tr - Complex64::new(expect, 0.0)).norm());
                for c in 0..d {
                    out.antisymmetry = out
                        .antisymmetry
                        .max((self.c(a, b, c) + self.c(b, a, c)).abs())
                        .max((self.c(a, b, c) + self.c(a, c, b)).abs());
                }
                let comm = ta * tb - tb * ta;
                let mut span = CMatrix::zeros(self.n, self.n);
                for (c, tc) in self.generators.iter().enumerate() {
                    span += tc * Complex64::new(0.0, self.c(a, b, c));
                }
                out.closure = out.closure.max(max_abs(&(comm - span)));
            }
        }
        out
    }

    pub fn check_invariants(&self) -> bool {
        self.invariant_defects().max() < INVARIANT_TOL
    }
}

/// Generalized Gell-Mann matrices (halved), ordered so that N = 2 gives the
/// Pauli matrices and N = 3 gives λ1..λ8 in the standard order.
fn gell_mann_basis(n: usize) -> Vec<CMatrix> {
    let half = Complex64::new(0.5, 0.0);
    let mut out = Vec::with_capacity(n * n - 1);
    for k in 1..n {
        for j in 0..k {
            let mut sym = CMatrix::zeros(n, n);
            sym[(j, k)] = half;
            sym[(k, j)] = half;
            out.push(sym);

            let mut anti = CMatrix::zeros(n, n);
            anti[(j, k)] = Complex64::new(0.0, -0.5);
            anti[(k, j)] = Complex64::new(0.0, 0.5);
            out.push(anti);
        }
        // diagonal generator number k: diag(1, .., 1, -k, 0, ..) scaled
        let l = k as f64;
        let norm = (2.0 / (l * (l + 1.0))).sqrt() * 0.5;
        let mut diag = CMatrix::zeros(n, n);
        for m in 0..k {
            diag[(m, m)] = Complex64::new(norm, 0.0);
        }
        diag[(k, k)] = Complex64::new(-l * norm, 0.0);
        out.push(diag);
    }
    out
}

/// `tr(x y)` without forming the product.
fn trace_of_product(x: &CMatrix, y: &CMatrix) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            acc += x[(i, j)] * y[(j, i)];
        }
    }
    acc
}

/// `C[a][b][c] = -2i tr([T_a, T_b] T_c)`, verified against the closure relation.
pub fn structure_constants(gens: &GeneratorSet) -> Result<Vec<f64>> {
    let d = gens.dim();
    if gens.is_abelian() {
        return Ok(vec![0.0; d * d * d]);
    }
    let minus_two_i = Complex64::new(0.0, -2.0);
    let mut tensor = vec![0.0; d * d * d];
    let mut worst = 0.0f64;
    for a in 0..d {
        for b in 0..d {
            let comm = commutator(&gens.generators[a], &gens.generators[b])?;
            let mut span = CMatrix::zeros(gens.n, gens.n);
            for c in 0..d {
                let value = minus_two_i * trace_of_product(&comm, &gens.generators[c]);
                if value.im.abs() > INVARIANT_TOL {
                    return Err(LabError::NonClosure(value.im.abs()));
                }
                tensor[(a * d + b) * d + c] = value.re;
                span += &gens.generators[c] * Complex64::new(0.0, value.re);
            }
            worst = worst.max(max_abs(&(comm - span)));
        }
    }
    if worst > CLOSURE_TOL {
        return Err(LabError::NonClosure(worst));
    }
    Ok(tensor)
}

/// Adjoint matrices with `(L_b)_ac = i C[a][b][c]`.
pub fn adjoint_representation(gens: &GeneratorSet) -> Vec<CMatrix> {
    let d = gens.dim();
    (0..d)
        .map(|b| CMatrix::from_fn(d, d, |a, c| Complex64::new(0.0, gens.c(a, b, c))))
        .collect()
}

pub fn commutator(x: &CMatrix, y: &CMatrix) -> Result<CMatrix> {
    if !x.is_square() || !y.is_square() || x.shape() != y.shape() {
        return Err(LabError::DimensionMismatch(format!(
            "commutator of {:?} and {:?}",
            x.shape(),
            y.shape()
        )));
    }
    Ok(x * y - y * x)
}

/// Maximum column sum of absolute values.
pub fn one_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `exp(X)` by scaling and squaring around a truncated Taylor series.
///
/// `X` is scaled by `2^-s` until its 1-norm is at most 0.5; the series is
/// summed until the last term falls below `tol · 2^-s`, which bounds the
/// remainder by the same amount, and the result is squared `s` times.
pub fn matrix_exp(x: &CMatrix, tol: f64) -> Result<CMatrix> {
    if !x.is_square() {
        return Err(LabError::DimensionMismatch(format!(
            "matrix_exp of a {:?} matrix",
            x.shape()
        )));
    }
    if !(tol > 0.0) {
        return Err(LabError::invalid("tol", "must be positive"));
    }
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(LabError::NonFinite("matrix_exp argument".into()));
    }
    let n = x.nrows();
    let norm = one_norm(x);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scale = 0.5f64.powi(squarings);
    let scaled = x * Complex64::new(scale, 0.0);
    let target = (tol * scale).max(f64::MIN_POSITIVE);

    let mut sum = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..=60 {
        term = &term * &scaled * Complex64::new(1.0 / k as f64, 0.0);
        sum += &term;
        let t = one_norm(&term);
        if t <= target || t <= f64::EPSILON * 0.25 * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}
