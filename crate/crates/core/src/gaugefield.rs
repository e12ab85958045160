//! Gauge-field configurations `A[a][μ](t, x, y, z)` and the quantities derived
//! from them: field strength, electric and magnetic fields, and infinitesimal
//! gauge transforms.
//!
//! # Conventions
//!
//! Natural units, `ħ = c = 1`. The stored components `A[a][μ]`, μ ∈ {t, x, y, z},
//! are the components of the connection 1-form `A[a] = A[a][μ] dx^μ`. The
//! spatial slots hold the ordinary vector potential, the time slot holds
//! `A_t = -φ`. With this layout the line integral of the stored components is
//! `∮ (A·dx - φ dt)`, i.e. minus the `φ dt - A·dx` integrand of the relativistic
//! phase, and the field strength obeys `E_i = F[i][t]`, `B_i = ½ ε_ijk F[j][k]`
//! exactly, including the non-Abelian terms.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{LabError, Result};
use crate::liealg::GeneratorSet;

/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpacetimePoint {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        SpacetimePoint { t, x, y, z }
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        SpacetimePoint::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    /// Shift coordinate `mu` by `h`.
    pub fn shifted(self, mu: usize, h: f64) -> Self {
        let mut v = self.to_array();
        v[mu] += h;
        SpacetimePoint::from_array(v)
    }

    pub fn distance(&self, other: &SpacetimePoint) -> f64 {
        let a = self.to_array();
        let b = other.to_array();
        a.iter()
            .zip(b)
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt()
    }
}

impl fmt::Display for SpacetimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(t={}, x={}, y={}, z={})", self.t, self.x, self.y, self.z)
    }
}

/// `A[a][μ]`, one 4-component row per color.
pub type Potential = Vec<[f64; 4]>;
/// `D[a][ν][μ] = ∂_ν A[a][μ]`.
pub type PotentialGradient = Vec<[[f64; 4]; 4]>;
/// Per-color antisymmetric tensor `F[a][μ][ν]`.
pub type ColorTwoForm = Vec<[[f64; 4]; 4]>;
/// Per-color spatial 3-vector.
pub type ColorVectors = Vec<[f64; 3]>;

type EvalFn = Arc<dyn Fn(&SpacetimePoint) -> Potential + Send + Sync>;
type DerivFn = Arc<dyn Fn(&SpacetimePoint) -> PotentialGradient + Send + Sync>;

/// Time profile `s(t)` multiplying the flux or amplitude of a built-in field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ramp {
    Constant,
    Linear { t0: f64, t1: f64 },
    /// `3τ² - 2τ³` on `τ = (t - t0)/(t1 - t0)`, clamped outside `[t0, t1]`.
    Smoothstep { t0: f64, t1: f64 },
}

impl Ramp {
    pub fn name(&self) -> &'static str {
        match self {
            Ramp::Constant => "constant",
            Ramp::Linear { .. } => "linear",
            Ramp::Smoothstep { .. } => "smoothstep",
        }
    }

    pub fn is_time_dependent(&self) -> bool {
        !matches!(self, Ramp::Constant)
    }

    fn window(&self) -> Option<(f64, f64)> {
        match *self {
            Ramp::Constant => None,
            Ramp::Linear { t0, t1 } | Ramp::Smoothstep { t0, t1 } => Some((t0, t1)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((t0, t1)) = self.window() {
            if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
                return Err(LabError::invalid("ramp", format!("need t0 < t1, got {t0} and {t1}")));
            }
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Ramp::Constant => 1.0,
            Ramp::Linear { t0, t1 } => ((t - t0) / (t1 - t0)).clamp(0.0, 1.0),
            Ramp::Smoothstep { t0, t1 } => {
                let tau = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
                tau * tau * (3.0 - 2.0 * tau)
            }
        }
    }

    /// `ds/dt`; one-sided kinks of the linear ramp take the interior value.
    pub fn rate(&self, t: f64) -> f64 {
        match *self {
            Ramp::Constant => 0.0,
            Ramp::Linear { t0, t1 } => {
                if (t0..=t1).contains(&t) {
                    1.0 / (t1 - t0)
                } else {
                    0.0
                }
            }
            Ramp::Smoothstep { t0, t1 } => {
                let tau = (t - t0) / (t1 - t0);
                if (0.0..=1.0).contains(&tau) {
                    6.0 * tau * (1.0 - tau) / (t1 - t0)
                } else {
                    0.0
                }
            }
        }
    }
}

/// Gauge function ξ used by the pure-gauge scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaugeFunction {
    /// `ξ = x·y`
    Product,
    /// `ξ = sin x · cos y`
    SinCos,
}

impl GaugeFunction {
    pub fn name(&self) -> &'static str {
        match self {
            GaugeFunction::Product => "xy",
            GaugeFunction::SinCos => "sin_cos",
        }
    }

    fn gradient(&self, x: f64, y: f64) -> [f64; 3] {
        match self {
            GaugeFunction::Product => [y, x, 0.0],
            GaugeFunction::SinCos => [x.cos() * y.cos(), -x.sin() * y.sin(), 0.0],
        }
    }

    /// Symmetric Hessian in the spatial block.
    fn hessian(&self, x: f64, y: f64) -> [[f64; 3]; 3] {
        match self {
            GaugeFunction::Product => [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0; 3]],
            GaugeFunction::SinCos => {
                let (sx, cx, sy, cy) = (x.sin(), x.cos(), y.sin(), y.cos());
                [[-sx * cy, -cx * sy, 0.0], [-cx * sy, -sx * cy, 0.0], [0.0; 3]]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    AbelianSolenoid,
    EmbeddedSolenoid,
    TwoColor,
    PureGauge,
}

impl FieldKind {
    pub const ALL: [FieldKind; 4] = [
        FieldKind::AbelianSolenoid,
        FieldKind::EmbeddedSolenoid,
        FieldKind::TwoColor,
        FieldKind::PureGauge,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FieldKind::AbelianSolenoid => "abelian_solenoid",
            FieldKind::EmbeddedSolenoid => "embedded_solenoid_single_color",
            FieldKind::TwoColor => "two_color",
            FieldKind::PureGauge => "pure_gauge",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "abelian_solenoid" => Ok(FieldKind::AbelianSolenoid),
            "embedded_solenoid_single_color" | "embedded_solenooid_single_color" => {
                Ok(FieldKind::EmbeddedSolenoid)
            }
            "two_color" => Ok(FieldKind::TwoColor),
            "pure_gauge" => Ok(FieldKind::PureGauge),
            "custom" => Err(LabError::invalid(
                "kind",
                "custom fields are built in code with GaugeField::from_fn",
            )),
            other => Err(LabError::invalid("kind", format!("unknown field kind `{other}`"))),
        }
    }
}

/// Parameters of a built-in field. Solenoid axes run along z through the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldConfig {
    pub kind: FieldKind,
    pub flux_max: f64,
    pub solenoid_radius: f64,
    pub ramp: Ramp,
    /// Unit color vector for single-color embeddings; ignored by U(1) kinds.
    pub color_direction: Vec<f64>,
    /// `(a₁, a₂)` for the two-color field.
    pub amplitudes: [f64; 2],
    pub gauge_function: GaugeFunction,
    pub gauge_scale: f64,
}

impl FieldConfig {
    pub fn abelian_solenoid(flux_max: f64, radius: f64, ramp: Ramp) -> Self {
        FieldConfig {
            kind: FieldKind::AbelianSolenoid,
            flux_max,
            solenoid_radius: radius,
            ramp,
            color_direction: vec![1.0],
            amplitudes: [0.0, 0.0],
            gauge_function: GaugeFunction::Product,
            gauge_scale: 1.0,
        }
    }

    pub fn embedded_solenoid(flux_max: f64, radius: f64, ramp: Ramp, direction: Vec<f64>) -> Self {
        FieldConfig {
            kind: FieldKind::EmbeddedSolenoid,
            color_direction: direction,
            ..FieldConfig::abelian_solenoid(flux_max, radius, ramp)
        }
    }

    pub fn two_color(a1: f64, a2: f64, ramp: Ramp) -> Self {
        FieldConfig {
            kind: FieldKind::TwoColor,
            amplitudes: [a1, a2],
            ..FieldConfig::abelian_solenoid(0.0, 1.0, ramp)
        }
    }

    pub fn pure_gauge(function: GaugeFunction, scale: f64) -> Self {
        FieldConfig {
            kind: FieldKind::PureGauge,
            gauge_function: function,
            gauge_scale: scale,
            ..FieldConfig::abelian_solenoid(0.0, 1.0, Ramp::Constant)
        }
    }

    pub fn validate(&self, group: &GeneratorSet) -> Result<()> {
        self.ramp.validate()?;
        let finite = [self.flux_max, self.solenoid_radius, self.gauge_scale]
            .into_iter()
            .chain(self.amplitudes)
            .all(f64::is_finite);
        if !finite {
            return Err(LabError::invalid("field", "parameters must be finite"));
        }
        if !(self.solenoid_radius > 0.0) {
            return Err(LabError::invalid("solenoid_radius", "must be positive"));
        }
        match self.kind {
            FieldKind::AbelianSolenoid => {
                if !group.is_abelian() {
                    return Err(LabError::invalid(
                        "kind",
                        "abelian_solenoid needs the U(1) group; use embedded_solenoid_single_color",
                    ));
                }
            }
            FieldKind::TwoColor => {
                if group.dim() < 2 {
                    return Err(LabError::invalid("kind", "two_color needs at least two colors"));
                }
            }
            FieldKind::EmbeddedSolenoid | FieldKind::PureGauge => {
                if !group.is_abelian() {
                    self.check_direction(group)?;
                }
            }
        }
        Ok(())
    }

    fn check_direction(&self, group: &GeneratorSet) -> Result<()> {
        if self.color_direction.len() != group.dim() {
            return Err(LabError::invalid(
                "color_direction",
                format!("expected {} components, got {}", group.dim(), self.color_direction.len()),
            ));
        }
        let norm: f64 = self.color_direction.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(LabError::invalid("color_direction", format!("must be a unit vector (norm {norm})")));
        }
        Ok(())
    }

    /// Per-color weights used by the single-color kinds.
    fn color_weights(&self, group: &GeneratorSet) -> Vec<f64> {
        if group.is_abelian() {
            vec![1.0]
        } else {
            self.color_direction.clone()
        }
    }
}

/// Coupling constants. `g` enters non-Abelian terms, `e` the Abelian phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub g: f64,
    pub e: f64,
}

impl Default for Couplings {
    fn default() -> Self {
        Couplings { g: 1.0, e: 1.0 }
    }
}

/// A gauge potential together with its group, couplings and optional
/// analytic derivatives. Cloning is cheap; evaluators are shared.
#[derive(Clone)]
pub struct GaugeField {
    group: Arc<GeneratorSet>,
    eval: EvalFn,
    deriv: Option<DerivFn>,
    couplings: Couplings,
    fd_step: f64,
    label: String,
}

impl fmt::Debug for GaugeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaugeField")
            .field("group", &self.group.label())
            .field("label", &self.label)
            .field("couplings", &self.couplings)
            .field("analytic_derivatives", &self.deriv.is_some())
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

impl GaugeField {
    /// Custom field from an evaluator; derivatives fall back to central differences.
    pub fn from_fn<F>(group: Arc<GeneratorSet>, label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&SpacetimePoint) -> Potential + Send + Sync + 'static,
    {
        GaugeField {
            group,
            eval: Arc::new(eval),
            deriv: None,
            couplings: Couplings::default(),
            fd_step: DEFAULT_FD_STEP,
            label: label.into(),
        }
    }

    pub fn with_derivative<F>(mut self, deriv: F) -> Self
    where
        F: Fn(&SpacetimePoint) -> PotentialGradient + Send + Sync + 'static,
    {
        self.deriv = Some(Arc::new(deriv));
        self
    }

    pub fn with_couplings(mut self, couplings: Couplings) -> Self {
        self.couplings = couplings;
        self
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    /// Same potential, derivatives by central differences only.
    pub fn numeric_derivatives(mut self) -> Self {
        self.deriv = None;
        self
    }

    /// The field `λ·A`, with analytic derivatives scaled alongside.
    pub fn scaled(&self, lambda: f64) -> Self {
        let eval = self.eval.clone();
        let deriv = self.deriv.clone().map(|d| {
            Arc::new(move |p: &SpacetimePoint| {
                let mut g = d(p);
                for row in g.iter_mut().flatten().flatten() {
                    *row *= lambda;
                }
                g
            }) as DerivFn
        });
        GaugeField {
            group: self.group.clone(),
            eval: Arc::new(move |p: &SpacetimePoint| {
                let mut a = eval(p);
                for c in a.iter_mut().flatten() {
                    *c *= lambda;
                }
                a
            }),
            deriv,
            couplings: self.couplings,
            fd_step: self.fd_step,
            label: format!("{}*{}", lambda, self.label),
        }
    }

    pub fn group(&self) -> &GeneratorSet {
        &self.group
    }

    pub fn group_arc(&self) -> Arc<GeneratorSet> {
        self.group.clone()
    }

    pub fn couplings(&self) -> Couplings {
        self.couplings
    }

    /// Coupling multiplying the line integral in the phase: `e` for U(1), `g` otherwise.
    pub fn phase_coupling(&self) -> f64 {
        if self.group.is_abelian() {
            self.couplings.e
        } else {
            self.couplings.g
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.deriv.is_some()
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn colors(&self) -> usize {
        self.group.dim()
    }

    pub fn potential(&self, p: &SpacetimePoint) -> Result<Potential> {
        if !p.is_finite() {
            return Err(LabError::NonFinite(format!("evaluation point {p}")));
        }
        let a = (self.eval)(p);
        if a.len() != self.colors() {
            return Err(LabError::DimensionMismatch(format!(
                "field `{}` returned {} colors, group has {}",
                self.label,
                a.len(),
                self.colors()
            )));
        }
        if a.iter().flatten().any(|v| !v.is_finite()) {
            return Err(LabError::NonFinite(format!("potential of `{}` at {p}", self.label)));
        }
        Ok(a)
    }

    /// `∂_ν A[a][μ]`, analytic when available.
    pub fn gradient(&self, p: &SpacetimePoint) -> Result<PotentialGradient> {
        let d = match &self.deriv {
            Some(deriv) => {
                if !p.is_finite() {
                    return Err(LabError::NonFinite(format!("evaluation point {p}")));
                }
                deriv(p)
            }
            None => self.numeric_gradient(p)?,
        };
        if d.len() != self.colors() || d.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(LabError::DerivativeFailure(format!("{p} in `{}`", self.label)));
        }
        Ok(d)
    }

    /// Central-difference gradient regardless of analytic availability.
    pub fn numeric_gradient(&self, p: &SpacetimePoint) -> Result<PotentialGradient> {
        let h = self.fd_step;
        let mut out = vec![[[0.0; 4]; 4]; self.colors()];
        for nu in 0..4 {
            let plus = self
                .potential(&p.shifted(nu, h))
                .map_err(|_| LabError::DerivativeFailure(format!("{p} in `{}`", self.label)))?;
            let minus = self
                .potential(&p.shifted(nu, -h))
                .map_err(|_| LabError::DerivativeFailure(format!("{p} in `{}`", self.label)))?;
            for a in 0..self.colors() {
                for mu in 0..4 {
                    out[a][nu][mu] = (plus[a][mu] - minus[a][mu]) / (2.0 * h);
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative `dA[a][μ][ν] = ∂_μ A[a][ν] - ∂_ν A[a][μ]`.
    pub fn exterior_derivative(&self, p: &SpacetimePoint) -> Result<ColorTwoForm> {
        let d = self.gradient(p)?;
        Ok(d.iter()
            .map(|g| {
                let mut w = [[0.0; 4]; 4];
                for mu in 0..4 {
                    for nu in (mu + 1)..4 {
                        w[mu][nu] = g[mu][nu] - g[nu][mu];
                        w[nu][mu] = -w[mu][nu];
                    }
                }
                w
            })
            .collect())
    }

    /// `F[a][μ][ν] = ∂_μ A[a][ν] - ∂_ν A[a][μ] + g C[a][b][c] A[b][μ] A[c][ν]`.
    pub fn field_strength(&self, p: &SpacetimePoint) -> Result<ColorTwoForm> {
        let mut f = self.exterior_derivative(p)?;
        if self.group.is_abelian() {
            return Ok(f);
        }
        let a = self.potential(p)?;
        let g = self.couplings.g;
        let n = self.colors();
        for (col, fa) in f.iter_mut().enumerate() {
            for mu in 0..4 {
                for nu in (mu + 1)..4 {
                    let mut s = 0.0;
                    for b in 0..n {
                        for c in 0..n {
                            let k = self.group.c(col, b, c);
                            if k != 0.0 {
                                s += k * a[b][mu] * a[c][nu];
                            }
                        }
                    }
                    fa[mu][nu] += g * s;
                    fa[nu][mu] = -fa[mu][nu];
                }
            }
        }
        Ok(f)
    }

    /// `E[a] = -∇φ[a] - ∂_t A[a] - g C[a][b][c] A[b] φ[c]` with `φ = -A[a][t]`.
    pub fn electric_field(&self, p: &SpacetimePoint) -> Result<ColorVectors> {
        let a = self.potential(p)?;
        let d = self.gradient(p)?;
        let g = self.couplings.g;
        let n = self.colors();
        let mut out = vec![[0.0; 3]; n];
        for (col, e) in out.iter_mut().enumerate() {
            for i in 0..3 {
                let grad_phi = -d[col][i + 1][0];
                let dt_a = d[col][0][i + 1];
                let mut s = 0.0;
                if !self.group.is_abelian() {
                    for b in 0..n {
                        for c in 0..n {
                            let k = self.group.c(col, b, c);
                            if k != 0.0 {
                                s += k * a[b][i + 1] * (-a[c][0]);
                            }
                        }
                    }
                }
                e[i] = -grad_phi - dt_a - g * s;
            }
        }
        Ok(out)
    }

    /// `B[a] = ∇×A[a] + (g/2) C[a][b][c] A[b]×A[c]`.
    pub fn magnetic_field(&self, p: &SpacetimePoint) -> Result<ColorVectors> {
        let a = self.potential(p)?;
        let d = self.gradient(p)?;
        let g = self.couplings.g;
        let n = self.colors();
        let mut out = vec![[0.0; 3]; n];
        for (col, b_out) in out.iter_mut().enumerate() {
            let dd = &d[col];
            // dd[j][k] = ∂_j A_k with spatial indices shifted by one
            let curl = [
                dd[2][3] - dd[3][2],
                dd[3][1] - dd[1][3],
                dd[1][2] - dd[2][1],
            ];
            let mut comm = [0.0; 3];
            if !self.group.is_abelian() {
                for b in 0..n {
                    for c in 0..n {
                        let k = self.group.c(col, b, c);
                        if k != 0.0 {
                            let cr = cross(spatial(&a[b]), spatial(&a[c]));
                            for i in 0..3 {
                                comm[i] += k * cr[i];
                            }
                        }
                    }
                }
            }
            for i in 0..3 {
                b_out[i] = curl[i] + 0.5 * g * comm[i];
            }
        }
        Ok(out)
    }
}

pub(crate) fn spatial(v: &[f64; 4]) -> [f64; 3] {
    [v[1], v[2], v[3]]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

type ColorFn = Arc<dyn Fn(&SpacetimePoint) -> Vec<f64> + Send + Sync>;
type ColorGradFn = Arc<dyn Fn(&SpacetimePoint) -> Vec<[f64; 4]> + Send + Sync>;

/// Per-color gauge parameter `ω_a(x)` with optional analytic gradient `∂_μ ω_a`.
#[derive(Clone)]
pub struct GaugeParameter {
    value: ColorFn,
    gradient: Option<ColorGradFn>,
}

impl GaugeParameter {
    pub fn new<F>(value: F) -> Self
    where
        F: Fn(&SpacetimePoint) -> Vec<f64> + Send + Sync + 'static,
    {
        GaugeParameter {
            value: Arc::new(value),
            gradient: None,
        }
    }

    pub fn with_gradient<G>(mut self, gradient: G) -> Self
    where
        G: Fn(&SpacetimePoint) -> Vec<[f64; 4]> + Send + Sync + 'static,
    {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    pub fn value(&self, p: &SpacetimePoint) -> Vec<f64> {
        (self.value)(p)
    }

    pub fn gradient(&self, p: &SpacetimePoint, h: f64) -> Vec<[f64; 4]> {
        if let Some(g) = &self.gradient {
            return g(p);
        }
        let mut out = vec![[0.0; 4]; self.value(p).len()];
        for mu in 0..4 {
            let plus = self.value(&p.shifted(mu, h));
            let minus = self.value(&p.shifted(mu, -h));
            for (o, (u, v)) in out.iter_mut().zip(plus.iter().zip(&minus)) {
                o[mu] = (u - v) / (2.0 * h);
            }
        }
        out
    }
}

/// First-order gauge transform
/// `A[a][μ] → A[a][μ] + (ε/g) ∂_μ ω_a - ε C[a][b][c] ω_b A[c][μ]`.
///
/// The sign of the rotation term is the one under which the field strength
/// defined above transforms covariantly and the Wilson loop trace is
/// invariant; `g` is the phase coupling (`e` for U(1)). The transformed field
/// uses central-difference derivatives.
pub fn infinitesimal_gauge_transform(fld: &GaugeField, omega: &GaugeParameter, eps: f64) -> GaugeField {
    let base = fld.clone();
    let omega = omega.clone();
    let coupling = fld.phase_coupling();
    let h = fld.fd_step;
    let label = format!("{}+gauge({eps})", fld.label);
    let eval = move |p: &SpacetimePoint| -> Potential {
        let mut a = match base.potential(p) {
            Ok(a) => a,
            Err(_) => return vec![[f64::NAN; 4]; base.colors()],
        };
        if eps == 0.0 {
            return a;
        }
        let w = omega.value(p);
        let dw = omega.gradient(p, h);
        let n = base.colors();
        let original = a.clone();
        for col in 0..n {
            for mu in 0..4 {
                let mut rot = 0.0;
                if !base.group.is_abelian() {
                    for b in 0..n {
                        for c in 0..n {
                            let k = base.group.c(col, b, c);
                            if k != 0.0 {
                                rot += k * w[b] * original[c][mu];
                            }
                        }
                    }
                }
                a[col][mu] += eps / coupling * dw[col][mu] - eps * rot;
            }
        }
        a
    };
    GaugeField {
        group: fld.group.clone(),
        eval: Arc::new(eval),
        deriv: None,
        couplings: fld.couplings,
        fd_step: fld.fd_step,
        label,
    }
}

/// Azimuthal solenoid profile without the flux factor: returns
/// `(A_x, A_y)` and their x/y derivatives for unit flux.
fn solenoid_shape(x: f64, y: f64, radius: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let rho2 = x * x + y * y;
    if rho2 <= radius * radius {
        let k = 1.0 / (2.0 * PI * radius * radius);
        // rows: ∂_x, ∂_y ; cols: A_x, A_y
        ([-k * y, k * x], [[0.0, k], [-k, 0.0]])
    } else {
        let k = 1.0 / (2.0 * PI);
        let r4 = rho2 * rho2;
        (
            [-k * y / rho2, k * x / rho2],
            [
                [2.0 * k * x * y / r4, k * (y * y - x * x) / r4],
                [-k * (x * x - y * y) / r4, -2.0 * k * x * y / r4],
            ],
        )
    }
}

/// Builds a built-in field. All built-in kinds have `A[a][t] = 0`.
pub fn build_field(cfg: &FieldConfig, group: Arc<GeneratorSet>, couplings: Couplings) -> Result<GaugeField> {
    cfg.validate(&group)?;
    let colors = group.dim();
    let label = cfg.kind.name().to_string();
    let field = match cfg.kind {
        FieldKind::AbelianSolenoid | FieldKind::EmbeddedSolenoid => {
            let weights = cfg.color_weights(&group);
            let (flux, radius, ramp) = (cfg.flux_max, cfg.solenoid_radius, cfg.ramp);
            let w2 = weights.clone();
            GaugeField::from_fn(group, label, move |p| {
                let (shape, _) = solenoid_shape(p.x, p.y, radius);
                let phi = flux * ramp.value(p.t);
                weights
                    .iter()
                    .map(|w| [0.0, w * phi * shape[0], w * phi * shape[1], 0.0])
                    .collect()
            })
            .with_derivative(move |p| {
                let (shape, d) = solenoid_shape(p.x, p.y, radius);
                let phi = flux * ramp.value(p.t);
                let dphi = flux * ramp.rate(p.t);
                w2.iter()
                    .map(|w| {
                        let mut g = [[0.0; 4]; 4];
                        g[0] = [0.0, w * dphi * shape[0], w * dphi * shape[1], 0.0];
                        g[1] = [0.0, w * phi * d[0][0], w * phi * d[0][1], 0.0];
                        g[2] = [0.0, w * phi * d[1][0], w * phi * d[1][1], 0.0];
                        g
                    })
                    .collect()
            })
        }
        FieldKind::TwoColor => {
            let [a1, a2] = cfg.amplitudes;
            let ramp = cfg.ramp;
            GaugeField::from_fn(group, label, move |p| {
                let f = ramp.value(p.t);
                let mut a = vec![[0.0; 4]; colors];
                a[0][1] = f * a1;
                a[1][2] = f * a2;
                a
            })
            .with_derivative(move |p| {
                let df = ramp.rate(p.t);
                let mut g = vec![[[0.0; 4]; 4]; colors];
                g[0][0][1] = df * a1;
                g[1][0][2] = df * a2;
                g
            })
        }
        FieldKind::PureGauge => {
            let weights = cfg.color_weights(&group);
            let w2 = weights.clone();
            let (xi, scale) = (cfg.gauge_function, cfg.gauge_scale);
            GaugeField::from_fn(group, label, move |p| {
                let gr = xi.gradient(p.x, p.y);
                weights
                    .iter()
                    .map(|w| [0.0, w * scale * gr[0], w * scale * gr[1], w * scale * gr[2]])
                    .collect()
            })
            .with_derivative(move |p| {
                let hs = xi.hessian(p.x, p.y);
                w2.iter()
                    .map(|w| {
                        let mut g = [[0.0; 4]; 4];
                        for j in 0..3 {
                            for k in 0..3 {
                                g[j + 1][k + 1] = w * scale * hs[j][k];
                            }
                        }
                        g
                    })
                    .collect()
            })
        }
    };
    Ok(field.with_couplings(couplings))
}

/// The identically vanishing field on `group`.
pub fn zero_field(group: Arc<GeneratorSet>) -> GaugeField {
    let n = group.dim();
    GaugeField::from_fn(group, "zero", move |_| vec![[0.0; 4]; n])
        .with_derivative(move |_| vec![[[0.0; 4]; 4]; n])
}
